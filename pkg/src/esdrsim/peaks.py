"""Resonance extraction: P_leave peak picking and anticrossing-gap measurement."""

import os
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .exceptions import BranchNotFoundError, EmptySpectrumError
from .spectra import Spectrum

# Sub-grid peak offsets are quantized to 2**-26 grid steps so the extracted
# frequencies are exactly invariant under uniform rescaling of P_leave.
_OFFSET_QUANTUM = 2.0 ** -26


@dataclass(frozen=True)
class ResonanceSet:
    """Per-sweep-value resonance lists: ``peaks[i]`` is an (k_i, 2) array of (mw_mhz, height)."""

    sweep_mhz: np.ndarray
    peaks: list

    def __post_init__(self):
        if self.sweep_mhz.size != len(self.peaks):
            raise ValueError("one peak array per sweep value required")
        for arr in self.peaks:
            if arr.size and np.any(np.diff(arr[:, 0]) < 0):
                raise ValueError("peak frequencies must be sorted ascending")


def _refine_parabolic(row: np.ndarray, i: int) -> tuple[float, float]:
    """Sub-grid vertex offset (in grid steps) and refined height around index i."""
    y1, y2, y3 = row[i - 1], row[i], row[i + 1]
    denom = y1 - 2.0 * y2 + y3
    if denom == 0:
        return 0.0, float(y2)
    delta = 0.5 * (y1 - y3) / denom
    delta = float(np.clip(delta, -0.5, 0.5))
    delta = round(delta / _OFFSET_QUANTUM) * _OFFSET_QUANTUM
    height = float(y2 - 0.25 * (y1 - y3) * delta)
    return delta, height


def find_resonances(
    spectrum: Spectrum, prominence: float = 0.1, min_separation: float = 0.2
) -> ResonanceSet:
    """Detect P_leave maxima along the MW axis of every sweep row.

    A maximum is kept when its prominence reaches ``prominence`` times the
    row's value range; maxima closer than ``min_separation`` (MHz) are merged
    keeping the taller. Positions are refined by parabolic interpolation over
    three points.

    Raises
    ------
    EmptySpectrumError
        If the spectrum has no grid points.
    """
    if spectrum.p_leave.size == 0:
        raise EmptySpectrumError("cannot extract resonances from an empty spectrum")
    if not 0.0 < prominence < 1.0:
        raise ValueError(f"prominence must lie in (0, 1), got {prominence}")
    step = spectrum.plan.mw_step
    if min_separation < 2.0 * step - 1e-12:
        raise ValueError(
            f"min_separation {min_separation} MHz must be at least two grid steps ({2 * step})"
        )
    distance = max(1, int(round(min_separation / step)))
    mw = spectrum.mw_mhz
    all_peaks = []
    for row in spectrum.p_leave:
        rng = float(row.max() - row.min())
        if rng == 0.0:
            all_peaks.append(np.empty((0, 2)))
            continue
        idx, _ = find_peaks(row, prominence=prominence * rng, distance=distance)
        found = np.empty((idx.size, 2))
        for j, i in enumerate(idx):
            delta, height = _refine_parabolic(row, int(i))
            found[j, 0] = mw[i] + delta * step
            found[j, 1] = height
        all_peaks.append(found)
    return ResonanceSet(sweep_mhz=spectrum.sweep_mhz.copy(), peaks=all_peaks)


@dataclass(frozen=True)
class BranchWindow:
    """Labels one crossing: where on the MW axis (and optionally the sweep axis) to look."""

    label: str
    center_mhz: float
    halfwidth_mhz: float
    sweep_min: float | None = None
    sweep_max: float | None = None

    def __post_init__(self):
        if self.halfwidth_mhz <= 0:
            raise ValueError("halfwidth_mhz must be > 0")


@dataclass(frozen=True)
class GapTrace:
    """Branch separation per sweep value inside one crossing window."""

    label: str
    sweep_mhz: np.ndarray
    gap_mhz: np.ndarray

    @property
    def min_gap(self) -> float:
        """The avoided-crossing gap: minimum branch separation across the sweep."""
        return float(self.gap_mhz.min())

    @property
    def sweep_at_min(self) -> float:
        """Sweep value at the minimum separation (the observed crossing center)."""
        return float(self.sweep_mhz[int(np.argmin(self.gap_mhz))])


def anticrossing_gap(rs: ResonanceSet, window: BranchWindow) -> GapTrace:
    """Measure the branch separation of a labeled crossing across the sweep.

    Per sweep value, the two resonances closest to the window center give the
    branch separation. A sweep value where only one resonance survives inside
    the window reads as 0 (the branches merged below the peak-resolution
    limit, the signature of a plain crossing). Sweep values with no resonance
    in the window are dropped.

    Raises
    ------
    BranchNotFoundError
        If no sweep value shows any resonance inside the window.
    """
    lo = window.center_mhz - window.halfwidth_mhz
    hi = window.center_mhz + window.halfwidth_mhz
    sweeps = []
    gaps = []
    for s, arr in zip(rs.sweep_mhz, rs.peaks):
        if window.sweep_min is not None and s < window.sweep_min:
            continue
        if window.sweep_max is not None and s > window.sweep_max:
            continue
        if arr.size == 0:
            continue
        freqs = arr[:, 0]
        inside = freqs[(freqs >= lo) & (freqs <= hi)]
        if inside.size == 0:
            continue
        if inside.size == 1:
            sweeps.append(s)
            gaps.append(0.0)
            continue
        nearest = inside[np.argsort(np.abs(inside - window.center_mhz), kind="stable")[:2]]
        sweeps.append(s)
        gaps.append(float(abs(nearest[1] - nearest[0])))
    if not sweeps:
        raise BranchNotFoundError(
            f"no resonances inside window {window.label!r} "
            f"[{lo:.6g}, {hi:.6g}] MHz for any sweep value"
        )
    return GapTrace(label=window.label, sweep_mhz=np.asarray(sweeps), gap_mhz=np.asarray(gaps))


def nearest_resonance(rs: ResonanceSet, sweep_value: float, mw_value: float) -> float:
    """The extracted resonance closest to ``mw_value`` at the given sweep value.

    Raises
    ------
    BranchNotFoundError
        If that sweep value has no extracted resonances at all.
    """
    i = int(np.argmin(np.abs(rs.sweep_mhz - sweep_value)))
    arr = rs.peaks[i]
    if arr.size == 0:
        raise BranchNotFoundError(f"no resonances at sweep value {sweep_value:.6g} MHz")
    return float(arr[np.argmin(np.abs(arr[:, 0] - mw_value)), 0])


def write_resonances_csv(rs: ResonanceSet, path) -> None:
    """Write ``sweep_mhz,mw_mhz,height`` rows, one per extracted resonance."""
    lines = ["sweep_mhz,mw_mhz,height\n"]
    for s, arr in zip(rs.sweep_mhz, rs.peaks):
        for mw, height in arr:
            lines.append(f"{s:.9g},{mw:.9g},{height:.9g}\n")
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)


def write_gaps_csv(traces: list, path) -> None:
    """Write ``label,sweep_mhz,gap_mhz`` rows for one or more gap traces."""
    lines = ["label,sweep_mhz,gap_mhz\n"]
    for trace in traces:
        for s, g in zip(trace.sweep_mhz, trace.gap_mhz):
            lines.append(f"{trace.label},{s:.9g},{g:.9g}\n")
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)

"""ESDR-specific Fourier blocks and 2D spectra over MW frequency versus an RF sweep axis.

The observable is P_leave, the total time-averaged probability of leaving |0>;
photoluminescence dips of the experiment map to P_leave peaks. Resonance
positions are the quantitatively meaningful output; contrast and linewidth
are not modeled (no optical initialization or decoherence).
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import NumericalFailureError
from .floquet import FourierHamiltonian, build_floquet, leave_probability, quasi_energies
from .spin import SystemParams, static_eigenbasis

SWEEP_KINDS = ("rf_frequency", "rf_amplitude")


def esdr_fourier_blocks(params: SystemParams) -> FourierHamiltonian:
    """Fourier blocks of the rotating-frame ESDR Hamiltonian in the (B', 0, D') basis.

    The static block carries the MW detuning ladder and MW couplings,

        H^(0) = [[Delta + V, lambda_b,  0        ],
                 [lambda_b,  0,         i*lambda_d],
                 [0,         -i*lambda_d, Delta - V]],

    and the RF drive enters through the first harmonic,

        H^(+-1) = (Omega_RF / V) * [[omega_l, 0, m_x], [0, 0, 0], [m_x, 0, -omega_l]].

    With omega_l = 0 the first harmonic degenerates to a single independent
    entry Omega_RF coupling B and D, and no diagonal drive.

    Raises
    ------
    DegenerateBasisError
        Propagated from the eigenbasis construction when m_x = omega_l = 0.
    """
    static_eigenbasis(params)  # validates the basis exists
    v = params.v
    delta = params.delta_mw
    h0 = np.array(
        [
            [delta + v, params.lambda_b, 0.0],
            [params.lambda_b, 0.0, 1j * params.lambda_d],
            [0.0, -1j * params.lambda_d, delta - v],
        ],
        dtype=complex,
    )
    blocks = {0: h0}
    if params.omega_cap_rf > 0:
        scale = params.omega_cap_rf / v
        h1 = scale * np.array(
            [
                [params.omega_l, 0.0, params.m_x],
                [0.0, 0.0, 0.0],
                [params.m_x, 0.0, -params.omega_l],
            ],
            dtype=complex,
        )
        blocks[1] = h1
        blocks[-1] = h1.conj().T
    return FourierHamiltonian(blocks=blocks, drive_freq=params.omega_rf)


def perpendicular_field_blocks(params: SystemParams) -> FourierHamiltonian:
    """Zero-parallel-field block construction, kept as an independent cross-check path.

    Valid only for omega_l = 0; the general construction must agree with this
    one pointwise in that limit.
    """
    if params.omega_l != 0:
        raise ValueError("perpendicular_field_blocks requires omega_l = 0")
    delta = params.delta_mw
    h0 = np.array(
        [
            [delta + params.m_x, params.lambda_b, 0.0],
            [params.lambda_b, 0.0, 1j * params.lambda_d],
            [0.0, -1j * params.lambda_d, delta - params.m_x],
        ],
        dtype=complex,
    )
    blocks = {0: h0}
    if params.omega_cap_rf > 0:
        h1 = params.omega_cap_rf * np.array(
            [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], dtype=complex
        )
        blocks[1] = h1
        blocks[-1] = h1
    return FourierHamiltonian(blocks=blocks, drive_freq=params.omega_rf)


def _inclusive_axis(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError(f"axis step must be > 0, got {step}")
    if stop < start:
        raise ValueError(f"axis range is empty: [{start}, {stop}]")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


@dataclass(frozen=True)
class SweepPlan:
    """A 2D grid: MW frequency axis against one swept RF parameter.

    ``sweep_kind`` selects whether the sweep axis replaces ``omega_rf`` or
    ``omega_cap_rf`` of the fixed ``params``; the MW axis always replaces
    ``omega_mw``. ``mw_margin`` is the coverage the MW axis must provide
    around d_gs.
    """

    params: SystemParams
    mw_start: float
    mw_stop: float
    mw_step: float
    sweep_kind: str
    sweep_start: float
    sweep_stop: float
    sweep_step: float
    n_max: int = 67
    mw_margin: float = 0.0

    def __post_init__(self):
        if self.sweep_kind not in SWEEP_KINDS:
            raise ValueError(f"sweep_kind must be one of {SWEEP_KINDS}, got {self.sweep_kind!r}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.mw_margin < 0:
            raise ValueError("mw_margin must be >= 0")
        _inclusive_axis(self.mw_start, self.mw_stop, self.mw_step)
        _inclusive_axis(self.sweep_start, self.sweep_stop, self.sweep_step)
        d = self.params.d_gs
        if self.mw_start > d - self.mw_margin or self.mw_stop < d + self.mw_margin:
            raise ValueError(
                f"MW axis [{self.mw_start}, {self.mw_stop}] does not cover "
                f"d_gs +- {self.mw_margin} MHz around {d}"
            )

    def mw_values(self) -> np.ndarray:
        return _inclusive_axis(self.mw_start, self.mw_stop, self.mw_step)

    def sweep_values(self) -> np.ndarray:
        return _inclusive_axis(self.sweep_start, self.sweep_stop, self.sweep_step)

    def params_at(self, sweep_value: float) -> SystemParams:
        if self.sweep_kind == "rf_frequency":
            return replace(self.params, omega_rf=float(sweep_value))
        return replace(self.params, omega_cap_rf=float(sweep_value))


@dataclass(frozen=True)
class Spectrum:
    """Leave-probability values on a (sweep value, MW value) grid plus plan metadata."""

    mw_mhz: np.ndarray
    sweep_mhz: np.ndarray
    p_leave: np.ndarray  # shape (len(sweep_mhz), len(mw_mhz))
    plan: SweepPlan
    version: str = ""

    def __post_init__(self):
        if self.p_leave.shape != (self.sweep_mhz.size, self.mw_mhz.size):
            raise ValueError("p_leave shape does not match the axes")
        if np.any(self.p_leave < 0) or np.any(self.p_leave > 1):
            raise ValueError("p_leave entries must lie in [0, 1]")


def _sweep_row(plan: SweepPlan, sweep_value: float, mw_values: np.ndarray) -> np.ndarray:
    row_params = plan.params_at(sweep_value)
    out = np.empty(mw_values.size)
    for j, mw in enumerate(mw_values):
        point = replace(row_params, omega_mw=float(mw))
        try:
            fourier = esdr_fourier_blocks(point)
            sol = quasi_energies(build_floquet(fourier, plan.n_max))
        except NumericalFailureError as exc:
            raise NumericalFailureError(
                f"solver failure at sweep={sweep_value:.9g} MHz, mw={mw:.9g} MHz: {exc}"
            ) from exc
        out[j] = leave_probability(sol)
    return out


def run_sweep(plan: SweepPlan, max_workers: int | None = None) -> Spectrum:
    """Evaluate P_leave = P(0->B') + P(0->D') on the plan's grid.

    Rows (fixed sweep value) may be evaluated concurrently; the output is
    assembled in grid order and is independent of worker count.
    """
    from . import __version__

    mw = plan.mw_values()
    sweeps = plan.sweep_values()
    if max_workers is None or max_workers == 1:
        rows = [_sweep_row(plan, s, mw) for s in sweeps]
    else:
        workers = max_workers if max_workers > 0 else (os.cpu_count() or 1)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _sweep_row(plan, s, mw), sweeps))
    p = np.vstack(rows) if rows else np.zeros((0, mw.size))
    return Spectrum(mw_mhz=mw, sweep_mhz=sweeps, p_leave=p, plan=plan, version=__version__)


def write_spectrum_csv(spectrum: Spectrum, csv_path, meta_path=None) -> None:
    """Write ``mw_mhz,sweep_mhz,p_leave`` rows plus a key = value metadata sidecar.

    The sidecar records every plan field in the run-configuration format, so a
    run can be reproduced directly from it.
    """
    csv_path = os.fspath(csv_path)
    lines = ["mw_mhz,sweep_mhz,p_leave\n"]
    for i, s in enumerate(spectrum.sweep_mhz):
        for j, mw in enumerate(spectrum.mw_mhz):
            lines.append(f"{mw:.9g},{s:.9g},{spectrum.p_leave[i, j]:.9g}\n")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
    if meta_path is None:
        meta_path = os.path.splitext(csv_path)[0] + ".meta"
    with open(os.fspath(meta_path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(plan_metadata_text(spectrum.plan, spectrum.version))


def plan_metadata_text(plan: SweepPlan, version: str) -> str:
    """Render a SweepPlan as config-format text (key = value under section headers)."""
    p = plan.params
    out = [
        "# esdrsim spectrum metadata; loadable as a run configuration\n",
        f"# code_version = {version}\n",
        "[system]\n",
        f"d_gs = {p.d_gs:.9g}\n",
        f"m_x = {p.m_x:.9g}\n",
        f"omega_l = {p.omega_l:.9g}\n",
        f"lambda_b = {p.lambda_b:.9g}\n",
        f"lambda_d = {p.lambda_d:.9g}\n",
        f"omega_rf = {p.omega_rf:.9g}\n",
        f"omega_cap_rf = {p.omega_cap_rf:.9g}\n",
        f"omega_mw = {p.omega_mw:.9g}\n",
        "\n[sweep]\n",
        f"kind = {plan.sweep_kind}\n",
        f"mw_start = {plan.mw_start:.9g}\n",
        f"mw_stop = {plan.mw_stop:.9g}\n",
        f"mw_step = {plan.mw_step:.9g}\n",
        f"sweep_start = {plan.sweep_start:.9g}\n",
        f"sweep_stop = {plan.sweep_stop:.9g}\n",
        f"sweep_step = {plan.sweep_step:.9g}\n",
        f"n_max = {plan.n_max}\n",
        f"mw_margin = {plan.mw_margin:.9g}\n",
    ]
    return "".join(out)


def read_spectrum_csv(csv_path, meta_path=None) -> Spectrum:
    """Load a spectrum written by :func:`write_spectrum_csv`."""
    from .config import load_config  # deferred: config depends on this module

    csv_path = os.fspath(csv_path)
    if meta_path is None:
        meta_path = os.path.splitext(csv_path)[0] + ".meta"
    if not os.path.exists(csv_path):
        raise FileNotFoundError(f"spectrum file not found: {csv_path}")
    if not os.path.exists(os.fspath(meta_path)):
        raise FileNotFoundError(f"spectrum metadata not found: {os.fspath(meta_path)}")
    cfg = load_config(meta_path)
    plan = cfg.sweep_plan()
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    mw = plan.mw_values()
    sweeps = plan.sweep_values()
    if data.shape[0] != mw.size * sweeps.size:
        raise ValueError(
            f"spectrum file has {data.shape[0]} rows, metadata implies {mw.size * sweeps.size}"
        )
    p = data[:, 2].reshape(sweeps.size, mw.size)
    return Spectrum(mw_mhz=mw, sweep_mhz=sweeps, p_leave=p, plan=plan)

"""Generic Floquet machinery over the extended (Sambe) space.

A time-periodic Hamiltonian H(t) = sum_m H^(m) exp(i m w t) is mapped to a
time-independent block matrix over the product basis (state, Fourier index n).
Block (n, n') equals H^(n-n'), and each diagonal block additionally carries
n*w on its diagonal. Rows are ordered with n descending from +n_max to -n_max,
three (or generally ``state_dim``) states per block.
"""

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .exceptions import NoConvergenceError, NumericalFailureError, TruncationTooSmallError


@dataclass(frozen=True)
class FourierHamiltonian:
    """Fourier coefficients H^(m) of a time-periodic Hamiltonian.

    ``blocks`` maps the harmonic index m to an (N, N) complex matrix in MHz;
    only finitely many harmonics are stored. Hermiticity of H(t) requires
    H^(-m) to equal the conjugate transpose of H^(m), which is validated at
    construction.
    """

    blocks: Mapping[int, np.ndarray]
    drive_freq: float

    def __post_init__(self):
        if self.drive_freq <= 0:
            raise ValueError(f"drive_freq must be > 0, got {self.drive_freq}")
        clean = {}
        dim = None
        for m, block in self.blocks.items():
            arr = np.asarray(block, dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError(f"block H^({m}) is not square")
            if dim is None:
                dim = arr.shape[0]
            elif arr.shape[0] != dim:
                raise ValueError("all Fourier blocks must share one dimension")
            arr.setflags(write=False)
            clean[int(m)] = arr
        if not clean:
            raise ValueError("at least one Fourier block is required")
        scale = max(np.abs(b).max() for b in clean.values()) or 1.0
        for m, block in clean.items():
            partner = clean.get(-m)
            other = partner if partner is not None else np.zeros_like(block)
            if not np.allclose(other, block.conj().T, atol=1e-12 * scale):
                raise ValueError(f"H^({-m}) must equal the conjugate transpose of H^({m})")
        object.__setattr__(self, "blocks", clean)

    @property
    def state_dim(self) -> int:
        return next(iter(self.blocks.values())).shape[0]

    @property
    def max_harmonic(self) -> int:
        """Largest |m| carrying a nonzero block (0 for a static Hamiltonian)."""
        nonzero = [abs(m) for m, b in self.blocks.items() if np.any(b)]
        return max(nonzero, default=0)


@dataclass(frozen=True)
class FloquetMatrix:
    """Truncated Hermitian Floquet matrix with (state, Fourier index) bookkeeping."""

    n_max: int
    state_dim: int
    drive_freq: float
    data: np.ndarray

    @property
    def dim(self) -> int:
        return self.state_dim * (2 * self.n_max + 1)

    def row_index(self, state: int, n: int) -> int:
        """Row of basis vector |state, n>; blocks are ordered n = +n_max down to -n_max."""
        if not 0 <= state < self.state_dim:
            raise IndexError(f"state index {state} out of range")
        if abs(n) > self.n_max:
            raise IndexError(f"Fourier index {n} outside truncation +-{self.n_max}")
        return self.state_dim * (self.n_max - n) + state

    def state_rows(self, state: int) -> np.ndarray:
        """All rows carrying ``state`` across every retained Fourier index."""
        return np.arange(0, self.dim, self.state_dim) + state


def build_floquet(fourier: FourierHamiltonian, n_max: int) -> FloquetMatrix:
    """Assemble the truncated Floquet matrix for Fourier indices n in [-n_max, n_max].

    Raises
    ------
    TruncationTooSmallError
        If n_max is smaller than the largest stored nonzero harmonic.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be a positive integer, got {n_max}")
    if n_max < fourier.max_harmonic:
        raise TruncationTooSmallError(
            f"n_max={n_max} cannot hold harmonics up to |m|={fourier.max_harmonic}"
        )
    sd = fourier.state_dim
    blocks = 2 * n_max + 1
    dim = sd * blocks
    data = np.zeros((dim, dim), dtype=complex)
    for m, block in fourier.blocks.items():
        # Block row bi holds Fourier index n = n_max - bi; (n, n') = H^(n - n')
        # puts H^(m) at column block bj = bi + m.
        for bi in range(max(0, -m), min(blocks, blocks - m)):
            bj = bi + m
            data[sd * bi:sd * (bi + 1), sd * bj:sd * (bj + 1)] = block
    ns = np.repeat(np.arange(n_max, -n_max - 1, -1), sd)
    data[np.arange(dim), np.arange(dim)] += ns * fourier.drive_freq
    data.setflags(write=False)
    return FloquetMatrix(n_max=n_max, state_dim=sd, drive_freq=fourier.drive_freq, data=data)


@dataclass(frozen=True)
class QuasiEnergySolution:
    """Full spectral decomposition of a truncated Floquet matrix.

    ``energies`` are ascending quasi-energies in MHz; column k of ``states``
    is the corresponding eigenvector. Exact eigenvalue ties are broken by
    lexicographic comparison of eigenvector absolute components, and each
    eigenvector's largest-magnitude component is rotated to the positive real
    axis, so repeated runs are bit-stable.
    """

    energies: np.ndarray
    states: np.ndarray
    n_max: int
    state_dim: int
    drive_freq: float

    def row_index(self, state: int, n: int) -> int:
        return self.state_dim * (self.n_max - n) + state

    def state_rows(self, state: int) -> np.ndarray:
        return np.arange(0, self.energies.size, self.state_dim) + state


def _canonical_order(energies: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic ordering and phase convention for an eigendecomposition."""
    order = np.argsort(energies, kind="stable")
    energies = energies[order]
    vectors = vectors[:, order]
    # Break exact degeneracies lexicographically on |components|.
    i = 0
    n = energies.size
    while i < n:
        j = i + 1
        while j < n and energies[j] == energies[i]:
            j += 1
        if j - i > 1:
            keys = [tuple(np.abs(vectors[:, k])) for k in range(i, j)]
            sub = sorted(range(i, j), key=lambda k: keys[k - i])
            vectors[:, i:j] = vectors[:, sub]
        i = j
    # Fix the global phase: largest-magnitude component real and positive.
    anchor = np.argmax(np.abs(vectors), axis=0)
    picked = vectors[anchor, np.arange(n)]
    phases = np.where(np.abs(picked) > 0, picked / np.where(np.abs(picked) > 0, np.abs(picked), 1.0), 1.0)
    vectors = vectors / phases[np.newaxis, :]
    return energies, vectors


def quasi_energies(fm: FloquetMatrix, check_residual: bool = False) -> QuasiEnergySolution:
    """Diagonalize a Floquet matrix into an ascending, deterministically ordered spectrum.

    Raises
    ------
    NumericalFailureError
        If the dense Hermitian eigensolver fails to converge, or (with
        ``check_residual``) the decomposition residual exceeds 1e-9 * ||H_F||.
    """
    try:
        energies, vectors = np.linalg.eigh(fm.data)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver failed on dim={fm.dim} Floquet matrix") from exc
    energies, vectors = _canonical_order(energies, vectors)
    if check_residual:
        scale = np.linalg.norm(fm.data)
        residual = np.linalg.norm(fm.data @ vectors - vectors * energies[np.newaxis, :])
        if residual > 1e-9 * scale:
            raise NumericalFailureError(
                f"eigendecomposition residual {residual:.3e} exceeds 1e-9*|H_F|={1e-9 * scale:.3e}"
            )
    return QuasiEnergySolution(
        energies=energies,
        states=vectors,
        n_max=fm.n_max,
        state_dim=fm.state_dim,
        drive_freq=fm.drive_freq,
    )


def transition_probability(sol: QuasiEnergySolution, alpha: int, beta: int) -> float:
    """Time-averaged probability of finding ``beta`` after preparing ``alpha``.

    The initial state occupies the central Fourier block, |alpha, n=0>, and

        P = sum_k sum_n |<beta, n|q_k>|^2 |<q_k|alpha, 0>|^2

    runs over every truncated eigenpair q_k and every retained Fourier index.
    The average includes the uniform drive-phase average implicit in the
    continuous-wave measurement.
    """
    weights = np.abs(sol.states) ** 2
    init = weights[sol.row_index(alpha, 0), :]
    target = weights[sol.state_rows(beta), :].sum(axis=0)
    return float(min(max(init @ target, 0.0), 1.0))


def leave_probability(sol: QuasiEnergySolution) -> float:
    """Total probability of leaving state index 1 (the |0> level) into states 0 and 2."""
    from .spin import STATE_0, STATE_B, STATE_D

    return min(
        transition_probability(sol, STATE_0, STATE_B)
        + transition_probability(sol, STATE_0, STATE_D),
        1.0,
    )


def central_band(sol: QuasiEnergySolution) -> np.ndarray:
    """Quasi-energies folded into the central band (-w/2, w/2], sorted ascending."""
    w = sol.drive_freq
    sel = sol.energies[(sol.energies > -w / 2) & (sol.energies <= w / 2)]
    return np.sort(sel)


@dataclass(frozen=True)
class ConvergenceScan:
    """Result of a truncation scan: probabilities per n_max and the recommended value."""

    entries: list = field(default_factory=list)  # (n_max, probability) pairs
    recommended_n_max: int = 0
    tol: float = 1e-5


def convergence_scan(
    fourier: FourierHamiltonian,
    alpha: int,
    beta: int,
    n_list: list[int],
    tol: float = 1e-5,
) -> ConvergenceScan:
    """Scan transition probabilities over ascending truncations.

    The recommended n_max is the smallest entry whose probability differs from
    the next entry's by less than ``tol``.

    Raises
    ------
    NoConvergenceError
        If the last two scanned truncations still differ by more than ``tol``.
    """
    if list(n_list) != sorted(n_list) or len(n_list) < 2:
        raise ValueError("n_list must be an ascending list with at least two entries")
    entries = []
    for n in n_list:
        sol = quasi_energies(build_floquet(fourier, n))
        entries.append((n, transition_probability(sol, alpha, beta)))
    diffs = [abs(entries[i + 1][1] - entries[i][1]) for i in range(len(entries) - 1)]
    if diffs[-1] >= tol:
        raise NoConvergenceError(
            f"probability still moving by {diffs[-1]:.3e} (tol {tol:.1e}) between "
            f"n_max={entries[-2][0]} and n_max={entries[-1][0]}"
        )
    recommended = next(n for (n, _), d in zip(entries, diffs) if d < tol)
    return ConvergenceScan(entries=entries, recommended_n_max=recommended, tol=tol)

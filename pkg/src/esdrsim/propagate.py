"""Independent time-domain oracle: direct integration of the rotating-frame model.

A fixed-step commutator-free fourth-order Magnus scheme (two exact matrix
exponentials per step, each unitary to machine precision) integrates the
3-level Schrodinger equation, so norm is conserved up to roundoff. The
long-time window average is additionally averaged over the RF drive phase,
matching the continuous-wave premise of the Floquet transition probability.

This module assembles its Hamiltonian directly from the rotating-frame matrix
entries, deliberately independent of the Fourier-block construction used by
the Floquet path it cross-checks.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateBasisError, StepTooLargeError
from .spin import SystemParams

_SQRT3 = math.sqrt(3.0)
_GAUSS_NODES = (0.5 - _SQRT3 / 6.0, 0.5 + _SQRT3 / 6.0)
_CF4_WEIGHTS = (0.25 - _SQRT3 / 6.0, 0.25 + _SQRT3 / 6.0)

_LABEL_TO_INDEX = {"B": 0, "0": 1, "D": 2}


@dataclass(frozen=True)
class PropagationPlan:
    """Time grid and averaging window for one oracle run.

    ``step`` must resolve the RF period with at least 50 samples and
    ``total_time`` must span at least 200 RF periods; the actual step is
    shrunk so an integer number of steps tiles one period. The window average
    runs over an integer number of drive periods covering the final
    ``window_fraction`` of the trajectory and over ``n_phases`` equally spaced
    RF drive phases.
    """

    params: SystemParams
    total_time: float  # us
    step: float  # us
    initial: str = "0"
    window_fraction: float = 0.8
    n_phases: int = 16

    def __post_init__(self):
        period = 1.0 / self.params.omega_rf
        if self.step <= 0 or self.step > period / 50.0 + 1e-15:
            raise ValueError(
                f"step {self.step} us must give >= 50 samples per RF period ({period / 50.0:.3e})"
            )
        if self.total_time < 200.0 * period:
            raise ValueError(
                f"total_time {self.total_time} us is below 200 RF periods ({200.0 * period:.3e})"
            )
        if self.initial not in _LABEL_TO_INDEX:
            raise ValueError(f"initial state must be one of {tuple(_LABEL_TO_INDEX)}")
        if not 0.0 < self.window_fraction <= 1.0:
            raise ValueError("window_fraction must lie in (0, 1]")
        if self.n_phases < 1:
            raise ValueError("n_phases must be >= 1")


@dataclass(frozen=True)
class PropagationResult:
    """Phase-zero population time series plus phase-averaged window averages."""

    times_us: np.ndarray
    populations: np.ndarray  # shape (n_samples, 3), ordered (B, 0, D)
    window_averages: dict
    norm_drift: float
    metadata: dict = field(default_factory=dict)


def _rotating_frame_terms(params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Static and cosine-drive parts of the rotating-frame Hamiltonian (MHz, basis B', 0, D')."""
    if params.m_x == 0 and params.omega_l == 0:
        raise DegenerateBasisError("rotating-frame model undefined for m_x = omega_l = 0")
    v = params.v
    delta = params.delta_mw
    static = np.array(
        [
            [delta + v, params.lambda_b, 0.0],
            [params.lambda_b, 0.0, 1j * params.lambda_d],
            [0.0, -1j * params.lambda_d, delta - v],
        ],
        dtype=complex,
    )
    drive = (2.0 * params.omega_cap_rf / v) * np.array(
        [
            [params.omega_l, 0.0, params.m_x],
            [0.0, 0.0, 0.0],
            [params.m_x, 0.0, -params.omega_l],
        ],
        dtype=complex,
    )
    return static, drive


def _batched_expm_unitary(mats: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i*dt*M) for a stack of Hermitian matrices M, via batched eigh (exactly unitary)."""
    w, vecs = np.linalg.eigh(mats)
    phases = np.exp(-1j * dt * w)
    return np.einsum("kab,kb,kcb->kac", vecs, phases, vecs.conj())


def propagate(plan: PropagationPlan) -> PropagationResult:
    """Integrate the rotating-frame Schrodinger equation and window-average populations.

    Returns the phase-zero population time series and the drive-phase-averaged
    window means of P(initial -> B/0/D). The commutator-free Magnus steps are
    unitary by construction; norm drift beyond roundoff indicates a defect.

    Raises
    ------
    StepTooLargeError
        If the accumulated norm drift exceeds 1e-6.
    """
    params = plan.params
    period = 1.0 / params.omega_rf
    steps_per_period = int(math.ceil(period / plan.step - 1e-12))
    # Round up so the phase offsets land exactly on step boundaries.
    steps_per_period = plan.n_phases * int(math.ceil(steps_per_period / plan.n_phases))
    h = period / steps_per_period
    n_periods = max(1, int(round(plan.total_time / period)))
    total_steps = steps_per_period * n_periods

    static, drive = _rotating_frame_terms(params)
    two_pi = 2.0 * math.pi
    t0 = h * np.arange(steps_per_period)
    c1, c2 = _GAUSS_NODES
    x1, x2 = _CF4_WEIGHTS
    cos1 = np.cos(two_pi * params.omega_rf * (t0 + c1 * h))
    cos2 = np.cos(two_pi * params.omega_rf * (t0 + c2 * h))
    h_node1 = static[np.newaxis] + cos1[:, None, None] * drive[np.newaxis]
    h_node2 = static[np.newaxis] + cos2[:, None, None] * drive[np.newaxis]
    # One CF4 step: exp(-i*h*(x1*H1 + x2*H2)) applied after exp(-i*h*(x2*H1 + x1*H2)).
    right = _batched_expm_unitary(two_pi * (x2 * h_node1 + x1 * h_node2), h)
    left = _batched_expm_unitary(two_pi * (x1 * h_node1 + x2 * h_node2), h)
    steps = np.einsum("kab,kbc->kac", left, right)

    offsets = (steps_per_period // plan.n_phases) * np.arange(plan.n_phases)
    psi = np.zeros((plan.n_phases, 3), dtype=complex)
    psi[:, _LABEL_TO_INDEX[plan.initial]] = 1.0
    populations = np.empty((total_steps + 1, plan.n_phases, 3))
    populations[0] = np.abs(psi) ** 2
    for k in range(total_steps):
        idx = (k + offsets) % steps_per_period
        psi = np.einsum("pab,pb->pa", steps[idx], psi)
        populations[k + 1] = np.abs(psi) ** 2

    norms = populations.sum(axis=2)
    norm_drift = float(np.abs(norms - 1.0).max())
    if norm_drift > 1e-6:
        raise StepTooLargeError(f"norm drift {norm_drift:.3e} exceeds 1e-6")

    window_periods = max(1, int(math.floor(plan.window_fraction * n_periods)))
    start = steps_per_period * (n_periods - window_periods)
    window = populations[start:total_steps]  # integer periods, right-open
    averages = window.mean(axis=(0, 1))

    times = h * np.arange(total_steps + 1)
    metadata = {
        "scheme": "commutator-free 4th-order Magnus (two unitary exponentials per step)",
        "step_us": h,
        "steps_per_period": steps_per_period,
        "periods": n_periods,
        "window_periods": window_periods,
        "n_phases": plan.n_phases,
    }
    return PropagationResult(
        times_us=times,
        populations=populations[:, 0, :],
        window_averages={"B": float(averages[0]), "0": float(averages[1]), "D": float(averages[2])},
        norm_drift=norm_drift,
        metadata=metadata,
    )


def oracle_leave_probability(plan: PropagationPlan) -> float:
    """Window-averaged probability of leaving |0>, for cross-checks against Floquet values."""
    if plan.initial != "0":
        raise ValueError("leave probability is defined for the initial state '0'")
    result = propagate(plan)
    return result.window_averages["B"] + result.window_averages["D"]


def write_trajectory_csv(result: PropagationResult, path) -> None:
    """Dump the phase-zero trajectory as ``t_us,p0,pb,pd`` rows."""
    import os

    lines = ["t_us,p0,pb,pd\n"]
    for t, (pb, p0, pd) in zip(result.times_us, result.populations):
        lines.append(f"{t:.9g},{p0:.9g},{pb:.9g},{pd:.9g}\n")
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)

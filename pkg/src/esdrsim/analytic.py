"""Closed-form resonance predictors for single- and multi-RF-photon transitions.

Three prediction stacks of increasing reach:

* ``single_photon_resonances`` — the weak-drive rotating-wave result for the
  four first-order dips.
* ``multiphoton_resonances_rwa`` — effective couplings from a Jacobi-Anger
  frame transformation, then a rotating-wave reduction for an arbitrary
  dressed pair (m, n).
* ``multiphoton_resonances_vv`` — the same effective model with second-order
  level shifts from the oscillating harmonics (beyond the rotating wave
  approximation).
"""

import math
from dataclasses import dataclass

from scipy.special import jv

from .exceptions import ParallelFieldRequiredError
from .spin import SystemParams

VV_TAIL_TOL_MHZ = 1e-9
_VV_KMAX_CAP = 400


def bessel_j(k: int, x: float) -> float:
    """Bessel function of the first kind J_k(x) for integer order k."""
    return float(jv(k, x))


@dataclass(frozen=True)
class PhotonIndices:
    """Fourier indices (m, n) of a dressed pair |B', m>, |D', n>; m - n is the photon number."""

    m: int
    n: int

    def __post_init__(self):
        if self.m == self.n:
            raise ValueError("a resonance prediction needs m != n")

    @property
    def photon_number(self) -> int:
        return self.m - self.n


@dataclass(frozen=True)
class ResonancePrediction:
    """A +- branch pair of resonant MW frequencies with the predicted anticrossing gap."""

    lower_mhz: float
    upper_mhz: float
    method: str
    gap_mhz: float

    def __post_init__(self):
        if self.upper_mhz < self.lower_mhz:
            raise ValueError("upper branch below lower branch")
        if self.gap_mhz < 0:
            raise ValueError("gap must be >= 0")

    @property
    def frequencies(self) -> tuple[float, float]:
        return (self.lower_mhz, self.upper_mhz)


def single_photon_resonances(params: SystemParams) -> tuple[ResonancePrediction, ResonancePrediction]:
    """Weak-drive resonant MW frequencies, both signs of the half-RF-frequency offset.

    Returns the (minus, plus) branch pairs of

        omega_MW = d_gs +- omega_rf/2 +- sqrt((V - omega_rf/2)**2 + omega_cap_rf**2),

    four frequencies in total; V reduces to m_x without a parallel field. The
    splitting within each pair is the Autler-Townes gap 2*omega_cap_rf at the
    single-photon resonance condition omega_rf = 2V.
    """
    half = params.omega_rf / 2.0
    root = math.hypot(params.v - half, params.omega_cap_rf)
    gap = 2.0 * params.omega_cap_rf
    minus = ResonancePrediction(
        lower_mhz=params.d_gs - half - root,
        upper_mhz=params.d_gs - half + root,
        method="single_rwa",
        gap_mhz=gap,
    )
    plus = ResonancePrediction(
        lower_mhz=params.d_gs + half - root,
        upper_mhz=params.d_gs + half + root,
        method="single_rwa",
        gap_mhz=gap,
    )
    return minus, plus


def single_photon_frequencies(params: SystemParams) -> list[float]:
    """The four weak-drive dip frequencies, sorted ascending."""
    minus, plus = single_photon_resonances(params)
    return sorted([*minus.frequencies, *plus.frequencies])


def _require_parallel_field(params: SystemParams) -> None:
    if params.omega_l == 0:
        raise ParallelFieldRequiredError(
            "effective multi-photon couplings require omega_l != 0"
        )


def effective_couplings(params: SystemParams, k: int) -> tuple[float, float, float]:
    """k-th harmonic effective couplings (lambda_b_k, lambda_d_k, omega_k).

    The Jacobi-Anger frame converts the diagonal RF drive into Bessel-dressed
    harmonics:

        lambda_b_k = lambda_b * J_k(2*omega_l*Omega / (omega_rf*V))
        lambda_d_k = lambda_d * J_k(2*omega_l*Omega / (omega_rf*V))
        omega_k    = (k*omega_rf*m_x / (2*omega_l)) * J_k(4*omega_l*Omega / (omega_rf*V))

    with Omega = omega_cap_rf and V = sqrt(m_x**2 + omega_l**2).
    """
    _require_parallel_field(params)
    chi = 2.0 * params.omega_l * params.omega_cap_rf / (params.omega_rf * params.v)
    lam_b_k = params.lambda_b * bessel_j(k, chi)
    lam_d_k = params.lambda_d * bessel_j(k, chi)
    omega_k = (
        k
        * params.omega_rf
        * params.m_x
        / (2.0 * params.omega_l)
        * bessel_j(k, 2.0 * chi)
    )
    return lam_b_k, lam_d_k, omega_k


def multiphoton_resonances_rwa(params: SystemParams, idx: PhotonIndices) -> ResonancePrediction:
    """Rotating-wave resonant MW frequencies for the dressed pair (m, n).

        omega_MW = d_gs + (m+n)/2*omega_rf
                   +- sqrt((V + (m-n)/2*omega_rf)**2 + omega_{m-n}**2)

    The predicted anticrossing gap at the resonance condition
    2V = (n - m)*omega_rf is 2*|omega_{m-n}|.
    """
    _require_parallel_field(params)
    coupling = effective_couplings(params, idx.photon_number)[2]
    center = params.d_gs + 0.5 * (idx.m + idx.n) * params.omega_rf
    root = math.hypot(params.v + 0.5 * (idx.m - idx.n) * params.omega_rf, coupling)
    return ResonancePrediction(
        lower_mhz=center - root,
        upper_mhz=center + root,
        method="multi_rwa",
        gap_mhz=2.0 * abs(coupling),
    )


def vv_corrections(
    params: SystemParams, idx: PhotonIndices, k_max: int | None = None
) -> tuple[float, float, float]:
    """Second-order level shifts (delta_b, delta_0, delta_d) for the dressed pair (m, n).

    Each shift is the finite sum over k in [-k_max, k_max] excluding 0 of the
    squared off-resonant harmonics divided by 2*k*omega_rf:

        delta_b = sum_k [omega_{k-m+n}^2 - omega_{k+m-n}^2
                         + lambda_b_{k-m}^2 - lambda_b_{k+m}^2] / (2k*omega_rf)
        delta_0 = sum_k [lambda_b_{k+m}^2 - lambda_b_{k-m}^2
                         - lambda_d_{k+n}^2 + lambda_d_{k-n}^2] / (2k*omega_rf)
        delta_d = sum_k [omega_{k+m-n}^2 - omega_{k-m+n}^2
                         + lambda_d_{k-n}^2 - lambda_d_{k+n}^2] / (2k*omega_rf)

    With ``k_max=None`` the range grows adaptively until the last increment
    falls below 1e-9 MHz (the Bessel factors decay super-exponentially in k).
    """
    _require_parallel_field(params)
    m, n = idx.m, idx.n

    def omega_sq(j: int) -> float:
        return effective_couplings(params, j)[2] ** 2

    def lam_b_sq(j: int) -> float:
        return effective_couplings(params, j)[0] ** 2

    def lam_d_sq(j: int) -> float:
        return effective_couplings(params, j)[1] ** 2

    def increment(k: int) -> tuple[float, float, float]:
        out = (0.0, 0.0, 0.0)
        for kk in (k, -k):
            denom = 2.0 * kk * params.omega_rf
            db = (
                omega_sq(kk - m + n)
                - omega_sq(kk + m - n)
                + lam_b_sq(kk - m)
                - lam_b_sq(kk + m)
            ) / denom
            d0 = (
                lam_b_sq(kk + m)
                - lam_b_sq(kk - m)
                - lam_d_sq(kk + n)
                + lam_d_sq(kk - n)
            ) / denom
            dd = (
                omega_sq(kk + m - n)
                - omega_sq(kk - m + n)
                + lam_d_sq(kk - n)
                - lam_d_sq(kk + n)
            ) / denom
            out = (out[0] + db, out[1] + d0, out[2] + dd)
        return out

    delta_b = delta_0 = delta_d = 0.0
    if k_max is not None:
        if k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {k_max}")
        ks = range(1, k_max + 1)
        for k in ks:
            db, d0, dd = increment(k)
            delta_b += db
            delta_0 += d0
            delta_d += dd
        return delta_b, delta_0, delta_d
    k = 0
    while True:
        k += 1
        db, d0, dd = increment(k)
        delta_b += db
        delta_0 += d0
        delta_d += dd
        if max(abs(db), abs(d0), abs(dd)) < VV_TAIL_TOL_MHZ and k > abs(idx.photon_number) + 2:
            return delta_b, delta_0, delta_d
        if k >= _VV_KMAX_CAP:
            return delta_b, delta_0, delta_d


def multiphoton_resonances_vv(
    params: SystemParams, idx: PhotonIndices, k_max: int | None = None
) -> ResonancePrediction:
    """Resonant MW frequencies for the pair (m, n) with second-order corrections.

        omega_MW = d_gs - delta_0 + (m+n)/2*omega_rf
                   +- sqrt((V + (delta_b - delta_d)/2 + (m-n)/2*omega_rf)**2
                           + omega_{m-n}**2)

    Corrections vanish quadratically in the drive amplitudes, so this reduces
    to the rotating-wave prediction as omega_cap_rf -> 0.
    """
    delta_b, delta_0, delta_d = vv_corrections(params, idx, k_max)
    coupling = effective_couplings(params, idx.photon_number)[2]
    center = params.d_gs - delta_0 + 0.5 * (idx.m + idx.n) * params.omega_rf
    root = math.hypot(
        params.v + 0.5 * (delta_b - delta_d) + 0.5 * (idx.m - idx.n) * params.omega_rf,
        coupling,
    )
    return ResonancePrediction(
        lower_mhz=center - root,
        upper_mhz=center + root,
        method="van_vleck",
        gap_mhz=2.0 * abs(coupling),
    )

"""Spin-1 operator algebra, static NV ground-state Hamiltonian, and working bases.

All frequencies in this package are ordinary frequencies in MHz (values of
omega/2pi); factors of 2pi are applied only where an explicit time-domain
propagation needs rad/us.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateBasisError

# Electron gyromagnetic ratio, gamma_e/(2pi) = 28.024 GHz/T, expressed per uT.
GAMMA_E_MHZ_PER_UT = 0.028024

# Indices of the working basis ordering (B', 0, D').
STATE_B = 0
STATE_0 = 1
STATE_D = 2

STATE_LABELS = ("B", "0", "D")


def rf_rabi_from_field(b_rf_ut: float) -> float:
    """Convert an RF field amplitude in uT to a Rabi amplitude in MHz."""
    return GAMMA_E_MHZ_PER_UT * b_rf_ut


@dataclass(frozen=True)
class SystemParams:
    """Physical constants and drive parameters of the driven spin-1 system.

    Parameters
    ----------
    d_gs : float
        Zero-field splitting in MHz.
    m_x : float
        Effective strain under the perpendicular bias field, MHz.
    omega_l : float
        Parallel-bias Larmor term, MHz. 0 means no parallel field.
    lambda_b, lambda_d : float
        MW amplitudes for the 0<->B and 0<->D transitions, MHz. With a
        parallel field these are interpreted directly as the effective
        couplings in the tilted (primed) basis.
    omega_rf : float
        RF drive frequency, MHz.
    omega_cap_rf : float
        RF drive (Rabi) amplitude, MHz.
    omega_mw : float
        MW drive frequency, MHz.
    """

    d_gs: float
    m_x: float
    omega_l: float
    lambda_b: float
    lambda_d: float
    omega_rf: float
    omega_cap_rf: float
    omega_mw: float

    def __post_init__(self):
        if self.d_gs <= 0:
            raise ValueError(f"d_gs must be > 0, got {self.d_gs}")
        if self.m_x < 0:
            raise ValueError(f"m_x must be >= 0, got {self.m_x}")
        if self.omega_rf <= 0:
            raise ValueError(f"omega_rf must be > 0, got {self.omega_rf}")
        if self.omega_cap_rf < 0:
            raise ValueError(f"omega_cap_rf must be >= 0, got {self.omega_cap_rf}")
        if self.lambda_b < 0 or self.lambda_d < 0:
            raise ValueError("lambda_b and lambda_d must be >= 0")

    @property
    def v(self) -> float:
        """Half the B'-D' splitting, sqrt(m_x**2 + omega_l**2). Recomputed, never stored."""
        return float(np.hypot(self.m_x, self.omega_l))

    @property
    def delta_mw(self) -> float:
        """MW detuning d_gs - omega_mw in MHz."""
        return self.d_gs - self.omega_mw


def spin1_operators() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the dimensionless spin-1 matrices (Sx, Sy, Sz) in the m_s = (+1, 0, -1) ordering."""
    s = 1.0 / np.sqrt(2.0)
    sx = np.array([[0, s, 0], [s, 0, s], [0, s, 0]], dtype=complex)
    sy = np.array([[0, -1j * s, 0], [1j * s, 0, -1j * s], [0, 1j * s, 0]], dtype=complex)
    sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
    return sx, sy, sz


def static_hamiltonian(params: SystemParams) -> np.ndarray:
    """Static Hamiltonian d_gs*Sz^2 + m_x*(Sx^2 - Sy^2) + omega_l*Sz in the m_s basis (MHz)."""
    sx, sy, sz = spin1_operators()
    return params.d_gs * (sz @ sz) + params.m_x * (sx @ sx - sy @ sy) + params.omega_l * sz


@dataclass(frozen=True)
class SpinBasis:
    """An ordered orthonormal three-state basis expressed in the m_s = (+1, 0, -1) basis.

    ``vectors[i]`` is the i-th basis state; ordering follows (B', 0, D').
    """

    labels: tuple[str, str, str]
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        gram = v.conj() @ v.T
        if not np.allclose(gram, np.eye(3), atol=1e-12):
            raise ValueError("basis vectors are not orthonormal to 1e-12")
        object.__setattr__(self, "vectors", v)


def static_eigenbasis(params: SystemParams) -> tuple[SpinBasis, np.ndarray]:
    """Eigenbasis (B', 0, D') of the static Hamiltonian with eigenvalues (d_gs+V, 0, d_gs-V).

    The tilted bright/dark states are

        B' = [(m_x + V) B + omega_l D] / norm
        D' = [-omega_l B + (m_x + V) D] / norm

    with B = (|+1> + |-1>)/sqrt(2), D = (|+1> - |-1>)/sqrt(2) and
    V = sqrt(m_x**2 + omega_l**2). For omega_l = 0 this reduces exactly to
    (B, 0, D).

    Raises
    ------
    DegenerateBasisError
        If m_x = omega_l = 0, where the B/D direction is undefined.
    """
    if params.m_x == 0 and params.omega_l == 0:
        raise DegenerateBasisError(
            "bright/dark basis undefined for m_x = omega_l = 0 (degenerate manifold)"
        )
    v = params.v
    b = np.array([1.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)
    d = np.array([1.0, 0.0, -1.0], dtype=complex) / np.sqrt(2.0)
    zero = np.array([0.0, 1.0, 0.0], dtype=complex)
    norm = np.hypot(params.m_x + v, params.omega_l)
    b_p = ((params.m_x + v) * b + params.omega_l * d) / norm
    d_p = (-params.omega_l * b + (params.m_x + v) * d) / norm
    basis = SpinBasis(labels=STATE_LABELS, vectors=np.array([b_p, zero, d_p]))
    energies = np.array([params.d_gs + v, 0.0, params.d_gs - v])
    return basis, energies

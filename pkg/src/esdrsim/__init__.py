"""Floquet simulator and analysis toolkit for driven spin-1 double resonance spectra."""

__version__ = "0.1.0"

from .analytic import (
    PhotonIndices,
    ResonancePrediction,
    bessel_j,
    effective_couplings,
    multiphoton_resonances_rwa,
    multiphoton_resonances_vv,
    single_photon_frequencies,
    single_photon_resonances,
    vv_corrections,
)
from .exceptions import (
    BranchNotFoundError,
    ConfigError,
    DegenerateBasisError,
    EmptySpectrumError,
    EsdrError,
    NoConvergenceError,
    NumericalFailureError,
    ParallelFieldRequiredError,
    StepTooLargeError,
    TruncationTooSmallError,
)
from .floquet import (
    ConvergenceScan,
    FloquetMatrix,
    FourierHamiltonian,
    QuasiEnergySolution,
    build_floquet,
    central_band,
    convergence_scan,
    leave_probability,
    quasi_energies,
    transition_probability,
)
from .peaks import (
    BranchWindow,
    GapTrace,
    ResonanceSet,
    anticrossing_gap,
    find_resonances,
    nearest_resonance,
    write_gaps_csv,
    write_resonances_csv,
)
from .propagate import (
    PropagationPlan,
    PropagationResult,
    oracle_leave_probability,
    propagate,
    write_trajectory_csv,
)
from .spectra import (
    Spectrum,
    SweepPlan,
    esdr_fourier_blocks,
    perpendicular_field_blocks,
    read_spectrum_csv,
    run_sweep,
    write_spectrum_csv,
)
from .spin import (
    GAMMA_E_MHZ_PER_UT,
    STATE_0,
    STATE_B,
    STATE_D,
    SpinBasis,
    SystemParams,
    rf_rabi_from_field,
    spin1_operators,
    static_eigenbasis,
    static_hamiltonian,
)

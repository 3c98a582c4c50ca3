"""Exception types raised by the esdrsim package."""


class EsdrError(Exception):
    """Base class for all esdrsim errors."""


class DegenerateBasisError(EsdrError):
    """The bright/dark eigenbasis is undefined (zero strain and zero parallel field)."""


class TruncationTooSmallError(EsdrError):
    """Requested Fourier truncation cannot hold all nonzero harmonic blocks."""


class NumericalFailureError(EsdrError):
    """A dense eigensolve or related numerical routine did not converge."""


class NoConvergenceError(EsdrError):
    """A truncation scan did not stabilize within the requested tolerance."""


class ParallelFieldRequiredError(EsdrError):
    """Operation needs a nonzero parallel bias field (omega_l != 0)."""


class StepTooLargeError(EsdrError):
    """Time propagation lost norm beyond the accepted drift budget."""


class EmptySpectrumError(EsdrError):
    """Peak extraction was handed a spectrum with no grid points."""


class BranchNotFoundError(EsdrError):
    """No resonance branch was found inside the requested crossing window."""


class ConfigError(EsdrError):
    """Run configuration file is missing, malformed, or inconsistent."""

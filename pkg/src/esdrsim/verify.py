"""Oracle-versus-Floquet cross-checks on a fixed panel of drive conditions."""

from dataclasses import dataclass, replace

from .analytic import single_photon_resonances
from .floquet import build_floquet, leave_probability, quasi_energies
from .propagate import PropagationPlan, oracle_leave_probability
from .spectra import esdr_fourier_blocks
from .spin import SystemParams

#: Base system of the standard panel: the fitted device constants.
PANEL_BASE = SystemParams(
    d_gs=2882.5,
    m_x=4.40,
    omega_l=0.50,
    lambda_b=0.12,
    lambda_d=0.12,
    omega_rf=8.856,
    omega_cap_rf=1.96,
    omega_mw=2882.5,
)

#: RF amplitudes spanning weak, paper-weak, and paper-strong regimes (MHz).
PANEL_AMPLITUDES = (0.5, 1.96, 3.83)


def standard_panel() -> list[tuple[str, SystemParams]]:
    """The 12-point verification panel: 3 amplitudes x RF on/off resonance x MW on/off dip."""
    panel = []
    for amp in PANEL_AMPLITUDES:
        for rf_on in (True, False):
            omega_rf = 2.0 * PANEL_BASE.v if rf_on else 5.5
            base = replace(PANEL_BASE, omega_cap_rf=amp, omega_rf=omega_rf)
            on_dip = single_photon_resonances(base)[1].lower_mhz
            for mw_on in (True, False):
                omega_mw = on_dip if mw_on else PANEL_BASE.d_gs + 1.7
                label = (
                    f"amp={amp:g} rf={'on' if rf_on else 'off'} mw={'on' if mw_on else 'off'}"
                )
                panel.append((label, replace(base, omega_mw=omega_mw)))
    return panel


@dataclass(frozen=True)
class VerifyRow:
    """One panel comparison: Floquet versus time-domain leave probabilities."""

    label: str
    p_floquet: float
    p_oracle: float

    @property
    def abs_diff(self) -> float:
        return abs(self.p_floquet - self.p_oracle)

    def passed(self, tolerance: float) -> bool:
        return self.abs_diff < tolerance


def floquet_leave_probability(params: SystemParams, n_max: int) -> float:
    """Leave probability of a single grid point through the Floquet path."""
    sol = quasi_energies(build_floquet(esdr_fourier_blocks(params), n_max))
    return leave_probability(sol)


def run_panel(
    panel: list[tuple[str, SystemParams]] | None = None,
    n_max: int = 67,
    total_periods: int = 500,
    samples_per_period: int = 64,
    window_fraction: float = 0.8,
    n_phases: int = 16,
) -> list[VerifyRow]:
    """Compare Floquet and oracle leave probabilities over a panel of conditions."""
    rows = []
    for label, params in panel if panel is not None else standard_panel():
        period = 1.0 / params.omega_rf
        plan = PropagationPlan(
            params=params,
            total_time=total_periods * period,
            step=period / samples_per_period,
            initial="0",
            window_fraction=window_fraction,
            n_phases=n_phases,
        )
        rows.append(
            VerifyRow(
                label=label,
                p_floquet=floquet_leave_probability(params, n_max),
                p_oracle=oracle_leave_probability(plan),
            )
        )
    return rows

"""Command-line front end: sweep orchestration, extraction, cross-checks, convergence scans.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (including a
failed verification). Errors are reported as a single machine-parsable line on
stderr: ``error: <category>: <message>``.
"""

import argparse
import os
import sys
from dataclasses import replace

from .analytic import (
    PhotonIndices,
    multiphoton_resonances_rwa,
    multiphoton_resonances_vv,
    single_photon_frequencies,
)
from .config import RunConfig, load_config
from .exceptions import (
    ConfigError,
    EsdrError,
    NoConvergenceError,
    NumericalFailureError,
    StepTooLargeError,
)
from .floquet import convergence_scan
from .peaks import anticrossing_gap, find_resonances, write_gaps_csv, write_resonances_csv
from .spectra import esdr_fourier_blocks, read_spectrum_csv, run_sweep, write_spectrum_csv
from .spin import STATE_B, STATE_D, STATE_0


def _fail(category: str, message: str, code: int) -> int:
    print(f"error: {category}: {message}".replace("\n", " "), file=sys.stderr)
    return code


def _out_dir(args, cfg: RunConfig) -> str:
    out = args.out or cfg.output_dir or "."
    os.makedirs(out, exist_ok=True)
    return out


def _overlay_rows(cfg: RunConfig, plan) -> list[str]:
    rows = ["method,sweep_mhz,mw_mhz\n"]
    for spec in cfg.overlays:
        for s in plan.sweep_values():
            point = plan.params_at(float(s))
            if spec.method == "single_rwa":
                freqs = single_photon_frequencies(point)
                tag = "single_rwa"
            else:
                idx = PhotonIndices(m=spec.m, n=spec.n)
                if spec.method == "multi_rwa":
                    pred = multiphoton_resonances_rwa(point, idx)
                else:
                    pred = multiphoton_resonances_vv(point, idx, cfg.analytic_k_max)
                freqs = pred.frequencies
                tag = f"{spec.method}:{spec.m}:{spec.n}"
            for f in freqs:
                rows.append(f"{tag},{s:.9g},{f:.9g}\n")
    return rows


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    plan = cfg.sweep_plan(n_max=args.n_max)
    out = _out_dir(args, cfg)
    spectrum = run_sweep(plan, max_workers=args.threads)
    write_spectrum_csv(spectrum, os.path.join(out, "spectrum.csv"))
    if cfg.overlays:
        with open(os.path.join(out, "overlays.csv"), "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(_overlay_rows(cfg, plan))
    print(f"wrote {os.path.join(out, 'spectrum.csv')} "
          f"({plan.sweep_values().size} x {plan.mw_values().size} grid)")
    return 0


def cmd_resonances(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    if args.spectrum:
        spectrum = read_spectrum_csv(args.spectrum)
    else:
        spectrum = run_sweep(cfg.sweep_plan(n_max=args.n_max), max_workers=args.threads)
    rs = find_resonances(
        spectrum,
        prominence=cfg.extract.get("prominence", 0.1),
        min_separation=cfg.extract.get("min_separation", 0.2),
    )
    write_resonances_csv(rs, os.path.join(out, "resonances.csv"))
    window = cfg.branch_window()
    if window is not None:
        trace = anticrossing_gap(rs, window)
        write_gaps_csv([trace], os.path.join(out, "gaps.csv"))
        print(f"{window.label}: min gap {trace.min_gap:.6g} MHz "
              f"at sweep {trace.sweep_at_min:.6g} MHz")
    print(f"wrote {os.path.join(out, 'resonances.csv')}")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_panel

    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    v = cfg.verify
    tolerance = v.get("tolerance", 1e-2)
    rows = run_panel(
        n_max=args.n_max if args.n_max is not None else v.get("n_max", 67),
        total_periods=v.get("total_periods", 500),
        samples_per_period=v.get("samples_per_period", 64),
        window_fraction=v.get("window_fraction", 0.8),
        n_phases=v.get("n_phases", 16),
    )
    lines = ["label,p_floquet,p_oracle,abs_diff,status\n"]
    all_pass = True
    for row in rows:
        status = "PASS" if row.passed(tolerance) else "FAIL"
        all_pass &= status == "PASS"
        lines.append(
            f"{row.label},{row.p_floquet:.9g},{row.p_oracle:.9g},{row.abs_diff:.9g},{status}\n"
        )
        print(f"{status}  |dP|={row.abs_diff:.3e}  {row.label}")
    with open(os.path.join(out, "verify.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
    if not all_pass:
        return _fail("numerical", f"verification exceeded |dP| tolerance {tolerance:g}", 3)
    return 0


def cmd_converge(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    co = cfg.converge
    n_start = co.get("n_start", 2)
    n_stop = args.n_max if args.n_max is not None else co.get("n_stop", 67)
    n_step = co.get("n_step", 1)
    tol = co.get("tol", 1e-5)
    n_list = list(range(n_start, n_stop + 1, n_step))
    if len(n_list) < 2:
        raise ConfigError("[converge] range must contain at least two truncations")
    fourier = esdr_fourier_blocks(cfg.params)
    scans = [
        convergence_scan(fourier, STATE_0, beta, n_list, tol=tol)
        for beta in (STATE_B, STATE_D)
    ]
    lines = ["n_max,p_0_to_b,p_0_to_d,p_leave\n"]
    for (n, pb), (_, pd) in zip(scans[0].entries, scans[1].entries):
        lines.append(f"{n},{pb:.9g},{pd:.9g},{pb + pd:.9g}\n")
    with open(os.path.join(out, "converge.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)
    recommended = max(s.recommended_n_max for s in scans)
    print(f"recommended n_max = {recommended} (tol {tol:g})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esdrsim",
        description="Floquet ESDR spectra, resonance extraction, and time-domain cross-checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, doc in (
        ("spectrum", cmd_spectrum, "run a sweep and write spectrum.csv (+ metadata, overlays)"),
        ("resonances", cmd_resonances, "extract resonances and anticrossing gaps"),
        ("verify", cmd_verify, "compare Floquet and time-domain leave probabilities"),
        ("converge", cmd_converge, "scan the Floquet truncation order"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="path to the run configuration file")
        p.add_argument("--out", default=None, help="output directory (default from config or cwd)")
        p.add_argument("--n-max", type=int, default=None, help="override the Floquet truncation")
        p.add_argument(
            "--threads", type=int, default=1, help="worker threads for grid rows (0 = auto)"
        )
        if name == "resonances":
            p.add_argument(
                "--spectrum", default=None, help="reuse a stored spectrum CSV instead of sweeping"
            )
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", str(exc), 2)
    except FileNotFoundError as exc:
        return _fail("config", str(exc), 2)
    except (NumericalFailureError, NoConvergenceError, StepTooLargeError) as exc:
        return _fail("numerical", str(exc), 3)
    except (EsdrError, ValueError) as exc:
        return _fail("config", str(exc), 2)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

    gnmodel --config CFG.yaml --output OUT.csv [--threads N] <subcommand> ...

Subcommands
    kernel      evaluate K(F) and eta(F) on an F grid
                (--f-min-hz2, --f-max-hz2, --points, --spacing, --method)
    psd         GN-model NLI PSD of the X polarization on the configured
                output grid
    montecarlo  Monte Carlo NLI PSD estimate vs the GN prediction
                (--mode, --lines, --spacing-hz, --trials, --seed)
    moments     statistical checks of the moment machinery
                (--theorem {1,2,3}, --k, --trials, --seed)

Exit codes: 0 success; 1 configuration error; 2 numerical-convergence
failure; 3 statistical-check failure (moments).  Outputs are written
atomically (temp file in the target directory, then rename) and every file
starts with a comment header holding the tool version and the full resolved
configuration, so identical configurations produce byte-identical files
regardless of --threads.
"""
from __future__ import annotations

import argparse
import contextlib
import math
import os
import sys
import tempfile

import numpy as np

from .config import RunConfig, load_config
from .errors import ConfigError
from .gn import GnRequest, nli_psd_x
from .kernel import (KernelConvergenceError, KernelModel, kernel_closed_form,
                     kernel_quadrature)
from .moments import (StationaryProcessSet, theorem1_discrete_check,
                      theorem2_check, theorem3_discrete_check)
from .montecarlo import MODE_RP1, TrialConfig, estimate_nli_psd
from .version import __version__

__all__ = ["run", "main"]


class _Parser(argparse.ArgumentParser):
    """Bad flags are configuration errors (exit 1), not SystemExit(2)."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gnmodel", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", required=True,
                        help="YAML configuration file")
    parser.add_argument("--output", required=True,
                        help="output file (written atomically)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker count; never affects results")
    sub = parser.add_subparsers(dest="command", required=True)

    kernel = sub.add_parser("kernel", help="evaluate the link kernel on an F grid")
    kernel.add_argument("--f-min-hz2", type=float, required=True)
    kernel.add_argument("--f-max-hz2", type=float, required=True)
    kernel.add_argument("--points", type=int, required=True)
    kernel.add_argument("--spacing", choices=("log", "linear"), default="log")
    kernel.add_argument("--method", choices=("closed-form", "quadrature"),
                        default="closed-form")

    sub.add_parser("psd", help="GN-model NLI PSD on the configured grid")

    mc = sub.add_parser("montecarlo", help="Monte Carlo NLI PSD estimate")
    mc.add_argument("--mode", choices=("rp1", "erp1"))
    mc.add_argument("--lines", type=int, help="number of line spacings M")
    mc.add_argument("--spacing-hz", type=float, help="line spacing f0")
    mc.add_argument("--trials", type=int)
    mc.add_argument("--seed", type=int)

    mom = sub.add_parser("moments", help="moment-theorem statistical checks")
    mom.add_argument("--theorem", type=int, choices=(1, 2, 3))
    mom.add_argument("--k", type=int)
    mom.add_argument("--trials", type=int)
    mom.add_argument("--seed", type=int)
    return parser


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _header_lines(command: str, resolved: dict) -> list:
    lines = [f"# gnmodel {__version__}", f"# command = {command}"]
    for key in sorted(resolved):
        lines.append(f"# {key} = {_fmt(resolved[key])}")
    return lines


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gnmodel-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _kernel_model(cfg: RunConfig) -> KernelModel:
    return KernelModel(link=cfg.require_link(),
                       quadrature_tolerance=cfg.kernel_tolerance,
                       max_cells_per_span=cfg.kernel_max_cells)


def _run_kernel(args, cfg: RunConfig):
    if args.points < 1:
        raise ConfigError("kernel --points must be at least 1")
    if args.spacing == "log":
        if not 0 < args.f_min_hz2 < args.f_max_hz2:
            raise ConfigError("log spacing needs 0 < --f-min-hz2 < --f-max-hz2")
        grid = np.logspace(math.log10(args.f_min_hz2),
                           math.log10(args.f_max_hz2), args.points)
    else:
        if not args.f_min_hz2 < args.f_max_hz2:
            raise ConfigError("--f-min-hz2 must be below --f-max-hz2")
        grid = np.linspace(args.f_min_hz2, args.f_max_hz2, args.points)

    model = _kernel_model(cfg)
    if args.method == "closed-form":
        k_values = kernel_closed_form(model, grid)
        k0 = model.k0
    else:
        k_values = np.array([kernel_quadrature(model, f) for f in grid])
        k0 = kernel_quadrature(model, 0.0)
    eta = k_values / k0

    resolved = dict(cfg.resolved)
    resolved.update({"cli.f_min_hz2": args.f_min_hz2,
                     "cli.f_max_hz2": args.f_max_hz2,
                     "cli.points": args.points,
                     "cli.spacing": args.spacing,
                     "cli.method": args.method})
    lines = _header_lines("kernel", resolved)
    lines.append("F_Hz2,re_K,im_K,re_eta,im_eta,abs_eta")
    for f, k, e in zip(grid, k_values, eta):
        lines.append(",".join(_fmt(float(v)) for v in
                              (f, k.real, k.imag, e.real, e.imag, abs(e))))
    return "\n".join(lines) + "\n", True


def _run_psd(args, cfg: RunConfig):
    psd = cfg.require_signal()
    grid = cfg.require_output_grid()
    model = _kernel_model(cfg)
    try:
        request = GnRequest(psd=psd, kernel=model, output_grid_hz=grid,
                            inner_grid_step_hz=cfg.inner_grid_step_hz,
                            include_phase_term=cfg.include_phase_term)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result = nli_psd_x(request, threads=max(1, args.threads))

    lines = _header_lines("psd", cfg.resolved)
    lines.append("f_Hz,spm,xpolm,phase,total_normalized,total_absolute_W_per_Hz")
    for i, f in enumerate(result.frequencies_hz):
        lines.append(",".join(_fmt(float(v)) for v in (
            f, result.spm[i], result.xpolm[i], result.phase[i],
            result.total[i], result.total_absolute_w_per_hz[i])))
    return "\n".join(lines) + "\n", True


def _run_montecarlo(args, cfg: RunConfig):
    psd = cfg.require_signal()
    model = _kernel_model(cfg)
    params = dict(cfg.montecarlo)
    for flag, key in (("mode", "mode"), ("lines", "num_lines"),
                      ("spacing_hz", "spacing_hz"), ("trials", "num_trials"),
                      ("seed", "seed")):
        value = getattr(args, flag)
        if value is not None:
            params[key] = value
    trial_cfg = TrialConfig(spacing_hz=params["spacing_hz"],
                            num_lines=params["num_lines"],
                            num_trials=params["num_trials"],
                            seed=params["seed"], mode=params["mode"],
                            edge_margin=params["edge_margin"])
    estimate = estimate_nli_psd(trial_cfg, psd, model, polarization="x",
                                threads=max(1, args.threads))

    # continuum GN prediction on the same grid; the phase term belongs to the
    # RP1 PSD only and cancels in DP-ERP1
    try:
        request = GnRequest(psd=psd, kernel=model,
                            output_grid_hz=estimate.frequencies_hz,
                            inner_grid_step_hz=trial_cfg.spacing_hz / 8.0,
                            include_phase_term=(trial_cfg.mode == MODE_RP1))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    analytic = nli_psd_x(request, threads=max(1, args.threads)).total

    resolved = dict(cfg.resolved)
    for key, value in params.items():
        resolved[f"montecarlo.{key}"] = value
    lines = _header_lines("montecarlo", resolved)
    lines.append("f_Hz,mc_mean,mc_stderr,analytic,abs_z_score")
    for i, f in enumerate(estimate.frequencies_hz):
        delta = abs(float(estimate.mean[i]) - float(analytic[i]))
        stderr = float(estimate.stderr[i])
        if stderr > 0:
            z = delta / stderr
        else:
            z = 0.0 if delta == 0 else math.inf
        lines.append(",".join(_fmt(float(v)) for v in (
            f, estimate.mean[i], stderr, analytic[i], z)))
    return "\n".join(lines) + "\n", True


def _run_moments(args, cfg: RunConfig):
    params = dict(cfg.moments)
    for flag, key in (("theorem", "theorem"), ("k", "k"),
                      ("trials", "trials"), ("seed", "seed")):
        value = getattr(args, flag)
        if value is not None:
            params[key] = value

    theorem = params["theorem"]
    if theorem not in (1, 2, 3):
        raise ConfigError(f"moments.theorem must be 1, 2 or 3, got {theorem}")
    if params["trials"] < 2:
        raise ConfigError("moments.trials must be at least 2")
    threads = max(1, args.threads)
    if theorem == 2:
        report = theorem2_check(params["k"], params["num_ensembles"],
                                params["trials"], params["seed"])
    else:
        processes = StationaryProcessSet.random(
            params["num_processes"], params["num_sources"],
            params["grid_size"], params["seed"] + 997)
        if theorem == 1:
            report = theorem1_discrete_check(processes, params["trials"],
                                             params["seed"])
        else:
            report = theorem3_discrete_check(processes, params["trials"],
                                             params["seed"], threads=threads)

    resolved = dict(cfg.resolved)
    for key, value in params.items():
        resolved[f"moments.{key}"] = value
    lines = _header_lines("moments", resolved)
    lines.append("check,passed,z_score,re_estimate,im_estimate,re_expected,"
                 "im_expected,re_stderr,im_stderr,formula_gap")
    for c in report.checks:
        lines.append(",".join((
            c.name, "pass" if c.passed else "FAIL", _fmt(float(c.z_score)),
            _fmt(c.estimate.real), _fmt(c.estimate.imag),
            _fmt(c.expected.real), _fmt(c.expected.imag),
            _fmt(c.stderr.real), _fmt(c.stderr.imag),
            _fmt(float(c.formula_gap)))))
    verdict = "PASS" if report.all_passed else "FAIL"
    lines.append(f"# RESULT: {verdict} (checks = {len(report.checks)}, "
                 f"max_z = {_fmt(float(report.max_z))})")
    return "\n".join(lines) + "\n", report.all_passed


_COMMANDS = {
    "kernel": _run_kernel,
    "psd": _run_psd,
    "montecarlo": _run_montecarlo,
    "moments": _run_moments,
}


def run(argv=None) -> int:
    """Parse arguments, execute one subcommand, write one output file."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = load_config(args.config)
        text, ok = _COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"gnmodel: configuration error: {exc}", file=sys.stderr)
        return 1
    except KernelConvergenceError as exc:
        print(f"gnmodel: convergence failure: {exc}", file=sys.stderr)
        return 2
    _atomic_write(args.output, text)
    return 0 if ok else 3


def main() -> None:
    sys.exit(run())

"""Batch experiment runner: ``hyperdyn run`` and ``hyperdyn validate``.

Every experiment kind maps onto one library entry point and produces a CSV
trace, a text summary, and a decay figure.  Exit status: 0 when the
experiment reached its target verdict, 1 when it ran but the verdict is a
not-found/failure, 2 on configuration or domain errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

from . import __version__
from .c0space import C0TauVector, c0_witness
from .config import ExperimentConfig, load_config
from .criteria import (
    check_mixing,
    find_subsequence,
    multiplier_scan,
    runaway_check,
    witness_decay_bounds,
)
from .errors import HyperdynError
from .funcspace import DEFAULT_REFINE
from .hilbert import ModuleVector, transitivity_witness
from .report import RunReport, write_outputs
from .segal import approximate_identity, segal_norm

_SUCCESS = 0
_NOT_FOUND = 1
_CONFIG_ERROR = 2


def _log10(x: float) -> float:
    return math.log10(x) if x > 0 else -math.inf


def _criterion_rows(report):
    cols = ["r"]
    cols += [f"forward_sup_j{j}" for j in report.indices] or ["forward_sup"]
    cols += [f"backward_sup_j{j}" for j in report.indices] or ["backward_sup"]
    cols += [f"log10_forward_j{j}" for j in report.indices] or ["log10_forward"]
    cols += [f"log10_backward_j{j}" for j in report.indices] or ["log10_backward"]
    rows = [(row.r, *row.forward, *row.backward,
             *row.log10_forward, *row.log10_backward) for row in report.trace]
    return cols, rows


def _run_criterion(cfg: ExperimentConfig, exponent: str, refine: int):
    rep = find_subsequence(cfg.weights, cfg.alpha, cfg.I, cfg.K,
                           cfg.thresholds, cfg.r_max, exponent)
    cols, rows = _criterion_rows(rep)
    summary = [f"subsequence: {rep.subsequence}",
               f"thresholds: {list(rep.thresholds)}"]
    code = _SUCCESS if rep.found else _NOT_FOUND
    return cols, rows, rep.verdict, code, summary


def _run_mixing(cfg: ExperimentConfig, exponent: str, refine: int):
    rep = check_mixing(cfg.weights, cfg.alpha, cfg.I, cfg.K,
                       cfg.threshold, cfg.r_window, cfg.r_max, exponent)
    cols, rows = _criterion_rows(rep)
    summary = [f"threshold: {cfg.threshold}",
               f"window: [{cfg.r_max - cfg.r_window}, {cfg.r_max}]"]
    code = _SUCCESS if rep.found else _NOT_FOUND
    return cols, rows, rep.verdict, code, summary


def _run_multiplier(cfg: ExperimentConfig, exponent: str, refine: int):
    rep = multiplier_scan(cfg.b, cfg.alpha, cfg.K, cfg.thresholds, cfg.n_max)
    cols = ["n", "forward_sup", "backward_sup", "log10_forward", "log10_backward"]
    rows = [(row.r, row.forward[0], row.backward[0],
             row.log10_forward[0], row.log10_backward[0]) for row in rep.trace]
    summary = [f"subsequence: {rep.subsequence}"]
    code = _SUCCESS if rep.found else _NOT_FOUND
    return cols, rows, rep.verdict, code, summary


def _run_witness(cfg: ExperimentConfig, exponent: str, refine: int):
    u = ModuleVector(cfg.u)
    v = ModuleVector(cfg.v)
    cols = ["r", "d_start", "d_end", "bound_forward", "bound_backward"]
    rows = []
    for r in cfg.r_values:
        res = transitivity_witness(u, v, cfg.weights, cfg.alpha, r, refine)
        bf, bb = witness_decay_bounds(u, v, cfg.weights, cfg.alpha, r,
                                      cfg.density, exponent)
        rows.append((r, res.d_start, res.d_end, bf, bb))
    last = rows[-1]
    decayed = last[1] <= cfg.decay_threshold and last[2] <= cfg.decay_threshold
    verdict = "witness_decay_confirmed" if decayed else "witness_decay_not_reached"
    summary = [f"final distances: d_start={last[1]:.6g}, d_end={last[2]:.6g}",
               f"decay threshold: {cfg.decay_threshold}"]
    return cols, rows, verdict, _SUCCESS if decayed else _NOT_FOUND, summary


def _run_c0_witness(cfg: ExperimentConfig, exponent: str, refine: int):
    u = C0TauVector(cfg.u, cfg.tau, cfg.alpha)
    v = C0TauVector(cfg.v, cfg.tau, cfg.alpha)
    mu = ModuleVector(cfg.u)
    mv = ModuleVector(cfg.v)
    cols = ["r", "d_start", "d_end", "bound_forward", "bound_backward"]
    rows = []
    for r in cfg.r_values:
        res = c0_witness(u, v, cfg.weights, r, cfg.rel_tol, refine)
        bf, bb = witness_decay_bounds(mu, mv, cfg.weights, cfg.alpha, r,
                                      cfg.density, exponent)
        rows.append((r, res.d_start, res.d_end, bf, bb))
    last = rows[-1]
    decayed = last[1] <= cfg.decay_threshold and last[2] <= cfg.decay_threshold
    verdict = "witness_decay_confirmed" if decayed else "witness_decay_not_reached"
    summary = [f"final distances: d_start={last[1]:.6g}, d_end={last[2]:.6g}",
               f"decay threshold: {cfg.decay_threshold}"]
    return cols, rows, verdict, _SUCCESS if decayed else _NOT_FOUND, summary


def _run_segal_norm(cfg: ExperimentConfig, exponent: str, refine: int):
    res = segal_norm(cfg.f, cfg.tau, cfg.rel_tol, refine)
    cols = ["k", "term_sup", "partial_sum", "tail_bound_at_depth"]
    rows = []
    partial = 0.0
    for k, term in enumerate(res.terms):
        partial += term
        rows.append((k, term, partial, res.tail_bound if k == res.depth else math.nan))
    summary = [f"value = {res.value:.17g}",
               f"tail bound = {res.tail_bound:.3g} at depth {res.depth}"]
    return cols, rows, "norm_converged", _SUCCESS, summary


def _run_approx_identity(cfg: ExperimentConfig, exponent: str, refine: int):
    res = approximate_identity(cfg.f, cfg.tau, cfg.delta, cfg.rel_tol, refine)
    spec = res.bump_spec
    cols = ["k", "bump_node_x", "bump_node_value"]
    rows = [(k, float(x), float(val))
            for k, (x, val) in enumerate(zip(res.mu.xs, res.mu.vals))]
    ok = res.achieved < cfg.delta
    verdict = "approximation_achieved" if ok else "approximation_failed"
    summary = [
        f"achieved ||f*mu - f|| = {res.achieved:.6g} (target delta = {cfg.delta})",
        f"series cutoff N = {res.series_depth}, eps = {res.eps:.6g}",
        f"bump levels: eps2 = {spec.eps2:.6g}, eps1 = {spec.eps1:.6g}, window N = {spec.N}",
    ]
    return cols, rows, verdict, _SUCCESS if ok else _NOT_FOUND, summary


def _run_runaway(cfg: ExperimentConfig, exponent: str, refine: int):
    res = runaway_check(cfg.alpha, cfg.K, cfg.n_max)
    cols = ["n", "separation", "disjoint"]
    rows = list(res.rows)
    verdict = f"escaped_at_N={res.N}" if res.escaped else "no_escape_within_budget"
    summary = [f"N = {res.N}" if res.escaped else f"no escape up to n_max = {cfg.n_max}"]
    return cols, rows, verdict, _SUCCESS if res.escaped else _NOT_FOUND, summary


_RUNNERS = {
    "criterion": _run_criterion,
    "mixing": _run_mixing,
    "multiplier": _run_multiplier,
    "witness": _run_witness,
    "c0-witness": _run_c0_witness,
    "segal-norm": _run_segal_norm,
    "approx-identity": _run_approx_identity,
    "runaway": _run_runaway,
}


def execute(cfg: ExperimentConfig, exponent: str = "i-1",
            seed: int | None = None, refine: int | None = None) -> RunReport:
    """Dispatch a validated config to its library entry point."""
    if seed is not None:
        cfg.seed = seed
    effective_refine = refine if refine is not None else DEFAULT_REFINE
    settings = [("effective_seed", str(cfg.seed)),
                ("backward_exponent", exponent),
                ("refine", str(effective_refine))]
    start = time.perf_counter()
    cols, rows, verdict, code, summary = _RUNNERS[cfg.kind](cfg, exponent, effective_refine)
    wall = time.perf_counter() - start
    return RunReport(cfg, cols, rows, verdict, code, summary, settings, wall)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperdyn",
        description="Numerical experiments on the dynamics of weighted shift operators.")
    parser.add_argument("--version", action="version", version=f"hyperdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment config")
    run.add_argument("config", help="path to a key = value config file")
    run.add_argument("--out", default=".", help="output directory (default: cwd); "
                     "the HYPERDYN_OUT environment variable overrides this")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--refine", type=int, default=None,
                     help="samples per linear segment for sup evaluations")
    run.add_argument("--backward-exponent", choices=["i-1", "-i"], default="i-1",
                     help="exponent convention inside the backward products")
    run.add_argument("--no-plot", action="store_true", help="skip the PNG figure")

    val = sub.add_parser("validate", help="parse and validate a config, run nothing")
    val.add_argument("config", help="path to a key = value config file")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except HyperdynError as exc:
        print(f"hyperdyn: config error: {exc}", file=sys.stderr)
        return _CONFIG_ERROR

    if args.command == "validate":
        print(f"ok: kind = {cfg.kind}, {len(cfg.raw_lines)} settings validated")
        return _SUCCESS

    try:
        report = execute(cfg, exponent=args.backward_exponent,
                         seed=args.seed, refine=args.refine)
    except HyperdynError as exc:
        print(f"hyperdyn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _CONFIG_ERROR

    out_dir = os.environ.get("HYPERDYN_OUT") or args.out
    stem = os.path.splitext(os.path.basename(args.config))[0]
    written = write_outputs(report, out_dir, stem, plot=not args.no_plot)
    print(f"{cfg.kind}: {report.verdict} ({report.wall_clock:.3f} s)")
    for path in written:
        print(f"  wrote {path}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

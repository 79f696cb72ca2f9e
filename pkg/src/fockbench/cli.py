"""
Command-line driver for trade-off sweeps, the lossy-detection scan and the
self-checks.

Exit codes: 0 ok, 1 failed verification, 2 bad configuration, 3 truncation,
4 no joint advantage at the requested squeezing.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import SweepConfig, merge, read_config_file, worker_count
from .errors import ConfigurationError, DomainError, TruncationError, TruncationWarning
from .protocol import DEFAULT_SIMPLE, TradeoffCurve, loss_scan, optimal_envelope, tradeoff_curve
from .verification import CheckResult, check_delta_identity, run_checks

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_TRUNCATION = 3
EXIT_NO_ADVANTAGE = 4

CURVE_COLUMNS = ("strategy", "t2", "p_s", "log10_ps", "negativity")
LOSS_COLUMNS = ("eta", "t2_star", "neg_joint", "neg_reference")

# reflectivities for the single-source reference envelope shown beside joint sweeps
REFERENCE_R2 = np.logspace(-5.0, math.log10(0.99), 120)


class NoAdvantage(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return "none"
    return "%.12g" % x


def _json_value(x):
    if isinstance(x, float):
        return float("%.12g" % x) if math.isfinite(x) else None
    return x


class Output:
    """Ordered rows plus the resolved config, rendered as CSV or JSON."""

    def __init__(self, command: str, config: SweepConfig, columns: Sequence[str]):
        self.command = command
        self.config = config
        self.columns = tuple(columns)
        self.rows: list[tuple] = []
        self.summary: dict[str, object] = {}

    def header(self) -> dict[str, str]:
        return {"command": self.command, "version": __version__, **self.config.resolved()}

    def render(self) -> str:
        if self.config.output_format == "json":
            doc = {
                "config": self.header(),
                "columns": list(self.columns),
                "rows": [dict(zip(self.columns, map(_json_value, row))) for row in self.rows],
            }
            if self.summary:
                doc["summary"] = {k: _json_value(v) for k, v in self.summary.items()}
            return json.dumps(doc, indent=2) + "\n"
        buf = io.StringIO()
        for key, value in self.header().items():
            buf.write(f"# {key}={value}\n")
        # joint labels contain commas; the writer quotes them
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows([_fmt(v) for v in row] for row in self.rows)
        for key, value in self.summary.items():
            buf.write(f"# {key}={_fmt(value)}\n")
        return buf.getvalue()

    def write(self) -> None:
        _emit(self.render(), self.config.output_path)


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _curve_rows(curve: TradeoffCurve, label: str | None = None) -> list[tuple]:
    # p_s = 0 has no logarithm; such points are dropped rather than written as -inf
    return [
        (label or p.strategy, p.t2, p.p_s, p.log10_ps, p.negativity)
        for p in curve.points
        if p.p_s > 0.0 and math.isfinite(p.log10_ps)
    ]


def cmd_sweep_simple(config: SweepConfig, workers: int = 1) -> Output:
    out = Output("sweep-simple", config, CURVE_COLUMNS)
    curves = [
        tradeoff_curve(s, config.lam, config.t2_values, config.cutoff, workers=workers)
        for s in config.simple_strategies()
    ]
    for curve in curves:
        out.rows += _curve_rows(curve)
    out.rows += _curve_rows(optimal_envelope(curves), "envelope")
    return out


def reference_envelope(lam: float, workers: int = 1) -> TradeoffCurve:
    """Single-source envelope over a fixed transmittivity grid, independent of the sweep range."""
    t2s = [float(t) for t in 1.0 - REFERENCE_R2]
    curves = [tradeoff_curve(s, lam, t2s, workers=workers) for s in DEFAULT_SIMPLE]
    return optimal_envelope(curves)


def cmd_sweep_joint(config: SweepConfig, workers: int = 1) -> Output:
    out = Output("sweep-joint", config, CURVE_COLUMNS)
    for strategy in config.joint_strategies():
        curve = tradeoff_curve(strategy, config.lam, config.t2_values, config.cutoff, workers=workers)
        out.rows += _curve_rows(curve)
    out.rows += _curve_rows(reference_envelope(config.lam, workers), "envelope")
    return out


def cmd_loss_scan(config: SweepConfig, workers: int = 1) -> Output:
    if config.eta_grid is None:
        raise ConfigurationError("loss-scan needs eta_grid")
    scan = loss_scan(config.lam, config.eta_grid, config.cutoff, workers)
    if not scan.advantage:
        raise NoAdvantage(
            f"no joint advantage at lambda={_fmt(config.lam)}: best gap {_fmt(scan.gap)} at t2={_fmt(scan.t2_star)}"
        )
    out = Output("loss-scan", config, LOSS_COLUMNS)
    out.rows = [(eta, scan.t2_star, neg, scan.reference) for eta, neg in scan.rows]
    out.summary = {"eta_star": scan.eta_star, "t2_star": scan.t2_star, "gap": scan.gap, "p_s": scan.p_s}
    return out


def _report(results: list[CheckResult], fmt: str, path: Path | None) -> int:
    failed = [r.check_id for r in results if not r.passed]
    doc = {"passed": not failed, "failed": failed, "checks": [r.as_dict() for r in results]}
    text = json.dumps(doc, indent=2) + "\n"
    if fmt == "json":
        sys.stdout.write(text)
    else:
        for r in results:
            mark = "PASS" if r.passed else "FAIL"
            line = f"{mark}  {r.check_id:<28} value={r.value:.6g} threshold={r.threshold:.3g}"
            print(line + (f"  {r.detail}" if r.detail else ""))
        print(f"{len(results) - len(failed)}/{len(results)} checks passed")
        if failed:
            print("failing checks: " + ", ".join(failed))
    if path is not None:
        _emit(text, path)
    return EXIT_VERIFY if failed else EXIT_OK


def _common_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="flat key=value file; flags override its entries")
    p.add_argument("--lambda", dest="lambda_", metavar="LAMBDA", help="squeezing parameter tanh(r) in (0, 1)")
    p.add_argument("--t2-min", help="lowest beam-splitter transmittivity t^2")
    p.add_argument("--t2-max", help="highest beam-splitter transmittivity t^2")
    p.add_argument("--t2-steps", help="number of t^2 points")
    p.add_argument("--cutoff", help="Fock cutoff, or 'auto'")
    p.add_argument("--strategies", help="strategy labels separated by ';', e.g. '1/0;2/2' or '1,0,0,1;1,1,1,1'")
    p.add_argument("--eta-grid", help="comma-separated detector efficiencies in (0, 1]")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fockbench", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()
    sub.add_parser("sweep-simple", parents=[common], help="single-source subtraction trade-off curves")
    sub.add_parser("sweep-joint", parents=[common], help="two-source joint-measurement trade-off curves")
    sub.add_parser("loss-scan", parents=[common], help="joint negativity against homodyne efficiency")

    verify = sub.add_parser("verify", help="closed forms against independent constructions")
    verify.add_argument("--out", help="also write the JSON report here")
    verify.add_argument("--format", choices=("csv", "json"), default="csv", help="'json' prints the JSON report")
    verify.add_argument("--n-max", type=int, default=12, help="largest N for the binomial identity")
    verify.add_argument("--perturb-beam-splitter", action="store_true", help=argparse.SUPPRESS)

    identity = sub.add_parser("verify-appendix", help="exhaustive check of the binomial delta identity")
    identity.add_argument("--n-max", type=int, default=12, help="largest N to enumerate (at most 30)")
    identity.add_argument("--out", help="also write the JSON report here")
    identity.add_argument("--format", choices=("csv", "json"), default="csv", help="'json' prints the JSON report")
    return parser


def _load_config(args: argparse.Namespace) -> SweepConfig:
    file_entries = read_config_file(args.config) if args.config else {}
    flags = {
        "lambda": args.lambda_,
        "t2_min": args.t2_min,
        "t2_max": args.t2_max,
        "t2_steps": args.t2_steps,
        "cutoff": args.cutoff,
        "strategies": args.strategies,
        "eta_grid": args.eta_grid,
        "out": args.out,
        "format": args.format,
    }
    return merge(file_entries, flags)


_SWEEPS = {"sweep-simple": cmd_sweep_simple, "sweep-joint": cmd_sweep_joint, "loss-scan": cmd_loss_scan}


def _run(args: argparse.Namespace) -> int:
    out_path = Path(args.out) if getattr(args, "out", None) else None
    if args.command == "verify":
        results = run_checks(n_max=args.n_max, perturb_beam_splitter=args.perturb_beam_splitter)
        return _report(results, args.format, out_path)
    if args.command == "verify-appendix":
        return _report([check_delta_identity(args.n_max)], args.format, out_path)
    config = _load_config(args)
    workers = worker_count()
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        output = _SWEEPS[args.command](config, workers)
    output.write()
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except (ConfigurationError, DomainError) as exc:
        print(f"fockbench: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TruncationError, TruncationWarning) as exc:
        print(f"fockbench: truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except NoAdvantage as exc:
        print(f"fockbench: {exc}", file=sys.stderr)
        return EXIT_NO_ADVANTAGE


if __name__ == "__main__":
    sys.exit(main())

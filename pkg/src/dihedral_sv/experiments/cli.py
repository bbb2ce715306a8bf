"""Command line entry point: ``dihedral-sv <experiment> [flags]``.

Exit codes: 0 success, 1 a hard check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from ..errors import DihedralSVError
from .harness import ExperimentConfig
from .runs import run_experiment

COMMANDS = {
    "ptau": "P(tau >= 2) estimate",
    "phase-flip": "probability that a survivor pair carries a sign flip",
    "sv-sweep": "SV success rate per (m, bit size) cell",
    "sv-bench": "SV runtime against m (log2 max a)^3",
    "run": "end-to-end parity recovery",
    "solve": "solve one subset-sum instance file",
}


def _ints(text: str) -> list[int]:
    """``16`` or ``4,9,16`` or ``12:20:4`` (inclusive range with step)."""
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return list(range(lo, hi + 1, step))
    return [int(p) for p in text.split(",") if p]


def _fraction(text: str) -> str:
    Fraction(text)
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dihedral-sv", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="kind", required=True)
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
        p.add_argument("--n", type=_ints)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--lll-delta", dest="lll_delta", type=_fraction)
        p.add_argument("--lambda-policy", dest="lambda_policy", help="'auto' or a positive integer scale")
        p.add_argument("--max-retries", dest="max_retries", type=int)
        p.add_argument("--m", dest="m_values", type=_ints)
        p.add_argument("--bits", dest="bit_sizes", type=_ints)
        p.add_argument("--model", choices=["theorem", "filter"])
        p.add_argument("--out")
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--brute-force-check", dest="brute_force_check", action="store_true", default=None)
        p.add_argument("--parallel", type=int)
        if name == "solve":
            p.add_argument("instance", help="file: m, then m weights, then the target")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data.update(json.load(fh))
    for key in ("n", "trials", "seed", "lll_delta", "lambda_policy", "max_retries", "m_values", "bit_sizes",
                "model", "out", "format", "brute_force_check", "parallel"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if getattr(args, "instance", None):
        data["instance"] = args.instance
    if data.get("kind", args.kind) != args.kind:
        raise ValueError(f"config file is for {data['kind']!r}, not {args.kind!r}")
    data["kind"] = args.kind
    if "seed" not in data and args.kind != "solve":
        raise ValueError("--seed (or a config seed) is required")
    return ExperimentConfig.from_dict(data)


def _summary(report) -> str:
    lines = [f"{report.experiment}: {report.elapsed_us / 1e6:.2f} s"]
    for row in report.aggregates:
        lines.append("  " + ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    for chk in report.checks:
        tag = "PASS" if chk["passed"] else ("FAIL" if chk.get("hard", True) else "FLAG")
        lines.append(f"  [{tag}] {chk['name']}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report = run_experiment(config)
    except (ValueError, OSError, DihedralSVError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if config.out:
        report.write(config.out, config.format)
    else:
        print(report.to_json() if config.format == "json" else report.to_csv())
    print(_summary(report), file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())

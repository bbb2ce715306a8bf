"""Seeded trial runner, binomial intervals, and report serialisation.

Trial ``i`` of an experiment with master seed ``S`` draws all of its
randomness from the stream ``(S, i)``, so records do not depend on trial
order or on the number of worker processes.  Records hold only
deterministic values; wall-clock timings travel in a parallel list.

JSON report layout (schema ``dihedral-sv-report/1``)::

    {"schema": ..., "experiment": kind, "config": {...},
     "records": [...], "aggregates": [...], "checks": [...],
     "timings_us": [...], "elapsed_us": int}

CSV output holds one row per aggregate.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

from scipy.stats import binomtest

SCHEMA = "dihedral-sv-report/1"


@dataclass
class ExperimentConfig:
    kind: str
    n: list[int] = field(default_factory=lambda: [16])
    trials: int = 100
    seed: int = 0
    lll_delta: str = "3/4"
    lambda_policy: str = "auto"
    max_retries: int = 32
    m_values: list[int] = field(default_factory=lambda: [10])
    bit_sizes: list[int] = field(default_factory=lambda: [100])
    model: str = "theorem"
    brute_force_check: bool = False
    parallel: int = 1
    out: Optional[str] = None
    format: str = "json"
    instance: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.parallel < 1:
            raise ValueError("parallel must be >= 1")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")
        delta = Fraction(self.lll_delta)
        if not Fraction(1, 4) < delta < 1:
            raise ValueError(f"lll_delta must lie in (1/4, 1), got {self.lll_delta}")

    @property
    def delta(self) -> Fraction:
        return Fraction(self.lll_delta)

    @property
    def scale(self) -> Optional[int]:
        return None if self.lambda_policy == "auto" else int(self.lambda_policy)

    def echo(self) -> dict:
        """Config fields that determine the records (execution knobs excluded)."""
        d = asdict(self)
        for key in ("parallel", "out", "format"):
            d.pop(key)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if isinstance(data.get("n"), int):
            data["n"] = [data["n"]]
        return cls(**data)


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    records: list[dict]
    aggregates: list[dict]
    checks: list[dict] = field(default_factory=list)
    timings_us: list[dict] = field(default_factory=list)
    elapsed_us: int = 0

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks if c.get("hard", True))

    def aggregate(self, **match) -> dict:
        for row in self.aggregates:
            if all(row.get(k) == v for k, v in match.items()):
                return row
        raise KeyError(match)

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA, **asdict(self)}, indent=1, sort_keys=True)

    def records_json(self) -> str:
        return json.dumps(self.records, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols: list[str] = []
        for row in self.aggregates:
            cols += [k for k in row if k not in cols]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for row in self.aggregates:
            writer.writerow(row)
        return buf.getvalue()

    def write(self, path: str, fmt: str = "json") -> None:
        text = self.to_json() if fmt == "json" else self.to_csv()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def wilson_interval(successes: int, total: int, confidence: float = 0.95) -> tuple[Optional[float], Optional[float]]:
    if total == 0:
        return None, None
    ci = binomtest(successes, total).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def proportion(successes: int, total: int) -> dict:
    low, high = wilson_interval(successes, total)
    return {
        "successes": successes,
        "total": total,
        "estimate": successes / total if total else None,
        "ci_low": low,
        "ci_high": high,
    }


TrialFn = Callable[[dict, int, int], tuple[dict, dict]]


def _call(args):
    fn, params, seed, index = args
    return fn(params, seed, index)


def run_trials(fn: TrialFn, params: dict, seed: int, count: int, parallel: int = 1) -> tuple[list[dict], list[dict]]:
    """Run trials ``0..count-1``; return ``(records, timings)`` in trial order."""
    tasks = [(fn, params, seed, i) for i in range(count)]
    if parallel > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_call, tasks, chunksize=max(1, count // (4 * parallel))))
    else:
        results = [_call(t) for t in tasks]
    return [r for r, _ in results], [t for _, t in results]


class Stopwatch:
    def __init__(self):
        self.start = time.perf_counter_ns()

    def us(self) -> int:
        return (time.perf_counter_ns() - self.start) // 1000

"""Monte Carlo experiments over the pipeline and its building blocks.

Two survivor-count models are available to ``ptau`` and ``phase-flip``:

``theorem``
    Random coefficients and an independent uniform residue ``c``; count the
    labels ``x`` (all ``m*m`` bits) with ``a(x) = c (mod 2^(n-1))``.  For square
    ``n`` the expected count is 2, and ``P(tau >= 2)`` tends to ``1 - 3 e^-2``.
``filter``
    The survivor set produced by the per-group phase-filter measurement used
    by the pipeline, i.e. ``a_i(x_i) = c_i`` for every group with sampled ``c_i``.
"""

from __future__ import annotations

import math
import statistics
import time
from collections import Counter
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .. import oracles
from ..errors import ExhaustedRetries, InfeasibleWidth
from ..parity_pipeline import FAILURE_REASONS, PipelineConfig, run_pipeline
from ..phase_sampler import group_count, random_groups, uniform_residue
from ..rng import stream
from ..sv_solver import SubsetSumInstance, brute_force_subset_sum, density, sv_solve
from ..transition_state import (
    MAX_GROUP_SIZE,
    apply_phase_filter,
    count_global_solutions,
    generate_transition,
    global_solution_exponents,
)
from .harness import ExperimentConfig, ExperimentReport, Stopwatch, proportion, run_trials

THEOREM_MAX_LABEL_BITS = 40
BRUTE_FORCE_MAX_N = 20
PTAU_LIMIT = 1 - 3 * math.exp(-2)


def _check_width(n: int, model: str, brute: bool) -> None:
    m = group_count(n)
    if n < 2:
        raise InfeasibleWidth(f"n must be >= 2, got {n}")
    if model == "theorem" and m * m > THEOREM_MAX_LABEL_BITS:
        raise InfeasibleWidth(f"theorem model enumerates 2^{m * m} labels; limit is {THEOREM_MAX_LABEL_BITS} bits")
    if model == "filter" and m > MAX_GROUP_SIZE:
        raise InfeasibleWidth(f"group size {m} exceeds {MAX_GROUP_SIZE}")
    if model not in ("theorem", "filter"):
        raise ValueError(f"unknown model {model!r}")
    if brute and n > BRUTE_FORCE_MAX_N:
        raise InfeasibleWidth(f"brute-force recount needs n <= {BRUTE_FORCE_MAX_N}")


def binomial_ptau(n: int) -> float:
    """``P(tau >= 2)`` if each of the ``2^(m*m)`` labels hits ``c`` independently w.p. ``2^-(n-1)``."""
    labels = 1 << (group_count(n) ** 2)
    p = 1 / (1 << (n - 1))
    log_q = math.log1p(-p)
    p0 = math.exp(labels * log_q)
    p1 = labels * p * math.exp((labels - 1) * log_q)
    return 1 - p0 - p1


def _cell(params: dict, index: int):
    ns, trials = params["n"], params["trials"]
    return ns[index // trials], index % trials


# --- ptau -------------------------------------------------------------------

def _ptau_trial(params: dict, seed: int, index: int):
    n, local = _cell(params, index)
    clock = Stopwatch()
    coeff_rng, c_rng, filter_rng = stream(seed, n, local).spawn(3)
    groups = random_groups(n, coeff_rng)
    coeffs = [g.coefficients for g in groups]
    c = uniform_residue(c_rng, n - 1)
    rec = {"n": n, "trial": local, "c": c}
    if group_count(n) ** 2 <= THEOREM_MAX_LABEL_BITS:
        rec["tau_theorem"] = count_global_solutions(coeffs, c, n)
    if group_count(n) <= MAX_GROUP_SIZE:
        supports = [apply_phase_filter(g, n, r) for g, r in zip(groups, filter_rng.spawn(len(groups)))]
        rec["tau_filter"] = math.prod(len(sup.survivors) for sup in supports)
    if params["brute"]:
        rec["brute_tau_theorem"] = len(oracles.total_solution_exponents(coeffs, c, n))
        rec["brute_tau_filter"] = len(oracles.filter_survivors(coeffs, [sup.c for sup in supports], n))
    return rec, {"trial_us": clock.us()}


def estimate_ptau(ns: Sequence[int], trials: int, seed: int, model: str = "theorem",
                  brute_force_check: bool = False, parallel: int = 1,
                  config: Optional[ExperimentConfig] = None) -> ExperimentReport:
    """Fraction of trials with at least two survivors, per width."""
    for n in ns:
        _check_width(n, model, brute_force_check)
    clock = Stopwatch()
    params = {"n": list(ns), "trials": trials, "brute": brute_force_check}
    records, timings = run_trials(_ptau_trial, params, seed, len(ns) * trials, parallel)
    aggregates, checks = [], []
    for n in ns:
        rows = [r for r in records if r["n"] == n]
        for mdl in ("theorem", "filter"):
            key = f"tau_{mdl}"
            if key not in rows[0]:
                continue
            hits = sum(r[key] >= 2 for r in rows)
            agg = {"n": n, "model": mdl, "primary": mdl == model, **proportion(hits, len(rows)),
                   "mean_tau": statistics.fmean(r[key] for r in rows)}
            if mdl == "theorem":
                agg["binomial_reference"] = binomial_ptau(n)
                agg["limit_reference"] = PTAU_LIMIT
            aggregates.append(agg)
    if brute_force_check:
        bad = sum(r.get("tau_theorem") != r["brute_tau_theorem"] or r.get("tau_filter") != r["brute_tau_filter"]
                  for r in records)
        checks.append({"name": "brute_force_recount", "passed": bad == 0, "hard": True, "mismatches": bad})
    cfg = (config or ExperimentConfig("ptau", n=list(ns), trials=trials, seed=seed, model=model,
                                      brute_force_check=brute_force_check)).echo()
    return ExperimentReport("ptau", cfg, records, aggregates, checks, timings, clock.us())


# --- phase flip ---------------------------------------------------------------

def _phase_flip_trial(params: dict, seed: int, index: int):
    n, local = _cell(params, index)
    clock = Stopwatch()
    coeff_rng, c_rng, filter_rng, pair_rng = stream(seed, n, local).spawn(4)
    groups = random_groups(n, coeff_rng)
    coeffs = [g.coefficients for g in groups]
    N, half = 1 << n, 1 << (n - 1)
    if params["model"] == "theorem":
        c = uniform_residue(c_rng, n - 1)
        exps = sorted(global_solution_exponents(coeffs, c, n))
        oracle = (lambda: oracles.total_solution_exponents(coeffs, c, n))
    else:
        state = generate_transition(groups, n, filter_rng)
        ref = state.reference_exponent
        exps = sorted((sv.exponent + ref) % N for sv in state.survivors)
        oracle = (lambda: sorted(e for _, e in oracles.filter_survivors(coeffs, state.cs, n)))
    degenerate = all(a == 0 for row in coeffs for a in row)
    tau = len(exps)
    rec = {"n": n, "trial": local, "tau": tau, "degenerate": degenerate,
           "qualifies": tau >= 2 and not degenerate, "flip": None}
    if rec["qualifies"]:
        i, j = (int(v) for v in pair_rng.choice(tau, size=2, replace=False))
        rec["flip"] = (exps[j] - exps[i]) % N == half
    if params["brute"]:
        rec["brute_match"] = oracle() == exps
    return rec, {"trial_us": clock.us()}


def estimate_phase_flip(n: int, trials: int, seed: int, model: str = "theorem",
                        brute_force_check: bool = False, parallel: int = 1,
                        config: Optional[ExperimentConfig] = None) -> ExperimentReport:
    """Among qualifying trials, the fraction whose random survivor pair differs by ``2^(n-1)``."""
    _check_width(n, model, brute_force_check)
    clock = Stopwatch()
    params = {"n": [n], "trials": trials, "model": model, "brute": brute_force_check}
    records, timings = run_trials(_phase_flip_trial, params, seed, trials, parallel)
    q = [r for r in records if r["qualifies"]]
    aggregates = [{"n": n, "model": model, "qualifying": len(q), **proportion(sum(r["flip"] for r in q), len(q)),
                   "reference": 0.5}]
    checks = []
    if brute_force_check:
        bad = sum(not r["brute_match"] for r in records)
        checks.append({"name": "brute_force_recount", "passed": bad == 0, "hard": True, "mismatches": bad})
    cfg = (config or ExperimentConfig("phase-flip", n=[n], trials=trials, seed=seed, model=model,
                                      brute_force_check=brute_force_check)).echo()
    return ExperimentReport("phase-flip", cfg, records, aggregates, checks, timings, clock.us())


# --- subset-sum sweeps -------------------------------------------------------------

def planted_instance(m: int, bits: int, rng: np.random.Generator) -> tuple[SubsetSumInstance, tuple[int, ...]]:
    """Weights uniform on ``[1, 2^bits)`` and a uniformly random planted subset."""
    weights = [1 + uniform_residue(rng, bits) % ((1 << bits) - 1) if bits > 1 else 1 for _ in range(m)]
    x = tuple(int(b) for b in rng.integers(0, 2, size=m))
    return SubsetSumInstance(weights, sum(w * b for w, b in zip(weights, x))), x


def _sv_trial(params: dict, seed: int, index: int):
    cells, trials = params["cells"], params["trials"]
    (m, bits), local = cells[index // trials], index % trials
    inst, planted = planted_instance(m, bits, stream(seed, m, bits, local))
    delta = Fraction(params["delta"])
    t0 = time.perf_counter_ns()
    sols = sv_solve(inst, delta, params["scale"])
    elapsed = (time.perf_counter_ns() - t0) // 1000
    xs = [s.x for s in sols]
    top = max(inst.weights)
    rec = {
        "m": m, "bits": bits, "trial": local,
        "density": round(density(inst), 9) if top >= 2 else None,
        "log2_max_weight": round(math.log2(top), 9),
        "found": bool(xs), "planted_found": planted in xs,
        "verified": all(inst.is_solution(x) for x in xs),
        "solutions": len(xs),
    }
    if params["brute"] and m <= 24:
        rec["contained"] = set(xs) <= set(brute_force_subset_sum(inst))
    return rec, {"sv_us": elapsed}


def _cells(m_values, bit_sizes):
    return [(m, b) for m in m_values for b in bit_sizes]


def _run_sv_cells(kind, m_values, bit_sizes, trials, seed, delta, scale, brute, parallel):
    cells = _cells(m_values, bit_sizes)
    params = {"cells": cells, "trials": trials, "delta": str(delta), "scale": scale, "brute": brute}
    return cells, run_trials(_sv_trial, params, seed, len(cells) * trials, parallel)


def _soundness_checks(records, brute):
    checks = [{"name": "soundness", "passed": all(r["verified"] for r in records), "hard": True}]
    if brute:
        checks.append({"name": "oracle_containment", "passed": all(r.get("contained", True) for r in records),
                       "hard": True})
    return checks


def sv_success_sweep(m_values: Sequence[int], bit_sizes: Sequence[int], trials: int, seed: int,
                     delta=Fraction(3, 4), scale=None, brute_force_check: bool = False, parallel: int = 1,
                     config: Optional[ExperimentConfig] = None) -> ExperimentReport:
    clock = Stopwatch()
    cells, (records, timings) = _run_sv_cells("sv-sweep", m_values, bit_sizes, trials, seed, delta, scale,
                                              brute_force_check, parallel)
    aggregates = []
    for m, bits in cells:
        rows = [r for r in records if r["m"] == m and r["bits"] == bits]
        dens = [r["density"] for r in rows if r["density"] is not None]
        aggregates.append({"m": m, "bits": bits, **proportion(sum(r["found"] for r in rows), len(rows)),
                           "planted_rate": sum(r["planted_found"] for r in rows) / len(rows),
                           "mean_density": statistics.fmean(dens) if dens else None,
                           "low_density": bool(dens) and statistics.fmean(dens) < 1})
    cfg = (config or ExperimentConfig("sv-sweep", m_values=list(m_values), bit_sizes=list(bit_sizes), trials=trials,
                                      seed=seed, lll_delta=str(delta), brute_force_check=brute_force_check)).echo()
    return ExperimentReport("sv-sweep", cfg, records, aggregates, _soundness_checks(records, brute_force_check),
                            timings, clock.us())


def sv_timing_bench(m_values: Sequence[int], bit_sizes: Sequence[int], trials: int, seed: int,
                    delta=Fraction(3, 4), scale=None, parallel: int = 1,
                    config: Optional[ExperimentConfig] = None) -> ExperimentReport:
    """Time ``sv_solve`` per cell and fit ``log t`` against ``log(m (log2 max a)^3)``."""
    clock = Stopwatch()
    cells, (records, timings) = _run_sv_cells("sv-bench", m_values, bit_sizes, trials, seed, delta, scale,
                                              False, parallel)
    aggregates = []
    for m, bits in cells:
        idx = [i for i, r in enumerate(records) if r["m"] == m and r["bits"] == bits]
        times = [timings[i]["sv_us"] for i in idx]
        aggregates.append({"m": m, "bits": bits, "median_us": statistics.median(times),
                           "mean_us": statistics.fmean(times),
                           "work": m * statistics.fmean(records[i]["log2_max_weight"] for i in idx) ** 3,
                           "success_rate": sum(records[i]["found"] for i in idx) / len(idx)})
    fit = fit_timing_law(aggregates)
    for row, res in zip(aggregates, fit.pop("residuals")):
        row["log_residual"] = res
    aggregates.append({"fit": "log(median_us) ~ slope * log(m * log2(max a)^3)", **fit})
    checks = [{"name": "timing_law_slope", "hard": False, "slope": fit["slope"],
               "passed": fit["slope"] is not None and 0.5 <= fit["slope"] <= 1.5}]
    checks += _soundness_checks(records, False)
    cfg = (config or ExperimentConfig("sv-bench", m_values=list(m_values), bit_sizes=list(bit_sizes), trials=trials,
                                      seed=seed, lll_delta=str(delta))).echo()
    return ExperimentReport("sv-bench", cfg, records, aggregates, checks, timings, clock.us())


def fit_timing_law(cells: Sequence[dict]) -> dict:
    if len({c["work"] for c in cells}) < 2:
        return {"slope": None, "intercept": None, "r2": None, "residuals": [None] * len(cells)}
    x = np.log([c["work"] for c in cells])
    y = np.log([max(c["median_us"], 1) for c in cells])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return {"slope": float(slope), "intercept": float(intercept),
            "r2": 1 - ss_res / ss_tot if ss_tot else None,
            "residuals": [float(v) for v in y - pred]}


# --- end to end --------------------------------------------------------------------

def _e2e_trial(params: dict, seed: int, index: int):
    n, local = _cell(params, index)
    rng = stream(seed, n, local)
    s = uniform_residue(rng, n)
    run_seed = int(rng.integers(0, 2 ** 62))
    cfg = PipelineConfig(lll_delta=Fraction(params["delta"]), lambda_policy=params["scale"],
                         exhaustive_pairs=params["exhaustive"], audit=True)
    clock = Stopwatch()
    try:
        res = run_pipeline(n, run_seed, params["max_retries"], s=s, config=cfg)
    except ExhaustedRetries as exc:
        res = exc.result
    rec = {"n": n, "trial": local, "s": s, "success": res.succeeded, "parity": res.parity,
           "correct": None if res.parity is None else res.parity == s % 2,
           "retries": res.retries, "failures": {k: res.failures.get(k, 0) for k in FAILURE_REASONS}}
    if params["brute"]:
        bcfg = PipelineConfig(lll_delta=cfg.lll_delta, lambda_policy=cfg.lambda_policy,
                              exhaustive_pairs=cfg.exhaustive_pairs, solver="brute")
        try:
            bres = run_pipeline(n, run_seed, params["max_retries"], s=s, config=bcfg)
        except ExhaustedRetries as exc:
            bres = exc.result
        rec["brute_match"] = (bres.parity, bres.retries, bres.failures) == (res.parity, res.retries, res.failures)
    return rec, {"trial_us": clock.us(), **{f"{k}_us": v for k, v in res.timings_us.items()}}


def end_to_end(ns: Sequence[int], trials: int, seed: int, max_retries: int = 32, delta=Fraction(3, 4),
               scale=None, exhaustive_pairs: bool = False, brute_force_check: bool = False, parallel: int = 1,
               config: Optional[ExperimentConfig] = None) -> ExperimentReport:
    for n in ns:
        if n < 4 or group_count(n) > MAX_GROUP_SIZE:
            raise InfeasibleWidth(f"pipeline needs 4 <= n and ceil(sqrt(n)) <= {MAX_GROUP_SIZE}, got {n}")
        if brute_force_check and n > 9:
            raise InfeasibleWidth("brute-force recount of the pipeline needs n <= 9")
    clock = Stopwatch()
    params = {"n": list(ns), "trials": trials, "max_retries": max_retries, "delta": str(delta), "scale": scale,
              "exhaustive": exhaustive_pairs, "brute": brute_force_check}
    records, timings = run_trials(_e2e_trial, params, seed, len(ns) * trials, parallel)
    aggregates = []
    for n in ns:
        rows = [r for r in records if r["n"] == n]
        done = [r for r in rows if r["success"]]
        fails = Counter()
        for r in rows:
            fails.update(r["failures"])
        attempts = sum(fails.values()) + len(done)
        aggregates.append({
            "n": n, **proportion(len(done), len(rows)),
            "completed": len(done), "correct": sum(bool(r["correct"]) for r in done),
            "mean_retries": statistics.fmean(r["retries"] for r in rows),
            "attempts": attempts,
            **{f"frac_{k}": fails[k] / attempts for k in FAILURE_REASONS},
        })
    wrong = sum(r["correct"] is False for r in records)
    checks = [{"name": "zero_false_parity", "passed": wrong == 0, "hard": True, "wrong": wrong,
               "completed": sum(r["success"] for r in records)}]
    if brute_force_check:
        checks.append({"name": "brute_force_recount", "hard": False,
                       "passed": all(r["brute_match"] for r in records),
                       "mismatches": sum(not r["brute_match"] for r in records)})
    cfg = (config or ExperimentConfig("run", n=list(ns), trials=trials, seed=seed, max_retries=max_retries,
                                      lll_delta=str(delta), brute_force_check=brute_force_check)).echo()
    return ExperimentReport("run", cfg, records, aggregates, checks, timings, clock.us())


# --- single instance ------------------------------------------------------------------

def read_instance(path: str) -> SubsetSumInstance:
    """Parse ``m`` / ``m`` weights / target, whitespace separated."""
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"{path}: empty instance file")
    m = int(tokens[0])
    if len(tokens) != m + 2:
        raise ValueError(f"{path}: expected {m + 2} integers, found {len(tokens)}")
    return SubsetSumInstance([int(t) for t in tokens[1:m + 1]], int(tokens[m + 1]))


def solve_instance(inst: SubsetSumInstance, delta=Fraction(3, 4), scale=None, brute_force_check: bool = False,
                   config: Optional[ExperimentConfig] = None) -> ExperimentReport:
    clock = Stopwatch()
    sols = sv_solve(inst, delta, scale)
    records = [{"x": list(s.x), "verified": inst.is_solution(s.x)} for s in sols]
    top = max(inst.weights)
    aggregates = [{"m": inst.m, "found": bool(sols), "solutions": len(sols),
                   "density": density(inst) if top >= 2 else None}]
    checks = [{"name": "soundness", "passed": all(r["verified"] for r in records), "hard": True}]
    if brute_force_check:
        oracle = set(brute_force_subset_sum(inst))
        checks.append({"name": "oracle_containment", "hard": True,
                       "passed": all(tuple(r["x"]) in oracle for r in records), "oracle_solutions": len(oracle)})
    cfg = config.echo() if config else {"kind": "solve", "weights": list(inst.weights), "target": inst.target}
    return ExperimentReport("solve", cfg, records, aggregates, checks, [], clock.us())


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    scale = config.scale
    common = {"parallel": config.parallel, "config": config}
    if config.kind == "ptau":
        return estimate_ptau(config.n, config.trials, config.seed, config.model, config.brute_force_check, **common)
    if config.kind == "phase-flip":
        if len(config.n) != 1:
            raise ValueError("phase-flip takes a single n")
        return estimate_phase_flip(config.n[0], config.trials, config.seed, config.model,
                                   config.brute_force_check, **common)
    if config.kind == "sv-sweep":
        return sv_success_sweep(config.m_values, config.bit_sizes, config.trials, config.seed, config.delta, scale,
                                config.brute_force_check, **common)
    if config.kind == "sv-bench":
        return sv_timing_bench(config.m_values, config.bit_sizes, config.trials, config.seed, config.delta, scale,
                               **common)
    if config.kind == "run":
        return end_to_end(config.n, config.trials, config.seed, config.max_retries, config.delta, scale,
                          brute_force_check=config.brute_force_check, **common)
    if config.kind == "solve":
        if not config.instance:
            raise ValueError("solve needs an instance file")
        return solve_instance(read_instance(config.instance), config.delta, scale, config.brute_force_check, config)
    raise ValueError(f"unknown experiment {config.kind!r}")

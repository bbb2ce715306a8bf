"""End-to-end parity recovery.

One attempt: sample ``m*m`` phase states, pack them into ``m`` groups, run the
phase filter to collapse onto a transition state, recover survivor labels
classically with SV, pick a pair whose exponents differ by ``2^(n-1)``,
project onto that pair and measure in the ``|+->`` basis.  Any failure
restarts from sampling.

Classical stages see only the :class:`ClassicalTranscript`.  The slope is
read only while simulating the projection (and, with ``sampler="full"``,
inside the brute-force oracle simulation).
"""

from __future__ import annotations

import bisect
import cmath
import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import rng as rngmod
from .dihedral_core import HiddenInstance, audit_mode, quantum_scope
from .errors import (
    ExhaustedRetries,
    NonRealPhase,
    NoValidPair,
    PipelineFailure,
    ProjectionMissed,
    SVNotFound,
    TooFewSurvivors,
)
from .phase_sampler import build_groups, group_count, sample_phase_state, uniform_residue
from .sv_solver import DEFAULT_DELTA, brute_force_congruence, solve_congruence
from .transition_state import (
    DEFAULT_SUPPORT_CAP,
    TransitionState,
    bits_label,
    generate_transition,
    survivor_tau,
)

FAILURE_REASONS = ("TooFewSurvivors", "NoValidPair", "ProjectionMissed", "SVNotFound")
PHASE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class ClassicalTranscript:
    coefficients: tuple[tuple[int, ...], ...]
    cs: tuple[int, ...]
    c: int
    n: int
    m: int

    @classmethod
    def from_state(cls, state: TransitionState) -> "ClassicalTranscript":
        return cls(state.coefficients, state.cs, state.c, state.n, state.m)


class Candidate(NamedTuple):
    labels: tuple[int, ...]
    exponent: int  # a(x) mod 2^n


@dataclass(frozen=True)
class TwoLevelState:
    amplitudes: tuple[complex, complex]

    @property
    def relative_phase(self) -> complex:
        a0, a1 = self.amplitudes
        return a1 / a0


@dataclass(frozen=True)
class PipelineConfig:
    lll_delta: Fraction = DEFAULT_DELTA
    lambda_policy: Optional[int] = None  # None: auto scale per congruence
    exhaustive_pairs: bool = False
    sampler: str = "shortcut"
    solver: str = "sv"  # "brute" substitutes exhaustive enumeration
    support_cap: int = DEFAULT_SUPPORT_CAP
    audit: bool = False


@dataclass
class PipelineResult:
    n: int
    parity: Optional[int]
    reason: Optional[str]
    retries: int
    failures: dict = field(default_factory=dict)
    timings_us: dict = field(default_factory=dict)

    @property
    def succeeded(self) -> bool:
        return self.parity is not None


def recover_candidates(transcript: ClassicalTranscript, delta=DEFAULT_DELTA, scale=None,
                       solver: str = "sv") -> list[Candidate]:
    """Solve each group's congruence and combine the per-group solutions."""
    n = transcript.n
    per_group = []
    for i, (coeffs, ci) in enumerate(zip(transcript.coefficients, transcript.cs)):
        if solver == "sv":
            sols = solve_congruence(coeffs, ci, n, delta, scale)
        elif solver == "brute":
            sols = brute_force_congruence(coeffs, ci, n)
        else:
            raise ValueError(f"unknown solver {solver!r}")
        if not sols:
            raise SVNotFound(f"no solution recovered for group {i + 1}")
        per_group.append(sorted((bits_label(s.x), sum(a * b for a, b in zip(coeffs, s.x))) for s in sols))
    N = 1 << n
    return [
        Candidate(tuple(lab for lab, _ in combo), sum(v for _, v in combo) % N)
        for combo in itertools.product(*per_group)
    ]


def select_pair(candidates: Sequence[Candidate], n: int) -> tuple[Candidate, Candidate]:
    """Lexicographically first pair ``(i < j)`` whose exponents differ by ``2^(n-1)``."""
    N, half = 1 << n, 1 << (n - 1)
    positions: dict[int, list[int]] = {}
    for idx, cand in enumerate(candidates):
        positions.setdefault(cand.exponent % N, []).append(idx)
    for i, cand in enumerate(candidates):
        later = positions.get((cand.exponent + half) % N, [])
        j = bisect.bisect_right(later, i)
        if j < len(later):
            return cand, candidates[later[j]]
    raise NoValidPair("all candidates share one exponent class")


def project_pair(state: TransitionState, pair: tuple[Candidate, Candidate], inst: HiddenInstance,
                 rng: np.random.Generator) -> TwoLevelState:
    """Projective measurement onto ``span{|x1>, |x2>}``.

    With ``tau`` uniform-magnitude survivors the projection succeeds with
    probability ``2 / tau``.
    """
    lookup = {sv.labels: sv.exponent for sv in state.survivors}
    try:
        e1, e2 = (lookup[p.labels] for p in pair)
    except KeyError as exc:
        raise ValueError(f"pair member {exc} is not a survivor of the state") from None
    tau = survivor_tau(state)
    if rng.random() >= 2 / tau:
        raise ProjectionMissed(f"projection onto 2 of {tau} survivors missed")
    N = 1 << state.n
    with quantum_scope():
        s = inst.s
    phases = [cmath.exp(2j * math.pi * ((e * s) % N) / N) for e in (e1, e2)]
    # Normalise so the |x1> amplitude is real and positive.
    rel = phases[1] / phases[0]
    r = 1 / math.sqrt(2)
    return TwoLevelState((complex(r), complex(r * rel)))


def measure_pm(state: TwoLevelState) -> int:
    """Map the pair onto ``|0> + phase |1>`` and measure in the ``|+->`` basis."""
    phase = state.relative_phase
    if abs(phase - 1) < PHASE_TOLERANCE:
        return 0
    if abs(phase + 1) < PHASE_TOLERANCE:
        return 1
    raise NonRealPhase(f"relative phase {phase} is not +-1")


def _attempt(inst: HiddenInstance, rng: np.random.Generator, config: PipelineConfig, timings: Counter) -> int:
    n = inst.n
    m = group_count(n)
    sample_rng, filter_rng, project_rng = rng.spawn(3)

    t0 = time.perf_counter_ns()
    states = [sample_phase_state(inst, sample_rng, config.sampler) for _ in range(m * m)]
    groups = build_groups(states, n)
    t1 = time.perf_counter_ns()
    state = generate_transition(groups, n, filter_rng, config.support_cap)
    t2 = time.perf_counter_ns()
    timings["sample"] += (t1 - t0) // 1000
    timings["filter"] += (t2 - t1) // 1000

    tau = survivor_tau(state)
    if tau < 2:
        # Recovered candidates are always survivors, so no pair can exist.
        raise TooFewSurvivors(f"tau = {tau}")

    transcript = ClassicalTranscript.from_state(state)
    candidates = recover_candidates(transcript, config.lll_delta, config.lambda_policy, config.solver)
    t3 = time.perf_counter_ns()
    timings["recover"] += (t3 - t2) // 1000
    if len(candidates) < 2:
        raise SVNotFound(f"{len(candidates)} candidate(s) recovered from {tau} survivors")
    pool = candidates if config.exhaustive_pairs else candidates[:2]
    pair = select_pair(pool, n)
    t4 = time.perf_counter_ns()
    timings["select"] += (t4 - t3) // 1000

    two_level = project_pair(state, pair, inst, project_rng)
    parity = measure_pm(two_level)
    timings["measure"] += (time.perf_counter_ns() - t4) // 1000
    return parity


def run_pipeline(n: int, seed: int, max_retries: int = 32, s: Optional[int] = None,
                 config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    """Recover ``s mod 2`` for a planted instance, retrying on failure.

    ``s`` defaults to a uniform draw from the seed's own stream.  Attempt
    ``r`` uses the sub-stream ``(seed, r)``.  Raises :class:`ExhaustedRetries`
    when every attempt fails.
    """
    if n < 4:
        raise ValueError(f"pipeline needs n >= 4, got {n}")
    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")
    if s is None:
        s = uniform_residue(rngmod.stream(seed), n)
    inst = HiddenInstance(n, s)
    failures: Counter = Counter()
    timings: Counter = Counter()
    for attempt in range(max_retries):
        try:
            with audit_mode(config.audit):
                parity = _attempt(inst, rngmod.stream(seed, attempt), config, timings)
        except PipelineFailure as exc:
            failures[exc.reason] += 1
            continue
        return PipelineResult(n, parity, None, attempt, dict(failures), dict(timings))
    result = PipelineResult(n, None, "ExhaustedRetries", max_retries, dict(failures), dict(timings))
    raise ExhaustedRetries(failures, result)

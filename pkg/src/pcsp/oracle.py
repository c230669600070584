"""Reference semantics by brute-force enumeration.

Every world is paired with every decision, so this is only usable on small
problems; :data:`MAX_PAIRS` bounds the work.  It does not need constraints to
involve at most one parameter, which makes it the referee for the searches.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .model import Decision, DecisionLike, ProblemError, ProblemSpec, World, world_probability

MAX_PAIRS = 10**6
TOL = 1e-9


class OracleTooLarge(ProblemError):
    pass


class Universality(enum.Enum):
    STRONG_UNIVERSAL = "strong_universal"
    UNIVERSAL = "universal"
    NEITHER = "neither"


@dataclass
class OracleReport:
    good_worlds: list[World]
    bad_worlds: list[World]
    p_cons: float
    ps_table: dict[Decision, float]
    optimal_pure: list[Decision]
    p_spd: float
    world_probs: dict[World, float]


class _Checker:
    def __init__(self, spec: ProblemSpec):
        pidx, vidx = spec.parameter_index, spec.variable_index
        n = len(spec.parameters)
        # positions into the joint tuple world + decision
        self.scopes = [
            (tuple(pidx[s] if s in pidx else n + vidx[s] for s in c.scope), c.allowed_set)
            for c in spec.constraints
        ]

    def __call__(self, world: World, decision: Decision) -> bool:
        joint = world + decision
        return all(tuple(joint[i] for i in pos) in table for pos, table in self.scopes)


def _guard(spec: ProblemSpec) -> None:
    n_worlds = math.prod(len(p.values) for p in spec.parameters)
    n_decisions = math.prod(len(x.values) for x in spec.variables)
    if n_worlds * n_decisions > MAX_PAIRS:
        raise OracleTooLarge(
            f"{n_worlds} worlds x {n_decisions} decisions exceeds the enumeration limit {MAX_PAIRS}"
        )


def ps_of_decision(spec: ProblemSpec, d: DecisionLike) -> float:
    """Probability of the worlds ``d`` covers."""
    spec.require_valid()
    _guard(spec)
    d = spec.as_decision(d)
    ok = _Checker(spec)
    return math.fsum(world_probability(spec, w) for w in spec.worlds() if ok(w, d))


def analyze(spec: ProblemSpec) -> OracleReport:
    spec.require_valid()
    _guard(spec)
    ok = _Checker(spec)
    worlds = list(spec.worlds())
    decisions = list(spec.decisions())
    probs = {w: world_probability(spec, w) for w in worlds}
    covered = {d: [w for w in worlds if ok(w, d)] for d in decisions}
    ps_table = {d: math.fsum(probs[w] for w in ws) for d, ws in covered.items()}
    coverable = set().union(*covered.values()) if covered else set()
    good = [w for w in worlds if probs[w] > 0 and w in coverable]
    bad = [w for w in worlds if probs[w] > 0 and w not in coverable]
    p_spd = max(ps_table.values(), default=0.0)
    return OracleReport(
        good_worlds=good,
        bad_worlds=bad,
        p_cons=math.fsum(probs[w] for w in good),
        ps_table=ps_table,
        optimal_pure=[d for d, v in ps_table.items() if v >= p_spd - TOL],
        p_spd=p_spd,
        world_probs=probs,
    )


def partition_worlds(spec: ProblemSpec) -> tuple[list[World], list[World], float]:
    """Good worlds, bad worlds and the probability of consistency."""
    report = analyze(spec)
    return report.good_worlds, report.bad_worlds, report.p_cons


def optimal_pure(spec: ProblemSpec) -> tuple[list[Decision], float]:
    report = analyze(spec)
    return report.optimal_pure, report.p_spd


def universality_check(spec: ProblemSpec, d: DecisionLike) -> Universality:
    report = analyze(spec)
    ps = report.ps_table[spec.as_decision(d)]
    if abs(ps - 1.0) <= TOL:
        return Universality.STRONG_UNIVERSAL
    if abs(ps - report.p_cons) <= TOL:
        return Universality.UNIVERSAL
    return Universality.NEITHER


def optimal_conditional_table(spec: ProblemSpec) -> dict[World, Decision | None]:
    """For each possible world, the first decision covering it (or None)."""
    spec.require_valid()
    _guard(spec)
    ok = _Checker(spec)
    decisions = list(spec.decisions())
    table: dict[World, Decision | None] = {}
    for w in spec.worlds():
        if world_probability(spec, w) > 0:
            table[w] = next((d for d in decisions if ok(w, d)), None)
    return table


def ps_of_policy(spec: ProblemSpec, policy) -> float:
    """Success probability of a conditional decision given as ``world -> decision``.

    ``policy`` is any callable or mapping; worlds it maps to None, or to a
    decision that does not cover them, contribute nothing.
    """
    _guard(spec)
    ok = _Checker(spec)
    get = policy.get if hasattr(policy, "get") else policy
    total = []
    for w in spec.worlds():
        d = get(w)
        if d is not None and ok(w, d):
            total.append(world_probability(spec, w))
    return math.fsum(total)

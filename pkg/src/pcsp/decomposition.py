"""Splitting an environment around a covered environment.

``dec(spec, e, f)`` cuts ``e`` into disjoint remainder environments that avoid
``f``, one per parameter at most, and reports the probability of ``e & f``.
Probabilities are carried along by mass ratios rather than recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    PROB_TOL,
    DecisionLike,
    Environment,
    ProblemSpec,
    environment_probability,
    reduce,
)


@dataclass(frozen=True)
class DecompositionResult:
    remainders: list[Environment]
    overlap_probability: float


def dec(
    spec: ProblemSpec, e: Environment, f: Environment, p_e: float | None = None
) -> DecompositionResult:
    if p_e is None:
        p_e = e.probability
    expected = environment_probability(spec, e)
    if abs(p_e - expected) > PROB_TOL:
        raise ValueError(f"p_e={p_e!r} disagrees with the environment's probability {expected!r}")
    if e.is_empty():
        raise ValueError("cannot decompose an empty environment")
    # without this the loop would still split e when the parameter that makes
    # e and f disjoint comes after one where they partly overlap
    if e.isdisjoint(f):
        return DecompositionResult([Environment(e.subsets, p_e)], 0.0)

    current = list(e.subsets)
    p_cur = p_e
    remainders: list[Environment] = []
    for i, param in enumerate(spec.parameters):
        rest_i = current[i] - f.subsets[i]
        if rest_i:
            cur_mass = param.mass(current[i])
            # multiply before dividing so dyadic inputs stay exact
            p_rest = p_cur * param.mass(rest_i) / cur_mass if cur_mass > 0.0 else 0.0
            rest = list(current)
            rest[i] = rest_i
            remainders.append(Environment(tuple(rest), p_rest))
            current[i] = current[i] & f.subsets[i]
            p_cur = max(p_cur - p_rest, 0.0)
            if not current[i]:
                p_cur = 0.0
                break
    return DecompositionResult(remainders, p_cur)


def covered_environment(spec: ProblemSpec, d: DecisionLike) -> Environment | None:
    """The worlds covered by ``d`` as one environment.

    Needs every constraint to involve at most one parameter.  Returns None when
    ``d`` violates a parameter-free constraint and so covers nothing.
    """
    spec.require_property_f()
    d = spec.as_decision(d)
    assignment = spec.decision_dict(d)
    subsets = [set(p.values) for p in spec.parameters]
    for c in spec.constraints:
        r = reduce(c, assignment)
        if not r.scope:
            if not r.allowed:
                return None
            continue
        k = spec.parameter_index[r.scope[0]]
        subsets[k] &= {t[0] for t in r.allowed}
    return spec.environment(subsets)


def intersect(spec: ProblemSpec, a: Environment, b: Environment) -> Environment:
    return spec.environment([x & y for x, y in zip(a.subsets, b.subsets)])

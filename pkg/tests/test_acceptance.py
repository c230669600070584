"""Exit criteria for the package.

Each criterion is a plain function that raises AssertionError on failure.
Under pytest every criterion is one test; run this file directly to get one
PASS/FAIL line per criterion:

    python tests/test_acceptance.py

Random instances use probabilities with power-of-two denominators, for which
all sums and products are exact in floating point, so "exactly" means ``==``.
"""

from __future__ import annotations

import random
import sys

import pytest

from pcsp import oracle
from pcsp.classical import solve_classical
from pcsp.conditional import replay_conditional, solve_conditional
from pcsp.decomposition import dec
from pcsp.instances import (
    dinner,
    random_environment,
    random_f_instance,
    random_parameters_only,
    random_u_instance,
)
from pcsp.model import ProblemSpec, covers, world_probability
from pcsp.pure import search_optimal_pure

TOL = 1e-9
BAD = {("c", "c", "c"), ("nc", "c", "c")}


def close(a: float, b: float, tol: float = TOL) -> bool:
    return abs(a - b) <= tol


def _instances(n: int, seed: int):
    rng = random.Random(seed)
    for _ in range(n):
        yield random_f_instance(rng, max_params=3, max_vars=4, max_domain=3)


def criterion_1():
    """Dinner regression: P_Cons, Bad, PS((R,T)), PS((W,F))."""
    spec = dinner()
    report = oracle.analyze(spec)
    assert close(report.p_cons, 0.55)
    assert set(report.bad_worlds) == BAD
    assert close(report.world_probs[("c", "c", "c")], 0.27)
    assert close(report.world_probs[("nc", "c", "c")], 0.18)
    assert close(report.ps_table[("R", "T")], 0.5)
    assert report.optimal_pure == [("R", "T")]
    assert close(report.ps_table[("W", "F")], 0.1)


def criterion_2():
    """Branch and bound on the dinner problem, with and without Pantagruel."""
    out = search_optimal_pure(dinner())
    assert out.best == ("R", "T") and close(out.best_ps, 0.5) and out.proven_optimal
    out = search_optimal_pure(dinner(p_pantagruel=0.0))
    assert close(out.best_ps, 1.0) and out.proven_optimal


def criterion_3():
    """Conditional search on the dinner problem and the forced replay."""
    spec = dinner()
    cd = solve_conditional(spec)
    assert cd.complete
    assert close(cd.p_good, 0.55) and close(cd.p_bad, 0.45)
    assert {w for e in cd.bad for w in spec.environment_worlds(e)} == BAD

    trace, cd = replay_conditional(spec, [("R", "B"), ("R", "T"), ("W", "F")])
    goods = [t.p_good for t in trace if t.decision is not None]
    bads = [t.p_bad for t in trace]
    assert len(goods) == 3 and all(map(close, goods, [0.2, 0.5, 0.55]))
    distinct_bads = [b for i, b in enumerate(bads) if i == 0 or not close(b, bads[i - 1])]
    assert len(distinct_bads) == 3 and all(map(close, distinct_bads, [0.0, 0.27, 0.45]))
    assert cd.complete and close(cd.p_good, 0.55)


def criterion_4():
    """500 random instances: both searches agree exactly with enumeration."""
    n = 0
    for spec in _instances(500, seed=4):
        report = oracle.analyze(spec)
        out = search_optimal_pure(spec)
        assert out.proven_optimal and out.best_ps == report.p_spd
        cd = solve_conditional(spec)
        assert cd.complete and cd.p_good == report.p_cons
        for e, d in cd.pairs:
            assert all(covers(spec, d, w) for w in spec.environment_worlds(e))
        assert close(oracle.ps_of_policy(spec, cd.lookup), report.p_cons)
        n += 1
    assert n >= 500


def criterion_5():
    """1000 random (E, F) pairs: remainders partition E minus F, mass conserved."""
    rng = random.Random(5)
    n = disjoint = contained = 0
    while n < 1000:
        spec = random_parameters_only(rng, max_params=4, max_domain=4)
        e = random_environment(rng, spec, p_keep=0.7)
        if e.is_empty():
            continue
        f = random_environment(rng, spec, p_keep=0.5)
        r = dec(spec, e, f)
        for i, a in enumerate(r.remainders):
            for b in r.remainders[i + 1 :]:
                assert a.isdisjoint(b)
        covered = [w for rem in r.remainders for w in spec.environment_worlds(rem)]
        expected = [w for w in spec.environment_worlds(e) if w not in f]
        assert sorted(covered) == sorted(expected) and len(covered) == len(set(covered))
        total = sum(rem.probability for rem in r.remainders) + r.overlap_probability
        assert close(total, e.probability)
        if e.isdisjoint(f):
            assert r.remainders == [e] and r.overlap_probability == 0.0
            assert r.remainders[0].probability == e.probability
            disjoint += 1
        if e.issubset(f):
            assert r.remainders == [] and close(r.overlap_probability, e.probability)
            contained += 1
        n += 1
    assert disjoint >= 50 and contained >= 50, (disjoint, contained)


def criterion_6():
    """Anytime monotonicity of both algorithms."""
    for spec in _instances(200, seed=6):
        p_cons = oracle.analyze(spec).p_cons
        snaps = []

        def watch(state):
            assert state.p_good <= p_cons + TOL
            assert p_cons <= 1.0 - state.p_bad + TOL
            snaps.append((state.p_good, state.p_bad))

        solve_conditional(spec, on_iteration=watch)
        for (g0, b0), (g1, b1) in zip(snaps, snaps[1:]):
            assert g0 <= g1 and b0 <= b1

        out = search_optimal_pure(spec)
        values = [v for _, v in out.history]
        assert values == sorted(values)


def criterion_7():
    """(U)-shaped instances: strongly consistent iff all constraints together are."""
    rng = random.Random(7)
    outcomes = set()
    for _ in range(300):
        spec, certain, uncertain = random_u_instance(rng)
        report = oracle.analyze(spec)
        strong = any(close(ps, 1.0) for ps in report.ps_table.values())
        top = ProblemSpec((), spec.variables, tuple(certain) + tuple(uncertain))
        classical = solve_classical(top) is not None
        assert strong == classical
        outcomes.add(strong)
    assert outcomes == {True, False}


def criterion_8():
    """PS(d) <= P_Cons; some conditional decision reaches P_Cons; P_Cons = 1 iff PS 1 is reachable."""
    for spec in _instances(200, seed=8):
        report = oracle.analyze(spec)
        assert all(ps <= report.p_cons + TOL for ps in report.ps_table.values())
        table = oracle.optimal_conditional_table(spec)
        best = oracle.ps_of_policy(spec, table)
        assert close(best, report.p_cons)
        consistent = close(report.p_cons, 1.0)
        reaches_one = close(best, 1.0)
        complete = all(
            d is not None for w, d in table.items() if world_probability(spec, w) > 0
        )
        assert consistent == reaches_one == complete


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4,
            criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_criterion(criterion):
    try:
        criterion()
    except AssertionError:
        print(f"FAIL {criterion.__name__}: {criterion.__doc__}")
        raise
    print(f"PASS {criterion.__name__}: {criterion.__doc__}")


def main() -> int:
    failed = 0
    for criterion in CRITERIA:
        try:
            criterion()
        except AssertionError as exc:
            failed += 1
            print(f"FAIL {criterion.__name__}: {criterion.__doc__} {exc}")
        else:
            print(f"PASS {criterion.__name__}: {criterion.__doc__}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

import random

import pytest

from pcsp.decomposition import covered_environment, dec
from pcsp.instances import random_environment, random_parameters_only
from pcsp.model import Constraint, PropertyFError, ProblemSpec, environment_probability


def _sets(e):
    return tuple(sorted(s) for s in e.subsets)


def test_dinner_first_step(spec):
    wc = covered_environment(spec, ("R", "B"))
    r = dec(spec, spec.full_environment(), wc)
    assert [_sets(e) for e in r.remainders] == [
        (["c"], ["c", "nc"], ["c", "nc"]),
        (["nc"], ["c", "nc"], ["c"]),
    ]
    assert [e.probability for e in r.remainders] == pytest.approx([0.6, 0.2], abs=1e-12)
    assert r.overlap_probability == pytest.approx(0.2, abs=1e-12)


def test_disjoint_and_contained(spec):
    e = spec.environment({"l1": ["c"]})
    f = spec.environment({"l1": ["nc"]})
    r = dec(spec, e, f)
    assert r.remainders == [e] and r.remainders[0].probability == e.probability
    assert r.overlap_probability == 0.0
    r = dec(spec, f, spec.full_environment())
    assert r.remainders == [] and r.overlap_probability == pytest.approx(0.4, abs=1e-12)


def test_disjoint_on_a_later_parameter():
    from pcsp.model import Parameter

    spec = ProblemSpec(
        (Parameter("a", ("0", "1"), (0.5, 0.5)), Parameter("b", ("0", "1"), (0.25, 0.75))),
    )
    e = spec.environment([["0", "1"], ["0"]])
    f = spec.environment([["0"], ["1"]])
    r = dec(spec, e, f)
    assert r.remainders == [e] and r.overlap_probability == 0.0


def test_rejects_wrong_probability(spec):
    with pytest.raises(ValueError):
        dec(spec, spec.full_environment(), spec.full_environment(), p_e=0.5)


@pytest.mark.parametrize(
    "decision, subsets",
    [
        (("R", "B"), (["nc"], ["c", "nc"], ["nc"])),
        (("R", "T"), (["c", "nc"], ["c", "nc"], ["nc"])),
        (("W", "F"), (["c", "nc"], ["nc"], ["c", "nc"])),
    ],
)
def test_covered_environment(spec, decision, subsets):
    from pcsp import oracle

    wc = covered_environment(spec, decision)
    assert _sets(wc) == subsets
    assert wc.probability == pytest.approx(oracle.ps_of_decision(spec, decision), abs=1e-12)


def test_covered_environment_needs_f(spec):
    two = Constraint("two", ("l1", "l2", "x1"), [("c", "c", "R")])
    with pytest.raises(PropertyFError):
        covered_environment(ProblemSpec(spec.parameters, spec.variables, spec.constraints + (two,)), ("R", "T"))


def test_covered_environment_none_when_decision_constraint_fails(spec):
    assert covered_environment(spec, ("W", "B")) is None


@pytest.mark.parametrize("seed", range(300))
def test_partition_property(seed):
    rng = random.Random(seed)
    spec = random_parameters_only(rng)
    e = random_environment(rng, spec, p_keep=0.7)
    while e.is_empty():
        e = random_environment(rng, spec, p_keep=0.7)
    f = random_environment(rng, spec, p_keep=0.5)
    r = dec(spec, e, f)
    assert len(r.remainders) <= len(spec.parameters)
    for w in spec.environment_worlds(e):
        homes = [i for i, rem in enumerate(r.remainders) if w in rem]
        assert len(homes) == (0 if w in f else 1)
    for rem in r.remainders:
        assert rem.issubset(e) and rem.isdisjoint(f) and not rem.is_empty()
        assert rem.probability == pytest.approx(environment_probability(spec, rem), abs=1e-9)
    total = sum(rem.probability for rem in r.remainders) + r.overlap_probability
    assert total == pytest.approx(e.probability, abs=1e-9)
    # the same inputs always give the same pieces
    assert dec(spec, e, f) == r

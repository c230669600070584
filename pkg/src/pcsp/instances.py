"""Ready-made problems and random generators used by tests and benchmarks."""

from __future__ import annotations

import itertools
import random

from .model import Constraint, DecisionVariable, Environment, Parameter, ProblemSpec

C, NC = "c", "nc"


def dinner(p_grandgousier: float = 0.6, p_gargantua: float = 0.9, p_pantagruel: float = 0.5) -> ProblemSpec:
    """Choose a wine and a meal for three guests who may or may not come.

    ``l1..l3`` are the guests' attendance (``c`` comes, ``nc`` does not);
    ``x1`` is the wine (White/Red) and ``x2`` the meal (Turkey/Beef/Fish).
    """
    attend = (C, NC)

    def dist(p: float) -> tuple[float, float]:
        # 1 - 0.9 is not 0.1 in binary; keep the complement's decimal spelling
        return p, float(f"{1 - p:.12g}")

    return ProblemSpec(
        parameters=(
            Parameter("l1", attend, dist(p_grandgousier)),
            Parameter("l2", attend, dist(p_gargantua)),
            Parameter("l3", attend, dist(p_pantagruel)),
        ),
        variables=(
            DecisionVariable("x1", ("W", "R")),
            DecisionVariable("x2", ("T", "B", "F")),
        ),
        constraints=(
            Constraint("C1", ("x1", "x2"), [("W", "F"), ("R", "B"), ("W", "T"), ("R", "T")]),
            Constraint("C2", ("l1", "x2"), [(C, "T"), (C, "F"), (NC, "T"), (NC, "F"), (NC, "B")]),
            Constraint("C3", ("l2", "x1"), [(C, "R"), (NC, "R"), (NC, "W")]),
            Constraint("C4", ("l3", "x2"), [(C, "F"), (NC, "T"), (NC, "F"), (NC, "B")]),
        ),
    )


# probabilities with small power-of-two denominators keep every sum and
# product exact in floating point
def _dyadic_distribution(rng: random.Random, n: int, denominator: int = 8) -> list[float]:
    cuts = sorted(rng.randint(0, denominator) for _ in range(n - 1))
    bounds = [0, *cuts, denominator]
    return [(b - a) / denominator for a, b in zip(bounds, bounds[1:])]


def _distribution(rng: random.Random, n: int) -> list[float]:
    raw = [rng.random() + 0.05 for _ in range(n)]
    total = sum(raw)
    probs = [r / total for r in raw]
    probs[-1] = 1.0 - sum(probs[:-1])
    return probs


def random_f_instance(
    rng: random.Random,
    *,
    max_params: int = 3,
    max_vars: int = 4,
    max_domain: int = 3,
    max_constraints: int = 5,
    max_arity: int = 3,
    density: float | None = None,
    dyadic: bool = True,
) -> ProblemSpec:
    """A random problem where every constraint has at most one parameter."""
    n_params = rng.randint(0, max_params)
    n_vars = rng.randint(1, max_vars)
    params = []
    for k in range(n_params):
        size = rng.randint(1, max_domain)
        probs = _dyadic_distribution(rng, size) if dyadic else _distribution(rng, size)
        params.append(Parameter(f"p{k}", [f"v{j}" for j in range(size)], probs))
    variables = [
        DecisionVariable(f"x{i}", [f"d{j}" for j in range(rng.randint(1, max_domain))])
        for i in range(n_vars)
    ]
    domains = {p.name: p.values for p in params} | {x.name: x.values for x in variables}
    constraints = []
    for ci in range(rng.randint(0, max_constraints)):
        arity = rng.randint(1, min(max_arity, n_vars + (1 if n_params else 0)))
        use_param = n_params > 0 and arity > 1 and rng.random() < 0.7
        k_vars = arity - 1 if use_param else arity
        scope = rng.sample([x.name for x in variables], min(k_vars, n_vars))
        if use_param:
            scope.insert(rng.randint(0, len(scope)), rng.choice(params).name)
        space = list(itertools.product(*(domains[n] for n in scope)))
        dens = rng.uniform(0.3, 0.9) if density is None else density
        allowed = [t for t in space if rng.random() < dens]
        constraints.append(Constraint(f"c{ci}", scope, allowed))
    return ProblemSpec(params, variables, constraints)


def random_u_instance(
    rng: random.Random,
    *,
    max_vars: int = 4,
    max_domain: int = 3,
    max_certain: int = 3,
    max_uncertain: int = 3,
) -> tuple[ProblemSpec, list[Constraint], list[Constraint]]:
    """A problem where each uncertain constraint is switched by its own parameter.

    Parameter ``u<i>`` takes ``on`` (the constraint applies) or ``off``, with
    probabilities strictly between 0 and 1.  Returns the problem, the certain
    constraints and the uncertain constraints as plain decision constraints.
    """
    n_vars = rng.randint(1, max_vars)
    variables = [
        DecisionVariable(f"x{i}", [f"d{j}" for j in range(rng.randint(1, max_domain))])
        for i in range(n_vars)
    ]
    domains = {x.name: x.values for x in variables}

    def random_constraint(name: str) -> Constraint:
        scope = rng.sample(list(domains), rng.randint(1, min(2, n_vars)))
        space = list(itertools.product(*(domains[n] for n in scope)))
        dens = rng.uniform(0.4, 0.95)
        return Constraint(name, scope, [t for t in space if rng.random() < dens])

    certain = [random_constraint(f"k{i}") for i in range(rng.randint(0, max_certain))]
    uncertain = [random_constraint(f"u{i}") for i in range(rng.randint(1, max_uncertain))]
    params = []
    encoded = []
    for c in uncertain:
        on = rng.choice([0.25, 0.5, 0.75, 0.125, 0.875])
        params.append(Parameter(c.name, ("on", "off"), (on, 1 - on)))
        space = itertools.product(*(domains[n] for n in c.scope))
        allowed = [("on", *t) for t in c.allowed] + [("off", *t) for t in space]
        encoded.append(Constraint(f"C_{c.name}", (c.name, *c.scope), allowed))
    spec = ProblemSpec(params, variables, certain + encoded)
    return spec, certain, uncertain


def random_environment(rng: random.Random, spec: ProblemSpec, p_keep: float = 0.6) -> Environment:
    subsets = [[v for v in p.values if rng.random() < p_keep] for p in spec.parameters]
    return spec.environment(subsets)


def random_parameters_only(rng: random.Random, max_params: int = 4, max_domain: int = 4) -> ProblemSpec:
    """Parameters with random domains and no variables, for environment tests."""
    params = []
    for k in range(rng.randint(1, max_params)):
        size = rng.randint(1, max_domain)
        params.append(Parameter(f"p{k}", [f"v{j}" for j in range(size)], _distribution(rng, size)))
    return ProblemSpec(params)

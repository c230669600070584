"""Domain types for probabilistic CSPs.

A problem splits its unknowns into *parameters*, whose values are set by the
world and carry independent probability distributions, and *decision
variables*, which the agent chooses.  Constraints are extensional tables.

Worlds and decisions are plain tuples ordered like ``spec.parameters`` and
``spec.variables``.  Functions that take one also accept a name -> value
mapping and normalise it.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Union

PROB_TOL = 1e-9

World = tuple
Decision = tuple
WorldLike = Union[World, Mapping[str, Hashable]]
DecisionLike = Union[Decision, Mapping[str, Hashable]]


class ProblemError(ValueError):
    """Raised when a problem violates a structural invariant."""

    def __init__(self, message: str, diagnostics: Sequence["Diagnostic"] = ()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class PropertyFError(ProblemError):
    """A constraint involves more than one parameter."""

    def __init__(self, constraint: str, parameters: Sequence[str]):
        super().__init__(
            f"constraint {constraint!r} involves {len(parameters)} parameters "
            f"({', '.join(parameters)}); at most one is supported"
        )
        self.constraint = constraint
        self.parameters = tuple(parameters)


@dataclass(frozen=True)
class Parameter:
    name: str
    values: tuple
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))

    def prob(self, value) -> float:
        return self.probs[self.values.index(value)]

    def mass(self, values: Iterable) -> float:
        """Total probability of a subset of the domain."""
        table = dict(zip(self.values, self.probs))
        return math.fsum(table[v] for v in values)


@dataclass(frozen=True)
class DecisionVariable:
    name: str
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class Constraint:
    """An extensional constraint: the tuples over ``scope`` that are allowed."""

    name: str
    scope: tuple[str, ...]
    allowed: tuple[tuple, ...]

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        object.__setattr__(self, "allowed", tuple(tuple(t) for t in self.allowed))

    @cached_property
    def allowed_set(self) -> frozenset:
        return frozenset(self.allowed)

    def accepts(self, assignment: Mapping[str, Hashable]) -> bool:
        return tuple(assignment[n] for n in self.scope) in self.allowed_set


@dataclass(frozen=True)
class Environment:
    """A Cartesian product of per-parameter value subsets.

    ``probability`` is a cached value; it is excluded from equality so that two
    environments with the same worlds compare equal regardless of how their
    probabilities were accumulated.
    """

    subsets: tuple[frozenset, ...]
    probability: float = field(default=0.0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(frozenset(s) for s in self.subsets))

    def is_empty(self) -> bool:
        return any(not s for s in self.subsets)

    def __contains__(self, world) -> bool:
        return len(world) == len(self.subsets) and all(
            v in s for v, s in zip(world, self.subsets)
        )

    def size(self) -> int:
        return math.prod(len(s) for s in self.subsets)

    def isdisjoint(self, other: "Environment") -> bool:
        return any(not (a & b) for a, b in zip(self.subsets, other.subsets))

    def issubset(self, other: "Environment") -> bool:
        return self.is_empty() or all(a <= b for a, b in zip(self.subsets, other.subsets))


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    subject: str
    message: str

    def __str__(self):
        return f"[{self.rule}] {self.subject}: {self.message}"


@dataclass(frozen=True)
class ProblemSpec:
    """Parameters, decision variables and constraints of a probabilistic CSP.

    Construction does not validate; call :func:`validate` or
    :meth:`require_valid`.  When every constraint tuple is legal the tables are
    re-sorted into canonical order (lexicographic over domain positions).
    """

    parameters: tuple[Parameter, ...] = ()
    variables: tuple[DecisionVariable, ...] = ()
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(self.parameters))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self._canonical(c) for c in self.constraints))

    def _canonical(self, c: Constraint) -> Constraint:
        domains = self.domains
        try:
            positions = [
                tuple(domains[n].index(v) for n, v in zip(c.scope, t)) for t in c.allowed
            ]
        except (KeyError, ValueError):
            return c
        if any(len(t) != len(c.scope) for t in c.allowed):
            return c
        order = sorted(range(len(c.allowed)), key=positions.__getitem__)
        return Constraint(c.name, c.scope, tuple(c.allowed[i] for i in order))

    @cached_property
    def domains(self) -> dict[str, tuple]:
        out: dict[str, tuple] = {}
        for p in self.parameters:
            out.setdefault(p.name, p.values)
        for x in self.variables:
            out.setdefault(x.name, x.values)
        return out

    @cached_property
    def parameter_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters)

    @cached_property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(x.name for x in self.variables)

    @cached_property
    def parameter_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.parameter_names)}

    @cached_property
    def variable_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.variable_names)}

    def parameter(self, name: str) -> Parameter:
        return self.parameters[self.parameter_index[name]]

    def constraint(self, name: str) -> Constraint:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)

    def is_parameter(self, name: str) -> bool:
        return name in self.parameter_index

    def scope_parameters(self, c: Constraint) -> tuple[str, ...]:
        return tuple(n for n in c.scope if n in self.parameter_index)

    def property_f(self, c: Constraint) -> bool:
        """True iff the constraint involves at most one parameter."""
        return len(self.scope_parameters(c)) <= 1

    def require_valid(self) -> None:
        diags = validate(self)
        if diags:
            raise ProblemError(
                "invalid problem: " + "; ".join(str(d) for d in diags), diags
            )

    def require_property_f(self) -> None:
        for c in self.constraints:
            params = self.scope_parameters(c)
            if len(params) > 1:
                raise PropertyFError(c.name, params)

    # -- worlds, decisions and environments

    def as_world(self, w: WorldLike) -> World:
        return _as_tuple(w, self.parameter_names, self.domains, "world")

    def as_decision(self, d: DecisionLike) -> Decision:
        return _as_tuple(d, self.variable_names, self.domains, "decision")

    def world_dict(self, w: World) -> dict:
        return dict(zip(self.parameter_names, w))

    def decision_dict(self, d: Decision) -> dict:
        return dict(zip(self.variable_names, d))

    def worlds(self) -> Iterator[World]:
        return itertools.product(*(p.values for p in self.parameters))

    def decisions(self) -> Iterator[Decision]:
        return itertools.product(*(x.values for x in self.variables))

    def environment(self, subsets: Sequence[Iterable] | Mapping[str, Iterable]) -> Environment:
        """Build an environment with its probability filled in.

        A mapping may omit parameters; omitted ones keep their full domain.
        """
        if isinstance(subsets, Mapping):
            unknown = set(subsets) - set(self.parameter_index)
            if unknown:
                raise KeyError(f"unknown parameters: {sorted(unknown)}")
            subsets = [subsets.get(p.name, p.values) for p in self.parameters]
        subsets = [frozenset(s) for s in subsets]
        if len(subsets) != len(self.parameters):
            raise ValueError(
                f"environment has {len(subsets)} subsets for {len(self.parameters)} parameters"
            )
        for p, s in zip(self.parameters, subsets):
            bad = s - set(p.values)
            if bad:
                raise ValueError(f"values {sorted(map(str, bad))} not in domain of {p.name!r}")
        e = Environment(tuple(subsets))
        return Environment(e.subsets, environment_probability(self, e))

    def full_environment(self) -> Environment:
        return self.environment([p.values for p in self.parameters])

    def environment_worlds(self, e: Environment) -> Iterator[World]:
        """Worlds of ``e`` in canonical (domain) order."""
        return itertools.product(
            *(tuple(v for v in p.values if v in s) for p, s in zip(self.parameters, e.subsets))
        )

    def environment_dict(self, e: Environment) -> dict[str, list]:
        return {
            p.name: [v for v in p.values if v in s] for p, s in zip(self.parameters, e.subsets)
        }


def _as_tuple(a, names: tuple[str, ...], domains: Mapping[str, tuple], what: str) -> tuple:
    if isinstance(a, Mapping):
        missing = [n for n in names if n not in a]
        extra = [n for n in a if n not in names]
        if missing or extra:
            raise ValueError(f"{what} must assign exactly {list(names)}; got {list(a)}")
        a = tuple(a[n] for n in names)
    else:
        a = tuple(a)
        if len(a) != len(names):
            raise ValueError(f"{what} has {len(a)} values for {len(names)} names")
    for n, v in zip(names, a):
        if v not in domains[n]:
            raise ValueError(f"value {v!r} not in domain of {n!r}")
    return a


# -- operations


def reduce(c: Constraint, a: Mapping[str, Hashable], spec: ProblemSpec | None = None) -> Constraint:
    """Restrict ``c`` by a partial assignment.

    The result lives on the unassigned part of the scope and keeps the
    projections of the allowed tuples that agree with ``a``.  Names of ``a``
    outside the scope are ignored, so a whole world or decision can be passed.
    With ``spec`` given, every name and value of ``a`` is checked against it.
    """
    if spec is not None:
        for n, v in a.items():
            if n not in spec.domains:
                raise KeyError(f"unknown name {n!r}")
            if v not in spec.domains[n]:
                raise ValueError(f"value {v!r} not in domain of {n!r}")
    fixed = [(i, a[n]) for i, n in enumerate(c.scope) if n in a]
    if not fixed:
        return c
    keep = [i for i, n in enumerate(c.scope) if n not in a]
    allowed = []
    seen = set()
    for t in c.allowed:
        if all(t[i] == v for i, v in fixed):
            proj = tuple(t[i] for i in keep)
            if proj not in seen:
                seen.add(proj)
                allowed.append(proj)
    return Constraint(c.name, tuple(c.scope[i] for i in keep), tuple(allowed))


def world_probability(spec: ProblemSpec, w: WorldLike) -> float:
    w = spec.as_world(w)
    return math.prod(p.prob(v) for p, v in zip(spec.parameters, w))


def environment_probability(spec: ProblemSpec, e: Environment) -> float:
    if e.is_empty():
        return 0.0
    return math.prod(p.mass(s) for p, s in zip(spec.parameters, e.subsets))


def covers(spec: ProblemSpec, d: DecisionLike, w: WorldLike) -> bool:
    """Whether decision ``d`` satisfies every constraint in world ``w``."""
    joint = dict(zip(spec.parameter_names, spec.as_world(w)))
    joint.update(zip(spec.variable_names, spec.as_decision(d)))
    return all(c.accepts(joint) for c in spec.constraints)


def validate(spec: ProblemSpec) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    names = [p.name for p in spec.parameters] + [x.name for x in spec.variables]
    for n in sorted({n for n in names if names.count(n) > 1}):
        diags.append(Diagnostic("unique-names", n, "name declared more than once"))
    cnames = [c.name for c in spec.constraints]
    for n in sorted({n for n in cnames if cnames.count(n) > 1}):
        diags.append(Diagnostic("unique-names", n, "constraint name used more than once"))

    for p in spec.parameters:
        if len(p.probs) != len(p.values):
            diags.append(Diagnostic("probabilities", p.name, "one probability per value required"))
            continue
        if len(set(p.values)) != len(p.values):
            diags.append(Diagnostic("domain", p.name, "duplicate values"))
        if any(not (0.0 <= q <= 1.0) or math.isnan(q) for q in p.probs):
            diags.append(Diagnostic("probabilities", p.name, "probabilities must lie in [0, 1]"))
        total = math.fsum(p.probs)
        if abs(total - 1.0) > PROB_TOL:
            diags.append(
                Diagnostic("probability-sum", p.name, f"probabilities sum to {total!r}, not 1")
            )
    for x in spec.variables:
        if len(set(x.values)) != len(x.values):
            diags.append(Diagnostic("domain", x.name, "duplicate values"))

    for c in spec.constraints:
        unknown = [n for n in c.scope if n not in spec.domains]
        if unknown:
            diags.append(Diagnostic("scope", c.name, f"unknown names {unknown}"))
            continue
        if len(set(c.scope)) != len(c.scope):
            diags.append(Diagnostic("scope", c.name, "name repeated in scope"))
        if not any(n in spec.variable_index for n in c.scope):
            diags.append(
                Diagnostic("scope", c.name, "constraint must involve at least one decision variable")
            )
        for t in c.allowed:
            if len(t) != len(c.scope):
                diags.append(
                    Diagnostic("tuple-arity", c.name, f"tuple {list(t)} does not match scope arity")
                )
                continue
            bad = [(n, v) for n, v in zip(c.scope, t) if v not in spec.domains[n]]
            if bad:
                diags.append(Diagnostic("tuple-values", c.name, f"tuple {list(t)} has illegal values {bad}"))
        if len(set(c.allowed)) != len(c.allowed):
            diags.append(Diagnostic("duplicate-tuples", c.name, "allowed tuples are not distinct"))
    return diags


def property_f(spec: ProblemSpec) -> dict[str, bool]:
    """Per constraint, whether it involves at most one parameter."""
    return {c.name: spec.property_f(c) for c in spec.constraints}


@dataclass
class ConditionalDecision:
    """Environments mapped to decisions, plus environments known to be bad.

    ``pending`` holds environments left unprocessed by an interrupted run.
    """

    pairs: list[tuple[Environment, Decision]]
    bad: list[Environment]
    p_good: float
    p_bad: float
    pending: list[Environment] = field(default_factory=list)
    iterations: int = 0
    interrupted: bool = False

    @property
    def complete(self) -> bool:
        return not self.pending

    def lookup(self, w: World) -> Decision | None:
        for e, d in self.pairs:
            if w in e:
                return d
        return None

    def decisions(self) -> list[Decision]:
        """Distinct decisions in first-use order."""
        return list(dict.fromkeys(d for _, d in self.pairs))


def parse_probability(value: Any) -> float:
    """Accept floats, ints and rational strings such as ``"3/10"``."""
    from fractions import Fraction

    if isinstance(value, bool):
        raise ValueError(f"not a probability: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    raise ValueError(f"not a probability: {value!r}")

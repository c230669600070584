"""Anytime construction of an optimal conditional decision.

A worklist holds environments not yet covered.  Each iteration picks one and
asks the mixed solver for any (world, decision) inside it.  If there is none
the environment is bad.  Otherwise the decision's covered environment is cut
out of every pending environment; the cut-out pieces become the decision's
rules and their mass goes to ``p_good``.

Rules are stored as those disjoint pieces, not as the whole covered
environment, so every world has at most one rule.
"""

from __future__ import annotations

import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .classical import solve_mixed
from .decomposition import covered_environment, dec, intersect
from .model import ConditionalDecision, Decision, DecisionLike, Environment, ProblemError, ProblemSpec
from .network import Network

PICKERS = ("maxprob", "fifo")


@dataclass
class ConditionalSearchState:
    decisions: list[tuple[Environment, Decision]] = field(default_factory=list)
    env: list[Environment] = field(default_factory=list)
    bad: list[Environment] = field(default_factory=list)
    p_good: float = 0.0
    p_bad: float = 0.0
    iterations: int = 0


@dataclass(frozen=True)
class TraceStep:
    decision: Decision | None
    p_good: float
    p_bad: float
    env: tuple[Environment, ...]


def _pick(env: list[Environment], picker: str) -> int:
    if picker == "fifo":
        return 0
    if picker == "maxprob":
        # first of the most probable, so ties keep worklist order
        best = 0
        for i, e in enumerate(env):
            if e.probability > env[best].probability:
                best = i
        return best
    raise ValueError(f"unknown picker {picker!r}; expected one of {PICKERS}")


def _cover(spec: ProblemSpec, state: ConditionalSearchState, d: Decision, wc: Environment) -> None:
    pending: list[Environment] = []
    for g in state.env:
        result = dec(spec, g, wc)
        piece = intersect(spec, g, wc)
        if not piece.is_empty():
            state.decisions.append((piece, d))
        pending.extend(result.remainders)
        state.p_good += result.overlap_probability
    state.env = pending


def _start(spec: ProblemSpec) -> ConditionalSearchState:
    spec.require_valid()
    spec.require_property_f()
    return ConditionalSearchState(env=[spec.full_environment()])


def _finish(state: ConditionalSearchState, interrupted: bool) -> ConditionalDecision:
    return ConditionalDecision(
        pairs=list(state.decisions),
        bad=list(state.bad),
        p_good=state.p_good,
        p_bad=state.p_bad,
        pending=list(state.env),
        iterations=state.iterations,
        interrupted=interrupted,
    )


def solve_conditional(
    spec: ProblemSpec,
    *,
    max_iterations: int | None = None,
    time_limit: float | None = None,
    should_stop: Callable[[], bool] | None = None,
    picker: str = "maxprob",
    progress: Callable[[dict], None] | None = None,
    on_iteration: Callable[[ConditionalSearchState], None] | None = None,
) -> ConditionalDecision:
    """Cover as much probability as possible with decision rules.

    Run to its natural end, the result is optimal: ``p_good`` is the
    probability that the actual problem is consistent and ``p_good + p_bad``
    is 1.  An interrupted run returns the rules found so far, which are sound,
    with the unprocessed environments in ``pending``.

    ``on_iteration`` receives the live state after every iteration.
    """
    if picker not in PICKERS:
        raise ValueError(f"unknown picker {picker!r}; expected one of {PICKERS}")
    state = _start(spec)
    net = Network(spec)
    start = time.monotonic()
    deadline = None if time_limit is None else start + time_limit
    interrupted = False

    while state.env:
        if (
            (max_iterations is not None and state.iterations >= max_iterations)
            or (deadline is not None and time.monotonic() >= deadline)
            or (should_stop is not None and should_stop())
        ):
            interrupted = True
            break
        i = _pick(state.env, picker)
        e = state.env[i]
        result = solve_mixed(spec, e, network=net)
        if not result.consistent:
            del state.env[i]
            state.bad.append(e)
            state.p_bad += e.probability
        else:
            wc = covered_environment(spec, result.decision)
            _cover(spec, state, result.decision, wc)
        state.iterations += 1
        if on_iteration is not None:
            on_iteration(state)
        if progress is not None:
            progress(
                {
                    "event": "iteration",
                    "p_good": state.p_good,
                    "p_bad": state.p_bad,
                    "iterations": state.iterations,
                    "elapsed_ms": (time.monotonic() - start) * 1000.0,
                }
            )
    return _finish(state, interrupted)


def replay_conditional(
    spec: ProblemSpec, forced_decisions: Sequence[DecisionLike]
) -> tuple[list[TraceStep], ConditionalDecision]:
    """Run the covering loop with the decisions supplied by the caller.

    The worklist is first-in first-out.  Environments the solver proves bad
    are classified as usual; whenever a decision is needed the next forced one
    is used.  The run stops when the worklist empties or the forced decisions
    run out.
    """
    state = _start(spec)
    net = Network(spec)
    forced = [spec.as_decision(d) for d in forced_decisions]
    trace: list[TraceStep] = []
    while state.env:
        e = state.env[0]
        if not solve_mixed(spec, e, network=net).consistent:
            state.env.pop(0)
            state.bad.append(e)
            state.p_bad += e.probability
            d = None
        else:
            if not forced:
                break
            d = forced.pop(0)
            wc = covered_environment(spec, d)
            if wc is None or wc.isdisjoint(e):
                raise ProblemError(
                    f"forced decision {spec.decision_dict(d)} covers no world of "
                    f"{spec.environment_dict(e)}"
                )
            _cover(spec, state, d, wc)
        state.iterations += 1
        trace.append(TraceStep(d, state.p_good, state.p_bad, tuple(state.env)))
    return trace, _finish(state, bool(state.env))


def lookup(cd: ConditionalDecision, w) -> Decision | None:
    """The decision for world ``w`` (a tuple in parameter order), or None."""
    return cd.lookup(tuple(w))

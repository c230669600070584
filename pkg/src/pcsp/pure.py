"""Depth-first branch and bound for the most probable pure decision.

Only decision variables are branched on.  Forward checking prunes the
parameter domains as well, and the probability of what is left (a product over
parameters of the remaining mass) bounds every decision below the node.  At a
leaf the bound equals the decision's success probability exactly.
"""

from __future__ import annotations

import math
import time
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

from .model import Decision, ProblemSpec
from .network import Domains, Network

ProgressSink = Callable[[dict], None]


@dataclass
class SearchOutcome:
    best: Decision | None
    best_ps: float
    proven_optimal: bool
    nodes_expanded: int
    interrupted: bool
    history: list[tuple[int, float]] = field(default_factory=list)


class BoundState:
    """Remaining probability mass per parameter and their product.

    The product is updated incrementally by the ratio of new to old mass of a
    narrowed parameter.  Backtracking restores a :meth:`snapshot`
    since a ratio cannot undo a zero.
    """

    def __init__(self, net: Network, domains: list[set[int]]):
        self.probs = net.probs
        self.masses = [self._mass(k, domains[k]) for k in range(net.n_params)]
        self.value = math.prod(self.masses)

    def _mass(self, k: int, values: set[int]) -> float:
        pr = self.probs[k]
        return math.fsum(pr[v] for v in values)

    def update(self, k: int, values: set[int]) -> None:
        old = self.masses[k]
        new = self._mass(k, values)
        self.masses[k] = new
        if old > 0.0:
            self.value = self.value * new / old
        elif new > 0.0:
            self.value = math.prod(self.masses)

    def snapshot(self) -> tuple[float, list[float]]:
        return self.value, list(self.masses)

    def restore(self, snap: tuple[float, list[float]]) -> None:
        self.value, masses = snap
        self.masses[:] = masses

    def full_product(self) -> float:
        return math.prod(self.masses)


def upper_bound(state: BoundState) -> float:
    return state.value


class _Engine:
    def __init__(self, spec: ProblemSpec):
        self.net = Network(spec)
        self.doms = Domains(self.net)
        self.bound = BoundState(self.net, self.doms.dom)
        self.doms.on_change = lambda u, old, new: self.bound.update(u, new)

    def alive(self) -> bool:
        net, dom = self.net, self.doms.dom
        return all(dom[u] for u in net.variables) and all(
            dom[k] for k in range(net.n_params)
        )


def partial_bound(spec: ProblemSpec, partial: Mapping[str, object]) -> BoundState | None:
    """Forward-check a partial decision (assigned in declaration order).

    Returns the resulting bound state, or None if some domain was wiped out.
    """
    eng = _Engine(spec)
    net = eng.net
    for u in net.variables:
        name = net.names[u]
        if name in partial:
            if not eng.doms.assign(u, net.values[u].index(partial[name])) or not eng.alive():
                return None
    return eng.bound


def search_optimal_pure(
    spec: ProblemSpec,
    *,
    max_nodes: int | None = None,
    time_limit: float | None = None,
    should_stop: Callable[[], bool] | None = None,
    progress: ProgressSink | None = None,
    smallest_domain_first: bool = False,
) -> SearchOutcome:
    """Anytime search for a decision maximising the probability of success.

    ``time_limit`` is in seconds.  An interrupted search returns its incumbent
    with ``proven_optimal`` False.  Among equally good decisions the first in
    lexicographic order (declaration order of values) is kept, unless
    ``smallest_domain_first`` reorders the branching.
    """
    spec.require_valid()
    spec.require_property_f()

    eng = _Engine(spec)
    net, doms, bound = eng.net, eng.doms, eng.bound
    n = len(net.names) - net.n_params
    start = time.monotonic()
    deadline = None if time_limit is None else start + time_limit

    alpha = 0.0
    best: Decision | None = None
    nodes = 0
    interrupted = False
    history: list[tuple[int, float]] = []

    def stop() -> bool:
        return (
            (max_nodes is not None and nodes >= max_nodes)
            or (deadline is not None and time.monotonic() >= deadline)
            or (should_stop is not None and should_stop())
        )

    def pick() -> int:
        free = [u for u in net.variables if not doms.assigned[u]]
        if smallest_domain_first:
            return min(free, key=lambda u: len(doms.dom[u]))
        return free[0]

    def search(i: int, p_i: float) -> None:
        nonlocal alpha, best, nodes, interrupted
        if interrupted or stop():
            interrupted = True
            return
        nodes += 1
        if i == n:
            alpha = p_i
            best = tuple(net.values[u][next(iter(doms.dom[u]))] for u in net.variables)
            history.append((nodes, alpha))
            if progress is not None:
                progress(
                    {
                        "event": "incumbent",
                        "incumbent_ps": alpha,
                        "p_bad": None,
                        "nodes": nodes,
                        "elapsed_ms": (time.monotonic() - start) * 1000.0,
                    }
                )
            return
        u = pick()
        for v in sorted(doms.dom[u]):
            mark = doms.mark()
            snap = bound.snapshot()
            ok = doms.assign(u, v)
            p_next = upper_bound(bound)
            if ok and p_next > alpha and eng.alive():
                search(i + 1, p_next)
            doms.undo(mark)
            bound.restore(snap)
            if interrupted:
                break

    if eng.alive():
        search(0, upper_bound(bound))
    return SearchOutcome(
        best=best,
        best_ps=alpha,
        proven_optimal=not interrupted,
        nodes_expanded=nodes,
        interrupted=interrupted,
        history=history,
    )

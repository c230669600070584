"""Backtracking with forward checking over the mixed network.

Parameters are handled as ordinary variables; an environment enters as unary
restrictions on their domains.  The search order is fixed: decision variables
first, then parameters, each in declaration order, values in domain order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Decision, Environment, ProblemError, ProblemSpec, World
from .network import Domains, Network


@dataclass(frozen=True)
class MixedAssignmentResult:
    consistent: bool
    world: World | None
    decision: Decision | None
    nodes_expanded: int


def solve_mixed(
    spec: ProblemSpec, env: Environment | None = None, *, network: Network | None = None
) -> MixedAssignmentResult:
    """Find the first (world, decision) with the world inside ``env``.

    ``env`` defaults to all worlds.  Complete: ``consistent`` is False only if
    no world of ``env`` is covered by any decision.
    """
    net = network if network is not None else Network(spec)
    initial = [set(range(len(v))) for v in net.values]
    if env is not None:
        if len(env.subsets) != net.n_params:
            raise ValueError("environment does not match the problem's parameters")
        for u, s in enumerate(env.subsets):
            initial[u] = {i for i, v in enumerate(net.values[u]) if v in s}
    order = list(net.variables) + list(range(net.n_params))
    doms = Domains(net, initial)
    nodes = 0

    if any(not d for d in doms.dom):
        return MixedAssignmentResult(False, None, None, 0)

    def search(depth: int) -> bool:
        nonlocal nodes
        nodes += 1
        if depth == len(order):
            return True
        u = order[depth]
        for v in sorted(doms.dom[u]):
            mark = doms.mark()
            if doms.assign(u, v) and search(depth + 1):
                return True
            doms.undo(mark)
        return False

    if not search(0):
        return MixedAssignmentResult(False, None, None, nodes)
    vals = [net.values[u][next(iter(doms.dom[u]))] for u in range(len(net.names))]
    return MixedAssignmentResult(
        True, tuple(vals[: net.n_params]), tuple(vals[net.n_params :]), nodes
    )


def solve_classical(spec: ProblemSpec) -> Decision | None:
    """Solve a problem with no parameters; None when inconsistent."""
    if spec.parameters:
        raise ProblemError("solve_classical expects a problem without parameters")
    result = solve_mixed(spec)
    return result.decision if result.consistent else None

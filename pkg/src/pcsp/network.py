"""Integer-indexed view of a problem with trailed domains and forward checking.

Unknown ``u`` in ``range(n_params)`` is a parameter and the rest are decision
variables, so ``spec.parameters + spec.variables`` gives the numbering.  Values
are positions in the declared domain.
"""

from __future__ import annotations

from .model import ProblemSpec


class Network:
    def __init__(self, spec: ProblemSpec):
        self.spec = spec
        self.n_params = len(spec.parameters)
        self.names = list(spec.parameter_names) + list(spec.variable_names)
        self.values = [p.values for p in spec.parameters] + [x.values for x in spec.variables]
        self.index = {n: i for i, n in enumerate(self.names)}
        self.probs = [p.probs for p in spec.parameters]
        self.scopes: list[tuple[int, ...]] = []
        self.tables: list[tuple[tuple[int, ...], ...]] = []
        self.table_sets: list[frozenset] = []
        self.watch: list[list[int]] = [[] for _ in self.names]
        for ci, c in enumerate(spec.constraints):
            scope = tuple(self.index[n] for n in c.scope)
            table = tuple(
                tuple(self.values[u].index(v) for u, v in zip(scope, t)) for t in c.allowed
            )
            self.scopes.append(scope)
            self.tables.append(table)
            self.table_sets.append(frozenset(table))
            for u in scope:
                self.watch[u].append(ci)

    @property
    def variables(self) -> range:
        return range(self.n_params, len(self.names))

    def is_param(self, u: int) -> bool:
        return u < self.n_params


class Domains:
    """Current domains with a trail for undo.

    ``on_change(u, old, new)`` fires for every narrowing of a parameter domain
    and is how the branch-and-bound keeps its probability mass current.
    """

    def __init__(self, net: Network, initial: list[set[int]] | None = None):
        self.net = net
        self.dom = initial if initial is not None else [set(range(len(v))) for v in net.values]
        self.assigned = [False] * len(net.names)
        self.trail: list[tuple[int, set[int] | None]] = []
        self.on_change = None

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            u, removed = self.trail.pop()
            if removed is None:
                self.assigned[u] = False
            else:
                old = self.dom[u]
                self.dom[u] = old | removed
                if self.on_change is not None and u < self.net.n_params:
                    self.on_change(u, old, self.dom[u])

    def narrow(self, u: int, keep: set[int]) -> bool:
        """Intersect the domain of ``u`` with ``keep``; False on wipe-out."""
        old = self.dom[u]
        removed = old - keep
        if removed:
            self.trail.append((u, removed))
            self.dom[u] = old - removed
            if self.on_change is not None and u < self.net.n_params:
                self.on_change(u, old, self.dom[u])
        return bool(self.dom[u])

    def assign(self, u: int, v: int) -> bool:
        """Fix ``u = v`` and forward-check every constraint on ``u``.

        For each such constraint the unassigned members keep only values that
        appear in some allowed tuple consistent with the current domains; with
        binary constraints this is plain forward checking.  A constraint whose
        scope becomes fully assigned is checked directly.
        """
        self.trail.append((u, None))
        self.assigned[u] = True
        if not self.narrow(u, {v}):
            return False
        net = self.net
        dom = self.dom
        for ci in net.watch[u]:
            scope = net.scopes[ci]
            future = [k for k, w in enumerate(scope) if not self.assigned[w]]
            if not future:
                if tuple(next(iter(dom[w])) for w in scope) not in net.table_sets[ci]:
                    return False
                continue
            support: list[set[int]] = [set() for _ in future]
            for t in net.tables[ci]:
                if all(t[k] in dom[w] for k, w in enumerate(scope)):
                    for j, k in enumerate(future):
                        support[j].add(t[k])
            for j, k in enumerate(future):
                if not self.narrow(scope[k], support[j]):
                    return False
        return True

"""Forward pruning: per-variable value graphs and fast query failure.

Sweeping variables parents-first, each variable gets a graph over its values
with one arc per adjacent pair of every table row whose condition is still
consistent with the surviving values of the parents.  A value survives when it
lies on some directed walk from the query's better-side value to the
worse-side value; an empty survivor set refutes the query outright, before any
search runs.  Arcs point from more preferred to less preferred, so walks trace
worsening trajectories.

Reachability uses plain breadth-first traversal: the arcs are unweighted, so
shortest-path machinery would buy nothing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .model import CPNet, Outcome

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class ValueGraph:
    """Directed graph over one variable's values, induced by consistent rows."""

    variable: str
    nodes: tuple[str, ...]
    arcs: tuple[tuple[str, str], ...]


@dataclass
class PruneResult:
    status: str
    pruned_domains: dict[str, tuple[str, ...]]
    failed_variable: str | None = None

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def value_graph(
    net: CPNet,
    variable: str,
    x: Outcome,
    y: Outcome,
    pruned_so_far: Mapping[str, Iterable[str]] | None = None,
) -> ValueGraph:
    """Build the value graph for ``variable``.

    A row contributes its adjacent-pair arcs iff every parent binding lies in
    that parent's surviving set (``pruned_so_far``; full domains by default).
    Only successive values of a row are connected, never the long jumps.
    """
    net._require_valid()
    var = net.variable(variable)
    surviving = {
        name: frozenset(values)
        for name, values in (pruned_so_far or {}).items()
    }
    arcs: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for cond, ranking in net.tables[variable].items():
        consistent = all(
            value in surviving.get(parent, frozenset(net.variable(parent).domain))
            for parent, value in zip(var.parents, cond)
        )
        if not consistent:
            continue
        for a, b in zip(ranking, ranking[1:]):
            if (a, b) not in seen:
                seen.add((a, b))
                arcs.append((a, b))
    order = {value: i for i, value in enumerate(var.domain)}
    arcs.sort(key=lambda arc: (order[arc[0]], order[arc[1]]))
    return ValueGraph(variable, var.domain, tuple(arcs))


def _reachable(start: str, edges: Mapping[str, list[str]]) -> set[str]:
    seen = {start}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in edges.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def forward_prune(net: CPNet, x: Outcome, y: Outcome) -> PruneResult:
    """Sweep the net in topological order, keeping for every variable only the
    values on some directed walk from x's value to y's value in its value
    graph.  An empty survivor set fails the query immediately at that
    variable; the surviving sets of processed parents feed each child's row
    consistency check.
    """
    net._require_valid()
    net.check_outcome(x)
    net.check_outcome(y)
    surviving: dict[str, tuple[str, ...]] = {}
    for name in net._topo:
        i = net.index(name)
        graph = value_graph(net, name, x, y, surviving)
        forward: dict[str, list[str]] = {}
        backward: dict[str, list[str]] = {}
        for a, b in graph.arcs:
            forward.setdefault(a, []).append(b)
            backward.setdefault(b, []).append(a)
        from_x = _reachable(x.values[i], forward)
        to_y = _reachable(y.values[i], backward)
        keep = tuple(v for v in graph.nodes if v in from_x and v in to_y)
        if not keep:
            return PruneResult(INFEASIBLE, surviving, failed_variable=name)
        surviving[name] = keep
    return PruneResult(FEASIBLE, surviving)

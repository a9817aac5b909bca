"""Catalog application: non-dominated fronts and dominance-layered sorting.

Rows with identical outcomes collapse to one representative (equal outcomes
never dominate each other).  Verdicts are memoized per ordered outcome pair,
and established dominances close transitively before any new search runs, so
a catalog rarely needs all pairwise comparisons.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .dsl import CatalogRow
from .model import CPNet, Outcome
from .search import BUDGET_EXHAUSTED, DOMINATES, NOT_DOMINATED, SearchConfig, dominates


@dataclass
class ParetoReport:
    nondominated: list[str]
    dominated: list[tuple[str, str]]  # (loser id, witness-winner id)
    undecided: list[tuple[str, str]]  # id pairs whose comparison ran out of budget
    comparisons_run: int


@dataclass
class _Memo:
    """Pairwise verdict cache with a transitive shortcut."""

    net: CPNet
    cfg: SearchConfig
    enabled: bool = True
    cache: dict[tuple[Outcome, Outcome], str] = field(default_factory=dict)
    better_than: dict[Outcome, set[Outcome]] = field(default_factory=dict)
    searches: int = 0

    def _known_chain(self, a: Outcome, b: Outcome) -> bool:
        seen = {a}
        queue = deque([a])
        while queue:
            node = queue.popleft()
            for nxt in self.better_than.get(node, ()):
                if nxt == b:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    def query(self, a: Outcome, b: Outcome) -> str:
        """Verdict kind for "a dominates b"."""
        if a == b:
            return NOT_DOMINATED
        key = (a, b)
        if self.enabled and key in self.cache:
            return self.cache[key]
        if self.enabled and self._known_chain(a, b):
            kind = DOMINATES
        else:
            kind = dominates(self.net, a, b, self.cfg).kind
            self.searches += 1
        if self.enabled:
            self.cache[key] = kind
            if kind == DOMINATES:
                self.better_than.setdefault(a, set()).add(b)
        return kind


def _group_rows(rows: list[CatalogRow]) -> tuple[list[Outcome], dict[Outcome, list[str]]]:
    """Unique outcomes in first-appearance order plus their member ids."""
    order: list[Outcome] = []
    members: dict[Outcome, list[str]] = {}
    for row in rows:
        if row.outcome not in members:
            members[row.outcome] = []
            order.append(row.outcome)
        members[row.outcome].append(row.identifier)
    return order, members


def pareto_front(
    net: CPNet,
    rows: list[CatalogRow],
    cfg: SearchConfig | None = None,
    use_cache: bool = True,
) -> ParetoReport:
    """Split catalog rows into non-dominated and dominated (with a witness
    winner per loser); comparisons that exhaust the budget leave their id
    pairs undecided rather than guessing.

    New rows are compared against the current non-dominated candidates first,
    which retires losers with the fewest searches.
    """
    net._require_valid()
    cfg = cfg or SearchConfig()
    memo = _Memo(net, cfg, enabled=use_cache)
    unique, members = _group_rows(rows)

    front: list[Outcome] = []
    beaten: dict[Outcome, Outcome] = {}  # loser -> winner
    unsettled: set[frozenset[Outcome]] = set()

    for candidate in unique:
        defeated = False
        for incumbent in list(front):
            verdict = memo.query(incumbent, candidate)
            if verdict == DOMINATES:
                beaten[candidate] = incumbent
                defeated = True
                break
            incumbent_lost = memo.query(candidate, incumbent)
            if incumbent_lost == DOMINATES:
                beaten[incumbent] = candidate
                front.remove(incumbent)
            elif BUDGET_EXHAUSTED in (verdict, incumbent_lost):
                unsettled.add(frozenset((incumbent, candidate)))
        if not defeated:
            front.append(candidate)

    # A loser settled elsewhere no longer leaves a pair open.
    open_pairs = {
        pair for pair in unsettled if not any(o in beaten for o in pair)
    }
    blocked = {o for pair in open_pairs for o in pair}

    nondominated: list[str] = []
    dominated: list[tuple[str, str]] = []
    undecided: list[tuple[str, str]] = []
    for outcome in unique:
        ids = members[outcome]
        if outcome in beaten:
            winner_id = members[beaten[outcome]][0]
            dominated.extend((loser, winner_id) for loser in ids)
        elif outcome not in blocked:
            nondominated.extend(ids)
    for pair in sorted(open_pairs, key=lambda p: sorted(members[o][0] for o in p)):
        a, b = sorted(pair, key=lambda o: members[o][0])
        undecided.append((members[a][0], members[b][0]))
    return ParetoReport(nondominated, dominated, undecided, memo.searches)


def sort_catalog(
    net: CPNet,
    rows: list[CatalogRow],
    cfg: SearchConfig | None = None,
) -> list[list[str]]:
    """Topological layering of the catalog's dominance DAG.

    Layer 0 holds the non-dominated rows; a row lands in the first layer above
    every row that dominates it.  Ties within a layer are ordered by id.
    Comparisons the budget cut off are treated as non-dominating.
    """
    net._require_valid()
    cfg = cfg or SearchConfig()
    memo = _Memo(net, cfg)
    unique, members = _group_rows(rows)

    dominators: dict[Outcome, list[Outcome]] = {o: [] for o in unique}
    for a in unique:
        for b in unique:
            if a is not b and memo.query(a, b) == DOMINATES:
                dominators[b].append(a)

    layer_of: dict[Outcome, int] = {}
    remaining = list(unique)
    while remaining:
        placed_any = False
        for outcome in list(remaining):
            if all(d in layer_of for d in dominators[outcome]):
                layer_of[outcome] = (
                    max((layer_of[d] for d in dominators[outcome]), default=-1) + 1
                )
                remaining.remove(outcome)
                placed_any = True
        if not placed_any:  # cannot happen on acyclic dominance, defensive
            for outcome in remaining:
                layer_of[outcome] = max(layer_of.values(), default=-1) + 1
            break

    depth = max(layer_of.values(), default=-1) + 1
    layers: list[list[str]] = [[] for _ in range(depth)]
    for outcome, layer in layer_of.items():
        layers[layer].extend(members[outcome])
    for bucket in layers:
        bucket.sort()
    return layers

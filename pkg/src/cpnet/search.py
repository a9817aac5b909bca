"""Dominance queries as search over improving/worsening flip trees.

The engine answers "does the net entail x > y?" by depth-first search for a
flipping sequence, either upward from y (improving), downward from x
(worsening), or both at once with a deterministic strict alternation that
concludes when the two frontiers meet.

Completeness-preserving machinery:

* suffix fixing    - variables in a descendant-closed set that already match
                     the target are never flipped below the current node;
* suffix extension - a flip onto the target value of a variable whose
                     descendants are all fixed is committed, never revisited;
* rightmost        - candidate flips are tried latest-in-topological-order
                     first (a least-commitment order);
* least improving  - among targets of one variable, the smallest step first.

On nets where every variable is binary and has at most one parent, the
rightmost choice (with both suffix rules active) is itself safe to commit:
search on chains and trees of binary variables then proceeds without
backtracking, and the brute-force oracle in this module is the reference
that the test suite checks this against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .model import (
    IMPROVING,
    WORSENING,
    CPNet,
    CPNetError,
    Flip,
    FlipSequence,
    Outcome,
    _parent_key,
    _targets,
)

BIDIRECTIONAL = "bidirectional"

DOMINATES = "dominates"
NOT_DOMINATED = "not_dominated"
BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class SearchConfig:
    """Query-time knobs; the defaults enable everything the engine has."""

    direction: str = BIDIRECTIONAL
    suffix_fixing: bool = True
    suffix_extension: bool = True
    rightmost: bool = True
    least_improving: bool = True
    visited_dedup: bool = True
    budget: int | None = None
    want_witness: bool = True

    def __post_init__(self) -> None:
        if self.direction not in (IMPROVING, WORSENING, BIDIRECTIONAL):
            raise CPNetError(f"unknown direction {self.direction!r}")
        if self.budget is not None and self.budget < 1:
            raise CPNetError("budget must be at least 1 when bounded")


@dataclass
class SearchStats:
    expansions: int = 0
    backtracks: int = 0
    direction_decided: str = "none"


@dataclass
class Verdict:
    """Result of a dominance query.

    ``not_dominated`` is only ever produced by an exhaustive search; running
    out of budget yields ``budget_exhausted`` instead.
    """

    kind: str
    witness: FlipSequence | None = None
    stats: SearchStats = field(default_factory=SearchStats)


@dataclass(frozen=True)
class SuffixSet:
    """A descendant-closed set of variables (every child of a member is a member)."""

    variables: frozenset[str]


def fixed_suffix(net: CPNet, z: Outcome, x: Outcome) -> SuffixSet:
    """The maximal descendant-closed set on which ``z`` already matches ``x``.

    Greatest fixpoint: walking variables children-before-parents, admit any
    variable that matches and whose children were all admitted.
    """
    net._require_valid()
    members = _fixed_suffix_idx(net, z.values, x.values)
    return SuffixSet(frozenset(net.variables[i].name for i in members))


def _fixed_suffix_idx(net: CPNet, z: tuple[str, ...], x: tuple[str, ...]) -> set[int]:
    members: set[int] = set()
    for i in reversed(net._topo_idx):
        if z[i] == x[i] and all(c in members for c in net._children_idx[i]):
            members.add(i)
    return members


def _suffix_and_extension(
    net: CPNet,
    z: tuple[str, ...],
    x: tuple[str, ...],
    direction: str,
    want_extension: bool,
) -> tuple[set[int], tuple[int, str] | None]:
    """One children-before-parents pass: the fixed suffix plus, when asked,
    the rightmost extension flip (membership of every descendant is already
    final when its ancestor is visited)."""
    members: set[int] = set()
    extension: tuple[int, str] | None = None
    children = net._children_idx
    for i in reversed(net._topo_idx):
        if all(c in members for c in children[i]):
            if z[i] == x[i]:
                members.add(i)
            elif (
                want_extension
                and extension is None
                and x[i] in _targets(net, z, i, direction)
            ):
                extension = (i, x[i])
    return members, extension


def extend_suffix(
    net: CPNet, z: Outcome, x: Outcome, suffix: SuffixSet, direction: str
) -> Flip | None:
    """A committed move next to the suffix, if one exists: a legal flip that
    sets some variable outside the suffix, all of whose descendants are fixed,
    to its target value."""
    net._require_valid()
    members = {net._index[name] for name in suffix.variables}
    found = _extension_idx(net, z.values, x.values, members, direction)
    if found is None:
        return None
    var_i, target = found
    return Flip(net.variables[var_i].name, z.values[var_i], target, direction)


def _extension_idx(
    net: CPNet,
    z: tuple[str, ...],
    x: tuple[str, ...],
    members: set[int],
    direction: str,
) -> tuple[int, str] | None:
    # Scan rightmost-first so the pick is deterministic and matches the
    # engine's preferred expansion order.
    for name in reversed(net._topo):
        i = net._index[name]
        if i in members or z[i] == x[i]:
            continue
        if not all(c in members for c in net._children_idx[i]):
            continue
        if x[i] in _targets(net, z, i, direction):
            return i, x[i]
    return None


def order_flips(
    net: CPNet,
    z: Outcome,
    candidates: list[Flip],
    x: Outcome,
    cfg: SearchConfig,
) -> list[Flip]:
    """Deterministic candidate order: rightmost variable first (declaration
    order when the heuristic is off), then least-improving target within a
    variable (most-improving when off)."""
    net._require_valid()
    keyed = [(_flip_sort_key(net, z.values, f.variable, f.to_value, cfg), f) for f in candidates]
    keyed.sort(key=lambda pair: pair[0])
    return [f for _, f in keyed]


def _flip_sort_key(
    net: CPNet,
    z: tuple[str, ...],
    variable: str,
    to_value: str,
    cfg: SearchConfig,
) -> tuple[int, int]:
    i = net._index[variable]
    pos = net._topo_pos[variable]
    primary = -pos if cfg.rightmost else pos
    ranking = net.tables[variable][_parent_key(net, z, i)]
    rank = ranking.index(to_value)
    # Improving targets sit above the current value: a LARGER rank index is a
    # smaller improvement.  Worsening targets sit below: a smaller index is a
    # smaller worsening step.  Both reduce to "prefer the target nearest the
    # current value" when the heuristic is on, the farthest when off.
    current = ranking.index(z[i])
    distance = abs(rank - current)
    secondary = distance if cfg.least_improving else -distance
    return (primary, secondary)


# -- brute-force oracle ----------------------------------------------------


def _space_size(net: CPNet) -> int:
    size = 1
    for v in net.variables:
        size *= len(v.domain)
    return size


def all_outcomes(net: CPNet) -> list[Outcome]:
    """Every outcome of the net, in lexicographic declaration order."""
    net._require_valid()
    return [Outcome(values) for values in itertools.product(*(v.domain for v in net.variables))]


def _improving_children(net: CPNet, values: tuple[str, ...]) -> list[tuple[str, ...]]:
    children = []
    for i in range(len(values)):
        for target in _targets(net, values, i, IMPROVING):
            child = list(values)
            child[i] = target
            children.append(tuple(child))
    return children


def oracle_dominates(net: CPNet, x: Outcome, y: Outcome, cap: int = 2**16) -> bool:
    """Reference answer: breadth-first reachability from ``y`` to ``x`` over
    the complete one-improving-flip graph.  Exhaustive, so only usable while
    the outcome space stays at or below ``cap``."""
    net._require_valid()
    net.check_outcome(x)
    net.check_outcome(y)
    if _space_size(net) > cap:
        raise CPNetError(f"outcome space exceeds oracle cap {cap}")
    if x == y:
        return False
    frontier = [y.values]
    seen = {y.values}
    while frontier:
        nxt: list[tuple[str, ...]] = []
        for values in frontier:
            for child in _improving_children(net, values):
                if child == x.values:
                    return True
                if child not in seen:
                    seen.add(child)
                    nxt.append(child)
        frontier = nxt
    return False


def oracle_closure(net: CPNet, cap: int = 2**16) -> dict[Outcome, frozenset[Outcome]]:
    """For every outcome, the set of strictly better outcomes it can reach.
    Convenience wrapper over the same graph the oracle walks."""
    net._require_valid()
    if _space_size(net) > cap:
        raise CPNetError(f"outcome space exceeds oracle cap {cap}")
    outcomes = all_outcomes(net)
    adjacency = {o.values: _improving_children(net, o.values) for o in outcomes}
    closure: dict[Outcome, frozenset[Outcome]] = {}
    for o in outcomes:
        seen: set[tuple[str, ...]] = set()
        frontier = [o.values]
        while frontier:
            nxt = []
            for values in frontier:
                for child in adjacency[values]:
                    if child not in seen:
                        seen.add(child)
                        nxt.append(child)
            frontier = nxt
        seen.discard(o.values)
        closure[o] = frozenset(Outcome(v) for v in seen)
    return closure


# -- witness checking --------------------------------------------------------


def verify_witness(net: CPNet, x: Outcome, y: Outcome, seq: FlipSequence) -> bool:
    """True iff ``seq`` proves x > y: an improving chain from y to x, or the
    worsening mirror from x to y.  The empty sequence proves nothing."""
    net._require_valid()
    if not seq.flips:
        return False
    if seq.start == y and _replays(net, seq, IMPROVING, x):
        return True
    if seq.start == x and _replays(net, seq, WORSENING, y):
        return True
    return False


def _replays(net: CPNet, seq: FlipSequence, direction: str, goal: Outcome) -> bool:
    values = seq.start.values
    if len(values) != len(net.variables):
        return False
    seen = {values}
    for flip in seq.flips:
        if flip.variable not in net._index:
            return False
        i = net._index[flip.variable]
        if values[i] != flip.from_value:
            return False
        if flip.to_value not in _targets(net, values, i, direction):
            return False
        nxt = list(values)
        nxt[i] = flip.to_value
        values = tuple(nxt)
        if values in seen:
            return False
        seen.add(values)
    return values == goal.values


# -- the engine --------------------------------------------------------------


class _Frame:
    __slots__ = ("node", "children", "idx", "failed")

    def __init__(self, node: tuple[str, ...], children: list[tuple[int, str]]):
        self.node = node
        self.children = children  # (variable index, target value)
        self.idx = 0
        self.failed = False  # a tried child's subtree was exhausted


_FOUND = "found"
_EXHAUSTED = "exhausted"
_EXPANDED = "expanded"


class _Searcher:
    """One direction of the search: DFS from ``root`` toward ``target``."""

    def __init__(
        self,
        net: CPNet,
        root: tuple[str, ...],
        target: tuple[str, ...],
        direction: str,
        cfg: SearchConfig,
        committed: bool,
    ):
        self.net = net
        self.root = root
        self.target = target
        self.direction = direction
        self.cfg = cfg
        self.committed = committed
        self.track_paths = cfg.want_witness
        self.visited: set[tuple[str, ...]] = {root}
        self.came_from: dict[tuple[str, ...], tuple[tuple[str, ...], int, str]] = {}
        self.stack: list[_Frame] = [_Frame(root, self._candidates(root))]
        self.expansions = 1  # the root expansion above
        self.backtracks = 0
        self.hit: tuple[str, ...] | None = None

    def _candidates(self, node: tuple[str, ...]) -> list[tuple[int, str]]:
        net, cfg = self.net, self.cfg
        suffix: set[int] = set()
        if cfg.suffix_fixing or cfg.suffix_extension:
            suffix, extension = _suffix_and_extension(
                net, node, self.target, self.direction, cfg.suffix_extension
            )
            if cfg.suffix_extension and extension is not None:
                return [extension]
            if not cfg.suffix_fixing:
                suffix = set()
        flips: list[tuple[int, str]] = []
        for i in range(len(node)):
            if i in suffix:
                continue
            for target in _targets(net, node, i, self.direction):
                flips.append((i, target))
        if len(flips) > 1:
            flips.sort(
                key=lambda f: _flip_sort_key(
                    net, node, net.variables[f[0]].name, f[1], cfg
                )
            )
        if self.committed:
            return flips[:1]
        return flips

    def advance(self, other_visited: set[tuple[str, ...]] | None) -> str:
        """Run until one node gets expanded, the target (or the other
        frontier) is hit, or this side's space is exhausted."""
        while True:
            if not self.stack:
                return _EXHAUSTED
            frame = self.stack[-1]
            pushed = False
            while frame.idx < len(frame.children):
                var_i, value = frame.children[frame.idx]
                frame.idx += 1
                child = list(frame.node)
                child[var_i] = value
                child_t = tuple(child)
                is_new = child_t not in self.visited
                hit = child_t == self.target or (
                    other_visited is not None and child_t in other_visited
                )
                if not is_new and self.cfg.visited_dedup and not hit:
                    continue  # silent dedup skip, not a tried sibling
                if frame.failed:
                    self.backtracks += 1
                    frame.failed = False
                if is_new:
                    self.visited.add(child_t)
                    if self.track_paths:
                        self.came_from[child_t] = (frame.node, var_i, value)
                if hit:
                    self.hit = child_t
                    return _FOUND
                self.stack.append(_Frame(child_t, self._candidates(child_t)))
                self.expansions += 1
                pushed = True
                break
            if pushed:
                return _EXPANDED
            self.stack.pop()
            if self.stack:
                self.stack[-1].failed = True

    def path_to(self, node: tuple[str, ...]) -> list[tuple[tuple[str, ...], int, str]]:
        """Flip steps from the root to ``node`` via first-discovery parents."""
        steps = []
        cursor = node
        while cursor != self.root:
            prev, var_i, value = self.came_from[cursor]
            steps.append((prev, var_i, value))
            cursor = prev
        steps.reverse()
        return steps


def _witness_from_steps(
    net: CPNet,
    start: tuple[str, ...],
    steps: list[tuple[tuple[str, ...], int, str]],
    direction: str,
) -> FlipSequence:
    flips = [
        Flip(net.variables[var_i].name, prev[var_i], value, direction)
        for prev, var_i, value in steps
    ]
    return FlipSequence(Outcome(start), tuple(flips))


def dominates(net: CPNet, x: Outcome, y: Outcome, cfg: SearchConfig | None = None) -> Verdict:
    """Decide whether the net entails x > y.

    Improving search walks from y toward x, worsening from x toward y, and
    bidirectional mode alternates one expansion per side, concluding as soon
    as either side finishes or the frontiers meet (meeting at z gives
    x > z > y, hence x > y; the witnesses are spliced at z).
    """
    net._require_valid()
    net.check_outcome(x)
    net.check_outcome(y)
    cfg = cfg or SearchConfig()

    stats = SearchStats()
    if x == y:
        return Verdict(NOT_DOMINATED, stats=stats)

    # On binary nets where no variable has two parents, the first-ordered
    # move under the full rule set never needs reconsidering, so each node
    # keeps a single child and chains/trees search backtrack-free.
    committed = (
        cfg.rightmost
        and cfg.suffix_fixing
        and cfg.suffix_extension
        and net._single_parent_binary
    )

    searchers: list[_Searcher] = []
    if cfg.direction in (IMPROVING, BIDIRECTIONAL):
        searchers.append(_Searcher(net, y.values, x.values, IMPROVING, cfg, committed))
    if cfg.direction in (WORSENING, BIDIRECTIONAL):
        searchers.append(_Searcher(net, x.values, y.values, WORSENING, cfg, committed))
    bidirectional = len(searchers) == 2

    def snapshot(decided: str) -> SearchStats:
        stats.expansions = sum(s.expansions for s in searchers)
        stats.backtracks = sum(s.backtracks for s in searchers)
        stats.direction_decided = decided
        return stats

    def build_witness(side: _Searcher) -> FlipSequence | None:
        if not cfg.want_witness:
            return None
        meet = side.hit
        assert meet is not None
        if not bidirectional or meet == side.target:
            steps = side.path_to(meet)
            return _witness_from_steps(net, side.root, steps, side.direction)
        # Frontier meeting: improving path y -> meet plus the reverse of the
        # worsening path x -> meet, emitted as one improving chain y -> x.
        improving = searchers[0]
        worsening = searchers[1]
        up = improving.path_to(meet)
        down = worsening.path_to(meet)
        flips = [
            Flip(net.variables[var_i].name, prev[var_i], value, IMPROVING)
            for prev, var_i, value in up
        ]
        cursor = meet
        for prev, var_i, value in reversed(down):
            flips.append(Flip(net.variables[var_i].name, cursor[var_i], prev[var_i], IMPROVING))
            cursor = prev
        return FlipSequence(Outcome(y.values), tuple(flips))

    active = 0
    total = sum(s.expansions for s in searchers)
    while True:
        side = searchers[active]
        other = searchers[1 - active].visited if bidirectional else None
        if cfg.budget is not None and total >= cfg.budget:
            return Verdict(BUDGET_EXHAUSTED, stats=snapshot("none"))
        outcome = side.advance(other)
        if outcome == _EXPANDED:
            total += 1
        if outcome == _FOUND:
            witness = build_witness(side)
            return Verdict(DOMINATES, witness=witness, stats=snapshot(side.direction))
        if outcome == _EXHAUSTED:
            return Verdict(NOT_DOMINATED, stats=snapshot(side.direction))
        if bidirectional:
            active = 1 - active

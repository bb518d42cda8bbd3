"""
Shortest-path search over the SPN state space, resumable across extensions.

The search is Dijkstra (or A* with an admissible, consistent heuristic) with
lazy deletion. A popped goal marking is closed but *parked* instead of
expanded; when the SPN grows, ``reseed_after_extension`` puts parked goals
back on the frontier and relaxes the new transitions from every closed
marking that enables them. New transitions only consume the previous last
trace place, so every edge out of an expanded marking is already known and
closed distances stay exact.
"""

import heapq
from dataclasses import dataclass, field, replace
from enum import StrEnum

from prefixalign import config
from prefixalign.alignment import Move, PrefixAlignment, SynchronousProduct, is_final, is_goal
from prefixalign.exceptions import ConsistencyError, SearchError, SearchLimitError
from prefixalign.petri import Marking


class Heuristic(StrEnum):
    ZERO = "zero"
    UNMATCHED_LABEL_BOUND = "unmatched_label_bound"


PREFIX = "prefix"
FULL = "full"


@dataclass(frozen=True)
class SearchRecord:
    g: int
    parent: Marking | None = None
    via: Move | None = None
    closed: bool = False


@dataclass
class SearchStats:
    expanded: int = 0
    queued: int = 0
    reopened: int = 0
    searches: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "expanded": self.expanded,
            "queued": self.queued,
            "reopened": self.reopened,
            "searches": self.searches,
        }


@dataclass
class SearchState:
    """Everything a case keeps between searches.

    ``frontier`` entries are ``(f, -g, tie, marking)``: lowest f first, then
    the deeper state, then insertion order.
    """

    heuristic: Heuristic = Heuristic.ZERO
    max_records: int = config.DEFAULT_MAX_RECORDS
    mode: str = PREFIX
    goal_generation: int = 0
    records: dict[Marking, SearchRecord] = field(default_factory=dict)
    frontier: list[tuple[int, int, int, Marking]] = field(default_factory=list)
    parked: list[Marking] = field(default_factory=list)
    pending: list[int] = field(default_factory=list)
    by_position: dict[int, list[Marking]] = field(default_factory=dict)
    stats: SearchStats = field(default_factory=SearchStats)
    # Goal marking behind the most recently returned alignment.
    last_goal: Marking | None = None
    _tie: int = 0
    _h_suffix: list[int] = field(default_factory=list)

    @classmethod
    def start(
        cls,
        spn: SynchronousProduct,
        heuristic: Heuristic = Heuristic.ZERO,
        max_records: int | None = None,
        mode: str = PREFIX,
    ) -> "SearchState":
        """Fresh state with only the SPN's initial marking on the frontier."""
        state = cls(
            heuristic=Heuristic(heuristic),
            max_records=max_records or config.MAX_RECORDS,
            mode=mode,
            goal_generation=spn.trace_len,
        )
        _refresh_estimates(state, spn)
        initial = spn.initial_marking
        state.records[initial] = SearchRecord(0)
        state.by_position.setdefault(spn.position_of(initial), []).append(initial)
        _push(state, spn, initial, 0)
        return state

    def clone(self) -> "SearchState":
        """Value copy; records and markings are immutable and can be shared."""
        return SearchState(
            heuristic=self.heuristic,
            max_records=self.max_records,
            mode=self.mode,
            goal_generation=self.goal_generation,
            records=dict(self.records),
            frontier=list(self.frontier),
            parked=list(self.parked),
            pending=list(self.pending),
            by_position={k: list(v) for k, v in self.by_position.items()},
            stats=replace(self.stats),
            last_goal=self.last_goal,
            _tie=self._tie,
            _h_suffix=list(self._h_suffix),
        )


# ---------------------------------------------------------------------------
# Heuristic
# ---------------------------------------------------------------------------


def _refresh_estimates(state: SearchState, spn: SynchronousProduct) -> None:
    """Suffix counts of trace activities that label no model transition."""
    n = spn.trace_len
    suffix = [0] * (n + 1)
    if state.heuristic is Heuristic.UNMATCHED_LABEL_BOUND:
        known = spn.model.activities
        for i in range(n - 1, -1, -1):
            suffix[i] = suffix[i + 1] + (0 if spn.trace[i] in known else 1)
    state._h_suffix = suffix


def estimate(heuristic: Heuristic, spn: SynchronousProduct, marking: Marking) -> int:
    """Admissible lower bound on the remaining cost to a prefix goal."""
    if heuristic is Heuristic.ZERO:
        return 0
    known = spn.model.activities
    position = spn.position_of(marking)
    return sum(1 for a in spn.trace[position:] if a not in known)


def _h(state: SearchState, spn: SynchronousProduct, marking: Marking) -> int:
    if state.heuristic is Heuristic.ZERO:
        return 0
    return state._h_suffix[spn.position_of(marking)]


# ---------------------------------------------------------------------------
# Core loop
# ---------------------------------------------------------------------------


def _push(state: SearchState, spn: SynchronousProduct, marking: Marking, g: int) -> None:
    state._tie += 1
    heapq.heappush(state.frontier, (g + _h(state, spn, marking), -g, state._tie, marking))
    state.stats.queued += 1


def _relax(
    state: SearchState, spn: SynchronousProduct, marking: Marking, g: int, t: int
) -> None:
    move = spn.move_of[t]
    succ = spn.net.successor(marking, t)
    ng = g + move.cost
    rec = state.records.get(succ)
    if rec is not None and ng >= rec.g:
        return
    if rec is None:
        if len(state.records) >= state.max_records:
            raise SearchLimitError(
                f"[ERROR] Search state exceeded {state.max_records} markings.",
                limit=state.max_records,
            )
        state.by_position.setdefault(spn.position_of(succ), []).append(succ)
    elif rec.closed:
        if state.heuristic is Heuristic.ZERO:
            raise SearchError(
                f"[ERROR] Closed marking {succ.render(spn.net)} improved from {rec.g} to {ng}."
            )
        state.stats.reopened += 1
    state.records[succ] = SearchRecord(ng, marking, move, False)
    _push(state, spn, succ, ng)


def _expand(state: SearchState, spn: SynchronousProduct, marking: Marking, g: int) -> None:
    state.stats.expanded += 1
    for t in spn.net.enabled_transitions(marking):
        _relax(state, spn, marking, g, t)


def _run(state: SearchState, spn: SynchronousProduct) -> PrefixAlignment:
    goal = is_final if state.mode == FULL else is_goal
    state.stats.searches += 1
    frontier = state.frontier
    records = state.records
    while frontier:
        _, neg_g, _, marking = heapq.heappop(frontier)
        rec = records[marking]
        if rec.closed or -neg_g > rec.g:
            continue
        records[marking] = replace(rec, closed=True)
        if goal(spn, marking):
            state.parked.append(marking)
            state.last_goal = marking
            alignment = reconstruct(state, marking, spn)
            if config.DEBUG_CHECKS:
                replay_check(spn, alignment, state.mode)
            return alignment
        _expand(state, spn, marking, rec.g)
    raise SearchError(
        f"[ERROR] No {state.mode} goal reachable for trace of length {spn.trace_len}.",
        recovery_hint="The model may not be sound (final marking unreachable).",
    )


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def shortest_path(
    spn: SynchronousProduct,
    mode: str = PREFIX,
    heuristic: Heuristic = Heuristic.ZERO,
    max_records: int | None = None,
) -> PrefixAlignment:
    """From-scratch optimal (prefix-)alignment; the oracle for incremental runs."""
    state = SearchState.start(spn, heuristic, max_records, mode)
    return _run(state, spn)


def search(state: SearchState, spn: SynchronousProduct) -> PrefixAlignment:
    """Run a started state to its first goal without any extension step."""
    if state.goal_generation != spn.trace_len:
        raise SearchError(
            f"[ERROR] Search state is at generation {state.goal_generation}, "
            f"SPN at {spn.trace_len}."
        )
    return _run(state, spn)


def continue_search(
    state: SearchState, spn: SynchronousProduct, new_transitions: list[int]
) -> PrefixAlignment:
    """Resume after ``spn`` grew by one activity; returns the new optimal prefix-alignment."""
    if state.mode != PREFIX:
        raise SearchError("[ERROR] Only prefix searches can be continued.")
    if state.goal_generation != spn.trace_len - 1:
        raise SearchError(
            f"[ERROR] Search state is at generation {state.goal_generation}, "
            f"expected {spn.trace_len - 1} for the extended SPN."
        )
    reseed_after_extension(state, spn, new_transitions)
    state.goal_generation = spn.trace_len
    return _run(state, spn)


def defer_extension(state: SearchState, spn: SynchronousProduct, new_transitions: list[int]) -> None:
    """Record an extension answered without searching (direct synchronizing).

    The transitions are reseeded by the next ``continue_search``.
    """
    if state.goal_generation != spn.trace_len - 1:
        raise SearchError(
            f"[ERROR] Cannot defer: state at generation {state.goal_generation}, "
            f"SPN at {spn.trace_len}."
        )
    state.pending.extend(new_transitions)
    state.goal_generation = spn.trace_len


def reseed_after_extension(
    state: SearchState, spn: SynchronousProduct, new_transitions: list[int]
) -> None:
    transitions = state.pending + list(new_transitions)
    state.pending = []
    parked = set(state.parked)
    _refresh_estimates(state, spn)

    # (a) closed, already expanded markings that enable a new transition
    positions = {
        spn.move_of[t].position - 1 for t in transitions if spn.move_of[t].position is not None
    }
    for position in sorted(positions):
        for marking in list(state.by_position.get(position, ())):
            rec = state.records[marking]
            if not rec.closed or marking in parked:
                continue
            for t in transitions:
                if spn.net.enabled(marking, t):
                    _relax(state, spn, marking, rec.g, t)

    # (b) previous goals continue past the old last trace place
    for marking in state.parked:
        rec = state.records[marking]
        state.records[marking] = replace(rec, closed=False)
        _push(state, spn, marking, rec.g)
    state.parked = []

    # (c) goal-dependent estimates changed with the trace
    if state.heuristic is not Heuristic.ZERO:
        live: dict[Marking, tuple[int, int, int, Marking]] = {}
        for _, neg_g, tie, marking in state.frontier:
            rec = state.records[marking]
            if rec.closed or -neg_g != rec.g or marking in live:
                continue
            live[marking] = (rec.g + _h(state, spn, marking), neg_g, tie, marking)
        state.frontier = list(live.values())
        heapq.heapify(state.frontier)


def reconstruct(state: SearchState, goal: Marking, spn: SynchronousProduct) -> PrefixAlignment:
    """Walk parent links from ``goal`` back to the initial marking."""
    rec = state.records.get(goal)
    if rec is None:
        raise SearchError(f"[ERROR] Marking {goal.render(spn.net)} was never reached.")
    if not rec.closed:
        raise SearchError(f"[ERROR] Marking {goal.render(spn.net)} is not closed.")
    moves: list[Move] = []
    node = rec
    while node.parent is not None:
        if node.via is None:
            raise ConsistencyError("[ERROR] Search record has a parent but no move.")
        moves.append(node.via)
        node = state.records[node.parent]
    moves.reverse()
    alignment = PrefixAlignment(tuple(moves))
    if alignment.total_cost != rec.g:
        raise ConsistencyError(
            f"[ERROR] Reconstructed cost {alignment.total_cost} differs from g={rec.g}."
        )
    return alignment


def replay_check(spn: SynchronousProduct, alignment: PrefixAlignment, mode: str = PREFIX) -> None:
    """Fire the alignment's transitions in ``spn``; raise unless it reaches a goal."""
    marking = spn.initial_marking
    for i, t in enumerate(alignment.transition_projection()):
        if not spn.net.enabled(marking, t):
            raise ConsistencyError(f"[ERROR] Alignment move {i} is not firable.")
        marking = spn.net.successor(marking, t)
    reached = is_final(spn, marking) if mode == FULL else is_goal(spn, marking)
    if not reached:
        raise ConsistencyError("[ERROR] Alignment does not end in a goal marking.")
    if alignment.activity_projection() != spn.trace:
        raise ConsistencyError("[ERROR] Alignment does not project onto the trace.")

"""
Direct synchronizing: answer an event without searching when the previous
optimal prefix-alignment can be extended by one enabled synchronous move.
"""

from dataclasses import dataclass

from prefixalign.alignment import MoveKind, PrefixAlignment, SynchronousProduct
from prefixalign.exceptions import ConsistencyError, FiringError
from prefixalign.petri import Marking
from prefixalign.search import SearchState

# (alignment, marking reached by firing it); valid only while ``alignment``
# is the very object the aggregate holds.
EndMarking = tuple[PrefixAlignment, Marking]


@dataclass
class Snapshot:
    """A case's search results at one prefix, detached from any live aggregate."""

    spn: SynchronousProduct
    search: SearchState
    alignment: PrefixAlignment
    end_marking: EndMarking | None = None

    @property
    def prefix(self) -> tuple[str, ...]:
        return tuple(self.spn.trace)

    def is_consistent(self) -> bool:
        return self.search.goal_generation == self.spn.trace_len and len(
            self.alignment.activity_projection()
        ) == self.spn.trace_len

    def clone(self) -> "Snapshot":
        return Snapshot(self.spn.clone(), self.search.clone(), self.alignment, self.end_marking)


def replay_to_marking(spn: SynchronousProduct, alignment: PrefixAlignment) -> Marking:
    """Fire the alignment's SPN transitions from the initial marking."""
    marking = spn.initial_marking
    for i, t in enumerate(alignment.transition_projection()):
        if t >= len(spn.net.transitions) or not spn.net.enabled(marking, t):
            raise FiringError(
                f"[ERROR] Alignment move {i} cannot fire at {marking.render(spn.net)}.",
                transition=spn.net.transitions[t].name if t < len(spn.net.transitions) else None,
                index=i,
            )
        marking = spn.net.successor(marking, t)
    return marking


def _previous_end(agg) -> Marking:
    known = agg.end_marking
    if known is not None and known[0] is agg.alignment:
        return known[1]
    try:
        return replay_to_marking(agg.spn, agg.alignment)
    except FiringError as e:
        raise ConsistencyError(
            f"[ERROR] Previous alignment of case {getattr(agg, 'case_id', '?')} "
            f"is not replayable: {e}"
        ) from e


def try_direct_synchronize(agg, activity: str) -> PrefixAlignment | None:
    """Extend ``agg.alignment`` by a synchronous move on ``activity``, or return None.

    ``agg.spn`` must already hold ``activity`` as its last trace position.
    The first enabled synchronous transition in id order wins. The previous
    alignment is only replayed when ``agg.end_marking`` does not already
    belong to it; on success ``agg.end_marking`` is set for the result.
    """
    spn: SynchronousProduct = agg.spn
    if spn.trace_len == 0 or spn.trace[-1] != activity:
        raise ConsistencyError(
            f"[ERROR] SPN was not extended with {activity!r} before direct synchronizing."
        )
    marking = _previous_end(agg)
    if spn.position_of(marking) != spn.trace_len - 1:
        raise ConsistencyError(
            "[ERROR] Previous alignment does not cover the previous prefix."
        )
    for t in spn.added_at[-1]:
        move = spn.move_of[t]
        if move.kind is MoveKind.SYNCHRONOUS and spn.net.enabled(marking, t):
            extended = agg.alignment.extended(move)
            agg.end_marking = (extended, spn.net.successor(marking, t))
            return extended
    return None

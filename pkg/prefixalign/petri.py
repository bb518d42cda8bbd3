"""
Petri-net and Workflow-net semantics: nodes, markings, enabling and firing,
structural WF-net validation.

Arc weights are fixed at 1. Places and transitions are identified by a
dense integer index per net; names are for humans and file formats.
Invisible transitions carry the label ``TAU`` (``None``), which can never
collide with an activity name.
"""

from collections import deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass

from prefixalign.exceptions import FiringError, ModelError

TAU = None


@dataclass(frozen=True, order=True)
class Place:
    index: int
    name: str


@dataclass(frozen=True, order=True)
class Transition:
    index: int
    name: str
    label: str | None = TAU

    @property
    def is_invisible(self) -> bool:
        return self.label is TAU


Node = Place | Transition


class Marking:
    """Multiset of place indices in canonical (sorted) form.

    Hashable and totally ordered so it can key search records and
    break heap ties deterministically.
    """

    __slots__ = ("_items", "_hash", "_counts")

    def __init__(self, counts: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        pairs = counts.items() if isinstance(counts, Mapping) else counts
        merged: dict[int, int] = {}
        for place, count in pairs:
            if count < 0:
                raise ValueError(f"negative token count {count} on place {place}")
            if count:
                merged[place] = merged.get(place, 0) + count
        self._counts = merged
        self._items: tuple[tuple[int, int], ...] = tuple(sorted(merged.items()))
        self._hash = hash(self._items)

    @classmethod
    def of(cls, *places: int) -> "Marking":
        """Build a marking from place indices, one token per occurrence."""
        counts: dict[int, int] = {}
        for p in places:
            counts[p] = counts.get(p, 0) + 1
        return cls(counts)

    def items(self) -> tuple[tuple[int, int], ...]:
        return self._items

    def places(self) -> Iterator[int]:
        for place, _ in self._items:
            yield place

    def total(self) -> int:
        return sum(count for _, count in self._items)

    def covers(self, places: Iterable[int]) -> bool:
        """True iff every given place holds at least one token."""
        held = self._counts
        return all(p in held for p in places)

    def apply(self, consume: Iterable[int], produce: Iterable[int]) -> "Marking":
        """Consume one token per place in ``consume``, then produce into ``produce``.

        Caller guarantees ``covers(consume)``.
        """
        counts = dict(self._counts)
        for p in consume:
            left = counts[p] - 1
            if left:
                counts[p] = left
            else:
                del counts[p]
        for p in produce:
            counts[p] = counts.get(p, 0) + 1
        return Marking(counts)

    def __getitem__(self, place: int) -> int:
        return self._counts.get(place, 0)

    def __contains__(self, place: object) -> bool:
        return place in self._counts

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Marking) and self._items == other._items

    def __lt__(self, other: "Marking") -> bool:
        return self._items < other._items

    def __hash__(self) -> int:
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._items)

    def __repr__(self) -> str:
        return f"Marking({dict(self._items)})"

    def render(self, net: "PetriNet") -> str:
        """Human-readable form, e.g. ``[p1, p2]`` (repeated places listed per token)."""
        names = []
        for p, count in self._items:
            names.extend([net.places[p].name] * count)
        return "[" + ", ".join(names) + "]"


class PetriNet:
    """Ordinary Petri net with dense integer node indices.

    Nodes and arcs can only be added, never removed, so indices stay stable
    while a net grows (the synchronous product relies on this).
    """

    def __init__(self, name: str = "") -> None:
        self.name = name
        self.places: list[Place] = []
        self.transitions: list[Transition] = []
        self._t_pre: list[list[int]] = []
        self._t_post: list[list[int]] = []
        self._p_pre: list[list[int]] = []
        self._p_post: list[list[int]] = []
        self._frozen = False

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    def _check_mutable(self) -> None:
        if self._frozen:
            raise ModelError(f"[ERROR] Net '{self.name}' is frozen and cannot be modified.")

    def add_place(self, name: str) -> Place:
        self._check_mutable()
        place = Place(len(self.places), name)
        self.places.append(place)
        self._p_pre.append([])
        self._p_post.append([])
        return place

    def add_transition(self, name: str, label: str | None = TAU) -> Transition:
        self._check_mutable()
        transition = Transition(len(self.transitions), name, label)
        self.transitions.append(transition)
        self._t_pre.append([])
        self._t_post.append([])
        return transition

    def add_arc(self, source: Node, target: Node) -> None:
        self._check_mutable()
        self._require(source)
        self._require(target)
        if isinstance(source, Place) and isinstance(target, Transition):
            if source.index in self._t_pre[target.index]:
                raise ModelError(f"[ERROR] Duplicate arc {source.name} -> {target.name}.")
            self._t_pre[target.index].append(source.index)
            self._p_post[source.index].append(target.index)
        elif isinstance(source, Transition) and isinstance(target, Place):
            if target.index in self._t_post[source.index]:
                raise ModelError(f"[ERROR] Duplicate arc {source.name} -> {target.name}.")
            self._t_post[source.index].append(target.index)
            self._p_pre[target.index].append(source.index)
        else:
            raise ModelError(
                f"[ERROR] Arc {source.name} -> {target.name} must connect a place and a transition."
            )

    def freeze(self) -> None:
        self._frozen = True

    @property
    def frozen(self) -> bool:
        return self._frozen

    # ------------------------------------------------------------------
    # Lookup
    # ------------------------------------------------------------------

    def _require(self, node: Node) -> None:
        pool: list = self.places if isinstance(node, Place) else self.transitions
        if not (0 <= node.index < len(pool) and pool[node.index] == node):
            raise KeyError(f"Unknown node {node!r} in net '{self.name}'")

    def place_by_name(self, name: str) -> Place:
        for p in self.places:
            if p.name == name:
                return p
        raise KeyError(f"Unknown place '{name}'")

    def transition_by_name(self, name: str) -> Transition:
        for t in self.transitions:
            if t.name == name:
                return t
        raise KeyError(f"Unknown transition '{name}'")

    def pre_places(self, t: int) -> list[int]:
        return self._t_pre[t]

    def post_places(self, t: int) -> list[int]:
        return self._t_post[t]

    def consumers(self, p: int) -> list[int]:
        """Transitions with ``p`` in their preset."""
        return self._p_post[p]

    def producers(self, p: int) -> list[int]:
        return self._p_pre[p]

    @property
    def arcs(self) -> frozenset[tuple[Node, Node]]:
        pairs: set[tuple[Node, Node]] = set()
        for t in self.transitions:
            for p in self._t_pre[t.index]:
                pairs.add((self.places[p], t))
            for p in self._t_post[t.index]:
                pairs.add((t, self.places[p]))
        return frozenset(pairs)

    def enabled(self, marking: Marking, t: int) -> bool:
        return marking.covers(self._t_pre[t])

    def enabled_transitions(self, marking: Marking) -> list[int]:
        """Indices of all transitions enabled at ``marking``, ascending."""
        candidates: set[int] = set()
        for p in marking.places():
            candidates.update(self._p_post[p])
        return sorted(t for t in candidates if marking.covers(self._t_pre[t]))

    def successor(self, marking: Marking, t: int) -> Marking:
        """Fire ``t`` without checking enabledness."""
        return marking.apply(self._t_pre[t], self._t_post[t])

    def copy_structure(self, other: "PetriNet") -> None:
        """Overwrite this net's nodes and arcs with value copies of ``other``'s."""
        self.name = other.name
        self.places = list(other.places)
        self.transitions = list(other.transitions)
        self._t_pre = [list(x) for x in other._t_pre]
        self._t_post = [list(x) for x in other._t_post]
        self._p_pre = [list(x) for x in other._p_pre]
        self._p_post = [list(x) for x in other._p_post]


class WFNet(PetriNet):
    """Workflow net: a Petri net with designated source and sink places.

    ``source``/``sink`` are set by the builder or loader; ``validate_wfnet``
    reports whether they actually satisfy the WF-net rules.
    """

    def __init__(self, name: str = "") -> None:
        super().__init__(name)
        self.source: Place | None = None
        self.sink: Place | None = None
        self.declared_initial: Marking | None = None
        self.declared_final: Marking | None = None
        self._by_label: dict[str, list[Transition]] | None = None

    @property
    def initial_marking(self) -> Marking:
        if self.declared_initial is not None:
            return self.declared_initial
        if self.source is None:
            return Marking()
        return Marking.of(self.source.index)

    @property
    def final_marking(self) -> Marking:
        if self.declared_final is not None:
            return self.declared_final
        if self.sink is None:
            return Marking()
        return Marking.of(self.sink.index)

    def transitions_by_label(self) -> dict[str, list[Transition]]:
        """Visible label → transitions carrying it, in index order."""
        if self._by_label is None or not self.frozen:
            index: dict[str, list[Transition]] = {}
            for t in self.transitions:
                if t.label is not TAU:
                    index.setdefault(t.label, []).append(t)
            self._by_label = index
        return self._by_label

    @property
    def activities(self) -> frozenset[str]:
        return frozenset(self.transitions_by_label())


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def preset(net: PetriNet, node: Node) -> frozenset[Node]:
    """All nodes with an arc into ``node``."""
    net._require(node)
    if isinstance(node, Transition):
        return frozenset(net.places[p] for p in net.pre_places(node.index))
    return frozenset(net.transitions[t] for t in net.producers(node.index))


def postset(net: PetriNet, node: Node) -> frozenset[Node]:
    """All nodes with an arc from ``node``."""
    net._require(node)
    if isinstance(node, Transition):
        return frozenset(net.places[p] for p in net.post_places(node.index))
    return frozenset(net.transitions[t] for t in net.consumers(node.index))


def is_enabled(net: PetriNet, marking: Marking, transition: Transition) -> bool:
    net._require(transition)
    return net.enabled(marking, transition.index)


def fire(net: PetriNet, marking: Marking, transition: Transition) -> Marking:
    """Fire ``transition`` at ``marking``; the input marking is not modified."""
    if not is_enabled(net, marking, transition):
        raise FiringError(
            f"[ERROR] Transition '{transition.name}' is not enabled at {marking.render(net)}.",
            transition=transition.name,
        )
    return net.successor(marking, transition.index)


def fire_sequence(net: PetriNet, marking: Marking, sequence: Iterable[Transition]) -> Marking:
    """Left fold of ``fire``. A disabled step is reported with its index."""
    current = marking
    for i, transition in enumerate(sequence):
        if not is_enabled(net, current, transition):
            raise FiringError(
                f"[ERROR] Step {i}: transition '{transition.name}' is not enabled at "
                f"{current.render(net)}.",
                transition=transition.name,
                index=i,
            )
        current = net.successor(current, transition.index)
    return current


def _reach(net: PetriNet, start: Node, forward: bool) -> set[Node]:
    seen: set[Node] = {start}
    queue: deque[Node] = deque([start])
    while queue:
        node = queue.popleft()
        step = postset(net, node) if forward else preset(net, node)
        for nxt in step:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def validate_wfnet(net: WFNet) -> list[str]:
    """Structural WF-net violations; empty iff the net is a WF-net.

    Soundness is not checked.
    """
    violations: list[str] = []
    if not net.places:
        return ["net has no places"]
    source, sink = net.source, net.sink
    if source is None:
        violations.append("no source place declared")
    elif preset(net, source):
        violations.append(f"source {source.name} has incoming arc")
    if sink is None:
        violations.append("no sink place declared")
    elif postset(net, sink):
        violations.append(f"sink {sink.name} has outgoing arc")

    for p in net.places:
        if p != source and not net.producers(p.index):
            violations.append(f"source not unique: place {p.name} has no incoming arc")
        if p != sink and not net.consumers(p.index):
            violations.append(f"sink not unique: place {p.name} has no outgoing arc")

    if source is not None and net.initial_marking != Marking.of(source.index):
        violations.append(
            f"initial marking {net.initial_marking.render(net)} is not [{source.name}]"
        )
    if sink is not None and net.final_marking != Marking.of(sink.index):
        violations.append(f"final marking {net.final_marking.render(net)} is not [{sink.name}]")

    if source is not None and sink is not None:
        on_path = _reach(net, source, forward=True) & _reach(net, sink, forward=False)
        for node in [*net.places, *net.transitions]:
            if node not in on_path:
                violations.append(f"node {node.name} is not on a path from source to sink")
    return violations


def reachable_markings(net: PetriNet, start: Marking, limit: int = 100_000) -> set[Marking]:
    """Breadth-first reachability set, bounded by ``limit`` markings."""
    seen = {start}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for t in net.enabled_transitions(m):
            nxt = net.successor(m, t)
            if nxt not in seen:
                if len(seen) >= limit:
                    raise ModelError(f"[ERROR] Reachability exceeded {limit} markings.")
                seen.add(nxt)
                queue.append(nxt)
    return seen

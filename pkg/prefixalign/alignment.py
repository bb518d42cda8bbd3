"""
Alignment moves, cost tables, and the synchronous product net (SPN).

SPN identifier scheme:
  * places 0..|P|-1 are the model's places (same indices), trace place
    p'_i has index |P| + i;
  * transitions 0..|T|-1 are the model-move transitions (same indices as the
    model), every later transition is a log or synchronous move added by
    ``extend`` in creation order.
Two SPNs built from the same model by the same extension sequence therefore
have identical indices, which lets cached alignments move between cases.
"""

from dataclasses import dataclass, field
from enum import StrEnum

from prefixalign import config
from prefixalign.exceptions import CliError
from prefixalign.petri import Marking, PetriNet, WFNet

SKIP = ">>"


class MoveKind(StrEnum):
    SYNCHRONOUS = "synchronous"
    LOG = "log"
    MODEL_VISIBLE = "model_visible"
    MODEL_INVISIBLE = "model_invisible"


@dataclass(frozen=True)
class CostTable:
    """Cost per move kind. ``STANDARD_COSTS`` is the only table the engine uses."""

    synchronous: int = 0
    log: int = 1
    model_visible: int = 1
    model_invisible: int = 0

    def cost(self, kind: MoveKind) -> int:
        return getattr(self, kind.value)


STANDARD_COSTS = CostTable()


@dataclass(frozen=True)
class Move:
    """One alignment column. ``None`` on either side means skip (>>).

    ``spn_transition`` and ``position`` record SPN provenance and are unset for
    hand-built moves.
    """

    kind: MoveKind
    activity: str | None
    model_transition: str | None
    cost: int
    spn_transition: int | None = field(default=None, compare=False)
    position: int | None = field(default=None, compare=False)

    @classmethod
    def sync(cls, activity, model_transition, costs=STANDARD_COSTS, **prov):
        return cls(
            MoveKind.SYNCHRONOUS,
            activity,
            model_transition,
            costs.cost(MoveKind.SYNCHRONOUS),
            **prov,
        )

    @classmethod
    def log(cls, activity, costs=STANDARD_COSTS, **prov):
        return cls(MoveKind.LOG, activity, None, costs.cost(MoveKind.LOG), **prov)

    @classmethod
    def model(cls, model_transition, *, visible, costs=STANDARD_COSTS, **prov):
        kind = MoveKind.MODEL_VISIBLE if visible else MoveKind.MODEL_INVISIBLE
        return cls(kind, None, model_transition, costs.cost(kind), **prov)

    def problem(self) -> str | None:
        """Describe why this move is malformed, or None if it is well-formed."""
        if self.activity is None and self.model_transition is None:
            return "move (>>, >>) is not allowed"
        if self.kind is MoveKind.SYNCHRONOUS and (
            self.activity is None or self.model_transition is None
        ):
            return "synchronous move needs both an activity and a transition"
        if self.kind is MoveKind.LOG and (
            self.model_transition is not None or self.activity is None
        ):
            return "log move must skip the model side"
        if self.kind in (MoveKind.MODEL_VISIBLE, MoveKind.MODEL_INVISIBLE) and (
            self.activity is not None
        ):
            return "model move must skip the log side"
        if self.cost < 0:
            return f"negative cost {self.cost}"
        return None

    def pair(self) -> tuple[str, str]:
        return (self.activity or SKIP, self.model_transition or SKIP)


@dataclass(frozen=True)
class PrefixAlignment:
    moves: tuple[Move, ...] = ()

    @property
    def total_cost(self) -> int:
        return sum(m.cost for m in self.moves)

    def extended(self, move: Move) -> "PrefixAlignment":
        return PrefixAlignment(self.moves + (move,))

    def activity_projection(self) -> list[str]:
        return [m.activity for m in self.moves if m.activity is not None]

    def transition_projection(self) -> list[int]:
        """SPN transition indices of all moves (every move has one)."""
        out = []
        for m in self.moves:
            if m.spn_transition is None:
                raise CliError("[ERROR] Alignment has moves without SPN provenance.")
            out.append(m.spn_transition)
        return out

    def pairs(self) -> list[tuple[str, str]]:
        return [m.pair() for m in self.moves]

    def rows(self) -> tuple[list[str], list[str]]:
        """Activity row over transition row, ``>>`` for skips."""
        top = [m.activity or SKIP for m in self.moves]
        bottom = [m.model_transition or SKIP for m in self.moves]
        return top, bottom

    def to_record(self, case_id: str) -> dict:
        """JSON-lines record for the results stream."""
        return {
            "schema_version": config.RESULTS_SCHEMA_VERSION,
            "case_id": case_id,
            "cost": self.total_cost,
            "moves": [
                {
                    "kind": m.kind.value,
                    "activity": m.activity,
                    "transition": m.model_transition,
                }
                for m in self.moves
            ],
        }


def alignment_cost(moves, costs: CostTable = STANDARD_COSTS) -> int:
    """Total cost of ``moves`` under ``costs``; malformed moves raise CliError."""
    total = 0
    for i, move in enumerate(moves):
        problem = move.problem()
        if problem:
            raise CliError(f"[ERROR] Malformed move at index {i}: {problem}.")
        total += costs.cost(move.kind)
    return total


# ---------------------------------------------------------------------------
# Synchronous product
# ---------------------------------------------------------------------------


class SynchronousProduct:
    """Trace net ⊗ model net, grown one activity at a time."""

    def __init__(self, model: WFNet, costs: CostTable = STANDARD_COSTS) -> None:
        self.model = model
        self.costs = costs
        self.net = PetriNet(f"spn({model.name})")
        self.move_of: dict[int, Move] = {}
        self.trace: list[str] = []
        self.added_at: list[list[int]] = [[]]
        for p in model.places:
            self.net.add_place(p.name)
        for t in model.transitions:
            st = self.net.add_transition(f"(>>,{t.name})")
            for p in model.pre_places(t.index):
                self.net.add_arc(self.net.places[p], st)
            for p in model.post_places(t.index):
                self.net.add_arc(st, self.net.places[p])
            self.move_of[st.index] = Move.model(
                t.name, visible=not t.is_invisible, costs=costs, spn_transition=st.index
            )
        self._offset = len(model.places)
        self.net.add_place("p'0")

    @property
    def trace_len(self) -> int:
        return len(self.trace)

    def trace_place(self, position: int) -> int:
        return self._offset + position

    @property
    def last_trace_place(self) -> int:
        return self.trace_place(self.trace_len)

    @property
    def initial_marking(self) -> Marking:
        counts = dict(self.model.initial_marking.items())
        counts[self.trace_place(0)] = 1
        return Marking(counts)

    @property
    def final_marking(self) -> Marking:
        counts = dict(self.model.final_marking.items())
        counts[self.last_trace_place] = 1
        return Marking(counts)

    def position_of(self, marking: Marking) -> int:
        """Trace position of the single trace token in ``marking``."""
        for p in marking.places():
            if p >= self._offset:
                return p - self._offset
        raise CliError(f"[ERROR] Marking {marking!r} holds no trace token.")

    def extend(self, activity: str) -> list[int]:
        i = self.trace_len + 1
        prev = self.net.places[self.last_trace_place]
        nxt = self.net.add_place(f"p'{i}")
        added = []

        log_t = self.net.add_transition(f"({activity},>>)@{i}")
        self.net.add_arc(prev, log_t)
        self.net.add_arc(log_t, nxt)
        self.move_of[log_t.index] = Move.log(
            activity, costs=self.costs, spn_transition=log_t.index, position=i
        )
        added.append(log_t.index)

        for t in self.model.transitions_by_label().get(activity, []):
            st = self.net.add_transition(f"({activity},{t.name})@{i}")
            self.net.add_arc(prev, st)
            for p in self.model.pre_places(t.index):
                self.net.add_arc(self.net.places[p], st)
            self.net.add_arc(st, nxt)
            for p in self.model.post_places(t.index):
                self.net.add_arc(st, self.net.places[p])
            self.move_of[st.index] = Move.sync(
                activity, t.name, costs=self.costs, spn_transition=st.index, position=i
            )
            added.append(st.index)

        self.trace.append(activity)
        self.added_at.append(added)
        return added

    def added_since(self, generation: int) -> list[int]:
        """Transitions added by the extensions after ``generation``, in index order."""
        out: list[int] = []
        for added in self.added_at[generation + 1 :]:
            out.extend(added)
        return out

    def clone(self) -> "SynchronousProduct":
        twin = SynchronousProduct.__new__(SynchronousProduct)
        twin.model = self.model
        twin.costs = self.costs
        twin.net = PetriNet()
        twin.net.copy_structure(self.net)
        twin.move_of = dict(self.move_of)
        twin.trace = list(self.trace)
        twin.added_at = [list(a) for a in self.added_at]
        twin._offset = self._offset
        return twin


def build_spn(model: WFNet, trace, costs: CostTable = STANDARD_COSTS) -> SynchronousProduct:
    spn = SynchronousProduct(model, costs)
    for activity in trace:
        spn.extend(activity)
    return spn


def extend_spn(spn: SynchronousProduct, activity: str) -> tuple[SynchronousProduct, list[int]]:
    """Grow ``spn`` in place by one trace position; returns it with the new transitions."""
    return spn, spn.extend(activity)


def is_goal(spn: SynchronousProduct, marking: Marking) -> bool:
    """Prefix-alignment goal: the trace token reached the last trace place."""
    return marking[spn.last_trace_place] > 0


def is_final(spn: SynchronousProduct, marking: Marking) -> bool:
    """Full-alignment goal: last trace place plus the model's final marking."""
    return marking == spn.final_marking


def verify_spn(spn: SynchronousProduct) -> list[str]:
    """Check every SPN transition's move against its arcs; returns problems."""
    problems = []
    model = spn.model
    net = spn.net
    n_model = len(model.transitions)
    for t in net.transitions:
        move = spn.move_of.get(t.index)
        if move is None:
            problems.append(f"{t.name}: no move classification")
            continue
        if move.problem():
            problems.append(f"{t.name}: {move.problem()}")
        pre = set(net.pre_places(t.index))
        post = set(net.post_places(t.index))
        if t.index < n_model:
            expected_pre = set(model.pre_places(t.index))
            expected_post = set(model.post_places(t.index))
            if move.kind not in (MoveKind.MODEL_VISIBLE, MoveKind.MODEL_INVISIBLE):
                problems.append(f"{t.name}: model transition classified as {move.kind}")
        else:
            if move.position is None:
                problems.append(f"{t.name}: missing trace position")
                continue
            trace_pre = {spn.trace_place(move.position - 1)}
            trace_post = {spn.trace_place(move.position)}
            if spn.trace[move.position - 1] != move.activity:
                problems.append(f"{t.name}: activity differs from trace position")
            if move.kind is MoveKind.LOG:
                expected_pre, expected_post = trace_pre, trace_post
            elif move.kind is MoveKind.SYNCHRONOUS:
                mt = model.transition_by_name(move.model_transition or "")
                if mt.label != move.activity:
                    problems.append(f"{t.name}: label mismatch")
                expected_pre = trace_pre | set(model.pre_places(mt.index))
                expected_post = trace_post | set(model.post_places(mt.index))
            else:
                problems.append(f"{t.name}: trace transition classified as {move.kind}")
                continue
        if pre != expected_pre or post != expected_post:
            problems.append(f"{t.name}: arcs do not match its {move.kind} classification")
    return problems

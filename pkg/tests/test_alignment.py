"""Tests for alignment.py: moves, costs, the synchronous product."""

import pytest

from prefixalign.alignment import (
    SKIP,
    STANDARD_COSTS,
    Move,
    MoveKind,
    PrefixAlignment,
    SynchronousProduct,
    alignment_cost,
    build_spn,
    extend_spn,
    is_final,
    is_goal,
    verify_spn,
)
from prefixalign.exceptions import CliError
from prefixalign.petri import Marking

# ---------------------------------------------------------------------------
# Moves and costs
# ---------------------------------------------------------------------------


class TestMoves:
    def test_standard_costs(self):
        assert STANDARD_COSTS.cost(MoveKind.SYNCHRONOUS) == 0
        assert STANDARD_COSTS.cost(MoveKind.LOG) == 1
        assert STANDARD_COSTS.cost(MoveKind.MODEL_VISIBLE) == 1
        assert STANDARD_COSTS.cost(MoveKind.MODEL_INVISIBLE) == 0

    def test_constructors(self):
        assert Move.sync("a", "t1").pair() == ("a", "t1")
        assert Move.log("a").pair() == ("a", SKIP)
        assert Move.model("t2", visible=False).pair() == (SKIP, "t2")
        assert Move.model("t3", visible=True).cost == 1

    def test_provenance_not_part_of_equality(self):
        assert Move.sync("a", "t1", spn_transition=5, position=1) == Move.sync("a", "t1")

    def test_alignment_cost(self):
        moves = [Move.sync("a", "t1"), Move.model("t2", visible=False), Move.log("z")]
        assert alignment_cost(moves) == 1

    def test_double_skip_rejected(self):
        bad = Move(MoveKind.LOG, None, None, 1)
        with pytest.raises(CliError, match="index 1"):
            alignment_cost([Move.log("a"), bad])

    def test_sync_without_transition_rejected(self):
        bad = Move(MoveKind.SYNCHRONOUS, "a", None, 0)
        assert "synchronous" in bad.problem()


class TestPrefixAlignment:
    def test_projections_and_rows(self):
        al = PrefixAlignment((Move.sync("a", "t1"), Move.log("z"), Move.model("t3", visible=True)))
        assert al.activity_projection() == ["a", "z"]
        assert al.rows() == (["a", "z", SKIP], ["t1", SKIP, "t3"])
        assert al.total_cost == 2

    def test_extended_does_not_mutate(self):
        al = PrefixAlignment()
        longer = al.extended(Move.log("a"))
        assert al.moves == ()
        assert len(longer.moves) == 1

    def test_transition_projection_requires_provenance(self):
        with pytest.raises(CliError, match="provenance"):
            PrefixAlignment((Move.log("a"),)).transition_projection()

    def test_to_record(self):
        record = PrefixAlignment((Move.sync("a", "t1"),)).to_record("c1")
        assert record["case_id"] == "c1"
        assert record["cost"] == 0
        assert record["moves"] == [{"kind": "synchronous", "activity": "a", "transition": "t1"}]


# ---------------------------------------------------------------------------
# Synchronous product
# ---------------------------------------------------------------------------


class TestSynchronousProduct:
    def test_empty_trace_has_model_moves_only(self, n1):
        spn = SynchronousProduct(n1)
        assert len(spn.net.transitions) == 4
        assert len(spn.net.places) == 4
        assert spn.initial_marking == Marking.of(0, 3)
        assert all(
            spn.move_of[t].kind in (MoveKind.MODEL_VISIBLE, MoveKind.MODEL_INVISIBLE)
            for t in range(4)
        )
        assert spn.move_of[1].kind is MoveKind.MODEL_INVISIBLE

    def test_extend_adds_log_then_sync_moves(self, n1):
        spn = SynchronousProduct(n1)
        added = spn.extend("a")
        assert added == [4, 5]
        assert spn.move_of[4].kind is MoveKind.LOG
        assert spn.move_of[5] == Move.sync("a", "t1")
        assert spn.move_of[5].position == 1
        assert spn.net.pre_places(5) == [3, 0]
        assert sorted(spn.net.post_places(5)) == [1, 4]

    def test_unknown_activity_only_gets_log_move(self, n1):
        spn = SynchronousProduct(n1)
        assert len(spn.extend("z")) == 1

    def test_ids_are_stable_across_builds(self, n1):
        first = build_spn(n1, ["a", "b"])
        second, new = extend_spn(build_spn(n1, ["a"]), "b")
        assert [t.name for t in first.net.transitions] == [t.name for t in second.net.transitions]
        assert new == first.added_at[2]

    def test_goal_predicates(self, n1):
        spn = build_spn(n1, ["a"])
        assert is_goal(spn, Marking.of(1, 4))
        assert not is_goal(spn, Marking.of(1, 3))
        assert not is_final(spn, Marking.of(1, 4))
        assert is_final(spn, Marking.of(2, 4))

    def test_position_of(self, n1):
        spn = build_spn(n1, ["a", "b"])
        assert spn.position_of(Marking.of(1, spn.trace_place(1))) == 1
        with pytest.raises(CliError):
            spn.position_of(Marking.of(1))

    def test_added_since(self, n1):
        spn = build_spn(n1, ["a", "b", "z"])
        assert spn.added_since(1) == spn.added_at[2] + spn.added_at[3]

    def test_clone_is_independent(self, n1):
        spn = build_spn(n1, ["a"])
        twin = spn.clone()
        twin.extend("b")
        assert spn.trace == ["a"]
        assert len(spn.net.transitions) == 6
        assert len(twin.net.transitions) == 8

    def test_verify_spn_clean(self, n1):
        assert verify_spn(build_spn(n1, ["a", "b", "c", "z"])) == []

    def test_verify_spn_detects_misclassification(self, n1):
        spn = build_spn(n1, ["a"])
        spn.move_of[5] = Move.log("a", spn_transition=5, position=1)
        assert any("arcs do not match" in p for p in verify_spn(spn))

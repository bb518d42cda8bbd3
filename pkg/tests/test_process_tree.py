"""Tests for process_tree.py: grammar, WF-net translation, play-out."""

import random

import pytest

from prefixalign.exceptions import CliError
from prefixalign.petri import fire_sequence, reachable_markings, validate_wfnet
from prefixalign.process_tree import (
    AND,
    LOOP,
    ProcessTree,
    leaf,
    parse,
    play_out,
    random_process_tree,
    to_wfnet,
)


def _replayable(net, trace):
    """True iff some firing sequence with labels ``trace`` ends in the final marking."""
    frontier = {net.initial_marking}
    for activity in trace:
        step = set()
        for m in _tau_closure(net, frontier):
            for t in net.transitions_by_label().get(activity, []):
                if net.enabled(m, t.index):
                    step.add(net.successor(m, t.index))
        frontier = step
    return net.final_marking in _tau_closure(net, frontier)


def _tau_closure(net, markings):
    seen = set(markings)
    stack = list(markings)
    while stack:
        m = stack.pop()
        for t in net.enabled_transitions(m):
            if net.transitions[t].is_invisible:
                nxt = net.successor(m, t)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return seen


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------


class TestParse:
    def test_nested(self):
        tree = parse("seq(a, xor(b, c), loop(d, tau))")
        assert tree.operator == "seq"
        assert tree.children[0] == leaf("a")
        assert tree.children[2].operator == LOOP
        assert tree.children[2].children[1] == leaf(None)

    def test_par_is_and(self):
        assert parse("par(a, b)").operator == AND

    def test_quoted_names(self):
        tree = parse("seq('check order', b)")
        assert tree.children[0].label == "check order"

    def test_str_roundtrips_grammar(self):
        text = "seq(a, xor(b, tau), and('x y', c), loop(d, e))"
        assert str(parse(text)) == text

    def test_activities(self):
        assert parse("seq(a, xor(b, tau))").activities() == {"a", "b"}

    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("", "empty"),
            ("seq(a, b", "expected ')'"),
            ("seq(a b)", "expected ')'"),
            ("foo(a)", "unknown operator"),
            ("loop(a)", "exactly 2 children"),
            ("seq(a) b", "trailing input"),
            ("seq(a, #)", "unexpected"),
        ],
    )
    def test_errors(self, text, fragment):
        with pytest.raises(CliError, match="Invalid process tree") as exc_info:
            parse(text)
        assert fragment in str(exc_info.value)


# ---------------------------------------------------------------------------
# to_wfnet
# ---------------------------------------------------------------------------


class TestToWFNet:
    @pytest.mark.parametrize(
        "text",
        [
            "a",
            "seq(a, b, c)",
            "xor(a, b, tau)",
            "and(a, b, c)",
            "loop(a, b)",
            "seq(a, and(b, xor(c, d)), loop(e, f))",
        ],
    )
    def test_translation_is_a_frozen_wfnet(self, text):
        net = to_wfnet(parse(text))
        assert validate_wfnet(net) == []
        assert net.frozen
        assert net.source.name == "source"
        assert net.sink.name == "sink"

    def test_naming_scheme(self):
        net = to_wfnet(parse("seq(a, b)"))
        assert [p.name for p in net.places] == ["source", "sink", "p1"]
        assert [(t.name, t.label) for t in net.transitions] == [("t1", "a"), ("t2", "b")]

    def test_and_uses_silent_split_and_join(self):
        net = to_wfnet(parse("and(a, b)"))
        assert net.transitions[0].is_invisible
        assert net.transitions[-1].is_invisible
        assert len(net.places) == 6

    def test_loop_language(self):
        net = to_wfnet(parse("loop(a, b)"))
        assert _replayable(net, ["a"])
        assert _replayable(net, ["a", "b", "a"])
        assert not _replayable(net, ["a", "b"])

    def test_reachable_state_space_is_finite(self):
        net = to_wfnet(parse("and(loop(a, b), xor(c, tau), seq(d, e))"))
        assert len(reachable_markings(net, net.initial_marking)) < 200

    def test_fire_sequence_over_sequence_net(self):
        net = to_wfnet(parse("seq(a, b)"))
        assert fire_sequence(net, net.initial_marking, net.transitions) == net.final_marking


# ---------------------------------------------------------------------------
# play_out and random trees
# ---------------------------------------------------------------------------


class TestPlayOut:
    def test_traces_are_in_the_language(self):
        rng = random.Random(1)
        tree = parse("seq(a, and(b, c), loop(d, xor(e, tau)), xor(f, tau))")
        net = to_wfnet(tree)
        for _ in range(50):
            assert _replayable(net, play_out(tree, rng))

    def test_deterministic_under_seed(self):
        tree = parse("and(a, b, c, d)")
        first = [play_out(tree, random.Random(9)) for _ in range(3)]
        second = [play_out(tree, random.Random(9)) for _ in range(3)]
        assert first == second

    def test_random_tree_uses_each_label_once(self):
        rng = random.Random(4)
        for _ in range(20):
            tree = random_process_tree(rng, list("abcdef"))
            assert tree.activities() == set("abcdef")
            net = to_wfnet(tree)
            assert validate_wfnet(net) == []
            assert len(net.transitions_by_label()["a"]) == 1

    def test_random_tree_needs_labels(self):
        with pytest.raises(CliError):
            random_process_tree(random.Random(0), [])

    def test_random_tree_plays_inside_its_net(self):
        rng = random.Random(8)
        for _ in range(10):
            tree = random_process_tree(rng, list("abcde"))
            net = to_wfnet(tree)
            assert _replayable(net, play_out(tree, rng))

    def test_leaf_tree(self):
        assert play_out(ProcessTree(label="a"), random.Random(0)) == ["a"]

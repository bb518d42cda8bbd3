"""
Block-structured process trees: text grammar, WF-net translation, play-out.

Grammar::

    tree  := leaf | op "(" tree ("," tree)* ")"
    op    := "seq" | "xor" | "and" | "par" | "loop"
    leaf  := "tau" | activity name | 'quoted name'

``loop`` takes exactly two children, ``loop(do, redo)``: do once, then any
number of redo-do rounds. Nets derived from trees are sound by construction.
"""

import random
import re
from dataclasses import dataclass

from prefixalign.exceptions import CliError
from prefixalign.petri import TAU, Place, WFNet

SEQ = "seq"
XOR = "xor"
AND = "and"
LOOP = "loop"
OPERATORS = (SEQ, XOR, AND, LOOP)
_ALIASES = {"par": AND}

LOOP_REPEAT_PROBABILITY = 0.3
LOOP_MAX_REPEATS = 3


@dataclass(frozen=True)
class ProcessTree:
    operator: str | None = None
    label: str | None = None
    children: tuple["ProcessTree", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.operator is None

    def activities(self) -> set[str]:
        if self.is_leaf:
            return {self.label} if self.label is not None else set()
        out: set[str] = set()
        for c in self.children:
            out |= c.activities()
        return out

    def __str__(self) -> str:
        if self.is_leaf:
            if self.label is None:
                return "tau"
            if re.fullmatch(r"[\w.:\-]+", self.label) and self.label not in (*OPERATORS, "tau"):
                return self.label
            return "'" + self.label + "'"
        return f"{self.operator}({', '.join(str(c) for c in self.children)})"


def leaf(label: str | None) -> ProcessTree:
    return ProcessTree(label=label)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<punct>[(),])|'(?P<quoted>[^']*)'|(?P<name>[\w.:\-]+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise CliError(
                f"[ERROR] Invalid process tree: unexpected {text[pos:].strip()[:10]!r} "
                f"at offset {pos}."
            )
        if m.group("punct"):
            tokens.append(("punct", m.group("punct"), m.start("punct")))
        elif m.group("quoted") is not None:
            tokens.append(("quoted", m.group("quoted"), m.start("quoted")))
        else:
            tokens.append(("name", m.group("name"), m.start("name")))
        pos = m.end()
    return tokens


def parse(text: str) -> ProcessTree:
    """Parse the tree grammar; raises CliError with the offending offset."""
    tokens = _tokenize(text or "")
    if not tokens:
        raise CliError("[ERROR] Invalid process tree: empty tree.")
    tree, i = _parse_node(tokens, 0)
    if i != len(tokens):
        raise CliError(
            f"[ERROR] Invalid process tree: trailing input at offset {tokens[i][2]}."
        )
    return tree


def _expect(tokens, i, value):
    if i >= len(tokens) or tokens[i][1] != value or tokens[i][0] != "punct":
        where = f"offset {tokens[i][2]}" if i < len(tokens) else "end of input"
        raise CliError(f"[ERROR] Invalid process tree: expected {value!r} at {where}.")
    return i + 1


def _parse_node(tokens, i) -> tuple[ProcessTree, int]:
    if i >= len(tokens):
        raise CliError("[ERROR] Invalid process tree: unexpected end of input.")
    kind, value, offset = tokens[i]
    if kind == "quoted":
        return leaf(value), i + 1
    if kind != "name":
        raise CliError(f"[ERROR] Invalid process tree: unexpected {value!r} at offset {offset}.")
    op = _ALIASES.get(value.lower(), value.lower())
    followed_by_paren = i + 1 < len(tokens) and tokens[i + 1][1] == "("
    if op in OPERATORS and followed_by_paren:
        i += 2
        children = []
        while True:
            child, i = _parse_node(tokens, i)
            children.append(child)
            if i < len(tokens) and tokens[i][1] == ",":
                i += 1
                continue
            break
        i = _expect(tokens, i, ")")
        if op == LOOP and len(children) != 2:
            raise CliError(
                f"[ERROR] Invalid process tree: loop at offset {offset} needs exactly "
                f"2 children, got {len(children)}."
            )
        return ProcessTree(op, children=tuple(children)), i
    if followed_by_paren:
        raise CliError(f"[ERROR] Invalid process tree: unknown operator {value!r}.")
    if value.lower() == "tau":
        return leaf(TAU), i + 1
    return leaf(value), i + 1


# ---------------------------------------------------------------------------
# WF-net translation
# ---------------------------------------------------------------------------


def to_wfnet(tree: ProcessTree, name: str = "tree") -> WFNet:
    """Translate ``tree`` into a frozen WF-net with places ``source``/``sink``."""
    net = WFNet(name)
    source = net.add_place("source")
    sink = net.add_place("sink")
    _build(net, tree, source, sink)
    net.source = source
    net.sink = sink
    net.freeze()
    return net


def _place(net: WFNet) -> Place:
    return net.add_place(f"p{len(net.places) - 1}")


def _transition(net: WFNet, label, src: Place, dst: Place) -> None:
    t = net.add_transition(f"t{len(net.transitions) + 1}", label)
    net.add_arc(src, t)
    net.add_arc(t, dst)


def _build(net: WFNet, node: ProcessTree, src: Place, dst: Place) -> None:
    if node.is_leaf:
        _transition(net, node.label, src, dst)
    elif node.operator == SEQ:
        current = src
        for k, child in enumerate(node.children):
            nxt = dst if k == len(node.children) - 1 else _place(net)
            _build(net, child, current, nxt)
            current = nxt
    elif node.operator == XOR:
        for child in node.children:
            _build(net, child, src, dst)
    elif node.operator == AND:
        split = net.add_transition(f"t{len(net.transitions) + 1}", TAU)
        net.add_arc(src, split)
        ends = []
        for child in node.children:
            start, end = _place(net), _place(net)
            net.add_arc(split, start)
            _build(net, child, start, end)
            ends.append(end)
        join = net.add_transition(f"t{len(net.transitions) + 1}", TAU)
        for end in ends:
            net.add_arc(end, join)
        net.add_arc(join, dst)
    elif node.operator == LOOP:
        do, redo = node.children
        start, end = _place(net), _place(net)
        _transition(net, TAU, src, start)
        _build(net, do, start, end)
        _build(net, redo, end, start)
        _transition(net, TAU, end, dst)
    else:
        raise CliError(f"[ERROR] Unknown process tree operator {node.operator!r}.")


# ---------------------------------------------------------------------------
# Play-out and random trees
# ---------------------------------------------------------------------------


def play_out(tree: ProcessTree, rng: random.Random) -> list[str]:
    """One random trace of ``tree``."""
    if tree.is_leaf:
        return [tree.label] if tree.label is not None else []
    if tree.operator == SEQ:
        return [a for child in tree.children for a in play_out(child, rng)]
    if tree.operator == XOR:
        return play_out(rng.choice(tree.children), rng)
    if tree.operator == AND:
        branches = [play_out(child, rng) for child in tree.children]
        trace: list[str] = []
        while True:
            live = [b for b in branches if b]
            if not live:
                return trace
            trace.append(rng.choice(live).pop(0))
    do, redo = tree.children
    trace = play_out(do, rng)
    for _ in range(LOOP_MAX_REPEATS):
        if rng.random() >= LOOP_REPEAT_PROBABILITY:
            break
        trace += play_out(redo, rng) + play_out(do, rng)
    return trace


def random_process_tree(rng: random.Random, alphabet, depth: int = 3) -> ProcessTree:
    """Random tree using every label of ``alphabet`` exactly once."""
    labels = list(alphabet)
    if not labels:
        raise CliError("[ERROR] A process tree needs at least one activity.")
    return _random_node(rng, labels, depth)


def _random_node(rng: random.Random, labels: list[str], depth: int) -> ProcessTree:
    if len(labels) == 1:
        return leaf(labels[0])
    if depth <= 0:
        return ProcessTree(SEQ, children=tuple(leaf(a) for a in labels))
    op = rng.choice(OPERATORS)
    if op == LOOP:
        cut = rng.randint(1, len(labels) - 1)
        return ProcessTree(
            LOOP,
            children=(
                _random_node(rng, labels[:cut], depth - 1),
                _random_node(rng, labels[cut:], depth - 1),
            ),
        )
    n_children = rng.randint(2, min(3, len(labels)))
    cuts = sorted(rng.sample(range(1, len(labels)), n_children - 1))
    bounds = list(zip([0, *cuts], [*cuts, len(labels)], strict=True))
    children = [_random_node(rng, labels[a:b], depth - 1) for a, b in bounds]
    if op == XOR and rng.random() < 0.2:
        children.append(leaf(TAU))
    return ProcessTree(op, children=tuple(children))

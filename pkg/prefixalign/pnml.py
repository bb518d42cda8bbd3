"""
PNML subset reader/writer for reference models.

Supported: places, transitions, arcs, ``initialMarking`` and an optional
``finalmarkings`` block. A transition is invisible (tau) when it carries the
ProM ``toolspecific activity="$invisible$"`` marker or has no/empty name.
Arc inscriptions other than 1 are rejected.
"""

import os
import xml.etree.ElementTree as ET

from prefixalign.exceptions import ModelError
from prefixalign.petri import TAU, Marking, Place, Transition, WFNet, validate_wfnet

PNML_NET_TYPE = "http://www.pnml.org/version-2009/grammar/pnmlcoremodel"
INVISIBLE_MARKER = "$invisible$"


def _local(tag):
    return tag.rsplit("}", 1)[-1]


def _child(elem, name):
    for c in elem:
        if _local(c.tag) == name:
            return c
    return None


def _text(elem, *path):
    """Text of ``elem/path.../text``, or None."""
    node = elem
    for name in path:
        node = _child(node, name)
        if node is None:
            return None
    text = _child(node, "text")
    if text is None or text.text is None:
        return None
    return text.text.strip()


def _int_text(value, context):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ModelError(f"[ERROR] {context}: expected an integer, got {value!r}.") from None


def _is_invisible(elem):
    for c in elem:
        if _local(c.tag) == "toolspecific" and c.get("activity") == INVISIBLE_MARKER:
            return True
    return False


def load_model(path) -> WFNet:
    """Parse a PNML file into a frozen, structurally valid WF-net."""
    if not os.path.exists(path):
        raise ModelError(f"[ERROR] Model file not found: {path}")
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as e:
        line, col = e.position
        raise ModelError(f"[ERROR] {path}:{line}:{col}: malformed XML ({e.msg}).") from None

    net_elem = root if _local(root.tag) == "net" else None
    if net_elem is None:
        net_elem = next((e for e in root.iter() if _local(e.tag) == "net"), None)
    if net_elem is None:
        raise ModelError(f"[ERROR] {path}: no <net> element.")

    net = WFNet(net_elem.get("id", os.path.splitext(os.path.basename(path))[0]))
    nodes: dict[str, Place | Transition] = {}
    initial: dict[int, int] = {}
    problems: list[str] = []

    finals = next((e for e in net_elem.iter() if _local(e.tag) == "finalmarkings"), None)
    inside_finals = set(finals.iter()) if finals is not None else set()
    elems = [e for e in net_elem.iter() if e not in inside_finals]
    for elem in elems:
        if _local(elem.tag) != "place":
            continue
        pid = elem.get("id")
        if not pid or pid in nodes:
            problems.append(f"place with missing or duplicate id {pid!r}")
            continue
        place = net.add_place(pid)
        nodes[pid] = place
        tokens = _text(elem, "initialMarking")
        if tokens:
            count = _int_text(tokens, f"initial marking of place {pid}")
            if count:
                initial[place.index] = count

    for elem in elems:
        if _local(elem.tag) != "transition":
            continue
        tid = elem.get("id")
        if not tid or tid in nodes:
            problems.append(f"transition with missing or duplicate id {tid!r}")
            continue
        label = _text(elem, "name") or TAU
        if _is_invisible(elem):
            label = TAU
        nodes[tid] = net.add_transition(tid, label)

    for elem in elems:
        if _local(elem.tag) != "arc":
            continue
        aid = elem.get("id", "?")
        src, dst = nodes.get(elem.get("source", "")), nodes.get(elem.get("target", ""))
        if src is None or dst is None:
            problems.append(f"arc {aid} references an undeclared node")
            continue
        weight = _text(elem, "inscription")
        if weight is not None and _int_text(weight, f"inscription of arc {aid}") != 1:
            problems.append(f"arc {aid} has weight {weight}; only ordinary nets are supported")
            continue
        try:
            net.add_arc(src, dst)
        except ModelError as e:
            problems.append(str(e).removeprefix("[ERROR] "))

    final: dict[int, int] = {}
    if finals is not None:
        marking = _child(finals, "marking")
        for ref in marking if marking is not None else []:
            node = nodes.get(ref.get("idref", ""))
            count = _int_text(_text(ref) or "0", "final marking")
            if isinstance(node, Place) and count:
                final[node.index] = count

    if problems:
        raise ModelError(f"[ERROR] {path}: invalid model.", violations=problems)

    marked = [net.places[p] for p in initial]
    no_input = [p for p in net.places if not net.producers(p.index)]
    no_output = [p for p in net.places if not net.consumers(p.index)]
    net.source = marked[0] if len(marked) == 1 else (no_input[0] if no_input else None)
    if initial:
        net.declared_initial = Marking(initial)
    if final:
        net.declared_final = Marking(final)
        finals_places = list(final)
        net.sink = net.places[finals_places[0]] if len(finals_places) == 1 else None
    else:
        net.sink = no_output[0] if no_output else None

    violations = validate_wfnet(net)
    if violations:
        raise ModelError(
            f"[ERROR] {path}: not a WF-net ({len(violations)} violation(s)).",
            violations=violations,
            recovery_hint="Run `prefixalign validate --model <file>` for the full list.",
        )
    net.freeze()
    return net


def write_model(net: WFNet, path) -> None:
    """Serialize ``net`` so that ``load_model`` rebuilds an identical net."""
    root = ET.Element("pnml")
    net_elem = ET.SubElement(root, "net", id=net.name or "net", type=PNML_NET_TYPE)
    page = ET.SubElement(net_elem, "page", id="page0")
    initial = net.initial_marking
    for p in net.places:
        elem = ET.SubElement(page, "place", id=p.name)
        ET.SubElement(ET.SubElement(elem, "name"), "text").text = p.name
        if initial[p.index]:
            marking = ET.SubElement(elem, "initialMarking")
            ET.SubElement(marking, "text").text = str(initial[p.index])
    for t in net.transitions:
        elem = ET.SubElement(page, "transition", id=t.name)
        ET.SubElement(ET.SubElement(elem, "name"), "text").text = t.label or t.name
        if t.is_invisible:
            ET.SubElement(
                elem, "toolspecific", tool="ProM", version="6.4", activity=INVISIBLE_MARKER
            )
    arc_no = 0
    for t in net.transitions:
        for p in net.pre_places(t.index):
            ET.SubElement(page, "arc", id=f"a{arc_no}", source=net.places[p].name, target=t.name)
            arc_no += 1
        for p in net.post_places(t.index):
            ET.SubElement(page, "arc", id=f"a{arc_no}", source=t.name, target=net.places[p].name)
            arc_no += 1
    finals = ET.SubElement(net_elem, "finalmarkings")
    marking = ET.SubElement(finals, "marking")
    for p, count in net.final_marking.items():
        ref = ET.SubElement(marking, "place", idref=net.places[p].name)
        ET.SubElement(ref, "text").text = str(count)
    ET.indent(root)
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)

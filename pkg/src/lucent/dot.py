"""Graphviz export."""

from __future__ import annotations

from typing import Iterable

from .net import Marking, PetriNet

__all__ = ["export_dot", "HIGHLIGHT_ATTRS"]

# attributes added to highlighted nodes; nothing else uses "color"
HIGHLIGHT_ATTRS = 'color="red", penwidth=2'


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _token_label(k: int) -> str:
    if k == 0:
        return ""
    if k <= 3:
        return "●" * k
    return str(k)


def export_dot(
    net: PetriNet,
    marking: Marking | None = None,
    highlights: Iterable[str] | None = None,
    name: str = "net",
) -> str:
    """Render ``net`` as a DOT digraph.

    Places are circles labelled with their id and tokens, transitions are
    boxes. Nodes in ``highlights`` get :data:`HIGHLIGHT_ATTRS`. Output is
    sorted, so equal inputs give identical text.
    """
    marking = marking or Marking()
    marked = set(highlights or ())
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;"]
    for p in net.places:
        tokens = _token_label(marking[p])
        label = p if not tokens else f"{p}\n{tokens}"
        attrs = [f"shape=circle, label={_quote(label)}"]
        if p in marked:
            attrs.append(HIGHLIGHT_ATTRS)
        lines.append(f"  {_quote(p)} [{', '.join(attrs)}];")
    for t in net.transitions:
        attrs = [f"shape=box, label={_quote(t)}"]
        if t in marked:
            attrs.append(HIGHLIGHT_ATTRS)
        lines.append(f"  {_quote(t)} [{', '.join(attrs)}];")
    for a, b in sorted(net.arcs):
        lines.append(f"  {_quote(a)} -> {_quote(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Line-oriented net files.

::

    # comments run to the end of the line
    net example
    place p1 init 1
    place p2
    trans t1 : p1 -> p2

Arcs are ordinary, so a place may appear at most once on each side of a
transition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .net import InvalidNet, Marking, PetriNet, PetriNetError

__all__ = [
    "NetDocument",
    "NetSyntaxError",
    "UndeclaredPlace",
    "DuplicateId",
    "parse_document",
    "parse_net",
    "serialize",
    "serialize_net",
    "load_net",
]

_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_.'\-]*\Z")


class NetSyntaxError(PetriNetError, ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class UndeclaredPlace(PetriNetError, ValueError):
    def __init__(self, place: str, transition: str, line: int):
        self.place = place
        self.transition = transition
        self.line = line
        super().__init__(f"line {line}: transition {transition!r} uses undeclared place {place!r}")


class DuplicateId(PetriNetError, ValueError):
    def __init__(self, node: str, line: int):
        self.node = node
        self.line = line
        super().__init__(f"line {line}: {node!r} is declared twice")


@dataclass(frozen=True)
class NetDocument:
    """The parsed contents of a net file, in declaration order."""

    name: str
    places: tuple[tuple[str, int], ...]
    transitions: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...]

    def to_net(self, *, check_connected: bool = True) -> tuple[PetriNet, Marking]:
        arcs = []
        for t, ins, outs in self.transitions:
            arcs += [(p, t) for p in ins]
            arcs += [(t, p) for p in outs]
        net = PetriNet(
            [p for p, _ in self.places],
            [t for t, _, _ in self.transitions],
            arcs,
            check_connected=check_connected,
        )
        return net, Marking({p: k for p, k in self.places if k})

    @classmethod
    def from_net(cls, net: PetriNet, marking: Marking | None = None, name: str = "net") -> "NetDocument":
        marking = marking or Marking()
        return cls(
            name,
            tuple((p, marking[p]) for p in net.places),
            tuple(
                (t, tuple(sorted(net.preset(t))), tuple(sorted(net.postset(t))))
                for t in net.transitions
            ),
        )


def _tokens(line: str):
    """Whitespace-separated words with their 1-based columns."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _ident(word: str, col: int, lineno: int) -> str:
    if not _ID.match(word):
        raise NetSyntaxError(f"invalid identifier {word!r}", lineno, col)
    return word


def parse_document(text: str) -> NetDocument:
    """Parse without building the net; checks syntax, ids and references."""
    name = None
    places: dict[str, int] = {}
    transitions = []
    seen_trans: set[str] = set()
    refs = []
    last = (1, 1)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        words = _tokens(raw.split("#", 1)[0])
        if not words:
            continue
        last = (lineno, len(raw) + 1)
        kw, col = words[0]
        if name is None and kw != "net":
            raise NetSyntaxError("expected 'net <name>' header", lineno, col)

        if kw == "net":
            if name is not None:
                raise NetSyntaxError("second 'net' header", lineno, col)
            if len(words) != 2:
                raise NetSyntaxError("expected 'net <name>'", lineno, col)
            name = _ident(*words[1], lineno)

        elif kw == "place":
            if len(words) not in (2, 4):
                raise NetSyntaxError("expected 'place <id> [init <k>]'", lineno, col)
            pid = _ident(*words[1], lineno)
            init = 0
            if len(words) == 4:
                if words[2][0] != "init":
                    raise NetSyntaxError(f"expected 'init', got {words[2][0]!r}", lineno, words[2][1])
                if not words[3][0].isdigit():
                    raise NetSyntaxError(f"token count must be a non-negative integer, got {words[3][0]!r}", lineno, words[3][1])
                init = int(words[3][0])
            if pid in places or pid in seen_trans:
                raise DuplicateId(pid, lineno)
            places[pid] = init

        elif kw == "trans":
            if len(words) < 3 or words[2][0] != ":":
                raise NetSyntaxError("expected 'trans <id> : <in>... -> <out>...'", lineno, col)
            tid = _ident(*words[1], lineno)
            rest = words[3:]
            arrows = [i for i, (w, _) in enumerate(rest) if w == "->"]
            if len(arrows) != 1:
                c = rest[arrows[1]][1] if len(arrows) > 1 else len(raw) + 1
                raise NetSyntaxError("expected exactly one '->'", lineno, c)
            ins, outs = rest[: arrows[0]], rest[arrows[0] + 1 :]
            sides = []
            for side in (ins, outs):
                ids = []
                for w, c in side:
                    pid = _ident(w, c, lineno)
                    if pid in ids:
                        raise NetSyntaxError(f"place {pid!r} repeated; arcs have weight 1", lineno, c)
                    ids.append(pid)
                sides.append(tuple(ids))
            if tid in seen_trans or tid in places:
                raise DuplicateId(tid, lineno)
            seen_trans.add(tid)
            transitions.append((tid, sides[0], sides[1]))
            refs.append((lineno, tid, sides[0] + sides[1]))

        else:
            raise NetSyntaxError(f"unknown keyword {kw!r}", lineno, col)

    if name is None:
        raise NetSyntaxError("empty document", *last)
    for lineno, tid, used in refs:
        for p in used:
            if p not in places:
                if p in seen_trans:
                    raise NetSyntaxError(f"{p!r} is a transition, not a place", lineno, 1)
                raise UndeclaredPlace(p, tid, lineno)
    return NetDocument(name, tuple(places.items()), tuple(transitions))


def parse_net(text: str) -> tuple[PetriNet, Marking]:
    """Parse and validate; raises :class:`~lucent.net.InvalidNet` for a disconnected net."""
    return parse_document(text).to_net()


def load_net(path) -> tuple[PetriNet, Marking]:
    with open(path, encoding="utf-8") as fh:
        return parse_net(fh.read())


def serialize(doc: NetDocument) -> str:
    lines = [f"net {doc.name}"]
    for p, k in doc.places:
        lines.append(f"place {p} init {k}" if k else f"place {p}")
    for t, ins, outs in doc.transitions:
        lines.append(" ".join(["trans", t, ":", *ins, "->", *outs]))
    return "\n".join(lines) + "\n"


def serialize_net(net: PetriNet, marking: Marking | None = None, name: str = "net") -> str:
    return serialize(NetDocument.from_net(net, marking, name))

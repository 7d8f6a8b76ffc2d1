"""Lucency, transparency and conflict-pairs over a finished reachability graph."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .net import Marking, PetriNet
from .semantics import DEFAULT_CAP, ReachabilityGraph, Unbounded, enabled, explore

__all__ = [
    "LucencyVerdict",
    "ConflictPair",
    "check_lucency",
    "lucency_of",
    "transparency",
    "is_transparent",
    "find_conflict_pairs",
    "is_conflict_pair",
    "agreement_split",
]


@dataclass(frozen=True)
class LucencyVerdict:
    lucent: bool
    witness: tuple[Marking, Marking] | None = None
    footprint_index: dict = field(default_factory=dict, repr=False, compare=False)
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "lucent": self.lucent,
            "reason": self.reason,
            "witness": None if self.witness is None else [str(m) for m in self.witness],
            "witness_enabled": (
                None
                if self.witness is None or not self.footprint_index
                else sorted(_footprint_of(self.footprint_index, self.witness[0]))
            ),
        }


def _footprint_of(index, m):
    for fp, ms in index.items():
        if m in ms:
            return fp
    return frozenset()


def check_lucency(net: PetriNet, rg: ReachabilityGraph) -> LucencyVerdict:
    """Lucent iff no two reachable markings enable the same transitions.

    The witness is the lexicographically smallest colliding pair.
    """
    rg.require_complete()
    index: dict[frozenset, list[Marking]] = defaultdict(list)
    for m in rg.nodes:
        index[rg.enabled(m)].append(m)
    witness = None
    for ms in index.values():
        if len(ms) > 1:
            a, b = sorted(ms, key=Marking.tokens)[:2]
            if witness is None or (a.tokens(), b.tokens()) < (witness[0].tokens(), witness[1].tokens()):
                witness = (a, b)
    frozen = {fp: sorted(ms, key=Marking.tokens) for fp, ms in index.items()}
    return LucencyVerdict(witness is None, witness, frozen)


def lucency_of(net: PetriNet, m0: Marking, cap: int = DEFAULT_CAP) -> LucencyVerdict:
    """Explore and check; unbounded nets are reported non-lucent."""
    try:
        rg = explore(net, m0, cap)
    except Unbounded as exc:
        return LucencyVerdict(False, None, {}, reason=f"unbounded: {exc}")
    return check_lucency(net, rg)


def is_transparent(net: PetriNet, m: Marking, en=None) -> bool:
    en = enabled(net, m) if en is None else en
    hidden_free = set()
    for t in en:
        hidden_free |= net.preset(t)
    return m == Marking(hidden_free)


def transparency(net: PetriNet, rg: ReachabilityGraph) -> tuple[dict, bool]:
    """Per-marking transparency and whether every reachable marking is transparent."""
    rg.require_complete()
    result = {m: is_transparent(net, m, rg.enabled(m)) for m in rg.nodes}
    return result, all(result.values())


def agreement_split(m1: Marking, m2: Marking) -> tuple[Marking, Marking, Marking]:
    agree = m1 & m2
    return agree, m1 - agree, m2 - agree


@dataclass(frozen=True)
class ConflictPair:
    m1: Marking
    m2: Marking
    agree: Marking
    disagree1: Marking
    disagree2: Marking

    @classmethod
    def of(cls, m1: Marking, m2: Marking) -> "ConflictPair":
        return cls(m1, m2, *agreement_split(m1, m2))

    def to_dict(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("m1", "m2", "agree", "disagree1", "disagree2")}


def _covers_inputs(net: PetriNet, m: Marking, transitions) -> bool:
    return all(any(p in m for p in net.preset(t)) for t in transitions)


def is_conflict_pair(net: PetriNet, m1: Marking, m2: Marking, en1, en2) -> bool:
    """The four marking-level conditions; reachability is the caller's concern."""
    return (
        bool(en1)
        and bool(en2)
        and not (en1 & en2)
        and _covers_inputs(net, m2, en1)
        and _covers_inputs(net, m1, en2)
    )


def find_conflict_pairs(net: PetriNet, rg: ReachabilityGraph) -> list[ConflictPair]:
    """All unordered conflict-pairs among the reachable markings.

    Each pair is reported once with ``m1`` the lexicographically smaller
    marking; the list is sorted.
    """
    rg.require_complete()
    live = [m for m in rg.nodes if rg.successors[m]]
    en = {m: rg.enabled(m) for m in live}
    by_place: dict[str, set] = defaultdict(set)
    for m in live:
        for p in m:
            by_place[p].add(m)

    found = set()
    for m1 in live:
        # m2 must mark an input place of every transition m1 enables
        candidates = None
        for t in en[m1]:
            marks = set()
            for p in net.preset(t):
                marks |= by_place.get(p, set())
            candidates = marks if candidates is None else candidates & marks
            if not candidates:
                break
        for m2 in candidates or ():
            if m2 == m1:
                continue
            if is_conflict_pair(net, m1, m2, en[m1], en[m2]):
                a, b = sorted((m1, m2), key=Marking.tokens)
                found.add((a, b))
    return [ConflictPair.of(a, b) for a, b in sorted(found, key=lambda ab: (ab[0].tokens(), ab[1].tokens()))]

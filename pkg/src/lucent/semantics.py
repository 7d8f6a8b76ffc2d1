"""Token game, reachability graphs and behavioral verdicts."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx

from .net import Marking, PetriNet, PetriNetError, NotInNet

__all__ = [
    "DEFAULT_CAP",
    "NotEnabled",
    "StateSpaceExceeded",
    "Unbounded",
    "IncompleteStateSpace",
    "ReachabilityGraph",
    "BehaviorReport",
    "enabled",
    "fire",
    "fire_sequence",
    "explore",
    "behavior",
]

DEFAULT_CAP = int(os.environ.get("LUCENT_DEFAULT_CAP", 1_000_000))


class NotEnabled(PetriNetError):
    def __init__(self, transition: str, marking: Marking, index: int | None = None):
        self.transition = transition
        self.marking = marking
        self.index = index
        where = "" if index is None else f" at step {index}"
        super().__init__(f"{transition} is not enabled in {marking}{where}")


class StateSpaceExceeded(PetriNetError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"state space exceeds the cap of {cap} markings")


class Unbounded(PetriNetError):
    """Raised when a reached marking strictly covers one of its ancestors."""

    def __init__(self, smaller: Marking, larger: Marking, sequence: tuple[str, ...]):
        self.smaller = smaller
        self.larger = larger
        self.sequence = sequence
        super().__init__(
            f"unbounded: {larger} strictly covers its ancestor {smaller} "
            f"(pumping sequence {' '.join(sequence) or '<>'})"
        )


class IncompleteStateSpace(PetriNetError):
    pass


def enabled(net: PetriNet, m: Marking) -> frozenset:
    """Transitions whose every input place holds a token."""
    candidates = set()
    for p in m:
        if p in net:
            candidates |= net.postset(p)
    return frozenset(t for t in candidates if all(m[p] >= 1 for p in net.preset(t)))


def _fire_unchecked(net: PetriNet, m: Marking, t: str) -> Marking:
    counts = m.to_dict()
    for p in net.preset(t):
        k = counts[p] - 1
        if k:
            counts[p] = k
        else:
            del counts[p]
    for p in net.postset(t):
        counts[p] = counts.get(p, 0) + 1
    return Marking._raw(dict(sorted(counts.items())))


def fire(net: PetriNet, m: Marking, t: str) -> Marking:
    """Fire ``t`` in ``m``: ``(m - •t) + t•``."""
    if t not in net.transition_set:
        raise NotInNet(t)
    if not all(m[p] >= 1 for p in net.preset(t)):
        raise NotEnabled(t, m)
    return _fire_unchecked(net, m, t)


def fire_sequence(net: PetriNet, m: Marking, sequence: Iterable[str]) -> Marking:
    """Fire ``sequence`` step by step; a failure reports its 1-based position."""
    for i, t in enumerate(sequence, start=1):
        try:
            m = fire(net, m, t)
        except NotEnabled as exc:
            raise NotEnabled(t, exc.marking, i) from None
    return m


@dataclass(frozen=True, eq=False)
class ReachabilityGraph:
    """Explored markings with labelled firing edges.

    ``nodes`` lists markings in breadth-first discovery order, ``root`` first.
    ``components`` is the SCC partition; ``terminal`` holds the indices of
    components without outgoing edges in the condensation.
    """

    net: PetriNet
    root: Marking
    nodes: tuple[Marking, ...]
    edges: tuple[tuple[Marking, str, Marking], ...]
    complete: bool
    components: tuple[frozenset, ...] = ()
    component_of: dict = field(default_factory=dict, repr=False)
    component_dag: nx.DiGraph | None = field(default=None, repr=False)
    terminal: frozenset = frozenset()
    successors: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, m) -> bool:
        return m in self.successors

    def enabled(self, m: Marking) -> frozenset:
        return frozenset(t for t, _ in self.successors[m])

    def reachable_from(self, m: Marking) -> set:
        seen = {m}
        todo = [m]
        while todo:
            x = todo.pop()
            for _, y in self.successors[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return seen

    def require_complete(self):
        if not self.complete:
            raise IncompleteStateSpace("the reachability graph was truncated at the cap")


def _condense(nodes, successors):
    g = nx.DiGraph()
    g.add_nodes_from(range(len(nodes)))
    index = {m: i for i, m in enumerate(nodes)}
    for m, succ in successors.items():
        for _, m2 in succ:
            g.add_edge(index[m], index[m2])
    dag = nx.condensation(g)
    # deterministic component order: by the earliest discovered member
    order = sorted(dag.nodes, key=lambda c: min(dag.nodes[c]["members"]))
    renumber = {c: k for k, c in enumerate(order)}
    components = tuple(
        frozenset(nodes[i] for i in dag.nodes[c]["members"]) for c in order
    )
    component_of = {
        nodes[i]: renumber[c] for c in dag.nodes for i in dag.nodes[c]["members"]
    }
    cdag = nx.DiGraph()
    cdag.add_nodes_from(range(len(order)))
    cdag.add_edges_from((renumber[a], renumber[b]) for a, b in dag.edges)
    terminal = frozenset(k for k in cdag.nodes if cdag.out_degree(k) == 0)
    return components, component_of, cdag, terminal


def explore(
    net: PetriNet,
    m0: Marking,
    cap: int = DEFAULT_CAP,
    *,
    partial: bool = False,
    detect_unbounded: bool = True,
) -> ReachabilityGraph:
    """Breadth-first reachability graph of ``(net, m0)``.

    Raises :class:`Unbounded` as soon as a new marking strictly covers a
    marking on its own discovery path. When more than ``cap`` markings are
    found, raises :class:`StateSpaceExceeded`, or, with ``partial=True``,
    returns the explored prefix with ``complete=False``. Turning off
    ``detect_unbounded`` is only useful together with ``partial``, to look
    at a prefix of an unbounded state space.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    for p in m0:
        if p not in net.place_set:
            raise NotInNet(p)

    parent: dict[Marking, tuple[Marking, str] | None] = {m0: None}
    successors: dict[Marking, list] = {}
    order = [m0]
    queue = deque([m0])
    complete = True
    while queue:
        m = queue.popleft()
        succ = []
        for t in sorted(enabled(net, m)):
            m2 = _fire_unchecked(net, m, t)
            succ.append((t, m2))
            if m2 in parent:
                continue
            if detect_unbounded:
                _check_ancestors(m2, m, t, parent)
            if len(order) >= cap:
                if not partial:
                    raise StateSpaceExceeded(cap)
                complete = False
                continue
            parent[m2] = (m, t)
            order.append(m2)
            queue.append(m2)
        successors[m] = succ
        if not complete:
            # frontier markings stay in the graph without their successors
            for x in queue:
                successors.setdefault(x, [])
            break

    known = set(successors)
    for m in successors:
        successors[m] = [(t, m2) for t, m2 in successors[m] if m2 in known]
    nodes = tuple(order)
    edges = tuple((m, t, m2) for m in nodes for t, m2 in successors[m])
    frozen = {m: tuple(v) for m, v in successors.items()}
    components, component_of, cdag, terminal = _condense(nodes, frozen)
    return ReachabilityGraph(
        net=net,
        root=m0,
        nodes=nodes,
        edges=edges,
        complete=complete,
        components=components,
        component_of=component_of,
        component_dag=cdag,
        terminal=terminal,
        successors=frozen,
    )


def _check_ancestors(new: Marking, m: Marking, t: str, parent) -> None:
    steps = [t]
    cur: Marking | None = m
    while cur is not None:
        if new > cur:
            raise Unbounded(cur, new, tuple(reversed(steps)))
        link = parent[cur]
        if link is None:
            break
        cur, step = link
        steps.append(step)


@dataclass(frozen=True)
class BehaviorReport:
    bounded: bool
    bound_k: int | None
    safe: bool
    live: bool
    deadlock_free: bool
    dead_places: frozenset
    dead_transitions: frozenset
    home_markings: frozenset
    dead_markings: frozenset

    def to_dict(self) -> dict:
        return {
            "bounded": self.bounded,
            "bound_k": self.bound_k,
            "safe": self.safe,
            "live": self.live,
            "deadlock_free": self.deadlock_free,
            "dead_places": sorted(self.dead_places),
            "dead_transitions": sorted(self.dead_transitions),
            "home_markings": [str(m) for m in sorted(self.home_markings, key=Marking.tokens)],
            "dead_markings": [str(m) for m in sorted(self.dead_markings, key=Marking.tokens)],
        }


def home_markings(rg: ReachabilityGraph) -> frozenset:
    """Markings reachable from every reachable marking."""
    rg.require_complete()
    if len(rg.terminal) != 1:
        return frozenset()
    (only,) = rg.terminal
    return rg.components[only]


def behavior(net: PetriNet, rg: ReachabilityGraph) -> BehaviorReport:
    rg.require_complete()
    bound = max((max(m.values(), default=0) for m in rg.nodes), default=0)
    fired = {t for _, t, _ in rg.edges}
    marked = {p for m in rg.nodes for p in m}
    dead_markings = frozenset(m for m in rg.nodes if not rg.successors[m])

    # every node reaches some terminal component and cannot leave it, so
    # liveness holds iff every terminal component enables every transition
    all_t = set(net.transitions)
    live = True
    for k in rg.terminal:
        seen = set()
        for m in rg.components[k]:
            seen.update(t for t, _ in rg.successors[m])
        if seen != all_t:
            live = False
            break

    return BehaviorReport(
        bounded=True,
        bound_k=bound,
        safe=bound <= 1,
        live=live,
        deadlock_free=not dead_markings,
        dead_places=frozenset(net.places) - marked,
        dead_transitions=frozenset(all_t - fired),
        home_markings=home_markings(rg),
        dead_markings=dead_markings,
    )

"""Static net structure: places, transitions, flow, markings and clusters."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "PetriNetError",
    "NotInNet",
    "InvalidNet",
    "InvalidPath",
    "Marking",
    "PetriNet",
    "Cluster",
    "StructureReport",
    "PathClass",
    "preset_postset",
    "compute_clusters",
    "cluster_of",
    "cluster_marking",
    "classify_structure",
    "check_path",
    "path_predicates",
]


class PetriNetError(Exception):
    """Base class for all errors raised by this package."""


class NotInNet(PetriNetError, KeyError):
    def __init__(self, node):
        super().__init__(node)
        self.node = node

    def __str__(self):
        return f"unknown node {self.node!r}"


class InvalidNet(PetriNetError, ValueError):
    pass


class InvalidPath(PetriNetError, ValueError):
    pass


class Marking(Mapping[str, int]):
    """Immutable multiset of places.

    Zero counts are never stored, so two markings with the same tokens are
    equal and hash alike. ``m[p]`` is 0 for unmarked places.

    >>> Marking(["p2", "p5"]) + Marking({"p2": 1})
    Marking('[p2^2,p5]')
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, tokens: Iterable[str] | Mapping[str, int] = ()):
        counts: dict[str, int] = {}
        if isinstance(tokens, Mapping):
            for place, k in tokens.items():
                if k < 0:
                    raise ValueError(f"negative token count for {place!r}")
                if k:
                    counts[place] = int(k)
        else:
            for place in tokens:
                counts[place] = counts.get(place, 0) + 1
        self._counts = dict(sorted(counts.items()))
        self._hash = None

    @classmethod
    def _raw(cls, counts: dict[str, int]) -> "Marking":
        # counts must already be positive and sorted
        m = object.__new__(cls)
        m._counts = counts
        m._hash = None
        return m

    def __getitem__(self, place: str) -> int:
        return self._counts.get(place, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, place) -> bool:
        return place in self._counts

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Marking):
            return self._counts == other._counts
        return NotImplemented

    def __ne__(self, other):
        if isinstance(other, Marking):
            return self._counts != other._counts
        return NotImplemented

    def __le__(self, other: "Marking") -> bool:
        if not isinstance(other, Marking):
            return NotImplemented
        return all(k <= other[p] for p, k in self._counts.items())

    def __lt__(self, other: "Marking") -> bool:
        if not isinstance(other, Marking):
            return NotImplemented
        return self != other and self <= other

    def __ge__(self, other: "Marking") -> bool:
        if not isinstance(other, Marking):
            return NotImplemented
        return other <= self

    def __gt__(self, other: "Marking") -> bool:
        if not isinstance(other, Marking):
            return NotImplemented
        return other < self

    def __add__(self, other: "Marking") -> "Marking":
        counts = dict(self._counts)
        for p, k in other._counts.items():
            counts[p] = counts.get(p, 0) + k
        return Marking._raw(dict(sorted(counts.items())))

    def __sub__(self, other: "Marking") -> "Marking":
        """Multiset difference; raises if ``other`` is not covered."""
        counts = dict(self._counts)
        for p, k in other._counts.items():
            left = counts.get(p, 0) - k
            if left < 0:
                raise ValueError(f"cannot remove {k} token(s) from {p!r}")
            if left:
                counts[p] = left
            else:
                del counts[p]
        return Marking._raw(counts)

    def __and__(self, other: "Marking") -> "Marking":
        """Pointwise minimum (largest marking covered by both)."""
        return Marking._raw(
            {p: min(k, other[p]) for p, k in self._counts.items() if p in other}
        )

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    @property
    def support(self) -> frozenset:
        return frozenset(self._counts)

    def tokens(self) -> tuple[str, ...]:
        """Places listed with multiplicity, sorted; used as the canonical key."""
        return tuple(p for p, k in self._counts.items() for _ in range(k))

    def sum_over(self, places: Iterable[str]) -> int:
        return sum(self[p] for p in set(places))

    def to_dict(self) -> dict[str, int]:
        return dict(self._counts)

    def __str__(self):
        parts = [p if k == 1 else f"{p}^{k}" for p, k in self._counts.items()]
        return "[" + ",".join(parts) + "]"

    def __repr__(self):
        return f"Marking({str(self)!r})"


def marking_key(m: Marking) -> tuple[str, ...]:
    return m.tokens()


class PetriNet:
    """Ordinary Petri net ``(P, T, F)``; immutable once built.

    Arcs are ``(source, target)`` pairs between a place and a transition.
    The constructor enforces the structural invariants: disjoint non-empty
    node sets, known arc endpoints and weak connectivity.
    """

    __slots__ = (
        "places", "transitions", "_arcs", "place_set", "transition_set",
        "_pre", "_post", "_clusters", "_cluster_index", "_hash",
    )

    def __init__(
        self,
        places: Iterable[str],
        transitions: Iterable[str],
        arcs: Iterable[tuple[str, str]],
        *,
        check_connected: bool = True,
    ):
        places = frozenset(places)
        transitions = frozenset(transitions)
        arcs = frozenset((str(a), str(b)) for a, b in arcs)
        if not places:
            raise InvalidNet("a net needs at least one place")
        if not transitions:
            raise InvalidNet("a net needs at least one transition")
        shared = places & transitions
        if shared:
            raise InvalidNet(f"identifiers used as both place and transition: {sorted(shared)}")

        pre: dict[str, set] = {x: set() for x in places | transitions}
        post: dict[str, set] = {x: set() for x in places | transitions}
        for src, dst in arcs:
            if src not in pre or dst not in pre:
                missing = src if src not in pre else dst
                raise InvalidNet(f"arc ({src}, {dst}) references unknown node {missing!r}")
            if (src in places) == (dst in places):
                raise InvalidNet(f"arc ({src}, {dst}) must connect a place and a transition")
            post[src].add(dst)
            pre[dst].add(src)

        self.places = tuple(sorted(places))
        self.transitions = tuple(sorted(transitions))
        self._arcs = arcs
        self.place_set = places
        self.transition_set = transitions
        self._pre = {x: frozenset(v) for x, v in pre.items()}
        self._post = {x: frozenset(v) for x, v in post.items()}
        self._clusters = None
        self._cluster_index = None
        self._hash = None

        if check_connected and not self.is_weakly_connected():
            raise InvalidNet("the net is not weakly connected")

    @classmethod
    def _trusted(cls, places: frozenset, transitions: frozenset, pre: dict, post: dict) -> "PetriNet":
        """Build from ready-made preset/postset maps without validation.

        For nets derived from an already validated one; callers guarantee
        the invariants except connectivity, which is not checked.
        """
        net = cls.__new__(cls)
        net.places = tuple(sorted(places))
        net.transitions = tuple(sorted(transitions))
        net.place_set = places
        net.transition_set = transitions
        net._pre = pre
        net._post = post
        net._arcs = None
        net._clusters = None
        net._cluster_index = None
        net._hash = None
        return net

    def restrict(self, keep: Iterable[str], *, check_connected: bool = True) -> "PetriNet":
        """Subnet induced by the nodes in ``keep``."""
        keep = frozenset(keep) & frozenset(self._pre)
        places = self.place_set & keep
        transitions = self.transition_set & keep
        if not places:
            raise InvalidNet("a net needs at least one place")
        if not transitions:
            raise InvalidNet("a net needs at least one transition")
        net = PetriNet._trusted(
            places,
            transitions,
            {x: self._pre[x] & keep for x in keep},
            {x: self._post[x] & keep for x in keep},
        )
        if check_connected and not net.is_weakly_connected():
            raise InvalidNet("the net is not weakly connected")
        return net

    def add_transition(
        self, t: str, inputs: Iterable[str], outputs: Iterable[str], *, check_connected: bool = True
    ) -> "PetriNet":
        """A copy of the net with one fresh transition."""
        inputs, outputs = frozenset(inputs), frozenset(outputs)
        if t in self._pre:
            raise InvalidNet(f"{t!r} is already a node of the net")
        unknown = (inputs | outputs) - self.place_set
        if unknown:
            raise InvalidNet(f"places {sorted(unknown)} are not in the net")
        pre, post = dict(self._pre), dict(self._post)
        pre[t], post[t] = inputs, outputs
        for p in inputs:
            post[p] = post[p] | {t}
        for p in outputs:
            pre[p] = pre[p] | {t}
        net = PetriNet._trusted(self.place_set, self.transition_set | {t}, pre, post)
        if check_connected and not net.is_weakly_connected():
            raise InvalidNet("the net is not weakly connected")
        return net

    @property
    def arcs(self) -> frozenset:
        if self._arcs is None:
            self._arcs = frozenset((x, y) for x, ys in self._post.items() for y in ys)
        return self._arcs

    @classmethod
    def from_transitions(
        cls,
        transitions: Mapping[str, tuple[Iterable[str], Iterable[str]]],
        places: Iterable[str] = (),
        **kwargs,
    ) -> "PetriNet":
        """Build from ``{t: (inputs, outputs)}``; extra isolated places may be listed."""
        all_places = set(places)
        arcs = []
        for t, (ins, outs) in transitions.items():
            for p in ins:
                all_places.add(p)
                arcs.append((p, t))
            for p in outs:
                all_places.add(p)
                arcs.append((t, p))
        return cls(all_places, transitions, arcs, **kwargs)

    # structure queries

    @property
    def nodes(self) -> tuple[str, ...]:
        return self.places + self.transitions

    def __contains__(self, node) -> bool:
        return node in self._pre

    def is_place(self, node: str) -> bool:
        self._require(node)
        return node in self.place_set

    def _require(self, node):
        if node not in self._pre:
            raise NotInNet(node)

    def preset(self, node: str) -> frozenset:
        try:
            return self._pre[node]
        except KeyError:
            raise NotInNet(node) from None

    def postset(self, node: str) -> frozenset:
        try:
            return self._post[node]
        except KeyError:
            raise NotInNet(node) from None

    def is_weakly_connected(self) -> bool:
        start = self.places[0]
        seen = {start}
        todo = [start]
        while todo:
            x = todo.pop()
            for y in self._pre[x] | self._post[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return len(seen) == len(self._pre)

    def reachable_from(self, sources: Iterable[str]) -> frozenset:
        """Nodes lying on a directed path that starts in ``sources``."""
        seen = set()
        todo = deque()
        for s in sources:
            self._require(s)
            if s not in seen:
                seen.add(s)
                todo.append(s)
        while todo:
            x = todo.popleft()
            for y in self._post[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        return frozenset(seen)

    def clusters(self) -> tuple["Cluster", ...]:
        if self._clusters is None:
            self._clusters = _compute_clusters(self)
            self._cluster_index = {
                x: c for c in self._clusters for x in c.nodes
            }
        return self._clusters

    def cluster_of(self, node: str) -> "Cluster":
        self._require(node)
        self.clusters()
        return self._cluster_index[node]

    # value semantics

    def _key(self):
        return (self.places, self.transitions, self.arcs)

    def __eq__(self, other):
        if isinstance(other, PetriNet):
            return self._key() == other._key()
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return (
            f"PetriNet(|P|={len(self.places)}, |T|={len(self.transitions)}, "
            f"|F|={len(self.arcs)})"
        )


@dataclass(frozen=True)
class Cluster:
    places: frozenset
    transitions: frozenset

    @property
    def nodes(self) -> frozenset:
        return self.places | self.transitions

    @property
    def key(self) -> str:
        return min(self.nodes)

    def __contains__(self, node) -> bool:
        return node in self.places or node in self.transitions

    def marking(self) -> Marking:
        return cluster_marking(self)

    def __str__(self):
        return "{" + ",".join(sorted(self.nodes)) + "}"


def _compute_clusters(net: PetriNet) -> tuple[Cluster, ...]:
    place_set = net.place_set
    seen: set = set()
    out = []
    for start in net.nodes:
        if start in seen:
            continue
        members = {start}
        todo = [start]
        while todo:
            x = todo.pop()
            nbrs = net.postset(x) if x in place_set else net.preset(x)
            for y in nbrs:
                if y not in members:
                    members.add(y)
                    todo.append(y)
        # the cluster relation is symmetric on the undirected p->t arcs,
        # so the closure of any member is the whole cluster
        seen |= members
        out.append(
            Cluster(
                frozenset(x for x in members if x in place_set),
                frozenset(x for x in members if x not in place_set),
            )
        )
    out.sort(key=lambda c: c.key)
    return tuple(out)


def preset_postset(net: PetriNet, nodes) -> tuple[frozenset, frozenset]:
    """Return ``(•x, x•)`` for one node or the union over an iterable of nodes."""
    if isinstance(nodes, str):
        return net.preset(nodes), net.postset(nodes)
    pre: set = set()
    post: set = set()
    for x in nodes:
        pre |= net.preset(x)
        post |= net.postset(x)
    return frozenset(pre), frozenset(post)


def compute_clusters(net: PetriNet) -> list[Cluster]:
    """Partition of P ∪ T into clusters, ordered by smallest member id."""
    return list(net.clusters())


def cluster_of(net: PetriNet, node: str) -> Cluster:
    return net.cluster_of(node)


def cluster_marking(c: Cluster) -> Marking:
    """One token on each place of the cluster."""
    return Marking(c.places)


@dataclass(frozen=True)
class StructureReport:
    free_choice: bool
    proper: bool
    strongly_connected: bool
    p_net: bool
    t_net: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _strongly_connected(net: PetriNet) -> bool:
    start = net.places[0]
    if len(net.reachable_from([start])) != len(net.nodes):
        return False
    seen = {start}
    todo = [start]
    while todo:
        x = todo.pop()
        for y in net.preset(x):
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return len(seen) == len(net.nodes)


def classify_structure(net: PetriNet) -> StructureReport:
    presets = {net.preset(t) for t in net.transitions}
    # free-choice: distinct presets must be pairwise disjoint
    free_choice = True
    owner: dict[str, frozenset] = {}
    for pre in presets:
        for p in pre:
            if owner.setdefault(p, pre) != pre:
                free_choice = False
    return StructureReport(
        free_choice=free_choice,
        proper=all(net.preset(t) and net.postset(t) for t in net.transitions),
        strongly_connected=_strongly_connected(net),
        p_net=all(len(net.preset(t)) <= 1 and len(net.postset(t)) <= 1 for t in net.transitions),
        t_net=all(len(net.preset(p)) <= 1 and len(net.postset(p)) <= 1 for p in net.places),
    )


@dataclass(frozen=True)
class PathClass:
    elementary: bool
    circuit: bool
    disentangled: bool
    q_rooted: bool


def check_path(net: PetriNet, path: Sequence[str]) -> tuple[str, ...]:
    """Validate that ``path`` follows the flow relation; return it as a tuple."""
    path = tuple(path)
    if not path:
        raise InvalidPath("a path has at least one node")
    for x in path:
        if x not in net:
            raise InvalidPath(f"unknown node {x!r} on path")
    for a, b in zip(path, path[1:]):
        if b not in net.postset(a):
            raise InvalidPath(f"no arc from {a!r} to {b!r}")
    return path


def path_predicates(net: PetriNet, path: Sequence[str], q: Iterable[str] | None = None) -> PathClass:
    path = check_path(net, path)
    elementary = len(set(path)) == len(path)
    circuit = elementary and path[0] in net.postset(path[-1])
    disentangled = False
    if path[0] in net.place_set and path[-1] in net.place_set:
        path_places = path[::2]
        clusters = [net.cluster_of(p) for p in path_places]
        # a path alternates kinds by construction, so even positions are places
        disentangled = len(set(clusters)) == len(clusters)
    q_rooted = disentangled and q is not None and path[-1] in set(q)
    return PathClass(elementary, circuit, disentangled, q_rooted)

"""Expediting firing sequences, disentangled paths and domination checks.

Sequence positions follow the usual mathematical convention: ``i`` and
``j`` are 1-based, as in ``σ = ⟨t1, ..., tn⟩``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .net import Cluster, InvalidPath, Marking, NotInNet, PetriNet, PetriNetError, check_path
from .semantics import ReachabilityGraph, fire_sequence

__all__ = [
    "DEFAULT_EXPEDITE_BUDGET",
    "ExpediteNotPermitted",
    "FiringSequence",
    "expedite_check",
    "move_step",
    "expedite_apply",
    "expedite_closure",
    "disentangle",
    "rooted_path_from_place",
    "rooted_disentangled_paths",
    "path_max_tokens",
    "check_no_domination",
]

DEFAULT_EXPEDITE_BUDGET = 10_000


class ExpediteNotPermitted(PetriNetError):
    pass


@dataclass(frozen=True)
class FiringSequence:
    """A transition sequence that is enabled from ``origin`` in ``net``."""

    net: PetriNet
    origin: Marking
    steps: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        # raises NotEnabled with the offending index
        object.__setattr__(self, "_final", fire_sequence(self.net, self.origin, self.steps))

    @property
    def final(self) -> Marking:
        return self._final

    def __len__(self):
        return len(self.steps)

    def __iter__(self) -> Iterator[str]:
        return iter(self.steps)


def _check_indices(n: int, i: int, j: int):
    if not (1 <= i < j <= n):
        raise IndexError(f"need 1 <= i < j <= {n}, got i={i}, j={j}")


def expedite_check(net: PetriNet, m: Marking, sigma: Sequence[str], i: int, j: int) -> bool:
    """Whether the ``j``-th step may be moved to position ``i``."""
    sigma = tuple(sigma)
    _check_indices(len(sigma), i, j)
    target = net.cluster_of(sigma[j - 1])
    if any(net.cluster_of(t) == target for t in sigma[i - 1 : j - 1]):
        return False
    try:
        fire_sequence(net, m, sigma[: i - 1] + (sigma[j - 1],))
    except PetriNetError:
        return False
    return True


def move_step(steps: Sequence[str], i: int, j: int) -> tuple[str, ...]:
    """``⟨t1..t_{i-1}, t_j, t_i..t_{j-1}, t_{j+1}..t_n⟩``."""
    steps = tuple(steps)
    _check_indices(len(steps), i, j)
    return steps[: i - 1] + (steps[j - 1],) + steps[i - 1 : j - 1] + steps[j:]


def expedite_apply(seq: FiringSequence, i: int, j: int) -> FiringSequence:
    if not expedite_check(seq.net, seq.origin, seq.steps, i, j):
        raise ExpediteNotPermitted(f"step {j} ({seq.steps[j - 1]}) cannot move to position {i}")
    return FiringSequence(seq.net, seq.origin, move_step(seq.steps, i, j))


def expedite_closure(
    net: PetriNet,
    m: Marking,
    sigma: Sequence[str],
    budget: int = DEFAULT_EXPEDITE_BUDGET,
) -> tuple[frozenset, bool]:
    """All sequences reachable from ``sigma`` by repeated expediting.

    Returns ``(sequences, truncated)``; enumeration stops once ``budget``
    distinct sequences have been collected.
    """
    start = FiringSequence(net, m, sigma).steps
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        n = len(cur)
        for j in range(2, n + 1):
            for i in range(1, j):
                if not expedite_check(net, m, cur, i, j):
                    continue
                nxt = move_step(cur, i, j)
                if nxt in seen:
                    continue
                if len(seen) >= budget:
                    return frozenset(seen), True
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen), False


def _split_path(net: PetriNet, path: tuple[str, ...]):
    if path[0] not in net.place_set or path[-1] not in net.place_set:
        raise InvalidPath("path must start and end with a place")
    return list(path[::2]), list(path[1::2])


def disentangle(net: PetriNet, path: Sequence[str], target: Cluster) -> tuple[str, ...]:
    """Shortcut ``path`` into a ``target``-rooted disentangled path.

    Walks a pointer over the places; whenever a later place shares the
    current place's cluster, jumps to the last such place and continues
    through its output transition on the path.
    """
    path = check_path(net, path)
    places, trans = _split_path(net, path)
    if places[-1] not in target.places:
        raise InvalidPath(f"path ends in {places[-1]!r}, outside the target cluster")
    clusters = [net.cluster_of(p) for p in places]
    out: list[str] = []
    i = 0
    n = len(places)
    while True:
        p = places[i]
        if p in target.places:
            out.append(p)
            return tuple(out)
        same = [j for j in range(i + 1, n) if clusters[j] == clusters[i]]
        j = same[-1] if same else i
        t = trans[j]
        if p not in net.preset(t):
            raise InvalidPath(f"{p!r} is not an input of {t!r}; the net is not free-choice")
        out += [p, t]
        i = j + 1


def _shortest_path(net: PetriNet, start: str, goals: frozenset) -> tuple[str, ...] | None:
    parent = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        if x in goals:
            path = []
            while x is not None:
                path.append(x)
                x = parent[x]
            return tuple(reversed(path))
        for y in sorted(net.postset(x)):
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return None


def rooted_path_from_place(
    net: PetriNet, rg: ReachabilityGraph, p: str, c: Cluster
) -> tuple[str, ...] | None:
    """A ``c``-rooted disentangled path from a non-dead place ``p``, if any."""
    if p not in net.place_set:
        raise NotInNet(p)
    if c not in net.clusters():
        raise NotInNet(str(c))
    if not any(p in m for m in rg.nodes):
        return None
    path = _shortest_path(net, p, c.places)
    if path is None:
        return None
    return disentangle(net, path, c)


def rooted_disentangled_paths(
    net: PetriNet, start: str, c: Cluster, limit: int = 1000
) -> list[tuple[str, ...]]:
    """Enumerate ``c``-rooted disentangled paths starting in ``start`` (at most ``limit``)."""
    out: list[tuple[str, ...]] = []

    def walk(path: list[str], used: set):
        if len(out) >= limit:
            return
        p = path[-1]
        if p in c.places:
            out.append(tuple(path))
            return
        for t in sorted(net.postset(p)):
            for q in sorted(net.postset(t)):
                cq = net.cluster_of(q)
                if cq in used:
                    continue
                used.add(cq)
                path += [t, q]
                walk(path, used)
                del path[-2:]
                used.discard(cq)

    walk([start], {net.cluster_of(start)})
    return out


def path_max_tokens(rg: ReachabilityGraph, path: Iterable[str]) -> int:
    """Largest number of tokens on the path's places in any reachable marking."""
    rg.require_complete()
    places = {x for x in path if x in rg.net.place_set}
    return max((m.sum_over(places) for m in rg.nodes), default=0)


def check_no_domination(rg: ReachabilityGraph, c: Cluster | None = None, *, allow_partial: bool = False) -> list:
    """Domination violations among reachable markings.

    With a cluster: markings covering ``Mrk(c)`` without being equal to it.
    Without: ordered pairs ``(larger, smaller)`` with ``larger > smaller``.
    An empty list means no violation. With ``allow_partial`` a truncated
    graph is accepted; violations found are still real, but an empty list
    proves nothing.
    """
    if not allow_partial:
        rg.require_complete()
    if c is not None:
        target = c.marking()
        return [m for m in rg.nodes if m >= target and m != target]

    by_place: dict[str, set] = {}
    for m in rg.nodes:
        for p in m:
            by_place.setdefault(p, set()).add(m)
    out = []
    for small in rg.nodes:
        if not small:
            candidates = set(rg.nodes)
        else:
            sets = sorted((by_place[p] for p in small), key=len)
            candidates = set(sets[0]).intersection(*sets[1:])
        for big in candidates:
            if big != small and small <= big:
                out.append((big, small))
    out.sort(key=lambda pair: (pair[0].tokens(), pair[1].tokens()))
    return out

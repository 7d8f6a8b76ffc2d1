"""Home-cluster detection and the clean / short-circuit reduction."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Literal

from .net import Cluster, InvalidNet, Marking, PetriNet, PetriNetError, classify_structure
from .semantics import (
    DEFAULT_CAP,
    ReachabilityGraph,
    Unbounded,
    behavior,
    explore,
    home_markings,
)

__all__ = [
    "CleanFailed",
    "UnsafeInitialMarking",
    "ClusterStatus",
    "HomeClusterReport",
    "RelatingCheck",
    "conn_nodes",
    "clean_net",
    "short_circuit",
    "short_circuit_transition",
    "cleaned_short_circuit",
    "find_home_clusters",
    "verify_relating_theorem",
]

Mode = Literal["behavioral", "structural", "both"]


class CleanFailed(PetriNetError):
    pass


class UnsafeInitialMarking(PetriNetError):
    pass


class TheoremDisagreement(PetriNetError):
    pass


def conn_nodes(net: PetriNet, m0: Marking) -> frozenset:
    """Nodes on some directed path starting in an initially marked place."""
    return net.reachable_from(m0.support)


def clean_net(net: PetriNet, m0: Marking, *, check_connected: bool = True) -> PetriNet:
    """Restrict ``net`` to :func:`conn_nodes` with the induced flow."""
    keep = conn_nodes(net, m0)
    try:
        return net.restrict(keep, check_connected=check_connected)
    except InvalidNet as exc:
        raise CleanFailed(f"cleaned net is not a valid Petri net: {exc}") from None


def short_circuit_transition(net: PetriNet, c: Cluster) -> str:
    """Fresh id ``t_C__<smallest place>``, suffixed until unused."""
    base = "t_C__" + min(c.places)
    name = base
    k = 1
    while name in net:
        name = f"{base}_{k}"
        k += 1
    return name


def _check_safe(net: PetriNet, m0: Marking, cap: int) -> ReachabilityGraph:
    if any(k > 1 for k in m0.values()):
        raise UnsafeInitialMarking(f"{m0} puts more than one token on a place")
    try:
        rg = explore(net, m0, cap)
    except Unbounded as exc:
        raise UnsafeInitialMarking(f"(N, {m0}) is unbounded") from exc
    if not behavior(net, rg).safe:
        raise UnsafeInitialMarking(f"(N, {m0}) is not safe")
    return rg


def short_circuit(
    net: PetriNet,
    c: Cluster,
    m0: Marking,
    *,
    cap: int = DEFAULT_CAP,
    assume_safe: bool = False,
) -> PetriNet:
    """Add a fresh transition consuming ``Pl(c)`` and producing the support of ``m0``."""
    if not c.places:
        raise InvalidNet("cannot short-circuit a cluster without places")
    missing = [p for p in c.places | m0.support if p not in net.place_set]
    if missing:
        raise InvalidNet(f"places {sorted(missing)} are not in the net")
    if not assume_safe:
        _check_safe(net, m0, cap)
    tc = short_circuit_transition(net, c)
    return net.add_transition(tc, c.places, m0.support)


def cleaned_short_circuit(net: PetriNet, c: Cluster, m0: Marking, **kwargs) -> tuple[PetriNet, str]:
    """``N_{C,M}`` together with the id of its short-circuit transition."""
    cleaned = clean_net(net, m0, check_connected=False)
    tc = short_circuit_transition(cleaned, c)
    return short_circuit(cleaned, c, m0, **kwargs), tc


@dataclass
class ClusterStatus:
    in_conn: bool
    behavioral_home: bool | None = None
    short_circuit_live_bounded: bool | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class HomeClusterReport:
    mode: str
    home_clusters: list[Cluster]
    per_cluster: dict[Cluster, ClusterStatus]
    counters: Counter = field(default_factory=Counter)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "home_clusters": [sorted(c.nodes) for c in self.home_clusters],
            "clusters": [
                {"cluster": sorted(c.nodes), **s.to_dict()} for c, s in self.per_cluster.items()
            ],
        }


def _live_and_bounded(net: PetriNet, m0: Marking, cap: int) -> bool:
    try:
        rg = explore(net, m0, cap)
    except Unbounded:
        return False
    return behavior(net, rg).live


def find_home_clusters(
    net: PetriNet,
    m0: Marking,
    mode: Mode = "behavioral",
    *,
    cap: int = DEFAULT_CAP,
    rg: ReachabilityGraph | None = None,
    counters: Counter | None = None,
) -> HomeClusterReport:
    """Clusters ``C`` whose ``Mrk(C)`` is a home marking of ``(net, m0)``.

    ``behavioral`` reads home markings off the reachability graph.
    ``structural`` decides each cluster inside ``conn`` by checking that the
    short-circuited cleaned net is live and bounded; it needs a safe ``m0``.
    ``both`` runs the two and raises :class:`TheoremDisagreement` if they
    differ on an eligible cluster.
    """
    if mode not in ("behavioral", "structural", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    counters = Counter() if counters is None else counters
    clusters = net.clusters()
    conn = conn_nodes(net, m0)
    status = {c: ClusterStatus(in_conn=c.nodes <= conn) for c in clusters}

    if mode in ("behavioral", "both"):
        if rg is None:
            rg = explore(net, m0, cap)
        homes = home_markings(rg)
        for c in clusters:
            status[c].behavioral_home = c.marking() in homes

    if mode in ("structural", "both"):
        if any(k > 1 for k in m0.values()):
            raise UnsafeInitialMarking(f"{m0} puts more than one token on a place")
        if rg is None:
            rg = _check_safe(net, m0, cap)
        elif not behavior(net, rg).safe:
            raise UnsafeInitialMarking(f"(N, {m0}) is not safe")
        for c in clusters:
            counters["clusters"] += 1
            if not status[c].in_conn:
                continue
            cleaned = clean_net(net, m0, check_connected=False)
            counters["clean"] += 1
            sc = short_circuit(cleaned, c, m0, assume_safe=True)
            counters["short_circuit"] += 1
            status[c].short_circuit_live_bounded = _live_and_bounded(sc, m0, cap)
            counters["live_bounded_decisions"] += 1

    if mode == "both":
        bad = [
            c for c in clusters
            if status[c].in_conn and status[c].behavioral_home != status[c].short_circuit_live_bounded
        ]
        if bad:
            raise TheoremDisagreement(
                "behavioral and structural verdicts differ on " + ", ".join(map(str, bad))
            )

    if mode == "structural":
        homes_list = [c for c in clusters if status[c].short_circuit_live_bounded]
    else:
        homes_list = [c for c in clusters if status[c].behavioral_home]
    return HomeClusterReport(mode, homes_list, status, counters)


@dataclass(frozen=True)
class RelatingCheck:
    """The three statements for one cluster, each decided on its own state space."""

    cluster: Cluster
    home_in_original: bool
    home_in_short_circuit: bool
    short_circuit_live_bounded: bool
    clean_preserves_presets: bool

    @property
    def agree(self) -> bool:
        return self.home_in_original == self.home_in_short_circuit == self.short_circuit_live_bounded

    def to_dict(self) -> dict:
        return {
            "cluster": sorted(self.cluster.nodes),
            "home_in_original": self.home_in_original,
            "home_in_short_circuit": self.home_in_short_circuit,
            "short_circuit_live_bounded": self.short_circuit_live_bounded,
            "clean_preserves_presets": self.clean_preserves_presets,
            "agree": self.agree,
        }


def verify_relating_theorem(net: PetriNet, m0: Marking, *, cap: int = DEFAULT_CAP) -> list[RelatingCheck]:
    """Decide the three equivalent statements for every cluster inside ``conn``.

    ``clean_preserves_presets`` is False when cleaning drops an input place
    of a kept transition; the equivalence can then fail, because the
    cleaned net lets that transition fire.
    """
    rg = _check_safe(net, m0, cap)
    homes = home_markings(rg)
    conn = conn_nodes(net, m0)
    preserves = all(net.preset(t) <= conn for t in net.transitions if t in conn)
    out = []
    for c in net.clusters():
        if not c.nodes <= conn:
            continue
        sc, tc = cleaned_short_circuit(net, c, m0, assume_safe=True)
        c_hat = Cluster(c.places, c.transitions | {tc})
        try:
            sc_rg = explore(sc, m0, cap)
        except Unbounded:
            # an unbounded net is not live-and-bounded, and a home cluster
            # would make it safe, so both statements are false
            in_sc = False
            live_bounded = False
        else:
            in_sc = c_hat in sc.clusters() and c_hat.marking() in home_markings(sc_rg)
            live_bounded = behavior(sc, sc_rg).live
        out.append(
            RelatingCheck(c, c.marking() in homes, in_sc, live_bounded, preserves)
        )
    return out


def short_circuit_structure(net: PetriNet, c: Cluster, m0: Marking):
    """Structure report of ``N_{C,M}`` and whether the extended cluster survives."""
    sc, tc = cleaned_short_circuit(net, c, m0, assume_safe=True)
    c_hat = Cluster(c.places, c.transitions | {tc})
    return classify_structure(sc), c_hat in sc.clusters()

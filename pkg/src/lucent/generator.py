"""Seeded random proper free-choice nets for property testing.

Two construction routes are mixed:

* block-structured nets: a random tree of sequence, exclusive choice,
  parallel split/join and loop blocks, wired between a source place and a
  sink place, optionally closed by a transition from the sink back to the
  source (or to the entry of the main body, leaving an initialization
  phase in front);
* random cluster nets: clusters with shared presets and random outputs,
  kept only when the requested properties are verified on the state space.

Every net emitted with ``guarantee_home_cluster`` has its seeded cluster
checked behaviorally before it is returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Literal, NamedTuple

from .home_cluster import cleaned_short_circuit, find_home_clusters
from .net import Cluster, InvalidNet, Marking, PetriNet, PetriNetError, classify_structure
from .semantics import StateSpaceExceeded, Unbounded, explore

__all__ = [
    "GenConfig",
    "GeneratedNet",
    "GenerationFailed",
    "generate",
    "scaling_family",
    "MAX_RETRIES",
]

MAX_RETRIES = 50

Mutation = Literal["break_free_choice", "remove_home_cluster"]
Shape = Literal["block", "random"]


class GenerationFailed(PetriNetError):
    pass


class _Reject(Exception):
    pass


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    place_budget: int = 6
    transition_budget: int = 6
    branching: int = 2
    guarantee_home_cluster: bool = True
    strongly_connected: bool = False
    mutation: Mutation | None = None
    shape: Shape | None = None
    max_markings: int = 10_000

    def __post_init__(self):
        if self.place_budget < 1 or self.transition_budget < 1:
            raise ValueError("budgets must be at least 1")
        if self.branching < 1:
            raise ValueError("branching must be at least 1")
        if self.mutation not in (None, "break_free_choice", "remove_home_cluster"):
            raise ValueError(f"unknown mutation {self.mutation!r}")
        if self.shape not in (None, "block", "random"):
            raise ValueError(f"unknown shape {self.shape!r}")


class GeneratedNet(NamedTuple):
    net: PetriNet
    marking: Marking
    home_cluster: Cluster | None


class _Builder:
    def __init__(self):
        self.places: list[str] = []
        self.transitions: dict[str, tuple[set, set]] = {}

    def place(self) -> str:
        p = f"p{len(self.places) + 1}"
        self.places.append(p)
        return p

    def trans(self, ins, outs) -> str:
        t = f"t{len(self.transitions) + 1}"
        self.transitions[t] = (set(ins), set(outs))
        return t

    def build(self, **kwargs) -> PetriNet:
        return PetriNet.from_transitions(
            {t: (sorted(i), sorted(o)) for t, (i, o) in self.transitions.items()},
            places=self.places,
            **kwargs,
        )


# block trees: ("act",) | ("seq", a, b) | ("xor", [..]) | ("and", [..]) | ("loop", do, redo)

def _tree_cost(node) -> tuple[int, int]:
    """(transitions, internal places) contributed by a block."""
    kind = node[0]
    if kind == "act":
        return 1, 0
    if kind == "seq":
        a, b = _tree_cost(node[1]), _tree_cost(node[2])
        return a[0] + b[0], a[1] + b[1] + 1
    if kind == "xor":
        costs = [_tree_cost(ch) for ch in node[1]]
        return sum(c[0] for c in costs), sum(c[1] for c in costs)
    if kind == "and":
        costs = [_tree_cost(ch) for ch in node[1]]
        return sum(c[0] for c in costs) + 2, sum(c[1] for c in costs) + 2 * len(costs)
    if kind == "loop":
        a, b = _tree_cost(node[1]), _tree_cost(node[2])
        return a[0] + b[0] + 1, a[1] + b[1] + 1
    raise AssertionError(kind)


def _random_tree(rng: random.Random, cfg: GenConfig):
    width = max(2, cfg.branching)
    tree = ("act",)

    def leaves(node, path=()):
        if node[0] == "act":
            yield path
        elif node[0] in ("seq", "loop"):
            yield from leaves(node[1], path + (1,))
            yield from leaves(node[2], path + (2,))
        else:
            for k, ch in enumerate(node[1]):
                yield from leaves(ch, path + (k,))

    def replace_at(node, path, new):
        if not path:
            return new
        head, rest = path[0], path[1:]
        if node[0] in ("seq", "loop"):
            parts = list(node)
            parts[head] = replace_at(node[head], rest, new)
            return tuple(parts)
        children = list(node[1])
        children[head] = replace_at(children[head], rest, new)
        return (node[0], children)

    for _ in range(200):
        nt, npl = _tree_cost(tree)
        if nt >= cfg.transition_budget or npl + 2 >= cfg.place_budget:
            break
        spot = rng.choice(list(leaves(tree)))
        kind = rng.choices(["seq", "xor", "and", "loop"], weights=[4, 3, 2, 1])[0]
        if kind == "seq":
            new = ("seq", ("act",), ("act",))
        elif kind == "loop":
            new = ("loop", ("act",), ("act",))
        else:
            new = (kind, [("act",)] * rng.randint(2, width))
        tree = replace_at(tree, spot, new)
    return tree


def _emit(b: _Builder, node, entry: str, exit_: str):
    kind = node[0]
    if kind == "act":
        b.trans([entry], [exit_])
    elif kind == "seq":
        mid = b.place()
        _emit(b, node[1], entry, mid)
        _emit(b, node[2], mid, exit_)
    elif kind == "xor":
        for ch in node[1]:
            _emit(b, ch, entry, exit_)
    elif kind == "and":
        ins = [b.place() for _ in node[1]]
        outs = [b.place() for _ in node[1]]
        b.trans([entry], ins)
        for ch, i, o in zip(node[1], ins, outs):
            _emit(b, ch, i, o)
        b.trans(outs, [exit_])
    elif kind == "loop":
        mid = b.place()
        _emit(b, node[1], entry, mid)
        b.trans([mid], [exit_])
        _emit(b, node[2], mid, entry)


def _block_net(rng: random.Random, cfg: GenConfig):
    b = _Builder()
    source = b.place()
    sink = b.place()
    closing = cfg.strongly_connected or rng.random() < 0.3
    with_init = closing and not cfg.strongly_connected
    if with_init:
        # initialization block runs once, then the body repeats forever
        body_entry = b.place()
        _emit(b, _random_tree(rng, replace(cfg, transition_budget=max(1, cfg.transition_budget // 3))), source, body_entry)
        _emit(b, _random_tree(rng, cfg), body_entry, sink)
        back = b.trans([sink], [body_entry])
    else:
        _emit(b, _random_tree(rng, cfg), source, sink)
        back = b.trans([sink], [source]) if closing else None
    if not cfg.strongly_connected:
        _add_feeders(rng, b)
    net = b.build()
    seeded = Cluster(frozenset([sink]), frozenset([back]) if back else frozenset())
    return net, Marking([source]), seeded


def _add_feeders(rng: random.Random, b: _Builder):
    # unmarked source branches that never fire and lie outside conn
    for _ in range(rng.choice([0, 0, 0, 1, 2])):
        target = rng.choice(b.places)
        f = b.place()
        b.trans([f], [target])


def _random_cluster_net(rng: random.Random, cfg: GenConfig):
    b = _Builder()
    n_clusters = rng.randint(2, max(2, cfg.place_budget))
    clusters = []
    for k in range(n_clusters):
        wide = k and k < n_clusters - 1 and cfg.branching > 1 and rng.random() < 0.25
        width = rng.randint(2, cfg.branching) if wide else 1
        clusters.append([b.place() for _ in range(width)])
    # clusters are laid out left to right; outputs mostly point forward and the
    # last cluster is a single sink place
    for k, places in enumerate(clusters[:-1]):
        later = [p for c in clusters[k + 1 :] for p in c]
        for _ in range(rng.randint(1, cfg.branching)):
            pool = b.places if rng.random() < 0.15 else later
            n_out = 2 if rng.random() < 0.25 and len(pool) > 1 else 1
            b.trans(places, rng.sample(pool, n_out))
    try:
        net = b.build()
    except InvalidNet:
        raise _Reject from None
    return net, Marking(clusters[0]), None


def _verify(net: PetriNet, m0: Marking, seeded: Cluster | None, cfg: GenConfig):
    try:
        rg = explore(net, m0, cfg.max_markings)
    except (Unbounded, StateSpaceExceeded):
        raise _Reject
    report = find_home_clusters(net, m0, "behavioral", rg=rg)
    if seeded is None:
        if not report.home_clusters:
            raise _Reject
        seeded = report.home_clusters[0]
    elif seeded not in report.home_clusters:
        raise _Reject
    return seeded


def _close_random(net: PetriNet, m0: Marking, c: Cluster):
    # short-circuiting a home cluster gives a strongly connected net with the
    # extended cluster as home cluster
    sc, tc = cleaned_short_circuit(net, c, m0, assume_safe=True)
    if not classify_structure(sc).strongly_connected:
        raise _Reject
    return sc, Cluster(c.places, c.transitions | {tc})


def _break_free_choice(rng: random.Random, net: PetriNet) -> PetriNet:
    presets = sorted({net.preset(t) for t in net.transitions if net.preset(t)}, key=sorted)
    if len(presets) < 2:
        raise _Reject
    s1, s2 = rng.sample(presets, 2)
    t2 = rng.choice(sorted(t for t in net.transitions if net.preset(t) == s2))
    p = rng.choice(sorted(s1))
    return PetriNet(net.places, net.transitions, set(net.arcs) | {(p, t2)})


def _remove_home_cluster(rng: random.Random, net: PetriNet, m0: Marking, cfg: GenConfig) -> PetriNet:
    candidates = [c for c in net.clusters() if c.transitions]
    if not candidates:
        raise _Reject
    c = rng.choice(candidates)
    z = "p_leak"
    t = "t_leak"
    arcs = set(net.arcs) | {(p, t) for p in c.places} | {(t, z)}
    mutated = PetriNet(net.places + (z,), net.transitions + (t,), arcs)
    try:
        rg = explore(mutated, m0, cfg.max_markings)
    except (Unbounded, StateSpaceExceeded):
        return mutated
    if find_home_clusters(mutated, m0, "behavioral", rg=rg).home_clusters:
        raise _Reject
    return mutated


def _attempt(rng: random.Random, cfg: GenConfig) -> GeneratedNet:
    shape = cfg.shape or ("random" if rng.random() < 0.35 else "block")
    if shape == "block":
        net, m0, seeded = _block_net(rng, cfg)
    else:
        net, m0, seeded = _random_cluster_net(rng, cfg)
        if cfg.strongly_connected or cfg.guarantee_home_cluster:
            seeded = _verify(net, m0, None, cfg)
            if cfg.strongly_connected:
                net, seeded = _close_random(net, m0, seeded)
        elif not classify_structure(net).proper:
            raise _Reject

    if cfg.guarantee_home_cluster or cfg.strongly_connected or cfg.mutation:
        seeded = _verify(net, m0, seeded, cfg)
    else:
        seeded = None

    if cfg.mutation == "break_free_choice":
        net, seeded = _break_free_choice(rng, net), None
    elif cfg.mutation == "remove_home_cluster":
        net, seeded = _remove_home_cluster(rng, net, m0, cfg), None
    return GeneratedNet(net, m0, seeded)


def generate(config: GenConfig) -> GeneratedNet:
    """Draw one net; deterministic in ``config``.

    Raises :class:`GenerationFailed` after ``MAX_RETRIES`` rejected draws.
    """
    rng = random.Random(config.seed)
    for _ in range(MAX_RETRIES):
        try:
            return _attempt(rng, config)
        except _Reject:
            continue
    raise GenerationFailed(f"no acceptable net after {MAX_RETRIES} draws for {config}")


def scaling_family(n_clusters: int) -> tuple[PetriNet, Marking]:
    """Proper free-choice net with ``n_clusters`` clusters and two reachable markings.

    ``p1 -> t1 -> a``; ``a`` synchronizes with a place ``c`` that only the end
    of a long chain can mark, so the chain lies inside ``conn`` but never
    fires.
    """
    if n_clusters < 3:
        raise ValueError("need at least 3 clusters")
    transitions = {"t1": (["p1"], ["a"])}
    chain = n_clusters - 2
    transitions["x"] = (["a", "c"], ["d1"])
    for k in range(1, chain):
        transitions[f"y{k}"] = ([f"d{k}"], [f"d{k + 1}"])
    transitions[f"y{chain}"] = ([f"d{chain}"], ["c"])
    net = PetriNet.from_transitions(transitions)
    return net, Marking(["p1"])

"""Executable property checks over generated nets.

Each ``check_*`` function returns a list of human-readable violations; an
empty list means the property held on that input.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from .generator import GenConfig, generate
from .home_cluster import (
    UnsafeInitialMarking,
    conn_nodes,
    find_home_clusters,
    short_circuit_structure,
    verify_relating_theorem,
)
from .lucency import (
    ConflictPair,
    agreement_split,
    check_lucency,
    find_conflict_pairs,
    is_conflict_pair,
    transparency,
)
from .net import Cluster, Marking, PetriNet, classify_structure
from .semantics import (
    StateSpaceExceeded,
    Unbounded,
    behavior,
    enabled,
    explore,
    fire,
    fire_sequence,
)
from .structural import (
    check_no_domination,
    expedite_closure,
    path_max_tokens,
    rooted_disentangled_paths,
    rooted_path_from_place,
)

__all__ = [
    "check_home_cluster_net",
    "check_supporting",
    "check_expedite",
    "random_run",
    "check_relating",
    "RelatingOutcome",
    "replay_conflict_construction",
    "conflict_pair_holds",
    "SuiteResult",
    "run_suite",
    "suite_config",
]

MAX_MARKINGS = 10_000


def check_home_cluster_net(
    net: PetriNet,
    m0: Marking,
    rng: random.Random,
    *,
    path_pairs: int = 10,
    path_limit: int = 200,
) -> list[str]:
    """Everything that must hold for a proper free-choice net with a home cluster."""
    out = []
    rg = explore(net, m0, MAX_MARKINGS)
    homes = find_home_clusters(net, m0, rg=rg).home_clusters
    if not homes:
        return ["no home cluster"]
    report = behavior(net, rg)
    if not check_lucency(net, rg).lucent:
        out.append("not lucent")
    if not report.safe:
        out.append(f"not safe (bound {report.bound_k})")
    pairs = find_conflict_pairs(net, rg)
    if pairs:
        out.append(f"conflict-pair {pairs[0].m1} / {pairs[0].m2}")
    dom = check_no_domination(rg)
    if dom:
        out.append(f"dominating markings {dom[0][0]} > {dom[0][1]}")
    for c in homes:
        if check_no_domination(rg, c):
            out.append(f"marking strictly covers Mrk({c})")

    live_places = sorted({p for m in rg.nodes for p in m})
    candidates = [(p, c) for p in live_places for c in homes]
    sample = candidates if len(candidates) <= path_pairs else rng.sample(candidates, path_pairs)
    for p, c in sample:
        rooted = rooted_path_from_place(net, rg, p, c)
        if rooted is None:
            out.append(f"no {c}-rooted disentangled path from non-dead {p}")
            continue
        for path in [rooted] + rooted_disentangled_paths(net, p, c, path_limit):
            k = path_max_tokens(rg, path)
            if k > 1:
                out.append(f"path {'-'.join(path)} holds {k} tokens")
                break
    return out


def check_supporting(net: PetriNet, m0: Marking) -> tuple[list[str], dict]:
    """Propositions relating lucency, transparency, clusters and connectivity.

    Returns violations and a few facts the caller may aggregate (for
    instance, whether the net is lucent but not fully transparent).
    """
    out = []
    facts = {}
    try:
        rg = explore(net, m0, MAX_MARKINGS)
    except Unbounded:
        facts["unbounded"] = True
        return out, facts
    verdict = check_lucency(net, rg)
    _, fully = transparency(net, rg)
    structure = classify_structure(net)
    report = behavior(net, rg)
    homes = find_home_clusters(net, m0, rg=rg).home_clusters
    facts.update(lucent=verdict.lucent, fully_transparent=fully, home=bool(homes))

    if verdict.lucent and len(rg) > 2 ** len(net.transitions):
        out.append(f"lucent with {len(rg)} > 2^{len(net.transitions)} markings")
    if fully and not verdict.lucent:
        out.append("fully transparent but not lucent")
    if structure.proper:
        for c in homes:
            if report.dead_markings:
                if report.dead_markings != {c.marking()}:
                    out.append(f"dead markings {set(map(str, report.dead_markings))} besides Mrk({c})")
                if len(c.places) != 1 or c.transitions:
                    out.append(f"home cluster {c} of a net with a dead marking is not a lone place")
            elif not c.transitions:
                out.append(f"deadlock-free net with transition-less home cluster {c}")
    if structure.free_choice and structure.strongly_connected and homes:
        if not (report.live and report.safe and verdict.lucent):
            out.append("strongly connected free-choice net with home cluster is not live, safe and lucent")
    if structure.free_choice and report.live and homes and not structure.proper:
        out.append("perpetual free-choice net is not proper")
    return out, facts


def random_run(net: PetriNet, m0: Marking, rng: random.Random, length: int) -> tuple[str, ...]:
    steps = []
    m = m0
    for _ in range(length):
        en = sorted(enabled(net, m))
        if not en:
            break
        t = rng.choice(en)
        steps.append(t)
        m = fire(net, m, t)
    return tuple(steps)


def _per_cluster(net: PetriNet, steps) -> dict:
    order: dict[Cluster, list] = {}
    for t in steps:
        order.setdefault(net.cluster_of(t), []).append(t)
    return order


def check_expedite(net: PetriNet, m0: Marking, sigma, budget: int = 2000) -> tuple[list[str], int]:
    """Expediting keeps sequences enabled, the end marking, the step multiset and per-cluster order."""
    out = []
    final = fire_sequence(net, m0, sigma)
    closure, _ = expedite_closure(net, m0, sigma, budget)
    ref_counts = Counter(sigma)
    ref_order = _per_cluster(net, sigma)
    for seq in sorted(closure):
        try:
            end = fire_sequence(net, m0, seq)
        except Exception as exc:  # noqa: BLE001 - any failure is a violation
            out.append(f"{seq} not enabled: {exc}")
            continue
        if end != final:
            out.append(f"{seq} ends in {end}, expected {final}")
        if Counter(seq) != ref_counts:
            out.append(f"{seq} is not a permutation of {sigma}")
        if _per_cluster(net, seq) != ref_order:
            out.append(f"{seq} reorders steps within a cluster")
    return out, len(closure)


@dataclass
class RelatingOutcome:
    """Per-net result of the three-statement check and the short-circuit shape check."""

    clusters: int = 0
    disagreements: list = field(default_factory=list)
    gap_disagreements: list = field(default_factory=list)
    shape_failures: list = field(default_factory=list)
    home_shape_failures: list = field(default_factory=list)


def check_relating(net: PetriNet, m0: Marking) -> RelatingOutcome:
    """Decide statements (1)-(3) per eligible cluster and inspect each ``N_{C,M}``.

    Disagreements in nets where cleaning drops an input place of a kept
    transition go to ``gap_disagreements``; all others to ``disagreements``.
    Short-circuited nets that are not strongly connected free-choice nets
    with the extended cluster go to ``shape_failures``, and additionally to
    ``home_shape_failures`` when the cluster is a home cluster.
    """
    res = RelatingOutcome()
    for chk in verify_relating_theorem(net, m0, cap=MAX_MARKINGS):
        res.clusters += 1
        if not chk.agree:
            target = res.disagreements if chk.clean_preserves_presets else res.gap_disagreements
            target.append(f"cluster {chk.cluster}: {chk.to_dict()}")
        structure, kept = short_circuit_structure(net, chk.cluster, m0)
        if not (structure.strongly_connected and structure.free_choice and kept):
            msg = (
                f"N_C,M for {chk.cluster}: strongly_connected={structure.strongly_connected}, "
                f"free_choice={structure.free_choice}, extended cluster kept={kept}"
            )
            res.shape_failures.append(msg)
            if chk.home_in_original:
                res.home_shape_failures.append(msg)
    return res


def replay_conflict_construction(
    net: PetriNet, m1: Marking, m2: Marking, max_steps: int = 1000
) -> ConflictPair | None:
    """Turn two markings with the same footprint into a candidate conflict-pair.

    Fires, in both markings alike, transitions whose inputs avoid every
    disagreement place until none is enabled. Returns ``None`` if that does
    not settle within ``max_steps``.
    """
    _, d1, d2 = agreement_split(m1, m2)
    disagreement = d1.support | d2.support
    for _ in range(max_steps):
        candidates = sorted(
            t for t in enabled(net, m1) if not (net.preset(t) & disagreement)
        )
        if not candidates:
            return ConflictPair.of(m1, m2)
        t = candidates[0]
        m1 = fire(net, m1, t)
        m2 = fire(net, m2, t)
    return None


def conflict_pair_holds(net: PetriNet, reachable, pair: ConflictPair) -> bool:
    return (
        pair.m1 in reachable
        and pair.m2 in reachable
        and is_conflict_pair(net, pair.m1, pair.m2, enabled(net, pair.m1), enabled(net, pair.m2))
    )


def suite_config(seed: int, **overrides) -> GenConfig:
    """Deterministic spread of sizes and shapes indexed by ``seed``."""
    rng = random.Random(seed * 7919 + 17)
    cfg = dict(
        seed=seed,
        place_budget=rng.randint(3, 30),
        transition_budget=rng.randint(3, 30),
        branching=rng.randint(1, 4),
        guarantee_home_cluster=True,
        strongly_connected=rng.random() < 0.4,
        max_markings=MAX_MARKINGS,
    )
    cfg.update(overrides)
    return GenConfig(**cfg)


@dataclass
class SuiteResult:
    counts: Counter = field(default_factory=Counter)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"ok": self.ok, "counts": dict(self.counts), "violations": self.violations}


def run_suite(seeds: int, *, start: int = 0, budget: int = 2000, progress: Callable | None = None) -> SuiteResult:
    """Run every property family on ``seeds`` generated nets each."""
    res = SuiteResult()

    def record(kind, seed, problems):
        res.counts[kind] += 1
        for msg in problems:
            res.violations.append({"check": kind, "seed": seed, "problem": msg})

    for seed in range(start, start + seeds):
        rng = random.Random(seed)
        g = generate(suite_config(seed))
        record("home_cluster_nets", seed, check_home_cluster_net(g.net, g.marking, rng))
        problems, facts = check_supporting(g.net, g.marking)
        record("supporting", seed, problems)

        free = generate(suite_config(seed, guarantee_home_cluster=False, strongly_connected=False, shape="random"))
        problems, facts = check_supporting(free.net, free.marking)
        record("supporting", seed, problems)
        if facts.get("lucent") and not facts.get("fully_transparent"):
            res.counts["lucent_not_transparent"] += 1

        for net, m0 in ((g.net, g.marking), (free.net, free.marking)):
            sigma = random_run(net, m0, rng, rng.randint(2, 7))
            problems, _ = check_expedite(net, m0, sigma, budget)
            record("expedite", seed, problems)
            try:
                rel = check_relating(net, m0)
            except (UnsafeInitialMarking, StateSpaceExceeded):
                res.counts["relating_skipped"] += 1
                continue
            record("relating", seed, rel.disagreements)
            record("short_circuit_home_shape", seed, rel.home_shape_failures)
            res.counts["relating_clusters"] += rel.clusters
            res.counts["relating_gap_disagreements"] += len(rel.gap_disagreements)
            res.counts["short_circuit_not_strongly_connected"] += len(rel.shape_failures)
        if progress:
            progress(seed)
    return res

import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lucent.home_cluster import find_home_clusters
from lucent.net import InvalidPath, Marking, NotInNet, PetriNet, path_predicates
from lucent.semantics import IncompleteStateSpace, NotEnabled, explore, fire_sequence
from lucent.structural import (
    ExpediteNotPermitted,
    FiringSequence,
    check_no_domination,
    disentangle,
    expedite_apply,
    expedite_check,
    expedite_closure,
    move_step,
    path_max_tokens,
    rooted_disentangled_paths,
    rooted_path_from_place,
)
from lucent.theorems import random_run

from .strategies import explore_bounded, generated_nets

M = lambda *ps: Marking(ps)  # noqa: E731


# expediting


def test_expedite_check_examples(N3):
    net, m = N3
    assert expedite_check(net, m, ["t1", "t4", "t2"], 1, 2)
    assert not expedite_check(net, m, ["t1", "t4", "t2"], 1, 3)


def test_expedite_same_cluster_is_refused():
    # t1 and t2 share the cluster of p; t2 may not overtake t1
    net = PetriNet.from_transitions({"t1": (["p"], ["p"]), "t2": (["p"], ["q"])})
    assert not expedite_check(net, M("p"), ["t1", "t2"], 1, 2)


def test_expedite_indices_checked(N3):
    net, m = N3
    with pytest.raises(IndexError):
        expedite_check(net, m, ["t1", "t4"], 2, 2)
    with pytest.raises(IndexError):
        expedite_check(net, m, ["t1", "t4"], 0, 1)


def test_move_step_positions():
    assert move_step("abcd", 2, 4) == ("a", "d", "b", "c")
    assert move_step("ab", 1, 2) == ("b", "a")


def test_expedite_apply(N3):
    net, m = N3
    seq = FiringSequence(net, m, ("t1", "t4", "t2"))
    out = expedite_apply(seq, 1, 2)
    assert out.steps == ("t4", "t1", "t2")
    assert out.final == seq.final
    with pytest.raises(ExpediteNotPermitted):
        expedite_apply(seq, 1, 3)


def test_firing_sequence_is_validated(N3):
    net, m = N3
    with pytest.raises(NotEnabled):
        FiringSequence(net, m, ("t2",))


def test_expedite_closure_examples(N3):
    net, m = N3
    assert expedite_closure(net, m, []) == (frozenset({()}), False)
    assert expedite_closure(net, m, ["t1"]) == (frozenset({("t1",)}), False)
    assert expedite_closure(net, m, ["t1", "t4"]) == (frozenset({("t1", "t4"), ("t4", "t1")}), False)


def test_expedite_closure_budget(N3):
    net, m = N3
    seqs, truncated = expedite_closure(net, m, ["t1", "t4", "t2", "t3", "t1"], budget=2)
    assert truncated and len(seqs) == 2


def _cluster_order(net, steps):
    out = {}
    for t in steps:
        out.setdefault(net.cluster_of(t), []).append(t)
    return out


@given(generated_nets(home=False), st.integers(0, 2**16), st.integers(0, 7))
def test_expediting_is_safe(g, seed, length):
    net, m0 = g.net, g.marking
    sigma = random_run(net, m0, random.Random(seed), length)
    final = fire_sequence(net, m0, sigma)
    closure, _ = expedite_closure(net, m0, sigma, budget=500)
    for seq in closure:
        assert fire_sequence(net, m0, seq) == final
        assert Counter(seq) == Counter(sigma)
        assert _cluster_order(net, seq) == _cluster_order(net, sigma)


# disentangled paths


def test_disentangle_worked_example(N3):
    net, _ = N3
    path = ["p6", "t4", "p5", "t3", "p3", "t2", "p4", "t3", "p3", "t2", "p1"]
    target = net.cluster_of("p1")
    assert disentangle(net, path, target) == ("p6", "t4", "p5", "t3", "p3", "t2", "p1")


def test_disentangle_start_in_target(N3):
    net, _ = N3
    path = ["p1", "t1", "p2", "t2", "p1"]
    assert disentangle(net, path, net.cluster_of("p1")) == ("p1",)


def test_disentangle_keeps_disentangled_path(N3):
    net, _ = N3
    path = ("p5", "t3", "p3", "t2", "p1")
    assert disentangle(net, path, net.cluster_of("p1")) == path


def test_disentangle_rejects_bad_paths(N3):
    net, _ = N3
    with pytest.raises(InvalidPath):
        disentangle(net, ["p1", "t1"], net.cluster_of("p2"))
    with pytest.raises(InvalidPath):
        disentangle(net, ["p1", "t1", "p2"], net.cluster_of("p1"))


@given(generated_nets(home=False), st.data())
def test_disentangle_postcondition(g, data):
    net = g.net
    # random walk along the flow, then cut at a place
    x = data.draw(st.sampled_from(net.places))
    path = [x]
    for _ in range(data.draw(st.integers(0, 12))):
        nxt = sorted(net.postset(path[-1]))
        if not nxt:
            break
        path.append(data.draw(st.sampled_from(nxt)))
    if path[-1] not in net.place_set:
        path.pop()
    target = net.cluster_of(path[-1])
    out = disentangle(net, path, target)
    pc = path_predicates(net, out, target.places)
    assert out[0] == path[0]
    assert pc.disentangled and pc.q_rooted


def test_rooted_path_examples(N1):
    net, m0 = N1
    rg = explore(net, m0)
    c = net.cluster_of("p4")
    assert rooted_path_from_place(net, rg, "p1", c) == ("p1", "t1", "p2", "t3", "p3", "t4", "p4")
    assert rooted_path_from_place(net, rg, "p4", c) == ("p4",)
    with pytest.raises(NotInNet):
        rooted_path_from_place(net, rg, "zz", c)


def test_rooted_path_from_dead_place():
    net = PetriNet.from_transitions({"t1": (["a"], ["b"]), "t2": (["c"], ["b"])})
    rg = explore(net, M("a"))
    assert rooted_path_from_place(net, rg, "c", net.cluster_of("b")) is None


def test_rooted_paths_enumeration(N1):
    net, _ = N1
    paths = rooted_disentangled_paths(net, "p1", net.cluster_of("p4"))
    assert paths == [("p1", "t1", "p2", "t3", "p3", "t4", "p4"), ("p1", "t2", "p2", "t3", "p3", "t4", "p4")]


def test_path_max_tokens_examples(N1, N3):
    rg1 = explore(*N1)
    assert path_max_tokens(rg1, ("p1", "t1", "p2", "t3", "p3", "t4", "p4")) == 1
    rg3 = explore(*N3)
    path = ("p6", "t4", "p5", "t3", "p3", "t2", "p1")
    # the initial marking [p1,p3,p6] already puts three tokens on the path
    brute = max(m["p1"] + m["p3"] + m["p5"] + m["p6"] for m in rg3.nodes)
    assert brute == 3
    assert path_max_tokens(rg3, path) == 3
    dead = PetriNet.from_transitions({"t1": (["a"], ["b"]), "t2": (["c"], ["b"])})
    assert path_max_tokens(explore(dead, M("a")), ("c",)) == 0


# domination


def test_no_domination_examples(N1, N2):
    rg1 = explore(*N1)
    assert check_no_domination(rg1, N1[0].cluster_of("p4")) == []
    assert check_no_domination(explore(*N2)) == []


def test_domination_found_on_prefix():
    net = PetriNet(["p", "q"], ["t"], [("p", "t"), ("t", "p"), ("t", "q")])
    rg = explore(net, M("p"), cap=3, partial=True, detect_unbounded=False)
    assert not rg.complete
    assert (M("p", "q"), M("p")) in check_no_domination(rg, allow_partial=True)
    with pytest.raises(IncompleteStateSpace):
        check_no_domination(rg)


def test_domination_pairs_bruteforce():
    net = PetriNet.from_transitions({"t1": (["a"], ["b", "c"]), "t2": (["c"], [])}, check_connected=True)
    rg = explore(net, M("a"))
    assert check_no_domination(rg) == [(M("b", "c"), M("b"))]


@given(generated_nets(home=True))
def test_home_cluster_nets_have_safe_rooted_paths(g):
    net = g.net
    rg = explore_bounded(g)
    for c in find_home_clusters(net, g.marking, rg=rg).home_clusters:
        assert check_no_domination(rg, c) == []
        for p in sorted({p for m in rg.nodes for p in m}):
            path = rooted_path_from_place(net, rg, p, c)
            assert path is not None
            assert path_max_tokens(rg, path) <= 1
    assert check_no_domination(rg) == []

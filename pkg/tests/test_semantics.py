import pytest
from hypothesis import given

from lucent.net import Marking, NotInNet, PetriNet
from lucent.semantics import (
    IncompleteStateSpace,
    NotEnabled,
    StateSpaceExceeded,
    Unbounded,
    behavior,
    enabled,
    explore,
    fire,
    fire_sequence,
    home_markings,
)

from .strategies import explore_bounded, generated_nets

M = lambda *ps: Marking(ps)  # noqa: E731


def test_enabled_examples(N2, N3):
    net2, _ = N2
    assert enabled(net2, M("p2", "p5")) == enabled(net2, M("p2", "p6")) == {"t3"}
    assert enabled(net2, Marking()) == set()
    net3, _ = N3
    assert enabled(net3, M("p1", "p3", "p6")) == {"t1", "t4"}


def test_fire_examples(N2, N3):
    net2, m2 = N2
    assert fire(net2, m2, "t1") == M("p2", "p5")
    net3, m3 = N3
    assert fire(net3, m3, "t4") == M("p1", "p3", "p5")
    loop = PetriNet(["p"], ["t"], [("p", "t"), ("t", "p")])
    assert fire(loop, M("p"), "t") == M("p")


def test_fire_errors(N2):
    net, m = N2
    with pytest.raises(NotEnabled):
        fire(net, m, "t3")
    with pytest.raises(NotInNet):
        fire(net, m, "t9")


def test_fire_sequence_examples(N3):
    net, m = N3
    assert fire_sequence(net, m, ["t1", "t4"]) == M("p2", "p3", "p5")
    assert fire_sequence(net, m, ["t1", "t2", "t1", "t4"]) == M("p2", "p4", "p5")
    assert fire_sequence(net, m, []) == m


def test_fire_sequence_reports_index(N3):
    net, m = N3
    with pytest.raises(NotEnabled) as err:
        fire_sequence(net, m, ["t1", "t4", "t3", "t1"])
    assert err.value.index == 3


def test_explore_n2_exact(N2):
    net, m = N2
    rg = explore(net, m)
    expected = {M("p1"), M("p2", "p5"), M("p2", "p6"), M("p3", "p5"), M("p3", "p6"), M("p4")}
    assert set(rg.nodes) == expected and len(rg.nodes) == 6


def test_explore_n1_has_four_nodes(N1):
    assert len(explore(*N1)) == 4


def test_unbounded_detection():
    net = PetriNet(["p", "q"], ["t"], [("p", "t"), ("t", "p"), ("t", "q")])
    with pytest.raises(Unbounded) as err:
        explore(net, M("p"))
    assert err.value.larger > err.value.smaller


def test_cap(N3):
    net, m = N3
    with pytest.raises(StateSpaceExceeded):
        explore(net, m, cap=3)
    rg = explore(net, m, cap=3, partial=True)
    assert not rg.complete and len(rg) == 3
    with pytest.raises(IncompleteStateSpace):
        behavior(net, rg)
    with pytest.raises(ValueError):
        explore(net, m, cap=0)


def test_behavior_n1(N1):
    net, m = N1
    rep = behavior(net, explore(net, m))
    assert not rep.live
    assert rep.home_markings == {M("p4")}
    assert rep.dead_markings == {M("p4")}
    assert rep.safe and rep.bound_k == 1


def test_behavior_n3(N3):
    net, m = N3
    rg = explore(net, m)
    rep = behavior(net, rg)
    assert rep.live and rep.safe and rep.deadlock_free
    assert rep.dead_markings == set()
    assert rep.home_markings == set(rg.nodes)


def test_dead_nodes():
    net = PetriNet.from_transitions({"t1": (["a"], ["b"]), "t2": (["c"], ["b"])})
    rep = behavior(net, explore(net, M("a")))
    assert rep.dead_places == {"c"}
    assert rep.dead_transitions == {"t2"}


def _reach(rg, m):
    return rg.reachable_from(m)


@given(generated_nets(home=False))
def test_edges_follow_firing_rule(g):
    net, m0 = g.net, g.marking
    rg = explore_bounded(g)
    assert rg.root == m0 == rg.nodes[0]
    for m, t, m2 in rg.edges:
        assert m2 == (m - Marking(net.preset(t))) + Marking(net.postset(t))
        assert m2.total - m.total == len(net.postset(t)) - len(net.preset(t))
    assert _reach(rg, m0) == set(rg.nodes)
    # components agree with mutual reachability
    for m in rg.nodes:
        for m2 in _reach(rg, m):
            same = m in _reach(rg, m2)
            assert same == (rg.component_of[m] == rg.component_of[m2])


@given(generated_nets(home=False))
def test_explore_is_deterministic(g):
    a = explore_bounded(g)
    b = explore(g.net, g.marking)
    assert a.nodes == b.nodes and a.edges == b.edges


@given(generated_nets(home=False))
def test_home_markings_and_liveness_by_bruteforce(g):
    net, m0 = g.net, g.marking
    rg = explore_bounded(g)
    reach = {m: _reach(rg, m) for m in rg.nodes}
    homes = home_markings(rg)
    for h in rg.nodes:
        assert (h in homes) == all(h in reach[m] for m in rg.nodes)
    live = all(
        any(t in rg.enabled(x) for x in reach[m]) for m in rg.nodes for t in net.transitions
    )
    rep = behavior(net, rg)
    assert rep.live == live
    if rep.live:
        assert rep.deadlock_free
    if rep.safe:
        assert rep.bound_k <= 1

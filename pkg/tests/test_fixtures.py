"""Every behavioral fact stated about the three worked nets.

If any of these fails, the fixture reconstruction is wrong and nothing
built on it can be trusted.
"""

from lucent.home_cluster import find_home_clusters
from lucent.lucency import check_lucency, find_conflict_pairs
from lucent.net import Marking, classify_structure
from lucent.semantics import behavior, enabled, explore, fire_sequence

M = lambda *ps: Marking(ps)  # noqa: E731


def _sets(clusters):
    return [set(c.nodes) for c in clusters]


def test_n1_facts(N1):
    net, m0 = N1
    rg = explore(net, m0)
    assert _sets(net.clusters()) == [{"p1", "t1", "t2"}, {"p2", "t3"}, {"p3", "t4", "t5"}, {"p4"}]
    assert len(rg) == 4
    footprints = [rg.enabled(m) for m in rg.nodes]
    assert len(set(footprints)) == 4
    rep = behavior(net, rg)
    assert not rep.live
    assert rep.home_markings == {M("p4")}
    assert check_lucency(net, rg).lucent
    assert _sets(find_home_clusters(net, m0).home_clusters) == [{"p4"}]


def test_n2_facts(N2):
    net, m0 = N2
    rg = explore(net, m0)
    assert set(rg.nodes) == {M("p1"), M("p2", "p5"), M("p2", "p6"), M("p3", "p5"), M("p3", "p6"), M("p4")}
    assert enabled(net, M("p2", "p5")) == enabled(net, M("p2", "p6")) == {"t3"}
    assert not classify_structure(net).free_choice
    assert check_lucency(net, rg).witness == (M("p2", "p5"), M("p2", "p6"))


def test_n3_facts(N3):
    net, m0 = N3
    rg = explore(net, m0)
    assert _sets(net.clusters()) == [{"p1", "t1"}, {"p2", "p3", "t2"}, {"p4", "p5", "t3"}, {"p6", "t4"}]
    assert classify_structure(net).t_net
    rep = behavior(net, rg)
    assert rep.live and rep.safe
    assert rep.home_markings == set(rg.nodes)
    v = check_lucency(net, rg)
    assert not v.lucent
    assert v.witness == (M("p1", "p3", "p6"), M("p1", "p4", "p6"))
    assert enabled(net, v.witness[0]) == enabled(net, v.witness[1]) == {"t1", "t4"}
    # the two markings of the conflict-pair example are reached as described
    assert fire_sequence(net, m0, ["t1", "t4"]) == M("p2", "p3", "p5")
    assert fire_sequence(net, m0, ["t1", "t2", "t1", "t4"]) == M("p2", "p4", "p5")
    pairs = find_conflict_pairs(net, rg)
    assert any(p.m1 == M("p2", "p3", "p5") and p.m2 == M("p2", "p4", "p5") for p in pairs)
    assert find_home_clusters(net, m0).home_clusters == []

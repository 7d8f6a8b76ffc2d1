import pydot
from hypothesis import given

from lucent.dot import HIGHLIGHT_ATTRS, export_dot

from .strategies import generated_nets


def _parse(text):
    (graph,) = pydot.graph_from_dot_data(text)
    return graph


def test_n1_counts(N1):
    net, m0 = N1
    g = _parse(export_dot(net, m0))
    nodes = [n for n in g.get_nodes() if n.get_name() not in ("node", "edge", "graph")]
    assert len(nodes) == 9
    assert len(g.get_edges()) == 10


def test_shapes_and_tokens(N1):
    net, m0 = N1
    g = _parse(export_dot(net, m0))
    shapes = {n.get_name().strip('"'): n.get_shape() for n in g.get_nodes()}
    assert all(shapes[p] == "circle" for p in net.places)
    assert all(shapes[t] == "box" for t in net.transitions)
    label = g.get_node('"p1"')[0].get_label()
    assert "●" in label


def test_highlights(N1):
    net, m0 = N1
    assert "color" not in export_dot(net, m0, [])
    text = export_dot(net, m0, ["p1", "t1", "p2"])
    marked = {line.split()[0].strip('"') for line in text.splitlines() if HIGHLIGHT_ATTRS in line}
    assert marked == {"p1", "t1", "p2"}


def test_many_tokens_shown_as_number(N1):
    from lucent.net import Marking

    assert "p1\\n5" in export_dot(N1[0], Marking({"p1": 5}))


@given(generated_nets(home=False))
def test_output_is_deterministic_and_parses(g):
    a = export_dot(g.net, g.marking)
    assert a == export_dot(g.net, g.marking)
    parsed = _parse(a)
    assert len(parsed.get_edges()) == len(g.net.arcs)

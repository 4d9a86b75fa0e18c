import json

import pytest

from zxwebs.diagram import (
    Color,
    Diagram,
    DiagramError,
    DiagramParseError,
    Kind,
    Node,
    Phase,
    deserialize,
    export,
    read_webs,
    serialize,
    validate,
)


def minimal_y_diagram():
    """A single pi/2 Z spider with one open output leg."""
    return Diagram(
        nodes=[Node.spider("s", Color.Z, 1, (0, 0, 0)),
               Node.boundary_out("o", (0, 0, 1))],
        edges=[("s", "o")],
    )


def test_phase_predicates():
    assert Phase(1).is_half and Phase(3).is_half
    assert Phase(0).is_pi_multiple and Phase(2).is_pi_multiple
    assert Phase(5) == Phase(1)
    assert str(Phase(2)) == "π"


def test_minimal_y_diagram_is_valid():
    assert validate(minimal_y_diagram()) == []


def test_boundary_degree_two_is_one_violation():
    d = Diagram(
        nodes=[Node.spider("a", Color.Z, 0, (0, 0, 0)),
               Node.spider("b", Color.Z, 0, (1, 0, 0)),
               Node.boundary_out("o", (0, 0, 1))],
        edges=[("a", "o"), ("b", "o")],
    )
    bad = validate(d)
    assert len(bad) == 1
    assert bad[0].subject == "o" and bad[0].code == "degree"


@pytest.mark.parametrize("case", [
    "self_loop", "parallel", "bare_spider", "bad_layer",
    "spider_fields", "boundary_fields", "measure_fields", "edge_kind",
])
def test_each_violation_type_is_detected(case):
    spider = Node.spider("s", Color.Z, 0, (0, 0, 0))
    other = Node.spider("t", Color.X, 0, (1, 0, 0))
    if case == "self_loop":
        d = Diagram([spider, other], [("s", "t"), ("s", "s")])
        codes = {"self-loop"}
    elif case == "parallel":
        d = Diagram([spider, other], [("s", "t"), ("t", "s")])
        codes = {"parallel-edge"}
    elif case == "bare_spider":
        d = Diagram([spider], [])
        codes = {"degree"}
    elif case == "bad_layer":
        d = Diagram([spider, Node.boundary_out("o", (0, 0, -1))], [("s", "o")])
        codes = {"layer"}
    elif case == "spider_fields":
        broken = Node(id="s", kind=Kind.SPIDER, pos=(0, 0, 0))
        d = Diagram([broken, Node.boundary_out("o", (0, 0, 1))], [("s", "o")])
        codes = {"fields"}
    elif case == "boundary_fields":
        broken = Node(id="o", kind=Kind.BOUNDARY_OUT, pos=(0, 0, 1), color=Color.Z)
        d = Diagram([spider, broken], [("s", "o")])
        codes = {"fields"}
    elif case == "measure_fields":
        broken = Node(id="m", kind=Kind.MEASURE_OUT, pos=(0, 0, 1))
        d = Diagram([spider, broken], [("s", "m")])
        codes = {"fields"}
    else:
        d = Diagram([spider, other], [("s", "t")], edge_kinds={("s", "t"): "hadamard"})
        codes = {"edge-kind"}
    assert codes <= {v.code for v in validate(d)}


def test_construction_rejects_structural_corruption():
    spider = Node.spider("s", Color.Z, 0, (0, 0, 0))
    with pytest.raises(DiagramError, match="duplicate"):
        Diagram([spider, spider], [])
    with pytest.raises(DiagramError, match="unknown node"):
        Diagram([spider], [("s", "ghost")])


def test_round_trip_identity_and_byte_stability():
    d = minimal_y_diagram()
    text = serialize(d)
    again = deserialize(text)
    assert again == d
    assert serialize(again) == text


def test_canonical_order_is_input_independent():
    nodes = [Node.spider("s", Color.Z, 1, (0, 0, 0)),
             Node.boundary_out("o", (0, 0, 1)),
             Node.spider("t", Color.X, 0, (1, 0, 0))]
    edges = [("s", "o"), ("s", "t")]
    d1 = Diagram(nodes, edges)
    d2 = Diagram(list(reversed(nodes)), [(b, a) for a, b in reversed(edges)])
    assert d1 == d2
    assert serialize(d1) == serialize(d2)


def test_parse_errors():
    with pytest.raises(DiagramParseError, match="line"):
        deserialize("{ not json")
    with pytest.raises(DiagramParseError, match="version"):
        deserialize(json.dumps({"version": 99, "nodes": [], "edges": []}))
    bad_kind = {"version": 1, "metadata": {},
                "nodes": [{"id": "a", "kind": "wurst", "pos": [0, 0, 0]}],
                "edges": []}
    with pytest.raises(DiagramParseError, match="unknown kind"):
        deserialize(json.dumps(bad_kind))
    dangling = {"version": 1, "metadata": {}, "nodes": [], "edges": [["a", "b"]]}
    with pytest.raises(DiagramParseError, match="unknown node id"):
        deserialize(json.dumps(dangling))


def test_edge_kind_survives_round_trip_and_is_flagged():
    spider = Node.spider("s", Color.Z, 0, (0, 0, 0))
    other = Node.spider("t", Color.X, 0, (1, 0, 0))
    doc = {"version": 1, "metadata": {},
           "nodes": [{"id": "s", "kind": "spider", "color": "Z", "phase": 0,
                      "pos": [0, 0, 0]},
                     {"id": "t", "kind": "spider", "color": "X", "phase": 0,
                      "pos": [1, 0, 0]}],
           "edges": [["s", "t", "hadamard"]]}
    d = deserialize(json.dumps(doc))
    assert d.edge_kind("s", "t") == "hadamard"
    assert any(v.code == "edge-kind" for v in validate(d))


def test_injection_document_matches_figure_one(inj5):
    _, diag = inj5
    doc = json.loads(serialize(diag))
    layer0 = [n for n in doc["nodes"] if n["pos"][2] == 0]
    assert len(layer0) == 25
    assert all(n["kind"] == "spider" for n in layer0)
    greens = [n for n in layer0 if n["color"] == "Z"]
    reds = [n for n in layer0 if n["color"] == "X"]
    assert len(greens) == 15 and len(reds) == 10
    injected = [n for n in greens if n["phase"] == 1]
    assert len(injected) == 1 and injected[0]["pos"][:2] == [0, 8]


def test_export_dot_minimal():
    d = minimal_y_diagram()
    dot = export(d, fmt="dot")
    assert "π/2" in dot and "#66cc66" in dot
    decorated = export(d, {("s", "o"): "Y"}, fmt="dot")
    assert "red:green" in decorated


def test_export_rejects_foreign_edges():
    d = minimal_y_diagram()
    with pytest.raises(DiagramError, match="absent"):
        export(d, {("s", "nope"): "Y"}, fmt="dot")
    with pytest.raises(DiagramError, match="highlight"):
        export(d, {("s", "o"): "W"}, fmt="dot")
    with pytest.raises(ValueError, match="format"):
        export(d, fmt="svg")


def test_export_tikz_smoke(inj5):
    _, diag = inj5
    tikz = export(diag, fmt="tikz")
    assert "tikzpicture" in tikz and "zxgreen" in tikz and "zxred" in tikz


def test_export_tikz_with_y_correlator_web(inj5):
    from zxwebs.surface import correlator_boundary_condition, logical_operators
    from zxwebs.webs import solve

    lay, diag = inj5
    _, _, y_l = logical_operators(lay)
    web = solve(diag, correlator_boundary_condition(diag, y_l))
    marks = {e: hl.value for e, hl in web.highlight_map().items()}
    tikz = export(diag, marks, fmt="tikz")
    # both web colors drawn as thick underlays
    assert "\\draw[green,opacity=0.8" in tikz
    assert "\\draw[red,opacity=0.6" in tikz


def test_webs_embedding_round_trip():
    d = minimal_y_diagram()
    name = d.edge_name(("s", "o"))
    text = serialize(d, webs={"y": {name: "Y"}})
    assert deserialize(text) == d
    assert read_webs(text, d) == {"y": {name: "Y"}}
    assert serialize(deserialize(text), read_webs(text, d)) == text

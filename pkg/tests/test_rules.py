import random

import pytest

from pidpo.dpo import apply_at, find_matches, normalize
from pidpo.encode import EncodedProcess, decode, encode, validate
from pidpo.lgraph import LabelledGraph, component_of, is_isomorphic
from pidpo.parser import parse_process
from pidpo.rules import com_rules, gc_rules, merge_rules, unfold_rules
from pidpo.terms import parse_term

R_M = merge_rules().rules
R_GC = gc_rules().rules


def enc(text):
    p, sys = parse_process(text)
    return encode(p, sys), sys


def matches(rules, g):
    return [(r, m) for r in rules for m in find_matches(r, g)]


def finish(e, g):
    g = normalize(R_GC, normalize(R_M, g))
    out = EncodedProcess.from_graph(component_of(g, e.root).freeze())
    validate(out)
    return out


def graph(vertices, edges):
    g = LabelledGraph()
    for v, lab in vertices.items():
        g.add_vertex(lab, v)
    for a, b, lab in edges:
        g.add_edge(a, b, parse_term(lab))
    return g.freeze()


def test_rule_sets_keep_the_anchor():
    p, sys = parse_process("A(x) = x(y).A(y)\nmain = A(a)")
    for rs in [com_rules()] + unfold_rules(sys):
        for r in rs:
            assert 0 in r.context_vertices and str(r.left.label(0)) == "go"
            assert (0, 1) in r.context_edges


def test_running_example_two_isomorphic_matches():
    e, _ = enc("x(z).z<w> | (x<y> + x<y>)")
    ms = matches(com_rules(), e.graph)
    assert len(ms) == 2
    results = [finish(e, apply_at(r, e.graph, m)) for r, m in ms]
    assert is_isomorphic(results[0].graph, results[1].graph)
    assert str(decode(results[0])) == "y<w>"


def test_no_shared_channel_no_match():
    e, _ = enc("x(z).z<a> | y<w>.0")
    assert matches(com_rules(), e.graph) == []


def test_self_send_variant():
    e, _ = enc("x<x> | x(y).0")
    ms = matches(com_rules(), e.graph)
    assert [r.name for r, _ in ms] == ["com-self"]


def test_same_component_does_not_synchronize():
    e, _ = enc("x(z).0 + x<y>")
    assert matches(com_rules(), e.graph) == []
    e, _ = enc("x<y>.x(z).0")
    assert matches(com_rules(), e.graph) == []


def test_nested_prefixes_are_not_top_level():
    e, _ = enc("a<b>.x(z).0 | x<y>")
    assert matches(com_rules(), e.graph) == []


def test_merge_fuses_sync_and_arg():
    # operator 1 holds sync to u(2) and arg to the merge vertex m(0)
    g = graph({0: "merge(v(_Y))", 1: "t(out)", 2: "v(x)"},
              [(0, 2, "d"), (1, 0, "arg"), (1, 2, "sync")])
    out = normalize(R_M, g)
    assert sorted(out.vertices) == [1, 2]
    assert str(out.edge_label(1, 2)) == "arg-sync"


def test_merge_noop_without_merge_vertices():
    e, _ = enc("x(z).z<w> | x<y>")
    assert normalize(R_M, e.graph) is e.graph
    assert normalize(R_GC, e.graph) is e.graph


def test_gc_keeps_shared_name():
    g = graph({0: "gc", 1: "v(x)", 2: "t(in)"}, [(0, 1, "sync"), (2, 1, "sync")])
    out = normalize(R_GC, g)
    assert not out.has_edge(0, 1) and out.has_edge(2, 1)
    assert str(out.label(1)) == "v(x)"


def test_unfold_first_call_site():
    e, sys = enc("A(x) = x(y).A(y)\nB(x) = x<x>.B(x)\nmain = A(x) | B(x)")
    (ra,) = unfold_rules(sys)[0].rules
    ms = list(find_matches(ra, e.graph))
    assert len(ms) == 1
    out = finish(e, apply_at(ra, e.graph, ms[0]))
    want, _ = enc("A(x) = x(y).A(y)\nB(x) = x<x>.B(x)\nmain = x(y).A(y) | B(x)")
    assert is_isomorphic(out.graph, want.graph)


def test_unfold_repeated_argument():
    e, sys = enc("A(a, b) = a<b>.b(z).z<a>\nmain = A(x, x)")
    (r,) = unfold_rules(sys)[0].rules
    out = finish(e, apply_at(r, e.graph, next(find_matches(r, e.graph))))
    assert str(decode(out)) == "x<x>.x(b0).b0<x>"


def test_unfold_ignores_nested_calls():
    e, sys = enc("A(x) = x<x>\nmain = a<b>.A(a)")
    (r,) = unfold_rules(sys)[0].rules
    assert list(find_matches(r, e.graph)) == []


def _merge_measure(g):
    return sum(g.degree(v) for v in g.vertices if str(g.label(v)).startswith("merge("))


def _gc_measure(g):
    # relabelling a neighbour gc hands it fresh gc-incident edges, so the
    # count that strictly drops is the total number of edges
    return g.num_edges()


def _merge_measure_full(g):
    # deref keeps the degree; count ref edges on merged pointers as one extra unit
    refs = sum(1 for v in g.vertices if str(g.label(v)) == "merge(ptr)"
               for w, t in g.neighbours(v).items() if str(t) == "ref"
               and str(g.label(w)).startswith("v("))
    return (_merge_measure(g) + sum(1 for v in g.vertices if str(g.label(v)).startswith("merge(")),
            refs)


@pytest.mark.parametrize("src", [
    "x(z).z<w> | (x<y> + x<y>)",
    "x(z).(z<w> | z(q).0) | x<y>.y<y>",
    "A(a, b) = a<b>.b(z).z<a>\nmain = A(x, x) | x(q).q<q>",
])
def test_termination_measures_decrease(src):
    e, sys = enc(src)
    trans = com_rules().rules + [r for rs in unfold_rules(sys) for r in rs]
    for r, m in matches(trans, e.graph):
        g = apply_at(r, e.graph, m)
        trace = []
        g = normalize(R_M, g, trace=trace)
        for d in trace:
            assert _merge_measure_full(d.result) < _merge_measure_full(d.source)
        trace = []
        normalize(R_GC, g, trace=trace)
        for d in trace:
            assert _gc_measure(d.result) < _gc_measure(d.source)


def test_confluence_under_random_orders(fixture_path):
    from pidpo.parser import parse_file
    for name in ["example4.pi", "recursive.pi", "hospital.pi"]:
        p, sys = parse_file(fixture_path(name))
        e = encode(p, sys)
        trans = com_rules().rules + [r for rs in unfold_rules(sys) for r in rs]
        for r, m in matches(trans, e.graph):
            g = apply_at(r, e.graph, m)
            ref_m = normalize(R_M, g)
            ref = normalize(R_GC, ref_m)
            for seed in range(20):
                gm = normalize(R_M, g, rng=random.Random(seed))
                assert is_isomorphic(gm, ref_m)
                assert is_isomorphic(normalize(R_GC, gm, rng=random.Random(seed)), ref)

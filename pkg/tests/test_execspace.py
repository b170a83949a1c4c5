import json

import pytest

from pidpo.encode import encode
from pidpo.execspace import Limits, explore, export_dot, export_json, step_pipeline
from pidpo.lgraph import is_isomorphic
from pidpo.oracle import oracle_closure, oracle_step
from pidpo.parser import parse_file, parse_process

RECURSIVE = "A(x) = x(y).A(y)\nB(x) = x<x>.B(x)\nmain = A(x) | B(x)"


def space_of(text, **kw):
    p, sys = parse_process(text)
    return explore(p, sys, **kw)


def test_step_pipeline_running_example():
    p, sys = parse_process("x(z).z<w> | (x<y> + x<y>)")
    succ = step_pipeline(encode(p), sys)
    assert len(succ) == 2
    assert is_isomorphic(succ[0].encoded.graph, succ[1].encoded.graph)
    assert {str(s.term) for s in succ} == {"y<w>"}


def test_step_pipeline_nil():
    assert step_pipeline(encode(parse_process("0")[0])) == []


def test_step_pipeline_unfolds_each_call_site():
    p, sys = parse_process(RECURSIVE)
    kinds = sorted(s.kind for s in step_pipeline(encode(p, sys), sys))
    assert kinds == ["unfold(A)", "unfold(B)"]


def test_explore_running_example():
    sp = space_of("x(z).z<w> | (x<y> + x<y>)")
    assert len(sp.states) == 2
    assert sp.edges == [(0, 1, "com")]
    assert str(sp.states[1].term) == "y<w>"
    assert not sp.truncated


def test_explore_nil():
    sp = space_of("0")
    assert len(sp.states) == 1 and sp.edges == []


def test_explore_recursive():
    sp = space_of(RECURSIVE)
    assert len(sp.states) == 4 and len(sp.edges) == 5
    kinds = sorted(k for _, _, k in sp.edges)
    assert kinds == ["com", "unfold(A)", "unfold(A)", "unfold(B)", "unfold(B)"]
    (com,) = [e for e in sp.edges if e[2] == "com"]
    assert com[1] == sp.initial


def test_states_pairwise_non_isomorphic():
    p, sys = parse_file(__import__("pathlib").Path(__file__).parent.parent
                        / "src/pidpo/fixtures/hospital.pi")
    sp = explore(p, sys)
    for i, a in enumerate(sp.states):
        for b in sp.states[i + 1:]:
            assert not is_isomorphic(a.encoded.graph, b.encoded.graph)


def test_reencoded_state_is_found():
    sp = space_of(RECURSIVE)
    for s in sp.states:
        g = encode(s.term).graph
        assert sum(is_isomorphic(g, t.encoded.graph) for t in sp.states) == 1


def test_leaves_have_no_oracle_step():
    sp = space_of("x(z).(z<w> | z(q).0) | x<y> | y<y>")
    out = {a for a, _, _ in sp.edges}
    for s in sp.states:
        if s.id not in out:
            assert oracle_step(s.term) == set()


def test_matches_oracle_on_small_example():
    p, sys = parse_process("new a. (x<a>.a(b).b<b> | x(c).c<c>) | x<x>")
    sp = explore(p, sys)
    ref = oracle_closure(p, sys)
    mine = {(str(sp.states[a].term), str(sp.states[b].term), k) for a, b, k in sp.edges}
    theirs = {(str(ref.states[a]), str(ref.states[b]), k) for a, b, k in ref.edges}
    assert mine == theirs


def test_limits():
    sp = space_of(RECURSIVE, limits=Limits(max_states=2))
    assert sp.truncated and sp.limit == "max-states" and len(sp.states) == 2
    sp = space_of(RECURSIVE, limits=Limits(max_depth=1))
    assert sp.truncated and sp.limit == "max-depth"
    sp = space_of(RECURSIVE, limits=Limits(step_budget=3))
    assert sp.truncated and sp.limit == "step-budget"
    with pytest.raises(ValueError):
        Limits(max_states=0)


def test_jobs_give_same_space():
    a = space_of(RECURSIVE)
    b = space_of(RECURSIVE, jobs=2)
    assert export_json(a) == export_json(b)


def test_dot_export():
    sp = space_of("0")
    dot = export_dot(sp, "ids")
    assert dot.count("->") == 0 and "s0 [" in dot
    sp = space_of("x(z).z<w> | (x<y> + x<y>)")
    dot = export_dot(sp)
    assert dot.count("->") == 1 and "dashed" not in dot and "peripheries=2" in dot
    dot = export_dot(space_of(RECURSIVE))
    assert dot.count("style=dashed") == 4
    assert "cluster_s0" in export_dot(sp, "simplified-graphs")
    with pytest.raises(ValueError):
        export_dot(sp, "everything")


def test_json_export_schema_and_determinism():
    doc = json.loads(export_json(space_of("0")))
    assert list(doc) == ["states", "edges", "initial", "truncated"]
    assert doc["states"][0]["id"] == 0 and doc["edges"] == [] and doc["truncated"] is False
    sp = space_of("x(z).z<w> | (x<y> + x<y>)")
    doc = json.loads(export_json(sp))
    assert [e["kind"] for e in doc["edges"]] == ["com"]
    assert set(doc["states"][0]["graph"]) == {"vertices", "edges"}
    assert export_json(sp) == export_json(space_of("x(z).z<w> | (x<y> + x<y>)"))
    assert export_dot(sp) == export_dot(space_of("x(z).z<w> | (x<y> + x<y>)"))

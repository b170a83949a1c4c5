import itertools
import random

import pytest

from pidpo.lgraph import (FrozenGraphError, LabelledGraph, component_of,
                          enumerate_monomorphisms, fingerprint, is_isomorphic, parse_dump)
from pidpo.terms import match_into, parse_term, rename_into, unify_into


def graph(vertices, edges):
    g = LabelledGraph()
    for v, lab in vertices.items():
        g.add_vertex(lab, v)
    for a, b, lab in edges:
        g.add_edge(a, b, parse_term(lab))
    return g.freeze()


def test_simple_graph_invariants():
    g = LabelledGraph()
    a, b = g.add_vertex("x"), g.add_vertex("y")
    g.add_edge(a, b, parse_term("c"))
    with pytest.raises(ValueError):
        g.add_edge(b, a, parse_term("c"))
    with pytest.raises(ValueError):
        g.add_edge(a, a, parse_term("c"))
    g.freeze()
    with pytest.raises(FrozenGraphError):
        g.add_vertex("z")


def test_ids_never_recycled():
    g = LabelledGraph()
    a = g.add_vertex("x")
    g.remove_vertex(a)
    assert g.add_vertex("y") != a


def test_dump_roundtrip():
    g = graph({0: "go", 1: "t(p)", 2: "v(_X)"}, [(0, 1, "c"), (1, 2, "arg-sync")])
    assert parse_dump(g.dump()) == g
    assert g.dump().splitlines()[0] == "0: go"


def test_component_of():
    g = graph({0: "a", 1: "b", 2: "c"}, [(0, 1, "e")])
    assert sorted(component_of(g, 0).vertices) == [0, 1]
    with pytest.raises(KeyError):
        component_of(g, 9)


def test_shared_binding_across_labels():
    # one variable, two labels: both must receive the same value
    pat = graph({0: "f(_X)", 1: "g(_X)"}, [(0, 1, "e")])
    good = graph({0: "f(a)", 1: "g(a)"}, [(0, 1, "e")])
    bad = graph({0: "f(a)", 1: "g(b)"}, [(0, 1, "e")])
    assert len(list(enumerate_monomorphisms(pat, good))) == 1
    assert list(enumerate_monomorphisms(pat, bad)) == []


def test_iso_requires_consistent_renaming():
    g = graph({0: "v(_A)", 1: "v(_B)"}, [(0, 1, "e")])
    h = graph({0: "v(_X)", 1: "v(_Y)"}, [(0, 1, "e")])
    k = graph({0: "v(_X)", 1: "v(_X)"}, [(0, 1, "e")])
    assert is_isomorphic(g, h)
    assert not is_isomorphic(g, k)
    assert not is_isomorphic(g, graph({0: "v(a)", 1: "v(_B)"}, [(0, 1, "e")]))


def test_unify_mode_binds_both_sides():
    pat = graph({0: "f(_X, b)"}, [])
    host = graph({0: "f(a, _Y)"}, [])
    ms = list(enumerate_monomorphisms(pat, host, "unify"))
    assert len(ms) == 1
    assert {str(k): str(v) for k, v in ms[0].binding.items()} == {"_X": "a", "_Y'": "b"}


# --- brute-force comparison ----------------------------------------------------------

LABELS = ["a", "b", "f(a)", "f(_X)", "_Y", "f(_Z)"]
ELABELS = ["c", "d", "_E"]


def random_graph(rng, n, p, ground=False):
    g = LabelledGraph()
    labs = [l for l in LABELS if not ground or "_" not in l]
    for v in range(n):
        g.add_vertex(rng.choice(labs), v)
    for a, b in itertools.combinations(range(n), 2):
        if rng.random() < p:
            el = [l for l in ELABELS if not ground or "_" not in l]
            g.add_edge(a, b, parse_term(rng.choice(el)))
    return g.freeze()


def brute_force(pattern, host, mode):
    pv = pattern.vertices
    out = set()
    for image in itertools.permutations(host.vertices, len(pv)):
        vmap = dict(zip(pv, image))
        if mode == "iso":
            env = ({}, {})
            ok = all(rename_into(pattern.label(v), host.label(vmap[v]), *env) for v in pv)
        else:
            env = {}
            step = match_into if mode == "specialize" else unify_into
            prime = (lambda t: t) if mode == "specialize" else _primer(host)
            ok = all(step(pattern.label(v), prime(host.label(vmap[v])), env) for v in pv)
        if not ok:
            continue
        for a, b, lab in pattern.edges():
            ha, hb = vmap[a], vmap[b]
            if not host.has_edge(ha, hb):
                ok = False
                break
            hl = host.edge_label(ha, hb)
            if mode == "iso":
                ok = rename_into(lab, hl, *env)
            elif mode == "specialize":
                ok = match_into(lab, hl, env)
            else:
                ok = unify_into(lab, _primer(host)(hl), env)
            if not ok:
                break
        if ok:
            out.add(tuple(sorted(vmap.items())))
    return out


def _primer(host):
    from pidpo.lgraph import _prime
    from pidpo.terms import Var
    prime = {v: Var(v.name + "'") for v in host.variables()}
    return lambda t: _prime(t, prime)


@pytest.mark.parametrize("mode", ["specialize", "iso", "unify"])
def test_monomorphisms_match_brute_force(mode):
    rng = random.Random(7)
    for _ in range(60):
        pattern = random_graph(rng, rng.randint(1, 3), 0.6)
        host = random_graph(rng, rng.randint(2, 5), 0.5)
        got = {tuple(sorted(m.vmap.items())) for m in enumerate_monomorphisms(pattern, host, mode)}
        assert got == brute_force(pattern, host, mode)


def test_isomorphism_matches_brute_force_on_permuted_copies():
    rng = random.Random(3)
    for _ in range(40):
        g = random_graph(rng, rng.randint(1, 6), 0.4)
        perm = list(g.vertices)
        rng.shuffle(perm)
        h = LabelledGraph()
        for v, w in zip(g.vertices, perm):
            h.add_vertex(g.label(v), w)
        for a, b, lab in g.edges():
            h.add_edge(perm[a], perm[b], lab)
        h.freeze()
        assert is_isomorphic(g, h)
        assert fingerprint(g) == fingerprint(h)


def test_non_isomorphic_detected():
    g = graph({0: "a", 1: "a", 2: "a"}, [(0, 1, "c"), (1, 2, "c")])
    h = graph({0: "a", 1: "a", 2: "a"}, [(0, 1, "c"), (1, 2, "d")])
    assert not is_isomorphic(g, h)

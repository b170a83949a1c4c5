import random

import pytest

from pidpo.congruence import canonical_form, congruent
from pidpo.generate import LAWS, congruence_rewrite, mutate, random_process
from pidpo.parser import parse_process


def P(text):
    return parse_process(text)[0]


@pytest.mark.parametrize("a,b", [
    ("x<y> | z<w>", "z<w> | x<y>"),
    ("a<b> | (c<d> | e<f>)", "(a<b> | c<d>) | e<f>"),
    ("x<y> | 0", "x<y>"),
    ("x<y> + z<w>", "z<w> + x<y>"),
    ("x<y> + 0", "x<y>"),
    ("x(z).z<w>", "x(q).q<w>"),
    ("new a. new b. a<b>", "new b. new a. a<b>"),
    ("(new a. x<a>) | y<z>", "new a. (x<a> | y<z>)"),
    ("new a. y<z>", "y<z>"),
])
def test_congruent_examples(a, b):
    assert congruent(P(a), P(b))


@pytest.mark.parametrize("a,b", [
    ("x<y>", "y<x>"),
    ("x(z).z<w>", "x(z).w<z>"),
    ("new a. (x<a> | a<b>)", "(new a. x<a>) | (new c. c<b>)"),
    ("x<y> | x<y>", "x<y>"),
    ("x<y>.z<w>", "z<w>.x<y>"),
])
def test_non_congruent_examples(a, b):
    assert not congruent(P(a), P(b))


def test_canonical_bound_names():
    assert str(canonical_form(P("x(z).z<w> | x<y>"))) == "x(b0).b0<w> | x<y>"
    # bound names never clash with free ones
    assert "bb0" in str(canonical_form(P("x(z).z<b0>")))


def test_canonical_form_idempotent():
    rng = random.Random(11)
    for _ in range(200):
        p = random_process(rng)
        c = canonical_form(p)
        assert canonical_form(c) == c


@pytest.mark.parametrize("law", sorted(LAWS))
def test_each_law_preserves_canonical_form(law):
    rng = random.Random(law)
    applied = 0
    for _ in range(300):
        p = random_process(rng, max_prefixes=5)
        r = congruence_rewrite(p, rng, law)
        if r is None:
            continue
        applied += 1
        assert canonical_form(r[1]) == canonical_form(p), (law, p, r[1])
    assert applied >= 20


def test_mutations_usually_break_congruence():
    rng = random.Random(5)
    broken = sum(canonical_form(mutate(p, rng)) != canonical_form(p)
                 for p in (random_process(rng) for _ in range(200)))
    assert broken > 150

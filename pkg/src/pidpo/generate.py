"""Process generators for property tests and the exhaustive sweep.

* :func:`random_process` draws a random guarded term, with nested ∥ and +,
  stray 0s and restrictions, so the congruence laws have something to bite.
* :func:`congruence_rewrite` applies one structural-congruence law at one
  position, :func:`mutate` makes a small change that usually breaks
  congruence.
* :func:`enumerate_processes` lists every process up to a prefix and name
  budget, one representative per congruence class.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple

from .congruence import canonical_form
from .process import (NIL, Input, Nil, Output, Par, ProcessTerm, Restrict, Sum,
                      all_names, fresh_name, free_names, substitute)

__all__ = ["random_process", "congruence_rewrite", "mutate", "enumerate_processes", "LAWS"]


# --- random terms -----------------------------------------------------------------

def random_process(rng: random.Random, max_prefixes: int = 4,
                   names=("a", "b", "c", "d"), restrict_p: float = 0.25) -> ProcessTerm:
    budget = [rng.randint(1, max_prefixes)]

    def name(scope):
        return rng.choice(list(names) + scope)

    def proc(scope, depth) -> ProcessTerm:
        if budget[0] <= 0 or depth > 3:
            return NIL if rng.random() < 0.7 else Par((NIL, NIL))
        r = rng.random()
        if r < restrict_p:
            n = fresh_name(set(names) | set(scope), "r")
            return Restrict(n, proc(scope + [n], depth + 1))
        if r < 0.55:
            k = rng.randint(2, 3)
            return Par(tuple(proc(scope, depth + 1) for _ in range(k)))
        return summ(scope, depth)

    def summ(scope, depth) -> ProcessTerm:
        k = 1 if rng.random() < 0.6 else rng.randint(2, 3)
        items = [branch(scope, depth) for _ in range(k)]
        return items[0] if k == 1 else Sum(tuple(items))

    def branch(scope, depth) -> ProcessTerm:
        if budget[0] <= 0:
            return NIL
        budget[0] -= 1
        chan = name(scope)
        if rng.random() < 0.5:
            b = fresh_name(set(names) | set(scope), "y")
            return Input(chan, b, proc(scope + [b], depth + 1))
        return Output(chan, name(scope), proc(scope, depth + 1))

    return proc([], 0)


# --- positions ----------------------------------------------------------------------

@dataclass
class _Pos:
    term: ProcessTerm
    rebuild: Callable[[ProcessTerm], ProcessTerm]
    in_sum: bool      # a choice branch: only guarded terms may go here


def _positions(p: ProcessTerm, rebuild=lambda q: q, in_sum=False) -> Iterator[_Pos]:
    yield _Pos(p, rebuild, in_sum)
    if isinstance(p, (Par, Sum)):
        for i, q in enumerate(p.items):
            def rb(new, i=i, p=p, rebuild=rebuild):
                items = list(p.items)
                items[i] = new
                return rebuild(type(p)(tuple(items)))
            yield from _positions(q, rb, isinstance(p, Sum))
    elif isinstance(p, Input):
        yield from _positions(p.cont, lambda new, p=p, rebuild=rebuild:
                              rebuild(Input(p.channel, p.binder, new)))
    elif isinstance(p, Output):
        yield from _positions(p.cont, lambda new, p=p, rebuild=rebuild:
                              rebuild(Output(p.channel, p.arg, new)))
    elif isinstance(p, Restrict):
        yield from _positions(p.body, lambda new, p=p, rebuild=rebuild:
                              rebuild(Restrict(p.name, new)), in_sum)


# --- the laws --------------------------------------------------------------------------

def _comm(kind):
    def law(pos: _Pos, rng, whole):
        t = pos.term
        if not isinstance(t, kind) or len(t.items) < 2:
            return None
        items = list(t.items)
        i, j = rng.sample(range(len(items)), 2)
        items[i], items[j] = items[j], items[i]
        return kind(tuple(items))
    return law


def _assoc(kind):
    def law(pos: _Pos, rng, whole):
        t = pos.term
        if not isinstance(t, kind):
            return None
        nested = [i for i, q in enumerate(t.items) if isinstance(q, kind)]
        if nested and (len(t.items) < 3 or rng.random() < 0.5):
            i = rng.choice(nested)
            items = list(t.items[:i]) + list(t.items[i].items) + list(t.items[i + 1:])
            return kind(tuple(items))
        if len(t.items) < 3:
            return None
        i = rng.randrange(len(t.items) - 1)
        items = list(t.items[:i]) + [kind(t.items[i:i + 2])] + list(t.items[i + 2:])
        return kind(tuple(items))
    return law


def _unit(kind):
    def law(pos: _Pos, rng, whole):
        t = pos.term
        if isinstance(t, kind) and any(isinstance(q, Nil) for q in t.items) and len(t.items) >= 2:
            items = list(t.items)
            items.remove(NIL)
            return items[0] if len(items) == 1 else kind(tuple(items))
        if kind is Par and pos.in_sum:
            return None
        if kind is Sum and not (pos.in_sum or isinstance(t, (Input, Output, Sum, Nil))):
            return None
        items = [t, NIL] if rng.random() < 0.5 else [NIL, t]
        return kind(tuple(items))
    return law


def _alpha(pos: _Pos, rng, whole):
    t = pos.term
    if isinstance(t, Input):
        new = fresh_name(all_names(whole) | {t.binder}, t.binder)
        return Input(t.channel, new, substitute(t.cont, {t.binder: new}))
    if isinstance(t, Restrict):
        new = fresh_name(all_names(whole) | {t.name}, t.name)
        return Restrict(new, substitute(t.body, {t.name: new}))
    return None


def _nu_swap(pos: _Pos, rng, whole):
    t = pos.term
    if isinstance(t, Restrict) and isinstance(t.body, Restrict) and t.name != t.body.name:
        return Restrict(t.body.name, Restrict(t.name, t.body.body))
    return None


def _extrude(pos: _Pos, rng, whole):
    """``(νa)P | Q ≡ (νa)(P | Q)`` when a ∉ fn(Q), in either direction."""
    t = pos.term
    if pos.in_sum:
        return None
    if isinstance(t, Restrict) and isinstance(t.body, Par):
        inside = [q for q in t.body.items if t.name in free_names(q)]
        outside = [q for q in t.body.items if t.name not in free_names(q)]
        if outside:
            body = inside[0] if len(inside) == 1 else Par(tuple(inside)) if inside else NIL
            return Par((Restrict(t.name, body),) + tuple(outside))
    if isinstance(t, Par):
        for i, q in enumerate(t.items):
            if isinstance(q, Restrict):
                others = t.items[:i] + t.items[i + 1:]
                if any(q.name in free_names(o) for o in others):
                    continue
                return Restrict(q.name, Par((q.body,) + others))
    return None


LAWS = {
    "par-comm": _comm(Par), "par-assoc": _assoc(Par), "par-unit": _unit(Par),
    "sum-comm": _comm(Sum), "sum-assoc": _assoc(Sum), "sum-unit": _unit(Sum),
    "alpha": _alpha, "nu-swap": _nu_swap, "extrusion": _extrude,
}


def congruence_rewrite(p: ProcessTerm, rng: random.Random, law: Optional[str] = None
                       ) -> Optional[Tuple[str, ProcessTerm]]:
    """Apply one law at one position; None when the chosen law fits nowhere."""
    laws = [law] if law else list(LAWS)
    rng.shuffle(laws)
    positions = list(_positions(p))
    for name in laws:
        order = positions[:]
        rng.shuffle(order)
        for pos in order:
            new = LAWS[name](pos, rng, p)
            if new is not None and new != pos.term:
                return name, pos.rebuild(new)
    return None


def mutate(p: ProcessTerm, rng: random.Random, names=("a", "b", "c", "d")) -> ProcessTerm:
    """A small edit: rename one occurrence, flip a prefix, drop or add one."""
    positions = [pos for pos in _positions(p)]
    rng.shuffle(positions)
    for pos in positions:
        t = pos.term
        choice = rng.randrange(4)
        if isinstance(t, Output):
            if choice == 0:
                return pos.rebuild(Output(t.channel, rng.choice(names), t.cont))
            if choice == 1:
                return pos.rebuild(Output(rng.choice(names), t.arg, t.cont))
            if choice == 2:
                return pos.rebuild(t.cont if not pos.in_sum else NIL)
            b = fresh_name(all_names(p), "y")
            return pos.rebuild(Input(t.channel, b, t.cont))
        if isinstance(t, Input):
            if choice == 0:
                return pos.rebuild(Input(rng.choice(names), t.binder, t.cont))
            if choice == 1 and t.binder in free_names(t.cont):
                return pos.rebuild(Output(t.channel, rng.choice(names),
                                          substitute(t.cont, {t.binder: rng.choice(names)})))
            if choice == 2:
                return pos.rebuild(Input(t.channel, t.binder, Output(t.binder, t.channel, t.cont)))
    return Par((p, Output(rng.choice(names), rng.choice(names), NIL)))


# --- exhaustive enumeration ---------------------------------------------------------------

_FREE = "abcdefgh"


def _compositions(k: int) -> Iterator[List[int]]:
    if k == 0:
        yield []
        return
    for first in range(1, k + 1):
        for rest in _compositions(k - first):
            yield [first] + rest


class _Enum:
    def __init__(self, max_names: int):
        self.max_names = max_names

    # state: (free names used, total names used)
    def pick(self, scope, st):
        free, total = st
        for n in scope:
            yield n, st
        for i in range(free):
            yield _FREE[i], st
        if total < self.max_names:
            yield _FREE[free], (free + 1, total + 1)

    def proc(self, k, scope, st):
        if k == 0:
            yield NIL, st
            return
        for parts in _compositions(k):
            yield from self._seq(parts, scope, st, self.component, Par)

    def component(self, k, scope, st):
        for parts in _compositions(k):
            yield from self._seq(parts, scope, st, self.prefix, Sum)

    def _seq(self, parts, scope, st, gen, kind):
        def go(i, st, acc):
            if i == len(parts):
                yield (acc[0] if len(acc) == 1 else kind(tuple(acc))), st
                return
            for t, st2 in gen(parts[i], scope, st):
                yield from go(i + 1, st2, acc + [t])
        yield from go(0, st, [])

    def prefix(self, k, scope, st):
        for chan, st1 in self.pick(scope, st):
            for arg, st2 in self.pick(scope, st1):
                for cont, st3 in self.proc(k - 1, scope, st2):
                    yield Output(chan, arg, cont), st3
            free, total = st1
            if total < self.max_names:
                b = f"y{total}"
                for cont, st3 in self.proc(k - 1, scope + [b], (free, total + 1)):
                    yield Input(chan, b, cont), st3


def enumerate_processes(max_prefixes: int = 3, max_names: int = 3) -> Iterator[ProcessTerm]:
    """Canonical forms of all processes within the budget, each once.

    A name counts against `max_names` whether it is free, restricted or an
    input binder.  Free names are introduced in order of first occurrence,
    which removes most renamings of the same process.  Restrictions are only
    generated at the top: every other placement is congruent to one of these
    under the canonical form's placement rule.
    """
    seen = set()
    e = _Enum(max_names)
    for k in range(max_prefixes + 1):
        for nres in range(max_names + 1):
            scope = [f"r{i}" for i in range(nres)]
            for body, _ in e.proc(k, scope, (0, nres)):
                p = body
                for r in reversed(scope):
                    p = Restrict(r, p)
                c = canonical_form(p)
                if c not in seen:
                    seen.add(c)
                    yield c

"""Canonical representatives for structural congruence.

The normal form drops 0 units, flattens ∥ and +, puts every restriction at the
smallest subterm containing all occurrences of its name (unused restrictions
disappear), names bound names after their binding depth, and sorts siblings.
Several restrictions at one node are tried in every order and the smallest
result wins, so ``new a. new b. P`` and ``new b. new a. P`` agree.

Placing a restriction at the smallest enclosing subterm also moves it across
prefixes and into choice branches that do not mention the name.  The graph
encoding cannot tell those terms apart either, since a restriction leaves no
vertex of its own.
"""
from __future__ import annotations

import itertools
import re
from typing import Dict, List, Optional, Set, Tuple

from .process import (NIL, Call, Input, Nil, Output, Par, ProcessTerm, Restrict,
                      Sum, free_names)

__all__ = ["canonical_form", "congruent", "bound_prefix"]


class _Node:
    __slots__ = ("kind", "children", "chan", "arg", "ident", "args", "nu", "occ")

    def __init__(self, kind, children=(), chan=None, arg=None, ident=None, args=()):
        self.kind = kind          # par | sum | call | in | out
        self.children = list(children)
        self.chan = chan
        self.arg = arg            # sent name (out) or binder (in)
        self.ident = ident
        self.args = tuple(args)
        self.nu: List[str] = []
        self.occ: Set[str] = set()

    def direct(self) -> Tuple[str, ...]:
        if self.kind == "out":
            return (self.chan, self.arg)
        if self.kind == "in":
            return (self.chan,)
        if self.kind == "call":
            return self.args
        return ()


class _Builder:
    def __init__(self):
        self.counter = itertools.count()
        self.restricted: Set[str] = set()

    def fresh(self) -> str:
        return f"%{next(self.counter)}"

    def par(self, p: ProcessTerm, env: Dict[str, str]) -> _Node:
        node = _Node("par")
        self._components(p, env, node.children)
        return node

    def _components(self, p, env, out):
        if isinstance(p, Nil):
            return
        if isinstance(p, Par):
            for q in p.items:
                self._components(q, env, out)
        elif isinstance(p, Restrict):
            new = self.fresh()
            self.restricted.add(new)
            self._components(p.body, {**env, p.name: new}, out)
        elif isinstance(p, Call):
            out.append(_Node("call", ident=p.ident, args=[env.get(a, a) for a in p.args]))
        else:
            node = _Node("sum")
            self._branches(p, env, node.children)
            if node.children:
                out.append(node)

    def _branches(self, p, env, out):
        if isinstance(p, Nil):
            return
        if isinstance(p, Sum):
            for q in p.items:
                self._branches(q, env, out)
        elif isinstance(p, Restrict):
            new = self.fresh()
            self.restricted.add(new)
            self._branches(p.body, {**env, p.name: new}, out)
        elif isinstance(p, Input):
            b = self.fresh()
            cont = self.par(p.cont, {**env, p.binder: b})
            out.append(_Node("in", [cont], chan=env.get(p.channel, p.channel), arg=b))
        elif isinstance(p, Output):
            cont = self.par(p.cont, env)
            out.append(_Node("out", [cont], chan=env.get(p.channel, p.channel),
                             arg=env.get(p.arg, p.arg)))
        else:
            raise ValueError(f"unguarded choice branch: {p!r}")


def _occurrences(node: _Node, restricted: Set[str]) -> Set[str]:
    occ = {n for n in node.direct() if n in restricted}
    for c in node.children:
        occ |= _occurrences(c, restricted)
    node.occ = occ
    return occ


def _place(node: _Node, pending: Set[str]) -> None:
    direct = set(node.direct())
    here = []
    passdown: Dict[int, Set[str]] = {}
    for name in pending:
        holders = [i for i, c in enumerate(node.children) if name in c.occ]
        if name in direct or len(holders) != 1:
            here.append(name)
        else:
            passdown.setdefault(holders[0], set()).add(name)
    node.nu = sorted(here)
    for i, c in enumerate(node.children):
        _place(c, passdown.get(i, set()))


def bound_prefix(free: Set[str]) -> str:
    """Prefix for canonical bound names that cannot clash with `free`."""
    prefix = "b"
    while any(re.fullmatch(re.escape(prefix) + r"\d+", n) for n in free):
        prefix += "b"
    return prefix


class _Canon:
    def __init__(self, prefix: str):
        self.prefix = prefix

    def name(self, level: int) -> str:
        return f"{self.prefix}{level}"

    def nkey(self, n: str, env):
        lvl = env.get(n)
        return ("f", n) if lvl is None else ("b", lvl)

    def nterm(self, n: str, env) -> str:
        lvl = env.get(n)
        return n if lvl is None else self.name(lvl)

    def canon(self, node: _Node, env: Dict[str, int], depth: int):
        k = len(node.nu)
        if k == 0:
            return self.inner(node, env, depth)
        best = None
        for perm in itertools.permutations(node.nu):
            env2 = dict(env)
            for i, n in enumerate(perm):
                env2[n] = depth + i
            key, term = self.inner(node, env2, depth + k)
            key = ("nu", k, key)
            if best is None or key < best[0]:
                for i in reversed(range(k)):
                    term = Restrict(self.name(depth + i), term)
                best = (key, term)
        return best

    def inner(self, node: _Node, env, depth):
        if node.kind in ("par", "sum"):
            parts = sorted((self.canon(c, env, depth) for c in node.children),
                           key=lambda kt: kt[0])
            key = (node.kind, tuple(k for k, _ in parts))
            terms = tuple(t for _, t in parts)
            if not terms:
                return key, NIL
            if len(terms) == 1:
                return key, terms[0]
            return key, (Par(terms) if node.kind == "par" else Sum(terms))
        if node.kind == "call":
            key = ("call", node.ident, tuple(self.nkey(a, env) for a in node.args))
            return key, Call(node.ident, tuple(self.nterm(a, env) for a in node.args))
        if node.kind == "in":
            env2 = {**env, node.arg: depth}
            ck, ct = self.canon(node.children[0], env2, depth + 1)
            key = ("in", self.nkey(node.chan, env), ck)
            return key, Input(self.nterm(node.chan, env), self.name(depth), ct)
        ck, ct = self.canon(node.children[0], env, depth)
        key = ("out", self.nkey(node.chan, env), self.nkey(node.arg, env), ck)
        return key, Output(self.nterm(node.chan, env), self.nterm(node.arg, env), ct)


def _prepare(p: ProcessTerm):
    b = _Builder()
    root = b.par(p, {})
    _occurrences(root, b.restricted)
    _place(root, set(root.occ))
    return root


def canonical_key(p: ProcessTerm, prefix: Optional[str] = None):
    root = _prepare(p)
    prefix = prefix or bound_prefix(free_names(p))
    return _Canon(prefix).canon(root, {}, 0)[0]


def canonical_form(p: ProcessTerm) -> ProcessTerm:
    """Normal form such that ``canonical_form(p) == canonical_form(q)`` iff p ≡ q."""
    root = _prepare(p)
    return _Canon(bound_prefix(free_names(p))).canon(root, {}, 0)[1]


def congruent(p: ProcessTerm, q: ProcessTerm) -> bool:
    return canonical_form(p) == canonical_form(q)

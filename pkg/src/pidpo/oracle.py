"""Brute-force reduction semantics on process terms.

This is the reference the graph rewriting is checked against: it works on
syntax only, never on graphs.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .congruence import canonical_form
from .process import (NIL, Call, Input, Nil, Output, Par, ProcessTerm,
                      RecursiveSystem, Restrict, Sum, all_names, substitute)

__all__ = ["oracle_step", "oracle_transitions", "oracle_closure", "OracleSpace"]

COM = "com"


def unfold_kind(ident: str) -> str:
    return f"unfold({ident})"


class _Fresh:
    def __init__(self, avoid):
        self.avoid = set(avoid)
        self.n = itertools.count()

    def __call__(self) -> str:
        while True:
            cand = f"r{next(self.n)}"
            if cand not in self.avoid:
                self.avoid.add(cand)
                return cand


def _top_level(p: ProcessTerm, fresh: _Fresh, nus: List[str], comps: List[ProcessTerm]):
    """Extrude every top-level restriction; collect the parallel components."""
    if isinstance(p, Nil):
        return
    if isinstance(p, Par):
        for q in p.items:
            _top_level(q, fresh, nus, comps)
    elif isinstance(p, Restrict):
        new = fresh()
        nus.append(new)
        _top_level(substitute(p.body, {p.name: new}), fresh, nus, comps)
    else:
        comps.append(p)


def _branches(p: ProcessTerm, fresh: _Fresh, nus: List[str], out: List[ProcessTerm]):
    # restrictions guarding a branch are extruded to the top as well
    if isinstance(p, Nil):
        return
    if isinstance(p, Sum):
        for q in p.items:
            _branches(q, fresh, nus, out)
    elif isinstance(p, Restrict):
        new = fresh()
        nus.append(new)
        _branches(substitute(p.body, {p.name: new}), fresh, nus, out)
    else:
        out.append(p)


def _close(nus: List[str], comps: List[ProcessTerm]) -> ProcessTerm:
    body: ProcessTerm = Par(tuple(comps)) if len(comps) > 1 else (comps[0] if comps else NIL)
    for n in reversed(nus):
        body = Restrict(n, body)
    return canonical_form(body)


def oracle_transitions(p: ProcessTerm, sys: Optional[RecursiveSystem] = None
                       ) -> Set[Tuple[str, ProcessTerm]]:
    """All one-step successors as ``(kind, canonical term)`` pairs.

    `kind` is ``"com"`` for a communication and ``"unfold(A)"`` for unfolding
    a top-level call of ``A``.
    """
    sys = sys or RecursiveSystem()
    fresh = _Fresh(all_names(p))
    nus: List[str] = []
    comps: List[ProcessTerm] = []
    _top_level(p, fresh, nus, comps)
    out: Set[Tuple[str, ProcessTerm]] = set()

    # per component: the list of guarded branches (and any names they extrude)
    branches = []
    for c in comps:
        extra: List[str] = []
        bs: List[ProcessTerm] = []
        if not isinstance(c, Call):
            _branches(c, fresh, extra, bs)
        branches.append((extra, bs))

    for i, j in itertools.permutations(range(len(comps)), 2):
        ex_i, bs_i = branches[i]
        ex_j, bs_j = branches[j]
        rest = [c for k, c in enumerate(comps) if k not in (i, j)]
        for bi in bs_i:
            if not isinstance(bi, Input):
                continue
            for bj in bs_j:
                if not isinstance(bj, Output) or bj.channel != bi.channel:
                    continue
                received = substitute(bi.cont, {bi.binder: bj.arg})
                out.add((COM, _close(nus + ex_i + ex_j, [received, bj.cont] + rest)))

    for i, c in enumerate(comps):
        if isinstance(c, Call):
            d = sys[c.ident]
            body = substitute(d.body, dict(zip(d.params, c.args)))
            rest = [q for k, q in enumerate(comps) if k != i]
            out.add((unfold_kind(c.ident), _close(nus, [body] + rest)))
    return out


def oracle_step(p: ProcessTerm, sys: Optional[RecursiveSystem] = None) -> Set[ProcessTerm]:
    """Canonical forms reachable from `p` in one reduction or unfolding step."""
    return {q for _, q in oracle_transitions(p, sys)}


@dataclass
class OracleSpace:
    states: List[ProcessTerm] = field(default_factory=list)
    edges: Set[Tuple[int, int, str]] = field(default_factory=set)
    truncated: bool = False

    def index(self) -> Dict[ProcessTerm, int]:
        return {s: i for i, s in enumerate(self.states)}


def oracle_closure(p: ProcessTerm, sys: Optional[RecursiveSystem] = None,
                   max_states: int = 10_000) -> OracleSpace:
    """Breadth-first closure of :func:`oracle_transitions` over canonical forms."""
    start = canonical_form(p)
    space = OracleSpace([start])
    ids = {start: 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for kind, q in sorted(oracle_transitions(space.states[i], sys), key=str):
            j = ids.get(q)
            if j is None:
                if len(space.states) >= max_states:
                    space.truncated = True
                    continue
                j = ids[q] = len(space.states)
                space.states.append(q)
                queue.append(j)
            space.edges.add((i, j, kind))
    return space

"""Double-pushout rewriting with injective matches over term-labelled graphs.

A rule is given by its left and right graphs; vertices sharing an id are the
interface K.  A K vertex whose label differs between the sides is relabelled
(the ``⟨left, right⟩`` pairs), which keeps its incident edges in place.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .lgraph import LabelledGraph, Morphism, enumerate_monomorphisms
from .terms import Term, Var, apply_subst, variables

__all__ = [
    "Rule", "RuleError", "DirectDerivation", "StaleMatchError", "StepBudgetExceeded",
    "find_matches", "apply_at", "apply_all_once", "normalize", "normalize_counted",
]


class RuleError(ValueError):
    pass


class StaleMatchError(RuntimeError):
    pass


class StepBudgetExceeded(RuntimeError):
    pass


def _ekey(a, b):
    return (a, b) if a < b else (b, a)


class Rule:
    """A span ``L ← K → R``; K is implied by the vertex ids the sides share.

    Variables on the right must occur on the left, except in labels of
    vertices the rule creates: those are *fresh* and get instantiated with
    variables unused in the host, which is how bound names are allocated
    when a definition body is spliced in.
    """

    def __init__(self, name: str, left: LabelledGraph, right: LabelledGraph):
        self.name = name
        self.left = left.copy().freeze() if not left.frozen else left
        self.right = right.copy().freeze() if not right.frozen else right
        lv, rv = set(self.left.vertices), set(self.right.vertices)
        self.context_vertices = sorted(lv & rv)
        self.deleted_vertices = sorted(lv - rv)
        self.added_vertices = sorted(rv - lv)
        le = {_ekey(a, b): t for a, b, t in self.left.edges()}
        re_ = {_ekey(a, b): t for a, b, t in self.right.edges()}
        self.context_edges = sorted(k for k in le if k in re_ and le[k] == re_[k])
        self.deleted_edges = sorted(k for k in le if k not in self.context_edges)
        self.added_edges = sorted(k for k in re_ if k not in self.context_edges)
        self.relabel: Dict[int, Tuple[Term, Term]] = {
            v: (self.left.label(v), self.right.label(v))
            for v in self.context_vertices if self.left.label(v) != self.right.label(v)
        }
        self._validate(le, re_)

    def _validate(self, le, re_):
        bound = self.left.variables()
        fresh = set()
        for v in self.right.vertices:
            vs = variables(self.right.label(v)) - bound
            if vs and v not in self.added_vertices:
                raise RuleError(f"{self.name}: unbound variables {sorted(map(str, vs))} "
                                f"on context vertex {v}")
            fresh |= vs
        for k in self.added_edges:
            vs = variables(re_[k]) - bound
            if vs:
                raise RuleError(f"{self.name}: unbound variables on edge {k}")
        self.fresh_variables = sorted(fresh, key=lambda v: v.name)

    @property
    def context(self) -> LabelledGraph:
        g = self.left.induced_subgraph(self.context_vertices)
        for a, b, _ in list(g.edges()):
            if (a, b) not in self.context_edges:
                g.remove_edge(a, b)
        return g.freeze()

    def dump(self) -> str:
        """L / K / R in the graph dump format; relabels shown as ``vid: ⟨l, r⟩``."""
        k_lines = []
        for v in self.context_vertices:
            if v in self.relabel:
                l, r = self.relabel[v]
                k_lines.append(f"{v}: ⟨{l}, {r}⟩")
            else:
                k_lines.append(f"{v}: {self.left.label(v)}")
        k_lines += [f"{a} -- {b}: {self.left.edge_label(a, b)}" for a, b in self.context_edges]
        return "\n".join([f"rule {self.name}", "L:", _indent(self.left.dump()),
                          "K:", _indent("\n".join(k_lines)), "R:", _indent(self.right.dump())])

    def __repr__(self):
        return f"<Rule {self.name}>"


def _indent(text: str) -> str:
    return "\n".join("  " + line for line in text.splitlines())


@dataclass
class DirectDerivation:
    rule: str
    source: LabelledGraph
    result: LabelledGraph
    match: Morphism = field(repr=False)


def _dangling_ok(rule: Rule, host: LabelledGraph, m: Morphism) -> bool:
    for v in rule.deleted_vertices:
        if host.degree(m.vmap[v]) != rule.left.degree(v):
            return False
    return True


def _simple_ok(rule: Rule, host: LabelledGraph, m: Morphism) -> bool:
    # the result must stay a simple graph: no edge may be added on top of a
    # host edge that survives the deletion step
    deleted = {_ekey(m.vmap[a], m.vmap[b]) for a, b in rule.deleted_edges}
    for a, b in rule.added_edges:
        if a in m.vmap and b in m.vmap:
            ha, hb = m.vmap[a], m.vmap[b]
            if host.has_edge(ha, hb) and _ekey(ha, hb) not in deleted:
                return False
    return True


def find_matches(rule: Rule, host: LabelledGraph) -> Iterator[Morphism]:
    """Monomorphisms ``L → host`` (specialize mode) that the rule can be applied at."""
    for m in enumerate_monomorphisms(rule.left, host, "specialize"):
        if _dangling_ok(rule, host, m) and _simple_ok(rule, host, m):
            yield m


_TRAILING_DIGITS = re.compile(r"\d+$")


def _fresh_names(rule: Rule, host: LabelledGraph) -> Dict[Var, Var]:
    taken = {v.name for v in host.variables()}
    out = {}
    for fv in rule.fresh_variables:
        base = _TRAILING_DIGITS.sub("", fv.name) or "v"
        n = 0
        while f"{base}{n}" in taken:
            n += 1
        taken.add(f"{base}{n}")
        out[fv] = Var(f"{base}{n}")
    return out


def apply_at(rule: Rule, host: LabelledGraph, m: Morphism) -> LabelledGraph:
    """Apply `rule` at match `m` and return the rewritten (frozen) graph."""
    for pv, hv in m.vmap.items():
        if hv not in host or apply_subst(m.binding, rule.left.label(pv)) != host.label(hv):
            raise StaleMatchError(f"{rule.name}: match does not fit the host at vertex {hv}")
    for a, b, _ in rule.left.edges():
        ha, hb = m.vmap[a], m.vmap[b]
        if not host.has_edge(ha, hb):
            raise StaleMatchError(f"{rule.name}: host lacks edge {ha} -- {hb}")
    if not _dangling_ok(rule, host, m):
        raise StaleMatchError(f"{rule.name}: match violates the dangling condition")
    if not _simple_ok(rule, host, m):
        raise StaleMatchError(f"{rule.name}: result would contain a parallel edge")

    binding = dict(m.binding)
    binding.update(_fresh_names(rule, host))
    g = host.copy()
    for a, b in rule.deleted_edges:
        g.remove_edge(m.vmap[a], m.vmap[b])
    for v in rule.deleted_vertices:
        g.remove_vertex(m.vmap[v])
    for v, (_, right) in rule.relabel.items():
        g.relabel_vertex(m.vmap[v], apply_subst(binding, right))
    where = dict(m.vmap)
    for v in rule.added_vertices:
        where[v] = g.add_vertex(apply_subst(binding, rule.right.label(v)))
    for a, b in rule.added_edges:
        g.add_edge(where[a], where[b], apply_subst(binding, rule.right.edge_label(a, b)))
    return g.freeze()


def apply_all_once(rules: Sequence[Rule], host: LabelledGraph) -> List[DirectDerivation]:
    out = []
    for rule in rules:
        for m in find_matches(rule, host):
            out.append(DirectDerivation(rule.name, host, apply_at(rule, host, m), m))
    return out


def normalize(rules: Sequence[Rule], host: LabelledGraph, *, max_steps: int = 100_000,
              rng: Optional[random.Random] = None,
              trace: Optional[list] = None) -> LabelledGraph:
    """Rewrite until no rule matches.

    Without `rng` the step taken is the lowest-index rule's smallest match
    (ordered by sorted host vertex ids); with `rng` a uniformly random
    applicable (rule, match) pair is taken.  Raises StepBudgetExceeded after
    `max_steps` applications.
    """
    return normalize_counted(rules, host, max_steps=max_steps, rng=rng, trace=trace)[0]


def normalize_counted(rules: Sequence[Rule], host: LabelledGraph, *, max_steps: int = 100_000,
                      rng: Optional[random.Random] = None,
                      trace: Optional[list] = None) -> Tuple[LabelledGraph, int]:
    """As :func:`normalize`, also returning the number of steps taken."""
    g = host
    steps = 0
    while True:
        chosen = None
        if rng is None:
            for rule in rules:
                ms = list(find_matches(rule, g))
                if ms:
                    chosen = (rule, min(ms, key=Morphism.sort_key))
                    break
        else:
            pairs = [(rule, m) for rule in rules for m in find_matches(rule, g)]
            if pairs:
                chosen = pairs[rng.randrange(len(pairs))]
        if chosen is None:
            return g, steps
        if steps >= max_steps:
            raise StepBudgetExceeded(f"normalize exceeded {max_steps} steps")
        rule, m = chosen
        new = apply_at(rule, g, m)
        if trace is not None:
            trace.append(DirectDerivation(rule.name, g, new, m))
        g = new
        steps += 1

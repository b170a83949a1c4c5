"""Reduction pipeline, breadth-first exploration and exporters.

A transition is one communication or unfolding rule application followed by
the merge rules and the collection rules, each run to normal form, and a
final cut down to the root's connected component.
"""
from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .dpo import Rule, StepBudgetExceeded, apply_at, find_matches, normalize_counted
from .encode import (EncodedProcess, EncodingError, decode, encode, simplify_view,
                     validate)
from .lgraph import LabelledGraph, component_of, fingerprint, is_isomorphic
from .process import ProcessTerm, RecursiveSystem
from .rules import com_rules, gc_rules, merge_rules, unfold_rules

__all__ = [
    "Limits", "State", "Successor", "PipelineChain", "PipelineError", "ExecutionSpace",
    "Engine", "step_pipeline", "explore", "export_dot", "export_json", "graph_dot",
]

COM = "com"


@dataclass
class Limits:
    max_states: int = 10_000
    max_depth: int = 1_000
    step_budget: int = 1_000_000

    def __post_init__(self):
        for k in ("max_states", "max_depth", "step_budget"):
            if getattr(self, k) <= 0:
                raise ValueError(f"{k} must be positive")


@dataclass
class PipelineChain:
    """``[P] ⇒ G′ ⇒ G″ ⇒ [Q]`` for one rule application.

    `applied` is G′ (the com or unfold rule applied), `merged` is G″ (merge
    rules at normal form), `collected` has the collection rules at normal
    form too, and `result` is its root component.
    """
    rule: str
    start: LabelledGraph
    applied: LabelledGraph
    merged: Optional[LabelledGraph] = None
    collected: Optional[LabelledGraph] = None
    result: Optional[LabelledGraph] = None

    def graphs(self) -> List[Tuple[str, LabelledGraph]]:
        out = [("[P]", self.start), ("G'", self.applied), ("G''", self.merged),
               ("[Q]", self.result)]
        return [(n, g) for n, g in out if g is not None]


class PipelineError(RuntimeError):
    def __init__(self, message: str, chain: PipelineChain):
        super().__init__(message)
        self.chain = chain


@dataclass
class Successor:
    kind: str
    encoded: EncodedProcess
    term: ProcessTerm
    chain: Optional[PipelineChain] = field(default=None, repr=False)


class Engine:
    """The rule sets for one recursive system, plus the pipeline over them."""

    def __init__(self, sys: Optional[RecursiveSystem] = None, seed: Optional[int] = None):
        self.sys = sys or RecursiveSystem()
        # a seed randomizes the match order inside normalize
        self.rng = random.Random(seed) if seed is not None else None
        self.transitions: List[Tuple[str, Rule]] = [(COM, r) for r in com_rules()]
        for rs in unfold_rules(self.sys):
            self.transitions += [(f"unfold({rs.ident})", r) for r in rs]
        self.merge = merge_rules().rules
        self.gc = gc_rules().rules

    def run(self, state: EncodedProcess, *, budget: int = 1_000_000,
            rng: Optional[random.Random] = None, keep_chain: bool = False
            ) -> Tuple[List[Successor], int]:
        """All successors of `state` before deduplication, and the steps used."""
        rng = rng or self.rng
        out: List[Successor] = []
        used = 0
        for kind, rule in self.transitions:
            for m in list(find_matches(rule, state.graph)):
                chain = PipelineChain(rule.name, state.graph, apply_at(rule, state.graph, m))
                used += 1
                chain.merged, n = normalize_counted(self.merge, chain.applied,
                                                    max_steps=max(budget - used, 0), rng=rng)
                used += n
                chain.collected, n = normalize_counted(self.gc, chain.merged,
                                                       max_steps=max(budget - used, 0), rng=rng)
                used += n
                chain.result = component_of(chain.collected, state.root).freeze()
                enc = EncodedProcess.from_graph(chain.result)
                try:
                    validate(enc)
                    term = decode(enc, self.sys)
                except EncodingError as e:
                    raise PipelineError(f"{rule.name}: {e}", chain) from e
                out.append(Successor(kind, enc, term, chain if keep_chain else None))
        return out, used


def step_pipeline(state: EncodedProcess, sys: Optional[RecursiveSystem] = None, *,
                  rng: Optional[random.Random] = None, keep_chain: bool = False,
                  step_budget: int = 1_000_000) -> List[Successor]:
    """Every com/unfold successor of `state` (one per match, not deduplicated)."""
    return Engine(sys).run(state, budget=step_budget, rng=rng, keep_chain=keep_chain)[0]


# --- exploration --------------------------------------------------------------

@dataclass
class State:
    id: int
    encoded: EncodedProcess
    term: ProcessTerm
    depth: int


@dataclass
class ExecutionSpace:
    states: List[State] = field(default_factory=list)
    edges: List[Tuple[int, int, str]] = field(default_factory=list)
    initial: int = 0
    truncated: bool = False
    limit: Optional[str] = None    # which limit fired, when truncated

    def successors(self, sid: int) -> List[Tuple[int, str]]:
        return [(b, k) for a, b, k in self.edges if a == sid]

    def reachable(self, sid: int, kinds=None) -> set:
        """States reachable from `sid` (inclusive) using edges of the given kinds."""
        seen = {sid}
        stack = [sid]
        while stack:
            a = stack.pop()
            for b, k in self.successors(a):
                if (kinds is None or k in kinds) and b not in seen:
                    seen.add(b)
                    stack.append(b)
        return seen


class _Store:
    """States bucketed by WL fingerprint; exact check by isomorphism."""

    def __init__(self):
        self.buckets: Dict[tuple, List[int]] = {}

    def find(self, space: ExecutionSpace, g: LabelledGraph) -> Tuple[Optional[int], tuple]:
        key = fingerprint(g)
        for sid in self.buckets.get(key, ()):
            if is_isomorphic(space.states[sid].encoded.graph, g):
                return sid, key
        return None, key

    def add(self, key: tuple, sid: int):
        self.buckets.setdefault(key, []).append(sid)


_WORKER: Optional[Engine] = None


def _init_worker(sys, seed):
    global _WORKER
    _WORKER = Engine(sys, seed)


def _expand(engine: Engine, state: EncodedProcess, budget: int):
    try:
        succs, used = engine.run(state, budget=budget)
    except StepBudgetExceeded:
        return None, budget
    return [(s.kind, s.encoded, s.term) for s in succs], used


def _work(args):
    return _expand(_WORKER, *args)


def explore(p: ProcessTerm, sys: Optional[RecursiveSystem] = None,
            limits: Optional[Limits] = None, *, jobs: int = 1,
            seed: Optional[int] = None) -> ExecutionSpace:
    """Breadth-first closure of the pipeline from ``encode(p)`` up to isomorphism.

    State ids are dense and follow discovery order.  Hitting a limit stops
    the search and records which limit fired; it is not an error.  With
    ``jobs > 1`` each BFS level is expanded in worker processes while
    insertion stays in this process, so ids do not depend on `jobs`.
    `seed` randomizes the match order of the merge and collection phases.
    """
    limits = limits or Limits()
    sys = sys or RecursiveSystem()
    engine = Engine(sys, seed)
    space = ExecutionSpace()
    store = _Store()
    start = encode(p, sys)
    _, key = store.find(space, start.graph)
    space.states.append(State(0, start, decode(start, sys), 0))
    store.add(key, 0)
    edge_set = set()
    budget = limits.step_budget
    pool = ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(sys, seed)) if jobs > 1 else None

    def expand(frontier):
        if pool is None:
            return [_expand(engine, space.states[s].encoded, budget) for s in frontier]
        return list(pool.map(_work, [(space.states[s].encoded, budget) for s in frontier]))

    def stop(limit):
        space.truncated = True
        space.limit = space.limit or limit

    try:
        frontier = [0]
        depth = 0
        while frontier:
            results = expand(frontier)
            if depth >= limits.max_depth:
                if any(r is None or r[0] for r in results):
                    stop("max-depth")
                break
            nxt = []
            for sid, (succs, used) in zip(frontier, results):
                budget -= used
                if succs is None or budget < 0:
                    stop("step-budget")
                    return space
                for kind, enc, term in sorted(succs, key=lambda s: (s[0], str(s[2]))):
                    tid, key = store.find(space, enc.graph)
                    if tid is None:
                        if len(space.states) >= limits.max_states:
                            stop("max-states")
                            continue
                        tid = len(space.states)
                        space.states.append(State(tid, enc, term, depth + 1))
                        store.add(key, tid)
                        nxt.append(tid)
                    if (sid, tid, kind) not in edge_set:
                        edge_set.add((sid, tid, kind))
                        space.edges.append((sid, tid, kind))
            frontier = nxt
            depth += 1
    finally:
        if pool is not None:
            pool.shutdown()
    return space


# --- export -------------------------------------------------------------------

def _q(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _edge_attrs(kind: str) -> str:
    if kind == COM:
        return f"label={_q(kind)}"
    return f"label={_q(kind)}, style=dashed"


def graph_dot(g: LabelledGraph, name: str = "G") -> str:
    """One labelled graph as an undirected DOT graph."""
    lines = [f"graph {_q(name)} {{", "  node [shape=ellipse, fontsize=10];"]
    for v in g.vertices:
        lines.append(f"  v{v} [label={_q(str(g.label(v)))}];")
    for a, b, t in g.edges():
        lines.append(f"  v{a} -- v{b} [label={_q(str(t))}, fontsize=9];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(space: ExecutionSpace, detail: str = "decoded") -> str:
    """The derivation graph as DOT; com edges solid, unfold edges dashed.

    `detail` is ``ids``, ``decoded`` or ``simplified-graphs`` (each state
    drawn as a cluster holding its simplified encoding).
    """
    if detail not in ("ids", "decoded", "simplified-graphs"):
        raise ValueError(f"unknown detail level {detail!r}")
    lines = ["digraph execution_space {", "  compound=true;", "  node [shape=box];"]
    for s in space.states:
        extra = ", peripheries=2" if s.id == space.initial else ""
        if detail == "simplified-graphs":
            view = simplify_view(s.encoded)
            lines.append(f"  subgraph cluster_s{s.id} {{")
            lines.append(f"    label={_q(f'{s.id}: {s.term}')};")
            lines.append(f"    s{s.id} [shape=point, label=\"\"{extra}];")
            for v in view.vertices:
                lines.append(f"    s{s.id}_v{v} [shape=ellipse, fontsize=10, "
                             f"label={_q(str(view.label(v)))}];")
            for a, b, t in view.edges():
                lines.append(f"    s{s.id}_v{a} -> s{s.id}_v{b} [dir=none, fontsize=9, "
                             f"label={_q(str(t))}];")
            lines.append("  }")
        else:
            label = str(s.id) if detail == "ids" else f"{s.id}: {s.term}"
            lines.append(f"  s{s.id} [label={_q(label)}{extra}];")
    for a, b, kind in space.edges:
        lines.append(f"  s{a} -> s{b} [{_edge_attrs(kind)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _graph_json(g: LabelledGraph) -> dict:
    return {
        "vertices": [{"id": v, "label": str(g.label(v))} for v in g.vertices],
        "edges": [{"a": a, "b": b, "label": str(t)} for a, b, t in g.edges()],
    }


def export_json(space: ExecutionSpace) -> str:
    doc = {
        "states": [{"id": s.id, "term": str(s.term), "graph": _graph_json(s.encoded.graph)}
                   for s in space.states],
        "edges": [{"from": a, "to": b, "kind": k} for a, b, k in space.edges],
        "initial": space.initial,
        "truncated": space.truncated,
    }
    if space.truncated:
        doc["limit"] = space.limit
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"

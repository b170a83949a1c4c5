"""π-calculus processes encoded as term-labelled graphs and reduced by DPO rewriting."""
from .congruence import canonical_form, congruent
from .dpo import Rule, apply_at, find_matches, normalize
from .encode import EncodedProcess, EncodingError, decode, encode, simplify_view, validate
from .execspace import ExecutionSpace, Limits, explore, export_dot, export_json, step_pipeline
from .lgraph import LabelledGraph, enumerate_monomorphisms, is_isomorphic
from .oracle import oracle_closure, oracle_step
from .parser import ParseError, parse_file, parse_process
from .process import (NIL, Call, Input, Nil, Output, Par, Process, RecursiveSystem,
                      Restrict, SemanticError, Sum, names)
from .rules import com_rules, gc_rules, merge_rules, unfold_rules
from .terms import Fn, Var, match_pattern, parse_term, term_isomorphic, unify

__version__ = "0.1.0"

__all__ = [
    "canonical_form", "congruent", "Rule", "apply_at", "find_matches", "normalize",
    "EncodedProcess", "EncodingError", "decode", "encode", "simplify_view", "validate",
    "ExecutionSpace", "Limits", "explore", "export_dot", "export_json", "step_pipeline",
    "LabelledGraph", "enumerate_monomorphisms", "is_isomorphic", "oracle_closure",
    "oracle_step", "ParseError", "parse_file", "parse_process", "NIL", "Call", "Input",
    "Nil", "Output", "Par", "Process", "RecursiveSystem", "Restrict", "SemanticError",
    "Sum", "names", "com_rules", "gc_rules", "merge_rules", "unfold_rules", "Fn", "Var",
    "match_pattern", "parse_term", "term_isomorphic", "unify",
]

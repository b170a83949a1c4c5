"""Command line front end.

    pidpo encode  FILE.pi [--out DIR]
    pidpo reduce  FILE.pi [--dump-intermediates] [--seed N]
    pidpo explore FILE.pi [--max-states N] [--max-depth N] [--step-budget N]
                          [--format dot,json] [--simplified] [--strict] [--jobs N]

Exit status: 0 success, 1 parse or semantic error, 2 validation fault,
3 truncated exploration under ``--strict``.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from .encode import EncodingError, encode, simplify_view
from .execspace import (Engine, Limits, PipelineError, explore, export_dot, export_json,
                        graph_dot)
from .parser import ParseError, parse_process
from .process import SemanticError
from .rules import all_rule_sets

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_TRUNCATED = 0, 1, 2, 3
FORMATS = ("dot", "json")


@dataclass
class RunConfig:
    command: str
    path: Path
    limits: Limits = field(default_factory=Limits)
    out: Path = Path(".")
    formats: List[str] = field(default_factory=lambda: list(FORMATS))
    simplified: bool = False
    dump_rules: bool = False
    dump_intermediates: bool = False
    strict: bool = False
    seed: Optional[int] = None
    jobs: int = 1
    verbose: bool = False


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _formats(text: str) -> List[str]:
    out = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in out if f not in FORMATS]
    if bad or not out:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad or text!r}; use dot,json")
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pidpo", description="π-calculus processes as graph rewriting")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("path", type=Path, help="input .pi file")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--dump-rules", action="store_true",
                        help="print every generated rule span")
    common.add_argument("--seed", type=int, default=None,
                        help="randomize the match order of the merge and collection phases")
    common.add_argument("-v", "--verbose", action="store_true")

    sub.add_parser("encode", parents=[common], help="write the encoding as DOT")

    red = sub.add_parser("reduce", parents=[common], help="one reduction step from the initial state")
    red.add_argument("--dump-intermediates", action="store_true",
                     help="print [P], G', G'' and [Q] for every match")

    ex = sub.add_parser("explore", parents=[common], help="compute the execution space")
    ex.add_argument("--max-states", type=_positive, default=Limits.max_states)
    ex.add_argument("--max-depth", type=_positive, default=Limits.max_depth)
    ex.add_argument("--step-budget", type=_positive, default=Limits.step_budget)
    ex.add_argument("--format", type=_formats, default=list(FORMATS), dest="formats")
    ex.add_argument("--simplified", action="store_true",
                    help="draw each state's simplified graph in the DOT output")
    ex.add_argument("--strict", action="store_true", help="exit 3 when a limit was hit")
    ex.add_argument("--jobs", type=_positive, default=1)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(ns.command, ns.path, out=ns.out, dump_rules=ns.dump_rules,
                    seed=ns.seed, verbose=ns.verbose)
    if ns.command == "reduce":
        cfg.dump_intermediates = ns.dump_intermediates
    if ns.command == "explore":
        cfg.limits = Limits(ns.max_states, ns.max_depth, ns.step_budget)
        cfg.formats = ns.formats
        cfg.simplified = ns.simplified
        cfg.strict = ns.strict
        cfg.jobs = ns.jobs
    return cfg


def _write(path: Path, text: str, out) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}", file=out)


def execute(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        text = cfg.path.read_text(encoding="utf-8")
    except OSError as e:
        print(f"{cfg.path}: {e.strerror}", file=err)
        return EXIT_INPUT
    try:
        p, system = parse_process(text)
    except ParseError as e:
        print(f"{cfg.path}:{e.line}:{e.col}: {e.message}", file=err)
        return EXIT_INPUT
    except SemanticError as e:
        print(f"{cfg.path}: {e}", file=err)
        return EXIT_INPUT

    if cfg.dump_rules:
        for rs in all_rule_sets(system):
            print(rs.dump(), file=out)
            print(file=out)

    stem = cfg.path.stem
    try:
        if cfg.command == "encode":
            e = encode(p, system)
            _write(cfg.out / f"{stem}.graph.dot", graph_dot(e.graph, stem), out)
            _write(cfg.out / f"{stem}.simplified.dot",
                   graph_dot(simplify_view(e), f"{stem} (simplified)"), out)
            return EXIT_OK

        if cfg.command == "reduce":
            engine = Engine(system, cfg.seed)
            succs, _ = engine.run(encode(p, system), budget=Limits.step_budget,
                                  keep_chain=True)
            if not succs:
                print("no reduction possible", file=out)
            for i, s in enumerate(succs):
                print(f"== match {i}: {s.chain.rule} -> {s.term}", file=out)
                if cfg.dump_intermediates:
                    for name, g in s.chain.graphs():
                        print(f"-- {name}", file=out)
                        print(g.dump(), file=out)
            return EXIT_OK

        space = explore(p, system, cfg.limits, jobs=cfg.jobs, seed=cfg.seed)
        if "dot" in cfg.formats:
            detail = "simplified-graphs" if cfg.simplified else "decoded"
            _write(cfg.out / f"{stem}.space.dot", export_dot(space, detail), out)
        if "json" in cfg.formats:
            _write(cfg.out / f"{stem}.space.json", export_json(space), out)
        print(f"{len(space.states)} states, {len(space.edges)} edges"
              + (f", truncated ({space.limit})" if space.truncated else ""), file=out)
        if space.truncated and cfg.strict:
            print(f"{cfg.path}: exploration truncated by {space.limit}", file=err)
            return EXIT_TRUNCATED
        return EXIT_OK
    except PipelineError as e:
        print(f"{cfg.path}: validation fault: {e}", file=err)
        if cfg.verbose:
            for name, g in e.chain.graphs():
                print(f"-- {name}\n{g.dump()}", file=err)
        return EXIT_INVALID
    except EncodingError as e:
        print(f"{cfg.path}: validation fault: {e}", file=err)
        return EXIT_INVALID


def run(argv: Optional[List[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    return execute(config_from_args(ns))


def main() -> None:  # pragma: no cover - console entry point
    sys.exit(run())

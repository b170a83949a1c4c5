"""Parser for the textual process language.

    program     := (def)* ['main' '='] proc
    def         := ident '(' names ')' '=' proc
    proc        := sum ('|' sum)*
    sum         := guarded ('+' guarded)*
    guarded     := '0' | ident '(' name ')' ['.' guarded]      -- input
                 | ident '<' name '>' ['.' guarded]            -- output
                 | ident '(' names ')'                         -- call
                 | 'new' name '.' proc | '(' proc ')'

``x(y)`` without a continuation is a call when ``x`` names a definition and an
input otherwise; an undefined identifier starting with an upper-case letter is
reported as an unknown process.  Comments run from ``--`` to the end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple

from .process import (NIL, Call, Input, Output, Par, ProcessTerm,
                      RecursiveSystem, Restrict, SemanticError, Sum, flatten)

__all__ = ["ParseError", "parse_process", "parse_file"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+) | (?P<comment>--[^\n]*) |
    (?P<ident>[A-Za-z_][A-Za-z0-9_]*) | (?P<zero>0) |
    (?P<sym>[().,<>|+=])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind if kind != "sym" else chunk, chunk, line, col))
        for ch in chunk:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


@dataclass(frozen=True)
class _Apply(ProcessTerm):
    """``ident(names)`` before we know whether it is a call or a bare input."""
    ident: str
    args: Tuple[str, ...]
    line: int
    col: int


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def expect(self, kind: str) -> _Tok:
        t = self.tok
        if t.kind != kind:
            want = "identifier" if kind == "ident" else repr(kind)
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {want}, got {got}", t.line, t.col)
        self.i += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def name(self) -> str:
        t = self.expect("ident")
        if t.text in ("new", "main"):
            raise ParseError(f"{t.text!r} is a keyword", t.line, t.col)
        return t.text

    def at_def(self) -> bool:
        if self.tok.kind != "ident" or self.peek().kind != "(":
            return False
        j = self.i + 2
        while self.toks[j].kind in ("ident", ","):
            j += 1
        return self.toks[j].kind == ")" and self.toks[j + 1].kind == "="

    # -- grammar
    def program(self):
        defs = []
        while self.at_def():
            head = self.tok
            ident = self.name()
            self.expect("(")
            params = self.names_list()
            self.expect(")")
            self.expect("=")
            defs.append((ident, params, self.proc(), head))
        if self.tok.kind == "ident" and self.tok.text == "main":
            self.i += 1
            self.expect("=")
        if self.tok.kind == "eof":
            if defs:
                raise ParseError("missing main process", self.tok.line, self.tok.col)
            raise ParseError("empty input", self.tok.line, self.tok.col)
        main = self.proc()
        if self.tok.kind != "eof":
            t = self.tok
            raise ParseError(f"unexpected {t.text!r}", t.line, t.col)
        return defs, main

    def names_list(self) -> List[str]:
        out = []
        if self.tok.kind == "ident":
            out.append(self.name())
            while self.accept(","):
                out.append(self.name())
        return out

    def proc(self) -> ProcessTerm:
        items = [self.sum()]
        while self.accept("|"):
            items.append(self.sum())
        return items[0] if len(items) == 1 else Par(tuple(items))

    def sum(self) -> ProcessTerm:
        items = [self.guarded()]
        while self.accept("+"):
            items.append(self.guarded())
        return items[0] if len(items) == 1 else Sum(tuple(items))

    def guarded(self) -> ProcessTerm:
        t = self.tok
        if self.accept("zero"):
            return NIL
        if self.accept("("):
            p = self.proc()
            self.expect(")")
            return p
        if t.kind == "ident" and t.text == "new":
            self.i += 1
            n = self.name()
            self.expect(".")
            return Restrict(n, self.proc())
        if t.kind != "ident":
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected a process, got {got}", t.line, t.col)
        ident = self.name()
        if self.accept("<"):
            arg = self.name()
            self.expect(">")
            return Output(ident, arg, self.continuation())
        self.expect("(")
        args = self.names_list()
        self.expect(")")
        if self.tok.kind == ".":
            if len(args) != 1:
                raise ParseError("an input prefix binds exactly one name", t.line, t.col)
            return Input(ident, args[0], self.continuation())
        return _Apply(ident, tuple(args), t.line, t.col)

    def continuation(self) -> ProcessTerm:
        if self.accept("."):
            return self.guarded()
        return NIL


def _resolve(p: ProcessTerm, defs: set) -> ProcessTerm:
    if isinstance(p, _Apply):
        if p.ident in defs:
            return Call(p.ident, p.args)
        if len(p.args) == 1 and not p.ident[0].isupper():
            return Input(p.ident, p.args[0], NIL)
        raise SemanticError(f"{p.line}:{p.col}: unknown process identifier {p.ident}")
    if isinstance(p, Input):
        return Input(p.channel, p.binder, _resolve(p.cont, defs))
    if isinstance(p, Output):
        return Output(p.channel, p.arg, _resolve(p.cont, defs))
    if isinstance(p, Par):
        return Par(tuple(_resolve(q, defs) for q in p.items))
    if isinstance(p, Sum):
        return Sum(tuple(_resolve(q, defs) for q in p.items))
    if isinstance(p, Restrict):
        return Restrict(p.name, _resolve(p.body, defs))
    return p


def parse_process(text: str) -> Tuple[ProcessTerm, RecursiveSystem]:
    """Parse a program; return the flattened main process and its definitions.

    Raises ParseError for syntax errors (with line/column) and SemanticError
    for unguarded choice, unknown identifiers, arity mismatch or duplicate
    definitions.
    """
    defs, main = _Parser(text).program()
    sys = RecursiveSystem()
    idents = {d[0] for d in defs}
    for ident, params, body, head in defs:
        try:
            sys.add(ident, params, flatten(_resolve(body, idents)))
        except SemanticError as e:
            raise SemanticError(f"{head.line}:{head.col}: {e}") from None
    main = flatten(_resolve(main, idents))
    sys.validate(main)
    return main, sys


def parse_file(path) -> Tuple[ProcessTerm, RecursiveSystem]:
    with open(path, encoding="utf-8") as fh:
        return parse_process(fh.read())

"""First-order terms, substitutions and the term relations used for label matching.

Terms are written ``f(a, _X)``: an identifier names a function symbol, a leading
underscore marks a variable.  The underscore is syntax only, ``Var("X")``
renders as ``_X``.
"""
from __future__ import annotations

import re
from typing import Dict, Iterator, Mapping, Optional, Union

__all__ = [
    "Var", "Fn", "Term", "Substitution", "TermSyntaxError",
    "parse_term", "apply_subst", "unify", "match_pattern", "term_isomorphic",
    "variables", "is_renaming", "format_subst", "erase_variables", "rename_apart",
]


class Var:
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash(("var", name)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Var, (self.name,))

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return "_" + self.name

    def __lt__(self, other):
        return _order_key(self) < _order_key(other)


class Fn:
    __slots__ = ("symbol", "args", "_hash")

    def __init__(self, symbol: str, args=()):
        args = tuple(args)
        object.__setattr__(self, "symbol", symbol)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_hash", hash((symbol, args)))

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Fn) and other._hash == self._hash
                and other.symbol == self.symbol and other.args == self.args)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (Fn, (self.symbol, self.args))

    def __repr__(self):
        if not self.args:
            return f"Fn({self.symbol!r})"
        return f"Fn({self.symbol!r}, {list(self.args)!r})"

    def __str__(self):
        if not self.args:
            return self.symbol
        return f"{self.symbol}({', '.join(str(a) for a in self.args)})"

    def __lt__(self, other):
        return _order_key(self) < _order_key(other)

    @property
    def arity(self) -> int:
        return len(self.args)


Term = Union[Var, Fn]
Substitution = Dict[Var, Term]


def _order_key(t: Term):
    if isinstance(t, Var):
        return (0, t.name)
    return (1, t.symbol, len(t.args), tuple(_order_key(a) for a in t.args))


# --- syntax -----------------------------------------------------------------

class TermSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:([A-Za-z0-9_][A-Za-z0-9_\-]*)|(.))")


def _tokens(text: str) -> Iterator[str]:
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - the regex matches any character
            break
        yield m.group(1) or m.group(2)
        pos = m.end()


def parse_term(text: str) -> Term:
    """Parse ``term := ident | ident '(' term (',' term)* ')'``.

    Identifiers may contain ``-`` after the first character so edge labels such
    as ``arg-sync`` are plain nullary symbols; numerals are constants too.

    >>> parse_term("f(_X, g(y))")
    Fn('f', [Var('X'), Fn('g', [Fn('y')])])
    """
    toks = list(_tokens(text))
    pos = 0

    def term() -> Term:
        nonlocal pos
        if pos >= len(toks) or not re.match(r"[A-Za-z0-9_]", toks[pos]):
            raise TermSyntaxError(f"expected identifier in {text!r}")
        ident = toks[pos]
        pos += 1
        if ident.startswith("_"):
            return Var(ident[1:])
        if pos < len(toks) and toks[pos] == "(":
            pos += 1
            args = [term()]
            while pos < len(toks) and toks[pos] == ",":
                pos += 1
                args.append(term())
            if pos >= len(toks) or toks[pos] != ")":
                raise TermSyntaxError(f"expected ')' in {text!r}")
            pos += 1
            return Fn(ident, args)
        return Fn(ident)

    result = term()
    if pos != len(toks):
        raise TermSyntaxError(f"trailing input in {text!r}")
    return result


def format_subst(s: Mapping[Var, Term]) -> str:
    items = sorted(s.items(), key=lambda kv: kv[0].name)
    return "{" + ", ".join(f"{k} ↦ {v}" for k, v in items) + "}"


# --- basic operations -------------------------------------------------------

def variables(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            out.add(u)
        else:
            stack.extend(u.args)
    return out


def apply_subst(s: Mapping[Var, Term], t: Term) -> Term:
    """Replace every domain variable of `s` in `t` simultaneously."""
    if not s:
        return t
    if isinstance(t, Var):
        return s.get(t, t)
    if not t.args:
        return t
    return Fn(t.symbol, [apply_subst(s, a) for a in t.args])


def erase_variables(t: Term) -> Term:
    """Replace every variable by the same anonymous one; invariant under renaming."""
    if isinstance(t, Var):
        return _ANON
    if not t.args:
        return t
    return Fn(t.symbol, [erase_variables(a) for a in t.args])


_ANON = Var("")


def rename_apart(t: Term, suffix: str) -> Term:
    return apply_subst({v: Var(v.name + suffix) for v in variables(t)}, t)


def is_renaming(s: Mapping[Var, Term]) -> bool:
    targets = list(s.values())
    return all(isinstance(v, Var) for v in targets) and len(set(targets)) == len(targets)


def _sorted(s: Dict[Var, Term]) -> Substitution:
    return dict(sorted(s.items(), key=lambda kv: kv[0].name))


# --- unification ------------------------------------------------------------

def _walk(t: Term, s: Mapping[Var, Term]) -> Term:
    while isinstance(t, Var) and t in s:
        t = s[t]
    return t


def _occurs(v: Var, t: Term, s: Mapping[Var, Term]) -> bool:
    stack = [t]
    while stack:
        u = _walk(stack.pop(), s)
        if u == v:
            return True
        if isinstance(u, Fn):
            stack.extend(u.args)
    return False


def _resolve(t: Term, s: Mapping[Var, Term]) -> Term:
    t = _walk(t, s)
    if isinstance(t, Var) or not t.args:
        return t
    return Fn(t.symbol, [_resolve(a, s) for a in t.args])


def unify_into(t1: Term, t2: Term, s: Dict[Var, Term]) -> bool:
    """Extend the triangular substitution `s` in place; False on failure.

    On failure `s` may hold partial bindings, callers pass a copy.
    """
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, s)
        b = _walk(b, s)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a, b, s):
                return False
            s[a] = b
        elif isinstance(b, Var):
            if _occurs(b, a, s):
                return False
            s[b] = a
        else:
            if a.symbol != b.symbol or len(a.args) != len(b.args):
                return False
            stack.extend(zip(a.args, b.args))
    return True


def solved(s: Mapping[Var, Term]) -> Substitution:
    """Turn a triangular substitution into an idempotent one."""
    return _sorted({v: _resolve(v, s) for v in s})


def unify(t1: Term, t2: Term) -> Optional[Substitution]:
    """Most general unifier of `t1` and `t2`, or None.

    >>> X, Y, Z = Var("X"), Var("Y"), Var("Z")
    >>> format_subst(unify(Fn("f", [X, Fn("g", [Y])]), Fn("f", [Z, Z])))
    '{_X ↦ g(_Y), _Z ↦ g(_Y)}'
    """
    s: Dict[Var, Term] = {}
    if not unify_into(t1, t2, s):
        return None
    return solved(s)


def match_into(pattern: Term, subject: Term, s: Dict[Var, Term]) -> bool:
    """One-sided matching extending `s` in place; subject variables stay frozen."""
    stack = [(pattern, subject)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            bound = s.get(p)
            if bound is None:
                s[p] = t
            elif bound != t:
                return False
        elif isinstance(t, Var):
            return False
        else:
            if p.symbol != t.symbol or len(p.args) != len(t.args):
                return False
            stack.extend(zip(p.args, t.args))
    return True


def match_pattern(pattern: Term, subject: Term) -> Optional[Substitution]:
    """Return σ with σ(pattern) == subject, binding only pattern variables."""
    s: Dict[Var, Term] = {}
    if not match_into(pattern, subject, s):
        return None
    return _sorted(s)


def rename_into(t1: Term, t2: Term, fwd: Dict[Var, Var], bwd: Dict[Var, Var]) -> bool:
    """Extend the variable bijection (fwd: t1 vars -> t2 vars) so t1 renames to t2."""
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, Var):
            if not isinstance(b, Var):
                return False
            fa = fwd.get(a)
            if fa is None:
                if b in bwd:
                    return False
                fwd[a] = b
                bwd[b] = a
            elif fa != b:
                return False
        elif isinstance(b, Var):
            return False
        else:
            if a._hash == b._hash and a == b and not a.args:
                continue
            if a.symbol != b.symbol or len(a.args) != len(b.args):
                return False
            stack.extend(zip(a.args, b.args))
    return True


def term_isomorphic(t1: Term, t2: Term) -> bool:
    """True iff some renaming σ gives t1 == σ(t2)."""
    return rename_into(t1, t2, {}, {})

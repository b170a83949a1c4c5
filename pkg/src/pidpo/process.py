"""π-calculus process terms, recursive definitions and name handling.

Terms are immutable.  Besides the plain constructors there is a small builder
API for writing processes in Python::

    x, y, z, w = names("x y z w")
    P = Process().input(x, z).output(z, w) | Process().output(x, y)
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

__all__ = [
    "ProcessTerm", "Nil", "Input", "Output", "Par", "Sum", "Restrict", "Call",
    "NIL", "RecursiveSystem", "Definition", "Process", "names",
    "free_names", "bound_names", "substitute", "fresh_name", "is_guarded",
    "flatten", "prefix_count", "SemanticError",
]


class SemanticError(ValueError):
    pass


class ProcessTerm:
    __slots__ = ()

    def __or__(self, other):
        return Par((_term(self), _term(other)))

    def __ror__(self, other):
        return Par((_term(other), _term(self)))

    def __add__(self, other):
        return Sum((_term(self), _term(other)))

    def __radd__(self, other):
        return Sum((_term(other), _term(self)))

    def __str__(self):
        return render(_term(self))


@dataclass(frozen=True, repr=False)
class Nil(ProcessTerm):
    def __repr__(self):
        return "Nil"


NIL = Nil()


@dataclass(frozen=True, repr=False)
class Input(ProcessTerm):
    channel: str
    binder: str
    cont: ProcessTerm = NIL

    def __repr__(self):
        return f"Input({self.channel},{self.binder},{self.cont!r})"


@dataclass(frozen=True, repr=False)
class Output(ProcessTerm):
    channel: str
    arg: str
    cont: ProcessTerm = NIL

    def __repr__(self):
        return f"Output({self.channel},{self.arg},{self.cont!r})"


@dataclass(frozen=True, repr=False)
class Par(ProcessTerm):
    items: Tuple[ProcessTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def __repr__(self):
        return f"Par[{', '.join(map(repr, self.items))}]"


@dataclass(frozen=True, repr=False)
class Sum(ProcessTerm):
    items: Tuple[ProcessTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def __repr__(self):
        return f"Sum[{', '.join(map(repr, self.items))}]"


@dataclass(frozen=True, repr=False)
class Restrict(ProcessTerm):
    name: str
    body: ProcessTerm

    def __repr__(self):
        return f"Restrict({self.name},{self.body!r})"


@dataclass(frozen=True, repr=False)
class Call(ProcessTerm):
    ident: str
    args: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __repr__(self):
        return f"Call({self.ident},{list(self.args)})"


# --- rendering ----------------------------------------------------------------

def render(p: ProcessTerm) -> str:
    """DSL syntax; the parser reads this back to an equal term."""
    if isinstance(p, Nil):
        return "0"
    if isinstance(p, Par):
        return " | ".join(_wrap(q, (Par, Restrict)) for q in p.items)
    if isinstance(p, Sum):
        return " + ".join(_wrap(q, (Par, Sum, Restrict)) for q in p.items)
    if isinstance(p, (Input, Output)):
        head = f"{p.channel}({p.binder})" if isinstance(p, Input) else f"{p.channel}<{p.arg}>"
        if isinstance(p.cont, Nil):
            return head + ".0" if isinstance(p, Input) else head
        return head + "." + _wrap(p.cont, (Par, Sum, Restrict))
    if isinstance(p, Restrict):
        return f"new {p.name}. {_wrap(p.body, ())}"
    if isinstance(p, Call):
        return f"{p.ident}({', '.join(p.args)})"
    raise TypeError(p)


def _wrap(p, kinds) -> str:
    text = render(p)
    return f"({text})" if isinstance(p, kinds) else text


# --- builders ---------------------------------------------------------------

def names(text: str) -> List[str]:
    return text.split()


def _term(p) -> ProcessTerm:
    if isinstance(p, Process):
        return p.term
    if isinstance(p, ProcessTerm):
        return p
    raise TypeError(f"not a process: {p!r}")


class Process(ProcessTerm):
    """Prefix-chain builder: ``Process().input(x, z).output(z, w).call("A", [w])``."""

    __slots__ = ("_steps", "_tail")

    def __init__(self, steps=(), tail: ProcessTerm = NIL):
        self._steps = tuple(steps)
        self._tail = tail

    def input(self, channel: str, binder: str) -> "Process":
        return Process(self._steps + (("in", channel, binder),), self._tail)

    def output(self, channel: str, arg: str) -> "Process":
        return Process(self._steps + (("out", channel, arg),), self._tail)

    def call(self, ident: str, args: Sequence[str]) -> "Process":
        return Process(self._steps, Call(ident, tuple(args)))

    def then(self, cont) -> "Process":
        return Process(self._steps, _term(cont))

    @property
    def term(self) -> ProcessTerm:
        p = self._tail
        for kind, a, b in reversed(self._steps):
            p = Input(a, b, p) if kind == "in" else Output(a, b, p)
        return p

    def __repr__(self):
        return f"Process({self.term!r})"


@dataclass(frozen=True)
class Definition:
    params: Tuple[str, ...]
    body: ProcessTerm


class RecursiveSystem:
    """Named equations ``A(x1, ..., xn) = P_A``; at most one per identifier."""

    def __init__(self, defs: Optional[Mapping[str, Definition]] = None):
        self._defs: Dict[str, Definition] = dict(defs or {})

    def add(self, ident: str, params: Sequence[str], body) -> "RecursiveSystem":
        if ident in self._defs:
            raise SemanticError(f"duplicate definition of {ident}")
        params = tuple(params)
        if len(set(params)) != len(params):
            raise SemanticError(f"parameters of {ident} are not distinct")
        self._defs[ident] = Definition(params, _term(body))
        return self

    def __contains__(self, ident) -> bool:
        return ident in self._defs

    def __getitem__(self, ident) -> Definition:
        return self._defs[ident]

    def __iter__(self):
        return iter(sorted(self._defs))

    def __len__(self):
        return len(self._defs)

    def items(self):
        return sorted(self._defs.items())

    def validate(self, main: Optional[ProcessTerm] = None) -> None:
        """Check closedness, call arity and definedness; raises SemanticError."""
        for ident, d in self.items():
            extra = free_names(d.body) - set(d.params)
            if extra:
                raise SemanticError(
                    f"definition {ident} has free names {sorted(extra)} not among its parameters")
            self._check_calls(d.body, f"definition {ident}")
            if not is_guarded(d.body):
                raise SemanticError(f"unguarded choice in definition {ident}")
        if main is not None:
            self._check_calls(main, "main process")
            if not is_guarded(main):
                raise SemanticError("unguarded choice in main process")

    def _check_calls(self, p: ProcessTerm, where: str) -> None:
        for c in _calls(p):
            if c.ident not in self._defs:
                raise SemanticError(f"unknown process identifier {c.ident} in {where}")
            want = len(self._defs[c.ident].params)
            if len(c.args) != want:
                raise SemanticError(
                    f"{c.ident} expects {want} argument(s), got {len(c.args)} in {where}")

    def __repr__(self):
        return f"RecursiveSystem({sorted(self._defs)})"


def _calls(p: ProcessTerm):
    if isinstance(p, Call):
        yield p
    elif isinstance(p, (Input, Output)):
        yield from _calls(p.cont)
    elif isinstance(p, (Par, Sum)):
        for q in p.items:
            yield from _calls(q)
    elif isinstance(p, Restrict):
        yield from _calls(p.body)


# --- names -----------------------------------------------------------------

def free_names(p: ProcessTerm) -> Set[str]:
    if isinstance(p, Nil):
        return set()
    if isinstance(p, Input):
        return {p.channel} | (free_names(p.cont) - {p.binder})
    if isinstance(p, Output):
        return {p.channel, p.arg} | free_names(p.cont)
    if isinstance(p, (Par, Sum)):
        out: Set[str] = set()
        for q in p.items:
            out |= free_names(q)
        return out
    if isinstance(p, Restrict):
        return free_names(p.body) - {p.name}
    if isinstance(p, Call):
        return set(p.args)
    raise TypeError(p)


def bound_names(p: ProcessTerm) -> Set[str]:
    if isinstance(p, Input):
        return {p.binder} | bound_names(p.cont)
    if isinstance(p, Output):
        return bound_names(p.cont)
    if isinstance(p, (Par, Sum)):
        out: Set[str] = set()
        for q in p.items:
            out |= bound_names(q)
        return out
    if isinstance(p, Restrict):
        return {p.name} | bound_names(p.body)
    return set()


def all_names(p: ProcessTerm) -> Set[str]:
    return free_names(p) | bound_names(p)


def fresh_name(avoid: Iterable[str], base: str = "n") -> str:
    avoid = set(avoid)
    base = base.rstrip("0123456789'") or "n"
    for i in itertools.count():
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def substitute(p: ProcessTerm, mapping: Mapping[str, str]) -> ProcessTerm:
    """Capture-avoiding simultaneous substitution of free names."""
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return p
    return _subst(p, mapping, set(mapping.values()))


def _subst(p, m, rng):
    if isinstance(p, (Nil,)):
        return p
    if isinstance(p, Call):
        return Call(p.ident, tuple(m.get(a, a) for a in p.args))
    if isinstance(p, Output):
        return Output(m.get(p.channel, p.channel), m.get(p.arg, p.arg), _subst(p.cont, m, rng))
    if isinstance(p, Par):
        return Par(tuple(_subst(q, m, rng) for q in p.items))
    if isinstance(p, Sum):
        return Sum(tuple(_subst(q, m, rng) for q in p.items))
    if isinstance(p, (Input, Restrict)):
        bname = p.binder if isinstance(p, Input) else p.name
        body = p.cont if isinstance(p, Input) else p.body
        inner = {k: v for k, v in m.items() if k != bname}
        if bname in rng and (free_names(body) & set(inner)):
            # the binder would capture a substituted name: rename it first
            new = fresh_name(rng | all_names(body) | set(m) | {bname}, bname)
            body = _subst(body, {bname: new}, {new})
            bname = new
        body = _subst(body, inner, set(inner.values())) if inner else body
        if isinstance(p, Input):
            return Input(m.get(p.channel, p.channel), bname, body)
        return Restrict(bname, body)
    raise TypeError(p)


# --- shape helpers --------------------------------------------------------

def is_guarded(p: ProcessTerm) -> bool:
    """Every choice branch is 0, a prefix, a choice, or a restricted branch."""
    if isinstance(p, Sum):
        return all(_guarded_branch(q) for q in p.items)
    if isinstance(p, (Input, Output)):
        return is_guarded(p.cont)
    if isinstance(p, Par):
        return all(is_guarded(q) for q in p.items)
    if isinstance(p, Restrict):
        return is_guarded(p.body)
    return True


def _guarded_branch(p) -> bool:
    if isinstance(p, Nil):
        return True
    if isinstance(p, (Input, Output)):
        return is_guarded(p.cont)
    if isinstance(p, Sum):
        return all(_guarded_branch(q) for q in p.items)
    if isinstance(p, Restrict):
        return _guarded_branch(p.body)
    return False


def flatten(p: ProcessTerm) -> ProcessTerm:
    """Drop 0 units and flatten nested ∥ / + into n-ary nodes (length ≥ 2)."""
    if isinstance(p, (Par, Sum)):
        kind = type(p)
        items = []
        for q in p.items:
            q = flatten(q)
            if isinstance(q, Nil):
                continue
            if isinstance(q, kind):
                items.extend(q.items)
            else:
                items.append(q)
        if not items:
            return NIL
        if len(items) == 1:
            return items[0]
        return kind(tuple(items))
    if isinstance(p, Input):
        return Input(p.channel, p.binder, flatten(p.cont))
    if isinstance(p, Output):
        return Output(p.channel, p.arg, flatten(p.cont))
    if isinstance(p, Restrict):
        return Restrict(p.name, flatten(p.body))
    return p


def prefix_count(p: ProcessTerm) -> int:
    if isinstance(p, (Input, Output)):
        return 1 + prefix_count(p.cont)
    if isinstance(p, (Par, Sum)):
        return sum(prefix_count(q) for q in p.items)
    if isinstance(p, Restrict):
        return prefix_count(p.body)
    return 0

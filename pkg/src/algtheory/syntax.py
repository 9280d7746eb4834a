"""Types, raw terms, contexts, sequents and simultaneous substitution.

Types are plain tuples of atomic type names; the tensor of types is tuple
concatenation and ``()`` is the unit.  Raw terms keep tensors flattened and
free of ``EMPTY`` factors, so associativity and unit laws hold by
construction and term equality is structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import LengthMismatch, UnboundVariable, ContextClash

TypeSeq = tuple  # tuple[str, ...]


class _Empty:
    """The empty raw term.  Use the module constant ``EMPTY``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"

    def __str__(self):
        return "I"

    def __reduce__(self):
        return (_Empty, ())


EMPTY = _Empty()


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    const: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))

    def __str__(self):
        if not self.args:
            return self.const
        return f"{self.const}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Tensor:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if len(self.factors) < 2:
            raise ValueError("Tensor needs at least two factors; use tensor()")
        for f in self.factors:
            if isinstance(f, (Tensor, _Empty)):
                raise ValueError("Tensor factors must be flattened")

    def __str__(self):
        return " * ".join(str(f) for f in self.factors)


RawTerm = Union[_Empty, Var, App, Tensor]


def tensor(*terms) -> RawTerm:
    """Tensor of raw terms, flattened and with empty factors dropped."""
    flat = []
    for t in terms:
        if isinstance(t, Tensor):
            flat.extend(t.factors)
        elif t is not EMPTY:
            flat.append(t)
    if not flat:
        return EMPTY
    if len(flat) == 1:
        return flat[0]
    return Tensor(tuple(flat))


def atoms(t: RawTerm) -> tuple:
    """The length-one components of ``t``, left to right."""
    if t is EMPTY:
        return ()
    if isinstance(t, Tensor):
        return t.factors
    return (t,)


def term_length(t: RawTerm) -> int:
    if t is EMPTY:
        return 0
    if isinstance(t, Tensor):
        return sum(term_length(f) for f in t.factors)
    return 1


def occurrences(t: RawTerm) -> list:
    """Variable occurrences of ``t`` from left to right, with multiplicity."""
    out = []

    def walk(u):
        if isinstance(u, Var):
            out.append(u.name)
        elif isinstance(u, App):
            for a in u.args:
                walk(a)
        elif isinstance(u, Tensor):
            for f in u.factors:
                walk(f)

    walk(t)
    return out


def substitute(t: RawTerm, s: Sequence, x: Sequence) -> RawTerm:
    """Simultaneous substitution ``t[s/x]``.

    ``s`` is a list of length-one raw terms and ``x`` a list of distinct
    variable names of the same length.  A raw term of length n may be passed
    for ``s`` instead of a list; it is split into its atomic components.
    """
    if not isinstance(s, (list, tuple)):
        s = atoms(s)
    x = [v.name if isinstance(v, Var) else v for v in x]
    if len(s) != len(x):
        raise LengthMismatch(f"substituting {len(s)} terms for {len(x)} variables")
    if len(set(x)) != len(x):
        raise LengthMismatch(f"substituted variables are not distinct: {x}")
    for si in s:
        if term_length(si) != 1:
            raise LengthMismatch(f"substituent {si} does not have length 1")
    table = dict(zip(x, s))

    def go(u):
        if u is EMPTY:
            return EMPTY
        if isinstance(u, Var):
            return table.get(u.name, u)
        if isinstance(u, App):
            return App(u.const, tuple(go(a) for a in u.args))
        return tensor(*(go(f) for f in u.factors))

    return go(t)


def relabel_occurrences(t: RawTerm, names: Sequence[str]) -> RawTerm:
    """Replace the i-th variable occurrence (left to right) by ``names[i]``."""
    it = iter(names)

    def go(u):
        if isinstance(u, Var):
            return Var(next(it))
        if isinstance(u, App):
            return App(u.const, tuple(go(a) for a in u.args))
        if isinstance(u, Tensor):
            return tensor(*(go(f) for f in u.factors))
        return u

    out = go(t)
    if next(it, None) is not None:
        raise LengthMismatch("more names than occurrences")
    return out


def constants_of(t: RawTerm) -> set:
    out = set()

    def walk(u):
        if isinstance(u, App):
            out.add(u.const)
            for a in u.args:
                walk(a)
        elif isinstance(u, Tensor):
            for f in u.factors:
                walk(f)

    walk(t)
    return out


@dataclass(frozen=True)
class Context:
    entries: tuple = ()  # ((name, atomic type), ...)

    def __post_init__(self):
        entries = tuple((str(n), str(a)) for n, a in self.entries)
        object.__setattr__(self, "entries", entries)
        names = [n for n, _ in entries]
        if len(set(names)) != len(names):
            raise ContextClash(f"repeated variable in context {names}")

    @classmethod
    def of(cls, names: Iterable[str], types: Iterable[str]) -> "Context":
        names, types = list(names), list(types)
        if len(names) != len(types):
            raise LengthMismatch("context names and types differ in length")
        return cls(tuple(zip(names, types)))

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.entries)

    @property
    def types(self) -> TypeSeq:
        return tuple(a for _, a in self.entries)

    def __len__(self):
        return len(self.entries)

    def __add__(self, other: "Context") -> "Context":
        return Context(self.entries + other.entries)

    def __str__(self):
        return " ".join(f"{n}:{a}" for n, a in self.entries)


def format_types(types: TypeSeq) -> str:
    return " ".join(types) if types else "I"


@dataclass(frozen=True)
class Sequent:
    context: Context
    term: RawTerm
    codomain: TypeSeq

    def __post_init__(self):
        object.__setattr__(self, "codomain", tuple(self.codomain))

    def __str__(self):
        ctx = str(self.context)
        head = f"{ctx} |- " if ctx else "|- "
        return f"{head}{self.term} : {format_types(self.codomain)}"


@dataclass(frozen=True)
class Formula:
    context: Context
    left: RawTerm
    right: RawTerm
    codomain: TypeSeq

    def __post_init__(self):
        object.__setattr__(self, "codomain", tuple(self.codomain))

    @property
    def sides(self):
        return (Sequent(self.context, self.left, self.codomain),
                Sequent(self.context, self.right, self.codomain))

    def __str__(self):
        ctx = str(self.context)
        head = f"{ctx} |- " if ctx else "|- "
        return f"{head}{self.left} = {self.right} : {format_types(self.codomain)}"


def canonical_names(n: int) -> list:
    return [f"v{i}" for i in range(1, n + 1)]


def canonical_rename(s):
    """Rename context variables positionally to v1, v2, ...

    Accepts a ``Sequent`` or a ``Formula``.  Two sequents are alphabetical
    variants exactly when their canonical renamings are equal.
    """
    names = s.context.names
    terms = (s.term,) if isinstance(s, Sequent) else (s.left, s.right)
    for t in terms:
        for v in occurrences(t):
            if v not in names:
                raise UnboundVariable(f"variable {v} not declared in context")
    new = canonical_names(len(names))
    ctx = Context.of(new, s.context.types)
    repl = [Var(v) for v in new]
    if isinstance(s, Sequent):
        return Sequent(ctx, substitute(s.term, repl, names), s.codomain)
    return Formula(ctx, substitute(s.left, repl, names),
                   substitute(s.right, repl, names), s.codomain)


def alphabetical_variants(s1, s2) -> bool:
    return canonical_rename(s1) == canonical_rename(s2)

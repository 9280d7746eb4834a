"""Boolean functions built from join, negation and bottom without copying
variables: evaluation, canonical forms, and reconstruction from truth tables.

Truth tables list outputs for inputs in lexicographic order with variable 1
as the slowest bit.  Variables are 1-based indices.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional, Union

from .calculus import Signature
from .categories import FinFn
from .errors import IndexOutOfRange, ParseError
from .syntax import App, Context, Sequent, Var, tensor

OMEGA = "Omega"


# -- canonical terms ---------------------------------------------------------------

@dataclass(frozen=True)
class Bottom:
    def weight(self):
        return 0

    def variables(self):
        return frozenset()

    def __str__(self):
        return "_|_"


@dataclass(frozen=True)
class NegBottom:
    def weight(self):
        return 0

    def variables(self):
        return frozenset()

    def __str__(self):
        return "~_|_"


@dataclass(frozen=True)
class Join:
    """``l1 v ... v lp v ~t1 v ... v ~tq``.

    ``literals`` are ``(index, negated)`` pairs sorted by index; ``negated``
    holds the subterms under a negation, each a ``Join`` with at least two
    factors, sorted by weight (least variable index).
    """
    literals: tuple = ()
    negated: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple((int(i), bool(s)) for i, s in self.literals))
        object.__setattr__(self, "negated", tuple(self.negated))
        if not self.literals and not self.negated:
            raise ValueError("a join needs at least one factor")
        for t in self.negated:
            if not isinstance(t, Join) or t.width() < 2:
                raise ValueError("negated subterms must be joins of at least two factors")
        seen = []
        for i, _ in self.literals:
            seen.append({i})
        for t in self.negated:
            seen.append(set(t.variables()))
        union = set()
        for s in seen:
            if union & s:
                raise ValueError("a variable occurs twice")
            union |= s
        if [i for i, _ in self.literals] != sorted(i for i, _ in self.literals):
            raise ValueError("literals must be sorted by index")
        weights = [t.weight() for t in self.negated]
        if weights != sorted(weights):
            raise ValueError("negated subterms must be sorted by weight")

    def width(self):
        return len(self.literals) + len(self.negated)

    def variables(self):
        out = {i for i, _ in self.literals}
        for t in self.negated:
            out |= t.variables()
        return frozenset(out)

    def weight(self):
        return min(self.variables())

    def __str__(self):
        parts = [("~" if neg else "") + f"x{i}" for i, neg in self.literals]
        parts += [f"~({t})" for t in self.negated]
        return " v ".join(parts)


CanonicalTerm = Union[Bottom, NegBottom, Join]


def join_of(factors) -> Join:
    """Join of literals ``(i, neg)`` and negated joins, in canonical order."""
    lits = sorted(f for f in factors if isinstance(f, tuple))
    subs = sorted((f for f in factors if isinstance(f, Join)), key=lambda t: t.weight())
    return Join(tuple(lits), tuple(subs))


@dataclass(frozen=True)
class Reconstruction:
    term: CanonicalTerm
    arity: int
    dummies: tuple = ()

    def __str__(self):
        if not self.dummies:
            return str(self.term)
        return f"{self.term} [dummy: {', '.join(f'x{i}' for i in self.dummies)}]"


# -- truth tables --------------------------------------------------------------------

@dataclass(frozen=True)
class TruthTable:
    arity: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(bool(v)) for v in self.values))
        if len(self.values) != 2 ** self.arity:
            raise ValueError(f"table of arity {self.arity} needs {2 ** self.arity} values")

    @classmethod
    def from_bits(cls, arity: int, bits: str) -> "TruthTable":
        if set(bits) - {"0", "1"}:
            raise ParseError(f"not a bitstring: {bits!r}")
        if len(bits) != 2 ** arity:
            raise ParseError(f"{len(bits)} bits given, {2 ** arity} expected for {arity} variables")
        return cls(arity, tuple(int(b) for b in bits))

    @classmethod
    def from_function(cls, arity: int, f) -> "TruthTable":
        return cls(arity, tuple(f(a) for a in assignments(arity)))

    def __call__(self, assignment) -> int:
        index = 0
        for bit in assignment:
            index = 2 * index + bit
        return self.values[index]

    def bits(self) -> str:
        return "".join(str(v) for v in self.values)

    def __str__(self):
        return self.bits()


def assignments(n: int):
    """All tuples of n truth values, in table order."""
    return itertools.product((0, 1), repeat=n)


# -- evaluation ----------------------------------------------------------------------

def _eval_canonical(t, a) -> int:
    if isinstance(t, Bottom):
        return 0
    if isinstance(t, NegBottom):
        return 1
    for i, neg in t.literals:
        if a[i - 1] != neg:
            return 1
    return int(any(not _eval_canonical(s, a) for s in t.negated))


def _eval_raw(t, a) -> int:
    if isinstance(t, Var):
        return a[_var_index(t.name, len(a)) - 1]
    if isinstance(t, App):
        vals = [_eval_raw(x, a) for x in t.args]
        if t.const == "or":
            return vals[0] | vals[1]
        if t.const == "and":
            return vals[0] & vals[1]
        if t.const == "neg":
            return 1 - vals[0]
        if t.const == "bot":
            return 0
        if t.const == "top":
            return 1
    raise ValueError(f"cannot evaluate {t}")


def _var_index(name: str, n: int) -> int:
    m = re.fullmatch(r"x([1-9][0-9]*)", name)
    if not m:
        raise ValueError(f"variables are named x1, x2, ...; got {name}")
    i = int(m.group(1))
    if i > n:
        raise IndexOutOfRange(f"variable {name} exceeds arity {n}")
    return i


def evaluate(t, n: int) -> TruthTable:
    """Truth table of a canonical term, or of a raw term over x1..xn."""
    if isinstance(t, (Bottom, NegBottom, Join)):
        if t.variables() and max(t.variables()) > n:
            raise IndexOutOfRange(f"variable x{max(t.variables())} exceeds arity {n}")
        return TruthTable.from_function(n, lambda a: _eval_canonical(t, a))
    _eval_raw(t, (0,) * n)  # surfaces index errors before tabulating
    return TruthTable.from_function(n, lambda a: _eval_raw(t, a))


# -- sufficient sets and classes ----------------------------------------------------------

def _forces_true(tab: TruthTable, fixed: dict) -> bool:
    return all(tab(a) for a in assignments(tab.arity)
               if all(a[i - 1] == v for i, v in fixed.items()))


def minimal_sufficient_sets(tab: TruthTable) -> set:
    """Inclusion-minimal variable sets with an assignment forcing the value 1."""
    n = tab.arity
    found = []
    for k in range(n + 1):
        for V in itertools.combinations(range(1, n + 1), k):
            if any(set(S) <= set(V) for S in found):
                continue
            if any(_forces_true(tab, dict(zip(V, vals))) for vals in assignments(k)):
                found.append(V)
    return {frozenset(S) for S in found}


def dependent_variables(tab: TruthTable) -> list:
    """Variables whose value changes the output for some choice of the others."""
    n = tab.arity
    out = []
    for i in range(1, n + 1):
        for a in assignments(n):
            if a[i - 1] == 0:
                b = a[:i - 1] + (1,) + a[i:]
                if tab(a) != tab(b):
                    out.append(i)
                    break
    return out


def variable_classes(tab: TruthTable) -> list:
    """Dependent variables grouped by sharing minimal sufficient sets (transitively)."""
    dep = dependent_variables(tab)
    parent = {i: i for i in dep}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for S in minimal_sufficient_sets(tab):
        members = sorted(i for i in S if i in parent)
        for j in members[1:]:
            parent[find(j)] = find(members[0])
    classes = {}
    for i in dep:
        classes.setdefault(find(i), []).append(i)
    return sorted((tuple(c) for c in classes.values()), key=lambda c: c[0])


# -- reconstruction ------------------------------------------------------------------

def _restrict(tab: TruthTable, keep, fixed: dict) -> TruthTable:
    """Function of the variables ``keep`` (renumbered 1..k), others fixed."""
    n = tab.arity

    def f(a):
        full = [0] * n
        for i, v in fixed.items():
            full[i - 1] = v
        for i, v in zip(keep, a):
            full[i - 1] = v
        return tab(full)

    return TruthTable.from_function(len(keep), f)


def _rename(t: Join, keep) -> Join:
    """Renumber local variable j to ``keep[j - 1]``."""
    return Join(tuple((keep[i - 1], s) for i, s in t.literals),
                tuple(_rename(u, keep) for u in t.negated))


def _reconstruct(tab: TruthTable, split=False) -> Optional[CanonicalTerm]:
    """``split``: the result must be a join of at least two factors."""
    n = tab.arity
    dep = dependent_variables(tab)
    if not dep:
        return NegBottom() if tab.values[0] else Bottom()
    if len(dep) < n:
        t = _reconstruct(_restrict(tab, dep, {i: 0 for i in range(1, n + 1) if i not in dep}))
        return None if t is None or isinstance(t, (Bottom, NegBottom)) else _rename(t, dep)
    classes = variable_classes(tab)
    if split and len(classes) < 2:
        return None
    factors = []
    for X in classes:
        outside = [i for i in range(1, n + 1) if i not in X]
        g = None
        for vals in assignments(len(outside)):
            cand = _restrict(tab, X, dict(zip(outside, vals)))
            if not all(cand.values):
                g = cand
                break
        if g is None:
            return None
        if len(X) == 1:
            if g.values == (0, 1):
                factors.append((X[0], False))
            elif g.values == (1, 0):
                factors.append((X[0], True))
            else:
                return None
            continue
        inner = _reconstruct(TruthTable(g.arity, tuple(1 - v for v in g.values)), split=True)
        if not isinstance(inner, Join) or inner.width() < 2 or len(inner.variables()) != len(X):
            return None
        factors.append(_rename(inner, X))
    try:
        return join_of(factors)
    except ValueError:
        return None


def reconstruct(tab: TruthTable) -> Optional[Reconstruction]:
    """The canonical term computing ``tab``, or None if no term does.

    The result is certified by evaluating it again.
    """
    t = _reconstruct(tab)
    if t is None:
        return None
    if evaluate(t, tab.arity) != tab:
        return None
    used = t.variables()
    dummies = tuple(i for i in range(1, tab.arity + 1) if i not in used)
    return Reconstruction(t, tab.arity, dummies)


# -- enumeration -------------------------------------------------------------------

def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _joins_on(variables, width: int, min_factors: int):
    """Joins using exactly ``variables``, at most ``width`` factors at every level."""
    for part in _set_partitions(list(variables)):
        if not min_factors <= len(part) <= width:
            continue
        options = []
        for block in part:
            if len(block) == 1:
                options.append([(block[0], False), (block[0], True)])
            else:
                options.append(list(_joins_on(sorted(block), width, 2)))
        for choice in itertools.product(*options):
            yield join_of(choice)


def canonical_terms(n: int, width: int = 3):
    """Every canonical term whose variables lie in x1..xn."""
    yield Bottom()
    yield NegBottom()
    for k in range(1, n + 1):
        for V in itertools.combinations(range(1, n + 1), k):
            yield from _joins_on(V, width, 1)


# -- parsing and translation ---------------------------------------------------------

def parse_canonical(text: str) -> CanonicalTerm:
    """Inverse of ``str`` on canonical terms (a dummy suffix is ignored)."""
    text = re.sub(r"\s*\[dummy:[^\]]*\]\s*$", "", text.strip())
    if text == "_|_":
        return Bottom()
    if text == "~_|_":
        return NegBottom()
    pos = 0

    def factor_list():
        nonlocal pos
        factors = [factor()]
        while text.startswith(" v ", pos):
            pos += 3
            factors.append(factor())
        return factors

    def factor():
        nonlocal pos
        m = re.compile(r"(~?)x([1-9][0-9]*)").match(text, pos)
        if m:
            pos = m.end()
            return (int(m.group(2)), bool(m.group(1)))
        if text.startswith("~(", pos):
            pos += 2
            inner = factor_list()
            if not text.startswith(")", pos):
                raise ParseError(f"expected ')' at {pos} in {text!r}")
            pos += 1
            return join_of(inner)
        raise ParseError(f"unexpected input at {pos} in {text!r}")

    try:
        t = join_of(factor_list())
    except ValueError as exc:
        raise ParseError(f"not a canonical term: {exc}") from None
    if pos != len(text):
        raise ParseError(f"trailing input at {pos} in {text!r}")
    if str(t) != text:
        raise ParseError(f"{text!r} is not in canonical order")
    return t


def to_raw(t: CanonicalTerm):
    """The raw term over ``or``, ``neg``, ``bot``, joins associated to the left."""
    if isinstance(t, Bottom):
        return App("bot")
    if isinstance(t, NegBottom):
        return App("neg", (App("bot"),))
    parts = [App("neg", (Var(f"x{i}"),)) if neg else Var(f"x{i}") for i, neg in t.literals]
    parts += [App("neg", (to_raw(u),)) for u in t.negated]
    out = parts[0]
    for p in parts[1:]:
        out = App("or", (out, p))
    return out


def to_sequent(r: Reconstruction) -> Sequent:
    names = [f"x{i}" for i in range(1, r.arity + 1)]
    return Sequent(Context.of(names, [OMEGA] * r.arity), to_raw(r.term), (OMEGA,))


def translate_cubical(t):
    """Rewrite ``and`` and ``top`` through ``or``, ``neg`` and ``bot``."""
    if isinstance(t, App):
        args = tuple(translate_cubical(a) for a in t.args)
        if t.const == "and":
            return App("neg", (App("or", (App("neg", (args[0],)), App("neg", (args[1],)))),))
        if t.const == "top":
            return App("neg", (App("bot"),))
        return App(t.const, args)
    if hasattr(t, "factors"):
        return tensor(*(translate_cubical(f) for f in t.factors))
    return t


def omega_signature() -> Signature:
    return Signature((OMEGA,), {"or": ((OMEGA, OMEGA), OMEGA), "neg": ((OMEGA,), OMEGA),
                                "bot": ((), OMEGA)})


def omega_model():
    """Two truth values with their join, negation and bottom."""
    from .semantics import Prestructure
    return Prestructure.cartesian(omega_signature(), {OMEGA: 2},
                                  {"or": [0, 1, 1, 1], "neg": [1, 0], "bot": [0]}, name="omega")


def kleene_model():
    """Three truth values 0 < 1 < 2 with max, reversal and 0."""
    from .semantics import Prestructure
    table = [max(a, b) for a in range(3) for b in range(3)]
    return Prestructure.cartesian(omega_signature(), {OMEGA: 3},
                                  {"or": table, "neg": [2, 1, 0], "bot": [0]}, name="kleene")


def finfn_table(tab: TruthTable):
    """The truth table as an arrow Omega^n -> Omega."""
    return FinFn().arrow((2,) * tab.arity, (2,), tab.values)

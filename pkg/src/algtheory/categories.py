"""Concrete strict monoidal categories with exact arrows.

Objects are tuples of per-atom sizes; the tensor of objects is tuple
concatenation.  Composite indices use mixed radix with the first factor as
the slowest digit, both for function tables and for Kronecker products.

``FinFn``: arrows are functions between cartesian products of finite
carriers, stored as tables of output indices.

``MatSemiring``: arrows are matrices of shape (size(cod), size(dom)) over an
exact semiring, stored row-major.  ``f.then(g)`` is the matrix ``G F``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Optional

from .errors import SizeMismatch


@dataclass(frozen=True)
class ConcreteArrow:
    dom: tuple
    cod: tuple
    payload: tuple

    def __post_init__(self):
        object.__setattr__(self, "dom", tuple(self.dom))
        object.__setattr__(self, "cod", tuple(self.cod))


def size(obj) -> int:
    return prod(obj)


def decode(index: int, obj) -> tuple:
    """Mixed-radix digits of ``index`` for the carriers in ``obj``."""
    digits = []
    for n in reversed(obj):
        index, r = divmod(index, n)
        digits.append(r)
    return tuple(reversed(digits))


# -- semirings -------------------------------------------------------------------

class Semiring:
    name = "semiring"
    zero = 0
    one = 1

    def norm(self, x):
        return x

    def add(self, a, b):
        return self.norm(a + b)

    def mul(self, a, b):
        return self.norm(a * b)

    def __eq__(self, other):
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self):
        return hash((type(self), tuple(sorted(self.__dict__.items()))))

    def __repr__(self):
        return self.name


class BoolSemiring(Semiring):
    name = "bool"

    def norm(self, x):
        return 1 if x else 0

    def add(self, a, b):
        return 1 if (a or b) else 0

    def mul(self, a, b):
        return 1 if (a and b) else 0


class IntegerRing(Semiring):
    name = "int"

    def norm(self, x):
        return int(x)


class ZMod(Semiring):
    def __init__(self, p: int):
        if p < 2:
            raise ValueError("modulus must be at least 2")
        self.p = p

    @property
    def name(self):
        return f"zmod {self.p}"

    def norm(self, x):
        return int(x) % self.p


def semiring_from_name(text: str) -> Semiring:
    words = text.split()
    if words == ["bool"]:
        return BoolSemiring()
    if words == ["int"]:
        return IntegerRing()
    if len(words) == 2 and words[0] == "zmod":
        return ZMod(int(words[1]))
    raise ValueError(f"unknown scalars {text!r}")


# -- finite functions ------------------------------------------------------------

class FinFn:
    kind = "finfn"

    def __repr__(self):
        return "FinFn()"

    def __eq__(self, other):
        return isinstance(other, FinFn)

    def __hash__(self):
        return hash("finfn")

    def arrow(self, dom, cod, table) -> ConcreteArrow:
        dom, cod, table = tuple(dom), tuple(cod), tuple(int(v) for v in table)
        if len(table) != size(dom):
            raise SizeMismatch(f"table of length {len(table)} for domain of size {size(dom)}")
        if any(not 0 <= v < size(cod) for v in table):
            raise SizeMismatch(f"table entries leave codomain of size {size(cod)}")
        return ConcreteArrow(dom, cod, table)

    def identity(self, obj) -> ConcreteArrow:
        return ConcreteArrow(obj, obj, tuple(range(size(obj))))

    def then(self, f: ConcreteArrow, g: ConcreteArrow) -> ConcreteArrow:
        if f.cod != g.dom:
            raise SizeMismatch(f"cannot compose {f.dom}->{f.cod} with {g.dom}->{g.cod}")
        return ConcreteArrow(f.dom, g.cod, tuple(g.payload[v] for v in f.payload))

    def tensor(self, f: ConcreteArrow, g: ConcreteArrow) -> ConcreteArrow:
        n = size(g.cod)
        table = tuple(a * n + b for a in f.payload for b in g.payload)
        return ConcreteArrow(f.dom + g.dom, f.cod + g.cod, table)

    def swap(self, a, b) -> ConcreteArrow:
        """The symmetry ``b a -> a b``."""
        na, nb = size(a), size(b)
        table = tuple(x * nb + y for y in range(nb) for x in range(na))
        return ConcreteArrow(tuple(b) + tuple(a), tuple(a) + tuple(b), table)

    def terminal(self, obj) -> ConcreteArrow:
        return ConcreteArrow(obj, (), (0,) * size(obj))

    def diagonal(self, obj) -> ConcreteArrow:
        n = size(obj)
        return ConcreteArrow(obj, tuple(obj) + tuple(obj), tuple(x * n + x for x in range(n)))

    def first_difference(self, f: ConcreteArrow, g: ConcreteArrow) -> Optional[str]:
        if (f.dom, f.cod) != (g.dom, g.cod):
            return f"shapes differ: {f.dom}->{f.cod} vs {g.dom}->{g.cod}"
        for i, (a, b) in enumerate(zip(f.payload, g.payload)):
            if a != b:
                return (f"input {decode(i, f.dom)}: lhs gives {decode(a, f.cod)}, "
                        f"rhs gives {decode(b, g.cod)}")
        return None


# -- matrices ----------------------------------------------------------------------

class MatSemiring:
    kind = "mat"

    def __init__(self, scalars: Semiring):
        self.scalars = scalars

    def __repr__(self):
        return f"MatSemiring({self.scalars!r})"

    def __eq__(self, other):
        return isinstance(other, MatSemiring) and other.scalars == self.scalars

    def __hash__(self):
        return hash(("mat", self.scalars))

    def arrow(self, dom, cod, rows) -> ConcreteArrow:
        dom, cod = tuple(dom), tuple(cod)
        rows = tuple(tuple(self.scalars.norm(x) for x in r) for r in rows)
        if len(rows) != size(cod) or any(len(r) != size(dom) for r in rows):
            raise SizeMismatch(f"matrix shape does not match {size(cod)}x{size(dom)}")
        return ConcreteArrow(dom, cod, rows)

    def identity(self, obj) -> ConcreteArrow:
        n = size(obj)
        one, zero = self.scalars.one, self.scalars.zero
        return ConcreteArrow(obj, obj, tuple(tuple(one if i == j else zero for j in range(n))
                                             for i in range(n)))

    def then(self, f: ConcreteArrow, g: ConcreteArrow) -> ConcreteArrow:
        if f.cod != g.dom:
            raise SizeMismatch(f"cannot compose {f.dom}->{f.cod} with {g.dom}->{g.cod}")
        S = self.scalars
        F, G = f.payload, g.payload
        inner, cols = size(f.cod), size(f.dom)
        rows = []
        for i in range(size(g.cod)):
            row = []
            for j in range(cols):
                acc = S.zero
                for k in range(inner):
                    if G[i][k] and F[k][j]:
                        acc = S.add(acc, S.mul(G[i][k], F[k][j]))
                row.append(acc)
            rows.append(tuple(row))
        return ConcreteArrow(f.dom, g.cod, tuple(rows))

    def tensor(self, f: ConcreteArrow, g: ConcreteArrow) -> ConcreteArrow:
        S = self.scalars
        rows = []
        for ra in f.payload:
            for rb in g.payload:
                rows.append(tuple(S.mul(a, b) for a in ra for b in rb))
        if not f.payload or not g.payload:
            rows = []
        return ConcreteArrow(f.dom + g.dom, f.cod + g.cod, tuple(rows))

    def swap(self, a, b) -> ConcreteArrow:
        na, nb = size(a), size(b)
        n = na * nb
        rows = [[self.scalars.zero] * n for _ in range(n)]
        for y in range(nb):
            for x in range(na):
                rows[x * nb + y][y * na + x] = self.scalars.one
        return ConcreteArrow(tuple(b) + tuple(a), tuple(a) + tuple(b),
                             tuple(tuple(r) for r in rows))

    def first_difference(self, f: ConcreteArrow, g: ConcreteArrow) -> Optional[str]:
        if (f.dom, f.cod) != (g.dom, g.cod):
            return f"shapes differ: {f.dom}->{f.cod} vs {g.dom}->{g.cod}"
        for i, (ra, rb) in enumerate(zip(f.payload, g.payload)):
            for j, (a, b) in enumerate(zip(ra, rb)):
                if a != b:
                    return f"entry ({i}, {j}): lhs {a}, rhs {b}"
        return None


def tensor_all(cat, arrows, unit=()) -> ConcreteArrow:
    out = cat.identity(unit)
    for a in arrows:
        out = cat.tensor(out, a)
    return out


def then_all(cat, arrows) -> ConcreteArrow:
    arrows = list(arrows)
    out = arrows[0]
    for a in arrows[1:]:
        out = cat.then(out, a)
    return out


def all_tables(dom_size: int, cod_size: int):
    """Every function table between carriers of the given sizes."""
    return itertools.product(range(cod_size), repeat=dom_size)

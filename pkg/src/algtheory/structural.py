"""Structural categories of finite cardinals.

A structural term ``x1..xm : S |- y1..yn : T`` is stored as a function
``n -> m`` sending each target position to the context position it copies
(the contravariant convention).  Weakening, exchange and contraction
correspond to the generators ``! : 0 -> k``, permutations and the
codiagonals ``k + k -> k``, always tensored with identities.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import SizeMismatch, NotInCategory, Unsupported, TermTypeError
from .syntax import Context, Sequent, Var, tensor, canonical_names


@dataclass(frozen=True)
class RuleSet:
    weakening: bool = False
    exchange: bool = False
    contraction: bool = False

    @classmethod
    def parse(cls, text: str) -> "RuleSet":
        words = text.replace(",", " ").split()
        if words == ["all"]:
            return cls(True, True, True)
        if words in ([], ["none"]):
            return cls()
        known = {"weakening", "exchange", "contraction"}
        bad = [w for w in words if w not in known]
        if bad:
            raise ValueError(f"unknown structural rule(s): {', '.join(bad)}")
        return cls(*(name in words for name in ("weakening", "exchange", "contraction")))

    @classmethod
    def all_subsets(cls):
        return [cls(*bits) for bits in itertools.product((False, True), repeat=3)]

    def names(self) -> list:
        return [n for n, on in (("weakening", self.weakening), ("exchange", self.exchange),
                                ("contraction", self.contraction)) if on]

    def enabled(self, rule: str) -> bool:
        return getattr(self, rule.lower())

    @property
    def contraction_only(self) -> bool:
        return self.contraction and not self.weakening and not self.exchange

    def effective(self) -> "RuleSet":
        """Add exchange when it is derivable from weakening and contraction."""
        return RuleSet(self.weakening, self.exchange or (self.weakening and self.contraction),
                       self.contraction)

    def __le__(self, other):
        return all(not a or b for a, b in zip(
            (self.weakening, self.exchange, self.contraction),
            (other.weakening, other.exchange, other.contraction)))

    def __str__(self):
        if self.weakening and self.exchange and self.contraction:
            return "all"
        return " ".join(self.names()) or "none"


ALL_RULES = RuleSet(True, True, True)
NO_RULES = RuleSet()


@dataclass(frozen=True)
class FiniteFn:
    domain_size: int
    codomain_size: int
    map: tuple

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))
        if len(self.map) != self.domain_size:
            raise SizeMismatch(f"map of length {len(self.map)} for domain {self.domain_size}")
        if any(not 0 <= v < self.codomain_size for v in self.map):
            raise SizeMismatch(f"map {self.map} leaves codomain {self.codomain_size}")

    @classmethod
    def of(cls, values, codomain_size=None) -> "FiniteFn":
        values = tuple(values)
        if codomain_size is None:
            codomain_size = max(values) + 1 if values else 0
        return cls(len(values), codomain_size, values)

    @classmethod
    def identity(cls, n: int) -> "FiniteFn":
        return cls(n, n, tuple(range(n)))

    def __call__(self, i):
        return self.map[i]

    def is_identity(self):
        return self.domain_size == self.codomain_size and self.map == tuple(range(self.domain_size))

    def is_injective(self):
        return len(set(self.map)) == len(self.map)

    def is_surjective(self):
        return set(self.map) == set(range(self.codomain_size))

    def is_bijective(self):
        return self.domain_size == self.codomain_size and self.is_injective()

    def is_monotone(self):
        return all(a <= b for a, b in zip(self.map, self.map[1:]))

    def inverse(self) -> "FiniteFn":
        if not self.is_bijective():
            raise SizeMismatch("only bijections have inverses")
        inv = [0] * self.domain_size
        for i, v in enumerate(self.map):
            inv[v] = i
        return FiniteFn(self.domain_size, self.domain_size, tuple(inv))

    def __repr__(self):
        return f"FiniteFn({self.domain_size}->{self.codomain_size}, {list(self.map)})"


def compose_fn(f: FiniteFn, g: FiniteFn) -> FiniteFn:
    """``f`` followed by ``g``."""
    if f.codomain_size != g.domain_size:
        raise SizeMismatch(f"cannot compose {f} with {g}")
    return FiniteFn(f.domain_size, g.codomain_size, tuple(g.map[v] for v in f.map))


def tensor_fn(f: FiniteFn, g: FiniteFn) -> FiniteFn:
    return FiniteFn(f.domain_size + g.domain_size, f.codomain_size + g.codomain_size,
                    f.map + tuple(v + f.codomain_size for v in g.map))


def transposition(n: int, i: int) -> FiniteFn:
    m = list(range(n))
    m[i], m[i + 1] = m[i + 1], m[i]
    return FiniteFn(n, n, tuple(m))


# -- generator words ---------------------------------------------------------

WEAKEN, EXCHANGE, CONTRACT = "weaken", "exchange", "contract"


@dataclass(frozen=True)
class Step:
    """One generator tensored with identities.

    weaken:   a + b -> a + k + b, inserting a block of k at ``position``.
    exchange: n -> n, swapping ``position`` and ``position + 1`` (k = 1).
    contract: a + 2k + b -> a + k + b, merging the block at ``position + k``
              onto the block at ``position``.
    """
    kind: str
    position: int
    length: int = 1

    def domain_change(self) -> int:
        if self.kind == WEAKEN:
            return self.length
        if self.kind == CONTRACT:
            return -self.length
        return 0

    def as_fn(self, n: int) -> FiniteFn:
        p, k = self.position, self.length
        if self.kind == WEAKEN:
            if not 0 <= p <= n or k < 0:
                raise SizeMismatch(f"{self} does not apply at size {n}")
            return FiniteFn(n, n + k, tuple(i if i < p else i + k for i in range(n)))
        if self.kind == EXCHANGE:
            if not 0 <= p < n - 1:
                raise SizeMismatch(f"{self} does not apply at size {n}")
            return transposition(n, p)
        if self.kind == CONTRACT:
            if p < 0 or k < 0 or p + 2 * k > n:
                raise SizeMismatch(f"{self} does not apply at size {n}")
            m = []
            for i in range(n):
                if i < p:
                    m.append(i)
                elif i < p + 2 * k:
                    m.append(p + (i - p) % k)
                else:
                    m.append(i - k)
            return FiniteFn(n, n - k, tuple(m))
        raise ValueError(f"unknown generator kind {self.kind}")


@dataclass(frozen=True)
class GeneratorWord:
    start: int
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def sizes(self) -> list:
        out = [self.start]
        for st in self.steps:
            out.append(out[-1] + st.domain_change())
        return out

    def evaluate(self) -> FiniteFn:
        f = FiniteFn.identity(self.start)
        n = self.start
        for st in self.steps:
            g = st.as_fn(n)
            f = compose_fn(f, g)
            n = g.codomain_size
        return f

    def kinds(self) -> set:
        return {st.kind for st in self.steps}

    def __add__(self, other: "GeneratorWord") -> "GeneratorWord":
        if self.evaluate().codomain_size != other.start:
            raise SizeMismatch("words do not chain")
        return GeneratorWord(self.start, self.steps + other.steps)

    def shifted(self, left: int, total: int) -> "GeneratorWord":
        """The word tensored with identities: ``left`` on the left, sized for ``total``."""
        return GeneratorWord(total, tuple(Step(s.kind, s.position + left, s.length)
                                          for s in self.steps))


def canonical_transpositions(sigma: FiniteFn) -> list:
    """Adjacent transpositions ``[i1, i2, ...]`` with ``tau_i1 ; tau_i2 ; ... = sigma``.

    Obtained from a stable insertion sort of ``sigma.map``, recording each
    adjacent swap.
    """
    if not sigma.is_bijective():
        raise SizeMismatch(f"{sigma} is not a permutation")
    arr = list(sigma.map)
    swaps = []
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            swaps.append(j - 1)
            j -= 1
    return swaps


def _swap_gadget(n: int, i: int) -> tuple:
    # 2 = 0+2+0 --(!+1+!)--> 1+2+1 = 2+2 --codiagonal--> 2, placed at i.
    return (Step(WEAKEN, i, 1), Step(WEAKEN, i + 3, 1), Step(CONTRACT, i, 2))


def exchange_witness(n: int, sigma: FiniteFn) -> GeneratorWord:
    """A weakening+contraction word evaluating to the permutation ``sigma``."""
    if sigma.domain_size != n:
        raise SizeMismatch("permutation size differs from n")
    steps = []
    for i in canonical_transpositions(sigma):
        steps.extend(_swap_gadget(n, i))
    return GeneratorWord(n, tuple(steps))


def _swap_word(sigma: FiniteFn) -> GeneratorWord:
    return GeneratorWord(sigma.domain_size,
                         tuple(Step(EXCHANGE, i) for i in canonical_transpositions(sigma)))


def _weakening_word(f: FiniteFn) -> GeneratorWord:
    """Word for a strictly increasing injection, inserting maximal blocks."""
    image = set(f.map)
    steps = []
    q = 0
    while q < f.codomain_size:
        if q in image:
            q += 1
            continue
        start = q
        while q < f.codomain_size and q not in image:
            q += 1
        steps.append(Step(WEAKEN, start, q - start))
    return GeneratorWord(f.domain_size, tuple(steps))


def _contraction_word(f: FiniteFn) -> GeneratorWord:
    """Word for a monotone surjection, merging adjacent equal entries."""
    steps = []
    pos = 0
    for r in range(f.codomain_size):
        count = f.map.count(r)
        steps.extend(Step(CONTRACT, pos, 1) for _ in range(count - 1))
        pos += 1
    return GeneratorWord(f.domain_size, tuple(steps))


def split_function(f: FiniteFn):
    """Factor ``f = perm ; monotone surjection ; increasing injection``.

    Within each fibre the permutation preserves the order of the domain
    elements, which makes the decomposition unique.
    """
    image = sorted(set(f.map))
    rank = {v: i for i, v in enumerate(image)}
    counts = [f.map.count(v) for v in image]
    starts = [sum(counts[:r]) for r in range(len(image))]
    seen = [0] * len(image)
    perm = []
    for v in f.map:
        r = rank[v]
        perm.append(starts[r] + seen[r])
        seen[r] += 1
    n = f.domain_size
    sigma = FiniteFn(n, n, tuple(perm))
    surj = FiniteFn(n, len(image), tuple(r for r in range(len(image)) for _ in range(counts[r])))
    inj = FiniteFn(len(image), f.codomain_size, tuple(image))
    return sigma, surj, inj


@lru_cache(maxsize=None)
def _contraction_closure(n: int) -> dict:
    """All functions out of ``n`` reachable with codiagonal generators, with a word."""
    start = FiniteFn.identity(n)
    found = {start: GeneratorWord(n)}
    frontier = [start]
    while frontier:
        nxt = []
        for f in frontier:
            word = found[f]
            m = f.codomain_size
            for k in range(1, m // 2 + 1):
                for p in range(0, m - 2 * k + 1):
                    st = Step(CONTRACT, p, k)
                    g = compose_fn(f, st.as_fn(m))
                    if g not in found:
                        found[g] = GeneratorWord(n, word.steps + (st,))
                        nxt.append(g)
        frontier = nxt
    return found


def closed_form_member(f: FiniteFn, rules: RuleSet) -> bool:
    """Characterisation of the structural categories, contraction alone excluded."""
    w, e, c = rules.weakening, rules.exchange, rules.contraction
    if w and c:
        return True
    if c and e:
        return f.is_surjective()
    if w and e:
        return f.is_injective()
    if w:
        return f.is_injective() and f.is_monotone()
    if e:
        return f.is_bijective()
    if c:
        raise Unsupported("no closed form for contraction alone")
    return f.is_identity()


def membership(f: FiniteFn, rules: RuleSet) -> Optional[GeneratorWord]:
    """A generator word for ``f`` in the structural category of ``rules``, or None."""
    if f.is_identity():
        return GeneratorWord(f.domain_size)
    if rules.contraction_only:
        return _contraction_closure(f.domain_size).get(f)
    if not closed_form_member(f, rules):
        return None
    sigma, surj, inj = split_function(f)
    if sigma.is_identity():
        perm_word = GeneratorWord(f.domain_size)
    elif rules.exchange:
        perm_word = _swap_word(sigma)
    else:
        perm_word = exchange_witness(sigma.domain_size, sigma)
    word = perm_word + _contraction_word(surj) + _weakening_word(inj)
    assert word.evaluate() == f
    return word


def contraction_only_members(n: int) -> dict:
    """The contraction-only closure from ``n``: function -> generator word."""
    return dict(_contraction_closure(n))


# -- typed structural arrows -------------------------------------------------

@dataclass(frozen=True)
class TypedStructuralArrow:
    """A structural arrow ``source -> target`` with ``target[j] == source[fn(j)]``."""
    source: tuple
    target: tuple
    fn: FiniteFn

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        if self.fn.domain_size != len(self.target) or self.fn.codomain_size != len(self.source):
            raise SizeMismatch("function sizes do not match the type sequences")
        for j, i in enumerate(self.fn.map):
            if self.target[j] != self.source[i]:
                raise TermTypeError(f"position {j} of type {self.target[j]} copies "
                                    f"position {i} of type {self.source[i]}")

    @classmethod
    def identity(cls, types) -> "TypedStructuralArrow":
        types = tuple(types)
        return cls(types, types, FiniteFn.identity(len(types)))

    @classmethod
    def from_fn(cls, source, fn: FiniteFn) -> "TypedStructuralArrow":
        source = tuple(source)
        return cls(source, tuple(source[i] for i in fn.map), fn)

    def then(self, other: "TypedStructuralArrow") -> "TypedStructuralArrow":
        if self.target != other.source:
            raise SizeMismatch("arrows do not compose")
        return TypedStructuralArrow(self.source, other.target, compose_fn(other.fn, self.fn))

    def __matmul__(self, other: "TypedStructuralArrow") -> "TypedStructuralArrow":
        return TypedStructuralArrow(self.source + other.source, self.target + other.target,
                                    tensor_fn(self.fn, other.fn))

    def is_identity(self):
        return self.fn.is_identity()

    def as_sequent(self, names=None) -> Sequent:
        names = list(names) if names is not None else canonical_names(len(self.source))
        ctx = Context.of(names, self.source)
        return Sequent(ctx, tensor(*(Var(names[i]) for i in self.fn.map)), self.target)


def typed_membership(a: TypedStructuralArrow, rules: RuleSet) -> Optional[GeneratorWord]:
    # Typing is induced by pulling back the source labelling, so every
    # untyped factorisation is automatically well typed.
    return membership(a.fn, rules)


@dataclass(frozen=True)
class StructuralNormalForm:
    weakening: TypedStructuralArrow
    contraction: TypedStructuralArrow
    exchange: TypedStructuralArrow

    def compose(self) -> TypedStructuralArrow:
        return self.weakening.then(self.contraction).then(self.exchange)

    def weakening_blocks(self) -> list:
        """Per source position: ``"1"`` if kept, ``"pi"`` if deleted."""
        kept = set(self.weakening.fn.map)
        return ["1" if i in kept else "pi" for i in range(len(self.weakening.source))]

    def diagonal_orders(self) -> list:
        """Per surviving variable, the order n of its n-fold diagonal."""
        f = self.contraction.fn
        return [f.map.count(r) for r in range(f.codomain_size)]


def structural_normal_form(a: TypedStructuralArrow, rules: RuleSet) -> StructuralNormalForm:
    """Split ``a`` as weakening, then contraction, then exchange."""
    if rules.contraction_only:
        raise Unsupported("no structural normal form for contraction alone")
    if membership(a.fn, rules) is None:
        raise NotInCategory(f"{a.fn} is not in the structural category of {rules}")
    sigma, surj, inj = split_function(a.fn)
    weak = TypedStructuralArrow.from_fn(a.source, inj)
    contr = TypedStructuralArrow.from_fn(weak.target, surj)
    exch = TypedStructuralArrow.from_fn(contr.target, sigma)
    nf = StructuralNormalForm(weak, contr, exch)
    assert nf.compose() == a
    return nf

"""Prestructures in concrete categories, the structure equations, and the
interpretation of terms and formulas.

Arrows compose diagrammatically: ``then(f, g)`` is "f, then g".  The
atomic symmetry ``tau[(A, B)]`` goes from ``|B||A|`` to ``|A||B|``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import errors as E
from .calculus import Derivation, Signature, Theory, elaborate
from .categories import ConcreteArrow, FinFn, tensor_all, then_all
from .structural import (CONTRACT, FiniteFn, GeneratorWord, RuleSet, Step,
                         canonical_transpositions)
from .syntax import Formula, Sequent

# Equation names in reporting order, with the structural rules each one needs.
EQUATIONS = (
    ("pi-natural", {"weakening"}),
    ("delta-natural", {"contraction"}),
    ("tau-natural", {"exchange"}),
    ("yang-baxter", {"exchange"}),
    ("tau-involutive", {"exchange"}),
    ("tau-pi", {"weakening", "exchange"}),
    ("tau-delta", {"contraction", "exchange"}),
    ("counit", {"weakening", "contraction"}),
    ("cocommutative", {"contraction", "exchange"}),
    ("coassociative", {"contraction"}),
)
_ORDER = {name: i for i, (name, _) in enumerate(EQUATIONS)}
SAMPLED_NOTE = "well-definedness sampled, not proven"


@dataclass
class Prestructure:
    """Objects for atomic types, arrows for constants and structural maps.

    ``delta`` is keyed by atomic type; a tuple key gives an explicit diagonal
    for a block, used when no symmetry is available to assemble one.
    ``symmetric`` fills every missing ``tau`` with the target's own swap.
    """
    signature: Signature
    target: object
    types: dict
    ops: dict
    pi: dict = field(default_factory=dict)
    tau: dict = field(default_factory=dict)
    delta: dict = field(default_factory=dict)
    symmetric: bool = False
    name: str = ""
    _verified: dict = field(default_factory=dict, repr=False, compare=False)

    def obj(self, types) -> tuple:
        try:
            return tuple(self.types[a] for a in types)
        except KeyError as exc:
            raise E.SignatureMismatch(f"no object for type {exc.args[0]}") from None

    def op(self, name) -> ConcreteArrow:
        if name not in self.ops:
            raise E.SignatureMismatch(f"no arrow for constant {name}")
        return self.ops[name]

    def has_tau(self) -> bool:
        return self.symmetric or bool(self.tau)

    def atomic_tau(self, a, b) -> ConcreteArrow:
        if (a, b) in self.tau:
            return self.tau[(a, b)]
        if self.symmetric:
            return self.target.swap(self.obj([a]), self.obj([b]))
        raise E.RuleDisabled(f"no symmetry for ({a}, {b})")

    def validate(self, rules: RuleSet) -> None:
        """Check arrow shapes, and that each effective rule has its maps."""
        sig = self.signature
        for a in sig.types:
            if a not in self.types:
                raise E.SignatureMismatch(f"no object for type {a}")
        for name, (args, res) in sig.constants.items():
            _expect(self.op(name), self.obj(args), self.obj([res]), f"constant {name}")
        eff = rules.effective()
        for a in sig.types:
            if eff.weakening:
                if a not in self.pi:
                    raise E.RuleDisabled(f"weakening needs pi for {a}")
                _expect(self.pi[a], self.obj([a]), (), f"pi {a}")
            if eff.contraction:
                if a not in self.delta:
                    raise E.RuleDisabled(f"contraction needs delta for {a}")
                _expect(self.delta[a], self.obj([a]), self.obj([a, a]), f"delta {a}")
            if eff.exchange:
                for b in sig.types:
                    _expect(self.atomic_tau(a, b), self.obj([b, a]), self.obj([a, b]),
                            f"tau {a} {b}")
        for key, arrow in self.delta.items():
            if isinstance(key, tuple):
                _expect(arrow, self.obj(key), self.obj(key + key), f"delta {' '.join(key)}")

    @classmethod
    def cartesian(cls, signature: Signature, types: dict, tables: dict, name=""):
        """A FinFn prestructure with terminal maps, swaps and diagonals."""
        cat = FinFn()
        tmp = cls(signature, cat, dict(types), {}, name=name)
        ops = {}
        for c, (args, res) in signature.constants.items():
            ops[c] = cat.arrow(tmp.obj(args), tmp.obj([res]), tables[c])
        tmp.ops = ops
        for a in signature.types:
            o = tmp.obj([a])
            tmp.pi[a] = cat.terminal(o)
            tmp.delta[a] = cat.diagonal(o)
        tmp.symmetric = True
        return tmp


def _expect(arrow, dom, cod, what):
    if arrow.dom != tuple(dom) or arrow.cod != tuple(cod):
        raise E.SizeMismatch(f"{what} should be {tuple(dom)}->{tuple(cod)}, "
                             f"got {arrow.dom}->{arrow.cod}")


# -- completion of the structural assignment ------------------------------------

def _sorting_arrow(M: Prestructure, types, labels) -> ConcreteArrow:
    """Arrow moving position j of ``types`` to position ``labels[j]``.

    Built from atomic symmetries along the canonical adjacent-swap sorting
    of ``labels``.
    """
    cat = M.target
    types = list(types)
    out = cat.identity(M.obj(types))
    for p in canonical_transpositions(FiniteFn(len(labels), len(labels), tuple(labels))):
        x, y = types[p], types[p + 1]
        step = tensor_all(cat, [cat.identity(M.obj(types[:p])), M.atomic_tau(y, x),
                                cat.identity(M.obj(types[p + 2:]))])
        out = cat.then(out, step)
        types[p], types[p + 1] = y, x
    return out


def complete_structural(M: Prestructure, A, which: str, perm=None) -> ConcreteArrow:
    """The structural arrow for a type sequence.

    ``weakening``: ``|A| -> I``.  ``contraction``: ``|A| -> |A||A|``.
    ``exchange``: ``|B| -> |A|`` where ``B[j] = A[perm[j]]``.
    """
    cat = M.target
    A = tuple(A)
    if which == "weakening":
        missing = [a for a in A if a not in M.pi]
        if missing:
            raise E.RuleDisabled(f"no pi for {missing[0]}")
        return tensor_all(cat, [M.pi[a] for a in A])
    if which == "exchange":
        if perm is None or sorted(perm) != list(range(len(A))):
            raise E.MalformedNode(f"exchange needs a permutation of {len(A)}")
        return _sorting_arrow(M, [A[i] for i in perm], list(perm))
    if which == "contraction":
        if not A:
            return cat.identity(())
        if len(A) == 1 or not M.has_tau():
            key = A[0] if len(A) == 1 else A
            if key not in M.delta:
                raise E.RuleDisabled(f"no delta for {' '.join(A)}")
            return M.delta[key]
        missing = [a for a in A if a not in M.delta]
        if missing:
            raise E.RuleDisabled(f"no delta for {missing[0]}")
        n = len(A)
        doubled = [a for a in A for _ in (0, 1)]
        labels = [i + n * r for i in range(n) for r in (0, 1)]
        return cat.then(tensor_all(cat, [M.delta[a] for a in A]),
                        _sorting_arrow(M, doubled, labels))
    raise ValueError(f"unknown structural rule {which}")


def symmetry(M: Prestructure, X, Y) -> ConcreteArrow:
    """``|Y||X| -> |X||Y|`` for type sequences."""
    X, Y = tuple(X), tuple(Y)
    return complete_structural(M, X + Y, "exchange",
                               perm=[len(X) + j for j in range(len(Y))] + list(range(len(X))))


# -- reports -------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportEntry:
    equation: str
    instance: str
    passed: bool
    witness: Optional[str] = None

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} {self.equation} [{self.instance}]"
        return line if self.passed else f"{line}: {self.witness}"


@dataclass(frozen=True)
class StructureReport:
    entries: tuple = ()
    note: str = ""

    @property
    def failures(self) -> list:
        return [e for e in self.entries if not e.passed]

    @property
    def verified(self) -> bool:
        return not self.failures

    def failing_equations(self) -> set:
        return {e.equation for e in self.failures}

    def __add__(self, other: "StructureReport") -> "StructureReport":
        note = "; ".join(n for n in (self.note, other.note) if n)
        return StructureReport(self.entries + other.entries, note)

    def render(self) -> str:
        lines = [e.render() for e in self.entries]
        if self.note:
            lines.append(f"note: {self.note}")
        lines.append("PASS" if self.verified else f"FAIL ({len(self.failures)} failing)")
        return "\n".join(lines)


def _sort_key(e: ReportEntry):
    return (_ORDER.get(e.equation, len(_ORDER)), e.instance)


def _compare(cat, equation, instance, lhs, rhs) -> ReportEntry:
    diff = cat.first_difference(lhs, rhs)
    return ReportEntry(equation, instance, diff is None, diff)


# -- the structure equations --------------------------------------------------------

def _structure_instances(M: Prestructure, eff: RuleSet):
    """Yield ``(equation, instance, lhs, rhs)`` for every applicable equation."""
    cat, sig = M.target, M.signature
    atoms = sig.types
    one = lambda X: cat.identity(M.obj(X))
    t = lambda a, b: M.atomic_tau(a, b)
    pi = lambda X: complete_structural(M, X, "weakening")
    dl = lambda X: complete_structural(M, X, "contraction")
    on = {name for name in ("weakening", "exchange", "contraction") if eff.enabled(name)}

    def wanted(eq):
        return dict(EQUATIONS)[eq] <= on

    for f, (args, res) in sorted(sig.constants.items()):
        F = M.op(f)
        if wanted("pi-natural"):
            yield "pi-natural", f, cat.then(F, pi([res])), pi(args)
        if wanted("delta-natural"):
            yield ("delta-natural", f, cat.then(F, dl([res])),
                   cat.then(dl(args), cat.tensor(F, F)))
        if wanted("tau-natural"):
            for c in atoms:
                lhs = cat.then(cat.tensor(F, one([c])), symmetry(M, [c], [res]))
                rhs = cat.then(symmetry(M, [c], args), cat.tensor(one([c]), F))
                yield "tau-natural", f"{f}, {c}", lhs, rhs
    if wanted("yang-baxter"):
        for p, q, r in itertools.product(atoms, repeat=3):
            lhs = then_all(cat, [cat.tensor(t(q, p), one([r])), cat.tensor(one([q]), t(r, p)),
                                 cat.tensor(t(r, q), one([p]))])
            rhs = then_all(cat, [cat.tensor(one([p]), t(r, q)), cat.tensor(t(r, p), one([q])),
                                 cat.tensor(one([r]), t(q, p))])
            yield "yang-baxter", f"{p} {q} {r}", lhs, rhs
    for x, y in itertools.product(atoms, repeat=2):
        inst = f"{x} {y}"
        if wanted("tau-involutive"):
            yield "tau-involutive", inst, cat.then(t(x, y), t(y, x)), one([y, x])
        if wanted("tau-pi"):
            yield ("tau-pi", inst, cat.then(t(x, y), cat.tensor(pi([x]), one([y]))),
                   cat.tensor(one([y]), pi([x])))
        if wanted("tau-delta"):
            yield ("tau-delta", inst, cat.then(t(x, y), cat.tensor(one([x]), dl([y]))),
                   cat.then(cat.tensor(dl([y]), one([x])), symmetry(M, [x], [y, y])))
    for x in atoms:
        if wanted("counit"):
            yield "counit", x, cat.then(dl([x]), cat.tensor(one([x]), pi([x]))), one([x])
        if wanted("cocommutative"):
            yield "cocommutative", x, cat.then(dl([x]), t(x, x)), dl([x])
        if wanted("coassociative"):
            yield ("coassociative", x, cat.then(dl([x]), cat.tensor(one([x]), dl([x]))),
                   cat.then(dl([x]), cat.tensor(dl([x]), one([x]))))


def check_structure(M: Prestructure, rules: RuleSet, sig: Signature = None) -> StructureReport:
    """Evaluate every applicable structure equation exactly."""
    if rules.contraction_only:
        raise E.Unsupported("contraction alone: use sample_contraction_words")
    if sig is not None and sig != M.signature:
        raise E.SignatureMismatch("prestructure is for a different signature")
    M.validate(rules)
    entries = [_compare(M.target, *inst) for inst in _structure_instances(M, rules.effective())]
    return StructureReport(tuple(sorted(entries, key=_sort_key)))


def _contraction_arrow(M: Prestructure, types, steps) -> ConcreteArrow:
    """Interpretation of a contraction word starting at ``types``: final -> start."""
    cat = M.target
    stages = [tuple(types)]
    arrows = []
    for st in steps:
        T = stages[-1]
        p, k = st.position, st.length
        arrows.append(tensor_all(cat, [cat.identity(M.obj(T[:p])),
                                       complete_structural(M, T[p:p + k], "contraction"),
                                       cat.identity(M.obj(T[p + 2 * k:]))]))
        stages.append(T[:p + k] + T[p + 2 * k:])
    out = cat.identity(M.obj(stages[-1]))
    for a in reversed(arrows):
        out = cat.then(out, a)
    return out


def sample_contraction_words(M: Prestructure, max_length: int = 3,
                             depth: int = 4) -> StructureReport:
    """Compare interpretations of contraction words denoting the same function.

    Words start from every atomic type sequence up to ``max_length`` and
    have at most ``depth`` steps; block contractions are used only where
    the prestructure gives the block diagonal.
    """
    M.validate(RuleSet(contraction=True))
    cat = M.target
    groups = {}
    for n in range(1, max_length + 1):
        for start in itertools.product(M.signature.types, repeat=n):
            frontier = [((), tuple(start))]
            for _ in range(depth):
                nxt = []
                for steps, T in frontier:
                    for k in range(1, len(T) // 2 + 1):
                        for p in range(len(T) - 2 * k + 1):
                            block = T[p:p + k]
                            if block != T[p + k:p + 2 * k]:
                                continue
                            if k > 1 and block not in M.delta:
                                continue
                            st = Step(CONTRACT, p, k)
                            nxt.append((steps + (st,), T[:p + k] + T[p + 2 * k:]))
                for steps, _ in nxt:
                    fn = GeneratorWord(n, steps).evaluate()
                    groups.setdefault((start, fn.map), []).append(steps)
                frontier = nxt
    entries = []
    for (start, fmap), words in sorted(groups.items()):
        if len(words) < 2:
            continue
        ref = _contraction_arrow(M, start, words[0])
        for w in words[1:]:
            other = _contraction_arrow(M, start, w)
            diff = cat.first_difference(ref, other)
            if diff is not None:
                break
        inst = f"{' '.join(start)} via {list(fmap)}"
        entries.append(ReportEntry("contraction-words", inst, diff is None, diff))
    return StructureReport(tuple(entries), SAMPLED_NOTE)


def structure_report(M: Prestructure, rules: RuleSet) -> StructureReport:
    """The exact check, or the sampled one for contraction alone; cached on ``M``."""
    key = rules
    if key not in M._verified:
        if rules.contraction_only:
            M._verified[key] = sample_contraction_words(M)
        else:
            M._verified[key] = check_structure(M, rules)
    return M._verified[key]


# -- interpretation ---------------------------------------------------------------------

def interpret_derivation(d: Derivation, M: Prestructure) -> ConcreteArrow:
    """Interpret a derivation rule by rule."""
    cat = M.target
    c = d.conclusion
    prem = [interpret_derivation(p, M) for p in d.premises]
    if d.rule == "Variables":
        return cat.identity(M.obj(c.context.types))
    if d.rule == "Unit":
        return cat.identity(())
    if d.rule == "Functions":
        return cat.then(tensor_all(cat, prem), M.op(d.const))
    if d.rule == "Tensor":
        return tensor_all(cat, prem)
    if d.rule == "Substitution":
        return cat.then(prem[0], prem[1])
    types = c.context.types
    if d.rule == "Weakening":
        p, k = d.position, d.length
        pre = tensor_all(cat, [cat.identity(M.obj(types[:p])),
                               complete_structural(M, types[p:p + k], "weakening"),
                               cat.identity(M.obj(types[p + k:]))])
    elif d.rule == "Exchange":
        premise_types = d.premises[0].conclusion.context.types
        pre = complete_structural(M, premise_types, "exchange", perm=d.perm)
    elif d.rule == "Contraction":
        p, k = d.position, d.length
        pre = tensor_all(cat, [cat.identity(M.obj(types[:p])),
                               complete_structural(M, types[p:p + k], "contraction"),
                               cat.identity(M.obj(types[p + k:]))])
    else:
        raise E.MalformedNode(f"cannot interpret rule {d.rule}")
    return cat.then(pre, prem[0])


def interpret(s: Sequent, M: Prestructure, rules: RuleSet,
              require_structure: bool = True) -> ConcreteArrow:
    if require_structure:
        report = structure_report(M, rules)
        if not report.verified:
            bad = ", ".join(sorted(report.failing_equations()))
            raise E.StructureUnverified(f"structure equations fail: {bad}")
    d = elaborate(s, rules, M.signature)
    if d is None:
        raise E.NotDerivable(f"{s} is not derivable under {rules}")
    return interpret_derivation(d, M)


def satisfies(M: Prestructure, phi: Formula, rules: RuleSet) -> bool:
    left, right = phi.sides
    return interpret(left, M, rules) == interpret(right, M, rules)


def model_check(M: Prestructure, T: Theory) -> StructureReport:
    """Structure equations, then every axiom of ``T``."""
    if T.signature != M.signature:
        raise E.SignatureMismatch(f"model does not interpret the signature of {T.name}")
    report = structure_report(M, T.rules)
    entries = []
    for name, ax in T.axioms:
        left, right = ax.sides
        lhs = interpret(left, M, T.rules, require_structure=False)
        rhs = interpret(right, M, T.rules, require_structure=False)
        entries.append(_compare(M.target, "axiom", name, lhs, rhs))
    return report + StructureReport(tuple(entries))


def check_morphism(h: dict, M: Prestructure, N: Prestructure, rules: RuleSet) -> StructureReport:
    """Whether ``h`` (atomic type -> arrow ``|A|_M -> |A|_N``) commutes with
    constants and the structural maps of the effective rules."""
    cat = M.target
    H = lambda X: tensor_all(cat, [h[a] for a in X])
    entries = []
    for f, (args, res) in sorted(M.signature.constants.items()):
        entries.append(_compare(cat, "morphism", f, cat.then(M.op(f), H([res])),
                                cat.then(H(args), N.op(f))))
    eff = rules.effective()
    for a in M.signature.types:
        if eff.weakening:
            entries.append(_compare(cat, "morphism", f"pi {a}", M.pi[a], cat.then(h[a], N.pi[a])))
        if eff.contraction:
            entries.append(_compare(cat, "morphism", f"delta {a}",
                                    cat.then(M.delta[a], H([a, a])),
                                    cat.then(h[a], N.delta[a])))
        if eff.exchange:
            for b in M.signature.types:
                entries.append(_compare(cat, "morphism", f"tau {a} {b}",
                                        cat.then(M.atomic_tau(a, b), H([a, b])),
                                        cat.then(H([b, a]), N.atomic_tau(a, b))))
    return StructureReport(tuple(entries))

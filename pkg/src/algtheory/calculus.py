"""Derivations in the term calculus, the elaborator, and the proof checker.

The elaborator decides derivability by splitting a sequent into a purely
functional skeleton (every variable occurrence renamed apart) and the
occurrence function, which must lie in the structural category of the rule
set.  The derivations it emits apply the functional rules first and the
structural rules last, and never use Substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import errors as E
from .structural import (RuleSet, FiniteFn, TypedStructuralArrow, typed_membership,
                         WEAKEN, EXCHANGE, CONTRACT)
from .syntax import (EMPTY, App, Context, Formula, Sequent, Tensor, Var, atoms,
                     canonical_rename, occurrences, relabel_occurrences, substitute, tensor)

TERM_RULES = ("Variables", "Functions", "Substitution", "Unit", "Tensor",
              "Weakening", "Exchange", "Contraction")
PROOF_RULES = ("Axiom", "Reflexivity", "Symmetry", "Transitivity", "Substitution",
               "Tensor", "Weakening", "Exchange", "Contraction")
STRUCTURAL_RULES = ("Weakening", "Exchange", "Contraction")


@dataclass(frozen=True)
class Signature:
    types: tuple
    constants: dict = field(hash=False)  # name -> (argument types, result type)

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        consts = {name: (tuple(args), res) for name, (args, res) in dict(self.constants).items()}
        object.__setattr__(self, "constants", consts)
        if len(set(self.types)) != len(self.types):
            raise ValueError("atomic types must be unique")
        for name, (args, res) in consts.items():
            for a in args + (res,):
                if a not in self.types:
                    raise ValueError(f"constant {name} uses undeclared type {a}")

    def arity(self, name):
        try:
            return self.constants[name]
        except KeyError:
            raise E.UnknownConstant(f"unknown constant {name}") from None


def infer_type(t, var_types: dict, sig: Signature) -> tuple:
    """Codomain of a raw term, given the types of its variables."""
    if t is EMPTY:
        return ()
    if isinstance(t, Var):
        if t.name not in var_types:
            raise E.UnboundVariable(f"variable {t.name} not declared in context")
        return (var_types[t.name],)
    if isinstance(t, App):
        args, res = sig.arity(t.const)
        if len(t.args) != len(args):
            raise E.ArityMismatch(f"{t.const} expects {len(args)} arguments, got {len(t.args)}")
        for a, want in zip(t.args, args):
            got = infer_type(a, var_types, sig)
            if got != (want,):
                raise E.TermTypeError(f"argument {a} of {t.const} has type {got}, expected {want}")
        return (res,)
    out = ()
    for f in t.factors:
        out += infer_type(f, var_types, sig)
    return out


def type_check(s: Sequent, sig: Signature) -> None:
    got = infer_type(s.term, dict(s.context.entries), sig)
    if got != s.codomain:
        raise E.TermTypeError(f"term {s.term} has type {got}, declared {s.codomain}")


@dataclass(frozen=True)
class Derivation:
    rule: str
    premises: tuple
    conclusion: Sequent
    const: Optional[str] = None
    position: Optional[int] = None
    length: Optional[int] = None
    perm: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        if self.perm is not None:
            object.__setattr__(self, "perm", tuple(self.perm))

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def uses(self, rule: str) -> bool:
        return any(n.rule == rule for n in self.nodes())

    def size(self):
        return sum(1 for _ in self.nodes())


@dataclass(frozen=True)
class ProofTree:
    rule: str
    premises: tuple
    conclusion: Formula
    axiom: Optional[str] = None
    position: Optional[int] = None
    length: Optional[int] = None
    perm: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        if self.perm is not None:
            object.__setattr__(self, "perm", tuple(self.perm))

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def depth(self):
        return 1 + max((p.depth() for p in self.premises), default=0)


@dataclass(frozen=True)
class Theory:
    name: str
    signature: Signature
    rules: RuleSet
    axioms: tuple = ()  # ((name, Formula), ...)

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple((n, f) for n, f in self.axioms))

    def axiom(self, name):
        for n, f in self.axioms:
            if n == name:
                return f
        raise E.UnknownAxiom(f"no axiom named {name}")

    def validate(self):
        for name, ax in self.axioms:
            for side in ax.sides:
                if elaborate(side, self.rules, self.signature) is None:
                    raise E.NonDerivableSide(f"axiom {name}: {side} is not derivable")


# -- shared context manipulations ---------------------------------------------

def _weaken_ctx(ctx: Context, pos: int, length: int, conclusion_ctx: Context, where):
    e = conclusion_ctx.entries
    if pos is None or length is None or pos < 0 or length < 0 or pos + length > len(e):
        raise E.MalformedNode("weakening block out of range", where)
    if e[:pos] + e[pos + length:] != ctx.entries:
        raise E.MalformedNode("weakening conclusion does not extend the premise context", where)


def _exchange_ctx(ctx: Context, perm, conclusion_ctx: Context, where):
    n = len(ctx)
    if perm is None or sorted(perm) != list(range(n)):
        raise E.MalformedNode(f"exchange needs a permutation of {n}", where)
    if tuple(ctx.entries[i] for i in perm) != conclusion_ctx.entries:
        raise E.MalformedNode("exchange conclusion is not the permuted context", where)


def _contract_ctx(ctx: Context, pos: int, length: int, where):
    """Return (conclusion context, kept names, removed names)."""
    e = ctx.entries
    if pos is None or length is None or pos < 0 or length < 0 or pos + 2 * length > len(e):
        raise E.MalformedNode("contraction block out of range", where)
    first, second = e[pos:pos + length], e[pos + length:pos + 2 * length]
    if [a for _, a in first] != [a for _, a in second]:
        raise E.TermTypeError("contracted blocks have different types", where)
    new = Context(e[:pos + length] + e[pos + 2 * length:])
    return new, [n for n, _ in first], [n for n, _ in second]


def _gate(rule, rules: RuleSet, where):
    if rule in STRUCTURAL_RULES and not rules.enabled(rule):
        raise E.RuleDisabled(f"{rule} is not a rule of this language ({rules})", where)


def _concat(contexts, where) -> Context:
    entries = ()
    for c in contexts:
        entries += c.entries
    try:
        return Context(entries)
    except E.ContextClash as exc:
        raise E.ContextClash(str(exc.args[0]), where) from None


# -- derivation checking -------------------------------------------------------

def check_derivation(d: Derivation, rules: RuleSet, sig: Signature, _path=()) -> Sequent:
    """Verify ``d`` node by node; return its conclusion."""
    where = _path
    if d.rule not in TERM_RULES:
        raise E.MalformedNode(f"unknown rule {d.rule}", where)
    _gate(d.rule, rules, where)
    prem = [check_derivation(p, rules, sig, _path + (i,)) for i, p in enumerate(d.premises)]
    c = d.conclusion

    def need(n):
        if len(prem) != n:
            raise E.MalformedNode(f"{d.rule} takes {n} premise(s), got {len(prem)}", where)

    if d.rule == "Variables":
        need(0)
        if len(c.context) != 1:
            raise E.MalformedNode("Variables concludes x:A |- x:A", where)
        (x, a), = c.context.entries
        expected = Sequent(c.context, Var(x), (a,))
    elif d.rule == "Unit":
        need(0)
        expected = Sequent(Context(), EMPTY, ())
    elif d.rule == "Functions":
        if d.const is None:
            raise E.MalformedNode("Functions node without a constant", where)
        try:
            args, res = sig.arity(d.const)
        except E.UnknownConstant as exc:
            raise E.UnknownConstant(str(exc.args[0]), where) from None
        if len(prem) != len(args):
            raise E.ArityMismatch(f"{d.const} takes {len(args)} arguments, "
                                  f"got {len(prem)} premises", where)
        for p, a in zip(prem, args):
            if p.codomain != (a,):
                raise E.TermTypeError(f"premise {p} should have type {a}", where)
        expected = Sequent(_concat([p.context for p in prem], where),
                           App(d.const, tuple(p.term for p in prem)), (res,))
    elif d.rule == "Substitution":
        need(2)
        s, t = prem
        if t.context.types != s.codomain:
            raise E.TermTypeError("substituted term does not match the context it replaces", where)
        expected = Sequent(s.context, substitute(t.term, atoms(s.term), t.context.names),
                           t.codomain)
    elif d.rule == "Tensor":
        if len(prem) < 2:
            raise E.MalformedNode("Tensor takes at least two premises", where)
        cod = ()
        for p in prem:
            cod += p.codomain
        expected = Sequent(_concat([p.context for p in prem], where),
                           tensor(*(p.term for p in prem)), cod)
    elif d.rule == "Weakening":
        need(1)
        _weaken_ctx(prem[0].context, d.position, d.length, c.context, where)
        expected = Sequent(c.context, prem[0].term, prem[0].codomain)
    elif d.rule == "Exchange":
        need(1)
        _exchange_ctx(prem[0].context, d.perm, c.context, where)
        expected = Sequent(c.context, prem[0].term, prem[0].codomain)
    else:  # Contraction
        need(1)
        ctx, keep, drop = _contract_ctx(prem[0].context, d.position, d.length, where)
        expected = Sequent(ctx, substitute(prem[0].term, [Var(v) for v in keep], drop),
                           prem[0].codomain)
    if expected != c:
        raise E.MalformedNode(f"{d.rule} concludes {expected}, node states {c}", where)
    return c


# -- elaboration -----------------------------------------------------------------

def _fresh_names(avoid):
    avoid = set(avoid)
    i = 0
    while True:
        i += 1
        name = f"c{i}"
        if name not in avoid:
            avoid.add(name)
            yield name


def functional_derivation(s: Sequent, sig: Signature) -> Derivation:
    """Derivation of a purely functional sequent from Variables, Functions, Tensor, Unit."""
    names = list(s.context.names)
    if occurrences(s.term) != names:
        raise E.NotPurelyFunctional(f"{s} does not use its variables once each, in order")
    types = dict(s.context.entries)

    def build(t, ctx_names):
        ctx = Context.of(ctx_names, [types[n] for n in ctx_names])
        if t is EMPTY:
            return Derivation("Unit", (), Sequent(Context(), EMPTY, ()))
        if isinstance(t, Var):
            return Derivation("Variables", (), Sequent(ctx, t, (types[t.name],)))
        if isinstance(t, App):
            args, res = sig.arity(t.const)
            prem, k = [], 0
            for a in t.args:
                n = len(occurrences(a))
                prem.append(build(a, ctx_names[k:k + n]))
                k += n
            return Derivation("Functions", tuple(prem), Sequent(ctx, t, (res,)), const=t.const)
        prem, k, cod = [], 0, ()
        for f in t.factors:
            n = len(occurrences(f))
            sub = build(f, ctx_names[k:k + n])
            prem.append(sub)
            cod += sub.conclusion.codomain
            k += n
        return Derivation("Tensor", tuple(prem), Sequent(ctx, t, cod))

    return build(s.term, names)


def occurrence_arrow(s: Sequent) -> TypedStructuralArrow:
    """The structural arrow sending each occurrence to its context position."""
    names = s.context.names
    occ = occurrences(s.term)
    for v in occ:
        if v not in names:
            raise E.UnboundVariable(f"variable {v} not declared in context")
    fn = FiniteFn(len(occ), len(names), tuple(names.index(v) for v in occ))
    return TypedStructuralArrow.from_fn(s.context.types, fn)


def elaborate(s: Sequent, rules: RuleSet, sig: Signature) -> Optional[Derivation]:
    """A derivation of ``s``, or None when ``s`` is not derivable under ``rules``.

    Ill-formed sequents (unknown constants, type errors, unbound variables)
    raise instead of returning None.
    """
    type_check(s, sig)
    arrow = occurrence_arrow(s)
    word = typed_membership(arrow, rules)
    if word is None:
        return None

    fresh = _fresh_names(set(s.context.names) | set(sig.constants))
    # Walk the word backwards from the final context to name every stage.
    names = [list(s.context.names)]
    types = [list(s.context.types)]
    for st in reversed(word.steps):
        n, t = names[0], types[0]
        p, k = st.position, st.length
        if st.kind == WEAKEN:
            n, t = n[:p] + n[p + k:], t[:p] + t[p + k:]
        elif st.kind == EXCHANGE:
            n, t = n[:], t[:]
            n[p], n[p + 1] = n[p + 1], n[p]
            t[p], t[p + 1] = t[p + 1], t[p]
        else:
            n = n[:p + k] + [next(fresh) for _ in range(k)] + n[p + k:]
            t = t[:p + k] + t[p:p + k] + t[p + k:]
        names.insert(0, n)
        types.insert(0, t)

    skeleton = Sequent(Context.of(names[0], types[0]),
                       relabel_occurrences(s.term, names[0]), s.codomain)
    d = functional_derivation(skeleton, sig)
    term = skeleton.term
    base = None  # premise of a run of adjacent exchanges, merged into one node
    for i, st in enumerate(word.steps):
        ctx = Context.of(names[i + 1], types[i + 1])
        if st.kind == EXCHANGE:
            base = base or d
            if i + 1 < len(word.steps) and word.steps[i + 1].kind == EXCHANGE:
                continue
            old = base.conclusion.context.names
            d = Derivation("Exchange", (base,), Sequent(ctx, term, s.codomain),
                           perm=tuple(old.index(v) for v in names[i + 1]))
            base = None
            continue
        if st.kind == WEAKEN:
            d = Derivation("Weakening", (d,), Sequent(ctx, term, s.codomain),
                           position=st.position, length=st.length)
        else:
            p, k = st.position, st.length
            prev = names[i]
            term = substitute(term, [Var(v) for v in prev[p:p + k]], prev[p + k:p + 2 * k])
            d = Derivation("Contraction", (d,), Sequent(ctx, term, s.codomain),
                           position=p, length=k)
    assert d.conclusion == s, (d.conclusion, s)
    return d


def derivable(s: Sequent, rules: RuleSet, sig: Signature) -> bool:
    return elaborate(s, rules, sig) is not None


# -- proof checking -----------------------------------------------------------------

def check_proof(p: ProofTree, theory: Theory, _path=()) -> Formula:
    """Verify a proof tree against ``theory``; return the proven formula."""
    where = _path
    rules, sig = theory.rules, theory.signature
    if p.rule not in PROOF_RULES:
        raise E.MalformedNode(f"unknown rule {p.rule}", where)
    _gate(p.rule, rules, where)
    prem = [check_proof(q, theory, _path + (i,)) for i, q in enumerate(p.premises)]
    c = p.conclusion
    for side in c.sides:
        try:
            ok = elaborate(side, rules, sig) is not None
        except E.KernelError as exc:
            raise type(exc)(str(exc.args[0]) if exc.args else "", where) from None
        if not ok:
            raise E.NonDerivableSide(f"{side} is not derivable", where)

    def need(n):
        if len(prem) != n:
            raise E.MalformedNode(f"{p.rule} takes {n} premise(s), got {len(prem)}", where)

    if p.rule == "Axiom":
        need(0)
        candidates = theory.axioms
        if p.axiom is not None:
            candidates = [(n, f) for n, f in theory.axioms if n == p.axiom]
        target = canonical_rename(c)
        if not any(canonical_rename(f) == target for _, f in candidates):
            label = f" {p.axiom}" if p.axiom else ""
            raise E.UnknownAxiom(f"{c} is not an axiom{label} of {theory.name}", where)
        return c
    if p.rule == "Reflexivity":
        need(0)
        if c.left != c.right:
            raise E.MalformedNode("reflexivity needs identical sides", where)
        return c
    if p.rule == "Symmetry":
        need(1)
        q = prem[0]
        expected = Formula(q.context, q.right, q.left, q.codomain)
    elif p.rule == "Transitivity":
        need(2)
        q, r = prem
        if q.context != r.context or q.codomain != r.codomain or q.right != r.left:
            raise E.MalformedNode("transitivity premises do not chain", where)
        expected = Formula(q.context, q.left, r.right, q.codomain)
    elif p.rule == "Substitution":
        need(2)
        q, r = prem
        if r.context.types != q.codomain:
            raise E.TermTypeError("substituted terms do not match the context they replace", where)
        y = r.context.names
        expected = Formula(q.context, substitute(r.left, atoms(q.left), y),
                           substitute(r.right, atoms(q.right), y), r.codomain)
    elif p.rule == "Tensor":
        if len(prem) < 2:
            raise E.MalformedNode("Tensor takes at least two premises", where)
        cod = ()
        for q in prem:
            cod += q.codomain
        expected = Formula(_concat([q.context for q in prem], where),
                           tensor(*(q.left for q in prem)), tensor(*(q.right for q in prem)), cod)
    elif p.rule == "Weakening":
        need(1)
        q = prem[0]
        _weaken_ctx(q.context, p.position, p.length, c.context, where)
        expected = Formula(c.context, q.left, q.right, q.codomain)
    elif p.rule == "Exchange":
        need(1)
        q = prem[0]
        _exchange_ctx(q.context, p.perm, c.context, where)
        expected = Formula(c.context, q.left, q.right, q.codomain)
    else:  # Contraction
        need(1)
        q = prem[0]
        ctx, keep, drop = _contract_ctx(q.context, p.position, p.length, where)
        repl = [Var(v) for v in keep]
        expected = Formula(ctx, substitute(q.left, repl, drop), substitute(q.right, repl, drop),
                           q.codomain)
    if expected != c:
        raise E.MalformedNode(f"{p.rule} concludes {expected}, node states {c}", where)
    return c

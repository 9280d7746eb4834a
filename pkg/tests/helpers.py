"""Random generators shared by the tests."""

import itertools
import random

from algtheory.calculus import ProofTree, Signature
from algtheory.dsl import load_theory
from algtheory.structural import FiniteFn, RuleSet, closed_form_member, membership
from algtheory.syntax import (App, Context, Formula, Sequent, Var, atoms, canonical_names,
                              relabel_occurrences, substitute, tensor)

GROUPS = load_theory("groups.thy")
CMI = load_theory("cmi.thy")

TWO_SORTED = Signature(("A", "B"), {
    "f": (("A", "B"), "A"),
    "g": (("A",), "B"),
    "h": (("B", "B"), "B"),
    "a": ((), "A"),
})


def random_functional_term(rng, sig, result, depth, counter):
    """A length-one term of type ``result`` with fresh variables; returns (term, types)."""
    consts = [c for c, (_, res) in sig.constants.items() if res == result]
    if depth == 0 or not consts or rng.random() < 0.3:
        counter[0] += 1
        return Var(f"u{counter[0]}"), [result]
    c = rng.choice(consts)
    args, types = [], []
    for a in sig.constants[c][0]:
        t, ts = random_functional_term(rng, sig, a, depth - 1, counter)
        args.append(t)
        types += ts
    return App(c, tuple(args)), types


def random_functional_sequent(rng, sig, width=2, depth=3) -> Sequent:
    """A purely functional sequent named v1..vn."""
    counter = [0]
    terms, types, cod = [], [], []
    for _ in range(rng.randint(0, width)):
        result = rng.choice(sig.types)
        t, ts = random_functional_term(rng, sig, result, depth, counter)
        terms.append(t)
        types += ts
        cod.append(result)
    names = canonical_names(len(types))
    term = relabel_occurrences(tensor(*terms), names)
    return Sequent(Context.of(names, types), term, tuple(cod))


def random_member(rng, n, rules, max_source=4):
    """A function ``n -> m`` in the structural category of ``rules``."""
    for _ in range(200):
        m = rng.randint(0, max_source)
        if n > 0 and m == 0:
            continue
        f = FiniteFn(n, m, tuple(rng.randrange(m) for _ in range(n)))
        if rng.random() < 0.5 and rules.contraction and not rules.contraction_only and m <= n:
            # bias toward surjections so contraction shows up often
            f = FiniteFn(n, m, tuple(sorted(f.map)) if not rules.exchange else f.map)
        if rules.contraction_only:
            ok = membership(f, rules) is not None
        else:
            ok = closed_form_member(f, rules)
        if ok:
            return f
    return FiniteFn.identity(n)


def fresh_names(rng, n, prefix="x"):
    pool = [f"{prefix}{i}" for i in range(1, 3 * n + 4)]
    rng.shuffle(pool)
    return pool[:n]


def random_derivable(rng, sig, rules, width=2, depth=3) -> Sequent:
    """A sequent derivable under ``rules``: a functional term behind a structural arrow."""
    while True:
        phi = random_functional_sequent(rng, sig, width, depth)
        n = len(phi.context)
        f = random_member(rng, n, rules)
        source = [None] * f.codomain_size
        ok = True
        for j, i in enumerate(f.map):
            t = phi.context.types[j]
            if source[i] not in (None, t):
                ok = False
            source[i] = t
        if not ok:
            continue
        for i in range(f.codomain_size):
            if source[i] is None:
                source[i] = rng.choice(sig.types)
        names = fresh_names(rng, f.codomain_size)
        term = relabel_occurrences(phi.term, [names[i] for i in f.map])
        return Sequent(Context.of(names, source), term, phi.codomain)


def rename_context(s: Sequent, rng) -> Sequent:
    """An alphabetical variant of ``s``."""
    new = fresh_names(rng, len(s.context), prefix="y")
    term = substitute(s.term, [Var(v) for v in new], s.context.names)
    return Sequent(Context.of(new, s.context.types), term, s.codomain)


# -- random proofs over the commutative-monoid theory ----------------------------

class ProofGen:
    """Random valid proof trees over a theory whose terms have one type."""

    def __init__(self, theory, rng):
        self.theory = theory
        self.rng = rng
        self.count = 0
        self.atom = theory.signature.types[0]

    def fresh(self):
        self.count += 1
        return f"w{self.count}"

    def _renamed(self, phi: Formula) -> Formula:
        new = [self.fresh() for _ in phi.context.names]
        repl = [Var(v) for v in new]
        return Formula(Context.of(new, phi.context.types),
                       substitute(phi.left, repl, phi.context.names),
                       substitute(phi.right, repl, phi.context.names), phi.codomain)

    def leaf(self):
        rng = self.rng
        if rng.random() < 0.6:
            name, phi = rng.choice(self.theory.axioms)
            return ProofTree("Axiom", (), self._renamed(phi), axiom=name)
        s = random_derivable(rng, self.theory.signature, self.theory.rules, width=1, depth=2)
        new = [self.fresh() for _ in s.context.names]
        term = substitute(s.term, [Var(v) for v in new], s.context.names)
        phi = Formula(Context.of(new, s.context.types), term, term, s.codomain)
        return ProofTree("Reflexivity", (), phi)

    def proof(self, depth):
        rng = self.rng
        if depth <= 1:
            return self.leaf()
        choices = ["Symmetry", "Transitivity", "Tensor", "Substitution"]
        if self.theory.rules.weakening:
            choices.append("Weakening")
        if self.theory.rules.exchange:
            choices.append("Exchange")
        rule = rng.choice(choices)
        q = self.proof(depth - 1)
        c = q.conclusion
        if rule == "Symmetry":
            return ProofTree("Symmetry", (q,), Formula(c.context, c.right, c.left, c.codomain))
        if rule == "Transitivity":
            back = ProofTree("Symmetry", (q,), Formula(c.context, c.right, c.left, c.codomain))
            return ProofTree("Transitivity", (q, back), Formula(c.context, c.left, c.left,
                                                                 c.codomain))
        if rule == "Tensor":
            r = self.proof(rng.randint(1, depth - 1))
            d = r.conclusion
            return ProofTree("Tensor", (q, r), Formula(c.context + d.context,
                                                        tensor(c.left, d.left),
                                                        tensor(c.right, d.right),
                                                        c.codomain + d.codomain))
        if rule == "Weakening":
            p = rng.randint(0, len(c.context))
            e = c.context.entries
            ctx = Context(e[:p] + ((self.fresh(), self.atom),) + e[p:])
            return ProofTree("Weakening", (q,), Formula(ctx, c.left, c.right, c.codomain),
                             position=p, length=1)
        if rule == "Exchange":
            perm = list(range(len(c.context)))
            rng.shuffle(perm)
            ctx = Context(tuple(c.context.entries[i] for i in perm))
            return ProofTree("Exchange", (q,), Formula(ctx, c.left, c.right, c.codomain),
                             perm=tuple(perm))
        # Substitution: plug a tensor of proofs into the variables of q.
        k = len(c.context)
        parts = [self.proof(rng.randint(1, max(1, depth - 2))) for _ in range(k)]
        parts = [p for p in parts if p.conclusion.codomain == (self.atom,)]
        if len(parts) != k or k == 0:
            return ProofTree("Symmetry", (q,), Formula(c.context, c.right, c.left, c.codomain))
        if k == 1:
            s = parts[0]
        else:
            ctx, lefts, rights, cod = Context(), [], [], ()
            for p in parts:
                ctx = ctx + p.conclusion.context
                lefts.append(p.conclusion.left)
                rights.append(p.conclusion.right)
                cod += p.conclusion.codomain
            s = ProofTree("Tensor", tuple(parts), Formula(ctx, tensor(*lefts), tensor(*rights),
                                                          cod))
        sc = s.conclusion
        y = c.context.names
        phi = Formula(sc.context, substitute(c.left, atoms(sc.left), y),
                      substitute(c.right, atoms(sc.right), y), c.codomain)
        return ProofTree("Substitution", (s, q), phi)


def bounded_proofs(gen, count, max_depth):
    """``count`` random proofs of depth at most ``max_depth``."""
    out = []
    while len(out) < count:
        p = gen.proof(gen.rng.randint(1, max_depth))
        if p.depth() <= max_depth:
            out.append(p)
    return out


def all_functions(n, m):
    for values in itertools.product(range(m), repeat=n):
        yield FiniteFn(n, m, values)


def seeded(seed):
    return random.Random(seed)

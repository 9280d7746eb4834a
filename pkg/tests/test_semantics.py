import itertools

import pytest
from hypothesis import given, settings, strategies as st

from algtheory import errors as E
from algtheory.calculus import Derivation, Signature, Theory, check_derivation, elaborate
from algtheory.categories import (BoolSemiring, ConcreteArrow, FinFn, IntegerRing, MatSemiring,
                                  ZMod, decode, size)
from algtheory.dsl import load_model, parse_formula, parse_sequent
from algtheory.semantics import (SAMPLED_NOTE, Prestructure, check_morphism, check_structure,
                                 complete_structural, interpret, interpret_derivation,
                                 model_check, sample_contraction_words, satisfies, symmetry)
from algtheory.structural import ALL_RULES, RuleSet
from algtheory.syntax import Context, Sequent

from helpers import CMI, GROUPS, seeded

SIG = GROUPS.signature
FIN = FinFn()
MAT3 = MatSemiring(ZMod(3))


def test_kronecker_swap_golden():
    assert MAT3.swap((2,), (2,)).payload == ((1, 0, 0, 0), (0, 0, 1, 0),
                                            (0, 1, 0, 0), (0, 0, 0, 1))


def test_decode_first_factor_slow():
    assert decode(5, (2, 3)) == (1, 2)
    assert FIN.tensor(FIN.arrow((2,), (2,), [1, 0]), FIN.identity((3,))).payload[:3] == (3, 4, 5)


def test_arrow_shape_checks():
    with pytest.raises(E.SizeMismatch):
        FIN.arrow((2,), (2,), [0, 1, 1])
    with pytest.raises(E.SizeMismatch):
        MAT3.arrow((2,), (1,), [[1, 1], [0, 0]])
    with pytest.raises(E.SizeMismatch):
        FIN.then(FIN.identity((2,)), FIN.identity((3,)))


def random_fin(rng, dom, cod):
    return FIN.arrow(dom, cod, [rng.randrange(size(cod)) for _ in range(size(dom))])


def random_mat(cat, rng, dom, cod):
    return cat.arrow(dom, cod, [[rng.randrange(-3, 4) for _ in range(size(dom))]
                                for _ in range(size(cod))])


objects = st.lists(st.integers(1, 3), min_size=0, max_size=2).map(tuple)


@settings(max_examples=60, deadline=None)
@given(objects, objects, objects, objects, objects, objects, st.integers(0, 10 ** 6),
       st.sampled_from(["finfn", "bool", "zmod", "int"]))
def test_interchange(a, b, c, d, e, f, seed, kind):
    rng = seeded(seed)
    if kind == "finfn":
        cat = FIN
        mk = lambda dom, cod: random_fin(rng, dom, cod)
    else:
        cat = MatSemiring({"bool": BoolSemiring(), "zmod": ZMod(5), "int": IntegerRing()}[kind])
        mk = lambda dom, cod: random_mat(cat, rng, dom, cod)
    f1, g1, f2, g2 = mk(a, b), mk(b, c), mk(d, e), mk(e, f)
    lhs = cat.tensor(cat.then(f1, g1), cat.then(f2, g2))
    rhs = cat.then(cat.tensor(f1, f2), cat.tensor(g1, g2))
    assert lhs == rhs


def two_types():
    return Prestructure.cartesian(Signature(("A", "B"), {}), {"A": 2, "B": 3}, {})


def test_completion_atomic_and_weakening():
    M = two_types()
    assert complete_structural(M, ("A",), "contraction") == M.delta["A"]
    assert complete_structural(M, ("A", "B"), "weakening") == FIN.terminal((2, 3))


def test_block_diagonal_matches_brute_force():
    M = two_types()
    elements = list(itertools.product(range(2), range(3)))
    index = {e: i for i, e in enumerate(elements)}
    pairs = {e + e2: i for i, (e, e2) in enumerate(itertools.product(elements, elements))}
    expected = tuple(pairs[e + e] for e in elements)
    got = complete_structural(M, ("A", "B"), "contraction")
    assert got.dom == (2, 3) and got.cod == (2, 3, 2, 3)
    assert got.payload == expected
    assert len(index) == 6


def test_exchange_completion_is_the_permutation():
    M = two_types()
    A = ("A", "B", "A")
    perm = (2, 0, 1)  # B[j] = A[perm[j]]
    arrow = complete_structural(M, A, "exchange", perm=perm)
    B = tuple(A[i] for i in perm)
    for i, digits in enumerate(itertools.product(*(range(M.types[t]) for t in B))):
        out = [None] * 3
        for j, d in enumerate(digits):
            out[perm[j]] = d
        assert decode(arrow.payload[i], arrow.cod) == tuple(out)


def test_completion_is_functorial():
    """Block diagonals equal the atomic ones rearranged by a middle swap."""
    for M in (two_types(), load_model("hopf_z2_gf3.model", SIG)):
        cat = M.target
        a, b = (M.signature.types * 2)[:2]
        stepwise = cat.then(cat.tensor(M.delta[a], M.delta[b]),
                            cat.tensor(cat.tensor(cat.identity(M.obj([a])),
                                                  M.atomic_tau(b, a)),
                                       cat.identity(M.obj([b]))))
        assert complete_structural(M, (a, b), "contraction") == stepwise
        assert complete_structural(M, (a, b), "weakening") == cat.tensor(M.pi[a], M.pi[b])
        assert symmetry(M, [a], [b]) == M.atomic_tau(a, b)


def test_missing_structural_map():
    M = Prestructure(SIG, FIN, {"G": 2}, {})
    with pytest.raises(E.RuleDisabled):
        complete_structural(M, ("G",), "weakening")


def test_genuine_finfn_structure_passes():
    M = Prestructure.cartesian(SIG, {"G": 3}, {"mul": [0] * 9, "inv": [2, 0, 1], "e": [1]})
    report = check_structure(M, ALL_RULES)
    assert report.verified
    assert {e.equation for e in report.entries} >= {"yang-baxter", "coassociative", "tau-pi"}


def hopf():
    return load_model("hopf_z2_gf3.model", SIG)


def test_hopf_structure_and_axioms():
    assert check_structure(hopf(), ALL_RULES).verified
    assert model_check(hopf(), GROUPS).verified


def test_non_coassociative_diagonal_fails():
    M = hopf()
    rows = [list(r) for r in M.delta["G"].payload]
    rows[1][0] = 1
    M.delta["G"] = MAT3.arrow((2,), (2, 2), rows)
    report = check_structure(M, ALL_RULES)
    assert "coassociative" in report.failing_equations()
    bad = [e for e in report.failures if e.equation == "coassociative"][0]
    assert bad.witness.startswith("entry")


def test_gating_by_rules():
    M = Prestructure.cartesian(SIG, {"G": 2}, {"mul": [0, 1, 1, 0], "inv": [0, 1], "e": [0]})
    names = {e.equation for e in check_structure(M, RuleSet(weakening=True)).entries}
    assert names == {"pi-natural"}
    names = {e.equation for e in check_structure(M, RuleSet(exchange=True)).entries}
    assert names == {"tau-natural", "yang-baxter", "tau-involutive"}
    with pytest.raises(E.Unsupported):
        check_structure(M, RuleSet(contraction=True))


def z2():
    return load_model("z2.model", SIG)


def test_interpret_examples():
    M = z2()
    ident = interpret(parse_sequent("x:G |- x : G", SIG), M, ALL_RULES)
    assert ident == FIN.identity((2,))
    lhs = interpret(parse_sequent("x:G |- mul(inv(x),x) : G", SIG), M, ALL_RULES)
    assert lhs.payload == (0, 0)
    assert lhs == interpret(parse_sequent("x:G |- e : G", SIG), M, ALL_RULES)
    empty = interpret(parse_sequent("x:G |- I : I", SIG), M, ALL_RULES)
    assert empty == M.pi["G"]


def test_interpret_requires_structure():
    M = hopf()
    M.tau[("G", "G")] = MAT3.identity((2, 2))
    with pytest.raises(E.StructureUnverified):
        interpret(parse_sequent("x:G |- x : G", SIG), M, ALL_RULES)
    with pytest.raises(E.NotDerivable):
        interpret(parse_sequent("x:G |- x * x : G G", SIG), z2(), RuleSet(weakening=True))


def _insert_redundancy(d: Derivation, rng) -> Derivation:
    """Wrap the root in an exchange and its inverse, or duplicate then discard."""
    c = d.conclusion
    n = len(c.context)
    if n >= 2 and rng.random() < 0.5:
        perm = list(range(n))
        rng.shuffle(perm)
        mid = Sequent(Context(tuple(c.context.entries[i] for i in perm)), c.term, c.codomain)
        inv = [perm.index(i) for i in range(n)]
        return Derivation("Exchange", (Derivation("Exchange", (d,), mid, perm=tuple(perm)),),
                          c, perm=tuple(inv))
    if n >= 1:
        p = rng.randrange(n)
        name, typ = c.context.entries[p]
        fresh = name + "_copy"
        e = c.context.entries
        wider = Sequent(Context(e[:p + 1] + ((fresh, typ),) + e[p + 1:]), c.term, c.codomain)
        weak = Derivation("Weakening", (d,), wider, position=p + 1, length=1)
        return Derivation("Contraction", (weak,), c, position=p, length=1)
    return d


def test_derivation_independence():
    rng = seeded(2)
    for M in (z2(), hopf()):
        for text in ["x:G y:G |- mul(y,inv(x)) : G", "x:G |- mul(x,mul(inv(x),e)) : G",
                     "x:G y:G z:G |- mul(z,x) * y : G G"]:
            s = parse_sequent(text, SIG)
            d = elaborate(s, ALL_RULES, SIG)
            ref = interpret_derivation(d, M)
            for _ in range(6):
                d2 = _insert_redundancy(d, rng)
                assert check_derivation(d2, ALL_RULES, SIG) == s
                assert interpret_derivation(d2, M) == ref


def transformation_monoid():
    # functions {0,1} -> {0,1}: id, swap, const0, const1, composed left to right
    fns = [(0, 1), (1, 0), (0, 0), (1, 1)]
    table = [fns.index(tuple(g[v] for v in f)) for f in fns for g in fns]
    sig = Signature(("M",), {"mul": (("M", "M"), "M"), "one": ((), "M")})
    return sig, Prestructure.cartesian(sig, {"M": 4}, {"mul": table, "one": [0]})


def test_satisfies():
    omega = load_model("omega.model", CMI.signature)
    comm = parse_formula("x:Omega y:Omega |- or(x,y) = or(y,x)", CMI.signature)
    refl = parse_formula("x:Omega |- neg(x) = neg(x)", CMI.signature)
    assert satisfies(omega, comm, CMI.rules)
    assert satisfies(omega, refl, CMI.rules)
    sig, M = transformation_monoid()
    assert not satisfies(M, parse_formula("x:M y:M |- mul(x,y) = mul(y,x)", sig), ALL_RULES)
    assert satisfies(M, parse_formula("x:M |- mul(x,one) = x", sig), ALL_RULES)


def test_model_check_reports():
    assert model_check(z2(), GROUPS).verified
    report = model_check(load_model("z4_identity_inverse.model", SIG), GROUPS)
    assert {e.instance for e in report.failures} == {"inv_r", "inv_l"}
    assert all(e.witness.startswith("input (1,)") for e in report.failures)
    keys = [(e.equation, e.instance) for e in report.entries]
    assert len(keys) == len(set(keys))


def test_contraction_only_sampler():
    sig = Signature(("A",), {"f": (("A", "A"), "A")})
    M = Prestructure.cartesian(sig, {"A": 2}, {"f": [0, 1, 1, 0]})
    M.delta[("A", "A")] = complete_structural(M, ("A", "A"), "contraction")
    M.symmetric = False
    report = sample_contraction_words(M)
    assert report.verified and report.note == SAMPLED_NOTE and report.entries
    rules = RuleSet(contraction=True)
    s = parse_sequent("x:A |- f(x,x) : A", sig)
    assert interpret(s, M, rules).payload == (0, 0)
    M2 = Prestructure.cartesian(sig, {"A": 2}, {"f": [0, 1, 1, 0]})
    M2.symmetric = False
    M2.delta["A"] = FIN.arrow((2,), (2, 2), [1, 2])  # x -> (x, 1-x): not coassociative
    assert not sample_contraction_words(M2).verified


def test_morphism_check():
    M = z2()
    ident = {"G": FIN.identity((2,))}
    assert check_morphism(ident, M, M, ALL_RULES).verified
    trivial = Prestructure.cartesian(SIG, {"G": 1}, {"mul": [0], "inv": [0], "e": [0]})
    assert check_morphism({"G": FIN.arrow((2,), (1,), [0, 0])}, M, trivial, ALL_RULES).verified
    const = {"G": FIN.arrow((2,), (2,), [1, 1])}
    assert not check_morphism(const, M, M, ALL_RULES).verified


def test_theory_signature_mismatch():
    with pytest.raises(E.SignatureMismatch):
        model_check(load_model("omega.model", CMI.signature), GROUPS)

import io
import re

import pytest

from algtheory import errors as E
from algtheory.calculus import ProofTree, check_derivation, check_proof, elaborate
from algtheory.cli import BAD_INPUT, NEGATIVE, OK, main
from algtheory.dsl import (fixture_names, format_derivation, format_proof, format_theory,
                           load_model, load_theory, parse_derivation, parse_model, parse_proof,
                           parse_sequent, parse_term, parse_theory, read_text)
from algtheory.structural import RuleSet
from algtheory.syntax import App, Formula, Var

from helpers import CMI, GROUPS, ProofGen, bounded_proofs, random_derivable, seeded

SIG = GROUPS.signature


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


# -- text formats ----------------------------------------------------------------------

def test_term_parsing():
    t = parse_term("mul(inv(x),e)", ["x"], SIG.constants)
    assert t == App("mul", (App("inv", (Var("x"),)), App("e")))
    with pytest.raises(E.ParseError):
        parse_term("mul(x,", ["x"], SIG.constants)
    with pytest.raises(E.ParseError):
        parse_sequent("x:G |- mul(inv(x),x : G", SIG)


def test_codomain_is_inferred():
    assert parse_sequent("x:G |- x * inv(x)", SIG).codomain == ("G", "G")
    assert str(parse_sequent("|- I", SIG)) == "|- I : I"


def test_theory_roundtrip():
    for name in fixture_names():
        if name.endswith(".thy"):
            theory = load_theory(name)
            again = parse_theory(format_theory(theory))
            assert format_theory(again) == format_theory(theory)
            assert again.axioms == theory.axioms


def test_theory_errors():
    with pytest.raises(E.ParseError):
        parse_theory("theory t\n")
    bad_type = "%theory v1\ntype A\nop f : A -> B\n"
    with pytest.raises(E.ParseError):
        parse_theory(bad_type)
    mismatch = "%theory v1\ntype A\ntype B\nop b : I -> B\naxiom x (x:A) : x = b\n"
    with pytest.raises(E.ParseError):
        parse_theory(mismatch)


def test_derivation_roundtrip():
    rng = seeded(9)
    for rules in RuleSet.all_subsets():
        for _ in range(30):
            s = random_derivable(rng, SIG, rules)
            d = elaborate(s, rules, SIG)
            text = format_derivation(d)
            again = parse_derivation(text, SIG)
            assert again == d
            assert format_derivation(again) == text
            assert check_derivation(again, rules, SIG) == s


def test_proof_roundtrip():
    gen = ProofGen(CMI, seeded(4))
    for p in bounded_proofs(gen, 40, 4):
        text = format_proof(p)
        again = parse_proof(text, CMI.signature)
        assert format_proof(again) == text
        assert check_proof(again, CMI) == check_proof(p, CMI)


def test_tree_errors():
    with pytest.raises(E.ParseError):
        parse_derivation("Variables :: x:G |- x : G\n", SIG)
    with pytest.raises(E.ParseError):
        parse_derivation("%derivation v1\n    Variables :: x:G |- x : G\n", SIG)
    with pytest.raises(E.ParseError):
        parse_derivation("%derivation v1\nWeakening position=a :: x:G |- x : G\n", SIG)


def test_model_errors():
    good = read_text("z2.model")
    assert load_model("z2.model", SIG).types == {"G": 2}
    with pytest.raises(E.ParseError):
        parse_model(good.replace("version: 1", "version: 7"), SIG)
    with pytest.raises(E.ParseError):
        parse_model("target: finfn\n: [", SIG)
    with pytest.raises(E.KernelError):
        parse_model(re.sub(r"inv: .*", "inv: [0, 1, 0]", good), SIG)
    with pytest.raises(E.KernelError):
        parse_model(good.replace("finfn", "mat zmod 4"), SIG)


# -- commands --------------------------------------------------------------------------

def test_check_command():
    code, out = run("check", "groups.thy", "--sequent", "x:G |- mul(inv(x),x) : G")
    assert code == OK and out.startswith("DERIVABLE under all")
    d = parse_derivation(out.split("\n", 1)[1], SIG)
    assert str(check_derivation(d, GROUPS.rules, SIG)) == "x:G |- mul(inv(x),x) : G"
    code, out = run("check", "counterexample.thy", "--sequent", "x:A |- x * x : A A")
    assert code == NEGATIVE and out.startswith("NOT DERIVABLE")
    assert run("check", "groups.thy", "--sequent", "x:G |- mul(x : G")[0] == BAD_INPUT
    assert run("check", "groups.thy", "--sequent", "x:G |- inv(x) : G G")[0] == BAD_INPUT
    assert run("check", "groups.thy", "--sequent", "x:G |- x : G", "--rules", "dup")[0] == \
        BAD_INPUT
    assert run("check", "no_such_theory.thy", "--sequent", "x:G |- x : G")[0] == BAD_INPUT
    assert run("bogus")[0] == BAD_INPUT


def test_check_derivation_command(tmp_path):
    d = elaborate(parse_sequent("x:G y:G |- mul(y,x) : G", SIG), GROUPS.rules, SIG)
    path = tmp_path / "swap.der"
    path.write_text(format_derivation(d))
    code, out = run("check-derivation", "groups.thy", str(path))
    assert (code, out.strip()) == (OK, "VERIFIED x:G y:G |- mul(y,x) : G")
    code, out = run("check-derivation", "groups.thy", str(path), "--rules", "weakening")
    assert code == NEGATIVE and out.startswith("FAIL RuleDisabled")


def test_factorize_command():
    code, out = run("factorize", "groups.thy", "--sequent", "x:G |- mul(inv(x),x) : G")
    assert code == OK
    assert out.splitlines() == ["structural: x:G |- x * x : G G",
                                "functional: v1:G v2:G |- mul(inv(v1),v2) : G"]
    code, _ = run("factorize", "groups.thy", "--rules", "weakening", "--sequent",
                  "x:G |- mul(inv(x),x) : G")
    assert code == NEGATIVE


def _normal_line(out):
    return [l for l in out.splitlines() if l.startswith("normal: ")][0][len("normal: "):]


def test_normalize_is_idempotent():
    rng = seeded(8)
    for rules in RuleSet.all_subsets():
        if rules.contraction_only:
            continue
        for _ in range(15):
            s = random_derivable(rng, SIG, rules)
            code, out = run("normalize", "groups.thy", "--rules", str(rules), "--sequent", str(s))
            assert code == OK
            first = _normal_line(out)
            code, again = run("normalize", "groups.thy", "--rules", str(rules),
                              "--sequent", first)
            assert code == OK and again == out


def test_normalize_contraction_only():
    code, out = run("normalize", "groups.thy", "--rules", "contraction", "--sequent",
                    "x:G |- mul(x,x) : G")
    assert code == OK
    assert "structural: v1:G |- v1 * v1 : G G" in out and "normal:" not in out


def test_eq_command():
    code, out = run("eq", "groups.thy", "--sequent", "a:G b:G |- mul(b,a) : G",
                    "--sequent", "x:G y:G |- mul(y,x) : G")
    assert (code, out.strip()) == (OK, "EQUAL")
    code, out = run("eq", "groups.thy", "--sequent", "a:G b:G |- mul(b,a) : G",
                    "--sequent", "x:G y:G |- mul(x,y) : G")
    assert (code, out.strip()) == (NEGATIVE, "NOT EQUAL")
    assert run("eq", "groups.thy", "--sequent", "x:G |- x : G")[0] == BAD_INPUT


def test_model_check_command():
    code, out = run("model-check", "groups.thy", "z2.model")
    assert code == OK and out.strip().endswith("PASS")
    code, out = run("model-check", "groups.thy", "hopf_z2_gf3.model")
    assert code == OK
    code, out = run("model-check", "groups.thy", "z2_broken.model")
    assert code == NEGATIVE
    failing = [l for l in out.splitlines() if l.startswith("FAIL ")]
    assert len(failing) == 3
    assert {l.split(":")[0] for l in failing[:2]} == {"FAIL axiom [inv_l]", "FAIL axiom [inv_r]"}
    assert all("input (0,)" in l for l in failing[:2])
    assert failing[2] == "FAIL (2 failing)"


def test_interpret_command():
    code, out = run("interpret", "groups.thy", "z2.model", "--sequent",
                    "x:G |- mul(inv(x),x) : G")
    assert (code, out.splitlines()) == (OK, ["(2,) -> (2,)", "0 0"])
    code, out = run("interpret", "groups.thy", "hopf_z2_gf3.model", "--sequent", "x:G |- I : I")
    assert (code, out.splitlines()) == (OK, ["(2,) -> ()", "1 1"])


def test_reconstruct_command():
    assert run("reconstruct", "--vars", "2", "--table", "0111") == (OK, "x1 v x2\n")
    assert run("reconstruct", "--vars", "1", "--table", "00") == (OK, "_|_ [dummy: x1]\n")
    assert run("reconstruct", "--vars", "2", "--table", "0110") == (NEGATIVE, "NOT REALIZABLE\n")
    assert run("reconstruct", "--vars", "2", "--table", "01")[0] == BAD_INPUT


def _write_proof(tmp_path, p):
    path = tmp_path / "p.proof"
    path.write_text(format_proof(p))
    return str(path)


def test_prove_check_command(tmp_path):
    ax = CMI.axiom("comm")
    leaf = ProofTree("Axiom", (), ax, axiom="comm")
    sym = ProofTree("Symmetry", (leaf,), Formula(ax.context, ax.right, ax.left, ax.codomain))
    code, out = run("prove-check", "cmi.thy", _write_proof(tmp_path, sym))
    assert code == OK and out.startswith("VERIFIED")

    invol = CMI.axiom("invol")
    contracted = ProofTree("Contraction", (ProofTree("Axiom", (), invol, axiom="invol"),),
                           invol, position=0, length=1)
    wrapped = ProofTree("Symmetry", (contracted,),
                        Formula(invol.context, invol.right, invol.left, invol.codomain))
    code, out = run("prove-check", "cmi.thy", _write_proof(tmp_path, wrapped))
    assert code == NEGATIVE and out.startswith("FAIL RuleDisabled at node 0:")

    wrong = ProofTree("Axiom", (), Formula(ax.context, ax.left, ax.left, ax.codomain),
                      axiom="comm")
    code, out = run("prove-check", "cmi.thy", _write_proof(tmp_path, wrong))
    assert code == NEGATIVE and out.startswith("FAIL UnknownAxiom")


def test_fixtures_command():
    code, out = run("fixtures")
    assert code == OK and "groups.thy" in out.split()

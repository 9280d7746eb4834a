"""Command-line interface.

Exit codes: 0 success, 1 a negative answer (not derivable, not equal, a
failed check, not realizable), 2 malformed input.
"""

from __future__ import annotations

import argparse
import sys

from . import errors as E
from .calculus import check_derivation, check_proof, elaborate, type_check
from .dsl import (fixture_names, format_derivation, load_model, load_theory, parse_derivation,
                  parse_proof, parse_sequent, read_text)
from .factor import factorize, functional_normal_form, normal_representative, term_eq
from .semantics import interpret, model_check
from .structural import RuleSet, structural_normal_form
from .syntax import format_types
from .truthvalues import TruthTable, reconstruct

OK, NEGATIVE, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _theory_and_rules(args):
    theory = load_theory(args.theory)
    rules = RuleSet.parse(args.rules) if getattr(args, "rules", None) else theory.rules
    return theory, rules


def _sequent(text, sig):
    s = parse_sequent(text, sig)
    type_check(s, sig)
    return s


def cmd_check(args, out):
    theory, rules = _theory_and_rules(args)
    s = _sequent(args.sequent, theory.signature)
    d = elaborate(s, rules, theory.signature)
    if d is None:
        print(f"NOT DERIVABLE under {rules}: {s}", file=out)
        return NEGATIVE
    check_derivation(d, rules, theory.signature)
    print(f"DERIVABLE under {rules}: {s}", file=out)
    print(format_derivation(d), end="", file=out)
    return OK


def cmd_check_derivation(args, out):
    theory, rules = _theory_and_rules(args)
    d = parse_derivation(read_text(args.derivation), theory.signature)
    try:
        c = check_derivation(d, rules, theory.signature)
    except E.KernelError as exc:
        print(f"FAIL {exc}", file=out)
        return NEGATIVE
    print(f"VERIFIED {c}", file=out)
    return OK


def _not_derivable(s, rules, out):
    print(f"NOT DERIVABLE under {rules}: {s}", file=out)
    return NEGATIVE


def cmd_factorize(args, out):
    theory, rules = _theory_and_rules(args)
    s = _sequent(args.sequent, theory.signature)
    try:
        f = factorize(s, rules, theory.signature)
    except E.NotDerivable:
        return _not_derivable(s, rules, out)
    print(f"structural: {f.structural_sequent()}", file=out)
    print(f"functional: {f.functional}", file=out)
    return OK


def cmd_normalize(args, out):
    theory, rules = _theory_and_rules(args)
    sig = theory.signature
    s = _sequent(args.sequent, sig)
    try:
        f = factorize(s, rules, sig)
    except E.NotDerivable:
        return _not_derivable(s, rules, out)
    if rules.contraction_only:
        print(f"structural: {f.structural.as_sequent()}", file=out)
    else:
        snf = structural_normal_form(f.structural, rules)
        print(f"weakening: {snf.weakening.as_sequent()}", file=out)
        print(f"contraction: {snf.contraction.as_sequent()}", file=out)
        print(f"exchange: {snf.exchange.as_sequent()}", file=out)
    form = functional_normal_form(f.functional, sig)
    print(f"domain: {format_types(form.domain)}", file=out)
    for j, layer in enumerate(form.layers, 1):
        print(f"layer {j}: {' '.join(str(slot) for slot in layer)}", file=out)
    if not rules.contraction_only:
        print(f"normal: {normal_representative(s, rules, sig)}", file=out)
    return OK


def cmd_eq(args, out):
    theory, rules = _theory_and_rules(args)
    if len(args.sequent) != 2:
        raise InputError("eq takes exactly two --sequent arguments")
    s1, s2 = (_sequent(t, theory.signature) for t in args.sequent)
    try:
        same = term_eq(s1, s2, rules, theory.signature)
    except E.NotDerivable as exc:
        print(f"NOT DERIVABLE: {exc.args[0]}", file=out)
        return NEGATIVE
    except E.SignatureMismatch as exc:
        print(f"NOT EQUAL: {exc.args[0]}", file=out)
        return NEGATIVE
    print("EQUAL" if same else "NOT EQUAL", file=out)
    return OK if same else NEGATIVE


def cmd_model_check(args, out):
    theory = load_theory(args.theory)
    M = load_model(args.model, theory.signature)
    report = model_check(M, theory)
    print(report.render(), file=out)
    return OK if report.verified else NEGATIVE


def cmd_interpret(args, out):
    theory, rules = _theory_and_rules(args)
    M = load_model(args.model, theory.signature)
    s = _sequent(args.sequent, theory.signature)
    try:
        arrow = interpret(s, M, rules)
    except E.NotDerivable:
        return _not_derivable(s, rules, out)
    except E.StructureUnverified as exc:
        print(f"FAIL {exc}", file=out)
        return NEGATIVE
    print(f"{arrow.dom} -> {arrow.cod}", file=out)
    payload = arrow.payload
    if payload and isinstance(payload[0], tuple):
        for row in payload:
            print(" ".join(str(x) for x in row), file=out)
    else:
        print(" ".join(str(x) for x in payload), file=out)
    return OK


def cmd_reconstruct(args, out):
    tab = TruthTable.from_bits(args.vars, args.table)
    r = reconstruct(tab)
    if r is None:
        print("NOT REALIZABLE", file=out)
        return NEGATIVE
    print(r, file=out)
    return OK


def cmd_prove_check(args, out):
    theory = load_theory(args.theory)
    p = parse_proof(read_text(args.proof), theory.signature)
    try:
        phi = check_proof(p, theory)
    except E.KernelError as exc:
        print(f"FAIL {exc}", file=out)
        return NEGATIVE
    print(f"VERIFIED {phi}", file=out)
    return OK


def cmd_fixtures(args, out):
    for name in fixture_names():
        print(name, file=out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="algtheory",
                                     description="Algebraic theories with chosen structural rules.")
    sub = parser.add_subparsers(dest="command", required=True)

    def theory_cmd(name, func, help_text, sequents=0, rules=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("theory", help="theory file, or the name of a bundled fixture")
        if rules:
            p.add_argument("--rules", help="override the theory's structural rules")
        if sequents == 1:
            p.add_argument("--sequent", required=True, help="e.g. 'x:G |- mul(inv(x),x) : G'")
        elif sequents == 2:
            p.add_argument("--sequent", action="append", required=True,
                           help="given twice")
        p.set_defaults(func=func)
        return p

    theory_cmd("check", cmd_check, "elaborate a sequent and print its derivation", 1)
    p = theory_cmd("check-derivation", cmd_check_derivation, "verify a derivation file")
    p.add_argument("derivation")
    theory_cmd("factorize", cmd_factorize, "structural and functional factors", 1)
    theory_cmd("normalize", cmd_normalize, "structural normal form and layered form", 1)
    theory_cmd("eq", cmd_eq, "equality of two terms as arrows of the free category", 2)
    p = theory_cmd("model-check", cmd_model_check, "structure equations and axioms in a model",
                   rules=False)
    p.add_argument("model", help="model file, or the name of a bundled fixture")
    p = theory_cmd("interpret", cmd_interpret, "interpret a sequent in a model", 1)
    p.add_argument("model")
    p = theory_cmd("prove-check", cmd_prove_check, "verify a proof file", rules=False)
    p.add_argument("proof")
    p = sub.add_parser("reconstruct", help="canonical join/negation term from a truth table")
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--table", required=True, help="bitstring, variable 1 slowest")
    p.set_defaults(func=cmd_reconstruct)
    p = sub.add_parser("fixtures", help="list bundled theories and models")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return args.func(args, out)
    except (E.KernelError, InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())

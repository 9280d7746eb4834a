"""Text formats: theories, sequents, formulas, model files, derivation and
proof trees.

Terms use ``f(t,...,t)`` for application, ``*`` for the tensor and ``I``
for the empty term.  A bare identifier is a variable when the surrounding
context declares it, and a nullary constant otherwise.
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

import yaml

from . import errors as E
from .calculus import Derivation, ProofTree, Signature, Theory, infer_type
from .categories import FinFn, MatSemiring, semiring_from_name
from .semantics import Prestructure
from .structural import RuleSet
from .syntax import (EMPTY, App, Context, Formula, Sequent, Var, format_types, tensor)

THEORY_HEADER = "%theory v1"
DERIVATION_HEADER = "%derivation v1"
PROOF_HEADER = "%proof v1"
MODEL_VERSION = 1

_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_']*)|(.))")


# -- terms -------------------------------------------------------------------------

def _tokens(text: str) -> list:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        ident, sym = m.group(1), m.group(2)
        if sym is not None and sym not in "(),*":
            raise E.ParseError(f"unexpected character {sym!r} in {text!r}")
        out.append(ident or sym)
        pos = m.end()
    return out


def parse_term(text: str, variables=(), constants=()):
    variables, constants = set(variables), set(constants)
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise E.ParseError(f"expected {expected or 'a term'} in {text!r}")
        pos += 1
        return tok

    def atom():
        tok = take()
        if tok == "I":
            return EMPTY
        if not re.match(r"[A-Za-z_]", tok):
            raise E.ParseError(f"unexpected {tok!r} in {text!r}")
        if peek() == "(":
            take("(")
            args = []
            if peek() != ")":
                args.append(atom())
                while peek() == ",":
                    take(",")
                    args.append(atom())
            take(")")
            return App(tok, tuple(args))
        if tok in constants and tok not in variables:
            return App(tok)
        return Var(tok)

    if not toks:
        raise E.ParseError("empty term")
    factors = [atom()]
    while peek() == "*":
        take("*")
        factors.append(atom())
    if pos != len(toks):
        raise E.ParseError(f"trailing input {toks[pos]!r} in {text!r}")
    return tensor(*factors)


def parse_types(text: str) -> tuple:
    words = text.split()
    if words == ["I"]:
        return ()
    for w in words:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", w) or w == "I":
            raise E.ParseError(f"bad type name {w!r}")
    return tuple(words)


def parse_context(text: str) -> Context:
    entries = []
    for item in text.split():
        name, sep, typ = item.partition(":")
        if not sep or not name or not typ:
            raise E.ParseError(f"context entries look like x:A, got {item!r}")
        entries.append((name, typ))
    try:
        return Context(tuple(entries))
    except E.ContextClash as exc:
        raise E.ParseError(str(exc.args[0])) from None


def _split_judgement(text: str):
    if "|-" not in text:
        raise E.ParseError(f"missing '|-' in {text!r}")
    ctx_text, _, rest = text.partition("|-")
    body, sep, cod = rest.rpartition(":")
    if not sep:
        body, cod = rest, None
    return parse_context(ctx_text), body.strip(), cod


def parse_sequent(text: str, sig: Signature) -> Sequent:
    """``x:A y:B |- t : C`` (the codomain may be omitted)."""
    ctx, body, cod = _split_judgement(text)
    term = parse_term(body, ctx.names, sig.constants)
    if cod is None:
        codomain = infer_type(term, dict(ctx.entries), sig)
    else:
        codomain = parse_types(cod)
    return Sequent(ctx, term, codomain)


def parse_formula(text: str, sig: Signature) -> Formula:
    """``x:A |- l = r : C`` (the codomain may be omitted)."""
    ctx, body, cod = _split_judgement(text)
    if body.count("=") != 1:
        raise E.ParseError(f"a formula has exactly one '=': {text!r}")
    left, right = (parse_term(s, ctx.names, sig.constants) for s in body.split("="))
    if cod is None:
        codomain = infer_type(left, dict(ctx.entries), sig)
    else:
        codomain = parse_types(cod)
    return Formula(ctx, left, right, codomain)


# -- theories ------------------------------------------------------------------------

def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def _expect_header(text: str, header: str):
    for _, line in _lines(text):
        if line != header:
            raise E.ParseError(f"expected header {header!r}, got {line!r}")
        return
    raise E.ParseError(f"empty file, expected header {header!r}")


def parse_theory(text: str) -> Theory:
    _expect_header(text, THEORY_HEADER)
    name, rules, types, ops, axiom_lines = "theory", RuleSet(), [], {}, []
    for n, line in list(_lines(text))[1:]:
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "theory":
                name = rest
            elif word == "rules":
                rules = RuleSet.parse(rest)
            elif word == "type":
                types.extend(parse_types(rest))
            elif word == "op":
                op, _, arity = rest.partition(":")
                args, arrow, res = arity.partition("->")
                if not arrow or len(parse_types(res)) != 1:
                    raise E.ParseError("ops look like: op f : A B -> C")
                ops[op.strip()] = (parse_types(args), parse_types(res)[0])
            elif word == "axiom":
                axiom_lines.append((n, rest))
            else:
                raise E.ParseError(f"unknown declaration {word!r}")
        except (E.ParseError, ValueError) as exc:
            raise E.ParseError(f"line {n}: {exc}") from None
    try:
        sig = Signature(tuple(types), ops)
    except ValueError as exc:
        raise E.ParseError(str(exc)) from None
    axioms = []
    for n, rest in axiom_lines:
        m = re.fullmatch(r"(\S+)\s*\(([^)]*)\)\s*:(.*)", rest)
        if not m:
            raise E.ParseError(f"line {n}: axioms look like: axiom name (x:A ...) : l = r")
        try:
            phi = parse_formula(f"{m.group(2)} |- {m.group(3)}", sig)
            right_type = infer_type(phi.right, dict(phi.context.entries), sig)
        except E.KernelError as exc:
            raise E.ParseError(f"line {n}: {exc}") from None
        if right_type != phi.codomain:
            raise E.ParseError(f"line {n}: sides of {m.group(1)} have different types")
        axioms.append((m.group(1), phi))
    theory = Theory(name, sig, rules, tuple(axioms))
    try:
        theory.validate()
    except E.KernelError as exc:
        raise E.ParseError(str(exc)) from None
    return theory


def format_theory(theory: Theory) -> str:
    sig = theory.signature
    lines = [THEORY_HEADER, f"theory {theory.name}", f"rules {theory.rules}"]
    lines += [f"type {a}" for a in sig.types]
    for name, (args, res) in sig.constants.items():
        lines.append(f"op {name} : {format_types(args)} -> {res}")
    for name, phi in theory.axioms:
        lines.append(f"axiom {name} ({phi.context}) : {phi.left} = {phi.right}")
    return "\n".join(lines) + "\n"


# -- trees -----------------------------------------------------------------------------

def _format_node(rule, fields, judgement):
    parts = [rule]
    for key, value in fields:
        if value is None:
            continue
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        parts.append(f"{key}={value}")
    return f"{' '.join(parts)} :: {judgement}"


def format_derivation(d: Derivation) -> str:
    lines = [DERIVATION_HEADER]

    def walk(node, depth):
        fields = [("const", node.const), ("position", node.position),
                  ("length", node.length), ("perm", node.perm)]
        lines.append("  " * depth + _format_node(node.rule, fields, node.conclusion))
        for p in node.premises:
            walk(p, depth + 1)

    walk(d, 0)
    return "\n".join(lines) + "\n"


def format_proof(p: ProofTree) -> str:
    lines = [PROOF_HEADER]

    def walk(node, depth):
        fields = [("axiom", node.axiom), ("position", node.position),
                  ("length", node.length), ("perm", node.perm)]
        lines.append("  " * depth + _format_node(node.rule, fields, node.conclusion))
        for q in node.premises:
            walk(q, depth + 1)

    walk(p, 0)
    return "\n".join(lines) + "\n"


def _parse_tree(text: str, header: str, make):
    _expect_header(text, header)
    rows = []
    for n, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.strip().startswith("#") or raw.strip() == header:
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        if indent % 2:
            raise E.ParseError(f"line {n}: indentation must be a multiple of two spaces")
        head, sep, judgement = raw.strip().partition(" :: ")
        if not sep:
            raise E.ParseError(f"line {n}: nodes look like 'Rule key=value :: judgement'")
        words = head.split()
        fields = {}
        for w in words[1:]:
            key, eq, value = w.partition("=")
            if not eq:
                raise E.ParseError(f"line {n}: bad field {w!r}")
            fields[key] = value
        rows.append((n, indent // 2, words[0], fields, judgement))
    if not rows:
        raise E.ParseError("no nodes")

    pos = 0

    def build(depth):
        nonlocal pos
        n, d, rule, fields, judgement = rows[pos]
        if d != depth:
            raise E.ParseError(f"line {n}: unexpected indentation")
        pos += 1
        premises = []
        while pos < len(rows) and rows[pos][1] > depth:
            premises.append(build(depth + 1))
        try:
            return make(rule, tuple(premises), fields, judgement)
        except (ValueError, E.KernelError) as exc:
            raise E.ParseError(f"line {n}: {exc}") from None

    root = build(0)
    if pos != len(rows):
        raise E.ParseError(f"line {rows[pos][0]}: more than one root")
    return root


def _int(fields, key):
    return int(fields[key]) if key in fields else None


def _perm(fields):
    if "perm" not in fields:
        return None
    text = fields["perm"]
    return tuple(int(v) for v in text.split(",")) if text else ()


def parse_derivation(text: str, sig: Signature) -> Derivation:
    def make(rule, premises, fields, judgement):
        return Derivation(rule, premises, parse_sequent(judgement, sig), const=fields.get("const"),
                          position=_int(fields, "position"), length=_int(fields, "length"),
                          perm=_perm(fields))
    return _parse_tree(text, DERIVATION_HEADER, make)


def parse_proof(text: str, sig: Signature) -> ProofTree:
    def make(rule, premises, fields, judgement):
        return ProofTree(rule, premises, parse_formula(judgement, sig), axiom=fields.get("axiom"),
                         position=_int(fields, "position"), length=_int(fields, "length"),
                         perm=_perm(fields))
    return _parse_tree(text, PROOF_HEADER, make)


# -- models ------------------------------------------------------------------------------

def _type_key(key) -> tuple:
    return tuple(str(key).split())


def parse_model(text: str, sig: Signature) -> Prestructure:
    """A YAML model file for the given signature."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise E.ParseError(f"model file is not YAML: {exc}") from None
    if not isinstance(data, dict):
        raise E.ParseError("model file must be a mapping")
    if data.get("version") != MODEL_VERSION:
        raise E.ParseError(f"model files need 'version: {MODEL_VERSION}'")
    target_text = str(data.get("target", ""))
    words = target_text.split()
    try:
        if words == ["finfn"]:
            cat = FinFn()
        elif words and words[0] == "mat":
            cat = MatSemiring(semiring_from_name(" ".join(words[1:])))
        else:
            raise E.ParseError(f"unknown target {target_text!r}")
        types = {str(k): int(v) for k, v in (data.get("types") or {}).items()}
        M = Prestructure(sig, cat, types, {}, name=str(data.get("name", "")))
        if data.get("cartesian"):
            if not isinstance(cat, FinFn):
                raise E.ParseError("'cartesian' is only available for finfn targets")
            M = Prestructure.cartesian(sig, types, data.get("ops") or {}, name=M.name)
        else:
            for name, payload in (data.get("ops") or {}).items():
                args, res = sig.arity(str(name))
                M.ops[str(name)] = cat.arrow(M.obj(args), M.obj([res]), payload)
        for key, payload in (data.get("pi") or {}).items():
            a = str(key)
            M.pi[a] = cat.arrow(M.obj([a]), (), payload)
        for key, payload in (data.get("delta") or {}).items():
            block = _type_key(key)
            target_key = block[0] if len(block) == 1 else block
            M.delta[target_key] = cat.arrow(M.obj(block), M.obj(block + block), payload)
        for key, payload in (data.get("tau") or {}).items():
            pair = _type_key(key)
            if len(pair) != 2:
                raise E.ParseError(f"tau keys name two types, got {key!r}")
            a, b = pair
            M.tau[(a, b)] = cat.arrow(M.obj([b, a]), M.obj([a, b]), payload)
        if data.get("symmetric"):
            M.symmetric = True
    except (KeyError, TypeError, ValueError) as exc:
        raise E.ParseError(f"bad model file: {exc}") from None
    except E.KernelError as exc:
        if isinstance(exc, E.ParseError):
            raise
        raise E.ParseError(f"bad model file: {exc}") from None
    for c in sig.constants:
        if c not in M.ops:
            raise E.ParseError(f"model gives no arrow for {c}")
    return M


# -- bundled files ------------------------------------------------------------------------

def fixture_names() -> list:
    root = resources.files("algtheory") / "fixtures"
    return sorted(p.name for p in root.iterdir() if not p.name.startswith("_"))


def read_text(name_or_path: str) -> str:
    """Read a file, falling back to a bundled fixture of that name."""
    p = Path(name_or_path)
    if p.exists():
        return p.read_text()
    res = resources.files("algtheory") / "fixtures" / name_or_path
    if res.is_file():
        return res.read_text()
    raise E.ParseError(f"no such file or bundled fixture: {name_or_path}")


def load_theory(name_or_path: str) -> Theory:
    return parse_theory(read_text(name_or_path))


def load_model(name_or_path: str, sig: Signature) -> Prestructure:
    return parse_model(read_text(name_or_path), sig)

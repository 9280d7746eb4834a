"""Structural factorisation, substitution elimination, layered normal forms,
and equality of arrows in the free classifying category."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from . import errors as E
from .calculus import (Derivation, Signature, check_derivation, elaborate, occurrence_arrow,
                       type_check)
from .structural import RuleSet, TypedStructuralArrow, structural_normal_form
from .syntax import (App, Context, Sequent, Var, atoms, canonical_names, canonical_rename,
                     occurrences, relabel_occurrences, substitute, tensor)


@dataclass(frozen=True)
class Factorisation:
    """``structural`` followed by ``functional`` (canonically named)."""
    structural: TypedStructuralArrow
    functional: Sequent
    source_names: tuple = field(default=(), compare=False)

    def structural_sequent(self, names=None) -> Sequent:
        if names is None:
            names = self.source_names or None
        return self.structural.as_sequent(names)

    def recompose(self, names=None) -> Sequent:
        outer = self.structural_sequent(names)
        term = substitute(self.functional.term, atoms(outer.term), self.functional.context.names)
        return Sequent(outer.context, term, self.functional.codomain)


def _require_derivable(s, rules, sig):
    if elaborate(s, rules, sig) is None:
        raise E.NotDerivable(f"{s} is not derivable under {rules}")


def factorize(s: Sequent, rules: RuleSet, sig: Signature) -> Factorisation:
    _require_derivable(s, rules, sig)
    arrow = occurrence_arrow(s)
    names = canonical_names(len(arrow.target))
    functional = Sequent(Context.of(names, arrow.target), relabel_occurrences(s.term, names),
                         s.codomain)
    return Factorisation(arrow, functional, tuple(s.context.names))


def eliminate_substitution(d: Derivation, rules: RuleSet, sig: Signature) -> Derivation:
    """A Substitution-free derivation of the conclusion of ``d``.

    The replacement is assembled from the factorisation of the conclusion:
    functional rules first, structural rules after.
    """
    conclusion = check_derivation(d, rules, sig)
    if not d.uses("Substitution"):
        return d
    out = elaborate(conclusion, rules, sig)
    assert out is not None
    return out


# -- layered normal form of functional terms ---------------------------------

@dataclass(frozen=True)
class Identity:
    type: str

    def __str__(self):
        return f"id:{self.type}"


@dataclass(frozen=True)
class Apply:
    const: str

    def __str__(self):
        return self.const


Slot = Union[Identity, Apply]


@dataclass(frozen=True)
class LayeredForm:
    domain: tuple
    layers: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "layers", tuple(tuple(l) for l in self.layers))

    def layer_types(self, sig: Signature) -> list:
        """``[(input types, output types)]`` per layer; raises if they do not chain."""
        out = []
        current = self.domain
        for j, layer in enumerate(self.layers, 1):
            dom, cod = (), ()
            for slot in layer:
                if isinstance(slot, Identity):
                    dom += (slot.type,)
                    cod += (slot.type,)
                else:
                    args, res = sig.arity(slot.const)
                    dom += args
                    cod += (res,)
            if dom != current:
                raise E.TermTypeError(f"layer {j} expects {dom}, receives {current}")
            if not any(isinstance(s, Apply) for s in layer):
                raise E.MalformedNode(f"layer {j} applies no constant")
            out.append((dom, cod))
            current = cod
        return out

    def codomain(self, sig: Signature) -> tuple:
        types = self.layer_types(sig)
        return types[-1][1] if types else self.domain

    def to_sequent(self, sig: Signature) -> Sequent:
        names = canonical_names(len(self.domain))
        wires = [Var(n) for n in names]
        self.layer_types(sig)
        for layer in self.layers:
            nxt, k = [], 0
            for slot in layer:
                if isinstance(slot, Identity):
                    nxt.append(wires[k])
                    k += 1
                else:
                    n = len(sig.arity(slot.const)[0])
                    nxt.append(App(slot.const, tuple(wires[k:k + n])))
                    k += n
            wires = nxt
        return Sequent(Context.of(names, self.domain), tensor(*wires), self.codomain(sig))


def _height(t) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max((_height(a) for a in t.args), default=0)


def functional_normal_form(phi: Sequent, sig: Signature) -> LayeredForm:
    """Layered normal form of a purely functional sequent.

    Every constant sits at the stage fixed by its distance from the root of
    its component, so all roots land on the last layer; shorter components
    are padded with identities on the domain side.
    """
    if occurrences(phi.term) != list(phi.context.names):
        raise E.NotPurelyFunctional(f"{phi} does not use its variables once each, in order")
    type_check(phi, sig)
    types = dict(phi.context.entries)
    roots = atoms(phi.term)
    m = max((_height(t) for t in roots), default=0)

    def out_type(t):
        return types[t.name] if isinstance(t, Var) else sig.arity(t.const)[1]

    def slots(t, depth, j):
        birth = 0 if isinstance(t, Var) else m - depth
        if birth == j:
            return [Apply(t.const)]
        if birth < j:
            return [Identity(out_type(t))]
        out = []
        for a in t.args:
            out.extend(slots(a, depth + 1, j))
        return out

    layers = []
    for j in range(1, m + 1):
        layer = []
        for t in roots:
            layer.extend(slots(t, 0, j))
        layers.append(tuple(layer))
    form = LayeredForm(phi.context.types, tuple(layers))
    assert form.to_sequent(sig) == canonical_rename(phi)
    return form


# -- equality in the free classifying category ---------------------------------

def _shape_check(s1: Sequent, s2: Sequent):
    if s1.context.types != s2.context.types or s1.codomain != s2.codomain:
        raise E.SignatureMismatch(f"{s1} and {s2} are not parallel arrows")


def term_eq(s1: Sequent, s2: Sequent, rules: RuleSet, sig: Signature) -> bool:
    """Whether two derivable sequents denote the same arrow.

    Structural parts are compared as typed functions and functional parts up
    to alphabetical variance; this works for every rule set.
    """
    _shape_check(s1, s2)
    return factorize(s1, rules, sig) == factorize(s2, rules, sig)


def normal_form(s: Sequent, rules: RuleSet, sig: Signature):
    """``(StructuralNormalForm, LayeredForm)`` of a derivable sequent."""
    f = factorize(s, rules, sig)
    return structural_normal_form(f.structural, rules), functional_normal_form(f.functional, sig)


def normal_representative(s: Sequent, rules: RuleSet, sig: Signature) -> Sequent:
    """The sequent rebuilt from its normal form, canonically named."""
    snf, form = normal_form(s, rules, sig)
    phi = form.to_sequent(sig)
    outer = snf.compose().as_sequent()
    term = substitute(phi.term, atoms(outer.term), phi.context.names)
    return Sequent(outer.context, term, phi.codomain)

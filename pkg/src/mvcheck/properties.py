"""Multi-valued linear-time properties and their lasso-level evaluators.

Formula-based kinds (invariant, persistence, dual persistence) take an
mv-formula.  Automaton-based kinds take a deterministic automaton: a DFA for
the good prefixes of a regular safety property, a Rabin automaton for an
omega-regular property, or a deterministic Buchi automaton for either the
property or its negation.

Property file format (JSON)::

    {"kind": "invariant", "lattice": "l3", "ap": ["b", "p"],
     "formula": "b -> p"}
    {"kind": "regular-safety", "lattice": "l3", "ap": ["b", "p"],
     "automaton": "gpref.dfa.json"}            # path or inline object

Kinds: invariant, persistence, dual-persistence, regular-safety,
omega-regular, omega-regular-neg-det (automaton for the negation) and
omega-regular-det (deterministic Buchi automaton for the property itself).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from . import graphs
from ._io import load_source, require
from .automata import (MvBuchi, MvDFA, MvRabin, deterministic_parts, load_automaton,
                       omega_degree, powerset_alphabet, word_degree)
from .errors import AlphabetMismatchError, FormatError, ModelError
from .lattice import load_lattice
from .mvcore import MvFormula


def _check_alphabet(automaton, ap):
    if set(automaton.alphabet) != set(powerset_alphabet(ap)):
        raise AlphabetMismatchError("automaton alphabet must be the set of all subsets of the propositions")


@dataclass(frozen=True, eq=False)
class _FormulaProperty:
    formula: MvFormula

    @property
    def lattice(self):
        return self.formula.lattice

    @property
    def ap(self):
        return self.formula.ap

    def best_letter_value(self):
        """Join of the formula over all letters."""
        return self.lattice.join_all(self.formula.evaluate(a) for a in powerset_alphabet(self.ap))


class Invariant(_FormulaProperty):
    kind = "invariant"


class Persistence(_FormulaProperty):
    kind = "persistence"


class DualPersistence(_FormulaProperty):
    kind = "dual-persistence"


@dataclass(frozen=True, eq=False)
class _AutomatonProperty:
    automaton: object
    ap: tuple

    def __post_init__(self):
        object.__setattr__(self, "ap", tuple(self.ap))
        _check_alphabet(self.automaton, self.ap)

    @property
    def lattice(self):
        return self.automaton.lattice


class RegularSafety(_AutomatonProperty):
    """Safety property given by a deterministic automaton for its good prefixes."""

    kind = "regular-safety"

    def __post_init__(self):
        if not isinstance(self.automaton, MvDFA):
            raise ModelError("regular safety needs a deterministic finite automaton")
        super().__post_init__()


class OmegaRegular(_AutomatonProperty):
    """Property recognized by a deterministic Rabin automaton."""

    kind = "omega-regular"

    def __post_init__(self):
        if not isinstance(self.automaton, MvRabin):
            raise ModelError("omega-regular property needs a Rabin automaton")
        super().__post_init__()

    @cached_property
    def _gpref(self):
        A = self.automaton
        return _best_continuation(A.lattice, A.states, lambda q: {A.step(q, a) for a in A.alphabet},
                                  lambda m: [(frozenset(A.states) - H, K) for H, K in A.pairs_at(m)])


class OmegaRegularNegDet(_AutomatonProperty):
    """Property whose negation is recognized by a deterministic Buchi automaton."""

    kind = "omega-regular-neg-det"

    def __post_init__(self):
        if not isinstance(self.automaton, MvBuchi) or not self.automaton.is_deterministic:
            raise ModelError("the automaton for the negated property must be a deterministic Buchi automaton")
        super().__post_init__()

    @cached_property
    def completed(self):
        """``(q0, delta, states)`` with missing moves sent to a sink of final value bottom."""
        return deterministic_parts(self.automaton)

    def negated_final(self, q):
        """Value ``~final(q)`` a state contributes to the property when visited infinitely often."""
        return ~self.automaton.final_value(q)

    @cached_property
    def _gpref(self):
        A = self.automaton
        _, delta, states = self.completed
        return _best_continuation(
            A.lattice, states, lambda q: {delta[(q, a)] for a in A.alphabet},
            lambda m: [(frozenset(q for q in states if self.negated_final(q) >= m), frozenset(states))])


class OmegaRegularDet(_AutomatonProperty):
    """Property recognized by a deterministic Buchi automaton."""

    kind = "omega-regular-det"

    def __post_init__(self):
        if not isinstance(self.automaton, MvBuchi) or not self.automaton.is_deterministic:
            raise ModelError("omega-regular-det needs a deterministic Buchi automaton")
        super().__post_init__()

    @cached_property
    def completed(self):
        return deterministic_parts(self.automaton)

    @cached_property
    def _gpref(self):
        A = self.automaton
        _, delta, states = self.completed
        return _best_continuation(
            A.lattice, states, lambda q: {delta[(q, a)] for a in A.alphabet},
            lambda m: [(frozenset(states), frozenset(q for q in A.states if A.final_value(q) >= m))])


def as_recognized(P):
    """Read a negated-property automaton as recognizing the property itself."""
    if not isinstance(P, OmegaRegularNegDet):
        raise ModelError("only omega-regular-neg-det properties can be reinterpreted")
    return OmegaRegularDet(P.automaton, P.ap)


def _best_continuation(lattice, states, succ, conditions):
    """Per state, the best value any infinite continuation can reach.

    ``conditions(m)`` lists ``(allowed, required)`` pairs: the ``m``-cut is
    reachable from ``q`` when some cycle stays within ``allowed`` and meets
    ``required``.
    """
    best = {q: lattice.bottom for q in states}
    for m in lattice.join_irreducibles:
        targets = set()
        for allowed, required in conditions(m):
            def inner(q, allowed=allowed):
                return [p for p in succ(q) if p in allowed]
            for comp in graphs.tarjan_scc([q for q in states if q in allowed], inner):
                if graphs.nontrivial(comp, inner) and any(q in required for q in comp):
                    targets.update(comp)
        if not targets:
            continue
        back = {q: [] for q in states}
        for q in states:
            for p in succ(q):
                back[p].append(q)
        for q in graphs.reachable(targets, lambda p: back[p]):
            best[q] = best[q] | m
    return best


def _dfa_states_along(step, q0, w):
    """States after every prefix of lasso ``w`` (including the empty prefix)."""
    seen = set()
    out = []
    q, i = q0, 0
    while (q, i) not in seen:
        seen.add((q, i))
        out.append(q)
        q = step(q, w.letter(i))
        i = w.next(i)
    return out


def property_degree(P, w):
    """Degree of the lasso word ``w`` in the property ``P``."""
    lat = P.lattice
    if isinstance(P, Invariant):
        return lat.meet_all(P.formula.evaluate(a) for a in w.stem + w.cycle)
    if isinstance(P, Persistence):
        return lat.meet_all(P.formula.evaluate(a) for a in w.cycle)
    if isinstance(P, DualPersistence):
        return lat.join_all(P.formula.evaluate(a) for a in w.cycle)
    A = P.automaton
    if isinstance(P, RegularSafety):
        return lat.meet_all(A.final_value(q) for q in _dfa_states_along(A.step, A.q0, w))
    if isinstance(P, OmegaRegular):
        return omega_degree(A, w)
    if isinstance(P, OmegaRegularNegDet):
        return ~omega_degree(A, w)
    if isinstance(P, OmegaRegularDet):
        return omega_degree(A, w)
    raise ModelError(f"unsupported property {P!r}")


def good_prefix_degree(P, word):
    """Best degree any infinite continuation of the finite ``word`` can achieve."""
    word = tuple(word)
    lat = P.lattice
    if isinstance(P, Invariant):
        return lat.meet_all(P.formula.evaluate(a) for a in word) & P.best_letter_value()
    if isinstance(P, (Persistence, DualPersistence)):
        return P.best_letter_value()
    A = P.automaton
    if isinstance(P, RegularSafety):
        return word_degree(A, word)
    if isinstance(P, OmegaRegular):
        q = A.q0
        for a in word:
            q = A.step(q, a)
        return P._gpref[q]
    if isinstance(P, (OmegaRegularNegDet, OmegaRegularDet)):
        q0, delta, _ = P.completed
        q = q0
        for a in word:
            A.check_letter(a)
            q = delta[(q, a)]
        return P._gpref[q]
    raise ModelError(f"unsupported property {P!r}")


def closure_degree(P, w):
    """Meet of the good-prefix degrees over all prefixes of the lasso ``w``."""
    lat = P.lattice
    if isinstance(P, Invariant):
        # every prefix value is a meet over its letters, so the infimum sees each letter once
        return lat.meet_all(P.formula.evaluate(a) for a in w.letters()) & P.best_letter_value()
    if isinstance(P, RegularSafety):
        # prefix values are final values of the states along the run, which
        # repeats once a (state, position) pair does
        A = P.automaton
        return lat.meet_all(A.final_value(q) for q in _dfa_states_along(A.step, A.q0, w))
    if isinstance(P, (Persistence, DualPersistence)):
        return P.best_letter_value()
    A = P.automaton
    if isinstance(P, OmegaRegular):
        return lat.meet_all(P._gpref[q] for q in _dfa_states_along(A.step, A.q0, w))
    if isinstance(P, (OmegaRegularNegDet, OmegaRegularDet)):
        q0, delta, _ = P.completed
        for a in w.letters():
            A.check_letter(a)
        step = lambda q, a: delta[(q, a)]  # noqa: E731
        return lat.meet_all(P._gpref[q] for q in _dfa_states_along(step, q0, w))
    raise ModelError(f"unsupported property {P!r}")


def safety_liveness_split(P, w):
    """``(safe, live)`` degrees of ``w``; their meet is ``property_degree(P, w)``.

    The safety part is the closure; the liveness part adds every word outside
    the support of the closure.
    """
    lat = P.lattice
    safe = closure_degree(P, w)
    live = property_degree(P, w)
    if safe == lat.bottom:
        live = lat.top
    return safe, live


# loading

KINDS = {
    "invariant": Invariant,
    "persistence": Persistence,
    "dual-persistence": DualPersistence,
    "regular-safety": RegularSafety,
    "omega-regular": OmegaRegular,
    "omega-regular-neg-det": OmegaRegularNegDet,
    "omega-regular-det": OmegaRegularDet,
}


def property_from_dict(data, base_dir=None, lattice=None):
    kind = require(data, "kind", "property")
    cls = KINDS.get(kind)
    if cls is None:
        raise FormatError(f"property: unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if "lattice" in data:
        lat = load_lattice(data["lattice"], base_dir)
        if lattice is not None and lat is not lattice:
            raise ModelError("property lattice differs from the system lattice")
    elif lattice is not None:
        lat = lattice
    else:
        raise FormatError("property: missing key 'lattice'")
    ap = require(data, "ap", "property")
    if issubclass(cls, _FormulaProperty):
        text = require(data, "formula", "property")
        return cls(MvFormula.parse(text, lat, ap))
    aut = load_automaton(require(data, "automaton", "property"), base_dir, lat)
    return cls(aut, ap)


def load_property(source, base_dir=None, lattice=None):
    data, where = load_source(source, base_dir)
    return property_from_dict(data, where, lattice)

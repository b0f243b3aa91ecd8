"""Multi-valued sets with their cuts, and mv-proposition formulas.

An :class:`MvSet` is a total map from a finite domain into a lattice, stored
sparsely (absent keys are bottom).  Formulas use the surface syntax::

    phi ::= atom | constant | !phi | phi & phi | phi | phi
          | phi -> phi | phi <-> phi | ( phi )

with precedence ``!`` > ``&`` > ``|`` > ``->`` > ``<->``; ``->`` and ``<->``
associate to the right.  Identifiers naming an atomic proposition are atoms,
identifiers naming a lattice element are constants.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import FormulaError, LatticeMismatchError, ModelError


class MvSet:
    """Lattice-valued subset of a finite domain."""

    def __init__(self, lattice, domain, values=None):
        self.lattice = lattice
        self.domain = tuple(domain)
        dom = set(self.domain)
        if len(dom) != len(self.domain):
            raise ModelError("duplicate keys in mv-set domain")
        self._values = {}
        for key, value in (values or {}).items():
            if key not in dom:
                raise ModelError(f"key {key!r} is not in the domain")
            value = lattice[value]
            if value != lattice.bottom:
                self._values[key] = value

    def __getitem__(self, key):
        if key not in self._values and key not in self.domain:
            raise KeyError(key)
        return self._values.get(key, self.lattice.bottom)

    def items(self):
        return [(k, self[k]) for k in self.domain]

    def support(self):
        return frozenset(self._values)

    def __eq__(self, other):
        return (isinstance(other, MvSet) and other.lattice is self.lattice
                and set(other.domain) == set(self.domain) and other._values == self._values)

    def __repr__(self):
        inner = ", ".join(f"{k!r}: {v}" for k, v in self._values.items())
        return f"MvSet({{{inner}}})"


def _compatible(f, g):
    if g.lattice is not f.lattice:
        raise LatticeMismatchError("mv-sets over different lattices")
    if set(g.domain) != set(f.domain):
        raise ModelError("mv-sets over different domains")


def cut(f, m):
    """The crisp set ``{x : f(x) >= m}``."""
    m = f.lattice[m]
    return frozenset(x for x in f.domain if f[x] >= m)


def resolve(f):
    """Pairs ``(m, cut(f, m))`` for every join-irreducible ``m``."""
    return [(m, cut(f, m)) for m in f.lattice.join_irreducibles]


def reconstruct(lattice, domain, resolution):
    """Inverse of :func:`resolve`: the mv-union of ``m & cut`` over the pairs."""
    values = {x: lattice.bottom for x in domain}
    for m, members in resolution:
        for x in members:
            values[x] = values[x] | m
    return MvSet(lattice, domain, values)


def inclusion_degree(f, g):
    """Degree to which ``f`` is included in ``g``: meet of ``f(x) -> g(x)``."""
    _compatible(f, g)
    return f.lattice.meet_all(f[x] >> g[x] for x in f.domain)


def mvset_op(op, f, g=None):
    """Pointwise ``union`` (join), ``intersection`` (meet) or ``complement``."""
    if op == "complement":
        if g is not None:
            raise TypeError("complement takes one mv-set")
        return MvSet(f.lattice, f.domain, {x: ~f[x] for x in f.domain})
    if g is None:
        raise TypeError(f"{op} takes two mv-sets")
    _compatible(f, g)
    if op == "union":
        return MvSet(f.lattice, f.domain, {x: f[x] | g[x] for x in f.domain})
    if op == "intersection":
        return MvSet(f.lattice, f.domain, {x: f[x] & g[x] for x in f.domain})
    raise ValueError(f"unknown mv-set operation {op!r}")


# formulas

@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Const:
    value: object  # lattice Element


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Iff:
    left: object
    right: object


_BINARY = {Or: "|", And: "&", Implies: "->", Iff: "<->"}
_PREC = {Iff: 0, Implies: 1, Or: 2, And: 3}


def _show(node, outer=-1):
    if isinstance(node, Atom):
        return node.name
    if isinstance(node, Const):
        return node.value.name
    if isinstance(node, Not):
        return "!" + _show(node.arg, 4)
    prec = _PREC[type(node)]
    right_assoc = isinstance(node, (Implies, Iff))
    left = _show(node.left, prec + 1 if right_assoc else prec)
    right = _show(node.right, prec if right_assoc else prec + 1)
    text = f"{left} {_BINARY[type(node)]} {right}"
    return f"({text})" if prec < outer else text


def _atoms(node, acc):
    if isinstance(node, Atom):
        acc.add(node.name)
    elif isinstance(node, Not):
        _atoms(node.arg, acc)
    elif not isinstance(node, Const):
        _atoms(node.left, acc)
        _atoms(node.right, acc)
    return acc


def _eval(node, val, lattice):
    if isinstance(node, Atom):
        return val(node.name)
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Not):
        return ~_eval(node.arg, val, lattice)
    a = _eval(node.left, val, lattice)
    b = _eval(node.right, val, lattice)
    if isinstance(node, Or):
        return a | b
    if isinstance(node, And):
        return a & b
    if isinstance(node, Implies):
        return a >> b
    return (a >> b) & (b >> a)


class MvFormula:
    """An mv-proposition formula over a declared AP set and lattice."""

    def __init__(self, root, lattice, ap):
        self.root = root
        self.lattice = lattice
        self.ap = tuple(ap)
        unknown = _atoms(root, set()) - set(self.ap)
        if unknown:
            raise FormulaError(f"unknown atom(s): {', '.join(sorted(unknown))}")
        self._check_consts(root)
        self._cache = {}

    def _check_consts(self, node):
        if isinstance(node, Const):
            self.lattice.own(node.value)
        elif isinstance(node, Not):
            self._check_consts(node.arg)
        elif not isinstance(node, Atom):
            self._check_consts(node.left)
            self._check_consts(node.right)

    @classmethod
    def parse(cls, text, lattice, ap):
        return cls(_Parser(text, lattice, ap).parse(), lattice, ap)

    @property
    def atoms(self):
        return frozenset(_atoms(self.root, set()))

    def evaluate(self, letter):
        """Value under the crisp valuation of ``letter`` (a set of atoms)."""
        letter = frozenset(letter)
        hit = self._cache.get(letter)
        if hit is None:
            if not letter <= set(self.ap):
                raise FormulaError(f"letter mentions unknown atoms {sorted(letter - set(self.ap))}")
            top, bot = self.lattice.top, self.lattice.bottom
            hit = _eval(self.root, lambda a: top if a in letter else bot, self.lattice)
            self._cache[letter] = hit
        return hit

    def evaluate_valuation(self, valuation):
        """Value under an arbitrary valuation ``atom -> element`` (missing atoms are bottom)."""
        lat = self.lattice
        return _eval(self.root, lambda a: lat[valuation.get(a, lat.bottom)], lat)

    def cut_sat(self, m, letter):
        return self.evaluate(letter) >= m

    def __str__(self):
        return _show(self.root)

    def __repr__(self):
        return f"MvFormula({_show(self.root)!r})"


def evaluate_formula(phi, letter):
    return phi.evaluate(letter)


def cut_sat(phi, m, letter):
    """True iff ``letter`` satisfies the crisp ``m``-cut of ``phi``."""
    return phi.evaluate(letter) >= phi.lattice[m]


# parser

_TOKEN = re.compile(r"(<->|->|[!&|()])|([A-Za-z0-9_][A-Za-z0-9_.']*)")


class _Parser:
    def __init__(self, text, lattice, ap):
        self.text = text
        self.lattice = lattice
        self.ap = set(ap)
        self.tokens = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m:
                self.fail(f"unexpected character {text[pos]!r}", pos)
            self.tokens.append((m.group(0), bool(m.group(2)), pos))
            pos = m.end()
        self.i = 0

    def fail(self, message, offset=None):
        if offset is None:
            offset = self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        raise FormulaError(message, line, col)

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, tok=None):
        if self.i >= len(self.tokens):
            self.fail("unexpected end of formula")
        cur = self.tokens[self.i]
        if tok is not None and cur[0] != tok:
            self.fail(f"expected {tok!r}, found {cur[0]!r}")
        self.i += 1
        return cur

    def parse(self):
        if not self.tokens:
            self.fail("empty formula", 0)
        node = self.iff()
        if self.i != len(self.tokens):
            self.fail(f"unexpected {self.peek()!r}")
        return node

    def iff(self):
        left = self.implies()
        if self.peek() == "<->":
            self.take()
            return Iff(left, self.iff())
        return left

    def implies(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self):
        node = self.conj()
        while self.peek() == "|":
            self.take()
            node = Or(node, self.conj())
        return node

    def conj(self):
        node = self.unary()
        while self.peek() == "&":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self):
        if self.peek() == "!":
            self.take()
            return Not(self.unary())
        if self.peek() == "(":
            self.take()
            node = self.iff()
            self.take(")")
            return node
        tok, is_name, offset = self.take()
        if not is_name:
            self.i -= 1
            self.fail(f"unexpected {tok!r}")
        in_ap, in_lat = tok in self.ap, tok in self.lattice
        if in_ap and in_lat:
            self.fail(f"{tok!r} is both an atomic proposition and a lattice element", offset)
        if in_ap:
            return Atom(tok)
        if in_lat:
            return Const(self.lattice[tok])
        self.fail(f"unknown atom or constant {tok!r}", offset)

"""Finite distributive De Morgan lattices with residual implication.

A lattice is given by its carrier (element names, in a fixed order), an order
relation given as pairs ``[a, b]`` meaning ``a <= b`` (the reflexive-transitive
closure is taken, so covering pairs suffice) and a negation map::

    {"elements": ["F", "M", "T"],
     "leq": [["F", "M"], ["M", "T"]],
     "neg": {"F": "T", "M": "M", "T": "F"}}

Construction validates the lattice laws and precomputes every operation as a
table, so elements are cheap handles and all operations are lookups.
Implication is the residual ``a -> b = join{c : c & a <= b}``.
"""
from __future__ import annotations

import itertools

from ._io import load_source, require
from .errors import FormatError, LatticeError, LatticeMismatchError


class Element:
    """Handle on one element of a :class:`FiniteLattice`.

    Supports ``&`` (meet), ``|`` (join), ``~`` (negation), ``>>`` (residual
    implication) and the lattice order through the comparison operators.
    """

    __slots__ = ("lattice", "index")

    def __init__(self, lattice, index):
        self.lattice = lattice
        self.index = index

    @property
    def name(self):
        return self.lattice.names[self.index]

    def _peer(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.lattice is not self.lattice:
            raise LatticeMismatchError(
                f"elements {self.name!r} and {other.name!r} belong to different lattices")
        return other.index

    def __eq__(self, other):
        return (isinstance(other, Element) and other.lattice is self.lattice
                and other.index == self.index)

    def __hash__(self):
        return hash((id(self.lattice), self.index))

    def __le__(self, other):
        j = self._peer(other)
        if j is NotImplemented:
            return j
        return self.lattice._le[self.index][j]

    def __ge__(self, other):
        j = self._peer(other)
        if j is NotImplemented:
            return j
        return self.lattice._le[j][self.index]

    def __lt__(self, other):
        return self <= other and self != other

    def __gt__(self, other):
        return self >= other and self != other

    def _table(self, table, other):
        j = self._peer(other)
        if j is NotImplemented:
            return j
        return self.lattice.elements[table[self.index][j]]

    def __and__(self, other):
        return self._table(self.lattice._meet, other)

    def __or__(self, other):
        return self._table(self.lattice._join, other)

    def __rshift__(self, other):
        return self._table(self.lattice._imp, other)

    def __invert__(self):
        return self.lattice.elements[self.lattice._neg[self.index]]

    def __repr__(self):
        return self.name

    __str__ = __repr__


class FiniteLattice:
    """Validated, table-driven finite distributive De Morgan lattice."""

    def __init__(self, elements, leq, neg, name=None):
        names = tuple(str(e) for e in elements)
        if not names:
            raise LatticeError("malformed", "a lattice needs at least one element")
        if len(set(names)) != len(names):
            raise LatticeError("malformed", "duplicate element names")
        pos = {a: i for i, a in enumerate(names)}
        n = len(names)

        le = [[i == j for j in range(n)] for i in range(n)]
        for pair in leq:
            try:
                a, b = pair
            except (TypeError, ValueError):
                raise LatticeError("malformed", f"order entry {pair!r} is not a pair") from None
            for x in (a, b):
                if str(x) not in pos:
                    raise LatticeError("malformed", f"order mentions unknown element {x!r}")
            le[pos[str(a)]][pos[str(b)]] = True
        for k in range(n):
            for i in range(n):
                if le[i][k]:
                    row = le[k]
                    for j in range(n):
                        if row[j]:
                            le[i][j] = True
        for i in range(n):
            for j in range(i + 1, n):
                if le[i][j] and le[j][i]:
                    raise LatticeError(
                        "not-a-lattice", f"{names[i]} and {names[j]} are mutually below each other")

        meet = [[0] * n for _ in range(n)]
        join = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                meet[i][j] = meet[j][i] = self._bound(le, names, i, j, lower=True)
                join[i][j] = join[j][i] = self._bound(le, names, i, j, lower=False)
        for i, j, k in itertools.product(range(n), repeat=3):
            if meet[i][join[j][k]] != join[meet[i][j]][meet[i][k]]:
                raise LatticeError(
                    "not-distributive",
                    f"{names[i]} & ({names[j]} | {names[k]}) differs from its expansion")

        if not isinstance(neg, dict):
            raise LatticeError("malformed", "negation must be a name -> name map")
        negmap = {str(k): str(v) for k, v in neg.items()}
        for a in names:
            if a not in negmap:
                raise LatticeError("malformed", f"negation undefined on {a!r}")
            if negmap[a] not in pos:
                raise LatticeError("malformed", f"negation maps {a!r} to unknown {negmap[a]!r}")
        for a in negmap:
            if a not in pos:
                raise LatticeError("malformed", f"negation mentions unknown element {a!r}")
        ng = [pos[negmap[a]] for a in names]
        for i in range(n):
            for j in range(n):
                if le[i][j] and not le[ng[j]][ng[i]]:
                    raise LatticeError(
                        "negation-not-de-morgan",
                        f"{names[i]} <= {names[j]} but not ~{names[j]} <= ~{names[i]}")
        for i in range(n):
            if ng[ng[i]] != i:
                raise LatticeError("negation-not-involutive", f"~~{names[i]} != {names[i]}")

        bottom = next(i for i in range(n) if all(le[i]))
        imp = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = bottom
                for k in range(n):
                    if le[meet[i][k]][j]:
                        acc = join[acc][k]
                imp[i][j] = acc

        self.name = name
        self.names = names
        self._pos = pos
        self._le = tuple(tuple(r) for r in le)
        self._meet = tuple(tuple(r) for r in meet)
        self._join = tuple(tuple(r) for r in join)
        self._neg = tuple(ng)
        self._imp = tuple(tuple(r) for r in imp)
        self.elements = tuple(Element(self, i) for i in range(n))
        self.bottom = self.elements[bottom]
        self.top = self.elements[next(i for i in range(n) if all(le[k][i] for k in range(n)))]
        self._ji = tuple(
            x for x in self.elements
            if x != self.bottom and self.join_all(y for y in self.elements if y < x) != x)

    @staticmethod
    def _bound(le, names, i, j, lower):
        n = len(names)
        if lower:
            cands = [k for k in range(n) if le[k][i] and le[k][j]]
            best = [k for k in cands if all(le[c][k] for c in cands)]
        else:
            cands = [k for k in range(n) if le[i][k] and le[j][k]]
            best = [k for k in cands if all(le[k][c] for c in cands)]
        if len(best) != 1:
            what = "greatest lower bound" if lower else "least upper bound"
            raise LatticeError("not-a-lattice", f"{names[i]} and {names[j]} have no {what}")
        return best[0]

    # element access

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, item):
        if isinstance(item, Element):
            return item.lattice is self
        return item in self._pos

    def __getitem__(self, name):
        if isinstance(name, Element):
            self.own(name)
            return name
        try:
            return self.elements[self._pos[str(name)]]
        except KeyError:
            raise KeyError(f"unknown lattice element {name!r}") from None

    def element(self, value):
        """Coerce a name or element of this lattice to an :class:`Element`."""
        return self[value]

    def own(self, x):
        if not isinstance(x, Element) or x.lattice is not self:
            raise LatticeMismatchError(f"{x!r} is not an element of this lattice")
        return x

    def __repr__(self):
        label = self.name or "lattice"
        return f"<{label} {{{', '.join(self.names)}}}>"

    # operations

    def leq(self, a, b):
        return self._le[self.own(a).index][self.own(b).index]

    def meet(self, a, b):
        return self.own(a) & self.own(b)

    def join(self, a, b):
        return self.own(a) | self.own(b)

    def neg(self, a):
        return ~self.own(a)

    def implies(self, a, b):
        return self.own(a) >> self.own(b)

    def connective(self, op, a, b=None):
        """Apply ``meet``, ``join``, ``neg`` or ``implies`` by name."""
        unary = op == "neg"
        if op not in ("meet", "join", "neg", "implies"):
            raise ValueError(f"unknown connective {op!r}")
        if unary != (b is None):
            raise TypeError(f"{op} takes {1 if unary else 2} argument(s)")
        return self.neg(a) if unary else getattr(self, op)(a, b)

    def meet_all(self, items):
        acc = self.top
        for x in items:
            acc = acc & x
        return acc

    def join_all(self, items):
        acc = self.bottom
        for x in items:
            acc = acc | x
        return acc

    # join-irreducibles and worklist helpers

    @property
    def join_irreducibles(self):
        """Join-irreducible elements in carrier order."""
        return self._ji

    def decompose(self, a):
        """The join-irreducible elements below ``a``; their join is ``a``."""
        a = self.own(a)
        return frozenset(m for m in self._ji if m <= a)

    def maximal(self, candidates):
        """A maximal element of ``candidates``; ties go to the lowest index."""
        cands = list(candidates)
        if not cands:
            raise ValueError("no candidates")
        tops = [x for x in cands if not any(x < y for y in cands)]
        return min(tops, key=lambda x: x.index)

    def downset(self, x):
        return frozenset(y for y in self.elements if y <= x)

    @property
    def is_chain(self):
        return all(a <= b or b <= a for a in self.elements for b in self.elements)

    def order_pairs(self):
        """All pairs ``(a, b)`` with ``a <= b``."""
        return [(a, b) for a in self.elements for b in self.elements if a <= b]

    def to_dict(self):
        covers = [[a.name, b.name] for a, b in self.order_pairs()
                  if a < b and not any(a < c < b for c in self.elements)]
        return {"elements": list(self.names), "leq": covers,
                "neg": {a.name: (~a).name for a in self.elements}}


_INTERNED = {}


def _intern(lattice):
    key = (lattice.names, lattice._le, lattice._neg)
    return _INTERNED.setdefault(key, lattice)


def lattice_from_dict(data, name=None):
    elements = require(data, "elements", "lattice")
    leq = data.get("leq", [])
    neg = require(data, "neg", "lattice")
    if not isinstance(elements, list) or not isinstance(leq, list):
        raise LatticeError("malformed", "'elements' and 'leq' must be lists")
    return _intern(FiniteLattice(elements, leq, neg, name=name or data.get("name")))


def chain_lattice(names, name=None):
    """Chain ``names[0] < names[1] < ...`` with the order-reversing negation."""
    names = list(names)
    leq = list(zip(names, names[1:]))
    neg = dict(zip(names, reversed(names)))
    return _intern(FiniteLattice(names, leq, neg, name=name))


def product_lattice(first, second, name=None):
    """Componentwise product; names are concatenated when all are one character."""
    short = all(len(a) == 1 for a in first.names + second.names)

    def label(a, b):
        return f"{a.name}{b.name}" if short else f"({a.name},{b.name})"

    pairs = list(itertools.product(first.elements, second.elements))
    names = [label(a, b) for a, b in pairs]
    leq = [(label(a, b), label(c, d)) for (a, b) in pairs for (c, d) in pairs
           if a <= c and b <= d]
    neg = {label(a, b): label(~a, ~b) for a, b in pairs}
    return _intern(FiniteLattice(names, leq, neg, name=name))


def _builtins():
    b2 = chain_lattice(["0", "1"], name="B2")
    l3 = chain_lattice(["F", "M", "T"], name="l3")
    l5 = chain_lattice(["F", "U", "M", "L", "T"], name="l5")
    return {
        "B2": b2,
        "l3": l3,
        "B2xB2": product_lattice(b2, b2, name="B2xB2"),
        "l5": l5,
        "l3xl3": product_lattice(l3, l3, name="l3xl3"),
    }


BUILTIN_NAMES = ("B2", "l3", "B2xB2", "l5", "l3xl3")
_BUILTIN_CACHE = {}


def builtin_lattice(name):
    """One of the shipped lattices: ``B2``, ``l3``, ``B2xB2``, ``l5``, ``l3xl3``."""
    if not _BUILTIN_CACHE:
        _BUILTIN_CACHE.update(_builtins())
    for key, lat in _BUILTIN_CACHE.items():
        if key.lower() == str(name).lower():
            return lat
    raise KeyError(f"no built-in lattice named {name!r}")


def load_lattice(source, base_dir=None):
    """Load a lattice from a built-in name, a JSON file path or a parsed mapping."""
    if isinstance(source, FiniteLattice):
        return source
    if isinstance(source, str) and source.lower() in (b.lower() for b in BUILTIN_NAMES):
        return builtin_lattice(source)
    data, _ = load_source(source, base_dir)
    if not isinstance(data, dict):
        raise FormatError("lattice: expected a JSON object")
    return lattice_from_dict(data)


def law_report(lattice):
    """Exhaustively re-check the lattice laws; returns ``{law: bool}``."""
    els = lattice.elements
    pairs = list(itertools.product(els, repeat=2))
    triples = list(itertools.product(els, repeat=3))
    return {
        "partial order": all(
            (a <= b and b <= a) <= (a == b) for a, b in pairs)
        and all(not (a <= b and b <= c) or a <= c for a, b, c in triples),
        "bounds": all(
            (a & b) <= a and (a & b) <= b and a <= (a | b) and b <= (a | b)
            for a, b in pairs),
        "distributivity": all(
            (a & (b | c)) == ((a & b) | (a & c)) and (a | (b & c)) == ((a | b) & (a | c))
            for a, b, c in triples),
        "de morgan": all(
            ~(a | b) == (~a & ~b) and ~(a & b) == (~a | ~b) for a, b in pairs),
        "involution": all(~~a == a for a in els),
        "residuation": all(
            ((x & a) <= b) == (x <= (a >> b)) for x, a, b in triples),
        "implication top iff order": all(
            ((a >> b) == lattice.top) == (a <= b) for a, b in pairs),
    }

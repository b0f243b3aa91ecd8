"""Lattice-valued automata: finite (NFA/DFA), Buchi and deterministic Rabin.

Degrees of infinite words are computed per join-irreducible cut; a lasso
word is accepted by a classical cut automaton when the product of the
automaton with the lasso positions has a suitable reachable cycle.

Automaton file format (JSON)::

    {"kind": "dfa",                     # nfa | dfa | buchi | rabin
     "lattice": "l3",
     "ap": ["b", "p"],                  # alphabet = all subsets of ap
     "states": ["q0", "q1"],
     "initial": "q0",                   # nfa/buchi: {"q0": "T"} or ["q0"]
     "delta": {"q0": {"{b}": "q1", "*": "q0"}, "q1": {"*": "q1"}},
     "final": {"q0": "T", "q1": "M"},
     "pairs": [{"H": ["q1"], "K": ["q0"], "value": "T"}]}   # rabin only

Instead of ``ap`` an explicit ``alphabet`` list may be given; entries
written ``"{b,p}"`` are sets, anything else is an opaque symbol.  Nondeterministic
kinds write ``delta`` as a list of ``{from, letter, to, value}`` records.  The
letter ``"*"`` stands for every letter not mentioned explicitly.
"""
from __future__ import annotations

import itertools

from . import graphs
from ._io import load_source, require
from .errors import AlphabetMismatchError, FormatError, ModelError, ResourceExhaustedError
from .lattice import builtin_lattice, load_lattice
from .system import format_letter, parse_letter

SINK = "__sink__"


def powerset_alphabet(ap):
    """All subsets of ``ap`` as frozensets, smallest first."""
    ap = list(ap)
    return tuple(frozenset(c) for k in range(len(ap) + 1)
                 for c in itertools.combinations(ap, k))


class _Automaton:
    kind = None

    def _setup(self, lattice, states, alphabet):
        self.lattice = lattice
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate automaton states")
        self.alphabet = tuple(alphabet)
        self._letters = set(self.alphabet)

    def _state(self, q):
        if q not in self._index:
            raise ModelError(f"undeclared automaton state {q!r}")
        return q

    @property
    def _index(self):
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = self.__dict__["_idx"] = {q: i for i, q in enumerate(self.states)}
        return idx

    def check_letter(self, a):
        if a not in self._letters:
            raise AlphabetMismatchError(f"letter {format_letter(a)} is not in the automaton alphabet")
        return a

    def _values(self, raw, what):
        out = {}
        for q, v in raw.items():
            self._state(q)
            v = self.lattice[v]
            if v != self.lattice.bottom:
                out[q] = v
        return out

    def __repr__(self):
        return f"<{type(self).__name__} {len(self.states)} states over {self.lattice!r}>"


class MvNFA(_Automaton):
    """Nondeterministic automaton with lattice-valued ``delta``, ``initial`` and ``final``."""

    kind = "nfa"

    def __init__(self, lattice, states, alphabet, delta, initial, final):
        self._setup(lattice, states, alphabet)
        self.delta = {}
        for (q, a, p), v in delta.items():
            self._state(q), self._state(p), self.check_letter(a)
            v = lattice[v]
            if v != lattice.bottom:
                self.delta[(q, a, p)] = self.delta.get((q, a, p), lattice.bottom) | v
        self.initial = self._values(initial, "initial")
        self.final = self._values(final, "final")
        self._succ = {}
        for (q, a, p), v in self.delta.items():
            self._succ.setdefault((q, a), []).append((p, v))

    def successors(self, q, a):
        return self._succ.get((q, a), [])

    def final_value(self, q):
        return self.final.get(q, self.lattice.bottom)


class MvBuchi(MvNFA):
    """Buchi automaton; a run is worth the join of ``final`` over states seen infinitely often."""

    kind = "buchi"

    @property
    def is_simple(self):
        crisp = (self.lattice.top,)
        return all(v in crisp for v in self.delta.values()) and all(
            v in crisp for v in self.initial.values())

    @property
    def is_deterministic(self):
        return (self.is_simple and len(self.initial) <= 1
                and all(len(v) <= 1 for v in self._succ.values()))


class MvDFA(_Automaton):
    """Deterministic automaton with total ``delta`` and lattice-valued ``final``."""

    kind = "dfa"

    def __init__(self, lattice, states, alphabet, delta, q0, final):
        self._setup(lattice, states, alphabet)
        self.q0 = self._state(q0)
        self.delta = {}
        for (q, a), p in delta.items():
            self._state(q), self._state(p), self.check_letter(a)
            self.delta[(q, a)] = p
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.delta:
                    raise ModelError(f"transition function undefined at ({q!r}, {format_letter(a)})")
        self.final = self._values(final, "final")

    def step(self, q, a):
        return self.delta[(q, self.check_letter(a))]

    def run(self, word):
        q = self.q0
        for a in word:
            q = self.step(q, a)
        return q

    def final_value(self, q):
        return self.final.get(q, self.lattice.bottom)


class MvRabin(_Automaton):
    """Deterministic Rabin automaton whose pairs ``(H, K)`` carry lattice values."""

    kind = "rabin"

    def __init__(self, lattice, states, alphabet, delta, q0, pairs):
        self._setup(lattice, states, alphabet)
        self.q0 = self._state(q0)
        self.delta = {}
        for (q, a), p in delta.items():
            self._state(q), self._state(p), self.check_letter(a)
            self.delta[(q, a)] = p
        for q in self.states:
            for a in self.alphabet:
                if (q, a) not in self.delta:
                    raise ModelError(f"transition function undefined at ({q!r}, {format_letter(a)})")
        acc = {}
        for H, K, v in pairs:
            H, K = frozenset(H), frozenset(K)
            for q in H | K:
                self._state(q)
            v = lattice[v]
            if v != lattice.bottom:
                acc[(H, K)] = acc.get((H, K), lattice.bottom) | v
        self.acc = acc

    @property
    def pairs(self):
        return [(H, K, v) for (H, K), v in self.acc.items()]

    def pairs_at(self, m):
        """Pairs whose value is at least ``m``."""
        return [(H, K) for (H, K), v in self.acc.items() if v >= m]

    def step(self, q, a):
        return self.delta[(q, self.check_letter(a))]


# finite words

def word_degree(A, word):
    """Degree to which the finite ``word`` is accepted."""
    word = tuple(word)
    if isinstance(A, MvDFA):
        return A.final_value(A.run(word))
    lat = A.lattice
    cur = dict(A.initial)
    for a in word:
        A.check_letter(a)
        nxt = {}
        for q, v in cur.items():
            for p, w in A.successors(q, a):
                nxt[p] = nxt.get(p, lat.bottom) | (v & w)
        cur = nxt
    return lat.join_all(v & A.final_value(q) for q, v in cur.items())


def _subset_name(A, f):
    return "{" + ",".join(f"{q}:{f[q].name}" for q in A.states if q in f) + "}"


def determinize(A, state_budget=100_000):
    """Accessible mv-subset construction; the result accepts the same mv-language.

    Raises :class:`ResourceExhaustedError` past ``state_budget`` states.
    """
    if isinstance(A, MvDFA):
        return A
    lat = A.lattice

    def key(f):
        return tuple((q, f[q].index) for q in A.states if q in f)

    start = dict(A.initial)
    found = {key(start): start}
    order = [key(start)]
    delta = {}
    i = 0
    while i < len(order):
        k = order[i]
        f = found[k]
        i += 1
        for a in A.alphabet:
            g = {}
            for q, v in f.items():
                for p, w in A.successors(q, a):
                    g[p] = g.get(p, lat.bottom) | (v & w)
            g = {p: v for p, v in g.items() if v != lat.bottom}
            gk = key(g)
            if gk not in found:
                if len(found) >= state_budget:
                    raise ResourceExhaustedError(
                        f"determinization exceeded the budget of {state_budget} states")
                found[gk] = g
                order.append(gk)
            delta[(k, a)] = gk
    names = {k: _subset_name(A, found[k]) for k in order}
    final = {names[k]: lat.join_all(v & A.final_value(q) for q, v in found[k].items())
             for k in order}
    return MvDFA(lat, [names[k] for k in order], A.alphabet,
                 {(names[k], a): names[t] for (k, a), t in delta.items()},
                 names[order[0]], final)


# omega words

def simplify_buchi(A):
    """Equivalent Buchi automaton with crisp transitions and initial states.

    States are pairs ``(q, r)`` where ``r`` is the value accumulated along the
    run so far; ``final((q, r)) = r & final(q)``.  Only the reachable part is built.
    """
    lat = A.lattice
    start = [(q, v.name) for q, v in A.initial.items()]
    seen = set(start)
    order = list(start)
    delta = {}
    i = 0
    while i < len(order):
        q, r = order[i]
        i += 1
        for a in A.alphabet:
            for p, w in A.successors(q, a):
                s = lat[r] & w
                if s == lat.bottom:
                    continue
                node = (p, s.name)
                delta[((q, r), a, node)] = lat.top
                if node not in seen:
                    seen.add(node)
                    order.append(node)
    final = {(q, r): lat[r] & A.final_value(q) for q, r in order}
    return MvBuchi(lat, order, A.alphabet, delta, {s: lat.top for s in start}, final)


def cut_automaton(A, m):
    """Classical (two-valued) automaton of the same kind recognizing the ``m``-cut."""
    lat = A.lattice
    m = lat[m]
    b2 = builtin_lattice("B2")

    def crisp(vals, keys):
        # bottom entries are not stored, yet they belong to the bottom cut
        return {k: "1" for k in keys if vals.get(k, lat.bottom) >= m}

    if isinstance(A, MvDFA):
        return MvDFA(b2, A.states, A.alphabet, A.delta, A.q0, crisp(A.final, A.states))
    if isinstance(A, MvRabin):
        return MvRabin(b2, A.states, A.alphabet, A.delta, A.q0,
                       [(H, K, "1") for H, K in A.pairs_at(m)]
                       + ([((), A.states, "1")] if m == lat.bottom else []))
    cls = type(A)
    edges = A.delta if m != lat.bottom else itertools.product(A.states, A.alphabet, A.states)
    return cls(b2, A.states, A.alphabet, crisp(A.delta, edges), crisp(A.initial, A.states),
               crisp(A.final, A.states))


def _buchi_cut_accepts(A, m, w):
    # node (q, i): the run is in q and is about to read position i of w
    def succ(node):
        q, i = node
        j = w.next(i)
        return [(p, j) for p, v in A.successors(q, w.letter(i)) if v >= m]

    starts = [(q, 0) for q, v in A.initial.items() if v >= m]
    nodes = graphs.reachable(starts, succ)
    for comp in graphs.tarjan_scc(nodes, succ):
        if graphs.nontrivial(comp, succ) and any(A.final_value(q) >= m for q, _ in comp):
            return True
    return False


def rabin_inf(A, w):
    """States visited infinitely often by the run of Rabin/DFA-like ``A`` on lasso ``w``."""
    for a in w.letters():
        A.check_letter(a)
    seen = {}
    trail = []
    q, i = A.step(A.q0, w.letter(0)), 0
    while (q, i) not in seen:
        seen[(q, i)] = len(trail)
        trail.append(q)
        i = w.next(i)
        q = A.step(q, w.letter(i))
    return frozenset(trail[seen[(q, i)]:])


def rabin_accepts(H, K, inf):
    return not (inf & H) and bool(inf & K)


def omega_degree(A, w):
    """Degree to which the lasso ``w`` is accepted by a Buchi or Rabin automaton."""
    lat = A.lattice
    if isinstance(A, MvRabin):
        inf = rabin_inf(A, w)
        return lat.join_all(v for H, K, v in A.pairs if rabin_accepts(H, K, inf))
    for a in w.letters():
        A.check_letter(a)
    result = lat.bottom
    for m in lat.join_irreducibles:
        if not m <= result and _buchi_cut_accepts(A, m, w):
            result = result | m
    return result


def accepts(A, w):
    """Classical acceptance: the degree reaches top."""
    if isinstance(A, (MvDFA, MvNFA)) and not isinstance(A, MvBuchi):
        return word_degree(A, w) == A.lattice.top
    return omega_degree(A, w) == A.lattice.top


def rabin_union(A1, A2):
    """Rabin automaton whose degree on every word is the join of the two inputs."""
    if A1.lattice is not A2.lattice:
        raise ModelError("automata over different lattices")
    if set(A1.alphabet) != set(A2.alphabet):
        raise AlphabetMismatchError("automata over different alphabets")
    states = [(p, q) for p in A1.states for q in A2.states]
    delta = {((p, q), a): (A1.step(p, a), A2.step(q, a))
             for p, q in states for a in A1.alphabet}
    Q1, Q2 = A1.states, A2.states
    pairs = [(frozenset((h, q) for h in H for q in Q2), frozenset((k, q) for k in K for q in Q2), v)
             for H, K, v in A1.pairs]
    pairs += [(frozenset((p, h) for p in Q1 for h in H), frozenset((p, k) for p in Q1 for k in K), v)
              for H, K, v in A2.pairs]
    # coinciding pairs are merged with the join of their values by MvRabin
    return MvRabin(A1.lattice, states, A1.alphabet, delta, (A1.q0, A2.q0), pairs)


def deterministic_parts(A):
    """``(q0, delta_map, states)`` of a deterministic Buchi automaton, completed with a sink."""
    if not A.is_deterministic:
        raise ModelError("Buchi automaton is not deterministic")
    states = list(A.states)
    delta = {}
    need_sink = not A.initial
    for q in A.states:
        for a in A.alphabet:
            nxt = A.successors(q, a)
            if nxt:
                delta[(q, a)] = nxt[0][0]
            else:
                delta[(q, a)] = SINK
                need_sink = True
    q0 = next(iter(A.initial), SINK)
    if need_sink:
        if SINK in A.states:
            raise ModelError(f"state name {SINK!r} is reserved")
        states.append(SINK)
        for a in A.alphabet:
            delta[(SINK, a)] = SINK
    return q0, delta, states


def det_buchi_to_rabin(A):
    """Rabin automaton with one pair ``(empty, final_m)`` valued ``m`` per join-irreducible ``m``."""
    q0, delta, states = deterministic_parts(A)
    pairs = []
    for m in A.lattice.join_irreducibles:
        good = frozenset(q for q in A.states if A.final_value(q) >= m)
        if good:
            pairs.append((frozenset(), good, m))
    return MvRabin(A.lattice, states, A.alphabet, delta, q0, pairs)


# loading

def _letter(raw):
    if isinstance(raw, list):
        return frozenset(raw)
    if not isinstance(raw, str):
        raise FormatError(f"cannot read letter {raw!r}")
    return parse_letter(raw)


def _expand(alphabet, row, what):
    """Map a ``{letter: x}`` record with optional ``*`` default onto every letter."""
    out = {}
    default = row.get("*")
    for raw, x in row.items():
        if raw == "*":
            continue
        a = _letter(raw)
        if a not in alphabet:
            raise FormatError(f"{what}: letter {raw!r} is not in the alphabet")
        out[a] = x
    if default is not None:
        for a in alphabet:
            out.setdefault(a, default)
    return out


def automaton_from_dict(data, base_dir=None, lattice=None):
    kind = require(data, "kind", "automaton")
    if kind not in ("nfa", "dfa", "buchi", "rabin"):
        raise FormatError(f"automaton: unknown kind {kind!r}")
    if "lattice" in data:
        lat = load_lattice(data["lattice"], base_dir)
    elif lattice is not None:
        lat = lattice
    else:
        raise FormatError("automaton: missing key 'lattice'")
    if lattice is not None and lat is not lattice:
        raise ModelError("automaton lattice differs from the expected lattice")
    if "ap" in data:
        alphabet = powerset_alphabet(data["ap"])
    else:
        alphabet = tuple(_letter(a) for a in require(data, "alphabet", "automaton"))
    letters = set(alphabet)
    states = require(data, "states", "automaton")
    raw_delta = require(data, "delta", "automaton")
    try:
        if kind in ("dfa", "rabin"):
            delta = {}
            if isinstance(raw_delta, dict):
                for q, row in raw_delta.items():
                    for a, p in _expand(letters, row, f"delta of {q}").items():
                        delta[(q, a)] = p
            else:
                for rec in raw_delta:
                    targets = alphabet if rec["letter"] == "*" else [_letter(rec["letter"])]
                    for a in targets:
                        delta.setdefault((rec["from"], a), rec["to"])
            q0 = require(data, "initial", "automaton")
            if kind == "dfa":
                return MvDFA(lat, states, alphabet, delta, q0, data.get("final", {}))
            pairs = [(rec.get("H", []), rec.get("K", []), rec.get("value", lat.top.name))
                     for rec in data.get("pairs", [])]
            return MvRabin(lat, states, alphabet, delta, q0, pairs)
        delta = {}
        if isinstance(raw_delta, dict):
            raw_delta = [{"from": q, "letter": a, "to": p}
                         for q, row in raw_delta.items() for a, p in row.items()]
        explicit = {(r["from"], _letter(r["letter"])) for r in raw_delta if r["letter"] != "*"}
        for rec in raw_delta:
            value = lat[rec.get("value", lat.top.name)]
            if rec["letter"] == "*":
                targets = [a for a in alphabet if (rec["from"], a) not in explicit]
            else:
                targets = [_letter(rec["letter"])]
            for a in targets:
                key = (rec["from"], a, rec["to"])
                delta[key] = delta.get(key, lat.bottom) | value
        initial = require(data, "initial", "automaton")
        if isinstance(initial, str):
            initial = [initial]
        if isinstance(initial, list):
            initial = {q: lat.top for q in initial}
        cls = MvNFA if kind == "nfa" else MvBuchi
        return cls(lat, states, alphabet, delta, initial, data.get("final", {}))
    except KeyError as exc:
        raise FormatError(f"automaton: missing or unknown entry {exc}") from None


def load_automaton(source, base_dir=None, lattice=None):
    data, where = load_source(source, base_dir)
    return automaton_from_dict(data, where, lattice)

"""Multi-valued transition systems, their cuts, and trace-degree oracles.

A system has lattice-valued transitions ``eta(s, action, t)`` and initial
values ``init(s)`` (absent entries are bottom) and crisp labels.  Systems whose
labels are themselves lattice-valued (:class:`MvLabeledSystem`) are turned
into crisp-labeled ones by :func:`normalize_labeling`.

TS file format (JSON)::

    {"lattice": "l3",                      # built-in name, path or inline object
     "states": ["s0", "s1"], "actions": ["tau"],
     "init": {"s0": "T"},
     "transitions": [{"from": "s0", "action": "tau", "to": "s1", "value": "M"}],
     "ap": ["b"],
     "labels": {"s0": [], "s1": ["b"]}}    # or {"s1": {"b": "M"}} for mv labels

``action`` defaults to the first declared action and ``value`` to top.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from . import graphs
from ._io import load_source, require
from .errors import FormatError, ModelError
from .lattice import load_lattice

Letter = frozenset


def parse_letter(text):
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        return text
    body = text[1:-1].strip()
    return frozenset(p.strip() for p in body.split(",") if p.strip()) if body else frozenset()


def format_letter(letter):
    if isinstance(letter, frozenset):
        return "{" + ",".join(sorted(map(str, letter))) + "}"
    return str(letter)


_LETTER = re.compile(r"\{[^{}]*\}|[^\s{}|,]+")


def parse_word(text):
    """Parse a finite word such as ``{}{b}{b,p}``; bare tokens are symbols."""
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace() or text[pos] == ",":
            pos += 1
            continue
        m = _LETTER.match(text, pos)
        if not m:
            raise FormatError(f"cannot parse word at column {pos + 1}: {text!r}")
        out.append(parse_letter(m.group(0)))
        pos = m.end()
    return tuple(out)


def format_word(word):
    return "".join(format_letter(a) for a in word)


@dataclass(frozen=True)
class LassoWord:
    """Ultimately periodic word ``stem . cycle^omega``."""

    stem: tuple
    cycle: tuple

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ModelError("lasso cycle must be nonempty")

    @classmethod
    def parse(cls, text):
        if text.count("|") != 1:
            raise FormatError(f"lasso needs exactly one '|' between stem and cycle: {text!r}")
        stem, cycle = text.split("|")
        return cls(parse_word(stem), parse_word(cycle))

    def __len__(self):
        return len(self.stem) + len(self.cycle)

    def letter(self, i):
        k = len(self.stem)
        return self.stem[i] if i < k else self.cycle[(i - k) % len(self.cycle)]

    def next(self, i):
        """Successor position in the folded ``stem + cycle`` index space."""
        return i + 1 if i + 1 < len(self) else len(self.stem)

    def letters(self):
        return set(self.stem) | set(self.cycle)

    def __str__(self):
        return format_word(self.stem) + "|" + format_word(self.cycle)


@dataclass(frozen=True, eq=False)
class ClassicalTransitionSystem:
    """Crisp transition system, typically a cut of an mv-system."""

    states: tuple
    actions: tuple
    transitions: frozenset
    init: frozenset
    ap: tuple
    labels: dict

    def __post_init__(self):
        succ = {s: [] for s in self.states}
        for s, a, t in self.transitions:
            if t not in succ[s]:
                succ[s].append(t)
        object.__setattr__(self, "_succ", succ)
        object.__setattr__(self, "_pos", {s: i for i, s in enumerate(self.states)})

    def order(self, s):
        """Position of ``s`` in the state list (a stable sort key)."""
        return self._pos[s]

    def successors(self, s):
        return self._succ[s]

    def has_edge(self, s, t):
        return t in self._succ.get(s, ())

    def restrict(self, keep):
        """Subsystem induced by the states in ``keep``."""
        keep = set(keep)
        return ClassicalTransitionSystem(
            tuple(s for s in self.states if s in keep), self.actions,
            frozenset(e for e in self.transitions if e[0] in keep and e[2] in keep),
            frozenset(s for s in self.init if s in keep), self.ap,
            {s: self.labels[s] for s in self.states if s in keep})

    def reachable(self):
        return graphs.reachable(self.init, self.successors)

    def live(self):
        return graphs.live_nodes(self.states, self.successors)


def trim(C):
    """Restrict ``C`` to states lying on some infinite path."""
    return C.restrict(C.live())


class MvTransitionSystem:
    """Multi-valued transition system with crisp labels."""

    def __init__(self, lattice, states, actions, eta, init, ap, labels):
        self.lattice = lattice
        self.states = tuple(states)
        self.actions = tuple(actions)
        self.ap = tuple(ap)
        known = set(self.states)
        if len(known) != len(self.states):
            raise ModelError("duplicate state names")
        acts = set(self.actions)
        bottom = lattice.bottom
        self.eta = {}
        for (s, a, t), v in eta.items():
            if s not in known or t not in known:
                raise ModelError(f"transition {s!r} -> {t!r} uses an undeclared state")
            if a not in acts:
                raise ModelError(f"transition uses undeclared action {a!r}")
            v = lattice[v]
            if v != bottom:
                self.eta[(s, a, t)] = v
        self.init = {}
        for s, v in init.items():
            if s not in known:
                raise ModelError(f"initial value for undeclared state {s!r}")
            v = lattice[v]
            if v != bottom:
                self.init[s] = v
        aps = set(self.ap)
        self.labels = {}
        for s in self.states:
            lab = frozenset(labels.get(s, ()))
            if not lab <= aps:
                raise ModelError(f"label of {s!r} uses undeclared propositions {sorted(lab - aps)}")
            self.labels[s] = lab
        for s in labels:
            if s not in known:
                raise ModelError(f"label for undeclared state {s!r}")
        self._succ = {s: [] for s in self.states}
        for (s, a, t), v in self.eta.items():
            self._succ[s].append((a, t, v))

    def successors(self, s):
        """``[(action, target, value)]`` over nonbottom transitions."""
        return self._succ[s]

    def initial_states(self):
        return [s for s in self.states if s in self.init]

    def reachable(self):
        return graphs.reachable(self.initial_states(),
                                lambda s: [t for _, t, _ in self._succ[s]])

    def __repr__(self):
        return (f"<MvTransitionSystem {len(self.states)} states, "
                f"{len(self.eta)} transitions over {self.lattice!r}>")


class MvLabeledSystem:
    """Like :class:`MvTransitionSystem` but ``labels[(s, ap)]`` is a lattice value."""

    def __init__(self, lattice, states, actions, eta, init, ap, labels):
        crisp = MvTransitionSystem(lattice, states, actions, eta, init, ap, {})
        self.lattice = lattice
        self.states, self.actions, self.ap = crisp.states, crisp.actions, crisp.ap
        self.eta, self.init = crisp.eta, crisp.init
        self.labels = {}
        for (s, p), v in labels.items():
            if s not in crisp.labels or p not in self.ap:
                raise ModelError(f"label entry ({s!r}, {p!r}) uses an undeclared state or proposition")
            v = lattice[v]
            if v != lattice.bottom:
                self.labels[(s, p)] = v

    def label(self, s, p):
        return self.labels.get((s, p), self.lattice.bottom)


def cut_ts(ts, m):
    """The crisp ``m``-cut: transitions and initial states valued at least ``m``."""
    m = ts.lattice[m]
    if m == ts.lattice.bottom:
        trans = frozenset((s, a, t) for s in ts.states for a in ts.actions for t in ts.states)
        init = frozenset(ts.states)
    else:
        trans = frozenset(k for k, v in ts.eta.items() if v >= m)
        init = frozenset(s for s, v in ts.init.items() if v >= m)
    return ClassicalTransitionSystem(ts.states, ts.actions, trans, init, ts.ap, dict(ts.labels))


def scale_ts(ts, m):
    """``m & TS``: initial values met with ``m``; trace function scales the same way."""
    m = ts.lattice[m]
    return MvTransitionSystem(ts.lattice, ts.states, ts.actions, ts.eta,
                              {s: v & m for s, v in ts.init.items()}, ts.ap, ts.labels)


def sum_ts(first, second):
    """Disjoint union; states become ``(s, 1)`` and ``(s, 2)``."""
    if first.lattice is not second.lattice:
        raise ModelError("cannot sum systems over different lattices")
    if set(first.ap) != set(second.ap):
        raise ModelError("cannot sum systems over different propositions")
    actions = first.actions + tuple(a for a in second.actions if a not in first.actions)
    states, eta, init, labels = [], {}, {}, {}
    for tag, ts in ((1, first), (2, second)):
        for s in ts.states:
            states.append((s, tag))
            labels[(s, tag)] = ts.labels[s]
        for (s, a, t), v in ts.eta.items():
            eta[((s, tag), a, (t, tag))] = v
        for s, v in ts.init.items():
            init[(s, tag)] = v
    return MvTransitionSystem(first.lattice, states, actions, eta, init, first.ap, labels)


def normalize_labeling(tsm):
    """Crisp-labeled system with the same trace function.

    Each state ``s`` is split into copies ``(s, d)``, one per value ``d``
    occurring in the labeling; copy ``(s, d)`` carries the propositions whose
    value is at least ``d`` and every initial/transition value is met with the
    ``d`` of the copies involved.  Copies for ``d = bottom`` contribute nothing
    and are dropped.
    """
    lat = tsm.lattice
    image = {tsm.label(s, p) for s in tsm.states for p in tsm.ap}
    if not tsm.ap:
        image = {lat.top}
    values = sorted((d for d in image if d != lat.bottom), key=lambda d: d.index)
    states = [(s, d.name) for s in tsm.states for d in values]
    labels = {(s, d.name): frozenset(p for p in tsm.ap if tsm.label(s, p) >= d)
              for s in tsm.states for d in values}
    init = {(s, d.name): v & d for s, v in tsm.init.items() for d in values}
    eta = {}
    for (s, a, t), v in tsm.eta.items():
        for d in values:
            for e in values:
                eta[((s, d.name), a, (t, e.name))] = d & v & e
    return MvTransitionSystem(lat, states, tsm.actions, eta, init, tsm.ap, labels)


def terminal_states(ts):
    """Reachable states without an outgoing nonbottom transition."""
    return sorted((s for s in ts.reachable() if not ts.successors(s)), key=ts.states.index)


def stutter_complete(ts, action="stutter"):
    """Add a top-valued self-loop on every state lacking outgoing transitions."""
    while action in ts.actions:
        action = "_" + action
    dead = [s for s in ts.states if not ts.successors(s)]
    if not dead:
        return ts
    eta = dict(ts.eta)
    for s in dead:
        eta[(s, action, s)] = ts.lattice.top
    return MvTransitionSystem(ts.lattice, ts.states, ts.actions + (action,), eta,
                              ts.init, ts.ap, ts.labels)


def continuation_degree(ts):
    """``s -> join{m in JI : s lies on an infinite path of the m-cut}``."""
    lat = ts.lattice
    out = {s: lat.bottom for s in ts.states}
    for m in lat.join_irreducibles:
        for s in cut_ts(ts, m).live():
            out[s] = out[s] | m
    return out


def _check_letters(ts, letters):
    aps = set(ts.ap)
    for a in letters:
        if not isinstance(a, frozenset) or not a <= aps:
            raise ModelError(f"letter {format_letter(a)} is not a set of declared propositions")


def finite_trace_degree(ts, word):
    """Degree to which ``word`` is a prefix of some trace of ``ts``."""
    word = tuple(word)
    _check_letters(ts, word)
    lat = ts.lattice
    cont = continuation_degree(ts)
    if not word:
        return lat.join_all(v & cont[s] for s, v in ts.init.items())
    cur = {s: v for s, v in ts.init.items() if ts.labels[s] == word[0]}
    for letter in word[1:]:
        nxt = {}
        for s, v in cur.items():
            for _, t, w in ts.successors(s):
                if ts.labels[t] == letter:
                    nxt[t] = nxt.get(t, lat.bottom) | (v & w)
        cur = nxt
    return lat.join_all(v & cont[s] for s, v in cur.items())


def lasso_trace_degree(ts, w):
    """``Traces(ts)(w)`` for an ultimately periodic word ``w``."""
    _check_letters(ts, w.letters())
    lat = ts.lattice
    result = lat.bottom
    for m in lat.join_irreducibles:
        if not m <= result and _cut_has_trace(cut_ts(ts, m), w):
            result = result | m
    return result


def _cut_has_trace(C, w):
    def succ(node):
        s, i = node
        j = w.next(i)
        want = w.letter(j)
        return [(t, j) for t in C.successors(s) if C.labels[t] == want]

    starts = [(s, 0) for s in C.init if C.labels[s] == w.letter(0)]
    reach = graphs.reachable(starts, succ)
    return bool(graphs.live_nodes(reach, succ))


# loading

def _values_map(raw, lattice, what):
    if not isinstance(raw, dict):
        raise FormatError(f"{what}: expected an object mapping names to lattice elements")
    out = {}
    for k, v in raw.items():
        try:
            out[k] = lattice[v]
        except KeyError:
            raise FormatError(f"{what}: {v!r} is not an element of the lattice") from None
    return out


def system_from_dict(data, base_dir=None):
    lattice = load_lattice(require(data, "lattice", "system"), base_dir)
    states = require(data, "states", "system")
    actions = data.get("actions") or ["tau"]
    ap = data.get("ap", [])
    if isinstance(data.get("init"), list):
        init = {s: lattice.top for s in data["init"]}
    else:
        init = _values_map(require(data, "init", "system"), lattice, "init")
    eta = {}
    for i, tr in enumerate(require(data, "transitions", "system")):
        if not isinstance(tr, dict) or "from" not in tr or "to" not in tr:
            raise FormatError(f"transition #{i}: needs 'from' and 'to'")
        value = tr.get("value", lattice.top.name)
        if value not in lattice:
            raise FormatError(f"transition #{i}: {value!r} is not an element of the lattice")
        key = (tr["from"], tr.get("action", actions[0]), tr["to"])
        eta[key] = eta.get(key, lattice.bottom) | lattice[value]
    raw_labels = data.get("labels", {})
    if not isinstance(raw_labels, dict):
        raise FormatError("labels: expected an object keyed by state")
    if any(isinstance(v, dict) for v in raw_labels.values()):
        labels = {}
        for s, entry in raw_labels.items():
            if isinstance(entry, list):
                entry = {p: lattice.top.name for p in entry}
            for p, v in _values_map(entry, lattice, f"labels of {s}").items():
                labels[(s, p)] = v
        return normalize_labeling(MvLabeledSystem(lattice, states, actions, eta, init, ap, labels))
    return MvTransitionSystem(lattice, states, actions, eta, init, ap, raw_labels)


def load_system(source, base_dir=None):
    """Load a system from a JSON path or parsed mapping (mv labels are normalized)."""
    data, where = load_source(source, base_dir)
    return system_from_dict(data, where)

"""Cut-wise model checking of mv-systems against mv-properties.

Every check reduces to classical checks on the cuts of a (possibly product)
system, one per join-irreducible element.  Cut systems are trimmed to the
states that lie on some infinite path before the classical back-end runs,
since only infinite paths produce traces.

The sweep in :func:`check` visits join-irreducibles from the top down and
stops at the first failing one, which is therefore maximal among the
failures.  A passing cut does not license skipping the cuts below it: a
transition valued below ``x`` is invisible in the ``x``-cut but present in
lower cuts.  :func:`degree` may prune, because scaling the system makes the
per-element outcome monotone.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import graphs
from .automata import powerset_alphabet
from .errors import AlphabetMismatchError, ModelError, MvCheckError, ResourceExhaustedError, TerminalStateError
from .properties import (DualPersistence, Invariant, OmegaRegular, OmegaRegularDet,
                         OmegaRegularNegDet, Persistence, RegularSafety, as_recognized)
from .system import MvTransitionSystem, cut_ts, format_letter, scale_ts, stutter_complete, terminal_states, trim

RABIN_MODES = ("all", "any")


@dataclass
class CounterTrace:
    """A path of a cut system violating the classical cut property.

    ``states`` is the path in the checked system (product states for
    automaton-based properties).  For ``kind == "lasso"`` the last state
    has an edge back to ``states[loop_start]``.  ``trace`` holds the labels
    of the underlying system states along the path.
    """

    kind: str
    states: list
    trace: list
    cut: object
    loop_start: int = None
    pair: tuple = None

    @property
    def stem(self):
        return self.states if self.loop_start is None else self.states[:self.loop_start]

    @property
    def cycle(self):
        return [] if self.loop_start is None else self.states[self.loop_start:]


@dataclass
class Verdict:
    holds: bool
    failing_element: object = None
    counterexample: CounterTrace = None
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.holds


@dataclass
class DegreeResult:
    value: object
    witnesses: dict = field(default_factory=dict)


# products

def _product(ts, q0, step, state_budget=None):
    lat = ts.lattice
    init = {}
    for s, v in ts.init.items():
        node = (s, step(q0, ts.labels[s]))
        init[node] = init.get(node, lat.bottom) | v
    order = list(init)
    seen = set(order)
    eta = {}
    i = 0
    while i < len(order):
        s, q = order[i]
        i += 1
        for a, t, v in ts.successors(s):
            node = (t, step(q, ts.labels[t]))
            eta[((s, q), a, node)] = v
            if node not in seen:
                if state_budget is not None and len(seen) >= state_budget:
                    raise ResourceExhaustedError(f"product exceeded the budget of {state_budget} states")
                seen.add(node)
                order.append(node)
    qs = []
    for _, q in order:
        if q not in qs:
            qs.append(q)
    return MvTransitionSystem(lat, order, ts.actions, eta, init, qs, {n: {n[1]} for n in order})


def _check_product_inputs(ts, A):
    if A.lattice is not ts.lattice:
        raise ModelError("system and automaton use different lattices")
    if set(A.alphabet) != set(powerset_alphabet(ts.ap)):
        raise AlphabetMismatchError("automaton alphabet must be all subsets of the system propositions")


def product_dfa(ts, A, state_budget=None):
    """Synchronous product with a deterministic automaton (reachable part).

    A product state ``(s, q)`` is labeled ``{q}``; the automaton moves on the
    label of the state being entered, including the initial one.
    """
    _check_product_inputs(ts, A)
    return _product(ts, A.q0, A.step, state_budget)


def product_rabin(ts, A, state_budget=None):
    """Product with a Rabin automaton; same graph as :func:`product_dfa`.

    Acceptance pairs are evaluated on the automaton component ``q`` of each
    product state, so sets of automaton states are never enumerated.
    """
    _check_product_inputs(ts, A)
    return _product(ts, A.q0, A.step, state_budget)


def product_buchi(ts, P, state_budget=None):
    _check_product_inputs(ts, P.automaton)
    q0, delta, _ = P.completed
    return _product(ts, q0, lambda q, a: delta[(q, a)], state_budget)


# classical back-ends

def classical_invariant(C, sat):
    """Shortest path from an initial state to a state violating ``sat``, or ``None``."""
    return graphs.shortest_path(sorted(C.init, key=C.order), C.successors,
                                lambda s: not sat(s))


def _require_total(C, nodes):
    dead = [s for s in nodes if not C.successors(s)]
    if dead:
        raise TerminalStateError(dead)


def classical_persistence(C, sat):
    """Nested depth-first search for a reachable cycle through a state violating ``sat``.

    Returns ``None`` when every path eventually stays in ``sat``, else a lasso
    ``(states, loop_start)``.
    """
    visited = set()
    flagged = set()
    for root in sorted(C.init, key=C.order):
        if root in visited:
            continue
        visited.add(root)
        stack = [(root, iter(C.successors(root)))]
        while stack:
            u, it = stack[-1]
            for v in it:
                if v not in visited:
                    visited.add(v)
                    stack.append((v, iter(C.successors(v))))
                    break
            else:
                stack.pop()
                if not C.successors(u):
                    raise TerminalStateError([u])
                if not sat(u):
                    cycle = _inner_dfs(C, u, flagged)
                    if cycle is not None:
                        stem = [x for x, _ in stack] + [u]
                        return stem + cycle, len(stem) - 1
    return None


def _inner_dfs(C, seed, flagged):
    # searches a path back to seed; returns the states strictly after seed
    stack = [(seed, iter(C.successors(seed)))]
    while stack:
        u, it = stack[-1]
        for v in it:
            if v == seed:
                return [x for x, _ in stack[1:]]
            if v not in flagged:
                flagged.add(v)
                stack.append((v, iter(C.successors(v))))
                break
        else:
            stack.pop()
    return None


def _lasso_into(C, reach, target, cycle):
    """Lasso from an initial state to ``target`` followed by ``cycle`` (a list starting at target)."""
    stem = graphs.shortest_path(sorted(C.init, key=C.order), C.successors,
                                lambda s: s == target)
    return stem[:-1] + cycle, len(stem) - 1


def classical_dpersistence(C, sat):
    """Every path visits ``sat`` infinitely often, unless some reachable cycle avoids it.

    Returns ``None`` or a lasso ``(states, loop_start)`` whose cycle stays
    outside ``sat``.
    """
    reach = C.reachable()
    _require_total(C, reach)
    bad = {s for s in reach if not sat(s)}

    def inner(s):
        return [t for t in C.successors(s) if t in bad]

    for comp in graphs.tarjan_scc(sorted(bad, key=C.order), inner):
        if graphs.nontrivial(comp, inner):
            target = min(comp, key=C.order)
            cyc = graphs.cycle_through(target, C.successors, set(comp))
            return _lasso_into(C, reach, target, cyc[:-1])
    return None


def _cycle_covering(C, comp):
    """A cycle inside the strongly connected ``comp`` visiting all of its states."""
    nodes = sorted(comp, key=C.order)
    if len(nodes) == 1:
        return nodes
    allowed = set(comp)
    out = [nodes[0]]
    for goal in nodes[1:] + [nodes[0]]:
        if goal in out and goal != nodes[0]:
            continue
        path = graphs.shortest_path([out[-1]], C.successors, lambda s, g=goal: s == g, allowed)
        out.extend(path[1:])
    return out[:-1]


def classical_rabin(C, pairs, mode="all", automaton_state=lambda s: s[1]):
    """Check Rabin pairs ``(H, K)`` over the automaton components of ``C``.

    ``mode="all"`` requires every path to satisfy every pair
    (eventually-always outside ``H`` and infinitely often in ``K``);
    ``mode="any"`` requires every path to satisfy at least one pair.
    Returns ``None`` or ``(states, loop_start, pair)``; ``pair`` names the
    violated pair in ``all`` mode and is ``None`` otherwise.
    """
    if mode not in RABIN_MODES:
        raise ValueError(f"unknown Rabin mode {mode!r}")
    reach = C.reachable()
    _require_total(C, reach)
    order = sorted(reach, key=C.order)

    def restricted(allowed):
        return lambda s: [t for t in C.successors(s) if t in allowed]

    if mode == "all" and pairs:
        for H, K in pairs:
            succ = restricted(reach)
            for comp in graphs.tarjan_scc(order, succ):
                hits = [s for s in comp if automaton_state(s) in H]
                if hits and graphs.nontrivial(comp, succ):
                    target = min(hits, key=C.order)
                    cyc = graphs.cycle_through(target, C.successors, set(comp))
                    return _lasso_into(C, reach, target, cyc[:-1]) + ((H, K),)
            outside = {s for s in reach if automaton_state(s) not in K}
            succ = restricted(outside)
            for comp in graphs.tarjan_scc([s for s in order if s in outside], succ):
                if graphs.nontrivial(comp, succ):
                    target = min(comp, key=C.order)
                    cyc = graphs.cycle_through(target, C.successors, set(comp))
                    return _lasso_into(C, reach, target, cyc[:-1]) + ((H, K),)
        return None
    # every pair must be violated by one strongly connected set (also the
    # "all" case with no pairs, where any infinite path is a violation)
    found = _violating_component(order, restricted, list(pairs), automaton_state)
    if found is None:
        return None
    cyc = _cycle_covering(C, found)
    return _lasso_into(C, reach, cyc[0], cyc) + (None,)


def _violating_component(nodes, restricted, pairs, automaton_state):
    work = [list(nodes)]
    while work:
        region = work.pop()
        succ = restricted(set(region))
        for comp in graphs.tarjan_scc(region, succ):
            if not graphs.nontrivial(comp, succ):
                continue
            qs = {automaton_state(s) for s in comp}
            live = [(H, K) for H, K in pairs if qs & K]
            blocking = next(((H, K) for H, K in live if not qs & H), None)
            if blocking is None:
                return comp
            K = blocking[1]
            rest = [s for s in comp if automaton_state(s) not in K]
            if rest:
                work.append(rest)
    return None


# dispatch

class _Task:
    """What to cut and how to judge each cut."""

    def __init__(self, ts, P, dual=False, stutter=False, rabin_pairs="all", state_budget=None):
        if P.lattice is not ts.lattice:
            raise ModelError("system and property use different lattices")
        if set(P.ap) != set(ts.ap):
            raise AlphabetMismatchError("system and property declare different propositions")
        if rabin_pairs not in RABIN_MODES:
            raise ValueError(f"unknown Rabin mode {rabin_pairs!r}")
        if dual:
            P = as_recognized(P)
        self.original = ts
        self.property = P
        self.rabin_pairs = rabin_pairs
        if stutter:
            ts = stutter_complete(ts)
        if not isinstance(P, (Invariant, RegularSafety)):
            dead = terminal_states(ts)
            if dead:
                raise TerminalStateError(dead)
        self.ts = ts
        self.product = not isinstance(P, (Invariant, Persistence, DualPersistence))
        if isinstance(P, Invariant):
            self.backend, self.sat = "invariant", self._formula_sat
        elif isinstance(P, Persistence):
            self.backend, self.sat = "persistence", self._formula_sat
        elif isinstance(P, DualPersistence):
            self.backend, self.sat = "dual-persistence", self._formula_sat
        elif isinstance(P, RegularSafety):
            self.system = product_dfa(ts, P.automaton, state_budget)
            self.backend = "invariant"
            self.sat = lambda x: lambda node: P.automaton.final_value(node[1]) >= x
        elif isinstance(P, OmegaRegularNegDet):
            self.system = product_buchi(ts, P, state_budget)
            self.backend = "persistence"
            self.sat = lambda x: lambda node: P.negated_final(node[1]) >= x
        elif isinstance(P, OmegaRegularDet):
            self.system = product_buchi(ts, P, state_budget)
            self.backend = "dual-persistence"
            self.sat = lambda x: lambda node: P.automaton.final_value(node[1]) >= x
        elif isinstance(P, OmegaRegular):
            self.system = product_rabin(ts, P.automaton, state_budget)
            self.backend = "rabin"
            self.sat = None
        else:
            raise ModelError(f"unsupported property {P!r}")
        if not self.product:
            self.system = ts

    def _formula_sat(self, x):
        phi, labels = self.property.formula, self.ts.labels
        return lambda s: phi.evaluate(labels[s]) >= x

    def pairs(self, x):
        return self.property.automaton.pairs_at(x)

    def cut(self, x):
        return trim(cut_ts(self.system, x))

    def underlying(self, node):
        return node[0] if self.product else node

    def trace_of(self, states):
        return [self.ts.labels[self.underlying(s)] for s in states]

    def run(self, x):
        C = self.cut(x)
        if self.backend == "invariant":
            path = classical_invariant(C, self.sat(x))
            if path is None:
                return None
            return CounterTrace("finite-path", path, self.trace_of(path), x)
        if self.backend == "rabin":
            found = classical_rabin(C, self.pairs(x), self.rabin_pairs)
            if found is None:
                return None
            states, loop, pair = found
            return CounterTrace("lasso", states, self.trace_of(states), x, loop, pair)
        back = classical_persistence if self.backend == "persistence" else classical_dpersistence
        found = back(C, self.sat(x))
        if found is None:
            return None
        states, loop = found
        return CounterTrace("lasso", states, self.trace_of(states), x, loop)


def check(ts, P, *, all_cuts=False, dual=False, stutter=False, rabin_pairs="all", state_budget=None):
    """Decide ``ts |= P`` by checking every join-irreducible cut.

    Cuts are visited from the top: the first failure found is a maximal
    failing element.  With ``all_cuts`` the sweep continues and every
    failure is collected in ``failures``.
    """
    task = _Task(ts, P, dual, stutter, rabin_pairs, state_budget)
    return _sweep(task, all_cuts)


def _sweep(task, all_cuts=False):
    lat = task.system.lattice
    pending = list(lat.join_irreducibles)
    failures = []
    while pending:
        x = lat.maximal(pending)
        pending.remove(x)
        cex = task.run(x)
        if cex is None:
            continue
        failures.append((x, cex))
        if not all_cuts:
            break
    if not failures:
        return Verdict(True)
    x, cex = failures[0]
    return Verdict(False, x, cex, failures)


def degree(ts, P, *, dual=False, stutter=False, rabin_pairs="all", state_budget=None):
    """Largest ``x`` with ``x & ts |= P``, computed over join-irreducibles.

    A success at ``x`` settles every element below ``x``.  On chains the
    boundary is located by binary search.
    """
    lat = ts.lattice

    def holds(x):
        return check(scale_ts(ts, x), P, dual=dual, stutter=stutter,
                     rabin_pairs=rabin_pairs, state_budget=state_budget).holds

    # validate inputs once even when every scaled check is vacuous
    _Task(ts, P, dual, stutter, rabin_pairs, state_budget)
    witnesses = {}
    value = lat.bottom
    if lat.is_chain:
        ji = sorted(lat.join_irreducibles, key=lambda m: len(lat.downset(m)))
        lo, hi = 0, len(ji)  # ji[:lo] hold, ji[hi:] fail
        while lo < hi:
            mid = (lo + hi) // 2
            if holds(ji[mid]):
                lo = mid + 1
            else:
                hi = mid
        for i, m in enumerate(ji):
            witnesses[m] = i < lo
        if lo:
            value = ji[lo - 1]
        return DegreeResult(value, witnesses)
    pending = list(lat.join_irreducibles)
    while pending:
        x = lat.maximal(pending)
        if holds(x):
            value = value | x
            for y in [y for y in pending if y <= x]:
                witnesses[y] = True
                pending.remove(y)
        else:
            witnesses[x] = False
            pending.remove(x)
    return DegreeResult(value, witnesses)


# replay

def replay(ts, P, cex, *, dual=False, stutter=False, rabin_pairs="all", state_budget=None):
    """Re-validate a counterexample; returns ``(ok, reason)``.

    The path must exist in the trimmed cut system, its trace must match the
    system labels, and it must violate the classical cut property.
    """
    task = _Task(ts, P, dual, stutter, rabin_pairs, state_budget)
    lat = task.system.lattice
    try:
        x = lat[cex.cut]
    except (KeyError, MvCheckError):
        return False, f"unknown cut element {cex.cut!r}"
    C = task.cut(x)
    states = [_as_state(s) for s in cex.states]
    known = set(C.states)
    if not states:
        return False, "empty path"
    for s in states:
        if s not in known:
            return False, f"state {s!r} is not on an infinite path of the {x.name}-cut"
    if states[0] not in C.init:
        return False, f"{states[0]!r} is not initial in the {x.name}-cut"
    for a, b in zip(states, states[1:]):
        if not C.has_edge(a, b):
            return False, f"no edge {a!r} -> {b!r} in the {x.name}-cut"
    trace = [frozenset(a) for a in cex.trace]
    if trace != task.trace_of(states):
        return False, "trace does not match the labels along the path"
    if task.backend == "invariant":
        if cex.kind != "finite-path":
            return False, "expected a finite path"
        if task.sat(x)(states[-1]):
            return False, "the last state satisfies the cut property"
        return True, f"reaches a state violating the {x.name}-cut invariant"
    if cex.kind != "lasso" or cex.loop_start is None or not 0 <= cex.loop_start < len(states):
        return False, "expected a lasso"
    if not C.has_edge(states[-1], states[cex.loop_start]):
        return False, "the lasso does not close"
    cycle = states[cex.loop_start:]
    if task.backend == "persistence":
        sat = task.sat(x)
        if all(sat(s) for s in cycle):
            return False, "the cycle never leaves the cut formula"
        return True, f"the cycle violates persistence in the {x.name}-cut"
    if task.backend == "dual-persistence":
        sat = task.sat(x)
        if any(sat(s) for s in cycle):
            return False, "the cycle visits the cut formula"
        return True, f"the cycle violates dual persistence in the {x.name}-cut"
    inf = {s[1] for s in cycle}
    pairs = task.pairs(x)
    if task.rabin_pairs == "all" and pairs:
        if cex.pair is None:
            return False, "no Rabin pair named"
        H, K = frozenset(cex.pair[0]), frozenset(cex.pair[1])
        if (H, K) not in pairs:
            return False, f"pair is not required at {x.name}"
        if not inf & H and inf & K:
            return False, "the cycle satisfies the named pair"
        return True, f"the cycle violates a required pair at {x.name}"
    if any(not inf & H and inf & K for H, K in pairs):
        return False, "the cycle satisfies some required pair"
    return True, f"the cycle violates every required pair at {x.name}"


def _as_state(s):
    if isinstance(s, list):
        return tuple(_as_state(x) for x in s)
    return s


# serialization

def _jsonable(s):
    if isinstance(s, tuple):
        return [_jsonable(x) for x in s]
    if isinstance(s, frozenset):
        return sorted(_jsonable(x) for x in s)
    return s


def _name(x):
    # cut elements read back from JSON stay plain names
    return getattr(x, "name", x)


def counter_trace_to_json(cex):
    out = {
        "kind": cex.kind,
        "cut": _name(cex.cut),
        "states": [_jsonable(s) for s in cex.states],
        "trace": [sorted(a) for a in cex.trace],
    }
    if cex.loop_start is not None:
        out["loop_start"] = cex.loop_start
    if cex.pair is not None:
        out["pair"] = {"H": sorted(cex.pair[0]), "K": sorted(cex.pair[1])}
    return out


def counter_trace_from_json(data):
    pair = data.get("pair")
    if pair is not None:
        pair = (frozenset(pair["H"]), frozenset(pair["K"]))
    return CounterTrace(data["kind"], [_as_state(s) for s in data["states"]],
                        [frozenset(a) for a in data["trace"]], data["cut"],
                        data.get("loop_start"), pair)


def verdict_to_json(verdict, degree_result=None):
    out = {"holds": verdict.holds}
    if degree_result is not None:
        out["degree"] = degree_result.value.name
    if not verdict.holds:
        out["failing_element"] = verdict.failing_element.name
        out["counterexample"] = counter_trace_to_json(verdict.counterexample)
        if len(verdict.failures) > 1:
            out["failures"] = [{"element": x.name, "counterexample": counter_trace_to_json(c)}
                               for x, c in verdict.failures]
    return out


def format_counter_trace(cex):
    """Human-readable rendering of a counterexample."""
    def show(s):
        return "(" + ",".join(map(show, s)) + ")" if isinstance(s, tuple) else str(s)

    lines = [f"counterexample ({cex.kind}) in the {_name(cex.cut)}-cut:"]
    for i, (s, a) in enumerate(zip(cex.states, cex.trace)):
        mark = "  <- cycle starts" if i == cex.loop_start else ""
        lines.append(f"  {show(s)} {format_letter(a)}{mark}")
    if cex.loop_start is not None:
        lines.append(f"  back to {show(cex.states[cex.loop_start])}")
    if cex.pair is not None:
        lines.append(f"  violates pair H={format_letter(cex.pair[0])} K={format_letter(cex.pair[1])}")
    return "\n".join(lines)

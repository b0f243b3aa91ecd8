import itertools

import pytest
from hypothesis import given, settings, strategies as st

from mvcheck import data_path
from mvcheck.automata import powerset_alphabet
from mvcheck.errors import FormatError, ModelError
from mvcheck.lattice import builtin_lattice
from mvcheck.system import (LassoWord, MvLabeledSystem, MvTransitionSystem, cut_ts,
                            finite_trace_degree, format_word, lasso_trace_degree, load_system,
                            normalize_labeling, parse_word, scale_ts, stutter_complete, sum_ts,
                            system_from_dict, terminal_states)

from oracles import (all_lassos, all_words, finite_trace_oracle, random_labeled_ts, random_ts,
                     trace_degree_oracle)

small_lattices = st.sampled_from(["l3", "B2xB2"]).map(builtin_lattice)
seeds = st.randoms(use_true_random=False)


def lasso(text):
    return LassoWord.parse(text)


class TestWords:
    def test_parse_lasso(self):
        w = lasso("{}{b}|{b,p}")
        assert w.stem == (frozenset(), frozenset({"b"}))
        assert w.cycle == (frozenset({"b", "p"}),)
        assert str(w) == "{}{b}|{b,p}"

    def test_symbols(self):
        assert parse_word("a b, c") == ("a", "b", "c")
        assert format_word(parse_word("{p,b}{}")) == "{b,p}{}"

    def test_positions_fold_into_cycle(self):
        w = lasso("{a}|{b}{c}")
        assert [w.letter(i) for i in range(5)] == [frozenset(x) for x in ["a", "b", "c", "b", "c"]]
        assert w.next(2) == 1

    @pytest.mark.parametrize("bad", ["{a}", "{a}||{b}", "{a}|"])
    def test_bad_lassos(self, bad):
        with pytest.raises((FormatError, ModelError)):
            lasso(bad)


class TestCuts:
    def test_button_top_cut_drops_m_edges(self, button):
        C = cut_ts(button["ts"], "T")
        assert ("s2", "tau", "s4") not in C.transitions
        assert ("s2", "tau", "s3") in C.transitions
        assert len(C.transitions) == 6
        assert len(cut_ts(button["ts"], "M").transitions) == 11

    def test_bottom_cut_is_total(self, button):
        ts = button["ts"]
        C = cut_ts(ts, "F")
        assert C.init == frozenset(ts.states)
        assert len(C.transitions) == len(ts.states) ** 2 * len(ts.actions)

    @given(small_lattices, seeds)
    def test_antitone(self, lat, rng):
        ts = random_ts(rng, lat, 4, ["a"])
        for m, n in itertools.product(lat.elements, repeat=2):
            if m <= n:
                assert cut_ts(ts, n).transitions <= cut_ts(ts, m).transitions
                assert cut_ts(ts, n).init <= cut_ts(ts, m).init

    @given(small_lattices, seeds)
    def test_scaling_commutes_with_cuts(self, lat, rng):
        ts = random_ts(rng, lat, 3, ["a"])
        for k, m in itertools.product(lat.elements, lat.join_irreducibles):
            scaled = cut_ts(scale_ts(ts, k), m)
            assert scaled.init == {s for s, v in ts.init.items() if (v & k) >= m}


class TestScaleAndSum:
    def test_scale_top_is_identity(self, button):
        ts = button["ts"]
        assert scale_ts(ts, "T").init == ts.init

    def test_scale_bottom_removes_behaviour(self, button):
        assert scale_ts(button["ts"], "F").init == {}

    @settings(max_examples=30)
    @given(small_lattices, seeds)
    def test_scaled_traces(self, lat, rng):
        ts = random_ts(rng, lat, 3, ["a"])
        k = rng.choice(lat.elements)
        for w in all_lassos(powerset_alphabet(["a"]), 2, 2):
            assert lasso_trace_degree(scale_ts(ts, k), w) == (lasso_trace_degree(ts, w) & k)

    @settings(max_examples=30)
    @given(small_lattices, seeds)
    def test_sum_traces_are_joined(self, lat, rng):
        a, b = random_ts(rng, lat, 3, ["a"]), random_ts(rng, lat, 2, ["a"])
        both = sum_ts(a, b)
        for w in all_lassos(powerset_alphabet(["a"]), 2, 2):
            assert lasso_trace_degree(both, w) == lasso_trace_degree(a, w) | lasso_trace_degree(b, w)

    def test_sum_requires_same_propositions(self, l3):
        a = MvTransitionSystem(l3, ["s"], ["a"], {}, {"s": "T"}, ["x"], {})
        b = MvTransitionSystem(l3, ["s"], ["a"], {}, {"s": "T"}, ["y"], {})
        with pytest.raises(ModelError):
            sum_ts(a, b)


class TestNormalization:
    def test_crisp_and_mv_labeled_button_agree(self, button):
        # the crisp five-state system and the normalized mv-labeled one agree on traces
        letters = powerset_alphabet(["b", "p", "r"])
        for w in all_words(letters, 4):
            assert finite_trace_degree(button["ts"], w) == finite_trace_degree(button["ts_mv"], w)
        for w in all_lassos(letters, 2, 2):
            assert lasso_trace_degree(button["ts"], w) == lasso_trace_degree(button["ts_mv"], w)

    def test_crisp_labels_give_an_isomorphic_system(self, l3):
        labeled = MvLabeledSystem(l3, ["s", "t"], ["a"], {("s", "a", "t"): "M", ("t", "a", "s"): "T"},
                                  {"s": "T"}, ["p"], {("t", "p"): "T"})
        out = normalize_labeling(labeled)
        assert out.states == (("s", "T"), ("t", "T"))
        assert out.labels == {("s", "T"): frozenset(), ("t", "T"): frozenset({"p"})}
        assert out.eta == {(("s", "T"), "a", ("t", "T")): l3["M"], (("t", "T"), "a", ("s", "T")): l3["T"]}

    @settings(max_examples=30)
    @given(small_lattices, seeds)
    def test_traces_preserved(self, lat, rng):
        labeled = random_labeled_ts(rng, lat, 3, ["a", "b"])
        normal = normalize_labeling(labeled)
        for w in all_words(powerset_alphabet(["a", "b"]), 3):
            direct = _labeled_finite_degree(labeled, w)
            assert finite_trace_degree(normal, w) == direct


def _labeled_finite_degree(tsm, word):
    """Finite-trace degree of an mv-labeled system by run enumeration.

    Each visited state reads the letter ``{p : L(s, p) >= d}`` at degree ``d``
    for some ``d`` in the image of the labeling; the run value meets those
    degrees with the initial and transition values.
    """
    lat = tsm.lattice
    image = {tsm.label(s, p) for s in tsm.states for p in tsm.ap} - {lat.bottom}

    def reads(s, letter):
        return lat.join_all(d for d in image
                            if frozenset(p for p in tsm.ap if tsm.label(s, p) >= d) == letter)

    best_read = lat.join_all(image)
    edges = {}
    for (u, _, t), v in tsm.eta.items():
        edges[(u, t)] = edges.get((u, t), lat.bottom) | v
    cont = {u: lat.top for u in tsm.states}
    changed = True
    while changed:
        changed = False
        for u in tsm.states:
            new = lat.join_all(v & best_read & cont[t] for (x, t), v in edges.items() if x == u)
            if new != cont[u]:
                cont[u] = new
                changed = True
    if not word:
        return lat.join_all(v & best_read & cont[s] for s, v in tsm.init.items())
    best = lat.bottom
    for run in itertools.product(tsm.states, repeat=len(word)):
        v = tsm.init.get(run[0], lat.bottom)
        for s, a in zip(run, word):
            v = v & reads(s, a)
        for s, t in zip(run, run[1:]):
            v = v & edges.get((s, t), lat.bottom)
        best = best | (v & cont[run[-1]])
    return best


class TestTraceDegrees:
    def test_empty_word(self, button):
        assert finite_trace_degree(button["ts"], ()) == button["ts"].lattice.top

    def test_button_prefix(self, button):
        # frozen from finite_trace_oracle
        assert finite_trace_degree(button["ts"], parse_word("{}{b}")).name == "T"

    def test_unmatched_label(self, button):
        assert finite_trace_degree(button["ts"], parse_word("{b}")).name == "F"
        assert lasso_trace_degree(button["ts"], lasso("|{r}")).name == "F"

    @pytest.mark.parametrize("word,value", [
        ("{}{b}|{b,p}", "T"),
        ("{}{b}{b,p}|{b,p,r}", "M"),
        ("{}{b}|{b,p,r}", "F"),
    ])
    def test_button_lassos(self, button, word, value):
        # frozen from trace_degree_oracle
        assert lasso_trace_degree(button["ts"], lasso(word)).name == value

    def test_unknown_proposition(self, button):
        with pytest.raises(ModelError):
            finite_trace_degree(button["ts"], parse_word("{zz}"))

    @settings(max_examples=40)
    @given(small_lattices, seeds)
    def test_lasso_degree_against_fixpoint(self, lat, rng):
        ts = random_ts(rng, lat, rng.randint(1, 4), ["a"], total=rng.random() < 0.7)
        for w in all_lassos(powerset_alphabet(["a"]), 2, 2):
            assert lasso_trace_degree(ts, w) == trace_degree_oracle(ts, w)

    @settings(max_examples=40)
    @given(small_lattices, seeds)
    def test_finite_degree_against_enumeration(self, lat, rng):
        ts = random_ts(rng, lat, rng.randint(1, 4), ["a"], total=rng.random() < 0.7)
        for w in all_words(powerset_alphabet(["a"]), 3):
            assert finite_trace_degree(ts, w) == finite_trace_oracle(ts, w)

    @settings(max_examples=30)
    @given(small_lattices, seeds)
    def test_cut_characterization(self, lat, rng):
        ts = random_ts(rng, lat, 3, ["a"])
        for w in all_lassos(powerset_alphabet(["a"]), 1, 2):
            value = lasso_trace_degree(ts, w)
            for m in lat.join_irreducibles:
                single = scale_ts(ts, m)
                assert (value >= m) == (lasso_trace_degree(single, w) == m)


class TestTerminals:
    def test_detect_and_complete(self, l3):
        ts = MvTransitionSystem(l3, ["s", "t"], ["go"], {("s", "go", "t"): "T"}, {"s": "T"}, [], {})
        assert terminal_states(ts) == ["t"]
        done = stutter_complete(ts)
        assert terminal_states(done) == []
        assert len(done.actions) == 2 and "go" in done.actions
        assert stutter_complete(done) is done


class TestLoading:
    def test_crisp_file(self, button):
        ts = button["ts"]
        assert ts.states == ("s0", "s1", "s2", "s3", "s4")
        assert ts.init == {"s0": ts.lattice.top}
        assert ts.labels["s4"] == {"b", "p", "r"}

    def test_mv_labels_are_normalized(self, button):
        ts = button["ts_mv"]
        assert ("s3", "M") in ts.states
        assert ts.labels[("s3", "M")] == {"b", "p", "r"}
        assert ts.labels[("s3", "T")] == {"b", "p"}

    def test_defaults(self):
        ts = system_from_dict({"lattice": "l3", "states": ["a"], "init": ["a"],
                               "transitions": [{"from": "a", "to": "a"}]})
        assert ts.eta == {("a", "tau", "a"): ts.lattice.top}

    @pytest.mark.parametrize("data,exc", [
        ({"lattice": "l3", "states": ["a"], "init": {"a": "Q"}, "transitions": []}, FormatError),
        ({"lattice": "l3", "states": ["a"], "init": {"b": "T"}, "transitions": []}, ModelError),
        ({"lattice": "l3", "states": ["a"], "init": {}, "transitions": [{"from": "a"}]}, FormatError),
        ({"lattice": "l3", "states": ["a"], "init": {}, "transitions": [], "ap": ["p"],
          "labels": {"a": ["q"]}}, ModelError),
        ({"states": ["a"]}, FormatError),
    ])
    def test_rejects(self, data, exc):
        with pytest.raises(exc):
            system_from_dict(data)

    def test_json_error_position(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"lattice": "l3",\n "states": [}')
        with pytest.raises(FormatError) as err:
            load_system(bad)
        assert ":2:" in str(err.value)

    def test_missing_file(self):
        with pytest.raises(FormatError):
            load_system("no/such/file.json")

    def test_shipped_data(self):
        assert load_system(data_path("afs2", "afs2.ts.json")).lattice is builtin_lattice("l3")

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from mvcheck import data_path
from mvcheck.errors import LatticeError, LatticeMismatchError
from mvcheck.lattice import (BUILTIN_NAMES, builtin_lattice, chain_lattice, lattice_from_dict,
                             law_report, load_lattice, product_lattice)

from oracles import brute_implies, brute_join_irreducibles

lattices = st.sampled_from(BUILTIN_NAMES).map(builtin_lattice)


def names(xs):
    return {x.name for x in xs}


class TestLoading:
    def test_l3_with_self_dual_middle(self):
        lat = lattice_from_dict({"elements": ["F", "M", "T"], "leq": [["F", "M"], ["M", "T"]],
                                 "neg": {"F": "T", "M": "M", "T": "F"}})
        assert lat.bottom.name == "F" and lat.top.name == "T"
        assert (~lat["M"]).name == "M"

    def test_boolean_square(self):
        lat = lattice_from_dict({"elements": ["00", "01", "10", "11"],
                                 "leq": [["00", "01"], ["00", "10"], ["01", "11"], ["10", "11"]],
                                 "neg": {"00": "11", "01": "10", "10": "01", "11": "00"}})
        assert (~lat["10"]).name == "01"
        assert (~lat["01"]).name == "10"

    def test_missing_lub(self):
        with pytest.raises(LatticeError) as err:
            lattice_from_dict({"elements": ["a", "b", "c"], "leq": [["c", "a"], ["c", "b"]],
                               "neg": {"a": "a", "b": "b", "c": "c"}})
        assert err.value.kind == "not-a-lattice"

    def test_not_distributive(self):
        # the diamond M3
        els = ["0", "a", "b", "c", "1"]
        leq = [["0", x] for x in "abc"] + [[x, "1"] for x in "abc"]
        neg = {"0": "1", "1": "0", "a": "a", "b": "b", "c": "c"}
        with pytest.raises(LatticeError) as err:
            lattice_from_dict({"elements": els, "leq": leq, "neg": neg})
        assert err.value.kind == "not-distributive"

    def test_negation_not_order_reversing(self):
        with pytest.raises(LatticeError) as err:
            lattice_from_dict({"elements": ["F", "M", "T"], "leq": [["F", "M"], ["M", "T"]],
                               "neg": {"F": "F", "M": "M", "T": "T"}})
        assert err.value.kind == "negation-not-de-morgan"

    def test_negation_not_involutive(self):
        # order-reversing on a 4-chain but not an involution
        with pytest.raises(LatticeError) as err:
            lattice_from_dict({"elements": ["a", "b", "c", "d"],
                               "leq": [["a", "b"], ["b", "c"], ["c", "d"]],
                               "neg": {"a": "d", "b": "c", "c": "a", "d": "a"}})
        assert err.value.kind in ("negation-not-involutive", "negation-not-de-morgan")

    def test_malformed(self):
        with pytest.raises(LatticeError):
            lattice_from_dict({"elements": ["a"], "leq": [["a", "zz"]], "neg": {"a": "a"}})

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_shipped_files_match_builtins(self, name):
        assert load_lattice(data_path("lattices", f"{name}.json")) is builtin_lattice(name)

    def test_builtin_lookup_is_case_insensitive(self):
        assert load_lattice("L3") is builtin_lattice("l3")


class TestConnectives:
    def test_implies_drops_to_consequent(self, l3):
        assert l3.connective("implies", l3["M"], l3["F"]) == l3["F"]

    def test_implies_top_when_ordered(self, l3):
        assert l3.connective("implies", l3["M"], l3["T"]) == l3["T"]

    def test_l5_negation(self):
        l5 = builtin_lattice("l5")
        assert l5.connective("neg", l5["L"]) == l5["U"]
        assert ~l5["M"] == l5["M"]

    def test_arity(self, l3):
        with pytest.raises(TypeError):
            l3.connective("neg", l3["M"], l3["T"])
        with pytest.raises(TypeError):
            l3.connective("meet", l3["M"])

    def test_cross_lattice(self, l3):
        l5 = builtin_lattice("l5")
        with pytest.raises(LatticeMismatchError):
            l3["M"] & l5["M"]


class TestJoinIrreducibles:
    def test_l3(self, l3):
        assert names(l3.join_irreducibles) == {"M", "T"}

    def test_boolean_square(self):
        assert names(builtin_lattice("B2xB2").join_irreducibles) == {"01", "10"}

    def test_b2(self):
        assert names(builtin_lattice("B2").join_irreducibles) == {"1"}

    def test_decompose(self):
        sq = builtin_lattice("B2xB2")
        assert names(sq.decompose(sq["11"])) == {"10", "01"}
        l3 = builtin_lattice("l3")
        assert l3.decompose(l3["F"]) == frozenset()
        # frozen from brute_join_irreducibles(l5) filtered by <= M
        l5 = builtin_lattice("l5")
        assert names(l5.decompose(l5["M"])) == {"U", "M"}

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_against_definition(self, name):
        lat = builtin_lattice(name)
        assert set(lat.join_irreducibles) == brute_join_irreducibles(lat)

    def test_maximal_prefers_lowest_index(self):
        sq = builtin_lattice("B2xB2")
        assert sq.maximal(sq.join_irreducibles).name == "01"


class TestLaws:
    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_report(self, name):
        report = law_report(builtin_lattice(name))
        assert all(report.values()), report

    @given(lattices, st.data())
    def test_residuation(self, lat, data):
        a, b, x = (data.draw(st.sampled_from(lat.elements)) for _ in range(3))
        assert ((x & a) <= b) == (x <= (a >> b))
        assert (a >> b) == brute_implies(lat, a, b)

    @given(lattices, st.data())
    def test_implication_top_iff_order(self, lat, data):
        a, b = (data.draw(st.sampled_from(lat.elements)) for _ in range(2))
        assert ((a >> b) == lat.top) == (a <= b)

    @given(lattices, st.data())
    def test_de_morgan(self, lat, data):
        a, b = (data.draw(st.sampled_from(lat.elements)) for _ in range(2))
        assert ~(a | b) == (~a & ~b)
        assert ~(a & b) == (~a | ~b)
        assert ~~a == a

    @given(lattices, st.data())
    def test_decomposition_rejoins(self, lat, data):
        a = data.draw(st.sampled_from(lat.elements))
        assert lat.join_all(lat.decompose(a)) == a

    @pytest.mark.parametrize("name", ["B2", "B2xB2"])
    def test_boolean_implication_is_material(self, name):
        lat = builtin_lattice(name)
        for a, b in itertools.product(lat.elements, repeat=2):
            assert (a >> b) == (~a | b)

    @settings(max_examples=25)
    @given(st.integers(2, 6), st.integers(2, 4))
    def test_chain_products(self, n, k):
        lat = product_lattice(chain_lattice([f"c{i}" for i in range(n)]),
                              chain_lattice([f"d{i}" for i in range(k)]))
        assert len(lat) == n * k
        assert len(lat.join_irreducibles) == (n - 1) + (k - 1)
        assert all(law_report(lat).values())


def test_interning_gives_identity():
    a = lattice_from_dict(builtin_lattice("l3").to_dict())
    assert a is builtin_lattice("l3")

"""Model checking of linear-time properties on multi-valued transition systems.

Truth values live in a finite distributive De Morgan lattice with residual
implication.  Checks are reduced to classical checks on the cuts of the
system at each join-irreducible element.
"""
from importlib import resources

from .automata import (MvBuchi, MvDFA, MvNFA, MvRabin, cut_automaton, det_buchi_to_rabin,
                       determinize, load_automaton, omega_degree, powerset_alphabet, rabin_union,
                       simplify_buchi, word_degree)
from .checker import (CounterTrace, DegreeResult, Verdict, check, classical_dpersistence,
                      classical_invariant, classical_persistence, classical_rabin, degree,
                      product_dfa, product_rabin, replay)
from .errors import (AlphabetMismatchError, FormatError, FormulaError, LatticeError,
                     LatticeMismatchError, ModelError, MvCheckError, ResourceExhaustedError,
                     TerminalStateError)
from .lattice import (BUILTIN_NAMES, Element, FiniteLattice, builtin_lattice, chain_lattice,
                      load_lattice, product_lattice)
from .mvcore import MvFormula, MvSet, cut, cut_sat, evaluate_formula, inclusion_degree, mvset_op, resolve
from .properties import (DualPersistence, Invariant, OmegaRegular, OmegaRegularDet,
                         OmegaRegularNegDet, Persistence, RegularSafety, closure_degree,
                         good_prefix_degree, load_property, property_degree, safety_liveness_split)
from .system import (ClassicalTransitionSystem, LassoWord, MvLabeledSystem, MvTransitionSystem,
                     cut_ts, finite_trace_degree, lasso_trace_degree, load_system, normalize_labeling,
                     scale_ts, stutter_complete, sum_ts)

__version__ = "0.1.0"

__all__ = [
    "AlphabetMismatchError",
    "builtin_lattice",
    "BUILTIN_NAMES",
    "chain_lattice",
    "check",
    "classical_dpersistence",
    "classical_invariant",
    "classical_persistence",
    "classical_rabin",
    "ClassicalTransitionSystem",
    "closure_degree",
    "CounterTrace",
    "cut",
    "cut_automaton",
    "cut_sat",
    "cut_ts",
    "degree",
    "DegreeResult",
    "det_buchi_to_rabin",
    "determinize",
    "DualPersistence",
    "Element",
    "evaluate_formula",
    "finite_trace_degree",
    "FiniteLattice",
    "FormatError",
    "FormulaError",
    "good_prefix_degree",
    "inclusion_degree",
    "Invariant",
    "lasso_trace_degree",
    "LassoWord",
    "LatticeError",
    "LatticeMismatchError",
    "load_automaton",
    "load_lattice",
    "load_property",
    "load_system",
    "ModelError",
    "MvBuchi",
    "MvCheckError",
    "MvDFA",
    "MvFormula",
    "MvLabeledSystem",
    "MvNFA",
    "MvRabin",
    "MvSet",
    "mvset_op",
    "MvTransitionSystem",
    "normalize_labeling",
    "omega_degree",
    "OmegaRegular",
    "OmegaRegularDet",
    "OmegaRegularNegDet",
    "Persistence",
    "powerset_alphabet",
    "product_dfa",
    "product_lattice",
    "product_rabin",
    "property_degree",
    "rabin_union",
    "RegularSafety",
    "replay",
    "resolve",
    "ResourceExhaustedError",
    "safety_liveness_split",
    "scale_ts",
    "simplify_buchi",
    "stutter_complete",
    "sum_ts",
    "TerminalStateError",
    "Verdict",
    "word_degree",
    "data_path",
]


def data_path(*parts):
    """Path of a file shipped in the package data directory."""
    return str(resources.files(__name__).joinpath("data", *parts))

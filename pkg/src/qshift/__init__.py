"""Quantifier shifts, Skolemization and intermediate predicate logics."""

from .core import (
    Var, Fn, Atom, Bottom, Top, And, Or, Implies, Forall, Exists, Sequent, Occurrence,
    BOTTOM, TOP, neg, free_vars, substitute, classify_quantifiers, shift_axiom, alpha_equal,
    ResourceLimitError,
)
from .parser import (
    parse_formula, parse_term, parse_sequent, parse_proof, parse_model, parse_interpretation,
    render, load, ParseError,
)
from .skolem import (
    skolemize, skolemize_structural, skolemize_andrews, skolemize_parallel, skolemize_sequent,
)
from .calculus import Proof, check, check_qfs, is_cut_free, has_atomic_axioms, expand_axiom, infer
from .transform import (
    TransformError, ndq, prenexify, correct_ljpp, deskolemize, deskolemize_trace,
)
from .kripke import (
    Frame, Model, ModelError, forces, frame_properties, classify_frame, axiom_valid_on_frame,
    check_incompleteness_witness,
)
from .cd5 import CD5Value, Interpretation, evaluate, valid_bounded, crosscheck_parallel

__version__ = "0.1.0"

"""Exact p-adic arithmetic: valuations, capped-precision numbers, series,
Hensel lifting, cells and Riemann sums, residue characters, and matrices."""

from .errors import (
    ConvergenceError, HypothesisError, NoRootError, NormAxiomError, NotAPowerError,
    PadicError, PadicZeroDivisionError, PrecisionError, PrimeMismatchError,
)
from .valuation import (
    NormClass, NormOracle, PowerProduct, abs_p, check_norm_axioms, classify_norm, vp,
)
from .padic import PadicNumber, dist_p, eq_mod_pk, from_rational, parse_padic, precision
from .series import TermGenerator, geometric_sum, linear_combination, sum_series
from .hensel import Polynomial, hensel_basic, hensel_refined, qth_root, unit_power_reduction
from .geometry import (
    Cell, CellMeasure, Relation, integrate_measure, integrate_qell, integrate_real, trichotomy,
)
from .residue import FiniteCharacter, ResidueClass, lift, reduce
from .linalg import (
    ModMatrix, PadicMatrix, RationalMatrix, det, involution_projections, is_glnzp,
    power_expansion_check, projection_identities, subgroup_checks, torsion_test,
    unipotent_shape,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "HypothesisError",
    "NoRootError",
    "NormAxiomError",
    "NotAPowerError",
    "PadicError",
    "PadicZeroDivisionError",
    "PrecisionError",
    "PrimeMismatchError",
    "NormClass",
    "NormOracle",
    "PowerProduct",
    "abs_p",
    "check_norm_axioms",
    "classify_norm",
    "vp",
    "PadicNumber",
    "dist_p",
    "eq_mod_pk",
    "from_rational",
    "parse_padic",
    "precision",
    "TermGenerator",
    "geometric_sum",
    "linear_combination",
    "sum_series",
    "Polynomial",
    "hensel_basic",
    "hensel_refined",
    "qth_root",
    "unit_power_reduction",
    "Cell",
    "CellMeasure",
    "Relation",
    "integrate_measure",
    "integrate_qell",
    "integrate_real",
    "trichotomy",
    "FiniteCharacter",
    "ResidueClass",
    "lift",
    "reduce",
    "ModMatrix",
    "PadicMatrix",
    "RationalMatrix",
    "det",
    "involution_projections",
    "is_glnzp",
    "power_expansion_check",
    "projection_identities",
    "subgroup_checks",
    "torsion_test",
    "unipotent_shape",
]

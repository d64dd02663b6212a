"""Exact computation of Frobenius-manifold structures from finite
commutative BV algebras with a trace.

The package validates the algebra axioms, builds a homotopy retract onto
cohomology, checks that the associated spectral-sequence-style filtration
degenerates, solves the master equation order by order in the deformation
variables, and extracts the flat metric, structure constants, and potential
of the induced Frobenius structure — all over exact rational arithmetic.
"""

from .bv import BVAlgebra, first_failure, validate_algebra, validate_all, validate_bv
from .cyclic import (good_basis_report, h_compatibility_report,
                     perfect_pairing_report, validate_cyclic)
from .degeneration import (TransferCalculus, closed_image_check,
                           degeneration_report, splitting_map,
                           verify_splitting)
from .descriptions import (InputError, algebra_from_doc, algebra_to_doc,
                           inner_product_from_doc, load_document)
from .exterior import WedgeBasis, ce_model, contraction_sign_identity
from .frobenius import (FrobeniusStructure, build_frobenius,
                        flatness_pairing_report, verify_frobenius,
                        zero_point_check)
from .grading import GradedMap, GradedSpace, SCALAR_SPACE, koszul_sign
from .pipeline import handle, run_pipeline
from .qme import (NegativePowerError, ObstructionError, QMESolution,
                  solve_qme, verify_qme)
from .retract import (InnerProduct, Retract, build_retract,
                      cohomology_report, verify_retract)
from .series import INF, OperatorSeries, VSeries
from .tau import TauSeries, TauSystem

__version__ = "0.1.0"

__all__ = [
    "BVAlgebra", "first_failure", "validate_algebra", "validate_all",
    "validate_bv",
    "good_basis_report", "h_compatibility_report",
    "perfect_pairing_report", "validate_cyclic",
    "TransferCalculus", "closed_image_check", "degeneration_report",
    "splitting_map", "verify_splitting",
    "InputError", "algebra_from_doc", "algebra_to_doc",
    "inner_product_from_doc", "load_document",
    "WedgeBasis", "ce_model", "contraction_sign_identity",
    "FrobeniusStructure", "build_frobenius", "flatness_pairing_report",
    "verify_frobenius", "zero_point_check",
    "GradedMap", "GradedSpace", "SCALAR_SPACE", "koszul_sign",
    "handle", "run_pipeline",
    "NegativePowerError", "ObstructionError", "QMESolution",
    "solve_qme", "verify_qme",
    "InnerProduct", "Retract", "build_retract", "cohomology_report",
    "verify_retract",
    "INF", "OperatorSeries", "VSeries",
    "TauSeries", "TauSystem",
    "__version__",
]

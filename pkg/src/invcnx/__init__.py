"""Exact computation of invariant affine connections for Lie algebras of vector fields on the plane."""
from .catalog import Expectation, CaseSpec, expected_result, get_case, parameter_regimes
from .errors import (ClosureError, ConstraintViolated, EvalSingular, InvcnxError, JetSingular,
                     NotTransitive, OracleSingular, ParamDegenerate, ParamSingular, ParamSpaceError,
                     ParseError, ProfileUnsupported, UnknownCase)
from .expr import Atom, Expr, Monomial
from .fiber import (FiberPoint, FiberSpace, IsotropyAction, fiber_contains, fiber_fixed_space,
                    is_transitive_at, isotropy_action, isotropy_basis)
from .geometry import (Christoffel, EndValuedOneForm, InvarianceReport, Jet2, LieAlgebraAction,
                       VectorField, jet2_at, lie_bracket, lie_derivative_connection,
                       lie_derivative_tensor, numeric_flow_oracle, verify_invariance)
from .grammar import format_expr, format_field, parse_expr, parse_field
from .report import run_full_report
from .scalars import ParamScalar, ParamSpace
from .solver import (Ansatz, AnsatzProfile, AffineSystem, SolutionSpace, assemble_system,
                     build_ansatz, case1_determinant, invariant_connection_space, solve_affine,
                     verify_characterization)

__version__ = "0.1.0"

__all__ = [
    "Atom", "Expr", "Monomial", "ParamScalar", "ParamSpace", "parse_expr", "format_expr",
    "parse_field", "format_field",
    "VectorField", "Christoffel", "EndValuedOneForm", "LieAlgebraAction", "Jet2", "InvarianceReport",
    "lie_bracket", "lie_derivative_connection", "lie_derivative_tensor", "verify_invariance",
    "jet2_at", "numeric_flow_oracle",
    "Ansatz", "AnsatzProfile", "AffineSystem", "SolutionSpace", "build_ansatz", "assemble_system",
    "solve_affine", "invariant_connection_space", "case1_determinant", "verify_characterization",
    "FiberPoint", "FiberSpace", "IsotropyAction", "is_transitive_at", "isotropy_basis",
    "isotropy_action", "fiber_fixed_space", "fiber_contains",
    "CaseSpec", "Expectation", "get_case", "expected_result", "parameter_regimes", "run_full_report",
    "InvcnxError", "ParseError", "ParamSpaceError", "ClosureError", "EvalSingular", "ParamSingular",
    "JetSingular", "OracleSingular", "ProfileUnsupported", "ParamDegenerate", "NotTransitive",
    "ConstraintViolated", "UnknownCase",
]

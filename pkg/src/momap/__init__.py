"""Exact symbolic verification of homotopy moment maps on T^a x R^b."""

from .cartan import (CartanElement, CartanFamily, cartan_cocycle_check, cartan_d, cartan_equiv_check,
                     isotopy_to_cartan_equiv, moment_from_cartan)
from .complex import (ActionError, LieAction, TotalCochain, cone_differential, equivariance_check,
                      invariance_check, morphism_check, tilde_equivariant, tilde_form, total_differential)
from .equivalence import (EquivalenceWitness, HomotopyMorphism, MomentFamily, build_homotopy_from_inner,
                          check_homotopy, extract_eta_from_homotopy, fixomega_certificate,
                          isotopy_to_equivalence, verify_equivalence, verify_inner_equivalence)
from .forms import (DifferentialForm, VectorField, contract, exterior_d, extended_cartan_residual,
                    find_primitive, lie_bracket, lie_derivative, wedge)
from .lie import LieAlgebra, ce_cohomology_dims, ce_differential, ce_is_coboundary
from .momentmap import (MomentMapCandidate, bridge_sign, cross_check, existence_hypotheses, f_from_phi,
                        obstruction_class, phi_from_f, solve_primitive, verify_linfty_direct,
                        verify_primitive)
from .parser import ParseError, parse_expression, parse_form, parse_scalar, parse_vector_field
from .scalars import ModelManifold, Point, ScalarFn
from .scenario import Scenario, ScenarioError
from .verdict import CrossCheckError, PreconditionError, Verdict

__version__ = "0.1.0"

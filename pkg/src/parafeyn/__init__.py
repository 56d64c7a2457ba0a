"""Parametric Feynman integrands, forest-formula renormalisation and moduli-space cells."""

from .errors import (DivergenceError, GraphValidationError, IntegrationError, KinematicsError,
                     ParafeynError, ScaleGuardError)
from .graphs import (Edge, Graph, Leg, Subgraph, coloured_isomorphic, contract, core_subgraphs,
                     delete, is_core, rank, spanning_trees, spanning_two_forests, subgraph)
from .kinematics import KinematicConfig, KinSymbol
from .polynomials import (GraphPolynomial, evaluate, first_symanzik, first_symanzik_oracle,
                          parse_polynomial, restrict_to_zero, second_symanzik, xi_polynomial)
from .power_counting import (ForestOfDivergents, divergence_forests, divergent_subgraphs,
                             forest_quotients, is_weinberg_convergent, superficial_degree)
from .moduli import (ModuliConfig, ModuliPoset, build_poset, colour_capacity, enumerate_admissible,
                     f_vector, face_relation, faces_at_infinity)
from .compactified import (Chart, FaceDescriptor, Flag, build_chart, face_regular_part, facets,
                           flags, pole_orders, polytope_vertices, pullback_scaling)
from .integration import (IntegrandFunction, IntegrationResult, simplex_integrate_mc,
                          simplex_integrate_quad)
from .renormalization import (RenormScheme, bare_integrand, forest_integrand,
                              local_subtracted_integrand, renormalised_integral)
from .amplitudes import IntegratorOptions, amplitude, feynman_integral

__version__ = "0.1.0"

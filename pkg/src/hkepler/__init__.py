from .constants import VERSION as __version__
from .geometry import CartPoint, CartState, CylState, group_mul, group_inverse, dilate, to_cylindrical, from_cylindrical
from .potential import PotentialParams, gauge_rho, potential_U, horizontal_gradient, sublaplacian_residual
from .dynamics import Observable, hamiltonian, vector_field, almost_poisson, time_reversed
from .integrals import IntegralValues, f1, f2, f3, evaluate_integrals, classify, relation_residual
from .integrator import IntegratorConfig, Trajectory, DriftReport, integrate, integrate_fixed, step_fixed_rk4, drift_report
from .surfaces import SurfaceSpec, SurfaceMesh, TraceConic, surface_residual, min_energy_residual, degenerate_locus, sample_surface, trace_conic
from .special import stationary_points, HeteroclinicCurve, heteroclinic_point, heteroclinic_time, radial_solution
from .verifier import QuadraticCandidate, AppendixConstants, integral_residual, tilde_coefficients, pde_residuals, linear_probe
from .config import RunConfig, ToleranceProfile, load_config
from .kepler_enums import IntegralCase, TerminationReason, ConicKind, SurfaceBranch, ExitCode
from .exceptions import *

"""Spacetime-algebra numerics for energy-momentum additivity of superposed free Maxwell fields."""
from .algebra import (Multivector, basis_blade, clifford_product, exterior,
                      format_multivector, grade_project, hodge_star,
                      hodge_star_inverse, left_contract, pseudoscalar, reverse,
                      right_contract, scalar, scalar_product, theta, theta_lower)
from .cylinder import (AnalyticScenario, CylinderSpec, EvolvedScenario,
                       SliceReport, additivity_report, flux_balance,
                       integrate_slice, verdict)
from .energy import (EnergyMomentum, check_riesz_identity, component_tensor,
                     cross_density, divergence_density, energy_momentum,
                     riesz_density)
from .errors import (ConfigError, GradeError, IncompatibleStatesError,
                     InvalidBladeError, RawFormatError, ResolutionError,
                     SetupError, StabilityError, StaError)
from .fields import (DomainSpec, FieldState, PulseSpec, cfl_limit, dirac_fd,
                     eval_pulse, evolve_leapfrog, maxwell_residual,
                     sample_pulses, superpose)

__version__ = "0.1.0"

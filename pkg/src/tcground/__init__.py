"""Ground state of the Tavis-Cummings model: exact block diagonalization
versus the coherent-state variational approximation."""

from .compare import (PRESETS, ComparisonRecord, RestrictedTrial, compare_point, fidelity,
                      restricted_trial)
from .model import ModelParams, ObservableSet, PhaseRegion, ProbabilityDistribution, classify_region
from .quantum import (GroundState, ScanPolicy, SectorHamiltonian, SectorSolution,
                      analytic_sector_energy, build_sector, find_ground, observables_q,
                      reduced_distributions, solve_sector)
from .semiclassical import (CriticalPoint, NuMaxPolicy, SurfacePoint, TrialCoefficients,
                            critical_point, energy_surface, observables_sc,
                            occupation_distribution, transition_order, trial_coefficients,
                            trial_lambda_distribution)

__version__ = "0.1.0"

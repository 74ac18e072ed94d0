"""Transfer-matrix spectral counting, hyperbolic walks in the upper
half plane, radius/phase recursions, backtrack statistics, an explicit
supermartingale, and Monte Carlo estimation of the integrated density
of states for the one-dimensional Anderson model."""

__version__ = "0.1.0"

from .errors import (AndersonWalkError, DegenerateEnergy, DenominatorNearZero,
                     HypothesisViolated, InsufficientSignal, InvalidBeta,
                     InvalidBound, LossOfPositivity, MarginViolated,
                     RefinementLimit, SizeLimit)
from .halfplane import HalfPlanePoint, Mat2, ProjectivePoint, d1, d2, \
    mobius_apply, rotation_matrix
from .model import (ModelParams, NoiseDistribution, RngStream, derive_params,
                    sample_noise, sigma_threshold)
from .spectrum import (FiniteHamiltonian, count_below, count_in_interval,
                       dense_eigenvalues)
from .transferwalk import (LyapunovEstimate, PassCount, WalkState,
                           WalkTrajectory, advance_walk, count_passes,
                           initial_state, lyapunov_estimate, m_bound,
                           max_jump_ratio, transfer_matrix, walk_trajectory)
from .prufer import (CorrectionSums, PruferState, correction_sums,
                     initial_prufer, logr_path, prufer_step, verify_cutetrick)
from .backtrack import (BacktrackReport, DriftedPath, EigenBacktrackResult,
                        TailTable, backtrack_tail_estimate, detect_backtracks,
                        eigen_vs_backtracks, kappa_max)
from .martingale import (MartingaleConstants, PiProcess, derive_constants,
                         initial_pi, pi_step, supermartingale_ratio,
                         verify_tail_bound)
from .ids import (HolderFit, IdsEstimate, estimate_ids, fit_holder_exponent,
                  free_ids, free_interval_mass, holder_bound, holder_exponent,
                  simon_taylor_cap)

"""Search-free direction-of-arrival estimation for coprime linear arrays.

Each uniform subarray is processed with MODE (polynomial rooting), which
leaves its estimates ambiguous modulo the subarray's aliasing period.  The
two ambiguous estimates are combined by projecting the residue pair onto
the line segments that the true angle traces on the residue torus.
"""

from .array_model import (CoprimeGeometry, SnapshotSet, SourceScenario, make_geometry,
                          model_covariance, sample_covariance, steering_matrix,
                          steering_vector, synthesize_snapshots)
from .disambiguator import (PairingResult, ProjectionResult, SegmentMap,
                            brute_force_project, build_segment_map, pair_and_project,
                            project_single, residues_to_psi_crt)
from .evaluation import grid_music, matched_errors, mse, stochastic_crb
from .exceptions import (CoprimeDOAError, DegreeDeficiency, EstimationFailure,
                         GeometryError, SubspaceCollapse)
from .kernels import BACKEND
from .mode_estimator import (FoldedEstimate, ModeCoefficients, estimate_subarray,
                             fold_to_fundamental, mode_fit, roots_to_angles)
from .sim import ExperimentConfig, run_sweep, run_trial
from .subspace import SubspaceDecomposition, decompose

__version__ = "0.1.0"

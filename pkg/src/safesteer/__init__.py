"""CLF/CBF-QP steering controller and scenario simulator on a 5-DOF
single-track lateral vehicle model."""

from .constraints import (BOX, CBF, CLF, DEFAULT_GAINS, ConstraintRow, GainSet,
                          LieBundle, ObstacleDisk, PointTarget, cbf_row, clf_row,
                          lie_bundle, steer_box_rows)
from .engine import (Metrics, StepRecord, TrajectoryLog, compute_metrics, run,
                     step)
from .qp import (INFEASIBLE, OPTIMAL, KKTReport, QPProblem, QPSolution,
                 certify_kkt, solve)
from .vehicle import (DEFAULT_PARAMS, ControlInput, ModelCoefficients,
                      VehicleParams, VehicleState, derive_coefficients,
                      integrate_step, state_derivative)
from .world import (PATH_TRACKING, POINT_TRACKING, SCENARIO_IDS, MovingObstacle,
                    ReferencePath, ScenarioConfig, build_scenario,
                    effective_radius, lateral_error, obstacle_position,
                    target_point)

__version__ = "0.1.0"

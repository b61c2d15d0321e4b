//! Homotopy continuation: total-degree (or linear-product) start systems
//! with the gamma trick, an RK4 predictor with a Newton corrector, and path
//! bookkeeping.

mod descent;
mod homotopy;
pub(crate) mod path;
mod solve;
mod start;

pub use descent::{Descent, DescentConfig, DescentEnd};
pub use homotopy::{FamilyHomotopy, Homotopy, ProjectiveHomotopy};
pub use path::{
    track_path, track_segment, FailureReason, PathState, Segment, TrackFailure, TrackerConfig,
};
pub use solve::{
    follow_path, follow_start_path, gamma_for, newton_refine, run_paths, solve_generic, solve_system, PathOutcome, PathStatus,
    RejectReason, Rejection, Solution, SolveConfig, SolveReport,
};
pub use start::{total_degree_start, LinearProductSystem, StartSystem, MAX_PATHS};

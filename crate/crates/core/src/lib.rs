//! Lower and upper bounds on the Skorokhod variation distance between two
//! flowpipes given as sequences of sampled polytope reach sets.
//!
//! The pipeline lifts both sampled pipes to time-explicit polytope
//! reachpipes, decides reachability in the δ-free space of the pair for the
//! minimum (`Φ_min`) and maximum (`Φ_max`) polytope distances, and binary
//! searches δ to obtain `(β_min, β_max)`.

pub mod distance;
pub mod error;
pub mod freespace;
pub mod geometry;
pub mod linprog;
pub mod oracle;
pub mod pipeline;
pub mod reachability;

pub use distance::{compute_bounds, coarse_upper_bound, decide_min, decide_var, BoundsOptions, DistanceBounds};
pub use error::{Error, Result};
pub use freespace::{
    build_boundary, EdgeInterval, FreeSpaceBoundary, PhiKind, PhiStrategy, PreparedPair, StrategyOptions,
    StrategyRegistry,
};
pub use geometry::{lift_time_explicit, norm_value, validate_polytope, NormKind, NormName, Polytope, Ppr, SampledPipe};
pub use pipeline::{load_instance, run_pipeline, PipelineOptions};
pub use reachability::{apply_window, decide_reachable, ReachBoundary};

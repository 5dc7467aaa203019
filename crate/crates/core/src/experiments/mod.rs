//! Instance generation, scaling studies, the maximal-function evaluator and
//! log-log exponent fitting.

mod fit;
mod generate;
mod maximal;
mod scaling;

pub use fit::fit_exponent;
pub use generate::{generate_instance, InstanceKind, InstanceSpec, BASE_RADIUS};
pub use maximal::{eval_maximal_ratio, eval_maximal_ratio_exhaustive, Shape};
pub use scaling::{scaling_run, trial_seed, ScalingResult, ScalingRow};

//! Regret accounting, packing numbers, assumption checks and the explicit
//! regret constants.

pub mod constants;
pub mod lipschitz;
pub mod packing;
pub mod regret;

pub use constants::{quadratic_sup_norm_gamma, zhoo_gamma};
pub use lipschitz::{
    local_weak_lipschitz_violations, sample_pairs, weak_lipschitz_violations, LocalWeakLipschitz,
    WeakLipschitzViolation,
};
pub use packing::{
    near_optimality_dimension_estimate, packing_number, GridSet, NearOptimalityEstimate, PackingEstimate,
};
pub use regret::{fit_loglog, loglog_slope, pseudo_regret, simple_regret_recommendation, RegretTrace, SlopeFit};

//! Admissible functions, their r-coordinate curvature functionals, strength
//! comparison and the preservation necessary condition.

pub mod floored;
mod function;
mod strength;
mod transform;

pub use function::{
    build_floored_hot_f, central_differences, make_custom, make_hot_concavity,
    make_power_concavity, make_power_log_concavity, AdmissibleFunction, ExactProfile, Family,
    Growth,
};
pub use strength::{
    compare_strength, composition_route, default_k_grid, default_preservation_r_grid,
    kappa_route, preservation_necessary, preservation_witness, Strength,
};
pub use transform::{
    check_sampling_grid, kappa, kappa_star_estimate, nu, sigma, DerivedTransform, Rigor,
};

/// h(x) = (1 + erf(x/2))/2, the hot profile.
pub fn hot_h(x: f64) -> f64 {
    crate::special::hot_h(x)
}

/// Default sampling grid for kappa_* and trend fits: 64 points on [1e2, 1e6].
pub fn default_r_grid() -> Vec<f64> {
    crate::grid::geometric(1e2, 1e6, 64)
}

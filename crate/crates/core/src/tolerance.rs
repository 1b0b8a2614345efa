//! Shared tolerance ladder.
//!
//! | rung | value | used for |
//! |------|-------|----------|
//! | exact | 1e-12 | linear algebra identities, analytic components |
//! | first derivative | 1e-8 | checks built on one finite difference |
//! | curvature | 1e-5 | checks built on second derivatives |

pub const EXACT: f64 = 1e-12;
pub const FIRST_DERIVATIVE: f64 = 1e-8;
pub const CURVATURE: f64 = 1e-5;

/// Determinant floor below which a metric counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;
/// Eigenvalue floor for positive definiteness.
pub const SPD_EIGEN: f64 = 1e-12;
/// Relative singular-value cut used for numerical null spaces.
pub const NULL_SPACE_REL: f64 = 1e-9;

/// Default step for first-derivative stencils.
pub const STEP_FIRST: f64 = 1e-5;
/// Default step for second-derivative (curvature) stencils.
pub const STEP_CURVATURE: f64 = 1e-3;

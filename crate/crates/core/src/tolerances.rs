//! Numeric tolerances used throughout the crate.
//!
//! Every threshold lives here so the inequality suites, the solvers and the
//! tests agree on one set of constants. Three tiers:
//!
//! * near machine precision (1e-12) for bookkeeping that is exact up to
//!   rounding (weight sums, duplicate merging, plan reassembly),
//! * solver precision (1e-9 .. 1e-8) for quantities produced by the exact
//!   LP and for feasibility of plans,
//! * check precision (1e-7 .. 1e-6) for inequalities whose two sides are
//!   assembled from several solver outputs.

/// Weights of a valid measure sum to 1 within this.
pub const WEIGHT_SUM_EPS: f64 = 1e-12;

/// Window around 1 inside which a raw weight vector is renormalized
/// instead of rejected.
pub const WEIGHT_RENORM_TOL: f64 = 1e-9;

/// Two atoms whose coordinates agree within this (max norm) are merged
/// during canonicalization.
pub const COORD_MERGE_TOL: f64 = 1e-12;

/// Row/column sums of a transport plan must match the marginals within this.
pub const MARGINAL_FEAS_TOL: f64 = 1e-9;

/// A stored plan cost must match the recomputed quadratic cost within this.
pub const COST_RECOMPUTE_TOL: f64 = 1e-9;

/// Relative duality-gap bound for certifying a plan optimal:
/// gap <= OPT_GAP_REL_TOL * (1 + cost).
pub const OPT_GAP_REL_TOL: f64 = 1e-9;

/// Projections of a three-marginal coupling must match the optimal
/// pairwise cost within this.
pub const THREE_PLAN_OPT_TOL: f64 = 1e-8;

/// Disintegrating and reassembling a plan reproduces it within this.
pub const PLAN_REASSEMBLY_TOL: f64 = 1e-12;

/// Constant-speed deviation allowed along geodesics.
pub const GEODESIC_SPEED_TOL: f64 = 1e-7;

/// Additive slack for the proximal and operator inequalities.
pub const INEQ_SLACK_TOL: f64 = 1e-7;

/// Additive slack for convexity along generalized geodesics.
pub const GG_CONVEXITY_TOL: f64 = 1e-8;

/// Empirical Lipschitz constants may exceed a declared bound by this.
pub const LIPSCHITZ_PROBE_TOL: f64 = 1e-8;

/// A declared fixed point must move less than this (in W2) under its map.
pub const FIXED_POINT_W2_TOL: f64 = 1e-7;

/// Two fixed-point witnesses closer than this (in W2) count as the same.
pub const FIX_MATCH_TOL: f64 = 1e-7;

/// A candidate counts as a fixed point of the proximal map when its
/// prox step is shorter than this.
pub const ARGMIN_FIX_STEP_TOL: f64 = 1e-6;

/// A candidate counts as a minimizer when its value is within this of the
/// best candidate value.
pub const ARGMIN_VALUE_TOL: f64 = 1e-8;

/// Slack for the telescoping bound on squared step lengths.
pub const ASYMPTOTIC_REG_TOL: f64 = 1e-6;

/// Tail tolerance for declaring a trace converged to a candidate limit.
pub const CONVERGENCE_TOL: f64 = 1e-4;

/// Default stopping parameters for iteration drivers.
pub const DEFAULT_STEP_TOL: f64 = 1e-8;
pub const DEFAULT_PATIENCE: usize = 3;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Default proximal solver parameters.
pub const PROX_DEFAULT_OUTER_MAX: usize = 100;
pub const PROX_DEFAULT_INNER_MAX: usize = 50;
pub const PROX_DEFAULT_TOL: f64 = 1e-10;
pub const PROX_DEFAULT_SHRINK: f64 = 0.5;

//! Exact discrete Wasserstein-2 transport: optimal plans, map-induced
//! plans, geodesics, generalized geodesics and disintegration.
//!
//! Costs are quadratic (squared Euclidean) throughout, solved exactly by a
//! network simplex on the transportation polytope — no entropic smoothing,
//! so the inequality checkers downstream see clean numbers. Plans returned
//! by [`solve_w2`] carry dual potentials; [`TransportPlan::is_certified_optimal`]
//! re-verifies the certificate whenever a consumer (e.g. [`geodesic`])
//! requires optimality.

mod simplex;

use ndarray::{Array2, Array3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{sq_dist, DiscreteMeasure, PointMap};
use crate::tolerances::{
    COST_RECOMPUTE_TOL, MARGINAL_FEAS_TOL, OPT_GAP_REL_TOL, THREE_PLAN_OPT_TOL,
};

/// A coupling of two discrete measures: a nonnegative matrix whose row sums
/// are the source weights and whose column sums are the target weights,
/// together with its quadratic cost.
#[derive(Debug, Clone)]
pub struct TransportPlan {
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    matrix: Array2<f64>,
    cost: f64,
    duals: Option<(Vec<f64>, Vec<f64>)>,
}

impl TransportPlan {
    /// Validates marginals and recomputes the cost. The plan carries no
    /// optimality certificate; use [`solve_w2`] for that.
    pub fn new(
        source: DiscreteMeasure,
        target: DiscreteMeasure,
        matrix: Array2<f64>,
    ) -> Result<Self> {
        let cost = quadratic_cost(&source, &target, &matrix);
        Self::with_parts(source, target, matrix, cost, None)
    }

    fn with_parts(
        source: DiscreteMeasure,
        target: DiscreteMeasure,
        matrix: Array2<f64>,
        cost: f64,
        duals: Option<(Vec<f64>, Vec<f64>)>,
    ) -> Result<Self> {
        if source.dim() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: source.dim(),
                got: target.dim(),
            });
        }
        if matrix.nrows() != source.len() || matrix.ncols() != target.len() {
            return Err(Error::MarginalViolation {
                detail: format!(
                    "matrix is {}x{}, measures have {} and {} atoms",
                    matrix.nrows(),
                    matrix.ncols(),
                    source.len(),
                    target.len()
                ),
            });
        }
        if matrix.iter().any(|&w| w < -MARGINAL_FEAS_TOL || !w.is_finite()) {
            return Err(Error::MarginalViolation { detail: "negative plan entry".into() });
        }
        for (i, &w) in source.weights().iter().enumerate() {
            let row: f64 = matrix.row(i).sum();
            if (row - w).abs() > MARGINAL_FEAS_TOL {
                return Err(Error::MarginalViolation {
                    detail: format!("row {i} sums to {row}, source weight is {w}"),
                });
            }
        }
        for (j, &w) in target.weights().iter().enumerate() {
            let col: f64 = matrix.column(j).sum();
            if (col - w).abs() > MARGINAL_FEAS_TOL {
                return Err(Error::MarginalViolation {
                    detail: format!("column {j} sums to {col}, target weight is {w}"),
                });
            }
        }
        let recomputed = quadratic_cost(&source, &target, &matrix);
        if (recomputed - cost).abs() > COST_RECOMPUTE_TOL * (1.0 + cost.abs()) {
            return Err(Error::MarginalViolation {
                detail: format!("stored cost {cost} differs from recomputed {recomputed}"),
            });
        }
        Ok(Self { source, target, matrix, cost, duals })
    }

    pub fn source(&self) -> &DiscreteMeasure {
        &self.source
    }

    pub fn target(&self) -> &DiscreteMeasure {
        &self.target
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Total quadratic cost of the coupling (the squared Wasserstein
    /// distance when the plan is optimal).
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// Square root of the cost.
    pub fn w2(&self) -> f64 {
        self.cost.max(0.0).sqrt()
    }

    /// Dual potentials, when the plan was produced by the solver.
    pub fn duals(&self) -> Option<(&[f64], &[f64])> {
        self.duals.as_ref().map(|(u, v)| (u.as_slice(), v.as_slice()))
    }

    /// Re-checks the optimality certificate: dual feasibility of the
    /// potentials plus a duality gap below `OPT_GAP_REL_TOL * (1 + cost)`.
    pub fn is_certified_optimal(&self) -> bool {
        let Some((u, v)) = &self.duals else { return false };
        let xs = self.source.points();
        let ys = self.target.points();
        // Reduced costs live on the scale of the largest pairwise cost,
        // which can exceed the plan cost when far atoms carry little mass;
        // allow slack on both scales.
        let mut max_entry = 0.0f64;
        for x in xs {
            for y in ys {
                max_entry = max_entry.max(sq_dist(x, y));
            }
        }
        let feas_tol = 1e-9 * (1.0 + self.cost.abs()) + 1e-11 * (1.0 + max_entry);
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                if sq_dist(x, y) - u[i] - v[j] < -feas_tol {
                    return false;
                }
            }
        }
        let dual_value: f64 = u
            .iter()
            .zip(self.source.weights())
            .map(|(ui, wi)| ui * wi)
            .sum::<f64>()
            + v.iter()
                .zip(self.target.weights())
                .map(|(vj, wj)| vj * wj)
                .sum::<f64>();
        (self.cost - dual_value).abs() <= OPT_GAP_REL_TOL * (1.0 + self.cost.abs())
    }

    /// Plan export format: `{"cost": .., "matrix": [[..]]}`.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<f64>> = (0..self.matrix.nrows())
            .map(|i| self.matrix.row(i).to_vec())
            .collect();
        serde_json::to_string_pretty(&PlanFile { cost: self.cost, matrix: rows })
            .expect("plan serialization cannot fail")
    }
}

#[derive(Serialize)]
struct PlanFile {
    cost: f64,
    matrix: Vec<Vec<f64>>,
}

fn quadratic_cost(source: &DiscreteMeasure, target: &DiscreteMeasure, matrix: &Array2<f64>) -> f64 {
    let mut total = 0.0;
    for (i, x) in source.points().iter().enumerate() {
        for (j, y) in target.points().iter().enumerate() {
            let w = matrix[[i, j]];
            if w > 0.0 {
                total += w * sq_dist(x, y);
            }
        }
    }
    total
}

/// Solves the quadratic-cost transportation problem between two measures.
/// The returned plan is feasible, optimal, and carries dual potentials as
/// its certificate.
pub fn solve_w2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<TransportPlan> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    // Zero-weight atoms would make the simplex basis degenerate in an
    // uninteresting way; solve the positive part and embed.
    let rows: Vec<usize> = (0..mu.len()).filter(|&i| mu.weights()[i] > 0.0).collect();
    let cols: Vec<usize> = (0..nu.len()).filter(|&j| nu.weights()[j] > 0.0).collect();
    let supply: Vec<f64> = rows.iter().map(|&i| mu.weights()[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| nu.weights()[j]).collect();
    let mut cost = Array2::<f64>::zeros((rows.len(), cols.len()));
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            cost[[a, b]] = sq_dist(&mu.points()[i], &nu.points()[j]);
        }
    }
    let sol = simplex::solve_transportation(&supply, &demand, &cost)?;

    let mut matrix = Array2::<f64>::zeros((mu.len(), nu.len()));
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            matrix[[i, j]] = sol.flow[[a, b]];
        }
    }
    // Extend the potentials to zero-weight atoms so the certificate stays
    // dual-feasible on the full support.
    let mut u = vec![0.0; mu.len()];
    let mut v = vec![0.0; nu.len()];
    for (a, &i) in rows.iter().enumerate() {
        u[i] = sol.row_potentials[a];
    }
    for (b, &j) in cols.iter().enumerate() {
        v[j] = sol.col_potentials[b];
    }
    for i in 0..mu.len() {
        if mu.weights()[i] > 0.0 {
            continue;
        }
        u[i] = cols
            .iter()
            .map(|&j| sq_dist(&mu.points()[i], &nu.points()[j]) - v[j])
            .fold(f64::INFINITY, f64::min);
        if !u[i].is_finite() {
            u[i] = 0.0;
        }
    }
    for j in 0..nu.len() {
        if nu.weights()[j] > 0.0 {
            continue;
        }
        v[j] = (0..mu.len())
            .map(|i| sq_dist(&mu.points()[i], &nu.points()[j]) - u[i])
            .fold(f64::INFINITY, f64::min);
        if !v[j].is_finite() {
            v[j] = 0.0;
        }
    }
    TransportPlan::with_parts(mu.clone(), nu.clone(), matrix, sol.cost, Some((u, v)))
}

/// Wasserstein-2 distance between two measures.
pub fn w2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    Ok(solve_w2(mu, nu)?.w2())
}

/// Squared Wasserstein-2 distance between two measures.
pub fn w2_squared(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<f64> {
    Ok(solve_w2(mu, nu)?.cost())
}

/// The plan concentrated on the graph of `map`: atom i of `mu` goes to its
/// image. Feasible between `mu` and the push-forward, but in general not
/// optimal (it carries no certificate).
pub fn map_induced_plan(mu: &DiscreteMeasure, map: &PointMap) -> Result<TransportPlan> {
    if map.dim() != mu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: map.dim() });
    }
    let target = mu.pushforward(map)?;
    let mut matrix = Array2::<f64>::zeros((mu.len(), target.len()));
    for (i, p) in mu.points().iter().enumerate() {
        let image = map.apply(p);
        let j = target
            .points()
            .iter()
            .position(|q| {
                q.iter()
                    .zip(&image)
                    .all(|(a, b)| (a - b).abs() <= crate::tolerances::COORD_MERGE_TOL)
            })
            .ok_or_else(|| Error::SolverFailure {
                detail: "image atom missing after canonicalization".into(),
            })?;
        matrix[[i, j]] += mu.weights()[i];
    }
    TransportPlan::new(mu.clone(), target, matrix)
}

/// Point on the constant-speed geodesic induced by a certified-optimal
/// plan: push-forward of the plan under (x, y) -> (1-t)x + ty.
pub fn geodesic(plan: &TransportPlan, t: f64) -> Result<DiscreteMeasure> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TOutOfRange { t });
    }
    if !plan.is_certified_optimal() {
        return Err(Error::PlanNotOptimal);
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (i, x) in plan.source.points().iter().enumerate() {
        for (j, y) in plan.target.points().iter().enumerate() {
            let w = plan.matrix[[i, j]];
            if w > 0.0 {
                points.push(interpolate(x, y, t));
                weights.push(w);
            }
        }
    }
    Ok(DiscreteMeasure::new(points, weights)?.canonical())
}

fn interpolate(x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| (1.0 - t) * a + t * b).collect()
}

/// A three-marginal coupling whose pairwise projections onto (base, first)
/// and (base, second) are optimal plans. Supports generalized geodesics.
#[derive(Debug, Clone)]
pub struct ThreePlan {
    base: DiscreteMeasure,
    first: DiscreteMeasure,
    second: DiscreteMeasure,
    tensor: Array3<f64>,
}

impl ThreePlan {
    /// Validates the marginal constraints and certifies both pairwise
    /// projections by cost comparison against a fresh solve.
    pub fn new(
        base: DiscreteMeasure,
        first: DiscreteMeasure,
        second: DiscreteMeasure,
        tensor: Array3<f64>,
    ) -> Result<Self> {
        let (n0, n1, n2) = tensor.dim();
        if n0 != base.len() || n1 != first.len() || n2 != second.len() {
            return Err(Error::MarginalViolation { detail: "tensor shape mismatch".into() });
        }
        for (k, (measure, axis)) in [(&base, 0usize), (&first, 1), (&second, 2)]
            .into_iter()
            .enumerate()
        {
            for (idx, &w) in measure.weights().iter().enumerate() {
                let mut sum = 0.0;
                for i in 0..n0 {
                    for j in 0..n1 {
                        for l in 0..n2 {
                            let coord = [i, j, l][axis];
                            if coord == idx {
                                sum += tensor[[i, j, l]];
                            }
                        }
                    }
                }
                if (sum - w).abs() > MARGINAL_FEAS_TOL {
                    return Err(Error::MarginalViolation {
                        detail: format!("marginal {k} atom {idx}: {sum} vs {w}"),
                    });
                }
            }
        }
        let plan = Self { base, first, second, tensor };
        for (pair, opt) in [
            (plan.project_base_first()?, solve_w2(&plan.base, &plan.first)?),
            (plan.project_base_second()?, solve_w2(&plan.base, &plan.second)?),
        ] {
            if (pair.cost() - opt.cost()).abs() > THREE_PLAN_OPT_TOL * (1.0 + opt.cost()) {
                return Err(Error::PlanNotOptimal);
            }
        }
        Ok(plan)
    }

    pub fn base(&self) -> &DiscreteMeasure {
        &self.base
    }

    pub fn first(&self) -> &DiscreteMeasure {
        &self.first
    }

    pub fn second(&self) -> &DiscreteMeasure {
        &self.second
    }

    pub fn tensor(&self) -> &Array3<f64> {
        &self.tensor
    }

    fn project_base_first(&self) -> Result<TransportPlan> {
        let (n0, n1, n2) = self.tensor.dim();
        let mut matrix = Array2::<f64>::zeros((n0, n1));
        for i in 0..n0 {
            for j in 0..n1 {
                for l in 0..n2 {
                    matrix[[i, j]] += self.tensor[[i, j, l]];
                }
            }
        }
        TransportPlan::new(self.base.clone(), self.first.clone(), matrix)
    }

    fn project_base_second(&self) -> Result<TransportPlan> {
        let (n0, n1, n2) = self.tensor.dim();
        let mut matrix = Array2::<f64>::zeros((n0, n2));
        for i in 0..n0 {
            for j in 0..n1 {
                for l in 0..n2 {
                    matrix[[i, l]] += self.tensor[[i, j, l]];
                }
            }
        }
        TransportPlan::new(self.base.clone(), self.second.clone(), matrix)
    }
}

/// Glues the optimal plans (base, mu1) and (base, mu2) by conditional
/// independence over the base: `tensor[i,j,k] = p01[i,j] * p02[i,k] / w0[i]`.
pub fn build_three_plan(
    mu0: &DiscreteMeasure,
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
) -> Result<ThreePlan> {
    let p01 = solve_w2(mu0, mu1)?;
    let p02 = solve_w2(mu0, mu2)?;
    let mut tensor = Array3::<f64>::zeros((mu0.len(), mu1.len(), mu2.len()));
    for (i, &w0) in mu0.weights().iter().enumerate() {
        if w0 <= 0.0 {
            continue;
        }
        for j in 0..mu1.len() {
            let a = p01.matrix()[[i, j]];
            if a <= 0.0 {
                continue;
            }
            for k in 0..mu2.len() {
                let b = p02.matrix()[[i, k]];
                if b > 0.0 {
                    tensor[[i, j, k]] = a * b / w0;
                }
            }
        }
    }
    ThreePlan::new(mu0.clone(), mu1.clone(), mu2.clone(), tensor)
}

/// Point on the generalized geodesic between the first and second marginal
/// with the given base: push-forward of the coupling under
/// (x0, x1, x2) -> (1-t)x1 + t*x2.
pub fn generalized_geodesic(three: &ThreePlan, t: f64) -> Result<DiscreteMeasure> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::TOutOfRange { t });
    }
    let (n0, n1, n2) = three.tensor.dim();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..n0 {
        for j in 0..n1 {
            for k in 0..n2 {
                let w = three.tensor[[i, j, k]];
                if w > 0.0 {
                    points.push(interpolate(&three.first.points()[j], &three.second.points()[k], t));
                    weights.push(w);
                }
            }
        }
    }
    Ok(DiscreteMeasure::new(points, weights)?.canonical())
}

/// Conditional measures of a plan given the source atom.
#[derive(Debug, Clone)]
pub struct Disintegration {
    source: DiscreteMeasure,
    target: DiscreteMeasure,
    /// `conditionals[i]` is the normalized row i of the plan on the target
    /// support; `None` for zero-weight source atoms (reported in
    /// [`Disintegration::skipped_rows`]).
    conditionals: Vec<Option<DiscreteMeasure>>,
    skipped_rows: Vec<usize>,
}

impl Disintegration {
    pub fn conditionals(&self) -> &[Option<DiscreteMeasure>] {
        &self.conditionals
    }

    pub fn conditional(&self, i: usize) -> Option<&DiscreteMeasure> {
        self.conditionals.get(i).and_then(|c| c.as_ref())
    }

    pub fn skipped_rows(&self) -> &[usize] {
        &self.skipped_rows
    }

    /// Rebuilds the plan as w_i * conditional_i; inverse of
    /// [`disintegrate`] up to rounding.
    pub fn reassemble(&self) -> Result<TransportPlan> {
        let mut matrix = Array2::<f64>::zeros((self.source.len(), self.target.len()));
        for (i, cond) in self.conditionals.iter().enumerate() {
            let Some(cond) = cond else { continue };
            let wi = self.source.weights()[i];
            for (j, &cw) in cond.weights().iter().enumerate() {
                matrix[[i, j]] = wi * cw;
            }
        }
        TransportPlan::new(self.source.clone(), self.target.clone(), matrix)
    }
}

/// Family of conditional target measures of the plan given each source
/// atom. Zero-weight rows are skipped and reported.
pub fn disintegrate(plan: &TransportPlan) -> Result<Disintegration> {
    let mut conditionals = Vec::with_capacity(plan.source.len());
    let mut skipped = Vec::new();
    for (i, &wi) in plan.source.weights().iter().enumerate() {
        if wi <= 0.0 {
            conditionals.push(None);
            skipped.push(i);
            continue;
        }
        let weights: Vec<f64> = plan.matrix.row(i).iter().map(|&x| (x / wi).max(0.0)).collect();
        // Keep the full target support so indices line up for reassembly.
        let cond = DiscreteMeasure::new(plan.target.points().to_vec(), weights)?;
        conditionals.push(Some(cond));
    }
    Ok(Disintegration {
        source: plan.source.clone(),
        target: plan.target.clone(),
        conditionals,
        skipped_rows: skipped,
    })
}

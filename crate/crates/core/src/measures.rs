//! Finitely supported probability measures on R^d and their elementary
//! calculus: construction, second moments, push-forwards and projections.
//!
//! Everything in the crate works on [`DiscreteMeasure`]: a list of support
//! points with nonnegative weights summing to one. All values are immutable
//! after construction; operations return new measures.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{COORD_MERGE_TOL, WEIGHT_RENORM_TOL};

/// A finitely supported probability measure on R^d.
///
/// Invariants (enforced at construction):
/// * every point has length `dim`,
/// * every weight is nonnegative and all coordinates are finite,
/// * weights sum to 1 within [`crate::tolerances::WEIGHT_SUM_EPS`].
///
/// Duplicate points are permitted; [`DiscreteMeasure::canonical`] merges
/// them.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from raw points and weights.
    ///
    /// Weights within [`WEIGHT_RENORM_TOL`] of summing to 1 are renormalized
    /// (the largest weight absorbs the rounding residual so the sum is
    /// exactly 1.0); anything further off is rejected.
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite { what: "point coordinate".into() });
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { what: format!("weight {i}") });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { index: i, value: w });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_RENORM_TOL {
            return Err(Error::WeightSumOutOfTolerance { sum });
        }
        let mut weights: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        // Push the rounding residual into the heaviest atom.
        let residual = 1.0 - weights.iter().sum::<f64>();
        if residual != 0.0 {
            let imax = weights
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            weights[imax] += residual;
        }
        Ok(Self { dim, points, weights })
    }

    /// Measure with uniform weights 1/n on the given points.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::EmptySupport);
        }
        Self::new(points, vec![1.0 / n as f64; n])
    }

    /// Point mass at `point`.
    pub fn dirac(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![point], vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Second moment: sum of w_i * ||x_i||^2. Always finite for valid
    /// measures, which is what makes the convergence monitors well-posed.
    pub fn second_moment(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * sq_norm(p))
            .sum()
    }

    /// Weighted mean of the support points.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (mi, pi) in m.iter_mut().zip(p) {
                *mi += w * pi;
            }
        }
        m
    }

    /// Merges atoms whose coordinates agree within [`COORD_MERGE_TOL`]
    /// (summing weights, keeping the first representative), drops atoms of
    /// zero weight, and sorts the support lexicographically. Idempotent;
    /// preserves total mass and second moment up to rounding.
    pub fn canonical(&self) -> Self {
        let mut reps: Vec<Vec<f64>> = Vec::with_capacity(self.len());
        let mut acc: Vec<f64> = Vec::with_capacity(self.len());
        for (p, &w) in self.points.iter().zip(&self.weights) {
            match reps.iter().position(|r| max_coord_diff(r, p) <= COORD_MERGE_TOL) {
                Some(k) => acc[k] += w,
                None => {
                    reps.push(p.clone());
                    acc.push(w);
                }
            }
        }
        let mut atoms: Vec<(Vec<f64>, f64)> = reps
            .into_iter()
            .zip(acc)
            .filter(|(_, w)| *w > 0.0)
            .collect();
        if atoms.is_empty() {
            // All-zero weights cannot happen for a valid measure; keep the
            // first atom to stay total.
            atoms.push((self.points[0].clone(), 0.0));
        }
        atoms.sort_by(|a, b| lex_cmp(&a.0, &b.0));
        let (points, weights) = atoms.into_iter().unzip();
        Self { dim: self.dim, points, weights }
    }

    /// True when the canonical forms agree atom by atom within `tol`
    /// (coordinates in max norm, weights absolutely).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        let a = self.canonical();
        let b = other.canonical();
        a.len() == b.len()
            && a.points
                .iter()
                .zip(&b.points)
                .all(|(p, q)| max_coord_diff(p, q) <= tol)
            && a.weights
                .iter()
                .zip(&b.weights)
                .all(|(u, v)| (u - v).abs() <= tol)
    }

    /// Push-forward under a point map: images of the support with unchanged
    /// weights, then canonicalized so coinciding images merge.
    pub fn pushforward(&self, map: &PointMap) -> Result<Self> {
        if map.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: map.dim() });
        }
        let points: Vec<Vec<f64>> = self.points.iter().map(|p| map.apply(p)).collect();
        for p in &points {
            if p.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: p.len() });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite { what: "mapped point".into() });
            }
        }
        Ok(Self { dim: self.dim, points, weights: self.weights.clone() }.canonical())
    }

    /// Push-forward under the metric projection of a fixed-set witness.
    /// Every atom of the result must satisfy the witness' membership test.
    pub fn project_onto(&self, fix: &FixedSetWitness) -> Result<Self> {
        let mut points = Vec::with_capacity(self.len());
        for (i, p) in self.points.iter().enumerate() {
            let q = fix.project(p);
            if !fix.contains(&q) {
                return Err(Error::ProjectionFailure { index: i });
            }
            points.push(q);
        }
        Ok(Self { dim: self.dim, points, weights: self.weights.clone() }.canonical())
    }

    /// Reads the measure file format: `{"dim": d, "points": [[..]], "weights": [..]}`.
    /// Omitted weights mean uniform 1/n.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeasureFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let measure = match file.weights {
            Some(w) => Self::new(file.points, w)?,
            None => Self::uniform(file.points)?,
        };
        if measure.dim != file.dim {
            return Err(Error::DimensionMismatch { expected: file.dim, got: measure.dim });
        }
        Ok(measure)
    }

    pub fn to_json(&self) -> String {
        let file = MeasureFile {
            dim: self.dim,
            points: self.points.clone(),
            weights: Some(self.weights.clone()),
        };
        serde_json::to_string_pretty(&file).expect("measure serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    dim: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

/// Builds a measure from points and weights (see [`DiscreteMeasure::new`]).
pub fn make_discrete(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<DiscreteMeasure> {
    DiscreteMeasure::new(points, weights)
}

/// Second moment of a measure.
pub fn second_moment(mu: &DiscreteMeasure) -> f64 {
    mu.second_moment()
}

/// Push-forward of `mu` under `map`.
pub fn pushforward(mu: &DiscreteMeasure, map: &PointMap) -> Result<DiscreteMeasure> {
    mu.pushforward(map)
}

/// Push-forward of `mu` under the metric projection of `fix`.
pub fn projection_measure(mu: &DiscreteMeasure, fix: &FixedSetWitness) -> Result<DiscreteMeasure> {
    mu.project_onto(fix)
}

type PointFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type MemberFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A deterministic map R^d -> R^d, optionally carrying a witness for its
/// fixed-point set. The callable must be total and bitwise deterministic.
#[derive(Clone)]
pub struct PointMap {
    dim: usize,
    apply: PointFn,
    fixed_set: Option<FixedSetWitness>,
}

impl PointMap {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self { dim, apply: Arc::new(f), fixed_set: None }
    }

    pub fn with_fixed_set(mut self, fix: FixedSetWitness) -> Self {
        self.fixed_set = Some(fix);
        self
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, |x| x.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.apply)(x)
    }

    pub fn fixed_set(&self) -> Option<&FixedSetWitness> {
        self.fixed_set.as_ref()
    }

    /// The residual map x -> x - T(x).
    pub fn residual(&self) -> Self {
        let inner = self.apply.clone();
        Self::new(self.dim, move |x| {
            let tx = inner(x);
            x.iter().zip(&tx).map(|(a, b)| a - b).collect()
        })
    }
}

impl std::fmt::Debug for PointMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PointMap")
            .field("dim", &self.dim)
            .field("has_fixed_set", &self.fixed_set.is_some())
            .finish()
    }
}

/// Witness for a closed convex set: a membership test, the metric
/// projection onto the set, and optionally a few member points.
///
/// Contract (not checkable for all of R^d, so spot-checked where used):
/// `contains(project(x))` holds for every x and `project` is idempotent
/// within [`COORD_MERGE_TOL`].
#[derive(Clone)]
pub struct FixedSetWitness {
    membership: MemberFn,
    projection: PointFn,
    sample: Option<Vec<Vec<f64>>>,
}

impl FixedSetWitness {
    pub fn new<M, P>(membership: M, projection: P) -> Self
    where
        M: Fn(&[f64]) -> bool + Send + Sync + 'static,
        P: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self { membership: Arc::new(membership), projection: Arc::new(projection), sample: None }
    }

    pub fn with_sample(mut self, sample: Vec<Vec<f64>>) -> Self {
        self.sample = Some(sample);
        self
    }

    /// Witness for the singleton {point}.
    pub fn singleton(point: Vec<f64>) -> Self {
        let p = point.clone();
        let q = point.clone();
        Self::new(
            move |x| max_coord_diff(x, &p) <= COORD_MERGE_TOL,
            move |_| q.clone(),
        )
        .with_sample(vec![point])
    }

    /// Witness for an axis-aligned box given by per-coordinate bounds.
    pub fn rectangle(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let lo = lower.clone();
        let hi = upper.clone();
        let lo2 = lower.clone();
        let hi2 = upper.clone();
        Self::new(
            move |x| {
                x.iter()
                    .enumerate()
                    .all(|(k, &c)| c >= lo[k] - COORD_MERGE_TOL && c <= hi[k] + COORD_MERGE_TOL)
            },
            move |x| {
                x.iter()
                    .enumerate()
                    .map(|(k, &c)| c.clamp(lo2[k], hi2[k]))
                    .collect()
            },
        )
        .with_sample(vec![lower, upper])
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.membership)(x)
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        (self.projection)(x)
    }

    pub fn sample(&self) -> Option<&[Vec<f64>]> {
        self.sample.as_deref()
    }
}

impl std::fmt::Debug for FixedSetWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FixedSetWitness")
            .field("sample", &self.sample)
            .finish()
    }
}

pub(crate) fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum()
}

pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn max_coord_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("coordinates are finite") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

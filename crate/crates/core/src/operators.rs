//! Operator calculus on measure space: nonexpansiveness and quasi-firmness
//! checkers, push-forward operators of point maps, compositions, and the
//! disintegration-based transfer of the firmness constant.
//!
//! A map is quasi alpha-firmly nonexpansive when for every measure mu and
//! every fixed point nu,
//!
//!   W2^2(T(mu), nu) <= W2^2(mu, nu) - ((1-alpha)/alpha) W2^2(mu, T(mu)).
//!
//! Fixed points are explicit witnesses, not discovered by search; the
//! constructors validate every declared witness.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::functionals::Functional;
use crate::measures::{DiscreteMeasure, FixedSetWitness, PointMap};
use crate::prox::{prox, ProxConfig};
use crate::tolerances::{FIXED_POINT_W2_TOL, FIX_MATCH_TOL, INEQ_SLACK_TOL};
use crate::transport::{disintegrate, w2, w2_squared, TransportPlan};

type ApplyFn = Arc<dyn Fn(&DiscreteMeasure) -> Result<DiscreteMeasure> + Send + Sync>;

/// An operator on discrete measures with an optional declared quasi-firm
/// constant and a list of fixed-point witnesses.
#[derive(Clone)]
pub struct MeasureMap {
    apply: ApplyFn,
    alpha: Option<f64>,
    fixed_points: Vec<DiscreteMeasure>,
    label: String,
}

impl MeasureMap {
    /// Builds the operator and validates that every declared fixed point
    /// moves by at most [`FIXED_POINT_W2_TOL`] in W2.
    pub fn new<F>(
        label: impl Into<String>,
        apply: F,
        alpha: Option<f64>,
        fixed_points: Vec<DiscreteMeasure>,
    ) -> Result<Self>
    where
        F: Fn(&DiscreteMeasure) -> Result<DiscreteMeasure> + Send + Sync + 'static,
    {
        if let Some(a) = alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidConfig { detail: format!("alpha = {a}") });
            }
        }
        let map = Self {
            apply: Arc::new(apply),
            alpha,
            fixed_points,
            label: label.into(),
        };
        for (i, nu) in map.fixed_points.iter().enumerate() {
            let moved = w2(&map.apply(nu)?, nu)?;
            if moved > FIXED_POINT_W2_TOL {
                return Err(Error::MembershipCheckFailed {
                    detail: format!(
                        "declared fixed point {i} of `{}` moves by {moved}",
                        map.label
                    ),
                });
            }
        }
        Ok(map)
    }

    pub fn apply(&self, mu: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        (self.apply)(mu)
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn fixed_points(&self) -> &[DiscreteMeasure] {
        &self.fixed_points
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl std::fmt::Debug for MeasureMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MeasureMap")
            .field("label", &self.label)
            .field("alpha", &self.alpha)
            .field("fixed_points", &self.fixed_points.len())
            .finish()
    }
}

/// The proximal map of a functional as a [`MeasureMap`], quasi 1/2-firm,
/// with caller-supplied minimizer witnesses.
pub fn prox_operator(
    f: &Functional,
    cfg: &ProxConfig,
    witnesses: Vec<DiscreteMeasure>,
) -> Result<MeasureMap> {
    let f = f.clone();
    let cfg = cfg.clone();
    let label = format!("prox({}, tau={})", f.name(), cfg.tau);
    MeasureMap::new(label, move |mu| prox(&f, &cfg, mu), Some(0.5), witnesses)
}

/// Per-pair record for the pairwise checkers.
#[derive(Debug, Clone, Serialize)]
pub struct PairCheck {
    pub index: usize,
    /// RHS - LHS of the inequality; >= -INEQ_SLACK_TOL counts as holding.
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub checks: Vec<PairCheck>,
    pub worst_slack: f64,
    pub holds: bool,
}

pub(crate) fn check_report_from_slacks(slacks: Vec<f64>) -> CheckReport {
    CheckReport::from_slacks(slacks)
}

impl CheckReport {
    fn from_slacks(slacks: Vec<f64>) -> Self {
        let checks: Vec<PairCheck> = slacks
            .into_iter()
            .enumerate()
            .map(|(index, slack)| PairCheck {
                index,
                slack,
                holds: slack >= -INEQ_SLACK_TOL,
            })
            .collect();
        let worst_slack = checks.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
        let holds = checks.iter().all(|c| c.holds);
        Self { checks, worst_slack, holds }
    }
}

/// Checks W2(T mu, T nu) <= W2(mu, nu) per pair.
pub fn check_nonexpansive(
    map: &MeasureMap,
    pairs: &[(DiscreteMeasure, DiscreteMeasure)],
) -> Result<CheckReport> {
    let mut slacks = Vec::with_capacity(pairs.len());
    for (mu, nu) in pairs {
        let lhs = w2(&map.apply(mu)?, &map.apply(nu)?)?;
        let rhs = w2(mu, nu)?;
        slacks.push(rhs - lhs);
    }
    Ok(CheckReport::from_slacks(slacks))
}

/// Checks the quasi-firmness inequality against every declared fixed point:
/// W2^2(T mu, nu) <= W2^2(mu, nu) - ((1-alpha)/alpha) W2^2(mu, T mu).
pub fn check_quasi_afne(
    map: &MeasureMap,
    alpha: f64,
    mus: &[DiscreteMeasure],
) -> Result<CheckReport> {
    if map.fixed_points.is_empty() {
        return Err(Error::NoFixedPointWitness);
    }
    let ratio = (1.0 - alpha) / alpha;
    let mut slacks = Vec::new();
    for mu in mus {
        let t_mu = map.apply(mu)?;
        let step = w2_squared(mu, &t_mu)?;
        for nu in &map.fixed_points {
            let lhs = w2_squared(&t_mu, nu)?;
            let rhs = w2_squared(mu, nu)? - ratio * step;
            slacks.push(rhs - lhs);
        }
    }
    Ok(CheckReport::from_slacks(slacks))
}

/// Lifts a point map to measures by push-forward. When the map carries a
/// fixed-set witness, fixed-point witnesses are seeded by projecting probe
/// measures onto the set (sample Diracs, the uniform measure on the
/// sample, and the projected origin).
pub fn pushforward_operator(map: &PointMap, alpha: Option<f64>) -> Result<MeasureMap> {
    let mut witnesses: Vec<DiscreteMeasure> = Vec::new();
    if let Some(fix) = map.fixed_set() {
        let mut probes: Vec<DiscreteMeasure> = Vec::new();
        if let Some(sample) = fix.sample() {
            for p in sample {
                probes.push(DiscreteMeasure::dirac(p.clone())?);
            }
            if sample.len() > 1 {
                probes.push(DiscreteMeasure::uniform(sample.to_vec())?);
            }
        }
        probes.push(DiscreteMeasure::dirac(vec![0.0; map.dim()])?);
        for probe in probes {
            let nu = probe.project_onto(fix)?;
            if !witnesses.iter().any(|w| w.approx_eq(&nu, 1e-12)) {
                witnesses.push(nu);
            }
        }
    }
    let inner = map.clone();
    MeasureMap::new(
        format!("pushforward(d={})", map.dim()),
        move |mu| mu.pushforward(&inner),
        alpha,
        witnesses,
    )
}

/// Checks the push-forward transfer inequality for an alpha-firmly
/// nonexpansive point map T (caller-asserted), with residual R = id - T:
///
/// W2^2(T#mu, T#nu) <= W2^2(mu, nu) - ((1-alpha)/alpha) W2^2(R#mu, R#nu).
pub fn check_pushforward_ineq(
    map: &PointMap,
    alpha: f64,
    pairs: &[(DiscreteMeasure, DiscreteMeasure)],
) -> Result<CheckReport> {
    let residual = map.residual();
    let ratio = (1.0 - alpha) / alpha;
    let mut slacks = Vec::with_capacity(pairs.len());
    for (mu, nu) in pairs {
        let lhs = w2_squared(&mu.pushforward(map)?, &nu.pushforward(map)?)?;
        let rhs = w2_squared(mu, nu)?
            - ratio * w2_squared(&mu.pushforward(&residual)?, &nu.pushforward(&residual)?)?;
        slacks.push(rhs - lhs);
    }
    Ok(CheckReport::from_slacks(slacks))
}

/// Outcome of [`check_disintegration_condition`].
#[derive(Debug, Clone, Serialize)]
pub struct DisintegrationReport {
    /// Least conditional mass any source atom sends into the fixed set.
    pub c_estimate: f64,
    /// Conditional fixed-set mass per source atom (skipping zero rows).
    pub row_masses: Vec<f64>,
}

/// Estimates the uniform constant C: the minimum over source atoms of the
/// conditional mass the plan sends into the fixed set of `map`.
///
/// Target atoms claimed by the witness are cross-checked against the map
/// (a member must be fixed by it); an inconsistency is an error, partial
/// fixed-set mass is not — it just lowers C.
pub fn check_disintegration_condition(
    map: &PointMap,
    fix: &FixedSetWitness,
    plan: &TransportPlan,
) -> Result<DisintegrationReport> {
    let member: Vec<bool> = plan
        .target()
        .points()
        .iter()
        .map(|y| fix.contains(y))
        .collect();
    for (y, &is_member) in plan.target().points().iter().zip(&member) {
        if is_member {
            let ty = map.apply(y);
            let moved: f64 = y
                .iter()
                .zip(&ty)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if moved > 1e-9 {
                return Err(Error::MembershipCheckFailed {
                    detail: format!("witness member moves by {moved} under the map"),
                });
            }
        }
    }
    let dis = disintegrate(plan)?;
    let mut row_masses = Vec::new();
    for cond in dis.conditionals() {
        let Some(cond) = cond else { continue };
        let mass: f64 = cond
            .weights()
            .iter()
            .zip(&member)
            .filter_map(|(w, &inside)| inside.then_some(*w))
            .sum();
        row_masses.push(mass);
    }
    let c_estimate = row_masses.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(DisintegrationReport { c_estimate, row_masses })
}

/// The quasi-firm constant induced by conditional fixed-set mass C:
/// 1 / (1 + C (1 - alpha) / alpha). At C = 1 this is alpha itself.
pub fn induced_alpha(alpha: f64, c: f64) -> f64 {
    1.0 / (1.0 + c * (1.0 - alpha) / alpha)
}

/// Firmness constant of a composition: (alpha + beta - 2 alpha beta) /
/// (1 - alpha beta), in (0, 1) whenever both inputs are.
pub fn composition_alpha(alpha: f64, beta: f64) -> f64 {
    (alpha + beta - 2.0 * alpha * beta) / (1.0 - alpha * beta)
}

/// Composition T(S(mu)) of two quasi-firm operators sharing a fixed point.
/// The declared constant is [`composition_alpha`] of the parts; the fixed
/// points are the matching witnesses.
pub fn compose(s: &MeasureMap, t: &MeasureMap) -> Result<MeasureMap> {
    let alpha = s
        .alpha
        .ok_or_else(|| Error::MissingAlpha { label: s.label.clone() })?;
    let beta = t
        .alpha
        .ok_or_else(|| Error::MissingAlpha { label: t.label.clone() })?;
    let mut common = Vec::new();
    for nu_s in &s.fixed_points {
        for nu_t in &t.fixed_points {
            if w2(nu_s, nu_t)? <= FIX_MATCH_TOL
                && !common
                    .iter()
                    .any(|c: &DiscreteMeasure| c.approx_eq(nu_s, 1e-12))
            {
                common.push(nu_s.clone());
            }
        }
    }
    if common.is_empty() {
        return Err(Error::NoCommonFixedPoint);
    }
    let gamma = composition_alpha(alpha, beta);
    let s_apply = s.apply.clone();
    let t_apply = t.apply.clone();
    MeasureMap::new(
        format!("{} . {}", t.label, s.label),
        move |mu| t_apply(&s_apply(mu)?),
        Some(gamma),
        common,
    )
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum OperatorSpec {
    Prox {
        functional: Value,
        tau: f64,
        #[serde(default)]
        witnesses: Vec<Value>,
    },
    Pushforward {
        map: PointMapSpec,
        #[serde(default)]
        alpha: Option<f64>,
    },
    Compose {
        parts: Vec<Value>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
enum PointMapSpec {
    Identity { dim: usize },
    /// x -> scale * x + offset; contractive scales get a singleton witness
    /// at the fixed point offset / (1 - scale).
    Affine { scale: f64, offset: Vec<f64> },
    /// Coordinate-wise projection onto the box [lower, upper].
    Clamp { lower: Vec<f64>, upper: Vec<f64> },
}

impl PointMapSpec {
    fn build(self) -> Result<PointMap> {
        match self {
            PointMapSpec::Identity { dim } => Ok(PointMap::identity(dim)),
            PointMapSpec::Affine { scale, offset } => {
                let dim = offset.len();
                let shift = offset.clone();
                let mut map = PointMap::new(dim, move |x| {
                    x.iter().zip(&shift).map(|(c, b)| scale * c + b).collect()
                });
                if scale.abs() < 1.0 {
                    let fixed: Vec<f64> = offset.iter().map(|b| b / (1.0 - scale)).collect();
                    map = map.with_fixed_set(FixedSetWitness::singleton(fixed));
                }
                Ok(map)
            }
            PointMapSpec::Clamp { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(Error::Parse("clamp bounds disagree in length".into()));
                }
                let dim = lower.len();
                let lo = lower.clone();
                let hi = upper.clone();
                Ok(PointMap::new(dim, move |x| {
                    x.iter()
                        .enumerate()
                        .map(|(k, &c)| c.clamp(lo[k], hi[k]))
                        .collect()
                })
                .with_fixed_set(FixedSetWitness::rectangle(lower, upper)))
            }
        }
    }
}

/// Builds an operator from its JSON description, e.g.
/// `{"kind":"prox","functional":{...},"tau":0.5,"witnesses":[{...}]}`,
/// `{"kind":"pushforward","map":{"name":"affine","scale":0.5,"offset":[0]},"alpha":0.5}`,
/// or `{"kind":"compose","parts":[...]}` (parts applied left to right).
pub fn from_spec(text: &str) -> Result<MeasureMap> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_spec_value(&value)
}

fn from_spec_value(value: &Value) -> Result<MeasureMap> {
    let spec: OperatorSpec =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    match spec {
        OperatorSpec::Prox { functional, tau, witnesses } => {
            let f = crate::functionals::from_spec_value(&functional)?;
            let cfg = ProxConfig::new(tau)?;
            let witnesses = witnesses
                .iter()
                .map(|w| DiscreteMeasure::from_json(&w.to_string()))
                .collect::<Result<Vec<_>>>()?;
            prox_operator(&f, &cfg, witnesses)
        }
        OperatorSpec::Pushforward { map, alpha } => pushforward_operator(&map.build()?, alpha),
        OperatorSpec::Compose { parts } => {
            if parts.len() < 2 {
                return Err(Error::Parse("compose needs at least two parts".into()));
            }
            let mut built = parts.iter().map(from_spec_value);
            let mut acc = built.next().unwrap()?;
            for next in built {
                acc = compose(&acc, &next?)?;
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::quadratic_potential;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn dirac(x: f64) -> DiscreteMeasure {
        DiscreteMeasure::dirac(vec![x]).unwrap()
    }

    fn line(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(points.iter().map(|&x| vec![x]).collect(), weights.to_vec()).unwrap()
    }

    fn halving_map() -> PointMap {
        PointMap::new(1, |x| vec![x[0] / 2.0])
            .with_fixed_set(FixedSetWitness::singleton(vec![0.0]))
    }

    #[test]
    fn identity_is_nonexpansive_with_equality() {
        let id = MeasureMap::new("id", |mu: &DiscreteMeasure| Ok(mu.clone()), None, vec![])
            .unwrap();
        let pairs = vec![(dirac(0.0), dirac(3.0)), (line(&[0.0, 1.0], &[0.5, 0.5]), dirac(2.0))];
        let report = check_nonexpansive(&id, &pairs).unwrap();
        assert!(report.holds);
        assert_abs_diff_eq!(report.worst_slack, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn halving_pushforward_is_nonexpansive_and_doubling_is_not() {
        let halve = pushforward_operator(&halving_map(), Some(0.5)).unwrap();
        let double =
            pushforward_operator(&PointMap::new(1, |x| vec![2.0 * x[0]]), None).unwrap();
        let pairs = vec![(dirac(0.0), dirac(4.0)), (dirac(-2.0), dirac(6.0))];
        assert!(check_nonexpansive(&halve, &pairs).unwrap().holds);
        let report = check_nonexpansive(&double, &pairs).unwrap();
        assert!(!report.holds); // reported, not an error
    }

    #[test]
    fn quasi_firmness_of_halving_pushforward() {
        // W2^2(T mu, d0) = m2/4 <= m2 - m2/4 at alpha = 1/2.
        let halve = pushforward_operator(&halving_map(), Some(0.5)).unwrap();
        assert_eq!(halve.fixed_points().len(), 1);
        let mus = vec![dirac(4.0), line(&[1.0, -3.0], &[0.5, 0.5])];
        let report = check_quasi_afne(&halve, 0.5, &mus).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn quasi_firmness_of_quadratic_prox() {
        let f = quadratic_potential(&[2.0]);
        let cfg = ProxConfig::new(1.0).unwrap();
        let op = prox_operator(&f, &cfg, vec![dirac(2.0)]).unwrap();
        let mus = vec![dirac(0.0), dirac(10.0), line(&[1.0, 5.0], &[0.25, 0.75])];
        assert!(check_quasi_afne(&op, 0.5, &mus).unwrap().holds);
    }

    #[test]
    fn quasi_firmness_needs_witnesses() {
        let id = MeasureMap::new("id", |mu: &DiscreteMeasure| Ok(mu.clone()), None, vec![])
            .unwrap();
        assert!(matches!(
            check_quasi_afne(&id, 0.5, &[dirac(0.0)]),
            Err(Error::NoFixedPointWitness)
        ));
    }

    #[test]
    fn bogus_witness_is_rejected() {
        let err = MeasureMap::new(
            "shift",
            |mu: &DiscreteMeasure| {
                mu.pushforward(&PointMap::new(1, |x| vec![x[0] + 1.0]))
            },
            None,
            vec![dirac(0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::MembershipCheckFailed { .. }));
    }

    #[test]
    fn pushforward_operator_seeds_witnesses() {
        // Prox of a quadratic as a point map: fixed point at the center.
        let tau = 0.5;
        let a = 1.5;
        let map = PointMap::new(1, move |x| vec![(x[0] + tau * a) / (1.0 + tau)])
            .with_fixed_set(FixedSetWitness::singleton(vec![a]));
        let op = pushforward_operator(&map, Some(0.5)).unwrap();
        assert!(op
            .fixed_points()
            .iter()
            .any(|w| w.approx_eq(&dirac(a), 1e-9)));
    }

    #[test]
    fn clamp_pushforward_fixes_supported_measures() {
        let map = PointMap::new(1, |x| vec![x[0].clamp(0.0, 1.0)])
            .with_fixed_set(FixedSetWitness::rectangle(vec![0.0], vec![1.0]));
        let op = pushforward_operator(&map, Some(0.5)).unwrap();
        let inside = line(&[0.25, 0.75], &[0.5, 0.5]);
        assert!(op.apply(&inside).unwrap().approx_eq(&inside, 1e-12));
    }

    #[test]
    fn pushforward_inequality_on_diracs() {
        // T = x/2 on delta_2, delta_6: 4 <= 16 - 4.
        let map = PointMap::new(1, |x| vec![x[0] / 2.0]);
        let pairs = vec![(dirac(2.0), dirac(6.0))];
        let report = check_pushforward_ineq(&map, 0.5, &pairs).unwrap();
        assert!(report.holds);
        assert_abs_diff_eq!(report.checks[0].slack, 8.0, epsilon = 1e-12);

        let same = vec![(dirac(1.0), dirac(1.0))];
        let report = check_pushforward_ineq(&map, 0.5, &same).unwrap();
        assert_abs_diff_eq!(report.checks[0].slack, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn disintegration_condition_full_and_partial_mass() {
        let map = PointMap::new(1, |x| vec![x[0].clamp(0.0, 1.0)]);
        let fix = FixedSetWitness::rectangle(vec![0.0], vec![1.0]);

        // Target fully inside the fixed set: C = 1.
        let mu = line(&[-1.0, 2.0], &[0.5, 0.5]);
        let nu = line(&[0.0, 1.0], &[0.5, 0.5]);
        let plan = crate::transport::solve_w2(&mu, &nu).unwrap();
        let report = check_disintegration_condition(&map, &fix, &plan).unwrap();
        assert_abs_diff_eq!(report.c_estimate, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(induced_alpha(0.5, report.c_estimate), 0.5, epsilon = 1e-12);

        // Rows carrying half their mass outside: C = 1/2.
        let nu = line(&[0.5, 3.0], &[0.5, 0.5]);
        let mut matrix = Array2::<f64>::zeros((2, 2));
        matrix[[0, 0]] = 0.25;
        matrix[[0, 1]] = 0.25;
        matrix[[1, 0]] = 0.25;
        matrix[[1, 1]] = 0.25;
        let plan = TransportPlan::new(mu, nu, matrix).unwrap();
        let report = check_disintegration_condition(&map, &fix, &plan).unwrap();
        assert_abs_diff_eq!(report.c_estimate, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(
            induced_alpha(0.5, report.c_estimate),
            2.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn disintegration_condition_rejects_lying_witness() {
        // Witness claims everything is fixed, but the map shifts.
        let map = PointMap::new(1, |x| vec![x[0] + 1.0]);
        let fix = FixedSetWitness::new(|_| true, |x| x.to_vec());
        let mu = dirac(0.0);
        let plan = crate::transport::solve_w2(&mu, &dirac(1.0)).unwrap();
        assert!(matches!(
            check_disintegration_condition(&map, &fix, &plan),
            Err(Error::MembershipCheckFailed { .. })
        ));
    }

    #[test]
    fn composition_constant_values() {
        assert_abs_diff_eq!(composition_alpha(0.5, 0.5), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(composition_alpha(0.0, 0.7), 0.7, epsilon = 1e-15);
        // Stays inside (0, 1) on a grid.
        for i in 1..20 {
            for j in 1..20 {
                let g = composition_alpha(i as f64 / 20.0, j as f64 / 20.0);
                assert!(g > 0.0 && g < 1.0, "gamma({i}, {j}) = {g}");
            }
        }
    }

    #[test]
    fn composed_prox_maps_share_fixed_point() {
        let a = 1.0;
        let f1 = quadratic_potential(&[a]);
        let f2 = quadratic_potential(&[a]);
        let s = prox_operator(&f1, &ProxConfig::new(1.0).unwrap(), vec![dirac(a)]).unwrap();
        let t = prox_operator(&f2, &ProxConfig::new(0.5).unwrap(), vec![dirac(a)]).unwrap();
        let st = compose(&s, &t).unwrap();
        assert_abs_diff_eq!(st.alpha().unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        let mus = vec![dirac(4.0), line(&[0.0, 2.0], &[0.5, 0.5])];
        assert!(check_quasi_afne(&st, 2.0 / 3.0, &mus).unwrap().holds);
    }

    #[test]
    fn composition_without_common_fixed_point_fails() {
        let s = prox_operator(
            &quadratic_potential(&[0.0]),
            &ProxConfig::new(1.0).unwrap(),
            vec![dirac(0.0)],
        )
        .unwrap();
        let t = prox_operator(
            &quadratic_potential(&[5.0]),
            &ProxConfig::new(1.0).unwrap(),
            vec![dirac(5.0)],
        )
        .unwrap();
        assert!(matches!(compose(&s, &t), Err(Error::NoCommonFixedPoint)));
    }

    #[test]
    fn operator_specs_build_prox_pushforward_and_compose() {
        let op = from_spec(
            r#"{"kind":"prox",
                "functional":{"kind":"potential","name":"quadratic","params":{"a":[1.0]}},
                "tau":1.0,
                "witnesses":[{"dim":1,"points":[[1.0]],"weights":[1.0]}]}"#,
        )
        .unwrap();
        assert_eq!(op.alpha(), Some(0.5));
        assert!(op.apply(&dirac(3.0)).unwrap().approx_eq(&dirac(2.0), 1e-9));

        let push = from_spec(
            r#"{"kind":"pushforward","map":{"name":"affine","scale":0.5,"offset":[0.0]},"alpha":0.5}"#,
        )
        .unwrap();
        assert!(push
            .fixed_points()
            .iter()
            .any(|w| w.approx_eq(&dirac(0.0), 1e-9)));
        assert!(push.apply(&dirac(4.0)).unwrap().approx_eq(&dirac(2.0), 1e-12));

        let clamp = from_spec(
            r#"{"kind":"pushforward","map":{"name":"clamp","lower":[0.0],"upper":[1.0]},"alpha":0.5}"#,
        )
        .unwrap();
        assert!(clamp.apply(&dirac(5.0)).unwrap().approx_eq(&dirac(1.0), 1e-12));

        let composed = from_spec(
            r#"{"kind":"compose","parts":[
                {"kind":"prox","functional":{"kind":"potential","name":"quadratic","params":{"a":[1.0]}},
                 "tau":1.0,"witnesses":[{"dim":1,"points":[[1.0]],"weights":[1.0]}]},
                {"kind":"prox","functional":{"kind":"potential","name":"distance","params":{"a":[1.0]}},
                 "tau":0.5,"witnesses":[{"dim":1,"points":[[1.0]],"weights":[1.0]}]}
            ]}"#,
        )
        .unwrap();
        assert_abs_diff_eq!(composed.alpha().unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        // Parts apply left to right: delta_3 -> delta_2 -> delta_1.5.
        assert!(composed.apply(&dirac(3.0)).unwrap().approx_eq(&dirac(1.5), 1e-9));

        assert!(from_spec(r#"{"kind":"compose","parts":[]}"#).is_err());
    }

    #[test]
    fn numerical_fixed_points_of_composition_are_common() {
        let a = 2.0;
        let s = prox_operator(
            &quadratic_potential(&[a]),
            &ProxConfig::new(1.0).unwrap(),
            vec![dirac(a)],
        )
        .unwrap();
        let t = prox_operator(
            &quadratic_potential(&[a]),
            &ProxConfig::new(2.0).unwrap(),
            vec![dirac(a)],
        )
        .unwrap();
        let st = compose(&s, &t).unwrap();
        let mut mu = line(&[-1.0, 6.0], &[0.5, 0.5]);
        for _ in 0..200 {
            let next = st.apply(&mu).unwrap();
            let moved = w2(&next, &mu).unwrap();
            mu = next;
            if moved <= 1e-8 {
                break;
            }
        }
        assert!(w2(&st.apply(&mu).unwrap(), &mu).unwrap() <= 1e-8);
        assert!(w2(&s.apply(&mu).unwrap(), &mu).unwrap() <= 1e-6);
        assert!(w2(&t.apply(&mu).unwrap(), &mu).unwrap() <= 1e-6);
    }
}

//! Energy functionals on discrete measures: potential energies, interaction
//! energies and finite sums, together with a convexity checker along
//! generalized geodesics and an empirical Lipschitz probe.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::tolerances::{GG_CONVEXITY_TOL, LIPSCHITZ_PROBE_TOL};
use crate::transport::{build_three_plan, generalized_geodesic, w2};

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type ProxFn = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyKind {
    Potential,
    Interaction,
    Sum,
}

#[derive(Clone)]
enum Energy {
    /// F(mu) = sum_i w_i V(x_i).
    Potential { v: ScalarFn, grad: GradFn },
    /// F(mu) = 1/2 sum_i sum_j w_i w_j W(x_i - x_j), W even.
    Interaction { w: ScalarFn, grad: GradFn },
    Sum(Vec<Functional>),
}

/// An evaluatable energy on discrete measures.
///
/// Carries an optional Lipschitz constant (|F(mu) - F(nu)| <= L * W2) and
/// an optional pointwise proximal map `(x, tau) -> argmin_y V(y) +
/// ||y-x||^2 / (2 tau)`, which the proximal solver uses as an exact fast
/// path for potential energies.
#[derive(Clone)]
pub struct Functional {
    energy: Energy,
    lipschitz_bound: Option<f64>,
    pointwise_prox: Option<ProxFn>,
    name: String,
    domain_note: String,
}

impl Functional {
    pub fn kind(&self) -> EnergyKind {
        match self.energy {
            Energy::Potential { .. } => EnergyKind::Potential,
            Energy::Interaction { .. } => EnergyKind::Interaction,
            Energy::Sum(_) => EnergyKind::Sum,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz_bound
    }

    pub fn pointwise_prox(&self) -> Option<&ProxFn> {
        self.pointwise_prox.as_ref()
    }

    pub fn with_lipschitz_bound(mut self, bound: f64) -> Self {
        self.lipschitz_bound = Some(bound);
        self
    }

    pub fn with_pointwise_prox<P>(mut self, prox: P) -> Self
    where
        P: Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
    {
        self.pointwise_prox = Some(Arc::new(prox));
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn domain_note(&self) -> &str {
        &self.domain_note
    }

    pub fn with_domain_note(mut self, note: impl Into<String>) -> Self {
        self.domain_note = note.into();
        self
    }

    /// Drops the pointwise proximal map, forcing the general solver path.
    pub fn without_pointwise_prox(mut self) -> Self {
        self.pointwise_prox = None;
        self
    }

    pub fn eval(&self, mu: &DiscreteMeasure) -> f64 {
        match &self.energy {
            Energy::Potential { v, .. } => mu
                .points()
                .iter()
                .zip(mu.weights())
                .map(|(x, w)| w * v(x))
                .sum(),
            Energy::Interaction { w: kernel, .. } => {
                let pts = mu.points();
                let ws = mu.weights();
                let mut total = 0.0;
                for (i, x) in pts.iter().enumerate() {
                    for (j, y) in pts.iter().enumerate() {
                        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                        total += ws[i] * ws[j] * kernel(&diff);
                    }
                }
                0.5 * total
            }
            Energy::Sum(parts) => parts.iter().map(|p| p.eval(mu)).sum(),
        }
    }

    /// Gradient of `eval` with respect to the atom positions, weights held
    /// fixed. Entry a is w_a * grad V(x_a) for potentials and
    /// w_a * sum_j w_j grad W(x_a - x_j) for interactions (W even).
    pub fn grad_positions(&self, mu: &DiscreteMeasure) -> Vec<Vec<f64>> {
        let d = mu.dim();
        match &self.energy {
            Energy::Potential { grad, .. } => mu
                .points()
                .iter()
                .zip(mu.weights())
                .map(|(x, &w)| grad(x).iter().map(|g| w * g).collect())
                .collect(),
            Energy::Interaction { grad, .. } => {
                let pts = mu.points();
                let ws = mu.weights();
                let mut out = vec![vec![0.0; d]; pts.len()];
                for (a, x) in pts.iter().enumerate() {
                    for (b, y) in pts.iter().enumerate() {
                        if a == b {
                            continue;
                        }
                        let diff: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
                        let g = grad(&diff);
                        for (k, gk) in g.iter().enumerate() {
                            out[a][k] += ws[a] * ws[b] * gk;
                        }
                    }
                }
                out
            }
            Energy::Sum(parts) => {
                let mut out = vec![vec![0.0; d]; mu.len()];
                for part in parts {
                    for (acc, g) in out.iter_mut().zip(part.grad_positions(mu)) {
                        for (a, b) in acc.iter_mut().zip(g) {
                            *a += b;
                        }
                    }
                }
                out
            }
        }
    }

    pub fn parts(&self) -> Option<&[Functional]> {
        match &self.energy {
            Energy::Sum(parts) => Some(parts),
            _ => None,
        }
    }
}

impl std::fmt::Debug for Functional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Functional")
            .field("kind", &self.kind())
            .field("name", &self.name)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .field("has_pointwise_prox", &self.pointwise_prox.is_some())
            .finish()
    }
}

/// Potential energy F(mu) = sum_i w_i V(x_i).
pub fn potential_energy<V, G>(v: V, grad_v: G) -> Functional
where
    V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
{
    Functional {
        energy: Energy::Potential { v: Arc::new(v), grad: Arc::new(grad_v) },
        lipschitz_bound: None,
        pointwise_prox: None,
        name: "potential".into(),
        domain_note: "finite on every discrete measure".into(),
    }
}

/// Interaction energy F(mu) = 1/2 sum_ij w_i w_j W(x_i - x_j).
///
/// The kernel must be even; this is asserted on the supplied probe vectors
/// (W(z) = W(-z) within 1e-9 each).
pub fn interaction_energy<W, G>(w: W, grad_w: G, evenness_probes: &[Vec<f64>]) -> Result<Functional>
where
    W: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
{
    for z in evenness_probes {
        let neg: Vec<f64> = z.iter().map(|c| -c).collect();
        if (w(z) - w(&neg)).abs() > 1e-9 * (1.0 + w(z).abs()) {
            return Err(Error::AsymmetricKernel { probe: z.clone() });
        }
    }
    Ok(Functional {
        energy: Energy::Interaction { w: Arc::new(w), grad: Arc::new(grad_w) },
        lipschitz_bound: None,
        pointwise_prox: None,
        name: "interaction".into(),
        domain_note: "finite on every discrete measure".into(),
    })
}

/// Sum of finitely many functionals. Evaluation is exactly the sum of the
/// parts; the Lipschitz bound is the sum of the parts' bounds when all are
/// declared.
pub fn sum(parts: Vec<Functional>) -> Functional {
    let bound = parts
        .iter()
        .map(|p| p.lipschitz_bound)
        .try_fold(0.0, |acc, b| b.map(|b| acc + b));
    let name = format!(
        "sum({})",
        parts.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join("+")
    );
    Functional {
        energy: Energy::Sum(parts),
        lipschitz_bound: bound,
        pointwise_prox: None,
        name,
        domain_note: "finite wherever every part is".into(),
    }
}

/// V(x) = 1/2 ||x - a||^2 with its closed-form pointwise prox
/// (x + tau a) / (1 + tau). No global Lipschitz bound.
pub fn quadratic_potential(center: &[f64]) -> Functional {
    let a1 = center.to_vec();
    let a2 = center.to_vec();
    let a3 = center.to_vec();
    potential_energy(
        move |x| 0.5 * x.iter().zip(&a1).map(|(c, ac)| (c - ac) * (c - ac)).sum::<f64>(),
        move |x| x.iter().zip(&a2).map(|(c, ac)| c - ac).collect(),
    )
    .with_pointwise_prox(move |x, tau| {
        x.iter()
            .zip(&a3)
            .map(|(c, ac)| (c + tau * ac) / (1.0 + tau))
            .collect()
    })
    .with_name("quadratic-potential")
}

/// V(x) = ||x - a||, globally 1-Lipschitz, with the shrinkage prox:
/// move tau toward a, or land on a when closer than tau.
pub fn distance_potential(center: &[f64]) -> Functional {
    let a1 = center.to_vec();
    let a2 = center.to_vec();
    let a3 = center.to_vec();
    potential_energy(
        move |x| dist(x, &a1),
        move |x| {
            let r = dist(x, &a2);
            if r == 0.0 {
                vec![0.0; x.len()]
            } else {
                x.iter().zip(&a2).map(|(c, ac)| (c - ac) / r).collect()
            }
        },
    )
    .with_pointwise_prox(move |x, tau| {
        let r = dist(x, &a3);
        if r <= tau {
            a3.clone()
        } else {
            let scale = 1.0 - tau / r;
            x.iter().zip(&a3).map(|(c, ac)| ac + scale * (c - ac)).collect()
        }
    })
    .with_lipschitz_bound(1.0)
    .with_name("distance-potential")
}

/// W(z) = ||z||^2. Convex and even; no pointwise prox (the energy couples
/// the atoms).
pub fn quadratic_interaction() -> Functional {
    interaction_energy(
        |z| z.iter().map(|c| c * c).sum(),
        |z| z.iter().map(|c| 2.0 * c).collect(),
        &[vec![1.0], vec![0.3, -0.7], vec![0.5, 0.25, -1.0]],
    )
    .expect("quadratic kernel is even")
    .with_name("quadratic-interaction")
}

fn dist(x: &[f64], a: &[f64]) -> f64 {
    x.iter()
        .zip(a)
        .map(|(c, ac)| (c - ac) * (c - ac))
        .sum::<f64>()
        .sqrt()
}

/// Outcome of the convexity check along one generalized geodesic.
#[derive(Debug, Clone, Serialize)]
pub struct GgConvexityReport {
    pub holds: bool,
    /// max over the grid of F(curve(t)) - ((1-t) F(mu1) + t F(mu2));
    /// positive values beyond the tolerance are violations.
    pub worst_violation: f64,
    pub violations: Vec<(f64, f64)>,
}

/// Checks F(curve(t)) <= (1-t) F(mu1) + t F(mu2) along the glued
/// generalized geodesic with base `mu0`, on the given parameter grid.
///
/// A pass certifies the inequality only for the constructed coupling; the
/// convexity notion quantifies existentially over couplings, so a reported
/// violation is inconclusive for the functional itself.
pub fn check_gg_convexity(
    f: &Functional,
    mu0: &DiscreteMeasure,
    mu1: &DiscreteMeasure,
    mu2: &DiscreteMeasure,
    t_grid: &[f64],
) -> Result<GgConvexityReport> {
    for &t in t_grid {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TOutOfRange { t });
        }
    }
    let three = build_three_plan(mu0, mu1, mu2)?;
    let f1 = f.eval(mu1);
    let f2 = f.eval(mu2);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = Vec::new();
    for &t in t_grid {
        let curve = generalized_geodesic(&three, t)?;
        let violation = f.eval(&curve) - ((1.0 - t) * f1 + t * f2);
        if violation > worst {
            worst = violation;
        }
        if violation > GG_CONVEXITY_TOL {
            violations.push((t, violation));
        }
    }
    Ok(GgConvexityReport {
        holds: violations.is_empty(),
        worst_violation: worst,
        violations,
    })
}

/// Default parameter grid {0, 0.1, ..., 1} for the convexity checker.
pub fn default_t_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 / 10.0).collect()
}

/// Largest observed ratio |F(mu) - F(nu)| / W2(mu, nu) over the sample
/// pairs (pairs at zero distance are skipped). Errors when a declared
/// bound is exceeded beyond tolerance.
pub fn lipschitz_probe(
    f: &Functional,
    samples: &[(DiscreteMeasure, DiscreteMeasure)],
) -> Result<f64> {
    let mut best: f64 = 0.0;
    for (mu, nu) in samples {
        let d = w2(mu, nu)?;
        if d <= 1e-14 {
            continue;
        }
        best = best.max((f.eval(mu) - f.eval(nu)).abs() / d);
    }
    if let Some(declared) = f.lipschitz_bound {
        if best > declared + LIPSCHITZ_PROBE_TOL {
            return Err(Error::DeclaredBoundViolated { declared, observed: best });
        }
    }
    Ok(best)
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FunctionalSpec {
    Potential {
        name: String,
        #[serde(default)]
        params: Value,
        #[serde(default)]
        lipschitz_bound: Option<f64>,
    },
    Interaction {
        name: String,
        #[serde(default)]
        lipschitz_bound: Option<f64>,
    },
    Sum {
        parts: Vec<Value>,
    },
}

/// Builds a functional from its JSON description, e.g.
/// `{"kind":"potential","name":"quadratic","params":{"a":[0,0]}}`.
///
/// Registered names: potential `quadratic` and `distance` (both take a
/// center `a`), interaction `quadratic`, and `sum` with a `parts` array.
pub fn from_spec(text: &str) -> Result<Functional> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_spec_value(&value)
}

pub(crate) fn from_spec_value(value: &Value) -> Result<Functional> {
    let spec: FunctionalSpec =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    match spec {
        FunctionalSpec::Potential { name, params, lipschitz_bound } => {
            let center = parse_center(&params)?;
            let f = match name.as_str() {
                "quadratic" => quadratic_potential(&center),
                "distance" => distance_potential(&center),
                other => return Err(Error::Parse(format!("unknown potential `{other}`"))),
            };
            Ok(match lipschitz_bound {
                Some(b) => f.with_lipschitz_bound(b),
                None => f,
            })
        }
        FunctionalSpec::Interaction { name, lipschitz_bound } => {
            let f = match name.as_str() {
                "quadratic" => quadratic_interaction(),
                other => return Err(Error::Parse(format!("unknown interaction `{other}`"))),
            };
            Ok(match lipschitz_bound {
                Some(b) => f.with_lipschitz_bound(b),
                None => f,
            })
        }
        FunctionalSpec::Sum { parts } => {
            let parsed = parts
                .iter()
                .map(from_spec_value)
                .collect::<Result<Vec<_>>>()?;
            if parsed.is_empty() {
                return Err(Error::Parse("sum needs at least one part".into()));
            }
            Ok(sum(parsed))
        }
    }
}

fn parse_center(params: &Value) -> Result<Vec<f64>> {
    params
        .get("a")
        .and_then(|a| a.as_array())
        .map(|arr| {
            arr.iter()
                .map(|v| v.as_f64().ok_or_else(|| Error::Parse("center must be numeric".into())))
                .collect::<Result<Vec<f64>>>()
        })
        .unwrap_or_else(|| Err(Error::Parse("potential needs params.a".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(points.iter().map(|&x| vec![x]).collect(), weights.to_vec()).unwrap()
    }

    fn dirac(x: f64) -> DiscreteMeasure {
        DiscreteMeasure::dirac(vec![x]).unwrap()
    }

    #[test]
    fn quadratic_potential_on_dirac() {
        let f = quadratic_potential(&[1.0, 0.0]);
        let mu = DiscreteMeasure::dirac(vec![4.0, 4.0]).unwrap();
        assert_abs_diff_eq!(f.eval(&mu), 0.5 * (9.0 + 16.0), epsilon = 1e-15);
    }

    #[test]
    fn distance_potential_two_atoms() {
        let f = distance_potential(&[1.0]);
        let mu = line(&[0.0, 2.0], &[0.5, 0.5]);
        assert_abs_diff_eq!(f.eval(&mu), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_potential_evaluates_to_zero() {
        let f = potential_energy(|_| 0.0, |x| vec![0.0; x.len()]);
        let mu = line(&[0.3, -2.0], &[0.25, 0.75]);
        assert_eq!(f.eval(&mu), 0.0);
    }

    #[test]
    fn interaction_on_dirac_is_zero() {
        let f = quadratic_interaction();
        assert_eq!(f.eval(&dirac(7.0)), 0.0);
    }

    #[test]
    fn interaction_two_atoms() {
        let f = quadratic_interaction();
        let mu = line(&[0.0, 2.0], &[0.5, 0.5]);
        assert_abs_diff_eq!(f.eval(&mu), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn interaction_uniform_three_atoms() {
        let f = quadratic_interaction();
        let mu = line(&[0.0, 1.0, 2.0], &[1.0 / 3.0; 3]);
        assert_abs_diff_eq!(f.eval(&mu), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn asymmetric_kernel_is_rejected() {
        let err = interaction_energy(|z| z[0], |_| vec![1.0], &[vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::AsymmetricKernel { .. }));
    }

    #[test]
    fn sum_is_exactly_additive() {
        let f1 = quadratic_potential(&[0.0]);
        let f2 = distance_potential(&[1.0]);
        let s = sum(vec![f1.clone(), f2.clone()]);
        let mu = line(&[0.5, -1.5], &[0.4, 0.6]);
        assert_eq!(s.eval(&mu), f1.eval(&mu) + f2.eval(&mu));
        assert_eq!(s.lipschitz_bound(), None); // quadratic part undeclared
        let bounded = sum(vec![distance_potential(&[0.0]), distance_potential(&[1.0])]);
        assert_eq!(bounded.lipschitz_bound(), Some(2.0));
    }

    #[test]
    fn potential_of_pushforward_matches_direct_sum() {
        let f = quadratic_potential(&[0.0]);
        let mu = line(&[1.0, 3.0], &[0.5, 0.5]);
        let map = crate::measures::PointMap::new(1, |x| vec![x[0] / 2.0]);
        let pushed = mu.pushforward(&map).unwrap();
        let direct: f64 = mu
            .points()
            .iter()
            .zip(mu.weights())
            .map(|(x, w)| w * 0.5 * (x[0] / 2.0) * (x[0] / 2.0))
            .sum();
        assert_abs_diff_eq!(f.eval(&pushed), direct, epsilon = 1e-15);
    }

    #[test]
    fn gg_convexity_zero_functional() {
        let f = potential_energy(|_| 0.0, |x| vec![0.0; x.len()]);
        let report = check_gg_convexity(
            &f,
            &dirac(0.0),
            &line(&[0.0, 1.0], &[0.5, 0.5]),
            &dirac(2.0),
            &default_t_grid(),
        )
        .unwrap();
        assert!(report.holds);
        assert_abs_diff_eq!(report.worst_violation, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn gg_convexity_detects_concave_potential() {
        let f = potential_energy(
            |x| -x.iter().map(|c| c * c).sum::<f64>(),
            |x| x.iter().map(|c| -2.0 * c).collect(),
        );
        let report =
            check_gg_convexity(&f, &dirac(0.0), &dirac(-1.0), &dirac(1.0), &[0.5]).unwrap();
        assert!(!report.holds);
        // Midpoint value 0 versus average -1.
        assert_abs_diff_eq!(report.worst_violation, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn gg_convexity_holds_for_convex_potential() {
        let f = quadratic_potential(&[0.3]);
        let report = check_gg_convexity(
            &f,
            &line(&[0.0, 1.0], &[0.5, 0.5]),
            &line(&[-1.0, 0.5], &[0.25, 0.75]),
            &line(&[2.0, 3.0], &[0.5, 0.5]),
            &default_t_grid(),
        )
        .unwrap();
        assert!(report.holds, "worst violation {}", report.worst_violation);
    }

    #[test]
    fn lipschitz_probe_distance_is_at_most_one() {
        let f = distance_potential(&[0.0]);
        let samples = vec![
            (dirac(0.0), dirac(2.0)),
            (line(&[0.0, 1.0], &[0.5, 0.5]), line(&[2.0, 5.0], &[0.25, 0.75])),
        ];
        let c = lipschitz_probe(&f, &samples).unwrap();
        assert!(c <= 1.0 + LIPSCHITZ_PROBE_TOL);
    }

    #[test]
    fn lipschitz_probe_constant_is_zero() {
        let f = potential_energy(|_| 3.5, |x| vec![0.0; x.len()]);
        let samples = vec![(dirac(0.0), dirac(2.0))];
        assert_eq!(lipschitz_probe(&f, &samples).unwrap(), 0.0);
    }

    #[test]
    fn lipschitz_probe_quadratic_on_ball() {
        // ||grad V|| <= R on the ball of radius R; declare R and probe with
        // measures inside the ball.
        let f = quadratic_potential(&[0.0]).with_lipschitz_bound(2.0);
        let samples = vec![
            (dirac(1.0), dirac(2.0)),
            (line(&[0.5, 1.5], &[0.5, 0.5]), line(&[-2.0, 0.0], &[0.5, 0.5])),
        ];
        let c = lipschitz_probe(&f, &samples).unwrap();
        assert!(c <= 2.0 + LIPSCHITZ_PROBE_TOL);
    }

    #[test]
    fn lipschitz_probe_flags_declared_bound_violation() {
        let f = distance_potential(&[0.0]).with_lipschitz_bound(0.1);
        let samples = vec![(dirac(0.0), dirac(2.0))];
        assert!(matches!(
            lipschitz_probe(&f, &samples),
            Err(Error::DeclaredBoundViolated { .. })
        ));
    }

    #[test]
    fn spec_parsing_round_trip() {
        let f = from_spec(r#"{"kind":"potential","name":"quadratic","params":{"a":[1.0]}}"#)
            .unwrap();
        assert_abs_diff_eq!(f.eval(&dirac(3.0)), 2.0, epsilon = 1e-15);

        let g = from_spec(r#"{"kind":"interaction","name":"quadratic"}"#).unwrap();
        assert_eq!(g.kind(), EnergyKind::Interaction);

        let s = from_spec(
            r#"{"kind":"sum","parts":[
                {"kind":"potential","name":"distance","params":{"a":[-1.0]}},
                {"kind":"potential","name":"distance","params":{"a":[1.0]}}
            ]}"#,
        )
        .unwrap();
        assert_eq!(s.kind(), EnergyKind::Sum);
        assert_abs_diff_eq!(s.eval(&dirac(5.0)), 10.0, epsilon = 1e-15);
        assert_eq!(s.lipschitz_bound(), Some(2.0));

        assert!(from_spec(r#"{"kind":"potential","name":"cubic","params":{"a":[0]}}"#).is_err());
    }
}

//! Iteration drivers and convergence monitors.
//!
//! Drivers: plain proximal point iteration, the cyclic variant with fixed
//! per-functional steps, the cyclic variant with a diminishing step
//! schedule, and generic operator iteration. Every driver records an
//! [`IterationTrace`]: per step the measure, the W2 step length, the
//! objective value, distances to caller-supplied reference measures and the
//! second moment.
//!
//! Monitors re-derive their quantities from the stored measures, so a trace
//! is checkable independently of how it was produced. The limit notion
//! backing `convergence_report` is W2-to-candidate plus second moments; on
//! the compact supports used here that is equivalent to narrow convergence,
//! which is the mode the fixed-point theory actually provides.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::Functional;
use crate::measures::DiscreteMeasure;
use crate::operators::MeasureMap;
use crate::prox::{prox, ProxConfig};
use crate::tolerances::{
    ASYMPTOTIC_REG_TOL, CONVERGENCE_TOL, DEFAULT_MAX_ITER, DEFAULT_PATIENCE, DEFAULT_STEP_TOL,
    INEQ_SLACK_TOL,
};
use crate::transport::{w2, w2_squared};

/// Step-size schedules for the cyclic drivers.
#[derive(Debug, Clone)]
pub enum StepSchedule {
    /// One step size for every functional and cycle.
    Constant(f64),
    /// One step size per functional, fixed across cycles.
    PerFunction(Vec<f64>),
    /// tau_k = tau0 / (k + 1): not summable, square-summable.
    Diminishing { tau0: f64 },
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            StepSchedule::Constant(t) => *t > 0.0,
            StepSchedule::PerFunction(ts) => !ts.is_empty() && ts.iter().all(|t| *t > 0.0),
            StepSchedule::Diminishing { tau0 } => *tau0 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig { detail: "step sizes must be positive".into() })
        }
    }

    /// Step for cycle `k`, functional `i`.
    pub fn tau(&self, k: usize, i: usize) -> f64 {
        match self {
            StepSchedule::Constant(t) => *t,
            StepSchedule::PerFunction(ts) => ts[i % ts.len()],
            StepSchedule::Diminishing { tau0 } => tau0 / (k as f64 + 1.0),
        }
    }
}

/// Stopping rule for the fixed-step drivers: stop after `patience`
/// consecutive steps shorter than `step_tol`, or at `max_iter`.
#[derive(Debug, Clone)]
pub struct StopRule {
    pub max_iter: usize,
    pub step_tol: f64,
    pub patience: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_iter: DEFAULT_MAX_ITER,
            step_tol: DEFAULT_STEP_TOL,
            patience: DEFAULT_PATIENCE,
        }
    }
}

/// One recorded iterate.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub index: usize,
    pub measure: DiscreteMeasure,
    /// W2 distance to the previous iterate (0 at index 0).
    pub step_w2: f64,
    /// Objective at this iterate (sum of all functionals for the cyclic
    /// drivers); `None` for plain operator iteration.
    pub objective: Option<f64>,
    pub dist_to_refs: Vec<f64>,
    pub second_moment: f64,
    /// Which functional produced this iterate (0-based), `None` at index 0.
    pub functional_index: Option<usize>,
    /// Step size used to produce this iterate, `None` at index 0.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceMeta {
    pub algorithm: String,
    pub schedule: String,
    pub seed: u64,
    pub num_functionals: usize,
}

/// Full record of an algorithm run.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
    pub meta: TraceMeta,
    /// Indices into `steps` at cycle boundaries (multiples of N), recorded
    /// by the cyclic drivers.
    pub cycle_boundaries: Vec<usize>,
}

impl IterationTrace {
    pub fn last_measure(&self) -> &DiscreteMeasure {
        &self.steps.last().expect("traces are nonempty").measure
    }

    /// CSV export: iter, functional_index, step_w2, objective,
    /// dist_to_ref_0..R, second_moment.
    pub fn to_csv(&self) -> String {
        let refs = self
            .steps
            .first()
            .map(|s| s.dist_to_refs.len())
            .unwrap_or(0);
        let mut out = String::from("iter,functional_index,step_w2,objective");
        for r in 0..refs {
            out.push_str(&format!(",dist_to_ref_{r}"));
        }
        out.push_str(",second_moment\n");
        for step in &self.steps {
            out.push_str(&step.index.to_string());
            out.push(',');
            if let Some(fi) = step.functional_index {
                out.push_str(&fi.to_string());
            }
            out.push_str(&format!(",{}", step.step_w2));
            out.push(',');
            if let Some(obj) = step.objective {
                out.push_str(&obj.to_string());
            }
            for d in &step.dist_to_refs {
                out.push_str(&format!(",{d}"));
            }
            out.push_str(&format!(",{}\n", step.second_moment));
        }
        out
    }
}

struct TraceBuilder {
    steps: Vec<TraceStep>,
    refs: Vec<DiscreteMeasure>,
}

impl TraceBuilder {
    fn new(mu0: &DiscreteMeasure, refs: &[DiscreteMeasure], objective: Option<f64>) -> Result<Self> {
        let mut builder = Self { steps: Vec::new(), refs: refs.to_vec() };
        builder.push(mu0.clone(), 0.0, objective, None, None)?;
        Ok(builder)
    }

    fn push(
        &mut self,
        measure: DiscreteMeasure,
        step_w2: f64,
        objective: Option<f64>,
        functional_index: Option<usize>,
        tau: Option<f64>,
    ) -> Result<()> {
        let dist_to_refs = self
            .refs
            .iter()
            .map(|r| w2(&measure, r))
            .collect::<Result<Vec<f64>>>()?;
        let second_moment = measure.second_moment();
        self.steps.push(TraceStep {
            index: self.steps.len(),
            measure,
            step_w2,
            objective,
            dist_to_refs,
            second_moment,
            functional_index,
            tau,
        });
        Ok(())
    }

    fn finish(self, meta: TraceMeta, cycle_boundaries: Vec<usize>) -> IterationTrace {
        IterationTrace { steps: self.steps, meta, cycle_boundaries }
    }
}

/// Proximal point iteration mu_{n+1} = prox(mu_n).
pub fn ppa(
    f: &Functional,
    cfg: &ProxConfig,
    mu0: &DiscreteMeasure,
    refs: &[DiscreteMeasure],
    stop: &StopRule,
) -> Result<IterationTrace> {
    let mut builder = TraceBuilder::new(mu0, refs, Some(f.eval(mu0)))?;
    let mut current = mu0.clone();
    let mut quiet = 0usize;
    for _ in 0..stop.max_iter {
        let next = prox(f, cfg, &current)?;
        let step = w2(&next, &current)?;
        builder.push(next.clone(), step, Some(f.eval(&next)), Some(0), Some(cfg.tau))?;
        current = next;
        quiet = if step < stop.step_tol { quiet + 1 } else { 0 };
        if quiet >= stop.patience {
            break;
        }
    }
    Ok(builder.finish(
        TraceMeta {
            algorithm: "ppa".into(),
            schedule: format!("constant(tau={})", cfg.tau),
            seed: 0,
            num_functionals: 1,
        },
        Vec::new(),
    ))
}

/// Cyclic proximal point iteration: functional n mod N acts at step n,
/// each with its own configuration. The recorded objective is the sum of
/// all functionals.
pub fn cyclic_ppa(
    fs: &[Functional],
    cfgs: &[ProxConfig],
    mu0: &DiscreteMeasure,
    refs: &[DiscreteMeasure],
    stop: &StopRule,
) -> Result<IterationTrace> {
    if fs.is_empty() || fs.len() != cfgs.len() {
        return Err(Error::InvalidConfig {
            detail: "need one configuration per functional".into(),
        });
    }
    let total = |mu: &DiscreteMeasure| fs.iter().map(|f| f.eval(mu)).sum::<f64>();
    let n_fun = fs.len();
    let mut builder = TraceBuilder::new(mu0, refs, Some(total(mu0)))?;
    let mut boundaries = vec![0usize];
    let mut current = mu0.clone();
    let mut quiet = 0usize;
    for n in 0..stop.max_iter {
        let i = n % n_fun;
        let next = prox(&fs[i], &cfgs[i], &current)?;
        let step = w2(&next, &current)?;
        builder.push(next.clone(), step, Some(total(&next)), Some(i), Some(cfgs[i].tau))?;
        current = next;
        if (n + 1) % n_fun == 0 {
            boundaries.push(n + 1);
        }
        quiet = if step < stop.step_tol { quiet + 1 } else { 0 };
        if quiet >= stop.patience {
            break;
        }
    }
    Ok(builder.finish(
        TraceMeta {
            algorithm: "cppa".into(),
            schedule: "per-function".into(),
            seed: 0,
            num_functionals: n_fun,
        },
        boundaries,
    ))
}

/// Cyclic proximal point iteration with diminishing steps tau_k shared by
/// all functionals within cycle k. Every functional must declare a
/// Lipschitz bound (the convergence regime this driver targets assumes no
/// common minimizer, where those bounds control the per-step drift).
pub fn cyclic_ppa_diminishing(
    fs: &[Functional],
    schedule: &StepSchedule,
    mu0: &DiscreteMeasure,
    refs: &[DiscreteMeasure],
    max_cycles: usize,
) -> Result<IterationTrace> {
    schedule.validate()?;
    if fs.is_empty() {
        return Err(Error::InvalidConfig { detail: "need at least one functional".into() });
    }
    for (index, f) in fs.iter().enumerate() {
        if f.lipschitz_bound().is_none() {
            return Err(Error::MissingLipschitzBound { index });
        }
    }
    let total = |mu: &DiscreteMeasure| fs.iter().map(|f| f.eval(mu)).sum::<f64>();
    let n_fun = fs.len();
    let mut builder = TraceBuilder::new(mu0, refs, Some(total(mu0)))?;
    let mut boundaries = vec![0usize];
    let mut current = mu0.clone();
    for k in 0..max_cycles {
        for (i, f) in fs.iter().enumerate() {
            let tau = schedule.tau(k, i);
            let cfg = ProxConfig::new(tau)?;
            let next = prox(f, &cfg, &current)?;
            let step = w2(&next, &current)?;
            builder.push(next.clone(), step, Some(total(&next)), Some(i), Some(tau))?;
            current = next;
        }
        boundaries.push((k + 1) * n_fun);
    }
    Ok(builder.finish(
        TraceMeta {
            algorithm: "cppa-diminishing".into(),
            schedule: match schedule {
                StepSchedule::Diminishing { tau0 } => format!("diminishing(tau0={tau0})"),
                StepSchedule::Constant(t) => format!("constant(tau={t})"),
                StepSchedule::PerFunction(_) => "per-function".into(),
            },
            seed: 0,
            num_functionals: n_fun,
        },
        boundaries,
    ))
}

/// Plain operator iteration mu_{n+1} = T(mu_n).
pub fn iterate_operator(
    map: &MeasureMap,
    mu0: &DiscreteMeasure,
    refs: &[DiscreteMeasure],
    stop: &StopRule,
) -> Result<IterationTrace> {
    let mut builder = TraceBuilder::new(mu0, refs, None)?;
    let mut current = mu0.clone();
    let mut quiet = 0usize;
    for _ in 0..stop.max_iter {
        let next = map.apply(&current)?;
        let step = w2(&next, &current)?;
        builder.push(next.clone(), step, None, None, None)?;
        current = next;
        quiet = if step < stop.step_tol { quiet + 1 } else { 0 };
        if quiet >= stop.patience {
            break;
        }
    }
    Ok(builder.finish(
        TraceMeta {
            algorithm: format!("iterate({})", map.label()),
            schedule: "none".into(),
            seed: 0,
            num_functionals: 0,
        },
        Vec::new(),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct MonitorViolation {
    pub step: usize,
    pub ref_index: usize,
    pub amount: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FejerReport {
    pub holds: bool,
    pub worst_violation: f64,
    pub violations: Vec<MonitorViolation>,
}

/// Strict monotonicity check: W2(mu_{n+1}, nu) <= W2(mu_n, nu) for every
/// step and every reference. Distances are recomputed from the stored
/// measures.
pub fn fejer_monitor(trace: &IterationTrace, refs: &[DiscreteMeasure]) -> Result<FejerReport> {
    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for (ref_index, nu) in refs.iter().enumerate() {
        let mut prev = w2(&trace.steps[0].measure, nu)?;
        for step in &trace.steps[1..] {
            let dist = w2(&step.measure, nu)?;
            let violation = dist - prev;
            worst = worst.max(violation);
            if violation > INEQ_SLACK_TOL {
                violations.push(MonitorViolation {
                    step: step.index,
                    ref_index,
                    amount: violation,
                });
            }
            prev = dist;
        }
    }
    Ok(FejerReport { holds: violations.is_empty(), worst_violation: worst, violations })
}

/// Relaxed monotonicity at cycle boundaries for diminishing-step runs:
/// with F the sum of the functionals, L the largest declared Lipschitz
/// bound and N the cycle length,
///
/// W2^2(mu_{(k+1)N}, nu) <= W2^2(mu_kN, nu) - 2 tau_k (F(mu_kN) - F(nu))
///                          + 2 tau_k^2 L^2 N (N + 1).
pub fn near_fejer_monitor(
    trace: &IterationTrace,
    refs: &[DiscreteMeasure],
    fs: &[Functional],
) -> Result<FejerReport> {
    let n_fun = fs.len();
    if n_fun == 0 {
        return Err(Error::InvalidConfig { detail: "need the functionals".into() });
    }
    let mut l_max: f64 = 0.0;
    for (index, f) in fs.iter().enumerate() {
        match f.lipschitz_bound() {
            Some(l) => l_max = l_max.max(l),
            None => return Err(Error::MissingLipschitzBound { index }),
        }
    }
    let total = |mu: &DiscreteMeasure| fs.iter().map(|f| f.eval(mu)).sum::<f64>();
    let slack_coeff = 2.0 * l_max * l_max * (n_fun as f64) * (n_fun as f64 + 1.0);

    let mut violations = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for window in trace.cycle_boundaries.windows(2) {
        let (b0, b1) = (window[0], window[1]);
        let mu_start = &trace.steps[b0].measure;
        let mu_end = &trace.steps[b1].measure;
        // tau_k is attached to the steps inside cycle k.
        let tau = trace.steps[b0 + 1]
            .tau
            .ok_or_else(|| Error::InvalidConfig { detail: "trace lacks step sizes".into() })?;
        let f_start = total(mu_start);
        for (ref_index, nu) in refs.iter().enumerate() {
            let lhs = w2_squared(mu_end, nu)?;
            let rhs = w2_squared(mu_start, nu)? - 2.0 * tau * (f_start - total(nu))
                + tau * tau * slack_coeff;
            let violation = lhs - rhs;
            worst = worst.max(violation);
            if violation > INEQ_SLACK_TOL {
                violations.push(MonitorViolation { step: b1, ref_index, amount: violation });
            }
        }
    }
    Ok(FejerReport { holds: violations.is_empty(), worst_violation: worst, violations })
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRegularityReport {
    pub steps: Vec<f64>,
    pub sum_of_squares: f64,
    /// Telescoping bound (alpha/(1-alpha)) W2^2(mu_0, nu) per reference.
    pub bounds: Vec<f64>,
    pub holds: bool,
}

/// For a trace driven by a quasi alpha-firm map, the squared step lengths
/// telescope: their sum is at most (alpha/(1-alpha)) W2^2(mu_0, nu) for
/// every fixed point nu. Checks the bound against each reference recorded
/// in the trace.
pub fn asymptotic_regularity(
    trace: &IterationTrace,
    alpha: f64,
) -> Result<AsymptoticRegularityReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig { detail: format!("alpha = {alpha}") });
    }
    let steps: Vec<f64> = trace.steps[1..].iter().map(|s| s.step_w2).collect();
    let sum_of_squares: f64 = steps.iter().map(|s| s * s).sum();
    let factor = alpha / (1.0 - alpha);
    let bounds: Vec<f64> = trace.steps[0]
        .dist_to_refs
        .iter()
        .map(|d| factor * d * d)
        .collect();
    let holds = bounds
        .iter()
        .all(|b| sum_of_squares <= b + ASYMPTOTIC_REG_TOL);
    Ok(AsymptoticRegularityReport { steps, sum_of_squares, bounds, holds })
}

/// Checks the growth transfer inequality
/// W2^2(T mu, nu) - W2^2(mu, nu) <= C (phi(nu) - phi(T mu)) per pair.
pub fn quadratic_growth_check(
    map: &MeasureMap,
    phi: &Functional,
    c: f64,
    pairs: &[(DiscreteMeasure, DiscreteMeasure)],
) -> Result<crate::operators::CheckReport> {
    if c <= 0.0 {
        return Err(Error::InvalidConfig { detail: format!("C = {c}") });
    }
    let mut slacks = Vec::with_capacity(pairs.len());
    for (mu, nu) in pairs {
        let t_mu = map.apply(mu)?;
        let lhs = w2_squared(&t_mu, nu)? - w2_squared(mu, nu)?;
        let rhs = c * (phi.eval(nu) - phi.eval(&t_mu));
        slacks.push(rhs - lhs);
    }
    Ok(crate::operators::check_report_from_slacks(slacks))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub w2_tail: Vec<f64>,
    pub moment_gap_tail: Vec<f64>,
    pub last_w2: f64,
    pub last_moment_gap: f64,
}

/// Declares convergence to the candidate when both the W2 distance and the
/// second-moment gap stay below `tol` over the last `patience` iterates.
pub fn convergence_report(
    trace: &IterationTrace,
    candidate: &DiscreteMeasure,
    tol: f64,
    patience: usize,
) -> Result<ConvergenceReport> {
    let tail_len = patience.max(1).min(trace.steps.len());
    let candidate_moment = candidate.second_moment();
    let tail = &trace.steps[trace.steps.len() - tail_len..];
    let mut w2_tail = Vec::with_capacity(tail_len);
    let mut moment_gap_tail = Vec::with_capacity(tail_len);
    for step in tail {
        w2_tail.push(w2(&step.measure, candidate)?);
        moment_gap_tail.push((step.second_moment - candidate_moment).abs());
    }
    let converged = w2_tail.iter().all(|d| *d < tol)
        && moment_gap_tail.iter().all(|g| *g < tol);
    Ok(ConvergenceReport {
        converged,
        last_w2: *w2_tail.last().unwrap(),
        last_moment_gap: *moment_gap_tail.last().unwrap(),
        w2_tail,
        moment_gap_tail,
    })
}

/// Default tolerance/patience variant of [`convergence_report`].
pub fn convergence_report_default(
    trace: &IterationTrace,
    candidate: &DiscreteMeasure,
) -> Result<ConvergenceReport> {
    convergence_report(trace, candidate, CONVERGENCE_TOL, DEFAULT_PATIENCE)
}

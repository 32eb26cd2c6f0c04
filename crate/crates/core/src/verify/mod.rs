//! Batch verification: each check samples a claim about the model, counts
//! violations and reports the worst margin seen.
//!
//! Every check draws from its own ChaCha8 stream seeded with
//! `seed ^ fnv1a64(check_id)`, so results do not depend on which checks
//! run, in which order, or on how many threads run them.

mod checks;
mod model;
mod sampling;

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, State};
use crate::roots::InvariantRegion;
use crate::timescale::TimeScale;

pub use model::{Model, Mutation};
pub use sampling::{check_rng, fnv1a64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub check: String,
    pub samples: u64,
    pub violations: u64,
    /// Smallest signed slack seen; negative means a violation. `null` in
    /// JSON when nothing was sampled.
    pub worst_margin: f64,
    pub elapsed_ms: f64,
    pub verdict: Verdict,
    /// First few violations, human readable.
    pub diagnostics: Vec<String>,
}

const MAX_DIAGNOSTICS: usize = 10;

impl CheckReport {
    /// Copy with the wall-clock field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> CheckReport {
        CheckReport {
            elapsed_ms: 0.0,
            ..self.clone()
        }
    }
}

/// Running tally for one check.
#[derive(Debug)]
pub(crate) struct Tally {
    samples: u64,
    violations: u64,
    worst: f64,
    diagnostics: Vec<String>,
}

impl Tally {
    pub(crate) fn new() -> Self {
        Tally {
            samples: 0,
            violations: 0,
            worst: f64::INFINITY,
            diagnostics: Vec::new(),
        }
    }

    /// Records one sample with slack `margin`; `ok == false` is a violation.
    pub(crate) fn record(&mut self, ok: bool, margin: f64, what: impl FnOnce() -> String) {
        self.samples += 1;
        if margin < self.worst || margin.is_nan() {
            self.worst = margin;
        }
        if !ok {
            self.violations += 1;
            if self.diagnostics.len() < MAX_DIAGNOSTICS {
                self.diagnostics.push(what());
            }
        }
    }

    pub(crate) fn merge(&mut self, other: Tally) {
        self.samples += other.samples;
        self.violations += other.violations;
        if other.worst < self.worst || other.worst.is_nan() {
            self.worst = other.worst;
        }
        for d in other.diagnostics {
            if self.diagnostics.len() < MAX_DIAGNOSTICS {
                self.diagnostics.push(d);
            }
        }
    }

    fn into_report(self, check_id: String, check: &str, elapsed_ms: f64) -> CheckReport {
        CheckReport {
            check_id,
            check: check.to_string(),
            samples: self.samples,
            violations: self.violations,
            worst_margin: if self.samples == 0 {
                f64::NAN
            } else {
                self.worst
            },
            elapsed_ms,
            verdict: if self.violations == 0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            diagnostics: self.diagnostics,
        }
    }
}

/// Simulation budget: step-map applications and dense time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

fn default_max_steps() -> usize {
    10_000
}
fn default_horizon() -> f64 {
    1e6
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: default_max_steps(),
            horizon: default_horizon(),
        }
    }
}

fn default_mu_set() -> Vec<f64> {
    vec![0.0, 0.01, 0.5, 1.0, 10.0, 1000.0]
}
fn default_n_samples() -> usize {
    10_000
}
fn default_n_starts() -> usize {
    100
}
fn default_conv_tol() -> f64 {
    1e-6
}
fn default_window() -> usize {
    crate::simulate::CONVERGENCE_WINDOW
}
fn default_boundary_fraction() -> f64 {
    0.25
}
fn default_p_set() -> Vec<f64> {
    vec![0.05, 0.5, 2.0]
}
fn default_exp_tol() -> f64 {
    1e-12
}
fn default_items() -> usize {
    30
}
fn default_logistic_starts() -> Vec<f64> {
    vec![0.1, 0.5, 1.5, 3.0]
}
fn default_logistic_horizon() -> f64 {
    50.0
}
fn default_bound_tol() -> f64 {
    1e-9
}
fn default_bound_steps() -> usize {
    60
}
fn default_bound_horizon() -> f64 {
    50.0
}

/// One check and its settings. Serialized with the tag `"check"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckSpec {
    /// Sampled sign claims of the root-operators for the regime of `params`.
    SignLemmas {
        params: ModelParams,
        #[serde(default = "default_n_samples")]
        n_samples: usize,
        #[serde(default = "default_mu_set")]
        mu_set: Vec<f64>,
    },
    /// Direct vs rational evaluation of both operators, and exact
    /// quadratic dependence of the numerator on `mu`.
    TwoFormula {
        params: ModelParams,
        #[serde(default = "default_n_samples")]
        n_samples: usize,
        #[serde(default = "default_two_formula_tol")]
        tol: f64,
    },
    /// Trajectories started in (and on the boundary of) `region` stay in it.
    Invariance {
        params: ModelParams,
        timescale: TimeScale,
        #[serde(default)]
        t0: Option<f64>,
        region: InvariantRegion,
        #[serde(default = "default_n_starts")]
        n_starts: usize,
        #[serde(default = "default_boundary_fraction")]
        boundary_fraction: f64,
        #[serde(default)]
        budget: Budget,
    },
    /// Positive starts reach the limit predicted for the regime.
    GlobalConvergence {
        params: ModelParams,
        timescale: TimeScale,
        #[serde(default)]
        t0: Option<f64>,
        #[serde(default = "default_n_starts")]
        n_starts: usize,
        /// Starts used in addition to the random ones.
        #[serde(default)]
        starts: Vec<State>,
        #[serde(default)]
        budget: Budget,
        #[serde(default = "default_conv_tol")]
        tol: f64,
        #[serde(default = "default_window")]
        window: usize,
        /// Maximum recursion steps before entering an invariant region.
        #[serde(default)]
        max_entry_steps: Option<usize>,
        /// Accepted limit labels, overriding the regime default.
        #[serde(default)]
        expect: Option<Vec<String>>,
    },
    /// One step from `B0` minus `E*` never lands in the interior of `B1`.
    BoxExclusion {
        params: ModelParams,
        #[serde(default = "default_n_samples")]
        n_samples: usize,
        #[serde(default = "default_box_mu_set")]
        mu_set: Vec<f64>,
    },
    /// No sample exceeds the single-species upper envelope.
    Boundedness {
        params: Vec<ModelParams>,
        timescales: Vec<TimeScale>,
        #[serde(default = "default_n_starts")]
        n_starts: usize,
        #[serde(default = "default_bound_steps")]
        max_steps: usize,
        #[serde(default = "default_bound_horizon")]
        horizon: f64,
        #[serde(default = "default_bound_tol")]
        tol: f64,
    },
    /// Single-species simulation against the closed-form logistic solution.
    LogisticClosedForm {
        r: f64,
        #[serde(rename = "K")]
        k_cap: f64,
        timescale: TimeScale,
        #[serde(default)]
        t0: Option<f64>,
        #[serde(default = "default_logistic_starts")]
        z0: Vec<f64>,
        #[serde(default = "default_logistic_horizon")]
        horizon: f64,
        tol: f64,
    },
    /// Semigroup, reciprocal, recursion and sandwich properties of the
    /// time-scale exponential.
    ExpIdentities {
        timescale: TimeScale,
        #[serde(default)]
        t0: Option<f64>,
        #[serde(default = "default_p_set")]
        p_set: Vec<f64>,
        #[serde(default = "default_exp_samples")]
        n_samples: usize,
        /// Number of walk items (points or intervals) to sample from.
        #[serde(default = "default_items")]
        items: usize,
        #[serde(default = "default_exp_tol")]
        tol: f64,
    },
    /// Line of equilibria: coinciding operators, convergence onto the
    /// line, and no crossing of it.
    DegenerateLine {
        params: ModelParams,
        timescale: TimeScale,
        #[serde(default)]
        t0: Option<f64>,
        #[serde(default = "default_n_samples")]
        n_samples: usize,
        #[serde(default = "default_n_starts")]
        n_starts: usize,
        #[serde(default)]
        budget: Budget,
        #[serde(default = "default_conv_tol")]
        tol: f64,
    },
    /// Inside each open region the sign of each increment is that of the
    /// vector field.
    MonotoneMotion {
        params: ModelParams,
        timescale: TimeScale,
        #[serde(default)]
        t0: Option<f64>,
        #[serde(default = "default_n_starts")]
        n_starts: usize,
        #[serde(default)]
        budget: Budget,
    },
}

fn default_two_formula_tol() -> f64 {
    1e-10
}
fn default_box_mu_set() -> Vec<f64> {
    vec![0.1, 1.0, 10.0]
}
fn default_exp_samples() -> usize {
    500
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::SignLemmas { .. } => "sign_lemmas",
            CheckSpec::TwoFormula { .. } => "two_formula",
            CheckSpec::Invariance { .. } => "invariance",
            CheckSpec::GlobalConvergence { .. } => "global_convergence",
            CheckSpec::BoxExclusion { .. } => "box_exclusion",
            CheckSpec::Boundedness { .. } => "boundedness",
            CheckSpec::LogisticClosedForm { .. } => "logistic_closed_form",
            CheckSpec::ExpIdentities { .. } => "exp_identities",
            CheckSpec::DegenerateLine { .. } => "degenerate_line",
            CheckSpec::MonotoneMotion { .. } => "monotone_motion",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    /// Defaults to `<check>#<index>`.
    #[serde(default)]
    pub id: Option<String>,
    #[serde(flatten)]
    pub spec: CheckSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mutation: Mutation,
    #[serde(default)]
    pub checks: Vec<SuiteEntry>,
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigInvalid(e.to_string()))
    }
}

/// Runs one check with the given id, seed and model mutation.
pub fn run_check(
    check_id: &str,
    spec: &CheckSpec,
    seed: u64,
    mutation: Mutation,
) -> Result<CheckReport> {
    let started = Instant::now();
    let mut rng = check_rng(seed, check_id);
    let tally = checks::run(spec, mutation, &mut rng)?;
    let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(tally.into_report(check_id.to_string(), spec.name(), elapsed_ms))
}

/// Runs every check of the suite, in parallel, returning reports in suite
/// order. Any configuration error aborts the whole suite.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let ids: Vec<String> = config
        .checks
        .iter()
        .enumerate()
        .map(|(i, e)| {
            e.id.clone()
                .unwrap_or_else(|| format!("{}#{i}", e.spec.name()))
        })
        .collect();
    for (i, id) in ids.iter().enumerate() {
        if ids[..i].contains(id) {
            return Err(Error::ConfigInvalid(format!("duplicate check id {id:?}")));
        }
    }
    config
        .checks
        .par_iter()
        .zip(ids.par_iter())
        .map(|(e, id)| run_check(id, &e.spec, config.seed, config.mutation))
        .collect()
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.verdict == Verdict::Pass)
}

/// Plain-text table, one row per report.
pub fn render_table(reports: &[CheckReport]) -> String {
    let id_w = reports
        .iter()
        .map(|r| r.check_id.len())
        .max()
        .unwrap_or(0)
        .max(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<id_w$}  {:>9}  {:>10}  {:>12}  {:>10}  verdict",
        "check_id", "samples", "violations", "worst_margin", "elapsed_ms"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<id_w$}  {:>9}  {:>10}  {:>12.4e}  {:>10.1}  {}",
            r.check_id,
            r.samples,
            r.violations,
            r.worst_margin,
            r.elapsed_ms,
            match r.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
            }
        );
    }
    out
}

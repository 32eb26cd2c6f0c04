//! Trajectories of the competition model on a time scale.
//!
//! Right-scattered points advance by the exact step map. Dense stretches
//! are integrated with Dormand–Prince in logarithmic coordinates, so a
//! positive species stays positive and an absent one stays absent.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EquilibriumSet, ModelParams, State};
use crate::ode::{integrate, OdeOptions};
use crate::roots::{classify_region, region_family, InvariantRegion, Region};
use crate::timescale::{tol_at, GridItem, TimeScale};

/// What the simulator needs from a model. Implemented by [`ModelParams`];
/// the verifier wraps it to inject faults.
pub trait Dynamics: Sync {
    fn params(&self) -> &ModelParams;

    /// State at `σ(t)` from the state at `t`, where `μ(t) = mu > 0`.
    fn step(&self, mu: f64, st: State) -> State;

    /// Per-capita growth rates `(x'/x, y'/y)` on dense stretches.
    fn per_capita(&self, st: State) -> (f64, f64);
}

impl Dynamics for ModelParams {
    fn params(&self) -> &ModelParams {
        self
    }

    fn step(&self, mu: f64, st: State) -> State {
        self.step_map(mu, st)
    }

    fn per_capita(&self, st: State) -> (f64, f64) {
        (
            self.r * (1.0 - st.x / self.k_cap - self.alpha * st.y),
            self.s * (1.0 - st.y / self.l_cap - self.beta * st.x),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    /// Right-scattered point: the next sample is the step-map image.
    Recursion,
    /// Right-dense point: the next sample comes from the ODE solver.
    #[serde(rename = "dense_ode")]
    DenseODE,
}

impl SampleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleMode::Recursion => "Recursion",
            SampleMode::DenseODE => "DenseODE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub state: State,
    /// Graininess at `t`.
    pub mu: f64,
    pub mode: SampleMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SimStatus {
    Completed,
    /// The stop predicate fired.
    Stopped,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub params: ModelParams,
    pub timescale: TimeScale,
    pub samples: Vec<Sample>,
    pub status: SimStatus,
    pub recursion_steps: usize,
    pub dense_time: f64,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory is never empty")
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        self.samples.iter().map(|s| s.state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOptions {
    /// Maximum number of step-map applications.
    pub max_steps: usize,
    /// Maximum total length of dense stretches integrated.
    pub dense_horizon: f64,
    pub ode: OdeOptions,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            max_steps: 10_000,
            dense_horizon: 1e6,
            ode: OdeOptions::default(),
        }
    }
}

/// Simulates from `(t0, x0)` up to the first point of the scale at or
/// beyond `t_end` (or until the budget runs out when `t_end` is `None`).
///
/// With a finite `t_end`, running out of budget first yields status
/// [`SimStatus::BudgetExceeded`]; without one, it ends the run normally.
pub fn simulate<D: Dynamics + ?Sized>(
    dynamics: &D,
    ts: &TimeScale,
    t0: f64,
    x0: State,
    t_end: Option<f64>,
    opts: &SimOptions,
) -> Result<Trajectory> {
    simulate_until(dynamics, ts, t0, x0, t_end, opts, |_, _| false)
}

/// Like [`simulate`], stopping early once `stop(t, state)` holds.
pub fn simulate_until<D, F>(
    dynamics: &D,
    ts: &TimeScale,
    t0: f64,
    x0: State,
    t_end: Option<f64>,
    opts: &SimOptions,
    mut stop: F,
) -> Result<Trajectory>
where
    D: Dynamics + ?Sized,
    F: FnMut(f64, &State) -> bool,
{
    if !(x0.x.is_finite() && x0.y.is_finite() && x0.is_nonnegative()) {
        return Err(Error::ConfigInvalid(format!(
            "initial state must be finite and nonnegative, got ({}, {})",
            x0.x, x0.y
        )));
    }
    if let Some(te) = t_end {
        if te.is_nan() {
            return Err(Error::ConfigInvalid("end time is NaN".into()));
        }
    }
    let t_end = t_end.unwrap_or(f64::INFINITY);
    let bounded = t_end.is_finite();
    let reached = |t: f64| bounded && t >= t_end - tol_at(t_end);

    let mut traj = Trajectory {
        params: *dynamics.params(),
        timescale: ts.clone(),
        samples: Vec::new(),
        status: SimStatus::Completed,
        recursion_steps: 0,
        dense_time: 0.0,
    };
    let mut s = x0;
    let mut t = t0;
    let mut walk = ts.walk(t0)?;
    let budget_status = if bounded {
        SimStatus::BudgetExceeded
    } else {
        SimStatus::Completed
    };

    if stop(t, &s) {
        traj.status = SimStatus::Stopped;
    } else {
        'run: loop {
            let Some(item) = walk.next() else {
                // the scale ran past the largest representable time
                traj.status = budget_status;
                break;
            };
            t = item.start();
            if reached(t) {
                break;
            }
            match item {
                GridItem::Scattered { t: ti, mu } => {
                    if traj.recursion_steps >= opts.max_steps {
                        traj.status = budget_status;
                        break;
                    }
                    traj.samples.push(Sample {
                        t: ti,
                        state: s,
                        mu,
                        mode: SampleMode::Recursion,
                    });
                    s = dynamics.step(mu, s);
                    traj.recursion_steps += 1;
                    t = ti + mu;
                    if stop(t, &s) {
                        traj.status = SimStatus::Stopped;
                        break;
                    }
                }
                GridItem::Dense {
                    start,
                    end,
                    exit_mu,
                } => {
                    let room = opts.dense_horizon - traj.dense_time;
                    let mut stop_at = end.min(t_end);
                    let horizon_cut = start + room < stop_at;
                    if horizon_cut {
                        stop_at = start + room;
                    }
                    traj.samples.push(Sample {
                        t: start,
                        state: s,
                        mu: 0.0,
                        mode: SampleMode::DenseODE,
                    });
                    let (t_reached, s_new, stopped) =
                        flow(dynamics, start, s, stop_at, &opts.ode, &mut traj, &mut stop)?;
                    traj.dense_time += t_reached - start;
                    s = s_new;
                    t = t_reached;
                    if stopped {
                        traj.status = SimStatus::Stopped;
                        break 'run;
                    }
                    if horizon_cut {
                        traj.status = budget_status;
                        break;
                    }
                    if stop_at < end || reached(end) {
                        break;
                    }
                    // `end` is right-scattered: take the exit jump
                    if traj.recursion_steps >= opts.max_steps {
                        traj.status = budget_status;
                        break;
                    }
                    traj.samples.push(Sample {
                        t: end,
                        state: s,
                        mu: exit_mu,
                        mode: SampleMode::Recursion,
                    });
                    s = dynamics.step(exit_mu, s);
                    traj.recursion_steps += 1;
                    t = end + exit_mu;
                    if stop(t, &s) {
                        traj.status = SimStatus::Stopped;
                        break;
                    }
                }
            }
        }
    }
    let mu = ts.graininess(t).unwrap_or(0.0);
    traj.samples.push(Sample {
        t,
        state: s,
        mu,
        mode: if mu > 0.0 {
            SampleMode::Recursion
        } else {
            SampleMode::DenseODE
        },
    });
    Ok(traj)
}

/// Integrates over `[start, stop_at]`, pushing a flow sample after every
/// accepted step except the last. Returns `(t, state, stopped)`.
fn flow<D, F>(
    dynamics: &D,
    start: f64,
    s: State,
    stop_at: f64,
    ode: &OdeOptions,
    traj: &mut Trajectory,
    stop: &mut F,
) -> Result<(f64, State, bool)>
where
    D: Dynamics + ?Sized,
    F: FnMut(f64, &State) -> bool,
{
    if stop_at <= start {
        return Ok((start, s, false));
    }
    let live = [s.x > 0.0, s.y > 0.0];
    let to_state = |u: &[f64; 2]| -> State {
        State::new(
            if live[0] { u[0].exp() } else { 0.0 },
            if live[1] { u[1].exp() } else { 0.0 },
        )
    };
    let u0 = [
        if live[0] { s.x.ln() } else { 0.0 },
        if live[1] { s.y.ln() } else { 0.0 },
    ];
    let field = |u: &[f64; 2]| -> [f64; 2] {
        let (gx, gy) = dynamics.per_capita(to_state(u));
        [
            if live[0] { gx } else { 0.0 },
            if live[1] { gy } else { 0.0 },
        ]
    };
    let mut pending: Option<(f64, State)> = None;
    let mut stopped = false;
    let out = integrate(field, start, u0, stop_at, ode, |tt, u| {
        if let Some((pt, ps)) = pending.take() {
            traj.samples.push(Sample {
                t: pt,
                state: ps,
                mu: 0.0,
                mode: SampleMode::DenseODE,
            });
        }
        let st = to_state(u);
        if stop(tt, &st) {
            stopped = true;
            return false;
        }
        pending = Some((tt, st));
        true
    })?;
    // the final point is pushed by the caller, with its own graininess
    if let Some((pt, ps)) = pending {
        if pt < out.t {
            traj.samples.push(Sample {
                t: pt,
                state: ps,
                mu: 0.0,
                mode: SampleMode::DenseODE,
            });
        }
    }
    Ok((out.t, to_state(&out.y), stopped))
}

/// Default number of trailing samples that must sit at the limit.
pub const CONVERGENCE_WINDOW: usize = 10;
pub const CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// `"E0"`, `"EK"`, `"EL"`, `"Estar"` or `"line point (x, h(x))"`.
    pub target: Option<String>,
    pub target_state: Option<State>,
    /// Distance of the last sample from the target (from the nearest
    /// equilibrium when there is none).
    pub final_distance: f64,
    /// Recursion steps taken before the first sample inside an invariant
    /// region of the regime.
    pub steps_to_invariant_region: Option<usize>,
}

/// Converged iff the last `window` samples all lie within `tol` (∞-norm)
/// of one equilibrium, or — on a line of equilibria — within `tol` of the
/// line with drift below `tol` across the window.
pub fn detect_convergence(
    traj: &Trajectory,
    eqs: &EquilibriumSet,
    tol: f64,
    window: usize,
) -> ConvergenceReport {
    let p = &traj.params;
    let last = traj.last().state;
    let n = traj.samples.len();
    let tail = &traj.samples[n.saturating_sub(window.max(1))..];
    let full = tail.len() >= window.max(1);

    let mut points: Vec<(&str, State)> = vec![("E0", eqs.e0), ("EK", eqs.ek), ("EL", eqs.el)];
    if let Some(e) = eqs.estar {
        points.push(("Estar", e));
    }
    let (name, target) = points
        .iter()
        .copied()
        .min_by(|a, b| last.dist_inf(&a.1).total_cmp(&last.dist_inf(&b.1)))
        .expect("nonempty");
    let final_distance = last.dist_inf(&target);
    let at_point = full && tail.iter().all(|s| s.state.dist_inf(&target) < tol);

    let steps_to_invariant_region = steps_to_invariant(traj);
    if at_point {
        return ConvergenceReport {
            converged: true,
            target: Some(name.to_string()),
            target_state: Some(target),
            final_distance,
            steps_to_invariant_region,
        };
    }
    if eqs.line {
        let on_line = |s: &State| {
            (s.y - p.nullcline_h(s.x)).abs() < tol && s.x >= -tol && s.x <= p.k_cap + tol
        };
        let drift = tail[0].state.dist_inf(&last);
        if full && tail.iter().all(|s| on_line(&s.state)) && drift < tol {
            let foot = State::new(
                last.x.clamp(0.0, p.k_cap),
                p.nullcline_h(last.x.clamp(0.0, p.k_cap)),
            );
            return ConvergenceReport {
                converged: true,
                target: Some(format!("line point ({}, {})", foot.x, foot.y)),
                target_state: Some(foot),
                final_distance: last.dist_inf(&foot),
                steps_to_invariant_region,
            };
        }
    }
    ConvergenceReport {
        converged: false,
        target: None,
        target_state: None,
        final_distance,
        steps_to_invariant_region,
    }
}

fn steps_to_invariant(traj: &Trajectory) -> Option<usize> {
    let p = &traj.params;
    let regions = InvariantRegion::for_family(region_family(p));
    let mut steps = 0;
    for s in &traj.samples {
        if regions
            .iter()
            .any(|r| r.contains(p, s.state).unwrap_or(false))
        {
            return Some(steps);
        }
        if s.mode == SampleMode::Recursion {
            steps += 1;
        }
    }
    None
}

/// Stop predicate for [`simulate_until`]: fires once `window` consecutive
/// states sit within `tol` of one of `eqs` (or of the line of equilibria).
pub fn settle_detector(
    p: ModelParams,
    eqs: EquilibriumSet,
    tol: f64,
    window: usize,
) -> impl FnMut(f64, &State) -> bool {
    let mut points = vec![eqs.e0, eqs.ek, eqs.el];
    points.extend(eqs.estar);
    let mut run = 0usize;
    let mut prev: Option<State> = None;
    let mut anchor = State::default();
    move |_, s| {
        let near_point = points.iter().find(|e| s.dist_inf(e) < tol).copied();
        let near = match near_point {
            Some(e) => {
                if prev.is_none() || anchor != e {
                    run = 0;
                }
                anchor = e;
                true
            }
            None if eqs.line => {
                let ok = (s.y - p.nullcline_h(s.x)).abs() < tol && s.x <= p.k_cap + tol;
                if ok && run > 0 && s.dist_inf(&anchor) >= tol {
                    run = 0;
                }
                if ok && run == 0 {
                    anchor = *s;
                }
                ok
            }
            None => false,
        };
        prev = Some(*s);
        if near {
            run += 1;
        } else {
            run = 0;
        }
        run > window
    }
}

/// Region of every sample, labelled with its time.
pub fn region_trace(traj: &Trajectory) -> Vec<(f64, Region)> {
    traj.samples
        .iter()
        .map(|s| (s.t, classify_region(&traj.params, s.state)))
        .collect()
}

/// Index of the first sample inside `region`.
pub fn first_entry(traj: &Trajectory, region: InvariantRegion) -> Result<Option<usize>> {
    for (i, s) in traj.samples.iter().enumerate() {
        if region.contains(&traj.params, s.state)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::PatternItem;

    fn exclusion_params() -> ModelParams {
        ModelParams::new(0.5, 0.3, 2.0, 0.3, 1.0, 1.0).unwrap()
    }

    #[test]
    fn integers_follow_the_step_map() {
        let p = exclusion_params();
        let ts = TimeScale::integers();
        let tr = simulate(
            &p,
            &ts,
            0.0,
            State::new(2.0, 1.0),
            Some(5.0),
            &SimOptions::default(),
        )
        .unwrap();
        assert_eq!(tr.status, SimStatus::Completed);
        assert_eq!(tr.samples.len(), 6);
        let mut s = State::new(2.0, 1.0);
        for (i, smp) in tr.samples.iter().enumerate() {
            assert_eq!(smp.t, i as f64);
            assert_eq!(smp.state, s);
            s = p.step_map(1.0, s);
        }
        assert_eq!(tr.samples[1].state, State::new(1.0, 1.3 / 1.48));
    }

    #[test]
    fn reals_match_logistic_on_axis() {
        let p = exclusion_params();
        let tr = simulate(
            &p,
            &TimeScale::Reals,
            0.0,
            State::new(0.1, 0.0),
            Some(10.0),
            &SimOptions::default(),
        )
        .unwrap();
        let last = tr.last();
        assert_eq!(last.t, 10.0);
        assert_eq!(last.state.y, 0.0);
        let e = (0.5f64 * 10.0).exp();
        let exact = e * 0.1 / (1.0 + 0.1 * (e - 1.0));
        assert!((last.state.x - exact).abs() < 1e-8);
        assert!(tr.samples.iter().all(|s| s.mode == SampleMode::DenseODE));
    }

    #[test]
    fn pattern_mixes_modes() {
        let p = exclusion_params();
        let ts = TimeScale::point_interval_alternating();
        let tr = simulate(
            &p,
            &ts,
            1.0,
            State::new(0.5, 0.5),
            Some(7.0),
            &SimOptions::default(),
        )
        .unwrap();
        assert_eq!(tr.last().t, 7.0);
        assert!(tr.samples.windows(2).all(|w| w[0].t < w[1].t));
        // scattered points 1, 3, 4, 6, 7 are recursion samples
        for t in [1.0, 3.0, 4.0, 6.0] {
            let s = tr.samples.iter().find(|s| s.t == t).unwrap();
            assert_eq!(s.mode, SampleMode::Recursion);
            assert_eq!(s.mu, 1.0);
        }
        assert!(tr
            .samples
            .iter()
            .any(|s| s.mode == SampleMode::DenseODE && s.t > 2.0 && s.t < 3.0));
        // recursion samples map to their successors
        for w in tr.samples.windows(2) {
            if w[0].mode == SampleMode::Recursion {
                assert_eq!(w[1].state, p.step_map(w[0].mu, w[0].state));
            }
        }
    }

    #[test]
    fn step_budget_is_reported() {
        let p = exclusion_params();
        let opts = SimOptions {
            max_steps: 10,
            ..Default::default()
        };
        let tr = simulate(
            &p,
            &TimeScale::integers(),
            0.0,
            State::new(0.5, 0.5),
            Some(100.0),
            &opts,
        )
        .unwrap();
        assert_eq!(tr.status, SimStatus::BudgetExceeded);
        assert_eq!(tr.recursion_steps, 10);
        let tr = simulate(
            &p,
            &TimeScale::integers(),
            0.0,
            State::new(0.5, 0.5),
            None,
            &opts,
        )
        .unwrap();
        assert_eq!(tr.status, SimStatus::Completed);
    }

    #[test]
    fn quantum_overflow_ends_the_walk() {
        let p = exclusion_params();
        let ts = TimeScale::quantum(2.0, 1.0).unwrap();
        let tr = simulate(
            &p,
            &ts,
            1.0,
            State::new(0.5, 0.5),
            Some(f64::MAX),
            &SimOptions::default(),
        )
        .unwrap();
        assert_eq!(tr.status, SimStatus::BudgetExceeded);
        assert!(tr.recursion_steps > 1000);
    }

    #[test]
    fn early_stop() {
        let p = exclusion_params();
        let el = State::new(0.0, 1.0);
        let tr = simulate_until(
            &p,
            &TimeScale::integers(),
            0.0,
            State::new(0.5, 0.5),
            None,
            &SimOptions::default(),
            |_, s| s.dist_inf(&el) < 1e-3,
        )
        .unwrap();
        assert_eq!(tr.status, SimStatus::Stopped);
        assert!(tr.last().state.dist_inf(&el) < 1e-3);
        assert!(tr.samples[tr.samples.len() - 2].state.dist_inf(&el) >= 1e-3);
    }

    #[test]
    fn rejects_bad_start() {
        let p = exclusion_params();
        let r = simulate(
            &p,
            &TimeScale::integers(),
            0.5,
            State::new(0.5, 0.5),
            Some(3.0),
            &SimOptions::default(),
        );
        assert!(matches!(r, Err(Error::PointNotInScale { .. })));
        let r = simulate(
            &p,
            &TimeScale::integers(),
            0.0,
            State::new(-0.5, 0.5),
            Some(3.0),
            &SimOptions::default(),
        );
        assert!(matches!(r, Err(Error::ConfigInvalid(_))));
    }

    #[test]
    fn dense_horizon_cut() {
        let p = exclusion_params();
        let opts = SimOptions {
            dense_horizon: 2.0,
            ..Default::default()
        };
        let tr = simulate(
            &p,
            &TimeScale::Reals,
            0.0,
            State::new(0.5, 0.5),
            Some(10.0),
            &opts,
        )
        .unwrap();
        assert_eq!(tr.status, SimStatus::BudgetExceeded);
        assert_eq!(tr.last().t, 2.0);
    }

    #[test]
    fn convergence_report() {
        let p = exclusion_params();
        let tr = simulate(
            &p,
            &TimeScale::integers(),
            0.0,
            State::new(2.0, 1.0),
            Some(300.0),
            &SimOptions::default(),
        )
        .unwrap();
        let rep = detect_convergence(&tr, &p.equilibria(), 1e-6, CONVERGENCE_WINDOW);
        assert!(rep.converged);
        assert_eq!(rep.target.as_deref(), Some("EL"));
        assert!(rep.final_distance < 1e-6);
        // by hand: (2,1) -> (1, .878) -> (.631, .844) -> (.438, .837), first inside
        assert_eq!(rep.steps_to_invariant_region, Some(3));
        let short = simulate(
            &p,
            &TimeScale::integers(),
            0.0,
            State::new(2.0, 1.0),
            Some(5.0),
            &SimOptions::default(),
        )
        .unwrap();
        assert!(!detect_convergence(&short, &p.equilibria(), 1e-6, 10).converged);
    }

    #[test]
    fn coexistence_on_integers_reaches_estar() {
        let p = ModelParams::new(1.0, 1.0, 0.5, 0.5, 1.0, 1.0).unwrap();
        let eqs = p.equilibria();
        let tr = simulate_until(
            &p,
            &TimeScale::integers(),
            0.0,
            State::new(0.5, 0.5),
            None,
            &SimOptions::default(),
            settle_detector(p, eqs, 1e-9, CONVERGENCE_WINDOW),
        )
        .unwrap();
        assert_eq!(tr.status, SimStatus::Stopped);
        let rep = detect_convergence(&tr, &eqs, CONVERGENCE_TOL, CONVERGENCE_WINDOW);
        assert_eq!(rep.target.as_deref(), Some("Estar"));
    }

    #[test]
    fn origin_is_constant() {
        let p = exclusion_params();
        let tr = simulate(
            &p,
            &TimeScale::point_interval_alternating(),
            1.0,
            State::default(),
            Some(10.0),
            &SimOptions::default(),
        )
        .unwrap();
        assert!(tr.states().all(|s| s == State::default()));
    }

    #[test]
    fn degenerate_converges_to_a_line_point() {
        let p = ModelParams::new(1.0, 1.0, 0.5, 0.25, 4.0, 2.0).unwrap();
        let eqs = p.equilibria();
        let tr = simulate_until(
            &p,
            &TimeScale::integers(),
            0.0,
            State::new(0.5, 0.5),
            None,
            &SimOptions {
                max_steps: 100_000,
                ..Default::default()
            },
            settle_detector(p, eqs, 1e-7, CONVERGENCE_WINDOW),
        )
        .unwrap();
        let rep = detect_convergence(&tr, &eqs, 1e-6, CONVERGENCE_WINDOW);
        assert!(rep.converged, "{rep:?} {:?}", tr.status);
        assert!(rep.target.unwrap().starts_with("line point"));
    }

    #[test]
    fn exclusion_region_trace_ends_in_band() {
        let p = exclusion_params();
        let ts = TimeScale::quantum(2.0, 1.0).unwrap();
        let tr = simulate(
            &p,
            &ts,
            1.0,
            State::new(2.0, 1.0),
            None,
            &SimOptions {
                max_steps: 60,
                ..Default::default()
            },
        )
        .unwrap();
        let entry = first_entry(&tr, InvariantRegion::Omega2).unwrap().unwrap();
        assert!(entry <= 5);
        for s in &tr.samples[entry..] {
            assert!(InvariantRegion::Omega2.contains(&p, s.state).unwrap());
        }
        assert_eq!(region_trace(&tr).len(), tr.samples.len());
    }

    #[test]
    fn single_point_pattern_start_on_interval_end() {
        let ts = TimeScale::pattern(vec![PatternItem::Interval([0.0, 1.0])], 2.0, 0.0).unwrap();
        let p = exclusion_params();
        let tr = simulate(
            &p,
            &ts,
            1.0,
            State::new(0.5, 0.5),
            Some(2.5),
            &SimOptions::default(),
        )
        .unwrap();
        assert_eq!(tr.samples[0].mode, SampleMode::Recursion);
        assert_eq!(tr.samples[1].t, 2.0);
        assert_eq!(tr.last().t, 2.5);
    }
}

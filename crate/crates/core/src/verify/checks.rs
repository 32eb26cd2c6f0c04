use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::model::{Model, Mutation};
use super::sampling::{
    point_in_items, positive_in_box, sample_claim, sample_invariant_boundary,
    sample_invariant_interior, sampling_box, uniform, walk_items,
};
use super::{Budget, CheckSpec, Tally};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime, State};
use crate::ode::OdeOptions;
use crate::roots::{
    classify_region, sign_lemma_table, InvariantRegion, Nullcline, RegionLabel, ON_NULLCLINE_TOL,
};
use crate::simulate::{
    detect_convergence, settle_detector, simulate, simulate_until, Dynamics, SampleMode,
    SimOptions, Trajectory,
};
use crate::timescale::{GridItem, TimeScale};

/// Open sides of sampled regions are shrunk by this much.
pub(crate) const SAMPLING_MARGIN: f64 = 1e-8;

pub(crate) fn run(spec: &CheckSpec, mutation: Mutation, rng: &mut ChaCha8Rng) -> Result<Tally> {
    match spec {
        CheckSpec::SignLemmas {
            params,
            n_samples,
            mu_set,
        } => sign_lemmas(&Model::new(*params, mutation), *n_samples, mu_set, rng),
        CheckSpec::TwoFormula {
            params,
            n_samples,
            tol,
        } => two_formula(&Model::new(*params, mutation), *n_samples, *tol, rng),
        CheckSpec::Invariance {
            params,
            timescale,
            t0,
            region,
            n_starts,
            boundary_fraction,
            budget,
        } => invariance(
            &Model::new(*params, mutation),
            timescale,
            start_time(timescale, *t0)?,
            *region,
            *n_starts,
            *boundary_fraction,
            budget,
            rng,
        ),
        CheckSpec::GlobalConvergence {
            params,
            timescale,
            t0,
            n_starts,
            starts,
            budget,
            tol,
            window,
            max_entry_steps,
            expect,
        } => global_convergence(
            &Model::new(*params, mutation),
            timescale,
            start_time(timescale, *t0)?,
            ConvergenceSettings {
                n_starts: *n_starts,
                starts,
                budget,
                tol: *tol,
                window: *window,
                max_entry_steps: *max_entry_steps,
                expect: expect.as_deref(),
            },
            rng,
        ),
        CheckSpec::BoxExclusion {
            params,
            n_samples,
            mu_set,
        } => box_exclusion(&Model::new(*params, mutation), *n_samples, mu_set, rng),
        CheckSpec::Boundedness {
            params,
            timescales,
            n_starts,
            max_steps,
            horizon,
            tol,
        } => boundedness(
            params, timescales, mutation, *n_starts, *max_steps, *horizon, *tol, rng,
        ),
        CheckSpec::LogisticClosedForm {
            r,
            k_cap,
            timescale,
            t0,
            z0,
            horizon,
            tol,
        } => logistic(*r, *k_cap, timescale, *t0, z0, *horizon, *tol, mutation),
        CheckSpec::ExpIdentities {
            timescale,
            t0,
            p_set,
            n_samples,
            items,
            tol,
        } => exp_identities(
            timescale,
            start_time(timescale, *t0)?,
            p_set,
            *n_samples,
            *items,
            *tol,
            mutation,
            rng,
        ),
        CheckSpec::DegenerateLine {
            params,
            timescale,
            t0,
            n_samples,
            n_starts,
            budget,
            tol,
        } => degenerate_line(
            &Model::new(*params, mutation),
            timescale,
            start_time(timescale, *t0)?,
            *n_samples,
            *n_starts,
            budget,
            *tol,
            rng,
        ),
        CheckSpec::MonotoneMotion {
            params,
            timescale,
            t0,
            n_starts,
            budget,
        } => monotone_motion(
            &Model::new(*params, mutation),
            timescale,
            start_time(timescale, *t0)?,
            *n_starts,
            budget,
            rng,
        ),
    }
}

fn start_time(ts: &TimeScale, t0: Option<f64>) -> Result<f64> {
    let t0 = t0.or_else(|| ts.first_point()).unwrap_or(0.0);
    if !ts.contains(t0) {
        return Err(Error::ConfigInvalid(format!(
            "t0 = {t0} is not a point of the time scale"
        )));
    }
    Ok(t0)
}

fn sim_options(budget: &Budget, ode_tol: f64) -> SimOptions {
    SimOptions {
        max_steps: budget.max_steps,
        dense_horizon: budget.horizon,
        ode: OdeOptions {
            atol: ode_tol,
            rtol: ode_tol,
            ..OdeOptions::default()
        },
    }
}

fn merge_all(parts: Vec<Tally>) -> Tally {
    let mut t = Tally::new();
    for p in parts {
        t.merge(p);
    }
    t
}

fn sign_lemmas(m: &Model, n_samples: usize, mu_set: &[f64], rng: &mut ChaCha8Rng) -> Result<Tally> {
    let p = &m.params;
    let mut tally = Tally::new();
    for claim in sign_lemma_table(p) {
        for &mu in mu_set {
            for i in 0..n_samples {
                let Some(st) = sample_claim(rng, p, &claim.region, SAMPLING_MARGIN) else {
                    tally.record(false, f64::NAN, || {
                        format!("{}: region could not be sampled", claim.id)
                    });
                    break;
                };
                let ev = m.eval_operator(mu, st, claim.operator);
                let c = ev.coeffs;
                // rounding allowance for the expanded numerator
                let slack = 1e-13 * (c[0].abs() + c[1].abs() * mu + c[2].abs() * mu * mu);
                let num_ok = claim.sign.margin(ev.numerator) > -slack;
                let ok = claim.sign.holds(ev.value) && num_ok && ev.denominator > 0.0;
                tally.record(ok, claim.sign.margin(ev.value), || {
                    format!(
                        "{} #{i}: mu={mu} at ({:e}, {:e}): value {:e}, numerator {:e}",
                        claim.id, st.x, st.y, ev.value, ev.numerator
                    )
                });
            }
        }
    }
    Ok(tally)
}

fn two_formula(m: &Model, n_samples: usize, tol: f64, rng: &mut ChaCha8Rng) -> Result<Tally> {
    let p = &m.params;
    let b = sampling_box(p);
    let mut tally = Tally::new();
    const INTERP_MU: [f64; 4] = [0.0, 0.3, 1.0, 5.0];
    for i in 0..n_samples {
        let st = State::new(uniform(rng, b[0], b[1]), uniform(rng, b[2], b[3]));
        let mu = if rng.gen_range(0..10) == 0 {
            0.0
        } else {
            10f64.powf(uniform(rng, -3.0, 3.0))
        };
        for which in [Nullcline::H, Nullcline::K] {
            let ev = m.eval_operator(mu, st, which);
            let img = m.step(mu, st);
            let scale = img.y.abs() + which.eval(p, img.x).abs();
            let err = (ev.value - ev.rational_value()).abs();
            let bound = tol * scale.max(f64::MIN_POSITIVE);
            tally.record(err <= bound, bound - err, || {
                format!(
                    "#{i} L_{}: mu={mu} at ({:e}, {:e}): direct {:e} vs rational {:e}",
                    which.name(),
                    st.x,
                    st.y,
                    ev.value,
                    ev.rational_value()
                )
            });

            // value * denominator is a quadratic in mu: the value at 5
            // follows from those at 0, 0.3 and 1
            let n_of = |mu: f64| {
                let e = m.eval_operator(mu, st, which);
                let img = if mu == 0.0 { st } else { m.step(mu, st) };
                let mag = (img.y.abs() + which.eval(p, img.x).abs()) * e.denominator;
                (e.value * e.denominator, mag)
            };
            let vals: Vec<(f64, f64)> = INTERP_MU.iter().map(|&u| n_of(u)).collect();
            let [u0, u1, u2, u3] = INTERP_MU;
            let l0 = (u3 - u1) * (u3 - u2) / ((u0 - u1) * (u0 - u2));
            let l1 = (u3 - u0) * (u3 - u2) / ((u1 - u0) * (u1 - u2));
            let l2 = (u3 - u0) * (u3 - u1) / ((u2 - u0) * (u2 - u1));
            let pred = l0 * vals[0].0 + l1 * vals[1].0 + l2 * vals[2].0;
            let mag =
                l0.abs() * vals[0].1 + l1.abs() * vals[1].1 + l2.abs() * vals[2].1 + vals[3].1;
            let err = (pred - vals[3].0).abs();
            let bound = tol * mag.max(f64::MIN_POSITIVE);
            tally.record(err <= bound, bound - err, || {
                format!(
                    "#{i} L_{} not quadratic in mu at ({:e}, {:e}): predicted {:e}, got {:e}",
                    which.name(),
                    st.x,
                    st.y,
                    pred,
                    vals[3].0
                )
            });
        }
    }
    Ok(tally)
}

/// Attractors of the unmutated model, used to cut runs short.
fn stopper(m: &Model, tol: f64, window: usize) -> impl FnMut(f64, &State) -> bool {
    settle_detector(m.params, m.params.equilibria(), tol, window)
}

#[allow(clippy::too_many_arguments)]
fn invariance(
    m: &Model,
    ts: &TimeScale,
    t0: f64,
    region: InvariantRegion,
    n_starts: usize,
    boundary_fraction: f64,
    budget: &Budget,
    rng: &mut ChaCha8Rng,
) -> Result<Tally> {
    let p = &m.params;
    // fails early with RegimeMismatch
    region.margin(p, State::default())?;
    let n_boundary = ((n_starts as f64) * boundary_fraction.clamp(0.0, 1.0)).round() as usize;
    let mut starts = Vec::with_capacity(n_starts);
    for i in 0..n_starts {
        let s = if i < n_boundary {
            sample_invariant_boundary(rng, p, region)
        } else {
            sample_invariant_interior(rng, p, region)
        };
        starts.push(s.ok_or_else(|| {
            Error::ConfigInvalid(format!("could not sample starts in {}", region.name()))
        })?);
    }
    let opts = sim_options(budget, 1e-12);
    let parts: Vec<Result<Tally>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, &s0)| {
            let mut tally = Tally::new();
            let tr = simulate_until(m, ts, t0, s0, None, &opts, stopper(m, 1e-12, 3))?;
            let mut worst = f64::INFINITY;
            let mut exit = None;
            for smp in &tr.samples {
                let mg = region.margin(p, smp.state)?;
                if mg < worst {
                    worst = mg;
                }
                if exit.is_none() && mg < -ON_NULLCLINE_TOL {
                    exit = Some(*smp);
                }
            }
            tally.record(exit.is_none(), worst, || {
                let e = exit.unwrap();
                format!(
                    "start #{i} ({:e}, {:e}) left {} at t={}: ({:e}, {:e})",
                    s0.x,
                    s0.y,
                    region.name(),
                    e.t,
                    e.state.x,
                    e.state.y
                )
            });
            Ok(tally)
        })
        .collect();
    Ok(merge_all(parts.into_iter().collect::<Result<_>>()?))
}

pub(crate) struct ConvergenceSettings<'a> {
    pub n_starts: usize,
    pub starts: &'a [State],
    pub budget: &'a Budget,
    pub tol: f64,
    pub window: usize,
    pub max_entry_steps: Option<usize>,
    pub expect: Option<&'a [String]>,
}

fn expected_limits(p: &ModelParams) -> Vec<&'static str> {
    match p.regime() {
        Regime::ExclusionYWins => vec!["EL"],
        Regime::ExclusionXWins => vec!["EK"],
        Regime::Coexistence => vec!["Estar"],
        Regime::Bistable => vec!["EK", "EL", "Estar"],
        Regime::DegenerateLine => vec!["line"],
        Regime::MixedBoundary => {
            if crate::roots::InvariantRegion::Omega2
                .margin(p, p.equilibria().el)
                .is_ok_and(|m| m >= 0.0)
            {
                vec!["EL"]
            } else {
                vec!["EK"]
            }
        }
    }
}

fn global_convergence(
    m: &Model,
    ts: &TimeScale,
    t0: f64,
    cfg: ConvergenceSettings<'_>,
    rng: &mut ChaCha8Rng,
) -> Result<Tally> {
    let p = &m.params;
    let eqs = p.equilibria();
    let b = sampling_box(p);
    let mut starts: Vec<State> = cfg.starts.to_vec();
    for s in &starts {
        if !(s.x > 0.0 && s.y > 0.0) {
            return Err(Error::ConfigInvalid(format!(
                "start ({}, {}) is not positive",
                s.x, s.y
            )));
        }
    }
    starts.extend((0..cfg.n_starts).map(|_| positive_in_box(rng, b)));
    let accepted: Vec<String> = match cfg.expect {
        Some(e) => e.to_vec(),
        None => expected_limits(p).into_iter().map(String::from).collect(),
    };
    let opts = sim_options(cfg.budget, 1e-9);
    let parts: Vec<Tally> = starts
        .par_iter()
        .enumerate()
        .map(|(i, &s0)| {
            let mut tally = Tally::new();
            let run = simulate_until(m, ts, t0, s0, None, &opts, stopper(m, cfg.tol * 1e-3, cfg.window));
            let tr = match run {
                Ok(tr) => tr,
                Err(e) => {
                    tally.record(false, f64::NEG_INFINITY, || format!("start #{i}: {e}"));
                    return tally;
                }
            };
            let rep = detect_convergence(&tr, &eqs, cfg.tol, cfg.window);
            let label_ok = match &rep.target {
                Some(t) => accepted.iter().any(|a| {
                    if a == "line" {
                        t.starts_with("line point")
                    } else {
                        a == t
                    }
                }),
                None => false,
            };
            let entry_ok = match cfg.max_entry_steps {
                Some(n) => rep.steps_to_invariant_region.is_some_and(|k| k <= n),
                None => true,
            };
            let ok = rep.converged && label_ok && entry_ok && rep.target.as_deref() != Some("E0");
            tally.record(ok, cfg.tol - rep.final_distance, || {
                format!(
                    "start #{i} ({:e}, {:e}): status {:?}, limit {:?}, distance {:e}, entry after {:?} steps",
                    s0.x, s0.y, tr.status, rep.target, rep.final_distance, rep.steps_to_invariant_region
                )
            });
            tally
        })
        .collect();
    Ok(merge_all(parts))
}

fn box_exclusion(
    m: &Model,
    n_samples: usize,
    mu_set: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<Tally> {
    let p = &m.params;
    let e = p.equilibria().estar.ok_or_else(|| Error::RegimeMismatch {
        regime: p.regime(),
        family: "boxes".to_string(),
    })?;
    let mut tally = Tally::new();
    let probe = |st: State, mu: f64, tally: &mut Tally, tag: &str| {
        let img = m.step(mu, st);
        // the image is in int B1 iff both slacks are negative
        let margin = (e.x - img.x).max(e.y - img.y);
        tally.record(margin >= 0.0, margin, || {
            format!(
                "{tag}: mu={mu} ({:e}, {:e}) -> ({:e}, {:e})",
                st.x, st.y, img.x, img.y
            )
        });
    };
    for &mu in mu_set {
        let mut n = 0;
        while n < n_samples {
            let st = State::new(uniform(rng, 0.0, e.x), uniform(rng, 0.0, e.y));
            if st.dist_inf(&e) <= SAMPLING_MARGIN {
                continue;
            }
            probe(st, mu, &mut tally, "B0");
            n += 1;
        }
        // the edges through E*
        for j in 0..100 {
            let f = j as f64 / 100.0;
            probe(State::new(e.x, f * e.y), mu, &mut tally, "edge x=x*");
            probe(State::new(f * e.x, e.y), mu, &mut tally, "edge y=y*");
        }
    }
    Ok(tally)
}

#[allow(clippy::too_many_arguments)]
fn boundedness(
    params: &[ModelParams],
    timescales: &[TimeScale],
    mutation: Mutation,
    n_starts: usize,
    max_steps: usize,
    horizon: f64,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Tally> {
    let mut jobs = Vec::new();
    for p in params {
        for ts in timescales {
            let t0 = start_time(ts, None)?;
            let b = sampling_box(p);
            for _ in 0..n_starts {
                jobs.push((*p, ts, t0, positive_in_box(rng, b)));
            }
        }
    }
    let opts = SimOptions {
        max_steps,
        dense_horizon: horizon,
        ode: OdeOptions {
            atol: 1e-12,
            rtol: 1e-12,
            ..OdeOptions::default()
        },
    };
    let parts: Vec<Result<Tally>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (p, ts, t0, s0))| {
            let m = Model::new(*p, mutation);
            let mut tally = Tally::new();
            let tr = simulate(&m, ts, *t0, *s0, Some(t0 + horizon), &opts)?;
            for smp in &tr.samples {
                let ex = m.envelope(ts, p.r, p.k_cap, *t0, s0.x, smp.t)?;
                let ey = m.envelope(ts, p.s, p.l_cap, *t0, s0.y, smp.t)?;
                let margin = (ex + tol - smp.state.x).min(ey + tol - smp.state.y);
                tally.record(margin >= 0.0, margin, || {
                    format!(
                        "start #{i} ({:e}, {:e}) at t={}: ({:e}, {:e}) vs envelope ({:e}, {:e})",
                        s0.x, s0.y, smp.t, smp.state.x, smp.state.y, ex, ey
                    )
                });
            }
            Ok(tally)
        })
        .collect();
    Ok(merge_all(parts.into_iter().collect::<Result<_>>()?))
}

#[allow(clippy::too_many_arguments)]
fn logistic(
    r: f64,
    k_cap: f64,
    ts: &TimeScale,
    t0: Option<f64>,
    z0s: &[f64],
    horizon: f64,
    tol: f64,
    mutation: Mutation,
) -> Result<Tally> {
    // any competitor parameters: the second species stays absent
    let p = ModelParams::new(r, 1.0, 1.0, 1.0, k_cap, 1.0)?;
    let m = Model::new(p, mutation);
    let t0 = start_time(ts, t0)?;
    let opts = SimOptions {
        max_steps: usize::MAX,
        dense_horizon: f64::INFINITY,
        ode: OdeOptions::default(),
    };
    let mut tally = Tally::new();
    for &z0 in z0s {
        if z0.is_nan() || z0 < 0.0 {
            return Err(Error::ConfigInvalid(format!(
                "initial value {z0} is negative"
            )));
        }
        let tr = simulate(&m, ts, t0, State::new(z0, 0.0), Some(t0 + horizon), &opts)?;
        for smp in &tr.samples {
            let exact = m.logistic(ts, r, k_cap, t0, z0, smp.t)?;
            let err = (smp.state.x - exact).abs();
            tally.record(err <= tol && smp.state.y == 0.0, tol - err, || {
                format!(
                    "z0={z0} at t={}: simulated {:e}, closed form {:e}",
                    smp.t, smp.state.x, exact
                )
            });
        }
    }
    Ok(tally)
}

/// Largest graininess among the walk's scattered points in `[a, b)`.
fn max_mu_between(items: &[GridItem], a: f64, b: f64) -> f64 {
    let mut m: f64 = 0.0;
    for it in items {
        let (t, mu) = match *it {
            GridItem::Scattered { t, mu } => (t, mu),
            GridItem::Dense { end, exit_mu, .. } => (end, exit_mu),
        };
        if t >= a && t < b {
            m = m.max(mu);
        }
    }
    m
}

#[allow(clippy::too_many_arguments)]
fn exp_identities(
    ts: &TimeScale,
    t0: f64,
    p_set: &[f64],
    n_samples: usize,
    items: usize,
    tol: f64,
    mutation: Mutation,
    rng: &mut ChaCha8Rng,
) -> Result<Tally> {
    let m = Model::new(ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)?, mutation);
    let walk = walk_items(ts, t0, items)?;
    if walk.is_empty() {
        return Err(Error::ConfigInvalid(
            "time scale has no points after t0".into(),
        ));
    }
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut tally = Tally::new();
    for i in 0..n_samples {
        let mut pts = [
            point_in_items(rng, &walk),
            point_in_items(rng, &walk),
            point_in_items(rng, &walk),
        ];
        pts.sort_by(f64::total_cmp);
        let [r, s, t] = pts;
        for &p in p_set {
            // constant rate and a graininess-dependent, positively
            // regressive one
            let q = move |mu: f64| p / (1.0 + mu * p);
            let cases: [(&str, &dyn Fn(f64) -> f64); 2] = [("p", &move |_| p), ("p/(1+mu p)", &q)];
            for (name, rate) in cases {
                let e = |a: f64, b: f64| m.exp_with(ts, rate, a, b);
                let e_ts = e(t, s)?;
                let e_sr = e(s, r)?;
                let e_tr = e(t, r)?;
                let d = rel(e_ts * e_sr, e_tr);
                tally.record(d <= tol, tol - d, || {
                    format!(
                        "#{i} semigroup, rate {name}, p={p}, r={r} s={s} t={t}: rel error {d:e}"
                    )
                });
                let minus = m.exp_circle_minus(ts, rate, t, r)?;
                let d = rel(minus * e_tr, 1.0);
                tally.record(d <= tol, tol - d, || {
                    format!("#{i} circle-minus reciprocal, rate {name}, p={p}, [{r}, {t}]: rel error {d:e}")
                });
                let d = rel(e(r, t)? * e_tr, 1.0);
                tally.record(d <= tol, tol - d, || {
                    format!("#{i} swapped-argument reciprocal, rate {name}, p={p}, [{r}, {t}]: rel error {d:e}")
                });

                // sandwich 1 - ∫p <= e_{-p} <= exp(-∫p) <= exp(∫p),
                // needs 1 - mu p > 0 on [r, t)
                let mu_max = max_mu_between(&walk, r, t);
                if 1.0 - mu_max * rate(mu_max) > 0.0 {
                    let integral = ts.delta_integral(rate, t, r)?;
                    let em = m.exp_with(ts, |mu| -rate(mu), t, r)?;
                    let slack = tol * em.abs().max(1.0);
                    let lower = em - (1.0 - integral);
                    let upper = (-integral).exp() - em;
                    let margin = lower.min(upper);
                    tally.record(margin >= -slack && em <= integral.exp() + slack, margin, || {
                        format!(
                            "#{i} sandwich, rate {name}, p={p}, [{r}, {t}]: 1-I={:e}, e={em:e}, exp(-I)={:e}",
                            1.0 - integral,
                            (-integral).exp()
                        )
                    });
                }
            }
        }
    }
    // defining recursion e(σ(t)) = (1 + μ(t) p) e(t) at scattered points
    for it in &walk {
        let (t, mu) = match *it {
            GridItem::Scattered { t, mu } => (t, mu),
            GridItem::Dense { end, exit_mu, .. } if exit_mu > 0.0 => (end, exit_mu),
            _ => continue,
        };
        let next = ts.sigma(t)?;
        for &p in p_set {
            let lhs = m.exp_with(ts, |_| p, next, t0)?;
            let rhs = (1.0 + mu * p) * m.exp_with(ts, |_| p, t, t0)?;
            let d = rel(lhs, rhs);
            tally.record(d <= tol, tol - d, || {
                format!("recursion at t={t} (mu={mu}), p={p}: rel error {d:e}")
            });
        }
    }
    Ok(tally)
}

#[allow(clippy::too_many_arguments)]
fn degenerate_line(
    m: &Model,
    ts: &TimeScale,
    t0: f64,
    n_samples: usize,
    n_starts: usize,
    budget: &Budget,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Tally> {
    let p = &m.params;
    if p.regime() != Regime::DegenerateLine {
        return Err(Error::RegimeMismatch {
            regime: p.regime(),
            family: "line".to_string(),
        });
    }
    let b = sampling_box(p);
    let mut tally = Tally::new();
    const MUS: [f64; 6] = [0.0, 0.01, 0.5, 1.0, 10.0, 1000.0];
    for i in 0..n_samples {
        let st = State::new(uniform(rng, b[0], b[1]), uniform(rng, b[2], b[3]));
        let mu = MUS[i % MUS.len()];
        let lh = m.eval_operator(mu, st, Nullcline::H).value;
        let lk = m.eval_operator(mu, st, Nullcline::K).value;
        let bound = 1e-12 * lh.abs().max(1.0);
        let d = (lh - lk).abs();
        tally.record(d <= bound, bound - d, || {
            format!(
                "#{i} mu={mu} ({:e}, {:e}): L_h={lh:e}, L_k={lk:e}",
                st.x, st.y
            )
        });
    }
    let starts: Vec<State> = (0..n_starts).map(|_| positive_in_box(rng, b)).collect();
    let opts = sim_options(budget, 1e-10);
    let parts: Vec<Tally> = starts
        .par_iter()
        .enumerate()
        .map(|(i, &s0)| {
            let mut tally = Tally::new();
            let tr = match simulate_until(m, ts, t0, s0, None, &opts, stopper(m, tol * 1e-3, 10)) {
                Ok(tr) => tr,
                Err(e) => {
                    tally.record(false, f64::NEG_INFINITY, || format!("start #{i}: {e}"));
                    return tally;
                }
            };
            let rep = detect_convergence(&tr, &p.equilibria(), tol, 10);
            let on_line = rep.target_state.is_some_and(|f| {
                (f.y - p.nullcline_h(f.x)).abs() < tol && (0.0..=p.k_cap).contains(&f.x)
            });
            tally.record(rep.converged && on_line, tol - rep.final_distance, || {
                format!(
                    "start #{i} ({:e}, {:e}): status {:?}, limit {:?}, distance {:e}",
                    s0.x, s0.y, tr.status, rep.target, rep.final_distance
                )
            });
            let side = |s: &State| {
                let d = s.y - p.nullcline_h(s.x);
                if d.abs() <= 1e-12 * s.y.abs().max(1.0) {
                    0
                } else if d > 0.0 {
                    1
                } else {
                    -1
                }
            };
            let first = side(&s0);
            let crossed = tr.samples.iter().find(|s| {
                let k = side(&s.state);
                k != 0 && first != 0 && k != first
            });
            tally.record(crossed.is_none(), 0.0, || {
                let c = crossed.unwrap();
                format!(
                    "start #{i} ({:e}, {:e}) crossed the line at t={}: ({:e}, {:e})",
                    s0.x, s0.y, c.t, c.state.x, c.state.y
                )
            });
            tally
        })
        .collect();
    tally.merge(merge_all(parts));
    Ok(tally)
}

fn monotone_motion(
    m: &Model,
    ts: &TimeScale,
    t0: f64,
    n_starts: usize,
    budget: &Budget,
    rng: &mut ChaCha8Rng,
) -> Result<Tally> {
    if *ts == TimeScale::Reals {
        return Err(Error::ConfigInvalid(
            "monotone_motion needs a time scale with right-scattered points".into(),
        ));
    }
    let p = &m.params;
    let b = sampling_box(p);
    let starts: Vec<State> = (0..n_starts).map(|_| positive_in_box(rng, b)).collect();
    let opts = sim_options(budget, 1e-9);
    let parts: Vec<Result<Tally>> = starts
        .par_iter()
        .enumerate()
        .map(|(i, &s0)| {
            let mut tally = Tally::new();
            let tr: Trajectory = simulate_until(m, ts, t0, s0, None, &opts, stopper(m, 1e-12, 3))?;
            for w in tr.samples.windows(2) {
                let (a, b) = (w[0], w[1]);
                if a.mode != SampleMode::Recursion {
                    continue;
                }
                let reg = classify_region(p, a.state);
                if matches!(
                    reg.label,
                    RegionLabel::OnNullcline
                        | RegionLabel::OnLine
                        | RegionLabel::Axis
                        | RegionLabel::Outside
                ) || a.state.x < 1e-300
                    || a.state.y < 1e-300
                {
                    continue;
                }
                let fx = (p.nullcline_h(a.state.x) - a.state.y).signum();
                let fy = (p.nullcline_k(a.state.x) - a.state.y).signum();
                let dx = b.state.x - a.state.x;
                let dy = b.state.y - a.state.y;
                // a zero increment is a rounding artefact only when the
                // state has stopped moving
                let ok = dx * fx >= 0.0 && dy * fy >= 0.0;
                tally.record(ok, (dx * fx).min(dy * fy), || {
                    format!(
                        "start #{i}: at t={} in {} ({:e}, {:e}) moved by ({:e}, {:e})",
                        a.t,
                        reg.label.as_str(),
                        a.state.x,
                        a.state.y,
                        dx,
                        dy
                    )
                });
            }
            Ok(tally)
        })
        .collect();
    Ok(merge_all(parts.into_iter().collect::<Result<_>>()?))
}

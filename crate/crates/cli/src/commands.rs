use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use dynphase::ode::OdeOptions;
use dynphase::roots::{classify_region, region_family, root_curve, Nullcline, RegionFamily};
use dynphase::simulate::{
    detect_convergence, settle_detector, simulate as run_sim, simulate_until, ConvergenceReport,
    SimOptions, SimStatus, Trajectory, CONVERGENCE_TOL, CONVERGENCE_WINDOW,
};
use dynphase::verify::{all_pass, render_table, run_suite, Budget, Mutation, SuiteConfig};
use dynphase::{ModelParams, State, TimeScale};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{self, Scenario};
use crate::{Cli, CliError};

/// 17 significant digits, dot decimal; `-0` is written as `0`.
pub fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    v.as_deref()
        .ok_or_else(|| CliError::Config(format!("--{flag} is required")))
}

fn pair(s: State) -> Value {
    json!([s.x, s.y])
}

pub fn classify(cli: &Cli) -> Result<(), CliError> {
    let p = input::params(required(&cli.params, "params")?)?;
    let eqs = p.equilibria();
    let family = match region_family(&p) {
        RegionFamily::Line => None,
        f => Some(f.name()),
    };
    let doc = json!({
        "regime": format!("{:?}", p.regime()),
        "alphaL_minus_1": p.alpha_l_minus_one(),
        "betaK_minus_1": p.beta_k_minus_one(),
        "E0": pair(eqs.e0),
        "EK": pair(eqs.ek),
        "EL": pair(eqs.el),
        "Estar": eqs.estar.map(pair),
        "line": eqs.line,
        "feasibility": {
            "Estar_positive": eqs.estar.is_some_and(|e| e.x > 0.0 && e.y > 0.0),
            "region_family": family,
        },
    });
    write_out(cli.out.as_deref(), &to_json(&doc))
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Scenario JSON: {timescale, params, t0, x0, y0, initial, t_end, budget, tol}.
    pub scenario: Option<PathBuf>,
    /// Initial state `x,y`; repeatable, replaces the scenario's.
    #[arg(long = "start")]
    pub starts: Vec<String>,
    /// Initial time; must lie on the scale. Defaults to its first point.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Stop at the first point of the scale at or beyond this time. Without
    /// it the run stops once the state has settled at an equilibrium.
    #[arg(long)]
    pub t_end: Option<f64>,
}

fn default_t0(ts: &TimeScale) -> f64 {
    match ts {
        TimeScale::Lattice { origin, .. } => *origin,
        other => other.first_point().unwrap_or(0.0),
    }
}

struct Run {
    params: ModelParams,
    ts: TimeScale,
    t0: f64,
    starts: Vec<State>,
    t_end: Option<f64>,
    budget: Budget,
    tol: Option<f64>,
}

fn resolve_run(cli: &Cli, a: &SimulateArgs) -> Result<Run, CliError> {
    let scenario = a.scenario.as_deref().map(Scenario::load).transpose()?;
    let params = match (&cli.params, &scenario) {
        (Some(s), _) => input::params(s)?,
        (None, Some(sc)) => sc.params,
        (None, None) => {
            return Err(CliError::Config(
                "--params or a scenario is required".into(),
            ))
        }
    };
    let ts = match (&cli.timescale, &scenario) {
        (Some(s), _) => input::timescale(s)?,
        (None, Some(sc)) => sc.timescale.clone(),
        (None, None) => {
            return Err(CliError::Config(
                "--timescale or a scenario is required".into(),
            ))
        }
    };
    let starts = if !a.starts.is_empty() {
        a.starts
            .iter()
            .map(|s| input::state(s))
            .collect::<Result<_, _>>()?
    } else {
        match &scenario {
            Some(sc) => sc.starts()?,
            None => return Err(CliError::Config("--start or a scenario is required".into())),
        }
    };
    let t0 =
        a.t0.or(scenario.as_ref().and_then(|s| s.t0))
            .unwrap_or_else(|| default_t0(&ts));
    let mut budget = scenario
        .as_ref()
        .and_then(|s| s.budget)
        .map(|b| b.resolve())
        .unwrap_or_default();
    if let Some(n) = cli.budget {
        budget.max_steps = n;
    }
    Ok(Run {
        params,
        t0,
        starts,
        t_end: a.t_end.or(scenario.as_ref().and_then(|s| s.t_end)),
        budget,
        tol: cli.tol.or(scenario.as_ref().and_then(|s| s.tol)),
        ts,
    })
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("t,x,y,mu,mode,region\n");
    for smp in &traj.samples {
        let region = classify_region(&traj.params, smp.state);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            num(smp.t),
            num(smp.state.x),
            num(smp.state.y),
            num(smp.mu),
            smp.mode.as_str(),
            region.label.as_str()
        );
    }
    s
}

#[derive(Serialize)]
struct RunReport {
    start: [f64; 2],
    status: SimStatus,
    samples: usize,
    recursion_steps: usize,
    dense_time: f64,
    t_final: f64,
    convergence: ConvergenceReport,
}

/// `<stem>_<i>.<ext>` next to `path`.
fn indexed_path(path: &Path, i: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trajectory");
    let name = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{i}.{ext}"),
        None => format!("{stem}_{i}"),
    };
    path.with_file_name(name)
}

pub fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<(), CliError> {
    let run = resolve_run(cli, a)?;
    if run.starts.len() > 1 && cli.out.is_none() {
        return Err(CliError::Config(
            "several initial states need --out (one CSV per start)".into(),
        ));
    }
    let mut ode = OdeOptions::default();
    if let Some(t) = run.tol {
        if t.is_nan() || t <= 0.0 {
            return Err(CliError::Config(format!("tol must be positive, got {t}")));
        }
        ode.atol = t;
        ode.rtol = t;
    }
    let opts = SimOptions {
        max_steps: run.budget.max_steps,
        dense_horizon: run.budget.horizon,
        ode,
    };
    let p = run.params;
    let eqs = p.equilibria();

    let mut reports = Vec::new();
    let mut over_budget = false;
    for (i, &x0) in run.starts.iter().enumerate() {
        let traj = match run.t_end {
            Some(t_end) => run_sim(&p, &run.ts, run.t0, x0, Some(t_end), &opts)?,
            None => {
                let stop = settle_detector(p, eqs, CONVERGENCE_TOL, CONVERGENCE_WINDOW);
                simulate_until(&p, &run.ts, run.t0, x0, None, &opts, stop)?
            }
        };
        let conv = detect_convergence(&traj, &eqs, CONVERGENCE_TOL, CONVERGENCE_WINDOW);
        over_budget |= match run.t_end {
            Some(_) => traj.status == SimStatus::BudgetExceeded,
            None => !conv.converged,
        };
        let csv = trajectory_csv(&traj);
        match (&cli.out, run.starts.len()) {
            (Some(path), 1) => write_out(Some(path), &csv)?,
            (Some(path), _) => write_out(Some(&indexed_path(path, i)), &csv)?,
            (None, _) => write_out(None, &csv)?,
        }
        reports.push(RunReport {
            start: [x0.x, x0.y],
            status: traj.status,
            samples: traj.samples.len(),
            recursion_steps: traj.recursion_steps,
            dense_time: traj.dense_time,
            t_final: traj.last().t,
            convergence: conv,
        });
    }
    let text = to_json(&reports);
    // the report shares stdout only when the CSV went to a file
    if cli.out.is_some() {
        write_out(None, &text)?;
    } else {
        eprint!("{text}");
    }
    if over_budget {
        return Err(CliError::Budget(match run.t_end {
            Some(t) => format!("t_end = {t} not reached within the budget"),
            None => "no convergence within the budget".into(),
        }));
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct PhaseplaneArgs {
    /// Graininess values, comma separated. Defaults to `0`.
    #[arg(long, conflicts_with = "t")]
    pub mu: Option<String>,
    /// Times of the `--timescale`; each contributes its graininess.
    #[arg(long)]
    pub t: Option<String>,
    /// `x_min,x_max`; defaults to `0,max(K, 1/beta)`.
    #[arg(long)]
    pub x_range: Option<String>,
    #[arg(long, default_value_t = 201)]
    pub n_samples: usize,
}

pub fn phaseplane(cli: &Cli, a: &PhaseplaneArgs) -> Result<(), CliError> {
    let p = input::params(required(&cli.params, "params")?)?;
    let (x_lo, x_hi) = match &a.x_range {
        Some(r) => match input::numbers(r)?.as_slice() {
            [lo, hi] if lo < hi && *lo >= 0.0 => (*lo, *hi),
            _ => return Err(CliError::Config(format!("bad --x-range {r:?}"))),
        },
        None => (0.0, p.k_cap.max(1.0 / p.beta)),
    };
    if a.n_samples < 2 {
        return Err(CliError::Config("--n-samples must be at least 2".into()));
    }
    // (t, mu) rows; t is NaN when mu is given directly
    let levels: Vec<(f64, f64)> = match (&a.mu, &a.t) {
        (_, Some(ts_list)) => {
            let ts = input::timescale(required(&cli.timescale, "timescale")?)?;
            input::numbers(ts_list)?
                .into_iter()
                .map(|t| Ok((t, ts.graininess(t)?)))
                .collect::<Result<_, CliError>>()?
        }
        (Some(mu), None) => input::numbers(mu)?
            .into_iter()
            .map(|m| (f64::NAN, m))
            .collect(),
        (None, None) => vec![(f64::NAN, 0.0)],
    };
    if let Some(&(_, m)) = levels.iter().find(|(_, m)| !(m.is_finite() && *m >= 0.0)) {
        return Err(CliError::Config(format!(
            "graininess must be finite and >= 0, got {m}"
        )));
    }
    let n = a.n_samples;
    let grid: Vec<f64> = (0..n)
        .map(|i| x_lo + (x_hi - x_lo) * i as f64 / (n - 1) as f64)
        .collect();

    let mut s = String::from("t,mu,which,x,y\n");
    for which in [Nullcline::H, Nullcline::K] {
        let tag = match which {
            Nullcline::H => "nullcline_h",
            Nullcline::K => "nullcline_k",
        };
        for &x in &grid {
            let y = which.eval(&p, x);
            if y >= 0.0 {
                let _ = writeln!(
                    s,
                    "{},{},{tag},{},{}",
                    num(f64::NAN),
                    num(f64::NAN),
                    num(x),
                    num(y)
                );
            }
        }
    }
    for &(t, mu) in &levels {
        for which in [Nullcline::H, Nullcline::K] {
            let tag = match which {
                Nullcline::H => "root_h",
                Nullcline::K => "root_k",
            };
            for (x, y) in root_curve(&p, mu, which, &grid) {
                let _ = writeln!(s, "{},{},{tag},{},{}", num(t), num(mu), num(x), num(y));
            }
        }
    }
    write_out(cli.out.as_deref(), &s)
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite JSON file.
    pub suite: PathBuf,
    /// Run against a deliberately broken model: flip_a1 | drop_competition |
    /// explicit_euler | overshoot | continuous_exp.
    #[arg(long)]
    pub mutate: Option<String>,
}

pub fn verify(cli: &Cli, a: &VerifyArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.suite)
        .map_err(|e| CliError::Config(format!("{}: {e}", a.suite.display())))?;
    let mut cfg = SuiteConfig::from_json(&text)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(m) = &a.mutate {
        cfg.mutation = Mutation::parse(m)
            .ok_or_else(|| CliError::Config(format!("unknown mutation {m:?}")))?;
    }
    let reports = run_suite(&cfg)?;
    let doc = json!({
        "seed": cfg.seed,
        "mutation": cfg.mutation,
        "all_pass": all_pass(&reports),
        "checks": reports,
    });
    write_out(cli.out.as_deref(), &to_json(&doc))?;
    eprint!("{}", render_table(&reports));
    if all_pass(&reports) {
        Ok(())
    } else {
        Err(CliError::Verify)
    }
}

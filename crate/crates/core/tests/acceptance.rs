//! Acceptance criteria AC1–AC11. Prints one line per criterion and exits
//! non-zero if any of them fails.

use std::process::ExitCode;
use std::time::Instant;

use dynphase::simulate::{
    detect_convergence, settle_detector, simulate_until, SimOptions, SimStatus,
};
use dynphase::verify::{run_check, CheckReport, CheckSpec, Mutation, Verdict};
use dynphase::{ModelParams, Regime, State, TimeScale};
use serde_json::{json, Value};

const SEED: u64 = 0;

fn p(v: [f64; 6]) -> Value {
    json!({"r": v[0], "s": v[1], "alpha": v[2], "beta": v[3], "K": v[4], "L": v[5]})
}

const I: [f64; 6] = [0.5, 0.3, 2.0, 0.3, 1.0, 1.0];
const II: [f64; 6] = [0.3, 0.5, 0.3, 2.0, 1.0, 1.0];
const III: [f64; 6] = [1.0, 1.0, 2.0, 2.0, 1.0, 1.0];
const IV: [f64; 6] = [1.0, 1.0, 0.5, 0.5, 1.0, 1.0];
const DEG: [f64; 6] = [1.0, 1.0, 0.5, 0.25, 4.0, 2.0];

/// `(name, json, t0)` for ℤ, 2^ℕ, the point/interval pattern and ℝ.
fn scales() -> Vec<(&'static str, Value, f64)> {
    vec![
        ("Z", json!({"kind": "lattice", "h": 1, "origin": 0}), 0.0),
        ("2^N", json!({"kind": "quantum", "q": 2, "start": 1}), 1.0),
        (
            "pattern",
            json!({"kind": "pattern", "pattern": [{"point": 1}, {"interval": [2, 3]}], "period": 3, "anchor": 1}),
            1.0,
        ),
        ("R", json!({"kind": "reals"}), 0.0),
    ]
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
    problems: Vec<String>,
}

fn run(id: &str, spec: Value) -> CheckReport {
    let spec: CheckSpec = serde_json::from_value(spec).unwrap_or_else(|e| panic!("{id}: {e}"));
    run_check(id, &spec, SEED, Mutation::None).unwrap_or_else(|e| panic!("{id}: {e}"))
}

/// All reports pass; summarises sample counts and collects diagnostics.
fn all_of(reports: &[CheckReport]) -> Outcome {
    let samples: u64 = reports.iter().map(|r| r.samples).sum();
    let violations: u64 = reports.iter().map(|r| r.violations).sum();
    let problems = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Fail || r.samples == 0)
        .flat_map(|r| {
            let mut v = vec![format!(
                "{}: {} violations of {}",
                r.check_id, r.violations, r.samples
            )];
            v.extend(r.diagnostics.iter().take(3).cloned());
            v
        })
        .collect::<Vec<_>>();
    Outcome {
        ok: problems.is_empty(),
        detail: format!(
            "{} checks, {samples} samples, {violations} violations",
            reports.len()
        ),
        problems,
    }
}

fn ac1() -> Outcome {
    let started = Instant::now();
    let report = run(
        "AC1/exclusion_quantum",
        json!({
            "check": "global_convergence",
            "params": p(I),
            "timescale": {"kind": "quantum", "q": 2, "start": 1},
            "t0": 1,
            "n_starts": 0,
            "starts": [{"x": 2, "y": 1}, {"x": 0.1, "y": 0.1}, {"x": 3, "y": 0.2}],
            "budget": {"max_steps": 10000},
            "tol": 1e-6,
            "max_entry_steps": 5,
            "expect": ["EL"]
        }),
    );
    // the same claims straight from the simulator
    let params = ModelParams::new(I[0], I[1], I[2], I[3], I[4], I[5]).unwrap();
    let ts = TimeScale::quantum(2.0, 1.0).unwrap();
    let opts = SimOptions {
        max_steps: 10_000,
        ..SimOptions::default()
    };
    let mut problems = Vec::new();
    for s0 in [
        State::new(2.0, 1.0),
        State::new(0.1, 0.1),
        State::new(3.0, 0.2),
    ] {
        let stop = settle_detector(params, params.equilibria(), 1e-9, 10);
        let tr = simulate_until(&params, &ts, 1.0, s0, None, &opts, stop).unwrap();
        let rep = detect_convergence(&tr, &params.equilibria(), 1e-6, 10);
        let ok = tr.status == SimStatus::Stopped
            && rep.target.as_deref() == Some("EL")
            && rep.final_distance < 1e-6
            && rep.steps_to_invariant_region.is_some_and(|n| n <= 5);
        if !ok {
            problems.push(format!("start {s0:?}: {rep:?}"));
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let mut out = all_of(&[report]);
    out.problems.extend(problems);
    if elapsed >= 1.0 {
        out.problems.push(format!("took {elapsed:.3} s"));
    }
    out.ok = out.problems.is_empty();
    out.detail = format!("{}; {:.1} ms", out.detail, elapsed * 1e3);
    out
}

fn ac2() -> Outcome {
    let cases = [
        (I, Regime::ExclusionYWins),
        (II, Regime::ExclusionXWins),
        (III, Regime::Bistable),
        (IV, Regime::Coexistence),
        (DEG, Regime::DegenerateLine),
    ];
    let mut problems = Vec::new();
    for (v, want) in cases {
        let params = ModelParams::new(v[0], v[1], v[2], v[3], v[4], v[5]).unwrap();
        let (al, bk) = (v[2] * v[5] - 1.0, v[3] * v[4] - 1.0);
        let hand = if al > 0.0 && bk < 0.0 {
            Regime::ExclusionYWins
        } else if al < 0.0 && bk > 0.0 {
            Regime::ExclusionXWins
        } else if al > 0.0 && bk > 0.0 {
            Regime::Bistable
        } else if al < 0.0 && bk < 0.0 {
            Regime::Coexistence
        } else if al == 0.0 && bk == 0.0 {
            Regime::DegenerateLine
        } else {
            Regime::MixedBoundary
        };
        if params.regime() != want || hand != want {
            problems.push(format!(
                "{v:?}: got {:?}, hand {hand:?}, want {want:?}",
                params.regime()
            ));
        }
    }
    Outcome {
        ok: problems.is_empty(),
        detail: "5 of 5 canonical sets".into(),
        problems,
    }
}

fn ac3() -> Outcome {
    let started = Instant::now();
    let reports: Vec<_> = [
        ("I", I),
        ("II", II),
        ("III", III),
        ("IV", IV),
        ("degenerate", DEG),
    ]
    .into_iter()
    .map(|(n, v)| {
        run(
            &format!("AC3/{n}"),
            json!({"check": "sign_lemmas", "params": p(v), "n_samples": 10000,
                       "mu_set": [0, 0.01, 0.5, 1, 10, 1000]}),
        )
    })
    .collect();
    let elapsed = started.elapsed().as_secs_f64();
    let mut out = all_of(&reports);
    if elapsed >= 30.0 {
        out.problems.push(format!("took {elapsed:.1} s"));
        out.ok = false;
    }
    out.detail = format!("{}; {:.1} s", out.detail, elapsed);
    out
}

fn ac4() -> Outcome {
    let reports: Vec<_> = [
        ("I", I),
        ("II", II),
        ("III", III),
        ("IV", IV),
        ("degenerate", DEG),
    ]
    .into_iter()
    .map(|(n, v)| {
        run(
            &format!("AC4/{n}"),
            json!({"check": "two_formula", "params": p(v), "n_samples": 10000, "tol": 1e-10}),
        )
    })
    .collect();
    all_of(&reports)
}

fn ac5() -> Outcome {
    let s = scales();
    let reports: Vec<_> = [(&s[0], 1e-9), (&s[1], 1e-9), (&s[2], 1e-6), (&s[3], 1e-6)]
        .into_iter()
        .map(|((name, ts, t0), tol)| {
            run(
                &format!("AC5/{name}"),
                json!({"check": "logistic_closed_form", "r": 0.5, "K": 1, "timescale": ts, "t0": t0,
                       "horizon": 50, "tol": tol}),
            )
        })
        .collect();
    all_of(&reports)
}

fn ac6() -> Outcome {
    let s = scales();
    let report = run(
        "AC6",
        json!({"check": "boundedness", "params": [p(I), p(II), p(III), p(IV), p(DEG)],
               "timescales": [s[0].1, s[1].1, s[2].1], "n_starts": 100, "tol": 1e-9}),
    );
    all_of(&[report])
}

fn ac7() -> Outcome {
    let reports: Vec<_> = [("III", III), ("IV", IV)]
        .into_iter()
        .map(|(n, v)| {
            run(
                &format!("AC7/{n}"),
                json!({"check": "box_exclusion", "params": p(v), "n_samples": 10000, "mu_set": [0.1, 1, 10]}),
            )
        })
        .collect();
    all_of(&reports)
}

fn ac8() -> Outcome {
    let mut reports = Vec::new();
    for (sname, ts, t0) in scales() {
        for (pn, v, region) in [
            ("I", I, "Omega2"),
            ("III", III, "R2T"),
            ("III", III, "R5T"),
            ("IV", IV, "S2T"),
            ("IV", IV, "S5T"),
        ] {
            reports.push(run(
                &format!("AC8/{region}/{pn}/{sname}"),
                json!({"check": "invariance", "params": p(v), "timescale": ts, "t0": t0,
                       "region": region, "n_starts": 1000, "boundary_fraction": 0.25}),
            ));
        }
    }
    all_of(&reports)
}

fn ac9() -> Outcome {
    let reports: Vec<_> = scales()
        .into_iter()
        .map(|(sname, ts, t0)| {
            run(
                &format!("AC9/{sname}"),
                json!({"check": "degenerate_line", "params": p(DEG), "timescale": ts, "t0": t0,
                       "n_samples": 10000, "n_starts": 1000, "tol": 1e-6}),
            )
        })
        .collect();
    all_of(&reports)
}

fn ac10() -> Outcome {
    let reports: Vec<_> = scales()
        .into_iter()
        .map(|(sname, ts, t0)| {
            run(
                &format!("AC10/{sname}"),
                json!({"check": "global_convergence", "params": p(III), "timescale": ts, "t0": t0,
                       "n_starts": 1000, "expect": ["EK", "EL", "Estar"]}),
            )
        })
        .collect();
    all_of(&reports)
}

fn ac11() -> Outcome {
    let reports: Vec<_> = scales()
        .into_iter()
        .map(|(sname, ts, t0)| {
            run(
                &format!("AC11/{sname}"),
                json!({"check": "exp_identities", "timescale": ts, "t0": t0, "tol": 1e-12}),
            )
        })
        .collect();
    all_of(&reports)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "AC1",
            "2^N scenario: entry within 5 steps, limit EL, < 1 s",
            ac1,
        ),
        ("AC2", "regime table", ac2),
        (
            "AC3",
            "sign claims, 1e4 samples x 6 graininesses, < 30 s",
            ac3,
        ),
        ("AC4", "direct vs rational root-operators, 1e-10", ac4),
        (
            "AC5",
            "closed-form logistic, 1e-9 discrete / 1e-6 dense",
            ac5,
        ),
        ("AC6", "boundedness envelope, 1e-9", ac6),
        ("AC7", "box exclusion, regimes III and IV", ac7),
        ("AC8", "invariant regions, 1e3 trajectories each", ac8),
        ("AC9", "degenerate line of equilibria", ac9),
        ("AC10", "bistable regime never converges to E0", ac10),
        ("AC11", "exponential identities on four scales", ac11),
    ];
    let mut failed = 0;
    for (id, what, f) in criteria {
        let out = f();
        println!(
            "{id:<5} {}  {what} ({})",
            if out.ok { "pass" } else { "FAIL" },
            out.detail
        );
        for p in &out.problems {
            println!("        {p}");
        }
        if !out.ok {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all 11 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}

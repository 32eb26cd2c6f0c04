//! Root-operators and root-sets of the nontrivial nullclines.
//!
//! For a nullcline `y = l(x)` the root-operator at graininess `mu` is
//! `y^σ - l(x^σ)`: its sign says on which side of the nullcline the next
//! state lands. Both operators are rational in `mu` with a positive
//! denominator, and their numerators are quadratics in `mu` whose
//! coefficients (`a_i` for `h`, `b_i` for `k`) are polynomials in `(x, y)`.

mod lemmas;
mod regions;

pub use lemmas::{sign_lemma_table, ClaimRegion, Sign, SignClaim, XBound, YBound};
pub use regions::{
    classify_region, region_family, InvariantRegion, Region, RegionFamily, RegionLabel,
    ON_NULLCLINE_TOL,
};

use serde::{Deserialize, Serialize};

use crate::model::{ModelParams, State};

/// Which nontrivial nullcline an operator or curve refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nullcline {
    /// `y = h(x)`, the x-nullcline.
    H,
    /// `y = k(x)`, the y-nullcline.
    K,
}

impl Nullcline {
    pub fn eval(self, p: &ModelParams, x: f64) -> f64 {
        match self {
            Nullcline::H => p.nullcline_h(x),
            Nullcline::K => p.nullcline_k(x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Nullcline::H => "h",
            Nullcline::K => "k",
        }
    }
}

/// Root-operator value together with its rational decomposition:
/// `value == numerator / denominator`, `numerator == c2 mu^2 + c1 mu + c0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootOperatorEval {
    pub value: f64,
    pub numerator: f64,
    pub coeffs: [f64; 3],
    pub denominator: f64,
}

impl RootOperatorEval {
    pub fn rational_value(&self) -> f64 {
        self.numerator / self.denominator
    }
}

/// `(K + r mu x + alpha r mu K y)(L + beta s mu L x + s mu y)`
fn shared_denominator(p: &ModelParams, mu: f64, st: State) -> f64 {
    let (x, y) = (st.x, st.y);
    (p.k_cap + p.r * mu * x + p.alpha * p.r * mu * p.k_cap * y)
        * (p.l_cap + p.beta * p.s * mu * p.l_cap * x + p.s * mu * y)
}

/// `[a0, a1, a2]` at `(x, y)`.
pub fn coeffs_a(p: &ModelParams, st: State) -> [f64; 3] {
    let (x, y) = (st.x, st.y);
    let ModelParams {
        r,
        s,
        alpha,
        beta,
        k_cap: kk,
        l_cap: ll,
    } = *p;
    let a0 = ll * (x - kk + alpha * y * kk);
    let a1 = beta * s * ll * x * (x - kk)
        + y * (s * (x - kk) + alpha * ll * (r * (x - kk) + s * kk))
        + r * alpha * alpha * y * y * kk * ll;
    let a2 = alpha * r * s * y * (y * kk * (alpha * ll - 1.0) + x * ll * (1.0 - beta * kk));
    [a0, a1, a2]
}

/// `[b0, b1, b2]` at `(x, y)`.
pub fn coeffs_b(p: &ModelParams, st: State) -> [f64; 3] {
    let (x, y) = (st.x, st.y);
    let ModelParams {
        r,
        s,
        alpha,
        beta,
        k_cap: kk,
        l_cap: ll,
    } = *p;
    let kx = p.nullcline_k(x);
    let b0 = kk * ll * (y - kx);
    let b1 = ll
        * (s * x * beta * kk * (y - kx)
            + r * x * ll * (beta * kk - 1.0)
            + alpha * r * y * kk * (y - ll)
            + r * x * y);
    let b2 = r * s * beta * ll * x * (ll * x * (beta * kk - 1.0) + kk * y * (1.0 - alpha * ll));
    [b0, b1, b2]
}

fn quad(c: [f64; 3], mu: f64) -> f64 {
    (c[2] * mu + c[1]) * mu + c[0]
}

/// Evaluates `L_h` (or `L_k`) at `st`. `value` is computed directly as
/// `y^σ - l(x^σ)` through the step map; `numerator`/`denominator` come
/// from the coefficient polynomials.
pub fn eval_root_operator(
    p: &ModelParams,
    mu: f64,
    st: State,
    which: Nullcline,
) -> RootOperatorEval {
    let img = p.step_map(mu, st);
    let value = img.y - which.eval(p, img.x);
    let d = shared_denominator(p, mu, st);
    let (coeffs, denominator) = match which {
        Nullcline::H => (coeffs_a(p, st), p.alpha * d),
        Nullcline::K => (coeffs_b(p, st), d),
    };
    RootOperatorEval {
        value,
        numerator: quad(coeffs, mu),
        coeffs,
        denominator,
    }
}

pub fn eval_lh(p: &ModelParams, mu: f64, st: State) -> RootOperatorEval {
    eval_root_operator(p, mu, st, Nullcline::H)
}

pub fn eval_lk(p: &ModelParams, mu: f64, st: State) -> RootOperatorEval {
    eval_root_operator(p, mu, st, Nullcline::K)
}

/// The operator numerator at fixed `x` and `mu`, written as a quadratic in
/// `y`: returns `[e0, e1, e2]` with `N(y) = e2 y^2 + e1 y + e0`.
pub(crate) fn numerator_in_y(p: &ModelParams, mu: f64, x: f64, which: Nullcline) -> [f64; 3] {
    let ModelParams {
        r,
        s,
        alpha,
        beta,
        k_cap: kk,
        l_cap: ll,
    } = *p;
    let mu2 = mu * mu;
    match which {
        Nullcline::H => {
            let e2 =
                mu * r * alpha * alpha * kk * ll + mu2 * alpha * r * s * kk * (alpha * ll - 1.0);
            let e1 = alpha * kk * ll
                + mu * (s * (x - kk) + alpha * ll * (r * (x - kk) + s * kk))
                + mu2 * alpha * r * s * x * ll * (1.0 - beta * kk);
            let e0 = ll * (x - kk) + mu * beta * s * ll * x * (x - kk);
            [e0, e1, e2]
        }
        Nullcline::K => {
            let kx = p.nullcline_k(x);
            let e2 = mu * ll * alpha * r * kk;
            let e1 = kk * ll
                + mu * ll * (s * x * beta * kk - alpha * r * kk * ll + r * x)
                + mu2 * r * s * beta * ll * x * kk * (1.0 - alpha * ll);
            let e0 = -kk * ll * kx
                + mu * ll * (-s * x * beta * kk * kx + r * x * ll * (beta * kk - 1.0))
                + mu2 * r * s * beta * ll * ll * x * x * (beta * kk - 1.0);
            [e0, e1, e2]
        }
    }
}

/// Real roots of `c2 y^2 + c1 y + c0`, ascending. Falls back to the linear
/// solve when the leading coefficient is negligible.
pub fn solve_quadratic(c: [f64; 3]) -> Vec<f64> {
    let [c0, c1, c2] = c;
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if c2.abs() <= 1e-14 * scale {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // avoid cancellation between -c1 and sq
    let q = -0.5 * (c1 + c1.signum() * sq);
    let mut roots = if q == 0.0 {
        vec![0.0]
    } else if disc == 0.0 {
        vec![q / c2]
    } else {
        vec![q / c2, c0 / q]
    };
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

/// Points `(x, y)`, `y >= 0`, of the root-set of `which` at graininess `mu`
/// above each `x` of the grid. Samples with no nonnegative root are
/// dropped.
pub fn root_curve(p: &ModelParams, mu: f64, which: Nullcline, x_grid: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &x in x_grid {
        if x < 0.0 {
            continue;
        }
        for y in solve_quadratic(numerator_in_y(p, mu, x, which)) {
            // one Newton polish on the full operator numerator
            let y = polish(p, mu, x, y, which);
            if y >= 0.0 {
                out.push((x, y));
            }
        }
    }
    out
}

fn polish(p: &ModelParams, mu: f64, x: f64, y: f64, which: Nullcline) -> f64 {
    let [e0, e1, e2] = numerator_in_y(p, mu, x, which);
    let f = (e2 * y + e1) * y + e0;
    let df = 2.0 * e2 * y + e1;
    if df != 0.0 && df.is_finite() {
        let y1 = y - f / df;
        if y1.is_finite() {
            return y1;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exclusion_params() -> ModelParams {
        ModelParams::new(0.5, 0.3, 2.0, 0.3, 1.0, 1.0).unwrap()
    }

    fn coex() -> ModelParams {
        ModelParams::new(1.0, 1.0, 0.5, 0.5, 1.0, 1.0).unwrap()
    }

    fn degenerate() -> ModelParams {
        ModelParams::new(0.8, 1.3, 0.5, 0.25, 4.0, 2.0).unwrap()
    }

    #[test]
    fn right_dense_operators_are_offsets() {
        let p = exclusion_params();
        let st = State::new(0.37, 0.81);
        assert_eq!(eval_lh(&p, 0.0, st).value, 0.81 - p.nullcline_h(0.37));
        assert_eq!(eval_lk(&p, 0.0, st).value, 0.81 - p.nullcline_k(0.37));
    }

    #[test]
    fn boundary_of_omega2_on_h_is_pushed_up() {
        let p = exclusion_params();
        for x in [0.05, 0.3, 0.6, 0.95] {
            let st = State::new(x, p.nullcline_h(x));
            assert!(eval_lh(&p, 1.0, st).value > 0.0);
        }
    }

    #[test]
    fn interior_equilibrium_is_a_root_of_both() {
        let p = coex();
        let e = State::new(2.0 / 3.0, 2.0 / 3.0);
        for mu in [0.0, 0.5, 3.0, 100.0] {
            assert!(eval_lh(&p, mu, e).value.abs() < 1e-15);
            assert!(eval_lk(&p, mu, e).value.abs() < 1e-15);
        }
    }

    #[test]
    fn a0_b0_vanish_on_their_nullclines() {
        let p = ModelParams::new(0.7, 1.1, 2.0, 0.5, 1.0, 1.0).unwrap();
        let x = 0.5;
        assert_eq!(coeffs_a(&p, State::new(x, p.nullcline_h(x)))[0], 0.0);
        assert_eq!(coeffs_b(&p, State::new(x, p.nullcline_k(x)))[0], 0.0);
    }

    #[test]
    fn degenerate_leading_coefficients_vanish() {
        let p = degenerate();
        for (x, y) in [(0.3, 0.2), (1.7, 3.0), (5.0, 0.1)] {
            let st = State::new(x, y);
            assert!(coeffs_a(&p, st)[2].abs() < 1e-15);
            assert!(coeffs_b(&p, st)[2].abs() < 1e-15);
        }
    }

    #[test]
    fn numerator_in_y_matches_coefficients() {
        let p = ModelParams::new(0.7, 1.1, 2.0, 0.5, 1.3, 0.9).unwrap();
        for which in [Nullcline::H, Nullcline::K] {
            for &mu in &[0.0, 0.4, 2.0] {
                for &(x, y) in &[(0.2, 0.3), (1.5, 0.7), (0.9, 2.2)] {
                    let e = numerator_in_y(&p, mu, x, which);
                    let by_y = (e[2] * y + e[1]) * y + e[0];
                    let direct = eval_root_operator(&p, mu, State::new(x, y), which).numerator;
                    assert!((by_y - direct).abs() <= 1e-12 * direct.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn quadratic_solver_cases() {
        assert_eq!(solve_quadratic([-4.0, 0.0, 1.0]), vec![-2.0, 2.0]);
        assert_eq!(solve_quadratic([1.0, 0.0, 1.0]), Vec::<f64>::new());
        assert_eq!(solve_quadratic([-3.0, 1.5, 0.0]), vec![2.0]);
        assert_eq!(solve_quadratic([1.0, -2.0, 1.0]), vec![1.0]);
        // tiny root without cancellation
        let r = solve_quadratic([1e-10, 1.0, 1.0]);
        // exact: -1e-10 - 1e-20 - 2e-30 ...
        assert!((r[1] + 1e-10 + 1e-20).abs() < 1e-25);
        assert!(solve_quadratic([0.0, 0.0, 0.0]).is_empty());
    }

    #[test]
    fn root_curve_at_zero_graininess_is_nullcline() {
        let p = exclusion_params();
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.2).collect();
        for which in [Nullcline::H, Nullcline::K] {
            let curve = root_curve(&p, 0.0, which, &grid);
            assert!(!curve.is_empty());
            for (x, y) in curve {
                assert!((y - which.eval(&p, x)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn root_curve_points_are_roots() {
        let p = exclusion_params();
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
        for mu in [0.5, 1.0, 8.0, 64.0] {
            for which in [Nullcline::H, Nullcline::K] {
                for (x, y) in root_curve(&p, mu, which, &grid) {
                    let v = eval_root_operator(&p, mu, State::new(x, y), which).value;
                    assert!(v.abs() <= 1e-9, "mu={mu} {which:?} ({x},{y}) -> {v}");
                }
            }
        }
    }

    #[test]
    fn degenerate_root_curves_are_the_line() {
        let p = degenerate();
        let grid: Vec<f64> = (0..=16).map(|i| i as f64 * 0.25).collect();
        for mu in [0.0, 0.7, 5.0] {
            for which in [Nullcline::H, Nullcline::K] {
                let curve = root_curve(&p, mu, which, &grid);
                assert_eq!(curve.len(), grid.len());
                for (x, y) in curve {
                    assert!((y - (1.0 - p.beta * x) / p.alpha).abs() < 1e-12);
                }
            }
        }
    }
}

//! The two-species competition model on a time scale.
//!
//! One step across a right-scattered point with graininess `mu` is
//!
//! ```text
//! x' = x (1 + r mu) / (1 + r mu (x/K + alpha y))
//! y' = y (1 + s mu) / (1 + s mu (y/L + beta x))
//! ```
//!
//! and on dense stretches the system reduces to the classical
//! Lotka–Volterra competition ODE.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timescale::TimeScale;

/// Tolerance on `alpha L - 1` and `beta K - 1` when deciding regimes.
pub const REGIME_TOL: f64 = 1e-12;

/// Above this graininess the step map divides through by `mu`.
const LARGE_MU: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    pub r: f64,
    pub s: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "K")]
    pub k_cap: f64,
    #[serde(rename = "L")]
    pub l_cap: f64,
}

#[derive(Deserialize)]
struct RawParams {
    r: f64,
    s: f64,
    alpha: f64,
    beta: f64,
    #[serde(rename = "K")]
    k_cap: f64,
    #[serde(rename = "L")]
    l_cap: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(p: RawParams) -> Result<Self> {
        ModelParams::new(p.r, p.s, p.alpha, p.beta, p.k_cap, p.l_cap)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        State { x, y }
    }

    pub fn dist_inf(&self, other: &State) -> f64 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.x >= 0.0 && self.y >= 0.0
    }
}

/// Parameter regime, decided by the signs of `alpha L - 1` and `beta K - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `alpha L > 1`, `beta K < 1`: y excludes x.
    ExclusionYWins,
    /// `alpha L < 1`, `beta K > 1`: x excludes y.
    ExclusionXWins,
    /// both above one: interior saddle.
    Bistable,
    /// both below one: stable interior equilibrium.
    Coexistence,
    /// both equal to one: a segment of equilibria.
    DegenerateLine,
    /// exactly one of them equal to one.
    MixedBoundary,
}

impl Regime {
    pub fn has_interior_equilibrium(self) -> bool {
        matches!(self, Regime::Bistable | Regime::Coexistence)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquilibriumSet {
    pub e0: State,
    pub ek: State,
    pub el: State,
    pub estar: Option<State>,
    /// Every point of `y = h(x)`, `0 <= x <= K`, is an equilibrium.
    pub line: bool,
}

impl ModelParams {
    pub fn new(r: f64, s: f64, alpha: f64, beta: f64, k_cap: f64, l_cap: f64) -> Result<Self> {
        let p = ModelParams {
            r,
            s,
            alpha,
            beta,
            k_cap,
            l_cap,
        };
        for (name, v) in [
            ("r", r),
            ("s", s),
            ("alpha", alpha),
            ("beta", beta),
            ("K", k_cap),
            ("L", l_cap),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(p)
    }

    /// `alpha L - 1`
    pub fn alpha_l_minus_one(&self) -> f64 {
        self.alpha * self.l_cap - 1.0
    }

    /// `beta K - 1`
    pub fn beta_k_minus_one(&self) -> f64 {
        self.beta * self.k_cap - 1.0
    }

    pub fn regime(&self) -> Regime {
        let a = self.alpha_l_minus_one();
        let b = self.beta_k_minus_one();
        let a_zero = a.abs() <= REGIME_TOL;
        let b_zero = b.abs() <= REGIME_TOL;
        match (a_zero, b_zero) {
            (true, true) => Regime::DegenerateLine,
            (true, false) | (false, true) => Regime::MixedBoundary,
            _ => match (a > 0.0, b > 0.0) {
                (true, false) => Regime::ExclusionYWins,
                (false, true) => Regime::ExclusionXWins,
                (true, true) => Regime::Bistable,
                (false, false) => Regime::Coexistence,
            },
        }
    }

    /// Nontrivial x-nullcline `h(x) = (1 - x/K) / alpha`.
    pub fn nullcline_h(&self, x: f64) -> f64 {
        (1.0 - x / self.k_cap) / self.alpha
    }

    /// Nontrivial y-nullcline `k(x) = L (1 - beta x)`.
    pub fn nullcline_k(&self, x: f64) -> f64 {
        self.l_cap * (1.0 - self.beta * x)
    }

    pub fn equilibria(&self) -> EquilibriumSet {
        let regime = self.regime();
        let estar = if regime.has_interior_equilibrium() {
            let d = self.alpha * self.beta * self.k_cap * self.l_cap - 1.0;
            Some(State::new(
                self.k_cap * self.alpha_l_minus_one() / d,
                self.l_cap * self.beta_k_minus_one() / d,
            ))
        } else {
            None
        };
        EquilibriumSet {
            e0: State::new(0.0, 0.0),
            ek: State::new(self.k_cap, 0.0),
            el: State::new(0.0, self.l_cap),
            estar,
            line: regime == Regime::DegenerateLine,
        }
    }

    /// Image of `st` under one step of graininess `mu`.
    ///
    /// Evaluated in the positive rational form, so the image is
    /// nonnegative for nonnegative input and equals the input at `mu = 0`.
    pub fn step_map(&self, mu: f64, st: State) -> State {
        if mu == 0.0 {
            return st;
        }
        let (x, y) = (st.x, st.y);
        let px = x / self.k_cap + self.alpha * y;
        let py = y / self.l_cap + self.beta * x;
        if mu > LARGE_MU {
            let inv = 1.0 / mu;
            State::new(
                x * (inv + self.r) / (inv + self.r * px),
                y * (inv + self.s) / (inv + self.s * py),
            )
        } else {
            State::new(
                x * (1.0 + self.r * mu) / (1.0 + self.r * mu * px),
                y * (1.0 + self.s * mu) / (1.0 + self.s * mu * py),
            )
        }
    }

    /// Delta derivative `(x^Δ, y^Δ)` at graininess `mu`.
    pub fn vector_field(&self, mu: f64, st: State) -> (f64, f64) {
        let (x, y) = (st.x, st.y);
        let px = x / self.k_cap + self.alpha * y;
        let py = y / self.l_cap + self.beta * x;
        (
            self.r * x * (1.0 - px) / (1.0 + self.r * mu * px),
            self.s * y * (1.0 - py) / (1.0 + self.s * mu * py),
        )
    }

    /// Parameters with the roles of the two species exchanged.
    pub fn swapped(&self) -> ModelParams {
        ModelParams {
            r: self.s,
            s: self.r,
            alpha: self.beta,
            beta: self.alpha,
            k_cap: self.l_cap,
            l_cap: self.k_cap,
        }
    }
}

/// Closed-form solution of the single-species model
/// `z^Δ = -(⊖r) z^σ (1 - z/K)` started from `z0` at `t0`.
pub fn logistic_closed_form(
    r: f64,
    k_cap: f64,
    ts: &TimeScale,
    t0: f64,
    z0: f64,
    t: f64,
) -> Result<f64> {
    if z0 == 0.0 {
        ts.exp(r, t, t0)?;
        return Ok(0.0);
    }
    let e = ts.exp(r, t, t0)?;
    Ok(e * k_cap * z0 / (k_cap + z0 * (e - 1.0)))
}

/// Upper envelope for the x-component of any solution started at `x0`:
/// `K x0 / (x0 (1 - e_{⊖r}) + K e_{⊖r})`. The exponential of `⊖r` is
/// evaluated directly, not as the reciprocal of `e_r`.
pub fn boundedness_envelope(
    r: f64,
    k_cap: f64,
    ts: &TimeScale,
    t0: f64,
    x0: f64,
    t: f64,
) -> Result<f64> {
    let e = ts.exp_circle_minus(|_| r, t, t0)?;
    Ok(k_cap * x0 / (x0 * (1.0 - e) + k_cap * e))
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

    #[test]
    fn rejects_nonpositive_params() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 1.0, 1.0, f64::NAN, 1.0).is_err());
        let bad = r#"{"r":0.5,"s":0.3,"alpha":2,"beta":0.3,"K":-1,"L":1}"#;
        assert!(serde_json::from_str::<ModelParams>(bad).is_err());
    }

    #[test]
    fn params_json() {
        let p: ModelParams =
            serde_json::from_str(r#"{"r":0.5,"s":0.3,"alpha":2,"beta":0.3,"K":1,"L":1}"#).unwrap();
        assert_eq!(p, exclusion_params());
        let back = serde_json::to_string(&p).unwrap();
        assert!(back.contains("\"K\":1.0"));
    }

    #[test]
    fn step_map_example() {
        // x' = 2 * 1.5 / (1 + 0.5 * (2 + 2)) = 1
        // y' = 1 * 1.3 / (1 + 0.3 * (1 + 0.6)) = 1.3 / 1.48
        let img = exclusion_params().step_map(1.0, State::new(2.0, 1.0));
        assert!((img.x - 1.0).abs() < 1e-15);
        assert!((img.y - 1.3 / 1.48).abs() < 1e-15);
    }

    #[test]
    fn vector_field_example() {
        let (dx, dy) = exclusion_params().vector_field(1.0, State::new(2.0, 1.0));
        assert!((dx + 1.0).abs() < 1e-15);
        assert!((dy - (1.3 / 1.48 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn vector_field_on_h_nullcline() {
        let p = exclusion_params();
        for x in [0.1, 0.5, 0.9] {
            let (dx, dy) = p.vector_field(0.0, State::new(x, p.nullcline_h(x)));
            assert!(dx.abs() < 1e-15);
            assert!(dy > 0.0);
        }
        assert_eq!(p.vector_field(0.0, State::new(1.0, 0.0)), (0.0, 0.0));
    }

    #[test]
    fn nullcline_endpoints() {
        let p = exclusion_params();
        assert_eq!(p.nullcline_h(0.0), 0.5);
        assert_eq!(p.nullcline_h(1.0), 0.0);
        assert_eq!(p.nullcline_k(0.0), 1.0);
        assert!(p.nullcline_k(1.0 / 0.3).abs() < 1e-15);
        let c = coex();
        let x = 2.0 / 3.0;
        assert!((c.nullcline_h(x) - c.nullcline_k(x)).abs() < 1e-15);
    }

    #[test]
    fn equilibria_examples() {
        assert!(exclusion_params().equilibria().estar.is_none());
        let e = coex().equilibria().estar.unwrap();
        assert!((e.x - 2.0 / 3.0).abs() < 1e-15 && (e.y - 2.0 / 3.0).abs() < 1e-15);
        for mu in [0.0, 1.0, 7.0] {
            let img = coex().step_map(mu, e);
            assert!(img.dist_inf(&e) < 1e-15);
        }
        let deg = ModelParams::new(1.0, 1.0, 0.5, 0.25, 4.0, 2.0).unwrap();
        let eq = deg.equilibria();
        assert!(eq.line);
        assert!(eq.estar.is_none());
    }

    #[test]
    fn regime_examples() {
        assert_eq!(exclusion_params().regime(), Regime::ExclusionYWins);
        assert_eq!(coex().regime(), Regime::Coexistence);
        let deg = ModelParams::new(1.0, 2.0, 1.0 / 3.0, 1.0 / 7.0, 7.0, 3.0).unwrap();
        assert_eq!(deg.regime(), Regime::DegenerateLine);
        let mixed = ModelParams::new(1.0, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(mixed.regime(), Regime::MixedBoundary);
        assert_eq!(
            exclusion_params().swapped().regime(),
            Regime::ExclusionXWins
        );
        let bi = ModelParams::new(1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap();
        assert_eq!(bi.regime(), Regime::Bistable);
    }

    #[test]
    fn equilibria_are_fixed_points() {
        for p in [
            exclusion_params(),
            coex(),
            ModelParams::new(1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap(),
        ] {
            let eq = p.equilibria();
            let mut pts = vec![eq.e0, eq.ek, eq.el];
            pts.extend(eq.estar);
            for e in pts {
                for mu in [0.0, 0.5, 1.0, 10.0] {
                    let img = p.step_map(mu, e);
                    assert!(img.dist_inf(&e) <= 1e-12 * e.x.max(e.y).max(1.0));
                }
            }
        }
    }

    #[test]
    fn large_mu_uses_divided_form() {
        let p = exclusion_params();
        let st = State::new(0.4, 0.7);
        let a = p.step_map(1e8, st);
        let b = p.step_map(1e8 * (1.0 + 1e-15), st);
        assert!(a.dist_inf(&b) < 1e-12);
        let lim = p.step_map(1e300, st);
        let px = 0.4 + 2.0 * 0.7;
        assert!((lim.x - 0.4 / px).abs() < 1e-12);
    }

    #[test]
    fn logistic_examples() {
        let z = TimeScale::integers();
        assert_eq!(
            logistic_closed_form(0.5, 1.0, &z, 0.0, 0.0, 5.0).unwrap(),
            0.0
        );
        assert!((logistic_closed_form(0.5, 1.0, &z, 0.0, 1.0, 5.0).unwrap() - 1.0).abs() < 1e-15);
        let v = logistic_closed_form(0.5, 1.0, &z, 0.0, 0.1, 3.0).unwrap();
        let expect = 3.375 * 0.1 / (1.0 + 0.1 * 2.375);
        assert!((v - expect).abs() < 1e-15);
        // same value by iterating the single-species step
        let p = ModelParams::new(0.5, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let mut s = State::new(0.1, 0.0);
        for _ in 0..3 {
            s = p.step_map(1.0, s);
        }
        assert!((s.x - expect).abs() < 1e-15);
    }

    #[test]
    fn envelope_examples() {
        let z = TimeScale::integers();
        assert_eq!(
            boundedness_envelope(0.5, 1.0, &z, 0.0, 2.0, 0.0).unwrap(),
            2.0
        );
        let v = boundedness_envelope(0.5, 1.0, &z, 0.0, 2.0, 1.0).unwrap();
        let e = 1.0 / 1.5;
        assert!((v - 2.0 / (2.0 * (1.0 - e) + e)).abs() < 1e-15);
        let far = boundedness_envelope(0.5, 1.0, &z, 0.0, 0.3, 200.0).unwrap();
        assert!((far - 1.0).abs() < 1e-12);
        let mut prev = 0.3;
        for t in 1..30 {
            let v = boundedness_envelope(0.5, 1.0, &z, 0.0, 0.3, t as f64).unwrap();
            assert!(v > prev && v < 1.0);
            prev = v;
        }
    }
}

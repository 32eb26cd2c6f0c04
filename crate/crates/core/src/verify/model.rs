use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{ModelParams, State};
use crate::roots::{coeffs_a, coeffs_b, eval_root_operator, Nullcline, RootOperatorEval};
use crate::simulate::Dynamics;
use crate::timescale::TimeScale;

/// Deliberate defects used to show that each check can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    #[default]
    None,
    /// Negates `a1` in the numerator of `L_h`.
    FlipA1,
    /// Drops the interspecific terms (`alpha = beta = 0`) from the dynamics.
    DropCompetition,
    /// Replaces the step map by the explicit Euler step `s + mu f(s)`.
    ExplicitEuler,
    /// Triples every step-map increment.
    Overshoot,
    /// Evaluates the time-scale exponential as if the scale were the reals.
    ContinuousExp,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::None,
        Mutation::FlipA1,
        Mutation::DropCompetition,
        Mutation::ExplicitEuler,
        Mutation::Overshoot,
        Mutation::ContinuousExp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::FlipA1 => "flip_a1",
            Mutation::DropCompetition => "drop_competition",
            Mutation::ExplicitEuler => "explicit_euler",
            Mutation::Overshoot => "overshoot",
            Mutation::ContinuousExp => "continuous_exp",
        }
    }

    pub fn parse(s: &str) -> Option<Mutation> {
        Mutation::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Model parameters plus an optional defect. Checks call the model only
/// through this type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Model {
    pub params: ModelParams,
    pub mutation: Mutation,
    dyn_params: ModelParams,
}

impl Model {
    pub fn new(params: ModelParams, mutation: Mutation) -> Self {
        let mut dyn_params = params;
        if mutation == Mutation::DropCompetition {
            dyn_params.alpha = 0.0;
            dyn_params.beta = 0.0;
        }
        Model {
            params,
            mutation,
            dyn_params,
        }
    }

    pub fn eval_operator(&self, mu: f64, st: State, which: Nullcline) -> RootOperatorEval {
        let mut ev = eval_root_operator(&self.params, mu, st, which);
        // the direct value always follows the (possibly mutated) dynamics
        let img = if mu == 0.0 { st } else { self.step(mu, st) };
        ev.value = img.y - which.eval(&self.params, img.x);
        if self.mutation == Mutation::FlipA1 && which == Nullcline::H {
            ev.coeffs[1] = -ev.coeffs[1];
            ev.numerator = (ev.coeffs[2] * mu + ev.coeffs[1]) * mu + ev.coeffs[0];
        }
        ev
    }

    pub fn coeffs(&self, st: State, which: Nullcline) -> [f64; 3] {
        match which {
            Nullcline::H => {
                let mut c = coeffs_a(&self.params, st);
                if self.mutation == Mutation::FlipA1 {
                    c[1] = -c[1];
                }
                c
            }
            Nullcline::K => coeffs_b(&self.params, st),
        }
    }

    pub fn exp_with<F: Fn(f64) -> f64>(
        &self,
        ts: &TimeScale,
        rate: F,
        t: f64,
        t0: f64,
    ) -> Result<f64> {
        if self.mutation == Mutation::ContinuousExp {
            return Ok((rate(0.0) * (t - t0)).exp());
        }
        ts.exp_with(rate, t, t0)
    }

    pub fn exp_circle_minus<F: Fn(f64) -> f64>(
        &self,
        ts: &TimeScale,
        rate: F,
        t: f64,
        t0: f64,
    ) -> Result<f64> {
        if self.mutation == Mutation::ContinuousExp {
            return Ok((-rate(0.0) * (t - t0)).exp());
        }
        ts.exp_circle_minus(rate, t, t0)
    }

    /// Closed-form single-species solution, through [`Model::exp_with`].
    pub fn logistic(
        &self,
        ts: &TimeScale,
        r: f64,
        k_cap: f64,
        t0: f64,
        z0: f64,
        t: f64,
    ) -> Result<f64> {
        let e = self.exp_with(ts, |_| r, t, t0)?;
        Ok(e * k_cap * z0 / (k_cap + z0 * (e - 1.0)))
    }

    /// Upper envelope `K x0 / (x0 (1 - e) + K e)` with `e = e_{⊖r}(t, t0)`.
    pub fn envelope(
        &self,
        ts: &TimeScale,
        r: f64,
        k_cap: f64,
        t0: f64,
        x0: f64,
        t: f64,
    ) -> Result<f64> {
        let e = self.exp_circle_minus(ts, |_| r, t, t0)?;
        Ok(k_cap * x0 / (x0 * (1.0 - e) + k_cap * e))
    }
}

impl Dynamics for Model {
    fn params(&self) -> &ModelParams {
        &self.params
    }

    fn step(&self, mu: f64, st: State) -> State {
        let p = &self.dyn_params;
        match self.mutation {
            Mutation::ExplicitEuler => {
                let (gx, gy) = p.per_capita(st);
                State::new(st.x + mu * st.x * gx, st.y + mu * st.y * gy)
            }
            Mutation::Overshoot => {
                let n = p.step_map(mu, st);
                State::new(st.x + 3.0 * (n.x - st.x), st.y + 3.0 * (n.y - st.y))
            }
            _ => p.step_map(mu, st),
        }
    }

    fn per_capita(&self, st: State) -> (f64, f64) {
        self.dyn_params.per_capita(st)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::boundedness_envelope;
    use crate::model::logistic_closed_form;

    #[test]
    fn unmutated_model_is_transparent() {
        let p = ModelParams::new(0.5, 0.3, 2.0, 0.3, 1.0, 1.0).unwrap();
        let m = Model::new(p, Mutation::None);
        let st = State::new(0.4, 0.7);
        assert_eq!(m.step(1.5, st), p.step_map(1.5, st));
        assert_eq!(
            m.eval_operator(1.5, st, Nullcline::H),
            eval_root_operator(&p, 1.5, st, Nullcline::H)
        );
        let ts = TimeScale::point_interval_alternating();
        assert_eq!(
            m.logistic(&ts, 0.5, 1.0, 1.0, 0.1, 5.5).unwrap(),
            logistic_closed_form(0.5, 1.0, &ts, 1.0, 0.1, 5.5).unwrap()
        );
        assert_eq!(
            m.envelope(&ts, 0.5, 1.0, 1.0, 0.1, 5.5).unwrap(),
            boundedness_envelope(0.5, 1.0, &ts, 1.0, 0.1, 5.5).unwrap()
        );
    }

    #[test]
    fn mutation_names_round_trip() {
        for m in Mutation::ALL {
            assert_eq!(Mutation::parse(m.name()), Some(m));
            let js = serde_json::to_string(&m).unwrap();
            assert_eq!(js, format!("\"{}\"", m.name()));
        }
    }
}

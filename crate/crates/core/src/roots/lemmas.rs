//! Table of sign claims for the root-operators, one list per regime.

use serde::Serialize;

use super::regions::h_below_k;
use super::{eval_root_operator, Nullcline, RootOperatorEval};
use crate::model::{ModelParams, Regime, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Sign::Positive => v > 0.0,
            Sign::Negative => v < 0.0,
        }
    }

    /// Signed distance from violation: positive when the claim holds.
    pub fn margin(self, v: f64) -> f64 {
        match self {
            Sign::Positive => v,
            Sign::Negative => -v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum XBound {
    Zero,
    XStar,
    KCap,
    InvBeta,
    Inf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum YBound {
    Zero,
    H,
    K,
    /// `max(0, h(x))`
    PosH,
    /// `max(0, k(x))`
    PosK,
    YStar,
    Inf,
}

/// Box-like region `x_lo < x < x_hi`, `y_lo(x) < y < y_hi(x)`, with
/// per-side closedness and an optional hole at the interior equilibrium.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClaimRegion {
    pub x_lo: (XBound, bool),
    pub x_hi: (XBound, bool),
    pub y_lo: (YBound, bool),
    pub y_hi: (YBound, bool),
    pub exclude_estar: bool,
}

const OPEN: bool = false;
const CLOSED: bool = true;

impl ClaimRegion {
    fn xv(p: &ModelParams, b: XBound) -> f64 {
        match b {
            XBound::Zero => 0.0,
            XBound::XStar => p.equilibria().estar.map_or(f64::NAN, |e| e.x),
            XBound::KCap => p.k_cap,
            XBound::InvBeta => 1.0 / p.beta,
            XBound::Inf => f64::INFINITY,
        }
    }

    fn yv(p: &ModelParams, b: YBound, x: f64) -> f64 {
        match b {
            YBound::Zero => 0.0,
            YBound::H => p.nullcline_h(x),
            YBound::K => p.nullcline_k(x),
            YBound::PosH => p.nullcline_h(x).max(0.0),
            YBound::PosK => p.nullcline_k(x).max(0.0),
            YBound::YStar => p.equilibria().estar.map_or(f64::NAN, |e| e.y),
            YBound::Inf => f64::INFINITY,
        }
    }

    fn above(v: f64, lo: f64, closed: bool, margin: f64) -> bool {
        if closed {
            v >= lo
        } else {
            v > lo + margin
        }
    }

    /// Membership, with open sides shrunk by `margin`.
    pub fn contains_with_margin(&self, p: &ModelParams, st: State, margin: f64) -> bool {
        let (x, y) = (st.x, st.y);
        let x_lo = Self::xv(p, self.x_lo.0);
        let x_hi = Self::xv(p, self.x_hi.0);
        if !Self::above(x, x_lo, self.x_lo.1, margin)
            || !Self::above(-x, -x_hi, self.x_hi.1, margin)
        {
            return false;
        }
        let y_lo = Self::yv(p, self.y_lo.0, x);
        let y_hi = Self::yv(p, self.y_hi.0, x);
        if !Self::above(y, y_lo, self.y_lo.1, margin)
            || !Self::above(-y, -y_hi, self.y_hi.1, margin)
        {
            return false;
        }
        if self.exclude_estar {
            if let Some(e) = p.equilibria().estar {
                if st.dist_inf(&e) <= margin {
                    return false;
                }
            }
        }
        true
    }

    pub fn contains(&self, p: &ModelParams, st: State) -> bool {
        self.contains_with_margin(p, st, 0.0)
    }

    /// Bounding box `[x0, x1] x [y0, y1]`, with infinite sides clipped to
    /// `[0, 2 max(K, 1/beta)] x [0, 2 max(L, 1/alpha)]`.
    pub fn bbox(&self, p: &ModelParams) -> [f64; 4] {
        let x_cap = 2.0 * p.k_cap.max(1.0 / p.beta);
        let y_cap = 2.0 * p.l_cap.max(1.0 / p.alpha);
        let x0 = Self::xv(p, self.x_lo.0).max(0.0);
        let x1 = Self::xv(p, self.x_hi.0).min(x_cap);
        let y_range = |b: YBound| -> f64 {
            match b {
                YBound::Zero => 0.0,
                YBound::YStar => Self::yv(p, b, 0.0),
                YBound::Inf => y_cap,
                // nullclines are monotone: extremes at the x-ends
                _ => Self::yv(p, b, x0).max(Self::yv(p, b, x1)).max(0.0),
            }
        };
        let y_min = |b: YBound| -> f64 {
            match b {
                YBound::Zero | YBound::Inf => 0.0,
                YBound::YStar => Self::yv(p, b, 0.0),
                _ => Self::yv(p, b, x0).min(Self::yv(p, b, x1)).max(0.0),
            }
        };
        let y0 = y_min(self.y_lo.0);
        let y1 = y_range(self.y_hi.0).min(y_cap);
        [x0, x1, y0, y1]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignClaim {
    pub id: &'static str,
    pub regime: Regime,
    pub operator: Nullcline,
    pub sign: Sign,
    pub region: ClaimRegion,
}

impl SignClaim {
    pub fn evaluate(&self, p: &ModelParams, mu: f64, st: State) -> RootOperatorEval {
        eval_root_operator(p, mu, st, self.operator)
    }
}

fn claim(
    id: &'static str,
    regime: Regime,
    operator: Nullcline,
    sign: Sign,
    x: ((XBound, bool), (XBound, bool)),
    y: ((YBound, bool), (YBound, bool)),
    exclude_estar: bool,
) -> SignClaim {
    SignClaim {
        id,
        regime,
        operator,
        sign,
        region: ClaimRegion {
            x_lo: x.0,
            x_hi: x.1,
            y_lo: y.0,
            y_hi: y.1,
            exclude_estar,
        },
    }
}

/// Sign claims for the regime of `p`. A mixed boundary regime gets the
/// claims of the exclusion regime with the same nullcline ordering.
pub fn sign_lemma_table(p: &ModelParams) -> Vec<SignClaim> {
    use Nullcline::{H, K};
    use Sign::{Negative as Neg, Positive as Pos};
    use XBound as X;
    use YBound as Y;
    let regime = p.regime();
    let x_pos = ((X::Zero, OPEN), (X::Inf, OPEN));
    match regime {
        Regime::ExclusionYWins | Regime::ExclusionXWins | Regime::MixedBoundary => {
            if h_below_k(p) {
                vec![
                    claim(
                        "I.a",
                        regime,
                        H,
                        Pos,
                        x_pos,
                        ((Y::PosH, OPEN), (Y::Inf, OPEN)),
                        false,
                    ),
                    claim(
                        "I.b",
                        regime,
                        K,
                        Neg,
                        x_pos,
                        ((Y::Zero, OPEN), (Y::K, OPEN)),
                        false,
                    ),
                ]
            } else {
                vec![
                    claim(
                        "II.a",
                        regime,
                        K,
                        Pos,
                        x_pos,
                        ((Y::PosK, OPEN), (Y::Inf, OPEN)),
                        false,
                    ),
                    claim(
                        "II.b",
                        regime,
                        H,
                        Neg,
                        x_pos,
                        ((Y::Zero, OPEN), (Y::H, OPEN)),
                        false,
                    ),
                ]
            }
        }
        Regime::Bistable => vec![
            claim(
                "III.a",
                regime,
                H,
                Pos,
                ((X::Zero, OPEN), (X::XStar, CLOSED)),
                ((Y::H, OPEN), (Y::Inf, OPEN)),
                false,
            ),
            claim(
                "III.b",
                regime,
                H,
                Neg,
                ((X::XStar, CLOSED), (X::KCap, OPEN)),
                ((Y::Zero, OPEN), (Y::H, OPEN)),
                false,
            ),
            claim(
                "III.c",
                regime,
                K,
                Neg,
                ((X::Zero, OPEN), (X::XStar, OPEN)),
                ((Y::YStar, CLOSED), (Y::K, OPEN)),
                false,
            ),
            claim(
                "III.d",
                regime,
                K,
                Pos,
                ((X::XStar, CLOSED), (X::KCap, OPEN)),
                ((Y::PosK, OPEN), (Y::YStar, CLOSED)),
                true,
            ),
        ],
        Regime::Coexistence => vec![
            claim(
                "IV.a",
                regime,
                H,
                Neg,
                ((X::Zero, OPEN), (X::XStar, CLOSED)),
                ((Y::YStar, CLOSED), (Y::H, OPEN)),
                true,
            ),
            claim(
                "IV.b",
                regime,
                H,
                Pos,
                ((X::XStar, CLOSED), (X::Inf, OPEN)),
                ((Y::PosH, OPEN), (Y::YStar, CLOSED)),
                true,
            ),
            claim(
                "IV.c",
                regime,
                K,
                Pos,
                ((X::Zero, OPEN), (X::XStar, CLOSED)),
                ((Y::K, OPEN), (Y::Inf, OPEN)),
                false,
            ),
            claim(
                "IV.d",
                regime,
                K,
                Neg,
                ((X::XStar, CLOSED), (X::InvBeta, OPEN)),
                ((Y::Zero, OPEN), (Y::K, OPEN)),
                false,
            ),
        ],
        Regime::DegenerateLine => vec![
            claim(
                "D.a",
                regime,
                H,
                Pos,
                x_pos,
                ((Y::PosH, OPEN), (Y::Inf, OPEN)),
                false,
            ),
            claim(
                "D.b",
                regime,
                H,
                Neg,
                x_pos,
                ((Y::Zero, OPEN), (Y::H, OPEN)),
                false,
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_have_expected_ids() {
        let ids =
            |p: ModelParams| -> Vec<&str> { sign_lemma_table(&p).iter().map(|c| c.id).collect() };
        let ex = ModelParams::new(0.5, 0.3, 2.0, 0.3, 1.0, 1.0).unwrap();
        assert_eq!(ids(ex), ["I.a", "I.b"]);
        assert_eq!(ids(ex.swapped()), ["II.a", "II.b"]);
        assert_eq!(
            ids(ModelParams::new(1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap()),
            ["III.a", "III.b", "III.c", "III.d"]
        );
        assert_eq!(
            ids(ModelParams::new(1.0, 1.0, 0.5, 0.5, 1.0, 1.0).unwrap()),
            ["IV.a", "IV.b", "IV.c", "IV.d"]
        );
    }

    #[test]
    fn claim_region_membership() {
        let p = ModelParams::new(1.0, 1.0, 2.0, 2.0, 1.0, 1.0).unwrap();
        let t = sign_lemma_table(&p);
        // III.a: 0 < x <= 1/3, y > h
        assert!(t[0].region.contains(&p, State::new(0.2, 0.5)));
        assert!(!t[0].region.contains(&p, State::new(0.2, 0.3)));
        assert!(!t[0].region.contains(&p, State::new(0.4, 0.5)));
        // III.d excludes E*
        let e = State::new(1.0 / 3.0, 1.0 / 3.0);
        assert!(!t[3].region.contains_with_margin(&p, e, 1e-8));
    }

    #[test]
    fn bbox_is_clipped() {
        let p = ModelParams::new(0.5, 0.3, 2.0, 0.3, 1.0, 1.0).unwrap();
        let t = sign_lemma_table(&p);
        let b = t[0].region.bbox(&p);
        assert_eq!(b[0], 0.0);
        assert!((b[1] - 2.0 / 0.3).abs() < 1e-12);
        assert_eq!(b[3], 2.0);
    }
}

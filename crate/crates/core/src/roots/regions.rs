//! Partition of the closed positive quadrant cut out by the nullclines,
//! the lines `x = x*`, `y = y*`, and the coordinate axes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Regime, State};

/// Distance (in y) under which a point counts as lying on a nullcline.
pub const ON_NULLCLINE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionFamily {
    /// Exclusion regimes: `Omega1..Omega3`.
    Omega,
    /// Bistable regime: `R1..R6`, `B0`, `B1`.
    R,
    /// Coexistence regime: `S1..S6`, `B0`, `B1`.
    S,
    /// Degenerate line: above, below, on.
    Line,
}

impl RegionFamily {
    pub fn name(self) -> &'static str {
        match self {
            RegionFamily::Omega => "omega",
            RegionFamily::R => "R",
            RegionFamily::S => "S",
            RegionFamily::Line => "line",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    Omega1,
    Omega2,
    Omega3,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    B0,
    B1,
    Above,
    Below,
    OnLine,
    /// On `y = h(x)` and/or `y = k(x)` (see the flags of [`Region`]).
    OnNullcline,
    /// On a coordinate axis, off the nullclines.
    Axis,
    /// Some coordinate is negative.
    Outside,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        use RegionLabel::*;
        match self {
            Omega1 => "Omega1",
            Omega2 => "Omega2",
            Omega3 => "Omega3",
            R1 => "R1",
            R2 => "R2",
            R3 => "R3",
            R4 => "R4",
            R5 => "R5",
            R6 => "R6",
            S1 => "S1",
            S2 => "S2",
            S3 => "S3",
            S4 => "S4",
            S5 => "S5",
            S6 => "S6",
            B0 => "B0",
            B1 => "B1",
            Above => "above",
            Below => "below",
            OnLine => "on_line",
            OnNullcline => "on_nullcline",
            Axis => "axis",
            Outside => "outside",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Region {
    pub family: RegionFamily,
    pub label: RegionLabel,
    pub on_h: bool,
    pub on_k: bool,
}

/// Region family used for a parameter set. A mixed boundary regime is
/// treated as the exclusion regime whose nullcline ordering it shares.
pub fn region_family(p: &ModelParams) -> RegionFamily {
    match p.regime() {
        Regime::ExclusionYWins | Regime::ExclusionXWins | Regime::MixedBoundary => {
            RegionFamily::Omega
        }
        Regime::Bistable => RegionFamily::R,
        Regime::Coexistence => RegionFamily::S,
        Regime::DegenerateLine => RegionFamily::Line,
    }
}

/// `true` when `h <= k` on the positive x-axis range (y is the winner).
pub(crate) fn h_below_k(p: &ModelParams) -> bool {
    match p.regime() {
        Regime::ExclusionYWins => true,
        Regime::ExclusionXWins => false,
        _ => {
            let m = 0.5 * p.k_cap.min(1.0 / p.beta);
            p.nullcline_h(m) <= p.nullcline_k(m)
        }
    }
}

fn pos(v: f64) -> f64 {
    v.max(0.0)
}

pub fn classify_region(p: &ModelParams, st: State) -> Region {
    let family = region_family(p);
    let (x, y) = (st.x, st.y);
    let h = p.nullcline_h(x);
    let k = p.nullcline_k(x);
    let mk = |label, on_h, on_k| Region {
        family,
        label,
        on_h,
        on_k,
    };
    if !(x >= 0.0 && y >= 0.0) {
        return mk(RegionLabel::Outside, false, false);
    }
    let on_h = (y - h).abs() <= ON_NULLCLINE_TOL;
    let on_k = (y - k).abs() <= ON_NULLCLINE_TOL;
    if family == RegionFamily::Line {
        let label = if on_h || on_k {
            RegionLabel::OnLine
        } else if y > h {
            RegionLabel::Above
        } else {
            RegionLabel::Below
        };
        return mk(label, on_h, on_k);
    }
    if on_h || on_k {
        return mk(RegionLabel::OnNullcline, on_h, on_k);
    }
    if x == 0.0 || y == 0.0 {
        return mk(RegionLabel::Axis, false, false);
    }
    let label = match family {
        RegionFamily::Omega => {
            let (lo, hi) = if h_below_k(p) { (h, k) } else { (k, h) };
            if y < lo {
                RegionLabel::Omega1
            } else if y <= pos(hi) {
                RegionLabel::Omega2
            } else {
                RegionLabel::Omega3
            }
        }
        RegionFamily::R | RegionFamily::S => {
            let e = p.equilibria().estar.expect("interior equilibrium");
            if x <= e.x && y <= e.y {
                RegionLabel::B0
            } else if x >= e.x && y >= e.y {
                RegionLabel::B1
            } else if family == RegionFamily::R {
                classify_r(p, x, y, h, k, e)
            } else {
                classify_s(p, x, y, h, k, e)
            }
        }
        RegionFamily::Line => unreachable!(),
    };
    mk(label, false, false)
}

// Off the nullclines, the axes and B0/B1: exactly one of the open
// labels applies.
fn classify_r(p: &ModelParams, x: f64, y: f64, h: f64, k: f64, e: State) -> RegionLabel {
    if x < e.x {
        if y < h {
            RegionLabel::R1
        } else if y < k {
            RegionLabel::R2
        } else {
            RegionLabel::R3
        }
    } else if y < k {
        RegionLabel::R4
    } else if y < h && x < p.k_cap {
        RegionLabel::R5
    } else {
        RegionLabel::R6
    }
}

fn classify_s(p: &ModelParams, x: f64, y: f64, h: f64, k: f64, e: State) -> RegionLabel {
    if x < e.x {
        if y < k {
            RegionLabel::S1
        } else if y < h {
            RegionLabel::S2
        } else {
            RegionLabel::S3
        }
    } else if y < h {
        RegionLabel::S4
    } else if y < k && x < 1.0 / p.beta {
        RegionLabel::S5
    } else {
        RegionLabel::S6
    }
}

/// Closed regions that the dynamics cannot leave.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvariantRegion {
    /// The band between the nullclines in an exclusion regime.
    Omega2,
    R2T,
    R5T,
    S2T,
    S5T,
}

impl InvariantRegion {
    pub fn family(self) -> RegionFamily {
        match self {
            InvariantRegion::Omega2 => RegionFamily::Omega,
            InvariantRegion::R2T | InvariantRegion::R5T => RegionFamily::R,
            InvariantRegion::S2T | InvariantRegion::S5T => RegionFamily::S,
        }
    }

    pub fn for_family(family: RegionFamily) -> &'static [InvariantRegion] {
        match family {
            RegionFamily::Omega => &[InvariantRegion::Omega2],
            RegionFamily::R => &[InvariantRegion::R2T, InvariantRegion::R5T],
            RegionFamily::S => &[InvariantRegion::S2T, InvariantRegion::S5T],
            RegionFamily::Line => &[],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InvariantRegion::Omega2 => "Omega2",
            InvariantRegion::R2T => "R2T",
            InvariantRegion::R5T => "R5T",
            InvariantRegion::S2T => "S2T",
            InvariantRegion::S5T => "S5T",
        }
    }

    /// Membership in the closed region, with slack [`ON_NULLCLINE_TOL`].
    pub fn contains(self, p: &ModelParams, st: State) -> Result<bool> {
        self.contains_with_tol(p, st, ON_NULLCLINE_TOL)
    }

    pub fn contains_with_tol(self, p: &ModelParams, st: State, tol: f64) -> Result<bool> {
        Ok(self.margin(p, st)? >= -tol)
    }

    /// Smallest slack over the constraints defining the closed region:
    /// nonnegative inside, minus the largest violation outside.
    pub fn margin(self, p: &ModelParams, st: State) -> Result<f64> {
        let family = region_family(p);
        if family != self.family() {
            return Err(Error::RegimeMismatch {
                regime: p.regime(),
                family: self.family().name().to_string(),
            });
        }
        let (x, y) = (st.x, st.y);
        let h = p.nullcline_h(x);
        let k = p.nullcline_k(x);
        let between = |lo: f64, hi: f64| (y - pos(lo)).min(pos(hi) - y);
        let m = match self {
            InvariantRegion::Omega2 => {
                if h_below_k(p) {
                    between(h, k)
                } else {
                    between(k, h)
                }
            }
            _ => {
                let e = p.equilibria().estar.expect("interior equilibrium");
                match self {
                    InvariantRegion::R2T => (e.x - x).min(between(h, k)),
                    InvariantRegion::R5T => (x - e.x).min(p.k_cap - x).min(between(k, h)),
                    InvariantRegion::S2T => (e.x - x).min(between(k, h)),
                    InvariantRegion::S5T => (x - e.x).min(1.0 / p.beta - x).min(between(h, k)),
                    InvariantRegion::Omega2 => unreachable!(),
                }
            }
        };
        Ok(m.min(x).min(y))
    }
}

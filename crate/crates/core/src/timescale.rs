//! Time scales described by finite generators.
//!
//! A [`TimeScale`] is never stored as a point set. Each variant knows how to
//! answer membership, forward jump and graininess queries, and how to walk
//! forward from a starting point as a sequence of right-scattered points and
//! dense stretches ([`GridItem`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute membership tolerance at unit scale. Queries far from the origin
/// use `MEMBERSHIP_TOL * |t|` instead, since grid arithmetic loses absolute
/// precision as `t` grows.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Membership slack at `t`, relative for large `|t|`.
pub fn tol_at(t: f64) -> f64 {
    MEMBERSHIP_TOL * t.abs().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    RightDense,
    RightScattered,
}

/// One element of a repeating pattern, in absolute coordinates of the first
/// period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternItem {
    Point(f64),
    Interval([f64; 2]),
}

impl PatternItem {
    fn start(&self) -> f64 {
        match *self {
            PatternItem::Point(p) => p,
            PatternItem::Interval([a, _]) => a,
        }
    }

    fn end(&self) -> f64 {
        match *self {
            PatternItem::Point(p) => p,
            PatternItem::Interval([_, b]) => b,
        }
    }
}

/// Union of `pattern + k * period` over `k >= 0`. All items must lie in
/// `[anchor, anchor + period)`, be sorted and pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern")]
pub struct PatternUnion {
    pattern: Vec<PatternItem>,
    period: f64,
    anchor: f64,
}

#[derive(Deserialize)]
struct RawPattern {
    pattern: Vec<PatternItem>,
    period: f64,
    anchor: f64,
}

impl TryFrom<RawPattern> for PatternUnion {
    type Error = Error;

    fn try_from(raw: RawPattern) -> Result<Self> {
        PatternUnion::new(raw.pattern, raw.period, raw.anchor)
    }
}

impl PatternUnion {
    pub fn new(pattern: Vec<PatternItem>, period: f64, anchor: f64) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidTimeScale(msg.to_string()));
        if !(period.is_finite() && period > 0.0) {
            return bad("pattern period must be finite and positive");
        }
        if !anchor.is_finite() {
            return bad("pattern anchor must be finite");
        }
        if pattern.is_empty() {
            return bad("pattern must contain at least one item");
        }
        let mut prev_end = f64::NEG_INFINITY;
        for item in &pattern {
            let (a, b) = (item.start(), item.end());
            if !(a.is_finite() && b.is_finite()) {
                return bad("pattern items must be finite");
            }
            if let PatternItem::Interval(_) = item {
                if b <= a {
                    return bad("pattern intervals must have positive length");
                }
            }
            if a < anchor {
                return bad("pattern items must not precede the anchor");
            }
            if b >= anchor + period {
                return bad("pattern items must end before anchor + period");
            }
            if a <= prev_end {
                return bad("pattern items must be sorted and disjoint");
            }
            prev_end = b;
        }
        Ok(PatternUnion {
            pattern,
            period,
            anchor,
        })
    }

    pub fn items(&self) -> &[PatternItem] {
        &self.pattern
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    fn item_start(&self, cycle: i64, idx: usize) -> f64 {
        self.pattern[idx].start() + cycle as f64 * self.period
    }

    fn item_end(&self, cycle: i64, idx: usize) -> f64 {
        self.pattern[idx].end() + cycle as f64 * self.period
    }

    fn next_index(&self, cycle: i64, idx: usize) -> (i64, usize) {
        if idx + 1 < self.pattern.len() {
            (cycle, idx + 1)
        } else {
            (cycle + 1, 0)
        }
    }

    /// Locates `t`: returns (cycle, item index).
    fn locate(&self, t: f64) -> Option<(i64, usize)> {
        let tol = tol_at(t);
        if t < self.anchor - tol {
            return None;
        }
        let raw = ((t - self.anchor) / self.period).floor() as i64;
        // Check the neighbouring cycles too; rounding at cycle boundaries can
        // put t on either side.
        for cycle in [raw, raw - 1, raw + 1] {
            if cycle < 0 {
                continue;
            }
            for idx in 0..self.pattern.len() {
                let a = self.item_start(cycle, idx);
                let b = self.item_end(cycle, idx);
                if t >= a - tol && t <= b + tol {
                    return Some((cycle, idx));
                }
            }
        }
        None
    }
}

/// A time scale: a closed subset of the reals, unbounded above.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawTimeScale")]
pub enum TimeScale {
    Reals,
    /// `origin + h * Z`
    Lattice {
        h: f64,
        origin: f64,
    },
    /// `{ start * q^n : n >= 0 }`
    Quantum {
        q: f64,
        start: f64,
    },
    #[serde(rename = "pattern")]
    Pattern(PatternUnion),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawTimeScale {
    Reals,
    Lattice { h: f64, origin: f64 },
    Quantum { q: f64, start: f64 },
    Pattern(PatternUnion),
}

impl TryFrom<RawTimeScale> for TimeScale {
    type Error = Error;

    fn try_from(raw: RawTimeScale) -> Result<Self> {
        match raw {
            RawTimeScale::Reals => Ok(TimeScale::Reals),
            RawTimeScale::Lattice { h, origin } => TimeScale::lattice(h, origin),
            RawTimeScale::Quantum { q, start } => TimeScale::quantum(q, start),
            RawTimeScale::Pattern(p) => Ok(TimeScale::Pattern(p)),
        }
    }
}

/// One step of a forward walk over a time scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum GridItem {
    /// A right-scattered point `t` with graininess `mu > 0`.
    Scattered { t: f64, mu: f64 },
    /// A dense stretch `[start, end]`. Unless the stretch was cut short by a
    /// horizon, `end` is right-scattered and jumps forward by `exit_mu`.
    /// `end` is infinite for the real line.
    Dense { start: f64, end: f64, exit_mu: f64 },
}

impl GridItem {
    pub fn start(&self) -> f64 {
        match *self {
            GridItem::Scattered { t, .. } => t,
            GridItem::Dense { start, .. } => start,
        }
    }
}

/// Budget for [`TimeScale::grid`]. At least one field must be set.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GridBudget {
    pub horizon: Option<f64>,
    pub max_points: Option<usize>,
}

impl TimeScale {
    pub fn lattice(h: f64, origin: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0 && origin.is_finite()) {
            return Err(Error::InvalidTimeScale(
                "lattice needs finite h > 0 and finite origin".into(),
            ));
        }
        Ok(TimeScale::Lattice { h, origin })
    }

    pub fn quantum(q: f64, start: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0 && start.is_finite() && start > 0.0) {
            return Err(Error::InvalidTimeScale(
                "quantum scale needs finite q > 1 and start > 0".into(),
            ));
        }
        Ok(TimeScale::Quantum { q, start })
    }

    pub fn pattern(items: Vec<PatternItem>, period: f64, anchor: f64) -> Result<Self> {
        PatternUnion::new(items, period, anchor).map(TimeScale::Pattern)
    }

    /// The integers.
    pub fn integers() -> Self {
        TimeScale::Lattice {
            h: 1.0,
            origin: 0.0,
        }
    }

    /// `{1} ∪ [2,3] ∪ {4} ∪ [5,6] ∪ ...`
    pub fn point_interval_alternating() -> Self {
        TimeScale::Pattern(PatternUnion {
            pattern: vec![PatternItem::Point(1.0), PatternItem::Interval([2.0, 3.0])],
            period: 3.0,
            anchor: 1.0,
        })
    }

    /// Smallest element, if the scale is bounded below.
    pub fn first_point(&self) -> Option<f64> {
        match self {
            TimeScale::Reals | TimeScale::Lattice { .. } => None,
            TimeScale::Quantum { start, .. } => Some(*start),
            TimeScale::Pattern(p) => Some(p.pattern[0].start()),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.canonical(t).is_ok()
    }

    /// Snaps `t` onto the exact generator value it matches.
    fn canonical(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::PointNotInScale { t });
        }
        match self {
            TimeScale::Reals => Ok(t),
            TimeScale::Lattice { h, origin } => {
                let n = ((t - origin) / h).round();
                let c = origin + n * h;
                if (c - t).abs() <= tol_at(t) {
                    Ok(c)
                } else {
                    Err(Error::PointNotInScale { t })
                }
            }
            TimeScale::Quantum { q, start } => {
                if t <= 0.0 {
                    return Err(Error::PointNotInScale { t });
                }
                let n = ((t / start).ln() / q.ln()).round();
                if n < 0.0 {
                    return Err(Error::PointNotInScale { t });
                }
                let c = start * q.powi(n as i32);
                if (c - t).abs() <= tol_at(t) {
                    Ok(c)
                } else {
                    Err(Error::PointNotInScale { t })
                }
            }
            TimeScale::Pattern(p) => {
                let (cycle, idx) = p.locate(t).ok_or(Error::PointNotInScale { t })?;
                match p.pattern[idx] {
                    PatternItem::Point(_) => Ok(p.item_start(cycle, idx)),
                    PatternItem::Interval(_) => {
                        let (a, b) = (p.item_start(cycle, idx), p.item_end(cycle, idx));
                        Ok(t.clamp(a, b))
                    }
                }
            }
        }
    }

    /// Forward jump and graininess at `t`, computed together so that
    /// `mu` is exact for the generator (not `sigma - t` after rounding).
    pub fn jump(&self, t: f64) -> Result<(f64, f64)> {
        let t = self.canonical(t)?;
        match self {
            TimeScale::Reals => Ok((t, 0.0)),
            TimeScale::Lattice { h, .. } => Ok((t + h, *h)),
            TimeScale::Quantum { q, .. } => {
                let s = t * q;
                Ok((s, s - t))
            }
            TimeScale::Pattern(p) => {
                let (cycle, idx) = p.locate(t).ok_or(Error::PointNotInScale { t })?;
                let end = p.item_end(cycle, idx);
                if t < end - tol_at(t) {
                    // interior of an interval
                    return Ok((t, 0.0));
                }
                let (nc, ni) = p.next_index(cycle, idx);
                let s = p.item_start(nc, ni);
                Ok((s, s - end))
            }
        }
    }

    pub fn sigma(&self, t: f64) -> Result<f64> {
        self.jump(t).map(|(s, _)| s)
    }

    pub fn graininess(&self, t: f64) -> Result<f64> {
        self.jump(t).map(|(_, mu)| mu)
    }

    pub fn point_class(&self, t: f64) -> Result<PointClass> {
        let mu = self.graininess(t)?;
        Ok(if mu > 0.0 {
            PointClass::RightScattered
        } else {
            PointClass::RightDense
        })
    }

    /// Unbounded forward walk from `t0`. The iterator only ends if time
    /// overflows `f64`.
    pub fn walk(&self, t0: f64) -> Result<Walk<'_>> {
        let t0 = self.canonical(t0)?;
        let cursor = match self {
            TimeScale::Reals => Cursor::Reals { start: Some(t0) },
            TimeScale::Lattice { .. } => Cursor::Lattice { t: t0 },
            TimeScale::Quantum { .. } => Cursor::Quantum { t: t0 },
            TimeScale::Pattern(p) => {
                let (cycle, idx) = p.locate(t0).ok_or(Error::PointNotInScale { t: t0 })?;
                Cursor::Pattern {
                    cycle,
                    idx,
                    from: t0,
                }
            }
        };
        Ok(Walk { ts: self, cursor })
    }

    /// Enumerates the scale from `t0` as scattered points and dense
    /// segments, stopping at the horizon or after `max_points` items.
    ///
    /// Running out of `max_points` before reaching a requested horizon is
    /// reported as [`Error::BudgetExceeded`].
    pub fn grid(&self, t0: f64, budget: GridBudget) -> Result<Vec<GridItem>> {
        if budget.horizon.is_none() && budget.max_points.is_none() {
            return Err(Error::ConfigInvalid(
                "grid needs a horizon or a point budget".into(),
            ));
        }
        if let Some(h) = budget.horizon {
            if h.is_nan() || h <= t0 {
                return Err(Error::ConfigInvalid("grid horizon must exceed t0".into()));
            }
        }
        if budget.max_points == Some(0) {
            return Err(Error::ConfigInvalid(
                "grid point budget must be positive".into(),
            ));
        }
        let mut out = Vec::new();
        for item in self.walk(t0)? {
            if let Some(h) = budget.horizon {
                if item.start() > h + tol_at(h) {
                    return Ok(out);
                }
            }
            if let Some(max) = budget.max_points {
                if out.len() == max {
                    return match budget.horizon {
                        Some(h) => Err(Error::BudgetExceeded(format!(
                            "{max} grid items used before reaching horizon {h}"
                        ))),
                        None => Ok(out),
                    };
                }
            }
            let item = match (item, budget.horizon) {
                (GridItem::Dense { start, end, .. }, Some(h)) if end > h => GridItem::Dense {
                    start,
                    end: h,
                    exit_mu: 0.0,
                },
                (item, _) => item,
            };
            out.push(item);
        }
        Ok(out)
    }

    /// Splits `[t0, t)` into jumps and dense flows. Both ends must lie in
    /// the scale and `t >= t0`.
    fn pieces(&self, t0: f64, t: f64) -> Result<Vec<Piece>> {
        let t = self.canonical(t)?;
        let t0 = self.canonical(t0)?;
        let mut out = Vec::new();
        if t <= t0 {
            return Ok(out);
        }
        let tol = tol_at(t);
        for item in self.walk(t0)? {
            match item {
                GridItem::Scattered { t: tau, mu } => {
                    if tau >= t - tol {
                        break;
                    }
                    out.push(Piece::Jump { t: tau, mu });
                }
                GridItem::Dense {
                    start,
                    end,
                    exit_mu,
                } => {
                    if t <= end + tol {
                        out.push(Piece::Flow { len: t - start });
                        break;
                    }
                    out.push(Piece::Flow { len: end - start });
                    out.push(Piece::Jump {
                        t: end,
                        mu: exit_mu,
                    });
                }
            }
        }
        Ok(out)
    }

    /// `e_p(t, t0)` for a constant rate `p`.
    pub fn exp(&self, p: f64, t: f64, t0: f64) -> Result<f64> {
        self.exp_with(|_| p, t, t0)
    }

    /// `e_p(t, t0)` for a rate that depends on time only through the
    /// graininess, `p = rate(mu)`. This covers constant rates as well as
    /// expressions such as `⊖r`. Dense stretches use `rate(0)`.
    pub fn exp_with<F: Fn(f64) -> f64>(&self, rate: F, t: f64, t0: f64) -> Result<f64> {
        self.exp_impl(&rate, t, t0, false)
    }

    /// `e_{⊖p}(t, t0)` with `p = rate(mu)`. Uses `1 + mu (⊖p) = 1 / (1 + mu p)`
    /// directly; forming `⊖p` first loses about `mu p` ulps per factor.
    pub fn exp_circle_minus<F: Fn(f64) -> f64>(&self, rate: F, t: f64, t0: f64) -> Result<f64> {
        self.exp_impl(&rate, t, t0, true)
    }

    fn exp_impl(&self, rate: &dyn Fn(f64) -> f64, t: f64, t0: f64, minus: bool) -> Result<f64> {
        let (ct, ct0) = (self.canonical(t)?, self.canonical(t0)?);
        if ct < ct0 {
            return self.exp_impl(rate, t0, t, minus).map(|v| 1.0 / v);
        }
        let sign = if minus { -1.0 } else { 1.0 };
        let mut log_sum = 0.0;
        let mut negative = false;
        for piece in self.pieces(t0, t)? {
            match piece {
                Piece::Flow { len } => log_sum += sign * rate(0.0) * len,
                Piece::Jump { t, mu } => {
                    let p = rate(mu);
                    let factor = 1.0 + mu * p;
                    if factor.abs() <= 1e-15 {
                        return Err(Error::NotRegressive { t, mu, p });
                    }
                    if factor < 0.0 {
                        negative = !negative;
                        log_sum += sign * factor.abs().ln();
                    } else {
                        log_sum += sign * (mu * p).ln_1p();
                    }
                }
            }
        }
        let mag = log_sum.exp();
        Ok(if negative { -mag } else { mag })
    }

    /// Delta integral of a graininess-dependent rate over `[t0, t)`.
    pub fn delta_integral<F: Fn(f64) -> f64>(&self, rate: F, t: f64, t0: f64) -> Result<f64> {
        let (ct, ct0) = (self.canonical(t)?, self.canonical(t0)?);
        if ct < ct0 {
            return self.delta_integral(rate, t0, t).map(|v| -v);
        }
        Ok(self
            .pieces(t0, t)?
            .into_iter()
            .map(|piece| match piece {
                Piece::Flow { len } => rate(0.0) * len,
                Piece::Jump { mu, .. } => mu * rate(mu),
            })
            .sum())
    }
}

/// `⊖z = -z / (1 + mu z)`.
pub fn circle_minus(z: f64, mu: f64) -> Result<f64> {
    let denom = 1.0 + mu * z;
    if denom.abs() <= 1e-12 {
        return Err(Error::NotRegressive {
            t: f64::NAN,
            mu,
            p: z,
        });
    }
    Ok(-z / denom)
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Jump { t: f64, mu: f64 },
    Flow { len: f64 },
}

#[derive(Clone, Debug)]
enum Cursor {
    Reals { start: Option<f64> },
    Lattice { t: f64 },
    Quantum { t: f64 },
    Pattern { cycle: i64, idx: usize, from: f64 },
}

/// Forward walk produced by [`TimeScale::walk`].
#[derive(Clone, Debug)]
pub struct Walk<'a> {
    ts: &'a TimeScale,
    cursor: Cursor,
}

impl Iterator for Walk<'_> {
    type Item = GridItem;

    fn next(&mut self) -> Option<GridItem> {
        match (&mut self.cursor, self.ts) {
            (Cursor::Reals { start }, _) => start.take().map(|s| GridItem::Dense {
                start: s,
                end: f64::INFINITY,
                exit_mu: 0.0,
            }),
            (Cursor::Lattice { t }, TimeScale::Lattice { h, .. }) => {
                let cur = *t;
                let next = cur + h;
                if !next.is_finite() {
                    return None;
                }
                *t = next;
                Some(GridItem::Scattered { t: cur, mu: *h })
            }
            (Cursor::Quantum { t }, TimeScale::Quantum { q, .. }) => {
                let cur = *t;
                let next = cur * q;
                if !next.is_finite() {
                    return None;
                }
                *t = next;
                Some(GridItem::Scattered {
                    t: cur,
                    mu: next - cur,
                })
            }
            (Cursor::Pattern { cycle, idx, from }, TimeScale::Pattern(p)) => {
                let end = p.item_end(*cycle, *idx);
                let (nc, ni) = p.next_index(*cycle, *idx);
                let next = p.item_start(nc, ni);
                if !next.is_finite() {
                    return None;
                }
                let exit_mu = next - end;
                let start = *from;
                let item = if start < end - tol_at(end) {
                    GridItem::Dense {
                        start,
                        end,
                        exit_mu,
                    }
                } else {
                    GridItem::Scattered {
                        t: end,
                        mu: exit_mu,
                    }
                };
                *cycle = nc;
                *idx = ni;
                *from = next;
                Some(item)
            }
            _ => unreachable!("cursor always matches its time scale"),
        }
    }
}

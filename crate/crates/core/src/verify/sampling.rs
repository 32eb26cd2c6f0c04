use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ModelParams, State};
use crate::roots::{ClaimRegion, InvariantRegion, Nullcline};
use crate::timescale::{GridItem, TimeScale};

/// 64-bit FNV-1a.
pub fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// The PRNG stream owned by one check.
pub fn check_rng(seed: u64, check_id: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a64(check_id))
}

pub(crate) fn uniform(rng: &mut ChaCha8Rng, a: f64, b: f64) -> f64 {
    a + (b - a) * rng.gen::<f64>()
}

/// `[0, 2 max(K, 1/beta)] x [0, 2 max(L, 1/alpha)]`
pub(crate) fn sampling_box(p: &ModelParams) -> [f64; 4] {
    [
        0.0,
        2.0 * p.k_cap.max(1.0 / p.beta),
        0.0,
        2.0 * p.l_cap.max(1.0 / p.alpha),
    ]
}

/// Uniform point of the box with both coordinates strictly positive.
pub(crate) fn positive_in_box(rng: &mut ChaCha8Rng, b: [f64; 4]) -> State {
    loop {
        let s = State::new(uniform(rng, b[0], b[1]), uniform(rng, b[2], b[3]));
        if s.x > 0.0 && s.y > 0.0 {
            return s;
        }
    }
}

const MAX_TRIES: usize = 100_000;

/// Rejection sample of a claim region, open sides shrunk by `margin`.
pub(crate) fn sample_claim(
    rng: &mut ChaCha8Rng,
    p: &ModelParams,
    region: &ClaimRegion,
    margin: f64,
) -> Option<State> {
    let b = region.bbox(p);
    if !(b[0] < b[1] && b[2] < b[3]) {
        return None;
    }
    for _ in 0..MAX_TRIES {
        let s = State::new(uniform(rng, b[0], b[1]), uniform(rng, b[2], b[3]));
        if region.contains_with_margin(p, s, margin) {
            return Some(s);
        }
    }
    None
}

/// Interior point of an invariant region with strictly positive
/// coordinates.
pub(crate) fn sample_invariant_interior(
    rng: &mut ChaCha8Rng,
    p: &ModelParams,
    region: InvariantRegion,
) -> Option<State> {
    let b = sampling_box(p);
    let b = [0.0, b[1] / 2.0, 0.0, b[3] / 2.0];
    for _ in 0..MAX_TRIES {
        let s = positive_in_box(rng, b);
        if region.margin(p, s).ok()? > 0.0 {
            return Some(s);
        }
    }
    None
}

/// Boundary arcs `(x_lo, x_hi, curve)` of an invariant region; `None` is
/// the x-axis.
fn boundary_arcs(p: &ModelParams, region: InvariantRegion) -> Vec<(f64, f64, Option<Nullcline>)> {
    let (kc, ib) = (p.k_cap, 1.0 / p.beta);
    let es = p.equilibria().estar;
    use Nullcline::{H, K};
    match region {
        InvariantRegion::Omega2 => vec![
            (0.0, kc, Some(H)),
            (0.0, ib, Some(K)),
            (kc.min(ib), kc.max(ib), None),
        ],
        InvariantRegion::R2T | InvariantRegion::S2T => {
            let xs = es.map_or(0.0, |e| e.x);
            vec![(0.0, xs, Some(H)), (0.0, xs, Some(K))]
        }
        InvariantRegion::R5T => {
            let xs = es.map_or(0.0, |e| e.x);
            vec![(xs, kc, Some(H)), (xs, ib, Some(K)), (ib, kc, None)]
        }
        InvariantRegion::S5T => {
            let xs = es.map_or(0.0, |e| e.x);
            vec![(xs, kc, Some(H)), (xs, ib, Some(K)), (kc, ib, None)]
        }
    }
}

/// Point on a boundary arc of the region, off the end points.
pub(crate) fn sample_invariant_boundary(
    rng: &mut ChaCha8Rng,
    p: &ModelParams,
    region: InvariantRegion,
) -> Option<State> {
    let arcs: Vec<_> = boundary_arcs(p, region)
        .into_iter()
        .filter(|(a, b, _)| b > a)
        .collect();
    if arcs.is_empty() {
        return None;
    }
    let (a, b, curve) = arcs[rng.gen_range(0..arcs.len())];
    for _ in 0..1000 {
        let x = uniform(rng, a, b);
        if x <= a || x >= b {
            continue;
        }
        let y = curve.map_or(0.0, |c| c.eval(p, x));
        let s = State::new(x, y);
        if s.y >= 0.0 && region.contains(p, s).unwrap_or(false) {
            return Some(s);
        }
    }
    None
}

/// The first `items` walk items from `t0`; an unbounded dense stretch is
/// cut to length `items`.
pub(crate) fn walk_items(ts: &TimeScale, t0: f64, items: usize) -> crate::Result<Vec<GridItem>> {
    let mut out: Vec<GridItem> = ts.walk(t0)?.take(items).collect();
    for it in &mut out {
        if let GridItem::Dense { start, end, .. } = it {
            if !end.is_finite() {
                *end = *start + items as f64;
            }
        }
    }
    Ok(out)
}

/// A random point of the scale among the given walk items.
pub(crate) fn point_in_items(rng: &mut ChaCha8Rng, items: &[GridItem]) -> f64 {
    match items[rng.gen_range(0..items.len())] {
        GridItem::Scattered { t, .. } => t,
        GridItem::Dense { start, end, .. } => {
            // include the end points now and then
            match rng.gen_range(0..8) {
                0 => start,
                1 => end,
                _ => uniform(rng, start, end),
            }
        }
    }
}

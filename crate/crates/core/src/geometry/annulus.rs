use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{AngularWindow, Circle};

const ANGULAR_PANELS: usize = 1 << 17;

/// Area of the intersection of the closed `delta`-annuli about two circles.
///
/// Integrates in polar coordinates about the first center: for each angle the
/// radial set inside the second annulus is an interval difference solved in
/// closed form, and the angular integral uses the composite midpoint rule.
/// With a window only the angles of the first circle inside it contribute.
pub fn annulus_intersection_area(
    g1: &Circle,
    g2: &Circle,
    delta: f64,
    window: Option<AngularWindow>,
) -> f64 {
    let w = window.unwrap_or_else(AngularWindow::full);
    if w.span <= 0.0 || w.start.is_nan() {
        return 0.0;
    }
    let (lo1, hi1) = (g1.radius() - delta, g1.radius() + delta);
    let (lo2, hi2) = ((g2.radius() - delta).max(0.0), g2.radius() + delta);
    let wx = g2.x() - g1.x();
    let wy = g2.y() - g1.y();
    let w2 = wx * wx + wy * wy;
    // quick reject: annuli far apart
    if w2.sqrt() > hi1 + hi2 || w2.sqrt() + hi1 < lo2 || w2.sqrt() + hi2 < lo1 {
        return 0.0;
    }
    let h = w.span / ANGULAR_PANELS as f64;
    let sum: f64 = (0..ANGULAR_PANELS)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| {
            let phi = w.start + (i as f64 + 0.5) * h;
            let (s, c) = phi.sin_cos();
            let b = c * wx + s * wy;
            radial_measure(b, w2, lo1, hi1, lo2, hi2)
        })
        .sum();
    sum * h
}

/// `∫ rho d rho` over `rho ∈ [lo1, hi1]` with `lo2 <= |rho u - w| <= hi2`,
/// where `b = u·w` and `w2 = |w|^2`.
fn radial_measure(b: f64, w2: f64, lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> f64 {
    // rho^2 - 2 b rho + w2 <= R^2
    let ball = |rr: f64| -> Option<(f64, f64)> {
        let disc = b * b - w2 + rr * rr;
        if disc < 0.0 {
            None
        } else {
            let s = disc.sqrt();
            Some((b - s, b + s))
        }
    };
    let piece = |a: f64, z: f64| -> f64 {
        let a = a.max(lo1);
        let z = z.min(hi1);
        if z > a {
            0.5 * (z * z - a * a)
        } else {
            0.0
        }
    };
    match ball(hi2) {
        None => 0.0,
        Some((a, z)) => {
            let outer = piece(a, z);
            let inner = match ball(lo2) {
                Some((ia, iz)) => piece(ia.max(a), iz.min(z)),
                None => 0.0,
            };
            outer - inner
        }
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Monte Carlo cross-check for [`annulus_intersection_area`]: samples
/// uniformly in the first annulus (restricted to the window) and counts hits
/// in the second.
pub fn annulus_area_monte_carlo(
    g1: &Circle,
    g2: &Circle,
    delta: f64,
    window: Option<AngularWindow>,
    samples: usize,
    seed: u64,
) -> MonteCarloEstimate {
    let w = window.unwrap_or_else(AngularWindow::full);
    let (lo1, hi1) = (g1.radius() - delta, g1.radius() + delta);
    let (lo2, hi2) = ((g2.radius() - delta).max(0.0), g2.radius() + delta);
    let area1 = 0.5 * w.span * (hi1 * hi1 - lo1 * lo1);
    if samples == 0 || area1 <= 0.0 {
        return MonteCarloEstimate {
            value: 0.0,
            std_err: 0.0,
            samples,
        };
    }
    const CHUNK: usize = 1 << 16;
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let n = CHUNK.min(samples - k * CHUNK);
            let mut h = 0u64;
            for _ in 0..n {
                let phi = w.start + rng.gen::<f64>() * w.span;
                let u: f64 = rng.gen();
                let rho = (lo1 * lo1 + u * (hi1 * hi1 - lo1 * lo1)).sqrt();
                let (s, c) = phi.sin_cos();
                let px = g1.x() + rho * c - g2.x();
                let py = g1.y() + rho * s - g2.y();
                let d = px.hypot(py);
                if d >= lo2 && d <= hi2 {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let p = hits as f64 / samples as f64;
    MonteCarloEstimate {
        value: area1 * p,
        std_err: area1 * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    }
}

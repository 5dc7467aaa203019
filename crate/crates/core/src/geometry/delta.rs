use std::f64::consts::TAU;

use super::{dist, norm, AngularWindow, Circle};
use crate::error::{Result, TangenciaError};

/// Points per angle in the coarse grid of the numerical minimizer.
pub const COARSE_GRID: usize = 720;
const REFINE_STEP: f64 = 1e-10;
const MAX_REFINE_ITERS: usize = 200_000;

/// Location and value of a tangency-objective minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaMinimum {
    pub value: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// The minimizer sits on a window boundary.
    pub at_window_edge: bool,
}

/// Closed-form tangency proxy `||x - x'| - |r - r'||`.
///
/// This is the minimum of the objective over aligned normals, so it is an
/// upper bound for the tangency distance; it is also a lower bound up to the
/// factor `max(1, min(r, r'))`.
pub fn delta_c(g1: &Circle, g2: &Circle) -> f64 {
    (dist(g1.center(), g2.center()) - (g1.radius() - g2.radius()).abs()).abs()
}

/// Angle on `g1` of the aligned-normal point pair realizing [`delta_c`].
pub fn aligned_angle(g1: &Circle, g2: &Circle) -> f64 {
    let v = [g1.x() - g2.x(), g1.y() - g2.y()];
    let s = g1.radius() - g2.radius();
    if norm(v) == 0.0 {
        return 0.0;
    }
    // minimize |v + s n| over unit n
    let n = if s >= 0.0 { [-v[0], -v[1]] } else { v };
    n[1].atan2(n[0]).rem_euclid(TAU)
}

/// Tangency distance: infimum over points of both circles of positional
/// distance plus the difference of outward unit normals.
///
/// When the smaller radius is at most one and the aligned-normal minimizer
/// lies inside both windows the value equals [`delta_c`] exactly (the
/// objective is squeezed between `delta_c / max(1, r_min)` and `delta_c`);
/// otherwise the numerical minimizer is used.
pub fn delta_metric(
    g1: &Circle,
    g2: &Circle,
    window: Option<(AngularWindow, AngularWindow)>,
) -> Result<f64> {
    let r_min = g1.radius().min(g2.radius());
    if r_min <= 1.0 {
        match window {
            None => return Ok(delta_c(g1, g2)),
            Some((w1, w2)) => {
                let th = aligned_angle(g1, g2);
                if w1.contains(th) && w2.contains(th) {
                    return Ok(delta_c(g1, g2));
                }
            }
        }
    }
    delta_metric_numeric(g1, g2, window).map(|m| m.value)
}

#[inline]
fn objective(a: &Circle, b: &Circle, t1: f64, t2: f64) -> f64 {
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    let dx = a.x() + a.radius() * c1 - b.x() - b.radius() * c2;
    let dy = a.y() + a.radius() * s1 - b.y() - b.radius() * s2;
    dx.hypot(dy) + (c1 - c2).hypot(s1 - s2)
}

struct Range1 {
    start: f64,
    span: f64,
    full: bool,
}

impl Range1 {
    fn of(w: Option<AngularWindow>) -> Self {
        match w {
            Some(w) if !w.is_full() => Range1 {
                start: w.start,
                span: w.span,
                full: false,
            },
            _ => Range1 {
                start: 0.0,
                span: TAU,
                full: true,
            },
        }
    }

    fn grid(&self, i: usize) -> f64 {
        if self.full {
            self.start + self.span * i as f64 / COARSE_GRID as f64
        } else {
            self.start + self.span * i as f64 / (COARSE_GRID - 1) as f64
        }
    }

    fn spacing(&self) -> f64 {
        self.span / COARSE_GRID as f64
    }

    /// Offset from the range start clamped to the range; `None` means unclamped.
    fn clamp(&self, off: f64) -> (f64, bool) {
        if self.full {
            (off, false)
        } else if off <= 0.0 {
            (0.0, true)
        } else if off >= self.span {
            (self.span, true)
        } else {
            (off, false)
        }
    }
}

/// Numerical minimization of the tangency objective: a 720-point coarse grid
/// per angle followed by pattern-search refinement down to a 1e-10 step.
pub fn delta_metric_numeric(
    g1: &Circle,
    g2: &Circle,
    window: Option<(AngularWindow, AngularWindow)>,
) -> Result<DeltaMinimum> {
    let (w1, w2) = match window {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    if [w1, w2].iter().flatten().any(|w| w.span <= 0.0 || w.start.is_nan()) {
        return Err(TangenciaError::NotConverged(
            "empty angular window".to_string(),
        ));
    }
    let r1 = Range1::of(w1);
    let r2 = Range1::of(w2);

    let pts2: Vec<([f64; 2], [f64; 2])> = (0..COARSE_GRID)
        .map(|j| {
            let th = r2.grid(j);
            let (s, c) = th.sin_cos();
            (g2.point_at(th), [c, s])
        })
        .collect();
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for i in 0..COARSE_GRID {
        let th = r1.grid(i);
        let (s, c) = th.sin_cos();
        let p = g1.point_at(th);
        for (j, (q, n)) in pts2.iter().enumerate() {
            let v = dist(p, *q) + (c - n[0]).hypot(s - n[1]);
            if v < best.0 {
                best = (v, i, j);
            }
        }
    }

    // Offsets from range starts.
    let mut o1 = r1.grid(best.1) - r1.start;
    let mut o2 = r2.grid(best.2) - r2.start;
    let mut val = best.0;
    let mut step = r1.spacing().max(r2.spacing());
    let dirs: [(f64, f64); 8] = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, 1.0),
        (-1.0, -1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
    ];
    let mut iters = 0;
    while step >= REFINE_STEP {
        iters += 1;
        if iters > MAX_REFINE_ITERS {
            return Err(TangenciaError::NotConverged(format!(
                "refinement stalled at step {step:e}"
            )));
        }
        let mut moved = false;
        for (d1, d2) in dirs {
            let (n1, _) = r1.clamp(o1 + d1 * step);
            let (n2, _) = r2.clamp(o2 + d2 * step);
            let v = objective(g1, g2, r1.start + n1, r2.start + n2);
            if v < val {
                val = v;
                o1 = n1;
                o2 = n2;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    if !val.is_finite() {
        return Err(TangenciaError::NotConverged("non-finite objective".into()));
    }
    let edge1 = !r1.full && (o1 <= 0.0 || o1 >= r1.span);
    let edge2 = !r2.full && (o2 <= 0.0 || o2 >= r2.span);
    Ok(DeltaMinimum {
        value: val,
        theta1: (r1.start + o1).rem_euclid(TAU),
        theta2: (r2.start + o2).rem_euclid(TAU),
        at_window_edge: edge1 || edge2,
    })
}

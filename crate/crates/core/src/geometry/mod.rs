//! Circles, the two metrics on circle space, annulus intersections, the
//! cinematic-curvature checker and the internal-type Apollonius solver.

mod annulus;
mod apollonius;
mod curvature;
mod delta;

use std::cmp::Ordering;
use std::f64::consts::TAU;

use crate::error::{Result, TangenciaError};

pub use annulus::{annulus_area_monte_carlo, annulus_intersection_area, MonteCarloEstimate};
pub use apollonius::{apollonius_internal_tangents, tangency_residual};
pub use curvature::{check_cinematic_curvature, CurvatureOptions, CurvatureReport};
pub use delta::{
    aligned_angle, delta_c, delta_metric, delta_metric_numeric, DeltaMinimum, COARSE_GRID,
};

/// A plane circle with center `(x, y)` and positive radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    center: [f64; 2],
    radius: f64,
}

impl Circle {
    pub fn new(x: f64, y: f64, radius: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && radius.is_finite()) {
            return Err(TangenciaError::InvalidCircle(format!(
                "non-finite field in ({x}, {y}, {radius})"
            )));
        }
        if radius <= 0.0 {
            return Err(TangenciaError::InvalidCircle(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(Circle {
            center: [x, y],
            radius,
        })
    }

    #[inline]
    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.center[0]
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.center[1]
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Point of the circle at angle `theta`.
    #[inline]
    pub fn point_at(&self, theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        [self.center[0] + self.radius * c, self.center[1] + self.radius * s]
    }

    /// Distance from `p` to the circle itself.
    #[inline]
    pub fn radial_gap(&self, p: [f64; 2]) -> f64 {
        (dist(p, self.center) - self.radius).abs()
    }

    /// Total order by center then radius, used for deterministic iteration.
    pub fn lex_cmp(&self, other: &Circle) -> Ordering {
        self.center[0]
            .total_cmp(&other.center[0])
            .then(self.center[1].total_cmp(&other.center[1]))
            .then(self.radius.total_cmp(&other.radius))
    }
}

/// An arc of angles `[start, start + span]`, taken modulo a full turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularWindow {
    pub start: f64,
    pub span: f64,
}

impl AngularWindow {
    pub fn new(start: f64, span: f64) -> Self {
        AngularWindow {
            start: start.rem_euclid(TAU),
            span: span.clamp(0.0, TAU),
        }
    }

    pub fn full() -> Self {
        AngularWindow {
            start: 0.0,
            span: TAU,
        }
    }

    pub fn is_full(&self) -> bool {
        self.span >= TAU
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.is_full() || (theta - self.start).rem_euclid(TAU) <= self.span
    }

    /// The window of angles for which `circle` lies inside the disc of
    /// radius `alpha` about the origin; `None` when the whole circle does.
    /// An empty result has `span == 0` and `start` NaN.
    pub fn from_ball(circle: &Circle, alpha: f64) -> Option<Self> {
        if !alpha.is_finite() {
            return None;
        }
        let c = norm(circle.center);
        let r = circle.radius;
        if c + r <= alpha {
            return None;
        }
        // |c + r u|^2 <= alpha^2  <=>  cos(phi - phi_c) <= (alpha^2 - c^2 - r^2) / (2 c r)
        if c == 0.0 {
            return Some(if r <= alpha {
                AngularWindow::full()
            } else {
                AngularWindow {
                    start: f64::NAN,
                    span: 0.0,
                }
            });
        }
        let k = (alpha * alpha - c * c - r * r) / (2.0 * c * r);
        if k < -1.0 {
            return Some(AngularWindow {
                start: f64::NAN,
                span: 0.0,
            });
        }
        let half = k.clamp(-1.0, 1.0).acos();
        // Allowed angles lie opposite to the center direction.
        let away = circle.center[1].atan2(circle.center[0]) + std::f64::consts::PI;
        let open = std::f64::consts::PI - half;
        Some(AngularWindow::new(away - open, 2.0 * open))
    }
}

/// The parameter metric `|x - x'| + |r - r'|`.
pub fn d_metric(g1: &Circle, g2: &Circle) -> f64 {
    dist(g1.center, g2.center) + (g1.radius - g2.radius).abs()
}

#[inline]
pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[inline]
pub(crate) fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

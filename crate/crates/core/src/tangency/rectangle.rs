use std::f64::consts::{PI, TAU};

use crate::error::{Result, TangenciaError};
use crate::geometry::Circle;
use crate::params::ParamSet;

/// The δ-neighborhood of an arc of length `sqrt(delta / t)` on `base`,
/// centered at `anchor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRectangle {
    base: Circle,
    anchor: f64,
    delta: f64,
    t: f64,
}

/// Builds the rectangle anchored at `theta` on `g` at the scales of `params`.
pub fn make_rectangle(g: &Circle, theta: f64, params: &ParamSet) -> Result<DeltaRectangle> {
    DeltaRectangle::new(*g, theta, params.delta, params.t)
}

impl DeltaRectangle {
    pub fn new(base: Circle, anchor: f64, delta: f64, t: f64) -> Result<Self> {
        if delta > t {
            return Err(TangenciaError::ScaleOrder { delta, t });
        }
        if !(delta > 0.0) || !anchor.is_finite() {
            return Err(TangenciaError::InvalidParams(
                "rectangle needs positive delta and finite anchor".into(),
            ));
        }
        Ok(DeltaRectangle {
            base,
            anchor: anchor.rem_euclid(TAU),
            delta,
            t,
        })
    }

    pub fn base(&self) -> &Circle {
        &self.base
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn arc_length(&self) -> f64 {
        (self.delta / self.t).sqrt()
    }

    /// Angular half-width of the spine.
    pub fn half_angle(&self) -> f64 {
        (self.arc_length() / (2.0 * self.base.radius())).min(PI)
    }

    /// Spine endpoints as angles.
    pub fn angle_range(&self) -> (f64, f64) {
        (self.anchor - self.half_angle(), self.anchor + self.half_angle())
    }

    pub fn midpoint(&self) -> [f64; 2] {
        self.base.point_at(self.anchor)
    }

    fn spine_steps(&self) -> usize {
        (self.arc_length() / (self.delta / 4.0)).ceil().max(1.0) as usize
    }

    /// Sample points at spacing `delta / 4` along the spine and both offset
    /// edges.
    pub fn samples(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.samples_with(self.spine_steps())
    }

    /// Samples with an explicit number of spine intervals.
    pub fn samples_with(&self, steps: usize) -> impl Iterator<Item = [f64; 2]> + '_ {
        let (lo, hi) = self.angle_range();
        let c = self.base.center();
        let r = self.base.radius();
        let d = self.delta;
        (0..=steps).flat_map(move |i| {
            let th = lo + (hi - lo) * i as f64 / steps as f64;
            let (s, co) = th.sin_cos();
            [r - d, r, r + d]
                .into_iter()
                .map(move |rr| [c[0] + rr * co, c[1] + rr * s])
        })
    }

    /// Distance from `p` to the spine arc.
    pub fn distance_to_spine(&self, p: [f64; 2]) -> f64 {
        let c = self.base.center();
        let (dx, dy) = (p[0] - c[0], p[1] - c[1]);
        let rho = dx.hypot(dy);
        let hw = self.half_angle();
        if rho > 0.0 {
            let phi = dy.atan2(dx);
            let off = (phi - self.anchor + PI).rem_euclid(TAU) - PI;
            if off.abs() <= hw {
                return (rho - self.base.radius()).abs();
            }
        }
        let (lo, hi) = self.angle_range();
        let e1 = self.base.point_at(lo);
        let e2 = self.base.point_at(hi);
        let d1 = (p[0] - e1[0]).hypot(p[1] - e1[1]);
        let d2 = (p[0] - e2[0]).hypot(p[1] - e2[1]);
        d1.min(d2)
    }

    /// Distance from `p` to the rectangle region (zero inside).
    pub fn distance_to_region(&self, p: [f64; 2]) -> f64 {
        (self.distance_to_spine(p) - self.delta).max(0.0)
    }

    fn same_scales(&self, other: &DeltaRectangle) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        close(self.delta, other.delta) && close(self.t, other.t)
    }
}

/// True iff every sample of `rect` lies in the `C1 * delta` neighborhood of `g`.
pub fn is_incident(g: &Circle, rect: &DeltaRectangle, params: &ParamSet) -> bool {
    let tol = params.c1 * rect.delta;
    if g.radial_gap(rect.midpoint()) > tol {
        return false;
    }
    // spine endpoints on both edges fail first for most non-incident circles
    let (lo, hi) = rect.angle_range();
    for th in [lo, hi] {
        let (s, c) = th.sin_cos();
        for rr in [rect.base.radius() - rect.delta, rect.base.radius() + rect.delta] {
            let p = [rect.base.x() + rr * c, rect.base.y() + rr * s];
            if g.radial_gap(p) > tol {
                return false;
            }
        }
    }
    rect.samples().all(|p| g.radial_gap(p) <= tol)
}

/// True iff each rectangle lies in the `A0 * delta` neighborhood of the other.
pub fn are_comparable(r1: &DeltaRectangle, r2: &DeltaRectangle, params: &ParamSet) -> Result<bool> {
    if !r1.same_scales(r2) {
        return Err(TangenciaError::ScaleMismatch);
    }
    let tol = params.a0 * r1.delta;
    let m1 = r1.midpoint();
    let m2 = r2.midpoint();
    let reach = 0.5 * (r1.arc_length() + r2.arc_length()) + 2.0 * r1.delta + tol;
    if (m1[0] - m2[0]).hypot(m1[1] - m2[1]) > reach {
        return Ok(false);
    }
    let inside = |a: &DeltaRectangle, b: &DeltaRectangle| a.samples().all(|p| b.distance_to_region(p) <= tol);
    Ok(inside(r1, r2) && inside(r2, r1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64, r: f64) -> Circle {
        Circle::new(x, y, r).unwrap()
    }

    fn params(delta: f64, t: f64) -> ParamSet {
        ParamSet::with_scales(delta, t).unwrap()
    }

    #[test]
    fn make_rectangle_examples() {
        let p = params(0.01, 0.25);
        let r = make_rectangle(&c(0.0, 0.0, 1.0), 0.0, &p).unwrap();
        assert!((r.arc_length() - 0.2).abs() < 1e-15);
        let (lo, hi) = r.angle_range();
        assert!((lo + 0.1).abs() < 1e-15 && (hi - 0.1).abs() < 1e-15);

        let q = DeltaRectangle::new(c(0.0, 0.0, 1.0), 0.0, 0.2, 0.2).unwrap();
        assert!((q.arc_length() - 1.0).abs() < 1e-15);
        assert!(matches!(
            DeltaRectangle::new(c(0.0, 0.0, 1.0), 0.0, 0.3, 0.25),
            Err(TangenciaError::ScaleOrder { .. })
        ));
    }

    /// Exhaustive containment check at spacing delta/100 across the region.
    fn dense_incident(g: &Circle, r: &DeltaRectangle, tol: f64) -> bool {
        let steps = (r.arc_length() / (r.delta / 100.0)).ceil() as usize;
        let (lo, hi) = r.angle_range();
        let layers = 201;
        (0..=steps).all(|i| {
            let th = lo + (hi - lo) * i as f64 / steps as f64;
            (0..layers).all(|k| {
                let rr = r.base.radius() - r.delta + 2.0 * r.delta * k as f64 / (layers - 1) as f64;
                let p = [r.base.x() + rr * th.cos(), r.base.y() + rr * th.sin()];
                g.radial_gap(p) <= tol
            })
        })
    }

    #[test]
    fn incidence_examples() {
        let p = params(0.01, 0.25);
        let g = c(0.0, 0.0, 1.0);
        let r = make_rectangle(&g, 0.0, &p).unwrap();
        assert!(is_incident(&g, &r, &p));
        let tangent = c(0.1, 0.0, 0.9);
        assert!(dense_incident(&tangent, &r, p.c1 * p.delta));
        assert!(is_incident(&tangent, &r, &p));
        assert!(!is_incident(&c(0.0, 0.0, 0.5), &r, &p));
    }

    #[test]
    fn incidence_agrees_with_dense_oracle_on_shifted_circles() {
        let p = params(0.01, 0.25);
        let g = c(0.0, 0.0, 1.0);
        let r = make_rectangle(&g, 0.3, &p).unwrap();
        for k in 0..60 {
            let shift = -0.05 + 0.1 * k as f64 / 59.0;
            let h = c(0.0, 0.0, 1.0 + shift);
            let dense = dense_incident(&h, &r, p.c1 * p.delta);
            assert_eq!(is_incident(&h, &r, &p), dense, "shift {shift}");
        }
    }

    #[test]
    fn comparability_examples() {
        let p = params(1e-3, 0.25);
        let g = c(0.0, 0.0, 1.0);
        let r1 = make_rectangle(&g, 1.0, &p).unwrap();
        assert!(are_comparable(&r1, &r1, &p).unwrap());
        let far = make_rectangle(&g, 1.0 + 10.0 * p.arc_length(), &p).unwrap();
        assert!(!are_comparable(&r1, &far, &p).unwrap());
        let near = make_rectangle(&g, 1.0 + p.arc_length() / 100.0, &p).unwrap();
        assert!(are_comparable(&r1, &near, &p).unwrap());
        assert!(are_comparable(&near, &r1, &p).unwrap());
        let other = DeltaRectangle::new(g, 1.0, 1e-3, 0.3).unwrap();
        assert_eq!(are_comparable(&r1, &other, &p), Err(TangenciaError::ScaleMismatch));
    }

    #[test]
    fn comparability_agrees_with_dense_sampling() {
        let p = params(1e-3, 0.25);
        let g = c(0.0, 0.0, 1.0);
        let r1 = make_rectangle(&g, 0.0, &p).unwrap();
        for k in 0..40 {
            let off = p.arc_length() * 0.3 * k as f64 / 39.0;
            let r2 = make_rectangle(&g, off, &p).unwrap();
            let tol = p.a0 * p.delta;
            let dense = |a: &DeltaRectangle, b: &DeltaRectangle| {
                a.samples_with(a.spine_steps() * 25).all(|q| b.distance_to_region(q) <= tol)
            };
            let oracle = dense(&r1, &r2) && dense(&r2, &r1);
            assert_eq!(are_comparable(&r1, &r2, &p).unwrap(), oracle, "offset {off}");
        }
    }

    #[test]
    fn region_distance_is_zero_inside() {
        let p = params(1e-3, 0.25);
        let r = make_rectangle(&c(0.2, -0.1, 0.8), 2.0, &p).unwrap();
        for q in r.samples() {
            assert!(r.distance_to_region(q) < 1e-12);
        }
    }
}

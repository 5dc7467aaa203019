//! Circles as points of ℝ³, the light-cone shell of a circle, and
//! bipartite-pair construction and validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TangenciaError};
use crate::geometry::{d_metric, Circle};
use crate::params::ParamSet;
use crate::tangency::BipartitePair;

pub type Point3 = [f64; 3];

/// `(x, y, r)`.
#[inline]
pub fn lift_circle(g: &Circle) -> Point3 {
    [g.x(), g.y(), g.radius()]
}

/// Distance-like gap `||r_apex - z| - |x_apex - (x, y)||` from `p` to the
/// right-angled light cone of `apex`; zero exactly on the cone.
#[inline]
pub fn cone_gap(apex: &Circle, p: Point3) -> f64 {
    let planar = (apex.x() - p[0]).hypot(apex.y() - p[1]);
    ((apex.radius() - p[2]).abs() - planar).abs()
}

/// The `width * delta` neighborhood of the light cone of `apex`, with the
/// `exclusion * delta` ball about the apex removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeShell {
    pub apex: Circle,
    pub width: f64,
    pub exclusion: f64,
}

impl ConeShell {
    pub fn new(apex: Circle, params: &ParamSet) -> Self {
        ConeShell {
            apex,
            width: params.shell_width,
            exclusion: params.exclusion,
        }
    }

    pub fn contains(&self, g: &Circle, delta: f64) -> Result<bool> {
        let d = d_metric(&self.apex, g);
        let limit = self.exclusion * delta;
        if d <= limit {
            return Err(TangenciaError::InsideExclusion { d, limit });
        }
        Ok(cone_gap(&self.apex, lift_circle(g)) <= self.width * delta)
    }
}

/// Membership of `g` in the cone shell of `apex` at the default shell width.
pub fn in_cone_shell(apex: &Circle, g: &Circle, params: &ParamSet) -> Result<bool> {
    ConeShell::new(*apex, params).contains(g, params.delta)
}

/// Axis-aligned box in lifted space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb3 {
    pub lo: Point3,
    pub hi: Point3,
}

impl Aabb3 {
    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Point3>) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = *it.next()?;
        let mut b = Aabb3 { lo: first, hi: first };
        for p in it {
            for k in 0..3 {
                b.lo[k] = b.lo[k].min(p[k]);
                b.hi[k] = b.hi[k].max(p[k]);
            }
        }
        Some(b)
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0..3).all(|k| p[k] >= self.lo[k] && p[k] <= self.hi[k])
    }
}

/// How a cone shell meets a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellRelation {
    Disjoint,
    Crossing,
    Contained,
}

/// Exact relation between the shell `{p : cone_gap(apex, p) <= half_width}`
/// and a box.
///
/// The signed gap `|r - z| - |x - y|` separates into a function of `z` and one
/// of `(x, y)`, so its range over the box is an interval computed from the
/// two independent ranges.
pub fn shell_box_relation(apex: &Circle, b: &Aabb3, half_width: f64) -> ShellRelation {
    let r = apex.radius();
    let (z0, z1) = (b.lo[2], b.hi[2]);
    let vmax = (r - z0).abs().max((r - z1).abs());
    let vmin = if r >= z0 && r <= z1 { 0.0 } else { (r - z0).abs().min((r - z1).abs()) };
    let (cx, cy) = (apex.x(), apex.y());
    let nx = cx.clamp(b.lo[0], b.hi[0]);
    let ny = cy.clamp(b.lo[1], b.hi[1]);
    let pmin = (cx - nx).hypot(cy - ny);
    let fx = if (cx - b.lo[0]).abs() > (cx - b.hi[0]).abs() { b.lo[0] } else { b.hi[0] };
    let fy = if (cy - b.lo[1]).abs() > (cy - b.hi[1]).abs() { b.lo[1] } else { b.hi[1] };
    let pmax = (cx - fx).hypot(cy - fy);
    let (hlo, hhi) = (vmin - pmax, vmax - pmin);
    if hlo > half_width || hhi < -half_width {
        ShellRelation::Disjoint
    } else if hlo >= -half_width && hhi <= half_width {
        ShellRelation::Contained
    } else {
        ShellRelation::Crossing
    }
}

/// Checks the three bipartite clauses and the scale preconditions.
pub fn validate_pair(pair: &BipartitePair) -> Result<()> {
    let p = &pair.params;
    p.validate()?;
    let bad = |m: String| Err(TangenciaError::InvalidPair(m));
    let mut radii: Vec<f64> = pair
        .white
        .iter()
        .chain(pair.black.iter())
        .map(|g| g.radius())
        .collect();
    radii.sort_by(f64::total_cmp);
    if let Some(w) = radii.windows(2).find(|w| w[1] - w[0] < p.delta) {
        return bad(format!("radii {} and {} are not delta-separated", w[0], w[1]));
    }
    for (i, w) in pair.white.iter().enumerate() {
        for b in &pair.black {
            let d = d_metric(w, b);
            if !(d > p.t && d < 2.0 * p.t) {
                return bad(format!("cross distance {d} outside (t, 2t) for white {i}"));
            }
        }
    }
    for (name, fam) in [("white", &pair.white), ("black", &pair.black)] {
        for i in 0..fam.len() {
            for j in (i + 1)..fam.len() {
                let d = d_metric(&fam[i], &fam[j]);
                if !(d > 0.0 && d < p.t) {
                    return bad(format!("{name} distance {d} outside (0, t) for {i}, {j}"));
                }
            }
        }
    }
    Ok(())
}

/// Splits `circles` into a valid bipartite pair.
///
/// The first circle seeds the white side; the rest are visited in a
/// seed-determined order and each joins the first side it is compatible
/// with (white, then black) or is dropped.
pub fn build_bipartite_pair(circles: &[Circle], params: &ParamSet, seed: u64) -> Result<BipartitePair> {
    params.validate()?;
    if !(params.t > params.separation_const * params.delta) {
        return Err(TangenciaError::InvalidParams(format!(
            "need t > {} * delta",
            params.separation_const
        )));
    }
    let Some((first, rest)) = circles.split_first() else {
        return Err(TangenciaError::InfeasiblePair("no circles".into()));
    };
    let mut order: Vec<usize> = (0..rest.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (delta, t) = (params.delta, params.t);

    let mut white = vec![*first];
    let mut black: Vec<Circle> = Vec::new();
    for i in order {
        let g = rest[i];
        let separated = white
            .iter()
            .chain(black.iter())
            .all(|h| (h.radius() - g.radius()).abs() >= delta);
        if !separated {
            continue;
        }
        let near = |fam: &[Circle]| fam.iter().all(|h| {
            let d = d_metric(h, &g);
            d > 0.0 && d < t
        });
        let far = |fam: &[Circle]| fam.iter().all(|h| {
            let d = d_metric(h, &g);
            d > t && d < 2.0 * t
        });
        if near(&white) && far(&black) {
            white.push(g);
        } else if near(&black) && far(&white) {
            black.push(g);
        }
    }
    if black.is_empty() {
        return Err(TangenciaError::InfeasiblePair(
            "no circle is compatible with the black side".into(),
        ));
    }
    let pair = BipartitePair::new(white, black, *params);
    validate_pair(&pair)?;
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::delta_metric;
    use rand::Rng;

    fn c(x: f64, y: f64, r: f64) -> Circle {
        Circle::new(x, y, r).unwrap()
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift_circle(&c(0.0, 0.0, 1.0)), [0.0, 0.0, 1.0]);
        assert_eq!(lift_circle(&c(0.3, -0.2, 0.8)), [0.3, -0.2, 0.8]);
        assert_ne!(lift_circle(&c(0.3, -0.2, 0.8)), lift_circle(&c(0.3, -0.2, 0.81)));
    }

    #[test]
    fn cone_gap_examples() {
        let apex = c(0.0, 0.0, 1.0);
        assert!(cone_gap(&apex, [0.1, 0.0, 0.9]).abs() < 1e-15);
        assert_eq!(cone_gap(&apex, [0.0, 0.0, 1.0]), 0.0);
        assert!((cone_gap(&apex, [0.5, 0.0, 0.75]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cone_gap_is_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let apex = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.0));
            let p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.0)];
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let (s, co) = th.sin_cos();
            let (dx, dy) = (p[0] - apex.x(), p[1] - apex.y());
            let q = [apex.x() + co * dx - s * dy, apex.y() + s * dx + co * dy, p[2]];
            assert!((cone_gap(&apex, p) - cone_gap(&apex, q)).abs() < 1e-12);
        }
    }

    #[test]
    fn shell_examples() {
        let p = ParamSet::with_scales(1e-3, 0.25).unwrap();
        let apex = c(0.0, 0.0, 0.7);
        // exactly internally tangent, far from the apex
        assert!(in_cone_shell(&apex, &c(0.1, 0.0, 0.6), &p).unwrap());
        // gap ten times the width
        let g = c(0.1, 0.0, 0.6 - 10.0 * p.shell_width * p.delta);
        assert!(!in_cone_shell(&apex, &g, &p).unwrap());
        assert!(matches!(
            in_cone_shell(&apex, &c(0.0, 0.0, 0.705), &p),
            Err(TangenciaError::InsideExclusion { .. })
        ));
    }

    #[test]
    fn shell_agrees_with_tangency_distance() {
        let p = ParamSet::with_scales(1e-3, 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20_000 {
            let apex = c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), rng.gen_range(0.5..1.0));
            let g = c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), rng.gen_range(0.5..1.0));
            if d_metric(&apex, &g) <= p.exclusion * p.delta {
                continue;
            }
            let d = delta_metric(&apex, &g, None).unwrap();
            let inside = in_cone_shell(&apex, &g, &p).unwrap();
            if d < p.delta {
                assert!(inside);
            }
            if inside {
                assert!(d <= 100.0 * p.delta);
            }
        }
    }

    #[test]
    fn box_relation_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..300 {
            let apex = c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(0.5..1.0));
            let lo = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(0.4..1.0)];
            let hi = [lo[0] + rng.gen_range(0.0..0.1), lo[1] + rng.gen_range(0.0..0.1), lo[2] + rng.gen_range(0.0..0.1)];
            let b = Aabb3 { lo, hi };
            let w = 0.01;
            let rel = shell_box_relation(&apex, &b, w);
            let mut any_in = false;
            let mut all_in = true;
            for _ in 0..2000 {
                let q = [
                    rng.gen_range(lo[0]..=hi[0]),
                    rng.gen_range(lo[1]..=hi[1]),
                    rng.gen_range(lo[2]..=hi[2]),
                ];
                let inside = cone_gap(&apex, q) <= w;
                any_in |= inside;
                all_in &= inside;
            }
            if any_in {
                assert_ne!(rel, ShellRelation::Disjoint);
            }
            if rel == ShellRelation::Contained {
                assert!(all_in);
            }
            if !all_in {
                assert_ne!(rel, ShellRelation::Contained);
            }
        }
    }

    #[test]
    fn two_circle_pair() {
        let p = ParamSet::with_scales(1e-3, 0.25).unwrap();
        let a = c(0.0, 0.0, 0.6);
        let b = c(0.2, 0.0, 0.75);
        let pair = build_bipartite_pair(&[a, b], &p, 0).unwrap();
        assert_eq!(pair.white, vec![a]);
        assert_eq!(pair.black, vec![b]);
    }

    #[test]
    fn unseparated_radii_are_infeasible() {
        let p = ParamSet::with_scales(1e-3, 0.25).unwrap();
        let cs: Vec<Circle> = (0..5).map(|i| c(0.1 * i as f64, 0.0, 0.6)).collect();
        assert!(matches!(
            build_bipartite_pair(&cs, &p, 1),
            Err(TangenciaError::InfeasiblePair(_))
        ));
    }

    #[test]
    fn built_pairs_validate() {
        let p = ParamSet::with_scales(1e-3, 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cs: Vec<Circle> = (0..200)
            .map(|_| c(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(0.5..0.9)))
            .collect();
        let pair = build_bipartite_pair(&cs, &p, 3).unwrap();
        validate_pair(&pair).unwrap();
        assert!(pair.m() >= 1 && pair.n() >= 1);
    }
}

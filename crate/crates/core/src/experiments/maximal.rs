use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Result, TangenciaError};

/// Test functions for the circular maximal operator: indicators of small
/// sets centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Disc of radius delta.
    Ball,
    /// `sqrt(delta)` long (along x) and `delta` tall.
    Rectangle,
}

impl Shape {
    pub fn as_str(&self) -> &'static str {
        match self {
            Shape::Ball => "ball",
            Shape::Rectangle => "rectangle",
        }
    }
}

impl FromStr for Shape {
    type Err = TangenciaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(Shape::Ball),
            "rectangle" => Ok(Shape::Rectangle),
            _ => Err(TangenciaError::InvalidParams(format!("unknown shape {s:?}"))),
        }
    }
}

/// Midpoint quadrature nodes of the shape at spacing `h`; each carries
/// weight `h^2`.
fn shape_nodes(shape: Shape, delta: f64, h: f64) -> Vec<[f64; 2]> {
    let (hx, hy) = match shape {
        Shape::Ball => (delta, delta),
        Shape::Rectangle => (0.5 * delta.sqrt(), 0.5 * delta),
    };
    let nx = (2.0 * hx / h).ceil() as usize;
    let ny = (2.0 * hy / h).ceil() as usize;
    let (sx, sy) = (2.0 * hx / nx as f64, 2.0 * hy / ny as f64);
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let p = [-hx + (i as f64 + 0.5) * sx, -hy + (j as f64 + 0.5) * sy];
            if shape == Shape::Rectangle || p[0].hypot(p[1]) <= delta {
                out.push(p);
            }
        }
    }
    out
}

struct Evaluator {
    nodes: Vec<[f64; 2]>,
    weight: f64,
    delta: f64,
    /// Largest distance from the origin to a node.
    extent: f64,
}

impl Evaluator {
    fn new(shape: Shape, delta: f64, h: f64) -> Self {
        let nodes = shape_nodes(shape, delta, h);
        let (hx, hy) = match shape {
            Shape::Ball => (delta, delta),
            Shape::Rectangle => (0.5 * delta.sqrt(), 0.5 * delta),
        };
        let (nx, ny) = ((2.0 * hx / h).ceil(), (2.0 * hy / h).ceil());
        let weight = (2.0 * hx / nx) * (2.0 * hy / ny);
        let extent = nodes.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        Evaluator {
            nodes,
            weight,
            delta,
            extent,
        }
    }

    fn norm(&self, p: f64) -> f64 {
        (self.nodes.len() as f64 * self.weight).powf(1.0 / p)
    }

    /// Average of the indicator over the annulus `| |y - c| - r | < delta`
    /// with center `c = rho (cos phi, sin phi)`.
    fn average(&self, r: f64, rho: f64, phi: f64) -> f64 {
        let c = [rho * phi.cos(), rho * phi.sin()];
        let hits = self
            .nodes
            .iter()
            .filter(|q| ((q[0] - c[0]).hypot(q[1] - c[1]) - r).abs() < self.delta)
            .count();
        hits as f64 * self.weight / (4.0 * PI * r * self.delta)
    }

    /// Supremum over centers for one radius. Both shapes are symmetric in
    /// each axis, so centers are searched in the first quadrant only.
    fn sup(&self, r: f64) -> f64 {
        let d = self.delta;
        let (rho_lo, rho_hi) = ((r - self.extent - d).max(0.0), r + self.extent + d);
        let dphi = d.sqrt() / 4.0;
        let drho = d / 2.0;
        let nphi = (FRAC_PI_2 / dphi).ceil() as usize;
        let nrho = ((rho_hi - rho_lo) / drho).ceil() as usize;
        let mut coarse: Vec<(f64, f64, f64)> = Vec::with_capacity((nphi + 1) * (nrho + 1));
        for i in 0..=nphi {
            let phi = (i as f64 * dphi).min(FRAC_PI_2);
            for k in 0..=nrho {
                let rho = rho_lo + k as f64 * drho;
                coarse.push((self.average(r, rho, phi), rho, phi));
            }
        }
        coarse.sort_by(|a, b| b.0.total_cmp(&a.0));
        coarse
            .iter()
            .take(4)
            .map(|&(v, rho, phi)| self.refine(r, v, rho, phi, drho, dphi))
            .fold(0.0, f64::max)
    }

    /// Pattern search with steps halving down to a quarter delta (the angle
    /// step measured as arc length at radius `r`).
    fn refine(&self, r: f64, mut best: f64, mut rho: f64, mut phi: f64, mut drho: f64, mut dphi: f64) -> f64 {
        let floor = self.delta / 4.0;
        loop {
            let mut moved = false;
            for (sr, sp) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0)] {
                let (nr, np) = (rho + sr * drho, phi + sp * dphi);
                if nr < 0.0 {
                    continue;
                }
                let v = self.average(r, nr, np);
                if v > best {
                    best = v;
                    rho = nr;
                    phi = np;
                    moved = true;
                }
            }
            if !moved {
                if drho <= floor && dphi * r <= floor {
                    return best;
                }
                drho = (drho / 2.0).max(floor);
                dphi = (dphi / 2.0).max(floor / r);
            }
        }
    }

    /// Supremum by exhaustive search over a square grid of centers at
    /// spacing `step`.
    fn sup_exhaustive(&self, r: f64, step: f64) -> f64 {
        let reach = r + self.extent + self.delta;
        let n = (reach / step).ceil() as i64;
        let mut best = 0.0f64;
        for i in 0..=n {
            for j in 0..=n {
                let c = [i as f64 * step, j as f64 * step];
                let rho = c[0].hypot(c[1]);
                if (rho - r).abs() > self.extent + self.delta {
                    continue;
                }
                best = best.max(self.average(r, rho, c[1].atan2(c[0])));
            }
        }
        best
    }
}

fn check(delta: f64, p: f64, grid_step: f64) -> Result<()> {
    if !(1.0 / 512.0 - 1e-15..=1.0 / 16.0 + 1e-15).contains(&delta) {
        return Err(TangenciaError::InvalidParams(format!("delta {delta} outside [1/512, 1/16]")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(TangenciaError::InvalidParams(format!("p = {p} must exceed 1")));
    }
    if !(grid_step > 0.0 && grid_step <= delta) {
        return Err(TangenciaError::InvalidParams(format!("grid step {grid_step} must lie in (0, delta]")));
    }
    Ok(())
}

/// Lp norm over `[1/2, 1]` by the trapezoid rule on the radius grid.
fn lp_norm(values: &[f64], radii: &[f64], p: f64) -> f64 {
    let mut acc = 0.0;
    for k in 1..values.len() {
        let h = radii[k] - radii[k - 1];
        acc += 0.5 * h * (values[k].powf(p) + values[k - 1].powf(p));
    }
    acc.powf(1.0 / p)
}

fn radius_grid(delta: f64) -> Vec<f64> {
    let n = (0.5 / delta).round().max(1.0) as usize;
    (0..=n).map(|k| 0.5 + 0.5 * k as f64 / n as f64).collect()
}

/// `||M f||_p / ||f||_p` for the indicator `f` of `shape`, where `M` takes
/// the supremum over centers of the average over the delta-annulus of radius
/// `r`, and the outer norm is over `r` in `[1/2, 1]` sampled at step delta.
/// Shape integrals use midpoint quadrature at spacing `grid_step`.
pub fn eval_maximal_ratio(shape: Shape, delta: f64, p: f64, grid_step: f64) -> Result<f64> {
    check(delta, p, grid_step)?;
    let ev = Evaluator::new(shape, delta, grid_step);
    let radii = radius_grid(delta);
    let values: Vec<f64> = radii.par_iter().map(|&r| ev.sup(r)).collect();
    Ok(lp_norm(&values, &radii, p) / ev.norm(p))
}

/// Same ratio with the center supremum taken over a full grid at spacing
/// `center_step`. Slow; used to validate the adaptive search.
pub fn eval_maximal_ratio_exhaustive(shape: Shape, delta: f64, p: f64, grid_step: f64, center_step: f64) -> Result<f64> {
    check(delta, p, grid_step)?;
    let ev = Evaluator::new(shape, delta, grid_step);
    let radii = radius_grid(delta);
    let values: Vec<f64> = radii.par_iter().map(|&r| ev.sup_exhaustive(r, center_step)).collect();
    Ok(lp_norm(&values, &radii, p) / ev.norm(p))
}

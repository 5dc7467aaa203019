//! Polynomial partitioning of lifted point sets.
//!
//! A partition is built by iterated halving: each step picks one polynomial
//! that simultaneously bisects every current part, so after `r` steps the
//! sign vectors of the `r` factors index at most `2^r` open cells. Points on
//! the zero set of any factor go to a separate bucket.

mod bisect;
mod poly;

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use bisect::{bisecting_poly, bisecting_poly_with, side_counts, side_limit, BisectOptions};
pub use poly::{monomial_count, monomials, veronese, MultiPoly};

use crate::error::{Result, TangenciaError};
use crate::geometry::Circle;
use crate::lifting::{Aabb3, Point3};
use crate::params::ParamSet;

/// Relative threshold below which a polynomial value counts as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Largest supported number of halving steps.
pub const MAX_STEPS: usize = 12;

pub type SignVector = Vec<i8>;

/// Sign of `poly` at `p` with the relative zero tolerance applied.
pub fn sign_of(poly: &MultiPoly, p: &Point3) -> i8 {
    let v = poly.eval(p);
    if v.abs() <= ZERO_TOL * poly.magnitude(p) {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Per-axis affine map from a bounding box onto `[-1, 1]^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    pub bounds: Aabb3,
    center: Point3,
    half: Point3,
}

impl Normalizer {
    pub fn identity() -> Self {
        Normalizer::from_bounds(Aabb3 {
            lo: [-1.0; 3],
            hi: [1.0; 3],
        })
    }

    pub fn from_bounds(bounds: Aabb3) -> Self {
        let mut center = [0.0; 3];
        let mut half = [1.0; 3];
        for k in 0..3 {
            center[k] = 0.5 * (bounds.lo[k] + bounds.hi[k]);
            let h = 0.5 * (bounds.hi[k] - bounds.lo[k]);
            if h > 1e-300 {
                half[k] = h;
            }
        }
        Normalizer { bounds, center, half }
    }

    /// Fits the bounding box of `points`, or the unit box when empty.
    pub fn fit(points: &[Point3]) -> Self {
        Aabb3::of_points(points).map_or_else(Normalizer::identity, Normalizer::from_bounds)
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        [
            (p[0] - self.center[0]) / self.half[0],
            (p[1] - self.center[1]) / self.half[1],
            (p[2] - self.center[2]) / self.half[2],
        ]
    }
}

/// Sign-condition cells of an ordered list of factor polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct SignCellPartition {
    polys: Vec<MultiPoly>,
    normalizer: Normalizer,
    cells: BTreeMap<SignVector, Vec<usize>>,
    zero_set: Vec<usize>,
    point_count: usize,
}

impl SignCellPartition {
    /// A partition with the given factors (in normalized coordinates) and no
    /// points assigned.
    pub fn from_polys(polys: Vec<MultiPoly>, normalizer: Normalizer) -> Self {
        SignCellPartition {
            polys,
            normalizer,
            cells: BTreeMap::new(),
            zero_set: Vec::new(),
            point_count: 0,
        }
    }

    /// Assigns `points` to cells and the zero-set bucket.
    pub fn assign(mut self, points: &[Point3]) -> Self {
        self.cells.clear();
        self.zero_set.clear();
        for (i, p) in points.iter().enumerate() {
            let sv = self.cell_of(p);
            if sv.contains(&0) {
                self.zero_set.push(i);
            } else {
                self.cells.entry(sv).or_default().push(i);
            }
        }
        self.point_count = points.len();
        self
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn r(&self) -> usize {
        self.polys.len()
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    /// Open cells with their point indices; only nonempty cells are stored.
    pub fn cells(&self) -> &BTreeMap<SignVector, Vec<usize>> {
        &self.cells
    }

    pub fn zero_set(&self) -> &[usize] {
        &self.zero_set
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn total_degree(&self) -> usize {
        self.polys.iter().map(MultiPoly::degree).sum()
    }

    pub fn max_cell_size(&self) -> usize {
        self.cells.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Sign vector of a point given in original coordinates.
    pub fn cell_of(&self, p: &Point3) -> SignVector {
        let q = self.normalizer.apply(p);
        self.polys.iter().map(|f| sign_of(f, &q)).collect()
    }

    /// Factor dump: a `#` line with the normalization, then for each factor
    /// a `degree d` line followed by `i j k coeff` lines.
    pub fn write_polys<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let b = &self.normalizer.bounds;
        writeln!(
            out,
            "# normalized from box lo {} {} {} hi {} {} {}",
            b.lo[0], b.lo[1], b.lo[2], b.hi[0], b.hi[1], b.hi[2]
        )?;
        for f in &self.polys {
            writeln!(out, "degree {}", f.degree())?;
            for (e, c) in f.terms() {
                writeln!(out, "{} {} {} {:e}", e[0], e[1], e[2], c)?;
            }
        }
        Ok(())
    }

    /// Cell table as CSV `signvector,count`. Zero-set points are grouped by
    /// their full sign vector when `points` is given.
    pub fn write_cells<W: Write>(&self, mut out: W, points: Option<&[Point3]>) -> std::io::Result<()> {
        writeln!(out, "signvector,count")?;
        let mut rows: BTreeMap<String, usize> = self
            .cells
            .iter()
            .map(|(sv, idx)| (sign_string(sv), idx.len()))
            .collect();
        if let Some(pts) = points {
            for &i in &self.zero_set {
                *rows.entry(sign_string(&self.cell_of(&pts[i]))).or_default() += 1;
            }
        }
        for (sv, n) in rows {
            writeln!(out, "{sv},{n}")?;
        }
        Ok(())
    }
}

pub fn sign_string(sv: &[i8]) -> String {
    if sv.is_empty() {
        return "()".into();
    }
    sv.iter()
        .map(|&s| match s {
            1 => '+',
            -1 => '-',
            _ => '0',
        })
        .collect()
}

/// Adds independent uniform noise in `[-rho, rho]` to every coordinate.
pub fn perturb_generic(points: &[Point3], rho: f64, seed: u64) -> Vec<Point3> {
    if !(rho > 0.0) {
        return points.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    points
        .iter()
        .map(|p| {
            [
                p[0] + rng.gen_range(-rho..=rho),
                p[1] + rng.gen_range(-rho..=rho),
                p[2] + rng.gen_range(-rho..=rho),
            ]
        })
        .collect()
}

/// Settings for [`build_partition`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionConfig {
    pub tol: f64,
    pub slack: f64,
    pub seed: u64,
    pub restarts: usize,
    /// How far above the minimal degree a step may go before giving up.
    pub extra_degree: usize,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            tol: 0.05,
            slack: 2.0,
            seed: 0,
            restarts: 8,
            extra_degree: 2,
        }
    }
}

impl PartitionConfig {
    pub fn from_params(params: &ParamSet, seed: u64) -> Self {
        PartitionConfig {
            slack: params.slack,
            seed,
            ..PartitionConfig::default()
        }
    }
}

/// Smallest degree whose monomial space exceeds `sets` by at least one.
pub fn minimal_degree(sets: usize) -> usize {
    (1..).find(|&d| monomial_count(d) > sets).unwrap_or(1)
}

/// Total degree a build with `steps` halvings uses when every step takes its
/// minimal degree for `2^(j-1)` parts.
pub fn predicted_total_degree(steps: usize) -> usize {
    (1..=steps).map(|j| minimal_degree(1 << (j - 1))).sum()
}

/// Iterated-halving partition into at most `target_cells` open cells.
///
/// Each step tries degrees from the minimal one up to `extra_degree` above
/// it; if none bisects within `tol`, the tolerance is doubled and the degrees
/// are tried again. The final cell bound `slack * m / 2^r` is checked
/// directly.
pub fn build_partition(points: &[Point3], target_cells: usize, cfg: &PartitionConfig) -> Result<SignCellPartition> {
    if !target_cells.is_power_of_two() {
        return Err(TangenciaError::InvalidParams(format!("{target_cells} cells is not a power of two")));
    }
    let steps = target_cells.trailing_zeros() as usize;
    build_with(points, steps, None, cfg)
}

/// Like [`build_partition`] but with a prescribed degree for each step.
pub fn build_partition_with_degrees(
    points: &[Point3],
    degrees: &[usize],
    cfg: &PartitionConfig,
) -> Result<SignCellPartition> {
    build_with(points, degrees.len(), Some(degrees), cfg)
}

fn build_with(
    points: &[Point3],
    steps: usize,
    degrees: Option<&[usize]>,
    cfg: &PartitionConfig,
) -> Result<SignCellPartition> {
    if steps > MAX_STEPS {
        return Err(TangenciaError::InvalidParams(format!("{steps} halving steps exceed {MAX_STEPS}")));
    }
    let normalizer = Normalizer::fit(points);
    let normed: Vec<Point3> = points.iter().map(|p| normalizer.apply(p)).collect();
    let mut parts: Vec<Vec<usize>> = if points.is_empty() { vec![] } else { vec![(0..points.len()).collect()] };
    let mut zero = Vec::new();
    let mut polys = Vec::with_capacity(steps);
    let bound = (cfg.slack * points.len() as f64 / (1u64 << steps) as f64).max(1.0);
    for j in 0..steps {
        // Widening tol never lets a part outgrow what exact halving in the
        // remaining steps could still bring under the final bound.
        let cap = (bound.floor() as usize).saturating_mul(1 << (steps - j - 1));
        let sets: Vec<Vec<Point3>> = parts
            .iter()
            .map(|idx| idx.iter().map(|&i| normed[i]).collect())
            .collect();
        let live = sets.iter().filter(|s| s.len() >= 2).count();
        let (lo, hi) = match degrees {
            Some(d) => (d[j], d[j]),
            None => {
                let d = minimal_degree(live);
                (d, d + cfg.extra_degree)
            }
        };
        let mut found = None;
        let mut last_err = None;
        let mut tol = cfg.tol;
        'search: while tol < 0.5 {
            for d in lo..=hi {
                let opts = BisectOptions {
                    tol,
                    max_side: Some(cap),
                    restarts: cfg.restarts,
                    iterations: BisectOptions::default().iterations,
                    seed: cfg.seed.wrapping_add((j as u64) << 32).wrapping_add(d as u64),
                };
                let res = bisecting_poly_with(&sets, d, &opts);
                match res {
                    Ok(p) => {
                        found = Some(p);
                        break 'search;
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            tol *= 2.0;
        }
        let poly = found.ok_or_else(|| last_err.unwrap_or_else(|| TangenciaError::BisectionFailed("no degree tried".into())))?;
        let mut next = Vec::with_capacity(parts.len() * 2);
        for part in parts {
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for i in part {
                match sign_of(&poly, &normed[i]) {
                    1 => pos.push(i),
                    -1 => neg.push(i),
                    _ => zero.push(i),
                }
            }
            next.extend([pos, neg].into_iter().filter(|v| !v.is_empty()));
        }
        parts = next;
        polys.push(poly);
    }
    let partition = SignCellPartition::from_polys(polys, normalizer).assign(points);
    if partition.max_cell_size() as f64 > bound {
        return Err(TangenciaError::BisectionFailed(format!(
            "largest cell {} exceeds {bound}",
            partition.max_cell_size()
        )));
    }
    Ok(partition)
}

/// Number of distinct nonzero sign vectors met by the light cone of `apex`
/// inside the partition's bounding box.
///
/// Both nappes `z = r_apex +- |x_apex - y|` are sampled on a sunflower
/// pattern in the plane around the apex center, with sample counts
/// proportional to each nappe's area; samples within the exclusion radius
/// `A * delta` of the apex are skipped.
pub fn cells_crossing_surface(
    partition: &SignCellPartition,
    apex: &Circle,
    params: &ParamSet,
    samples: usize,
) -> usize {
    let mut seen = std::collections::BTreeSet::new();
    for_cone_samples(partition, apex, params, samples, |sv| {
        if !sv.contains(&0) {
            seen.insert(sv);
        }
    });
    seen.len()
}

fn for_cone_samples(
    partition: &SignCellPartition,
    apex: &Circle,
    params: &ParamSet,
    samples: usize,
    mut visit: impl FnMut(SignVector),
) {
    let b = &partition.normalizer().bounds;
    let r0 = apex.radius();
    let reach = [(b.hi[2] - r0).max(0.0), (r0 - b.lo[2]).max(0.0)];
    let area: f64 = reach.iter().map(|r| r * r).sum();
    if area <= 0.0 {
        return;
    }
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let skip = params.exclusion * params.delta;
    for (nappe, &reach) in reach.iter().enumerate() {
        let count = ((samples as f64) * reach * reach / area).round() as usize;
        let sign = if nappe == 0 { 1.0 } else { -1.0 };
        for k in 0..count {
            let rho = reach * ((k as f64 + 0.5) / count as f64).sqrt();
            if rho < skip {
                continue;
            }
            let phi = golden * k as f64;
            let p = [apex.x() + rho * phi.cos(), apex.y() + rho * phi.sin(), r0 + sign * rho];
            if !b.contains(p) {
                continue;
            }
            visit(partition.cell_of(&p));
        }
    }
}

#[cfg(test)]
mod tests;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::poly::{monomial_count, veronese_into, MultiPoly};
use super::{sign_of, ZERO_TOL};
use crate::error::{Result, TangenciaError};
use crate::lifting::Point3;

/// Search settings for [`bisecting_poly_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectOptions {
    pub tol: f64,
    /// Optional hard cap on either open side, applied on top of `tol` but
    /// never below half of a set rounded up.
    pub max_side: Option<usize>,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for BisectOptions {
    fn default() -> Self {
        BisectOptions {
            tol: 0.05,
            max_side: None,
            restarts: 8,
            iterations: 80,
            seed: 0,
        }
    }
}

/// Largest count allowed on one open side of a set of `n` points.
pub fn side_limit(n: usize, tol: f64) -> usize {
    n.div_ceil(2).max(((0.5 + tol) * n as f64).floor() as usize)
}

/// Positive and negative counts of `poly` over each set.
pub fn side_counts(poly: &MultiPoly, sets: &[Vec<Point3>]) -> Vec<(usize, usize)> {
    sets.iter()
        .map(|s| {
            s.iter().fold((0, 0), |(p, n), x| match sign_of(poly, x) {
                1 => (p + 1, n),
                -1 => (p, n + 1),
                _ => (p, n),
            })
        })
        .collect()
}

/// A polynomial of degree at most `degree` splitting every set so that each
/// open side holds at most `(1/2 + tol)|S|` of its points (or half rounded
/// up, when that is larger). Points are expected in a box of unit scale.
pub fn bisecting_poly(sets: &[Vec<Point3>], degree: usize, tol: f64) -> Result<MultiPoly> {
    bisecting_poly_with(
        sets,
        degree,
        &BisectOptions {
            tol,
            ..BisectOptions::default()
        },
    )
}

/// [`bisecting_poly`] with explicit search settings.
///
/// Works in the Veronese coordinates of the points. A first phase takes
/// minimum-norm Newton steps on the piecewise linear equations "median of P
/// over each set is zero". If that stalls, the sign balance of each set is
/// smoothed to the mean of `tanh(P / sigma)` and driven to zero by damped
/// Gauss-Newton steps while `sigma` shrinks. Restarts
/// use independent seeded starting coefficients; the first restart (in index
/// order) whose split meets the tolerance wins.
pub fn bisecting_poly_with(sets: &[Vec<Point3>], degree: usize, opts: &BisectOptions) -> Result<MultiPoly> {
    if !(opts.tol > 0.0 && opts.tol < 1.0) {
        return Err(TangenciaError::InvalidParams(format!("tol {} outside (0, 1)", opts.tol)));
    }
    let live: Vec<&Vec<Point3>> = sets.iter().filter(|s| s.len() >= 2).collect();
    let dim = monomial_count(degree);
    if live.len() + 1 > dim {
        return Err(TangenciaError::InvalidParams(format!(
            "{} sets need degree with more than {} monomials",
            live.len(),
            dim
        )));
    }
    if live.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        return MultiPoly::new(degree, c);
    }
    let problem = Problem::new(&live, degree, opts);
    let batch = rayon::current_num_threads().clamp(1, 8);
    let starts: Vec<usize> = (0..opts.restarts.max(1)).collect();
    for chunk in starts.chunks(batch) {
        let runs: Vec<(usize, Vec<f64>)> = chunk.par_iter().map(|&k| problem.run(opts, k)).collect();
        for (score, c) in runs {
            if score == 0 {
                let poly = MultiPoly::new(degree, c)?;
                if problem.verify(&poly) {
                    return Ok(poly);
                }
            }
        }
    }
    Err(TangenciaError::BisectionFailed(format!(
        "{} sets at degree {degree}, tol {}",
        live.len(),
        opts.tol
    )))
}

struct Problem<'a> {
    sets: Vec<&'a Vec<Point3>>,
    /// Veronese rows of all points, set by set.
    v: DMatrix<f64>,
    abs_v: DMatrix<f64>,
    ranges: Vec<(usize, usize)>,
    /// Largest allowed open side per set.
    limits: Vec<usize>,
}

impl<'a> Problem<'a> {
    fn new(sets: &[&'a Vec<Point3>], degree: usize, opts: &BisectOptions) -> Self {
        let dim = monomial_count(degree);
        let total: usize = sets.iter().map(|s| s.len()).sum();
        let mut v = DMatrix::zeros(total, dim);
        let mut abs_v = DMatrix::zeros(total, dim);
        let mut ranges = Vec::with_capacity(sets.len());
        let mut row = 0;
        let mut buf = Vec::with_capacity(dim);
        for s in sets {
            let start = row;
            for p in s.iter() {
                veronese_into(p, degree, &mut buf);
                for (j, &m) in buf.iter().enumerate() {
                    v[(row, j)] = m;
                    abs_v[(row, j)] = m.abs();
                }
                row += 1;
            }
            ranges.push((start, row));
        }
        Problem {
            sets: sets.to_vec(),
            v,
            abs_v,
            limits: sets
                .iter()
                .map(|s| {
                    let cap = opts.max_side.unwrap_or(usize::MAX);
                    side_limit(s.len(), opts.tol).min(cap).max(s.len().div_ceil(2))
                })
                .collect(),
            ranges,
        }
    }

    /// Total excess over the allowed side sizes, using the matrix form of P.
    fn score(&self, c: &DVector<f64>) -> usize {
        let vals = &self.v * c;
        let mags = &self.abs_v * c.abs();
        self.ranges
            .iter()
            .zip(&self.limits)
            .map(|(&(a, b), &limit)| {
                let (mut pos, mut neg) = (0usize, 0usize);
                for i in a..b {
                    if vals[i].abs() > ZERO_TOL * mags[i] {
                        if vals[i] > 0.0 {
                            pos += 1;
                        } else {
                            neg += 1;
                        }
                    }
                }
                pos.max(neg).saturating_sub(limit)
            })
            .sum()
    }

    /// Robust spread of P over each set: mean absolute deviation from the
    /// set median.
    fn spreads(&self, vals: &DVector<f64>) -> Vec<f64> {
        let mut buf = Vec::new();
        self.ranges
            .iter()
            .map(|&(a, b)| {
                buf.clear();
                buf.extend((a..b).map(|i| vals[i]));
                buf.sort_by(f64::total_cmp);
                let med = 0.5 * (buf[(buf.len() - 1) / 2] + buf[buf.len() / 2]);
                let mad = buf.iter().map(|x| (x - med).abs()).sum::<f64>() / buf.len() as f64;
                mad.max(1e-300)
            })
            .collect()
    }

    fn residual(&self, vals: &DVector<f64>, sigma: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.ranges.len(),
            self.ranges.iter().zip(sigma).map(|(&(a, b), &sg)| {
                (a..b).map(|i| (vals[i] / sg).tanh()).sum::<f64>() / (b - a) as f64
            }),
        )
    }

    fn jacobian(&self, vals: &DVector<f64>, sigma: &[f64]) -> DMatrix<f64> {
        let dim = self.v.ncols();
        let mut j = DMatrix::zeros(self.ranges.len(), dim);
        for (s, (&(a, b), &sg)) in self.ranges.iter().zip(sigma).enumerate() {
            let inv = 1.0 / ((b - a) as f64 * sg);
            let w = DVector::from_iterator(
                b - a,
                (a..b).map(|i| {
                    let th = (vals[i] / sg).tanh();
                    (1.0 - th * th) * inv
                }),
            );
            let row = self.v.rows(a, b - a).tr_mul(&w);
            j.row_mut(s).copy_from(&row.transpose());
        }
        j
    }

    /// Per-set midpoint of the two middle values (the median for odd sets)
    /// and the matching Jacobian rows.
    fn medians(&self, vals: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let dim = self.v.ncols();
        let mut med = DVector::zeros(self.ranges.len());
        let mut jac = DMatrix::zeros(self.ranges.len(), dim);
        let mut order: Vec<usize> = Vec::new();
        for (s, &(a, b)) in self.ranges.iter().enumerate() {
            order.clear();
            order.extend(a..b);
            order.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));
            let n = b - a;
            let (lo, hi) = (order[(n - 1) / 2], order[n / 2]);
            med[s] = 0.5 * (vals[lo] + vals[hi]);
            let row = (self.v.row(lo) + self.v.row(hi)) * 0.5;
            jac.row_mut(s).copy_from(&row);
        }
        (med, jac)
    }

    /// Norm of the set medians, each measured against the set's spread.
    fn median_merit(&self, vals: &DVector<f64>) -> f64 {
        let (med, _) = self.medians(vals);
        let spread = self.spreads(vals);
        med.iter().zip(&spread).map(|(m, s)| (m / s).powi(2)).sum::<f64>().sqrt()
    }

    /// Newton iteration on the piecewise linear system "every set median is
    /// zero", with backtracking on the median residual.
    fn median_newton(&self, mut c: DVector<f64>, iters: usize) -> (usize, DVector<f64>) {
        let mut best = (self.score(&c), c.clone());
        for _ in 0..iters {
            if best.0 == 0 {
                break;
            }
            let vals = &self.v * &c;
            let (med, jac) = self.medians(&vals);
            let before = self.median_merit(&vals);
            let Some(step) = min_norm_step(&jac, &med) else {
                break;
            };
            let mut moved = false;
            for lambda in [1.0, 0.5, 0.25, 0.125, 0.0625] {
                let mut trial = &c + &step * lambda;
                let n = trial.norm();
                if n == 0.0 {
                    continue;
                }
                trial /= n;
                if self.median_merit(&(&self.v * &trial)) < before || lambda == 0.0625 {
                    c = trial;
                    moved = true;
                    break;
                }
            }
            if !moved {
                break;
            }
            let score = self.score(&c);
            if score < best.0 {
                best = (score, c.clone());
            }
        }
        best
    }

    /// Gauss-Newton on the tanh-smoothed sign balance. Sigma is a fraction of
    /// the rms value of P over all points, shrinking geometrically from 0.3
    /// to 0.003 of it.
    fn smoothed_newton(&self, mut c: DVector<f64>, iters: usize) -> (usize, DVector<f64>) {
        let (k0, k1) = (0.3f64, 0.003f64);
        let mut best = (self.score(&c), c.clone());
        let iters = iters.max(2);
        for it in 0..iters {
            if best.0 == 0 {
                break;
            }
            let frac = it as f64 / (iters - 1) as f64;
            let kappa = k0 * (k1 / k0).powf(frac);
            let vals = &self.v * &c;
            let rms = (vals.norm_squared() / vals.len() as f64).sqrt().max(1e-300);
            let sigma = vec![rms * kappa; self.ranges.len()];
            let f = self.residual(&vals, &sigma);
            let fnorm = f.norm();
            let jac = self.jacobian(&vals, &sigma);
            let Some(step) = min_norm_step(&jac, &f) else {
                break;
            };
            let mut next = None;
            for lambda in [1.0, 0.5, 0.25, 0.125] {
                let mut trial = &c + &step * lambda;
                let n = trial.norm();
                if n == 0.0 {
                    continue;
                }
                trial /= n;
                let tf = self.residual(&(&self.v * &trial), &sigma).norm();
                if tf < fnorm || lambda == 0.125 {
                    next = Some(trial);
                    break;
                }
            }
            let Some(next) = next else { break };
            c = next;
            let score = self.score(&c);
            if score < best.0 {
                best = (score, c.clone());
            }
        }
        best
    }

    fn run(&self, opts: &BisectOptions, restart: usize) -> (usize, Vec<f64>) {
        let dim = self.v.ncols();
        let seed = opts.seed ^ (restart as u64).wrapping_mul(0xA24B_AED4_963E_E407);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = DVector::from_iterator(dim, (0..dim).map(|_| rng.gen_range(-1.0..1.0)));
        c /= c.norm();
        let (score, c) = self.median_newton(c, opts.iterations);
        if score == 0 {
            return (0, c.as_slice().to_vec());
        }
        let (smooth_score, smooth_c) = self.smoothed_newton(c.clone(), opts.iterations);
        let best = if smooth_score <= score { (smooth_score, smooth_c) } else { (score, c) };
        (best.0, best.1.as_slice().to_vec())
    }

    /// Direct recount with Horner evaluation.
    fn verify(&self, poly: &MultiPoly) -> bool {
        self.sets.iter().zip(&self.limits).all(|(s, &limit)| {
            let (pos, neg) = side_counts(poly, std::slice::from_ref(*s))[0];
            pos.max(neg) <= limit
        })
    }
}

/// Damped minimum-norm solution of `J step = -f` through the normal
/// equations of `J J^T`.
fn min_norm_step(jac: &DMatrix<f64>, f: &DVector<f64>) -> Option<DVector<f64>> {
    let jjt = jac * jac.transpose();
    let scale = (0..jjt.nrows()).map(|i| jjt[(i, i)]).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    let mut damp = 1e-10 * scale;
    for _ in 0..6 {
        let mut m = jjt.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += damp;
        }
        if let Some(ch) = m.cholesky() {
            let y = ch.solve(&(-f));
            return Some(jac.transpose() * y);
        }
        damp *= 100.0;
    }
    None
}


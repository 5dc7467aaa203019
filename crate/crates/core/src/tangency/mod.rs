//! (δ,t)-rectangles, incidence and comparability, candidate generation,
//! incomparable-family extraction, type counting and cluster splitting.

mod rectangle;

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::{aligned_angle, delta_c, delta_metric_numeric, AngularWindow, Circle};
use crate::params::ParamSet;

pub use rectangle::{are_comparable, is_incident, make_rectangle, DeltaRectangle};

/// Two families of circles with their scale parameters.
///
/// Construction does not validate the bipartite clauses; see
/// [`crate::lifting::validate_pair`].
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePair {
    pub white: Vec<Circle>,
    pub black: Vec<Circle>,
    pub params: ParamSet,
}

impl BipartitePair {
    pub fn new(white: Vec<Circle>, black: Vec<Circle>, params: ParamSet) -> Self {
        BipartitePair {
            white,
            black,
            params,
        }
    }

    pub fn m(&self) -> usize {
        self.white.len()
    }

    pub fn n(&self) -> usize {
        self.black.len()
    }

    /// Same pair with the roles of the two sides exchanged.
    pub fn swapped(&self) -> Self {
        BipartitePair {
            white: self.black.clone(),
            black: self.white.clone(),
            params: self.params,
        }
    }

    pub fn with_params(&self, params: ParamSet) -> Self {
        BipartitePair {
            params,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BruteForce,
    Partitioned,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::BruteForce => "bruteforce",
            Method::Partitioned => "partitioned",
        }
    }
}

/// Per-category cell statistics collected by the partitioned counter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CellStats {
    pub cells_visited: usize,
    /// (cell, black circle) pairs where the cone shell crosses the cell box.
    pub crossing: usize,
    /// (cell, black circle) pairs where the cell box lies inside the shell.
    pub contained: usize,
    /// White points on the zero set of some partitioning factor.
    pub zero_set_points: usize,
    /// Subproblems that fell back to brute force after a partition failure.
    pub fallbacks: usize,
    pub max_depth: usize,
    /// Candidate pairs lost to pruning, when audited.
    pub pruning_violations: usize,
}

impl CellStats {
    pub fn merge(&mut self, o: &CellStats) {
        self.cells_visited += o.cells_visited;
        self.crossing += o.crossing;
        self.contained += o.contained;
        self.zero_set_points += o.zero_set_points;
        self.fallbacks += o.fallbacks;
        self.max_depth = self.max_depth.max(o.max_depth);
        self.pruning_violations += o.pruning_violations;
    }
}

/// Counts, witnesses and timing from a counting run.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceReport {
    pub rect_count: usize,
    pub witness: Vec<DeltaRectangle>,
    /// (white, black) incidence counts for each witness rectangle.
    pub witness_counts: Vec<(usize, usize)>,
    pub incidence_triples: u64,
    pub elapsed: Duration,
    pub method: Method,
    pub delta_evals: u64,
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    pub t: f64,
    pub stats: CellStats,
}

/// A near-tangent (white, black) index pair and the anchor angle on the white
/// circle where the tangency objective is smallest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentPair {
    pub white: usize,
    pub black: usize,
    pub anchor: f64,
    pub delta: f64,
}

fn windows(g1: &Circle, g2: &Circle, params: &ParamSet) -> Option<Option<(AngularWindow, AngularWindow)>> {
    if !params.alpha.is_finite() {
        return Some(None);
    }
    let w1 = AngularWindow::from_ball(g1, params.alpha).unwrap_or_else(AngularWindow::full);
    let w2 = AngularWindow::from_ball(g2, params.alpha).unwrap_or_else(AngularWindow::full);
    if w1.span <= 0.0 || w2.span <= 0.0 {
        return None;
    }
    Some(Some((w1, w2)))
}

/// Tangency distance and the anchor on `w` realizing it, or `None` when the
/// pair has no points in the observation ball.
pub fn tangency_point(w: &Circle, b: &Circle, params: &ParamSet) -> Result<Option<(f64, f64)>> {
    let Some(win) = windows(w, b, params) else {
        return Ok(None);
    };
    let th = aligned_angle(w, b);
    let exact = w.radius().min(b.radius()) <= 1.0
        && win.is_none_or(|(w1, w2)| w1.contains(th) && w2.contains(th));
    if exact {
        return Ok(Some((delta_c(w, b), th)));
    }
    let m = delta_metric_numeric(w, b, win)?;
    Ok(Some((m.value, m.theta1)))
}

/// Largest cone gap a crossing pair can have while some rectangle on the
/// white circle (radius `r`) is still incident to the black one.
///
/// Near a crossing the radial offset between the circles grows linearly along
/// the arc; keeping it within `(C1 - 1) delta` over the whole rectangle bounds
/// the crossing angle, and with the center distance at least `t / 2` that in
/// turn bounds the gap by `5 (C1 - 1)^2 r^2 delta`.
pub fn crossing_screen(params: &ParamSet, r: f64) -> f64 {
    5.0 * (params.c1 - 1.0).powi(2) * r * r * params.delta
}

/// Angles on `w` where it meets `b`, if the circles cross.
fn crossing_angles(w: &Circle, b: &Circle) -> Option<[f64; 2]> {
    let v = [b.x() - w.x(), b.y() - w.y()];
    let d = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let (rw, rb) = (w.radius(), b.radius());
    if d <= (rw - rb).abs() || d >= rw + rb {
        return None;
    }
    let cos = ((rw * rw + d * d - rb * rb) / (2.0 * rw * d)).clamp(-1.0, 1.0);
    let base = v[1].atan2(v[0]);
    let off = cos.acos();
    Some([base - off, base + off])
}

/// The anchor a pair contributes, if any: the tangency minimizer when the
/// distance is at most `C1 * delta`, otherwise the first crossing point whose
/// rectangle is incident to `b` (shallow crossings only).
fn pair_anchor(w: &Circle, b: &Circle, p: &ParamSet) -> Result<Option<(f64, f64)>> {
    let Some((d, anchor)) = tangency_point(w, b, p)? else {
        return Ok(None);
    };
    if d <= p.c1 * p.delta {
        return Ok(Some((anchor, d)));
    }
    if delta_c(w, b) > crossing_screen(p, w.radius()) {
        return Ok(None);
    }
    let Some(angles) = crossing_angles(w, b) else {
        return Ok(None);
    };
    let win = windows(w, b, p).flatten();
    let arc_angle = (p.delta / p.t).sqrt() / w.radius();
    for a in angles {
        let a = best_window_center(w, b, a, arc_angle).rem_euclid(std::f64::consts::TAU);
        if win.is_some_and(|(w1, _)| !w1.contains(a)) {
            continue;
        }
        if is_incident(b, &make_rectangle(w, a, p)?, p) {
            return Ok(Some((a, d)));
        }
    }
    Ok(None)
}

/// Anchor within one arc of `around` minimizing the largest radial offset of
/// `w`'s spine from `b` over the rectangle window.
fn best_window_center(w: &Circle, b: &Circle, around: f64, arc_angle: f64) -> f64 {
    let worst = |a: f64| {
        (-16..=16)
            .map(|k| w.point_at(a + arc_angle * k as f64 / 32.0))
            .map(|q| b.radial_gap(q))
            .fold(0.0, f64::max)
    };
    let scan = |center: f64, step: f64| {
        (-16..=16)
            .map(|k| center + step * k as f64)
            .map(|a| (worst(a), a))
            .min_by(|x, y| x.0.total_cmp(&y.0))
            .map_or(center, |(_, a)| a)
    };
    let coarse = scan(around, arc_angle / 16.0);
    scan(coarse, arc_angle / 256.0)
}

/// Near-tangent anchors among the given index sets. Performs exactly
/// `whites.len() * blacks.len()` pair evaluations.
pub fn near_tangent_pairs(pair: &BipartitePair, whites: &[usize], blacks: &[usize]) -> Result<Vec<TangentPair>> {
    let p = &pair.params;
    let per_white: Vec<Result<Vec<TangentPair>>> = whites
        .par_iter()
        .map(|&i| {
            let w = &pair.white[i];
            let mut out = Vec::new();
            for &j in blacks {
                if let Some((anchor, delta)) = pair_anchor(w, &pair.black[j], p)? {
                    out.push(TangentPair {
                        white: i,
                        black: j,
                        anchor,
                        delta,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_white {
        all.extend(r?);
    }
    Ok(all)
}

/// Canonical candidate rectangles from near-tangent pairs: sorted by base
/// circle then anchor, with comparable duplicates on the same base removed.
pub fn rectangles_from_pairs(pair: &BipartitePair, tangent: &[TangentPair]) -> Result<Vec<DeltaRectangle>> {
    let p = &pair.params;
    let mut keyed: Vec<(usize, f64)> = tangent.iter().map(|tp| (tp.white, tp.anchor)).collect();
    keyed.sort_by(|a, b| {
        pair.white[a.0]
            .lex_cmp(&pair.white[b.0])
            .then(a.0.cmp(&b.0))
            .then(a.1.total_cmp(&b.1))
    });
    let mut out: Vec<DeltaRectangle> = Vec::with_capacity(keyed.len());
    let mut group_start = 0;
    for (k, &(wi, anchor)) in keyed.iter().enumerate() {
        if k > 0 && keyed[k - 1].0 != wi {
            group_start = out.len();
        }
        let rect = make_rectangle(&pair.white[wi], anchor, p)?;
        let mut dup = false;
        for kept in &out[group_start..] {
            if are_comparable(kept, &rect, p)? {
                dup = true;
                break;
            }
        }
        if !dup {
            out.push(rect);
        }
    }
    Ok(out)
}

/// Candidate rectangles: one per near-tangent pair, anchored on the white
/// circle, deduplicated.
pub fn candidate_rectangles(pair: &BipartitePair) -> Result<Vec<DeltaRectangle>> {
    let whites: Vec<usize> = (0..pair.m()).collect();
    let blacks: Vec<usize> = (0..pair.n()).collect();
    let tangent = near_tangent_pairs(pair, &whites, &blacks)?;
    rectangles_from_pairs(pair, &tangent)
}

/// Number of circles in `family` incident to `rect`.
pub fn incident_count(rect: &DeltaRectangle, family: &[Circle], params: &ParamSet) -> usize {
    family.iter().filter(|g| is_incident(g, rect, params)).count()
}

/// Greedy maximal incomparable subfamily in input order; returns indices.
pub fn greedy_incomparable(rects: &[DeltaRectangle], params: &ParamSet) -> Result<Vec<usize>> {
    let mut kept: Vec<usize> = Vec::new();
    'outer: for (i, r) in rects.iter().enumerate() {
        for &k in &kept {
            if are_comparable(&rects[k], r, params)? {
                continue 'outer;
            }
        }
        kept.push(i);
    }
    Ok(kept)
}

/// Greedy maximal family of pairwise incomparable rectangles.
pub fn max_incomparable(rects: &[DeltaRectangle], params: &ParamSet) -> Result<Vec<DeltaRectangle>> {
    Ok(greedy_incomparable(rects, params)?
        .into_iter()
        .map(|i| rects[i])
        .collect())
}

/// Filters candidates by type against the full pair and extracts the greedy
/// incomparable witness family.
pub fn report_from_candidates(
    pair: &BipartitePair,
    candidates: &[DeltaRectangle],
    method: Method,
    started: Instant,
    delta_evals: u64,
    stats: CellStats,
) -> Result<IncidenceReport> {
    let p = &pair.params;
    let (mu, nu) = (p.mu_threshold(), p.nu_threshold());
    let counted: Vec<(usize, usize)> = candidates
        .par_iter()
        .map(|r| (incident_count(r, &pair.white, p), incident_count(r, &pair.black, p)))
        .collect();
    let typed: Vec<usize> = (0..candidates.len())
        .filter(|&i| counted[i].0 >= mu && counted[i].1 >= nu)
        .collect();
    let rects: Vec<DeltaRectangle> = typed.iter().map(|&i| candidates[i]).collect();
    let kept = greedy_incomparable(&rects, p)?;
    let witness: Vec<DeltaRectangle> = kept.iter().map(|&k| rects[k]).collect();
    let witness_counts: Vec<(usize, usize)> = kept.iter().map(|&k| counted[typed[k]]).collect();
    let incidence_triples = witness_counts.iter().map(|&(a, b)| (a * b) as u64).sum();
    Ok(IncidenceReport {
        rect_count: witness.len(),
        witness,
        witness_counts,
        incidence_triples,
        elapsed: started.elapsed(),
        method,
        delta_evals,
        m: pair.m(),
        n: pair.n(),
        delta: p.delta,
        t: p.t,
        stats,
    })
}

/// Greedy count of pairwise incomparable rectangles of type (>=mu, >=nu)
/// among the candidates.
pub fn rect_mu_nu(pair: &BipartitePair) -> Result<IncidenceReport> {
    let started = Instant::now();
    let candidates = candidate_rectangles(pair)?;
    report_from_candidates(
        pair,
        &candidates,
        Method::BruteForce,
        started,
        (pair.m() * pair.n()) as u64,
        CellStats::default(),
    )
}

/// Incidence triples `(R, w, b)` over the type-(>=1, >=1) witness family.
pub fn count_incidences(pair: &BipartitePair) -> Result<u64> {
    let mut params = pair.params;
    params.mu = 1;
    params.nu = 1;
    Ok(rect_mu_nu(&pair.with_params(params))?.incidence_triples)
}

/// Splits the white side into a good part and clusters.
///
/// Repeatedly takes the first candidate rectangle (in canonical order) that
/// is incident to at least `mu0` remaining white circles and at least one
/// black circle, and removes those white circles as a cluster. On exit the
/// good part admits no candidate of type (>=mu0, >=1).
pub fn split_clusters(pair: &BipartitePair, mu0: usize) -> Result<(Vec<Circle>, Vec<Vec<Circle>>)> {
    let p = &pair.params;
    let mut remaining = pair.white.clone();
    let mut clusters = Vec::new();
    loop {
        let sub = BipartitePair::new(remaining.clone(), pair.black.clone(), *p);
        let candidates = candidate_rectangles(&sub)?;
        let hit = candidates.iter().find_map(|r| {
            let members: Vec<usize> = (0..remaining.len())
                .filter(|&i| is_incident(&remaining[i], r, p))
                .collect();
            (members.len() >= mu0 && pair.black.iter().any(|b| is_incident(b, r, p))).then_some(members)
        });
        match hit {
            None => break,
            Some(members) => {
                let cluster: Vec<Circle> = members.iter().map(|&i| remaining[i]).collect();
                let mut idx = 0;
                remaining.retain(|_| {
                    let keep = !members.contains(&idx);
                    idx += 1;
                    keep
                });
                clusters.push(cluster);
            }
        }
    }
    Ok((remaining, clusters))
}

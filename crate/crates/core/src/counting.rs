//! Brute-force and partition-based rectangle counting.
//!
//! Both counters produce the same candidate set: one anchor per (white,
//! black) pair that passes the pair test in [`crate::tangency`]. The
//! partitioned counter only decides which pairs need that test. It lifts the
//! larger side to ℝ³, splits it with a polynomial partition, and keeps for
//! each cell only the circles of the other side whose widened cone shell
//! meets the cell's bounding box. Everything after candidate generation
//! (type filter, greedy selection) is shared, so the two reports agree
//! exactly.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::Circle;
use crate::lifting::{lift_circle, shell_box_relation, Aabb3, Point3, ShellRelation};
use crate::partition::{build_partition, perturb_generic, predicted_total_degree, PartitionConfig, MAX_STEPS};
use crate::tangency::{
    crossing_screen, near_tangent_pairs, rectangles_from_pairs, report_from_candidates, BipartitePair,
    CellStats, IncidenceReport, Method, TangentPair,
};

/// Settings of the recursive counter.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursionConfig {
    /// Subproblems with `|W| |B|` at most this are solved by brute force.
    pub base_threshold: usize,
    pub degree_rule: String,
    pub mu0_rule: String,
    pub max_depth: usize,
    /// Exponent slack in the degree rule `D <= n^(epsilon / 6)`.
    pub epsilon: f64,
    pub seed: u64,
    /// Run a full brute-force pass afterwards and count pruned pairs that
    /// would have produced a candidate. Meant for tests.
    pub audit: bool,
}

impl Default for RecursionConfig {
    fn default() -> Self {
        RecursionConfig {
            base_threshold: 1024,
            degree_rule: "largest power-of-two cell target whose total degree is at most max(n^(eps/6), 1), at least 2 cells"
                .to_string(),
            mu0_rule: "(mn)^(1/4)".to_string(),
            max_depth: 16,
            epsilon: 0.5,
            seed: 0x7a6e,
            audit: false,
        }
    }
}

impl RecursionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base_threshold < 4 || self.max_depth < 1 || !(self.epsilon > 0.0) {
            return Err(crate::error::TangenciaError::InvalidParams(
                "need base_threshold >= 4, max_depth >= 1, epsilon > 0".into(),
            ));
        }
        Ok(())
    }

    /// Cell target for a subproblem whose partitioned side has `n` points.
    pub fn cell_target(&self, n: usize) -> usize {
        let budget = (n as f64).powf(self.epsilon / 6.0).max(1.0);
        let steps = (1..=MAX_STEPS)
            .take_while(|&s| predicted_total_degree(s) as f64 <= budget + 1e-9)
            .last()
            .unwrap_or(1);
        1 << steps
    }
}

/// Rectangle count with every (white, black) pair tested.
pub fn rect_bruteforce(pair: &BipartitePair) -> Result<IncidenceReport> {
    let started = Instant::now();
    let whites: Vec<usize> = (0..pair.m()).collect();
    let blacks: Vec<usize> = (0..pair.n()).collect();
    let tangent = near_tangent_pairs(pair, &whites, &blacks)?;
    let candidates = rectangles_from_pairs(pair, &tangent)?;
    report_from_candidates(
        pair,
        &candidates,
        Method::BruteForce,
        started,
        (pair.m() * pair.n()) as u64,
        CellStats::default(),
    )
}

/// Rectangle count through recursive polynomial partitioning.
///
/// Agrees with [`rect_bruteforce`] in count and witness family. The report's
/// `delta_evals` is the number of pair tests actually run.
pub fn rect_partitioned(pair: &BipartitePair, cfg: &RecursionConfig) -> Result<IncidenceReport> {
    cfg.validate()?;
    let started = Instant::now();
    if pair.m() * pair.n() <= cfg.base_threshold {
        let mut report = rect_bruteforce(pair)?;
        report.method = Method::Partitioned;
        return Ok(report);
    }
    let ctx = Context::new(pair, cfg);
    let whites: Vec<usize> = (0..pair.m()).collect();
    let blacks: Vec<usize> = (0..pair.n()).collect();
    let out = ctx.solve(whites, blacks, 0)?;
    let mut stats = out.stats;
    if cfg.audit {
        stats.pruning_violations = ctx.audit(&out.tangent)?;
    }
    let candidates = rectangles_from_pairs(pair, &out.tangent)?;
    report_from_candidates(pair, &candidates, Method::Partitioned, started, out.evals, stats)
}

struct Context<'a> {
    pair: &'a BipartitePair,
    cfg: &'a RecursionConfig,
    lifted_white: Vec<Point3>,
    lifted_black: Vec<Point3>,
    /// Cone gap above which no pair can produce a candidate.
    reach: f64,
}

#[derive(Default)]
struct Outcome {
    tangent: Vec<TangentPair>,
    evals: u64,
    stats: CellStats,
}

impl Outcome {
    fn merge(mut self, o: Outcome) -> Outcome {
        self.tangent.extend(o.tangent);
        self.evals += o.evals;
        self.stats.merge(&o.stats);
        self
    }
}

impl<'a> Context<'a> {
    fn new(pair: &'a BipartitePair, cfg: &'a RecursionConfig) -> Self {
        let p = &pair.params;
        let rmax = pair
            .white
            .iter()
            .chain(&pair.black)
            .map(Circle::radius)
            .fold(0.0, f64::max);
        // The tangency distance is at least the cone gap divided by
        // max(1, smaller radius); crossing anchors are screened by the cone
        // gap directly.
        let reach = (p.c1 * rmax.max(1.0) * p.delta).max(crossing_screen(p, rmax));
        Context {
            pair,
            cfg,
            lifted_white: pair.white.iter().map(lift_circle).collect(),
            lifted_black: pair.black.iter().map(lift_circle).collect(),
            reach: reach * (1.0 + 1e-9) + 1e-15,
        }
    }

    fn brute(&self, whites: &[usize], blacks: &[usize]) -> Result<Outcome> {
        Ok(Outcome {
            tangent: near_tangent_pairs(self.pair, whites, blacks)?,
            evals: (whites.len() * blacks.len()) as u64,
            stats: CellStats::default(),
        })
    }

    fn solve(&self, whites: Vec<usize>, blacks: Vec<usize>, depth: usize) -> Result<Outcome> {
        if whites.is_empty() || blacks.is_empty() {
            return Ok(Outcome::default());
        }
        if whites.len() * blacks.len() <= self.cfg.base_threshold {
            return self.brute(&whites, &blacks);
        }
        if depth >= self.cfg.max_depth {
            let mut out = self.brute(&whites, &blacks)?;
            out.stats.fallbacks += 1;
            return Ok(out);
        }
        // Partition the larger side; the other side is pruned per cell.
        let split_white = whites.len() >= blacks.len();
        let (split, other, split_pts, other_circles) = if split_white {
            (&whites, &blacks, &self.lifted_white, &self.pair.black)
        } else {
            (&blacks, &whites, &self.lifted_black, &self.pair.white)
        };
        let pts: Vec<Point3> = split.iter().map(|&i| split_pts[i]).collect();
        let seed = self.cfg.seed ^ ((depth as u64) << 40) ^ (split.len() as u64) ^ ((split[0] as u64) << 20);
        let jittered = perturb_generic(&pts, self.pair.params.delta * 1e-6, seed);
        let target = self.cfg.cell_target(split.len());
        let pcfg = PartitionConfig::from_params(&self.pair.params, seed);
        let partition = match build_partition(&jittered, target, &pcfg) {
            Ok(p) => p,
            Err(_) => {
                let mut out = self.brute(&whites, &blacks)?;
                out.stats.fallbacks += 1;
                return Ok(out);
            }
        };
        let orient = |s: Vec<usize>, o: Vec<usize>| if split_white { (s, o) } else { (o, s) };

        // The zero-set bucket is tested against the whole other side.
        let zero: Vec<usize> = partition.zero_set().iter().map(|&k| split[k]).collect();
        let mut total = Outcome::default();
        total.stats.cells_visited = 1;
        total.stats.max_depth = depth + 1;
        total.stats.zero_set_points = zero.len();
        if !zero.is_empty() {
            let (w, b) = orient(zero, other.clone());
            total = total.merge(self.brute(&w, &b)?);
        }

        let cells: Vec<Vec<usize>> = partition
            .cells()
            .values()
            .map(|members| members.iter().map(|&k| split[k]).collect())
            .collect();
        if cells.iter().any(|c| c.len() == split.len()) {
            let mut out = self.brute(&whites, &blacks)?;
            out.stats.fallbacks += 1;
            return Ok(out);
        }
        let results: Vec<Result<Outcome>> = cells
            .into_par_iter()
            .map(|members| {
                let bbox = Aabb3::of_points(members.iter().map(|&i| &split_pts[i])).expect("cells are non-empty");
                let mut stats = CellStats::default();
                let kept: Vec<usize> = other
                    .iter()
                    .copied()
                    .filter(|&j| match shell_box_relation(&other_circles[j], &bbox, self.reach) {
                        ShellRelation::Disjoint => false,
                        ShellRelation::Crossing => {
                            stats.crossing += 1;
                            true
                        }
                        ShellRelation::Contained => {
                            stats.contained += 1;
                            true
                        }
                    })
                    .collect();
                let (w, b) = orient(members, kept);
                let mut out = self.solve(w, b, depth + 1)?;
                out.stats.merge(&stats);
                Ok(out)
            })
            .collect();
        for r in results {
            total = total.merge(r?);
        }
        Ok(total)
    }

    /// Anchor-carrying pairs found by a full pass but missing from `found`.
    /// Pairs within delta always carry an anchor, so they are covered too.
    fn audit(&self, found: &[TangentPair]) -> Result<usize> {
        let whites: Vec<usize> = (0..self.pair.m()).collect();
        let blacks: Vec<usize> = (0..self.pair.n()).collect();
        let all = near_tangent_pairs(self.pair, &whites, &blacks)?;
        let seen: std::collections::HashSet<(usize, usize)> = found.iter().map(|t| (t.white, t.black)).collect();
        Ok(all.iter().filter(|t| !seen.contains(&(t.white, t.black))).count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{generate_instance, InstanceKind, InstanceSpec};
    use crate::params::ParamSet;

    fn instance(kind: InstanceKind, m: usize, n: usize, delta: f64, seed: u64) -> BipartitePair {
        let spec = InstanceSpec { kind, m, n, delta, t: 0.25, seed };
        generate_instance(&spec, &ParamSet::default()).unwrap()
    }

    fn audited() -> RecursionConfig {
        RecursionConfig { audit: true, ..RecursionConfig::default() }
    }

    fn assert_same(a: &IncidenceReport, b: &IncidenceReport) {
        assert_eq!(a.rect_count, b.rect_count);
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.incidence_triples, b.incidence_triples);
    }

    #[test]
    fn small_pairs_delegate() {
        let pair = instance(InstanceKind::Random, 16, 16, 1e-3, 4);
        let brute = rect_bruteforce(&pair).unwrap();
        let part = rect_partitioned(&pair, &RecursionConfig::default()).unwrap();
        assert_same(&brute, &part);
        assert_eq!(part.method, Method::Partitioned);
        assert_eq!(part.delta_evals, 256);
    }

    #[test]
    fn empty_side_counts_zero() {
        let mut pair = instance(InstanceKind::Random, 8, 8, 1e-3, 1);
        pair.black.clear();
        assert_eq!(rect_bruteforce(&pair).unwrap().rect_count, 0);
        assert_eq!(rect_partitioned(&pair, &RecursionConfig::default()).unwrap().rect_count, 0);
    }

    #[test]
    fn partitioned_matches_bruteforce() {
        let cases = [
            (InstanceKind::Random, 32, 32, 1e-3),
            (InstanceKind::Random, 64, 64, 1e-3),
            (InstanceKind::Grid, 64, 40, 1e-3),
            (InstanceKind::Random, 128, 128, 2e-4),
            (InstanceKind::Random, 40, 90, 5e-4),
            (InstanceKind::TangentPencil, 48, 24, 1e-5),
        ];
        for (seed, &(kind, m, n, delta)) in cases.iter().enumerate() {
            let pair = instance(kind, m, n, delta, seed as u64);
            let brute = rect_bruteforce(&pair).unwrap();
            let part = rect_partitioned(&pair, &audited()).unwrap();
            assert_same(&brute, &part);
            assert_eq!(part.stats.pruning_violations, 0, "{kind:?} {m}x{n}");
            assert!(brute.rect_count <= m * n);
        }
    }

    #[test]
    fn pruning_saves_pair_tests() {
        let pair = instance(InstanceKind::Random, 256, 256, 1e-4, 11);
        let part = rect_partitioned(&pair, &audited()).unwrap();
        assert_eq!(part.stats.pruning_violations, 0);
        assert!(part.delta_evals < 256 * 256, "{} pair tests", part.delta_evals);
        assert!(part.stats.cells_visited > 1);
    }

    #[test]
    fn cell_targets_follow_degree_rule() {
        let cfg = RecursionConfig::default();
        assert_eq!(cfg.cell_target(64), 2);
        assert_eq!(cfg.cell_target(4096), 4);
        let loose = RecursionConfig { epsilon: 3.0, ..cfg };
        // sqrt(400) = 20 admits 7 halvings (total degree 19).
        assert_eq!(loose.cell_target(400), 128);
    }

    #[test]
    fn bad_config_is_rejected() {
        let pair = instance(InstanceKind::Random, 8, 8, 1e-3, 2);
        let cfg = RecursionConfig { base_threshold: 2, ..RecursionConfig::default() };
        assert!(rect_partitioned(&pair, &cfg).is_err());
    }
}

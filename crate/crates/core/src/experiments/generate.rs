use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, TangenciaError};
use crate::geometry::Circle;
use crate::lifting::validate_pair;
use crate::params::ParamSet;
use crate::tangency::BipartitePair;

/// Smallest radius used by the generators.
pub const BASE_RADIUS: f64 = 0.55;
/// Radius slot width in units of delta; radii are jittered within a slot by
/// at most `SLOT - 1` deltas so neighbors stay delta-separated.
const SLOT: f64 = 1.25;
const RETRIES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Random,
    TangentPencil,
    Grid,
}

impl InstanceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InstanceKind::Random => "random",
            InstanceKind::TangentPencil => "tangent_pencil",
            InstanceKind::Grid => "grid",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = TangenciaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(InstanceKind::Random),
            "tangent_pencil" => Ok(InstanceKind::TangentPencil),
            "grid" => Ok(InstanceKind::Grid),
            other => Err(TangenciaError::InvalidParams(format!("unknown kind {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceSpec {
    pub kind: InstanceKind,
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    pub t: f64,
    pub seed: u64,
}

/// Generates a validated bipartite pair.
///
/// `random` and `grid` pack each side's radii into consecutive slots of width
/// `1.25 delta` and put the centers in a small disc; the black radii sit
/// `0.75 t` above the white ones and the black disc `0.75 t` away, so
/// cross-pairs straddle internal tangency. `tangent_pencil` makes every black
/// circle nearly internally tangent to the first white circle, at anchors
/// spread far enough apart to be incomparable.
pub fn generate_instance(spec: &InstanceSpec, params: &ParamSet) -> Result<BipartitePair> {
    let mut p = *params;
    p.delta = spec.delta;
    p.t = spec.t;
    p.validate()?;
    if spec.m == 0 || spec.n == 0 {
        return Err(TangenciaError::InvalidParams("m and n must be positive".into()));
    }
    let mut last = None;
    for attempt in 0..RETRIES {
        let seed = spec.seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (white, black) = match spec.kind {
            InstanceKind::Random => packed(spec, &p, &mut rng, false)?,
            InstanceKind::Grid => packed(spec, &p, &mut rng, true)?,
            InstanceKind::TangentPencil => pencil(spec, &p, &mut rng)?,
        };
        let pair = BipartitePair::new(white, black, p);
        match validate_pair(&pair) {
            Ok(()) => return Ok(pair),
            Err(e) => last = Some(e),
        }
    }
    Err(TangenciaError::GenerationInfeasible(format!(
        "{} m={} n={} delta={} t={}: {}",
        spec.kind.as_str(),
        spec.m,
        spec.n,
        spec.delta,
        spec.t,
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn slotted_radii(count: usize, base: f64, delta: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut r: Vec<f64> = (0..count)
        .map(|i| base + SLOT * delta * i as f64 + rng.gen_range(0.0..(SLOT - 1.0) * delta))
        .collect();
    r.shuffle(rng);
    r
}

fn disc_point(center: [f64; 2], radius: f64, rng: &mut ChaCha8Rng) -> [f64; 2] {
    let rho = radius * rng.gen::<f64>().sqrt();
    let th = rng.gen_range(0.0..TAU);
    [center[0] + rho * th.cos(), center[1] + rho * th.sin()]
}

fn grid_points(count: usize, center: [f64; 2], radius: f64) -> Vec<[f64; 2]> {
    let side = (count as f64).sqrt().ceil() as usize;
    let half = radius / 2f64.sqrt();
    let step = if side > 1 { 2.0 * half / (side - 1) as f64 } else { 0.0 };
    (0..count)
        .map(|k| {
            let (i, j) = (k % side, k / side);
            let off = if side > 1 { -half } else { 0.0 };
            [center[0] + off + step * i as f64, center[1] + off + step * j as f64]
        })
        .collect()
}

fn packed(
    spec: &InstanceSpec,
    p: &ParamSet,
    rng: &mut ChaCha8Rng,
    lattice: bool,
) -> Result<(Vec<Circle>, Vec<Circle>)> {
    let (delta, t) = (p.delta, p.t);
    let span = SLOT * delta * spec.m.max(spec.n) as f64;
    let rho = (span / 4.0).min(t / 20.0);
    if 2.0 * rho + span >= 0.5 * t {
        return Err(TangenciaError::GenerationInfeasible(format!(
            "{} radii per side do not fit at delta={delta}, t={t}",
            spec.m.max(spec.n)
        )));
    }
    let gap = 0.75 * t;
    let wr = slotted_radii(spec.m, BASE_RADIUS, delta, rng);
    let br = slotted_radii(spec.n, BASE_RADIUS + gap, delta, rng);
    let (wc, bc) = if lattice {
        (grid_points(spec.m, [0.0, 0.0], rho), grid_points(spec.n, [gap, 0.0], rho))
    } else {
        (
            (0..spec.m).map(|_| disc_point([0.0, 0.0], rho, rng)).collect(),
            (0..spec.n).map(|_| disc_point([gap, 0.0], rho, rng)).collect::<Vec<_>>(),
        )
    };
    let white = wc
        .iter()
        .zip(&wr)
        .map(|(c, &r)| Circle::new(c[0], c[1], r))
        .collect::<Result<Vec<_>>>()?;
    let black = bc
        .iter()
        .zip(&br)
        .map(|(c, &r)| Circle::new(c[0], c[1], r))
        .collect::<Result<Vec<_>>>()?;
    Ok((white, black))
}

fn pencil(spec: &InstanceSpec, p: &ParamSet, rng: &mut ChaCha8Rng) -> Result<(Vec<Circle>, Vec<Circle>)> {
    let (delta, t) = (p.delta, p.t);
    let r0 = BASE_RADIUS + SLOT * delta * spec.m as f64;
    let arc_angle = (delta / t).sqrt() / r0;
    let spacing = 2.2 * arc_angle;
    let spread = spacing * (spec.n - 1) as f64;
    if spread > 1.2 {
        return Err(TangenciaError::GenerationInfeasible(format!(
            "{} incomparable tangencies need {spread:.3} rad of arc",
            spec.n
        )));
    }
    let hub = Circle::new(0.0, 0.0, r0)?;
    let mut dists: Vec<f64> = (0..spec.n)
        .map(|j| 0.55 * t + SLOT * delta * j as f64)
        .collect();
    dists.shuffle(rng);
    let mut black = Vec::with_capacity(spec.n);
    for (j, &dd) in dists.iter().enumerate() {
        let psi = -0.5 * spread + spacing * j as f64;
        let eta = rng.gen_range(0.0..0.2 * delta);
        black.push(Circle::new(dd * psi.cos(), dd * psi.sin(), r0 + dd + eta)?);
    }
    let span_w = SLOT * delta * spec.m as f64;
    let rho = (span_w / 4.0).min(0.02 * t);
    let mut white = vec![hub];
    let mut radii = slotted_radii(spec.m - 1, BASE_RADIUS, delta, rng);
    for r in radii.drain(..) {
        let c = disc_point([0.0, 0.0], rho, rng);
        white.push(Circle::new(c[0], c[1], r)?);
    }
    Ok((white, black))
}

//! Shared inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tangencia::experiments::{generate_instance, InstanceKind, InstanceSpec};
use tangencia::lifting::Point3;
use tangencia::{BipartitePair, ParamSet};

/// Seeded random pair with `m = n = size`; delta shrinks with the size so
/// that the radius band always fits.
pub fn random_pair(size: usize, seed: u64) -> BipartitePair {
    let delta = (1e-3f64).min(0.05 / size as f64);
    let spec = InstanceSpec {
        kind: InstanceKind::Random,
        m: size,
        n: size,
        delta,
        t: 0.25,
        seed,
    };
    generate_instance(&spec, &ParamSet::default()).expect("fixture sizes are feasible")
}

/// Uniform points in `[-1, 1]^3`.
pub fn cloud(m: usize, seed: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect()
}

#![allow(dead_code)]

use tangencia::experiments::{generate_instance, InstanceKind, InstanceSpec};
use tangencia::{BipartitePair, ParamSet};

pub fn instance(kind: InstanceKind, m: usize, n: usize, delta: f64, seed: u64) -> BipartitePair {
    let spec = InstanceSpec {
        kind,
        m,
        n,
        delta,
        t: 0.25,
        seed,
    };
    generate_instance(&spec, &ParamSet::default()).expect("corpus instances are feasible")
}

/// Delta used for each kind when sizes reach 128 per side.
pub fn scaling_delta(kind: InstanceKind) -> f64 {
    match kind {
        InstanceKind::TangentPencil => 4e-7,
        _ => 2e-4,
    }
}

/// The fixed instance corpus shared by the calibrated bounds.
pub fn corpus() -> Vec<(String, BipartitePair)> {
    let mut out = Vec::new();
    let mut push = |kind: InstanceKind, m: usize, n: usize, delta: f64, seed: u64| {
        let name = format!("{}_{m}x{n}_d{delta:e}_s{seed}", kind.as_str());
        out.push((name, instance(kind, m, n, delta, seed)));
    };
    for kind in [InstanceKind::Random, InstanceKind::TangentPencil] {
        for size in [16, 32, 64, 128] {
            for seed in 0..3 {
                push(kind, size, size, scaling_delta(kind), seed);
            }
        }
    }
    for (m, n) in [(8, 8), (24, 40), (40, 24), (64, 64)] {
        for seed in 0..2 {
            push(InstanceKind::Random, m, n, 1e-3, 100 + seed);
        }
    }
    for (m, n) in [(16, 16), (36, 36), (64, 48)] {
        push(InstanceKind::Grid, m, n, 1e-3, 200);
    }
    for (m, n) in [(32, 8), (8, 32), (100, 20)] {
        push(InstanceKind::TangentPencil, m, n, 4e-7, 300);
    }
    out
}

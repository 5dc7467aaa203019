use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(m: usize, seed: u64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect()
}

fn z_plane() -> MultiPoly {
    MultiPoly::from_terms(1, &[([0, 0, 1], 1.0)]).unwrap()
}

#[test]
fn symmetric_set_splits_exactly() {
    let half = cloud(20, 1);
    let mut set: Vec<Point3> = half.iter().map(|p| [p[0], p[1], p[2].abs() + 0.01]).collect();
    set.extend(half.iter().map(|p| [p[0], p[1], -p[2].abs() - 0.01]));
    let counts = side_counts(&z_plane(), std::slice::from_ref(&set));
    assert_eq!(counts[0], (20, 20));
    let p = bisecting_poly(&[set.clone()], 1, 0.01).unwrap();
    let (pos, neg) = side_counts(&p, &[set])[0];
    assert_eq!(pos.max(neg), 20);
}

#[test]
fn seven_points_by_a_plane() {
    let set = cloud(7, 2);
    let p = bisecting_poly(&[set.clone()], 1, 0.05).unwrap();
    let (pos, neg) = side_counts(&p, &[set])[0];
    assert!(pos.max(neg) <= (0.55f64 * 7.0).ceil() as usize);
}

#[test]
fn three_sets_by_a_quadric() {
    let sets: Vec<Vec<Point3>> = (0..3).map(|k| cloud(40, 10 + k)).collect();
    let p = bisecting_poly(&sets, 2, 0.1).unwrap();
    assert!(p.degree() <= 2);
    for (s, (pos, neg)) in sets.iter().zip(side_counts(&p, &sets)) {
        assert!(pos.max(neg) <= side_limit(s.len(), 0.1), "{pos} {neg}");
    }
}

#[test]
fn too_many_sets_for_degree() {
    let sets: Vec<Vec<Point3>> = (0..4).map(|k| cloud(5, k)).collect();
    assert!(matches!(bisecting_poly(&sets, 1, 0.05), Err(TangenciaError::InvalidParams(_))));
}

#[test]
fn degree_schedule() {
    let totals: Vec<usize> = (1..=9).map(predicted_total_degree).collect();
    assert_eq!(totals, vec![1, 2, 4, 6, 9, 13, 19, 27, 37]);
    assert_eq!(minimal_degree(1), 1);
    assert_eq!(minimal_degree(3), 1);
    assert_eq!(minimal_degree(4), 2);
}

#[test]
fn sixty_four_points_in_eight_cells() {
    let pts = cloud(64, 3);
    let part = build_partition(&pts, 8, &PartitionConfig::default()).unwrap();
    assert_eq!(part.r(), 3);
    assert!(part.max_cell_size() <= 16);
    let total: usize = part.cells().values().map(Vec::len).sum::<usize>() + part.zero_set().len();
    assert_eq!(total, 64);
    for (sv, idx) in part.cells() {
        for &i in idx {
            assert_eq!(&part.cell_of(&pts[i]), sv);
        }
    }
}

#[test]
fn skewed_boxes_are_normalized() {
    let pts: Vec<Point3> = cloud(256, 4)
        .into_iter()
        .map(|p| [0.3 + 1e-3 * p[0], -0.2 + 1e-3 * p[1], 0.6 + 1e-4 * p[2]])
        .collect();
    let part = build_partition(&pts, 32, &PartitionConfig::default()).unwrap();
    assert!(part.max_cell_size() <= 16);
}

#[test]
fn single_point_is_a_singleton_cell() {
    let pts = vec![[0.1, 0.2, 0.3]];
    let part = build_partition(&pts, 8, &PartitionConfig::default()).unwrap();
    assert_eq!(part.cells().len(), 1);
    assert_eq!(part.cells().values().next().unwrap(), &vec![0]);
    assert!(part.zero_set().is_empty());
}

#[test]
fn zero_set_membership() {
    let part = SignCellPartition::from_polys(vec![z_plane()], Normalizer::identity());
    assert_eq!(part.cell_of(&[0.3, 0.2, 0.0]), vec![0]);
    assert_eq!(part.cell_of(&[0.3, 0.2, 1e-9]), vec![1]);
    let assigned = part.clone().assign(&[[0.0, 0.0, 0.0], [0.0, 0.0, -0.5]]);
    assert_eq!(assigned.zero_set(), &[0]);
    assert_eq!(assigned.cells().get(&vec![-1]), Some(&vec![1]));
}

#[test]
fn cells_are_stable_under_tiny_moves() {
    let pts = cloud(128, 5);
    let part = build_partition(&pts, 16, &PartitionConfig::default()).unwrap();
    for p in cloud(500, 6) {
        let sv = part.cell_of(&p);
        if !sv.contains(&0) {
            assert_eq!(part.cell_of(&[p[0] + 1e-15, p[1], p[2]]), sv);
        }
    }
}

#[test]
fn cone_crossing_examples() {
    let params = ParamSet::default();
    let apex = Circle::new(0.0, 0.0, 0.5).unwrap();
    let empty = SignCellPartition::from_polys(vec![], Normalizer::identity());
    assert_eq!(cells_crossing_surface(&empty, &apex, &params, 10_000), 1);
    let one = SignCellPartition::from_polys(vec![z_plane()], Normalizer::identity());
    assert_eq!(cells_crossing_surface(&one, &apex, &params, 10_000), 2);
}

fn det4(p: [&Point3; 4]) -> f64 {
    let rows: Vec<[f64; 3]> = (1..4)
        .map(|i| [p[i][0] - p[0][0], p[i][1] - p[0][1], p[i][2] - p[0][2]])
        .collect();
    rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
        - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
        + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
}

#[test]
fn perturbation_breaks_coplanarity() {
    let flat: Vec<Point3> = cloud(10, 7).into_iter().map(|p| [p[0], p[1], 0.25]).collect();
    assert_eq!(perturb_generic(&flat, 0.0, 1), flat);
    let moved = perturb_generic(&flat, 1e-9, 1);
    for (a, b) in flat.iter().zip(&moved) {
        assert!((0..3).all(|k| (a[k] - b[k]).abs() <= 1e-9));
    }
    let n = moved.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    assert!(det4([&flat[a], &flat[b], &flat[c], &flat[d]]).abs() < 1e-15);
                    assert!(det4([&moved[a], &moved[b], &moved[c], &moved[d]]).abs() > 1e-14);
                }
            }
        }
    }
}

#[test]
fn perturbed_factors_meet_few_points() {
    let pts = perturb_generic(&cloud(200, 8), 1e-9, 2);
    let part = build_partition(&pts, 8, &PartitionConfig::default()).unwrap();
    for f in part.polys() {
        let on = pts
            .iter()
            .filter(|p| sign_of(f, &part.normalizer().apply(p)) == 0)
            .count();
        assert!(on < monomial_count(f.degree()), "{on}");
    }
}

#[test]
fn dumps() {
    let pts = cloud(32, 9);
    let part = build_partition(&pts, 4, &PartitionConfig::default()).unwrap();
    let mut buf = Vec::new();
    part.write_polys(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let degree_lines = text.lines().filter(|l| l.starts_with("degree ")).count();
    assert_eq!(degree_lines, 2);
    assert!(text.lines().next().unwrap().starts_with('#'));
    let mut buf = Vec::new();
    part.write_cells(&mut buf, Some(&pts)).unwrap();
    let csv = String::from_utf8(buf).unwrap();
    assert_eq!(csv.lines().next(), Some("signvector,count"));
    let total: usize = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 32);
}

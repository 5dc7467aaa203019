use std::path::Path;
use std::process::{Command, Output};

fn tangencia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tangencia"))
        .args(args)
        .env("TANGENCIA_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, m: &str, n: &str) -> std::path::PathBuf {
    let pair = dir.join("pair.txt");
    let out = tangencia(&["gen", "--kind", "random", "--m", m, "--n", n, "--delta", "0.001", "--t", "0.25", "--seed", "7", "--out", p(&pair)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    pair
}

#[test]
fn gen_then_count_with_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let pair = gen(dir.path(), "40", "40");
    let text = std::fs::read_to_string(&pair).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("W ")).count(), 40);

    let mut counts = Vec::new();
    for method in ["brute", "partition"] {
        let report = dir.path().join(format!("{method}.csv"));
        let out = tangencia(&["count", "--pair", p(&pair), "--method", method, "--mu", "1", "--nu", "1", "--epsilon", "0.5", "--out", p(&report)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read_to_string(&report).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "method,m,n,delta,t,rect_count,incidences,delta_evals,elapsed_ms");
        let row: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
        counts.push(row[5].clone());
        let witness = std::fs::read_to_string(dir.path().join(format!("{method}.witness.csv"))).unwrap();
        assert!(witness.starts_with("cx,cy,r,theta,delta,t,mu_count,nu_count"));
        assert_eq!(witness.lines().count() - 1, row[5].parse::<usize>().unwrap());
    }
    assert_eq!(counts[0], counts[1]);
}

#[test]
fn partition_writes_cells_and_factors() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    let body: String = (0..200)
        .map(|i| {
            let f = i as f64;
            format!("{} {} {}\n", (f * 0.37).sin(), (f * 0.71).cos(), (f * 1.3).sin() * 0.5)
        })
        .collect();
    std::fs::write(&pts, body).unwrap();
    let out_path = dir.path().join("cells.csv");
    let out = tangencia(&["partition", "--points", p(&pts), "--cells", "8", "--tol", "0.05", "--out", p(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cells = std::fs::read_to_string(&out_path).unwrap();
    assert!(cells.starts_with("signvector,count"));
    let total: usize = cells.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 200);
    let polys = std::fs::read_to_string(dir.path().join("cells.polys")).unwrap();
    assert_eq!(polys.lines().filter(|l| l.starts_with("degree")).count(), 3);
}

#[test]
fn scaling_and_maximal_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("scaling.csv");
    let out = tangencia(&["scaling", "--kind", "random,grid", "--sizes", "16x16,24x20", "--trials", "1", "--out", p(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 5);
    assert!(csv.lines().last().unwrap().starts_with("# fitted_exponent="));

    let out_path = dir.path().join("max.csv");
    let out = tangencia(&["maximal", "--shape", "ball", "--delta", "0.0625", "--p", "3", "--out", p(&out_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("ball,0.0625,3,"));
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");
    let cases: Vec<Vec<&str>> = vec![
        vec!["gen", "--kind", "spiral", "--m", "4", "--n", "4", "--delta", "0.001", "--t", "0.25", "--out", p(&out)],
        vec!["gen", "--kind", "random", "--m", "4", "--n", "4", "--delta", "0.3", "--t", "0.25", "--out", p(&out)],
        vec!["maximal", "--shape", "ball", "--delta", "0.5", "--p", "3", "--out", p(&out)],
        vec!["scaling", "--sizes", "16by16", "--out", p(&out)],
        vec!["count", "--pair", "/nonexistent/pair.txt", "--out", p(&out)],
        vec!["partition", "--points", "/nonexistent", "--cells", "3", "--out", p(&out)],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = tangencia(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");
    // Far more white circles than fit in the radius band at this delta.
    let o = tangencia(&["gen", "--kind", "random", "--m", "5000", "--n", "8", "--delta", "0.001", "--t", "0.25", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");
    let o = Command::new(env!("CARGO_BIN_EXE_tangencia"))
        .args(["maximal", "--shape", "ball", "--delta", "0.0625", "--p", "3", "--out", p(&out)])
        .env("TANGENCIA_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

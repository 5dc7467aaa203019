use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tangencia::counting::{rect_bruteforce, rect_partitioned, RecursionConfig};
use tangencia::experiments::{eval_maximal_ratio, generate_instance, scaling_run, InstanceKind, InstanceSpec, Shape};
use tangencia::io;
use tangencia::partition::{build_partition, PartitionConfig};
use tangencia::{ParamSet, Result, TangenciaError};

#[derive(Parser)]
#[command(name = "tangencia", version, about = "Circle tangency counting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bipartite pair file.
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Count pairwise incomparable rectangles of a pair file. Writes the
    /// report CSV to OUT and the witness CSV next to it.
    Count {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, value_enum, default_value_t = CountMethod::Partition)]
        method: CountMethod,
        #[arg(long, default_value_t = 1)]
        mu: usize,
        #[arg(long, default_value_t = 1)]
        nu: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Partition a point file. Writes the cell table to OUT and the factors
    /// next to it.
    Partition {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        cells: usize,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rectangle counts over a list of sizes.
    Scaling {
        /// Comma-separated instance kinds.
        #[arg(long, default_value = "random")]
        kind: String,
        /// Sizes as "m1xn1,m2xn2,...".
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 2e-4)]
        delta: f64,
        #[arg(long, default_value_t = 0.25)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lp ratio of the circular maximal function on a test shape.
    Maximal {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CountMethod {
    Brute,
    Partition,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Ball,
    Rectangle,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

/// `dir/stem.suffix` for `dir/stem.ext`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn parse_sizes(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|item| {
            let bad = || TangenciaError::InvalidParams(format!("size {item:?} is not of the form MxN"));
            let (m, n) = item.trim().split_once('x').ok_or_else(bad)?;
            Ok((m.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?))
        })
        .collect()
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen {
            kind,
            m,
            n,
            delta,
            t,
            seed,
            out,
        } => {
            let spec = InstanceSpec {
                kind: kind.parse()?,
                m,
                n,
                delta,
                t,
                seed,
            };
            let pair = generate_instance(&spec, &ParamSet::default())?;
            let mut w = create(&out)?;
            io::write_pair(&mut w, &pair)?;
            w.flush()?;
        }
        Command::Count {
            pair,
            method,
            mu,
            nu,
            epsilon,
            out,
        } => {
            let mut pair = io::read_pair(open(&pair)?, &ParamSet::default())?;
            pair.params.mu = mu;
            pair.params.nu = nu;
            pair.params.epsilon = epsilon;
            pair.params.validate()?;
            tangencia::lifting::validate_pair(&pair)?;
            let report = match method {
                CountMethod::Brute => rect_bruteforce(&pair)?,
                CountMethod::Partition => {
                    let cfg = RecursionConfig {
                        epsilon,
                        ..RecursionConfig::default()
                    };
                    rect_partitioned(&pair, &cfg)?
                }
            };
            let mut w = create(&out)?;
            io::write_report_csv(&mut w, std::slice::from_ref(&report))?;
            w.flush()?;
            let mut w = create(&sibling(&out, "witness.csv"))?;
            io::write_witness_csv(&mut w, &report)?;
            w.flush()?;
            println!("{}", io::report_row(&report));
        }
        Command::Partition { points, cells, tol, out } => {
            let pts = io::read_points(open(&points)?)?;
            if !(tol > 0.0 && tol < 0.5) {
                return Err(TangenciaError::InvalidParams(format!("tol {tol} outside (0, 0.5)")));
            }
            let cfg = PartitionConfig {
                tol,
                ..PartitionConfig::default()
            };
            let part = build_partition(&pts, cells, &cfg)?;
            let mut w = create(&out)?;
            part.write_cells(&mut w, Some(&pts))?;
            w.flush()?;
            let mut w = create(&sibling(&out, "polys"))?;
            part.write_polys(&mut w)?;
            w.flush()?;
            println!(
                "cells={} max_cell={} zero_set={} total_degree={}",
                part.cells().len(),
                part.max_cell_size(),
                part.zero_set().len(),
                part.total_degree()
            );
        }
        Command::Scaling {
            kind,
            sizes,
            trials,
            delta,
            t,
            out,
        } => {
            let kinds: Vec<InstanceKind> = kind.split(',').map(|k| k.trim().parse()).collect::<Result<_>>()?;
            let sizes = parse_sizes(&sizes)?;
            let params = ParamSet::with_scales(delta, t)?;
            let res = scaling_run(&kinds, &sizes, trials, &params)?;
            let mut w = create(&out)?;
            io::write_scaling_csv(&mut w, &res)?;
            w.flush()?;
            match res.fitted_exponent {
                Some(e) => println!("fitted_exponent={e:.4}"),
                None => println!("fitted_exponent=none"),
            }
        }
        Command::Maximal { shape, delta, p, out } => {
            let shape = match shape {
                ShapeArg::Ball => Shape::Ball,
                ShapeArg::Rectangle => Shape::Rectangle,
            };
            let step = delta / 8.0;
            let ratio = eval_maximal_ratio(shape, delta, p, step)?;
            let mut w = create(&out)?;
            io::write_maximal_csv(&mut w, shape, delta, p, step, ratio)?;
            w.flush()?;
            println!("ratio={ratio}");
        }
    }
    Ok(())
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("TANGENCIA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("TANGENCIA_THREADS={v:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

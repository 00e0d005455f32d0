//! `torgreen`: Green's function tables, hitting-time grids, verification
//! suites and benchmarks on the command line.

mod format;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use torgreen::bench::{bench, BenchMode};
use torgreen::closed_forms::{cycle_green, cycle_green_alpha, torus_green, TorusRow, TorusSpec};
use torgreen::verify::{run_suite, Suite, VerifyOptions};
use torgreen::walk::hitting_grid_with_threads;

use format::sig;

#[derive(Parser)]
#[command(
    name = "torgreen",
    version,
    about = "Discrete Green's functions of cycles, tori and graph products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print one row of a Green's function as CSV.
    Green(GreenArgs),
    /// Print hitting times from a source to every vertex of a 2-torus as CSV.
    Hitting(HittingArgs),
    /// Run a verification suite against the dense oracles.
    Verify(VerifyArgs),
    /// Time row evaluation; one JSON record per repeat.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GreenKind {
    Cycle,
    Torus,
    Ttorus,
    Galpha,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Significant digits per value.
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u32).range(1..=17))]
    digits: u32,
    /// Worker threads for row evaluation.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
}

#[derive(Args)]
struct GreenArgs {
    kind: GreenKind,
    /// Cycle length (cycle, galpha).
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated cycle lengths (torus, ttorus).
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Spectral shift (galpha only).
    #[arg(long)]
    alpha: Option<f64>,
    /// Source vertex as comma-separated coordinates; defaults to the origin.
    #[arg(long, value_delimiter = ',')]
    source: Option<Vec<usize>>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct HittingArgs {
    /// Torus dimensions M,N.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// Start vertex x0,y0.
    #[arg(long, value_delimiter = ',')]
    source: Option<Vec<usize>>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Lower each suite's largest cycle length (at least 3).
    #[arg(long, value_parser = clap::value_parser!(usize))]
    max_size: Option<usize>,
    /// Override each suite's tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated cycle lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// row, full-rep or oracle.
    #[arg(long, default_value = "row")]
    mode: String,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
}

/// An error caused by the arguments rather than by the computation.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn is_usage(err: &anyhow::Error) -> bool {
    use torgreen::Error as E;
    if err.downcast_ref::<Usage>().is_some() {
        return true;
    }
    matches!(
        err.downcast_ref::<E>(),
        Some(
            E::InvalidSize(_)
                | E::Index { .. }
                | E::Shape(_)
                | E::Misuse(_)
                | E::Domain(_)
                | E::Pole { .. }
        )
    )
}

fn emit(output: &Output, text: &str) -> anyhow::Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn check_source(source: &Option<Vec<usize>>, dims: &[usize]) -> anyhow::Result<Vec<usize>> {
    let source = source.clone().unwrap_or_else(|| vec![0; dims.len()]);
    if source.len() != dims.len() {
        return Err(usage(format!(
            "source needs {} coordinates, got {}",
            dims.len(),
            source.len()
        )));
    }
    if let Some((s, m)) = source.iter().zip(dims).find(|(s, m)| s >= m) {
        return Err(usage(format!(
            "source coordinate {s} out of range for cycle length {m}"
        )));
    }
    Ok(source)
}

fn cmd_green(args: GreenArgs) -> anyhow::Result<()> {
    let d = args.output.digits as usize;
    let dims = match args.kind {
        GreenKind::Cycle | GreenKind::Galpha => {
            vec![args
                .m
                .ok_or_else(|| usage("--m is required for cycle and galpha"))?]
        }
        GreenKind::Torus | GreenKind::Ttorus => args
            .dims
            .clone()
            .ok_or_else(|| usage("--dims is required"))?,
    };
    if matches!(args.kind, GreenKind::Torus) && dims.len() != 2 {
        return Err(usage(format!(
            "torus needs exactly two dimensions, got {}",
            dims.len()
        )));
    }
    if args.alpha.is_some() && !matches!(args.kind, GreenKind::Galpha) {
        return Err(usage("--alpha applies to galpha only"));
    }
    let spec = TorusSpec::new(dims.clone())?;
    let source = check_source(&args.source, &dims)?;

    let mut out = String::new();
    out.push_str(&format!(
        "# source={}\n",
        source
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    ));
    match args.kind {
        GreenKind::Cycle => {
            out.push_str("a,value\n");
            for a in 0..dims[0] {
                out.push_str(&format!("{a},{}\n", sig(cycle_green(dims[0], a)?, d)));
            }
        }
        GreenKind::Galpha => {
            let alpha = args
                .alpha
                .ok_or_else(|| usage("--alpha is required for galpha"))?;
            out.push_str(&format!("# alpha={}\n", sig(alpha, 17)));
            out.push_str("a,value\n");
            for a in 0..dims[0] {
                out.push_str(&format!(
                    "{a},{}\n",
                    sig(cycle_green_alpha(dims[0], alpha, a)?, d)
                ));
            }
        }
        GreenKind::Torus => {
            let (m, n) = (dims[0], dims[1]);
            out.push_str("dx,dy,value\n");
            for dx in 0..m {
                for dy in 0..n {
                    out.push_str(&format!(
                        "{dx},{dy},{}\n",
                        sig(torus_green(m, n, dx, dy)?, d)
                    ));
                }
            }
        }
        GreenKind::Ttorus => {
            let row = TorusRow::compute_with_threads(&spec, args.output.threads as usize)?;
            let header: Vec<String> = (1..=dims.len()).map(|i| format!("d{i}")).collect();
            out.push_str(&format!("{},value\n", header.join(",")));
            let g = spec.graph()?;
            for v in 0..spec.vertex_count() {
                let disp = g.coords_of(torgreen::graph::VertexId(v))?;
                let cols: Vec<String> = disp.iter().map(usize::to_string).collect();
                out.push_str(&format!("{},{}\n", cols.join(","), sig(row.get(&disp)?, d)));
            }
        }
    }
    emit(&args.output, &out)
}

fn cmd_hitting(args: HittingArgs) -> anyhow::Result<()> {
    if args.dims.len() != 2 {
        return Err(usage(format!(
            "hitting needs --dims M,N, got {} dimensions",
            args.dims.len()
        )));
    }
    let spec = TorusSpec::new(args.dims.clone())?;
    let source = check_source(&args.source, &args.dims)?;
    let grid = hitting_grid_with_threads(&spec, &source, args.output.threads as usize)?;
    let (m, n) = (args.dims[0], args.dims[1]);
    let d = args.output.digits as usize;
    let at = grid.argmax().1;
    let mut out = format!(
        "# source={},{}\n# max={} at={},{}\nx,y,Q\n",
        source[0],
        source[1],
        sig(grid.max(), d),
        at / n,
        at % n
    );
    for x in 0..m {
        for y in 0..n {
            out.push_str(&format!("{x},{y},{}\n", sig(grid.get(0, x * n + y), d)));
        }
    }
    emit(&args.output, &out)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<bool> {
    let suite: Suite = args.suite.parse().map_err(|_| {
        usage(format!(
            "unknown suite {:?}; expected all, cycle, galpha, torus, ttorus, product, walk or identities",
            args.suite
        ))
    })?;
    if matches!(args.max_size, Some(m) if m < 3) {
        return Err(usage("--max-size must be at least 3"));
    }
    if matches!(args.tol, Some(t) if t.is_nan() || t <= 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let report = run_suite(
        suite,
        &VerifyOptions {
            max_size: args.max_size,
            tol: args.tol,
        },
    );
    let mut stdout = io::stdout().lock();
    for check in &report.checks {
        writeln!(stdout, "{check}")?;
    }
    writeln!(stdout, "# {}", report.summary())?;
    Ok(report.all_passed())
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let mode: BenchMode = args
        .mode
        .parse()
        .map_err(|e: torgreen::Error| usage(e.to_string()))?;
    if args.repeat == 0 {
        return Err(usage("--repeat must be at least 1"));
    }
    let spec = TorusSpec::new(args.dims)?;
    let records = bench(&spec, mode, args.repeat, args.threads as usize)?;
    let mut stdout = io::stdout().lock();
    for r in records {
        writeln!(stdout, "{}", serde_json::to_string(&r)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Green(a) => cmd_green(a).map(|_| true),
        Command::Hitting(a) => cmd_hitting(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(if is_usage(&err) { 2 } else { 1 })
        }
    }
}

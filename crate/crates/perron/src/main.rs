use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use perron::experiment::{
    bench_table1, bench_table2_full, bench_table2_small, emit_report, harness_threads, run_specs,
    ExampleKind, ExperimentSpec, ReportFormat, ReportRow,
};
use perron::generate::{cpz_tensor, lgl_tensor, random_tensor, GENERATOR_NAME};
use perron::io::{parse_tensor_file, write_tensor_file};
use perron::nqz::{nqz_solve, NqzConfig};
use perron::{solve_perron, SolverConfig};

#[derive(Parser)]
#[command(
    name = "perron",
    version,
    about = "Perron pair (largest eigenvalue + positive eigenvector) of nonnegative tensors"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a tensor file for its Perron pair
    Solve {
        /// Tensor file (format: `tensor m n nnz` header, then sparse entries)
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Initial homotopy step size
        #[arg(long, default_value_t = 0.1)]
        dt0: f64,
        /// Interior Newton tolerance
        #[arg(long, default_value_t = 1e-5)]
        eps1: f64,
        /// Endpoint Newton tolerance
        #[arg(long, default_value_t = 1e-12)]
        eps2: f64,
        /// Prediction-correction attempt limit
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        /// NQZ residual tolerance
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// NQZ iteration cap
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
    },
    /// Generate a built-in example tensor file
    Gen {
        #[arg(long, value_enum)]
        example: ExampleArg,
        /// Tensor order (random only)
        #[arg(long)]
        m: Option<usize>,
        /// Tensor dimension (random only)
        #[arg(long)]
        n: Option<usize>,
        /// Identity shift added to the example (lgl, random)
        #[arg(long)]
        gamma: Option<f64>,
        /// Generator seed (random only)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run a comparison suite and write a report
    Bench {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Expand table2-small to the full grid (up to order 4, dimension 100;
        /// needs gigabytes of memory and minutes of runtime)
        #[arg(long)]
        full: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Homotopy,
    Nqz,
    NqzShift,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleArg {
    Cpz,
    Lgl,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Table1,
    #[value(name = "table2-small")]
    Table2Small,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

const EXIT_OK: u8 = 0;
const EXIT_NOT_CONVERGED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> perron::Result<u8> {
    match cli.cmd {
        Cmd::Solve {
            input,
            method,
            dt0,
            eps1,
            eps2,
            max_steps,
            tol,
            max_iters,
        } => {
            let tensor = parse_tensor_file(&input)?;
            match method {
                MethodArg::Homotopy => {
                    let cfg = SolverConfig {
                        dt0,
                        eps1,
                        eps2,
                        max_steps,
                        ..SolverConfig::default()
                    };
                    let r = solve_perron(&tensor, &cfg)?;
                    if r.reducibility_warning {
                        eprintln!(
                            "warning: tensor is not weakly irreducible; \
                             the computed pair may not be the spectral radius"
                        );
                    }
                    println!("method: homotopy");
                    println!("lambda: {}", r.pair.lambda);
                    println!("x: {}", fmt_vec(&r.pair.x));
                    println!("residual: {:e}", r.residual);
                    println!("steps: {}", r.steps);
                    println!("newton_iterations: {}", r.newton_total);
                    println!("time_ms: {:.3}", r.wall_time.as_secs_f64() * 1e3);
                    println!("termination: {}", r.termination.as_str());
                    Ok(if r.converged() { EXIT_OK } else { EXIT_NOT_CONVERGED })
                }
                MethodArg::Nqz | MethodArg::NqzShift => {
                    let cfg = NqzConfig {
                        tol,
                        max_iters,
                        shift: if matches!(method, MethodArg::NqzShift) { 1.0 } else { 0.0 },
                    };
                    let r = nqz_solve(&tensor, &cfg)?;
                    println!(
                        "method: {}",
                        if cfg.shift > 0.0 { "nqz-shift" } else { "nqz" }
                    );
                    println!("lambda: {}", r.pair.lambda);
                    println!("x: {}", fmt_vec(&r.pair.x));
                    println!("lambda_bounds: [{}, {}]", r.lambda_lo, r.lambda_hi);
                    println!("residual: {:e}", r.residual);
                    println!("iterations: {}", r.iters);
                    println!("time_ms: {:.3}", r.wall_time.as_secs_f64() * 1e3);
                    println!(
                        "termination: {}",
                        match r.termination {
                            perron::NqzTermination::Converged => "converged",
                            perron::NqzTermination::IterationCap => "iteration_cap",
                            perron::NqzTermination::DegenerateIterate => "degenerate_iterate",
                        }
                    );
                    Ok(if r.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
                }
            }
        }
        Cmd::Gen {
            example,
            m,
            n,
            gamma,
            seed,
            output,
        } => {
            let (tensor, comments) = match example {
                ExampleArg::Cpz => {
                    reject_flag(m, "--m", "cpz")?;
                    reject_flag(n, "--n", "cpz")?;
                    reject_flag(gamma, "--gamma", "cpz")?;
                    reject_flag(seed, "--seed", "cpz")?;
                    (cpz_tensor(), vec!["example: cpz".to_string()])
                }
                ExampleArg::Lgl => {
                    reject_flag(m, "--m", "lgl")?;
                    reject_flag(n, "--n", "lgl")?;
                    reject_flag(seed, "--seed", "lgl")?;
                    let g = gamma.unwrap_or(0.0);
                    (lgl_tensor(g), vec![format!("example: lgl, gamma = {g}")])
                }
                ExampleArg::Random => {
                    let m = m.ok_or_else(|| usage("--m is required for random tensors"))?;
                    let n = n.ok_or_else(|| usage("--n is required for random tensors"))?;
                    let seed = seed.ok_or_else(|| usage("--seed is required for random tensors"))?;
                    let g = gamma.unwrap_or(0.0);
                    let t = random_tensor(m, n, g, seed)?;
                    let c = vec![format!(
                        "example: random, gamma = {g}, seed = {seed}, \
                         generator = {GENERATOR_NAME} (uniform [0,1) via 53-bit mantissa division)"
                    )];
                    (t, c)
                }
            };
            write_tensor_file(&tensor, &output, &comments)?;
            println!(
                "wrote {} (order {}, dimension {})",
                output.display(),
                tensor.order(),
                tensor.dim()
            );
            Ok(EXIT_OK)
        }
        Cmd::Bench {
            suite,
            output,
            format,
            full,
        } => {
            let specs: Vec<ExperimentSpec> = match (suite, full) {
                (SuiteArg::Table1, false) => bench_table1(),
                (SuiteArg::Table1, true) => {
                    return Err(usage("--full applies only to --suite table2-small"))
                }
                (SuiteArg::Table2Small, false) => bench_table2_small(),
                (SuiteArg::Table2Small, true) => bench_table2_full(),
            };
            let results = run_specs(&specs, harness_threads())?;
            let mut rows: Vec<ReportRow> = Vec::new();
            println!(
                "{:<8} {:>10} {:<10} {:>12} {:>6} {:>8} {:>10}  {}",
                "example", "gamma", "method", "lambda", "iters", "newton", "time_ms", "termination"
            );
            for (spec, batch) in specs.iter().zip(results) {
                for row in batch {
                    println!(
                        "{:<8} {:>10} {:<10} {:>12.6} {:>6} {:>8} {:>10.3}  {}",
                        label(spec),
                        spec.gamma,
                        row.method,
                        row.lambda,
                        row.iters,
                        row.newton_iters
                            .map(|v| v.to_string())
                            .unwrap_or_else(|| "-".into()),
                        row.time_ms,
                        row.termination
                    );
                    rows.push(row);
                }
            }
            let fmt = match format {
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            };
            emit_report(&rows, fmt, &output)?;
            println!("report written to {}", output.display());
            Ok(EXIT_OK)
        }
    }
}

fn label(spec: &ExperimentSpec) -> String {
    match spec.example {
        ExampleKind::Random => format!("({},{})", spec.order, spec.dim),
        other => other.name().to_string(),
    }
}

fn usage(msg: &str) -> perron::PerronError {
    perron::PerronError::InvalidConfig(msg.into())
}

fn reject_flag<T>(value: Option<T>, flag: &str, example: &str) -> perron::Result<()> {
    if value.is_some() {
        return Err(usage(&format!("{flag} does not apply to example `{example}`")));
    }
    Ok(())
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.10}")).collect();
    format!("[{}]", parts.join(", "))
}

//! Experiment harness: named example specs, method runners with
//! cross-checks, and CSV/JSON report emission.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{PerronError, Result};
use crate::generate::{cpz_tensor, lgl_tensor, random_tensor};
use crate::homotopy::{solve_perron, SolverConfig};
use crate::nqz::{nqz_solve, NqzConfig, NqzTermination};
use crate::tensor::DenseTensor;

/// Relative eigenvalue agreement required across converged methods.
const CROSS_CHECK_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Homotopy,
    Nqz,
    NqzShift,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Homotopy => "homotopy",
            Method::Nqz => "nqz",
            Method::NqzShift => "nqz-shift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleKind {
    /// The fixed irreducible non-primitive 3x3x3 tensor.
    Cpz,
    /// The fixed positive 3x3x3 tensor plus `gamma * I`.
    Lgl,
    /// Seeded uniform entries plus `gamma * I`.
    Random,
}

impl ExampleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExampleKind::Cpz => "cpz",
            ExampleKind::Lgl => "lgl",
            ExampleKind::Random => "random",
        }
    }
}

/// One experiment: an example tensor and the methods to run on it.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub example: ExampleKind,
    pub order: usize,
    pub dim: usize,
    pub gamma: f64,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub solver: SolverConfig,
    pub nqz: NqzConfig,
}

impl ExperimentSpec {
    pub fn new(example: ExampleKind, order: usize, dim: usize, gamma: f64, seed: u64) -> Self {
        ExperimentSpec {
            example,
            order,
            dim,
            gamma,
            seed,
            methods: vec![Method::Homotopy, Method::Nqz],
            solver: SolverConfig::default(),
            nqz: NqzConfig::default(),
        }
    }

    pub fn with_methods(mut self, methods: Vec<Method>) -> Self {
        self.methods = methods;
        self
    }

    /// Builds the tensor, validating the example/shape combination.
    pub fn tensor(&self) -> Result<DenseTensor> {
        match self.example {
            ExampleKind::Cpz => {
                if self.order != 3 || self.dim != 3 {
                    return Err(PerronError::InvalidConfig(
                        "example `cpz` is fixed at order 3, dimension 3".into(),
                    ));
                }
                if self.gamma != 0.0 {
                    return Err(PerronError::InvalidConfig(
                        "example `cpz` does not take a gamma shift".into(),
                    ));
                }
                Ok(cpz_tensor())
            }
            ExampleKind::Lgl => {
                if self.order != 3 || self.dim != 3 {
                    return Err(PerronError::InvalidConfig(
                        "example `lgl` is fixed at order 3, dimension 3".into(),
                    ));
                }
                Ok(lgl_tensor(self.gamma))
            }
            ExampleKind::Random => random_tensor(self.order, self.dim, self.gamma, self.seed),
        }
    }
}

/// One solver run, shaped like a row of the comparison tables.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub method: String,
    pub lambda: f64,
    pub residual: f64,
    /// Prediction-correction steps (homotopy) or iterations (NQZ).
    pub iters: usize,
    /// Total Newton updates; absent for NQZ rows.
    pub newton_iters: Option<usize>,
    pub time_ms: f64,
    pub termination: String,
}

/// Runs every requested method on the spec's tensor and cross-checks that
/// converged methods agree on the eigenvalue. Per-method solver errors are
/// captured in the row rather than aborting the batch.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ReportRow>> {
    let tensor = spec.tensor()?;
    let mut rows = Vec::with_capacity(spec.methods.len());
    for method in &spec.methods {
        rows.push(run_method(*method, &tensor, spec));
    }
    let converged: Vec<&ReportRow> = rows.iter().filter(|r| r.termination == "converged").collect();
    for pair in converged.windows(2) {
        let (a, b) = (pair[0].lambda, pair[1].lambda);
        let rel = (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        if rel > CROSS_CHECK_RTOL {
            return Err(PerronError::MethodDisagreement { a, b, rel });
        }
    }
    Ok(rows)
}

fn run_method(method: Method, tensor: &DenseTensor, spec: &ExperimentSpec) -> ReportRow {
    match method {
        Method::Homotopy => match solve_perron(tensor, &spec.solver) {
            Ok(r) => ReportRow {
                method: method.name().into(),
                lambda: r.pair.lambda,
                residual: r.residual,
                iters: r.steps,
                newton_iters: Some(r.newton_total),
                time_ms: r.wall_time.as_secs_f64() * 1e3,
                termination: r.termination.as_str().into(),
            },
            Err(e) => error_row(method, e),
        },
        Method::Nqz | Method::NqzShift => {
            let mut cfg = spec.nqz.clone();
            if method == Method::NqzShift && cfg.shift == 0.0 {
                cfg.shift = 1.0;
            }
            match nqz_solve(tensor, &cfg) {
                Ok(r) => ReportRow {
                    method: method.name().into(),
                    lambda: r.pair.lambda,
                    residual: r.residual,
                    iters: r.iters,
                    newton_iters: None,
                    time_ms: r.wall_time.as_secs_f64() * 1e3,
                    termination: match r.termination {
                        NqzTermination::Converged => "converged",
                        NqzTermination::IterationCap => "step_limit",
                        NqzTermination::DegenerateIterate => "path_failure",
                    }
                    .into(),
                },
                Err(e) => error_row(method, e),
            }
        }
    }
}

fn error_row(method: Method, e: PerronError) -> ReportRow {
    ReportRow {
        method: method.name().into(),
        lambda: f64::NAN,
        residual: f64::NAN,
        iters: 0,
        newton_iters: None,
        time_ms: 0.0,
        termination: format!("error: {e}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Renders rows in the fixed column schema
/// `method,lambda,residual,iters,newton_iters,time_ms,termination`.
pub fn render_report(rows: &[ReportRow], format: ReportFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(PerronError::EmptyReport);
    }
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("method,lambda,residual,iters,newton_iters,time_ms,termination\n");
            for r in rows {
                let newton = r
                    .newton_iters
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.method, r.lambda, r.residual, r.iters, newton, r.time_ms, r.termination
                ));
            }
            Ok(out)
        }
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(rows)
                .map_err(|e| PerronError::InvalidConfig(format!("serialization failed: {e}")))?;
            out.push('\n');
            Ok(out)
        }
    }
}

/// Writes the report to `dest`; refuses to create a file for an empty batch.
pub fn emit_report(rows: &[ReportRow], format: ReportFormat, dest: &Path) -> Result<()> {
    let text = render_report(rows, format)?;
    fs::write(dest, text)?;
    Ok(())
}

/// The fixed positive example across `gamma` in {0, 10, 10^2, 10^3, 10^4},
/// homotopy vs plain NQZ.
pub fn bench_table1() -> Vec<ExperimentSpec> {
    [0.0, 10.0, 1e2, 1e3, 1e4]
        .iter()
        .map(|&g| ExperimentSpec::new(ExampleKind::Lgl, 3, 3, g, 0))
        .collect()
}

/// Seeded random tensors at desk scale: (order, dim) in {(3,20), (4,10)},
/// `gamma` in {10^2, 10^4, 10^6}.
pub fn bench_table2_small() -> Vec<ExperimentSpec> {
    let mut specs = Vec::new();
    for &(m, n) in &[(3usize, 20usize), (4, 10)] {
        for &g in &[1e2, 1e4, 1e6] {
            specs.push(ExperimentSpec::new(ExampleKind::Random, m, n, g, 42));
        }
    }
    specs
}

/// The full random grid up to (4, 100); the largest cells need gigabytes of
/// memory and minutes of symmetrization time, so this is opt-in.
pub fn bench_table2_full() -> Vec<ExperimentSpec> {
    let mut specs = Vec::new();
    let grid: &[(usize, usize, &[f64])] = &[
        (3, 20, &[1e2, 1e4, 1e6]),
        (3, 100, &[1e2, 1e4, 1e6]),
        (3, 200, &[1e2, 1e4, 1e6, 1e7]),
        (4, 10, &[1e2, 1e4, 1e6]),
        (4, 50, &[1e2, 1e4, 1e6, 1e7]),
        (4, 100, &[1e2, 1e4, 1e6, 1e8]),
    ];
    for &(m, n, gammas) in grid {
        for &g in gammas {
            specs.push(ExperimentSpec::new(ExampleKind::Random, m, n, g, 42));
        }
    }
    specs
}

/// Runs a batch of specs, optionally fanning out over `threads` workers.
/// Row order always matches spec order.
pub fn run_specs(specs: &[ExperimentSpec], threads: usize) -> Result<Vec<Vec<ReportRow>>> {
    if threads <= 1 || specs.len() <= 1 {
        return specs.iter().map(run_experiment).collect();
    }
    let workers = threads.min(specs.len());
    let mut results: Vec<Option<Result<Vec<ReportRow>>>> = Vec::new();
    results.resize_with(specs.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= specs.len() {
                    break;
                }
                let r = run_experiment(&specs[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results
        .into_iter()
        .map(|slot| slot.expect("every spec was claimed by a worker"))
        .collect()
}

/// Worker cap from the `PERRON_THREADS` environment variable (default 1).
pub fn harness_threads() -> usize {
    std::env::var("PERRON_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        let bad = ExperimentSpec::new(ExampleKind::Cpz, 3, 4, 0.0, 0);
        assert!(bad.tensor().is_err());
        let bad_gamma = ExperimentSpec::new(ExampleKind::Cpz, 3, 3, 1.0, 0);
        assert!(bad_gamma.tensor().is_err());
        let ok = ExperimentSpec::new(ExampleKind::Lgl, 3, 3, 10.0, 0);
        assert!(ok.tensor().is_ok());
    }

    #[test]
    fn lgl_experiment_rows_agree() {
        let spec = ExperimentSpec::new(ExampleKind::Lgl, 3, 3, 0.0, 0);
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].method, "homotopy");
        assert_eq!(rows[1].method, "nqz");
        assert_eq!(rows[0].termination, "converged");
        assert_eq!(rows[1].termination, "converged");
        let rel = (rows[0].lambda - rows[1].lambda).abs() / rows[0].lambda;
        assert!(rel <= 1e-8);
    }

    #[test]
    fn cpz_nqz_row_hits_step_limit() {
        let spec = ExperimentSpec::new(ExampleKind::Cpz, 3, 3, 0.0, 0)
            .with_methods(vec![Method::Nqz]);
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].termination, "step_limit");
        assert_eq!(rows[0].iters, 10_000);
    }

    #[test]
    fn csv_schema_and_empty_report() {
        let row = ReportRow {
            method: "homotopy".into(),
            lambda: 1.5,
            residual: 1e-13,
            iters: 5,
            newton_iters: Some(8),
            time_ms: 0.42,
            termination: "converged".into(),
        };
        let nqz_row = ReportRow {
            method: "nqz".into(),
            newton_iters: None,
            ..row.clone()
        };
        let csv = render_report(&[row, nqz_row], ReportFormat::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,lambda,residual,iters,newton_iters,time_ms,termination"
        );
        assert!(lines.next().unwrap().contains(",8,"));
        assert!(lines.next().unwrap().contains(",,")); // empty newton column
        assert!(matches!(
            render_report(&[], ReportFormat::Csv),
            Err(PerronError::EmptyReport)
        ));
    }

    #[test]
    fn json_preserves_numbers() {
        let row = ReportRow {
            method: "homotopy".into(),
            lambda: std::f64::consts::PI,
            residual: 3.0303e-13,
            iters: 5,
            newton_iters: Some(8),
            time_ms: 0.125,
            termination: "converged".into(),
        };
        let json = render_report(std::slice::from_ref(&row), ReportFormat::Json).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed[0]["lambda"].as_f64().unwrap(), std::f64::consts::PI);
        assert_eq!(parsed[0]["residual"].as_f64().unwrap(), 3.0303e-13);
    }

    #[test]
    fn table1_grid_shape() {
        let specs = bench_table1();
        assert_eq!(specs.len(), 5);
        assert_eq!(specs[0].gamma, 0.0);
        assert_eq!(specs[4].gamma, 1e4);
        for s in &specs {
            assert_eq!(s.methods.len(), 2);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let specs = vec![
            ExperimentSpec::new(ExampleKind::Lgl, 3, 3, 0.0, 0)
                .with_methods(vec![Method::Homotopy]),
            ExperimentSpec::new(ExampleKind::Random, 3, 4, 1.0, 9)
                .with_methods(vec![Method::Homotopy]),
        ];
        let seq = run_specs(&specs, 1).unwrap();
        let par = run_specs(&specs, 4).unwrap();
        assert_eq!(seq.len(), par.len());
        for (a, b) in seq.iter().zip(&par) {
            assert_eq!(a[0].lambda, b[0].lambda);
            assert_eq!(a[0].iters, b[0].iters);
        }
    }
}

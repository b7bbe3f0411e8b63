//! NQZ power-type baseline for the Perron pair, with the identity-shift
//! variant that restores convergence on irreducible but non-primitive
//! tensors.
//!
//! One iteration maps `x` to the normalized entrywise root of `A x^{m-1}`
//! and sandwiches the Perron value between the extreme ratios
//! `(A x^{m-1})_i / x_i^{m-1}`. Convergence is linear with rate governed by
//! the spectral gap, so it degrades as the tensor approaches a large
//! multiple of the identity.

use std::time::{Duration, Instant};

use crate::error::{PerronError, Result};
use crate::homotopy::EigenPair;
use crate::linalg::dot;
use crate::tensor::{entrywise_pow, entrywise_powi, normalized, DenseTensor};

#[derive(Debug, Clone)]
pub struct NqzConfig {
    /// Residual tolerance for regular termination.
    pub tol: f64,
    /// Iteration cap.
    pub max_iters: usize,
    /// Identity shift applied to the preprocessed tensor; 0 is the plain
    /// method, 1 is the shift strategy used against non-primitive inputs.
    pub shift: f64,
}

impl Default for NqzConfig {
    fn default() -> Self {
        NqzConfig {
            tol: 1e-12,
            max_iters: 10_000,
            shift: 0.0,
        }
    }
}

impl NqzConfig {
    /// The identity-shift strategy (shift 1 in preprocessed units).
    pub fn with_shift() -> Self {
        NqzConfig {
            shift: 1.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(PerronError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(PerronError::InvalidConfig(
                "max_iters must be at least 1".into(),
            ));
        }
        if self.shift < 0.0 {
            return Err(PerronError::InvalidConfig(format!(
                "shift must be nonnegative, got {}",
                self.shift
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NqzTermination {
    Converged,
    IterationCap,
    /// The contraction produced a zero component: the tensor has a zero
    /// slice or is reducible, and the iteration cannot continue.
    DegenerateIterate,
}

#[derive(Debug, Clone)]
pub struct NqzReport {
    /// Final pair, un-shifted and rescaled to the original tensor.
    pub pair: EigenPair,
    /// Number of iterations (contraction evaluations) performed.
    pub iters: usize,
    pub converged: bool,
    /// Final sandwich bounds in original-tensor units.
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    /// Final stacked residual on the preprocessed (and shifted) tensor.
    pub residual: f64,
    pub termination: NqzTermination,
    pub wall_time: Duration,
}

/// One power-type update. Returns the next unit vector and the sandwich
/// bounds `min_i y_i / x_i^{m-1} <= lambda_max <= max_i y_i / x_i^{m-1}`
/// (valid for irreducible nonnegative tensors).
pub fn nqz_iterate(a: &DenseTensor, x: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    let (_, x_next, lo, hi) = step(a, x)?;
    Ok((x_next, lo, hi))
}

/// Update plus the raw contraction, so the caller can reuse it in the
/// residual test without a second pass over the tensor.
fn step(a: &DenseTensor, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64, f64)> {
    let y = a.apply_m1(x)?;
    if let Some(index) = y.iter().position(|&v| v == 0.0) {
        return Err(PerronError::DegenerateIterate { index });
    }
    let m = a.order();
    let xp = entrywise_powi(x, m as i32 - 1);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (yi, xpi) in y.iter().zip(&xp) {
        let r = yi / xpi;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let root = entrywise_pow(&y, 1.0 / (m as f64 - 1.0))?;
    let x_next = normalized(&root);
    Ok((y, x_next, lo, hi))
}

/// Runs the NQZ iteration with the uniform start vector; see
/// [`nqz_solve_from`].
pub fn nqz_solve(a: &DenseTensor, cfg: &NqzConfig) -> Result<NqzReport> {
    let x0 = vec![1.0; a.dim()];
    nqz_solve_from(a, &x0, cfg)
}

/// Runs the NQZ iteration from a positive start vector.
///
/// The tensor is divided by its largest entry and the configured identity
/// shift is added in those units. Each iteration contracts once, takes
/// `lambda = lambda_hi`, and stops when the stacked residual drops to
/// `cfg.tol` or the iteration cap is hit. The reported eigenvalue is
/// un-shifted and rescaled; a degenerate iterate yields a non-converged
/// report rather than an error.
pub fn nqz_solve_from(a: &DenseTensor, x0: &[f64], cfg: &NqzConfig) -> Result<NqzReport> {
    cfg.validate()?;
    a.validate_nonnegative()?;
    let scale = a.max_entry();
    if scale == 0.0 {
        return Err(PerronError::ZeroTensor);
    }
    if x0.len() != a.dim() {
        return Err(PerronError::DimensionMismatch {
            expected: a.dim(),
            got: x0.len(),
        });
    }
    for (index, &value) in x0.iter().enumerate() {
        if !(value > 0.0) {
            return Err(PerronError::NonPositiveVector { index, value });
        }
    }

    let started = Instant::now();
    let mut work = a.scaled(1.0 / scale);
    if cfg.shift > 0.0 {
        work = work.shifted(cfg.shift);
    }
    let m = a.order() as i32;

    let mut x = normalized(x0);
    let mut iters = 0usize;
    let mut lo = f64::NAN;
    let mut hi = f64::NAN;
    let mut res = f64::NAN;
    let termination = loop {
        iters += 1;
        let (y, x_next, lo_k, hi_k) = match step(&work, &x) {
            Ok(v) => v,
            Err(PerronError::DegenerateIterate { .. }) => break NqzTermination::DegenerateIterate,
            Err(e) => return Err(e),
        };
        lo = lo_k;
        hi = hi_k;
        let xp = entrywise_powi(&x, m - 1);
        let mut sq = 0.0;
        for i in 0..x.len() {
            let r = y[i] - hi * xp[i];
            sq += r * r;
        }
        let c = dot(&x, &x) - 1.0;
        res = (sq + c * c).sqrt();
        if res <= cfg.tol {
            break NqzTermination::Converged;
        }
        if iters >= cfg.max_iters {
            break NqzTermination::IterationCap;
        }
        x = x_next;
    };

    let converged = termination == NqzTermination::Converged;
    Ok(NqzReport {
        pair: EigenPair::new(scale * (hi - cfg.shift), x),
        iters,
        converged,
        lambda_lo: scale * (lo - cfg.shift),
        lambda_hi: scale * (hi - cfg.shift),
        residual: res,
        termination,
        wall_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::cpz_tensor;
    use crate::linalg::residual;

    #[test]
    fn iterate_fixed_point_on_rank_one() {
        let e = DenseTensor::rank_one(3, &[1.0; 3], &[1.0; 3]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let (x_next, lo, hi) = nqz_iterate(&e, &[s, s, s]).unwrap();
        assert!((lo - 9.0).abs() < 1e-12);
        assert!((hi - 9.0).abs() < 1e-12);
        for v in &x_next {
            assert!((v - s).abs() < 1e-15);
        }
    }

    #[test]
    fn iterate_bounds_on_cpz() {
        let a = cpz_tensor();
        let s = 1.0 / 3f64.sqrt();
        let (_, lo, hi) = nqz_iterate(&a, &[s, s, s]).unwrap();
        assert!((lo - 3.0).abs() < 1e-12);
        assert!((hi - 4.0).abs() < 1e-12);
    }

    #[test]
    fn iterate_fixed_point_is_eigenpair() {
        // run a few iterations on a positive tensor, then check the
        // fixed-point residual identity with the sandwich midpoint
        let e = DenseTensor::rank_one(3, &[1.0, 2.0, 0.5], &[1.5, 1.0, 2.0]).unwrap();
        let mut x = normalized(&[1.0, 1.0, 1.0]);
        for _ in 0..200 {
            let (x_next, _, _) = nqz_iterate(&e, &x).unwrap();
            x = x_next;
        }
        let (_, lo, hi) = nqz_iterate(&e, &x).unwrap();
        assert!(hi - lo < 1e-12);
        assert!(residual(&e, hi, &x).unwrap() <= 1e-12);
    }

    #[test]
    fn iterate_degenerate_on_zero_slice() {
        let mut a = DenseTensor::zeros(3, 2).unwrap();
        a.set(&[0, 0, 0], 1.0); // second slice all zero
        let s = 1.0 / 2f64.sqrt();
        assert!(matches!(
            nqz_iterate(&a, &[s, s]),
            Err(PerronError::DegenerateIterate { index: 1 })
        ));
    }

    #[test]
    fn solve_plain_caps_on_cpz() {
        let r = nqz_solve(&cpz_tensor(), &NqzConfig::default()).unwrap();
        assert!(!r.converged);
        assert_eq!(r.termination, NqzTermination::IterationCap);
        assert_eq!(r.iters, 10_000);
    }

    #[test]
    fn solve_shifted_converges_on_cpz() {
        let r = nqz_solve(&cpz_tensor(), &NqzConfig::with_shift()).unwrap();
        assert!(r.converged);
        assert!((r.pair.lambda - 11f64.sqrt()).abs() <= 1e-9);
        assert!(r.lambda_lo <= r.pair.lambda + 1e-12);
        assert!(r.pair.lambda <= r.lambda_hi + 1e-12);
    }

    #[test]
    fn solve_on_positive_tensor() {
        let e = DenseTensor::rank_one(3, &[1.0; 3], &[1.0; 3]).unwrap();
        let r = nqz_solve(&e, &NqzConfig::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iters, 1); // the uniform start is the exact eigenvector
        assert!((r.pair.lambda - 9.0).abs() < 1e-12);
    }

    #[test]
    fn solve_rejects_zero_tensor_and_bad_start() {
        let z = DenseTensor::zeros(3, 2).unwrap();
        assert!(matches!(
            nqz_solve(&z, &NqzConfig::default()),
            Err(PerronError::ZeroTensor)
        ));
        let a = cpz_tensor();
        assert!(nqz_solve_from(&a, &[1.0, 1.0, 0.0], &NqzConfig::default()).is_err());
    }

    #[test]
    fn sandwich_bounds_tighten_at_convergence() {
        let r = nqz_solve(&crate::generate::lgl_tensor(0.0), &NqzConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.lambda_lo <= r.lambda_hi);
        assert!(r.lambda_lo <= r.pair.lambda && r.pair.lambda <= r.lambda_hi);
        assert!(r.lambda_hi - r.lambda_lo <= 10.0 * 1e-12 * r.pair.lambda);
    }

    #[test]
    fn shift_does_not_move_the_eigenvalue() {
        let a = crate::generate::lgl_tensor(0.0);
        let plain = nqz_solve(&a, &NqzConfig::default()).unwrap();
        let shifted = nqz_solve(&a, &NqzConfig::with_shift()).unwrap();
        assert!(plain.converged && shifted.converged);
        assert!((plain.pair.lambda - shifted.pair.lambda).abs() <= 1e-9);
    }

    #[test]
    fn solve_degenerate_reports_not_converged() {
        let mut a = DenseTensor::zeros(3, 2).unwrap();
        a.set(&[0, 0, 0], 2.0);
        // shift keeps preprocessing valid but the plain run degenerates
        let r = nqz_solve(&a, &NqzConfig::default()).unwrap();
        assert!(!r.converged);
        assert_eq!(r.termination, NqzTermination::DegenerateIterate);
    }
}

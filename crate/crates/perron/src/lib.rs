//! Perron pair computation for nonnegative tensors.
//!
//! For an irreducible nonnegative tensor the largest eigenvalue is positive
//! and carries a unique positive unit eigenvector (the Perron pair of the
//! eigenproblem `A x^{m-1} = lambda x^{[m-1]}`). This crate computes it two
//! ways:
//!
//! * [`solve_perron`] — homotopy continuation: deform a rank-one start
//!   tensor with a closed-form Perron pair into the target, following the
//!   solution curve with Euler prediction and Newton correction. The curve
//!   stays in the positive orthant and the endpoint corrector is Newton, so
//!   the final convergence is quadratic and insensitive to the spectral gap.
//! * [`nqz_solve`] — the power-type baseline with eigenvalue sandwich
//!   bounds. Linearly convergent; slows down (or stalls) as the gap closes,
//!   which is exactly the regime the comparison harness probes.
//!
//! The `perron` binary exposes `solve`, `gen`, and `bench` subcommands over
//! a plain-text sparse tensor format; see the crate README.

pub mod error;
pub mod experiment;
pub mod generate;
pub mod homotopy;
pub mod io;
pub mod linalg;
pub mod nqz;
pub mod tensor;

pub use error::{PerronError, Result};
pub use homotopy::{
    follow_path, solve_perron, solve_perron_from, start_pair, EigenPair, HomotopyProblem,
    PathState, SolveReport, SolverConfig, Termination,
};
pub use io::{parse_tensor_file, write_tensor_file};
pub use nqz::{nqz_solve, nqz_solve_from, NqzConfig, NqzReport, NqzTermination};
pub use tensor::{DenseTensor, SpectralBounds};

//! Built-in example tensors and the pinned random generator.

use crate::error::Result;
use crate::tensor::DenseTensor;

/// Name recorded in generated file headers.
pub const GENERATOR_NAME: &str = "splitmix64";

/// SplitMix64: a seedable, platform-independent 64-bit generator. Uniform
/// doubles come from the top 53 bits, so generated tensors are byte-identical
/// across platforms for a fixed seed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` via 53-bit mantissa division.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }
}

/// The irreducible, non-primitive 3x3x3 tensor with entries
/// `a_122 = 1, a_133 = 2, a_211 = 3, a_311 = 4`. Its Perron value is
/// `sqrt(11)`, and the plain power-type iteration fails to settle on it.
pub fn cpz_tensor() -> DenseTensor {
    let mut t = DenseTensor::zeros(3, 3).expect("static shape");
    t.set(&[0, 1, 1], 1.0);
    t.set(&[0, 2, 2], 2.0);
    t.set(&[1, 0, 0], 3.0);
    t.set(&[2, 0, 0], 4.0);
    t
}

/// A fixed positive 3x3x3 tensor plus `gamma` times the identity. The
/// positive part makes it primitive for every `gamma >= 0`; growing `gamma`
/// shrinks the spectral gap and slows power-type methods.
pub fn lgl_tensor(gamma: f64) -> DenseTensor {
    #[rustfmt::skip]
    let slices: [[[f64; 3]; 3]; 3] = [
        [[0.9000, 0.6700, 0.6604],
         [0.3340, 0.1040, 0.0945],
         [0.3106, 0.0805, 0.0710]],
        [[0.0690, 0.2892, 0.0716],
         [0.6108, 0.8310, 0.6133],
         [0.0754, 0.2956, 0.0780]],
        [[0.0310, 0.0408, 0.2680],
         [0.0552, 0.0650, 0.2922],
         [0.6140, 0.6239, 0.8510]],
    ];
    let mut t = DenseTensor::zeros(3, 3).expect("static shape");
    for (i, slice) in slices.iter().enumerate() {
        for (j, row) in slice.iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                t.set(&[i, j, k], v);
            }
        }
    }
    if gamma != 0.0 {
        t = t.shifted(gamma);
    }
    t
}

/// Random tensor with entries i.i.d. uniform in `[0, 1)` plus `gamma` times
/// the identity; entries are drawn in row-major order, so the result is a
/// pure function of `(order, dim, gamma, seed)`.
pub fn random_tensor(order: usize, dim: usize, gamma: f64, seed: u64) -> Result<DenseTensor> {
    let mut t = DenseTensor::zeros(order, dim)?;
    let mut rng = SplitMix64::new(seed);
    let entries: Vec<f64> = (0..t.entries().len()).map(|_| rng.next_f64()).collect();
    t = DenseTensor::new(order, dim, entries)?;
    if gamma != 0.0 {
        t = t.shifted(gamma);
    }
    Ok(t)
}

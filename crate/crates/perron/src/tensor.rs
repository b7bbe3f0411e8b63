//! Dense order-`m` tensors with row-major storage and the multilinear
//! contractions used by the eigenvalue solvers.
//!
//! A tensor of order `m` and dimension `n` holds `n^m` entries indexed by
//! tuples `(i1, ..., im)`; the last index varies fastest. Indices are
//! 0-based internally; file formats use 1-based tuples.

use crate::error::{PerronError, Result};
use crate::linalg::{dot, norm2, Matrix};

/// Dense real tensor of order `m >= 2` and dimension `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    entries: Vec<f64>,
}

/// Eigenvalue bounds for a nonnegative tensor.
///
/// `row_min <= lambda_max <= row_max <= total` where `row_min`/`row_max` are
/// the extreme row sums (Gershgorin-type bounds) and `total` is the sum of
/// all entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    pub total: f64,
    pub row_min: f64,
    pub row_max: f64,
}

impl DenseTensor {
    /// Builds a tensor from row-major entries; `entries.len()` must be `dim^order`.
    pub fn new(order: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        if order < 2 {
            return Err(PerronError::InvalidConfig(format!(
                "tensor order must be at least 2, got {order}"
            )));
        }
        if dim < 1 {
            return Err(PerronError::InvalidConfig(
                "tensor dimension must be at least 1".into(),
            ));
        }
        let expected = checked_len(order, dim)?;
        if entries.len() != expected {
            return Err(PerronError::DimensionMismatch {
                expected,
                got: entries.len(),
            });
        }
        Ok(Self {
            order,
            dim,
            entries,
        })
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = checked_len(order, dim)?;
        Self::new(order, dim, vec![0.0; len])
    }

    /// The identity tensor: 1 on the full diagonal `(i, i, ..., i)`, 0 elsewhere.
    /// Satisfies `I x^{m-1} = x^{[m-1]}` for every `x`.
    pub fn identity(order: usize, dim: usize) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        for i in 0..dim {
            let mut lin = i;
            for _ in 1..order {
                lin = lin * dim + i;
            }
            t.entries[lin] = 1.0;
        }
        Ok(t)
    }

    /// Rank-one-structured positive tensor with entries
    /// `a_{i1}^{m-1} * b_{i2} * ... * b_{im}`; requires strictly positive `a`, `b`.
    ///
    /// Its Perron pair is known in closed form: see [`crate::homotopy::start_pair`].
    pub fn rank_one(order: usize, a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(PerronError::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        check_positive(a)?;
        check_positive(b)?;
        checked_len(order, a.len())?;
        if order < 2 {
            return Err(PerronError::InvalidConfig(format!(
                "tensor order must be at least 2, got {order}"
            )));
        }
        let mut buf: Vec<f64> = a.iter().map(|&v| v.powi(order as i32 - 1)).collect();
        for _ in 1..order {
            let mut next = Vec::with_capacity(buf.len() * b.len());
            for &u in &buf {
                for &w in b {
                    next.push(u * w);
                }
            }
            buf = next;
        }
        Self::new(order, a.len(), buf)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Linear (row-major) position of a 0-based index tuple.
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.entries[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let lin = self.linear_index(idx);
        self.entries[lin] = value;
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Errors with the offending position if any entry is negative.
    pub fn validate_nonnegative(&self) -> Result<()> {
        for (index, &value) in self.entries.iter().enumerate() {
            if value < 0.0 {
                return Err(PerronError::NegativeEntry { index, value });
            }
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> DenseTensor {
        DenseTensor {
            order: self.order,
            dim: self.dim,
            entries: self.entries.iter().map(|&v| c * v).collect(),
        }
    }

    /// `self + gamma * I`; adds `gamma` on the full diagonal.
    pub fn shifted(&self, gamma: f64) -> DenseTensor {
        let mut out = self.clone();
        for i in 0..self.dim {
            let mut lin = i;
            for _ in 1..self.order {
                lin = lin * self.dim + i;
            }
            out.entries[lin] += gamma;
        }
        out
    }

    /// The vector `A x^{m-1}` with `(A x^{m-1})_i = sum A_{i i2..im} x_{i2}...x_{im}`.
    pub fn apply_m1(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut cur = contract_last(&self.entries, x);
        for _ in 0..self.order - 2 {
            cur = contract_last(&cur, x);
        }
        Ok(cur)
    }

    /// The matrix `A x^{m-2}` with `(A x^{m-2})_{ij} = sum A_{i j i3..im} x_{i3}...x_{im}`.
    /// For `m = 2` this is the tensor itself (empty product).
    pub fn apply_m2(&self, x: &[f64]) -> Result<Matrix> {
        self.check_dim(x)?;
        let mut cur = self.entries.clone();
        for _ in 0..self.order - 2 {
            cur = contract_last(&cur, x);
        }
        Matrix::from_vec(self.dim, self.dim, cur)
    }

    /// The multilinear form `A x^m`. Contracts every mode independently of
    /// [`Self::apply_m1`], so `A x^m == dot(x, A x^{m-1})` is a checkable identity.
    pub fn multilinear_form(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let mut cur = contract_last(&self.entries, x);
        for _ in 0..self.order - 1 {
            cur = contract_last(&cur, x);
        }
        Ok(cur[0])
    }

    /// Averages the tensor over all permutations of its trailing `m-1`
    /// indices. The result leaves `A x^{m-1}` unchanged and makes the
    /// Jacobian formula `(m-1) A x^{m-2}` valid.
    pub fn partial_symmetrize(&self) -> DenseTensor {
        let m = self.order;
        let n = self.dim;
        let perms = permutations(m - 1);
        let inv = 1.0 / perms.len() as f64;
        let mut out = vec![0.0; self.entries.len()];
        let mut idx = vec![0usize; m];
        for &v in &self.entries {
            if v != 0.0 {
                let scaled = v * inv;
                for p in &perms {
                    let mut lin = idx[0];
                    for &pos in p {
                        lin = lin * n + idx[1 + pos];
                    }
                    out[lin] += scaled;
                }
            }
            advance(&mut idx, n);
        }
        DenseTensor {
            order: m,
            dim: n,
            entries: out,
        }
    }

    /// Jacobian of `x -> A x^{m-1}`, i.e. `(m-1) * (A x^{m-2})`.
    ///
    /// Only valid when the tensor is symmetric in its trailing indices
    /// (output of [`Self::partial_symmetrize`] or structurally symmetric).
    pub fn jacobian(&self, x: &[f64]) -> Result<Matrix> {
        let mut m = self.apply_m2(x)?;
        m.scale(self.order as f64 - 1.0);
        Ok(m)
    }

    /// Gershgorin-type eigenvalue bounds; errors on a negative entry.
    pub fn spectral_bounds(&self) -> Result<SpectralBounds> {
        self.validate_nonnegative()?;
        let slice = self.entries.len() / self.dim;
        let mut row_min = f64::INFINITY;
        let mut row_max = f64::NEG_INFINITY;
        let mut total = 0.0;
        for chunk in self.entries.chunks_exact(slice) {
            let r: f64 = chunk.iter().sum();
            row_min = row_min.min(r);
            row_max = row_max.max(r);
            total += r;
        }
        Ok(SpectralBounds {
            total,
            row_min,
            row_max,
        })
    }

    /// Strong connectivity of the digraph with an edge `i -> j` whenever some
    /// entry `A_{i i2..im} > 0` has `j` among its trailing indices.
    ///
    /// `false` proves the tensor reducible; `true` is necessary but not
    /// sufficient for irreducibility, so treat this as a diagnostic only.
    pub fn is_weakly_irreducible(&self) -> bool {
        let n = self.dim;
        if n == 1 {
            return true;
        }
        let mut adj = vec![false; n * n];
        let mut radj = vec![false; n * n];
        let mut idx = vec![0usize; self.order];
        for &v in &self.entries {
            if v > 0.0 {
                let i = idx[0];
                for &j in &idx[1..] {
                    adj[i * n + j] = true;
                    radj[j * n + i] = true;
                }
            }
            advance(&mut idx, n);
        }
        reaches_all(&adj, n) && reaches_all(&radj, n)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(PerronError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Entrywise power `x^[alpha]` for fractional `alpha`; defined only for
/// entrywise-nonnegative input.
pub fn entrywise_pow(x: &[f64], alpha: f64) -> Result<Vec<f64>> {
    for (index, &value) in x.iter().enumerate() {
        if value < 0.0 {
            return Err(PerronError::NegativePower { index, value });
        }
    }
    Ok(x.iter().map(|&v| v.powf(alpha)).collect())
}

/// Entrywise integer power `x^[k]`; valid for any sign.
pub fn entrywise_powi(x: &[f64], k: i32) -> Vec<f64> {
    x.iter().map(|&v| v.powi(k)).collect()
}

fn checked_len(order: usize, dim: usize) -> Result<usize> {
    let mut len = 1usize;
    for _ in 0..order {
        len = len.checked_mul(dim).ok_or_else(|| {
            PerronError::InvalidConfig(format!("tensor size {dim}^{order} overflows"))
        })?;
    }
    Ok(len)
}

fn check_positive(v: &[f64]) -> Result<()> {
    for (index, &value) in v.iter().enumerate() {
        if !(value > 0.0) {
            return Err(PerronError::NonPositiveVector { index, value });
        }
    }
    Ok(())
}

/// Contracts the last mode: views `buf` as a `(len/n) x n` matrix and
/// multiplies by `x`.
fn contract_last(buf: &[f64], x: &[f64]) -> Vec<f64> {
    buf.chunks_exact(x.len()).map(|row| dot(row, x)).collect()
}

/// Odometer increment of a 0-based index tuple with radix `n`.
fn advance(idx: &mut [usize], n: usize) {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return;
        }
        *d = 0;
    }
}

/// All permutations of `0..k` (k is small: `m - 1 <= 3` in practice).
fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..k).collect();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, out);
        items.swap(start, i);
    }
}

fn reaches_all(adj: &[bool], n: usize) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if adj[u * n + v] && !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Unit-scale normalization helper shared by solvers: `v / ||v||`.
pub(crate) fn normalized(v: &[f64]) -> Vec<f64> {
    let nrm = norm2(v);
    v.iter().map(|&u| u / nrm).collect()
}

//! Fourier coefficients of a weight and truncated block Toeplitz moment matrices.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{c, fro, rcond, set_block, zeros, CMat};
use crate::weights::WeightSpec;

/// Default cap on the number of quadrature nodes.
pub const M_MAX: usize = 1 << 20;

/// `mu(j)` for `j` in `[-J, J]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub n_dim: usize,
    pub j_max: usize,
    /// `blocks[j + J] = mu(j)`.
    pub blocks: Vec<CMat>,
    pub quadrature_size: usize,
    pub est_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    L,
    R,
}

impl MomentTable {
    /// Table from explicit blocks indexed `-J..=J`.
    pub fn from_blocks(blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len().is_multiple_of(2) {
            return Err(Error::InvalidSpec("moment blocks must cover -J..=J".into()));
        }
        let n_dim = blocks[0].nrows();
        Ok(MomentTable {
            n_dim,
            j_max: blocks.len() / 2,
            blocks,
            quadrature_size: 0,
            est_error: 0.0,
        })
    }

    /// `mu(j)`, zero-filled outside the table would hide truncation, so this errors instead.
    pub fn get(&self, j: i64) -> Result<&CMat> {
        let jm = self.j_max as i64;
        if j.abs() > jm {
            return Err(Error::Range { index: j, limit: jm });
        }
        Ok(&self.blocks[(j + jm) as usize])
    }

    /// `mu(j)`; panics outside the table.
    pub fn mu(&self, j: i64) -> &CMat {
        &self.blocks[(j + self.j_max as i64) as usize]
    }

    pub fn max_norm(&self) -> f64 {
        self.blocks.iter().map(fro).fold(0.0, f64::max)
    }
}

fn dft(samples: &[CMat], j_max: usize, n_dim: usize) -> Vec<CMat> {
    let m = samples.len();
    let jm = j_max as i64;
    (-jm..=jm)
        .map(|j| {
            let mut acc = zeros(n_dim, n_dim);
            for (idx, w) in samples.iter().enumerate() {
                let r = (j * idx as i64).rem_euclid(m as i64) as f64;
                acc += w * c(0.0, -2.0 * PI * r / m as f64).exp();
            }
            acc / c(m as f64, 0.0)
        })
        .collect()
}

/// Trapezoid-rule moments with node doubling until the blockwise change is below `1e-12 (1 + max norm)`.
pub fn compute_moments(spec: &WeightSpec, j_max: usize, initial_m: usize) -> Result<MomentTable> {
    compute_moments_with(spec, j_max, initial_m, M_MAX)
}

pub fn compute_moments_with(spec: &WeightSpec, j_max: usize, initial_m: usize, m_max: usize) -> Result<MomentTable> {
    if j_max < 1 {
        return Err(Error::InvalidSpec("J must be at least 1".into()));
    }
    spec.validate()?;
    let n = spec.n_dim();
    let mut m = initial_m.max(2 * j_max + 2).next_power_of_two();
    let mut prev = dft(&spec.sample_circle(m)?, j_max, n);
    let mut iterations = 0;
    let mut change = f64::INFINITY;
    while 2 * m <= m_max {
        m *= 2;
        iterations += 1;
        let next = dft(&spec.sample_circle(m)?, j_max, n);
        change = next
            .iter()
            .zip(prev.iter())
            .map(|(a, b)| fro(&(a - b)))
            .fold(0.0, f64::max);
        let scale = next.iter().map(fro).fold(0.0, f64::max);
        prev = next;
        if change < 1e-12 * (1.0 + scale) {
            return Ok(MomentTable {
                n_dim: n,
                j_max,
                blocks: prev,
                quadrature_size: m,
                est_error: change,
            });
        }
    }
    Err(Error::Convergence {
        iterations,
        last_change: change,
    })
}

/// `M^L_[n]` (block `(i, j) = mu(i - j)`) or `M^R_[n]` (block `(i, j) = mu(j - i)`).
pub fn truncated_moment_matrix(table: &MomentTable, n: usize, side: Side) -> Result<CMat> {
    if n > table.j_max {
        return Err(Error::Range {
            index: n as i64,
            limit: table.j_max as i64,
        });
    }
    let d = table.n_dim;
    let mut m = zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            let k = match side {
                Side::L => i as i64 - j as i64,
                Side::R => j as i64 - i as i64,
            };
            set_block(&mut m, i, j, table.mu(k));
        }
    }
    Ok(m)
}

/// Reciprocal condition numbers of `M^L_[n]` and `M^R_[n]` for `n = 1..=n_max`.
pub fn quasi_definiteness(table: &MomentTable, n_max: usize) -> Result<Vec<(usize, f64, f64)>> {
    (1..=n_max)
        .map(|n| {
            let l = truncated_moment_matrix(table, n, Side::L)?;
            let r = truncated_moment_matrix(table, n, Side::R)?;
            Ok((n, rcond(&l), rcond(&r)))
        })
        .collect()
}

/// Threshold below which a truncated moment matrix is flagged.
pub const QUASI_DEFINITE_RCOND: f64 = 1e-13;

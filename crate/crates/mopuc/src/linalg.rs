//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

/// Reciprocal condition below which a matrix is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-14;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn scalar(n: usize, s: C64) -> CMat {
    CMat::from_diagonal_element(n, n, s)
}

/// Builds a matrix from real row-major entries.
pub fn real(rows: &[&[f64]]) -> CMat {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, cols, |i, j| c(rows[i][j], 0.0))
}

pub fn diag(entries: &[C64]) -> CMat {
    let n = entries.len();
    CMat::from_fn(n, n, |i, j| if i == j { entries[i] } else { c(0.0, 0.0) })
}

#[inline]
pub fn dag(a: &CMat) -> CMat {
    a.adjoint()
}

/// Frobenius norm.
#[inline]
pub fn fro(a: &CMat) -> f64 {
    a.norm()
}

pub fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

fn norm1(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn raw_inverse(a: &CMat) -> Option<CMat> {
    a.clone().lu().try_inverse()
}

/// Reciprocal 1-norm condition number from a partial-pivot LU inverse; 0 when singular.
pub fn rcond(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    match raw_inverse(a) {
        Some(inv) => {
            let k = norm1(a) * norm1(&inv);
            if k.is_finite() && k > 0.0 {
                1.0 / k
            } else {
                0.0
            }
        }
        None => 0.0,
    }
}

/// Inverse with a singularity guard; `what` names the matrix in the error.
pub fn inv(a: &CMat, what: &str) -> Result<CMat> {
    let r = rcond(a);
    if r < SINGULAR_RCOND {
        return Err(Error::Singular {
            what: format!("{what} (rcond {r:.3e})"),
        });
    }
    raw_inverse(a).ok_or_else(|| Error::Singular {
        what: what.to_string(),
    })
}

/// Solves `a x = b` by partial-pivot LU.
pub fn solve(a: &CMat, b: &CMat, what: &str) -> Result<CMat> {
    let r = rcond(a);
    if r < SINGULAR_RCOND {
        return Err(Error::Singular {
            what: format!("{what} (rcond {r:.3e})"),
        });
    }
    a.clone().lu().solve(b).ok_or_else(|| Error::Singular {
        what: what.to_string(),
    })
}

/// Solves `x a = b` (right division).
pub fn solve_right(a: &CMat, b: &CMat, what: &str) -> Result<CMat> {
    Ok(solve(&a.transpose(), &b.transpose(), what)?.transpose())
}

pub fn expm(a: &CMat) -> CMat {
    a.clone().exp()
}

pub fn block(m: &CMat, i: usize, j: usize, n: usize) -> CMat {
    m.view((i * n, j * n), (n, n)).into_owned()
}

pub fn set_block(m: &mut CMat, i: usize, j: usize, b: &CMat) {
    let n = b.nrows();
    m.view_mut((i * n, j * n), (n, n)).copy_from(b);
}

/// Assembles a 2x2 block matrix.
pub fn block2(a: &CMat, b: &CMat, cc: &CMat, d: &CMat) -> CMat {
    let n = a.nrows();
    let mut m = zeros(2 * n, 2 * n);
    set_block(&mut m, 0, 0, a);
    set_block(&mut m, 0, 1, b);
    set_block(&mut m, 1, 0, cc);
    set_block(&mut m, 1, 1, d);
    m
}

/// Evaluates `sum_k coeffs[k] z^k` by Horner's rule.
pub fn poly_eval(coeffs: &[CMat], z: C64) -> CMat {
    let n = coeffs.first().map_or(0, |m| m.nrows());
    let mut acc = zeros(n, n);
    for ck in coeffs.iter().rev() {
        acc = acc * z + ck;
    }
    acc
}

/// Derivative of `sum_k coeffs[k] z^k`.
pub fn poly_deriv_eval(coeffs: &[CMat], z: C64) -> CMat {
    let n = coeffs.first().map_or(0, |m| m.nrows());
    let mut acc = zeros(n, n);
    for (k, ck) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + ck * c(k as f64, 0.0);
    }
    acc
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Relative residual `‖a - b‖ / (1 + ‖b‖)`.
pub fn rel(a: &CMat, b: &CMat) -> f64 {
    fro(&(a - b)) / (1.0 + fro(b))
}

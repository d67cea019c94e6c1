//! Single-valued N=2 Fuchsian weights built by shearing and diagonalisation.
//!
//! The Pearson coefficient is `W(z) = diag(p, p+k)/z + A0 + A1 z` with
//! `A0 = [[a0, b0], [c0, d0]]` and `A1 = [[a1, b1], [c1, d1]]`.

use crate::error::{Error, Result};
use crate::linalg::{c, eye, fro, zeros, CMat, C64};
use crate::weights::{LaurentPoly, PearsonSpec};

/// The eight scalars `a0, b0, c0, d0, a1, b1, c1, d1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuchsianParams {
    pub a0: C64,
    pub b0: C64,
    pub c0: C64,
    pub d0: C64,
    pub a1: C64,
    pub b1: C64,
    pub c1: C64,
    pub d1: C64,
}

impl FuchsianParams {
    pub fn from_array(v: [C64; 8]) -> Self {
        FuchsianParams {
            a0: v[0],
            b0: v[1],
            c0: v[2],
            d0: v[3],
            a1: v[4],
            b1: v[5],
            c1: v[6],
            d1: v[7],
        }
    }

    pub fn from_real(v: [f64; 8]) -> Self {
        Self::from_array(v.map(|x| c(x, 0.0)))
    }

    pub fn to_array(&self) -> [C64; 8] {
        [
            self.a0, self.b0, self.c0, self.d0, self.a1, self.b1, self.c1, self.d1,
        ]
    }

    pub fn a0_matrix(&self) -> CMat {
        m2(self.a0, self.b0, self.c0, self.d0)
    }

    pub fn a1_matrix(&self) -> CMat {
        m2(self.a1, self.b1, self.c1, self.d1)
    }

    fn max_abs(&self) -> f64 {
        self.to_array().iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

fn m2(a: C64, b: C64, cc: C64, d: C64) -> CMat {
    CMat::from_row_slice(2, 2, &[a, b, cc, d])
}

/// Closed-form obstruction for `k = 1, 2, 3`.
///
/// For `k = 3` the second diagonalisation uses `t = c0 / 2`, since the residue
/// after the first shear is `[[p, 0], [c0, p + 2]]`.
pub fn theta(k: u8, q: &FuchsianParams) -> Result<C64> {
    let half = c(0.5, 0.0);
    match k {
        1 => Ok(q.c0),
        2 => Ok(q.c0 * (q.a0 - q.d0) + q.c1),
        3 => {
            let e = q.a0 - q.d0;
            Ok(q.c0 * half * ((q.a1 - q.d1) + e * e) - q.b0 * q.c0 * q.c0 * c(0.25, 0.0) + q.c1 * e)
        }
        _ => Err(Error::InvalidSpec(format!("k must be 1, 2 or 3, got {k}"))),
    }
}

/// Constraint tolerance `1e-12 (1 + max |input|)`.
pub fn constraint_tol(q: &FuchsianParams) -> f64 {
    1e-12 * (1.0 + q.max_abs())
}

pub fn pearson_coefficients(p: i64, k: u8, q: &FuchsianParams) -> (CMat, CMat, CMat) {
    let wm1 = m2(c(p as f64, 0.0), c(0.0, 0.0), c(0.0, 0.0), c((p + k as i64) as f64, 0.0));
    (wm1, q.a0_matrix(), q.a1_matrix())
}

fn trim(mut lp: LaurentPoly) -> LaurentPoly {
    while lp.coeffs.len() > 1 && fro(&lp.coeffs[0]) == 0.0 {
        lp.coeffs.remove(0);
        lp.lo += 1;
    }
    while lp.coeffs.len() > 1 && fro(lp.coeffs.last().unwrap()) == 0.0 {
        lp.coeffs.pop();
    }
    lp
}

/// Gauge by `S = diag(1, 1/z)`: `W -> S' S^{-1} + S W S^{-1}`.
pub fn shear(w: &LaurentPoly) -> LaurentPoly {
    let lo = w.lo - 1;
    let hi = w.hi() + 1;
    let coeffs = (lo..=hi)
        .map(|k| {
            let a = w.coeff(k)[(0, 0)];
            let b = w.coeff(k - 1)[(0, 1)];
            let cc = w.coeff(k + 1)[(1, 0)];
            let mut d = w.coeff(k)[(1, 1)];
            if k == -1 {
                d -= 1.0;
            }
            m2(a, b, cc, d)
        })
        .collect();
    trim(LaurentPoly::new(lo, coeffs))
}

fn lower_unit(t: C64) -> CMat {
    m2(c(1.0, 0.0), c(0.0, 0.0), t, c(1.0, 0.0))
}

/// Constant gauge `W -> T W T^{-1}` with `T = [[1, 0], [t, 1]]`.
pub fn conjugate(w: &LaurentPoly, t: C64) -> LaurentPoly {
    let tm = lower_unit(t);
    let ti = lower_unit(-t);
    LaurentPoly::new(w.lo, w.coeffs.iter().map(|m| &tm * m * &ti).collect())
}

fn laurent_mul(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    let n = a.n_dim();
    let len = a.coeffs.len() + b.coeffs.len() - 1;
    let mut coeffs = vec![zeros(n, n); len];
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            coeffs[i + j] += x * y;
        }
    }
    trim(LaurentPoly::new(a.lo + b.lo, coeffs))
}

/// Outcome of the shearing chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// Regular part `W_0^(k), ..., W_K^(k)` of the final system.
    pub windows: Vec<CMat>,
    /// Residue `[[p, 0], [theta, p]]` of the final system.
    pub residue: CMat,
    /// Lower-triangular diagonalisers used between shears.
    pub diagonalisers: Vec<C64>,
    pub theta: C64,
    /// `G(z) z^p` with `w = G(z) z^p Phi(z)`.
    pub prefactor: LaurentPoly,
}

/// Applies `k` shears with diagonalisations in between.
pub fn reduce(p: i64, k: u8, q: &FuchsianParams) -> Result<Reduction> {
    if !(1..=3).contains(&k) {
        return Err(Error::InvalidSpec(format!("k must be 1, 2 or 3, got {k}")));
    }
    let (wm1, a0, a1) = pearson_coefficients(p, k, q);
    let mut w = LaurentPoly::new(-1, vec![wm1, a0, a1]);
    let mut ts = Vec::new();
    for step in 1..=k {
        w = shear(&w);
        if step < k {
            let r = w.coeff(-1);
            let gap = r[(1, 1)] - r[(0, 0)];
            let t = r[(1, 0)] / gap;
            w = conjugate(&w, t);
            ts.push(t);
        }
    }
    let residue = w.coeff(-1);
    let hi = w.hi().max(0);
    let windows = (0..=hi).map(|j| w.coeff(j)).collect();

    let s_inv = LaurentPoly::new(0, vec![m2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), m2(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0))]);
    let mut g = s_inv.clone();
    for t in &ts {
        g = laurent_mul(&g, &LaurentPoly::new(0, vec![lower_unit(-*t)]));
        g = laurent_mul(&g, &s_inv);
    }
    let prefactor = LaurentPoly::new(g.lo + p as i32, g.coeffs);
    Ok(Reduction {
        windows,
        theta: residue[(1, 0)],
        residue,
        diagonalisers: ts,
        prefactor,
    })
}

/// Taylor coefficients `Phi_1..Phi_M` of the solution of `Phi' = (sum_i W_i z^i) Phi`, `Phi(0) = I`.
pub fn phi_series(windows: &[CMat], order: usize) -> Result<Vec<CMat>> {
    if order < 1 {
        return Err(Error::InvalidSpec("series order must be at least 1".into()));
    }
    let n = windows.first().map_or(2, |m| m.nrows());
    let mut phi = vec![eye(n)];
    for j in 1..=order {
        let mut acc = zeros(n, n);
        for (i, wi) in windows.iter().enumerate() {
            if i < j {
                acc += wi * &phi[j - 1 - i];
            }
        }
        phi.push(acc / c(j as f64, 0.0));
    }
    phi.remove(0);
    Ok(phi)
}

/// Doubles the order until `‖Phi_M‖ r^M < 1e-14` and the tail of the last doubling is below `1e-12`.
pub fn auto_order(windows: &[CMat], radius: f64) -> Result<usize> {
    let mut m = 16;
    while m <= 1 << 14 {
        let phi = phi_series(windows, m)?;
        let last = fro(&phi[m - 1]) * radius.powi(m as i32);
        let tail: f64 = (m / 2..m)
            .map(|j| fro(&phi[j]) * radius.powi(j as i32 + 1))
            .sum();
        if last.is_finite() && last < 1e-14 && tail < 1e-12 {
            return Ok(m);
        }
        m *= 2;
    }
    Err(Error::Convergence {
        iterations: 10,
        last_change: f64::NAN,
    })
}

/// `w(z) = G(z) z^p (I + Phi_1 z + ...)` with a validated radius.
#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianSeries {
    pub p: i64,
    pub k: u8,
    pub params: FuchsianParams,
    pub prefactor: LaurentPoly,
    pub windows: Vec<CMat>,
    /// `phi[0] = I`, then `Phi_1..Phi_M`.
    pub phi: Vec<CMat>,
    pub radius: f64,
    pub theta: C64,
}

impl FuchsianSeries {
    pub fn order(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        let tol = constraint_tol(&self.params);
        if self.theta.norm() > tol {
            return Err(Error::Constraint {
                residual: self.theta.norm(),
                tol,
            });
        }
        Ok(())
    }

    pub fn eval(&self, z: C64) -> Result<CMat> {
        if z.norm() == 0.0 {
            return Err(Error::Domain("weight evaluated at z = 0".into()));
        }
        if z.norm() > self.radius * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "|z| = {} outside validated series radius {}",
                z.norm(),
                self.radius
            )));
        }
        let mut acc = zeros(2, 2);
        for ph in self.phi.iter().rev() {
            acc = acc * z + ph;
        }
        Ok(self.prefactor.eval(z) * acc)
    }

    /// Pearson data `{-1: diag(p, p+k), 0: A0, 1: A1}` with base point 1.
    pub fn pearson(&self) -> Result<PearsonSpec> {
        let (wm1, a0, a1) = pearson_coefficients(self.p, self.k, &self.params);
        let mut coeffs = std::collections::BTreeMap::new();
        coeffs.insert(-1, wm1);
        coeffs.insert(0, a0);
        coeffs.insert(1, a1);
        PearsonSpec::new(coeffs, c(1.0, 0.0), self.eval(c(1.0, 0.0))?)
    }
}

/// Builds the single-valued weight for `W_{-1} = diag(p, p+k)`.
///
/// `order = None` picks the order by the doubling rule at the given radius.
pub fn fuchsian_weight_n2(p: i64, k: u8, q: &FuchsianParams, order: Option<usize>, radius: f64) -> Result<FuchsianSeries> {
    let red = reduce(p, k, q)?;
    let tol = constraint_tol(q);
    let closed = theta(k, q)?;
    if closed.norm() > tol || red.theta.norm() > tol {
        return Err(Error::Constraint {
            residual: closed.norm().max(red.theta.norm()),
            tol,
        });
    }
    let m = match order {
        Some(m) => m,
        None => auto_order(&red.windows, radius)?,
    };
    let mut phi = vec![eye(2)];
    phi.extend(phi_series(&red.windows, m)?);
    Ok(FuchsianSeries {
        p,
        k,
        params: *q,
        prefactor: red.prefactor,
        windows: red.windows,
        phi,
        radius,
        theta: red.theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_prefactor() {
        let q = FuchsianParams::from_real([0.0; 8]);
        let f = fuchsian_weight_n2(0, 1, &q, Some(4), 2.0).unwrap();
        let z = c(0.3, 0.8);
        let w = f.eval(z).unwrap();
        assert!((w[(0, 0)] - 1.0).norm() < 1e-15);
        assert!((w[(1, 1)] - z).norm() < 1e-15);
        assert!(w[(0, 1)].norm() + w[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn k1_constraint_reports_residual() {
        let mut v = [0.0; 8];
        v[2] = 0.1;
        let q = FuchsianParams::from_real(v);
        match fuchsian_weight_n2(0, 1, &q, Some(4), 2.0) {
            Err(Error::Constraint { residual, .. }) => assert!((residual - 0.1).abs() < 1e-15),
            other => panic!("expected constraint error, got {other:?}"),
        }
    }

    #[test]
    fn scalar_phi_is_exponential() {
        let a = c(0.7, 0.0);
        let phi = phi_series(&[eye(1) * a, zeros(1, 1), zeros(1, 1)], 6).unwrap();
        let mut fact = 1.0;
        for (j, ph) in phi.iter().enumerate() {
            fact *= (j + 1) as f64;
            assert!((ph[(0, 0)] - a.powu(j as u32 + 1) / fact).norm() < 1e-15);
        }
    }
}

//! Szegő transfer matrices `R_n(z)`, the Pearson matrix `M_n(z)` and their identities.

use std::f64::consts::PI;

use crate::cauchy_rhp::{Method, RhpContext};
use crate::error::{Error, Result};
use crate::linalg::{block2, c, eye, fro, inv, zeros, CMat, C64};
use crate::szego::VerblunskyLattice;
use crate::weights::{PearsonSpec, SingularityClass, SingularityKind};

/// `R_n(z) = R0 + Rm1 / z`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub n: usize,
    pub r0: CMat,
    pub rm1: CMat,
}

impl TransferMatrix {
    pub fn eval(&self, z: C64) -> CMat {
        &self.r0 + &self.rm1 / z
    }

    pub fn deriv(&self, z: C64) -> CMat {
        -&self.rm1 / (z * z)
    }

    /// `[aL1[n+1]; -hR[n]^-1]` and `[aR2d[n], -hR[n]]`, whose product is `Rm1`.
    pub fn dyadic_factors(lat: &VerblunskyLattice, n: usize) -> Result<(CMat, CMat)> {
        need(lat, n + 1)?;
        let hinv = inv(&lat.h_r[n], "H^R")?;
        Ok((stack(&lat.a_l1[n + 1], &-hinv), row(&lat.a_r2d[n], &-&lat.h_r[n])))
    }
}

fn need(lat: &VerblunskyLattice, top: usize) -> Result<()> {
    if top > lat.n_max {
        return Err(Error::Range {
            index: top as i64,
            limit: lat.n_max as i64,
        });
    }
    Ok(())
}

fn stack(a: &CMat, b: &CMat) -> CMat {
    let d = a.nrows();
    let mut m = zeros(2 * d, d);
    m.view_mut((0, 0), (d, d)).copy_from(a);
    m.view_mut((d, 0), (d, d)).copy_from(b);
    m
}

fn row(a: &CMat, b: &CMat) -> CMat {
    let d = a.nrows();
    let mut m = zeros(d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(a);
    m.view_mut((0, d), (d, d)).copy_from(b);
    m
}

fn rel_gap(a: &CMat, b: &CMat) -> f64 {
    fro(&(a - b)) / (1.0 + fro(b))
}

pub fn transfer_matrix(lat: &VerblunskyLattice, n: usize) -> Result<TransferMatrix> {
    need(lat, n + 1)?;
    let d = lat.n_dim();
    let a = &lat.a_l1[n + 1];
    let ad = &lat.a_r2d[n];
    let h = &lat.h_r[n];
    let hinv = inv(h, "H^R")?;
    Ok(TransferMatrix {
        n,
        r0: block2(&eye(d), &zeros(d, d), &zeros(d, d), &zeros(d, d)),
        rm1: block2(&(a * ad), &-(a * h), &-(&hinv * ad), &eye(d)),
    })
}

/// `Rm1 [aL1[n]; -hR[n-1]^-1] = [aL1[n+1]; -hR[n]^-1]`, relative residual.
pub fn dyadic_residual(lat: &VerblunskyLattice, n: usize) -> Result<f64> {
    let t = transfer_matrix(lat, n)?;
    let (l, r) = TransferMatrix::dyadic_factors(lat, n)?;
    let rank = rel_gap(&(&l * r), &t.rm1);
    if n == 0 {
        return Ok(rank);
    }
    let col = stack(&lat.a_l1[n], &-inv(&lat.h_r[n - 1], "H^R")?);
    Ok(rank.max(rel_gap(&(&t.rm1 * col), &l)))
}

/// Residuals of `Y_{n+1} = R_n Y_n diag(zI, I)` and `X_{n+1} = R_n X_n diag(I, zI)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferResidual {
    pub y: f64,
    pub x: f64,
}

pub fn check_transfer(ctx: &RhpContext, n: usize, samples: &[C64], method: Method) -> Result<TransferResidual> {
    let d = ctx.n_dim();
    let t = transfer_matrix(&ctx.lattice, n)?;
    let mut worst = TransferResidual { y: 0.0, x: 0.0 };
    for &z in samples {
        let f0 = ctx.frame(n, z, method, false)?;
        let f1 = ctx.frame(n + 1, z, method, false)?;
        let r = t.eval(z);
        let dy = block2(&(eye(d) * z), &zeros(d, d), &zeros(d, d), &eye(d));
        let dx = block2(&eye(d), &zeros(d, d), &zeros(d, d), &(eye(d) * z));
        worst.y = worst.y.max(rel_gap(&(&r * &f0.y * dy), &f1.y));
        worst.x = worst.x.max(rel_gap(&(&r * &f0.x * dx), &f1.x));
    }
    Ok(worst)
}

/// `Y_n` against `R_{n-1} ... R_0 Y_0 diag(z^n I, I)`.
pub fn product_form_residual(ctx: &RhpContext, n: usize, samples: &[C64], method: Method) -> Result<f64> {
    let d = ctx.n_dim();
    let mut worst: f64 = 0.0;
    for &z in samples {
        let mut acc = ctx.frame(0, z, method, false)?.y;
        for m in 0..n {
            acc = transfer_matrix(&ctx.lattice, m)?.eval(z) * acc;
        }
        let zn = block2(&(eye(d) * z.powi(n as i32)), &zeros(d, d), &zeros(d, d), &eye(d));
        worst = worst.max(rel_gap(&(acc * zn), &ctx.frame(n, z, method, false)?.y));
    }
    Ok(worst)
}

/// `R_n = Y_{n+1} diag(z^-1 I, I) Y_n^-1` from both boundary values at each sample; max relative jump.
pub fn transfer_jump(ctx: &RhpContext, n: usize, samples: &[C64]) -> Result<f64> {
    let d = ctx.n_dim();
    let mut worst: f64 = 0.0;
    for &zeta in samples {
        let (y0p, y0m, _, _) = ctx.boundary_values(n, zeta)?;
        let (y1p, y1m, _, _) = ctx.boundary_values(n + 1, zeta)?;
        let s = block2(&(eye(d) / zeta), &zeros(d, d), &zeros(d, d), &eye(d));
        let rp = &y1p * &s * inv(&y0p, "Y_n+")?;
        let rm = &y1m * &s * inv(&y0m, "Y_n-")?;
        worst = worst.max(rel_gap(&rp, &rm));
    }
    Ok(worst)
}

/// Leading coefficient `M_n^[0]` of `M_n` at the origin, of pole order `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct PearsonLeading {
    pub n: usize,
    pub m0: CMat,
    pub order: u32,
}

pub fn pearson_leading(lat: &VerblunskyLattice, n: usize, class: &SingularityClass) -> Result<PearsonLeading> {
    need(lat, n)?;
    let d = lat.n_dim();
    let w = class.leading(n);
    let m0 = if n == 0 {
        block2(&w, &-(&w * &lat.h_r[0]), &zeros(d, d), &zeros(d, d))
    } else {
        let col = stack(&lat.a_l1[n], &-inv(&lat.h_r[n - 1], "H^R")?);
        col * w * row(&lat.a_r2d[n], &-&lat.h_r[n])
    };
    Ok(PearsonLeading {
        n,
        m0,
        order: class.order(),
    })
}

/// `M^[0]_{n+1} Rm1 - Rm1 M^[0]_n` minus `-Rm1` (ordinary, Fuchsian) or `0` (non-Fuchsian).
pub fn compatibility_residual(lat: &VerblunskyLattice, class: &SingularityClass, n: usize) -> Result<f64> {
    let t = transfer_matrix(lat, n)?;
    let a = pearson_leading(lat, n, class)?.m0;
    let b = pearson_leading(lat, n + 1, class)?.m0;
    let lhs = &b * &t.rm1 - &t.rm1 * &a;
    let want = match class.kind {
        SingularityKind::NonFuchsian(_) => zeros(lhs.nrows(), lhs.ncols()),
        _ => -&t.rm1,
    };
    Ok(fro(&(&lhs - &want)) / (1.0 + fro(&t.rm1) * (1.0 + fro(&a) + fro(&b))))
}

/// Where `W = w' w^-1` comes from when assembling `M_n`.
#[derive(Clone, Copy)]
pub enum LogDerivative<'a> {
    Pearson(&'a PearsonSpec),
    /// Central difference of the weight itself.
    Numeric,
}

/// `f'(z)` from central differences at `h = 1e-6 |z|` and `h / 2`, Richardson-combined.
pub fn richardson_derivative<F>(f: F, z: C64) -> Result<CMat>
where
    F: Fn(C64) -> Result<CMat>,
{
    let h = 1e-6 * z.norm();
    let d = |h: f64| -> Result<CMat> { Ok((f(z + h)? - f(z - h)?) / c(2.0 * h, 0.0)) };
    let d1 = d(h)?;
    let d2 = d(h / 2.0)?;
    Ok((d2 * c(4.0, 0.0) - d1) / c(3.0, 0.0))
}

/// `M_n(z) = Z_n'(z) Z_n(z)^-1` with `Z_n = Y_n diag(w z^-n, I)` and the product rule
/// `Z_n' = Y_n' D + Y_n D'`; `Y_n'` by Richardson-extrapolated central differences.
pub fn m_numeric(ctx: &RhpContext, n: usize, z: C64, w_log: LogDerivative) -> Result<CMat> {
    if z.norm() == 0.0 || (z.norm() - 1.0).abs() < 1e-3 {
        return Err(Error::Domain(format!("M_n at |z| = {}", z.norm())));
    }
    let d = ctx.n_dim();
    let y = ctx.frame(n, z, Method::Series, false)?.y;
    let dy = richardson_derivative(|s| Ok(ctx.frame(n, s, Method::Series, false)?.y), z)?;
    let w = ctx.spec.eval(z)?;
    let dw = match w_log {
        LogDerivative::Pearson(p) => p.log_derivative(z) * &w,
        LogDerivative::Numeric => richardson_derivative(|s| ctx.spec.eval(s), z)?,
    };
    let zmn = z.powi(-(n as i32));
    let dd = block2(&(&w * zmn), &zeros(d, d), &zeros(d, d), &eye(d));
    let ddd = block2(
        &((&dw - &w * (c(n as f64, 0.0) / z)) * zmn),
        &zeros(d, d),
        &zeros(d, d),
        &zeros(d, d),
    );
    let zf = &y * &dd;
    let dz = dy * dd + y * ddd;
    Ok(dz * inv(&zf, "Z_n")?)
}

/// `M_n = Y_n' Y_n^-1 + Y_n diag(W - n/z, 0) Y_n^-1`, which never evaluates the weight itself.
pub fn m_numeric_y(ctx: &RhpContext, n: usize, z: C64, pearson: &PearsonSpec) -> Result<CMat> {
    if z.norm() == 0.0 || (z.norm() - 1.0).abs() < 1e-3 {
        return Err(Error::Domain(format!("M_n at |z| = {}", z.norm())));
    }
    let d = ctx.n_dim();
    let y = ctx.frame(n, z, Method::Series, false)?.y;
    let dy = richardson_derivative(|s| Ok(ctx.frame(n, s, Method::Series, false)?.y), z)?;
    let yinv = inv(&y, "Y_n")?;
    let g = pearson.log_derivative(z) - eye(d) * (c(n as f64, 0.0) / z);
    let dd = block2(&g, &zeros(d, d), &zeros(d, d), &zeros(d, d));
    Ok(dy * &yinv + y * dd * yinv)
}

/// Laurent coefficients `k = lo..=hi` of `f` from `nodes` samples on `|z| = rho`.
pub fn fourier_coefficients<F>(f: F, rho: f64, nodes: usize, lo: i32, hi: i32) -> Result<Vec<CMat>>
where
    F: Fn(C64) -> Result<CMat>,
{
    let samples: Vec<(C64, CMat)> = (0..nodes)
        .map(|j| {
            let z = c(0.0, 2.0 * PI * j as f64 / nodes as f64).exp() * rho;
            f(z).map(|v| (z, v))
        })
        .collect::<Result<_>>()?;
    let (r, cc) = (samples[0].1.nrows(), samples[0].1.ncols());
    Ok((lo..=hi)
        .map(|k| {
            let mut acc = zeros(r, cc);
            for (z, v) in &samples {
                acc += v * z.powi(-k);
            }
            acc / c(nodes as f64, 0.0)
        })
        .collect())
}

pub const FOURIER_RHO: f64 = 0.5;
pub const FOURIER_NODES: usize = 64;

/// The `z^-order` coefficient of `M_n` by Fourier inversion on `|z| = 0.5`.
pub fn extract_leading(ctx: &RhpContext, n: usize, order: u32, w_log: LogDerivative) -> Result<CMat> {
    let k = -(order as i32);
    let v = fourier_coefficients(|z| m_numeric(ctx, n, z, w_log), FOURIER_RHO, FOURIER_NODES, k, k)?;
    Ok(v.into_iter().next().unwrap())
}

/// Fits the Laurent polynomial of `M_n` on `|z| = 0.5` (exponents `lo..=hi`) and compares it
/// with `M_n` just inside and just outside the unit circle at each sample; max relative gap.
pub fn m_analyticity(
    ctx: &RhpContext,
    n: usize,
    samples: &[C64],
    lo: i32,
    hi: i32,
    w_log: LogDerivative,
) -> Result<f64> {
    let coeffs = fourier_coefficients(|z| m_numeric(ctx, n, z, w_log), FOURIER_RHO, FOURIER_NODES, lo, hi)?;
    let laurent = |z: C64| -> CMat {
        let mut acc = zeros(coeffs[0].nrows(), coeffs[0].ncols());
        for (i, a) in coeffs.iter().enumerate() {
            acc += a * z.powi(lo + i as i32);
        }
        acc
    };
    let mut worst: f64 = 0.0;
    for &zeta in samples {
        for z in [zeta * 0.99, zeta * 1.01] {
            let m = m_numeric(ctx, n, z, w_log)?;
            worst = worst.max(rel_gap(&m, &laurent(z)));
        }
    }
    Ok(worst)
}

/// `R_n' = M_{n+1} R_n - R_n M_n` at `z`, relative residual.
pub fn differential_compatibility(ctx: &RhpContext, n: usize, z: C64, w_log: LogDerivative) -> Result<f64> {
    let t = transfer_matrix(&ctx.lattice, n)?;
    let r = t.eval(z);
    let a = m_numeric(ctx, n, z, w_log)?;
    let b = m_numeric(ctx, n + 1, z, w_log)?;
    let lhs = &b * &r - &r * &a;
    Ok(fro(&(lhs - t.deriv(z))) / (1.0 + fro(&b) * fro(&r) + fro(&r) * fro(&a)))
}

/// Residuals of `M_n [P; -H^-1 t] = [P' - nP/z + P W; -H^-1 (t' - nt/z + t W)]` (first) and
/// `M_n [Q^L_1; -H^-1 Q^R_2] = d/dz [Q^L_1; -H^-1 Q^R_2]` (second), relative.
pub fn differential_relations(ctx: &RhpContext, n: usize, z: C64, pearson: &PearsonSpec) -> Result<(f64, f64)> {
    let d = ctx.n_dim();
    let m = m_numeric(ctx, n, z, LogDerivative::Pearson(pearson))?;
    let w = pearson.log_derivative(z);
    let fam = &ctx.families[n];
    let nz = c(n as f64, 0.0) / z;
    let p = fam.p_l1.eval(z);
    let dp = fam.p_l1.deriv(z);
    let (t, dt, hinv) = if n == 0 {
        (zeros(d, d), zeros(d, d), eye(d))
    } else {
        let pf = &ctx.families[n - 1];
        (pf.t_r2.eval(z), pf.t_r2.deriv(z), inv(&pf.h_r, "H^R")?)
    };
    let col = stack(&p, &-(&hinv * &t));
    let want = stack(
        &(&dp - &p * nz + &p * &w),
        &-(&hinv * (&dt - &t * nz + &t * &w)),
    );
    let r1 = rel_gap(&(&m * col), &want);
    let y = |s: C64| -> Result<CMat> {
        let f = ctx.frame(n, s, Method::Series, false)?;
        Ok(f.y.view((0, d), (2 * d, d)).into_owned())
    };
    let q = y(z)?;
    let dq = richardson_derivative(y, z)?;
    let r2 = rel_gap(&(&m * q), &dq);
    Ok((r1, r2))
}

/// The `z^1` coefficient of `M_n` by Fourier inversion on `|z| = rho`, `rho > 1`.
pub fn m_coefficient_at_infinity(ctx: &RhpContext, n: usize, rho: f64, pearson: &PearsonSpec) -> Result<CMat> {
    let v = fourier_coefficients(|z| m_numeric_y(ctx, n, z, pearson), rho, FOURIER_NODES, 1, 1)?;
    Ok(v.into_iter().next().unwrap())
}

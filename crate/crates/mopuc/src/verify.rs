//! Aggregated residual checks over the Szegő, Riemann-Hilbert and transfer layers.

use std::collections::BTreeMap;

use crate::cauchy_rhp::{abc_identity_residual, circle_samples, x_coefficients, Method, RhpContext};
use crate::error::{Error, Result};
use crate::io::ResidualRecord;
use crate::linalg::{c, fro, C64};
use crate::moments::MomentTable;
use crate::painleve::{dpii_residual, term_scale, DPIICoefficients};
use crate::szego::{check_biorthogonality, check_recursions, SzegoFamily};
use crate::transfer::{
    check_transfer, compatibility_residual, dyadic_residual, extract_leading, pearson_leading, product_form_residual,
    richardson_derivative, LogDerivative,
};
use crate::weights::{classify, PearsonSpec, WeightSpec};

/// Largest degree for the Riemann-Hilbert checks.
pub const RHP_N_MAX: usize = 6;
/// Largest degree for the Fourier extraction of `M_n^[0]`.
pub const LEADING_N_MAX: usize = 4;

/// Default thresholds by check name.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        ("biorthogonality", 1e-8),
        ("recursion_forward", 1e-8),
        ("recursion_reciprocal", 1e-8),
        ("cauchy_recursion_l", 1e-8),
        ("cauchy_recursion_r", 1e-8),
        ("h_ratio", 1e-8),
        ("abc_identity", 1e-9),
        ("det", 1e-8),
        ("jump_y", 1e-5),
        ("jump_z", 1e-5),
        ("asymptotics", 1e-4),
        ("transfer_y", 1e-7),
        ("transfer_x", 1e-7),
        ("transfer_product", 1e-6),
        ("dyadic", 1e-10),
        ("leading", 1e-5),
        ("compatibility", 1e-7),
        ("pearson_equation", 1e-6),
        ("dpii", 1e-6),
        ("dpii_gap", 1e-5),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Defaults overridden by `overrides`; unknown names and non-positive values are rejected.
pub fn tolerances(overrides: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    let mut t = default_tolerances();
    for (k, v) in overrides {
        if !t.contains_key(k) {
            return Err(Error::InvalidSpec(format!("unknown tolerance '{k}'")));
        }
        if v.is_nan() || *v <= 0.0 {
            return Err(Error::InvalidSpec(format!("tolerance '{k}' must be positive")));
        }
        t.insert(k.clone(), *v);
    }
    Ok(t)
}

/// Eight points off the circle, four inside and four outside.
pub fn off_circle_points() -> Vec<C64> {
    (0..8)
        .map(|m| {
            let r = if m % 2 == 0 { 0.5 } else { 1.8 };
            c(0.0, 0.3 + 0.8 * m as f64).exp() * r
        })
        .collect()
}

struct Report<'a> {
    tol: &'a BTreeMap<String, f64>,
    out: Vec<ResidualRecord>,
}

impl Report<'_> {
    fn push(&mut self, check: &str, n: Option<usize>, z: Option<C64>, residual: f64) {
        let t = self.tol[check];
        self.out.push(ResidualRecord::new(check, n, z, residual, t));
    }

    fn fail(&mut self, check: &str, n: Option<usize>, z: Option<C64>, e: &Error) {
        let t = self.tol[check];
        self.out.push(ResidualRecord::failed(check, n, z, t, e));
    }

    fn try_push(&mut self, check: &str, n: Option<usize>, z: Option<C64>, r: Result<f64>) -> Result<()> {
        match r {
            Ok(v) => self.push(check, n, z, v),
            Err(e @ (Error::QuasiDefinite { .. } | Error::Parse(_) | Error::Io(_))) => return Err(e),
            Err(e) => self.fail(check, n, z, &e),
        }
        Ok(())
    }
}

/// Runs every structural check up to `families.len() - 1`; each record carries residual and threshold.
/// A check that errors is recorded with an infinite residual.
pub fn verify_all(
    spec: &WeightSpec,
    table: &MomentTable,
    families: &[SzegoFamily],
    pearson: Option<&PearsonSpec>,
    tol: &BTreeMap<String, f64>,
) -> Result<Vec<ResidualRecord>> {
    let n_max = families.len() - 1;
    let ctx = RhpContext::new(spec, table, families);
    let lat = &ctx.lattice;
    let mut rep = Report { tol, out: Vec::new() };

    rep.try_push("biorthogonality", None, None, check_biorthogonality(families, table))?;
    for r in check_recursions(lat, families) {
        rep.push("recursion_forward", Some(r.n), None, r.forward);
        rep.push("recursion_reciprocal", Some(r.n), None, r.reciprocal);
    }
    let zs = [c(0.4, 0.3), c(-1.5, 0.8)];
    for n in 1..n_max {
        for &z in &zs {
            match ctx.cauchy_recursion_residual(n, z, Method::Series) {
                Ok((a, b)) => {
                    rep.push("cauchy_recursion_l", Some(n), Some(z), a);
                    rep.push("cauchy_recursion_r", Some(n), Some(z), b);
                }
                Err(e) => {
                    rep.fail("cauchy_recursion_l", Some(n), Some(z), &e);
                    rep.fail("cauchy_recursion_r", Some(n), Some(z), &e);
                }
            }
        }
    }
    rep.try_push("h_ratio", None, None, lat.h_ratio_residual())?;
    if n_max >= 2 {
        rep.try_push("abc_identity", None, None, abc_identity_residual(lat))?;
    }

    let boundary = circle_samples(8);
    let points = off_circle_points();
    for n in 0..=n_max.min(RHP_N_MAX) {
        rep.try_push("det", Some(n), None, ctx.det_residual(n, &points, Method::Series))?;
        match ctx.check_jump(n, &boundary) {
            Ok(j) => {
                rep.push("jump_y", Some(n), None, j.y);
                rep.push("jump_z", Some(n), None, j.z);
            }
            Err(e) => {
                rep.fail("jump_y", Some(n), None, &e);
                rep.fail("jump_z", Some(n), None, &e);
            }
        }
        if n + 2 <= n_max {
            let r = x_coefficients(lat, n).and_then(|want| {
                let fit = ctx.x1_fit(n, 0.7)?;
                Ok(fro(&(&fit - &want.x1)) / (1.0 + fro(&want.x1)))
            });
            rep.try_push("asymptotics", Some(n), None, r)?;
        }
    }

    for n in 0..n_max {
        rep.try_push("dyadic", Some(n), None, dyadic_residual(lat, n))?;
        if n <= RHP_N_MAX {
            match check_transfer(&ctx, n, &points, Method::Series) {
                Ok(t) => {
                    rep.push("transfer_y", Some(n), None, t.y);
                    rep.push("transfer_x", Some(n), None, t.x);
                }
                Err(e) => {
                    rep.fail("transfer_y", Some(n), None, &e);
                    rep.fail("transfer_x", Some(n), None, &e);
                }
            }
        }
    }
    let top = n_max.min(RHP_N_MAX);
    if top >= 1 {
        rep.try_push("transfer_product", Some(top), None, product_form_residual(&ctx, top, &points, Method::Series))?;
    }

    if let Some(p) = pearson {
        // tautological when the weight is itself integrated from the Pearson data
        if !matches!(spec, WeightSpec::Pearson(_)) {
            for &z in &boundary[..4] {
                let r = richardson_derivative(|u| spec.eval(u), z).and_then(|dw| {
                    let rhs = p.log_derivative(z) * spec.eval(z)?;
                    Ok(fro(&(dw - &rhs)) / (1.0 + fro(&rhs)))
                });
                rep.try_push("pearson_equation", None, Some(z), r)?;
            }
        }
        let class = classify(p)?;
        for n in 0..n_max {
            rep.try_push("compatibility", Some(n), None, compatibility_residual(lat, &class, n))?;
        }
        for n in 0..=n_max.min(LEADING_N_MAX) {
            let r = pearson_leading(lat, n, &class).and_then(|want| {
                let got = extract_leading(&ctx, n, want.order, LogDerivative::Pearson(p))?;
                Ok(fro(&(&got - &want.m0)) / (1.0 + fro(&want.m0)))
            });
            rep.try_push("leading", Some(n), None, r)?;
        }
    }
    Ok(rep.out)
}

/// Relative dPII residuals `|R_i| / (1 + term norms)` for `n = 1..n_max-1`.
pub fn dpii_report(
    lat: &crate::szego::VerblunskyLattice,
    coeffs: &DPIICoefficients,
    tol: f64,
) -> Result<Vec<ResidualRecord>> {
    let mut out = Vec::new();
    for n in 1..lat.n_max {
        let (r1, r2) = dpii_residual(lat, coeffs, n)?;
        let s = term_scale(lat, coeffs, n)?;
        out.push(ResidualRecord::new("dpii_1", Some(n), None, fro(&r1) / s, tol));
        out.push(ResidualRecord::new("dpii_2", Some(n), None, fro(&r2) / s, tol));
    }
    Ok(out)
}

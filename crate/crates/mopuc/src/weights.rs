//! Matrix weights on the unit circle and their right logarithmic derivatives.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fuchsian::FuchsianSeries;
use crate::linalg::{c, comm, expm, fro, inv, rcond, scalar, zeros, CMat, C64};
use crate::ode::{integrate, OdeOptions};

/// Matrix Laurent polynomial `sum_k coeffs[k] z^(lo + k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly {
    pub lo: i32,
    pub coeffs: Vec<CMat>,
}

impl LaurentPoly {
    pub fn new(lo: i32, coeffs: Vec<CMat>) -> Self {
        LaurentPoly { lo, coeffs }
    }

    pub fn from_map(map: &BTreeMap<i32, CMat>) -> Self {
        let lo = *map.keys().next().unwrap_or(&0);
        let hi = *map.keys().last().unwrap_or(&0);
        let n = map.values().next().map_or(1, |m| m.nrows());
        let coeffs = (lo..=hi)
            .map(|k| map.get(&k).cloned().unwrap_or_else(|| zeros(n, n)))
            .collect();
        LaurentPoly { lo, coeffs }
    }

    pub fn n_dim(&self) -> usize {
        self.coeffs.first().map_or(0, |m| m.nrows())
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, k: i32) -> CMat {
        let idx = k - self.lo;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            zeros(self.n_dim(), self.n_dim())
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn eval(&self, z: C64) -> CMat {
        let n = self.n_dim();
        let mut acc = zeros(n, n);
        for ck in self.coeffs.iter().rev() {
            acc = acc * z + ck;
        }
        acc * z.powi(self.lo)
    }

    pub fn deriv(&self, z: C64) -> CMat {
        let n = self.n_dim();
        let mut acc = zeros(n, n);
        for (i, ck) in self.coeffs.iter().enumerate() {
            let k = self.lo + i as i32;
            if k != 0 {
                acc += ck * (z.powi(k - 1) * k as f64);
            }
        }
        acc
    }
}

/// Laurent coefficients of `W(z)` with a base value of the weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PearsonSpec {
    pub n_dim: usize,
    pub coeffs: BTreeMap<i32, CMat>,
    pub base_point: C64,
    pub base_value: CMat,
}

impl PearsonSpec {
    pub fn new(coeffs: BTreeMap<i32, CMat>, base_point: C64, base_value: CMat) -> Result<Self> {
        let n_dim = base_value.nrows();
        if base_value.ncols() != n_dim || n_dim == 0 {
            return Err(Error::InvalidSpec("base value must be square".into()));
        }
        if coeffs.values().any(|m| m.nrows() != n_dim || m.ncols() != n_dim) {
            return Err(Error::InvalidSpec("coefficient shape mismatch".into()));
        }
        if coeffs.values().all(|m| fro(m) == 0.0) {
            return Err(Error::InvalidSpec("all Pearson coefficients vanish".into()));
        }
        if base_point.norm() == 0.0 {
            return Err(Error::InvalidSpec("base point must be nonzero".into()));
        }
        if rcond(&base_value) < 1e-14 {
            return Err(Error::InvalidSpec("base value is singular".into()));
        }
        Ok(PearsonSpec {
            n_dim,
            coeffs,
            base_point,
            base_value,
        })
    }

    pub fn coeff(&self, k: i32) -> CMat {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| zeros(self.n_dim, self.n_dim))
    }

    /// `W(z)`.
    pub fn log_derivative(&self, z: C64) -> CMat {
        let mut acc = zeros(self.n_dim, self.n_dim);
        for (k, m) in &self.coeffs {
            acc += m * z.powi(*k);
        }
        acc
    }

    fn nonzero_exponents(&self) -> impl Iterator<Item = i32> + '_ {
        self.coeffs
            .iter()
            .filter(|(_, m)| fro(m) > 0.0)
            .map(|(k, _)| *k)
    }

    pub fn min_exponent(&self) -> i32 {
        self.nonzero_exponents().min().unwrap_or(0)
    }

    pub fn max_exponent(&self) -> i32 {
        self.nonzero_exponents().max().unwrap_or(0)
    }

    /// Value of the weight at `z` by integrating the Pearson ODE from the base point.
    pub fn eval(&self, z: C64, opts: OdeOptions) -> Result<CMat> {
        if z.norm() == 0.0 {
            return Err(Error::Domain("weight evaluated at z = 0".into()));
        }
        let z0 = self.base_point;
        let on_ray = self.integrate_ray(z0, z.norm(), &self.base_value, opts)?;
        let start = z0 * (z.norm() / z0.norm());
        let mut dtheta = z.arg() - z0.arg();
        while dtheta > PI {
            dtheta -= 2.0 * PI;
        }
        while dtheta <= -PI {
            dtheta += 2.0 * PI;
        }
        self.integrate_arc(start, dtheta, &on_ray, opts)
    }

    fn integrate_ray(&self, z0: C64, radius: f64, w0: &CMat, opts: OdeOptions) -> Result<CMat> {
        let scale = radius / z0.norm();
        if (scale - 1.0).abs() < 1e-16 {
            return Ok(w0.clone());
        }
        let dz = z0 * (scale - 1.0);
        integrate(
            |t, w| self.log_derivative(z0 + dz * t) * w * dz,
            0.0,
            1.0,
            w0,
            opts,
        )
    }

    /// Continues `w0` (the value at `z0`) along the arc `z0 e^{i t}`, `t` in `[0, dtheta]`.
    pub fn integrate_arc(&self, z0: C64, dtheta: f64, w0: &CMat, opts: OdeOptions) -> Result<CMat> {
        integrate(
            |t, w| {
                let z = z0 * c(0.0, t).exp();
                self.log_derivative(z) * w * (z * c(0.0, 1.0))
            },
            0.0,
            dtheta,
            w0,
            opts,
        )
    }

    /// Samples on the unit circle at `exp(2 pi i m / count)` by marching counterclockwise.
    pub fn sample_circle(&self, count: usize, opts: OdeOptions) -> Result<Vec<CMat>> {
        let mut out = Vec::with_capacity(count);
        let mut w = self.eval(c(1.0, 0.0), opts)?;
        let step = 2.0 * PI / count as f64;
        for m in 0..count {
            if m > 0 {
                let z_prev = c(0.0, step * (m - 1) as f64).exp();
                w = self.integrate_arc(z_prev, step, &w, opts)?;
            }
            out.push(w.clone());
        }
        Ok(out)
    }
}

/// Singularity type of `W` at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    Ordinary,
    Fuchsian,
    NonFuchsian(u32),
}

/// Classification together with the data needed for `W_n^[0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityClass {
    pub kind: SingularityKind,
    pub n_dim: usize,
    /// `W_{-1}` for Fuchsian, `W_{-r}` for non-Fuchsian, unused otherwise.
    pub lead: CMat,
}

impl SingularityClass {
    /// `W_n^[0]`: `-nI`, `W_{-1} - nI` or `W_{-r}`.
    pub fn leading(&self, n: usize) -> CMat {
        let nn = scalar(self.n_dim, c(n as f64, 0.0));
        match self.kind {
            SingularityKind::Ordinary => -nn,
            SingularityKind::Fuchsian => &self.lead - nn,
            SingularityKind::NonFuchsian(_) => self.lead.clone(),
        }
    }

    /// Pole order of `M_n` at the origin.
    pub fn order(&self) -> u32 {
        match self.kind {
            SingularityKind::NonFuchsian(r) => r,
            _ => 1,
        }
    }
}

pub fn classify(spec: &PearsonSpec) -> Result<SingularityClass> {
    if spec.coeffs.values().all(|m| fro(m) == 0.0) {
        return Err(Error::InvalidSpec("all Pearson coefficients vanish".into()));
    }
    let lo = spec.min_exponent();
    let n = spec.n_dim;
    let (kind, lead) = if lo < -1 {
        (SingularityKind::NonFuchsian((-lo) as u32), spec.coeff(lo))
    } else if lo == -1 {
        (SingularityKind::Fuchsian, spec.coeff(-1))
    } else {
        (SingularityKind::Ordinary, zeros(n, n))
    };
    Ok(SingularityClass {
        kind,
        n_dim: n,
        lead,
    })
}

/// A matrix weight on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `w(z) = sum_j blocks[j] z^j`.
    Fourier { n_dim: usize, blocks: BTreeMap<i64, CMat> },
    /// `w(z) = exp(V_1(z)) exp(V_2(z)) ...`, left to right.
    Freud { n_dim: usize, factors: Vec<LaurentPoly> },
    Pearson(PearsonSpec),
    Fuchsian(FuchsianSeries),
}

impl WeightSpec {
    pub fn n_dim(&self) -> usize {
        match self {
            WeightSpec::Fourier { n_dim, .. } | WeightSpec::Freud { n_dim, .. } => *n_dim,
            WeightSpec::Pearson(p) => p.n_dim,
            WeightSpec::Fuchsian(_) => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Fourier { n_dim, blocks } => {
                if blocks.is_empty() {
                    return Err(Error::InvalidSpec("empty Fourier table".into()));
                }
                if blocks.values().any(|m| m.nrows() != *n_dim || m.ncols() != *n_dim) {
                    return Err(Error::InvalidSpec("Fourier block shape mismatch".into()));
                }
            }
            WeightSpec::Freud { n_dim, factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidSpec("empty Freud product".into()));
                }
                if factors.iter().any(|f| f.coeffs.is_empty() || f.n_dim() != *n_dim) {
                    return Err(Error::InvalidSpec("Freud factor shape mismatch".into()));
                }
            }
            WeightSpec::Pearson(_) => {}
            WeightSpec::Fuchsian(f) => f.validate()?,
        }
        Ok(())
    }

    /// `w(z)`.
    pub fn eval(&self, z: C64) -> Result<CMat> {
        if z.norm() == 0.0 {
            return Err(Error::Domain("weight evaluated at z = 0".into()));
        }
        match self {
            WeightSpec::Fourier { n_dim, blocks } => {
                let mut acc = zeros(*n_dim, *n_dim);
                for (j, b) in blocks {
                    acc += b * z.powi(*j as i32);
                }
                Ok(acc)
            }
            WeightSpec::Freud { n_dim, factors } => {
                let mut acc = scalar(*n_dim, c(1.0, 0.0));
                for f in factors {
                    acc *= expm(&f.eval(z));
                }
                Ok(acc)
            }
            WeightSpec::Pearson(p) => p.eval(z, OdeOptions::default()),
            WeightSpec::Fuchsian(f) => f.eval(z),
        }
    }

    /// Weight at the nodes `exp(2 pi i m / count)`, `m = 0..count`.
    pub fn sample_circle(&self, count: usize) -> Result<Vec<CMat>> {
        match self {
            WeightSpec::Pearson(p) => p.sample_circle(count, circle_ode_options()),
            _ => (0..count)
                .map(|m| self.eval(c(0.0, 2.0 * PI * m as f64 / count as f64).exp()))
                .collect(),
        }
    }
}

/// Tolerance used when marching the Pearson ODE around the circle for quadrature.
pub fn circle_ode_options() -> OdeOptions {
    OdeOptions {
        rtol: 1e-14,
        atol: 1e-300,
    }
}

/// Relative change of the weight after one counterclockwise loop around the origin.
pub fn monodromy_defect(spec: &PearsonSpec) -> Result<f64> {
    monodromy_defect_with(spec, OdeOptions::default())
}

pub fn monodromy_defect_with(spec: &PearsonSpec, opts: OdeOptions) -> Result<f64> {
    let looped = spec.integrate_arc(spec.base_point, 2.0 * PI, &spec.base_value, opts)?;
    Ok(fro(&(looped - &spec.base_value)) / fro(&spec.base_value))
}

/// Right logarithmic derivative `w' w^{-1}` of an ordered product of exponentials.
pub fn freud_log_derivative(factors: &[LaurentPoly], z: C64, tol: f64, max_terms: usize) -> Result<CMat> {
    if z.norm() == 0.0 {
        return Err(Error::Domain("log derivative at z = 0".into()));
    }
    let n = factors.first().map_or(0, |f| f.n_dim());
    let mut total = zeros(n, n);
    let mut conj = scalar(n, c(1.0, 0.0));
    for f in factors {
        let v = f.eval(z);
        let dv = f.deriv(z);
        let mut term = dv.clone();
        let mut sum = dv;
        let mut converged = fro(&sum) == 0.0;
        for j in 1..max_terms {
            term = comm(&v, &term) / c((j + 1) as f64, 0.0);
            sum += &term;
            if fro(&term) <= tol * fro(&sum).max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                iterations: max_terms,
                last_change: fro(&term),
            });
        }
        let e = expm(&v);
        total += &conj * sum * inv(&conj, "Freud prefix")?;
        conj *= e;
    }
    Ok(total)
}

//! Fuchsian and non-Fuchsian matrix discrete Painlevé II systems for Verblunsky matrices.

use crate::cauchy_rhp::x_coefficients;
use crate::error::{Error, Result};
use crate::linalg::{c, comm, eye, fro, inv, rcond, zeros, CMat, C64};
use crate::szego::VerblunskyLattice;
use crate::weights::PearsonSpec;

/// Coefficients of `W(z)`: `W_-1/z + W_0 + W_1 z` or `W_-2/z^2 + W_-1/z + W_0`.
#[derive(Debug, Clone, PartialEq)]
pub enum DPIICoefficients {
    Fuchsian { wm1: CMat, w0: CMat, w1: CMat },
    NonFuchsian { wm2: CMat, wm1: CMat, w0: CMat },
}

impl DPIICoefficients {
    pub fn n_dim(&self) -> usize {
        match self {
            DPIICoefficients::Fuchsian { w0, .. } | DPIICoefficients::NonFuchsian { w0, .. } => w0.nrows(),
        }
    }

    /// Reads the variant off the exponent range of a Pearson spec.
    pub fn from_pearson(spec: &PearsonSpec) -> Result<Self> {
        let (lo, hi) = (spec.min_exponent(), spec.max_exponent());
        match (lo, hi) {
            (-1, h) if h <= 1 => Ok(DPIICoefficients::Fuchsian {
                wm1: spec.coeff(-1),
                w0: spec.coeff(0),
                w1: spec.coeff(1),
            }),
            (-2, h) if h <= 0 => Ok(DPIICoefficients::NonFuchsian {
                wm2: spec.coeff(-2),
                wm1: spec.coeff(-1),
                w0: spec.coeff(0),
            }),
            _ => Err(Error::SpecMismatch(format!(
                "W(z) with exponents {lo}..={hi} is neither W_-1/z + W_0 + W_1 z nor W_-2/z^2 + W_-1/z + W_0"
            ))),
        }
    }

    /// The coefficient that multiplies the cubic and nonlocal terms.
    pub fn outer(&self) -> &CMat {
        match self {
            DPIICoefficients::Fuchsian { w1, .. } => w1,
            DPIICoefficients::NonFuchsian { w0, .. } => w0,
        }
    }
}

/// Two consecutive lattice sites and the running nonlocal sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DPIIState {
    pub n: usize,
    pub a_l1_prev: CMat,
    pub a_l1_cur: CMat,
    pub a_r2d_prev: CMat,
    pub a_r2d_cur: CMat,
    /// `sum_{m=1}^{n-1} aL1[m] aR2d[m-1]`.
    pub s: CMat,
}

impl DPIIState {
    /// State at `n = 1` from the first Verblunsky matrices.
    pub fn initial(a_l1_1: CMat, a_r2d_1: CMat) -> Self {
        let d = a_l1_1.nrows();
        DPIIState {
            n: 1,
            a_l1_prev: eye(d),
            a_l1_cur: a_l1_1,
            a_r2d_prev: eye(d),
            a_r2d_cur: a_r2d_1,
            s: zeros(d, d),
        }
    }

    pub fn from_lattice(lat: &VerblunskyLattice, n: usize) -> Result<Self> {
        if n == 0 || n > lat.n_max {
            return Err(Error::Range {
                index: n as i64,
                limit: lat.n_max as i64,
            });
        }
        Ok(DPIIState {
            n,
            a_l1_prev: lat.a_l1[n - 1].clone(),
            a_l1_cur: lat.a_l1[n].clone(),
            a_r2d_prev: lat.a_r2d[n - 1].clone(),
            a_r2d_cur: lat.a_r2d[n].clone(),
            s: lat.nonlocal_sum(n - 1),
        })
    }
}

fn need(lat: &VerblunskyLattice, n: usize, top: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Range { index: 0, limit: 1 });
    }
    if top > lat.n_max {
        return Err(Error::Range {
            index: top as i64,
            limit: lat.n_max as i64,
        });
    }
    Ok(())
}

fn shift(m: &CMat, k: f64) -> CMat {
    m + eye(m.nrows()) * c(k, 0.0)
}

/// The Verblunsky matrices entering one pair of equations at site `n`.
struct Sites<'a> {
    am: &'a CMat,
    a: &'a CMat,
    ap: &'a CMat,
    dm: &'a CMat,
    dd: &'a CMat,
    dp: &'a CMat,
}

impl<'a> Sites<'a> {
    fn of(lat: &'a VerblunskyLattice, n: usize) -> Self {
        Sites {
            am: &lat.a_l1[n - 1],
            a: &lat.a_l1[n],
            ap: &lat.a_l1[n + 1],
            dm: &lat.a_r2d[n - 1],
            dd: &lat.a_r2d[n],
            dp: &lat.a_r2d[n + 1],
        }
    }

    /// `aL1[n+1] aR2d[n] aL1[n] + aL1[n] aR2d[n-1] aL1[n]`.
    fn cubic_l(&self) -> CMat {
        self.ap * self.dd * self.a + self.a * self.dm * self.a
    }

    /// `aR2d[n] aL1[n] aR2d[n-1] + aR2d[n] aL1[n+1] aR2d[n]`.
    fn cubic_r(&self) -> CMat {
        self.dd * self.a * self.dm + self.dd * self.ap * self.dd
    }
}

/// Left-hand minus right-hand side of both equations at site `n`; `local` drops the nonlocal commutators.
fn residual(lat: &VerblunskyLattice, coeffs: &DPIICoefficients, n: usize, local: bool) -> Result<(CMat, CMat)> {
    need(lat, n, n + 1)?;
    let st = Sites::of(lat, n);
    let nn = n as f64;
    let outer = coeffs.outer();
    let (nl1, nl2) = if local {
        let d = lat.n_dim();
        (zeros(d, d), zeros(d, d))
    } else {
        (
            comm(outer, &lat.nonlocal_sum(n - 1)) * st.a,
            st.dd * comm(outer, &lat.nonlocal_sum(n + 1)),
        )
    };
    let (lhs1, lhs2) = match coeffs {
        DPIICoefficients::Fuchsian { wm1, w0, w1 } => (
            w0 * st.a + w1 * st.ap - st.am * shift(wm1, -(nn - 1.0)),
            st.dd * w0 + st.dm * w1 - shift(wm1, -(nn + 1.0)) * st.dp,
        ),
        DPIICoefficients::NonFuchsian { wm2, wm1, w0 } => (
            shift(wm1, nn) * st.a + w0 * st.ap - st.am * wm2,
            st.dd * shift(wm1, nn) + st.dm * w0 - wm2 * st.dp,
        ),
    };
    let rhs1 = outer * st.cubic_l() + nl1;
    let rhs2 = st.cubic_r() * outer + nl2;
    Ok((lhs1 - rhs1, lhs2 - rhs2))
}

/// Residuals of the Fuchsian system at site `n >= 1`; needs the lattice through `n + 1`.
pub fn fuchsian_residual(lat: &VerblunskyLattice, coeffs: &DPIICoefficients, n: usize) -> Result<(CMat, CMat)> {
    match coeffs {
        DPIICoefficients::Fuchsian { .. } => residual(lat, coeffs, n, false),
        _ => Err(Error::SpecMismatch("Fuchsian residual needs Fuchsian coefficients".into())),
    }
}

/// Residuals of the non-Fuchsian system at site `n >= 1`; needs the lattice through `n + 1`.
pub fn nonfuchsian_residual(lat: &VerblunskyLattice, coeffs: &DPIICoefficients, n: usize) -> Result<(CMat, CMat)> {
    match coeffs {
        DPIICoefficients::NonFuchsian { .. } => residual(lat, coeffs, n, false),
        _ => Err(Error::SpecMismatch("non-Fuchsian residual needs non-Fuchsian coefficients".into())),
    }
}

/// Residuals of whichever system `coeffs` belongs to.
pub fn dpii_residual(lat: &VerblunskyLattice, coeffs: &DPIICoefficients, n: usize) -> Result<(CMat, CMat)> {
    residual(lat, coeffs, n, false)
}

/// Residuals of the local variant (nonlocal commutators dropped).
pub fn local_residual(lat: &VerblunskyLattice, coeffs: &DPIICoefficients, n: usize) -> Result<(CMat, CMat)> {
    residual(lat, coeffs, n, true)
}

/// Scale for relative residuals: one plus the largest term norm.
pub fn term_scale(lat: &VerblunskyLattice, coeffs: &DPIICoefficients, n: usize) -> Result<f64> {
    need(lat, n, n + 1)?;
    let st = Sites::of(lat, n);
    let outer = fro(coeffs.outer());
    let ws = match coeffs {
        DPIICoefficients::Fuchsian { wm1, w0, w1 } => fro(wm1).max(fro(w0)).max(fro(w1)),
        DPIICoefficients::NonFuchsian { wm2, wm1, w0 } => fro(wm2).max(fro(wm1)).max(fro(w0)),
    } + n as f64 + 1.0;
    let linear = ws * [st.am, st.a, st.ap, st.dm, st.dd, st.dp].iter().map(|m| fro(m)).fold(0.0, f64::max);
    let cubic = outer * fro(&st.cubic_l()).max(fro(&st.cubic_r()));
    let nonlocal = 2.0 * outer * fro(&lat.nonlocal_sum(n + 1)) * fro(st.a).max(fro(st.dd));
    Ok(1.0 + linear.max(cubic).max(nonlocal))
}

/// Reciprocal condition numbers of the three matrices a step inverts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConditioning {
    pub outer: f64,
    pub cofactor: f64,
    pub last: f64,
}

fn step(state: &DPIIState, coeffs: &DPIICoefficients) -> Result<(DPIIState, StepConditioning)> {
    let n = state.n;
    let nn = n as f64;
    let d = state.a_l1_cur.nrows();
    let (a, am, dd, dm) = (&state.a_l1_cur, &state.a_l1_prev, &state.a_r2d_cur, &state.a_r2d_prev);
    let outer = coeffs.outer();
    let cof = eye(d) - dd * a;
    let lin = match coeffs {
        DPIICoefficients::Fuchsian { wm1, w0, .. } => am * shift(wm1, -(nn - 1.0)) - w0 * a,
        DPIICoefficients::NonFuchsian { wm2, wm1, .. } => am * wm2 - shift(wm1, nn) * a,
    };
    let rhs = lin + outer * a * dm * a + comm(outer, &state.s) * a;
    let outer_inv = inv(outer, "outer dPII coefficient").map_err(|_| Error::Singular {
        what: "outer dPII coefficient (W_1 or W_0)".into(),
    })?;
    let cof_inv = inv(&cof, "Verblunsky cofactor").map_err(|_| Error::Singular {
        what: "Verblunsky cofactor I - aR2d aL1".into(),
    })?;
    let ap = outer_inv * rhs * cof_inv;
    let s_n = &state.s + a * dm;
    let s_np1 = &s_n + &ap * dd;
    let cubic = dd * a * dm + dd * &ap * dd;
    let (last, body) = match coeffs {
        DPIICoefficients::Fuchsian { wm1, w0, w1 } => {
            let m = shift(wm1, -(nn + 1.0));
            if rcond(&m) < 1e-14 {
                return Err(Error::Resonance { m: n as i64 + 1 });
            }
            (m, dd * w0 + dm * w1 - cubic * w1 - dd * comm(w1, &s_np1))
        }
        DPIICoefficients::NonFuchsian { wm2, wm1, w0 } => (
            wm2.clone(),
            dd * shift(wm1, nn) + dm * w0 - cubic * w0 - dd * comm(w0, &s_np1),
        ),
    };
    let last_inv = inv(&last, "W_-2").map_err(|_| Error::Singular { what: "W_-2".into() })?;
    let dp = last_inv * body;
    let cond = StepConditioning {
        outer: rcond(outer),
        cofactor: rcond(&cof),
        last: rcond(&last),
    };
    Ok((
        DPIIState {
            n: n + 1,
            a_l1_prev: a.clone(),
            a_l1_cur: ap,
            a_r2d_prev: dd.clone(),
            a_r2d_cur: dp,
            s: s_n,
        },
        cond,
    ))
}

/// Solves the first equation for `aL1[n+1]`, extends the nonlocal sum, then solves the second for `aR2d[n+1]`.
pub fn fuchsian_step(state: &DPIIState, coeffs: &DPIICoefficients) -> Result<DPIIState> {
    match coeffs {
        DPIICoefficients::Fuchsian { .. } => step(state, coeffs).map(|s| s.0),
        _ => Err(Error::SpecMismatch("Fuchsian step needs Fuchsian coefficients".into())),
    }
}

pub fn nonfuchsian_step(state: &DPIIState, coeffs: &DPIICoefficients) -> Result<DPIIState> {
    match coeffs {
        DPIICoefficients::NonFuchsian { .. } => step(state, coeffs).map(|s| s.0),
        _ => Err(Error::SpecMismatch("non-Fuchsian step needs non-Fuchsian coefficients".into())),
    }
}

/// One row of a propagated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub n: usize,
    pub a_l1: CMat,
    pub a_r2d: CMat,
    pub s: CMat,
    /// Residual norms of both equations at the previous site, once the new site is known.
    pub residual: (f64, f64),
    pub conditioning: Option<StepConditioning>,
}

/// Propagates `steps` sites from `state` and returns the lattice through the last site with one record per site.
pub fn propagate(
    state: &DPIIState,
    coeffs: &DPIICoefficients,
    steps: usize,
) -> Result<(VerblunskyLattice, Vec<TrajectoryRecord>)> {
    let d = state.a_l1_cur.nrows();
    let first = state.n;
    // sites before `first - 1` are unknown here; they only enter through `s`
    let mut a_l1 = vec![zeros(d, d); first.saturating_sub(1)];
    let mut a_r2d = vec![zeros(d, d); first.saturating_sub(1)];
    a_l1.push(state.a_l1_prev.clone());
    a_r2d.push(state.a_r2d_prev.clone());
    a_l1.push(state.a_l1_cur.clone());
    a_r2d.push(state.a_r2d_cur.clone());
    let mut records = vec![TrajectoryRecord {
        n: first,
        a_l1: state.a_l1_cur.clone(),
        a_r2d: state.a_r2d_cur.clone(),
        s: state.s.clone(),
        residual: (0.0, 0.0),
        conditioning: None,
    }];
    let mut cur = state.clone();
    for _ in 0..steps {
        let (next, cond) = step(&cur, coeffs)?;
        let (r1, r2) = state_residual(&cur, &next, coeffs);
        records.last_mut().unwrap().residual = (fro(&r1), fro(&r2));
        a_l1.push(next.a_l1_cur.clone());
        a_r2d.push(next.a_r2d_cur.clone());
        records.push(TrajectoryRecord {
            n: next.n,
            a_l1: next.a_l1_cur.clone(),
            a_r2d: next.a_r2d_cur.clone(),
            s: next.s.clone(),
            residual: (f64::NAN, f64::NAN),
            conditioning: Some(cond),
        });
        cur = next;
    }
    let n_max = a_l1.len() - 1;
    let lat = VerblunskyLattice {
        n_max,
        a_l1,
        a_r2d,
        h_l: vec![eye(d); n_max + 1],
        h_r: vec![eye(d); n_max + 1],
    };
    Ok((lat, records))
}

/// Residuals at site `cur.n` given the next state, using the running sum rather than a full lattice.
pub fn state_residual(cur: &DPIIState, next: &DPIIState, coeffs: &DPIICoefficients) -> (CMat, CMat) {
    let d = cur.a_l1_cur.nrows();
    let n_max = 2;
    let lat = VerblunskyLattice {
        n_max,
        a_l1: vec![cur.a_l1_prev.clone(), cur.a_l1_cur.clone(), next.a_l1_cur.clone()],
        a_r2d: vec![cur.a_r2d_prev.clone(), cur.a_r2d_cur.clone(), next.a_r2d_cur.clone()],
        h_l: vec![eye(d); 3],
        h_r: vec![eye(d); 3],
    };
    let st = Sites::of(&lat, 1);
    let nn = cur.n as f64;
    let outer = coeffs.outer();
    let s_np1 = &next.s + &next.a_l1_cur * &cur.a_r2d_cur;
    let (lhs1, lhs2) = match coeffs {
        DPIICoefficients::Fuchsian { wm1, w0, w1 } => (
            w0 * st.a + w1 * st.ap - st.am * shift(wm1, -(nn - 1.0)),
            st.dd * w0 + st.dm * w1 - shift(wm1, -(nn + 1.0)) * st.dp,
        ),
        DPIICoefficients::NonFuchsian { wm2, wm1, w0 } => (
            shift(wm1, nn) * st.a + w0 * st.ap - st.am * wm2,
            st.dd * shift(wm1, nn) + st.dm * w0 - wm2 * st.dp,
        ),
    };
    let r1 = lhs1 - outer * st.cubic_l() - comm(outer, &cur.s) * st.a;
    let r2 = lhs2 - st.cubic_r() * outer - st.dd * comm(outer, &s_np1);
    (r1, r2)
}

/// Closed form for `W_1 = 0`:
/// `aL1[n] = W_0^{1-n} aL1[1] (W_-1 - I)...(W_-1 - (n-1)I)`,
/// `aR2d[n] = (W_-1 - nI)^-1 ... (W_-1 - 2I)^-1 aR2d[1] W_0^{n-1}`.
pub fn linear_fuchsian_solution(
    a_l1_1: &CMat,
    a_r2d_1: &CMat,
    wm1: &CMat,
    w0: &CMat,
    n: usize,
) -> Result<(CMat, CMat)> {
    if n == 0 {
        return Err(Error::Range { index: 0, limit: 1 });
    }
    let w0_inv = inv(w0, "W_0")?;
    let mut a = a_l1_1.clone();
    let mut dd = a_r2d_1.clone();
    for m in 2..=n {
        a = &w0_inv * a * shift(wm1, -((m - 1) as f64));
        dd = inv(&shift(wm1, -(m as f64)), "W_-1 - mI").map_err(|_| Error::Resonance { m: m as i64 })? * dd * w0;
    }
    Ok((a, dd))
}

/// `|aR2d[1] aL1[1] - W_-1 (W_-1 - I)^-1|`, reported and never enforced.
pub fn linear_fuchsian_constraint(a_l1_1: &CMat, a_r2d_1: &CMat, wm1: &CMat) -> Result<f64> {
    let target = wm1 * inv(&shift(wm1, -1.0), "W_-1 - I").map_err(|_| Error::Resonance { m: 1 })?;
    Ok(fro(&(a_r2d_1 * a_l1_1 - target)))
}

/// Closed form for `W_0 = 0`:
/// `aL1[n] = (W_-1 + nI)^-1 ... (W_-1 + 2I)^-1 aL1[1] W_-2^{n-1}`,
/// `aR2d[n] = W_-2^{1-n} aR2d[1] (W_-1 + I)...(W_-1 + (n-1)I)`.
pub fn linear_nonfuchsian_solution(
    a_l1_1: &CMat,
    a_r2d_1: &CMat,
    wm2: &CMat,
    wm1: &CMat,
    n: usize,
) -> Result<(CMat, CMat)> {
    if n == 0 {
        return Err(Error::Range { index: 0, limit: 1 });
    }
    let wm2_inv = inv(wm2, "W_-2")?;
    let mut a = a_l1_1.clone();
    let mut dd = a_r2d_1.clone();
    for m in 2..=n {
        a = inv(&shift(wm1, m as f64), "W_-1 + mI")? * a * wm2;
        dd = &wm2_inv * dd * shift(wm1, (m - 1) as f64);
    }
    Ok((a, dd))
}

/// Residual of `aR2d[n-1] aL1[n] = -W_-2 aR2d[n] aL1[n] + aR2d[n-1] aL1[n-1] W_-2` on the closed form.
pub fn linear_nonfuchsian_identity(
    a_l1_1: &CMat,
    a_r2d_1: &CMat,
    wm2: &CMat,
    wm1: &CMat,
    n: usize,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::Range { index: n as i64, limit: 2 });
    }
    let (am, dm) = linear_nonfuchsian_solution(a_l1_1, a_r2d_1, wm2, wm1, n - 1)?;
    let (a, dd) = linear_nonfuchsian_solution(a_l1_1, a_r2d_1, wm2, wm1, n)?;
    let lhs = &dm * &a;
    let rhs = -(wm2 * &dd * &a) + &dm * &am * wm2;
    Ok(fro(&(&lhs - &rhs)) / (1.0 + fro(&lhs)))
}

/// `n a_n / (1 - a_n^2) + k (a_{n+1} + a_{n-1})` for a scalar sequence with `alpha[0] = 1`.
pub fn scalar_dpii_residual(alpha: &[C64], k: C64, n: usize) -> Result<C64> {
    if n == 0 || n + 1 >= alpha.len() {
        return Err(Error::Range {
            index: n as i64,
            limit: alpha.len() as i64 - 2,
        });
    }
    let a = alpha[n];
    let den = c(1.0, 0.0) - a * a;
    if den.norm() < 1e-14 {
        return Err(Error::Pole(format!("alpha_{n}^2 = 1")));
    }
    Ok(a * (n as f64) / den + k * (alpha[n + 1] + alpha[n - 1]))
}

/// Locality verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Locality {
    Local,
    NonLocal,
}

/// Commutator norms behind a locality verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityReport {
    pub verdict: Locality,
    /// `(label, |[outer, X]|)` for the other two coefficients and the weight sample.
    pub commutators: Vec<(String, f64)>,
    pub tol: f64,
}

/// Local when the outer coefficient commutes with the other two and with `w(z0)`.
pub fn locality_check(coeffs: &DPIICoefficients, w_sample: &CMat, tol: f64) -> LocalityReport {
    let outer = coeffs.outer();
    let others: Vec<(&str, &CMat)> = match coeffs {
        DPIICoefficients::Fuchsian { wm1, w0, .. } => vec![("W_-1", wm1), ("W_0", w0)],
        DPIICoefficients::NonFuchsian { wm2, wm1, .. } => vec![("W_-2", wm2), ("W_-1", wm1)],
    };
    let scale = 1.0 + fro(outer);
    let mut commutators: Vec<(String, f64)> = others
        .iter()
        .map(|(name, m)| (name.to_string(), fro(&comm(outer, m)) / (scale * (1.0 + fro(m)))))
        .collect();
    commutators.push((
        "w(z0)".into(),
        fro(&comm(outer, w_sample)) / (scale * (1.0 + fro(w_sample))),
    ));
    let verdict = if commutators.iter().all(|(_, v)| *v <= tol) {
        Locality::Local
    } else {
        Locality::NonLocal
    };
    LocalityReport {
        verdict,
        commutators,
        tol,
    }
}

/// Residuals of the relations read off `M_n^[0]` from the expansion at infinity:
/// the diagonal blocks (first and fourth) and the off-diagonal blocks (second and third).
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliaryResiduals {
    pub n: usize,
    pub first: CMat,
    pub second: CMat,
    pub third: CMat,
    pub fourth: CMat,
}

/// Needs the lattice through `n + 2` (for `X^(2)`), `n >= 1`.
pub fn auxiliary_residuals(lat: &VerblunskyLattice, coeffs: &DPIICoefficients, n: usize) -> Result<AuxiliaryResiduals> {
    need(lat, n, n + 2)?;
    let x = x_coefficients(lat, n)?;
    let (a, b, cc, d) = (x.a(), x.b(), x.c(), x.d());
    let (a2, b2, c2) = (x.a2(), x.b2(), x.c2());
    let al = &lat.a_l1[n];
    let ad = &lat.a_r2d[n];
    let h = &lat.h_r[n];
    let hinv = inv(&lat.h_r[n - 1], "H^R")?;
    let nn = n as f64;
    let dim = lat.n_dim();
    let id = eye(dim);
    Ok(match coeffs {
        DPIICoefficients::Fuchsian { wm1, w0, w1 } => {
            let wn = shift(wm1, -nn);
            AuxiliaryResiduals {
                n,
                first: wm1 + comm(&a, w0) + comm(&a2, w1) + w1 * (&a * &a + &b * &cc) - &a * w1 * &a
                    - al * &wn * ad,
                second: -(w0 * &b) - w1 * &b2 + w1 * (&a * &b + &b * &d) - &a * w1 * &b + al * &wn * h,
                third: &cc * w0 + &c2 * w1 - &cc * w1 * &a + &hinv * &wn * ad,
                fourth: -(id * c(nn, 0.0)) - &cc * w1 * &b - &hinv * &wn * h,
            }
        }
        DPIICoefficients::NonFuchsian { wm2, wm1, w0 } => {
            let wn = shift(wm1, nn);
            AuxiliaryResiduals {
                n,
                first: -&a + wm2 + comm(&a, wm1) + comm(&a2, w0) + w0 * (&a * &a + &b * &cc) - &a * w0 * &a
                    - al * wm2 * ad,
                second: -&b - &wn * &b - w0 * &b2 + w0 * (&a * &b + &b * &d) - &a * w0 * &b + al * wm2 * h,
                third: -&cc + &cc * &wn + &c2 * w0 - &cc * w0 * &a + &hinv * wm2 * ad,
                fourth: -&d - &cc * w0 * &b - &hinv * wm2 * h,
            }
        }
    })
}

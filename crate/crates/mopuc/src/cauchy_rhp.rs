//! Cauchy transforms of the Szegő families and the Riemann-Hilbert frames `Y_n`, `X_n`, `Z_n`.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::linalg::{block2, c, eye, fro, inv, zeros, CMat, C64};
use crate::moments::{MomentTable, M_MAX};
use crate::szego::{MatrixPolynomial, SzegoFamily, VerblunskyLattice};
use crate::weights::WeightSpec;

/// Half-width of the annulus around the circle where quadrature is refused.
pub const NEAR_CIRCLE: f64 = 0.05;

/// Radius used for one-sided boundary values.
pub const BOUNDARY_R: f64 = 1.0 - 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyValues {
    pub n: usize,
    pub z: C64,
    pub q_l1: CMat,
    pub q_l2: CMat,
    pub q_r1: CMat,
    pub q_r2: CMat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Exterior,
}

impl Region {
    pub fn of(z: C64) -> Result<Region> {
        let r = z.norm();
        if r < 1.0 {
            Ok(Region::Interior)
        } else if r > 1.0 {
            Ok(Region::Exterior)
        } else {
            Err(Error::Domain("Cauchy transform evaluated on the unit circle".into()))
        }
    }
}

/// Which side of the weight a Laurent integrand multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hand {
    Left,
    Right,
}

/// `f(zeta) = sum_k coeffs[k] zeta^(k + offset)`.
struct Integrand<'a> {
    coeffs: &'a [CMat],
    offset: i64,
    hand: Hand,
    /// Leading exterior coefficients that vanish by biorthogonality.
    vanish: usize,
}

impl Integrand<'_> {
    /// `oint zeta-bar^m f w dm` (left) or `oint zeta-bar^m w f dm` (right) as a finite moment sum.
    fn moment(&self, table: &MomentTable, m: i64) -> Result<CMat> {
        let d = table.n_dim;
        let mut acc = zeros(d, d);
        for (k, a) in self.coeffs.iter().enumerate() {
            let mu = table.get(m - k as i64 - self.offset)?;
            acc += match self.hand {
                Hand::Left => a * mu,
                Hand::Right => mu * a,
            };
        }
        Ok(acc)
    }

    fn eval(&self, zeta: C64) -> CMat {
        let d = self.coeffs[0].nrows();
        let mut acc = zeros(d, d);
        let mut p = c(1.0, 0.0);
        for a in self.coeffs {
            acc += a * p;
            p *= zeta;
        }
        acc * zeta.powi(self.offset as i32)
    }

    fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(fro).sum()
    }
}

fn four<'a>(family: &'a SzegoFamily) -> [Integrand<'a>; 4] {
    let n = family.n as i64;
    [
        Integrand {
            coeffs: &family.p_l1.coeffs,
            offset: -n,
            hand: Hand::Left,
            vanish: family.n,
        },
        Integrand {
            coeffs: &family.t_l2.coeffs,
            offset: -n - 1,
            hand: Hand::Right,
            vanish: family.n,
        },
        Integrand {
            coeffs: &family.p_r1.coeffs,
            offset: -n,
            hand: Hand::Right,
            vanish: family.n,
        },
        Integrand {
            coeffs: &family.t_r2.coeffs,
            offset: -n - 1,
            hand: Hand::Left,
            vanish: family.n,
        },
    ]
}

fn series_one(f: &Integrand, table: &MomentTable, z: C64, region: Region) -> Result<CMat> {
    let d = table.n_dim;
    let scale = table.max_norm() * f.coeff_scale();
    let mut sum = zeros(d, d);
    let mut quiet = 0;
    let mut power = c(1.0, 0.0);
    let zi = match region {
        Region::Interior => z,
        Region::Exterior => c(1.0, 0.0) / z,
    };
    // exact zeros are skipped so roundoff in them is not amplified by large |z|
    let mut i: i64 = match region {
        Region::Interior => 0,
        Region::Exterior => f.vanish as i64 + 1,
    };
    if region == Region::Exterior {
        power = zi.powi(i as i32);
    }
    loop {
        let m = match region {
            Region::Interior => i,
            Region::Exterior => -i,
        };
        let fm = match f.moment(table, m) {
            Ok(v) => v,
            Err(Error::Range { .. }) => {
                return Err(Error::Truncation(format!(
                    "Cauchy series at |z| = {} needs moments beyond J = {}",
                    z.norm(),
                    table.j_max
                )))
            }
            Err(e) => return Err(e),
        };
        let term = fm * power;
        let tn = fro(&term);
        sum += term;
        // orthogonality zeroes up to `coeffs.len()` leading terms, which must not end the sum
        let past_support = (i as usize) > f.coeffs.len() + 1 || region == Region::Exterior;
        if past_support && tn <= 1e-15 * (1.0 + scale) + 1e-16 * fro(&sum) {
            quiet += 1;
            if quiet >= 4 {
                break;
            }
        } else {
            quiet = 0;
        }
        power *= zi;
        i += 1;
    }
    Ok(match region {
        Region::Interior => sum,
        Region::Exterior => -sum,
    })
}

/// Cauchy transforms by their interior or exterior power series in the moments.
pub fn series_eval(family: &SzegoFamily, table: &MomentTable, z: C64, region: Region) -> Result<CauchyValues> {
    match (region, z.norm()) {
        (Region::Interior, r) if r >= 1.0 => return Err(Error::Domain(format!("interior series at |z| = {r}"))),
        (Region::Exterior, r) if r <= 1.0 => return Err(Error::Domain(format!("exterior series at |z| = {r}"))),
        _ => {}
    }
    let [a, b, cc, d] = four(family);
    Ok(CauchyValues {
        n: family.n,
        z,
        q_l1: series_one(&a, table, z, region)?,
        q_l2: series_one(&b, table, z, region)?,
        q_r1: series_one(&cc, table, z, region)?,
        q_r2: series_one(&d, table, z, region)?,
    })
}

/// Cached weight samples on uniform circle grids.
pub struct CircleSampler<'a> {
    spec: &'a WeightSpec,
    cache: RefCell<BTreeMap<usize, Rc<Vec<CMat>>>>,
}

impl<'a> CircleSampler<'a> {
    pub fn new(spec: &'a WeightSpec) -> Self {
        CircleSampler {
            spec,
            cache: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn spec(&self) -> &WeightSpec {
        self.spec
    }

    pub fn samples(&self, m: usize) -> Result<Rc<Vec<CMat>>> {
        if let Some(s) = self.cache.borrow().get(&m) {
            return Ok(s.clone());
        }
        let s = Rc::new(self.spec.sample_circle(m)?);
        self.cache.borrow_mut().insert(m, s.clone());
        Ok(s)
    }
}

fn node(j: usize, m: usize) -> C64 {
    c(0.0, 2.0 * PI * j as f64 / m as f64).exp()
}

/// Quadrature value and the largest summand norm, which sets the roundoff floor.
fn quadrature_one(f: &Integrand, w: &[CMat], z: C64) -> (CMat, f64) {
    let m = w.len();
    let d = w[0].nrows();
    let mut acc = zeros(d, d);
    let mut big: f64 = 0.0;
    for (j, wj) in w.iter().enumerate() {
        let zeta = node(j, m);
        let k = c(1.0, 0.0) / (c(1.0, 0.0) - zeta.conj() * z);
        let fz = f.eval(zeta);
        let term = match f.hand {
            Hand::Left => fz * wj * k,
            Hand::Right => wj * fz * k,
        };
        big = big.max(fro(&term));
        acc += term;
    }
    (acc / c(m as f64, 0.0), big)
}

/// Cauchy transforms by trapezoid quadrature of the defining integrals, doubling the grid to convergence.
pub fn cauchy_eval(family: &SzegoFamily, sampler: &CircleSampler, z: C64, initial_m: usize) -> Result<CauchyValues> {
    let r = z.norm();
    if (r - 1.0).abs() <= NEAR_CIRCLE {
        return Err(Error::Domain(format!(
            "|z| = {r} is within {NEAR_CIRCLE} of the circle; use series evaluation"
        )));
    }
    let parts = four(family);
    let mut m = initial_m.max(2 * family.n + 8).next_power_of_two();
    let eval = |m: usize| -> Result<(Vec<CMat>, f64)> {
        let w = sampler.samples(m)?;
        let (vals, bigs): (Vec<CMat>, Vec<f64>) = parts.iter().map(|f| quadrature_one(f, &w, z)).unzip();
        Ok((vals, bigs.into_iter().fold(0.0, f64::max)))
    };
    let (mut prev, _) = eval(m)?;
    let mut iterations = 0;
    let mut change = f64::INFINITY;
    while 2 * m <= M_MAX {
        m *= 2;
        iterations += 1;
        let (next, big) = eval(m)?;
        change = next.iter().zip(&prev).map(|(a, b)| fro(&(a - b))).fold(0.0, f64::max);
        let scale = next.iter().map(fro).fold(0.0, f64::max);
        prev = next;
        if change <= 1e-13 * (1.0 + scale) + 1e-14 * big {
            let mut it = prev.into_iter();
            return Ok(CauchyValues {
                n: family.n,
                z,
                q_l1: it.next().unwrap(),
                q_l2: it.next().unwrap(),
                q_r1: it.next().unwrap(),
                q_r2: it.next().unwrap(),
            });
        }
    }
    Err(Error::Convergence {
        iterations,
        last_change: change,
    })
}

/// `Y_n`, `X_n = Y_n diag(z^-n, z^n)` and `Z_n = Y_n diag(w z^-n, I)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct RHPFrame {
    pub n: usize,
    pub z: C64,
    pub y: CMat,
    pub x: CMat,
    pub z_frame: Option<CMat>,
}

/// Evaluates `sum_k c_k z^(k - n)` without forming `z^n` separately.
fn shifted_poly(p: &MatrixPolynomial, z: C64, shift: i64) -> CMat {
    let d = p.n_dim();
    let mut acc = zeros(d, d);
    for (k, ck) in p.coeffs.iter().enumerate() {
        acc += ck * z.powi((k as i64 + shift) as i32);
    }
    acc
}

/// Assembles the frame from family `n`, family `n-1` and their Cauchy values.
pub fn assemble_frame(
    z: C64,
    fam: &SzegoFamily,
    prev: Option<(&SzegoFamily, &CauchyValues)>,
    cv: &CauchyValues,
    w: Option<&CMat>,
) -> Result<RHPFrame> {
    let n = fam.n;
    let d = fam.p_l1.n_dim();
    let zn = z.powi(n as i32);
    let zmn = c(1.0, 0.0) / zn;
    let (y21, y22, x21, x22) = match prev {
        None => (zeros(d, d), eye(d), zeros(d, d), eye(d)),
        Some((pf, pcv)) => {
            let hinv = inv(&pf.h_r, "H^R")?;
            let y21 = -(&hinv * pf.t_r2.eval(z));
            let y22 = -(&hinv * &pcv.q_r2);
            let x21 = -(&hinv * shifted_poly(&pf.t_r2, z, -(n as i64)));
            let x22 = &y22 * zn;
            (y21, y22, x21, x22)
        }
    };
    let y = block2(&fam.p_l1.eval(z), &cv.q_l1, &y21, &y22);
    let x = block2(&shifted_poly(&fam.p_l1, z, -(n as i64)), &(&cv.q_l1 * zn), &x21, &x22);
    let z_frame = w.map(|w| block2(&(fam.p_l1.eval(z) * w * zmn), &cv.q_l1, &(&y21 * w * zmn), &y22));
    Ok(RHPFrame {
        n,
        z,
        y,
        x,
        z_frame,
    })
}

/// How Cauchy values are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    Quadrature,
}

/// Everything needed to evaluate frames of one weight.
pub struct RhpContext<'a> {
    pub spec: &'a WeightSpec,
    pub table: &'a MomentTable,
    pub families: &'a [SzegoFamily],
    pub lattice: VerblunskyLattice,
    pub sampler: CircleSampler<'a>,
}

/// Jump residuals at one boundary sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpResidual {
    pub y: f64,
    pub z: f64,
}

/// Value at distance 0 of the polynomial through `(d_i, f_i)` (Neville).
fn extrapolate(points: &[(f64, CMat)]) -> CMat {
    let mut p: Vec<CMat> = points.iter().map(|(_, f)| f.clone()).collect();
    let k = p.len();
    for level in 1..k {
        for i in 0..k - level {
            let (di, dj) = (points[i].0, points[i + level].0);
            p[i] = (&p[i] * c(dj, 0.0) - &p[i + 1] * c(di, 0.0)) / c(dj - di, 0.0);
        }
    }
    p.swap_remove(0)
}

impl<'a> RhpContext<'a> {
    pub fn new(spec: &'a WeightSpec, table: &'a MomentTable, families: &'a [SzegoFamily]) -> Self {
        RhpContext {
            spec,
            table,
            families,
            lattice: VerblunskyLattice::from_families(families),
            sampler: CircleSampler::new(spec),
        }
    }

    pub fn n_dim(&self) -> usize {
        self.table.n_dim
    }

    fn family(&self, n: usize) -> Result<&SzegoFamily> {
        self.families.get(n).ok_or(Error::Range {
            index: n as i64,
            limit: self.families.len() as i64 - 1,
        })
    }

    pub fn cauchy(&self, n: usize, z: C64, method: Method) -> Result<CauchyValues> {
        let fam = self.family(n)?;
        match method {
            Method::Series => series_eval(fam, self.table, z, Region::of(z)?),
            Method::Quadrature => cauchy_eval(fam, &self.sampler, z, 64),
        }
    }

    /// Frame at `z`; `with_weight` also assembles `Z_n`.
    pub fn frame(&self, n: usize, z: C64, method: Method, with_weight: bool) -> Result<RHPFrame> {
        let fam = self.family(n)?;
        let cv = self.cauchy(n, z, method)?;
        let w = if with_weight { Some(self.spec.eval(z)?) } else { None };
        if n == 0 {
            return assemble_frame(z, fam, None, &cv, w.as_ref());
        }
        let pf = self.family(n - 1)?;
        let pcv = self.cauchy(n - 1, z, method)?;
        assemble_frame(z, fam, Some((pf, &pcv)), &cv, w.as_ref())
    }

    /// Boundary values `(Y+, Y-, Z+, Z-)` at `zeta` by three-radius extrapolation from each side.
    pub fn boundary_values(&self, n: usize, zeta: C64) -> Result<(CMat, CMat, CMat, CMat)> {
        let r = BOUNDARY_R;
        let side = |zs: [C64; 3]| -> Result<(CMat, CMat)> {
            let mut ys = Vec::new();
            let mut zf = Vec::new();
            for z in zs {
                let f = self.frame(n, z, Method::Series, true)?;
                let d = (z.norm() - 1.0).abs();
                ys.push((d, f.y));
                zf.push((d, f.z_frame.unwrap()));
            }
            Ok((extrapolate(&ys), extrapolate(&zf)))
        };
        let (yp, zp) = side([zeta * r, zeta * r.powi(2), zeta * r.powi(3)])?;
        let (ym, zm) = side([zeta / r, zeta / r.powi(2), zeta / r.powi(3)])?;
        Ok((yp, ym, zp, zm))
    }

    /// `Y+ = Y- [[I, w zeta-bar^n], [0, I]]` and `Z+ = Z- [[I, I], [0, I]]`, relative residuals.
    pub fn check_jump(&self, n: usize, samples: &[C64]) -> Result<JumpResidual> {
        let d = self.n_dim();
        let mut worst = JumpResidual { y: 0.0, z: 0.0 };
        for &zeta in samples {
            let (yp, ym, zp, zm) = self.boundary_values(n, zeta)?;
            let w = self.spec.eval(zeta)?;
            let jy = block2(&eye(d), &(w * zeta.conj().powi(n as i32)), &zeros(d, d), &eye(d));
            let jz = block2(&eye(d), &eye(d), &zeros(d, d), &eye(d));
            worst.y = worst.y.max(jump_residual(&yp, &ym, &jy));
            worst.z = worst.z.max(jump_residual(&zp, &zm, &jz));
        }
        Ok(worst)
    }

    /// Max `|det Y_n(z) - 1|` over the points.
    pub fn det_residual(&self, n: usize, points: &[C64], method: Method) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &z in points {
            let f = self.frame(n, z, method, false)?;
            worst = worst.max((f.y.determinant() - c(1.0, 0.0)).norm());
        }
        Ok(worst)
    }

    /// Residuals of the two Cauchy-transform recursions at `z` for degree `n >= 1`.
    pub fn cauchy_recursion_residual(&self, n: usize, z: C64, method: Method) -> Result<(f64, f64)> {
        let lat = &self.lattice;
        let d = self.n_dim();
        let prev = self.cauchy(n - 1, z, method)?;
        let cur = self.cauchy(n, z, method)?;
        let next = self.cauchy(n + 1, z, method)?;
        let r1 = &next.q_l1 - &cur.q_l1 - &lat.a_l1[n + 1] * &cur.q_r2;
        let rhs2 = &lat.a_r2d[n] * &cur.q_l1 + (eye(d) - &lat.a_r2d[n] * &lat.a_l1[n]) * &prev.q_r2;
        let r2 = &cur.q_r2 * z - &rhs2;
        Ok((
            fro(&r1) / (1.0 + fro(&next.q_l1)),
            fro(&r2) / (1.0 + fro(&rhs2)),
        ))
    }

    /// `X_n^(1)`, `X_n^(2)` read off the polynomial coefficients and the exterior moment series.
    pub fn x_direct(&self, n: usize) -> Result<XCoefficients> {
        let d = self.n_dim();
        let fam = self.family(n)?;
        let [ql1, ..] = four(fam);
        // moment(m) of the offset integrand is the m + n moment of P^L_{1,n} w
        let ni = n as i64;
        let b1 = -ql1.moment(self.table, -ni - 1)?;
        let b2 = -ql1.moment(self.table, -ni - 2)?;
        let (a1, a2) = (
            if n >= 1 { fam.p_l1.coeff(n - 1) } else { zeros(d, d) },
            if n >= 2 { fam.p_l1.coeff(n - 2) } else { zeros(d, d) },
        );
        let (c1, c2, d1, d2) = if n == 0 {
            (zeros(d, d), zeros(d, d), zeros(d, d), zeros(d, d))
        } else {
            let pf = self.family(n - 1)?;
            let hinv = inv(&pf.h_r, "H^R")?;
            let [.., qr2] = four(pf);
            let c1 = -(&hinv * pf.t_r2.coeff(n - 1));
            let c2 = if n >= 2 { -(&hinv * pf.t_r2.coeff(n - 2)) } else { zeros(d, d) };
            let d1 = &hinv * qr2.moment(self.table, -ni - 1)?;
            let d2 = &hinv * qr2.moment(self.table, -ni - 2)?;
            (c1, c2, d1, d2)
        };
        Ok(XCoefficients {
            n,
            x1: block2(&a1, &b1, &c1, &d1),
            x2: block2(&a2, &b2, &c2, &d2),
        })
    }

    /// `X_n^(1)` from `X_n(z) - I` at `|z| = 1e4, 1e5` along `arg z = theta`.
    pub fn x1_fit(&self, n: usize, theta: f64) -> Result<CMat> {
        let z1 = c(0.0, theta).exp() * 1e4;
        let z2 = c(0.0, theta).exp() * 1e5;
        let d2 = 2 * self.n_dim();
        let e1 = self.frame(n, z1, Method::Series, false)?.x - eye(d2);
        let e2 = self.frame(n, z2, Method::Series, false)?.x - eye(d2);
        let (u1, u2) = (c(1.0, 0.0) / z1, c(1.0, 0.0) / z2);
        Ok((e1 * (u2 * u2) - e2 * (u1 * u1)) / (u1 * u2 * (u2 - u1)))
    }
}

fn jump_residual(plus: &CMat, minus: &CMat, jump: &CMat) -> f64 {
    fro(&(plus - minus * jump)) / (1.0 + fro(plus))
}

/// Uniform samples `exp(2 pi i (m + 1/2) / count)`, offset from `z = 1`.
pub fn circle_samples(count: usize) -> Vec<C64> {
    (0..count)
        .map(|m| c(0.0, 2.0 * PI * (m as f64 + 0.5) / count as f64).exp())
        .collect()
}

/// First two coefficients of `X_n(z) = I + X1/z + X2/z^2 + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct XCoefficients {
    pub n: usize,
    pub x1: CMat,
    pub x2: CMat,
}

impl XCoefficients {
    pub fn n_dim(&self) -> usize {
        self.x1.nrows() / 2
    }

    fn part(m: &CMat, i: usize, j: usize) -> CMat {
        let d = m.nrows() / 2;
        m.view((i * d, j * d), (d, d)).into_owned()
    }

    pub fn a(&self) -> CMat {
        Self::part(&self.x1, 0, 0)
    }
    pub fn b(&self) -> CMat {
        Self::part(&self.x1, 0, 1)
    }
    pub fn c(&self) -> CMat {
        Self::part(&self.x1, 1, 0)
    }
    pub fn d(&self) -> CMat {
        Self::part(&self.x1, 1, 1)
    }
    pub fn a2(&self) -> CMat {
        Self::part(&self.x2, 0, 0)
    }
    pub fn b2(&self) -> CMat {
        Self::part(&self.x2, 0, 1)
    }
    pub fn c2(&self) -> CMat {
        Self::part(&self.x2, 1, 0)
    }
    pub fn d2(&self) -> CMat {
        Self::part(&self.x2, 1, 1)
    }
}

/// First-order blocks `(a_n, b_n, c_n, d_n)` from the lattice; needs the lattice through `n + 1`.
fn first_order(lat: &VerblunskyLattice, n: usize) -> Result<[CMat; 4]> {
    let d = lat.n_dim();
    let a = lat.nonlocal_sum(n);
    let b = &lat.a_l1[n + 1] * &lat.h_r[n];
    let cc = if n == 0 {
        zeros(d, d)
    } else {
        -(inv(&lat.h_r[n - 1], "H^R")? * &lat.a_r2d[n - 1])
    };
    let mut dd = zeros(d, d);
    for m in 0..n {
        dd -= inv(&lat.h_r[m], "H^R")? * &lat.a_r2d[m] * &lat.a_l1[m + 1] * &lat.h_r[m];
    }
    Ok([a, b, cc, dd])
}

/// `X_n^(1)` and `X_n^(2)` from Verblunsky and quasi-tau matrices.
///
/// The second-order blocks follow from `X_{n+1} diag(I, I/z) = R_n X_n`, seeded by
/// `a^(2)_0 = a^(2)_1 = 0`, `c^(2)_0 = c^(2)_1 = 0`, `d^(2)_0 = 0`. `b^(2)_n` needs the lattice
/// through `n + 2`.
pub fn x_coefficients(lat: &VerblunskyLattice, n: usize) -> Result<XCoefficients> {
    if n + 2 > lat.n_max {
        return Err(Error::Range {
            index: n as i64 + 2,
            limit: lat.n_max as i64,
        });
    }
    let d = lat.n_dim();
    let fo: Vec<[CMat; 4]> = (0..=n + 1).map(|m| first_order(lat, m)).collect::<Result<_>>()?;
    let mut a2 = zeros(d, d);
    let mut c2 = zeros(d, d);
    let mut d2 = zeros(d, d);
    let b2_at = |m: usize| -> CMat {
        let [a, b, _, dd] = &fo[m];
        let [an, bn, ..] = &fo[m + 1];
        bn - (an - a) * b + b * dd
    };
    for m in 0..n {
        let [a, b, cc, _] = &fo[m];
        let [an, _, cn, _] = &fo[m + 1];
        a2 += (an - a) * a - b * cc;
        c2 = cn * a + cc;
        d2 += cn * b2_at(m);
    }
    let [a, b, cc, dd] = &fo[n];
    Ok(XCoefficients {
        n,
        x1: block2(a, b, cc, dd),
        x2: block2(&a2, &b2_at(n), &c2, &d2),
    })
}

/// Max over `n` of `‖a_{n+1} - a_n + b_n c_{n+1}‖` from the lattice formulas.
pub fn abc_identity_residual(lat: &VerblunskyLattice) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in 0..lat.n_max.saturating_sub(1) {
        let [a, b, ..] = first_order(lat, n)?;
        let [an, _, cn, _] = first_order(lat, n + 1)?;
        worst = worst.max(fro(&(an - a + b * cn)));
    }
    Ok(worst)
}

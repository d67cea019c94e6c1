//! The four Szegő matrix polynomial families, Verblunsky matrices and quasi-tau matrices.

use crate::error::{Error, Result};
use crate::linalg::{block, dag, eye, fro, inv, poly_deriv_eval, poly_eval, rcond, set_block, solve, solve_right, zeros, CMat, C64};
use crate::moments::{truncated_moment_matrix, MomentTable, Side, QUASI_DEFINITE_RCOND};

/// Matrix polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    pub coeffs: Vec<CMat>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<CMat>) -> Self {
        MatrixPolynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn n_dim(&self) -> usize {
        self.coeffs.first().map_or(0, |m| m.nrows())
    }

    /// Coefficient `k`, zero beyond the stored range.
    pub fn coeff(&self, k: usize) -> CMat {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| zeros(self.n_dim(), self.n_dim()))
    }

    pub fn eval(&self, z: C64) -> CMat {
        poly_eval(&self.coeffs, z)
    }

    pub fn deriv(&self, z: C64) -> CMat {
        poly_deriv_eval(&self.coeffs, z)
    }

    /// Coefficient `j` of the output is the adjoint of coefficient `n - j` of the input.
    pub fn reciprocal(&self) -> MatrixPolynomial {
        MatrixPolynomial::new(self.coeffs.iter().rev().map(dag).collect())
    }

    /// Frobenius norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|m| fro(m).powi(2)).sum::<f64>().sqrt()
    }

    /// `self - other`, padding the shorter one with zeros.
    pub fn sub(&self, other: &MatrixPolynomial) -> MatrixPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        MatrixPolynomial::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    /// `z * self`.
    pub fn shift(&self) -> MatrixPolynomial {
        let mut coeffs = vec![zeros(self.n_dim(), self.n_dim())];
        coeffs.extend(self.coeffs.iter().cloned());
        MatrixPolynomial::new(coeffs)
    }

    pub fn left_mul(&self, a: &CMat) -> MatrixPolynomial {
        MatrixPolynomial::new(self.coeffs.iter().map(|m| a * m).collect())
    }
}

/// Degree-`n` snapshot of all four families.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegoFamily {
    pub n: usize,
    pub p_l1: MatrixPolynomial,
    pub p_r1: MatrixPolynomial,
    pub p_l2: MatrixPolynomial,
    pub p_r2: MatrixPolynomial,
    pub t_l2: MatrixPolynomial,
    pub t_r2: MatrixPolynomial,
    pub alpha_l1: CMat,
    pub alpha_r1: CMat,
    pub alpha_l2: CMat,
    pub alpha_r2: CMat,
    pub h_l: CMat,
    pub h_r: CMat,
}

fn stack(blocks: &[CMat], column: bool) -> CMat {
    let d = blocks[0].nrows();
    let n = blocks.len();
    let mut m = if column { zeros(n * d, d) } else { zeros(d, n * d) };
    for (k, b) in blocks.iter().enumerate() {
        if column {
            m.view_mut((k * d, 0), (d, d)).copy_from(b);
        } else {
            m.view_mut((0, k * d), (d, d)).copy_from(b);
        }
    }
    m
}

fn unstack(m: &CMat, d: usize, column: bool) -> Vec<CMat> {
    let n = if column { m.nrows() / d } else { m.ncols() / d };
    (0..n)
        .map(|k| {
            if column {
                m.view((k * d, 0), (d, d)).into_owned()
            } else {
                m.view((0, k * d), (d, d)).into_owned()
            }
        })
        .collect()
}

fn monic(mut low: Vec<CMat>) -> MatrixPolynomial {
    let d = low[0].nrows();
    low.push(eye(d));
    MatrixPolynomial::new(low)
}

/// Solves the four normal systems at degree `n`.
pub fn solve_family(table: &MomentTable, n: usize) -> Result<SzegoFamily> {
    let d = table.n_dim;
    if n > table.j_max {
        return Err(Error::Range {
            index: n as i64,
            limit: table.j_max as i64,
        });
    }
    let mu = |j: i64| table.mu(j).clone();
    if n == 0 {
        let one = MatrixPolynomial::new(vec![eye(d)]);
        return Ok(SzegoFamily {
            n,
            p_l1: one.clone(),
            p_r1: one.clone(),
            p_l2: one.clone(),
            p_r2: one.clone(),
            t_l2: one.clone(),
            t_r2: one,
            alpha_l1: eye(d),
            alpha_r1: eye(d),
            alpha_l2: eye(d),
            alpha_r2: eye(d),
            h_l: mu(0),
            h_r: mu(0),
        });
    }
    let ml = truncated_moment_matrix(table, n, Side::L)?;
    let mr = truncated_moment_matrix(table, n, Side::R)?;
    let rl = rcond(&ml);
    let rr = rcond(&mr);
    if rl.min(rr) < QUASI_DEFINITE_RCOND {
        return Err(Error::QuasiDefinite {
            degree: n,
            rcond: rl.min(rr),
        });
    }
    let ni = n as i64;
    let neg: Vec<CMat> = (0..n).map(|k| -mu(k as i64 - ni)).collect();
    let pos: Vec<CMat> = (0..n).map(|k| -mu(k as i64 + 1)).collect();
    let what = format!("moment matrix at degree {n}");

    // row (P^L_{1,n,0..n-1}) M^R = -(mu(-n), ..., mu(-1))
    let l1 = unstack(&solve_right(&mr, &stack(&neg, false), &what)?, d, false);
    // M^L (P^R_{1,n,0..n-1}) = -(mu(-n); ...; mu(-1))
    let r1 = unstack(&solve(&ml, &stack(&neg, true), &what)?, d, true);
    // M^L (e_1; ...; e_n) = -(mu(1); ...; mu(n)), e_k the reciprocal coefficients of tilde P^L_2
    let el = unstack(&solve(&ml, &stack(&pos, true), &what)?, d, true);
    // (e_1, ..., e_n) M^R = -(mu(1), ..., mu(n)) for tilde P^R_2
    let er = unstack(&solve_right(&mr, &stack(&pos, false), &what)?, d, false);

    let p_l1 = monic(l1);
    let p_r1 = monic(r1);
    let mut tl = vec![eye(d)];
    tl.extend(el);
    let t_l2 = MatrixPolynomial::new(tl);
    let mut tr = vec![eye(d)];
    tr.extend(er);
    let t_r2 = MatrixPolynomial::new(tr);
    let p_l2 = t_l2.reciprocal();
    let p_r2 = t_r2.reciprocal();

    let h_l = (0..=n).fold(zeros(d, d), |acc, k| acc + p_l1.coeff(k) * mu(ni - k as i64));
    let h_r = (0..=n).fold(zeros(d, d), |acc, k| acc + mu(ni - k as i64) * p_r1.coeff(k));
    for (h, name) in [(&h_l, "H^L"), (&h_r, "H^R")] {
        if rcond(h) < QUASI_DEFINITE_RCOND {
            return Err(Error::Singular {
                what: format!("{name} at degree {n}"),
            });
        }
    }
    Ok(SzegoFamily {
        n,
        alpha_l1: p_l1.coeff(0),
        alpha_r1: p_r1.coeff(0),
        alpha_l2: p_l2.coeff(0),
        alpha_r2: p_r2.coeff(0),
        p_l1,
        p_r1,
        p_l2,
        p_r2,
        t_l2,
        t_r2,
        h_l,
        h_r,
    })
}

/// Last-block Schur complement of the `(n+1)`-block truncated moment matrix.
///
/// `H^L_n` is the complement of `M^R_[n+1]`, `H^R_n` that of `M^L_[n+1]`.
pub fn schur_quasi_tau(table: &MomentTable, n: usize, side: Side) -> Result<CMat> {
    let d = table.n_dim;
    let m = truncated_moment_matrix(table, n + 1, side)?;
    if n == 0 {
        return Ok(m);
    }
    let a = m.view((0, 0), (n * d, n * d)).into_owned();
    let b = m.view((0, n * d), (n * d, d)).into_owned();
    let cc = m.view((n * d, 0), (d, n * d)).into_owned();
    let dd = block(&m, n, n, d);
    Ok(dd - cc * solve(&a, &b, "leading moment block")?)
}

/// Verblunsky matrices and quasi-tau matrices for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskyLattice {
    pub n_max: usize,
    pub a_l1: Vec<CMat>,
    /// `(alpha^R_{2,n})^dagger`.
    pub a_r2d: Vec<CMat>,
    pub h_l: Vec<CMat>,
    pub h_r: Vec<CMat>,
}

impl VerblunskyLattice {
    pub fn n_dim(&self) -> usize {
        self.a_l1[0].nrows()
    }

    pub fn from_families(families: &[SzegoFamily]) -> VerblunskyLattice {
        VerblunskyLattice {
            n_max: families.len() - 1,
            a_l1: families.iter().map(|f| f.alpha_l1.clone()).collect(),
            a_r2d: families
                .iter()
                .map(|f| if f.n == 0 { f.alpha_r2.clone() } else { dag(&f.alpha_r2) })
                .collect(),
            h_l: families.iter().map(|f| f.h_l.clone()).collect(),
            h_r: families.iter().map(|f| f.h_r.clone()).collect(),
        }
    }

    /// `S_m = sum_{k=1}^{m} aL1[k] aR2d[k-1]`.
    pub fn nonlocal_sum(&self, m: usize) -> CMat {
        let d = self.n_dim();
        (1..=m).fold(zeros(d, d), |acc, k| acc + &self.a_l1[k] * &self.a_r2d[k - 1])
    }

    /// Max relative residual of both H-ratio identities over `n = 1..=n_max`.
    pub fn h_ratio_residual(&self) -> Result<f64> {
        let d = self.n_dim();
        let mut worst: f64 = 0.0;
        for n in 1..=self.n_max {
            let r = &self.h_r[n] * inv(&self.h_r[n - 1], "H^R")?;
            let l = &self.h_l[n] * inv(&self.h_l[n - 1], "H^L")?;
            let er = eye(d) - &self.a_r2d[n] * &self.a_l1[n];
            let el = eye(d) - &self.a_l1[n] * &self.a_r2d[n];
            worst = worst.max(fro(&(r - &er)) / (1.0 + fro(&er)));
            worst = worst.max(fro(&(l - &el)) / (1.0 + fro(&el)));
        }
        Ok(worst)
    }
}

/// All families for `n = 0..=n_max`.
pub fn solve_families(table: &MomentTable, n_max: usize) -> Result<Vec<SzegoFamily>> {
    (0..=n_max).map(|n| solve_family(table, n)).collect()
}

pub fn verblunsky_lattice(table: &MomentTable, n_max: usize) -> Result<VerblunskyLattice> {
    Ok(VerblunskyLattice::from_families(&solve_families(table, n_max)?))
}

/// `sum_{a,b} A_a mu(b - a) B_b^dagger`, the pairing of `sum A_a z^a` against `sum B_b z^b`.
fn pairing(table: &MomentTable, left: &MatrixPolynomial, right: &MatrixPolynomial) -> Result<CMat> {
    let d = table.n_dim;
    let mut acc = zeros(d, d);
    for (a, la) in left.coeffs.iter().enumerate() {
        for (b, rb) in right.coeffs.iter().enumerate() {
            acc += la * table.get(b as i64 - a as i64)? * dag(rb);
        }
    }
    Ok(acc)
}

/// Pairing `sum_{a,b} B_b^dagger mu(b - a) A_a` for the right families.
fn pairing_right(table: &MomentTable, left_dag: &MatrixPolynomial, right: &MatrixPolynomial) -> Result<CMat> {
    let d = table.n_dim;
    let mut acc = zeros(d, d);
    for (b, lb) in left_dag.coeffs.iter().enumerate() {
        for (a, ra) in right.coeffs.iter().enumerate() {
            acc += dag(lb) * table.get(b as i64 - a as i64)? * ra;
        }
    }
    Ok(acc)
}

/// Max over `n, m <= families.len()-1` of the biorthogonality defects, relative to `1 + ‖H‖`.
pub fn check_biorthogonality(families: &[SzegoFamily], table: &MomentTable) -> Result<f64> {
    let d = table.n_dim;
    let mut worst: f64 = 0.0;
    for fn_ in families {
        for fm in families {
            let expect_l = if fn_.n == fm.n { fn_.h_l.clone() } else { zeros(d, d) };
            let expect_r = if fn_.n == fm.n { fn_.h_r.clone() } else { zeros(d, d) };
            let l = pairing(table, &fn_.p_l1, &fm.p_l2)?;
            let r = pairing_right(table, &fm.p_r2, &fn_.p_r1)?;
            worst = worst.max(fro(&(l - &expect_l)) / (1.0 + fro(&fn_.h_l)));
            worst = worst.max(fro(&(r - &expect_r)) / (1.0 + fro(&fn_.h_r)));
        }
    }
    Ok(worst)
}

/// Residuals of the two polynomial recursions at degree `n` (`n >= 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionResidual {
    pub n: usize,
    /// `P^L_{1,n+1} - z P^L_{1,n} - aL1[n+1] tR2_n`.
    pub forward: f64,
    /// `tR2_n - aR2d[n] P^L_{1,n} - (I - aR2d[n] aL1[n]) tR2_{n-1}`.
    pub reciprocal: f64,
}

/// Polynomial recursion residuals for `n = 1..families.len()-1`, relative to `1 + ‖data‖`.
pub fn check_recursions(lattice: &VerblunskyLattice, families: &[SzegoFamily]) -> Vec<RecursionResidual> {
    let d = lattice.n_dim();
    let mut out = Vec::new();
    for n in 1..families.len().saturating_sub(1) {
        let fwd = families[n + 1]
            .p_l1
            .sub(&families[n].p_l1.shift())
            .sub(&families[n].t_r2.left_mul(&lattice.a_l1[n + 1]));
        let rec = families[n]
            .t_r2
            .sub(&families[n].p_l1.left_mul(&lattice.a_r2d[n]))
            .sub(&families[n - 1].t_r2.left_mul(&(eye(d) - &lattice.a_r2d[n] * &lattice.a_l1[n])));
        out.push(RecursionResidual {
            n,
            forward: fwd.norm() / (1.0 + families[n + 1].p_l1.norm()),
            reciprocal: rec.norm() / (1.0 + families[n].t_r2.norm()),
        });
    }
    out
}

/// Writes `P^L_{1,n}` and `tR2_{n-1}` coefficient blocks side by side; used by RHP assembly.
pub fn coefficient_matrix(p: &MatrixPolynomial) -> CMat {
    let d = p.n_dim();
    let mut m = zeros(d, d * p.coeffs.len());
    for (k, ck) in p.coeffs.iter().enumerate() {
        set_block(&mut m, 0, k, ck);
    }
    m
}

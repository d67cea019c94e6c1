//! JSON and CSV interchange: weight documents, moment tables, lattices, residual reports, trajectories.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested arrays. Floats are written
//! with 17 significant digits in lowercase e-notation so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{fuchsian_weight_n2, FuchsianParams};
use crate::linalg::{c, CMat, C64};
use crate::moments::MomentTable;
use crate::painleve::TrajectoryRecord;
use crate::szego::{MatrixPolynomial, SzegoFamily, VerblunskyLattice};
use crate::weights::{LaurentPoly, PearsonSpec, WeightSpec};

pub const SCHEMA: u32 = 1;

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

pub fn complex_doc(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn complex_from(z: Complex) -> C64 {
    c(z[0], z[1])
}

pub fn matrix_doc(m: &CMat) -> Matrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_doc(m[(i, j)])).collect())
        .collect()
}

/// Square `n x n` matrix from its document.
pub fn matrix_from(doc: &Matrix, n: usize) -> Result<CMat> {
    if doc.len() != n || doc.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("expected a {n}x{n} matrix")));
    }
    Ok(CMat::from_fn(n, n, |i, j| complex_from(doc[i][j])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub k: i32,
    pub coeff: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentDoc {
    pub lo: i32,
    pub coeffs: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightBody {
    Fourier {
        blocks: Vec<Term>,
    },
    Freud {
        factors: Vec<LaurentDoc>,
    },
    Pearson {
        coeffs: Vec<Term>,
        base_point: Complex,
        base_value: Matrix,
    },
    #[serde(rename = "fuchsian_n2")]
    FuchsianN2 {
        p: i64,
        k: u8,
        /// `a0, b0, c0, d0, a1, b1, c1, d1`.
        params: [Complex; 8],
        #[serde(default)]
        order: Option<usize>,
        radius: f64,
    },
}

/// Versioned weight document. `pearson` attaches Pearson coefficients to Fourier or Freud weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDoc {
    pub schema: u32,
    pub n_dim: usize,
    #[serde(flatten)]
    pub body: WeightBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pearson: Option<Vec<Term>>,
}

fn terms_doc(map: &BTreeMap<i32, CMat>) -> Vec<Term> {
    map.iter()
        .map(|(k, m)| Term {
            k: *k,
            coeff: matrix_doc(m),
        })
        .collect()
}

fn terms_from(terms: &[Term], n: usize) -> Result<BTreeMap<i32, CMat>> {
    let mut out = BTreeMap::new();
    for t in terms {
        if out.insert(t.k, matrix_from(&t.coeff, n)?).is_some() {
            return Err(Error::Parse(format!("exponent {} listed twice", t.k)));
        }
    }
    Ok(out)
}

impl WeightDoc {
    pub fn from_spec(spec: &WeightSpec) -> Self {
        let n_dim = spec.n_dim();
        let body = match spec {
            WeightSpec::Fourier { blocks, .. } => WeightBody::Fourier {
                blocks: blocks
                    .iter()
                    .map(|(j, m)| Term {
                        k: *j as i32,
                        coeff: matrix_doc(m),
                    })
                    .collect(),
            },
            WeightSpec::Freud { factors, .. } => WeightBody::Freud {
                factors: factors
                    .iter()
                    .map(|f| LaurentDoc {
                        lo: f.lo,
                        coeffs: f.coeffs.iter().map(matrix_doc).collect(),
                    })
                    .collect(),
            },
            WeightSpec::Pearson(p) => WeightBody::Pearson {
                coeffs: terms_doc(&p.coeffs),
                base_point: complex_doc(p.base_point),
                base_value: matrix_doc(&p.base_value),
            },
            WeightSpec::Fuchsian(f) => WeightBody::FuchsianN2 {
                p: f.p,
                k: f.k,
                params: f.params.to_array().map(complex_doc),
                order: Some(f.order()),
                radius: f.radius,
            },
        };
        WeightDoc {
            schema: SCHEMA,
            n_dim,
            body,
            pearson: None,
        }
    }

    pub fn with_pearson(mut self, coeffs: &BTreeMap<i32, CMat>) -> Self {
        self.pearson = Some(terms_doc(coeffs));
        self
    }

    pub fn to_spec(&self) -> Result<WeightSpec> {
        if self.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported schema {} (expected {SCHEMA})", self.schema)));
        }
        let n = self.n_dim;
        if n == 0 {
            return Err(Error::Parse("n_dim must be positive".into()));
        }
        let spec = match &self.body {
            WeightBody::Fourier { blocks } => WeightSpec::Fourier {
                n_dim: n,
                blocks: terms_from(blocks, n)?.into_iter().map(|(k, m)| (k as i64, m)).collect(),
            },
            WeightBody::Freud { factors } => WeightSpec::Freud {
                n_dim: n,
                factors: factors
                    .iter()
                    .map(|f| {
                        let coeffs = f.coeffs.iter().map(|m| matrix_from(m, n)).collect::<Result<Vec<_>>>()?;
                        Ok(LaurentPoly::new(f.lo, coeffs))
                    })
                    .collect::<Result<Vec<_>>>()?,
            },
            WeightBody::Pearson {
                coeffs,
                base_point,
                base_value,
            } => WeightSpec::Pearson(PearsonSpec::new(
                terms_from(coeffs, n)?,
                complex_from(*base_point),
                matrix_from(base_value, n)?,
            )?),
            WeightBody::FuchsianN2 {
                p,
                k,
                params,
                order,
                radius,
            } => {
                if n != 2 {
                    return Err(Error::Parse("fuchsian_n2 weights have n_dim 2".into()));
                }
                let q = FuchsianParams::from_array(params.map(complex_from));
                WeightSpec::Fuchsian(fuchsian_weight_n2(*p, *k, &q, *order, *radius)?)
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Pearson data for the weight: intrinsic for `pearson` and `fuchsian_n2`, else the attached terms.
    pub fn pearson_spec(&self, spec: &WeightSpec) -> Result<Option<PearsonSpec>> {
        match spec {
            WeightSpec::Pearson(p) => Ok(Some(p.clone())),
            WeightSpec::Fuchsian(f) => f.pearson().map(Some),
            _ => match &self.pearson {
                None => Ok(None),
                Some(terms) => {
                    let one = c(1.0, 0.0);
                    PearsonSpec::new(terms_from(terms, self.n_dim)?, one, spec.eval(one)?).map(Some)
                }
            },
        }
    }
}

pub fn parse_weight(text: &str) -> Result<WeightDoc> {
    Ok(serde_json::from_str(text)?)
}

/// `serde_json` formatter writing every float as `{:.16e}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedFloat;

impl serde_json::ser::Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// 17 significant digits, lowercase exponent; non-finite values become JSON-incompatible words
/// and are only produced in CSV.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Writes `value` as JSON with fixed float formatting. Non-finite floats are written as `null`.
pub fn write_json<T: Serialize, W: Write>(value: &T, writer: W) -> Result<()> {
    let v = serde_json::to_value(value)?;
    let mut ser = serde_json::Serializer::with_formatter(writer, FixedFloat);
    v.serialize(&mut ser)?;
    Ok(())
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json(value, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub j: i64,
    pub block: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentDoc {
    pub schema: u32,
    pub n_dim: usize,
    pub j_max: usize,
    pub quadrature_size: usize,
    pub est_error: f64,
    pub moments: Vec<MomentEntry>,
}

impl MomentDoc {
    pub fn from_table(t: &MomentTable) -> Self {
        let jm = t.j_max as i64;
        MomentDoc {
            schema: SCHEMA,
            n_dim: t.n_dim,
            j_max: t.j_max,
            quadrature_size: t.quadrature_size,
            est_error: t.est_error,
            moments: (-jm..=jm)
                .map(|j| MomentEntry {
                    j,
                    block: matrix_doc(t.mu(j)),
                })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<MomentTable> {
        let mut entries: Vec<&MomentEntry> = self.moments.iter().collect();
        entries.sort_by_key(|e| e.j);
        let jm = self.j_max as i64;
        if entries.len() != 2 * self.j_max + 1 || entries.iter().zip(-jm..=jm).any(|(e, j)| e.j != j) {
            return Err(Error::Parse(format!("moments must cover j = -{jm}..={jm} once each")));
        }
        let blocks = entries
            .iter()
            .map(|e| matrix_from(&e.block, self.n_dim))
            .collect::<Result<Vec<_>>>()?;
        let mut t = MomentTable::from_blocks(blocks)?;
        t.quadrature_size = self.quadrature_size;
        t.est_error = self.est_error;
        Ok(t)
    }
}

fn matrix_rows<W: Write>(out: &mut csv::Writer<W>, lead: &[String], m: &CMat) -> Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let mut rec = lead.to_vec();
            rec.extend([
                i.to_string(),
                j.to_string(),
                format_float(m[(i, j)].re),
                format_float(m[(i, j)].im),
            ]);
            out.write_record(&rec)?;
        }
    }
    Ok(())
}

/// One row per `(j, row, col, re, im)`.
pub fn write_moments_csv<W: Write>(t: &MomentTable, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["j", "row", "col", "re", "im"])?;
    let jm = t.j_max as i64;
    for j in -jm..=jm {
        matrix_rows(&mut out, &[j.to_string()], t.mu(j))?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub schema: u32,
    pub n_dim: usize,
    pub n_max: usize,
    pub a_l1: Vec<Matrix>,
    pub a_r2d: Vec<Matrix>,
    pub h_l: Vec<Matrix>,
    pub h_r: Vec<Matrix>,
}

impl LatticeDoc {
    pub fn from_lattice(lat: &VerblunskyLattice) -> Self {
        let conv = |v: &[CMat]| v.iter().map(matrix_doc).collect();
        LatticeDoc {
            schema: SCHEMA,
            n_dim: lat.n_dim(),
            n_max: lat.n_max,
            a_l1: conv(&lat.a_l1),
            a_r2d: conv(&lat.a_r2d),
            h_l: conv(&lat.h_l),
            h_r: conv(&lat.h_r),
        }
    }

    pub fn to_lattice(&self) -> Result<VerblunskyLattice> {
        let conv = |v: &[Matrix]| -> Result<Vec<CMat>> {
            if v.len() != self.n_max + 1 {
                return Err(Error::Parse(format!("lattice arrays need n_max + 1 = {} entries", self.n_max + 1)));
            }
            v.iter().map(|m| matrix_from(m, self.n_dim)).collect()
        };
        Ok(VerblunskyLattice {
            n_max: self.n_max,
            a_l1: conv(&self.a_l1)?,
            a_r2d: conv(&self.a_r2d)?,
            h_l: conv(&self.h_l)?,
            h_r: conv(&self.h_r)?,
        })
    }
}

/// The four Szegő polynomials, the reciprocals used by the Riemann-Hilbert frames, and the degree-n data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub n: usize,
    pub p_l1: Vec<Matrix>,
    pub p_r1: Vec<Matrix>,
    pub p_l2: Vec<Matrix>,
    pub p_r2: Vec<Matrix>,
    pub t_l2: Vec<Matrix>,
    pub t_r2: Vec<Matrix>,
    pub alpha_l1: Matrix,
    pub alpha_r1: Matrix,
    pub alpha_l2: Matrix,
    pub alpha_r2: Matrix,
    pub h_l: Matrix,
    pub h_r: Matrix,
}

fn poly_doc(p: &MatrixPolynomial) -> Vec<Matrix> {
    p.coeffs.iter().map(matrix_doc).collect()
}

impl FamilyDoc {
    pub fn from_family(f: &SzegoFamily) -> Self {
        FamilyDoc {
            n: f.n,
            p_l1: poly_doc(&f.p_l1),
            p_r1: poly_doc(&f.p_r1),
            p_l2: poly_doc(&f.p_l2),
            p_r2: poly_doc(&f.p_r2),
            t_l2: poly_doc(&f.t_l2),
            t_r2: poly_doc(&f.t_r2),
            alpha_l1: matrix_doc(&f.alpha_l1),
            alpha_r1: matrix_doc(&f.alpha_r1),
            alpha_l2: matrix_doc(&f.alpha_l2),
            alpha_r2: matrix_doc(&f.alpha_r2),
            h_l: matrix_doc(&f.h_l),
            h_r: matrix_doc(&f.h_r),
        }
    }
}

/// One row per `(n, which, row, col, re, im)` with `which` in `aL1, aR2d, hL, hR`.
pub fn write_lattice_csv<W: Write>(lat: &VerblunskyLattice, writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["n", "which", "row", "col", "re", "im"])?;
    for n in 0..=lat.n_max {
        for (which, m) in [
            ("aL1", &lat.a_l1[n]),
            ("aR2d", &lat.a_r2d[n]),
            ("hL", &lat.h_l[n]),
            ("hR", &lat.h_r[n]),
        ] {
            matrix_rows(&mut out, &[n.to_string(), which.to_string()], m)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One line of a residual report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub check: String,
    pub n: Option<usize>,
    pub z: Option<Complex>,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Set when the check could not be evaluated; the residual is then infinite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ResidualRecord {
    pub fn new(check: &str, n: Option<usize>, z: Option<C64>, residual: f64, threshold: f64) -> Self {
        ResidualRecord {
            check: check.to_string(),
            n,
            z: z.map(complex_doc),
            residual,
            threshold,
            pass: residual <= threshold,
            error: None,
        }
    }

    pub fn failed(check: &str, n: Option<usize>, z: Option<C64>, threshold: f64, error: &Error) -> Self {
        ResidualRecord {
            error: Some(error.to_string()),
            ..Self::new(check, n, z, f64::INFINITY, threshold)
        }
    }
}

pub fn write_report_csv<W: Write>(report: &[ResidualRecord], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["check", "n", "z_re", "z_im", "residual", "threshold", "pass"])?;
    for r in report {
        let (zr, zi) = match r.z {
            Some([a, b]) => (format_float(a), format_float(b)),
            None => (String::new(), String::new()),
        };
        out.write_record([
            r.check.clone(),
            r.n.map_or(String::new(), |n| n.to_string()),
            zr,
            zi,
            format_float(r.residual),
            format_float(r.threshold),
            r.pass.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDoc {
    pub n: usize,
    pub a_l1: Matrix,
    pub a_r2d: Matrix,
    pub s: Matrix,
    /// Residual norms of both equations at this site; absent for the last site.
    pub residual: Option<[f64; 2]>,
    /// Reciprocal condition numbers of the outer coefficient, the cofactor and the last inverted factor.
    pub rcond: Option<[f64; 3]>,
}

impl TrajectoryDoc {
    pub fn from_record(r: &TrajectoryRecord) -> Self {
        TrajectoryDoc {
            n: r.n,
            a_l1: matrix_doc(&r.a_l1),
            a_r2d: matrix_doc(&r.a_r2d),
            s: matrix_doc(&r.s),
            residual: (r.residual.0.is_finite() && r.residual.1.is_finite()).then_some([r.residual.0, r.residual.1]),
            rcond: r.conditioning.map(|k| [k.outer, k.cofactor, k.last]),
        }
    }
}

/// One row per `(n, which, row, col, re, im)` with `which` in `aL1, aR2d, S`.
pub fn write_trajectory_csv<W: Write>(records: &[TrajectoryRecord], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["n", "which", "row", "col", "re", "im"])?;
    for r in records {
        for (which, m) in [("aL1", &r.a_l1), ("aR2d", &r.a_r2d), ("S", &r.s)] {
            matrix_rows(&mut out, &[r.n.to_string(), which.to_string()], m)?;
        }
    }
    out.flush()?;
    Ok(())
}

#![allow(dead_code)]

use std::collections::BTreeMap;

use mopuc::fuchsian::{fuchsian_weight_n2, FuchsianParams};
use mopuc::linalg::{c, eye, real, scalar, zeros, CMat};
use mopuc::moments::{compute_moments, MomentTable};
use mopuc::weights::{LaurentPoly, PearsonSpec, WeightSpec};

pub fn bessel(k: f64) -> WeightSpec {
    let kk = scalar(1, c(k, 0.0));
    WeightSpec::Freud {
        n_dim: 1,
        factors: vec![LaurentPoly::new(-1, vec![kk.clone(), zeros(1, 1), kk])],
    }
}

pub fn bessel_pearson(k: f64) -> BTreeMap<i32, CMat> {
    BTreeMap::from([(-2, scalar(1, c(-k, 0.0))), (0, scalar(1, c(k, 0.0)))])
}

pub fn heisenberg() -> WeightSpec {
    let wm2 = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let w0 = real(&[&[0.0, 0.0], &[1.0, 0.0]]);
    WeightSpec::Freud {
        n_dim: 2,
        factors: vec![LaurentPoly::new(-1, vec![-wm2, zeros(2, 2), w0])],
    }
}

/// True right log-derivative of the 2x2 "Heisenberg" weight.
pub fn heisenberg_pearson() -> BTreeMap<i32, CMat> {
    let (s, co) = (1f64.sin(), 1f64.cos());
    BTreeMap::from([
        (-2, real(&[&[0.0, s * co], &[0.0, 0.0]])),
        (-1, real(&[&[-s * s, 0.0], &[0.0, s * s]])),
        (0, real(&[&[0.0, 0.0], &[s * co, 0.0]])),
    ])
}

pub fn fuchsian_params() -> FuchsianParams {
    FuchsianParams::from_real([0.3, 0.2, 0.0, -0.4, 0.1, 0.05, 0.1, 0.2])
}

pub fn fuchsian_p(p: i64) -> WeightSpec {
    WeightSpec::Fuchsian(fuchsian_weight_n2(p, 1, &fuchsian_params(), None, 2.0).unwrap())
}

/// Shifted by `z^-3` so the weight has negative Fourier modes.
pub fn fuchsian() -> WeightSpec {
    fuchsian_p(-3)
}

pub fn fuchsian_pearson_p(p: i64) -> BTreeMap<i32, CMat> {
    let q = fuchsian_params();
    let (wm1, a0, a1) = mopuc::fuchsian::pearson_coefficients(p, 1, &q);
    BTreeMap::from([(-1, wm1), (0, a0), (1, a1)])
}

pub fn fuchsian_pearson() -> BTreeMap<i32, CMat> {
    fuchsian_pearson_p(-3)
}

/// `z^-3 e^z`, normalised to `e` at `z = 1`.
pub fn z3ez() -> WeightSpec {
    WeightSpec::Pearson(
        PearsonSpec::new(z3ez_pearson(), c(1.0, 0.0), scalar(1, c(1f64.exp(), 0.0))).unwrap(),
    )
}

pub fn z3ez_pearson() -> BTreeMap<i32, CMat> {
    BTreeMap::from([(-1, scalar(1, c(-3.0, 0.0))), (0, scalar(1, c(1.0, 0.0)))])
}

pub fn commuting_k() -> CMat {
    real(&[&[1.0, 0.3], &[0.3, 1.0]])
}

pub fn commuting() -> WeightSpec {
    let k = commuting_k();
    WeightSpec::Freud {
        n_dim: 2,
        factors: vec![LaurentPoly::new(-1, vec![k.clone(), zeros(2, 2), k])],
    }
}

pub fn commuting_pearson() -> BTreeMap<i32, CMat> {
    let k = commuting_k();
    BTreeMap::from([(-2, -k.clone()), (0, k)])
}

pub fn moments(w: &WeightSpec, j: usize) -> MomentTable {
    compute_moments(w, j, 256).unwrap()
}

pub fn identity(n: usize) -> CMat {
    eye(n)
}

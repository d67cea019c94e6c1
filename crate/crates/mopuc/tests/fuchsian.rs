use std::f64::consts::PI;

use mopuc::fuchsian::{fuchsian_weight_n2, phi_series, reduce, theta, FuchsianParams};
use mopuc::linalg::{c, eye, fro, CMat, C64};
use mopuc::ode::OdeOptions;
use mopuc::weights::{monodromy_defect, WeightSpec};
use mopuc::Error;

fn m2(a: f64, b: f64, cc: f64, d: f64) -> CMat {
    CMat::from_row_slice(2, 2, &[c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)])
}

fn k1_params() -> FuchsianParams {
    // a0, b0, c0, d0, a1, b1, c1, d1
    FuchsianParams::from_real([0.3, 0.2, 0.0, -0.4, 0.1, 0.05, 0.1, 0.2])
}

fn k2_params() -> FuchsianParams {
    let (a0, d0, c0) = (0.3, -0.4, 0.25);
    FuchsianParams::from_real([a0, 0.2, c0, d0, 0.1, 0.05, -c0 * (a0 - d0), 0.2])
}

fn k3_params(c0: f64) -> FuchsianParams {
    let (a0, b0, d0, a1, d1) = (0.3, 0.2, -0.4, 0.1, 0.2);
    let e = a0 - d0;
    let c1 = -(0.5 * c0 * ((a1 - d1) + e * e) - 0.25 * b0 * c0 * c0) / e;
    FuchsianParams::from_real([a0, b0, c0, d0, a1, 0.05, c1, d1])
}

fn ode_residual(w: &WeightSpec, wfun: &dyn Fn(C64) -> CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for &r in &[0.9, 1.1] {
        for m in 0..8 {
            let z = c(0.0, 2.0 * PI * (m as f64 + 0.25) / 8.0).exp() * r;
            let h = 1e-6 * z.norm();
            let dw = (w.eval(z + h).unwrap() - w.eval(z - h).unwrap()) / c(2.0 * h, 0.0);
            let rhs = wfun(z) * w.eval(z).unwrap();
            worst = worst.max(fro(&(&dw - rhs)) / fro(&dw));
        }
    }
    worst
}

#[test]
fn k1_windows_match_sheared_coefficients() {
    let q = k1_params();
    let red = reduce(0, 1, &q).unwrap();
    assert_eq!(red.windows.len(), 3);
    assert!(fro(&(&red.windows[0] - m2(0.3, 0.0, 0.1, -0.4))) < 1e-15);
    assert!(fro(&(&red.windows[1] - m2(0.1, 0.2, 0.0, 0.2))) < 1e-15);
    assert!(fro(&(&red.windows[2] - m2(0.0, 0.05, 0.0, 0.0))) < 1e-15);
}

#[test]
fn k1_second_and_third_coefficients() {
    let q = k1_params();
    let red = reduce(0, 1, &q).unwrap();
    let (w0, w1, w2) = (&red.windows[0], &red.windows[1], &red.windows[2]);
    let phi = phi_series(&red.windows, 3).unwrap();
    let phi2 = (w0 * w0 + w1) * c(0.5, 0.0);
    let phi3 = (w0 * w0 * w0 + w0 * w1 + w1 * w0 * c(2.0, 0.0) + w2 * c(2.0, 0.0)) / c(6.0, 0.0);
    assert!(fro(&(&phi[1] - phi2)) < 1e-15);
    assert!(fro(&(&phi[2] - phi3)) < 1e-15);
}

#[test]
fn k2_windows_match_closed_forms() {
    let q = k2_params();
    let (a0, b0, c0, d0, a1, b1, d1) = (0.3, 0.2, 0.25, -0.4, 0.1, 0.05, 0.2);
    let red = reduce(0, 2, &q).unwrap();
    assert_eq!(red.windows.len(), 4);
    let expect = [
        m2(a0, 0.0, c0 * (a1 - d1) - b0 * c0 * c0, d0),
        m2(a1 - b0 * c0, 0.0, -b1 * c0 * c0, b0 * c0 + d1),
        m2(-b1 * c0, b0, 0.0, b1 * c0),
        m2(0.0, b1, 0.0, 0.0),
    ];
    for (got, want) in red.windows.iter().zip(expect.iter()) {
        assert!(fro(&(got - want)) < 1e-15);
    }
    assert!(red.theta.norm() < 1e-15);
    assert!(theta(2, &q).unwrap().norm() < 1e-15);
}

#[test]
fn k2_prefactor_shape() {
    let q = k2_params();
    let red = reduce(3, 2, &q).unwrap();
    // [[z^p, 0], [-c0 z^{p+1}, z^{p+2}]]
    assert_eq!(red.prefactor.lo, 3);
    let z = c(0.4, 0.9);
    let g = red.prefactor.eval(z);
    assert!((g[(0, 0)] - z.powi(3)).norm() < 1e-14);
    assert!((g[(1, 0)] + z.powi(4) * 0.25).norm() < 1e-14);
    assert!((g[(1, 1)] - z.powi(5)).norm() < 1e-14);
    assert!(g[(0, 1)].norm() < 1e-15);
}

#[test]
fn k3_closed_theta_matches_chain() {
    for &c0 in &[0.0, 0.2, -0.35] {
        let mut q = k3_params(c0);
        q.c1 += c(0.01, 0.0);
        let red = reduce(1, 3, &q).unwrap();
        let closed = theta(3, &q).unwrap();
        assert!((red.theta - closed).norm() < 1e-14, "c0 = {c0}");
    }
}

#[test]
fn constructed_weights_solve_pearson_equation() {
    let cases: Vec<(i64, u8, FuchsianParams)> = vec![
        (0, 1, k1_params()),
        (2, 1, k1_params()),
        (0, 2, k2_params()),
        (-1, 2, k2_params()),
        (0, 3, k3_params(0.2)),
        (1, 3, k3_params(-0.3)),
    ];
    for (p, k, q) in cases {
        let f = fuchsian_weight_n2(p, k, &q, None, 2.0).unwrap();
        let pear = f.pearson().unwrap();
        let w = WeightSpec::Fuchsian(f);
        let res = ode_residual(&w, &|z| pear.log_derivative(z));
        assert!(res < 1e-6, "p = {p}, k = {k}: residual {res:e}");
    }
}

#[test]
fn constructed_weights_are_single_valued() {
    for (p, k, q) in [(0, 1, k1_params()), (0, 2, k2_params()), (0, 3, k3_params(0.2))] {
        let f = fuchsian_weight_n2(p, k, &q, None, 2.0).unwrap();
        let d = monodromy_defect(&f.pearson().unwrap()).unwrap();
        assert!(d < 1e-8, "k = {k}: defect {d:e}");
    }
}

#[test]
fn printed_cubic_surface_is_multivalued_when_c0_nonzero() {
    // c1 chosen to cancel c0((a1-d1)+(a0-d0)^2) - b0 c0^2 + c1(a0-d0) instead.
    let (a0, b0, c0, d0, a1, b1, d1) = (0.3, 0.2, 0.2, -0.4, 0.1, 0.05, 0.2);
    let e: f64 = a0 - d0;
    let c1 = -(c0 * ((a1 - d1) + e * e) - b0 * c0 * c0) / e;
    let q = FuchsianParams::from_real([a0, b0, c0, d0, a1, b1, c1, d1]);
    let residual = theta(3, &q).unwrap().norm();
    assert!(residual > 1e-3);
    assert!(matches!(
        fuchsian_weight_n2(0, 3, &q, None, 2.0),
        Err(Error::Constraint { .. })
    ));
    // The Pearson ODE itself picks up a logarithmic monodromy on this surface.
    let (wm1, am0, am1) = mopuc::fuchsian::pearson_coefficients(0, 3, &q);
    let mut coeffs = std::collections::BTreeMap::new();
    coeffs.insert(-1, wm1);
    coeffs.insert(0, am0);
    coeffs.insert(1, am1);
    let spec = mopuc::weights::PearsonSpec::new(coeffs, c(1.0, 0.0), eye(2)).unwrap();
    let d = monodromy_defect(&spec).unwrap();
    assert!(d > 1e-3, "defect {d:e}");
}

#[test]
fn series_matches_ode_on_unit_circle() {
    let f = fuchsian_weight_n2(0, 1, &k1_params(), None, 1.0).unwrap();
    let pear = f.pearson().unwrap();
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-300 };
    for m in 0..16 {
        let z = c(0.0, 2.0 * PI * m as f64 / 16.0).exp();
        let a = f.eval(z).unwrap();
        let b = pear.eval(z, opts).unwrap();
        assert!(fro(&(&a - &b)) / fro(&a) < 1e-8, "node {m}");
    }
}

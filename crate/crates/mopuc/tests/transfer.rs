mod common;

use std::collections::BTreeMap;

use common::*;
use mopuc::cauchy_rhp::{circle_samples, Method, RhpContext};
use mopuc::linalg::{block2, c, eye, fro, zeros, CMat};
use mopuc::moments::MomentTable;
use mopuc::szego::{solve_families, SzegoFamily, VerblunskyLattice};
use mopuc::transfer::*;
use mopuc::weights::{classify, PearsonSpec, SingularityClass, SingularityKind, WeightSpec};

struct Case {
    name: &'static str,
    spec: WeightSpec,
    pearson: PearsonSpec,
    table: MomentTable,
    fam: Vec<SzegoFamily>,
}

fn case(name: &'static str, spec: WeightSpec, coeffs: BTreeMap<i32, CMat>, n_max: usize) -> Case {
    let table = moments(&spec, 64);
    let fam = solve_families(&table, n_max).unwrap();
    let d = spec.n_dim();
    let pearson = PearsonSpec::new(coeffs, c(1.0, 0.0), eye(d)).unwrap();
    Case { name, spec, pearson, table, fam }
}

fn cases(n_max: usize) -> Vec<Case> {
    vec![
        case("bessel", bessel(1.0), bessel_pearson(1.0), n_max),
        case("heisenberg", heisenberg(), heisenberg_pearson(), n_max),
        case("fuchsian", fuchsian(), fuchsian_pearson(), n_max),
        case("z3ez", z3ez(), z3ez_pearson(), n_max),
        case("commuting", commuting(), commuting_pearson(), n_max),
    ]
}

fn lebesgue_lattice(d: usize, n_max: usize) -> VerblunskyLattice {
    VerblunskyLattice {
        n_max,
        a_l1: (0..=n_max).map(|n| if n == 0 { eye(d) } else { zeros(d, d) }).collect(),
        a_r2d: (0..=n_max).map(|n| if n == 0 { eye(d) } else { zeros(d, d) }).collect(),
        h_l: vec![eye(d); n_max + 1],
        h_r: vec![eye(d); n_max + 1],
    }
}

#[test]
fn lebesgue_transfer_and_leading() {
    let lat = lebesgue_lattice(2, 4);
    for n in 1..4 {
        let t = transfer_matrix(&lat, n).unwrap();
        let want = block2(&zeros(2, 2), &zeros(2, 2), &zeros(2, 2), &eye(2));
        assert_eq!(t.rm1, want);
        assert_eq!(t.r0, block2(&eye(2), &zeros(2, 2), &zeros(2, 2), &zeros(2, 2)));
        let class = SingularityClass {
            kind: SingularityKind::Ordinary,
            n_dim: 2,
            lead: zeros(2, 2),
        };
        let m0 = pearson_leading(&lat, n, &class).unwrap().m0;
        let want = block2(&zeros(2, 2), &zeros(2, 2), &zeros(2, 2), &(eye(2) * c(-(n as f64), 0.0)));
        assert!(fro(&(m0 - want)) < 1e-15);
    }
}

#[test]
fn bessel_first_transfer_matrix() {
    let cs = case("bessel", bessel(1.0), bessel_pearson(1.0), 2);
    let lat = VerblunskyLattice::from_families(&cs.fam);
    let t = transfer_matrix(&lat, 0).unwrap();
    // alpha_1 = -I_1(2)/I_0(2), h_0 = I_0(2)
    let (i0, a1) = (2.279585302336067, -0.697774657964008);
    let want = [a1, -a1 * i0, -1.0 / i0, 1.0];
    for (k, w) in want.iter().enumerate() {
        assert!((t.rm1[(k / 2, k % 2)] - c(*w, 0.0)).norm() < 1e-10, "entry {k}");
    }
}

#[test]
fn dyadic_structure() {
    for cs in cases(7) {
        let lat = VerblunskyLattice::from_families(&cs.fam);
        for n in 0..7 {
            let r = dyadic_residual(&lat, n).unwrap();
            assert!(r < 1e-10, "{} n={n}: {r:e}", cs.name);
        }
    }
}

#[test]
fn transfer_recursion() {
    let pts = [c(0.5, 0.0), c(0.0, 2.0), c(-0.3, 0.4), c(1.2, -1.1)];
    for cs in cases(6) {
        let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
        for n in 0..=4 {
            let r = check_transfer(&ctx, n, &pts, Method::Series).unwrap();
            assert!(r.y < 1e-7 && r.x < 1e-7, "{} n={n}: {r:?}", cs.name);
        }
        let p = product_form_residual(&ctx, 3, &pts, Method::Series).unwrap();
        assert!(p < 1e-6, "{}: {p:e}", cs.name);
    }
}

#[test]
fn transfer_has_no_jump() {
    for cs in cases(5) {
        let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
        for n in 0..4 {
            let r = transfer_jump(&ctx, n, &circle_samples(8)).unwrap();
            assert!(r < 1e-6, "{} n={n}: {r:e}", cs.name);
        }
    }
}

#[test]
fn leading_coefficient_matches_fourier_extraction() {
    for cs in cases(6) {
        let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
        let class = classify(&cs.pearson).unwrap();
        for n in 0..=4 {
            let want = pearson_leading(&ctx.lattice, n, &class).unwrap();
            let got = extract_leading(&ctx, n, want.order, LogDerivative::Pearson(&cs.pearson)).unwrap();
            let r = fro(&(&got - &want.m0)) / (1.0 + fro(&want.m0));
            assert!(r < 1e-5, "{} n={n}: {r:e}", cs.name);
        }
    }
}

#[test]
fn degree_zero_pearson_matrix() {
    for cs in cases(2) {
        let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
        let d = ctx.n_dim();
        for z in [c(0.4, 0.3), c(-1.5, 0.8)] {
            let m = m_numeric(&ctx, 0, z, LogDerivative::Pearson(&cs.pearson)).unwrap();
            let w = cs.pearson.log_derivative(z);
            let ul = m.view((0, 0), (d, d)).into_owned();
            let lower = m.view((d, 0), (d, 2 * d)).into_owned();
            assert!(fro(&(ul - &w)) < 1e-6 * (1.0 + fro(&w)), "{}", cs.name);
            assert!(fro(&lower) < 1e-6, "{}", cs.name);
        }
    }
}

#[test]
fn leading_compatibility() {
    for cs in cases(6) {
        let lat = VerblunskyLattice::from_families(&cs.fam);
        let class = classify(&cs.pearson).unwrap();
        for n in 0..=4 {
            let r = compatibility_residual(&lat, &class, n).unwrap();
            assert!(r < 1e-7, "{} n={n}: {r:e}", cs.name);
        }
    }
}

#[test]
fn perturbed_lattice_breaks_compatibility() {
    let cs = case("heisenberg", heisenberg(), heisenberg_pearson(), 5);
    let class = classify(&cs.pearson).unwrap();
    let mut lat = VerblunskyLattice::from_families(&cs.fam);
    let base = compatibility_residual(&lat, &class, 2).unwrap();
    lat.h_r[2] += eye(2) * c(1e-3, 0.0);
    let hit = compatibility_residual(&lat, &class, 2).unwrap();
    assert!(hit > 1e-5 && hit < 1e-1, "{base:e} {hit:e}");
}

#[test]
fn differential_compatibility_at_samples() {
    for cs in cases(5) {
        let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
        for n in 0..3 {
            for z in [c(0.4, 0.3), c(-1.5, 0.8)] {
                let r = differential_compatibility(&ctx, n, z, LogDerivative::Pearson(&cs.pearson)).unwrap();
                assert!(r < 1e-6, "{} n={n} z={z}: {r:e}", cs.name);
            }
        }
    }
}

#[test]
fn pearson_matrix_is_analytic_across_circle() {
    for cs in cases(4) {
        let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
        let class = classify(&cs.pearson).unwrap();
        let lo = -(class.order() as i32);
        let hi = cs.pearson.max_exponent().max(0);
        for n in 0..3 {
            let r = m_analyticity(&ctx, n, &circle_samples(8), lo, hi, LogDerivative::Pearson(&cs.pearson)).unwrap();
            assert!(r < 1e-6, "{} n={n}: {r:e}", cs.name);
        }
    }
}

#[test]
fn differential_relations_hold() {
    for cs in cases(5) {
        let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
        for n in 0..4 {
            for z in [c(0.4, 0.3), c(-1.5, 0.8)] {
                let (p, q) = differential_relations(&ctx, n, z, &cs.pearson).unwrap();
                assert!(p < 1e-6 && q < 1e-6, "{} n={n} z={z}: {p:e} {q:e}", cs.name);
            }
        }
    }
}

#[test]
fn numeric_weight_derivative_route_agrees() {
    let cs = case("heisenberg", heisenberg(), heisenberg_pearson(), 3);
    let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
    for z in [c(0.4, 0.3), c(-1.5, 0.8)] {
        let a = m_numeric(&ctx, 2, z, LogDerivative::Pearson(&cs.pearson)).unwrap();
        let b = m_numeric(&ctx, 2, z, LogDerivative::Numeric).unwrap();
        let y = m_numeric_y(&ctx, 2, z, &cs.pearson).unwrap();
        assert!(fro(&(&a - &b)) < 1e-6 * (1.0 + fro(&a)));
        assert!(fro(&(&a - &y)) < 1e-6 * (1.0 + fro(&a)));
    }
}

#[test]
fn fuchsian_behaviour_at_infinity() {
    let cs = case("fuchsian", fuchsian(), fuchsian_pearson(), 5);
    let ctx = RhpContext::new(&cs.spec, &cs.table, &cs.fam);
    let w1 = cs.pearson.coeff(1);
    let want = block2(&w1, &zeros(2, 2), &zeros(2, 2), &zeros(2, 2));
    for n in 0..4 {
        let got = m_coefficient_at_infinity(&ctx, n, 4.0, &cs.pearson).unwrap();
        assert!(fro(&(&got - &want)) < 1e-5, "n={n}: {:e}", fro(&(&got - &want)));
    }
}


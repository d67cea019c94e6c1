mod common;

use common::*;
use mopuc::io::*;
use mopuc::linalg::{c, fro};
use mopuc::szego::verblunsky_lattice;
use mopuc::weights::WeightSpec;
use proptest::prelude::*;

fn roundtrip(spec: &WeightSpec) -> WeightSpec {
    let text = to_json_string(&WeightDoc::from_spec(spec)).unwrap();
    parse_weight(&text).unwrap().to_spec().unwrap()
}

#[test]
fn weight_documents_round_trip() {
    for spec in [bessel(1.0), heisenberg(), commuting(), z3ez(), fuchsian()] {
        let back = roundtrip(&spec);
        for z in [c(0.6, 0.8), c(-1.0, 0.0)] {
            let (a, b) = (spec.eval(z).unwrap(), back.eval(z).unwrap());
            assert!(fro(&(&a - &b)) <= 1e-15 * fro(&a), "{a} {b}");
        }
    }
    let fourier = WeightSpec::Fourier {
        n_dim: 1,
        blocks: [(-1, identity(1) * c(0.2, 0.1)), (0, identity(1)), (2, identity(1) * c(0.0, 0.3))].into(),
    };
    assert_eq!(roundtrip(&fourier), fourier);
}

#[test]
fn weight_document_shape() {
    let text = to_json_string(&WeightDoc::from_spec(&bessel(1.0)).with_pearson(&bessel_pearson(1.0))).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["kind"], "freud");
    assert_eq!(v["n_dim"], 1);
    assert_eq!(v["pearson"][0]["k"], -2);
    let doc = parse_weight(&text).unwrap();
    let spec = doc.to_spec().unwrap();
    let p = doc.pearson_spec(&spec).unwrap().unwrap();
    assert_eq!(p.coeff(0)[(0, 0)], c(1.0, 0.0));
}

#[test]
fn bad_documents_are_rejected() {
    let mut doc = WeightDoc::from_spec(&bessel(1.0));
    doc.schema = 7;
    assert!(matches!(doc.to_spec(), Err(mopuc::Error::Parse(_))));
    assert!(parse_weight(r#"{"schema":1,"n_dim":1,"kind":"spline"}"#).is_err());
    let wrong_shape = r#"{"schema":1,"n_dim":2,"kind":"fourier","blocks":[{"k":0,"coeff":[[[1,0]]]}]}"#;
    assert!(parse_weight(wrong_shape).unwrap().to_spec().is_err());
}

#[test]
fn float_format_is_fixed() {
    assert_eq!(format_float(1.0), "1.0000000000000000e0");
    assert_eq!(format_float(-2.5e-12), "-2.4999999999999998e-12");
    assert_eq!(format_float(f64::NAN), "nan");
    let s = to_json_string(&vec![0.1f64, 3.0]).unwrap();
    assert_eq!(s, "[1.0000000000000001e-1,3.0000000000000000e0]");
}

#[test]
fn moment_table_round_trips() {
    let t = moments(&heisenberg(), 6);
    let text = to_json_string(&MomentDoc::from_table(&t)).unwrap();
    let back: MomentDoc = serde_json::from_str(&text).unwrap();
    let t2 = back.to_table().unwrap();
    assert_eq!(t2.j_max, 6);
    for j in -6..=6 {
        assert_eq!(t.mu(j), t2.mu(j));
    }
    let mut buf = Vec::new();
    write_moments_csv(&t, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 13 * 4);
}

#[test]
fn lattice_round_trips() {
    let lat = verblunsky_lattice(&moments(&commuting(), 16), 4).unwrap();
    let text = to_json_string(&LatticeDoc::from_lattice(&lat)).unwrap();
    let back: LatticeDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(back.to_lattice().unwrap(), lat);
    let mut buf = Vec::new();
    write_lattice_csv(&lat, &mut buf).unwrap();
    let csv = String::from_utf8(buf).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5 * 4 * 4);
    assert!(csv.lines().nth(5).unwrap().starts_with("0,aR2d,0,0,"));
}

#[test]
fn residual_records() {
    let ok = ResidualRecord::new("det", Some(2), Some(c(0.5, 0.0)), 1e-12, 1e-8);
    assert!(ok.pass);
    let bad = ResidualRecord::failed("jump_y", None, None, 1e-5, &mopuc::Error::Pole("x".into()));
    assert!(!bad.pass && bad.residual.is_infinite());
    let mut buf = Vec::new();
    write_report_csv(&[ok, bad], &mut buf).unwrap();
    let csv = String::from_utf8(buf).unwrap();
    assert!(csv.contains("det,2,5.0000000000000000e-1,0.0000000000000000e0,"));
    assert!(csv.contains("jump_y,,,,inf,"));
}

proptest! {
    #[test]
    fn floats_survive_text(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let s = format_float(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
        let j = to_json_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<f64>(&j).unwrap(), v);
    }
}

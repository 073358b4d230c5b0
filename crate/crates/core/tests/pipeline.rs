use num_complex::Complex64;
use petallab::dynamics::{iterate, IterateOptions, ProductExponents};
use petallab::germ::{classify_form, normalize, Form};
use petallab::io::{parse_germ_json, write_orbit_csv, ORBIT_HEADER};
use petallab::resolution::{resolve, Model};
use petallab::sector::DomainKind;

const NONCORNER: &str = r#"[
  {"component": "x", "monomials": [[1, 0, 1.0, 0.0], [2, 0, -1.0, 0.0]], "coefficient_mode": "float"},
  {"component": "y", "monomials": [[0, 1, 1.0, 0.0], [1, 1, -1.0, 0.0], [3, 0, 1.0, 0.0]], "coefficient_mode": "float"}
]"#;

#[test]
fn noncorner_germ_from_json() {
    let f = parse_germ_json(NONCORNER).unwrap().float_germ().unwrap();
    let sig = classify_form(&f).unwrap();
    assert_eq!(sig.form, Form::Noncorner);
    assert_eq!(sig.M, 1);
    assert!((sig.a + 1.0).norm() < 1e-15 && (sig.b + 1.0).norm() < 1e-15);
    assert!(sig.satisfies_attracting_condition);
    let n = normalize(&f, &sig).unwrap();
    assert!(n.change.is_identity());
}

#[test]
fn orbit_csv_has_one_row_per_point() {
    let f = parse_germ_json(
        r#"[{"component": "x", "monomials": [[1, 0, 1, 0], [2, 1, -0.5, 0]]},
            {"component": "y", "monomials": [[0, 1, 1, 0], [1, 2, -0.5, 0]]}]"#,
    )
    .unwrap()
    .float_germ()
    .unwrap();
    let sig = classify_form(&f).unwrap();
    let petal = normalize(&f, &sig).unwrap().petal.unwrap();
    let mut opts = IterateOptions::new(25, ProductExponents::of(&petal));
    opts.domain = Some(petallab::sector::DomainSpec {
        petal,
        epsilon: 1e-2,
        theta: std::f64::consts::PI / 6.0,
        delta: 0.1,
        delta_prime: 0.1,
        r: 0.5,
        kind: DomainKind::U,
    });
    let trace = iterate(&f, (Complex64::new(0.05, 0.0), Complex64::new(0.04, 0.0)), &opts);
    let mut buf = Vec::new();
    write_orbit_csv(&mut buf, &trace).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(ORBIT_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), trace.points.len());
    assert!(rows[0].starts_with("0,5.0"));
    assert!(rows.iter().all(|r| r.split(',').count() == 9));
}

#[test]
fn exact_field_resolves_and_exports() {
    let input = parse_germ_json(
        r#"{"kind": "field", "components": [
            {"component": "x", "monomials": [[0, 1, "1", "1", "0", "1"]], "coefficient_mode": "exact"},
            {"component": "y", "monomials": [[2, 0, "1", "1", "0", "1"]], "coefficient_mode": "exact"}]}"#,
    )
    .unwrap();
    let tree = resolve(&input.exact_field().unwrap(), 4).unwrap();
    let json = tree.to_json();
    let nodes = json["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), tree.nodes.len());
    assert!(nodes.iter().all(|n| n["map"]["x"].is_array()));
    let dot = tree.to_dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), tree.nodes.len() - 1);
}

#[test]
fn shear_germ_has_no_nondegenerate_points() {
    let input = parse_germ_json(
        r#"[{"component": "x", "monomials": [[1, 0, "1", "1", "0", "1"]], "coefficient_mode": "exact"},
            {"component": "y", "monomials": [[0, 1, "1", "1", "0", "1"], [2, 0, "1", "1", "0", "1"]], "coefficient_mode": "exact"}]"#,
    )
    .unwrap();
    let c = petallab::resolution::classify_biholo_points(&input.exact_germ().unwrap(), 6, 4).unwrap();
    assert!(!c.points.is_empty());
    assert!(c.points.iter().all(|p| p.tag.model != Model::II));
}

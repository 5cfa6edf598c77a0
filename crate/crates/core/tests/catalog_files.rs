use std::io::Write;

use rsb_core::catalog::{self, load_custom, Params};
use rsb_core::products::verify_product_theorem;
use rsb_core::rootsys::from_family_spec;
use rsb_core::{Cell, Classification, Error, Rational, SolverOptions};

fn write(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".rs").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn loads_a1_file() {
    let f = write("ambient_dim 2\nrank 1\nsimple 1 -1\nroot 1 -1 mult 1\n");
    let rs = load_custom(f.path()).unwrap();
    assert_eq!(rs.rank(), 1);
    assert_eq!(rs.total_multiplicity(), 1);
}

#[test]
fn custom_g2_matches_builtin() {
    let text = "\
# G2 in the sum-zero plane of R^3
ambient_dim 3
rank 2
simple 1 -1 0
simple -2 1 1
root 1 -1 0 mult 1
root -2 1 1 mult 1
root -1 0 1 mult 1
root 0 -1 1 mult 1
root 1 -2 1 mult 1
root -1 -1 2 mult 1
";
    let f = write(text);
    let custom = load_custom(f.path()).unwrap();
    let builtin = catalog::lookup("G2/SO(4)", &Params::new()).unwrap();
    assert_eq!(custom.rank(), builtin.rank());
    assert_eq!(custom.total_multiplicity(), builtin.total_multiplicity());
}

#[test]
fn invalid_files_are_rejected() {
    let f = write("ambient_dim 2\nrank 1\nsimple 1 -1\nroot 1 -1 mult 1\nroot 2 -2 mult 1\n");
    // e and 2e are distinct roots on one ray: allowed
    assert!(load_custom(f.path()).is_ok());
    let f = write("ambient_dim 2\nrank 1\nsimple 1 -1\nroot 1 -1 mult 1\nroot 1 -1 mult 1\n");
    let err = load_custom(f.path()).unwrap_err();
    assert!(matches!(err, Error::Validation(_)));
    assert!(err.to_string().contains("duplicate"), "{err}");
    let f = write("ambient_dim 2\nrank 1\nsimple 1 -1\nroot 1 -1 mult 0\n");
    assert!(matches!(
        load_custom(f.path()),
        Err(Error::Parse { line: 4, .. })
    ));
    assert!(matches!(
        load_custom("/nonexistent/x.rs"),
        Err(Error::Io(_))
    ));
}

#[test]
fn product_a2_with_a1_m4() {
    let a2 = from_family_spec("A2", &[1]).unwrap();
    let a1 = from_family_spec("A1", &[4]).unwrap();
    let rep = verify_product_theorem(
        &a2,
        &Cell::full(2),
        &a1,
        &Cell::full(1),
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(rep.pass);
    assert_eq!((rep.angles.n1, rep.angles.n2), (3, 4));
    assert_eq!(rep.angles.proper_cos2, Some(Rational::new(1, 2)));
    let proper = rep
        .candidates
        .iter()
        .find(|c| c.cos2 == Rational::new(1, 2))
        .unwrap();
    assert_eq!(
        proper.report.classification,
        Classification::ProperBiharmonic
    );
    assert!(proper.report.bitension_norm < 1e-10);
    for r in proper.factor_radii {
        assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
    }
    let minimal = rep
        .candidates
        .iter()
        .find(|c| c.cos2 == Rational::new(3, 7))
        .unwrap();
    assert_eq!(minimal.report.classification, Classification::Minimal);
}

#[test]
fn product_swap_maps_angles() {
    let a = from_family_spec("A1", &[2]).unwrap();
    let b = from_family_spec("B2", &[1, 1]).unwrap();
    let opts = SolverOptions::default();
    let ab = verify_product_theorem(&a, &Cell::full(1), &b, &Cell::full(2), &opts).unwrap();
    let ba = verify_product_theorem(&b, &Cell::full(2), &a, &Cell::full(1), &opts).unwrap();
    assert!(ab.pass && ba.pass);
    let one = Rational::from_integer(1);
    assert_eq!(ab.angles.minimal_cos2, one - ba.angles.minimal_cos2);
    assert_eq!(ab.verdict(), ba.verdict());
}

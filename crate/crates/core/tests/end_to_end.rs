use std::f64::consts::PI;

use hodge_spectra::assembly::build_problem;
use hodge_spectra::eigen::{classify_eigenforms, solve, SolveOptions};
use hodge_spectra::mesh::{read_mesh, refine, write_mesh};
use hodge_spectra::verify::{check_decomposition, closed_form_spectrum, decomposition_references, OracleKind, Status};
use hodge_spectra::{generate, BcKind, CanonicalDomain, DeRham, FormTag, OrderedSpectrum, SimplicialComplex, Spectrum};

fn run(complex: &SimplicialComplex, bc: BcKind, p: usize, count: usize) -> Spectrum {
    let problem = build_problem::<f64>(complex, bc, p).unwrap();
    let mut result = solve(&problem, &SolveOptions::with_count(count)).unwrap();
    classify_eigenforms(&mut result, &problem, &DeRham::new(complex).unwrap()).unwrap();
    result
}

#[test]
fn mesh_file_roundtrip_preserves_the_spectrum() {
    let m = generate(CanonicalDomain::Disk { radius: 1.0 }, 10).unwrap();
    let back = read_mesh(&write_mesh(&m)).unwrap();
    assert_eq!(back.counts(), m.counts());
    let a = run(&m, BcKind::ScalarDirichlet, 0, 3).values_f64();
    let b = run(&back, BcKind::ScalarDirichlet, 0, 3).values_f64();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-12 * x, "{x} vs {y}");
    }
}

#[test]
fn refinement_reduces_the_error() {
    let coarse = generate(CanonicalDomain::UnitSquare, 6).unwrap();
    let fine = refine(&coarse).unwrap();
    assert_eq!(fine.count(2), 4 * coarse.count(2));
    let exact = 2.0 * PI * PI;
    let e0 = run(&coarse, BcKind::ScalarDirichlet, 0, 1).values_f64()[0] - exact;
    let e1 = run(&fine, BcKind::ScalarDirichlet, 0, 1).values_f64()[0] - exact;
    assert!(e0 > 0.0 && e1 > 0.0, "conforming elements overestimate");
    let ratio = e0 / e1;
    assert!((3.0..5.0).contains(&ratio), "{ratio}");
}

#[test]
fn square_one_forms_split_into_the_two_scalar_families() {
    let m = generate(CanonicalDomain::UnitSquare, 20).unwrap();
    let full = run(&m, BcKind::Absolute, 1, 10);
    assert_eq!(full.harmonic_count, 0);
    assert!(!full.tags.contains(&FormTag::Unresolved));
    let refs = decomposition_references(&CanonicalDomain::UnitSquare, 1, 10);
    let rep = check_decomposition(&full, 10, 0.03, &refs).unwrap();
    assert_eq!(rep.status, Status::Pass, "{rep:#?}");
}

#[test]
fn cube_curl_curl_approaches_the_cavity_values() {
    let m = generate(CanonicalDomain::UnitCube, 4).unwrap();
    let problem = build_problem::<f64>(&m, BcKind::CurlcurlRelative, 1).unwrap();
    let result = solve(&problem, &SolveOptions::with_count(3)).unwrap();
    let oracle = closed_form_spectrum(&CanonicalDomain::UnitCube, OracleKind::MaxwellCavity, 3).unwrap();
    let computed = OrderedSpectrum::of_result(&result);
    for (c, o) in computed.values.iter().zip(&oracle.values) {
        assert!((c / o - 1.0).abs() < 0.1, "{c} vs {o}");
    }
}

#[test]
fn single_precision_pencils_track_double() {
    let m = generate(CanonicalDomain::UnitSquare, 8).unwrap();
    let p32 = build_problem::<f32>(&m, BcKind::ScalarDirichlet, 0).unwrap();
    let opts = SolveOptions { tol: 1e-4, ..SolveOptions::with_count(4) };
    let r32 = solve(&p32, &opts).unwrap().values_f64();
    let r64 = run(&m, BcKind::ScalarDirichlet, 0, 4).values_f64();
    for (a, b) in r32.iter().zip(&r64) {
        assert!((a - b).abs() <= 1e-4 * b, "{a} vs {b}");
    }
}

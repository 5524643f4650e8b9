mod common;

use circulant_canon::graph::cayley;
use circulant_canon::oracle::OracleConfig;
use circulant_canon::sampling::is_firm;
use circulant_canon::spectral::{
    dft_cross_check, distinct_eigenvalue_count, has_simple_spectrum, spectrum,
};
use circulant_canon::wl2::is_firm_digraph;
use common::{all_sets, random_set, rng};

#[test]
fn symmetric_sets_have_mirrored_spectra() {
    let mut r = rng(1);
    for n in 1..=40 {
        for _ in 0..5 {
            let s = random_set(n, false, &mut r);
            let sp = spectrum(&s);
            for a in 1..n {
                assert_eq!(sp.eigenvalues[a], sp.eigenvalues[n - a], "{s} a={a}");
            }
        }
    }
}

#[test]
fn negation_preserves_distinct_count() {
    let mut r = rng(2);
    for n in 1..=24 {
        for _ in 0..20 {
            let s = random_set(n, true, &mut r);
            assert_eq!(
                distinct_eigenvalue_count(&s),
                distinct_eigenvalue_count(&s.negated()),
                "{s}"
            );
        }
    }
}

#[test]
fn index_zero_is_the_degree() {
    let mut r = rng(3);
    for n in 1..=60 {
        let s = random_set(n, true, &mut r);
        assert_eq!(
            spectrum(&s).eigenvalues[0].as_integer(),
            Some((s.len() as i64).into())
        );
    }
}

#[test]
fn exact_spectra_match_the_dft() {
    let mut r = rng(4);
    for n in [1, 2, 17, 30, 64, 97, 128] {
        for directed in [true, false] {
            assert!(dft_cross_check(&random_set(n, directed, &mut r), 1e-8));
        }
    }
}

#[test]
fn simple_spectrum_implies_firm() {
    let cfg = OracleConfig::default();
    for n in 1..=12 {
        for s in all_sets(n, true) {
            if has_simple_spectrum(&s) {
                assert!(is_firm(&s, &cfg).unwrap(), "{s}");
                assert!(is_firm_digraph(&cayley(&s), &cfg).unwrap(), "{s}");
            }
        }
    }
}

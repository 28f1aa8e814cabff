//! Library results checked against the reference computations in `common`.

mod common;

use catidem::group::{group_algebra, trivial_module, GroupSpec};
use catidem::hom::graded_hom;
use catidem::idempotent::{minimal_resolution, resolution_pair, tate_cohomology_ring, unit_complex};
use common::oracle::*;

#[test]
fn bar_cohomology_of_c2_and_c3() {
    assert_eq!(Bar { p: 2, n: 2 }.ext_dims(6), vec![1; 7]);
    assert_eq!(Bar { p: 3, n: 3 }.ext_dims(8), vec![1; 9]);
    assert_eq!(Bar { p: 3, n: 2 }.ext_dims(4), vec![1, 0, 0, 0, 0]);
}

#[test]
fn resolution_of_c2_matches_bar_homology() {
    let alg = group_algebra(2, GroupSpec::Cyclic(2)).unwrap();
    let r = minimal_resolution(&alg, &trivial_module(&alg), 12).unwrap();
    let x = &r.complex;
    for k in -12..=0 {
        assert_eq!(x.dim(k), 2, "P_{k}");
    }
    let bar = Bar { p: 2, n: 2 }.homology_dims(6);
    assert_eq!(coinvariant_dims(x, -6), bar);
}

#[test]
fn resolution_of_c3_matches_bar_homology() {
    let alg = group_algebra(3, GroupSpec::Cyclic(3)).unwrap();
    let r = minimal_resolution(&alg, &trivial_module(&alg), 10).unwrap();
    assert_eq!(r.period, Some(2));
    let bar = Bar { p: 3, n: 3 }.homology_dims(8);
    assert_eq!(coinvariant_dims(&r.complex, -8), bar);
}

#[test]
fn ext_dims_match_hom_into_unit() {
    for (p, n, top) in [(2u32, 2u32, 6i64), (3, 3, 8)] {
        let alg = group_algebra(p, GroupSpec::Cyclic(n)).unwrap();
        let t = resolution_pair(&alg, 10).unwrap();
        let gh = graded_hom(&t.c, &unit_complex(&alg), 0, top, 4).unwrap();
        let lib: Vec<usize> = (0..=top).map(|k| gh.dim(k).unwrap()).collect();
        assert_eq!(lib, Bar { p: p as u64, n: n as usize }.ext_dims(top as usize));
    }
}

#[test]
fn cup_products_match_composition_in_end_p() {
    let c2 = cup_pattern(&Bar { p: 2, n: 2 }, 4);
    assert!(c2.iter().all(|x| x.2), "x^m x^n = x^(m+n) over F_2");
    assert_eq!(ring_pattern(2, 2, 4), c2);
    let c3 = cup_pattern(&Bar { p: 3, n: 3 }, 4);
    assert!(!c3.iter().find(|x| x.0 == 1 && x.1 == 1).unwrap().2, "degree-one class squares to zero");
    assert_eq!(ring_pattern(3, 3, 4), c3);
}

#[test]
fn tate_dims_match_complete_resolution() {
    for (p, n, r) in [(2u32, 2u32, 8i64), (3, 3, 6)] {
        let alg = group_algebra(p, GroupSpec::Cyclic(n)).unwrap();
        let pair = resolution_pair(&alg, 10).unwrap();
        let tr = tate_cohomology_ring(&pair, -r, r, 4).unwrap();
        let lib: Vec<usize> = tr.dims.iter().map(|d| d.unit_to_t.unwrap()).collect();
        assert_eq!(lib, complete_resolution_dims(p as u64, n as u64, -r, r));
        assert!(tr.dims.iter().all(|d| d.agree()));
    }
}

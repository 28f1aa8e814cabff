//! Each randomized suite from `common::props` as its own test.

mod common;

use common::props;

#[test]
fn every_operation_squares_to_zero() {
    props::every_operation_squares_to_zero().unwrap();
}

#[test]
fn kunneth_dimensions() {
    props::kunneth_dimensions().unwrap();
}

#[test]
fn koszul_exchange_sign() {
    props::koszul_exchange_sign().unwrap();
}

#[test]
fn dual_of_cone_is_shifted_cone_of_dual() {
    props::dual_of_cone_is_shifted_cone_of_dual().unwrap();
}

#[test]
fn cone_of_tensor_dimensions() {
    props::cone_of_tensor_dimensions().unwrap();
}

#[test]
fn found_homotopies_reverify() {
    props::found_homotopies_reverify().unwrap();
}

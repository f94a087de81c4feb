mod common;

use common::negative::{case, outcome, CASES};
use icatt_core::ErrorKind;

fn expect(name: &str) {
    let (kind, decl) = case(name);
    let e = outcome(decl).expect_err(decl);
    assert_eq!(e.kind, kind, "{decl}\n  got: {e}");
}

#[test]
fn unused_variable_is_not_full() {
    let (_, decl) = case("unused variable");
    let e = outcome(decl).unwrap_err();
    assert_eq!(e.kind, ErrorKind::NotFull);
    assert!(
        e.message.contains("variable z") || e.message.contains("variable g"),
        "{e}"
    );
}

#[test]
fn every_case_is_distinct_from_the_corpus() {
    assert!(CASES.len() >= 10);
    for (_, _, decl) in CASES {
        assert!(!common::CORPUS.contains(decl));
    }
}

#[test]
fn disconnected_context_is_not_ps() {
    expect("disconnected context");
}

#[test]
fn parallel_arrows_are_not_ps() {
    expect("parallel arrows");
}

#[test]
fn one_sided_coherence_is_not_full() {
    expect("one-sided coherence");
}

#[test]
fn short_invertibility_structure() {
    expect("six components");
}

#[test]
fn missing_witness() {
    expect("missing witness");
}

#[test]
fn inductive_hypothesis_outside_rec() {
    expect("IH outside rec");
}

#[test]
fn unknown_identifier() {
    expect("unknown identifier");
}

#[test]
fn redeclared_name() {
    expect("redeclared name");
}

#[test]
fn binder_named_after_declaration() {
    expect("binder named after a declaration");
}

#[test]
fn rec_over_a_non_equivalence() {
    expect("rec without equivalence");
}

#[test]
fn repeated_binder() {
    expect("repeated binder");
}

#[test]
fn destructor_of_a_cell() {
    expect("destructor of a cell");
}

#[test]
fn object_argument_for_arrow_parameter() {
    expect("object for arrow parameter");
}

#[test]
fn non_composable_arguments() {
    expect("non-composable arguments");
}

#[test]
fn wrong_declared_type() {
    expect("wrong declared type");
}

#[test]
fn truncated_declaration() {
    expect("truncated declaration");
}

#[test]
fn swapped_witnesses() {
    expect("swapped witnesses");
}

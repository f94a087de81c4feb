use std::collections::HashSet;

use icatt_core::equiv_analysis::{
    check_gamma, enumerate_neutrals, equiv_truncation, equiv_truncations, DEFAULT_BOUND,
};
use icatt_core::frontend::check_source;
use icatt_core::kernel::{infer, Decl};
use icatt_core::meta::walking_equiv;
use icatt_core::syntax::{Destructor, Term};
use icatt_core::ErrorKind;

/// Every well-typed term over `E^1` obtained by stacking at most
/// `depth` destructors on a variable, with its dimension.
fn destructor_closure(depth: usize) -> Vec<(Term, i64, bool)> {
    let e1 = walking_equiv(1);
    let mut all = Vec::new();
    let mut frontier: Vec<Term> = (0..e1.len()).map(Term::Var).collect();
    for round in 0..=depth {
        let mut next = Vec::new();
        for t in frontier {
            let Ok(ty) = infer(&e1, &t) else { continue };
            all.push((t.clone(), ty.dim() + 1, ty.is_categorical()));
            if round < depth {
                next.extend(Destructor::ALL.iter().map(|&d| Term::destr(d, t.clone())));
            }
        }
        frontier = next;
    }
    all
}

#[test]
fn neutrals_match_brute_force() {
    let closure = destructor_closure(7);
    for n in 0..=5usize {
        let brute: HashSet<Term> = closure
            .iter()
            .filter(|(_, d, cat)| *cat && *d == n as i64)
            .map(|(t, _, _)| t.clone())
            .collect();
        let listed = enumerate_neutrals(n);
        let got: HashSet<Term> = listed.iter().cloned().collect();
        assert_eq!(got.len(), listed.len(), "duplicates at {n}");
        assert_eq!(got, brute, "neutrals of dimension {n}");
    }
}

#[test]
fn neutral_counts() {
    let counts: Vec<usize> = (0..=7).map(|n| enumerate_neutrals(n).len()).collect();
    assert_eq!(counts, vec![2, 3, 6, 12, 24, 48, 96, 192]);
}

#[test]
fn second_truncation_matches_listing() {
    let listing = "(x : *) (y : *) (u : x -> y) (v : y -> x) (w : y -> x) \
        (u_v : comp v u -> id y) (v_v : id y -> comp v u) (w_v : id y -> comp v u) \
        (u_w : comp u w -> id x) (v_w : id x -> comp u w) (w_w : id x -> comp u w)";
    let report = check_source(&format!("let t {listing} : x -> y = u\n"), false);
    assert!(report.ok());
    let Some(Decl::Let { ctx, .. }) = report.elaborator.env.get("t") else {
        panic!("missing let")
    };
    let trunc = equiv_truncation(2).unwrap();
    assert_eq!(trunc.ctx.len(), ctx.len());
    for x in 0..ctx.len() {
        assert_eq!(trunc.ctx.ty(x), ctx.ty(x), "entry {x}");
    }
    assert_eq!(trunc.ctx.names(), ctx.names());
}

#[test]
fn truncation_sizes_double() {
    let sizes: Vec<usize> = equiv_truncations(DEFAULT_BOUND, DEFAULT_BOUND)
        .unwrap()
        .iter()
        .map(|t| t.ctx.len())
        .collect();
    assert_eq!(sizes, vec![2, 5, 11, 23, 47, 95]);
    assert_eq!(
        equiv_truncation(DEFAULT_BOUND + 1).unwrap_err().kind,
        ErrorKind::Bound
    );
}

#[test]
fn gamma_is_compatible_up_to_three() {
    let report = check_gamma(3).unwrap();
    assert_eq!(report.levels.len(), 4);
    for level in &report.levels {
        assert!(level.ok(), "{report}");
        assert!(level.counterexamples.is_empty());
    }
}

//! Corpus declarations mutated to break one typing rule each, with the
//! category of error they must produce.

use icatt_core::frontend::check_source;
use icatt_core::{Error, ErrorKind};

use super::CORPUS;

pub const CASES: &[(&str, ErrorKind, &str)] = &[
    ("disconnected context", ErrorKind::NotPs, "coh bad (x : *) (y : *) : x -> y"),
    ("parallel arrows", ErrorKind::NotPs, "coh bad (x : *) (y : *) (f : x -> y) (g : x -> y) : f -> g"),
    ("unused variable", ErrorKind::NotFull, "coh bad (x(f)y(g)z) : f -> f"),
    ("one-sided coherence", ErrorKind::NotFull, "coh bad (x(f(a)g)y) : f -> f"),
    (
        "six components",
        ErrorKind::CoindArity,
        "inv bad (x : *) (y : *) (f : x -> y) (e : Inv(f)) = { f , linv(e) , rinv(e) , lunit(e) , runit(e) , ilunit(e) }",
    ),
    (
        "missing witness",
        ErrorKind::CanWitness,
        "let bad (x : *) (y : *) (z : *) (f : x -> y) (g : y -> z) (e : Inv(f)) : Inv(comp f g) = can (comp f g { e })",
    ),
    ("IH outside rec", ErrorKind::IhOutsideRec, "let bad (x : *) (y : *) (f : x -> y) (e : Inv(f)) : x -> y = IHleft"),
    ("unknown identifier", ErrorKind::UnknownIdentifier, "let bad (x : *) : x -> x = idd x"),
    ("redeclared name", ErrorKind::Shadowing, "coh assoc (x(f)y) : f -> f"),
    ("binder named after a declaration", ErrorKind::Shadowing, "let bad (lri : *) : lri -> lri = id lri"),
    ("rec without equivalence", ErrorKind::RecContext, "rec bad (x : *) (y : *) (f : x -> y) = { f , f , f , f , f , f , f }"),
    ("repeated binder", ErrorKind::DuplicateVariable, "coh bad (x : *) (x : *) : x -> x"),
    ("destructor of a cell", ErrorKind::NotInvertible, "let bad (x : *) (y : *) (f : x -> y) : y -> x = linv (f)"),
    ("object for arrow parameter", ErrorKind::DimensionMismatch, "let bad (x : *) (y : *) (f : x -> y) : x -> y = unitl x"),
    ("non-composable arguments", ErrorKind::Unification, "let bad (x : *) (y : *) (f : x -> y) (g : x -> y) : x -> y = comp f g"),
    ("wrong declared type", ErrorKind::Unification, "let bad (x : *) (y : *) (f : x -> y) : y -> x = f"),
    ("truncated declaration", ErrorKind::Parse, "coh bad (x : *) :"),
    (
        "swapped witnesses",
        ErrorKind::Unification,
        "let bad (x : *) (y : *) (z : *) (f : x -> y) (g : y -> z) (e : Inv(f)) (e' : Inv(g)) : Inv(comp f g) = can (comp f g { e' , e })",
    ),
];

/// The corpus up to its first use of a recursive definition.
pub fn prelude() -> &'static str {
    let end = CORPUS.find("let lriU ").expect("corpus layout");
    &CORPUS[..end]
}

/// Checks `decl` after the prelude; `Ok` when it was accepted.
pub fn outcome(decl: &str) -> Result<(), Error> {
    let text = format!("{}\n{decl}\n", prelude());
    let report = check_source(&text, false);
    if let Some(e) = report.parse_error {
        return Err(e);
    }
    let (last, rest) = report.decls.split_last().expect("a declaration");
    assert!(rest.iter().all(|d| d.result.is_ok()), "prelude failed");
    last.result.clone().map(|_| ())
}

pub fn case(name: &str) -> (ErrorKind, &'static str) {
    let (_, k, d) = CASES
        .iter()
        .find(|c| c.0 == name)
        .unwrap_or_else(|| panic!("no case {name}"));
    (*k, d)
}

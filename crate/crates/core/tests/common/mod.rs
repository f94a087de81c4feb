#![allow(dead_code)]

pub mod gen;
pub mod negative;

use std::collections::HashSet;

use icatt_core::elaborate::Elaborator;
use icatt_core::frontend::check_source;
use icatt_core::kernel::{check_rec, infer, Decl};
use icatt_core::meta::{equiv_ind_context, walking_equiv};
use icatt_core::syntax::{Context, Sub, Term, Type};

pub const CORPUS: &str = include_str!("../../../../proofs/invertibility.catt");

/// A checked term of the corpus with the context it lives in.
#[derive(Clone, Debug)]
pub struct Judgment {
    pub origin: String,
    pub ctx: Context,
    pub term: Term,
    pub ty: Type,
}

pub fn corpus() -> Elaborator {
    let report = check_source(CORPUS, false);
    assert!(
        report.ok(),
        "corpus failed: {:?}",
        report
            .failures()
            .next()
            .map(|d| d.result.as_ref().unwrap_err().to_string())
    );
    report.elaborator
}

/// The body of every declaration: coherences applied generically, `let`
/// and `inv` bodies, and each component of a `rec` in its own context.
pub fn top_judgments(el: &Elaborator) -> Vec<Judgment> {
    let mut out = Vec::new();
    for (name, d) in el.env.iter() {
        match d {
            Decl::Coh(h) => out.push(Judgment {
                origin: name.to_string(),
                ctx: h.ctx.clone(),
                term: h.generic(),
                ty: h.ty.clone(),
            }),
            Decl::Let { ctx, term, ty } => out.push(Judgment {
                origin: name.to_string(),
                ctx: ctx.clone(),
                term: term.clone(),
                ty: ty.clone(),
            }),
            Decl::Rec { ctx, schema } => {
                let seed = check_rec(schema).unwrap();
                let ind = equiv_ind_context(schema.n, &schema.comps[0], &seed).unwrap();
                for (k, c) in schema.comps.iter().enumerate() {
                    let cx = if k >= 5 { &ind } else { ctx };
                    out.push(Judgment {
                        origin: format!("{name}, component {}", k + 1),
                        ctx: cx.clone(),
                        term: c.clone(),
                        ty: infer(cx, c).unwrap(),
                    });
                }
                let e = walking_equiv(schema.n);
                let generic = Term::Rec(schema.clone(), Sub::identity(e.len()));
                out.push(Judgment {
                    origin: name.to_string(),
                    ty: infer(&e, &generic).unwrap(),
                    ctx: e,
                    term: generic,
                });
            }
        }
    }
    out
}

/// Every distinct subterm of the top-level judgments, typed.
pub fn all_judgments(el: &Elaborator) -> Vec<Judgment> {
    let mut out = Vec::new();
    for j in top_judgments(el) {
        let mut seen = HashSet::new();
        let mut subs = Vec::new();
        j.term.visit(&mut |t| {
            if seen.insert(t.clone()) {
                subs.push(t.clone());
            }
        });
        for t in subs {
            let ty = infer(&j.ctx, &t)
                .unwrap_or_else(|e| panic!("{}: subterm fails to check: {e}", j.origin));
            out.push(Judgment {
                origin: j.origin.clone(),
                ctx: j.ctx.clone(),
                term: t,
                ty,
            });
        }
    }
    out
}

/// Every `can` occurrence in the corpus, in context.
pub fn can_judgments(el: &Elaborator) -> Vec<Judgment> {
    all_judgments(el)
        .into_iter()
        .filter(|j| matches!(j.term, Term::Can(..)))
        .collect()
}

/// A non-trivial endomorphism of `ctx`: every locally maximal cell `x` of
/// positive dimension goes to `comp(x, id)`, every locally maximal
/// invertibility variable to its η-expansion, the rest stay fixed.
pub fn padding_sub(ctx: &Context) -> Sub {
    use icatt_core::builders::{comp2, id, Typed};
    use icatt_core::normalize::eta_expand;
    let mut used = std::collections::BTreeSet::new();
    for e in ctx.entries() {
        e.ty.collect_vars(&mut used);
    }
    Sub::new(
        (0..ctx.len())
            .map(|x| {
                let ty = ctx.ty(x);
                if used.contains(&x) {
                    return Term::Var(x);
                }
                match ty {
                    Type::Arr(b, _, v) => {
                        let tgt = id(&Typed::new(v.clone(), (**b).clone()));
                        comp2(&Typed::var(ctx, x), &tgt).tm
                    }
                    Type::Inv(..) => eta_expand(&Term::Var(x), ty).unwrap(),
                    Type::Obj => Term::Var(x),
                }
            })
            .collect(),
    )
}

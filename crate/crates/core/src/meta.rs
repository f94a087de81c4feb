//! Distinguished contexts (disks, spheres, walking equivalences and the
//! context of a recursive definition), classifying substitutions, and the
//! opposite operations.

use crate::builders::destructor_type;
use crate::error::{Error, ErrorKind, Result, SyntaxError};
use crate::ps::{op_correspond, PsContext};
use crate::syntax::{Context, Destructor, Level, Sub, Term, Type};

/// `S^n`, with `S^{-1} = ∅`. Variables `dm{i}`, `dp{i}` for `i ≤ n`.
pub fn sphere(n: i64) -> Context {
    let mut ctx = Context::new();
    let mut base = Type::Obj;
    for i in 0..=n {
        let lo = ctx.push(format!("dm{i}"), base.clone());
        let hi = ctx.push(format!("dp{i}"), base.clone());
        base = Type::arr(base, Term::Var(lo), Term::Var(hi));
    }
    ctx
}

/// The type of the top cell of `D^n`: `dm{n-1} → dp{n-1}` iterated.
pub fn sphere_type(n: i64) -> Type {
    let mut base = Type::Obj;
    for i in 0..=n {
        base = Type::arr(
            base,
            Term::Var(2 * i as usize),
            Term::Var(2 * i as usize + 1),
        );
    }
    base
}

/// `D^n = S^{n-1}, (d{n} : …)`.
pub fn disk(n: usize) -> Context {
    let mut ctx = sphere(n as i64 - 1);
    ctx.push(format!("d{n}"), sphere_type(n as i64 - 1));
    ctx
}

/// Level of the top cell `d_n` in `D^n` (and in `E^n`).
pub fn disk_top(n: usize) -> Level {
    2 * n
}

/// `ι_n : D^n → S^{n-1}`, forgetting the top cell.
pub fn sphere_inclusion(n: usize) -> Sub {
    Sub::identity(2 * n)
}

/// `E^{n} = D^{n}, (e{n} : Inv(d{n}))` for `n ≥ 1`.
pub fn walking_equiv(n: usize) -> Context {
    assert!(n >= 1, "the walking equivalence starts at dimension 1");
    let mut ctx = disk(n);
    let d = disk_top(n);
    ctx.push(format!("e{n}"), Type::inv(ctx.ty(d).clone(), Term::Var(d)));
    ctx
}

/// Level of `e_n` in `E^n`.
pub fn equiv_top(n: usize) -> Level {
    2 * n + 1
}

/// `μ_n : E^n → D^n`.
pub fn equiv_display(n: usize) -> Sub {
    Sub::identity(2 * n + 1)
}

/// `χ_A`: into `S^{dim A}` for categorical `A`, into `D^{dim A}` for
/// `A = Inv(B, t)`.
pub fn classify_type(ty: &Type) -> Sub {
    let mut out = Vec::new();
    push_classifier(ty, &mut out);
    Sub::new(out)
}

fn push_classifier(ty: &Type, out: &mut Vec<Term>) {
    match ty {
        Type::Obj => {}
        Type::Arr(a, u, v) => {
            push_classifier(a, out);
            out.push(u.clone());
            out.push(v.clone());
        }
        Type::Inv(a, t) => {
            push_classifier(a, out);
            out.push(t.clone());
        }
    }
}

/// `χ_{t,A}`: into `D^{dim A + 1}` for categorical `A`, into `E^{dim A}`
/// for `A = Inv(B, u)`.
pub fn classify_term(t: &Term, ty: &Type) -> Sub {
    classify_type(ty).extend([t.clone()])
}

/// The display through which a classifier recovers the classifier of the
/// type: `ι` for categorical types, `μ` for invertibility types.
pub fn display_for(ty: &Type) -> Sub {
    match ty {
        Type::Inv(..) => equiv_display(ty.dim() as usize),
        _ => sphere_inclusion((ty.dim() + 1) as usize),
    }
}

/// `χ_{LWit(e)}` (or `χ_{RWit(e)}`) for the generic `e` of `E^{n}`; its
/// codomain is `E^{n+1}`.
pub fn witness_classifier(n: usize, side: Destructor) -> Sub {
    let e = Term::Var(equiv_top(n));
    let ety = walking_equiv(n).ty(equiv_top(n)).clone();
    let w = Term::destr(side, e.clone());
    let wty = destructor_type(side, &e, &ety).expect("e has an invertibility type");
    classify_term(&w, &wty)
}

/// The context of the last two components of a recursive definition over
/// `E^{n}`, whose seed is `t : ty`:
/// `E^{n}, (IHleft : Inv(Σt)[χ_{LWit(e)}]), (IHright : Inv(Σt)[χ_{RWit(e)}])`.
pub fn equiv_ind_context(n: usize, t: &Term, ty: &Type) -> Result<Context> {
    let en = walking_equiv(n);
    if t.vars().last().is_some_and(|&x| x >= en.len()) || !ty.is_categorical() {
        return Err(Error::new(
            ErrorKind::RecContext,
            "seed of a recursive definition must be a categorical term over the walking equivalence",
        ));
    }
    let inv = Type::inv(ty.suspend(), t.suspend());
    let mut ctx = en;
    ctx.push(
        "IHleft",
        inv.subst(&witness_classifier(n, Destructor::LWit)),
    );
    ctx.push(
        "IHright",
        inv.subst(&witness_classifier(n, Destructor::RWit)),
    );
    Ok(ctx)
}

/// `⟨r⟩ : E^{n} → E_Ind`: identity on `E^{n}`, the hypotheses sent to the
/// suspended recursive call classified by the witnesses.
pub fn instantiation(n: usize, r: &Term) -> Sub {
    let sr = r.suspend();
    Sub::identity(2 * n + 2).extend([
        sr.subst(&witness_classifier(n, Destructor::LWit)),
        sr.subst(&witness_classifier(n, Destructor::RWit)),
    ])
}

/// `op_n` on a type of CaTT: arrows between `(n-1)`-cells are reversed.
pub fn op_type(n: usize, ty: &Type) -> Result<Type, SyntaxError> {
    match ty {
        Type::Obj => Ok(Type::Obj),
        Type::Arr(a, u, v) => {
            let a2 = op_type(n, a)?;
            let (u2, v2) = (op_term(n, u)?, op_term(n, v)?);
            if ty.dim() + 1 == n as i64 {
                Ok(Type::arr(a2, v2, u2))
            } else {
                Ok(Type::arr(a2, u2, v2))
            }
        }
        Type::Inv(..) => Err(SyntaxError::NotCatt),
    }
}

/// `op_n` on a context, entrywise and in the same order.
pub fn op_context(n: usize, ctx: &Context) -> Result<Context, SyntaxError> {
    let mut out = Context::new();
    for e in ctx.entries() {
        out.push(e.name.clone(), op_type(n, &e.ty)?);
    }
    Ok(out)
}

/// `op_n` of a pasting diagram, re-sorted into pasting order. Returns the
/// new context and, for each of its variables, the variable of the original
/// context it corresponds to.
pub fn op_ps(n: usize, ps: &PsContext) -> (Context, Vec<Level>) {
    let tree = ps.tree.op(n);
    let (ctx, root) = tree.layout();
    let mut label = vec![0; ctx.len()];
    op_correspond(&root, &ps.root, n, &mut label);
    let names: Vec<String> = label.iter().map(|&x| ps.ctx.name(x).to_string()).collect();
    (ctx.renamed(&names), label)
}

/// The iso `op^Γ_n`, as a substitution from the pasting-ordered opposite to
/// the entrywise opposite of `Γ`.
pub fn op_iso(label: &[Level]) -> Sub {
    let mut inv = vec![0; label.len()];
    for (p, &x) in label.iter().enumerate() {
        inv[x] = p;
    }
    Sub::new(inv.into_iter().map(Term::Var).collect())
}

/// `op_n` on a term of CaTT. Coherences are re-targeted through the iso of
/// their pasting diagram.
pub fn op_term(n: usize, t: &Term) -> Result<Term, SyntaxError> {
    match t {
        Term::Var(x) => Ok(Term::Var(*x)),
        Term::Coh(h, g) => {
            let ps = crate::ps::check_ps(&h.ctx).map_err(|_| SyntaxError::NotCatt)?;
            let (bar, label) = op_ps(n, &ps);
            let iso = op_iso(&label);
            let ty = op_type(n, &h.ty)?.subst(&iso);
            let head = crate::syntax::CohHead::new(h.name.clone(), bar, ty);
            let sub = label
                .iter()
                .map(|&x| op_term(n, &g.terms()[x]))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::Coh(head, Sub::new(sub)))
        }
        _ => Err(SyntaxError::NotCatt),
    }
}

pub fn op_sub(n: usize, s: &Sub) -> Result<Sub, SyntaxError> {
    s.iter()
        .map(|t| op_term(n, t))
        .collect::<Result<Vec<_>, _>>()
        .map(Sub::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ps::{check_ps, PsTree};

    #[test]
    fn small_spheres_and_disks() {
        assert!(sphere(-1).is_empty());
        assert_eq!(sphere(0).len(), 2);
        let d1 = disk(1);
        assert_eq!(d1.len(), 3);
        assert_eq!(*d1.ty(2), Type::arr(Type::Obj, Term::Var(0), Term::Var(1)));
        assert_eq!(disk(2), disk(1).suspend());
        assert_eq!(sphere(1), sphere(0).suspend());
        assert_eq!(walking_equiv(2), walking_equiv(1).suspend());
        assert_eq!(walking_equiv(1).len(), 4);
    }

    #[test]
    fn classifiers() {
        assert!(classify_type(&Type::Obj).is_empty());
        let a = Type::arr(Type::Obj, Term::Var(7), Term::Var(8));
        assert_eq!(classify_type(&a).to_vec(), vec![Term::Var(7), Term::Var(8)]);
        assert_eq!(classify_term(&Term::Var(3), &a).len(), 3);
    }

    #[test]
    fn ind_context_has_two_more_entries() {
        let en = walking_equiv(1);
        let ctx = equiv_ind_context(1, &Term::Var(2), en.ty(2)).unwrap();
        assert_eq!(ctx.len(), en.len() + 2);
        match ctx.ty(4) {
            Type::Inv(_, s) => assert_eq!(*s, Term::destr(Destructor::LUnit, Term::Var(3))),
            _ => panic!(),
        }
    }

    #[test]
    fn op_of_two_chain_context() {
        let ps = check_ps(&PsTree::chain(2, 0).layout().0).unwrap();
        let (bar, label) = op_ps(1, &ps);
        assert_eq!(label, vec![3, 1, 4, 0, 2]);
        let entrywise = op_context(1, &ps.ctx).unwrap();
        // Γ̄ ⊢ iso : op(Γ); types of op(Γ) transported by iso are those of Γ̄.
        let iso = op_iso(&label);
        for x in 0..ps.ctx.len() {
            assert_eq!(
                entrywise.ty(x).subst(&iso),
                *bar.ty(iso.terms()[x].as_var().unwrap())
            );
        }
    }

    #[test]
    fn op_swaps_exactly_one_dimension() {
        let a = Type::arr(
            Type::arr(Type::Obj, Term::Var(0), Term::Var(1)),
            Term::Var(2),
            Term::Var(3),
        );
        let swapped = Type::arr(
            Type::arr(Type::Obj, Term::Var(0), Term::Var(1)),
            Term::Var(3),
            Term::Var(2),
        );
        assert_eq!(op_type(2, &a).unwrap(), swapped);
        assert_eq!(op_type(2, &Type::Obj).unwrap(), Type::Obj);
        assert!(op_type(1, &Type::inv(Type::Obj, Term::Var(0))).is_err());
    }
}

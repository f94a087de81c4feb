//! Typing judgments: contexts, types, terms, substitutions, pasting
//! diagrams and fullness, plus the environment of checked declarations.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use crate::builders::{comp, destructor_type, id, Typed};
use crate::error::{Error, ErrorKind, Result};
use crate::inverse::witness_vars;
use crate::meta::{equiv_ind_context, walking_equiv};
use crate::normalize::convertible_types;
use crate::ps::{check_ps, PsContext};
use crate::syntax::{closure_in, CohHead, Context, Level, RecSchema, Sub, Term, Type};
use crate::Error as KErr;

fn verified_heads() -> &'static Mutex<HashSet<Arc<CohHead>>> {
    static S: OnceLock<Mutex<HashSet<Arc<CohHead>>>> = OnceLock::new();
    S.get_or_init(Default::default)
}

fn verified_recs() -> &'static Mutex<HashMap<Arc<RecSchema>, Type>> {
    static S: OnceLock<Mutex<HashMap<Arc<RecSchema>, Type>>> = OnceLock::new();
    S.get_or_init(Default::default)
}

pub fn check_ctx(ctx: &Context) -> Result<()> {
    let mut seen = HashSet::new();
    let mut prefix = Context::new();
    for e in ctx.entries() {
        if !e.name.is_empty() && !seen.insert(e.name.clone()) {
            return Err(Error::new(
                ErrorKind::DuplicateVariable,
                format!("variable {} is declared twice", e.name),
            ));
        }
        check_type(&prefix, &e.ty)
            .map_err(|err| err.within(format!("checking the type of {}", e.name)))?;
        prefix.push(e.name.clone(), e.ty.clone());
    }
    Ok(())
}

pub fn check_type(ctx: &Context, ty: &Type) -> Result<()> {
    Checker::new(ctx).check_type(ty)
}

pub fn infer(ctx: &Context, t: &Term) -> Result<Type> {
    Checker::new(ctx).infer(t)
}

pub fn check(ctx: &Context, t: &Term, ty: &Type) -> Result<()> {
    Checker::new(ctx).check(t, ty)
}

/// `Δ ⊢ γ : Γ`.
pub fn check_sub(delta: &Context, g: &Sub, gamma: &Context) -> Result<()> {
    Checker::new(delta).check_sub(g, gamma)
}

/// Whether `ty` is a full type of the pasting diagram. Fails when `ty` is
/// not an arrow.
pub fn full_type(ps: &PsContext, ty: &Type) -> Result<bool> {
    Ok(fullness_defect(ps, ty)?.is_none())
}

/// `None` when full, otherwise a description naming an unused variable.
fn fullness_defect(ps: &PsContext, ty: &Type) -> Result<Option<String>> {
    let Type::Arr(_, u, v) = ty else {
        return Err(Error::new(
            ErrorKind::NotFull,
            "only arrow types can be full",
        ));
    };
    let ctx = &ps.ctx;
    let fu = closure_in(ctx, u.vars());
    let fv = closure_in(ctx, v.vars());
    let all: BTreeSet<Level> = (0..ctx.len()).collect();
    if fu == all && fv == all {
        return Ok(None);
    }
    let n = ps.dim() as i64;
    let du = ty.dim();
    let missing = |used: &BTreeSet<Level>, need: &BTreeSet<Level>| {
        need.iter()
            .find(|x| ctx.var_dim(**x) < n && !used.contains(x))
            .copied()
    };
    if du == n - 1 {
        let ms = missing(&fu, ps.source_vars());
        let mt = missing(&fv, ps.target_vars());
        if ms.is_none() && mt.is_none() {
            return Ok(None);
        }
        let (side, x) = match (ms, mt) {
            (Some(x), _) => ("source", x),
            (None, Some(x)) => ("target", x),
            _ => unreachable!(),
        };
        return Ok(Some(format!(
            "the {side} does not use the variable {}",
            ctx.name(x)
        )));
    }
    let x = all
        .iter()
        .find(|x| !fu.contains(x) || !fv.contains(x))
        .copied()
        .unwrap();
    let side = if fu.contains(&x) { "target" } else { "source" };
    Ok(Some(format!(
        "the {side} does not use the variable {}",
        ctx.name(x)
    )))
}

/// Checks a coherence head once; verified heads are remembered.
pub fn check_head(h: &Arc<CohHead>) -> Result<()> {
    if verified_heads().lock().unwrap().contains(h) {
        return Ok(());
    }
    let name = h.name.clone().unwrap_or_else(|| "coherence".into());
    let frame = |e: KErr| e.within(format!("checking {name}"));
    check_ctx(&h.ctx).map_err(frame)?;
    let ps = check_ps(&h.ctx).map_err(frame)?;
    check_type(&h.ctx, &h.ty).map_err(frame)?;
    if let Some(why) = fullness_defect(&ps, &h.ty).map_err(frame)? {
        return Err(frame(Error::new(ErrorKind::NotFull, why)));
    }
    verified_heads().lock().unwrap().insert(h.clone());
    Ok(())
}

/// Checks a recursive definition and returns the type of its seed.
pub fn check_rec(r: &Arc<RecSchema>) -> Result<Type> {
    if let Some(t) = verified_recs().lock().unwrap().get(r) {
        return Ok(t.clone());
    }
    if r.n == 0 {
        return Err(Error::new(
            ErrorKind::RecContext,
            "recursion starts at the walking equivalence E^1",
        ));
    }
    let e = walking_equiv(r.n);
    let c = &r.comps;
    let (ty, lu, ru) = coind_premises(&mut Checker::new(&e), c)?;
    let ind = equiv_ind_context(r.n, &c[0], &ty)?;
    let mut ch = Checker::new(&ind);
    for (k, unit) in [(5, lu), (6, ru)] {
        let want = Type::inv(unit, c[k - 2].clone());
        ch.check(&c[k], &want)
            .map_err(|err| err.within(format!("checking rec component {}", k + 1)))?;
    }
    verified_recs()
        .lock()
        .unwrap()
        .insert(r.clone(), ty.clone());
    Ok(ty)
}

/// The premises shared by `coind` and `rec`: `t : u → v` and the four
/// categorical components at their types. Returns the type of `t` and the
/// types of the two cancellators.
fn coind_premises(ch: &mut Checker, c: &[Term; 7]) -> Result<(Type, Type, Type)> {
    let ty = ch
        .infer(&c[0])
        .map_err(|e| e.within("inferring the type of the underlying cell"))?;
    let Type::Arr(b, u, v) = &ty else {
        return Err(Error::new(
            ErrorKind::NotInvertible,
            "invertibility structures need an arrow",
        ));
    };
    let rev = Type::Arr(b.clone(), v.clone(), u.clone());
    let names = [
        "left inverse",
        "right inverse",
        "left cancellator",
        "right cancellator",
    ];
    for (k, want) in [(1, rev.clone()), (2, rev.clone())] {
        ch.check(&c[k], &want)
            .map_err(|e| e.within(format!("checking the {}", names[k - 1])))?;
    }
    let cell = Typed::new(c[0].clone(), ty.clone());
    let l = Typed::new(c[1].clone(), rev.clone());
    let r = Typed::new(c[2].clone(), rev);
    let idv = id(&Typed::new(v.clone(), (**b).clone()));
    let idu = id(&Typed::new(u.clone(), (**b).clone()));
    let lc = comp(&[l, cell.clone()]);
    let rc = comp(&[cell, r]);
    let lu = Type::arr(lc.ty, lc.tm, idv.tm);
    let ru = Type::arr(rc.ty, rc.tm, idu.tm);
    ch.check(&c[3], &lu)
        .map_err(|e| e.within("checking the left cancellator"))?;
    ch.check(&c[4], &ru)
        .map_err(|e| e.within("checking the right cancellator"))?;
    Ok((ty, lu, ru))
}

/// Checking state for one context. Shared subterms are checked once: their
/// addresses are remembered, and the allocations kept alive so that no
/// address is reused while the checker lives.
pub struct Checker<'a> {
    ctx: &'a Context,
    types: HashMap<*const Term, Type>,
    applied: HashSet<(*const CohHead, *const Term)>,
    keep_terms: Vec<Arc<Term>>,
    keep_apps: Vec<(Arc<CohHead>, Sub)>,
}

impl<'a> Checker<'a> {
    pub fn new(ctx: &'a Context) -> Checker<'a> {
        Checker {
            ctx,
            types: HashMap::new(),
            applied: HashSet::new(),
            keep_terms: Vec::new(),
            keep_apps: Vec::new(),
        }
    }

    fn infer_shared(&mut self, t: &Arc<Term>) -> Result<Type> {
        let key = Arc::as_ptr(t);
        if let Some(ty) = self.types.get(&key) {
            return Ok(ty.clone());
        }
        let ty = self.infer(t)?;
        self.keep_terms.push(t.clone());
        self.types.insert(key, ty.clone());
        Ok(ty)
    }

    pub fn check_type(&mut self, ty: &Type) -> Result<()> {
        match ty {
            Type::Obj => Ok(()),
            Type::Arr(b, u, v) => {
                if !b.is_categorical() {
                    return Err(Error::new(
                        ErrorKind::TypeMismatch,
                        "arrows between invertibility structures",
                    ));
                }
                self.check_type(b)?;
                self.check(u, b)
                    .map_err(|e| e.within("checking the source of an arrow type"))?;
                self.check(v, b)
                    .map_err(|e| e.within("checking the target of an arrow type"))
            }
            Type::Inv(b, t) => {
                if !matches!(&**b, Type::Arr(..)) {
                    return Err(Error::new(
                        ErrorKind::TypeMismatch,
                        "invertibility of a 0-dimensional cell",
                    ));
                }
                self.check_type(b)?;
                self.check(t, b)
                    .map_err(|e| e.within("checking the subject of an invertibility type"))
            }
        }
    }

    pub fn check(&mut self, t: &Term, ty: &Type) -> Result<()> {
        let got = self.infer(t)?;
        if convertible_types(&got, ty) {
            Ok(())
        } else {
            Err(Error::new(
                ErrorKind::TypeMismatch,
                format!(
                    "expected {}, found {}",
                    crate::frontend::show_type(self.ctx, ty),
                    crate::frontend::show_type(self.ctx, &got)
                ),
            )
            .within(format!(
                "checking {}",
                crate::frontend::show_term(self.ctx, t)
            )))
        }
    }

    pub fn check_sub(&mut self, g: &Sub, gamma: &Context) -> Result<()> {
        if g.len() != gamma.len() {
            return Err(Error::new(
                ErrorKind::TypeMismatch,
                format!(
                    "substitution has {} entries, context has {}",
                    g.len(),
                    gamma.len()
                ),
            ));
        }
        for (x, t) in g.iter().enumerate() {
            let want = gamma.ty(x).subst(g);
            self.check(t, &want)
                .map_err(|e| e.within(format!("assigning the variable {}", gamma.name(x))))?;
        }
        Ok(())
    }

    pub fn infer(&mut self, t: &Term) -> Result<Type> {
        match t {
            Term::Var(x) => {
                if *x < self.ctx.len() {
                    Ok(self.ctx.ty(*x).clone())
                } else {
                    Err(Error::new(
                        ErrorKind::IllFormed,
                        format!("unbound variable at level {x}"),
                    ))
                }
            }
            Term::Meta(m) => Err(Error::new(
                ErrorKind::IllFormed,
                format!("unsolved metavariable ?{m}"),
            )),
            Term::Coh(h, g) => {
                let key = (Arc::as_ptr(h), g.0.as_ptr());
                if !self.applied.contains(&key) {
                    check_head(h)?;
                    self.check_sub(g, &h.ctx).map_err(|e| {
                        e.within(format!(
                            "applying {}",
                            h.name.clone().unwrap_or_else(|| "a coherence".into())
                        ))
                    })?;
                    self.applied.insert(key);
                    self.keep_apps.push((h.clone(), g.clone()));
                }
                Ok(h.ty.subst(g))
            }
            Term::Destr(d, e) => {
                let ety = self.infer_shared(e)?;
                if !matches!(ety, Type::Inv(..)) {
                    return Err(Error::new(
                        ErrorKind::NotInvertible,
                        format!("{d} applied to a term that is not an invertibility structure"),
                    ));
                }
                Ok(destructor_type(*d, e, &ety).expect("invertibility types are over arrows"))
            }
            Term::Coind(c) => {
                let (ty, lu, ru) = coind_premises(self, c)?;
                for (k, unit) in [(5, lu), (6, ru)] {
                    let want = Type::inv(unit, c[k - 2].clone());
                    self.check(&c[k], &want)
                        .map_err(|e| e.within(format!("checking coind component {}", k + 1)))?;
                }
                Ok(Type::inv(ty, c[0].clone()))
            }
            Term::Can(c, ws) => {
                let Term::Coh(h, g) = &**c else {
                    return Err(Error::new(
                        ErrorKind::CanWitness,
                        "the subject of can must be a coherence",
                    ));
                };
                let ty = self.infer_shared(c)?;
                if !matches!(ty, Type::Arr(..)) {
                    return Err(Error::new(
                        ErrorKind::NotInvertible,
                        "can on a 0-dimensional coherence",
                    ));
                }
                let vars = witness_vars(h);
                if vars.len() != ws.len() {
                    return Err(Error::new(
                        ErrorKind::CanWitness,
                        format!("can needs {} witnesses, {} given", vars.len(), ws.len()),
                    ));
                }
                for (x, w) in vars.iter().zip(ws.iter()) {
                    let want = Type::inv(h.ctx.ty(*x).subst(g), g.terms()[*x].clone());
                    self.check(w, &want).map_err(|e| {
                        e.within(format!("checking the witness for {}", h.ctx.name(*x)))
                    })?;
                }
                Ok(Type::inv(ty, (**c).clone()))
            }
            Term::Rec(r, g) => {
                let ty = check_rec(r)?;
                let e = walking_equiv(r.n);
                self.check_sub(g, &e)
                    .map_err(|err| err.within("applying a recursive definition"))?;
                Ok(Type::inv(ty.subst(g), r.comps[0].subst(g)))
            }
        }
    }
}

/// A checked top-level declaration.
#[derive(Clone, Debug)]
pub enum Decl {
    Coh(Arc<CohHead>),
    /// A `let` or `inv` body over its telescope.
    Let {
        ctx: Context,
        term: Term,
        ty: Type,
    },
    /// A recursive definition over its telescope, which is `E^n`.
    Rec {
        ctx: Context,
        schema: Arc<RecSchema>,
    },
}

/// Checked declarations by name, in order. Names may not be reused.
#[derive(Clone, Debug, Default)]
pub struct Environment {
    entries: Vec<(String, Decl)>,
    index: HashMap<String, usize>,
}

impl Environment {
    pub fn new() -> Environment {
        Environment::default()
    }

    pub fn get(&self, name: &str) -> Option<&Decl> {
        self.index.get(name).map(|&i| &self.entries[i].1)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Decl)> {
        self.entries.iter().map(|(n, d)| (n.as_str(), d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Re-checks `decl` from scratch and appends it.
    pub fn check_decl(&mut self, name: &str, decl: Decl) -> Result<()> {
        if self.contains(name) {
            return Err(Error::new(
                ErrorKind::Shadowing,
                format!("{name} is already declared"),
            ));
        }
        let frame = |e: KErr| e.within(format!("checking the declaration {name}"));
        match &decl {
            Decl::Coh(h) => check_head(h).map_err(frame)?,
            Decl::Let { ctx, term, ty } => {
                check_ctx(ctx).map_err(frame)?;
                check_type(ctx, ty).map_err(frame)?;
                check(ctx, term, ty).map_err(frame)?;
            }
            Decl::Rec { ctx, schema } => {
                if *ctx != walking_equiv(schema.n) {
                    return Err(frame(Error::new(
                        ErrorKind::RecContext,
                        "the telescope of a recursive definition must be a walking equivalence",
                    )));
                }
                check_ctx(ctx).map_err(frame)?;
                check_rec(schema).map_err(frame)?;
            }
        }
        self.index.insert(name.to_string(), self.entries.len());
        self.entries.push((name.to_string(), decl));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{comp2, ucomp};
    use crate::meta::disk;
    use crate::ps::PsTree;
    use crate::syntax::Destructor;

    fn chain2() -> PsContext {
        PsContext::from_tree(&PsTree::chain(2, 0))
    }

    #[test]
    fn fullness_examples() {
        let ps = chain2();
        let xz = Type::arr(Type::Obj, Term::Var(0), Term::Var(3));
        let xy = Type::arr(Type::Obj, Term::Var(0), Term::Var(1));
        assert!(full_type(&ps, &xz).unwrap());
        assert!(!full_type(&ps, &xy).unwrap());
        let point = PsContext::from_tree(&PsTree::point());
        assert!(full_type(&point, &Type::arr(Type::Obj, Term::Var(0), Term::Var(0))).unwrap());
        assert!(full_type(&ps, &Type::Obj).is_err());
    }

    #[test]
    fn composite_infers_outer_boundary() {
        let (ctx, _) = PsTree::chain(2, 0).layout();
        let c = ucomp(&PsTree::chain(2, 0));
        assert_eq!(
            infer(&ctx, &c.tm).unwrap(),
            Type::arr(Type::Obj, Term::Var(0), Term::Var(3))
        );
    }

    #[test]
    fn destructor_table_on_walking_equivalence() {
        let e1 = walking_equiv(1);
        let e = Term::Var(3);
        let lu = infer(&e1, &Term::destr(Destructor::LUnit, e.clone())).unwrap();
        let d = Typed::var(&e1, 2);
        let l = Typed::new(
            Term::destr(Destructor::LInv, e),
            Type::arr(Type::Obj, Term::Var(1), Term::Var(0)),
        );
        let want_src = comp2(&l, &d);
        let want_tgt = id(&Typed::var(&e1, 1));
        assert_eq!(lu, Type::arr(want_src.ty, want_src.tm, want_tgt.tm));
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut c = Context::new();
        c.push("x", Type::Obj);
        c.push("x", Type::Obj);
        assert_eq!(
            check_ctx(&c).unwrap_err().kind,
            ErrorKind::DuplicateVariable
        );
    }

    #[test]
    fn inv_over_objects_rejected() {
        let d = disk(0);
        let err = check_type(&d, &Type::inv(Type::Obj, Term::Var(0))).unwrap_err();
        assert_eq!(err.kind, ErrorKind::TypeMismatch);
        let d1 = disk(1);
        check_type(&d1, &Type::inv(d1.ty(2).clone(), Term::Var(2))).unwrap();
    }

    #[test]
    fn identity_and_double_identity_are_not_convertible() {
        let d0 = disk(0);
        let x = Typed::var(&d0, 0);
        let i = id(&x);
        let ii = comp2(&i, &i);
        assert!(!crate::normalize::convertible(&i.tm, &ii.tm));
        assert_eq!(infer(&d0, &ii.tm).unwrap(), i.ty);
    }
}

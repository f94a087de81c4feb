//! β-reduction, guarded η-expansion and conversion.
//!
//! Every invertibility-typed subterm of a categorical term sits below a
//! destructor (coherence contexts carry no invertibility variables), so the
//! guarded η-expansion never fires inside categorical terms and their normal
//! forms are their β-normal forms. η-expansion is still provided for terms
//! of invertibility type, where it is applied once at the head.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::builders::destructor_type;
use crate::error::{Error, ErrorKind, Result};
use crate::inverse::canonical_component;
use crate::meta::instantiation;
use crate::syntax::{Destructor, RecSchema, Sub, Term, Type};

/// Memoises reducts of shared subterms for the duration of one traversal.
#[derive(Default)]
struct Beta {
    memo: HashMap<*const Term, Term>,
    keep: Vec<Arc<Term>>,
}

impl Beta {
    fn sub(&mut self, s: &Sub) -> Result<Sub> {
        let mut changed = false;
        let mut out = Vec::with_capacity(s.len());
        for t in s.iter() {
            let r = self.term(t)?;
            changed |= r != *t;
            out.push(r);
        }
        Ok(if changed { Sub::new(out) } else { s.clone() })
    }

    fn shared(&mut self, t: &Arc<Term>) -> Result<Term> {
        let key = Arc::as_ptr(t);
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        let r = self.term(t)?;
        self.keep.push(t.clone());
        self.memo.insert(key, r.clone());
        Ok(r)
    }

    fn term(&mut self, t: &Term) -> Result<Term> {
        Ok(match t {
            Term::Var(_) | Term::Meta(_) => t.clone(),
            Term::Coh(h, g) => Term::Coh(h.clone(), self.sub(g)?),
            Term::Coind(c) => {
                let mut out = Vec::with_capacity(7);
                for x in c.iter() {
                    out.push(self.term(x)?);
                }
                Term::coind(out.try_into().unwrap())
            }
            Term::Can(c, ws) => Term::Can(Arc::new(self.shared(c)?), self.sub(ws)?),
            Term::Rec(r, g) => Term::Rec(r.clone(), self.sub(g)?),
            Term::Destr(d, e) => {
                let e2 = self.shared(e)?;
                match contract(*d, &e2)? {
                    Some(redex) => self.term(&redex)?,
                    None => Term::destr(*d, e2),
                }
            }
        })
    }
}

/// One head β-step of `d` applied to an argument in normal form.
pub fn contract(d: Destructor, e: &Term) -> Result<Option<Term>> {
    Ok(match e {
        Term::Coind(c) => Some(c[d.component()].clone()),
        Term::Can(c, ws) => Some(canonical_component(c, ws, d)?),
        Term::Rec(r, g) => Some(rec_component(r, g, d)),
        _ => None,
    })
}

/// `d(rec(r, γ))`: the matching component under `γ`, or for the witness
/// destructors under `⟨rec(r)⟩ ∘ γ`.
pub fn rec_component(r: &Arc<RecSchema>, g: &Sub, d: Destructor) -> Term {
    let comp = &r.comps[d.component()];
    if d.is_witness() {
        let generic = Term::Rec(r.clone(), Sub::identity(2 * r.n + 2));
        comp.subst(&instantiation(r.n, &generic).compose(g))
    } else {
        comp.subst(g)
    }
}

/// Full β-normal form.
pub fn beta(t: &Term) -> Result<Term> {
    Beta::default().term(t)
}

pub fn beta_type(a: &Type) -> Result<Type> {
    let mut b = Beta::default();
    beta_type_in(&mut b, a)
}

fn beta_type_in(b: &mut Beta, a: &Type) -> Result<Type> {
    Ok(match a {
        Type::Obj => Type::Obj,
        Type::Arr(x, u, v) => Type::arr(beta_type_in(b, x)?, b.term(u)?, b.term(v)?),
        Type::Inv(x, t) => Type::inv(beta_type_in(b, x)?, b.term(t)?),
    })
}

/// Normal form of a categorical term: β-normal, with guarded η-expansion of
/// the invertibility structures not under a destructor (of which categorical
/// terms have none).
pub fn nf(t: &Term, ty: &Type) -> Result<Term> {
    if !ty.is_categorical() {
        return Err(Error::new(
            ErrorKind::NotCategorical,
            "normal forms are taken at categorical types",
        ));
    }
    beta(t)
}

pub fn nf_type(a: &Type) -> Result<Type> {
    if !a.is_categorical() {
        return Err(Error::new(
            ErrorKind::NotCategorical,
            "normal forms are taken at categorical types",
        ));
    }
    beta_type(a)
}

/// `e ≡ coind(t, L e, R e, LU e, RU e, LW e, RW e)` for `e : Inv(t)`.
pub fn eta_expand(e: &Term, ty: &Type) -> Option<Term> {
    let Type::Inv(_, t) = ty else { return None };
    destructor_type(Destructor::LInv, e, ty)?;
    let mut comps = vec![t.clone()];
    comps.extend(Destructor::ALL.iter().map(|&d| Term::destr(d, e.clone())));
    Some(Term::coind(comps.try_into().unwrap()))
}

/// Normal form of a term of invertibility type: η-expanded once at the head,
/// components β-normalised. Destructors of the expansion reduce to the
/// β-normal destructors of the original term.
pub fn nf_inv(e: &Term, ty: &Type) -> Result<Term> {
    let exp = eta_expand(e, ty).ok_or_else(|| {
        Error::new(
            ErrorKind::NotInvertible,
            "η-expansion needs an invertibility type",
        )
    })?;
    beta(&exp)
}

/// Weak-head normal form: destructors applied to constructors are
/// contracted at the head only.
pub fn whnf(t: &Term) -> Result<Term> {
    let mut cur = t.clone();
    loop {
        let Term::Destr(d, e) = &cur else {
            return Ok(cur);
        };
        let head = whnf(e)?;
        match contract(*d, &head)? {
            Some(r) => cur = r,
            None => return Ok(cur),
        }
    }
}

/// Compares weak-head normal forms and recurses into arguments, so that
/// shared or already equal subterms are never normalised.
#[derive(Default)]
struct Conv {
    equal: HashSet<(*const Term, *const Term)>,
    keep: Vec<(Arc<Term>, Arc<Term>)>,
}

impl Conv {
    fn shared(&mut self, a: &Arc<Term>, b: &Arc<Term>) -> Result<bool> {
        if Arc::ptr_eq(a, b) {
            return Ok(true);
        }
        let key = (Arc::as_ptr(a), Arc::as_ptr(b));
        if self.equal.contains(&key) {
            return Ok(true);
        }
        let r = self.term(a, b)?;
        if r {
            self.equal.insert(key);
            self.keep.push((a.clone(), b.clone()));
        }
        Ok(r)
    }

    fn sub(&mut self, g: &Sub, h: &Sub) -> Result<bool> {
        if g.len() != h.len() {
            return Ok(false);
        }
        if std::ptr::eq(g.0.as_ptr(), h.0.as_ptr()) {
            return Ok(true);
        }
        for (x, y) in g.iter().zip(h.iter()) {
            if !self.term(x, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn term(&mut self, a: &Term, b: &Term) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        let (a, b) = (whnf(a)?, whnf(b)?);
        Ok(match (&a, &b) {
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::Meta(x), Term::Meta(y)) => x == y,
            (Term::Coh(h, g), Term::Coh(h2, g2)) => h == h2 && self.sub(g, g2)?,
            (Term::Rec(r, g), Term::Rec(r2, g2)) => r == r2 && self.sub(g, g2)?,
            (Term::Destr(d, e), Term::Destr(d2, e2)) => d == d2 && self.shared(e, e2)?,
            (Term::Can(c, ws), Term::Can(c2, ws2)) => self.shared(c, c2)? && self.sub(ws, ws2)?,
            (Term::Coind(c), Term::Coind(c2)) => {
                for (x, y) in c.iter().zip(c2.iter()) {
                    if !self.term(x, y)? {
                        return Ok(false);
                    }
                }
                true
            }
            _ => false,
        })
    }
}

/// Equality of β-normal forms, decided lazily.
pub fn convertible(a: &Term, b: &Term) -> bool {
    a == b || Conv::default().term(a, b).unwrap_or(false)
}

/// Equality of β-normal forms, by normalising both sides. Slower than
/// [`convertible`], which must agree with it.
pub fn convertible_by_nf(a: &Term, b: &Term) -> bool {
    match (beta(a), beta(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

pub fn convertible_types(a: &Type, b: &Type) -> bool {
    if a == b {
        return true;
    }
    match (a, b) {
        (Type::Obj, Type::Obj) => true,
        (Type::Arr(x, u, v), Type::Arr(y, s, t)) => {
            convertible_types(x, y) && convertible(u, s) && convertible(v, t)
        }
        (Type::Inv(x, u), Type::Inv(y, s)) => convertible_types(x, y) && convertible(u, s),
        _ => false,
    }
}

/// True when the term contains only variables and coherences.
pub fn erase_check(t: &Term) -> Result<bool> {
    Ok(beta(t)?.is_catt())
}

pub fn erase_check_type(a: &Type) -> Result<bool> {
    Ok(beta_type(a)?.is_catt())
}

/// Count of destructor-over-constructor pairs, the measure β-steps decrease.
pub fn redex_count(t: &Term) -> usize {
    let here = |t: &Term| match t {
        Term::Destr(_, e) => usize::from(matches!(
            &**e,
            Term::Coind(_) | Term::Can(..) | Term::Rec(..)
        )),
        _ => 0,
    };
    here(t)
        + match t {
            Term::Var(_) | Term::Meta(_) => 0,
            Term::Coh(_, g) | Term::Rec(_, g) => g.iter().map(redex_count).sum(),
            Term::Destr(_, e) => redex_count(e),
            Term::Coind(c) => c.iter().map(redex_count).sum(),
            Term::Can(c, ws) => redex_count(c) + ws.iter().map(redex_count).sum::<usize>(),
        }
}

/// All terms reachable by contracting exactly one redex.
pub fn one_step_reducts(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    if let Term::Destr(d, e) = t {
        if let Ok(Some(r)) = contract(*d, e) {
            out.push(r);
        }
    }
    let rebuild_sub = |g: &Sub, f: &dyn Fn(Sub) -> Term, out: &mut Vec<Term>| {
        for (i, x) in g.iter().enumerate() {
            for r in one_step_reducts(x) {
                let mut v = g.to_vec();
                v[i] = r;
                out.push(f(Sub::new(v)));
            }
        }
    };
    match t {
        Term::Var(_) | Term::Meta(_) => {}
        Term::Coh(h, g) => rebuild_sub(g, &|s| Term::Coh(h.clone(), s), &mut out),
        Term::Rec(r, g) => rebuild_sub(g, &|s| Term::Rec(r.clone(), s), &mut out),
        Term::Destr(d, e) => {
            for r in one_step_reducts(e) {
                out.push(Term::destr(*d, r));
            }
        }
        Term::Coind(c) => {
            for i in 0..7 {
                for r in one_step_reducts(&c[i]) {
                    let mut v = (**c).clone();
                    v[i] = r;
                    out.push(Term::coind(v));
                }
            }
        }
        Term::Can(c, ws) => {
            for r in one_step_reducts(c) {
                out.push(Term::Can(Arc::new(r), ws.clone()));
            }
            rebuild_sub(ws, &|s| Term::Can(c.clone(), s), &mut out);
        }
    }
    out
}

//! From surface declarations to kernel declarations.
//!
//! Every use of a declaration supplies only its explicit arguments: a
//! variable of a telescope is implicit when it occurs in the type of a later
//! variable. Implicit arguments become metavariables solved by first-order
//! unification of the explicit arguments' types; a schema is suspended as
//! many times as the explicit arguments' dimensions exceed those of its
//! telescope. `let` and `inv` bodies are inlined at their uses.

use std::collections::HashMap;
use std::sync::Arc;

use crate::builders::{comp, destructor_type, id, id_head, ucomp, Typed};
use crate::error::{Error, ErrorKind, Result};
use crate::frontend::parser::{Binder, SBody, STerm, SType, SurfaceDecl};
use crate::frontend::printer::{show_term, show_type};
use crate::inverse::witness_vars;
use crate::kernel::{check_rec, Decl, Environment};
use crate::meta::{equiv_ind_context, walking_equiv};
use crate::normalize::beta;
use crate::ps::PsTree;
use crate::syntax::{CohHead, Context, RecSchema, Sub, Term, Type};

pub const IH_NAMES: [&str; 2] = ["IHleft", "IHright"];
const BUILTINS: [&str; 2] = ["id", "comp"];

#[derive(Clone, Debug)]
enum Body {
    Coh(Arc<CohHead>),
    Term(Term, Type),
    /// A recursive definition and the type of its seed.
    Rec(Arc<RecSchema>, Type),
}

/// What a name stands for when applied: a body over a telescope, some of
/// whose variables are given explicitly.
#[derive(Clone, Debug)]
pub struct Schema {
    ctx: Context,
    explicit: Vec<bool>,
    body: Body,
}

impl Schema {
    fn new(ctx: Context, body: Body) -> Schema {
        let explicit = explicit_mask(&ctx);
        Schema {
            ctx,
            explicit,
            body,
        }
    }

    fn suspend(&self) -> Schema {
        let mut explicit = vec![false, false];
        explicit.extend(&self.explicit);
        let body = match &self.body {
            Body::Coh(h) => Body::Coh(h.suspended()),
            Body::Term(t, ty) => Body::Term(t.suspend(), ty.suspend()),
            Body::Rec(r, ty) => Body::Rec(r.suspended(), ty.suspend()),
        };
        Schema {
            ctx: self.ctx.suspend(),
            explicit,
            body,
        }
    }

    fn ty(&self) -> Type {
        match &self.body {
            Body::Coh(h) => h.ty.clone(),
            Body::Term(_, ty) => ty.clone(),
            Body::Rec(r, ty) => Type::inv(ty.clone(), r.comps[0].clone()),
        }
    }

    fn apply(&self, s: &Sub) -> (Term, Type) {
        let tm = match &self.body {
            Body::Coh(h) => Term::Coh(h.clone(), s.clone()),
            Body::Term(t, _) => t.subst(s),
            Body::Rec(r, _) => Term::Rec(r.clone(), s.clone()),
        };
        (tm, self.ty().subst(s))
    }
}

/// A variable is explicit unless it occurs in the type of a later one.
pub fn explicit_mask(ctx: &Context) -> Vec<bool> {
    let mut explicit = vec![true; ctx.len()];
    for e in ctx.entries() {
        for x in e.ty.vars() {
            explicit[x] = false;
        }
    }
    explicit
}

fn err(kind: ErrorKind, msg: impl Into<String>) -> Error {
    Error::new(kind, msg)
}

/// The elaborator state: the kernel environment and the schema of every
/// declared name.
#[derive(Clone, Debug, Default)]
pub struct Elaborator {
    pub env: Environment,
    schemas: HashMap<String, Schema>,
}

impl Elaborator {
    pub fn new() -> Elaborator {
        Elaborator::default()
    }

    /// Elaborates a declaration, re-checks the result in the kernel, and
    /// records it.
    pub fn declare(&mut self, d: &SurfaceDecl) -> Result<Decl> {
        let decl = self.elaborate_decl(d)?;
        self.env.check_decl(&d.name, decl.clone())?;
        let schema = match &decl {
            Decl::Coh(h) => Schema::new(h.ctx.clone(), Body::Coh(h.clone())),
            Decl::Let { ctx, term, ty } => {
                Schema::new(ctx.clone(), Body::Term(term.clone(), ty.clone()))
            }
            Decl::Rec { ctx, schema } => {
                Schema::new(ctx.clone(), Body::Rec(schema.clone(), check_rec(schema)?))
            }
        };
        self.schemas.insert(d.name.clone(), schema);
        Ok(decl)
    }

    /// The kernel declaration for `d`, not yet checked or recorded.
    pub fn elaborate_decl(&self, d: &SurfaceDecl) -> Result<Decl> {
        let frame = |e: Error| e.within(format!("elaborating {} {}", d.keyword(), d.name));
        if self.env.contains(&d.name)
            || BUILTINS.contains(&d.name.as_str())
            || IH_NAMES.contains(&d.name.as_str())
        {
            return Err(frame(err(
                ErrorKind::Shadowing,
                format!("{} is already declared", d.name),
            )));
        }
        let mut s = Session {
            el: self,
            metas: Vec::new(),
        };
        s.decl(d).map_err(frame)
    }

    pub fn schema(&self, name: &str) -> Option<&Schema> {
        self.schemas.get(name)
    }
}

struct Session<'a> {
    el: &'a Elaborator,
    metas: Vec<Option<Term>>,
}

impl Session<'_> {
    fn fresh(&mut self) -> Term {
        self.metas.push(None);
        Term::Meta(self.metas.len() - 1)
    }

    fn zonk(&self, t: &Term) -> Term {
        if !t.has_metas() {
            return t.clone();
        }
        match t {
            Term::Meta(m) => match &self.metas[*m] {
                Some(v) => self.zonk(v),
                None => t.clone(),
            },
            Term::Var(_) => t.clone(),
            Term::Coh(h, g) => Term::Coh(h.clone(), self.zonk_sub(g)),
            Term::Rec(r, g) => Term::Rec(r.clone(), self.zonk_sub(g)),
            Term::Destr(d, e) => Term::destr(*d, self.zonk(e)),
            Term::Coind(c) => Term::coind(c.each_ref().map(|x| self.zonk(x))),
            Term::Can(c, ws) => Term::Can(Arc::new(self.zonk(c)), self.zonk_sub(ws)),
        }
    }

    fn zonk_sub(&self, g: &Sub) -> Sub {
        g.map(|t| self.zonk(t))
    }

    fn zonk_ty(&self, a: &Type) -> Type {
        match a {
            Type::Obj => Type::Obj,
            Type::Arr(b, u, v) => Type::arr(self.zonk_ty(b), self.zonk(u), self.zonk(v)),
            Type::Inv(b, t) => Type::inv(self.zonk_ty(b), self.zonk(t)),
        }
    }

    fn occurs(&self, m: usize, t: &Term) -> bool {
        match t {
            Term::Meta(n) => *n == m || self.metas[*n].as_ref().is_some_and(|v| self.occurs(m, v)),
            Term::Var(_) => false,
            Term::Coh(_, g) | Term::Rec(_, g) => g.iter().any(|x| self.occurs(m, x)),
            Term::Destr(_, e) => self.occurs(m, e),
            Term::Coind(c) => c.iter().any(|x| self.occurs(m, x)),
            Term::Can(c, ws) => self.occurs(m, c) || ws.iter().any(|x| self.occurs(m, x)),
        }
    }

    fn head_meta(&self, t: &Term) -> Term {
        let mut t = t.clone();
        while let Term::Meta(m) = t {
            match &self.metas[m] {
                Some(v) => t = v.clone(),
                None => break,
            }
        }
        t
    }

    fn rigid(&mut self, a: &Term, b: &Term) -> bool {
        if a == b && !a.has_metas() {
            return true;
        }
        let (a, b) = (self.head_meta(a), self.head_meta(b));
        match (&a, &b) {
            (Term::Meta(m), Term::Meta(n)) if m == n => true,
            (Term::Meta(m), t) | (t, Term::Meta(m)) => {
                if self.occurs(*m, t) {
                    return false;
                }
                self.metas[*m] = Some(self.zonk(t));
                true
            }
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::Coh(h, g), Term::Coh(h2, g2)) => {
                (Arc::ptr_eq(h, h2) || h == h2) && self.rigid_sub(g, g2)
            }
            (Term::Rec(r, g), Term::Rec(r2, g2)) => {
                (Arc::ptr_eq(r, r2) || r == r2) && self.rigid_sub(g, g2)
            }
            (Term::Destr(d, e), Term::Destr(d2, e2)) => d == d2 && self.rigid(e, e2),
            (Term::Coind(c), Term::Coind(c2)) => {
                c.iter().zip(c2.iter()).all(|(x, y)| self.rigid(x, y))
            }
            (Term::Can(c, ws), Term::Can(c2, ws2)) => self.rigid(c, c2) && self.rigid_sub(ws, ws2),
            _ => false,
        }
    }

    fn rigid_sub(&mut self, g: &Sub, g2: &Sub) -> bool {
        g.len() == g2.len() && g.iter().zip(g2.iter()).all(|(x, y)| self.rigid(x, y))
    }

    /// Structural unification, retried once on β-normal forms.
    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let saved = self.metas.clone();
        if self.rigid(a, b) {
            return true;
        }
        self.metas = saved.clone();
        let (za, zb) = (self.zonk(a), self.zonk(b));
        if let (Ok(na), Ok(nb)) = (beta(&za), beta(&zb)) {
            if (na != za || nb != zb) && self.rigid(&na, &nb) {
                return true;
            }
        }
        self.metas = saved;
        false
    }

    fn unify_ty(&mut self, a: &Type, b: &Type) -> bool {
        match (a, b) {
            (Type::Obj, Type::Obj) => true,
            (Type::Arr(x, u, v), Type::Arr(y, s, t)) => {
                self.unify_ty(x, y) && self.unify(u, s) && self.unify(v, t)
            }
            (Type::Inv(x, u), Type::Inv(y, s)) => self.unify_ty(x, y) && self.unify(u, s),
            _ => false,
        }
    }

    fn expect_ty(&mut self, ctx: &Context, got: &Type, want: &Type, what: &str) -> Result<()> {
        if self.unify_ty(got, want) {
            return Ok(());
        }
        Err(err(
            ErrorKind::Unification,
            format!(
                "{what} has type {} but {} was expected",
                show_type(ctx, &self.zonk_ty(got)),
                show_type(ctx, &self.zonk_ty(want))
            ),
        ))
    }

    fn solved(&self, ctx: &Context, t: &Term, what: &str) -> Result<Term> {
        let z = self.zonk(t);
        if z.has_metas() {
            return Err(err(
                ErrorKind::Unification,
                format!(
                    "could not infer every implicit argument of {what}: {}",
                    show_term(ctx, &z)
                ),
            ));
        }
        Ok(z)
    }

    fn solved_ty(&self, ctx: &Context, a: &Type, what: &str) -> Result<Type> {
        let z = self.zonk_ty(a);
        if z.has_metas() {
            return Err(err(
                ErrorKind::Unification,
                format!(
                    "could not infer every implicit argument of {what}: {}",
                    show_type(ctx, &z)
                ),
            ));
        }
        Ok(z)
    }

    fn surface_type(&mut self, ctx: &Context, a: &SType) -> Result<Type> {
        match a {
            SType::Obj(_) => Ok(Type::Obj),
            SType::Arr(s, t, sp) => {
                let (u, b) = self.synth_known(ctx, s)?;
                let v = self.check(ctx, t, &b)?;
                if !b.is_categorical() {
                    return Err(err(
                        ErrorKind::TypeMismatch,
                        format!("{sp}: arrows between invertibility structures"),
                    ));
                }
                Ok(Type::arr(b, u, v))
            }
            SType::Inv(t, sp) => {
                let (u, b) = self.synth_known(ctx, t)?;
                if !matches!(self.zonk_ty(&b), Type::Arr(..)) {
                    return Err(err(
                        ErrorKind::TypeMismatch,
                        format!("{sp}: invertibility of a 0-dimensional cell"),
                    ));
                }
                Ok(Type::inv(b, u))
            }
        }
    }

    fn synth_known(&mut self, ctx: &Context, t: &STerm) -> Result<(Term, Type)> {
        match self.synth(ctx, t, None)? {
            (tm, Some(ty)) => Ok((tm, ty)),
            (_, None) => Err(err(
                ErrorKind::Unification,
                format!("{}: cannot infer the type of `_` here", t.span()),
            )),
        }
    }

    fn check(&mut self, ctx: &Context, t: &STerm, want: &Type) -> Result<Term> {
        let (tm, got) = self.synth(ctx, t, Some(want))?;
        if let Some(got) = got {
            self.expect_ty(ctx, &got, want, &format!("the term at {}", t.span()))?;
        }
        Ok(tm)
    }

    /// Elaborates a term; the type is unknown only for a bare wildcard.
    fn synth(
        &mut self,
        ctx: &Context,
        t: &STerm,
        expected: Option<&Type>,
    ) -> Result<(Term, Option<Type>)> {
        match t {
            STerm::Wild(_) => Ok((self.fresh(), None)),
            STerm::App(h, args, sp) => {
                let r = self.app(ctx, h, args, expected);
                r.map(|(tm, ty)| (tm, Some(ty)))
                    .map_err(|e| e.within(format!("elaborating `{h}` at {sp}")))
            }
            STerm::Destr(d, a, sp) => {
                let (e, ety) = self.synth_known(ctx, a)?;
                let ety = self.zonk_ty(&ety);
                let ty = destructor_type(*d, &e, &ety).ok_or_else(|| {
                    err(
                        ErrorKind::NotInvertible,
                        format!(
                            "{sp}: {d} applied to a term of type {}",
                            show_type(ctx, &ety)
                        ),
                    )
                })?;
                Ok((Term::destr(*d, e), Some(ty)))
            }
            STerm::Can(subject, ws, sp) => {
                let (tm, ty) = self
                    .can(ctx, subject, ws, expected)
                    .map_err(|e| e.within(format!("elaborating can at {sp}")))?;
                Ok((tm, Some(ty)))
            }
        }
    }

    fn can(
        &mut self,
        ctx: &Context,
        subject: &STerm,
        ws: &[STerm],
        expected: Option<&Type>,
    ) -> Result<(Term, Type)> {
        let c = match (subject, expected.map(|a| self.zonk_ty(a))) {
            (STerm::Wild(_), Some(Type::Inv(_, t))) => t,
            (STerm::Wild(sp), _) => {
                return Err(err(
                    ErrorKind::Unification,
                    format!("{sp}: the subject of can cannot be inferred here"),
                ))
            }
            (s, _) => {
                let (c, _) = self.synth_known(ctx, s)?;
                self.zonk(&c)
            }
        };
        let Term::Coh(h, g) = &c else {
            return Err(err(
                ErrorKind::CanWitness,
                format!(
                    "the subject of can must be a coherence, found {}",
                    show_term(ctx, &c)
                ),
            ));
        };
        let vars = witness_vars(h);
        if vars.len() != ws.len() {
            return Err(err(
                ErrorKind::CanWitness,
                format!(
                    "can on {} needs {} witnesses, {} given",
                    show_term(ctx, &c),
                    vars.len(),
                    ws.len()
                ),
            ));
        }
        let mut out = Vec::with_capacity(ws.len());
        for (x, w) in vars.iter().zip(ws) {
            let want = Type::inv(h.ctx.ty(*x).subst(g), g.terms()[*x].clone());
            out.push(
                self.check(ctx, w, &want).map_err(|e| {
                    e.within(format!("checking the witness for {}", h.ctx.name(*x)))
                })?,
            );
        }
        let ty = Type::inv(h.ty.subst(g), c.clone());
        Ok((Term::can(c, out), ty))
    }

    fn app(
        &mut self,
        ctx: &Context,
        h: &str,
        args: &[STerm],
        expected: Option<&Type>,
    ) -> Result<(Term, Type)> {
        if let Some(x) = ctx.lookup(h) {
            if !args.is_empty() {
                return Err(err(
                    ErrorKind::IllFormed,
                    format!("the variable {h} cannot be applied"),
                ));
            }
            return Ok((Term::Var(x), ctx.ty(x).clone()));
        }
        if IH_NAMES.contains(&h) {
            return Err(err(
                ErrorKind::IhOutsideRec,
                format!("{h} is only available in the last two components of a rec"),
            ));
        }
        let mut elab_args = Vec::with_capacity(args.len());
        for a in args {
            elab_args.push(self.synth(ctx, a, None)?);
        }
        let schema = match h {
            "comp" => {
                if args.is_empty() {
                    return Err(err(
                        ErrorKind::IllFormed,
                        "comp needs at least one argument",
                    ));
                }
                let dims: Vec<i64> = elab_args
                    .iter()
                    .filter_map(|(_, a)| a.as_ref().map(|a| a.dim()))
                    .collect();
                let Some(&d) = dims.first() else {
                    return Err(err(
                        ErrorKind::Unification,
                        "cannot infer the dimension of a composite of wildcards",
                    ));
                };
                if dims.iter().any(|&e| e != d) || d < 0 {
                    return Err(err(
                        ErrorKind::DimensionMismatch,
                        "composed cells must share a positive dimension",
                    ));
                }
                if args.len() == 1 {
                    let (t, a) = elab_args.pop().unwrap();
                    return Ok((t, a.unwrap()));
                }
                let cell = ucomp(&PsTree::chain(args.len(), d as usize));
                let Term::Coh(head, _) = cell.tm else {
                    unreachable!()
                };
                let ctx = head.ctx.clone();
                let explicit = (0..ctx.len()).map(|x| ctx.var_dim(x) == d + 1).collect();
                Schema {
                    ctx,
                    explicit,
                    body: Body::Coh(head),
                }
            }
            "id" => Schema::new(id_head(0).ctx.clone(), Body::Coh(id_head(0))),
            _ => match self.el.schemas.get(h) {
                Some(s) => s.clone(),
                None => {
                    return Err(err(
                        ErrorKind::UnknownIdentifier,
                        format!("unknown identifier {h}"),
                    ))
                }
            },
        };
        self.apply_schema(ctx, &schema, elab_args, expected)
    }

    fn apply_schema(
        &mut self,
        ctx: &Context,
        schema: &Schema,
        args: Vec<(Term, Option<Type>)>,
        expected: Option<&Type>,
    ) -> Result<(Term, Type)> {
        let positions: Vec<usize> = (0..schema.ctx.len())
            .filter(|&x| schema.explicit[x])
            .collect();
        if positions.len() != args.len() {
            return Err(err(
                ErrorKind::Unification,
                format!(
                    "expected {} explicit arguments, found {}",
                    positions.len(),
                    args.len()
                ),
            ));
        }
        let mut k = None;
        for (x, (_, a)) in positions.iter().zip(&args) {
            let Some(a) = a else { continue };
            let excess = a.dim() - schema.ctx.ty(*x).dim();
            match k {
                None => k = Some(excess),
                Some(k0) if k0 != excess => {
                    return Err(err(
                        ErrorKind::DimensionMismatch,
                        "arguments exceed their expected dimensions unevenly",
                    ))
                }
                _ => {}
            }
        }
        let k = match (k, expected) {
            (Some(k), _) => k,
            (None, Some(e)) if e.dim() >= schema.ty().dim() => e.dim() - schema.ty().dim(),
            _ => 0,
        };
        if k < 0 {
            return Err(err(
                ErrorKind::DimensionMismatch,
                "an argument has lower dimension than its variable",
            ));
        }
        let mut s = schema.clone();
        for _ in 0..k {
            s = s.suspend();
        }
        let shift = 2 * k as usize;
        let mut terms: Vec<Term> = (0..s.ctx.len()).map(|_| Term::Var(0)).collect();
        let mut types = vec![None; s.ctx.len()];
        for (x, (t, a)) in positions.iter().zip(args) {
            terms[x + shift] = t;
            types[x + shift] = a;
        }
        for (x, t) in terms.iter_mut().enumerate() {
            if !s.explicit[x] {
                *t = self.fresh();
            }
        }
        let sub = Sub::new(terms);
        for (x, a) in types.iter().enumerate() {
            if let Some(a) = a {
                let want = s.ctx.ty(x).subst(&sub);
                self.expect_ty(
                    ctx,
                    a,
                    &want,
                    &format!("the argument for {}", s.ctx.name(x)),
                )?;
            }
        }
        Ok(s.apply(&sub))
    }

    fn telescope(&mut self, tele: &[Binder]) -> Result<Context> {
        let mut ctx = Context::new();
        for b in tele {
            if self.el.env.contains(&b.name)
                || BUILTINS.contains(&b.name.as_str())
                || IH_NAMES.contains(&b.name.as_str())
            {
                return Err(err(
                    ErrorKind::Shadowing,
                    format!("{}: the variable {} shadows a declaration", b.span, b.name),
                ));
            }
            if ctx.lookup(&b.name).is_some() {
                return Err(err(
                    ErrorKind::DuplicateVariable,
                    format!("{}: variable {} is declared twice", b.span, b.name),
                ));
            }
            let ty = self.surface_type(&ctx, &b.ty)?;
            let ty = self.solved_ty(&ctx, &ty, &format!("the type of {}", b.name))?;
            ctx.push(b.name.clone(), ty);
        }
        Ok(ctx)
    }

    fn decl(&mut self, d: &SurfaceDecl) -> Result<Decl> {
        let ctx = self.telescope(&d.tele)?;
        match &d.body {
            SBody::Coh(a) => {
                let ty = self.surface_type(&ctx, a)?;
                let ty = self.solved_ty(&ctx, &ty, "the type")?;
                Ok(Decl::Coh(CohHead::new(Some(d.name.clone()), ctx, ty)))
            }
            SBody::Let(a, t) => {
                let (tm, ty) = match a {
                    Some(a) => {
                        let ty = self.surface_type(&ctx, a)?;
                        let ty = self.solved_ty(&ctx, &ty, "the type")?;
                        (self.check(&ctx, t, &ty)?, ty)
                    }
                    None => self.synth_known(&ctx, t)?,
                };
                let term = self.solved(&ctx, &tm, "the body")?;
                let ty = self.solved_ty(&ctx, &ty, "the type")?;
                Ok(Decl::Let { ctx, term, ty })
            }
            SBody::Inv(cs) => {
                let (comps, ty) = self.coind(&ctx, cs, None)?;
                Ok(Decl::Let {
                    ty: Type::inv(ty, comps[0].clone()),
                    term: Term::coind(comps),
                    ctx,
                })
            }
            SBody::Rec(cs) => {
                let n = ctx.len().saturating_sub(2) / 2;
                if n == 0 || ctx != walking_equiv(n) {
                    return Err(err(
                        ErrorKind::RecContext,
                        "the telescope of a rec must be a walking equivalence (x : *) (y : *) (f : x -> y) (e : Inv(f)) or a suspension of it",
                    ));
                }
                let (comps, _) = self.coind(&ctx, cs, Some(n))?;
                Ok(Decl::Rec {
                    schema: RecSchema::new(Some(d.name.clone()), n, comps),
                    ctx,
                })
            }
        }
    }

    /// The seven components of an `inv` or (with `rec = Some(n)`) a `rec`,
    /// and the type of the first.
    fn coind(
        &mut self,
        ctx: &Context,
        cs: &[STerm],
        rec: Option<usize>,
    ) -> Result<([Term; 7], Type)> {
        if cs.len() != 7 {
            return Err(err(
                ErrorKind::CoindArity,
                format!(
                    "an invertibility structure has 7 components, {} given",
                    cs.len()
                ),
            ));
        }
        let (t, ty) = self
            .synth_known(ctx, &cs[0])
            .map_err(|e| e.within("elaborating component 1"))?;
        let (t, ty) = (
            self.solved(ctx, &t, "component 1")?,
            self.solved_ty(ctx, &ty, "component 1")?,
        );
        let Type::Arr(b, u, v) = &ty else {
            return Err(err(
                ErrorKind::NotInvertible,
                "the first component must be a cell of positive dimension",
            ));
        };
        let rev = Type::Arr(b.clone(), v.clone(), u.clone());
        let mut comps = vec![t.clone()];
        for (k, ck) in cs.iter().enumerate().take(3).skip(1) {
            let c = self
                .check(ctx, ck, &rev)
                .map_err(|e| e.within(format!("elaborating component {}", k + 1)))?;
            comps.push(self.solved(ctx, &c, &format!("component {}", k + 1))?);
        }
        let cell = Typed::new(t.clone(), ty.clone());
        let l = Typed::new(comps[1].clone(), rev.clone());
        let r = Typed::new(comps[2].clone(), rev);
        let idv = id(&Typed::new(v.clone(), (**b).clone()));
        let idu = id(&Typed::new(u.clone(), (**b).clone()));
        let lc = comp(&[l, cell.clone()]);
        let rc = comp(&[cell, r]);
        let units = [
            Type::arr(lc.ty, lc.tm, idv.tm),
            Type::arr(rc.ty, rc.tm, idu.tm),
        ];
        for k in 3..5 {
            let c = self
                .check(ctx, &cs[k], &units[k - 3])
                .map_err(|e| e.within(format!("elaborating component {}", k + 1)))?;
            comps.push(self.solved(ctx, &c, &format!("component {}", k + 1))?);
        }
        let wctx = match rec {
            Some(n) => {
                let mut ind = equiv_ind_context(n, &t, &ty)?;
                for (x, e) in ctx.entries().iter().enumerate() {
                    ind.rename(x, e.name.clone());
                }
                ind
            }
            None => ctx.clone(),
        };
        for k in 5..7 {
            let want = Type::inv(units[k - 5].clone(), comps[k - 2].clone());
            let c = self
                .check(&wctx, &cs[k], &want)
                .map_err(|e| e.within(format!("elaborating component {}", k + 1)))?;
            comps.push(self.solved(&wctx, &c, &format!("component {}", k + 1))?);
        }
        Ok((comps.try_into().unwrap(), ty))
    }
}

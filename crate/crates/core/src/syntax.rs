//! Raw syntax of the theory: types, terms, contexts and substitutions.
//!
//! Variables are de Bruijn *levels*: `Var(i)` refers to the `i`-th entry of the
//! ambient context, counted from the left. Names are kept only for printing and
//! never take part in equality, so α-equivalent syntax is equal syntax.
//!
//! Substitutions are positional: a [`Sub`] for a codomain context `Θ` holds one
//! term per entry of `Θ`, in telescope order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use crate::error::SyntaxError;

pub type Level = usize;

/// Metavariables only ever appear during elaboration; the kernel rejects them.
pub type MetaId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Destructor {
    LInv,
    RInv,
    LUnit,
    RUnit,
    LWit,
    RWit,
}

impl Destructor {
    pub const ALL: [Destructor; 6] = [
        Destructor::LInv,
        Destructor::RInv,
        Destructor::LUnit,
        Destructor::RUnit,
        Destructor::LWit,
        Destructor::RWit,
    ];

    /// Surface spelling.
    pub fn keyword(self) -> &'static str {
        match self {
            Destructor::LInv => "linv",
            Destructor::RInv => "rinv",
            Destructor::LUnit => "lunit",
            Destructor::RUnit => "runit",
            Destructor::LWit => "ilunit",
            Destructor::RWit => "irunit",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Destructor> {
        Destructor::ALL.into_iter().find(|d| d.keyword() == s)
    }

    /// Index of the matching component in a `coind` tuple.
    pub fn component(self) -> usize {
        match self {
            Destructor::LInv => 1,
            Destructor::RInv => 2,
            Destructor::LUnit => 3,
            Destructor::RUnit => 4,
            Destructor::LWit => 5,
            Destructor::RWit => 6,
        }
    }

    /// Destructors producing an invertibility structure rather than a cell.
    pub fn is_witness(self) -> bool {
        matches!(self, Destructor::LWit | Destructor::RWit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Obj,
    Arr(Arc<Type>, Term, Term),
    Inv(Arc<Type>, Term),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Level),
    Meta(MetaId),
    Coh(Arc<CohHead>, Sub),
    Destr(Destructor, Arc<Term>),
    /// `coind(t, t_l, t_r, t_lu, t_ru, t_ilu, t_iru)`
    Coind(Arc<[Term; 7]>),
    /// `can(subject, {e_x})`, witnesses in telescope order of the subject's
    /// top-dimensional pasting-diagram variables.
    Can(Arc<Term>, Sub),
    Rec(Arc<RecSchema>, Sub),
}

/// Positional substitution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Sub(pub Arc<[Term]>);

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub ty: Type,
}

#[derive(Clone, Debug, Default)]
pub struct Context {
    entries: Vec<Entry>,
}

/// The pasting diagram and full type of a coherence. The name is cosmetic.
#[derive(Debug)]
pub struct CohHead {
    pub name: Option<String>,
    pub ctx: Context,
    pub ty: Type,
    susp: OnceLock<Arc<CohHead>>,
}

/// The seven components of a recursive definition over the walking
/// equivalence `E^n`; the last two live over the context extended with the
/// inductive hypotheses.
#[derive(Debug)]
pub struct RecSchema {
    pub name: Option<String>,
    /// `n` in `E^n`, at least 1.
    pub n: usize,
    pub comps: [Term; 7],
    susp: OnceLock<Arc<RecSchema>>,
}

impl PartialEq for CohHead {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.ty == other.ty
    }
}
impl Eq for CohHead {}
impl Hash for CohHead {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.hash(state);
        self.ty.hash(state);
    }
}

impl PartialEq for RecSchema {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.comps == other.comps
    }
}
impl Eq for RecSchema {}
impl Hash for RecSchema {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.comps.hash(state);
    }
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.ty == b.ty)
    }
}
impl Eq for Context {}
impl Hash for Context {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.entries.len().hash(state);
        for e in &self.entries {
            e.ty.hash(state);
        }
    }
}

impl CohHead {
    pub fn new(name: Option<String>, ctx: Context, ty: Type) -> Arc<CohHead> {
        Arc::new(CohHead {
            name,
            ctx,
            ty,
            susp: OnceLock::new(),
        })
    }

    pub fn suspended(self: &Arc<Self>) -> Arc<CohHead> {
        self.susp
            .get_or_init(|| CohHead::new(self.name.clone(), self.ctx.suspend(), self.ty.suspend()))
            .clone()
    }

    /// Applied to the identity substitution of its own context.
    pub fn generic(self: &Arc<Self>) -> Term {
        Term::Coh(self.clone(), Sub::identity(self.ctx.len()))
    }
}

impl RecSchema {
    pub fn new(name: Option<String>, n: usize, comps: [Term; 7]) -> Arc<RecSchema> {
        Arc::new(RecSchema {
            name,
            n,
            comps,
            susp: OnceLock::new(),
        })
    }

    pub fn suspended(self: &Arc<Self>) -> Arc<RecSchema> {
        self.susp
            .get_or_init(|| {
                RecSchema::new(
                    self.name.clone(),
                    self.n + 1,
                    self.comps.each_ref().map(|c| c.suspend()),
                )
            })
            .clone()
    }
}

impl Sub {
    pub fn new(terms: Vec<Term>) -> Sub {
        Sub(terms.into())
    }

    pub fn empty() -> Sub {
        Sub::new(Vec::new())
    }

    pub fn identity(len: usize) -> Sub {
        Sub::new((0..len).map(Term::Var).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn get(&self, i: Level) -> Option<&Term> {
        self.0.get(i)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Term> {
        self.0.iter()
    }

    pub fn to_vec(&self) -> Vec<Term> {
        self.0.to_vec()
    }

    /// `self ∘ other`: apply `other` to every term of `self`.
    pub fn compose(&self, other: &Sub) -> Sub {
        Substituter::new(other).sub(self)
    }

    pub fn extend(&self, more: impl IntoIterator<Item = Term>) -> Sub {
        let mut v = self.to_vec();
        v.extend(more);
        Sub::new(v)
    }

    pub fn suspend(&self) -> Sub {
        let mut v = Vec::with_capacity(self.len() + 2);
        v.push(Term::Var(0));
        v.push(Term::Var(1));
        v.extend(self.iter().map(Term::suspend));
        Sub::new(v)
    }

    pub fn map(&self, f: impl FnMut(&Term) -> Term) -> Sub {
        Sub::new(self.iter().map(f).collect())
    }
}

/// Applies one substitution, mapping each shared subterm once so that the
/// result keeps the sharing of the input.
struct Substituter<'a> {
    s: &'a Sub,
    subs: HashMap<*const Term, Sub>,
    terms: HashMap<*const Term, Arc<Term>>,
}

impl<'a> Substituter<'a> {
    fn new(s: &'a Sub) -> Substituter<'a> {
        Substituter {
            s,
            subs: HashMap::new(),
            terms: HashMap::new(),
        }
    }

    fn sub(&mut self, g: &Sub) -> Sub {
        if g.is_empty() {
            return g.clone();
        }
        let key = g.0.as_ptr();
        if let Some(r) = self.subs.get(&key) {
            return r.clone();
        }
        let r = Sub::new(g.iter().map(|t| self.term(t)).collect());
        self.subs.insert(key, r.clone());
        r
    }

    fn shared(&mut self, t: &Arc<Term>) -> Arc<Term> {
        let key = Arc::as_ptr(t);
        if let Some(r) = self.terms.get(&key) {
            return r.clone();
        }
        let r = Arc::new(self.term(t));
        self.terms.insert(key, r.clone());
        r
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(i) => match self.s.get(*i) {
                Some(t) => t.clone(),
                None => {
                    debug_assert!(
                        false,
                        "unbound variable {i} under substitution of length {}",
                        self.s.len()
                    );
                    Term::Var(*i)
                }
            },
            Term::Meta(m) => Term::Meta(*m),
            Term::Coh(h, g) => Term::Coh(h.clone(), self.sub(g)),
            Term::Destr(d, e) => Term::Destr(*d, self.shared(e)),
            Term::Coind(c) => Term::Coind(Arc::new(c.each_ref().map(|x| self.term(x)))),
            Term::Can(c, ws) => Term::Can(self.shared(c), self.sub(ws)),
            Term::Rec(r, g) => Term::Rec(r.clone(), self.sub(g)),
        }
    }
}

impl FromIterator<Term> for Sub {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Sub::new(iter.into_iter().collect())
    }
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn from_entries(entries: Vec<Entry>) -> Context {
        Context { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn ty(&self, x: Level) -> &Type {
        &self.entries[x].ty
    }

    pub fn name(&self, x: Level) -> &str {
        &self.entries[x].name
    }

    pub fn lookup(&self, name: &str) -> Option<Level> {
        self.entries.iter().rposition(|e| e.name == name)
    }

    pub fn push(&mut self, name: impl Into<String>, ty: Type) -> Level {
        self.entries.push(Entry {
            name: name.into(),
            ty,
        });
        self.entries.len() - 1
    }

    pub fn extended(&self, name: impl Into<String>, ty: Type) -> Context {
        let mut c = self.clone();
        c.push(name, ty);
        c
    }

    pub fn prefix(&self, len: usize) -> Context {
        Context {
            entries: self.entries[..len].to_vec(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn renamed(&self, names: &[String]) -> Context {
        Context {
            entries: self
                .entries
                .iter()
                .zip(names)
                .map(|(e, n)| Entry {
                    name: n.clone(),
                    ty: e.ty.clone(),
                })
                .collect(),
        }
    }

    pub fn rename(&mut self, x: Level, name: impl Into<String>) {
        self.entries[x].name = name.into();
    }

    /// `max` over entries of `dim A + 1`; `-1` when empty.
    pub fn dim(&self) -> i64 {
        self.entries
            .iter()
            .map(|e| e.ty.dim() + 1)
            .max()
            .unwrap_or(-1)
    }

    pub fn is_catt(&self) -> bool {
        self.entries.iter().all(|e| e.ty.is_catt())
    }

    /// Prepends two fresh objects; names avoid every existing name.
    pub fn suspend(&self) -> Context {
        let (lo, hi) = fresh_suspension_names(self);
        let mut entries = Vec::with_capacity(self.len() + 2);
        entries.push(Entry {
            name: lo,
            ty: Type::Obj,
        });
        entries.push(Entry {
            name: hi,
            ty: Type::Obj,
        });
        entries.extend(self.entries.iter().map(|e| Entry {
            name: e.name.clone(),
            ty: e.ty.suspend(),
        }));
        Context { entries }
    }

    /// Dimension of the term variable `x`.
    pub fn var_dim(&self, x: Level) -> i64 {
        self.ty(x).dim() + 1
    }

    /// Variables of dimension exactly `d`, in telescope order.
    pub fn vars_of_dim(&self, d: i64) -> Vec<Level> {
        (0..self.len()).filter(|&x| self.var_dim(x) == d).collect()
    }
}

fn fresh_suspension_names(ctx: &Context) -> (String, String) {
    let taken = |s: &str| ctx.entries.iter().any(|e| e.name == s);
    let mut i = 0;
    loop {
        let lo = format!("vm{i}");
        let hi = format!("vp{i}");
        if !taken(&lo) && !taken(&hi) {
            return (lo, hi);
        }
        i += 1;
    }
}

impl Type {
    pub fn arr(base: Type, src: Term, tgt: Term) -> Type {
        Type::Arr(Arc::new(base), src, tgt)
    }

    pub fn inv(base: Type, subject: Term) -> Type {
        Type::Inv(Arc::new(base), subject)
    }

    /// `dim ⋆ = -1`, every arrow or `Inv` layer adds one.
    pub fn dim(&self) -> i64 {
        match self {
            Type::Obj => -1,
            Type::Arr(a, _, _) | Type::Inv(a, _) => a.dim() + 1,
        }
    }

    pub fn is_categorical(&self) -> bool {
        !matches!(self, Type::Inv(..))
    }

    pub fn is_catt(&self) -> bool {
        match self {
            Type::Obj => true,
            Type::Arr(a, u, v) => a.is_catt() && u.is_catt() && v.is_catt(),
            Type::Inv(..) => false,
        }
    }

    pub fn subst(&self, s: &Sub) -> Type {
        match self {
            Type::Obj => Type::Obj,
            Type::Arr(a, u, v) => Type::arr(a.subst(s), u.subst(s), v.subst(s)),
            Type::Inv(a, t) => Type::inv(a.subst(s), t.subst(s)),
        }
    }

    pub fn checked_subst(&self, s: &Sub) -> Result<Type, SyntaxError> {
        if let Some(x) = self.max_var() {
            if x >= s.len() {
                return Err(SyntaxError::UnboundVariable {
                    level: x,
                    len: s.len(),
                });
            }
        }
        Ok(self.subst(s))
    }

    pub fn suspend(&self) -> Type {
        match self {
            Type::Obj => Type::arr(Type::Obj, Term::Var(0), Term::Var(1)),
            Type::Arr(a, u, v) => Type::arr(a.suspend(), u.suspend(), v.suspend()),
            Type::Inv(a, t) => Type::inv(a.suspend(), t.suspend()),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Level>) {
        match self {
            Type::Obj => {}
            Type::Arr(a, u, v) => {
                a.collect_vars(out);
                u.collect_vars(out);
                v.collect_vars(out);
            }
            Type::Inv(a, t) => {
                a.collect_vars(out);
                t.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Level> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn max_var(&self) -> Option<Level> {
        self.vars().last().copied()
    }

    pub fn has_metas(&self) -> bool {
        match self {
            Type::Obj => false,
            Type::Arr(a, u, v) => a.has_metas() || u.has_metas() || v.has_metas(),
            Type::Inv(a, t) => a.has_metas() || t.has_metas(),
        }
    }

    /// Source and target of an arrow type.
    pub fn boundary(&self) -> Option<(&Type, &Term, &Term)> {
        match self {
            Type::Arr(a, u, v) => Some((a, u, v)),
            _ => None,
        }
    }
}

impl Term {
    pub fn destr(d: Destructor, t: Term) -> Term {
        Term::Destr(d, Arc::new(t))
    }

    pub fn coind(comps: [Term; 7]) -> Term {
        Term::Coind(Arc::new(comps))
    }

    pub fn can(subject: Term, witnesses: Vec<Term>) -> Term {
        Term::Can(Arc::new(subject), Sub::new(witnesses))
    }

    pub fn subst(&self, s: &Sub) -> Term {
        Substituter::new(s).term(self)
    }

    pub fn checked_subst(&self, s: &Sub) -> Result<Term, SyntaxError> {
        if let Some(x) = self.vars().last().copied() {
            if x >= s.len() {
                return Err(SyntaxError::UnboundVariable {
                    level: x,
                    len: s.len(),
                });
            }
        }
        Ok(self.subst(s))
    }

    pub fn suspend(&self) -> Term {
        match self {
            Term::Var(i) => Term::Var(i + 2),
            Term::Meta(m) => Term::Meta(*m),
            Term::Coh(h, g) => Term::Coh(h.suspended(), g.suspend()),
            Term::Destr(d, t) => Term::destr(*d, t.suspend()),
            Term::Coind(c) => Term::Coind(Arc::new(c.each_ref().map(|t| t.suspend()))),
            Term::Can(t, ws) => Term::Can(Arc::new(t.suspend()), ws.map(Term::suspend)),
            Term::Rec(r, g) => Term::Rec(r.suspended(), g.suspend()),
        }
    }

    /// Free variables, including those inside coherence substitutions,
    /// witness families and recursive-call substitutions.
    pub fn collect_vars(&self, out: &mut BTreeSet<Level>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::Meta(_) => {}
            Term::Coh(_, g) | Term::Rec(_, g) => g.iter().for_each(|t| t.collect_vars(out)),
            Term::Destr(_, t) => t.collect_vars(out),
            Term::Coind(c) => c.iter().for_each(|t| t.collect_vars(out)),
            Term::Can(t, ws) => {
                t.collect_vars(out);
                ws.iter().for_each(|w| w.collect_vars(out));
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Level> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn has_metas(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Meta(_) => true,
            Term::Coh(_, g) | Term::Rec(_, g) => g.iter().any(Term::has_metas),
            Term::Destr(_, t) => t.has_metas(),
            Term::Coind(c) => c.iter().any(Term::has_metas),
            Term::Can(t, ws) => t.has_metas() || ws.iter().any(Term::has_metas),
        }
    }

    /// True when the term lies in the CaTT fragment: variables and coherences.
    pub fn is_catt(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Coh(h, g) => h.ctx.is_catt() && h.ty.is_catt() && g.iter().all(Term::is_catt),
            _ => false,
        }
    }

    /// Number of syntax nodes, sharing not taken into account.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Meta(_) => 1,
            Term::Coh(_, g) | Term::Rec(_, g) => 1 + g.iter().map(Term::size).sum::<usize>(),
            Term::Destr(_, t) => 1 + t.size(),
            Term::Coind(c) => 1 + c.iter().map(Term::size).sum::<usize>(),
            Term::Can(t, ws) => 1 + t.size() + ws.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Calls `f` on this term and every subterm, parents first. Coherence
    /// and recursion bodies live in other contexts and are not entered.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Var(_) | Term::Meta(_) => {}
            Term::Coh(_, g) | Term::Rec(_, g) => g.iter().for_each(|t| t.visit(f)),
            Term::Destr(_, t) => t.visit(f),
            Term::Coind(c) => c.iter().for_each(|t| t.visit(f)),
            Term::Can(t, ws) => {
                t.visit(f);
                ws.iter().for_each(|w| w.visit(f));
            }
        }
    }

    pub fn as_var(&self) -> Option<Level> {
        match self {
            Term::Var(i) => Some(*i),
            _ => None,
        }
    }
}

/// Variables used by a term or type, closed downwards under the types of the
/// context: a variable counts as used when some used variable's type
/// mentions it.
pub fn closure_in(ctx: &Context, seeds: BTreeSet<Level>) -> BTreeSet<Level> {
    let mut out = seeds;
    let mut stack: Vec<Level> = out.iter().copied().collect();
    while let Some(x) = stack.pop() {
        if x >= ctx.len() {
            continue;
        }
        for y in ctx.ty(x).vars() {
            if out.insert(y) {
                stack.push(y);
            }
        }
    }
    out
}

impl fmt::Display for Destructor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

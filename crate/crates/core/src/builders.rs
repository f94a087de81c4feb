//! Constructions of distinguished coherences: identities, unbiased
//! composites of pasting diagrams, binary and n-ary composition, and the
//! typing table of the destructors (which mentions composites and
//! identities).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::meta::{classify_term, classify_type};
use crate::ps::{Node, PsTree};
use crate::syntax::{CohHead, Context, Destructor, Level, Sub, Term, Type};

/// A term together with its type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typed {
    pub tm: Term,
    pub ty: Type,
}

impl Typed {
    pub fn new(tm: Term, ty: Type) -> Typed {
        Typed { tm, ty }
    }

    pub fn var(ctx: &Context, x: Level) -> Typed {
        Typed::new(Term::Var(x), ctx.ty(x).clone())
    }

    pub fn src(&self) -> &Term {
        match &self.ty {
            Type::Arr(_, s, _) => s,
            _ => panic!("source of a non-arrow"),
        }
    }

    pub fn tgt(&self) -> &Term {
        match &self.ty {
            Type::Arr(_, _, t) => t,
            _ => panic!("target of a non-arrow"),
        }
    }

    pub fn base(&self) -> &Type {
        match &self.ty {
            Type::Arr(b, _, _) | Type::Inv(b, _) => b,
            Type::Obj => panic!("base of an object type"),
        }
    }

    pub fn dim(&self) -> i64 {
        self.ty.dim() + 1
    }

    pub fn subst(&self, s: &Sub) -> Typed {
        Typed::new(self.tm.subst(s), self.ty.subst(s))
    }
}

fn id_base() -> &'static Arc<CohHead> {
    static ID: OnceLock<Arc<CohHead>> = OnceLock::new();
    ID.get_or_init(|| {
        let mut ctx = Context::new();
        ctx.push("x", Type::Obj);
        CohHead::new(
            Some("id".into()),
            ctx,
            Type::arr(Type::Obj, Term::Var(0), Term::Var(0)),
        )
    })
}

/// The identity coherence suspended `k` times; its context is `D^k`.
pub fn id_head(k: usize) -> Arc<CohHead> {
    let mut h = id_base().clone();
    for _ in 0..k {
        h = h.suspended();
    }
    h
}

/// `id x` for a cell `x` of any dimension.
pub fn id(x: &Typed) -> Typed {
    let k = x.dim() as usize;
    let sub = classify_term(&x.tm, &x.ty);
    Typed::new(
        Term::Coh(id_head(k), sub),
        Type::arr(x.ty.clone(), x.tm.clone(), x.tm.clone()),
    )
}

struct UcompEntry {
    ctx: Context,
    root: Node,
    cell: Typed,
}

fn ucomp_cache() -> &'static Mutex<HashMap<PsTree, Arc<UcompEntry>>> {
    static CACHE: OnceLock<Mutex<HashMap<PsTree, Arc<UcompEntry>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Inclusion of the source (`target = false`) or target boundary of `tree`
/// truncated at depth `d`, as a substitution from the canonical context of
/// `tree` to that of `tree.truncate(d)`.
pub fn boundary_inclusion(tree: &PsTree, d: usize, target: bool) -> Sub {
    let (_, root) = tree.layout();
    let (tctx, troot) = tree.truncate(d).layout();
    let mut out = vec![0; tctx.len()];
    include(&troot, &root, d, target, &mut out);
    Sub::new(out.into_iter().map(Term::Var).collect())
}

fn include(small: &Node, big: &Node, d: usize, target: bool, out: &mut [Level]) {
    if d == 0 {
        out[small.own] = if target { big.last_vertex() } else { big.own };
        return;
    }
    out[small.own] = big.own;
    for (a, b) in small.ys.iter().zip(&big.ys) {
        out[*a] = *b;
    }
    for (a, b) in small.children.iter().zip(&big.children) {
        include(a, b, d - 1, target, out);
    }
}

fn ucomp_entry(tree: &PsTree) -> Arc<UcompEntry> {
    if let Some(e) = ucomp_cache().lock().unwrap().get(tree) {
        return e.clone();
    }
    let (ctx, root) = tree.layout();
    let cell = if tree.is_path() {
        let top = ctx.len() - 1;
        Typed::var(&ctx, top)
    } else {
        let d = tree.dim() - 1;
        let bd = ucomp_entry(&tree.truncate(d));
        let src = bd.cell.subst(&boundary_inclusion(tree, d, false));
        let tgt = bd.cell.subst(&boundary_inclusion(tree, d, true));
        let ty = Type::arr(src.ty.clone(), src.tm, tgt.tm);
        let head = CohHead::new(Some("comp".into()), ctx.clone(), ty.clone());
        Typed::new(head.generic(), ty)
    };
    let entry = Arc::new(UcompEntry { ctx, root, cell });
    ucomp_cache()
        .lock()
        .unwrap()
        .insert(tree.clone(), entry.clone());
    entry
}

/// The unbiased composite of a pasting diagram, over its canonical context.
pub fn ucomp(tree: &PsTree) -> Typed {
    ucomp_entry(tree).cell.clone()
}

pub fn ucomp_layout(tree: &PsTree) -> (Context, Node) {
    let e = ucomp_entry(tree);
    (e.ctx.clone(), e.root.clone())
}

/// Composite of a chain of `n ≥ 1` composable cells of equal dimension.
/// A single cell is its own composite.
pub fn comp(args: &[Typed]) -> Typed {
    assert!(!args.is_empty(), "empty composite");
    if args.len() == 1 {
        return args[0].clone();
    }
    let (base, first_src, _) = args[0].ty.boundary().expect("composite of non-arrows");
    let k = (base.dim() + 1) as usize;
    let cell = ucomp(&PsTree::chain(args.len(), k));
    let head = match &cell.tm {
        Term::Coh(h, _) => h.clone(),
        _ => unreachable!("chains of length ≥ 2 compose to a coherence"),
    };
    let mut sub = classify_type(base).to_vec();
    sub.push(first_src.clone());
    for a in args {
        sub.push(a.tgt().clone());
        sub.push(a.tm.clone());
    }
    let last_tgt = args.last().unwrap().tgt().clone();
    Typed::new(
        Term::Coh(head, Sub::new(sub)),
        Type::arr(base.clone(), first_src.clone(), last_tgt),
    )
}

pub fn comp2(a: &Typed, b: &Typed) -> Typed {
    comp(&[a.clone(), b.clone()])
}

/// Fills a substitution into `ctx` from the images of some of its variables
/// by propagating sources and targets read off the images' types. Variables
/// are processed from the right so that every image is known before its
/// boundary is read.
pub fn fill_from_types(ctx: &Context, mut known: Vec<Option<Typed>>) -> Option<Sub> {
    known.resize(ctx.len(), None);
    for x in (0..ctx.len()).rev() {
        let Some(img) = known[x].clone() else {
            continue;
        };
        let mut cty = ctx.ty(x).clone();
        let mut ity = img.ty.clone();
        while let (Type::Arr(ca, Term::Var(s), Term::Var(t)), Type::Arr(ia, is, it)) = (&cty, &ity)
        {
            {
                let ia_ty = (**ia).clone();
                if known[*s].is_none() {
                    known[*s] = Some(Typed::new(is.clone(), ia_ty.clone()));
                }
                if known[*t].is_none() {
                    known[*t] = Some(Typed::new(it.clone(), ia_ty.clone()));
                }
                let next = ((**ca).clone(), ia_ty);
                cty = next.0;
                ity = next.1;
            }
        }
    }
    known
        .into_iter()
        .map(|k| k.map(|t| t.tm))
        .collect::<Option<Vec<_>>>()
        .map(Sub::new)
}

/// Applies a coherence to the images of its locally maximal variables.
pub fn apply_head(head: &Arc<CohHead>, maximal: &[(Level, Typed)]) -> Option<Typed> {
    let mut known = vec![None; head.ctx.len()];
    for (x, t) in maximal {
        known[*x] = Some(t.clone());
    }
    let sub = fill_from_types(&head.ctx, known)?;
    Some(Typed::new(
        Term::Coh(head.clone(), sub.clone()),
        head.ty.subst(&sub),
    ))
}

/// The type a destructor assigns, given its argument and the argument's type
/// `Inv(u →_B v, t)`.
pub fn destructor_type(d: Destructor, e: &Term, e_ty: &Type) -> Option<Type> {
    let Type::Inv(base, t) = e_ty else {
        return None;
    };
    let Type::Arr(b, u, v) = &**base else {
        return None;
    };
    let b = (**b).clone();
    let cell = Typed::new(t.clone(), (**base).clone());
    let rev = Type::arr(b.clone(), v.clone(), u.clone());
    let lunit = || {
        let l = Typed::new(Term::destr(Destructor::LInv, e.clone()), rev.clone());
        let idv = id(&Typed::new(v.clone(), b.clone()));
        Type::arr(idv.ty.clone(), comp2(&l, &cell).tm, idv.tm)
    };
    let runit = || {
        let r = Typed::new(Term::destr(Destructor::RInv, e.clone()), rev.clone());
        let idu = id(&Typed::new(u.clone(), b.clone()));
        Type::arr(idu.ty.clone(), comp2(&cell, &r).tm, idu.tm)
    };
    Some(match d {
        Destructor::LInv | Destructor::RInv => rev,
        Destructor::LUnit => lunit(),
        Destructor::RUnit => runit(),
        Destructor::LWit => Type::inv(lunit(), Term::destr(Destructor::LUnit, e.clone())),
        Destructor::RWit => Type::inv(runit(), Term::destr(Destructor::RUnit, e.clone())),
    })
}

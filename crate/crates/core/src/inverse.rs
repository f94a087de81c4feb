//! Inverses and cancellators of coherence cells.
//!
//! For a coherence `t = coh_{Γ, u → v}[γ]` of dimension `m`, every
//! destructor applied to `can(t, {e_x})` computes to a term built here. When
//! `dim Γ < m` the type can simply be reversed. When `dim Γ = m` the inverse
//! is the opposite coherence applied to the chosen-side inverses of the top
//! cells, and the cancellator is a four-step composite:
//!
//! 1. a coherence `α` over `Γ̄` glued to `Γ`, regrouping `t^L · t` into a
//!    nest `W̄_k · (… (W̄_1 · W_1) …) · W_k` of whiskered top cells, framed by
//!    coherences `κ`, `κ'` between `v` and the composite of the target
//!    boundary;
//! 2. the cancellation `Z_k` of the nest, built inductively from the unit
//!    cells `LUnit(e_x)` whiskered into place;
//! 3. a unitor removing the identity left in the middle;
//! 4. a coherence cancelling `κ · κ'`.
//!
//! Results are first computed once per coherence over the context
//! `Γ, (e_x : Inv(x))` and then instantiated, so they commute with
//! substitution by construction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::builders::{apply_head, comp, id, ucomp, Typed};
use crate::error::{Error, ErrorKind, Result};
use crate::meta::op_ps;
use crate::ps::{check_ps, Node, PsContext, PsTree};
use crate::syntax::{CohHead, Context, Destructor, Level, Sub, Term, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn inv(self) -> Destructor {
        match self {
            Side::Left => Destructor::LInv,
            Side::Right => Destructor::RInv,
        }
    }
    fn unit(self) -> Destructor {
        match self {
            Side::Left => Destructor::LUnit,
            Side::Right => Destructor::RUnit,
        }
    }
    fn wit(self) -> Destructor {
        match self {
            Side::Left => Destructor::LWit,
            Side::Right => Destructor::RWit,
        }
    }
}

type TemplateKey = (Arc<CohHead>, Destructor);

/// `κ`, `κ'`, `ε` and the vertex choice they were built for.
type FrameHeads = (Arc<CohHead>, Arc<CohHead>, Arc<CohHead>, Vec<usize>);

fn templates() -> &'static Mutex<HashMap<TemplateKey, Term>> {
    static CACHE: OnceLock<Mutex<HashMap<TemplateKey, Term>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Number of top-dimensional variables a `can` on this coherence needs
/// witnesses for: those of dimension `dim A + 1`.
pub fn witness_vars(head: &CohHead) -> Vec<Level> {
    let m = head.ty.dim() + 1;
    head.ctx.vars_of_dim(m)
}

/// The computation rule of a destructor on `can(subject, ws)`.
pub fn canonical_component(subject: &Term, ws: &Sub, d: Destructor) -> Result<Term> {
    let Term::Coh(h, g) = subject else {
        return Err(Error::new(
            ErrorKind::CanWitness,
            "the subject of can must be a coherence",
        ));
    };
    let expected = witness_vars(h).len();
    if ws.len() != expected {
        return Err(Error::new(
            ErrorKind::CanWitness,
            format!("expected {expected} witnesses, found {}", ws.len()),
        ));
    }
    let tpl = template(h, d)?;
    Ok(tpl.subst(&g.extend(ws.iter().cloned())))
}

/// Left or right inverse of `coh_{Γ,A}[γ]` given witnesses for its top cells.
pub fn coh_inverse(head: &Arc<CohHead>, gamma: &Sub, side: Side, ws: &Sub) -> Result<Term> {
    let subject = Term::Coh(head.clone(), gamma.clone());
    canonical_component(&subject, ws, side.inv())
}

/// Left or right cancellator of `coh_{Γ,A}[γ]`.
pub fn coh_cancellator(head: &Arc<CohHead>, gamma: &Sub, side: Side, ws: &Sub) -> Result<Term> {
    let subject = Term::Coh(head.clone(), gamma.clone());
    canonical_component(&subject, ws, side.unit())
}

/// `γ^L` / `γ^R`: the substitution out of the reordered opposite `Γ̄`
/// agreeing with `γ` below dimension `n` and sending each `n`-cell to the
/// chosen-side inverse of its witness. Below dimension `n` nothing changes.
pub fn gamma_inverse(
    ps: &PsContext,
    n: usize,
    gamma: &Sub,
    side: Side,
    ws: &Sub,
) -> Result<(Context, Sub)> {
    if ps.dim() < n {
        return Ok((ps.ctx.clone(), gamma.clone()));
    }
    let tops = ps.ctx.vars_of_dim(n as i64);
    if ws.len() != tops.len() {
        return Err(Error::new(
            ErrorKind::CanWitness,
            format!("expected {} witnesses, found {}", tops.len(), ws.len()),
        ));
    }
    let (bar, label) = op_ps(n, ps);
    let sub = label
        .iter()
        .map(|&x| match tops.iter().position(|&y| y == x) {
            Some(i) => Term::destr(side.inv(), ws.terms()[i].clone()),
            None => gamma.terms()[x].clone(),
        })
        .collect();
    Ok((bar, sub))
}

fn template(h: &Arc<CohHead>, d: Destructor) -> Result<Term> {
    let key = (h.clone(), d);
    if let Some(t) = templates().lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let t = build_template(h, d)?;
    templates().lock().unwrap().insert(key, t.clone());
    Ok(t)
}

fn build_template(h: &Arc<CohHead>, d: Destructor) -> Result<Term> {
    let ps = check_ps(&h.ctx)?;
    let Type::Arr(..) = &h.ty else {
        return Err(Error::new(
            ErrorKind::NotInvertible,
            "coherence of object type",
        ));
    };
    let m = (h.ty.dim() + 1) as usize;
    if ps.dim() < m {
        return Ok(simple_template(h, d));
    }
    let frame = Frame::new(h.clone(), ps, m)?;
    let side = match d {
        Destructor::LInv | Destructor::LUnit | Destructor::LWit => Side::Left,
        _ => Side::Right,
    };
    let b = Build { f: &frame, side };
    Ok(match d {
        Destructor::LInv | Destructor::RInv => b.inverse().tm,
        Destructor::LUnit | Destructor::RUnit => b.cancellator()?.0.tm,
        Destructor::LWit | Destructor::RWit => b.cancellator()?.1,
    })
}

fn simple_template(h: &Arc<CohHead>, d: Destructor) -> Term {
    let Type::Arr(b, u, v) = &h.ty else {
        unreachable!()
    };
    let b = (**b).clone();
    let rev = CohHead::new(
        None,
        h.ctx.clone(),
        Type::arr(b.clone(), v.clone(), u.clone()),
    );
    let t0 = Typed::new(h.generic(), h.ty.clone());
    let t0r = Typed::new(rev.generic(), rev.ty.clone());
    let unit = |left: bool| {
        let (c, e) = if left {
            (
                comp(&[t0r.clone(), t0.clone()]),
                id(&Typed::new(v.clone(), b.clone())),
            )
        } else {
            (
                comp(&[t0.clone(), t0r.clone()]),
                id(&Typed::new(u.clone(), b.clone())),
            )
        };
        CohHead::new(None, h.ctx.clone(), Type::arr(c.ty, c.tm, e.tm)).generic()
    };
    match d {
        Destructor::LInv | Destructor::RInv => rev.generic(),
        Destructor::LUnit => unit(true),
        Destructor::RUnit => unit(false),
        Destructor::LWit => Term::can(unit(true), vec![]),
        Destructor::RWit => Term::can(unit(false), vec![]),
    }
}

struct Top {
    x: Level,
    node: usize,
    child: usize,
}

/// Everything about `Γ` the construction needs: its depth-`(m-1)` nodes, the
/// top cells in telescope order, and the truncation below the top cells.
struct Frame {
    head: Arc<CohHead>,
    ps: PsContext,
    m: usize,
    nodes: Vec<Node>,
    tops: Vec<Top>,
    trunc: PsTree,
    trunc_root: Node,
    whisker_heads: Vec<(Arc<CohHead>, Node)>,
}

/// Pairs of matching variables above depth `d`, and the matching nodes at
/// depth `d` in left-to-right order.
fn walk<'a, 'b>(
    a: &'a Node,
    b: &'b Node,
    d: usize,
    pairs: &mut Vec<(Level, Level)>,
    nodes: &mut Vec<(&'a Node, &'b Node)>,
) {
    if d == 0 {
        nodes.push((a, b));
        return;
    }
    pairs.push((a.own, b.own));
    pairs.extend(a.ys.iter().copied().zip(b.ys.iter().copied()));
    for (ca, cb) in a.children.iter().zip(&b.children) {
        walk(ca, cb, d - 1, pairs, nodes);
    }
}

fn extend_at(t: &PsTree, d: usize, j: &mut usize, target: usize, extra: &[PsTree]) -> PsTree {
    if d == 0 {
        let r = if *j == target {
            PsTree::new(extra.to_vec())
        } else {
            PsTree::point()
        };
        *j += 1;
        return r;
    }
    PsTree::new(
        t.children
            .iter()
            .map(|c| extend_at(c, d - 1, j, target, extra))
            .collect(),
    )
}

/// Images of the variables of `Γ` on one side of a construction: `base`
/// covers every variable below the top cells, `cells` the top cells (in
/// telescope order) or their inverses.
#[derive(Clone)]
struct Images {
    base: Vec<Term>,
    cells: Vec<Typed>,
}

impl Frame {
    fn new(head: Arc<CohHead>, ps: PsContext, m: usize) -> Result<Frame> {
        let nodes: Vec<Node> = ps.root.at_depth(m - 1).into_iter().cloned().collect();
        let mut tops = Vec::new();
        for (j, n) in nodes.iter().enumerate() {
            for (c, ch) in n.children.iter().enumerate() {
                tops.push(Top {
                    x: ch.own,
                    node: j,
                    child: c,
                });
            }
        }
        tops.sort_by_key(|t| t.x);
        let trunc = ps.tree.truncate(m - 1);
        let (_, trunc_root) = trunc.layout();
        let mut f = Frame {
            head,
            ps,
            m,
            nodes,
            tops,
            trunc,
            trunc_root,
            whisker_heads: Vec::new(),
        };
        f.whisker_heads = (0..f.nodes.len()).map(|j| f.whisker_head(j)).collect();
        Ok(f)
    }

    fn glen(&self) -> usize {
        self.ps.ctx.len()
    }

    fn s(&self, i: usize) -> Level {
        let t = &self.tops[i];
        self.nodes[t.node].vertex(t.child)
    }

    fn t(&self, i: usize) -> Level {
        let t = &self.tops[i];
        self.nodes[t.node].vertex(t.child + 1)
    }

    fn top_index(&self, j: usize, c: usize) -> usize {
        self.tops
            .iter()
            .position(|t| t.node == j && t.child == c)
            .unwrap()
    }

    /// Vertex choice after the first `i` top cells have been traversed.
    fn state(&self, i: usize) -> Vec<usize> {
        let mut p = vec![0; self.nodes.len()];
        for t in &self.tops[..i] {
            p[t.node] += 1;
        }
        p
    }

    fn shape_with(&self, j: usize, extra: &[PsTree]) -> PsTree {
        extend_at(&self.trunc, self.m - 1, &mut 0, j, extra)
    }

    /// Fills the variables of a shape agreeing with `Γ` below depth `m-1`:
    /// lower variables from `base`, and each depth-`(m-1)` node `j'` other than
    /// `special` sent to its vertex chosen by `choice`.
    fn fill_shape(
        &self,
        shape_root: &Node,
        len: usize,
        base: &[Term],
        choice: &[usize],
        special: Option<usize>,
    ) -> (Vec<Option<Term>>, Option<Node>) {
        let mut pairs = Vec::new();
        let mut nodes = Vec::new();
        walk(
            shape_root,
            &self.ps.root,
            self.m - 1,
            &mut pairs,
            &mut nodes,
        );
        let mut out = vec![None; len];
        for (a, b) in pairs {
            out[a] = Some(base[b].clone());
        }
        let mut sp = None;
        for (j, (a, b)) in nodes.into_iter().enumerate() {
            if Some(j) == special {
                sp = Some(a.clone());
            } else {
                out[a.own] = Some(base[b.vertex(choice[j])].clone());
            }
        }
        (out, sp)
    }

    /// Substitution into the truncation picking, at each node, the vertex
    /// given by `choice`.
    fn trunc_images(&self, base: &[Term], choice: &[usize]) -> Sub {
        let len = self.trunc.size();
        let (out, _) = self.fill_shape(&self.trunc_root, len, base, choice, None);
        Sub::new(out.into_iter().map(Option::unwrap).collect())
    }

    /// `U → V` over `P_j`: the truncation with one top cell at node `j`.
    fn whisker_head(&self, j: usize) -> (Arc<CohHead>, Node) {
        let tree = self.shape_with(j, &[PsTree::point()]);
        let (ctx, root) = tree.layout();
        let c = ucomp(&self.trunc);
        let incl = |tgt: bool| {
            let mut pairs = Vec::new();
            let mut nodes = Vec::new();
            walk(&self.trunc_root, &root, self.m - 1, &mut pairs, &mut nodes);
            let mut out = vec![0; self.trunc.size()];
            for (a, b) in pairs {
                out[a] = b;
            }
            for (jj, (a, b)) in nodes.into_iter().enumerate() {
                out[a.own] = if jj == j && tgt { b.ys[0] } else { b.own };
            }
            Sub::new(out.into_iter().map(Term::Var).collect())
        };
        let src = c.subst(&incl(false));
        let tgt = c.tm.subst(&incl(true));
        let head = CohHead::new(Some("whisk".into()), ctx, Type::arr(src.ty, src.tm, tgt));
        (head, root)
    }

    /// The `i`-th top position whiskered: the cell `cell : src → tgt` placed
    /// at the node of top cell `i`, every other node at its `choice` vertex.
    fn whisker(
        &self,
        i: usize,
        base: &[Term],
        choice: &[usize],
        src: Term,
        tgt: Term,
        cell: Term,
    ) -> Typed {
        let j = self.tops[i].node;
        let (head, root) = &self.whisker_heads[j];
        let (mut out, sp) = self.fill_shape(root, head.ctx.len(), base, choice, Some(j));
        let sp = sp.unwrap();
        out[sp.own] = Some(src);
        out[sp.ys[0]] = Some(tgt);
        out[sp.children[0].own] = Some(cell);
        let sub = Sub::new(out.into_iter().map(Option::unwrap).collect());
        Typed::new(Term::Coh(head.clone(), sub.clone()), head.ty.subst(&sub))
    }

    /// `W_i` on a side whose cells go forwards.
    fn w(&self, i: usize, im: &Images) -> Typed {
        self.whisker(
            i,
            &im.base,
            &self.state(i),
            im.base[self.s(i)].clone(),
            im.base[self.t(i)].clone(),
            im.cells[i].tm.clone(),
        )
    }

    /// `W̄_i` on a side whose cells are inverses.
    fn wbar(&self, i: usize, im: &Images) -> Typed {
        self.whisker(
            i,
            &im.base,
            &self.state(i),
            im.base[self.t(i)].clone(),
            im.base[self.s(i)].clone(),
            im.cells[i].tm.clone(),
        )
    }

    /// Renaming of the variables of `Γ` into the truncation at the vertex
    /// choice `choice`, defined on the boundary it picks.
    fn trunc_renaming(&self, choice: &[usize]) -> Vec<Option<Term>> {
        let ids: Vec<Term> = (0..self.glen()).map(Term::Var).collect();
        let img = self.trunc_images(&ids, choice);
        let mut out = vec![None; self.glen()];
        for (q, t) in img.iter().enumerate() {
            out[t.as_var().unwrap()] = Some(Term::Var(q));
        }
        out
    }
}

struct Build<'a> {
    f: &'a Frame,
    side: Side,
}

fn pick(partial: &[Option<Term>], t: &Term) -> Option<Sub> {
    if t.vars().iter().any(|&x| partial[x].is_none()) {
        return None;
    }
    Some(Sub::new(
        partial
            .iter()
            .map(|o| o.clone().unwrap_or(Term::Var(0)))
            .collect(),
    ))
}

/// Base coherences composed by the cancellator, over their base pasting
/// diagrams: `whisk3 : comp f g k → comp f h k` for `a : g → h`, and
/// `unit3 : comp f (id y) g → comp f g`.
fn whisk3_base() -> &'static Arc<CohHead> {
    static H: OnceLock<Arc<CohHead>> = OnceLock::new();
    H.get_or_init(|| {
        let tree = PsTree::new(vec![PsTree::point(), PsTree::disk(1), PsTree::point()]);
        let (ctx, _) = tree.layout();
        let v = |x| Typed::var(&ctx, x);
        let src = comp(&[v(2), v(4), v(8)]);
        let tgt = comp(&[v(2), v(5), v(8)]);
        CohHead::new(
            Some("whisk3".into()),
            ctx.clone(),
            Type::arr(src.ty, src.tm, tgt.tm),
        )
    })
}

fn unit3_base() -> &'static Arc<CohHead> {
    static H: OnceLock<Arc<CohHead>> = OnceLock::new();
    H.get_or_init(|| {
        let (ctx, _) = PsTree::chain(2, 0).layout();
        let v = |x| Typed::var(&ctx, x);
        let src = comp(&[v(2), id(&v(1)), v(4)]);
        let tgt = comp(&[v(2), v(4)]);
        CohHead::new(
            Some("unit3".into()),
            ctx.clone(),
            Type::arr(src.ty, src.tm, tgt.tm),
        )
    })
}

fn suspended(h: &Arc<CohHead>, k: usize) -> Arc<CohHead> {
    (0..k).fold(h.clone(), |h, _| h.suspended())
}

/// `f ∗ a ∗ k` for cells `f, k` of dimension `m` and `a` of dimension `m+1`.
fn whisk3(f: &Typed, a: &Typed, k: &Typed) -> Typed {
    let s = (f.dim() - 1) as usize;
    let off = 2 * s;
    let h = suspended(whisk3_base(), s);
    apply_head(
        &h,
        &[
            (off + 2, f.clone()),
            (off + 6, a.clone()),
            (off + 8, k.clone()),
        ],
    )
    .expect("whiskering data is well-shaped")
}

fn unit3(f: &Typed, g: &Typed) -> Typed {
    let s = (f.dim() - 1) as usize;
    let off = 2 * s;
    let h = suspended(unit3_base(), s);
    apply_head(&h, &[(off + 2, f.clone()), (off + 4, g.clone())]).expect("unit data is well-shaped")
}

fn can0(t: &Typed) -> Term {
    Term::can(t.tm.clone(), vec![])
}

impl Build<'_> {
    fn e(&self, i: usize) -> Term {
        Term::Var(self.f.glen() + i)
    }

    fn real_base(&self) -> Vec<Term> {
        (0..self.f.glen()).map(Term::Var).collect()
    }

    fn real_cells(&self) -> Images {
        let ctx = &self.f.ps.ctx;
        Images {
            base: self.real_base(),
            cells: self.f.tops.iter().map(|t| Typed::var(ctx, t.x)).collect(),
        }
    }

    fn real_inverses(&self) -> Images {
        let ctx = &self.f.ps.ctx;
        let cells = self
            .f
            .tops
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let Type::Arr(b, s, tt) = ctx.ty(t.x) else {
                    unreachable!()
                };
                Typed::new(
                    Term::destr(self.side.inv(), self.e(i)),
                    Type::Arr(b.clone(), tt.clone(), s.clone()),
                )
            })
            .collect();
        Images {
            base: self.real_base(),
            cells,
        }
    }

    /// The opposite coherence and the relabelling of its variables.
    fn opposite_head(&self) -> (Arc<CohHead>, Vec<Level>) {
        let (bar, label) = op_ps(self.f.m, &self.f.ps);
        let Type::Arr(b, u, v) = &self.f.head.ty else {
            unreachable!()
        };
        let mut rename = vec![Term::Var(0); label.len()];
        for (p, &x) in label.iter().enumerate() {
            rename[x] = Term::Var(p);
        }
        let rename = Sub::new(rename);
        let ty = Type::arr(b.subst(&rename), v.subst(&rename), u.subst(&rename));
        (CohHead::new(None, bar, ty), label)
    }

    fn apply_gamma(&self, im: &Images) -> Typed {
        let h = &self.f.head;
        let sub: Sub = (0..self.f.glen())
            .map(|x| match self.f.tops.iter().position(|t| t.x == x) {
                Some(i) => im.cells[i].tm.clone(),
                None => im.base[x].clone(),
            })
            .collect();
        Typed::new(Term::Coh(h.clone(), sub.clone()), h.ty.subst(&sub))
    }

    fn apply_opposite(&self, im: &Images) -> Typed {
        let (h, label) = self.opposite_head();
        let sub: Sub = label
            .iter()
            .map(|&x| match self.f.tops.iter().position(|t| t.x == x) {
                Some(i) => im.cells[i].tm.clone(),
                None => im.base[x].clone(),
            })
            .collect();
        Typed::new(Term::Coh(h.clone(), sub.clone()), h.ty.subst(&sub))
    }

    fn inverse(&self) -> Typed {
        self.apply_opposite(&self.real_inverses())
    }

    /// The nest of whiskered cells regrouped by the associator.
    fn nested(&self, fwd: &Images, bwd: &Images) -> Typed {
        let k = self.f.tops.len();
        let f = self.f;
        match self.side {
            Side::Left => {
                let mut n = comp(&[f.wbar(0, bwd), f.w(0, fwd)]);
                for i in 1..k {
                    n = comp(&[f.wbar(i, bwd), n, f.w(i, fwd)]);
                }
                n
            }
            Side::Right => {
                let mut n = comp(&[f.w(k - 1, fwd), f.wbar(k - 1, bwd)]);
                for i in (0..k - 1).rev() {
                    n = comp(&[f.w(i, fwd), n, f.wbar(i, bwd)]);
                }
                n
            }
        }
    }

    /// Coherences `κ : w → W` and `κ' : W → w` between the outer boundary
    /// `w` (`v` on the left, `u` on the right) and the composite `W` of the
    /// truncation, together with the coherence `ε : κ · κ' → id w`.
    fn frame_heads(&self) -> Result<FrameHeads> {
        let f = self.f;
        let Type::Arr(b, u, v) = &f.head.ty else {
            unreachable!()
        };
        let (end, choice) = match self.side {
            Side::Left => (v, f.state(f.tops.len())),
            Side::Right => (u, f.state(0)),
        };
        let partial = f.trunc_renaming(&choice);
        let ren = pick(&partial, end)
            .filter(|_| b.vars().iter().all(|&x| partial[x].is_some()))
            .ok_or_else(|| {
                Error::new(
                    ErrorKind::NotInvertible,
                    "boundary of the coherence leaves its pasting diagram's boundary",
                )
            })?;
        let (tctx, _) = f.trunc.layout();
        let w = Typed::new(end.subst(&ren), b.subst(&ren));
        let c = ucomp(&f.trunc);
        let kappa = CohHead::new(
            None,
            tctx.clone(),
            Type::arr(w.ty.clone(), w.tm.clone(), c.tm.clone()),
        );
        let kappa2 = CohHead::new(
            None,
            tctx.clone(),
            Type::arr(w.ty.clone(), c.tm.clone(), w.tm.clone()),
        );
        let kk = comp(&[
            Typed::new(kappa.generic(), kappa.ty.clone()),
            Typed::new(kappa2.generic(), kappa2.ty.clone()),
        ]);
        let eps = CohHead::new(None, tctx, Type::arr(kk.ty, kk.tm, id(&w).tm));
        Ok((kappa, kappa2, eps, choice))
    }

    /// The associator `α`, its instance, and the frame coherences applied to
    /// the real images.
    fn cancellator(&self) -> Result<(Typed, Term)> {
        let f = self.f;
        let (kappa, kappa2, eps, choice) = self.frame_heads()?;
        let at = |h: &Arc<CohHead>, base: &[Term]| {
            let s = f.trunc_images(base, &choice);
            Typed::new(Term::Coh(h.clone(), s.clone()), h.ty.subst(&s))
        };

        // The glued context and the two sides' images inside it.
        let (gtree, fwd_g, bwd_g, sigma) = self.glued();
        let (gctx, _) = gtree.layout();
        let t_g = self.apply_gamma(&fwd_g);
        let tbar_g = self.apply_opposite(&bwd_g);
        let nest_g = self.nested(&fwd_g, &bwd_g);
        let (src_g, tgt_g) = match self.side {
            Side::Left => (
                comp(&[tbar_g, t_g]),
                comp(&[at(&kappa, &bwd_g.base), nest_g, at(&kappa2, &fwd_g.base)]),
            ),
            Side::Right => (
                comp(&[t_g, tbar_g]),
                comp(&[at(&kappa, &fwd_g.base), nest_g, at(&kappa2, &bwd_g.base)]),
            ),
        };
        let alpha_h = CohHead::new(None, gctx, Type::arr(src_g.ty, src_g.tm, tgt_g.tm));
        let alpha = Typed::new(
            Term::Coh(alpha_h.clone(), sigma.clone()),
            alpha_h.ty.subst(&sigma),
        );

        let real = self.real_base();
        let k1 = at(&kappa, &real);
        let k2 = at(&kappa2, &real);
        let e = at(&eps, &real);
        let (z, z_inv) = self.cancel_all();
        let wh = whisk3(&k1, &z, &k2);
        let un = unit3(&k1, &k2);
        let total = comp(&[alpha.clone(), wh.clone(), un.clone(), e.clone()]);
        let wit = Term::can(
            total.tm.clone(),
            vec![
                can0(&alpha),
                Term::can(wh.tm, vec![z_inv]),
                can0(&un),
                can0(&e),
            ],
        );
        Ok((total, wit))
    }

    /// `glue(Γ̄, Γ)` on the left, `glue(Γ, Γ̄)` on the right, with the images
    /// of `Γ` on the forward and inverse sides, and the substitution sending
    /// the glued context to the real cells and inverses.
    fn glued(&self) -> (PsTree, Images, Images, Sub) {
        let f = self.f;
        let m = f.m;
        let tree = &f.ps.tree;
        let gtree = match self.side {
            Side::Left => tree.op(m).glue(tree, m - 1),
            Side::Right => tree.glue(&tree.op(m), m - 1),
        }
        .expect("a tree glues with its opposite");
        let (gctx, groot) = gtree.layout();
        let mut pairs = Vec::new();
        let mut nodes = Vec::new();
        walk(&groot, &f.ps.root, m - 1, &mut pairs, &mut nodes);
        let mut fb = vec![Term::Var(0); f.glen()];
        let mut bb = vec![Term::Var(0); f.glen()];
        let mut sigma = vec![Term::Var(0); gctx.len()];
        let mut fc: Vec<Option<Typed>> = vec![None; f.tops.len()];
        let mut bc: Vec<Option<Typed>> = vec![None; f.tops.len()];
        let real_fwd = self.real_cells();
        let real_bwd = self.real_inverses();
        for (a, b) in pairs {
            fb[b] = Term::Var(a);
            bb[b] = Term::Var(a);
            sigma[a] = Term::Var(b);
        }
        for (j, (gn, n)) in nodes.into_iter().enumerate() {
            let jj = n.ys.len();
            for l in 0..=jj {
                let (fw, bw) = match self.side {
                    Side::Left => (gn.vertex(jj + l), gn.vertex(jj - l)),
                    Side::Right => (gn.vertex(l), gn.vertex(2 * jj - l)),
                };
                fb[n.vertex(l)] = Term::Var(fw);
                bb[n.vertex(l)] = Term::Var(bw);
                sigma[fw] = Term::Var(n.vertex(l));
                sigma[bw] = Term::Var(n.vertex(l));
            }
            for c in 0..jj {
                let i = f.top_index(j, c);
                let (fwc, bwc) = match self.side {
                    Side::Left => (&gn.children[jj + c], &gn.children[jj - 1 - c]),
                    Side::Right => (&gn.children[c], &gn.children[2 * jj - 1 - c]),
                };
                fc[i] = Some(Typed::var(&gctx, fwc.own));
                bc[i] = Some(Typed::var(&gctx, bwc.own));
                sigma[fwc.own] = real_fwd.cells[i].tm.clone();
                sigma[bwc.own] = real_bwd.cells[i].tm.clone();
            }
        }
        let fwd = Images {
            base: fb,
            cells: fc.into_iter().map(Option::unwrap).collect(),
        };
        let bwd = Images {
            base: bb,
            cells: bc.into_iter().map(Option::unwrap).collect(),
        };
        (gtree, fwd, bwd, Sub::new(sigma))
    }

    /// `Z : nest → id`, and a witness of its invertibility.
    fn cancel_all(&self) -> (Typed, Term) {
        let f = self.f;
        let k = f.tops.len();
        let fwd = self.real_cells();
        let bwd = self.real_inverses();
        let order: Vec<usize> = match self.side {
            Side::Left => (0..k).collect(),
            Side::Right => (0..k).rev().collect(),
        };
        let (mut z, mut z_inv) = self.cancel_one(order[0]);
        for &i in &order[1..] {
            let (w, wb) = (f.w(i, &fwd), f.wbar(i, &bwd));
            let (outer_l, outer_r) = match self.side {
                Side::Left => (wb, w),
                Side::Right => (w, wb),
            };
            let wh = whisk3(&outer_l, &z, &outer_r);
            let un = unit3(&outer_l, &outer_r);
            let (c, c_inv) = self.cancel_one(i);
            let next = comp(&[wh.clone(), un.clone(), c]);
            z_inv = Term::can(
                next.tm.clone(),
                vec![Term::can(wh.tm, vec![z_inv]), can0(&un), c_inv],
            );
            z = next;
        }
        (z, z_inv)
    }

    /// Cancellation of one top cell against its inverse, whiskered into the
    /// boundary reached after it (left) or before it (right).
    fn cancel_one(&self, i: usize) -> (Typed, Term) {
        let f = self.f;
        let j = f.tops[i].node;
        let choice = f.state(i + 1);
        let left = self.side == Side::Left;
        let x = &self.real_cells().cells[i];
        let xb = &self.real_inverses().cells[i];
        let (s, t) = (Term::Var(f.s(i)), Term::Var(f.t(i)));
        // the endpoint the loop `x̄ · x` (or `x · x̄`) is based at
        let o = if left { t.clone() } else { s.clone() };
        let real = self.real_base();

        // coh_Q : W̄ · W → whisk(x̄ · x)  over the truncation with two cells at j
        let q_tree = f.shape_with(j, &[PsTree::point(), PsTree::point()]);
        let (q_ctx, q_root) = q_tree.layout();
        let qn = q_root.at_depth(f.m - 1)[j].clone();
        let qv = |l: usize| Term::Var(qn.vertex(l));
        let qc = |c: usize| Typed::var(&q_ctx, qn.children[c].own);
        let qb = self.local_base(&q_root);
        let (a, b) = (qc(0), qc(1));
        let first = f.whisker(i, &qb, &choice, qv(0), qv(1), a.tm.clone());
        let second = f.whisker(i, &qb, &choice, qv(1), qv(2), b.tm.clone());
        let both = comp(&[a.clone(), b.clone()]);
        let wq = f.whisker(i, &qb, &choice, qv(0), qv(2), both.tm);
        let lhs = comp(&[first, second]);
        let coh_q = CohHead::new(None, q_ctx.clone(), Type::arr(lhs.ty, lhs.tm, wq.tm));
        let mut q_sub = vec![None; q_ctx.len()];
        for (l, img) in [
            o.clone(),
            if left { s.clone() } else { t.clone() },
            o.clone(),
        ]
        .into_iter()
        .enumerate()
        {
            q_sub[qn.vertex(l)] = Some(img);
        }
        let (c0, c1) = if left { (xb, x) } else { (x, xb) };
        q_sub[qn.children[0].own] = Some(c0.tm.clone());
        q_sub[qn.children[1].own] = Some(c1.tm.clone());
        let q_sub = self.complete(q_sub, &real, &q_root, &choice);
        let step1 = Typed::new(
            Term::Coh(coh_q.clone(), q_sub.clone()),
            coh_q.ty.subst(&q_sub),
        );

        // whisk⁺ : whisk(y) → whisk(z) for c : y → z, instantiated at the unit
        let p_tree = f.shape_with(j, &[PsTree::disk(1)]);
        let (p_ctx, p_root) = p_tree.layout();
        let pb = self.local_base(&p_root);
        let pn = p_root.at_depth(f.m - 1)[j].clone();
        let (r0, r1) = (Term::Var(pn.own), Term::Var(pn.ys[0]));
        let yc = pn.children[0].own;
        let zc = pn.children[0].ys[0];
        let cc = pn.children[0].children[0].own;
        let wy = f.whisker(i, &pb, &choice, r0.clone(), r1.clone(), Term::Var(yc));
        let wz = f.whisker(i, &pb, &choice, r0, r1, Term::Var(zc));
        let plus = CohHead::new(None, p_ctx.clone(), Type::arr(wy.ty, wy.tm, wz.tm));
        let loop_ = comp(&[c0.clone(), c1.clone()]);
        let idl = id(&Typed::new(o.clone(), x.base().clone()));
        let mut p_sub = vec![None; p_ctx.len()];
        p_sub[pn.own] = Some(o.clone());
        p_sub[pn.ys[0]] = Some(o.clone());
        p_sub[yc] = Some(loop_.tm);
        p_sub[zc] = Some(idl.tm);
        p_sub[cc] = Some(Term::destr(self.side.unit(), self.e(i)));
        let p_sub = self.complete(p_sub, &real, &p_root, &choice);
        let step2 = Typed::new(
            Term::Coh(plus.clone(), p_sub.clone()),
            plus.ty.subst(&p_sub),
        );
        let step2_wit = Term::can(
            step2.tm.clone(),
            vec![Term::destr(self.side.wit(), self.e(i))],
        );

        // coh_unit : whisk(id) → id(W) over the truncation
        let (t_ctx, t_root) = f.trunc.layout();
        let tb = self.local_base(&t_root);
        let b_own = Term::Var(t_root.at_depth(f.m - 1)[j].own);
        let idb = id(&Typed::new(
            b_own.clone(),
            t_ctx.ty(b_own.as_var().unwrap()).clone(),
        ));
        let wid = f.whisker(i, &tb, &choice, b_own.clone(), b_own, idb.tm);
        let full = id(&ucomp(&f.trunc));
        let unit_h = CohHead::new(None, t_ctx, Type::arr(wid.ty, wid.tm, full.tm));
        let u_choice = if left { f.state(i + 1) } else { f.state(i) };
        let u_sub = f.trunc_images(&real, &u_choice);
        let step3 = Typed::new(
            Term::Coh(unit_h.clone(), u_sub.clone()),
            unit_h.ty.subst(&u_sub),
        );

        let total = comp(&[step1.clone(), step2, step3.clone()]);
        let wit = Term::can(
            total.tm.clone(),
            vec![can0(&step1), step2_wit, can0(&step3)],
        );
        (total, wit)
    }

    /// Images of the variables of `Γ` inside a shape built on the
    /// truncation: lower variables to their copies, every vertex of a node to
    /// that node's own variable.
    fn local_base(&self, shape_root: &Node) -> Vec<Term> {
        let f = self.f;
        let mut pairs = Vec::new();
        let mut nodes = Vec::new();
        walk(shape_root, &f.ps.root, f.m - 1, &mut pairs, &mut nodes);
        let mut out = vec![Term::Var(0); f.glen()];
        for (a, b) in pairs {
            out[b] = Term::Var(a);
        }
        for (a, b) in nodes {
            for l in 0..b.vertex_count() {
                out[b.vertex(l)] = Term::Var(a.own);
            }
        }
        out
    }

    /// Completes a partially filled substitution out of a shape: variables
    /// left open are the lower ones and the other nodes' own variables, sent
    /// to the real images at `choice`.
    fn complete(
        &self,
        mut partial: Vec<Option<Term>>,
        real: &[Term],
        root: &Node,
        choice: &[usize],
    ) -> Sub {
        let (defaults, _) = self.f.fill_shape(root, partial.len(), real, choice, None);
        for (p, d) in partial.iter_mut().zip(defaults) {
            if p.is_none() {
                *p = d;
            }
        }
        Sub::new(
            partial
                .into_iter()
                .map(|o| o.expect("every variable has an image"))
                .collect(),
        )
    }
}

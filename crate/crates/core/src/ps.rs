//! Pasting diagrams as rooted plane trees.
//!
//! A node at depth `d` owns a `d`-dimensional variable; its children are the
//! `(d+1)`-cells of a chain `v_0 → v_1 → … → v_k` of parallel `d`-cells, where
//! `v_0` is the node's own variable and `v_1..v_k` are the targets introduced
//! alongside each child. The canonical context of a tree is emitted in the
//! left-to-right traversal order that the PSS/PSE/PSD rules produce.

use std::collections::BTreeSet;

use crate::error::{Error, ErrorKind, Result};
use crate::syntax::{Context, Level, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PsTree {
    pub children: Vec<PsTree>,
}

/// Placement of a tree's variables inside its canonical context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub own: Level,
    pub ys: Vec<Level>,
    pub children: Vec<Node>,
}

impl Node {
    /// `vertex(0)` is the node's own variable, `vertex(i)` the target of the
    /// `i`-th child.
    pub fn vertex(&self, i: usize) -> Level {
        if i == 0 {
            self.own
        } else {
            self.ys[i - 1]
        }
    }

    pub fn last_vertex(&self) -> Level {
        self.ys.last().copied().unwrap_or(self.own)
    }

    pub fn vertex_count(&self) -> usize {
        self.ys.len() + 1
    }

    /// Nodes at exactly depth `d` below this one, left to right.
    pub fn at_depth(&self, d: usize) -> Vec<&Node> {
        let mut out = Vec::new();
        self.collect_at_depth(d, &mut out);
        out
    }

    fn collect_at_depth<'a>(&'a self, d: usize, out: &mut Vec<&'a Node>) {
        if d == 0 {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_at_depth(d - 1, out);
            }
        }
    }

    pub fn shape(&self) -> PsTree {
        PsTree {
            children: self.children.iter().map(Node::shape).collect(),
        }
    }
}

impl PsTree {
    pub fn point() -> PsTree {
        PsTree::default()
    }

    pub fn new(children: Vec<PsTree>) -> PsTree {
        PsTree { children }
    }

    /// The disk `D^n`: a path of length `n`.
    pub fn disk(n: usize) -> PsTree {
        (0..n).fold(PsTree::point(), |t, _| t.suspend())
    }

    /// A chain of `k` composable `d`-cells, suspended `d` times.
    pub fn chain(k: usize, d: usize) -> PsTree {
        (0..d).fold(PsTree::new(vec![PsTree::point(); k]), |t, _| t.suspend())
    }

    pub fn suspend(self) -> PsTree {
        PsTree {
            children: vec![self],
        }
    }

    pub fn dim(&self) -> usize {
        self.children.iter().map(|c| c.dim() + 1).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| 1 + c.size()).sum::<usize>()
    }

    pub fn is_path(&self) -> bool {
        match self.children.as_slice() {
            [] => true,
            [c] => c.is_path(),
            _ => false,
        }
    }

    /// Removes every node deeper than `d`.
    pub fn truncate(&self, d: usize) -> PsTree {
        if d == 0 {
            PsTree::point()
        } else {
            PsTree {
                children: self.children.iter().map(|c| c.truncate(d - 1)).collect(),
            }
        }
    }

    /// Reverses the chains of `n`-cells.
    pub fn op(&self, n: usize) -> PsTree {
        assert!(n >= 1);
        if n == 1 {
            PsTree {
                children: self.children.iter().rev().cloned().collect(),
            }
        } else {
            PsTree {
                children: self.children.iter().map(|c| c.op(n - 1)).collect(),
            }
        }
    }

    /// Concatenates the chains of `(d+1)`-cells of two trees whose
    /// truncations at depth `d` agree.
    pub fn glue(&self, other: &PsTree, d: usize) -> Option<PsTree> {
        if d == 0 {
            let mut children = self.children.clone();
            children.extend(other.children.iter().cloned());
            return Some(PsTree { children });
        }
        if self.children.len() != other.children.len() {
            return None;
        }
        let children = self
            .children
            .iter()
            .zip(&other.children)
            .map(|(a, b)| a.glue(b, d - 1))
            .collect::<Option<Vec<_>>>()?;
        Some(PsTree { children })
    }

    /// Number of nodes at depth `d`.
    pub fn count_at_depth(&self, d: usize) -> usize {
        if d == 0 {
            1
        } else {
            self.children.iter().map(|c| c.count_at_depth(d - 1)).sum()
        }
    }

    /// The canonical context with generated names.
    pub fn layout(&self) -> (Context, Node) {
        let mut ctx = Context::new();
        let own = ctx.push("p0", Type::Obj);
        let node = emit(self, own, &Type::Obj, &mut ctx);
        for x in 0..ctx.len() {
            ctx.rename(x, format!("p{x}"));
        }
        (ctx, node)
    }

    /// Parses the bracket notation used by the tests: `[]` is a point, a
    /// node lists its children, e.g. `[[],[[]]]`.
    pub fn from_brackets(s: &str) -> Option<PsTree> {
        let bytes: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_brackets(&bytes, &mut pos)?;
        (pos == bytes.len()).then_some(t)
    }
}

fn parse_brackets(s: &[char], pos: &mut usize) -> Option<PsTree> {
    if s.get(*pos) != Some(&'[') {
        return None;
    }
    *pos += 1;
    let mut children = Vec::new();
    loop {
        match s.get(*pos)? {
            ']' => {
                *pos += 1;
                return Some(PsTree { children });
            }
            ',' => *pos += 1,
            _ => children.push(parse_brackets(s, pos)?),
        }
    }
}

fn emit(tree: &PsTree, own: Level, own_ty: &Type, ctx: &mut Context) -> Node {
    let mut node = Node {
        own,
        ys: Vec::new(),
        children: Vec::new(),
    };
    let mut prev = own;
    for child in &tree.children {
        let y = ctx.push("", own_ty.clone());
        let f_ty = Type::arr(own_ty.clone(), Term::Var(prev), Term::Var(y));
        let f = ctx.push("", f_ty.clone());
        node.ys.push(y);
        node.children.push(emit(child, f, &f_ty, ctx));
        prev = y;
    }
    node
}

/// A context recognised as a pasting diagram.
#[derive(Clone, Debug)]
pub struct PsContext {
    pub ctx: Context,
    pub tree: PsTree,
    pub root: Node,
    sources: BTreeSet<Level>,
    targets: BTreeSet<Level>,
}

impl PsContext {
    pub fn from_tree(tree: &PsTree) -> PsContext {
        let (ctx, _) = tree.layout();
        check_ps(&ctx).expect("canonical layouts are pasting diagrams")
    }

    pub fn dim(&self) -> usize {
        self.tree.dim()
    }

    /// Variables that are not the target of another variable.
    pub fn source_vars(&self) -> &BTreeSet<Level> {
        &self.sources
    }

    /// Variables that are not the source of another variable.
    pub fn target_vars(&self) -> &BTreeSet<Level> {
        &self.targets
    }

    /// Variables of maximal dimension, in telescope order.
    pub fn top_vars(&self) -> Vec<Level> {
        self.ctx.vars_of_dim(self.dim() as i64)
    }
}

/// Recognises a pasting diagram by a single left-to-right pass that tracks
/// the current dangling variable (rules PSS, PSE, PSD, PS).
pub fn check_ps(ctx: &Context) -> Result<PsContext> {
    let not_ps = |at: usize, why: &str| {
        let name = if at < ctx.len() {
            ctx.name(at).to_string()
        } else {
            String::new()
        };
        Error::new(ErrorKind::NotPs, format!("entry {at} ({name}): {why}"))
    };
    if ctx.is_empty() {
        return Err(not_ps(0, "the empty context is not a pasting diagram"));
    }
    if *ctx.ty(0) != Type::Obj {
        return Err(not_ps(0, "the first variable must be an object"));
    }
    if ctx.len().is_multiple_of(2) {
        return Err(not_ps(ctx.len() - 1, "dangling variable without a filler"));
    }
    let mut stack = vec![Node {
        own: 0,
        ys: Vec::new(),
        children: Vec::new(),
    }];
    let mut i = 1;
    while i < ctx.len() {
        let y_ty = ctx.ty(i);
        let (base, src, tgt) = match ctx.ty(i + 1) {
            Type::Arr(a, Term::Var(s), Term::Var(t)) => (a, *s, *t),
            _ => return Err(not_ps(i + 1, "expected an arrow between variables")),
        };
        if tgt != i {
            return Err(not_ps(
                i + 1,
                "target must be the variable introduced just before",
            ));
        }
        if **base != *y_ty {
            return Err(not_ps(
                i + 1,
                "arrow base differs from the type of its target",
            ));
        }
        loop {
            let top = stack.last().expect("root stays on the stack");
            if top.last_vertex() == src {
                break;
            }
            if stack.len() == 1 {
                return Err(not_ps(i + 1, "source is not a dangling variable"));
            }
            let done = stack.pop().unwrap();
            stack.last_mut().unwrap().children.push(done);
        }
        if ctx.ty(src) != y_ty {
            return Err(not_ps(i + 1, "source and target have different types"));
        }
        stack.last_mut().unwrap().ys.push(i);
        stack.push(Node {
            own: i + 1,
            ys: Vec::new(),
            children: Vec::new(),
        });
        i += 2;
    }
    while stack.len() > 1 {
        let done = stack.pop().unwrap();
        stack.last_mut().unwrap().children.push(done);
    }
    let root = stack.pop().unwrap();
    let tree = root.shape();
    let mut is_src_of = BTreeSet::new();
    let mut is_tgt_of = BTreeSet::new();
    for x in 0..ctx.len() {
        if let Type::Arr(_, Term::Var(s), Term::Var(t)) = ctx.ty(x) {
            is_src_of.insert(*s);
            is_tgt_of.insert(*t);
        }
    }
    let sources = (0..ctx.len()).filter(|x| !is_tgt_of.contains(x)).collect();
    let targets = (0..ctx.len()).filter(|x| !is_src_of.contains(x)).collect();
    Ok(PsContext {
        ctx: ctx.clone(),
        tree,
        root,
        sources,
        targets,
    })
}

/// Walks two layouts of the same shape in parallel, recording for every
/// variable of `a` the matching variable of `b`.
pub fn correspond(a: &Node, b: &Node, out: &mut [Level]) {
    out[a.own] = b.own;
    for (ya, yb) in a.ys.iter().zip(&b.ys) {
        out[*ya] = *yb;
    }
    for (ca, cb) in a.children.iter().zip(&b.children) {
        correspond(ca, cb, out);
    }
}

/// For the layout `bar` of `tree.op(n)` and the layout `orig` of `tree`,
/// records for each variable of `bar` the variable of `orig` it relabels.
pub fn op_correspond(bar: &Node, orig: &Node, n: usize, out: &mut [Level]) {
    if n == 1 {
        let j = orig.ys.len();
        for l in 0..=j {
            out[bar.vertex(l)] = orig.vertex(j - l);
        }
        for l in 0..j {
            correspond(&bar.children[l], &orig.children[j - 1 - l], out);
        }
    } else {
        out[bar.own] = orig.own;
        for (ya, yb) in bar.ys.iter().zip(&orig.ys) {
            out[*ya] = *yb;
        }
        for (ca, cb) in bar.children.iter().zip(&orig.children) {
            op_correspond(ca, cb, n - 1, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arr(a: Type, s: Level, t: Level) -> Type {
        Type::arr(a, Term::Var(s), Term::Var(t))
    }

    fn example_pasting() -> Context {
        // x y f g a z h
        let mut c = Context::new();
        c.push("x", Type::Obj);
        c.push("y", Type::Obj);
        c.push("f", arr(Type::Obj, 0, 1));
        c.push("g", arr(Type::Obj, 0, 1));
        c.push("a", arr(arr(Type::Obj, 0, 1), 2, 3));
        c.push("z", Type::Obj);
        c.push("h", arr(Type::Obj, 1, 5));
        c
    }

    #[test]
    fn recognises_example_with_sources_and_targets() {
        let ps = check_ps(&example_pasting()).unwrap();
        assert_eq!(ps.tree, PsTree::from_brackets("[[[]],[]]").unwrap());
        let positive = |s: &BTreeSet<Level>| -> Vec<Level> {
            s.iter()
                .copied()
                .filter(|&x| ps.ctx.var_dim(x) > 0)
                .collect()
        };
        assert_eq!(positive(ps.source_vars()), vec![2, 4, 6]);
        assert_eq!(positive(ps.target_vars()), vec![3, 4, 6]);
        assert_eq!(ps.dim(), 2);
    }

    #[test]
    fn rejects_globular_non_ps_context() {
        let mut c = Context::new();
        c.push("x", Type::Obj);
        c.push("y", Type::Obj);
        c.push("f", arr(Type::Obj, 0, 1));
        c.push("g", arr(Type::Obj, 0, 1));
        c.push("a", arr(arr(Type::Obj, 0, 1), 2, 3));
        c.push("h", arr(Type::Obj, 0, 0));
        let err = check_ps(&c).unwrap_err();
        assert_eq!(err.kind, ErrorKind::NotPs);
    }

    #[test]
    fn single_point() {
        let mut c = Context::new();
        c.push("x", Type::Obj);
        let ps = check_ps(&c).unwrap();
        assert_eq!(ps.tree, PsTree::point());
        assert_eq!(ps.dim(), 0);
    }

    #[test]
    fn layout_roundtrips_through_check() {
        for s in ["[]", "[[]]", "[[],[]]", "[[[]],[]]", "[[[],[[]]],[],[[]]]"] {
            let t = PsTree::from_brackets(s).unwrap();
            let (ctx, node) = t.layout();
            assert_eq!(ctx.len(), t.size());
            let ps = check_ps(&ctx).unwrap();
            assert_eq!(ps.tree, t);
            assert_eq!(ps.root, node);
        }
    }

    #[test]
    fn op_reverses_chains() {
        let t = PsTree::from_brackets("[[[]],[]]").unwrap();
        assert_eq!(t.op(1), PsTree::from_brackets("[[],[[]]]").unwrap());
        assert_eq!(t.op(2), t);
        assert_eq!(t.op(1).op(1), t);
    }

    #[test]
    fn glue_concatenates() {
        let t = PsTree::from_brackets("[[[]]]").unwrap();
        let g = t.glue(&t, 1).unwrap();
        assert_eq!(g, PsTree::from_brackets("[[[],[]]]").unwrap());
        assert!(t.glue(&PsTree::chain(2, 0), 1).is_none());
    }

    #[test]
    fn suspension_of_layout_matches_suspended_context() {
        let t = PsTree::from_brackets("[[],[[]]]").unwrap();
        let (ctx, _) = t.layout();
        let (sctx, _) = t.clone().suspend().layout();
        assert_eq!(ctx.suspend(), sctx);
    }
}

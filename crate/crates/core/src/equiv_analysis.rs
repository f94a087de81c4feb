//! Finite approximations of the walking equivalence: the neutral categorical
//! terms over `E^1`, the truncations `E^{1,n}` built by pullbacks along
//! suspended display maps, and the substitutions `γ^n : E^1 → E^{1,n}`
//! matching their variables with neutrals.

use std::collections::HashSet;
use std::fmt;

use crate::builders::{comp2, id, Typed};
use crate::error::{Error, ErrorKind, Result};
use crate::kernel::{check_sub, infer};
use crate::meta::{walking_equiv, witness_classifier};
use crate::syntax::{Context, Destructor, Sub, Term, Type};

/// Truncations past this dimension are refused unless a larger bound is
/// asked for explicitly.
pub const DEFAULT_BOUND: usize = 5;

/// `e_1` in `E^1`.
const E1: usize = 3;

/// The invertibility structures of dimension `n ≥ 1` over `E^1` that are
/// neutral: `e_1` under every string of `n - 1` witness destructors.
pub fn inv_neutrals(n: usize) -> Vec<Term> {
    if n == 0 {
        return Vec::new();
    }
    let mut level = vec![Term::Var(E1)];
    for _ in 1..n {
        level = level
            .iter()
            .flat_map(|w| {
                [
                    Term::destr(Destructor::LWit, w.clone()),
                    Term::destr(Destructor::RWit, w.clone()),
                ]
            })
            .collect();
    }
    level
}

/// The neutral categorical terms of dimension exactly `n` over `E^1`.
pub fn enumerate_neutrals(n: usize) -> Vec<Term> {
    match n {
        0 => vec![Term::Var(0), Term::Var(1)],
        _ => {
            let mut out = Vec::new();
            if n == 1 {
                out.push(Term::Var(2));
            }
            for w in inv_neutrals(n) {
                out.push(Term::destr(Destructor::LInv, w.clone()));
                out.push(Term::destr(Destructor::RInv, w));
            }
            for w in inv_neutrals(n - 1) {
                out.push(Term::destr(Destructor::LUnit, w.clone()));
                out.push(Term::destr(Destructor::RUnit, w));
            }
            out
        }
    }
}

/// `Δ, (x_k : A_k[f, x_0, …])` with its projection to `Δ` and the extended
/// substitution into `ext`, where `ext` is a display extension of its first
/// `base` entries and `Δ ⊢ f : ext[..base]`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub ctx: Context,
    pub proj: Sub,
    pub top: Sub,
}

pub fn pullback_along_display(
    delta: &Context,
    f: &Sub,
    ext: &Context,
    base: usize,
) -> Result<Pullback> {
    if base > ext.len() {
        return Err(Error::new(
            ErrorKind::IllFormed,
            "the base of a display map is longer than its extension",
        ));
    }
    check_sub(delta, f, &ext.prefix(base))
        .map_err(|e| e.within("checking the substitution pulled back along"))?;
    let mut ctx = delta.clone();
    let mut top = f.to_vec();
    for x in base..ext.len() {
        let ty = ext.ty(x).subst(&Sub::new(top.clone()));
        let v = ctx.push(ext.name(x).to_string(), ty);
        top.push(Term::Var(v));
    }
    Ok(Pullback {
        proj: Sub::identity(delta.len()),
        top: Sub::new(top),
        ctx,
    })
}

/// `E^{1,n}` and, for `n ≥ 1`, the display `i^n : E^{1,n} → E^{1,n-1}` and
/// the two maps `f^n, g^n : E^{1,n} → ΣE^{1,n-1}`, each given as the
/// substitution assigning terms of `E^{1,n}` to the variables of its
/// codomain. For `n = 0` the three substitutions are empty.
#[derive(Clone, Debug)]
pub struct EquivTrunc {
    pub n: usize,
    pub ctx: Context,
    pub i: Sub,
    pub f: Sub,
    pub g: Sub,
}

fn base_truncations() -> (EquivTrunc, EquivTrunc) {
    let mut c0 = Context::new();
    c0.push("x", Type::Obj);
    c0.push("y", Type::Obj);
    let t0 = EquivTrunc {
        n: 0,
        ctx: c0.clone(),
        i: Sub::empty(),
        f: Sub::empty(),
        g: Sub::empty(),
    };
    let mut c1 = c0;
    let (x, y) = (Term::Var(0), Term::Var(1));
    c1.push("u", Type::arr(Type::Obj, x.clone(), y.clone()));
    c1.push("v", Type::arr(Type::Obj, y.clone(), x.clone()));
    c1.push("w", Type::arr(Type::Obj, y.clone(), x.clone()));
    let cell = |t: usize| Typed::var(&c1, t);
    let vu = comp2(&cell(3), &cell(2));
    let uw = comp2(&cell(2), &cell(4));
    let idy = id(&cell(1));
    let idx = id(&cell(0));
    let f = Sub::new(vec![y.clone(), y, vu.tm, idy.tm]);
    let g = Sub::new(vec![x.clone(), x, uw.tm, idx.tm]);
    let t1 = EquivTrunc {
        n: 1,
        ctx: c1,
        i: Sub::identity(2),
        f,
        g,
    };
    (t0, t1)
}

fn step(prev: &EquivTrunc, cur: &EquivTrunc) -> Result<EquivTrunc> {
    let sprev = prev.ctx.suspend();
    let scur = cur.ctx.suspend();
    let base = sprev.len();
    let new_names: Vec<String> = cur.ctx.entries()[prev.ctx.len()..]
        .iter()
        .map(|e| e.name.clone())
        .collect();
    let renamed = |suffix: &str| {
        let mut c = scur.clone();
        for (k, name) in new_names.iter().enumerate() {
            c.rename(base + k, format!("{name}_{suffix}"));
        }
        c
    };
    let p1 = pullback_along_display(&cur.ctx, &cur.f, &renamed("v"), base)?;
    let g1 = cur.g.compose(&p1.proj);
    let p2 = pullback_along_display(&p1.ctx, &g1, &renamed("w"), base)?;
    Ok(EquivTrunc {
        n: cur.n + 1,
        i: p1.proj.compose(&p2.proj),
        f: p1.top.compose(&p2.proj),
        g: p2.top,
        ctx: p2.ctx,
    })
}

/// Every truncation up to `n`, refusing `n` beyond `bound`.
pub fn equiv_truncations(n: usize, bound: usize) -> Result<Vec<EquivTrunc>> {
    if n > bound {
        return Err(Error::new(
            ErrorKind::Bound,
            format!("E^{{1,{n}}} is beyond the bound {bound}"),
        ));
    }
    let (t0, t1) = base_truncations();
    let mut out = vec![t0, t1];
    while out.len() <= n {
        let k = out.len();
        let next = step(&out[k - 2], &out[k - 1])?;
        out.push(next);
    }
    out.truncate(n + 1);
    Ok(out)
}

pub fn equiv_truncation(n: usize) -> Result<EquivTrunc> {
    Ok(equiv_truncations(n, DEFAULT_BOUND)?.pop().unwrap())
}

/// `γ^0, …, γ^n`, each a substitution assigning to the variables of
/// `E^{1,k}` terms over `E^1`.
pub fn gammas(n: usize, truncs: &[EquivTrunc]) -> Vec<Sub> {
    let mut out = vec![Sub::new(vec![Term::Var(0), Term::Var(1)])];
    if n == 0 {
        return out;
    }
    let g1 = out[0].extend([
        Term::Var(2),
        Term::destr(Destructor::LInv, Term::Var(E1)),
        Term::destr(Destructor::RInv, Term::Var(E1)),
    ]);
    out.push(g1);
    let chi_l = witness_classifier(1, Destructor::LWit);
    let chi_r = witness_classifier(1, Destructor::RWit);
    for k in 1..n {
        let prev_len = truncs[k - 1].ctx.len();
        let cur = out[k].clone();
        let fresh: Vec<Term> = cur.terms()[prev_len..].iter().map(Term::suspend).collect();
        let mut next = cur.to_vec();
        next.extend(fresh.iter().map(|t| t.subst(&chi_l)));
        next.extend(fresh.iter().map(|t| t.subst(&chi_r)));
        out.push(Sub::new(next));
    }
    out
}

/// The outcome of [`check_gamma`] at one truncation level.
#[derive(Clone, Debug)]
pub struct GammaLevel {
    pub n: usize,
    pub vars: usize,
    /// `γ^n` checks as a substitution `E^1 → E^{1,n}`.
    pub typed: Result<(), String>,
    /// Variables of each dimension map one-to-one onto the neutrals of
    /// that dimension.
    pub bijection: bool,
    pub i_compat: bool,
    pub f_compat: bool,
    pub g_compat: bool,
    pub counterexamples: Vec<String>,
}

impl GammaLevel {
    pub fn ok(&self) -> bool {
        self.typed.is_ok() && self.bijection && self.i_compat && self.f_compat && self.g_compat
    }
}

#[derive(Clone, Debug)]
pub struct GammaReport {
    pub levels: Vec<GammaLevel>,
}

impl GammaReport {
    pub fn ok(&self) -> bool {
        self.levels.iter().all(GammaLevel::ok)
    }
}

impl fmt::Display for GammaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yes = |b: bool| if b { "yes" } else { "NO" };
        for l in &self.levels {
            writeln!(
                f,
                "n={}: {} variables, typed {}, bijection {}, i∘γ {}, f∘γ {}, g∘γ {}",
                l.n,
                l.vars,
                yes(l.typed.is_ok()),
                yes(l.bijection),
                yes(l.i_compat),
                yes(l.f_compat),
                yes(l.g_compat)
            )?;
            if let Err(e) = &l.typed {
                writeln!(f, "  {e}")?;
            }
            for c in &l.counterexamples {
                writeln!(f, "  {c}")?;
            }
        }
        Ok(())
    }
}

/// Builds `γ^k` for `k ≤ n` and checks that each is well typed, matches
/// variables of `E^{1,k}` with neutrals, and satisfies
/// `i^k ∘ γ^k = γ^{k-1}`, `f^k ∘ γ^k = Σγ^{k-1} ∘ χ_{LWit(e_1)}` and
/// `g^k ∘ γ^k = Σγ^{k-1} ∘ χ_{RWit(e_1)}`.
pub fn check_gamma(n: usize) -> Result<GammaReport> {
    let truncs = equiv_truncations(n, DEFAULT_BOUND)?;
    let gs = gammas(n, &truncs);
    let e1 = walking_equiv(1);
    let chi_l = witness_classifier(1, Destructor::LWit);
    let chi_r = witness_classifier(1, Destructor::RWit);
    let mut levels = Vec::new();
    for k in 0..=n {
        let t = &truncs[k];
        let g = &gs[k];
        let mut counterexamples = Vec::new();
        let typed = check_sub(&e1, g, &t.ctx).map_err(|e| e.to_string());
        let mut bijection = g.len() == t.ctx.len();
        for d in 0..=k {
            let want: HashSet<Term> = enumerate_neutrals(d).into_iter().collect();
            let vars = t.ctx.vars_of_dim(d as i64);
            let images: Vec<Term> = vars.iter().map(|&x| g.terms()[x].clone()).collect();
            let distinct: HashSet<&Term> = images.iter().collect();
            let got: HashSet<Term> = images.iter().cloned().collect();
            if distinct.len() != images.len() || got != want {
                bijection = false;
                counterexamples.push(format!(
                    "dimension {d}: {} variables, {} neutrals",
                    images.len(),
                    want.len()
                ));
            }
            for (x, img) in vars.iter().zip(&images) {
                match infer(&e1, img) {
                    Ok(ty) if ty.dim() + 1 == d as i64 => {}
                    _ => {
                        bijection = false;
                        counterexamples.push(format!(
                            "{} is sent to a term not of dimension {d}",
                            t.ctx.name(*x)
                        ));
                    }
                }
            }
        }
        let (mut i_compat, mut f_compat, mut g_compat) = (true, true, true);
        if k >= 1 {
            let prev = &gs[k - 1];
            i_compat = t.i.compose(g) == *prev;
            let sprev = prev.suspend();
            f_compat = t.f.compose(g) == sprev.compose(&chi_l);
            g_compat = t.g.compose(g) == sprev.compose(&chi_r);
            for (ok, what) in [(i_compat, "i"), (f_compat, "f"), (g_compat, "g")] {
                if !ok {
                    counterexamples.push(format!(
                        "{what}^{k} ∘ γ^{k} differs from its expected value"
                    ));
                }
            }
        }
        levels.push(GammaLevel {
            n: k,
            vars: t.ctx.len(),
            typed,
            bijection,
            i_compat,
            f_compat,
            g_compat,
            counterexamples,
        });
    }
    Ok(GammaReport { levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neutral_counts() {
        let counts: Vec<usize> = (0..8).map(|n| enumerate_neutrals(n).len()).collect();
        assert_eq!(counts, [2, 3, 6, 12, 24, 48, 96, 192]);
    }

    #[test]
    fn truncation_sizes() {
        let sizes: Vec<usize> = equiv_truncations(5, 5)
            .unwrap()
            .iter()
            .map(|t| t.ctx.len())
            .collect();
        assert_eq!(sizes, [2, 5, 11, 23, 47, 95]);
        assert_eq!(equiv_truncation(6).unwrap_err().kind, ErrorKind::Bound);
    }

    #[test]
    fn gamma_up_to_three() {
        let r = check_gamma(3).unwrap();
        assert!(r.ok(), "{r}");
    }
}

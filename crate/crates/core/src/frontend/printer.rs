use std::fmt::Write;

use super::parser::{SBody, STerm, SType, SurfaceDecl};
use crate::elaborate::explicit_mask;
use crate::syntax::{Context, Term, Type};

fn s_atom(t: &STerm, out: &mut String) {
    match t {
        STerm::App(_, args, _) if !args.is_empty() => {
            out.push('(');
            s_term(t, out);
            out.push(')');
        }
        _ => s_term(t, out),
    }
}

fn s_term(t: &STerm, out: &mut String) {
    match t {
        STerm::App(h, args, _) => {
            out.push_str(h);
            for a in args {
                out.push(' ');
                s_atom(a, out);
            }
        }
        STerm::Wild(_) => out.push('_'),
        STerm::Destr(d, a, _) => {
            out.push_str(d.keyword());
            out.push('(');
            s_term(a, out);
            out.push(')');
        }
        STerm::Can(s, ws, _) => {
            out.push_str("can(");
            s_term(s, out);
            out.push_str(" {");
            s_list(ws, ", ", out);
            out.push_str("})");
        }
    }
}

fn s_list(ts: &[STerm], sep: &str, out: &mut String) {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        s_term(t, out);
    }
}

fn s_type(a: &SType, out: &mut String) {
    match a {
        SType::Obj(_) => out.push('*'),
        SType::Arr(s, t, _) => {
            s_term(s, out);
            out.push_str(" -> ");
            s_term(t, out);
        }
        SType::Inv(t, _) => {
            out.push_str("Inv(");
            s_term(t, out);
            out.push(')');
        }
    }
}

pub fn print_term(t: &STerm) -> String {
    let mut s = String::new();
    s_term(t, &mut s);
    s
}

pub fn print_type(a: &SType) -> String {
    let mut s = String::new();
    s_type(a, &mut s);
    s
}

/// Concrete syntax for a declaration; telescopes are always printed with
/// explicit binders.
pub fn print_decl(d: &SurfaceDecl) -> String {
    let mut out = format!("{} {}", d.keyword(), d.name);
    for b in &d.tele {
        let _ = write!(out, " ({} : {})", b.name, print_type(&b.ty));
    }
    match &d.body {
        SBody::Coh(ty) => {
            let _ = write!(out, "\n  : {}", print_type(ty));
        }
        SBody::Let(ty, t) => {
            if let Some(ty) = ty {
                let _ = write!(out, "\n  : {}", print_type(ty));
            }
            let _ = write!(out, "\n  = {}", print_term(t));
        }
        SBody::Inv(cs) | SBody::Rec(cs) => {
            out.push_str("\n  = { ");
            s_list(cs, ",\n      ", &mut out);
            out.push_str(" }");
        }
    }
    out.push('\n');
    out
}

pub fn print_file(ds: &[SurfaceDecl]) -> String {
    ds.iter().map(print_decl).collect::<Vec<_>>().join("\n")
}

fn k_atom(ctx: &Context, t: &Term, out: &mut String) {
    let compound = match t {
        Term::Coh(_, g) | Term::Rec(_, g) => !g.is_empty(),
        _ => false,
    };
    if compound {
        out.push('(');
    }
    k_term(ctx, t, out);
    if compound {
        out.push(')');
    }
}

fn k_term(ctx: &Context, t: &Term, out: &mut String) {
    match t {
        Term::Var(x) if *x < ctx.len() => out.push_str(ctx.name(*x)),
        Term::Var(x) => {
            let _ = write!(out, "#{x}");
        }
        Term::Meta(m) => {
            let _ = write!(out, "?{m}");
        }
        Term::Coh(h, g) => {
            out.push_str(h.name.as_deref().unwrap_or("coh"));
            let explicit = explicit_mask(&h.ctx);
            for a in g.iter().zip(explicit).filter_map(|(a, e)| e.then_some(a)) {
                out.push(' ');
                k_atom(ctx, a, out);
            }
        }
        Term::Rec(r, g) => {
            out.push_str(r.name.as_deref().unwrap_or("rec"));
            for a in g.iter() {
                out.push(' ');
                k_atom(ctx, a, out);
            }
        }
        Term::Destr(d, e) => {
            out.push_str(d.keyword());
            out.push('(');
            k_term(ctx, e, out);
            out.push(')');
        }
        Term::Coind(c) => {
            out.push('{');
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                k_term(ctx, x, out);
            }
            out.push('}');
        }
        Term::Can(s, ws) => {
            out.push_str("can(");
            k_term(ctx, s, out);
            out.push_str(" {");
            for (i, w) in ws.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                k_term(ctx, w, out);
            }
            out.push_str("})");
        }
    }
}

/// Kernel terms in concrete syntax. Arguments of coherences that the
/// elaborator would infer are left out.
pub fn show_term(ctx: &Context, t: &Term) -> String {
    let mut s = String::new();
    k_term(ctx, t, &mut s);
    s
}

pub fn show_type(ctx: &Context, a: &Type) -> String {
    match a {
        Type::Obj => "*".into(),
        Type::Arr(_, u, v) => format!("{} -> {}", show_term(ctx, u), show_term(ctx, v)),
        Type::Inv(_, t) => format!("Inv({})", show_term(ctx, t)),
    }
}

pub fn show_ctx(ctx: &Context) -> String {
    let mut out = String::new();
    for (i, e) in ctx.entries().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({} : {})", e.name, show_type(&ctx.prefix(i), &e.ty));
    }
    out
}

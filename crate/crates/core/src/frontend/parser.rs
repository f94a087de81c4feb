use super::lexer::{lex, Span, Tok};
use crate::error::{Error, ErrorKind, Result};
use crate::syntax::Destructor;

pub const KEYWORDS: [&str; 7] = ["coh", "let", "inv", "rec", "can", "Inv", "_"];

#[derive(Clone, Debug)]
pub enum STerm {
    /// A name applied to explicit arguments, possibly none.
    App(String, Vec<STerm>, Span),
    Wild(Span),
    Destr(Destructor, Box<STerm>, Span),
    Can(Box<STerm>, Vec<STerm>, Span),
}

impl STerm {
    pub fn span(&self) -> Span {
        match self {
            STerm::App(_, _, s) | STerm::Wild(s) | STerm::Destr(_, _, s) | STerm::Can(_, _, s) => {
                *s
            }
        }
    }

    pub fn name(name: &str) -> STerm {
        STerm::App(name.to_string(), Vec::new(), Span::default())
    }
}

#[derive(Clone, Debug)]
pub enum SType {
    Obj(Span),
    Arr(Box<STerm>, Box<STerm>, Span),
    Inv(Box<STerm>, Span),
}

impl SType {
    pub fn span(&self) -> Span {
        match self {
            SType::Obj(s) | SType::Arr(_, _, s) | SType::Inv(_, s) => *s,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Binder {
    pub name: String,
    pub ty: SType,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum SBody {
    Coh(SType),
    Let(Option<SType>, STerm),
    Inv(Vec<STerm>),
    Rec(Vec<STerm>),
}

#[derive(Clone, Debug)]
pub struct SurfaceDecl {
    pub name: String,
    pub tele: Vec<Binder>,
    pub body: SBody,
    pub span: Span,
}

impl SurfaceDecl {
    pub fn keyword(&self) -> &'static str {
        match self.body {
            SBody::Coh(_) => "coh",
            SBody::Let(..) => "let",
            SBody::Inv(_) => "inv",
            SBody::Rec(_) => "rec",
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    end: Span,
}

fn err(span: Span, msg: impl std::fmt::Display) -> Error {
    Error::new(ErrorKind::Parse, format!("{span}: {msg}"))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn bump(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Span> {
        match self.bump() {
            Some((t, s)) if t == want => Ok(s),
            Some((t, s)) => Err(err(s, format!("expected `{want}`, found `{t}`"))),
            None => Err(err(
                self.end,
                format!("expected `{want}`, found end of input"),
            )),
        }
    }

    fn ident(&mut self) -> Result<(String, Span)> {
        match self.bump() {
            Some((Tok::Ident(s), sp)) if !is_reserved(&s) => Ok((s, sp)),
            Some((t, s)) => Err(err(s, format!("expected an identifier, found `{t}`"))),
            None => Err(err(self.end, "expected an identifier, found end of input")),
        }
    }

    fn decl(&mut self) -> Result<SurfaceDecl> {
        let (kw, span) = match self.bump() {
            Some((Tok::Ident(k), s)) if matches!(k.as_str(), "coh" | "let" | "inv" | "rec") => {
                (k, s)
            }
            Some((t, s)) => {
                return Err(err(
                    s,
                    format!("expected a declaration keyword, found `{t}`"),
                ))
            }
            None => unreachable!(),
        };
        let (name, _) = self.ident()?;
        let tele = self.telescope()?;
        let body = match kw.as_str() {
            "coh" => {
                self.expect(Tok::Colon)?;
                SBody::Coh(self.ty()?)
            }
            "let" => {
                let ty = if self.peek() == Some(&Tok::Colon) {
                    self.bump();
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::Eq)?;
                SBody::Let(ty, self.term()?)
            }
            _ => {
                self.expect(Tok::Eq)?;
                self.expect(Tok::LBrace)?;
                let comps = self.list(Tok::RBrace)?;
                if kw == "inv" {
                    SBody::Inv(comps)
                } else {
                    SBody::Rec(comps)
                }
            }
        };
        Ok(SurfaceDecl {
            name,
            tele,
            body,
            span,
        })
    }

    fn telescope(&mut self) -> Result<Vec<Binder>> {
        let mut out = Vec::new();
        while self.peek() == Some(&Tok::LParen) {
            self.bump();
            if matches!(self.peek(), Some(Tok::Ident(_))) && self.peek_at(1) == Some(&Tok::Colon) {
                let (name, span) = self.ident()?;
                self.bump();
                let ty = self.ty()?;
                out.push(Binder { name, ty, span });
            } else {
                self.ps(None, &mut out)?;
            }
            self.expect(Tok::RParen)?;
        }
        Ok(out)
    }

    /// `x (…) y (…) z`: objects or cells over `base`, each parenthesised
    /// group holding the cells between its two neighbours.
    fn ps(&mut self, base: Option<(&str, &str)>, out: &mut Vec<Binder>) -> Result<()> {
        let ty_of = |base: Option<(&str, &str)>, span| match base {
            None => SType::Obj(span),
            Some((a, b)) => SType::Arr(Box::new(STerm::name(a)), Box::new(STerm::name(b)), span),
        };
        let (mut prev, span) = self.ident()?;
        out.push(Binder {
            name: prev.clone(),
            ty: ty_of(base, span),
            span,
        });
        while self.peek() == Some(&Tok::LParen) {
            self.bump();
            let mark = out.len();
            let mut inner = Vec::new();
            // The inner cells are typed by the object that follows the group.
            let save = self.pos;
            self.skip_group()?;
            let (next, nspan) = self.ident()?;
            let after = self.pos;
            self.pos = save;
            self.ps(Some((&prev, &next)), &mut inner)?;
            self.expect(Tok::RParen)?;
            self.pos = after;
            out.insert(
                mark,
                Binder {
                    name: next.clone(),
                    ty: ty_of(base, nspan),
                    span: nspan,
                },
            );
            out.extend(inner);
            prev = next;
        }
        Ok(())
    }

    fn skip_group(&mut self) -> Result<()> {
        let mut depth = 1;
        while depth > 0 {
            match self.bump() {
                Some((Tok::LParen, _)) => depth += 1,
                Some((Tok::RParen, _)) => depth -= 1,
                Some(_) => {}
                None => return Err(err(self.end, "unclosed `(`")),
            }
        }
        Ok(())
    }

    fn ty(&mut self) -> Result<SType> {
        let span = self.span();
        match self.peek() {
            Some(Tok::Star) => {
                self.bump();
                Ok(SType::Obj(span))
            }
            Some(Tok::Ident(k)) if k == "Inv" => {
                self.bump();
                Ok(SType::Inv(Box::new(self.atom()?), span))
            }
            _ => {
                let src = self.term()?;
                self.expect(Tok::Arrow)?;
                let tgt = self.term()?;
                Ok(SType::Arr(Box::new(src), Box::new(tgt), span))
            }
        }
    }

    fn at_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Wild) | Some(Tok::LParen) => true,
            Some(Tok::Ident(s)) => !matches!(s.as_str(), "coh" | "let" | "inv" | "rec" | "Inv"),
            _ => false,
        }
    }

    fn term(&mut self) -> Result<STerm> {
        let span = self.span();
        if let Some(Tok::Ident(s)) = self.peek() {
            if !is_reserved(s) && Destructor::from_keyword(s).is_none() {
                let (head, _) = self.ident()?;
                let mut args = Vec::new();
                while self.at_atom() {
                    args.push(self.atom()?);
                }
                return Ok(STerm::App(head, args, span));
            }
        }
        let t = self.atom()?;
        if self.at_atom() {
            return Err(err(
                self.span(),
                "only a named declaration can be applied to arguments",
            ));
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<STerm> {
        let span = self.span();
        match self.bump() {
            Some((Tok::Wild, _)) => Ok(STerm::Wild(span)),
            Some((Tok::LParen, _)) => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some((Tok::Ident(s), _)) if s == "can" => {
                self.expect(Tok::LParen)?;
                let subject = self.term()?;
                self.expect(Tok::LBrace)?;
                let ws = self.list(Tok::RBrace)?;
                self.expect(Tok::RParen)?;
                Ok(STerm::Can(Box::new(subject), ws, span))
            }
            Some((Tok::Ident(s), _)) => {
                if let Some(d) = Destructor::from_keyword(&s) {
                    Ok(STerm::Destr(d, Box::new(self.atom()?), span))
                } else if is_reserved(&s) {
                    Err(err(span, format!("unexpected keyword `{s}`")))
                } else {
                    Ok(STerm::App(s, Vec::new(), span))
                }
            }
            Some((t, _)) => Err(err(span, format!("expected a term, found `{t}`"))),
            None => Err(err(self.end, "expected a term, found end of input")),
        }
    }

    /// Comma-separated terms up to and including `close`.
    fn list(&mut self, close: Tok) -> Result<Vec<STerm>> {
        let mut out = Vec::new();
        if self.peek() == Some(&close) {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            match self.bump() {
                Some((Tok::Comma, _)) => {}
                Some((t, _)) if t == close => return Ok(out),
                Some((t, s)) => {
                    return Err(err(s, format!("expected `,` or `{close}`, found `{t}`")))
                }
                None => {
                    return Err(err(
                        self.end,
                        format!("expected `{close}`, found end of input"),
                    ))
                }
            }
        }
    }
}

pub fn is_reserved(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub fn parse(text: &str) -> Result<Vec<SurfaceDecl>> {
    let toks = lex(text)?;
    let end = Span {
        line: text.lines().count().max(1),
        col: text.lines().last().map_or(1, |l| l.chars().count() + 1),
    };
    let mut p = Parser { toks, pos: 0, end };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.decl()?);
    }
    Ok(out)
}

/// Parses a single term, for tests and tools.
pub fn parse_term(text: &str) -> Result<STerm> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        end: Span::default(),
    };
    let t = p.term()?;
    if p.peek().is_some() {
        return Err(err(p.span(), "trailing input after term"));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(d: &SurfaceDecl) -> Vec<&str> {
        d.tele.iter().map(|b| b.name.as_str()).collect()
    }

    #[test]
    fn ps_shorthand_is_pasting_ordered() {
        let ds = parse("coh whiskl (x(f)y(g(a)h)z) : comp f g -> comp f h").unwrap();
        assert_eq!(names(&ds[0]), ["x", "y", "f", "z", "g", "h", "a"]);
        match &ds[0].tele[6].ty {
            SType::Arr(s, t, _) => {
                assert!(matches!(&**s, STerm::App(n, a, _) if n == "g" && a.is_empty()));
                assert!(matches!(&**t, STerm::App(n, _, _) if n == "h"));
            }
            _ => panic!(),
        }
        assert!(matches!(ds[0].tele[3].ty, SType::Obj(_)));
    }

    #[test]
    fn wildcard_and_destructor_arguments() {
        let ds = parse("coh unitl (x(f)y) : comp (id _) f -> f\nlet a (x : *) = assoc f g rinv(e)")
            .unwrap();
        assert_eq!(ds.len(), 2);
        let SBody::Let(None, STerm::App(h, args, _)) = &ds[1].body else {
            panic!()
        };
        assert_eq!(h, "assoc");
        assert_eq!(args.len(), 3);
        assert!(matches!(&args[2], STerm::Destr(Destructor::RInv, _, _)));
    }

    #[test]
    fn can_payload() {
        let ds =
            parse("let compinv (x : *) : Inv (comp f g) = can ( comp f g { e , e' })").unwrap();
        let SBody::Let(Some(SType::Inv(..)), STerm::Can(s, ws, _)) = &ds[0].body else {
            panic!()
        };
        assert!(matches!(&**s, STerm::App(h, a, _) if h == "comp" && a.len() == 2));
        assert_eq!(ws.len(), 2);
    }

    #[test]
    fn empty_file_and_errors() {
        assert!(parse("# nothing\n").unwrap().is_empty());
        let e = parse("coh x (x : *) :").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Parse);
        let e = parse("let a = (f) g").unwrap_err();
        assert!(e.message.starts_with("1:"), "{}", e.message);
    }
}

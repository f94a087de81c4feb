use std::fmt;

use crate::error::{Error, ErrorKind, Result};

/// 1-based line and column of a token's first character.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Wild,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Eq,
    Arrow,
    Star,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Wild => f.write_str("_"),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
            Tok::LBrace => f.write_str("{"),
            Tok::RBrace => f.write_str("}"),
            Tok::Comma => f.write_str(","),
            Tok::Colon => f.write_str(":"),
            Tok::Eq => f.write_str("="),
            Tok::Arrow => f.write_str("->"),
            Tok::Star => f.write_str("*"),
        }
    }
}

pub fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '-')
}

/// Splits source text into tokens. `#` starts a comment running to the end
/// of the line; identifiers stop before `->`.
pub fn lex(text: &str) -> Result<Vec<(Tok, Span)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let span = Span {
                line: ln + 1,
                col: i + 1,
            };
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            let single = match c {
                '(' => Some(Tok::LParen),
                ')' => Some(Tok::RParen),
                '{' => Some(Tok::LBrace),
                '}' => Some(Tok::RBrace),
                ',' => Some(Tok::Comma),
                ':' => Some(Tok::Colon),
                '=' => Some(Tok::Eq),
                '*' => Some(Tok::Star),
                _ => None,
            };
            if let Some(t) = single {
                out.push((t, span));
                i += 1;
                continue;
            }
            if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push((Tok::Arrow, span));
                i += 2;
                continue;
            }
            if is_ident_char(c) {
                let start = i;
                while i < chars.len()
                    && is_ident_char(chars[i])
                    && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>'))
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                out.push((
                    if word == "_" {
                        Tok::Wild
                    } else {
                        Tok::Ident(word)
                    },
                    span,
                ));
                continue;
            }
            return Err(Error::new(
                ErrorKind::Parse,
                format!("{span}: unexpected character {c:?}"),
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_split_identifiers() {
        let toks: Vec<Tok> = lex("f->g unitr- x'")
            .unwrap()
            .into_iter()
            .map(|t| t.0)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("f".into()),
                Tok::Arrow,
                Tok::Ident("g".into()),
                Tok::Ident("unitr-".into()),
                Tok::Ident("x'".into())
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let toks = lex("### banner ###\n  coh # trailing\n_").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].1, Span { line: 2, col: 3 });
        assert_eq!(toks[1].0, Tok::Wild);
        assert_eq!(lex("x ; y").unwrap_err().kind, ErrorKind::Parse);
    }
}

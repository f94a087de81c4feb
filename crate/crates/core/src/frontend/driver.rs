use super::lexer::Span;
use super::parser::parse;
use crate::elaborate::Elaborator;
use crate::error::Error;
use crate::kernel::Decl;

#[derive(Clone, Debug)]
pub struct CheckedDecl {
    pub keyword: &'static str,
    pub name: String,
    pub span: Span,
    pub result: Result<Decl, Error>,
}

/// The outcome of checking one source text, declaration by declaration.
#[derive(Default)]
pub struct Report {
    pub decls: Vec<CheckedDecl>,
    /// Set when the text does not parse; no declaration is checked then.
    pub parse_error: Option<Error>,
    pub elaborator: Elaborator,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.parse_error.is_none() && self.decls.iter().all(|d| d.result.is_ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckedDecl> {
        self.decls.iter().filter(|d| d.result.is_err())
    }
}

/// Parses, elaborates and checks every declaration in order. Without
/// `keep_going` checking stops at the first failure; with it, failed
/// declarations are skipped and later ones still checked.
pub fn check_source(text: &str, keep_going: bool) -> Report {
    let mut report = Report::default();
    let decls = match parse(text) {
        Ok(ds) => ds,
        Err(e) => {
            report.parse_error = Some(e);
            return report;
        }
    };
    for d in &decls {
        let result = report.elaborator.declare(d);
        let failed = result.is_err();
        report.decls.push(CheckedDecl {
            keyword: d.keyword(),
            name: d.name.clone(),
            span: d.span,
            result,
        });
        if failed && !keep_going {
            break;
        }
    }
    report
}

use std::io::Write;
use std::path::Path;

use icatt_core::equiv_analysis::{check_gamma, enumerate_neutrals, equiv_truncation};
use icatt_core::frontend::{check_source, show_ctx, show_term, show_type, Report};
use icatt_core::kernel::Decl;
use icatt_core::normalize::{beta, nf, nf_type};
use icatt_core::Error;

use crate::{Cli, Command};

/// Runs the command line and returns the exit code: 0 when everything
/// checked, 1 otherwise.
pub fn run(cli: &Cli, out: &mut dyn Write) -> std::io::Result<u8> {
    let mut code = 0;
    if let Some(n) = cli.neutral_count {
        writeln!(out, "{}", enumerate_neutrals(n).len())?;
    }
    if let Some(n) = cli.equiv_trunc {
        match equiv_truncation(n) {
            Ok(t) => writeln!(out, "{}", show_ctx(&t.ctx))?,
            Err(e) => {
                writeln!(out, "error: {e}")?;
                code = 1;
            }
        }
    }
    if let Some(n) = cli.check_gamma {
        match check_gamma(n) {
            Ok(r) => {
                write!(out, "{r}")?;
                if !r.ok() {
                    code = 1;
                }
            }
            Err(e) => {
                writeln!(out, "error: {e}")?;
                code = 1;
            }
        }
    }
    if let Some(Command::Check {
        files,
        dump_nf,
        verbose,
        keep_going,
        jobs,
    }) = &cli.command
    {
        let reports = check_files(files, *keep_going, *jobs)?;
        for (path, report) in files.iter().zip(&reports) {
            print_report(out, path, report, dump_nf, *verbose)?;
            if !report.ok() {
                code = 1;
            }
        }
    } else if cli.neutral_count.is_none() && cli.equiv_trunc.is_none() && cli.check_gamma.is_none()
    {
        writeln!(out, "nothing to do; see `icatt --help`")?;
        return Ok(2);
    }
    Ok(code)
}

fn check_files(
    files: &[std::path::PathBuf],
    keep_going: bool,
    jobs: usize,
) -> std::io::Result<Vec<Report>> {
    let texts = files
        .iter()
        .map(std::fs::read_to_string)
        .collect::<std::io::Result<Vec<_>>>()?;
    if jobs <= 1 || texts.len() <= 1 {
        return Ok(texts.iter().map(|t| check_source(t, keep_going)).collect());
    }
    let mut reports: Vec<Option<Report>> = (0..texts.len()).map(|_| None).collect();
    for (chunk_texts, chunk_out) in texts.chunks(jobs).zip(reports.chunks_mut(jobs)) {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk_texts
                .iter()
                .map(|t| s.spawn(move || check_source(t, keep_going)))
                .collect();
            for (slot, h) in chunk_out.iter_mut().zip(handles) {
                *slot = Some(h.join().expect("checker thread panicked"));
            }
        });
    }
    Ok(reports.into_iter().map(Option::unwrap).collect())
}

fn print_error(out: &mut dyn Write, e: &Error, verbose: bool) -> std::io::Result<()> {
    writeln!(out, "  {}: {}", e.kind, e.message)?;
    let frames: &[String] = if verbose {
        &e.trace
    } else {
        &e.trace[e.trace.len().saturating_sub(1)..]
    };
    for f in frames {
        writeln!(out, "    while {f}")?;
    }
    Ok(())
}

fn print_report(
    out: &mut dyn Write,
    path: &Path,
    report: &Report,
    dump: &[String],
    verbose: bool,
) -> std::io::Result<()> {
    let file = path.display();
    if let Some(e) = &report.parse_error {
        writeln!(out, "{file}: rejected")?;
        return print_error(out, e, verbose);
    }
    for d in &report.decls {
        match &d.result {
            Ok(decl) => {
                writeln!(out, "{file}:{}: {} {} accepted", d.span, d.keyword, d.name)?;
                if verbose {
                    print_decl(out, decl)?;
                }
            }
            Err(e) => {
                writeln!(out, "{file}:{}: {} {} rejected", d.span, d.keyword, d.name)?;
                print_error(out, e, verbose)?;
            }
        }
    }
    for name in dump {
        match report.elaborator.env.get(name) {
            Some(decl) => dump_nf(out, name, decl)?,
            None => writeln!(out, "{name}: not declared in {file}")?,
        }
    }
    Ok(())
}

fn print_decl(out: &mut dyn Write, decl: &Decl) -> std::io::Result<()> {
    match decl {
        Decl::Coh(h) => writeln!(
            out,
            "    {} : {}",
            show_ctx(&h.ctx),
            show_type(&h.ctx, &h.ty)
        ),
        Decl::Let { ctx, term, ty } => {
            writeln!(
                out,
                "    {} : {} = {}",
                show_ctx(ctx),
                show_type(ctx, ty),
                show_term(ctx, term)
            )
        }
        Decl::Rec { ctx, schema } => {
            writeln!(
                out,
                "    {} = {}",
                show_ctx(ctx),
                show_term(ctx, &icatt_core::syntax::Term::coind(schema.comps.clone()))
            )
        }
    }
}

fn dump_nf(out: &mut dyn Write, name: &str, decl: &Decl) -> std::io::Result<()> {
    match decl {
        Decl::Coh(h) => {
            let ty = nf_type(&h.ty).map(|t| show_type(&h.ctx, &t));
            writeln!(out, "{name} : {}", ty.unwrap_or_else(|e| e.to_string()))
        }
        Decl::Let { ctx, term, ty } => {
            let shown = if ty.is_categorical() {
                nf(term, ty).map(|t| show_term(ctx, &t))
            } else {
                beta(term).map(|t| show_term(ctx, &t))
            };
            writeln!(out, "{name} = {}", shown.unwrap_or_else(|e| e.to_string()))
        }
        Decl::Rec { ctx, schema } => {
            let comps = icatt_core::syntax::Term::coind(schema.comps.clone());
            writeln!(
                out,
                "{name} = {}",
                beta(&comps)
                    .map(|t| show_term(ctx, &t))
                    .unwrap_or_else(|e| e.to_string())
            )
        }
    }
}

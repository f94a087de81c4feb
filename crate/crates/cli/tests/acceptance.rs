//! One pass/fail line per acceptance criterion. Tolerances are exact unless
//! stated: the corpus must check in under 60 s and the whole gate in under
//! 5 minutes.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use common::gen::{build, heads};
use common::{all_judgments, can_judgments, corpus, padding_sub, top_judgments, Judgment};
use icatt_core::builders::destructor_type;
use icatt_core::elaborate::Elaborator;
use icatt_core::equiv_analysis::{check_gamma, enumerate_neutrals, equiv_truncation};
use icatt_core::frontend::check_source;
use icatt_core::inverse::canonical_component;
use icatt_core::kernel::{check_sub, infer, Decl};
use icatt_core::meta::{classify_term, classify_type, disk, display_for, walking_equiv};
use icatt_core::normalize::{beta, contract, convertible_types, erase_check, eta_expand, nf};
use icatt_core::syntax::{Destructor, Term, Type};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const CORPUS_LIMIT: Duration = Duration::from_secs(60);
const SUITE_LIMIT: Duration = Duration::from_secs(300);
const RANDOM_TERMS: usize = 1000;
const RANDOM_COINDS: usize = 200;
const SEED: u64 = 0x1ca77;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn corpus_check() -> Verdict {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../proofs/invertibility.catt");
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_icatt"))
        .arg("check")
        .arg(&path)
        .output()
        .expect("binary runs");
    let took = start.elapsed();
    let text = String::from_utf8_lossy(&out.stdout);
    let total = text.lines().count();
    let accepted = text.lines().filter(|l| l.ends_with(" accepted")).count();
    verdict(
        out.status.code() == Some(0) && accepted == total && total >= 25 && took < CORPUS_LIMIT,
        format!(
            "exit {:?}, {accepted}/{total} accepted, {:.2}s (limit 60s)",
            out.status.code(),
            took.as_secs_f64()
        ),
    )
}

fn negative_suite() -> Verdict {
    let mut wrong = Vec::new();
    for (name, kind, decl) in common::negative::CASES {
        match common::negative::outcome(decl) {
            Err(e) if e.kind == *kind => {}
            Err(e) => wrong.push(format!("{name}: got {}", e.kind)),
            Ok(()) => wrong.push(format!("{name}: accepted")),
        }
    }
    let n = common::negative::CASES.len();
    verdict(
        wrong.is_empty() && n >= 10,
        format!(
            "{}/{n} rejected with the expected category {wrong:?}",
            n - wrong.len()
        ),
    )
}

fn conservativity(el: &Elaborator, js: &[Judgment]) -> Verdict {
    let mut failures = Vec::new();
    let mut from_corpus = 0;
    for j in js
        .iter()
        .filter(|j| j.ctx.is_catt() && j.ty.is_categorical())
    {
        from_corpus += 1;
        if !erase_check(&j.term).unwrap_or(false) {
            failures.push(j.origin.clone());
        }
    }
    let heads = heads(el);
    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut random, mut with_inv) = (0, 0);
    while random < RANDOM_TERMS {
        let head = &heads[rng.gen_range(0..heads.len())];
        let codes: Vec<u32> = (0..rng.gen_range(1..6)).map(|_| rng.gen()).collect();
        let pool = build(head, &codes);
        let c = &pool.last().cell;
        let ty = match infer(&pool.ctx, &c.tm) {
            Ok(ty) => ty,
            Err(e) => {
                failures.push(format!("generator produced an ill-typed term: {e}"));
                continue;
            }
        };
        random += 1;
        with_inv += usize::from(!c.tm.is_catt());
        if !ty.is_categorical() || !erase_check(&c.tm).unwrap_or(false) {
            failures.push(format!("random term from {:?}", codes));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{from_corpus} corpus terms, {random} random terms ({with_inv} with invertibility constructors), {} failures",
            failures.len()
        ),
    )
}

fn beta_eta(el: &Elaborator, js: &[Judgment]) -> Verdict {
    let heads = heads(el);
    let mut rng = StdRng::seed_from_u64(SEED + 1);
    let (mut coinds, mut failures) = (0, Vec::new());
    while coinds < RANDOM_COINDS {
        let head = &heads[rng.gen_range(0..heads.len())];
        let codes: Vec<u32> = (0..rng.gen_range(1..6)).map(|_| rng.gen()).collect();
        let pool = build(head, &codes);
        for cell in pool.cells.iter().filter(|c| c.witness.is_some()) {
            let w = cell.witness.as_ref().unwrap();
            let wty = cell.witness_type();
            let expanded = eta_expand(w, &wty).unwrap();
            let Ok(Term::Coind(comps)) = beta(&expanded) else {
                failures.push("η-expansion did not normalise to a coind".to_string());
                continue;
            };
            let coind = Term::coind((*comps).clone());
            if !infer(&pool.ctx, &coind).is_ok_and(|t| convertible_types(&t, &wty)) {
                failures.push("coind fails to check".to_string());
            }
            coinds += 1;
            for d in Destructor::ALL {
                if contract(d, &coind).ok().flatten().as_ref() != Some(&comps[d.component()]) {
                    failures.push(format!("{d} does not project"));
                }
                if beta(&Term::destr(d, expanded.clone())).ok()
                    != beta(&Term::destr(d, w.clone())).ok()
                {
                    failures.push(format!("{d}: η-then-β and β disagree"));
                }
            }
        }
    }
    let mut idem = 0;
    for j in js.iter().filter(|j| j.ty.is_categorical()) {
        let n = nf(&j.term, &j.ty).unwrap();
        if nf(&n, &j.ty).unwrap() != n {
            failures.push(format!("{}: nf not idempotent", j.origin));
        }
        idem += 1;
    }
    verdict(
        failures.is_empty(),
        format!("{coinds} coind terms x 6 destructors, nf idempotent on {idem} corpus terms, {} failures", failures.len()),
    )
}

fn preservation(js: &[Judgment]) -> Verdict {
    let mut failures = Vec::new();
    for j in js {
        let s = padding_sub(&j.ctx);
        let subst_ok = check_sub(&j.ctx, &s, &j.ctx).is_ok()
            && infer(&j.ctx, &j.term.subst(&s))
                .is_ok_and(|t| convertible_types(&t, &j.ty.subst(&s)));
        let susp_ok = infer(&j.ctx.suspend(), &j.term.suspend())
            .is_ok_and(|t| convertible_types(&t, &j.ty.suspend()));
        if !subst_ok || !susp_ok {
            failures.push(j.origin.clone());
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{}/{} corpus terms re-check under both {failures:?}",
            js.len() - failures.len(),
            js.len()
        ),
    )
}

fn classifiers(js: &[Judgment]) -> Verdict {
    let mut failures = Vec::new();
    for j in js {
        let chi = classify_term(&j.term, &j.ty);
        let target = match j.ty {
            Type::Inv(..) => walking_equiv(j.ty.dim() as usize),
            _ => disk((j.ty.dim() + 1) as usize),
        };
        if display_for(&j.ty).compose(&chi) != classify_type(&j.ty)
            || check_sub(&j.ctx, &chi, &target).is_err()
        {
            failures.push(j.origin.clone());
        }
    }
    verdict(
        failures.is_empty(),
        format!("{}/{} corpus terms", js.len() - failures.len(), js.len()),
    )
}

fn neutral_counts() -> Verdict {
    let counts: Vec<usize> = (0..=7).map(|n| enumerate_neutrals(n).len()).collect();
    let expected = [2usize, 3, 6, 12, 24, 48, 96, 192];
    let formula = (2..=7).all(|n| counts[n] == 3 << (n - 1));
    // brute force: every destructor string over the variables of E^1
    let e1 = walking_equiv(1);
    let mut brute: Vec<HashSet<Term>> = vec![HashSet::new(); 6];
    let mut frontier: Vec<Term> = (0..e1.len()).map(Term::Var).collect();
    for round in 0..=7 {
        let mut next = Vec::new();
        for t in frontier {
            let Ok(ty) = infer(&e1, &t) else { continue };
            let d = (ty.dim() + 1) as usize;
            if ty.is_categorical() && d <= 5 {
                brute[d].insert(t.clone());
            }
            if round < 7 {
                next.extend(Destructor::ALL.iter().map(|&d| Term::destr(d, t.clone())));
            }
        }
        frontier = next;
    }
    let agree =
        (0..=5).all(|n| enumerate_neutrals(n).into_iter().collect::<HashSet<_>>() == brute[n]);
    verdict(
        counts == expected && formula && agree,
        format!("counts {counts:?}, brute force agrees for n <= 5: {agree}"),
    )
}

fn truncations() -> Verdict {
    let listing = "(x : *) (y : *) (u : x -> y) (v : y -> x) (w : y -> x) \
        (u_v : comp v u -> id y) (v_v : id y -> comp v u) (w_v : id y -> comp v u) \
        (u_w : comp u w -> id x) (v_w : id x -> comp u w) (w_w : id x -> comp u w)";
    let report = check_source(&format!("let t {listing} : x -> y = u\n"), false);
    let listed = match report.elaborator.env.get("t") {
        Some(Decl::Let { ctx, .. }) => Some(ctx.clone()),
        _ => None,
    };
    let trunc = equiv_truncation(2).unwrap();
    let same = listed.is_some_and(|c| {
        c.len() == trunc.ctx.len()
            && (0..c.len()).all(|x| c.ty(x) == trunc.ctx.ty(x))
            && c.names() == trunc.ctx.names()
    });
    let gamma = check_gamma(3).unwrap();
    verdict(
        same && gamma.ok(),
        format!(
            "E^(1,2) matches listing: {same}, gamma levels 0..3 ok: {}",
            gamma.ok()
        ),
    )
}

fn canonical(el: &Elaborator, started: Instant) -> Verdict {
    let cans = can_judgments(el);
    let mut failures = Vec::new();
    for j in &cans {
        let Term::Can(c, ws) = &j.term else {
            unreachable!()
        };
        for d in Destructor::ALL {
            let ok = canonical_component(c, ws, d).is_ok_and(|comp| {
                let want = destructor_type(d, &j.term, &j.ty).unwrap();
                infer(&j.ctx, &comp).is_ok_and(|got| convertible_types(&got, &want))
            });
            if !ok {
                failures.push(format!("{} / {d}", j.origin));
            }
        }
    }
    let took = started.elapsed();
    verdict(
        failures.is_empty() && took < SUITE_LIMIT,
        format!(
            "{} can terms x 6 components, {} failures, suite {:.1}s (limit 300s)",
            cans.len(),
            failures.len(),
            took.as_secs_f64()
        ),
    )
}

#[test]
fn acceptance() {
    let started = Instant::now();
    let el = corpus();
    let all = all_judgments(&el);
    let top = top_judgments(&el);
    let mut rows: Vec<(&str, Verdict)> = vec![("corpus check", corpus_check())];
    rows.push(("negative suite", negative_suite()));
    rows.push(("conservativity erasure", conservativity(&el, &all)));
    rows.push(("beta/eta laws", beta_eta(&el, &all)));
    let mut pres = top.clone();
    pres.extend(all.iter().cloned());
    rows.push(("typing preservation", preservation(&pres)));
    rows.push(("classifier round-trip", classifiers(&all)));
    rows.push(("neutral counts", neutral_counts()));
    rows.push(("truncation fidelity", truncations()));
    rows.push(("invertibility instances", canonical(&el, started)));
    // written to the process's stdout directly so the lines survive the
    // test harness's output capture
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for (i, (name, v)) in rows.iter().enumerate() {
        let mark = if v.pass { "PASS" } else { "FAIL" };
        writeln!(out, "criterion {} {name}: {mark} ({})", i + 1, v.detail).unwrap();
        failed += usize::from(!v.pass);
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}

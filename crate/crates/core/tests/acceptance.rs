//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails. All comparisons are exact over ℚ.

use qva_core::ding_iohara::{
    component_table, invariant_lines, nilpotency_certificate, verify_aalpha, verify_graded_relations, verma_sweep,
    AAlphaModule,
};
use qva_core::fock::{apply_bar_mode, FockVector, Statistics};
use qva_core::par::Exec;
use qva_core::ratfunc::{canonicalize, factor_h, RationalFn};
use qva_core::report::CheckReport;
use qva_core::scalar::{frac, int, Scalar};
use qva_core::series::{iota_z0, TruncSeries};
use qva_core::vacuum::{self, required_trunc, AhContext};
use qva_core::Gen;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

/// Every identity must hold with zero defect.
const TOLERANCE: i64 = 0;
const RELATION_DEGREE: u32 = 4;
const RELATION_WINDOW: (i64, i64) = (-4, 5);
const MAX_SECONDS_PER_G: u64 = 120;
const PBW_DEGREE: u32 = 5;
const SERIES_ORDER: i64 = 15;
const PRODUCT_MODES: i64 = 5;
const DERIVATION_DEGREE: u32 = 3;
const DERIVATION_WINDOW: (i64, i64) = (-3, 4);
const PHI_DERIVATION_MAX: u32 = 4;
const DEGENERATION_DEGREE: u32 = 5;
const DEGENERATION_WINDOW: (i64, i64) = (-5, 6);
const VERMA_DEGREE: u32 = 2;
const VERMA_CAPS: [u32; 3] = [2, 3, 4];

fn g_list() -> Vec<(&'static str, RationalFn)> {
    let r = |n: &[i64], d: &[i64]| RationalFn::from_ints(n, d).unwrap();
    vec![
        ("1", r(&[1], &[1])),
        ("z", r(&[0, 1], &[1])),
        ("-z^2", r(&[0, 0, -1], &[1])),
        ("(z-2)/(1-2z)", r(&[-2, 1], &[1, -2])),
        // -(z-2)(z-1/2) / ((1-2z)(1-z/2)), both sides scaled by 2
        ("-(z-2)(z-1/2)/((1-2z)(1-z/2))", r(&[-2, 5, -2], &[2, -5, 2])),
        ("(z-2)(z-3)/((1-2z)(1-3z))", r(&[6, -5, 1], &[1, -5, 6])),
    ]
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn failing(reports: &[CheckReport]) -> Vec<String> {
    reports.iter().filter(|r| !r.passed()).map(CheckReport::summary_line).collect()
}

struct Contexts(BTreeMap<&'static str, AhContext>);

impl Contexts {
    fn build() -> Self {
        let trunc = required_trunc(RELATION_DEGREE, RELATION_WINDOW.0);
        Contexts(g_list().into_iter().map(|(n, g)| (n, AhContext::from_g(&g, trunc).unwrap())).collect())
    }
}

fn relations(ctxs: &Contexts) -> Outcome {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut checked = 0;
    for (name, ctx) in &ctxs.0 {
        let t = Instant::now();
        let reps = vacuum::verify_relations(ctx, RELATION_DEGREE, RELATION_WINDOW, Exec::Parallel);
        let el = t.elapsed();
        slowest = slowest.max(el);
        checked += reps.iter().map(|r| r.checked).sum::<usize>();
        for f in failing(&reps) {
            bad.push(format!("{name}: {f}"));
        }
        if el > Duration::from_secs(MAX_SECONDS_PER_G) {
            bad.push(format!("{name}: {el:?} over budget"));
        }
    }
    outcome(bad.is_empty(), format!("{checked} identities, slowest g {:.1}s {bad:?}", slowest.as_secs_f64()))
}

/// Brute-force count of index triples: each factor of the monomial is a
/// (generator, part) pair; enumerate multisets of parts directly.
fn oracle_count(d: u32, strict_ef: bool) -> usize {
    fn parts(n: u32, max: u32, strict: bool) -> usize {
        if n == 0 {
            return 1;
        }
        (1..=max.min(n)).map(|k| parts(n - k, if strict { k - 1 } else { k }, strict)).sum()
    }
    let mut total = 0;
    for a in 0..=d {
        for b in 0..=(d - a) {
            let c = d - a - b;
            total += parts(a, a, strict_ef) * parts(b, b, strict_ef) * parts(c, c, false);
        }
    }
    total
}

fn pbw() -> Outcome {
    let plain: Vec<usize> = (0..=PBW_DEGREE).map(|d| oracle_count(d, false)).collect();
    let sup: Vec<usize> = (0..=PBW_DEGREE).map(|d| oracle_count(d, true)).collect();
    // Printed for comparison only; the gate is rank == oracle count. The
    // strict-e/f, weak-ψ basis gives 32 and 61 in degrees 4 and 5.
    let listed = ([1usize, 3, 9, 22, 51, 108], [1usize, 3, 7, 16, 33, 65]);
    let listed_note: Vec<u32> = (0..=PBW_DEGREE)
        .filter(|&d| plain[d as usize] != listed.0[d as usize] || sup[d as usize] != listed.1[d as usize])
        .collect();
    let trunc = required_trunc(PBW_DEGREE, -(PBW_DEGREE as i64));
    let gp = RationalFn::from_ints(&[-2, 1], &[1, -2]).unwrap();
    let gs = RationalFn::from_ints(&[2, -1], &[1, -2]).unwrap();
    let mut ok = true;
    let mut ranks = Vec::new();
    for (g, expect) in [(gp, &plain), (gs, &sup)] {
        let ctx = AhContext::from_g(&g, trunc).unwrap();
        let r = vacuum::verify_pbw_independence(&ctx, PBW_DEGREE, Exec::Parallel);
        let rk: Vec<usize> = r.degrees.iter().map(|d| d.rank).collect();
        let ct: Vec<usize> = r.degrees.iter().map(|d| d.count).collect();
        ok &= r.passed && &rk == expect && &ct == expect;
        ranks.push(rk);
    }
    outcome(
        ok,
        format!("oracle plain {plain:?} super {sup:?}; ranks {ranks:?}; oracle differs from listed counts {listed:?} at degrees {listed_note:?}"),
    )
}

fn coefficients_vanish(s: &TruncSeries, upto: i64) -> bool {
    s.trunc() > upto && (s.lo().min(0)..=upto).all(|k| s.coeff(k) == TOLERANCE)
}

fn factorization() -> Outcome {
    let mut bad = Vec::new();
    for (name, g) in g_list() {
        let cg = canonicalize(&g).unwrap();
        let f = factor_h(&cg, SERIES_ORDER + 1).unwrap();
        if !coefficients_vanish(&f.defect(), SERIES_ORDER) {
            bad.push(name);
        }
    }
    outcome(bad.is_empty(), format!("eps q(x)/q(-x) - h through x^{SERIES_ORDER}; failing {bad:?}"))
}

fn duality() -> Outcome {
    let mut bad = Vec::new();
    for (name, g) in g_list() {
        let w = SERIES_ORDER + 8;
        let prod = &iota_z0(&g, w) * &iota_z0(&g.reflected(), w);
        let defect = &prod - &TruncSeries::one(prod.trunc());
        if !coefficients_vanish(&defect, SERIES_ORDER) {
            bad.push(name);
        }
    }
    outcome(bad.is_empty(), format!("g(z) g(1/z) = 1 through z^{SERIES_ORDER}; failing {bad:?}"))
}

fn products(ctxs: &Contexts) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, ctx) in &ctxs.0 {
        let r = vacuum::remark_products(ctx, PRODUCT_MODES);
        checked += r.checked;
        if !r.passed() {
            bad.push(format!("{name}: {}", r.summary_line()));
        }
    }
    outcome(bad.is_empty(), format!("{checked} products over 6 g {bad:?}"))
}

fn derivation(ctxs: &Contexts) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, ctx) in &ctxs.0 {
        let reps = vacuum::verify_derivation(ctx, DERIVATION_DEGREE, DERIVATION_WINDOW, PHI_DERIVATION_MAX, Exec::Parallel);
        checked += reps.iter().map(|r| r.checked).sum::<usize>();
        for f in failing(&reps) {
            bad.push(format!("{name}: {f}"));
        }
    }
    outcome(bad.is_empty(), format!("{checked} identities {bad:?}"))
}

fn degeneration() -> Outcome {
    let g = RationalFn::from_ints(&[1], &[1]).unwrap();
    let ctx = AhContext::from_g(&g, required_trunc(DEGENERATION_DEGREE, DEGENERATION_WINDOW.0)).unwrap();
    let r = vacuum::degeneration_check(&ctx, DEGENERATION_DEGREE, DEGENERATION_WINDOW, Exec::Parallel);
    // spot check through the public bar-mode API as well
    let one = FockVector::vacuum(Statistics::Plain);
    let spot = ctx.apply_mode(Gen::Psi, -3, &one) == apply_bar_mode(Gen::Psi, -3, &one);
    outcome(r.passed() && spot, r.summary_line())
}

fn aalpha() -> Outcome {
    let minus_one = int(-1);
    let mut notes = Vec::new();
    let mut ok = true;
    for l in [1, 2, -3] {
        let u = AAlphaModule::u_lambda(&int(l));
        let r = verify_aalpha(&u, &minus_one);
        let irreducible = invariant_lines(&u).map(|s| s.is_empty()).unwrap_or(false);
        ok &= r.passed() && irreducible;
        notes.push(format!("U({l}) relations {} irreducible {irreducible}", r.passed()));
    }
    for a in [int(-2), int(3), frac(1, 2)] {
        let c = nilpotency_certificate(&a);
        ok &= c.passed;
        notes.push(format!("alpha={a} nilpotent {}", c.passed));
    }
    outcome(ok, notes.join("; "))
}

fn verma() -> Outcome {
    let g = RationalFn::from_ints(&[-2, 5, -2], &[2, -5, 2]).unwrap();
    let cg = canonicalize(&g).unwrap();
    let table = component_table(&cg, 2 * VERMA_DEGREE as i64 + 6);
    let u = AAlphaModule::u_lambda(&int(2));
    let alpha_ok = table.alpha() == Ok(Scalar::from(-1));
    let ms = match verma_sweep(&table, &u, VERMA_DEGREE, &VERMA_CAPS) {
        Ok(ms) => ms,
        Err(e) => return outcome(false, e.to_string()),
    };
    let dims: Vec<Vec<usize>> = ms.iter().map(|m| m.dims.clone()).collect();
    let decreasing = dims.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| b <= a));
    let last = ms.last().unwrap();
    let stabilized = last.stabilized.iter().all(|&s| s);
    let mut verified = true;
    let mut stable_degrees = 0;
    for m in &ms {
        let r = verify_graded_relations(&table, m, VERMA_DEGREE, Exec::Parallel);
        verified &= r.passed_on_stabilized();
        stable_degrees += r.per_degree.iter().filter(|d| d.stabilized && d.checked > 0).count();
    }
    let ok = alpha_ok && decreasing && stabilized && verified && stable_degrees > 0;
    outcome(ok, format!("dims by cap {dims:?}, stabilized {:?}, relations on stabilized degrees {verified}", last.stabilized))
}

fn located(reps: &[CheckReport]) -> Option<String> {
    reps.iter().find(|r| !r.passed()).and_then(|r| r.witnesses.first()).map(|w| w.location.clone())
}

fn negative_controls(ctxs: &Contexts) -> Outcome {
    let base = &ctxs.0["(z-2)/(1-2z)"];
    let h = base.h();
    let coeffs: Vec<Scalar> = (0..h.trunc())
        .map(|k| if k == 1 { h.coeff(1) + Scalar::from(1) } else { h.coeff(k) })
        .collect();
    let corrupted = base.with_relation_h(TruncSeries::new(0, coeffs, h.trunc()));
    let w1 = located(&vacuum::verify_relations(&corrupted, 2, (-2, 3), Exec::Parallel));

    let sup = &ctxs.0["-z^2"];
    let flipped = sup.with_statistics(Statistics::SuperKoszul);
    let w2 = located(&vacuum::verify_relations(&flipped, 2, (-2, 3), Exec::Parallel));

    let mut u = AAlphaModule::u_lambda(&int(2));
    u.f0[1][0] += 1;
    let w3 = located(&[verify_aalpha(&u, &int(-1))]);

    let ok = w1.is_some() && w2.is_some() && w3.is_some();
    outcome(ok, format!("h1+1 -> {w1:?}; flipped signs -> {w2:?}; U(2) perturbed -> {w3:?}"))
}

fn main() {
    let t = Instant::now();
    let ctxs = Contexts::build();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("ah relation suite", Box::new(|| relations(&ctxs))),
        ("pbw independence", Box::new(pbw)),
        ("factorization identity", Box::new(factorization)),
        ("expansion duality", Box::new(duality)),
        ("generator products", Box::new(|| products(&ctxs))),
        ("derivation suite", Box::new(|| derivation(&ctxs))),
        ("degeneration", Box::new(degeneration)),
        ("A[alpha] suite", Box::new(aalpha)),
        ("graded relation suite", Box::new(verma)),
        ("negative controls", Box::new(|| negative_controls(&ctxs))),
    ];
    println!("acceptance: tolerance {TOLERANCE} (exact rationals)");
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let s = Instant::now();
        let o = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| outcome(false, "panicked"));
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{:>2}] {} {name} ({:.1}s): {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            s.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} passed in {:.1}s", criteria.len() - failed, criteria.len(), t.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}

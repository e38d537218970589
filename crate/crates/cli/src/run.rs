use crate::input::{self, CliError};
use crate::{Cli, Cmd, GArg, VerifyCmd};
use qva_core::ding_iohara::{
    self as di, classify_aalpha, component_table, invariant_lines, verify_aalpha, verify_graded_relations, verma_sweep,
    AAlphaClassification, AAlphaModule,
};
use qva_core::fock::apply_bar_mode;
use qva_core::par::Exec;
use qva_core::phi;
use qva_core::ratfunc::{canonicalize, factor_h, RationalFn};
use qva_core::report::{CheckReport, SuiteReport};
use qva_core::scalar::format_scalar;
use qva_core::series::{iota_exp, iota_wz_ratio, iota_z0, iota_zinf, Window};
use qva_core::vacuum::{self, required_trunc, AhContext};
use qva_core::Gen;
use serde_json::{json, Value};
use std::time::Instant;

struct Loaded {
    g: RationalFn,
    raw: Value,
    trunc: i64,
}

fn load(arg: &GArg, auto: i64, floor: i64) -> Result<Loaded, CliError> {
    let (g, raw) = input::parse_g(&arg.g)?;
    let trunc = arg.trunc.unwrap_or(auto);
    if trunc < floor {
        return Err(CliError::Config(format!("--trunc {trunc} is below the required {floor}")));
    }
    Ok(Loaded { g, raw, trunc })
}

fn ah(l: &Loaded) -> Result<AhContext, CliError> {
    Ok(AhContext::from_g(&l.g, l.trunc)?)
}

fn config(cli: &Cli, l: Option<&Loaded>, extra: Value) -> Value {
    let mut c = json!({
        "seed": cli.seed,
        "exec": if cli.sequential { "sequential" } else { "parallel" },
    });
    if let Some(l) = l {
        c["g"] = l.raw.clone();
        c["series_trunc"] = json!(l.trunc);
    }
    if let Value::Object(m) = extra {
        for (k, v) in m {
            c[k] = v;
        }
    }
    c
}

/// Writes the report and returns the exit status for `passed`.
fn emit(cli: &Cli, report: &Value, summary: &[String], passed: bool) -> Result<u8, CliError> {
    let text = serde_json::to_string_pretty(report).expect("serializable") + "\n";
    if let Some(p) = &cli.out {
        std::fs::write(p, &text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    if cli.json || summary.is_empty() {
        print!("{text}");
    } else {
        for s in summary {
            println!("{s}");
        }
    }
    Ok(if passed { 0 } else { 1 })
}

fn suite(cli: &Cli, name: &str, cfg: Value, checks: Vec<CheckReport>) -> Result<u8, CliError> {
    let r = SuiteReport::new(name, cfg, checks);
    let mut lines: Vec<String> = r.checks.iter().map(CheckReport::summary_line).collect();
    for c in r.checks.iter().filter(|c| !c.passed()) {
        for w in &c.witnesses {
            lines.push(format!("  witness {}: {}", c.name, w.location));
        }
    }
    lines.push(format!("{} {}", if r.passed { "PASS" } else { "FAIL" }, name));
    let passed = r.passed;
    emit(cli, &serde_json::to_value(&r).expect("serializable"), &lines, passed)
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let t = Instant::now();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let code = dispatch(cli, exec)?;
    if cli.timing {
        eprintln!("elapsed {:.3}s", t.elapsed().as_secs_f64());
    }
    Ok(code)
}

fn dispatch(cli: &Cli, exec: Exec) -> Result<u8, CliError> {
    match &cli.cmd {
        Cmd::Expand { g, window } => {
            let l = load(g, 16, 1)?;
            let cg = canonicalize(&l.g)?;
            let mut out = json!({
                "canonical": cg,
                "alpha": cg.alpha().map(|a| format_scalar(&a)),
                "epsilon": cg.epsilon(),
                "iota_z0": iota_z0(&l.g, l.trunc),
                "iota_zinf": iota_zinf(&l.g, l.trunc),
                "h": iota_exp(&cg.reconstruct(), l.trunc),
            });
            if let Some(w) = window {
                let (a, b) = input::window(&Some(w.clone()), 0)?;
                out["ratio"] = json!(iota_wz_ratio(&l.g, Window { z: (a, b), w: (-b, -a) }));
            }
            let report = json!({"command": "expand", "config": config(cli, Some(&l), json!({})), "result": out});
            emit(cli, &report, &[], true)
        }
        Cmd::Factor { g } => {
            let l = load(g, 16, 1)?;
            let cg = canonicalize(&l.g)?;
            let f = factor_h(&cg, l.trunc)?;
            let exact = f.defect().is_zero();
            let report = json!({
                "command": "factor",
                "config": config(cli, Some(&l), json!({})),
                "result": {"factorization": f, "defect_zero": exact},
            });
            emit(cli, &report, &[], exact)
        }
        Cmd::VacuumBasis { g, degree } => {
            let l = load(g, required_trunc(*degree, -(*degree as i64)), *degree as i64 + 4)?;
            let ctx = ah(&l)?;
            let degrees: Vec<Value> = (0..=*degree)
                .map(|d| {
                    let vs: Vec<Value> = vacuum::pbw_vectors(&ctx, d)
                        .into_iter()
                        .map(|(m, v)| json!({"index": m.to_string(), "vector": v.to_json()}))
                        .collect();
                    json!({"degree": d, "count": vs.len(), "vectors": vs})
                })
                .collect();
            let report = json!({
                "command": "vacuum-basis",
                "config": config(cli, Some(&l), json!({"degree_bound": degree, "statistics": ctx.stats()})),
                "result": degrees,
            });
            emit(cli, &report, &[], true)
        }
        Cmd::Act { g, gen, m, vector, bar } => {
            let a = Gen::parse(gen).ok_or_else(|| CliError::Config(format!("unknown generator {gen}")))?;
            let (probe, _) = input::parse_g(&g.g)?;
            let stats = ah(&Loaded { g: probe.clone(), raw: Value::Null, trunc: 4 })?.stats();
            let v = input::parse_vector(vector, stats)?;
            let w = v.weight().unwrap_or(0) as i64;
            let need = required_trunc(w.max(0) as u32 + 1, (*m).min(0));
            let l = load(g, need, 1)?;
            let ctx = ah(&l)?;
            let out = if *bar { apply_bar_mode(a, *m, &v) } else { ctx.apply_mode(a, *m, &v) };
            let report = json!({
                "command": "act",
                "config": config(cli, Some(&l), json!({"gen": a, "m": m, "bar": bar})),
                "result": out.to_json(),
            });
            emit(cli, &report, &[], true)
        }
        Cmd::Phi { g, i, vector, check, degree } => {
            let l = load(g, required_trunc(*degree, -(*degree as i64)).max(*i as i64 + *degree as i64 + 4), 1)?;
            let ctx = ah(&l)?;
            if *check {
                let p = ctx.phi();
                let checks = vec![
                    phi::phi_preserves_filtration_check(p, *degree, exec),
                    phi::commutation_check(p, *degree, *i, exec),
                    phi::commutativity_check(p, *degree, *i, exec),
                    phi::derivation_check(p, *degree, *i, exec),
                ];
                return suite(cli, "phi", config(cli, Some(&l), json!({"degree_bound": degree, "imax": i})), checks);
            }
            let v = input::parse_vector(vector.as_deref().unwrap_or("vacuum"), ctx.stats())?;
            let out = ctx.phi().apply(*i as i64, &v).map_err(|e| CliError::Config(e.to_string()))?;
            let report = json!({"command": "phi", "config": config(cli, Some(&l), json!({"i": i})), "result": out.to_json()});
            emit(cli, &report, &[], true)
        }
        Cmd::Verify(v) => verify(cli, v, exec),
        Cmd::ClassifyAalpha { alpha, lambda } => {
            let a = input::parse_scalar(alpha)?;
            let c = classify_aalpha(&a)?;
            let mut out = json!({"classification": c});
            let mut passed = match &c {
                AAlphaClassification::Nilpotent { certificate, .. } => certificate.passed,
                _ => true,
            };
            let mut lines = vec![match &c {
                AAlphaClassification::Nilpotent { certificate, .. } => {
                    format!("alpha={}: one irreducible (trivial); nilpotency certificate {}", format_scalar(&a), if certificate.passed { "PASS" } else { "FAIL" })
                }
                AAlphaClassification::MinusOne { family, .. } => format!("alpha=-1: trivial module and {family}"),
                AAlphaClassification::Heisenberg { identification, .. } => format!("alpha=1: OPEN ({identification}); no classification claimed"),
            }];
            if let (Some(ls), AAlphaClassification::MinusOne { .. }) = (lambda, &c) {
                let lam = input::parse_scalar(ls)?;
                if lam == 0 {
                    return Err(CliError::Config("lambda must be nonzero".into()));
                }
                let u = AAlphaModule::u_lambda(&lam);
                let rel = verify_aalpha(&u, &a);
                let lines_inv = invariant_lines(&u)?;
                let ev = di::eigenvalues_2x2(&u.psi0).map(|v| v.iter().map(format_scalar).collect::<Vec<_>>());
                passed &= rel.passed() && lines_inv.is_empty();
                lines.push(rel.summary_line());
                lines.push(format!("U({}) irreducible: {}; Psi0 eigenvalues {:?}", format_scalar(&lam), lines_inv.is_empty(), ev.clone().unwrap_or_default()));
                out["u_lambda"] = json!({"module": u, "relations": rel, "invariant_lines": lines_inv, "psi0_eigenvalues": ev});
            }
            let report = json!({"command": "classify-aalpha", "config": config(cli, None, json!({"alpha": format_scalar(&a)})), "result": out});
            emit(cli, &report, &lines, passed)
        }
        Cmd::Verma { g, module, degree, word_cap } => {
            let l = load(g, 2 * *degree as i64 + 6, 2 * *degree as i64 + 2)?;
            let u = input::parse_module(module)?;
            let table = component_table(&canonicalize(&l.g)?, l.trunc);
            let m = di::build_verma(&table, &u, *degree, *word_cap)?;
            let lines = vec![format!("dims {:?} (cap {}), at cap {}: {:?}, stabilized {:?}", m.dims, word_cap, word_cap + 1, m.dims_next, m.stabilized)];
            let report = json!({
                "command": "verma",
                "config": config(cli, Some(&l), json!({"degree_bound": degree, "word_cap": word_cap})),
                "result": m,
            });
            emit(cli, &report, &lines, true)
        }
    }
}

fn verify(cli: &Cli, v: &VerifyCmd, exec: Exec) -> Result<u8, CliError> {
    match v {
        VerifyCmd::Ah { g, degree, window } => {
            let w = input::window(&window.window, *degree)?;
            let l = load(g, required_trunc(*degree, w.0), *degree as i64 + 4)?;
            let ctx = ah(&l)?;
            let mut checks = vacuum::verify_relations(&ctx, *degree, w, exec);
            checks.push(vacuum::creation_and_filtration(&ctx, *degree, w));
            let cfg = config(cli, Some(&l), json!({"degree_bound": degree, "mode_window": [w.0, w.1], "statistics": ctx.stats()}));
            suite(cli, "ah-relations", cfg, checks)
        }
        VerifyCmd::Independence { g, degree } => {
            let l = load(g, required_trunc(*degree, -(*degree as i64)), *degree as i64 + 4)?;
            let ctx = ah(&l)?;
            let r = vacuum::verify_pbw_independence(&ctx, *degree, exec);
            let mut check = CheckReport::new("pbw-rank");
            for d in &r.degrees {
                check.check(d.rank == d.count, || (format!("degree {}", d.degree), json!({"rank": d.rank, "count": d.count})));
            }
            let cfg = config(cli, Some(&l), json!({"degree_bound": degree, "statistics": ctx.stats(), "ranks": r.degrees}));
            suite(cli, "independence", cfg, vec![check])
        }
        VerifyCmd::Derivation { g, degree, window, phi_max } => {
            let w = input::window(&window.window, *degree)?;
            let l = load(g, required_trunc(*degree + 1, w.0 - 1).max(*degree as i64 + *phi_max as i64 + 6), *degree as i64 + 4)?;
            let ctx = ah(&l)?;
            let checks = vacuum::verify_derivation(&ctx, *degree, w, *phi_max, exec);
            let cfg = config(cli, Some(&l), json!({"degree_bound": degree, "mode_window": [w.0, w.1], "phi_max": phi_max}));
            suite(cli, "derivation", cfg, checks)
        }
        VerifyCmd::Atilde { g, module, degree, word_cap } => {
            let l = load(g, 2 * *degree as i64 + 6, 2 * *degree as i64 + 2)?;
            let u = input::parse_module(module)?;
            let table = component_table(&canonicalize(&l.g)?, l.trunc);
            let alpha = table.alpha()?;
            let caps: Vec<u32> = (2.min(*word_cap)..=*word_cap).collect();
            let ms = verma_sweep(&table, &u, *degree, &caps)?;
            let mut checks = vec![verify_aalpha(&u, &alpha)];
            let mut mono = CheckReport::new("dims-nonincreasing");
            for pair in ms.windows(2) {
                let ok = pair[0].dims.iter().zip(&pair[1].dims).all(|(a, b)| b <= a);
                mono.check(ok, || (format!("caps {}->{}", pair[0].word_cap, pair[1].word_cap), json!([pair[0].dims, pair[1].dims])));
            }
            checks.push(mono);
            let last = ms.last().expect("at least one cap");
            let r = verify_graded_relations(&table, last, *degree, exec);
            // failures on degrees that have not stabilized are reported but do not gate
            let mut stable = CheckReport::new("relations-on-stabilized-degrees");
            for d in &r.per_degree {
                stable.check(!d.stabilized || d.failed == 0, || (format!("degree {}", d.degree), json!(d)));
            }
            checks.extend(r.checks.iter().cloned().map(|mut c| {
                c.name = format!("graded-{}", c.name);
                c
            }));
            let gate = checks[0].passed() && checks[1].passed() && stable.passed();
            checks.push(stable);
            let cfg = config(
                cli,
                Some(&l),
                json!({
                    "degree_bound": degree, "word_caps": caps, "alpha": format_scalar(&alpha),
                    "dims_by_cap": ms.iter().map(|m| &m.dims).collect::<Vec<_>>(),
                    "stabilized": last.stabilized, "per_degree": r.per_degree,
                }),
            );
            let report = SuiteReport::new("atilde", cfg, checks);
            let mut lines: Vec<String> = report.checks.iter().map(CheckReport::summary_line).collect();
            lines.push(format!("dims by cap {:?}, stabilized {:?}", ms.iter().map(|m| &m.dims).collect::<Vec<_>>(), last.stabilized));
            lines.push(format!("{} atilde", if gate { "PASS" } else { "FAIL" }));
            let mut v = serde_json::to_value(&report).expect("serializable");
            v["passed"] = json!(gate);
            emit(cli, &v, &lines, gate)
        }
    }
}


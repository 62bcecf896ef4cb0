use std::path::Path;
use std::str::FromStr;

use logsparse::ap_search::{longest_ap_bruteforce, longest_ap_dp, ApSearchError, TwoPowerSums};
use logsparse::explicit::{
    build_condenser, build_family, certify_expansion, DigitMode, ExpansionMode,
    ExplicitConstruction, ExplicitError,
};
use logsparse::field::FieldDescriptor;
use logsparse::json::{
    certificate_to_json, coverage_report_to_json, family_from_json, family_to_json, parse_ratio,
    raw_family_sets, to_pretty,
};
use logsparse::random::{
    make_block_scheme, sample_family, union_bound_probability, CoverageError, CoverageIndex,
    CoverageTargets, LogSeries, TargetOutcome,
};
use logsparse::sets::SparsityError;
use logsparse::sumset::enumerate_sumset_below;
use logsparse::upper_bound::{bound_table, solve_max_length, BoundParams};
use logsparse::{verify_log_sparse, Provenance, SetFamily};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::CliError;

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(out: Option<&Path>, value: &Value) -> Result<(), CliError> {
    write_output(out, &to_pretty(value))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::usage(format!("{}: malformed JSON: {e}", path.display())))
}

fn load_family(path: &Path) -> Result<SetFamily, CliError> {
    family_from_json(read_json(path)?)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn parse_big(flag: &str, s: &str) -> Result<BigUint, CliError> {
    BigUint::from_str(s.trim())
        .map_err(|_| CliError::usage(format!("{flag}: {s:?} is not a non-negative integer")))
}

/// One decimal per line; blank lines and `#` comments are skipped.
fn read_integers(path: &Path) -> Result<Vec<BigUint>, CliError> {
    read_text(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| parse_big(&path.display().to_string(), l))
        .collect()
}

fn explicit_error(e: ExplicitError) -> CliError {
    if e.is_internal() {
        return CliError::internal(e.to_string());
    }
    match e {
        ExplicitError::FamilyMismatch(_) | ExplicitError::Sparsity(_) => {
            CliError::verification(e.to_string(), Value::Null)
        }
        other => CliError::usage(other.to_string()),
    }
}

fn coverage_error(e: CoverageError) -> CliError {
    match e {
        CoverageError::BadCertificate { .. } | CoverageError::BadWitness(_) => {
            CliError::internal(e.to_string())
        }
        other => CliError::usage(other.to_string()),
    }
}

fn eps_arg(s: &str) -> Result<num_rational::Ratio<u64>, CliError> {
    parse_ratio(s).map_err(|e| CliError::usage(format!("--eps: {e}")))
}

fn field_for(q: u32, modulus: Option<&str>) -> Result<FieldDescriptor, CliError> {
    let field = match modulus {
        None => FieldDescriptor::for_order(q),
        Some(m) if q.is_power_of_two() => {
            FieldDescriptor::from_str(&format!("b:{}:{m}", q.trailing_zeros()))
        }
        Some(_) => return Err(CliError::usage("--modulus applies only to q = 2^k")),
    };
    field.map_err(|e| CliError::usage(format!("--q {q}: {e}")))
}

fn positive_shift(shift: u64) -> Result<BigUint, CliError> {
    if shift == 0 {
        return Err(CliError::usage(
            "--shift must be at least 1; sets must consist of positive integers",
        ));
    }
    Ok(BigUint::from(shift))
}

pub fn construct_explicit(
    q: u32,
    mode: &str,
    modulus: Option<&str>,
    shift: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mode = DigitMode::from_str(mode).map_err(|e| CliError::usage(format!("--mode: {e}")))?;
    let field = field_for(q, modulus)?;
    let shift = positive_shift(shift)?;
    let construction = build_family(&field, mode)
        .and_then(|c| c.shifted(&shift))
        .map_err(explicit_error)?;
    emit(out, &family_to_json(construction.family()))
}

pub fn construct_random(
    n: usize,
    eps: &str,
    seed: u64,
    shift: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let scheme = make_block_scheme(n, eps_arg(eps)?).map_err(|e| CliError::usage(e.to_string()))?;
    let family = sample_family(&scheme, seed)
        .shifted(&positive_shift(shift)?)
        .map_err(|e| CliError::verification(e.to_string(), Value::Null))?;
    emit(out, &family_to_json(&family))
}

pub fn verify_sparse(
    family: Option<&Path>,
    file: Option<&Path>,
    c: Option<usize>,
) -> Result<(), CliError> {
    let (sets, declared) = match (family, file) {
        (Some(path), _) => raw_family_sets(read_json(path)?)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
        (None, Some(path)) => (vec![read_integers(path)?], 0),
        (None, None) => return Err(CliError::usage("give --family or --file")),
    };
    let c = match (c, declared) {
        (Some(c), _) => c,
        (None, 0) => return Err(CliError::usage("--C is required for --file")),
        (None, d) => d,
    };
    if c == 0 {
        return Err(CliError::usage("--C must be at least 1"));
    }
    let mut violations = Vec::new();
    for (j, set) in sets.iter().enumerate() {
        match verify_log_sparse(set, c) {
            Ok(report) => {
                if let Some(w) = report.witness {
                    violations.push(json!({
                        "set_index": j,
                        "reason": format!("{} elements in one dyadic window", w.count),
                        "window_start": w.start.to_string(),
                        "window_end": w.end().to_string(),
                        "count": w.count,
                    }));
                }
            }
            Err(e @ (SparsityError::NotIncreasing { .. } | SparsityError::ZeroElement { .. })) => {
                violations.push(json!({"set_index": j, "reason": e.to_string()}));
            }
            Err(e) => return Err(CliError::usage(e.to_string())),
        }
    }
    let report = json!({
        "C": c,
        "sets_checked": sets.len(),
        "sparse": violations.is_empty(),
        "violations": violations,
    });
    emit(None, &report)?;
    match report["violations"].as_array().map_or(0, Vec::len) {
        0 => Ok(()),
        bad => Err(CliError::verification(
            format!("{bad} set(s) violate {c}-log-sparseness"),
            Value::Null,
        )),
    }
}

pub fn coverage_targets(
    exhaustive: bool,
    samples: Option<usize>,
    seed: Option<u64>,
    start: Option<&str>,
    end: Option<&str>,
) -> Result<CoverageTargets, CliError> {
    match (exhaustive, samples, start, end) {
        (true, None, None, None) => Ok(CoverageTargets::Exhaustive),
        (false, Some(count), None, None) => Ok(CoverageTargets::Sampled {
            count,
            seed: seed.ok_or_else(|| CliError::usage("--samples needs --seed"))?,
        }),
        (false, None, Some(s), Some(e)) => Ok(CoverageTargets::Range {
            start: parse_big("--start", s)?,
            end: parse_big("--end", e)?,
        }),
        _ => Err(CliError::usage(
            "choose exactly one of --exhaustive, --samples N --seed S, or --start A --end B",
        )),
    }
}

pub fn verify_coverage(
    family: &Path,
    targets: CoverageTargets,
    report: Option<&Path>,
) -> Result<(), CliError> {
    let family = load_family(family)?;
    // ranges on the command line are absolute targets
    let targets = match targets {
        CoverageTargets::Range { start, end } => {
            let offset = family.offset();
            if start < *offset || end < start {
                return Err(CliError::usage(format!(
                    "--start/--end must satisfy {offset} ≤ start ≤ end"
                )));
            }
            CoverageTargets::Range {
                start: start - offset,
                end: end - offset,
            }
        }
        other => other,
    };
    let result = match family.provenance() {
        Provenance::Explicit { .. } => ExplicitConstruction::from_family(&family)
            .and_then(|c| c.verify_coverage(&targets))
            .map_err(explicit_error)?,
        _ => logsparse::random::verify_coverage(&family, &targets).map_err(coverage_error)?,
    };
    emit(report, &coverage_report_to_json(&result))?;
    if result.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::verification(
            format!(
                "{} of {} targets not covered",
                result.failures.len(),
                result.targets_checked
            ),
            json!({"targets_checked": result.targets_checked, "covered": result.covered}),
        ))
    }
}

pub fn verify_expansion(
    q: u32,
    x: Option<usize>,
    mode: ExpansionMode,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let field = field_for(q, None)?;
    let graph = build_condenser(&field).map_err(explicit_error)?;
    let x_max = x.unwrap_or(logsparse::explicit::block_count(q));
    let r = certify_expansion(&graph, x_max, mode).map_err(|e| match e {
        ExplicitError::Budget(inner) => {
            CliError::usage(format!("{inner}; try --samples N --seed S"))
        }
        other => explicit_error(other),
    })?;
    let value = json!({
        "q": r.q,
        "x_max": r.x_max,
        "mode": if r.exhaustive { "exhaustive" } else { "sampled" },
        "subsets_checked": r.subsets_checked,
        "min_margin": r.min_margin,
        "passed": r.passed(),
        "violation": r.violation,
    });
    emit(out, &value)?;
    if r.passed() {
        Ok(())
    } else {
        Err(CliError::verification(
            "expansion violated",
            value["violation"].clone(),
        ))
    }
}

pub fn decompose(family: &Path, target: &str, out: Option<&Path>) -> Result<(), CliError> {
    let family = load_family(family)?;
    let target = parse_big("--target", target)?;
    let certificate = match family.provenance() {
        Provenance::Explicit { .. } => ExplicitConstruction::from_family(&family)
            .and_then(|c| c.decompose(&target))
            .map_err(explicit_error)?,
        _ => {
            let index = CoverageIndex::new(&family).map_err(coverage_error)?;
            match index.certify(&target).map_err(coverage_error)? {
                TargetOutcome::Covered(c) => c,
                TargetOutcome::Uncovered(v) => {
                    return Err(CliError::verification(
                        format!("{target} has no matching certificate"),
                        json!({
                            "target": target.to_string(),
                            "hall_witness": v.left,
                            "neighborhood": v.neighbors,
                        }),
                    ))
                }
            }
        }
    };
    emit(out, &certificate_to_json(&certificate))
}

pub fn sumset(
    family: &Path,
    below: &str,
    budget: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let family = load_family(family)?;
    let bound = parse_big("--below", below)?;
    let sumset = enumerate_sumset_below(&family, &bound, budget)
        .map_err(|e| CliError::usage(format!("{e}; lower --below or raise --budget")))?;
    let mut text = String::new();
    for m in sumset.members() {
        text.push_str(&m.to_string());
        text.push('\n');
    }
    write_output(out, &text)
}

pub fn longest_ap(
    file: Option<&Path>,
    generator: Option<&str>,
    below: Option<&str>,
    method: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let mut elements = match (file, generator, below) {
        (Some(path), None, _) => read_integers(path)?,
        (None, Some(g), Some(b)) => {
            let g: TwoPowerSums = g
                .parse()
                .map_err(|e: ApSearchError| CliError::usage(e.to_string()))?;
            g.below(&parse_big("--below", b)?)
        }
        _ => return Err(CliError::usage("give --file, or --gen with --below")),
    };
    elements.sort_unstable();
    elements.dedup();
    let ap = match method {
        "dp" => longest_ap_dp(&elements),
        "bruteforce" => longest_ap_bruteforce(&elements),
        other => {
            return Err(CliError::usage(format!(
                "--method: unknown {other:?}; expected dp or bruteforce"
            )))
        }
    }
    .map_err(|e| CliError::usage(e.to_string()))?;
    emit(
        out,
        &json!({
            "size": elements.len(),
            "method": method,
            "length": ap.length(),
            "first": ap.first().to_string(),
            "step": ap.step().to_string(),
        }),
    )
}

fn bound_params(n: usize, c: usize) -> Result<BoundParams, CliError> {
    BoundParams::new(n, c).map_err(|e| CliError::usage(e.to_string()))
}

pub fn bound_single(n: usize, c: usize, out: Option<&Path>) -> Result<(), CliError> {
    let sol = solve_max_length(&bound_params(n, c)?);
    emit(
        out,
        &json!({
            "n": n,
            "C": c,
            "max_length": sol.max_length.to_string(),
            "iterations": sol.iterations,
            "log_ratio": sol.log_ratio(n),
        }),
    )
}

pub fn bound_sweep(lo: usize, hi: usize, c: usize, out: Option<&Path>) -> Result<(), CliError> {
    if lo > hi {
        return Err(CliError::usage("--n-min must not exceed --n-max"));
    }
    bound_params(lo, c)?;
    let rows: Vec<String> = (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let (_, sol) = bound_table([n], c).pop().expect("one row per n");
            let ratio = sol
                .log_ratio(n)
                .map(|r| format!("{r:.6}"))
                .unwrap_or_default();
            format!("{n},{c},{},{ratio}\n", sol.max_length)
        })
        .collect();
    let mut text = String::from("n,C,max_length,log_ratio\n");
    rows.iter().for_each(|r| text.push_str(r));
    write_output(out, &text)
}

fn series_json(s: &LogSeries, with_terms: bool) -> Value {
    let mut v = json!({
        "ln_sum": s.ln_sum,
        "below_one": s.below_one(),
    });
    if with_terms {
        v["ln_terms"] = json!(s.ln_terms);
    }
    v
}

pub fn union_bound(n: usize, eps: &str, terms: bool, out: Option<&Path>) -> Result<(), CliError> {
    let eps = eps_arg(eps)?;
    let scheme = make_block_scheme(n, eps).map_err(|e| CliError::usage(e.to_string()))?;
    let report = union_bound_probability(&scheme);
    emit(
        out,
        &json!({
            "n": n,
            "eps": format!("{}/{}", eps.numer(), eps.denom()),
            "width": scheme.width(),
            "blocks": scheme.blocks(),
            "paper_literal": series_json(&report.paper_literal, terms),
            "substituted": series_json(&report.substituted, terms),
            "majorant": series_json(&report.majorant, terms),
        }),
    )
}

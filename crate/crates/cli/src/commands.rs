use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::Path;

use num_bigint::BigUint;
use serde_json::{json, Value};

use powrep::cover::{
    certificate_pipeline, default_pool, verify_certificate, PipelineOutcome, ResidueCertificate,
};
use powrep::lambda::{
    candidate_moduli, read_records, search_small_lambda, write_records, SearchConfig,
    POOL_EXPONENTS,
};
use powrep::numeric::{carmichael, factor_seeded, FactorCache, FactoredInteger, CACHE_ENV_VAR};
use powrep::search::{
    default_beta, min_representation, threshold_f_with_stability, ThresholdOutcome,
};
use powrep::{Error, Representation, Result};

use crate::config::{Format, RunConfig};
use crate::Output;

/// Ranges over `k` or `m` larger than this are refused.
const MAX_RANGE: u64 = 1_000_000;

fn terms_json(rep: &Representation) -> Value {
    Value::Array(
        rep.terms()
            .iter()
            .map(|t| json!({ "r": t.r.to_string(), "b": t.b.to_string(), "e": t.e }))
            .collect(),
    )
}

fn json_line(v: &Value) -> String {
    format!("{v}\n")
}

fn done(text: String) -> Result<Output> {
    Ok(Output { text, ok: true })
}

pub fn repr(cfg: &RunConfig, n: i64, beta: Option<u64>) -> Result<Output> {
    let inst = cfg.instance();
    let beta = beta.unwrap_or_else(|| default_beta(inst));
    let rep = min_representation(n, inst, beta)?;
    let cap = n.unsigned_abs() * beta;
    if cfg.format == Format::Human {
        return done(match &rep {
            Some(r) if r.is_empty() => format!("{n}: length 0 (empty sum)\n"),
            Some(r) => format!("{n}: length {} = {r}  (terms capped at {cap})\n", r.len()),
            None => format!("{n}: no representation with terms capped at {cap}\n"),
        });
    }
    done(json_line(&json!({
        "config": cfg,
        "n": n.to_string(),
        "cap_factor": beta.to_string(),
        "cap": cap.to_string(),
        "length": rep.as_ref().map(|r| r.len()),
        "witness": rep.as_ref().map(terms_json),
    })))
}

pub fn threshold(
    cfg: &RunConfig,
    (lo, hi): (u64, u64),
    beta: Option<u64>,
    nmax: u64,
) -> Result<Output> {
    if hi - lo > MAX_RANGE {
        return Err(Error::Domain(format!("k range wider than {MAX_RANGE}")));
    }
    let inst = cfg.instance();
    let beta = beta.unwrap_or_else(|| default_beta(inst));
    let mut rows = Vec::new();
    for k in lo..=hi {
        let (outcome, stable) = threshold_f_with_stability(k as usize, inst, beta, nmax)?;
        rows.push((k, outcome, stable));
    }
    let text = match cfg.format {
        Format::Json => {
            let results: Vec<Value> = rows
                .iter()
                .map(|(k, outcome, stable)| match outcome {
                    ThresholdOutcome::Found(r) => json!({
                        "k": k,
                        "f": r.f.to_string(),
                        "cap_factor": r.cap_factor.to_string(),
                        "method": r.method,
                        "stable": stable,
                        "witness": r.witness.as_ref().map(terms_json),
                    }),
                    ThresholdOutcome::Inconclusive { frontier, .. } => json!({
                        "k": k,
                        "f": null,
                        "cap_factor": beta.to_string(),
                        "method": "inconclusive",
                        "frontier": frontier.to_string(),
                        "stable": stable,
                    }),
                })
                .collect();
            json_line(&json!({ "config": cfg, "results": results }))
        }
        Format::Csv => {
            let mut s = String::from("k,f,cap_factor,method,stable\n");
            for (k, outcome, stable) in &rows {
                let (f, method) = match outcome {
                    ThresholdOutcome::Found(r) => (r.f.to_string(), r.method),
                    ThresholdOutcome::Inconclusive { frontier, .. } => {
                        (format!(">{frontier}"), "inconclusive")
                    }
                };
                writeln!(s, "{k},{f},{beta},{method},{stable}").unwrap();
            }
            s
        }
        Format::Human => {
            let mut s = String::new();
            for (k, outcome, stable) in &rows {
                match outcome {
                    ThresholdOutcome::Found(r) => {
                        let w = r
                            .witness
                            .as_ref()
                            .map_or(String::from("-"), |w| w.to_string());
                        let note = if *stable { "" } else { "  (changes at 2 beta)" };
                        writeln!(s, "f({k}) = {} = {w}  [beta {beta}]{note}", r.f).unwrap();
                    }
                    ThresholdOutcome::Inconclusive { frontier, .. } => {
                        writeln!(s, "f({k}) > {frontier}  [beta {beta}]").unwrap();
                    }
                }
            }
            s
        }
    };
    done(text)
}

fn factor_with(m: u64, seed: u64) -> Result<FactoredInteger> {
    let n = BigUint::from(m);
    if std::env::var_os(CACHE_ENV_VAR).is_some() {
        FactorCache::global().factor(&n)
    } else {
        factor_seeded(&n, seed)
    }
}

fn factor_strings(f: &FactoredInteger) -> Vec<String> {
    f.factors()
        .iter()
        .map(|pp| format!("{}^{}", pp.prime, pp.exp))
        .collect()
}

pub fn lambda(cfg: &RunConfig, (lo, hi): (u64, u64), seed: u64) -> Result<Output> {
    if lo == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    if hi - lo > MAX_RANGE {
        return Err(Error::Domain(format!("m range wider than {MAX_RANGE}")));
    }
    let mut rows = Vec::new();
    for m in lo..=hi {
        let f = factor_with(m, seed)?;
        rows.push((m, carmichael(&f), factor_strings(&f)));
    }
    let text = match cfg.format {
        Format::Json => {
            let results: Vec<Value> = rows
                .iter()
                .map(|(m, l, f)| json!({ "m": m.to_string(), "lambda": l.to_string(), "factorization": f }))
                .collect();
            json_line(&json!({ "config": cfg, "results": results }))
        }
        Format::Csv => {
            let mut s = String::from("m,lambda,factorization\n");
            for (m, l, f) in &rows {
                writeln!(s, "{m},{l},{}", f.join("*")).unwrap();
            }
            s
        }
        Format::Human => {
            let mut s = String::new();
            for (m, l, f) in &rows {
                let f = if f.is_empty() {
                    "1".to_string()
                } else {
                    f.join(" * ")
                };
                writeln!(s, "lambda({m}) = {l}    m = {f}").unwrap();
            }
            s
        }
    };
    done(text)
}

pub fn search_m(
    cfg: &RunConfig,
    lo: f64,
    hi: f64,
    primorial_bound: u64,
    lcm_variants: Vec<u64>,
    limit: Option<usize>,
) -> Result<Output> {
    let config = SearchConfig {
        primorial_bound,
        lcm_variants,
        limit,
    };
    let records = search_small_lambda(&config, lo, hi)?;
    if cfg.format == Format::Human {
        let mut s = format!(
            "{:>12} {:>8} {:>10} {:>10} {:>8}\n",
            "y", "#primes", "ln m", "lambda", "score"
        );
        for r in &records {
            let score = r.score.map_or("-".to_string(), |v| format!("{v:.4}"));
            writeln!(
                s,
                "{:>12} {:>8} {:>10.3} {:>10} {:>8}",
                r.y,
                r.primes.len(),
                r.log_m,
                r.lambda_m,
                score
            )
            .unwrap();
        }
        return done(s);
    }
    let mut buf = Vec::new();
    write_records(&mut buf, &records)?;
    done(String::from_utf8(buf).expect("JSON is UTF-8"))
}

pub fn cert(
    cfg: &RunConfig,
    k: usize,
    pool: Option<&Path>,
    pool_limit: u64,
    out: Option<&Path>,
) -> Result<Output> {
    let inst = cfg.instance();
    let moduli = match pool {
        Some(path) => {
            let records = read_records(BufReader::new(fs::File::open(path)?))?;
            candidate_moduli(&records, &POOL_EXPONENTS, pool_limit)?
        }
        None => default_pool(pool_limit)?,
    };
    let outcome = certificate_pipeline(inst, k, &moduli)?;
    let report = match &outcome {
        PipelineOutcome::Certified(r) => {
            if let Some(path) = out {
                fs::write(path, r.certificate.to_json() + "\n")?;
            }
            if cfg.format == Format::Human {
                let c = &r.certificate;
                return done(format!(
                    "k = {k}: class {} mod {} is missed by every sum of at most {k} terms ({} of {} classes covered)\n\
                     n0 = {}, ln m = {:.3}, candidates tried: {}\n",
                    c.class, c.m, c.covered, c.m, r.n0, r.log_m, r.candidates_tried
                ));
            }
            json!({
                "config": cfg,
                "outcome": "certified",
                "certificate": serde_json::to_value(&r.certificate)?,
                "n0": r.n0.to_string(),
                "log_n0": r.log_n0,
                "log_m": r.log_m,
                "regime_scale": r.regime_scale,
                "regime_ratio": r.regime_ratio,
                "theta": r.theta,
                "candidates_tried": r.candidates_tried,
            })
        }
        PipelineOutcome::Inconclusive {
            largest_m,
            candidates_tried,
        } => {
            if cfg.format == Format::Human {
                let top = largest_m.map_or("none".to_string(), |m| m.to_string());
                return done(format!(
                    "k = {k}: every candidate is fully covered ({candidates_tried} tried, largest m = {top})\n"
                ));
            }
            json!({
                "config": cfg,
                "outcome": "inconclusive",
                "largest_m": largest_m.map(|m| m.to_string()),
                "candidates_tried": candidates_tried,
            })
        }
    };
    done(json_line(&report))
}

pub fn verify(cfg: &RunConfig, path: &Path, nmax: u64, beta: u64) -> Result<Output> {
    let cert = ResidueCertificate::from_json(&fs::read_to_string(path)?)?;
    let report = verify_certificate(&cert, nmax, beta)?;
    let text = if cfg.format == Format::Human {
        let mut s = if report.ok {
            format!(
                "ok: class {} mod {} uncovered; {} integers up to {nmax} need more than {} terms\n",
                cert.class, cert.m, report.checked, cert.k
            )
        } else {
            String::from("FAILED\n")
        };
        for d in &report.diagnostics {
            writeln!(s, "  {d}").unwrap();
        }
        s
    } else {
        json_line(&json!({
            "config": cfg,
            "ok": report.ok,
            "recomputed_covered": report.recomputed_covered.to_string(),
            "recomputed_digest": report.recomputed_digest,
            "checked": report.checked.to_string(),
            "cap": report.cap.to_string(),
            "diagnostics": report.diagnostics,
        }))
    };
    Ok(Output {
        text,
        ok: report.ok,
    })
}

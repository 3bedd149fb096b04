//! Search for moduli with unusually small Carmichael function.
//!
//! For a squarefree `y`, collect every prime `p` with `p - 1 | y` and take
//! `m` to be their product. Then `lambda(m) = lcm(p - 1)` divides `y` while
//! `m` grows with the number of such primes, which is large when `y` has many
//! divisors. Candidate `y` are divisors of primorials.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{factor_u64, is_prime_u64, ln_big, FactoredInteger, PrimePower};

/// Every prime `p` with `p - 1 | y`, ascending. `y` must be squarefree.
pub fn primes_from_y(y: u64) -> Result<Vec<u64>> {
    if y == 0 {
        return Err(Error::domain("y must be positive"));
    }
    let fy = factor_u64(y)?;
    if !fy.is_squarefree() {
        return Err(Error::domain(format!("y = {y} is not squarefree")));
    }
    let mut primes = Vec::new();
    for d in fy.divisors() {
        let d = d.to_u64().expect("divisor of a u64");
        if let Some(p) = d.checked_add(1) {
            if is_prime_u64(p) {
                primes.push(p);
            }
        }
    }
    Ok(primes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallLambdaRecord {
    #[serde(with = "crate::wire::dec_u64")]
    pub y: u64,
    #[serde(with = "crate::wire::dec_u64_vec")]
    pub primes: Vec<u64>,
    #[serde(with = "crate::wire::dec_big")]
    pub m: BigUint,
    #[serde(rename = "lambda", with = "crate::wire::dec_big")]
    pub lambda_m: BigUint,
    pub log_m: f64,
    /// `ln lambda / (ln ln m * ln ln ln m)`, defined for `m > e^e`.
    pub score: Option<f64>,
}

impl SmallLambdaRecord {
    pub fn factored_m(&self) -> FactoredInteger {
        FactoredInteger::from_factors(
            self.primes
                .iter()
                .map(|&p| PrimePower {
                    prime: p.into(),
                    exp: 1,
                })
                .collect(),
        )
        .expect("distinct primes")
    }
}

fn score(lambda: &BigUint, log_m: f64) -> Option<f64> {
    let ll = log_m.ln();
    if ll <= 1.0 {
        return None;
    }
    Some(ln_big(lambda) / (ll * ll.ln()))
}

pub fn build_record(y: u64) -> Result<SmallLambdaRecord> {
    let primes = primes_from_y(y)?;
    let m = primes.iter().fold(BigUint::one(), |acc, &p| acc * p);
    let lambda_m = primes
        .iter()
        .fold(BigUint::one(), |acc, &p| acc.lcm(&BigUint::from(p - 1)));
    debug_assert!((BigUint::from(y) % &lambda_m).is_zero());
    let log_m = ln_big(&m);
    Ok(SmallLambdaRecord {
        score: score(&lambda_m, log_m),
        y,
        primes,
        m,
        lambda_m,
        log_m,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// `y` ranges over the squarefree divisors of the product of all primes
    /// up to this bound.
    pub primorial_bound: u64,
    /// Extra `y = rad(lcm(1..L))` for each listed `L`.
    pub lcm_variants: Vec<u64>,
    /// Keep at most this many records after sorting.
    pub limit: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            primorial_bound: 13,
            lcm_variants: Vec::new(),
            limit: None,
        }
    }
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime_u64(p)).collect()
}

fn primorial(bound: u64) -> Result<u64> {
    primes_up_to(bound)
        .into_iter()
        .try_fold(1u64, |acc, p| acc.checked_mul(p))
        .ok_or(Error::Overflow("primorial"))
}

/// Candidate `y` values for a configuration, ascending.
pub fn candidate_ys(config: &SearchConfig) -> Result<Vec<u64>> {
    let mut ys = BTreeSet::new();
    let mut divisors = vec![1u64];
    for p in primes_up_to(config.primorial_bound) {
        let more: Vec<u64> = divisors.iter().filter_map(|d| d.checked_mul(p)).collect();
        divisors.extend(more);
    }
    ys.extend(divisors);
    for &l in &config.lcm_variants {
        ys.insert(primorial(l)?);
    }
    Ok(ys.into_iter().collect())
}

/// Records with `ln m` in `[lo, hi]`, best score first; ties by smaller `m`.
pub fn search_small_lambda(
    config: &SearchConfig,
    lo: f64,
    hi: f64,
) -> Result<Vec<SmallLambdaRecord>> {
    if !(lo < hi) {
        return Ok(Vec::new());
    }
    let ys = candidate_ys(config)?;
    let mut records = ys
        .par_iter()
        .map(|&y| build_record(y))
        .collect::<Result<Vec<_>>>()?;
    records.retain(|r| r.log_m >= lo && r.log_m <= hi);
    records.sort_by(|a, b| {
        let sa = a.score.unwrap_or(f64::INFINITY);
        let sb = b.score.unwrap_or(f64::INFINITY);
        sa.total_cmp(&sb).then_with(|| a.m.cmp(&b.m))
    });
    if let Some(limit) = config.limit {
        records.truncate(limit);
    }
    Ok(records)
}

/// Records for the primorials `2, 2*3, 2*3*5, ...` up to `bound`, for the
/// score trend report.
pub fn primorial_trend(bound: u64) -> Result<Vec<SmallLambdaRecord>> {
    let mut y = 1u64;
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        y = y.checked_mul(p).ok_or(Error::Overflow("primorial"))?;
        out.push(build_record(y)?);
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut out: W, records: &[SmallLambdaRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Read a JSON-lines record store; blank lines are skipped.
pub fn read_records<R: BufRead>(input: R) -> Result<Vec<SmallLambdaRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

/// The largest modulus whose Carmichael function divides `l`: the product
/// of every prime power `p^a` with `lambda(p^a) | l`.
pub fn max_modulus_for_exponent(l: u64) -> Result<FactoredInteger> {
    if l == 0 {
        return Err(Error::domain("exponent must be positive"));
    }
    let fl = factor_u64(l)?;
    let mut factors = Vec::new();
    for d in fl.divisors() {
        let d = d.to_u64().expect("divisor of a u64");
        let Some(p) = d.checked_add(1) else { continue };
        if !is_prime_u64(p) {
            continue;
        }
        let exp = if p == 2 {
            match l.trailing_zeros() {
                0 => 1,
                v => 2 + v,
            }
        } else {
            let mut v = 0;
            let mut rest = l;
            while rest % p == 0 {
                rest /= p;
                v += 1;
            }
            1 + v
        };
        factors.push(PrimePower {
            prime: p.into(),
            exp,
        });
    }
    FactoredInteger::from_factors(factors)
}

/// Divisors of `f` not exceeding `limit`, unsorted.
pub fn divisors_up_to(f: &FactoredInteger, limit: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for pp in f.factors() {
        let Some(p) = pp.prime.to_u64() else { continue };
        let len = out.len();
        for i in 0..len {
            let mut v = out[i];
            for _ in 0..pp.exp {
                match v.checked_mul(p) {
                    Some(next) if next <= limit => {
                        v = next;
                        out.push(v);
                    }
                    _ => break,
                }
            }
        }
    }
    out
}

/// Default exponents for the modulus pool: highly composite values of
/// `lambda` that make many primes `p` with `p - 1 | lambda` available.
pub const POOL_EXPONENTS: [u64; 24] = [
    2, 4, 6, 8, 12, 16, 18, 20, 24, 30, 36, 40, 48, 60, 72, 84, 90, 120, 144, 180, 240, 360, 720,
    2520,
];

/// Candidate moduli in `[2, limit]`, ascending: divisors of the record
/// moduli plus divisors of `max_modulus_for_exponent(L)` for each `L` in
/// `exponents`.
pub fn candidate_moduli(
    records: &[SmallLambdaRecord],
    exponents: &[u64],
    limit: u64,
) -> Result<Vec<u64>> {
    let mut pool = BTreeSet::new();
    for r in records {
        pool.extend(divisors_up_to(&r.factored_m(), limit));
    }
    for &l in exponents {
        pool.extend(divisors_up_to(&max_modulus_for_exponent(l)?, limit));
    }
    pool.remove(&1);
    Ok(pool.into_iter().collect())
}

//! Residues reachable by short sums of terms modulo `m`, and certificates
//! that a whole residue class needs more than `k` terms.
//!
//! Powers `b^u mod m` run through an eventually periodic orbit, so the
//! single-term residues form a small set `S`. Sums of at most `k` terms land
//! in the `k`-fold sumset of `S`. A class `c` missed by that sumset cannot
//! contain any integer with a representation of length `<= k`, whatever the
//! size of the terms.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::numeric::{carmichael, factor_u64, FactoredInteger};
use crate::search::{LevelSet, MAX_WINDOW};
use crate::terms::Instance;

/// Largest modulus the coverage routines accept.
pub const MAX_MODULUS: u64 = 1 << 28;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitSummary {
    pub b: u64,
    pub m: u64,
    /// `{b^u mod m : u >= 0}`, ascending.
    pub residues: Vec<u64>,
    /// Index of the first power that recurs.
    pub preperiod: u64,
    pub period: u64,
    /// `lambda(m) + max exponent of m`.
    pub bound: u64,
}

fn modulus_u64(m: &FactoredInteger) -> Result<u64> {
    let v = m.to_u64("modulus")?;
    if v < 2 {
        return Err(Error::domain("modulus must be at least 2"));
    }
    if v > MAX_MODULUS {
        return Err(Error::Overflow("modulus"));
    }
    Ok(v)
}

fn orbit_bound(m: &FactoredInteger) -> u64 {
    carmichael(m).to_u64().expect("lambda(m) < m") + m.max_exponent() as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// The orbit of `b` under multiplication modulo `m`, by cycle detection.
pub fn power_orbit(b: u64, m: &FactoredInteger) -> Result<OrbitSummary> {
    if b < 2 {
        return Err(Error::domain("base must be at least 2"));
    }
    let mv = modulus_u64(m)?;
    let mut first_seen: HashMap<u64, u64> = HashMap::new();
    let mut x = 1 % mv;
    let mut u = 0u64;
    let (preperiod, period) = loop {
        if let Some(&start) = first_seen.get(&x) {
            break (start, u - start);
        }
        first_seen.insert(x, u);
        x = mul_mod(x, b, mv);
        u += 1;
    };
    let mut residues: Vec<u64> = first_seen.into_keys().collect();
    residues.sort_unstable();
    let bound = orbit_bound(m);
    assert!(
        residues.len() as u64 <= bound,
        "orbit of {b} mod {mv} exceeds lambda(m) + max exponent"
    );
    Ok(OrbitSummary {
        b,
        m: mv,
        residues,
        preperiod,
        period,
        bound,
    })
}

/// `{r b^u mod m}` over the instance, ascending.
pub fn single_term_residues(instance: &Instance, m: &FactoredInteger) -> Result<Vec<u64>> {
    let mv = modulus_u64(m)?;
    let mut out = BTreeSet::new();
    for &b in instance.basis.bases() {
        let orbit = power_orbit(b, m)?;
        for &r in instance.coeffs.coeffs() {
            let rr = (r as i128).rem_euclid(mv as i128) as u64;
            out.extend(orbit.residues.iter().map(|&x| mul_mod(rr, x, mv)));
        }
    }
    let bound = (instance.rho() * instance.t()) as u64 * orbit_bound(m);
    debug_assert!(out.len() as u64 <= bound);
    Ok(out.into_iter().collect())
}

/// Residues covered by sums of at most `k` elements of a residue set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    pub m: u64,
    pub k: usize,
    pub include_empty: bool,
    covered: Bitset,
}

impl Coverage {
    pub fn contains(&self, r: u64) -> bool {
        r < self.m && self.covered.get(r as usize)
    }

    pub fn count(&self) -> u64 {
        self.covered.count_ones() as u64
    }

    pub fn is_full(&self) -> bool {
        self.covered.is_full()
    }

    pub fn residues(&self) -> Vec<u64> {
        self.covered.iter_ones().map(|i| i as u64).collect()
    }

    /// Smallest uncovered class `c >= 1`.
    pub fn first_uncovered_positive(&self) -> Option<u64> {
        self.covered.first_zero_from(1).map(|i| i as u64)
    }

    /// Hex SHA-256 of the covered residues, ascending, each written in
    /// decimal and followed by a newline.
    pub fn digest(&self) -> String {
        digest_of(self.covered.iter_ones().map(|i| i as u64))
    }
}

fn digest_of(residues: impl Iterator<Item = u64>) -> String {
    let mut h = Sha256::new();
    for r in residues {
        h.update(r.to_string().as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Union of the `j`-fold sumsets of `s` modulo `m` for `1 <= j <= k`, plus
/// `0` when `include_empty` is set.
pub fn k_fold_coverage(s: &[u64], k: usize, m: u64, include_empty: bool) -> Result<Coverage> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if m == 0 || m > MAX_MODULUS {
        return Err(Error::domain("modulus out of range"));
    }
    let len = m as usize;
    let mut shifts: Vec<usize> = s.iter().map(|&x| (x % m) as usize).collect();
    shifts.sort_unstable();
    shifts.dedup();
    // at_most holds sums of at most j - 1 elements, empty sum included
    let mut at_most = Bitset::new(len);
    at_most.set(0);
    let mut covered = Bitset::new(len);
    for j in 1..=k {
        covered = Bitset::new(len);
        for &x in &shifts {
            covered.or_rotated(&at_most, x);
        }
        if j < k {
            let before = at_most.clone();
            at_most.or_assign(&covered);
            if at_most == before {
                break;
            }
        }
    }
    if include_empty {
        covered.set(0);
    }
    Ok(Coverage {
        m,
        k,
        include_empty,
        covered,
    })
}

/// A class `c` modulo `m` that no sum of at most `k` terms reaches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCertificate {
    pub instance: Instance,
    pub k: usize,
    #[serde(with = "crate::wire::dec_u64")]
    pub m: u64,
    #[serde(with = "crate::wire::dec_u64")]
    pub class: u64,
    #[serde(with = "crate::wire::dec_u64")]
    pub covered: u64,
    pub digest: String,
}

impl ResidueCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Coverage of sums of `1..=k` terms of `instance` modulo `m`.
pub fn instance_coverage(instance: &Instance, k: usize, m: &FactoredInteger) -> Result<Coverage> {
    let s = single_term_residues(instance, m)?;
    k_fold_coverage(&s, k, modulus_u64(m)?, false)
}

/// Try the candidates in order; certify the first modulus with an uncovered
/// positive class.
pub fn find_certificate(
    instance: &Instance,
    k: usize,
    candidates: &[u64],
) -> Result<Option<ResidueCertificate>> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    for &m in candidates {
        if m < 2 {
            return Err(Error::domain("candidate moduli must be at least 2"));
        }
        let fm = factor_u64(m)?;
        let cov = instance_coverage(instance, k, &fm)?;
        if let Some(class) = cov.first_uncovered_positive() {
            return Ok(Some(ResidueCertificate {
                instance: instance.clone(),
                k,
                m,
                class,
                covered: cov.count(),
                digest: cov.digest(),
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub recomputed_covered: u64,
    pub recomputed_digest: String,
    /// Integers `n = class + j m` with `0 < n <= N` checked by exact search.
    pub checked: u64,
    pub cap: u64,
    pub diagnostics: Vec<String>,
}

/// Residues of single terms by plain iteration, without the orbit routine.
fn naive_single_terms(instance: &Instance, m: u64) -> Vec<bool> {
    let mut seen = vec![false; m as usize];
    for &b in instance.basis.bases() {
        let mut powers = HashSet::new();
        let mut x = 1 % m;
        while powers.insert(x) {
            x = mul_mod(x, b, m);
        }
        for &r in instance.coeffs.coeffs() {
            for &p in &powers {
                let v = ((r as i128 * p as i128).rem_euclid(m as i128)) as usize;
                seen[v] = true;
            }
        }
    }
    seen
}

/// Recheck a certificate from scratch, then confirm by exact search that
/// every `n = class (mod m)` with `0 < n <= n_max` needs more than `k` terms
/// of size at most `beta * n_max`.
pub fn verify_certificate(
    cert: &ResidueCertificate,
    n_max: u64,
    beta: u64,
) -> Result<VerifyReport> {
    if n_max == 0 {
        return Err(Error::domain("exhaustive bound must be at least 1"));
    }
    if beta == 0 {
        return Err(Error::domain("cap factor beta must be at least 1"));
    }
    let m = cert.m;
    if m < 2 || m > MAX_MODULUS || cert.k == 0 {
        return Ok(VerifyReport {
            ok: false,
            recomputed_covered: 0,
            recomputed_digest: String::new(),
            checked: 0,
            cap: 0,
            diagnostics: vec![format!("bad parameters m = {m}, k = {}", cert.k)],
        });
    }
    let mut diagnostics = Vec::new();

    let singles = naive_single_terms(&cert.instance, m);
    let singles: Vec<usize> = (0..m as usize).filter(|&i| singles[i]).collect();
    let mut reach = vec![false; m as usize];
    let mut frontier = vec![0usize];
    for _ in 0..cert.k {
        let mut next = Vec::new();
        for &x in &frontier {
            for &s in &singles {
                let v = (x + s) % m as usize;
                if !reach[v] {
                    reach[v] = true;
                    next.push(v);
                }
            }
        }
        // sums of up to j terms; keep extending from everything new
        frontier = next;
    }
    let covered: Vec<u64> = (0..m).filter(|&i| reach[i as usize]).collect();
    let recomputed_covered = covered.len() as u64;
    let recomputed_digest = digest_of(covered.iter().copied());

    if recomputed_covered != cert.covered {
        diagnostics.push(format!(
            "covered count mismatch: certificate {}, recomputed {recomputed_covered}",
            cert.covered
        ));
    }
    if recomputed_digest != cert.digest {
        diagnostics.push("covered-set digest mismatch".to_string());
    }
    if cert.class == 0 || cert.class >= m {
        diagnostics.push(format!("class {} is not in [1, m)", cert.class));
    } else if reach[cert.class as usize] {
        diagnostics.push(format!("class {} is covered", cert.class));
    }

    let cap = n_max.saturating_mul(beta);
    let mut checked = 0;
    if diagnostics.is_empty() {
        if cap > MAX_WINDOW {
            diagnostics.push(format!("exhaustive cap {cap} exceeds the search window"));
        } else {
            let level = LevelSet::build(&cert.instance, cert.k, cap, n_max)?;
            let mut n = cert.class;
            while n <= n_max {
                if level.contains(n as i64) {
                    diagnostics.push(format!(
                        "{n} has a representation with at most {} terms",
                        cert.k
                    ));
                    break;
                }
                checked += 1;
                n += m;
            }
        }
    }
    Ok(VerifyReport {
        ok: diagnostics.is_empty(),
        recomputed_covered,
        recomputed_digest,
        checked,
        cap,
        diagnostics,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub certificate: ResidueCertificate,
    /// A positive integer with no representation of length `<= k`.
    pub n0: u64,
    pub log_n0: f64,
    pub log_m: f64,
    /// `k ln(rho k t) ln ln k`, defined for `k >= 3`.
    pub regime_scale: Option<f64>,
    /// `ln m / regime_scale`.
    pub regime_ratio: Option<f64>,
    /// `theta` solving `covered = (rho t)^k (ln m)^(theta k lnlnln m)`,
    /// defined once `lnlnln m > 0`.
    pub theta: Option<f64>,
    pub candidates_tried: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PipelineOutcome {
    Certified(PipelineReport),
    Inconclusive {
        largest_m: Option<u64>,
        candidates_tried: usize,
    },
}

/// Scan the pool in ascending order for the first certifying modulus and
/// report the sizes involved.
pub fn certificate_pipeline(
    instance: &Instance,
    k: usize,
    pool: &[u64],
) -> Result<PipelineOutcome> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let mut pool: Vec<u64> = pool.iter().copied().filter(|&m| m >= 2).collect();
    pool.sort_unstable();
    pool.dedup();
    for (i, &m) in pool.iter().enumerate() {
        let Some(cert) = find_certificate(instance, k, &[m])? else {
            continue;
        };
        let log_m = (m as f64).ln();
        let n0 = cert.class;
        let x = (instance.rho() * k * instance.t()) as f64;
        let llk = (k as f64).ln().ln();
        let regime_scale = (llk.is_finite() && llk > 0.0).then(|| k as f64 * x.ln() * llk);
        let lll = log_m.ln().ln();
        let rt = (instance.rho() * instance.t()) as f64;
        let theta = (lll.is_finite() && lll > 0.0).then(|| {
            ((cert.covered as f64).ln() - k as f64 * rt.ln()) / (k as f64 * lll * log_m.ln())
        });
        return Ok(PipelineOutcome::Certified(PipelineReport {
            n0,
            log_n0: (n0 as f64).ln(),
            log_m,
            regime_scale,
            regime_ratio: regime_scale.map(|s| log_m / s),
            theta,
            candidates_tried: i + 1,
            certificate: cert,
        }));
    }
    Ok(PipelineOutcome::Inconclusive {
        largest_m: pool.last().copied(),
        candidates_tried: pool.len(),
    })
}

/// Default modulus pool: divisors up to `limit` of the lambda-search record
/// moduli and of the largest moduli with small Carmichael value.
pub fn default_pool(limit: u64) -> Result<Vec<u64>> {
    let config = crate::lambda::SearchConfig::default();
    let records = crate::lambda::search_small_lambda(&config, 0.0, f64::MAX)?;
    crate::lambda::candidate_moduli(&records, &crate::lambda::POOL_EXPONENTS, limit)
}

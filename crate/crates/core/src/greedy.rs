//! Constructive upper bounds on representation length.
//!
//! * The greedy algorithm for a single base: repeatedly subtract the largest
//!   power of `b` not exceeding the remainder. Each step shrinks the remainder
//!   by a factor below `1 - 1/b`, so `n` needs at most
//!   `ceil(ln n / ln(b/(b-1)))` powers.
//! * For coefficient sets without 1: an explicit representation of 1 from
//!   exponent-0 terms when `R` has both signs, and the coin (Frobenius)
//!   problem when `R` is positive, stitched onto the greedy descent.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::ln_big;
use crate::terms::{CoefficientSet, Instance, Representation, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreedyStep {
    pub exponent: u32,
    pub remainder: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyTrace {
    pub n: BigUint,
    pub base: u64,
    pub steps: Vec<GreedyStep>,
    pub representation: Representation,
}

impl GreedyTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Powers `b^0, b^1, ...` not exceeding `limit`.
fn powers_up_to(b: u64, limit: &BigUint) -> Vec<BigUint> {
    let mut out = vec![BigUint::one()];
    loop {
        let next = out.last().unwrap() * b;
        if &next > limit {
            break;
        }
        out.push(next);
    }
    out
}

pub fn greedy_single_base(n: &BigInt, b: u64) -> Result<GreedyTrace> {
    if b < 2 {
        return Err(Error::domain("base must be at least 2"));
    }
    let n = match n.to_biguint() {
        Some(v) if !v.is_zero() => v,
        _ => return Err(Error::domain(format!("greedy needs n >= 1, got {n}"))),
    };
    if let Some(small) = n.to_u128() {
        return Ok(greedy_u128(small, b));
    }
    let powers = powers_up_to(b, &n);
    let mut e = powers.len() - 1;
    let mut rem = n.clone();
    let mut steps = Vec::new();
    let mut terms = Vec::new();
    while !rem.is_zero() {
        while powers[e] > rem {
            e -= 1;
        }
        rem -= &powers[e];
        steps.push(GreedyStep {
            exponent: e as u32,
            remainder: rem.clone(),
        });
        terms.push(Term::new(1, b, e as u32));
    }
    Ok(GreedyTrace {
        n,
        base: b,
        steps,
        representation: Representation::new(terms),
    })
}

fn greedy_u128(n: u128, b: u64) -> GreedyTrace {
    let b128 = b as u128;
    let mut power: u128 = 1;
    let mut e = 0u32;
    while let Some(next) = power.checked_mul(b128) {
        if next > n {
            break;
        }
        power = next;
        e += 1;
    }
    let mut rem = n;
    let mut steps = Vec::new();
    let mut terms = Vec::new();
    while rem > 0 {
        while power > rem {
            power /= b128;
            e -= 1;
        }
        rem -= power;
        steps.push(GreedyStep {
            exponent: e,
            remainder: BigUint::from(rem),
        });
        terms.push(Term::new(1, b, e));
    }
    GreedyTrace {
        n: BigUint::from(n),
        base: b,
        steps,
        representation: Representation::new(terms),
    }
}

/// `ln(b / (b - 1))`, the per-step shrink rate of the greedy algorithm.
fn greedy_rate(b: u64) -> f64 {
    (1.0 / (b as f64 - 1.0)).ln_1p()
}

/// `ceil(ln n / ln(b/(b-1))) + 1`.
pub fn greedy_length_bound(n: &BigUint, b: u64) -> u64 {
    if n.is_zero() {
        return 0;
    }
    (ln_big(n) / greedy_rate(b)).ceil() as u64 + 1
}

/// `c6(b) = ceil(1 / ln(b/(b-1)))`: greedy needs at most `c6 * ln n + 1` terms.
pub fn greedy_constant(b: u64) -> u64 {
    (1.0 / greedy_rate(b)).ceil() as u64
}

/// A representation of 1 by exponent-0 terms: `sum multiplicity_j * r_j = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OneRepresentation {
    /// `(r_j, multiplicity_j)`, one entry per coefficient.
    pub multiplicities: Vec<(i64, u64)>,
    /// Bezout coefficients `d_j` with `sum d_j r_j = 1`.
    pub bezout: Vec<i64>,
    /// Shifts `e_j` with `sum e_j = 0` and `e_j r_j >= 0`.
    pub shifts: Vec<i64>,
    /// Achieved length, the realized `c12(R)`.
    pub c12: u64,
}

impl OneRepresentation {
    pub fn representation(&self, base: u64) -> Representation {
        self.scaled(base, 0)
    }

    /// The same combination with every term multiplied by `base^e`.
    pub fn scaled(&self, base: u64, e: u32) -> Representation {
        let mut terms = Vec::with_capacity(self.c12 as usize);
        for &(r, count) in &self.multiplicities {
            for _ in 0..count {
                terms.push(Term::new(r, base, e));
            }
        }
        Representation::new(terms)
    }
}

fn extended_gcd_all(rs: &[i64]) -> (i128, Vec<i128>) {
    let mut g = rs[0] as i128;
    let mut coefs = vec![1i128];
    for &r in &rs[1..] {
        let ext = g.extended_gcd(&(r as i128));
        for c in coefs.iter_mut() {
            *c *= ext.x;
        }
        coefs.push(ext.y);
        g = ext.gcd;
    }
    if g < 0 {
        g = -g;
        for c in coefs.iter_mut() {
            *c = -*c;
        }
    }
    (g, coefs)
}

/// Represent 1 as a nonnegative combination of a coprime coefficient set that
/// has both signs, via Bezout coefficients `d_j` shifted by multiples of
/// `P / r_j` where `P = prod |r_j|`.
pub fn represent_one(coeffs: &CoefficientSet) -> Result<OneRepresentation> {
    let rs = coeffs.coeffs();
    if coeffs.gcd() != 1 {
        return Err(Error::domain(format!(
            "coefficients have gcd {} so 1 is not representable",
            coeffs.gcd()
        )));
    }
    if !coeffs.has_negative() || !coeffs.has_positive() {
        return Err(Error::domain(
            "represent_one needs both a positive and a negative coefficient",
        ));
    }
    if coeffs.contains(1) {
        return Ok(OneRepresentation {
            multiplicities: rs.iter().map(|&r| (r, (r == 1) as u64)).collect(),
            bezout: rs.iter().map(|&r| (r == 1) as i64).collect(),
            shifts: vec![0; rs.len()],
            c12: 1,
        });
    }

    let (g, d) = extended_gcd_all(rs);
    debug_assert_eq!(g, 1);
    let p = rs
        .iter()
        .try_fold(1i128, |acc, &r| acc.checked_mul(r.unsigned_abs() as i128))
        .ok_or(Error::Overflow("represent_one"))?;
    // multiplicity_j = d_j + |e_j| * P/|r_j|, with e_j carrying the sign of r_j
    let q: Vec<i128> = rs.iter().map(|&r| p / r.unsigned_abs() as i128).collect();
    let mut e: Vec<i128> = rs
        .iter()
        .zip(&d)
        .zip(&q)
        .map(|((&r, &dj), &qj)| {
            let need = Integer::div_ceil(&(-dj), &qj).max(0);
            if r > 0 {
                need
            } else {
                -need
            }
        })
        .collect();
    let v: i128 = e.iter().sum();
    if v != 0 {
        // absorb the imbalance in the largest |r_j| of the opposite sign
        let want_negative = v > 0;
        let j = (0..rs.len())
            .filter(|&j| (rs[j] < 0) == want_negative)
            .max_by_key(|&j| rs[j].unsigned_abs())
            .expect("both signs present");
        e[j] -= v;
    }
    let mut mult: Vec<i128> = (0..rs.len())
        .map(|j| d[j] + e[j] * (p / rs[j] as i128))
        .collect();
    debug_assert!(mult.iter().all(|&m| m >= 0));
    debug_assert_eq!(e.iter().sum::<i128>(), 0);

    // drop zero-sum blocks (a copies of r_i > 0 against c copies of r_j < 0)
    loop {
        let mut changed = false;
        for i in 0..rs.len() {
            for j in 0..rs.len() {
                if rs[i] <= 0 || rs[j] >= 0 {
                    continue;
                }
                let (ri, rj) = (rs[i] as i128, -(rs[j] as i128));
                let g = ri.gcd(&rj);
                let (a, c) = (rj / g, ri / g);
                if mult[i] >= a && mult[j] >= c {
                    let times = (mult[i] / a).min(mult[j] / c);
                    mult[i] -= times * a;
                    mult[j] -= times * c;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let to_i64 = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("represent_one"));
    let multiplicities = rs
        .iter()
        .zip(&mult)
        .map(|(&r, &m)| {
            Ok((
                r,
                u64::try_from(m).map_err(|_| Error::Overflow("represent_one"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let c12 = multiplicities.iter().map(|&(_, m)| m).sum();
    Ok(OneRepresentation {
        multiplicities,
        bezout: d.into_iter().map(to_i64).collect::<Result<_>>()?,
        shifts: e.into_iter().map(to_i64).collect::<Result<_>>()?,
        c12,
    })
}

fn positive_coprime(coeffs: &CoefficientSet) -> Result<&[i64]> {
    let rs = coeffs.coeffs();
    if !coeffs.all_positive() {
        return Err(Error::domain(
            "coin problem needs all coefficients positive",
        ));
    }
    if rs.len() < 2 {
        return Err(Error::domain(
            "coin problem needs at least two coefficients",
        ));
    }
    if coeffs.gcd() != 1 {
        return Err(Error::domain("coin problem needs coprime coefficients"));
    }
    Ok(rs)
}

/// `r_1 r_rho + r_2 + ... + r_{rho-1}`: every integer above it is a
/// nonnegative combination of `R`.
pub fn schur_bound(coeffs: &CoefficientSet) -> Result<u128> {
    let rs = positive_coprime(coeffs)?;
    let first = rs[0] as u128;
    let last = *rs.last().unwrap() as u128;
    let middle: u128 = rs[1..rs.len() - 1].iter().map(|&r| r as u128).sum();
    Ok(first * last + middle)
}

/// Minimum-count coin table over `[0, limit]`: `count[v]` coins and the last
/// coin used, `None` if unreachable.
struct CoinTable {
    count: Vec<Option<u32>>,
    last: Vec<i64>,
}

impl CoinTable {
    fn build(rs: &[i64], limit: usize) -> Self {
        let mut count = vec![None; limit + 1];
        let mut last = vec![0i64; limit + 1];
        count[0] = Some(0);
        for v in 1..=limit {
            let mut best: Option<(u32, i64)> = None;
            for &r in rs {
                let r_us = r as usize;
                if r_us > v {
                    continue;
                }
                if let Some(c) = count[v - r_us] {
                    if best.is_none_or(|(bc, _)| c + 1 < bc) {
                        best = Some((c + 1, r));
                    }
                }
            }
            if let Some((c, r)) = best {
                count[v] = Some(c);
                last[v] = r;
            }
        }
        CoinTable { count, last }
    }

    fn coins(&self, mut v: usize) -> Option<Vec<i64>> {
        self.count[v]?;
        let mut out = Vec::new();
        while v > 0 {
            let r = self.last[v];
            out.push(r);
            v -= r as usize;
        }
        Some(out)
    }
}

fn table_limit(x: u128) -> Result<usize> {
    usize::try_from(x)
        .ok()
        .filter(|&l| l <= 1 << 31)
        .ok_or(Error::Overflow("coin table"))
}

/// Largest integer that is not a nonnegative combination of `R` (0 when every
/// positive integer is).
pub fn frobenius_exact(coeffs: &CoefficientSet) -> Result<u128> {
    let rs = positive_coprime(coeffs)?;
    let c13 = schur_bound(coeffs)?;
    let limit = table_limit(c13 + rs[0] as u128)?;
    let table = CoinTable::build(rs, limit);
    let frob = (1..=limit)
        .rev()
        .find(|&v| table.count[v].is_none())
        .unwrap_or(0);
    debug_assert!(frob as u128 <= c13, "Schur bound violated");
    Ok(frob as u128)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoprimeMethod {
    /// `1` is a coefficient: plain greedy on the smallest base.
    UnitGreedy,
    /// All coefficients positive: greedy descent into the Schur window, then
    /// a coin-problem finish.
    CoinGreedy,
    /// Mixed signs without `1`: greedy on the smallest base with every power
    /// expanded through the representation of 1.
    SignedGreedy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoprimeRepresentation {
    #[serde(skip)]
    pub representation: Representation,
    pub method: CoprimeMethod,
    pub c6: u64,
    pub c12: Option<u64>,
    pub c13: Option<u128>,
    pub c14: Option<u64>,
    /// Upper bound on the length guaranteed by the construction.
    pub length_bound: u64,
}

/// A representation of `n` for a coprime coefficient set.
pub fn represent_coprime(n: &BigInt, instance: &Instance) -> Result<CoprimeRepresentation> {
    let coeffs = &instance.coeffs;
    let b = instance.basis.first();
    let n_pos = match n.to_biguint() {
        Some(v) if !v.is_zero() => v,
        _ => return Err(Error::domain(format!("need n >= 1, got {n}"))),
    };
    if coeffs.gcd() != 1 {
        return Err(Error::domain(format!(
            "coefficients have gcd {}: whole residue classes are unreachable",
            coeffs.gcd()
        )));
    }
    if !coeffs.has_positive() {
        return Err(Error::domain(
            "all coefficients negative: positive n unreachable",
        ));
    }
    let c6 = greedy_constant(b);

    if coeffs.contains(1) {
        let trace = greedy_single_base(n, b)?;
        return Ok(CoprimeRepresentation {
            representation: trace.representation,
            method: CoprimeMethod::UnitGreedy,
            c6,
            c12: None,
            c13: None,
            c14: None,
            length_bound: greedy_length_bound(&n_pos, b),
        });
    }

    if coeffs.has_negative() {
        let one = represent_one(coeffs)?;
        let trace = greedy_single_base(n, b)?;
        let mut rep = Representation::empty();
        for step in &trace.steps {
            rep.extend(one.scaled(b, step.exponent));
        }
        return Ok(CoprimeRepresentation {
            representation: rep,
            method: CoprimeMethod::SignedGreedy,
            c6,
            c12: Some(one.c12),
            c13: None,
            c14: None,
            length_bound: one.c12 * greedy_length_bound(&n_pos, b),
        });
    }

    let rs = coeffs.coeffs();
    let c13 = schur_bound(coeffs)?;
    let window_top = table_limit(2 * c13)?;
    let table = CoinTable::build(rs, window_top);
    let c14 = ((c13 as usize + 1)..=window_top)
        .filter_map(|v| table.count[v])
        .max()
        .unwrap_or(0) as u64;
    let length_bound = ((c6 + c14) as f64 * ln_big(&n_pos).max(1.0)).ceil() as u64;
    let finish = |v: usize, rep: &mut Representation| -> bool {
        match table.coins(v) {
            Some(coins) => {
                for r in coins {
                    rep.push(Term::new(r, b, 0));
                }
                true
            }
            None => false,
        }
    };
    let result = |representation| CoprimeRepresentation {
        representation,
        method: CoprimeMethod::CoinGreedy,
        c6,
        c12: None,
        c13: Some(c13),
        c14: Some(c14),
        length_bound,
    };

    let c13_big = BigUint::from(c13);
    if n_pos <= c13_big {
        let mut rep = Representation::empty();
        let v = n_pos.to_usize().expect("below c13");
        return if finish(v, &mut rep) {
            Ok(result(rep))
        } else {
            Err(Error::BelowSchurThreshold {
                n: n.to_string(),
                threshold: c13,
            })
        };
    }

    // descend while staying strictly above c13 until the remainder is in
    // (c13, 2 c13]
    let powers = powers_up_to(b, &n_pos);
    let two_c13 = &c13_big * 2u32;
    let mut rem = n_pos;
    let mut rep = Representation::empty();
    while rem > two_c13 {
        let room = &rem - &c13_big - 1u32;
        let mut best: Option<(BigUint, Term)> = None;
        for &r in rs {
            let limit = &room / (r as u64);
            let e = match powers.iter().rposition(|p| p <= &limit) {
                Some(e) => e,
                None => continue,
            };
            let value = &powers[e] * (r as u64);
            if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
                best = Some((value, Term::new(r, b, e as u32)));
            }
        }
        let (value, term) = best.expect("r_1 fits below the room");
        rem -= value;
        rep.push(term);
    }
    let v = rem.to_usize().expect("inside the Schur window");
    let landed = finish(v, &mut rep);
    debug_assert!(landed, "every value above c13 is a coin combination");
    Ok(result(rep))
}

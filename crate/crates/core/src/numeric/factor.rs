//! Integer factorization: trial division by small primes followed by Brent's
//! variant of Pollard rho with deterministic seeding.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::mont::Mont64;
use super::prime::{is_prime, is_prime_u64};
use super::{FactoredInteger, PrimePower};
use crate::error::{Error, Result};

/// Trial division covers every prime below this bound. Cofactors below
/// `TRIAL_LIMIT^2` are therefore fully factored without rho.
pub const TRIAL_LIMIT: u64 = 1_000_000;

/// While the cofactor is above `TRIAL_LIMIT^2`, trial division stops here and
/// rho takes over.
const EARLY_RHO_LIMIT: u64 = 1 << 12;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = TRIAL_LIMIT as usize;
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::with_capacity(80_000);
        for i in 2..=limit {
            if !composite[i] {
                primes.push(i as u64);
                for j in (i * i..=limit).step_by(i) {
                    composite[j] = true;
                }
            }
        }
        primes
    })
}

pub fn factor(n: &BigInt) -> Result<FactoredInteger> {
    match n.sign() {
        Sign::Plus => factor_biguint(n.magnitude()),
        _ => Err(Error::domain(format!("cannot factor {n}: need n >= 1"))),
    }
}

pub fn factor_u64(n: u64) -> Result<FactoredInteger> {
    factor_biguint(&BigUint::from(n))
}

pub fn factor_biguint(n: &BigUint) -> Result<FactoredInteger> {
    factor_seeded(n, 0)
}

/// Factor with an explicit rho seed. Output does not depend on the seed; only
/// the path taken to find it does.
pub fn factor_seeded(n: &BigUint, seed: u64) -> Result<FactoredInteger> {
    if n.is_zero() {
        return Err(Error::domain("cannot factor 0: need n >= 1"));
    }
    let mut primes: Vec<BigUint> = Vec::new();
    let mut rest = n.clone();

    if let Some(r) = rest.to_u64() {
        let r = trial_u64(r, &mut primes);
        rest = BigUint::from(r);
    } else {
        trial_big(&mut rest, &mut primes);
    }

    if !rest.is_one() {
        split_all(rest, seed, &mut primes);
    }

    primes.sort();
    let mut factors: Vec<PrimePower> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some(last) if last.prime == p => last.exp += 1,
            _ => factors.push(PrimePower { prime: p, exp: 1 }),
        }
    }
    Ok(FactoredInteger::from_parts_unchecked(n.clone(), factors))
}

fn trial_u64(mut r: u64, out: &mut Vec<BigUint>) -> u64 {
    let big_cofactor = |r: u64| r as u128 >= (TRIAL_LIMIT as u128) * (TRIAL_LIMIT as u128);
    let mut tested_prime_at = 0;
    for (i, &p) in small_primes().iter().enumerate() {
        if p * p > r {
            break;
        }
        if p > EARLY_RHO_LIMIT && big_cofactor(r) {
            break;
        }
        while r % p == 0 {
            r /= p;
            out.push(BigUint::from(p));
        }
        // cheap exit once the cofactor is prime
        if i % 64 == 63 && r != tested_prime_at {
            tested_prime_at = r;
            if is_prime_u64(r) {
                break;
            }
        }
    }
    r
}

fn trial_big(rest: &mut BigUint, out: &mut Vec<BigUint>) {
    for &p in small_primes() {
        if p > EARLY_RHO_LIMIT {
            break;
        }
        loop {
            let (q, rem) = rest.div_rem(&BigUint::from(p));
            if !rem.is_zero() {
                break;
            }
            *rest = q;
            out.push(BigUint::from(p));
        }
    }
}

fn split_all(n: BigUint, seed: u64, out: &mut Vec<BigUint>) {
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            out.push(m);
            continue;
        }
        // residual small factors can remain when trial division stopped early
        if let Some(v) = m.to_u64() {
            let mut found = None;
            for &p in small_primes() {
                if p * p > v {
                    break;
                }
                if p > EARLY_RHO_LIMIT {
                    break;
                }
                if v % p == 0 {
                    found = Some(p);
                    break;
                }
            }
            if let Some(p) = found {
                out.push(BigUint::from(p));
                stack.push(BigUint::from(v / p));
                continue;
            }
        }
        let d = find_divisor(&m, seed);
        let other = &m / &d;
        stack.push(d);
        stack.push(other);
    }
}

/// Nontrivial divisor of a composite `n`.
fn find_divisor(n: &BigUint, seed: u64) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    if let Some(v) = n.to_u64() {
        for c in 1.. {
            if let Some(d) = rho_u64(v, c + seed, 2 + seed) {
                return BigUint::from(d);
            }
        }
    }
    for c in 1u64.. {
        if let Some(d) = rho_big(n, c + seed, 2 + seed) {
            return d;
        }
    }
    unreachable!()
}

fn rho_u64(n: u64, c: u64, x0: u64) -> Option<u64> {
    let mont = Mont64::new(n);
    let c = mont.to_mont(c);
    let f = |x: u64| mont.add(mont.mul(x, x), c);
    let mut y = mont.to_mont(x0);
    let mut x;
    let mut ys;
    let mut q = mont.one();
    let mut g = 1u64;
    let mut r = 1u64;
    const BATCH: u64 = 128;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                let diff = if x > y { x - y } else { y - x };
                q = mont.mul(q, diff);
            }
            g = q.gcd(&n);
            if g != 1 {
                // back up and step singly to avoid a full collapse to n
                if g == n {
                    let mut ys2 = ys;
                    loop {
                        ys2 = f(ys2);
                        let diff = if x > ys2 { x - ys2 } else { ys2 - x };
                        g = diff.gcd(&n);
                        if g != 1 {
                            break;
                        }
                    }
                }
                break;
            }
            k += BATCH;
        }
        if g != 1 {
            return (g != n).then_some(g);
        }
        r *= 2;
        if r > 1 << 26 {
            return None;
        }
    }
}

fn rho_big(n: &BigUint, c: u64, x0: u64) -> Option<BigUint> {
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(x0) % n;
    let mut g = BigUint::one();
    let mut q = BigUint::one();
    let mut r = 1u64;
    let mut x;
    const BATCH: u64 = 64;
    loop {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            let ys = y.clone();
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            if &g == n {
                let mut ys2 = ys;
                loop {
                    ys2 = f(&ys2);
                    let diff = if x > ys2 { &x - &ys2 } else { &ys2 - &x };
                    g = diff.gcd(n);
                    if !g.is_one() {
                        break;
                    }
                }
            }
            k += BATCH;
        }
        if !g.is_one() {
            return (&g != n).then_some(g);
        }
        r *= 2;
        if r > 1 << 24 {
            return None;
        }
    }
}

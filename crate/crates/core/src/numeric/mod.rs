//! Multiplicative number theory toolbox: primality, factorization, divisors,
//! multiplicative order and the Carmichael function.

mod cache;
mod factor;
pub(crate) mod mont;
mod prime;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use cache::{FactorCache, CACHE_ENV_VAR, CACHE_FILE_NAME};
pub use factor::{factor, factor_biguint, factor_seeded, factor_u64, TRIAL_LIMIT};
pub use prime::{is_prime, is_prime_u64};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimePower {
    pub prime: BigUint,
    pub exp: u32,
}

/// A positive integer together with its prime factorization, primes ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: BigUint,
    factors: Vec<PrimePower>,
}

impl FactoredInteger {
    pub(crate) fn from_parts_unchecked(value: BigUint, factors: Vec<PrimePower>) -> Self {
        debug_assert!(Self::check_parts(&value, &factors));
        FactoredInteger { value, factors }
    }

    /// Build from an explicit factorization, checking primality, ordering and
    /// the product.
    pub fn from_factors(factors: Vec<PrimePower>) -> Result<Self> {
        let value = factors
            .iter()
            .fold(BigUint::one(), |acc, pp| acc * pp.prime.pow(pp.exp));
        if !Self::check_parts(&value, &factors) || !factors.iter().all(|pp| is_prime(&pp.prime)) {
            return Err(Error::domain("invalid factorization"));
        }
        Ok(FactoredInteger { value, factors })
    }

    fn check_parts(value: &BigUint, factors: &[PrimePower]) -> bool {
        let product = factors
            .iter()
            .fold(BigUint::one(), |acc, pp| acc * pp.prime.pow(pp.exp));
        &product == value
            && !value.is_zero()
            && factors.iter().all(|pp| pp.exp >= 1)
            && factors.windows(2).all(|w| w[0].prime < w[1].prime)
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    /// Largest exponent in the factorization, 0 for 1.
    pub fn max_exponent(&self) -> u32 {
        self.factors.iter().map(|pp| pp.exp).max().unwrap_or(0)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|pp| pp.exp == 1)
    }

    /// Value as `u64`, or an overflow error naming `what`.
    pub fn to_u64(&self, what: &'static str) -> Result<u64> {
        self.value.to_u64().ok_or(Error::Overflow(what))
    }

    /// All divisors in ascending order; there are `prod(exp + 1)` of them.
    pub fn divisors(&self) -> Vec<BigUint> {
        let mut out = vec![BigUint::one()];
        for pp in &self.factors {
            let len = out.len();
            let mut power = BigUint::one();
            for _ in 0..pp.exp {
                power *= &pp.prime;
                for i in 0..len {
                    out.push(&out[i] * &power);
                }
            }
        }
        out.sort();
        out
    }

    /// Carmichael function: lcm over prime powers of `p^(a-1)(p-1)`, with the
    /// exception `lambda(2^a) = 2^(a-2)` for `a >= 3`.
    pub fn carmichael(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, pp| {
            acc.lcm(&prime_power_carmichael(&pp.prime, pp.exp))
        })
    }

    pub fn totient(&self) -> BigUint {
        self.factors.iter().fold(BigUint::one(), |acc, pp| {
            acc * pp.prime.pow(pp.exp - 1) * (&pp.prime - 1u32)
        })
    }
}

impl fmt::Display for FactoredInteger {
    /// Cache-record form: `p1^a1,p2^a2,...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, pp) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}^{}", pp.prime, pp.exp)?;
        }
        Ok(())
    }
}

fn prime_power_carmichael(p: &BigUint, a: u32) -> BigUint {
    if p == &BigUint::from(2u32) {
        match a {
            0 | 1 => BigUint::one(),
            2 => BigUint::from(2u32),
            _ => BigUint::one() << (a - 2),
        }
    } else {
        p.pow(a - 1) * (p - 1u32)
    }
}

pub fn divisors(n: &FactoredInteger) -> Vec<BigUint> {
    n.divisors()
}

pub fn carmichael(m: &FactoredInteger) -> BigUint {
    m.carmichael()
}

/// Least `u >= 1` with `b^u = 1 (mod m)`.
pub fn mult_order(b: &BigInt, m: &FactoredInteger) -> Result<BigUint> {
    let modulus = m.value();
    if modulus.is_one() {
        return Ok(BigUint::one());
    }
    let modulus_int = BigInt::from(modulus.clone());
    let b = b.mod_floor(&modulus_int);
    let b = b.magnitude();
    if !b.gcd(modulus).is_one() {
        return Err(Error::domain(format!("gcd({b}, {modulus}) != 1")));
    }
    let lambda = m.carmichael();
    let mut order = lambda.clone();
    for pp in factor_biguint(&lambda)?.factors() {
        for _ in 0..pp.exp {
            let candidate = &order / &pp.prime;
            if b.modpow(&candidate, modulus).is_one() {
                order = candidate;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

/// Natural log of a positive big integer.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

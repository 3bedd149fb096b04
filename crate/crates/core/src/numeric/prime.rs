//! Deterministic primality testing.
//!
//! * `n < 2^64`: Miller-Rabin with the seven Sinclair bases, which has no
//!   pseudoprimes below 2^64.
//! * `n < 3.317e24`: Miller-Rabin with the first thirteen prime bases, which
//!   has no pseudoprimes below psi_13 = 3317044064679887385961981.
//! * Larger `n`: Miller-Rabin as a filter, then a Lucas n-1 proof built on the
//!   full factorization of `n - 1`. This is proof-grade but needs `n - 1` to be
//!   factorable, which holds for every `d + 1` the lambda search produces since
//!   `d` divides a smooth number.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::mont::Mont64;

const SMALL_PRIMES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const SINCLAIR_BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];
const PSI_13: u128 = 3_317_044_064_679_887_385_961_981;

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 43 * 43 {
        return true;
    }
    let mont = Mont64::new(n);
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let one = mont.one();
    let minus_one = mont.to_mont(n - 1);
    'bases: for a in SINCLAIR_BASES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn miller_rabin_big(n: &BigUint, bases: &[u64]) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'bases: for &a in bases {
        let a = BigUint::from(a) % n;
        if a.is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Lucas n-1 test: `n` is prime iff for every prime `q | n-1` some `a` has
/// `a^(n-1) = 1` and `gcd(a^((n-1)/q) - 1, n) = 1`.
fn lucas_proof(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let fac = match super::factor::factor_biguint(&n_minus_one) {
        Ok(f) => f,
        Err(_) => return false,
    };
    for pp in fac.factors() {
        let e = &n_minus_one / &pp.prime;
        let mut witnessed = false;
        for a in 2u64..2000 {
            let a = BigUint::from(a);
            if a.modpow(&n_minus_one, n) != one {
                return false;
            }
            let y = a.modpow(&e, n);
            let g = if y.is_zero() {
                n.clone()
            } else {
                (y + n - &one).gcd(n)
            };
            if g.is_one() {
                witnessed = true;
                break;
            }
            if &g != n {
                return false;
            }
        }
        if !witnessed {
            return false;
        }
    }
    true
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for p in SMALL_PRIMES {
        if (n % p).is_zero() {
            return false;
        }
    }
    if !miller_rabin_big(n, &SMALL_PRIMES) {
        return false;
    }
    match n.to_u128() {
        Some(v) if v < PSI_13 => true,
        _ => lucas_proof(n),
    }
}

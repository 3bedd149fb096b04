//! 64-bit Montgomery arithmetic for odd moduli.

#[derive(Clone, Copy, Debug)]
pub(crate) struct Mont64 {
    n: u64,
    /// -n^{-1} mod 2^64
    ninv: u64,
    r2: u64,
}

impl Mont64 {
    pub fn new(n: u64) -> Self {
        debug_assert!(n % 2 == 1 && n > 1);
        let mut inv = n;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r1 = ((1u128 << 64) % n as u128) as u64;
        let r2 = ((r1 as u128 * r1 as u128) % n as u128) as u64;
        Mont64 {
            n,
            ninv: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let lo = t as u64;
        let hi = (t >> 64) as u64;
        let m = lo.wrapping_mul(self.ninv);
        let mn = m as u128 * self.n as u128;
        let (_, carry) = lo.overflowing_add(mn as u64);
        let s = hi as u128 + (mn >> 64) + carry as u128;
        if s >= self.n as u128 {
            (s - self.n as u128) as u64
        } else {
            s as u64
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.n, self.r2)
    }

    #[cfg(test)]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (s, o) = a.overflowing_add(b);
        if o || s >= self.n {
            s.wrapping_sub(self.n)
        } else {
            s
        }
    }

    pub fn pow(&self, base: u64, mut e: u64) -> u64 {
        let mut result = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        result
    }
}

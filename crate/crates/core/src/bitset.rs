//! Fixed-length bitset with shift-or and rotate-or, the workhorse of every
//! sumset computation in this crate.

#[derive(Clone, PartialEq, Eq)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for Bitset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter_ones()).finish()
    }
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_full(&self) -> bool {
        self.count_ones() == self.len
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }

    /// First index `>= from` whose bit is clear.
    pub fn first_zero_from(&self, from: usize) -> Option<usize> {
        (from..self.len).find(|&i| !self.get(i))
    }

    pub fn or_assign(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    /// `self |= src << shift`: bit `i` of `src` lands on `i + shift`; bits
    /// falling outside `[0, len)` are dropped.
    pub fn or_shifted(&mut self, src: &Bitset, shift: isize) {
        debug_assert_eq!(self.len, src.len);
        let nw = self.words.len();
        if shift >= 0 {
            let shift = shift as usize;
            if shift >= self.len {
                return;
            }
            let (wo, bo) = (shift / 64, shift % 64);
            for j in (0..nw - wo).rev() {
                let w = src.words[j];
                if w == 0 {
                    continue;
                }
                self.words[j + wo] |= w << bo;
                if bo > 0 && j + wo + 1 < nw {
                    self.words[j + wo + 1] |= w >> (64 - bo);
                }
            }
            self.clear_tail();
        } else {
            let shift = shift.unsigned_abs();
            if shift >= self.len {
                return;
            }
            let (wo, bo) = (shift / 64, shift % 64);
            for j in wo..nw {
                let w = src.words[j];
                if w == 0 {
                    continue;
                }
                self.words[j - wo] |= w >> bo;
                if bo > 0 && j > wo {
                    self.words[j - wo - 1] |= w << (64 - bo);
                }
            }
        }
    }

    /// `self |= rotate(src, s)`: bit `i` of `src` lands on `(i + s) mod len`.
    pub fn or_rotated(&mut self, src: &Bitset, s: usize) {
        let s = s % self.len.max(1);
        if s == 0 {
            self.or_assign(src);
            return;
        }
        self.or_shifted(src, s as isize);
        self.or_shifted(src, s as isize - self.len as isize);
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

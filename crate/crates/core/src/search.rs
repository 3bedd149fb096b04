//! Exact minimal lengths under a term cap, the threshold function `f_R(k)`,
//! and the counting bound for positive coefficient sets.
//!
//! Signed representations can use terms far larger than the target, so
//! lengths are computed under a cap: every term satisfies
//! `|r b^e| <= beta * |n|`. The reported length is exact for that cap.
//!
//! Level sets are bitsets over a window `[-W, W]`. Restricting partial sums to
//! the window loses nothing once `W >= max(cap, |n|)`: order the terms so that
//! a negative term follows every nonnegative partial sum and a positive term
//! follows every negative one; then every partial sum stays within
//! `[min(-cap, n), max(cap, n)]`.

use std::collections::HashSet;

use serde::Serialize;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::terms::{enumerate_terms, Instance, Representation, Term};

/// Largest window half-width a level set may use.
pub const MAX_WINDOW: u64 = 1 << 30;

/// Default cap factor: the square of the largest base.
pub fn default_beta(instance: &Instance) -> u64 {
    instance.basis.max().saturating_mul(instance.basis.max())
}

/// Distinct term values with `|v| <= cap`, sorted by `|v|` then `v`, each with
/// one term producing it.
#[derive(Clone, Debug)]
pub struct TermTable {
    values: Vec<i64>,
    terms: Vec<Term>,
}

impl TermTable {
    pub fn new(instance: &Instance, cap: u64) -> Self {
        let mut values: Vec<i64> = Vec::new();
        let mut terms: Vec<Term> = Vec::new();
        // equal values are adjacent in enumeration order
        for t in enumerate_terms(instance, cap as u128) {
            let v = t.value_i128().expect("capped term fits") as i64;
            if values.last() != Some(&v) {
                values.push(v);
                terms.push(t);
            }
        }
        TermTable { values, terms }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn term_for(&self, v: i64) -> Option<Term> {
        self.values
            .iter()
            .position(|&x| x == v)
            .map(|i| self.terms[i])
    }

    /// Distinct magnitudes, ascending.
    fn magnitudes(&self) -> Vec<u64> {
        let mut m: Vec<u64> = self.values.iter().map(|v| v.unsigned_abs()).collect();
        m.dedup();
        m
    }

    /// Values with `|v| <= cap`; a prefix since values are sorted by `|v|`.
    fn prefix(&self, cap: u64) -> &[i64] {
        let end = self.values.partition_point(|v| v.unsigned_abs() <= cap);
        &self.values[..end]
    }
}

/// Cumulative level sets `L_0 subset L_1 subset ...` of sums of at most `j`
/// terms, partial sums confined to `[-window, window]`.
struct Levels {
    window: u64,
    levels: Vec<Bitset>,
}

impl Levels {
    fn new(window: u64) -> Result<Self> {
        if window > MAX_WINDOW {
            return Err(Error::Overflow("level-set window"));
        }
        let mut zero = Bitset::new(2 * window as usize + 1);
        zero.set(window as usize);
        Ok(Levels {
            window,
            levels: vec![zero],
        })
    }

    fn index(&self, v: i64) -> Option<usize> {
        (v.unsigned_abs() <= self.window).then(|| (v + self.window as i64) as usize)
    }

    fn contains(&self, level: usize, v: i64) -> bool {
        self.index(v).is_some_and(|i| self.levels[level].get(i))
    }

    fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Append one level; returns false when it equals the previous one.
    fn grow(&mut self, values: &[i64]) -> bool {
        let cur = self.levels.last().unwrap();
        let mut next = cur.clone();
        for &t in values {
            next.or_shifted(cur, t as isize);
        }
        let grew = &next != cur;
        self.levels.push(next);
        grew
    }

    /// Walk back from `v` at `level` to 0, one term per level.
    fn witness(
        &self,
        mut v: i64,
        mut level: usize,
        values: &[i64],
        table: &TermTable,
    ) -> Representation {
        let mut rep = Representation::empty();
        while v != 0 {
            debug_assert!(level > 0);
            let t = values
                .iter()
                .rev()
                .copied()
                .find(|&t| self.contains(level - 1, v - t))
                .expect("level sets are closed under removing a term");
            rep.push(table.term_for(t).expect("term value"));
            v -= t;
            level -= 1;
        }
        rep.canonical()
    }
}

fn cap_for(n: i64, beta: u64) -> Result<u64> {
    if beta == 0 {
        return Err(Error::domain("cap factor beta must be at least 1"));
    }
    n.unsigned_abs()
        .checked_mul(beta)
        .filter(|&c| c <= MAX_WINDOW)
        .ok_or(Error::Overflow("term cap"))
}

/// Minimal number of terms `|r b^e| <= beta |n|` summing to `n`, with a
/// witness. `None` when no number of capped terms reaches `n`.
pub fn min_representation(
    n: i64,
    instance: &Instance,
    beta: u64,
) -> Result<Option<Representation>> {
    let cap = cap_for(n, beta)?;
    if n == 0 {
        return Ok(Some(Representation::empty()));
    }
    let table = TermTable::new(instance, cap);
    let values = table.values();
    let mut levels = Levels::new(cap)?;
    loop {
        let d = levels.depth();
        if levels.contains(d, n) {
            return Ok(Some(levels.witness(n, d, values, &table)));
        }
        if !levels.grow(values) {
            return Ok(None);
        }
    }
}

/// Breadth engine for the capped minimal length.
pub fn min_length(n: i64, instance: &Instance, beta: u64) -> Result<Option<usize>> {
    Ok(min_representation(n, instance, beta)?.map(|r| r.len()))
}

/// Depth engine: iterative deepening over multisets of capped terms with no
/// window on partial sums. Searches up to `max_depth` terms.
pub fn min_length_depth_first(
    n: i64,
    instance: &Instance,
    beta: u64,
    max_depth: usize,
) -> Result<Option<usize>> {
    let cap = cap_for(n, beta)?;
    if n == 0 {
        return Ok(Some(0));
    }
    let mut values: Vec<i64> = TermTable::new(instance, cap).values().to_vec();
    values.reverse();
    let singles: HashSet<i64> = values.iter().copied().collect();

    fn search(
        target: i64,
        depth: usize,
        start: usize,
        values: &[i64],
        singles: &HashSet<i64>,
        cap: u64,
    ) -> bool {
        if depth == 1 {
            return singles.contains(&target);
        }
        for (i, &t) in values.iter().enumerate().skip(start) {
            let rest = target - t;
            if rest.unsigned_abs() > (depth as u64 - 1) * cap {
                continue;
            }
            if search(rest, depth - 1, i, values, singles, cap) {
                return true;
            }
        }
        false
    }

    for depth in 1..=max_depth {
        if n.unsigned_abs() > depth as u64 * cap {
            continue;
        }
        if search(n, depth, 0, &values, &singles, cap) {
            return Ok(Some(depth));
        }
    }
    Ok(None)
}

/// Sums of at most `level` capped terms, restricted to `[-bound, bound]`.
#[derive(Clone, Debug)]
pub struct LevelSet {
    pub instance: Instance,
    pub level: usize,
    pub cap: u64,
    pub bound: u64,
    levels: Levels,
}

impl LevelSet {
    pub fn build(instance: &Instance, level: usize, cap: u64, bound: u64) -> Result<Self> {
        let table = TermTable::new(instance, cap);
        let mut levels = Levels::new(cap.max(bound))?;
        while levels.depth() < level {
            levels.grow(table.values());
        }
        Ok(LevelSet {
            instance: instance.clone(),
            level,
            cap,
            bound,
            levels,
        })
    }

    pub fn contains(&self, v: i64) -> bool {
        v.unsigned_abs() <= self.bound && self.levels.contains(self.level, v)
    }

    pub fn values(&self) -> Vec<i64> {
        let b = self.bound as i64;
        (-b..=b).filter(|&v| self.contains(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.values().is_empty()
    }
}

impl Clone for Levels {
    fn clone(&self) -> Self {
        Levels {
            window: self.window,
            levels: self.levels.clone(),
        }
    }
}

impl std::fmt::Debug for Levels {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Levels")
            .field("window", &self.window)
            .field("depth", &self.depth())
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdResult {
    pub k: usize,
    pub f: u64,
    pub cap_factor: u64,
    pub method: &'static str,
    /// A minimal representation of `f` under the cap. It has exactly `k`
    /// terms whenever `1` or `-1` pairs with the rest as in `R = {-1, 1}`;
    /// in general its length is `min_length(f) >= k`.
    pub witness: Option<Representation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThresholdOutcome {
    Found(ThresholdResult),
    /// Every `1 <= n <= frontier` needs fewer than `k` terms.
    Inconclusive {
        k: usize,
        frontier: u64,
    },
}

impl ThresholdOutcome {
    pub fn found(&self) -> Option<&ThresholdResult> {
        match self {
            ThresholdOutcome::Found(r) => Some(r),
            ThresholdOutcome::Inconclusive { .. } => None,
        }
    }
}

/// Smallest `n >= 1` whose capped minimal length is at least `k`, scanning up
/// to `n_max`.
///
/// The cap `beta n` changes only when it passes a term magnitude, so the scan
/// runs in blocks: within a block every `n` sees the same term set and one
/// level set of depth `k - 1` answers all of them.
pub fn threshold_f(
    k: usize,
    instance: &Instance,
    beta: u64,
    n_max: u64,
) -> Result<ThresholdOutcome> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if beta == 0 {
        return Err(Error::domain("cap factor beta must be at least 1"));
    }
    let finish = |f: u64, method| -> Result<ThresholdOutcome> {
        let witness = min_representation(f as i64, instance, beta)?;
        Ok(ThresholdOutcome::Found(ThresholdResult {
            k,
            f,
            cap_factor: beta,
            method,
            witness,
        }))
    };
    if k == 1 {
        return finish(1, "trivial");
    }
    if n_max == 0 {
        return Ok(ThresholdOutcome::Inconclusive { k, frontier: 0 });
    }
    let top_cap = n_max.checked_mul(beta).ok_or(Error::Overflow("term cap"))?;
    let table = TermTable::new(instance, top_cap);
    let mags = table.magnitudes();

    // block i uses magnitudes[..i]; it covers n with mags[i-1] <= beta n < mags[i]
    for i in 0..=mags.len() {
        let lo = if i == 0 {
            1
        } else {
            mags[i - 1].div_ceil(beta)
        };
        let hi = if i == mags.len() {
            n_max
        } else {
            (mags[i].div_ceil(beta) - 1).min(n_max)
        };
        if lo > hi {
            continue;
        }
        if i == 0 {
            // no term fits under the cap
            return finish(lo, "level-set scan");
        }
        let prefix = table.prefix(mags[i - 1]);
        let mut levels = Levels::new(mags[i - 1].max(hi))?;
        while levels.depth() < k - 1 {
            if !levels.grow(prefix) {
                break;
            }
        }
        let d = levels.depth();
        if let Some(n) = (lo..=hi).find(|&n| !levels.contains(d, n as i64)) {
            return finish(n, "level-set scan");
        }
        if hi == n_max {
            break;
        }
    }
    Ok(ThresholdOutcome::Inconclusive { k, frontier: n_max })
}

/// `threshold_f` at `beta` and again at `2 beta`; stable when both agree.
pub fn threshold_f_with_stability(
    k: usize,
    instance: &Instance,
    beta: u64,
    n_max: u64,
) -> Result<(ThresholdOutcome, bool)> {
    let base = threshold_f(k, instance, beta, n_max)?;
    let doubled = threshold_f(k, instance, beta.saturating_mul(2), n_max)?;
    let stable = match (&base, &doubled) {
        (ThresholdOutcome::Found(a), ThresholdOutcome::Found(b)) => a.f == b.f,
        (ThresholdOutcome::Inconclusive { .. }, ThresholdOutcome::Inconclusive { .. }) => true,
        _ => false,
    };
    Ok((base, stable))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepresentableCount {
    pub k: usize,
    pub n: u64,
    /// Positive integers `<= n` that are sums of at most `k - 1` terms.
    pub count: u64,
    /// `(rho t log n / log 2)^(k-1)` as stated in the counting argument.
    pub counting_bound: f64,
    /// `(rho t (floor(log2 n) + 1) + 1)^(k-1) - 1`, which also counts the
    /// exponent 0 and always holds.
    pub safe_bound: f64,
}

fn ensure_positive(instance: &Instance) -> Result<()> {
    if instance.coeffs.all_positive() {
        Ok(())
    } else {
        Err(Error::domain(
            "this operation needs every coefficient positive",
        ))
    }
}

/// Exact count of positive integers `<= n` with a representation by at most
/// `k - 1` terms; every coefficient must be positive.
pub fn count_representables(instance: &Instance, k: usize, n: u64) -> Result<RepresentableCount> {
    ensure_positive(instance)?;
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if n > MAX_WINDOW * 2 {
        return Err(Error::Overflow("count_representables bound"));
    }
    let mut reach = Bitset::new(n as usize + 1);
    reach.set(0);
    let table = TermTable::new(instance, n);
    for _ in 1..k {
        let cur = reach.clone();
        for &t in table.values() {
            reach.or_shifted(&cur, t as isize);
        }
        if reach == cur {
            break;
        }
    }
    let count = reach.count_ones() as u64 - 1;
    let slots = (instance.rho() * instance.t()) as f64;
    let e = (k - 1) as i32;
    let counting_bound = if k == 1 {
        1.0
    } else {
        (slots * (n as f64).log2()).powi(e)
    };
    let log2_floor = if n == 0 { 0 } else { 63 - n.leading_zeros() } as f64;
    let safe_bound = (slots * (log2_floor + 1.0) + 1.0).powi(e) - 1.0;
    Ok(RepresentableCount {
        k,
        n,
        count,
        counting_bound,
        safe_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositiveBoundCheck {
    pub k: usize,
    /// `(1.5 rho k t ln(rho k t))^(k-1)`.
    pub bound: f64,
    /// Exact `f_R(k)` when the scan reached it.
    pub f: Option<u64>,
    pub method: &'static str,
    /// Whether `f_R(k) <= bound`; `None` when neither route decides it.
    pub holds: Option<bool>,
}

/// Scan limit for the exact route of [`check_positive_bound`].
pub const EXACT_SCAN_LIMIT: u64 = 1 << 24;

/// Check `f_R(k) <= (1.5 rho k t ln(rho k t))^(k-1)` for a positive `R`,
/// exactly when `f_R(k)` is within reach and by counting otherwise.
pub fn check_positive_bound(instance: &Instance, k: usize) -> Result<PositiveBoundCheck> {
    ensure_positive(instance)?;
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let x = (instance.rho() * k * instance.t()) as f64;
    let bound = if k == 1 {
        1.0
    } else {
        (1.5 * x * x.ln()).powi(k as i32 - 1)
    };
    let limit = if bound.is_finite() {
        (bound.floor() as u64).min(EXACT_SCAN_LIMIT)
    } else {
        EXACT_SCAN_LIMIT
    };
    // all coefficients positive: larger terms never help, beta = 1 is exact
    let scan_to = limit.max(1).saturating_add(1);
    match threshold_f(k, instance, 1, scan_to)? {
        ThresholdOutcome::Found(r) => Ok(PositiveBoundCheck {
            k,
            bound,
            f: Some(r.f),
            method: "exact-scan",
            holds: Some((r.f as f64) <= bound),
        }),
        ThresholdOutcome::Inconclusive { .. } => {
            if bound < (scan_to as f64) {
                return Ok(PositiveBoundCheck {
                    k,
                    bound,
                    f: None,
                    method: "exact-scan",
                    holds: Some(false),
                });
            }
            let n = limit;
            let counted = count_representables(instance, k, n)?;
            Ok(PositiveBoundCheck {
                k,
                bound,
                f: None,
                method: "counting",
                holds: (counted.count < n).then_some(true),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nath() -> Instance {
        Instance::nathanson()
    }

    #[test]
    fn min_length_examples() {
        assert_eq!(min_length(0, &nath(), 4).unwrap(), Some(0));
        assert_eq!(min_length(5, &nath(), 4).unwrap(), Some(2));
        assert_eq!(min_length(21, &nath(), 4).unwrap(), Some(3));
        assert_eq!(min_length(-21, &nath(), 4).unwrap(), Some(3));
        let rep = min_representation(21, &nath(), 4).unwrap().unwrap();
        assert_eq!(rep.value(), 21.into());
        assert!(rep.validate(&nath()));
    }

    #[test]
    fn unreachable_is_none() {
        let even = Instance::new(vec![2], vec![2]).unwrap();
        assert_eq!(min_length(7, &even, 4).unwrap(), None);
        assert_eq!(min_length_depth_first(7, &even, 4, 6).unwrap(), None);
    }

    #[test]
    fn threshold_examples() {
        let f = |k| {
            threshold_f(k, &nath(), 4, 10_000)
                .unwrap()
                .found()
                .unwrap()
                .f
        };
        assert_eq!(f(1), 1);
        assert_eq!(f(2), 5);
        assert_eq!(f(3), 21);
        assert!(matches!(
            threshold_f(0, &nath(), 4, 10),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn threshold_inconclusive() {
        let out = threshold_f(3, &nath(), 4, 20).unwrap();
        assert_eq!(out, ThresholdOutcome::Inconclusive { k: 3, frontier: 20 });
    }

    #[test]
    fn count_examples() {
        let b2 = Instance::new(vec![2], vec![1]).unwrap();
        let c = count_representables(&b2, 2, 10).unwrap();
        assert_eq!(c.count, 4);
        // the stated bound drops exponent 0 and is exceeded here
        assert!((c.count as f64) > c.counting_bound);
        assert!((c.count as f64) <= c.safe_bound);

        let b23 = Instance::new(vec![2, 3], vec![1]).unwrap();
        assert_eq!(count_representables(&b23, 3, 10).unwrap().count, 10);
        assert_eq!(count_representables(&b23, 1, 100).unwrap().count, 0);
        assert!(count_representables(&nath(), 2, 10).is_err());
    }

    #[test]
    fn positive_bound_examples() {
        let b2 = Instance::new(vec![2], vec![1]).unwrap();
        let c = check_positive_bound(&b2, 2).unwrap();
        assert_eq!(c.f, Some(3));
        // 1.5 * 2 * ln 2 = 2.079 < 3
        assert!((c.bound - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(c.holds, Some(false));

        let b23 = Instance::new(vec![2, 3], vec![1]).unwrap();
        let c = check_positive_bound(&b23, 2).unwrap();
        assert_eq!(c.f, Some(5));
        assert_eq!(c.holds, Some(true));

        let c = check_positive_bound(&b2, 1).unwrap();
        assert_eq!((c.f, c.bound, c.holds), (Some(1), 1.0, Some(true)));
    }
}

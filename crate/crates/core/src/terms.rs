//! Problem instances: the base set `B`, the coefficient set `R`, terms
//! `r * b^e` and representations built from them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Base set `B = {b_1 < ... < b_t}`, every base at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerBasis {
    bases: Vec<u64>,
}

impl PowerBasis {
    pub fn new(mut bases: Vec<u64>) -> Result<Self> {
        bases.sort_unstable();
        if bases.is_empty() {
            return Err(Error::domain("base set must be nonempty"));
        }
        if bases[0] < 2 {
            return Err(Error::domain("every base must be at least 2"));
        }
        if bases.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("bases must be distinct"));
        }
        Ok(PowerBasis { bases })
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    pub fn t(&self) -> usize {
        self.bases.len()
    }

    /// Smallest base, the one the greedy constructions run on.
    pub fn first(&self) -> u64 {
        self.bases[0]
    }

    pub fn max(&self) -> u64 {
        *self.bases.last().unwrap()
    }

    pub fn contains(&self, b: u64) -> bool {
        self.bases.binary_search(&b).is_ok()
    }
}

/// Coefficient set `R`: distinct nonzero integers, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoefficientSet {
    coeffs: Vec<i64>,
}

impl CoefficientSet {
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        coeffs.sort_unstable();
        if coeffs.is_empty() {
            return Err(Error::domain("coefficient set must be nonempty"));
        }
        if coeffs.contains(&0) {
            return Err(Error::domain("0 is not allowed as a coefficient"));
        }
        if coeffs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("coefficients must be distinct"));
        }
        if coeffs[0] == i64::MIN {
            return Err(Error::domain("coefficient out of range"));
        }
        Ok(CoefficientSet { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn rho(&self) -> usize {
        self.coeffs.len()
    }

    pub fn contains(&self, r: i64) -> bool {
        self.coeffs.binary_search(&r).is_ok()
    }

    pub fn all_positive(&self) -> bool {
        self.coeffs[0] > 0
    }

    pub fn has_negative(&self) -> bool {
        self.coeffs[0] < 0
    }

    pub fn has_positive(&self) -> bool {
        *self.coeffs.last().unwrap() > 0
    }

    /// gcd of the absolute values.
    pub fn gcd(&self) -> u64 {
        self.coeffs
            .iter()
            .fold(0u64, |g, &r| num_integer::gcd(g, r.unsigned_abs()))
    }

    pub fn max_abs(&self) -> u64 {
        self.coeffs.iter().map(|r| r.unsigned_abs()).max().unwrap()
    }

    pub fn min_abs(&self) -> u64 {
        self.coeffs.iter().map(|r| r.unsigned_abs()).min().unwrap()
    }
}

/// A problem instance `(B, R)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    pub basis: PowerBasis,
    pub coeffs: CoefficientSet,
}

impl Instance {
    pub fn new(bases: Vec<u64>, coeffs: Vec<i64>) -> Result<Self> {
        Ok(Instance {
            basis: PowerBasis::new(bases)?,
            coeffs: CoefficientSet::new(coeffs)?,
        })
    }

    /// `B = {2, 3}`, `R = {-1, 1}`: sums and differences of powers of 2 and 3.
    pub fn nathanson() -> Self {
        Instance::new(vec![2, 3], vec![-1, 1]).expect("valid preset")
    }

    pub fn rho(&self) -> usize {
        self.coeffs.rho()
    }

    pub fn t(&self) -> usize {
        self.basis.t()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceWire {
    bases: Vec<WireInt>,
    coeffs: Vec<WireInt>,
}

/// Integer accepted either as a JSON number or a decimal string; always
/// written as a string.
#[derive(Clone, Debug)]
struct WireInt(i128);

impl Serialize for WireInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for WireInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(WireInt(n as i128)),
            Raw::Str(s) => s
                .trim()
                .parse()
                .map(WireInt)
                .map_err(|_| serde::de::Error::custom(format!("not a decimal integer: {s:?}"))),
        }
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceWire {
            bases: self
                .basis
                .bases
                .iter()
                .map(|&b| WireInt(b as i128))
                .collect(),
            coeffs: self
                .coeffs
                .coeffs
                .iter()
                .map(|&r| WireInt(r as i128))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = InstanceWire::deserialize(d)?;
        let bases = wire
            .bases
            .iter()
            .map(|w| u64::try_from(w.0).map_err(|_| D::Error::custom("base out of range")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let coeffs = wire
            .coeffs
            .iter()
            .map(|w| i64::try_from(w.0).map_err(|_| D::Error::custom("coefficient out of range")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Instance::new(bases, coeffs).map_err(D::Error::custom)
    }
}

/// One term `r * b^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term {
    pub r: i64,
    pub b: u64,
    pub e: u32,
}

impl Term {
    pub fn new(r: i64, b: u64, e: u32) -> Self {
        Term { r, b, e }
    }

    pub fn value(&self) -> BigInt {
        BigInt::from(self.r) * BigInt::from(self.b).pow(self.e)
    }

    /// Value if it fits in an `i128`.
    pub fn value_i128(&self) -> Option<i128> {
        (self.b as i128)
            .checked_pow(self.e)
            .and_then(|p| p.checked_mul(self.r as i128))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.r < 0 { '-' } else { '+' };
        let mag = self.r.unsigned_abs();
        if mag == 1 {
            write!(f, "{sign}{}^{}", self.b, self.e)
        } else {
            write!(f, "{sign}{mag}*{}^{}", self.b, self.e)
        }
    }
}

/// A multiset of terms. The empty representation has value 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Representation {
    terms: Vec<Term>,
}

impl Representation {
    pub fn new(terms: Vec<Term>) -> Self {
        Representation { terms }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, t: Term) {
        self.terms.push(t);
    }

    pub fn extend(&mut self, other: Representation) {
        self.terms.extend(other.terms);
    }

    pub fn value(&self) -> BigInt {
        self.terms
            .iter()
            .map(Term::value)
            .fold(BigInt::zero(), |a, v| a + v)
    }

    /// True iff every term uses a coefficient from `R` and a base from `B`.
    pub fn validate(&self, instance: &Instance) -> bool {
        self.terms
            .iter()
            .all(|t| instance.coeffs.contains(t.r) && instance.basis.contains(t.b))
    }

    /// Canonical order: descending `|value|`, then descending value, then by
    /// `(r, b, e)`.
    pub fn canonical(mut self) -> Self {
        self.terms.sort_by(|x, y| {
            let (vx, vy) = (x.value(), y.value());
            vy.magnitude()
                .cmp(vx.magnitude())
                .then_with(|| vy.cmp(&vx))
                .then_with(|| x.cmp(y))
        });
        self
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

pub fn evaluate(rep: &Representation) -> BigInt {
    rep.value()
}

pub fn validate(rep: &Representation, instance: &Instance) -> bool {
    rep.validate(instance)
}

/// Every term with `|r * b^e| <= cap`, one per distinct `(r, value)` pair
/// (so `b^0 = 1` appears once per coefficient), sorted by `|value|` and then
/// by value. Among terms with equal `(r, value)` the smallest base wins.
pub fn enumerate_terms(instance: &Instance, cap: u128) -> Vec<Term> {
    let mut out: Vec<(i128, Term)> = Vec::new();
    for &r in instance.coeffs.coeffs() {
        let rabs = r.unsigned_abs() as u128;
        for &b in instance.basis.bases() {
            let mut power: u128 = 1;
            let mut e = 0u32;
            while let Some(mag) = rabs.checked_mul(power) {
                if mag > cap {
                    break;
                }
                let v = if r < 0 { -(mag as i128) } else { mag as i128 };
                out.push((v, Term::new(r, b, e)));
                match power.checked_mul(b as u128) {
                    Some(p) => power = p,
                    None => break,
                }
                e += 1;
            }
        }
    }
    out.sort_by(|(va, ta), (vb, tb)| {
        va.unsigned_abs()
            .cmp(&vb.unsigned_abs())
            .then(va.cmp(vb))
            .then(ta.r.cmp(&tb.r))
            .then(ta.b.cmp(&tb.b))
    });
    out.dedup_by(|(va, ta), (vb, tb)| va == vb && ta.r == tb.r);
    out.into_iter().map(|(_, t)| t).collect()
}

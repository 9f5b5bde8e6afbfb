//! Exact positive scalars.
//!
//! [`PrimeExponentVector`] is the multiplicative group of positive rationals
//! written additively over the primes. [`PositiveReal`] extends it by a free
//! abelian group on named symbols, which is how irrational factors (a
//! transcendental stretch of a real line, say) enter the bookkeeping without
//! ever touching floating point.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor_biguint, is_prime};
use crate::error::{bail, Result};

/// A positive rational as a finitely supported map `prime -> exponent`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeExponentVector {
    exponents: BTreeMap<u64, i64>,
}

impl PrimeExponentVector {
    pub fn one() -> Self {
        Self::default()
    }

    /// `p^e`. Panics if `p` is not prime.
    pub fn prime_power(p: u64, e: i64) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        let mut exponents = BTreeMap::new();
        if e != 0 {
            exponents.insert(p, e);
        }
        Self { exponents }
    }

    /// Builds a vector from arbitrary `(prime, exponent)` pairs, summing repeats.
    pub fn from_pairs<I: IntoIterator<Item = (u64, i64)>>(pairs: I) -> Result<Self> {
        let mut out = Self::one();
        for (p, e) in pairs {
            if !is_prime(p) {
                bail!(Domain, "{p} is not a prime");
            }
            out.add_exponent(p, e);
        }
        Ok(out)
    }

    fn add_exponent(&mut self, p: u64, e: i64) {
        if e == 0 {
            return;
        }
        let slot = self.exponents.entry(p).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exponents.remove(&p);
        }
    }

    pub fn exponent(&self, p: u64) -> i64 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.exponents.iter().map(|(p, e)| (*p, *e))
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.exponents.keys().copied()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, e) in other.iter() {
            out.add_exponent(p, e);
        }
        out
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inverse())
    }

    pub fn inverse(&self) -> Self {
        Self {
            exponents: self.exponents.iter().map(|(p, e)| (*p, -e)).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        Self {
            exponents: self.exponents.iter().map(|(p, e)| (*p, e * k)).collect(),
        }
    }

    /// Factorizes `|r|` for a nonzero rational.
    pub fn from_rational(r: &BigRational) -> Result<Self> {
        if r.is_zero() {
            bail!(Domain, "zero has no prime factorization");
        }
        let mut out = Self::one();
        for (p, e) in factor_biguint(&r.numer().abs().to_biguint().unwrap())? {
            out.add_exponent(p, e as i64);
        }
        for (p, e) in factor_biguint(&r.denom().abs().to_biguint().unwrap())? {
            out.add_exponent(p, -(e as i64));
        }
        Ok(out)
    }

    pub fn to_rational(&self) -> BigRational {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for (p, e) in self.iter() {
            let pe = BigUint::from(p).pow(e.unsigned_abs() as u32);
            if e > 0 {
                num *= pe;
            } else {
                den *= pe;
            }
        }
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl fmt::Display for PrimeExponentVector {
    /// Prints the rational value, e.g. `360/7`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.to_rational();
        if r.denom().is_one() {
            write!(f, "{}", r.numer())
        } else {
            write!(f, "{}/{}", r.numer(), r.denom())
        }
    }
}

/// Factorizes the positive rational `numerator / denominator`.
pub fn factorize(numerator: u64, denominator: u64) -> Result<PrimeExponentVector> {
    if numerator == 0 || denominator == 0 {
        bail!(
            Domain,
            "factorize needs positive numerator and denominator, got {numerator}/{denominator}"
        );
    }
    PrimeExponentVector::from_rational(&BigRational::new(
        BigInt::from(numerator),
        BigInt::from(denominator),
    ))
}

/// Positive real `rational * prod(symbol^e)`.
///
/// Equality and ordering ignore `hints`; hints only serve numeric display.
#[derive(Clone, Debug, Default)]
pub struct PositiveReal {
    rational: PrimeExponentVector,
    symbols: BTreeMap<String, i64>,
    hints: BTreeMap<String, f64>,
}

impl PartialEq for PositiveReal {
    fn eq(&self, other: &Self) -> bool {
        self.rational == other.rational && self.symbols == other.symbols
    }
}

impl Eq for PositiveReal {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineMode {
    Multiply,
    Divide,
}

impl PositiveReal {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn symbol(name: &str) -> Self {
        Self::symbol_power(name, 1)
    }

    pub fn symbol_power(name: &str, e: i64) -> Self {
        let mut out = Self::one();
        out.add_symbol(name, e);
        out
    }

    pub fn from_parts<I: IntoIterator<Item = (String, i64)>>(
        rational: PrimeExponentVector,
        symbols: I,
    ) -> Self {
        let mut out = Self::from(rational);
        for (name, e) in symbols {
            out.add_symbol(&name, e);
        }
        out
    }

    /// Attaches a positive floating approximation for a symbol.
    pub fn with_hint(mut self, name: &str, value: f64) -> Self {
        if value > 0.0 {
            self.hints.insert(name.to_string(), value);
        }
        self
    }

    fn add_symbol(&mut self, name: &str, e: i64) {
        if e == 0 {
            return;
        }
        let slot = self.symbols.entry(name.to_string()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.symbols.remove(name);
        }
    }

    pub fn rational_part(&self) -> &PrimeExponentVector {
        &self.rational
    }

    pub fn symbolic_part(&self) -> &BTreeMap<String, i64> {
        &self.symbols
    }

    pub fn hints(&self) -> &BTreeMap<String, f64> {
        &self.hints
    }

    pub fn is_rational(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.rational.is_one() && self.symbols.is_empty()
    }

    pub fn combine(&self, other: &Self, mode: CombineMode) -> Self {
        let sign = match mode {
            CombineMode::Multiply => 1,
            CombineMode::Divide => -1,
        };
        let mut out = Self {
            rational: match mode {
                CombineMode::Multiply => self.rational.mul(&other.rational),
                CombineMode::Divide => self.rational.div(&other.rational),
            },
            symbols: self.symbols.clone(),
            hints: self.hints.clone(),
        };
        for (name, e) in &other.symbols {
            out.add_symbol(name, sign * e);
        }
        for (name, v) in &other.hints {
            out.hints.entry(name.clone()).or_insert(*v);
        }
        out.hints.retain(|name, _| out.symbols.contains_key(name));
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, CombineMode::Multiply)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.combine(other, CombineMode::Divide)
    }

    pub fn inverse(&self) -> Self {
        Self::one().div(self)
    }

    pub fn pow(&self, k: i64) -> Self {
        let mut out = Self {
            rational: self.rational.pow(k),
            symbols: BTreeMap::new(),
            hints: self.hints.clone(),
        };
        for (name, e) in &self.symbols {
            out.add_symbol(name, e * k);
        }
        out.hints.retain(|name, _| out.symbols.contains_key(name));
        out
    }

    /// The exact value when rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.rational.to_rational())
    }

    /// Floating approximation, available when every symbol carries a hint.
    pub fn approximate(&self) -> Option<f64> {
        let r = self.rational.to_rational();
        let mut value = ratio_to_f64(&r);
        for (name, e) in &self.symbols {
            let h = *self.hints.get(name)?;
            value *= powi(h, *e);
        }
        Some(value)
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn powi(base: f64, e: i64) -> f64 {
    let mut acc = 1.0;
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        1.0 / acc
    } else {
        acc
    }
}

impl From<PrimeExponentVector> for PositiveReal {
    fn from(rational: PrimeExponentVector) -> Self {
        Self {
            rational,
            ..Self::default()
        }
    }
}

impl fmt::Display for PositiveReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.rational.is_one() || self.symbols.is_empty() {
            parts.push(self.rational.to_string());
        }
        for (name, e) in &self.symbols {
            if *e == 1 {
                parts.push(name.clone());
            } else {
                parts.push(alloc::format!("{name}^{e}"));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Group law of the positive reals on normalized forms.
pub fn scalar_combine(a: &PositiveReal, b: &PositiveReal, mode: CombineMode) -> PositiveReal {
    a.combine(b, mode)
}

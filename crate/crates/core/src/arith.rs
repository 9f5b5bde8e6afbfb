//! Integer helpers: primality, factorization and p-adic valuations.

use alloc::vec::Vec;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{bail, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Returns `(p, f)` with `q = p^f`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let factors = factor_u64(q);
    match factors.as_slice() {
        [(p, f)] => Some((*p, *f)),
        _ => None,
    }
}

fn pollard_brent(n: u64, seed: u64) -> u64 {
    let f = |x: u64| (mul_mod(x, x, n) + seed) % n;
    let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
    let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    g
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let mut seed = 1;
    loop {
        let d = pollard_brent(n, seed);
        if d != n && d != 1 {
            split_into(d, out);
            split_into(n / d, out);
            return;
        }
        seed += 1;
    }
}

/// Prime factorization as ascending `(prime, exponent)` pairs. `factor_u64(1)` is empty.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor_u64(0)");
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
    }
    split_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

const TRIAL_BOUND: u64 = 1 << 20;

/// Factorization of an arbitrary positive integer. Cofactors that remain above
/// `u64` after trial division are refused rather than searched for.
pub fn factor_biguint(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        bail!(Domain, "cannot factor zero");
    }
    if let Some(small) = n.to_u64() {
        return Ok(factor_u64(small));
    }
    let mut rest = n.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p < TRIAL_BOUND {
        let bp = BigUint::from(p);
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        if let Some(small) = rest.to_u64() {
            for (q, f) in factor_u64(small) {
                match out.iter_mut().find(|(r, _)| *r == q) {
                    Some((_, g)) => *g += f,
                    None => out.push((q, f)),
                }
            }
            out.sort_unstable();
            return Ok(out);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    bail!(
        Unsupported,
        "integer {n} has a cofactor beyond 64 bits after trial division"
    )
}

/// `v_p(n)` for a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let bp = BigInt::from(p);
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(&bp);
        if !r.is_zero() {
            return e;
        }
        rest = q;
        e += 1;
    }
}

/// `v_p(r)` for a nonzero rational.
pub fn rational_valuation(r: &BigRational, p: u64) -> i64 {
    valuation(r.numer(), p) as i64 - valuation(r.denom(), p) as i64
}

/// Whether the denominator of `r` is coprime to `n`.
pub fn integral_mod(r: &BigRational, n: u64) -> bool {
    let g = r.denom().gcd(&BigInt::from(n));
    g.is_one()
}

/// Reduces a rational with denominator coprime to `n` into `0..n`.
pub fn reduce_mod(r: &BigRational, n: u64) -> Option<u64> {
    if !integral_mod(r, n) {
        return None;
    }
    let m = BigInt::from(n);
    let num = r.numer().mod_floor(&m);
    let den = r.denom().mod_floor(&m);
    let inv = mod_inverse(den.to_u64()?, n)?;
    let num = num.to_u64()?;
    Some(mul_mod(num, inv, n))
}

pub fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(n as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(n as i128) as u64)
}

pub fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    match base.checked_pow(exp) {
        Some(v) => Ok(v),
        None => bail!(Unsupported, "{base}^{exp} overflows 64 bits"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_trial_division() {
        let naive = |n: u64| {
            n >= 2
                && (2..n)
                    .take_while(|d| d * d <= n)
                    .all(|d| !n.is_multiple_of(d))
        };
        for n in 0..5000 {
            assert_eq!(is_prime(n), naive(n), "n = {n}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(3u64.pow(20)), Some((3, 20)));
    }

    #[test]
    fn factors_reassemble() {
        for n in 1..3000u64 {
            let back: u64 = factor_u64(n).iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(back, n);
        }
        let big = 1_000_000_007u64 * 998_244_353;
        assert_eq!(factor_u64(big), [(998_244_353, 1), (1_000_000_007, 1)]);
    }

    #[test]
    fn big_factorization() {
        let n = BigUint::from(2u32).pow(100) * BigUint::from(15u32);
        assert_eq!(factor_biguint(&n).unwrap(), [(2, 100), (3, 1), (5, 1)]);
    }

    #[test]
    fn modular_reduction() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(5));
        assert_eq!(reduce_mod(&r, 12), Some(5));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(reduce_mod(&half, 12), None);
        assert_eq!(mod_inverse(5, 12), Some(5));
        assert_eq!(mod_inverse(4, 12), None);
    }
}

//! Square matrices over rational Laurent polynomials in named symbols.
//!
//! Real-line blocks may carry symbolic entries; every other block is constant.
//! Determinants of constant matrices go through exact Gaussian elimination,
//! symbolic ones through the Leibniz expansion (guarded by size).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{bail, Result};
use crate::scalar::{PositiveReal, PrimeExponentVector};

pub type Monomial = BTreeMap<String, i64>;

/// Finite sum of `coefficient * monomial`; zero coefficients never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    terms: BTreeMap<Monomial, BigRational>,
}

fn monomial_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (k, e) in b {
        let slot = out.entry(k.clone()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            out.remove(k);
        }
    }
    out
}

impl Scalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(Monomial::new(), r);
        }
        Self { terms }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `coefficient * name^power`.
    pub fn symbol_term(coefficient: BigRational, name: &str, power: i64) -> Self {
        let mut m = Monomial::new();
        if power != 0 {
            m.insert(name.to_string(), power);
        }
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(m, coefficient);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// The value when no symbol occurs.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// `(coefficient, monomial)` when the scalar is a single nonzero term.
    pub fn as_monomial(&self) -> Option<(&BigRational, &Monomial)> {
        match self.terms.len() {
            1 => self.terms.iter().next().map(|(m, c)| (c, m)),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> + '_ {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let slot = out.terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *slot += c;
            if slot.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let term = Self {
                    terms: [(monomial_mul(ma, mb), ca * cb)].into_iter().collect(),
                };
                out = out.add(&term);
            }
        }
        out
    }

    /// Multiplicative inverse; defined for single nonzero terms only.
    pub fn inverse(&self) -> Result<Self> {
        let Some((c, m)) = self.as_monomial() else {
            bail!(
                Unsupported,
                "{self} is not invertible as a Laurent monomial"
            );
        };
        let inv_m: Monomial = m.iter().map(|(k, e)| (k.clone(), -e)).collect();
        Ok(Self {
            terms: [(inv_m, c.recip())].into_iter().collect(),
        })
    }

    /// `|self|` as a positive real, for a single nonzero term.
    pub fn abs_positive(&self) -> Result<PositiveReal> {
        let Some((c, m)) = self.as_monomial() else {
            bail!(
                Unsupported,
                "{self} is not a single monomial, its absolute value is not a scaling factor"
            );
        };
        Ok(PositiveReal::from_parts(
            PrimeExponentVector::from_rational(&c.abs())?,
            m.iter().map(|(k, e)| (k.clone(), *e)),
        ))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let coeff = if c.denom().is_one() {
                c.numer().to_string()
            } else {
                alloc::format!("{}/{}", c.numer(), c.denom())
            };
            if m.is_empty() {
                f.write_str(&coeff)?;
                continue;
            }
            if !c.is_one() {
                write!(f, "{coeff}*")?;
            }
            for (j, (name, e)) in m.iter().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                if *e == 1 {
                    f.write_str(name)?;
                } else {
                    write!(f, "{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matrix {
    rows: Vec<Vec<Scalar>>,
}

/// Symbolic matrices larger than this are refused by the Leibniz expansion.
pub const LEIBNIZ_LIMIT: usize = 7;

impl Matrix {
    pub fn new(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            bail!(Type, "matrix is not square");
        }
        Ok(Self { rows })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|v| Scalar::integer(*v)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, &Scalar::one())
    }

    pub fn scalar(n: usize, s: &Scalar) -> Self {
        let mut rows = vec![vec![Scalar::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = s.clone();
        }
        Self { rows }
    }

    /// Matrix sending basis vector `i` to basis vector `sigma[i]`.
    pub fn permutation(sigma: &[usize]) -> Self {
        let n = sigma.len();
        let mut rows = vec![vec![Scalar::zero(); n]; n];
        for (i, j) in sigma.iter().enumerate() {
            rows[*j][i] = Scalar::one();
        }
        Self { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> + '_ {
        self.rows.iter().flatten()
    }

    pub fn is_constant(&self) -> bool {
        self.entries().all(|e| e.as_constant().is_some())
    }

    pub fn constant_entries(&self) -> Option<Vec<Vec<BigRational>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(Scalar::as_constant).collect())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let n = self.dim();
        if other.dim() != n {
            bail!(Type, "cannot multiply {n}x{n} by {0}x{0}", other.dim());
        }
        let mut rows = vec![vec![Scalar::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = Scalar::zero();
                for k in 0..n {
                    acc = acc.add(&self.rows[i][k].mul(&other.rows[k][j]));
                }
                *cell = acc;
            }
        }
        Ok(Self { rows })
    }

    pub fn determinant(&self) -> Result<Scalar> {
        if let Some(c) = self.constant_entries() {
            return Ok(Scalar::rational(rational_determinant(c)));
        }
        leibniz_determinant(&self.rows)
    }

    /// Inverse via Gauss-Jordan (constant case) or adjugate over a monomial determinant.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim();
        if let Some(c) = self.constant_entries() {
            let Some(inv) = rational_inverse(c) else {
                bail!(Domain, "matrix is singular");
            };
            return Ok(Self {
                rows: inv
                    .into_iter()
                    .map(|r| r.into_iter().map(Scalar::rational).collect())
                    .collect(),
            });
        }
        let det_inv = self.determinant()?.inverse()?;
        let mut rows = vec![vec![Scalar::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                // adj[i][j] = (-1)^{i+j} * minor(j, i)
                let minor: Vec<Vec<Scalar>> = (0..n)
                    .filter(|r| *r != j)
                    .map(|r| {
                        (0..n)
                            .filter(|c| *c != i)
                            .map(|c| self.rows[r][c].clone())
                            .collect()
                    })
                    .collect();
                let mut cof = leibniz_determinant(&minor)?;
                if (i + j) % 2 == 1 {
                    cof = cof.neg();
                }
                *cell = cof.mul(&det_inv);
            }
        }
        Ok(Self { rows })
    }
}

fn leibniz_determinant(rows: &[Vec<Scalar>]) -> Result<Scalar> {
    let n = rows.len();
    if n == 0 {
        return Ok(Scalar::one());
    }
    if n > LEIBNIZ_LIMIT {
        bail!(
            Guard,
            "symbolic determinant of size {n} exceeds {LEIBNIZ_LIMIT}"
        );
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut acc = Scalar::zero();
    permute(&mut perm, 0, &mut |p| {
        let mut term = Scalar::one();
        for (i, j) in p.iter().enumerate() {
            term = term.mul(&rows[i][*j]);
            if term.is_zero() {
                return;
            }
        }
        if permutation_sign(p) < 0 {
            term = term.neg();
        }
        acc = acc.add(&term);
    });
    Ok(acc)
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

pub fn permutation_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

pub fn rational_determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &p;
            let (top, bottom) = m.split_at_mut(r);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= &factor * y;
            }
        }
    }
    det
}

pub fn rational_inverse(mut m: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|r| !m[*r][col].is_zero())?;
        m.swap(pivot, col);
        inv.swap(pivot, col);
        let p = m[col][col].clone();
        for c in 0..n {
            m[col][c] = &m[col][c] / &p;
            inv[col][c] = &inv[col][c] / &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in 0..n {
                let dm = &factor * &m[col][c];
                m[r][c] -= dm;
                let di = &factor * &inv[col][c];
                inv[r][c] -= di;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(name: &str) -> Scalar {
        Scalar::symbol_term(BigRational::one(), name, 1)
    }

    #[test]
    fn products() {
        let a = Matrix::from_integers(&[&[1, 1], &[0, 1]]).unwrap();
        let b = Matrix::from_integers(&[&[1, 0], &[1, 1]]).unwrap();
        assert_eq!(
            a.mul(&b).unwrap(),
            Matrix::from_integers(&[&[2, 1], &[1, 1]]).unwrap()
        );
    }

    #[test]
    fn determinants_agree_between_routes() {
        let rows: Vec<Vec<Scalar>> = [[2, -1, 3], [0, 4, 5], [7, 1, -2]]
            .iter()
            .map(|r| r.iter().map(|v| Scalar::integer(*v)).collect())
            .collect();
        let via_gauss = Matrix::new(rows.clone()).unwrap().determinant().unwrap();
        let via_leibniz = leibniz_determinant(&rows).unwrap();
        assert_eq!(via_gauss, via_leibniz);
        assert_eq!(
            via_gauss,
            Scalar::integer(2 * (-8 - 5) + (0 - 35) + 3 * (0 - 28))
        );
    }

    #[test]
    fn symbolic_determinant_and_inverse() {
        let c = sym("c");
        let m = Matrix::new(vec![
            vec![c.clone(), Scalar::integer(3)],
            vec![Scalar::zero(), Scalar::integer(2)],
        ])
        .unwrap();
        let det = m.determinant().unwrap();
        assert_eq!(det, c.mul(&Scalar::integer(2)));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(det.abs_positive().unwrap().to_string(), "2*c");
    }

    #[test]
    fn non_monomial_determinant_is_refused() {
        let m = Matrix::new(vec![
            vec![sym("a"), Scalar::one()],
            vec![Scalar::one(), sym("b")],
        ])
        .unwrap();
        let det = m.determinant().unwrap();
        assert!(det.as_monomial().is_none());
        assert!(det.abs_positive().is_err());
    }

    #[test]
    fn constant_inverse_round_trip() {
        let m = Matrix::from_integers(&[&[2, 1, 0], &[1, 1, 0], &[0, 0, 3]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(inv.mul(&m).unwrap(), Matrix::identity(3));
        assert!(Matrix::from_integers(&[&[1, 2], &[2, 4]])
            .unwrap()
            .inverse()
            .is_err());
    }

    #[test]
    fn permutation_matrices() {
        let p = Matrix::permutation(&[1, 2, 0]);
        assert_eq!(p.determinant().unwrap(), Scalar::one());
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(
            Matrix::permutation(&[1, 2, 0])
                .mul(&Matrix::permutation(&[1, 2, 0]))
                .unwrap(),
            Matrix::permutation(&[2, 0, 1])
        );
    }

    #[test]
    fn display() {
        let s =
            Scalar::symbol_term(BigRational::new(3.into(), 2.into()), "c", 2).add(&Scalar::one());
        assert_eq!(s.to_string(), "1 + 3/2*c^2");
    }
}

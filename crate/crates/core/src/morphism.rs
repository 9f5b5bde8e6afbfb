//! Block-structured endomorphisms, invertibility checks and the module of an automorphism.
//!
//! A morphism acts on each distinct atom `A` of its group (all `k` copies of
//! `A` at once) by one payload. Cross-kind components are never free-standing
//! morphisms; they only occur inside catalog exact sequences.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{integral_mod, rational_valuation, reduce_mod};
use crate::error::{bail, Error, Result};
use crate::lca::{Atom, GroupExpr};
use crate::linalg::{Matrix, Scalar};
use crate::scalar::{PositiveReal, PrimeExponentVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    /// Multiplication by a scalar on every copy. Symbolic scalars only on real lines.
    Scale(Scalar),
    /// Multiplication by some element of the given valuation (local fields only).
    /// Haar measure sees nothing of such an element beyond its valuation.
    Valuation(i64),
    Matrix(Matrix),
    /// Copy `i` goes to copy `sigma[i]`.
    Permutation(Vec<usize>),
    Identity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub atom: Atom,
    pub payload: Payload,
}

impl Block {
    pub fn new(atom: Atom, payload: Payload) -> Self {
        Self { atom, payload }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    source: GroupExpr,
    target: GroupExpr,
    blocks: Vec<Block>,
}

/// First failed invertibility condition of a morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub block: usize,
    pub atom: Atom,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "block {} ({}): {}", self.block, self.atom, self.reason)
    }
}

fn check_structure(atom: &Atom, k: u32, payload: &Payload) -> Result<()> {
    match payload {
        Payload::Scale(s) => {
            if s.as_monomial().is_none() {
                bail!(Domain, "scalar {s} on {atom} must be a single nonzero term");
            }
        }
        Payload::Matrix(m) => {
            if m.dim() != k as usize {
                bail!(Type, "{0}x{0} matrix on {atom}^{k}", m.dim());
            }
        }
        Payload::Permutation(sigma) => {
            let mut seen = alloc::vec![false; k as usize];
            if sigma.len() != k as usize {
                bail!(Type, "permutation of {} copies on {atom}^{k}", sigma.len());
            }
            for &i in sigma {
                if i >= seen.len() || seen[i] {
                    bail!(Domain, "{sigma:?} is not a permutation");
                }
                seen[i] = true;
            }
        }
        Payload::Valuation(_) | Payload::Identity => {}
    }
    Ok(())
}

impl Morphism {
    /// Builds a morphism from blocks. Atoms without a block act by the identity.
    pub fn new(source: GroupExpr, target: GroupExpr, blocks: Vec<Block>) -> Result<Self> {
        if source != target {
            bail!(
                Type,
                "block morphisms need matching atoms, got {source} -> {target}"
            );
        }
        let mut filled: Vec<Block> = Vec::with_capacity(source.atoms().len());
        for (atom, k) in source.atoms() {
            let mut found = blocks.iter().filter(|b| &b.atom == atom);
            let block = match (found.next(), found.next()) {
                (Some(_), Some(_)) => bail!(Type, "two blocks for {atom}"),
                (Some(b), None) => b.clone(),
                (None, _) => Block::new(atom.clone(), Payload::Identity),
            };
            check_structure(atom, *k, &block.payload)?;
            filled.push(block);
        }
        if let Some(stray) = blocks.iter().find(|b| source.multiplicity(&b.atom) == 0) {
            bail!(
                Type,
                "block for {} which does not occur in {source}",
                stray.atom
            );
        }
        Ok(Self {
            source,
            target,
            blocks: filled,
        })
    }

    pub fn endo(expr: &GroupExpr, blocks: Vec<Block>) -> Result<Self> {
        Self::new(expr.clone(), expr.clone(), blocks)
    }

    pub fn identity(expr: &GroupExpr) -> Self {
        Self::endo(expr, Vec::new()).expect("identity is well formed")
    }

    /// Multiplication by `s` on every atom.
    pub fn scalar(expr: &GroupExpr, s: Scalar) -> Result<Self> {
        let blocks = expr
            .atoms()
            .iter()
            .map(|(a, _)| Block::new(a.clone(), Payload::Scale(s.clone())))
            .collect();
        Self::endo(expr, blocks)
    }

    /// Multiplication by an element of valuation `v` on every local-field atom.
    pub fn valuation(expr: &GroupExpr, v: i64) -> Result<Self> {
        let blocks = expr
            .atoms()
            .iter()
            .filter(|(a, _)| matches!(a, Atom::LocalField(_)))
            .map(|(a, _)| Block::new(a.clone(), Payload::Valuation(v)))
            .collect();
        Self::endo(expr, blocks)
    }

    pub fn source(&self) -> &GroupExpr {
        &self.source
    }

    pub fn target(&self) -> &GroupExpr {
        &self.target
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Checks that every block is invertible in its atom's automorphism group.
    pub fn validate_automorphism(&self) -> core::result::Result<(), Violation> {
        for (i, (block, (_, k))) in self.blocks.iter().zip(self.source.atoms()).enumerate() {
            check_block(&block.atom, *k, &block.payload).map_err(|reason| Violation {
                block: i,
                atom: block.atom.clone(),
                reason,
            })?;
        }
        Ok(())
    }

    pub fn is_automorphism(&self) -> bool {
        self.validate_automorphism().is_ok()
    }

    fn require_automorphism(&self) -> Result<()> {
        self.validate_automorphism()
            .map_err(|v| Error::Domain(alloc::format!("not an automorphism: {v}")))
    }

    /// Forward volume ratio `mu(f(S)) / mu(S)`: the factor by which the
    /// automorphism acts on the Haar torsor.
    pub fn module(&self) -> Result<PositiveReal> {
        self.require_automorphism()?;
        let mut out = PositiveReal::one();
        for (block, (_, k)) in self.blocks.iter().zip(self.source.atoms()) {
            out = out.mul(&block_module(&block.atom, *k, &block.payload)?);
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.require_automorphism()?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let payload = match &b.payload {
                    Payload::Identity => Payload::Identity,
                    Payload::Scale(s) => Payload::Scale(s.inverse()?),
                    Payload::Valuation(v) => Payload::Valuation(-v),
                    Payload::Permutation(sigma) => {
                        let mut inv = alloc::vec![0; sigma.len()];
                        for (i, j) in sigma.iter().enumerate() {
                            inv[*j] = i;
                        }
                        Payload::Permutation(inv)
                    }
                    Payload::Matrix(m) => Payload::Matrix(m.inverse()?),
                };
                Ok(Block::new(b.atom.clone(), payload))
            })
            .collect::<Result<_>>()?;
        Self::new(self.target.clone(), self.source.clone(), blocks)
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for b in &self.blocks {
            if b.payload == Payload::Identity {
                continue;
            }
            if !first {
                f.write_str("; ")?;
            }
            first = false;
            write!(f, "{}: ", b.atom)?;
            match &b.payload {
                Payload::Scale(s) => write!(f, "mul({s})")?,
                Payload::Valuation(v) => write!(f, "val({v})")?,
                Payload::Permutation(p) => write!(f, "perm{p:?}")?,
                Payload::Matrix(m) => {
                    f.write_str("[")?;
                    for (i, row) in m.rows().iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        f.write_str("[")?;
                        for (j, e) in row.iter().enumerate() {
                            if j > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{e}")?;
                        }
                        f.write_str("]")?;
                    }
                    f.write_str("]")?;
                }
                Payload::Identity => unreachable!(),
            }
        }
        if first {
            f.write_str("id")?;
        }
        Ok(())
    }
}

fn is_unit_integer(r: &BigRational) -> bool {
    r.is_integer() && r.numer().abs().is_one()
}

fn residue_prime(atom: &Atom) -> (u64, u32) {
    atom.residue().expect("validated residue atom")
}

fn check_block(atom: &Atom, k: u32, payload: &Payload) -> core::result::Result<(), String> {
    use alloc::format;
    match payload {
        Payload::Identity | Payload::Permutation(_) => Ok(()),
        Payload::Valuation(_) => match atom {
            Atom::LocalField(_) => Ok(()),
            _ => Err(format!(
                "valuation scalars only act on local fields, not {atom}"
            )),
        },
        Payload::Scale(s) => {
            if *atom == Atom::RealLine {
                return Ok(());
            }
            let Some(alpha) = s.as_constant() else {
                return Err(format!("symbolic scalar {s} only acts on real lines"));
            };
            check_scalar(atom, &alpha)
        }
        Payload::Matrix(m) => {
            let det = m.determinant().map_err(|e| format!("{e}"))?;
            if det.is_zero() {
                return Err(String::from("singular matrix"));
            }
            if *atom == Atom::RealLine {
                return match det.as_monomial() {
                    Some(_) => Ok(()),
                    None => Err(format!(
                        "determinant {det} is not a monomial in the symbols"
                    )),
                };
            }
            let Some(entries) = m.constant_entries() else {
                return Err(format!(
                    "symbolic matrix entries only act on real lines, not {atom}"
                ));
            };
            let det = det.as_constant().expect("constant matrix");
            let _ = k;
            match atom {
                Atom::LocalField(q) => match residue_prime(atom) {
                    (_, 1) => Ok(()),
                    _ => Err(format!(
                        "matrices over K({q}) are not supported, use val(k)"
                    )),
                },
                Atom::IntegerRing(q) | Atom::Prufer(q) => {
                    let (p, f) = residue_prime(atom);
                    if f != 1 {
                        return Err(format!(
                            "matrices over residue cardinality {q} are not supported"
                        ));
                    }
                    if let Some(e) = entries.iter().flatten().find(|e| !integral_mod(e, p)) {
                        return Err(format!("entry {e} is not {p}-integral"));
                    }
                    if rational_valuation(&det, p) != 0 {
                        return Err(format!("determinant {det} is not a {p}-adic unit"));
                    }
                    Ok(())
                }
                Atom::Integers | Atom::Circle => {
                    if let Some(e) = entries.iter().flatten().find(|e| !e.is_integer()) {
                        return Err(format!("entry {e} is not an integer"));
                    }
                    if !is_unit_integer(&det) {
                        return Err(format!("determinant {det} is not +-1"));
                    }
                    Ok(())
                }
                Atom::Cyclic(n) => {
                    if let Some(e) = entries.iter().flatten().find(|e| !integral_mod(e, *n)) {
                        return Err(format!("entry {e} is not integral mod {n}"));
                    }
                    let d = reduce_mod(&det, *n).expect("integral entries");
                    if num_integer::gcd(d, *n) != 1 {
                        return Err(format!("determinant {det} is not a unit mod {n}"));
                    }
                    Ok(())
                }
                Atom::Blackbox(_) => Err(format!(
                    "matrices on the opaque group {atom} are not supported"
                )),
                Atom::RealLine => unreachable!(),
            }
        }
    }
}

fn check_scalar(atom: &Atom, alpha: &BigRational) -> core::result::Result<(), String> {
    use alloc::format;
    if alpha.is_zero() {
        return Err(String::from("multiplication by zero"));
    }
    match atom {
        Atom::RealLine => Ok(()),
        Atom::LocalField(_) => {
            let (p, f) = residue_prime(atom);
            if f == 1 || rational_valuation(alpha, p) == 0 {
                Ok(())
            } else {
                Err(format!(
                    "{alpha} is not a unit of F_{p} inside {atom}; use val(k)"
                ))
            }
        }
        Atom::IntegerRing(_) | Atom::Prufer(_) => {
            let (p, _) = residue_prime(atom);
            if rational_valuation(alpha, p) == 0 {
                Ok(())
            } else {
                Err(format!("{alpha} is not a {p}-adic unit"))
            }
        }
        Atom::Integers | Atom::Circle | Atom::Blackbox(_) => {
            if is_unit_integer(alpha) {
                Ok(())
            } else {
                Err(format!("{alpha} is not a unit of Z"))
            }
        }
        Atom::Cyclic(n) => match reduce_mod(alpha, *n) {
            None => Err(format!("{alpha} is not integral mod {n}")),
            Some(u) if num_integer::gcd(u, *n) == 1 => Ok(()),
            Some(u) => Err(format!("gcd({u}, {n}) != 1")),
        },
    }
}

fn block_module(atom: &Atom, k: u32, payload: &Payload) -> Result<PositiveReal> {
    let k = k as i64;
    match atom {
        Atom::RealLine => match payload {
            Payload::Scale(s) => Ok(s.abs_positive()?.pow(k)),
            Payload::Matrix(m) => m.determinant()?.abs_positive(),
            _ => Ok(PositiveReal::one()),
        },
        Atom::LocalField(_) => {
            let (p, f) = residue_prime(atom);
            let v = match payload {
                Payload::Scale(s) => {
                    let alpha = s.as_constant().expect("validated");
                    rational_valuation(&alpha, p) * k
                }
                Payload::Matrix(m) => {
                    let det = m.determinant()?.as_constant().expect("validated");
                    rational_valuation(&det, p)
                }
                Payload::Valuation(v) => v * k,
                _ => 0,
            };
            Ok(PrimeExponentVector::prime_power(p, -v * f as i64).into())
        }
        _ => Ok(PositiveReal::one()),
    }
}

/// Blockwise composition `g . f`.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if f.target != g.source {
        bail!(
            Type,
            "cannot compose: {} -> {} after {} -> {}",
            g.source,
            g.target,
            f.source,
            f.target
        );
    }
    let blocks = g
        .blocks
        .iter()
        .zip(&f.blocks)
        .zip(g.source.atoms())
        .map(|((gb, fb), (atom, k))| {
            Ok(Block::new(
                atom.clone(),
                compose_payload(atom, *k, &gb.payload, &fb.payload)?,
            ))
        })
        .collect::<Result<_>>()?;
    Morphism::new(f.source.clone(), g.target.clone(), blocks)
}

fn to_matrix(payload: &Payload, k: u32) -> Result<Matrix> {
    let k = k as usize;
    Ok(match payload {
        Payload::Identity => Matrix::identity(k),
        Payload::Scale(s) => Matrix::scalar(k, s),
        Payload::Permutation(sigma) => Matrix::permutation(sigma),
        Payload::Matrix(m) => m.clone(),
        Payload::Valuation(_) => bail!(
            Unsupported,
            "valuation scalars do not compose with matrices"
        ),
    })
}

fn compose_payload(atom: &Atom, k: u32, g: &Payload, f: &Payload) -> Result<Payload> {
    Ok(match (g, f) {
        (Payload::Identity, x) | (x, Payload::Identity) => x.clone(),
        (Payload::Scale(s), x) | (x, Payload::Scale(s)) if s.is_one() => x.clone(),
        (Payload::Scale(a), Payload::Scale(b)) => Payload::Scale(a.mul(b)),
        (Payload::Valuation(a), Payload::Valuation(b)) => Payload::Valuation(a + b),
        (Payload::Valuation(v), Payload::Scale(s)) | (Payload::Scale(s), Payload::Valuation(v)) => {
            let Some(alpha) = s.as_constant() else {
                bail!(Type, "symbolic scalar on {atom}");
            };
            let Some((p, f)) = atom.residue() else {
                bail!(Type, "valuation scalar on {atom}");
            };
            let w = rational_valuation(&alpha, p);
            if f != 1 && w != 0 {
                bail!(Domain, "{alpha} does not act invertibly on {atom}");
            }
            Payload::Valuation(v + w)
        }
        (Payload::Permutation(a), Payload::Permutation(b)) => {
            Payload::Permutation(b.iter().map(|i| a[*i]).collect())
        }
        _ => Payload::Matrix(to_matrix(g, k)?.mul(&to_matrix(f, k)?)?),
    })
}

/// The module of an automorphism; see [`Morphism::module`].
pub fn mod_of(f: &Morphism) -> Result<PositiveReal> {
    f.module()
}

/// Convenience: a rational scalar `num/den`.
pub fn rational_scalar(num: i64, den: i64) -> Scalar {
    Scalar::rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Reduces a constant scalar modulo `n`, when integral there.
pub fn scalar_mod(s: &Scalar, n: u64) -> Option<u64> {
    reduce_mod(&s.as_constant()?, n)
}

/// Integer value of a constant integral scalar.
pub fn scalar_integer(s: &Scalar) -> Option<i64> {
    let c = s.as_constant()?;
    c.is_integer()
        .then(|| c.numer().mod_floor(&BigInt::from(i64::MAX)).to_i64())?
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lca::sum_of;
    use crate::scalar::factorize;
    use alloc::vec;

    fn e(atoms: &[(Atom, u32)]) -> GroupExpr {
        GroupExpr::new(atoms.iter().cloned()).unwrap()
    }

    fn int(n: i64) -> Scalar {
        Scalar::integer(n)
    }

    #[test]
    fn compose_examples() {
        let q7 = e(&[(Atom::LocalField(7), 1)]);
        let m5 = Morphism::scalar(&q7, int(5)).unwrap();
        let m3 = Morphism::scalar(&q7, int(3)).unwrap();
        assert_eq!(
            compose(&m5, &m3).unwrap(),
            Morphism::scalar(&q7, int(15)).unwrap()
        );
        assert_eq!(compose(&m5, &Morphism::identity(&q7)).unwrap(), m5);

        let r2 = e(&[(Atom::RealLine, 2)]);
        let a = Morphism::endo(
            &r2,
            vec![Block::new(
                Atom::RealLine,
                Payload::Matrix(Matrix::from_integers(&[&[1, 1], &[0, 1]]).unwrap()),
            )],
        )
        .unwrap();
        let b = Morphism::endo(
            &r2,
            vec![Block::new(
                Atom::RealLine,
                Payload::Matrix(Matrix::from_integers(&[&[1, 0], &[1, 1]]).unwrap()),
            )],
        )
        .unwrap();
        let ab = compose(&a, &b).unwrap();
        assert_eq!(
            ab.blocks()[0].payload,
            Payload::Matrix(Matrix::from_integers(&[&[2, 1], &[1, 1]]).unwrap())
        );
    }

    #[test]
    fn compose_rejects_mismatch() {
        let a = Morphism::identity(&e(&[(Atom::Integers, 1)]));
        let b = Morphism::identity(&e(&[(Atom::Circle, 1)]));
        assert!(matches!(compose(&a, &b), Err(Error::Type(_))));
    }

    #[test]
    fn validate_examples() {
        let q5 = e(&[(Atom::LocalField(5), 1)]);
        assert!(Morphism::scalar(&q5, int(5))
            .unwrap()
            .validate_automorphism()
            .is_ok());

        let z = e(&[(Atom::Integers, 1)]);
        let v = Morphism::scalar(&z, int(2))
            .unwrap()
            .validate_automorphism()
            .unwrap_err();
        assert_eq!(v.block, 0);
        assert_eq!(v.atom, Atom::Integers);

        let z12 = e(&[(Atom::Cyclic(12), 1)]);
        assert!(Morphism::scalar(&z12, int(5)).unwrap().is_automorphism());
        assert!(!Morphism::scalar(&z12, int(4)).unwrap().is_automorphism());
        assert!(!Morphism::scalar(&e(&[(Atom::Circle, 1)]), int(3))
            .unwrap()
            .is_automorphism());
    }

    #[test]
    fn first_violation_is_reported() {
        let x = e(&[
            (Atom::LocalField(3), 1),
            (Atom::Integers, 1),
            (Atom::Circle, 1),
        ]);
        let v = Morphism::scalar(&x, int(3))
            .unwrap()
            .validate_automorphism()
            .unwrap_err();
        assert_eq!(v.block, 1);
    }

    #[test]
    fn module_of_multiplication_by_five() {
        for a in 0..=3u32 {
            for b in 0..=3u32 {
                for c in 0..=3u32 {
                    let x = e(&[
                        (Atom::LocalField(5), a),
                        (Atom::RealLine, b),
                        (Atom::LocalField(3), c),
                    ]);
                    let m = Morphism::scalar(&x, int(5)).unwrap().module().unwrap();
                    let expected: PositiveReal =
                        PrimeExponentVector::prime_power(5, b as i64 - a as i64).into();
                    assert_eq!(m, expected, "A={a} B={b} C={c}");
                }
            }
        }
    }

    #[test]
    fn module_examples() {
        let r2 = e(&[(Atom::RealLine, 2)]);
        let unip = Morphism::endo(
            &r2,
            vec![Block::new(
                Atom::RealLine,
                Payload::Matrix(Matrix::from_integers(&[&[1, 1], &[0, 1]]).unwrap()),
            )],
        )
        .unwrap();
        assert!(unip.module().unwrap().is_one());

        for n in [5u64, 12, 17] {
            let z = e(&[(Atom::Cyclic(n), 1)]);
            for u in 1..n as i64 {
                let f = Morphism::scalar(&z, int(u)).unwrap();
                if num_integer::gcd(u as u64, n) == 1 {
                    assert!(f.module().unwrap().is_one());
                } else {
                    assert!(f.module().is_err());
                }
            }
        }
    }

    #[test]
    fn symbolic_scalars_live_on_real_lines() {
        let c = Scalar::symbol_term(BigRational::one(), "c", 1);
        let r = e(&[(Atom::RealLine, 3)]);
        let m = Morphism::scalar(&r, c.clone()).unwrap().module().unwrap();
        assert_eq!(m, PositiveReal::symbol_power("c", 3));
        let q = e(&[(Atom::LocalField(5), 1)]);
        assert!(!Morphism::scalar(&q, c).unwrap().is_automorphism());
    }

    #[test]
    fn valuation_scalars() {
        let k4 = e(&[(Atom::LocalField(4), 2)]);
        let f = Morphism::valuation(&k4, 1).unwrap();
        assert_eq!(f.module().unwrap(), factorize(1, 16).unwrap().into());
        assert!(!Morphism::scalar(&k4, int(2)).unwrap().is_automorphism());
        assert!(Morphism::scalar(&k4, int(3))
            .unwrap()
            .module()
            .unwrap()
            .is_one());
        let z = e(&[(Atom::Integers, 1)]);
        let bad =
            Morphism::endo(&z, vec![Block::new(Atom::Integers, Payload::Valuation(1))]).unwrap();
        assert!(!bad.is_automorphism());
    }

    #[test]
    fn matrix_conditions() {
        let mat = |rows: &[&[i64]]| Payload::Matrix(Matrix::from_integers(rows).unwrap());
        let z2 = e(&[(Atom::Integers, 2)]);
        let ok = Morphism::endo(
            &z2,
            vec![Block::new(Atom::Integers, mat(&[&[2, 1], &[1, 1]]))],
        )
        .unwrap();
        assert!(ok.is_automorphism());
        let bad = Morphism::endo(
            &z2,
            vec![Block::new(Atom::Integers, mat(&[&[2, 0], &[0, 1]]))],
        )
        .unwrap();
        assert!(!bad.is_automorphism());

        let zp = e(&[(Atom::IntegerRing(3), 2)]);
        let ok = Morphism::endo(
            &zp,
            vec![Block::new(Atom::IntegerRing(3), mat(&[&[2, 0], &[0, 1]]))],
        )
        .unwrap();
        assert!(ok.is_automorphism());
        let bad = Morphism::endo(
            &zp,
            vec![Block::new(Atom::IntegerRing(3), mat(&[&[3, 0], &[0, 1]]))],
        )
        .unwrap();
        assert!(!bad.is_automorphism());

        let qp = e(&[(Atom::LocalField(3), 2)]);
        let f = Morphism::endo(
            &qp,
            vec![Block::new(Atom::LocalField(3), mat(&[&[9, 0], &[1, 2]]))],
        )
        .unwrap();
        assert_eq!(f.module().unwrap(), factorize(1, 9).unwrap().into());

        let z6 = e(&[(Atom::Cyclic(6), 2)]);
        let ok = Morphism::endo(
            &z6,
            vec![Block::new(Atom::Cyclic(6), mat(&[&[1, 2], &[0, 5]]))],
        )
        .unwrap();
        assert!(ok.is_automorphism());
        let bad = Morphism::endo(
            &z6,
            vec![Block::new(Atom::Cyclic(6), mat(&[&[1, 2], &[0, 3]]))],
        )
        .unwrap();
        assert!(!bad.is_automorphism());
    }

    #[test]
    fn structural_errors() {
        let x = e(&[(Atom::Integers, 2)]);
        assert!(Morphism::endo(
            &x,
            vec![Block::new(Atom::Integers, Payload::Permutation(vec![0, 0]))]
        )
        .is_err());
        assert!(Morphism::endo(&x, vec![Block::new(Atom::Circle, Payload::Identity)]).is_err());
        assert!(Morphism::endo(
            &x,
            vec![Block::new(Atom::Integers, Payload::Scale(Scalar::zero()))]
        )
        .is_err());
        assert!(Morphism::new(x.clone(), sum_of(&[Atom::Integers]).unwrap(), vec![]).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let x = e(&[
            (Atom::LocalField(5), 2),
            (Atom::Cyclic(12), 1),
            (Atom::RealLine, 2),
            (Atom::Integers, 2),
        ]);
        let c = Scalar::symbol_term(BigRational::one(), "c", 1);
        let f = Morphism::endo(
            &x,
            vec![
                Block::new(
                    Atom::LocalField(5),
                    Payload::Matrix(Matrix::from_integers(&[&[5, 1], &[0, 3]]).unwrap()),
                ),
                Block::new(Atom::Cyclic(12), Payload::Scale(int(7))),
                Block::new(
                    Atom::RealLine,
                    Payload::Matrix(
                        Matrix::new(vec![vec![c.clone(), int(1)], vec![int(0), int(2)]]).unwrap(),
                    ),
                ),
                Block::new(Atom::Integers, Payload::Permutation(vec![1, 0])),
            ],
        )
        .unwrap();
        let inv = f.inverse().unwrap();
        assert!(inv.is_automorphism());
        assert!(f.module().unwrap().mul(&inv.module().unwrap()).is_one());
        let id = compose(&inv, &f).unwrap();
        assert!(id.module().unwrap().is_one());
        for b in id.blocks() {
            match &b.payload {
                Payload::Identity => {}
                Payload::Scale(s) => assert!(scalar_mod(s, 12) == Some(1)),
                Payload::Matrix(m) => assert_eq!(m, &Matrix::identity(m.dim())),
                Payload::Permutation(p) => assert_eq!(p, &vec![0, 1]),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn opaque_permutations_compose() {
        let d = e(&[(Atom::Blackbox("V".into()), 2)]);
        let swap = Morphism::endo(
            &d,
            vec![Block::new(
                Atom::Blackbox("V".into()),
                Payload::Permutation(vec![1, 0]),
            )],
        )
        .unwrap();
        let one = Morphism::scalar(&d, int(1)).unwrap();
        for h in [compose(&one, &swap).unwrap(), compose(&swap, &one).unwrap()] {
            assert_eq!(h, swap);
        }
        assert!(compose(&swap, &swap).unwrap().module().unwrap().is_one());
    }
}

//! The catalog of short exact sequences and their Fubini defects.
//!
//! Each catalog sequence `sub -> total -> quot` carries a designated adapted
//! compact open: a choice `C` on `total` together with the choices describing
//! `C cap sub` and the image of `C` in `quot`. The defect compares the
//! canonical root measure of `total` with the glue of the canonical roots of
//! `sub` and `quot`:
//!
//! `d = vol(C) / (vol(C cap sub) * vol(image C))`.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{bail, Result};
use crate::lca::{
    canonical_volume, relative_quotient, relative_subgroup, Atom, ChoiceParam, CompactOpenChoice,
    GroupExpr,
};
use crate::morphism::Morphism;
use crate::scalar::PositiveReal;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    /// `C -> X -> X/C` for a compact open `C` of a vector-free `X`.
    CompactOpen {
        group: GroupExpr,
        choice: CompactOpenChoice,
    },
    /// `O -> K -> K/O` for the local field with residue cardinality `q`.
    Uniformizer(u64),
    /// `m^a -> m^b -> m^b/m^a` inside a ring of integers, `a >= b`.
    IdealFiltration { q: u64, a: u32, b: u32 },
    /// `Z --n--> Z -> Z/n`.
    MultNZ(u64),
    /// `Z/n -> T --n--> T`.
    MultNT(u64),
    /// `ker -> Prufer(q) --pi--> Prufer(q)`, multiplication by a uniformizer.
    MultUnifPrufer(u64),
    /// `Z -> R -> T`, the one catalog sequence with a real total group.
    IntegersInReals,
    /// `X' -> X' + X'' -> X''`.
    SumSplit(GroupExpr, GroupExpr),
    /// `0 -> G --f--> G'`.
    IsoLeft(Morphism),
    /// `G --f--> G' -> 0`.
    IsoRight(Morphism),
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceKind::CompactOpen { group, choice } => {
                write!(f, "compact-open({group}; {choice})")
            }
            SequenceKind::Uniformizer(q) => write!(f, "uniformizer({q})"),
            SequenceKind::IdealFiltration { q, a, b } => {
                write!(f, "ideal-filtration({q}, {a}, {b})")
            }
            SequenceKind::MultNZ(n) => write!(f, "mult-z({n})"),
            SequenceKind::MultNT(n) => write!(f, "mult-t({n})"),
            SequenceKind::MultUnifPrufer(q) => write!(f, "mult-prufer({q})"),
            SequenceKind::IntegersInReals => f.write_str("z-r-t"),
            SequenceKind::SumSplit(a, b) => write!(f, "sum({a}; {b})"),
            SequenceKind::IsoLeft(m) => write!(f, "iso-left({m})"),
            SequenceKind::IsoRight(m) => write!(f, "iso-right({m})"),
        }
    }
}

/// Compact opens realizing the Fubini bookkeeping of a sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adapted {
    pub total: CompactOpenChoice,
    pub sub: CompactOpenChoice,
    pub quot: CompactOpenChoice,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSequence {
    kind: SequenceKind,
    sub: GroupExpr,
    total: GroupExpr,
    quot: GroupExpr,
    adapted: Option<Adapted>,
}

fn single(atom: Atom) -> Result<GroupExpr> {
    GroupExpr::atom(atom)
}

fn compact_open(
    group: &GroupExpr,
    choice: &CompactOpenChoice,
) -> Result<(GroupExpr, GroupExpr, Adapted)> {
    let (sub, sub_choice) = relative_subgroup(group, choice, choice)?;
    let (quot, quot_choice) = relative_quotient(group, choice, choice)?;
    Ok((
        sub,
        quot,
        Adapted {
            total: choice.clone(),
            sub: sub_choice,
            quot: quot_choice,
        },
    ))
}

/// Number of elements of a finite group, `None` if it is infinite.
pub fn finite_order(expr: &GroupExpr) -> Option<BigUint> {
    let mut out = BigUint::one();
    for (atom, k) in expr.atoms() {
        match atom {
            Atom::Cyclic(n) => out *= BigUint::from(*n).pow(*k),
            _ => return None,
        }
    }
    Some(out)
}

impl ExactSequence {
    pub fn make(kind: SequenceKind) -> Result<Self> {
        let (sub, total, quot, adapted) = match &kind {
            SequenceKind::CompactOpen { group, choice } => {
                choice.validate(group)?;
                let (sub, quot, adapted) = compact_open(group, choice)?;
                (sub, group.clone(), quot, Some(adapted))
            }
            SequenceKind::Uniformizer(q) => {
                let total = single(Atom::LocalField(*q))?;
                let choice = CompactOpenChoice::canonical(&total)?;
                let (sub, quot, adapted) = compact_open(&total, &choice)?;
                (sub, total, quot, Some(adapted))
            }
            SequenceKind::IdealFiltration { q, a, b } => {
                if a < b {
                    bail!(Domain, "ideal filtration needs a >= b, got a={a} b={b}");
                }
                let total = single(Atom::IntegerRing(*q))?;
                let choice =
                    CompactOpenChoice::new(&total, alloc::vec![ChoiceParam::Depth(a - b)])?;
                let (sub, quot, adapted) = compact_open(&total, &choice)?;
                (sub, total, quot, Some(adapted))
            }
            SequenceKind::MultNZ(n) => {
                if *n == 0 {
                    bail!(Domain, "multiplication by 0 is not injective");
                }
                let z = single(Atom::Integers)?;
                let quot = GroupExpr::new([(Atom::Cyclic(*n), 1)])?;
                let adapted = Adapted {
                    total: CompactOpenChoice::zero(&z)?,
                    sub: CompactOpenChoice::zero(&z)?,
                    quot: CompactOpenChoice::zero(&quot)?,
                };
                (z.clone(), z, quot, Some(adapted))
            }
            SequenceKind::MultNT(n) => {
                if *n == 0 {
                    bail!(Domain, "multiplication by 0 is not surjective");
                }
                let t = single(Atom::Circle)?;
                let sub = GroupExpr::new([(Atom::Cyclic(*n), 1)])?;
                let adapted = Adapted {
                    total: CompactOpenChoice::whole(&t)?,
                    sub: CompactOpenChoice::whole(&sub)?,
                    quot: CompactOpenChoice::whole(&t)?,
                };
                (sub, t.clone(), t, Some(adapted))
            }
            SequenceKind::MultUnifPrufer(q) => {
                let total = single(Atom::Prufer(*q))?;
                // The kernel of the uniformizer is the layer of order q.
                let layer = CompactOpenChoice::new(&total, alloc::vec![ChoiceParam::Torsion(1)])?;
                let zero = CompactOpenChoice::zero(&total)?;
                let (sub, sub_choice) = relative_subgroup(&total, &layer, &zero)?;
                let adapted = Adapted {
                    total: zero.clone(),
                    sub: sub_choice,
                    quot: zero,
                };
                (sub, total.clone(), total, Some(adapted))
            }
            SequenceKind::IntegersInReals => (
                single(Atom::Integers)?,
                single(Atom::RealLine)?,
                single(Atom::Circle)?,
                None,
            ),
            SequenceKind::SumSplit(a, b) => {
                let total = a.direct_sum(b);
                let adapted = if total.is_vector_free() {
                    Some(Adapted {
                        total: CompactOpenChoice::canonical(&total)?,
                        sub: CompactOpenChoice::canonical(a)?,
                        quot: CompactOpenChoice::canonical(b)?,
                    })
                } else {
                    None
                };
                (a.clone(), total, b.clone(), adapted)
            }
            SequenceKind::IsoLeft(f) => {
                f.validate_automorphism()
                    .map_err(|v| crate::Error::Domain(alloc::format!("not an isomorphism: {v}")))?;
                (
                    GroupExpr::zero(),
                    f.source().clone(),
                    f.target().clone(),
                    None,
                )
            }
            SequenceKind::IsoRight(f) => {
                f.validate_automorphism()
                    .map_err(|v| crate::Error::Domain(alloc::format!("not an isomorphism: {v}")))?;
                (
                    f.source().clone(),
                    f.target().clone(),
                    GroupExpr::zero(),
                    None,
                )
            }
        };
        let seq = Self {
            kind,
            sub,
            total,
            quot,
            adapted,
        };
        seq.check_orders()?;
        Ok(seq)
    }

    fn check_orders(&self) -> Result<()> {
        if let (Some(s), Some(t), Some(q)) = (
            finite_order(&self.sub),
            finite_order(&self.total),
            finite_order(&self.quot),
        ) {
            if s.clone() * q.clone() != t {
                bail!(
                    Invariant,
                    "|{}| * |{}| != |{}| ({s} * {q} vs {t})",
                    self.sub,
                    self.quot,
                    self.total
                );
            }
        }
        if let Some(a) = &self.adapted {
            a.total.validate(&self.total)?;
            a.sub.validate(&self.sub)?;
            a.quot.validate(&self.quot)?;
        }
        Ok(())
    }

    pub fn uniformizer(q: u64) -> Result<Self> {
        Self::make(SequenceKind::Uniformizer(q))
    }

    pub fn mult_n_z(n: u64) -> Result<Self> {
        Self::make(SequenceKind::MultNZ(n))
    }

    pub fn mult_n_t(n: u64) -> Result<Self> {
        Self::make(SequenceKind::MultNT(n))
    }

    pub fn compact_open(group: &GroupExpr, choice: &CompactOpenChoice) -> Result<Self> {
        Self::make(SequenceKind::CompactOpen {
            group: group.clone(),
            choice: choice.clone(),
        })
    }

    pub fn sum_split(a: &GroupExpr, b: &GroupExpr) -> Result<Self> {
        Self::make(SequenceKind::SumSplit(a.clone(), b.clone()))
    }

    pub fn kind(&self) -> &SequenceKind {
        &self.kind
    }

    pub fn sub(&self) -> &GroupExpr {
        &self.sub
    }

    pub fn total(&self) -> &GroupExpr {
        &self.total
    }

    pub fn quot(&self) -> &GroupExpr {
        &self.quot
    }

    pub fn adapted(&self) -> Option<&Adapted> {
        self.adapted.as_ref()
    }

    /// The `d` with `Ha(sequence)(root(total)) = d * (root(sub) (x) root(quot))`.
    pub fn defect(&self) -> Result<PositiveReal> {
        if let Some(a) = &self.adapted {
            let total = canonical_volume(&self.total, &a.total)?;
            let sub = canonical_volume(&self.sub, &a.sub)?;
            let quot = canonical_volume(&self.quot, &a.quot)?;
            return Ok(total.div(&sub.mul(&quot)).into());
        }
        match &self.kind {
            // Lebesgue measure with vol([0,1)) = 1 glues counting measure on Z
            // with the mass-one measure on T, and products of roots are roots.
            SequenceKind::IntegersInReals | SequenceKind::SumSplit(..) => Ok(PositiveReal::one()),
            SequenceKind::IsoLeft(f) => f.module(),
            SequenceKind::IsoRight(f) => Ok(f.module()?.inverse()),
            other => bail!(Invariant, "{other} has no adapted compact open"),
        }
    }
}

impl fmt::Display for ExactSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} -> {}", self.sub, self.total, self.quot)
    }
}

/// All catalog sequences of finite groups obtained from subgroups of `Z/n`.
pub fn cyclic_sequences(n: u64) -> Result<Vec<ExactSequence>> {
    let group = GroupExpr::new([(Atom::Cyclic(n), 1)])?;
    if group.is_zero() {
        return Ok(alloc::vec![ExactSequence::compact_open(
            &group,
            &CompactOpenChoice::default()
        )?]);
    }
    crate::lca::divisors(n)
        .into_iter()
        .map(|d| {
            ExactSequence::compact_open(
                &group,
                &CompactOpenChoice::new(&group, alloc::vec![ChoiceParam::Divisor(d)])?,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lca::sum_of;
    use crate::linalg::Scalar;
    use crate::scalar::factorize;
    use alloc::vec;

    fn q(n: u64, d: u64) -> PositiveReal {
        factorize(n, d).unwrap().into()
    }

    #[test]
    fn catalog_shapes() {
        let s = ExactSequence::uniformizer(5).unwrap();
        assert_eq!(s.sub(), &sum_of(&[Atom::IntegerRing(5)]).unwrap());
        assert_eq!(s.total(), &sum_of(&[Atom::LocalField(5)]).unwrap());
        assert_eq!(s.quot(), &sum_of(&[Atom::Prufer(5)]).unwrap());

        let s = ExactSequence::mult_n_z(3).unwrap();
        assert_eq!(s.sub(), &sum_of(&[Atom::Integers]).unwrap());
        assert_eq!(s.quot(), &sum_of(&[Atom::Cyclic(3)]).unwrap());

        let s = ExactSequence::make(SequenceKind::IntegersInReals).unwrap();
        assert_eq!(s.to_string(), "Z -> R -> T");

        let s = ExactSequence::make(SequenceKind::MultUnifPrufer(4)).unwrap();
        assert_eq!(s.sub(), &GroupExpr::new([(Atom::Cyclic(2), 2)]).unwrap());
    }

    #[test]
    fn defect_examples() {
        assert!(ExactSequence::uniformizer(7)
            .unwrap()
            .defect()
            .unwrap()
            .is_one());
        assert_eq!(
            ExactSequence::mult_n_z(3).unwrap().defect().unwrap(),
            q(3, 1)
        );
        let qp = sum_of(&[Atom::LocalField(3)]).unwrap();
        let c = CompactOpenChoice::new(&qp, vec![ChoiceParam::Ideal(1)]).unwrap();
        assert_eq!(
            ExactSequence::compact_open(&qp, &c)
                .unwrap()
                .defect()
                .unwrap(),
            q(1, 3)
        );
        assert!(
            ExactSequence::make(SequenceKind::IdealFiltration { q: 9, a: 3, b: 1 })
                .unwrap()
                .defect()
                .unwrap()
                .is_one()
        );
        assert_eq!(
            ExactSequence::make(SequenceKind::MultUnifPrufer(8))
                .unwrap()
                .defect()
                .unwrap(),
            q(8, 1)
        );
        assert!(ExactSequence::make(SequenceKind::IntegersInReals)
            .unwrap()
            .defect()
            .unwrap()
            .is_one());
    }

    /// Fubini by hand on `Z/n -> Z/nm -> Z/m`: every measure has total mass
    /// one, so the glue of the two roots weighs each point of `Z/nm` by
    /// `(1/n) * (1/m)`, which is already the root of `Z/nm`.
    #[test]
    fn finite_defects_match_point_masses() {
        for n in 2..=12u64 {
            for m in 1..=12u64 {
                let total = GroupExpr::new([(Atom::Cyclic(n * m), 1)]).unwrap();
                let choice = CompactOpenChoice::new(&total, vec![ChoiceParam::Divisor(n)]).unwrap();
                let seq = ExactSequence::compact_open(&total, &choice).unwrap();
                let root_point = q(1, n * m);
                let glue_point = q(1, n).mul(&q(1, m));
                assert_eq!(seq.defect().unwrap(), root_point.div(&glue_point));
            }
        }
        assert!(ExactSequence::mult_n_t(5)
            .unwrap()
            .defect()
            .unwrap()
            .is_one());
    }

    #[test]
    fn sum_split_is_normalized() {
        let a = sum_of(&[Atom::LocalField(5), Atom::Cyclic(4)]).unwrap();
        let b = sum_of(&[Atom::Prufer(3), Atom::Circle, Atom::RealLine]).unwrap();
        assert!(ExactSequence::sum_split(&a, &b)
            .unwrap()
            .defect()
            .unwrap()
            .is_one());
        assert!(ExactSequence::sum_split(&a, &a)
            .unwrap()
            .defect()
            .unwrap()
            .is_one());
    }

    #[test]
    fn iso_sequences() {
        let x = sum_of(&[Atom::LocalField(2)]).unwrap();
        let f = Morphism::scalar(&x, Scalar::integer(2)).unwrap();
        let left = ExactSequence::make(SequenceKind::IsoLeft(f.clone())).unwrap();
        let right = ExactSequence::make(SequenceKind::IsoRight(f)).unwrap();
        assert_eq!(left.defect().unwrap(), q(1, 2));
        assert_eq!(right.defect().unwrap(), q(2, 1));
        assert!(left.sub().is_zero() && right.quot().is_zero());
        let z = sum_of(&[Atom::Integers]).unwrap();
        let bad = Morphism::scalar(&z, Scalar::integer(2)).unwrap();
        assert!(ExactSequence::make(SequenceKind::IsoLeft(bad)).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(ExactSequence::mult_n_z(0).is_err());
        assert!(ExactSequence::make(SequenceKind::IdealFiltration { q: 5, a: 1, b: 2 }).is_err());
        assert!(ExactSequence::uniformizer(6).is_err());
        let r = sum_of(&[Atom::RealLine]).unwrap();
        assert!(ExactSequence::compact_open(&r, &CompactOpenChoice::default()).is_err());
    }

    #[test]
    fn finite_orders_multiply() {
        for n in [1u64, 6, 12, 30, 64] {
            for s in cyclic_sequences(n).unwrap() {
                let (a, b, c) = (
                    finite_order(s.sub()).unwrap(),
                    finite_order(s.total()).unwrap(),
                    finite_order(s.quot()).unwrap(),
                );
                assert_eq!(a * c, b);
            }
        }
    }
}

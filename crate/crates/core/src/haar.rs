//! The Haar determinant functor in coordinates.
//!
//! A Haar measure on `X` is stored as `scale * root(X)`, where `root(X)` gives
//! the canonical compact open volume 1 (Lebesgue with `vol([0,1)) = 1` on real
//! lines). Every map of the functor then becomes multiplication by a
//! [`PositiveReal`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{bail, Result};
use crate::lca::{
    generalized_index, relative_quotient, relative_subgroup, Atom, ChoiceParam, CompactOpenChoice,
    GroupExpr,
};
use crate::morphism::Morphism;
use crate::scalar::PositiveReal;
use crate::sequence::{ExactSequence, SequenceKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaarElement {
    pub group: GroupExpr,
    pub scale: PositiveReal,
}

impl HaarElement {
    pub fn new(group: GroupExpr, scale: PositiveReal) -> Self {
        Self { group, scale }
    }

    /// The canonical root measure.
    pub fn canonical(group: &GroupExpr) -> Self {
        Self::new(group.clone(), PositiveReal::one())
    }

    pub fn scaled(&self, a: &PositiveReal) -> Self {
        Self::new(self.group.clone(), self.scale.mul(a))
    }
}

impl fmt::Display for HaarElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * root({})", self.scale, self.group)
    }
}

/// The Haar measure giving `c` volume 1.
pub fn root_measure(group: &GroupExpr, c: &CompactOpenChoice) -> Result<HaarElement> {
    let canonical = CompactOpenChoice::canonical(group)?;
    let scale = generalized_index(group, &canonical, c)?;
    Ok(HaarElement::new(group.clone(), scale.into()))
}

/// Transport of `mu` along an isomorphism, in the forward convention of
/// [`Morphism::module`].
pub fn pushforward(f: &Morphism, mu: &HaarElement) -> Result<HaarElement> {
    if &mu.group != f.source() {
        bail!(
            Type,
            "measure on {} pushed along a map from {}",
            mu.group,
            f.source()
        );
    }
    Ok(HaarElement::new(
        f.target().clone(),
        mu.scale.mul(&f.module()?),
    ))
}

/// `mu = r * (root(sub) (x) root(quot))`, with the whole factor carried by `sub`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub sub: HaarElement,
    pub quot: HaarElement,
    pub r: PositiveReal,
}

pub fn split(seq: &ExactSequence, mu: &HaarElement) -> Result<Split> {
    if &mu.group != seq.total() {
        bail!(
            Type,
            "measure on {} split along a sequence with total {}",
            mu.group,
            seq.total()
        );
    }
    let r = mu.scale.mul(&seq.defect()?);
    Ok(Split {
        sub: HaarElement::new(seq.sub().clone(), r.clone()),
        quot: HaarElement::canonical(seq.quot()),
        r,
    })
}

/// Inverse of [`split`]: the measure on `total` obtained by Fubini from
/// measures on `sub` and `quot`.
pub fn glue(seq: &ExactSequence, sub: &HaarElement, quot: &HaarElement) -> Result<HaarElement> {
    if &sub.group != seq.sub() || &quot.group != seq.quot() {
        bail!(
            Type,
            "glue of measures on {} and {} along {seq}",
            sub.group,
            quot.group
        );
    }
    let r = sub.scale.mul(&quot.scale);
    Ok(HaarElement::new(seq.total().clone(), r.div(&seq.defect()?)))
}

/// Whether `mu` lies in the rational orbit of the root measures.
pub fn haq_membership(mu: &HaarElement) -> Result<bool> {
    if !mu.group.is_vector_free() {
        bail!(
            Domain,
            "{} has no compact open subgroup, so no rational Haar measures",
            mu.group
        );
    }
    Ok(mu.scale.is_rational())
}

/// Two-step filtration `G1 <= G2 <= G3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Filtration {
    /// Compact opens `inner <= outer` of a vector-free `group`, which is `G3`.
    Tower {
        group: GroupExpr,
        inner: CompactOpenChoice,
        outer: CompactOpenChoice,
    },
    /// `nZ <= mZ <= Z` with `m | n`.
    Integers { n: u64, m: u64 },
}

impl Filtration {
    /// `m^a <= m^b <= O` in the ring of integers, `a >= b`.
    pub fn ring_ideals(q: u64, a: u32, b: u32) -> Result<Self> {
        let group = GroupExpr::atom(Atom::IntegerRing(q))?;
        Self::tower(
            &group,
            alloc::vec![ChoiceParam::Depth(a)],
            alloc::vec![ChoiceParam::Depth(b)],
        )
    }

    /// `m^a <= m^b <= K` in the local field, `a >= b`.
    pub fn field_ideals(q: u64, a: i64, b: i64) -> Result<Self> {
        let group = GroupExpr::atom(Atom::LocalField(q))?;
        Self::tower(
            &group,
            alloc::vec![ChoiceParam::Ideal(a)],
            alloc::vec![ChoiceParam::Ideal(b)],
        )
    }

    /// Subgroups of orders `d1 | d2` inside `Z/n`.
    pub fn cyclic(n: u64, d1: u64, d2: u64) -> Result<Self> {
        let group = GroupExpr::atom(Atom::Cyclic(n))?;
        Self::tower(
            &group,
            alloc::vec![ChoiceParam::Divisor(d1)],
            alloc::vec![ChoiceParam::Divisor(d2)],
        )
    }

    pub fn integers(n: u64, m: u64) -> Result<Self> {
        if n == 0 || m == 0 || !n.is_multiple_of(m) {
            bail!(Domain, "{n}Z <= {m}Z needs {m} | {n}");
        }
        Ok(Filtration::Integers { n, m })
    }

    pub fn tower(
        group: &GroupExpr,
        inner: Vec<ChoiceParam>,
        outer: Vec<ChoiceParam>,
    ) -> Result<Self> {
        let inner = CompactOpenChoice::new(group, inner)?;
        let outer = CompactOpenChoice::new(group, outer)?;
        if !inner.is_within(&outer, group)? {
            bail!(Domain, "{inner} is not contained in {outer} on {group}");
        }
        Ok(Filtration::Tower {
            group: group.clone(),
            inner,
            outer,
        })
    }

    /// The four sequences `G1->G3`, `G2/G1->G3/G1`, `G2->G3`, `G1->G2`.
    pub fn sequences(&self) -> Result<[ExactSequence; 4]> {
        match self {
            Filtration::Tower {
                group,
                inner,
                outer,
            } => {
                let g13 = ExactSequence::compact_open(group, inner)?;
                let g23 = ExactSequence::compact_open(group, outer)?;
                let (g2, g1_in_g2) = relative_subgroup(group, outer, inner)?;
                let g12 = ExactSequence::compact_open(&g2, &g1_in_g2)?;
                let (g3_mod_g1, g2_mod_g1) = relative_quotient(group, outer, inner)?;
                let g2_3 = ExactSequence::compact_open(&g3_mod_g1, &g2_mod_g1)?;
                Ok([g13, g2_3, g23, g12])
            }
            Filtration::Integers { n, m } => {
                let zn = GroupExpr::atom(Atom::Cyclic(*n))?;
                let quotient_tower = if zn.is_zero() {
                    ExactSequence::compact_open(&zn, &CompactOpenChoice::default())?
                } else {
                    let choice =
                        CompactOpenChoice::new(&zn, alloc::vec![ChoiceParam::Divisor(n / m)])?;
                    ExactSequence::compact_open(&zn, &choice)?
                };
                Ok([
                    ExactSequence::mult_n_z(*n)?,
                    quotient_tower,
                    ExactSequence::mult_n_z(*m)?,
                    ExactSequence::mult_n_z(n / m)?,
                ])
            }
        }
    }
}

impl fmt::Display for Filtration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filtration::Tower {
                group,
                inner,
                outer,
            } => write!(f, "tower({group}; {inner}; {outer})"),
            Filtration::Integers { n, m } => write!(f, "integer({n},{m})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomCase {
    /// Splitting along `0 -> G -> G'` and `G -> G' -> 0` recovers the transport along `f`.
    Axiom3(Morphism),
    /// Compatibility of the four splittings of a two-step filtration.
    Axiom4(Filtration),
    /// The direct-sum splitting does not depend on the order of the summands.
    Axiom5(GroupExpr, GroupExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub case: String,
    pub pass: bool,
    pub lhs: PositiveReal,
    pub rhs: PositiveReal,
}

fn report(case: String, checks: Vec<(PositiveReal, PositiveReal)>) -> AxiomReport {
    let first_bad = checks.iter().position(|(l, r)| l != r);
    let (lhs, rhs) = checks[first_bad.unwrap_or(0)].clone();
    AxiomReport {
        case,
        pass: first_bad.is_none(),
        lhs,
        rhs,
    }
}

pub fn check_axioms(case: &AxiomCase) -> Result<AxiomReport> {
    match case {
        AxiomCase::Axiom3(f) => {
            let left = ExactSequence::make(SequenceKind::IsoLeft(f.clone()))?;
            let right = ExactSequence::make(SequenceKind::IsoRight(f.clone()))?;
            let mu = HaarElement::canonical(f.source());
            let nu = HaarElement::canonical(f.target());

            // 0 -> G -> G': split mu, then read the G' factor.
            let via_left = split(&left, &mu)?;
            let composite_left = via_left.sub.scale.mul(&via_left.quot.scale);
            let direct_left = pushforward(f, &mu)?.scale;

            // G -> G' -> 0: split nu, then read the G factor.
            let via_right = split(&right, &nu)?;
            let composite_right = via_right.sub.scale.mul(&via_right.quot.scale);
            let direct_right = pushforward(&f.inverse()?, &nu)?.scale;

            Ok(report(
                alloc::format!("axiom3({f})"),
                alloc::vec![
                    (composite_left, direct_left),
                    (composite_right, direct_right)
                ],
            ))
        }
        AxiomCase::Axiom4(filtration) => {
            let [g13, g2_3, g23, g12] = filtration.sequences()?;
            let lhs = g13.defect()?.mul(&g2_3.defect()?);
            let rhs = g23.defect()?.mul(&g12.defect()?);
            Ok(report(
                alloc::format!("axiom4({filtration})"),
                alloc::vec![(lhs, rhs)],
            ))
        }
        AxiomCase::Axiom5(a, b) => {
            let ab = ExactSequence::sum_split(a, b)?;
            let ba = ExactSequence::sum_split(b, a)?;
            if ab.total() != ba.total() {
                bail!(
                    Invariant,
                    "direct sum is not symmetric: {} vs {}",
                    ab.total(),
                    ba.total()
                );
            }
            let mu = HaarElement::canonical(ab.total());
            let lhs = split(&ab, &mu)?.r;
            let rhs = split(&ba, &mu)?.r;
            Ok(report(
                alloc::format!("axiom5({a}; {b})"),
                alloc::vec![(lhs, rhs)],
            ))
        }
    }
}

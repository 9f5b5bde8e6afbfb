//! Formal direct sums of LCA atoms, compact open subgroups and generalized indices.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{checked_pow, is_prime, prime_power};
use crate::error::{bail, Result};
use crate::scalar::{factorize, PrimeExponentVector};

/// Building block of the group catalog.
///
/// Residue cardinalities `q` are prime powers. `LocalField(q)` stands for the
/// p-adic numbers when `q` is prime and for `F_q((t))` otherwise;
/// `IntegerRing(q)` is its ring of integers and `Prufer(q)` the discrete
/// quotient of the two.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    RealLine,
    LocalField(u64),
    IntegerRing(u64),
    Prufer(u64),
    Integers,
    Circle,
    Cyclic(u64),
    /// An opaque discrete group, e.g. the reals with the discrete topology.
    Blackbox(String),
}

impl Atom {
    pub fn validate(&self) -> Result<()> {
        match self {
            Atom::LocalField(q) | Atom::IntegerRing(q) | Atom::Prufer(q) => {
                if prime_power(*q).is_none() {
                    bail!(Domain, "residue cardinality {q} is not a prime power");
                }
            }
            Atom::Cyclic(0) => bail!(Domain, "Z/0 is not a finite cyclic group"),
            Atom::Blackbox(label) if label.is_empty() => bail!(Domain, "blackbox label is empty"),
            _ => {}
        }
        Ok(())
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, Atom::IntegerRing(_) | Atom::Circle | Atom::Cyclic(_))
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self,
            Atom::Integers | Atom::Prufer(_) | Atom::Cyclic(_) | Atom::Blackbox(_)
        )
    }

    /// `(p, f)` with `q = p^f` for the atoms parametrized by a residue field.
    pub fn residue(&self) -> Option<(u64, u32)> {
        match self {
            Atom::LocalField(q) | Atom::IntegerRing(q) | Atom::Prufer(q) => prime_power(*q),
            _ => None,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::RealLine => f.write_str("R"),
            Atom::LocalField(q) if is_prime(*q) => write!(f, "Qp({q})"),
            Atom::LocalField(q) => write!(f, "K({q})"),
            Atom::IntegerRing(q) if is_prime(*q) => write!(f, "Zp({q})"),
            Atom::IntegerRing(q) => write!(f, "O({q})"),
            Atom::Prufer(q) => write!(f, "Prufer({q})"),
            Atom::Integers => f.write_str("Z"),
            Atom::Circle => f.write_str("T"),
            Atom::Cyclic(n) => write!(f, "Z/{n}"),
            Atom::Blackbox(label) => write!(f, "D({label})"),
        }
    }
}

/// A normalized finite direct sum of atoms with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupExpr {
    atoms: Vec<(Atom, u32)>,
}

impl GroupExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Validates and normalizes: sorts, merges repeats, drops `Z/1` and zero multiplicities.
    pub fn new<I: IntoIterator<Item = (Atom, u32)>>(atoms: I) -> Result<Self> {
        let mut list: Vec<(Atom, u32)> = Vec::new();
        for (atom, k) in atoms {
            atom.validate()?;
            if k == 0 || atom == Atom::Cyclic(1) {
                continue;
            }
            list.push((atom, k));
        }
        Ok(Self::from_validated(list))
    }

    fn from_validated(mut list: Vec<(Atom, u32)>) -> Self {
        list.sort_by(|a, b| a.0.cmp(&b.0));
        let mut atoms: Vec<(Atom, u32)> = Vec::with_capacity(list.len());
        for (atom, k) in list {
            match atoms.last_mut() {
                Some((last, m)) if *last == atom => *m += k,
                _ => atoms.push((atom, k)),
            }
        }
        Self { atoms }
    }

    pub fn atom(atom: Atom) -> Result<Self> {
        Self::new([(atom, 1)])
    }

    pub fn atoms(&self) -> &[(Atom, u32)] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn multiplicity(&self, atom: &Atom) -> u32 {
        self.atoms
            .iter()
            .find(|(a, _)| a == atom)
            .map_or(0, |(_, k)| *k)
    }

    /// Atoms repeated by multiplicity, in canonical order.
    pub fn occurrences(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.atoms
            .iter()
            .flat_map(|(a, k)| core::iter::repeat_n(a, *k as usize))
    }

    pub fn occurrence_count(&self) -> usize {
        self.atoms.iter().map(|(_, k)| *k as usize).sum()
    }

    pub fn real_rank(&self) -> u32 {
        self.multiplicity(&Atom::RealLine)
    }

    pub fn is_vector_free(&self) -> bool {
        self.real_rank() == 0
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_validated(
            self.atoms
                .iter()
                .chain(other.atoms.iter())
                .cloned()
                .collect(),
        )
    }

    /// Everything except the real lines.
    pub fn nonreal_part(&self) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .filter(|(a, _)| *a != Atom::RealLine)
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        for (i, (atom, k)) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *k == 1 {
                write!(f, "{atom}")?;
            } else {
                write!(f, "{atom}^{k}")?;
            }
        }
        Ok(())
    }
}

/// Canonical form of a group expression. Idempotent.
pub fn normalize(expr: &GroupExpr) -> GroupExpr {
    GroupExpr::from_validated(expr.atoms.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Classification {
    pub vector_free: bool,
    pub compact: bool,
    pub discrete: bool,
}

pub fn classify(expr: &GroupExpr) -> Classification {
    Classification {
        vector_free: expr.is_vector_free(),
        compact: expr.atoms.iter().all(|(a, _)| a.is_compact()),
        discrete: expr.atoms.iter().all(|(a, _)| a.is_discrete()),
    }
}

/// Parameter selecting a compact open subgroup of one atom occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChoiceParam {
    /// Fractional ideal `m^a` of a local field, any `a`.
    Ideal(i64),
    /// Ideal `m^a`, `a >= 0`, of a ring of integers.
    Depth(u32),
    /// The subgroup of order `q^a` of a Prufer group.
    Torsion(u32),
    /// The subgroup of order `d` of `Z/n`.
    Divisor(u64),
    /// The only choice: `{0}` for discrete atoms, the whole group for the circle.
    Fixed,
}

impl fmt::Display for ChoiceParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChoiceParam::Ideal(a) => write!(f, "{a}"),
            ChoiceParam::Depth(a) | ChoiceParam::Torsion(a) => write!(f, "{a}"),
            ChoiceParam::Divisor(d) => write!(f, "{d}"),
            ChoiceParam::Fixed => f.write_str("*"),
        }
    }
}

/// One parameter per atom occurrence of a vector-free group, in occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompactOpenChoice {
    params: Vec<ChoiceParam>,
}

impl fmt::Display for CompactOpenChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

fn check_param(atom: &Atom, param: &ChoiceParam) -> Result<()> {
    match (atom, param) {
        (Atom::RealLine, _) => {
            bail!(Unsupported, "the real line has no compact open subgroup")
        }
        (Atom::LocalField(_), ChoiceParam::Ideal(_))
        | (Atom::IntegerRing(_), ChoiceParam::Depth(_))
        | (Atom::Prufer(_), ChoiceParam::Torsion(_))
        | (Atom::Integers | Atom::Circle | Atom::Blackbox(_), ChoiceParam::Fixed) => Ok(()),
        (Atom::Cyclic(n), ChoiceParam::Divisor(d)) => {
            if *d == 0 || n % d != 0 {
                bail!(Domain, "{d} does not divide {n}");
            }
            Ok(())
        }
        _ => bail!(
            Domain,
            "choice parameter {param:?} does not apply to {atom}"
        ),
    }
}

impl CompactOpenChoice {
    pub fn new(expr: &GroupExpr, params: Vec<ChoiceParam>) -> Result<Self> {
        let choice = Self { params };
        choice.validate(expr)?;
        Ok(choice)
    }

    pub fn params(&self) -> &[ChoiceParam] {
        &self.params
    }

    pub fn validate(&self, expr: &GroupExpr) -> Result<()> {
        if !expr.is_vector_free() {
            bail!(
                Unsupported,
                "{expr} has a real summand and no compact open subgroup"
            );
        }
        if self.params.len() != expr.occurrence_count() {
            bail!(
                Type,
                "choice has {} parameters but {expr} has {} atom occurrences",
                self.params.len(),
                expr.occurrence_count()
            );
        }
        for (atom, param) in expr.occurrences().zip(&self.params) {
            check_param(atom, param)?;
        }
        Ok(())
    }

    /// `m^0` on local fields and rings of integers, `{0}` on Prufer groups,
    /// the whole group on finite cyclic groups and the circle.
    pub fn canonical(expr: &GroupExpr) -> Result<Self> {
        let params = expr
            .occurrences()
            .map(|atom| {
                Ok(match atom {
                    Atom::RealLine => {
                        bail!(
                            Unsupported,
                            "{expr} has a real summand and no compact open subgroup"
                        )
                    }
                    Atom::LocalField(_) => ChoiceParam::Ideal(0),
                    Atom::IntegerRing(_) => ChoiceParam::Depth(0),
                    Atom::Prufer(_) => ChoiceParam::Torsion(0),
                    Atom::Cyclic(n) => ChoiceParam::Divisor(*n),
                    Atom::Integers | Atom::Circle | Atom::Blackbox(_) => ChoiceParam::Fixed,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { params })
    }

    /// The zero subgroup of a discrete group.
    pub fn zero(expr: &GroupExpr) -> Result<Self> {
        let params = expr
            .occurrences()
            .map(|atom| {
                Ok(match atom {
                    Atom::Prufer(_) => ChoiceParam::Torsion(0),
                    Atom::Cyclic(_) => ChoiceParam::Divisor(1),
                    Atom::Integers | Atom::Blackbox(_) => ChoiceParam::Fixed,
                    other => bail!(Domain, "{{0}} is not open in {other}"),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { params })
    }

    /// The whole of a compact group.
    pub fn whole(expr: &GroupExpr) -> Result<Self> {
        let params = expr
            .occurrences()
            .map(|atom| {
                Ok(match atom {
                    Atom::IntegerRing(_) => ChoiceParam::Depth(0),
                    Atom::Cyclic(n) => ChoiceParam::Divisor(*n),
                    Atom::Circle => ChoiceParam::Fixed,
                    other => bail!(Domain, "{other} is not compact"),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { params })
    }

    /// Whether `self` is contained in `other`, occurrence by occurrence.
    pub fn is_within(&self, other: &Self, expr: &GroupExpr) -> Result<bool> {
        self.validate(expr)?;
        other.validate(expr)?;
        Ok(self
            .params
            .iter()
            .zip(&other.params)
            .all(|(a, b)| match (a, b) {
                (ChoiceParam::Ideal(x), ChoiceParam::Ideal(y)) => x >= y,
                (ChoiceParam::Depth(x), ChoiceParam::Depth(y)) => x >= y,
                (ChoiceParam::Torsion(x), ChoiceParam::Torsion(y)) => x <= y,
                (ChoiceParam::Divisor(x), ChoiceParam::Divisor(y)) => y % x == 0,
                (ChoiceParam::Fixed, ChoiceParam::Fixed) => true,
                _ => false,
            }))
    }
}

/// `[C : C cap C'] / [C' : C cap C']` as an exact positive rational.
pub fn generalized_index(
    expr: &GroupExpr,
    c: &CompactOpenChoice,
    cprime: &CompactOpenChoice,
) -> Result<PrimeExponentVector> {
    c.validate(expr)?;
    cprime.validate(expr)?;
    let mut out = PrimeExponentVector::one();
    for (atom, (a, b)) in expr.occurrences().zip(c.params.iter().zip(&cprime.params)) {
        let factor = match (a, b) {
            (ChoiceParam::Ideal(x), ChoiceParam::Ideal(y)) => residue_power(atom, y - x),
            (ChoiceParam::Depth(x), ChoiceParam::Depth(y)) => {
                residue_power(atom, *y as i64 - *x as i64)
            }
            (ChoiceParam::Torsion(x), ChoiceParam::Torsion(y)) => {
                residue_power(atom, *x as i64 - *y as i64)
            }
            (ChoiceParam::Divisor(x), ChoiceParam::Divisor(y)) => factorize(*x, *y)?,
            _ => PrimeExponentVector::one(),
        };
        out = out.mul(&factor);
    }
    Ok(out)
}

fn residue_power(atom: &Atom, e: i64) -> PrimeExponentVector {
    let (p, f) = atom.residue().expect("residue atom");
    PrimeExponentVector::prime_power(p, e * f as i64)
}

/// Volume of the chosen subgroup under the canonical root measure.
pub fn canonical_volume(expr: &GroupExpr, c: &CompactOpenChoice) -> Result<PrimeExponentVector> {
    generalized_index(expr, c, &CompactOpenChoice::canonical(expr)?)
}

type Pieces = Vec<(Atom, ChoiceParam)>;

fn assemble(mut pieces: Pieces) -> (GroupExpr, CompactOpenChoice) {
    pieces.retain(|(a, _)| *a != Atom::Cyclic(1));
    pieces.sort();
    let expr = GroupExpr::from_validated(pieces.iter().map(|(a, _)| (a.clone(), 1)).collect());
    let params = pieces.into_iter().map(|(_, p)| p).collect();
    (expr, CompactOpenChoice { params })
}

/// A finite group of order `q^t` attached to residue data, with its subgroup
/// of order `q^s` marked. Cyclic for prime `q`, elementary abelian otherwise.
fn finite_layer(q: u64, t: u32, s: u32, out: &mut Pieces) -> Result<()> {
    let (p, f) = prime_power(q).expect("validated residue cardinality");
    if f == 1 {
        out.push((
            Atom::Cyclic(checked_pow(q, t)?),
            ChoiceParam::Divisor(checked_pow(q, s)?),
        ));
    } else {
        let total = f * t;
        let marked = f * s;
        for i in 0..total {
            let d = if i < marked { p } else { 1 };
            out.push((Atom::Cyclic(p), ChoiceParam::Divisor(d)));
        }
    }
    Ok(())
}

fn check_nested(
    expr: &GroupExpr,
    inner: &CompactOpenChoice,
    outer: &CompactOpenChoice,
) -> Result<()> {
    if !inner.is_within(outer, expr)? {
        bail!(
            Domain,
            "compact open {inner} is not contained in {outer} on {expr}"
        );
    }
    Ok(())
}

/// For compact opens `inner <= outer` of `expr`, the group `outer` as an
/// expression together with the choice picking out `inner` inside it.
pub fn relative_subgroup(
    expr: &GroupExpr,
    outer: &CompactOpenChoice,
    inner: &CompactOpenChoice,
) -> Result<(GroupExpr, CompactOpenChoice)> {
    check_nested(expr, inner, outer)?;
    let mut pieces = Pieces::new();
    for (atom, (o, i)) in expr
        .occurrences()
        .zip(outer.params.iter().zip(&inner.params))
    {
        match (atom, o, i) {
            (Atom::LocalField(q), ChoiceParam::Ideal(a_out), ChoiceParam::Ideal(a_in)) => {
                pieces.push((
                    Atom::IntegerRing(*q),
                    ChoiceParam::Depth((a_in - a_out) as u32),
                ));
            }
            (Atom::IntegerRing(q), ChoiceParam::Depth(a_out), ChoiceParam::Depth(a_in)) => {
                pieces.push((Atom::IntegerRing(*q), ChoiceParam::Depth(a_in - a_out)));
            }
            (Atom::Prufer(q), ChoiceParam::Torsion(t_out), ChoiceParam::Torsion(t_in)) => {
                finite_layer(*q, *t_out, *t_in, &mut pieces)?;
            }
            (Atom::Cyclic(_), ChoiceParam::Divisor(d_out), ChoiceParam::Divisor(d_in)) => {
                pieces.push((Atom::Cyclic(*d_out), ChoiceParam::Divisor(*d_in)));
            }
            (Atom::Circle, _, _) => pieces.push((Atom::Circle, ChoiceParam::Fixed)),
            (Atom::Integers | Atom::Blackbox(_), _, _) => {}
            _ => bail!(Invariant, "mismatched choice parameters on {atom}"),
        }
    }
    Ok(assemble(pieces))
}

/// For compact opens `inner <= outer` of `expr`, the discrete quotient
/// `expr / inner` together with the choice picking out `outer / inner`.
pub fn relative_quotient(
    expr: &GroupExpr,
    outer: &CompactOpenChoice,
    inner: &CompactOpenChoice,
) -> Result<(GroupExpr, CompactOpenChoice)> {
    check_nested(expr, inner, outer)?;
    let mut pieces = Pieces::new();
    for (atom, (o, i)) in expr
        .occurrences()
        .zip(outer.params.iter().zip(&inner.params))
    {
        match (atom, o, i) {
            (Atom::LocalField(q), ChoiceParam::Ideal(a_out), ChoiceParam::Ideal(a_in)) => {
                pieces.push((
                    Atom::Prufer(*q),
                    ChoiceParam::Torsion((a_in - a_out) as u32),
                ));
            }
            (Atom::IntegerRing(q), ChoiceParam::Depth(a_out), ChoiceParam::Depth(a_in)) => {
                finite_layer(*q, *a_in, a_in - a_out, &mut pieces)?;
            }
            (Atom::Prufer(q), ChoiceParam::Torsion(t_out), ChoiceParam::Torsion(t_in)) => {
                pieces.push((Atom::Prufer(*q), ChoiceParam::Torsion(t_out - t_in)));
            }
            (Atom::Cyclic(n), ChoiceParam::Divisor(d_out), ChoiceParam::Divisor(d_in)) => {
                pieces.push((Atom::Cyclic(n / d_in), ChoiceParam::Divisor(d_out / d_in)));
            }
            (Atom::Integers | Atom::Blackbox(_), _, _) => {
                pieces.push((atom.clone(), ChoiceParam::Fixed))
            }
            (Atom::Circle, _, _) => {}
            _ => bail!(Invariant, "mismatched choice parameters on {atom}"),
        }
    }
    Ok(assemble(pieces))
}

/// The compact open subgroup selected by `c`, as a group expression.
pub fn subgroup_expr(expr: &GroupExpr, c: &CompactOpenChoice) -> Result<GroupExpr> {
    Ok(relative_subgroup(expr, c, c)?.0)
}

/// The discrete quotient `expr / C`.
pub fn quotient_by(expr: &GroupExpr, c: &CompactOpenChoice) -> Result<GroupExpr> {
    Ok(relative_quotient(expr, c, c)?.0)
}

/// `expr = R^n (+) (extension of D by C)` with the canonical compact open `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub real_rank: u32,
    pub nonreal: GroupExpr,
    pub compact_open: CompactOpenChoice,
    pub discrete: GroupExpr,
}

pub fn structure_decompose(expr: &GroupExpr) -> Result<Decomposition> {
    let nonreal = expr.nonreal_part();
    let compact_open = CompactOpenChoice::canonical(&nonreal)?;
    let discrete = quotient_by(&nonreal, &compact_open)?;
    Ok(Decomposition {
        real_rank: expr.real_rank(),
        nonreal,
        compact_open,
        discrete,
    })
}

/// Convenience for tests and generators: `expr` from a list of atoms.
pub fn sum_of(atoms: &[Atom]) -> Result<GroupExpr> {
    GroupExpr::new(atoms.iter().cloned().map(|a| (a, 1)))
}

/// The subgroups `Z/n` has, by order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn e(atoms: &[(Atom, u32)]) -> GroupExpr {
        GroupExpr::new(atoms.iter().cloned()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let x = e(&[
            (Atom::LocalField(5), 1),
            (Atom::RealLine, 1),
            (Atom::LocalField(5), 1),
        ]);
        assert_eq!(x.atoms(), &[(Atom::RealLine, 1), (Atom::LocalField(5), 2)]);
        assert_eq!(x.to_string(), "R + Qp(5)^2");
        assert!(normalize(&GroupExpr::zero()).is_zero());
        let y = e(&[(Atom::Cyclic(6), 1), (Atom::Cyclic(4), 1)]);
        assert_eq!(y.to_string(), "Z/4 + Z/6");
        assert_eq!(normalize(&y), y);
    }

    #[test]
    fn atoms_are_validated() {
        assert!(GroupExpr::atom(Atom::LocalField(6)).is_err());
        assert!(GroupExpr::atom(Atom::Cyclic(0)).is_err());
        assert!(GroupExpr::atom(Atom::LocalField(4)).is_ok());
        assert!(GroupExpr::atom(Atom::Cyclic(1)).unwrap().is_zero());
    }

    #[test]
    fn classify_examples() {
        let c = classify(&e(&[(Atom::LocalField(5), 1)]));
        assert_eq!((c.vector_free, c.compact, c.discrete), (true, false, false));
        let c = classify(&e(&[(Atom::RealLine, 1), (Atom::Integers, 1)]));
        assert_eq!(
            (c.vector_free, c.compact, c.discrete),
            (false, false, false)
        );
        let c = classify(&e(&[(Atom::Circle, 1), (Atom::Cyclic(4), 1)]));
        assert_eq!((c.vector_free, c.compact, c.discrete), (true, true, false));
        let c = classify(&e(&[(Atom::Cyclic(4), 2)]));
        assert!(c.compact && c.discrete);
    }

    #[test]
    fn decompose_examples() {
        let x = e(&[
            (Atom::RealLine, 2),
            (Atom::LocalField(3), 1),
            (Atom::Integers, 1),
        ]);
        let d = structure_decompose(&x).unwrap();
        assert_eq!(d.real_rank, 2);
        assert_eq!(
            subgroup_expr(&d.nonreal, &d.compact_open).unwrap(),
            e(&[(Atom::IntegerRing(3), 1)])
        );
        assert_eq!(d.discrete, e(&[(Atom::Prufer(3), 1), (Atom::Integers, 1)]));

        let t = e(&[(Atom::Circle, 1)]);
        let d = structure_decompose(&t).unwrap();
        assert_eq!(subgroup_expr(&t, &d.compact_open).unwrap(), t);
        assert!(d.discrete.is_zero());

        let z6 = e(&[(Atom::Cyclic(6), 1)]);
        let d = structure_decompose(&z6).unwrap();
        assert_eq!(subgroup_expr(&z6, &d.compact_open).unwrap(), z6);
        assert!(d.discrete.is_zero());
    }

    #[test]
    fn index_examples() {
        let qp = e(&[(Atom::LocalField(7), 1)]);
        let c0 = CompactOpenChoice::new(&qp, vec![ChoiceParam::Ideal(0)]).unwrap();
        let c1 = CompactOpenChoice::new(&qp, vec![ChoiceParam::Ideal(1)]).unwrap();
        assert_eq!(
            generalized_index(&qp, &c0, &c1).unwrap(),
            factorize(7, 1).unwrap()
        );
        assert_eq!(
            generalized_index(&qp, &c1, &c0).unwrap(),
            factorize(1, 7).unwrap()
        );
    }

    /// Subgroups of Z/n as explicit element sets.
    fn subgroup_of_order(n: u64, d: u64) -> BTreeSet<u64> {
        let step = n / d;
        (0..d).map(|k| k * step).collect()
    }

    /// `[H : H cap H'] / [H' : H cap H']` by counting cosets.
    fn brute_force_index(n: u64, d: u64, dprime: u64) -> (u64, u64) {
        let h = subgroup_of_order(n, d);
        let hp = subgroup_of_order(n, dprime);
        let meet: BTreeSet<u64> = h.intersection(&hp).copied().collect();
        let cosets = |g: &BTreeSet<u64>| -> usize {
            let mut seen = BTreeSet::new();
            for x in g {
                let coset: BTreeSet<u64> = meet.iter().map(|m| (x + m) % n).collect();
                seen.insert(coset);
            }
            seen.len()
        };
        (cosets(&h) as u64, cosets(&hp) as u64)
    }

    #[test]
    fn cyclic_index_matches_coset_enumeration() {
        let (num, den) = brute_force_index(12, 6, 4);
        assert_eq!((num, den), (3, 2));
        let z12 = e(&[(Atom::Cyclic(12), 1)]);
        let c = CompactOpenChoice::new(&z12, vec![ChoiceParam::Divisor(6)]).unwrap();
        let cp = CompactOpenChoice::new(&z12, vec![ChoiceParam::Divisor(4)]).unwrap();
        assert_eq!(
            generalized_index(&z12, &c, &cp).unwrap(),
            factorize(3, 2).unwrap()
        );

        for n in 2..=36u64 {
            let z = e(&[(Atom::Cyclic(n), 1)]);
            for d in divisors(n) {
                for dp in divisors(n) {
                    let (num, den) = brute_force_index(n, d, dp);
                    let c = CompactOpenChoice::new(&z, vec![ChoiceParam::Divisor(d)]).unwrap();
                    let cp = CompactOpenChoice::new(&z, vec![ChoiceParam::Divisor(dp)]).unwrap();
                    assert_eq!(
                        generalized_index(&z, &c, &cp).unwrap(),
                        factorize(num, den).unwrap(),
                        "n={n} d={d} d'={dp}"
                    );
                }
            }
        }
    }

    #[test]
    fn nested_index_is_literal_index() {
        let zp = e(&[(Atom::IntegerRing(3), 1)]);
        let c = CompactOpenChoice::new(&zp, vec![ChoiceParam::Depth(1)]).unwrap();
        let cp = CompactOpenChoice::new(&zp, vec![ChoiceParam::Depth(4)]).unwrap();
        assert_eq!(
            generalized_index(&zp, &c, &cp).unwrap(),
            factorize(27, 1).unwrap()
        );
        let pr = e(&[(Atom::Prufer(4), 1)]);
        let c = CompactOpenChoice::new(&pr, vec![ChoiceParam::Torsion(3)]).unwrap();
        let cp = CompactOpenChoice::new(&pr, vec![ChoiceParam::Torsion(1)]).unwrap();
        assert_eq!(
            generalized_index(&pr, &c, &cp).unwrap(),
            factorize(16, 1).unwrap()
        );
    }

    #[test]
    fn quotient_examples() {
        let qp = e(&[(Atom::LocalField(5), 1)]);
        let c = CompactOpenChoice::canonical(&qp).unwrap();
        assert_eq!(quotient_by(&qp, &c).unwrap(), e(&[(Atom::Prufer(5), 1)]));

        let zp = e(&[(Atom::IntegerRing(5), 1)]);
        let c = CompactOpenChoice::new(&zp, vec![ChoiceParam::Depth(2)]).unwrap();
        assert_eq!(quotient_by(&zp, &c).unwrap(), e(&[(Atom::Cyclic(25), 1)]));

        let t = e(&[(Atom::Circle, 1)]);
        let c = CompactOpenChoice::canonical(&t).unwrap();
        assert!(quotient_by(&t, &c).unwrap().is_zero());

        let fq = e(&[(Atom::IntegerRing(4), 1)]);
        let c = CompactOpenChoice::new(&fq, vec![ChoiceParam::Depth(2)]).unwrap();
        assert_eq!(quotient_by(&fq, &c).unwrap(), e(&[(Atom::Cyclic(2), 4)]));
    }

    #[test]
    fn real_lines_have_no_choice() {
        let r = e(&[(Atom::RealLine, 1)]);
        assert!(matches!(
            CompactOpenChoice::canonical(&r),
            Err(crate::Error::Unsupported(_))
        ));
        assert!(matches!(
            CompactOpenChoice::new(&r, vec![ChoiceParam::Fixed]),
            Err(crate::Error::Unsupported(_))
        ));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let z12 = e(&[(Atom::Cyclic(12), 1)]);
        assert!(CompactOpenChoice::new(&z12, vec![ChoiceParam::Divisor(5)]).is_err());
        assert!(CompactOpenChoice::new(&z12, vec![ChoiceParam::Ideal(0)]).is_err());
        assert!(CompactOpenChoice::new(&z12, vec![]).is_err());
    }

    pub(crate) fn arb_atom() -> impl Strategy<Value = Atom> {
        let q = prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]);
        prop_oneof![
            Just(Atom::RealLine),
            q.clone().prop_map(Atom::LocalField),
            q.clone().prop_map(Atom::IntegerRing),
            q.prop_map(Atom::Prufer),
            Just(Atom::Integers),
            Just(Atom::Circle),
            (1u64..40).prop_map(Atom::Cyclic),
            Just(Atom::Blackbox("Rd".into())),
        ]
    }

    fn arb_choice_for(expr: &GroupExpr) -> impl Strategy<Value = CompactOpenChoice> {
        let strategies: Vec<BoxedStrategy<ChoiceParam>> = expr
            .occurrences()
            .map(|a| match a {
                Atom::LocalField(_) => (-3i64..=3).prop_map(ChoiceParam::Ideal).boxed(),
                Atom::IntegerRing(_) => (0u32..=3).prop_map(ChoiceParam::Depth).boxed(),
                Atom::Prufer(_) => (0u32..=3).prop_map(ChoiceParam::Torsion).boxed(),
                Atom::Cyclic(n) => prop::sample::select(divisors(*n))
                    .prop_map(ChoiceParam::Divisor)
                    .boxed(),
                _ => Just(ChoiceParam::Fixed).boxed(),
            })
            .collect();
        strategies.prop_map(|params| CompactOpenChoice { params })
    }

    fn arb_vf_expr() -> impl Strategy<Value = GroupExpr> {
        proptest::collection::vec(arb_atom(), 0..5).prop_map(|atoms| {
            sum_of(
                &atoms
                    .into_iter()
                    .filter(|a| *a != Atom::RealLine)
                    .collect::<Vec<_>>(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(atoms in proptest::collection::vec(arb_atom(), 0..8)) {
            let x = sum_of(&atoms).unwrap();
            prop_assert_eq!(normalize(&x), x.clone());
            prop_assert_eq!(classify(&normalize(&x)), classify(&x));
        }

        #[test]
        fn cocycle_identity(
            (x, c1, c2, c3) in arb_vf_expr().prop_flat_map(|x| {
                let s = (arb_choice_for(&x), arb_choice_for(&x), arb_choice_for(&x));
                (Just(x), s.0, s.1, s.2)
            })
        ) {
            prop_assert!(generalized_index(&x, &c1, &c1).unwrap().is_one());
            let a = generalized_index(&x, &c1, &c2).unwrap();
            let b = generalized_index(&x, &c2, &c3).unwrap();
            prop_assert_eq!(a.mul(&b), generalized_index(&x, &c1, &c3).unwrap());
            prop_assert!(a.mul(&generalized_index(&x, &c2, &c1).unwrap()).is_one());
        }

        #[test]
        fn decomposition_pieces_are_compact_and_discrete(x in arb_vf_expr()) {
            let d = structure_decompose(&x).unwrap();
            let c = subgroup_expr(&d.nonreal, &d.compact_open).unwrap();
            prop_assert!(classify(&c).compact);
            prop_assert!(classify(&d.discrete).discrete);
        }

        #[test]
        fn tower_pieces_fit_together(
            (x, c1, c2) in arb_vf_expr().prop_flat_map(|x| {
                let s = (arb_choice_for(&x), arb_choice_for(&x));
                (Just(x), s.0, s.1)
            })
        ) {
            // make a nested pair from two arbitrary choices: inner = deeper of each
            let inner: Vec<ChoiceParam> = c1.params.iter().zip(&c2.params).map(|(a, b)| match (a, b) {
                (ChoiceParam::Ideal(p), ChoiceParam::Ideal(q)) => ChoiceParam::Ideal((*p).max(*q)),
                (ChoiceParam::Depth(p), ChoiceParam::Depth(q)) => ChoiceParam::Depth((*p).max(*q)),
                (ChoiceParam::Torsion(p), ChoiceParam::Torsion(q)) => ChoiceParam::Torsion((*p).min(*q)),
                (ChoiceParam::Divisor(p), ChoiceParam::Divisor(q)) => ChoiceParam::Divisor(num_integer::gcd(*p, *q)),
                _ => ChoiceParam::Fixed,
            }).collect();
            let inner = CompactOpenChoice::new(&x, inner).unwrap();
            let (sub, sub_choice) = relative_subgroup(&x, &c1, &inner).unwrap();
            let (quot, quot_choice) = relative_quotient(&x, &c1, &inner).unwrap();
            prop_assert_eq!(subgroup_expr(&sub, &sub_choice).unwrap(), subgroup_expr(&x, &inner).unwrap());
            prop_assert_eq!(quotient_by(&quot, &quot_choice).unwrap(), quotient_by(&x, &c1).unwrap());
            prop_assert_eq!(quotient_by(&sub, &sub_choice).unwrap(), subgroup_expr(&quot, &quot_choice).unwrap());
        }
    }
}

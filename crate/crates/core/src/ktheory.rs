//! K_1 classes of automorphisms and K_0 classes of finite abelian groups.
//!
//! Both land in the free abelian group on the primes, written additively
//! here and identified with the positive rationals by prime factorization.

use crate::arith::factor_u64;
use crate::error::{bail, Result};
use crate::lca::{Atom, GroupExpr};
use crate::morphism::Morphism;
use crate::scalar::{PositiveReal, PrimeExponentVector};
use crate::torsor::{basechange, Base, TorsorElement};

pub type KClass = PrimeExponentVector;

/// The class of an automorphism of a vector-free group.
pub fn k1_class(f: &Morphism) -> Result<KClass> {
    if !f.source().is_vector_free() {
        bail!(Domain, "{} is not vector-free", f.source());
    }
    let m = f.module()?;
    if !m.is_rational() {
        bail!(
            Invariant,
            "automorphism {f} of a vector-free group has irrational module {m}"
        );
    }
    Ok(m.rational_part().clone())
}

/// The class of a finite abelian group: its composition length at each prime.
pub fn k0_class(g: &GroupExpr) -> Result<KClass> {
    let mut out = KClass::one();
    for (atom, k) in g.atoms() {
        let Atom::Cyclic(n) = atom else {
            bail!(Domain, "{atom} is not finite");
        };
        for (p, e) in factor_u64(*n) {
            out = out.mul(&KClass::prime_power(p, e as i64 * *k as i64));
        }
    }
    Ok(out)
}

/// The K_1 class read in the rational torsor, moved to the real one.
pub fn k1_torsor_action(f: &Morphism) -> Result<PositiveReal> {
    let rational = TorsorElement::new(Base::Rational, k1_class(f)?.into())?;
    Ok(basechange(&rational)?.scale().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lca::sum_of;
    use crate::linalg::Scalar;
    use crate::morphism::compose;
    use crate::sequence::cyclic_sequences;

    #[test]
    fn k1_examples() {
        for p in [2u64, 3, 5, 7, 11] {
            let x = sum_of(&[Atom::LocalField(p)]).unwrap();
            let f = Morphism::scalar(&x, Scalar::integer(p as i64)).unwrap();
            assert_eq!(k1_class(&f).unwrap(), KClass::prime_power(p, -1));
        }
        let x = sum_of(&[Atom::LocalField(5), Atom::LocalField(3)]).unwrap();
        let f = Morphism::scalar(&x, Scalar::integer(5)).unwrap();
        assert_eq!(k1_class(&f).unwrap(), KClass::prime_power(5, -1));
        assert!(k1_class(&Morphism::identity(&x)).unwrap().is_one());
        let r = sum_of(&[Atom::RealLine]).unwrap();
        assert!(k1_class(&Morphism::identity(&r)).is_err());
    }

    #[test]
    fn k1_is_additive_and_matches_module() {
        let x = sum_of(&[Atom::LocalField(2), Atom::LocalField(3), Atom::Cyclic(5)]).unwrap();
        let scalars = [1i64, 2, 3, 6, -12];
        for a in scalars {
            for b in scalars {
                let f = Morphism::scalar(&x, Scalar::integer(a)).unwrap();
                let g = Morphism::scalar(&x, Scalar::integer(b)).unwrap();
                let gf = compose(&g, &f).unwrap();
                assert_eq!(
                    k1_class(&gf).unwrap(),
                    k1_class(&g).unwrap().mul(&k1_class(&f).unwrap())
                );
                assert_eq!(k1_torsor_action(&f).unwrap(), f.module().unwrap());
            }
        }
    }

    #[test]
    fn k0_examples() {
        let z12 = sum_of(&[Atom::Cyclic(12)]).unwrap();
        assert_eq!(
            k0_class(&z12).unwrap(),
            KClass::from_pairs([(2, 2), (3, 1)]).unwrap()
        );
        let z5 = sum_of(&[Atom::Cyclic(5)]).unwrap();
        assert_eq!(k0_class(&z5).unwrap(), KClass::prime_power(5, 1));
        assert!(k0_class(&GroupExpr::zero()).unwrap().is_one());
        assert!(k0_class(&sum_of(&[Atom::Integers]).unwrap()).is_err());
    }

    #[test]
    fn k0_is_additive_on_sequences() {
        for n in 1..=60u64 {
            for s in cyclic_sequences(n).unwrap() {
                let total = k0_class(s.total()).unwrap();
                let parts = k0_class(s.sub()).unwrap().mul(&k0_class(s.quot()).unwrap());
                assert_eq!(total, parts, "{s}");
            }
        }
    }
}

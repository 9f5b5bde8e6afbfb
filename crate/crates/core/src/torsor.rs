//! Trivialized torsors over the positive rationals and the positive reals.
//!
//! Every torsor is isomorphic to the trivial one, so an element is stored as
//! its coordinate relative to a fixed trivialization. The Picard-groupoid
//! structure then becomes arithmetic on coordinates.

use core::fmt;

use crate::error::{bail, Result};
use crate::scalar::PositiveReal;

/// Structure group of a torsor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    /// Positive rationals.
    Rational,
    /// Positive reals.
    Real,
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Base::Rational => "Q>0",
            Base::Real => "R>0",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsorElement {
    base: Base,
    scale: PositiveReal,
}

impl TorsorElement {
    pub fn new(base: Base, scale: PositiveReal) -> Result<Self> {
        if base == Base::Rational && !scale.is_rational() {
            bail!(
                Domain,
                "a rational torsor cannot carry the symbolic coordinate {scale}"
            );
        }
        Ok(Self { base, scale })
    }

    /// The distinguished element of the trivial torsor.
    pub fn unit(base: Base) -> Self {
        Self {
            base,
            scale: PositiveReal::one(),
        }
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn scale(&self) -> &PositiveReal {
        &self.scale
    }

    /// Left action `a . x`.
    pub fn act(&self, a: &PositiveReal) -> Result<Self> {
        Self::new(self.base, a.mul(&self.scale))
    }

    fn same_base(&self, other: &Self, op: &str) -> Result<()> {
        if self.base != other.base {
            bail!(
                Type,
                "{op} of a {} torsor with a {} torsor",
                self.base,
                other.base
            );
        }
        Ok(())
    }
}

/// `x (x) y`: the class of the pair, with coordinate `x.scale * y.scale`.
pub fn torsor_tensor(x: &TorsorElement, y: &TorsorElement) -> Result<TorsorElement> {
    x.same_base(y, "tensor")?;
    Ok(TorsorElement {
        base: x.base,
        scale: x.scale.mul(&y.scale),
    })
}

/// The unique `a` with `a . x = xprime`.
pub fn torsor_contract(xprime: &TorsorElement, x: &TorsorElement) -> Result<PositiveReal> {
    xprime.same_base(x, "contraction")?;
    Ok(xprime.scale.div(&x.scale))
}

/// Extension of structure group along the inclusion of the rationals into the reals.
pub fn basechange(x: &TorsorElement) -> Result<TorsorElement> {
    if x.base != Base::Rational {
        bail!(Domain, "basechange expects a rational torsor element");
    }
    Ok(TorsorElement {
        base: Base::Real,
        scale: x.scale.clone(),
    })
}

/// A formal pair in `X (x) X` before passing to the quotient.
struct Pair<'a> {
    left: &'a TorsorElement,
    right: &'a TorsorElement,
}

impl<'a> Pair<'a> {
    fn swap(self) -> Self {
        Pair {
            left: self.right,
            right: self.left,
        }
    }

    fn class(&self) -> Result<TorsorElement> {
        torsor_tensor(self.left, self.right)
    }
}

/// The signature of `x`: apply the self-symmetry to `x (x) x`, then contract
/// against `x (x) x` again. For torsor groupoids the symmetry swaps the pair,
/// so the result is always `1`.
pub fn signature_check(x: &TorsorElement) -> PositiveReal {
    let pair = Pair { left: x, right: x };
    let before = pair.class().expect("same base");
    let after = pair.swap().class().expect("same base");
    torsor_contract(&after, &before).expect("same base")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::factorize;

    fn q(n: u64, d: u64) -> TorsorElement {
        TorsorElement::new(Base::Rational, factorize(n, d).unwrap().into()).unwrap()
    }

    fn r(scale: PositiveReal) -> TorsorElement {
        TorsorElement::new(Base::Real, scale).unwrap()
    }

    fn c() -> PositiveReal {
        PositiveReal::symbol("c")
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(torsor_tensor(&q(2, 1), &q(3, 1)).unwrap(), q(6, 1));
        let x = q(7, 4);
        assert_eq!(
            torsor_tensor(&x, &TorsorElement::unit(Base::Rational)).unwrap(),
            x
        );
        assert_eq!(
            torsor_tensor(&r(c()), &r(c())).unwrap(),
            r(PositiveReal::symbol_power("c", 2))
        );
    }

    #[test]
    fn tensor_rejects_mixed_bases() {
        let err = torsor_tensor(&q(2, 1), &r(PositiveReal::one())).unwrap_err();
        assert!(matches!(err, crate::Error::Type(_)));
        assert!(torsor_contract(&q(2, 1), &r(PositiveReal::one())).is_err());
    }

    #[test]
    fn rational_base_refuses_symbols() {
        assert!(TorsorElement::new(Base::Rational, c()).is_err());
    }

    #[test]
    fn contract_examples() {
        assert_eq!(
            torsor_contract(&q(6, 1), &q(2, 1)).unwrap(),
            factorize(3, 1).unwrap().into()
        );
        let x = q(11, 3);
        assert!(torsor_contract(&x, &x).unwrap().is_one());
        let five: PositiveReal = factorize(5, 1).unwrap().into();
        assert_eq!(torsor_contract(&r(c().mul(&five)), &r(five)).unwrap(), c());
    }

    #[test]
    fn basechange_examples() {
        let x = basechange(&q(3, 2)).unwrap();
        assert_eq!(x.base(), Base::Real);
        assert_eq!(x.scale(), q(3, 2).scale());

        let lhs = basechange(&torsor_tensor(&q(2, 1), &q(5, 1)).unwrap()).unwrap();
        let rhs = torsor_tensor(
            &basechange(&q(2, 1)).unwrap(),
            &basechange(&q(5, 1)).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, r(factorize(10, 1).unwrap().into()));

        assert_eq!(
            basechange(&q(1, 1)).unwrap(),
            TorsorElement::unit(Base::Real)
        );
        assert!(matches!(basechange(&r(c())), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn signature_examples() {
        assert!(signature_check(&q(7, 1)).is_one());
        assert!(signature_check(&TorsorElement::unit(Base::Rational)).is_one());
        assert!(signature_check(&r(c())).is_one());
    }

    #[test]
    fn action_is_compatible_with_tensor() {
        let a: PositiveReal = factorize(9, 2).unwrap().into();
        let x = q(3, 5);
        let y = q(7, 1);
        let lhs = torsor_tensor(&x.act(&a).unwrap(), &y).unwrap();
        let rhs = torsor_tensor(&x, &y).unwrap().act(&a).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(torsor_contract(&x.act(&a).unwrap(), &x).unwrap(), a);
    }
}

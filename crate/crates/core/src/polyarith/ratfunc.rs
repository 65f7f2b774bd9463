//! Rational functions as canonicalised numerator/denominator pairs.

use num_traits::Signed;

use super::{MultiPoly, PolyError, Rational, VarSet};

/// Quotient of two polynomials over one variable set.
///
/// Canonical form: the joint coefficient content of numerator and denominator
/// is 1 (all coefficients integer, jointly coprime) and the denominator's
/// graded-lex-leading coefficient is positive. No polynomial GCD cancellation
/// is performed beyond that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, PolyError> {
        if num.vars() != den.vars() {
            return Err(PolyError::VarMismatch);
        }
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        Ok(RationalFunction { num, den }.normalized())
    }

    pub fn from_poly(num: MultiPoly) -> Self {
        let den = MultiPoly::one(num.vars().clone());
        RationalFunction { num, den }.normalized()
    }

    pub fn zero(vars: VarSet) -> Self {
        RationalFunction {
            num: MultiPoly::zero(vars.clone()),
            den: MultiPoly::one(vars),
        }
    }

    pub fn constant(vars: VarSet, value: Rational) -> Self {
        RationalFunction::from_poly(MultiPoly::constant(vars, value))
    }

    fn normalized(self) -> Self {
        let RationalFunction { num, den } = self;
        // Joint content over both parts; sign fixed by the denominator's
        // leading coefficient.
        let (den_content, _) = den.content_primitive().expect("nonzero denominator");
        let content = if num.is_zero() {
            den_content.clone()
        } else {
            let (num_content, _) = num.content_primitive().expect("nonzero numerator");
            joint_content(&num_content, &den_content)
        };
        let mut scale = content.recip();
        if den
            .leading_term()
            .map(|(_, c)| (c * &scale).is_negative())
            .unwrap_or(false)
        {
            scale = -scale;
        }
        RationalFunction {
            num: num.scale(&scale),
            den: den.scale(&scale),
        }
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The underlying polynomial when the denominator is 1.
    pub fn as_poly(&self) -> Option<&MultiPoly> {
        if self.den == MultiPoly::one(self.den.vars().clone()) {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        let num = self
            .num
            .mul(&other.den)?
            .add(&other.num.mul(&self.den)?)?;
        RationalFunction::new(num, self.den.mul(&other.den)?)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        let num = self
            .num
            .mul(&other.den)?
            .sub(&other.num.mul(&self.den)?)?;
        RationalFunction::new(num, self.den.mul(&other.den)?)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        RationalFunction::new(self.num.mul(&other.num)?, self.den.mul(&other.den)?)
    }

    pub fn recip(&self) -> Result<Self, PolyError> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    /// Signed power; a negative exponent inverts first.
    pub fn pow_signed(&self, e: i64) -> Result<Self, PolyError> {
        if e == 0 {
            return Ok(RationalFunction::from_poly(MultiPoly::one(
                self.num.vars().clone(),
            )));
        }
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).map_err(|_| PolyError::ExponentOverflow)?;
        RationalFunction::new(base.num.pow(k)?, base.den.pow(k)?)
    }
}

fn joint_content(a: &Rational, b: &Rational) -> Rational {
    use num_integer::Integer as _;
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rational::new(num, den)
}

impl std::fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == MultiPoly::one(self.den.vars().clone()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyarith::{Integer, VarSet};
    use num_traits::Zero;

    fn q(n: i64) -> Rational {
        Rational::from_integer(Integer::from(n))
    }

    #[test]
    fn canonical_form_scales_jointly() {
        let vs = VarSet::new(vec!["q"]);
        let x = MultiPoly::variable(vs.clone(), 0);
        // (q/2) / (-q + 1) normalises to integer coefficients, positive
        // leading denominator coefficient
        let half = Rational::new(Integer::from(1), Integer::from(2));
        let rf = RationalFunction::new(
            x.scale(&half),
            MultiPoly::one(vs.clone()).sub(&x).unwrap(),
        )
        .unwrap();
        // denominator leading term is -q --> flip: den = q - 1? no: den 1 - q
        // has leading monomial q with coefficient -1, so the sign flips.
        let den = rf.denominator();
        assert!(den.leading_term().unwrap().1 > &Rational::zero());
        // joint content 1: coefficients are integers with gcd 1
        let coeffs: Vec<Rational> = rf
            .numerator()
            .terms()
            .chain(rf.denominator().terms())
            .map(|(_, c)| c.clone())
            .collect();
        for c in &coeffs {
            assert!(c.denom() == &Integer::from(1));
        }
    }

    #[test]
    fn zero_denominator_rejected() {
        let vs = VarSet::new(vec!["q"]);
        let err = RationalFunction::new(
            MultiPoly::one(vs.clone()),
            MultiPoly::zero(vs),
        );
        assert_eq!(err.unwrap_err(), PolyError::ZeroDenominator);
    }

    #[test]
    fn arithmetic_round_trip() {
        let vs = VarSet::new(vec!["q"]);
        let x = RationalFunction::from_poly(MultiPoly::variable(vs.clone(), 0));
        let one = RationalFunction::constant(vs.clone(), q(1));
        // q/(q+1) * (q+1)/q == 1
        let a = RationalFunction::new(
            x.numerator().clone(),
            x.numerator().add(&MultiPoly::one(vs.clone())).unwrap(),
        )
        .unwrap();
        let prod = a.mul(&a.recip().unwrap()).unwrap();
        // no GCD cancellation: compare as cross-multiplied equality
        assert_eq!(
            prod.numerator().mul(one.denominator()).unwrap(),
            one.numerator().mul(prod.denominator()).unwrap()
        );
    }
}

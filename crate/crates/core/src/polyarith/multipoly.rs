//! Sparse multivariate (Laurent) polynomials over Q.

use std::collections::BTreeMap;

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use super::textform;
use super::{ExponentVector, Integer, PolyError, Rational, RationalFunction, VarId, VarSet};

/// Sparse term map monomial -> nonzero rational coefficient over a declared
/// variable set. Two polynomials are equal iff their variable sets and term
/// maps are equal; iteration follows the graded-lex monomial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: VarSet,
    terms: BTreeMap<ExponentVector, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: VarSet) -> Self {
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: VarSet) -> Self {
        MultiPoly::constant(vars, Rational::one())
    }

    pub fn constant(vars: VarSet, value: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(ExponentVector::constant(), value);
        }
        MultiPoly { vars, terms }
    }

    pub fn constant_int(vars: VarSet, value: i64) -> Self {
        MultiPoly::constant(vars, Rational::from_integer(Integer::from(value)))
    }

    pub fn variable(vars: VarSet, id: VarId) -> Self {
        assert!(id < vars.len(), "variable id out of range");
        MultiPoly::monomial(vars, ExponentVector::unit(id), Rational::one())
    }

    pub fn monomial(vars: VarSet, monomial: ExponentVector, coeff: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(monomial, coeff);
        }
        MultiPoly { vars, terms }
    }

    pub fn from_terms<I>(vars: VarSet, iter: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, Rational)>,
    {
        let mut p = MultiPoly::zero(vars);
        for (m, c) in iter {
            p.accumulate(m, c);
        }
        p
    }

    fn accumulate(&mut self, monomial: ExponentVector, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, monomial: &ExponentVector) -> Rational {
        self.terms.get(monomial).cloned().unwrap_or_else(Rational::zero)
    }

    /// Greatest monomial and its coefficient (None for the zero polynomial).
    pub fn leading_term(&self) -> Option<(&ExponentVector, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Maximum total degree over the support, or 0 for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Largest exponent of `var` over the support (0 for the zero polynomial).
    pub fn degree_in(&self, var: VarId) -> i64 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    fn check_vars(&self, other: &Self) -> Result<(), PolyError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::VarMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.accumulate(ma.mul(mb)?, ca * cb);
            }
        }
        Ok(out)
    }

    /// Multiply by a single term, in place of building a one-term polynomial.
    pub fn mul_term(&self, monomial: &ExponentVector, coeff: &Rational) -> Result<Self, PolyError> {
        if coeff.is_zero() {
            return Ok(MultiPoly::zero(self.vars.clone()));
        }
        let mut out = MultiPoly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            out.accumulate(m.mul(monomial)?, c * coeff);
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, PolyError> {
        let mut out = MultiPoly::one(self.vars.clone());
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Exact value at a point given as one rational per variable.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::UnassignedVariable(format!(
                "expected {} values, got {}",
                self.vars.len(),
                point.len()
            )));
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in m.iter() {
                if point[v].is_zero() && e < 0 {
                    return Err(PolyError::ZeroDenominator);
                }
                term *= rational_pow(&point[v], e);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Compose with rational functions: every variable must be assigned, and
    /// the assignments must share one variable set.
    pub fn substitute(&self, assignment: &[RationalFunction]) -> Result<RationalFunction, PolyError> {
        if assignment.len() != self.vars.len() {
            return Err(PolyError::UnassignedVariable(format!(
                "expected {} assignments, got {}",
                self.vars.len(),
                assignment.len()
            )));
        }
        let target_vars = match assignment.first() {
            Some(rf) => rf.numerator().vars().clone(),
            // No variables at all: the constant embeds into an empty var set.
            None => VarSet::new(Vec::<String>::new()),
        };
        let mut acc = RationalFunction::zero(target_vars.clone());
        for (m, c) in &self.terms {
            let mut term = RationalFunction::constant(target_vars.clone(), c.clone());
            for (v, e) in m.iter() {
                let base = &assignment[v];
                let pow = base.pow_signed(e)?;
                term = term.mul(&pow)?;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// Regroup as sum over monomials in `in_vars` of polynomial coefficients
    /// in the remaining variables; the parts reconstruct the input exactly.
    pub fn collect(&self, in_vars: &[VarId]) -> BTreeMap<ExponentVector, MultiPoly> {
        let mut out: BTreeMap<ExponentVector, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside) = m.split(in_vars);
            out.entry(inside)
                .or_insert_with(|| MultiPoly::zero(self.vars.clone()))
                .accumulate(outside, c.clone());
        }
        out
    }

    /// Factor `p = content * primitive` with primitive having coprime integer
    /// coefficients and a positive graded-lex-leading coefficient.
    pub fn content_primitive(&self) -> Result<(Rational, MultiPoly), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut num_gcd = Integer::zero();
        let mut den_lcm = Integer::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = Rational::new(num_gcd, den_lcm);
        let leading = self.leading_term().expect("nonzero").1;
        if leading.is_negative() {
            content = -content;
        }
        let inv = content.recip();
        let primitive = self.scale(&inv);
        Ok((content, primitive))
    }

    /// Primitive part alone (positive leading coefficient, integer coprime
    /// coefficients).
    pub fn primitive_part(&self) -> Result<MultiPoly, PolyError> {
        Ok(self.content_primitive()?.1)
    }
}

/// `base^e` for signed `e`; negative exponents require a nonzero base
/// (checked by the caller for the zero case).
fn rational_pow(base: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let mut acc = Rational::one();
    let mut b = if e < 0 { base.recip() } else { base.clone() };
    let mut k = e.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &b;
        }
        k >>= 1;
        if k > 0 {
            b = &b * &b;
        }
    }
    acc
}

impl std::fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", textform::poly_to_string(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(Integer::from(n))
    }

    fn vars2() -> VarSet {
        VarSet::new(vec!["x1", "x2"])
    }

    fn x(vars: &VarSet, id: VarId) -> MultiPoly {
        MultiPoly::variable(vars.clone(), id)
    }

    #[test]
    fn add_cancels_like_terms() {
        let vs = vars2();
        let a = x(&vs, 0).add(&x(&vs, 1)).unwrap(); // x1 + x2
        let b = x(&vs, 0).sub(&x(&vs, 1)).unwrap(); // x1 - x2
        let sum = a.add(&b).unwrap();
        assert_eq!(sum, x(&vs, 0).scale(&q(2)));
    }

    #[test]
    fn add_identity_and_like_terms() {
        let vs = vars2();
        let p = x(&vs, 0).pow(2).unwrap();
        assert_eq!(p.add(&MultiPoly::zero(vs.clone())).unwrap(), p);
        let three = p.add(&p.scale(&q(2))).unwrap();
        assert_eq!(three, p.scale(&q(3)));
    }

    #[test]
    fn mul_difference_of_squares() {
        let vs = vars2();
        let a = x(&vs, 0).add(&x(&vs, 1)).unwrap();
        let b = x(&vs, 0).sub(&x(&vs, 1)).unwrap();
        let prod = a.mul(&b).unwrap();
        let expect = x(&vs, 0)
            .pow(2)
            .unwrap()
            .sub(&x(&vs, 1).pow(2).unwrap())
            .unwrap();
        assert_eq!(prod, expect);
        assert_eq!(prod.mul(&MultiPoly::one(vs)).unwrap(), prod);
    }

    #[test]
    fn plain_monomial_square_stays_unreduced() {
        let vs = VarSet::new(vec!["alpha"]);
        let alpha = x(&vs, 0);
        assert_eq!(alpha.mul(&alpha).unwrap(), alpha.pow(2).unwrap());
    }

    #[test]
    fn var_mismatch_rejected() {
        let a = MultiPoly::one(vars2());
        let b = MultiPoly::one(VarSet::new(vec!["y"]));
        assert_eq!(a.add(&b), Err(PolyError::VarMismatch));
        assert_eq!(a.mul(&b), Err(PolyError::VarMismatch));
    }

    #[test]
    fn eval_pythagorean_point() {
        let vs = VarSet::new(vec!["x1", "x2", "x3"]);
        // x3^2 - x2^2 - x1^2 at (3,4,5) -> 0
        let p = x(&vs, 2)
            .pow(2)
            .unwrap()
            .sub(&x(&vs, 1).pow(2).unwrap())
            .unwrap()
            .sub(&x(&vs, 0).pow(2).unwrap())
            .unwrap();
        assert_eq!(p.eval(&[q(3), q(4), q(5)]).unwrap(), q(0));
        // at all-zeros -> constant term
        let pc = p.add(&MultiPoly::constant(vs.clone(), q(7))).unwrap();
        assert_eq!(pc.eval(&[q(0), q(0), q(0)]).unwrap(), q(7));
        // inverse pair x1*x2 at (2/3, 3/2) -> 1
        let prod = x(&vs, 0).mul(&x(&vs, 1)).unwrap();
        let pt = [Rational::new(Integer::from(2), Integer::from(3)),
                  Rational::new(Integer::from(3), Integer::from(2)),
                  q(0)];
        assert_eq!(prod.eval(&pt).unwrap(), q(1));
    }

    #[test]
    fn substitute_pythagorean_parametrisation() {
        use crate::polyarith::textform::{parse_poly, parse_rational_function};
        let xs = VarSet::new(vec!["x1", "x2", "x3"]);
        let pq = VarSet::new(vec!["p", "q"]);
        let p = parse_poly("x3^2 - x2^2 - x1^2", &xs).unwrap();
        let assignment = vec![
            parse_rational_function("p^2 - q^2", &pq).unwrap(),
            parse_rational_function("2*p*q", &pq).unwrap(),
            parse_rational_function("p^2 + q^2", &pq).unwrap(),
        ];
        let composed = p.substitute(&assignment).unwrap();
        assert!(composed.is_zero());
    }

    #[test]
    fn substitute_identity_and_inverse_pair() {
        use crate::polyarith::textform::parse_rational_function;
        let xs = VarSet::new(vec!["x1", "x2"]);
        let qv = VarSet::new(vec!["q"]);
        let x1 = x(&xs, 0);
        let target = parse_rational_function("q/(q+1)", &qv).unwrap();
        let got = x1
            .substitute(&[target.clone(), RationalFunction::zero(qv.clone())])
            .unwrap();
        assert_eq!(got, target);

        let prod = x(&xs, 0).mul(&x(&xs, 1)).unwrap();
        let inv_pair = vec![
            parse_rational_function("1/q", &qv).unwrap(),
            parse_rational_function("q", &qv).unwrap(),
        ];
        let got = prod.substitute(&inv_pair).unwrap();
        let one = RationalFunction::constant(qv, q(1));
        // equality as rational functions (cross-multiplied; no GCD cancellation)
        assert_eq!(
            got.numerator().mul(one.denominator()).unwrap(),
            one.numerator().mul(got.denominator()).unwrap()
        );
    }

    #[test]
    fn collect_examples() {
        // collect(u*A + v*A, {A}) -> {A^1: u+v}
        let vs = VarSet::new(vec!["u", "v", "A", "B"]);
        let u = x(&vs, 0);
        let v = x(&vs, 1);
        let a = x(&vs, 2);
        let b = x(&vs, 3);
        let p = u.mul(&a).unwrap().add(&v.mul(&a).unwrap()).unwrap();
        let groups = p.collect(&[2]);
        assert_eq!(groups.len(), 1);
        let key = ExponentVector::unit(2);
        assert_eq!(groups[&key], u.add(&v).unwrap());

        // collect(uA + vB, {A,B}) -> {A: u, B: v}
        let p2 = u.mul(&a).unwrap().add(&v.mul(&b).unwrap()).unwrap();
        let groups2 = p2.collect(&[2, 3]);
        assert_eq!(groups2.len(), 2);
        assert_eq!(groups2[&ExponentVector::unit(2)], u);
        assert_eq!(groups2[&ExponentVector::unit(3)], v);

        // collect(3, {A}) -> {1: 3}
        let c3 = MultiPoly::constant(vs.clone(), q(3));
        let groups3 = c3.collect(&[2]);
        assert_eq!(groups3.len(), 1);
        assert_eq!(groups3[&ExponentVector::constant()], c3);
    }

    #[test]
    fn collect_reconstructs() {
        let vs = VarSet::new(vec!["u", "A"]);
        let u = x(&vs, 0);
        let a = x(&vs, 1);
        let p = u
            .pow(2)
            .unwrap()
            .mul(&a).unwrap()
            .add(&u.mul(&a.pow(3).unwrap()).unwrap()).unwrap()
            .add(&MultiPoly::constant(vs.clone(), q(5))).unwrap();
        let groups = p.collect(&[1]);
        let mut rebuilt = MultiPoly::zero(vs.clone());
        for (mono, coeff_poly) in &groups {
            rebuilt = rebuilt
                .add(&coeff_poly.mul_term(mono, &q(1)).unwrap())
                .unwrap();
        }
        assert_eq!(rebuilt, p);
    }

    #[test]
    fn content_primitive_examples() {
        let vs = vars2();
        // 6x1 + 4x2 -> (2, 3x1 + 2x2)
        let p = x(&vs, 0).scale(&q(6)).add(&x(&vs, 1).scale(&q(4))).unwrap();
        let (content, prim) = p.content_primitive().unwrap();
        assert_eq!(content, q(2));
        assert_eq!(prim, x(&vs, 0).scale(&q(3)).add(&x(&vs, 1).scale(&q(2))).unwrap());

        // (1/2)x1 -> (1/2, x1)
        let h = Rational::new(Integer::from(1), Integer::from(2));
        let p2 = x(&vs, 0).scale(&h);
        let (c2, prim2) = p2.content_primitive().unwrap();
        assert_eq!(c2, h);
        assert_eq!(prim2, x(&vs, 0));

        // -x1 -> (-1, x1)
        let p3 = x(&vs, 0).neg();
        let (c3, prim3) = p3.content_primitive().unwrap();
        assert_eq!(c3, -q(1));
        assert_eq!(prim3, x(&vs, 0));

        assert_eq!(
            MultiPoly::zero(vs).content_primitive(),
            Err(PolyError::ZeroPolynomial)
        );
    }
}

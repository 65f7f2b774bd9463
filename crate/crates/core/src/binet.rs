//! The quadratic Binet ring Q[alpha]/(alpha^2 - c*alpha + 1) over Laurent
//! auxiliary variables alpha^(n^a * b^n).
//!
//! For the order-2 family f(n) = c f(n-1) - f(n-2), f(0)=0, f(1)=1 with
//! |c| >= 3, Binet's formula gives f(n) = (alpha^n - alpha^(-n)) / (2*alpha - c)
//! where alpha is the larger characteristic root. Index shifts close over the
//! auxiliary variables (the n+1 window entry of alpha^(n^2) is
//! alpha^(n^2) * (alpha^n)^2 * alpha, and alpha^(2^(n+1)) = (alpha^(2^n))^2),
//! so every window entry a(n+j) = f(p(n+j)) becomes a rational expression in
//! finitely many auxiliary variables with the fixed denominator 2*alpha - c.
//!
//! Elements are kept in the unique normal form u + v*alpha: alpha^2 rewrites
//! to c*alpha - 1 and alpha^(-1) to c - alpha before storage; auxiliary
//! variables stay Laurent.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cfinite::{subseq_window, CFiniteSequence, ExpPolyIndex};
use crate::polyarith::{
    ExponentVector, Integer, MultiPoly, PolyError, Rational, VarSet,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BinetError {
    /// |c| <= 2 has repeated or root-of-unity characteristic roots; the
    /// Binet denominator degenerates.
    DegenerateParam(Integer),
    /// Numeric cross-check failed at window entry (n, j).
    NumericMismatch { n: i64, j: usize },
    Poly(PolyError),
}

impl std::fmt::Display for BinetError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BinetError::DegenerateParam(c) => {
                write!(f, "quadratic parameter c = {c} must satisfy |c| >= 3")
            }
            BinetError::NumericMismatch { n, j } => {
                write!(f, "window entry j = {j} disagrees with the sequence at n = {n}")
            }
            BinetError::Poly(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BinetError {}

impl From<PolyError> for BinetError {
    fn from(e: PolyError) -> Self {
        BinetError::Poly(e)
    }
}

/// The parameter c of f(n) = c f(n-1) - f(n-2), restricted to |c| >= 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadParam(Integer);

impl QuadParam {
    pub fn new(c: Integer) -> Result<Self, BinetError> {
        if c.abs() < Integer::from(3) {
            return Err(BinetError::DegenerateParam(c));
        }
        Ok(QuadParam(c))
    }

    pub fn value(&self) -> &Integer {
        &self.0
    }

    /// The sequence f(0)=0, f(1)=1, f(n) = c f(n-1) - f(n-2).
    pub fn sequence(&self) -> CFiniteSequence {
        CFiniteSequence::quad_family(&self.0)
    }
}

/// An auxiliary variable alpha^(n^pow * base^n); (pow, base) = (0, 1) is
/// alpha itself and is tracked separately inside [`QuadRingExpr`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AuxVar {
    pub pow: u32,
    pub base: u32,
}

impl AuxVar {
    pub fn new(pow: u32, base: u32) -> Self {
        assert!(
            !(pow == 0 && base == 1),
            "alpha itself is not an auxiliary variable"
        );
        AuxVar { pow, base }
    }

    /// Short display name echoing the usual hand notation: A, B, C for
    /// alpha^n, alpha^(n^2), alpha^(n^3); E, E3, ... for alpha^(2^n),
    /// alpha^(3^n); combined powers spell both parts out.
    pub fn name(&self) -> String {
        match (self.pow, self.base) {
            (1, 1) => "A".into(),
            (2, 1) => "B".into(),
            (3, 1) => "C".into(),
            (4, 1) => "D".into(),
            (p, 1) => format!("P{p}"),
            (0, 2) => "E".into(),
            (0, b) => format!("E{b}"),
            (p, b) => format!("P{p}E{b}"),
        }
    }
}

/// Auxiliary variables needed by every shift of every term of `p`:
/// {(i, b) : term (a, b) of p, 0 <= i <= a} minus alpha itself.
pub fn aux_vars_for(p: &ExpPolyIndex) -> Vec<AuxVar> {
    let mut vars = Vec::new();
    for t in p.terms() {
        for i in 0..=t.pow {
            if i == 0 && t.base == 1 {
                continue;
            }
            let v = AuxVar { pow: i, base: t.base };
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
    }
    vars.sort();
    vars
}

/// Ring context: the parameter c together with the auxiliary variable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadRing {
    c: Integer,
    aux: Vec<AuxVar>,
    vars: VarSet,
}

impl QuadRing {
    pub fn new(c: &QuadParam, aux: Vec<AuxVar>) -> Self {
        let vars = VarSet::new(aux.iter().map(|v| v.name()).collect::<Vec<_>>());
        QuadRing {
            c: c.value().clone(),
            aux,
            vars,
        }
    }

    pub fn c(&self) -> &Integer {
        &self.c
    }

    pub fn aux_vars(&self) -> &[AuxVar] {
        &self.aux
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn aux_index(&self, v: AuxVar) -> Option<usize> {
        self.aux.iter().position(|&a| a == v)
    }

    pub fn zero(&self) -> QuadRingExpr {
        QuadRingExpr {
            u: MultiPoly::zero(self.vars.clone()),
            v: MultiPoly::zero(self.vars.clone()),
        }
    }

    pub fn from_parts(&self, u: MultiPoly, v: MultiPoly) -> QuadRingExpr {
        QuadRingExpr { u, v }
    }

    /// The Binet denominator alpha - alpha^(-1) = 2*alpha - c.
    pub fn delta(&self) -> QuadRingExpr {
        QuadRingExpr {
            u: MultiPoly::constant(self.vars.clone(), Rational::from_integer(-self.c.clone())),
            v: MultiPoly::constant(self.vars.clone(), Rational::from_integer(Integer::from(2))),
        }
    }

    /// Product reduced to normal form:
    /// (u1 + v1 a)(u2 + v2 a) = (u1 u2 - v1 v2) + (u1 v2 + v1 u2 + c v1 v2) a.
    pub fn mul(&self, a: &QuadRingExpr, b: &QuadRingExpr) -> Result<QuadRingExpr, PolyError> {
        let uu = a.u.mul(&b.u)?;
        let vv = a.v.mul(&b.v)?;
        let uv = a.u.mul(&b.v)?;
        let vu = a.v.mul(&b.u)?;
        let c = Rational::from_integer(self.c.clone());
        Ok(QuadRingExpr {
            u: uu.sub(&vv)?,
            v: uv.add(&vu)?.add(&vv.scale(&c))?,
        })
    }

    pub fn pow(&self, a: &QuadRingExpr, k: u32) -> Result<QuadRingExpr, PolyError> {
        let mut out = QuadRingExpr {
            u: MultiPoly::one(self.vars.clone()),
            v: MultiPoly::zero(self.vars.clone()),
        };
        for _ in 0..k {
            out = self.mul(&out, a)?;
        }
        Ok(out)
    }

    /// Conjugation: alpha -> c - alpha, every auxiliary variable inverted.
    pub fn conj(&self, a: &QuadRingExpr) -> QuadRingExpr {
        let inv = |p: &MultiPoly| -> MultiPoly {
            MultiPoly::from_terms(
                self.vars.clone(),
                p.terms().map(|(m, c)| (m.inverse(), c.clone())),
            )
        };
        let ui = inv(&a.u);
        let vi = inv(&a.v);
        let c = Rational::from_integer(self.c.clone());
        QuadRingExpr {
            u: ui.add(&vi.scale(&c)).expect("same vars"),
            v: vi.neg(),
        }
    }

    /// alpha^e for e >= 0 as an integer pair (u, v) with alpha^e = u + v*alpha.
    pub fn alpha_pow(&self, e: &Integer) -> (Integer, Integer) {
        assert!(!e.is_negative());
        let mut result = (Integer::one(), Integer::zero());
        let base = (Integer::zero(), Integer::one());
        let mut sq = base;
        let nbits = e.bits();
        for bit in 0..nbits {
            if bit_of(e, bit) {
                result = quad_int_mul(&result, &sq, &self.c);
            }
            if bit + 1 < nbits {
                sq = quad_int_mul(&sq.clone(), &sq, &self.c);
            }
        }
        result
    }
}

fn bit_of(k: &Integer, bit: u64) -> bool {
    let (_, digits) = k.to_u64_digits();
    let idx = (bit / 64) as usize;
    idx < digits.len() && digits[idx] >> (bit % 64) & 1 == 1
}

fn quad_int_mul(a: &(Integer, Integer), b: &(Integer, Integer), c: &Integer) -> (Integer, Integer) {
    let uu = &a.0 * &b.0;
    let vv = &a.1 * &b.1;
    let uv = &a.0 * &b.1 + &a.1 * &b.0;
    (uu - &vv, uv + c * vv)
}

fn quad_int_conj(a: &(Integer, Integer), c: &Integer) -> (Integer, Integer) {
    (&a.0 + c * &a.1, -a.1.clone())
}

/// Normal-form element u + v*alpha with Laurent polynomial parts over the
/// auxiliary variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadRingExpr {
    u: MultiPoly,
    v: MultiPoly,
}

impl QuadRingExpr {
    pub fn u_part(&self) -> &MultiPoly {
        &self.u
    }

    pub fn v_part(&self) -> &MultiPoly {
        &self.v
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        Ok(QuadRingExpr {
            u: self.u.add(&other.u)?,
            v: self.v.add(&other.v)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        Ok(QuadRingExpr {
            u: self.u.sub(&other.u)?,
            v: self.v.sub(&other.v)?,
        })
    }

    pub fn scale(&self, k: &Rational) -> Self {
        QuadRingExpr {
            u: self.u.scale(k),
            v: self.v.scale(k),
        }
    }
}

impl std::fmt::Display for QuadRingExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) + ({})*alpha", self.u, self.v)
    }
}

/// Exponent assignment for alpha^(p(n+j)): a product of auxiliary-variable
/// powers times alpha^alpha_exp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftedPower {
    pub aux_exponents: BTreeMap<AuxVar, Integer>,
    pub alpha_exp: Integer,
}

fn binomial(a: u32, i: u32) -> Integer {
    let mut acc = Integer::one();
    for k in 0..i {
        acc = acc * Integer::from(a - k) / Integer::from(k + 1);
    }
    acc
}

/// Expand alpha^(p(n+j)) over the auxiliary variables at base index n:
/// each term coef * (n+j)^a * b^(n+j) contributes
/// coef * b^j * sum_i C(a,i) j^(a-i) * n^i * b^n.
pub fn shift_index(p: &ExpPolyIndex, j: u32) -> ShiftedPower {
    let mut aux: BTreeMap<AuxVar, Integer> = BTreeMap::new();
    let mut alpha_exp = Integer::zero();
    let jb = Integer::from(j);
    for t in p.terms() {
        let scale = &t.coef * Integer::from(t.base).pow(j);
        for i in 0..=t.pow {
            let weight = &scale * binomial(t.pow, i) * jb.pow(t.pow - i);
            if weight.is_zero() {
                continue;
            }
            if i == 0 && t.base == 1 {
                alpha_exp += weight;
            } else {
                let v = AuxVar { pow: i, base: t.base };
                let slot = aux.entry(v).or_insert_with(Integer::zero);
                *slot += weight;
                if slot.is_zero() {
                    aux.remove(&v);
                }
            }
        }
    }
    ShiftedPower {
        aux_exponents: aux,
        alpha_exp,
    }
}

/// Build alpha^(sign * p(n+j)) in normal form from a shifted exponent
/// assignment. The negative sign inverts every auxiliary exponent and sends
/// alpha^(-e0) through conjugation.
pub fn alpha_power(
    ring: &QuadRing,
    shifted: &ShiftedPower,
    negative: bool,
) -> Result<QuadRingExpr, BinetError> {
    let mut pairs = Vec::new();
    for (&av, e) in &shifted.aux_exponents {
        let id = ring
            .aux_index(av)
            .expect("auxiliary variable outside the ring");
        let e: i64 = e.to_i64().ok_or(PolyError::ExponentOverflow)?;
        pairs.push((id, if negative { -e } else { e }));
    }
    let mono = ExponentVector::from_pairs(pairs);
    let alpha = ring.alpha_pow(&shifted.alpha_exp);
    let (u0, v0) = if negative {
        quad_int_conj(&alpha, ring.c())
    } else {
        alpha
    };
    let u = MultiPoly::monomial(
        ring.vars().clone(),
        mono.clone(),
        Rational::from_integer(u0),
    );
    let v = MultiPoly::monomial(ring.vars().clone(), mono, Rational::from_integer(v0));
    Ok(ring.from_parts(u, v))
}

/// Symbolic window: numerators of a(n), ..., a(n+r) over the common
/// denominator 2*alpha - c.
#[derive(Debug, Clone)]
pub struct BinetWindow {
    ring: QuadRing,
    entries: Vec<QuadRingExpr>,
}

impl BinetWindow {
    pub fn ring(&self) -> &QuadRing {
        &self.ring
    }

    /// Numerators; entry j is alpha^(p(n+j)) - alpha^(-p(n+j)).
    pub fn entries(&self) -> &[QuadRingExpr] {
        &self.entries
    }

    pub fn arity(&self) -> usize {
        self.entries.len()
    }
}

/// Expressions (alpha^(p(n+j)) - alpha^(-p(n+j))) / (2*alpha - c) for
/// j = 0..=r, in normal form.
pub fn binet_window(
    c: &QuadParam,
    p: &ExpPolyIndex,
    r: usize,
) -> Result<BinetWindow, BinetError> {
    let ring = QuadRing::new(c, aux_vars_for(p));
    let mut entries = Vec::with_capacity(r + 1);
    for j in 0..=r {
        let shifted = shift_index(p, j as u32);
        let pos = alpha_power(&ring, &shifted, false)?;
        let neg = alpha_power(&ring, &shifted, true)?;
        entries.push(pos.sub(&neg)?);
    }
    Ok(BinetWindow { ring, entries })
}

/// Exact rational pair x = u + v*alpha used for numeric evaluation in the
/// quotient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
struct QuadRat {
    u: Rational,
    v: Rational,
}

impl QuadRat {
    fn from_int(p: &(Integer, Integer)) -> Self {
        QuadRat {
            u: Rational::from_integer(p.0.clone()),
            v: Rational::from_integer(p.1.clone()),
        }
    }

    fn mul(&self, other: &Self, c: &Integer) -> Self {
        let c = Rational::from_integer(c.clone());
        let uu = &self.u * &other.u;
        let vv = &self.v * &other.v;
        let uv = &self.u * &other.v + &self.v * &other.u;
        QuadRat {
            u: uu - &vv,
            v: uv + c * vv,
        }
    }

    fn add_assign(&mut self, other: &Self) {
        self.u += &other.u;
        self.v += &other.v;
    }

    fn scale(&self, k: &Rational) -> Self {
        QuadRat {
            u: &self.u * k,
            v: &self.v * k,
        }
    }
}

/// Evaluate a Laurent polynomial at unit ring elements (norm 1, so negative
/// powers go through conjugation).
fn eval_poly_at_units(
    p: &MultiPoly,
    values: &[(Integer, Integer)],
    c: &Integer,
) -> QuadRat {
    let mut acc = QuadRat {
        u: Rational::zero(),
        v: Rational::zero(),
    };
    for (mono, coeff) in p.terms() {
        let mut term = QuadRat {
            u: Rational::one(),
            v: Rational::zero(),
        };
        for (var, e) in mono.iter() {
            let base = if e < 0 {
                quad_int_conj(&values[var], c)
            } else {
                values[var].clone()
            };
            for _ in 0..e.unsigned_abs() {
                term = term.mul(&QuadRat::from_int(&base), c);
            }
        }
        acc.add_assign(&term.scale(coeff));
    }
    acc
}

/// Check the window against ground-truth subsequence values for
/// 1 <= n <= n_max: bind each auxiliary variable to alpha^(n^a b^n), divide
/// by 2*alpha - c, and compare (u, v) coordinates with (a(n+j), 0).
pub fn numeric_check(
    window: &BinetWindow,
    f: &CFiniteSequence,
    p: &ExpPolyIndex,
    n_max: i64,
) -> Result<(), BinetError> {
    let ring = window.ring();
    let c = ring.c();
    let r = window.arity() - 1;
    // norm(2*alpha - c) = 4 - c^2; delta^(-1) = conj(delta) / norm
    let norm = Rational::from_integer(Integer::from(4) - c * c);
    for n in 1..=n_max {
        let truth = subseq_window(f, p, n, r).map_err(|_| BinetError::NumericMismatch {
            n,
            j: 0,
        })?;
        let values: Vec<(Integer, Integer)> = ring
            .aux_vars()
            .iter()
            .map(|av| {
                let mut e = Integer::from(n).pow(av.pow);
                if av.base > 1 {
                    e *= Integer::from(av.base).pow(u32::try_from(n).expect("small n"));
                }
                ring.alpha_pow(&e)
            })
            .collect();
        let delta_conj = QuadRat::from_int(&quad_int_conj(
            &(Integer::from(-c.clone()), Integer::from(2)),
            c,
        ));
        let alpha = QuadRat {
            u: Rational::zero(),
            v: Rational::one(),
        };
        for (j, entry) in window.entries().iter().enumerate() {
            // entry = u_part + v_part * alpha, both parts evaluated to pairs
            let nu = eval_poly_at_units(entry.u_part(), &values, c);
            let nv = eval_poly_at_units(entry.v_part(), &values, c);
            let mut num = nu;
            num.add_assign(&nv.mul(&alpha, c));
            let val = num.mul(&delta_conj, c).scale(&norm.recip());
            let expect = Rational::from_integer(truth[j].clone());
            if val.u != expect || !val.v.is_zero() {
                return Err(BinetError::NumericMismatch { n, j });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfinite::ExpPolyIndex;

    fn c3() -> QuadParam {
        QuadParam::new(Integer::from(3)).unwrap()
    }

    #[test]
    fn quad_param_rejects_degenerate() {
        for c in [-2i64, -1, 0, 1, 2] {
            assert!(QuadParam::new(Integer::from(c)).is_err());
        }
        assert!(QuadParam::new(Integer::from(-3)).is_ok());
    }

    #[test]
    fn shift_index_examples() {
        let nsq = ExpPolyIndex::power(2);
        let s = shift_index(&nsq, 1);
        let a = AuxVar { pow: 1, base: 1 };
        let b = AuxVar { pow: 2, base: 1 };
        assert_eq!(s.aux_exponents[&b], Integer::one());
        assert_eq!(s.aux_exponents[&a], Integer::from(2));
        assert_eq!(s.alpha_exp, Integer::one());

        let e2 = ExpPolyIndex::exponential(2);
        let s2 = shift_index(&e2, 1);
        let e = AuxVar { pow: 0, base: 2 };
        assert_eq!(s2.aux_exponents[&e], Integer::from(2));
        assert_eq!(s2.alpha_exp, Integer::zero());

        let s0 = shift_index(&nsq, 0);
        assert_eq!(s0.aux_exponents.len(), 1);
        assert_eq!(s0.aux_exponents[&b], Integer::one());
        assert_eq!(s0.alpha_exp, Integer::zero());
    }

    #[test]
    fn shift_index_additivity() {
        // alpha^(p(n + j1 + j2)) expanded directly equals the shift of the
        // shifted assignment: convolve each aux var (a, b) of shift(p, j1)
        // with its own expansion at j2.
        let p = ExpPolyIndex::new(vec![
            crate::cfinite::IndexTerm { coef: Integer::from(2), pow: 2, base: 1 },
            crate::cfinite::IndexTerm { coef: Integer::one(), pow: 1, base: 2 },
        ])
        .unwrap();
        for (j1, j2) in [(1u32, 1u32), (2, 1), (1, 3)] {
            let direct = shift_index(&p, j1 + j2);
            let stage1 = shift_index(&p, j1);
            let mut composed: BTreeMap<AuxVar, Integer> = BTreeMap::new();
            let mut alpha = stage1.alpha_exp.clone();
            for (&av, e) in &stage1.aux_exponents {
                let single = ExpPolyIndex::new(vec![crate::cfinite::IndexTerm {
                    coef: Integer::one(),
                    pow: av.pow,
                    base: av.base,
                }])
                .unwrap();
                let expansion = shift_index(&single, j2);
                for (&bv, w) in &expansion.aux_exponents {
                    let slot = composed.entry(bv).or_insert_with(Integer::zero);
                    *slot += e * w;
                    if slot.is_zero() {
                        composed.remove(&bv);
                    }
                }
                alpha += e * &expansion.alpha_exp;
            }
            assert_eq!(direct.aux_exponents, composed, "aux at ({j1},{j2})");
            assert_eq!(direct.alpha_exp, alpha, "alpha at ({j1},{j2})");
        }
    }

    #[test]
    fn alpha_power_examples() {
        let c = c3();
        let nsq = ExpPolyIndex::power(2);
        let ring = QuadRing::new(&c, aux_vars_for(&nsq));
        let b_id = ring.aux_index(AuxVar { pow: 2, base: 1 }).unwrap();
        let a_id = ring.aux_index(AuxVar { pow: 1, base: 1 }).unwrap();

        // j = 0, +1: just the monomial B
        let s0 = shift_index(&nsq, 0);
        let e0 = alpha_power(&ring, &s0, false).unwrap();
        assert_eq!(*e0.u_part(), MultiPoly::variable(ring.vars().clone(), b_id));
        assert!(e0.v_part().is_zero());

        // alpha^(-1) = 3 - alpha
        let unit = ShiftedPower {
            aux_exponents: BTreeMap::new(),
            alpha_exp: Integer::one(),
        };
        let inv = alpha_power(&ring, &unit, true).unwrap();
        assert_eq!(
            *inv.u_part(),
            MultiPoly::constant_int(ring.vars().clone(), 3)
        );
        assert_eq!(
            *inv.v_part(),
            MultiPoly::constant_int(ring.vars().clone(), -1)
        );

        // j = 1, +1: monomial B*A^2*alpha, stored as u = 0, v = B*A^2
        let s1 = shift_index(&nsq, 1);
        let e1 = alpha_power(&ring, &s1, false).unwrap();
        assert!(e1.u_part().is_zero());
        let expect = MultiPoly::monomial(
            ring.vars().clone(),
            ExponentVector::from_pairs([(b_id, 1), (a_id, 2)]),
            Rational::one(),
        );
        assert_eq!(*e1.v_part(), expect);
    }

    #[test]
    fn trace_and_norm_identities() {
        for cv in [3i64, 4, 5, -3, 7] {
            let c = QuadParam::new(Integer::from(cv)).unwrap();
            let ring = QuadRing::new(&c, vec![]);
            let alpha = (Integer::zero(), Integer::one());
            let conj = quad_int_conj(&alpha, ring.c());
            // alpha + conj(alpha) = c
            assert_eq!(&alpha.0 + &conj.0, Integer::from(cv));
            assert_eq!(&alpha.1 + &conj.1, Integer::zero());
            // alpha * conj(alpha) = 1
            let prod = quad_int_mul(&alpha, &conj, ring.c());
            assert_eq!(prod, (Integer::one(), Integer::zero()));
        }
    }

    #[test]
    fn conjugation_involution() {
        let c = c3();
        let p = ExpPolyIndex::power(2);
        let ring = QuadRing::new(&c, aux_vars_for(&p));
        let w = binet_window(&c, &p, 2).unwrap();
        for entry in w.entries() {
            let twice = ring.conj(&ring.conj(entry));
            assert_eq!(&twice, entry);
        }
        // and alpha_power(negative) is the conjugate of alpha_power(positive)
        let s = shift_index(&p, 1);
        let pos = alpha_power(&ring, &s, false).unwrap();
        let neg = alpha_power(&ring, &s, true).unwrap();
        assert_eq!(ring.conj(&pos), neg);
    }

    #[test]
    fn window_exponents_for_exponential_index() {
        let c = c3();
        let e2 = ExpPolyIndex::exponential(2);
        let w = binet_window(&c, &e2, 2).unwrap();
        let ring = w.ring();
        let e_id = ring.aux_index(AuxVar { pow: 0, base: 2 }).unwrap();
        for (j, expect) in [(0usize, 1i64), (1, 2), (2, 4)] {
            let entry = &w.entries()[j];
            // leading u-term is E^(2^j)
            let (mono, _) = entry.u_part().leading_term().unwrap();
            assert_eq!(mono.exponent(e_id), expect);
        }
    }

    #[test]
    fn numeric_check_square_index() {
        let c = c3();
        let f = c.sequence();
        let p = ExpPolyIndex::power(2);
        let w = binet_window(&c, &p, 5).unwrap();
        assert!(numeric_check(&w, &f, &p, 10).is_ok());
    }

    #[test]
    fn numeric_check_exponential_index() {
        let c = c3();
        let f = c.sequence();
        let p = ExpPolyIndex::exponential(2);
        let w = binet_window(&c, &p, 2).unwrap();
        assert!(numeric_check(&w, &f, &p, 8).is_ok());
    }

    #[test]
    fn numeric_check_detects_corruption() {
        let c = c3();
        let f = c.sequence();
        let p = ExpPolyIndex::power(2);
        let mut w = binet_window(&c, &p, 2).unwrap();
        // flip one exponent in the last entry
        let ring = w.ring.clone();
        let a_id = ring.aux_index(AuxVar { pow: 1, base: 1 }).unwrap();
        let bad = w.entries[2]
            .u_part()
            .mul(&MultiPoly::variable(ring.vars().clone(), a_id))
            .unwrap();
        w.entries[2] = ring.from_parts(bad, w.entries[2].v_part().clone());
        let err = numeric_check(&w, &f, &p, 5).unwrap_err();
        assert_eq!(err, BinetError::NumericMismatch { n: 1, j: 2 });
    }

    #[test]
    fn normal_form_association_independent() {
        let c = c3();
        let p = ExpPolyIndex::power(2);
        let w = binet_window(&c, &p, 2).unwrap();
        let ring = w.ring();
        let [a, b, d] = [&w.entries()[0], &w.entries()[1], &w.entries()[2]];
        let left = ring.mul(&ring.mul(a, b).unwrap(), d).unwrap();
        let right = ring.mul(a, &ring.mul(b, d).unwrap()).unwrap();
        assert_eq!(left, right);
    }
}

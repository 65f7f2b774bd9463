//! C-finite sequences and exponential-polynomial index functions, with exact
//! evaluation at indices far beyond naive iteration via binary powering of the
//! companion matrix (O(d^3 log n) big-integer multiplications).

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::par;
use crate::polyarith::Integer;

/// Errors from sequence definition and evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CFiniteError {
    /// Order, coefficient count and initial-value count must agree; the
    /// trailing coefficient must be nonzero.
    BadDefinition(String),
    /// Backward extension below the offset needs |c_d| = 1.
    BackwardNotExtensible,
    /// An index function was rejected at construction.
    BadIndex(String),
}

impl std::fmt::Display for CFiniteError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CFiniteError::BadDefinition(m) => write!(f, "bad sequence definition: {m}"),
            CFiniteError::BackwardNotExtensible => {
                write!(f, "backward extension requires trailing coefficient +1 or -1")
            }
            CFiniteError::BadIndex(m) => write!(f, "bad index function: {m}"),
        }
    }
}

impl std::error::Error for CFiniteError {}

/// A sequence f with f(n) = c_1 f(n-1) + ... + c_d f(n-d), pinned by d
/// initial values f(offset), ..., f(offset+d-1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SeqRepr", into = "SeqRepr")]
pub struct CFiniteSequence {
    coeffs: Vec<Integer>,
    initial: Vec<Integer>,
    offset: i64,
}

/// JSON shape: {order, coefficients, initial_values, offset} with decimal
/// strings for the integers.
#[derive(Serialize, Deserialize)]
struct SeqRepr {
    order: usize,
    coefficients: Vec<String>,
    initial_values: Vec<String>,
    #[serde(default = "default_offset")]
    offset: i64,
}

fn default_offset() -> i64 {
    1
}

impl TryFrom<SeqRepr> for CFiniteSequence {
    type Error = CFiniteError;

    fn try_from(r: SeqRepr) -> Result<Self, Self::Error> {
        let parse = |v: Vec<String>| -> Result<Vec<Integer>, CFiniteError> {
            v.into_iter()
                .map(|s| {
                    s.parse::<Integer>()
                        .map_err(|e| CFiniteError::BadDefinition(format!("bad integer {s:?}: {e}")))
                })
                .collect()
        };
        let coeffs = parse(r.coefficients)?;
        if coeffs.len() != r.order {
            return Err(CFiniteError::BadDefinition(format!(
                "order {} does not match {} coefficients",
                r.order,
                coeffs.len()
            )));
        }
        CFiniteSequence::new(coeffs, parse(r.initial_values)?, r.offset)
    }
}

impl From<CFiniteSequence> for SeqRepr {
    fn from(f: CFiniteSequence) -> SeqRepr {
        SeqRepr {
            order: f.order(),
            coefficients: f.coeffs.iter().map(|c| c.to_string()).collect(),
            initial_values: f.initial.iter().map(|c| c.to_string()).collect(),
            offset: f.offset,
        }
    }
}

impl CFiniteSequence {
    /// `coeffs` are c_1..c_d; `initial` are f(offset)..f(offset+d-1).
    pub fn new(
        coeffs: Vec<Integer>,
        initial: Vec<Integer>,
        offset: i64,
    ) -> Result<Self, CFiniteError> {
        if coeffs.is_empty() {
            return Err(CFiniteError::BadDefinition("order must be at least 1".into()));
        }
        if coeffs.len() != initial.len() {
            return Err(CFiniteError::BadDefinition(format!(
                "{} coefficients but {} initial values",
                coeffs.len(),
                initial.len()
            )));
        }
        if coeffs.last().unwrap().is_zero() {
            return Err(CFiniteError::BadDefinition(
                "trailing coefficient c_d must be nonzero".into(),
            ));
        }
        Ok(CFiniteSequence {
            coeffs,
            initial,
            offset,
        })
    }

    /// The order-2 family f(n) = c f(n-1) - f(n-2) with f(0)=0, f(1)=1.
    pub fn quad_family(c: &Integer) -> Self {
        CFiniteSequence {
            coeffs: vec![c.clone(), -Integer::one()],
            initial: vec![Integer::zero(), Integer::one()],
            offset: 0,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn initial_values(&self) -> &[Integer] {
        &self.initial
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    fn backward_extensible(&self) -> bool {
        self.coeffs.last().unwrap().abs().is_one()
    }

    /// Exact f(n) by binary powering of the companion matrix.
    pub fn term(&self, n: &Integer) -> Result<Integer, CFiniteError> {
        let s = Integer::from(self.offset);
        let d = self.order();
        if *n >= s {
            let k = n - &s;
            if let Some(small) = k.to_usize() {
                if small < d {
                    return Ok(self.initial[small].clone());
                }
            }
            let m = companion(&self.coeffs);
            let mk = mat_pow(&m, &k, d);
            Ok(mat_apply_first(&mk, &self.initial, d))
        } else {
            if !self.backward_extensible() {
                return Err(CFiniteError::BackwardNotExtensible);
            }
            let k = &s - n;
            let m = companion_inverse(&self.coeffs);
            let mk = mat_pow(&m, &k, d);
            Ok(mat_apply_first(&mk, &self.initial, d))
        }
    }

    /// f(n) mod p, by the same powering over u64 residues.
    pub fn term_mod(&self, n: &Integer, p: u64) -> Result<u64, CFiniteError> {
        let s = Integer::from(self.offset);
        let d = self.order();
        let reduce = |x: &Integer| -> u64 { x.mod_floor(&Integer::from(p)).to_u64().unwrap() };
        let init: Vec<u64> = self.initial.iter().map(reduce).collect();
        if *n >= s {
            let k = n - &s;
            if let Some(small) = k.to_usize() {
                if small < d {
                    return Ok(init[small]);
                }
            }
            let m: Vec<u64> = companion(&self.coeffs).iter().map(reduce).collect();
            let mk = mat_pow_mod(&m, &k, d, p);
            Ok(mat_apply_first_mod(&mk, &init, d, p))
        } else {
            if !self.backward_extensible() {
                return Err(CFiniteError::BackwardNotExtensible);
            }
            let k = &s - n;
            // inverse companion entries are integers exactly because |c_d| = 1
            let m: Vec<u64> = companion_inverse(&self.coeffs).iter().map(reduce).collect();
            let mk = mat_pow_mod(&m, &k, d, p);
            Ok(mat_apply_first_mod(&mk, &init, d, p))
        }
    }

    /// Naive forward iteration returning f(offset..=n_hi); test oracle and
    /// bulk helper.
    pub fn iterate_from_offset(&self, n_hi: i64) -> Vec<Integer> {
        let count = usize::try_from(n_hi - self.offset + 1).expect("n_hi below offset");
        let mut vals = self.initial.clone();
        while vals.len() < count {
            let mut next = Integer::zero();
            for (i, c) in self.coeffs.iter().enumerate() {
                next += c * &vals[vals.len() - 1 - i];
            }
            vals.push(next);
        }
        vals.truncate(count);
        vals
    }
}

/// Companion matrix C with [f(k+1),...,f(k+d)]^T = C [f(k),...,f(k+d-1)]^T,
/// row-major d*d.
fn companion(coeffs: &[Integer]) -> Vec<Integer> {
    let d = coeffs.len();
    let mut m = vec![Integer::zero(); d * d];
    for i in 0..d.saturating_sub(1) {
        m[i * d + i + 1] = Integer::one();
    }
    for j in 0..d {
        // last row: f(k+d) = sum c_i f(k+d-i), so the f(k+j) coefficient is c_{d-j}
        m[(d - 1) * d + j] = coeffs[d - 1 - j].clone();
    }
    m
}

/// Inverse companion (integer entries exactly when |c_d| = 1): recovers
/// [f(k),...,f(k+d-1)] from [f(k+1),...,f(k+d)].
fn companion_inverse(coeffs: &[Integer]) -> Vec<Integer> {
    let d = coeffs.len();
    let cd = coeffs[d - 1].clone();
    let mut m = vec![Integer::zero(); d * d];
    // first row: f(k) = (f(k+d) - sum_{i=1}^{d-1} c_i f(k+d-i)) / c_d
    m[d - 1] = Integer::one() / &cd;
    for i in 1..d {
        m[d - 1 - i] = -&coeffs[i - 1] / &cd;
    }
    for i in 1..d {
        m[i * d + i - 1] = Integer::one();
    }
    m
}

fn mat_mul(a: &[Integer], b: &[Integer], d: usize) -> Vec<Integer> {
    let mut out = vec![Integer::zero(); d * d];
    for i in 0..d {
        for k in 0..d {
            if a[i * d + k].is_zero() {
                continue;
            }
            for j in 0..d {
                if b[k * d + j].is_zero() {
                    continue;
                }
                out[i * d + j] += &a[i * d + k] * &b[k * d + j];
            }
        }
    }
    out
}

fn bit_of(k: &Integer, bit: u64) -> bool {
    let (_, digits) = k.to_u64_digits();
    let idx = (bit / 64) as usize;
    idx < digits.len() && digits[idx] >> (bit % 64) & 1 == 1
}

fn mat_pow(m: &[Integer], k: &Integer, d: usize) -> Vec<Integer> {
    let mut result = vec![Integer::zero(); d * d];
    for i in 0..d {
        result[i * d + i] = Integer::one();
    }
    let mut base = m.to_vec();
    let nbits = k.bits();
    for bit in 0..nbits {
        if bit_of(k, bit) {
            result = mat_mul(&result, &base, d);
        }
        if bit + 1 < nbits {
            base = mat_mul(&base, &base, d);
        }
    }
    result
}

fn mat_apply_first(m: &[Integer], v: &[Integer], d: usize) -> Integer {
    let mut acc = Integer::zero();
    for j in 0..d {
        acc += &m[j] * &v[j];
    }
    acc
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mat_mul_mod(a: &[u64], b: &[u64], d: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; d * d];
    for i in 0..d {
        for k in 0..d {
            if a[i * d + k] == 0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] = (out[i * d + j] + mulmod(a[i * d + k], b[k * d + j], p)) % p;
            }
        }
    }
    out
}

fn mat_pow_mod(m: &[u64], k: &Integer, d: usize, p: u64) -> Vec<u64> {
    let mut result = vec![0u64; d * d];
    for i in 0..d {
        result[i * d + i] = 1;
    }
    let mut base = m.to_vec();
    let nbits = k.bits();
    for bit in 0..nbits {
        if bit_of(k, bit) {
            result = mat_mul_mod(&result, &base, d, p);
        }
        if bit + 1 < nbits {
            base = mat_mul_mod(&base, &base, d, p);
        }
    }
    result
}

fn mat_apply_first_mod(m: &[u64], v: &[u64], d: usize, p: u64) -> u64 {
    let mut acc = 0u64;
    for j in 0..d {
        acc = (acc + mulmod(m[j], v[j], p)) % p;
    }
    acc
}

/// Companion-step state: the matrix-power accumulator together with the
/// current window of d consecutive values. One [`step`](CompanionState::step)
/// advances the window index by exactly one.
#[derive(Debug, Clone)]
pub struct CompanionState {
    coeffs: Vec<Integer>,
    window: Vec<Integer>,
    power: Vec<Integer>,
    index: i64,
}

impl CompanionState {
    pub fn new(f: &CFiniteSequence) -> Self {
        let d = f.order();
        let mut power = vec![Integer::zero(); d * d];
        for i in 0..d {
            power[i * d + i] = Integer::one();
        }
        CompanionState {
            coeffs: f.coeffs.clone(),
            window: f.initial.clone(),
            power,
            index: f.offset,
        }
    }

    /// Index of the first entry of the current window.
    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn window(&self) -> &[Integer] {
        &self.window
    }

    /// Accumulated companion power C^(index - offset), row-major.
    pub fn matrix_power(&self) -> &[Integer] {
        &self.power
    }

    pub fn step(&mut self) {
        let d = self.coeffs.len();
        let mut next = Integer::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            next += c * &self.window[d - 1 - i];
        }
        self.window.remove(0);
        self.window.push(next);
        self.power = mat_mul(&self.power, &companion(&self.coeffs), d);
        self.index += 1;
    }
}

/// One monomial coef * n^pow * base^n of an exponential-polynomial index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexTerm {
    #[serde(with = "int_string")]
    pub coef: Integer,
    /// polynomial power a
    pub pow: u32,
    /// exponential base b (1 for pure polynomial terms)
    pub base: u32,
}

mod int_string {
    use super::Integer;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Index function p(n) = sum of coef * n^pow * base^n with nonnegative
/// integer coefficients, at least one positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<IndexTerm>", into = "Vec<IndexTerm>")]
pub struct ExpPolyIndex {
    terms: Vec<IndexTerm>,
}

impl TryFrom<Vec<IndexTerm>> for ExpPolyIndex {
    type Error = CFiniteError;

    fn try_from(terms: Vec<IndexTerm>) -> Result<Self, Self::Error> {
        ExpPolyIndex::new(terms)
    }
}

impl From<ExpPolyIndex> for Vec<IndexTerm> {
    fn from(p: ExpPolyIndex) -> Vec<IndexTerm> {
        p.terms
    }
}

impl ExpPolyIndex {
    pub fn new(terms: Vec<IndexTerm>) -> Result<Self, CFiniteError> {
        let mut merged: Vec<IndexTerm> = Vec::new();
        for t in terms {
            if t.coef.is_negative() {
                return Err(CFiniteError::BadIndex(format!(
                    "negative coefficient {} on n^{} * {}^n",
                    t.coef, t.pow, t.base
                )));
            }
            if t.base < 1 {
                return Err(CFiniteError::BadIndex("exponential base must be >= 1".into()));
            }
            if t.coef.is_zero() {
                continue;
            }
            match merged
                .iter_mut()
                .find(|m| m.pow == t.pow && m.base == t.base)
            {
                Some(m) => m.coef += t.coef,
                None => merged.push(t),
            }
        }
        if merged.is_empty() {
            return Err(CFiniteError::BadIndex(
                "at least one positive term required".into(),
            ));
        }
        merged.sort_by_key(|t| (t.base, t.pow));
        Ok(ExpPolyIndex { terms: merged })
    }

    /// p(n) = n.
    pub fn identity() -> Self {
        ExpPolyIndex {
            terms: vec![IndexTerm {
                coef: Integer::one(),
                pow: 1,
                base: 1,
            }],
        }
    }

    /// p(n) = n^a.
    pub fn power(a: u32) -> Self {
        ExpPolyIndex {
            terms: vec![IndexTerm {
                coef: Integer::one(),
                pow: a,
                base: 1,
            }],
        }
    }

    /// p(n) = e^n.
    pub fn exponential(e: u32) -> Self {
        ExpPolyIndex {
            terms: vec![IndexTerm {
                coef: Integer::one(),
                pow: 0,
                base: e,
            }],
        }
    }

    pub fn terms(&self) -> &[IndexTerm] {
        &self.terms
    }

    /// True when every term has base 1 (a plain polynomial in n).
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|t| t.base == 1)
    }

    /// Exact p(n) for n >= 1.
    pub fn eval(&self, n: i64) -> Integer {
        assert!(n >= 1, "index functions are evaluated at n >= 1");
        let nb = Integer::from(n);
        let mut acc = Integer::zero();
        for t in &self.terms {
            let mut term = t.coef.clone();
            term *= nb.pow(t.pow);
            if t.base > 1 {
                term *= Integer::from(t.base).pow(u32::try_from(n).expect("n fits u32"));
            }
            acc += term;
        }
        acc
    }

    /// Compact display like `n^2` or `n^2*2^n + 1`.
    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for t in self.terms.iter().rev() {
            let mut factors = Vec::new();
            if !t.coef.is_one() || (t.pow == 0 && t.base == 1) {
                factors.push(t.coef.to_string());
            }
            match t.pow {
                0 => {}
                1 => factors.push("n".into()),
                a => factors.push(format!("n^{a}")),
            }
            if t.base > 1 {
                factors.push(format!("{}^n", t.base));
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

/// a(n) = f(p(n)).
pub fn subseq_term(
    f: &CFiniteSequence,
    p: &ExpPolyIndex,
    n: i64,
) -> Result<Integer, CFiniteError> {
    f.term(&p.eval(n))
}

/// [a(n), ..., a(n+r)].
pub fn subseq_window(
    f: &CFiniteSequence,
    p: &ExpPolyIndex,
    n: i64,
    r: usize,
) -> Result<Vec<Integer>, CFiniteError> {
    (0..=r).map(|j| subseq_term(f, p, n + j as i64)).collect()
}

/// a(1), ..., a(n_hi), computed in parallel.
pub fn subseq_values(
    f: &CFiniteSequence,
    p: &ExpPolyIndex,
    n_hi: i64,
) -> Result<Vec<Integer>, CFiniteError> {
    let count = usize::try_from(n_hi).unwrap_or(0);
    let results = par::map_range(count, |i| subseq_term(f, p, i as i64 + 1));
    results.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib_like_c3_offset1() -> CFiniteSequence {
        // f(1)=1, f(2)=3, f(n)=3f(n-1)-f(n-2)
        CFiniteSequence::new(
            vec![Integer::from(3), Integer::from(-1)],
            vec![Integer::from(1), Integer::from(3)],
            1,
        )
        .unwrap()
    }

    fn quad3() -> CFiniteSequence {
        CFiniteSequence::quad_family(&Integer::from(3))
    }

    #[test]
    fn small_terms_by_recurrence() {
        let f = fib_like_c3_offset1();
        assert_eq!(f.term(&Integer::from(3)).unwrap(), Integer::from(8));
        assert_eq!(f.term(&Integer::from(4)).unwrap(), Integer::from(21));
    }

    #[test]
    fn fast_powering_matches_naive_at_32() {
        let f = quad3();
        let naive = f.iterate_from_offset(32);
        assert_eq!(f.term(&Integer::from(32)).unwrap(), naive[32]);
        assert_eq!(
            f.term(&Integer::from(32)).unwrap(),
            "10610209857723".parse::<Integer>().unwrap()
        );
    }

    #[test]
    fn index_eval_examples() {
        // p(n) = n^2*2^n + n^3*5^n + 1 at n=1 -> 8
        let p = ExpPolyIndex::new(vec![
            IndexTerm { coef: Integer::one(), pow: 2, base: 2 },
            IndexTerm { coef: Integer::one(), pow: 3, base: 5 },
            IndexTerm { coef: Integer::one(), pow: 0, base: 1 },
        ])
        .unwrap();
        assert_eq!(p.eval(1), Integer::from(8));
        assert_eq!(ExpPolyIndex::power(2).eval(5), Integer::from(25));
        assert_eq!(ExpPolyIndex::exponential(2).eval(10), Integer::from(1024));
    }

    #[test]
    fn subseq_examples() {
        let f = quad3();
        let nsq = ExpPolyIndex::power(2);
        assert_eq!(subseq_term(&f, &nsq, 2).unwrap(), Integer::from(21));
        assert_eq!(
            subseq_term(&f, &nsq, 5).unwrap(),
            "12586269025".parse::<Integer>().unwrap()
        );
        let e2 = ExpPolyIndex::exponential(2);
        assert_eq!(subseq_term(&f, &e2, 3).unwrap(), Integer::from(987));
        let w = subseq_window(&f, &nsq, 1, 4).unwrap();
        let expect: Vec<Integer> = ["1", "21", "2584", "2178309", "12586269025"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(w, expect);
        assert_eq!(subseq_window(&f, &nsq, 3, 0).unwrap().len(), 1);
        let w2 = subseq_window(&f, &e2, 1, 1).unwrap();
        assert_eq!(w2, vec![Integer::from(3), Integer::from(21)]);
    }

    #[test]
    fn backward_extension_round_trip() {
        let f = fib_like_c3_offset1();
        let back: Vec<Integer> = (-4..=0)
            .map(|n| f.term(&Integer::from(n)).unwrap())
            .collect();
        // iterate the recurrence forward from the two lowest extended values
        // and recover every later value, including the original initials
        let mut w = (back[0].clone(), back[1].clone());
        for n in -2..=2i64 {
            let next = Integer::from(3) * &w.1 - &w.0;
            assert_eq!(next, f.term(&Integer::from(n)).unwrap());
            w = (w.1, next);
        }
    }

    #[test]
    fn backward_requires_unit_trailing_coefficient() {
        let f = CFiniteSequence::new(
            vec![Integer::from(1), Integer::from(2)],
            vec![Integer::from(1), Integer::from(1)],
            1,
        )
        .unwrap();
        assert_eq!(
            f.term(&Integer::from(0)),
            Err(CFiniteError::BackwardNotExtensible)
        );
    }

    #[test]
    fn companion_state_step_advances_by_one() {
        let f = quad3();
        let mut st = CompanionState::new(&f);
        assert_eq!(st.index(), 0);
        for n in 0..10 {
            assert_eq!(st.window()[0], f.term(&Integer::from(n)).unwrap());
            st.step();
        }
    }

    #[test]
    fn term_mod_matches_exact() {
        let f = quad3();
        let p = 2305843009213693951u64; // 2^61 - 1
        for n in [1i64, 5, 17, 100] {
            let exact = f.term(&Integer::from(n)).unwrap();
            let expect = exact.mod_floor(&Integer::from(p)).to_u64().unwrap();
            assert_eq!(f.term_mod(&Integer::from(n), p).unwrap(), expect);
        }
    }

    #[test]
    fn index_constructor_rules() {
        let p = ExpPolyIndex::new(vec![
            IndexTerm { coef: Integer::from(2), pow: 1, base: 1 },
            IndexTerm { coef: Integer::from(3), pow: 1, base: 1 },
        ])
        .unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.eval(4), Integer::from(20));
        assert!(ExpPolyIndex::new(vec![IndexTerm {
            coef: Integer::from(-1),
            pow: 1,
            base: 1
        }])
        .is_err());
        assert!(ExpPolyIndex::new(vec![IndexTerm {
            coef: Integer::zero(),
            pow: 1,
            base: 1
        }])
        .is_err());
    }

    #[test]
    fn sequence_json_round_trip() {
        let f = fib_like_c3_offset1();
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.contains("\"order\":2"));
        let back: CFiniteSequence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}

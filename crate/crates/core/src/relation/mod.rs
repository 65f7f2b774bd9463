//! Polynomial relation discovery by undetermined coefficients.
//!
//! A generic polynomial P(x_0, ..., x_r) of bounded total degree (optionally
//! degree <= 1 in x_r) is posed with unknown coefficients; substituting either
//! symbolic Binet windows or exact numeric windows turns "P vanishes" into a
//! linear system whose exact nullspace yields annihilators. The Somos
//! generators walk the (degree, order) grid lexicographically, degree first,
//! and return the canonically selected solved recurrence.

pub mod nullspace;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::binet::{binet_window, BinetError, BinetWindow, QuadParam, QuadRingExpr};
use crate::cfinite::{subseq_values, CFiniteError, CFiniteSequence, ExpPolyIndex};
use crate::par;
use crate::polyarith::textform::{parse_poly, poly_to_string, ParseError};
use crate::polyarith::{
    ExponentVector, Integer, MultiPoly, PolyError, Rational, RationalFunction, VarId, VarSet,
};

pub use nullspace::{nullspace, PrimeBudgetExhausted};

/// Extra fitting windows beyond the unknown count in the empirical backend.
pub const FIT_MARGIN: usize = 10;

/// Held-out windows an empirical fit must annihilate before acceptance.
pub const HOLDOUT_WINDOWS: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationError {
    Poly(PolyError),
    Binet(BinetError),
    Sequence(CFiniteError),
    Nullspace(PrimeBudgetExhausted),
    Parse(ParseError),
    /// solve_for_last needs degree exactly 1 in the last window variable.
    NotLinearInLast { degree: i64 },
    BadInput(String),
}

impl std::fmt::Display for RelationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelationError::Poly(e) => write!(f, "{e}"),
            RelationError::Binet(e) => write!(f, "{e}"),
            RelationError::Sequence(e) => write!(f, "{e}"),
            RelationError::Nullspace(e) => write!(f, "{e}"),
            RelationError::Parse(e) => write!(f, "{e}"),
            RelationError::NotLinearInLast { degree } => write!(
                f,
                "annihilator has degree {degree} in the last window variable; \
                 rerun with the linear-in-last ansatz"
            ),
            RelationError::BadInput(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for RelationError {}

impl From<PolyError> for RelationError {
    fn from(e: PolyError) -> Self {
        RelationError::Poly(e)
    }
}

impl From<BinetError> for RelationError {
    fn from(e: BinetError) -> Self {
        RelationError::Binet(e)
    }
}

impl From<CFiniteError> for RelationError {
    fn from(e: CFiniteError) -> Self {
        RelationError::Sequence(e)
    }
}

impl From<PrimeBudgetExhausted> for RelationError {
    fn from(e: PrimeBudgetExhausted) -> Self {
        RelationError::Nullspace(e)
    }
}

impl From<ParseError> for RelationError {
    fn from(e: ParseError) -> Self {
        RelationError::Parse(e)
    }
}

/// The generic polynomial ansatz: all monomials of total degree <= degree in
/// the given variables, optionally restricted to degree <= 1 in the last
/// variable, listed in ascending graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationAnsatz {
    vars: VarSet,
    degree: u32,
    linear_in_last: bool,
    monomials: Vec<ExponentVector>,
}

impl RelationAnsatz {
    /// Ansatz over explicit variables; the last one is the "solved" variable.
    pub fn new(vars: VarSet, degree: u32, linear_in_last: bool) -> Self {
        let nvars = vars.len();
        let mut monomials = Vec::new();
        let mut exps = vec![0i64; nvars];
        enumerate_rec(&mut monomials, &mut exps, 0, degree as i64, linear_in_last, nvars);
        monomials.sort();
        RelationAnsatz {
            vars,
            degree,
            linear_in_last,
            monomials,
        }
    }

    /// Window ansatz in x0..xr (r+1 variables).
    pub fn windows(r: usize, degree: u32, linear_in_last: bool) -> Self {
        RelationAnsatz::new(VarSet::windows(0, r + 1), degree, linear_in_last)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn linear_in_last(&self) -> bool {
        self.linear_in_last
    }

    pub fn monomials(&self) -> &[ExponentVector] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Rebuild the polynomial Σ coeff_j * monomial_j.
    pub fn poly_from_vector(&self, coeffs: &[Rational]) -> MultiPoly {
        MultiPoly::from_terms(
            self.vars.clone(),
            self.monomials
                .iter()
                .zip(coeffs)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }
}

fn enumerate_rec(
    out: &mut Vec<ExponentVector>,
    exps: &mut Vec<i64>,
    var: usize,
    remaining: i64,
    linear_in_last: bool,
    nvars: usize,
) {
    if var == nvars {
        out.push(ExponentVector::from_pairs(
            exps.iter().enumerate().map(|(v, &e)| (v, e)),
        ));
        return;
    }
    let cap = if linear_in_last && var == nvars - 1 {
        remaining.min(1)
    } else {
        remaining
    };
    for e in 0..=cap {
        exps[var] = e;
        enumerate_rec(out, exps, var + 1, remaining - e, linear_in_last, nvars);
    }
    exps[var] = 0;
}

/// Enumerate the window ansatz for order r; unknown count M is
/// C(r+1+d, d) without the flag.
pub fn enumerate_ansatz(r: usize, degree: u32, linear_in_last: bool) -> RelationAnsatz {
    RelationAnsatz::windows(r, degree, linear_in_last)
}

/// An exact linear system whose columns are ansatz monomials. Rows are either
/// materialised sparse rational entries (symbolic systems, small matrices) or
/// exact integer windows evaluated through the ansatz on demand (empirical
/// systems, whose expanded entries would be enormous).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    ncols: usize,
    rows: RowStorage,
}

#[derive(Debug, Clone)]
enum RowStorage {
    Sparse(Vec<Vec<(u32, Rational)>>),
    Windows {
        ansatz: RelationAnsatz,
        /// values a(start), a(start+1), ... covering every fitting window
        values: Vec<Integer>,
        arity: usize,
        start: i64,
    },
}

impl LinearSystem {
    pub fn from_dense(rows: Vec<Vec<Rational>>) -> Self {
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        let sparse = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j as u32, v))
                    .collect()
            })
            .collect();
        LinearSystem {
            ncols,
            rows: RowStorage::Sparse(sparse),
        }
    }

    pub fn from_sparse(ncols: usize, rows: Vec<Vec<(u32, Rational)>>) -> Self {
        LinearSystem {
            ncols,
            rows: RowStorage::Sparse(rows),
        }
    }

    fn from_windows(ansatz: RelationAnsatz, values: Vec<Integer>, start: i64) -> Self {
        let arity = ansatz.vars().len();
        LinearSystem {
            ncols: ansatz.len(),
            rows: RowStorage::Windows {
                ansatz,
                values,
                arity,
                start,
            },
        }
    }

    pub fn nrows(&self) -> usize {
        match &self.rows {
            RowStorage::Sparse(rows) => rows.len(),
            RowStorage::Windows { values, arity, .. } => values.len() + 1 - arity,
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// First fitted index for empirical systems.
    pub fn fit_start(&self) -> Option<i64> {
        match &self.rows {
            RowStorage::Sparse(_) => None,
            RowStorage::Windows { start, .. } => Some(*start),
        }
    }

    /// Exact entry, computed on demand for window-backed rows.
    pub fn entry(&self, i: usize, j: usize) -> Rational {
        match &self.rows {
            RowStorage::Sparse(rows) => rows[i]
                .iter()
                .find(|(c, _)| *c as usize == j)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(Rational::zero),
            RowStorage::Windows {
                ansatz,
                values,
                arity,
                ..
            } => {
                let window = &values[i..i + arity];
                Rational::from_integer(eval_monomial_int(&ansatz.monomials()[j], window))
            }
        }
    }

    /// Row image modulo p; None marks a bad prime (vanishing denominator).
    pub(crate) fn row_mod(&self, i: usize, p: u64) -> Option<Vec<u64>> {
        match &self.rows {
            RowStorage::Sparse(rows) => {
                let mut out = vec![0u64; self.ncols];
                for (c, v) in &rows[i] {
                    out[*c as usize] = nullspace::rational_mod(v, p)?;
                }
                Some(out)
            }
            RowStorage::Windows {
                ansatz,
                values,
                arity,
                ..
            } => {
                let window = &values[i..i + arity];
                let maxdeg = ansatz.degree() as usize;
                let mut pows = vec![vec![1u64; maxdeg + 1]; *arity];
                for (v, w) in window.iter().enumerate() {
                    let w0 = nullspace::integer_mod(w, p);
                    for e in 1..=maxdeg {
                        pows[v][e] = nullspace::mulmod(pows[v][e - 1], w0, p);
                    }
                }
                Some(
                    ansatz
                        .monomials()
                        .iter()
                        .map(|m| {
                            let mut acc = 1u64;
                            for (v, e) in m.iter() {
                                acc = nullspace::mulmod(acc, pows[v][e as usize], p);
                            }
                            acc
                        })
                        .collect(),
                )
            }
        }
    }

    /// Exact check sys * v = 0 across every row.
    pub(crate) fn certify(&self, v: &[Rational]) -> bool {
        match &self.rows {
            RowStorage::Sparse(rows) => {
                let ok = par::map_slice(rows, |row| {
                    let mut acc = Rational::zero();
                    for (c, val) in row {
                        if !v[*c as usize].is_zero() {
                            acc += val * &v[*c as usize];
                        }
                    }
                    acc.is_zero()
                });
                ok.into_iter().all(|b| b)
            }
            RowStorage::Windows {
                ansatz,
                values,
                arity,
                ..
            } => {
                let support: Vec<(usize, &Rational)> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| (j, c))
                    .collect();
                let nrows = values.len() + 1 - arity;
                let ok = par::map_range(nrows, |i| {
                    let window = &values[i..i + *arity];
                    let mut acc = Rational::zero();
                    for (j, coeff) in &support {
                        let m = eval_monomial_int(&ansatz.monomials()[*j], window);
                        acc += *coeff * Rational::from_integer(m);
                    }
                    acc.is_zero()
                });
                ok.into_iter().all(|b| b)
            }
        }
    }
}

fn eval_monomial_int(m: &ExponentVector, window: &[Integer]) -> Integer {
    let mut acc = Integer::one();
    for (v, e) in m.iter() {
        debug_assert!(e >= 0);
        acc *= window[v].pow(e as u32);
    }
    acc
}

/// Substitute the Binet window into every ansatz monomial, clear the common
/// denominator (2*alpha - c)^degree, and emit one row per (auxiliary Laurent
/// monomial, normal-form component): both the u- and the v-coefficient of
/// each distinct monomial must vanish.
pub fn assemble_symbolic_system(
    window: &BinetWindow,
    ansatz: &RelationAnsatz,
) -> Result<LinearSystem, RelationError> {
    if ansatz.vars().len() != window.arity() {
        return Err(RelationError::BadInput(format!(
            "ansatz arity {} does not match window arity {}",
            ansatz.vars().len(),
            window.arity()
        )));
    }
    let ring = window.ring();
    let d = ansatz.degree();
    // power tables for the window entries and the cleared denominator
    let mut entry_pows: Vec<Vec<QuadRingExpr>> = Vec::with_capacity(window.arity());
    for entry in window.entries() {
        let mut pows = Vec::with_capacity(d as usize + 1);
        let mut acc = ring.from_parts(
            MultiPoly::one(ring.vars().clone()),
            MultiPoly::zero(ring.vars().clone()),
        );
        pows.push(acc.clone());
        for _ in 0..d {
            acc = ring.mul(&acc, entry).map_err(PolyError::from)?;
            pows.push(acc.clone());
        }
        entry_pows.push(pows);
    }
    let delta = ring.delta();
    let mut delta_pows = Vec::with_capacity(d as usize + 1);
    let mut acc = ring.from_parts(
        MultiPoly::one(ring.vars().clone()),
        MultiPoly::zero(ring.vars().clone()),
    );
    delta_pows.push(acc.clone());
    for _ in 0..d {
        acc = ring.mul(&acc, &delta).map_err(PolyError::from)?;
        delta_pows.push(acc.clone());
    }

    let columns: Vec<Result<QuadRingExpr, PolyError>> =
        par::map_slice(ansatz.monomials(), |mono| {
            let total = mono.total_degree();
            let mut acc = delta_pows[(d as i64 - total) as usize].clone();
            for (v, e) in mono.iter() {
                acc = ring.mul(&acc, &entry_pows[v][e as usize])?;
            }
            Ok(acc)
        });

    let mut rows: BTreeMap<(ExponentVector, bool), Vec<(u32, Rational)>> = BTreeMap::new();
    for (col, expr) in columns.into_iter().enumerate() {
        let expr = expr?;
        for (part, tag) in [(expr.u_part(), false), (expr.v_part(), true)] {
            for (m, c) in part.terms() {
                rows.entry((m.clone(), tag))
                    .or_default()
                    .push((col as u32, c.clone()));
            }
        }
    }
    Ok(LinearSystem::from_sparse(
        ansatz.len(),
        rows.into_values().collect(),
    ))
}

/// Smallest n >= 1 whose window [a(n), ..., a(n+r)] stays inside f's domain.
fn fitting_start(f: &CFiniteSequence, p: &ExpPolyIndex) -> i64 {
    if f.coefficients()
        .last()
        .map(|c| c.abs().is_one())
        .unwrap_or(false)
    {
        return 1;
    }
    let s = Integer::from(f.offset());
    let mut n = 1i64;
    while p.eval(n) < s {
        n += 1;
    }
    n
}

/// Data-driven coefficient matching: row n evaluates every ansatz monomial on
/// the exact window [a(n), ..., a(n+r)]. Entries stay implicit (the window
/// values are stored; expanding all monomials exactly would be enormous), but
/// each one is exactly determined and reachable via [`LinearSystem::entry`].
pub fn assemble_empirical_system(
    f: &CFiniteSequence,
    p: &ExpPolyIndex,
    ansatz: &RelationAnsatz,
    n_points: usize,
) -> Result<LinearSystem, RelationError> {
    if n_points == 0 {
        return Err(RelationError::BadInput("n_points must be positive".into()));
    }
    let r = ansatz.vars().len() - 1;
    let start = fitting_start(f, p);
    let count = n_points + r;
    let values: Result<Vec<Integer>, CFiniteError> = par::map_range(count, |i| {
        f.term(&p.eval(start + i as i64))
    })
    .into_iter()
    .collect();
    Ok(LinearSystem::from_windows(ansatz.clone(), values?, start))
}

/// Candidate ordering: the spec's deterministic selection rule (minimal total
/// degree, then fewest monomials, then graded-lex-least leading monomial),
/// optionally preceded by "solved-form denominator is nonconstant" for the
/// Somos generators, which exist to produce genuine division miracles.
fn selection_key(p: &MultiPoly, prefer_dividing: bool, last: VarId) -> (u8, i64, usize, ExponentVector) {
    let mut divides = 0u8;
    if prefer_dividing {
        let (_, den) = split_solved_parts(p, last);
        divides = if den.total_degree() == 0 { 1 } else { 0 };
    }
    (
        divides,
        p.total_degree(),
        p.num_terms(),
        p.leading_term().map(|(m, _)| m.clone()).unwrap_or_default(),
    )
}

/// Split P (linear in the last variable) as P = D*x_last - N.
fn split_solved_parts(p: &MultiPoly, last: VarId) -> (MultiPoly, MultiPoly) {
    let mut den = MultiPoly::zero(p.vars().clone());
    let mut num = MultiPoly::zero(p.vars().clone());
    let unit = ExponentVector::unit(last);
    for (m, c) in p.terms() {
        if m.exponent(last) >= 1 {
            let reduced = m.mul(&unit.inverse()).expect("exponent in range");
            den = den
                .add(&MultiPoly::monomial(p.vars().clone(), reduced, c.clone()))
                .expect("same vars");
        } else {
            num = num
                .add(&MultiPoly::monomial(p.vars().clone(), m.clone(), -c.clone()))
                .expect("same vars");
        }
    }
    (num, den)
}

/// Express x_r: P = D*x_r - N with D, N free of x_r; errors unless the degree
/// of P in x_r is exactly 1.
pub fn solve_for_last(p: &MultiPoly) -> Result<(MultiPoly, MultiPoly), RelationError> {
    let last = p.vars().len() - 1;
    let deg = p.degree_in(last);
    if deg != 1 {
        return Err(RelationError::NotLinearInLast { degree: deg });
    }
    let (num, den) = split_solved_parts(p, last);
    debug_assert!(!den.is_zero());
    Ok((num, den))
}

/// Find a primitive integer polynomial P of total degree <= degree with
/// P(exprs) identically zero; `None` mirrors the FAIL outcome.
///
/// Output variables are x1..xr, one per input expression, following the
/// classical calling convention.
pub fn find_rel(
    exprs: &[RationalFunction],
    degree: u32,
    linear_in_last: bool,
) -> Result<Option<MultiPoly>, RelationError> {
    if exprs.is_empty() {
        return Ok(None);
    }
    let input_vars = exprs[0].numerator().vars().clone();
    for e in exprs {
        if e.numerator().vars() != &input_vars {
            return Err(RelationError::Poly(PolyError::VarMismatch));
        }
    }
    let r = exprs.len();
    let ansatz = RelationAnsatz::new(VarSet::windows(1, r), degree, linear_in_last);

    // column j = product over i of num_i^{e_i} * den_i^{degree - e_i},
    // the monomial's image under clearing (prod den_i)^degree
    let columns: Vec<Result<MultiPoly, PolyError>> = par::map_slice(ansatz.monomials(), |mono| {
        let mut acc = MultiPoly::one(input_vars.clone());
        for (i, expr) in exprs.iter().enumerate() {
            let e = mono.exponent(i);
            debug_assert!(e >= 0 && e <= degree as i64);
            acc = acc.mul(&expr.numerator().pow(e as u32)?)?;
            acc = acc.mul(&expr.denominator().pow(degree - e as u32)?)?;
        }
        Ok(acc)
    });

    let mut rows: BTreeMap<ExponentVector, Vec<(u32, Rational)>> = BTreeMap::new();
    for (col, poly) in columns.into_iter().enumerate() {
        for (m, c) in poly?.terms() {
            rows.entry(m.clone())
                .or_default()
                .push((col as u32, c.clone()));
        }
    }
    let sys = LinearSystem::from_sparse(ansatz.len(), rows.into_values().collect());
    let basis = nullspace(&sys)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let mut candidates: Vec<MultiPoly> = basis
        .iter()
        .map(|v| ansatz.poly_from_vector(v).primitive_part())
        .collect::<Result<_, _>>()?;
    if linear_in_last {
        candidates.retain(|p| p.degree_in(r - 1) == 1);
        if candidates.is_empty() {
            return Ok(None);
        }
    }
    candidates.sort_by_key(|p| selection_key(p, false, r - 1));
    Ok(candidates.into_iter().next())
}

/// Which machinery produced a recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Binet-ring coefficient matching; the nullspace certificate is a proof
    /// for all n.
    Symbolic,
    /// Window fitting on exact values plus held-out checks; empirical.
    Empirical,
}

/// How a recurrence was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub backend: Backend,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quad_c: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub index: Option<ExpPolyIndex>,
    /// requested degree bound
    pub degree_bound: u32,
    /// degree at which the search hit
    pub hit_degree: u32,
    /// requested order bound
    pub max_order: usize,
    pub nullspace_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_start: Option<i64>,
}

/// Iteration failures of a solved-form recurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IterateError {
    /// The recurrence has no solved form to iterate.
    NoSolvedForm,
    /// The denominator vanished at index n (reported distinctly from any
    /// integrality failure).
    DivisionByZero { n: i64 },
}

impl std::fmt::Display for IterateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IterateError::NoSolvedForm => write!(f, "recurrence has no solved form"),
            IterateError::DivisionByZero { n } => {
                write!(f, "denominator vanished at n = {n}")
            }
        }
    }
}

impl std::error::Error for IterateError {}

/// A concrete annihilating polynomial with integer coefficients, its solved
/// form x_r = N/D when available, and the initial values a(1..r).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RecRepr", into = "RecRepr")]
pub struct NonlinearRecurrence {
    order: usize,
    annihilator: MultiPoly,
    solved: Option<(MultiPoly, MultiPoly)>,
    initial_values: Vec<Integer>,
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct RecRepr {
    order: usize,
    annihilator: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    solved_numerator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    solved_denominator: Option<String>,
    initial_values: Vec<String>,
    provenance: Provenance,
}

impl TryFrom<RecRepr> for NonlinearRecurrence {
    type Error = RelationError;

    fn try_from(r: RecRepr) -> Result<Self, Self::Error> {
        let vars = VarSet::windows(0, r.order + 1);
        let annihilator = parse_poly(&r.annihilator, &vars)?;
        let solved = match (r.solved_numerator, r.solved_denominator) {
            (Some(n), Some(d)) => Some((parse_poly(&n, &vars)?, parse_poly(&d, &vars)?)),
            (None, None) => None,
            _ => {
                return Err(RelationError::BadInput(
                    "solved numerator and denominator must come together".into(),
                ))
            }
        };
        let initial_values: Result<Vec<Integer>, _> = r
            .initial_values
            .iter()
            .map(|s| {
                s.parse::<Integer>()
                    .map_err(|e| RelationError::BadInput(format!("bad integer {s:?}: {e}")))
            })
            .collect();
        NonlinearRecurrence::new(r.order, annihilator, solved, initial_values?, r.provenance)
    }
}

impl From<NonlinearRecurrence> for RecRepr {
    fn from(rec: NonlinearRecurrence) -> RecRepr {
        RecRepr {
            order: rec.order,
            annihilator: poly_to_string(&rec.annihilator),
            solved_numerator: rec.solved.as_ref().map(|(n, _)| poly_to_string(n)),
            solved_denominator: rec.solved.as_ref().map(|(_, d)| poly_to_string(d)),
            initial_values: rec.initial_values.iter().map(|v| v.to_string()).collect(),
            provenance: rec.provenance,
        }
    }
}

impl NonlinearRecurrence {
    pub fn new(
        order: usize,
        annihilator: MultiPoly,
        solved: Option<(MultiPoly, MultiPoly)>,
        initial_values: Vec<Integer>,
        provenance: Provenance,
    ) -> Result<Self, RelationError> {
        if annihilator.vars().len() != order + 1 {
            return Err(RelationError::BadInput(format!(
                "annihilator has {} variables for order {}",
                annihilator.vars().len(),
                order
            )));
        }
        if initial_values.len() != order {
            return Err(RelationError::BadInput(format!(
                "{} initial values for order {}",
                initial_values.len(),
                order
            )));
        }
        let annihilator = annihilator.primitive_part()?;
        if let Some((_, den)) = &solved {
            if den.is_zero() {
                return Err(RelationError::BadInput("zero solved denominator".into()));
            }
        }
        Ok(NonlinearRecurrence {
            order,
            annihilator,
            solved,
            initial_values,
            provenance,
        })
    }

    /// Build from a linear-in-last annihilator, deriving the solved form.
    pub fn from_annihilator(
        annihilator: MultiPoly,
        initial_values: Vec<Integer>,
        provenance: Provenance,
    ) -> Result<Self, RelationError> {
        let order = annihilator.vars().len() - 1;
        let solved = solve_for_last(&annihilator)?;
        NonlinearRecurrence::new(order, annihilator, Some(solved), initial_values, provenance)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn annihilator(&self) -> &MultiPoly {
        &self.annihilator
    }

    pub fn solved(&self) -> Option<(&MultiPoly, &MultiPoly)> {
        self.solved.as_ref().map(|(n, d)| (n, d))
    }

    pub fn initial_values(&self) -> &[Integer] {
        &self.initial_values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Iterate the solved form exactly: returns a(1), ..., a(n_terms) as
    /// rationals (integrality is the verifier's question, not an assumption).
    pub fn iterate(&self, n_terms: usize) -> Result<Vec<Rational>, IterateError> {
        let (num, den) = self.solved.as_ref().ok_or(IterateError::NoSolvedForm)?;
        let mut seq: Vec<Rational> = self
            .initial_values
            .iter()
            .map(|v| Rational::from_integer(v.clone()))
            .collect();
        seq.truncate(n_terms);
        while seq.len() < n_terms {
            let n = seq.len();
            let mut point: Vec<Rational> = seq[n - self.order..].to_vec();
            point.push(Rational::zero()); // x_r slot, absent from N and D
            let d = den.eval(&point).expect("arity matches");
            if d.is_zero() {
                return Err(IterateError::DivisionByZero { n: n as i64 + 1 });
            }
            let v = num.eval(&point).expect("arity matches");
            seq.push(v / d);
        }
        Ok(seq)
    }
}

/// Search outcome plus the cell it was found in.
struct Hit {
    annihilator: MultiPoly,
    hit_degree: u32,
    order: usize,
    nullspace_dim: usize,
}

/// Walk the (degree, order) grid lexicographically, lowest degree first, and
/// return the first certified candidate. Degree-first search keeps the found
/// relation as simple as possible; within a cell the canonical RREF basis is
/// filtered to solvable candidates (degree exactly 1 in x_r) and ordered by
/// the selection rule with genuine-division denominators preferred.
fn search_symbolic(
    c: &QuadParam,
    p: &ExpPolyIndex,
    max_r: usize,
    d: u32,
    f: &CFiniteSequence,
) -> Result<Option<Hit>, RelationError> {
    for dd in 1..=d {
        for r in 2..=max_r {
            let window = binet_window(c, p, r)?;
            let ansatz = RelationAnsatz::windows(r, dd, true);
            let sys = assemble_symbolic_system(&window, &ansatz)?;
            let basis = nullspace(&sys)?;
            if basis.is_empty() {
                continue;
            }
            let dim = basis.len();
            let mut candidates: Vec<MultiPoly> = basis
                .iter()
                .map(|v| ansatz.poly_from_vector(v).primitive_part())
                .collect::<Result<_, _>>()?;
            candidates.retain(|cand| cand.degree_in(r) == 1);
            candidates.sort_by_key(|cand| selection_key(cand, true, r));
            for cand in candidates {
                if solved_iteration_matches(&cand, f, p, r, HOLDOUT_WINDOWS)? {
                    return Ok(Some(Hit {
                        annihilator: cand,
                        hit_degree: dd,
                        order: r,
                        nullspace_dim: dim,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Guard: iterating the solved form from a(1..r) reproduces the sequence for
/// r + extra terms without hitting a zero denominator.
fn solved_iteration_matches(
    annihilator: &MultiPoly,
    f: &CFiniteSequence,
    p: &ExpPolyIndex,
    r: usize,
    extra: usize,
) -> Result<bool, RelationError> {
    let (num, den) = match solve_for_last(annihilator) {
        Ok(parts) => parts,
        Err(_) => return Ok(false),
    };
    let target = subseq_values(f, p, (r + extra) as i64)?;
    let mut seq: Vec<Rational> = target[..r]
        .iter()
        .map(|v| Rational::from_integer(v.clone()))
        .collect();
    for n in r..r + extra {
        let mut point: Vec<Rational> = seq[n - r..].to_vec();
        point.push(Rational::zero());
        let dv = den.eval(&point).expect("arity");
        if dv.is_zero() {
            return Ok(false);
        }
        let next = num.eval(&point).expect("arity") / dv;
        if next != Rational::from_integer(target[n].clone()) {
            return Ok(false);
        }
        seq.push(next);
    }
    Ok(true)
}

/// Nonlinear recurrence for a(n) = f(p(n)) with a polynomial index p, where f
/// is the order-2 family of `c`. The symbolic backend is exact: membership in
/// the assembled system's nullspace is itself a proof for all n.
pub fn find_somos_poly(
    c: &QuadParam,
    p: &ExpPolyIndex,
    max_r: usize,
    d: u32,
) -> Result<Option<NonlinearRecurrence>, RelationError> {
    if !p.is_polynomial() {
        return Err(RelationError::BadInput(
            "find_somos_poly requires a polynomial index (no exponential terms)".into(),
        ));
    }
    find_somos(c, p, max_r, d)
}

/// Nonlinear recurrence for a(n) = f(e^n).
pub fn find_somos_exp(
    c: &QuadParam,
    e: u32,
    max_r: usize,
    d: u32,
) -> Result<Option<NonlinearRecurrence>, RelationError> {
    if e < 2 {
        return Err(RelationError::BadInput(
            "exponential base must be at least 2".into(),
        ));
    }
    find_somos(c, &ExpPolyIndex::exponential(e), max_r, d)
}

fn find_somos(
    c: &QuadParam,
    p: &ExpPolyIndex,
    max_r: usize,
    d: u32,
) -> Result<Option<NonlinearRecurrence>, RelationError> {
    let f = c.sequence();
    let hit = match search_symbolic(c, p, max_r, d, &f)? {
        Some(h) => h,
        None => return Ok(None),
    };
    let initial = subseq_values(&f, p, hit.order as i64)?;
    let provenance = Provenance {
        backend: Backend::Symbolic,
        quad_c: Some(c.value().to_string()),
        index: Some(p.clone()),
        degree_bound: d,
        hit_degree: hit.hit_degree,
        max_order: max_r,
        nullspace_dim: hit.nullspace_dim,
        fit_points: None,
        fit_start: None,
    };
    Ok(Some(NonlinearRecurrence::from_annihilator(
        hit.annihilator,
        initial,
        provenance,
    )?))
}

/// Empirical discovery for arbitrary C-finite sequences: fit on
/// max(M + FIT_MARGIN, points_override) windows, then demand the relation
/// holds on HOLDOUT_WINDOWS extra held-out windows exactly.
pub fn find_empirical(
    f: &CFiniteSequence,
    p: &ExpPolyIndex,
    max_r: usize,
    d: u32,
    points_override: Option<usize>,
) -> Result<Option<NonlinearRecurrence>, RelationError> {
    for dd in 1..=d {
        for r in 2..=max_r {
            let ansatz = RelationAnsatz::windows(r, dd, true);
            let n_points = points_override.unwrap_or(ansatz.len() + FIT_MARGIN);
            let sys = assemble_empirical_system(f, p, &ansatz, n_points)?;
            let start = sys.fit_start().unwrap_or(1);
            let basis = nullspace(&sys)?;
            if basis.is_empty() {
                continue;
            }
            let dim = basis.len();
            let mut candidates: Vec<MultiPoly> = basis
                .iter()
                .map(|v| ansatz.poly_from_vector(v).primitive_part())
                .collect::<Result<_, _>>()?;
            candidates.retain(|cand| cand.degree_in(r) == 1);
            candidates.sort_by_key(|cand| selection_key(cand, true, r));
            for cand in candidates {
                if !holdout_annihilates(&cand, f, p, start + n_points as i64, HOLDOUT_WINDOWS, r)? {
                    continue;
                }
                if !solved_iteration_matches(&cand, f, p, r, HOLDOUT_WINDOWS)? {
                    continue;
                }
                let initial = subseq_values(f, p, r as i64)?;
                let provenance = Provenance {
                    backend: Backend::Empirical,
                    quad_c: None,
                    index: Some(p.clone()),
                    degree_bound: d,
                    hit_degree: dd,
                    max_order: max_r,
                    nullspace_dim: dim,
                    fit_points: Some(n_points),
                    fit_start: Some(start),
                };
                return Ok(Some(NonlinearRecurrence::from_annihilator(
                    cand, initial, provenance,
                )?));
            }
        }
    }
    Ok(None)
}

/// Exact annihilation on held-out windows beyond the fitting range.
fn holdout_annihilates(
    cand: &MultiPoly,
    f: &CFiniteSequence,
    p: &ExpPolyIndex,
    from: i64,
    count: usize,
    r: usize,
) -> Result<bool, RelationError> {
    let checks = par::map_range(count, |i| -> Result<bool, RelationError> {
        let n = from + i as i64;
        let window = crate::cfinite::subseq_window(f, p, n, r)?;
        let point: Vec<Rational> = window
            .into_iter()
            .map(Rational::from_integer)
            .collect();
        Ok(cand.eval(&point)?.is_zero())
    });
    for c in checks {
        if !c? {
            return Ok(false);
        }
    }
    Ok(true)
}

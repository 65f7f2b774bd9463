//! Variable sets and sparse signed exponent vectors.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::PolyError;

/// Index of a variable inside its [`VarSet`].
pub type VarId = usize;

/// An ordered, immutable set of variable names.
///
/// Polynomials only combine when they share a variable set; sharing is by
/// content, with cheap `Arc` cloning.
#[derive(Debug, Clone)]
pub struct VarSet {
    names: Arc<Vec<String>>,
}

impl VarSet {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Self {
        VarSet {
            names: Arc::new(names.into_iter().map(Into::into).collect()),
        }
    }

    /// Window variables `x{start}..x{start+count-1}`.
    pub fn windows(start: usize, count: usize) -> Self {
        VarSet::new((0..count).map(|i| format!("x{}", start + i)).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.names[id]
    }

    pub fn index_of(&self, name: &str) -> Option<VarId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.names, &other.names) || self.names == other.names
    }
}

impl Eq for VarSet {}

/// Sparse map variable id -> nonzero signed exponent.
///
/// Ordering is graded-lexicographic: total degree first, then exponents
/// compared from the highest variable id down (the last declared variable is
/// the most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExponentVector {
    exps: BTreeMap<VarId, i64>,
}

impl ExponentVector {
    pub fn constant() -> Self {
        ExponentVector::default()
    }

    pub fn unit(var: VarId) -> Self {
        let mut exps = BTreeMap::new();
        exps.insert(var, 1);
        ExponentVector { exps }
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, i64)>>(pairs: I) -> Self {
        let mut exps = BTreeMap::new();
        for (v, e) in pairs {
            if e != 0 {
                let cur = exps.entry(v).or_insert(0i64);
                *cur += e;
                if *cur == 0 {
                    exps.remove(&v);
                }
            }
        }
        ExponentVector { exps }
    }

    pub fn exponent(&self, var: VarId) -> i64 {
        self.exps.get(&var).copied().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn total_degree(&self) -> i64 {
        self.exps.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, i64)> + '_ {
        self.exps.iter().map(|(&v, &e)| (v, e))
    }

    /// Product of monomials: componentwise exponent sum, checked.
    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        let mut exps = self.exps.clone();
        for (&v, &e) in &other.exps {
            let cur = exps.entry(v).or_insert(0);
            *cur = cur.checked_add(e).ok_or(PolyError::ExponentOverflow)?;
            if *cur == 0 {
                exps.remove(&v);
            }
        }
        Ok(ExponentVector { exps })
    }

    /// k-th power of the monomial, checked.
    pub fn pow(&self, k: i64) -> Result<Self, PolyError> {
        if k == 0 {
            return Ok(ExponentVector::constant());
        }
        let mut exps = BTreeMap::new();
        for (&v, &e) in &self.exps {
            exps.insert(v, e.checked_mul(k).ok_or(PolyError::ExponentOverflow)?);
        }
        Ok(ExponentVector { exps })
    }

    /// Negate every exponent (Laurent inverse of the monomial).
    pub fn inverse(&self) -> Self {
        ExponentVector {
            exps: self.exps.iter().map(|(&v, &e)| (v, -e)).collect(),
        }
    }

    /// Split into the part supported on `in_vars` and the rest.
    pub fn split(&self, in_vars: &[VarId]) -> (Self, Self) {
        let mut inside = BTreeMap::new();
        let mut outside = BTreeMap::new();
        for (&v, &e) in &self.exps {
            if in_vars.contains(&v) {
                inside.insert(v, e);
            } else {
                outside.insert(v, e);
            }
        }
        (ExponentVector { exps: inside }, ExponentVector { exps: outside })
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Lexicographic from the highest variable id down.
        let mut a = self.exps.iter().rev().peekable();
        let mut b = other.exps.iter().rev().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(&(&va, &ea)), Some(&(&vb, &eb))) => {
                    match va.cmp(&vb) {
                        // Higher-id variable present only on one side: that
                        // side has a nonzero exponent where the other has 0.
                        Ordering::Greater => {
                            if ea != 0 {
                                return ea.cmp(&0);
                            }
                            a.next();
                        }
                        Ordering::Less => {
                            if eb != 0 {
                                return 0.cmp(&eb);
                            }
                            b.next();
                        }
                        Ordering::Equal => {
                            match ea.cmp(&eb) {
                                Ordering::Equal => {}
                                ord => return ord,
                            }
                            a.next();
                            b.next();
                        }
                    }
                }
                (Some(&(_, &ea)), None) => {
                    if ea != 0 {
                        return ea.cmp(&0);
                    }
                    a.next();
                }
                (None, Some(&(_, &eb))) => {
                    if eb != 0 {
                        return 0.cmp(&eb);
                    }
                    b.next();
                }
            }
        }
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(pairs: &[(usize, i64)]) -> ExponentVector {
        ExponentVector::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn graded_before_lex() {
        // degree 2 monomial beats degree 1 regardless of variables
        assert!(ev(&[(0, 2)]) > ev(&[(3, 1)]));
    }

    #[test]
    fn last_variable_most_significant() {
        // x3^2 > x2^2 > x1^2 under precedence x3 > x2 > x1 (ids 2 > 1 > 0)
        assert!(ev(&[(2, 2)]) > ev(&[(1, 2)]));
        assert!(ev(&[(1, 2)]) > ev(&[(0, 2)]));
        // x0^2*x2 > x1^3 at equal degree: compare the x2 exponent first
        assert!(ev(&[(0, 2), (2, 1)]) > ev(&[(1, 3)]));
    }

    #[test]
    fn laurent_exponents_compare() {
        // negative total degree sorts below the constant
        assert!(ev(&[(0, -1)]) < ExponentVector::constant());
        let m = ev(&[(0, 2), (1, -2)]);
        assert_eq!(m.total_degree(), 0);
        assert_eq!(m.inverse(), ev(&[(0, -2), (1, 2)]));
    }

    #[test]
    fn mul_cancels_to_constant() {
        let m = ev(&[(0, 3)]).mul(&ev(&[(0, -3)])).unwrap();
        assert!(m.is_constant());
    }
}

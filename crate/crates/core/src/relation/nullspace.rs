//! Exact rational nullspace by homomorphic imaging.
//!
//! The system is reduced modulo several independent word-size primes
//! (> 2^60), each image is row-reduced over F_p, pivot structures are
//! reconciled across primes (bad primes show a rank drop and are discarded),
//! the canonical nullspace basis is reconstructed through Chinese
//! remaindering plus balanced rational reconstruction, and finally every
//! candidate vector is certified by exact multiplication sys * v = 0. The
//! modular path is an accelerator; the exact certificate is the authority.
//! Since rank mod p never exceeds the rational rank, a certified basis of the
//! mod-p nullspace dimension is provably complete.

use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::par;
use crate::polyarith::{Integer, Rational};

use super::LinearSystem;

/// Failure after exhausting the prime budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeBudgetExhausted {
    pub primes_tried: usize,
}

impl std::fmt::Display for PrimeBudgetExhausted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rational reconstruction failed after {} primes; raise the prime budget",
            self.primes_tried
        )
    }
}

impl std::error::Error for PrimeBudgetExhausted {}

const FIRST_BATCH: usize = 3;
const MAX_PRIMES: usize = 512;

pub(super) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

pub(super) fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // deterministic witness set for all n < 2^64
    'next: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'next;
            }
        }
        return false;
    }
    true
}

/// Deterministic stream of word-size primes just below 2^62.
pub(super) fn prime_stream(count: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate: u64 = (1 << 62) - 1;
    while primes.len() < count {
        if is_prime_u64(candidate) {
            primes.push(candidate);
        }
        candidate -= 2;
    }
    primes
}

/// Row-reduced image of the system modulo one prime.
struct ModImage {
    pivots: Vec<u32>,
    /// canonical nullspace basis mod p, one vector per free column
    basis: Vec<Vec<u64>>,
}

/// RREF over F_p; `None` when some entry's denominator vanishes mod p.
fn reduce_mod(sys: &LinearSystem, p: u64) -> Option<ModImage> {
    let ncols = sys.ncols();
    // pivot rows sorted by pivot column: (col, normalized row)
    let mut piv: Vec<(u32, Vec<u64>)> = Vec::new();
    for i in 0..sys.nrows() {
        let mut row = sys.row_mod(i, p)?;
        for (pc, pr) in &piv {
            let f = row[*pc as usize];
            if f != 0 {
                let fneg = p - f;
                for (x, y) in row.iter_mut().zip(pr.iter()) {
                    *x = (*x + mulmod(fneg, *y, p)) % p;
                }
            }
        }
        let c0 = match row.iter().position(|&x| x != 0) {
            Some(c) => c as u32,
            None => continue,
        };
        let inv = invmod(row[c0 as usize], p);
        for x in row.iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        for (_, pr) in piv.iter_mut() {
            let f = pr[c0 as usize];
            if f != 0 {
                let fneg = p - f;
                for (x, y) in pr.iter_mut().zip(row.iter()) {
                    *x = (*x + mulmod(fneg, *y, p)) % p;
                }
            }
        }
        piv.push((c0, row));
        piv.sort_by_key(|(c, _)| *c);
    }
    let pivots: Vec<u32> = piv.iter().map(|(c, _)| *c).collect();
    let mut basis = Vec::new();
    for fc in 0..ncols as u32 {
        if pivots.binary_search(&fc).is_ok() {
            continue;
        }
        let mut v = vec![0u64; ncols];
        v[fc as usize] = 1;
        for (pc, pr) in &piv {
            let entry = pr[fc as usize];
            if entry != 0 {
                v[*pc as usize] = p - entry;
            }
        }
        basis.push(v);
    }
    Some(ModImage { pivots, basis })
}

/// Balanced rational reconstruction of `x` modulo `m`.
fn rational_reconstruct(x: &Integer, m: &Integer) -> Option<Rational> {
    if x.is_zero() {
        return Some(Rational::zero());
    }
    let bound = (m / Integer::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.clone());
    let (mut t0, mut t1) = (Integer::zero(), Integer::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (num, den) = if t1.is_negative() {
        (-r1, -t1)
    } else {
        (r1, t1)
    };
    if num.gcd(&den) != Integer::one() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Exact basis of the right nullspace.
pub fn nullspace(sys: &LinearSystem) -> Result<Vec<Vec<Rational>>, PrimeBudgetExhausted> {
    let ncols = sys.ncols();
    if ncols == 0 {
        return Ok(Vec::new());
    }
    if sys.nrows() == 0 {
        // every column is free
        return Ok((0..ncols)
            .map(|j| {
                let mut v = vec![Rational::zero(); ncols];
                v[j] = Rational::one();
                v
            })
            .collect());
    }

    let mut images: Vec<(u64, ModImage)> = Vec::new();
    let mut target = FIRST_BATCH;
    let mut drawn = 0usize;
    loop {
        // top up the image pool; primes whose reduction hits a denominator
        // are dropped here
        while images.len() < target && drawn < MAX_PRIMES {
            let take = (target - images.len()).max(1).min(MAX_PRIMES - drawn);
            let fresh: Vec<u64> = prime_stream(drawn + take)[drawn..].to_vec();
            drawn += fresh.len();
            let mut reduced: Vec<Option<(u64, ModImage)>> =
                par::map_slice(&fresh, |&p| reduce_mod(sys, p).map(|im| (p, im)));
            for im in reduced.drain(..).flatten() {
                images.push(im);
            }
        }
        if images.is_empty() {
            return Err(PrimeBudgetExhausted { primes_tried: drawn });
        }

        // reconcile pivot structures: a bad prime shows a rank drop, so keep
        // the maximal-rank majority and discard the rest
        let max_rank = images.iter().map(|(_, im)| im.pivots.len()).max().unwrap();
        let consensus: Vec<u32> = images
            .iter()
            .find(|(_, im)| im.pivots.len() == max_rank)
            .map(|(_, im)| im.pivots.clone())
            .unwrap();
        images.retain(|(_, im)| im.pivots == consensus);

        if max_rank == ncols {
            // rank mod p never exceeds the rational rank, so full column
            // rank modulo one prime already proves a trivial nullspace
            return Ok(Vec::new());
        }

        if !images.is_empty() {
            let dim = ncols - max_rank;
            let modulus: Integer = images.iter().map(|(p, _)| Integer::from(*p)).product();

            // CRT + rational reconstruction per basis vector, then certify
            let recon: Option<Vec<Vec<Rational>>> = (0..dim)
                .map(|k| {
                    (0..ncols)
                        .map(|j| {
                            let mut x = Integer::zero();
                            let mut m = Integer::one();
                            for (p, im) in &images {
                                let pi = Integer::from(*p);
                                let val = Integer::from(im.basis[k][j]);
                                // x' = x + m * ((val - x) * m^{-1} mod p)
                                let minv = mod_inverse(&m, &pi);
                                let delta = (&val - &x).mod_floor(&pi);
                                let corr = (&delta * &minv).mod_floor(&pi);
                                x += &m * corr;
                                m *= pi;
                            }
                            rational_reconstruct(&x, &modulus)
                        })
                        .collect()
                })
                .collect();

            if let Some(vectors) = recon {
                let normalized: Vec<Vec<Rational>> =
                    vectors.iter().map(|v| normalize_vector(v)).collect();
                let all_ok = par::map_slice(&normalized, |v| sys.certify(v))
                    .iter()
                    .all(|&ok| ok);
                if all_ok {
                    return Ok(normalized);
                }
            }
        }

        if drawn >= MAX_PRIMES {
            return Err(PrimeBudgetExhausted { primes_tried: drawn });
        }
        target = (target * 2).min(MAX_PRIMES);
    }
}

fn mod_inverse(m: &Integer, p: &Integer) -> Integer {
    // p prime, m coprime to p
    let e = p - Integer::from(2);
    m.modpow(&e, p)
}

/// Scale to a primitive integer vector whose first nonzero entry is positive.
fn normalize_vector(v: &[Rational]) -> Vec<Rational> {
    let mut den_lcm = Integer::one();
    let mut num_gcd = Integer::zero();
    for q in v {
        den_lcm = den_lcm.lcm(q.denom());
        num_gcd = num_gcd.gcd(q.numer());
    }
    if num_gcd.is_zero() {
        return v.to_vec();
    }
    let mut scale = Rational::new(den_lcm, num_gcd);
    if let Some(first) = v.iter().find(|q| !q.is_zero()) {
        if (first * &scale).is_negative() {
            scale = -scale;
        }
    }
    v.iter().map(|q| q * &scale).collect()
}

pub(super) fn integer_mod(x: &Integer, p: u64) -> u64 {
    x.mod_floor(&Integer::from(p)).to_u64().unwrap()
}

/// Residue of a rational; `None` when the denominator vanishes mod p.
pub(super) fn rational_mod(q: &Rational, p: u64) -> Option<u64> {
    let den = integer_mod(q.denom(), p);
    if den == 0 {
        return None;
    }
    let num = integer_mod(q.numer(), p);
    Some(mulmod(num, invmod(den, p), p))
}

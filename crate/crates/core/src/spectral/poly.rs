use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::exact::{decompose, idempotent_coefficients, Spectrum};
use super::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::field::Entry;
use crate::scheme::Scheme;

/// Whether some adjacency matrix generates the Bose–Mesner algebra under the
/// matrix product.
///
/// Generation is non-unital: the closure of `A_i` is the span of
/// `A_i, A_i^2, A_i^3, ...`, computed exactly in the adjacency basis.
pub fn is_p_polynomial(s: &Scheme) -> bool {
    let r = s.num_relations();
    (0..r).any(|i| {
        let mut power = vec![BigInt::zero(); r];
        power[i] = BigInt::one();
        let mut span = Echelon::new(r);
        while span.insert(&power) && span.rank() < r {
            power = times_adjacency(s, &power, i);
        }
        span.rank() == r
    })
}

/// Whether some primitive idempotent generates the Bose–Mesner algebra under
/// the Hadamard product.
///
/// Generation is non-unital, as in [`is_p_polynomial`]. The span of the
/// Hadamard powers `E, E∘E, ...` has dimension equal to the number of distinct
/// non-zero entries of `E` (a Vandermonde argument), which is what is counted.
pub fn is_q_polynomial(s: &Scheme) -> Result<bool> {
    if !s.is_commutative() {
        return Err(Error::Unsupported(
            "the Q-polynomial test requires a commutative scheme".into(),
        ));
    }
    let r = s.num_relations();
    Ok(match decompose(s, DEFAULT_TOL)? {
        Spectrum::Exact(sd) => idempotent_coefficients(s, &sd)
            .iter()
            .any(|c| distinct_nonzero(c, 0.0) == r),
        Spectrum::Numeric(sd) => idempotent_coefficients(s, &sd)
            .iter()
            .any(|c| distinct_nonzero(c, 1e-9) == r),
    })
}

/// `v A_i` in the adjacency basis: `(v A_i)_k = Σ_j v_j p_{j i}^k`.
fn times_adjacency(s: &Scheme, v: &[BigInt], i: usize) -> Vec<BigInt> {
    let t = s.intersection_numbers();
    (0..s.num_relations())
        .map(|k| {
            t.nonzero_for(k)
                .filter(|&(_, b, _)| b == i)
                .fold(BigInt::zero(), |acc, (a, _, p)| {
                    acc + &v[a] * BigInt::from(p)
                })
        })
        .collect()
}

fn distinct_nonzero<T: Entry>(values: &[T], tol: f64) -> usize {
    let mut seen: Vec<&T> = Vec::new();
    for v in values.iter().filter(|v| !v.is_negligible(tol)) {
        if !seen.iter().any(|w| w.near(v, tol)) {
            seen.push(v);
        }
    }
    seen.len()
}

/// Row-echelon basis over the rationals.
struct Echelon {
    width: usize,
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Echelon {
    fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` to the span; false if it was already there.
    fn insert(&mut self, v: &[BigInt]) -> bool {
        debug_assert_eq!(v.len(), self.width);
        let mut v: Vec<BigRational> = v
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let f = v[*pivot].clone();
                for (a, b) in v.iter_mut().zip(row) {
                    *a -= &f * b;
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = BigRational::one() / &v[pivot];
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[pivot].is_zero() {
                let f = row[pivot].clone();
                for (a, b) in row.iter_mut().zip(&v) {
                    *a -= &f * b;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

//! Bose–Mesner algebra: adjacency matrices, primitive idempotents and the
//! first eigenmatrix, P/Q-polynomial tests, the convolution product and the
//! algebra embedding induced by a surjective morphism.
//!
//! Decompositions are generic over the scalar type (see [`crate::field`]):
//! the floating-point path produces `Complex64` entries, the structural
//! product formulas preserve whatever exact type their inputs use.
//!
//! Column order of the eigenmatrix: `j0` first, then
//! * for generic schemes, descending real part of `P[1][j]` (then imaginary
//!   part), ties broken by discovery order;
//! * for wreath products, the front block followed by the rear block.

mod embed;
mod exact;
mod numeric;
mod poly;
mod structural;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Cyclotomic, Entry, Q};
use crate::scheme::Scheme;

pub use embed::{
    embed_algebra, idempotent_correspondence, AlgebraEmbedding, IdempotentCorrespondence,
};
pub use exact::{decompose, rationalize, Spectrum};
pub use numeric::primitive_idempotents_numeric;
pub use poly::{is_p_polynomial, is_q_polynomial};
pub use structural::{direct_idempotents, wreath_eigenmatrix, wreath_idempotents};

/// Default eigenvalue grouping tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default tolerance for verification and cross-checks.
pub const VERIFY_TOL: f64 = 1e-8;

/// Primitive idempotents `E_j`, their ranks, and the first eigenmatrix `P`
/// with `A_i E_j = P[i][j] E_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T: Entry> {
    pub idempotents: Vec<DMatrix<T>>,
    pub multiplicities: Vec<usize>,
    /// `r x #J`.
    pub eigenmatrix: DMatrix<T>,
    /// Index of `E_{j0} = J / n`.
    pub j0_index: usize,
}

impl<T: Entry> SpectralDecomposition<T> {
    pub fn size(&self) -> usize {
        self.idempotents.first().map_or(0, |e| e.nrows())
    }

    pub fn len(&self) -> usize {
        self.idempotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idempotents.is_empty()
    }

    /// Valencies, read off column `j0` of the eigenmatrix.
    pub fn valencies(&self) -> Vec<T> {
        self.eigenmatrix
            .column(self.j0_index)
            .iter()
            .cloned()
            .collect()
    }

    pub fn map<U: Entry>(&self, f: impl Fn(&T) -> U) -> SpectralDecomposition<U> {
        SpectralDecomposition {
            idempotents: self.idempotents.iter().map(|e| e.map(|v| f(&v))).collect(),
            multiplicities: self.multiplicities.clone(),
            eigenmatrix: self.eigenmatrix.map(|v| f(&v)),
            j0_index: self.j0_index,
        }
    }

    pub fn to_complex(&self) -> SpectralDecomposition<Complex64> {
        self.map(Entry::to_complex)
    }

    /// Checks every decomposition invariant against `s`; exact types ignore `tol`.
    ///
    /// Returns a description of the first failing invariant.
    pub fn check(&self, s: &Scheme, tol: f64) -> std::result::Result<(), String> {
        let n = s.size();
        let r = s.num_relations();
        let nj = self.len();
        if self.multiplicities.len() != nj {
            return Err("multiplicity count differs from idempotent count".into());
        }
        if self.eigenmatrix.shape() != (r, nj) {
            return Err(format!(
                "eigenmatrix has shape {:?}, expected ({r}, {nj})",
                self.eigenmatrix.shape()
            ));
        }
        if s.is_commutative() && nj != r {
            return Err(format!(
                "{nj} idempotents for a commutative scheme with {r} relations"
            ));
        }
        if self.multiplicities.iter().sum::<usize>() != n {
            return Err("multiplicities do not sum to the number of points".into());
        }
        if self.multiplicities[self.j0_index] != 1 {
            return Err("multiplicity of j0 is not 1".into());
        }
        let inv_n = T::from_ratio(Q::new(1, n as i128));
        let e0 = DMatrix::from_element(n, n, inv_n);
        if !matrices_near(&self.idempotents[self.j0_index], &e0, tol) {
            return Err("E_{j0} is not J / n".into());
        }
        for (i, &k) in s.valencies().iter().enumerate() {
            if !self.eigenmatrix[(i, self.j0_index)].near(&T::from_int(k as i64), tol) {
                return Err(format!("P[{i}][j0] differs from the valency {k}"));
            }
        }
        let mut sum = DMatrix::<T>::zeros(n, n);
        for e in &self.idempotents {
            sum += e;
        }
        if !matrices_near(&sum, &DMatrix::identity(n, n), tol) {
            return Err("idempotents do not sum to the identity".into());
        }
        // Once every E_j is known to lie in the Bose–Mesner algebra, products
        // are computed exactly from the intersection numbers.
        let mut coeffs = Vec::with_capacity(nj);
        for (j, ej) in self.idempotents.iter().enumerate() {
            let c = coefficients(s, ej);
            let back = from_coefficients(s, &c).map_err(|e| e.to_string())?;
            if !matrices_near(ej, &back, tol) {
                return Err(format!("E_{j} is not in the Bose–Mesner algebra"));
            }
            let trace = c[0].clone() * T::from_int(n as i64);
            if !trace.near(&T::from_int(self.multiplicities[j] as i64), tol) {
                return Err(format!("trace of E_{j} differs from its multiplicity"));
            }
            coeffs.push(c);
        }
        let near = |a: &[T], b: &[T]| a.iter().zip(b).all(|(x, y)| x.near(y, tol));
        for (j, cj) in coeffs.iter().enumerate() {
            for (k, ck) in coeffs.iter().enumerate() {
                let prod = bm_product(s, cj, ck);
                let ok = if j == k {
                    near(&prod, cj)
                } else {
                    prod.iter().all(|v| v.is_negligible(tol))
                };
                if !ok {
                    return Err(format!("E_{j} E_{k} is not δ_jk E_{j}"));
                }
            }
        }
        for i in 0..r {
            let mut unit = vec![T::zero(); r];
            unit[i] = T::one();
            for (j, cj) in coeffs.iter().enumerate() {
                let lhs = bm_product(s, &unit, cj);
                let p = self.eigenmatrix[(i, j)].clone();
                let rhs: Vec<T> = cj.iter().map(|v| v.clone() * p.clone()).collect();
                if !near(&lhs, &rhs) {
                    return Err(format!("A_{i} E_{j} differs from P[{i}][{j}] E_{j}"));
                }
            }
        }
        Ok(())
    }
}

impl SpectralDecomposition<Q> {
    pub fn to_cyclotomic(&self) -> SpectralDecomposition<Cyclotomic> {
        self.map(|q| Cyclotomic::from(*q))
    }
}

pub(crate) fn matrices_near<T: Entry>(a: &DMatrix<T>, b: &DMatrix<T>, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| x.near(y, tol))
}

/// Largest entrywise distance between two complex matrices.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `A_i[x][y] = 1` iff `R(x, y) = i`.
pub fn adjacency_matrices(s: &Scheme) -> Vec<DMatrix<i64>> {
    adjacency_as::<i64>(s)
}

pub(crate) fn adjacency_as<T>(s: &Scheme) -> Vec<DMatrix<T>>
where
    T: nalgebra::Scalar + Zero + One,
{
    let n = s.size();
    let mut out = vec![DMatrix::<T>::zeros(n, n); s.num_relations()];
    for x in 0..n {
        for y in 0..n {
            out[s.relation(x, y)][(x, y)] = T::one();
        }
    }
    out
}

/// `Σ_i c[i] A_i`.
pub fn from_coefficients<T: Entry>(s: &Scheme, c: &[T]) -> Result<DMatrix<T>> {
    if c.len() != s.num_relations() {
        return Err(Error::LengthMismatch {
            what: "coefficient vector",
            expected: s.num_relations(),
            found: c.len(),
        });
    }
    let n = s.size();
    Ok(DMatrix::from_fn(n, n, |x, y| c[s.relation(x, y)].clone()))
}

/// Coefficients of a Bose–Mesner element, read from one representative cell per label.
pub fn coefficients<T: Entry>(s: &Scheme, m: &DMatrix<T>) -> Vec<T> {
    representatives(s)
        .into_iter()
        .map(|(x, y)| m[(x, y)].clone())
        .collect()
}

/// First cell `(x, y)` (row-major) carrying each label.
pub(crate) fn representatives(s: &Scheme) -> Vec<(usize, usize)> {
    let n = s.size();
    let mut reps = vec![None; s.num_relations()];
    for x in 0..n {
        for y in 0..n {
            let l = s.relation(x, y);
            if reps[l].is_none() {
                reps[l] = Some((x, y));
            }
        }
    }
    reps.into_iter()
        .map(|r| r.expect("relation map is surjective"))
        .collect()
}

/// Matrix product of two Bose–Mesner elements in the adjacency basis,
/// `c_k = Σ_{i,j} a_i b_j p_{ij}^k`.
pub fn bm_product<T: Entry>(s: &Scheme, a: &[T], b: &[T]) -> Vec<T> {
    let t = s.intersection_numbers();
    (0..s.num_relations())
        .map(|k| {
            t.nonzero_for(k).fold(T::zero(), |acc, (i, j, p)| {
                acc + a[i].clone() * b[j].clone() * T::from_int(p as i64)
            })
        })
        .collect()
}

/// Convolution `a • b = (1/n) a b`.
pub fn convolution<T: Entry>(a: &DMatrix<T>, b: &DMatrix<T>) -> Result<DMatrix<T>> {
    if !a.is_square() || a.shape() != b.shape() {
        return Err(Error::LengthMismatch {
            what: "convolution operand",
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    let scale = T::from_ratio(Q::new(1, a.nrows() as i128));
    Ok((a * b) * scale)
}

/// Kronecker product.
pub fn kron<T: Entry>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)].clone() * b[(i % br, j % bc)].clone()
    })
}

/// Serializable form of a decomposition: exact entries as strings, numeric
/// entries as floats (or `[re, im]` pairs when the imaginary part is not negligible).
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumExport {
    pub exact: bool,
    pub j0_index: usize,
    pub multiplicities: Vec<usize>,
    pub eigenmatrix: Vec<Vec<serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub idempotents: Option<Vec<Vec<Vec<serde_json::Value>>>>,
}

fn export_entry<T: Entry>(v: &T) -> serde_json::Value {
    if T::EXACT {
        return serde_json::Value::String(v.render());
    }
    let c = v.to_complex();
    if c.im.abs() <= 1e-12 {
        serde_json::json!(c.re)
    } else {
        serde_json::json!([c.re, c.im])
    }
}

pub fn export<T: Entry>(sd: &SpectralDecomposition<T>, with_idempotents: bool) -> SpectrumExport {
    let rows = |m: &DMatrix<T>| -> Vec<Vec<serde_json::Value>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| export_entry(&m[(i, j)])).collect())
            .collect()
    };
    SpectrumExport {
        exact: T::EXACT,
        j0_index: sd.j0_index,
        multiplicities: sd.multiplicities.clone(),
        eigenmatrix: rows(&sd.eigenmatrix),
        idempotents: with_idempotents.then(|| sd.idempotents.iter().map(rows).collect()),
    }
}

/// Column order for generic schemes: `j0`, then descending `P[1][j]`
/// (real part, then imaginary part), stable in `order`.
pub(crate) fn generic_column_order(row1: Option<&[Complex64]>, j0: usize, tol: f64) -> Vec<usize> {
    let count = row1.map_or(1, |r| r.len());
    let mut rest: Vec<usize> = (0..count).filter(|&j| j != j0).collect();
    if let Some(row) = row1 {
        rest.sort_by(|&a, &b| {
            let (x, y) = (row[a], row[b]);
            let key = |d: f64| {
                if d.abs() <= tol {
                    std::cmp::Ordering::Equal
                } else if d > 0.0 {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            };
            key(x.re - y.re).then(key(x.im - y.im))
        });
    }
    std::iter::once(j0).chain(rest).collect()
}

/// Pairs each matrix of `a` with the nearest matrix of `b` (Frobenius norm).
///
/// Returns `perm` with `a[j] ≈ b[perm[j]]`, or `None` if the pairing is not a
/// bijection or some pair is further apart than `tol` entrywise.
pub fn match_idempotents(
    a: &[DMatrix<Complex64>],
    b: &[DMatrix<Complex64>],
    tol: f64,
) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut perm = Vec::with_capacity(a.len());
    for ea in a {
        let (best, dist) = b
            .iter()
            .enumerate()
            .map(|(k, eb)| (k, max_abs_diff(ea, eb)))
            .min_by(|x, y| x.1.total_cmp(&y.1))?;
        if dist > tol || std::mem::replace(&mut used[best], true) {
            return None;
        }
        perm.push(best);
    }
    Some(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::class_one;

    #[test]
    fn adjacency_of_two_points() {
        let a = adjacency_matrices(&class_one(2).unwrap());
        assert_eq!(a[0], DMatrix::identity(2, 2));
        assert_eq!(a[1], DMatrix::from_row_slice(2, 2, &[0, 1, 1, 0]));
    }

    #[test]
    fn convolution_examples() {
        let j = DMatrix::from_element(3, 3, Q::one());
        assert_eq!(convolution(&j, &j).unwrap(), j);
        let a1 = DMatrix::from_row_slice(2, 2, &[0, 1, 1, 0].map(|v| Q::from_integer(v)));
        let half = Q::new(1, 2);
        assert_eq!(
            convolution(&a1, &a1).unwrap(),
            DMatrix::from_row_slice(2, 2, &[half, Q::zero(), Q::zero(), half])
        );
        let bad = DMatrix::from_element(2, 3, Q::one());
        assert!(convolution(&a1, &bad).is_err());
    }

    #[test]
    fn check_rejects_corruptions() {
        let s = crate::products::kernel_scheme(2, 2).unwrap();
        let sd = super::decompose(&s, DEFAULT_TOL).unwrap();
        let super::Spectrum::Exact(good) = sd else {
            panic!("kernel(2,2) decomposes exactly")
        };
        good.check(&s, 0.0).unwrap();

        let mut bad = good.clone();
        bad.eigenmatrix.swap((1, 1), (1, 2));
        assert!(bad.check(&s, 0.0).unwrap_err().starts_with("A_1 E_"));

        // Moves mass between two cells of the same label in E_1 and back in
        // E_2: the sum is unchanged but E_1 leaves the algebra.
        let mut bad = good.clone();
        let quarter = Cyclotomic::from(Q::new(1, 4));
        bad.idempotents[1][(0, 2)] += quarter.clone();
        bad.idempotents[1][(0, 3)] -= quarter.clone();
        bad.idempotents[2][(0, 2)] -= quarter.clone();
        bad.idempotents[2][(0, 3)] += quarter;
        assert!(bad.check(&s, 0.0).unwrap_err().contains("Bose–Mesner"));

        let mut bad = good.clone();
        bad.idempotents.swap(1, 2);
        assert!(bad.check(&s, 0.0).is_err());
    }

    #[test]
    fn kron_shapes() {
        let i2 = DMatrix::<Q>::identity(2, 2);
        let j3 = DMatrix::from_element(3, 3, Q::one());
        let k = kron(&i2, &j3);
        assert_eq!(k.shape(), (6, 6));
        assert_eq!(k[(0, 2)], Q::one());
        assert_eq!(k[(0, 3)], Q::zero());
    }
}

use nalgebra::DMatrix;
use serde::Serialize;

use super::{coefficients, from_coefficients, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::field::{Entry, Q};
use crate::scheme::{Morphism, Scheme};

/// The injective algebra map `Ψ(c) = c ∘ σ` induced by a surjective morphism,
/// acting on functions of the relation labels (adjacency-basis coefficients).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraEmbedding {
    sigma: Vec<usize>,
    src_size: usize,
    dst_size: usize,
    dst_relations: usize,
}

/// Builds `Ψ` for a valid morphism that is surjective on points.
pub fn embed_algebra(src: &Scheme, dst: &Scheme, m: &Morphism) -> Result<AlgebraEmbedding> {
    if let Some(defect) = m.defect(src, dst)? {
        return Err(Error::InvalidArgument(format!("not a morphism: {defect}")));
    }
    if !m.is_point_surjective(dst.size()) {
        return Err(Error::InvalidArgument(
            "the morphism is not surjective on points".into(),
        ));
    }
    Ok(AlgebraEmbedding {
        sigma: m.sigma.clone(),
        src_size: src.size(),
        dst_size: dst.size(),
        dst_relations: dst.num_relations(),
    })
}

impl AlgebraEmbedding {
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn src_size(&self) -> usize {
        self.src_size
    }

    pub fn dst_size(&self) -> usize {
        self.dst_size
    }

    /// `c ∘ σ`.
    pub fn apply<T: Entry>(&self, c: &[T]) -> Result<Vec<T>> {
        if c.len() != self.dst_relations {
            return Err(Error::LengthMismatch {
                what: "coefficient vector",
                expected: self.dst_relations,
                found: c.len(),
            });
        }
        Ok(self.sigma.iter().map(|&l| c[l].clone()).collect())
    }

    /// `Ψ` on matrices of the target Bose–Mesner algebra.
    pub fn apply_matrix<T: Entry>(
        &self,
        src: &Scheme,
        dst: &Scheme,
        m: &DMatrix<T>,
    ) -> Result<DMatrix<T>> {
        from_coefficients(src, &self.apply(&coefficients(dst, m))?)
    }
}

/// For each primitive idempotent `E'` of the target, the set of source
/// idempotents whose sum is `Ψ(n' E') / n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdempotentCorrespondence {
    pub blocks: Vec<Vec<usize>>,
}

impl IdempotentCorrespondence {
    /// Whether the blocks cover every source idempotent.
    pub fn is_exhaustive(&self, src_idempotents: usize) -> bool {
        self.blocks.iter().map(Vec::len).sum::<usize>() == src_idempotents
    }
}

/// Decomposes the image of every target idempotent (in the `•`-normalization
/// `n E`) over the source idempotents.
///
/// The coefficient of `n E_j` in `Ψ(n' E')` is `tr(Ψ(n' E') E_j) / (n m_j)`;
/// each must be 0 or 1 (within `tol` for inexact types), the expansion must
/// reproduce the image, and the resulting blocks must be non-empty and
/// pairwise disjoint.
pub fn idempotent_correspondence<T: Entry>(
    src: &Scheme,
    src_spec: &SpectralDecomposition<T>,
    dst: &Scheme,
    dst_spec: &SpectralDecomposition<T>,
    psi: &AlgebraEmbedding,
    tol: f64,
) -> Result<IdempotentCorrespondence> {
    let n = src.size() as i128;
    let nd = dst.size() as i128;
    let one = T::one();
    let mut owner: Vec<Option<usize>> = vec![None; src_spec.len()];
    let mut blocks = Vec::with_capacity(dst_spec.len());
    for (jd, ed) in dst_spec.idempotents.iter().enumerate() {
        let scaled = ed.clone() * T::from_int(nd as i64);
        let image = psi.apply_matrix(src, dst, &scaled)?;
        let mut block = Vec::new();
        let mut expansion = DMatrix::<T>::zeros(image.nrows(), image.ncols());
        for (j, ej) in src_spec.idempotents.iter().enumerate() {
            let trace = trace_of_product(&image, ej);
            let scale = T::from_ratio(Q::new(1, n * src_spec.multiplicities[j] as i128));
            let coeff = trace * scale;
            if coeff.near(&one, tol) {
                if let Some(prev) = owner[j].replace(jd) {
                    return Err(Error::NumericalDegeneracy(format!(
                        "source idempotent {j} appears in the images of {prev} and {jd}"
                    )));
                }
                block.push(j);
                expansion += ej * T::from_int(n as i64);
            } else if !coeff.is_negligible(tol) {
                return Err(Error::NumericalDegeneracy(format!(
                    "image of idempotent {jd} has coefficient {} on idempotent {j}",
                    coeff.render()
                )));
            }
        }
        if block.is_empty() {
            return Err(Error::NumericalDegeneracy(format!(
                "image of idempotent {jd} is zero"
            )));
        }
        if !super::matrices_near(&expansion, &image, tol.max(1e-12) * n as f64) {
            return Err(Error::NumericalDegeneracy(format!(
                "image of idempotent {jd} is not a sum of source idempotents"
            )));
        }
        blocks.push(block);
    }
    Ok(IdempotentCorrespondence { blocks })
}

/// `tr(a b)` without forming the product.
fn trace_of_product<T: Entry>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    let mut acc = T::zero();
    for x in 0..a.nrows() {
        for y in 0..a.ncols() {
            acc += a[(x, y)].clone() * b[(y, x)].clone();
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::{class_one, projection_morphism, wreath_product};
    use crate::spectral::{bm_product, decompose, Spectrum};
    use num_traits::{One, Zero};

    fn exact(s: &Scheme) -> SpectralDecomposition<crate::field::Cyclotomic> {
        match decompose(s, 1e-9).unwrap() {
            Spectrum::Exact(sd) => sd,
            Spectrum::Numeric(_) => panic!("expected exact"),
        }
    }

    #[test]
    fn projection_embedding_and_correspondence() {
        let h2 = class_one(2).unwrap();
        let h3 = class_one(3).unwrap();
        let w = wreath_product(&h3, &h2).unwrap();
        let m = projection_morphism(&h3, &h2);
        let psi = embed_algebra(&w, &h3, &m).unwrap();
        assert_eq!(psi.sigma(), &[0, 1, 0]);

        // Ψ(A) = A ⊗ J for the front matrices.
        let a1 = [Q::zero(), Q::one()];
        let img = from_coefficients(&w, &psi.apply(&a1).unwrap()).unwrap();
        assert_eq!(img[(0, 2)], Q::one());
        assert_eq!(img[(0, 1)], Q::zero());

        // Ψ preserves the product: Ψ(a b) = Ψ(a) Ψ(b) / n_Y.
        let prod = bm_product(&h3, &a1, &a1);
        let lhs = psi.apply(&prod).unwrap();
        let rhs: Vec<Q> = bm_product(&w, &psi.apply(&a1).unwrap(), &psi.apply(&a1).unwrap())
            .into_iter()
            .map(|v| v / Q::from_integer(2))
            .collect();
        assert_eq!(lhs, rhs);

        let corr = idempotent_correspondence(&w, &exact(&w), &h3, &exact(&h3), &psi, 0.0).unwrap();
        assert_eq!(corr.blocks, vec![vec![0], vec![1]]);
        assert!(!corr.is_exhaustive(3));
    }

    #[test]
    fn non_surjective_morphism_is_rejected() {
        let h2 = class_one(2).unwrap();
        let m = Morphism {
            f: vec![0, 0],
            sigma: vec![0, 0],
        };
        assert!(embed_algebra(&h2, &h2, &m).is_err());
    }
}

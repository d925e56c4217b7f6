use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{
    bm_product, coefficients, from_coefficients, primitive_idempotents_numeric, wreath_idempotents,
    SpectralDecomposition,
};
use crate::error::Result;
use crate::field::{Cyclotomic, Entry, Q};
use crate::products::wreath_factors;
use crate::scheme::Scheme;

/// Rounding slack when recognizing rationals from floating-point values.
const RECOGNIZE: f64 = 1e-6;

/// Recovers an exact rational decomposition from a numeric one.
///
/// Eigenvalues must round to integers and idempotent coefficients to
/// fractions with denominator dividing `n k_i`. The candidate is accepted only
/// after an exact check of the idempotent identities in the Bose–Mesner
/// algebra (via the intersection numbers), so `Some` is always exact.
pub fn rationalize(
    s: &Scheme,
    sd: &SpectralDecomposition<Complex64>,
) -> Option<SpectralDecomposition<Q>> {
    let n = s.size();
    let r = s.num_relations();
    let k = s.valencies();
    let reps = super::representatives(s);

    let eigenmatrix = {
        let mut m = DMatrix::<Q>::zeros(r, sd.len());
        for ((i, j), v) in sd
            .eigenmatrix
            .iter()
            .enumerate()
            .map(|(idx, v)| ((idx % r, idx / r), v))
        {
            m[(i, j)] = Q::from_integer(recognize(*v, 1)?);
        }
        m
    };
    let coeffs: Vec<Vec<Q>> = sd
        .idempotents
        .iter()
        .map(|e| {
            (0..r)
                .map(|i| {
                    let denom = (n * k[i]) as i128;
                    let (x, y) = reps[i];
                    recognize(e[(x, y)], denom).map(|num| Q::new(num, denom))
                })
                .collect::<Option<Vec<Q>>>()
        })
        .collect::<Option<_>>()?;

    // Exact verification in coefficient space.
    let mut total = vec![Q::zero(); r];
    for (j, cj) in coeffs.iter().enumerate() {
        for (t, c) in total.iter_mut().zip(cj) {
            *t += *c;
        }
        if cj[0] * Q::from_integer(n as i128) != Q::from_integer(sd.multiplicities[j] as i128) {
            return None;
        }
        for (l, cl) in coeffs.iter().enumerate() {
            let prod = bm_product(s, cj, cl);
            let want: &[Q] = if j == l { cj } else { &vec![Q::zero(); r] };
            if prod != want {
                return None;
            }
        }
        for i in 0..r {
            let mut a = vec![Q::zero(); r];
            a[i] = Q::one();
            let lhs = bm_product(s, &a, cj);
            if lhs
                .iter()
                .zip(cj)
                .any(|(x, y)| *x != eigenmatrix[(i, j)] * *y)
            {
                return None;
            }
        }
    }
    if total
        .iter()
        .enumerate()
        .any(|(i, t)| *t != if i == 0 { Q::one() } else { Q::zero() })
    {
        return None;
    }

    let idempotents = coeffs
        .iter()
        .map(|c| from_coefficients(s, c).expect("coefficient length is r"))
        .collect();
    Some(SpectralDecomposition {
        idempotents,
        multiplicities: sd.multiplicities.clone(),
        eigenmatrix,
        j0_index: sd.j0_index,
    })
}

/// `round(v * denom)` when `v * denom` is within rounding slack of a real integer.
fn recognize(v: Complex64, denom: i128) -> Option<i128> {
    let scaled = v * denom as f64;
    let rounded = scaled.re.round();
    ((scaled.re - rounded).abs() <= RECOGNIZE && scaled.im.abs() <= RECOGNIZE)
        .then_some(rounded as i128)
}

/// A decomposition in exact arithmetic when one could be certified, otherwise
/// in floating point.
#[derive(Debug, Clone)]
pub enum Spectrum {
    Exact(SpectralDecomposition<Cyclotomic>),
    Numeric(SpectralDecomposition<Complex64>),
}

impl Spectrum {
    pub fn is_exact(&self) -> bool {
        matches!(self, Spectrum::Exact(_))
    }

    pub fn to_complex(&self) -> SpectralDecomposition<Complex64> {
        match self {
            Spectrum::Exact(sd) => sd.to_complex(),
            Spectrum::Numeric(sd) => sd.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Spectrum::Exact(sd) => sd.len(),
            Spectrum::Numeric(sd) => sd.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multiplicities(&self) -> &[usize] {
        match self {
            Spectrum::Exact(sd) => &sd.multiplicities,
            Spectrum::Numeric(sd) => &sd.multiplicities,
        }
    }

    pub fn export(&self, with_idempotents: bool) -> super::SpectrumExport {
        match self {
            Spectrum::Exact(sd) => super::export(sd, with_idempotents),
            Spectrum::Numeric(sd) => super::export(sd, with_idempotents),
        }
    }
}

/// Decomposition of a commutative scheme.
///
/// The scheme is first split into indecomposable wreath factors; each factor
/// is decomposed numerically and, where possible, certified exactly. The
/// factor decompositions are then combined with the wreath formulas, so
/// wreath products get the front/rear column order.
pub fn decompose(s: &Scheme, tol: f64) -> Result<Spectrum> {
    let factors = wreath_factors(s);
    let mut numeric = Vec::with_capacity(factors.len());
    let mut exact = Vec::with_capacity(factors.len());
    for f in &factors {
        let sd = primitive_idempotents_numeric(f, tol)?;
        exact.push(rationalize(f, &sd).map(|q| q.to_cyclotomic()));
        numeric.push(sd);
    }
    if exact.iter().all(Option::is_some) {
        let parts: Vec<_> = exact.into_iter().map(Option::unwrap).collect();
        fold(parts).map(Spectrum::Exact)
    } else {
        fold(numeric).map(Spectrum::Numeric)
    }
}

fn fold<T: Entry>(parts: Vec<SpectralDecomposition<T>>) -> Result<SpectralDecomposition<T>> {
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one factor");
    it.try_fold(first, |acc, next| wreath_idempotents(&acc, &next))
}

/// Reads the coefficient vectors of every idempotent.
pub(crate) fn idempotent_coefficients<T: Entry>(
    s: &Scheme,
    sd: &SpectralDecomposition<T>,
) -> Vec<Vec<T>> {
    sd.idempotents.iter().map(|e| coefficients(s, e)).collect()
}

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{adjacency_as, generic_column_order, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::scheme::Scheme;

/// Entries closer to zero than this are snapped to zero in the output.
const SNAP: f64 = 1e-12;

/// Primitive idempotents of a commutative scheme by simultaneous
/// diagonalization in floating point.
///
/// The adjacency matrices are normal and commute, so their joint eigenspaces
/// are orthogonal. Starting from the whole space, each subspace on which some
/// `A_i` is not scalar is split along the eigenspaces of the Hermitian (then
/// skew-Hermitian) part of a restricted operator. Eigenvalues closer than
/// `tol` (relative to the spectral radius) are grouped.
pub fn primitive_idempotents_numeric(
    s: &Scheme,
    tol: f64,
) -> Result<SpectralDecomposition<Complex64>> {
    if !s.is_commutative() {
        return Err(Error::Unsupported(
            "primitive idempotents require a commutative scheme".into(),
        ));
    }
    let n = s.size();
    let r = s.num_relations();
    let adj: Vec<DMatrix<Complex64>> = adjacency_as(s);
    let mut mix = DMatrix::<Complex64>::zeros(n, n);
    for (i, a) in adj.iter().enumerate() {
        mix += a * Complex64::new(1.0 / (i as f64 + 2.0), 0.0);
    }

    let mut finished = Vec::new();
    let mut stack = vec![DMatrix::<Complex64>::identity(n, n)];
    while let Some(q) = stack.pop() {
        let loose: Vec<usize> = (0..r)
            .filter(|&i| !acts_as_scalar(&adj[i], &q, tol))
            .collect();
        if loose.is_empty() {
            finished.push(q);
            continue;
        }
        if finished.len() + stack.len() + 1 >= r {
            return Err(Error::NumericalDegeneracy(format!(
                "more than {r} joint eigenspaces; tolerance {tol} too tight?"
            )));
        }
        let operators = std::iter::once(&mix).chain(loose.iter().map(|&i| &adj[i]));
        let pieces = operators
            .filter_map(|op| split(op, &q, tol))
            .next()
            .ok_or_else(|| {
                Error::NumericalDegeneracy(format!(
                    "could not separate a {}-dimensional subspace at tolerance {tol}",
                    q.ncols()
                ))
            })?;
        stack.extend(pieces.into_iter().rev());
    }
    if finished.len() != r {
        return Err(Error::NumericalDegeneracy(format!(
            "found {} joint eigenspaces, expected {r}",
            finished.len()
        )));
    }

    let idempotents: Vec<DMatrix<Complex64>> = finished
        .iter()
        .map(|q| snap_matrix(q * q.adjoint()))
        .collect();
    let multiplicities: Vec<usize> = finished.iter().map(|q| q.ncols()).collect();
    let eigen = DMatrix::from_fn(r, r, |i, j| {
        let t = (&adj[i] * &idempotents[j]).trace();
        snap(t / multiplicities[j] as f64)
    });

    let ones = DMatrix::from_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
    let j0 = (0..r)
        .min_by(|&a, &b| {
            super::max_abs_diff(&idempotents[a], &ones)
                .total_cmp(&super::max_abs_diff(&idempotents[b], &ones))
        })
        .expect("at least one idempotent");
    if multiplicities[j0] != 1 || super::max_abs_diff(&idempotents[j0], &ones) > tol.max(1e-8) {
        return Err(Error::NumericalDegeneracy(
            "no idempotent matches J / n".into(),
        ));
    }

    let row1: Option<Vec<Complex64>> = (r > 1).then(|| eigen.row(1).iter().copied().collect());
    let order = generic_column_order(row1.as_deref(), j0, tol.max(1e-9));
    Ok(SpectralDecomposition {
        idempotents: order.iter().map(|&j| idempotents[j].clone()).collect(),
        multiplicities: order.iter().map(|&j| multiplicities[j]).collect(),
        eigenmatrix: DMatrix::from_fn(r, r, |i, j| eigen[(i, order[j])]),
        j0_index: 0,
    })
}

fn snap(z: Complex64) -> Complex64 {
    let clean = |v: f64| if v.abs() < SNAP { 0.0 } else { v };
    Complex64::new(clean(z.re), clean(z.im))
}

fn snap_matrix(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.map(snap)
}

/// Whether `a` restricted to the column span of the orthonormal `q` is a scalar.
fn acts_as_scalar(a: &DMatrix<Complex64>, q: &DMatrix<Complex64>, tol: f64) -> bool {
    let y = a * q;
    let d = q.ncols() as f64;
    let mu = (q.adjoint() * &y).trace() / d;
    let residual = (y - q * mu).norm();
    residual <= 10.0 * tol.max(1e-12) * (1.0 + a.norm())
}

/// Splits span(`q`) into eigenspaces of the restriction of `op`, or `None`
/// if neither the Hermitian nor the skew-Hermitian part separates it.
fn split(
    op: &DMatrix<Complex64>,
    q: &DMatrix<Complex64>,
    tol: f64,
) -> Option<Vec<DMatrix<Complex64>>> {
    let b = q.adjoint() * op * q;
    let hermitian = (&b + b.adjoint()) * Complex64::new(0.5, 0.0);
    let skew = (&b - b.adjoint()) * Complex64::new(0.0, -0.5);
    [hermitian, skew].into_iter().find_map(|h| {
        let eig = SymmetricEigen::new(h);
        let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let scale = eig.eigenvalues.amax().max(1.0);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &k in &idx {
            match groups.last_mut() {
                Some(g)
                    if (eig.eigenvalues[k] - eig.eigenvalues[*g.last().unwrap()]).abs()
                        <= tol * scale =>
                {
                    g.push(k)
                }
                _ => groups.push(vec![k]),
            }
        }
        (groups.len() > 1).then(|| {
            groups
                .iter()
                .map(|g| {
                    let cols: Vec<_> = g.iter().map(|&k| eig.eigenvectors.column(k)).collect();
                    q * DMatrix::from_columns(&cols)
                })
                .collect()
        })
    })
}

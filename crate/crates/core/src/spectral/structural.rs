use nalgebra::DMatrix;

use super::{kron, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::field::{Entry, Q};

/// Decomposition of `X ≀ Y` from decompositions of the factors.
///
/// Front idempotents `E_{jX} ⊗ J/n_Y` (multiplicity `m_{jX}`) come first, in
/// the order of `x`; then rear idempotents `I ⊗ E_{jY}` for `jY ≠ j0`
/// (multiplicity `n_X m_{jY}`), in the order of `y`.
pub fn wreath_idempotents<T: Entry>(
    x: &SpectralDecomposition<T>,
    y: &SpectralDecomposition<T>,
) -> Result<SpectralDecomposition<T>> {
    let nx = x.size();
    let ny = y.size();
    let jy = y.j0_index;
    let avg = DMatrix::from_element(ny, ny, T::from_ratio(Q::new(1, ny as i128)));
    let ident = DMatrix::<T>::identity(nx, nx);

    let mut idempotents: Vec<DMatrix<T>> = x.idempotents.iter().map(|e| kron(e, &avg)).collect();
    let mut multiplicities = x.multiplicities.clone();
    for (j, e) in y.idempotents.iter().enumerate().filter(|&(j, _)| j != jy) {
        idempotents.push(kron(&ident, e));
        multiplicities.push(nx * y.multiplicities[j]);
    }
    let py = move_column_first(&y.eigenmatrix, jy);
    Ok(SpectralDecomposition {
        idempotents,
        multiplicities,
        eigenmatrix: wreath_eigenmatrix(&x.eigenmatrix, &py, ny, &y.valencies())?,
        j0_index: x.j0_index,
    })
}

fn move_column_first<T: Entry>(m: &DMatrix<T>, j: usize) -> DMatrix<T> {
    let order: Vec<usize> = std::iter::once(j)
        .chain((0..m.ncols()).filter(|&c| c != j))
        .collect();
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, order[c])].clone())
}

/// Eigenmatrix of `X ≀ Y` from the factor eigenmatrices.
///
/// `py` must have its `j0` column first; `ky` are the valencies of `Y`. Rows
/// follow the wreath label order (0, front labels, rear labels); columns
/// follow [`wreath_idempotents`]. Blocks:
/// * front relation on front idempotent: `n_Y P_X`;
/// * rear relation on front idempotent: `k_{iY}`;
/// * front relation on rear idempotent: 0;
/// * rear relation on rear idempotent: `P_Y`.
pub fn wreath_eigenmatrix<T: Entry>(
    px: &DMatrix<T>,
    py: &DMatrix<T>,
    ny: usize,
    ky: &[T],
) -> Result<DMatrix<T>> {
    let (rx, jx) = px.shape();
    let (ry, jy) = py.shape();
    if ky.len() != ry {
        return Err(Error::LengthMismatch {
            what: "rear valencies",
            expected: ry,
            found: ky.len(),
        });
    }
    if rx == 0 || ry == 0 || jx == 0 || jy == 0 {
        return Err(Error::InvalidArgument("empty eigenmatrix".into()));
    }
    let scale = T::from_int(ny as i64);
    let rows = rx + ry - 1;
    let cols = jx + jy - 1;
    Ok(DMatrix::from_fn(rows, cols, |l, c| {
        // Label l is front label l, or rear label iy (0 when l == 0).
        let front = (1..rx).contains(&l);
        let iy = if front || l == 0 { 0 } else { l + 1 - rx };
        match (front, c < jx) {
            (true, true) => px[(l, c)].clone() * scale.clone(),
            (true, false) => T::zero(),
            (false, true) => ky[iy].clone(),
            (false, false) => py[(iy, c - jx + 1)].clone(),
        }
    }))
}

/// Decomposition of `X × Y`: `E_{jX} ⊗ E_{jY}` at index `jX * #J_Y + jY`,
/// with `P[(iX, iY)][(jX, jY)] = P_X[iX][jX] P_Y[iY][jY]`.
pub fn direct_idempotents<T: Entry>(
    x: &SpectralDecomposition<T>,
    y: &SpectralDecomposition<T>,
) -> SpectralDecomposition<T> {
    let (ry, jy) = y.eigenmatrix.shape();
    let (rx, jx) = x.eigenmatrix.shape();
    let mut idempotents = Vec::with_capacity(jx * jy);
    let mut multiplicities = Vec::with_capacity(jx * jy);
    for (a, ea) in x.idempotents.iter().enumerate() {
        for (b, eb) in y.idempotents.iter().enumerate() {
            idempotents.push(kron(ea, eb));
            multiplicities.push(x.multiplicities[a] * y.multiplicities[b]);
        }
    }
    let eigenmatrix = DMatrix::from_fn(rx * ry, jx * jy, |i, j| {
        x.eigenmatrix[(i / ry, j / jy)].clone() * y.eigenmatrix[(i % ry, j % jy)].clone()
    });
    SpectralDecomposition {
        idempotents,
        multiplicities,
        eigenmatrix,
        j0_index: x.j0_index * jy + y.j0_index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::{class_one, direct_product, wreath_product};
    use crate::spectral::{primitive_idempotents_numeric, rationalize};

    fn exact(v: usize) -> SpectralDecomposition<Q> {
        let s = class_one(v).unwrap();
        rationalize(&s, &primitive_idempotents_numeric(&s, 1e-9).unwrap()).unwrap()
    }

    fn q(v: i128) -> Q {
        Q::from_integer(v)
    }

    #[test]
    fn two_by_two_wreath_eigenmatrix() {
        let h = exact(2);
        let sd = wreath_idempotents(&h, &h).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[1, 1, 1, 2, -2, 0, 1, 1, -1].map(q));
        assert_eq!(sd.eigenmatrix, expected);
        assert_eq!(sd.multiplicities, vec![1, 1, 2]);
        sd.check(
            &wreath_product(&class_one(2).unwrap(), &class_one(2).unwrap()).unwrap(),
            0.0,
        )
        .unwrap();
    }

    #[test]
    fn shape_errors() {
        let p = DMatrix::from_element(2, 2, q(1));
        assert!(wreath_eigenmatrix(&p, &p, 2, &[q(1)]).is_err());
    }

    #[test]
    fn direct_product_has_product_of_idempotent_counts() {
        let (a, b) = (exact(2), exact(3));
        let sd = direct_idempotents(&a, &b);
        assert_eq!(sd.len(), a.len() * b.len());
        let s = direct_product(&class_one(2).unwrap(), &class_one(3).unwrap()).unwrap();
        sd.check(&s, 0.0).unwrap();
    }
}

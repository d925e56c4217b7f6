//! Scheme constructors: direct and wreath products, wreath powers, kernel
//! schemes, class-one schemes and the wreath projection.
//!
//! Index conventions shared by everything downstream:
//!
//! * a point `(a, b)` of a product `X * Y` is encoded as `a * n_y + b`, so the
//!   adjacency matrices come out in standard Kronecker order;
//! * direct product label `(i, j)` is `i * r_y + j`;
//! * wreath product labels are `0` (identity), then the non-identity labels of
//!   `X` in order (`1..r_x`), then the non-identity labels of `Y` shifted to
//!   `r_x..r_x + r_y - 1`.

use crate::error::{Error, Result};
use crate::scheme::{Morphism, Scheme};

/// Default bound on the number of points a constructor may produce.
pub const DEFAULT_MAX_POINTS: usize = 4096;

/// Upper bound on the number of points a constructor may produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeCap(pub usize);

impl Default for SizeCap {
    fn default() -> Self {
        SizeCap(DEFAULT_MAX_POINTS)
    }
}

impl SizeCap {
    pub fn check(self, requested: u128) -> Result<usize> {
        if requested > self.0 as u128 {
            return Err(Error::ResourceCap {
                requested,
                cap: self.0,
            });
        }
        Ok(requested as usize)
    }

    pub fn direct_product(self, x: &Scheme, y: &Scheme) -> Result<Scheme> {
        let n = self.check(x.size() as u128 * y.size() as u128)?;
        let (nx, ny) = (x.size(), y.size());
        let ry = y.num_relations();
        let mut cells = vec![0u32; n * n];
        for a in 0..nx {
            for c in 0..nx {
                let i = x.relation(a, c);
                for b in 0..ny {
                    let row = (a * ny + b) * n + c * ny;
                    for d in 0..ny {
                        cells[row + d] = (i * ry + y.relation(b, d)) as u32;
                    }
                }
            }
        }
        Ok(Scheme::from_cells(n, x.num_relations() * ry, cells))
    }

    pub fn wreath_product(self, x: &Scheme, y: &Scheme) -> Result<Scheme> {
        let n = self.check(x.size() as u128 * y.size() as u128)?;
        let (nx, ny) = (x.size(), y.size());
        let shift = x.num_relations() as u32 - 1;
        let mut cells = vec![0u32; n * n];
        for a in 0..nx {
            for c in 0..nx {
                let front = x.relation(a, c) as u32;
                for b in 0..ny {
                    let row = (a * ny + b) * n + c * ny;
                    for d in 0..ny {
                        cells[row + d] = if a != c {
                            front
                        } else if b != d {
                            shift + y.relation(b, d) as u32
                        } else {
                            0
                        };
                    }
                }
            }
        }
        Ok(Scheme::from_cells(
            n,
            x.num_relations() + y.num_relations() - 1,
            cells,
        ))
    }

    pub fn wreath_power(self, x: &Scheme, n: usize) -> Result<Scheme> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "wreath power exponent must be >= 1".into(),
            ));
        }
        self.check(
            (x.size() as u128)
                .checked_pow(n as u32)
                .unwrap_or(u128::MAX),
        )?;
        let mut acc = x.clone().without_labels();
        for _ in 1..n {
            acc = self.wreath_product(&acc, x)?;
        }
        Ok(acc)
    }

    pub fn kernel_scheme(self, n: usize, v: usize) -> Result<Scheme> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "kernel scheme length n must be >= 1".into(),
            ));
        }
        if v < 2 {
            return Err(Error::InvalidArgument(
                "kernel scheme alphabet size v must be >= 2".into(),
            ));
        }
        let size = self.check((v as u128).checked_pow(n as u32).unwrap_or(u128::MAX))?;
        let words: Vec<Vec<usize>> = (0..size).map(|p| digits(p, v, n)).collect();
        let mut cells = vec![0u32; size * size];
        for x in 0..size {
            for y in 0..size {
                // smallest differing coordinate, 1-based; 0 stands for equality
                cells[x * size + y] = words[x]
                    .iter()
                    .zip(&words[y])
                    .position(|(a, b)| a != b)
                    .map_or(0, |i| i as u32 + 1);
            }
        }
        Ok(Scheme::from_cells(size, n + 1, cells))
    }
}

/// Base-`v` digits of `p`, most significant first, padded to `len`.
fn digits(mut p: usize, v: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = p % v;
        p /= v;
    }
    out
}

pub fn direct_product(x: &Scheme, y: &Scheme) -> Result<Scheme> {
    SizeCap::default().direct_product(x, y)
}

pub fn wreath_product(x: &Scheme, y: &Scheme) -> Result<Scheme> {
    SizeCap::default().wreath_product(x, y)
}

/// `X^{≀1} = X`, `X^{≀n} = X^{≀(n-1)} ≀ X`.
pub fn wreath_power(x: &Scheme, n: usize) -> Result<Scheme> {
    SizeCap::default().wreath_power(x, n)
}

/// Words of length `n` over `0..v`, related by their first differing coordinate.
pub fn kernel_scheme(n: usize, v: usize) -> Result<Scheme> {
    SizeCap::default().kernel_scheme(n, v)
}

/// `H(1, v)`: the complete graph on `v` points as a one-class scheme.
pub fn class_one(v: usize) -> Result<Scheme> {
    if v < 2 {
        return Err(Error::InvalidArgument(
            "class-one scheme needs v >= 2".into(),
        ));
    }
    SizeCap::default().check(v as u128)?;
    let cells = (0..v * v).map(|c| u32::from(c / v != c % v)).collect();
    Ok(Scheme::from_cells(v, 2, cells))
}

/// Projection `X ≀ Y -> X`: drops the `Y` coordinate, keeps front labels and
/// sends every rear label to the identity.
pub fn projection_morphism(x: &Scheme, y: &Scheme) -> Morphism {
    let ny = y.size();
    let rx = x.num_relations();
    let r = rx + y.num_relations() - 1;
    Morphism {
        f: (0..x.size() * ny).map(|p| p / ny).collect(),
        sigma: (0..r).map(|i| if i < rx { i } else { 0 }).collect(),
    }
}

/// Projection `X × Y -> X` of the direct product onto its first factor.
pub fn direct_projection_morphism(x: &Scheme, y: &Scheme) -> Morphism {
    let ny = y.size();
    let ry = y.num_relations();
    Morphism {
        f: (0..x.size() * ny).map(|p| p / ny).collect(),
        sigma: (0..x.num_relations() * ry).map(|l| l / ry).collect(),
    }
}

/// Splits a scheme into wreath factors under the label convention above.
///
/// Returns `[X_1, ..., X_m]` with each `X_i` wreath-indecomposable and
/// `X_1 ≀ ... ≀ X_m` equal to `s` cell for cell. A scheme that does not
/// decompose comes back as a single factor.
pub fn wreath_factors(s: &Scheme) -> Vec<Scheme> {
    let mut out = Vec::new();
    let mut rest = s.clone().without_labels();
    loop {
        match split_front(&rest) {
            Some((front, rear)) => {
                out.push(front);
                rest = rear;
            }
            None => {
                out.push(rest);
                return out;
            }
        }
    }
}

/// Finds the smallest `n_x > 1` such that `s = X ≀ Y` with `#X = n_x`, `#Y > 1`.
fn split_front(s: &Scheme) -> Option<(Scheme, Scheme)> {
    let n = s.size();
    (2..n)
        .filter(|nx| n.is_multiple_of(*nx))
        .find_map(|nx| try_split(s, nx, n / nx))
}

fn try_split(s: &Scheme, nx: usize, ny: usize) -> Option<(Scheme, Scheme)> {
    // Labels appearing between distinct blocks are the front labels 1..rx.
    let mut front_max = 0;
    let mut x_cells = vec![0u32; nx * nx];
    for a in 0..nx {
        for c in 0..nx {
            if a == c {
                continue;
            }
            let l = s.relation(a * ny, c * ny);
            for b in 0..ny {
                for d in 0..ny {
                    if s.relation(a * ny + b, c * ny + d) != l {
                        return None;
                    }
                }
            }
            front_max = front_max.max(l);
            x_cells[a * nx + c] = l as u32;
        }
    }
    let rx = front_max + 1;
    let mut y_cells = vec![0u32; ny * ny];
    for b in 0..ny {
        for d in 0..ny {
            let l = s.relation(b, d);
            if b != d && l < rx {
                return None;
            }
            y_cells[b * ny + d] = if b == d { 0 } else { (l - rx + 1) as u32 };
        }
    }
    for a in 1..nx {
        for b in 0..ny {
            for d in 0..ny {
                if s.relation(a * ny + b, a * ny + d) != s.relation(b, d) {
                    return None;
                }
            }
        }
    }
    let ry = s.num_relations() + 1 - rx;
    let x = crate::scheme::RelationMatrix::from_cells_unchecked(nx, rx, x_cells);
    let y = crate::scheme::RelationMatrix::from_cells_unchecked(ny, ry, y_cells);
    let x = Scheme::try_from(x).ok()?;
    let y = Scheme::try_from(y).ok()?;
    Some((x, y))
}

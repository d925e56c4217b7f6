//! Scalar types for Bose–Mesner computations.
//!
//! Three entry types share the [`Entry`] interface: exact rationals [`Q`],
//! exact elements of cyclotomic fields [`Cyclotomic`], and `Complex64` for the
//! floating-point path.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign, Scalar};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational scalars.
pub type Q = num_rational::Ratio<i128>;

pub trait Entry:
    Scalar
    + Zero
    + One
    + ClosedAddAssign
    + ClosedSubAssign
    + ClosedMulAssign
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// Whether equality is exact (tolerances are ignored).
    const EXACT: bool;

    fn from_ratio(q: Q) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(Q::from_integer(v as i128))
    }

    fn to_complex(&self) -> Complex64;

    fn conj(&self) -> Self;

    /// Equality up to `tol` (exact types compare exactly).
    fn near(&self, other: &Self, tol: f64) -> bool;

    fn is_negligible(&self, tol: f64) -> bool {
        self.near(&Self::zero(), tol)
    }

    /// Decimal-string or numeric rendering used by the JSON exports.
    fn render(&self) -> String;
}

impl Entry for Q {
    const EXACT: bool = true;

    fn from_ratio(q: Q) -> Self {
        q
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(q_to_f64(self), 0.0)
    }

    fn conj(&self) -> Self {
        *self
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

pub(crate) fn q_to_f64(q: &Q) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

impl Entry for Complex64 {
    const EXACT: bool = false;

    fn from_ratio(q: Q) -> Self {
        Complex64::new(q_to_f64(&q), 0.0)
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }

    fn render(&self) -> String {
        if self.im == 0.0 {
            format!("{}", self.re)
        } else {
            format!("{}{:+}i", self.re, self.im)
        }
    }
}

/// An element of the cyclotomic field `Q(ζ_m)`, stored in the power basis
/// `1, ζ, ..., ζ^{φ(m)-1}` and reduced modulo the cyclotomic polynomial `Φ_m`.
///
/// Elements of different fields are combined by embedding both into
/// `Q(ζ_lcm)`; equality works the same way.
#[derive(Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<Q>,
}

fn cyclotomic_polynomial(m: u32) -> Arc<Vec<i128>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i128>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cyclotomic cache poisoned").get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d of m
    let mut poly = vec![0i128; m as usize + 1];
    poly[0] = -1;
    poly[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            let div = cyclotomic_polynomial(d);
            poly = divide_monic(&poly, &div);
        }
    }
    let poly = Arc::new(poly);
    cache
        .lock()
        .expect("cyclotomic cache poisoned")
        .insert(m, poly.clone());
    poly
}

/// Exact quotient of integer polynomials (low degree first); `div` must be monic.
fn divide_monic(num: &[i128], div: &[i128]) -> Vec<i128> {
    let dd = div.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i128; num.len() - dd];
    for k in (dd..num.len()).rev() {
        let c = rem[k];
        if c != 0 {
            quot[k - dd] = c;
            for (t, &dc) in div.iter().enumerate() {
                rem[k - dd + t] -= c * dc;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "division was not exact");
    quot
}

fn reduce(mut poly: Vec<Q>, m: u32) -> Vec<Q> {
    let phi = cyclotomic_polynomial(m);
    let deg = phi.len() - 1;
    if poly.len() > deg {
        for k in (deg..poly.len()).rev() {
            let c = poly[k];
            if !c.is_zero() {
                for (t, &pc) in phi.iter().enumerate() {
                    poly[k - deg + t] -= c * Q::from_integer(pc);
                }
            }
        }
    }
    poly.resize(deg, Q::zero());
    poly
}

fn totient(m: u32) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

impl Cyclotomic {
    pub fn rational(q: Q) -> Self {
        Cyclotomic {
            order: 1,
            coeffs: vec![q],
        }
    }

    /// `ζ_m^k` with `ζ_m = exp(2πi/m)`.
    pub fn root_of_unity(m: u32, k: i64) -> Self {
        assert!(m >= 1, "root of unity order must be positive");
        let e = k.rem_euclid(m as i64) as usize;
        let mut poly = vec![Q::zero(); m as usize];
        poly[e] = Q::one();
        Cyclotomic::from_poly(m, poly)
    }

    fn from_poly(m: u32, poly: Vec<Q>) -> Self {
        let coeffs = reduce(poly, m);
        if m == 2 {
            // Q(ζ_2) = Q with the same single coordinate
            return Cyclotomic { order: 1, coeffs };
        }
        Cyclotomic { order: m, coeffs }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.coeffs
    }

    /// `Some(q)` if the element is rational.
    pub fn as_rational(&self) -> Option<Q> {
        let lifted = self.lift(self.order);
        if lifted.coeffs.iter().skip(1).all(Zero::is_zero) {
            // The power basis starts with 1, so a rational element has only the constant term.
            Some(lifted.coeffs[0])
        } else {
            None
        }
    }

    /// Embeds into `Q(ζ_target)`; `target` must be a multiple of the current order.
    fn lift(&self, target: u32) -> Cyclotomic {
        if target == self.order {
            return self.clone();
        }
        debug_assert_eq!(target % self.order, 0);
        let step = (target / self.order) as usize;
        let mut poly = vec![Q::zero(); target as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[(k * step) % target as usize] += *c;
        }
        Cyclotomic::from_poly(target, poly)
    }

    fn common(a: &Cyclotomic, b: &Cyclotomic) -> (Cyclotomic, Cyclotomic, u32) {
        let m = a.order.lcm(&b.order);
        (a.lift(m), b.lift(m), m)
    }

    fn zip_with(&self, other: &Cyclotomic, op: impl Fn(Q, Q) -> Q) -> Cyclotomic {
        // A rational lifts to `(q, 0, ..., 0)` in any power basis.
        if self.order == 1 && other.order != 1 {
            let mut coeffs: Vec<Q> = other.coeffs.iter().map(|&y| op(Q::zero(), y)).collect();
            coeffs[0] = op(self.coeffs[0], other.coeffs[0]);
            return Cyclotomic {
                order: other.order,
                coeffs,
            };
        }
        if other.order == 1 && self.order != 1 {
            let mut coeffs = self.coeffs.clone();
            coeffs[0] = op(self.coeffs[0], other.coeffs[0]);
            return Cyclotomic {
                order: self.order,
                coeffs,
            };
        }
        let (a, b, m) = Cyclotomic::common(self, other);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| op(*x, *y))
            .collect();
        Cyclotomic { order: m, coeffs }
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                _ => write!(f, "{c}*z{}^{k}", self.order)?,
            }
        }
        Ok(())
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b, _) = Cyclotomic::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Self) -> Self {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Self) -> Self {
        if self.order == 1 {
            let s = self.coeffs[0];
            return Cyclotomic {
                order: rhs.order,
                coeffs: rhs.coeffs.iter().map(|c| *c * s).collect(),
            };
        }
        if rhs.order == 1 {
            let s = rhs.coeffs[0];
            return Cyclotomic {
                order: self.order,
                coeffs: self.coeffs.iter().map(|c| *c * s).collect(),
            };
        }
        let (a, b, m) = Cyclotomic::common(&self, &rhs);
        let mut prod = vec![Q::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += *x * *y;
            }
        }
        Cyclotomic::from_poly(m, prod)
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl AddAssign for Cyclotomic {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.clone() + rhs;
    }
}

impl SubAssign for Cyclotomic {
    fn sub_assign(&mut self, rhs: Self) {
        *self = self.clone() - rhs;
    }
}

impl MulAssign for Cyclotomic {
    fn mul_assign(&mut self, rhs: Self) {
        *self = self.clone() * rhs;
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::rational(Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic::rational(Q::one())
    }
}

impl Entry for Cyclotomic {
    const EXACT: bool = true;

    fn from_ratio(q: Q) -> Self {
        Cyclotomic::rational(q)
    }

    fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| Complex64::from_polar(q_to_f64(c), std::f64::consts::TAU * k as f64 / m))
            .sum()
    }

    fn conj(&self) -> Self {
        let m = self.order as usize;
        let mut poly = vec![Q::zero(); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            poly[(m - k) % m] += *c;
        }
        Cyclotomic::from_poly(self.order, poly)
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl From<Q> for Cyclotomic {
    fn from(q: Q) -> Self {
        Cyclotomic::rational(q)
    }
}

/// Degree `[Q(ζ_m) : Q]`.
pub fn cyclotomic_degree(m: u32) -> usize {
    totient(m)
}

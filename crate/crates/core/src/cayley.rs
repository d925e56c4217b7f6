//! Finite groups as multiplication tables, Cayley schemes and S-rings.
//!
//! The relation between `g1` and `g2` is the class of `g1⁻¹ g2`. Class 0 is
//! always `{e}`, matching the scheme convention that label 0 is the diagonal.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Cyclotomic, Entry, Q};
use crate::scheme::{validate, RelationMatrix, Scheme};
use crate::spectral::SpectralDecomposition;

/// A finite group with identity at index 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

impl GroupTable {
    /// Checks closure, the identity at 0, inverses and associativity.
    pub fn new(mul: Vec<Vec<usize>>) -> Result<Self> {
        let g = mul.len();
        if g == 0 {
            return Err(Error::Malformed("group table is empty".into()));
        }
        for (x, row) in mul.iter().enumerate() {
            if row.len() != g {
                return Err(Error::Malformed(format!(
                    "row {x} of the group table has length {}, expected {g}",
                    row.len()
                )));
            }
            if let Some(&v) = row.iter().find(|&&v| v >= g) {
                return Err(Error::Malformed(format!("group element {v} out of range")));
            }
        }
        for (x, row) in mul.iter().enumerate() {
            if mul[0][x] != x || row[0] != x {
                return Err(Error::Malformed("element 0 is not the identity".into()));
            }
        }
        let mut inv = vec![0; g];
        for x in 0..g {
            inv[x] = (0..g)
                .find(|&y| mul[x][y] == 0 && mul[y][x] == 0)
                .ok_or_else(|| Error::Malformed(format!("element {x} has no inverse")))?;
        }
        for x in 0..g {
            for y in 0..g {
                for z in 0..g {
                    if mul[mul[x][y]][z] != mul[x][mul[y][z]] {
                        return Err(Error::Malformed(format!(
                            "multiplication is not associative at ({x}, {y}, {z})"
                        )));
                    }
                }
            }
        }
        Ok(GroupTable { mul, inv })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cyclic group of order 0".into()));
        }
        let mul = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        Ok(GroupTable { mul, inv })
    }

    /// `G1 × G2` with `(a, b)` encoded as `a * |G2| + b`.
    pub fn direct_product(g1: &GroupTable, g2: &GroupTable) -> Self {
        let m = g2.order();
        let n = g1.order() * m;
        let mul = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| g1.mul[x / m][y / m] * m + g2.mul[x % m][y % m])
                    .collect()
            })
            .collect();
        let inv = (0..n).map(|x| g1.inv[x / m] * m + g2.inv[x % m]).collect();
        GroupTable { mul, inv }
    }

    /// `(Z_p)^k` as an iterated direct product of `Z_p`.
    pub fn elementary_abelian(p: usize, k: usize) -> Result<Self> {
        if p < 2
            || (2..p)
                .take_while(|d| d * d <= p)
                .any(|d| p.is_multiple_of(d))
        {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("exponent k must be positive".into()));
        }
        let zp = GroupTable::cyclic(p)?;
        Ok((1..k).fold(zp.clone(), |acc, _| GroupTable::direct_product(&acc, &zp)))
    }

    /// The symmetric group on `k` letters; elements are permutations in
    /// lexicographic order and `(x y)(i) = x(y(i))`.
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 || k > 6 {
            return Err(Error::InvalidArgument(format!(
                "symmetric group on {k} letters"
            )));
        }
        let mut perms: Vec<Vec<usize>> = vec![(0..k).collect()];
        let mut current: Vec<usize> = (0..k).collect();
        while next_permutation(&mut current) {
            perms.push(current.clone());
        }
        let index: HashMap<Vec<usize>, usize> = perms
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mul = perms
            .iter()
            .map(|x| {
                perms
                    .iter()
                    .map(|y| index[&y.iter().map(|&i| x[i]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        GroupTable::new(mul)
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x][y]
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|x| (0..x).all(|y| self.mul[x][y] == self.mul[y][x]))
    }

    /// Order of the element `x`.
    pub fn element_order(&self, x: usize) -> usize {
        let mut y = x;
        let mut k = 1;
        while y != 0 {
            y = self.mul[y][x];
            k += 1;
        }
        k
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A partition of a group into classes; class 0 should be `{e}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassPartition {
    classes: Vec<Vec<usize>>,
    #[serde(skip)]
    class_of: Vec<usize>,
}

impl ClassPartition {
    /// Checks that the classes are non-empty, disjoint and cover `0..order`.
    /// Elements within a class are sorted.
    pub fn new(order: usize, classes: Vec<Vec<usize>>) -> Result<Self> {
        let mut class_of = vec![usize::MAX; order];
        let mut classes = classes;
        for (i, c) in classes.iter_mut().enumerate() {
            if c.is_empty() {
                return Err(Error::Malformed(format!("class {i} is empty")));
            }
            c.sort_unstable();
            for &x in c.iter() {
                if x >= order {
                    return Err(Error::Malformed(format!(
                        "class {i} contains {x}, group order is {order}"
                    )));
                }
                if class_of[x] != usize::MAX {
                    return Err(Error::Malformed(format!(
                        "element {x} appears in classes {} and {i}",
                        class_of[x]
                    )));
                }
                class_of[x] = i;
            }
        }
        if let Some(x) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::Malformed(format!("element {x} is in no class")));
        }
        Ok(ClassPartition { classes, class_of })
    }

    /// All singletons, ordered by element.
    pub fn thin(order: usize) -> Self {
        ClassPartition::new(order, (0..order).map(|x| vec![x]).collect())
            .expect("singletons partition")
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// The classes as a set of sets, for order-insensitive comparison.
    pub fn as_set(&self) -> BTreeSet<BTreeSet<usize>> {
        self.classes
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }
}

/// Verdicts on the three S-ring conditions: `{e}` is class 0, class sums
/// span a subring, and classes are closed under inversion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SringReport {
    pub identity: bool,
    pub product: bool,
    pub inverse: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_witness: Option<ProductWitness>,
}

/// `S_i S_j` has coefficient `first` at `g` and `second` at `h`, both in class `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductWitness {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub g: usize,
    pub h: usize,
    pub first: u64,
    pub second: u64,
}

impl SringReport {
    pub fn ok(&self) -> bool {
        self.identity && self.product && self.inverse
    }
}

impl std::fmt::Display for SringReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "identity class: {}, product closure: {}, inverse closure: {}",
            self.identity, self.product, self.inverse
        )?;
        if let Some(w) = &self.product_witness {
            write!(
                f,
                " (S_{} S_{} has coefficient {} at {} but {} at {}, both in class {})",
                w.i, w.j, w.first, w.g, w.second, w.h, w.k
            )?;
        }
        Ok(())
    }
}

/// Checks the three S-ring conditions by expanding every product of class
/// sums in the group ring.
pub fn validate_sring(g: &GroupTable, part: &ClassPartition) -> Result<SringReport> {
    check_sizes(g, part)?;
    let identity = part.classes[0] == [0];
    let inverse = part.classes.iter().all(|c| {
        let target = part.class_of(g.inv(c[0]));
        let len = part.classes[target].len();
        len == c.len() && c.iter().all(|&x| part.class_of(g.inv(x)) == target)
    });
    let mut product_witness = None;
    'outer: for (i, si) in part.classes.iter().enumerate() {
        for (j, sj) in part.classes.iter().enumerate() {
            let mut coeff = vec![0u64; g.order()];
            for &a in si {
                for &b in sj {
                    coeff[g.mul(a, b)] += 1;
                }
            }
            for (k, sk) in part.classes.iter().enumerate() {
                let h = sk[0];
                if let Some(&x) = sk.iter().find(|&&x| coeff[x] != coeff[h]) {
                    product_witness = Some(ProductWitness {
                        i,
                        j,
                        k,
                        g: h,
                        h: x,
                        first: coeff[h],
                        second: coeff[x],
                    });
                    break 'outer;
                }
            }
        }
    }
    Ok(SringReport {
        identity,
        product: product_witness.is_none(),
        inverse,
        product_witness,
    })
}

fn check_sizes(g: &GroupTable, part: &ClassPartition) -> Result<()> {
    if part.class_of.len() != g.order() {
        return Err(Error::LengthMismatch {
            what: "class partition",
            expected: g.order(),
            found: part.class_of.len(),
        });
    }
    Ok(())
}

fn cayley_matrix(g: &GroupTable, part: &ClassPartition) -> RelationMatrix {
    let n = g.order();
    let cells = (0..n)
        .flat_map(|x| (0..n).map(move |y| part.class_of(g.mul(g.inv(x), y)) as u32))
        .collect();
    RelationMatrix::from_cells_unchecked(n, part.len(), cells)
}

/// The Cayley scheme `R(g1, g2) = class(g1⁻¹ g2)`, or the S-ring report when
/// some condition fails.
pub fn cayley_scheme(g: &GroupTable, part: &ClassPartition) -> Result<Scheme> {
    let report = validate_sring(g, part)?;
    if !report.ok() {
        return Err(Error::Sring(Box::new(report)));
    }
    let matrix = cayley_matrix(g, part);
    debug_assert!(validate(&matrix).ok);
    Ok(Scheme::from_valid(matrix))
}

/// The thin scheme of `g`: every element is its own class.
pub fn thin_scheme(g: &GroupTable) -> Scheme {
    Scheme::from_valid(cayley_matrix(g, &ClassPartition::thin(g.order())))
}

fn require_valid(g: &GroupTable, part: &ClassPartition) -> Result<()> {
    let report = validate_sring(g, part)?;
    if report.ok() {
        Ok(())
    } else {
        Err(Error::Sring(Box::new(report)))
    }
}

/// Wreath product of S-rings on `G1 × G2`.
///
/// Classes: `{(e, e)}`, then `D × G2` for each non-identity class `D` of the
/// first factor, then `{e} × C` for each non-identity class `C` of the second.
/// With this order the Cayley scheme equals the wreath product of the factor
/// Cayley schemes label for label.
pub fn sring_wreath(
    g1: &GroupTable,
    p1: &ClassPartition,
    g2: &GroupTable,
    p2: &ClassPartition,
) -> Result<(GroupTable, ClassPartition)> {
    require_valid(g1, p1)?;
    require_valid(g2, p2)?;
    let m = g2.order();
    let mut classes = vec![vec![0]];
    for d in &p1.classes[1..] {
        classes.push(
            d.iter()
                .flat_map(|&a| (0..m).map(move |b| a * m + b))
                .collect(),
        );
    }
    for c in &p2.classes[1..] {
        classes.push(c.clone());
    }
    let g = GroupTable::direct_product(g1, g2);
    let part = ClassPartition::new(g.order(), classes)?;
    Ok((g, part))
}

/// Direct product of S-rings: class `C_i × D_j` at index `i * r2 + j`.
pub fn sring_direct(
    g1: &GroupTable,
    p1: &ClassPartition,
    g2: &GroupTable,
    p2: &ClassPartition,
) -> Result<(GroupTable, ClassPartition)> {
    require_valid(g1, p1)?;
    require_valid(g2, p2)?;
    let m = g2.order();
    let mut classes = Vec::with_capacity(p1.len() * p2.len());
    for c in &p1.classes {
        for d in &p2.classes {
            classes.push(
                c.iter()
                    .flat_map(|&a| d.iter().map(move |&b| a * m + b))
                    .collect(),
            );
        }
    }
    let g = GroupTable::direct_product(g1, g2);
    let part = ClassPartition::new(g.order(), classes)?;
    Ok((g, part))
}

/// Whether the S-ring is Schurian, i.e. its Cayley scheme is.
pub fn is_schurian_sring(g: &GroupTable, part: &ClassPartition) -> Result<bool> {
    Ok(crate::autgroup::is_schurian(&cayley_scheme(g, part)?))
}

/// Linear characters of an abelian group as exponent vectors: `chi(x) =
/// ζ_e^{values[x]}` with `e` the group exponent.
fn characters(g: &GroupTable) -> (u32, Vec<Vec<u32>>) {
    let n = g.order();
    let e = (0..n).map(|x| g.element_order(x)).fold(1, num_integer::lcm) as u32;
    // Greedy generating set.
    let mut gens = Vec::new();
    let mut reached = vec![false; n];
    reached[0] = true;
    while let Some(x) = (0..n).find(|&x| !reached[x]) {
        gens.push(x);
        reached = closure(g, &gens);
    }
    let mut out = Vec::new();
    let mut choice = vec![0u32; gens.len()];
    loop {
        if let Some(values) = extend_character(g, &gens, &choice, e) {
            out.push(values);
        }
        // Next assignment of exponents to generators.
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return (e, out);
            }
            choice[pos] += 1;
            if choice[pos] < e {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn closure(g: &GroupTable, gens: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for &s in gens {
            let y = g.mul(x, s);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Extends generator exponents to a homomorphism into `Z_e`, if consistent.
fn extend_character(g: &GroupTable, gens: &[usize], choice: &[u32], e: u32) -> Option<Vec<u32>> {
    let mut values = vec![None; g.order()];
    values[0] = Some(0u32);
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        let vx = values[x].expect("visited");
        for (&s, &c) in gens.iter().zip(choice) {
            let y = g.mul(x, s);
            let vy = (vx + c) % e;
            match values[y] {
                None => {
                    values[y] = Some(vy);
                    stack.push(y);
                }
                Some(v) if v != vy => return None,
                Some(_) => {}
            }
        }
    }
    values.into_iter().collect()
}

/// Exact spectral decomposition of the Cayley scheme of an S-ring over an
/// abelian group, from the group characters.
///
/// Characters with equal values on every class sum are merged; each merged
/// set `Ξ` gives `E[x][y] = (1/|G|) Σ_{χ∈Ξ} χ(x⁻¹y)` with multiplicity `|Ξ|`
/// and eigenvalues `P[i] = Σ_{s∈S_i} conj χ(s)`. Columns follow the generic
/// order of the numeric decomposition.
pub fn cayley_spectrum(
    g: &GroupTable,
    part: &ClassPartition,
) -> Result<SpectralDecomposition<Cyclotomic>> {
    require_valid(g, part)?;
    if !g.is_abelian() {
        return Err(Error::Unsupported(
            "character spectra need an abelian group".into(),
        ));
    }
    let n = g.order();
    let r = part.len();
    let (e, chars) = characters(g);
    let zeta = |k: u32| Cyclotomic::root_of_unity(e, k as i64);
    let class_value = |chi: &[u32], i: usize| -> Cyclotomic {
        part.classes[i]
            .iter()
            .fold(Cyclotomic::zero(), |acc, &s| acc + zeta((e - chi[s]) % e))
    };

    let mut groups: Vec<(Vec<Cyclotomic>, Vec<usize>)> = Vec::new();
    for (c, chi) in chars.iter().enumerate() {
        let key: Vec<Cyclotomic> = (0..r).map(|i| class_value(chi, i)).collect();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(c),
            None => groups.push((key, vec![c])),
        }
    }
    if groups.len() != r {
        return Err(Error::NumericalDegeneracy(format!(
            "{} character classes for {r} relations",
            groups.len()
        )));
    }
    let inv_n = Cyclotomic::from(Q::new(1, n as i128));
    let mut idempotents = Vec::with_capacity(r);
    for (_, members) in &groups {
        // Values depend only on x⁻¹y, so compute one row per group element.
        let row: Vec<Cyclotomic> = (0..n)
            .map(|d| {
                members
                    .iter()
                    .fold(Cyclotomic::zero(), |acc, &c| acc + zeta(chars[c][d]))
                    * inv_n.clone()
            })
            .collect();
        idempotents.push(DMatrix::from_fn(n, n, |x, y| {
            row[g.mul(g.inv(x), y)].clone()
        }));
    }
    let eigen = DMatrix::from_fn(r, r, |i, j| groups[j].0[i].clone());
    let j0 = groups
        .iter()
        .position(|(_, m)| m.iter().any(|&c| chars[c].iter().all(|&v| v == 0)))
        .expect("trivial character present");
    let row1: Option<Vec<_>> =
        (r > 1).then(|| eigen.row(1).iter().map(Entry::to_complex).collect());
    let order = crate::spectral::generic_column_order(row1.as_deref(), j0, 1e-9);
    Ok(SpectralDecomposition {
        idempotents: order.iter().map(|&j| idempotents[j].clone()).collect(),
        multiplicities: order.iter().map(|&j| groups[j].1.len()).collect(),
        eigenmatrix: DMatrix::from_fn(r, r, |i, j| eigen[(i, order[j])].clone()),
        j0_index: 0,
    })
}

/// Group description used by the S-ring JSON format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic { n: usize },
    ElementaryAbelian { p: usize, k: usize },
    Table { mul: Vec<Vec<usize>> },
}

impl GroupSpec {
    pub fn build(&self) -> Result<GroupTable> {
        match self {
            GroupSpec::Cyclic { n } => GroupTable::cyclic(*n),
            GroupSpec::ElementaryAbelian { p, k } => GroupTable::elementary_abelian(*p, *k),
            GroupSpec::Table { mul } => GroupTable::new(mul.clone()),
        }
    }
}

/// `{"group": {...}, "classes": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SringDescriptor {
    pub group: GroupSpec,
    pub classes: Vec<Vec<usize>>,
}

impl SringDescriptor {
    pub fn build(&self) -> Result<(GroupTable, ClassPartition)> {
        let g = self.group.build()?;
        let part = ClassPartition::new(g.order(), self.classes.clone())?;
        Ok((g, part))
    }

    /// Describes an arbitrary table-based S-ring.
    pub fn from_parts(g: &GroupTable, part: &ClassPartition) -> Self {
        SringDescriptor {
            group: GroupSpec::Table {
                mul: g.table().to_vec(),
            },
            classes: part.classes().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::{direct_product, wreath_product};

    fn part(g: &GroupTable, classes: &[&[usize]]) -> ClassPartition {
        ClassPartition::new(g.order(), classes.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn group_constructions() {
        assert_eq!(GroupTable::cyclic(1).unwrap().order(), 1);
        assert_eq!(GroupTable::cyclic(6).unwrap().mul(2, 5), 1);
        let z2 = GroupTable::cyclic(2).unwrap();
        assert_eq!(
            GroupTable::elementary_abelian(2, 2).unwrap(),
            GroupTable::direct_product(&z2, &z2)
        );
        assert!(GroupTable::elementary_abelian(4, 2).is_err());
        let s3 = GroupTable::symmetric(3).unwrap();
        assert_eq!(s3.order(), 6);
        assert!(!s3.is_abelian());
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(GroupTable::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(GroupTable::new(vec![vec![1, 0], vec![0, 1]]).is_err());
        assert!(GroupTable::new(vec![vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn thin_z3_matches_the_cyclic_shift() {
        let s = thin_scheme(&GroupTable::cyclic(3).unwrap());
        assert_eq!(s.rows(), vec![vec![0, 1, 2], vec![2, 0, 1], vec![1, 2, 0]]);
    }

    #[test]
    fn worked_sring_examples() {
        let z4 = GroupTable::cyclic(4).unwrap();
        let coarse = part(&z4, &[&[0], &[2], &[1, 3]]);
        let report = validate_sring(&z4, &coarse).unwrap();
        assert!(report.ok());
        let s = cayley_scheme(&z4, &coarse).unwrap();
        assert!(s.is_symmetric());
        assert_eq!(s.num_relations(), 3);

        let z5 = GroupTable::cyclic(5).unwrap();
        let bad = part(&z5, &[&[0], &[1, 2], &[3, 4]]);
        let report = validate_sring(&z5, &bad).unwrap();
        assert!(report.identity && report.inverse && !report.product);
        assert!(matches!(cayley_scheme(&z5, &bad), Err(Error::Sring(_))));
    }

    #[test]
    fn identity_and_inverse_conditions() {
        let z4 = GroupTable::cyclic(4).unwrap();
        let r = validate_sring(&z4, &part(&z4, &[&[0, 2], &[1, 3]])).unwrap();
        assert!(!r.identity);
        let r = validate_sring(&z4, &part(&z4, &[&[0], &[1], &[2], &[3]])).unwrap();
        assert!(r.ok());
        let z5 = GroupTable::cyclic(5).unwrap();
        let r = validate_sring(&z5, &part(&z5, &[&[0], &[1], &[2, 3, 4]])).unwrap();
        assert!(!r.inverse);
    }

    #[test]
    fn malformed_partitions() {
        assert!(ClassPartition::new(3, vec![vec![0], vec![1]]).is_err());
        assert!(ClassPartition::new(3, vec![vec![0], vec![1, 1], vec![2]]).is_err());
        assert!(ClassPartition::new(3, vec![vec![0], vec![], vec![1, 2]]).is_err());
        assert!(ClassPartition::new(2, vec![vec![0], vec![5]]).is_err());
    }

    #[test]
    fn wreath_and_direct_match_scheme_products() {
        let z2 = GroupTable::cyclic(2).unwrap();
        let z4 = GroupTable::cyclic(4).unwrap();
        let t2 = ClassPartition::thin(2);
        let coarse = part(&z4, &[&[0], &[2], &[1, 3]]);
        let (g, p) = sring_wreath(&z2, &t2, &z2, &t2).unwrap();
        let expected: BTreeSet<BTreeSet<usize>> = [vec![0], vec![1], vec![2, 3]]
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        assert_eq!(p.as_set(), expected);
        assert_eq!(
            cayley_scheme(&g, &p).unwrap(),
            wreath_product(&thin_scheme(&z2), &thin_scheme(&z2)).unwrap()
        );
        let (g, p) = sring_direct(&z4, &coarse, &z2, &t2).unwrap();
        assert_eq!(
            cayley_scheme(&g, &p).unwrap(),
            direct_product(&cayley_scheme(&z4, &coarse).unwrap(), &thin_scheme(&z2)).unwrap()
        );
    }

    #[test]
    fn character_spectra_are_exact() {
        for n in [2usize, 3, 4, 5, 6] {
            let g = GroupTable::cyclic(n).unwrap();
            let s = thin_scheme(&g);
            let sd = cayley_spectrum(&g, &ClassPartition::thin(n)).unwrap();
            sd.check(&s, 0.0).unwrap();
        }
        let z4 = GroupTable::cyclic(4).unwrap();
        let coarse = part(&z4, &[&[0], &[2], &[1, 3]]);
        let sd = cayley_spectrum(&z4, &coarse).unwrap();
        sd.check(&cayley_scheme(&z4, &coarse).unwrap(), 0.0)
            .unwrap();
        assert_eq!(sd.multiplicities, vec![1, 1, 2]);
        let g = GroupTable::elementary_abelian(2, 2).unwrap();
        cayley_spectrum(&g, &ClassPartition::thin(4))
            .unwrap()
            .check(&thin_scheme(&g), 0.0)
            .unwrap();
    }

    #[test]
    fn descriptor_round_trip() {
        let json = r#"{"group":{"kind":"cyclic","n":4},"classes":[[0],[2],[1,3]]}"#;
        let d: SringDescriptor = serde_json::from_str(json).unwrap();
        let (g, p) = d.build().unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(p.len(), 3);
        assert!(serde_json::from_str::<SringDescriptor>(
            r#"{"group":{"kind":"cyclic","n":4},"classes":[],"extra":1}"#
        )
        .is_err());
    }
}

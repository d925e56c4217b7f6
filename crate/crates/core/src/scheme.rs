//! Finite association schemes stored as relation-label matrices.
//!
//! Points are `0..n` and relation labels are `0..r`. Label `0` is always the
//! identity relation; inputs that put anything else on the diagonal are
//! rejected instead of being renumbered.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// A square matrix of relation labels that has passed the structural checks
/// (square, non-empty, every label `< num_relations`) but not necessarily the
/// scheme axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMatrix {
    size: usize,
    num_relations: usize,
    cells: Vec<u32>,
}

impl RelationMatrix {
    pub fn new(num_relations: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::Malformed("relation matrix has no rows".into()));
        }
        if num_relations == 0 {
            return Err(Error::Malformed("num_relations must be positive".into()));
        }
        if num_relations > u32::MAX as usize {
            return Err(Error::Malformed("num_relations too large".into()));
        }
        let mut cells = Vec::with_capacity(size * size);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Malformed(format!(
                    "row {x} has length {}, expected {size} (matrix must be square)",
                    row.len()
                )));
            }
            for (y, &label) in row.iter().enumerate() {
                if label >= num_relations {
                    return Err(Error::Malformed(format!(
                        "relation[{x}][{y}] = {label} is out of range 0..{num_relations}"
                    )));
                }
                cells.push(label as u32);
            }
        }
        Ok(RelationMatrix {
            size,
            num_relations,
            cells,
        })
    }

    /// Builds from rows, taking `num_relations` to be one more than the largest label.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let r = rows.iter().flatten().copied().max().map_or(0, |m| m + 1);
        Self::new(r, rows)
    }

    pub(crate) fn from_cells_unchecked(size: usize, num_relations: usize, cells: Vec<u32>) -> Self {
        debug_assert_eq!(cells.len(), size * size);
        RelationMatrix {
            size,
            num_relations,
            cells,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_relations(&self) -> usize {
        self.num_relations
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.cells[x * self.size + y] as usize
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.cells
            .chunks(self.size)
            .map(|row| row.iter().map(|&c| c as usize).collect())
            .collect()
    }

    /// Overwrites one cell. Used to build fault-injection fixtures.
    pub fn set(&mut self, x: usize, y: usize, label: usize) -> Result<()> {
        if x >= self.size || y >= self.size || label >= self.num_relations {
            return Err(Error::InvalidArgument(format!(
                "cannot set relation[{x}][{y}] = {label} in a {}-point, {}-relation matrix",
                self.size, self.num_relations
            )));
        }
        self.cells[x * self.size + y] = label as u32;
        Ok(())
    }
}

/// Which axiom a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// Axiom (1): label 0 is exactly the diagonal.
    Identity,
    /// The relation map is surjective onto the label set.
    Surjectivity,
    /// Axiom (3): closure under transpose.
    Transpose,
    /// Axiom (2): closure under matrix product (well-defined intersection numbers).
    ProductClosure,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Identity => "axiom (1) identity relation",
            Axiom::Surjectivity => "surjectivity of the relation map",
            Axiom::Transpose => "axiom (3) transpose closure",
            Axiom::ProductClosure => "axiom (2) product closure",
        };
        f.write_str(s)
    }
}

/// One cell `(x, z)` together with the count `#{y : R(x,y)=i, R(y,z)=j}` observed there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountWitness {
    pub x: usize,
    pub z: usize,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DiagonalNotIdentity {
        x: usize,
        label: usize,
    },
    IdentityOffDiagonal {
        x: usize,
        y: usize,
    },
    LabelUnused {
        label: usize,
    },
    TransposeInconsistent {
        label: usize,
        first: (usize, usize),
        first_transpose: usize,
        second: (usize, usize),
        second_transpose: usize,
    },
    IntersectionNotConstant {
        i: usize,
        j: usize,
        k: usize,
        first: CountWitness,
        second: CountWitness,
    },
}

impl Violation {
    pub fn axiom(&self) -> Axiom {
        match self {
            Violation::DiagonalNotIdentity { .. } | Violation::IdentityOffDiagonal { .. } => {
                Axiom::Identity
            }
            Violation::LabelUnused { .. } => Axiom::Surjectivity,
            Violation::TransposeInconsistent { .. } => Axiom::Transpose,
            Violation::IntersectionNotConstant { .. } => Axiom::ProductClosure,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DiagonalNotIdentity { x, label } => {
                write!(f, "{}: relation[{x}][{x}] = {label}, expected 0", self.axiom())
            }
            Violation::IdentityOffDiagonal { x, y } => {
                write!(f, "{}: relation[{x}][{y}] = 0 off the diagonal", self.axiom())
            }
            Violation::LabelUnused { label } => {
                write!(f, "{}: label {label} never occurs", self.axiom())
            }
            Violation::TransposeInconsistent {
                label,
                first,
                first_transpose,
                second,
                second_transpose,
            } => write!(
                f,
                "{}: label {label} at {first:?} transposes to {first_transpose} but at {second:?} to {second_transpose}",
                self.axiom()
            ),
            Violation::IntersectionNotConstant {
                i,
                j,
                k,
                first,
                second,
            } => write!(
                f,
                "{}: p[{i}][{j}][{k}] is {} at (x,z)=({},{}) but {} at ({},{})",
                self.axiom(),
                first.count,
                first.x,
                first.z,
                second.count,
                second.x,
                second.z
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    /// Distinct axioms that failed, in a stable order.
    pub fn failed_axioms(&self) -> Vec<Axiom> {
        let mut v: Vec<Axiom> = self.violations.iter().map(Violation::axiom).collect();
        v.sort();
        v.dedup();
        v
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return f.write_str("ok");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(5) {
            write!(f, "; {v}")?;
        }
        if self.violations.len() > 5 {
            f.write_str("; ...")?;
        }
        Ok(())
    }
}

/// Checks every axiom and collects all violations.
///
/// Product closure is checked by comparing, for each cell `(x, z)`, the sorted
/// list of `(R(x,y), R(y,z))` pairs against the list recorded for the first
/// cell with the same label. Cost is `O(n^3 log n)` and independent of `r`.
pub fn validate(m: &RelationMatrix) -> ValidationReport {
    let n = m.size;
    let r = m.num_relations;
    let mut violations = Vec::new();

    for x in 0..n {
        for y in 0..n {
            let l = m.get(x, y);
            if x == y && l != 0 {
                violations.push(Violation::DiagonalNotIdentity { x, label: l });
            } else if x != y && l == 0 {
                violations.push(Violation::IdentityOffDiagonal { x, y });
            }
        }
    }

    let mut seen = vec![false; r];
    for &c in &m.cells {
        seen[c as usize] = true;
    }
    for (label, used) in seen.iter().enumerate() {
        if !used {
            violations.push(Violation::LabelUnused { label });
        }
    }

    // label -> (first cell, its transpose label)
    let mut transpose: Vec<Option<((usize, usize), usize)>> = vec![None; r];
    let mut transpose_reported = vec![false; r];
    for x in 0..n {
        for y in 0..n {
            let l = m.get(x, y);
            let t = m.get(y, x);
            match transpose[l] {
                None => transpose[l] = Some(((x, y), t)),
                Some((first, ft)) if ft != t && !transpose_reported[l] => {
                    transpose_reported[l] = true;
                    violations.push(Violation::TransposeInconsistent {
                        label: l,
                        first,
                        first_transpose: ft,
                        second: (x, y),
                        second_transpose: t,
                    });
                }
                _ => {}
            }
        }
    }

    let mut reference: Vec<Option<(usize, usize, Vec<u64>)>> = vec![None; r];
    let mut reported: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut pairs: Vec<u64> = Vec::with_capacity(n);
    let rr = r as u64;
    for x in 0..n {
        for z in 0..n {
            let k = m.get(x, z);
            pairs.clear();
            pairs.extend((0..n).map(|y| m.get(x, y) as u64 * rr + m.get(y, z) as u64));
            pairs.sort_unstable();
            match &reference[k] {
                None => reference[k] = Some((x, z, pairs.clone())),
                Some((rx, rz, refpairs)) => {
                    if *refpairs != pairs {
                        for (key, c_ref, c_here) in count_differences(refpairs, &pairs) {
                            let (i, j) = ((key / rr) as usize, (key % rr) as usize);
                            if reported.insert((i, j, k)) {
                                violations.push(Violation::IntersectionNotConstant {
                                    i,
                                    j,
                                    k,
                                    first: CountWitness {
                                        x: *rx,
                                        z: *rz,
                                        count: c_ref,
                                    },
                                    second: CountWitness {
                                        x,
                                        z,
                                        count: c_here,
                                    },
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// Merges two sorted key lists and yields `(key, count_a, count_b)` wherever the counts differ.
fn count_differences(a: &[u64], b: &[u64]) -> Vec<(u64, usize, usize)> {
    let mut out = Vec::new();
    let (mut ia, mut ib) = (0, 0);
    while ia < a.len() || ib < b.len() {
        let key = match (a.get(ia), b.get(ib)) {
            (Some(&ka), Some(&kb)) => ka.min(kb),
            (Some(&ka), None) => ka,
            (None, Some(&kb)) => kb,
            (None, None) => unreachable!(),
        };
        let mut ca = 0;
        while a.get(ia) == Some(&key) {
            ca += 1;
            ia += 1;
        }
        let mut cb = 0;
        while b.get(ib) == Some(&key) {
            cb += 1;
            ib += 1;
        }
        if ca != cb {
            out.push((key, ca, cb));
        }
    }
    out
}

/// Structure constants `p[i][j][k] = #{y : R(x,y)=i, R(y,z)=j}` for any `(x,z)` with `R(x,z)=k`.
///
/// Stored sparsely: for each `k`, the non-zero `(i, j, count)` triples sorted by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTensor {
    num_relations: usize,
    by_k: Vec<Vec<(u32, u32, u64)>>,
}

impl IntersectionTensor {
    pub fn num_relations(&self) -> usize {
        self.num_relations
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u64 {
        let list = &self.by_k[k];
        match list.binary_search_by(|&(a, b, _)| (a as usize, b as usize).cmp(&(i, j))) {
            Ok(pos) => list[pos].2,
            Err(_) => 0,
        }
    }

    /// Non-zero entries `(i, j, count)` for a fixed `k`.
    pub fn nonzero_for(&self, k: usize) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.by_k[k]
            .iter()
            .map(|&(i, j, c)| (i as usize, j as usize, c))
    }

    /// Dense `r x r x r` copy, indexed `[i][j][k]`. Only sensible for small `r`.
    pub fn to_dense(&self) -> Vec<Vec<Vec<u64>>> {
        let r = self.num_relations;
        let mut out = vec![vec![vec![0; r]; r]; r];
        for (k, list) in self.by_k.iter().enumerate() {
            for &(i, j, c) in list {
                out[i as usize][j as usize][k] = c;
            }
        }
        out
    }
}

/// A validated association scheme.
#[derive(Clone)]
pub struct Scheme {
    matrix: RelationMatrix,
    labels: Option<Vec<String>>,
    valencies: Vec<usize>,
    transpose: Vec<usize>,
    tensor: OnceLock<IntersectionTensor>,
}

impl PartialEq for Scheme {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.labels == other.labels
    }
}

impl Eq for Scheme {}

impl fmt::Debug for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scheme")
            .field("size", &self.size())
            .field("num_relations", &self.num_relations())
            .field("relation", &self.matrix.rows())
            .finish()
    }
}

impl TryFrom<RelationMatrix> for Scheme {
    type Error = Error;

    fn try_from(matrix: RelationMatrix) -> Result<Self> {
        let report = validate(&matrix);
        if !report.ok {
            return Err(Error::Axioms(Box::new(report)));
        }
        Ok(Scheme::from_valid(matrix))
    }
}

impl Scheme {
    /// Validates `rows` (with an explicit label count) and builds the scheme.
    pub fn new(num_relations: usize, rows: &[Vec<usize>]) -> Result<Self> {
        Scheme::try_from(RelationMatrix::new(num_relations, rows)?)
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        Scheme::try_from(RelationMatrix::from_rows(rows)?)
    }

    /// Wraps a matrix that is known to satisfy the axioms by construction.
    pub(crate) fn from_valid(matrix: RelationMatrix) -> Self {
        debug_assert!(
            matrix.size > 64 || validate(&matrix).ok,
            "constructor produced an invalid scheme"
        );
        let n = matrix.size;
        let r = matrix.num_relations;
        let mut valencies = vec![0; r];
        for y in 0..n {
            valencies[matrix.get(0, y)] += 1;
        }
        let mut transpose = vec![usize::MAX; r];
        for x in 0..n {
            for y in 0..n {
                transpose[matrix.get(x, y)] = matrix.get(y, x);
            }
        }
        Scheme {
            matrix,
            labels: None,
            valencies,
            transpose,
            tensor: OnceLock::new(),
        }
    }

    pub(crate) fn from_cells(size: usize, num_relations: usize, cells: Vec<u32>) -> Self {
        Scheme::from_valid(RelationMatrix::from_cells_unchecked(
            size,
            num_relations,
            cells,
        ))
    }

    /// The one-point scheme: the unit for both products.
    pub fn trivial() -> Self {
        Scheme::from_cells(1, 1, vec![0])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_relations() {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: self.num_relations(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Self {
        self.labels = None;
        self
    }

    pub fn size(&self) -> usize {
        self.matrix.size
    }

    pub fn num_relations(&self) -> usize {
        self.matrix.num_relations
    }

    #[inline]
    pub fn relation(&self, x: usize, y: usize) -> usize {
        self.matrix.get(x, y)
    }

    pub fn matrix(&self) -> &RelationMatrix {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.matrix.rows()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn display_label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    /// `k_i`: number of `y` with `R(x, y) = i`, for any `x`.
    pub fn valencies(&self) -> &[usize] {
        &self.valencies
    }

    /// The involution `i -> i'` with `R(y, x) = R(x, y)'`.
    pub fn transpose_label(&self, i: usize) -> usize {
        self.transpose[i]
    }

    pub fn transpose_map(&self) -> &[usize] {
        &self.transpose
    }

    pub fn is_symmetric(&self) -> bool {
        self.transpose.iter().enumerate().all(|(i, &t)| i == t)
    }

    pub fn intersection_numbers(&self) -> &IntersectionTensor {
        self.tensor.get_or_init(|| self.compute_tensor())
    }

    fn compute_tensor(&self) -> IntersectionTensor {
        let n = self.size();
        let r = self.num_relations();
        let mut representative: Vec<Option<(usize, usize)>> = vec![None; r];
        let mut remaining = r;
        'outer: for x in 0..n {
            for z in 0..n {
                let k = self.relation(x, z);
                if representative[k].is_none() {
                    representative[k] = Some((x, z));
                    remaining -= 1;
                    if remaining == 0 {
                        break 'outer;
                    }
                }
            }
        }
        let by_k = representative
            .iter()
            .map(|rep| {
                let (x, z) = rep.expect("relation map is surjective");
                let mut keys: Vec<(u32, u32)> = (0..n)
                    .map(|y| (self.relation(x, y) as u32, self.relation(y, z) as u32))
                    .collect();
                keys.sort_unstable();
                let mut list: Vec<(u32, u32, u64)> = Vec::new();
                for (i, j) in keys {
                    match list.last_mut() {
                        Some(last) if last.0 == i && last.1 == j => last.2 += 1,
                        _ => list.push((i, j, 1)),
                    }
                }
                list
            })
            .collect();
        IntersectionTensor {
            num_relations: r,
            by_k,
        }
    }

    /// `p[i][j][k] == p[j][i][k]` for all triples.
    pub fn is_commutative(&self) -> bool {
        let t = self.intersection_numbers();
        (0..self.num_relations()).all(|k| t.nonzero_for(k).all(|(i, j, c)| t.get(j, i, k) == c))
    }

    /// Applies a point bijection: the result has `R'(perm[x], perm[y]) = R(x, y)`.
    pub fn relabel_points(&self, perm: &[usize]) -> Result<Self> {
        let n = self.size();
        check_bijection(perm, n, "point permutation")?;
        let mut cells = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                cells[perm[x] * n + perm[y]] = self.matrix.cells[x * n + y];
            }
        }
        let mut s = Scheme::from_cells(n, self.num_relations(), cells);
        s.labels = self.labels.clone();
        Ok(s)
    }

    /// Applies a label bijection fixing 0: the result has `R'(x, y) = perm[R(x, y)]`.
    pub fn relabel_relations(&self, perm: &[usize]) -> Result<Self> {
        let r = self.num_relations();
        check_bijection(perm, r, "label permutation")?;
        if perm[0] != 0 {
            return Err(Error::InvalidArgument(
                "label permutation must fix the identity label 0".into(),
            ));
        }
        let cells = self
            .matrix
            .cells
            .iter()
            .map(|&c| perm[c as usize] as u32)
            .collect();
        Ok(Scheme::from_cells(self.size(), r, cells))
    }
}

fn check_bijection(perm: &[usize], n: usize, what: &'static str) -> Result<()> {
    if perm.len() != n {
        return Err(Error::LengthMismatch {
            what,
            expected: n,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument(format!("{what} is not a bijection")));
        }
    }
    Ok(())
}

/// A point map `f` with an index map `sigma` such that
/// `sigma[R_src(x, y)] = R_dst(f[x], f[y])`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Morphism {
    pub f: Vec<usize>,
    pub sigma: Vec<usize>,
}

/// Why a candidate morphism fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphismDefect {
    IdentityNotPreserved,
    DiagramFails { x: usize, y: usize },
}

impl fmt::Display for MorphismDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismDefect::IdentityNotPreserved => write!(f, "sigma(0) is not 0"),
            MorphismDefect::DiagramFails { x, y } => {
                write!(
                    f,
                    "relation of ({x}, {y}) is not mapped to the relation of its image"
                )
            }
        }
    }
}

impl Morphism {
    pub fn identity(s: &Scheme) -> Self {
        Morphism {
            f: (0..s.size()).collect(),
            sigma: (0..s.num_relations()).collect(),
        }
    }

    pub fn is_point_surjective(&self, dst_size: usize) -> bool {
        let mut hit = vec![false; dst_size];
        for &v in &self.f {
            if v < dst_size {
                hit[v] = true;
            }
        }
        hit.iter().all(|&h| h)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Morphism) -> Morphism {
        Morphism {
            f: first.f.iter().map(|&x| self.f[x]).collect(),
            sigma: first.sigma.iter().map(|&i| self.sigma[i]).collect(),
        }
    }

    /// Returns the first defect, or `None` if the diagram commutes.
    pub fn defect(&self, src: &Scheme, dst: &Scheme) -> Result<Option<MorphismDefect>> {
        if self.f.len() != src.size() {
            return Err(Error::LengthMismatch {
                what: "morphism point map",
                expected: src.size(),
                found: self.f.len(),
            });
        }
        if self.sigma.len() != src.num_relations() {
            return Err(Error::LengthMismatch {
                what: "morphism index map",
                expected: src.num_relations(),
                found: self.sigma.len(),
            });
        }
        if let Some(&bad) = self.f.iter().find(|&&v| v >= dst.size()) {
            return Err(Error::InvalidArgument(format!(
                "point map value {bad} out of range for a {}-point target",
                dst.size()
            )));
        }
        if let Some(&bad) = self.sigma.iter().find(|&&v| v >= dst.num_relations()) {
            return Err(Error::InvalidArgument(format!(
                "index map value {bad} out of range for a {}-relation target",
                dst.num_relations()
            )));
        }
        if self.sigma[0] != 0 {
            return Ok(Some(MorphismDefect::IdentityNotPreserved));
        }
        let n = src.size();
        for x in 0..n {
            for y in 0..n {
                if self.sigma[src.relation(x, y)] != dst.relation(self.f[x], self.f[y]) {
                    return Ok(Some(MorphismDefect::DiagramFails { x, y }));
                }
            }
        }
        Ok(None)
    }
}

/// `true` iff `m` preserves the identity label and the relation diagram commutes.
pub fn check_morphism(src: &Scheme, dst: &Scheme, m: &Morphism) -> Result<bool> {
    Ok(m.defect(src, dst)?.is_none())
}

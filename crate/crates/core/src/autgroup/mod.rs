//! Automorphism groups of schemes.
//!
//! An automorphism is a pair `(f, σ)` with `R(f x, f y) = σ(R(x, y))`; the
//! point map `f` determines `σ`. `Aut(X|I)` is the subgroup with `σ = id`.

mod chain;
mod search;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

pub use chain::{compose, enumerate, identity, inverse, is_identity, Perm, StabilizerChain};
use search::{automorphism_generators, find_isomorphism, Side};

use crate::scheme::Scheme;

/// Groups up to this order are enumerated element by element for per-`σ`
/// counts.
pub const ENUMERATION_LIMIT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Automorphism {
    pub f: Perm,
    pub sigma: Perm,
}

impl Automorphism {
    /// Recovers `σ` from `f`, or `None` if `f` is not an automorphism.
    pub fn from_point_map(s: &Scheme, f: &[usize]) -> Option<Self> {
        let n = s.size();
        if f.len() != n || !is_permutation(f) {
            return None;
        }
        let r = s.num_relations();
        let mut sigma = vec![usize::MAX; r];
        for x in 0..n {
            for y in 0..n {
                let (l, m) = (s.relation(x, y), s.relation(f[x], f[y]));
                if sigma[l] == usize::MAX {
                    sigma[l] = m;
                } else if sigma[l] != m {
                    return None;
                }
            }
        }
        is_permutation(&sigma).then_some(Automorphism {
            f: f.to_vec(),
            sigma,
        })
    }

    pub fn is_color_preserving(&self) -> bool {
        is_identity(&self.sigma)
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .all(|&v| v < p.len() && !std::mem::replace(&mut seen[v], true))
}

/// A permutation group on points, each generator carrying its label permutation.
#[derive(Debug, Clone, Serialize)]
pub struct PermGroupWithColors {
    degree: usize,
    generators: Vec<Automorphism>,
    #[serde(serialize_with = "serialize_decimal")]
    order: BigUint,
}

fn serialize_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

impl PermGroupWithColors {
    fn build(s: &Scheme, point_maps: Vec<Perm>) -> Self {
        let n = s.size();
        let mut generators: Vec<Automorphism> = point_maps
            .iter()
            .map(|f| Automorphism::from_point_map(s, f).expect("search returns automorphisms"))
            .collect();
        generators.sort();
        generators.dedup();
        let order = StabilizerChain::new(n, &point_maps).order();
        PermGroupWithColors {
            degree: n,
            generators,
            order,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Automorphism] {
        &self.generators
    }

    pub fn point_generators(&self) -> Vec<Perm> {
        self.generators.iter().map(|a| a.f.clone()).collect()
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn chain(&self) -> StabilizerChain {
        StabilizerChain::new(self.degree, &self.point_generators())
    }

    /// Every element, when the order is at most `limit`.
    pub fn elements(&self, limit: usize) -> Option<Vec<Perm>> {
        enumerate(self.degree, &self.point_generators(), limit)
    }
}

/// `Aut(X|I)`: point permutations preserving every relation.
pub fn color_aut_group(s: &Scheme) -> PermGroupWithColors {
    let (gens, _) = automorphism_generators(Side::plain(s));
    PermGroupWithColors::build(s, gens)
}

/// The full automorphism group, searched one label permutation at a time.
pub fn full_aut_group(s: &Scheme) -> PermGroupWithColors {
    full_aut_group_threaded(s, 1)
}

/// [`full_aut_group`] with the search over label permutations split across
/// `threads` worker threads.
pub fn full_aut_group_threaded(s: &Scheme, threads: usize) -> PermGroupWithColors {
    let (mut gens, _) = automorphism_generators(Side::plain(s));
    let candidates: Vec<Perm> = sigma_candidates(s)
        .into_iter()
        .filter(|t| !is_identity(t))
        .collect();
    gens.extend(
        coset_representatives(s, &candidates, threads.max(1))
            .into_iter()
            .flatten(),
    );
    PermGroupWithColors::build(s, gens)
}

/// For each candidate `τ`, one `f` with `R(f x, f y) = τ(R(x, y))`, if any.
fn coset_representatives(s: &Scheme, candidates: &[Perm], threads: usize) -> Vec<Option<Perm>> {
    let search = |tau: &Perm| {
        let inv = inverse(tau);
        find_isomorphism(Side::plain(s), Side::recolored(s, &inv))
    };
    if threads == 1 || candidates.len() < 2 {
        return candidates.iter().map(search).collect();
    }
    let chunk = candidates.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = candidates
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(search).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("search thread panicked"))
            .collect()
    })
}

/// Label permutations fixing 0 that preserve valencies, transposes and the
/// intersection numbers: `p[σi][σj][σk] = p[i][j][k]`.
pub fn sigma_candidates(s: &Scheme) -> Vec<Perm> {
    let r = s.num_relations();
    let p = s.intersection_numbers().to_dense();
    let k = s.valencies();
    let t = s.transpose_map();
    let mut out = Vec::new();
    let mut sigma = vec![usize::MAX; r];
    let mut used = vec![false; r];
    sigma[0] = 0;
    used[0] = true;

    fn extend(
        i: usize,
        sigma: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Perm>,
        p: &[Vec<Vec<u64>>],
        k: &[usize],
        t: &[usize],
    ) {
        let r = sigma.len();
        if i == r {
            out.push(sigma.clone());
            return;
        }
        for c in 1..r {
            if used[c] || k[c] != k[i] {
                continue;
            }
            let tc = t[i];
            if (tc < i && sigma[tc] != t[c]) || (tc == i && t[c] != c) {
                continue;
            }
            sigma[i] = c;
            let consistent = (0..=i).all(|a| {
                (0..=i).all(|b| {
                    let (sa, sb, si) = (sigma[a], sigma[b], c);
                    p[a][b][i] == p[sa][sb][si]
                        && p[a][i][b] == p[sa][si][sb]
                        && p[i][a][b] == p[si][sa][sb]
                })
            });
            if consistent {
                used[c] = true;
                extend(i + 1, sigma, used, out, p, k, t);
                used[c] = false;
            }
            sigma[i] = usize::MAX;
        }
    }

    if r == 1 {
        return vec![vec![0]];
    }
    extend(1, &mut sigma, &mut used, &mut out, &p, k, t);
    out
}

/// Orbits of the diagonal action on ordered pairs; entry `x * n + y` is the
/// orbital index of `(x, y)`, numbered by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbitals {
    degree: usize,
    class_of: Vec<usize>,
    count: usize,
}

impl Orbitals {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn orbital(&self, x: usize, y: usize) -> usize {
        self.class_of[x * self.degree + y]
    }

    /// Each orbital as a sorted list of pairs.
    pub fn classes(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.count];
        for (idx, &c) in self.class_of.iter().enumerate() {
            out[c].push((idx / self.degree, idx % self.degree));
        }
        out
    }
}

/// Union-find over pairs, joining `(x, y)` with `(g x, g y)` for every generator.
pub fn orbitals(generators: &[Perm], n: usize) -> Orbitals {
    let mut parent: Vec<usize> = (0..n * n).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for g in generators {
        for x in 0..n {
            for y in 0..n {
                let a = find(&mut parent, x * n + y);
                let b = find(&mut parent, g[x] * n + g[y]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut index = BTreeMap::new();
    let class_of: Vec<usize> = (0..n * n)
        .map(|p| {
            let root = find(&mut parent, p);
            let next = index.len();
            *index.entry(root).or_insert(next)
        })
        .collect();
    Orbitals {
        degree: n,
        count: index.len(),
        class_of,
    }
}

/// Whether `Aut(X|I)` is transitive on every relation, i.e. its orbitals are
/// exactly the relations.
pub fn is_schurian(s: &Scheme) -> bool {
    let g = color_aut_group(s);
    orbitals(&g.point_generators(), s.size()).count() == s.num_relations()
}

/// Number of automorphisms of `s` with each label permutation.
///
/// Small groups are enumerated; otherwise every realized `τ` gets
/// `|Aut(X|I)|`, the size of every fiber of the homomorphism `f ↦ σ`.
pub fn sigma_fiber_counts(s: &Scheme) -> BTreeMap<Perm, BigUint> {
    let full = full_aut_group(s);
    let mut counts: BTreeMap<Perm, BigUint> = BTreeMap::new();
    if let Some(elements) = full.elements(ENUMERATION_LIMIT) {
        for f in elements {
            let a = Automorphism::from_point_map(s, &f).expect("group element is an automorphism");
            *counts.entry(a.sigma).or_insert_with(BigUint::zero) += 1u32;
        }
        return counts;
    }
    let kernel = color_aut_group(s).order().clone();
    let realized = realized_sigmas(s, &full);
    for tau in realized {
        counts.insert(tau, kernel.clone());
    }
    counts
}

/// The label permutations of the group generated by `g`'s generators.
fn realized_sigmas(s: &Scheme, g: &PermGroupWithColors) -> Vec<Perm> {
    let r = s.num_relations();
    let sigmas: Vec<Perm> = g.generators().iter().map(|a| a.sigma.clone()).collect();
    enumerate(r, &sigmas, usize::MAX).expect("no limit")
}

/// `|Aut(X)| · Σ_τ |Aut(Y)_τ|^{#X}`, with per-`τ` counts from
/// [`sigma_fiber_counts`].
pub fn predicted_wreath_aut_order(x: &Scheme, y: &Scheme) -> BigUint {
    let aut_x = full_aut_group(x).order().clone();
    let exponent = x.size() as u32;
    let k: BigUint = sigma_fiber_counts(y)
        .values()
        .map(|c| c.pow(exponent))
        .fold(BigUint::zero(), |a, b| a + b);
    aut_x * k
}

/// Every automorphism of `s` by trying all `n!` point bijections.
pub fn brute_force_automorphisms(s: &Scheme) -> Vec<Automorphism> {
    let n = s.size();
    assert!(n <= 9, "brute force is limited to 9 points");
    let mut f: Perm = (0..n).collect();
    let mut out = Vec::new();
    loop {
        if let Some(a) = Automorphism::from_point_map(s, &f) {
            out.push(a);
        }
        if !next_permutation(&mut f) {
            return out;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl PermGroupWithColors {
    /// Order as a decimal string.
    pub fn order_string(&self) -> String {
        self.order.to_str_radix(10)
    }

    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }
}

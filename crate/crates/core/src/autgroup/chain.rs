use num_bigint::BigUint;
use num_traits::One;

/// A permutation of `0..n` as its image vector.
pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &v)| i == v)
}

/// `a` then `b`: `x ↦ b[a[x]]`.
pub fn compose(a: &[usize], b: &[usize]) -> Perm {
    a.iter().map(|&x| b[x]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

struct Level {
    base: usize,
    /// Generators added at this level; the level's group is generated by
    /// these together with the generators of all deeper levels.
    gens: Vec<Perm>,
    /// `transversal[u]` maps `base` to `u`, for `u` in the orbit.
    transversal: Vec<Option<Perm>>,
    orbit: Vec<usize>,
}

/// Base and strong generating set built by the deterministic Schreier–Sims
/// algorithm with explicit transversals. New levels take the smallest point
/// moved by the element that created them.
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(degree: usize, generators: &[Perm]) -> Self {
        let mut chain = StabilizerChain {
            degree,
            levels: Vec::new(),
        };
        for g in generators {
            assert_eq!(g.len(), degree, "generator degree");
            let (residue, level) = chain.sift(g.clone(), 0);
            if !is_identity(&residue) {
                chain.insert(level, residue);
                chain.complete(level);
            }
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, p: &[usize]) -> bool {
        p.len() == self.degree && is_identity(&self.sift(p.to_vec(), 0).0)
    }

    /// Strips `g` through the levels from `start`; returns the residue and
    /// the level where stripping stopped (`levels.len()` if it went through).
    fn sift(&self, mut g: Perm, start: usize) -> (Perm, usize) {
        for (j, level) in self.levels.iter().enumerate().skip(start) {
            let u = g[level.base];
            match &level.transversal[u] {
                Some(t) => g = compose(&g, &inverse(t)),
                None => return (g, j),
            }
        }
        (g, self.levels.len())
    }

    fn insert(&mut self, level: usize, g: Perm) {
        if level == self.levels.len() {
            let base = g
                .iter()
                .enumerate()
                .find(|&(i, &v)| i != v)
                .map(|(i, _)| i)
                .expect("inserted element is not the identity");
            let mut transversal = vec![None; self.degree];
            transversal[base] = Some(identity(self.degree));
            self.levels.push(Level {
                base,
                gens: Vec::new(),
                transversal,
                orbit: vec![base],
            });
        }
        self.levels[level].gens.push(g);
    }

    fn level_generators(&self, j: usize) -> Vec<Perm> {
        self.levels[j..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    fn recompute_orbit(&mut self, j: usize) {
        let gens = self.level_generators(j);
        let level = &mut self.levels[j];
        let mut k = 0;
        while k < level.orbit.len() {
            let u = level.orbit[k];
            let tu = level.transversal[u]
                .clone()
                .expect("orbit point has a transversal");
            for s in &gens {
                let v = s[u];
                if level.transversal[v].is_none() {
                    level.transversal[v] = Some(compose(&tu, s));
                    level.orbit.push(v);
                }
            }
            k += 1;
        }
    }

    /// Restores the Schreier criterion at every level `<= top`, assuming the
    /// levels below `top` already satisfy it.
    fn complete(&mut self, top: usize) {
        let mut j = top.min(self.levels.len() - 1) as isize;
        'levels: while j >= 0 {
            let ju = j as usize;
            self.recompute_orbit(ju);
            let gens = self.level_generators(ju);
            let orbit = self.levels[ju].orbit.clone();
            for &u in &orbit {
                let tu = self.levels[ju].transversal[u].clone().expect("orbit point");
                for s in &gens {
                    let v = s[u];
                    let tv = self.levels[ju].transversal[v]
                        .as_ref()
                        .expect("orbit is closed");
                    let schreier = compose(&compose(&tu, s), &inverse(tv));
                    let (residue, stop) = self.sift(schreier, ju + 1);
                    if !is_identity(&residue) {
                        self.insert(stop, residue);
                        j = stop as isize;
                        continue 'levels;
                    }
                }
            }
            j -= 1;
        }
    }
}

/// All elements of the group generated by `gens`, or `None` past `limit`.
pub fn enumerate(degree: usize, gens: &[Perm], limit: usize) -> Option<Vec<Perm>> {
    let mut seen = std::collections::HashSet::new();
    let id = identity(degree);
    seen.insert(id.clone());
    let mut out = vec![id];
    let mut k = 0;
    while k < out.len() {
        for s in gens {
            let p = compose(&out[k], s);
            if seen.insert(p.clone()) {
                if out.len() == limit {
                    return None;
                }
                out.push(p);
            }
        }
        k += 1;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_groups() {
        for n in 1..7 {
            let mut gens = Vec::new();
            if n > 1 {
                gens.push((1..n).chain([0]).collect());
                let mut t = identity(n);
                t.swap(0, 1);
                gens.push(t);
            }
            let chain = StabilizerChain::new(n, &gens);
            let fact: u64 = (1..=n as u64).product();
            assert_eq!(chain.order(), BigUint::from(fact));
        }
    }

    #[test]
    fn membership() {
        let chain = StabilizerChain::new(4, &[vec![1, 2, 3, 0]]);
        assert_eq!(chain.order(), BigUint::from(4u32));
        assert!(chain.contains(&[2, 3, 0, 1]));
        assert!(!chain.contains(&[1, 0, 2, 3]));
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Perm> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn order_matches_enumeration(gens in proptest::collection::vec(perm_strategy(6), 1..4)) {
            let chain = StabilizerChain::new(6, &gens);
            let elements = enumerate(6, &gens, 1000).unwrap();
            prop_assert_eq!(chain.order(), BigUint::from(elements.len()));
            for e in &elements {
                prop_assert!(chain.contains(e));
            }
        }
    }
}

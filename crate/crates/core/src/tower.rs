//! Finite truncations of iterated wreath products `X_1 ≀ X_2 ≀ ...`.
//!
//! Truncation `n` is left-nested: `(X_1 ≀ ... ≀ X_{n-1}) ≀ X_n`. Points are
//! words `(a_1, ..., a_n)` encoded most significant first; the labels of level
//! `i` occupy a contiguous block after those of levels `< i`.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::products::{class_one, projection_morphism, SizeCap};
use crate::scheme::{Morphism, MorphismDefect, Scheme};
use crate::spectral::{
    decompose, embed_algebra, idempotent_correspondence, IdempotentCorrespondence,
};

/// A tower of schemes with memoized truncations and step morphisms.
#[derive(Debug)]
pub struct Tower {
    factors: Vec<Arc<Scheme>>,
    repeat_last: bool,
    cap: SizeCap,
    truncations: Mutex<Vec<Arc<Scheme>>>,
    steps: Mutex<BTreeMap<usize, Morphism>>,
}

impl Tower {
    pub fn new(factors: Vec<Scheme>) -> Result<Self> {
        Tower::build(factors, false)
    }

    /// A tower whose last factor repeats forever.
    pub fn repeating(factors: Vec<Scheme>) -> Result<Self> {
        Tower::build(factors, true)
    }

    /// The kernel tower `H(1,v) ≀ H(1,v) ≀ ...`.
    pub fn kernel(v: usize) -> Result<Self> {
        Tower::repeating(vec![class_one(v)?])
    }

    fn build(factors: Vec<Scheme>, repeat_last: bool) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(
                "a tower needs at least one factor".into(),
            ));
        }
        Ok(Tower {
            factors: factors.into_iter().map(Arc::new).collect(),
            repeat_last,
            cap: SizeCap::default(),
            truncations: Mutex::new(Vec::new()),
            steps: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn with_cap(mut self, cap: SizeCap) -> Self {
        self.cap = cap;
        self
    }

    /// `None` for repeating towers.
    pub fn max_depth(&self) -> Option<usize> {
        (!self.repeat_last).then_some(self.factors.len())
    }

    fn check_depth(&self, n: usize) -> Result<()> {
        if n == 0 || self.max_depth().is_some_and(|d| n > d) {
            return Err(Error::InvalidArgument(format!(
                "depth {n} outside 1..={}",
                self.max_depth().map_or("∞".to_string(), |d| d.to_string())
            )));
        }
        Ok(())
    }

    /// Factor `X_n`, 1-based.
    pub fn factor(&self, n: usize) -> Result<Arc<Scheme>> {
        self.check_depth(n)?;
        Ok(self.factors[(n - 1).min(self.factors.len() - 1)].clone())
    }

    /// `X_1 ≀ ... ≀ X_n`, memoized.
    pub fn truncation(&self, n: usize) -> Result<Arc<Scheme>> {
        self.check_depth(n)?;
        let mut cache = self.truncations.lock().expect("truncation cache poisoned");
        while cache.len() < n {
            let next = match cache.last() {
                None => self.factor(1)?,
                Some(prev) => Arc::new(
                    self.cap
                        .wreath_product(prev, &*self.factor(cache.len() + 1)?)?,
                ),
            };
            cache.push(next);
        }
        Ok(cache[n - 1].clone())
    }

    /// Number of relations of truncation `n` without building it.
    pub fn num_relations(&self, n: usize) -> Result<usize> {
        (1..=n).try_fold(1, |acc, i| Ok(acc + self.factor(i)?.num_relations() - 1))
    }

    /// `p_{n,n-1}`: drops the last coordinate and sends level-`n` labels to 0.
    pub fn step_morphism(&self, n: usize) -> Result<Morphism> {
        if n < 2 {
            return Err(Error::InvalidArgument(
                "step morphisms start at depth 2".into(),
            ));
        }
        self.check_depth(n)?;
        if let Some(m) = self.steps.lock().expect("step cache poisoned").get(&n) {
            return Ok(m.clone());
        }
        let m = projection_morphism(&*self.truncation(n - 1)?, &*self.factor(n)?);
        Ok(self
            .steps
            .lock()
            .expect("step cache poisoned")
            .entry(n)
            .or_insert(m)
            .clone())
    }

    /// Replaces a cached step morphism; for fault-injection tests.
    #[doc(hidden)]
    pub fn override_step(&self, n: usize, m: Morphism) {
        self.steps.lock().expect("step cache poisoned").insert(n, m);
    }

    /// `p_{n,m}` computed directly: drops the last `n - m` coordinates and
    /// sends every label above level `m` to 0.
    pub fn direct_projection(&self, n: usize, m: usize) -> Result<Morphism> {
        if m == 0 || m > n {
            return Err(Error::InvalidArgument(format!(
                "no projection from {n} to {m}"
            )));
        }
        let src = self.truncation(n)?;
        let dst = self.truncation(m)?;
        let block = src.size() / dst.size();
        let keep = self.num_relations(m)?;
        Ok(Morphism {
            f: (0..src.size()).map(|p| p / block).collect(),
            sigma: (0..src.num_relations())
                .map(|l| if l < keep { l } else { 0 })
                .collect(),
        })
    }

    /// `p_{n,m}` as the composite of cached step morphisms.
    pub fn composite_morphism(&self, n: usize, m: usize) -> Result<Morphism> {
        if m == 0 || m > n {
            return Err(Error::InvalidArgument(format!(
                "no projection from {n} to {m}"
            )));
        }
        let mut acc = Morphism::identity(&*self.truncation(n)?);
        for k in (m + 1..=n).rev() {
            acc = self.step_morphism(k)?.after(&acc);
        }
        Ok(acc)
    }

    /// Checks the projective-system conditions on the chain up to `depth`:
    /// every `p_{n,m}` is a morphism surjective on points and labels, `p_{n,n}`
    /// is the identity, and `p_{n,l} = p_{m,l} ∘ p_{n,m}` for `n ≥ m ≥ l`.
    ///
    /// Steps `p_{k,k-1}` come from the cache; longer projections are computed
    /// directly, so a corrupted step shows up in the composition law.
    pub fn verify_projective_system(&self, depth: usize) -> Result<ProjectiveCheck> {
        self.check_depth(depth)?;
        let mut maps: BTreeMap<(usize, usize), Morphism> = BTreeMap::new();
        for n in 1..=depth {
            let src = self.truncation(n)?;
            for m in 1..=n {
                let dst = self.truncation(m)?;
                let p = match n - m {
                    0 => Morphism::identity(&src),
                    1 => self.step_morphism(n)?,
                    _ => self.direct_projection(n, m)?,
                };
                if m == n && p != Morphism::identity(&src) {
                    return Ok(ProjectiveCheck::failed(ProjectiveFailure::IdentityFails {
                        n,
                    }));
                }
                match p.defect(&src, &dst) {
                    Ok(None) => {}
                    Ok(Some(defect)) => {
                        return Ok(ProjectiveCheck::failed(ProjectiveFailure::NotAMorphism {
                            n,
                            m,
                            defect: defect.to_string(),
                        }))
                    }
                    Err(e) => {
                        return Ok(ProjectiveCheck::failed(ProjectiveFailure::NotAMorphism {
                            n,
                            m,
                            defect: e.to_string(),
                        }))
                    }
                }
                let sigma_onto = {
                    let mut hit = vec![false; dst.num_relations()];
                    p.sigma.iter().for_each(|&l| hit[l] = true);
                    hit.into_iter().all(|h| h)
                };
                if !p.is_point_surjective(dst.size()) || !sigma_onto {
                    return Ok(ProjectiveCheck::failed(ProjectiveFailure::NotSurjective {
                        n,
                        m,
                    }));
                }
                maps.insert((n, m), p);
            }
        }
        for n in 1..=depth {
            for m in 1..=n {
                for l in 1..=m {
                    if maps[&(m, l)].after(&maps[&(n, m)]) != maps[&(n, l)] {
                        return Ok(ProjectiveCheck::failed(
                            ProjectiveFailure::CompositionFails { n, m, l },
                        ));
                    }
                }
            }
        }
        Ok(ProjectiveCheck {
            ok: true,
            failure: None,
        })
    }

    /// Labels of truncation `n` in the limit notation.
    ///
    /// `J`-labels need every factor to be commutative and are `None` otherwise.
    pub fn limit_labels(&self, n: usize) -> Result<LimitLabels> {
        self.check_depth(n)?;
        let mut i_labels = vec![LimitLabel::Tail];
        let mut j_labels = Some(Vec::new());
        for level in 1..=n {
            let f = self.factor(level)?;
            let r = f.num_relations();
            i_labels.extend((1..r).map(|label| LimitLabel::Level { level, label }));
            if !f.is_commutative() {
                j_labels = None;
            }
            if let Some(js) = j_labels.as_mut() {
                let first = if level == 1 { 0 } else { 1 };
                js.extend((first..r).map(|label| LimitLabel::Level { level, label }));
            }
        }
        Ok(LimitLabels { i_labels, j_labels })
    }

    /// Block structure of the idempotents of truncation `n - 1` pulled back
    /// along the step morphism to truncation `n`.
    pub fn idempotent_step(&self, n: usize, tol: f64) -> Result<IdempotentCorrespondence> {
        let src = self.truncation(n)?;
        let dst = self.truncation(n - 1)?;
        let m = self.step_morphism(n)?;
        let psi = embed_algebra(&src, &dst, &m)?;
        let src_spec = decompose(&src, tol)?.to_complex();
        let dst_spec = decompose(&dst, tol)?.to_complex();
        idempotent_correspondence(
            &src,
            &src_spec,
            &dst,
            &dst_spec,
            &psi,
            crate::spectral::VERIFY_TOL,
        )
    }
}

/// Outcome of [`Tower::verify_projective_system`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectiveCheck {
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<ProjectiveFailure>,
}

impl ProjectiveCheck {
    fn failed(f: ProjectiveFailure) -> Self {
        ProjectiveCheck {
            ok: false,
            failure: Some(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProjectiveFailure {
    NotAMorphism { n: usize, m: usize, defect: String },
    NotSurjective { n: usize, m: usize },
    IdentityFails { n: usize },
    CompositionFails { n: usize, m: usize, l: usize },
}

impl std::fmt::Display for ProjectiveFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProjectiveFailure::NotAMorphism { n, m, defect } => {
                write!(f, "p_({n},{m}) is not a morphism: {defect}")
            }
            ProjectiveFailure::NotSurjective { n, m } => write!(f, "p_({n},{m}) is not surjective"),
            ProjectiveFailure::IdentityFails { n } => write!(f, "p_({n},{n}) is not the identity"),
            ProjectiveFailure::CompositionFails { n, m, l } => {
                write!(f, "p_({n},{l}) differs from p_({m},{l}) after p_({n},{m})")
            }
        }
    }
}

/// A relation or idempotent label in limit notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(untagged)]
pub enum LimitLabel {
    /// The limit of the identity relation.
    Tail,
    Level {
        level: usize,
        label: usize,
    },
}

impl std::fmt::Display for LimitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LimitLabel::Tail => write!(f, "tail"),
            LimitLabel::Level { level, label } => write!(f, "({level},{label})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitLabels {
    pub i_labels: Vec<LimitLabel>,
    pub j_labels: Option<Vec<LimitLabel>>,
}

impl LimitLabels {
    /// Position in truncation `n` of a relation label: 0 for the tail, then
    /// level blocks in order.
    pub fn relation_index(&self, label: &LimitLabel) -> Option<usize> {
        self.i_labels.iter().position(|l| l == label)
    }

    pub fn idempotent_index(&self, label: &LimitLabel) -> Option<usize> {
        self.j_labels.as_ref()?.iter().position(|l| l == label)
    }
}

/// Verifies that a corrupt step is a morphism defect; used by callers that
/// want the defect without running the whole check.
pub fn step_defect(t: &Tower, n: usize) -> Result<Option<MorphismDefect>> {
    t.step_morphism(n)?
        .defect(&*t.truncation(n)?, &*t.truncation(n - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::{kernel_scheme, wreath_product};

    #[test]
    fn kernel_tower_truncations() {
        let t = Tower::kernel(2).unwrap();
        assert_eq!(*t.truncation(3).unwrap(), kernel_scheme(3, 2).unwrap());
        assert_eq!(*t.truncation(1).unwrap(), class_one(2).unwrap());
        assert_eq!(t.truncation(4).unwrap().num_relations(), 5);
        assert_eq!(t.num_relations(4).unwrap(), 5);
        assert_eq!(t.step_morphism(2).unwrap().sigma, vec![0, 1, 0]);
        assert_eq!(t.max_depth(), None);
    }

    #[test]
    fn composite_equals_direct() {
        let t = Tower::kernel(2).unwrap();
        assert_eq!(
            t.composite_morphism(3, 1).unwrap(),
            t.direct_projection(3, 1).unwrap()
        );
        assert!(t.verify_projective_system(4).unwrap().ok);
    }

    #[test]
    fn mixed_tower() {
        let t = Tower::new(vec![
            class_one(2).unwrap(),
            class_one(3).unwrap(),
            class_one(2).unwrap(),
        ])
        .unwrap();
        assert!(t.verify_projective_system(3).unwrap().ok);
        assert!(t.truncation(4).is_err());
        let labels = t.limit_labels(2).unwrap();
        assert_eq!(labels.j_labels.unwrap().len(), 3);
        let left = wreath_product(
            &wreath_product(&class_one(2).unwrap(), &class_one(3).unwrap()).unwrap(),
            &class_one(2).unwrap(),
        )
        .unwrap();
        assert_eq!(*t.truncation(3).unwrap(), left);
    }

    #[test]
    fn corrupted_steps_are_caught() {
        let t = Tower::kernel(2).unwrap();
        let mut bad = t.step_morphism(3).unwrap();
        bad.sigma[2] = 0;
        t.override_step(3, bad);
        let check = t.verify_projective_system(3).unwrap();
        assert!(matches!(
            check.failure,
            Some(ProjectiveFailure::NotAMorphism { n: 3, m: 2, .. })
        ));
        assert!(step_defect(&t, 3).unwrap().is_some());

        // A valid but twisted step: swap the two blocks of truncation 2.
        let t = Tower::kernel(2).unwrap();
        let mut twisted = t.step_morphism(3).unwrap();
        twisted.f = twisted.f.iter().map(|&p| (p + 2) % 4).collect();
        t.override_step(3, twisted);
        let check = t.verify_projective_system(3).unwrap();
        assert_eq!(
            check.failure,
            Some(ProjectiveFailure::CompositionFails { n: 3, m: 2, l: 1 })
        );
    }

    #[test]
    fn reassociation() {
        let (a, b, c, d) = (
            class_one(2).unwrap(),
            class_one(3).unwrap(),
            class_one(2).unwrap(),
            class_one(3).unwrap(),
        );
        let t = Tower::new(vec![a.clone(), b.clone(), c.clone(), d.clone()]).unwrap();
        let w = |x: &Scheme, y: &Scheme| wreath_product(x, y).unwrap();
        assert_eq!(*t.truncation(3).unwrap(), w(&a, &w(&b, &c)));
        assert_eq!(*t.truncation(4).unwrap(), w(&w(&a, &b), &w(&c, &d)));
        assert_eq!(*t.truncation(4).unwrap(), w(&a, &w(&b, &w(&c, &d))));
    }

    #[test]
    fn kernel_labels() {
        let t = Tower::kernel(2).unwrap();
        let labels = t.limit_labels(3).unwrap();
        assert_eq!(labels.i_labels.len(), 4);
        assert_eq!(labels.i_labels[0], LimitLabel::Tail);
        assert_eq!(labels.i_labels[3], LimitLabel::Level { level: 3, label: 1 });
        let j = labels.j_labels.unwrap();
        assert_eq!(
            j,
            vec![
                LimitLabel::Level { level: 1, label: 0 },
                LimitLabel::Level { level: 1, label: 1 },
                LimitLabel::Level { level: 2, label: 1 },
                LimitLabel::Level { level: 3, label: 1 },
            ]
        );
    }

    #[test]
    fn idempotent_steps_are_singletons() {
        let t = Tower::kernel(2).unwrap();
        for n in 2..=4 {
            let c = t.idempotent_step(n, 1e-9).unwrap();
            let expect: Vec<Vec<usize>> = (0..n).map(|j| vec![j]).collect();
            assert_eq!(c.blocks, expect);
        }
    }

    #[test]
    fn concurrent_truncations() {
        let t = Tower::kernel(2).unwrap();
        std::thread::scope(|s| {
            let hs: Vec<_> = (1..=5)
                .rev()
                .map(|n| {
                    let t = &t;
                    s.spawn(move || t.truncation(n).unwrap().size())
                })
                .collect();
            let sizes: Vec<usize> = hs.into_iter().map(|h| h.join().unwrap()).collect();
            assert_eq!(sizes, vec![32, 16, 8, 4, 2]);
        });
    }
}

//! Small named schemes used throughout the tests and the CLI.

use crate::cayley::{cayley_scheme, cayley_spectrum, ClassPartition, GroupTable};
use crate::error::Result;
use crate::field::Cyclotomic;
use crate::scheme::Scheme;
use crate::spectral::SpectralDecomposition;

/// A named scheme together with an S-ring presentation of it.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub scheme: Scheme,
    pub group: GroupTable,
    pub partition: ClassPartition,
}

impl CatalogEntry {
    fn new(name: &'static str, group: GroupTable, classes: Vec<Vec<usize>>) -> Self {
        let partition = ClassPartition::new(group.order(), classes).expect("catalog partition");
        let scheme = cayley_scheme(&group, &partition).expect("catalog S-ring");
        CatalogEntry {
            name,
            scheme,
            group,
            partition,
        }
    }

    /// Exact decomposition from the group characters.
    pub fn exact_spectrum(&self) -> Result<SpectralDecomposition<Cyclotomic>> {
        cayley_spectrum(&self.group, &self.partition)
    }
}

/// `H(1, v)` as the S-ring `{0}, Z_v \ {0}`.
fn class_one_entry(name: &'static str, v: usize) -> CatalogEntry {
    let g = GroupTable::cyclic(v).expect("v >= 1");
    CatalogEntry::new(name, g, vec![vec![0], (1..v).collect()])
}

fn thin_entry(name: &'static str, v: usize) -> CatalogEntry {
    let g = GroupTable::cyclic(v).expect("v >= 1");
    CatalogEntry::new(name, g, (0..v).map(|x| vec![x]).collect())
}

/// The six reference schemes: `H(1,2)`, `H(1,3)`, `kernel(2,2)`, thin `Z3`,
/// thin `Z4`, and `Z4` with classes `{0},{2},{1,3}`.
///
/// `kernel(2,2)` is presented over `Z2 × Z2` (element `2a + b` is the word
/// `ab`): the first coordinate differs on `{2, 3}`, only the second on `{1}`.
pub fn catalog() -> Vec<CatalogEntry> {
    let z2sq = GroupTable::elementary_abelian(2, 2).expect("prime");
    let z4 = GroupTable::cyclic(4).expect("order 4");
    vec![
        class_one_entry("H(1,2)", 2),
        class_one_entry("H(1,3)", 3),
        CatalogEntry::new("kernel(2,2)", z2sq, vec![vec![0], vec![2, 3], vec![1]]),
        thin_entry("thin Z3", 3),
        thin_entry("thin Z4", 4),
        CatalogEntry::new("Z4 {0},{2},{1,3}", z4, vec![vec![0], vec![2], vec![1, 3]]),
    ]
}

pub fn by_name(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

/// The thin scheme of `S3`, the smallest non-commutative scheme.
pub fn thin_s3() -> CatalogEntry {
    let g = GroupTable::symmetric(3).expect("S3");
    CatalogEntry::new("thin S3", g, (0..6).map(|x| vec![x]).collect())
}

//! Individualization-refinement backtracking over ordered partitions.
//!
//! Refinement splits each cell by the colour-degree vector of its points
//! (number of points of each cell reached by each colour). It is invariant
//! under colour-preserving isomorphisms, so corresponding nodes on the two
//! sides have equal traces; leaves are always verified, so hash collisions in
//! traces can only cost time.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::chain::Perm;
use crate::scheme::Scheme;

type Partition = Vec<Vec<usize>>;
/// Sorted `(cell, colour, count)` triples.
type Signature = Vec<(usize, usize, usize)>;

/// A scheme seen through a recolouring of its labels.
#[derive(Clone, Copy)]
pub(crate) struct Side<'a> {
    scheme: &'a Scheme,
    recolor: Option<&'a [usize]>,
}

impl<'a> Side<'a> {
    pub(crate) fn plain(scheme: &'a Scheme) -> Self {
        Side {
            scheme,
            recolor: None,
        }
    }

    pub(crate) fn recolored(scheme: &'a Scheme, recolor: &'a [usize]) -> Self {
        Side {
            scheme,
            recolor: Some(recolor),
        }
    }

    fn color(&self, x: usize, y: usize) -> usize {
        let l = self.scheme.relation(x, y);
        self.recolor.map_or(l, |m| m[l])
    }

    fn size(&self) -> usize {
        self.scheme.size()
    }
}

struct Node {
    cells: Partition,
    trace: Vec<u64>,
}

fn refine(side: Side<'_>, mut cells: Partition) -> Node {
    let n = side.size();
    let mut trace = Vec::new();
    let mut cell_of = vec![0usize; n];
    loop {
        for (c, cell) in cells.iter().enumerate() {
            for &x in cell {
                cell_of[x] = c;
            }
        }
        let mut hasher = DefaultHasher::new();
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Signature, usize)> = cell
                .iter()
                .map(|&x| (signature(side, &cell_of, x), x))
                .collect();
            keyed.sort();
            let mut start = 0;
            for k in 1..=keyed.len() {
                if k == keyed.len() || keyed[k].0 != keyed[start].0 {
                    keyed[start].0.hash(&mut hasher);
                    (k - start).hash(&mut hasher);
                    next.push(keyed[start..k].iter().map(|(_, x)| *x).collect());
                    start = k;
                }
            }
        }
        trace.push(hasher.finish());
        let stable = next.len() == cells.len();
        cells = next;
        if stable {
            return Node { cells, trace };
        }
    }
}

/// Sorted `(cell, colour, count)` triples for the edges leaving `x`.
fn signature(side: Side<'_>, cell_of: &[usize], x: usize) -> Signature {
    let mut keys: Vec<(usize, usize)> = (0..side.size())
        .map(|y| (cell_of[y], side.color(x, y)))
        .collect();
    keys.sort_unstable();
    let mut out: Vec<(usize, usize, usize)> = Vec::new();
    for (c, l) in keys {
        match out.last_mut() {
            Some(last) if last.0 == c && last.1 == l => last.2 += 1,
            _ => out.push((c, l, 1)),
        }
    }
    out
}

fn individualize(cells: &Partition, t: usize, v: usize) -> Partition {
    let mut out = Vec::with_capacity(cells.len() + 1);
    out.extend(cells[..t].iter().cloned());
    out.push(vec![v]);
    out.push(cells[t].iter().copied().filter(|&x| x != v).collect());
    out.extend(cells[t + 1..].iter().cloned());
    out
}

fn target_cell(cells: &Partition) -> Option<usize> {
    cells.iter().position(|c| c.len() > 1)
}

/// Whether `f` carries the left colouring onto the right one.
fn is_isomorphism(left: Side<'_>, right: Side<'_>, f: &[usize]) -> bool {
    let n = left.size();
    (0..n).all(|x| (0..n).all(|y| right.color(f[x], f[y]) == left.color(x, y)))
}

fn leaf_map(left: &Partition, right: &Partition) -> Perm {
    let mut f = vec![0; left.len()];
    for (l, r) in left.iter().zip(right) {
        f[l[0]] = r[0];
    }
    f
}

/// Searches the subtree below `(lp, rp)` for an isomorphism; the left side
/// always follows its first point.
fn find_below(left: Side<'_>, right: Side<'_>, lp: &Node, rp: &Node) -> Option<Perm> {
    if lp.trace != rp.trace || lp.cells.len() != rp.cells.len() {
        return None;
    }
    let Some(t) = target_cell(&lp.cells) else {
        let f = leaf_map(&lp.cells, &rp.cells);
        return is_isomorphism(left, right, &f).then_some(f);
    };
    if rp.cells[t].len() != lp.cells[t].len() {
        return None;
    }
    let b = lp.cells[t][0];
    let lchild = refine(left, individualize(&lp.cells, t, b));
    rp.cells[t].iter().find_map(|&v| {
        let rchild = refine(right, individualize(&rp.cells, t, v));
        find_below(left, right, &lchild, &rchild)
    })
}

/// One isomorphism from `left` to `right`, if any.
pub(crate) fn find_isomorphism(left: Side<'_>, right: Side<'_>) -> Option<Perm> {
    let n = left.size();
    let unit: Partition = vec![(0..n).collect()];
    let lp = refine(left, unit.clone());
    let rp = refine(right, unit);
    find_below(left, right, &lp, &rp)
}

/// Generators of the colour-preserving automorphism group.
///
/// Walks the leftmost path, then from the deepest level upwards tries every
/// point of the target cell that is not yet in the orbit of the path point
/// under the generators found so far (all of which fix the earlier path
/// points). The generators found form a strong generating set relative to
/// the path points; the returned orbit sizes multiply to the group order.
pub(crate) fn automorphism_generators(side: Side<'_>) -> (Vec<Perm>, Vec<usize>) {
    let n = side.size();
    let mut path = vec![refine(side, vec![(0..n).collect()])];
    let mut choices = Vec::new();
    while let Some(t) = target_cell(&path.last().expect("root").cells) {
        let node = path.last().expect("root");
        let b = node.cells[t][0];
        choices.push((t, b));
        let child = refine(side, individualize(&node.cells, t, b));
        path.push(child);
    }

    let mut gens: Vec<Perm> = Vec::new();
    let mut orbit_sizes = vec![0; choices.len()];
    for level in (0..choices.len()).rev() {
        let (t, b) = choices[level];
        let node = &path[level];
        let mut orbit = orbit_of(b, &gens, n);
        for &v in &node.cells[t] {
            if orbit[v] {
                continue;
            }
            let rchild = refine(side, individualize(&node.cells, t, v));
            if let Some(f) = find_below(side, side, &path[level + 1], &rchild) {
                gens.push(f);
                orbit = orbit_of(b, &gens, n);
            }
        }
        orbit_sizes[level] = orbit.iter().filter(|&&o| o).count();
    }
    (gens, orbit_sizes)
}

fn orbit_of(b: usize, gens: &[Perm], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[b] = true;
    let mut stack = vec![b];
    while let Some(x) = stack.pop() {
        for g in gens {
            if !seen[g[x]] {
                seen[g[x]] = true;
                stack.push(g[x]);
            }
        }
    }
    seen
}

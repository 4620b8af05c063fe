//! The right Ext-quiver of a path-spanned coalgebra and its predecessor
//! geometry.
//!
//! For a pointed coalgebra presented over a quiver, the arrows of the
//! Ext-quiver are the basis arrows collapsed by endpoints; the stored
//! multiplicity is the number of parallel basis arrows, which equals
//! dim Ext^1 between the corresponding simples. Arrow-existence queries
//! use multiplicity >= 1.

use crate::coalgebra::PathCoalgebra;
use crate::quiver::VertexId;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Vertices are the simples of the coalgebra (indexed by quiver
/// vertices); an arrow `y -> x` exists iff Ext^1(S_y, S_x) != 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtQuiver {
    vertices: Vec<VertexId>,
    multiplicities: BTreeMap<(VertexId, VertexId), usize>,
}

impl ExtQuiver {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// `(source, target, multiplicity)` triples in sorted order.
    pub fn arrows(&self) -> impl Iterator<Item = (VertexId, VertexId, usize)> + '_ {
        self.multiplicities.iter().map(|(&(y, x), &m)| (y, x, m))
    }

    pub fn multiplicity(&self, y: VertexId, x: VertexId) -> usize {
        self.multiplicities.get(&(y, x)).copied().unwrap_or(0)
    }

    pub fn has_arrow(&self, y: VertexId, x: VertexId) -> bool {
        self.multiplicity(y, x) >= 1
    }

    pub fn successors(&self, y: VertexId) -> Vec<VertexId> {
        self.multiplicities
            .keys()
            .filter(|&&(s, _)| s == y)
            .map(|&(_, t)| t)
            .collect()
    }

    pub fn predecessors_of(&self, x: VertexId) -> Vec<VertexId> {
        self.multiplicities
            .keys()
            .filter(|&&(_, t)| t == x)
            .map(|&(s, _)| s)
            .collect()
    }

    /// Vertices reachable from `starts` by one or more arrows.
    pub fn reachable_from(&self, starts: impl IntoIterator<Item = VertexId>) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<VertexId> = starts.into_iter().collect();
        let mut out = BTreeSet::new();
        while let Some(v) = queue.pop_front() {
            for t in self.successors(v) {
                if seen.insert(t) {
                    out.insert(t);
                    queue.push_back(t);
                }
            }
        }
        out
    }

    /// Weakly connected components, each as a sorted vertex set.
    pub fn weak_components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut remaining: BTreeSet<VertexId> = self.vertices.iter().copied().collect();
        let mut comps = Vec::new();
        while let Some(&start) = remaining.iter().next() {
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::new();
            queue.push_back(start);
            remaining.remove(&start);
            comp.insert(start);
            while let Some(v) = queue.pop_front() {
                for &(s, t) in self.multiplicities.keys() {
                    let other = if s == v {
                        Some(t)
                    } else if t == v {
                        Some(s)
                    } else {
                        None
                    };
                    if let Some(w) = other {
                        if remaining.remove(&w) {
                            comp.insert(w);
                            queue.push_back(w);
                        }
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }
}

/// The n-predecessors of a fixed simple, with multiplicities: entry
/// `(y, r)` means `y` occurs `r` times in the n-th socle quotient of the
/// injective envelope, i.e. there are `r` basis paths of length `n` from
/// `y` into the fixed vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredecessorReport {
    pub n: usize,
    pub entries: BTreeMap<VertexId, usize>,
}

impl PredecessorReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, y: VertexId) -> usize {
        self.entries.get(&y).copied().unwrap_or(0)
    }
}

/// The right Ext-quiver: basis arrows collapsed by endpoints with counts.
pub fn ext_quiver(c: &PathCoalgebra) -> ExtQuiver {
    let q = c.quiver();
    let mut multiplicities: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for a in c.basis_arrows() {
        *multiplicities.entry((q.source(a), q.target(a))).or_insert(0) += 1;
    }
    ExtQuiver {
        vertices: q.vertices().collect(),
        multiplicities,
    }
}

/// Counts of length-`n` basis paths into `x`, grouped by source. This is
/// the multiset of simple summands of the socle of E_x / Soc^n E_x.
///
/// Over the full basis the counts are powers of the adjacency matrix,
/// computed by iterating a count vector (path enumeration would be
/// exponential on cyclic multigraphs).
pub fn n_predecessors(c: &PathCoalgebra, x: VertexId, n: usize) -> PredecessorReport {
    assert!(n >= 1, "predecessor depth is 1-based");
    let mut entries: BTreeMap<VertexId, usize> = BTreeMap::new();
    match c.basis() {
        crate::coalgebra::BasisSpec::Finite(_) => {
            for p in c.basis_paths_into(x, n) {
                *entries.entry(p.source()).or_insert(0) += 1;
            }
        }
        crate::coalgebra::BasisSpec::Full => {
            let q = c.quiver();
            let nv = q.vertex_count();
            // counts[v] = number of length-k paths from v to x.
            let mut counts = vec![0u128; nv];
            counts[x.0 as usize] = 1;
            for _ in 0..n {
                let mut next = vec![0u128; nv];
                for a in q.arrow_ids() {
                    next[q.source(a).0 as usize] += counts[q.target(a).0 as usize];
                }
                counts = next;
            }
            for v in q.vertices() {
                let m = counts[v.0 as usize];
                if m > 0 {
                    entries.insert(v, m as usize);
                }
            }
        }
    }
    PredecessorReport { n, entries }
}

/// Smallest `n >= 1` such that `y` is an n-predecessor of `x`, if any.
///
/// For a finite basis, witnesses are bounded by the maximal basis path
/// length and found by scanning it. Over the full path coalgebra a
/// witness exists iff a quiver path from `y` to `x` does (any witness of
/// length at most |Q0| + |Q1| would do, and any walk contains one), so a
/// breadth-first search returns the smallest length directly.
pub fn is_predecessor(c: &PathCoalgebra, y: VertexId, x: VertexId) -> Option<usize> {
    let q = c.quiver();
    match c.basis() {
        crate::coalgebra::BasisSpec::Finite(set) => set
            .iter()
            .filter(|p| p.len() >= 1 && p.source() == y && p.target_in(q) == x)
            .map(|p| p.len())
            .min(),
        crate::coalgebra::BasisSpec::Full => {
            let mut dist: BTreeMap<VertexId, usize> = BTreeMap::new();
            let mut queue = VecDeque::new();
            for a in q.arrows_from(y) {
                let t = q.target(a);
                if t == x {
                    return Some(1);
                }
                if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(t) {
                    e.insert(1);
                    queue.push_back(t);
                }
            }
            while let Some(v) = queue.pop_front() {
                let d = dist[&v];
                for a in q.arrows_from(v) {
                    let t = q.target(a);
                    if t == x {
                        return Some(d + 1);
                    }
                    if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(t) {
                        e.insert(d + 1);
                        queue.push_back(t);
                    }
                }
            }
            None
        }
    }
}

/// True iff there is a directed path of exactly `len` arrows from `y` to
/// `x` in `g` whose strictly intermediate vertices all satisfy
/// `constraint`. Endpoints are unconstrained.
pub fn gamma_path_exists(
    g: &ExtQuiver,
    y: VertexId,
    x: VertexId,
    len: usize,
    constraint: impl Fn(VertexId) -> bool,
) -> bool {
    assert!(len >= 1, "path length is positive");
    let mut frontier: BTreeSet<VertexId> = BTreeSet::new();
    frontier.insert(y);
    for step in 1..=len {
        let mut next = BTreeSet::new();
        for &v in &frontier {
            for t in g.successors(v) {
                if step == len {
                    if t == x {
                        return true;
                    }
                } else if constraint(t) {
                    next.insert(t);
                }
            }
        }
        if step == len {
            return false;
        }
        frontier = next;
        if frontier.is_empty() {
            return false;
        }
    }
    false
}

//! Pointed coalgebras presented as path-spanned subcoalgebras of a path
//! coalgebra.
//!
//! A basis is either `Full` (all paths of the quiver, never materialized)
//! or `Finite` (an explicit subpath-closed path set). Subpath closure is
//! exactly the condition for the span to be a subcoalgebra: the
//! comultiplication sends a path to the sum of (terminal part) tensor
//! (initial part) over all of its two-piece factorizations, so both pieces
//! of every factorization must stay inside the basis.

use crate::error::{Error, Result};
use crate::quiver::{ArrowId, Path, Quiver, VertexId};
use std::collections::BTreeSet;

/// Degree cap for operations on potentially infinite-dimensional objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cap {
    Bounded(usize),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisSpec {
    /// Every path of the quiver.
    Full,
    /// An explicit finite path set.
    Finite(BTreeSet<Path>),
}

/// Paths of one fixed length in the basis, all ending at a common vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSlice {
    pub degree: usize,
    pub paths: Vec<Path>,
}

/// Report produced by [`PathCoalgebra::validate`]. `missing` lists every
/// subpath (including trivial paths) required by closure but absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub missing: Vec<Path>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.missing.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCoalgebra {
    quiver: Quiver,
    basis: BasisSpec,
}

impl PathCoalgebra {
    /// The full path coalgebra of `quiver`.
    pub fn full(quiver: Quiver) -> Self {
        PathCoalgebra {
            quiver,
            basis: BasisSpec::Full,
        }
    }

    /// Path-spanned subcoalgebra on the given paths, closed under
    /// subpaths automatically. Returns the coalgebra together with the
    /// paths that had to be added by closure (for user-facing notices).
    pub fn finite_closed(
        quiver: Quiver,
        paths: impl IntoIterator<Item = Path>,
    ) -> Result<(Self, Vec<Path>)> {
        let mut basis: BTreeSet<Path> = BTreeSet::new();
        for v in quiver.vertices() {
            basis.insert(Path::trivial(v));
        }
        let declared: Vec<Path> = paths.into_iter().collect();
        for p in &declared {
            if !p.is_composable_in(&quiver) {
                return Err(Error::NotComposable(0));
            }
            basis.insert(p.clone());
        }
        let mut added = Vec::new();
        for p in &declared {
            for i in 0..=p.len() {
                for j in i..=p.len() {
                    let sub = p.subpath(&quiver, i, j);
                    if basis.insert(sub.clone()) {
                        added.push(sub);
                    }
                }
            }
        }
        quiver.sort_paths(&mut added);
        Ok((
            PathCoalgebra {
                quiver,
                basis: BasisSpec::Finite(basis),
            },
            added,
        ))
    }

    /// Path-spanned subcoalgebra from a set assumed closed; `validate`
    /// reports any violation instead of erroring.
    pub fn finite_unchecked(quiver: Quiver, paths: BTreeSet<Path>) -> Self {
        PathCoalgebra {
            quiver,
            basis: BasisSpec::Finite(paths),
        }
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        matches!(self.basis, BasisSpec::Full)
    }

    /// Path coalgebras are hereditary; proper path-spanned subcoalgebras
    /// are treated as non-hereditary (this flag only gates the converse
    /// directions of the geometric characterizations).
    pub fn is_hereditary(&self) -> bool {
        self.is_full()
    }

    /// Full basis over a cyclic quiver.
    pub fn is_infinite_dimensional(&self) -> bool {
        self.is_full() && !self.quiver.is_acyclic()
    }

    pub fn contains_path(&self, p: &Path) -> bool {
        if !p.is_composable_in(&self.quiver) {
            return false;
        }
        match &self.basis {
            BasisSpec::Full => true,
            BasisSpec::Finite(set) => set.contains(p),
        }
    }

    /// Checks subpath closure and the presence of every trivial path;
    /// returns the list of missing subpaths (empty means valid).
    pub fn validate(&self) -> ValidationReport {
        let mut missing: BTreeSet<Path> = BTreeSet::new();
        if let BasisSpec::Finite(set) = &self.basis {
            for v in self.quiver.vertices() {
                let t = Path::trivial(v);
                if !set.contains(&t) {
                    missing.insert(t);
                }
            }
            for p in set {
                for i in 0..=p.len() {
                    for j in i..=p.len() {
                        let sub = p.subpath(&self.quiver, i, j);
                        if !set.contains(&sub) {
                            missing.insert(sub);
                        }
                    }
                }
            }
        }
        let mut missing: Vec<Path> = missing.into_iter().collect();
        self.quiver.sort_paths(&mut missing);
        ValidationReport { missing }
    }

    /// Basis arrows: the length-one paths of the basis.
    pub fn basis_arrows(&self) -> Vec<ArrowId> {
        match &self.basis {
            BasisSpec::Full => self.quiver.arrow_ids().collect(),
            BasisSpec::Finite(set) => set
                .iter()
                .filter(|p| p.len() == 1)
                .map(|p| p.arrows()[0])
                .collect(),
        }
    }

    /// Basis paths of exactly `len` ending at `target`, sorted.
    pub fn basis_paths_into(&self, target: VertexId, len: usize) -> Vec<Path> {
        let mut out = match &self.basis {
            BasisSpec::Full => {
                let mut frontier = vec![Path::trivial(target)];
                for _ in 0..len {
                    let mut next = Vec::new();
                    for p in &frontier {
                        for a in self.quiver.arrows_into(p.source()) {
                            next.push(p.prepend(&self.quiver, a));
                        }
                    }
                    frontier = next;
                    if frontier.is_empty() {
                        break;
                    }
                }
                frontier
            }
            BasisSpec::Finite(set) => set
                .iter()
                .filter(|p| p.len() == len && p.target_in(&self.quiver) == target)
                .cloned()
                .collect(),
        };
        self.quiver.sort_paths(&mut out);
        out
    }

    /// True iff the injective envelope at `x` is infinite dimensional,
    /// i.e. the full basis is taken and some cycle reaches `x`.
    pub fn injective_is_infinite(&self, x: VertexId) -> bool {
        self.witness_cycle_into(x).is_some()
    }

    /// A cycle from which `x` is reachable, when the basis is full.
    pub fn witness_cycle_into(&self, x: VertexId) -> Option<Vec<ArrowId>> {
        if !self.is_full() {
            return None;
        }
        // Vertices that reach x, then a cycle inside that set.
        let mut reaching: BTreeSet<VertexId> = self
            .quiver
            .reachable_through_rev([x], |_| true)
            .into_iter()
            .collect();
        reaching.insert(x);
        self.quiver.find_cycle_within(|v| reaching.contains(&v))
    }

    /// The graded slices 0..=max_deg of the injective envelope at `x`:
    /// basis paths ending at `x`, graded by length. With `Cap::Unbounded`
    /// the slices stop at the last nonempty degree; that request is a
    /// capacity error when the envelope is infinite dimensional.
    pub fn injective_basis(&self, x: VertexId, max_deg: Cap) -> Result<Vec<GradedSlice>> {
        if !self.quiver.contains_vertex(x) {
            return Err(Error::UnknownVertex(format!("#{}", x.0)));
        }
        let top = match max_deg {
            Cap::Bounded(d) => Some(d),
            Cap::Unbounded => {
                if let Some(cyc) = self.witness_cycle_into(x) {
                    let cyc_str = cyc
                        .iter()
                        .map(|&a| self.quiver.arrow_name(a))
                        .collect::<Vec<_>>()
                        .join("*");
                    return Err(Error::Capacity {
                        what: format!("E_{}", self.quiver.vertex_name(x)),
                        cycle: cyc_str,
                    });
                }
                None
            }
        };
        let mut slices: Vec<GradedSlice> = Vec::new();
        match &self.basis {
            BasisSpec::Finite(set) => {
                // One scan, bucketed by length.
                let limit = top.unwrap_or(usize::MAX);
                for p in set {
                    if p.target_in(&self.quiver) != x || p.len() > limit {
                        continue;
                    }
                    while slices.len() <= p.len() {
                        slices.push(GradedSlice {
                            degree: slices.len(),
                            paths: Vec::new(),
                        });
                    }
                    slices[p.len()].paths.push(p.clone());
                }
                for s in &mut slices {
                    self.quiver.sort_paths(&mut s.paths);
                }
            }
            BasisSpec::Full => {
                // One backward breadth-first sweep; unbounded requests
                // terminate because no cycle reaches x.
                let mut frontier = vec![Path::trivial(x)];
                let mut d = 0usize;
                loop {
                    let mut sorted = frontier.clone();
                    self.quiver.sort_paths(&mut sorted);
                    slices.push(GradedSlice {
                        degree: d,
                        paths: sorted,
                    });
                    if top == Some(d) {
                        break;
                    }
                    let mut next = Vec::new();
                    for p in &frontier {
                        for a in self.quiver.arrows_into(p.source()) {
                            next.push(p.prepend(&self.quiver, a));
                        }
                    }
                    if next.is_empty() {
                        break;
                    }
                    frontier = next;
                    d += 1;
                }
            }
        }
        if let Some(d) = top {
            while slices.len() <= d {
                slices.push(GradedSlice {
                    degree: slices.len(),
                    paths: Vec::new(),
                });
            }
        } else if slices.is_empty() {
            slices.push(GradedSlice {
                degree: 0,
                paths: vec![Path::trivial(x)],
            });
        }
        Ok(slices)
    }

    /// The coalgebra over the opposite quiver with every basis path
    /// reversed.
    pub fn opposite(&self) -> PathCoalgebra {
        let op = self.quiver.opposite();
        let basis = match &self.basis {
            BasisSpec::Full => BasisSpec::Full,
            BasisSpec::Finite(set) => BasisSpec::Finite(
                set.iter()
                    .map(|p| {
                        if p.is_trivial() {
                            Path::trivial(p.source())
                        } else {
                            let mut arrows: Vec<ArrowId> = p.arrows().to_vec();
                            arrows.reverse();
                            Path::from_arrows(&op, arrows).expect("reversal stays composable")
                        }
                    })
                    .collect(),
            ),
        };
        PathCoalgebra { quiver: op, basis }
    }
}

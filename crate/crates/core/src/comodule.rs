//! Comodules presented by path sets.
//!
//! A [`PathComodule`] is a finite direct sum of components, each a
//! subquotient of the injective envelope at its anchor vertex: `present`
//! is a terminal-closed set of basis paths ending at the anchor and
//! `killed` a terminal-closed subset; the comodule is spanned by the
//! classes of `present \ killed`. This class contains every object the
//! localization machinery manipulates (simples, injectives, socle
//! truncations, quotient and section images, finite sums); arbitrary
//! comodules are handled by the linear oracle instead.
//!
//! The Loewy layer of a surviving class is `1 + len(p) - k` where `k` is
//! the length of the shortest surviving terminal subpath of `p`; the layer
//! contributes the simple indexed by `source(p)`. For plain injectives
//! this reduces to "layer n = paths of length n - 1", the coradical
//! grading.

use crate::coalgebra::{Cap, PathCoalgebra};
use crate::error::{Error, Result};
use crate::quiver::{Path, VertexId};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Multiset of vertices with positive multiplicities.
pub type VertexMultiset = BTreeMap<VertexId, usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub anchor: VertexId,
    pub present: BTreeSet<Path>,
    pub killed: BTreeSet<Path>,
}

impl Component {
    /// Classes that survive the quotient, sorted.
    pub fn surviving(&self) -> impl Iterator<Item = &Path> {
        self.present.iter().filter(move |p| !self.killed.contains(p))
    }

    pub fn dim(&self) -> usize {
        self.present.len() - self.killed.len()
    }
}

/// Socle filtration layers; layer `n` (1-based) holds the simple summands
/// of the n-th quotient, as a vertex multiset.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoewySeries {
    layers: Vec<VertexMultiset>,
}

impl LoewySeries {
    pub fn from_layers(layers: Vec<VertexMultiset>) -> Self {
        LoewySeries { layers }
    }

    /// Layer `n`, 1-based; empty beyond the Loewy length.
    pub fn layer(&self, n: usize) -> VertexMultiset {
        assert!(n >= 1, "layers are 1-based");
        self.layers.get(n - 1).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[VertexMultiset] {
        &self.layers
    }

    pub fn total_dim(&self) -> usize {
        self.layers.iter().map(|l| l.values().sum::<usize>()).sum()
    }
}

#[derive(Debug, Clone)]
pub struct PathComodule {
    coalgebra: Arc<PathCoalgebra>,
    components: Vec<Component>,
}

impl PartialEq for PathComodule {
    fn eq(&self, other: &Self) -> bool {
        *self.coalgebra == *other.coalgebra && self.components == other.components
    }
}
impl Eq for PathComodule {}

impl PathComodule {
    /// Validating constructor. Checks anchoring, basis membership and both
    /// terminal-closure invariants.
    pub fn new(coalgebra: Arc<PathCoalgebra>, components: Vec<Component>) -> Result<Self> {
        let q = coalgebra.quiver();
        for (ci, comp) in components.iter().enumerate() {
            if !q.contains_vertex(comp.anchor) {
                return Err(Error::UnknownVertex(format!("#{}", comp.anchor.0)));
            }
            for p in &comp.present {
                if p.target_in(q) != comp.anchor {
                    return Err(Error::InvalidComodule(format!(
                        "component {ci}: path {} does not end at its anchor",
                        q.path_string(p)
                    )));
                }
                if !coalgebra.contains_path(p) {
                    return Err(Error::InvalidComodule(format!(
                        "component {ci}: path {} is not in the coalgebra basis",
                        q.path_string(p)
                    )));
                }
                for k in 0..p.len() {
                    if !comp.present.contains(&p.suffix(q, k)) {
                        return Err(Error::InvalidComodule(format!(
                            "component {ci}: present set is not terminal-closed at {}",
                            q.path_string(p)
                        )));
                    }
                }
            }
            for p in &comp.killed {
                if !comp.present.contains(p) {
                    return Err(Error::InvalidComodule(format!(
                        "component {ci}: killed path {} is not present",
                        q.path_string(p)
                    )));
                }
                for k in 0..p.len() {
                    if !comp.killed.contains(&p.suffix(q, k)) {
                        return Err(Error::InvalidComodule(format!(
                            "component {ci}: killed set is not terminal-closed at {}",
                            q.path_string(p)
                        )));
                    }
                }
            }
        }
        Ok(PathComodule {
            coalgebra,
            components,
        })
    }

    /// Unvalidated constructor for internal call sites whose outputs are
    /// terminal-closed by construction.
    pub(crate) fn from_parts(coalgebra: Arc<PathCoalgebra>, components: Vec<Component>) -> Self {
        PathComodule {
            coalgebra,
            components,
        }
    }

    /// The zero comodule.
    pub fn zero(coalgebra: Arc<PathCoalgebra>) -> Self {
        PathComodule {
            coalgebra,
            components: Vec::new(),
        }
    }

    /// The simple comodule at `x`.
    pub fn simple(coalgebra: Arc<PathCoalgebra>, x: VertexId) -> Result<Self> {
        if !coalgebra.quiver().contains_vertex(x) {
            return Err(Error::UnknownVertex(format!("#{}", x.0)));
        }
        let mut present = BTreeSet::new();
        present.insert(Path::trivial(x));
        Ok(PathComodule {
            coalgebra,
            components: vec![Component {
                anchor: x,
                present,
                killed: BTreeSet::new(),
            }],
        })
    }

    /// The injective envelope at `x`, truncated to paths of length
    /// <= `cap` when bounded. An unbounded request on an infinite
    /// envelope is a capacity error. `Cap::Bounded(d)` equals the
    /// (d+1)-st socle of the envelope.
    pub fn injective(coalgebra: Arc<PathCoalgebra>, x: VertexId, cap: Cap) -> Result<Self> {
        let slices = coalgebra.injective_basis(x, cap)?;
        let mut present = BTreeSet::new();
        for s in slices {
            present.extend(s.paths);
        }
        Ok(PathComodule {
            coalgebra,
            components: vec![Component {
                anchor: x,
                present,
                killed: BTreeSet::new(),
            }],
        })
    }

    pub fn coalgebra(&self) -> &Arc<PathCoalgebra> {
        &self.coalgebra
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(Component::dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Loewy layer (1-based) of a surviving path within its component.
    fn layer_of(&self, comp: &Component, p: &Path) -> usize {
        let q = self.coalgebra.quiver();
        let mut min_surviving = p.len();
        for k in 0..p.len() {
            if !comp.killed.contains(&p.suffix(q, k)) {
                min_surviving = k;
                break;
            }
        }
        1 + p.len() - min_surviving
    }

    /// The Loewy series: layer n lists the simple summands of the n-th
    /// socle quotient, labeled by path sources.
    pub fn socle_series(&self) -> LoewySeries {
        let mut layers: Vec<VertexMultiset> = Vec::new();
        for comp in &self.components {
            let surviving: Vec<&Path> = comp.surviving().collect();
            for p in surviving {
                let n = self.layer_of(comp, p);
                while layers.len() < n {
                    layers.push(VertexMultiset::new());
                }
                *layers[n - 1].entry(p.source()).or_insert(0) += 1;
            }
        }
        LoewySeries::from_layers(layers)
    }

    /// Quotient by the n-th socle: kills every class of layer <= n.
    pub fn quotient_by_socle(&self, n: usize) -> PathComodule {
        if n == 0 {
            return self.clone();
        }
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut killed = comp.killed.clone();
                let extra: Vec<Path> = comp
                    .surviving()
                    .filter(|p| self.layer_of(comp, p) <= n)
                    .cloned()
                    .collect();
                killed.extend(extra);
                Component {
                    anchor: comp.anchor,
                    present: comp.present.clone(),
                    killed,
                }
            })
            .collect();
        PathComodule {
            coalgebra: self.coalgebra.clone(),
            components,
        }
    }

    /// The n-th socle as a subcomodule: the classes of layer <= n.
    pub fn socle_subcomodule(&self, n: usize) -> PathComodule {
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut present = comp.killed.clone();
                for p in comp.surviving() {
                    if self.layer_of(comp, p) <= n {
                        present.insert(p.clone());
                    }
                }
                Component {
                    anchor: comp.anchor,
                    present,
                    killed: comp.killed.clone(),
                }
            })
            .collect();
        PathComodule {
            coalgebra: self.coalgebra.clone(),
            components,
        }
    }

    /// Concatenates components; all summands must live over the same
    /// coalgebra.
    pub fn direct_sum(parts: impl IntoIterator<Item = PathComodule>) -> Result<PathComodule> {
        let mut iter = parts.into_iter();
        let mut first = match iter.next() {
            Some(m) => m,
            None => return Err(Error::MixedCoalgebras),
        };
        for m in iter {
            if *m.coalgebra != *first.coalgebra {
                return Err(Error::MixedCoalgebras);
            }
            first.components.extend(m.components);
        }
        Ok(first)
    }

    /// dim Hom(S_y, self) = multiplicity of `y` in the socle.
    pub fn hom_dim_simple_into(&self, y: VertexId) -> usize {
        self.socle_series().layer(1).get(&y).copied().unwrap_or(0)
    }

    /// Kills the given surviving classes (with their surviving terminal
    /// subpaths implicitly required: the caller must pass a
    /// suffix-closed family, otherwise construction fails validation).
    pub fn kill_classes(&self, classes: &BTreeSet<Path>) -> Result<PathComodule> {
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut killed = comp.killed.clone();
                for p in comp.surviving() {
                    if classes.contains(p) {
                        killed.insert(p.clone());
                    }
                }
                Component {
                    anchor: comp.anchor,
                    present: comp.present.clone(),
                    killed,
                }
            })
            .collect();
        PathComodule::new(self.coalgebra.clone(), components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Quiver;

    fn linear_yzx_full() -> Arc<PathCoalgebra> {
        let mut q = Quiver::new();
        q.add_vertex("y").unwrap();
        q.add_vertex("z").unwrap();
        q.add_vertex("x").unwrap();
        q.add_arrow("a", "y", "z").unwrap();
        q.add_arrow("b", "z", "x").unwrap();
        Arc::new(PathCoalgebra::full(q))
    }

    fn remark_coalgebra() -> Arc<PathCoalgebra> {
        let mut q = Quiver::new();
        q.add_vertex("y").unwrap();
        q.add_vertex("z").unwrap();
        q.add_vertex("x").unwrap();
        q.add_arrow("a", "y", "z").unwrap();
        q.add_arrow("b", "z", "x").unwrap();
        let a = q.arrow("a").unwrap();
        let b = q.arrow("b").unwrap();
        let pa = Path::from_arrows(&q, vec![a]).unwrap();
        let pb = Path::from_arrows(&q, vec![b]).unwrap();
        let (c, _) = PathCoalgebra::finite_closed(q, vec![pa, pb]).unwrap();
        Arc::new(c)
    }

    fn layer_names(c: &PathCoalgebra, layer: &VertexMultiset) -> Vec<(String, usize)> {
        layer
            .iter()
            .map(|(&v, &m)| (c.quiver().vertex_name(v).to_string(), m))
            .collect()
    }

    #[test]
    fn simple_is_one_dimensional_and_its_own_socle() {
        let c = linear_yzx_full();
        let x = c.quiver().vertex("x").unwrap();
        let s = PathComodule::simple(c.clone(), x).unwrap();
        assert_eq!(s.dim(), 1);
        let series = s.socle_series();
        assert_eq!(series.len(), 1);
        assert_eq!(series.layer(1).get(&x), Some(&1));
    }

    #[test]
    fn sum_of_simples_has_one_layer() {
        let c = linear_yzx_full();
        let x = c.quiver().vertex("x").unwrap();
        let y = c.quiver().vertex("y").unwrap();
        let s = PathComodule::direct_sum(vec![
            PathComodule::simple(c.clone(), x).unwrap(),
            PathComodule::simple(c.clone(), y).unwrap(),
        ])
        .unwrap();
        let series = s.socle_series();
        assert_eq!(series.len(), 1);
        assert_eq!(series.layer(1).len(), 2);
    }

    #[test]
    fn injective_loewy_series_over_full_linear_quiver() {
        let c = linear_yzx_full();
        let x = c.quiver().vertex("x").unwrap();
        let e = PathComodule::injective(c.clone(), x, Cap::Unbounded).unwrap();
        assert_eq!(e.dim(), 3);
        let series = e.socle_series();
        assert_eq!(series.len(), 3);
        assert_eq!(layer_names(&c, &series.layer(1)), vec![("x".into(), 1)]);
        assert_eq!(layer_names(&c, &series.layer(2)), vec![("z".into(), 1)]);
        assert_eq!(layer_names(&c, &series.layer(3)), vec![("y".into(), 1)]);
    }

    #[test]
    fn quotient_by_socle_shifts_layers() {
        let c = linear_yzx_full();
        let x = c.quiver().vertex("x").unwrap();
        let e = PathComodule::injective(c.clone(), x, Cap::Unbounded).unwrap();
        let q1 = e.quotient_by_socle(1);
        assert_eq!(q1.dim(), 2);
        let series = q1.socle_series();
        assert_eq!(layer_names(&c, &series.layer(1)), vec![("z".into(), 1)]);
        assert_eq!(layer_names(&c, &series.layer(2)), vec![("y".into(), 1)]);

        assert_eq!(e.quotient_by_socle(0), e);
        assert!(e.quotient_by_socle(3).is_zero());
        assert!(e.quotient_by_socle(10).is_zero());
    }

    #[test]
    fn quotient_of_remark_injective_is_simple_at_z() {
        // The finite basis stops at single arrows, so E_x has two classes
        // and killing the socle leaves the class of the arrow into x,
        // whose source is z.
        let c = remark_coalgebra();
        let x = c.quiver().vertex("x").unwrap();
        let z = c.quiver().vertex("z").unwrap();
        let e = PathComodule::injective(c.clone(), x, Cap::Unbounded).unwrap();
        assert_eq!(e.dim(), 2);
        let q = e.quotient_by_socle(1);
        assert_eq!(q.dim(), 1);
        let series = q.socle_series();
        assert_eq!(series.len(), 1);
        assert_eq!(series.layer(1).get(&z), Some(&1));
    }

    #[test]
    fn kronecker_socle_multiplicity() {
        let mut q = Quiver::new();
        q.add_vertex("y").unwrap();
        q.add_vertex("x").unwrap();
        q.add_arrow("a", "y", "x").unwrap();
        q.add_arrow("b", "y", "x").unwrap();
        let c = Arc::new(PathCoalgebra::full(q));
        let x = c.quiver().vertex("x").unwrap();
        let y = c.quiver().vertex("y").unwrap();
        let e = PathComodule::injective(c.clone(), x, Cap::Unbounded).unwrap();
        let series = e.socle_series();
        assert_eq!(series.len(), 2);
        assert_eq!(series.layer(2).get(&y), Some(&2));

        // Hom(S_y, E_x/S_x) has dimension two.
        assert_eq!(e.quotient_by_socle(1).hom_dim_simple_into(y), 2);
        // Hom(S_y, E_x) = 0, Hom(S_x, E_x) = 1.
        assert_eq!(e.hom_dim_simple_into(y), 0);
        assert_eq!(e.hom_dim_simple_into(x), 1);
    }

    #[test]
    fn hom_dim_into_remark_quotient() {
        let c = remark_coalgebra();
        let x = c.quiver().vertex("x").unwrap();
        let z = c.quiver().vertex("z").unwrap();
        let y = c.quiver().vertex("y").unwrap();
        let e = PathComodule::injective(c.clone(), x, Cap::Unbounded).unwrap();
        let q = e.quotient_by_socle(1);
        assert_eq!(q.hom_dim_simple_into(z), 1);
        assert_eq!(q.hom_dim_simple_into(y), 0);
    }

    #[test]
    fn direct_sum_rejects_mixed_coalgebras() {
        let c1 = linear_yzx_full();
        let c2 = remark_coalgebra();
        let x1 = c1.quiver().vertex("x").unwrap();
        let x2 = c2.quiver().vertex("x").unwrap();
        let s1 = PathComodule::simple(c1, x1).unwrap();
        let s2 = PathComodule::simple(c2, x2).unwrap();
        assert!(matches!(
            PathComodule::direct_sum(vec![s1, s2]),
            Err(Error::MixedCoalgebras)
        ));
    }

    #[test]
    fn constructor_rejects_non_terminal_closed_sets() {
        let c = linear_yzx_full();
        let q = c.quiver();
        let x = q.vertex("x").unwrap();
        let b = q.arrow("b").unwrap();
        let pb = Path::from_arrows(q, vec![b]).unwrap();
        let mut present = BTreeSet::new();
        present.insert(pb);
        // Missing the trivial path at x.
        let comp = Component {
            anchor: x,
            present,
            killed: BTreeSet::new(),
        };
        assert!(matches!(
            PathComodule::new(c.clone(), vec![comp]),
            Err(Error::InvalidComodule(_))
        ));
    }

    #[test]
    fn zero_comodule_is_legal_everywhere() {
        let c = linear_yzx_full();
        let z = PathComodule::zero(c);
        assert!(z.is_zero());
        assert!(z.socle_series().is_empty());
        assert!(z.quotient_by_socle(3).is_zero());
    }
}

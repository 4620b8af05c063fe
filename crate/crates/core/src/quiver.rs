//! Finite directed multigraphs (quivers) and paths in them.
//!
//! Everything downstream is built on this module: coalgebras are spanned by
//! paths, comodules by path sets, the Ext-quiver by collapsed arrows. Paths
//! compose left-to-right: in `p = a1 a2 ... an` the target of `ai` is the
//! source of `a(i+1)`, `source(p) = source(a1)` and `target(p) = target(an)`.

use crate::error::{Error, Result};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

/// Index of a vertex inside its owning quiver (insertion order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

/// Index of an arrow inside its owning quiver (insertion order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
struct ArrowRec {
    name: String,
    source: VertexId,
    target: VertexId,
}

/// A finite quiver: ordered vertex and arrow sets. Loops and parallel
/// arrows are permitted. Iteration order is insertion order everywhere.
#[derive(Debug, Clone, Default)]
pub struct Quiver {
    vertex_names: Vec<String>,
    vertex_index: HashMap<String, VertexId>,
    arrows: Vec<ArrowRec>,
    arrow_index: HashMap<String, ArrowId>,
}

impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_names == other.vertex_names && self.arrows == other.arrows
    }
}
impl Eq for Quiver {}

/// Vertex fill used by DOT export. Torsion vertices render black.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fill {
    White,
    Black,
}

impl Quiver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: &str) -> Result<VertexId> {
        if self.vertex_index.contains_key(name) {
            return Err(Error::DuplicateId(name.to_string()));
        }
        let id = VertexId(self.vertex_names.len() as u32);
        self.vertex_names.push(name.to_string());
        self.vertex_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_arrow(&mut self, name: &str, source: &str, target: &str) -> Result<ArrowId> {
        if self.arrow_index.contains_key(name) || self.vertex_index.contains_key(name) {
            return Err(Error::DuplicateId(name.to_string()));
        }
        let source = self.vertex(source)?;
        let target = self.vertex(target)?;
        let id = ArrowId(self.arrows.len() as u32);
        self.arrows.push(ArrowRec {
            name: name.to_string(),
            source,
            target,
        });
        self.arrow_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn arrow(&self, name: &str) -> Result<ArrowId> {
        self.arrow_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownArrow(name.to_string()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0 as usize]
    }

    pub fn arrow_name(&self, a: ArrowId) -> &str {
        &self.arrows[a.0 as usize].name
    }

    pub fn source(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0 as usize].source
    }

    pub fn target(&self, a: ArrowId) -> VertexId {
        self.arrows[a.0 as usize].target
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len() as u32).map(ArrowId)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        (v.0 as usize) < self.vertex_names.len()
    }

    pub fn arrows_into(&self, v: VertexId) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrow_ids().filter(move |&a| self.target(a) == v)
    }

    pub fn arrows_from(&self, v: VertexId) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrow_ids().filter(move |&a| self.source(a) == v)
    }

    /// The quiver with every arrow reversed. Vertex and arrow names and
    /// insertion order are preserved.
    pub fn opposite(&self) -> Quiver {
        let mut q = Quiver::new();
        for name in &self.vertex_names {
            q.add_vertex(name).expect("names were unique");
        }
        for rec in &self.arrows {
            q.add_arrow(
                &rec.name,
                &self.vertex_names[rec.target.0 as usize],
                &self.vertex_names[rec.source.0 as usize],
            )
            .expect("names were unique");
        }
        q
    }

    /// True iff the quiver has no directed cycle. Loops count as cycles.
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm; leftovers mean a cycle.
        let n = self.vertex_count();
        let mut indeg = vec![0usize; n];
        for a in self.arrow_ids() {
            indeg[self.target(a).0 as usize] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0usize;
        while let Some(i) = queue.pop_front() {
            seen += 1;
            for a in self.arrows_from(VertexId(i as u32)) {
                let t = self.target(a).0 as usize;
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    queue.push_back(t);
                }
            }
        }
        seen == n
    }

    /// Finds a directed cycle visiting only vertices satisfying `allowed`,
    /// returned as its arrow sequence, or `None` if that subquiver is acyclic.
    pub fn find_cycle_within(&self, allowed: impl Fn(VertexId) -> bool) -> Option<Vec<ArrowId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }

        fn dfs(
            q: &Quiver,
            v: VertexId,
            allowed: &impl Fn(VertexId) -> bool,
            mark: &mut [Mark],
            stack_arrows: &mut Vec<ArrowId>,
            stack_vertices: &mut Vec<VertexId>,
        ) -> Option<Vec<ArrowId>> {
            mark[v.0 as usize] = Mark::Active;
            stack_vertices.push(v);
            for a in q.arrows_from(v) {
                let t = q.target(a);
                if !allowed(t) {
                    continue;
                }
                match mark[t.0 as usize] {
                    Mark::Active => {
                        let pos = stack_vertices.iter().position(|&w| w == t).unwrap();
                        let mut cyc = stack_arrows[pos..].to_vec();
                        cyc.push(a);
                        return Some(cyc);
                    }
                    Mark::New => {
                        stack_arrows.push(a);
                        if let Some(c) = dfs(q, t, allowed, mark, stack_arrows, stack_vertices) {
                            return Some(c);
                        }
                        stack_arrows.pop();
                    }
                    Mark::Done => {}
                }
            }
            stack_vertices.pop();
            mark[v.0 as usize] = Mark::Done;
            None
        }

        let mut mark = vec![Mark::New; self.vertex_count()];
        let mut stack_arrows: Vec<ArrowId> = Vec::new();
        let mut stack_vertices: Vec<VertexId> = Vec::new();
        for v in self.vertices() {
            if allowed(v) && mark[v.0 as usize] == Mark::New {
                if let Some(c) = dfs(
                    self,
                    v,
                    &allowed,
                    &mut mark,
                    &mut stack_arrows,
                    &mut stack_vertices,
                ) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Vertices reachable from `starts` by directed walks whose every
    /// vertex strictly after the start satisfies `through`. Start vertices
    /// are included only if re-entered through such a walk.
    pub fn reachable_through(
        &self,
        starts: impl IntoIterator<Item = VertexId>,
        through: impl Fn(VertexId) -> bool,
    ) -> Vec<VertexId> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<VertexId> = VecDeque::new();
        for s in starts {
            for a in self.arrows_from(s) {
                let t = self.target(a);
                if through(t) && !seen[t.0 as usize] {
                    seen[t.0 as usize] = true;
                    queue.push_back(t);
                }
            }
        }
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            out.push(v);
            for a in self.arrows_from(v) {
                let t = self.target(a);
                if through(t) && !seen[t.0 as usize] {
                    seen[t.0 as usize] = true;
                    queue.push_back(t);
                }
            }
        }
        out.sort();
        out
    }

    /// Mirror of [`reachable_through`](Self::reachable_through): vertices
    /// `w` admitting a directed walk into some start vertex whose every
    /// vertex strictly before the endpoint (including `w`) satisfies
    /// `through`.
    pub fn reachable_through_rev(
        &self,
        starts: impl IntoIterator<Item = VertexId>,
        through: impl Fn(VertexId) -> bool,
    ) -> Vec<VertexId> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue: VecDeque<VertexId> = VecDeque::new();
        for s in starts {
            for a in self.arrows_into(s) {
                let v = self.source(a);
                if through(v) && !seen[v.0 as usize] {
                    seen[v.0 as usize] = true;
                    queue.push_back(v);
                }
            }
        }
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            out.push(v);
            for a in self.arrows_into(v) {
                let w = self.source(a);
                if through(w) && !seen[w.0 as usize] {
                    seen[w.0 as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        out.sort();
        out
    }

    /// All paths of length <= `max_len` ending at `target`, each exactly
    /// once, sorted by (length, lexicographic arrow-name sequence).
    pub fn enumerate_paths(&self, target: VertexId, max_len: usize) -> Result<Vec<Path>> {
        if !self.contains_vertex(target) {
            return Err(Error::UnknownVertex(format!("#{}", target.0)));
        }
        let mut out = vec![Path::trivial(target)];
        let mut frontier = vec![Path::trivial(target)];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &frontier {
                for a in self.arrows_into(p.source()) {
                    next.push(p.prepend(self, a));
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
            out.extend(frontier.iter().cloned());
        }
        self.sort_paths(&mut out);
        Ok(out)
    }

    /// Sorts paths by (length, lexicographic arrow-name sequence).
    pub fn sort_paths(&self, paths: &mut [Path]) {
        paths.sort_by(|p, q| {
            p.len().cmp(&q.len()).then_with(|| {
                let pn: Vec<&str> = p.arrows.iter().map(|&a| self.arrow_name(a)).collect();
                let qn: Vec<&str> = q.arrows.iter().map(|&a| self.arrow_name(a)).collect();
                pn.cmp(&qn)
                    .then_with(|| self.vertex_name(p.source()).cmp(self.vertex_name(q.source())))
            })
        });
    }

    /// Renders a path as its arrow names joined by `*`, or the base vertex
    /// name for a trivial path.
    pub fn path_string(&self, p: &Path) -> String {
        if p.is_trivial() {
            self.vertex_name(p.source()).to_string()
        } else {
            p.arrows
                .iter()
                .map(|&a| self.arrow_name(a))
                .collect::<Vec<_>>()
                .join("*")
        }
    }

    /// Deterministic DOT text for the quiver. `fills` must cover every
    /// vertex; black marks torsion vertices in the pictures downstream.
    pub fn export_dot(&self, fills: &BTreeMap<VertexId, Fill>) -> Result<String> {
        let mut s = String::from("digraph quiver {\n  rankdir=LR;\n");
        for v in self.vertices() {
            let fill = fills
                .get(&v)
                .ok_or_else(|| Error::MissingFill(self.vertex_name(v).to_string()))?;
            let (color, font) = match fill {
                Fill::White => ("white", "black"),
                Fill::Black => ("black", "white"),
            };
            s.push_str(&format!(
                "  \"{}\" [shape=circle, style=filled, fillcolor={}, fontcolor={}];\n",
                self.vertex_name(v),
                color,
                font
            ));
        }
        for a in self.arrow_ids() {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.vertex_name(self.source(a)),
                self.vertex_name(self.target(a)),
                self.arrow_name(a)
            ));
        }
        s.push_str("}\n");
        Ok(s)
    }
}

/// A directed path. `base` is the source vertex; trivial paths have no
/// arrows. Composability of consecutive arrows is enforced by the
/// constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    base: VertexId,
    arrows: Vec<ArrowId>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Self {
        Path {
            base: v,
            arrows: Vec::new(),
        }
    }

    pub fn from_arrows(q: &Quiver, arrows: Vec<ArrowId>) -> Result<Self> {
        if arrows.is_empty() {
            return Err(Error::NotComposable(0));
        }
        for i in 1..arrows.len() {
            if q.target(arrows[i - 1]) != q.source(arrows[i]) {
                return Err(Error::NotComposable(i));
            }
        }
        Ok(Path {
            base: q.source(arrows[0]),
            arrows,
        })
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn source(&self) -> VertexId {
        self.base
    }

    pub fn target_in(&self, q: &Quiver) -> VertexId {
        match self.arrows.last() {
            Some(&a) => q.target(a),
            None => self.base,
        }
    }

    pub fn arrows(&self) -> &[ArrowId] {
        &self.arrows
    }

    /// New path `a . self` (arrow first, then this path).
    pub fn prepend(&self, q: &Quiver, a: ArrowId) -> Path {
        debug_assert_eq!(q.target(a), self.source());
        let mut arrows = Vec::with_capacity(self.arrows.len() + 1);
        arrows.push(a);
        arrows.extend_from_slice(&self.arrows);
        Path {
            base: q.source(a),
            arrows,
        }
    }

    /// New path `self . a`.
    pub fn append(&self, q: &Quiver, a: ArrowId) -> Path {
        debug_assert_eq!(self.target_in(q), q.source(a));
        let mut arrows = self.arrows.clone();
        arrows.push(a);
        Path {
            base: self.base,
            arrows,
        }
    }

    /// Left-to-right composition `self . rhs`.
    pub fn compose(&self, q: &Quiver, rhs: &Path) -> Result<Path> {
        if self.target_in(q) != rhs.source() {
            return Err(Error::NotComposable(self.len()));
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&rhs.arrows);
        Ok(Path {
            base: self.base,
            arrows,
        })
    }

    /// Terminal subpath consisting of the last `k` arrows.
    pub fn suffix(&self, q: &Quiver, k: usize) -> Path {
        debug_assert!(k <= self.len());
        let start = self.len() - k;
        if k == 0 {
            return Path::trivial(self.target_in(q));
        }
        Path {
            base: q.source(self.arrows[start]),
            arrows: self.arrows[start..].to_vec(),
        }
    }

    /// Initial subpath consisting of the first `k` arrows.
    pub fn prefix(&self, q: &Quiver, k: usize) -> Path {
        debug_assert!(k <= self.len());
        if k == 0 {
            return Path::trivial(self.base);
        }
        let _ = q;
        Path {
            base: self.base,
            arrows: self.arrows[..k].to_vec(),
        }
    }

    /// The contiguous subpath spanning arrows `i..j` (trivial at the
    /// appropriate vertex when `i == j`).
    pub fn subpath(&self, q: &Quiver, i: usize, j: usize) -> Path {
        debug_assert!(i <= j && j <= self.len());
        if i == j {
            let v = if i == 0 {
                self.base
            } else {
                q.target(self.arrows[i - 1])
            };
            return Path::trivial(v);
        }
        Path {
            base: q.source(self.arrows[i]),
            arrows: self.arrows[i..j].to_vec(),
        }
    }

    /// All factorizations `self = prefix . suffix`, including the two
    /// trivial ones, as `(prefix, suffix)` pairs.
    pub fn factorizations(&self, q: &Quiver) -> Vec<(Path, Path)> {
        (0..=self.len())
            .map(|k| (self.prefix(q, k), self.suffix(q, self.len() - k)))
            .collect()
    }

    /// The vertex sequence visited by the path, length `len() + 1`.
    pub fn visited(&self, q: &Quiver) -> Vec<VertexId> {
        let mut vs = Vec::with_capacity(self.len() + 1);
        vs.push(self.base);
        for &a in &self.arrows {
            vs.push(q.target(a));
        }
        vs
    }

    /// True when every contiguous arrow pair composes in `q` and the base
    /// matches the first arrow.
    pub fn is_composable_in(&self, q: &Quiver) -> bool {
        if let Some(&first) = self.arrows.first() {
            if q.source(first) != self.base {
                return false;
            }
        }
        self.arrows
            .windows(2)
            .all(|w| q.target(w[0]) == q.source(w[1]))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            write!(f, "e({})", self.base.0)
        } else {
            let ids: Vec<String> = self.arrows.iter().map(|a| a.0.to_string()).collect();
            write!(f, "[{}]", ids.join("*"))
        }
    }
}

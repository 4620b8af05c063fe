//! Brute-force verification over exact rationals.
//!
//! A [`LinearComodule`] stores an explicit coaction: for every basis
//! element, a finite formal sum of (basis index, coalgebra path) pairs
//! with rational coefficients. The counit and coassociativity laws are
//! checked exactly at construction, so any structural mistake elsewhere
//! in the crate surfaces as a hard error here. Morphism spaces, socles,
//! Ext dimensions, cotensor sections and the colocalizing functor on
//! finite-dimensional comodules are all computed by plain Gaussian
//! elimination, giving an independent route against which the
//! combinatorial shortcuts are tested.

pub mod linalg;

use crate::coalgebra::{BasisSpec, Cap, PathCoalgebra};
use crate::comodule::{PathComodule, VertexMultiset};
use crate::error::{Error, Result};
use crate::localization::LocalizationContext;
use crate::quiver::{Path, VertexId};
use linalg::{coordinates_in, independent_rows, rat, Matrix, Rat};
use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// A comodule given by an explicit coaction matrix over exact rationals.
#[derive(Debug, Clone)]
pub struct LinearComodule {
    coalgebra: Arc<PathCoalgebra>,
    labels: Vec<String>,
    /// coaction[i] = sum of (comodule index, coalgebra path, coefficient).
    coaction: Vec<Vec<(usize, Path, Rat)>>,
}

impl LinearComodule {
    /// Validating constructor: every referenced path must lie in the
    /// coalgebra basis and the counit and coassociativity laws must hold
    /// exactly.
    pub fn new(
        coalgebra: Arc<PathCoalgebra>,
        labels: Vec<String>,
        coaction: Vec<Vec<(usize, Path, Rat)>>,
    ) -> Result<Self> {
        assert_eq!(labels.len(), coaction.len());
        let m = LinearComodule {
            coalgebra,
            labels,
            coaction,
        };
        m.check_laws()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.coaction.len()
    }

    pub fn coalgebra(&self) -> &Arc<PathCoalgebra> {
        &self.coalgebra
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn coaction_of(&self, i: usize) -> &[(usize, Path, Rat)] {
        &self.coaction[i]
    }

    fn check_laws(&self) -> Result<()> {
        let q = self.coalgebra.quiver();
        let n = self.dim();
        for terms in &self.coaction {
            for (j, p, _) in terms {
                if *j >= n {
                    return Err(Error::Internal("coaction index out of range".into()));
                }
                if !self.coalgebra.contains_path(p) {
                    return Err(Error::Internal(format!(
                        "coaction path {} is not in the coalgebra basis",
                        q.path_string(p)
                    )));
                }
            }
        }

        // Counit: (id x eps) after the coaction is the identity.
        for (i, terms) in self.coaction.iter().enumerate() {
            let mut v = vec![Rat::zero(); n];
            for (j, p, c) in terms {
                if p.is_trivial() {
                    v[*j] += c;
                }
            }
            for (j, val) in v.iter().enumerate() {
                let expect = if j == i { rat(1) } else { Rat::zero() };
                if *val != expect {
                    return Err(Error::Internal(format!(
                        "counit law fails on basis element {}",
                        self.labels[i]
                    )));
                }
            }
        }

        // Coassociativity: (rho x id) rho = (id x delta) rho.
        for (i, terms) in self.coaction.iter().enumerate() {
            let mut lhs: BTreeMap<(usize, Path, Path), Rat> = BTreeMap::new();
            for (j, p, c) in terms {
                for (k, s, d) in &self.coaction[*j] {
                    let e = lhs.entry((*k, s.clone(), p.clone())).or_insert_with(Rat::zero);
                    *e += c * d;
                }
            }
            let mut rhs: BTreeMap<(usize, Path, Path), Rat> = BTreeMap::new();
            for (j, p, c) in terms {
                for (r, s) in p.factorizations(q) {
                    let e = rhs.entry((*j, s, r)).or_insert_with(Rat::zero);
                    *e += c;
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "coassociativity fails on basis element {}",
                    self.labels[i]
                )));
            }
        }
        Ok(())
    }
}

/// A basis of the space of comodule morphisms between two linear
/// comodules, as matrices (codomain dim x domain dim).
#[derive(Debug, Clone)]
pub struct MorphismSpace {
    pub basis: Vec<Matrix>,
}

impl MorphismSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Realizes a path comodule as an explicit linear comodule: basis =
/// surviving classes, coaction from path factorizations with killed
/// classes projected out.
pub fn realize(m: &PathComodule) -> Result<LinearComodule> {
    let c = m.coalgebra().clone();
    let q = c.quiver();
    let mut labels = Vec::new();
    let mut index: HashMap<(usize, Path), usize> = HashMap::new();
    for (ci, comp) in m.components().iter().enumerate() {
        for p in comp.surviving() {
            index.insert((ci, p.clone()), labels.len());
            labels.push(format!("{}#{}", ci, q.path_string(p)));
        }
    }
    let mut coaction = vec![Vec::new(); labels.len()];
    for (ci, comp) in m.components().iter().enumerate() {
        for p in comp.surviving() {
            let i = index[&(ci, p.clone())];
            let mut terms = Vec::new();
            for (r, s) in p.factorizations(q) {
                if let Some(&j) = index.get(&(ci, s.clone())) {
                    terms.push((j, r, rat(1)));
                }
            }
            coaction[i] = terms;
        }
    }
    LinearComodule::new(c, labels, coaction)
}

fn require_same_coalgebra(m: &LinearComodule, n: &LinearComodule) -> Result<()> {
    if *m.coalgebra() != *n.coalgebra() {
        return Err(Error::MixedCoalgebras);
    }
    Ok(())
}

/// Solves the comodule-morphism equation `rho_N f = (f x id) rho_M`
/// exactly; the result is a basis of Hom(M, N).
pub fn hom_space(m: &LinearComodule, n: &LinearComodule) -> Result<MorphismSpace> {
    require_same_coalgebra(m, n)?;
    let md = m.dim();
    let nd = n.dim();
    if md == 0 || nd == 0 {
        return Ok(MorphismSpace { basis: Vec::new() });
    }
    let unknowns = md * nd; // F[k][j] at index k * md + j
    let mut rows: BTreeMap<(usize, usize, Path), Vec<Rat>> = BTreeMap::new();
    for j in 0..md {
        // Left side: coefficient of (n_l x c) in rho_N(f(m_j)).
        for k in 0..nd {
            for (l, c, a) in n.coaction_of(k) {
                let row = rows
                    .entry((j, *l, c.clone()))
                    .or_insert_with(|| vec![Rat::zero(); unknowns]);
                row[k * md + j] += a;
            }
        }
        // Right side: coefficient of (n_l x c) in (f x id) rho_M(m_j).
        for (i, c, b) in m.coaction_of(j) {
            for l in 0..nd {
                let row = rows
                    .entry((j, l, c.clone()))
                    .or_insert_with(|| vec![Rat::zero(); unknowns]);
                row[l * md + i] -= b;
            }
        }
    }
    let system = Matrix::from_rows(rows.into_values().collect());
    let basis = system
        .kernel_basis()
        .into_iter()
        .map(|x| {
            let mut f = Matrix::zeros(nd, md);
            for k in 0..nd {
                for j in 0..md {
                    f.set(k, j, x[k * md + j].clone());
                }
            }
            f
        })
        .collect();
    Ok(MorphismSpace { basis })
}

/// The subspace `{ v : rho(v) in M x C0 }` with `C0` spanned by the
/// trivial paths, as coordinate vectors.
pub fn socle_vectors(m: &LinearComodule) -> Vec<Vec<Rat>> {
    let dim = m.dim();
    if dim == 0 {
        return Vec::new();
    }
    let mut rows: BTreeMap<(usize, Path), Vec<Rat>> = BTreeMap::new();
    for i in 0..dim {
        for (j, p, c) in m.coaction_of(i) {
            if p.len() >= 1 {
                let row = rows
                    .entry((*j, p.clone()))
                    .or_insert_with(|| vec![Rat::zero(); dim]);
                row[i] += c;
            }
        }
    }
    if rows.is_empty() {
        // No nontrivial coalgebra part anywhere: the comodule is
        // semisimple and equals its own socle.
        return (0..dim).map(|i| unit_vector(dim, i)).collect();
    }
    Matrix::from_rows(rows.into_values().collect()).kernel_basis()
}

/// Solutions of `rho(v) = v x e_w`: the `w`-isotypic part of the socle.
pub fn socle_at_vertex(m: &LinearComodule, w: VertexId) -> Vec<Vec<Rat>> {
    let dim = m.dim();
    if dim == 0 {
        return Vec::new();
    }
    let ew = Path::trivial(w);
    let mut rows: BTreeMap<(usize, Path), Vec<Rat>> = BTreeMap::new();
    for j in 0..dim {
        rows.insert((j, ew.clone()), {
            let mut v = vec![Rat::zero(); dim];
            v[j] = -rat(1);
            v
        });
    }
    for i in 0..dim {
        for (j, p, c) in m.coaction_of(i) {
            let row = rows
                .entry((*j, p.clone()))
                .or_insert_with(|| vec![Rat::zero(); dim]);
            row[i] += c;
        }
    }
    Matrix::from_rows(rows.into_values().collect()).kernel_basis()
}

/// Quotient of `m` by the subcomodule spanned by `sub` (coordinate
/// rows), with the induced coaction.
pub fn quotient_comodule(m: &LinearComodule, sub: &[Vec<Rat>]) -> Result<LinearComodule> {
    let dim = m.dim();
    if sub.is_empty() {
        return Ok(m.clone());
    }
    let mut w = Matrix::from_rows(sub.to_vec());
    let pivots = w.rref();
    let pivot_rows: Vec<(usize, usize)> = pivots.iter().copied().enumerate().collect();
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; dim];
        for &(_, c) in &pivot_rows {
            v[c] = true;
        }
        v
    };
    let free: Vec<usize> = (0..dim).filter(|&i| !is_pivot[i]).collect();
    let free_index: HashMap<usize, usize> =
        free.iter().enumerate().map(|(a, &b)| (b, a)).collect();

    // reduce(v): subtract pivot-row multiples so pivot coordinates vanish.
    let reduce = |v: &[Rat]| -> Vec<Rat> {
        let mut out = v.to_vec();
        for &(r, c) in &pivot_rows {
            if !out[c].is_zero() {
                let f = out[c].clone();
                for j in 0..dim {
                    let nv = &out[j] - &f * w.get(r, j);
                    out[j] = nv;
                }
            }
        }
        out
    };

    let mut coaction = Vec::with_capacity(free.len());
    let labels: Vec<String> = free.iter().map(|&f| format!("[{}]", m.label(f))).collect();
    for &f in &free {
        let mut acc: BTreeMap<(usize, Path), Rat> = BTreeMap::new();
        for (j, p, c) in m.coaction_of(f) {
            let red = reduce(&unit_vector(dim, *j));
            for (&fi, &qi) in free_index.iter() {
                let coeff = &red[fi] * c;
                if !coeff.is_zero() {
                    *acc.entry((qi, p.clone())).or_insert_with(Rat::zero) += coeff;
                }
            }
        }
        let terms: Vec<(usize, Path, Rat)> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((j, p), c)| (j, p, c))
            .collect();
        coaction.push(terms);
    }
    LinearComodule::new(m.coalgebra().clone(), labels, coaction)
}

fn unit_vector(dim: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); dim];
    v[i] = rat(1);
    v
}

/// Iterated socle computation. Layer `n` (1-based) is the vertex
/// multiset of simple summands of the n-th socle quotient.
pub fn loewy_series(m: &LinearComodule) -> Result<Vec<VertexMultiset>> {
    let mut layers = Vec::new();
    let mut current = m.clone();
    while current.dim() > 0 {
        let mut layer = VertexMultiset::new();
        let mut total = 0usize;
        for w in current.coalgebra().quiver().vertices() {
            let mult = socle_at_vertex(&current, w).len();
            if mult > 0 {
                layer.insert(w, mult);
                total += mult;
            }
        }
        let soc = independent_rows(socle_vectors(&current));
        if soc.len() != total || soc.is_empty() {
            return Err(Error::Internal(
                "socle does not decompose into simple isotypic parts".into(),
            ));
        }
        layers.push(layer);
        current = quotient_comodule(&current, &soc)?;
    }
    Ok(layers)
}

/// dim Ext^1(S_y, S_x) = dim Hom(S_y, E_x / S_x), computed at two caps
/// when the envelope is infinite and required to stabilize.
pub fn ext1_dim(c: &Arc<PathCoalgebra>, y: VertexId, x: VertexId) -> Result<usize> {
    let dim_at = |cap: Cap| -> Result<usize> {
        let e = PathComodule::injective(c.clone(), x, cap)?;
        let quot = realize(&e.quotient_by_socle(1))?;
        let sy = realize(&PathComodule::simple(c.clone(), y)?)?;
        Ok(hom_space(&sy, &quot)?.dim())
    };
    if c.injective_is_infinite(x) {
        let d3 = dim_at(Cap::Bounded(3))?;
        let d4 = dim_at(Cap::Bounded(4))?;
        if d3 != d4 {
            return Err(Error::Internal(
                "Ext dimension did not stabilize under the cap".into(),
            ));
        }
        Ok(d3)
    } else {
        dim_at(Cap::Unbounded)
    }
}

/// True iff some nonzero non-bijective morphism of injective envelopes
/// E_x -> E_y exists. Requires both envelopes finite dimensional.
pub fn rad_nonzero(c: &Arc<PathCoalgebra>, x: VertexId, y: VertexId) -> Result<bool> {
    let ex = realize(&PathComodule::injective(c.clone(), x, Cap::Unbounded)?)?;
    let ey = realize(&PathComodule::injective(c.clone(), y, Cap::Unbounded)?)?;
    let hom = hom_space(&ex, &ey)?;
    if x == y {
        Ok(hom.dim() > 1)
    } else {
        Ok(hom.dim() > 0)
    }
}

/// Comodule isomorphism test: equal dimensions and Loewy series, then a
/// seeded search for an invertible element of the morphism space.
pub fn is_isomorphic(m: &LinearComodule, n: &LinearComodule) -> Result<bool> {
    require_same_coalgebra(m, n)?;
    if m.dim() != n.dim() {
        return Ok(false);
    }
    if m.dim() == 0 {
        return Ok(true);
    }
    if loewy_series(m)? != loewy_series(n)? {
        return Ok(false);
    }
    let hom = hom_space(m, n)?;
    for f in &hom.basis {
        if f.is_invertible() {
            return Ok(true);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x70617468);
    for _ in 0..64 {
        let mut combo = Matrix::zeros(n.dim(), m.dim());
        for f in &hom.basis {
            let c = rat(rng.gen_range(-9i64..=9));
            combo.scaled_add(f, &c);
        }
        if combo.is_invertible() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The coalgebra itself as a right comodule: the direct sum of all
/// indecomposable injectives. Finite dimensional presentations only.
pub fn coalgebra_comodule(c: &Arc<PathCoalgebra>) -> Result<LinearComodule> {
    let parts: Result<Vec<PathComodule>> = c
        .quiver()
        .vertices()
        .map(|v| PathComodule::injective(c.clone(), v, Cap::Unbounded))
        .collect();
    realize(&PathComodule::direct_sum(parts?)?)
}

fn ec_finite_or_err(ctx: &LocalizationContext) -> Result<()> {
    if !ctx.coalgebra().is_full() {
        return Ok(());
    }
    let q = ctx.quiver();
    let reach: std::collections::BTreeSet<VertexId> = q
        .reachable_through(ctx.x_set().iter().copied(), |_| true)
        .into_iter()
        .collect();
    if let Some(cycle) = q.find_cycle_within(|v| reach.contains(&v)) {
        let cycle = cycle
            .iter()
            .map(|&a| q.arrow_name(a))
            .collect::<Vec<_>>()
            .join("*");
        return Err(Error::Capacity {
            what: "localized image of the coalgebra".into(),
            cycle,
        });
    }
    Ok(())
}

/// The image of the whole coalgebra under the quotient functor, as a
/// path comodule over the localized coalgebra.
pub fn ec_path_comodule(ctx: &LocalizationContext) -> Result<PathComodule> {
    ec_finite_or_err(ctx)?;
    let c = ctx.coalgebra().clone();
    let cap = if c.is_full() {
        // Paths sourced in X stay inside an acyclic region, so their
        // length is bounded by the vertex count.
        Cap::Bounded(c.quiver().vertex_count())
    } else {
        Cap::Unbounded
    };
    let parts: Result<Vec<PathComodule>> = c
        .quiver()
        .vertices()
        .map(|v| PathComodule::injective(c.clone(), v, cap))
        .collect();
    ctx.quotient_t(&PathComodule::direct_sum(parts?)?)
}

/// Same image realized as a linear comodule over the localized
/// coalgebra.
pub fn ec_comodule(ctx: &LocalizationContext) -> Result<LinearComodule> {
    realize(&ec_path_comodule(ctx)?)
}

/// The quotient functor on a linear comodule: image of the idempotent
/// projector with the induced coaction over the localized coalgebra.
pub fn t_linear(ctx: &LocalizationContext, m: &LinearComodule) -> Result<LinearComodule> {
    if *m.coalgebra() != *ctx.coalgebra() {
        return Err(Error::MixedCoalgebras);
    }
    let loc = ctx.localized()?;
    let dim = m.dim();

    // Projector: e . b_i keeps the terms whose coalgebra path is trivial
    // at an X-vertex.
    let mut proj = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for (j, p, c) in m.coaction_of(i) {
            if p.is_trivial() && ctx.is_torsion_free(p.source()) {
                let v = proj.get(*j, i) + c;
                proj.set(*j, i, v);
            }
        }
    }
    let image_rows: Vec<Vec<Rat>> = (0..dim)
        .map(|i| (0..dim).map(|r| proj.get(r, i).clone()).collect())
        .collect();
    let image = independent_rows(image_rows);
    if image.is_empty() {
        return LinearComodule::new(loc.coalgebra().clone(), Vec::new(), Vec::new());
    }

    let x_set = ctx.x_set();
    let q = ctx.quiver();
    let mut coaction = Vec::with_capacity(image.len());
    for w in &image {
        let mut acc: BTreeMap<Path, Vec<Rat>> = BTreeMap::new();
        for (i, wi) in w.iter().enumerate() {
            if wi.is_zero() {
                continue;
            }
            for (j, p, c) in m.coaction_of(i) {
                // e . p . e is the cell reading of p when both endpoints
                // lie in X, zero otherwise.
                if !x_set.contains(&p.source()) || !x_set.contains(&p.target_in(q)) {
                    continue;
                }
                let cell = loc.project_path(ctx.coalgebra(), p, x_set)?;
                let entry = acc
                    .entry(cell)
                    .or_insert_with(|| vec![Rat::zero(); dim]);
                // M-part: e . b_j = proj column j.
                for r in 0..dim {
                    let add = proj.get(r, *j) * c * wi;
                    if !add.is_zero() {
                        entry[r] += add;
                    }
                }
            }
        }
        let mut terms = Vec::new();
        for (cell, vec) in acc {
            let coords = coordinates_in(&image, &vec).ok_or_else(|| {
                Error::Internal("quotient image is not closed under the coaction".into())
            })?;
            for (s, coeff) in coords.into_iter().enumerate() {
                if !coeff.is_zero() {
                    terms.push((s, cell.clone(), coeff));
                }
            }
        }
        coaction.push(terms);
    }
    let labels = (0..image.len()).map(|i| format!("t{i}")).collect();
    LinearComodule::new(loc.coalgebra().clone(), labels, coaction)
}

/// `Ce` as path list: basis paths ending in `X`. Finite presentations
/// only; over the full basis a cycle that reaches `X` is a capacity
/// error.
fn ce_paths(ctx: &LocalizationContext) -> Result<Vec<Path>> {
    let c = ctx.coalgebra();
    let q = ctx.quiver();
    match c.basis() {
        BasisSpec::Finite(set) => Ok(set
            .iter()
            .filter(|p| ctx.x_set().contains(&p.target_in(q)))
            .cloned()
            .collect()),
        BasisSpec::Full => {
            let reach: std::collections::BTreeSet<VertexId> = q
                .reachable_through_rev(ctx.x_set().iter().copied(), |_| true)
                .into_iter()
                .collect();
            if let Some(cycle) = q.find_cycle_within(|v| reach.contains(&v)) {
                let cycle = cycle
                    .iter()
                    .map(|&a| q.arrow_name(a))
                    .collect::<Vec<_>>()
                    .join("*");
                return Err(Error::Capacity {
                    what: "coalgebra image under the right idempotent action".into(),
                    cycle,
                });
            }
            let mut out: Vec<Path> = Vec::new();
            for &x in ctx.x_set() {
                out.push(Path::trivial(x));
                let mut stack: Vec<Path> = q
                    .arrows_into(x)
                    .map(|a| Path::from_arrows(q, vec![a]).expect("arrow is a path"))
                    .collect();
                while let Some(p) = stack.pop() {
                    out.push(p.clone());
                    for a in q.arrows_into(p.source()) {
                        stack.push(p.prepend(q, a));
                    }
                }
            }
            out.sort();
            out.dedup();
            Ok(out)
        }
    }
}

/// The cotensor of an eCe-comodule with `Ce`: the kernel of the standard
/// pair of maps `N x Ce` to `N x eCe x Ce`, with its induced right
/// coaction over the base coalgebra. This is the section functor on
/// arbitrary finite-dimensional localized comodules.
pub fn cotensor_section(
    ctx: &LocalizationContext,
    n: &LinearComodule,
) -> Result<LinearComodule> {
    let loc = ctx.localized()?;
    if *n.coalgebra() != *loc.coalgebra() {
        return Err(Error::MixedCoalgebras);
    }
    let paths = ce_paths(ctx)?;
    let q = ctx.quiver();
    let x_set = ctx.x_set();
    let nd = n.dim();
    let ce = paths.len();
    let tensor_dim = nd * ce;
    let tix = |i: usize, pi: usize| i * ce + pi;
    let path_index: HashMap<Path, usize> =
        paths.iter().cloned().enumerate().map(|(a, b)| (b, a)).collect();

    // Codomain coordinates: (n index, cell path, Ce index).
    let mut rows: BTreeMap<(usize, Path, usize), Vec<Rat>> = BTreeMap::new();
    for i in 0..nd {
        for (pi, p) in paths.iter().enumerate() {
            let col = tix(i, pi);
            // rho_N x id.
            for (j, u, c) in n.coaction_of(i) {
                let row = rows
                    .entry((*j, u.clone(), pi))
                    .or_insert_with(|| vec![Rat::zero(); tensor_dim]);
                row[col] += c;
            }
            // id x lambda_e: factorizations p = r . s with source(s) in X.
            for (r, s) in p.factorizations(q) {
                if !x_set.contains(&s.source()) {
                    continue;
                }
                let cell = loc.project_path(ctx.coalgebra(), &s, x_set)?;
                let ri = *path_index
                    .get(&r)
                    .ok_or_else(|| Error::Internal("factor outside Ce".into()))?;
                let row = rows
                    .entry((i, cell, ri))
                    .or_insert_with(|| vec![Rat::zero(); tensor_dim]);
                row[col] -= rat(1);
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..tensor_dim).map(|i| unit_vector(tensor_dim, i)).collect()
    } else {
        Matrix::from_rows(rows.into_values().collect()).kernel_basis()
    };
    let kernel = independent_rows(kernel);

    // Induced right coaction: id_N x delta on the Ce leg.
    let mut coaction = Vec::with_capacity(kernel.len());
    for v in &kernel {
        let mut acc: BTreeMap<Path, Vec<Rat>> = BTreeMap::new();
        for (idx, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let i = idx / ce;
            let p = &paths[idx % ce];
            for (r, s) in p.factorizations(q) {
                // s stays in Ce (it ends where p ends), r is the C-part.
                let si = *path_index
                    .get(&s)
                    .ok_or_else(|| Error::Internal("suffix outside Ce".into()))?;
                let entry = acc
                    .entry(r)
                    .or_insert_with(|| vec![Rat::zero(); tensor_dim]);
                entry[tix(i, si)] += coeff;
            }
        }
        let mut terms = Vec::new();
        for (r, vec) in acc {
            let coords = coordinates_in(&kernel, &vec).ok_or_else(|| {
                Error::Internal("cotensor kernel is not closed under the coaction".into())
            })?;
            for (s, coeff) in coords.into_iter().enumerate() {
                if !coeff.is_zero() {
                    terms.push((s, r.clone(), coeff));
                }
            }
        }
        coaction.push(terms);
    }
    let labels = (0..kernel.len()).map(|i| format!("s{i}")).collect();
    LinearComodule::new(ctx.coalgebra().clone(), labels, coaction)
}

/// The colocalizing functor on a finite-dimensional localized comodule:
/// the dual of the morphism space into the localized coalgebra image,
/// with its induced coaction over the base coalgebra. The round trip
/// through the quotient functor is verified before returning.
pub fn h_finite(ctx: &LocalizationContext, n: &LinearComodule) -> Result<LinearComodule> {
    let status = ctx.colocalizing_exists();
    if let Some(cycle) = status.witness {
        let cycle = cycle
            .iter()
            .map(|&a| ctx.quiver().arrow_name(a))
            .collect::<Vec<_>>()
            .join("*");
        return Err(Error::UnsupportedContext { cycle });
    }
    ec_finite_or_err(ctx)?;
    let loc = ctx.localized()?;
    if *n.coalgebra() != *loc.coalgebra() {
        return Err(Error::MixedCoalgebras);
    }

    // eC as an explicit bicomodule: basis paths sourced in X, right
    // coaction over the localized coalgebra.
    let c = ctx.coalgebra();
    let q = ctx.quiver();
    let x_set = ctx.x_set();
    let ec_paths: Vec<Path> = {
        let mut out: Vec<Path> = Vec::new();
        match c.basis() {
            BasisSpec::Finite(set) => {
                out.extend(set.iter().filter(|p| x_set.contains(&p.source())).cloned());
            }
            BasisSpec::Full => {
                for &x in x_set {
                    out.push(Path::trivial(x));
                    let mut stack: Vec<Path> = q
                        .arrows_from(x)
                        .map(|a| Path::from_arrows(q, vec![a]).expect("arrow is a path"))
                        .collect();
                    while let Some(p) = stack.pop() {
                        out.push(p.clone());
                        for a in q.arrows_from(p.target_in(q)) {
                            stack.push(p.append(q, a));
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    };
    let ec_index: HashMap<Path, usize> = ec_paths
        .iter()
        .cloned()
        .enumerate()
        .map(|(a, b)| (b, a))
        .collect();
    let mut ec_coaction = Vec::with_capacity(ec_paths.len());
    for p in &ec_paths {
        let mut terms = Vec::new();
        for (r, s) in p.factorizations(q) {
            if !x_set.contains(&s.source()) {
                continue;
            }
            // r runs from an X-vertex to an X-vertex.
            let cell = loc.project_path(c, &r, x_set)?;
            terms.push((ec_index[&s], cell, rat(1)));
        }
        ec_coaction.push(terms);
    }
    let ec = LinearComodule::new(
        loc.coalgebra().clone(),
        ec_paths.iter().map(|p| q.path_string(p)).collect(),
        ec_coaction,
    )?;

    let hom = hom_space(n, &ec)?;
    let k = hom.dim();
    let flat: Vec<Vec<Rat>> = hom
        .basis
        .iter()
        .map(|f| {
            let mut v = Vec::with_capacity(ec.dim() * n.dim());
            for r in 0..f.rows() {
                v.extend(f.row(r).iter().cloned());
            }
            v
        })
        .collect();

    // Left coaction on the morphism space: apply the coalgebra-side
    // coproduct after each basis morphism and express the path
    // coefficients back in the morphism basis.
    // lambda(f_j) = sum_i c_{ij} x f_i with c_{ij} a path combination.
    let mut cmat: Vec<Vec<Vec<(Path, Rat)>>> = vec![vec![Vec::new(); k]; k];
    for (j, f) in hom.basis.iter().enumerate() {
        // For each C-path s: matrix M_s with M_s[r_ec][t] accumulating
        // the lambda_eC expansion of f(n_t).
        let mut per_path: BTreeMap<Path, Matrix> = BTreeMap::new();
        for t in 0..n.dim() {
            for pe in 0..ec.dim() {
                let coeff = f.get(pe, t);
                if coeff.is_zero() {
                    continue;
                }
                let p = &ec_paths[pe];
                for (r, s) in p.factorizations(q) {
                    // M-part r stays in eC (same source), C-part s.
                    let ri = ec_index[&r];
                    let entry = per_path
                        .entry(s)
                        .or_insert_with(|| Matrix::zeros(ec.dim(), n.dim()));
                    let v = entry.get(ri, t) + coeff;
                    entry.set(ri, t, v);
                }
            }
        }
        for (s, mat) in per_path {
            let mut v = Vec::with_capacity(ec.dim() * n.dim());
            for r in 0..mat.rows() {
                v.extend(mat.row(r).iter().cloned());
            }
            let coords = coordinates_in(&flat, &v).ok_or_else(|| {
                Error::Internal("morphism space is not closed under the left coaction".into())
            })?;
            for (i, coeff) in coords.into_iter().enumerate() {
                if !coeff.is_zero() {
                    cmat[i][j].push((s.clone(), coeff));
                }
            }
        }
    }

    // Dual right comodule: rho(h_a) = sum_j h_j x c_{a j}.
    let mut coaction = Vec::with_capacity(k);
    for a in 0..k {
        let mut terms = Vec::new();
        for j in 0..k {
            for (p, coeff) in &cmat[a][j] {
                terms.push((j, p.clone(), coeff.clone()));
            }
        }
        coaction.push(terms);
    }
    let labels = (0..k).map(|i| format!("h{i}")).collect();
    let h = LinearComodule::new(ctx.coalgebra().clone(), labels, coaction)?;

    // Round trip: T H must be the identity on the input.
    let th = t_linear(ctx, &h)?;
    if !is_isomorphic(&th, n)? {
        return Err(Error::Internal(
            "round trip through the quotient functor failed".into(),
        ));
    }
    Ok(h)
}

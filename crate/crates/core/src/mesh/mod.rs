//! Oriented simplicial complexes in dimensions 2 and 3.
//!
//! Every simplex is stored with ascending vertex indices; that ordering is the
//! canonical orientation and all incidence signs derive from it.

mod generate;
mod io;
mod refine;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::generate;
pub use io::{read_mesh, write_mesh};
pub use refine::refine;

/// Test geometries with known topology.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum CanonicalDomain {
    UnitSquare,
    Rectangle { a: f64, b: f64 },
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    /// `[0,1]^2` minus the quadrant `(1/2, 1] x (1/2, 1]`.
    LShape,
    UnitCube,
}

impl CanonicalDomain {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match *self {
            Self::Rectangle { a, b } => {
                positive("a", a)?;
                positive("b", b)
            }
            Self::Disk { radius } => positive("R", radius),
            Self::Annulus { inner, outer } => {
                positive("r", inner)?;
                positive("R", outer)?;
                if inner >= outer {
                    return Err(Error::Parameter(format!("annulus needs r < R, got r={inner}, R={outer}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::UnitCube => 3,
            _ => 2,
        }
    }

    /// Euler characteristic of the continuum domain.
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            Self::Annulus { .. } => 0,
            _ => 1,
        }
    }

    pub fn is_simply_connected(&self) -> bool {
        !matches!(self, Self::Annulus { .. })
    }

    /// Smooth or convex-polygonal boundary; the L-shape's re-entrant corner is not.
    pub fn has_regular_boundary(&self) -> bool {
        !matches!(self, Self::LShape)
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            Self::UnitSquare => 2f64.sqrt(),
            Self::Rectangle { a, b } => a.hypot(b),
            Self::Disk { radius } => 2.0 * radius,
            Self::Annulus { outer, .. } => 2.0 * outer,
            Self::LShape => 2f64.sqrt(),
            Self::UnitCube => 3f64.sqrt(),
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Self::UnitSquare => "unit_square".into(),
            Self::Rectangle { a, b } => format!("rectangle({a},{b})"),
            Self::Disk { radius } => format!("disk({radius})"),
            Self::Annulus { inner, outer } => format!("annulus({inner},{outer})"),
            Self::LShape => "l_shape".into(),
            Self::UnitCube => "unit_cube".into(),
        }
    }
}

/// Padded vertex tuple used as a hash key for simplices of any dimension.
type SimplexKey = [usize; 4];

fn key_of(verts: &[usize]) -> SimplexKey {
    let mut k = [usize::MAX; 4];
    k[..verts.len()].copy_from_slice(verts);
    k
}

/// Lexicographic list of the `size`-element subsets of `0..n`.
pub(crate) fn local_subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Immutable oriented simplicial complex with all skeletons enumerated.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    dim: usize,
    coords: Vec<f64>,
    /// `skeletons[p]` is a flat list of sorted `(p+1)`-tuples in lexicographic order.
    skeletons: Vec<Vec<usize>>,
    lookup: Vec<HashMap<SimplexKey, usize>>,
    /// `cell_faces[p]`: for every cell, the global indices of its `p`-faces in
    /// the order of [`local_subsets`]`(dim+1, p+1)`.
    cell_faces: Vec<Vec<usize>>,
    /// number of cells incident to each `(dim-1)`-simplex
    facet_cells: Vec<u8>,
    on_boundary: Vec<Vec<bool>>,
    origin: Option<(CanonicalDomain, usize)>,
}

/// Boundary of a complex, as returned by [`SimplicialComplex::boundary_submesh`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySubmesh {
    /// indices into the `(dim-1)`-skeleton
    pub faces: Vec<usize>,
    /// `simplices[p]`: indices of `p`-simplices contained in the boundary
    pub simplices: Vec<Vec<usize>>,
    pub components: usize,
}

impl SimplicialComplex {
    /// Builds a complex from vertex coordinates (flat, `dim` per vertex) and
    /// top-dimensional cells.
    pub fn new(dim: usize, coords: Vec<f64>, cells: Vec<Vec<usize>>) -> Result<Self> {
        Self::build(dim, coords, cells).map_err(|(_, e)| e)
    }

    /// Like [`new`](Self::new) but reports the offending cell index with the error.
    pub(crate) fn build(
        dim: usize,
        coords: Vec<f64>,
        cells: Vec<Vec<usize>>,
    ) -> std::result::Result<Self, (Option<usize>, Error)> {
        if !(2..=3).contains(&dim) {
            return Err((None, Error::Mesh(format!("dimension must be 2 or 3, got {dim}"))));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err((None, Error::Mesh("coordinate array length is not a multiple of dim".into())));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err((None, Error::Mesh("non-finite vertex coordinate".into())));
        }
        let nv = coords.len() / dim;
        let mut sorted_cells = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() != dim + 1 {
                return Err((Some(c), Error::Mesh(format!("cell {c} has {} vertices, expected {}", cell.len(), dim + 1))));
            }
            if let Some(&bad) = cell.iter().find(|&&v| v >= nv) {
                return Err((Some(c), Error::Mesh(format!("cell {c} references vertex {bad} but there are {nv}"))));
            }
            let mut s = cell.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err((Some(c), Error::Mesh(format!("cell {c} repeats a vertex"))));
            }
            sorted_cells.push(s);
        }

        // enumerate skeletons in lexicographic order
        let mut skeletons = Vec::with_capacity(dim + 1);
        let mut lookup = Vec::with_capacity(dim + 1);
        for p in 0..=dim {
            let subsets = local_subsets(dim + 1, p + 1);
            let set: BTreeSet<SimplexKey> = if p == 0 {
                (0..nv).map(|v| key_of(&[v])).collect()
            } else {
                sorted_cells
                    .iter()
                    .flat_map(|cell| subsets.iter().map(move |s| {
                        let verts: Vec<usize> = s.iter().map(|&k| cell[k]).collect();
                        key_of(&verts)
                    }))
                    .collect()
            };
            if p == dim && set.len() != sorted_cells.len() {
                return Err((None, Error::Mesh("duplicate cells".into())));
            }
            let mut flat = Vec::with_capacity(set.len() * (p + 1));
            let mut map = HashMap::with_capacity(set.len());
            for (idx, key) in set.into_iter().enumerate() {
                flat.extend_from_slice(&key[..=p]);
                map.insert(key, idx);
            }
            skeletons.push(flat);
            lookup.push(map);
        }
        // cells are re-ordered canonically, so faces are computed from the canonical list
        let canonical_cells: Vec<Vec<usize>> = skeletons[dim].chunks(dim + 1).map(<[usize]>::to_vec).collect();
        let mut cell_faces = Vec::with_capacity(dim + 1);
        for p in 0..=dim {
            let subsets = local_subsets(dim + 1, p + 1);
            let mut faces = Vec::with_capacity(canonical_cells.len() * subsets.len());
            for cell in &canonical_cells {
                for s in &subsets {
                    let verts: Vec<usize> = s.iter().map(|&k| cell[k]).collect();
                    faces.push(lookup[p][&key_of(&verts)]);
                }
            }
            cell_faces.push(faces);
        }

        let nfacets = skeletons[dim - 1].len() / dim;
        let mut facet_cells = vec![0u8; nfacets];
        let per_cell = dim + 1;
        for (c, faces) in cell_faces[dim - 1].chunks(per_cell).enumerate() {
            for &f in faces {
                facet_cells[f] = facet_cells[f].saturating_add(1);
                if facet_cells[f] > 2 {
                    // map back to the caller's cell numbering
                    let cell = &canonical_cells[c];
                    let orig = sorted_cells.iter().position(|s| s == cell).unwrap_or(c);
                    return Err((
                        Some(orig),
                        Error::Mesh(format!("non-manifold: facet {f} is shared by more than two cells")),
                    ));
                }
            }
        }

        let mut on_boundary: Vec<Vec<bool>> = (0..=dim).map(|p| vec![false; skeletons[p].len() / (p + 1)]).collect();
        for f in (0..nfacets).filter(|&f| facet_cells[f] == 1) {
            let verts = &skeletons[dim - 1][f * dim..(f + 1) * dim];
            on_boundary[dim - 1][f] = true;
            for p in 0..dim - 1 {
                for s in local_subsets(dim, p + 1) {
                    let sub: Vec<usize> = s.iter().map(|&k| verts[k]).collect();
                    on_boundary[p][lookup[p][&key_of(&sub)]] = true;
                }
            }
        }

        Ok(Self { dim, coords, skeletons, lookup, cell_faces, facet_cells, on_boundary, origin: None })
    }

    pub(crate) fn with_origin(mut self, domain: CanonicalDomain, resolution: usize) -> Self {
        self.origin = Some((domain, resolution));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Domain and resolution this complex was generated from, if any.
    pub fn origin(&self) -> Option<(CanonicalDomain, usize)> {
        self.origin
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn num_cells(&self) -> usize {
        self.count(self.dim)
    }

    /// Number of `p`-simplices.
    pub fn count(&self, p: usize) -> usize {
        self.skeletons[p].len() / (p + 1)
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..=self.dim).map(|p| self.count(p)).collect()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Sorted vertex tuple of the `i`-th `p`-simplex.
    pub fn simplex(&self, p: usize, i: usize) -> &[usize] {
        &self.skeletons[p][i * (p + 1)..(i + 1) * (p + 1)]
    }

    pub fn simplices(&self, p: usize) -> impl Iterator<Item = &[usize]> + '_ {
        self.skeletons[p].chunks(p + 1)
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        self.simplex(self.dim, c)
    }

    /// Index of the simplex with the given (unsorted) vertices.
    pub fn index_of(&self, verts: &[usize]) -> Option<usize> {
        let p = verts.len().checked_sub(1)?;
        if p > self.dim {
            return None;
        }
        let mut s = verts.to_vec();
        s.sort_unstable();
        self.lookup[p].get(&key_of(&s)).copied()
    }

    /// Global indices of the `p`-faces of cell `c`, in local lexicographic order.
    pub fn cell_faces(&self, p: usize, c: usize) -> &[usize] {
        let k = binomial(self.dim + 1, p + 1);
        &self.cell_faces[p][c * k..(c + 1) * k]
    }

    pub fn is_boundary(&self, p: usize, i: usize) -> bool {
        self.on_boundary[p][i]
    }

    pub fn boundary_mask(&self, p: usize) -> &[bool] {
        &self.on_boundary[p]
    }

    /// Indices of `p`-simplices not contained in the boundary.
    pub fn interior(&self, p: usize) -> Vec<usize> {
        (0..self.count(p)).filter(|&i| !self.on_boundary[p][i]).collect()
    }

    /// Number of cells incident to each `(dim-1)`-simplex.
    pub fn facet_incidence(&self) -> &[u8] {
        &self.facet_cells
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim).map(|p| if p % 2 == 0 { 1 } else { -1 } * self.count(p) as i64).sum()
    }

    /// Longest edge.
    pub fn mesh_size(&self) -> f64 {
        self.simplices(1).map(|e| self.distance(e[0], e[1])).fold(0.0, f64::max)
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.vertex(a).iter().zip(self.vertex(b)).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    /// Unsigned volume of cell `c`.
    pub fn cell_volume(&self, c: usize) -> f64 {
        let cell = self.cell(c);
        let n = self.dim;
        let x0 = self.vertex(cell[0]);
        let m = crate::linalg::DenseMatrix::from_fn(n, n, |i, j| self.vertex(cell[j + 1])[i] - x0[i]);
        m.determinant().abs() / (1..=n).product::<usize>() as f64
    }

    pub fn volume(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_volume(c)).sum()
    }

    /// Number of connected components of the 1-skeleton.
    pub fn connected_components(&self) -> usize {
        let mut uf = UnionFind::new(self.num_vertices());
        for e in self.simplices(1) {
            uf.union(e[0], e[1]);
        }
        uf.count()
    }

    /// Boundary faces, boundary simplices of every dimension, and the number
    /// of connected boundary components.
    pub fn boundary_submesh(&self) -> BoundarySubmesh {
        let d = self.dim;
        let faces: Vec<usize> = (0..self.count(d - 1)).filter(|&f| self.on_boundary[d - 1][f]).collect();
        let simplices = (0..=d).map(|p| (0..self.count(p)).filter(|&i| self.on_boundary[p][i]).collect()).collect();
        // faces are connected through shared (dim-2)-simplices
        let mut uf = UnionFind::new(faces.len());
        let mut first_seen: HashMap<usize, usize> = HashMap::new();
        for (k, &f) in faces.iter().enumerate() {
            let verts = self.simplex(d - 1, f);
            for s in local_subsets(d, d - 1) {
                let sub: Vec<usize> = s.iter().map(|&i| verts[i]).collect();
                let ridge = self.index_of(&sub).expect("ridge exists");
                match first_seen.get(&ridge) {
                    Some(&other) => uf.union(k, other),
                    None => {
                        first_seen.insert(ridge, k);
                    }
                }
            }
        }
        BoundarySubmesh { faces, simplices, components: uf.count() }
    }

    /// Betti numbers of the complex, for a connected-or-not domain embedded in
    /// `R^dim`: `b_0` from connectivity, `b_dim = 0` when the boundary is
    /// non-empty, `b_{dim-1}` from boundary components (Alexander duality), and
    /// the remaining one from the Euler characteristic.
    pub fn betti_numbers(&self) -> Vec<i64> {
        let b0 = self.connected_components() as i64;
        let bd = self.boundary_submesh();
        let chi = self.euler_characteristic();
        let mut b = vec![0i64; self.dim + 1];
        b[0] = b0;
        if bd.faces.is_empty() {
            // closed pseudo-manifold: fall back to the exact rank computation
            return crate::dec::betti_numbers_exact(self);
        }
        match self.dim {
            2 => b[1] = b0 - chi,
            _ => {
                b[2] = bd.components as i64 - b0;
                b[1] = b0 + b[2] - chi;
            }
        }
        b
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SimplicialComplex {
        SimplicialComplex::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![vec![2, 0, 1]]).unwrap()
    }

    #[test]
    fn single_triangle_boundary() {
        let t = triangle();
        assert_eq!(t.counts(), vec![3, 3, 1]);
        let b = t.boundary_submesh();
        assert_eq!(b.faces.len(), 3);
        assert_eq!(b.components, 1);
        assert_eq!(b.simplices[0].len(), 3);
        assert_eq!(t.cell(0), &[0, 1, 2]);
        assert!((t.volume() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn skeleton_lookup_is_consistent() {
        let t = triangle();
        for p in 0..=2 {
            for (i, s) in t.simplices(p).enumerate() {
                assert_eq!(t.index_of(s), Some(i));
                assert!(s.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(t.index_of(&[2, 0]), t.index_of(&[0, 2]));
    }

    #[test]
    fn rejects_bad_cells() {
        let coords = vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        assert!(SimplicialComplex::new(2, coords.clone(), vec![vec![0, 1, 9]]).is_err());
        assert!(SimplicialComplex::new(2, coords.clone(), vec![vec![0, 1, 1]]).is_err());
        assert!(SimplicialComplex::new(2, coords, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn non_manifold_edge_is_rejected() {
        // three triangles sharing the edge 0-1
        let coords = vec![0.0, 0.0, 1.0, 0.0, 0.5, 1.0, 0.5, -1.0, 0.5, 2.0];
        let cells = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]];
        let err = SimplicialComplex::build(2, coords, cells).unwrap_err();
        assert_eq!(err.0, Some(2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(local_subsets(4, 2).len(), 6);
        assert_eq!(local_subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn domain_validation() {
        assert!(CanonicalDomain::Annulus { inner: 1.0, outer: 0.5 }.validate().is_err());
        assert!(CanonicalDomain::Disk { radius: -1.0 }.validate().is_err());
        assert!(CanonicalDomain::Rectangle { a: 2.0, b: 1.0 }.validate().is_ok());
    }
}

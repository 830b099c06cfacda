//! Generalized symmetric pencils `(A, B)` for the boundary value problems.

mod export;
mod vector_form;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dec::{coboundary_matrix, mass_matrix};
use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix, Ldl};
use crate::mesh::{binomial, SimplicialComplex};
use crate::scalar::Real;

pub use export::{dof_map_text, export_pencil, ExportedPencil};
pub use vector_form::{true_dirichlet_cross_check, vector_form_matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKind {
    ScalarDirichlet,
    ScalarNeumann,
    Absolute,
    TrueDirichlet,
    CurlcurlRelative,
}

impl BcKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::ScalarDirichlet => "scalar_dirichlet",
            Self::ScalarNeumann => "scalar_neumann",
            Self::Absolute => "absolute",
            Self::TrueDirichlet => "true_dirichlet",
            Self::CurlcurlRelative => "curlcurl_relative",
        }
    }
}

impl fmt::Display for BcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BcKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "scalar_dirichlet" | "dirichlet" => Self::ScalarDirichlet,
            "scalar_neumann" | "neumann" => Self::ScalarNeumann,
            "absolute" => Self::Absolute,
            "true_dirichlet" => Self::TrueDirichlet,
            "curlcurl_relative" | "curlcurl" | "curl_curl" => Self::CurlcurlRelative,
            other => return Err(Error::Parameter(format!("unknown boundary condition `{other}`"))),
        })
    }
}

/// Descriptive data carried with every pencil.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub domain: String,
    pub dim: usize,
    pub h: f64,
    pub simply_connected: bool,
    /// Domain violates the smooth-boundary hypothesis (re-entrant corner).
    pub exploratory: bool,
}

impl ProblemMeta {
    pub fn of(complex: &SimplicialComplex) -> Self {
        let (domain, regular) = match complex.origin() {
            Some((d, _)) => (d.name(), d.has_regular_boundary()),
            None => ("custom".to_string(), true),
        };
        let b = complex.betti_numbers();
        Self {
            domain,
            dim: complex.dim(),
            h: complex.mesh_size(),
            simply_connected: b[0] == 1 && b.iter().skip(1).all(|&x| x == 0),
            exploratory: !regular,
        }
    }
}

/// Relation between pencil unknowns and cochain values.
///
/// Unknown `c * kept.len() + k` is the value on simplex `kept[k]` of the
/// `degree`-skeleton in component `c`. Scalar and Whitney problems have one
/// component; the true-Dirichlet problem has one per basis form `dx^I`.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub skeleton_degree: usize,
    pub full_size: usize,
    pub kept: Vec<usize>,
    pub components: usize,
}

impl DofMap {
    fn all(skeleton_degree: usize, n: usize) -> Self {
        Self { skeleton_degree, full_size: n, kept: (0..n).collect(), components: 1 }
    }

    pub fn len(&self) -> usize {
        self.kept.len() * self.components
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn eliminated(&self) -> usize {
        self.full_size - self.kept.len()
    }

    /// Scatters one component of a pencil vector into a full cochain,
    /// with zeros on eliminated simplices.
    pub fn expand<T: Real>(&self, x: &[T], component: usize) -> Vec<T> {
        let m = self.kept.len();
        let mut full = vec![T::zero(); self.full_size];
        for (k, &i) in self.kept.iter().enumerate() {
            full[i] = x[component * m + k];
        }
        full
    }
}

/// The stiffness side of a pencil.
#[derive(Clone, Debug)]
pub enum Stiffness<T> {
    Assembled(CsrMatrix<T>),
    /// Schur form `A = C G^{-1} C^T + K` of a mixed system, applied
    /// matrix-free: `C = M_p D_{p-1}`, `G = M_{p-1}`, `K = D_p^T M_{p+1} D_p`.
    Mixed { k: CsrMatrix<T>, c: CsrMatrix<T>, g: CsrMatrix<T> },
}

/// A symmetric pencil `A x = alpha B x` with `B` positive definite.
#[derive(Clone, Debug)]
pub struct EigenProblem<T> {
    pub degree: usize,
    pub bc: BcKind,
    pub meta: ProblemMeta,
    pub dof_map: DofMap,
    pub stiffness: Stiffness<T>,
    pub mass: CsrMatrix<T>,
    /// Columns span a known kernel of `A` that must be excluded from the spectrum.
    pub deflation: Option<CsrMatrix<T>>,
    g_factor: OnceLock<Ldl<T>>,
}

impl<T: Real> EigenProblem<T> {
    fn new(degree: usize, bc: BcKind, meta: ProblemMeta, dof_map: DofMap, stiffness: Stiffness<T>, mass: CsrMatrix<T>) -> Self {
        Self { degree, bc, meta, dof_map, stiffness, mass, deflation: None, g_factor: OnceLock::new() }
    }

    pub fn dof(&self) -> usize {
        self.mass.nrows()
    }

    fn g_factor(&self) -> Option<&Ldl<T>> {
        match &self.stiffness {
            Stiffness::Mixed { g, .. } if g.nrows() > 0 => {
                Some(self.g_factor.get_or_init(|| Ldl::factor(g).expect("Whitney mass matrices are SPD")))
            }
            _ => None,
        }
    }

    pub fn apply_a(&self, x: &[T]) -> Vec<T> {
        match &self.stiffness {
            Stiffness::Assembled(a) => a.mul_vec(x),
            Stiffness::Mixed { k, c, .. } => {
                let mut y = k.mul_vec(x);
                if let Some(f) = self.g_factor() {
                    let s = f.solve(&c.tr_mul_vec(x));
                    for (yi, v) in y.iter_mut().zip(c.mul_vec(&s)) {
                        *yi += v;
                    }
                }
                y
            }
        }
    }

    pub fn apply_b(&self, x: &[T]) -> Vec<T> {
        self.mass.mul_vec(x)
    }

    /// Sum of the diagonal of `A`.
    pub fn trace_a(&self) -> T {
        match &self.stiffness {
            Stiffness::Assembled(a) => a.diagonal().into_iter().sum(),
            Stiffness::Mixed { .. } => {
                let n = self.dof();
                let mut e = vec![T::zero(); n];
                (0..n)
                    .map(|i| {
                        e[i] = T::one();
                        let v = self.apply_a(&e)[i];
                        e[i] = T::zero();
                        v
                    })
                    .sum()
            }
        }
    }

    /// Dense copy of `A`; intended for small problems.
    pub fn dense_a(&self) -> DenseMatrix<T> {
        match &self.stiffness {
            Stiffness::Assembled(a) => a.to_dense(),
            Stiffness::Mixed { k, c, .. } => {
                let n = self.dof();
                let mut out = k.to_dense();
                if let Some(f) = self.g_factor() {
                    let ct = c.transpose();
                    // columns of G^{-1} C^T
                    let cols: Vec<Vec<T>> = (0..n)
                        .map(|j| {
                            let mut e = vec![T::zero(); n];
                            e[j] = T::one();
                            f.solve(&ct.mul_vec(&e))
                        })
                        .collect();
                    for j in 0..n {
                        let cj = c.mul_vec(&cols[j]);
                        for i in 0..n {
                            out[(i, j)] += cj[i];
                        }
                    }
                }
                out
            }
        }
    }

    /// Factorization of `A + sigma B`, through the quasi-definite saddle
    /// system for mixed pencils so that no inverse mass matrix is formed.
    pub fn factor_shifted(&self, sigma: T) -> Result<ShiftedSolver<T>> {
        let n = self.dof();
        match &self.stiffness {
            Stiffness::Assembled(a) => {
                let shifted = a.lin_comb(T::one(), &self.mass, sigma);
                Ok(ShiftedSolver { n, extra: 0, ldl: Ldl::factor(&shifted)? })
            }
            Stiffness::Mixed { k, c, g } => {
                let m = g.nrows();
                let mut trips: Vec<(usize, usize, T)> = k.lin_comb(T::one(), &self.mass, sigma).triplets().collect();
                for (i, j, v) in c.triplets() {
                    trips.push((i, n + j, v));
                    trips.push((n + j, i, v));
                }
                for (i, j, v) in g.triplets() {
                    trips.push((n + i, n + j, -v));
                }
                let saddle = CsrMatrix::from_triplets(n + m, n + m, &trips);
                Ok(ShiftedSolver { n, extra: m, ldl: Ldl::factor(&saddle)? })
            }
        }
    }

    /// B-orthogonal projector onto the complement of the deflation space,
    /// `P x = x - G (G^T B G)^{-1} G^T B x`; `None` when nothing is deflated.
    pub fn deflator(&self) -> Result<Option<Deflator<T>>> {
        let Some(g) = &self.deflation else { return Ok(None) };
        let bg = self.mass.matmul(g);
        let gtbg = g.transpose().matmul(&bg);
        Ok(Some(Deflator { g: g.clone(), bg, factor: Ldl::factor(&gtbg)? }))
    }
}

/// Solves `(A + sigma B) x = b`.
#[derive(Clone, Debug)]
pub struct ShiftedSolver<T> {
    n: usize,
    extra: usize,
    ldl: Ldl<T>,
}

impl<T: Real> ShiftedSolver<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        if self.extra == 0 {
            return self.ldl.solve(b);
        }
        let mut rhs = b.to_vec();
        rhs.resize(self.n + self.extra, T::zero());
        let mut x = self.ldl.solve(&rhs);
        x.truncate(self.n);
        x
    }

    /// Negative pivots of the factored system; equals the size of the
    /// constraint block when `A + sigma B` is positive definite.
    pub fn negative_pivots(&self) -> usize {
        self.ldl.negative_pivots()
    }

    pub fn constraint_size(&self) -> usize {
        self.extra
    }
}

/// B-orthogonal projection away from a kernel basis.
#[derive(Clone, Debug)]
pub struct Deflator<T> {
    g: CsrMatrix<T>,
    bg: CsrMatrix<T>,
    factor: Ldl<T>,
}

impl<T: Real> Deflator<T> {
    pub fn project(&self, x: &[T]) -> Vec<T> {
        let coeffs = self.factor.solve(&self.bg.tr_mul_vec(x));
        let gx = self.g.mul_vec(&coeffs);
        x.iter().zip(gx).map(|(&a, b)| a - b).collect()
    }

    pub fn rank(&self) -> usize {
        self.g.ncols()
    }
}

fn check_degree(complex: &SimplicialComplex, p: usize) -> Result<()> {
    if p > complex.dim() {
        Err(Error::Parameter(format!("degree {p} out of range for a {}-dimensional mesh", complex.dim())))
    } else {
        Ok(())
    }
}

/// `D_p^T M_{p+1} D_p`, or the zero matrix for `p = dim`.
fn curl_stiffness<T: Real>(complex: &SimplicialComplex, p: usize) -> Result<CsrMatrix<T>> {
    let n = complex.count(p);
    if p == complex.dim() {
        return Ok(CsrMatrix::zeros(n, n));
    }
    let d = coboundary_matrix::<T>(complex, p)?;
    let m = mass_matrix::<T>(complex, p + 1)?;
    Ok(d.transpose().matmul(&m.matmul(&d)))
}

/// P1 Laplacian `A = D_0^T M_1 D_0`, `B = M_0`, with boundary vertices
/// eliminated for Dirichlet conditions.
pub fn scalar_laplacian<T: Real>(complex: &SimplicialComplex, bc: BcKind) -> Result<EigenProblem<T>> {
    let a = curl_stiffness::<T>(complex, 0)?;
    let b = mass_matrix::<T>(complex, 0)?;
    let meta = ProblemMeta::of(complex);
    match bc {
        BcKind::ScalarNeumann => {
            let map = DofMap::all(0, complex.count(0));
            Ok(EigenProblem::new(0, bc, meta, map, Stiffness::Assembled(a), b))
        }
        BcKind::ScalarDirichlet => {
            let kept = complex.interior(0);
            let map = DofMap { skeleton_degree: 0, full_size: complex.count(0), kept: kept.clone(), components: 1 };
            Ok(EigenProblem::new(
                0,
                bc,
                meta,
                map,
                Stiffness::Assembled(a.submatrix(&kept, &kept)),
                b.submatrix(&kept, &kept),
            ))
        }
        other => Err(Error::Parameter(format!("scalar_laplacian does not accept `{other}`"))),
    }
}

/// Hodge Laplacian on Whitney `p`-forms with absolute boundary conditions,
/// imposed naturally through the mixed formulation.
pub fn hodge_laplacian_absolute<T: Real>(complex: &SimplicialComplex, p: usize) -> Result<EigenProblem<T>> {
    check_degree(complex, p)?;
    let meta = ProblemMeta::of(complex);
    let map = DofMap::all(p, complex.count(p));
    let mass = mass_matrix::<T>(complex, p)?;
    let k = curl_stiffness::<T>(complex, p)?;
    let stiffness = if p == 0 {
        Stiffness::Assembled(k)
    } else {
        let d = coboundary_matrix::<T>(complex, p - 1)?;
        let c = mass.matmul(&d);
        let g = mass_matrix::<T>(complex, p - 1)?;
        Stiffness::Mixed { k, c, g }
    };
    Ok(EigenProblem::new(p, BcKind::Absolute, meta, map, stiffness, mass))
}

/// Forms `sum_I f_I dx^I` with every `f_I` a P1 function vanishing on the
/// boundary. On such fields the Hodge Dirichlet form equals the sum of the
/// scalar Dirichlet forms of the components, so the pencil is block
/// diagonal with `binom(n, p)` copies of the scalar Dirichlet pencil.
pub fn true_dirichlet_problem<T: Real>(complex: &SimplicialComplex, p: usize) -> Result<EigenProblem<T>> {
    check_degree(complex, p)?;
    let scalar = scalar_laplacian::<T>(complex, BcKind::ScalarDirichlet)?;
    let Stiffness::Assembled(a) = &scalar.stiffness else { unreachable!("scalar pencils are assembled") };
    let copies = binomial(complex.dim(), p);
    let block = |m: &CsrMatrix<T>| {
        let n = m.nrows();
        let trips: Vec<_> = (0..copies).flat_map(|c| m.triplets().map(move |(i, j, v)| (c * n + i, c * n + j, v))).collect();
        CsrMatrix::from_triplets(copies * n, copies * n, &trips)
    };
    let map = DofMap { components: copies, ..scalar.dof_map.clone() };
    Ok(EigenProblem::new(p, BcKind::TrueDirichlet, scalar.meta.clone(), map, Stiffness::Assembled(block(a)), block(&scalar.mass)))
}

/// Maxwell cavity with perfectly conducting walls on Whitney edge elements:
/// `A = D_1^T M_2 D_1`, `B = M_1` on interior edges. Gradients of interior
/// vertex functions form the kernel and are attached for deflation.
pub fn curl_curl_problem<T: Real>(complex: &SimplicialComplex) -> Result<EigenProblem<T>> {
    if complex.dim() != 3 {
        return Err(Error::Unsupported(format!("curl-curl problem needs a 3D mesh, got dim {}", complex.dim())));
    }
    let edges = complex.interior(1);
    let verts = complex.interior(0);
    let a = curl_stiffness::<T>(complex, 1)?.submatrix(&edges, &edges);
    let b = mass_matrix::<T>(complex, 1)?.submatrix(&edges, &edges);
    let g = coboundary_matrix::<T>(complex, 0)?.submatrix(&edges, &verts);
    let map = DofMap { skeleton_degree: 1, full_size: complex.count(1), kept: edges, components: 1 };
    let mut problem = EigenProblem::new(1, BcKind::CurlcurlRelative, ProblemMeta::of(complex), map, Stiffness::Assembled(a), b);
    problem.deflation = Some(g);
    Ok(problem)
}

/// Builds the pencil for `bc` in degree `p`.
pub fn build_problem<T: Real>(complex: &SimplicialComplex, bc: BcKind, p: usize) -> Result<EigenProblem<T>> {
    match bc {
        BcKind::ScalarDirichlet | BcKind::ScalarNeumann => {
            if p != 0 {
                return Err(Error::Parameter(format!("{bc} is a 0-form problem, got degree {p}")));
            }
            scalar_laplacian(complex, bc)
        }
        BcKind::Absolute => hodge_laplacian_absolute(complex, p),
        BcKind::TrueDirichlet => true_dirichlet_problem(complex, p),
        BcKind::CurlcurlRelative => {
            if p != 1 {
                return Err(Error::Parameter(format!("curl-curl is a 1-form problem, got degree {p}")));
            }
            curl_curl_problem(complex)
        }
    }
}

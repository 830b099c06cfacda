//! Discrete exterior calculus on Whitney forms: coboundaries, mass matrices,
//! the mass-adjoint codifferential and the closed / co-exact splitting.

mod whitney;

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{conjugate_gradient, CsrMatrix, Ldl};
use crate::mesh::{local_subsets, SimplicialComplex};
use crate::scalar::{dot, norm2, Real};

pub(crate) use whitney::{cell_geometry, element_mass};

/// A vector of values indexed by the `p`-skeleton.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<T> {
    pub degree: usize,
    pub values: Vec<T>,
}

impl<T: Real> Cochain<T> {
    pub fn new(complex: &SimplicialComplex, degree: usize, values: Vec<T>) -> Result<Self> {
        if degree > complex.dim() || values.len() != complex.count(degree) {
            return Err(Error::Dimension(format!(
                "{}-cochain needs {} values, got {}",
                degree,
                complex.count(degree.min(complex.dim())),
                values.len()
            )));
        }
        Ok(Self { degree, values })
    }

    pub fn zeros(complex: &SimplicialComplex, degree: usize) -> Self {
        Self { degree, values: vec![T::zero(); complex.count(degree)] }
    }
}

/// Signed incidence matrix `D_p` mapping `p`-cochains to `(p+1)`-cochains.
///
/// Entry `(tau, sigma)` is `(-1)^i` when `sigma` is `tau` with its `i`-th
/// (sorted) vertex removed.
pub fn coboundary_matrix<T>(complex: &SimplicialComplex, p: usize) -> Result<CsrMatrix<T>>
where
    T: Copy + num_traits::Num + std::ops::AddAssign + std::ops::Neg<Output = T>,
{
    if p >= complex.dim() {
        return Err(Error::Parameter(format!("coboundary degree {p} out of range for dim {}", complex.dim())));
    }
    let mut trips = Vec::with_capacity(complex.count(p + 1) * (p + 2));
    for (t, verts) in complex.simplices(p + 1).enumerate() {
        for i in 0..verts.len() {
            let face: Vec<usize> = verts.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect();
            let s = complex.index_of(&face).expect("face of a simplex is in the complex");
            let sign = if i % 2 == 0 { T::one() } else { -T::one() };
            trips.push((t, s, sign));
        }
    }
    Ok(CsrMatrix::from_triplets(complex.count(p + 1), complex.count(p), &trips))
}

/// Whitney-form mass matrix `M_p`, assembled cell by cell with exact
/// integration. Element matrices are computed in parallel and merged in
/// canonical cell order, so the result does not depend on the thread count.
pub fn mass_matrix<T: Real>(complex: &SimplicialComplex, p: usize) -> Result<CsrMatrix<T>> {
    let n = complex.dim();
    if p > n {
        return Err(Error::Parameter(format!("mass degree {p} out of range for dim {n}")));
    }
    let locals: Vec<_> = (0..complex.num_cells())
        .into_par_iter()
        .map(|c| cell_geometry::<T>(complex, c).map(|g| element_mass(&g, p)))
        .collect::<Result<_>>()?;
    let k = local_subsets(n + 1, p + 1).len();
    let mut trips = Vec::with_capacity(locals.len() * k * k);
    for (c, m) in locals.iter().enumerate() {
        let faces = complex.cell_faces(p, c);
        for r in 0..k {
            for s in 0..k {
                trips.push((faces[r], faces[s], m[(r, s)]));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(complex.count(p), complex.count(p), &trips))
}

/// All coboundaries and mass matrices of a complex, with lazily factorized
/// masses for applying `M_p^{-1}`.
pub struct DeRhamComplex<T> {
    dim: usize,
    coboundaries: Vec<CsrMatrix<T>>,
    masses: Vec<CsrMatrix<T>>,
    mass_factors: Vec<OnceLock<Ldl<T>>>,
    h: f64,
}

impl<T: Real> DeRhamComplex<T> {
    pub fn new(complex: &SimplicialComplex) -> Result<Self> {
        let dim = complex.dim();
        let coboundaries = (0..dim).map(|p| coboundary_matrix(complex, p)).collect::<Result<_>>()?;
        let masses = (0..=dim).map(|p| mass_matrix(complex, p)).collect::<Result<_>>()?;
        Ok(Self {
            dim,
            coboundaries,
            masses,
            mass_factors: (0..=dim).map(|_| OnceLock::new()).collect(),
            h: complex.mesh_size(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mesh_size(&self) -> f64 {
        self.h
    }

    pub fn size(&self, p: usize) -> usize {
        self.masses[p].nrows()
    }

    /// `D_p`, defined for `p < dim`.
    pub fn d(&self, p: usize) -> &CsrMatrix<T> {
        &self.coboundaries[p]
    }

    pub fn mass(&self, p: usize) -> &CsrMatrix<T> {
        &self.masses[p]
    }

    pub fn mass_factor(&self, p: usize) -> &Ldl<T> {
        self.mass_factors[p].get_or_init(|| Ldl::factor(&self.masses[p]).expect("Whitney mass matrices are SPD"))
    }

    /// `M_p`-inner product.
    pub fn inner(&self, p: usize, a: &[T], b: &[T]) -> T {
        dot(a, &self.masses[p].mul_vec(b))
    }

    pub fn norm_sq(&self, p: usize, a: &[T]) -> T {
        self.inner(p, a, a)
    }

    /// Applies `D_p`; `None` for `p = dim`.
    pub fn apply_d(&self, p: usize, u: &[T]) -> Option<Vec<T>> {
        (p < self.dim).then(|| self.coboundaries[p].mul_vec(u))
    }

    /// Discrete codifferential `delta_h = M_{p-1}^{-1} D_{p-1}^T M_p` on `p`-cochains.
    ///
    /// `delta_h` is the exact `M`-adjoint of `D_{p-1}`:
    /// `<D a, b>_{M_p} = <a, delta_h b>_{M_{p-1}}`. On 0-cochains the codomain is
    /// empty and an empty vector is returned.
    pub fn codifferential(&self, p: usize, b: &[T]) -> Vec<T> {
        if p == 0 {
            return Vec::new();
        }
        let rhs = self.coboundaries[p - 1].tr_mul_vec(&self.masses[p].mul_vec(b));
        self.mass_factor(p - 1).solve(&rhs)
    }

    /// `||delta_h u||^2_{M_{p-1}}`, computed without forming `delta_h u` twice.
    pub fn codifferential_energy(&self, p: usize, u: &[T]) -> T {
        if p == 0 {
            return T::zero();
        }
        let rhs = self.coboundaries[p - 1].tr_mul_vec(&self.masses[p].mul_vec(u));
        dot(&rhs, &self.mass_factor(p - 1).solve(&rhs))
    }

    /// `||D_p u||^2_{M_{p+1}}`; zero for `p = dim`.
    pub fn differential_energy(&self, p: usize, u: &[T]) -> T {
        match self.apply_d(p, u) {
            Some(du) => self.norm_sq(p + 1, &du),
            None => T::zero(),
        }
    }

    /// Splits a `p`-cochain into its discrete closed part (in `ker D_p`) and
    /// its co-exact part (in the range of `delta_h` on `(p+1)`-cochains), which
    /// are `M_p`-orthogonal.
    ///
    /// The co-exact part is `M_p^{-1} D_p^T z` with `z` solving the consistent
    /// normal equations `D_p M_p^{-1} D_p^T z = D_p u` by conjugate gradients
    /// (residual at most `1e-10 ||(|D_p| |u|)||`, at most `10 * ndof`
    /// iterations).
    pub fn hodge_split(&self, p: usize, u: &[T]) -> Result<HodgeSplit<T>> {
        if p == 0 || p > self.dim {
            return Err(Error::Parameter(format!("hodge_split needs 1 <= p <= {}, got {p}", self.dim)));
        }
        if u.len() != self.size(p) {
            return Err(Error::Dimension(format!("expected {} values, got {}", self.size(p), u.len())));
        }
        if p == self.dim {
            return Ok(HodgeSplit {
                closed: u.to_vec(),
                coexact: vec![T::zero(); u.len()],
                iterations: 0,
                residual: T::zero(),
            });
        }
        let d = &self.coboundaries[p];
        let mfac = self.mass_factor(p);
        let rhs = d.mul_vec(u);
        // measure the residual against |D| |u|, the rounding scale of D u: for
        // nearly closed u the computed D u is mostly rounding noise
        let abs_u: Vec<T> = u.iter().map(|v| v.abs()).collect();
        let scale = norm2(&d.map(|v| v.abs()).mul_vec(&abs_u));
        let bnorm = norm2(&rhs);
        let tol = if bnorm > T::zero() { T::of(1e-10) * scale / bnorm } else { T::one() };
        let normal = |z: &[T]| d.mul_vec(&mfac.solve(&d.tr_mul_vec(z)));
        let out = conjugate_gradient(normal, &rhs, tol, 10 * rhs.len().max(1))?;
        let coexact = mfac.solve(&d.tr_mul_vec(&out.solution));
        let closed: Vec<T> = u.iter().zip(&coexact).map(|(&a, &b)| a - b).collect();
        Ok(HodgeSplit { closed, coexact, iterations: out.iterations, residual: out.relative_residual })
    }
}

#[derive(Clone, Debug)]
pub struct HodgeSplit<T> {
    pub closed: Vec<T>,
    pub coexact: Vec<T>,
    pub iterations: usize,
    pub residual: T,
}

/// Exact rank over the rationals by fraction-based Gaussian elimination.
pub fn exact_rank(m: &CsrMatrix<i64>) -> usize {
    let ncols = m.ncols();
    let mut rows: Vec<Vec<BigRational>> = (0..m.nrows())
        .map(|i| {
            let mut r = vec![BigRational::zero(); ncols];
            for (j, v) in m.row(i) {
                r[j] = BigRational::from_integer(BigInt::from(v));
            }
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = BigRational::one() / rows[rank][col].clone();
        let pivot_row: Vec<BigRational> = rows[rank].iter().map(|x| x * &inv).collect();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = rows[r][col].clone();
            for c in col..ncols {
                if !pivot_row[c].is_zero() {
                    let delta = &f * &pivot_row[c];
                    rows[r][c] -= delta;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Betti numbers `dim ker D_p - rank D_{p-1}` from exact integer ranks.
/// Intended for small meshes.
pub fn betti_numbers_exact(complex: &SimplicialComplex) -> Vec<i64> {
    let n = complex.dim();
    let ranks: Vec<usize> = (0..n)
        .map(|p| exact_rank(&coboundary_matrix::<i64>(complex, p).expect("degree in range")))
        .collect();
    (0..=n)
        .map(|p| {
            let rank_out = if p < n { ranks[p] } else { 0 };
            let rank_in = if p > 0 { ranks[p - 1] } else { 0 };
            complex.count(p) as i64 - rank_out as i64 - rank_in as i64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, CanonicalDomain};

    #[test]
    fn single_triangle_gradient_rows_sum_to_zero() {
        let t = SimplicialComplex::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0], vec![vec![0, 1, 2]]).unwrap();
        let d0 = coboundary_matrix::<i64>(&t, 0).unwrap();
        assert_eq!(d0.shape(), (3, 3));
        for i in 0..3 {
            assert_eq!(d0.row(i).map(|(_, v)| v).sum::<i64>(), 0);
        }
    }

    #[test]
    fn square_resolution_one_shapes() {
        let m = generate(CanonicalDomain::UnitSquare, 1).unwrap();
        assert_eq!(coboundary_matrix::<i64>(&m, 1).unwrap().shape(), (2, 5));
        assert!(coboundary_matrix::<i64>(&m, 2).is_err());
    }

    #[test]
    fn d_squared_vanishes_exactly() {
        for (dom, res) in [
            (CanonicalDomain::UnitSquare, 4),
            (CanonicalDomain::Annulus { inner: 0.5, outer: 1.0 }, 3),
            (CanonicalDomain::Disk { radius: 1.0 }, 3),
            (CanonicalDomain::UnitCube, 2),
        ] {
            let m = generate(dom, res).unwrap();
            for p in 0..m.dim() - 1 {
                let dd = coboundary_matrix::<i64>(&m, p + 1)
                    .unwrap()
                    .matmul(&coboundary_matrix::<i64>(&m, p).unwrap());
                assert!(dd.triplets().all(|(_, _, v)| v == 0), "{dom:?} p={p}");
            }
        }
    }

    #[test]
    fn mass_partition_of_unity_and_symmetry() {
        let m = generate(CanonicalDomain::Disk { radius: 1.0 }, 4).unwrap();
        let m0 = mass_matrix::<f64>(&m, 0).unwrap();
        let total: f64 = m0.triplets().map(|(_, _, v)| v).sum();
        assert!((total - m.volume()).abs() < 1e-13);
        for p in 0..=2 {
            assert!(mass_matrix::<f64>(&m, p).unwrap().asymmetry() < 1e-14);
        }
    }

    #[test]
    fn exact_betti_numbers_small_meshes() {
        let sq = generate(CanonicalDomain::UnitSquare, 3).unwrap();
        assert_eq!(betti_numbers_exact(&sq), vec![1, 0, 0]);
        let ann = generate(CanonicalDomain::Annulus { inner: 0.5, outer: 1.0 }, 2).unwrap();
        assert_eq!(betti_numbers_exact(&ann), vec![1, 1, 0]);
        assert_eq!(betti_numbers_exact(&ann), ann.betti_numbers());
        let cube = generate(CanonicalDomain::UnitCube, 1).unwrap();
        assert_eq!(betti_numbers_exact(&cube), vec![1, 0, 0, 0]);
    }

    #[test]
    fn codifferential_of_zero_forms_is_empty() {
        let m = generate(CanonicalDomain::UnitSquare, 2).unwrap();
        let ops = DeRhamComplex::<f64>::new(&m).unwrap();
        assert!(ops.codifferential(0, &vec![1.0; m.count(0)]).is_empty());
    }

    #[test]
    fn f32_mass_matches_f64() {
        let m = generate(CanonicalDomain::UnitSquare, 2).unwrap();
        let a = mass_matrix::<f32>(&m, 1).unwrap();
        let b = mass_matrix::<f64>(&m, 1).unwrap();
        for ((_, _, x), (_, _, y)) in a.triplets().zip(b.triplets()) {
            assert!((x as f64 - y).abs() < 1e-5);
        }
    }
}

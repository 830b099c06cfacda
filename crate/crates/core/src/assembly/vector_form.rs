//! Full Hodge Dirichlet form `int <du, dv> + <delta u, delta v>` on
//! componentwise P1 forms `u = sum_I f_I dx^I`, assembled without assuming the
//! cross terms cancel. Used to confirm the block-diagonal true-Dirichlet pencil.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{true_dirichlet_problem, Stiffness};
use crate::dec::cell_geometry;
use crate::error::Result;
use crate::linalg::CsrMatrix;
use crate::mesh::{local_subsets, SimplicialComplex};
use crate::scalar::norm2;

fn mask_of(s: &[usize]) -> u32 {
    s.iter().fold(0, |m, &i| m | 1 << i)
}

fn subset_positions(n: usize, k: usize) -> HashMap<u32, usize> {
    local_subsets(n, k).iter().enumerate().map(|(i, s)| (mask_of(s), i)).collect()
}

/// Stiffness of the full form on interior vertices, with unknowns ordered
/// component-major (components in lexicographic order of `I`).
pub fn vector_form_matrix(complex: &SimplicialComplex, p: usize) -> Result<CsrMatrix<f64>> {
    let n = complex.dim();
    let comps = local_subsets(n, p);
    let up = if p < n { subset_positions(n, p + 1) } else { HashMap::new() };
    let down = if p > 0 { subset_positions(n, p - 1) } else { HashMap::new() };
    let interior = complex.interior(0);
    let mut pos = vec![usize::MAX; complex.num_vertices()];
    for (k, &v) in interior.iter().enumerate() {
        pos[v] = k;
    }
    let m = interior.len();
    let mut trips = Vec::new();
    for c in 0..complex.num_cells() {
        let geo = cell_geometry::<f64>(complex, c)?;
        let cell = complex.cell(c);
        // (global unknown, d-image, delta-image) for each local basis function
        let mut locals: Vec<(usize, Vec<f64>, Vec<f64>)> = Vec::new();
        for (ci, set) in comps.iter().enumerate() {
            let mask = mask_of(set);
            for (a, &v) in cell.iter().enumerate() {
                if pos[v] == usize::MAX {
                    continue;
                }
                let g = &geo.grads[a];
                let mut du = vec![0.0; up.len()];
                for j in (0..n).filter(|j| mask >> j & 1 == 0) {
                    // dx^j ^ dx^I
                    let sign = if (mask & ((1 << j) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                    du[up[&(mask | 1 << j)]] += sign * g[j];
                }
                let mut delta = vec![0.0; down.len()];
                for (k, &j) in set.iter().enumerate() {
                    // -d_j f * i_{d_j} dx^I
                    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
                    delta[down[&(mask & !(1 << j))]] += sign * g[j];
                }
                locals.push((ci * m + pos[v], du, delta));
            }
        }
        for (r, dr, sr) in &locals {
            for (s, ds, ss) in &locals {
                let v: f64 = dr.iter().zip(ds).map(|(x, y)| x * y).sum::<f64>()
                    + sr.iter().zip(ss).map(|(x, y)| x * y).sum::<f64>();
                if v != 0.0 {
                    trips.push((*r, *s, geo.volume * v));
                }
            }
        }
    }
    let size = comps.len() * m;
    Ok(CsrMatrix::from_triplets(size, size, &trips))
}

/// Largest `||A_full x - A_block x|| / ||x||` over `samples` random vectors.
pub fn true_dirichlet_cross_check(complex: &SimplicialComplex, p: usize, samples: usize, seed: u64) -> Result<f64> {
    let full = vector_form_matrix(complex, p)?;
    let problem = true_dirichlet_problem::<f64>(complex, p)?;
    let Stiffness::Assembled(block) = &problem.stiffness else { unreachable!("true-Dirichlet pencil is assembled") };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x: Vec<f64> = (0..full.ncols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diff: Vec<f64> = full.mul_vec(&x).iter().zip(block.mul_vec(&x)).map(|(a, b)| a - b).collect();
        worst = worst.max(norm2(&diff) / norm2(&x));
    }
    Ok(worst)
}

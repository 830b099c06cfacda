//! Matrix Market export of pencils with a plain-text description of the unknowns.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{EigenProblem, Stiffness};
use crate::error::Result;
use crate::linalg::{write_matrix_market, CsrMatrix};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct ExportedPencil {
    pub a: PathBuf,
    pub b: PathBuf,
    pub dof_map: PathBuf,
}

/// The assembled `A` or, for mixed pencils, the block matrix
/// `[[-M_{p-1}, D^T M_p], [M_p D, K]]` with `B = diag(0, M_p)`.
fn exported_matrices<T: Real>(problem: &EigenProblem<T>) -> (CsrMatrix<T>, CsrMatrix<T>) {
    match &problem.stiffness {
        Stiffness::Assembled(a) => (a.clone(), problem.mass.clone()),
        Stiffness::Mixed { k, c, g } => {
            let m = g.nrows();
            let size = m + k.nrows();
            let mut a: Vec<(usize, usize, T)> = g.triplets().map(|(i, j, v)| (i, j, -v)).collect();
            for (i, j, v) in c.triplets() {
                a.push((m + i, j, v));
                a.push((j, m + i, v));
            }
            a.extend(k.triplets().map(|(i, j, v)| (m + i, m + j, v)));
            let b: Vec<_> = problem.mass.triplets().map(|(i, j, v)| (m + i, m + j, v)).collect();
            (CsrMatrix::from_triplets(size, size, &a), CsrMatrix::from_triplets(size, size, &b))
        }
    }
}

pub fn dof_map_text<T: Real>(problem: &EigenProblem<T>) -> String {
    let map = &problem.dof_map;
    let mut out = String::new();
    let _ = writeln!(out, "# unknowns of the exported pencil");
    let _ = writeln!(out, "domain {}", problem.meta.domain);
    let _ = writeln!(out, "bc {}", problem.bc);
    let _ = writeln!(out, "degree {}", problem.degree);
    let _ = writeln!(out, "skeleton_degree {}", map.skeleton_degree);
    let _ = writeln!(out, "components {}", map.components);
    let _ = writeln!(out, "full_size {}", map.full_size);
    let _ = writeln!(out, "eliminated {}", map.eliminated());
    if let Stiffness::Mixed { g, .. } = &problem.stiffness {
        let _ = writeln!(out, "mixed_blocks sigma:{} u:{}", g.nrows(), problem.dof());
    }
    if let Some(d) = &problem.deflation {
        let _ = writeln!(out, "deflated_kernel {}", d.ncols());
    }
    let _ = writeln!(out, "kept {}", map.kept.len());
    for k in &map.kept {
        let _ = writeln!(out, "{k}");
    }
    out
}

/// Writes `{stem}_A.mtx`, `{stem}_B.mtx` and `{stem}_dofmap.txt` into `dir`.
pub fn export_pencil<T: Real>(problem: &EigenProblem<T>, dir: &Path, stem: &str) -> Result<ExportedPencil> {
    fs::create_dir_all(dir)?;
    let (a, b) = exported_matrices(problem);
    let note = format!("{} degree {} on {}", problem.bc, problem.degree, problem.meta.domain);
    let out = ExportedPencil {
        a: dir.join(format!("{stem}_A.mtx")),
        b: dir.join(format!("{stem}_B.mtx")),
        dof_map: dir.join(format!("{stem}_dofmap.txt")),
    };
    fs::write(&out.a, write_matrix_market(&a, Some(&note)))?;
    fs::write(&out.b, write_matrix_market(&b, Some(&note)))?;
    fs::write(&out.dof_map, dof_map_text(problem))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{curl_curl_problem, hodge_laplacian_absolute};
    use crate::linalg::read_matrix_market;
    use crate::mesh::{generate, CanonicalDomain};

    #[test]
    fn mixed_pencil_round_trips() {
        let m = generate(CanonicalDomain::UnitSquare, 2).unwrap();
        let prob = hodge_laplacian_absolute::<f64>(&m, 1).unwrap();
        let dir = std::env::temp_dir().join(format!("hs-export-{}", std::process::id()));
        let out = export_pencil(&prob, &dir, "problem").unwrap();
        let a = read_matrix_market(&fs::read_to_string(&out.a).unwrap()).unwrap();
        let b = read_matrix_market(&fs::read_to_string(&out.b).unwrap()).unwrap();
        let nv = m.count(0);
        assert_eq!(a.shape(), (nv + m.count(1), nv + m.count(1)));
        assert!(a.asymmetry() < 1e-14);
        assert_eq!(b.get(0, 0), 0.0);
        let text = fs::read_to_string(&out.dof_map).unwrap();
        assert!(text.contains(&format!("mixed_blocks sigma:{nv} u:{}", m.count(1))));
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn dof_map_lists_kept_edges() {
        let m = generate(CanonicalDomain::UnitCube, 2).unwrap();
        let prob = curl_curl_problem::<f64>(&m).unwrap();
        let text = dof_map_text(&prob);
        assert!(text.contains(&format!("kept {}", m.interior(1).len())));
        assert!(text.contains(&format!("deflated_kernel {}", m.interior(0).len())));
    }
}

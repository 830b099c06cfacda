use std::f64::consts::PI;

use super::{CanonicalDomain, SimplicialComplex};
use crate::error::{Error, Result};

/// Meshes a canonical domain with mesh size roughly `diameter / resolution`.
///
/// Square-like domains use a uniform grid with every square cut along the
/// `(0,0)-(1,1)` diagonal; the cube uses the 6-tetrahedron (Kuhn) split of
/// each grid cube. Curved boundaries are inscribed polygons whose vertex
/// count grows linearly with `resolution`.
pub fn generate(domain: CanonicalDomain, resolution: usize) -> Result<SimplicialComplex> {
    if resolution == 0 {
        return Err(Error::Parameter("resolution must be at least 1".into()));
    }
    domain.validate()?;
    let (dim, coords, cells) = match domain {
        CanonicalDomain::UnitSquare => grid_2d(1.0, 1.0, resolution, resolution, |_, _| true),
        CanonicalDomain::Rectangle { a, b } => {
            let (nx, ny) = if a >= b {
                (resolution, ((resolution as f64 * b / a).round() as usize).max(1))
            } else {
                (((resolution as f64 * a / b).round() as usize).max(1), resolution)
            };
            grid_2d(a, b, nx, ny, |_, _| true)
        }
        CanonicalDomain::LShape => {
            let n = 2 * resolution;
            grid_2d(1.0, 1.0, n, n, |i, j| i < resolution || j < resolution)
        }
        CanonicalDomain::Disk { radius } => disk(radius, resolution),
        CanonicalDomain::Annulus { inner, outer } => annulus(inner, outer, resolution),
        CanonicalDomain::UnitCube => cube(resolution),
    };
    let complex = SimplicialComplex::new(dim, coords, cells)?;
    Ok(complex.with_origin(domain, resolution))
}

type Raw = (usize, Vec<f64>, Vec<Vec<usize>>);

fn grid_2d(a: f64, b: f64, nx: usize, ny: usize, keep: impl Fn(usize, usize) -> bool) -> Raw {
    let mut index = vec![usize::MAX; (nx + 1) * (ny + 1)];
    let mut coords = Vec::new();
    let mut cells = Vec::new();
    let mut vid = |i: usize, j: usize, coords: &mut Vec<f64>| {
        let k = j * (nx + 1) + i;
        if index[k] == usize::MAX {
            index[k] = coords.len() / 2;
            coords.push(a * i as f64 / nx as f64);
            coords.push(b * j as f64 / ny as f64);
        }
        index[k]
    };
    // register vertices row by row so numbering is stable
    for j in 0..=ny {
        for i in 0..=nx {
            let used = [(i, j), (i.wrapping_sub(1), j), (i, j.wrapping_sub(1)), (i.wrapping_sub(1), j.wrapping_sub(1))]
                .iter()
                .any(|&(ci, cj)| ci < nx && cj < ny && keep(ci, cj));
            if used {
                vid(i, j, &mut coords);
            }
        }
    }
    for j in 0..ny {
        for i in 0..nx {
            if !keep(i, j) {
                continue;
            }
            let v00 = vid(i, j, &mut coords);
            let v10 = vid(i + 1, j, &mut coords);
            let v01 = vid(i, j + 1, &mut coords);
            let v11 = vid(i + 1, j + 1, &mut coords);
            cells.push(vec![v00, v10, v11]);
            cells.push(vec![v00, v11, v01]);
        }
    }
    (2, coords, cells)
}

/// Concentric rings at radii `R k / res` carrying `6k` vertices each.
fn disk(radius: f64, res: usize) -> Raw {
    let mut coords = vec![0.0, 0.0];
    let mut ring_start = vec![0usize];
    let mut ring_len = vec![1usize];
    for k in 1..=res {
        ring_start.push(coords.len() / 2);
        ring_len.push(6 * k);
        let r = radius * k as f64 / res as f64;
        for m in 0..6 * k {
            let t = 2.0 * PI * m as f64 / (6 * k) as f64;
            coords.push(r * t.cos());
            coords.push(r * t.sin());
        }
    }
    let mut cells = Vec::new();
    for k in 1..=res {
        stitch_rings(
            (ring_start[k - 1], ring_len[k - 1]),
            (ring_start[k], ring_len[k]),
            &mut cells,
        );
    }
    (2, coords, cells)
}

/// Uniform polar grid with roughly square cells.
fn annulus(inner: f64, outer: f64, res: usize) -> Raw {
    let layers = ((res as f64 * (outer - inner) / outer).ceil() as usize).max(1);
    let h = (outer - inner) / layers as f64;
    let nang = ((2.0 * PI * outer / h).round() as usize).max(8);
    let mut coords = Vec::new();
    for l in 0..=layers {
        let r = inner + h * l as f64;
        for m in 0..nang {
            let t = 2.0 * PI * m as f64 / nang as f64;
            coords.push(r * t.cos());
            coords.push(r * t.sin());
        }
    }
    let mut cells = Vec::new();
    for l in 0..layers {
        for m in 0..nang {
            let m1 = (m + 1) % nang;
            let a = l * nang + m;
            let b = l * nang + m1;
            let c = (l + 1) * nang + m;
            let d = (l + 1) * nang + m1;
            cells.push(vec![a, b, d]);
            cells.push(vec![a, d, c]);
        }
    }
    (2, coords, cells)
}

/// Triangulates the band between two closed vertex rings, merging by angle.
fn stitch_rings(inner: (usize, usize), outer: (usize, usize), cells: &mut Vec<Vec<usize>>) {
    let (is, il) = inner;
    let (os, ol) = outer;
    if il == 1 {
        for m in 0..ol {
            cells.push(vec![is, os + m, os + (m + 1) % ol]);
        }
        return;
    }
    // both rings start at angle 0; advance whichever next vertex has the smaller angle
    let (mut a, mut b) = (0usize, 0usize);
    while a < il || b < ol {
        let ta = (a + 1) as f64 / il as f64;
        let tb = (b + 1) as f64 / ol as f64;
        if b < ol && (a >= il || tb <= ta) {
            cells.push(vec![is + a % il, os + b, os + (b + 1) % ol]);
            b += 1;
        } else {
            cells.push(vec![is + a % il, os + b % ol, is + (a + 1) % il]);
            a += 1;
        }
    }
}

/// Kuhn subdivision: each grid cube splits into the six tetrahedra
/// `0 -> e_a -> e_a + e_b -> (1,1,1)` over permutations `(a, b, c)`.
fn cube(res: usize) -> Raw {
    let n = res;
    let id = |i: usize, j: usize, k: usize| (k * (n + 1) + j) * (n + 1) + i;
    let mut coords = Vec::with_capacity(3 * (n + 1).pow(3));
    for k in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                coords.extend([i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in PERMS {
                    let mut p = [i, j, k];
                    let mut tet = vec![id(p[0], p[1], p[2])];
                    for &axis in &perm {
                        p[axis] += 1;
                        tet.push(id(p[0], p[1], p[2]));
                    }
                    cells.push(tet);
                }
            }
        }
    }
    (3, coords, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_resolution_one() {
        let m = generate(CanonicalDomain::UnitSquare, 1).unwrap();
        assert_eq!(m.counts(), vec![4, 5, 2]);
        assert_eq!(m.euler_characteristic(), 1);
        let b = m.boundary_submesh();
        assert_eq!(b.faces.len(), 4);
        assert_eq!(b.components, 1);
    }

    #[test]
    fn unit_cube_resolution_one() {
        let m = generate(CanonicalDomain::UnitCube, 1).unwrap();
        assert_eq!(m.counts(), vec![8, 19, 18, 6]);
        assert_eq!(m.euler_characteristic(), 1);
        assert!((m.volume() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn square_counts_at_resolution_8() {
        let m = generate(CanonicalDomain::UnitSquare, 8).unwrap();
        assert_eq!(m.num_vertices(), 81);
        assert_eq!(m.num_cells(), 128);
        assert!((m.mesh_size() - 2f64.sqrt() / 8.0).abs() < 1e-14);
    }

    #[test]
    fn annulus_topology() {
        for res in [1, 3, 8] {
            let m = generate(CanonicalDomain::Annulus { inner: 0.5, outer: 1.0 }, res).unwrap();
            assert_eq!(m.euler_characteristic(), 0);
            assert_eq!(m.boundary_submesh().components, 2);
            assert_eq!(m.betti_numbers(), vec![1, 1, 0]);
        }
    }

    #[test]
    fn disk_and_l_shape_are_contractible() {
        for dom in [CanonicalDomain::Disk { radius: 1.0 }, CanonicalDomain::LShape] {
            for res in [1, 2, 5] {
                let m = generate(dom, res).unwrap();
                assert_eq!(m.euler_characteristic(), 1, "{dom:?} res {res}");
                assert_eq!(m.boundary_submesh().components, 1);
            }
        }
        let l = generate(CanonicalDomain::LShape, 4).unwrap();
        assert!((l.volume() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn disk_boundary_vertices_scale_with_resolution() {
        let m = generate(CanonicalDomain::Disk { radius: 2.0 }, 5).unwrap();
        let b = m.boundary_submesh();
        assert_eq!(b.simplices[0].len(), 30);
        for &v in &b.simplices[0] {
            let x = m.vertex(v);
            assert!((x[0].hypot(x[1]) - 2.0).abs() < 1e-12);
        }
        for c in 0..m.num_cells() {
            assert!(m.cell_volume(c) > 0.0);
        }
    }

    #[test]
    fn rectangle_aspect() {
        let m = generate(CanonicalDomain::Rectangle { a: 2.0, b: 1.0 }, 4).unwrap();
        assert_eq!(m.num_cells(), 2 * 4 * 2);
        assert!((m.volume() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate(CanonicalDomain::UnitSquare, 0).is_err());
        assert!(generate(CanonicalDomain::Annulus { inner: 1.0, outer: 1.0 }, 4).is_err());
    }
}

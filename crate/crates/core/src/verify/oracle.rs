//! Separation-of-variables spectra on rectangles, the cube and the disk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::OrderedSpectrum;
use crate::error::{Error, Result};
use crate::mesh::CanonicalDomain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Dirichlet,
    Neumann,
    MaxwellCavity,
}

impl std::str::FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Self::Dirichlet),
            "neumann" => Ok(Self::Neumann),
            "maxwell" | "maxwell_cavity" => Ok(Self::MaxwellCavity),
            other => Err(Error::Parameter(format!("unknown oracle kind `{other}`"))),
        }
    }
}

/// Bessel function `J_m(x)` from the periodic integral
/// `(1 / 2 pi) int_0^{2 pi} cos(m t - x sin t) dt`, evaluated with the
/// trapezoidal rule (exponentially convergent for periodic integrands).
pub fn bessel_j(m: u32, x: f64) -> f64 {
    let n = 64 + 2 * (x.abs() as usize + m as usize);
    let mf = m as f64;
    let sum: f64 = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            (mf * t - x * t.sin()).cos()
        })
        .sum();
    sum / n as f64
}

/// `J_m'(x)`.
pub fn bessel_j_prime(m: u32, x: f64) -> f64 {
    if m == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))
    }
}

/// Roots of `f` in `[start, limit]`, bracketed on a grid of step `0.05`
/// and refined by bisection to absolute `1e-12`.
fn roots_below(f: impl Fn(f64) -> f64, start: f64, limit: f64) -> Vec<f64> {
    const STEP: f64 = 0.05;
    let mut out = Vec::new();
    let mut a = start;
    let mut fa = f(a);
    while a < limit {
        let b = a + STEP;
        let fb = f(b);
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    out.retain(|&r| r <= limit);
    out
}

/// Zeros `j_{m,1} < j_{m,2} < ...` of `J_m` below `limit`.
pub fn bessel_zeros(m: u32, limit: f64) -> Vec<f64> {
    // j_{m,1} > m; below m, J_m is too small to bracket reliably
    roots_below(|x| bessel_j(m, x), (m as f64).max(0.05), limit)
}

/// Positive zeros of `J_m'` below `limit` (`x = 0` is excluded).
pub fn bessel_prime_zeros(m: u32, limit: f64) -> Vec<f64> {
    roots_below(|x| bessel_j_prime(m, x), (m as f64).max(0.05), limit)
}

/// First `k` eigenvalues of the requested problem, with multiplicity.
///
/// Candidates are enumerated up to a bound of four times a Weyl-law
/// estimate of the `k`-th value; the bound is quadrupled until at least `k`
/// values lie below it, so the returned prefix is complete.
pub fn closed_form_spectrum(domain: &CanonicalDomain, kind: OracleKind, k: usize) -> Result<OrderedSpectrum> {
    domain.validate()?;
    let (measure, dim) = match *domain {
        CanonicalDomain::UnitSquare => (1.0, 2),
        CanonicalDomain::Rectangle { a, b } => (a * b, 2),
        CanonicalDomain::Disk { radius } => (PI * radius * radius, 2),
        CanonicalDomain::UnitCube => (1.0, 3),
        _ => return Err(Error::Unsupported(format!("no closed-form spectrum on {}", domain.name()))),
    };
    if kind == OracleKind::MaxwellCavity && dim != 3 {
        return Err(Error::Unsupported("the Maxwell cavity oracle is defined on the cube only".into()));
    }
    if k == 0 {
        return Ok(OrderedSpectrum::oracle(Vec::new(), Some(Vec::new())));
    }
    // Weyl: N(T) ~ measure * T / (4 pi) in 2D, measure * T^{3/2} / (6 pi^2) in 3D
    let weyl = if dim == 2 { 4.0 * PI * k as f64 / measure } else { (6.0 * PI * PI * k as f64 / measure).powf(2.0 / 3.0) };
    let mut bound = 4.0 * weyl.max(PI * PI);
    loop {
        let mut found = enumerate(domain, kind, bound);
        if found.len() >= k {
            found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            found.truncate(k);
            let (values, labels) = found.into_iter().unzip();
            return Ok(OrderedSpectrum::oracle(values, Some(labels)));
        }
        bound *= 4.0;
    }
}

fn enumerate(domain: &CanonicalDomain, kind: OracleKind, bound: f64) -> Vec<(f64, String)> {
    let start = if kind == OracleKind::Dirichlet { 1 } else { 0 };
    let mut out = Vec::new();
    match *domain {
        CanonicalDomain::UnitSquare | CanonicalDomain::Rectangle { .. } => {
            let (a, b) = match *domain {
                CanonicalDomain::Rectangle { a, b } => (a, b),
                _ => (1.0, 1.0),
            };
            let jmax = (a * bound.sqrt() / PI) as usize + 1;
            let kmax = (b * bound.sqrt() / PI) as usize + 1;
            for j in start..=jmax {
                for l in start..=kmax {
                    let v = PI * PI * ((j * j) as f64 / (a * a) + (l * l) as f64 / (b * b));
                    if v <= bound {
                        out.push((v, format!("j={j},k={l}")));
                    }
                }
            }
        }
        CanonicalDomain::UnitCube => {
            let max = (bound.sqrt() / PI) as usize + 1;
            for i in start..=max {
                for j in start..=max {
                    for l in start..=max {
                        let idx = [i, j, l];
                        let nonzero = idx.iter().filter(|&&t| t > 0).count();
                        let mult = match kind {
                            OracleKind::MaxwellCavity if nonzero < 2 => 0,
                            OracleKind::MaxwellCavity if nonzero == 3 => 2,
                            _ => 1,
                        };
                        let v = PI * PI * (i * i + j * j + l * l) as f64;
                        if v <= bound {
                            for _ in 0..mult {
                                out.push((v, format!("i={i},j={j},k={l}")));
                            }
                        }
                    }
                }
            }
        }
        CanonicalDomain::Disk { radius } => {
            let limit = radius * bound.sqrt();
            if kind == OracleKind::Neumann {
                out.push((0.0, "m=0,s=0".to_string()));
            }
            for m in 0u32.. {
                // the first zero of J_m and J_m' exceeds m
                if m as f64 > limit {
                    break;
                }
                let zeros = match kind {
                    OracleKind::Neumann => bessel_prime_zeros(m, limit),
                    _ => bessel_zeros(m, limit),
                };
                for (s, z) in zeros.iter().enumerate() {
                    let v = (z / radius).powi(2);
                    for _ in 0..if m == 0 { 1 } else { 2 } {
                        out.push((v, format!("m={m},s={}", s + 1)));
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// `#{oracle eigenvalues <= t}`, for Weyl-law sanity checks.
pub fn counting_function(domain: &CanonicalDomain, kind: OracleKind, t: f64) -> usize {
    enumerate(domain, kind, t).len()
}

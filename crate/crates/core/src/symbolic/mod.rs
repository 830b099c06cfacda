//! Exact exterior calculus on Euclidean `R^n` with the standard orientation.
//!
//! Forms are sums `f_I dx^I` over ascending index sets `I` with [`Expr`]
//! coefficients. Conventions: `*dx^I = sign(I, I^c) dx^{I^c}`,
//! `delta = (-1)^{n(p+1)+1} * d *` on `p`-forms and `Laplacian = delta d + d delta`,
//! which makes the Laplacian on functions equal to `-sum_i d^2/dx_i^2`.
//! Boundary traces are taken on a coordinate hyperplane `x_axis = 0`.

mod expr;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

pub use expr::{Coefficient, Expr, Factor, Monomial, Trig};

use crate::error::{Error, Result};

/// Largest supported ambient dimension (index sets are bitmasks).
pub const MAX_DIM: usize = 16;

fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// `(-1)^k` as a sign flag: true means negative.
fn parity(k: u32) -> bool {
    k % 2 == 1
}

/// Number of pairs `(i in a, j in b)` with `j < i`.
fn inversions(a: u32, b: u32) -> u32 {
    indices(a).iter().map(|&i| (b & ((1u32 << i) - 1)).count_ones()).sum()
}

/// Differential form with exact coefficients on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicForm<S> {
    n: usize,
    terms: BTreeMap<u32, Expr<S>>,
}

impl<S: Coefficient> SymbolicForm<S> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_DIM, "ambient dimension {n} exceeds {MAX_DIM}");
        Self { n, terms: BTreeMap::new() }
    }

    /// `f dx^{i_1} ^ .. ^ dx^{i_p}` for 0-based axes; the axes are sorted and the
    /// orientation sign applied. Repeated axes give the zero form.
    pub fn term(coefficient: Expr<S>, axes: &[usize]) -> Self {
        let n = coefficient.dim();
        let mut out = Self::zero(n);
        let mut mask = 0u32;
        let mut negative = false;
        for &a in axes {
            assert!(a < n, "axis {a} out of range for dimension {n}");
            if mask >> a & 1 == 1 {
                return out;
            }
            negative ^= parity((mask >> a).count_ones());
            mask |= 1 << a;
        }
        out.accumulate(mask, if negative { -coefficient } else { coefficient });
        out
    }

    pub fn function(f: Expr<S>) -> Self {
        Self::term(f, &[])
    }

    /// `dx^{i_1} ^ .. ^ dx^{i_p}`.
    pub fn basis(n: usize, axes: &[usize]) -> Self {
        Self::term(Expr::one(n), axes)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of a homogeneous nonzero form.
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|m| m.count_ones() as usize);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Homogeneous degree-`p` component.
    pub fn part(&self, p: usize) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().filter(|(m, _)| m.count_ones() as usize == p).map(|(&m, e)| (m, e.clone())).collect(),
        }
    }

    /// `(axes, coefficient)` pairs with ascending 0-based axes.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Expr<S>)> {
        self.terms.iter().map(|(&m, e)| (indices(m), e))
    }

    pub fn coefficient(&self, axes: &[usize]) -> Expr<S> {
        let mask = axes.iter().fold(0u32, |m, &a| m | 1 << a);
        self.terms.get(&mask).cloned().unwrap_or_else(|| Expr::zero(self.n))
    }

    fn accumulate(&mut self, mask: u32, e: Expr<S>) {
        if e.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&mask) {
            Some(old) => &old + &e,
            None => e,
        };
        if !sum.is_zero() {
            self.terms.insert(mask, sum);
        }
    }

    fn map_coefficients(&self, f: impl Fn(&Expr<S>) -> Expr<S>) -> Self {
        let mut out = Self::zero(self.n);
        for (&m, e) in &self.terms {
            out.accumulate(m, f(e));
        }
        out
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_function(&self, f: &Expr<S>) -> Self {
        self.map_coefficients(|e| e * f)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(format!("wedge of forms on R^{} and R^{}", self.n, other.n)));
        }
        let mut out = Self::zero(self.n);
        for (&a, ea) in &self.terms {
            for (&b, eb) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let prod = ea * eb;
                out.accumulate(a | b, if parity(inversions(a, b)) { -prod } else { prod });
            }
        }
        Ok(out)
    }

    pub fn exterior_derivative(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (&m, e) in &self.terms {
            for i in (0..self.n).filter(|&i| m >> i & 1 == 0) {
                let de = e.derivative(i);
                let sign = parity((m & ((1u32 << i) - 1)).count_ones());
                out.accumulate(m | 1 << i, if sign { -de } else { de });
            }
        }
        out
    }

    pub fn hodge_star(&self) -> Self {
        let full = (1u32 << self.n) - 1;
        let mut out = Self::zero(self.n);
        for (&m, e) in &self.terms {
            let c = full & !m;
            out.accumulate(c, if parity(inversions(m, c)) { -e } else { e.clone() });
        }
        out
    }

    /// `delta = (-1)^{n(p+1)+1} * d *`, applied degree by degree; zero on functions.
    pub fn codifferential(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for p in 1..=n {
            let part = self.part(p);
            if part.is_zero() {
                continue;
            }
            let chain = part.hodge_star().exterior_derivative().hodge_star();
            let chain = if parity((n * (p + 1) + 1) as u32) { -chain } else { chain };
            out = out + chain;
        }
        out
    }

    /// `Delta = delta d + d delta`.
    pub fn hodge_laplacian(&self) -> Self {
        self.exterior_derivative().codifferential() + self.codifferential().exterior_derivative()
    }

    /// Pointwise restriction of all coefficients to `x_axis = 0`.
    pub fn restrict(&self, axis: usize) -> Self {
        self.map_coefficients(|e| e.restrict(axis))
    }

    /// Tangential and normal parts on the wall `x_axis = 0`: terms without
    /// `dx^axis` form the tangential trace, the remainder the normal part,
    /// both restricted to the wall. Their sum is the restriction of `self`.
    pub fn trace_split(&self, axis: usize) -> (Self, Self) {
        assert!(axis < self.n, "wall axis {axis} out of range for dimension {}", self.n);
        let mut t = Self::zero(self.n);
        let mut nrm = Self::zero(self.n);
        for (&m, e) in &self.terms {
            let target = if m >> axis & 1 == 1 { &mut nrm } else { &mut t };
            target.accumulate(m, e.restrict(axis));
        }
        (t, nrm)
    }

    /// Floating point evaluation of the coefficient of `dx^axes` at `x`.
    pub fn eval_coefficient(&self, axes: &[usize], x: &[f64]) -> f64 {
        self.coefficient(axes).eval(x)
    }
}

impl<S: Coefficient> Add for SymbolicForm<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.n, rhs.n, "forms over different dimensions");
        for (m, e) in rhs.terms {
            self.accumulate(m, e);
        }
        self
    }
}

impl<S: Coefficient> Neg for SymbolicForm<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map_coefficients(|e| -e)
    }
}

impl<S: Coefficient> Sub for SymbolicForm<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Coefficient> fmt::Display for SymbolicForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<u32> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&m| (m.count_ones(), indices(m)));
        for (k, m) in keys.into_iter().enumerate() {
            let e = &self.terms[&m];
            let basis = indices(m).iter().map(|i| format!("dx{}", i + 1)).collect::<Vec<_>>().join("^");
            let coef = match (e.as_constant(), basis.is_empty()) {
                (_, true) => e.to_string(),
                (Some(c), false) if c.is_one() => String::new(),
                (Some(c), false) if (-c.clone()).is_one() => "-".into(),
                _ if e.num_terms() > 1 => format!("({e}) "),
                _ => format!("{e} "),
            };
            let s = format!("{coef}{basis}");
            match (k, s.strip_prefix('-')) {
                (0, _) => write!(f, "{s}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {s}")?,
            }
        }
        Ok(())
    }
}

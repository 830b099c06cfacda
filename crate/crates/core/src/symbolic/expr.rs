//! Exact trig-polynomial coefficients in Cartesian coordinates.
//!
//! An [`Expr`] is a finite sum `c * pi^e * prod_i x_i^{k_i} * t_i(a_i pi x_i)`
//! where each `t_i` is `1`, `sin` or `cos` and each frequency `a_i` is a
//! positive rational. Products of trig factors in the same variable are
//! rewritten with the product-to-sum identities, so two expressions are equal
//! as functions iff their normal forms are equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Num, One, ToPrimitive, Zero};

/// Scalar field for expression coefficients.
pub trait Coefficient:
    Clone + PartialEq + Num + Neg<Output = Self> + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn from_rational(r: Rational64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coefficient for Rational64 {
    fn from_rational(r: Rational64) -> Self {
        r
    }
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

impl Coefficient for BigRational {
    fn from_rational(r: Rational64) -> Self {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }
    fn to_f64(&self) -> f64 {
        self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN)
    }
}

impl Coefficient for f64 {
    fn from_rational(r: Rational64) -> Self {
        *r.numer() as f64 / *r.denom() as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

/// Trigonometric factor in one variable; the frequency is in units of `pi`
/// and always positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    One,
    Sin(Rational64),
    Cos(Rational64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub pow: u32,
    pub trig: Trig,
}

const UNIT: Factor = Factor { pow: 0, trig: Trig::One };

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub pi: u32,
    pub factors: Vec<Factor>,
}

impl Monomial {
    fn unit(n: usize) -> Self {
        Self { pi: 0, factors: vec![UNIT; n] }
    }
}

fn sin_term(f: Rational64, w: Rational64) -> Option<(Rational64, Trig)> {
    if f.is_zero() {
        None
    } else if f < Rational64::zero() {
        Some((-w, Trig::Sin(-f)))
    } else {
        Some((w, Trig::Sin(f)))
    }
}

fn cos_term(f: Rational64, w: Rational64) -> (Rational64, Trig) {
    if f.is_zero() {
        (w, Trig::One)
    } else {
        (w, Trig::Cos(if f < Rational64::zero() { -f } else { f }))
    }
}

fn trig_product(a: Trig, b: Trig) -> Vec<(Rational64, Trig)> {
    use Trig::*;
    let half = Rational64::new(1, 2);
    match (a, b) {
        (One, t) | (t, One) => vec![(Rational64::one(), t)],
        (Sin(p), Sin(q)) => vec![cos_term(p - q, half), cos_term(p + q, -half)],
        (Cos(p), Cos(q)) => vec![cos_term(p - q, half), cos_term(p + q, half)],
        (Sin(p), Cos(q)) | (Cos(q), Sin(p)) => {
            sin_term(p + q, half).into_iter().chain(sin_term(p - q, half)).collect()
        }
    }
}

fn monomial_product(a: &Monomial, b: &Monomial) -> Vec<(Rational64, Monomial)> {
    let mut acc: Vec<(Rational64, Vec<Factor>)> = vec![(Rational64::one(), Vec::with_capacity(a.factors.len()))];
    for (fa, fb) in a.factors.iter().zip(&b.factors) {
        let pow = fa.pow + fb.pow;
        let options = trig_product(fa.trig, fb.trig);
        acc = acc
            .into_iter()
            .flat_map(|(w, fs)| {
                options.iter().map(move |&(v, trig)| {
                    let mut fs = fs.clone();
                    fs.push(Factor { pow, trig });
                    (w * v, fs)
                })
            })
            .collect();
    }
    acc.into_iter().map(|(w, factors)| (w, Monomial { pi: a.pi + b.pi, factors })).collect()
}

/// Exact coefficient function on `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr<S> {
    n: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Coefficient> Expr<S> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: S) -> Self {
        let mut e = Self::zero(n);
        e.accumulate(Monomial::unit(n), c);
        e
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, S::one())
    }

    pub fn integer(n: usize, k: i64) -> Self {
        Self::constant(n, S::from_rational(Rational64::from_integer(k)))
    }

    /// `pi^e`.
    pub fn pi_pow(n: usize, e: u32) -> Self {
        let mut m = Monomial::unit(n);
        m.pi = e;
        let mut out = Self::zero(n);
        out.accumulate(m, S::one());
        out
    }

    fn single(n: usize, axis: usize, f: Factor) -> Self {
        assert!(axis < n, "axis {axis} out of range for dimension {n}");
        let mut m = Monomial::unit(n);
        m.factors[axis] = f;
        let mut e = Self::zero(n);
        e.accumulate(m, S::one());
        e
    }

    /// `x_axis^k`.
    pub fn var_pow(n: usize, axis: usize, k: u32) -> Self {
        Self::single(n, axis, Factor { pow: k, trig: Trig::One })
    }

    pub fn var(n: usize, axis: usize) -> Self {
        Self::var_pow(n, axis, 1)
    }

    /// `sin(a pi x_axis)`.
    pub fn sin(n: usize, axis: usize, a: Rational64) -> Self {
        match sin_term(a, Rational64::one()) {
            Some((w, trig)) => Self::single(n, axis, Factor { pow: 0, trig }).scale(&S::from_rational(w)),
            None => Self::zero(n),
        }
    }

    /// `cos(a pi x_axis)`.
    pub fn cos(n: usize, axis: usize, a: Rational64) -> Self {
        let (_, trig) = cos_term(a, Rational64::one());
        Self::single(n, axis, Factor { pow: 0, trig })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    /// Returns the constant value when the expression has no variable or
    /// `pi` dependence.
    pub fn as_constant(&self) -> Option<S> {
        match self.terms.len() {
            0 => Some(S::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.pi == 0 && m.factors.iter().all(|f| *f == UNIT)).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn accumulate(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.n, other.n, "expressions over different dimensions");
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n);
        for (m, v) in &self.terms {
            out.accumulate(m.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Partial derivative with respect to `x_axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let f = m.factors[axis];
            if f.pow > 0 {
                let mut dm = m.clone();
                dm.factors[axis].pow -= 1;
                out.accumulate(dm, c.clone() * S::from_rational(Rational64::from_integer(f.pow as i64)));
            }
            let (w, trig) = match f.trig {
                Trig::One => continue,
                Trig::Sin(a) => (a, Trig::Cos(a)),
                Trig::Cos(a) => (-a, Trig::Sin(a)),
            };
            let mut dm = m.clone();
            dm.pi += 1;
            dm.factors[axis].trig = trig;
            out.accumulate(dm, c.clone() * S::from_rational(w));
        }
        out
    }

    /// Restriction to the hyperplane `x_axis = 0`.
    pub fn restrict(&self, axis: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let f = m.factors[axis];
            if f.pow > 0 || matches!(f.trig, Trig::Sin(_)) {
                continue;
            }
            let mut rm = m.clone();
            rm.factors[axis] = UNIT;
            out.accumulate(rm, c.clone());
        }
        out
    }

    /// Floating point evaluation, for cross-checks.
    pub fn eval(&self, x: &[f64]) -> f64 {
        use std::f64::consts::PI;
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.to_f64() * PI.powi(m.pi as i32);
                for (f, &xi) in m.factors.iter().zip(x) {
                    v *= xi.powi(f.pow as i32);
                    v *= match f.trig {
                        Trig::One => 1.0,
                        Trig::Sin(a) => (Coefficient::to_f64(&a) * PI * xi).sin(),
                        Trig::Cos(a) => (Coefficient::to_f64(&a) * PI * xi).cos(),
                    };
                }
                v
            })
            .sum()
    }
}

impl<S: Coefficient> Add<&Expr<S>> for &Expr<S> {
    type Output = Expr<S>;
    fn add(self, rhs: &Expr<S>) -> Expr<S> {
        self.check_dim(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Coefficient> Neg for &Expr<S> {
    type Output = Expr<S>;
    fn neg(self) -> Expr<S> {
        Expr { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<S: Coefficient> Sub<&Expr<S>> for &Expr<S> {
    type Output = Expr<S>;
    fn sub(self, rhs: &Expr<S>) -> Expr<S> {
        self + &(-rhs)
    }
}

impl<S: Coefficient> Mul<&Expr<S>> for &Expr<S> {
    type Output = Expr<S>;
    fn mul(self, rhs: &Expr<S>) -> Expr<S> {
        self.check_dim(rhs);
        let mut out = Expr::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                for (w, m) in monomial_product(ma, mb) {
                    out.accumulate(m, ca.clone() * cb.clone() * S::from_rational(w));
                }
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl<S: Coefficient> $tr for Expr<S> {
            type Output = Expr<S>;
            fn $f(self, rhs: Expr<S>) -> Expr<S> {
                (&self).$f(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<S: Coefficient> Neg for Expr<S> {
    type Output = Expr<S>;
    fn neg(self) -> Expr<S> {
        -&self
    }
}

fn fmt_monomial<S: Coefficient>(m: &Monomial, c: &S) -> String {
    let mut parts = Vec::new();
    if m.pi == 1 {
        parts.push("pi".to_string());
    } else if m.pi > 1 {
        parts.push(format!("pi^{}", m.pi));
    }
    for (i, f) in m.factors.iter().enumerate() {
        let x = format!("x{}", i + 1);
        match f.pow {
            0 => {}
            1 => parts.push(x.clone()),
            k => parts.push(format!("{x}^{k}")),
        }
        let arg = |a: Rational64| if a.is_one() { format!("pi*{x}") } else { format!("{a}*pi*{x}") };
        match f.trig {
            Trig::One => {}
            Trig::Sin(a) => parts.push(format!("sin({})", arg(a))),
            Trig::Cos(a) => parts.push(format!("cos({})", arg(a))),
        }
    }
    if parts.is_empty() {
        return c.to_string();
    }
    let body = parts.join("*");
    if c.is_one() {
        body
    } else if (-c.clone()).is_one() {
        format!("-{body}")
    } else {
        format!("{c}*{body}")
    }
}

impl<S: Coefficient> fmt::Display for Expr<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let s = fmt_monomial(m, c);
            match (k, s.strip_prefix('-')) {
                (0, _) => write!(f, "{s}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {s}")?,
            }
        }
        Ok(())
    }
}

//! Sparse bivariate polynomials over floating or exact complex coefficients.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::gauss::GaussRat;

/// Coefficient ring used by jets: `Complex64` or exact `GaussRat`.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    /// Exactly zero; used for storage pruning.
    fn is_zero(&self) -> bool;
    /// Zero for template matching: exact zero, or modulus below `1e-12` for floats.
    fn negligible(&self) -> bool;
    fn to_c64(&self) -> Complex64;
    const EXACT: bool;
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Complex64::new(n as f64 / d as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn negligible(&self) -> bool {
        self.norm() < 1e-12
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    const EXACT: bool = false;
}

impl Coeff for GaussRat {
    fn zero() -> Self {
        GaussRat::zero()
    }
    fn one() -> Self {
        GaussRat::one()
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        GaussRat::from_ratio(n, d)
    }
    fn is_zero(&self) -> bool {
        GaussRat::is_zero(self)
    }
    fn negligible(&self) -> bool {
        GaussRat::is_zero(self)
    }
    fn to_c64(&self) -> Complex64 {
        GaussRat::to_c64(self)
    }
    const EXACT: bool = true;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<C: Coeff> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Coeff> Default for Poly<C> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<C: Coeff> Poly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(i: u32, j: u32, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, C::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, C::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (i, j, c) in it {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: C) {
        if c.is_zero() {
            return;
        }
        let key = (i, j);
        let v = match self.terms.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &C)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    /// Lowest total degree of a nonzero term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    pub fn degree_x(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn degree_y(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// Smallest exponent of `x` among nonzero terms.
    pub fn min_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).min()
    }

    pub fn min_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).min()
    }

    pub fn map<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> Poly<D> {
        Poly::from_terms(self.terms().map(|(i, j, c)| (i, j, f(c))))
    }

    pub fn scale(&self, s: &C) -> Self {
        self.map(|c| c.clone() * s.clone())
    }

    pub fn truncate(&self, order: u32) -> Self {
        Poly { terms: self.terms.iter().filter(|(&(i, j), _)| i + j <= order).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn homogeneous(&self, deg: u32) -> Self {
        Poly { terms: self.terms.iter().filter(|(&(i, j), _)| i + j == deg).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn mul_trunc(&self, other: &Self, order: Option<u32>) -> Self {
        let mut out = Self::zero();
        for (i1, j1, c1) in self.terms() {
            for (i2, j2, c2) in other.terms() {
                if let Some(o) = order {
                    if i1 + i2 + j1 + j2 > o {
                        continue;
                    }
                }
                out.add_term(i1 + i2, j1 + j2, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn pow_trunc(&self, e: u32, order: Option<u32>) -> Self {
        let mut acc = Self::constant(C::one());
        for _ in 0..e {
            acc = acc.mul_trunc(self, order);
        }
        acc
    }

    pub fn deriv_x(&self) -> Self {
        Self::from_terms(self.terms().filter(|t| t.0 > 0).map(|(i, j, c)| (i - 1, j, c.clone() * C::from_ratio(i as i64, 1))))
    }

    pub fn deriv_y(&self) -> Self {
        Self::from_terms(self.terms().filter(|t| t.1 > 0).map(|(i, j, c)| (i, j - 1, c.clone() * C::from_ratio(j as i64, 1))))
    }

    /// Substitutes `x -> px`, `y -> py`, dropping terms above `order`.
    pub fn compose(&self, px: &Self, py: &Self, order: Option<u32>) -> Self {
        let mut xp = vec![Self::constant(C::one())];
        for i in 1..=self.degree_x() as usize {
            let next = xp[i - 1].mul_trunc(px, order);
            xp.push(next);
        }
        let mut yp = vec![Self::constant(C::one())];
        for j in 1..=self.degree_y() as usize {
            let next = yp[j - 1].mul_trunc(py, order);
            yp.push(next);
        }
        let mut out = Self::zero();
        for (i, j, c) in self.terms() {
            let t = xp[i as usize].mul_trunc(&yp[j as usize], order).scale(c);
            out = out + t;
        }
        out
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (i, j, c) in self.terms() {
            s += c.to_c64() * x.powu(i) * y.powu(j);
        }
        s
    }

    pub fn to_c64(&self) -> Poly<Complex64> {
        self.map(|c| c.to_c64())
    }

    /// Divides by `x^i y^j`; every term must be divisible.
    pub fn div_monomial(&self, i: u32, j: u32) -> Option<Self> {
        let mut out = Self::zero();
        for (a, b, c) in self.terms() {
            if a < i || b < j {
                return None;
            }
            out.add_term(a - i, b - j, c.clone());
        }
        Some(out)
    }
}

impl<C: Coeff> Add for Poly<C> {
    type Output = Poly<C>;
    fn add(mut self, o: Poly<C>) -> Poly<C> {
        for ((i, j), c) in o.terms {
            self.add_term(i, j, c);
        }
        self
    }
}

impl<C: Coeff> Sub for Poly<C> {
    type Output = Poly<C>;
    fn sub(self, o: Poly<C>) -> Poly<C> {
        self + (-o)
    }
}

impl<C: Coeff> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        Poly { terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect() }
    }
}

impl<C: Coeff> Mul for &Poly<C> {
    type Output = Poly<C>;
    fn mul(self, o: &Poly<C>) -> Poly<C> {
        self.mul_trunc(o, None)
    }
}

/// Precomputed floating evaluator for a polynomial map.
#[derive(Clone, Debug)]
pub struct FastPoly {
    terms: Vec<(usize, usize, Complex64)>,
    dx: usize,
    dy: usize,
}

impl FastPoly {
    pub fn new<C: Coeff>(p: &Poly<C>) -> Self {
        let terms: Vec<_> = p.terms().map(|(i, j, c)| (i as usize, j as usize, c.to_c64())).collect();
        FastPoly { dx: p.degree_x() as usize, dy: p.degree_y() as usize, terms }
    }

    pub fn eval(&self, x: Complex64, y: Complex64, xp: &mut Vec<Complex64>, yp: &mut Vec<Complex64>) -> Complex64 {
        powers(x, self.dx, xp);
        powers(y, self.dy, yp);
        let mut s = Complex64::new(0.0, 0.0);
        for &(i, j, c) in &self.terms {
            s += c * xp[i] * yp[j];
        }
        s
    }
}

pub(crate) fn powers(x: Complex64, n: usize, out: &mut Vec<Complex64>) {
    out.clear();
    out.push(Complex64::new(1.0, 0.0));
    for k in 1..=n {
        let v = out[k - 1] * x;
        out.push(v);
    }
}

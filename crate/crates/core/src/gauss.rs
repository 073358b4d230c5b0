//! Gaussian rationals `Q(i)` over arbitrary-precision integers.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn zero() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        GaussRat::new(BigRational::new(n.into(), d.into()), BigRational::zero())
    }

    pub fn from_parts(rn: i64, rd: i64, in_: i64, id: i64) -> Self {
        GaussRat::new(BigRational::new(rn.into(), rd.into()), BigRational::new(in_.into(), id.into()))
    }

    /// Parses four integer strings `re_num, re_den, im_num, im_den`.
    pub fn parse(parts: [&str; 4]) -> Result<Self> {
        let mut v = Vec::with_capacity(4);
        for s in parts {
            let n: BigInt = s.trim().parse().map_err(|_| Error::Parse(format!("bad integer '{s}'")))?;
            v.push(n);
        }
        if v[1].is_zero() || v[3].is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(GaussRat::new(
            BigRational::new(v[0].clone(), v[1].clone()),
            BigRational::new(v[2].clone(), v[3].clone()),
        ))
    }

    pub fn to_strings(&self) -> [String; 4] {
        [
            self.re.numer().to_string(),
            self.re.denom().to_string(),
            self.im.numer().to_string(),
            self.im.denom().to_string(),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        GaussRat::new(&self.re / &n, -&self.im / &n)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Square root inside `Q(i)` when it exists.
    pub fn sqrt_exact(&self) -> Option<GaussRat> {
        if self.im.is_zero() {
            return if self.re.is_negative() {
                rational_sqrt(&-self.re.clone()).map(|r| GaussRat::new(BigRational::zero(), r))
            } else {
                rational_sqrt(&self.re).map(|r| GaussRat::new(r, BigRational::zero()))
            };
        }
        let modulus = rational_sqrt(&self.norm_sqr())?;
        let two = BigRational::from_integer(2.into());
        let p = rational_sqrt(&((&self.re + &modulus) / &two))?;
        let q = &self.im / (&two * &p);
        Some(GaussRat::new(p, q))
    }

    /// Best Gaussian rational with denominators at most `max_den` near `z`.
    pub fn approximate(z: Complex64, max_den: i64) -> Option<GaussRat> {
        Some(GaussRat::new(approx_rational(z.re, max_den)?, approx_rational(z.im, max_den)?))
    }
}

pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Continued-fraction approximation with bounded denominator.
fn approx_rational(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac.abs() < 1e-13 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", self.re, -self.im.clone())
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

impl Add for GaussRat {
    type Output = GaussRat;
    fn add(self, o: GaussRat) -> GaussRat {
        GaussRat::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussRat {
    type Output = GaussRat;
    fn sub(self, o: GaussRat) -> GaussRat {
        GaussRat::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussRat {
    type Output = GaussRat;
    fn mul(self, o: GaussRat) -> GaussRat {
        GaussRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Div for GaussRat {
    type Output = GaussRat;
    fn div(self, o: GaussRat) -> GaussRat {
        self * o.inv()
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussRat::from_parts(1, 2, 3, 4);
        let b = GaussRat::from_parts(-2, 3, 1, 5);
        let q = a.clone() / b.clone();
        assert_eq!(q * b, a.clone());
        assert_eq!(a.clone() - a.clone(), GaussRat::zero());
        assert_eq!(GaussRat::i() * GaussRat::i(), GaussRat::from_int(-1));
    }

    #[test]
    fn exact_roots() {
        assert_eq!(GaussRat::from_ratio(9, 4).sqrt_exact(), Some(GaussRat::from_ratio(3, 2)));
        assert_eq!(GaussRat::from_int(-4).sqrt_exact(), Some(GaussRat::from_parts(0, 1, 2, 1)));
        assert!(GaussRat::from_int(2).sqrt_exact().is_none());
        let z = GaussRat::from_parts(3, 1, 4, 1);
        let r = z.sqrt_exact().unwrap();
        assert_eq!(r.clone() * r, z);
        assert!(GaussRat::i().sqrt_exact().is_none());
    }

    #[test]
    fn parse_roundtrip() {
        let z = GaussRat::from_parts(-7, 3, 5, 11);
        let s = z.to_strings();
        let back = GaussRat::parse([&s[0], &s[1], &s[2], &s[3]]).unwrap();
        assert_eq!(back, z);
        assert!(GaussRat::parse(["1", "0", "0", "1"]).is_err());
    }

    #[test]
    fn approximation() {
        let z = GaussRat::approximate(Complex64::new(-1.0 / 3.0, 2.5), 1000).unwrap();
        assert_eq!(z, GaussRat::from_parts(-1, 3, 5, 2));
    }
}

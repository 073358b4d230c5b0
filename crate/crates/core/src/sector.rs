//! Branch-correct powers, sectors and petal domains.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `exp(lam * Log z)` with the principal logarithm.
pub fn principal_power(z: Complex64, lam: Complex64) -> Result<Complex64> {
    if on_slit(z) {
        return Err(Error::BranchCut(format!("{z}")));
    }
    Ok((lam * z.ln()).exp())
}

fn on_slit(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectorKind {
    AttractingCore,
    AttractingExtended,
    RepellingCore,
    RepellingExtended,
}

impl SectorKind {
    fn extended(self) -> bool {
        matches!(self, SectorKind::AttractingExtended | SectorKind::RepellingExtended)
    }

    fn repelling(self) -> bool {
        matches!(self, SectorKind::RepellingCore | SectorKind::RepellingExtended)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub epsilon: f64,
    pub theta: f64,
    pub d: u32,
    pub kind: SectorKind,
    pub k: u32,
}

impl SectorSpec {
    pub fn new(epsilon: f64, theta: f64, d: u32, kind: SectorKind, k: u32) -> Result<Self> {
        let spec = SectorSpec { epsilon, theta, d, kind, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        if !(self.theta > 0.0 && self.theta < PI / 2.0) {
            return Err(Error::InvalidParameter("theta must lie in (0, pi/2)".into()));
        }
        if self.d == 0 || self.k >= self.d {
            return Err(Error::InvalidParameter("need d >= 1 and 0 <= k < d".into()));
        }
        Ok(())
    }

    /// Argument of the ray bisecting the component.
    pub fn bisector(&self) -> f64 {
        let base = if self.kind.repelling() { PI } else { 0.0 };
        (base + 2.0 * PI * self.k as f64) / self.d as f64
    }

    /// Largest modulus of `z^d` inside the set along argument `phi` of `z^d`
    /// measured from the bisector, or `None` when the ray misses the set.
    pub fn max_radius(&self, phi: f64) -> Option<f64> {
        max_radius(self.epsilon, self.theta, self.kind.extended(), phi)
    }
}

pub(crate) fn max_radius(epsilon: f64, theta: f64, extended: bool, phi: f64) -> Option<f64> {
    let a = phi.abs();
    if a < theta {
        return Some(epsilon);
    }
    if extended && a - theta < PI / 2.0 {
        return Some(epsilon * (a - theta).cos());
    }
    None
}

/// Polar membership test in the `z^d` plane, `phi` measured from the bisector.
pub(crate) fn in_polar_sector(r: f64, phi: f64, epsilon: f64, theta: f64, extended: bool) -> bool {
    if r <= 0.0 {
        return false;
    }
    match max_radius(epsilon, theta, extended, phi) {
        Some(rmax) => r < rmax,
        None => false,
    }
}

/// Argument of `z^d` relative to the bisector of component `k`, or `None`
/// when `z` lies outside the angular slot of that component.
pub(crate) fn relative_angle(z: Complex64, spec: &SectorSpec) -> Option<f64> {
    let zeta = z * Complex64::from_polar(1.0, -spec.bisector());
    let arg = zeta.arg();
    let d = spec.d as f64;
    if arg.abs() >= PI / d {
        return None;
    }
    Some(arg * d)
}

pub fn sector_membership(z: Complex64, spec: &SectorSpec) -> bool {
    sector_membership_scaled(z, spec, 1.0)
}

/// Membership with the angular extent multiplied by `opening_scale`.
pub fn sector_membership_scaled(z: Complex64, spec: &SectorSpec, opening_scale: f64) -> bool {
    if z == Complex64::new(0.0, 0.0) {
        return false;
    }
    let Some(phi) = relative_angle(z, spec) else {
        return false;
    };
    let r = z.norm().powi(spec.d as i32);
    in_polar_sector(r, phi / opening_scale, spec.epsilon, spec.theta, spec.kind.extended())
}

/// Minimal nonnegative `(p, q)` with `q m - p n = 1`.
pub fn bezout_exponents(m: u32, n: u32) -> Result<(u32, u32)> {
    if m == 0 || m.gcd(&n) != 1 {
        return Err(Error::NotCoprime(m, n));
    }
    if n == 0 {
        return Ok((0, 1));
    }
    let (m64, n64) = (m as i64, n as i64);
    let e = m64.extended_gcd(&n64);
    let mut q = e.x.rem_euclid(n64);
    if q == 0 {
        q = n64;
    }
    let p = (q * m64 - 1) / n64;
    Ok((p as u32, q as u32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct PetalParams {
    pub M: u32,
    pub N: u32,
    pub d: u32,
    pub m: u32,
    pub n: u32,
    pub p: u32,
    pub q: u32,
    pub lambda: Complex64,
    pub gamma: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub k: u32,
}

impl PetalParams {
    #[allow(non_snake_case)]
    pub fn new(M: u32, N: u32, a: Complex64, b: Complex64, gamma: Option<f64>, k: u32) -> Result<Self> {
        if M == 0 {
            return Err(Error::InvalidParameter("M must be positive".into()));
        }
        let d = if N == 0 { M } else { M.gcd(&N) };
        let (m, n) = (M / d, N / d);
        let (p, q) = bezout_exponents(m, n)?;
        let s = a * M as f64 + b * N as f64;
        if (s + 1.0).norm() > 1e-9 {
            return Err(Error::InvalidParameter(format!("aM + bN = {s}, expected -1")));
        }
        if !(a.re < 0.0 && b.re < 0.0) {
            return Err(Error::InvalidParameter("need Re a < 0 and Re b < 0".into()));
        }
        if k >= d {
            return Err(Error::InvalidParameter("petal index out of range".into()));
        }
        let df = d as f64;
        let gamma = match gamma {
            Some(g) => g,
            None => {
                let g = (-a.re).min(-b.re) * df / 2.0;
                g.clamp(f64::MIN_POSITIVE, df * (1.0 - 1e-12))
            }
        };
        if !(gamma > 0.0 && a.re + gamma / df < 0.0 && b.re + gamma / df < 0.0) {
            return Err(Error::InvalidParameter(format!("gamma = {gamma} violates Re a + gamma/d < 0 or Re b + gamma/d < 0")));
        }
        let lambda = (a * p as f64 + b * q as f64) * df;
        Ok(PetalParams { M, N, d, m, n, p, q, lambda, gamma, a, b, k })
    }

    /// The weight `min(1, n)` in front of `x` in the domain inequalities.
    pub fn x_weight(&self) -> f64 {
        self.n.min(1) as f64
    }

    pub fn with_petal(&self, k: u32) -> Result<Self> {
        if k >= self.d {
            return Err(Error::InvalidParameter("petal index out of range".into()));
        }
        Ok(PetalParams { k, ..*self })
    }

    /// `x^m y^n`.
    pub fn product(&self, x: Complex64, y: Complex64) -> Complex64 {
        x.powu(self.m) * y.powu(self.n)
    }

    /// First chart coordinate `1 / (x^m y^n)^d`.
    pub fn chart_z(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.product(x, y).powu(self.d).inv()
    }

    fn rotation(&self) -> f64 {
        2.0 * PI * self.k as f64 / self.d as f64
    }

    /// `(x^m y^n)^lambda` on petal `k`.
    pub fn product_power(&self, s: Complex64) -> Result<Complex64> {
        let rot = self.rotation();
        let base = principal_power(s * Complex64::from_polar(1.0, -rot), self.lambda)?;
        Ok(base * (Complex64::new(0.0, rot) * self.lambda).exp())
    }

    /// Point of the fibre `{x^m y^n = s_k(z)}` on which `g` takes the value `v`.
    pub fn chart_inverse_g(&self, z: Complex64, v: Complex64) -> Result<(Complex64, Complex64)> {
        let za = principal_power(z, self.a)?;
        let zb = principal_power(z, self.b)?;
        let k = self.k as f64;
        let rx = (Complex64::new(0.0, -2.0 * PI * k) * self.a).exp();
        let ry = (Complex64::new(0.0, -2.0 * PI * k) * self.b).exp();
        let x = za * v.powi(-(self.n as i32)) * rx;
        let y = zb * v.powu(self.m) * ry;
        Ok((x, y))
    }
}

/// `g(x, y) = x^p y^q (x^m y^n)^lambda` on petal `k`.
pub fn branch_g(x: Complex64, y: Complex64, petal: &PetalParams) -> Result<Complex64> {
    let s = petal.product(x, y);
    let pw = petal.product_power(s)?;
    Ok(x.powu(petal.p) * y.powu(petal.q) * pw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    D,
    U,
    DTilde,
    DTildeRepelling,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub petal: PetalParams,
    pub epsilon: f64,
    pub theta: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub r: f64,
    pub kind: DomainKind,
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.delta > 0.0 && self.delta_prime > 0.0) {
            return Err(Error::InvalidParameter("epsilon, delta, delta' must be positive".into()));
        }
        if !(self.theta > 0.0 && self.theta < PI / 2.0) {
            return Err(Error::InvalidParameter("theta must lie in (0, pi/2)".into()));
        }
        if !(self.r > 0.0 && self.r < 1.0) {
            return Err(Error::InvalidParameter("r must lie in (0, 1)".into()));
        }
        if self.delta_prime > self.delta {
            return Err(Error::InvalidParameter("need delta' <= delta".into()));
        }
        Ok(())
    }

    pub fn with_kind(&self, kind: DomainKind) -> Self {
        DomainSpec { kind, ..*self }
    }

    pub fn sector(&self, kind: SectorKind) -> SectorSpec {
        SectorSpec { epsilon: self.epsilon, theta: self.theta, d: self.petal.d, kind, k: self.petal.k }
    }

    /// Inner radius `R_w` of the fibre of `V` over `w`.
    pub fn fiber_radius(&self, w: Complex64) -> f64 {
        let pt = &self.petal;
        let (d, m, n) = (pt.d as f64, pt.m as f64, pt.n as f64);
        let g = self.gamma();
        let mut r = 1.0 / self.epsilon;
        let t = (w.norm() / self.r).powf(-d * m / (d * pt.b.re + g));
        r = r.max(t);
        if pt.n >= 1 {
            let t = (self.r * w.norm()).powf(d * n / (d * pt.a.re + g));
            r = r.max(t);
        }
        r
    }

    fn gamma(&self) -> f64 {
        self.petal.gamma
    }
}

/// Evaluates the defining inequalities; for kind `V` the pair is `(z, w)`.
pub fn domain_membership(u: Complex64, v: Complex64, spec: &DomainSpec) -> bool {
    let pt = &spec.petal;
    let d = pt.d as f64;
    let ex = pt.x_weight();
    match spec.kind {
        DomainKind::D | DomainKind::U => {
            let (x, y) = (u, v);
            let s = pt.product(x, y);
            let ms = s.norm();
            if !(ms < spec.epsilon.powf(1.0 / d)) || ms == 0.0 {
                return false;
            }
            let rel = (s * Complex64::from_polar(1.0, -2.0 * PI * pt.k as f64 / d)).arg();
            if !(rel.abs() < spec.theta / d) {
                return false;
            }
            if spec.kind == DomainKind::D {
                (ex * x.norm()) < spec.delta && y.norm() < spec.delta
            } else {
                let bound = ms.powf(pt.gamma);
                ex * x.norm() <= bound && y.norm() <= bound
            }
        }
        DomainKind::DTilde | DomainKind::DTildeRepelling => {
            let (x, y) = (u, v);
            let kind = if spec.kind == DomainKind::DTilde {
                SectorKind::AttractingExtended
            } else {
                SectorKind::RepellingExtended
            };
            let sector = spec.sector(kind);
            sector_membership(pt.product(x, y), &sector)
                && ex * x.norm() < spec.delta_prime
                && y.norm() < spec.delta_prime
        }
        DomainKind::V => {
            let (z, w) = (u, v);
            let mz = z.norm();
            if !(mz > 1.0 / spec.epsilon) || !(z.arg().abs() < spec.theta) {
                return false;
            }
            let (m, n) = (pt.m as f64, pt.n as f64);
            let outer = spec.r * mz.powf(-pt.b.re / m - pt.gamma / (d * m));
            if !(w.norm() < outer) {
                return false;
            }
            if pt.n >= 1 {
                let inner = mz.powf(pt.a.re / n + pt.gamma / (d * n)) / spec.r;
                return inner < w.norm();
            }
            true
        }
    }
}

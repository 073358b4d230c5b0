//! Invariant function `psi_k`, the chart `phi_k` and fiberwise Fatou coordinates.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{decay_exponents, log_spaced, lstsq};
use crate::germ::{FastMap, FloatGerm, MapBuffers};
use crate::sector::{branch_g, domain_membership, DomainKind, DomainSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantValue {
    pub psi: Complex64,
    pub unit_factor: Complex64,
    pub tail_bound: f64,
    pub steps_used: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FatouChartValue {
    pub z: Complex64,
    pub w: Complex64,
    pub beta: Complex64,
    pub base_point: Complex64,
    pub error_estimate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberValue {
    pub beta: Complex64,
    pub base_point: Complex64,
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FatouOptions {
    pub psi_tol: f64,
    pub psi_max_steps: usize,
    /// Orbit length used for the fiber coordinate.
    pub horizon: usize,
    /// Number of correction exponents in the asymptotic fit.
    pub terms: usize,
    /// Lower bound `C_0` in the base-point rule `|p| = 2 max(R_w, C_0)`.
    pub base_constant: f64,
    /// Largest acceptable difference between the fits at two horizons.
    pub accept: f64,
}

impl Default for FatouOptions {
    fn default() -> Self {
        FatouOptions { psi_tol: 1e-12, psi_max_steps: 20_000, horizon: 1024, terms: 4, base_constant: 100.0, accept: 1e-7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionResult {
    pub j: u64,
    pub z: Complex64,
    pub residual: f64,
}

/// Everything needed to evaluate `phi_k`, its inverse and the Fatou coordinate
/// of one petal of a normalized corner-type germ.
pub struct FatouContext {
    pub germ: FloatGerm,
    pub domain: DomainSpec,
    pub options: FatouOptions,
    fast: FastMap,
    exponents: Vec<Complex64>,
}

impl FatouContext {
    pub fn new(germ: FloatGerm, domain: DomainSpec, options: FatouOptions) -> Result<Self> {
        domain.validate()?;
        let pt = &domain.petal;
        let exponents = decay_exponents(&germ, pt.M, pt.N, pt.a, pt.b, options.terms.max(1));
        let fast = germ.fast();
        Ok(FatouContext { germ, domain, options, fast, exponents })
    }

    pub fn exponents(&self) -> &[Complex64] {
        &self.exponents
    }

    pub fn step(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        self.fast.apply(x, y, &mut MapBuffers::default())
    }

    pub fn in_u(&self, x: Complex64, y: Complex64) -> bool {
        domain_membership(x, y, &self.domain.with_kind(DomainKind::U))
    }

    pub fn in_v(&self, z: Complex64, w: Complex64) -> bool {
        domain_membership(z, w, &self.domain.with_kind(DomainKind::V))
    }

    /// Random point of `V` with `|z|` in `(1.5/eps, 6/eps)`, `|arg z| < theta/2` and `w`
    /// away from the fiber bounds.
    pub fn sample_v(&self, rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
        let (pt, dom) = (&self.domain.petal, &self.domain);
        let d = pt.d as f64;
        loop {
            let mz = (1.5 / dom.epsilon) * 4f64.powf(rng.gen::<f64>());
            let z = Complex64::from_polar(mz, dom.theta * (rng.gen::<f64>() - 0.5));
            let outer = dom.r * mz.powf(-pt.b.re / pt.m as f64 - pt.gamma / (d * pt.m as f64)) / 1.25;
            let inner = if pt.n >= 1 { 1.25 * mz.powf(pt.a.re / pt.n as f64 + pt.gamma / (d * pt.n as f64)) / dom.r } else { outer * 1e-3 };
            if inner >= outer {
                continue;
            }
            let rw = inner * (outer / inner).powf(rng.gen::<f64>());
            let w = Complex64::from_polar(rw, 2.0 * std::f64::consts::PI * rng.gen::<f64>());
            if self.in_v(z, w) {
                return (z, w);
            }
        }
    }

    /// Points `phi_k^{-1}(z, w)` for seeded samples of `V`.
    pub fn sample_chart_points(&self, count: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut tries = 0;
        while out.len() < count && tries < 100 * count.max(1) {
            tries += 1;
            let (z, w) = self.sample_v(&mut rng);
            if let Ok(p) = self.chart_inverse(z, w) {
                out.push(p);
            }
        }
        out
    }

    /// `psi_k(x, y) = lim g(F^j(x, y))`.
    pub fn psi(&self, x: Complex64, y: Complex64) -> Result<InvariantValue> {
        if !self.in_u(x, y) {
            return Err(Error::NotInDomain(format!("({x}, {y}) is not in U_{}", self.domain.petal.k)));
        }
        let pt = &self.domain.petal;
        let mut buf = MapBuffers::default();
        let g0 = branch_g(x, y, pt)?;
        let (mut cx, mut cy, mut g) = (x, y, g0);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sums = Vec::new();
        let mut zs = Vec::new();
        let mut prev_l = f64::NAN;
        let opts = &self.options;
        for j in 1..=opts.psi_max_steps {
            let (nx, ny) = self.fast.apply(cx, cy, &mut buf);
            let ng = branch_g(nx, ny, pt)?;
            let r = ng / g;
            sum += r.ln();
            let l = (r - 1.0).norm();
            (cx, cy, g) = (nx, ny, ng);
            sums.push(sum);
            zs.push(pt.chart_z(cx, cy));
            let rho = l / prev_l;
            prev_l = l;
            if j >= 8 && (l == 0.0 || (rho < 1.0 && l / (1.0 - rho) < opts.psi_tol)) {
                let tail = if l == 0.0 { 0.0 } else { l / (1.0 - rho) };
                let u = sum.exp();
                return Ok(InvariantValue { psi: g0 * u, unit_factor: u, tail_bound: tail, steps_used: j });
            }
        }
        let (s_inf, err) = self.extrapolate_sum(&sums, &zs)?;
        if !(err < 1e3 * opts.psi_tol) {
            return Err(Error::NoConvergence(format!("psi tail estimate {err:e}")));
        }
        let u = s_inf.exp();
        Ok(InvariantValue { psi: g0 * u, unit_factor: u, tail_bound: err, steps_used: sums.len() })
    }

    fn extrapolate_sum(&self, sums: &[Complex64], zs: &[Complex64]) -> Result<(Complex64, f64)> {
        let fit = |top: usize| -> Option<Complex64> {
            let idx = log_spaced(top, 4, 4, 1);
            let rows: Vec<Vec<Complex64>> = idx
                .iter()
                .map(|&j| {
                    let z = zs[j - 1];
                    std::iter::once(Complex64::new(1.0, 0.0)).chain(self.exponents.iter().map(|s| (-s * z.ln()).exp())).collect()
                })
                .collect();
            let rhs: Vec<Complex64> = idx.iter().map(|&j| sums[j - 1]).collect();
            lstsq(&rows, &rhs).map(|c| c[0])
        };
        let n = sums.len();
        match (fit(n), fit(n / 2)) {
            (Some(a), Some(b)) => Ok((a, (a - b).norm())),
            _ => Err(Error::NoConvergence("psi extrapolation failed".into())),
        }
    }

    /// `phi_k(x, y) = (1/(x^m y^n)^d, psi_k(x, y))`.
    pub fn chart(&self, x: Complex64, y: Complex64) -> Result<(Complex64, InvariantValue)> {
        let v = self.psi(x, y)?;
        Ok((self.domain.petal.chart_z(x, y), v))
    }

    /// Point `(x, y)` with `phi_k(x, y) = (z, w)`.
    pub fn chart_inverse(&self, z: Complex64, w: Complex64) -> Result<(Complex64, Complex64)> {
        let pt = &self.domain.petal;
        let eval = |v: Complex64| -> Result<(Complex64, (Complex64, Complex64))> {
            let p = pt.chart_inverse_g(z, v)?;
            Ok((self.psi(p.0, p.1)?.psi - w, p))
        };
        let mut v = w;
        let (mut r, mut p) = eval(v)?;
        for _ in 0..40 {
            if r.norm() <= 1e-14 * w.norm() {
                return Ok(p);
            }
            let h = 1e-7 * v.norm().max(1e-300);
            let (rh, _) = eval(v + h)?;
            let dv = r * h / (rh - r);
            let mut t = 1.0;
            loop {
                match eval(v - dv * t) {
                    Ok((nr, np)) if nr.norm() < r.norm() => {
                        v -= dv * t;
                        (r, p) = (nr, np);
                        break;
                    }
                    _ if t > 1e-3 => t *= 0.5,
                    _ => return if r.norm() <= 1e-11 * w.norm() { Ok(p) } else { Err(Error::NoConvergence("chart inverse".into())) },
                }
            }
        }
        if r.norm() <= 1e-11 * w.norm() {
            Ok(p)
        } else {
            Err(Error::NoConvergence("chart inverse".into()))
        }
    }

    /// Fiber map `f_w(z)`: the first coordinate of `phi_k o F o phi_k^{-1}`.
    pub fn fiber_map(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let (x, y) = self.chart_inverse(z, w)?;
        let (x1, y1) = self.step(x, y);
        Ok(self.domain.petal.chart_z(x1, y1))
    }

    /// Base point `p` on the positive real axis of `V_w`.
    pub fn base_point(&self, w: Complex64) -> Complex64 {
        Complex64::new(2.0 * self.domain.fiber_radius(w).max(self.options.base_constant), 0.0)
    }

    fn orbit_z(&self, start: (Complex64, Complex64)) -> Vec<Complex64> {
        let pt = &self.domain.petal;
        let mut buf = MapBuffers::default();
        let (mut x, mut y) = start;
        let mut out = Vec::with_capacity(self.options.horizon + 1);
        out.push(pt.chart_z(x, y));
        for _ in 0..self.options.horizon {
            (x, y) = self.fast.apply(x, y, &mut buf);
            out.push(pt.chart_z(x, y));
        }
        out
    }

    fn fit_beta(&self, zs: &[Complex64], ps: &[Complex64]) -> Result<(Complex64, f64)> {
        let fit = |top: usize| -> Option<Complex64> {
            let idx = log_spaced(top, 4, 4, 1);
            let rows: Vec<Vec<Complex64>> = idx
                .iter()
                .map(|&j| {
                    let (z, p) = (zs[j], ps[j]);
                    std::iter::once(Complex64::new(1.0, 0.0))
                        .chain(self.exponents.iter().map(|s| {
                            if (s - 1.0).norm() < 1e-12 {
                                (z / p).ln()
                            } else {
                                let e = Complex64::new(1.0, 0.0) - s;
                                (e * z.ln()).exp() - (e * p.ln()).exp()
                            }
                        }))
                        .collect()
                })
                .collect();
            let rhs: Vec<Complex64> = idx.iter().map(|&j| zs[j] - ps[j]).collect();
            lstsq(&rows, &rhs).map(|c| c[0])
        };
        let top = self.options.horizon;
        match (fit(top), fit(top / 2)) {
            (Some(a), Some(b)) => Ok((a, (a - b).norm())),
            _ => Err(Error::NoConvergence("fatou fit failed".into())),
        }
    }

    fn beta_from_point(&self, start: (Complex64, Complex64), w: Complex64) -> Result<FiberValue> {
        let p = self.base_point(w);
        let zs = self.orbit_z(start);
        let q = self.chart_inverse(p, w)?;
        let ps = self.orbit_z(q);
        if zs.iter().chain(&ps).any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NoConvergence("orbit left the petal".into()));
        }
        let (beta, err) = self.fit_beta(&zs, &ps)?;
        if !(err < self.options.accept) {
            return Err(Error::SlowConvergence(err));
        }
        Ok(FiberValue { beta, base_point: p, error_estimate: err })
    }

    /// Fiberwise Fatou coordinate `beta_w(z)` normalized by `beta_w(p) = 0`.
    pub fn beta(&self, z: Complex64, w: Complex64) -> Result<FiberValue> {
        if !self.in_v(z, w) {
            return Err(Error::NotInDomain(format!("({z}, {w}) is not in V")));
        }
        let p = self.base_point(w);
        if z == p {
            return Ok(FiberValue { beta: Complex64::new(0.0, 0.0), base_point: p, error_estimate: 0.0 });
        }
        let q = self.chart_inverse(z, w)?;
        self.beta_from_point(q, w)
    }

    /// `Phi(phi_k(x, y))`.
    pub fn chart_value(&self, x: Complex64, y: Complex64) -> Result<FatouChartValue> {
        let (z, v) = self.chart(x, y)?;
        if !self.in_v(z, v.psi) {
            return Err(Error::NotInDomain(format!("phi({x}, {y}) is not in V")));
        }
        let fv = self.beta_from_point((x, y), v.psi)?;
        Ok(FatouChartValue { z, w: v.psi, beta: fv.beta, base_point: fv.base_point, error_estimate: fv.error_estimate })
    }

    /// Chart extended to the basin: `Phi phi(F^j p) - (j, 0)` for the first `j`
    /// with `F^j(p)` in the pullback of `V`.
    pub fn chart_extended(&self, x: Complex64, y: Complex64, max_j: u64) -> Result<(FatouChartValue, u64)> {
        let (mut cx, mut cy) = (x, y);
        for j in 0..=max_j {
            if self.in_u(cx, cy) {
                if let Ok(v) = self.psi(cx, cy) {
                    let z = self.domain.petal.chart_z(cx, cy);
                    if self.in_v(z, v.psi) {
                        let mut out = self.chart_value(cx, cy)?;
                        out.beta -= j as f64;
                        return Ok((out, j));
                    }
                }
            }
            (cx, cy) = self.step(cx, cy);
        }
        Err(Error::ExhaustedSearch(max_j))
    }

    /// First `j` for which `z0 + j` lies in `beta_{w0}(V_{w0})`.
    pub fn image_exhaustion_probe(&self, z0: Complex64, w0: Complex64, j_max: u64) -> Result<ExhaustionResult> {
        if self.domain.petal.n >= 1 && w0 == Complex64::new(0.0, 0.0) {
            return Err(Error::Precondition("w0 must be nonzero when n >= 1".into()));
        }
        let p = self.base_point(w0);
        for j in 0..=j_max {
            let target = z0 + j as f64;
            let mut z = target + p;
            if !self.in_v(z, w0) {
                continue;
            }
            let Ok(mut r) = self.beta(z, w0).map(|b| b.beta - target) else {
                continue;
            };
            for _ in 0..30 {
                if r.norm() < 1e-10 * (1.0 + target.norm()) {
                    return Ok(ExhaustionResult { j, z, residual: r.norm() });
                }
                let h = 1e-3;
                let Ok(bh) = self.beta(z + h, w0) else {
                    break;
                };
                let deriv = (bh.beta - target - r) / h;
                let step = r / deriv;
                let mut t = 1.0;
                let mut improved = false;
                while t > 1e-3 {
                    let cand = z - step * t;
                    if self.in_v(cand, w0) {
                        if let Ok(b) = self.beta(cand, w0) {
                            let nr = b.beta - target;
                            if nr.norm() < r.norm() {
                                (z, r, improved) = (cand, nr, true);
                                break;
                            }
                        }
                    }
                    t *= 0.5;
                }
                if !improved {
                    break;
                }
            }
        }
        Err(Error::ExhaustedSearch(j_max))
    }
}

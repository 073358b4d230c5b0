//! Invariant parabolic curves `y = u_k(x)` of noncorner germs on extended sectors.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::germ::{classify_form, FloatGerm, Form};
use crate::poly::FastPoly;
use crate::sector::{relative_angle, sector_membership, SectorKind, SectorSpec};

type LPoly = Vec<Complex64>;

fn lp_add(a: &mut LPoly, b: &[Complex64], s: Complex64) {
    if a.len() < b.len() {
        a.resize(b.len(), Complex64::new(0.0, 0.0));
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y * s;
    }
}

fn lp_mul(a: &[Complex64], b: &[Complex64]) -> LPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn lp_deriv(a: &[Complex64]) -> LPoly {
    a.iter().enumerate().skip(1).map(|(r, c)| c * r as f64).collect()
}

fn lp_integrate(a: &[Complex64]) -> LPoly {
    std::iter::once(Complex64::new(0.0, 0.0)).chain(a.iter().enumerate().map(|(r, c)| c / (r + 1) as f64)).collect()
}

fn lp_eval(a: &[Complex64], l: Complex64) -> Complex64 {
    a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * l + c)
}

/// Truncated series `sum_k P_k(log x) x^k` with polynomial coefficients in `log x`.
#[derive(Clone, Debug, PartialEq)]
struct LogSeries {
    c: Vec<LPoly>,
}

impl LogSeries {
    fn zero(order: usize) -> Self {
        LogSeries { c: vec![Vec::new(); order + 1] }
    }

    fn order(&self) -> usize {
        self.c.len() - 1
    }

    fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = vec![Complex64::new(1.0, 0.0)];
        s
    }

    fn add_scaled(&mut self, o: &LogSeries, s: Complex64) {
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            lp_add(a, b, s);
        }
    }

    fn mul(&self, o: &LogSeries) -> LogSeries {
        let n = self.order();
        let mut out = Self::zero(n);
        for (i, a) in self.c.iter().enumerate() {
            if a.is_empty() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(n + 1 - i) {
                if !b.is_empty() {
                    let p = lp_mul(a, b);
                    lp_add(&mut out.c[i + j], &p, Complex64::new(1.0, 0.0));
                }
            }
        }
        out
    }

    fn shift(&self, k: isize) -> LogSeries {
        let n = self.order();
        let mut out = Self::zero(n);
        for (i, a) in self.c.iter().enumerate() {
            let t = i as isize + k;
            if t >= 0 && (t as usize) <= n {
                out.c[t as usize] = a.clone();
            }
        }
        out
    }

    fn powers(&self, e: usize) -> Vec<LogSeries> {
        let mut out = vec![Self::one(self.order())];
        for i in 1..=e {
            let next = out[i - 1].mul(self);
            out.push(next);
        }
        out
    }

    fn eval(&self, x: Complex64, l: Complex64) -> Complex64 {
        self.c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, p| acc * x + lp_eval(p, l))
    }

    fn eval_deriv(&self, x: Complex64, l: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (k, p) in self.c.iter().enumerate() {
            if p.is_empty() {
                continue;
            }
            let v = lp_eval(&lp_deriv(p), l) + lp_eval(p, l) * k as f64;
            s += v * x.powi(k as i32 - 1);
        }
        s
    }
}

fn compose_poly(f: &FloatGerm, first: bool, u: &LogSeries) -> LogSeries {
    let p = if first { &f.fx } else { &f.fy };
    let up = u.powers(p.degree_y() as usize);
    let mut out = LogSeries::zero(u.order());
    for (i, j, c) in p.terms() {
        out.add_scaled(&up[j as usize].shift(i as isize), *c);
    }
    out
}

/// `u(F1(x, u(x))) - F2(x, u(x))`.
fn invariance_defect(f: &FloatGerm, u: &LogSeries, big_m: usize) -> LogSeries {
    let n = u.order();
    let f1 = compose_poly(f, true, u);
    let mut h = f1.shift(-1);
    h.c[0] = Vec::new();
    let mut ell = LogSeries::zero(n);
    let hp = h.powers(n / big_m.max(1) + 1);
    for (r, hr) in hp.iter().enumerate().skip(1) {
        let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
        ell.add_scaled(hr, Complex64::new(sign / r as f64, 0.0));
    }
    let mut onep = LogSeries::one(n);
    onep.add_scaled(&h, Complex64::new(1.0, 0.0));
    let max_deg = u.c.iter().map(|p| p.len()).max().unwrap_or(0);
    let ellp = ell.powers(max_deg);
    let mut comp = LogSeries::zero(n);
    let mut scale = LogSeries::one(n);
    for k in 1..=n {
        scale = scale.mul(&onep);
        let pk = &u.c[k];
        if pk.is_empty() {
            continue;
        }
        let mut shifted = LogSeries::zero(n);
        let mut deriv = pk.clone();
        let mut fact = 1.0;
        for (r, er) in ellp.iter().enumerate() {
            if deriv.is_empty() {
                break;
            }
            if r > 0 {
                fact *= r as f64;
            }
            let mut t = LogSeries::zero(n);
            t.c[0] = deriv.iter().map(|c| c / fact).collect();
            shifted.add_scaled(&t.mul(er), Complex64::new(1.0, 0.0));
            deriv = lp_deriv(&deriv);
        }
        comp.add_scaled(&shifted.mul(&scale).shift(k as isize), Complex64::new(1.0, 0.0));
    }
    let f2 = compose_poly(f, false, u);
    comp.add_scaled(&f2, Complex64::new(-1.0, 0.0));
    comp
}

/// Formal solution `u = sum_{k=1}^{order} P_k(log x) x^k`, with zero
/// integration constants at resonant orders.
fn formal_curve(f: &FloatGerm, big_m: usize, a: Complex64, b: Complex64, order: usize) -> LogSeries {
    let total = order + big_m;
    let mut u = LogSeries::zero(total);
    for k in 1..=order {
        let e = invariance_defect(f, &u, big_m);
        let s: LPoly = e.c[k + big_m].iter().map(|c| -c).collect();
        let alpha = a * k as f64 - b;
        let p = if alpha.norm() > 1e-12 {
            let mut out = Vec::new();
            let mut term: LPoly = s.iter().map(|c| c / alpha).collect();
            let ratio = -a / alpha;
            while !term.is_empty() {
                lp_add(&mut out, &term, Complex64::new(1.0, 0.0));
                term = lp_deriv(&term).iter().map(|c| c * ratio).collect();
            }
            out
        } else {
            lp_integrate(&s).iter().map(|c| c / a).collect()
        };
        u.c[k] = p.into_iter().rev().skip_while(|c| c.norm() == 0.0).collect::<Vec<_>>().into_iter().rev().collect();
    }
    u
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    pub rings: usize,
    pub angles: usize,
    /// `log(|x^M| / r_max)` of the innermost and outermost rings.
    pub rho_min: f64,
    pub rho_max: f64,
    pub angle_margin: f64,
    pub series_order: usize,
    /// Orbits are followed until `|x^M|` drops below this radius.
    pub series_radius: f64,
    pub tol: f64,
    pub max_steps: usize,
}

impl Default for CurveOptions {
    fn default() -> Self {
        CurveOptions {
            rings: 64,
            angles: 33,
            rho_min: 1e-3f64.ln(),
            rho_max: 0.95f64.ln(),
            angle_margin: 0.05,
            series_order: 12,
            series_radius: 5e-3,
            tol: 1e-8,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub x: Complex64,
    pub u: Complex64,
    pub residual: f64,
}

struct Derivs {
    f1: FastPoly,
    f2: FastPoly,
    f1x: FastPoly,
    f1y: FastPoly,
    f2x: FastPoly,
    f2y: FastPoly,
}

pub struct ParabolicCurve {
    pub sector: SectorSpec,
    pub samples: Vec<CurveSample>,
    pub bound_constant: f64,
    pub residual: f64,
    /// Largest gap between the grid interpolant and the refined value at cell centres.
    pub interpolation_error: f64,
    pub options: CurveOptions,
    /// Lowest-order coefficients of the germ: `x^{M+1}` in `F1` and `x^M y` in `F2`.
    pub a: Complex64,
    pub b: Complex64,
    big_m: u32,
    phis: Vec<f64>,
    rhos: Vec<f64>,
    fh_weights: Vec<f64>,
    series: LogSeries,
    derivs: Derivs,
}

/// Sector `S~_k` of the `x` variable in which the curve is computed.
pub fn curve_sector(big_m: u32, epsilon: f64, theta: f64, k: u32) -> SectorSpec {
    SectorSpec { epsilon, theta, d: big_m, kind: SectorKind::AttractingExtended, k }
}

pub fn graph_transform_curve(f: &FloatGerm, sector: &SectorSpec, options: &CurveOptions) -> Result<ParabolicCurve> {
    if sector.theta >= PI / 2.0 {
        return Err(Error::NoContraction(format!("theta = {} is not below pi/2", sector.theta)));
    }
    let sig = classify_form(f)?;
    if sig.form != Form::Noncorner {
        return Err(Error::TemplateMismatch("parabolic curves need a noncorner germ".into()));
    }
    if (sig.a * sig.M as f64 + 1.0).norm() > 1e-9 {
        return Err(Error::Precondition("germ must be normalized (a M = -1)".into()));
    }
    let sector = SectorSpec { d: sig.M, kind: SectorKind::AttractingExtended, ..*sector };
    sector.validate()?;
    if options.rings < 4 || options.angles < 4 {
        return Err(Error::InvalidParameter("grid needs at least 4 rings and 4 angles".into()));
    }
    let big_m = sig.M as usize;
    let series = formal_curve(f, big_m, sig.a, sig.b, options.series_order);
    let dp = |p: &crate::poly::Poly<Complex64>| FastPoly::new(p);
    let derivs = Derivs {
        f1: dp(&f.fx),
        f2: dp(&f.fy),
        f1x: dp(&f.fx.deriv_x()),
        f1y: dp(&f.fx.deriv_y()),
        f2x: dp(&f.fy.deriv_x()),
        f2y: dp(&f.fy.deriv_y()),
    };
    let phi_max = PI / 2.0 + sector.theta - options.angle_margin;
    let na = options.angles;
    let phis: Vec<f64> = (0..na).map(|i| -phi_max + 2.0 * phi_max * i as f64 / (na - 1) as f64).collect();
    let nr = options.rings;
    let rhos: Vec<f64> = (0..nr).map(|i| options.rho_min + (options.rho_max - options.rho_min) * i as f64 / (nr - 1) as f64).collect();
    let fh_weights = floater_hormann_weights(&phis, 3);
    let mut curve = ParabolicCurve {
        sector,
        samples: Vec::new(),
        bound_constant: 0.0,
        residual: 0.0,
        interpolation_error: 0.0,
        options: options.clone(),
        a: sig.a,
        b: sig.b,
        big_m: sig.M,
        phis,
        rhos,
        fh_weights,
        series,
        derivs,
    };
    let nodes: Vec<Complex64> = (0..nr).flat_map(|i| (0..na).map(move |j| (i, j))).map(|(i, j)| curve.node(i, j)).collect();
    let values: Vec<Result<Complex64>> = nodes.par_iter().map(|&x| curve.refine(x, curve.series_value(x))).collect();
    let mut samples = Vec::with_capacity(nodes.len());
    for (x, v) in nodes.iter().zip(values) {
        samples.push(CurveSample { x: *x, u: v?, residual: 0.0 });
    }
    curve.samples = samples;
    let residuals: Vec<f64> = curve.samples.par_iter().map(|s| curve.defect(s.x, s.u)).collect();
    for (s, r) in curve.samples.iter_mut().zip(residuals) {
        s.residual = r;
    }
    curve.residual = curve.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    curve.bound_constant = curve
        .samples
        .iter()
        .map(|s| s.u.norm() / (s.x.norm() * s.x.norm().ln().abs()))
        .fold(0.0, f64::max);
    curve.interpolation_error = curve.measure_interpolation();
    if !(curve.residual < options.tol) {
        return Err(Error::GridResolution(curve.residual));
    }
    Ok(curve)
}

fn floater_hormann_weights(t: &[f64], d: usize) -> Vec<f64> {
    let n = t.len() - 1;
    (0..=n)
        .map(|k| {
            let mut s = 0.0;
            for i in k.saturating_sub(d)..=k.min(n - d) {
                let mut prod = 1.0;
                for j in i..=i + d {
                    if j != k {
                        prod /= t[k] - t[j];
                    }
                }
                s += if i % 2 == 0 { prod } else { -prod };
            }
            s
        })
        .collect()
}

fn barycentric(t: &[f64], w: &[f64], q: f64) -> Vec<f64> {
    if let Some(k) = t.iter().position(|&v| v == q) {
        let mut out = vec![0.0; t.len()];
        out[k] = 1.0;
        return out;
    }
    let raw: Vec<f64> = t.iter().zip(w).map(|(tk, wk)| wk / (q - tk)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

fn lagrange(t: &[f64], q: f64) -> Vec<f64> {
    (0..t.len())
        .map(|k| (0..t.len()).filter(|&j| j != k).map(|j| (q - t[j]) / (t[k] - t[j])).product())
        .collect()
}

impl ParabolicCurve {
    fn rotation(&self) -> f64 {
        self.sector.bisector()
    }

    fn rmax(&self, phi: f64) -> f64 {
        self.sector.max_radius(phi).unwrap_or(0.0)
    }

    fn node(&self, i: usize, j: usize) -> Complex64 {
        let phi = self.phis[j];
        let r = self.rmax(phi) * self.rhos[i].exp();
        Complex64::from_polar(r.powf(1.0 / self.big_m as f64), phi / self.big_m as f64 + self.rotation())
    }

    fn log_branch(&self, x: Complex64) -> Complex64 {
        let rot = self.rotation();
        let rot = (Complex64::from_polar(1.0, rot)).arg();
        let rel = (x * Complex64::from_polar(1.0, -self.rotation())).arg();
        Complex64::new(x.norm().ln(), rot + rel)
    }

    fn series_value(&self, x: Complex64) -> Complex64 {
        self.series.eval(x, self.log_branch(x))
    }

    /// Follows the orbit of `(x, y)` into the region where the formal series is
    /// accurate and solves `y_J = u_series(x_J)` for `y` by damped Newton.
    fn refine(&self, x: Complex64, seed: Complex64) -> Result<Complex64> {
        let d = &self.derivs;
        let (mut xp, mut yp) = (Vec::new(), Vec::new());
        let stop = self.options.series_radius;
        let big_m = self.big_m as i32;
        let mut steps = None;
        let shoot = |y0: Complex64, steps: &mut Option<usize>, xp: &mut Vec<Complex64>, yp: &mut Vec<Complex64>| -> Result<(Complex64, Complex64)> {
            let (mut cx, mut cy) = (x, y0);
            let (mut dx, mut dy) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
            let mut j = 0;
            loop {
                let done = match *steps {
                    Some(n) => j == n,
                    None => cx.norm().powi(big_m) < stop,
                };
                if done {
                    break;
                }
                if j >= self.options.max_steps || !sector_membership(cx, &self.sector) {
                    return Err(Error::NoContraction(format!("orbit of x = {x} left the sector")));
                }
                let a = d.f1x.eval(cx, cy, xp, yp);
                let b = d.f1y.eval(cx, cy, xp, yp);
                let c = d.f2x.eval(cx, cy, xp, yp);
                let e = d.f2y.eval(cx, cy, xp, yp);
                let nx = d.f1.eval(cx, cy, xp, yp);
                let ny = d.f2.eval(cx, cy, xp, yp);
                (dx, dy) = (a * dx + b * dy, c * dx + e * dy);
                (cx, cy) = (nx, ny);
                j += 1;
            }
            *steps = Some(j);
            let l = self.log_branch(cx);
            let g = cy - self.series.eval(cx, l);
            let dg = dy - self.series.eval_deriv(cx, l) * dx;
            Ok((g, dg))
        };
        let mut y = seed;
        let (mut g, mut dg) = shoot(y, &mut steps, &mut xp, &mut yp)?;
        for _ in 0..50 {
            let step = g / dg;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-4 {
                let cand = y - step * t;
                if let Ok((ng, ndg)) = shoot(cand, &mut steps, &mut xp, &mut yp) {
                    if ng.norm() <= g.norm() {
                        (y, g, dg, accepted) = (cand, ng, ndg, true);
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted || (step * t).norm() <= 1e-16 * y.norm().max(x.norm()) {
                break;
            }
        }
        if g.norm() > 1e-12 * dg.norm() * y.norm().max(x.norm()) {
            return Err(Error::NoConvergence(format!("curve value at x = {x}")));
        }
        Ok(y)
    }

    fn defect(&self, x: Complex64, u: Complex64) -> f64 {
        let (x1, y1) = self.apply(x, u);
        match self.eval(x1) {
            Ok(v) => (v - y1).norm(),
            Err(_) => f64::INFINITY,
        }
    }

    fn apply(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        let (mut xp, mut yp) = (Vec::new(), Vec::new());
        (self.derivs.f1.eval(x, y, &mut xp, &mut yp), self.derivs.f2.eval(x, y, &mut xp, &mut yp))
    }

    fn polar(&self, x: Complex64) -> Result<(f64, f64)> {
        if !sector_membership(x, &self.sector) {
            return Err(Error::OutOfSector);
        }
        let phi = relative_angle(x, &self.sector).ok_or(Error::OutOfSector)?;
        let rho = (x.norm().powi(self.big_m as i32) / self.rmax(phi)).ln();
        Ok((rho, phi))
    }

    /// Cubic-in-`log r`, barycentric-in-angle interpolant of the grid values.
    pub fn interpolate(&self, x: Complex64) -> Result<Complex64> {
        let (rho, phi) = self.polar(x)?;
        if rho < self.rhos[0] {
            return Ok(self.series_value(x));
        }
        let nr = self.rhos.len();
        let hi = self.rhos.iter().position(|&r| r >= rho).unwrap_or(nr - 1);
        let start = hi.saturating_sub(2).min(nr - 4);
        let rw = lagrange(&self.rhos[start..start + 4], rho);
        let aw = barycentric(&self.phis, &self.fh_weights, phi.clamp(self.phis[0], *self.phis.last().unwrap()));
        let na = self.phis.len();
        let mut s = Complex64::new(0.0, 0.0);
        for (di, wr) in rw.iter().enumerate() {
            let row = &self.samples[(start + di) * na..(start + di + 1) * na];
            for (sample, wa) in row.iter().zip(&aw) {
                s += sample.u * (wr * wa);
            }
        }
        Ok(s)
    }

    /// `u_k(x)`: the interpolant refined to satisfy invariance exactly along the orbit.
    pub fn eval(&self, x: Complex64) -> Result<Complex64> {
        let seed = self.interpolate(x)?;
        if x.norm().powi(self.big_m as i32) < self.options.series_radius {
            return Ok(self.series_value(x));
        }
        self.refine(x, seed)
    }

    fn measure_interpolation(&self) -> f64 {
        let na = self.phis.len();
        let mids: Vec<Complex64> = (0..self.rhos.len() - 1)
            .step_by(4)
            .flat_map(|i| (0..na - 1).step_by(4).map(move |j| (i, j)))
            .map(|(i, j)| {
                let phi = 0.5 * (self.phis[j] + self.phis[j + 1]);
                let rho = 0.5 * (self.rhos[i] + self.rhos[i + 1]);
                let r = self.rmax(phi) * rho.exp();
                Complex64::from_polar(r.powf(1.0 / self.big_m as f64), phi / self.big_m as f64 + self.rotation())
            })
            .collect();
        mids.par_iter()
            .map(|&x| match (self.interpolate(x), self.eval(x)) {
                (Ok(a), Ok(b)) => (a - b).norm(),
                _ => f64::INFINITY,
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Coefficient of `x^k (log x)^r` in the formal expansion.
    pub fn series_coefficient(&self, k: usize, r: usize) -> Complex64 {
        self.series.c.get(k).and_then(|p| p.get(r)).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "re_x,im_x,re_u,im_u,residual")?;
        for s in &self.samples {
            writeln!(out, "{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}", s.x.re, s.x.im, s.u.re, s.u.im, s.residual)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Forward,
    Inverse,
}

/// `(x, y) -> (x, y - u_k(x))` or its inverse.
pub fn sectorial_change(point: (Complex64, Complex64), curve: &ParabolicCurve, direction: Direction) -> Result<(Complex64, Complex64)> {
    let (x, y) = point;
    let u = curve.eval(x)?;
    Ok(match direction {
        Direction::Forward => (x, y - u),
        Direction::Inverse => (x, y + u),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateCheck {
    pub a: Complex64,
    pub b: Complex64,
    pub a_estimate: Complex64,
    pub b_estimate: Complex64,
    /// Largest `|G_2(x, 0)|` over the probe points.
    pub axis_defect: f64,
    pub matches: bool,
}

/// Conjugates by the sectorial change and reads the lowest-order coefficients
/// of `G = sigma^{-1} o F o sigma` on inner grid nodes.
pub fn template_check(curve: &ParabolicCurve, tol: f64) -> Result<TemplateCheck> {
    let (sa, sb) = (curve.a, curve.b);
    let m = curve.big_m;
    let na = curve.phis.len();
    let mut worst_a: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    let mut axis: f64 = 0.0;
    let (mut ea, mut eb) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for j in (na / 4)..=(3 * na / 4) {
        let x = curve.samples[j].x;
        let y = x * x.norm() * 1e-2;
        let g = |y: Complex64| -> Result<(Complex64, Complex64)> {
            let (p, q) = sectorial_change((x, y), curve, Direction::Inverse)?;
            let (p1, q1) = curve.apply(p, q);
            sectorial_change((p1, q1), curve, Direction::Forward)
        };
        let (g1, g2) = g(y)?;
        let (_, g20) = g(Complex64::new(0.0, 0.0))?;
        let a_est = (g1 - x) / x.powu(m + 1);
        let b_est = (g2 - g20 - y) / (x.powu(m) * y);
        axis = axis.max(g20.norm() / x.norm());
        worst_a = worst_a.max((a_est - sa).norm());
        worst_b = worst_b.max((b_est - sb).norm());
        ea = a_est;
        eb = b_est;
    }
    let matches = worst_a < tol && worst_b < tol && axis < 1e-10;
    Ok(TemplateCheck { a: sa, b: sb, a_estimate: ea, b_estimate: eb, axis_defect: axis, matches })
}

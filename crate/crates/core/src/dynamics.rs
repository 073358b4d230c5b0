//! Orbits, attraction diagnostics, exact flows, petal coverage and escape analysis.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curve::ParabolicCurve;
use crate::error::{Error, Result};
use crate::extrapolate::{log_spaced, lstsq};
use crate::germ::{FloatGerm, Form, FormSignature, MapBuffers};
use crate::sector::{domain_membership, principal_power, sector_membership_scaled, DomainKind, DomainSpec, PetalParams, SectorKind};

/// Exponents used to form `z = (x^m y^n)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductExponents {
    pub m: u32,
    pub n: u32,
    pub d: u32,
}

impl ProductExponents {
    pub fn of(petal: &PetalParams) -> Self {
        ProductExponents { m: petal.m, n: petal.n, d: petal.d }
    }

    pub fn value(&self, x: Complex64, y: Complex64) -> Complex64 {
        (x.powu(self.m) * y.powu(self.n)).powu(self.d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitReason {
    MaxSteps,
    LeftValidityBall,
    LeftDomain,
    ConvergedTo0,
    Diverged,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub z: Complex64,
    pub abs_x: f64,
    pub abs_y: f64,
    pub in_uk: bool,
    pub in_dk: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub points: Vec<(Complex64, Complex64)>,
    pub derived: Vec<StepRecord>,
    pub exit_reason: ExitReason,
    pub exponents: ProductExponents,
}

#[derive(Clone, Debug)]
pub struct IterateOptions {
    pub max_steps: usize,
    pub exponents: ProductExponents,
    /// Domain used for membership flags and, if `stop_on_exit`, as a guard.
    pub domain: Option<DomainSpec>,
    pub stop_on_exit: bool,
    pub converged_tol: f64,
}

impl IterateOptions {
    pub fn new(max_steps: usize, exponents: ProductExponents) -> Self {
        IterateOptions { max_steps, exponents, domain: None, stop_on_exit: false, converged_tol: 1e-15 }
    }
}

fn record(x: Complex64, y: Complex64, opts: &IterateOptions) -> StepRecord {
    let (in_uk, in_dk) = match &opts.domain {
        Some(d) => (
            domain_membership(x, y, &d.with_kind(DomainKind::U)),
            domain_membership(x, y, &d.with_kind(DomainKind::D)),
        ),
        None => (false, false),
    };
    StepRecord { z: opts.exponents.value(x, y), abs_x: x.norm(), abs_y: y.norm(), in_uk, in_dk }
}

pub fn iterate(f: &FloatGerm, start: (Complex64, Complex64), opts: &IterateOptions) -> OrbitTrace {
    let fast = f.fast();
    let mut buf = MapBuffers::default();
    let (mut x, mut y) = start;
    let mut points = vec![start];
    let mut derived = vec![record(x, y, opts)];
    let radius = f.validity_radius;
    let outside = |x: Complex64, y: Complex64| x.norm().max(y.norm()) > radius;
    let mut exit = ExitReason::MaxSteps;
    if outside(x, y) {
        exit = ExitReason::LeftValidityBall;
    } else {
        for _ in 0..opts.max_steps {
            let (nx, ny) = fast.apply(x, y, &mut buf);
            x = nx;
            y = ny;
            points.push((x, y));
            let rec = record(x, y, opts);
            let guard_fail = opts.stop_on_exit && opts.domain.is_some() && !rec.in_dk;
            derived.push(rec);
            if !(x.re.is_finite() && x.im.is_finite() && y.re.is_finite() && y.im.is_finite()) {
                exit = ExitReason::Diverged;
                break;
            }
            if outside(x, y) {
                exit = ExitReason::LeftValidityBall;
                break;
            }
            if (x.norm_sqr() + y.norm_sqr()).sqrt() < opts.converged_tol {
                exit = ExitReason::ConvergedTo0;
                break;
            }
            if guard_fail {
                exit = ExitReason::LeftDomain;
                break;
            }
        }
    }
    OrbitTrace { points, derived, exit_reason: exit, exponents: opts.exponents }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractionEstimate {
    pub limit: Complex64,
    pub error: f64,
    pub failed: bool,
}

/// Extrapolated `lim j z_j`, read off a fit of `1/z_j` against
/// `j, log j, 1, log j / j, 1/j`.
pub fn attraction_diagnostic(trace: &OrbitTrace) -> Result<AttractionEstimate> {
    let n = trace.derived.len().saturating_sub(1);
    if n < 50 {
        return Err(Error::InsufficientData(n));
    }
    let failed = AttractionEstimate { limit: Complex64::new(0.0, 0.0), error: f64::INFINITY, failed: true };
    let js = log_spaced(n, 4, 5, 8);
    let inv: Vec<Complex64> = js.iter().map(|&j| trace.derived[j].z.inv()).collect();
    if inv.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Ok(failed);
    }
    let fit = |nb: usize| -> Option<Complex64> {
        let rows: Vec<Vec<Complex64>> = js
            .iter()
            .map(|&j| {
                let (jf, l) = (j as f64, (j as f64).ln());
                let all = [jf, l, 1.0, l / jf, 1.0 / jf];
                all[..nb].iter().map(|&v| Complex64::new(v, 0.0)).collect()
            })
            .collect();
        lstsq(&rows, &inv).map(|c| c[0].inv())
    };
    let (Some(full), Some(short)) = (fit(5.min(js.len())), fit(3.min(js.len()))) else {
        return Ok(failed);
    };
    let error = (full - short).norm();
    let ok = full.re.is_finite() && full.im.is_finite() && error < 0.1 * full.norm() && full.norm() > 1e-6;
    Ok(AttractionEstimate { limit: full, error, failed: !ok })
}

/// Exact time-`t` flow of `x^M y^N (a x d/dx + b y d/dy)`.
#[allow(non_snake_case)]
pub fn closed_form_flow(M: u32, N: u32, a: Complex64, b: Complex64, point: (Complex64, Complex64), t: f64) -> Result<(Complex64, Complex64)> {
    let (x, y) = point;
    let mono = x.powu(M) * y.powu(N);
    let s = a * M as f64 + b * N as f64;
    if s == Complex64::new(0.0, 0.0) {
        return Ok((x * (a * mono * t).exp(), y * (b * mono * t).exp()));
    }
    let base = Complex64::new(1.0, 0.0) - s * mono * t;
    if t == 0.0 || mono == Complex64::new(0.0, 0.0) {
        return Ok(point);
    }
    Ok((x * principal_power(base, -a / s)?, y * principal_power(base, -b / s)?))
}

/// Truncated time-1 map of `x^M y^N (a x d/dx + b y d/dy)`.
#[allow(non_snake_case)]
pub fn flow_germ(M: u32, N: u32, a: Complex64, b: Complex64, order: u32) -> FloatGerm {
    use crate::germ::VectorFieldJet;
    use crate::poly::Poly;
    let p = Poly::monomial(M + 1, N, a);
    let q = Poly::monomial(M, N + 1, b);
    let mut g = VectorFieldJet::new(p, q, order).exp_map();
    g.validity_radius = 0.5;
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSampleSpec {
    pub count: usize,
    pub seed: u64,
    /// Multiplier of the angular extent of every sector (1 = as defined).
    pub opening_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub samples: usize,
    pub fixed: usize,
    pub covered_attracting: usize,
    pub covered_repelling: usize,
    pub uncovered: usize,
    pub counterexamples: Vec<(Complex64, Complex64)>,
    /// Radius of `|(x^m y^n)^d|` used for the sampled neighbourhood.
    pub sample_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coverage {
    Fixed,
    Attracting(u32),
    Repelling(u32),
    Uncovered,
}

/// Which extended petal (attracting or repelling) contains the point.
pub fn coverage_of(x: Complex64, y: Complex64, spec: &DomainSpec, opening_scale: f64) -> Coverage {
    let pt = &spec.petal;
    let s = pt.product(x, y);
    if s == Complex64::new(0.0, 0.0) {
        return Coverage::Fixed;
    }
    if !(pt.x_weight() * x.norm() < spec.delta_prime && y.norm() < spec.delta_prime) {
        return Coverage::Uncovered;
    }
    for k in 0..pt.d {
        for (kind, attracting) in [(SectorKind::AttractingExtended, true), (SectorKind::RepellingExtended, false)] {
            let sec = crate::sector::SectorSpec { epsilon: spec.epsilon, theta: spec.theta, d: pt.d, kind, k };
            if sector_membership_scaled(s, &sec, opening_scale) {
                return if attracting { Coverage::Attracting(k) } else { Coverage::Repelling(k) };
            }
        }
    }
    Coverage::Uncovered
}

/// Samples `{|x^m y^n|^d < eps sin(theta), |min(1,n) x| < delta', |y| < delta'}`
/// and checks that every point off the fixed set lies in some extended petal.
pub fn petal_cover_check(spec: &DomainSpec, sample: &CoverSampleSpec) -> CoverReport {
    let pt = spec.petal;
    let radius = spec.epsilon * spec.theta.sin();
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let mut report = CoverReport {
        samples: 0,
        fixed: 0,
        covered_attracting: 0,
        covered_repelling: 0,
        uncovered: 0,
        counterexamples: Vec::new(),
        sample_radius: radius,
    };
    while report.samples < sample.count {
        let Some((x, y)) = sample_neighbourhood(&pt, radius, spec.delta_prime, &mut rng) else {
            continue;
        };
        report.samples += 1;
        match coverage_of(x, y, spec, sample.opening_scale) {
            Coverage::Fixed => report.fixed += 1,
            Coverage::Attracting(_) => report.covered_attracting += 1,
            Coverage::Repelling(_) => report.covered_repelling += 1,
            Coverage::Uncovered => {
                report.uncovered += 1;
                if report.counterexamples.len() < 20 {
                    report.counterexamples.push((x, y));
                }
            }
        }
    }
    report
}

fn sample_neighbourhood(pt: &PetalParams, radius: f64, delta: f64, rng: &mut ChaCha8Rng) -> Option<(Complex64, Complex64)> {
    let d = pt.d as f64;
    let wabs = radius * rng.gen::<f64>().sqrt();
    let warg = rng.gen_range(-PI..PI);
    let root = rng.gen_range(0..pt.d) as f64;
    let s = Complex64::from_polar(wabs.powf(1.0 / d), (warg + 2.0 * PI * root) / d);
    let y = Complex64::from_polar(delta * rng.gen::<f64>().sqrt(), rng.gen_range(-PI..PI));
    let (m, n) = (pt.m as f64, pt.n as i32);
    let base = s / y.powi(n);
    let xr = rng.gen_range(0..pt.m) as f64;
    let x = Complex64::from_polar(base.norm().powf(1.0 / m), (base.arg() + 2.0 * PI * xr) / m);
    let ok = pt.x_weight() * x.norm() < delta && pt.product(x, y).norm().powi(pt.d as i32) < radius;
    ok.then_some((x, y))
}

/// Random point of `U_k` (or `D_k`), log-uniform in `|x^m y^n|`.
pub fn sample_petal_point(spec: &DomainSpec, rng: &mut ChaCha8Rng) -> (Complex64, Complex64) {
    let pt = spec.petal;
    let d = pt.d as f64;
    let smax = spec.epsilon.powf(1.0 / d);
    loop {
        let ms = smax * 10f64.powf(-6.0 * rng.gen::<f64>());
        let arg = 2.0 * PI * pt.k as f64 / d + spec.theta / d * rng.gen_range(-1.0..1.0);
        let s = Complex64::from_polar(ms, arg);
        let cap = match spec.kind {
            DomainKind::U => ms.powf(pt.gamma),
            _ => spec.delta,
        };
        let (x, y) = if pt.n == 0 {
            let x = Complex64::from_polar(ms.powf(1.0 / pt.m as f64), (arg + 2.0 * PI * rng.gen_range(0..pt.m) as f64) / pt.m as f64);
            let y = Complex64::from_polar(cap * 10f64.powf(-3.0 * rng.gen::<f64>()), rng.gen_range(-PI..PI));
            (x, y)
        } else {
            let (m, n) = (pt.m as f64, pt.n as f64);
            let lo = (ms / cap.powf(m)).powf(1.0 / n);
            if !(lo < cap) {
                continue;
            }
            let ay = lo * (cap / lo).powf(rng.gen::<f64>());
            let y = Complex64::from_polar(ay, rng.gen_range(-PI..PI));
            let base = s / y.powf(n);
            let xr = rng.gen_range(0..pt.m) as f64;
            let x = Complex64::from_polar(base.norm().powf(1.0 / m), (base.arg() + 2.0 * PI * xr) / m);
            (x, y)
        };
        if domain_membership(x, y, spec) {
            return (x, y);
        }
    }
}

/// The window `{|x^m y^n| < eps, |x| < delta, |y| < delta}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeWindow {
    pub epsilon: f64,
    pub delta: f64,
    pub exponents: ProductExponents,
}

impl EscapeWindow {
    pub fn contains(&self, x: Complex64, y: Complex64) -> bool {
        let e = &self.exponents;
        (x.powu(e.m) * y.powu(e.n)).norm() < self.epsilon && x.norm() < self.delta && y.norm() < self.delta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EscapeVerdict {
    Escaped(u64),
    StayedBounded,
    AttractedToParabolicCurve(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub verdict: EscapeVerdict,
    pub steps: u64,
    pub on_fixed_set: bool,
    pub max_abs_x_drift: f64,
    pub max_abs_y_drift: f64,
    pub final_point: (Complex64, Complex64),
}

fn escape_exponents(sig: &FormSignature) -> ProductExponents {
    match sig.form {
        Form::Corner => {
            let d = sig.M.gcd(&sig.N);
            ProductExponents { m: sig.M / d, n: sig.N / d, d }
        }
        _ => ProductExponents { m: 1, n: 0, d: sig.M.max(1) },
    }
}

fn check_escape_hypotheses(sig: &FormSignature) -> Result<()> {
    let ok = match sig.form {
        Form::Corner => sig.satisfies_repelling_condition || sig.resonant,
        Form::Noncorner => sig.satisfies_repelling_condition,
        Form::Other => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::HypothesisNotSatisfied)
    }
}

/// Largest window on a candidate ladder on which the growing coordinate
/// satisfies `|v_1| >= |v| (1 + nu |x^m y^n|^d)` along the attracting direction.
pub fn calibrate_window(f: &FloatGerm, sig: &FormSignature) -> Result<EscapeWindow> {
    check_escape_hypotheses(sig)?;
    let e = escape_exponents(sig);
    let fast = f.fast();
    let mut buf = MapBuffers::default();
    let (s, grow_y, coef) = match sig.form {
        Form::Corner => {
            let s = sig.a * sig.M as f64 + sig.b * sig.N as f64;
            let grow_y = sig.resonant || (sig.b / s).re < 0.0;
            (s, grow_y, if grow_y { sig.b } else { sig.a })
        }
        _ => (sig.a * sig.M as f64, true, sig.b),
    };
    let dir = if s.norm() > 0.0 { (-s.inv()).arg() } else { 0.0 };
    let nu = if sig.resonant { 0.0 } else { 0.5 * (coef * Complex64::from_polar(1.0, dir)).re };
    for &delta in &[0.5f64, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005] {
        let epsilon = delta.powi((e.m + e.n) as i32);
        let window = EscapeWindow { epsilon, delta, exponents: e };
        let mut ok = true;
        'grid: for &rx in &[0.1, 0.4, 0.7, 0.95] {
            for &ry in &[0.1, 0.4, 0.7, 0.95] {
                for ka in 0..8 {
                    let ax = 2.0 * PI * ka as f64 / 8.0;
                    let x = Complex64::from_polar(rx * delta, ax);
                    let prod = x.powu(sig.M);
                    let target = dir - prod.arg();
                    let ay = if sig.N > 0 { target / sig.N as f64 } else { 0.0 };
                    let y = Complex64::from_polar(ry * delta, ay);
                    if !window.contains(x, y) {
                        continue;
                    }
                    let (x1, y1) = fast.apply(x, y, &mut buf);
                    let z = e.value(x, y).norm();
                    let (v, v1) = if grow_y { (y, y1) } else { (x, x1) };
                    if v1.norm() < v.norm() * (1.0 + nu * z) {
                        ok = false;
                        break 'grid;
                    }
                }
            }
        }
        if ok {
            return Ok(window);
        }
    }
    Err(Error::NoConvergence("no escape window passed calibration".into()))
}

pub fn escape_analysis(
    f: &FloatGerm,
    sig: &FormSignature,
    window: &EscapeWindow,
    start: (Complex64, Complex64),
    max_steps: u64,
    curve: Option<(&ParabolicCurve, f64)>,
) -> Result<EscapeReport> {
    check_escape_hypotheses(sig)?;
    let (x0, y0) = start;
    let on_fixed = match sig.form {
        Form::Corner => x0.powu(sig.M) * y0.powu(sig.N) == Complex64::new(0.0, 0.0),
        _ => x0 == Complex64::new(0.0, 0.0),
    };
    let mut report = EscapeReport {
        verdict: EscapeVerdict::StayedBounded,
        steps: 0,
        on_fixed_set: on_fixed,
        max_abs_x_drift: 0.0,
        max_abs_y_drift: 0.0,
        final_point: start,
    };
    if on_fixed {
        return Ok(report);
    }
    if !window.contains(x0, y0) {
        report.verdict = EscapeVerdict::Escaped(0);
        return Ok(report);
    }
    let fast = f.fast();
    let mut buf = MapBuffers::default();
    let (mut x, mut y) = start;
    let (ax0, ay0) = (x0.norm(), y0.norm());
    for j in 1..=max_steps {
        let (nx, ny) = fast.apply(x, y, &mut buf);
        x = nx;
        y = ny;
        report.steps = j;
        report.max_abs_x_drift = report.max_abs_x_drift.max((x.norm() - ax0).abs());
        report.max_abs_y_drift = report.max_abs_y_drift.max((y.norm() - ay0).abs());
        if !window.contains(x, y) {
            report.verdict = EscapeVerdict::Escaped(j);
            report.final_point = (x, y);
            return Ok(report);
        }
    }
    report.final_point = (x, y);
    if let (Some((c, tol)), Form::Noncorner) = (curve, sig.form) {
        if let Ok(u) = c.eval(x) {
            if (y - u).norm() < tol {
                report.verdict = EscapeVerdict::AttractedToParabolicCurve(c.sector.k);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::{classify_form, PolyMapGerm};
    use crate::poly::Poly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reference() -> FloatGerm {
        PolyMapGerm::new(Poly::x() + Poly::monomial(2, 1, c(-0.5, 0.0)), Poly::y() + Poly::monomial(1, 2, c(-0.5, 0.0))).unwrap()
    }

    fn one_one() -> ProductExponents {
        ProductExponents { m: 1, n: 1, d: 1 }
    }

    #[test]
    fn fixed_set_is_stationary() {
        let t = iterate(&reference(), (c(0.0, 0.0), c(0.1, 0.0)), &IterateOptions::new(100, one_one()));
        assert_eq!(t.exit_reason, ExitReason::MaxSteps);
        assert!(t.points.iter().all(|p| *p == (c(0.0, 0.0), c(0.1, 0.0))));
        let e = attraction_diagnostic(&t).unwrap();
        assert!(e.failed);
    }

    #[test]
    fn outside_validity_ball() {
        let t = iterate(&reference(), (c(2.0, 0.0), c(0.1, 0.0)), &IterateOptions::new(100, one_one()));
        assert_eq!(t.exit_reason, ExitReason::LeftValidityBall);
        assert_eq!(t.points.len(), 1);
    }

    #[test]
    fn derived_matches_points() {
        let t = iterate(&reference(), (c(0.05, 0.01), c(0.05, -0.01)), &IterateOptions::new(200, one_one()));
        for (p, r) in t.points.iter().zip(&t.derived) {
            assert_eq!(r.z, p.0 * p.1);
        }
    }

    #[test]
    fn reference_attraction() {
        let t = iterate(&reference(), (c(0.05, 0.0), c(0.05, 0.0)), &IterateOptions::new(10_000, one_one()));
        let e = attraction_diagnostic(&t).unwrap();
        assert!(!e.failed);
        assert!((e.limit - 1.0).norm() < 1e-2, "{e:?}");
    }

    #[test]
    fn short_trace_is_rejected() {
        let t = iterate(&reference(), (c(0.05, 0.0), c(0.05, 0.0)), &IterateOptions::new(20, one_one()));
        assert_eq!(attraction_diagnostic(&t), Err(Error::InsufficientData(20)));
    }

    #[test]
    fn flow_examples() {
        let p = (c(0.1, 0.0), c(0.1, 0.0));
        assert_eq!(closed_form_flow(1, 1, c(-0.5, 0.0), c(-0.5, 0.0), p, 0.0).unwrap(), p);
        let (x, y) = closed_form_flow(1, 1, c(1.0, 0.0), c(-1.0, 0.0), p, 1.0).unwrap();
        assert!((x - 0.1 * 0.01f64.exp()).norm() < 1e-16);
        assert!((y - 0.1 * (-0.01f64).exp()).norm() < 1e-16);
        for t in [0.5, 3.0, 10.0] {
            let (x, _) = closed_form_flow(1, 0, c(-1.0, 0.0), c(0.3, 0.0), (c(0.2, 0.05), c(0.1, 0.0)), t).unwrap();
            let exp = c(0.2, 0.05) / (c(1.0, 0.0) + c(0.2, 0.05) * t);
            assert!((x - exp).norm() < 1e-15);
        }
        assert!(closed_form_flow(1, 0, c(-1.0, 0.0), c(0.0, 0.0), (c(-1.0, 0.0), c(0.0, 0.0)), 2.0).is_err());
    }

    #[test]
    fn flow_germ_matches_flow() {
        let g = flow_germ(1, 1, c(-0.5, 0.0), c(-0.5, 0.0), 12);
        let p = (c(0.05, 0.0), c(0.04, 0.01));
        let fast = g.fast();
        let mut buf = MapBuffers::default();
        let (mut x, mut y) = p;
        for j in 1..=200 {
            (x, y) = fast.apply(x, y, &mut buf);
            let (ex, ey) = closed_form_flow(1, 1, c(-0.5, 0.0), c(-0.5, 0.0), p, j as f64).unwrap();
            assert!((x - ex).norm() < 1e-12 * ex.norm());
            assert!((y - ey).norm() < 1e-12 * ey.norm());
        }
    }

    fn petal_domain() -> DomainSpec {
        let petal = PetalParams::new(1, 1, c(-0.5, 0.0), c(-0.5, 0.0), None, 0).unwrap();
        DomainSpec { petal, epsilon: 1e-2, theta: PI / 6.0, delta: 0.1, delta_prime: 0.1, r: 0.5, kind: DomainKind::U }
    }

    #[test]
    fn coverage_fixed_and_negative_control() {
        let spec = petal_domain();
        assert_eq!(coverage_of(c(0.0, 0.0), c(0.01, 0.0), &spec, 1.0), Coverage::Fixed);
        let ok = petal_cover_check(&spec, &CoverSampleSpec { count: 2000, seed: 1, opening_scale: 1.0 });
        assert_eq!(ok.uncovered, 0);
        let bad = petal_cover_check(&spec, &CoverSampleSpec { count: 2000, seed: 1, opening_scale: 0.5 });
        assert!(bad.uncovered > 0);
    }

    #[test]
    fn sampled_petal_points_are_members() {
        let spec = petal_domain();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (x, y) = sample_petal_point(&spec, &mut rng);
            assert!(domain_membership(x, y, &spec));
        }
    }

    #[test]
    fn escape_examples() {
        let f = PolyMapGerm::new(Poly::x() + Poly::monomial(2, 1, c(-2.0, 0.0)), Poly::y() + Poly::monomial(1, 2, c(1.0, 0.0))).unwrap();
        let sig = classify_form(&f).unwrap();
        assert!(sig.satisfies_repelling_condition);
        let w = calibrate_window(&f, &sig).unwrap();
        let start = (c(0.5 * w.delta, 0.0), c(0.5 * w.delta, 0.0));
        let r = escape_analysis(&f, &sig, &w, start, 10_000_000, None).unwrap();
        assert!(matches!(r.verdict, EscapeVerdict::Escaped(_)));
        let r = escape_analysis(&f, &sig, &w, (c(0.0, 0.0), c(0.01, 0.0)), 100, None).unwrap();
        assert!(r.on_fixed_set && r.verdict == EscapeVerdict::StayedBounded);
        let att = reference();
        assert_eq!(
            escape_analysis(&att, &classify_form(&att).unwrap(), &w, start, 10, None).unwrap_err(),
            Error::HypothesisNotSatisfied
        );
    }
}

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use petallab::curve::{curve_sector, graph_transform_curve, template_check, CurveOptions};
use petallab::dynamics::{
    attraction_diagnostic, closed_form_flow, escape_analysis, flow_germ, iterate, petal_cover_check, sample_petal_point, CoverSampleSpec,
    EscapeVerdict, EscapeWindow, IterateOptions, ProductExponents,
};
use petallab::fatou::{FatouContext, FatouOptions};
use petallab::gauss::GaussRat;
use petallab::germ::{classify_form, FloatGerm, PolyMapGerm, VectorFieldJet};
use petallab::poly::Poly;
use petallab::resolution::{
    classify_biholo_points, overlap_identities_hold, resolve, Chart, ExactVectorField, Model, PointClass, ResolutionTree,
};
use petallab::sector::{domain_membership, DomainKind, DomainSpec, PetalParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn reference_germ() -> FloatGerm {
    PolyMapGerm::new(Poly::x() + Poly::monomial(2, 1, c(-0.5, 0.0)), Poly::y() + Poly::monomial(1, 2, c(-0.5, 0.0))).unwrap()
}

fn reference_domain(kind: DomainKind) -> DomainSpec {
    let petal = PetalParams::new(1, 1, c(-0.5, 0.0), c(-0.5, 0.0), Some(0.25), 0).unwrap();
    DomainSpec { petal, epsilon: 1e-2, theta: PI / 6.0, delta: 0.1, delta_prime: 0.1, r: 0.5, kind }
}

fn leau_fatou_1d() -> Verdict {
    let f = PolyMapGerm::new(Poly::x() + Poly::monomial(2, 0, c(-1.0, 0.0)), Poly::y()).unwrap();
    let opts = IterateOptions::new(10_000, ProductExponents { m: 1, n: 0, d: 1 });
    let trace = iterate(&f, (c(0.05, 0.0), c(0.0, 0.0)), &opts);
    let est = attraction_diagnostic(&trace).unwrap();
    let last = trace.points.len() - 1;
    let direct = last as f64 * trace.points[last].0.re;
    let err = (est.limit - 1.0).norm();
    verdict(!est.failed && err < 1e-2, format!("limit {:.6} (|limit - 1| = {err:.2e}), j x_j at j = {last}: {direct:.6}", est.limit.re))
}

fn petal_invariance() -> Verdict {
    let f = reference_germ();
    let u = reference_domain(DomainKind::U);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fast = f.fast();
    let mut buf = Default::default();
    let mut violations = 0;
    for _ in 0..10_000 {
        let (x, y) = sample_petal_point(&u, &mut rng);
        assert!(domain_membership(x, y, &u));
        let (x1, y1) = fast.apply(x, y, &mut buf);
        if !domain_membership(x1, y1, &u) {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("10000 points of U_0, {violations} violations"))
}

fn fatou_context() -> FatouContext {
    FatouContext::new(reference_germ(), reference_domain(DomainKind::U), FatouOptions::default()).unwrap()
}

fn invariant_function() -> Verdict {
    let ctx = fatou_context();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst, mut worst_u, mut failures) = (0f64, 0f64, 0);
    for _ in 0..100 {
        let (x, y) = sample_petal_point(&ctx.domain, &mut rng);
        let (x1, y1) = ctx.step(x, y);
        match (ctx.psi(x, y), ctx.psi(x1, y1)) {
            (Ok(a), Ok(b)) => {
                worst = worst.max((a.psi - b.psi).norm());
                worst_u = worst_u.max((a.unit_factor - 1.0).norm());
            }
            _ => failures += 1,
        }
    }
    verdict(
        failures == 0 && worst < 1e-10 && worst_u < 0.5,
        format!("max |psi(F p) - psi(p)| = {worst:.2e}, max |u - 1| = {worst_u:.2e}, failures {failures}"),
    )
}

fn fatou_conjugacy() -> Verdict {
    let ctx = fatou_context();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut fiber, mut failures) = (0f64, 0);
    for _ in 0..50 {
        let (z, w) = ctx.sample_v(&mut rng);
        let r = ctx.beta(z, w).and_then(|b0| {
            let z1 = ctx.fiber_map(z, w)?;
            let b1 = ctx.beta(z1, w)?;
            Ok((b1.beta - b0.beta - 1.0).norm())
        });
        match r {
            Ok(e) => fiber = fiber.max(e),
            Err(_) => failures += 1,
        }
    }
    let pts = ctx.sample_chart_points(50, 5);
    let mut chart = 0f64;
    for &(x, y) in &pts {
        let (x1, y1) = ctx.step(x, y);
        match (ctx.chart_value(x, y), ctx.chart_value(x1, y1)) {
            (Ok(a), Ok(b)) => chart = chart.max((b.beta - a.beta - 1.0).norm().max((b.w - a.w).norm())),
            _ => failures += 1,
        }
    }
    verdict(
        failures == 0 && pts.len() == 50 && fiber < 1e-8 && chart < 1e-8,
        format!("fiber residual {fiber:.2e}, chart residual {chart:.2e} over 50 + {} points, failures {failures}", pts.len()),
    )
}

fn flower_coverage() -> Verdict {
    let spec = reference_domain(DomainKind::DTilde);
    let ok = petal_cover_check(&spec, &CoverSampleSpec { count: 10_000, seed: 6, opening_scale: 1.0 });
    let control = petal_cover_check(&spec, &CoverSampleSpec { count: 10_000, seed: 6, opening_scale: 0.5 });
    verdict(
        ok.uncovered == 0 && ok.samples == 10_000 && control.uncovered > 0,
        format!(
            "{} samples: {} attracting, {} repelling, {} uncovered; halved opening: {} uncovered",
            ok.samples, ok.covered_attracting, ok.covered_repelling, ok.uncovered, control.uncovered
        ),
    )
}

fn escape_dichotomy() -> Verdict {
    let f = PolyMapGerm::new(Poly::x() + Poly::monomial(2, 1, c(-2.0, 0.0)), Poly::y() + Poly::monomial(1, 2, c(1.0, 0.0))).unwrap();
    let sig = classify_form(&f).unwrap();
    let window = petallab::dynamics::calibrate_window(&f, &sig).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut escaped, mut max_j) = (0, 0u64);
    let mut starts = 0;
    while starts < 1000 {
        let x = Complex64::from_polar(window.delta * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
        let y = Complex64::from_polar(window.delta * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>());
        if !window.contains(x, y) || x.norm() == 0.0 || y.norm() == 0.0 {
            continue;
        }
        starts += 1;
        if let Ok(r) = escape_analysis(&f, &sig, &window, (x, y), 100_000_000, None) {
            if let EscapeVerdict::Escaped(j) = r.verdict {
                escaped += 1;
                max_j = max_j.max(j);
            }
        }
    }
    let g = flow_germ(1, 1, c(1.0, 0.0), c(-1.0, 0.0), 17);
    let rsig = classify_form(&g).unwrap();
    let rwindow = EscapeWindow { epsilon: 0.25, delta: 0.5, exponents: ProductExponents { m: 1, n: 1, d: 1 } };
    let start = (c(0.1, 0.0), c(0.0, 0.1));
    let r = escape_analysis(&g, &rsig, &rwindow, start, 1000, None).unwrap();
    verdict(
        escaped == 1000 && rsig.resonant && r.steps == 1000 && r.max_abs_x_drift < 1e-12,
        format!("{escaped}/1000 escaped (max j = {max_j}); resonant |x_j| drift {:.2e} over {} steps", r.max_abs_x_drift, r.steps),
    )
}

fn oracle_equivalence() -> Verdict {
    let cases = [(1, 1, c(-0.5, 0.0), c(-0.5, 0.0)), (1, 0, c(-1.0, 0.0), c(-0.5, 0.3)), (2, 1, c(-0.25, 0.1), c(-0.5, 0.0)), (1, 1, c(1.0, 0.0), c(-1.0, 0.0))];
    let mut worst = 0f64;
    for (m, n, a, b) in cases {
        let g = flow_germ(m, n, a, b, 12);
        let fast = g.fast();
        let mut buf = Default::default();
        let start = (Complex64::from_polar(0.05, 0.3), Complex64::from_polar(0.05, -0.2));
        let (mut x, mut y) = start;
        for j in 1..=1000 {
            (x, y) = fast.apply(x, y, &mut buf);
            let (ex, ey) = closed_form_flow(m, n, a, b, start, j as f64).unwrap();
            worst = worst.max(((x - ex).norm() / ex.norm()).max((y - ey).norm() / ey.norm()));
        }
    }
    verdict(worst < 1e-9, format!("max relative error {worst:.2e} over 4 flows x 1000 steps at radius 0.05"))
}

fn q(terms: &[(u32, u32, i64)]) -> Poly<GaussRat> {
    Poly::from_terms(terms.iter().map(|&(i, j, v)| (i, j, GaussRat::from_int(v))))
}

fn second_chart_nonsingular(t: &ResolutionTree) -> bool {
    t.nodes.iter().filter(|n| matches!(n.parent, Some((_, Chart::Second)))).all(|n| {
        let s = &n.saturation.saturated;
        !s.p.coeff(0, 0).is_zero() || !s.q.coeff(0, 0).is_zero()
    })
}

fn resolution() -> Verdict {
    let nilpotent = resolve(&ExactVectorField::new(q(&[(0, 1, 1)]), Poly::zero()), 8).unwrap();
    let leaves: Vec<PointClass> = nilpotent.leaf_points().map(|(_, p)| p.class).collect();
    let a = nilpotent.depth() == 1 && leaves == [PointClass::ReducedNondegenerate] && second_chart_nonsingular(&nilpotent);
    let cusp = resolve(&ExactVectorField::new(q(&[(0, 1, 1)]), q(&[(2, 0, 1)])), 4).unwrap();
    let b = cusp.depth() <= 4 && cusp.leaf_points().all(|(_, p)| p.class != PointClass::NotReduced);
    let radial = resolve(&ExactVectorField::new(q(&[(1, 0, 1)]), q(&[(0, 1, 1)])), 4).unwrap();
    let cc = [&nilpotent, &cusp, &radial].iter().all(|t| overlap_identities_hold(t));
    let flow = VectorFieldJet::new(q(&[(2, 0, 1)]), q(&[(1, 1, -1)]), 8).exp_map();
    let cls = classify_biholo_points(&flow, 8, 4).unwrap();
    let d = cls.points.len() == 1 && {
        let t = &cls.points[0].tag;
        t.model == Model::II && (t.M, t.N) == (1, 0) && t.ab == Some(("1".into(), "-1".into()))
    };
    verdict(
        a && b && cc && d,
        format!("(a) {a} depth {}, (b) {b} depth {}, (c) {cc}, (d) {d} {:?}", nilpotent.depth(), cusp.depth(), cls.points.first().map(|p| &p.tag)),
    )
}

fn parabolic_curve() -> Verdict {
    let f = PolyMapGerm::new(
        Poly::x() + Poly::monomial(2, 0, c(-1.0, 0.0)),
        Poly::y() + Poly::monomial(1, 1, c(-1.0, 0.0)) + Poly::monomial(2, 0, c(1.0, 0.0)),
    )
    .unwrap();
    let opts = CurveOptions::default();
    let curve = match graph_transform_curve(&f, &curve_sector(1, 1e-2, PI / 6.0, 0), &opts) {
        Ok(cv) => cv,
        Err(e) => return verdict(false, format!("curve failed: {e}")),
    };
    let check = template_check(&curve, 0.05).unwrap();
    verdict(
        curve.residual < 1e-8 && curve.samples.len() == 64 * 33 && check.matches,
        format!(
            "residual {:.2e} on {}x{} grid, K = {:.3}, template a ~ {:.4}, b ~ {:.4}, axis defect {:.1e}",
            curve.residual, opts.rings, opts.angles, curve.bound_constant, check.a_estimate, check.b_estimate, check.axis_defect
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict, u64); 9] = [
        ("1 Leau-Fatou 1-D sanity", leau_fatou_1d, 1),
        ("2 petal invariance", petal_invariance, 5),
        ("3 invariant function", invariant_function, 10),
        ("4 Fatou conjugacy", fatou_conjugacy, 60),
        ("5 flower coverage", flower_coverage, 10),
        ("6 escape dichotomy", escape_dichotomy, 30),
        ("7 oracle equivalence", oracle_equivalence, 5),
        ("8 resolution correctness", resolution, 10),
        ("9 parabolic curve", parabolic_curve, 30),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let t0 = Instant::now();
        let v = run();
        let dt = t0.elapsed();
        let in_time = dt < Duration::from_secs(limit);
        let pass = v.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!("{} criterion {name}: {} [{:.2}s / {limit}s]", if pass { "PASS" } else { "FAIL" }, v.detail, dt.as_secs_f64());
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use petallab::curve::{curve_sector, graph_transform_curve, template_check, CurveOptions};
use petallab::dynamics::{
    calibrate_window, closed_form_flow, coverage_of, escape_analysis, flow_germ, petal_cover_check, CoverSampleSpec,
    Coverage, EscapeVerdict,
};
use petallab::fatou::{FatouContext, FatouOptions};
use petallab::germ::{classify_form, normalize, FloatGerm, Form, FormSignature, Normalized};
use petallab::io::{parse_germ_json, write_pgm, GermInput, InputKind};
use petallab::resolution::{classify_biholo_points, resolve};
use petallab::sector::{DomainKind, DomainSpec, PetalParams};
use rayon::prelude::*;
use serde_json::{json, Value};

mod manifest;
use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "petallab", version, about = "Petals, Fatou coordinates, escape fields and blow-up resolution for germs of C^2")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Germ file path or inline JSON.
    #[arg(long, global = true, env = "PETALLAB_GERM")]
    germ: Option<String>,
    #[arg(long, global = true, env = "PETALLAB_ORDER", default_value_t = 8)]
    order: u32,
    #[arg(long, global = true, env = "PETALLAB_EPSILON", default_value_t = 1e-2)]
    epsilon: f64,
    #[arg(long, global = true, env = "PETALLAB_THETA", default_value_t = PI / 6.0)]
    theta: f64,
    #[arg(long, global = true, env = "PETALLAB_GAMMA")]
    gamma: Option<f64>,
    #[arg(long, global = true, env = "PETALLAB_DELTA", default_value_t = 0.1)]
    delta: f64,
    /// Inner polydisc radius; defaults to --delta.
    #[arg(long, global = true, env = "PETALLAB_DELTA_PRIME")]
    delta_prime: Option<f64>,
    #[arg(long, global = true, env = "PETALLAB_R", default_value_t = 0.5)]
    r: f64,
    /// Raster size as WxH.
    #[arg(long, global = true, env = "PETALLAB_GRID", default_value = "64x64", value_parser = parse_grid)]
    grid: (usize, usize),
    #[arg(long, global = true, env = "PETALLAB_MAX_STEPS", default_value_t = 10_000)]
    max_steps: u64,
    #[arg(long, global = true, env = "PETALLAB_TOL", default_value_t = 1e-8)]
    tol: f64,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "PETALLAB_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Output directory; without it only the summary is printed.
    #[arg(long, global = true, env = "PETALLAB_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "PETALLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Petal index k.
    #[arg(long, global = true, env = "PETALLAB_PETAL", default_value_t = 0)]
    petal: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest-order template, exponents and sign conditions.
    Classify,
    /// Coverage of a neighbourhood by extended petals.
    Flower {
        #[arg(long, env = "PETALLAB_COUNT", default_value_t = 10_000)]
        count: usize,
    },
    /// Fatou chart values and conjugacy residuals.
    Fatou {
        /// CSV of re_x,im_x,re_y,im_y; random petal points when absent.
        #[arg(long, env = "PETALLAB_POINTS")]
        points: Option<PathBuf>,
        #[arg(long, env = "PETALLAB_COUNT", default_value_t = 50)]
        count: usize,
    },
    /// Escape-time field.
    Escape,
    /// Blow-up resolution of an exact field, or of the logarithm of an exact germ.
    Resolve {
        #[arg(long, env = "PETALLAB_MAX_DEPTH", default_value_t = 8)]
        max_depth: usize,
    },
    /// Parabolic curve of a noncorner germ.
    Curve {
        #[arg(long, env = "PETALLAB_RINGS", default_value_t = 64)]
        rings: usize,
        #[arg(long, env = "PETALLAB_ANGLES", default_value_t = 33)]
        angles: usize,
    },
    /// Truncated flow germ against the closed-form flow.
    Oracle {
        /// M,N,re_a,im_a,re_b,im_b
        #[arg(long, env = "PETALLAB_FLOW", default_value = "1,1,-0.5,0,-0.5,0")]
        flow: String,
        #[arg(long, env = "PETALLAB_RADIUS", default_value_t = 0.05)]
        radius: f64,
    },
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width {w}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height {h}"))?;
    if w == 0 || h == 0 {
        return Err("grid must be non-empty".into());
    }
    Ok((w, h))
}

struct Failure {
    code: u8,
    message: String,
}

impl From<petallab::Error> for Failure {
    fn from(e: petallab::Error) -> Self {
        Failure { code: e.exit_code() as u8, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 3, message: e.to_string() }
    }
}

fn io_fail(msg: impl Into<String>) -> Failure {
    Failure { code: 3, message: msg.into() }
}

type Res<T> = std::result::Result<T, Failure>;

/// Summary printed on stdout and the exit code to report with it.
struct Outcome {
    summary: Value,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(o) => {
            println!("{}", serde_json::to_string_pretty(&o.summary).expect("summary serializes"));
            ExitCode::from(o.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Res<Outcome> {
    let o = &cli.opts;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(o.jobs).build().map_err(|e| io_fail(e.to_string()))?;
    let (name, extra) = match &cli.command {
        Command::Classify => ("classify", json!({})),
        Command::Flower { count } => ("flower", json!({ "count": count })),
        Command::Fatou { points, count } => ("fatou", json!({ "points": points, "count": count })),
        Command::Escape => ("escape", json!({})),
        Command::Resolve { max_depth } => ("resolve", json!({ "max_depth": max_depth })),
        Command::Curve { rings, angles } => ("curve", json!({ "rings": rings, "angles": angles })),
        Command::Oracle { flow, radius } => ("oracle", json!({ "flow": flow, "radius": radius })),
    };
    let manifest = RunManifest::new(name, o.germ.clone(), parameters(o, extra), o.seed);
    let ctx = Ctx { opts: o, hash: manifest.hash() };
    if let Some(dir) = &o.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("manifest.json"), &manifest.to_json())?;
    }
    let mut outcome = pool.install(|| match &cli.command {
        Command::Classify => cmd_classify(&ctx),
        Command::Flower { count } => cmd_flower(&ctx, *count),
        Command::Fatou { points, count } => cmd_fatou(&ctx, points.as_deref(), *count),
        Command::Escape => cmd_escape(&ctx),
        Command::Resolve { max_depth } => cmd_resolve(&ctx, *max_depth),
        Command::Curve { rings, angles } => cmd_curve(&ctx, *rings, *angles),
        Command::Oracle { flow, radius } => cmd_oracle(&ctx, flow, *radius),
    })?;
    outcome.summary["manifest_hash"] = Value::String(ctx.hash.clone());
    Ok(outcome)
}

fn parameters(o: &Opts, extra: Value) -> BTreeMap<String, Value> {
    let mut p = BTreeMap::new();
    p.insert("order".into(), json!(o.order));
    p.insert("epsilon".into(), json!(o.epsilon));
    p.insert("theta".into(), json!(o.theta));
    p.insert("gamma".into(), json!(o.gamma));
    p.insert("delta".into(), json!(o.delta));
    p.insert("delta_prime".into(), json!(o.delta_prime.unwrap_or(o.delta)));
    p.insert("r".into(), json!(o.r));
    p.insert("grid".into(), json!([o.grid.0, o.grid.1]));
    p.insert("max_steps".into(), json!(o.max_steps));
    p.insert("tol".into(), json!(o.tol));
    p.insert("petal".into(), json!(o.petal));
    if let Value::Object(m) = extra {
        p.extend(m);
    }
    p
}

struct Ctx<'a> {
    opts: &'a Opts,
    hash: String,
}

impl Ctx<'_> {
    fn input(&self) -> Res<GermInput> {
        let src = self.opts.germ.as_deref().ok_or_else(|| io_fail("--germ is required"))?;
        let trimmed = src.trim_start();
        let text = if trimmed.starts_with('[') || trimmed.starts_with('{') {
            src.to_string()
        } else {
            fs::read_to_string(src).map_err(|e| io_fail(format!("{src}: {e}")))?
        };
        Ok(parse_germ_json(&text)?)
    }

    fn float_germ(&self) -> Res<FloatGerm> {
        Ok(self.input()?.float_germ()?)
    }

    fn domain(&self, petal: PetalParams, kind: DomainKind) -> Res<DomainSpec> {
        let o = self.opts;
        let d = DomainSpec {
            petal,
            epsilon: o.epsilon,
            theta: o.theta,
            delta: o.delta,
            delta_prime: o.delta_prime.unwrap_or(o.delta),
            r: o.r,
            kind,
        };
        d.validate()?;
        Ok(d)
    }

    fn normalized_petal(&self, f: &FloatGerm) -> Res<(Normalized, PetalParams)> {
        let sig = classify_form(f)?;
        let norm = normalize(f, &sig)?;
        let s = norm.signature;
        let petal = PetalParams::new(s.M, s.N, s.a, s.b, self.opts.gamma, self.opts.petal)?;
        Ok((norm, petal))
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.opts.out.as_ref().map(|d| d.join(name))
    }

    fn stamp(&self, mut v: Value) -> Value {
        v["manifest_hash"] = Value::String(self.hash.clone());
        v
    }
}

fn write_json(path: &Path, v: &Value) -> Res<()> {
    fs::write(path, serde_json::to_string_pretty(v).expect("json serializes") + "\n")?;
    Ok(())
}

fn create(path: &Path) -> Res<std::io::BufWriter<fs::File>> {
    Ok(std::io::BufWriter::new(fs::File::create(path)?))
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn signature_json(s: &FormSignature) -> Value {
    let form = match s.form {
        Form::Corner => "corner",
        Form::Noncorner => "noncorner",
        Form::Other => "other",
    };
    json!({
        "form": form,
        "M": s.M,
        "N": s.N,
        "a": c_json(s.a),
        "b": c_json(s.b),
        "c": s.c.map(c_json),
        "satisfies_attracting_condition": s.satisfies_attracting_condition,
        "satisfies_repelling_condition": s.satisfies_repelling_condition,
        "resonant": s.resonant,
    })
}

fn cmd_classify(ctx: &Ctx) -> Res<Outcome> {
    let f = ctx.float_germ()?;
    let sig = classify_form(&f)?;
    let mut report = json!({ "signature": signature_json(&sig) });
    if let Ok(n) = normalize(&f, &sig) {
        report["normalization"] = json!({
            "alpha": c_json(n.change.alpha),
            "beta": c_json(n.change.beta),
            "signature": signature_json(&n.signature),
            "petal": n.petal.map(|p| json!({"d": p.d, "m": p.m, "n": p.n, "p": p.p, "q": p.q, "gamma": p.gamma, "lambda": c_json(p.lambda)})),
        });
    }
    eprintln!("form {} M={} N={} a={} b={}", report["signature"]["form"], sig.M, sig.N, sig.a, sig.b);
    let report = ctx.stamp(report);
    if let Some(p) = ctx.path("classify.json") {
        write_json(&p, &report)?;
    }
    let code = if sig.form == Form::Other { 2 } else { 0 };
    if code == 2 {
        eprintln!("error: germ does not match the corner or noncorner template");
    }
    Ok(Outcome { summary: report, code })
}

fn raster_points(w: usize, h: usize, half: f64) -> Vec<Complex64> {
    (0..h)
        .flat_map(|r| {
            (0..w).map(move |c| {
                let re = -half + 2.0 * half * (c as f64 + 0.5) / w as f64;
                let im = half - 2.0 * half * (r as f64 + 0.5) / h as f64;
                Complex64::new(re, im)
            })
        })
        .collect()
}

fn emit_raster(ctx: &Ctx, stem: &str, pixels: &[u8], geometry: Value) -> Res<()> {
    let (w, h) = ctx.opts.grid;
    if let Some(p) = ctx.path(&format!("{stem}.pgm")) {
        let mut out = create(&p)?;
        write_pgm(&mut out, w, h, pixels, Some(&format!("manifest-sha256 {}", ctx.hash)))?;
        out.flush()?;
    }
    if let Some(p) = ctx.path(&format!("{stem}.json")) {
        write_json(&p, &ctx.stamp(geometry))?;
    }
    Ok(())
}

fn cmd_flower(ctx: &Ctx, count: usize) -> Res<Outcome> {
    let f = ctx.float_germ()?;
    let (_, petal) = ctx.normalized_petal(&f)?;
    let domain = ctx.domain(petal, DomainKind::DTilde)?;
    let report = petal_cover_check(&domain, &CoverSampleSpec { count, seed: ctx.opts.seed, opening_scale: 1.0 });
    let (w, h) = ctx.opts.grid;
    let half = domain.delta_prime;
    let y0 = Complex64::new(0.5 * half, 0.0);
    let pixels: Vec<u8> = raster_points(w, h, half)
        .par_iter()
        .map(|&x| match coverage_of(x, y0, &domain, 1.0) {
            Coverage::Fixed => 255,
            Coverage::Attracting(_) => 170,
            Coverage::Repelling(_) => 85,
            Coverage::Uncovered => 0,
        })
        .collect();
    let summary = json!({
        "samples": report.samples,
        "fixed": report.fixed,
        "covered_attracting": report.covered_attracting,
        "covered_repelling": report.covered_repelling,
        "uncovered": report.uncovered,
        "sample_radius": report.sample_radius,
        "counterexamples": report.counterexamples.iter().map(|&(x, y)| json!([c_json(x), c_json(y)])).collect::<Vec<_>>(),
    });
    let geometry = json!({
        "plane": "x", "y": c_json(y0), "re_range": [-half, half], "im_range": [-half, half], "width": w, "height": h,
        "levels": {"fixed": 255, "attracting": 170, "repelling": 85, "uncovered": 0},
        "report": summary.clone(),
    });
    emit_raster(ctx, "flower", &pixels, geometry)?;
    let code = if report.uncovered == 0 { 0 } else { 2 };
    Ok(Outcome { summary, code })
}

fn read_points(path: &Path) -> Res<Vec<(Complex64, Complex64)>> {
    let text = fs::read_to_string(path).map_err(|e| io_fail(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("re_x") {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| io_fail(format!("line {}: {e}", k + 1)))?;
        if v.len() != 4 {
            return Err(io_fail(format!("line {}: expected re_x,im_x,re_y,im_y", k + 1)));
        }
        out.push((Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])));
    }
    Ok(out)
}

fn cmd_fatou(ctx: &Ctx, points: Option<&Path>, count: usize) -> Res<Outcome> {
    let f = ctx.float_germ()?;
    let (norm, petal) = ctx.normalized_petal(&f)?;
    let domain = ctx.domain(petal, DomainKind::U)?;
    let (al, be) = (norm.change.alpha, norm.change.beta);
    let fatou = FatouContext::new(norm.germ.clone(), domain, FatouOptions::default())?;
    let pts: Vec<(Complex64, Complex64)> = match points {
        Some(p) => read_points(p)?.into_iter().map(|(x, y)| (x / al, y / be)).collect(),
        None => fatou.sample_chart_points(count, ctx.opts.seed),
    };
    let rows: Vec<_> = pts
        .par_iter()
        .map(|&(x, y)| {
            let max_j = ctx.opts.max_steps;
            let (v, _) = fatou.chart_extended(x, y, max_j)?;
            let (x1, y1) = fatou.step(x, y);
            let (v1, _) = fatou.chart_extended(x1, y1, max_j)?;
            let res = (v1.beta - v.beta - 1.0).norm().max((v1.w - v.w).norm());
            Ok::<_, petallab::Error>((x, y, v, res))
        })
        .collect();
    let mut max_res: f64 = 0.0;
    let mut failures = 0usize;
    let mut csv = String::from("re_x,im_x,re_y,im_y,re_z,im_z,re_w,im_w,re_beta,im_beta,error_estimate,residual\n");
    for r in &rows {
        match r {
            Ok((x, y, v, res)) => {
                max_res = max_res.max(*res);
                let (ox, oy) = (x * al, y * be);
                csv += &format!(
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e},{:.3e}\n",
                    ox.re, ox.im, oy.re, oy.im, v.z.re, v.z.im, v.w.re, v.w.im, v.beta.re, v.beta.im, v.error_estimate, res
                );
            }
            Err(e) => {
                failures += 1;
                eprintln!("point skipped: {e}");
            }
        }
    }
    if let Some(p) = ctx.path("fatou.csv") {
        fs::write(p, format!("# manifest-sha256 {}\n{csv}", ctx.hash))?;
    }
    let summary = json!({ "points": pts.len(), "failed": failures, "max_conjugacy_residual": max_res, "tol": ctx.opts.tol });
    let code = if failures == 0 && max_res < ctx.opts.tol { 0 } else { 2 };
    Ok(Outcome { summary, code })
}

fn cmd_escape(ctx: &Ctx) -> Res<Outcome> {
    let f = ctx.float_germ()?;
    let sig = classify_form(&f)?;
    let window = calibrate_window(&f, &sig)?;
    let (w, h) = ctx.opts.grid;
    let y0 = Complex64::new(0.5 * window.delta, 0.0);
    let verdicts: Vec<_> = raster_points(w, h, window.delta)
        .par_iter()
        .map(|&x| escape_analysis(&f, &sig, &window, (x, y0), ctx.opts.max_steps, None))
        .collect::<petallab::Result<Vec<_>>>()?;
    let (mut escaped, mut bounded, mut fixed, mut max_j, mut sum_j) = (0usize, 0usize, 0usize, 0u64, 0u64);
    let pixels: Vec<u8> = verdicts
        .iter()
        .map(|r| {
            if r.on_fixed_set {
                fixed += 1;
                return 0;
            }
            match r.verdict {
                EscapeVerdict::Escaped(j) => {
                    escaped += 1;
                    max_j = max_j.max(j);
                    sum_j += j;
                    (255.0 - 16.0 * ((j + 1) as f64).log2()).clamp(1.0, 255.0) as u8
                }
                _ => {
                    bounded += 1;
                    0
                }
            }
        })
        .collect();
    let summary = json!({
        "signature": signature_json(&sig),
        "window": {"epsilon": window.epsilon, "delta": window.delta},
        "pixels": w * h, "escaped": escaped, "stayed_bounded": bounded, "on_fixed_set": fixed,
        "max_escape_step": max_j, "mean_escape_step": if escaped > 0 { sum_j as f64 / escaped as f64 } else { 0.0 },
    });
    let geometry = json!({
        "plane": "x", "y": c_json(y0), "re_range": [-window.delta, window.delta], "im_range": [-window.delta, window.delta],
        "width": w, "height": h, "max_steps": ctx.opts.max_steps, "statistics": summary.clone(),
    });
    emit_raster(ctx, "escape", &pixels, geometry)?;
    Ok(Outcome { summary, code: 0 })
}

fn cmd_resolve(ctx: &Ctx, max_depth: usize) -> Res<Outcome> {
    let input = ctx.input()?;
    let (tree, points) = match input.kind {
        InputKind::Field => (resolve(&input.exact_field()?, max_depth)?, None),
        InputKind::Germ => {
            let c = classify_biholo_points(&input.exact_germ()?, ctx.opts.order, max_depth)?;
            let pts = serde_json::to_value(&c.points).expect("points serialize");
            (c.tree, Some(json!({ "points": pts, "divisor_pointwise_fixed": c.divisor_pointwise_fixed })))
        }
    };
    let mut doc = tree.to_json();
    if let Some(p) = &points {
        doc["biholomorphism"] = p.clone();
    }
    if let Some(p) = ctx.path("resolve.json") {
        write_json(&p, &ctx.stamp(doc))?;
    }
    if let Some(p) = ctx.path("resolve.dot") {
        fs::write(p, format!("// manifest-sha256 {}\n{}", ctx.hash, tree.to_dot()))?;
    }
    let leaves: Vec<Value> = tree
        .leaf_points()
        .map(|(n, p)| json!({"node": n.id, "coords": [p.coords.0.to_string(), p.coords.1.to_string()], "class": p.class, "corner": p.is_corner()}))
        .collect();
    let mut summary = json!({ "depth": tree.depth(), "nodes": tree.nodes.len(), "leaves": leaves });
    if let Some(p) = points {
        summary["biholomorphism"] = p;
    }
    Ok(Outcome { summary, code: 0 })
}

fn cmd_curve(ctx: &Ctx, rings: usize, angles: usize) -> Res<Outcome> {
    let f = ctx.float_germ()?;
    let sig = classify_form(&f)?;
    let norm = normalize(&f, &sig)?;
    if norm.signature.form != Form::Noncorner {
        return Err(petallab::Error::TemplateMismatch("parabolic curves need a noncorner germ".into()).into());
    }
    let sector = curve_sector(norm.signature.M, ctx.opts.epsilon, ctx.opts.theta, ctx.opts.petal);
    let options = CurveOptions { rings, angles, tol: ctx.opts.tol, max_steps: ctx.opts.max_steps as usize, ..CurveOptions::default() };
    let curve = graph_transform_curve(&norm.germ, &sector, &options)?;
    let check = template_check(&curve, 0.05)?;
    if let Some(p) = ctx.path("curve.csv") {
        let mut out = create(&p)?;
        writeln!(out, "# manifest-sha256 {}", ctx.hash)?;
        curve.write_csv(&mut out)?;
        out.flush()?;
    }
    let summary = json!({
        "sector": curve.sector,
        "residual": curve.residual,
        "bound_constant": curve.bound_constant,
        "interpolation_error": curve.interpolation_error,
        "samples": curve.samples.len(),
        "normalization": {"alpha": c_json(norm.change.alpha), "beta": c_json(norm.change.beta)},
        "template": {
            "a": c_json(check.a), "b": c_json(check.b), "a_estimate": c_json(check.a_estimate), "b_estimate": c_json(check.b_estimate),
            "axis_defect": check.axis_defect, "matches": check.matches,
        },
    });
    if let Some(p) = ctx.path("curve.json") {
        write_json(&p, &ctx.stamp(summary.clone()))?;
    }
    Ok(Outcome { summary, code: if check.matches { 0 } else { 2 } })
}

#[allow(non_snake_case)]
fn cmd_oracle(ctx: &Ctx, flow: &str, radius: f64) -> Res<Outcome> {
    let v: Vec<f64> = flow
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| io_fail(format!("--flow: {e}")))?;
    if v.len() != 6 || v[0] < 0.0 || v[1] < 0.0 || v[0].fract() != 0.0 || v[1].fract() != 0.0 {
        return Err(io_fail("--flow expects M,N,re_a,im_a,re_b,im_b with integer M, N"));
    }
    let (M, N) = (v[0] as u32, v[1] as u32);
    let (a, b) = (Complex64::new(v[2], v[3]), Complex64::new(v[4], v[5]));
    let g = flow_germ(M, N, a, b, ctx.opts.order.max(2));
    let fast = g.fast();
    let mut buf = petallab::germ::MapBuffers::default();
    let start = (Complex64::from_polar(radius, 0.3), Complex64::from_polar(radius, -0.2));
    let (mut x, mut y) = start;
    let mut worst: f64 = 0.0;
    let mut csv = String::from("j,re_x,im_x,re_y,im_y,rel_error\n");
    for j in 1..=ctx.opts.max_steps {
        (x, y) = fast.apply(x, y, &mut buf);
        let (ex, ey) = closed_form_flow(M, N, a, b, start, j as f64)?;
        let rel = ((x - ex).norm() / ex.norm().max(f64::MIN_POSITIVE)).max((y - ey).norm() / ey.norm().max(f64::MIN_POSITIVE));
        worst = worst.max(rel);
        csv += &format!("{j},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}\n", x.re, x.im, y.re, y.im, rel);
    }
    if let Some(p) = ctx.path("oracle.csv") {
        fs::write(p, format!("# manifest-sha256 {}\n{csv}", ctx.hash))?;
    }
    let summary = json!({ "steps": ctx.opts.max_steps, "radius": radius, "order": g.truncation_order, "max_relative_error": worst, "tol": ctx.opts.tol });
    Ok(Outcome { summary, code: if worst < ctx.opts.tol { 0 } else { 2 } })
}

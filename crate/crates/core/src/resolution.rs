//! Exact blow-up resolution of plane vector fields over `Q(i)` and reduced-model tags
//! for unipotent germs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::germ::{formal_log, PolyMapGerm};
use crate::poly::Poly;

pub type QPoly = Poly<GaussRat>;
type Uni = Vec<GaussRat>;

fn q(n: i64) -> GaussRat {
    GaussRat::from_int(n)
}

fn uni_trim(mut a: Uni) -> Uni {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn uni_sub(a: &[GaussRat], b: &[GaussRat]) -> Uni {
    let n = a.len().max(b.len());
    uni_trim((0..n).map(|i| a.get(i).cloned().unwrap_or_else(GaussRat::zero) - b.get(i).cloned().unwrap_or_else(GaussRat::zero)).collect())
}

fn uni_mul(a: &[GaussRat], b: &[GaussRat]) -> Uni {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![GaussRat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    uni_trim(out)
}

fn uni_scale(a: &[GaussRat], s: &GaussRat) -> Uni {
    uni_trim(a.iter().map(|c| c.clone() * s.clone()).collect())
}

fn uni_divrem(a: &[GaussRat], b: &[GaussRat]) -> (Uni, Uni) {
    let mut r = uni_trim(a.to_vec());
    let db = b.len() - 1;
    let lb = b[db].inv();
    let mut qv = vec![GaussRat::zero(); r.len().saturating_sub(db)];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r[r.len() - 1].clone() * lb.clone();
        for (i, bc) in b.iter().enumerate() {
            r[k + i] = r[k + i].clone() - c.clone() * bc.clone();
        }
        qv[k] = c;
        r = uni_trim(r);
    }
    (uni_trim(qv), r)
}

fn uni_monic(a: Uni) -> Uni {
    match a.last() {
        Some(l) => {
            let inv = l.inv();
            uni_scale(&a, &inv)
        }
        None => a,
    }
}

fn uni_gcd(a: &[GaussRat], b: &[GaussRat]) -> Uni {
    let (mut a, mut b) = (uni_trim(a.to_vec()), uni_trim(b.to_vec()));
    while !b.is_empty() {
        let (_, r) = uni_divrem(&a, &b);
        a = b;
        b = r;
    }
    uni_monic(a)
}

fn uni_eval(a: &[GaussRat], t: &GaussRat) -> GaussRat {
    a.iter().rev().fold(GaussRat::zero(), |acc, c| acc * t.clone() + c.clone())
}

fn uni_deriv(a: &[GaussRat]) -> Uni {
    uni_trim(a.iter().enumerate().skip(1).map(|(i, c)| c.clone() * q(i as i64)).collect())
}

/// Coefficients in `y` with coefficients in `Q(i)[x]`.
fn to_bi(p: &QPoly) -> Vec<Uni> {
    let mut out = vec![Vec::new(); p.degree_y() as usize + 1];
    for (i, j, c) in p.terms() {
        let row = &mut out[j as usize];
        if row.len() <= i as usize {
            row.resize(i as usize + 1, GaussRat::zero());
        }
        row[i as usize] = c.clone();
    }
    if p.is_zero() {
        out.clear();
    }
    out
}

fn from_bi(b: &[Uni]) -> QPoly {
    Poly::from_terms(b.iter().enumerate().flat_map(|(j, row)| row.iter().enumerate().map(move |(i, c)| (i as u32, j as u32, c.clone()))))
}

fn bi_trim(mut b: Vec<Uni>) -> Vec<Uni> {
    while b.last().is_some_and(|r| r.is_empty()) {
        b.pop();
    }
    b
}

fn bi_content(b: &[Uni]) -> Uni {
    b.iter().fold(Vec::new(), |g, c| if c.is_empty() { g } else { uni_gcd(&g, c) })
}

fn bi_primitive(b: &[Uni]) -> Vec<Uni> {
    let c = bi_content(b);
    b.iter().map(|r| if r.is_empty() { Vec::new() } else { uni_divrem(r, &c).0 }).collect()
}

fn bi_prem(a: &[Uni], b: &[Uni]) -> Vec<Uni> {
    let mut r = bi_trim(a.to_vec());
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let lr = r[r.len() - 1].clone();
        let mut next: Vec<Uni> = r.iter().map(|c| uni_mul(c, &lb)).collect();
        for (i, bc) in b.iter().enumerate() {
            next[k + i] = uni_sub(&next[k + i], &uni_mul(bc, &lr));
        }
        r = bi_trim(next);
        if !r.is_empty() {
            r = bi_primitive(&r);
        }
    }
    r
}

/// Leading coefficient in the order `(deg_y, deg_x)` made equal to one.
pub fn normalize_poly(p: &QPoly) -> QPoly {
    match p.terms().max_by_key(|&(i, j, _)| (j, i)) {
        Some((_, _, c)) => {
            let inv = c.inv();
            p.scale(&inv)
        }
        None => p.clone(),
    }
}

/// Greatest common divisor in `Q(i)[x, y]`, normalized by [`normalize_poly`].
pub fn poly_gcd(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_zero() {
        return normalize_poly(b);
    }
    if b.is_zero() {
        return normalize_poly(a);
    }
    let (ba, bb) = (to_bi(a), to_bi(b));
    let cont = uni_gcd(&bi_content(&ba), &bi_content(&bb));
    let (mut u, mut v) = (bi_primitive(&ba), bi_primitive(&bb));
    if u.len() < v.len() {
        std::mem::swap(&mut u, &mut v);
    }
    while v.len() > 1 {
        let r = bi_prem(&u, &v);
        u = v;
        v = r;
        if v.is_empty() {
            break;
        }
    }
    let g = if v.len() == 1 { vec![vec![q(1)]] } else { bi_primitive(&u) };
    let g: Vec<Uni> = g.iter().map(|r| uni_mul(r, &cont)).collect();
    normalize_poly(&from_bi(&g))
}

/// Exact quotient `a / d`, or `None` when `d` does not divide `a`.
pub fn exact_div(a: &QPoly, d: &QPoly) -> Option<QPoly> {
    let (di, dj, dc) = d.terms().max_by_key(|&(i, j, _)| (j, i)).map(|(i, j, c)| (i, j, c.clone()))?;
    let dinv = dc.inv();
    let mut r = a.clone();
    let mut quo = QPoly::zero();
    while let Some((i, j, c)) = r.terms().max_by_key(|&(i, j, _)| (j, i)).map(|(i, j, c)| (i, j, c.clone())) {
        if i < di || j < dj {
            return None;
        }
        let t = QPoly::monomial(i - di, j - dj, c * dinv.clone());
        r = r - &t * d;
        quo = quo + t;
    }
    Some(quo)
}

fn is_constant(p: &QPoly) -> bool {
    p.terms().all(|(i, j, _)| i == 0 && j == 0)
}

fn translate(p: &QPoly, a: &GaussRat, b: &GaussRat) -> QPoly {
    let px = QPoly::x() + QPoly::constant(a.clone());
    let py = QPoly::y() + QPoly::constant(b.clone());
    p.compose(&px, &py, None)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactVectorField {
    pub p: QPoly,
    pub q: QPoly,
    pub truncation_order: Option<u32>,
}

impl ExactVectorField {
    pub fn new(p: QPoly, q: QPoly) -> Self {
        ExactVectorField { p, q, truncation_order: None }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn translate(&self, a: &GaussRat, b: &GaussRat) -> Self {
        ExactVectorField { p: translate(&self.p, a, b), q: translate(&self.q, a, b), truncation_order: self.truncation_order }
    }

    fn scale_poly(&self, f: &QPoly) -> Self {
        ExactVectorField { p: &self.p * f, q: &self.q * f, truncation_order: self.truncation_order }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaturationResult {
    pub factor: QPoly,
    pub saturated: ExactVectorField,
    /// Radical of the factor, split into `x`, `y` and the remaining part.
    pub singular_locus: Vec<QPoly>,
    /// Saturated field has non-unit components but the factor is a unit.
    pub isolated_origin: bool,
}

pub fn saturate(x: &ExactVectorField) -> Result<SaturationResult> {
    if x.is_zero() {
        return Err(Error::ZeroField);
    }
    let single = if x.p.is_zero() { Some(&x.q) } else if x.q.is_zero() { Some(&x.p) } else { None };
    let f = match single {
        Some(c) if c.order().is_some_and(|o| o <= 1) => QPoly::constant(q(1)),
        _ => poly_gcd(&x.p, &x.q),
    };
    let a = exact_div(&x.p, &f).expect("gcd divides P");
    let b = exact_div(&x.q, &f).expect("gcd divides Q");
    let saturated = ExactVectorField { p: a, q: b, truncation_order: x.truncation_order };
    let singular_locus = radical_factors(&f);
    let unit = |p: &QPoly| !p.coeff(0, 0).is_zero();
    let isolated_origin = singular_locus.is_empty() && !unit(&saturated.p) && !unit(&saturated.q);
    Ok(SaturationResult { factor: f, saturated, singular_locus, isolated_origin })
}

/// Saturation in a blow-up chart: powers of the exceptional divisor are also
/// removed when one component vanishes identically.
pub fn saturate_in_chart(x: &ExactVectorField, chart: Chart) -> Result<SaturationResult> {
    let mut s = saturate(x)?;
    if x.p.is_zero() || x.q.is_zero() {
        let e = match chart {
            Chart::First => (1, 0),
            Chart::Second => (0, 1),
        };
        let axis = QPoly::monomial(e.0, e.1, q(1));
        while let (Some(a), Some(b)) = (exact_div(&s.saturated.p, &axis), exact_div(&s.saturated.q, &axis)) {
            s.saturated.p = a;
            s.saturated.q = b;
            s.factor = &s.factor * &axis;
        }
        s.singular_locus = radical_factors(&s.factor);
        let unit = |p: &QPoly| !p.coeff(0, 0).is_zero();
        s.isolated_origin = s.singular_locus.is_empty() && !unit(&s.saturated.p) && !unit(&s.saturated.q);
    }
    Ok(s)
}

fn radical_factors(f: &QPoly) -> Vec<QPoly> {
    if is_constant(f) {
        return Vec::new();
    }
    let g = poly_gcd(&poly_gcd(f, &f.deriv_x()), &f.deriv_y());
    let mut r = normalize_poly(&exact_div(f, &g).expect("gcd divides f"));
    let mut out = Vec::new();
    for axis in [QPoly::x(), QPoly::y()] {
        if let Some(qt) = exact_div(&r, &axis) {
            out.push(axis);
            r = qt;
        }
    }
    if !is_constant(&r) {
        out.push(normalize_poly(&r));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    ReducedNondegenerate,
    ReducedSaddleNode,
    NonSingular,
    NotReduced,
}

fn linear_part(x: &ExactVectorField) -> [[GaussRat; 2]; 2] {
    [[x.p.coeff(1, 0), x.p.coeff(0, 1)], [x.q.coeff(1, 0), x.q.coeff(0, 1)]]
}

fn trace_det(l: &[[GaussRat; 2]; 2]) -> (GaussRat, GaussRat) {
    let t = l[0][0].clone() + l[1][1].clone();
    let d = l[0][0].clone() * l[1][1].clone() - l[0][1].clone() * l[1][0].clone();
    (t, d)
}

/// Exact test of `lambda_2 / lambda_1` in `Q_{>0}` through `s = T^2 / D`.
fn ratio_positive_rational(t: &GaussRat, d: &GaussRat) -> bool {
    let s = t.clone() * t.clone() / d.clone();
    if !s.is_real() || s.re < q(4).re {
        return false;
    }
    let disc = s.clone() * (s - q(4));
    crate::gauss::rational_sqrt(&disc.re).is_some()
}

pub fn classify_point(x: &ExactVectorField, p: (&GaussRat, &GaussRat)) -> PointClass {
    let y = x.translate(p.0, p.1);
    if !y.p.coeff(0, 0).is_zero() || !y.q.coeff(0, 0).is_zero() {
        return PointClass::NonSingular;
    }
    let (t, d) = trace_det(&linear_part(&y));
    match (t.is_zero(), d.is_zero()) {
        (true, true) => PointClass::NotReduced,
        (false, true) => PointClass::ReducedSaddleNode,
        _ if ratio_positive_rational(&t, &d) => PointClass::NotReduced,
        _ => PointClass::ReducedNondegenerate,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// `y = t x`, exceptional divisor `{x = 0}`.
    First,
    /// `x = s y`, exceptional divisor `{y = 0}`.
    Second,
}

/// Total transform in one chart of the blow-up at `center`.
pub fn blow_up_chart(x: &ExactVectorField, center: (&GaussRat, &GaussRat), chart: Chart) -> ExactVectorField {
    let y = x.translate(center.0, center.1);
    let tx = QPoly::monomial(1, 1, q(1));
    match chart {
        Chart::First => {
            let p = y.p.compose(&QPoly::x(), &tx, None);
            let qq = y.q.compose(&QPoly::x(), &tx, None);
            let num = qq - &QPoly::y() * &p;
            let t = num.div_monomial(1, 0).expect("center is singular");
            ExactVectorField { p, q: t, truncation_order: x.truncation_order }
        }
        Chart::Second => {
            let p = y.p.compose(&tx, &QPoly::y(), None);
            let qq = y.q.compose(&tx, &QPoly::y(), None);
            let num = p - &QPoly::x() * &qq;
            let s = num.div_monomial(0, 1).expect("center is singular");
            ExactVectorField { p: s, q: qq, truncation_order: x.truncation_order }
        }
    }
}

pub fn blow_up(x: &ExactVectorField, center: (&GaussRat, &GaussRat)) -> (ExactVectorField, ExactVectorField) {
    (blow_up_chart(x, center, Chart::First), blow_up_chart(x, center, Chart::Second))
}

/// Laurent substitution `s = 1/t, y = t x` of a chart-2 polynomial, multiplied by `t^e`.
fn chart2_on_overlap(p: &QPoly, e: u32) -> Option<QPoly> {
    let mut out = QPoly::zero();
    for (i, j, c) in p.terms() {
        let pow = e as i64 + j as i64 - i as i64;
        if pow < 0 {
            return None;
        }
        out.add_term(j, pow as u32, c.clone());
    }
    Some(out)
}

/// Chart compatibility on `t = 1/s`: `Y2 = x T1 + t X1` and `S2 = -T1 / t^2`.
pub fn overlap_identity(first: &ExactVectorField, second: &ExactVectorField) -> bool {
    let e = second.p.degree_x().max(second.q.degree_x()) + 2;
    let (Some(y2), Some(s2)) = (chart2_on_overlap(&second.q, e), chart2_on_overlap(&second.p, e)) else {
        return false;
    };
    let te = QPoly::monomial(0, e, q(1));
    let lhs_y = &(&QPoly::x() * &first.q + &QPoly::y() * &first.p) * &te;
    let lhs_s = -(&first.q * &QPoly::monomial(0, e - 2, q(1)));
    lhs_y == y2 && lhs_s == s2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentType {
    Invariant,
    Dicritical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivisorComponent {
    pub id: usize,
    /// Local equation in the chart coordinates.
    pub equation: QPoly,
    pub kind: ComponentType,
    /// For dicritical components: the saturated field never becomes tangent on the chart.
    pub transverse: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreePoint {
    pub coords: (GaussRat, GaussRat),
    pub class: PointClass,
    pub components: Vec<usize>,
    /// Branches of the singular locus of the total transform through the point.
    pub locus_branches: usize,
    pub children: Option<(usize, usize)>,
}

impl TreePoint {
    pub fn is_corner(&self) -> bool {
        self.components.len() + self.locus_branches >= 2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub id: usize,
    pub parent: Option<(usize, Chart)>,
    pub depth: usize,
    /// Original coordinates as polynomials in the chart coordinates.
    pub map: (QPoly, QPoly),
    /// Total transform of the input field.
    pub total: ExactVectorField,
    pub saturation: SaturationResult,
    pub components: Vec<DivisorComponent>,
    pub points: Vec<TreePoint>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolutionTree {
    pub nodes: Vec<TreeNode>,
    pub next_component: usize,
}

/// Exact roots in `Q(i)` of a univariate polynomial; irrational roots are an error.
fn exact_roots(a: &[GaussRat]) -> Result<Vec<GaussRat>> {
    let a = uni_trim(a.to_vec());
    if a.len() <= 1 {
        return Ok(Vec::new());
    }
    let g = uni_gcd(&a, &uni_deriv(&a));
    let mut sf = uni_divrem(&a, &g).0;
    let mut roots = Vec::new();
    while sf.len() > 1 {
        let approx = numeric_roots(&sf);
        let mut found = None;
        for z in approx {
            for den in [1i64, 10, 100, 1000, 10_000, 1_000_000] {
                if let Some(r) = GaussRat::approximate(z, den) {
                    if uni_eval(&sf, &r).is_zero() {
                        found = Some(r);
                        break;
                    }
                }
            }
            if found.is_some() {
                break;
            }
        }
        let Some(r) = found else {
            return Err(Error::IrrationalPoints);
        };
        sf = uni_divrem(&sf, &[-r.clone(), q(1)]).0;
        roots.push(r);
    }
    Ok(roots)
}

fn numeric_roots(a: &[GaussRat]) -> Vec<Complex64> {
    let c: Vec<Complex64> = a.iter().map(|v| v.to_c64()).collect();
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, v| acc * z + v);
    let mut z: Vec<Complex64> = (0..n).map(|k| Complex64::new(0.4, 0.9).powu(k as u32)).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

fn component_kind(sat: &ExactVectorField, chart: Chart) -> (ComponentType, bool) {
    let normal = match chart {
        Chart::First => restrict(&sat.p, Chart::First),
        Chart::Second => restrict(&sat.q, Chart::Second),
    };
    if normal.is_empty() {
        (ComponentType::Invariant, false)
    } else {
        (ComponentType::Dicritical, normal.len() == 1)
    }
}

/// Restriction of a chart polynomial to the exceptional divisor, as a polynomial in its parameter.
fn restrict(p: &QPoly, chart: Chart) -> Uni {
    let mut out = Vec::new();
    for (i, j, c) in p.terms() {
        let (on, k) = match chart {
            Chart::First => (i == 0, j),
            Chart::Second => (j == 0, i),
        };
        if on {
            if out.len() <= k as usize {
                out.resize(k as usize + 1, GaussRat::zero());
            }
            out[k as usize] = c.clone();
        }
    }
    uni_trim(out)
}

fn eval_at(p: &QPoly, a: &GaussRat, b: &GaussRat) -> GaussRat {
    translate(p, a, b).coeff(0, 0)
}

/// Invariant or dicritical type of a component of a node.
pub fn component_type(node: &TreeNode, component: usize) -> Option<ComponentType> {
    node.components.iter().find(|c| c.id == component).map(|c| c.kind)
}

/// Every component meeting a dicritical one is invariant.
pub fn dicritical_adjacency_holds(tree: &ResolutionTree) -> bool {
    tree.nodes.iter().all(|n| {
        n.points.iter().all(|p| {
            let dic = p
                .components
                .iter()
                .filter(|&&id| component_type(n, id) == Some(ComponentType::Dicritical))
                .count();
            dic == 0 || (dic == 1 && p.components.len() <= 2)
        })
    })
}

/// Overlap identities between the two charts of every blow-up.
pub fn overlap_identities_hold(tree: &ResolutionTree) -> bool {
    let mut pairs: BTreeMap<(usize, usize), Vec<&TreeNode>> = BTreeMap::new();
    for n in &tree.nodes {
        if let Some((parent, _)) = n.parent {
            let pt = tree.nodes[parent].points.iter().position(|p| p.children.is_some_and(|(a, b)| a == n.id || b == n.id));
            pairs.entry((parent, pt.unwrap_or(usize::MAX))).or_default().push(n);
        }
    }
    pairs.values().all(|v| match v.as_slice() {
        [a, b] => {
            let (first, second) = if a.parent.unwrap().1 == Chart::First { (a, b) } else { (b, a) };
            overlap_identity(&first.total, &second.total)
        }
        _ => false,
    })
}

impl ResolutionTree {
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn leaf_points(&self) -> impl Iterator<Item = (&TreeNode, &TreePoint)> {
        self.nodes.iter().flat_map(|n| n.points.iter().filter(|p| p.children.is_none()).map(move |p| (n, p)))
    }

    pub fn to_json(&self) -> Value {
        let poly = |p: &QPoly| -> Value {
            Value::Array(
                p.terms()
                    .map(|(i, j, c)| {
                        let s = c.to_strings();
                        json!([i, j, s[0], s[1], s[2], s[3]])
                    })
                    .collect(),
            )
        };
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "id": n.id,
                    "parent": n.parent.map(|(p, c)| json!({"node": p, "chart": c})),
                    "depth": n.depth,
                    "map": {"x": poly(&n.map.0), "y": poly(&n.map.1)},
                    "field": {"P": poly(&n.total.p), "Q": poly(&n.total.q)},
                    "saturated": {"A": poly(&n.saturation.saturated.p), "B": poly(&n.saturation.saturated.q)},
                    "factor": poly(&n.saturation.factor),
                    "components": n.components.iter().map(|c| json!({
                        "id": c.id, "equation": poly(&c.equation), "type": c.kind, "transverse": c.transverse
                    })).collect::<Vec<_>>(),
                    "points": n.points.iter().map(|p| json!({
                        "coords": [p.coords.0.to_string(), p.coords.1.to_string()],
                        "class": p.class,
                        "components": p.components,
                        "corner": p.is_corner(),
                        "children": p.children.map(|(a, b)| vec![a, b]),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({ "nodes": nodes })
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph resolution {\n  node [shape=box];\n");
        for n in &self.nodes {
            let pts: Vec<String> = n.points.iter().map(|p| format!("({}, {}) {:?}", p.coords.0, p.coords.1, p.class)).collect();
            let _ = writeln!(s, "  n{} [label=\"node {} depth {}\\n{}\"];", n.id, n.id, n.depth, pts.join("\\n"));
            if let Some((p, c)) = n.parent {
                let _ = writeln!(s, "  n{} -> n{} [label=\"{:?}\"];", p, n.id, c);
            }
        }
        s.push_str("}\n");
        s
    }
}

fn strict_transform(eq: &QPoly, center: (&GaussRat, &GaussRat), chart: Chart) -> QPoly {
    let moved = translate(eq, center.0, center.1);
    let tx = QPoly::monomial(1, 1, q(1));
    let (sub, strip) = match chart {
        Chart::First => (moved.compose(&QPoly::x(), &tx, None), (1, 0)),
        Chart::Second => (moved.compose(&tx, &QPoly::y(), None), (0, 1)),
    };
    let mut p = sub;
    while let Some(d) = p.div_monomial(strip.0, strip.1) {
        if p.is_zero() {
            break;
        }
        p = d;
    }
    normalize_poly(&p)
}

fn compose_map(map: &(QPoly, QPoly), center: (&GaussRat, &GaussRat), chart: Chart) -> (QPoly, QPoly) {
    let tx = QPoly::monomial(1, 1, q(1));
    let (u, v) = match chart {
        Chart::First => (QPoly::x(), tx),
        Chart::Second => (tx, QPoly::y()),
    };
    let u = u + QPoly::constant(center.0.clone());
    let v = v + QPoly::constant(center.1.clone());
    (map.0.compose(&u, &v, None), map.1.compose(&u, &v, None))
}

/// Minimal resolution: blows up every singular point of the saturated
/// transform that is not reduced.
pub fn resolve(x: &ExactVectorField, max_depth: usize) -> Result<ResolutionTree> {
    if x.is_zero() {
        return Err(Error::NotSingular);
    }
    if !x.p.coeff(0, 0).is_zero() || !x.q.coeff(0, 0).is_zero() {
        return Err(Error::NotSingular);
    }
    let saturation = saturate(x)?;
    let zero = GaussRat::zero();
    let class = classify_point(&saturation.saturated, (&zero, &zero));
    let root = TreeNode {
        id: 0,
        parent: None,
        depth: 0,
        map: (QPoly::x(), QPoly::y()),
        total: x.clone(),
        saturation,
        components: Vec::new(),
        points: vec![TreePoint { coords: (zero.clone(), zero.clone()), class, components: Vec::new(), locus_branches: 0, children: None }],
    };
    let mut tree = ResolutionTree { nodes: vec![root], next_component: 0 };
    let mut queue = vec![(0usize, 0usize)];
    while let Some((node_id, pt)) = queue.pop() {
        if tree.nodes[node_id].points[pt].class != PointClass::NotReduced {
            continue;
        }
        let depth = tree.nodes[node_id].depth + 1;
        if depth > max_depth {
            return Err(Error::DepthExceeded(max_depth));
        }
        let comp_id = tree.next_component;
        tree.next_component += 1;
        let mut children = [0usize; 2];
        for (slot, chart) in [Chart::First, Chart::Second].into_iter().enumerate() {
            let child = build_child(&tree, node_id, pt, chart, comp_id, depth)?;
            let id = tree.nodes.len();
            children[slot] = id;
            let n_points = child.points.len();
            tree.nodes.push(TreeNode { id, ..child });
            for k in 0..n_points {
                queue.push((id, k));
            }
        }
        tree.nodes[node_id].points[pt].children = Some((children[0], children[1]));
    }
    Ok(tree)
}

fn build_child(tree: &ResolutionTree, node_id: usize, pt: usize, chart: Chart, comp_id: usize, depth: usize) -> Result<TreeNode> {
    let parent = &tree.nodes[node_id];
    let (ca, cb) = parent.points[pt].coords.clone();
    let center = (&ca, &cb);
    let total = blow_up_chart(&parent.total, center, chart);
    let saturation = saturate_in_chart(&total, chart)?;
    let sat = &saturation.saturated;
    let (kind, transverse) = component_kind(sat, chart);
    let exceptional = match chart {
        Chart::First => QPoly::x(),
        Chart::Second => QPoly::y(),
    };
    let mut components = vec![DivisorComponent { id: comp_id, equation: exceptional, kind, transverse }];
    for c in &parent.components {
        let eq = strict_transform(&c.equation, center, chart);
        if !is_constant(&eq) {
            components.push(DivisorComponent { equation: eq, ..c.clone() });
        }
    }
    let zero = GaussRat::zero();
    let mut candidates: Vec<GaussRat> = Vec::new();
    let mut push = |r: GaussRat| {
        if !candidates.contains(&r) {
            candidates.push(r);
        }
    };
    match chart {
        Chart::First => {
            let a0 = restrict(&sat.p, chart);
            let b0 = restrict(&sat.q, chart);
            let common = if a0.is_empty() { b0 } else { uni_gcd(&a0, &b0) };
            for r in exact_roots(&common)? {
                push(r);
            }
            for c in components.iter().skip(1) {
                for r in exact_roots(&restrict(&c.equation, chart))? {
                    push(r);
                }
            }
        }
        Chart::Second => push(zero.clone()),
    }
    let mut points = Vec::new();
    for r in candidates {
        let coords = match chart {
            Chart::First => (zero.clone(), r),
            Chart::Second => (r, zero.clone()),
        };
        let class = classify_point(sat, (&coords.0, &coords.1));
        let on: Vec<usize> = components.iter().filter(|c| eval_at(&c.equation, &coords.0, &coords.1).is_zero()).map(|c| c.id).collect();
        if class != PointClass::NonSingular || on.len() >= 2 {
            let locus_branches = saturation
                .singular_locus
                .iter()
                .filter(|l| components.iter().all(|c| c.equation != **l) && eval_at(l, &coords.0, &coords.1).is_zero())
                .count();
            points.push(TreePoint { coords, class, components: on, locus_branches, children: None });
        }
    }
    let map = compose_map(&parent.map, center, chart);
    Ok(TreeNode { id: 0, parent: Some((node_id, chart)), depth, map, total, saturation, components, points })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ReducedModelTag {
    pub model: Model,
    pub M: u32,
    pub N: u32,
    /// Exact `(a, b)` when the eigenvalues are Gaussian rationals.
    pub ab: Option<(String, String)>,
    pub ab_approx: Option<(Complex64, Complex64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiholoPoint {
    pub node: usize,
    pub coords: (String, String),
    pub tag: ReducedModelTag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BiholoClassification {
    pub tree: ResolutionTree,
    pub points: Vec<BiholoPoint>,
    /// Every divisor component lies in the zero set of the total transform.
    pub divisor_pointwise_fixed: bool,
}

fn binary_form(f: &QPoly) -> QPoly {
    match f.order() {
        Some(o) => f.homogeneous(o),
        None => QPoly::zero(),
    }
}

/// Multiplicity of the direction `v` as a root of the binary form `h`.
fn direction_multiplicity(h: &QPoly, v: (&GaussRat, &GaussRat)) -> u32 {
    let w = if v.0.is_zero() { (q(1), q(0)) } else { (q(0), q(1)) };
    let px = QPoly::constant(v.0.clone()) + QPoly::monomial(1, 0, w.0);
    let py = QPoly::constant(v.1.clone()) + QPoly::monomial(1, 0, w.1);
    let sub = h.compose(&px, &py, None);
    sub.min_x().unwrap_or(0)
}

fn eigen_data(l: &[[GaussRat; 2]; 2]) -> (Option<(GaussRat, GaussRat)>, (Complex64, Complex64)) {
    let (t, d) = trace_det(l);
    let disc = t.clone() * t.clone() - q(4) * d.clone();
    let tc = t.to_c64();
    let sq = disc.to_c64().sqrt();
    let approx = ((tc + sq) / 2.0, (tc - sq) / 2.0);
    let exact = disc.sqrt_exact().map(|r| ((t.clone() + r.clone()) / q(2), (t - r) / q(2)));
    (exact, approx)
}

fn eigenvector(l: &[[GaussRat; 2]; 2], lam: &GaussRat) -> (GaussRat, GaussRat) {
    let a = l[0][0].clone() - lam.clone();
    let b = l[0][1].clone();
    if !a.is_zero() || !b.is_zero() {
        return (b, -a);
    }
    let c = l[1][0].clone();
    let d = l[1][1].clone() - lam.clone();
    if !c.is_zero() || !d.is_zero() {
        return (-d, c);
    }
    (q(1), q(0))
}

fn unit_lead(v: (GaussRat, GaussRat)) -> (GaussRat, GaussRat) {
    let l = if v.0.is_zero() { v.1.clone() } else { v.0.clone() };
    let inv = l.inv();
    (v.0 * inv.clone(), v.1 * inv)
}

fn tag_point(node: &TreeNode, p: &TreePoint) -> Result<ReducedModelTag> {
    let sat = node.saturation.saturated.translate(&p.coords.0, &p.coords.1);
    let f = translate(&node.saturation.factor, &p.coords.0, &p.coords.1);
    let h = binary_form(&f);
    let deg = h.order().unwrap_or(0);
    let lin = linear_part(&sat);
    let fc = f.coeff(0, 0);
    match p.class {
        PointClass::NonSingular => {
            let v = (sat.p.coeff(0, 0), sat.q.coeff(0, 0));
            let n = direction_multiplicity(&h, (&v.0, &v.1));
            Ok(ReducedModelTag { model: Model::I, M: deg - n, N: n, ab: None, ab_approx: None })
        }
        PointClass::ReducedSaddleNode => {
            let (t, _) = trace_det(&lin);
            let v0 = eigenvector(&lin, &GaussRat::zero());
            let v1 = eigenvector(&lin, &t);
            let n = direction_multiplicity(&h, (&v0.0, &v0.1));
            let m = direction_multiplicity(&h, (&v1.0, &v1.1));
            let _ = m;
            Ok(ReducedModelTag { model: Model::III, M: deg - n, N: n, ab: None, ab_approx: None })
        }
        PointClass::ReducedNondegenerate => {
            let (exact, approx) = eigen_data(&lin);
            let scale = if deg == 0 { fc } else { leading_scale(&h) };
            match exact {
                Some((la, lb)) => {
                    let va = unit_lead(eigenvector(&lin, &la));
                    let vb = unit_lead(eigenvector(&lin, &lb));
                    let u = QPoly::x();
                    let v = QPoly::y();
                    let px = u.scale(&va.0) + v.scale(&vb.0);
                    let py = u.scale(&va.1) + v.scale(&vb.1);
                    let hs = h.compose(&px, &py, None);
                    let (mut m, mut n, c) = match hs.terms().collect::<Vec<_>>().as_slice() {
                        [(i, j, c)] => (*i, *j, (*c).clone()),
                        _ => return Err(Error::TemplateMismatch("tangent cone is not a normal crossing".into())),
                    };
                    let (mut a, mut b) = (la * c.clone(), lb * c);
                    if n > m {
                        std::mem::swap(&mut m, &mut n);
                        std::mem::swap(&mut a, &mut b);
                    }
                    let ab_approx = Some((a.to_c64(), b.to_c64()));
                    Ok(ReducedModelTag { model: Model::II, M: m, N: n, ab: Some((a.to_string(), b.to_string())), ab_approx })
                }
                None => {
                    let s = scale.to_c64();
                    Ok(ReducedModelTag { model: Model::II, M: deg, N: 0, ab: None, ab_approx: Some((approx.0 * s, approx.1 * s)) })
                }
            }
        }
        PointClass::NotReduced => Err(Error::TemplateMismatch("point is not reduced".into())),
    }
}

/// Constant `c` with `h = c l_1^M l_2^N` after normalizing the linear forms so that
/// they read `x` and `y` on the eigenvector basis; approximated by the leading coefficient.
fn leading_scale(h: &QPoly) -> GaussRat {
    h.terms().max_by_key(|&(i, j, _)| (i, j)).map(|(_, _, c)| c.clone()).unwrap_or_else(|| q(1))
}

fn classify_tree(tree: ResolutionTree) -> Result<BiholoClassification> {
    let mut points = Vec::new();
    for (node, p) in tree.leaf_points() {
        let tag = tag_point(node, p)?;
        points.push(BiholoPoint { node: node.id, coords: (p.coords.0.to_string(), p.coords.1.to_string()), tag });
    }
    let divisor_pointwise_fixed = tree
        .nodes
        .iter()
        .all(|n| n.components.iter().all(|c| exact_div(&n.saturation.factor, &c.equation).is_some()));
    Ok(BiholoClassification { tree, points, divisor_pointwise_fixed })
}

fn signature(c: &BiholoClassification) -> Vec<(Model, u32, u32, Option<(String, String)>)> {
    let mut v: Vec<_> = c.points.iter().map(|p| (p.tag.model, p.tag.M, p.tag.N, p.tag.ab.clone())).collect();
    v.sort_by(|a, b| format!("{a:?}").cmp(&format!("{b:?}")));
    v
}

pub fn log_field(f: &PolyMapGerm<GaussRat>, order: u32) -> Result<ExactVectorField> {
    let x = formal_log(f, order)?;
    Ok(ExactVectorField { p: x.p, q: x.q, truncation_order: Some(order) })
}

/// Tags the divisor points of the resolved logarithm of a unipotent germ.
pub fn classify_biholo_points(f: &PolyMapGerm<GaussRat>, order: u32, max_depth: usize) -> Result<BiholoClassification> {
    let run = |o: u32| -> Result<BiholoClassification> {
        let x = log_field(f, o)?;
        if x.is_zero() {
            return Err(Error::NotSingular);
        }
        classify_tree(resolve(&x, max_depth)?)
    };
    let base = run(order)?;
    let check = run(order + 2)?;
    if signature(&base) != signature(&check) {
        return Err(Error::TruncationUnstable(order as usize, order as usize + 2));
    }
    Ok(base)
}

impl ExactVectorField {
    /// `f X` for a polynomial `f`.
    pub fn times(&self, f: &QPoly) -> Self {
        self.scale_poly(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(u32, u32, i64)]) -> QPoly {
        Poly::from_terms(terms.iter().map(|&(i, j, c)| (i, j, q(c))))
    }

    fn field(a: &[(u32, u32, i64)], b: &[(u32, u32, i64)]) -> ExactVectorField {
        ExactVectorField::new(p(a), p(b))
    }

    #[test]
    fn gcd_and_division() {
        let f = p(&[(1, 0, 1), (0, 1, 1)]);
        let g = p(&[(2, 0, 1), (0, 1, -3)]);
        let h = p(&[(1, 1, 2), (0, 0, 5)]);
        let a = &f * &g;
        let b = &f * &h;
        assert_eq!(poly_gcd(&a, &b), normalize_poly(&f));
        assert_eq!(exact_div(&a, &f), Some(g.clone()));
        assert!(exact_div(&g, &f).is_none());
        assert_eq!(poly_gcd(&g, &h), p(&[(0, 0, 1)]));
    }

    #[test]
    fn saturation_examples() {
        let s = saturate(&field(&[(2, 1, 2)], &[(1, 2, -3)])).unwrap();
        assert_eq!(s.factor, p(&[(1, 1, 1)]));
        assert_eq!(s.saturated.p, p(&[(1, 0, 2)]));
        assert_eq!(s.singular_locus, vec![QPoly::x(), QPoly::y()]);
        let s = saturate(&field(&[(0, 1, 1)], &[])).unwrap();
        assert!(s.isolated_origin && s.singular_locus.is_empty());
        let s = saturate(&field(&[(2, 0, 1)], &[(1, 1, 1)])).unwrap();
        assert_eq!(s.factor, QPoly::x());
        assert_eq!(s.saturated, field(&[(1, 0, 1)], &[(0, 1, 1)]));
        let s = saturate(&field(&[], &[(2, 0, 3)])).unwrap();
        assert_eq!(s.factor, p(&[(2, 0, 1)]));
        assert_eq!(saturate(&field(&[], &[])), Err(Error::ZeroField));
    }

    #[test]
    fn point_classes() {
        let z = GaussRat::zero();
        let o = (&z, &z);
        assert_eq!(classify_point(&field(&[(1, 0, 1)], &[(0, 1, -1)]), o), PointClass::ReducedNondegenerate);
        assert_eq!(classify_point(&field(&[(1, 0, 1)], &[(0, 1, 1)]), o), PointClass::NotReduced);
        assert_eq!(classify_point(&field(&[(1, 0, 1)], &[(0, 2, 1)]), o), PointClass::ReducedSaddleNode);
        assert_eq!(classify_point(&field(&[(1, 0, 1)], &[(0, 1, 3)]), o), PointClass::NotReduced);
        assert_eq!(classify_point(&field(&[(1, 0, 1)], &[(0, 1, 2), (1, 0, 1)]), o), PointClass::NotReduced);
        let i = GaussRat::i();
        let rot = ExactVectorField::new(Poly::monomial(0, 1, i.clone()), Poly::monomial(1, 0, i));
        assert_eq!(classify_point(&rot, o), PointClass::ReducedNondegenerate);
    }

    #[test]
    fn blow_up_examples() {
        let z = GaussRat::zero();
        let (c1, _) = blow_up(&field(&[(1, 0, 2)], &[(0, 1, 5)]), (&z, &z));
        assert_eq!(c1, field(&[(1, 0, 2)], &[(0, 1, 3)]));
        let (c1, c2) = blow_up(&field(&[(0, 1, 1)], &[]), (&z, &z));
        assert_eq!(c1, field(&[(1, 1, 1)], &[(0, 2, -1)]));
        assert_eq!(c2, field(&[(0, 0, 1)], &[]));
        assert!(overlap_identity(&c1, &c2));
    }

    #[test]
    fn component_types() {
        let z = GaussRat::zero();
        let radial = blow_up_chart(&field(&[(1, 0, 1)], &[(0, 1, 1)]), (&z, &z), Chart::First);
        let sat = saturate_in_chart(&radial, Chart::First).unwrap().saturated;
        assert_eq!(component_kind(&sat, Chart::First).0, ComponentType::Dicritical);
        let node = blow_up_chart(&field(&[(1, 0, 1)], &[(0, 1, 2)]), (&z, &z), Chart::First);
        assert_eq!(component_kind(&saturate_in_chart(&node, Chart::First).unwrap().saturated, Chart::First).0, ComponentType::Invariant);
    }

    #[test]
    fn resolve_examples() {
        let t = resolve(&field(&[(2, 1, 1)], &[(1, 2, -1)]), 5).unwrap();
        assert_eq!(t.depth(), 0);
        let t = resolve(&field(&[(0, 1, 1)], &[]), 5).unwrap();
        assert_eq!(t.depth(), 1);
        let leaves: Vec<_> = t.leaf_points().map(|(_, p)| p.class).collect();
        assert_eq!(leaves, vec![PointClass::ReducedNondegenerate]);
        assert!(overlap_identities_hold(&t));
        let t = resolve(&field(&[(0, 1, 1)], &[(2, 0, 1)]), 4).unwrap();
        assert!(t.depth() <= 4);
        assert!(t.leaf_points().all(|(_, p)| p.class != PointClass::NotReduced));
        assert!(overlap_identities_hold(&t));
        assert!(dicritical_adjacency_holds(&t));
    }

    #[test]
    fn radial_blow_up_is_dicritical() {
        let t = resolve(&field(&[(1, 0, 1)], &[(0, 1, 1)]), 3).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.nodes[1].components[0].kind, ComponentType::Dicritical);
        assert!(t.nodes[1].components[0].transverse);
    }

    fn exact_flow(a: &[(u32, u32, i64)], b: &[(u32, u32, i64)], order: u32) -> PolyMapGerm<GaussRat> {
        crate::germ::VectorFieldJet::new(p(a), p(b), order).exp_map()
    }

    #[test]
    fn flow_of_reduced_field_is_model_two() {
        let f = exact_flow(&[(2, 0, 1)], &[(1, 1, -1)], 8);
        let c = classify_biholo_points(&f, 8, 4).unwrap();
        assert_eq!(c.points.len(), 1);
        let t = &c.points[0].tag;
        assert_eq!((t.model, t.M, t.N), (Model::II, 1, 0));
        assert_eq!(t.ab, Some(("1".to_string(), "-1".to_string())));
        assert!(c.divisor_pointwise_fixed);
    }

    #[test]
    fn shear_is_model_one_and_identity_is_rejected() {
        let f = PolyMapGerm::new(QPoly::x(), QPoly::y() + p(&[(2, 0, 1)])).unwrap();
        let c = classify_biholo_points(&f, 6, 4).unwrap();
        assert!(c.points.iter().all(|pt| matches!(pt.tag.model, Model::I | Model::III)));
        assert_eq!((c.points[0].tag.model, c.points[0].tag.M, c.points[0].tag.N), (Model::I, 0, 2));
        assert_eq!(classify_biholo_points(&PolyMapGerm::identity(), 6, 4), Err(Error::NotSingular));
    }

    #[test]
    fn exports() {
        let t = resolve(&field(&[(0, 1, 1)], &[]), 5).unwrap();
        let j = t.to_json();
        assert_eq!(j["nodes"].as_array().unwrap().len(), 3);
        assert!(t.to_dot().contains("n0 -> n1"));
    }

    #[test]
    fn irrational_points_are_reported() {
        assert_eq!(exact_roots(&[q(-2), q(0), q(1)]), Err(Error::IrrationalPoints));
        assert_eq!(exact_roots(&[q(-4), q(0), q(1)]).unwrap().len(), 2);
    }
}

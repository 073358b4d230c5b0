//! Germ interchange JSON, orbit CSV and PGM rasters.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::OrbitTrace;
use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::germ::{FloatGerm, PolyMapGerm};
use crate::poly::Poly;
use crate::resolution::ExactVectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientMode {
    Float,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Germ,
    Field,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub component: String,
    pub monomials: Vec<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_order: Option<u32>,
    #[serde(default = "default_mode")]
    pub coefficient_mode: CoefficientMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validity_radius: Option<f64>,
}

fn default_mode() -> CoefficientMode {
    CoefficientMode::Float
}

#[derive(Deserialize)]
struct Wrapper {
    #[serde(default = "default_kind")]
    kind: InputKind,
    components: Vec<ComponentRecord>,
}

fn default_kind() -> InputKind {
    InputKind::Germ
}

/// Parsed germ or vector-field input. The float pair is always present; the
/// exact pair only in exact mode.
#[derive(Clone, Debug)]
pub struct GermInput {
    pub kind: InputKind,
    pub mode: CoefficientMode,
    pub float: (Poly<Complex64>, Poly<Complex64>),
    pub exact: Option<(Poly<GaussRat>, Poly<GaussRat>)>,
    pub truncation_order: Option<u32>,
    pub validity_radius: Option<f64>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn exponent(v: &Value) -> Result<u32> {
    v.as_u64().and_then(|e| u32::try_from(e).ok()).ok_or_else(|| parse_err(format!("bad exponent {v}")))
}

fn number(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(format!("bad coefficient {v}")))
}

fn int_string(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        _ => Err(parse_err(format!("exact coefficient part must be an integer string, got {v}"))),
    }
}

fn exact_poly(c: &ComponentRecord) -> Result<Poly<GaussRat>> {
    let mut p = Poly::zero();
    for m in &c.monomials {
        if m.len() != 6 {
            return Err(parse_err("exact monomial must be [i, j, re_num, re_den, im_num, im_den]"));
        }
        let parts: Vec<String> = m[2..].iter().map(int_string).collect::<Result<_>>()?;
        let coeff = GaussRat::parse([&parts[0], &parts[1], &parts[2], &parts[3]])?;
        p.add_term(exponent(&m[0])?, exponent(&m[1])?, coeff);
    }
    Ok(p)
}

fn float_poly(c: &ComponentRecord) -> Result<Poly<Complex64>> {
    let mut p = Poly::zero();
    for m in &c.monomials {
        if m.len() != 4 {
            return Err(parse_err("float monomial must be [i, j, re, im]"));
        }
        p.add_term(exponent(&m[0])?, exponent(&m[1])?, Complex64::new(number(&m[2])?, number(&m[3])?));
    }
    Ok(p)
}

/// Parses either a bare array of component records or `{"kind", "components"}`.
pub fn parse_germ_json(text: &str) -> Result<GermInput> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let wrapper: Wrapper = match value {
        Value::Array(_) => Wrapper {
            kind: InputKind::Germ,
            components: serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))?,
        },
        Value::Object(_) => serde_json::from_value(value).map_err(|e| parse_err(e.to_string()))?,
        _ => return Err(parse_err("expected an array or object")),
    };
    let find = |name: &str| -> Result<&ComponentRecord> {
        let mut it = wrapper.components.iter().filter(|c| c.component == name);
        let c = it.next().ok_or_else(|| parse_err(format!("missing component {name}")))?;
        if it.next().is_some() {
            return Err(parse_err(format!("duplicate component {name}")));
        }
        Ok(c)
    };
    let (cx, cy) = (find("x")?, find("y")?);
    if wrapper.components.len() != 2 {
        return Err(parse_err("expected exactly the components x and y"));
    }
    if cx.coefficient_mode != cy.coefficient_mode {
        return Err(parse_err("components use different coefficient modes"));
    }
    let mode = cx.coefficient_mode;
    let (float, exact) = match mode {
        CoefficientMode::Float => ((float_poly(cx)?, float_poly(cy)?), None),
        CoefficientMode::Exact => {
            let (ex, ey) = (exact_poly(cx)?, exact_poly(cy)?);
            ((ex.to_c64(), ey.to_c64()), Some((ex, ey)))
        }
    };
    let truncation_order = match (cx.truncation_order, cy.truncation_order) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    let validity_radius = cx.validity_radius.or(cy.validity_radius);
    if let Some(r) = validity_radius {
        if !(r > 0.0) {
            return Err(parse_err("validity_radius must be positive"));
        }
    }
    Ok(GermInput { kind: wrapper.kind, mode, float, exact, truncation_order, validity_radius })
}

impl GermInput {
    pub fn float_germ(&self) -> Result<FloatGerm> {
        if self.kind != InputKind::Germ {
            return Err(parse_err("input describes a vector field, not a germ"));
        }
        let mut g = PolyMapGerm::new(self.float.0.clone(), self.float.1.clone())?;
        if let Some(r) = self.validity_radius {
            g.validity_radius = r;
        }
        if let Some(o) = self.truncation_order {
            g.truncation_order = g.truncation_order.max(o);
        }
        Ok(g)
    }

    pub fn exact_germ(&self) -> Result<PolyMapGerm<GaussRat>> {
        if self.kind != InputKind::Germ {
            return Err(parse_err("input describes a vector field, not a germ"));
        }
        let (x, y) = self.exact.clone().ok_or_else(|| parse_err("exact coefficients required"))?;
        let mut g = PolyMapGerm::new(x, y)?;
        if let Some(o) = self.truncation_order {
            g.truncation_order = g.truncation_order.max(o);
        }
        Ok(g)
    }

    pub fn exact_field(&self) -> Result<ExactVectorField> {
        if self.kind != InputKind::Field {
            return Err(parse_err("input describes a germ, not a vector field"));
        }
        let (p, q) = self.exact.clone().ok_or_else(|| parse_err("exact coefficients required"))?;
        Ok(ExactVectorField { p, q, truncation_order: self.truncation_order })
    }
}

fn float_record(name: &str, p: &Poly<Complex64>, order: u32, radius: f64) -> ComponentRecord {
    ComponentRecord {
        component: name.into(),
        monomials: p.terms().map(|(i, j, c)| vec![i.into(), j.into(), c.re.into(), c.im.into()]).collect(),
        truncation_order: Some(order),
        coefficient_mode: CoefficientMode::Float,
        validity_radius: radius.is_finite().then_some(radius),
    }
}

fn exact_record(name: &str, p: &Poly<GaussRat>, order: Option<u32>) -> ComponentRecord {
    ComponentRecord {
        component: name.into(),
        monomials: p
            .terms()
            .map(|(i, j, c)| {
                let mut row: Vec<Value> = vec![i.into(), j.into()];
                row.extend(c.to_strings().into_iter().map(Value::String));
                row
            })
            .collect(),
        truncation_order: order,
        coefficient_mode: CoefficientMode::Exact,
        validity_radius: None,
    }
}

pub fn float_germ_to_json(g: &FloatGerm) -> Value {
    serde_json::to_value([
        float_record("x", &g.fx, g.truncation_order, g.validity_radius),
        float_record("y", &g.fy, g.truncation_order, g.validity_radius),
    ])
    .expect("records serialize")
}

pub fn exact_germ_to_json(g: &PolyMapGerm<GaussRat>) -> Value {
    serde_json::to_value([exact_record("x", &g.fx, Some(g.truncation_order)), exact_record("y", &g.fy, Some(g.truncation_order))])
        .expect("records serialize")
}

pub fn exact_field_to_json(x: &ExactVectorField) -> Value {
    serde_json::json!({
        "kind": "field",
        "components": [exact_record("x", &x.p, x.truncation_order), exact_record("y", &x.q, x.truncation_order)],
    })
}

pub const ORBIT_HEADER: &str = "j,re_x,im_x,re_y,im_y,re_z,im_z,in_Uk,in_Dk";

pub fn write_orbit_csv<W: Write>(mut out: W, trace: &OrbitTrace) -> std::io::Result<()> {
    writeln!(out, "{ORBIT_HEADER}")?;
    for (j, ((x, y), d)) in trace.points.iter().zip(&trace.derived).enumerate() {
        writeln!(
            out,
            "{j},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{}",
            x.re, x.im, y.re, y.im, d.z.re, d.z.im, d.in_uk as u8, d.in_dk as u8
        )?;
    }
    Ok(())
}

/// Binary PGM with an optional `#` comment line in the header.
pub fn write_pgm<W: Write>(mut out: W, width: usize, height: usize, pixels: &[u8], comment: Option<&str>) -> std::io::Result<()> {
    assert_eq!(pixels.len(), width * height, "pixel count must match the raster size");
    writeln!(out, "P5")?;
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    write!(out, "{width} {height}\n255\n")?;
    out.write_all(pixels)
}

/// Reads back a binary PGM: `(width, height, pixels, comments)`.
pub fn read_pgm(data: &[u8]) -> Result<(usize, usize, Vec<u8>, Vec<String>)> {
    let mut pos = 0;
    let mut comments = Vec::new();
    let mut fields = Vec::new();
    while fields.len() < 4 {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= data.len() {
            return Err(parse_err("truncated PGM header"));
        }
        if data[pos] == b'#' {
            let end = data[pos..].iter().position(|&b| b == b'\n').map_or(data.len(), |e| pos + e);
            comments.push(String::from_utf8_lossy(&data[pos + 1..end]).trim().to_string());
            pos = end;
            continue;
        }
        let end = data[pos..].iter().position(|b| b.is_ascii_whitespace()).map_or(data.len(), |e| pos + e);
        fields.push(String::from_utf8_lossy(&data[pos..end]).to_string());
        pos = end;
    }
    if fields[0] != "P5" {
        return Err(parse_err("not a binary PGM"));
    }
    let dim = |s: &str| s.parse::<usize>().map_err(|_| parse_err(format!("bad PGM field {s}")));
    let (w, h) = (dim(&fields[1])?, dim(&fields[2])?);
    let body = &data[(pos + 1).min(data.len())..];
    if body.len() != w * h {
        return Err(parse_err("PGM body size mismatch"));
    }
    Ok((w, h, body.to_vec(), comments))
}

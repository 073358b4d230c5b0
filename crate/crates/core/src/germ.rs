//! Polynomial germs: classification, normalization, inversion and formal logarithm.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Coeff, FastPoly, Poly};
use crate::sector::PetalParams;

pub const DEFAULT_ORDER: u32 = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMapGerm<C: Coeff> {
    pub fx: Poly<C>,
    pub fy: Poly<C>,
    pub truncation_order: u32,
    pub validity_radius: f64,
}

pub type FloatGerm = PolyMapGerm<Complex64>;

impl<C: Coeff> PolyMapGerm<C> {
    pub fn new(fx: Poly<C>, fy: Poly<C>) -> Result<Self> {
        if !fx.coeff(0, 0).is_zero() || !fy.coeff(0, 0).is_zero() {
            return Err(Error::InvalidParameter("germ must fix the origin".into()));
        }
        let order = fx.degree().max(fy.degree()).max(1);
        Ok(PolyMapGerm { fx, fy, truncation_order: order, validity_radius: 0.5 })
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.validity_radius = r;
        self
    }

    pub fn identity() -> Self {
        PolyMapGerm { fx: Poly::x(), fy: Poly::y(), truncation_order: 1, validity_radius: f64::INFINITY }
    }

    /// Linear part as `[[a, b], [c, d]]`.
    pub fn linear_part(&self) -> [[C; 2]; 2] {
        [[self.fx.coeff(1, 0), self.fx.coeff(0, 1)], [self.fy.coeff(1, 0), self.fy.coeff(0, 1)]]
    }

    pub fn is_tangent_to_identity(&self) -> bool {
        let [[a, b], [c, d]] = self.linear_part();
        (a - C::one()).negligible() && b.negligible() && c.negligible() && (d - C::one()).negligible()
    }

    /// Both eigenvalues of the linear part equal 1.
    pub fn is_unipotent(&self) -> bool {
        let [[a, b], [c, d]] = self.linear_part();
        let tr = a.clone() + d.clone();
        let det = a * d - b * c;
        (tr - C::from_ratio(2, 1)).negligible() && (det - C::one()).negligible()
    }

    /// `F - id`.
    pub fn displacement(&self) -> (Poly<C>, Poly<C>) {
        (self.fx.clone() - Poly::x(), self.fy.clone() - Poly::y())
    }

    pub fn compose(&self, inner: &Self, order: u32) -> Self {
        PolyMapGerm {
            fx: self.fx.compose(&inner.fx, &inner.fy, Some(order)),
            fy: self.fy.compose(&inner.fx, &inner.fy, Some(order)),
            truncation_order: order,
            validity_radius: self.validity_radius.min(inner.validity_radius),
        }
    }

    pub fn truncate(&self, order: u32) -> Self {
        PolyMapGerm { fx: self.fx.truncate(order), fy: self.fy.truncate(order), truncation_order: order, ..self.clone() }
    }

    pub fn to_float(&self) -> FloatGerm {
        PolyMapGerm {
            fx: self.fx.to_c64(),
            fy: self.fy.to_c64(),
            truncation_order: self.truncation_order,
            validity_radius: self.validity_radius,
        }
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (self.fx.eval(x, y), self.fy.eval(x, y))
    }

    pub fn fast(&self) -> FastMap {
        FastMap { fx: FastPoly::new(&self.fx), fy: FastPoly::new(&self.fy) }
    }
}

/// Floating evaluator with reusable power buffers.
#[derive(Clone, Debug)]
pub struct FastMap {
    fx: FastPoly,
    fy: FastPoly,
}

impl FastMap {
    pub fn apply(&self, x: Complex64, y: Complex64, buf: &mut MapBuffers) -> (Complex64, Complex64) {
        (self.fx.eval(x, y, &mut buf.0, &mut buf.1), self.fy.eval(x, y, &mut buf.0, &mut buf.1))
    }
}

#[derive(Default, Debug)]
pub struct MapBuffers(Vec<Complex64>, Vec<Complex64>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Noncorner,
    Corner,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct FormSignature {
    pub form: Form,
    pub M: u32,
    pub N: u32,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Option<Complex64>,
    pub satisfies_attracting_condition: bool,
    pub satisfies_repelling_condition: bool,
    /// `aM + bN = 0` for a corner germ.
    pub resonant: bool,
}

impl FormSignature {
    fn other() -> Self {
        FormSignature {
            form: Form::Other,
            M: 0,
            N: 0,
            a: Complex64::new(0.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: None,
            satisfies_attracting_condition: false,
            satisfies_repelling_condition: false,
            resonant: false,
        }
    }
}

fn support<C: Coeff>(p: &Poly<C>) -> Vec<(u32, u32, C)> {
    p.terms().filter(|(_, _, c)| !c.negligible()).map(|(i, j, c)| (i, j, c.clone())).collect()
}

pub fn classify_form<C: Coeff>(f: &PolyMapGerm<C>) -> Result<FormSignature> {
    if !f.is_tangent_to_identity() {
        return Err(Error::NotTangentToIdentity);
    }
    let (p, q) = f.displacement();
    let (sp, sq) = (support(&p), support(&q));
    if sp.is_empty() && sq.is_empty() {
        return Err(Error::NotTangentToIdentity);
    }
    if sp.is_empty() || sq.is_empty() {
        return Ok(FormSignature::other());
    }
    let coeff = |s: &[(u32, u32, C)], i: u32, j: u32| s.iter().find(|t| t.0 == i && t.1 == j).map(|t| t.2.to_c64());
    let minx = |s: &[(u32, u32, C)]| s.iter().map(|t| t.0).min().unwrap();
    let miny = |s: &[(u32, u32, C)]| s.iter().map(|t| t.1).min().unwrap();

    let (mxp, myp, mxq, myq) = (minx(&sp), miny(&sp), minx(&sq), miny(&sq));
    if mxp >= 2 && myp >= 1 && mxq == mxp - 1 && myq == myp + 1 {
        let (m, n) = (mxp - 1, myp);
        if let (Some(a), Some(b)) = (coeff(&sp, m + 1, n), coeff(&sq, m, n + 1)) {
            let s = a * m as f64 + b * n as f64;
            let resonant = s.norm() < 1e-12 && !C::EXACT || s == Complex64::new(0.0, 0.0);
            let (att, rep) = if resonant {
                (false, false)
            } else {
                let (ra, rb) = ((a / s).re, (b / s).re);
                (ra > 0.0 && rb > 0.0, ra < 0.0 || rb < 0.0)
            };
            return Ok(FormSignature {
                form: Form::Corner,
                M: m,
                N: n,
                a,
                b,
                c: None,
                satisfies_attracting_condition: att,
                satisfies_repelling_condition: rep,
                resonant,
            });
        }
    }
    if mxp >= 2 && mxq + 1 >= mxp && mxq >= 1 {
        let m = mxp - 1;
        let a = coeff(&sp, m + 1, 0);
        let b = coeff(&sq, m, 1);
        let lowest_ok = sq.iter().all(|&(i, j, _)| i >= m && i + j > m);
        if let (Some(a), Some(b), true) = (a, b, lowest_ok) {
            let c = coeff(&sq, m + 1, 0).unwrap_or(Complex64::new(0.0, 0.0));
            let r = (b / a).re;
            return Ok(FormSignature {
                form: Form::Noncorner,
                M: m,
                N: 0,
                a,
                b,
                c: Some(c),
                satisfies_attracting_condition: r > 0.0,
                satisfies_repelling_condition: r < 0.0,
                resonant: false,
            });
        }
    }
    Ok(FormSignature::other())
}

/// Diagonal change `L(x, y) = (alpha x, beta y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearChange {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl LinearChange {
    pub fn is_identity(&self) -> bool {
        self.alpha == Complex64::new(1.0, 0.0) && self.beta == Complex64::new(1.0, 0.0)
    }

    /// `L^{-1} o F o L`.
    pub fn conjugate(&self, f: &FloatGerm) -> FloatGerm {
        let (al, be) = (self.alpha, self.beta);
        let scale = |p: &Poly<Complex64>, div: Complex64| {
            Poly::from_terms(p.terms().map(|(i, j, c)| (i, j, c * al.powu(i) * be.powu(j) / div)))
        };
        PolyMapGerm { fx: scale(&f.fx, al), fy: scale(&f.fy, be), ..f.clone() }
    }
}

#[derive(Clone, Debug)]
pub struct Normalized {
    pub germ: FloatGerm,
    pub change: LinearChange,
    pub signature: FormSignature,
    /// Present when the normalized coefficients satisfy the attracting condition.
    pub petal: Option<PetalParams>,
}

pub fn normalize(f: &FloatGerm, sig: &FormSignature) -> Result<Normalized> {
    let one = Complex64::new(1.0, 0.0);
    let factor = match sig.form {
        Form::Corner => {
            let s = sig.a * sig.M as f64 + sig.b * sig.N as f64;
            if sig.resonant || s.norm() == 0.0 {
                return Err(Error::Resonant);
            }
            -s.inv()
        }
        Form::Noncorner => -(sig.a * sig.M as f64).inv(),
        Form::Other => return Err(Error::TemplateMismatch("normalization needs corner or noncorner form".into())),
    };
    let alpha = if (factor - one).norm() < 1e-12 { one } else { factor.powf(1.0 / sig.M as f64) };
    let change = LinearChange { alpha, beta: one };
    let germ = if change.is_identity() { f.clone() } else { change.conjugate(f) };
    let signature = classify_form(&germ)?;
    let petal = PetalParams::new(signature.M, signature.N, signature.a, signature.b, None, 0).ok();
    Ok(Normalized { germ, change, signature, petal })
}

/// Compositional inverse through total degree `order`.
pub fn invert_jet<C: Coeff>(f: &PolyMapGerm<C>, order: u32) -> Result<PolyMapGerm<C>> {
    if !f.is_tangent_to_identity() {
        return Err(Error::NotTangentToIdentity);
    }
    let (p, q) = f.displacement();
    let (mut gx, mut gy) = (Poly::<C>::x(), Poly::<C>::y());
    for _ in 0..order {
        let nx = Poly::x() - p.compose(&gx, &gy, Some(order));
        let ny = Poly::y() - q.compose(&gx, &gy, Some(order));
        gx = nx;
        gy = ny;
    }
    Ok(PolyMapGerm { fx: gx, fy: gy, truncation_order: order, validity_radius: f.validity_radius })
}

/// `X = P d/dx + Q d/dy` truncated at `truncation_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldJet<C: Coeff> {
    pub p: Poly<C>,
    pub q: Poly<C>,
    pub truncation_order: u32,
}

impl<C: Coeff> VectorFieldJet<C> {
    pub fn new(p: Poly<C>, q: Poly<C>, truncation_order: u32) -> Self {
        VectorFieldJet { p, q, truncation_order }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Lie derivative `X(h)` truncated at the jet order.
    pub fn apply(&self, h: &Poly<C>) -> Poly<C> {
        let o = Some(self.truncation_order);
        self.p.mul_trunc(&h.deriv_x(), o) + self.q.mul_trunc(&h.deriv_y(), o)
    }

    pub fn scale(&self, s: &C) -> Self {
        VectorFieldJet { p: self.p.scale(s), q: self.q.scale(s), truncation_order: self.truncation_order }
    }

    pub fn neg(&self) -> Self {
        self.scale(&(-C::one()))
    }

    /// Time-1 map `sum_k X^k(id) / k!` truncated at the jet order.
    pub fn exp_map(&self) -> PolyMapGerm<C> {
        let fx = self.lie_series(&Poly::x());
        let fy = self.lie_series(&Poly::y());
        PolyMapGerm { fx, fy, truncation_order: self.truncation_order, validity_radius: 0.5 }
    }

    fn lie_series(&self, h: &Poly<C>) -> Poly<C> {
        let mut sum = h.clone();
        let mut term = h.clone();
        for k in 1..=(2 * self.truncation_order + 4) {
            term = self.apply(&term).scale(&C::from_ratio(1, k as i64));
            if term.terms().all(|(_, _, c)| c.is_zero() || (!C::EXACT && c.to_c64().norm() < 1e-300)) {
                break;
            }
            sum = sum + term.clone();
        }
        sum
    }
}

/// Unique jet `X` whose time-1 map reproduces `F` through `order`.
pub fn formal_log<C: Coeff>(f: &PolyMapGerm<C>, order: u32) -> Result<VectorFieldJet<C>> {
    if !f.is_unipotent() {
        return Err(Error::NotUnipotent);
    }
    let target = f.truncate(order);
    let mut x = VectorFieldJet::new(Poly::zero(), Poly::zero(), order);
    for deg in 1..=order {
        for _ in 0..64 {
            let e = x.exp_map();
            let ex = (target.fx.clone() - e.fx).homogeneous(deg);
            let ey = (target.fy.clone() - e.fy).homogeneous(deg);
            let done = if C::EXACT {
                ex.is_zero() && ey.is_zero()
            } else {
                ex.terms().chain(ey.terms()).all(|(_, _, c)| c.to_c64().norm() < 1e-15)
            };
            if done {
                break;
            }
            x.p = x.p + ex;
            x.q = x.q + ey;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussRat;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn germ(px: &[(u32, u32, f64)], py: &[(u32, u32, f64)]) -> FloatGerm {
        let fx = Poly::x() + Poly::from_terms(px.iter().map(|&(i, j, v)| (i, j, c(v, 0.0))));
        let fy = Poly::y() + Poly::from_terms(py.iter().map(|&(i, j, v)| (i, j, c(v, 0.0))));
        PolyMapGerm::new(fx, fy).unwrap()
    }

    fn exact(px: &[(u32, u32, i64, i64)], py: &[(u32, u32, i64, i64)]) -> PolyMapGerm<GaussRat> {
        let fx = Poly::x() + Poly::from_terms(px.iter().map(|&(i, j, n, d)| (i, j, GaussRat::from_ratio(n, d))));
        let fy = Poly::y() + Poly::from_terms(py.iter().map(|&(i, j, n, d)| (i, j, GaussRat::from_ratio(n, d))));
        PolyMapGerm::new(fx, fy).unwrap()
    }

    #[test]
    fn classify_reference_corner() {
        let f = germ(&[(2, 1, -0.5)], &[(1, 2, -0.5)]);
        let s = classify_form(&f).unwrap();
        assert_eq!((s.form, s.M, s.N), (Form::Corner, 1, 1));
        assert_eq!((s.a, s.b), (c(-0.5, 0.0), c(-0.5, 0.0)));
        assert!(s.satisfies_attracting_condition && !s.satisfies_repelling_condition);
    }

    #[test]
    fn classify_noncorner() {
        let f = germ(&[(2, 0, -1.0)], &[(1, 1, -1.0), (3, 0, 1.0)]);
        let s = classify_form(&f).unwrap();
        assert_eq!((s.form, s.M, s.N), (Form::Noncorner, 1, 0));
        assert_eq!((s.a, s.b, s.c), (c(-1.0, 0.0), c(-1.0, 0.0), Some(c(0.0, 0.0))));
        assert!(s.satisfies_attracting_condition);
        let g = germ(&[(2, 0, -1.0)], &[(1, 1, -1.0), (2, 0, 1.0)]);
        assert_eq!(classify_form(&g).unwrap().c, Some(c(1.0, 0.0)));
    }

    #[test]
    fn classify_higher_corner() {
        let f = exact(&[(2, 2, 1, 1)], &[(1, 3, 1, 1)]);
        let s = classify_form(&f).unwrap();
        assert_eq!((s.form, s.M, s.N), (Form::Corner, 1, 2));
        assert_eq!((s.a, s.b), (c(1.0, 0.0), c(1.0, 0.0)));
    }

    #[test]
    fn classify_rejects_identity_and_non_tangent() {
        assert_eq!(classify_form(&FloatGerm::identity()), Err(Error::NotTangentToIdentity));
        let f = PolyMapGerm::new(Poly::x().scale(&c(2.0, 0.0)), Poly::y()).unwrap();
        assert_eq!(classify_form(&f), Err(Error::NotTangentToIdentity));
    }

    #[test]
    fn classify_other() {
        let f = germ(&[(2, 0, -1.0)], &[]);
        assert_eq!(classify_form(&f).unwrap().form, Form::Other);
        let g = germ(&[(0, 2, 1.0)], &[]);
        assert_eq!(classify_form(&g).unwrap().form, Form::Other);
    }

    #[test]
    fn float_noise_tolerated() {
        let f = germ(&[(2, 1, -0.5), (0, 3, 1e-14)], &[(1, 2, -0.5)]);
        assert_eq!(classify_form(&f).unwrap().form, Form::Corner);
    }

    #[test]
    fn normalize_examples() {
        let f = germ(&[(2, 1, -0.5)], &[(1, 2, -0.5)]);
        let n = normalize(&f, &classify_form(&f).unwrap()).unwrap();
        assert!(n.change.is_identity());
        assert_eq!(n.germ, f);
        let g = germ(&[(2, 1, -1.0)], &[(1, 2, -1.0)]);
        let n = normalize(&g, &classify_form(&g).unwrap()).unwrap();
        assert!((n.signature.a - c(-0.5, 0.0)).norm() < 1e-14);
        assert!((n.signature.b - c(-0.5, 0.0)).norm() < 1e-14);
        let again = normalize(&n.germ, &n.signature).unwrap();
        assert!(again.change.is_identity());
        let r = germ(&[(2, 1, 1.0)], &[(1, 2, -1.0)]);
        assert_eq!(normalize(&r, &classify_form(&r).unwrap()).unwrap_err(), Error::Resonant);
    }

    #[test]
    fn normalize_noncorner_rotates_a() {
        let f = PolyMapGerm::new(
            Poly::x() + Poly::monomial(2, 0, c(0.0, 2.0)),
            Poly::y() + Poly::monomial(1, 1, c(1.0, 1.0)),
        )
        .unwrap();
        let n = normalize(&f, &classify_form(&f).unwrap()).unwrap();
        assert!((n.signature.a - c(-1.0, 0.0)).norm() < 1e-14);
        let expect = -c(1.0, 1.0) / c(0.0, 2.0);
        assert!((n.signature.b - expect).norm() < 1e-14);
    }

    #[test]
    fn inverse_of_reference() {
        let f = exact(&[(2, 1, -1, 2)], &[(1, 2, -1, 2)]);
        let g = invert_jet(&f, 9).unwrap();
        let s = classify_form(&g).unwrap();
        assert_eq!((s.a, s.b), (c(0.5, 0.0), c(0.5, 0.0)));
        let id = f.compose(&g, 9);
        assert_eq!(id.fx, Poly::x());
        assert_eq!(id.fy, Poly::y());
        let id2 = g.compose(&f, 9);
        assert_eq!((id2.fx, id2.fy), (Poly::x(), Poly::y()));
        let i = invert_jet(&PolyMapGerm::<GaussRat>::identity(), 5).unwrap();
        assert_eq!((i.fx, i.fy), (Poly::x(), Poly::y()));
    }

    #[test]
    fn log_examples() {
        let f = exact(&[], &[(2, 0, 1, 1)]);
        let x = formal_log(&f, 8).unwrap();
        assert!(x.p.is_zero());
        assert_eq!(x.q, Poly::monomial(2, 0, GaussRat::one()));
        let f = exact(&[(2, 0, 1, 1)], &[]);
        let x = formal_log(&f, 6).unwrap();
        assert_eq!(x.p.coeff(2, 0), GaussRat::one());
        assert_eq!(x.p.coeff(3, 0), GaussRat::from_int(-1));
        let z = formal_log(&PolyMapGerm::<GaussRat>::identity(), 6).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn log_of_unipotent_linear() {
        let f = PolyMapGerm::new(Poly::x() + Poly::y(), Poly::y() + Poly::monomial(2, 0, GaussRat::one())).unwrap();
        let x = formal_log(&f, 6).unwrap();
        let back = x.exp_map().truncate(6);
        assert_eq!((back.fx, back.fy), (f.fx, f.fy));
        let bad = PolyMapGerm::new(Poly::x().scale(&GaussRat::from_int(2)), Poly::y()).unwrap();
        assert_eq!(formal_log(&bad, 4).unwrap_err(), Error::NotUnipotent);
    }

    #[test]
    fn log_of_inverse_is_negative() {
        let f = exact(&[(2, 1, 1, 3), (1, 2, -1, 1)], &[(1, 2, 2, 1), (3, 1, 1, 5)]);
        let order = 7;
        let lf = formal_log(&f, order).unwrap();
        let li = formal_log(&invert_jet(&f, order).unwrap(), order).unwrap();
        assert_eq!(li, lf.neg());
    }
}

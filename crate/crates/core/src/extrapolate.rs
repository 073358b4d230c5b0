//! Least-squares fits of asymptotic expansions along orbits.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::germ::FloatGerm;

/// Complex least squares with column equilibration.
pub fn lstsq(rows: &[Vec<Complex64>], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let nr = rows.len();
    let nc = rows.first()?.len();
    if nr < nc || nc == 0 {
        return None;
    }
    let mut a = DMatrix::<Complex64>::from_fn(nr, nc, |i, j| rows[i][j]);
    let mut scale = vec![1.0; nc];
    for (j, s) in scale.iter_mut().enumerate() {
        let n = a.column(j).norm();
        if n > 0.0 {
            *s = n;
            a.column_mut(j).unscale_mut(n);
        }
    }
    let b = DVector::<Complex64>::from_column_slice(rhs);
    let svd = a.svd(true, true);
    let x = svd.solve(&b, 1e-14).ok()?;
    let out: Vec<Complex64> = x.iter().zip(&scale).map(|(v, s)| v / s).collect();
    if out.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        Some(out)
    } else {
        None
    }
}

/// Log-spaced sample indices `round(top * 2^(-t/per_octave))`, distinct, descending.
pub fn log_spaced(top: usize, per_octave: u32, octaves: u32, floor: usize) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for t in 0..=(per_octave * octaves) {
        let j = (top as f64 * 2f64.powf(-(t as f64) / per_octave as f64)).round() as usize;
        if j < floor {
            break;
        }
        if out.last() != Some(&j) {
            out.push(j);
        }
    }
    out
}

/// Decay exponents of a normalized corner-type germ in the chart variable
/// `z = 1/(x^m y^n)^d`: the additive semigroup generated by `1` and the
/// exponents `-(i a + j b)` of the monomials beyond the leading ones,
/// sorted by real part.
pub fn decay_exponents(f: &FloatGerm, big_m: u32, big_n: u32, a: Complex64, b: Complex64, count: usize) -> Vec<Complex64> {
    let (p, q) = f.displacement();
    let mut gens: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let mut push = |i: u32, j: u32| {
        if i + j == 0 {
            return;
        }
        let s = -(a * i as f64 + b * j as f64);
        if s.re > 1e-9 && !gens.iter().any(|g| (g - s).norm() < 1e-9) {
            gens.push(s);
        }
    };
    for (i, j, c) in p.terms() {
        if c.norm() < 1e-300 || i < big_m + 1 || j < big_n {
            continue;
        }
        push(i - big_m - 1, j - big_n);
    }
    for (i, j, c) in q.terms() {
        if c.norm() < 1e-300 || i < big_m || j < big_n + 1 {
            continue;
        }
        push(i - big_m, j - big_n - 1);
    }
    semigroup(&gens, count)
}

fn semigroup(gens: &[Complex64], count: usize) -> Vec<Complex64> {
    let mut elems: Vec<Complex64> = gens.to_vec();
    let mut frontier = elems.clone();
    for _ in 0..count {
        let mut next = Vec::new();
        for f in &frontier {
            for g in gens {
                let s = f + g;
                if !elems.iter().chain(next.iter()).any(|e: &Complex64| (e - s).norm() < 1e-9) {
                    next.push(s);
                }
            }
        }
        elems.extend(next.iter().copied());
        frontier = next;
    }
    elems.sort_by(|u, v| u.re.partial_cmp(&v.re).unwrap().then(u.im.partial_cmp(&v.im).unwrap()));
    elems.truncate(count);
    elems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::PolyMapGerm;
    use crate::poly::Poly;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn recovers_linear_model() {
        let xs: Vec<f64> = (1..20).map(|k| k as f64).collect();
        let rows: Vec<Vec<Complex64>> = xs.iter().map(|&x| vec![c(1.0, 0.0), c(1.0 / x, 0.0), c(x.ln(), 0.0)]).collect();
        let rhs: Vec<Complex64> = xs.iter().map(|&x| c(2.0, 1.0) + c(0.5, 0.0) / x + c(0.0, -3.0) * x.ln()).collect();
        let sol = lstsq(&rows, &rhs).unwrap();
        assert!((sol[0] - c(2.0, 1.0)).norm() < 1e-12);
        assert!((sol[2] - c(0.0, -3.0)).norm() < 1e-12);
    }

    #[test]
    fn samples_are_log_spaced() {
        let s = log_spaced(1024, 4, 4, 1);
        assert_eq!(s[0], 1024);
        assert_eq!(*s.last().unwrap(), 64);
        assert_eq!(s.len(), 17);
    }

    #[test]
    fn exponents_of_reference_germ() {
        let f = PolyMapGerm::new(
            Poly::x() + Poly::monomial(2, 1, c(-0.5, 0.0)),
            Poly::y() + Poly::monomial(1, 2, c(-0.5, 0.0)),
        )
        .unwrap();
        let e = decay_exponents(&f, 1, 1, c(-0.5, 0.0), c(-0.5, 0.0), 4);
        let re: Vec<f64> = e.iter().map(|v| v.re).collect();
        assert_eq!(re, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn exponents_with_extra_monomial() {
        let f = PolyMapGerm::new(
            Poly::x() + Poly::monomial(2, 1, c(-0.5, 0.0)) + Poly::monomial(2, 2, c(0.1, 0.0)),
            Poly::y() + Poly::monomial(1, 2, c(-0.5, 0.0)),
        )
        .unwrap();
        let e = decay_exponents(&f, 1, 1, c(-0.5, 0.0), c(-0.5, 0.0), 4);
        let re: Vec<f64> = e.iter().map(|v| v.re).collect();
        assert_eq!(re, vec![0.5, 1.0, 1.5, 2.0]);
    }
}

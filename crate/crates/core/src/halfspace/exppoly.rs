//! Exponential polynomials `Σ c x^l e^{iζx}` on the half-line.
//!
//! `D = -i d/dx` acts by the shift rule `P(D)(e^{iζx} q) = e^{iζx} P(ζ + D) q`,
//! so every operation below is exact up to rounding.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Integration range `[0, X]` in the normal variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Depth {
    Infinite,
    Finite(f64),
}

impl Depth {
    /// The shallower of two depths.
    pub fn min(self, other: Depth) -> Depth {
        match (self, other) {
            (Depth::Infinite, d) | (d, Depth::Infinite) => d,
            (Depth::Finite(a), Depth::Finite(b)) => Depth::Finite(a.min(b)),
        }
    }
}

/// `coef · x^power · e^{iζx}`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpTerm {
    pub coef: Complex64,
    pub power: u32,
    pub zeta: Complex64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
}

/// Coefficients of `h ↦ p(ζ + h)`, i.e. `p^{(q)}(ζ)/q!`.
pub fn taylor_shift(p: &[Complex64], zeta: Complex64) -> Vec<Complex64> {
    let mut t = p.to_vec();
    let n = t.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let next = t[j + 1];
            t[j] += zeta * next;
        }
    }
    t
}

fn falling(l: u32, q: u32) -> f64 {
    (l - q + 1..=l).map(f64::from).product()
}

fn poly_scale(p: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    p.iter()
        .enumerate()
        .map(|(k, c)| c.norm() * r.powi(k as i32))
        .sum()
}

/// `∫₀^X x^a e^{-βx} dx`.
pub fn moment(a: u32, beta: Complex64, depth: Depth) -> Result<Complex64> {
    let fact: f64 = (1..=a).map(f64::from).product();
    match depth {
        Depth::Infinite => {
            if beta.re <= 0.0 {
                return Err(Error::Domain(format!(
                    "non-decaying product e^{{-({beta})x}} on an unbounded interval"
                )));
            }
            Ok(fact / beta.powu(a + 1))
        }
        Depth::Finite(x) => {
            let z = beta * x;
            let xa1 = x.powi(a as i32 + 1);
            if z.norm() <= 1.0_f64.max(0.5 * a as f64) {
                let mut sum = ZERO;
                let mut pow = Complex64::new(1.0, 0.0);
                for k in 0..200u32 {
                    let term = pow / f64::from(a + k + 1);
                    sum += term;
                    if term.norm() < 1e-18 * sum.norm() && k > 2 {
                        break;
                    }
                    pow *= -z / f64::from(k + 1);
                }
                Ok(xa1 * sum)
            } else {
                let e = (-z).exp();
                let mut i = (Complex64::new(1.0, 0.0) - e) / beta;
                let mut xj = 1.0;
                for j in 1..=a {
                    xj *= x;
                    i = (f64::from(j) * i - xj * e) / beta;
                }
                Ok(i)
            }
        }
    }
}

impl ExpPoly {
    pub fn new() -> Self {
        ExpPoly { terms: Vec::new() }
    }

    /// `coef · e^{iζx}`
    pub fn exp(coef: Complex64, zeta: Complex64) -> Self {
        ExpPoly {
            terms: vec![ExpTerm {
                coef,
                power: 0,
                zeta,
            }],
        }
    }

    pub fn push(&mut self, coef: Complex64, power: u32, zeta: Complex64) {
        self.terms.push(ExpTerm { coef, power, zeta });
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coef * x.powi(t.power as i32) * (Complex64::i() * t.zeta * x).exp())
            .sum()
    }

    /// Whether every term decays (`Im ζ > 0`).
    pub fn is_decaying(&self) -> bool {
        self.terms.iter().all(|t| t.zeta.im > 0.0)
    }

    /// Merges terms with identical `(power, ζ)` and drops zero coefficients.
    pub fn simplify(&mut self) {
        let mut index: HashMap<(u32, u64, u64), usize> = HashMap::new();
        let mut out: Vec<ExpTerm> = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let key = (t.power, t.zeta.re.to_bits(), t.zeta.im.to_bits());
            match index.get(&key) {
                Some(&k) => out[k].coef += t.coef,
                None => {
                    index.insert(key, out.len());
                    out.push(*t);
                }
            }
        }
        out.retain(|t| t.coef != ZERO);
        self.terms = out;
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        out.terms.extend_from_slice(&other.terms);
        out.simplify();
        out
    }

    pub fn sub(&self, other: &ExpPoly) -> ExpPoly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ExpTerm {
                    coef: t.coef * c,
                    ..*t
                })
                .collect(),
        }
    }

    /// `P(D)` applied exactly, with `P` given by ascending coefficients.
    pub fn apply(&self, p: &[Complex64]) -> ExpPoly {
        let deg = p.len().saturating_sub(1) as u32;
        let mut out = ExpPoly::new();
        for t in &self.terms {
            let shift = taylor_shift(p, t.zeta);
            let mut iq = Complex64::new(1.0, 0.0);
            for q in 0..=t.power.min(deg) {
                let c = t.coef * shift[q as usize] * iq * falling(t.power, q);
                if c != ZERO {
                    out.push(c, t.power - q, t.zeta);
                }
                iq *= MINUS_I;
            }
        }
        out.simplify();
        out
    }

    /// `D^j`
    pub fn dn(&self, j: u32) -> ExpPoly {
        let mut p = vec![ZERO; j as usize + 1];
        p[j as usize] = Complex64::new(1.0, 0.0);
        self.apply(&p)
    }

    /// `(P(D) w)(0)`
    pub fn boundary_value(&self, p: &[Complex64]) -> Complex64 {
        let deg = p.len().saturating_sub(1) as u32;
        self.terms
            .iter()
            .filter(|t| t.power <= deg)
            .map(|t| {
                let shift = taylor_shift(p, t.zeta);
                t.coef * shift[t.power as usize] * MINUS_I.powu(t.power) * falling(t.power, t.power)
            })
            .sum()
    }

    /// `∫₀^X w v̄ dx` in closed form.
    pub fn inner(&self, other: &ExpPoly, depth: Depth) -> Result<Complex64> {
        let mut sum = ZERO;
        for a in &self.terms {
            for b in &other.terms {
                let beta = -Complex64::i() * (a.zeta - b.zeta.conj());
                sum += a.coef * b.coef.conj() * moment(a.power + b.power, beta, depth)?;
            }
        }
        Ok(sum)
    }

    /// `∫₀^X |w|² dx`
    pub fn norm_sq(&self, depth: Depth) -> Result<f64> {
        Ok(self.inner(self, depth)?.re.max(0.0))
    }
}

/// Solution `w` of `P(D) w = x^l e^{iηx}` of the form `Q(x) e^{iηx}`, `deg Q = l`.
pub fn particular_term(p: &[Complex64], power: u32, eta: Complex64) -> Result<ExpPoly> {
    let shift = taylor_shift(p, eta);
    let t0 = shift[0];
    if t0.norm() <= 1e-13 * poly_scale(p, eta) {
        return Err(Error::Singular(format!(
            "forcing frequency {eta} is a root of the interior symbol"
        )));
    }
    let l = power as usize;
    let mut q = vec![ZERO; l + 1];
    for i in (0..=l).rev() {
        let mut acc = if i == l {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        };
        for j in (i + 1)..=l {
            let d = j - i;
            if d < shift.len() {
                acc -= q[j] * shift[d] * MINUS_I.powu(d as u32) * falling(j as u32, d as u32);
            }
        }
        q[i] = acc / t0;
    }
    let mut out = ExpPoly::new();
    for (i, c) in q.into_iter().enumerate() {
        if c != ZERO {
            out.push(c, i as u32, eta);
        }
    }
    Ok(out)
}

/// Solution of `P(D) w = f` built term by term from [`particular_term`].
pub fn particular(p: &[Complex64], f: &ExpPoly) -> Result<ExpPoly> {
    let mut out = ExpPoly::new();
    for t in &f.terms {
        let w = particular_term(p, t.power, t.zeta)?;
        out.terms.extend(w.scale(t.coef).terms);
    }
    out.simplify();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_of_exponential() {
        let w = ExpPoly::exp(c(2.0, 0.0), c(0.5, 1.0));
        let d = w.dn(1);
        for x in [0.0, 0.3, 1.7] {
            assert!((d.eval(x) - c(0.5, 1.0) * w.eval(x)).norm() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_polynomial_factor() {
        let mut w = ExpPoly::new();
        w.push(c(1.0, 0.0), 2, c(0.0, 1.0));
        let d = w.dn(1);
        // -i d/dx (x² e^{-x}) = -i (2x - x²) e^{-x}
        for x in [0.2, 1.1] {
            let expect = c(0.0, -1.0) * (2.0 * x - x * x) * (-x as f64).exp();
            assert!((d.eval(x) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn particular_solves_resonant_free_equation() {
        // (D² + 1) w = x e^{2ix}
        let p = [c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let w = particular_term(&p, 1, c(2.0, 0.0)).unwrap();
        let r = w.apply(&p);
        for x in [0.0, 0.4, 2.5] {
            let f = x * (c(0.0, 2.0 * x)).exp();
            assert!((r.eval(x) - f).norm() < 1e-13);
        }
    }

    #[test]
    fn particular_detects_root() {
        let p = [c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert!(particular_term(&p, 0, c(0.0, 1.0)).is_err());
    }

    #[test]
    fn moments_agree() {
        for &(a, beta, x) in &[(0u32, c(1.0, 0.0), 2.0), (3, c(0.2, 5.0), 1.5), (5, c(2.0, -0.3), 0.1), (4, c(0.0, 3.0), 3.0)] {
            let exact = moment(a, beta, Depth::Finite(x)).unwrap();
            let n = 20000;
            let h = x / n as f64;
            let mut q = c(0.0, 0.0);
            for k in 0..=n {
                let t = k as f64 * h;
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                q += w * t.powi(a as i32) * (-beta * t).exp();
            }
            q *= h;
            assert!((q - exact).norm() < 1e-7 * (1.0 + exact.norm()), "{a} {beta} {x}");
        }
        let inf = moment(2, c(2.0, 1.0), Depth::Infinite).unwrap();
        assert!((inf - 2.0 / c(2.0, 1.0).powu(3)).norm() < 1e-15);
        assert!(moment(0, c(0.0, 1.0), Depth::Infinite).is_err());
    }

    #[test]
    fn boundary_value_matches_evaluation() {
        let mut w = ExpPoly::new();
        w.push(c(1.0, 2.0), 0, c(0.3, 1.0));
        w.push(c(-0.5, 0.1), 1, c(0.0, 2.0));
        let p = [c(0.5, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)];
        assert!((w.boundary_value(&p) - w.apply(&p).eval(0.0)).norm() < 1e-13);
    }

    #[test]
    fn norm_of_decaying_exponential() {
        let w = ExpPoly::exp(c(1.0, 0.0), c(0.7, 1.5));
        let n = w.norm_sq(Depth::Infinite).unwrap();
        assert!((n - 1.0 / 3.0).abs() < 1e-15);
    }
}

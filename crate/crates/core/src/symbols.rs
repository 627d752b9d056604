//! Constant-coefficient polynomial symbols.
//!
//! Operators are stored in the `D = -i∂` convention: a term `a_α D^α` has
//! symbol `a_α ξ^α`, so `∂_k` has symbol `i ξ_k` and `Δ` has symbol `-|ξ|²`.
//! The last coordinate is the normal direction of the half-space `x_n > 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multi-index `α ∈ N₀ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    /// `α = order · e_axis` in dimension `n`.
    pub fn axis(n: usize, axis: usize, order: u32) -> Self {
        let mut e = vec![0; n];
        e[axis] = order;
        MultiIndex(e)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Order in the normal variable, `α_n`.
    pub fn normal(&self) -> u32 {
        *self.0.last().unwrap_or(&0)
    }

    /// `ξ^α` for a real covector.
    pub fn monomial(&self, xi: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(xi)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }

    /// `ξ'^{α'}`, ignoring the normal entry.
    pub fn tangential_monomial(&self, xi_t: &[f64]) -> f64 {
        self.0[..self.0.len() - 1]
            .iter()
            .zip(xi_t)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }

    fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse polynomial in `n` real covariables with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolPoly {
    n: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl SymbolPoly {
    pub fn new(n: usize) -> Self {
        SymbolPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(alpha: MultiIndex, coeff: Complex64) -> Self {
        let mut p = SymbolPoly::new(alpha.dim());
        p.add_term(alpha, coeff);
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    /// Adds `coeff · ξ^α`, merging with an existing term. Zero results are dropped.
    pub fn add_term(&mut self, alpha: MultiIndex, coeff: Complex64) {
        assert_eq!(alpha.dim(), self.n, "multi-index dimension mismatch");
        let entry = self.terms.entry(alpha).or_insert(Complex64::new(0.0, 0.0));
        *entry += coeff;
        self.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::order).max()
    }

    pub fn scale(&self, c: Complex64) -> SymbolPoly {
        let mut out = SymbolPoly::new(self.n);
        for (a, v) in &self.terms {
            out.add_term(a.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &SymbolPoly) -> SymbolPoly {
        let mut out = self.clone();
        for (a, v) in &other.terms {
            out.add_term(a.clone(), *v);
        }
        out
    }

    pub fn mul(&self, other: &SymbolPoly) -> SymbolPoly {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = SymbolPoly::new(self.n);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.add(b), x * y);
            }
        }
        out
    }

    /// Homogeneous part of the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> SymbolPoly {
        SymbolPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(a, _)| a.order() == degree)
                .map(|(a, c)| (a.clone(), *c))
                .collect(),
        }
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(a, c)| c * a.monomial(xi))
            .sum()
    }

    /// Coefficients (ascending powers of `ζ`) of `ζ ↦ p(ξ', ζ)`.
    pub fn xi_n_coefficients(&self, xi_t: &[f64]) -> Vec<Complex64> {
        let deg = self.terms.keys().map(MultiIndex::normal).max().unwrap_or(0);
        let mut out = vec![Complex64::new(0.0, 0.0); deg as usize + 1];
        for (a, c) in &self.terms {
            out[a.normal() as usize] += c * a.tangential_monomial(xi_t);
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn scale_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `A(D) = Σ_{|α| ≤ 2m} a_α D^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialSymbol {
    order: u32,
    poly: SymbolPoly,
}

impl DifferentialSymbol {
    pub fn new(order: u32, poly: SymbolPoly) -> Result<Self> {
        if poly.dim() < 2 {
            return Err(Error::InvalidSymbol(format!(
                "dimension {} < 2",
                poly.dim()
            )));
        }
        if order < 2 || order % 2 != 0 {
            return Err(Error::InvalidSymbol(format!(
                "order {order} must be even and at least 2"
            )));
        }
        if let Some((a, _)) = poly.terms().find(|(a, _)| a.order() > order) {
            return Err(Error::InvalidSymbol(format!(
                "term {a} exceeds order {order}"
            )));
        }
        if poly.homogeneous_part(order).terms.is_empty() {
            return Err(Error::InvalidSymbol(format!(
                "no nonzero term of principal order {order}"
            )));
        }
        Ok(DifferentialSymbol { order, poly })
    }

    /// `Δ`, symbol `-|ξ|²`.
    pub fn laplacian(n: usize) -> Self {
        let mut p = SymbolPoly::new(n);
        for k in 0..n {
            p.add_term(MultiIndex::axis(n, k, 2), Complex64::new(-1.0, 0.0));
        }
        DifferentialSymbol { order: 2, poly: p }
    }

    /// `Δ²`, symbol `|ξ|⁴`.
    pub fn bilaplacian(n: usize) -> Self {
        let l = DifferentialSymbol::laplacian(n);
        DifferentialSymbol {
            order: 4,
            poly: l.poly.mul(&l.poly),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        DifferentialSymbol {
            order: self.order,
            poly: self.poly.scale(c),
        }
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    /// `2m`
    pub fn order(&self) -> u32 {
        self.order
    }

    /// `m`
    pub fn half_order(&self) -> u32 {
        self.order / 2
    }

    pub fn poly(&self) -> &SymbolPoly {
        &self.poly
    }

    pub fn principal(&self) -> SymbolPoly {
        self.poly.homogeneous_part(self.order)
    }

    pub fn eval_symbol(&self, xi: &[f64], restrict_principal: bool) -> Complex64 {
        if restrict_principal {
            self.principal().eval(xi)
        } else {
            self.poly.eval(xi)
        }
    }

    /// Coefficients of `ζ ↦ A₀(ξ', ζ)`.
    pub fn principal_xi_n_polynomial(&self, xi_t: &[f64]) -> Vec<Complex64> {
        let mut c = self.principal().xi_n_coefficients(xi_t);
        c.resize(self.order as usize + 1, Complex64::new(0.0, 0.0));
        c
    }

    /// Coefficients of `ζ ↦ λ - A₀(ξ', ζ)`. The `ζ^{2m}` coefficient must not vanish.
    pub fn lambda_minus_polynomial(&self, xi_t: &[f64], lambda: Complex64) -> Result<Vec<Complex64>> {
        let mut c: Vec<Complex64> = self
            .principal_xi_n_polynomial(xi_t)
            .into_iter()
            .map(|a| -a)
            .collect();
        c[0] += lambda;
        let lead = c[self.order as usize].norm();
        if lead == 0.0 || lead < 1e-14 * c.iter().map(|a| a.norm()).fold(0.0, f64::max) {
            return Err(Error::DegenerateLeading(lead));
        }
        Ok(c)
    }
}

/// `B_j = Σ_{|β| ≤ m_j} b_β γ₀ D^β`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySymbol {
    order: u32,
    poly: SymbolPoly,
}

impl BoundarySymbol {
    pub fn new(order: u32, poly: SymbolPoly) -> Result<Self> {
        if let Some((a, _)) = poly.terms().find(|(a, _)| a.order() > order) {
            return Err(Error::InvalidSymbol(format!(
                "boundary term {a} exceeds order {order}"
            )));
        }
        if poly.terms().next().is_none() {
            return Err(Error::InvalidSymbol("boundary symbol has no terms".into()));
        }
        Ok(BoundarySymbol { order, poly })
    }

    /// `γ₀`
    pub fn trace(n: usize) -> Self {
        BoundarySymbol {
            order: 0,
            poly: SymbolPoly::monomial(MultiIndex::zero(n), Complex64::new(1.0, 0.0)),
        }
    }

    /// `∂_n`, symbol `i ξ_n`.
    pub fn d_n(n: usize) -> Self {
        BoundarySymbol {
            order: 1,
            poly: SymbolPoly::monomial(MultiIndex::axis(n, n - 1, 1), Complex64::new(0.0, 1.0)),
        }
    }

    /// `∂_n Δ`, symbol `-i ξ_n |ξ|²`.
    pub fn d_n_laplacian(n: usize) -> Self {
        let d = BoundarySymbol::d_n(n);
        BoundarySymbol {
            order: 3,
            poly: d.poly.mul(DifferentialSymbol::laplacian(n).poly()),
        }
    }

    /// Outward normal derivative on `x_n > 0`, `∂_ν = -∂_n`.
    pub fn normal_derivative(n: usize) -> Self {
        BoundarySymbol::d_n(n).scaled(Complex64::new(-1.0, 0.0))
    }

    /// `∂_ν Δ = -∂_n Δ`.
    pub fn normal_laplacian(n: usize) -> Self {
        BoundarySymbol::d_n_laplacian(n).scaled(Complex64::new(-1.0, 0.0))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        BoundarySymbol {
            order: self.order,
            poly: self.poly.scale(c),
        }
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    /// `m_j`
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn poly(&self) -> &SymbolPoly {
        &self.poly
    }

    pub fn principal(&self) -> SymbolPoly {
        self.poly.homogeneous_part(self.order)
    }

    pub fn eval_boundary_symbol(&self, xi: &[f64], restrict_principal: bool) -> Complex64 {
        if restrict_principal {
            self.principal().eval(xi)
        } else {
            self.poly.eval(xi)
        }
    }

    /// Coefficients of `ζ ↦ B₀ⱼ(ξ', ζ)` (principal part).
    pub fn xi_n_polynomial(&self, xi_t: &[f64]) -> Vec<Complex64> {
        self.principal().xi_n_coefficients(xi_t)
    }
}

/// The anisotropic weight `⟨ξ,λ⟩ = (1 + |ξ|² + |λ|^{1/m})^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weight {
    pub m: u32,
}

impl Weight {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter("weight order m must be at least 1".into()));
        }
        Ok(Weight { m })
    }

    pub fn lambda_part(&self, lambda: Complex64) -> f64 {
        lambda.norm().powf(1.0 / self.m as f64)
    }

    pub fn squared(&self, xi: &[f64], lambda: Complex64) -> f64 {
        1.0 + xi.iter().map(|x| x * x).sum::<f64>() + self.lambda_part(lambda)
    }

    pub fn eval(&self, xi: &[f64], lambda: Complex64) -> f64 {
        self.squared(xi, lambda).sqrt()
    }

    /// `⟨λ⟩ = ⟨0,λ⟩`
    pub fn lambda_bracket(&self, lambda: Complex64) -> f64 {
        (1.0 + self.lambda_part(lambda)).sqrt()
    }
}

pub fn anisotropic_weight(w: Weight, xi: &[f64], lambda: Complex64) -> f64 {
    w.eval(xi, lambda)
}

/// Evaluates a polynomial given by ascending coefficients at a complex point.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Ascending coefficients of the derivative.
pub fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

/// On-disk form `{"n": int, "order": int, "terms": [{"alpha": [..], "re": .., "im": ..}]}`.
#[derive(Serialize, Deserialize)]
pub struct SymbolJson {
    n: usize,
    order: u32,
    terms: Vec<TermJson>,
}

impl SymbolJson {
    fn from_parts(order: u32, poly: &SymbolPoly) -> Self {
        SymbolJson {
            n: poly.dim(),
            order,
            terms: poly
                .terms()
                .map(|(a, c)| TermJson {
                    alpha: a.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    fn into_poly(self) -> Result<(u32, SymbolPoly)> {
        if self.n == 0 || self.n > 16 {
            return Err(Error::InvalidSymbol(format!("dimension {} out of range", self.n)));
        }
        if self.order > 64 {
            return Err(Error::InvalidSymbol(format!("order {} out of range", self.order)));
        }
        let mut p = SymbolPoly::new(self.n);
        for t in self.terms {
            if t.alpha.len() != self.n {
                return Err(Error::InvalidSymbol(format!(
                    "multi-index {:?} has length {} but n = {}",
                    t.alpha,
                    t.alpha.len(),
                    self.n
                )));
            }
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(Error::InvalidSymbol("non-finite coefficient".into()));
            }
            if t.alpha.iter().map(|&a| a as u64).sum::<u64>() > self.order as u64 {
                return Err(Error::InvalidSymbol(format!(
                    "term {:?} exceeds order {}",
                    t.alpha, self.order
                )));
            }
            p.add_term(MultiIndex::new(t.alpha), Complex64::new(t.re, t.im));
        }
        Ok((self.order, p))
    }
}

impl Serialize for DifferentialSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolJson::from_parts(self.order, &self.poly).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DifferentialSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (order, poly) = SymbolJson::deserialize(d)?
            .into_poly()
            .map_err(serde::de::Error::custom)?;
        DifferentialSymbol::new(order, poly).map_err(serde::de::Error::custom)
    }
}

impl Serialize for BoundarySymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolJson::from_parts(self.order, &self.poly).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundarySymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (order, poly) = SymbolJson::deserialize(d)?
            .into_poly()
            .map_err(serde::de::Error::custom)?;
        BoundarySymbol::new(order, poly).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn neg_bilaplacian_principal_value() {
        let a = DifferentialSymbol::bilaplacian(2).scaled(c(-1.0, 0.0));
        assert_eq!(a.eval_symbol(&[1.0, 0.0], true), c(-1.0, 0.0));
        assert_eq!(a.eval_symbol(&[0.0, 0.0], true), c(0.0, 0.0));
    }

    #[test]
    fn laplacian_value() {
        let a = DifferentialSymbol::laplacian(2);
        assert_eq!(a.eval_symbol(&[3.0, 4.0], false), c(-25.0, 0.0));
    }

    #[test]
    fn boundary_symbol_values() {
        assert_eq!(BoundarySymbol::trace(3).eval_boundary_symbol(&[0.3, -2.0, 7.0], true), c(1.0, 0.0));
        assert_eq!(BoundarySymbol::d_n(3).eval_boundary_symbol(&[0.0, 0.0, 2.0], true), c(0.0, 2.0));
        let v = BoundarySymbol::d_n_laplacian(2).eval_boundary_symbol(&[1.0, 1.0], true);
        assert!((v - c(0.0, -2.0)).norm() < 1e-15);
        let v = BoundarySymbol::normal_laplacian(2).eval_boundary_symbol(&[1.0, 1.0], true);
        assert!((v - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn xi_n_polynomials() {
        let a = DifferentialSymbol::bilaplacian(2).scaled(c(-1.0, 0.0));
        let lam = c(0.7, -0.2);
        let p = a.lambda_minus_polynomial(&[1.0], lam).unwrap();
        let want = [lam + 1.0, c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        for (x, y) in p.iter().zip(want) {
            assert!((x - y).norm() < 1e-15);
        }
        assert_eq!(BoundarySymbol::trace(2).xi_n_polynomial(&[0.4]), vec![c(1.0, 0.0)]);
        let h = DifferentialSymbol::laplacian(3);
        let p = h.lambda_minus_polynomial(&[1.0, 2.0], lam).unwrap();
        assert_eq!(p, vec![lam + 5.0, c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn degenerate_leading_coefficient() {
        // ξ₁² ξ₂² has no ζ⁴ term
        let mut p = SymbolPoly::new(2);
        p.add_term(MultiIndex::new(vec![2, 2]), c(1.0, 0.0));
        let a = DifferentialSymbol::new(4, p).unwrap();
        assert!(matches!(
            a.lambda_minus_polynomial(&[1.0], c(1.0, 0.0)),
            Err(Error::DegenerateLeading(_))
        ));
    }

    #[test]
    fn weights() {
        let w1 = Weight::new(1).unwrap();
        let w2 = Weight::new(2).unwrap();
        assert_eq!(anisotropic_weight(w1, &[0.0, 0.0], c(0.0, 0.0)), 1.0);
        assert_eq!(anisotropic_weight(w1, &[0.0, 0.0], c(3.0, 0.0)), 2.0);
        assert_eq!(anisotropic_weight(w2, &[2.0, 0.0], c(16.0, 0.0)), 3.0);
    }

    #[test]
    fn invalid_symbols_rejected() {
        let mut p = SymbolPoly::new(2);
        p.add_term(MultiIndex::new(vec![3, 0]), c(1.0, 0.0));
        assert!(DifferentialSymbol::new(2, p.clone()).is_err());
        assert!(DifferentialSymbol::new(3, p).is_err());
        let p = SymbolPoly::monomial(MultiIndex::new(vec![1, 0]), c(1.0, 0.0));
        assert!(DifferentialSymbol::new(2, p).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = DifferentialSymbol::bilaplacian(3).scaled(c(-1.0, 0.5));
        let s = serde_json::to_string(&a).unwrap();
        let b: DifferentialSymbol = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
        let bad = r#"{"n": 2, "order": 2, "terms": [{"alpha": [1], "re": 1.0, "im": 0.0}]}"#;
        assert!(serde_json::from_str::<DifferentialSymbol>(bad).is_err());
    }
}

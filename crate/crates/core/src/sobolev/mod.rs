//! Mixed-smoothness parameter-dependent Sobolev and Besov norms on a periodic
//! surrogate of `Rⁿ`.
//!
//! Fields are trigonometric polynomials, so every multiplier identity is exact
//! and the `L^p` rectangle rule is the only approximation when `p ≠ 2`. The
//! normal variable `x_n` is the last grid axis.

mod grid;
mod multiply;

pub use grid::{fft_nd, BoundaryField, GridField, TorusGrid};
pub use multiply::{apply_multiplication, operator_norm_estimate, MultiplierFunction};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbols::Weight;

/// Norm descriptor `(s, σ, p, λ)` with weight order `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub s: f64,
    pub sigma: f64,
    pub p: f64,
    #[serde(with = "crate::io::complex_serde")]
    pub lambda: Complex64,
    pub m: u32,
}

impl NormSpec {
    pub fn new(s: f64, sigma: f64, p: f64, lambda: Complex64, m: u32) -> Result<Self> {
        let spec = NormSpec {
            s,
            sigma,
            p,
            lambda,
            m,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn l2(s: f64, sigma: f64, lambda: Complex64, m: u32) -> Self {
        NormSpec {
            s,
            sigma,
            p: 2.0,
            lambda,
            m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::Parameter(format!("p = {} not in (1, ∞)", self.p)));
        }
        if self.m == 0 {
            return Err(Error::Parameter("weight order m must be ≥ 1".into()));
        }
        if !(self.s.is_finite() && self.sigma.is_finite() && self.lambda.is_finite()) {
            return Err(Error::Parameter("non-finite norm parameters".into()));
        }
        Ok(())
    }

    pub fn weight(&self) -> Weight {
        Weight { m: self.m }
    }

    /// `⟨k,λ⟩^s ⟨k',λ⟩^σ`
    pub fn symbol(&self, k: &[f64]) -> f64 {
        let w = self.weight();
        let full = w.squared(k, self.lambda);
        let tang = w.squared(&k[..k.len() - 1], self.lambda);
        full.powf(0.5 * self.s) * tang.powf(0.5 * self.sigma)
    }

    pub fn with_lambda(&self, lambda: Complex64) -> Self {
        NormSpec { lambda, ..*self }
    }

    /// Whether the `L^p` quadrature is exact (`p = 2`, Parseval) or only quadrature-grade.
    pub fn is_exact(&self) -> bool {
        self.p == 2.0
    }
}

/// `⟨D,λ⟩^s ⟨D',λ⟩^σ u`
pub fn bessel_multiplier(u: &GridField, spec: &NormSpec) -> GridField {
    u.apply_multiplier(|k| Complex64::new(spec.symbol(k), 0.0))
}

/// `‖⟨D,λ⟩^s ⟨D',λ⟩^σ u‖_{L^p}` by the rectangle rule.
pub fn mixed_norm(u: &GridField, spec: &NormSpec) -> f64 {
    bessel_multiplier(u, spec).lp_norm(spec.p)
}

/// `⟨λ⟩^{s+σ-n/p} ‖κ_λ^{-1} u‖_{H^{s,σ}_p}` with `(κ_λ u)(x) = u(⟨λ⟩x)`.
///
/// The dilation acts on the Fourier side: `κ_λ^{-1}` rescales wavenumbers to
/// `k/⟨λ⟩` and multiplies `L^p` norms by `⟨λ⟩^{n/p}`.
pub fn scaled_norm(u: &GridField, spec: &NormSpec) -> f64 {
    let n = u.grid.n as f64;
    let bracket = spec.weight().lambda_bracket(spec.lambda);
    let unscaled = NormSpec {
        lambda: Complex64::new(0.0, 0.0),
        ..*spec
    };
    let v = u.apply_multiplier(|k| {
        let ks: Vec<f64> = k.iter().map(|x| x / bracket).collect();
        Complex64::new(unscaled.symbol(&ks), 0.0)
    });
    let dilated = bracket.powf(n / spec.p) * v.lp_norm(spec.p);
    bracket.powf(spec.s + spec.sigma - n / spec.p) * dilated
}

/// `(∂_n^j u)|_{x_n = 0}` on the boundary torus.
pub fn trace(u: &GridField, j: u32) -> Result<BoundaryField> {
    let grid = u.grid;
    let bgrid = grid.boundary()?;
    let c = u.coefficients();
    let np = grid.points;
    let mut b = vec![Complex64::new(0.0, 0.0); bgrid.len()];
    for (flat, v) in c.iter().enumerate() {
        let kn_bin = flat % np;
        if j % 2 == 1 && grid.is_nyquist(kn_bin) {
            continue;
        }
        let f = Complex64::new(0.0, grid.wavenumber(kn_bin)).powu(j);
        b[flat / np] += v * f;
    }
    let mut coeffs = b;
    fft_nd(&bgrid, &mut coeffs, true);
    GridField::new(bgrid, coeffs)
}

/// `‖g‖_{B^s_{pp,λ}}` on the boundary torus.
///
/// For `p = 2` this is the exact multiplier norm `‖⟨D',λ⟩^s g‖_{L²}`. For other
/// `p` it is a dyadic sum over sharp blocks `2^j ≤ ⟨k',λ⟩ < 2^{j+1}` and only
/// quadrature-grade.
pub fn besov_norm(g: &BoundaryField, s: f64, p: f64, lambda: Complex64, m: u32) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) || m == 0 {
        return Err(Error::Parameter("besov norm needs p ∈ (1, ∞) and m ≥ 1".into()));
    }
    let w = Weight { m };
    if p == 2.0 {
        let v = g.apply_multiplier(|k| Complex64::new(w.eval(k, lambda).powf(s), 0.0));
        return Ok(v.lp_norm(2.0));
    }
    let c = g.coefficients();
    let block_of = |k: &[f64]| w.eval(k, lambda).log2().floor().max(0.0) as usize;
    let nblocks = (0..g.grid.len())
        .map(|i| block_of(&g.grid.wavevector(i)))
        .max()
        .unwrap_or(0)
        + 1;
    let mut total = 0.0;
    for j in 0..nblocks {
        let mut cj = c.clone();
        for (i, v) in cj.iter_mut().enumerate() {
            if block_of(&g.grid.wavevector(i)) != j {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        let block = GridField::from_coefficients(g.grid, cj)?;
        total += (2f64.powf(j as f64 * s) * block.lp_norm(p)).powf(p);
    }
    Ok(total.powf(1.0 / p))
}

/// `mixed_norm(u, to) / mixed_norm(u, from)`
pub fn embedding_ratio(u: &GridField, from: &NormSpec, to: &NormSpec) -> Result<f64> {
    let denom = mixed_norm(u, from);
    if denom == 0.0 {
        return Err(Error::Singular("embedding ratio of the zero field".into()));
    }
    Ok(mixed_norm(u, to) / denom)
}

/// `Σ_{j ≤ s} ‖∂_n^j u‖_{H^{0, s+σ-j}_{p,λ}}`, the normal-derivative form of the
/// `H^{s,σ}_{p,λ}` norm for integer `s`.
pub fn normal_derivative_sum_norm(u: &GridField, s: u32, spec: &NormSpec) -> Result<f64> {
    let n = u.grid.n;
    let mut alpha = vec![0; n];
    let mut total = 0.0;
    for j in 0..=s {
        alpha[n - 1] = j;
        let d = u.derivative(&alpha)?;
        let sp = NormSpec {
            s: 0.0,
            sigma: s as f64 + spec.sigma - j as f64,
            ..*spec
        };
        total += mixed_norm(&d, &sp);
    }
    Ok(total)
}

/// Outcome of the symbol-level interpolation inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InterpolationCheck {
    pub c_eps: f64,
    pub max_violation: f64,
}

/// `C(ε) = max_{t ≥ 1} (t^a - ε t^b)` for `0 < a < b`.
pub fn interpolation_constant(a: f64, b: f64, eps: f64) -> f64 {
    let crit = (a / (eps * b)).powf(1.0 / (b - a));
    let t = crit.max(1.0);
    (t.powf(a) - eps * t.powf(b)).max(0.0)
}

/// Verifies `⟨k,λ⟩^s ≤ ε⟨k,λ⟩^{s₁} + C(ε)⟨λ⟩^{s-s₀}⟨k,λ⟩^{s₀}` (times the common
/// `⟨k',λ⟩^σ`) at every wavenumber of `grid`. `max_violation` is the largest
/// value of `(lhs - rhs)/lhs`.
#[allow(clippy::too_many_arguments)]
pub fn interpolation_inequality_check(
    s0: f64,
    s: f64,
    s1: f64,
    sigma: f64,
    eps: f64,
    lambda: Complex64,
    m: u32,
    grid: &TorusGrid,
) -> Result<InterpolationCheck> {
    if !(s0 < s && s < s1) {
        return Err(Error::Parameter(format!(
            "interpolation needs s0 < s < s1, got {s0}, {s}, {s1}"
        )));
    }
    if !(eps > 0.0) || m == 0 {
        return Err(Error::Parameter("ε must be positive and m ≥ 1".into()));
    }
    let c_eps = interpolation_constant(s - s0, s1 - s0, eps);
    let w = Weight { m };
    let lb = w.lambda_bracket(lambda);
    let mut max_violation = f64::NEG_INFINITY;
    for i in 0..grid.len() {
        let k = grid.wavevector(i);
        let big = w.eval(&k, lambda);
        let tang = w.eval(&k[..k.len() - 1], lambda).powf(sigma);
        let lhs = big.powf(s) * tang;
        let rhs = (eps * big.powf(s1) + c_eps * lb.powf(s - s0) * big.powf(s0)) * tang;
        max_violation = max_violation.max((lhs - rhs) / lhs);
    }
    Ok(InterpolationCheck {
        c_eps,
        max_violation,
    })
}

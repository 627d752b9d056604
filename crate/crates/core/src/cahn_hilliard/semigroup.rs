use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::resolvent::{solve_resolvent_modal, ChProblem, ChState};
use crate::error::{Error, Result};

const TAIL: f64 = 1e-14;

/// Hyperbolic Dunford contour `μ(u) = a(1 + sin(iu - α))`, `u ∈ [-U, U]`, with
/// asymptotic half-angle `φ = π/2 + α`, trapezoid rule in `u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    /// Asymptotic half-angle `φ ∈ (π/2, θ)`.
    pub phi: f64,
    pub nodes: usize,
    /// `a·t`; chosen to minimize the error estimate when absent.
    pub kappa: Option<f64>,
    pub tol: f64,
}

impl ContourSpec {
    /// `φ = (π/2 + θ)/2`, 201 nodes.
    pub fn default_for(theta: f64) -> Self {
        ContourSpec {
            phi: (PI / 2.0 + theta) / 2.0,
            nodes: 201,
            kappa: None,
            tol: 1e-6,
        }
    }
}

/// Quadrature nodes `μ_k` and weights `w_k` with `e^{tA'} ≈ Σ w_k (μ_k - A')⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct ContourRule {
    pub kappa: f64,
    pub half_length: f64,
    pub step: f64,
    pub error_estimate: f64,
    #[serde(skip)]
    pub nodes: Vec<Complex64>,
    #[serde(skip)]
    pub weights: Vec<Complex64>,
}

fn estimate(kappa: f64, alpha: f64, strip: f64, nodes: usize) -> (f64, f64, f64) {
    let cosh_u = (1.0 - TAIL.ln() / kappa) / alpha.sin();
    let u = cosh_u.acosh();
    let h = 2.0 * u / (nodes - 1) as f64;
    let q = (-2.0 * PI * strip / h).exp();
    let disc = kappa.exp() * q / (1.0 - q);
    (u, h, disc.max(TAIL))
}

/// Builds the rule for `e^{tA'}`, where `A' = A - λ₀` has its spectrum outside
/// `-λ₀ + Σ_θ`.
pub fn contour_rule(theta: f64, t: f64, spec: &ContourSpec) -> Result<ContourRule> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("t = {t} must be positive")));
    }
    if !(spec.phi > PI / 2.0 && spec.phi < theta) {
        return Err(Error::Parameter(format!("φ = {} not in (π/2, θ)", spec.phi)));
    }
    if spec.nodes < 3 {
        return Err(Error::Parameter("at least three quadrature nodes".into()));
    }
    let alpha = spec.phi - PI / 2.0;
    let strip = alpha.min(theta - PI / 2.0 - alpha);
    let kappa = match spec.kappa {
        Some(k) if k > 0.0 && k.is_finite() => k,
        Some(k) => return Err(Error::Parameter(format!("κ = {k} must be positive"))),
        None => (1..=400)
            .map(|i| 0.1 * i as f64)
            .min_by(|a, b| {
                let ea = estimate(*a, alpha, strip, spec.nodes).2;
                let eb = estimate(*b, alpha, strip, spec.nodes).2;
                ea.total_cmp(&eb)
            })
            .unwrap_or(1.0),
    };
    let (u_max, h, error_estimate) = estimate(kappa, alpha, strip, spec.nodes);
    if error_estimate > spec.tol {
        return Err(Error::Quadrature {
            estimate: error_estimate,
            tolerance: spec.tol,
        });
    }
    let a = kappa / t;
    let i = Complex64::i();
    let mut nodes = Vec::with_capacity(spec.nodes);
    let mut weights = Vec::with_capacity(spec.nodes);
    for k in 0..spec.nodes {
        let u = -u_max + h * k as f64;
        let arg = i * u - alpha;
        let mu = a * (1.0 + arg.sin());
        let dmu = i * a * arg.cos();
        nodes.push(mu);
        weights.push((t * mu).exp() * dmu * h / (2.0 * PI * i));
    }
    Ok(ContourRule {
        kappa,
        half_length: u_max,
        step: h,
        error_estimate,
        nodes,
        weights,
    })
}

#[derive(Clone, Debug)]
pub struct SemigroupResult {
    pub state: ChState,
    pub rule: ContourRule,
}

/// `e^{t(A - λ₀)} state0` by the Dunford integral over the resolvent.
pub fn semigroup_apply(problem: &ChProblem, t: f64, state0: &ChState, spec: &ContourSpec) -> Result<SemigroupResult> {
    let rule = contour_rule(problem.cfg.theta, t, spec)?;
    let lambda0 = problem.cfg.lambda0;
    let mut acc = ChState::zeros(problem.grid(), state0.u1.depth);
    for (&mu, &w) in rule.nodes.iter().zip(&rule.weights) {
        let sol = solve_resolvent_modal(problem, &state0.u1, &state0.u2, mu + lambda0)?;
        acc = acc.add(&sol.state.scale(w))?;
    }
    Ok(SemigroupResult { state: acc, rule })
}

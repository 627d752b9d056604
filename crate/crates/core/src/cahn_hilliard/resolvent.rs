use num_complex::Complex64;
use serde::Serialize;

use super::symbols::{s_heat_unchecked, s_unchecked, tau_heat, tau_unchecked, ChConfig, Model};
use crate::ellipticity::Sector;
use crate::error::{Error, Result};
use crate::halfspace::{
    boundary_l2, forward, solve_mode, solve_modal_coefficients, Depth, ExpPoly, HalfSpaceField, ModalField,
    ModelProblem,
};
use crate::io::ser_complex;
use crate::sobolev::{BoundaryField, TorusGrid};
use crate::symbols::{BoundarySymbol, DifferentialSymbol};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// The dynamic boundary problem on `torus × (0, X)` together with the interior
/// model problem used in the first construction step.
#[derive(Clone, Debug)]
pub struct ChProblem {
    pub cfg: ChConfig,
    pub interior: ModelProblem,
}

impl ChProblem {
    pub fn new(cfg: ChConfig, boundary_grid: TorusGrid, xn_samples: Vec<f64>) -> Result<Self> {
        cfg.validate()?;
        let dim = boundary_grid.n + 1;
        let sector = Sector::closed(cfg.theta)?;
        let interior = match cfg.model {
            Model::Biharmonic => ModelProblem::new(
                DifferentialSymbol::bilaplacian(dim).scaled(Complex64::new(-1.0, 0.0)),
                vec![BoundarySymbol::trace(dim), BoundarySymbol::normal_laplacian(dim)],
                sector,
                boundary_grid,
                xn_samples,
            )?,
            Model::Heat => ModelProblem::new(
                DifferentialSymbol::laplacian(dim),
                vec![BoundarySymbol::trace(dim)],
                sector,
                boundary_grid,
                xn_samples,
            )?,
        };
        Ok(ChProblem { cfg, interior })
    }

    pub fn grid(&self) -> TorusGrid {
        self.interior.boundary_grid
    }

    fn dim(&self) -> usize {
        self.grid().n + 1
    }

    fn check_lambda(&self, lambda: Complex64) -> Result<()> {
        if lambda == ZERO || !lambda.is_finite() || lambda.arg().abs() > self.cfg.theta + 1e-12 {
            return Err(Error::Domain(format!("λ = {lambda} outside Σ_θ \\ {{0}}")));
        }
        Ok(())
    }

    fn normal_derivative_coeffs(&self, u: &ModalField) -> Vec<Complex64> {
        let b = BoundarySymbol::normal_derivative(self.dim());
        u.boundary_values(|kt| b.xi_n_polynomial(kt))
    }

    fn normal_laplacian_coeffs(&self, u: &ModalField) -> Vec<Complex64> {
        let b = BoundarySymbol::normal_laplacian(self.dim());
        u.boundary_values(|kt| b.xi_n_polynomial(kt))
    }
}

/// `(u₁, u₂)` in `X = L²(half-space) × L²(boundary)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChState {
    pub u1: ModalField,
    pub u2: BoundaryField,
}

impl ChState {
    pub fn zeros(grid: TorusGrid, depth: Depth) -> Self {
        ChState {
            u1: ModalField::zeros(grid, depth),
            u2: BoundaryField::zeros(grid),
        }
    }

    /// `√(‖u₁‖² + ‖u₂‖²)` with closed-form strip integrals.
    pub fn x_norm(&self) -> Result<f64> {
        Ok(self.u1.l2_norm()?.hypot(self.u2.lp_norm(2.0)))
    }

    pub fn add(&self, other: &ChState) -> Result<ChState> {
        Ok(ChState {
            u1: self.u1.add(&other.u1)?,
            u2: self.u2.add(&other.u2)?,
        })
    }

    pub fn scale(&self, c: Complex64) -> ChState {
        ChState {
            u1: self.u1.scale(c),
            u2: self.u2.scale(c),
        }
    }

    /// `‖γ₀u₁ - u₂‖ / max(‖u₂‖, ‖γ₀u₁‖)`, zero for the zero state.
    pub fn compatibility_defect(&self) -> Result<f64> {
        let tr = self.u1.trace()?;
        let d = tr.sub(&self.u2)?.lp_norm(2.0);
        let s = tr.lp_norm(2.0).max(self.u2.lp_norm(2.0));
        Ok(if s > 0.0 { d / s } else { 0.0 })
    }

    /// `u₁` on sample points together with `u₂`.
    pub fn sampled(&self, xn: &[f64]) -> Result<(HalfSpaceField, BoundaryField)> {
        Ok((self.u1.sample(xn)?, self.u2.clone()))
    }

    /// `X`-distance evaluated on sample points: trapezoid rule in `x_n`, exact in `x'`.
    ///
    /// Sums of many exponentials are evaluated pointwise, which avoids the
    /// cancellation of the closed-form Gram quadratic form.
    pub fn sampled_distance(&self, other: &ChState, xn: &[f64]) -> Result<f64> {
        if self.u1.grid != other.u1.grid {
            return Err(Error::GridMismatch("states on different grids".into()));
        }
        let grid = self.u1.grid;
        let mut total = 0.0;
        for (i, &x) in xn.iter().enumerate() {
            let a = self.u1.coefficients_at(x);
            let b = other.u1.coefficients_at(x);
            let w = trapezoid(xn, i);
            total += w * a.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>();
        }
        let u1 = (total * grid.length.powi(grid.n as i32)).sqrt();
        let du2 = boundary_l2(&grid, &diff(&self.u2.coefficients(), &other.u2.coefficients()));
        Ok(u1.hypot(du2))
    }
}

fn trapezoid(xn: &[f64], i: usize) -> f64 {
    let left = if i > 0 { xn[i] - xn[i - 1] } else { 0.0 };
    let right = if i + 1 < xn.len() { xn[i + 1] - xn[i] } else { 0.0 };
    0.5 * (left + right)
}

fn diff(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Output of the three-step construction.
#[derive(Clone, Debug)]
pub struct ChSolution {
    pub state: ChState,
    /// Step (i): interior solution with homogeneous boundary rows.
    pub u1_zero: ModalField,
    /// Step (ii): `ĝ' = ĝ - ∂_ν u₁⁰`.
    pub g_prime: Vec<Complex64>,
    /// Largest per-mode disagreement of the three-step and one-shot coefficients.
    pub path_defect: f64,
    /// Largest per-mode disagreement with the generic boundary solver.
    pub generic_defect: f64,
}

impl ChSolution {
    pub fn g_prime_norm(&self) -> f64 {
        boundary_l2(&self.state.u2.grid, &self.g_prime)
    }
}

fn relative(a: Complex64, b: Complex64, scale: f64) -> f64 {
    let s = a.norm().max(b.norm()).max(scale);
    if s > 0.0 {
        (a - b).norm() / s
    } else {
        0.0
    }
}

/// Resolvent `(λ - A)⁻¹(f, g)` with exact interior data.
pub fn solve_resolvent_modal(
    problem: &ChProblem,
    f: &ModalField,
    g: &BoundaryField,
    lambda: Complex64,
) -> Result<ChSolution> {
    problem.check_lambda(lambda)?;
    let grid = problem.grid();
    if f.grid != grid || g.grid != grid {
        return Err(Error::GridMismatch("data on a different boundary grid".into()));
    }
    let m = problem.interior.m();
    let zeros = vec![vec![ZERO; grid.len()]; m];
    let u1_zero = solve_modal_coefficients(&problem.interior, Some(f), &zeros, lambda)?.field;
    let g_hat = g.coefficients();
    let dn = problem.normal_derivative_coeffs(&u1_zero);
    let g_prime = diff(&g_hat, &dn);
    let mut u2_hat = vec![ZERO; grid.len()];
    let mut correction = ModalField::zeros(grid, Depth::Infinite);
    let mut path_defect: f64 = 0.0;
    let mut generic_defect: f64 = 0.0;
    for b in 0..grid.len() {
        let kt = grid.wavevector(b);
        let z = Complex64::new(kt.iter().map(|k| k * k).sum::<f64>().sqrt(), 0.0);
        let gp = g_prime[b];
        let w = match problem.cfg.model {
            Model::Biharmonic => {
                let (t1, t2) = tau_unchecked(z, lambda);
                let u2 = s_unchecked(z, lambda)? * gp;
                let c1 = t2 * u2 / (t1 + t2);
                let c2 = t1 * u2 / (t1 + t2);
                let one_shot = t2 * gp / ((t1 + t2) * (lambda + z * z) + 2.0 * t1 * t2);
                path_defect = path_defect.max(relative(c1, one_shot, 0.0));
                u2_hat[b] = u2;
                let mut w = ExpPoly::exp(c1, Complex64::i() * t1);
                w.push(c2, 0, Complex64::i() * t2);
                w
            }
            Model::Heat => {
                let t = tau_heat(z, lambda);
                let u2 = s_heat_unchecked(z, lambda)? * gp;
                let one_shot = lambda.inv() * super::symbols::m_heat_unchecked(z, lambda)? * gp;
                path_defect = path_defect.max(relative(u2, one_shot, 0.0));
                u2_hat[b] = u2;
                ExpPoly::exp(u2, Complex64::i() * t)
            }
        };
        if u2_hat[b] != ZERO {
            let mut rhs = vec![ZERO; m];
            rhs[0] = u2_hat[b];
            let generic = solve_mode(&problem.interior, &kt, lambda, &rhs)?.homogeneous();
            let decay = w.terms.iter().map(|t| t.zeta.im).fold(f64::INFINITY, f64::min);
            for x in [0.0, 1.0 / decay] {
                generic_defect = generic_defect.max(relative(w.eval(x), generic.eval(x), u2_hat[b].norm()));
            }
        }
        correction.modes[b] = w;
    }
    let u1 = u1_zero.add(&correction)?;
    Ok(ChSolution {
        state: ChState {
            u1,
            u2: BoundaryField::from_coefficients(grid, u2_hat)?,
        },
        u1_zero,
        g_prime,
        path_defect,
        generic_defect,
    })
}

/// Resolvent with sampled interior data, evenly reflected in `x_n`.
pub fn solve_resolvent(
    problem: &ChProblem,
    f: &HalfSpaceField,
    g: &BoundaryField,
    lambda: Complex64,
) -> Result<ChSolution> {
    solve_resolvent_modal(problem, &f.even_reflection()?, g, lambda)
}

/// Absolute residual norms of the four rows of the resolvent system:
/// interior equation, dynamic boundary row, `∂_νΔu₁ = 0` (biharmonic only)
/// and `γ₀u₁ - u₂ = 0`.
#[derive(Clone, Debug, Serialize)]
pub struct ChResiduals {
    pub interior: f64,
    pub dynamic: f64,
    pub neumann: Option<f64>,
    pub compatibility: f64,
    pub data_scale: f64,
}

impl ChResiduals {
    pub fn max_relative(&self) -> f64 {
        [self.interior, self.dynamic, self.neumann.unwrap_or(0.0), self.compatibility]
            .into_iter()
            .fold(0.0, f64::max)
            / self.data_scale
    }
}

/// Residuals of `(λ - A)u = (f, g)` with the domain conditions, in closed form.
pub fn ch_residuals(
    problem: &ChProblem,
    state: &ChState,
    f: &ModalField,
    g: &BoundaryField,
    lambda: Complex64,
) -> Result<ChResiduals> {
    let grid = problem.grid();
    let (fu, _) = forward(&problem.interior, &state.u1, lambda)?;
    let interior = fu.sub(f)?.l2_norm()?;
    let u2 = state.u2.coefficients();
    let dn = problem.normal_derivative_coeffs(&state.u1);
    let g_hat = g.coefficients();
    let dynamic: Vec<Complex64> = (0..grid.len())
        .map(|b| {
            let z2: f64 = grid.wavevector(b).iter().map(|k| k * k).sum();
            let tangential = match problem.cfg.model {
                Model::Biharmonic => lambda + z2,
                Model::Heat => lambda,
            };
            dn[b] + tangential * u2[b] - g_hat[b]
        })
        .collect();
    let neumann = match problem.cfg.model {
        Model::Biharmonic => Some(boundary_l2(&grid, &problem.normal_laplacian_coeffs(&state.u1))),
        Model::Heat => None,
    };
    let compatibility = boundary_l2(&grid, &diff(&state.u1.coefficients_at(0.0), &u2));
    let scale = f.l2_norm()? + g.lp_norm(2.0);
    Ok(ChResiduals {
        interior,
        dynamic: boundary_l2(&grid, &dynamic),
        neumann,
        compatibility,
        data_scale: if scale > 0.0 { scale } else { 1.0 },
    })
}

/// One row of a resolvent-decay sweep.
#[derive(Clone, Debug, Serialize)]
pub struct ChSweepRow {
    pub arg_lambda: f64,
    pub abs_lambda: f64,
    /// `|λ| ‖(u₁, u₂)‖_X / ‖(f, g)‖_X`
    pub ratio_full: f64,
    /// `|λ| ‖u₂‖ / ‖g'‖`
    pub ratio_u2: f64,
    pub residual: f64,
    pub path_defect: f64,
}

pub fn resolvent_decay_sweep(
    problem: &ChProblem,
    rays: &[f64],
    magnitudes: &[f64],
    f: &ModalField,
    g: &BoundaryField,
) -> Result<Vec<ChSweepRow>> {
    if let Some(r) = rays.iter().find(|r| r.abs() >= problem.cfg.theta) {
        return Err(Error::Domain(format!("ray {r} outside (-θ, θ)")));
    }
    if let Some(m) = magnitudes.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
        return Err(Error::Parameter(format!("magnitude {m} must be positive")));
    }
    let data = f.l2_norm()?.hypot(g.lp_norm(2.0));
    let mut rows = Vec::with_capacity(rays.len() * magnitudes.len());
    for &arg in rays {
        for &mag in magnitudes {
            let lambda = Complex64::from_polar(mag, arg);
            let sol = solve_resolvent_modal(problem, f, g, lambda)?;
            let res = ch_residuals(problem, &sol.state, f, g, lambda)?;
            let gp = sol.g_prime_norm();
            let u2 = sol.state.u2.lp_norm(2.0);
            rows.push(ChSweepRow {
                arg_lambda: arg,
                abs_lambda: mag,
                ratio_full: if data > 0.0 { mag * sol.state.x_norm()? / data } else { 0.0 },
                ratio_u2: if gp > 0.0 { mag * u2 / gp } else { 0.0 },
                residual: res.max_relative(),
                path_defect: sol.path_defect,
            });
        }
    }
    Ok(rows)
}

/// Domain-regularity measurements at one `λ`.
#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    #[serde(serialize_with = "ser_complex")]
    pub lambda: Complex64,
    /// `‖u₂‖_{H²} / ‖(f, g)‖_X`
    pub u2_h2_ratio: f64,
    /// `‖u₁‖_{H^{4,-3/2}} / ‖(f, g)‖_X`, the `p = 2` surrogate for `H^{2+1/2}`.
    pub u1_ratio: f64,
    /// `‖u₁‖_{H^{4,-4}}`
    pub u1_h4m4: f64,
    /// Largest `⟨k'⟩²|S| / ((1 + |λ|/|λ+|k'|²|)|m|) - 1` over the grid modes.
    pub bound_excess: f64,
    pub bound_violations: usize,
    /// Same with `|1 - λ|` in place of `|λ|`, which follows from `1 + |k'|² = (λ + |k'|²) + (1 - λ)`.
    pub exact_bound_excess: f64,
    pub finite: bool,
}

pub fn check_domain_regularity(
    problem: &ChProblem,
    f: &ModalField,
    g: &BoundaryField,
    lambda: Complex64,
) -> Result<RegularityReport> {
    if problem.cfg.model != Model::Biharmonic {
        return Err(Error::Parameter("regularity check concerns the biharmonic model".into()));
    }
    let grid = problem.grid();
    let sol = solve_resolvent_modal(problem, f, g, lambda)?;
    let data = f.l2_norm()?.hypot(g.lp_norm(2.0));
    let u2 = sol.state.u2.coefficients();
    let mut h2 = Vec::with_capacity(grid.len());
    let mut bound_excess = f64::NEG_INFINITY;
    let mut exact_bound_excess = f64::NEG_INFINITY;
    let mut bound_violations = 0;
    for (b, c) in u2.iter().enumerate() {
        let z2: f64 = grid.wavevector(b).iter().map(|k| k * k).sum();
        h2.push(c * (1.0 + z2));
        let z = Complex64::new(z2.sqrt(), 0.0);
        let s = s_unchecked(z, lambda)?;
        let m = (lambda + z2) * s;
        let lhs = (1.0 + z2) * s.norm();
        let rhs = (1.0 + lambda.norm() / (lambda + z2).norm()) * m.norm();
        let exact = (1.0 + (1.0 - lambda).norm() / (lambda + z2).norm()) * m.norm();
        let excess = lhs / rhs - 1.0;
        bound_excess = bound_excess.max(excess);
        exact_bound_excess = exact_bound_excess.max(lhs / exact - 1.0);
        if excess > 1e-12 {
            bound_violations += 1;
        }
    }
    let scale = if data > 0.0 { data } else { 1.0 };
    let u2_h2_ratio = boundary_l2(&grid, &h2) / scale;
    let u1_ratio = sol.state.u1.mixed_norm(4, -1.5, ZERO, 2)? / scale;
    let u1_h4m4 = sol.state.u1.mixed_norm(4, -4.0, ZERO, 2)?;
    Ok(RegularityReport {
        lambda,
        u2_h2_ratio,
        u1_ratio,
        u1_h4m4,
        bound_excess,
        bound_violations,
        exact_bound_excess,
        finite: u2_h2_ratio.is_finite() && u1_ratio.is_finite() && u1_h4m4.is_finite(),
    })
}

/// Smallest `|λ|` on the ray `arg λ = φ` for which
/// `1 + |k'|² ≤ |λ + |k'|²| + |λ|` holds at every real `k'`.
pub fn regularity_bound_threshold(arg_lambda: f64) -> f64 {
    1.0 / (1.0 + arg_lambda.cos())
}

//! Exact per-mode solver for constant-coefficient model problems
//! `(λ - A₀(D)) u = f` in `x_n > 0`, `B₀ⱼ(D) u = gⱼ` at `x_n = 0`.
//!
//! In `x'` the fields are trigonometric polynomials; in `x_n` every mode is an
//! exponential polynomial, so the interior equation and the boundary
//! conditions hold exactly up to rounding.

mod exppoly;
mod field;
mod residual;

pub use exppoly::{moment, particular, particular_term, taylor_shift, Depth, ExpPoly, ExpTerm};
pub use field::{boundary_l2, uniform_half_grid, HalfSpaceField, ModalField, Representation};
pub use residual::{fornberg_weights, residual_check, residual_check_sampled, ResidualReport};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::ellipticity::{
    check_shapiro_lopatinskii, stable_roots, LopatinskiiReport, QuasiSphereSampling, Sector,
    StableRootSet, DEFAULT_CLUSTER_TOL,
};
use crate::error::{Error, Result};
use crate::sobolev::{besov_norm, BoundaryField, NormSpec, TorusGrid};
use crate::symbols::{BoundarySymbol, DifferentialSymbol};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const SINGULAR_RATIO: f64 = 1e-12;

/// Half-space model problem with principal-part operators.
#[derive(Clone, Debug)]
pub struct ModelProblem {
    pub interior: DifferentialSymbol,
    pub boundary: Vec<BoundarySymbol>,
    pub sector: Sector,
    pub boundary_grid: TorusGrid,
    pub xn_samples: Vec<f64>,
    /// Construction-time Shapiro–Lopatinskii report; `None` when the check was waived.
    pub lopatinskii: Option<LopatinskiiReport>,
}

impl ModelProblem {
    /// Validates shapes and runs the Shapiro–Lopatinskii check on a coarse sphere sampling.
    pub fn new(
        interior: DifferentialSymbol,
        boundary: Vec<BoundarySymbol>,
        sector: Sector,
        boundary_grid: TorusGrid,
        xn_samples: Vec<f64>,
    ) -> Result<Self> {
        let mut p = ModelProblem::new_unchecked(interior, boundary, sector, boundary_grid, xn_samples)?;
        let sampling = QuasiSphereSampling::new(
            p.interior.dim() - 1,
            p.m() as u32,
            &p.sector,
            8,
            33,
            17,
        )?;
        let report = check_shapiro_lopatinskii(&p.interior, &p.boundary, &p.sector, &sampling, 1e-8)?;
        if !report.pass {
            return Err(Error::LopatinskiiViolation {
                mode: report.witness.xi.clone(),
                det: report.det_min,
            });
        }
        p.lopatinskii = Some(report);
        Ok(p)
    }

    /// Shape validation only; the Shapiro–Lopatinskii check is waived.
    pub fn new_unchecked(
        interior: DifferentialSymbol,
        boundary: Vec<BoundarySymbol>,
        sector: Sector,
        boundary_grid: TorusGrid,
        xn_samples: Vec<f64>,
    ) -> Result<Self> {
        let m = interior.half_order() as usize;
        if boundary.len() != m {
            return Err(Error::Parameter(format!(
                "{} boundary operators for an operator of order {}",
                boundary.len(),
                interior.order()
            )));
        }
        if boundary.iter().any(|b| b.dim() != interior.dim()) {
            return Err(Error::Parameter("boundary operators of the wrong dimension".into()));
        }
        if boundary.iter().any(|b| b.order() >= interior.order()) {
            return Err(Error::Parameter("boundary operator order must be below 2m".into()));
        }
        if boundary_grid.n + 1 != interior.dim() {
            return Err(Error::GridMismatch(format!(
                "boundary grid of dimension {} for an operator in {} variables",
                boundary_grid.n,
                interior.dim()
            )));
        }
        field::validate_xn(&xn_samples)?;
        Ok(ModelProblem {
            interior,
            boundary,
            sector,
            boundary_grid,
            xn_samples,
            lopatinskii: None,
        })
    }

    pub fn m(&self) -> usize {
        self.interior.half_order() as usize
    }

    fn interior_polynomial(&self, kt: &[f64], lambda: Complex64) -> Result<Vec<Complex64>> {
        self.interior.lambda_minus_polynomial(kt, lambda)
    }
}

/// Stable roots, exponential-basis coefficients and samples of the homogeneous
/// solution at one boundary wavevector.
#[derive(Clone, Debug, Serialize)]
pub struct ModeSolution {
    pub wavevector: Vec<f64>,
    pub roots: StableRootSet,
    /// Ordered by root, then by power `l` of `x_n^l e^{iζx_n}`.
    #[serde(skip)]
    pub coefficients: Vec<Complex64>,
    /// Frobenius condition number of the boundary system.
    pub condition: f64,
    #[serde(skip)]
    pub values: Vec<Complex64>,
}

impl ModeSolution {
    pub fn homogeneous(&self) -> ExpPoly {
        let mut w = ExpPoly::new();
        let mut k = 0;
        for &(z, mu) in &self.roots.roots {
            for l in 0..mu {
                w.push(self.coefficients[k], l as u32, z);
                k += 1;
            }
        }
        w.simplify();
        w
    }
}

/// Confluent boundary matrix: column `(k, l)` is `B₀ⱼ(D)(x^l e^{iζ_k x})` at 0.
pub fn boundary_matrix(roots: &StableRootSet, boundary: &[BoundarySymbol], kt: &[f64]) -> DMatrix<Complex64> {
    let polys: Vec<Vec<Complex64>> = boundary.iter().map(|b| b.xi_n_polynomial(kt)).collect();
    let mut cols = Vec::new();
    for &(z, mu) in &roots.roots {
        for l in 0..mu {
            let mut basis = ExpPoly::new();
            basis.push(Complex64::new(1.0, 0.0), l as u32, z);
            cols.push(basis);
        }
    }
    DMatrix::from_fn(polys.len(), cols.len(), |j, c| cols[c].boundary_value(&polys[j]))
}

/// `|det M| / Π_j ‖row_j‖`, in `[0, 1]`.
fn hadamard_ratio(mat: &DMatrix<Complex64>) -> f64 {
    let rows: f64 = (0..mat.nrows())
        .map(|j| mat.row(j).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .product();
    if rows == 0.0 {
        0.0
    } else {
        mat.determinant().norm() / rows
    }
}

/// Solves the boundary system at one mode for the homogeneous exponential solution.
pub fn solve_mode(
    problem: &ModelProblem,
    kt: &[f64],
    lambda: Complex64,
    rhs: &[Complex64],
) -> Result<ModeSolution> {
    let m = problem.m();
    let roots = stable_roots(&problem.interior, kt, lambda, DEFAULT_CLUSTER_TOL)?;
    if roots.count_with_multiplicity != m {
        return Err(Error::RootCount {
            found: roots.count_with_multiplicity,
            expected: m,
        });
    }
    let mat = boundary_matrix(&roots, &problem.boundary, kt);
    let ratio = hadamard_ratio(&mat);
    if !(ratio > SINGULAR_RATIO) {
        return Err(Error::LopatinskiiViolation {
            mode: kt.to_vec(),
            det: ratio,
        });
    }
    let lu = mat.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::LopatinskiiViolation {
            mode: kt.to_vec(),
            det: 0.0,
        })?;
    let condition = mat.norm() * inv.norm();
    let c = &inv * DVector::from_column_slice(rhs);
    let mut sol = ModeSolution {
        wavevector: kt.to_vec(),
        roots,
        coefficients: c.iter().copied().collect(),
        condition,
        values: Vec::new(),
    };
    let w = sol.homogeneous();
    sol.values = problem.xn_samples.iter().map(|&x| w.eval(x)).collect();
    Ok(sol)
}

/// Solution of the model problem with its per-mode homogeneous parts.
#[derive(Clone, Debug)]
pub struct HalfSpaceSolution {
    pub field: ModalField,
    pub modes: Vec<ModeSolution>,
    pub xn: Vec<f64>,
}

impl HalfSpaceSolution {
    pub fn sampled(&self) -> Result<HalfSpaceField> {
        self.field.sample(&self.xn)
    }

    pub fn max_condition(&self) -> f64 {
        self.modes.iter().map(|m| m.condition).fold(0.0, f64::max)
    }
}

fn check_boundary_data(problem: &ModelProblem, g: &[BoundaryField]) -> Result<Vec<Vec<Complex64>>> {
    if g.len() != problem.m() {
        return Err(Error::Parameter(format!(
            "{} boundary data fields for m = {}",
            g.len(),
            problem.m()
        )));
    }
    g.iter()
        .map(|gj| {
            if gj.grid != problem.boundary_grid {
                Err(Error::GridMismatch("boundary data on a different grid".into()))
            } else {
                Ok(gj.coefficients())
            }
        })
        .collect()
}

fn check_sector(problem: &ModelProblem, lambda: Complex64) -> Result<()> {
    if !problem.sector.contains(lambda) {
        return Err(Error::Domain(format!("λ = {lambda} outside the sector")));
    }
    Ok(())
}

/// Solves with exact interior data `f` and boundary coefficients `ĝⱼ(k')`.
pub fn solve_modal_coefficients(
    problem: &ModelProblem,
    f: Option<&ModalField>,
    g_hat: &[Vec<Complex64>],
    lambda: Complex64,
) -> Result<HalfSpaceSolution> {
    check_sector(problem, lambda)?;
    let grid = problem.boundary_grid;
    if let Some(f) = f {
        if f.grid != grid {
            return Err(Error::GridMismatch("interior data on a different boundary grid".into()));
        }
    }
    let b_polys = |kt: &[f64]| -> Vec<Vec<Complex64>> {
        problem.boundary.iter().map(|b| b.xi_n_polynomial(kt)).collect()
    };
    let mut modes = Vec::with_capacity(grid.len());
    let mut fields = Vec::with_capacity(grid.len());
    for b in 0..grid.len() {
        let kt = grid.wavevector(b);
        let p = problem.interior_polynomial(&kt, lambda)?;
        let up = match f {
            Some(f) if !f.modes[b].is_empty() => {
                for t in &f.modes[b].terms {
                    if t.zeta.im == 0.0 {
                        let mut k = kt.clone();
                        k.push(t.zeta.re);
                        if crate::ellipticity::ellipticity_ratio(&problem.interior, &k, lambda) < 1e-13 {
                            return Err(Error::EllipticityViolation(k));
                        }
                    }
                }
                particular(&p, &f.modes[b])?
            }
            _ => ExpPoly::new(),
        };
        let polys = b_polys(&kt);
        let rhs: Vec<Complex64> = polys
            .iter()
            .enumerate()
            .map(|(j, bp)| g_hat[j][b] - up.boundary_value(bp))
            .collect();
        let lambda_zero_mode = lambda == ZERO && kt.iter().all(|&x| x == 0.0);
        if lambda_zero_mode && rhs.iter().all(|&r| r == ZERO) {
            fields.push(up);
            continue;
        }
        let mode = solve_mode(problem, &kt, lambda, &rhs)?;
        fields.push(up.add(&mode.homogeneous()));
        modes.push(mode);
    }
    let depth = f.map(|f| f.depth).unwrap_or(Depth::Infinite);
    Ok(HalfSpaceSolution {
        field: ModalField {
            grid,
            modes: fields,
            depth,
        },
        modes,
        xn: problem.xn_samples.clone(),
    })
}

/// Poisson operator: `f = 0`.
pub fn solve_poisson(problem: &ModelProblem, g: &[BoundaryField], lambda: Complex64) -> Result<HalfSpaceSolution> {
    let g_hat = check_boundary_data(problem, g)?;
    solve_modal_coefficients(problem, None, &g_hat, lambda)
}

/// Full problem with analytic interior data.
pub fn solve_modal(
    problem: &ModelProblem,
    f: &ModalField,
    g: &[BoundaryField],
    lambda: Complex64,
) -> Result<HalfSpaceSolution> {
    let g_hat = check_boundary_data(problem, g)?;
    solve_modal_coefficients(problem, Some(f), &g_hat, lambda)
}

/// Full problem with sampled interior data: even reflection in `x_n`, whole-space
/// inverse per Fourier term, then boundary correction.
pub fn solve_full(
    problem: &ModelProblem,
    f: &HalfSpaceField,
    g: &[BoundaryField],
    lambda: Complex64,
) -> Result<HalfSpaceSolution> {
    if f.grid != problem.boundary_grid {
        return Err(Error::GridMismatch("interior data on a different boundary grid".into()));
    }
    let modal = f.even_reflection()?;
    solve_modal(problem, &modal, g, lambda)
}

/// Forward operators `(λ - A₀)u` and `B₀ⱼ u` of an exact field.
pub fn forward(
    problem: &ModelProblem,
    u: &ModalField,
    lambda: Complex64,
) -> Result<(ModalField, Vec<BoundaryField>)> {
    let mut f = u.clone();
    for (b, w) in u.modes.iter().enumerate() {
        let p = problem.interior_polynomial(&u.grid.wavevector(b), lambda)?;
        f.modes[b] = w.apply(&p);
    }
    let g = problem
        .boundary
        .iter()
        .map(|bj| BoundaryField::from_coefficients(u.grid, u.boundary_values(|kt| bj.xi_n_polynomial(kt))))
        .collect::<Result<Vec<_>>>()?;
    Ok((f, g))
}

/// One row of an a-priori sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub arg_lambda: f64,
    pub abs_lambda: f64,
    pub ratio: f64,
    pub interior_residual: f64,
    pub boundary_residual: f64,
    pub condition: f64,
}

/// `‖u‖_{H^{s+σ}_{2,λ}} / (‖f‖_{H^{s-2m}_{2,λ}} + Σⱼ ‖gⱼ‖_{B^{s+σ-mⱼ-1/2}_{22,λ}})` along rays.
///
/// Residuals are relative to `‖f‖_{L²} + Σ ‖gⱼ‖_{L²}`.
pub fn apriori_sweep(
    problem: &ModelProblem,
    spec: &NormSpec,
    rays: &[f64],
    magnitudes: &[f64],
    f: &HalfSpaceField,
    g: &[BoundaryField],
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let m = problem.m() as u32;
    if spec.sigma > 0.0 {
        return Err(Error::Parameter("a-priori sweep needs σ ≤ 0".into()));
    }
    let max_mj = problem.boundary.iter().map(|b| b.order()).max().unwrap_or(0) as f64;
    if spec.s <= max_mj + 0.5 {
        return Err(Error::Parameter(format!(
            "a-priori sweep needs s > max mⱼ + 1/2 = {}",
            max_mj + 0.5
        )));
    }
    let modal = f.even_reflection()?;
    let mut rows = Vec::new();
    for &arg in rays {
        for &mag in magnitudes {
            let lambda = Complex64::from_polar(mag, arg);
            let sol = solve_modal(problem, &modal, g, lambda)?;
            let u_norm = sol.field.sobolev_norm(spec.s + spec.sigma, lambda, m)?;
            let mut data = modal.sobolev_norm(spec.s - 2.0 * f64::from(m), lambda, m)?;
            for (gj, bj) in g.iter().zip(&problem.boundary) {
                data += besov_norm(gj, spec.s + spec.sigma - f64::from(bj.order()) - 0.5, 2.0, lambda, m)?;
            }
            let res = residual_check(problem, &sol.field, &modal, g, lambda)?;
            rows.push(SweepRow {
                arg_lambda: arg,
                abs_lambda: mag,
                ratio: u_norm / data,
                interior_residual: res.interior / res.data_scale,
                boundary_residual: res.boundary.iter().fold(0.0, |a: f64, &b| a.max(b)) / res.data_scale,
                condition: sol.max_condition(),
            });
        }
    }
    Ok(rows)
}

use num_complex::Complex64;
use serde::Serialize;

use super::field::{boundary_l2, trapezoid_weight, HalfSpaceField, ModalField};
use super::{forward, ModelProblem};
use crate::error::{Error, Result};
use crate::sobolev::BoundaryField;

/// Absolute residual norms of `(λ - A₀)u = f`, `B₀ⱼu = gⱼ`, with the data scale
/// `‖f‖_{L²} + Σⱼ ‖gⱼ‖_{L²}` (or 1 when the data vanish).
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub interior: f64,
    pub boundary: Vec<f64>,
    pub data_scale: f64,
}

impl ResidualReport {
    pub fn max_relative(&self) -> f64 {
        self.boundary.iter().fold(self.interior, |a, &b| a.max(b)) / self.data_scale
    }
}

fn data_scale(f_norm: f64, g: &[BoundaryField]) -> f64 {
    let s = f_norm + g.iter().map(|gj| gj.lp_norm(2.0)).sum::<f64>();
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Residuals of an exact field, with closed-form strip integrals.
pub fn residual_check(
    problem: &ModelProblem,
    u: &ModalField,
    f: &ModalField,
    g: &[BoundaryField],
    lambda: Complex64,
) -> Result<ResidualReport> {
    if g.len() != problem.m() {
        return Err(Error::Parameter("boundary data count differs from m".into()));
    }
    let (fu, gu) = forward(problem, u, lambda)?;
    let interior = fu.sub(f)?.l2_norm()?;
    let boundary = gu
        .iter()
        .zip(g)
        .map(|(a, b)| a.sub(b).map(|d| d.lp_norm(2.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport {
        interior,
        boundary,
        data_scale: data_scale(f.l2_norm()?, g),
    })
}

/// Finite-difference weights for derivatives `0..=order` at `z` on the nodes `x`
/// (Fornberg's recursion); entry `[k][j]` multiplies the value at `x[j]`.
pub fn fornberg_weights(z: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

fn window(len: usize, centre: usize, width: usize) -> std::ops::Range<usize> {
    let width = width.min(len);
    let start = centre.saturating_sub(width / 2).min(len - width);
    start..start + width
}

/// `D_n^r` of spectral samples at `x_n[i]`, for `r = 0..=order`.
fn normal_derivatives(u: &HalfSpaceField, i: usize, order: usize) -> Vec<Vec<Complex64>> {
    let nb = u.grid.len();
    let range = window(u.xn.len(), i, order + 5);
    let w = fornberg_weights(u.xn[i], &u.xn[range.clone()], order);
    let mut out = vec![vec![Complex64::new(0.0, 0.0); nb]; order + 1];
    let mut minus_i_pow = Complex64::new(1.0, 0.0);
    for (r, row) in out.iter_mut().enumerate() {
        for (jj, j) in range.clone().enumerate() {
            let wt = w[r][jj] * minus_i_pow;
            for b in 0..nb {
                row[b] += wt * u.values[j * nb + b];
            }
        }
        minus_i_pow *= Complex64::new(0.0, -1.0);
    }
    out
}

/// Residuals of sampled fields: spectral in `x'`, finite differences of order
/// at least four in `x_n` on the sample points, trapezoid rule for the strip norm.
pub fn residual_check_sampled(
    problem: &ModelProblem,
    u: &HalfSpaceField,
    f: &HalfSpaceField,
    g: &[BoundaryField],
    lambda: Complex64,
) -> Result<ResidualReport> {
    if u.grid != f.grid || u.xn != f.xn || u.grid != problem.boundary_grid {
        return Err(Error::GridMismatch("fields on different grids".into()));
    }
    if g.len() != problem.m() {
        return Err(Error::Parameter("boundary data count differs from m".into()));
    }
    let order = problem.interior.order() as usize;
    if u.xn.len() < order + 5 {
        return Err(Error::Parameter(format!(
            "finite differences need at least {} x_n samples",
            order + 5
        )));
    }
    let us = u.to_spectral();
    let fs = f.to_spectral();
    let nb = u.grid.len();
    let polys: Vec<Vec<Complex64>> = (0..nb)
        .map(|b| problem.interior.lambda_minus_polynomial(&u.grid.wavevector(b), lambda))
        .collect::<Result<_>>()?;
    let mut total = 0.0;
    for i in 0..u.xn.len() {
        let d = normal_derivatives(&us, i, order);
        let tw = trapezoid_weight(&u.xn, i);
        for b in 0..nb {
            let lhs: Complex64 = polys[b].iter().enumerate().map(|(r, c)| c * d[r][b]).sum();
            total += tw * (lhs - fs.values[i * nb + b]).norm_sqr();
        }
    }
    let interior = (total * u.grid.length.powi(u.grid.n as i32)).sqrt();
    let bmax = problem.boundary.iter().map(|b| b.order()).max().unwrap_or(0) as usize;
    let d0 = normal_derivatives(&us, 0, bmax);
    let mut boundary = Vec::with_capacity(g.len());
    for (bj, gj) in problem.boundary.iter().zip(g) {
        let gh = gj.coefficients();
        let res: Vec<Complex64> = (0..nb)
            .map(|b| {
                let p = bj.xi_n_polynomial(&u.grid.wavevector(b));
                let v: Complex64 = p.iter().enumerate().map(|(r, c)| c * d0[r][b]).sum();
                v - gh[b]
            })
            .collect();
        boundary.push(boundary_l2(&u.grid, &res));
    }
    Ok(ResidualReport {
        interior,
        boundary,
        data_scale: data_scale(f.l2_norm(), g),
    })
}

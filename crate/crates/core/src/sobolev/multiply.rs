use super::{mixed_norm, GridField, NormSpec};
use crate::error::{Error, Result};

/// Samples of a smooth multiplier `a` with its `BUC^r` data.
#[derive(Clone, Debug)]
pub struct MultiplierFunction {
    pub samples: GridField,
    pub r: u32,
    pub sup_norm: f64,
    /// `seminorms[k-1] = Σ_{|α| = k} ‖∂^α a‖_∞` for `k = 1..=r`.
    pub seminorms: Vec<f64>,
}

fn multi_indices(n: usize, order: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![order]];
    }
    let mut out = Vec::new();
    for first in 0..=order {
        for mut rest in multi_indices(n - 1, order - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl MultiplierFunction {
    pub fn new(samples: GridField, r: u32) -> Result<Self> {
        let sup_norm = samples.sup_norm();
        let mut seminorms = Vec::with_capacity(r as usize);
        for k in 1..=r {
            let mut total = 0.0;
            for alpha in multi_indices(samples.grid.n, k) {
                total += samples.derivative(&alpha)?.sup_norm();
            }
            seminorms.push(total);
        }
        Ok(MultiplierFunction {
            samples,
            r,
            sup_norm,
            seminorms,
        })
    }

    /// `r(s, σ) = ⌊max(|s|, |σ|, |s+σ|)⌋ + 1`
    pub fn smoothness_budget(s: f64, sigma: f64) -> u32 {
        s.abs().max(sigma.abs()).max((s + sigma).abs()).floor() as u32 + 1
    }

    /// `‖a‖_{BUC^r} = ‖a‖_∞ + Σ_k seminorm_k`
    pub fn buc_norm(&self) -> f64 {
        self.sup_norm + self.seminorms.iter().sum::<f64>()
    }
}

/// Pointwise product `a · u`.
pub fn apply_multiplication(u: &GridField, a: &MultiplierFunction) -> Result<GridField> {
    if u.grid != a.samples.grid {
        return Err(Error::GridMismatch("multiplier and field grids differ".into()));
    }
    Ok(GridField {
        grid: u.grid,
        values: u
            .values
            .iter()
            .zip(&a.samples.values)
            .map(|(x, y)| x * y)
            .collect(),
    })
}

/// Lower estimate of `‖M_a‖` in the given norm: the largest ratio
/// `‖a u‖ / ‖u‖` over a probe set.
pub fn operator_norm_estimate(a: &MultiplierFunction, spec: &NormSpec, probes: &[GridField]) -> Result<f64> {
    let mut best = 0.0f64;
    for u in probes {
        let d = mixed_norm(u, spec);
        if d == 0.0 {
            continue;
        }
        best = best.max(mixed_norm(&apply_multiplication(u, a)?, spec) / d);
    }
    Ok(best)
}

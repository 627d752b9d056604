use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::symbols::{m_denominator_margin, m_heat_unchecked, m_unchecked, tau_heat, tau_unchecked, ChConfig, Model};
use crate::error::{Error, Result};
use crate::io::ser_complex;

const BOUNDARY_TOL: f64 = 1e-12;
const ARG_TOL: f64 = 1e-9;

/// One `(z, λ)` sample with the quasi-sphere scale it was drawn at.
#[derive(Clone, Copy, Debug)]
pub struct SweepPoint {
    pub z: Complex64,
    pub lambda: Complex64,
    pub scale: f64,
}

/// Samples of `Σ̄_ε × Σ̄_θ` on `|z| + |λ|^{1/q} = ρ`.
///
/// `q = 4` for the biharmonic symbols; the heat symbols are not quasi-homogeneous,
/// so their sweep repeats the sphere `q = 2` at several radii `ρ`.
#[derive(Clone, Debug)]
pub struct ChSweep {
    pub cfg: ChConfig,
    pub n_arg: usize,
    pub n_radial: usize,
    pub n_z: usize,
    pub scales: Vec<f64>,
    pub keep_records: bool,
}

impl ChSweep {
    pub fn new(cfg: ChConfig, n_arg: usize, n_radial: usize, n_z: usize) -> Result<Self> {
        cfg.validate()?;
        if n_arg < 2 || n_radial < 2 || n_z < 2 {
            return Err(Error::EmptySampling);
        }
        let scales = match cfg.model {
            Model::Biharmonic => vec![1.0],
            Model::Heat => vec![1e-2, 1e-1, 1.0, 1e1, 1e2],
        };
        Ok(ChSweep {
            cfg,
            n_arg,
            n_radial,
            n_z,
            scales,
            keep_records: false,
        })
    }

    /// 181 λ-arguments × 65 radii × 64 z-arguments.
    pub fn default_for(cfg: ChConfig) -> Result<Self> {
        ChSweep::new(cfg, 181, 65, 64)
    }

    fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
    }

    /// Visits every sample; points with `z = 0` or `λ = 0` are visited once.
    pub fn for_each(&self, mut visit: impl FnMut(SweepPoint)) {
        let q = self.cfg.lambda_exponent();
        for &rho in &self.scales {
            for t in Self::linspace(0.0, 1.0, self.n_radial) {
                let rz = rho * (1.0 - t);
                let rl = (rho * t).powi(q);
                let l_args: Vec<f64> = if rl == 0.0 {
                    vec![0.0]
                } else {
                    Self::linspace(-self.cfg.theta, self.cfg.theta, self.n_arg).collect()
                };
                let z_args: Vec<f64> = if rz == 0.0 {
                    vec![0.0]
                } else {
                    Self::linspace(-self.cfg.eps, self.cfg.eps, self.n_z).collect()
                };
                for &al in &l_args {
                    for &az in &z_args {
                        visit(SweepPoint {
                            z: Complex64::from_polar(rz, az),
                            lambda: Complex64::from_polar(rl, al),
                            scale: rho,
                        });
                    }
                }
            }
        }
    }

    /// `| |z| + |λ|^{1/q} - ρ |` over all samples.
    pub fn normalization_residual(&self) -> f64 {
        let q = f64::from(self.cfg.lambda_exponent());
        let mut worst: f64 = 0.0;
        self.for_each(|p| {
            let r = p.z.norm() + p.lambda.norm().powf(1.0 / q) - p.scale;
            worst = worst.max(r.abs() / p.scale);
        });
        worst
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "ser_complex")]
    pub z: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub lambda: Complex64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleRecord {
    #[serde(serialize_with = "ser_complex")]
    pub z: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub lambda: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub tau1: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub tau2: Complex64,
    pub arg_value: f64,
    pub m_abs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolSweepReport {
    pub check: String,
    pub model: Model,
    pub samples: usize,
    pub min: Witness,
    pub max: Witness,
    /// `min |τ₁+τ₂|` for root bounds, `min |1 + 2τ₁τ₂/((λ+z²)(τ₁+τ₂))|` for `m`.
    pub secondary: Option<Witness>,
    pub threshold: f64,
    pub secondary_threshold: Option<f64>,
    pub violations: usize,
    pub boundary_samples: usize,
    pub boundary_violations: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<SampleRecord>,
}

struct Extrema {
    min: Witness,
    max: Witness,
}

impl Extrema {
    fn new() -> Self {
        let w = |v| Witness {
            z: Complex64::new(f64::NAN, f64::NAN),
            lambda: Complex64::new(f64::NAN, f64::NAN),
            value: v,
        };
        Extrema {
            min: w(f64::INFINITY),
            max: w(f64::NEG_INFINITY),
        }
    }

    fn push(&mut self, z: Complex64, lambda: Complex64, value: f64) {
        if value < self.min.value || value.is_nan() {
            self.min = Witness { z, lambda, value };
        }
        if value > self.max.value || value.is_nan() {
            self.max = Witness { z, lambda, value };
        }
    }
}

/// Closed-form sector bounds used as pass thresholds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepThresholds {
    /// Lower bound of `|τⱼ|` on the unit quasi-sphere.
    pub root_min: f64,
    /// Lower bound of `|τ₁+τ₂|`.
    pub root_sum_min: f64,
    /// Upper bound of `|m|`.
    pub m_ceiling: f64,
    pub heat_ceiling: f64,
}

impl SweepThresholds {
    /// From `|a + b| ≥ cos(δ/2)(|a| + |b|)` for vectors at angle at most `δ < π`.
    pub fn for_config(cfg: &ChConfig) -> Self {
        let delta = match cfg.model {
            Model::Biharmonic => PI / 2.0 + cfg.theta / 2.0 + 2.0 * cfg.eps,
            Model::Heat => cfg.theta + 2.0 * cfg.eps,
        };
        let root_min = (0.5 * (delta / 2.0).cos()).sqrt();
        let half_angle = match cfg.model {
            Model::Biharmonic => (cfg.theta + PI) / 4.0,
            Model::Heat => (cfg.theta + 2.0 * cfg.eps) / 2.0,
        };
        let phi = (cfg.theta + cfg.eps).max(7.0 * PI / 8.0);
        SweepThresholds {
            root_min,
            root_sum_min: 2.0 * half_angle.cos() * root_min,
            m_ceiling: 1.0 / (PI - phi).sin(),
            heat_ceiling: 1.0 / (PI - (cfg.theta + cfg.eps)).sin(),
        }
    }
}

fn is_boundary(cfg: &ChConfig, p: &SweepPoint) -> bool {
    let al = p.lambda.arg().abs();
    let az = p.z.arg().abs();
    p.lambda.norm() == 0.0
        || p.z.norm() == 0.0
        || (al - PI / 2.0).abs() < BOUNDARY_TOL
        || al > cfg.theta - BOUNDARY_TOL
        || az > cfg.eps - BOUNDARY_TOL
}

/// `|τⱼ|` and `|τ₁+τ₂|` (or `|√(λ+z²)|` for the heat model) against the sector bounds.
pub fn verify_root_bounds(sweep: &ChSweep) -> SymbolSweepReport {
    let cfg = sweep.cfg;
    let th = SweepThresholds::for_config(&cfg);
    let mut ext = Extrema::new();
    let mut sum_ext = Extrema::new();
    let mut samples = 0;
    let mut violations = 0;
    let mut boundary_samples = 0;
    let mut boundary_violations = 0;
    let mut records = Vec::new();
    sweep.for_each(|p| {
        samples += 1;
        let boundary = is_boundary(&cfg, &p);
        boundary_samples += usize::from(boundary);
        let (t1, t2) = match cfg.model {
            Model::Biharmonic => tau_unchecked(p.z, p.lambda),
            Model::Heat => {
                let t = tau_heat(p.z, p.lambda);
                (t, t)
            }
        };
        let r1 = t1.norm() / p.scale;
        let r2 = t2.norm() / p.scale;
        ext.push(p.z, p.lambda, r1);
        ext.push(p.z, p.lambda, r2);
        let bad = !(t1.re > 0.0 && t2.re > 0.0) || r1.min(r2) < th.root_min * (1.0 - ARG_TOL);
        if cfg.model == Model::Biharmonic {
            sum_ext.push(p.z, p.lambda, (t1 + t2).norm() / p.scale);
        }
        if bad {
            violations += 1;
            boundary_violations += usize::from(boundary);
        }
        if sweep.keep_records {
            records.push(SampleRecord {
                z: p.z,
                lambda: p.lambda,
                tau1: t1,
                tau2: t2,
                arg_value: f64::NAN,
                m_abs: f64::NAN,
            });
        }
    });
    let secondary = (cfg.model == Model::Biharmonic).then_some(sum_ext.min);
    let sum_ok = secondary.map_or(true, |w| w.value >= th.root_sum_min * (1.0 - ARG_TOL));
    SymbolSweepReport {
        check: "root_bounds".into(),
        model: cfg.model,
        samples,
        min: ext.min,
        max: ext.max,
        secondary,
        threshold: th.root_min,
        secondary_threshold: secondary.map(|_| th.root_sum_min),
        violations,
        boundary_samples,
        boundary_violations,
        pass: violations == 0 && sum_ok && ext.min.value > 0.0,
        records,
    }
}

/// Admissible interval for `arg(τ₁τ₂/(τ₁+τ₂))` by the case of `arg λ`.
pub fn arg_interval(cfg: &ChConfig, arg_lambda: f64) -> (f64, f64) {
    let outer = (cfg.theta + PI) / 4.0;
    if arg_lambda.abs() <= PI / 2.0 {
        (-3.0 * PI / 8.0, 3.0 * PI / 8.0)
    } else if arg_lambda > 0.0 {
        (-cfg.eps, outer)
    } else {
        (-outer, cfg.eps)
    }
}

/// Sector memberships of `τ₁τ₂/(τ₁+τ₂)`; biharmonic model only.
pub fn verify_arg_sectors(sweep: &ChSweep) -> Result<SymbolSweepReport> {
    let cfg = sweep.cfg;
    if cfg.model != Model::Biharmonic {
        return Err(Error::Parameter("sector memberships concern the biharmonic symbols".into()));
    }
    let mut ext = Extrema::new();
    let mut samples = 0;
    let mut violations = 0;
    let mut boundary_samples = 0;
    let mut boundary_violations = 0;
    let mut records = Vec::new();
    sweep.for_each(|p| {
        samples += 1;
        let boundary = is_boundary(&cfg, &p);
        boundary_samples += usize::from(boundary);
        let (t1, t2) = tau_unchecked(p.z, p.lambda);
        let a = (t1 * t2 / (t1 + t2)).arg();
        let (lo, hi) = arg_interval(&cfg, p.lambda.arg());
        ext.push(p.z, p.lambda, a);
        if a <= lo - ARG_TOL || a >= hi + ARG_TOL || !a.is_finite() {
            violations += 1;
            boundary_violations += usize::from(boundary);
        }
        if sweep.keep_records {
            records.push(SampleRecord {
                z: p.z,
                lambda: p.lambda,
                tau1: t1,
                tau2: t2,
                arg_value: a,
                m_abs: f64::NAN,
            });
        }
    });
    Ok(SymbolSweepReport {
        check: "arg_sectors".into(),
        model: cfg.model,
        samples,
        min: ext.min,
        max: ext.max,
        secondary: None,
        threshold: ARG_TOL,
        secondary_threshold: None,
        violations,
        boundary_samples,
        boundary_violations,
        pass: violations == 0,
        records,
    })
}

/// `sup |m|` (or `sup |m_heat|`) against the sector ceiling, with the
/// denominator margin of `m`.
pub fn verify_m_bounded(sweep: &ChSweep) -> SymbolSweepReport {
    let cfg = sweep.cfg;
    let th = SweepThresholds::for_config(&cfg);
    let ceiling = match cfg.model {
        Model::Biharmonic => th.m_ceiling,
        Model::Heat => th.heat_ceiling,
    };
    let mut ext = Extrema::new();
    let mut margin = Extrema::new();
    let mut samples = 0;
    let mut violations = 0;
    let mut boundary_samples = 0;
    let mut boundary_violations = 0;
    let mut records = Vec::new();
    sweep.for_each(|p| {
        samples += 1;
        let boundary = is_boundary(&cfg, &p);
        boundary_samples += usize::from(boundary);
        let m = match cfg.model {
            Model::Biharmonic => m_unchecked(p.z, p.lambda),
            Model::Heat => m_heat_unchecked(p.z, p.lambda),
        };
        let value = m.map(|m| m.norm()).unwrap_or(f64::INFINITY);
        ext.push(p.z, p.lambda, value);
        if cfg.model == Model::Biharmonic {
            margin.push(p.z, p.lambda, m_denominator_margin(p.z, p.lambda));
        }
        if !(value <= ceiling * (1.0 + ARG_TOL)) {
            violations += 1;
            boundary_violations += usize::from(boundary);
        }
        if sweep.keep_records {
            let (t1, t2) = tau_unchecked(p.z, p.lambda);
            records.push(SampleRecord {
                z: p.z,
                lambda: p.lambda,
                tau1: t1,
                tau2: t2,
                arg_value: f64::NAN,
                m_abs: value,
            });
        }
    });
    let secondary = (cfg.model == Model::Biharmonic).then_some(margin.min);
    let margin_ok = secondary.map_or(true, |w| w.value >= (1.0 - ARG_TOL) / ceiling);
    SymbolSweepReport {
        check: "m_bounded".into(),
        model: cfg.model,
        samples,
        min: ext.min,
        max: ext.max,
        secondary,
        threshold: ceiling,
        secondary_threshold: secondary.map(|_| 1.0 / ceiling),
        violations,
        boundary_samples,
        boundary_violations,
        pass: violations == 0 && margin_ok && ext.max.value.is_finite(),
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(model: Model) -> ChConfig {
        ChConfig::new(0.6 * PI, 0.05 * PI, 1.0, model).unwrap()
    }

    #[test]
    fn sweep_on_sphere() {
        let s = ChSweep::new(cfg(Model::Biharmonic), 9, 5, 4).unwrap();
        assert!(s.normalization_residual() < 1e-14);
        let mut n = 0;
        s.for_each(|_| n += 1);
        assert_eq!(n, 4 + 3 * 9 * 4 + 9);
    }

    #[test]
    fn small_sweeps_pass() {
        for model in [Model::Biharmonic, Model::Heat] {
            let s = ChSweep::new(cfg(model), 19, 9, 8).unwrap();
            assert!(verify_root_bounds(&s).pass, "{model:?}");
            assert!(verify_m_bounded(&s).pass, "{model:?}");
        }
        let s = ChSweep::new(cfg(Model::Biharmonic), 19, 9, 8).unwrap();
        let r = verify_arg_sectors(&s).unwrap();
        assert!(r.pass, "{} violations", r.violations);
    }
}

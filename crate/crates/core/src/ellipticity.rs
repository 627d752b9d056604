//! Parameter-ellipticity and Shapiro–Lopatinskii checks by sampling the
//! quasi-homogeneous sphere `|ξ|² + |λ|^{1/m} = 1`.
//!
//! Stable roots are the roots `ζ` of `λ - A₀(ξ', ζ)` with `Im ζ > 0`, so that
//! `e^{iζ x_n}` decays on the half-line. In the `e^{-τ x_n}` notation this is
//! `ζ = iτ` with `Re τ > 0`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symbols::{horner, poly_derivative, BoundarySymbol, DifferentialSymbol};

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-7;
pub const RESIDUE_NODES: usize = 256;
pub const RESIDUE_RADIUS_FACTOR: f64 = 1.5;
const ABERTH_MAX_ITER: usize = 500;

/// `Σ_θ = {z ≠ 0 : |arg z| < θ}`, optionally closed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sector {
    pub theta: f64,
    pub includes_closure: bool,
}

impl Sector {
    pub fn new(theta: f64, includes_closure: bool) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI) {
            return Err(Error::Parameter(format!("sector angle {theta} not in (0, π]")));
        }
        Ok(Sector {
            theta,
            includes_closure,
        })
    }

    pub fn closed(theta: f64) -> Result<Self> {
        Sector::new(theta, true)
    }

    /// Membership test. Zero belongs only to the closed sector.
    pub fn contains(&self, z: Complex64) -> bool {
        if z == Complex64::new(0.0, 0.0) {
            return self.includes_closure;
        }
        let a = z.arg().abs();
        if self.includes_closure {
            a <= self.theta
        } else {
            a < self.theta
        }
    }
}

/// One point `(ξ, λ)` of a sampling.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub xi: Vec<f64>,
    #[serde(serialize_with = "crate::io::ser_complex")]
    pub lambda: Complex64,
}

/// Deterministic sample set on `{|ξ|² + |λ|^{1/m} = 1}` with `λ ∈ Σ̄_θ`.
#[derive(Clone, Debug)]
pub struct QuasiSphereSampling {
    pub m: u32,
    pub n_xi: usize,
    pub n_arg: usize,
    pub n_radial: usize,
    samples: Vec<Sample>,
}

/// Unit directions in `R^dim`.
pub fn sphere_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => vec![vec![]],
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count.max(1))
            .map(|k| {
                let a = 2.0 * PI * k as f64 / count.max(1) as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci lattice on S², padded with zeros in higher dimensions.
            let count = count.max(2);
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let y = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - y * y).sqrt();
                    let a = golden * k as f64;
                    let mut v = vec![0.0; dim];
                    v[0] = r * a.cos();
                    v[1] = r * a.sin();
                    v[2] = y;
                    v
                })
                .collect()
        }
    }
}

impl QuasiSphereSampling {
    /// Builds the sampling: `n_radial` values of `t = |λ|^{1/m} ∈ [0, 1]`,
    /// `n_arg` arguments spanning `[-θ, θ]` and `n_xi` directions in `R^dim`.
    /// Includes the families `λ = 0` and `ξ = 0`.
    pub fn new(
        dim: usize,
        m: u32,
        sector: &Sector,
        n_xi: usize,
        n_arg: usize,
        n_radial: usize,
    ) -> Result<Self> {
        if m == 0 || n_arg == 0 || n_radial < 2 {
            return Err(Error::Parameter(
                "sampling needs m ≥ 1, n_arg ≥ 1, n_radial ≥ 2".into(),
            ));
        }
        let dirs = sphere_directions(dim, n_xi);
        let args: Vec<f64> = if n_arg == 1 {
            vec![0.0]
        } else {
            (0..n_arg)
                .map(|j| -sector.theta + 2.0 * sector.theta * j as f64 / (n_arg - 1) as f64)
                .collect()
        };
        let mut samples = Vec::new();
        for i in 0..n_radial {
            let t = i as f64 / (n_radial - 1) as f64;
            let xi_norm = (1.0 - t).max(0.0).sqrt();
            let lam_abs = t.powi(m as i32);
            let dir_iter: &[Vec<f64>] = if xi_norm == 0.0 { &dirs[..1] } else { &dirs };
            let arg_iter: &[f64] = if lam_abs == 0.0 { &[0.0] } else { &args };
            for d in dir_iter {
                for &a in arg_iter {
                    samples.push(Sample {
                        xi: d.iter().map(|x| x * xi_norm).collect(),
                        lambda: Complex64::from_polar(lam_abs, a),
                    });
                }
            }
        }
        Ok(QuasiSphereSampling {
            m,
            n_xi: dirs.len(),
            n_arg,
            n_radial,
            samples,
        })
    }

    /// Wraps caller-provided samples after checking the normalization.
    pub fn from_samples(m: u32, samples: Vec<Sample>) -> Result<Self> {
        let s = QuasiSphereSampling {
            m,
            n_xi: 0,
            n_arg: 0,
            n_radial: 0,
            samples,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::EmptySampling);
        }
        for (index, s) in self.samples.iter().enumerate() {
            let v = s.xi.iter().map(|x| x * x).sum::<f64>()
                + s.lambda.norm().powf(1.0 / self.m as f64);
            let residual = (v - 1.0).abs();
            if residual > 1e-12 {
                return Err(Error::Normalization { index, residual });
            }
        }
        Ok(())
    }
}

/// Stable roots grouped by multiplicity.
#[derive(Clone, Debug, Serialize)]
pub struct StableRootSet {
    #[serde(serialize_with = "crate::io::ser_root_list")]
    pub roots: Vec<(Complex64, usize)>,
    pub count_with_multiplicity: usize,
}

impl StableRootSet {
    pub fn distinct(&self) -> bool {
        self.roots.iter().all(|&(_, mu)| mu == 1)
    }

    /// Ascending coefficients of `a⁺(ζ) = Π (ζ - ζ_k)^{μ_k}`.
    pub fn stable_factor(&self) -> Vec<Complex64> {
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for &(z, mu) in &self.roots {
            for _ in 0..mu {
                let mut q = vec![Complex64::new(0.0, 0.0); p.len() + 1];
                for (k, c) in p.iter().enumerate() {
                    q[k + 1] += c;
                    q[k] -= c * z;
                }
                p = q;
            }
        }
        p
    }
}

/// All roots of the polynomial with ascending coefficients, by simultaneous
/// Aberth–Ehrlich iteration on the monic normalization.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().map(|x| x.norm()) == Some(0.0) {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Singular("non-finite polynomial coefficient".into()));
    }
    let lead = c[deg];
    c.iter_mut().for_each(|x| *x /= lead);
    if deg == 1 {
        return Ok(vec![-c[0]]);
    }
    let dc = poly_derivative(&c);
    // Fujiwara bound on the root moduli.
    let bound = (0..deg)
        .map(|k| {
            let f = if k == 0 { 0.5 } else { 1.0 };
            (f * c[k].norm()).powf(1.0 / (deg - k) as f64)
        })
        .fold(0.0, f64::max)
        * 2.0;
    let radius = if bound > 0.0 { bound } else { 1.0 };
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + 2.0 * PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..ABERTH_MAX_ITER {
        let mut largest = 0.0_f64;
        for k in 0..deg {
            let p = horner(&c, z[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / horner(&dc, z[k]);
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let mut step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                step = if ratio.is_finite() { ratio } else { Complex64::new(radius * 1e-3, 0.0) };
            }
            z[k] -= step;
            largest = largest.max(step.norm() / z[k].norm().max(f64::MIN_POSITIVE));
        }
        if largest <= 4.0 * f64::EPSILON {
            return Ok(z);
        }
    }
    // Multiple roots converge linearly; accept when residuals are at rounding level.
    let scale: f64 = c.iter().map(|x| x.norm()).sum();
    let ok = z.iter().all(|&r| {
        let mag: f64 = (0..=deg).map(|k| c[k].norm() * r.norm().powi(k as i32)).sum();
        horner(&c, r).norm() <= 1e-10 * mag.max(scale * f64::EPSILON)
    });
    if ok {
        Ok(z)
    } else {
        Err(Error::Singular("root iteration did not converge".into()))
    }
}

/// Groups values whose distance is below `tol · max(|z|, scale)`; returns cluster means and sizes.
pub fn cluster_roots(roots: &[Complex64], tol: f64, scale: f64) -> Vec<(Complex64, usize)> {
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![roots[i]];
        for j in (i + 1)..roots.len() {
            if used[j] {
                continue;
            }
            let r = roots[i].norm().max(roots[j].norm()).max(scale);
            if (roots[i] - roots[j]).norm() < tol * r {
                used[j] = true;
                members.push(roots[j]);
            }
        }
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

fn tangential_scale(xi_t: &[f64], lambda: Complex64, m: u32) -> f64 {
    xi_t.iter().map(|x| x * x).sum::<f64>().sqrt() + lambda.norm().powf(1.0 / (2 * m) as f64)
}

/// Roots of `λ - A₀(ξ', ζ)` in the upper half-plane, clustered into multiplicities.
pub fn stable_roots(
    a: &DifferentialSymbol,
    xi_t: &[f64],
    lambda: Complex64,
    cluster_tol: f64,
) -> Result<StableRootSet> {
    if xi_t.len() + 1 != a.dim() {
        return Err(Error::Parameter(format!(
            "tangential covector has length {} but the symbol has dimension {}",
            xi_t.len(),
            a.dim()
        )));
    }
    let r = tangential_scale(xi_t, lambda, a.half_order());
    if r == 0.0 {
        return Err(Error::Parameter("(ξ', λ) = 0 is excluded".into()));
    }
    let coeffs = a.lambda_minus_polynomial(xi_t, lambda)?;
    let roots = polynomial_roots(&coeffs)?;
    let clusters = cluster_roots(&roots, cluster_tol, r);
    let mut stable = Vec::new();
    for &(z, mu) in &clusters {
        if z.im.abs() <= cluster_tol * (z.norm() + r) {
            return Err(Error::MarginalRoot { re: z.re, im: z.im });
        }
        if z.im > 0.0 {
            stable.push((z, mu));
        }
    }
    stable.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)));
    let count = stable.iter().map(|&(_, mu)| mu).sum();
    Ok(StableRootSet {
        roots: stable,
        count_with_multiplicity: count,
    })
}

/// Residue-form Lopatinskii matrix
/// `M_{jℓ} = (1/2πi) ∮ B₀ⱼ(ξ', ζ) ζ^ℓ / a⁺(ζ) dζ`, `ℓ = 0..m-1`,
/// by the trapezoidal rule on a circle enclosing every stable root.
pub fn lopatinskii_matrix(
    roots: &StableRootSet,
    boundary: &[BoundarySymbol],
    xi_t: &[f64],
) -> DMatrix<Complex64> {
    let m = boundary.len();
    let a_plus = roots.stable_factor();
    let b_polys: Vec<Vec<Complex64>> = boundary.iter().map(|b| b.xi_n_polynomial(xi_t)).collect();
    let rmax = roots.roots.iter().map(|(z, _)| z.norm()).fold(0.0, f64::max);
    let radius = if rmax > 0.0 {
        RESIDUE_RADIUS_FACTOR * rmax
    } else {
        1.0
    };
    let mut mat = DMatrix::<Complex64>::zeros(m, m);
    for q in 0..RESIDUE_NODES {
        let z = Complex64::from_polar(radius, 2.0 * PI * q as f64 / RESIDUE_NODES as f64);
        // dζ/(2πi) = ζ dθ/(2π)
        let base = z / horner(&a_plus, z);
        let mut zl = base;
        for l in 0..m {
            for (j, bp) in b_polys.iter().enumerate() {
                mat[(j, l)] += horner(bp, z) * zl;
            }
            zl *= z;
        }
    }
    mat / Complex64::new(RESIDUE_NODES as f64, 0.0)
}

/// Determinant of the residue-form Lopatinskii matrix.
pub fn lopatinskii_determinant(
    a: &DifferentialSymbol,
    boundary: &[BoundarySymbol],
    xi_t: &[f64],
    lambda: Complex64,
    cluster_tol: f64,
) -> Result<Complex64> {
    let m = a.half_order() as usize;
    if boundary.len() != m {
        return Err(Error::Parameter(format!(
            "{} boundary operators given, m = {m}",
            boundary.len()
        )));
    }
    let roots = stable_roots(a, xi_t, lambda, cluster_tol)?;
    if roots.count_with_multiplicity != m {
        return Err(Error::RootCount {
            found: roots.count_with_multiplicity,
            expected: m,
        });
    }
    Ok(lopatinskii_matrix(&roots, boundary, xi_t).determinant())
}

/// `det(B₀ⱼ(ξ', ζ_k)) / Π_{k<l}(ζ_l - ζ_k)` for distinct stable roots.
///
/// Equals the residue-form determinant times `(-1)^{m(m-1)/2}`.
pub fn lopatinskii_determinant_vandermonde(
    roots: &StableRootSet,
    boundary: &[BoundarySymbol],
    xi_t: &[f64],
) -> Result<Complex64> {
    if !roots.distinct() {
        return Err(Error::Parameter("Vandermonde form needs distinct roots".into()));
    }
    let z: Vec<Complex64> = roots.roots.iter().map(|&(z, _)| z).collect();
    let m = boundary.len();
    if z.len() != m {
        return Err(Error::RootCount {
            found: z.len(),
            expected: m,
        });
    }
    let mat = DMatrix::from_fn(m, m, |j, k| horner(&boundary[j].xi_n_polynomial(xi_t), z[k]));
    let mut vand = Complex64::new(1.0, 0.0);
    for k in 0..m {
        for l in (k + 1)..m {
            vand *= z[l] - z[k];
        }
    }
    Ok(mat.determinant() / vand)
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticityReport {
    pub c_min: f64,
    pub witness: Sample,
    pub samples_evaluated: usize,
    pub pass: bool,
    pub tolerance: f64,
}

/// `|λ - A₀(ξ)| / (|λ| + |ξ|^{2m})`
pub fn ellipticity_ratio(a: &DifferentialSymbol, xi: &[f64], lambda: Complex64) -> f64 {
    let num = (lambda - a.eval_symbol(xi, true)).norm();
    let xi_abs = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    num / (lambda.norm() + xi_abs.powi(a.order() as i32))
}

pub fn check_parameter_ellipticity(
    a: &DifferentialSymbol,
    sector: &Sector,
    sampling: &QuasiSphereSampling,
    tol: f64,
) -> Result<EllipticityReport> {
    sampling.validate()?;
    if a.principal().terms().next().is_none() {
        return Err(Error::InvalidSymbol("principal part vanishes".into()));
    }
    let mut c_min = f64::INFINITY;
    let mut witness = sampling.samples()[0].clone();
    let mut evaluated = 0;
    for s in sampling.samples() {
        if s.xi.len() != a.dim() {
            return Err(Error::Parameter(format!(
                "sample covector length {} but dimension {}",
                s.xi.len(),
                a.dim()
            )));
        }
        if !sector.contains(s.lambda) {
            continue;
        }
        evaluated += 1;
        let r = ellipticity_ratio(a, &s.xi, s.lambda);
        if r < c_min {
            c_min = r;
            witness = s.clone();
        }
    }
    if evaluated == 0 {
        return Err(Error::EmptySampling);
    }
    Ok(EllipticityReport {
        c_min,
        witness,
        samples_evaluated: evaluated,
        pass: c_min > tol,
        tolerance: tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerateSample {
    pub sample: Sample,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LopatinskiiReport {
    pub det_min: f64,
    pub witness: Sample,
    pub samples_evaluated: usize,
    pub pass: bool,
    pub tolerance: f64,
    pub degenerate_samples: Vec<DegenerateSample>,
}

/// `|det|` divided by `r^{Σ m_j - m(m-1)/2} · Π scale(B₀ⱼ)` with `r = |ξ'| + |λ|^{1/2m}`,
/// which makes it invariant under `(ξ', λ) ↦ (ρξ', ρ^{2m}λ)`.
pub fn normalized_determinant(
    det: Complex64,
    a: &DifferentialSymbol,
    boundary: &[BoundarySymbol],
    xi_t: &[f64],
    lambda: Complex64,
) -> f64 {
    let m = a.half_order() as i32;
    let r = tangential_scale(xi_t, lambda, a.half_order());
    let degree: i32 = boundary.iter().map(|b| b.order() as i32).sum::<i32>() - m * (m - 1) / 2;
    let scale: f64 = boundary.iter().map(|b| b.principal().scale_norm()).product();
    det.norm() / (r.powi(degree) * scale)
}

pub fn check_shapiro_lopatinskii(
    a: &DifferentialSymbol,
    boundary: &[BoundarySymbol],
    sector: &Sector,
    sampling: &QuasiSphereSampling,
    tol: f64,
) -> Result<LopatinskiiReport> {
    sampling.validate()?;
    let m = a.half_order() as usize;
    if boundary.len() != m {
        return Err(Error::Parameter(format!(
            "{} boundary operators given, m = {m}",
            boundary.len()
        )));
    }
    let mut det_min = f64::INFINITY;
    let mut witness = sampling.samples()[0].clone();
    let mut evaluated = 0;
    let mut degenerate = Vec::new();
    for s in sampling.samples() {
        if s.xi.len() + 1 != a.dim() {
            return Err(Error::Parameter(format!(
                "sample covector length {} but tangential dimension {}",
                s.xi.len(),
                a.dim() - 1
            )));
        }
        if !sector.contains(s.lambda) {
            continue;
        }
        let roots = match stable_roots(a, &s.xi, s.lambda, DEFAULT_CLUSTER_TOL) {
            Ok(r) => r,
            Err(e) => {
                degenerate.push(DegenerateSample {
                    sample: s.clone(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if roots.count_with_multiplicity != m {
            degenerate.push(DegenerateSample {
                sample: s.clone(),
                reason: Error::RootCount {
                    found: roots.count_with_multiplicity,
                    expected: m,
                }
                .to_string(),
            });
            continue;
        }
        evaluated += 1;
        let det = lopatinskii_matrix(&roots, boundary, &s.xi).determinant();
        let d = normalized_determinant(det, a, boundary, &s.xi, s.lambda);
        if d < det_min {
            det_min = d;
            witness = s.clone();
        }
    }
    if evaluated == 0 && degenerate.is_empty() {
        return Err(Error::EmptySampling);
    }
    if evaluated == 0 {
        det_min = 0.0;
    }
    Ok(LopatinskiiReport {
        det_min,
        witness,
        samples_evaluated: evaluated,
        pass: degenerate.is_empty() && det_min > tol,
        tolerance: tol,
        degenerate_samples: degenerate,
    })
}

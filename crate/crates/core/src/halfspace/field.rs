use num_complex::Complex64;
use rustfft::FftPlanner;

use super::exppoly::{Depth, ExpPoly};
use crate::error::{Error, Result};
use crate::sobolev::{fft_nd, BoundaryField, TorusGrid};
use crate::symbols::Weight;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Whether the `x'` axis of a [`HalfSpaceField`] holds Fourier coefficients or samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Spectral,
    Physical,
}

/// Samples on `boundary grid × {x_n}`; entry `(i, b)` is stored at `i * grid.len() + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpaceField {
    pub grid: TorusGrid,
    pub xn: Vec<f64>,
    pub values: Vec<Complex64>,
    pub representation: Representation,
}

/// `x_n = j h`, `j = 0..=N/2`, with `h = L/N`: the nonnegative half of a periodic axis.
pub fn uniform_half_grid(points: usize, length: f64) -> Vec<f64> {
    let h = length / points as f64;
    (0..=points / 2).map(|j| j as f64 * h).collect()
}

pub(crate) fn validate_xn(xn: &[f64]) -> Result<()> {
    if xn.is_empty() || xn[0] != 0.0 {
        return Err(Error::Parameter("x_n samples must start at 0".into()));
    }
    if xn.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::Parameter("x_n samples must be strictly increasing and finite".into()));
    }
    Ok(())
}

/// `(‖c‖₂ · L^{(n-1)/2})`, the `L²` norm of `Σ c_k e^{ik·x'}` on the boundary torus.
pub fn boundary_l2(grid: &TorusGrid, coeffs: &[Complex64]) -> f64 {
    let s: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    (s * grid.length.powi(grid.n as i32)).sqrt()
}

impl HalfSpaceField {
    pub fn new(
        grid: TorusGrid,
        xn: Vec<f64>,
        values: Vec<Complex64>,
        representation: Representation,
    ) -> Result<Self> {
        validate_xn(&xn)?;
        if values.len() != grid.len() * xn.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} boundary points × {} normal samples",
                values.len(),
                grid.len(),
                xn.len()
            )));
        }
        Ok(HalfSpaceField {
            grid,
            xn,
            values,
            representation,
        })
    }

    pub fn zeros(grid: TorusGrid, xn: Vec<f64>) -> Result<Self> {
        let len = grid.len() * xn.len();
        HalfSpaceField::new(grid, xn, vec![ZERO; len], Representation::Physical)
    }

    /// Physical samples of `f(x', x_n)`.
    pub fn from_fn(grid: TorusGrid, xn: Vec<f64>, f: impl Fn(&[f64], f64) -> Complex64) -> Result<Self> {
        validate_xn(&xn)?;
        let mut values = Vec::with_capacity(grid.len() * xn.len());
        for &x in &xn {
            for b in 0..grid.len() {
                values.push(f(&grid.point(b), x));
            }
        }
        HalfSpaceField::new(grid, xn, values, Representation::Physical)
    }

    pub fn slice(&self, i: usize) -> &[Complex64] {
        let nb = self.grid.len();
        &self.values[i * nb..(i + 1) * nb]
    }

    fn transform(&self, inverse: bool) -> Vec<Complex64> {
        let nb = self.grid.len();
        let mut out = self.values.clone();
        let scale = if inverse { 1.0 } else { 1.0 / nb as f64 };
        for chunk in out.chunks_mut(nb) {
            fft_nd(&self.grid, chunk, inverse);
            chunk.iter_mut().for_each(|v| *v *= scale);
        }
        out
    }

    pub fn to_spectral(&self) -> HalfSpaceField {
        match self.representation {
            Representation::Spectral => self.clone(),
            Representation::Physical => HalfSpaceField {
                values: self.transform(false),
                representation: Representation::Spectral,
                ..self.clone()
            },
        }
    }

    pub fn to_physical(&self) -> HalfSpaceField {
        match self.representation {
            Representation::Physical => self.clone(),
            Representation::Spectral => HalfSpaceField {
                values: self.transform(true),
                representation: Representation::Physical,
                ..self.clone()
            },
        }
    }

    /// Trigonometric interpolant of the even reflection in `x_n`.
    ///
    /// Requires `x_n = j h`, `j = 0..=M`: the reflected sequence has period
    /// `2X`, `X = M h`, and the result is exact at every sample.
    pub fn even_reflection(&self) -> Result<ModalField> {
        let m = self.xn.len() - 1;
        if m == 0 {
            return Err(Error::Parameter("even reflection needs at least two x_n samples".into()));
        }
        let x_max = self.xn[m];
        let h = x_max / m as f64;
        if self
            .xn
            .iter()
            .enumerate()
            .any(|(j, &x)| (x - j as f64 * h).abs() > 1e-12 * x_max)
        {
            return Err(Error::Parameter("even reflection needs uniformly spaced x_n samples".into()));
        }
        let spec = self.to_spectral();
        let nb = self.grid.len();
        let period = 2 * m;
        let fft = FftPlanner::<f64>::new().plan_fft_forward(period);
        let k0 = std::f64::consts::PI / x_max;
        let mut modes = Vec::with_capacity(nb);
        let mut line = vec![ZERO; period];
        for b in 0..nb {
            for j in 0..=m {
                line[j] = spec.values[j * nb + b];
            }
            for j in 1..m {
                line[period - j] = line[j];
            }
            fft.process(&mut line);
            let mut w = ExpPoly::new();
            for (q, d) in line.iter().enumerate() {
                let d = d / period as f64;
                if d == ZERO {
                    continue;
                }
                if q == m {
                    w.push(0.5 * d, 0, Complex64::new(k0 * m as f64, 0.0));
                    w.push(0.5 * d, 0, Complex64::new(-k0 * m as f64, 0.0));
                } else {
                    let freq = if q < m { q as f64 } else { q as f64 - period as f64 };
                    w.push(d, 0, Complex64::new(k0 * freq, 0.0));
                }
            }
            w.simplify();
            modes.push(w);
        }
        Ok(ModalField {
            grid: self.grid,
            modes,
            depth: Depth::Finite(x_max),
        })
    }

    /// Discrete `L²` norm: Parseval in `x'`, trapezoid rule in `x_n`.
    pub fn l2_norm(&self) -> f64 {
        let spec = self.to_spectral();
        let nb = self.grid.len();
        let mut total = 0.0;
        for i in 0..self.xn.len() {
            let w = trapezoid_weight(&self.xn, i);
            total += w * spec.values[i * nb..(i + 1) * nb].iter().map(|c| c.norm_sqr()).sum::<f64>();
        }
        (total * self.grid.length.powi(self.grid.n as i32)).sqrt()
    }
}

pub(crate) fn trapezoid_weight(xn: &[f64], i: usize) -> f64 {
    let n = xn.len();
    if n < 2 {
        return 0.0;
    }
    let left = if i > 0 { xn[i] - xn[i - 1] } else { 0.0 };
    let right = if i + 1 < n { xn[i + 1] - xn[i] } else { 0.0 };
    0.5 * (left + right)
}

/// Exact field `u(x', x_n) = Σ_{k'} w_{k'}(x_n) e^{ik'·x'}` with exponential-polynomial profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct ModalField {
    pub grid: TorusGrid,
    pub modes: Vec<ExpPoly>,
    pub depth: Depth,
}

impl ModalField {
    pub fn zeros(grid: TorusGrid, depth: Depth) -> Self {
        ModalField {
            grid,
            modes: vec![ExpPoly::new(); grid.len()],
            depth,
        }
    }

    fn check(&self, other: &ModalField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("modal fields on different boundary grids".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &ModalField) -> Result<ModalField> {
        self.check(other)?;
        Ok(ModalField {
            grid: self.grid,
            modes: self.modes.iter().zip(&other.modes).map(|(a, b)| a.add(b)).collect(),
            depth: self.depth.min(other.depth),
        })
    }

    pub fn sub(&self, other: &ModalField) -> Result<ModalField> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> ModalField {
        ModalField {
            modes: self.modes.iter().map(|w| w.scale(c)).collect(),
            ..self.clone()
        }
    }

    /// Applies the per-mode polynomial `p(k')(D_n)`.
    pub fn apply(&self, p: impl Fn(&[f64]) -> Vec<Complex64>) -> ModalField {
        ModalField {
            modes: self
                .modes
                .iter()
                .enumerate()
                .map(|(b, w)| w.apply(&p(&self.grid.wavevector(b))))
                .collect(),
            ..self.clone()
        }
    }

    /// Boundary coefficients of `p(k')(D_n) u` at `x_n = 0`.
    pub fn boundary_values(&self, p: impl Fn(&[f64]) -> Vec<Complex64>) -> Vec<Complex64> {
        self.modes
            .iter()
            .enumerate()
            .map(|(b, w)| w.boundary_value(&p(&self.grid.wavevector(b))))
            .collect()
    }

    /// Fourier coefficients of `u(·, x)`.
    pub fn coefficients_at(&self, x: f64) -> Vec<Complex64> {
        self.modes.iter().map(|w| w.eval(x)).collect()
    }

    pub fn trace(&self) -> Result<BoundaryField> {
        BoundaryField::from_coefficients(self.grid, self.coefficients_at(0.0))
    }

    pub fn sample(&self, xn: &[f64]) -> Result<HalfSpaceField> {
        validate_xn(xn)?;
        let mut values = Vec::with_capacity(xn.len() * self.grid.len());
        for &x in xn {
            values.extend(self.coefficients_at(x));
        }
        Ok(HalfSpaceField::new(self.grid, xn.to_vec(), values, Representation::Spectral)?.to_physical())
    }

    pub fn term_count(&self) -> usize {
        self.modes.iter().map(|w| w.terms.len()).sum()
    }

    /// `L²` norm over `torus × [0, X]` in closed form.
    pub fn l2_norm(&self) -> Result<f64> {
        let mut total = 0.0;
        for w in &self.modes {
            total += w.norm_sq(self.depth)?;
        }
        Ok((total * self.grid.length.powi(self.grid.n as i32)).sqrt())
    }

    /// `‖u‖_{H^{s,σ}_{2,λ}}` on the half-space strip for integer `s ≥ 0`:
    /// `Σ_j C(s,j) ∫ Σ_{k'} ⟨k',λ⟩^{2(s-j)+2σ} |D_n^j w_{k'}|²`.
    pub fn mixed_norm(&self, s: u32, sigma: f64, lambda: Complex64, m: u32) -> Result<f64> {
        let weight = Weight { m };
        let mut total = 0.0;
        for (b, w) in self.modes.iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            let kt = self.grid.wavevector(b);
            let br2 = weight.squared(&kt, lambda);
            let mut d = w.clone();
            let mut binom = 1.0;
            for j in 0..=s {
                if j > 0 {
                    d = d.dn(1);
                    binom *= f64::from(s - j + 1) / f64::from(j);
                }
                let factor = binom * br2.powf(f64::from(s - j) + sigma);
                total += factor * d.norm_sq(self.depth)?;
            }
        }
        Ok((total * self.grid.length.powi(self.grid.n as i32)).sqrt())
    }

    /// `H^{t}_{2,λ}` surrogate for real `t`: `H^{⌊t⌋, t-⌊t⌋}` for `t ≥ 0` and `H^{0,t}` for `t < 0`.
    pub fn sobolev_norm(&self, t: f64, lambda: Complex64, m: u32) -> Result<f64> {
        if t >= 0.0 {
            let s = t.floor();
            self.mixed_norm(s as u32, t - s, lambda, m)
        } else {
            self.mixed_norm(0, t, lambda, m)
        }
    }
}

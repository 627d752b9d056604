//! Periodic grids and sampled fields.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n`-dimensional torus `[0, L)ⁿ` sampled with `N` points per axis.
///
/// Values are stored row-major with the last axis (the normal variable `x_n`)
/// varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

impl TorusGrid {
    pub fn new(n: usize, points: usize, length: f64) -> Result<Self> {
        if n == 0 || n > 4 {
            return Err(Error::Parameter(format!("grid dimension {n} not in 1..=4")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::Parameter(format!(
                "points per axis {points} must be a power of two ≥ 2"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Parameter(format!("box length {length} must be positive")));
        }
        let total = points.checked_pow(n as u32).filter(|&t| t <= 1 << 24);
        if total.is_none() {
            return Err(Error::Parameter("grid too large".into()));
        }
        Ok(TorusGrid {
            n,
            points,
            length,
        })
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Same box with one dimension less (the boundary torus).
    pub fn boundary(&self) -> Result<TorusGrid> {
        if self.n < 2 {
            return Err(Error::Parameter("boundary of a one-dimensional grid".into()));
        }
        Ok(TorusGrid {
            n: self.n - 1,
            ..*self
        })
    }

    /// Same box with one more (normal) dimension.
    pub fn extend(&self, points: usize, length: f64) -> Result<TorusGrid> {
        if points != self.points || length != self.length {
            return Err(Error::Parameter(
                "grids with unequal axes are not supported".into(),
            ));
        }
        TorusGrid::new(self.n + 1, points, length)
    }

    /// Integer frequency of FFT bin `j`.
    pub fn frequency(&self, j: usize) -> i64 {
        if j < self.points / 2 {
            j as i64
        } else {
            j as i64 - self.points as i64
        }
    }

    /// Angular wavenumber of FFT bin `j`, `2π/L · freq`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI / self.length * self.frequency(j) as f64
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for k in (0..self.n).rev() {
            idx[k] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Wavenumber vector of flat FFT bin `flat`.
    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .map(|j| self.wavenumber(j))
            .collect()
    }

    /// Physical coordinate of flat index `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(flat)
            .into_iter()
            .map(|j| j as f64 * h)
            .collect()
    }

    /// Whether bin `j` is the unpaired Nyquist bin.
    pub fn is_nyquist(&self, j: usize) -> bool {
        j == self.points / 2
    }
}

/// In-place multidimensional FFT on a row-major array (unnormalized).
pub fn fft_nd(grid: &TorusGrid, data: &mut [Complex64], inverse: bool) {
    let n = grid.points;
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..grid.n {
        let stride = n.pow((grid.n - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Complex samples of a periodic function.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub grid: TorusGrid,
    pub values: Vec<Complex64>,
}

/// Samples on the boundary torus `R^{n-1}` surrogate.
pub type BoundaryField = GridField;

impl GridField {
    pub fn new(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridField { grid, values })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        GridField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        GridField { grid, values }
    }

    /// Fourier coefficients `c_k` with `u(x) = Σ_k c_k e^{ik·x}`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut c = self.values.clone();
        fft_nd(&self.grid, &mut c, false);
        let scale = 1.0 / self.grid.len() as f64;
        c.iter_mut().for_each(|v| *v *= scale);
        c
    }

    pub fn from_coefficients(grid: TorusGrid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch("coefficient count".into()));
        }
        fft_nd(&grid, &mut coeffs, true);
        GridField::new(grid, coeffs)
    }

    /// Applies a Fourier multiplier given as a function of the wavevector.
    pub fn apply_multiplier(&self, symbol: impl Fn(&[f64]) -> Complex64) -> GridField {
        let mut c = self.coefficients();
        for (i, v) in c.iter_mut().enumerate() {
            *v *= symbol(&self.grid.wavevector(i));
        }
        GridField::from_coefficients(self.grid, c).expect("same grid")
    }

    /// `∂^α u`, computed spectrally. Odd derivatives annihilate the Nyquist bin.
    pub fn derivative(&self, alpha: &[u32]) -> Result<GridField> {
        if alpha.len() != self.grid.n {
            return Err(Error::Parameter("multi-index length differs from grid dimension".into()));
        }
        let grid = self.grid;
        let mut c = self.coefficients();
        for (i, v) in c.iter_mut().enumerate() {
            let idx = grid.multi_index(i);
            let mut f = Complex64::new(1.0, 0.0);
            for (axis, &a) in alpha.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                if a % 2 == 1 && grid.is_nyquist(idx[axis]) {
                    f = Complex64::new(0.0, 0.0);
                    break;
                }
                f *= Complex64::new(0.0, grid.wavenumber(idx[axis])).powu(a);
            }
            *v *= f;
        }
        GridField::from_coefficients(grid, c)
    }

    /// `(h^n Σ |u|^p)^{1/p}`
    pub fn lp_norm(&self, p: f64) -> f64 {
        let w = self.grid.spacing().powi(self.grid.n as i32);
        if p == 2.0 {
            return (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt();
        }
        (w * self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> GridField {
        GridField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &GridField) -> Result<GridField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("adding fields on different grids".into()));
        }
        Ok(GridField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &GridField) -> Result<GridField> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }
}

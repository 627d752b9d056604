use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use param_elliptic::cahn_hilliard::{ChConfig, Model};
use param_elliptic::ellipticity::Sector;
use param_elliptic::sobolev::TorusGrid;
use param_elliptic::symbols::{BoundarySymbol, DifferentialSymbol};
use serde::{Deserialize, Serialize};

/// Invalid configuration; maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `λ + Δ²` with `(γ₀, ∂_νΔ)` and the dynamic boundary row
    BiharmonicDynbc,
    /// `λ - Δ` with `γ₀` and the dynamic boundary row
    HeatDynbc,
    /// `λ + Δ²` with the rank-deficient pair `(γ₀, γ₀)`
    Degenerate,
}

/// Interior operator `A₀` and boundary operators `Bⱼ`, in the symbol JSON format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Operator {
    pub interior: DifferentialSymbol,
    pub boundary: Vec<BoundarySymbol>,
}

impl Operator {
    pub fn preset(p: Preset, n: usize) -> Operator {
        let bilaplacian = DifferentialSymbol::bilaplacian(n).scaled(Complex64::new(-1.0, 0.0));
        match p {
            Preset::BiharmonicDynbc => Operator {
                interior: bilaplacian,
                boundary: vec![BoundarySymbol::trace(n), BoundarySymbol::normal_laplacian(n)],
            },
            Preset::HeatDynbc => Operator {
                interior: DifferentialSymbol::laplacian(n),
                boundary: vec![BoundarySymbol::trace(n)],
            },
            Preset::Degenerate => Operator {
                interior: bilaplacian,
                boundary: vec![BoundarySymbol::trace(n), BoundarySymbol::trace(n)],
            },
        }
    }

    pub fn load(path: &Path) -> Result<Operator, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| bad(format!("operator file {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("operator file {}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Dimension of the half-space; the boundary torus has dimension `n - 1`.
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub length: f64,
    /// `x_n` samples are `j·xn_length/xn_points`, `j = 0..=xn_points/2`.
    pub xn_points: usize,
    pub xn_length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 2,
            points: 64,
            length: 2.0 * PI,
            xn_points: 128,
            xn_length: 16.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Rays `arg λ` in radians.
    pub rays: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub n_xi: usize,
    pub n_arg: usize,
    pub n_radial: usize,
    pub n_z: usize,
    /// Smoothness of the a-priori sweep norm; defaults to `max mⱼ + 1`.
    pub apriori_s: Option<f64>,
    pub apriori_sigma: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            rays: vec![0.0, 0.55 * PI, -0.55 * PI],
            magnitudes: (0..9).map(|i| 10f64.powf(0.5 * f64::from(i))).collect(),
            n_xi: 16,
            n_arg: 181,
            n_radial: 65,
            n_z: 64,
            apriori_s: None,
            apriori_sigma: 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormConfig {
    pub s: f64,
    pub sigma: f64,
    pub p: f64,
    /// `[re, im]`
    pub lambda: [f64; 2],
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig {
            s: 1.0,
            sigma: 0.0,
            p: 2.0,
            lambda: [0.0, 0.0],
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Grid field for `norm`.
    pub field: Option<PathBuf>,
    /// Half-space field for the interior datum `f`.
    pub interior: Option<PathBuf>,
    /// Boundary fields `g₁, g₂, ...`; for the Cahn–Hilliard commands only `g₁` is used.
    pub boundary: Vec<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub operator: Option<PathBuf>,
    pub theta: f64,
    pub eps: f64,
    pub lambda0: f64,
    pub heat: bool,
    pub grid: GridConfig,
    pub sweep: SweepConfig,
    pub norm: NormConfig,
    /// Spectral parameter `[re, im]` for single solves.
    pub lambda: [f64; 2],
    /// Time for `ch-semigroup`.
    pub t: f64,
    /// Band limit of generated data.
    pub kmax: i64,
    pub seed: u64,
    pub data: DataConfig,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: None,
            operator: None,
            theta: 0.6 * PI,
            eps: 0.05 * PI,
            lambda0: 1.0,
            heat: false,
            grid: GridConfig::default(),
            sweep: SweepConfig::default(),
            norm: NormConfig::default(),
            lambda: [10.0, 0.0],
            t: 1.0,
            kmax: 8,
            seed: 0,
            data: DataConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| bad(format!("config file {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("config file {}: {e}", path.display())))
    }

    pub fn model(&self) -> Model {
        if self.heat || self.preset == Some(Preset::HeatDynbc) {
            Model::Heat
        } else {
            Model::Biharmonic
        }
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.lambda[0], self.lambda[1])
    }

    pub fn xn(&self) -> Vec<f64> {
        param_elliptic::halfspace::uniform_half_grid(self.grid.xn_points, self.grid.xn_length)
    }

    pub fn operator(&self) -> Result<Operator, ConfigError> {
        let op = match (&self.operator, self.preset) {
            (Some(path), _) => Operator::load(path)?,
            (None, _) if self.heat => Operator::preset(Preset::HeatDynbc, self.grid.n),
            (None, Some(p)) => Operator::preset(p, self.grid.n),
            (None, None) => Operator::preset(Preset::BiharmonicDynbc, self.grid.n),
        };
        if op.interior.dim() != self.grid.n {
            return Err(bad(format!(
                "operator dimension {} differs from grid n = {}",
                op.interior.dim(),
                self.grid.n
            )));
        }
        if op.boundary.iter().any(|b| b.dim() != self.grid.n) {
            return Err(bad("boundary operator dimension differs from the interior operator"));
        }
        Ok(op)
    }

    pub fn sector(&self) -> Result<Sector, ConfigError> {
        Sector::closed(self.theta).map_err(|e| bad(e.to_string()))
    }

    pub fn ch_config(&self) -> Result<ChConfig, ConfigError> {
        ChConfig::new(self.theta, self.eps, self.lambda0, self.model()).map_err(|e| bad(e.to_string()))
    }

    pub fn full_grid(&self) -> Result<TorusGrid, ConfigError> {
        TorusGrid::new(self.grid.n, self.grid.points, self.grid.length).map_err(|e| bad(e.to_string()))
    }

    pub fn boundary_grid(&self) -> Result<TorusGrid, ConfigError> {
        if self.grid.n < 2 {
            return Err(bad("half-space problems need n ≥ 2"));
        }
        TorusGrid::new(self.grid.n - 1, self.grid.points, self.grid.length).map_err(|e| bad(e.to_string()))
    }

    /// Checks everything that does not depend on the subcommand.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = [self.theta, self.eps, self.lambda0, self.t, self.lambda[0], self.lambda[1]];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(bad("non-finite numeric parameter"));
        }
        if !(self.theta > 0.0 && self.theta < PI) {
            return Err(bad(format!("theta = {} must lie in (0, π)", self.theta)));
        }
        if self.grid.n == 0 || self.grid.n > 3 {
            return Err(bad(format!("grid n = {} must be 1, 2 or 3", self.grid.n)));
        }
        if self.grid.points < 2 || self.grid.points > 1024 {
            return Err(bad(format!("grid N = {} must lie in [2, 1024]", self.grid.points)));
        }
        if !(self.grid.length > 0.0 && self.grid.length.is_finite()) {
            return Err(bad("grid L must be positive"));
        }
        if self.grid.xn_points < 2 || !(self.grid.xn_length > 0.0 && self.grid.xn_length.is_finite()) {
            return Err(bad("x_n grid needs xn_points ≥ 2 and xn_length > 0"));
        }
        if self.kmax < 0 {
            return Err(bad("kmax must be nonnegative"));
        }
        if self.sweep.rays.iter().chain(&self.sweep.magnitudes).any(|x| !x.is_finite()) {
            return Err(bad("non-finite sweep entry"));
        }
        if self.sweep.magnitudes.iter().any(|&m| m <= 0.0) {
            return Err(bad("sweep magnitudes must be positive"));
        }
        if self.sweep.n_xi < 1 || self.sweep.n_arg < 2 || self.sweep.n_radial < 2 || self.sweep.n_z < 2 {
            return Err(bad("sweep densities too small"));
        }
        for path in self.data.field.iter().chain(&self.data.interior).chain(&self.data.boundary) {
            if !path.is_file() {
                return Err(bad(format!("data file {} not found", path.display())));
            }
        }
        if let Some(path) = &self.operator {
            if !path.is_file() {
                return Err(bad(format!("operator file {} not found", path.display())));
            }
        }
        self.sector()?;
        Ok(())
    }
}

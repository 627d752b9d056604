//! Seeded random test data.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, so a seed fixes the
//! full data stream across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::halfspace::{Depth, ExpPoly, ModalField};
use crate::sobolev::{GridField, TorusGrid};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample of the square `[-1, 1]²` in the complex plane.
pub fn unit_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random trigonometric polynomial with integer frequencies `|k_i| ≤ kmax` on every axis.
pub fn band_limited(grid: TorusGrid, kmax: i64, rng: &mut impl Rng) -> GridField {
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (flat, v) in c.iter_mut().enumerate() {
        let inside = grid
            .multi_index(flat)
            .iter()
            .all(|&j| !grid.is_nyquist(j) && grid.frequency(j).abs() <= kmax);
        if inside {
            *v = unit_complex(rng);
        }
    }
    GridField::from_coefficients(grid, c).expect("coefficient length matches grid")
}

/// Band-limited field whose coefficients decay like `⟨k⟩^{-decay}`.
pub fn band_limited_smooth(grid: TorusGrid, kmax: i64, decay: f64, rng: &mut impl Rng) -> GridField {
    let u = band_limited(grid, kmax, rng);
    u.apply_multiplier(|k| {
        let w = 1.0 + k.iter().map(|x| x * x).sum::<f64>();
        Complex64::new(w.powf(-0.5 * decay), 0.0)
    })
}

/// Interior data with one decaying exponential `c e^{iζx_n}` per boundary mode
/// `|k'_i| ≤ kmax`, `Re ζ ∈ [-1, 1]`, `Im ζ ∈ [1/2, 2]`.
pub fn decaying_modal_field(grid: TorusGrid, kmax: i64, rng: &mut impl Rng) -> ModalField {
    let mut f = ModalField::zeros(grid, Depth::Infinite);
    for (flat, w) in f.modes.iter_mut().enumerate() {
        let inside = grid
            .multi_index(flat)
            .iter()
            .all(|&j| !grid.is_nyquist(j) && grid.frequency(j).abs() <= kmax);
        if inside {
            let c = unit_complex(rng);
            let zeta = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0));
            *w = ExpPoly::exp(c, zeta);
        }
    }
    f
}

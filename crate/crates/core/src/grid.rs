//! Periodic spatial grid and its Fourier dual.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid `x_j = −L/2 + j·dx`, `j = 0..n`.
///
/// Momenta are stored in FFT order `0, dp, …, (n/2−1)dp, −(n/2)dp, …, −dp`
/// with `dp = 2π/L`; [`SpatialGrid::momenta_ascending`] gives the sorted
/// order used for output.
#[derive(Clone)]
pub struct SpatialGrid {
    n_points: usize,
    extent: f64,
    dx: f64,
    x: Arc<[f64]>,
    p: Arc<[f64]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpatialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialGrid")
            .field("n_points", &self.n_points)
            .field("extent", &self.extent)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for SpatialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.extent == other.extent
    }
}

/// Builds a periodic grid of `n_points` (a power of two, at least 16)
/// spanning `[−extent/2, extent/2)`.
pub fn make_grid(n_points: usize, extent: f64) -> Result<SpatialGrid> {
    if n_points < 16 || !n_points.is_power_of_two() {
        return Err(Error::config(format!(
            "n_points must be a power of two >= 16, got {n_points}"
        )));
    }
    if !(extent.is_finite() && extent > 0.0) {
        return Err(Error::config(format!(
            "extent must be positive, got {extent}"
        )));
    }
    let dx = extent / n_points as f64;
    let x: Arc<[f64]> = (0..n_points)
        .map(|j| -0.5 * extent + j as f64 * dx)
        .collect();
    let dp = 2.0 * PI / extent;
    let half = n_points as i64 / 2;
    let p: Arc<[f64]> = (0..n_points as i64)
        .map(|j| {
            if j < half {
                j as f64 * dp
            } else {
                (j - n_points as i64) as f64 * dp
            }
        })
        .collect();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n_points);
    let inverse = planner.plan_fft_inverse(n_points);
    Ok(SpatialGrid {
        n_points,
        extent,
        dx,
        x,
        p,
        forward,
        inverse,
    })
}

impl SpatialGrid {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Momentum spacing `2π/L`.
    pub fn dp(&self) -> f64 {
        2.0 * PI / self.extent
    }

    /// Largest represented momentum magnitude `π/dx`.
    pub fn p_max(&self) -> f64 {
        PI / self.dx
    }

    pub fn positions(&self) -> &[f64] {
        &self.x
    }

    /// Momenta in FFT order.
    pub fn momenta(&self) -> &[f64] {
        &self.p
    }

    /// Momenta sorted ascending, paired with their FFT index.
    pub fn momenta_ascending(&self) -> Vec<(usize, f64)> {
        let half = self.n_points / 2;
        (half..self.n_points)
            .chain(0..half)
            .map(|j| (j, self.p[j]))
            .collect()
    }

    /// Index of the grid point closest to `x` (clamped to the grid).
    pub fn index_of(&self, x: f64) -> usize {
        let j = ((x + 0.5 * self.extent) / self.dx).round();
        j.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// In-place unnormalized forward transform `Σ_j f_j e^{−2πi jk/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// In-place inverse transform including the `1/n` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.n_points as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_cutoff() {
        let g = make_grid(1024, 40.0).unwrap();
        assert_eq!(g.dx(), 0.0390625);
        assert!((g.p_max() - 80.42477193189871).abs() < 1e-10);
        let g = make_grid(16, 16.0).unwrap();
        assert_eq!(g.dx(), 1.0);
        assert!((g.dp() - 0.39269908169872414).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(make_grid(1000, 40.0), Err(Error::Config(_))));
        assert!(make_grid(8, 40.0).is_err());
        assert!(make_grid(64, 0.0).is_err());
        assert!(make_grid(64, -1.0).is_err());
    }

    #[test]
    fn centered_and_sorted() {
        let g = make_grid(32, 8.0).unwrap();
        assert_eq!(g.positions()[16], 0.0);
        assert_eq!(g.positions()[0], -4.0);
        let sorted = g.momenta_ascending();
        assert!(sorted.windows(2).all(|w| w[0].1 < w[1].1));
        assert_eq!(sorted[16].1, 0.0);
        assert_eq!(g.index_of(0.1), 16);
    }

    #[test]
    fn fourier_round_trip() {
        let g = make_grid(256, 20.0).unwrap();
        let orig: Vec<Complex64> = (0..256)
            .map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos() * 0.5))
            .collect();
        let mut data = orig.clone();
        g.forward(&mut data);
        g.inverse(&mut data);
        let num: f64 = data
            .iter()
            .zip(&orig)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = orig.iter().map(|a| a.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-13);
    }
}

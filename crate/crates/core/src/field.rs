//! Spinor fields on a periodic grid and the initial-state builders.

use num_complex::Complex64;

use crate::analytic::{eigenspinor, Branch};
use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::params::{DiracParams, MassType};
use crate::spinor::{norm_sq as spinor_norm_sq, Spinor};

/// Limit on the normalized density at the outermost grid points for a
/// packet to count as fitting the grid.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-12;

/// Default bound on the Gaussian weight falling in the complex band
/// `|p| <= mc` for [`positive_energy_packet`].
pub const EXCLUDED_WEIGHT_LIMIT: f64 = 1e-8;

/// Two complex amplitudes `(ψ↑(x), ψ↓(x))` per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: SpatialGrid,
    up: Vec<Complex64>,
    down: Vec<Complex64>,
}

impl SpinorField {
    pub fn new(grid: SpatialGrid, up: Vec<Complex64>, down: Vec<Complex64>) -> Result<Self> {
        if up.len() != grid.n_points() || down.len() != grid.n_points() {
            return Err(Error::config("spinor components must match the grid size"));
        }
        Ok(Self { grid, up, down })
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        let n = grid.n_points();
        Self {
            grid,
            up: vec![Complex64::default(); n],
            down: vec![Complex64::default(); n],
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn up(&self) -> &[Complex64] {
        &self.up
    }

    pub fn down(&self) -> &[Complex64] {
        &self.down
    }

    pub(crate) fn components_mut(&mut self) -> (&mut [Complex64], &mut [Complex64]) {
        (&mut self.up, &mut self.down)
    }

    /// `Σ_x (|ψ↑|² + |ψ↓|²) dx`
    pub fn norm_sq(&self) -> f64 {
        let s: f64 = self
            .up
            .iter()
            .zip(&self.down)
            .map(|(u, d)| u.norm_sqr() + d.norm_sqr())
            .sum();
        s * self.grid.dx()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            up: self.up.iter().map(|v| v * factor).collect(),
            down: self.down.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::DegenerateState { norm_sq: n });
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    /// Normalized densities `(|ψ|², |ψ↑|², |ψ↓|²)` per grid point; each
    /// integrates (with `dx`) to the corresponding population.
    pub fn densities(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let n = self.norm_sq();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::DegenerateState { norm_sq: n });
        }
        let up: Vec<f64> = self.up.iter().map(|v| v.norm_sqr() / n).collect();
        let down: Vec<f64> = self.down.iter().map(|v| v.norm_sqr() / n).collect();
        let total = up.iter().zip(&down).map(|(a, b)| a + b).collect();
        Ok((total, up, down))
    }

    /// Largest normalized density among the two outermost points on each side.
    pub fn edge_density(&self) -> f64 {
        let n = self.norm_sq();
        let last = self.up.len() - 1;
        [0, 1, last - 1, last]
            .iter()
            .map(|&j| (self.up[j].norm_sqr() + self.down[j].norm_sqr()) / n)
            .fold(0.0, f64::max)
    }

    /// Momentum-space components in FFT order (unnormalized transform).
    pub fn to_momentum(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut u = self.up.clone();
        let mut d = self.down.clone();
        self.grid.forward(&mut u);
        self.grid.forward(&mut d);
        (u, d)
    }
}

/// `ψ(x) = N e^{i p_o x} e^{−x²/(4 width²)} · spinor`, normalized.
pub fn gaussian_packet(
    grid: &SpatialGrid,
    p_o: f64,
    width: f64,
    spinor: Spinor,
) -> Result<SpinorField> {
    gaussian_packet_at(grid, p_o, width, 0.0, spinor)
}

/// [`gaussian_packet`] centred at `center` instead of the origin.
pub fn gaussian_packet_at(
    grid: &SpatialGrid,
    p_o: f64,
    width: f64,
    center: f64,
    spinor: Spinor,
) -> Result<SpinorField> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::config(format!(
            "width must be positive, got {width}"
        )));
    }
    if (spinor_norm_sq(&spinor) - 1.0).abs() > 1e-12 {
        return Err(Error::config("spinor must be normalized"));
    }
    let (up, down): (Vec<_>, Vec<_>) = grid
        .positions()
        .iter()
        .map(|&x| {
            let y = x - center;
            let env = Complex64::from_polar((-y * y / (4.0 * width * width)).exp(), p_o * y);
            (env * spinor[0], env * spinor[1])
        })
        .unzip();
    finish_builder(
        SpinorField::new(grid.clone(), up, down)?,
        EDGE_DENSITY_LIMIT,
    )
}

fn finish_builder(field: SpinorField, edge_limit: f64) -> Result<SpinorField> {
    let field = field.normalized()?;
    let edge = field.edge_density();
    if edge > edge_limit {
        return Err(Error::DomainTooSmall {
            edge_density: edge,
            limit: edge_limit,
        });
    }
    Ok(field)
}

/// Superposition of positive-energy plane waves,
/// `ψ(x) ∝ Σ_p e^{−width²(p−p_o)²} e^{ip(x−center)} u₊(p)`,
/// summed over the grid momenta. For tachyons the complex band `|p| <= mc`
/// is left out; its Gaussian weight must stay below `max_excluded_weight`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositiveEnergyPacket {
    pub p_o: f64,
    pub width: f64,
    pub center: f64,
    pub max_excluded_weight: f64,
}

impl PositiveEnergyPacket {
    pub fn new(p_o: f64, width: f64) -> Self {
        Self {
            p_o,
            width,
            center: 0.0,
            max_excluded_weight: EXCLUDED_WEIGHT_LIMIT,
        }
    }

    pub fn centered_at(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn with_max_excluded_weight(mut self, limit: f64) -> Self {
        self.max_excluded_weight = limit;
        self
    }

    pub fn build(&self, grid: &SpatialGrid, params: &DiracParams) -> Result<SpinorField> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::config(format!(
                "width must be positive, got {}",
                self.width
            )));
        }
        let m = params.mass;
        let n = grid.n_points();
        let x0 = grid.positions()[0];
        let mut up = vec![Complex64::default(); n];
        let mut down = vec![Complex64::default(); n];
        let (mut kept, mut excluded) = (0.0, 0.0);
        for (j, &p) in grid.momenta().iter().enumerate() {
            let arg = self.width * (p - self.p_o);
            let amp = (-arg * arg).exp();
            if params.mass_type == MassType::Tachyon && p.abs() <= m {
                excluded += amp * amp;
                continue;
            }
            if amp == 0.0 {
                continue;
            }
            kept += amp * amp;
            let u = eigenspinor(p, params, Branch::Plus)?;
            // After the inverse FFT, index j carries e^{ip(x−x0)}; shift to e^{ip(x−center)}.
            let phase = Complex64::from_polar(amp, p * (x0 - self.center));
            up[j] = phase * u[0];
            down[j] = phase * u[1];
        }
        let weight = excluded / (kept + excluded);
        if weight > self.max_excluded_weight {
            return Err(Error::IllConditionedPacket {
                excluded_weight: weight,
                limit: self.max_excluded_weight,
            });
        }
        grid.inverse(&mut up);
        grid.inverse(&mut down);
        // A cut through the band edge leaves slowly decaying position tails
        // whose weight is of the order of the excluded weight.
        let edge_limit = EDGE_DENSITY_LIMIT.max(self.max_excluded_weight);
        finish_builder(SpinorField::new(grid.clone(), up, down)?, edge_limit)
    }
}

/// Positive-energy packet centred at the origin with the default
/// excluded-weight threshold.
pub fn positive_energy_packet(
    grid: &SpatialGrid,
    p_o: f64,
    width: f64,
    params: &DiracParams,
) -> Result<SpinorField> {
    PositiveEnergyPacket::new(p_o, width).build(grid, params)
}

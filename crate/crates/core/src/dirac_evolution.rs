//! Strang split-step spectral propagation of a [`SpinorField`].
//!
//! The position-diagonal generator `g x + M σz` (with `M = m c²` or
//! `−i m c²`) is applied as a pointwise exponential in half steps around the
//! exact momentum-space exponential of `c p σx`. No renormalization happens
//! while stepping: the raw norm is the post-selection probability.

use num_complex::Complex64;

use crate::analytic::dispersion;
use crate::error::{Error, Result};
use crate::field::{PositiveEnergyPacket, SpinorField};
use crate::grid::SpatialGrid;
use crate::observables::{observables, ObservableRecord, ObservableSeries};
use crate::params::{DiracParams, MassType};
use crate::spinor::mass_diagonal;

/// Bound on `dt · max|p| · c`.
pub const STABILITY_BOUND: f64 = 0.5;
/// Normalized edge density above which a boundary-wrap warning is recorded.
pub const WRAP_DENSITY_LIMIT: f64 = 1e-10;
/// Default time step for typical runs.
pub const DEFAULT_DT: f64 = 5e-4;
/// Fraction of the peak current at `x_cut` below which the scattered lobes
/// count as separated.
pub const SEPARATION_CURRENT_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Record observables every `sample_stride` steps.
    pub sample_stride: usize,
    /// Record density snapshots every `snapshot_stride` steps; 0 disables them.
    pub snapshot_stride: usize,
    pub params: DiracParams,
}

impl EvolutionConfig {
    pub fn new(params: DiracParams, t_final: f64) -> Self {
        Self {
            dt: DEFAULT_DT,
            t_final,
            sample_stride: 20,
            snapshot_stride: 0,
            params,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_sample_stride(mut self, stride: usize) -> Self {
        self.sample_stride = stride;
        self
    }

    pub fn with_snapshot_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn validate(&self, grid: &SpatialGrid) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::config(format!(
                "t_final must be >= 0, got {}",
                self.t_final
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::config("sample_stride must be >= 1"));
        }
        let bound = self.dt * grid.p_max();
        if bound >= STABILITY_BOUND {
            return Err(Error::Stability(format!(
                "dt·p_max = {bound:.4} must stay below {STABILITY_BOUND}"
            )));
        }
        Ok(())
    }
}

/// Normalized densities on the grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub density: Vec<f64>,
    pub up: Vec<f64>,
    pub down: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryWarning {
    pub first_time: f64,
    pub max_edge_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub series: ObservableSeries,
    pub snapshots: Vec<Snapshot>,
    pub boundary_warning: Option<BoundaryWarning>,
    pub final_field: SpinorField,
}

/// Precomputed split-step factors for one grid and configuration.
pub(crate) struct Stepper {
    half_up: Vec<Complex64>,
    half_down: Vec<Complex64>,
    kin_cos: Vec<f64>,
    kin_sin: Vec<Complex64>,
}

impl Stepper {
    pub(crate) fn new(grid: &SpatialGrid, config: &EvolutionConfig) -> Result<Self> {
        config.validate(grid)?;
        let dt = config.dt;
        let [m_up, m_down] = mass_diagonal(&config.params);
        let g = config.params.potential_slope;
        let minus_i_half_dt = Complex64::new(0.0, -0.5 * dt);
        let (half_up, half_down) = grid
            .positions()
            .iter()
            .map(|&x| {
                let v = Complex64::new(g * x, 0.0);
                (
                    (minus_i_half_dt * (v + m_up)).exp(),
                    (minus_i_half_dt * (v + m_down)).exp(),
                )
            })
            .unzip();
        let kin_cos = grid.momenta().iter().map(|&p| (p * dt).cos()).collect();
        let kin_sin = grid
            .momenta()
            .iter()
            .map(|&p| Complex64::new(0.0, -(p * dt).sin()))
            .collect();
        Ok(Self {
            half_up,
            half_down,
            kin_cos,
            kin_sin,
        })
    }

    pub(crate) fn advance(&self, field: &mut SpinorField) {
        let grid = field.grid().clone();
        let (up, down) = field.components_mut();
        self.apply_half(up, down);
        grid.forward(up);
        grid.forward(down);
        for j in 0..up.len() {
            let (u, d) = (up[j], down[j]);
            let (c, s) = (self.kin_cos[j], self.kin_sin[j]);
            up[j] = u * c + d * s;
            down[j] = u * s + d * c;
        }
        grid.inverse(up);
        grid.inverse(down);
        self.apply_half(up, down);
    }

    fn apply_half(&self, up: &mut [Complex64], down: &mut [Complex64]) {
        for (v, f) in up.iter_mut().zip(&self.half_up) {
            *v *= f;
        }
        for (v, f) in down.iter_mut().zip(&self.half_down) {
            *v *= f;
        }
    }
}

/// One Strang step of length `config.dt`.
pub fn step(field: &SpinorField, config: &EvolutionConfig) -> Result<SpinorField> {
    let stepper = Stepper::new(field.grid(), config)?;
    let mut out = field.clone();
    stepper.advance(&mut out);
    Ok(out)
}

fn snapshot(field: &SpinorField, time: f64) -> Result<Snapshot> {
    let (density, up, down) = field.densities()?;
    Ok(Snapshot {
        time,
        density,
        up,
        down,
    })
}

/// Steps `field` to `config.t_final`, sampling observables (t = 0 included)
/// and optional density snapshots.
pub fn evolve(field: &SpinorField, config: &EvolutionConfig) -> Result<EvolutionResult> {
    evolve_until(field, config, |_, _| false).map(|(result, _)| result)
}

/// Like [`evolve`] but stops after the first sample for which `stop`
/// returns true. Returns whether the stop condition fired.
fn evolve_until<F>(
    field: &SpinorField,
    config: &EvolutionConfig,
    mut stop: F,
) -> Result<(EvolutionResult, bool)>
where
    F: FnMut(&SpinorField, &ObservableRecord) -> bool,
{
    let stepper = Stepper::new(field.grid(), config)?;
    let n_steps = config.n_steps();
    let mut state = field.clone();
    let mut series = Vec::with_capacity(n_steps / config.sample_stride + 2);
    let mut snapshots = Vec::new();
    let mut warning: Option<BoundaryWarning> = None;
    let mut stopped = false;
    for k in 0..=n_steps {
        let t = k as f64 * config.dt;
        let sample = k % config.sample_stride == 0 || k == n_steps;
        if sample {
            let record = observables(&state)?.with_time(t);
            let edge = state.edge_density();
            if edge > WRAP_DENSITY_LIMIT {
                let w = warning.get_or_insert(BoundaryWarning {
                    first_time: t,
                    max_edge_density: edge,
                });
                w.max_edge_density = w.max_edge_density.max(edge);
            }
            series.push(record);
            if stop(&state, &record) {
                stopped = true;
            }
        }
        if config.snapshot_stride > 0 && (k % config.snapshot_stride == 0 || (stopped && sample)) {
            snapshots.push(snapshot(&state, t)?);
        }
        if stopped || k == n_steps {
            break;
        }
        stepper.advance(&mut state);
    }
    Ok((
        EvolutionResult {
            series,
            snapshots,
            boundary_warning: warning,
            final_field: state,
        },
        stopped,
    ))
}

/// Central-difference velocities `d⟨x⟩/dt` at interior samples.
pub fn velocities(series: &[ObservableRecord]) -> Vec<(f64, f64)> {
    series
        .windows(3)
        .map(|w| {
            (
                w[1].time,
                (w[2].mean_x - w[0].mean_x) / (w[2].time - w[0].time),
            )
        })
        .collect()
}

/// Right-hand side of the velocity law,
/// `c⟨σx⟩ − 2mc²(⟨xσz⟩ − ⟨x⟩⟨σz⟩)` for tachyons and `c⟨σx⟩` otherwise.
pub fn velocity_law(record: &ObservableRecord, params: &DiracParams) -> f64 {
    match params.mass_type {
        MassType::Normal => record.mean_sigma_x,
        MassType::Tachyon => record.mean_sigma_x - 2.0 * params.mass * record.correlation_xz,
    }
}

/// Largest sample spacing accepted by [`velocity_residual`].
pub const MAX_RESIDUAL_SPACING: f64 = 0.01;

/// Max over interior samples of `|d⟨x⟩/dt − velocity_law|`.
pub fn velocity_residual(series: &[ObservableRecord], params: &DiracParams) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "velocity residual needs >= 3 samples, got {}",
            series.len()
        )));
    }
    let mut worst = 0.0f64;
    for w in series.windows(3) {
        let h = w[2].time - w[1].time;
        if h > MAX_RESIDUAL_SPACING * (1.0 + 1e-9) {
            return Err(Error::InsufficientData(format!(
                "sample spacing {h} exceeds {MAX_RESIDUAL_SPACING}"
            )));
        }
        let v = (w[2].mean_x - w[0].mean_x) / (w[2].time - w[0].time);
        worst = worst.max((v - velocity_law(&w[1], params)).abs());
    }
    Ok(worst)
}

/// Least-squares slope of `⟨x⟩(t)` over samples with `t_from <= t <= t_to`.
pub fn fitted_slope(series: &[ObservableRecord], t_from: f64, t_to: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|r| r.time >= t_from - 1e-12 && r.time <= t_to + 1e-12)
        .map(|r| (r.time, r.mean_x))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData(
            "slope window holds fewer than 2 samples".into(),
        ));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mx = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mx)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    Ok(sxy / sxx)
}

/// Late-time drift velocity: least-squares slope over the last three
/// quarters of the run.
pub fn late_time_slope(series: &[ObservableRecord]) -> Result<f64> {
    let t_end = series.last().map(|r| r.time).unwrap_or(0.0);
    fitted_slope(series, 0.25 * t_end, t_end)
}

/// First sampled time after t = 0 at which `⟨x⟩ − ⟨x⟩(0) > c t`.
pub fn light_cone_crossing(series: &[ObservableRecord]) -> Option<f64> {
    let x0 = series.first()?.mean_x;
    series
        .iter()
        .skip(1)
        .find(|r| r.mean_x - x0 > r.time)
        .map(|r| r.time)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringOutcome {
    pub result: EvolutionResult,
    /// Renormalized weight right of `x_cut` once the lobes separated.
    pub tunneled: f64,
    pub reflected: f64,
    pub x_cut: f64,
    pub separation_time: f64,
}

/// Scatters a positive-energy packet of mean momentum `p_o` off the linear
/// potential `g x` (`g = config.params.potential_slope`).
///
/// The packet starts at `x = −E(p_o)/g` so that its classical turning point
/// `x_cut` sits at the origin. Evolution stops once the probability current
/// through `x_cut` has dropped below [`SEPARATION_CURRENT_RATIO`] of its
/// peak; the weight beyond `x_cut` is then the tunneled fraction.
pub fn scattering_run(
    grid: &SpatialGrid,
    p_o: f64,
    width: f64,
    config: &EvolutionConfig,
) -> Result<ScatteringOutcome> {
    let params = config.params;
    let g = params.potential_slope;
    if !(g > 0.0) {
        return Err(Error::config("scattering needs a positive potential slope"));
    }
    if !(p_o > 0.0) {
        return Err(Error::config(
            "scattering needs an incoming momentum p_o > 0",
        ));
    }
    let energy = dispersion(p_o, &params);
    if !energy.is_real {
        return Err(Error::ComplexBand {
            p: p_o,
            mass: params.mass,
        });
    }
    let x_cut = 0.0;
    let start = x_cut - energy.plus.re / g;
    if start <= grid.positions()[0] + 6.0 * width {
        return Err(Error::config(format!(
            "packet start {start:.3} does not fit the grid; enlarge extent or increase g"
        )));
    }
    let incoming = PositiveEnergyPacket::new(p_o, width)
        .centered_at(start)
        .build(grid, &params)?;
    let j_cut = grid.index_of(x_cut);
    let mut peak = 0.0f64;
    let mut last_ratio = 1.0;
    let (result, separated) = evolve_until(&incoming, config, |field, record| {
        let c = field.up()[j_cut].conj() * field.down()[j_cut];
        let current = (2.0 * c.re / record.norm_sq).abs();
        peak = peak.max(current);
        last_ratio = if peak > 0.0 { current / peak } else { 1.0 };
        peak > 0.0 && current < SEPARATION_CURRENT_RATIO * peak
    })?;
    if !separated {
        return Err(Error::InconclusiveScattering {
            t_final: config.t_final,
            current_ratio: last_ratio,
        });
    }
    let (density, _, _) = result.final_field.densities()?;
    let total: f64 = density.iter().sum();
    let right: f64 = grid
        .positions()
        .iter()
        .zip(&density)
        .filter(|(&x, _)| x > x_cut)
        .map(|(_, d)| d)
        .sum();
    let tunneled = right / total;
    let separation_time = result.series.last().map(|r| r.time).unwrap_or(0.0);
    Ok(ScatteringOutcome {
        result,
        tunneled,
        reflected: 1.0 - tunneled,
        x_cut,
        separation_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian_packet;
    use crate::grid::make_grid;
    use crate::spinor::spinor;

    #[test]
    fn massless_plane_wave_is_transported_exactly() {
        let grid = make_grid(64, 2.0 * std::f64::consts::PI).unwrap();
        let p = 3.0;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (up, down): (Vec<_>, Vec<_>) = grid
            .positions()
            .iter()
            .map(|&x| {
                let v = Complex64::from_polar(s, p * x);
                (v, v)
            })
            .unzip();
        let field = SpinorField::new(grid.clone(), up, down).unwrap();
        let config = EvolutionConfig::new(DiracParams::tachyon(0.0), 0.0).with_dt(0.01);
        let next = step(&field, &config).unwrap();
        let phase = Complex64::from_polar(1.0, -p * 0.01);
        for (a, b) in next.up().iter().zip(field.up()) {
            assert!((a - b * phase).norm() < 1e-13);
        }
    }

    #[test]
    fn normal_step_is_unitary() {
        let grid = make_grid(256, 40.0).unwrap();
        let field = gaussian_packet(&grid, 2.0, 1.0, spinor(1.0, 0.0)).unwrap();
        let config =
            EvolutionConfig::new(DiracParams::normal(1.5).with_slope(0.7), 0.0).with_dt(0.01);
        let next = step(&field, &config).unwrap();
        assert!((next.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tachyon_norm_change_is_bounded() {
        let grid = make_grid(256, 40.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let field = gaussian_packet(&grid, 2.0, 1.0, spinor(s, s)).unwrap();
        let m = 2.0;
        let dt = 0.01;
        let next = step(
            &field,
            &EvolutionConfig::new(DiracParams::tachyon(m), 0.0).with_dt(dt),
        )
        .unwrap();
        let ratio = next.norm_sq() / field.norm_sq();
        assert!(ratio >= (-2.0 * m * dt).exp() && ratio <= (2.0 * m * dt).exp());
    }

    #[test]
    fn stability_bound_is_enforced() {
        let grid = make_grid(1024, 40.0).unwrap();
        let field = gaussian_packet(&grid, 0.0, 1.0, spinor(1.0, 0.0)).unwrap();
        let config = EvolutionConfig::new(DiracParams::normal(1.0), 1.0).with_dt(0.01);
        assert!(matches!(step(&field, &config), Err(Error::Stability(_))));
    }

    #[test]
    fn residual_needs_three_samples() {
        let r = ObservableRecord::default();
        assert!(matches!(
            velocity_residual(&[r, r], &DiracParams::normal(1.0)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn slope_of_a_line() {
        let series: Vec<_> = (0..50)
            .map(|k| ObservableRecord {
                time: k as f64 * 0.1,
                mean_x: 0.3 + 1.7 * k as f64 * 0.1,
                ..Default::default()
            })
            .collect();
        assert!((late_time_slope(&series).unwrap() - 1.7).abs() < 1e-12);
        assert_eq!(light_cone_crossing(&series), Some(0.1));
    }
}

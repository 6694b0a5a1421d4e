//! Momentum-space reduction of scattering off a linear potential.
//!
//! In the frame comoving with the force, a plane-wave component sees the
//! two-level Hamiltonian `(p_start − g t) σx + M σz` with `M = m` or `−i m`,
//! swept from `p_start > 0` to `p_end < 0`. Branch populations at the end of
//! the sweep give the reflected (plus) and tunneled (minus) weights.

use num_complex::Complex64;

use crate::analytic::{dispersion, eigenspinor, Branch};
use crate::error::{Error, Result};
use crate::params::DiracParams;
use crate::spinor::{hamiltonian, mat_vec, norm_sq, Spinor};

/// Ramp endpoints are at least this multiple of `max(1, m)`.
pub const RAMP_MASS_MULTIPLE: f64 = 8.0;
/// Residual oscillation of the populations at the ramp ends decays like
/// `g m / (2 p³)`; the default ramp keeps it below `1 / (2 · this)`.
pub const RAMP_TAIL_FACTOR: f64 = 2000.0;
/// RK4 step in units of `1 / max|E|` over the ramp.
pub const STEP_FRACTION: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LZConfig {
    pub p_start: f64,
    pub p_end: f64,
    pub g: f64,
    pub params: DiracParams,
    pub dt: f64,
}

impl LZConfig {
    /// Symmetric ramp `±p` with the default step for that ramp.
    pub fn symmetric(params: DiracParams, g: f64, p: f64) -> Self {
        let e_max = dispersion(p, &params).plus.norm().max(1.0);
        Self {
            p_start: p,
            p_end: -p,
            g,
            params,
            dt: STEP_FRACTION / e_max,
        }
    }

    /// Symmetric ramp long enough for the asymptotic populations to settle
    /// to ~1e-4: `|p| = max(8 max(1, m), (2000 g m)^{1/3})`.
    pub fn standard(params: DiracParams, g: f64) -> Self {
        let m = params.mass;
        let p = (RAMP_MASS_MULTIPLE * m.max(1.0)).max((RAMP_TAIL_FACTOR * g * m).cbrt());
        Self::symmetric(params, g, p)
    }

    /// Same config with both endpoints scaled by `factor`.
    pub fn extended(&self, factor: f64) -> Self {
        let mut c = Self::symmetric(self.params, self.g, self.p_start * factor);
        c.p_end = self.p_end * factor;
        c
    }

    pub fn duration(&self) -> f64 {
        (self.p_start - self.p_end) / self.g
    }

    fn validate(&self) -> Result<()> {
        let m = if self.params.is_tachyon() {
            self.params.mass
        } else {
            0.0
        };
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::config(format!(
                "ramp rate g must be positive, got {}",
                self.g
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.p_start > m) || !(self.p_end < -m) {
            return Err(Error::config(format!(
                "ramp [{}, {}] must start above {m} and end below {}",
                self.p_start, self.p_end, -m
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState {
    pub amplitudes: Spinor,
    pub time: f64,
    pub instantaneous_p: f64,
}

impl TwoLevelState {
    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amplitudes)
    }
}

fn derivative(p: f64, params: &DiracParams, v: &Spinor) -> Spinor {
    let hv = mat_vec(&hamiltonian(p, params), v);
    let minus_i = Complex64::new(0.0, -1.0);
    [minus_i * hv[0], minus_i * hv[1]]
}

fn axpy(a: &Spinor, s: f64, b: &Spinor) -> Spinor {
    [a[0] + b[0] * s, a[1] + b[1] * s]
}

/// Integrates `i dξ/dt = H(p_start − g t) ξ` from the requested eigenspinor
/// at `p_start` to `p_end` with classical RK4.
pub fn lz_evolve(config: &LZConfig, initial_branch: Branch) -> Result<TwoLevelState> {
    config.validate()?;
    let params = config.params;
    let duration = config.duration();
    let n = (duration / config.dt).ceil().max(1.0) as usize;
    let h = duration / n as f64;
    let mut xi = eigenspinor(config.p_start, &params, initial_branch)?;
    let p_at = |t: f64| config.p_start - config.g * t;
    for k in 0..n {
        let t = k as f64 * h;
        let k1 = derivative(p_at(t), &params, &xi);
        let k2 = derivative(p_at(t + 0.5 * h), &params, &axpy(&xi, 0.5 * h, &k1));
        let k3 = derivative(p_at(t + 0.5 * h), &params, &axpy(&xi, 0.5 * h, &k2));
        let k4 = derivative(p_at(t + h), &params, &axpy(&xi, h, &k3));
        for i in 0..2 {
            xi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    Ok(TwoLevelState {
        amplitudes: xi,
        time: duration,
        instantaneous_p: config.p_end,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPopulations {
    pub plus: f64,
    pub minus: f64,
}

/// Biorthogonal branch decomposition `ξ = c₊R₊ + c₋R₋`.
///
/// `H(p)` is complex symmetric, so the left eigenvectors are `R_iᵀ` and
/// `c_i = R_iᵀξ / R_iᵀR_i`. With unit right vectors the weights are `|c_i|²`,
/// normalized to sum to one. For a Hermitian `H` this is the orthogonal
/// projection.
pub fn branch_populations(
    state: &TwoLevelState,
    params: &DiracParams,
) -> Result<BranchPopulations> {
    let p = state.instantaneous_p;
    if !dispersion(p, params).is_real {
        return Err(Error::ComplexBand {
            p,
            mass: params.mass,
        });
    }
    let xi = &state.amplitudes;
    let weight = |branch| -> Result<f64> {
        let r: Spinor = eigenspinor(p, params, branch)?;
        let c = (r[0] * xi[0] + r[1] * xi[1]) / (r[0] * r[0] + r[1] * r[1]);
        Ok(c.norm_sqr())
    };
    let (wp, wm) = (weight(Branch::Plus)?, weight(Branch::Minus)?);
    let total = wp + wm;
    if !(total > 0.0) {
        return Err(Error::DegenerateState {
            norm_sq: state.norm_sq(),
        });
    }
    Ok(BranchPopulations {
        plus: wp / total,
        minus: wm / total,
    })
}

/// Population transferred to the minus branch for a system prepared on the
/// plus branch: the transmitted weight of the scattering problem.
pub fn lz_tunnel_probability(config: &LZConfig) -> Result<f64> {
    let state = lz_evolve(config, Branch::Plus)?;
    Ok(branch_populations(&state, &config.params)?.minus)
}

/// Change in the tunneling probability when both ramp endpoints are doubled.
pub fn endpoint_sensitivity(config: &LZConfig) -> Result<f64> {
    Ok(lz_tunnel_probability(&config.extended(2.0))? - lz_tunnel_probability(config)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_at(p: f64, amplitudes: Spinor) -> TwoLevelState {
        TwoLevelState {
            amplitudes,
            time: 0.0,
            instantaneous_p: p,
        }
    }

    #[test]
    fn massless_sweep_keeps_sigma_x_state() {
        let config = LZConfig::symmetric(DiracParams::normal(0.0), 2.0, 8.0);
        let s = lz_evolve(&config, Branch::Plus).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let overlap = (s.amplitudes[0] + s.amplitudes[1]) * h;
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
        assert!((lz_tunnel_probability(&config).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn normal_sweep_is_unitary() {
        let config = LZConfig::symmetric(DiracParams::normal(1.0), 2.0, 8.0);
        let s = lz_evolve(&config, Branch::Plus).unwrap();
        assert!((s.norm_sq() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tachyon_sweep_changes_norm() {
        let config = LZConfig::symmetric(DiracParams::tachyon(1.0), 2.0, 8.0);
        let n = lz_evolve(&config, Branch::Plus).unwrap().norm_sq();
        assert!(n.is_finite() && n > 0.0 && (n - 1.0).abs() > 0.1);
    }

    #[test]
    fn ramp_must_leave_the_band() {
        let mut config = LZConfig::symmetric(DiracParams::tachyon(1.0), 2.0, 8.0);
        config.p_end = -0.5;
        assert!(matches!(
            lz_evolve(&config, Branch::Plus),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn pure_branch_populations() {
        for params in [DiracParams::normal(1.0), DiracParams::tachyon(1.0)] {
            let r = eigenspinor(3.0, &params, Branch::Plus).unwrap();
            let pops = branch_populations(&state_at(3.0, r), &params).unwrap();
            assert!((pops.plus - 1.0).abs() < 1e-12 && pops.minus.abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_populations_are_projections() {
        let params = DiracParams::normal(0.7);
        let xi = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.9)];
        let pops = branch_populations(&state_at(1.3, xi), &params).unwrap();
        let r = eigenspinor(1.3, &params, Branch::Plus).unwrap();
        let proj = (r[0].conj() * xi[0] + r[1].conj() * xi[1]).norm_sqr() / norm_sq(&xi);
        assert!((pops.plus - proj).abs() < 1e-12);
    }

    #[test]
    fn equal_superposition_splits_evenly() {
        let params = DiracParams::normal(1.0);
        let p = 1e4;
        let a = eigenspinor(p, &params, Branch::Plus).unwrap();
        let b = eigenspinor(p, &params, Branch::Minus).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let xi = [(a[0] + b[0]) * s, (a[1] + b[1]) * s];
        let pops = branch_populations(&state_at(p, xi), &params).unwrap();
        assert!((pops.plus - 0.5).abs() < 1e-10);
    }
}

//! Trapped-ion realization: spinor ⊗ Fock-space states driven on both
//! motional sidebands, post-selected against decay out of the qubit
//! manifold.
//!
//! Frequencies in [`IonParams`] may be in any consistent angular unit;
//! simulation times are in the reciprocal unit. [`IonParams::to_natural`]
//! rescales to the Dirac units (`Δ = c = 1`, time unit `Δ/c`), where
//! positions come out in units of `Δ` and the drive realizes `p σx` with
//! `c = 1`.

mod evolution;
mod hamiltonian;
mod protocol;
mod state;
mod trajectories;

pub use evolution::{
    align_record, evolve_conditioned, max_dt, sigma_z_form_norm, spinor_alignment, ConditionedRun,
    IonRun,
};
pub use hamiltonian::{drive_tones, sideband_hamiltonian, Tone};
pub use protocol::{measure_correlation_protocol, CorrelationEstimate, PROTOCOL_REGIME_LIMIT};
pub use state::{IonState, TRUNCATION_LIMIT};
pub use trajectories::{
    run_trajectories, JumpChannel, JumpRecord, TrajectoryEnsemble, TrajectoryRecord,
};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::{DiracParams, MassType};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Lamb-Dicke parameters above this are flagged.
pub const LAMB_DICKE_WARNING: f64 = 0.2;
/// Pumping-error rate as a fraction of the decay rate for ¹⁷¹Yb⁺.
pub const YB_BRANCHING_RATIO: f64 = 0.002;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonParams {
    /// Lamb-Dicke parameter.
    pub eta: f64,
    /// Carrier Rabi frequency Ω̃.
    pub omega_tilde: f64,
    /// Trap frequency ν.
    pub nu: f64,
    /// Mass detuning Ω: the two sideband tones sit at `±ν − 2Ω`, which gives
    /// `+Ω σz` in the frame rotating with `e^{−iΩ t σz}`.
    pub delta: f64,
    /// Laser phase φ; `sin φ = 0` removes the carrier.
    pub phi: f64,
    /// Decay rate γ of |↑⟩ out of the manifold.
    pub gamma: f64,
    /// Rate γ_d of pumping errors that return to |↑⟩.
    pub gamma_d: f64,
    /// Ground-state size Δ.
    pub delta_x: f64,
    /// Fock cutoff.
    pub n_max: usize,
    /// Probability of reading a decayed ion correctly.
    pub readout_fidelity: f64,
}

impl Default for IonParams {
    /// ¹⁷¹Yb⁺ numbers in SI: η = 0.05, Δ = 3.4 nm, Ω̃ = 2π·100 kHz,
    /// ν = 2π·1 MHz, γ = 2π·80 kHz.
    fn default() -> Self {
        let gamma = 2.0 * PI * 80e3;
        Self {
            eta: 0.05,
            omega_tilde: 2.0 * PI * 100e3,
            nu: 2.0 * PI * 1e6,
            delta: 0.0,
            phi: 0.0,
            gamma,
            gamma_d: YB_BRANCHING_RATIO * gamma,
            delta_x: 3.4e-9,
            n_max: 128,
            readout_fidelity: 1.0,
        }
    }
}

impl IonParams {
    /// Sets γ and the default pumping-error rate `0.002 γ`.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self.gamma_d = YB_BRANCHING_RATIO * gamma;
        self
    }

    /// Effective time unit `Δ/c = 1 / (2ηΩ̃)`.
    pub fn time_unit(&self) -> f64 {
        1.0 / (2.0 * self.eta * self.omega_tilde)
    }

    pub fn speed_of_light(&self) -> f64 {
        2.0 * self.eta * self.delta_x * self.omega_tilde
    }

    /// Same physics with frequencies in units of `c/Δ` and `Δ = 1`.
    pub fn to_natural(&self) -> Self {
        let t = self.time_unit();
        Self {
            omega_tilde: self.omega_tilde * t,
            nu: self.nu * t,
            delta: self.delta * t,
            gamma: self.gamma * t,
            gamma_d: self.gamma_d * t,
            delta_x: 1.0,
            ..*self
        }
    }

    pub fn lamb_dicke_warning(&self) -> bool {
        self.eta > LAMB_DICKE_WARNING
    }

    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::config(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if !(self.omega_tilde > 0.0 && self.omega_tilde.is_finite()) {
            return Err(Error::config("omega_tilde must be positive"));
        }
        if !(self.delta_x > 0.0 && self.delta_x.is_finite()) {
            return Err(Error::config("delta_x must be positive"));
        }
        if !finite_nonneg(self.nu) || !finite_nonneg(self.gamma) || !finite_nonneg(self.gamma_d) {
            return Err(Error::config(
                "nu, gamma and gamma_d must be finite and >= 0",
            ));
        }
        if !self.delta.is_finite() || !self.phi.is_finite() {
            return Err(Error::config("delta and phi must be finite"));
        }
        if self.n_max < 2 {
            return Err(Error::config("n_max must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.readout_fidelity) {
            return Err(Error::config("readout_fidelity must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassSource {
    /// `m c² = Ω`, real mass.
    Detuning,
    /// `m c² = γ/4`, imaginary mass.
    Decay,
}

/// Dirac parameters realized by an ion in the ideal (rotating-wave) limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealMapping {
    /// Mass in units of `1/(cΔ)`.
    pub dirac: DiracParams,
    /// `c = 2ηΔΩ̃`, in the length and time units of `params`.
    pub speed_of_light: f64,
    /// `Δ/c`.
    pub time_unit: f64,
    /// Rest energy `m c²` as an angular frequency.
    pub rest_frequency: f64,
    /// `m = ħ Ω_m / c²`; meaningful when `params` is in SI.
    pub mass_si: f64,
}

pub fn ideal_mapping(params: &IonParams, source: MassSource) -> IdealMapping {
    let (rest_frequency, mass_type) = match source {
        MassSource::Detuning => (params.delta.abs(), MassType::Normal),
        MassSource::Decay => (params.gamma / 4.0, MassType::Tachyon),
    };
    let c = params.speed_of_light();
    let time_unit = params.time_unit();
    IdealMapping {
        dirac: DiracParams {
            mass: rest_frequency * time_unit,
            mass_type,
            potential_slope: 0.0,
        },
        speed_of_light: c,
        time_unit,
        rest_frequency,
        mass_si: HBAR * rest_frequency / (c * c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ytterbium_scales() {
        let p = IonParams::default();
        let map = ideal_mapping(&p, MassSource::Decay);
        // One significant figure: 2×10⁻⁴ m/s.
        assert!((map.speed_of_light / 2e-4 - 1.0).abs() < 0.25);
        assert!((map.speed_of_light - 2.136e-4).abs() < 1e-7);
        assert!((map.time_unit / 16e-6 - 1.0).abs() < 0.01);
        assert!((map.dirac.mass - 2.0).abs() < 0.04);
        assert_eq!(map.dirac.mass_type, MassType::Tachyon);
    }

    #[test]
    fn massless_without_decay() {
        let map = ideal_mapping(&IonParams::default().with_gamma(0.0), MassSource::Decay);
        assert_eq!(map.dirac.mass, 0.0);
    }

    #[test]
    fn natural_units() {
        let n = IonParams::default().to_natural();
        assert!((n.eta * n.omega_tilde - 0.5).abs() < 1e-12);
        assert!((n.nu - 100.0).abs() < 1e-9);
        assert!((n.gamma - 8.0).abs() < 1e-9);
        assert!((n.time_unit() - 1.0).abs() < 1e-12);
        assert!((n.gamma_d / n.gamma - 0.002).abs() < 1e-15);
    }
}

use crate::error::{Error, Result};

/// SI scales behind the natural units ħ = c = Δ = 1.
///
/// Solvers never see these; they exist so front ends can display lengths
/// in meters and times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalUnits {
    /// Ground-state size Δ in meters.
    pub length_unit: f64,
    /// Δ/c in seconds.
    pub time_unit: f64,
}

impl NaturalUnits {
    pub fn new(length_unit: f64, time_unit: f64) -> Result<Self> {
        if !(length_unit > 0.0
            && length_unit.is_finite()
            && time_unit > 0.0
            && time_unit.is_finite())
        {
            return Err(Error::config("natural units must be positive and finite"));
        }
        Ok(Self {
            length_unit,
            time_unit,
        })
    }

    /// Effective speed of light Δ/(Δ/c) in m/s.
    pub fn speed_of_light(&self) -> f64 {
        self.length_unit / self.time_unit
    }

    pub fn time_to_si(&self, t_prime: f64) -> f64 {
        t_prime * self.time_unit
    }

    pub fn time_from_si(&self, seconds: f64) -> f64 {
        seconds / self.time_unit
    }

    pub fn length_to_si(&self, x_prime: f64) -> f64 {
        x_prime * self.length_unit
    }

    pub fn length_from_si(&self, meters: f64) -> f64 {
        meters / self.length_unit
    }

    /// Dimensionless mass m′ from a rest energy given as an angular
    /// frequency `m c²/ħ` in rad/s.
    pub fn mass_from_rest_frequency(&self, rest_frequency: f64) -> f64 {
        rest_frequency * self.time_unit
    }

    /// Angular frequency (rad/s) to natural units.
    pub fn frequency_from_si(&self, angular: f64) -> f64 {
        angular * self.time_unit
    }
}

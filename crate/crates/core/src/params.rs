use crate::error::{Error, Result};

/// Real mass (ordinary Dirac particle) or imaginary mass (tachyon).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MassType {
    /// `H = c p σx + m c² σz`
    Normal,
    /// `H = c p σx − i m c² σz`
    Tachyon,
}

impl MassType {
    pub fn as_str(self) -> &'static str {
        match self {
            MassType::Normal => "normal",
            MassType::Tachyon => "tachyon",
        }
    }
}

impl std::str::FromStr for MassType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" => Ok(MassType::Normal),
            "tachyon" => Ok(MassType::Tachyon),
            other => Err(Error::config(format!(
                "unknown mass_type '{other}' (expected normal|tachyon)"
            ))),
        }
    }
}

impl std::fmt::Display for MassType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of the 1+1D Dirac Hamiltonian in natural units (c = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracParams {
    /// Mass magnitude in units of `1/(cΔ)`.
    pub mass: f64,
    pub mass_type: MassType,
    /// Slope `g` of the electric potential `g x`, in units of `c/Δ²`.
    pub potential_slope: f64,
}

impl DiracParams {
    pub fn new(mass: f64, mass_type: MassType, potential_slope: f64) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::config(format!(
                "mass must be finite and >= 0, got {mass}"
            )));
        }
        if !(potential_slope.is_finite() && potential_slope >= 0.0) {
            return Err(Error::config(format!(
                "potential slope must be finite and >= 0, got {potential_slope}"
            )));
        }
        Ok(Self {
            mass,
            mass_type,
            potential_slope,
        })
    }

    pub fn normal(mass: f64) -> Self {
        Self {
            mass,
            mass_type: MassType::Normal,
            potential_slope: 0.0,
        }
    }

    pub fn tachyon(mass: f64) -> Self {
        Self {
            mass,
            mass_type: MassType::Tachyon,
            potential_slope: 0.0,
        }
    }

    pub fn with_slope(mut self, g: f64) -> Self {
        self.potential_slope = g;
        self
    }

    /// Rest-energy scale `m c²` (equal to `mass` for c = 1).
    pub fn rest_energy(&self) -> f64 {
        self.mass
    }

    pub fn is_tachyon(&self) -> bool {
        self.mass_type == MassType::Tachyon
    }
}

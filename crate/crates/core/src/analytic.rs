//! Closed-form results for the 2×2 Dirac Hamiltonians.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{DiracParams, MassType};
use crate::spinor::{hamiltonian, Spinor};

/// `|p² − m²c²|` below which a tachyon Hamiltonian is treated as defective.
pub const EXCEPTIONAL_POINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Both eigenvalues of `H(p)`. Inside the tachyon complex band the pair is
/// `±i√(m²c⁴ − p²c²)` with `plus` on the positive imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchEnergy {
    pub plus: Complex64,
    pub minus: Complex64,
    pub is_real: bool,
}

pub fn dispersion(p: f64, params: &DiracParams) -> BranchEnergy {
    let m = params.mass;
    let radicand = match params.mass_type {
        MassType::Normal => p * p + m * m,
        MassType::Tachyon => p * p - m * m,
    };
    let plus = if radicand >= 0.0 {
        Complex64::new(radicand.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-radicand).sqrt())
    };
    BranchEnergy {
        plus,
        minus: -plus,
        is_real: radicand >= 0.0,
    }
}

fn is_exceptional(p: f64, params: &DiracParams) -> bool {
    params.mass_type == MassType::Tachyon
        && params.mass > 0.0
        && (p * p - params.mass * params.mass).abs() < EXCEPTIONAL_POINT_TOLERANCE
}

/// Right eigenvector of `H(p)` on the requested branch, normalized, with the
/// first component real and nonnegative (second component real and positive
/// when the first vanishes).
pub fn eigenspinor(p: f64, params: &DiracParams, branch: Branch) -> Result<Spinor> {
    if is_exceptional(p, params) {
        return Err(Error::ExceptionalPoint { p });
    }
    let energy = dispersion(p, params);
    let e = match branch {
        Branch::Plus => energy.plus,
        Branch::Minus => energy.minus,
    };
    let h = hamiltonian(p, params);
    let a = h[0][0];
    let pc = Complex64::new(p, 0.0);
    // (H − E) u = 0 has the two equivalent solutions (p, E − a) and (E + a, p);
    // take the better-conditioned one.
    let first = [pc, e - a];
    let second = [e + a, pc];
    let n1 = first[0].norm_sqr() + first[1].norm_sqr();
    let n2 = second[0].norm_sqr() + second[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (first, n1) } else { (second, n2) };
    if n == 0.0 {
        // H = 0 (massless, p = 0): continue the σx eigenbasis.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        return Ok([
            Complex64::new(s, 0.0),
            Complex64::new(branch.sign() * s, 0.0),
        ]);
    }
    let n = n.sqrt();
    let mut u = [v[0] / n, v[1] / n];
    let reference = if u[0].norm() > 1e-300 { u[0] } else { u[1] };
    let phase = reference.conj() / reference.norm();
    u[0] *= phase;
    u[1] *= phase;
    if u[0].norm() > 1e-300 {
        u[0] = Complex64::new(u[0].norm(), 0.0);
    }
    Ok(u)
}

/// `dE₊/dp`: `pc²/√(p²c² + m²c⁴)` (normal) or `pc²/√(p²c² − m²c⁴)` (tachyon).
pub fn group_velocity(p: f64, params: &DiracParams) -> Result<f64> {
    let m = params.mass;
    match params.mass_type {
        MassType::Normal => {
            let e = (p * p + m * m).sqrt();
            Ok(if e == 0.0 { 1.0 } else { p / e })
        }
        MassType::Tachyon => {
            if p.abs() <= m && m > 0.0 {
                return Err(Error::ComplexBand { p, mass: m });
            }
            let e = (p * p - m * m).sqrt();
            Ok(if e == 0.0 { 1.0 } else { p / e })
        }
    }
}

/// Probability to end on the negative-energy (transmitted) branch after
/// crossing a linear potential of slope `g`.
///
/// Normal: `exp(−π m² c³/g)`. Tachyon: `e^{a}/(2e^{a} − 1)` with
/// `a = π m² c³/g`, evaluated as `1/(2 − e^{−a})`.
pub fn tunneling_probability(params: &DiracParams, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::config(format!(
            "potential slope must be positive, got {g}"
        )));
    }
    let a = PI * params.mass * params.mass / g;
    Ok(match params.mass_type {
        MassType::Normal => (-a).exp(),
        MassType::Tachyon => 1.0 / (2.0 - (-a).exp()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayStatistics {
    /// Mean number of decay events.
    pub mu: f64,
    /// Probability of zero decay events.
    pub p_success: f64,
}

/// Poisson decay statistics with `⟨σz⟩ = 0`: `μ = 2 m′ t′ N`,
/// `P_success = e^{−μ}`.
pub fn decay_statistics(m_prime: f64, t_prime: f64, n_ions: u32) -> DecayStatistics {
    let mu = 2.0 * m_prime * t_prime * n_ions as f64;
    DecayStatistics {
        mu,
        p_success: (-mu).exp(),
    }
}

/// Exact mean decay count for the projector form, `μ = γ(⟨σz⟩ + 1)t/2`,
/// with a time-averaged `⟨σz⟩`.
pub fn mean_decay_count(gamma: f64, mean_sigma_z: f64, t: f64) -> f64 {
    0.5 * gamma * (mean_sigma_z + 1.0) * t
}

/// Large-momentum spinor–motion correlation of a positive-energy packet:
/// `−mc/(2p_o²)` for tachyons, zero for normal particles.
pub fn correlation_asymptote(p_o: f64, params: &DiracParams) -> f64 {
    match params.mass_type {
        MassType::Normal => 0.0,
        MassType::Tachyon => -params.mass / (2.0 * p_o * p_o),
    }
}

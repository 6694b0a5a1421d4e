use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::state::{apply_x, IonState};
use crate::error::{Error, Result};

/// Largest `max|k| · √⟨x²⟩` accepted by the linearized protocol.
pub const PROTOCOL_REGIME_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    /// Estimated `⟨x σz⟩`.
    pub x_sigma_z: f64,
    /// `⟨x σz⟩ − ⟨x⟩⟨σz⟩` with the single-operator means read directly.
    pub connected: f64,
    pub mean_x: f64,
    pub mean_sigma_z: f64,
    /// `(k, ⟨σz⟩ after the displacement)` for each requested k.
    pub readings: Vec<(f64, f64)>,
}

/// Estimates `⟨x σz⟩` from `⟨σz⟩` readings alone.
///
/// The spin is first turned by `e^{iπσx/4}`, which maps `σy` onto `σz`.
/// Then, for each k, the state-dependent displacement `U = e^{−ikxσx}`
/// gives `⟨U†σzU⟩ = ⟨cos(2kx)σz + sin(2kx)σy⟩`. The least-squares slope
/// in k at k = 0 is `2⟨xσy⟩` of the turned state, i.e. `2⟨xσz⟩` of the
/// original one. The error is O(k²) for k values symmetric about zero.
pub fn measure_correlation_protocol(
    state: &IonState,
    k_values: &[f64],
) -> Result<CorrelationEstimate> {
    let distinct = k_values.iter().any(|&k| k != k_values[0]);
    if k_values.len() < 2 || !distinct {
        return Err(Error::InsufficientData(
            "need at least two distinct k values".into(),
        ));
    }
    let state = state.normalized()?;
    let k_max = k_values.iter().fold(0.0f64, |a, k| a.max(k.abs()));
    let regime = k_max * state.mean_x_squared().sqrt();
    if !(regime <= PROTOCOL_REGIME_LIMIT) {
        return Err(Error::ProtocolRegime {
            value: regime,
            limit: PROTOCOL_REGIME_LIMIT,
        });
    }
    let direct = state.observables()?;

    let i = Complex64::new(0.0, 1.0);
    let s = FRAC_1_SQRT_2;
    let (up, down) = (state.up(), state.down());
    // σx eigencomponents of the turned state (up + i down, i up + down)/√2:
    // (+) = (1 + i)(up + down)/2, (−) = (1 − i)(up − down)/2.
    let plus: Vec<Complex64> = up
        .iter()
        .zip(down)
        .map(|(u, d)| (u + d) * (1.0 + i) * 0.5)
        .collect();
    let minus: Vec<Complex64> = up
        .iter()
        .zip(down)
        .map(|(u, d)| (u - d) * (1.0 - i) * 0.5)
        .collect();

    let readings: Vec<(f64, f64)> = k_values
        .iter()
        .map(|&k| {
            let a = exp_minus_i_kx(&plus, k);
            let b = exp_minus_i_kx(&minus, -k);
            let sz: f64 = a
                .iter()
                .zip(&b)
                .map(|(a, b)| ((a + b) * s).norm_sqr() - ((a - b) * s).norm_sqr())
                .sum();
            (k, sz)
        })
        .collect();

    let n = readings.len() as f64;
    let mk = readings.iter().map(|r| r.0).sum::<f64>() / n;
    let my = readings.iter().map(|r| r.1).sum::<f64>() / n;
    let sxy: f64 = readings.iter().map(|r| (r.0 - mk) * (r.1 - my)).sum();
    let sxx: f64 = readings.iter().map(|r| (r.0 - mk) * (r.0 - mk)).sum();
    let x_sigma_z = 0.5 * sxy / sxx;
    Ok(CorrelationEstimate {
        x_sigma_z,
        connected: x_sigma_z - direct.mean_x * direct.mean_sigma_z,
        mean_x: direct.mean_x,
        mean_sigma_z: direct.mean_sigma_z,
        readings,
    })
}

/// `e^{−ik(a + a†)} v` by Taylor series in the truncated Fock space.
fn exp_minus_i_kx(v: &[Complex64], k: f64) -> Vec<Complex64> {
    let mut sum = v.to_vec();
    let mut term = v.to_vec();
    let scale: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for j in 1..400 {
        let factor = Complex64::new(0.0, -k / j as f64);
        term = apply_x(&term).into_iter().map(|c| c * factor).collect();
        let size: f64 = term.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        sum.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
        if size <= 1e-18 * scale {
            break;
        }
    }
    sum
}

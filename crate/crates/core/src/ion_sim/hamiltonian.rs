use std::f64::consts::PI;

use num_complex::Complex64;

use super::state::IonState;
use super::IonParams;
use crate::error::Result;

/// One laser tone entering `H_o` as `δ t → δ t + phase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub detuning: f64,
    pub phase: f64,
}

/// Blue and red sideband tones at `±ν − 2Ω` with a relative phase of π.
///
/// In the rotating-wave limit their sum is `2ηΩ̃ p (σ₊e^{2iΩt} + h.c.)`,
/// which becomes `2ηΩ̃ p σx + Ω σz` in the frame `e^{−iΩ t σz}`.
pub fn drive_tones(params: &IonParams) -> [Tone; 2] {
    let shift = -2.0 * params.delta;
    [
        Tone {
            detuning: params.nu + shift,
            phase: PI,
        },
        Tone {
            detuning: -params.nu + shift,
            phase: 0.0,
        },
    ]
}

/// `H_o(t) ψ` for the given tones, each contributing
/// `iΩ̃(σ₋e^{iδt} − σ₊e^{−iδt})[sin φ + η cos φ (a e^{−iνt} + a† e^{iνt})]`.
pub fn sideband_hamiltonian(
    t: f64,
    params: &IonParams,
    tones: &[Tone],
    state: &IonState,
) -> Result<IonState> {
    state.check_truncation()?;
    let generator = Generator::new(params, tones, 0.0);
    let mut out = state.clone();
    generator.apply(t, state.amplitudes(), out.amplitudes_mut());
    // apply() returns −iHψ; undo the −i.
    out.amplitudes_mut()
        .iter_mut()
        .for_each(|c| *c *= Complex64::new(0.0, 1.0));
    Ok(out)
}

/// Evaluates `dψ/dt = −i H_o(t) ψ − (decay/2) P↑ ψ`.
pub(crate) struct Generator {
    omega_tilde: f64,
    nu: f64,
    carrier: f64,
    sideband: f64,
    decay: f64,
    tones: Vec<Tone>,
    sqrt_n: Vec<f64>,
}

impl Generator {
    pub(crate) fn new(params: &IonParams, tones: &[Tone], decay: f64) -> Self {
        Self {
            omega_tilde: params.omega_tilde,
            nu: params.nu,
            carrier: params.phi.sin(),
            sideband: params.eta * params.phi.cos(),
            decay,
            tones: tones.to_vec(),
            sqrt_n: (0..=params.n_max + 1).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    pub(crate) fn apply(&self, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let split = psi.len() / 2;
        let f: Complex64 = self
            .tones
            .iter()
            .map(|s| Complex64::from_polar(1.0, s.detuning * t + s.phase))
            .sum();
        let lower = f * self.omega_tilde;
        let raise = -f.conj() * self.omega_tilde;
        let rot = Complex64::from_polar(1.0, self.nu * t);
        let (up, down) = psi.split_at(split);
        let (out_up, out_down) = out.split_at_mut(split);
        let half_decay = 0.5 * self.decay;
        for n in 0..split {
            let m_up = self.motional(up, n, rot);
            let m_down = self.motional(down, n, rot);
            out_up[n] = raise * m_down - up[n] * half_decay;
            out_down[n] = lower * m_up;
        }
    }

    /// `[sin φ + η cos φ (a e^{−iνt} + a† e^{iνt})] v` at index `n`.
    #[inline]
    fn motional(&self, v: &[Complex64], n: usize, rot: Complex64) -> Complex64 {
        let mut x = Complex64::default();
        if n + 1 < v.len() {
            x += v[n + 1] * (rot.conj() * self.sqrt_n[n + 1]);
        }
        if n > 0 {
            x += v[n - 1] * (rot * self.sqrt_n[n]);
        }
        v[n] * self.carrier + x * self.sideband
    }
}

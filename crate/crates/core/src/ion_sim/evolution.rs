use std::f64::consts::PI;

use num_complex::Complex64;

use super::hamiltonian::{drive_tones, Generator};
use super::state::IonState;
use super::IonParams;
use crate::error::{Error, Result};
use crate::observables::{ObservableRecord, ObservableSeries};

/// Largest step: `2π / (200 ω_max)` for the fastest rate in the problem.
pub fn max_dt(params: &IonParams) -> f64 {
    let fastest = [
        params.nu,
        params.omega_tilde,
        params.gamma + params.gamma_d,
        params.delta.abs(),
    ]
    .into_iter()
    .fold(f64::MIN_POSITIVE, f64::max);
    2.0 * PI / (200.0 * fastest)
}

/// Time grid of an ion run: `n_samples` equal intervals, each an integer
/// number of steps no longer than `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IonRun {
    pub t_final: f64,
    pub dt: f64,
    pub n_samples: usize,
}

impl IonRun {
    pub fn new(params: &IonParams, t_final: f64) -> Self {
        Self {
            t_final,
            dt: max_dt(params),
            n_samples: 100,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_samples(mut self, n_samples: usize) -> Self {
        self.n_samples = n_samples;
        self
    }

    /// `(step, steps per sample, number of samples after t = 0)`.
    pub(crate) fn schedule(&self, params: &IonParams) -> Result<(f64, usize, usize)> {
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::config(format!(
                "t_final must be >= 0, got {}",
                self.t_final
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        let limit = max_dt(params);
        if self.dt > limit * (1.0 + 1e-9) {
            return Err(Error::Stability(format!(
                "ion step {} exceeds 2π/(200ν) = {limit}",
                self.dt
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::config("n_samples must be >= 1"));
        }
        if self.t_final == 0.0 {
            return Ok((self.dt, 1, 0));
        }
        let interval = self.t_final / self.n_samples as f64;
        let stride = (interval / self.dt).ceil().max(1.0) as usize;
        Ok((interval / stride as f64, stride, self.n_samples))
    }
}

/// Classical RK4 for `dψ/dt = generator(t) ψ` with reusable buffers.
pub(crate) struct Propagator {
    generator: Generator,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Propagator {
    pub(crate) fn new(params: &IonParams, decay: f64) -> Self {
        let n = 2 * (params.n_max + 1);
        let zeros = || vec![Complex64::default(); n];
        Self {
            generator: Generator::new(params, &drive_tones(params), decay),
            k: [zeros(), zeros(), zeros(), zeros()],
            tmp: zeros(),
        }
    }

    pub(crate) fn step(&mut self, t: f64, h: f64, psi: &mut [Complex64]) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        self.generator.apply(t, psi, k1);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k1[i] * (0.5 * h);
        }
        self.generator.apply(t + 0.5 * h, tmp, k2);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k2[i] * (0.5 * h);
        }
        self.generator.apply(t + 0.5 * h, tmp, k3);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k3[i] * h;
        }
        self.generator.apply(t + h, tmp, k4);
        let w = h / 6.0;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}

/// Observables in the Dirac frame `e^{−iΩ t σz} ψ`.
pub(crate) fn dirac_frame_observables(
    state: &IonState,
    params: &IonParams,
) -> Result<ObservableRecord> {
    state.spin_phased(params.delta * state.time).observables()
}

pub(crate) fn check_initial(state: &IonState, params: &IonParams) -> Result<()> {
    params.validate()?;
    if state.n_max() != params.n_max {
        return Err(Error::config(format!(
            "state cutoff {} differs from n_max = {}",
            state.n_max(),
            params.n_max
        )));
    }
    if (state.norm_sq() - 1.0).abs() > 1e-9 {
        return Err(Error::config("initial ion state must be normalized"));
    }
    state.check_truncation()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedRun {
    pub state: IonState,
    /// Raw squared norm at `t_final`: the probability of no decay.
    pub success_probability: f64,
    /// Renormalized observables in the Dirac frame; `norm_sq` is the raw
    /// squared norm.
    pub series: ObservableSeries,
}

/// No-jump evolution under `H_o(t) − i(γ/2)|↑⟩⟨↑|`. Pumping errors are
/// heralded-invisible and are left to [`super::run_trajectories`].
pub fn evolve_conditioned(
    initial: &IonState,
    params: &IonParams,
    run: &IonRun,
) -> Result<ConditionedRun> {
    check_initial(initial, params)?;
    let (h, stride, n_samples) = run.schedule(params)?;
    let mut propagator = Propagator::new(params, params.gamma);
    let mut state = initial.clone();
    state.time = 0.0;
    let mut series = Vec::with_capacity(n_samples + 1);
    series.push(dirac_frame_observables(&state, params)?);
    for s in 0..n_samples {
        for j in 0..stride {
            let t = (s * stride + j) as f64 * h;
            propagator.step(t, h, state.amplitudes_mut());
        }
        state.time = ((s + 1) * stride) as f64 * h;
        state.check_truncation()?;
        series.push(dirac_frame_observables(&state, params)?);
    }
    let success_probability = state.norm_sq();
    Ok(ConditionedRun {
        state,
        success_probability,
        series,
    })
}

/// Converts a squared norm under the projector `−i(γ/2)|↑⟩⟨↑|` to the
/// traceless `−i(γ/4)σz` form by removing the constant `−iγ/4`.
pub fn sigma_z_form_norm(projector_norm_sq: f64, gamma: f64, t: f64) -> f64 {
    projector_norm_sq * (0.5 * gamma * t).exp()
}

pub type Rotation3 = [[f64; 3]; 3];

fn bloch(r: &ObservableRecord) -> [f64; 3] {
    [r.mean_sigma_x, r.mean_sigma_y, r.mean_sigma_z]
}

/// Rotation taking the Bloch vector of `from` onto that of `to`
/// (Rodrigues form, about their common normal).
pub fn spinor_alignment(from: &ObservableRecord, to: &ObservableRecord) -> Rotation3 {
    let identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let unit = |v: [f64; 3]| {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        (n > 1e-12).then(|| [v[0] / n, v[1] / n, v[2] / n])
    };
    let (Some(a), Some(b)) = (unit(bloch(from)), unit(bloch(to))) else {
        return identity;
    };
    let v = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let k = if s2 < 1e-24 {
        if c > 0.0 {
            return identity;
        }
        // Antiparallel: half turn about any axis normal to a.
        let trial = if a[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let n = unit([
            a[1] * trial[2] - a[2] * trial[1],
            a[2] * trial[0] - a[0] * trial[2],
            a[0] * trial[1] - a[1] * trial[0],
        ])
        .unwrap_or([0.0, 0.0, 1.0]);
        let mut r = identity;
        for i in 0..3 {
            for j in 0..3 {
                r[i][j] = 2.0 * n[i] * n[j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        return r;
    } else {
        (1.0 - c) / s2
    };
    let vx = [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]];
    let mut r = identity;
    for i in 0..3 {
        for j in 0..3 {
            let sq: f64 = (0..3).map(|l| vx[i][l] * vx[l][j]).sum();
            r[i][j] += vx[i][j] + k * sq;
        }
    }
    r
}

/// Rotates the Bloch vector of `record`; position-space moments are unchanged.
pub fn align_record(record: &ObservableRecord, rotation: &Rotation3) -> ObservableRecord {
    let b = bloch(record);
    let r: Vec<f64> = rotation
        .iter()
        .map(|row| row[0] * b[0] + row[1] * b[1] + row[2] * b[2])
        .collect();
    ObservableRecord {
        mean_sigma_x: r[0],
        mean_sigma_y: r[1],
        mean_sigma_z: r[2],
        ..*record
    }
}

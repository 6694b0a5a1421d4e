use num_complex::Complex64;

use crate::analytic::{eigenspinor, Branch};
use crate::error::{Error, Result};
use crate::observables::ObservableRecord;
use crate::params::DiracParams;
use crate::spinor::Spinor;

/// Ceiling on the population of the two highest Fock levels.
pub const TRUNCATION_LIMIT: f64 = 1e-6;

/// Amplitudes `ψ[s][n]` for spin `s` (0 = ↑, 1 = ↓) and phonon number
/// `n ≤ n_max`, stored spin-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IonState {
    n_max: usize,
    amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl IonState {
    pub fn new(n_max: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 2 * (n_max + 1) {
            return Err(Error::config(format!(
                "expected {} amplitudes for n_max = {n_max}, got {}",
                2 * (n_max + 1),
                amplitudes.len()
            )));
        }
        Ok(Self {
            n_max,
            amplitudes,
            time: 0.0,
        })
    }

    /// `spinor ⊗ motion`, normalized.
    pub fn product(spinor: Spinor, motion: &[Complex64]) -> Result<Self> {
        if motion.len() < 3 {
            return Err(Error::config("motional state needs at least 3 Fock levels"));
        }
        let n_max = motion.len() - 1;
        let mut amplitudes = Vec::with_capacity(2 * motion.len());
        for s in spinor {
            amplitudes.extend(motion.iter().map(|&c| s * c));
        }
        Self::new(n_max, amplitudes)?.normalized()
    }

    /// `spinor ⊗ |α⟩`. In Dirac units `α = x₀/2 + i p₀` is the image of a
    /// unit-width Gaussian at `x₀` with mean momentum `p₀`.
    pub fn coherent(alpha: Complex64, spinor: Spinor, n_max: usize) -> Result<Self> {
        let mut motion = Vec::with_capacity(n_max + 1);
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        motion.push(c);
        for n in 1..=n_max {
            c = c * alpha / (n as f64).sqrt();
            motion.push(c);
        }
        Self::product(spinor, &motion)
    }

    /// Fock-space image of a momentum-space spinor wavefunction `φ(p)`,
    /// by quadrature against the oscillator eigenfunctions
    /// `⟨p|n⟩ = (−i)ⁿ 2^{1/4} hₙ(√2 p)`, with `hₙ` the normalized Hermite
    /// functions. Integrates over `p ∈ [p_lo, p_hi]`.
    pub fn from_momentum_wavefunction<F>(n_max: usize, p_lo: f64, p_hi: f64, phi: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Spinor>,
    {
        if !(p_hi > p_lo) {
            return Err(Error::config("empty momentum range"));
        }
        const DP: f64 = 2e-3;
        let n_pts = ((p_hi - p_lo) / DP).ceil() as usize + 1;
        let dp = (p_hi - p_lo) / (n_pts - 1) as f64;
        let mut amplitudes = vec![Complex64::default(); 2 * (n_max + 1)];
        let mut h = vec![0.0; n_max + 1];
        let scale = 2f64.powf(0.25) * dp;
        for k in 0..n_pts {
            let p = p_lo + k as f64 * dp;
            let value = phi(p)?;
            if value[0].norm_sqr() + value[1].norm_sqr() == 0.0 {
                continue;
            }
            hermite_functions(std::f64::consts::SQRT_2 * p, &mut h);
            let w = if k == 0 || k == n_pts - 1 {
                0.5 * scale
            } else {
                scale
            };
            // conj((−i)ⁿ) = iⁿ
            let mut phase = Complex64::new(w, 0.0);
            for (n, &hn) in h.iter().enumerate() {
                let c = phase * hn;
                amplitudes[n] += c * value[0];
                amplitudes[n_max + 1 + n] += c * value[1];
                phase *= Complex64::new(0.0, 1.0);
            }
        }
        Self::new(n_max, amplitudes)?.normalized()
    }

    /// Fock image of the positive-energy packet
    /// `φ(p) ∝ e^{−width²(p−p_o)²} u₊(p)`, leaving out the tachyon complex
    /// band.
    pub fn positive_energy_packet(
        p_o: f64,
        width: f64,
        params: &DiracParams,
        n_max: usize,
    ) -> Result<Self> {
        let reach = 8.0 / width;
        let m = if params.is_tachyon() {
            params.mass
        } else {
            -1.0
        };
        Self::from_momentum_wavefunction(n_max, p_o - reach, p_o + reach, |p| {
            if p.abs() <= m {
                return Ok([Complex64::default(); 2]);
            }
            let u = eigenspinor(p, params, Branch::Plus)?;
            let a = (-(width * (p - p_o)).powi(2)).exp();
            Ok([u[0] * a, u[1] * a])
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn up(&self) -> &[Complex64] {
        &self.amplitudes[..=self.n_max]
    }

    pub fn down(&self) -> &[Complex64] {
        &self.amplitudes[self.n_max + 1..]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sq();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::DegenerateState { norm_sq: n });
        }
        let s = 1.0 / n.sqrt();
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|c| c * s).collect(),
            ..*self
        })
    }

    /// Population of the two highest Fock levels, relative to the norm.
    pub fn top_population(&self) -> f64 {
        let n = self.n_max;
        let top: f64 = [n - 1, n, 2 * n, 2 * n + 1]
            .iter()
            .map(|&i| self.amplitudes[i].norm_sqr())
            .sum();
        top / self.norm_sq()
    }

    pub fn check_truncation(&self) -> Result<()> {
        let population = self.top_population();
        if population >= TRUNCATION_LIMIT || !population.is_finite() {
            return Err(Error::Truncation {
                time: self.time,
                population,
                limit: TRUNCATION_LIMIT,
            });
        }
        Ok(())
    }

    /// Spin amplitudes rotated by `diag(e^{−iθ}, e^{iθ})`.
    pub(crate) fn spin_phased(&self, theta: f64) -> Self {
        let (a, b) = (
            Complex64::from_polar(1.0, -theta),
            Complex64::from_polar(1.0, theta),
        );
        let mut out = self.clone();
        let split = self.n_max + 1;
        out.amplitudes[..split].iter_mut().for_each(|c| *c *= a);
        out.amplitudes[split..].iter_mut().for_each(|c| *c *= b);
        out
    }

    /// Expectation values on the renormalized state, with `x = a + a†` and
    /// `p = i(a† − a)/2` (units of Δ and 1/Δ). `norm_sq` holds the raw norm.
    pub fn observables(&self) -> Result<ObservableRecord> {
        let norm = self.norm_sq();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegenerateState { norm_sq: norm });
        }
        let (up, down) = (self.up(), self.down());
        let x_up = ladder_x(up);
        let x_down = ladder_x(down);
        let p_total = ladder_p(up) + ladder_p(down);
        let ud: Complex64 = up.iter().zip(down).map(|(u, d)| u.conj() * d).sum();
        let n_up: f64 = up.iter().map(|c| c.norm_sqr()).sum();
        let n_down = norm - n_up;
        let mean_x = (x_up + x_down) / norm;
        let mean_sigma_z = (n_up - n_down) / norm;
        let x_sigma_z = (x_up - x_down) / norm;
        Ok(ObservableRecord {
            time: self.time,
            mean_x,
            mean_p: p_total / norm,
            mean_sigma_x: 2.0 * ud.re / norm,
            mean_sigma_y: 2.0 * ud.im / norm,
            mean_sigma_z,
            correlation_xz: x_sigma_z - mean_x * mean_sigma_z,
            norm_sq: norm,
        })
    }

    /// `⟨x²⟩` on the renormalized state.
    pub fn mean_x_squared(&self) -> f64 {
        let mut total = 0.0;
        for v in [self.up(), self.down()] {
            total += apply_x(v).iter().map(|c| c.norm_sqr()).sum::<f64>();
        }
        total / self.norm_sq()
    }
}

/// `(a + a†) v`.
pub(crate) fn apply_x(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::default();
            if k > 0 {
                acc += v[k - 1] * (k as f64).sqrt();
            }
            if k + 1 < n {
                acc += v[k + 1] * ((k + 1) as f64).sqrt();
            }
            acc
        })
        .collect()
}

/// `⟨v|a + a†|v⟩ = 2 Re Σ √(n+1) v̄ₙ₊₁ vₙ`.
fn ladder_x(v: &[Complex64]) -> f64 {
    2.0 * (0..v.len() - 1)
        .map(|n| ((n + 1) as f64).sqrt() * (v[n + 1].conj() * v[n]).re)
        .sum::<f64>()
}

/// `⟨v|i(a† − a)/2|v⟩ = −Im⟨a†⟩` with `⟨a†⟩ = Σ √(n+1) v̄ₙ₊₁ vₙ`.
fn ladder_p(v: &[Complex64]) -> f64 {
    -(0..v.len() - 1)
        .map(|n| ((n + 1) as f64).sqrt() * (v[n + 1].conj() * v[n]).im)
        .sum::<f64>()
}

/// Normalized Hermite functions `h₀ … h_N` at `y`.
fn hermite_functions(y: f64, out: &mut [f64]) {
    out[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * y * out[0];
    }
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

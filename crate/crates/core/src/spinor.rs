//! Two-component spinor helpers and the 2×2 Dirac Hamiltonians.

use num_complex::Complex64;

use crate::params::{DiracParams, MassType};

pub type Spinor = [Complex64; 2];
pub type Matrix2 = [[Complex64; 2]; 2];

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn spinor(a: f64, b: f64) -> Spinor {
    [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
}

pub fn norm_sq(s: &Spinor) -> f64 {
    s[0].norm_sqr() + s[1].norm_sqr()
}

pub fn normalize(s: Spinor) -> Spinor {
    let n = norm_sq(&s).sqrt();
    [s[0] / n, s[1] / n]
}

pub fn mat_vec(m: &Matrix2, v: &Spinor) -> Spinor {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint(m: &Matrix2) -> Matrix2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

/// Mass term `m c² σz` (normal) or `−i m c² σz` (tachyon) as its diagonal.
pub fn mass_diagonal(params: &DiracParams) -> [Complex64; 2] {
    let m = params.rest_energy();
    match params.mass_type {
        MassType::Normal => [Complex64::new(m, 0.0), Complex64::new(-m, 0.0)],
        MassType::Tachyon => [Complex64::new(0.0, -m), Complex64::new(0.0, m)],
    }
}

/// Momentum-space Hamiltonian `H(p) = c p σx + M σz`.
pub fn hamiltonian(p: f64, params: &DiracParams) -> Matrix2 {
    let [d0, d1] = mass_diagonal(params);
    let p = Complex64::new(p, 0.0);
    [[d0, p], [p, d1]]
}

/// `(I + iσx)/√2`, the spinor rotation used by the space-time duality.
pub fn duality_unitary() -> Matrix2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [Complex64::new(s, 0.0), Complex64::new(0.0, s)],
        [Complex64::new(0.0, s), Complex64::new(s, 0.0)],
    ]
}

//! Lattice builders and property checks shared by several test targets.
#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use tachyon_core::analytic::{dispersion, eigenspinor, Branch};
use tachyon_core::dirac_evolution::{evolve, EvolutionConfig};
use tachyon_core::duality::{Axis, Potentials, SpacetimeSolution};
use tachyon_core::field::gaussian_packet;
use tachyon_core::ion_sim::{run_trajectories, IonParams, IonRun, IonState};
use tachyon_core::spinor::normalize;
use tachyon_core::{make_grid, observables, DiracParams, MassType, SpinorField};

type Spinor = [Complex64; 2];

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `i φ′ = [(k − g t)σx + m σz] φ`, integrated with RK4 in steps of `h`.
fn mode_step(phi: Spinor, k: f64, g: f64, m: f64, t: f64, h: f64) -> Spinor {
    let f = |t: f64, v: Spinor| -> Spinor {
        let b = k - g * t;
        [-I * (v[1] * b + v[0] * m), -I * (v[0] * b - v[1] * m)]
    };
    let add = |a: Spinor, b: Spinor, s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
    let k1 = f(t, phi);
    let k2 = f(t + h / 2.0, add(phi, k1, h / 2.0));
    let k3 = f(t + h / 2.0, add(phi, k2, h / 2.0));
    let k4 = f(t + h, add(phi, k3, h));
    [
        phi[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * (h / 6.0),
        phi[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * (h / 6.0),
    ]
}

/// Exact solution in `φ = g x`: `ψ = e^{−igxt} Σ_k φ_k(t) e^{ikx}` on an
/// `n × n` lattice covering `[x0, x0 + span] × [0, span]`.
pub fn gauge_solution(n: usize, span: f64, g: f64, m: f64) -> SpacetimeSolution {
    let h = span / (n - 1) as f64;
    let x0 = -0.4;
    let modes = [
        (0.7, [Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.2)]),
        (-1.1, [Complex64::new(0.0, 0.5), Complex64::new(0.4, 0.0)]),
    ];
    let sub = (h / 1e-4).ceil() as usize;
    let hs = h / sub as f64;
    let mut phis: Vec<Spinor> = modes.iter().map(|m| m.1).collect();
    let mut values = Vec::with_capacity(n * n);
    for j in 0..n {
        let t = j as f64 * h;
        for i in 0..n {
            let x = x0 + i as f64 * h;
            let gauge = Complex64::from_polar(1.0, -g * x * t);
            let mut v = [Complex64::default(); 2];
            for (phi, (k, _)) in phis.iter().zip(&modes) {
                let w = gauge * Complex64::from_polar(1.0, k * x);
                v[0] += w * phi[0];
                v[1] += w * phi[1];
            }
            values.push(v);
        }
        for (phi, (k, _)) in phis.iter_mut().zip(&modes) {
            for s in 0..sub {
                *phi = mode_step(*phi, *k, g, m, t + s as f64 * hs, hs);
            }
        }
    }
    let potentials = Potentials {
        axis: Axis::Space,
        phi: (0..n).map(|i| g * (x0 + i as f64 * h)).collect(),
        a: vec![0.0; n],
    };
    SpacetimeSolution::new(values, n, n, (h, h), (x0, 0.0), DiracParams::normal(m), potentials).unwrap()
}

pub fn plane_wave(n: usize, span: f64) -> SpacetimeSolution {
    let params = DiracParams::normal(1.0);
    let p = 1.3;
    let u = eigenspinor(p, &params, Branch::Plus).unwrap();
    let e = dispersion(p, &params).plus.re;
    let h = span / (n - 1) as f64;
    SpacetimeSolution::from_fn(n, n, (h, h), (0.0, 0.0), params, Potentials::zero(Axis::Space, n), |x, t| {
        let w = Complex64::from_polar(1.0, p * x - e * t);
        [u[0] * w, u[1] * w]
    })
    .unwrap()
}

/// Spin `u₊(3.5)` times the coherent state `α = 3.5 i`: the Fock image of
/// the unit-width packet at momentum 3.5.
pub fn drift_ion_state(dirac: &DiracParams, n_max: usize) -> IonState {
    let u = eigenspinor(3.5, dirac, Branch::Plus).unwrap();
    IonState::coherent(Complex64::new(0.0, 3.5), u, n_max).unwrap()
}

/// `⟨x σz⟩` by direct contraction with `x = a + a†`.
pub fn oracle_x_sigma_z(state: &IonState) -> f64 {
    let n = state.norm_sq();
    let x = |v: &[Complex64]| -> f64 {
        (0..v.len() - 1).map(|k| 2.0 * ((k + 1) as f64).sqrt() * (v[k + 1].conj() * v[k]).re).sum()
    };
    (x(state.up()) - x(state.down())) / n
}

pub fn mass_type() -> impl Strategy<Value = MassType> {
    prop_oneof![Just(MassType::Normal), Just(MassType::Tachyon)]
}

pub fn unit_spinor() -> impl Strategy<Value = [Complex64; 2]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
        .prop_map(|(a, b, c, d)| normalize([Complex64::new(a, b), Complex64::new(c, d)]))
}

pub type FieldValues = Vec<(f64, f64, f64, f64)>;

pub fn field_values() -> impl Strategy<Value = FieldValues> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 64)
}

pub fn random_field(values: &[(f64, f64, f64, f64)]) -> SpinorField {
    let grid = make_grid(values.len(), 20.0).unwrap();
    let up = values.iter().map(|v| Complex64::new(v.0, v.1)).collect();
    let down = values.iter().map(|v| Complex64::new(v.2, v.3)).collect();
    SpinorField::new(grid, up, down).unwrap()
}

pub fn check_fourier_round_trip(values: &FieldValues) -> Result<(), TestCaseError> {
    let field = random_field(values);
    let (mut up, mut down) = field.to_momentum();
    field.grid().inverse(&mut up);
    field.grid().inverse(&mut down);
    let scale = field.up().iter().chain(field.down()).map(|c| c.norm()).fold(0.0, f64::max);
    for (a, b) in up.iter().chain(&down).zip(field.up().iter().chain(field.down())) {
        prop_assert!((a - b).norm() <= 1e-13 * scale);
    }
    Ok(())
}

pub fn check_renormalization(values: &FieldValues, c: Complex64) -> Result<(), TestCaseError> {
    let field = random_field(values);
    let a = observables(&field).unwrap();
    let b = observables(&field.scaled(c)).unwrap();
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-11 * (1.0 + x.abs());
    prop_assert!(close(a.mean_x, b.mean_x) && close(a.mean_p, b.mean_p));
    prop_assert!(close(a.mean_sigma_x, b.mean_sigma_x) && close(a.mean_sigma_y, b.mean_sigma_y));
    prop_assert!(close(a.mean_sigma_z, b.mean_sigma_z) && close(a.correlation_xz, b.correlation_xz));
    prop_assert!((b.norm_sq - c.norm_sqr() * a.norm_sq).abs() <= 1e-12 * b.norm_sq);
    Ok(())
}

pub fn scale_factor() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64)
        .prop_filter("nonzero", |(re, im)| re * re + im * im > 1e-4)
        .prop_map(|(re, im)| Complex64::new(re, im))
}

/// Unitarity for real mass, `e^{−2mt} ≤ ‖ψ‖² ≤ e^{2mt}` for imaginary mass.
pub fn check_norm_bounds(m: f64, mass_type: MassType, g: f64, p_o: f64, s: [Complex64; 2]) -> Result<(), TestCaseError> {
    let params = DiracParams::new(m, mass_type, g).unwrap();
    let grid = make_grid(512, 40.0).unwrap();
    let field = gaussian_packet(&grid, p_o, 1.0, s).unwrap();
    let run = evolve(&field, &EvolutionConfig::new(params, 1.0).with_dt(1e-3).with_sample_stride(5)).unwrap();
    for r in &run.series {
        match mass_type {
            MassType::Normal => prop_assert!((r.norm_sq - 1.0).abs() < 1e-10),
            MassType::Tachyon => {
                let bound = (2.0 * m * r.time).exp();
                prop_assert!(r.norm_sq <= bound * (1.0 + 1e-12) && r.norm_sq * bound >= 1.0 - 1e-12);
            }
        }
    }
    Ok(())
}

/// `⟨x⟩(t = 1)` ratio of successive differences for dt = 0.01, 0.005, 0.0025.
pub fn check_dt_convergence(m: f64, mass_type: MassType, p_o: f64) -> Result<(), TestCaseError> {
    let grid = make_grid(512, 40.0).unwrap();
    let params = DiracParams::new(m, mass_type, 0.0).unwrap();
    let u = normalize([Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.8)]);
    let field = gaussian_packet(&grid, p_o, 1.0, u).unwrap();
    let x = |dt: f64| {
        let config = EvolutionConfig::new(params, 1.0).with_dt(dt).with_sample_stride(1 << 20);
        evolve(&field, &config).unwrap().series.last().unwrap().mean_x
    };
    let (a, b, c) = (x(0.01), x(0.005), x(0.0025));
    let ratio = (a - b) / (b - c);
    prop_assert!((3.5..=4.5).contains(&ratio), "ratio {}", ratio);
    Ok(())
}

pub fn check_ensemble_determinism(seed: u64) -> Result<(), TestCaseError> {
    let params = IonParams { n_max: 80, gamma_d: 0.6, ..IonParams::default().to_natural() };
    let spin = normalize([Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
    let state = IonState::coherent(Complex64::new(0.0, 2.0), spin, 80).unwrap();
    let run = IonRun::new(&params, 0.3).with_samples(6);
    let a = run_trajectories(&params, &state, &run, 24, seed).unwrap();
    let b = run_trajectories(&params, &state, &run, 24, seed).unwrap();
    prop_assert_eq!(a, b);
    Ok(())
}

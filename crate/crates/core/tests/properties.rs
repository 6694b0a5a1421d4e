mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use tachyon_core::analytic::*;
use tachyon_core::dirac_evolution::{evolve, velocities, velocity_residual, EvolutionConfig};
use tachyon_core::duality::{swap_and_conjugate, Axis, Potentials, SpacetimeSolution};
use tachyon_core::field::{gaussian_packet, positive_energy_packet};
use tachyon_core::ion_sim::{evolve_conditioned, IonParams, IonRun, IonState};
use tachyon_core::landau_zener::{lz_tunnel_probability, LZConfig};
use tachyon_core::spinor::{hamiltonian, normalize};
use tachyon_core::{make_grid, observables, DiracParams, MassType};





proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fourier_round_trip(values in field_values()) {
        check_fourier_round_trip(&values)?;
    }

    #[test]
    fn observables_ignore_scale(values in field_values(), c in scale_factor()) {
        check_renormalization(&values, c)?;
    }

    #[test]
    fn sigma_expectations_are_bounded(values in field_values()) {
        let r = observables(&random_field(&values)).unwrap();
        for s in [r.mean_sigma_x, r.mean_sigma_y, r.mean_sigma_z] {
            prop_assert!(s.abs() <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn builders_normalize(p_o in -5.0..5.0f64, width in 0.6..2.0f64, s in unit_spinor(),
                          p_hi in 6.0..12.0f64, m in 0.0..1.0f64, mt in mass_type()) {
        let grid = make_grid(1024, 40.0).unwrap();
        let g = gaussian_packet(&grid, p_o, width, s).unwrap();
        prop_assert!((g.norm_sq() - 1.0).abs() < 1e-12);
        prop_assert!((observables(&g).unwrap().norm_sq - 1.0).abs() < 1e-12);
        let params = DiracParams::new(m, mt, 0.0).unwrap();
        let e = positive_energy_packet(&grid, p_hi, 1.0, &params).unwrap();
        prop_assert!((e.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn real_mass_packets_are_uncorrelated(p_o in 3.0..12.0f64, m in 0.0..3.0f64) {
        let grid = make_grid(1024, 40.0).unwrap();
        let f = positive_energy_packet(&grid, p_o, 1.0, &DiracParams::normal(m)).unwrap();
        prop_assert!(observables(&f).unwrap().correlation_xz.abs() < 1e-6);
    }

    #[test]
    fn spectrum_is_symmetric_and_eigenvectors_exact(p in -50.0..50.0f64, m in 0.0..5.0f64, mt in mass_type()) {
        let params = DiracParams::new(m, mt, 0.0).unwrap();
        let e = dispersion(p, &params);
        prop_assert_eq!(e.plus, -e.minus);
        prop_assume!((p * p - m * m).abs() > 1e-6);
        let h = hamiltonian(p, &params);
        for (branch, energy) in [(Branch::Plus, e.plus), (Branch::Minus, e.minus)] {
            let u = eigenspinor(p, &params, branch).unwrap();
            let r: f64 = (0..2).map(|k| (h[k][0] * u[0] + h[k][1] * u[1] - energy * u[k]).norm_sqr()).sum();
            prop_assert!(r.sqrt() <= 1e-12 * (1.0 + p.abs() + m));
        }
    }

    #[test]
    fn group_velocity_sides_of_the_light_cone(p in 0.01..100.0f64, m in 0.01..5.0f64) {
        prop_assert!(group_velocity(p, &DiracParams::normal(m)).unwrap() < 1.0);
        prop_assume!(p > m * (1.0 + 1e-9));
        prop_assert!(group_velocity(p, &DiracParams::tachyon(m)).unwrap() > 1.0);
    }

    #[test]
    fn closed_form_tunneling_bounds(g in 0.01..100.0f64, m in 0.05..3.0f64) {
        let t = tunneling_probability(&DiracParams::tachyon(m), g).unwrap();
        let n = tunneling_probability(&DiracParams::normal(m), g).unwrap();
        prop_assert!((0.5..1.0).contains(&t));
        prop_assert!(t > n);
        prop_assert_eq!(
            tunneling_probability(&DiracParams::tachyon(0.0), g).unwrap(),
            tunneling_probability(&DiracParams::normal(0.0), g).unwrap()
        );
    }

    #[test]
    fn massless_types_coincide(p in -20.0..20.0f64) {
        prop_assert_eq!(dispersion(p, &DiracParams::tachyon(0.0)), dispersion(p, &DiracParams::normal(0.0)));
    }
}

fn short_run(params: DiracParams, p_o: f64, s: [Complex64; 2], t_final: f64) -> tachyon_core::dirac_evolution::EvolutionResult {
    let grid = make_grid(512, 40.0).unwrap();
    let field = gaussian_packet(&grid, p_o, 1.0, s).unwrap();
    evolve(&field, &EvolutionConfig::new(params, t_final).with_dt(1e-3).with_sample_stride(5)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn real_mass_runs_are_unitary(m in 0.0..3.0f64, g in 0.0..3.0f64, p_o in -4.0..4.0f64, s in unit_spinor()) {
        check_norm_bounds(m, MassType::Normal, g, p_o, s)?;
    }

    #[test]
    fn imaginary_mass_norm_envelope(m in 0.0..3.0f64, p_o in -4.0..4.0f64, s in unit_spinor()) {
        check_norm_bounds(m, MassType::Tachyon, 0.0, p_o, s)?;
    }

    #[test]
    fn superluminal_speed_needs_correlation(m in 0.5..3.0f64, p_o in 1.0..5.0f64) {
        let params = DiracParams::tachyon(m);
        let u = if p_o > m * 1.01 { eigenspinor(p_o, &params, Branch::Plus).unwrap() } else { normalize([Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.5)]) };
        let run = short_run(params, p_o, u, 1.0);
        let eps = velocity_residual(&run.series, &params).unwrap();
        prop_assert!(eps < 1e-3);
        for ((t, v), r) in velocities(&run.series).into_iter().zip(&run.series[1..]) {
            prop_assert_eq!(t, r.time);
            if v.abs() > 1.0 {
                prop_assert!(r.correlation_xz.abs() > (v.abs() - 1.0) / (2.0 * m) - eps);
            }
        }
    }

    #[test]
    fn real_mass_stays_inside_the_light_cone(m in 0.0..3.0f64, p_o in -3.0..3.0f64, s in unit_spinor()) {
        let grid = make_grid(1024, 60.0).unwrap();
        let field = gaussian_packet(&grid, p_o, 0.5, s).unwrap();
        let xs = grid.positions();
        let (d0, _, _) = field.densities().unwrap();
        let inside: Vec<f64> = xs.iter().zip(&d0).filter(|(_, d)| **d > 1e-8).map(|(x, _)| *x).collect();
        let (lo, hi) = (inside[0], inside[inside.len() - 1]);
        let run = evolve(&field, &EvolutionConfig::new(DiracParams::normal(m), 3.0).with_dt(2e-3).with_snapshot_stride(250)).unwrap();
        for snap in &run.snapshots {
            let outside: f64 = xs.iter().zip(&snap.density)
                .filter(|(x, _)| **x < lo - snap.time || **x > hi + snap.time)
                .map(|(_, d)| d).sum::<f64>() * grid.dx();
            prop_assert!(outside < 1e-6, "{}", outside);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn split_step_converges_at_second_order(m in 0.5..2.5f64, mt in mass_type(), p_o in 2.0..4.0f64) {
        check_dt_convergence(m, mt, p_o)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn imaginary_mass_tunnels_at_least_half(g in 0.2..20.0f64, m in 0.25..2.0f64) {
        let p = lz_tunnel_probability(&LZConfig::standard(DiracParams::tachyon(m), g)).unwrap();
        prop_assert!(p >= 0.5 - 1e-3, "{}", p);
    }

    #[test]
    fn tunneling_is_monotone_in_g(g in 0.3..8.0f64, m in 0.5..1.5f64, mt in mass_type()) {
        let params = DiracParams::new(m, mt, 0.0).unwrap();
        let lo = lz_tunnel_probability(&LZConfig::standard(params, g)).unwrap();
        let hi = lz_tunnel_probability(&LZConfig::standard(params, 1.5 * g)).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn double_swap_returns_minus_i_sigma_x(values in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 49)) {
        let sol = SpacetimeSolution::new(
            values.iter().map(|v| [Complex64::new(v.0, v.1), Complex64::new(v.2, v.3)]).collect(),
            7, 7, (0.1, 0.2), (0.0, 0.0), DiracParams::normal(1.0), Potentials::zero(Axis::Space, 7),
        ).unwrap();
        let twice = swap_and_conjugate(&swap_and_conjugate(&sol).unwrap()).unwrap();
        let i = Complex64::new(0.0, 1.0);
        for (a, b) in twice.values.iter().zip(&sol.values) {
            prop_assert!((a[0] + i * b[1]).norm() < 1e-15 && (a[1] + i * b[0]).norm() < 1e-15);
        }
        prop_assert_eq!((twice.dx, twice.dt), (sol.dx, sol.dt));
    }
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn ensembles_are_deterministic(seed in any::<u64>()) {
        check_ensemble_determinism(seed)?;
    }

    #[test]
    fn conditioned_runs_certify_truncation_and_heralding(p_o in 3.5..6.0f64, t in 0.2..1.0f64) {
        let params = IonParams { n_max: 128, ..IonParams::default().to_natural() };
        let dirac = DiracParams::tachyon(2.0);
        let u = eigenspinor(p_o, &dirac, Branch::Plus).unwrap();
        let state = IonState::coherent(Complex64::new(0.0, p_o), u, 128).unwrap();
        let out = evolve_conditioned(&state, &params, &IonRun::new(&params, t).with_samples(5)).unwrap();
        prop_assert!(out.state.top_population() < 1e-6);
        let heralded = (-0.5 * params.gamma * t).exp();
        prop_assert!((out.success_probability / heralded - 1.0).abs() < 0.10, "{} vs {}", out.success_probability, heralded);
    }
}

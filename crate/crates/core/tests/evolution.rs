use tachyon_core::analytic::{eigenspinor, Branch};
use tachyon_core::dirac_evolution::*;
use tachyon_core::field::{gaussian_packet, positive_energy_packet};
use tachyon_core::spinor::spinor;
use tachyon_core::{make_grid, DiracParams, ObservableRecord, SpatialGrid, SpinorField};

fn packet_grid() -> SpatialGrid {
    make_grid(1024, 40.0).unwrap()
}

/// Group velocity by central difference of the real branch `√(p² − m²)`.
fn numeric_group_velocity(p: f64, m: f64) -> f64 {
    let e = |q: f64| (q * q - m * m).sqrt();
    let h = 1e-5;
    (e(p + h) - e(p - h)) / (2.0 * h)
}

fn drift_run(t_final: f64) -> EvolutionResult {
    let params = DiracParams::tachyon(2.0);
    let u = eigenspinor(3.5, &params, Branch::Plus).unwrap();
    let field = gaussian_packet(&packet_grid(), 3.5, 1.0, u).unwrap();
    evolve(&field, &EvolutionConfig::new(params, t_final).with_sample_stride(10)).unwrap()
}

#[test]
fn drift_packet_starts_subluminal_and_drifts_at_group_velocity() {
    let run = drift_run(2.0);
    let v0 = velocity_law(&run.series[0], &DiracParams::tachyon(2.0));
    assert!(v0.abs() <= 1.0, "initial velocity {v0}");
    let slope = late_time_slope(&run.series).unwrap();
    let target = numeric_group_velocity(3.5, 2.0);
    assert!((slope / target - 1.0).abs() < 0.02, "slope {slope} vs {target}");
    assert!(run.boundary_warning.is_none());
    let crossing = light_cone_crossing(&run.series).unwrap();
    assert!(crossing < 1.0);
}

#[test]
fn velocity_law_holds_for_both_mass_types() {
    let run = drift_run(1.0);
    assert!(velocity_residual(&run.series, &DiracParams::tachyon(2.0)).unwrap() < 1e-3);

    let params = DiracParams::normal(2.0);
    let u = eigenspinor(3.5, &params, Branch::Plus).unwrap();
    let field = gaussian_packet(&packet_grid(), 3.5, 1.0, u).unwrap();
    let run = evolve(&field, &EvolutionConfig::new(params, 1.0).with_sample_stride(10)).unwrap();
    assert!(velocity_residual(&run.series, &params).unwrap() < 1e-3);
}

#[test]
fn massless_laws_coincide() {
    let field = gaussian_packet(&packet_grid(), 1.0, 1.0, spinor(0.6, 0.8)).unwrap();
    let run = evolve(&field, &EvolutionConfig::new(DiracParams::tachyon(0.0), 0.5).with_sample_stride(10)).unwrap();
    let a = velocity_residual(&run.series, &DiracParams::tachyon(0.0)).unwrap();
    let b = velocity_residual(&run.series, &DiracParams::normal(0.0)).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn residual_rejects_coarse_sampling() {
    let run = drift_run(0.2);
    let coarse: Vec<ObservableRecord> = run.series.iter().step_by(3).copied().collect();
    assert!(velocity_residual(&coarse, &DiracParams::tachyon(2.0)).is_err());
}

#[test]
fn positive_energy_packet_moves_without_zitterbewegung() {
    let params = DiracParams::tachyon(1.0);
    let field = positive_energy_packet(&packet_grid(), 10.0, 1.0, &params).unwrap();
    let t_final = 2.0;
    let run = evolve(&field, &EvolutionConfig::new(params, t_final).with_sample_stride(10)).unwrap();
    let slope = fitted_slope(&run.series, 0.0, t_final).unwrap();
    let target = numeric_group_velocity(10.0, 1.0);
    assert!((slope - target).abs() < 1e-4, "slope {slope}");
    let x0 = run.series[0].mean_x;
    let wobble = run.series.iter().map(|r| (r.mean_x - x0 - slope * r.time).abs()).fold(0.0, f64::max);
    assert!(wobble < 0.01 * slope * t_final);
}

#[test]
fn snapshots_are_normalized() {
    let params = DiracParams::tachyon(2.0);
    let grid = packet_grid();
    let field = gaussian_packet(&grid, 3.5, 1.0, spinor(1.0, 0.0)).unwrap();
    let config = EvolutionConfig::new(params, 0.5).with_snapshot_stride(250);
    let run = evolve(&field, &config).unwrap();
    assert_eq!(run.snapshots.len(), 5);
    for s in &run.snapshots {
        let total: f64 = s.density.iter().sum::<f64>() * grid.dx();
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn normal_runs_are_unitary_with_potential() {
    let params = DiracParams::normal(1.0).with_slope(2.0);
    let field = gaussian_packet(&packet_grid(), 2.0, 1.0, spinor(1.0, 0.0)).unwrap();
    let run = evolve(&field, &EvolutionConfig::new(params, 2.0)).unwrap();
    for r in &run.series {
        assert!((r.norm_sq - 1.0).abs() < 1e-10);
    }
}

#[test]
fn tachyon_norm_stays_inside_exponential_envelope() {
    let m = 2.0;
    let run = drift_run(2.0);
    for r in &run.series {
        let bound = (2.0 * m * r.time).exp();
        assert!(r.norm_sq <= bound * (1.0 + 1e-12) && r.norm_sq >= (1.0 - 1e-12) / bound);
    }
}

#[test]
fn superluminal_samples_carry_correlation() {
    let params = DiracParams::tachyon(2.0);
    let run = drift_run(2.0);
    let eps = velocity_residual(&run.series, &params).unwrap();
    let mut superluminal = 0;
    for (t, v) in velocities(&run.series) {
        if v.abs() > 1.0 {
            superluminal += 1;
            let r = run.series.iter().find(|r| r.time == t).unwrap();
            assert!(r.correlation_xz.abs() > (v.abs() - 1.0) / (2.0 * params.mass) - eps);
        }
    }
    assert!(superluminal > 0);
}

#[test]
fn split_step_is_second_order() {
    let grid = make_grid(512, 40.0).unwrap();
    let params = DiracParams::tachyon(2.0);
    let u = eigenspinor(3.5, &params, Branch::Plus).unwrap();
    let field = gaussian_packet(&grid, 3.5, 1.0, u).unwrap();
    let x_final = |dt: f64| {
        let run = evolve(&field, &EvolutionConfig::new(params, 1.0).with_dt(dt).with_sample_stride(1_000_000)).unwrap();
        run.series.last().unwrap().mean_x
    };
    let (a, b, c) = (x_final(0.01), x_final(0.005), x_final(0.0025));
    let ratio = (a - b) / (b - c);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn normal_mass_respects_the_light_cone() {
    let grid = packet_grid();
    let params = DiracParams::normal(1.0);
    let field = gaussian_packet(&grid, 0.0, 0.5, spinor(1.0, 0.0)).unwrap();
    let (d0, _, _) = field.densities().unwrap();
    let xs = grid.positions();
    let support: Vec<f64> = xs.iter().zip(&d0).filter(|(_, d)| **d > 1e-8).map(|(x, _)| *x).collect();
    let (lo, hi) = (support[0], *support.last().unwrap());
    let config = EvolutionConfig::new(params, 4.0).with_snapshot_stride(2000);
    let run = evolve(&field, &config).unwrap();
    for s in &run.snapshots {
        let outside: f64 =
            xs.iter().zip(&s.density).filter(|(x, _)| **x < lo - s.time || **x > hi + s.time).map(|(_, d)| d).sum::<f64>() * grid.dx();
        assert!(outside < 1e-6, "t = {}: {outside}", s.time);
    }
}

#[test]
fn boundary_wrap_is_flagged() {
    let grid = make_grid(128, 20.0).unwrap();
    let field = gaussian_packet(&grid, 3.0, 1.0, spinor(0.6, 0.8)).unwrap();
    let run = evolve(&field, &EvolutionConfig::new(DiracParams::normal(0.0), 10.0).with_dt(0.01)).unwrap();
    assert!(run.boundary_warning.is_some());
}

fn klein(params: DiracParams) -> ScatteringOutcome {
    let config = EvolutionConfig::new(params.with_slope(2.0), 20.0);
    scattering_run(&packet_grid(), 8.0, 1.0, &config).unwrap()
}

#[test]
fn massless_packet_tunnels_completely() {
    let out = klein(DiracParams::normal(0.0));
    assert!((out.tunneled - 1.0).abs() < 1e-3);
    assert!((out.tunneled + out.reflected - 1.0).abs() < 1e-6);
}

#[test]
fn scattering_requires_time_to_separate() {
    let config = EvolutionConfig::new(DiracParams::normal(1.0).with_slope(2.0), 1.0);
    let err = scattering_run(&packet_grid(), 8.0, 1.0, &config).unwrap_err();
    assert!(matches!(err, tachyon_core::Error::InconclusiveScattering { .. }));
    let flat = EvolutionConfig::new(DiracParams::normal(1.0), 20.0);
    assert!(scattering_run(&packet_grid(), 8.0, 1.0, &flat).is_err());
}

#[test]
fn observation_does_not_mutate_fields() {
    let field = gaussian_packet(&packet_grid(), 1.0, 1.0, spinor(1.0, 0.0)).unwrap();
    let copy: SpinorField = field.clone();
    let _ = tachyon_core::observables(&field).unwrap();
    assert_eq!(field, copy);
}

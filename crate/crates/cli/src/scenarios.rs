//! One function per scenario; each writes its tables into `dir` and
//! returns the summary table.

use std::path::Path;

use tachyon_core::analytic::{
    correlation_asymptote, dispersion, eigenspinor, group_velocity, tunneling_probability, Branch,
};
use tachyon_core::dirac_evolution::{
    evolve, late_time_slope, light_cone_crossing, scattering_run, velocity_law, velocity_residual, EvolutionConfig,
    EvolutionResult, MAX_RESIDUAL_SPACING,
};
use tachyon_core::duality::{dual_transform, equation_residual, SpacetimeSolution};
use tachyon_core::field::{gaussian_packet, PositiveEnergyPacket};
use tachyon_core::ion_sim::{
    evolve_conditioned, ideal_mapping, measure_correlation_protocol, run_trajectories, sigma_z_form_norm,
    IonParams, IonRun, IonState, MassSource,
};
use tachyon_core::landau_zener::{endpoint_sensitivity, lz_evolve, LZConfig};
use tachyon_core::spinor::spinor;
use tachyon_core::{make_grid, Complex64, DiracParams, MassType, ObservableRecord, SpatialGrid, SpinorField};

use crate::config::{Config, Scenario};
use crate::output::{fmt_f64, write_atomic, write_table, Table};
use crate::plot::{line_chart, Curve};
use crate::CliError;

pub struct Outcome {
    pub summary: Table,
    /// Set when a numerical guard tripped but data was still written.
    pub guard: Option<String>,
}

impl Outcome {
    fn ok(summary: Table) -> Self {
        Self { summary, guard: None }
    }
}

pub fn run_single(scenario: Scenario, cfg: &Config, dir: &Path, plots: bool) -> Result<Outcome, CliError> {
    match scenario {
        Scenario::Dispersion => dispersion_table(cfg, dir, plots),
        Scenario::Free => free(cfg, dir, plots, false),
        Scenario::Correlation => free(cfg, dir, plots, true),
        Scenario::Klein => klein(cfg, dir, plots),
        Scenario::Lz => lz(cfg),
        Scenario::Ion => ion(cfg, dir, plots),
        Scenario::Duality => duality(cfg),
        Scenario::Measurement => measurement(cfg),
        Scenario::Sweep => Err(CliError::Config("nested sweeps are not supported".into())),
    }
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn dirac_params(cfg: &Config) -> Result<DiracParams, CliError> {
    Ok(DiracParams::new(cfg.f64("mass")?, cfg.mass_type()?, cfg.f64("g")?)?)
}

fn grid(cfg: &Config) -> Result<SpatialGrid, CliError> {
    Ok(make_grid(cfg.usize("n_points")?, cfg.f64("extent")?)?)
}

fn evolution_config(cfg: &Config, params: DiracParams) -> Result<EvolutionConfig, CliError> {
    Ok(EvolutionConfig {
        dt: cfg.f64("dt")?,
        t_final: cfg.f64("t_final")?,
        sample_stride: cfg.usize("sample_stride")?,
        snapshot_stride: cfg.usize("snapshot_stride")?,
        params,
    })
}

fn initial_field(cfg: &Config, grid: &SpatialGrid, params: &DiracParams, packet: &str) -> Result<SpinorField, CliError> {
    let p_o = cfg.f64("p_o")?;
    let width = cfg.f64("width")?;
    match packet {
        "gaussian" => {
            let s = match cfg.str("spinor") {
                "plus" => eigenspinor(p_o, params, Branch::Plus)?,
                "up" => spinor(1.0, 0.0),
                "down" => spinor(0.0, 1.0),
                other => return Err(CliError::Config(format!("spinor: expected plus|up|down, got '{other}'"))),
            };
            Ok(gaussian_packet(grid, p_o, width, s)?)
        }
        "positive_energy" => Ok(PositiveEnergyPacket::new(p_o, width)
            .with_max_excluded_weight(cfg.f64("max_excluded_weight")?)
            .build(grid, params)?),
        other => Err(CliError::Config(format!("packet: expected gaussian|positive_energy, got '{other}'"))),
    }
}

const SERIES_HEADER: [&str; 10] =
    ["t", "mean_x", "mean_p", "sigma_x", "sigma_y", "sigma_z", "correlation_xz", "norm_sq", "velocity", "accepted"];

/// Observable series with a finite-difference velocity column (one-sided at
/// the ends). `accepted` is left empty unless given.
fn series_table(series: &[ObservableRecord], accepted: Option<&[usize]>) -> Table {
    let mut t = Table::new(&SERIES_HEADER);
    let n = series.len();
    for (k, r) in series.iter().enumerate() {
        let v = if n < 2 {
            None
        } else {
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            Some((series[b].mean_x - series[a].mean_x) / (series[b].time - series[a].time))
        };
        t.push(vec![
            f(r.time),
            f(r.mean_x),
            f(r.mean_p),
            f(r.mean_sigma_x),
            f(r.mean_sigma_y),
            f(r.mean_sigma_z),
            f(r.correlation_xz),
            f(r.norm_sq),
            opt(v),
            accepted.map(|a| a[k].to_string()).unwrap_or_default(),
        ]);
    }
    t
}

fn snapshots_table(result: &EvolutionResult, grid: &SpatialGrid) -> Table {
    let mut t = Table::new(&["t", "x", "density", "up", "down"]);
    for s in &result.snapshots {
        for (j, &x) in grid.positions().iter().enumerate() {
            t.push(vec![f(s.time), f(x), f(s.density[j]), f(s.up[j]), f(s.down[j])]);
        }
    }
    t
}

fn write_plot(dir: &Path, name: &str, svg: Option<String>) {
    // Plots are conveniences; failures never change the run outcome.
    if let Some(svg) = svg {
        let _ = write_atomic(&dir.join(name), &svg);
    }
}

fn x_of_t_plot(title: &str, series: &[ObservableRecord], extra: Vec<Curve>) -> Option<String> {
    let mut curves = vec![Curve {
        label: "<x>",
        points: series.iter().map(|r| (r.time, r.mean_x)).collect(),
        dashed: false,
    }];
    let x0 = series.first().map(|r| r.mean_x).unwrap_or(0.0);
    let t_end = series.last().map(|r| r.time).unwrap_or(0.0);
    curves.push(Curve { label: "light cone", points: vec![(0.0, x0), (t_end, x0 + t_end)], dashed: true });
    curves.extend(extra);
    line_chart(title, "t", "<x>", &curves)
}

fn boundary_guard(result: &EvolutionResult) -> Option<String> {
    result.boundary_warning.map(|w| {
        format!(
            "boundary wrap: edge density {} from t = {}",
            fmt_f64(w.max_edge_density),
            fmt_f64(w.first_time)
        )
    })
}

fn dispersion_table(cfg: &Config, dir: &Path, plots: bool) -> Result<Outcome, CliError> {
    let m = cfg.f64("mass")?;
    let range = cfg.f64("p_range")?;
    let n = cfg.usize("dispersion_points")?;
    if n < 2 || !(range > 0.0) {
        return Err(CliError::Config("dispersion needs p_range > 0 and dispersion_points >= 2".into()));
    }
    let mut t = Table::new(&["p", "mass_type", "e_plus_re", "e_plus_im", "e_minus_re", "e_minus_im", "group_velocity"]);
    let mut curves = Vec::new();
    for mass_type in [MassType::Normal, MassType::Tachyon] {
        let params = DiracParams::new(m, mass_type, 0.0)?;
        let mut pts = Vec::new();
        for k in 0..n {
            let p = -range + 2.0 * range * k as f64 / (n - 1) as f64;
            let e = dispersion(p, &params);
            let vg = group_velocity(p, &params).ok();
            t.push(vec![f(p), mass_type.to_string(), f(e.plus.re), f(e.plus.im), f(e.minus.re), f(e.minus.im), opt(vg)]);
            pts.push((p, e.plus.re));
        }
        curves.push(Curve { label: mass_type.as_str(), points: pts, dashed: mass_type == MassType::Tachyon });
    }
    if plots {
        write_plot(dir, "dispersion.svg", line_chart("Re E+(p)", "p", "E", &curves));
    }
    Ok(Outcome::ok(t))
}

fn free(cfg: &Config, dir: &Path, plots: bool, correlation: bool) -> Result<Outcome, CliError> {
    let params = dirac_params(cfg)?;
    let grid = grid(cfg)?;
    let field = initial_field(cfg, &grid, &params, cfg.str("packet"))?;
    let config = evolution_config(cfg, params)?;
    let result = evolve(&field, &config)?;
    write_table(dir, "series.csv", &series_table(&result.series, None))?;
    if config.snapshot_stride > 0 {
        write_table(dir, "snapshots.csv", &snapshots_table(&result, &grid))?;
    }
    let series = &result.series;
    let first = series[0];
    let last = *series.last().unwrap_or(&first);
    let spacing = config.dt * config.sample_stride as f64;
    let residual = if series.len() >= 3 && spacing <= MAX_RESIDUAL_SPACING {
        Some(velocity_residual(series, &params)?)
    } else {
        None
    };
    let slope = if series.len() >= 4 { late_time_slope(series).ok() } else { None };
    let p_o = cfg.f64("p_o")?;
    let mut pairs = vec![
        ("mass_type", params.mass_type.to_string()),
        ("mass", f(params.mass)),
        ("p_o", f(p_o)),
        ("initial_velocity", f(velocity_law(&first, &params))),
        ("light_cone_crossing", opt(light_cone_crossing(series))),
        ("late_slope", opt(slope)),
        ("group_velocity", opt(group_velocity(p_o, &params).ok())),
        ("velocity_residual", opt(residual)),
        ("initial_correlation_xz", f(first.correlation_xz)),
        ("final_mean_x", f(last.mean_x)),
        ("final_norm_sq", f(last.norm_sq)),
        ("max_edge_density", opt(result.boundary_warning.map(|w| w.max_edge_density))),
    ];
    if correlation {
        let (_, up, down) = field.densities()?;
        let argmax = |v: &[f64]| {
            let j = v.iter().enumerate().fold(0, |b, (i, &d)| if d > v[b] { i } else { b });
            grid.positions()[j]
        };
        pairs.push(("correlation_asymptote", f(correlation_asymptote(p_o, &params))));
        pairs.push(("argmax_up", f(argmax(&up))));
        pairs.push(("argmax_down", f(argmax(&down))));
    }
    if plots {
        write_plot(dir, "series.svg", x_of_t_plot("<x>(t)", series, Vec::new()));
    }
    Ok(Outcome { summary: Table::single(pairs), guard: boundary_guard(&result) })
}

fn klein(cfg: &Config, dir: &Path, plots: bool) -> Result<Outcome, CliError> {
    let params = dirac_params(cfg)?;
    let grid = grid(cfg)?;
    let config = evolution_config(cfg, params)?;
    let out = scattering_run(&grid, cfg.f64("p_o")?, cfg.f64("width")?, &config)?;
    write_table(dir, "series.csv", &series_table(&out.result.series, None))?;
    if config.snapshot_stride > 0 {
        write_table(dir, "snapshots.csv", &snapshots_table(&out.result, &grid))?;
    }
    let closed = tunneling_probability(&params, params.potential_slope)?;
    let lz_p = lz_probability(cfg, params)?;
    if plots {
        let (density, _, _) = out.result.final_field.densities()?;
        let pts = grid.positions().iter().copied().zip(density).collect();
        write_plot(dir, "final_density.svg", line_chart("final density", "x", "|psi|^2", &[Curve { label: "density", points: pts, dashed: false }]));
    }
    let summary = Table::single(vec![
        ("mass_type", params.mass_type.to_string()),
        ("mass", f(params.mass)),
        ("g", f(params.potential_slope)),
        ("p_o", f(cfg.f64("p_o")?)),
        ("tunneled", f(out.tunneled)),
        ("reflected", f(out.reflected)),
        ("x_cut", f(out.x_cut)),
        ("separation_time", f(out.separation_time)),
        ("lz_tunneled", f(lz_p)),
        ("closed_form", f(closed)),
        ("final_norm_sq", f(out.result.series.last().map(|r| r.norm_sq).unwrap_or(1.0))),
    ]);
    Ok(Outcome { summary, guard: boundary_guard(&out.result) })
}

fn lz_config(cfg: &Config, params: DiracParams) -> Result<LZConfig, CliError> {
    let g = params.potential_slope;
    Ok(match cfg.str("lz_ramp") {
        "auto" => LZConfig::standard(params, g),
        _ => LZConfig::symmetric(params, g, cfg.f64("lz_ramp")?),
    })
}

fn lz_probability(cfg: &Config, params: DiracParams) -> Result<f64, CliError> {
    Ok(tachyon_core::landau_zener::lz_tunnel_probability(&lz_config(cfg, params)?)?)
}

fn lz(cfg: &Config) -> Result<Outcome, CliError> {
    let params = dirac_params(cfg)?;
    let config = lz_config(cfg, params)?;
    let state = lz_evolve(&config, Branch::Plus)?;
    let pops = tachyon_core::landau_zener::branch_populations(&state, &params)?;
    let closed = tunneling_probability(&params, params.potential_slope)?;
    Ok(Outcome::ok(Table::single(vec![
        ("mass_type", params.mass_type.to_string()),
        ("mass", f(params.mass)),
        ("g", f(params.potential_slope)),
        ("p_start", f(config.p_start)),
        ("p_end", f(config.p_end)),
        ("tunneled", f(pops.minus)),
        ("closed_form", f(closed)),
        ("deviation", f(pops.minus - closed)),
        ("endpoint_sensitivity", f(endpoint_sensitivity(&config)?)),
        ("final_norm_sq", f(state.norm_sq())),
    ])))
}

/// Ion parameters from Hz-valued config keys, converted to Dirac units.
fn ion_params(cfg: &Config) -> Result<(IonParams, IonParams), CliError> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let gamma = two_pi * cfg.f64("gamma_hz")?;
    let si = IonParams {
        eta: cfg.f64("eta")?,
        omega_tilde: two_pi * cfg.f64("omega_tilde_hz")?,
        nu: two_pi * cfg.f64("nu_hz")?,
        delta: two_pi * cfg.f64("detuning_hz")?,
        phi: cfg.f64("phi")?,
        gamma,
        gamma_d: cfg.f64("gamma_d_ratio")? * gamma,
        delta_x: cfg.f64("delta_x")?,
        n_max: cfg.usize("n_max")?,
        readout_fidelity: cfg.f64("readout_fidelity")?,
    };
    si.validate()?;
    Ok((si, si.to_natural()))
}

fn ion(cfg: &Config, dir: &Path, plots: bool) -> Result<Outcome, CliError> {
    let (si, natural) = ion_params(cfg)?;
    let source = match cfg.str("mass_source") {
        "decay" => MassSource::Decay,
        "detuning" => MassSource::Detuning,
        other => return Err(CliError::Config(format!("mass_source: expected decay|detuning, got '{other}'"))),
    };
    let mapping = ideal_mapping(&si, source);
    let mut dirac = mapping.dirac;
    if source == MassSource::Decay {
        // With decay as the mass source the detuning must vanish.
        if si.delta != 0.0 {
            return Err(CliError::Config("detuning_hz must be 0 with mass_source=decay".into()));
        }
    } else if si.gamma != 0.0 {
        return Err(CliError::Config("gamma_hz must be 0 with mass_source=detuning".into()));
    }
    dirac.potential_slope = 0.0;
    let p_o = cfg.f64("p_o")?;
    let u = eigenspinor(p_o, &dirac, Branch::Plus)?;
    let initial = IonState::coherent(Complex64::new(0.0, p_o), u, natural.n_max)?;
    let t_final = cfg.f64("t_final")?;
    let run = IonRun::new(&natural, t_final).with_samples(cfg.usize("ion_samples")?);
    let conditioned = evolve_conditioned(&initial, &natural, &run)?;
    write_table(dir, "series.csv", &series_table(&conditioned.series, None))?;

    // Ideal Dirac curve for the same packet.
    let grid = grid(cfg)?;
    let field = gaussian_packet(&grid, p_o, 1.0, u)?;
    let interval = t_final / run.n_samples.max(1) as f64;
    let dt = cfg.f64("dt")?;
    let stride = (interval / dt).ceil().max(1.0) as usize;
    let ideal_config = EvolutionConfig::new(dirac, t_final)
        .with_dt(if t_final > 0.0 { interval / stride as f64 } else { dt })
        .with_sample_stride(stride);
    let ideal = evolve(&field, &ideal_config)?;
    let x_scale = ideal.series.iter().fold(0.0f64, |a, r| a.max(r.mean_x.abs()));
    let deviation = conditioned
        .series
        .iter()
        .zip(&ideal.series)
        .fold(0.0f64, |a, (c, i)| a.max((c.mean_x - i.mean_x).abs()));

    let mut pairs = vec![
        ("m_prime", f(mapping.dirac.mass)),
        ("mass_type", mapping.dirac.mass_type.to_string()),
        ("c_m_per_s", f(mapping.speed_of_light)),
        ("time_unit_s", f(mapping.time_unit)),
        ("t_final", f(t_final)),
        ("success_probability", f(conditioned.success_probability)),
        ("sigma_z_form_norm", f(sigma_z_form_norm(conditioned.success_probability, natural.gamma, t_final))),
        ("analytic_success", f((-0.5 * natural.gamma * t_final).exp())),
        ("ideal_max_deviation", f(if x_scale > 0.0 { deviation / x_scale } else { deviation })),
        ("lamb_dicke_warning", si.lamb_dicke_warning().to_string()),
    ];
    if cfg.usize("n_traj")? > 0 {
        let ens = run_trajectories(&natural, &initial, &run, cfg.usize("n_traj")?, cfg.u64("seed")?)?;
        write_table(dir, "ensemble.csv", &series_table(&ens.conditioned, Some(&ens.accepted)))?;
        let pumping: usize = ens
            .records
            .iter()
            .map(|r| r.jumps.iter().filter(|j| j.channel == tachyon_core::ion_sim::JumpChannel::PumpingError).count())
            .sum();
        pairs.push(("n_traj", ens.n_total.to_string()));
        pairs.push(("no_jump_fraction", f(ens.no_jump_fraction())));
        pairs.push(("pumping_errors", pumping.to_string()));
        pairs.push(("ensemble_light_cone_crossing", opt(light_cone_crossing(&ens.conditioned))));
    }
    if plots {
        let ideal_curve = Curve { label: "ideal", points: ideal.series.iter().map(|r| (r.time, r.mean_x)).collect(), dashed: true };
        write_plot(dir, "series.svg", x_of_t_plot("ion <x>(t)", &conditioned.series, vec![ideal_curve]));
    }
    Ok(Outcome::ok(Table::single(pairs)))
}

fn duality(cfg: &Config) -> Result<Outcome, CliError> {
    let params = dirac_params(cfg)?;
    if params.mass_type != MassType::Normal {
        return Err(CliError::Config("duality starts from a normal-mass solution".into()));
    }
    let grid = grid(cfg)?;
    let packet = cfg.str("packet");
    let field = initial_field(cfg, &grid, &params, packet)?;
    let config = evolution_config(cfg, params)?;
    let n = cfg.usize("duality_n")?;
    if n < 5 || n > grid.n_points() {
        return Err(CliError::Config("duality_n must lie in [5, n_points]".into()));
    }
    let start = grid.n_points() / 2 - n / 2;
    let source = SpacetimeSolution::from_evolution(&field, &config, start, n, n, cfg.usize("duality_t_stride")?)?;
    let dual = dual_transform(&source)?;
    let r_source = equation_residual(&source)?;
    let r_dual = equation_residual(&dual)?;
    Ok(Outcome::ok(Table::single(vec![
        ("mass", f(params.mass)),
        ("g", f(params.potential_slope)),
        ("lattice", n.to_string()),
        ("dx", f(source.dx)),
        ("dt", f(source.dt)),
        ("source_residual", f(r_source)),
        ("dual_residual", f(r_dual)),
        ("ratio", f(r_dual / r_source)),
    ])))
}

fn measurement(cfg: &Config) -> Result<Outcome, CliError> {
    let params = DiracParams::new(cfg.f64("mass")?, cfg.mass_type()?, 0.0)?;
    let state = IonState::positive_energy_packet(cfg.f64("p_o")?, cfg.f64("width")?, &params, cfg.usize("n_max")?)?;
    state.check_truncation()?;
    let direct = state.observables()?;
    let est = measure_correlation_protocol(&state, &cfg.f64_list("k_values")?)?;
    Ok(Outcome::ok(Table::single(vec![
        ("mass_type", params.mass_type.to_string()),
        ("p_o", f(cfg.f64("p_o")?)),
        ("estimate_x_sigma_z", f(est.x_sigma_z)),
        ("estimate_connected", f(est.connected)),
        ("direct_connected", f(direct.correlation_xz)),
        ("error", f(est.connected - direct.correlation_xz)),
        ("correlation_asymptote", f(correlation_asymptote(cfg.f64("p_o")?, &params))),
    ])))
}

//! Flat `key=value` configuration with per-scenario defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Dispersion,
    Free,
    Correlation,
    Klein,
    Lz,
    Ion,
    Duality,
    Measurement,
    Sweep,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Dispersion,
        Scenario::Free,
        Scenario::Correlation,
        Scenario::Klein,
        Scenario::Lz,
        Scenario::Ion,
        Scenario::Duality,
        Scenario::Measurement,
        Scenario::Sweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Dispersion => "dispersion",
            Scenario::Free => "free",
            Scenario::Correlation => "correlation",
            Scenario::Klein => "klein",
            Scenario::Lz => "lz",
            Scenario::Ion => "ion",
            Scenario::Duality => "duality",
            Scenario::Measurement => "measurement",
            Scenario::Sweep => "sweep",
        }
    }

    /// Defaults that differ from the base table for this scenario.
    fn overlay(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Scenario::Klein => &[("p_o", "8"), ("mass", "1"), ("g", "2"), ("t_final", "20")],
            Scenario::Correlation => &[("p_o", "10"), ("mass", "1"), ("packet", "positive_energy"), ("t_final", "1")],
            Scenario::Lz => &[("mass", "1"), ("g", "2")],
            Scenario::Ion => &[("t_final", "1")],
            Scenario::Duality => &[("mass", "1"), ("g", "2"), ("mass_type", "normal"), ("p_o", "2")],
            Scenario::Measurement => &[("p_o", "10"), ("mass", "1"), ("n_max", "256")],
            _ => &[],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown scenario '{s}'")))
    }
}

/// `(key, default, description)`.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("scenario", "free", "dispersion|free|correlation|klein|lz|ion|duality|measurement|sweep"),
    ("output_dir", "out", "directory for CSV, manifest and plots"),
    ("seed", "1", "master seed for trajectories"),
    ("emit_plots", "false", "write SVG plots"),
    ("mass", "2", "mass in units of 1/(cΔ)"),
    ("mass_type", "tachyon", "normal|tachyon"),
    ("g", "0", "linear potential slope"),
    ("p_o", "3.5", "mean momentum of the initial packet"),
    ("width", "1", "packet width"),
    ("packet", "gaussian", "gaussian|positive_energy"),
    ("spinor", "plus", "plus (u₊(p_o))|up|down for gaussian packets"),
    ("max_excluded_weight", "1e-8", "tolerated complex-band weight of positive-energy packets"),
    ("n_points", "1024", "grid points"),
    ("extent", "40", "grid length"),
    ("dt", "5e-4", "split-step time step"),
    ("t_final", "2", "final time in units of Δ/c"),
    ("sample_stride", "20", "steps between observable samples"),
    ("snapshot_stride", "0", "steps between density snapshots; 0 disables"),
    ("p_range", "5", "dispersion table covers [-p_range, p_range]"),
    ("dispersion_points", "201", "rows per mass type in the dispersion table"),
    ("lz_ramp", "auto", "Landau-Zener ramp endpoint |p|, or auto"),
    ("eta", "0.05", "Lamb-Dicke parameter"),
    ("omega_tilde_hz", "1e5", "carrier Rabi frequency / 2π"),
    ("nu_hz", "1e6", "trap frequency / 2π"),
    ("detuning_hz", "0", "mass detuning Ω / 2π"),
    ("phi", "0", "laser phase"),
    ("gamma_hz", "8e4", "decay rate of the up state / 2π"),
    ("gamma_d_ratio", "0.002", "pumping-error rate as a fraction of gamma"),
    ("delta_x", "3.4e-9", "ground-state size in meters"),
    ("n_max", "128", "Fock cutoff"),
    ("readout_fidelity", "1", "probability of detecting a decayed ion"),
    ("mass_source", "decay", "decay (imaginary mass) | detuning (real mass)"),
    ("n_traj", "0", "quantum trajectories; 0 runs only the conditioned evolution"),
    ("ion_samples", "100", "observable samples over the ion run"),
    ("k_values", "-0.02,-0.01,0.01,0.02", "displacement strengths of the measurement protocol"),
    ("duality_n", "64", "lattice points per axis"),
    ("duality_t_stride", "4", "split steps between lattice rows"),
    ("sweep", "", "cartesian grid, e.g. g:0.5,1,2;mass:1,2"),
    ("sweep_scenario", "lz", "scenario run in every sweep cell"),
];

pub fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _, _)| *k == key)
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_lines(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value, got '{raw}'", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parses command-line overrides: `key=value`, `--key value` or `--key=value`.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        if let Some(flag) = arg.strip_prefix("--") {
            if let Some((k, v)) = flag.split_once('=') {
                out.push((k.to_string(), v.to_string()));
            } else {
                let v = it.next().ok_or_else(|| CliError::Config(format!("--{flag} needs a value")))?;
                out.push((flag.to_string(), v.clone()));
            }
        } else if let Some((k, v)) = arg.split_once('=') {
            out.push((k.to_string(), v.to_string()));
        } else {
            return Err(CliError::Config(format!("cannot parse argument '{arg}'")));
        }
    }
    Ok(out)
}

/// Fully resolved configuration: base defaults, then scenario defaults,
/// then user settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn resolve(settings: &[(String, String)]) -> Result<Self, CliError> {
        let mut user = BTreeMap::new();
        for (k, v) in settings {
            if !is_known(k) {
                return Err(CliError::Config(format!("unknown key '{k}'")));
            }
            user.insert(k.clone(), v.clone());
        }
        let scenario: Scenario = user.get("scenario").map(String::as_str).unwrap_or("free").parse()?;
        let overlay_scenario = if scenario == Scenario::Sweep {
            user.get("sweep_scenario").map(String::as_str).unwrap_or("lz").parse()?
        } else {
            scenario
        };
        let mut values: BTreeMap<String, String> =
            KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect();
        for (k, v) in overlay_scenario.overlay() {
            values.insert(k.to_string(), v.to_string());
        }
        values.extend(user);
        let config = Self { values };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.scenario()?;
        let sweep_scenario: Scenario = self.str("sweep_scenario").parse()?;
        if sweep_scenario == Scenario::Sweep {
            return Err(CliError::Config("sweep_scenario cannot be sweep".into()));
        }
        self.bool("emit_plots")?;
        self.mass_type()?;
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        self.str("scenario").parse()
    }

    pub fn mass_type(&self) -> Result<tachyon_core::MassType, CliError> {
        self.str("mass_type").parse().map_err(|e: tachyon_core::Error| CliError::Config(e.to_string()))
    }

    pub fn str(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("unregistered key {key}"))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let raw = self.str(key);
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Config(format!("{key}: expected a finite number, got '{raw}'")))
    }

    pub fn usize(&self, key: &str) -> Result<usize, CliError> {
        let raw = self.str(key);
        raw.parse().map_err(|_| CliError::Config(format!("{key}: expected a nonnegative integer, got '{raw}'")))
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        let raw = self.str(key);
        raw.parse().map_err(|_| CliError::Config(format!("{key}: expected a nonnegative integer, got '{raw}'")))
    }

    pub fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.str(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(CliError::Config(format!("{key}: expected true or false, got '{other}'"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.str(key)
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("{key}: cannot parse '{s}' as a number")))
            })
            .collect()
    }

    /// Settings as `key=value` pairs, sorted by key.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Copy with one entry replaced, re-resolving scenario defaults is not
    /// needed because only user-visible keys change.
    pub fn with(&self, key: &str, value: &str) -> Result<Self, CliError> {
        if !is_known(key) {
            return Err(CliError::Config(format!("unknown key '{key}'")));
        }
        let mut values = self.values.clone();
        values.insert(key.to_string(), value.to_string());
        let c = Self { values };
        c.validate()?;
        Ok(c)
    }
}

/// `g:0.5,1;mass:1,2` → `[("g", ["0.5", "1"]), ("mass", ["1", "2"])]`.
pub fn parse_sweep(spec: &str) -> Result<Vec<(String, Vec<String>)>, CliError> {
    let mut axes = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) =
            part.split_once(':').ok_or_else(|| CliError::Config(format!("sweep axis '{part}' lacks ':'")))?;
        let key = key.trim();
        if !is_known(key) || matches!(key, "scenario" | "sweep" | "sweep_scenario" | "output_dir") {
            return Err(CliError::Config(format!("cannot sweep over '{key}'")));
        }
        let values: Vec<String> =
            values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
        if values.is_empty() {
            return Err(CliError::Config(format!("sweep axis '{key}' has no values")));
        }
        axes.push((key.to_string(), values));
    }
    if axes.is_empty() {
        return Err(CliError::Config("sweep needs at least one axis".into()));
    }
    Ok(axes)
}

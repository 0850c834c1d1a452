//! Sweeps, pulse runs and spectrum scans driven by a [`Config`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use superlab_core::dynamics::{
    detect_threshold, integrate, make_velocity_ensemble, photons_per_atom, pulse_duration,
    IntegratorConfig, RampSchedule, SystemState, TimeTrace,
};
use superlab_core::poles::{apply_delta_shift, pole_threshold_numeric};
use superlab_core::spectrum::{critical_transmission, default_probe_grid, reference_threshold};
use superlab_core::thresholds::{
    threshold_decay, threshold_doppler, threshold_ideal, threshold_single_beam,
};
use superlab_core::{Error, Geometry, ModelParams, ScaledParams, ThresholdResult, KHZ};

use crate::config::{Config, ConfigError, Provenance, REGISTRY};
use crate::plot::{LinePlot, Series};
use crate::{CliError, Command, Outcome, RunOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ThresholdVsOmega0,
    ThresholdVsOmega,
    SingleBeamVsDetuning,
    CoPropGap,
    PulseTrace,
    Spectrum,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ThresholdVsOmega0 => "threshold_vs_omega0",
            Mode::ThresholdVsOmega => "threshold_vs_omega",
            Mode::SingleBeamVsDetuning => "single_beam_vs_detuning",
            Mode::CoPropGap => "coprop_gap",
            Mode::PulseTrace => "pulse_trace",
            Mode::Spectrum => "spectrum",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Mode::ThresholdVsOmega0,
            Mode::ThresholdVsOmega,
            Mode::SingleBeamVsDetuning,
            Mode::CoPropGap,
            Mode::PulseTrace,
            Mode::Spectrum,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
    }

    fn command(self) -> Command {
        match self {
            Mode::PulseTrace => Command::Pulse,
            Mode::Spectrum => Command::Spectrum,
            _ => Command::Threshold,
        }
    }

    /// Swept parameter and its default range in kHz.
    fn axis(self) -> Option<(&'static str, f64, f64)> {
        match self {
            Mode::ThresholdVsOmega0 => Some(("omega_0", 5.0, 500.0)),
            Mode::ThresholdVsOmega => Some(("omega", 5.0, 500.0)),
            Mode::SingleBeamVsDetuning => Some(("delta_cs", -500.0, 500.0)),
            Mode::CoPropGap => Some(("omega_0", -600.0, 600.0)),
            _ => None,
        }
    }

    fn default_models(self) -> &'static [ModelKind] {
        match self {
            Mode::SingleBeamVsDetuning => &[ModelKind::SingleBeam, ModelKind::PoleSingle],
            Mode::CoPropGap => &[ModelKind::PoleCoProp],
            _ => &[ModelKind::Ideal, ModelKind::Doppler],
        }
    }
}

/// Resolves the run mode from the `mode` key or the subcommand.
pub fn resolve_mode(cfg: &Config, command: Command) -> Result<Mode, ConfigError> {
    let fallback = match command {
        Command::Pulse => Mode::PulseTrace,
        Command::Spectrum => Mode::Spectrum,
        Command::Threshold | Command::Validate => Mode::ThresholdVsOmega0,
    };
    let Some(name) = cfg.mode() else {
        return Ok(fallback);
    };
    let mode = Mode::parse(name).expect("registry restricts mode values");
    if command != Command::Validate && mode.command() != command {
        return Err(ConfigError {
            problems: vec![format!(
                "mode `{name}` cannot run under the `{}` command",
                command.as_str()
            )],
        });
    }
    Ok(mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelKind {
    Ideal,
    Decay,
    Doppler,
    SingleBeam,
    PoleSingle,
    PoleCoProp,
    PoleCounterProp,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ideal => "ideal",
            ModelKind::Decay => "decay",
            ModelKind::Doppler => "doppler",
            ModelKind::SingleBeam => "single_beam",
            ModelKind::PoleSingle => "pole_single",
            ModelKind::PoleCoProp => "pole_coprop",
            ModelKind::PoleCounterProp => "pole_counterprop",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            ModelKind::Ideal,
            ModelKind::Decay,
            ModelKind::Doppler,
            ModelKind::SingleBeam,
            ModelKind::PoleSingle,
            ModelKind::PoleCoProp,
            ModelKind::PoleCounterProp,
        ]
        .into_iter()
        .find(|m| m.as_str() == s)
    }

    pub fn geometry(self) -> Geometry {
        match self {
            ModelKind::SingleBeam | ModelKind::PoleSingle => Geometry::Single,
            ModelKind::PoleCoProp => Geometry::CoProp,
            _ => Geometry::CounterProp,
        }
    }

    fn needs_doppler_width(self) -> bool {
        matches!(
            self,
            ModelKind::Doppler | ModelKind::PoleSingle | ModelKind::PoleCoProp | ModelKind::PoleCounterProp
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: &'static str,
    /// Endpoints in kHz.
    pub start: f64,
    pub stop: f64,
    pub n_points: usize,
}

impl SweepAxis {
    /// Sweep values in kHz, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// A threshold sweep: fixed parameters, one swept axis and the models
/// evaluated at each point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub mode: Mode,
    /// User-set model-level parameters (external units).
    pub fixed: BTreeMap<String, f64>,
    pub axis: SweepAxis,
    pub models: Vec<ModelKind>,
    /// Resolved parameters before the axis value is applied.
    pub base: ModelParams,
}

const FIXABLE: &[&str] = &["omega", "omega_0", "delta", "gamma_d", "gamma", "sigma_z0", "kappa"];

impl SweepSpec {
    pub fn from_config(cfg: &Config) -> Result<Self, ConfigError> {
        let mode = resolve_mode(cfg, Command::Threshold)?;
        let (name, start, stop) = mode.axis().expect("threshold modes have an axis");
        let axis = SweepAxis {
            name,
            start: cfg.external("sweep_start").unwrap_or(start),
            stop: cfg.external("sweep_stop").unwrap_or(stop),
            n_points: cfg.count("sweep_points").unwrap_or(50) as usize,
        };
        let models = match cfg.names("models") {
            Some(names) => names
                .iter()
                .map(|n| ModelKind::parse(n).expect("registry restricts model names"))
                .collect(),
            None => mode.default_models().to_vec(),
        };
        let fixed = FIXABLE
            .iter()
            .filter(|k| cfg.is_set(k))
            .map(|k| (k.to_string(), cfg.external(k).expect("numeric key")))
            .collect();
        let base = cfg.model_params().map_err(|e| ConfigError {
            problems: vec![e.to_string()],
        })?;
        let spec = SweepSpec { mode, fixed, axis, models, base };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        if self.axis.n_points < 2 {
            problems.push(format!("sweep needs at least 2 points, got {}", self.axis.n_points));
        }
        if !(self.axis.start.is_finite() && self.axis.stop.is_finite()) || self.axis.start == self.axis.stop {
            problems.push("sweep_start and sweep_stop must be finite and distinct".into());
        }
        let clash = match self.axis.name {
            "delta_cs" => "omega",
            other => other,
        };
        if self.fixed.contains_key(clash) {
            problems.push(format!(
                "`{clash}` is swept in mode {} and cannot also be fixed",
                self.mode.as_str()
            ));
        }
        if self.models.is_empty() {
            problems.push("models must name at least one threshold model".into());
        }
        if self.models.iter().any(|m| m.needs_doppler_width()) && !(self.base.gamma_d > 0.0) {
            problems.push("Doppler and pole models need gamma_d > 0".into());
        }
        if self.base.sigma_z0 >= 0.0
            && self
                .models
                .iter()
                .any(|m| matches!(m, ModelKind::Decay | ModelKind::SingleBeam))
        {
            problems.push("decay-limited thresholds need sigma_z0 < 0".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { problems })
        }
    }

    /// Parameters at sweep value `x_khz`.
    pub fn params_at(&self, x_khz: f64) -> ModelParams {
        let mut mp = self.base.clone();
        let x = x_khz * KHZ;
        match self.axis.name {
            "omega_0" => mp.omega_0 = x,
            "omega" => mp.omega = x,
            _ => mp.omega = -x - mp.omega_0,
        }
        mp
    }
}

/// Threshold of one model at one sweep value (kHz). Independent of any other
/// point, so every sweep row can be recomputed alone.
pub fn threshold_point(spec: &SweepSpec, model: ModelKind, x_khz: f64) -> superlab_core::Result<ThresholdResult> {
    let mp = spec.params_at(x_khz);
    match model {
        ModelKind::Ideal => threshold_ideal(mp.omega, mp.omega_0, mp.kappa),
        ModelKind::Decay => threshold_decay(mp.omega, mp.omega_0, mp.kappa, mp.gamma, mp.sigma_z0, mp.delta),
        ModelKind::Doppler => threshold_doppler(mp.omega, mp.omega_0, mp.kappa, mp.gamma_d, mp.delta),
        ModelKind::SingleBeam => {
            threshold_single_beam(-(mp.omega + mp.omega_0), mp.kappa, mp.gamma, mp.sigma_z0)
        }
        ModelKind::PoleSingle | ModelKind::PoleCoProp | ModelKind::PoleCounterProp => {
            let sp = apply_delta_shift(&ScaledParams::from_model(&mp)?, mp.delta);
            pole_threshold_numeric(model.geometry(), &sp)
        }
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub const SWEEP_HEADER: &str = "axis_value_khz,lambda_c_khz,exists,model,geometry";

/// One CSV row and whether the point counts as a numerical failure.
/// A threshold that does not exist in the requested regime is a valid
/// result, not a failure.
pub fn sweep_row(model: ModelKind, x_khz: f64, res: &superlab_core::Result<ThresholdResult>) -> (String, bool) {
    let (lambda, exists, failed) = match res {
        Ok(r) => match r.lambda_c {
            Some(l) => (fmt_num(l / KHZ), true, false),
            None => ("nan".to_string(), false, false),
        },
        Err(Error::InvalidRegime(_)) => ("nan".to_string(), false, false),
        Err(_) => ("nan".to_string(), false, true),
    };
    (
        format!(
            "{},{lambda},{exists},{},{}",
            fmt_num(x_khz),
            model.as_str(),
            model.geometry().as_str()
        ),
        failed,
    )
}

/// All sweep CSVs in memory, one per model in `spec.models` order.
pub fn sweep_tables(spec: &SweepSpec, jobs: Option<usize>) -> Result<Vec<(ModelKind, String, usize)>, CliError> {
    let xs = spec.axis.values();
    let work: Vec<(ModelKind, f64)> = spec
        .models
        .iter()
        .flat_map(|&m| xs.iter().map(move |&x| (m, x)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs.filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(ConfigError { problems: vec![format!("cannot start worker pool: {e}")] }))?;
    let rows: Vec<(String, bool)> = pool.install(|| {
        work.par_iter()
            .map(|&(m, x)| sweep_row(m, x, &threshold_point(spec, m, x)))
            .collect()
    });
    let mut out = Vec::new();
    for (k, model) in spec.models.iter().enumerate() {
        let chunk = &rows[k * xs.len()..(k + 1) * xs.len()];
        let mut csv = String::from(SWEEP_HEADER);
        csv.push('\n');
        let mut failed = 0;
        for (row, bad) in chunk {
            csv.push_str(row);
            csv.push('\n');
            failed += usize::from(*bad);
        }
        out.push((*model, csv, failed));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ManifestEntry {
    key: &'static str,
    value: String,
    unit: &'static str,
    provenance: &'static str,
}

#[derive(Serialize)]
struct Manifest {
    software: &'static str,
    version: &'static str,
    command: &'static str,
    mode: &'static str,
    config_file: String,
    config: Vec<ManifestEntry>,
    derived_khz: BTreeMap<&'static str, f64>,
    outputs: Vec<String>,
    total_points: usize,
    failed_points: usize,
    summary: BTreeMap<String, f64>,
    wall_time_s: f64,
}

fn unit_of(kind: crate::config::Kind) -> &'static str {
    use crate::config::Kind;
    match kind {
        Kind::Number(u) => u.label(),
        Kind::Count => "count",
        Kind::Flag => "flag",
        _ => "text",
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

struct Writer<'a> {
    opts: &'a RunOptions,
    stem: String,
    outputs: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(opts: &'a RunOptions, config_path: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(&opts.out_dir)
            .map_err(|source| CliError::Io { path: opts.out_dir.clone(), source })?;
        let stem = config_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "superlab".into());
        Ok(Self { opts, stem, outputs: Vec::new() })
    }

    fn put(&mut self, suffix: &str, contents: &str) -> Result<(), CliError> {
        let path = self.opts.out_dir.join(format!("{}{suffix}", self.stem));
        write_file(&path, contents)?;
        self.outputs.push(path);
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        mut self,
        cfg: &Config,
        config_path: &Path,
        command: Command,
        mode: Mode,
        total_points: usize,
        failed_points: usize,
        summary: BTreeMap<String, f64>,
        started: Instant,
    ) -> Result<Outcome, CliError> {
        let manifest_path = self.opts.out_dir.join(format!("{}_manifest.json", self.stem));
        let mut derived_khz = BTreeMap::new();
        if let Ok(mp) = cfg.model_params() {
            for (k, v) in [
                ("omega", mp.omega),
                ("omega_0", mp.omega_0),
                ("delta", mp.delta),
                ("gamma_d", mp.gamma_d),
                ("lambda_r", mp.lambda_r),
                ("lambda_s", mp.lambda_s),
                ("omega_d", mp.omega_d),
                ("delta_omega_ss", mp.delta_omega_ss),
            ] {
                derived_khz.insert(k, v / KHZ);
            }
        }
        let mut outputs: Vec<String> = self.outputs.iter().map(|p| p.display().to_string()).collect();
        outputs.push(manifest_path.display().to_string());
        let manifest = Manifest {
            software: "superlab",
            version: env!("CARGO_PKG_VERSION"),
            command: command.as_str(),
            mode: mode.as_str(),
            config_file: config_path.display().to_string(),
            config: REGISTRY
                .iter()
                .filter_map(|k| {
                    cfg.raw(k.name).map(|v| ManifestEntry {
                        key: k.name,
                        value: v.to_string(),
                        unit: unit_of(k.kind),
                        provenance: cfg.provenance(k.name).as_str(),
                    })
                })
                .collect(),
            derived_khz,
            outputs,
            total_points,
            failed_points,
            summary: summary.clone(),
            wall_time_s: started.elapsed().as_secs_f64(),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        write_file(&manifest_path, &(json + "\n"))?;
        self.outputs.push(manifest_path);
        Ok(Outcome { outputs: self.outputs, total_points, failed_points, summary })
    }
}

/// Threshold sweep: one CSV per model, a manifest and optionally a plot.
pub fn run_sweep(cfg: &Config, config_path: &Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let spec = SweepSpec::from_config(cfg)?;
    let tables = sweep_tables(&spec, opts.jobs)?;
    let mut w = Writer::new(opts, config_path)?;
    let mut failed = 0;
    for (model, csv, bad) in &tables {
        w.put(&format!("_{}.csv", model.as_str()), csv)?;
        failed += bad;
    }
    if opts.plot {
        let xs = spec.axis.values();
        let series = tables
            .iter()
            .map(|(model, csv, _)| Series {
                name: model.as_str().to_string(),
                points: csv
                    .lines()
                    .skip(1)
                    .zip(&xs)
                    .map(|(line, &x)| {
                        let y = line.split(',').nth(1).and_then(|s| s.parse().ok()).unwrap_or(f64::NAN);
                        (x, y)
                    })
                    .collect(),
            })
            .collect();
        let plot = LinePlot {
            title: format!("critical coupling, {}", spec.mode.as_str()),
            x_label: format!("{} / 2pi (kHz)", spec.axis.name),
            y_label: "lambda_c / 2pi (kHz)".into(),
            series,
            markers: Vec::new(),
            log_y: false,
        };
        w.put(".svg", &plot.to_svg())?;
    }
    let total = spec.models.len() * spec.axis.n_points;
    w.finish(cfg, config_path, Command::Threshold, spec.mode, total, failed, BTreeMap::new(), started)
}

/// Ramp run from the configuration, without writing anything.
pub fn pulse_trace(cfg: &Config) -> Result<TimeTrace, CliError> {
    resolve_mode(cfg, Command::Pulse)?;
    let mp = cfg.model_params()?;
    let lambda_r = cfg.canonical("lambda_r_max").unwrap_or(mp.lambda_r);
    let lambda_s = cfg.canonical("lambda_s_max").unwrap_or(mp.lambda_s);
    let get = |n: &str| cfg.canonical(n).expect("dynamics keys have defaults");
    let n_classes = cfg.count("n_classes").expect("n_classes has a default") as usize;
    let classes = make_velocity_ensemble(
        mp.gamma_d,
        n_classes,
        get("trap_freq"),
        cfg.flag("modulated").unwrap_or(false),
    )?;
    let state = SystemState::normal_phase(&classes, mp.sigma_z0);
    let schedule = RampSchedule::linear(lambda_r, lambda_s, get("ramp_time"), get("hold_time"));
    let icfg = IntegratorConfig {
        rtol: get("rtol"),
        sample_dt: get("sample_dt"),
        alpha_seed: get("alpha_seed"),
        seed_floor: cfg.flag("seed_floor").unwrap_or(true),
        ..Default::default()
    };
    Ok(integrate(&state, &mp, &schedule, &icfg)?)
}

pub fn run_pulse(cfg: &Config, config_path: &Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let trace = pulse_trace(cfg)?;
    let mut w = Writer::new(opts, config_path)?;
    w.put("_pulse.csv", &trace.to_csv())?;
    let mut summary = BTreeMap::new();
    summary.insert("photons_per_atom".into(), photons_per_atom(&trace, trace.n_atoms));
    summary.insert("pulse_duration_ms".into(), pulse_duration(&trace, 0.5) * 1e3);
    summary.insert(
        "peak_intensity_photons".into(),
        trace.intensity.iter().copied().fold(0.0, f64::max),
    );
    let count = cfg.external("count_threshold").unwrap_or(10.0);
    if let Ok(l) = detect_threshold(&trace, count) {
        summary.insert("detected_lambda_khz".into(), l / KHZ);
    }
    if opts.plot {
        let floor = summary["peak_intensity_photons"] * 1e-12;
        let markers = if cfg.provenance("trap_freq") == Provenance::User {
            let half_period = std::f64::consts::PI / cfg.canonical("trap_freq").unwrap_or(0.0);
            let end = trace.t.last().copied().unwrap_or(0.0);
            if half_period.is_finite() && half_period > 0.0 {
                (1..).map(|k| k as f64 * half_period).take_while(|&t| t <= end).map(|t| t * 1e3).collect()
            } else {
                Vec::new()
            }
        } else {
            Vec::new()
        };
        let plot = LinePlot {
            title: "intracavity photon number".into(),
            x_label: "t (ms)".into(),
            y_label: "photons".into(),
            series: vec![Series {
                name: "intensity".into(),
                points: trace
                    .t
                    .iter()
                    .zip(&trace.intensity)
                    .map(|(t, v)| (t * 1e3, v.max(floor)))
                    .collect(),
            }],
            markers,
            log_y: true,
        };
        w.put(".svg", &plot.to_svg())?;
    }
    w.finish(cfg, config_path, Command::Pulse, Mode::PulseTrace, trace.len(), 0, summary, started)
}

/// Concatenated spectrum CSV for every `lambda_frac`.
pub fn spectrum_table(cfg: &Config) -> Result<(String, BTreeMap<String, f64>, Vec<Series>), CliError> {
    resolve_mode(cfg, Command::Spectrum)?;
    let mp = cfg.model_params()?;
    let use_doppler = cfg.flag("use_doppler").unwrap_or(true);
    let points = cfg.count("probe_points").expect("probe_points has a default") as usize;
    let grid = default_probe_grid(&mp, points);
    let fracs = cfg.numbers("lambda_frac").expect("lambda_frac has a default");
    let mut csv = String::new();
    let mut summary = BTreeMap::new();
    let mut series = Vec::new();
    if fracs.iter().any(|&f| f > 0.0) {
        summary.insert("reference_threshold_khz".into(), reference_threshold(&mp, use_doppler)? / KHZ);
    }
    for &frac in fracs {
        let s = critical_transmission(&grid, &mp, frac, use_doppler)?;
        let body = s.to_csv();
        if csv.is_empty() {
            csv.push_str(&body);
        } else {
            csv.push_str(body.split_once('\n').map(|x| x.1).unwrap_or(""));
        }
        let (x, t) = s.peak();
        summary.insert(format!("peak_transmission_{frac}"), t);
        summary.insert(format!("peak_detuning_khz_{frac}"), x / KHZ);
        series.push(Series {
            name: format!("lambda/lambda_c = {frac}"),
            points: s.probe_detuning.iter().zip(&s.transmission).map(|(x, t)| (x / KHZ, *t)).collect(),
        });
    }
    Ok((csv, summary, series))
}

pub fn run_spectrum(cfg: &Config, config_path: &Path, opts: &RunOptions) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let (csv, summary, series) = spectrum_table(cfg)?;
    let mut w = Writer::new(opts, config_path)?;
    w.put("_spectrum.csv", &csv)?;
    let total = csv.lines().count().saturating_sub(1);
    if opts.plot {
        let plot = LinePlot {
            title: "probe transmission".into(),
            x_label: "probe detuning / 2pi (kHz)".into(),
            y_label: "transmission".into(),
            series,
            markers: Vec::new(),
            log_y: false,
        };
        w.put(".svg", &plot.to_svg())?;
    }
    w.finish(cfg, config_path, Command::Spectrum, Mode::Spectrum, total, 0, summary, started)
}

/// Resolved configuration echo, or every problem found.
pub fn validate_config(path: &Path) -> Result<String, ConfigError> {
    let cfg = Config::from_file(path)?;
    resolve_mode(&cfg, Command::Validate)?;
    Ok(cfg.echo())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> SweepSpec {
        SweepSpec::from_config(&Config::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn axis_values_hit_endpoints() {
        let a = SweepAxis { name: "omega", start: 0.1, stop: 0.7, n_points: 7 };
        let v = a.values();
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[6], 0.7);
    }

    #[test]
    fn fixed_axis_key_rejected() {
        let cfg = Config::parse("mode = threshold_vs_omega0\nomega_0 = 215\n").unwrap();
        let err = SweepSpec::from_config(&cfg).unwrap_err();
        assert!(err.problems[0].contains("omega_0"), "{err}");
        let cfg = Config::parse("mode = single_beam_vs_detuning\nomega = 100\n").unwrap();
        assert!(SweepSpec::from_config(&cfg).is_err());
    }

    #[test]
    fn mode_must_match_command() {
        let cfg = Config::parse("mode = spectrum\n").unwrap();
        assert!(resolve_mode(&cfg, Command::Threshold).is_err());
        assert_eq!(resolve_mode(&cfg, Command::Spectrum).unwrap(), Mode::Spectrum);
        assert_eq!(resolve_mode(&cfg, Command::Validate).unwrap(), Mode::Spectrum);
    }

    #[test]
    fn fmt_num_round_trips() {
        for v in [0.0, 1.0, -2.5, 1e-300, 123.456789012345678, 6.02e23, 0.1 + 0.2, -7.5e-9] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn regime_gap_is_not_a_failure() {
        let s = spec("omega = 100\nsweep_start = -50\nsweep_stop = 50\nsweep_points = 3\nmodels = ideal\n");
        let res = threshold_point(&s, ModelKind::Ideal, -50.0);
        let (row, failed) = sweep_row(ModelKind::Ideal, -50.0, &res);
        assert_eq!(row, "-50,nan,false,ideal,counterprop");
        assert!(!failed);
    }

    #[test]
    fn doppler_lies_above_ideal_for_small_omega0() {
        let s = spec("omega = 100\ngamma_d = 59\ndelta = 0\nsweep_start = 5\nsweep_stop = 60\nsweep_points = 5\n");
        for x in s.axis.values() {
            let ideal = threshold_point(&s, ModelKind::Ideal, x).unwrap().value().unwrap();
            let dop = threshold_point(&s, ModelKind::Doppler, x).unwrap().value().unwrap();
            assert!(dop > ideal, "omega_0 = {x}: {dop} <= {ideal}");
        }
    }

    #[test]
    fn delta_cs_axis_sets_omega() {
        let s = spec("mode = single_beam_vs_detuning\nomega_0 = 215\n");
        let mp = s.params_at(-300.0);
        assert!((mp.omega + mp.omega_0 - 300.0 * KHZ).abs() < 1e-9 * KHZ);
    }
}

//! Semiclassical mean-field dynamics of the driven Dicke model.
//!
//! The cavity amplitude `alpha` is scaled by √N and each velocity class
//! carries a normalised Bloch vector of length ≤ 1/2 (ground state
//! `sz = -1/2`). The equations of motion are
//!
//! ```text
//! dα/dt  = -(κ + i(ω + δ s̄z)) α - i λr s̄₋ - i λs s̄₊
//! ds/dt  = B × s - γ (sx, sy, sz + 1/2)
//! B      = (2 Re β, -2 Im β, ω₀ + δ|α|² + k·v(t)),   β = λr α + λs α*
//! ```
//!
//! with `s± = sx ∓ i sy` and bars denoting weighted class averages.

mod ensemble;
mod integrator;

pub use ensemble::{gauss_hermite, make_velocity_ensemble, VelocityClass};
pub use integrator::IntegratorConfig;

use crate::params::ModelParams;
use crate::{Complex, Error, Result};

/// Bin width used when converting the output flux to detector counts.
pub const DETECTION_BIN: f64 = 5e-6;
/// Default photon count per bin that marks detection.
pub const DEFAULT_COUNT_THRESHOLD: f64 = 10.0;

/// Mean-field state: cavity amplitude (units of √N) and velocity classes.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub alpha: Complex,
    pub classes: Vec<VelocityClass>,
}

impl SystemState {
    /// Empty cavity with every class at `sz = sigma_z0` and no coherence.
    pub fn normal_phase(classes: &[VelocityClass], sigma_z0: f64) -> Self {
        Self {
            alpha: Complex::new(0.0, 0.0),
            classes: classes
                .iter()
                .map(|c| VelocityClass {
                    sx: 0.0,
                    sy: 0.0,
                    sz: sigma_z0,
                    ..*c
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::InvalidState("state has no velocity classes".into()));
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::InvalidState("cavity amplitude is not finite".into()));
        }
        let total: f64 = self.classes.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("class weights sum to {total}, not 1")));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if !(c.bloch_length_sq() <= 0.25 + 1e-9) {
                return Err(Error::InvalidState(format!(
                    "class {i} has Bloch length² {} > 1/4",
                    c.bloch_length_sq()
                )));
            }
            if !(c.weight >= 0.0) {
                return Err(Error::InvalidState(format!("class {i} has negative weight")));
            }
        }
        Ok(())
    }

    /// Weighted mean of `sz`, i.e. ⟨J_z⟩/N.
    pub fn mean_sz(&self) -> f64 {
        self.classes.iter().map(|c| c.weight * c.sz).sum()
    }

    fn pack(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(3 + 3 * self.classes.len());
        y.extend([self.alpha.re, self.alpha.im, 0.0]);
        for c in &self.classes {
            y.extend([c.sx, c.sy, c.sz]);
        }
        y
    }

    fn unpack(&mut self, y: &[f64]) {
        self.alpha = Complex::new(y[0], y[1]);
        for (c, s) in self.classes.iter_mut().zip(y[3..].chunks_exact(3)) {
            c.sx = s[0];
            c.sy = s[1];
            c.sz = s[2];
        }
    }
}

/// Coupling schedule: linear ramp from `start` to `end` over `ramp_time`,
/// then held for `hold_time`. Couplings are `(λ_r, λ_s)` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSchedule {
    pub start: (f64, f64),
    pub end: (f64, f64),
    pub ramp_time: f64,
    pub hold_time: f64,
}

impl RampSchedule {
    /// Ramp from zero coupling.
    pub fn linear(lambda_r_max: f64, lambda_s_max: f64, ramp_time: f64, hold_time: f64) -> Self {
        Self {
            start: (0.0, 0.0),
            end: (lambda_r_max, lambda_s_max),
            ramp_time,
            hold_time,
        }
    }

    pub fn constant(lambda_r: f64, lambda_s: f64, duration: f64) -> Self {
        Self {
            start: (lambda_r, lambda_s),
            end: (lambda_r, lambda_s),
            ramp_time: 0.0,
            hold_time: duration,
        }
    }

    pub fn duration(&self) -> f64 {
        self.ramp_time + self.hold_time
    }

    pub fn at(&self, t: f64) -> (f64, f64) {
        if self.ramp_time <= 0.0 || t >= self.ramp_time {
            return self.end;
        }
        let x = (t / self.ramp_time).max(0.0);
        (
            self.start.0 + x * (self.end.0 - self.start.0),
            self.start.1 + x * (self.end.1 - self.start.1),
        )
    }

    /// Scalar coupling reported in traces: the stronger of the two beams.
    pub fn lambda(&self, t: f64) -> f64 {
        let (r, s) = self.at(t);
        r.max(s)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.start.0, self.start.1, self.end.0, self.end.1];
        if !vals.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Error::InvalidParameter("ramp couplings must be finite and >= 0".into()));
        }
        if !(self.ramp_time >= 0.0 && self.hold_time >= 0.0) || !(self.duration() > 0.0) {
            return Err(Error::InvalidParameter("ramp durations must be >= 0 with a positive total".into()));
        }
        Ok(())
    }
}

/// Sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace {
    pub t: Vec<f64>,
    /// Intracavity photon number |α|²N.
    pub intensity: Vec<f64>,
    /// ⟨J_z⟩/N.
    pub jz: Vec<f64>,
    /// Photons emitted through the mirrors, 2κN∫|α|²dt.
    pub cumulative_photons: Vec<f64>,
    /// Instantaneous coupling (rad/s).
    pub lambda_t: Vec<f64>,
    pub alpha: Vec<Complex>,
    pub alpha_seed: f64,
    pub n_atoms: u64,
    pub final_state: SystemState,
}

impl TimeTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// CSV with columns `t_s,intensity_photons,jz,cumulative_photons,lambda_krad_s`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,intensity_photons,jz,cumulative_photons,lambda_krad_s\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e}\n",
                self.t[i],
                self.intensity[i],
                self.jz[i],
                self.cumulative_photons[i],
                self.lambda_t[i] * 1e-3
            ));
        }
        out
    }
}

struct Rhs<'a> {
    mp: &'a ModelParams,
    classes: &'a [VelocityClass],
    schedule: Option<&'a RampSchedule>,
    drive: f64,
}

impl Rhs<'_> {
    fn eval(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let mp = self.mp;
        let (lr, ls) = match self.schedule {
            Some(s) => s.at(t),
            None => (mp.lambda_r, mp.lambda_s),
        };
        let alpha = Complex::new(y[0], y[1]);
        let (mut sx_bar, mut sy_bar, mut sz_bar) = (0.0, 0.0, 0.0);
        for (c, s) in self.classes.iter().zip(y[3..].chunks_exact(3)) {
            sx_bar += c.weight * s[0];
            sy_bar += c.weight * s[1];
            sz_bar += c.weight * s[2];
        }
        let s_minus = Complex::new(sx_bar, -sy_bar);
        let s_plus = Complex::new(sx_bar, sy_bar);
        let i = Complex::i();
        let da = -(mp.kappa + i * (mp.omega + mp.delta * sz_bar)) * alpha - i * lr * s_minus
            - i * ls * s_plus
            + mp.kappa * self.drive;
        dy[0] = da.re;
        dy[1] = da.im;
        let n2 = alpha.norm_sqr();
        dy[2] = 2.0 * mp.kappa * n2;

        let beta = lr * alpha + ls * alpha.conj();
        let bx = 2.0 * beta.re;
        let by = -2.0 * beta.im;
        let bz0 = mp.omega_0 + mp.delta * n2;
        let g = mp.gamma;
        for ((c, s), d) in self
            .classes
            .iter()
            .zip(y[3..].chunks_exact(3))
            .zip(dy[3..].chunks_exact_mut(3))
        {
            let bz = bz0 + c.phase_shift(t);
            d[0] = by * s[2] - bz * s[1] - g * s[0];
            d[1] = bz * s[0] - bx * s[2] - g * s[1];
            d[2] = bx * s[1] - by * s[0] - g * (s[2] + 0.5);
        }
    }
}

/// Time derivative of the state at time `t`, with couplings taken from
/// `mp.lambda_r` and `mp.lambda_s`.
pub fn mean_field_rhs(state: &SystemState, mp: &ModelParams, t: f64) -> SystemState {
    let y = state.pack();
    let mut dy = vec![0.0; y.len()];
    Rhs {
        mp,
        classes: &state.classes,
        schedule: None,
        drive: 0.0,
    }
    .eval(t, &y, &mut dy);
    let mut out = state.clone();
    out.unpack(&dy);
    out
}

/// Integrates the mean-field equations over the schedule's duration.
///
/// An empty cavity is seeded with `cfg.alpha_seed`; with `cfg.seed_floor` the
/// seed is maintained by a weak coherent drive.
pub fn integrate(
    state0: &SystemState,
    mp: &ModelParams,
    schedule: &RampSchedule,
    cfg: &IntegratorConfig,
) -> Result<TimeTrace> {
    cfg.validate()?;
    schedule.validate()?;
    state0.validate()?;
    if !(mp.kappa >= 0.0 && mp.gamma >= 0.0)
        || ![mp.omega, mp.omega_0, mp.delta, mp.kappa, mp.gamma].iter().all(|v| v.is_finite())
    {
        return Err(Error::InvalidParameter("model parameters must be finite with kappa, gamma >= 0".into()));
    }

    let mut state = state0.clone();
    if state.alpha == Complex::new(0.0, 0.0) {
        state.alpha = Complex::new(cfg.alpha_seed, 0.0);
    }
    let rhs = Rhs {
        mp,
        classes: &state0.classes,
        schedule: Some(schedule),
        drive: if cfg.seed_floor { cfg.alpha_seed } else { 0.0 },
    };
    let n_atoms = mp.n_atoms as f64;
    let weights: Vec<f64> = state.classes.iter().map(|c| c.weight).collect();

    let mut trace = TimeTrace {
        t: Vec::new(),
        intensity: Vec::new(),
        jz: Vec::new(),
        cumulative_photons: Vec::new(),
        lambda_t: Vec::new(),
        alpha: Vec::new(),
        alpha_seed: cfg.alpha_seed,
        n_atoms: mp.n_atoms,
        final_state: state.clone(),
    };
    let y0 = state.pack();
    let y_end = integrator::dopri5(
        |t, y, dy| rhs.eval(t, y, dy),
        0.0,
        &y0,
        schedule.duration(),
        cfg,
        |t, y| {
            let alpha = Complex::new(y[0], y[1]);
            let jz: f64 = weights.iter().zip(y[3..].chunks_exact(3)).map(|(w, s)| w * s[2]).sum();
            let photons = (y[2] * n_atoms).max(trace.cumulative_photons.last().copied().unwrap_or(0.0));
            trace.t.push(t);
            trace.intensity.push(alpha.norm_sqr() * n_atoms);
            trace.jz.push(jz);
            trace.cumulative_photons.push(photons);
            trace.lambda_t.push(schedule.lambda(t));
            trace.alpha.push(alpha);
        },
    )?;
    trace.final_state.unpack(&y_end);
    Ok(trace)
}

/// Coupling at the end of the first detection bin whose photon count
/// (times `efficiency`) exceeds `count_threshold`.
pub fn detect_threshold_with(
    trace: &TimeTrace,
    count_threshold: f64,
    efficiency: f64,
    bin: f64,
) -> Result<f64> {
    if trace.len() < 2 || !(bin > 0.0) {
        return Err(Error::NotReached);
    }
    let t0 = trace.t[0];
    let mut bin_start_photons = trace.cumulative_photons[0];
    let mut bin_index = 1.0;
    let mut bin_end = t0 + bin;
    for i in 1..trace.len() {
        while trace.t[i] >= bin_end {
            let photons = interpolate(&trace.t, &trace.cumulative_photons, i, bin_end);
            if efficiency * (photons - bin_start_photons) > count_threshold {
                return Ok(interpolate(&trace.t, &trace.lambda_t, i, bin_end));
            }
            bin_start_photons = photons;
            bin_index += 1.0;
            bin_end = t0 + bin_index * bin;
        }
    }
    Err(Error::NotReached)
}

fn interpolate(t: &[f64], v: &[f64], i: usize, at: f64) -> f64 {
    let (t0, t1) = (t[i - 1], t[i]);
    if t1 == t0 {
        return v[i];
    }
    let x = ((at - t0) / (t1 - t0)).clamp(0.0, 1.0);
    v[i - 1] + x * (v[i] - v[i - 1])
}

/// [`detect_threshold_with`] using 5 μs bins and unit efficiency.
pub fn detect_threshold(trace: &TimeTrace, count_threshold: f64) -> Result<f64> {
    detect_threshold_with(trace, count_threshold, 1.0, DETECTION_BIN)
}

/// Final cumulative photon count divided by the atom number.
pub fn photons_per_atom(trace: &TimeTrace, n_atoms: u64) -> f64 {
    trace.cumulative_photons.last().copied().unwrap_or(0.0) / n_atoms.max(1) as f64
}

/// Time between the first and last samples where the intensity exceeds
/// `fraction` of its maximum.
pub fn pulse_duration(trace: &TimeTrace, fraction: f64) -> f64 {
    let peak = trace.intensity.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return 0.0;
    }
    let level = fraction * peak;
    let first = trace.intensity.iter().position(|&v| v > level);
    let last = trace.intensity.iter().rposition(|&v| v > level);
    match (first, last) {
        (Some(a), Some(b)) => trace.t[b] - trace.t[a],
        _ => 0.0,
    }
}

/// Least-squares slope of ln|α| over samples with `t_from <= t <= t_to`.
pub fn fit_growth_rate(trace: &TimeTrace, t_from: f64, t_to: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = trace
        .t
        .iter()
        .zip(&trace.alpha)
        .filter(|(t, a)| **t >= t_from && **t <= t_to && a.norm() > 0.0)
        .map(|(t, a)| (*t, a.norm().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InvalidParameter("growth fit needs at least 3 samples".into()));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    Ok(sxy / sxx)
}

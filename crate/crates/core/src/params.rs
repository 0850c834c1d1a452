//! Raw experimental settings and the effective Dicke-model parameters derived
//! from them.

use crate::{Error, Result};

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Mass of ⁸⁷Rb (kg).
pub const RB87_MASS: f64 = 86.909_180_527 * AMU;
/// Default ratio of atomic temperature to lattice depth.
pub const DEFAULT_TEMPERATURE_RATIO: f64 = 0.1;

/// Raw physical settings of one experimental run. Frequencies in rad/s.
///
/// The drive phases are carried for bookkeeping only; nothing derived from a
/// configuration depends on them.
#[derive(Debug, Clone, PartialEq)]
#[allow(non_snake_case)]
pub struct ExperimentConfig {
    /// Thermally averaged atom-cavity coupling ⟨g⟩.
    pub g_avg: f64,
    /// Thermal average ⟨g²⟩ (rad²/s²).
    pub g2_avg: f64,
    /// Cavity field decay rate (half linewidth).
    pub kappa: f64,
    /// Atomic dipole decay rate (diagnostics only).
    pub gamma_a: f64,
    /// Excited-state detuning, sign-carrying.
    pub Delta: f64,
    pub Omega_r: f64,
    pub Omega_s: f64,
    /// Zeeman-shifted hyperfine splitting of the two-level subspace.
    pub omega_1: f64,
    pub N: u64,
    /// ω_c − (ω_r + ω_s)/2.
    pub carrier_detuning: f64,
    /// (ω_s − ω_r)/2.
    pub eom_half_split: f64,
    pub theta_r: f64,
    pub theta_s: f64,
    /// Intracavity lattice depth (K).
    pub trap_depth: f64,
    /// Trap frequency along the drive direction.
    pub trap_freq: f64,
    /// Drive wavelength (m).
    pub wavelength: f64,
    /// Atomic mass (kg).
    pub atom_mass: f64,
    /// T_atom / U₀ used by [`doppler_width`].
    pub temperature_ratio: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let khz = crate::KHZ;
        Self {
            g_avg: 1100.0 * khz,
            g2_avg: (1100.0 * khz).powi(2),
            kappa: 100.0 * khz,
            gamma_a: 3000.0 * khz,
            Delta: -1.27e8 * khz,
            Omega_r: 2.5e5 * khz,
            Omega_s: 2.5e5 * khz,
            omega_1: 6.834_7e6 * khz,
            N: 100_000,
            carrier_detuning: 735.0 * khz,
            eom_half_split: (6.834_7e6 - 215.0) * khz,
            theta_r: 0.0,
            theta_s: 0.0,
            trap_depth: 219e-6,
            trap_freq: 2.0 * std::f64::consts::PI * 50.0e3,
            wavelength: 780e-9,
            atom_mass: RB87_MASS,
            temperature_ratio: DEFAULT_TEMPERATURE_RATIO,
        }
    }
}

impl ExperimentConfig {
    /// Checks the structural invariants; returns every violation found.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let finite = [
            ("g_avg", self.g_avg),
            ("g2_avg", self.g2_avg),
            ("kappa", self.kappa),
            ("gamma_a", self.gamma_a),
            ("Delta", self.Delta),
            ("Omega_r", self.Omega_r),
            ("Omega_s", self.Omega_s),
            ("omega_1", self.omega_1),
            ("carrier_detuning", self.carrier_detuning),
            ("eom_half_split", self.eom_half_split),
            ("trap_depth", self.trap_depth),
            ("trap_freq", self.trap_freq),
            ("wavelength", self.wavelength),
            ("atom_mass", self.atom_mass),
            ("temperature_ratio", self.temperature_ratio),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                out.push(format!("{name} must be finite"));
            }
        }
        if self.N == 0 {
            out.push("N must be at least 1".into());
        }
        if !(self.kappa > 0.0) {
            out.push("kappa must be positive".into());
        }
        if self.gamma_a < 0.0 {
            out.push("gamma_a must be non-negative".into());
        }
        // The experiment itself sits at |Δ|/ω₁ ≈ 19, so a factor 10 is the
        // strongest separation that still admits it.
        if !(self.Delta.abs() > 10.0 * self.omega_1.abs()) {
            out.push("|Delta| must exceed 10·|omega_1| (far-detuned Raman limit)".into());
        }
        if self.g2_avg < self.g_avg * self.g_avg * (1.0 - 1e-12) {
            out.push("g2_avg must be at least g_avg² (Cauchy-Schwarz)".into());
        }
        if !(self.trap_depth > 0.0) {
            out.push("trap_depth must be positive".into());
        }
        if !(self.wavelength > 0.0) {
            out.push("wavelength must be positive".into());
        }
        if !(self.atom_mass > 0.0) {
            out.push("atom_mass must be positive".into());
        }
        if !(self.temperature_ratio > 0.0) {
            out.push("temperature_ratio must be positive".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(v.join("; ")))
        }
    }

    /// Δ_r = Δ − ω₁/2.
    pub fn delta_r(&self) -> f64 {
        self.Delta - 0.5 * self.omega_1
    }

    /// Δ_s = Δ + ω₁/2.
    pub fn delta_s(&self) -> f64 {
        self.Delta + 0.5 * self.omega_1
    }
}

/// Effective Dicke-model parameters (rad/s unless noted).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub omega: f64,
    pub omega_0: f64,
    /// Coefficient of the a†a J_z / N nonlinearity.
    pub delta: f64,
    /// Dispersive cavity shift.
    pub omega_d: f64,
    /// Differential AC Stark shift.
    pub delta_omega_ss: f64,
    pub lambda_r: f64,
    pub lambda_s: f64,
    /// rms Doppler shift k·v̄.
    pub gamma_d: f64,
    pub kappa: f64,
    /// Collective spin decay rate.
    pub gamma: f64,
    /// Initial normalised ⟨σ_z⟩ in [−1/2, 1/2].
    pub sigma_z0: f64,
    pub n_atoms: u64,
}

impl ModelParams {
    /// Parameters fixed directly at the model level, with no drive and no
    /// nonlinearity. Handy for sweeps and tests.
    pub fn from_model(omega: f64, omega_0: f64, kappa: f64) -> Self {
        Self {
            omega,
            omega_0,
            delta: 0.0,
            omega_d: 0.0,
            delta_omega_ss: 0.0,
            lambda_r: 0.0,
            lambda_s: 0.0,
            gamma_d: 0.0,
            kappa,
            gamma: 0.0,
            sigma_z0: -0.5,
            n_atoms: 100_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.kappa > 0.0) {
            bad.push("kappa must be positive");
        }
        if !(self.lambda_r >= 0.0 && self.lambda_s >= 0.0) {
            bad.push("couplings must be non-negative");
        }
        if !(self.gamma_d >= 0.0) {
            bad.push("gamma_d must be non-negative");
        }
        if !(self.gamma >= 0.0) {
            bad.push("gamma must be non-negative");
        }
        if !(-0.5..=0.5).contains(&self.sigma_z0) {
            bad.push("sigma_z0 must lie in [-1/2, 1/2]");
        }
        if self.n_atoms == 0 {
            bad.push("n_atoms must be at least 1");
        }
        if ![self.omega, self.omega_0, self.delta].iter().all(|v| v.is_finite()) {
            bad.push("frequencies must be finite");
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(bad.join("; ")))
        }
    }
}

/// Maps raw settings onto the effective model, evaluating the adiabatically
/// eliminated expressions exactly (no expansion in ω₁/Δ).
///
/// The spin decay rate γ and initial ⟨σ_z⟩ are not derivable from the raw
/// settings; they are set to 0 and −1/2 and may be overridden by the caller.
pub fn derive_model_params(cfg: &ExperimentConfig) -> Result<ModelParams> {
    if cfg.N == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let dr = cfg.delta_r();
    let ds = cfg.delta_s();
    if dr == 0.0 || ds == 0.0 {
        return Err(Error::InvalidParameter(
            "Delta = ±omega_1/2 makes a Raman denominator vanish".into(),
        ));
    }
    cfg.validate()?;
    let n = cfg.N as f64;
    let w1 = cfg.omega_1;

    let omega_d = n / 3.0 * (cfg.g2_avg / ds + cfg.g2_avg / dr);
    let delta = 2.0 * n / 3.0 * (cfg.g2_avg / ds - cfg.g2_avg / dr);
    let or2 = cfg.Omega_r * cfg.Omega_r;
    let os2 = cfg.Omega_s * cfg.Omega_s;
    let delta_omega_ss = ((or2 / dr - or2 / (dr - w1)) - (os2 / ds - os2 / (ds + w1))) / 6.0;

    let omega_0 = w1 - cfg.eom_half_split + delta_omega_ss;
    let omega = cfg.carrier_detuning + omega_d;

    let prefactor = (3.0 * n).sqrt() / 12.0 * cfg.g_avg;
    let lambda_r = (prefactor * cfg.Omega_r / dr).abs();
    let lambda_s = (prefactor * cfg.Omega_s / ds).abs();

    Ok(ModelParams {
        omega,
        omega_0,
        delta,
        omega_d,
        delta_omega_ss,
        lambda_r,
        lambda_s,
        gamma_d: doppler_width_with_ratio(
            cfg.trap_depth,
            cfg.wavelength,
            cfg.atom_mass,
            cfg.temperature_ratio,
        ),
        kappa: cfg.kappa,
        gamma: 0.0,
        sigma_z0: -0.5,
        n_atoms: cfg.N,
    })
}

/// First-order (in ω₁/Δ) forms of (ω_d, δ, Δω_ss) for balanced drives Ω.
pub fn first_order_shifts(cfg: &ExperimentConfig, omega_drive: f64) -> (f64, f64, f64) {
    let n = cfg.N as f64;
    let omega_d = 2.0 / 3.0 * n * cfg.g2_avg / cfg.Delta;
    let delta = -omega_d * cfg.omega_1 / cfg.Delta;
    let delta_omega_ss = -(omega_drive * omega_drive) / (3.0 * cfg.Delta * cfg.Delta) * cfg.omega_1;
    (omega_d, delta, delta_omega_ss)
}

/// Detunings of each beam from its cavity-assisted Raman resonance,
/// `(δ_cr, δ_cs) = (ω₀ − ω, −(ω₀ + ω))`.
pub fn raman_detunings(mp: &ModelParams) -> (f64, f64) {
    (mp.omega_0 - mp.omega, -(mp.omega_0 + mp.omega))
}

/// rms two-photon Doppler shift for atoms in a lattice of depth `trap_depth`
/// (K), using the default temperature ratio.
pub fn doppler_width(trap_depth: f64, wavelength: f64, atom_mass: f64) -> f64 {
    doppler_width_with_ratio(trap_depth, wavelength, atom_mass, DEFAULT_TEMPERATURE_RATIO)
}

pub fn doppler_width_with_ratio(
    trap_depth: f64,
    wavelength: f64,
    atom_mass: f64,
    temperature_ratio: f64,
) -> f64 {
    let k = 2.0 * std::f64::consts::PI / wavelength;
    let temperature = trap_depth * temperature_ratio;
    k * (BOLTZMANN * temperature / atom_mass).sqrt()
}

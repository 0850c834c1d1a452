//! Closed-form critical couplings.
//!
//! Every formula is invariant under a simultaneous sign flip of (ω, ω₀, δ).
//! When ω and ω₀ (after the −δ/2 shift) have opposite signs none of the closed
//! forms apply and [`Error::InvalidRegime`] is returned; use
//! [`crate::poles::pole_threshold_numeric`] there.

use std::collections::BTreeMap;
use std::fmt;

use crate::poles::Geometry;
use crate::specfun::dawson;
use crate::{Error, Result};

/// Which threshold model produced a [`ThresholdResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ThresholdModel {
    Ideal,
    Decay,
    Doppler,
    SingleBeam,
    PoleNumeric,
}

impl ThresholdModel {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdModel::Ideal => "ideal",
            ThresholdModel::Decay => "decay",
            ThresholdModel::Doppler => "doppler",
            ThresholdModel::SingleBeam => "single_beam",
            ThresholdModel::PoleNumeric => "pole_numeric",
        }
    }
}

impl fmt::Display for ThresholdModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Critical coupling together with its provenance.
///
/// `lambda_c` is `None` when no threshold exists (for instance the
/// co-propagating geometry at ω₀ = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub lambda_c: Option<f64>,
    pub model: ThresholdModel,
    pub geometry: Geometry,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ThresholdResult {
    pub fn found(lambda_c: f64, model: ThresholdModel, geometry: Geometry) -> Self {
        Self {
            lambda_c: Some(lambda_c),
            model,
            geometry,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn absent(model: ThresholdModel, geometry: Geometry) -> Self {
        Self {
            lambda_c: None,
            model,
            geometry,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn exists(&self) -> bool {
        self.lambda_c.is_some()
    }

    /// The critical coupling, or an error if none exists.
    pub fn value(&self) -> Result<f64> {
        self.lambda_c.ok_or_else(|| {
            Error::InvalidRegime(format!("no {} threshold exists", self.model))
        })
    }

    pub fn with_diagnostic(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_owned(), value);
        self
    }
}

fn finite(name: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name}: inputs must be finite")))
    }
}

/// Ideal Dicke threshold `λ_c = ½ √((ω₀/ω)(ω² + κ²))`.
pub fn threshold_ideal(omega: f64, omega_0: f64, kappa: f64) -> Result<ThresholdResult> {
    finite("threshold_ideal", &[omega, omega_0, kappa])?;
    if !(omega * omega_0 > 0.0) {
        return Err(Error::InvalidRegime(
            "ideal threshold needs omega·omega_0 > 0".into(),
        ));
    }
    let lambda = 0.5 * (omega_0 / omega * (omega * omega + kappa * kappa)).sqrt();
    Ok(ThresholdResult::found(
        lambda,
        ThresholdModel::Ideal,
        Geometry::CounterProp,
    ))
}

/// Threshold including collective spin decay γ, imperfect preparation
/// ⟨σ_z⟩ and the dispersive nonlinearity δ (through ω → ω − δ/2).
pub fn threshold_decay(
    omega: f64,
    omega_0: f64,
    kappa: f64,
    gamma: f64,
    sigma_z0: f64,
    delta: f64,
) -> Result<ThresholdResult> {
    finite("threshold_decay", &[omega, omega_0, kappa, gamma, sigma_z0, delta])?;
    if !(sigma_z0 < 0.0) {
        return Err(Error::InvalidState(format!(
            "initial <sigma_z> must be negative, got {sigma_z0}"
        )));
    }
    let shifted = omega - 0.5 * delta;
    if !(shifted * omega_0 > 0.0) {
        return Err(Error::InvalidRegime(
            "decay threshold needs (omega - delta/2)·omega_0 > 0".into(),
        ));
    }
    let spin = (omega_0 * omega_0 + gamma * gamma) / (-2.0 * sigma_z0 * omega_0);
    let field = (shifted * shifted + kappa * kappa) / shifted;
    Ok(ThresholdResult::found(
        0.5 * (spin * field).sqrt(),
        ThresholdModel::Decay,
        Geometry::CounterProp,
    ))
}

/// Threshold with Gaussian Doppler broadening of rms width `gamma_d`
/// (counter-propagating beams).
pub fn threshold_doppler(
    omega: f64,
    omega_0: f64,
    kappa: f64,
    gamma_d: f64,
    delta: f64,
) -> Result<ThresholdResult> {
    finite("threshold_doppler", &[omega, omega_0, kappa, gamma_d, delta])?;
    if !(gamma_d > 0.0) {
        return Err(Error::InvalidParameter(
            "Doppler threshold needs gamma_d > 0; use threshold_decay for gamma_d = 0".into(),
        ));
    }
    let shifted = omega - 0.5 * delta;
    let dawson_arg = omega_0 / (std::f64::consts::SQRT_2 * gamma_d);
    let denom = 8.0 * shifted * dawson(dawson_arg);
    if !(shifted * omega_0 > 0.0) || !(denom > 0.0) {
        return Err(Error::InvalidRegime(
            "Doppler threshold needs (omega - delta/2)·omega_0 > 0".into(),
        ));
    }
    let radicand =
        std::f64::consts::SQRT_2 * gamma_d * (shifted * shifted + kappa * kappa) / denom;
    Ok(ThresholdResult::found(
        radicand.sqrt(),
        ThresholdModel::Doppler,
        Geometry::CounterProp,
    )
    .with_diagnostic("dawson_argument", dawson_arg))
}

/// Single-beam threshold set by collective spin decay.
///
/// With γ = 0 the threshold vanishes; this degenerate case returns
/// `lambda_c = Some(0.0)`.
pub fn threshold_single_beam(
    delta_cs: f64,
    kappa: f64,
    gamma: f64,
    sigma_z0: f64,
) -> Result<ThresholdResult> {
    finite("threshold_single_beam", &[delta_cs, kappa, gamma, sigma_z0])?;
    if gamma < 0.0 {
        return Err(Error::InvalidState(format!(
            "spin decay rate must be non-negative, got {gamma}"
        )));
    }
    if !(sigma_z0 < 0.0) {
        return Err(Error::InvalidState(format!(
            "initial <sigma_z> must be negative, got {sigma_z0}"
        )));
    }
    let ratio = if gamma + kappa > 0.0 {
        delta_cs / (gamma + kappa)
    } else {
        0.0
    };
    let lambda = (gamma * kappa / (-2.0 * sigma_z0) * (1.0 + ratio * ratio)).sqrt();
    Ok(ThresholdResult::found(
        lambda,
        ThresholdModel::SingleBeam,
        Geometry::Single,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::KHZ;
    use approx::assert_relative_eq;

    #[test]
    fn ideal_symmetric_point() {
        let w = 100.0 * KHZ;
        let r = threshold_ideal(w, w, w).unwrap();
        assert_relative_eq!(r.value().unwrap(), w * 0.5 * 2f64.sqrt(), max_relative = 1e-15);
        let r = threshold_ideal(w, w, 0.0).unwrap();
        assert_relative_eq!(r.value().unwrap(), w / 2.0, max_relative = 1e-15);
        assert!(matches!(
            threshold_ideal(w, -w, w),
            Err(Error::InvalidRegime(_))
        ));
    }

    #[test]
    fn decay_reduces_to_ideal() {
        let (w, w0, k) = (100.0 * KHZ, 215.0 * KHZ, 100.0 * KHZ);
        let ideal = threshold_ideal(w, w0, k).unwrap().value().unwrap();
        let decay = threshold_decay(w, w0, k, 0.0, -0.5, 0.0).unwrap().value().unwrap();
        assert_relative_eq!(ideal, decay, max_relative = 1e-15);
    }

    #[test]
    fn decay_errors() {
        let w = 100.0 * KHZ;
        assert!(matches!(
            threshold_decay(w, w, w, 0.0, -0.5, 2.0 * w),
            Err(Error::InvalidRegime(_))
        ));
        assert!(matches!(
            threshold_decay(w, w, w, 0.0, 0.0, 0.0),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            threshold_decay(w, w, w, 0.0, 0.2, 0.0),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn decay_monotone_in_gamma() {
        let (w, w0, k) = (80.0 * KHZ, 150.0 * KHZ, 100.0 * KHZ);
        let mut prev = 0.0;
        for i in 0..50 {
            let g = i as f64 * 5.0 * KHZ;
            let lc = threshold_decay(w, w0, k, g, -0.4, -20.0 * KHZ)
                .unwrap()
                .value()
                .unwrap();
            assert!(lc > prev);
            prev = lc;
        }
    }

    #[test]
    fn doppler_limit_small_width() {
        let (w, w0, k) = (100.0 * KHZ, 215.0 * KHZ, 100.0 * KHZ);
        let decay = threshold_decay(w, w0, k, 0.0, -0.5, 0.0).unwrap().value().unwrap();
        let dop = threshold_doppler(w, w0, k, 1e-3 * w0, 0.0).unwrap().value().unwrap();
        assert_relative_eq!(dop, decay, max_relative = 1e-4);
    }

    #[test]
    fn doppler_ordering_follows_dawson_product() {
        // Doppler threshold exceeds the ideal one exactly when x·F(x) < 1/2,
        // x = ω₀/(√2 γ_d).
        let (w, k, gd) = (100.0 * KHZ, 100.0 * KHZ, 59.0 * KHZ);
        for w0_khz in [10.0, 30.0, 60.0, 100.0, 215.0, 400.0] {
            let w0 = w0_khz * KHZ;
            let x = w0 / (std::f64::consts::SQRT_2 * gd);
            let ideal = threshold_ideal(w, w0, k).unwrap().value().unwrap();
            let dop = threshold_doppler(w, w0, k, gd, 0.0).unwrap().value().unwrap();
            assert_eq!(dop > ideal, x * dawson(x) < 0.5, "omega_0 = {w0_khz} kHz");
        }
        // at the recorded operating point the Doppler value is finite and lower
        let dop = threshold_doppler(w, 215.0 * KHZ, k, gd, 0.0).unwrap().value().unwrap();
        let ideal = threshold_ideal(w, 215.0 * KHZ, k).unwrap().value().unwrap();
        assert!(dop.is_finite() && dop < ideal);
    }

    #[test]
    fn doppler_rejects_bad_inputs() {
        let w = 100.0 * KHZ;
        assert!(threshold_doppler(w, w, w, 0.0, 0.0).is_err());
        assert!(matches!(
            threshold_doppler(w, -w, w, w, 0.0),
            Err(Error::InvalidRegime(_))
        ));
        assert!(matches!(
            threshold_doppler(w, 0.0, w, w, 0.0),
            Err(Error::InvalidRegime(_))
        ));
    }

    #[test]
    fn single_beam_cases() {
        let (k, g) = (100.0 * KHZ, 20.0 * KHZ);
        let r = threshold_single_beam(0.0, k, g, -0.5).unwrap();
        assert_relative_eq!(r.value().unwrap(), (g * k).sqrt(), max_relative = 1e-15);
        assert_eq!(r.geometry, Geometry::Single);
        for d in [30.0, 250.0, 900.0] {
            let a = threshold_single_beam(d * KHZ, k, g, -0.45).unwrap().value().unwrap();
            let b = threshold_single_beam(-d * KHZ, k, g, -0.45).unwrap().value().unwrap();
            assert_eq!(a, b);
        }
        let tiny = threshold_single_beam(300.0 * KHZ, k, 1e-9, -0.5).unwrap().value().unwrap();
        assert!(tiny < 1e-1 * KHZ);
        assert_eq!(
            threshold_single_beam(300.0 * KHZ, k, 0.0, -0.5).unwrap().lambda_c,
            Some(0.0)
        );
        assert!(matches!(
            threshold_single_beam(0.0, k, -1.0, -0.5),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn sign_flip_symmetry() {
        let (w, w0, k, g, d) = (90.0 * KHZ, 180.0 * KHZ, 100.0 * KHZ, 25.0 * KHZ, -30.0 * KHZ);
        let a = threshold_decay(w, w0, k, g, -0.5, d).unwrap().value().unwrap();
        let b = threshold_decay(-w, -w0, k, g, -0.5, -d).unwrap().value().unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-15);
        let a = threshold_doppler(w, w0, k, 59.0 * KHZ, d).unwrap().value().unwrap();
        let b = threshold_doppler(-w, -w0, k, 59.0 * KHZ, -d).unwrap().value().unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-15);
        let a = threshold_ideal(w, w0, k).unwrap().value().unwrap();
        let b = threshold_ideal(-w, -w0, k).unwrap().value().unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-15);
    }

    #[test]
    fn ideal_minimum_at_omega_equals_kappa() {
        let (w0, k) = (215.0 * KHZ, 100.0 * KHZ);
        let lc = |w: f64| threshold_ideal(w, w0, k).unwrap().value().unwrap();
        let h = 1e-4 * k;
        let slope = (lc(k + h) - lc(k - h)) / (2.0 * h);
        assert!(slope.abs() < 1e-6, "slope {slope}");
        assert!(lc(0.9 * k) > lc(k) && lc(1.1 * k) > lc(k));
    }
}

//! Gauss–Hermite velocity classes.

use std::f64::consts::{PI, SQRT_2};

use crate::{Error, Result};

/// One velocity class of the atomic ensemble with its mean-field spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityClass {
    pub weight: f64,
    /// Doppler shift amplitude k·v (rad/s).
    pub kv: f64,
    /// Trap frequency of the harmonic velocity modulation; 0 keeps v fixed.
    pub omega_t: f64,
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl VelocityClass {
    pub fn at_rest(weight: f64) -> Self {
        Self {
            weight,
            kv: 0.0,
            omega_t: 0.0,
            sx: 0.0,
            sy: 0.0,
            sz: -0.5,
        }
    }

    /// Velocity (m/s) for a beam of the given wavelength.
    pub fn velocity(&self, wavelength: f64) -> f64 {
        self.kv * wavelength / (2.0 * PI)
    }

    /// Instantaneous Doppler detuning `k·v(t)`.
    pub fn phase_shift(&self, t: f64) -> f64 {
        if self.omega_t == 0.0 {
            self.kv
        } else {
            self.kv * (self.omega_t * t).cos()
        }
    }

    pub fn bloch_length_sq(&self) -> f64 {
        self.sx * self.sx + self.sy * self.sy + self.sz * self.sz
    }
}

/// Nodes and weights of `n`-point Gauss–Hermite quadrature for the weight
/// `exp(-x²)`, nodes in decreasing order.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PI_M4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (PI_M4, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * (1.0 + z.abs()) {
                break;
            }
        }
        if n % 2 == 1 && i == half - 1 {
            z = 0.0;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Discretizes a Gaussian distribution of Doppler shifts with rms `gamma_d`
/// into `n_classes` Gauss–Hermite classes, all starting in the spin ground
/// state. With `modulated`, each class detuning oscillates at `omega_t`.
pub fn make_velocity_ensemble(
    gamma_d: f64,
    n_classes: usize,
    omega_t: f64,
    modulated: bool,
) -> Result<Vec<VelocityClass>> {
    if n_classes == 0 || n_classes % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "n_classes must be odd and positive, got {n_classes}"
        )));
    }
    if !(gamma_d >= 0.0) || !gamma_d.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma_d must be finite and non-negative, got {gamma_d}"
        )));
    }
    if modulated && !(omega_t > 0.0) {
        return Err(Error::InvalidParameter(
            "modulated ensemble needs omega_t > 0".into(),
        ));
    }
    let (nodes, weights) = gauss_hermite(n_classes);
    let norm: f64 = weights.iter().sum();
    Ok(nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| VelocityClass {
            kv: if gamma_d == 0.0 { 0.0 } else { SQRT_2 * gamma_d * x },
            omega_t: if modulated { omega_t } else { 0.0 },
            ..VelocityClass::at_rest(w / norm)
        })
        .collect())
}

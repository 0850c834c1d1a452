//! Weak-probe cavity transmission below threshold.

use crate::params::ModelParams;
use crate::poles::{self, apply_delta_shift, counter_threshold_closed, Geometry, ScaledParams};
use crate::thresholds::threshold_decay;
use crate::{Complex, Error, Result};

/// Number of points in the default probe grid.
pub const DEFAULT_GRID_POINTS: usize = 801;

/// Transmission versus probe detuning at a fixed fraction of the threshold
/// coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace {
    /// Probe detuning (rad/s) from the mean laser frequency.
    pub probe_detuning: Vec<f64>,
    /// Normalised to the empty-cavity peak.
    pub transmission: Vec<f64>,
    pub lambda_frac: f64,
}

impl SpectrumTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("probe_detuning_krad_s,transmission,lambda_frac\n");
        for (x, t) in self.probe_detuning.iter().zip(&self.transmission) {
            out.push_str(&format!("{:e},{:e},{}\n", x * 1e-3, t, self.lambda_frac));
        }
        out
    }

    /// Probe detuning of the largest transmission value.
    pub fn peak(&self) -> (f64, f64) {
        self.probe_detuning
            .iter()
            .zip(&self.transmission)
            .fold((f64::NAN, f64::NEG_INFINITY), |best, (&x, &t)| {
                if t > best.1 {
                    (x, t)
                } else {
                    best
                }
            })
    }
}

/// Probe transmission of a cavity coupled with strength `lambda_r` to a
/// collective spin (Tavis–Cummings). Detunings are measured from the spin
/// resonance; `cavity_det` is the cavity's offset from it.
pub fn tavis_cummings_transmission(
    probe_det: f64,
    cavity_det: f64,
    lambda_r: f64,
    kappa: f64,
    gamma: f64,
) -> f64 {
    let i = Complex::i();
    let mut denom = kappa - i * (probe_det - cavity_det);
    if lambda_r != 0.0 {
        let spin = gamma - i * probe_det;
        if spin.norm() == 0.0 {
            return 0.0;
        }
        denom += lambda_r * lambda_r / spin;
    }
    (kappa / denom).norm_sqr()
}

/// `n` evenly spaced probe detunings over ±5(|ω| + κ).
pub fn default_probe_grid(mp: &ModelParams, n: usize) -> Vec<f64> {
    let span = 5.0 * (mp.omega.abs() + mp.kappa);
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|k| -span + 2.0 * span * k as f64 / (n - 1) as f64)
        .collect()
}

/// Threshold coupling used to normalise `lambda_frac`: the Doppler pole
/// threshold when `use_doppler`, the decay-limited closed form otherwise.
pub fn reference_threshold(mp: &ModelParams, use_doppler: bool) -> Result<f64> {
    if use_doppler {
        let sp = apply_delta_shift(&ScaledParams::from_model(mp)?, mp.delta);
        let lambda_bar = match counter_threshold_closed(&sp) {
            Ok(v) => v,
            Err(Error::InvalidRegime(_)) => {
                let res = poles::pole_threshold_numeric(Geometry::CounterProp, &sp)?;
                res.diagnostics
                    .get("lambda_bar")
                    .copied()
                    .ok_or_else(|| Error::InvalidRegime("no pole crossing below the coupling limit".into()))?
            }
            Err(e) => return Err(e),
        };
        Ok(sp.unscale(lambda_bar))
    } else {
        threshold_decay(mp.omega, mp.omega_0, mp.kappa, mp.gamma, mp.sigma_z0, mp.delta)?.value()
    }
}

/// Linear-response transmission at `lambda_frac` of threshold with equal
/// couplings on both beams.
pub fn critical_transmission(
    probe_grid: &[f64],
    mp: &ModelParams,
    lambda_frac: f64,
    use_doppler: bool,
) -> Result<SpectrumTrace> {
    if lambda_frac >= 1.0 {
        return Err(Error::AboveThreshold(lambda_frac));
    }
    if !(lambda_frac >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda_frac must lie in [0, 1), got {lambda_frac}"
        )));
    }
    if probe_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("probe grid must be strictly increasing".into()));
    }
    if !(mp.kappa > 0.0) {
        return Err(Error::InvalidParameter("kappa must be positive".into()));
    }
    let lambda_c = if lambda_frac == 0.0 {
        0.0
    } else {
        reference_threshold(mp, use_doppler)?
    };
    let lambda = lambda_frac * lambda_c;

    let transmission = if use_doppler {
        let sp = apply_delta_shift(&ScaledParams::from_model(mp)?, mp.delta)
            .with_lambda(Geometry::CounterProp, lambda / (mp.gamma_d * std::f64::consts::SQRT_2));
        probe_grid
            .iter()
            .map(|&wp| {
                let z = Complex::new(0.0, -wp / sp.scale);
                let r = poles::cavity_response(z, Geometry::CounterProp, &sp)?;
                Ok((sp.kappa_bar * r).norm_sqr())
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        probe_grid
            .iter()
            .map(|&wp| linear_response(wp, mp, lambda))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SpectrumTrace {
        probe_detuning: probe_grid.to_vec(),
        transmission,
        lambda_frac,
    })
}

// Linearised (α, α*, s₋, s₊) system about the normal phase, probed at
// z = -iω_p.
fn linear_response(probe: f64, mp: &ModelParams, lambda: f64) -> Result<f64> {
    let i = Complex::i();
    let w = mp.omega + mp.delta * mp.sigma_z0;
    let sz = mp.sigma_z0;
    let (k, g, w0) = (mp.kappa, mp.gamma, mp.omega_0);
    let z = Complex::new(0.0, -probe);
    let zero = Complex::new(0.0, 0.0);
    let drift = [
        [-(k + i * w), zero, -i * lambda, -i * lambda],
        [zero, -(k - i * w), i * lambda, i * lambda],
        [2.0 * i * sz * lambda, 2.0 * i * sz * lambda, -(g + i * w0), zero],
        [-2.0 * i * sz * lambda, -2.0 * i * sz * lambda, zero, -(g - i * w0)],
    ];
    let mut m = [[zero; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = if r == c { z } else { zero } - drift[r][c];
        }
    }
    let x = solve4(m, [Complex::new(1.0, 0.0), zero, zero, zero]).ok_or_else(|| {
        Error::ConvergenceFailure(format!("singular response matrix at probe detuning {probe}"))
    })?;
    Ok((k * x[0]).norm_sqr())
}

fn solve4(mut m: [[Complex; 4]; 4], mut b: [Complex; 4]) -> Option<[Complex; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&a, &c| m[a][col].norm().total_cmp(&m[c][col].norm()))?;
        if m[pivot][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for c in col..4 {
                let v = m[col][c];
                m[row][c] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [Complex::new(0.0, 0.0); 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for c in row + 1..4 {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Fits `1/T = A + Bx + Cx²` by least squares and returns
/// `(center, half_width, peak)` of the corresponding Lorentzian.
pub fn fit_lorentzian(x: &[f64], transmission: &[f64]) -> Result<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(transmission)
        .filter(|(_, t)| **t > 0.0)
        .map(|(x, t)| (*x, 1.0 / t))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InvalidParameter("Lorentzian fit needs three positive samples".into()));
    }
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (xv, yv) in &pts {
        let row = [1.0, *xv, xv * xv];
        for r in 0..3 {
            aty[r] += row[r] * yv;
            for c in 0..3 {
                ata[r][c] += row[r] * row[c];
            }
        }
    }
    let z = Complex::new(0.0, 0.0);
    let mut m = [[z; 4]; 4];
    let mut rhs = [z; 4];
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = Complex::new(ata[r][c], 0.0);
        }
        rhs[r] = Complex::new(aty[r], 0.0);
    }
    m[3][3] = Complex::new(1.0, 0.0);
    let sol = solve4(m, rhs)
        .ok_or_else(|| Error::ConvergenceFailure("degenerate Lorentzian fit".into()))?;
    let (a, b, c) = (sol[0].re, sol[1].re, sol[2].re);
    if !(c > 0.0) {
        return Err(Error::ConvergenceFailure("transmission data is not peaked".into()));
    }
    let center = -b / (2.0 * c);
    let floor = a - b * b / (4.0 * c);
    if !(floor > 0.0) {
        return Err(Error::ConvergenceFailure("fitted peak is unbounded".into()));
    }
    Ok((center, (floor / c).sqrt(), 1.0 / floor))
}

//! Dormand–Prince 5(4) with adaptive steps and exact landing on sample times.

use crate::{Error, Result};

/// Tolerances and sampling for [`super::integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step (s).
    pub min_dt: f64,
    /// Largest step (s).
    pub max_dt: f64,
    /// Output sampling interval (s).
    pub sample_dt: f64,
    /// Cavity amplitude used to seed an empty cavity (units of √N).
    pub alpha_seed: f64,
    /// Keep the seed alive as a weak coherent drive `κ·alpha_seed`.
    pub seed_floor: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-13,
            atol: 1e-14,
            min_dt: 1e-16,
            max_dt: 1e-6,
            sample_dt: 1e-6,
            alpha_seed: 1e-4,
            seed_floor: false,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("min_dt", self.min_dt),
            ("max_dt", self.max_dt),
            ("sample_dt", self.sample_dt),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.min_dt > self.max_dt {
            return Err(Error::InvalidParameter("min_dt exceeds max_dt".into()));
        }
        if !self.alpha_seed.is_finite() || self.alpha_seed < 0.0 {
            return Err(Error::InvalidParameter("alpha_seed must be finite and >= 0".into()));
        }
        Ok(())
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, calling `sample(t, y)` at
/// `t0` and every `sample_dt` thereafter (and at `t_end`).
pub(crate) fn dopri5<F, S>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    cfg: &IntegratorConfig,
    mut sample: S,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut t = t0;
    f(t, &y, &mut k[0]);
    sample(t, &y);

    let mut h = cfg.max_dt.min(cfg.sample_dt).min(1e-9_f64.max(cfg.min_dt));
    let mut sample_index = 1u64;
    let mut next_sample = (t0 + cfg.sample_dt).min(t_end);

    while t < t_end {
        let target = next_sample;
        let mut hit = false;
        let mut step = h.min(cfg.max_dt);
        if t + step >= target {
            step = target - t;
            hit = true;
        }

        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, a) in A[s][..s].iter().enumerate() {
                    acc += a * k[j][i];
                }
                stage[i] = y[i] + step * acc;
            }
            f(t + C[s] * step, &stage, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&stage);
            }
        }

        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, ej) in E.iter().enumerate() {
                e += ej * k[j][i];
            }
            let scale = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            let r = step * e / scale;
            err += r * r;
        }
        let err = (err / n as f64).sqrt();

        if err.is_finite() && err <= 1.0 {
            t = if hit { target } else { t + step };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !hit || step >= h {
                h = step * grow;
            }
            if hit {
                sample(t, &y);
                sample_index += 1;
                next_sample = (t0 + sample_index as f64 * cfg.sample_dt).min(t_end);
                if next_sample <= t {
                    next_sample = t_end;
                }
            }
        } else {
            let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h = step * shrink;
            if h < cfg.min_dt {
                return Err(Error::StepSizeUnderflow { t, dt: h });
            }
        }
    }
    Ok(y)
}

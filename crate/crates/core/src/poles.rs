//! Linear stability of the normal phase with Gaussian Doppler broadening.
//!
//! Below threshold the cavity field obeys a linear integro-differential
//! equation whose Laplace transform has poles at the roots of a geometry
//! dependent characteristic function. All quantities here are dimensionless:
//! rates and couplings are divided by `γ_d √2`, and the kernel of the
//! velocity average is `√π f(z ± iω̄₀)` with `f(z) = exp(z²) erfc(z)`.
//!
//! The threshold is the smallest coupling at which the rightmost root enters
//! the right half plane.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use crate::params::ModelParams;
use crate::specfun::{dawson, erfcx, erfcx_derivative};
use crate::thresholds::{ThresholdModel, ThresholdResult};
use crate::{Complex, Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Seed grid resolution per axis.
pub const GRID_POINTS: usize = 61;
/// Upper end of the coupling bracket, in scaled units.
pub const LAMBDA_BAR_MAX: f64 = 1.0e3;
const NEWTON_MAX_ITER: usize = 100;
const BISECTION_REL_TOL: f64 = 1e-9;

/// Beam geometry of the Raman drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Geometry {
    /// Only the `s` beam is on.
    Single,
    /// Both beams propagate in the same direction; the cross terms average
    /// out over the atomic position distribution.
    CoProp,
    /// Counter-propagating beams: phase-matched Dicke coupling.
    CounterProp,
}

impl Geometry {
    pub fn as_str(self) -> &'static str {
        match self {
            Geometry::Single => "single",
            Geometry::CoProp => "coprop",
            Geometry::CounterProp => "counterprop",
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Model parameters divided by `scale = γ_d √2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    pub kappa_bar: f64,
    pub omega_bar: f64,
    pub omega0_bar: f64,
    pub lambda_r_bar: f64,
    pub lambda_s_bar: f64,
    /// `γ_d √2` in rad/s.
    pub scale: f64,
}

impl ScaledParams {
    /// Scales physical rates (rad/s). Requires `gamma_d > 0`.
    pub fn new(
        kappa: f64,
        omega: f64,
        omega_0: f64,
        lambda_r: f64,
        lambda_s: f64,
        gamma_d: f64,
    ) -> Result<Self> {
        if !(gamma_d > 0.0) || !gamma_d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pole analysis needs gamma_d > 0 (got {gamma_d}); use the closed-form thresholds instead"
            )));
        }
        let scale = gamma_d * SQRT_2;
        let sp = Self {
            kappa_bar: kappa / scale,
            omega_bar: omega / scale,
            omega0_bar: omega_0 / scale,
            lambda_r_bar: lambda_r / scale,
            lambda_s_bar: lambda_s / scale,
            scale,
        };
        if ![sp.kappa_bar, sp.omega_bar, sp.omega0_bar, sp.lambda_r_bar, sp.lambda_s_bar]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidParameter("scaled parameters must be finite".into()));
        }
        Ok(sp)
    }

    /// Dimensionless parameters given directly; `scale` only matters for
    /// converting results back to rad/s.
    pub fn dimensionless(kappa_bar: f64, omega_bar: f64, omega0_bar: f64) -> Self {
        Self {
            kappa_bar,
            omega_bar,
            omega0_bar,
            lambda_r_bar: 0.0,
            lambda_s_bar: 0.0,
            scale: 1.0,
        }
    }

    /// Scaled view of a [`ModelParams`] (δ is not applied; see
    /// [`apply_delta_shift`]).
    pub fn from_model(mp: &ModelParams) -> Result<Self> {
        Self::new(mp.kappa, mp.omega, mp.omega_0, mp.lambda_r, mp.lambda_s, mp.gamma_d)
    }

    /// δ̄_cs = −(ω̄ + ω̄₀).
    pub fn delta_cs_bar(&self) -> f64 {
        -(self.omega_bar + self.omega0_bar)
    }

    pub fn unscale(&self, value: f64) -> f64 {
        value * self.scale
    }

    /// Sets the couplings for a scan of a single scalar λ̄: the `s` beam alone
    /// for [`Geometry::Single`], both beams equal otherwise.
    pub fn with_lambda(&self, geometry: Geometry, lambda_bar: f64) -> Self {
        let lambda_r_bar = match geometry {
            Geometry::Single => 0.0,
            Geometry::CoProp | Geometry::CounterProp => lambda_bar,
        };
        Self {
            lambda_r_bar,
            lambda_s_bar: lambda_bar,
            ..*self
        }
    }
}

/// Entries of the 2×2 Laplace-domain response matrix for (ã, ã†) and their
/// z-derivatives.
struct ResponseMatrix {
    m11: Complex,
    m22: Complex,
    m12: Complex,
    d11: Complex,
    d22: Complex,
    d12: Complex,
}

fn response_matrix(z: Complex, geometry: Geometry, sp: &ScaledParams) -> Result<ResponseMatrix> {
    let shift = Complex::new(0.0, sp.omega0_bar);
    let zp = z + shift;
    let zm = z - shift;
    let fp = erfcx(zp)?;
    let fm = erfcx(zm)?;
    let dfp = erfcx_derivative(zp, fp);
    let dfm = erfcx_derivative(zm, fm);

    let lr2 = match geometry {
        Geometry::Single => 0.0,
        _ => sp.lambda_r_bar * sp.lambda_r_bar,
    };
    let ls2 = sp.lambda_s_bar * sp.lambda_s_bar;
    let cross = match geometry {
        Geometry::CounterProp => SQRT_PI * sp.lambda_r_bar * sp.lambda_s_bar,
        Geometry::Single | Geometry::CoProp => 0.0,
    };
    let base = z + sp.kappa_bar;
    let iw = Complex::new(0.0, sp.omega_bar);
    Ok(ResponseMatrix {
        m11: base + iw + SQRT_PI * (lr2 * fp - ls2 * fm),
        m22: base - iw + SQRT_PI * (lr2 * fm - ls2 * fp),
        m12: cross * (fp - fm),
        d11: 1.0 + SQRT_PI * (lr2 * dfp - ls2 * dfm),
        d22: 1.0 + SQRT_PI * (lr2 * dfm - ls2 * dfp),
        d12: cross * (dfp - dfm),
    })
}

fn characteristic_and_derivative(
    z: Complex,
    geometry: Geometry,
    sp: &ScaledParams,
) -> Result<(Complex, Complex)> {
    let m = response_matrix(z, geometry, sp)?;
    Ok(match geometry {
        Geometry::Single | Geometry::CoProp => (m.m11, m.d11),
        // M21 = −M12
        Geometry::CounterProp => (
            m.m11 * m.m22 + m.m12 * m.m12,
            m.d11 * m.m22 + m.m11 * m.d22 + 2.0 * m.m12 * m.d12,
        ),
    })
}

/// Characteristic function whose roots are the poles of ⟨ã(z)⟩.
///
/// Single and co-propagating beams give the scalar denominator, the
/// counter-propagating geometry the determinant of the coupled (ã, ã†)
/// system.
pub fn characteristic(z: Complex, geometry: Geometry, sp: &ScaledParams) -> Result<Complex> {
    characteristic_and_derivative(z, geometry, sp).map(|(d, _)| d)
}

/// `(ã, ã†)` response to a unit kick of the cavity amplitude, i.e. the first
/// column of the inverse response matrix. Used for linear-response spectra.
pub fn cavity_response(z: Complex, geometry: Geometry, sp: &ScaledParams) -> Result<Complex> {
    let m = response_matrix(z, geometry, sp)?;
    Ok(match geometry {
        Geometry::Single | Geometry::CoProp => 1.0 / m.m11,
        Geometry::CounterProp => m.m22 / (m.m11 * m.m22 + m.m12 * m.m12),
    })
}

/// Resonant single-beam threshold from the implicit equation
/// `δ̄_cs = y + (2κ̄/√π) e^{y²} F(y)`, `λ̄² = κ̄ e^{y²}/√π`.
pub fn single_beam_threshold_implicit(delta_cs_bar: f64, kappa_bar: f64) -> Result<f64> {
    if !(kappa_bar > 0.0) || !delta_cs_bar.is_finite() || !kappa_bar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need kappa_bar > 0 and finite detuning (got {kappa_bar}, {delta_cs_bar})"
        )));
    }
    let target = delta_cs_bar.abs();
    let coef = 2.0 * kappa_bar / SQRT_PI;
    // ∫_0^y e^{t²} dt = e^{y²} F(y)
    let integral = |y: f64| {
        let y2 = y * y;
        if y2 > 700.0 {
            f64::INFINITY
        } else {
            y2.exp() * dawson(y)
        }
    };
    let h = |y: f64| y + coef * integral(y) - target;

    let mut hi = 1.0_f64;
    while h(hi) < 0.0 {
        hi *= 2.0;
        if hi > 30.0 {
            return Err(Error::ConvergenceFailure(format!(
                "single-beam bracket exceeded |y| = 30 for delta_cs_bar = {delta_cs_bar}"
            )));
        }
    }
    let mut lo = 0.0_f64;
    let mut y = 0.5 * hi;
    for _ in 0..200 {
        let value = h(y);
        if value == 0.0 {
            break;
        }
        if value < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        // h'(y) = 1 + (2κ̄/√π) e^{y²}
        let slope = 1.0 + coef * (y * y).exp();
        let mut next = y - value / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-15 * (1.0 + y.abs()) {
            y = next;
            break;
        }
        y = next;
    }
    Ok((kappa_bar * (y * y).exp() / SQRT_PI).sqrt())
}

/// Closed-form counter-propagating threshold
/// `λ̄ = √((ω̄² + κ̄²) / (8 ω̄ F(ω̄₀)))`, valid when ω̄ω̄₀ ≥ 0.
pub fn counter_threshold_closed(sp: &ScaledParams) -> Result<f64> {
    let (w, w0) = (sp.omega_bar, sp.omega0_bar);
    if w * w0 < 0.0 {
        return Err(Error::InvalidRegime(
            "closed form needs omega·omega_0 >= 0; use pole_threshold_numeric".into(),
        ));
    }
    if w == 0.0 {
        return Err(Error::InvalidRegime("closed form needs omega != 0".into()));
    }
    let (w, w0) = (w.abs(), w0.abs());
    let denom = 8.0 * w * dawson(w0);
    if !(denom > 0.0) {
        return Err(Error::InvalidRegime(
            "no finite counter-propagating threshold at omega_0 = 0".into(),
        ));
    }
    Ok(((w * w + sp.kappa_bar * sp.kappa_bar) / denom).sqrt())
}

/// Search rectangle `(re_min, re_max, im_max)` for a coupling λ̄.
pub fn search_window(sp: &ScaledParams, lambda_bar: f64) -> (f64, f64, f64) {
    (
        -4.0 * sp.kappa_bar - 1.0,
        sp.kappa_bar + lambda_bar + 1.0,
        sp.omega_bar.abs() + sp.omega0_bar.abs() + 10.0,
    )
}

fn newton(z0: Complex, geometry: Geometry, sp: &ScaledParams) -> Option<Complex> {
    let tol = |z: Complex| 1e-10 * (1.0 + z.norm_sqr());
    let mut z = z0;
    let (mut d, mut dd) = characteristic_and_derivative(z, geometry, sp).ok()?;
    for _ in 0..NEWTON_MAX_ITER {
        if d.norm() < 1e-3 * tol(z) {
            return Some(z);
        }
        if dd.norm() == 0.0 || !dd.is_finite() {
            return None;
        }
        let step = d / dd;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let candidate = z - t * step;
            if let Ok((dc, ddc)) = characteristic_and_derivative(candidate, geometry, sp) {
                if dc.norm() < d.norm() {
                    accepted = Some((candidate, dc, ddc));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((zn, dn, ddn)) = accepted else {
            return (d.norm() < tol(z)).then_some(z);
        };
        let moved = (zn - z).norm();
        z = zn;
        d = dn;
        dd = ddn;
        if moved <= 1e-14 * (1.0 + z.norm()) {
            break;
        }
    }
    (d.norm() < tol(z)).then_some(z)
}

// The counter-propagating determinant is real on the real axis, so its real
// roots (the soft modes) are bracketed exactly by sign changes.
fn real_axis_roots(sp: &ScaledParams, re_min: f64, re_max: f64) -> Result<Vec<Complex>> {
    let f = |x: f64| characteristic(Complex::new(x, 0.0), Geometry::CounterProp, sp).map(|d| d.re);
    let n = 8 * GRID_POINTS;
    let xs: Vec<f64> = (0..n)
        .map(|i| re_min + (re_max - re_min) * i as f64 / (n - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(n);
    for &x in &xs {
        values.push(f(x)?);
    }
    let mut out = Vec::new();
    for i in 0..n - 1 {
        let (mut a, mut b) = (xs[i], xs[i + 1]);
        let (mut fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            out.push(Complex::new(a, 0.0));
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        while b - a > 4.0 * f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        out.push(Complex::new(0.5 * (a + b), 0.0));
    }
    Ok(out)
}

/// All distinct roots reached by damped Newton iteration from the local
/// minima of |characteristic| on the seed grid.
pub fn roots_in_window(geometry: Geometry, sp: &ScaledParams) -> Result<Vec<Complex>> {
    let lambda_bar = sp.lambda_r_bar.max(sp.lambda_s_bar);
    let (re_min, re_max, im_max) = search_window(sp, lambda_bar);
    let n = GRID_POINTS;
    let node = |i: usize, j: usize| {
        Complex::new(
            re_min + (re_max - re_min) * i as f64 / (n - 1) as f64,
            -im_max + 2.0 * im_max * j as f64 / (n - 1) as f64,
        )
    };
    let mut modulus = vec![f64::INFINITY; n * n];
    for i in 0..n {
        for j in 0..n {
            if let Ok(v) = characteristic(node(i, j), geometry, sp) {
                if v.is_finite() {
                    modulus[i * n + j] = v.norm();
                }
            }
        }
    }

    let mut roots: Vec<Complex> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let here = modulus[i * n + j];
            if !here.is_finite() {
                continue;
            }
            let mut is_min = true;
            'nbr: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if ii < 0 || jj < 0 || ii >= n as i64 || jj >= n as i64 {
                        continue;
                    }
                    if modulus[ii as usize * n + jj as usize] < here {
                        is_min = false;
                        break 'nbr;
                    }
                }
            }
            if !is_min {
                continue;
            }
            if let Some(root) = newton(node(i, j), geometry, sp) {
                let dup = roots
                    .iter()
                    .any(|r| (r - root).norm() <= 1e-8 * (1.0 + root.norm()));
                if !dup {
                    roots.push(root);
                }
            }
        }
    }
    if geometry == Geometry::CounterProp {
        for root in real_axis_roots(sp, re_min, re_max)? {
            let dup = roots
                .iter()
                .any(|r| (r - root).norm() <= 1e-8 * (1.0 + root.norm()));
            if !dup {
                roots.push(root);
            }
        }
    }
    if roots.is_empty() {
        return Err(Error::ConvergenceFailure(
            "no Newton seed converged to a root of the characteristic function".into(),
        ));
    }
    Ok(roots)
}

/// Root with the largest real part. Ties (within 1e-9) go to the larger
/// |Im|, then to positive Im.
pub fn rightmost_root(geometry: Geometry, sp: &ScaledParams, lambda_bar: f64) -> Result<Complex> {
    let sp = sp.with_lambda(geometry, lambda_bar);
    let roots = roots_in_window(geometry, &sp)?;
    let mut best = roots[0];
    for &r in &roots[1..] {
        let tie = (r.re - best.re).abs() <= 1e-9 * (1.0 + best.re.abs());
        let better = if tie {
            r.im.abs() > best.im.abs() + 1e-9 || ((r.im.abs() - best.im.abs()).abs() <= 1e-9 && r.im > best.im)
        } else {
            r.re > best.re
        };
        if better {
            best = r;
        }
    }
    Ok(best)
}

/// Smallest λ̄ at which the rightmost pole crosses into Re z > 0, found by
/// bisection. `lambda_c` is reported in rad/s (λ̄ · scale); the scaled value
/// is in the `lambda_bar` diagnostic.
pub fn pole_threshold_numeric(geometry: Geometry, sp: &ScaledParams) -> Result<ThresholdResult> {
    let mut evaluations = 0usize;
    let mut growth = |lambda_bar: f64| -> Result<Complex> {
        evaluations += 1;
        rightmost_root(geometry, sp, lambda_bar)
    };

    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let mut root_hi = growth(hi)?;
    while root_hi.re <= 0.0 {
        if hi >= LAMBDA_BAR_MAX {
            return Ok(ThresholdResult::absent(ThresholdModel::PoleNumeric, geometry)
                .with_diagnostic("lambda_bar_max", LAMBDA_BAR_MAX)
                .with_diagnostic("rightmost_re_at_max", root_hi.re)
                .with_diagnostic("evaluations", evaluations as f64));
        }
        lo = hi;
        hi = (2.0 * hi).min(LAMBDA_BAR_MAX);
        root_hi = growth(hi)?;
    }
    let mut iterations = 0usize;
    while hi - lo > BISECTION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        let r = growth(mid)?;
        if r.re > 0.0 {
            hi = mid;
            root_hi = r;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let lambda_bar = 0.5 * (lo + hi);
    Ok(
        ThresholdResult::found(sp.unscale(lambda_bar), ThresholdModel::PoleNumeric, geometry)
            .with_diagnostic("lambda_bar", lambda_bar)
            .with_diagnostic("bracket_width", hi - lo)
            .with_diagnostic("iterations", iterations as f64)
            .with_diagnostic("evaluations", evaluations as f64)
            .with_diagnostic("crossing_re", root_hi.re)
            .with_diagnostic("crossing_im", root_hi.im),
    )
}

/// Folds the dispersive nonlinearity into ω̄ (ω → ω − δ/2), valid below
/// threshold.
pub fn apply_delta_shift(sp: &ScaledParams, delta: f64) -> ScaledParams {
    ScaledParams {
        omega_bar: sp.omega_bar - 0.5 * delta / sp.scale,
        ..*sp
    }
}

/// Scaled Doppler kernel value used by the resonant single-beam threshold,
/// `λ̄² = κ̄/√π`.
pub fn resonant_single_beam_threshold(kappa_bar: f64) -> f64 {
    (kappa_bar / PI.sqrt()).sqrt()
}

//! Dawson function and the scaled complementary error function
//! `f(z) = exp(z^2) erfc(z)` for complex arguments.
//!
//! `f` is evaluated through the Faddeeva function `w(u) = exp(-u^2) erfc(-iu)`
//! using `f(z) = w(iz)`. In the closed upper half plane `w` is computed with
//! Weideman's rational expansion (40 terms) for moderate `|u|` and with the
//! Laplace continued fraction for large `|u|`. The left half plane of `f` is
//! reached through `f(-z) = 2 exp(z^2) - f(z)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::{Complex, Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Largest `Re(z^2)` for which `exp(z^2)` is finite in f64.
const EXP_LIMIT: f64 = 709.0;

/// Dawson's integral `F(x) = exp(-x^2) ∫_0^x exp(t^2) dt`.
pub fn dawson(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    let value = if ax < 0.2 {
        dawson_taylor(ax)
    } else if ax <= 50.0 {
        dawson_rybicki(ax)
    } else {
        dawson_asymptotic(ax)
    };
    value.copysign(x)
}

// F(x) = Σ (-1)^k 2^k x^(2k+1) / (2k+1)!!
fn dawson_taylor(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for k in 1..30 {
        term *= -2.0 * x2 / (2 * k + 1) as f64;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

// Rybicki's sampling formula. The discretisation error is of order
// exp(-(π/2h)^2) ≈ 7e-18 for h = 1/4.
fn dawson_rybicki(x: f64) -> f64 {
    const H: f64 = 0.25;
    const HALF_TERMS: i32 = 15;
    let n0 = 2.0 * (0.5 * x / H).round();
    let xp = x - n0 * H;
    let mut sum = 0.0;
    for j in 0..HALF_TERMS {
        let n = (2 * j + 1) as f64;
        let e_plus = (-(xp - n * H).powi(2)).exp();
        let e_minus = (-(xp + n * H).powi(2)).exp();
        sum += e_plus / (n0 + n) + e_minus / (n0 - n);
    }
    sum * FRAC_1_SQRT_PI
}

fn dawson_asymptotic(x: f64) -> f64 {
    let inv = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= (2 * k - 1) as f64 * inv;
        sum += term;
        if term < 1e-17 {
            break;
        }
    }
    sum / (2.0 * x)
}

struct Weideman {
    l: f64,
    // coefficients of Z^0 .. Z^(N-1)
    coeffs: Vec<f64>,
}

const WEIDEMAN_TERMS: usize = 40;

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_TERMS;
        let m = 2 * n;
        let len = 2 * m;
        let l = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        // samples on k = -m+1 .. m-1, preceded by a zero
        let mut samples = vec![0.0; len];
        for (i, k) in (-(m as i64) + 1..m as i64).enumerate() {
            let theta = k as f64 * PI / m as f64;
            let t = l * (0.5 * theta).tan();
            samples[i + 1] = (-t * t).exp() * (l * l + t * t);
        }
        let shifted: Vec<f64> = (0..len).map(|i| samples[(i + len / 2) % len]).collect();
        let coeffs = (1..=n)
            .map(|freq| {
                let acc: f64 = shifted
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * (2.0 * PI * (freq * i) as f64 / len as f64).cos())
                    .sum();
                acc / len as f64
            })
            .collect();
        Weideman { l, coeffs }
    })
}

/// Faddeeva function `w(u)` for `Im u >= 0`.
fn faddeeva_upper(u: Complex) -> Complex {
    if u.norm() >= 10.0 {
        return faddeeva_continued_fraction(u);
    }
    let table = weideman();
    let iu = Complex::i() * u;
    let denom = table.l - iu;
    let z = (table.l + iu) / denom;
    let poly = table
        .coeffs
        .iter()
        .rev()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c);
    2.0 * poly / (denom * denom) + FRAC_1_SQRT_PI / denom
}

fn faddeeva_continued_fraction(u: Complex) -> Complex {
    let mut r = Complex::new(0.0, 0.0);
    for k in (1..=48).rev() {
        r = (0.5 * k as f64) / (u - r);
    }
    Complex::new(0.0, FRAC_1_SQRT_PI) / (u - r)
}

/// Scaled complementary error function `f(z) = exp(z^2) erfc(z)`.
///
/// Fails with [`Error::OverflowDomain`] when `Re z < 0` and `exp(z^2)` is not
/// representable.
pub fn erfcx(z: Complex) -> Result<Complex> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "erfcx argument must be finite, got {z}"
        )));
    }
    let mut value = if z.re >= 0.0 {
        faddeeva_upper(Complex::new(-z.im, z.re))
    } else {
        let z2 = z * z;
        if z2.re > EXP_LIMIT {
            return Err(Error::OverflowDomain {
                re: z.re,
                im: z.im,
            });
        }
        let reflected = faddeeva_upper(Complex::new(z.im, -z.re));
        2.0 * z2.exp() - reflected
    };
    if z.im == 0.0 {
        value.im = 0.0;
    } else if z.re == 0.0 {
        value.re = (-z.im * z.im).exp();
    }
    Ok(value)
}

/// `f'(z) = 2 z f(z) - 2/√π`, given `f(z)`.
pub fn erfcx_derivative(z: Complex, value: Complex) -> Complex {
    2.0 * z * value - 2.0 * FRAC_1_SQRT_PI
}

/// Dawson function obtained from the complex kernel on the imaginary axis,
/// `F(x) = (√π/2) Im f(-ix)`. Used as an independent cross-check of [`dawson`].
pub fn dawson_from_erfcx(x: f64) -> f64 {
    match erfcx(Complex::new(0.0, -x)) {
        Ok(v) => 0.5 * SQRT_PI * v.im,
        Err(_) => f64::NAN,
    }
}

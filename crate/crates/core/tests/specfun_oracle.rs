use superlab_core::specfun::{dawson, dawson_from_erfcx, erfcx};
use superlab_core::Complex;

const SQRT_PI: f64 = 1.772_453_850_905_516;

// 15-point Kronrod nodes (non-negative half) with Kronrod and embedded
// 7-point Gauss weights.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64) -> (Complex, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XK[j];
        let s = f(c - x) + f(c + x);
        k += s * WK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

fn composite<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64, panels: usize) -> Complex {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| gk15(f, a + i as f64 * h, a + (i + 1) as f64 * h).0)
        .sum()
}

// Composite Gauss–Kronrod returning the integral and the L1 norm of the
// integrand. Doubling the panel count must not change the result beyond
// roundoff, which certifies the oracle itself.
fn integrate<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64, panels: usize) -> (Complex, f64) {
    let coarse = composite(f, a, b, panels);
    let fine = composite(f, a, b, 2 * panels);
    let l1 = composite(&|t| Complex::new(f(t).norm(), 0.0), a, b, 2 * panels).re;
    assert!(
        (fine - coarse).norm() <= 1e-14 * l1,
        "oracle not converged: {coarse} vs {fine}"
    );
    (fine, l1)
}

fn dawson_oracle(x: f64) -> f64 {
    integrate(&|t: f64| Complex::new((t * t - x * x).exp(), 0.0), 0.0, x, 64).0.re
}

fn erfcx_oracle(z: Complex) -> (Complex, f64) {
    let upper = z.re.abs() + 9.0;
    let f = |t: f64| (-(t * t) - 2.0 * z * t).exp();
    let (v, l1) = integrate(&f, 0.0, upper, 256);
    (v * (2.0 / SQRT_PI), l1 * (2.0 / SQRT_PI))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn dawson_matches_quadrature() {
    let mut x = 0.01;
    while x < 6.0 {
        let (v, o) = (dawson(x), dawson_oracle(x));
        assert!(rel(v, o) < 1e-13, "x = {x}: {v} vs {o}");
        x *= 1.13;
    }
}

#[test]
fn dawson_high_precision_table() {
    let table = [
        (0.1, 0.099_335_992_397_852_861_15),
        (0.5, 0.424_436_383_502_022_295_93),
        (1.0, 0.538_079_506_912_768_419_14),
        (1.5, 0.428_249_071_085_398_625_48),
        (2.5, 0.223_083_722_167_435_481_13),
        (5.0, 0.102_134_074_424_276_835_44),
        (10.0, 0.050_253_847_187_598_528_033),
        (30.0, 0.016_675_941_401_059_175_798),
        (100.0, 0.005_000_250_037_509_378_282_7),
    ];
    for (x, want) in table {
        assert!(rel(dawson(x), want) < 2e-15, "x = {x}");
        assert!(rel(dawson_from_erfcx(x), want) < 1e-13, "bridge x = {x}");
    }
}

#[test]
fn dawson_maximum_location() {
    // F'(x) = 1 - 2xF(x) vanishes at the maximum x ≈ 0.9241388730
    let x = 0.924_138_873_004_591_8;
    assert!((1.0 - 2.0 * x * dawson(x)).abs() < 1e-14);
}

#[test]
fn erfcx_matches_quadrature() {
    for re in [-2.5, -1.0, -0.2, 0.0, 0.3, 1.0, 2.0, 3.0] {
        for im in [-4.0, -1.5, -0.4, 0.0, 0.6, 2.0, 4.5] {
            let z = Complex::new(re, im);
            let v = erfcx(z).unwrap();
            let (o, scale) = erfcx_oracle(z);
            assert!(
                (v - o).norm() <= 1e-13 * scale + 1e-13 * o.norm(),
                "z = {z}: {v} vs {o}"
            );
        }
    }
}

#[test]
fn erfcx_high_precision_table() {
    let table = [
        ((0.5, 0.5), (0.533_156_707_912_174_913_77, -0.230_488_231_384_458_408_71)),
        ((2.0, -3.0), (0.092_710_766_426_443_333_99, 0.128_316_962_228_261_575_4)),
        ((-1.2, 0.7), (-0.891_382_176_555_385_151_55, -5.277_319_981_924_972_008_7)),
        ((0.0, 4.0), (1.125_351_747_192_591_145_1e-7, -0.145_953_589_900_152_783_27)),
        ((7.0, 11.0), (0.023_357_868_548_425_940_66, -0.036_488_882_065_821_816_929)),
        ((-3.0, -2.0), (250.347_306_203_739_075_56, -159.187_851_048_187_233_22)),
        ((15.0, 0.1), (0.037_527_956_712_563_130_905, -0.000_249_086_642_047_581_961_39)),
        ((0.01, -25.0), (9.048_783_909_133_161_117_3e-6, 0.022_585_677_284_391_044_277)),
    ];
    for ((x, y), (re, im)) in table {
        let v = erfcx(Complex::new(x, y)).unwrap();
        let want = Complex::new(re, im);
        assert!((v - want).norm() <= 1e-13 * want.norm(), "z = ({x}, {y}): {v}");
    }
}

//! Independent numerical oracles shared by integration tests.

#![allow(dead_code)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
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

/// 15-point Kronrod estimate and its 7-point Gauss companion.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, g * h)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64, abs: f64, depth: u32) -> f64 {
    let (k, g) = gk15(f, a, b);
    if (k - g).abs() <= abs.max(rel * k.abs()) || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, rel, abs * 0.5, depth - 1) + adapt(f, m, b, rel, abs * 0.5, depth - 1)
}

/// Adaptive Gauss–Kronrod quadrature over consecutive breakpoints.
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], rel: f64) -> f64 {
    breaks
        .windows(2)
        .map(|w| adapt(&f, w[0], w[1], rel, 1e-300, 40))
        .sum()
}

/// e^x·E_m(x) via E_m(x) = ∫₁^∞ e^{−xt} t^{−m} dt with t = e^w.
pub fn en_scaled_quadrature(m: u32, x: f64) -> f64 {
    let w0 = (1.0 / x).ln_1p();
    let w_end = (80.0 / x).ln_1p() + 1.0;
    let f = |w: f64| (-x * w.exp_m1() - (m as f64 - 1.0) * w).exp();
    integrate(f, &[0.0, w0, w_end], 1e-14)
}

/// ψ(x) from Binet's second formula:
/// ln x − 1/(2x) − 2∫₀^∞ t / ((t² + x²)(e^{2πt} − 1)) dt.
pub fn digamma_binet(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let f = |t: f64| {
        if t == 0.0 {
            1.0 / (two_pi * x * x)
        } else {
            t / ((t * t + x * x) * (two_pi * t).exp_m1())
        }
    };
    let mut breaks = vec![0.0];
    if x < 8.0 {
        breaks.push(x);
    }
    breaks.push(8.0);
    x.ln() - 0.5 / x - 2.0 * integrate(f, &breaks, 1e-15)
}

pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

//! Scalar special functions behind the ergodic-rate lower bounds.
//!
//! Everything here is a pure function of its arguments. The generalized
//! exponential integrals are also offered in an `e^x`-scaled form because the
//! bound expressions only ever use `e^x · E_m(x)`, and `x` grows without limit
//! as the private power fraction goes to zero.

use crate::error::{domain, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const EN_EPS: f64 = 1e-16;
const EN_MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

#[inline]
pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

/// Digamma function ψ(x) = Γ'(x)/Γ(x) for x > 0.
///
/// Shifts the argument above 10 with ψ(x) = ψ(x+1) − 1/x and then applies the
/// Stirling-type asymptotic series.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("digamma", format!("argument {x} must be positive and finite")));
    }
    let mut z = x;
    let mut shift = 0.0;
    while z < 10.0 {
        shift += 1.0 / z;
        z += 1.0;
    }
    let w = 1.0 / (z * z);
    // Bernoulli coefficients B_2k / (2k) for k = 1..7.
    #[rustfmt::skip]
    let series = w * (1.0 / 12.0
        - w * (1.0 / 120.0
        - w * (1.0 / 252.0
        - w * (1.0 / 240.0
        - w * (1.0 / 132.0
        - w * (691.0 / 32760.0
        - w * (1.0 / 12.0)))))));
    Ok(z.ln() - 0.5 / z - series - shift)
}

fn check_en_args(func: &'static str, m: u32, x: f64) -> Result<()> {
    if m < 1 {
        return Err(domain(func, "order must be at least 1"));
    }
    if x.is_nan() || x < 0.0 || (x == 0.0 && m == 1) {
        return Err(domain(func, format!("E_{m}({x}) is undefined")));
    }
    Ok(())
}

/// E₁(x) by its power series, valid (and used) for 0 < x ≤ 1.
fn e1_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = 0.0;
    for k in 1..EN_MAX_ITER {
        let kf = k as f64;
        term *= -x / kf;
        let add = -term / kf;
        acc += add;
        if add.abs() <= EN_EPS * acc.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + acc
}

/// e^x·E_m(x) for x > 1 via the modified Lentz continued fraction.
fn en_scaled_cf(m: u32, x: f64) -> f64 {
    let n1 = f64::from(m) - 1.0;
    let mut b = x + f64::from(m);
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..EN_MAX_ITER {
        let fi = i as f64;
        let an = -fi * (n1 + fi);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EN_EPS {
            break;
        }
    }
    h
}

/// Scaled values e^x·E_m(x) for m = 1..=count.
///
/// One direct evaluation at a pivot order, then the three-term recurrence run
/// only in its stable direction: downward for m < x, upward for m ≥ x.
fn en_scaled_table(count: u32, x: f64) -> Vec<f64> {
    let n = count as usize;
    let mut out = vec![0.0; n];
    if x == 0.0 {
        // E_1(0) is excluded by the callers; E_m(0) = 1/(m-1) otherwise.
        for (i, v) in out.iter_mut().enumerate().skip(1) {
            *v = 1.0 / i as f64;
        }
        return out;
    }
    let pivot = if x <= 1.0 {
        out[0] = e1_series(x) * x.exp();
        1
    } else {
        let p = (x.ceil() as u64).clamp(1, u64::from(count)) as u32;
        out[p as usize - 1] = en_scaled_cf(p, x);
        p as usize
    };
    for m in (1..pivot).rev() {
        out[m - 1] = (1.0 - m as f64 * out[m]) / x;
    }
    for m in pivot..n {
        out[m] = (1.0 - x * out[m - 1]) / m as f64;
    }
    out
}

/// Generalized exponential integral E_m(x) = ∫₁^∞ e^{−xt} t^{−m} dt.
pub fn exp_integral_en(m: u32, x: f64) -> Result<f64> {
    check_en_args("exp_integral_en", m, x)?;
    if x == 0.0 {
        return Ok(1.0 / (f64::from(m) - 1.0));
    }
    if x > 1.0 {
        return Ok(en_scaled_cf(m, x) * (-x).exp());
    }
    let mut e = e1_series(x);
    let emx = (-x).exp();
    for k in 1..m {
        e = (emx - x * e) / f64::from(k);
    }
    Ok(e)
}

/// e^x·E_m(x), finite for arbitrarily large x.
pub fn exp_integral_en_scaled(m: u32, x: f64) -> Result<f64> {
    check_en_args("exp_integral_en_scaled", m, x)?;
    if x == 0.0 {
        return Ok(1.0 / (f64::from(m) - 1.0));
    }
    if x > 1.0 {
        return Ok(en_scaled_cf(m, x));
    }
    Ok(exp_integral_en(m, x)? * x.exp())
}

/// Σ_{m=1}^{count} E_m(x), O(count) work.
pub fn en_partial_sum(count: u32, x: f64) -> Result<f64> {
    Ok(en_scaled_partial_sum(count, x)? * (-x).exp())
}

/// e^x·Σ_{m=1}^{count} E_m(x); this is the quantity appearing in the
/// common-stream bound and stays finite when `x` is huge.
pub fn en_scaled_partial_sum(count: u32, x: f64) -> Result<f64> {
    if count < 1 {
        return Err(domain("en_partial_sum", "count must be at least 1"));
    }
    check_en_args("en_partial_sum", 1, x)?;
    Ok(en_scaled_table(count, x).iter().rev().sum())
}

/// Small-argument surrogate for e^x·Σ_{m=1}^{count} E_m(x):
/// ln(count − 1) + 1/(2(count − 1)) − ln x.
pub fn en_sum_high_power_approx(count: u32, x: f64) -> Result<f64> {
    if count <= 1 {
        return Err(domain(
            "en_sum_high_power_approx",
            format!("count {count} must be at least 2"),
        ));
    }
    if !(x > 0.0) {
        return Err(domain("en_sum_high_power_approx", format!("argument {x} must be positive")));
    }
    let c = f64::from(count) - 1.0;
    Ok(c.ln() + 0.5 / c - x.ln())
}

/// Shape/scale parametrization of a Gamma distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    shape: f64,
    scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
            return Err(domain(
                "GammaParams",
                format!("shape {shape} and scale {scale} must be positive"),
            ));
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    /// E{ln X} = ln θ + ψ(D).
    pub fn log_mean(&self) -> Result<f64> {
        Ok(self.scale.ln() + digamma(self.shape)?)
    }
}

/// Second-order moment matching of a weighted sum of independent Gamma
/// variables `Σ wᵢ·Xᵢ`, `Xᵢ ~ Gamma(Dᵢ, θᵢ)`, onto a single Gamma.
///
/// The weight multiplies the component scale. The result has the exact mean
/// and variance of the sum.
pub fn moment_match(components: &[(GammaParams, f64)]) -> Result<GammaParams> {
    if components.is_empty() {
        return Err(domain("moment_match", "no components"));
    }
    let mut first = 0.0;
    let mut second = 0.0;
    for (g, w) in components {
        if !(*w > 0.0 && w.is_finite()) {
            return Err(domain("moment_match", format!("weight {w} must be positive")));
        }
        let theta = g.scale * w;
        first += g.shape * theta;
        second += g.shape * theta * theta;
    }
    GammaParams::new(first * first / second, second / first)
}

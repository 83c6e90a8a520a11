//! Lower bounds on the approximated ESR of each phase, the closed-form
//! power split derived from them, and an exhaustive grid search over the
//! Monte Carlo sum rate.
//!
//! Phase 2 has the same structure as phase 1 with (N, K, G) replaced by
//! (M, L, L), so both phases share one implementation parametrized by
//! antennas, users and streams.

use std::f64::consts::LN_2;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::effective_epsilon;
use crate::config::{BuMode, SystemConfig};
use crate::error::{domain, Error, Result};
use crate::ratecalc::{sum_rate_variants, Phase1Rates, Phase2Rates, RealizationSet, Variant};
use crate::specfun::{en_scaled_partial_sum, GammaParams, EULER_GAMMA};

fn log2(x: f64) -> f64 {
    x.log2()
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

fn check_epsilon(func: &'static str, eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(domain(func, format!("epsilon {eps} outside [0, 1]")));
    }
    Ok(())
}

/// Moment-matched Gamma law of the effective private-stream gain with
/// `antennas` transmit antennas, `streams` ZF streams and CSIT quality ε.
pub fn gamma_params(antennas: usize, streams: usize, eps: f64) -> Result<GammaParams> {
    check_epsilon("gamma_params", eps)?;
    if streams == 0 || streams > antennas {
        return Err(domain(
            "gamma_params",
            format!("need 1 <= streams ({streams}) <= antennas ({antennas})"),
        ));
    }
    let e2 = eps * eps;
    let a = antennas as f64 + 1.0;
    let g = streams as f64;
    let first = e2 * a + (1.0 - 2.0 * e2) * g;
    let second = e2 * e2 * a + (1.0 - 2.0 * e2) * g;
    if !(first > 0.0 && second > 0.0) {
        return Err(domain(
            "gamma_params",
            format!("non-positive moment ({first}, {second}) for N={antennas}, G={streams}, eps={eps}"),
        ));
    }
    GammaParams::new(first * first / second, second / first)
}

pub fn gamma_params_phase1(n: usize, g: usize, eps: f64) -> Result<GammaParams> {
    gamma_params(n, g, eps)
}

pub fn gamma_params_phase2(m: usize, l: usize, eps: f64) -> Result<GammaParams> {
    gamma_params(m, l, eps)
}

/// ⌊D̂·users⌉, the number of E_m terms.
pub fn term_count(params: &GammaParams, users: usize) -> f64 {
    (params.shape() * users as f64).round()
}

fn beta(func: &'static str, power_t: f64, users: usize, streams: usize, params: &GammaParams) -> Result<f64> {
    if !(power_t > 0.0) {
        return Err(domain(func, format!("P*t = {power_t} must be positive")));
    }
    let count = term_count(params, users);
    if count < 1.0 {
        return Err(domain(func, format!("term count {count} below 1")));
    }
    let x = (users * streams) as f64 / (power_t * params.scale());
    let sum = en_scaled_partial_sum(count as u32, x)?;
    Ok(-EULER_GAMMA - (users as f64).ln() - sum)
}

/// β for the BS common stream, with argument KG/(P₁θ̂t₁).
pub fn beta_phase1(p1: f64, t1: f64, k: usize, g: usize, params: &GammaParams) -> Result<f64> {
    beta("beta_phase1", p1 * t1, k, g, params)
}

/// β for the relay common stream, argument L²/(P₂θ̂t₂).
pub fn beta_phase2(p2: f64, t2: f64, l: usize, params: &GammaParams) -> Result<f64> {
    beta("beta_phase2", p2 * t2, l, l, params)
}

/// High-power form of β (the E_m sum replaced by its logarithmic limit).
pub fn beta_high_power(power_t: f64, users: usize, streams: usize, params: &GammaParams) -> Result<f64> {
    let c = term_count(params, users) - 1.0;
    if c < 1.0 {
        return Err(domain("beta_high_power", format!("term count {} below 2", c + 1.0)));
    }
    Ok(-EULER_GAMMA + (streams as f64 / (power_t * params.scale() * c)).ln() - 0.5 / c)
}

fn lower_bound(
    func: &'static str,
    t: f64,
    power: f64,
    antennas: usize,
    users: usize,
    streams: usize,
    eps: f64,
) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain(func, format!("t = {t} outside (0, 1]")));
    }
    let params = gamma_params(antennas, streams, eps)?;
    let g = streams as f64;
    let mu = params.log_mean()?;
    let signal = g * log2_1p(power * mu.exp() * t / g);
    let leak = g * log2_1p(power * (1.0 - eps * eps) * (g - 1.0) * t / g);
    let b = beta(func, power * t, users, streams, &params)?;
    let common = log2_1p(power * (1.0 - t) * b.exp());
    Ok(signal - leak + common)
}

/// Lower bound on twice the phase-1 AESR (the bracket without ½), bits/s/Hz.
pub fn lower_bound_phase1(t1: f64, p1: f64, n: usize, k: usize, g: usize, eps: f64) -> Result<f64> {
    lower_bound("lower_bound_phase1", t1, p1, n, k, g, eps)
}

/// Lower bound on twice the phase-2 AESR.
pub fn lower_bound_phase2(t2: f64, p2: f64, m: usize, l: usize, eps: f64) -> Result<f64> {
    lower_bound("lower_bound_phase2", t2, p2, m, l, l, eps)
}

/// Terms of the high-power surrogate of a phase bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub d_hat: f64,
    pub theta_hat: f64,
    /// ln θ̂ + ψ(D̂)
    pub mu: f64,
    /// Exact β at t = 1 (β itself varies with t).
    pub beta: f64,
    pub rho: f64,
    pub omega: f64,
    pub tau: f64,
    /// ⌊D̂·users⌉
    pub n_terms: f64,
}

fn closed_form_terms(
    func: &'static str,
    power: f64,
    antennas: usize,
    users: usize,
    streams: usize,
    eps: f64,
) -> Result<BoundTerms> {
    let params = gamma_params(antennas, streams, eps)?;
    let n_terms = term_count(&params, users);
    if n_terms < 2.0 {
        return Err(domain(func, format!("term count {n_terms} below 2, rho undefined")));
    }
    let g = streams as f64;
    let mu = params.log_mean()?;
    let c = n_terms - 1.0;
    Ok(BoundTerms {
        d_hat: params.shape(),
        theta_hat: params.scale(),
        mu,
        beta: beta(func, power, users, streams, &params)?,
        rho: g / (params.scale() * c) * (-EULER_GAMMA - 0.5 / c).exp(),
        omega: power * (1.0 - eps * eps) * (g - 1.0) / g,
        tau: power * mu.exp() / g,
        n_terms,
    })
}

pub fn closed_form_terms_phase1(p1: f64, n: usize, k: usize, g: usize, eps: f64) -> Result<BoundTerms> {
    closed_form_terms("closed_form_terms_phase1", p1, n, k, g, eps)
}

pub fn closed_form_terms_phase2(p2: f64, m: usize, l: usize, eps: f64) -> Result<BoundTerms> {
    closed_form_terms("closed_form_terms_phase2", p2, m, l, l, eps)
}

/// High-power surrogate of a phase bound:
/// −S·log₂(1/(tτ) + ω/τ) + log₂(1 − ρ + ρ/t).
pub fn surrogate(t: f64, terms: &BoundTerms, streams: usize) -> f64 {
    let s = streams as f64;
    -s * log2(1.0 / (t * terms.tau) + terms.omega / terms.tau) + log2(1.0 - terms.rho + terms.rho / t)
}

/// Which case of the closed-form rule produced t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Interior,
    SaturatedToOne,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Interior => "interior",
            Branch::SaturatedToOne => "saturated_to_one",
        }
    }
}

/// Closed-form maximizer of the surrogate for given terms.
pub fn t_opt_from_terms(phase: &'static str, terms: &BoundTerms, streams: usize) -> Result<(f64, Branch)> {
    let s = streams as f64;
    let (rho, omega) = (terms.rho, terms.omega);
    if rho * (omega + 1.0) / s <= 1.0 {
        return Ok((1.0, Branch::SaturatedToOne));
    }
    let t = rho * (s - 1.0) / (rho * (omega + s) - s);
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InconsistentAllocation { phase, value: t });
    }
    Ok((t, Branch::Interior))
}

fn t_opt(
    phase: &'static str,
    power: f64,
    antennas: usize,
    users: usize,
    streams: usize,
    eps: f64,
) -> Result<(f64, Branch, Option<BoundTerms>)> {
    if streams < 2 {
        if streams == 1 {
            warn!("{phase}: single stream, common stream disabled (t = 1)");
        }
        return Ok((1.0, Branch::SaturatedToOne, None));
    }
    let params = gamma_params(antennas, streams, eps)?;
    if term_count(&params, users) < 2.0 {
        warn!("{phase}: fewer than two E_m terms, common stream disabled (t = 1)");
        return Ok((1.0, Branch::SaturatedToOne, None));
    }
    let terms = closed_form_terms(phase, power, antennas, users, streams, eps)?;
    let (t, branch) = t_opt_from_terms(phase, &terms, streams)?;
    Ok((t, branch, Some(terms)))
}

/// Phase-1 private power fraction t₁ and the branch taken.
pub fn t1_opt(p1: f64, n: usize, k: usize, g: usize, eps: f64) -> Result<(f64, Branch)> {
    t_opt("phase1", p1, n, k, g, eps).map(|(t, b, _)| (t, b))
}

/// Phase-2 private power fraction t₂ and the branch taken.
pub fn t2_opt(p2: f64, m: usize, l: usize, eps: f64) -> Result<(f64, Branch)> {
    t_opt("phase2", p2, m, l, l, eps).map(|(t, b, _)| (t, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMethod {
    ClosedForm,
    Exhaustive,
    Fixed,
}

impl AllocationMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            AllocationMethod::ClosedForm => "closed_form",
            AllocationMethod::Exhaustive => "exhaustive",
            AllocationMethod::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub t1: f64,
    pub t2: f64,
    pub method: AllocationMethod,
    pub branch1: Branch,
    pub branch2: Branch,
    /// Surrogate value at t₁; `None` when the surrogate is undefined.
    pub bound_value_phase1: Option<f64>,
    pub bound_value_phase2: Option<f64>,
    /// Monte Carlo objective at (t₁, t₂) for searched allocations.
    pub objective: Option<f64>,
}

fn branch_of(t: f64) -> Branch {
    if t < 1.0 {
        Branch::Interior
    } else {
        Branch::SaturatedToOne
    }
}

fn phase_terms(config: &SystemConfig) -> (Option<BoundTerms>, Option<BoundTerms>) {
    let eps1 = effective_epsilon(config, config.p1);
    let eps2 = effective_epsilon(config, config.p2);
    let (k, l, g) = (config.n_bs_users, config.n_relay_users, config.phase1_streams());
    let t1 = (g >= 2)
        .then(|| closed_form_terms("phase1", config.p1, config.n_bs_antennas, k, g, eps1).ok())
        .flatten();
    let t2 = (l >= 2)
        .then(|| closed_form_terms("phase2", config.p2, config.n_relay_antennas, l, l, eps2).ok())
        .flatten();
    (t1, t2)
}

/// Closed-form (t₁, t₂) for a configuration, with ε taken from the CSIT
/// model at P₁ and P₂.
pub fn closed_form_allocation(config: &SystemConfig) -> Result<AllocationResult> {
    config.validate()?;
    let eps1 = effective_epsilon(config, config.p1);
    let eps2 = effective_epsilon(config, config.p2);
    let (k, l, g) = (config.n_bs_users, config.n_relay_users, config.phase1_streams());
    let (t1, branch1, terms1) = t_opt("phase1", config.p1, config.n_bs_antennas, k, g, eps1)?;
    let (t2, branch2, terms2) = if l == 0 {
        (1.0, Branch::SaturatedToOne, None)
    } else {
        t_opt("phase2", config.p2, config.n_relay_antennas, l, l, eps2)?
    };
    Ok(AllocationResult {
        t1,
        t2,
        method: AllocationMethod::ClosedForm,
        branch1,
        branch2,
        bound_value_phase1: terms1.map(|tm| surrogate(t1, &tm, g)),
        bound_value_phase2: terms2.map(|tm| surrogate(t2, &tm, l)),
        objective: None,
    })
}

/// Grid densities for the two-stage search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Points per axis of the logarithmic stage.
    pub coarse: usize,
    /// Points per axis of the linear refinement.
    pub refine: usize,
    /// Smallest t on the coarse grid.
    pub t_min: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            coarse: 64,
            refine: 64,
            t_min: 1e-6,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.coarse < 8 {
            errs.push(format!("coarse grid ({}) must have at least 8 points", self.coarse));
        }
        if self.refine < 8 {
            errs.push(format!("refine grid ({}) must have at least 8 points", self.refine));
        }
        if !(self.t_min > 0.0 && self.t_min < 1.0) {
            errs.push(format!("t_min ({}) must lie in (0, 1)", self.t_min));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errs))
        }
    }

    /// Log-spaced points from t_min to 1 inclusive.
    pub fn coarse_points(&self) -> Vec<f64> {
        let lo = self.t_min.ln();
        let last = self.coarse - 1;
        (0..self.coarse)
            .map(|i| if i == last { 1.0 } else { (lo * (1.0 - i as f64 / last as f64)).exp() })
            .collect()
    }
}

/// `count` evenly spaced points on [lo, hi].
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let last = count - 1;
    (0..count)
        .map(|i| if i == last { hi } else { lo + (hi - lo) * i as f64 / last as f64 })
        .collect()
}

/// Best grid point: (index into t1s, index into t2s, objective).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMax {
    pub i1: usize,
    pub i2: usize,
    pub t1: f64,
    pub t2: f64,
    pub value: f64,
}

/// Maximizes `variant` over the product grid `t1s × t2s` on a fixed
/// realization set. Phase rates are computed once per axis value. Ties keep
/// the lowest (i1, i2) in row-major order.
pub fn grid_argmax(set: &RealizationSet, t1s: &[f64], t2s: &[f64], variant: Variant, mode: BuMode) -> GridMax {
    assert!(!t1s.is_empty() && !t2s.is_empty(), "empty search grid");
    let p1: Vec<Phase1Rates> = t1s.par_iter().map(|&t| set.phase1_rates(t)).collect();
    let p2: Vec<Phase2Rates> = t2s.par_iter().map(|&t| set.phase2_rates(t, mode)).collect();
    let mut best = GridMax {
        i1: 0,
        i2: 0,
        t1: t1s[0],
        t2: t2s[0],
        value: f64::NEG_INFINITY,
    };
    for (i1, a) in p1.iter().enumerate() {
        for (i2, b) in p2.iter().enumerate() {
            let v = sum_rate_variants(a, b).get(variant);
            if v > best.value {
                best = GridMax {
                    i1,
                    i2,
                    t1: t1s[i1],
                    t2: t2s[i2],
                    value: v,
                };
            }
        }
    }
    best
}

fn neighbour_cell(points: &[f64], i: usize) -> (f64, f64) {
    let lo = points[i.saturating_sub(1)];
    let hi = points[(i + 1).min(points.len() - 1)];
    (lo, hi)
}

/// Two-stage search on an existing realization set, using the set's BU mode.
pub fn exhaustive_search_on(set: &RealizationSet, variant: Variant, grid: &GridSpec) -> Result<AllocationResult> {
    exhaustive_search_with(set, variant, set.config().bu_phase2_mode, grid)
}

/// Two-stage search with an explicit BU phase-2 mode.
pub fn exhaustive_search_with(
    set: &RealizationSet,
    variant: Variant,
    mode: BuMode,
    grid: &GridSpec,
) -> Result<AllocationResult> {
    grid.validate()?;
    let config = set.config();
    let coarse = grid.coarse_points();
    let t2_axis = if config.n_relay_users == 0 { vec![1.0] } else { coarse.clone() };
    let stage1 = grid_argmax(set, &coarse, &t2_axis, variant, mode);

    let (a1, b1) = neighbour_cell(&coarse, stage1.i1);
    let fine1 = linspace(a1, b1, grid.refine);
    let fine2 = if config.n_relay_users == 0 {
        vec![1.0]
    } else {
        let (a2, b2) = neighbour_cell(&t2_axis, stage1.i2);
        linspace(a2, b2, grid.refine)
    };
    let mut best = grid_argmax(set, &fine1, &fine2, variant, mode);
    if stage1.value > best.value {
        best = stage1;
    }

    let (terms1, terms2) = phase_terms(config);
    Ok(AllocationResult {
        t1: best.t1,
        t2: best.t2,
        method: AllocationMethod::Exhaustive,
        branch1: branch_of(best.t1),
        branch2: branch_of(best.t2),
        bound_value_phase1: terms1.map(|tm| surrogate(best.t1, &tm, config.phase1_streams())),
        bound_value_phase2: terms2.map(|tm| surrogate(best.t2, &tm, config.n_relay_users)),
        objective: Some(best.value),
    })
}

/// Draws `n_realizations` channels and searches (t₁, t₂) ∈ [t_min, 1]² for
/// the largest Monte Carlo `variant` sum rate.
pub fn exhaustive_search(
    config: &SystemConfig,
    variant: Variant,
    n_realizations: usize,
    grid: &GridSpec,
) -> Result<AllocationResult> {
    let set = RealizationSet::generate(config, n_realizations)?;
    exhaustive_search_on(&set, variant, grid)
}

/// A fixed, externally chosen split.
pub fn fixed_allocation(t1: f64, t2: f64) -> Result<AllocationResult> {
    for (name, t) in [("t1", t1), ("t2", t2)] {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidConfig(vec![format!("{name} ({t}) must lie in (0, 1]")]));
        }
    }
    Ok(AllocationResult {
        t1,
        t2,
        method: AllocationMethod::Fixed,
        branch1: branch_of(t1),
        branch2: branch_of(t2),
        bound_value_phase1: None,
        bound_value_phase2: None,
        objective: None,
    })
}

//! SINRs, ergodic rates, residual common-stream interference and the four
//! total sum-rate variants.
//!
//! Precoders do not depend on the power split, so each realization is reduced
//! once to the squared effective gains |hᴴp|² that the SINR expressions need
//! ([`LinkGains`]). Evaluating a new (t₁, t₂) is then O(streams) per
//! realization. Noise power is 1 everywhere.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_realization, CMatrix, ChannelRealization};
use crate::config::{BuMode, SystemConfig};
use crate::error::Result;
use crate::precoder::{build_precoders, PrecoderSet};

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn mean_of(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    let mut n = 0usize;
    for v in values {
        acc.add(v);
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        acc.value() / n as f64
    }
}

fn min_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

#[inline]
fn log2_1p(sinr: f64) -> f64 {
    sinr.ln_1p() / std::f64::consts::LN_2
}

/// Gains seen by the phase-1 receivers: K BUs first, then the L relay
/// antennas that carry relay streams.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Gains {
    /// |h_rᴴ p_{c,b}|²
    pub common: Vec<f64>,
    /// |h_rᴴ p_r|² (own private stream)
    pub own: Vec<f64>,
    /// Σ_{j≠r} |h_rᴴ p_j|² over all K+L private precoders
    pub cross: Vec<f64>,
}

/// Gains seen during phase 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Gains {
    /// |h_{r,l}ᴴ p_{c,r}|²
    pub ru_common: Vec<f64>,
    /// |h_{r,l}ᴴ p_{r,l}|²
    pub ru_own: Vec<f64>,
    /// Σ_{j≠l} |h_{r,l}ᴴ p_{r,j}|²
    pub ru_cross: Vec<f64>,
    /// |h_{r,k}ᴴ p_{c,r}|²
    pub bu_relay_common: Vec<f64>,
    /// Σ_l |h_{r,k}ᴴ p_{r,l}|²
    pub bu_relay_private: Vec<f64>,
    /// |h_{b,k}ᴴ p_{b,k}|²
    pub bu_own: Vec<f64>,
    /// Σ_{j∈K, j≠k} |h_{b,k}ᴴ p_{b,j}|²
    pub bu_cross: Vec<f64>,
}

/// Squared effective gains of one realization under its precoders.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGains {
    pub phase1: Phase1Gains,
    pub phase2: Phase2Gains,
}

/// Splits the Gram-like product `hᴴp` (receivers × streams, square) into the
/// diagonal and the off-diagonal row sums.
fn own_and_cross(products: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = products.nrows();
    let mut own = Vec::with_capacity(n);
    let mut cross = Vec::with_capacity(n);
    for r in 0..n {
        let mut acc = 0.0;
        for j in 0..products.ncols() {
            if j != r {
                acc += products[(r, j)].norm_sqr();
            }
        }
        own.push(products[(r, r)].norm_sqr());
        cross.push(acc);
    }
    (own, cross)
}

impl LinkGains {
    pub fn new(realization: &ChannelRealization, precoders: &PrecoderSet, config: &SystemConfig) -> Self {
        let (k, l) = (config.n_bs_users, config.n_relay_users);
        let n = config.n_bs_antennas;

        let mut receivers = CMatrix::zeros(n, k + l);
        receivers.columns_mut(0, k).copy_from(&realization.h_bs_users);
        receivers
            .columns_mut(k, l)
            .copy_from(&realization.h_bs_relay.columns(0, l));
        let rx_h = receivers.adjoint();
        let (own1, cross1) = own_and_cross(&(&rx_h * &precoders.bs_private));
        let common1 = (&rx_h * &precoders.bs_common).iter().map(|z| z.norm_sqr()).collect();

        let ru_h = realization.h_relay_rus.adjoint();
        let (ru_own, ru_cross) = own_and_cross(&(&ru_h * &precoders.relay_private));
        let ru_common = (&ru_h * &precoders.relay_common).iter().map(|z| z.norm_sqr()).collect();

        let rbu_h = realization.h_relay_bus.adjoint();
        let bu_relay_common = (&rbu_h * &precoders.relay_common).iter().map(|z| z.norm_sqr()).collect();
        let relay_leak = &rbu_h * &precoders.relay_private;
        let bu_relay_private = (0..k)
            .map(|r| relay_leak.row(r).iter().map(|z| z.norm_sqr()).sum())
            .collect();
        let bu_products = realization.h_bs_users.adjoint() * precoders.bs_private.columns(0, k);
        let (bu_own, bu_cross) = own_and_cross(&bu_products);

        LinkGains {
            phase1: Phase1Gains {
                common: common1,
                own: own1,
                cross: cross1,
            },
            phase2: Phase2Gains {
                ru_common,
                ru_own,
                ru_cross,
                bu_relay_common,
                bu_relay_private,
                bu_own,
                bu_cross,
            },
        }
    }

    /// Draws realization `index`, designs its precoders and reduces it.
    pub fn draw(config: &SystemConfig, index: u64) -> Result<Self> {
        let realization = draw_realization(config, index);
        let precoders = build_precoders(&realization, config)?;
        Ok(Self::new(&realization, &precoders, config))
    }
}

/// Phase-1 SINRs of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Sinr {
    pub bu_common: Vec<f64>,
    pub bu_private: Vec<f64>,
    pub relay_common: Vec<f64>,
    pub relay_private: Vec<f64>,
}

impl Phase1Gains {
    pub fn sinr(&self, n_bs_users: usize, t1: f64, p1: f64) -> Phase1Sinr {
        let streams = self.own.len() as f64;
        let private_power = p1 * t1 / streams;
        let common_power = p1 * (1.0 - t1);
        let mut common = Vec::with_capacity(self.own.len());
        let mut private = Vec::with_capacity(self.own.len());
        for r in 0..self.own.len() {
            let all = self.own[r] + self.cross[r];
            common.push(common_power * self.common[r] / (1.0 + private_power * all));
            private.push(private_power * self.own[r] / (1.0 + private_power * self.cross[r]));
        }
        let relay_common = common.split_off(n_bs_users);
        let relay_private = private.split_off(n_bs_users);
        Phase1Sinr {
            bu_common: common,
            bu_private: private,
            relay_common,
            relay_private,
        }
    }
}

/// Phase-2 SINRs of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase2Sinr {
    pub ru_common: Vec<f64>,
    pub ru_private: Vec<f64>,
    /// Zero unless the BU mode is PCI.
    pub bu_common: Vec<f64>,
    pub bu_private: Vec<f64>,
}

/// Powers used in phase 2: (relay common, relay per-stream private, BS
/// per-stream private).
fn phase2_powers(config: &SystemConfig, t2: f64) -> (f64, f64, f64) {
    let l = config.n_relay_users;
    if l == 0 {
        // idle relay
        return (0.0, 0.0, config.p1 / config.n_bs_users as f64);
    }
    (
        config.p2 * (1.0 - t2),
        config.p2 * t2 / l as f64,
        config.p1 / config.n_bs_users as f64,
    )
}

impl Phase2Gains {
    /// SINRs of the relay-user streams.
    pub fn ru_sinr(&self, config: &SystemConfig, t2: f64) -> (Vec<f64>, Vec<f64>) {
        let (pc, pp, _) = phase2_powers(config, t2);
        let common = (0..self.ru_own.len())
            .map(|l| pc * self.ru_common[l] / (1.0 + pp * (self.ru_own[l] + self.ru_cross[l])))
            .collect();
        let private = (0..self.ru_own.len())
            .map(|l| pp * self.ru_own[l] / (1.0 + pp * self.ru_cross[l]))
            .collect();
        (common, private)
    }

    /// SINR of the relay common stream at each BU, decoded first while BS and
    /// relay private streams interfere.
    pub fn bu_common_sinr(&self, config: &SystemConfig, t2: f64) -> Vec<f64> {
        let (pc, pp, pb) = phase2_powers(config, t2);
        (0..self.bu_own.len())
            .map(|k| {
                let denom = 1.0 + pb * (self.bu_own[k] + self.bu_cross[k]) + pp * self.bu_relay_private[k];
                pc * self.bu_relay_common[k] / denom
            })
            .collect()
    }

    /// SINR of the phase-2 BS private streams. `i_res` is only read under PCI.
    pub fn bu_private_sinr(&self, config: &SystemConfig, t2: f64, mode: BuMode, i_res: &[f64]) -> Vec<f64> {
        let (pc, pp, pb) = phase2_powers(config, t2);
        (0..self.bu_own.len())
            .map(|k| {
                let residual = match mode {
                    BuMode::Pci => i_res[k],
                    BuMode::Fci => pc * self.bu_relay_common[k],
                    BuMode::None => return 0.0,
                };
                pb * self.bu_own[k] / (1.0 + pb * self.bu_cross[k] + pp * self.bu_relay_private[k] + residual)
            })
            .collect()
    }

    pub fn sinr(&self, config: &SystemConfig, t2: f64, mode: BuMode, i_res: &[f64]) -> Phase2Sinr {
        let (ru_common, ru_private) = self.ru_sinr(config, t2);
        let bu_common = match mode {
            BuMode::Pci => self.bu_common_sinr(config, t2),
            _ => vec![0.0; self.bu_own.len()],
        };
        Phase2Sinr {
            ru_common,
            ru_private,
            bu_common,
            bu_private: self.bu_private_sinr(config, t2, mode, i_res),
        }
    }
}

/// Per-BU common-stream SINRs in phase 1.
pub fn sinr_phase1_bu_common(
    realization: &ChannelRealization,
    precoders: &PrecoderSet,
    t1: f64,
    config: &SystemConfig,
) -> Vec<f64> {
    phase1_sinr(realization, precoders, t1, config).bu_common
}

pub fn sinr_phase1_bu_private(
    realization: &ChannelRealization,
    precoders: &PrecoderSet,
    t1: f64,
    config: &SystemConfig,
) -> Vec<f64> {
    phase1_sinr(realization, precoders, t1, config).bu_private
}

pub fn sinr_phase1_relay_common(
    realization: &ChannelRealization,
    precoders: &PrecoderSet,
    t1: f64,
    config: &SystemConfig,
) -> Vec<f64> {
    phase1_sinr(realization, precoders, t1, config).relay_common
}

pub fn sinr_phase1_relay_private(
    realization: &ChannelRealization,
    precoders: &PrecoderSet,
    t1: f64,
    config: &SystemConfig,
) -> Vec<f64> {
    phase1_sinr(realization, precoders, t1, config).relay_private
}

pub fn phase1_sinr(
    realization: &ChannelRealization,
    precoders: &PrecoderSet,
    t1: f64,
    config: &SystemConfig,
) -> Phase1Sinr {
    LinkGains::new(realization, precoders, config)
        .phase1
        .sinr(config.n_bs_users, t1, config.p1)
}

/// Phase-2 SINR bundle; `i_res` holds one residual-interference power per BU.
pub fn sinr_phase2(
    realization: &ChannelRealization,
    precoders: &PrecoderSet,
    t2: f64,
    config: &SystemConfig,
    i_res: &[f64],
) -> Phase2Sinr {
    LinkGains::new(realization, precoders, config)
        .phase2
        .sinr(config, t2, config.bu_phase2_mode, i_res)
}

/// Residual common-stream interference at each BU:
/// P₂(1−t₂)(2^{R_c − min(R_{c,k}, R_c)} − 1).
pub fn residual_interference(r_c2: f64, r_ck2: &[f64], t2: f64, p2: f64) -> Vec<f64> {
    r_ck2
        .iter()
        .map(|&rk| p2 * (1.0 - t2) * ((r_c2 - rk.min(r_c2)).exp2() - 1.0))
        .collect()
}

/// Ergodic rates of phase 1, bits/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase1Rates {
    /// R_{c,k}, per BU.
    pub bu_common: Vec<f64>,
    /// Common-stream rate at each relay antenna. Reported only; phase-1 common
    /// rate allocation considers the BUs.
    pub relay_common: Vec<f64>,
    /// R_k^{[1]}
    pub bu_private: Vec<f64>,
    /// R_l^{[1]}
    pub relay_private: Vec<f64>,
    /// R_c^{[1]} = min_k R_{c,k}
    pub common_rate: f64,
}

impl Phase1Rates {
    pub fn relay_common_min(&self) -> f64 {
        min_of(&self.relay_common)
    }

    /// ½(R_c + Σ R_k + Σ R_l).
    pub fn esr(&self) -> f64 {
        0.5 * (self.common_rate + self.bu_private.iter().sum::<f64>() + self.relay_private.iter().sum::<f64>())
    }
}

/// Ergodic rates of phase 2, bits/s/Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase2Rates {
    /// R_{c,l}^{[2]}
    pub ru_common: Vec<f64>,
    /// R_l^{[2]}
    pub ru_private: Vec<f64>,
    /// R_{c,k}^{[2]}; zero outside PCI.
    pub bu_common: Vec<f64>,
    /// R_k^{[2]}
    pub bu_private: Vec<f64>,
    /// I_{k,res}; zero outside PCI.
    pub residual_interference: Vec<f64>,
    /// R_c^{[2]} = min_l R_{c,l}; `None` when there are no relay users.
    pub common_rate: Option<f64>,
}

impl Phase2Rates {
    /// ½(R_c + Σ R_l).
    pub fn esr(&self) -> f64 {
        0.5 * (self.common_rate.unwrap_or(0.0) + self.ru_private.iter().sum::<f64>())
    }
}

/// One of the four total sum-rate definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// Relay limits both the common and the private relay-user rates.
    R1,
    /// Common rate taken from phase 1 only (reallocated at the relay);
    /// private relay-user rates still limited.
    R2,
    /// Only the common rate is limited by the relay.
    R3,
    /// No relay limitation.
    R4,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::R1, Variant::R2, Variant::R3, Variant::R4];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::R1 => "R1",
            Variant::R2 => "R2",
            Variant::R3 => "R3",
            Variant::R4 => "R4",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "R1" => Ok(Variant::R1),
            "R2" => Ok(Variant::R2),
            "R3" => Ok(Variant::R3),
            "R4" => Ok(Variant::R4),
            other => Err(format!("unknown sum-rate variant `{other}` (expected R1..R4)")),
        }
    }
}

/// (R1, R2, R3, R4).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumRates {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

impl SumRates {
    pub fn get(&self, variant: Variant) -> f64 {
        match variant {
            Variant::R1 => self.r1,
            Variant::R2 => self.r2,
            Variant::R3 => self.r3,
            Variant::R4 => self.r4,
        }
    }
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Combines the phase rates into the four total sum-rate variants.
///
/// BU totals add both phases. The relay-stream rates of phase 1 and the
/// relay-user private rates of phase 2 are each sorted in descending order
/// before the pairwise minimum is taken.
pub fn sum_rate_variants(phase1: &Phase1Rates, phase2: &Phase2Rates) -> SumRates {
    let bu_total: f64 = phase1.bu_private.iter().sum::<f64>() + phase2.bu_private.iter().sum::<f64>();
    let rc1 = phase1.common_rate;
    let rc = match phase2.common_rate {
        Some(rc2) => rc1.min(rc2),
        None => rc1,
    };
    let ru = sorted_desc(&phase2.ru_private);
    let limited: f64 = sorted_desc(&phase1.relay_private)
        .iter()
        .zip(&ru)
        .map(|(a, b)| a.min(*b))
        .sum();
    // same summation order as `limited`, so limited <= unlimited holds exactly
    let unlimited: f64 = ru.iter().sum();
    SumRates {
        r1: 0.5 * (rc + limited + bu_total),
        r2: 0.5 * (rc1 + limited + bu_total),
        r3: 0.5 * (rc + unlimited + bu_total),
        r4: 0.5 * (rc1 + unlimited + bu_total),
    }
}

/// Everything evaluated at one (t₁, t₂).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub phase1: Phase1Rates,
    pub phase2: Phase2Rates,
    pub variants: SumRates,
    pub mode: BuMode,
    pub t1: f64,
    pub t2: f64,
}

impl RateReport {
    pub fn residual_interference_per_bu(&self) -> &[f64] {
        &self.phase2.residual_interference
    }
}

/// A fixed set of reduced realizations, evaluated repeatedly at different
/// power splits (common random numbers).
#[derive(Debug, Clone)]
pub struct RealizationSet {
    config: SystemConfig,
    gains: Vec<LinkGains>,
}

impl RealizationSet {
    /// Draws realizations `0..count` under `config.seed`. Work is spread over
    /// the current rayon pool; results depend only on `(config, count)`.
    pub fn generate(config: &SystemConfig, count: usize) -> Result<Self> {
        config.validate()?;
        let gains = (0..count as u64)
            .into_par_iter()
            .map(|i| LinkGains::draw(config, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { config: *config, gains })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn gains(&self) -> &[LinkGains] {
        &self.gains
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    fn phase1_sinrs(&self, t1: f64) -> Vec<Phase1Sinr> {
        self.gains
            .iter()
            .map(|g| g.phase1.sinr(self.config.n_bs_users, t1, self.config.p1))
            .collect()
    }

    fn ergodic(&self, per_real: &[Vec<f64>], len: usize) -> Vec<f64> {
        (0..len).map(|i| mean_of(per_real.iter().map(|v| log2_1p(v[i])))).collect()
    }

    pub fn phase1_rates(&self, t1: f64) -> Phase1Rates {
        let sinrs = self.phase1_sinrs(t1);
        let (k, l) = (self.config.n_bs_users, self.config.n_relay_users);
        let pick = |f: fn(&Phase1Sinr) -> &Vec<f64>| sinrs.iter().map(|s| f(s).clone()).collect::<Vec<_>>();
        let bu_common = self.ergodic(&pick(|s| &s.bu_common), k);
        Phase1Rates {
            common_rate: min_of(&bu_common),
            bu_common,
            relay_common: self.ergodic(&pick(|s| &s.relay_common), l),
            bu_private: self.ergodic(&pick(|s| &s.bu_private), k),
            relay_private: self.ergodic(&pick(|s| &s.relay_private), l),
        }
    }

    /// Two passes over the same realizations: first every stream that does
    /// not depend on I_res, then the BU private streams with I_res in place.
    pub fn phase2_rates(&self, t2: f64, mode: BuMode) -> Phase2Rates {
        let cfg = &self.config;
        let (k, l) = (cfg.n_bs_users, cfg.n_relay_users);
        let ru: Vec<(Vec<f64>, Vec<f64>)> = self.gains.iter().map(|g| g.phase2.ru_sinr(cfg, t2)).collect();
        let ru_common = self.ergodic(&ru.iter().map(|r| r.0.clone()).collect::<Vec<_>>(), l);
        let ru_private = self.ergodic(&ru.iter().map(|r| r.1.clone()).collect::<Vec<_>>(), l);
        let common_rate = (l > 0).then(|| min_of(&ru_common));

        let (bu_common, residual) = match (mode, common_rate) {
            (BuMode::Pci, rc2) => {
                let per: Vec<Vec<f64>> = self.gains.iter().map(|g| g.phase2.bu_common_sinr(cfg, t2)).collect();
                let bu_common = self.ergodic(&per, k);
                let residual = match rc2 {
                    Some(rc2) => residual_interference(rc2, &bu_common, t2, cfg.p2),
                    None => vec![0.0; k],
                };
                (bu_common, residual)
            }
            _ => (vec![0.0; k], vec![0.0; k]),
        };
        let per: Vec<Vec<f64>> = self
            .gains
            .iter()
            .map(|g| g.phase2.bu_private_sinr(cfg, t2, mode, &residual))
            .collect();
        let bu_private = self.ergodic(&per, k);
        Phase2Rates {
            ru_common,
            ru_private,
            bu_common,
            bu_private,
            residual_interference: residual,
            common_rate,
        }
    }

    pub fn report(&self, t1: f64, t2: f64, mode: BuMode) -> RateReport {
        let phase1 = self.phase1_rates(t1);
        let phase2 = self.phase2_rates(t2, mode);
        RateReport {
            variants: sum_rate_variants(&phase1, &phase2),
            phase1,
            phase2,
            mode,
            t1,
            t2,
        }
    }

    /// Per-realization values of the phase-1 ESR, ½(log₂(1+γ_{c,k*}) + Σ
    /// log₂(1+γ_g)), with k* the BU holding the smallest ergodic common rate.
    /// Their mean equals `phase1_rates(t1).esr()`.
    pub fn phase1_esr_samples(&self, t1: f64) -> Vec<f64> {
        let rates = self.phase1_rates(t1);
        let worst = argmin(&rates.bu_common);
        self.phase1_sinrs(t1)
            .iter()
            .map(|s| {
                let common = worst.map_or(0.0, |k| log2_1p(s.bu_common[k]));
                let private: f64 = s.bu_private.iter().chain(&s.relay_private).map(|&g| log2_1p(g)).sum();
                0.5 * (common + private)
            })
            .collect()
    }

    /// Per-realization values of the phase-2 ESR, ½(log₂(1+γ_{c,l*}) + Σ
    /// log₂(1+γ_l)).
    pub fn phase2_esr_samples(&self, t2: f64) -> Vec<f64> {
        let cfg = &self.config;
        let ru: Vec<(Vec<f64>, Vec<f64>)> = self.gains.iter().map(|g| g.phase2.ru_sinr(cfg, t2)).collect();
        let ru_common = self.ergodic(&ru.iter().map(|r| r.0.clone()).collect::<Vec<_>>(), cfg.n_relay_users);
        let worst = argmin(&ru_common);
        ru.iter()
            .map(|(c, p)| {
                let common = worst.map_or(0.0, |l| log2_1p(c[l]));
                0.5 * (common + p.iter().map(|&g| log2_1p(g)).sum::<f64>())
            })
            .collect()
    }
}

fn argmin(v: &[f64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &x)| match best {
            Some((_, b)) if b <= x => best,
            _ => Some((i, x)),
        })
        .map(|(i, _)| i)
}

/// Monte Carlo ergodic rates at (t₁, t₂) over `n_realizations` draws.
pub fn ergodic_rates(config: &SystemConfig, t1: f64, t2: f64, n_realizations: usize) -> Result<RateReport> {
    let set = RealizationSet::generate(config, n_realizations)?;
    Ok(set.report(t1, t2, config.bu_phase2_mode))
}

/// SDMA with equal power: no common streams in either phase.
pub fn sdma_baseline(config: &SystemConfig, n_realizations: usize) -> Result<RateReport> {
    ergodic_rates(config, 1.0, 1.0, n_realizations)
}

//! System-level parameters shared by every stage of the simulator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How CSIT quality ε is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsitModel {
    /// ε fixed regardless of transmit power.
    Constant { epsilon: f64 },
    /// ε = √(1 − P^{−τ}); error variance P^{−τ} shrinks as power grows.
    Scaling { tau: f64 },
}

impl CsitModel {
    pub fn name(&self) -> &'static str {
        match self {
            CsitModel::Constant { .. } => "constant",
            CsitModel::Scaling { .. } => "scaling",
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            CsitModel::Constant { epsilon } => epsilon,
            CsitModel::Scaling { tau } => tau,
        }
    }
}

/// Treatment of the relay's common stream at BS users during phase 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BuMode {
    /// Partially decoded: only the residual (undecodable) part interferes.
    #[serde(rename = "PCI")]
    Pci,
    /// Fully treated as interference.
    #[serde(rename = "FCI")]
    Fci,
    /// BS users are not served in phase 2.
    #[serde(rename = "NONE")]
    None,
}

impl BuMode {
    pub const ALL: [BuMode; 3] = [BuMode::Pci, BuMode::Fci, BuMode::None];

    pub fn as_str(&self) -> &'static str {
        match self {
            BuMode::Pci => "PCI",
            BuMode::Fci => "FCI",
            BuMode::None => "NONE",
        }
    }
}

impl fmt::Display for BuMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BuMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PCI" => Ok(BuMode::Pci),
            "FCI" => Ok(BuMode::Fci),
            "NONE" => Ok(BuMode::None),
            other => Err(format!("unknown BU phase-2 mode `{other}` (expected PCI, FCI or NONE)")),
        }
    }
}

/// Antenna and user counts, powers (linear, noise-normalized), fading and
/// CSIT models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n_bs_antennas: usize,
    pub n_relay_antennas: usize,
    pub n_bs_users: usize,
    pub n_relay_users: usize,
    pub p1: f64,
    pub p2: f64,
    pub rician_factor: f64,
    pub csit_model: CsitModel,
    pub bu_phase2_mode: BuMode,
    pub seed: u64,
}

impl Default for SystemConfig {
    /// N=16, M=8, K=8, L=8, K_R=10 at 30 dB with constant ε = 0.3.
    fn default() -> Self {
        Self {
            n_bs_antennas: 16,
            n_relay_antennas: 8,
            n_bs_users: 8,
            n_relay_users: 8,
            p1: db_to_linear(30.0),
            p2: db_to_linear(30.0),
            rician_factor: 10.0,
            csit_model: CsitModel::Constant { epsilon: 0.3 },
            bu_phase2_mode: BuMode::Pci,
            seed: 0,
        }
    }
}

impl SystemConfig {
    /// Number of private streams the BS serves in phase 1 (BUs plus relay).
    pub fn phase1_streams(&self) -> usize {
        self.n_bs_users + self.n_relay_users
    }

    /// Sets both powers from a single SNR in dB.
    pub fn with_snr_db(mut self, snr_db: f64) -> Self {
        self.p1 = db_to_linear(snr_db);
        self.p2 = self.p1;
        self
    }

    pub fn with_csit(mut self, model: CsitModel) -> Self {
        self.csit_model = model;
        self
    }

    pub fn with_mode(mut self, mode: BuMode) -> Self {
        self.bu_phase2_mode = mode;
        self
    }

    /// Checks every constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let (n, m, k, l) = (
            self.n_bs_antennas,
            self.n_relay_antennas,
            self.n_bs_users,
            self.n_relay_users,
        );
        if n == 0 {
            errs.push("n_bs_antennas must be positive".to_string());
        }
        if m == 0 {
            errs.push("n_relay_antennas must be positive".to_string());
        }
        if k == 0 {
            errs.push("n_bs_users must be positive".to_string());
        }
        if l > m {
            errs.push(format!("n_relay_users ({l}) exceeds n_relay_antennas ({m})"));
        }
        if k + l > n {
            errs.push(format!("n_bs_users + n_relay_users ({}) exceeds n_bs_antennas ({n})", k + l));
        }
        if !(self.p1 > 0.0 && self.p1.is_finite()) {
            errs.push(format!("p1 ({}) must be positive", self.p1));
        }
        if !(self.p2 > 0.0 && self.p2.is_finite()) {
            errs.push(format!("p2 ({}) must be positive", self.p2));
        }
        if !(self.rician_factor >= 0.0 && self.rician_factor.is_finite()) {
            errs.push(format!("rician_factor ({}) must be non-negative", self.rician_factor));
        }
        match self.csit_model {
            CsitModel::Constant { epsilon } if !(0.0..=1.0).contains(&epsilon) => {
                errs.push(format!("epsilon ({epsilon}) must lie in [0, 1]"));
            }
            CsitModel::Scaling { tau } if !(tau > 0.0 && tau.is_finite()) => {
                errs.push(format!("tau ({tau}) must be positive"));
            }
            _ => {}
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errs))
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SystemConfig::default().validate().unwrap();
    }

    #[test]
    fn validation_lists_every_violation() {
        let cfg = SystemConfig {
            n_bs_antennas: 4,
            n_relay_antennas: 2,
            n_bs_users: 3,
            n_relay_users: 3,
            p1: -1.0,
            csit_model: CsitModel::Constant { epsilon: 1.5 },
            ..SystemConfig::default()
        };
        match cfg.validate() {
            Err(Error::InvalidConfig(v)) => assert_eq!(v.len(), 4, "{v:?}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("pci".parse::<BuMode>().unwrap(), BuMode::Pci);
        assert_eq!("NONE".parse::<BuMode>().unwrap(), BuMode::None);
        assert!("half".parse::<BuMode>().is_err());
    }

    #[test]
    fn db_conversion() {
        assert!((db_to_linear(30.0) - 1000.0).abs() < 1e-9);
        assert!((linear_to_db(1e4) - 40.0).abs() < 1e-12);
    }
}

//! Experiment harness: sweeps, figure presets, result rows and output files.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alloc::{closed_form_allocation, exhaustive_search_with, fixed_allocation, AllocationResult, GridSpec};
use crate::channel::effective_epsilon;
use crate::config::{db_to_linear, linear_to_db, BuMode, CsitModel, SystemConfig};
use crate::error::{Error, Result};
use crate::ratecalc::{RateReport, RealizationSet, Variant};

/// Power-allocation strategy of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RsmaClosed,
    RsmaExhaustive,
    Sdma,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::RsmaClosed, Method::RsmaExhaustive, Method::Sdma];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::RsmaClosed => "rsma_closed",
            Method::RsmaExhaustive => "rsma_exhaustive",
            Method::Sdma => "sdma",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method `{s}` (expected rsma_closed, rsma_exhaustive or sdma)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// (N, M, K, L).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntennaProfile {
    pub n_bs_antennas: usize,
    pub n_relay_antennas: usize,
    pub n_bs_users: usize,
    pub n_relay_users: usize,
}

impl AntennaProfile {
    pub fn new(n: usize, m: usize, k: usize, l: usize) -> Self {
        Self {
            n_bs_antennas: n,
            n_relay_antennas: m,
            n_bs_users: k,
            n_relay_users: l,
        }
    }

    fn apply(&self, config: &mut SystemConfig) {
        config.n_bs_antennas = self.n_bs_antennas;
        config.n_relay_antennas = self.n_relay_antennas;
        config.n_bs_users = self.n_bs_users;
        config.n_relay_users = self.n_relay_users;
    }
}

/// Swept parameters. The sweep is the cartesian product of the non-empty
/// axes; an empty axis keeps the base value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepAxes {
    #[serde(default)]
    pub snr_db: Vec<f64>,
    #[serde(default)]
    pub rician_factor: Vec<f64>,
    #[serde(default)]
    pub antenna_profile: Vec<AntennaProfile>,
}

impl SweepAxes {
    pub fn is_empty(&self) -> bool {
        self.snr_db.is_empty() && self.rician_factor.is_empty() && self.antenna_profile.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub base: SystemConfig,
    /// Fixed relay power in dB. `None` makes P₂ follow P₁.
    pub p2_db: Option<f64>,
    pub sweep: SweepAxes,
    pub methods: Vec<Method>,
    pub variants: Vec<Variant>,
    pub bu_modes: Vec<BuMode>,
    pub n_realizations: usize,
    pub grid: GridSpec,
    /// Fill `wall_time_ms`; off by default so output files stay reproducible.
    pub record_timing: bool,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            base: SystemConfig::default(),
            p2_db: None,
            sweep: SweepAxes::default(),
            methods: vec![Method::RsmaClosed],
            variants: vec![Variant::R1],
            bu_modes: vec![BuMode::Pci],
            n_realizations: 200,
            grid: GridSpec::default(),
            record_timing: false,
            output_path: None,
            format: OutputFormat::Csv,
        }
    }
}

/// One point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub snr_db: f64,
    pub config: SystemConfig,
}

impl ExperimentSpec {
    /// Sweep points in output order: antenna profile, then Rician factor,
    /// then SNR.
    pub fn points(&self) -> Vec<SweepPoint> {
        let profiles: Vec<Option<AntennaProfile>> = if self.sweep.antenna_profile.is_empty() {
            vec![None]
        } else {
            self.sweep.antenna_profile.iter().copied().map(Some).collect()
        };
        let factors: Vec<Option<f64>> = if self.sweep.rician_factor.is_empty() {
            vec![None]
        } else {
            self.sweep.rician_factor.iter().copied().map(Some).collect()
        };
        let snrs: Vec<Option<f64>> = if self.sweep.snr_db.is_empty() {
            vec![None]
        } else {
            self.sweep.snr_db.iter().copied().map(Some).collect()
        };
        let mut out = Vec::new();
        for profile in &profiles {
            for kr in &factors {
                for snr in &snrs {
                    let mut cfg = self.base;
                    if let Some(p) = profile {
                        p.apply(&mut cfg);
                    }
                    if let Some(kr) = kr {
                        cfg.rician_factor = *kr;
                    }
                    if let Some(snr) = snr {
                        cfg.p1 = db_to_linear(*snr);
                        cfg.p2 = cfg.p1;
                    }
                    if let Some(p2) = self.p2_db {
                        cfg.p2 = db_to_linear(p2);
                    }
                    out.push(SweepPoint {
                        index: out.len(),
                        snr_db: snr.unwrap_or_else(|| linear_to_db(cfg.p1)),
                        config: cfg,
                    });
                }
            }
        }
        out
    }

    /// Reports every violated constraint at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.methods.is_empty() {
            errs.push("methods must not be empty".to_string());
        }
        if self.variants.is_empty() {
            errs.push("variants must not be empty".to_string());
        }
        if self.bu_modes.is_empty() {
            errs.push("bu_modes must not be empty".to_string());
        }
        if self.sweep.is_empty() {
            errs.push("sweep must have at least one non-empty axis".to_string());
        }
        if self.n_realizations == 0 {
            errs.push("n_realizations must be at least 1".to_string());
        }
        for snr in &self.sweep.snr_db {
            if !snr.is_finite() {
                errs.push(format!("snr_db value {snr} is not finite"));
            }
        }
        if let Err(Error::InvalidConfig(v)) = self.grid.validate() {
            errs.extend(v);
        }
        for point in self.points() {
            if let Err(Error::InvalidConfig(v)) = point.config.validate() {
                for e in v {
                    let msg = format!("sweep point {}: {e}", point.index);
                    if !errs.contains(&msg) {
                        errs.push(msg);
                    }
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errs))
        }
    }
}

/// Figure presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig4a,
        Preset::Fig4b,
        Preset::Fig5,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig4a => "fig4a",
            Preset::Fig4b => "fig4b",
            Preset::Fig5 => "fig5",
        }
    }

    pub fn spec(&self) -> ExperimentSpec {
        let constant = CsitModel::Constant { epsilon: 0.3 };
        let scaling = CsitModel::Scaling { tau: 0.1 };
        let snr: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
        let spec = |csit: CsitModel, sweep: SweepAxes, methods: &[Method], modes: &[BuMode]| ExperimentSpec {
            base: SystemConfig::default().with_csit(csit),
            sweep,
            methods: methods.to_vec(),
            variants: Variant::ALL.to_vec(),
            bu_modes: modes.to_vec(),
            ..ExperimentSpec::default()
        };
        let snr_sweep = SweepAxes {
            snr_db: snr.clone(),
            ..SweepAxes::default()
        };
        let profiles = SweepAxes {
            snr_db: snr.clone(),
            antenna_profile: vec![
                AntennaProfile::new(8, 4, 4, 4),
                AntennaProfile::new(16, 8, 8, 8),
                AntennaProfile::new(32, 16, 16, 16),
            ],
            ..SweepAxes::default()
        };
        let rsma = [Method::RsmaClosed, Method::RsmaExhaustive];
        match self {
            Preset::Fig2a => spec(constant, snr_sweep, &rsma, &[BuMode::Pci]),
            Preset::Fig2b => spec(scaling, snr_sweep, &rsma, &[BuMode::Pci]),
            Preset::Fig3a => spec(constant, profiles, &Method::ALL, &[BuMode::Pci]),
            Preset::Fig3b => spec(scaling, profiles, &Method::ALL, &[BuMode::Pci]),
            Preset::Fig4a => spec(constant, snr_sweep, &[Method::RsmaClosed], &BuMode::ALL),
            Preset::Fig4b => spec(scaling, snr_sweep, &[Method::RsmaClosed], &BuMode::ALL),
            Preset::Fig5 => {
                let mut s = spec(
                    scaling,
                    SweepAxes {
                        rician_factor: vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0],
                        ..SweepAxes::default()
                    },
                    &rsma,
                    &[BuMode::Pci],
                );
                s.base = s.base.with_snr_db(30.0);
                s
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown preset `{s}` (expected fig2a, fig2b, fig3a, fig3b, fig4a, fig4b or fig5)"))
    }
}

/// One output record. Column order of the CSV follows field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub point_index: usize,
    pub snr_db: f64,
    pub p1_db: f64,
    pub p2_db: f64,
    pub n_bs_antennas: usize,
    pub n_relay_antennas: usize,
    pub n_bs_users: usize,
    pub n_relay_users: usize,
    pub rician_factor: f64,
    pub csit_model: String,
    pub csit_param: f64,
    pub epsilon_phase1: f64,
    pub epsilon_phase2: f64,
    pub method: Method,
    pub variant: Variant,
    pub bu_mode: BuMode,
    pub t1: f64,
    pub t2: f64,
    pub esr: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub esr_phase1: f64,
    pub esr_phase2: f64,
    pub common_rate_phase1: f64,
    pub common_rate_phase2: f64,
    /// Per-stream values below are `;`-separated lists.
    pub bu_common_phase1: String,
    pub bu_private_phase1: String,
    pub relay_private_phase1: String,
    pub ru_common_phase2: String,
    pub ru_private_phase2: String,
    pub bu_common_phase2: String,
    pub bu_private_phase2: String,
    pub residual_interference: String,
    pub n_realizations: usize,
    pub seed: u64,
    pub wall_time_ms: f64,
}

pub const COLUMNS: [&str; 38] = [
    "point_index",
    "snr_db",
    "p1_db",
    "p2_db",
    "n_bs_antennas",
    "n_relay_antennas",
    "n_bs_users",
    "n_relay_users",
    "rician_factor",
    "csit_model",
    "csit_param",
    "epsilon_phase1",
    "epsilon_phase2",
    "method",
    "variant",
    "bu_mode",
    "t1",
    "t2",
    "esr",
    "r1",
    "r2",
    "r3",
    "r4",
    "esr_phase1",
    "esr_phase2",
    "common_rate_phase1",
    "common_rate_phase2",
    "bu_common_phase1",
    "bu_private_phase1",
    "relay_private_phase1",
    "ru_common_phase2",
    "ru_private_phase2",
    "bu_common_phase2",
    "bu_private_phase2",
    "residual_interference",
    "n_realizations",
    "seed",
    "wall_time_ms",
];

/// Rounds to 9 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| round_sig(*v).to_string()).collect::<Vec<_>>().join(";")
}

fn make_row(
    spec: &ExperimentSpec,
    point: &SweepPoint,
    method: Method,
    variant: Variant,
    alloc: &AllocationResult,
    report: &RateReport,
    elapsed_ms: f64,
) -> ResultRow {
    let cfg = &point.config;
    let r = round_sig;
    ResultRow {
        point_index: point.index,
        snr_db: r(point.snr_db),
        p1_db: r(linear_to_db(cfg.p1)),
        p2_db: r(linear_to_db(cfg.p2)),
        n_bs_antennas: cfg.n_bs_antennas,
        n_relay_antennas: cfg.n_relay_antennas,
        n_bs_users: cfg.n_bs_users,
        n_relay_users: cfg.n_relay_users,
        rician_factor: r(cfg.rician_factor),
        csit_model: cfg.csit_model.name().to_string(),
        csit_param: r(cfg.csit_model.parameter()),
        epsilon_phase1: r(effective_epsilon(cfg, cfg.p1)),
        epsilon_phase2: r(effective_epsilon(cfg, cfg.p2)),
        method,
        variant,
        bu_mode: report.mode,
        t1: r(alloc.t1),
        t2: r(alloc.t2),
        esr: r(report.variants.get(variant)),
        r1: r(report.variants.r1),
        r2: r(report.variants.r2),
        r3: r(report.variants.r3),
        r4: r(report.variants.r4),
        esr_phase1: r(report.phase1.esr()),
        esr_phase2: r(report.phase2.esr()),
        common_rate_phase1: r(report.phase1.common_rate),
        common_rate_phase2: r(report.phase2.common_rate.unwrap_or(0.0)),
        bu_common_phase1: join(&report.phase1.bu_common),
        bu_private_phase1: join(&report.phase1.bu_private),
        relay_private_phase1: join(&report.phase1.relay_private),
        ru_common_phase2: join(&report.phase2.ru_common),
        ru_private_phase2: join(&report.phase2.ru_private),
        bu_common_phase2: join(&report.phase2.bu_common),
        bu_private_phase2: join(&report.phase2.bu_private),
        residual_interference: join(&report.phase2.residual_interference),
        n_realizations: spec.n_realizations,
        seed: cfg.seed,
        wall_time_ms: if spec.record_timing { r(elapsed_ms) } else { 0.0 },
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Rows of one sweep point: methods, then BU modes, then variants. All
/// methods share one realization set.
pub fn point_rows(spec: &ExperimentSpec, point: &SweepPoint) -> Result<Vec<ResultRow>> {
    let start = Instant::now();
    let set = RealizationSet::generate(&point.config, spec.n_realizations)?;
    let setup_ms = elapsed_ms(start);
    let mut rows = Vec::new();
    for &method in &spec.methods {
        for &mode in &spec.bu_modes {
            match method {
                Method::RsmaExhaustive => {
                    for &variant in &spec.variants {
                        let start = Instant::now();
                        let alloc = exhaustive_search_with(&set, variant, mode, &spec.grid)?;
                        let report = set.report(alloc.t1, alloc.t2, mode);
                        let ms = setup_ms + elapsed_ms(start);
                        rows.push(make_row(spec, point, method, variant, &alloc, &report, ms));
                    }
                }
                Method::RsmaClosed | Method::Sdma => {
                    let start = Instant::now();
                    let alloc = if method == Method::Sdma {
                        fixed_allocation(1.0, 1.0)?
                    } else {
                        closed_form_allocation(&point.config)?
                    };
                    let report = set.report(alloc.t1, alloc.t2, mode);
                    let ms = setup_ms + elapsed_ms(start);
                    for &variant in &spec.variants {
                        rows.push(make_row(spec, point, method, variant, &alloc, &report, ms));
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Runs every sweep point on the current rayon pool. Row order depends only
/// on the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let points = spec.points();
    let per_point = points
        .par_iter()
        .map(|p| point_rows(spec, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// [`run_experiment`] on a dedicated pool of `threads` workers (0 = rayon
/// default).
pub fn run_experiment_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<Vec<ResultRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(vec![format!("thread pool: {e}")]))?;
    pool.install(|| run_experiment(spec))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes rows as CSV (header always present) or as a JSON array.
pub fn emit(rows: &[ResultRow], format: OutputFormat, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    write_rows(rows, format, &mut out, path)?;
    out.flush().map_err(io_err(path))
}

/// Same as [`emit`] for any writer; `label` names it in error messages.
pub fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, out: &mut W, label: &Path) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let csv_err = |source| Error::Csv {
                path: label.to_path_buf(),
                source,
            };
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut *out);
            w.write_record(COLUMNS).map_err(csv_err)?;
            for row in rows {
                w.serialize(row).map_err(csv_err)?;
            }
            w.flush().map_err(io_err(label))?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows).map_err(|source| Error::Json {
                path: label.to_path_buf(),
                source,
            })?;
            out.write_all(b"\n").map_err(io_err(label))?;
        }
    }
    Ok(())
}

/// Reads rows written by [`emit`].
pub fn read_rows(format: OutputFormat, path: &Path) -> Result<Vec<ResultRow>> {
    match format {
        OutputFormat::Csv => {
            let csv_err = |source| Error::Csv {
                path: path.to_path_buf(),
                source,
            };
            let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
            r.deserialize().collect::<std::result::Result<Vec<_>, _>>().map_err(csv_err)
        }
        OutputFormat::Json => {
            let file = File::open(path).map_err(io_err(path))?;
            serde_json::from_reader(std::io::BufReader::new(file)).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })
        }
    }
}

/// Sidecar written next to an output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub version: String,
    pub spec: ExperimentSpec,
    pub n_points: usize,
    pub n_rows: usize,
}

pub fn metadata_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    output.with_file_name(name)
}

pub fn write_metadata(spec: &ExperimentSpec, n_rows: usize, output: &Path) -> Result<PathBuf> {
    let path = metadata_path(output);
    let meta = RunMetadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        spec: spec.clone(),
        n_points: spec.points().len(),
        n_rows,
    };
    let file = File::create(&path).map_err(io_err(&path))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, &meta).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    out.write_all(b"\n").map_err(io_err(&path))?;
    out.flush().map_err(io_err(&path))?;
    Ok(path)
}

/// Flat JSON configuration file. Every key is optional; present keys
/// override the preset (or the defaults).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub n_bs_antennas: Option<usize>,
    pub n_relay_antennas: Option<usize>,
    pub n_bs_users: Option<usize>,
    pub n_relay_users: Option<usize>,
    pub p1_db: Option<f64>,
    pub p2_db: Option<f64>,
    pub rician_factor: Option<f64>,
    /// "constant" or "scaling".
    pub csit_model: Option<String>,
    pub epsilon: Option<f64>,
    pub tau: Option<f64>,
    pub bu_phase2_mode: Option<BuMode>,
    pub seed: Option<u64>,
    pub snr_db: Option<Vec<f64>>,
    pub rician_factors: Option<Vec<f64>>,
    /// Each entry is [N, M, K, L].
    pub antenna_profiles: Option<Vec<[usize; 4]>>,
    pub methods: Option<Vec<Method>>,
    pub variants: Option<Vec<Variant>>,
    pub bu_modes: Option<Vec<BuMode>>,
    pub n_realizations: Option<usize>,
    pub grid_coarse: Option<usize>,
    pub grid_refine: Option<usize>,
    pub grid_t_min: Option<f64>,
    pub record_timing: Option<bool>,
    pub output_path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(io_err(path))?;
        serde_json::from_reader(std::io::BufReader::new(file)).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Applies every present key to `spec`.
    pub fn apply(&self, spec: &mut ExperimentSpec) -> Result<()> {
        let mut errs = Vec::new();
        let b = &mut spec.base;
        if let Some(v) = self.n_bs_antennas {
            b.n_bs_antennas = v;
        }
        if let Some(v) = self.n_relay_antennas {
            b.n_relay_antennas = v;
        }
        if let Some(v) = self.n_bs_users {
            b.n_bs_users = v;
        }
        if let Some(v) = self.n_relay_users {
            b.n_relay_users = v;
        }
        if let Some(v) = self.p1_db {
            b.p1 = db_to_linear(v);
            b.p2 = b.p1;
        }
        if let Some(v) = self.p2_db {
            b.p2 = db_to_linear(v);
            spec.p2_db = Some(v);
        }
        if let Some(v) = self.rician_factor {
            b.rician_factor = v;
        }
        let model = self.csit_model.as_deref().map(str::to_ascii_lowercase);
        match model.as_deref() {
            None => match (self.epsilon, self.tau) {
                (Some(_), Some(_)) => errs.push("give only one of epsilon and tau".to_string()),
                (Some(e), None) => b.csit_model = CsitModel::Constant { epsilon: e },
                (None, Some(t)) => b.csit_model = CsitModel::Scaling { tau: t },
                _ => {}
            },
            Some("constant") => match self.epsilon {
                Some(e) => b.csit_model = CsitModel::Constant { epsilon: e },
                None => errs.push("csit_model \"constant\" needs epsilon".to_string()),
            },
            Some("scaling") => match self.tau {
                Some(t) => b.csit_model = CsitModel::Scaling { tau: t },
                None => errs.push("csit_model \"scaling\" needs tau".to_string()),
            },
            Some(other) => errs.push(format!("unknown csit_model `{other}` (expected constant or scaling)")),
        }
        if let Some(v) = self.bu_phase2_mode {
            b.bu_phase2_mode = v;
            spec.bu_modes = vec![v];
        }
        if let Some(v) = self.seed {
            b.seed = v;
        }
        if let Some(v) = &self.snr_db {
            spec.sweep.snr_db = v.clone();
        }
        if let Some(v) = &self.rician_factors {
            spec.sweep.rician_factor = v.clone();
        }
        if let Some(v) = &self.antenna_profiles {
            spec.sweep.antenna_profile = v.iter().map(|p| AntennaProfile::new(p[0], p[1], p[2], p[3])).collect();
        }
        if let Some(v) = &self.methods {
            spec.methods = v.clone();
        }
        if let Some(v) = &self.variants {
            spec.variants = v.clone();
        }
        if let Some(v) = &self.bu_modes {
            spec.bu_modes = v.clone();
        }
        if let Some(v) = self.n_realizations {
            spec.n_realizations = v;
        }
        if let Some(v) = self.grid_coarse {
            spec.grid.coarse = v;
        }
        if let Some(v) = self.grid_refine {
            spec.grid.refine = v;
        }
        if let Some(v) = self.grid_t_min {
            spec.grid.t_min = v;
        }
        if let Some(v) = self.record_timing {
            spec.record_timing = v;
        }
        if let Some(v) = &self.output_path {
            spec.output_path = Some(v.clone());
        }
        if let Some(v) = self.format {
            spec.format = v;
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(errs))
        }
    }
}

/// Parses `start:step:stop` (inclusive) or a single value.
pub fn parse_snr_range(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad number `{p}` in `{s}`: {e}"));
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if !(step > 0.0) {
                return Err(format!("step in `{s}` must be positive"));
            }
            if b < a {
                return Err(format!("stop below start in `{s}`"));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + step * i as f64).collect())
        }
        _ => Err(format!("expected start:step:stop, got `{s}`")),
    }
}

//! Random-ensemble verification of the identities, state sampling, and
//! report emission.

mod compute;

pub use compute::{compute, ComputeRecord, Quantity};

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::rng::{derive_seed, RandomSource};
use crate::state::{haar_random_pure, PureState, StateInput, SystemLayout};
use crate::tasks::{self, DiscordRoute, Role, TripartiteRoles, Variational};

/// Identity families selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Eq4,
    Eq5,
    Eq7,
    Kw,
    Hp,
    GammaPositivity,
    All,
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eq4" => Identity::Eq4,
            "eq5" => Identity::Eq5,
            "eq7" => Identity::Eq7,
            "kw" => Identity::Kw,
            "hp" => Identity::Hp,
            "gamma-positivity" => Identity::GammaPositivity,
            "all" => Identity::All,
            other => return Err(Error::Config(format!("unknown identity `{other}`"))),
        })
    }
}

impl Identity {
    pub fn checks(self) -> Vec<Check> {
        use Check::*;
        match self {
            Identity::Eq4 => vec![Eq4],
            Identity::Eq5 => vec![Eq5ClosedForm, Eq5Variational],
            Identity::Eq7 => vec![Eq7Shortcut, Eq7DenseCoding],
            Identity::Kw => vec![Kw],
            Identity::Hp => vec![Hp],
            Identity::GammaPositivity => vec![GammaPositivity],
            Identity::All => vec![Eq4, Eq5ClosedForm, Eq5Variational, Eq7Shortcut, Eq7DenseCoding, Kw, Hp, GammaPositivity],
        }
    }
}

/// One residual evaluated per sample, with its own route and tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// Variational `D(A|C)` against the closed-form `Gamma(A > B)`.
    Eq4,
    Eq5ClosedForm,
    Eq5Variational,
    /// Closed-form `D(A|C) - D(B|C)` against `S(A) - S(B)`.
    Eq7Shortcut,
    /// Closed-form `D(A|C) - D(B|C)` against `Delta(C > A) - Delta(C > B)`.
    Eq7DenseCoding,
    /// `S(B)` against `E_F(A:B) + I(B : C_c)`.
    Kw,
    /// `S(A)` against `E_P(A:C) + Delta(B > A)`.
    Hp,
    /// Smallest `Gamma(x > y)` over ordered role pairs against the floor 0.
    GammaPositivity,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Eq4 => "eq4",
            Check::Eq5ClosedForm => "eq5-closed-form",
            Check::Eq5Variational => "eq5-variational",
            Check::Eq7Shortcut => "eq7-shortcut",
            Check::Eq7DenseCoding => "eq7-dense-coding",
            Check::Kw => "kw",
            Check::Hp => "hp",
            Check::GammaPositivity => "gamma-positivity",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Check::Eq4 => 5e-3,
            Check::Eq5ClosedForm => 1e-9,
            Check::Eq5Variational => 1e-2,
            Check::Eq7Shortcut => 5e-3,
            Check::Eq7DenseCoding => 2e-2,
            Check::Kw => 5e-3,
            Check::Hp => 2e-2,
            Check::GammaPositivity => 5e-3,
        }
    }

    /// Pass rule for one record. Variational discord may only sit above the
    /// closed form (up to 1e-6), and positivity is one-sided.
    pub fn passes(self, lhs: f64, residual: f64, tolerance: f64) -> bool {
        match self {
            Check::Eq4 => residual >= -1e-6 && residual.abs() <= tolerance,
            Check::GammaPositivity => lhs >= -tolerance,
            _ => residual.abs() <= tolerance,
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eq4" => Check::Eq4,
            "eq5" | "eq5-closed-form" => Check::Eq5ClosedForm,
            "eq5-variational" => Check::Eq5Variational,
            "eq7" | "eq7-shortcut" => Check::Eq7Shortcut,
            "eq7-dense-coding" => Check::Eq7DenseCoding,
            "kw" => Check::Kw,
            "hp" => Check::Hp,
            "gamma-positivity" => Check::GammaPositivity,
            other => return Err(Error::Config(format!("unknown check `{other}`"))),
        })
    }
}

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Config(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub identity: Identity,
    pub dims: [usize; 3],
    pub samples: usize,
    pub seed: u64,
    pub settings: Variational,
    /// Dense coding output dimensions; empty means `{d, d^2}` of the sender.
    pub d_outs: Vec<usize>,
    /// Ancilla splits for `E_P`; empty means [`tasks::default_hp_splits`].
    pub splits: Vec<(usize, usize)>,
    pub out_path: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            identity: Identity::All,
            dims: [2, 2, 2],
            samples: 100,
            seed: 0,
            settings: Variational::default(),
            d_outs: Vec::new(),
            splits: Vec::new(),
            out_path: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("at least one sample is required".into()));
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(Error::Dimension(format!("tripartite dims must each be at least 2, got {:?}", self.dims)));
        }
        self.settings.optimizer.validate()
    }

    pub fn layout(&self) -> SystemLayout {
        SystemLayout::lettered(&self.dims).expect("validated dims")
    }

    fn d_outs_for(&self, d_sender: usize) -> Vec<usize> {
        if self.d_outs.is_empty() {
            vec![d_sender, d_sender * d_sender]
        } else {
            self.d_outs.clone()
        }
    }
}

/// Seed of the `index`-th sampled state.
pub fn state_seed(seed: u64, index: usize) -> u64 {
    derive_seed(seed, "sample", index as u64)
}

pub fn sample_state(layout: &SystemLayout, seed: u64) -> PureState {
    haar_random_pure(layout.clone(), &mut RandomSource::new(seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub identity: String,
    pub sample_index: usize,
    pub state_seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub route_lhs: String,
    pub route_rhs: String,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub samples: usize,
    pub max_abs_residual: f64,
    pub mean_abs_residual: f64,
    pub pass_count: usize,
    pub tolerance: f64,
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub check: Check,
    pub dims: [usize; 3],
    pub seed: u64,
    pub records: Vec<SampleRecord>,
    pub aggregate: Aggregate,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.aggregate.pass_count == self.aggregate.samples
    }

    /// Aggregate statistics rebuilt from the records, wall time aside.
    pub fn recompute(&self) -> Aggregate {
        aggregate(self.check, &self.records, self.aggregate.tolerance, self.aggregate.wall_time_secs)
    }

    /// The report without timing, for comparing runs.
    pub fn without_timing(&self) -> IdentityReport {
        let mut r = self.clone();
        r.aggregate.wall_time_secs = 0.0;
        r
    }
}

fn aggregate(check: Check, records: &[SampleRecord], tolerance: f64, wall_time_secs: f64) -> Aggregate {
    let abs: Vec<f64> = records.iter().map(|r| r.residual.abs()).collect();
    Aggregate {
        samples: records.len(),
        max_abs_residual: abs.iter().copied().fold(0.0, f64::max),
        mean_abs_residual: abs.iter().sum::<f64>() / records.len().max(1) as f64,
        pass_count: records.iter().filter(|r| check.passes(r.lhs, r.residual, tolerance)).count(),
        tolerance,
        wall_time_secs,
    }
}

struct Sides {
    lhs: f64,
    rhs: f64,
    route_lhs: String,
    route_rhs: String,
    converged: bool,
}

impl Sides {
    fn closed(lhs: f64, rhs: f64, route_lhs: &str, route_rhs: &str) -> Self {
        Self { lhs, rhs, route_lhs: route_lhs.into(), route_rhs: route_rhs.into(), converged: true }
    }
}

fn outcome_route(prefix: &str, by_outcomes: &[(usize, f64)]) -> String {
    let ks: Vec<String> = by_outcomes.iter().map(|(k, _)| k.to_string()).collect();
    format!("{prefix}-k{}", ks.join(","))
}

fn evaluate(check: Check, t: &TripartiteRoles, cfg: &RunConfig, settings: &Variational) -> Result<Sides> {
    Ok(match check {
        Check::Eq4 => {
            let d = tasks::discord_variational(t, Role::C, Role::A, settings)?;
            let g = tasks::esm_total_cost(t, Role::A, Role::B, settings)?;
            Sides {
                lhs: d.value,
                rhs: g.value,
                route_lhs: outcome_route("variational", &d.by_outcomes),
                route_rhs: format!("gamma-{}", g.route.name()),
                converged: d.converged && g.converged,
            }
        }
        Check::Eq5ClosedForm | Check::Eq5Variational => {
            let route = if check == Check::Eq5ClosedForm { DiscordRoute::ClosedForm } else { DiscordRoute::Variational };
            let s = tasks::discord_asymmetry(t, route, settings)?;
            Sides { lhs: s.lhs, rhs: s.rhs, route_lhs: s.route_lhs, route_rhs: s.route_rhs, converged: s.converged }
        }
        Check::Eq7Shortcut => {
            let a = tasks::discord_closed_form_2qubit_env(t, Role::C, Role::A)?;
            let b = tasks::discord_closed_form_2qubit_env(t, Role::C, Role::B)?;
            Sides::closed(a - b, t.entropy(Role::A) - t.entropy(Role::B), "closed-form", "coherent-shortcut")
        }
        Check::Eq7DenseCoding => {
            let d_outs = cfg.d_outs_for(t.dim(Role::C));
            let d = tasks::dc_discord_difference(t, DiscordRoute::ClosedForm, &d_outs, settings)?;
            let top = d_outs.iter().max().copied().unwrap_or(0);
            Sides {
                lhs: d.discord_difference,
                rhs: d.dc_difference,
                route_lhs: "closed-form".into(),
                route_rhs: format!("dense-coding-dout{top}"),
                converged: d.converged,
            }
        }
        Check::Kw => {
            let k = tasks::koashi_winter_residual(t, settings)?;
            Sides {
                lhs: k.s_b,
                rhs: k.eof_ab + k.classical_bc,
                route_lhs: "spectrum".into(),
                route_rhs: format!("{}+classical-correlation", k.route.name()),
                converged: k.converged,
            }
        }
        Check::Hp => {
            let d_outs = cfg.d_outs_for(t.dim(Role::B));
            let splits = if cfg.splits.is_empty() { tasks::default_hp_splits(t, &d_outs)? } else { cfg.splits.clone() };
            let h = tasks::horodecki_piani_residual(t, &d_outs, &splits, settings)?;
            Sides {
                lhs: h.s_a,
                rhs: h.eop_ac + h.dc_ba,
                route_lhs: "spectrum".into(),
                route_rhs: format!(
                    "eop-split{}x{}+dense-coding-dout{}",
                    h.best_split.0, h.best_split.1, h.best_d_out
                ),
                converged: h.converged,
            }
        }
        Check::GammaPositivity => {
            let mut min = f64::INFINITY;
            let mut route = String::new();
            let mut converged = true;
            for x in Role::ALL {
                for y in Role::ALL {
                    if x == y {
                        continue;
                    }
                    let g = tasks::esm_total_cost(t, x, y, settings)?;
                    converged &= g.converged;
                    if g.value < min {
                        min = g.value;
                        route = format!("gamma-{:?}>{:?}-{}", x, y, g.route.name());
                    }
                }
            }
            Sides { lhs: min, rhs: 0.0, route_lhs: route, route_rhs: "floor".into(), converged }
        }
    })
}

/// Evaluates one check on one sampled state. The optimizer seed is the
/// state seed, so a sample reproduces from its state file alone.
pub fn evaluate_sample(check: Check, cfg: &RunConfig, index: usize, inner: Execution) -> Result<SampleRecord> {
    let seed = state_seed(cfg.seed, index);
    let t = TripartiteRoles::in_order(sample_state(&cfg.layout(), seed))?;
    let mut settings = cfg.settings.clone();
    settings.optimizer = settings.optimizer.with_seed(seed).with_execution(inner);
    let s = evaluate(check, &t, cfg, &settings)?;
    Ok(SampleRecord {
        identity: check.name().into(),
        sample_index: index,
        state_seed: seed,
        lhs: s.lhs,
        rhs: s.rhs,
        residual: s.lhs - s.rhs,
        route_lhs: s.route_lhs,
        route_rhs: s.route_rhs,
        converged: s.converged,
    })
}

/// Runs every check of `cfg.identity` over `cfg.samples` Haar-random states.
/// Samples run concurrently under the parallel execution mode; records are
/// always in sample order.
pub fn verify(cfg: &RunConfig) -> Result<Vec<IdentityReport>> {
    cfg.validate()?;
    let outer = cfg.settings.optimizer.execution;
    cfg.identity
        .checks()
        .into_iter()
        .map(|check| {
            let start = Instant::now();
            let records = map_indexed(outer, cfg.samples, |i| evaluate_sample(check, cfg, i, Execution::Sequential))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let tolerance = check.default_tolerance();
            let aggregate = aggregate(check, &records, tolerance, start.elapsed().as_secs_f64());
            Ok(IdentityReport {
                identity: check.name().into(),
                check,
                dims: cfg.dims,
                seed: cfg.seed,
                records,
                aggregate,
            })
        })
        .collect()
}

pub const CSV_COLUMNS: [&str; 9] =
    ["identity", "sample_index", "state_seed", "lhs", "rhs", "residual", "route_lhs", "route_rhs", "converged"];

/// Serializes reports: a JSON array, or one CSV table with [`CSV_COLUMNS`].
pub fn render_reports(reports: &[IdentityReport], format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(reports)?),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_COLUMNS)?;
            for r in reports.iter().flat_map(|r| &r.records) {
                w.serialize(r)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv is utf-8"))
        }
    }
}

pub fn write_reports(reports: &[IdentityReport], path: &Path, format: Format) -> Result<()> {
    std::fs::write(path, render_reports(reports, format)?)?;
    Ok(())
}

pub fn read_csv_records(text: &str) -> Result<Vec<SampleRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Entry of the manifest written next to sampled states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub seed: u64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dims: Vec<usize>,
    pub seed: u64,
    pub states: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sample_file_name(index: usize) -> String {
    format!("state_{index:04}.json")
}

/// Writes `count` Haar-random pure states into `dir` plus a manifest of
/// their seeds. State `i` uses [`state_seed`]`(seed, i)`, the same state the
/// verifier draws as sample `i`.
pub fn sample(dims: &[usize], count: usize, seed: u64, dir: &Path) -> Result<Manifest> {
    if count == 0 {
        return Err(Error::Config("count must be at least 1".into()));
    }
    let layout = SystemLayout::lettered(dims)?;
    std::fs::create_dir_all(dir)?;
    let mut states = Vec::with_capacity(count);
    for index in 0..count {
        let s = state_seed(seed, index);
        let file = sample_file_name(index);
        let state = StateInput::Pure(sample_state(&layout, s));
        std::fs::write(dir.join(&file), state.to_json())?;
        states.push(ManifestEntry { index, seed: s, file });
    }
    let manifest = Manifest { dims: dims.to_vec(), seed, states };
    std::fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = &self.aggregate;
        write!(
            f,
            "{}: {}/{} within {:e}, max |r| {:.3e}, mean |r| {:.3e}, {:.1}s",
            self.identity, a.pass_count, a.samples, a.tolerance, a.max_abs_residual, a.mean_abs_residual, a.wall_time_secs
        )
    }
}

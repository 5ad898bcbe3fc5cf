//! Donor-to-recipient transfer of FALQON gain schedules.
//!
//! A donor graph is solved in closed loop; its gain sequence is then replayed
//! layer-for-layer on independently sampled recipient graphs. Each trace's
//! approximation ratio is taken against its own graph's exact optimum.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::falqon::{replay_schedule, run_falqon, FalqonConfig, FalqonTrace};
use crate::graph::{gen_erdos_renyi, gen_three_regular, FamilyKind, Graph};
use crate::rng::GENERATOR_NAME;

pub const DEFAULT_RECIPIENTS: usize = 10;
pub const RECIPIENT_SIZE: usize = 14;

/// File names inside a transfer output directory.
pub const RESULT_FILE: &str = "result.json";
pub const DONOR_TRACE_FILE: &str = "donor_trace.csv";

pub fn recipient_trace_file(index: usize) -> String {
    format!("recipient_{index}.csv")
}

/// A graph ensemble: family, size, and edge probability for Erdős–Rényi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub family: FamilyKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl EnsembleSpec {
    pub fn three_regular(n: usize) -> Self {
        EnsembleSpec {
            family: FamilyKind::ThreeRegular,
            n,
            p: None,
        }
    }

    pub fn erdos_renyi(n: usize, p: f64) -> Self {
        EnsembleSpec {
            family: FamilyKind::ErdosRenyi,
            n,
            p: Some(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.family, self.p) {
            (FamilyKind::ErdosRenyi, None) => {
                Err(Error::InvalidConfig("Erdős–Rényi ensembles need p".into()))
            }
            (FamilyKind::ErdosRenyi, Some(p)) if !(p > 0.0 && p <= 1.0) => {
                Err(Error::InvalidProbability(p))
            }
            (FamilyKind::ThreeRegular, Some(_)) => Err(Error::InvalidConfig(
                "3-regular ensembles take no edge probability".into(),
            )),
            (FamilyKind::ThreeRegular, None) if self.n < 4 || !self.n.is_multiple_of(2) => {
                Err(Error::InvalidVertexCount {
                    n: self.n,
                    reason: "3-regular graphs need even n >= 4",
                })
            }
            _ => Ok(()),
        }
    }

    pub fn sample(&self, seed: u64) -> Result<Graph> {
        self.validate()?;
        match self.p {
            Some(p) => gen_erdos_renyi(self.n, p, seed),
            None => gen_three_regular(self.n, seed),
        }
    }

    /// Compact label such as `er14-p0.5` or `3reg8`.
    pub fn label(&self) -> String {
        match self.p {
            Some(p) => format!("{}{}-p{}", self.family, self.n, p),
            None => format!("{}{}", self.family, self.n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferSpec {
    pub donor: EnsembleSpec,
    pub donor_seed: u64,
    pub recipient: EnsembleSpec,
    #[serde(default = "default_recipients")]
    pub recipients_count: usize,
    pub recipient_seed_base: u64,
    #[serde(default)]
    pub cfg: FalqonConfig<f64>,
}

fn default_recipients() -> usize {
    DEFAULT_RECIPIENTS
}

impl TransferSpec {
    pub fn new(
        donor: EnsembleSpec,
        donor_seed: u64,
        recipient: EnsembleSpec,
        recipient_seed_base: u64,
    ) -> Self {
        TransferSpec {
            donor,
            donor_seed,
            recipient,
            recipients_count: DEFAULT_RECIPIENTS,
            recipient_seed_base,
            cfg: FalqonConfig::default(),
        }
    }

    pub fn with_recipients(mut self, count: usize) -> Self {
        self.recipients_count = count;
        self
    }

    pub fn with_config(mut self, cfg: FalqonConfig<f64>) -> Self {
        self.cfg = cfg;
        self
    }

    /// Parses a TOML spec with the same field names as this struct; unknown keys are rejected.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: TransferSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn recipient_seed(&self, index: usize) -> u64 {
        self.recipient_seed_base.wrapping_add(index as u64)
    }

    pub fn validate(&self) -> Result<()> {
        self.donor.validate()?;
        self.recipient.validate()?;
        self.cfg.validate()?;
        if self.recipients_count == 0 {
            return Err(Error::InvalidConfig(
                "recipients_count must be at least 1".into(),
            ));
        }
        if self.recipient.n < self.donor.n {
            return Err(Error::InvalidConfig(format!(
                "recipient size {} is smaller than donor size {}",
                self.recipient.n, self.donor.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TransferResult {
    pub spec: TransferSpec,
    pub donor_trace: FalqonTrace<f64>,
    pub recipient_traces: Vec<FalqonTrace<f64>>,
    pub mean_ratio: Vec<f64>,
    pub std_ratio: Vec<f64>,
    pub final_mean: f64,
    pub final_std: f64,
}

/// Mean and sample standard deviation (divisor `N - 1`, zero for `N = 1`).
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, var.sqrt())
}

/// Trains on the donor, then replays its gains on every recipient.
///
/// Recipients are replayed in parallel; results are collected in index order
/// so the output does not depend on scheduling.
pub fn run_transfer(spec: &TransferSpec) -> Result<TransferResult> {
    spec.validate()?;
    let donor = spec.donor.sample(spec.donor_seed)?;
    let donor_trace = run_falqon(&donor, &spec.cfg)?;
    let recipient_traces = (0..spec.recipients_count)
        .into_par_iter()
        .map(|k| {
            let g = spec.recipient.sample(spec.recipient_seed(k))?;
            replay_schedule(&g, &donor_trace.betas, &spec.cfg)
        })
        .collect::<Result<Vec<_>>>()?;

    let layers = spec.cfg.layers;
    let mut column = vec![0.0; recipient_traces.len()];
    let (mut mean_ratio, mut std_ratio) = (Vec::with_capacity(layers), Vec::with_capacity(layers));
    for k in 0..layers {
        for (slot, t) in column.iter_mut().zip(&recipient_traces) {
            *slot = t.ratio[k];
        }
        let (m, s) = mean_and_std(&column);
        mean_ratio.push(m);
        std_ratio.push(s);
    }
    Ok(TransferResult {
        spec: spec.clone(),
        final_mean: mean_ratio[layers - 1],
        final_std: std_ratio[layers - 1],
        donor_trace,
        recipient_traces,
        mean_ratio,
        std_ratio,
    })
}

/// One recipient's entry in the result JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecipientSummary {
    pub seed: u64,
    pub edges: usize,
    pub optimum: usize,
    pub final_ratio: f64,
    pub trace: String,
}

/// Serialized form of a [`TransferResult`]; traces are referenced by file name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferSummary {
    pub spec: TransferSpec,
    pub rng: String,
    pub bit_order: String,
    pub donor_trace: String,
    pub donor_edges: usize,
    pub donor_optimum: usize,
    pub donor_final_ratio: f64,
    pub recipients: Vec<RecipientSummary>,
    pub mean_ratio: Vec<f64>,
    pub std_ratio: Vec<f64>,
    pub final_mean: f64,
    pub final_std: f64,
}

impl TransferSummary {
    pub fn final_ratios(&self) -> Vec<f64> {
        self.recipients.iter().map(|r| r.final_ratio).collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

impl TransferResult {
    pub fn summary(&self) -> TransferSummary {
        TransferSummary {
            spec: self.spec.clone(),
            rng: GENERATOR_NAME.to_string(),
            bit_order: "qubit 0 = least-significant bit = vertex 0".to_string(),
            donor_trace: DONOR_TRACE_FILE.to_string(),
            donor_edges: self.donor_trace.graph.edges,
            donor_optimum: self.donor_trace.optimum,
            donor_final_ratio: self.donor_trace.final_ratio(),
            recipients: self
                .recipient_traces
                .iter()
                .enumerate()
                .map(|(k, t)| RecipientSummary {
                    seed: t.graph.seed,
                    edges: t.graph.edges,
                    optimum: t.optimum,
                    final_ratio: t.final_ratio(),
                    trace: recipient_trace_file(k),
                })
                .collect(),
            mean_ratio: self.mean_ratio.clone(),
            std_ratio: self.std_ratio.clone(),
            final_mean: self.final_mean,
            final_std: self.final_std,
        }
    }

    /// Writes `result.json`, `donor_trace.csv` and `recipient_<k>.csv` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, contents: &str| {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Error::io(path, e))
        };
        write(DONOR_TRACE_FILE, &self.donor_trace.to_csv())?;
        for (k, t) in self.recipient_traces.iter().enumerate() {
            write(&recipient_trace_file(k), &t.to_csv())?;
        }
        let mut json = serde_json::to_string_pretty(&self.summary())?;
        json.push('\n');
        write(RESULT_FILE, &json)
    }
}

/// Final-ratio statistics for one donor size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DonorSizeStats {
    pub donor_n: usize,
    pub final_mean: f64,
    pub final_std: f64,
}

impl DonorSizeStats {
    pub fn interval(&self) -> (f64, f64) {
        (
            self.final_mean - self.final_std,
            self.final_mean + self.final_std,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResilienceSummary {
    pub sizes: Vec<DonorSizeStats>,
    /// Whether every pair of `mean ± std` intervals intersects.
    pub overlap: bool,
}

impl ResilienceSummary {
    pub fn from_stats(sizes: Vec<DonorSizeStats>) -> Self {
        let overlap = sizes.iter().enumerate().all(|(i, a)| {
            sizes[i + 1..].iter().all(|b| {
                let ((lo_a, hi_a), (lo_b, hi_b)) = (a.interval(), b.interval());
                lo_a.max(lo_b) <= hi_a.min(hi_b)
            })
        });
        ResilienceSummary { sizes, overlap }
    }
}

/// Compares transfer outcomes across donor sizes that share one recipient ensemble.
pub fn aggregate_by_donor_size(results: &[TransferResult]) -> Result<ResilienceSummary> {
    if let Some(first) = results.first() {
        let same = |r: &TransferResult| {
            r.spec.recipient == first.spec.recipient
                && r.spec.recipients_count == first.spec.recipients_count
        };
        if !results.iter().all(same) {
            return Err(Error::MismatchedRecipients);
        }
    }
    Ok(ResilienceSummary::from_stats(
        results
            .iter()
            .map(|r| DonorSizeStats {
                donor_n: r.spec.donor.n,
                final_mean: r.final_mean,
                final_std: r.final_std,
            })
            .collect(),
    ))
}

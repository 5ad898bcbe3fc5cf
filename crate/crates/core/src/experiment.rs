//! Sweep orchestration over donor/recipient grids, on-disk results, and the
//! findings report.
//!
//! Output layout:
//!
//! ```text
//! <out>/manifest.json
//! <out>/cells/<cell-id>/result.json
//! <out>/cells/<cell-id>/donor_trace.csv
//! <out>/cells/<cell-id>/recipient_<k>.csv
//! ```
//!
//! Cells are written into a temporary sibling directory and renamed into
//! place, so a cell directory that exists is always complete.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::falqon::FalqonConfig;
use crate::graph::FamilyKind;
use crate::rng::GENERATOR_NAME;
use crate::transfer::{
    mean_and_std, run_transfer, DonorSizeStats, EnsembleSpec, ResilienceSummary, TransferSpec,
    TransferSummary, DEFAULT_RECIPIENTS, RECIPIENT_SIZE, RESULT_FILE,
};

pub const DONOR_SIZES: [usize; 3] = [8, 10, 12];
pub const DONOR_PS: [f64; 4] = [0.2, 0.3, 0.4, 0.5];
pub const RECIPIENT_PS: [f64; 9] = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CELLS_DIR: &str = "cells";
pub const FINDINGS_TEXT_FILE: &str = "findings.txt";
pub const FINDINGS_JSON_FILE: &str = "findings.json";

/// Reported final ratios for dense recipients, keyed by recipient `p`.
pub const DENSE_TARGETS: [(f64, f64); 3] = [(0.8, 0.95), (0.9, 0.96), (1.0, 0.98)];
pub const SPARSE_PS: [f64; 3] = [0.2, 0.3, 0.4];
pub const RESILIENCE_P: f64 = 0.5;

const P_EPS: f64 = 1e-9;

fn same_p(a: f64, b: f64) -> bool {
    (a - b).abs() < P_EPS
}

/// The configuration matrix of a sweep. Recipients always have 14 vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub donor_families: Vec<FamilyKind>,
    pub donor_sizes: Vec<usize>,
    #[serde(default)]
    pub donor_ps: Vec<f64>,
    pub recipient_families: Vec<FamilyKind>,
    #[serde(default)]
    pub recipient_ps: Vec<f64>,
    #[serde(default = "default_recipients")]
    pub recipients_count: usize,
    pub donor_seeds: Vec<u64>,
    pub recipient_seed_base: u64,
    #[serde(default)]
    pub cfg: FalqonConfig<f64>,
}

fn default_recipients() -> usize {
    DEFAULT_RECIPIENTS
}

/// One donor/recipient combination of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub donor: EnsembleSpec,
    pub donor_seed: u64,
    pub recipient: EnsembleSpec,
}

impl Cell {
    /// Deterministic directory name, e.g. `d-er8-p0.5-s1__r-er14-p0.8`.
    pub fn id(&self) -> String {
        format!(
            "d-{}-s{}__r-{}",
            self.donor.label(),
            self.donor_seed,
            self.recipient.label()
        )
    }
}

impl SweepGrid {
    /// Every donor and recipient configuration studied in the transfer experiments.
    pub fn full(donor_seeds: Vec<u64>, recipient_seed_base: u64) -> Self {
        SweepGrid {
            donor_families: vec![FamilyKind::ThreeRegular, FamilyKind::ErdosRenyi],
            donor_sizes: DONOR_SIZES.to_vec(),
            donor_ps: DONOR_PS.to_vec(),
            recipient_families: vec![FamilyKind::ErdosRenyi, FamilyKind::ThreeRegular],
            recipient_ps: RECIPIENT_PS.to_vec(),
            recipients_count: DEFAULT_RECIPIENTS,
            donor_seeds,
            recipient_seed_base,
            cfg: FalqonConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let grid: SweepGrid = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("sweep grids serialize to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        fn distinct<T: PartialEq + std::fmt::Debug>(
            name: &str,
            items: &[T],
            eq: impl Fn(&T, &T) -> bool,
        ) -> Result<()> {
            if items.is_empty() {
                return Err(Error::InvalidConfig(format!("{name} is empty")));
            }
            for (i, a) in items.iter().enumerate() {
                if items[i + 1..].iter().any(|b| eq(a, b)) {
                    return Err(Error::InvalidConfig(format!("{name} lists {a:?} twice")));
                }
            }
            Ok(())
        }
        fn subset(name: &str, items: &[f64], allowed: &[f64]) -> Result<()> {
            match items
                .iter()
                .find(|&&p| !allowed.iter().any(|&a| same_p(a, p)))
            {
                Some(p) => Err(Error::InvalidConfig(format!(
                    "{name} value {p} is outside {allowed:?}"
                ))),
                None => Ok(()),
            }
        }
        distinct("donor_families", &self.donor_families, |a, b| a == b)?;
        distinct("donor_sizes", &self.donor_sizes, |a, b| a == b)?;
        distinct("recipient_families", &self.recipient_families, |a, b| {
            a == b
        })?;
        distinct("donor_seeds", &self.donor_seeds, |a, b| a == b)?;
        if let Some(n) = self.donor_sizes.iter().find(|n| !DONOR_SIZES.contains(n)) {
            return Err(Error::InvalidConfig(format!(
                "donor size {n} is outside {DONOR_SIZES:?}"
            )));
        }
        if self.donor_families.contains(&FamilyKind::ErdosRenyi) {
            distinct("donor_ps", &self.donor_ps, |a, b| same_p(*a, *b))?;
            subset("donor_ps", &self.donor_ps, &DONOR_PS)?;
        }
        if self.recipient_families.contains(&FamilyKind::ErdosRenyi) {
            distinct("recipient_ps", &self.recipient_ps, |a, b| same_p(*a, *b))?;
            subset("recipient_ps", &self.recipient_ps, &RECIPIENT_PS)?;
        }
        if self.recipients_count == 0 {
            return Err(Error::InvalidConfig(
                "recipients_count must be at least 1".into(),
            ));
        }
        self.cfg.validate()
    }

    /// The valid Cartesian product, in a fixed order. Edge probabilities only
    /// apply to Erdős–Rényi members.
    pub fn cells(&self) -> Vec<Cell> {
        let ensembles =
            |families: &[FamilyKind], sizes: &[usize], ps: &[f64]| -> Vec<EnsembleSpec> {
                let mut out = Vec::new();
                for &family in families {
                    for &n in sizes {
                        match family {
                            FamilyKind::ThreeRegular => out.push(EnsembleSpec::three_regular(n)),
                            FamilyKind::ErdosRenyi => {
                                out.extend(ps.iter().map(|&p| EnsembleSpec::erdos_renyi(n, p)))
                            }
                        }
                    }
                }
                out
            };
        let donors = ensembles(&self.donor_families, &self.donor_sizes, &self.donor_ps);
        let recipients = ensembles(
            &self.recipient_families,
            &[RECIPIENT_SIZE],
            &self.recipient_ps,
        );
        let mut cells =
            Vec::with_capacity(donors.len() * self.donor_seeds.len() * recipients.len());
        for donor in &donors {
            for &donor_seed in &self.donor_seeds {
                for recipient in &recipients {
                    cells.push(Cell {
                        donor: *donor,
                        donor_seed,
                        recipient: *recipient,
                    });
                }
            }
        }
        cells
    }

    pub fn transfer_spec(&self, cell: &Cell) -> TransferSpec {
        TransferSpec::new(
            cell.donor,
            cell.donor_seed,
            cell.recipient,
            self.recipient_seed_base,
        )
        .with_recipients(self.recipients_count)
        .with_config(self.cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    /// Computed during this run.
    Completed,
    /// A valid result for the same specification was already on disk.
    Cached,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub id: String,
    pub path: String,
    pub status: CellStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub grid: SweepGrid,
    pub cells: Vec<CellRecord>,
    pub rng: String,
    pub code_version: String,
    pub started_at: u64,
    pub finished_at: u64,
}

impl RunManifest {
    pub fn read(out_dir: &Path) -> Result<Self> {
        let path = out_dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn count(&self, status: CellStatus) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepOptions {
    /// Concurrent cells; 0 uses the rayon default.
    pub workers: usize,
    /// Recompute cells that already have valid results.
    pub force: bool,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

static TMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Runs every cell of `grid`, writing results under `out_dir`.
///
/// Per-cell failures are recorded in the manifest and do not stop the sweep.
pub fn run_sweep(grid: &SweepGrid, out_dir: &Path, opts: SweepOptions) -> Result<RunManifest> {
    grid.validate()?;
    let started_at = unix_now();
    let cells_dir = out_dir.join(CELLS_DIR);
    fs::create_dir_all(&cells_dir).map_err(|e| Error::io(&cells_dir, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let cells = grid.cells();
    let records = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| {
                let id = cell.id();
                let status = run_cell(grid, cell, &cells_dir.join(&id), opts.force);
                let (status, error) = match status {
                    Ok(s) => (s, None),
                    Err(e) => (CellStatus::Failed, Some(e.to_string())),
                };
                CellRecord {
                    path: format!("{CELLS_DIR}/{id}"),
                    id,
                    status,
                    error,
                }
            })
            .collect::<Vec<_>>()
    });

    let manifest = RunManifest {
        grid: grid.clone(),
        cells: records,
        rng: GENERATOR_NAME.to_string(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        finished_at: unix_now(),
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write_atomic(&out_dir.join(MANIFEST_FILE), &json)?;
    Ok(manifest)
}

fn run_cell(grid: &SweepGrid, cell: &Cell, dir: &Path, force: bool) -> Result<CellStatus> {
    let spec = grid.transfer_spec(cell);
    if !force {
        if let Ok(existing) = TransferSummary::read(&dir.join(RESULT_FILE)) {
            if existing.spec == spec {
                return Ok(CellStatus::Cached);
            }
        }
    }
    let result = run_transfer(&spec)?;
    let parent = dir.parent().expect("cell directories live under cells/");
    let name = dir
        .file_name()
        .expect("cell directories are named")
        .to_string_lossy();
    let tmp = parent.join(format!(
        ".{name}.tmp-{}-{}",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    result.write_to_dir(&tmp)?;
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::rename(&tmp, dir).map_err(|e| Error::io(dir, e))?;
    Ok(CellStatus::Completed)
}

/// Loads every cell's `result.json`, failing with the full list of absent cells.
pub fn load_cells(
    out_dir: &Path,
    manifest: &RunManifest,
) -> Result<Vec<(String, TransferSummary)>> {
    let mut missing = Vec::new();
    let mut loaded = Vec::with_capacity(manifest.cells.len());
    for record in &manifest.cells {
        let path: PathBuf = out_dir.join(&record.path).join(RESULT_FILE);
        match (record.status, TransferSummary::read(&path)) {
            (CellStatus::Failed, _) | (_, Err(_)) => missing.push(record.id.clone()),
            (_, Ok(summary)) => loaded.push((record.id.clone(), summary)),
        }
    }
    if missing.is_empty() {
        Ok(loaded)
    } else {
        Err(Error::MissingCells(missing))
    }
}

/// Transferred final ratio for the dense-recipient regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseRow {
    pub donor: EnsembleSpec,
    pub recipient_p: f64,
    pub donor_seeds: usize,
    /// Mean over all recipients of all donor seeds.
    pub final_mean: f64,
    /// Sample standard deviation over the same pooled recipients.
    pub final_std: f64,
    pub donor_final_mean: f64,
    pub target: f64,
}

/// Transferred final ratio against the donor's own final ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRow {
    pub donor: EnsembleSpec,
    pub recipient_p: f64,
    pub donor_seeds: usize,
    /// Donor final ratio, averaged over donor seeds.
    pub donor_final_mean: f64,
    /// Transferred final mean, averaged over donor seeds.
    pub transferred_mean: f64,
    /// `donor_final_mean - transferred_mean`.
    pub gap: f64,
}

/// Whether the gap shrinks from `p = 0.2` through `0.3` to `0.4` for one donor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseTrend {
    pub donor: EnsembleSpec,
    pub gaps: Vec<(f64, f64)>,
    pub narrowing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResilienceRow {
    pub donor_family: FamilyKind,
    pub donor_p: Option<f64>,
    pub recipient: EnsembleSpec,
    pub summary: ResilienceSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FindingsReport {
    pub dense: Vec<DenseRow>,
    pub sparse: Vec<SparseRow>,
    pub sparse_trends: Vec<SparseTrend>,
    pub resilience: Vec<ResilienceRow>,
}

/// Per-(donor ensemble, recipient ensemble) aggregate over donor seeds.
struct Group<'a> {
    donor: EnsembleSpec,
    recipient: EnsembleSpec,
    summaries: Vec<&'a TransferSummary>,
}

impl Group<'_> {
    fn pooled(&self) -> (f64, f64) {
        let all: Vec<f64> = self
            .summaries
            .iter()
            .flat_map(|s| s.final_ratios())
            .collect();
        mean_and_std(&all)
    }

    fn mean_of(&self, f: impl Fn(&TransferSummary) -> f64) -> f64 {
        self.summaries.iter().map(|s| f(s)).sum::<f64>() / self.summaries.len() as f64
    }
}

fn group_cells(cells: &[(String, TransferSummary)]) -> Vec<Group<'_>> {
    // Keyed on labels so grouping order is stable.
    let mut groups: BTreeMap<(String, String), Group<'_>> = BTreeMap::new();
    for (_, s) in cells {
        let key = (s.spec.donor.label(), s.spec.recipient.label());
        groups
            .entry(key)
            .or_insert_with(|| Group {
                donor: s.spec.donor,
                recipient: s.spec.recipient,
                summaries: Vec::new(),
            })
            .summaries
            .push(s);
    }
    groups.into_values().collect()
}

fn er_recipient_p(g: &Group<'_>) -> Option<f64> {
    match g.recipient.family {
        FamilyKind::ErdosRenyi => g.recipient.p,
        FamilyKind::ThreeRegular => None,
    }
}

/// Builds the three findings tables from the cell results on disk.
pub fn summarize_findings(out_dir: &Path, manifest: &RunManifest) -> Result<FindingsReport> {
    let cells = load_cells(out_dir, manifest)?;
    Ok(findings_from_summaries(&cells))
}

pub fn findings_from_summaries(cells: &[(String, TransferSummary)]) -> FindingsReport {
    let groups = group_cells(cells);

    let mut dense = Vec::new();
    for g in &groups {
        let Some(p) = er_recipient_p(g) else { continue };
        if let Some(&(_, target)) = DENSE_TARGETS.iter().find(|(tp, _)| same_p(*tp, p)) {
            let (final_mean, final_std) = g.pooled();
            dense.push(DenseRow {
                donor: g.donor,
                recipient_p: p,
                donor_seeds: g.summaries.len(),
                final_mean,
                final_std,
                donor_final_mean: g.mean_of(|s| s.donor_final_ratio),
                target,
            });
        }
    }

    let mut sparse = Vec::new();
    for g in groups
        .iter()
        .filter(|g| g.donor.family == FamilyKind::ThreeRegular)
    {
        let Some(p) = er_recipient_p(g) else { continue };
        if SPARSE_PS.iter().any(|&sp| same_p(sp, p)) {
            let donor_final_mean = g.mean_of(|s| s.donor_final_ratio);
            let transferred_mean = g.mean_of(|s| s.final_mean);
            sparse.push(SparseRow {
                donor: g.donor,
                recipient_p: p,
                donor_seeds: g.summaries.len(),
                donor_final_mean,
                transferred_mean,
                gap: donor_final_mean - transferred_mean,
            });
        }
    }
    let mut sparse_trends = Vec::new();
    let mut donors: Vec<EnsembleSpec> = Vec::new();
    for row in &sparse {
        if !donors.contains(&row.donor) {
            donors.push(row.donor);
        }
    }
    for donor in donors {
        let gaps: Vec<(f64, f64)> = SPARSE_PS
            .iter()
            .filter_map(|&p| {
                sparse
                    .iter()
                    .find(|r| r.donor == donor && same_p(r.recipient_p, p))
                    .map(|r| (p, r.gap))
            })
            .collect();
        if gaps.len() == SPARSE_PS.len() {
            let narrowing = gaps.windows(2).all(|w| w[0].1 > w[1].1);
            sparse_trends.push(SparseTrend {
                donor,
                gaps,
                narrowing,
            });
        }
    }

    let mut resilience = Vec::new();
    for (family, donor_p) in [
        (FamilyKind::ThreeRegular, None),
        (FamilyKind::ErdosRenyi, Some(RESILIENCE_P)),
    ] {
        let members: Vec<&Group<'_>> = groups
            .iter()
            .filter(|g| {
                g.donor.family == family
                    && g.donor.p.zip(donor_p).is_none_or(|(a, b)| same_p(a, b))
                    && er_recipient_p(g).is_some_and(|p| same_p(p, RESILIENCE_P))
            })
            .collect();
        if members.len() < 2 {
            continue;
        }
        let mut sizes: Vec<DonorSizeStats> = members
            .iter()
            .map(|g| {
                let (final_mean, final_std) = g.pooled();
                DonorSizeStats {
                    donor_n: g.donor.n,
                    final_mean,
                    final_std,
                }
            })
            .collect();
        sizes.sort_by_key(|s| s.donor_n);
        resilience.push(ResilienceRow {
            donor_family: family,
            donor_p,
            recipient: members[0].recipient,
            summary: ResilienceSummary::from_stats(sizes),
        });
    }

    FindingsReport {
        dense,
        sparse,
        sparse_trends,
        resilience,
    }
}

/// Formats with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

impl FindingsReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let _ = writeln!(w, "Dense Erdős–Rényi recipients (n = {RECIPIENT_SIZE})");
        let _ = writeln!(
            w,
            "{:<14} {:>5} {:>6} {:>16} {:>16} {:>16} {:>7}",
            "donor", "p", "seeds", "final_mean", "final_std", "donor_final", "target"
        );
        for r in &self.dense {
            let _ = writeln!(
                w,
                "{:<14} {:>5} {:>6} {:>16} {:>16} {:>16} {:>7}",
                r.donor.label(),
                r.recipient_p,
                r.donor_seeds,
                sig12(r.final_mean),
                sig12(r.final_std),
                sig12(r.donor_final_mean),
                r.target
            );
        }
        let _ = writeln!(w, "\nSparse cross-family recipients (3-regular donors)");
        let _ = writeln!(
            w,
            "{:<14} {:>5} {:>6} {:>16} {:>16} {:>16}",
            "donor", "p", "seeds", "donor_final", "transferred", "gap"
        );
        for r in &self.sparse {
            let _ = writeln!(
                w,
                "{:<14} {:>5} {:>6} {:>16} {:>16} {:>16}",
                r.donor.label(),
                r.recipient_p,
                r.donor_seeds,
                sig12(r.donor_final_mean),
                sig12(r.transferred_mean),
                sig12(r.gap)
            );
        }
        for t in &self.sparse_trends {
            let _ = writeln!(
                w,
                "gap narrows 0.2 > 0.3 > 0.4 for {}: {}",
                t.donor.label(),
                t.narrowing
            );
        }
        let _ = writeln!(w, "\nDonor-size resilience");
        for r in &self.resilience {
            let family = match r.donor_p {
                Some(p) => format!("{} p={p}", r.donor_family),
                None => r.donor_family.to_string(),
            };
            let _ = writeln!(
                w,
                "{family} donors -> {}: overlap = {}",
                r.recipient.label(),
                r.summary.overlap
            );
            for s in &r.summary.sizes {
                let _ = writeln!(
                    w,
                    "  n={:<3} mean {:>16} std {:>16}",
                    s.donor_n,
                    sig12(s.final_mean),
                    sig12(s.final_std)
                );
            }
        }
        out
    }

    /// Writes `findings.txt` and `findings.json` into `out_dir`.
    pub fn write(&self, out_dir: &Path) -> Result<()> {
        write_atomic(&out_dir.join(FINDINGS_TEXT_FILE), &self.to_text())?;
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        write_atomic(&out_dir.join(FINDINGS_JSON_FILE), &json)
    }
}

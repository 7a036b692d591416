//! End-to-end sweep: solve every parameter point, track branches, detect
//! crossings, compute diagnostics and write the run directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crossinfo_core::billiard::{solve_modes_on_grid, DomainGrid, LatticeBox};
use crossinfo_core::linalg::ShiftInvertOptions;
use crossinfo_core::qinfo::{analyze, entropy_sign_rule, linearized_entropy_contribution, sign_rule_check, Bipartition};
use crossinfo_core::qinfo::{DiagnosticsRecord, SignCheck};
use crossinfo_core::spinchain::{bit_reversal_sector, sector_eigenset, SectorBasis, SpinChainModel};
use crossinfo_core::sweep::{
    detect_avoided_crossings, refine_crossing, track_branches, AvoidedCrossing, EigenBranch, EigenSet, RefineStatus,
    TrackOptions,
};
use crossinfo_core::twolevel::TwoLevelModel;
use crossinfo_core::Error as CoreError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{billiard_geometry, Backend, BackendKind, BilliardConfig, DumpFormat, RunConfig};
use crate::error::AppError;
use crate::formats::{fmt_f64, write_csv, write_jsonl, ModeDump};

pub const MANIFEST_NAME: &str = "manifest.json";
/// Attempts with a nudged shift after an LDLᵀ breakdown.
const BREAKDOWN_RETRIES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub kind: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpEntry {
    pub path: String,
    pub format: String,
    pub branch: usize,
    pub step: usize,
    pub parameter: f64,
    pub eigenvalue: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub steps: usize,
    pub branches: usize,
    pub tracking_breaks: usize,
    pub crossings: usize,
    pub sign_checks: usize,
    pub sign_checks_counted: usize,
    pub sign_checks_agreeing: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub backend: String,
    pub parameter_name: String,
    pub config: serde_json::Value,
    pub files: Vec<FileEntry>,
    pub dumps: Vec<DumpEntry>,
    pub summary: Summary,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self, AppError> {
        let path = dir.join(MANIFEST_NAME);
        let text = fs::read_to_string(&path).map_err(|e| AppError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| AppError::io(&path, e.into()))
    }
}

/// Everything produced by a run, in memory.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub manifest: Manifest,
    pub branches: Vec<EigenBranch>,
    pub crossings: Vec<AvoidedCrossing>,
    /// `diagnostics[b][t]` for branch `b` at step `t`.
    pub diagnostics: Vec<Vec<DiagnosticsRecord>>,
}

enum Solver {
    Billiard {
        kind: BackendKind,
        config: BilliardConfig,
        lattice: LatticeBox,
    },
    Ising {
        model: SpinChainModel,
        basis: SectorBasis,
    },
    TwoLevel(TwoLevelModel),
}

impl Solver {
    fn new(config: &RunConfig, parameters: &[f64]) -> Result<Self, AppError> {
        Ok(match &config.backend {
            Backend::Quadrupole(b) | Backend::Oval(b) => {
                let kind = config.backend.kind();
                let mut lattice: Option<LatticeBox> = None;
                for &p in parameters.iter().chain(&config.dump_params) {
                    let geom = billiard_geometry(kind, b, p).map_err(|e| AppError::solver(p, e))?;
                    let bx = LatticeBox::covering(&geom, b.resolution);
                    lattice = Some(lattice.map_or(bx, |l| l.union(&bx)));
                }
                Solver::Billiard {
                    kind,
                    config: b.clone(),
                    lattice: lattice.expect("at least two parameters"),
                }
            }
            Backend::Ising(c) => {
                let model = SpinChainModel::new(c.sites, c.coupling, c.field, parameters[0])
                    .map_err(|e| AppError::solver(parameters[0], e))?;
                let basis = bit_reversal_sector(c.sites, c.parity).map_err(|e| AppError::solver(parameters[0], e))?;
                Solver::Ising { model, basis }
            }
            Backend::TwoLevelTest(c) => {
                Solver::TwoLevel(TwoLevelModel::new(c.g).map_err(|e| AppError::solver(parameters[0], e))?)
            }
        })
    }

    fn grid(&self, p: f64) -> Result<Arc<DomainGrid>, CoreError> {
        match self {
            Solver::Billiard {
                kind,
                config,
                lattice,
            } => {
                let geom = billiard_geometry(*kind, config, p)?;
                Ok(Arc::new(DomainGrid::in_box(&geom, config.resolution, *lattice)?))
            }
            _ => unreachable!("grid of a non-billiard backend"),
        }
    }

    fn eigenset(&self, p: f64) -> Result<EigenSet, CoreError> {
        match self {
            Solver::Billiard { config, .. } => {
                let grid = self.grid(p)?;
                let h = grid.spacing();
                let modes = solve_with_retry(|nudge| {
                    solve_modes_on_grid(
                        grid.clone(),
                        config.refractive_index,
                        config.target_k * (1.0 + nudge),
                        config.modes,
                        ShiftInvertOptions::default(),
                    )
                })?;
                let (values, vectors) = modes
                    .iter()
                    .map(|m| {
                        let v: Vec<f64> = m.full_field().iter().map(|x| x * h).collect();
                        (m.eigenvalue, v)
                    })
                    .unzip();
                Ok(EigenSet {
                    parameter: p,
                    values,
                    vectors,
                })
            }
            Solver::Ising { model, basis } => {
                let s = sector_eigenset(&model.with_tilt(p), basis)?;
                Ok(EigenSet {
                    parameter: p,
                    values: s.values,
                    vectors: s.vectors,
                })
            }
            Solver::TwoLevel(m) => m.eigenset(p),
        }
    }

    /// Tracked vector → state in the product basis of the bipartition.
    fn product_state(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Solver::Ising { basis, .. } => basis.embed(v),
            _ => v.to_vec(),
        }
    }

    fn bipartition(&self) -> Bipartition {
        match self {
            Solver::Billiard { lattice, .. } => Bipartition::grid_xy(
                (lattice.i_max - lattice.i_min + 1) as usize,
                (lattice.j_max - lattice.j_min + 1) as usize,
                lattice.i_min,
                lattice.j_min,
            ),
            Solver::Ising { model, .. } => Bipartition::chain_half(model.sites),
            Solver::TwoLevel(_) => Bipartition::generic(2, 1),
        }
    }

    /// Physical spacing of the dump axes.
    fn dump_spacing(&self) -> f64 {
        match self {
            Solver::Billiard { config, .. } => 1.0 / config.resolution,
            _ => 1.0,
        }
    }
}

fn solve_with_retry<T>(mut solve: impl FnMut(f64) -> Result<T, CoreError>) -> Result<T, CoreError> {
    let mut attempt = 0;
    loop {
        match solve(1e-7 * attempt as f64) {
            Err(CoreError::FactorizationBreakdown { .. }) if attempt < BREAKDOWN_RETRIES => attempt += 1,
            other => return other,
        }
    }
}

struct BranchOutput {
    records: Vec<DiagnosticsRecord>,
    checks: Vec<SignCheck>,
}

#[derive(Serialize)]
struct SchmidtLine<'a> {
    branch: usize,
    step: usize,
    parameter: f64,
    weights: &'a [f64],
    captured_weight: f64,
    entropy: f64,
}

#[derive(Serialize)]
struct SignComponentLine {
    k: usize,
    sigma: f64,
    lambda: f64,
    predicted: f64,
    actual: f64,
    skipped: bool,
    sign: Option<&'static str>,
    linearized: f64,
}

#[derive(Serialize)]
struct SignLine {
    branch: usize,
    step: usize,
    parameter: f64,
    next_parameter: f64,
    delta_entropy: f64,
    linearized: f64,
    bound: f64,
    counted: bool,
    agrees: bool,
    components: Vec<SignComponentLine>,
}

struct Writer {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl Writer {
    fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    fn record(&mut self, rel: &str, kind: &str) -> Result<(), AppError> {
        let path = self.path(rel);
        let bytes = fs::metadata(&path).map_err(|e| AppError::io(&path, e))?.len();
        self.files.push(FileEntry {
            path: rel.to_string(),
            kind: kind.to_string(),
            bytes,
        });
        Ok(())
    }

    fn csv(&mut self, rel: &str, kind: &str, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<(), AppError> {
        let path = self.path(rel);
        write_csv(&path, &header, rows).map_err(|e| AppError::io(&path, e))?;
        self.record(rel, kind)
    }

    fn jsonl<T: Serialize>(&mut self, rel: &str, kind: &str, records: &[T]) -> Result<(), AppError> {
        let path = self.path(rel);
        write_jsonl(&path, records).map_err(|e| AppError::io(&path, e))?;
        self.record(rel, kind)
    }
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn diagnostics_header(rank: usize) -> Vec<String> {
    let mut h = header(&[
        "parameter", "branch", "S_vN", "S_config", "S_Sh_x", "S_Sh_y", "C_d_x", "C_d_y", "P", "P_diag", "P_off",
    ]);
    h.extend((1..=rank).map(|k| format!("lambda_{k}")));
    h.push("captured_weight".into());
    h
}

pub fn diagnostics_row(r: &DiagnosticsRecord, rank: usize) -> Vec<String> {
    let mut row = vec![
        fmt_f64(r.parameter),
        r.branch.to_string(),
        fmt_f64(r.s_vn),
        fmt_f64(r.s_config),
        fmt_f64(r.s_sh_x),
        fmt_f64(r.s_sh_y),
        fmt_f64(r.c_d_x),
        fmt_f64(r.c_d_y),
        fmt_f64(r.purity),
        fmt_f64(r.p_diag),
        fmt_f64(r.p_off),
    ];
    row.extend(r.leading_weights(rank).into_iter().map(fmt_f64));
    row.push(fmt_f64(r.schmidt.captured_weight));
    row
}

fn status_name(s: RefineStatus) -> &'static str {
    match s {
        RefineStatus::Coarse => "coarse",
        RefineStatus::Refined => "refined",
        RefineStatus::BudgetExhausted => "budget_exhausted",
        RefineStatus::NotUnimodal => "not_unimodal",
    }
}

/// Runs the configured sweep and writes all outputs under
/// `config.output_dir`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunResult, AppError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| AppError::io(&config.output_dir, std::io::Error::other(e)))?;
    pool.install(|| run_in_pool(config))
}

fn run_in_pool(config: &RunConfig) -> Result<RunResult, AppError> {
    let parameters = config.parameters();
    let solver = Solver::new(config, &parameters)?;

    let sets: Vec<EigenSet> = parameters
        .par_iter()
        .map(|&p| solver.eigenset(p).map_err(|e| AppError::solver(p, e)))
        .collect::<Result<_, _>>()?;

    let opts = TrackOptions {
        window: config.track.clone(),
        overlap_floor: config.overlap_floor,
    };
    let branches = track_branches(&sets, &opts).map_err(|e| AppError::solver(parameters[0], e))?;
    // an interior gap minimum needs three grid points
    let coarse = if sets.len() < 3 {
        Vec::new()
    } else {
        detect_avoided_crossings(&branches, config.gap_factor).map_err(|e| AppError::solver(parameters[0], e))?
    };
    let crossings: Vec<AvoidedCrossing> = if config.refine_levels == 0 {
        coarse
    } else {
        coarse
            .par_iter()
            .map(|x| {
                refine_crossing(|p| Ok(solver.eigenset(p)?.values), x, config.refine_levels)
                    .map_err(|e| AppError::solver(x.location, e))
            })
            .collect::<Result<_, _>>()?
    };

    let bip = solver.bipartition();
    let outputs: Vec<BranchOutput> = branches
        .par_iter()
        .map(|b| {
            let mut records = Vec::with_capacity(sets.len());
            let mut checks = Vec::with_capacity(sets.len() - 1);
            let mut prev = None;
            for t in 0..sets.len() {
                let state = solver.product_state(&b.state(&sets, t));
                let a = analyze(parameters[t], b.id, &state, &bip, config.rank)
                    .map_err(|e| AppError::solver(parameters[t], e))?;
                if let Some(p) = &prev {
                    checks.push(sign_rule_check(p, &a).map_err(|e| AppError::solver(parameters[t], e))?);
                }
                records.push(a.record.clone());
                prev = Some(a);
            }
            Ok(BranchOutput { records, checks })
        })
        .collect::<Result<_, AppError>>()?;

    let root = config.output_dir.clone();
    for dir in [root.clone(), root.join("diagnostics"), root.join("dumps")] {
        fs::create_dir_all(&dir).map_err(|e| AppError::io(&dir, e))?;
    }
    let mut w = Writer {
        root: root.clone(),
        files: Vec::new(),
    };

    let spectrum_rows = sets
        .iter()
        .flat_map(|s| {
            s.values
                .iter()
                .enumerate()
                .map(|(i, &v)| vec![fmt_f64(s.parameter), i.to_string(), fmt_f64(v)])
        })
        .collect();
    w.csv("spectrum.csv", "spectrum", header(&["parameter", "index", "eigenvalue"]), spectrum_rows)?;

    let branch_rows = branches
        .iter()
        .flat_map(|b| {
            b.points.iter().map(move |p| {
                vec![
                    b.id.to_string(),
                    p.step.to_string(),
                    fmt_f64(p.parameter),
                    fmt_f64(p.value),
                    p.source_index.to_string(),
                    fmt_f64(p.overlap),
                    (p.tracking_break as u8).to_string(),
                ]
            })
        })
        .collect();
    w.csv(
        "branches.csv",
        "branches",
        header(&["branch", "step", "parameter", "eigenvalue", "source_index", "overlap", "tracking_break"]),
        branch_rows,
    )?;

    let crossing_rows = crossings
        .iter()
        .map(|x| {
            vec![
                x.lower_branch.to_string(),
                x.upper_branch.to_string(),
                fmt_f64(x.location),
                fmt_f64(x.min_gap),
                fmt_f64(x.window.0),
                fmt_f64(x.window.1),
                status_name(x.status).to_string(),
            ]
        })
        .collect();
    w.csv(
        "crossings.csv",
        "crossings",
        header(&["lower_branch", "upper_branch", "location", "min_gap", "window_lo", "window_hi", "status"]),
        crossing_rows,
    )?;

    for (b, out) in branches.iter().zip(&outputs) {
        let rows = out.records.iter().map(|r| diagnostics_row(r, config.rank)).collect();
        w.csv(
            &format!("diagnostics/branch_{:03}.csv", b.id),
            "diagnostics",
            diagnostics_header(config.rank),
            rows,
        )?;
    }

    let schmidt: Vec<SchmidtLine> = outputs
        .iter()
        .flat_map(|o| {
            o.records.iter().enumerate().map(|(t, r)| SchmidtLine {
                branch: r.branch,
                step: t,
                parameter: r.parameter,
                weights: r.schmidt.leading(),
                captured_weight: r.schmidt.captured_weight,
                entropy: r.s_vn,
            })
        })
        .collect();
    w.jsonl("schmidt.jsonl", "schmidt_spectra", &schmidt)?;

    let params = &parameters;
    let sign_lines: Vec<SignLine> = branches
        .iter()
        .zip(&outputs)
        .flat_map(|(b, o)| {
            o.checks.iter().enumerate().map(move |(t, c)| SignLine {
                branch: b.id,
                step: t,
                parameter: params[t],
                next_parameter: params[t + 1],
                delta_entropy: c.delta_entropy,
                linearized: c.linearized,
                bound: c.bound,
                counted: c.counted,
                agrees: c.agrees,
                components: c
                    .components
                    .iter()
                    .take(config.rank)
                    .map(|p| SignComponentLine {
                        k: p.k,
                        sigma: p.sigma,
                        lambda: p.lambda,
                        predicted: p.predicted,
                        actual: p.actual,
                        skipped: p.skipped,
                        sign: (!p.skipped)
                            .then(|| entropy_sign_rule(p.lambda, p.predicted).ok())
                            .flatten()
                            .map(|s| s.symbol()),
                        linearized: linearized_entropy_contribution(p.sigma, p.predicted),
                    })
                    .collect(),
            })
        })
        .collect();
    w.jsonl("sign_rule.jsonl", "sign_rule", &sign_lines)?;

    let dumps = write_dumps(config, &solver, &sets, &branches, &parameters, &mut w)?;

    let checks = outputs.iter().flat_map(|o| &o.checks);
    let summary = Summary {
        steps: sets.len(),
        branches: branches.len(),
        tracking_breaks: branches.iter().flat_map(|b| &b.points).filter(|p| p.tracking_break).count(),
        crossings: crossings.len(),
        sign_checks: checks.clone().count(),
        sign_checks_counted: checks.clone().filter(|c| c.counted).count(),
        sign_checks_agreeing: checks.filter(|c| c.agrees).count(),
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        core_version: crossinfo_core::VERSION.into(),
        backend: config.backend.kind().name().into(),
        parameter_name: config.backend.kind().parameter_name().into(),
        config: serde_json::to_value(config.to_table()).expect("toml table converts to json"),
        files: w.files,
        dumps,
        summary,
    };
    let path = root.join(MANIFEST_NAME);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| AppError::io(&path, e))?;

    Ok(RunResult {
        manifest,
        branches,
        crossings,
        diagnostics: outputs.into_iter().map(|o| o.records).collect(),
    })
}

fn nearest_step(parameters: &[f64], p: f64) -> usize {
    (0..parameters.len())
        .min_by(|&a, &b| (parameters[a] - p).abs().total_cmp(&(parameters[b] - p).abs()))
        .expect("nonempty grid")
}

fn write_dumps(
    config: &RunConfig,
    solver: &Solver,
    sets: &[EigenSet],
    branches: &[EigenBranch],
    parameters: &[f64],
    w: &mut Writer,
) -> Result<Vec<DumpEntry>, AppError> {
    let mut steps: Vec<usize> = config.dump_params.iter().map(|&p| nearest_step(parameters, p)).collect();
    steps.sort_unstable();
    steps.dedup();
    let bip = solver.bipartition();
    let (nx, ny) = (bip.left_dim(), bip.right_dim());
    let h = solver.dump_spacing();
    let ext = config.dump_format.extension();
    let mut out = Vec::new();
    for &t in &steps {
        for b in branches {
            let state = solver.product_state(&b.state(sets, t));
            // billiard fields are stored with their Σψ²h² = 1 normalization
            let values = match solver {
                Solver::Billiard { .. } => state.iter().map(|v| v / h).collect(),
                _ => state,
            };
            let dump = ModeDump {
                nx,
                ny,
                dx: h,
                dy: h,
                eigenvalue: b.points[t].value,
                values,
            };
            let rel = format!("dumps/branch_{:03}_step_{:04}.{ext}", b.id, t);
            let path = w.path(&rel);
            dump.write(&path, config.dump_format).map_err(|e| AppError::io(&path, e))?;
            w.record(&rel, "mode_dump")?;
            out.push(DumpEntry {
                path: rel,
                format: config.dump_format.name().into(),
                branch: b.id,
                step: t,
                parameter: parameters[t],
                eigenvalue: b.points[t].value,
                nx,
                ny,
            });
        }
    }
    Ok(out)
}

pub(crate) fn dump_format_named(name: &str) -> Option<DumpFormat> {
    match name {
        "text" => Some(DumpFormat::Text),
        "binary" => Some(DumpFormat::Binary),
        _ => None,
    }
}

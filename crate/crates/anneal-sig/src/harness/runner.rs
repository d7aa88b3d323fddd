//! JSON run specs and the operations behind the CLI subcommands.
//!
//! Every operation writes plot-ready CSV (and SVG where it makes sense) plus
//! a manifest JSON echoing the full resolved spec, so each emitted number is
//! recomputable from the manifest alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::entanglement::baseline_curves;
use crate::error::{Error, Result};
use crate::harness::plot::{render_boxes, render_lines, write_csv, write_svg, AxisScale, Series};
use crate::harness::sweep::{gauge_averaged_sweep, random_gauges, Gauge};
use crate::ising::{enumerate_embeddings, full_spectrum, ground_space, IsingModel};
use crate::perturbation::{ground_projector, project_transverse};
use crate::quantum::bath::BathSpec;
use crate::quantum::hamiltonian::sorted_eigh;
use crate::quantum::hamiltonian::HamiltonianBuilder;
use crate::quantum::scl::{evolve_scl, SclCoupling, SclOptions};
use crate::quantum::schedule::AnnealScheduleQ;
use crate::quantum::wcl::{evolve_wcl, WclCoupling, WclOptions};
use crate::quantum::{evolve_closed, GHZ_TO_ANGULAR};
use crate::sa::{
    anneal_master, anneal_mc, cluster_stats, MasterOptions, RuleKind, TemperatureSchedule,
    UpdateRule,
};

/// Files produced by one operation.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunBundle {
    pub written: Vec<PathBuf>,
}

impl RunBundle {
    fn push(&mut self, p: PathBuf) {
        self.written.push(p);
    }
}

/// Loads a model file, defaulting to the reference instance.
pub fn load_model(model_file: &Option<PathBuf>) -> Result<IsingModel> {
    match model_file {
        Some(p) => IsingModel::from_path(p),
        None => Ok(IsingModel::reference()),
    }
}

fn write_manifest(prefix: &Path, payload: serde_json::Value, bundle: &mut RunBundle) -> Result<()> {
    let path = prefix.with_extension("manifest.json");
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&path, serde_json::to_string_pretty(&payload)?)?;
    bundle.push(path);
    Ok(())
}

// ---------------------------------------------------------------------------
// SA runs (classical annealing).

/// JSON run spec for the `sa` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaRunSpec {
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    pub rule: RuleKind,
    pub schedule: TemperatureSchedule,
    /// `None` runs the deterministic master equation; `Some(reads)` runs the
    /// stochastic chain with that many reads.
    #[serde(default)]
    pub reads: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub output: PathBuf,
}

/// Runs an SA spec: master-equation trajectory CSV
/// (`step,temperature,p_s,p_C`) or Monte-Carlo final distribution CSV, plus
/// an SVG of the trajectory and the manifest.
pub fn run_sa(spec: &SaRunSpec) -> Result<RunBundle> {
    let model = load_model(&spec.model_file)?;
    let rule = UpdateRule::new(spec.rule, 1.0)?;
    let mut bundle = RunBundle::default();
    let csv_path = spec.output.with_extension("csv");
    match spec.reads {
        None => {
            let run = anneal_master(&model, &rule, &spec.schedule, &MasterOptions::default())?;
            let rows: Vec<Vec<f64>> = run
                .trajectory
                .iter()
                .map(|s| vec![s.step as f64, s.temperature, s.p_s, s.p_c])
                .collect();
            write_csv(&csv_path, &["step", "temperature", "p_s", "p_C"], &rows)?;
            bundle.push(csv_path);
            let svg = render_lines(
                "classical annealing trajectory",
                "step",
                "probability",
                AxisScale::Linear,
                &[
                    Series {
                        name: "p_s".into(),
                        points: run.trajectory.iter().map(|s| (s.step as f64, s.p_s)).collect(),
                    },
                    Series {
                        name: "p_C".into(),
                        points: run.trajectory.iter().map(|s| (s.step as f64, s.p_c)).collect(),
                    },
                ],
            );
            let svg_path = spec.output.with_extension("svg");
            write_svg(&svg_path, &svg)?;
            bundle.push(svg_path);
        }
        Some(reads) => {
            let dist = anneal_mc(&model, &rule, &spec.schedule, reads, spec.seed, None)?;
            let rows: Vec<Vec<f64>> =
                dist.p.iter().enumerate().map(|(k, &p)| vec![k as f64, p]).collect();
            write_csv(&csv_path, &["config", "probability"], &rows)?;
            bundle.push(csv_path);
        }
    }
    write_manifest(&spec.output, json!({"spec": spec, "model": model}), &mut bundle)?;
    Ok(bundle)
}

// ---------------------------------------------------------------------------
// QA runs (quantum engines).

/// Annealing-schedule selection: the built-in linear form or a CSV file with
/// columns `t_fraction,A_GHz,B_GHz`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", untagged)]
pub enum QaScheduleSpec {
    Linear {
        kind: LinearKindTag,
        #[serde(default)]
        a0_ghz: Option<f64>,
        #[serde(default)]
        b0_ghz: Option<f64>,
    },
    File {
        file: PathBuf,
    },
}

/// Tag restricting the inline schedule kind to `"linear"`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearKindTag {
    Linear,
}

impl QaScheduleSpec {
    pub fn resolve(&self, t_ns: f64) -> Result<AnnealScheduleQ> {
        match self {
            QaScheduleSpec::Linear { a0_ghz, b0_ghz, .. } => AnnealScheduleQ::linear_with(
                t_ns,
                a0_ghz.unwrap_or(crate::quantum::schedule::DEFAULT_A0_GHZ),
                b0_ghz.unwrap_or(crate::quantum::schedule::DEFAULT_B0_GHZ),
            ),
            QaScheduleSpec::File { file } => AnnealScheduleQ::from_csv(t_ns, file),
        }
    }
}

impl Default for QaScheduleSpec {
    fn default() -> Self {
        QaScheduleSpec::Linear { kind: LinearKindTag::Linear, a0_ghz: None, b0_ghz: None }
    }
}

/// Bath parameters with the alternative calibrations the run-spec schema
/// allows: temperature as `beta` (ns) or `temp_ghz`, strength as `eta_g2` or
/// a single-qubit `decoherence_ns`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BathParams {
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default, alias = "temp_GHz")]
    pub temp_ghz: Option<f64>,
    #[serde(default)]
    pub eta_g2: Option<f64>,
    #[serde(default)]
    pub decoherence_ns: Option<f64>,
    #[serde(default)]
    pub omega_c: Option<f64>,
}

impl BathParams {
    pub fn resolve(&self) -> Result<BathSpec> {
        let temp_ghz = match (self.beta, self.temp_ghz) {
            (Some(_), Some(_)) => {
                return Err(Error::Spec("give either beta or temp_ghz, not both".into()))
            }
            (Some(beta), None) => 1.0 / (GHZ_TO_ANGULAR * beta),
            (None, Some(t)) => t,
            (None, None) => crate::quantum::bath::DEFAULT_TEMP_GHZ,
        };
        let omega_c = self.omega_c.unwrap_or(crate::quantum::bath::DEFAULT_OMEGA_C);
        match (self.eta_g2, self.decoherence_ns) {
            (Some(_), Some(_)) => {
                Err(Error::Spec("give either eta_g2 or decoherence_ns, not both".into()))
            }
            (Some(e), None) => BathSpec::new(temp_ghz, e, omega_c),
            (None, Some(t2)) => BathSpec::calibrated(temp_ghz, t2, omega_c),
            (None, None) => {
                BathSpec::calibrated(temp_ghz, crate::quantum::bath::DEFAULT_DECOHERENCE_NS, omega_c)
            }
        }
    }
}

/// Quantum engine selection for the `qa` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QaEngine {
    Closed,
    Wcl,
    Scl,
}

/// JSON run spec for the `qa` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QaRunSpec {
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    #[serde(default)]
    pub schedule: QaScheduleSpec,
    #[serde(alias = "T_ns")]
    pub t_ns: f64,
    #[serde(default)]
    pub bath: BathParams,
    pub engine: QaEngine,
    /// Closed: unitary steps. WCL: generator refreshes. SCL: Strang steps.
    #[serde(default)]
    pub steps: Option<usize>,
    /// WCL coupling override.
    #[serde(default)]
    pub wcl_coupling: Option<WclCoupling>,
    /// SCL coupling override.
    #[serde(default)]
    pub scl_coupling: Option<SclCoupling>,
    /// Anneal fractions at which the trajectory CSV is sampled; default is a
    /// uniform 51-point grid.
    #[serde(default)]
    pub sample_fractions: Option<Vec<f64>>,
    pub output: PathBuf,
}

fn default_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

/// Runs a QA spec and writes the `t_ns,p_s,p_C` trajectory CSV, an SVG, and
/// the manifest.
pub fn run_qa(spec: &QaRunSpec) -> Result<RunBundle> {
    let model = load_model(&spec.model_file)?;
    let sched = spec.schedule.resolve(spec.t_ns)?;
    let bath = spec.bath.resolve()?;
    let gs = ground_space(&model)?;
    let grid = spec.sample_fractions.clone().unwrap_or_else(|| default_grid(51));

    // (t_ns, p_s, p_C) per sample.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    match spec.engine {
        QaEngine::Closed => {
            let n_steps = spec.steps.unwrap_or(8000);
            let times: Vec<f64> = grid.iter().map(|s| s * spec.t_ns).collect();
            let run = evolve_closed(&model, &sched, n_steps, &times)?;
            for sample in &run.samples {
                let (p_s, p_c) = cluster_stats(&sample.state.populations(), &gs)?;
                rows.push(vec![sample.t, p_s, p_c]);
            }
        }
        QaEngine::Wcl => {
            let opts = WclOptions {
                coupling: spec.wcl_coupling.unwrap_or(WclCoupling::SigmaZPerQubit),
                n_refresh: spec.steps.unwrap_or(300),
                end_refine: true,
                sample_fractions: grid.clone(),
            };
            let run = evolve_wcl(&model, &sched, &bath, &opts)?;
            for sample in &run.samples {
                let (p_s, p_c) = cluster_stats(&sample.rho.populations()?, &gs)?;
                rows.push(vec![sample.s * spec.t_ns, p_s, p_c]);
            }
        }
        QaEngine::Scl => {
            let n_steps = spec.steps.unwrap_or(2000);
            let opts = SclOptions {
                coupling: spec.scl_coupling.unwrap_or(SclCoupling::Collective),
                n_steps,
                n_refresh: (n_steps / 10).clamp(1, 200),
                include_lamb_shift: true,
                sample_fractions: grid.clone(),
            };
            let run = evolve_scl(&model, &sched, &bath, &opts)?;
            for sample in &run.samples {
                let (p_s, p_c) = cluster_stats(&sample.rho.populations()?, &gs)?;
                rows.push(vec![sample.s * spec.t_ns, p_s, p_c]);
            }
        }
    }

    let mut bundle = RunBundle::default();
    let csv_path = spec.output.with_extension("csv");
    write_csv(&csv_path, &["t_ns", "p_s", "p_C"], &rows)?;
    bundle.push(csv_path);
    let svg = render_lines(
        "quantum annealing trajectory",
        "t (ns)",
        "probability",
        AxisScale::Linear,
        &[
            Series { name: "p_s".into(), points: rows.iter().map(|r| (r[0], r[1])).collect() },
            Series { name: "p_C".into(), points: rows.iter().map(|r| (r[0], r[2])).collect() },
        ],
    );
    let svg_path = spec.output.with_extension("svg");
    write_svg(&svg_path, &svg)?;
    bundle.push(svg_path);
    write_manifest(&spec.output, json!({"spec": spec, "model": model}), &mut bundle)?;
    Ok(bundle)
}

// ---------------------------------------------------------------------------
// Spectrum / embeddings / perturbation / concurrence.

/// Writes the classical spectrum CSV (`energy,multiplicity`).
pub fn run_spectrum(model_file: &Option<PathBuf>, output: &Path) -> Result<RunBundle> {
    let model = load_model(model_file)?;
    let table = full_spectrum(&model)?;
    let rows: Vec<Vec<f64>> =
        table.histogram().iter().map(|&(e, m)| vec![e, m as f64]).collect();
    let mut bundle = RunBundle::default();
    let csv_path = output.with_extension("csv");
    write_csv(&csv_path, &["energy", "multiplicity"], &rows)?;
    bundle.push(csv_path);
    write_manifest(output, json!({"model": model, "op": "spectrum"}), &mut bundle)?;
    Ok(bundle)
}

/// One row of the instantaneous-spectrum export.
#[derive(Debug, Clone, Serialize)]
pub struct LevelRow {
    /// Anneal fraction `t/T`.
    pub t_fraction: f64,
    /// Lowest-`k` eigenvalues relative to the instantaneous ground energy,
    /// rad/ns.
    pub gaps: Vec<f64>,
    /// Position (0-based, within the lowest `k`) of the level whose
    /// eigenvector has the largest squared overlap with the isolated state.
    pub carrier: usize,
    /// That squared overlap.
    pub carrier_overlap: f64,
}

/// Lowest-`k` instantaneous spectrum over a grid of anneal fractions, with
/// the isolated-state carrier marked per point.
pub fn instantaneous_levels(
    model: &IsingModel,
    sched: &AnnealScheduleQ,
    grid: &[f64],
    k: usize,
) -> Result<Vec<LevelRow>> {
    let gs = ground_space(model)?;
    let iso = gs.sole_isolated()?;
    let builder = HamiltonianBuilder::new(model);
    let mut out = Vec::with_capacity(grid.len());
    for &s in grid {
        let (vals, vecs) = sorted_eigh(&builder.at(sched, s * sched.total_time_ns)?);
        let gaps: Vec<f64> = (0..k).map(|i| vals[i] - vals[0]).collect();
        let (carrier, carrier_overlap) = (0..k)
            .map(|i| (i, vecs[(iso, i)] * vecs[(iso, i)]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("k >= 1");
        out.push(LevelRow { t_fraction: s, gaps, carrier, carrier_overlap });
    }
    Ok(out)
}

/// Writes the lowest-`k` instantaneous-spectrum CSV + SVG over
/// `t/T ∈ [0.3, 1]`.
pub fn run_level_diagram(
    model_file: &Option<PathBuf>,
    t_ns: f64,
    k: usize,
    output: &Path,
) -> Result<RunBundle> {
    let model = load_model(model_file)?;
    let sched = AnnealScheduleQ::linear(t_ns);
    let grid: Vec<f64> = (0..=140).map(|i| 0.3 + 0.005 * i as f64).collect();
    let rows = instantaneous_levels(&model, &sched, &grid, k)?;
    let mut header: Vec<String> = vec!["t_fraction".into()];
    header.extend((1..=k).map(|i| format!("gap_{i}_rad_ns")));
    header.push("carrier_level".into());
    header.push("carrier_overlap".into());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.t_fraction];
            row.extend(&r.gaps);
            row.push(r.carrier as f64 + 1.0);
            row.push(r.carrier_overlap);
            row
        })
        .collect();
    let mut bundle = RunBundle::default();
    let csv_path = output.with_extension("csv");
    write_csv(&csv_path, &header_refs, &csv_rows)?;
    bundle.push(csv_path);
    let series: Vec<Series> = (0..k)
        .map(|i| Series {
            name: format!("level {}", i + 1),
            points: rows.iter().map(|r| (r.t_fraction, r.gaps[i])).collect(),
        })
        .collect();
    let svg = render_lines(
        "instantaneous low-lying spectrum",
        "t/T",
        "gap above ground (rad/ns)",
        AxisScale::Linear,
        &series,
    );
    let svg_path = output.with_extension("svg");
    write_svg(&svg_path, &svg)?;
    bundle.push(svg_path);
    write_manifest(
        output,
        json!({"model": model, "op": "levels", "t_ns": t_ns, "k": k}),
        &mut bundle,
    )?;
    Ok(bundle)
}

/// Writes the embedding enumeration JSON; returns the distinct count.
pub fn run_embeddings(model_file: &Option<PathBuf>, output: &Path) -> Result<(RunBundle, usize)> {
    let model = load_model(model_file)?;
    let set = enumerate_embeddings(&model)?;
    let mut bundle = RunBundle::default();
    let json_path = output.with_extension("json");
    if let Some(dir) = json_path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let count = set.embeddings.len();
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&json!({
            "distinct_embeddings": count,
            "raw_assignments": set.raw_assignments,
            "assignments": set.embeddings,
        }))?,
    )?;
    bundle.push(json_path);
    write_manifest(output, json!({"model": model, "op": "embeddings"}), &mut bundle)?;
    Ok((bundle, count))
}

/// Writes the projected-perturbation spectrum JSON.
pub fn run_perturb(model_file: &Option<PathBuf>, output: &Path) -> Result<RunBundle> {
    let model = load_model(model_file)?;
    let proj = ground_projector(&model)?;
    let spec = project_transverse(&model, &proj)?;
    let mut bundle = RunBundle::default();
    let json_path = output.with_extension("json");
    if let Some(dir) = json_path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&json!({
            "rank": proj.rank(),
            "multiplicities": spec.multiplicities,
            "eigenvalues": spec.eigenvalues,
            "isolated_overlap": spec.isolated_overlap,
        }))?,
    )?;
    bundle.push(json_path);
    write_manifest(output, json!({"model": model, "op": "perturb"}), &mut bundle)?;
    Ok(bundle)
}

/// JSON run spec for the `concurrence` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConcurrenceSpec {
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    #[serde(default)]
    pub schedule: QaScheduleSpec,
    #[serde(alias = "T_ns")]
    pub t_ns: f64,
    #[serde(default)]
    pub bath: BathParams,
    /// Qubit pair (0-based).
    pub pair: (usize, usize),
    #[serde(default)]
    pub grid_points: Option<usize>,
    #[serde(default)]
    pub n_refresh: Option<usize>,
    pub output: PathBuf,
}

/// Writes the `t_ns,c_ground,c_gibbs,c_trajectory` CSV + SVG for one edge.
pub fn run_concurrence(spec: &ConcurrenceSpec) -> Result<RunBundle> {
    let model = load_model(&spec.model_file)?;
    let sched = spec.schedule.resolve(spec.t_ns)?;
    let bath = spec.bath.resolve()?;
    let grid = default_grid(spec.grid_points.unwrap_or(41));
    let opts = WclOptions {
        n_refresh: spec.n_refresh.unwrap_or(300),
        ..Default::default()
    };
    let (g, th, tr) = baseline_curves(&model, &sched, &bath, spec.pair, &grid, &opts)?;
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .enumerate()
        .map(|(i, &s)| vec![s * spec.t_ns, g[i], th[i], tr[i]])
        .collect();
    let mut bundle = RunBundle::default();
    let csv_path = spec.output.with_extension("csv");
    write_csv(&csv_path, &["t_ns", "c_ground", "c_gibbs", "c_trajectory"], &rows)?;
    bundle.push(csv_path);
    let svg = render_lines(
        "two-qubit concurrence",
        "t (ns)",
        "concurrence",
        AxisScale::Linear,
        &[
            Series { name: "ground".into(), points: rows.iter().map(|r| (r[0], r[1])).collect() },
            Series { name: "Gibbs".into(), points: rows.iter().map(|r| (r[0], r[2])).collect() },
            Series {
                name: "trajectory".into(),
                points: rows.iter().map(|r| (r[0], r[3])).collect(),
            },
        ],
    );
    let svg_path = spec.output.with_extension("svg");
    write_svg(&svg_path, &svg)?;
    bundle.push(svg_path);
    write_manifest(&spec.output, json!({"spec": spec, "model": model}), &mut bundle)?;
    Ok(bundle)
}

// ---------------------------------------------------------------------------
// Gauge sweeps.

/// Sweep engine selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepEngine {
    SaMaster,
    QaWcl,
}

/// JSON run spec for the `sweep` subcommand: a gauge-averaged sweep over an
/// axis of annealing times (WCL) or step counts (SA).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(default)]
    pub model_file: Option<PathBuf>,
    pub engine: SweepEngine,
    /// Number of random gauges (the identity gauge is always included).
    #[serde(default = "default_gauge_count")]
    pub gauges: usize,
    #[serde(default)]
    pub gauge_seed: u64,
    /// WCL axis: total annealing times, ns.
    #[serde(default)]
    pub t_ns_grid: Vec<f64>,
    /// SA axis: schedule step counts.
    #[serde(default)]
    pub n_tot_grid: Vec<usize>,
    #[serde(default)]
    pub bath: BathParams,
    #[serde(default)]
    pub wcl_refresh: Option<usize>,
    #[serde(default)]
    pub rule: Option<RuleKind>,
    #[serde(default)]
    pub sa_schedule_kind: Option<crate::sa::ScheduleKind>,
    pub output: PathBuf,
}

fn default_gauge_count() -> usize {
    20
}

/// One sweep-axis point with its gauge statistics.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub axis: f64,
    pub median_p_s: f64,
    pub stats: crate::harness::stats::BoxStats,
}

/// Runs a gauge-averaged sweep and writes the box-statistics CSV, a box-plot
/// SVG, and a manifest with every per-gauge value.
pub fn run_sweep(spec: &SweepSpec) -> Result<RunBundle> {
    let model = load_model(&spec.model_file)?;
    let mut gauges = vec![Gauge::identity()];
    gauges.extend(random_gauges(model.n, spec.gauges, spec.gauge_seed));

    let mut points: Vec<SweepPoint> = Vec::new();
    let mut per_gauge = Vec::new();
    match spec.engine {
        SweepEngine::QaWcl => {
            if spec.t_ns_grid.is_empty() {
                return Err(Error::Spec("qa-wcl sweep requires t_ns_grid".into()));
            }
            let bath = spec.bath.resolve()?;
            for &t_ns in &spec.t_ns_grid {
                let opts = WclOptions {
                    n_refresh: spec.wcl_refresh.unwrap_or(300),
                    ..Default::default()
                };
                let sweep = gauge_averaged_sweep(&model, &gauges, |m| {
                    let sched = AnnealScheduleQ::linear(t_ns);
                    evolve_wcl(m, &sched, &bath, &opts)?.final_rho.populations()
                })?;
                points.push(SweepPoint {
                    axis: t_ns,
                    median_p_s: sweep.paired_box.median,
                    stats: sweep.paired_box.clone(),
                });
                per_gauge.push(json!({"axis": t_ns, "results": sweep.results}));
            }
        }
        SweepEngine::SaMaster => {
            if spec.n_tot_grid.is_empty() {
                return Err(Error::Spec("sa-master sweep requires n_tot_grid".into()));
            }
            let rule = UpdateRule::new(spec.rule.unwrap_or(RuleKind::Metropolis), 1.0)?;
            let kind = spec.sa_schedule_kind.unwrap_or(crate::sa::ScheduleKind::Exponential);
            for &n_tot in &spec.n_tot_grid {
                let schedule = TemperatureSchedule::new(kind, 10.0, 0.35, n_tot)?;
                let sweep = gauge_averaged_sweep(&model, &gauges, |m| {
                    Ok(anneal_master(m, &rule, &schedule, &MasterOptions::default())?.dist)
                })?;
                points.push(SweepPoint {
                    axis: n_tot as f64,
                    median_p_s: sweep.paired_box.median,
                    stats: sweep.paired_box.clone(),
                });
                per_gauge.push(json!({"axis": n_tot, "results": sweep.results}));
            }
        }
    }

    let mut bundle = RunBundle::default();
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            vec![
                p.axis,
                p.stats.median,
                p.stats.lower_quartile,
                p.stats.upper_quartile,
                p.stats.whisker_low,
                p.stats.whisker_high,
                p.stats.outliers.len() as f64,
            ]
        })
        .collect();
    let csv_path = spec.output.with_extension("csv");
    write_csv(
        &csv_path,
        &["axis", "median", "lower_quartile", "upper_quartile", "whisker_low", "whisker_high", "n_outliers"],
        &rows,
    )?;
    bundle.push(csv_path);
    let entries: Vec<(String, crate::harness::stats::BoxStats)> =
        points.iter().map(|p| (format!("{:.3e}", p.axis), p.stats.clone())).collect();
    let svg_path = spec.output.with_extension("svg");
    write_svg(&svg_path, &render_boxes("gauge-paired p_s", "p_s", &entries))?;
    bundle.push(svg_path);
    write_manifest(
        &spec.output,
        json!({"spec": spec, "model": model, "per_gauge": per_gauge}),
        &mut bundle,
    )?;
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sa::ScheduleKind;

    #[test]
    fn sa_spec_roundtrip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            r#"{{
              "rule": "metropolis",
              "schedule": {{"kind": "exponential", "t_i": 10.0, "t_f": 0.35, "n_tot": 200}},
              "seed": 7,
              "output": "{}"
            }}"#,
            dir.path().join("run_a/out").display()
        );
        let spec: SaRunSpec = serde_json::from_str(&text).unwrap();
        assert!(matches!(spec.schedule.kind, ScheduleKind::Exponential));
        let b1 = run_sa(&spec).unwrap();
        let csv1 = std::fs::read(&b1.written[0]).unwrap();
        // Re-running the same spec is byte-identical.
        let b2 = run_sa(&spec).unwrap();
        assert_eq!(csv1, std::fs::read(&b2.written[0]).unwrap());
        // MC variant with a seed is also deterministic.
        let mc = SaRunSpec { reads: Some(50), output: dir.path().join("mc/out"), ..spec };
        let m1 = run_sa(&mc).unwrap();
        let c1 = std::fs::read(&m1.written[0]).unwrap();
        let m2 = run_sa(&mc).unwrap();
        assert_eq!(c1, std::fs::read(&m2.written[0]).unwrap());
    }

    #[test]
    fn spectrum_csv_has_ground_row() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("spec");
        let bundle = run_spectrum(&None, &out).unwrap();
        let text = std::fs::read_to_string(&bundle.written[0]).unwrap();
        assert!(text.lines().any(|l| l == "-8,17"), "{text}");
    }

    #[test]
    fn embeddings_count_in_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let (_, count) = run_embeddings(&None, &dir.path().join("emb")).unwrap();
        assert_eq!(count, 144);
    }

    #[test]
    fn qa_spec_parses_schema_variants() {
        let text = r#"{
          "model_file": null,
          "schedule": {"kind": "linear"},
          "T_ns": 100.0,
          "bath": {"temp_GHz": 0.35, "decoherence_ns": 150.0},
          "engine": "wcl",
          "steps": 60,
          "output": "unused"
        }"#;
        let spec: QaRunSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.engine, QaEngine::Wcl);
        let bath = spec.bath.resolve().unwrap();
        assert!((bath.gamma(0.0) - 1.0 / 300.0).abs() < 1e-12);
        let sched = spec.schedule.resolve(spec.t_ns).unwrap();
        assert!((sched.a_ghz(0.0) - 10.0).abs() < 1e-12);
        // File variant parses too.
        let alt: QaRunSpec = serde_json::from_str(
            r#"{"schedule": {"file": "sched.csv"}, "t_ns": 5.0, "engine": "closed", "output": "x"}"#,
        )
        .unwrap();
        assert!(matches!(alt.schedule, QaScheduleSpec::File { .. }));
        // Conflicting bath calibrations are rejected.
        let bad = BathParams { beta: Some(1.0), temp_ghz: Some(0.35), ..Default::default() };
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn level_diagram_rows_cover_window() {
        let model = IsingModel::reference();
        let sched = AnnealScheduleQ::linear(100.0);
        let rows = instantaneous_levels(&model, &sched, &[0.3, 0.9, 1.0], 7).unwrap();
        assert_eq!(rows.len(), 3);
        // Gap closing at t = T: all 7 gaps vanish (17-fold degeneracy).
        assert!(rows[2].gaps.iter().all(|&g| g.abs() < 1e-8));
        // Mid-window: the carrier is the uppermost of the lowest seven.
        assert!(rows[1].carrier >= 5);
        assert!(rows[1].carrier_overlap > 0.5);
    }
}

//! Experiment grid runner: datasets, per-frame EC reports, plots and summary.
//!
//! Every report row is computed by calling library operations on a pruned
//! prefix graph; this module only orchestrates and serializes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clique_tree::{clique_tree_from_trace, ec_of_clique_tree};
use crate::elimination::{
    landmark_first_ordering, min_degree_ordering, natural_ordering, simulate_elimination, Ordering,
};
use crate::error::{Error, Result};
use crate::graph::{FactorGraph, VarKind};
use crate::oracle::{cholesky_count, synthesize_system};
use crate::pruning::{self, predict, Policy};
use crate::sim::{
    build_graph, initialized_landmarks, simulate_trajectory, worst_case_log, GraphParams,
    ObservationLog, SimConfig,
};
use crate::Ec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingChoice {
    #[default]
    MinDegree,
    LandmarkFirst,
    Natural,
}

impl OrderingChoice {
    pub fn order(self, graph: &FactorGraph) -> Ordering {
        match self {
            OrderingChoice::MinDegree => min_degree_ordering(graph),
            OrderingChoice::LandmarkFirst => landmark_first_ordering(graph),
            OrderingChoice::Natural => natural_ordering(graph),
        }
    }
}

impl FromStr for OrderingChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "min_degree" => Ok(OrderingChoice::MinDegree),
            "landmark_first" => Ok(OrderingChoice::LandmarkFirst),
            "natural" => Ok(OrderingChoice::Natural),
            _ => Err(format!(
                "unknown ordering `{s}` (expected min_degree, landmark_first or natural)"
            )),
        }
    }
}

impl fmt::Display for OrderingChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderingChoice::MinDegree => "min_degree",
            OrderingChoice::LandmarkFirst => "landmark_first",
            OrderingChoice::Natural => "natural",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    Simulation(SimConfig),
    WorstCase {
        n_x: usize,
        n_l: usize,
        d_x: usize,
        d_l: usize,
    },
}

impl Scenario {
    fn validate(&self) -> Result<()> {
        match self {
            Scenario::Simulation(c) => c.validate(),
            Scenario::WorstCase { n_x, d_x, d_l, .. } => {
                if *n_x == 0 || *d_x == 0 || *d_l == 0 {
                    return Err(Error::InvalidConfig(
                        "worst case needs n_x >= 1 and positive dimensions".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn graph_params(&self) -> GraphParams {
        match self {
            Scenario::Simulation(c) => c.graph_params(),
            Scenario::WorstCase { d_x, d_l, .. } => GraphParams {
                pose_dim: *d_x,
                landmark_dim: *d_l,
                min_obs_to_init: 2,
            },
        }
    }

    /// Raw observation log for one seed; the seed replaces the simulator's.
    pub fn log(&self, seed: u64, frames: Option<usize>) -> Result<ObservationLog> {
        match self {
            Scenario::Simulation(c) => {
                let mut c = c.clone();
                c.seed = seed;
                let log = simulate_trajectory(&c)?;
                Ok(match frames {
                    Some(f) if f < log.frames.len() => log.prefix(f.saturating_sub(1)),
                    _ => log,
                })
            }
            Scenario::WorstCase { n_x, n_l, .. } => {
                Ok(worst_case_log(frames.unwrap_or(*n_x), *n_l))
            }
        }
    }
}

/// Everything needed to reproduce a report byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub policies: Vec<Policy>,
    pub rates: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub ordering: OrderingChoice,
    #[serde(default = "default_true")]
    pub oracle: bool,
    /// Truncates the scenario to this many frames.
    #[serde(default)]
    pub frames: Option<usize>,
}

fn default_true() -> bool {
    true
}

impl ExperimentSpec {
    /// All policies at rates 4 and 6 on the desk-scale simulation, seeds 1-3.
    pub fn desk_scale() -> Self {
        Self {
            scenario: Scenario::Simulation(SimConfig::desk_scale(1)),
            policies: Policy::ALL.to_vec(),
            rates: vec![4, 6],
            seeds: vec![1, 2, 3],
            ordering: OrderingChoice::MinDegree,
            oracle: true,
            frames: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.policies.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one policy is required".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("at least one seed is required".into()));
        }
        if self.rates.contains(&0) {
            return Err(Error::InvalidConfig("rates must be at least 1".into()));
        }
        if self.rates.is_empty() && self.policies.iter().any(|&p| p != Policy::Full) {
            return Err(Error::InvalidConfig(
                "pruning policies need at least one rate".into(),
            ));
        }
        if self.frames == Some(0) {
            return Err(Error::InvalidConfig("frames must be at least 1".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `(policy, rate)` cells in report order; `full` always has rate 1.
    fn cells(&self) -> Vec<(Policy, usize)> {
        let mut cells = BTreeSet::new();
        for &p in &self.policies {
            if p == Policy::Full {
                cells.insert((p, 1));
            } else {
                for &r in &self.rates {
                    cells.insert((p, r));
                }
            }
        }
        cells.into_iter().collect()
    }
}

pub const KF_OVERLAY: &str = "kf-pred";
pub const DEC_OVERLAY: &str = "dec-pred";

/// One CSV line. Regular rows carry every measured column; overlay rows
/// (`kf-pred`, `dec-pred`) only carry `predicted_ec`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub frame_idx: usize,
    pub policy: String,
    pub rate: usize,
    pub seed: u64,
    pub n_vars: Option<usize>,
    pub n_factors: Option<usize>,
    pub ec_block: Option<Ec>,
    pub ec_bt: Option<Ec>,
    pub oracle_mult_count: Option<u64>,
    pub predicted_ec: Option<Ec>,
}

pub const CSV_HEADER: [&str; 10] = [
    "frame_idx",
    "policy",
    "rate",
    "seed",
    "n_vars",
    "n_factors",
    "ec_block",
    "ec_bt",
    "oracle_mult_count",
    "predicted_ec",
];

fn policy_rank(name: &str) -> usize {
    match name {
        KF_OVERLAY => 5,
        DEC_OVERLAY => 6,
        other => Policy::from_str(other)
            .map(|p| Policy::ALL.iter().position(|&q| q == p).unwrap())
            .unwrap_or(7),
    }
}

/// Measurements of one prefix graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMeasurement {
    pub n_vars: usize,
    pub n_factors: usize,
    pub ec_block: Ec,
    pub ec_bt: Ec,
    pub oracle_mult_count: Option<u64>,
}

/// EC under `ordering`, clique-tree EC with supernode amalgamation, and
/// optionally the counted multiplications of a numeric factorization.
pub fn measure_graph(
    graph: &FactorGraph,
    ordering: OrderingChoice,
    oracle_seed: Option<u64>,
) -> Result<GraphMeasurement> {
    let order = ordering.order(graph);
    let trace = simulate_elimination(graph, &order)?;
    let ec_block = trace.complexity()?;
    let ec_bt = ec_of_clique_tree(&clique_tree_from_trace(graph, &order, &trace, true))?;
    let oracle_mult_count = match oracle_seed {
        Some(seed) if graph.num_variables() > 0 => {
            let system = synthesize_system::<f64>(graph, seed)?;
            Some(cholesky_count(&system, &order)?.mult_count)
        }
        _ => None,
    };
    Ok(GraphMeasurement {
        n_vars: graph.num_variables(),
        n_factors: graph.num_factors(),
        ec_block,
        ec_bt,
        oracle_mult_count,
    })
}

fn closed_form_prediction(
    policy: Policy,
    rate: usize,
    n_x: usize,
    n_l: usize,
    params: &GraphParams,
) -> Result<Option<Ec>> {
    let (nx, nl, dx, dl, r) = (
        n_x as u64,
        n_l as u64,
        params.pose_dim as u64,
        params.landmark_dim as u64,
        rate as u64,
    );
    Ok(match policy {
        Policy::Full => Some(predict::predicted_ec_full(nx, nl, dx, dl)?),
        Policy::Keyframe => Some(predict::predicted_ec_keyframe(nx, nl, dx, dl, r)?),
        Policy::Decimate => Some(predict::predicted_ec_decimate(nx, nl, dx, dl, r)?),
        Policy::Random | Policy::TreeGreedy => None,
    })
}

/// Runs the policy grid over every frame prefix and returns rows in a
/// deterministic order (seed, policy, rate, frame).
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ReportRow>> {
    spec.validate()?;
    let params = spec.scenario.graph_params();
    let wanted = spec.cells();
    let needs_full = wanted
        .iter()
        .any(|(p, _)| matches!(p, Policy::Keyframe | Policy::Decimate));
    let mut cells = wanted.clone();
    if needs_full && !cells.contains(&(Policy::Full, 1)) {
        cells.insert(0, (Policy::Full, 1));
    }

    struct Cell {
        seed: u64,
        policy: Policy,
        rate: usize,
        log: ObservationLog,
        raw: ObservationLog,
    }
    let raw_logs: Vec<(u64, ObservationLog)> = spec
        .seeds
        .iter()
        .map(|&s| Ok((s, spec.scenario.log(s, spec.frames)?)))
        .collect::<Result<_>>()?;
    let pruned: Vec<Cell> = raw_logs
        .par_iter()
        .flat_map(|(seed, raw)| {
            cells
                .par_iter()
                .map(move |&(policy, rate)| (*seed, raw, policy, rate))
        })
        .map(|(seed, raw, policy, rate)| {
            let log = pruning::prune(raw, policy, rate, seed)?.log;
            Ok(Cell {
                seed,
                policy,
                rate,
                log,
                raw: raw.clone(),
            })
        })
        .collect::<Result<_>>()?;
    log::info!("pruned {} cells", pruned.len());

    let tasks: Vec<(usize, usize)> = pruned
        .iter()
        .enumerate()
        .flat_map(|(c, cell)| cell.raw.frames.iter().map(move |f| (c, f.index)))
        .collect();
    let measured: Vec<(usize, usize, GraphMeasurement, Option<Ec>)> = tasks
        .par_iter()
        .map(|&(c, frame)| {
            let cell = &pruned[c];
            let graph = build_graph(&cell.log.prefix(frame), &params)?;
            let oracle_seed = spec.oracle.then_some(cell.seed);
            let m = measure_graph(&graph, spec.ordering, oracle_seed)?;
            let raw_prefix = cell.raw.prefix(frame);
            let n_l = initialized_landmarks(&raw_prefix, params.min_obs_to_init).len();
            let predicted = closed_form_prediction(
                cell.policy,
                cell.rate,
                raw_prefix.frames.len(),
                n_l,
                &params,
            )?;
            Ok((c, frame, m, predicted))
        })
        .collect::<Result<_>>()?;

    let full_ec: BTreeMap<(u64, usize), Ec> = measured
        .iter()
        .filter(|(c, ..)| pruned[*c].policy == Policy::Full)
        .map(|(c, frame, m, _)| ((pruned[*c].seed, *frame), m.ec_block))
        .collect();

    let mut rows = Vec::new();
    for (c, frame, m, predicted) in measured {
        let cell = &pruned[c];
        if wanted.contains(&(cell.policy, cell.rate)) {
            rows.push(ReportRow {
                frame_idx: frame,
                policy: cell.policy.name().to_string(),
                rate: cell.rate,
                seed: cell.seed,
                n_vars: Some(m.n_vars),
                n_factors: Some(m.n_factors),
                ec_block: Some(m.ec_block),
                ec_bt: Some(m.ec_bt),
                oracle_mult_count: m.oracle_mult_count,
                predicted_ec: predicted,
            });
        }
        let overlay = match cell.policy {
            Policy::Keyframe => Some((KF_OVERLAY, 1.0 / (cell.rate as f64).powi(3))),
            Policy::Decimate => Some((DEC_OVERLAY, 9.0 / (cell.rate as f64).powi(2))),
            _ => None,
        };
        if let Some((name, scale)) = overlay {
            let full = full_ec[&(cell.seed, frame)];
            rows.push(ReportRow {
                frame_idx: frame,
                policy: name.to_string(),
                rate: cell.rate,
                seed: cell.seed,
                n_vars: None,
                n_factors: None,
                ec_block: None,
                ec_bt: None,
                oracle_mult_count: None,
                predicted_ec: Some((full as f64 * scale).round() as Ec),
            });
        }
    }
    rows.sort_by(|a, b| {
        (a.seed, policy_rank(&a.policy), a.rate, a.frame_idx).cmp(&(
            b.seed,
            policy_rank(&b.policy),
            b.rate,
            b.frame_idx,
        ))
    });
    Ok(rows)
}

pub fn write_csv(rows: &[ReportRow], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(input: impl Read) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected CSV header: {}", header.join(",")),
        });
    }
    r.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Files written by [`generate_dataset`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedFiles {
    pub log: PathBuf,
    pub graph: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: Scenario,
    pub seed: u64,
    pub frames: Option<usize>,
    pub n_variables: usize,
    pub n_factors: usize,
}

/// Writes the raw observation log, its full graph and a manifest recording
/// the scenario and seed.
pub fn generate_dataset(
    scenario: &Scenario,
    seed: u64,
    frames: Option<usize>,
    out_dir: &Path,
) -> Result<GeneratedFiles> {
    scenario.validate()?;
    fs::create_dir_all(out_dir)?;
    let log = scenario.log(seed, frames)?;
    let graph = build_graph(&log, &scenario.graph_params())?;
    let files = GeneratedFiles {
        log: out_dir.join("log.txt"),
        graph: out_dir.join("graph.txt"),
        manifest: out_dir.join("manifest.json"),
    };
    log.save(&files.log)?;
    graph.save(&files.graph)?;
    let manifest = Manifest {
        scenario: scenario.clone(),
        seed,
        frames,
        n_variables: graph.num_variables(),
        n_factors: graph.num_factors(),
    };
    fs::write(
        &files.manifest,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(files)
}

/// Mean measurements of one `(policy, rate)` across all frames and seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub policy: String,
    pub rate: usize,
    pub mean_ec_block: f64,
    pub mean_oracle_mult_count: Option<f64>,
    /// Mean over seeds of the last frame's EC.
    pub final_ec_block: f64,
}

pub fn summarize(rows: &[ReportRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, usize, String), Vec<&ReportRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.ec_block.is_some()) {
        groups
            .entry((policy_rank(&r.policy), r.rate, r.policy.clone()))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((_, rate, policy), rs)| {
            let mean = |vals: Vec<f64>| vals.iter().sum::<f64>() / vals.len() as f64;
            let oracle: Vec<f64> = rs
                .iter()
                .filter_map(|r| r.oracle_mult_count)
                .map(|v| v as f64)
                .collect();
            let mut last: BTreeMap<u64, &ReportRow> = BTreeMap::new();
            for r in &rs {
                let e = last.entry(r.seed).or_insert(r);
                if r.frame_idx > e.frame_idx {
                    *e = r;
                }
            }
            SummaryRow {
                mean_ec_block: mean(rs.iter().map(|r| r.ec_block.unwrap() as f64).collect()),
                mean_oracle_mult_count: (oracle.len() == rs.len()).then(|| mean(oracle)),
                final_ec_block: mean(last.values().map(|r| r.ec_block.unwrap() as f64).collect()),
                policy,
                rate,
            }
        })
        .collect()
}

pub fn summary_table(summary: &[SummaryRow]) -> String {
    let mut out = String::from(
        "| method | mean oracle mult count | mean EC | final EC |\n|---|---:|---:|---:|\n",
    );
    for s in summary {
        let name = if s.policy == "full" {
            s.policy.clone()
        } else {
            format!("{}{}", s.policy, s.rate)
        };
        let oracle = s
            .mean_oracle_mult_count
            .map(|v| format!("{v:.0}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "| {name} | {oracle} | {:.0} | {:.0} |",
            s.mean_ec_block, s.final_ec_block
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub label: String,
    pub dashed: bool,
    pub points: Vec<(usize, f64)>,
}

/// EC-versus-frame curves for one pruning rate and seed: measured EC of each
/// policy at that rate (plus `full`), and dashed prediction overlays.
pub fn curves_for_rate(rows: &[ReportRow], rate: usize, seed: u64) -> Vec<Curve> {
    let mut curves: BTreeMap<(usize, String), Curve> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.seed == seed) {
        let is_overlay = r.policy == KF_OVERLAY || r.policy == DEC_OVERLAY;
        let value = if is_overlay {
            r.predicted_ec
        } else {
            r.ec_block
        };
        let on_plot = r.rate == rate || (r.policy == "full" && !is_overlay);
        if let (Some(v), true) = (value, on_plot) {
            let label = if r.policy == "full" {
                r.policy.clone()
            } else {
                format!("{}{}", r.policy, r.rate)
            };
            curves
                .entry((policy_rank(&r.policy), label.clone()))
                .or_insert_with(|| Curve {
                    label,
                    dashed: is_overlay,
                    points: Vec::new(),
                })
                .points
                .push((r.frame_idx, v as f64));
        }
    }
    curves.into_values().collect()
}

const PALETTE: [&str; 7] = [
    "#222222", "#d62728", "#9467bd", "#1f77b4", "#2ca02c", "#1f77b4", "#2ca02c",
];

/// Static SVG line plot with axes, solid measured curves and dashed overlays.
pub fn render_svg(title: &str, curves: &[Curve]) -> String {
    let (w, h, left, right, top, bottom) = (720.0, 440.0, 80.0, 150.0, 40.0, 50.0);
    let plot_w = w - left - right;
    let plot_h = h - top - bottom;
    let x_max = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.0))
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    let y_max = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.1))
        .fold(0.0f64, f64::max)
        .max(1.0);
    let sx = |x: f64| left + x / x_max * plot_w;
    let sy = |y: f64| top + plot_h - y / y_max * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{title}</text>"#,
        left + plot_w / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black"><line x1="{left}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{left}" y1="{top}" x2="{left}" y2="{y0}"/></g>"#,
        y0 = top + plot_h,
        x1 = left + plot_w
    );
    for k in 0..=4 {
        let fx = x_max * k as f64 / 4.0;
        let fy = y_max * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
            sx(fx),
            top + plot_h + 18.0,
            fx
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.2e}</text>"#,
            left - 6.0,
            sy(fy) + 4.0,
            fy
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">frame</text>"#,
        left + plot_w / 2.0,
        h - 10.0
    );
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = c
            .points
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x as f64), sy(y)))
            .collect();
        let dash = if c.dashed {
            r#" stroke-dasharray="6,4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<polyline class="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            if c.dashed { "overlay" } else { "curve" },
            pts.join(" ")
        );
        let ly = top + 16.0 * i as f64 + 8.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}"{dash}/><text x="{:.1}" y="{:.1}">{}</text>"#,
            left + plot_w + 12.0,
            left + plot_w + 36.0,
            left + plot_w + 42.0,
            ly + 4.0,
            c.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotInfo {
    pub path: PathBuf,
    pub curves: usize,
    pub overlays: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportOutput {
    pub plots: Vec<PlotInfo>,
    pub summary_path: PathBuf,
    pub summary: Vec<SummaryRow>,
}

/// One SVG per pruning rate (first seed) and a markdown summary table.
pub fn write_report(rows: &[ReportRow], out_dir: &Path) -> Result<ReportOutput> {
    fs::create_dir_all(out_dir)?;
    let seed = rows
        .iter()
        .map(|r| r.seed)
        .min()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "report CSV has no rows".into(),
        })?;
    let mut rates: BTreeSet<usize> = rows
        .iter()
        .filter(|r| r.policy != "full")
        .map(|r| r.rate)
        .collect();
    if rates.is_empty() {
        rates.insert(1);
    }
    let mut plots = Vec::new();
    for rate in rates {
        let curves = curves_for_rate(rows, rate, seed);
        let path = out_dir.join(format!("ec_r{rate}.svg"));
        fs::write(
            &path,
            render_svg(
                &format!("Elimination complexity, r = {rate}, seed {seed}"),
                &curves,
            ),
        )?;
        plots.push(PlotInfo {
            path,
            curves: curves.iter().filter(|c| !c.dashed).count(),
            overlays: curves.iter().filter(|c| c.dashed).count(),
        });
    }
    let summary = summarize(rows);
    let summary_path = out_dir.join("summary.md");
    fs::write(&summary_path, summary_table(&summary))?;
    Ok(ReportOutput {
        plots,
        summary_path,
        summary,
    })
}

/// Number of pose and landmark variables in a graph.
pub fn kind_counts(graph: &FactorGraph) -> (usize, usize) {
    (
        graph.count_kind(VarKind::Pose),
        graph.count_kind(VarKind::Landmark),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        let mut c = SimConfig::desk_scale(1);
        c.n_frames = 20;
        ExperimentSpec {
            scenario: Scenario::Simulation(c),
            policies: vec![Policy::Full, Policy::Keyframe, Policy::Decimate],
            rates: vec![1, 3],
            seeds: vec![1],
            ordering: OrderingChoice::MinDegree,
            oracle: true,
            frames: None,
        }
    }

    #[test]
    fn single_frame_full() {
        let mut spec = small_spec();
        spec.policies = vec![Policy::Full];
        spec.frames = Some(1);
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        // one pose of dim 6
        assert_eq!(rows[0].ec_block, Some(216));
        assert_eq!(rows[0].n_vars, Some(1));
    }

    #[test]
    fn keyframe_rate_one_matches_full() {
        let rows = run_experiment(&small_spec()).unwrap();
        let pick = |p: &str, r: usize| -> Vec<_> {
            rows.iter()
                .filter(|x| x.policy == p && x.rate == r)
                .map(|x| {
                    (
                        x.frame_idx,
                        x.n_vars,
                        x.n_factors,
                        x.ec_block,
                        x.ec_bt,
                        x.oracle_mult_count,
                        x.predicted_ec,
                    )
                })
                .collect()
        };
        assert_eq!(pick("kf", 1), pick("full", 1));
        assert!(!pick("kf", 3).is_empty());
        assert_eq!(
            rows.iter().filter(|r| r.policy == KF_OVERLAY).count(),
            2 * 20
        );
    }

    #[test]
    fn csv_round_trip_and_header() {
        let rows = run_experiment(&small_spec()).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn spec_json_validation() {
        let spec = small_spec();
        let json = spec.to_json().unwrap();
        assert_eq!(ExperimentSpec::from_json(&json).unwrap(), spec);
        let broken = json.replace("\"landmark_region\"", "\"region_typo\"");
        assert!(matches!(
            ExperimentSpec::from_json(&broken),
            Err(Error::Json(_))
        ));
        let mut zero = spec;
        zero.rates = vec![0];
        assert!(zero.validate().is_err());
    }

    #[test]
    fn svg_has_curves_and_overlays() {
        let rows = run_experiment(&small_spec()).unwrap();
        let curves = curves_for_rate(&rows, 3, 1);
        let svg = render_svg("t", &curves);
        assert_eq!(svg.matches("class=\"curve\"").count(), 3);
        assert_eq!(svg.matches("class=\"overlay\"").count(), 2);
    }
}

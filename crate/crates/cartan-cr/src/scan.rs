//! Umbilical-point scanner over model charts, the cross-engine check, and the
//! CSV/JSON serialization of results.
//!
//! Grid evaluation is deterministic: points are visited in row-major order
//! (last coordinate fastest) and serialized in that order, so identical
//! configurations produce bit-identical output.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{cartan_invariant, GraphOptions};
use crate::implicit::{cartan_locus_iw, ImplicitOptions};
use crate::models::{Chart, ChartSurface, ModelEntry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("chart `{0}` not found in model `{1}`")]
    ChartNotFound(String, String),
    #[error("range for unknown coordinate `{0}` (chart has {1:?})")]
    UnknownCoordinate(String, Vec<String>),
    #[error("grid count {0} for `{1}` is below 2")]
    GridTooSmall(usize, String),
    #[error("engine `{0}` has no chart in model `{1}`")]
    EngineUnavailable(&'static str, String),
    #[error("no admissible grid points")]
    NoAdmissiblePoints,
    #[error("cross-check needs a graph chart and an implicit chart sharing coordinates")]
    NoCommonCoverage,
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// Engine selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineSel {
    Graph,
    Implicit,
    Both,
}

impl EngineSel {
    pub fn name(self) -> &'static str {
        match self {
            EngineSel::Graph => "graph",
            EngineSel::Implicit => "implicit",
            EngineSel::Both => "both",
        }
    }
}

/// One axis of the scan grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeSpec {
    Fixed(f64),
    Linspace { lo: f64, hi: f64, n: usize },
}

/// Scanner configuration over one chart.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub chart: String,
    /// Per-coordinate ranges; coordinates not listed are fixed at the middle
    /// of the chart's default box.
    pub ranges: Vec<(String, RangeSpec)>,
    pub engine: EngineSel,
    pub zero_threshold: f64,
    pub refine: bool,
}

impl ScanConfig {
    pub fn new(chart: impl Into<String>) -> ScanConfig {
        ScanConfig {
            chart: chart.into(),
            ranges: Vec::new(),
            engine: EngineSel::Graph,
            zero_threshold: 1e-7,
            refine: false,
        }
    }
}

/// Evaluation status of one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Ok,
    DomainSkipped,
    LeviDegenerate,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::DomainSkipped => "domain-skipped",
            Status::LeviDegenerate => "levi-degenerate",
            Status::Error => "error",
        }
    }
}

/// One evaluated sample.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    pub engine: &'static str,
    pub coords: Vec<f64>,
    pub inv: Option<(f64, f64)>,
    pub inv_abs: Option<f64>,
    /// Cancellation-normalized magnitude used for zero classification.
    pub normalized: Option<f64>,
    /// Levi factor (graph engine) or |F_w| (implicit engine).
    pub levi_or_fw_abs: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub coords: Vec<f64>,
    pub inv_abs: f64,
    pub normalized: f64,
    pub refined_coords: Option<Vec<f64>>,
    pub refined_abs: Option<f64>,
}

/// Per-engine scan summary; serialized as the JSON contract
/// {model, engine, n_ok, n_skipped, min_abs, argmin, candidates}.
#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub model: String,
    pub engine: &'static str,
    pub n_ok: usize,
    pub n_skipped: usize,
    pub min_abs: Option<f64>,
    pub argmin: Option<HashMap<String, f64>>,
    pub candidates: Vec<Candidate>,
}

/// Full scan output: records in grid order plus one summary per engine.
#[derive(Debug, Clone)]
pub struct ScanOutput {
    pub model: String,
    pub chart: String,
    pub coords: Vec<String>,
    pub records: Vec<ScanRecord>,
    pub summaries: Vec<ScanSummary>,
}

/// Point evaluation shared by the scanner, the cross-check and the CLI.
#[derive(Debug, Clone)]
pub struct PointEval {
    pub inv: Complex64,
    pub normalized: f64,
    pub levi_or_fw_abs: f64,
}

/// Evaluate a chart at scan coordinates with the engine the chart feeds.
pub fn eval_chart_point(chart: &Chart, coords: &[f64]) -> Result<PointEval, ScanError> {
    match &chart.surface {
        ChartSurface::Graph(g) => {
            let opts = GraphOptions {
                skip_domain_check: true,
                ..GraphOptions::default()
            };
            let r = cartan_invariant(g, [coords[0], coords[1], coords[2]], &opts)
                .map_err(|e| ScanError::Eval(e.to_string()))?;
            let scale = (1.0f64).max(r.pbar_value.norm().powi(3));
            Ok(PointEval {
                inv: r.j_star,
                normalized: r.j_star.norm() / scale,
                levi_or_fw_abs: r.levi_factor,
            })
        }
        ChartSurface::Implicit { surface, .. } => {
            let (z, w) = chart
                .embed_point(coords)
                .map_err(|e| ScanError::Eval(e.to_string()))?;
            let r = cartan_locus_iw(surface, z, w, &ImplicitOptions::default())
                .map_err(|e| ScanError::Eval(e.to_string()))?;
            Ok(PointEval {
                inv: r.i_w,
                normalized: r.normalized_magnitude(),
                levi_or_fw_abs: r.f_w.norm(),
            })
        }
    }
}

fn classify_error(chart: &Chart, coords: &[f64], message: &str) -> Status {
    let _ = (chart, coords);
    if message.contains("Levi-degenerate") {
        Status::LeviDegenerate
    } else {
        Status::Error
    }
}

struct Axis {
    values: Vec<f64>,
}

fn build_axes(chart: &Chart, cfg: &ScanConfig) -> Result<Vec<Axis>, ScanError> {
    for (name, _) in &cfg.ranges {
        if !chart.coords.contains(name) {
            return Err(ScanError::UnknownCoordinate(
                name.clone(),
                chart.coords.clone(),
            ));
        }
    }
    chart
        .coords
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let spec = cfg.ranges.iter().find(|(n, _)| n == name).map(|(_, s)| *s);
            let values = match spec {
                Some(RangeSpec::Fixed(v)) => vec![v],
                Some(RangeSpec::Linspace { lo, hi, n }) => {
                    if n < 2 {
                        return Err(ScanError::GridTooSmall(n, name.clone()));
                    }
                    (0..n)
                        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
                        .collect()
                }
                None => {
                    let (lo, hi) = chart.default_ranges[i];
                    vec![0.5 * (lo + hi)]
                }
            };
            Ok(Axis { values })
        })
        .collect()
}

/// Scan a grid over one chart (or the paired graph/implicit charts when the
/// engine selector is `Both`).
pub fn scan_grid(entry: &ModelEntry, cfg: &ScanConfig) -> Result<ScanOutput, ScanError> {
    let named = entry
        .chart(&cfg.chart)
        .ok_or_else(|| ScanError::ChartNotFound(cfg.chart.clone(), entry.id.clone()))?;

    // resolve which charts feed which engines
    let mut work: Vec<&Chart> = Vec::new();
    match cfg.engine {
        EngineSel::Graph | EngineSel::Implicit => {
            let want_graph = cfg.engine == EngineSel::Graph;
            let chart = if named.is_graph() == want_graph {
                Some(named)
            } else {
                // fall back to the model's chart for that engine, provided it
                // shares the named chart's coordinates
                let other = if want_graph {
                    entry.graph_chart()
                } else {
                    entry.implicit_chart()
                };
                other.filter(|c| c.coords == named.coords)
            };
            work.push(chart.ok_or(ScanError::EngineUnavailable(
                cfg.engine.name(),
                entry.id.clone(),
            ))?);
        }
        EngineSel::Both => {
            let graph = entry
                .graph_chart()
                .filter(|c| c.coords == named.coords)
                .ok_or(ScanError::EngineUnavailable("graph", entry.id.clone()))?;
            let implicit = entry
                .implicit_chart()
                .filter(|c| c.coords == named.coords)
                .ok_or(ScanError::EngineUnavailable("implicit", entry.id.clone()))?;
            work.push(graph);
            work.push(implicit);
        }
    }

    let axes = build_axes(named, cfg)?;
    let total: usize = axes.iter().map(|a| a.values.len()).product();

    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for chart in work {
        let engine = if chart.is_graph() { "graph" } else { "implicit" };
        let mut n_ok = 0usize;
        let mut n_skipped = 0usize;
        let mut min_abs: Option<(f64, Vec<f64>)> = None;
        let mut candidates = Vec::new();

        for flat in 0..total {
            let mut idx = flat;
            let mut coords = vec![0.0; axes.len()];
            for (k, axis) in axes.iter().enumerate().rev() {
                coords[k] = axis.values[idx % axis.values.len()];
                idx /= axis.values.len();
            }
            let admissible = chart
                .admissible(&coords)
                .map_err(|e| ScanError::Eval(e.to_string()))?;
            if !admissible {
                n_skipped += 1;
                records.push(ScanRecord {
                    engine,
                    coords,
                    inv: None,
                    inv_abs: None,
                    normalized: None,
                    levi_or_fw_abs: None,
                    status: Status::DomainSkipped,
                });
                continue;
            }
            match eval_chart_point(chart, &coords) {
                Ok(eval) => {
                    n_ok += 1;
                    let abs = eval.inv.norm();
                    if min_abs.as_ref().is_none_or(|(m, _)| abs < *m) {
                        min_abs = Some((abs, coords.clone()));
                    }
                    if eval.normalized < cfg.zero_threshold {
                        candidates.push(Candidate {
                            coords: coords.clone(),
                            inv_abs: abs,
                            normalized: eval.normalized,
                            refined_coords: None,
                            refined_abs: None,
                        });
                    }
                    records.push(ScanRecord {
                        engine,
                        coords,
                        inv: Some((eval.inv.re, eval.inv.im)),
                        inv_abs: Some(abs),
                        normalized: Some(eval.normalized),
                        levi_or_fw_abs: Some(eval.levi_or_fw_abs),
                        status: Status::Ok,
                    });
                }
                Err(ScanError::Eval(message)) => {
                    let status = classify_error(chart, &coords, &message);
                    records.push(ScanRecord {
                        engine,
                        coords,
                        inv: None,
                        inv_abs: None,
                        normalized: None,
                        levi_or_fw_abs: None,
                        status,
                    });
                }
                Err(other) => return Err(other),
            }
        }
        if n_ok == 0 {
            return Err(ScanError::NoAdmissiblePoints);
        }
        if cfg.refine {
            let steps: Vec<f64> = axes
                .iter()
                .map(|a| {
                    if a.values.len() > 1 {
                        (a.values[1] - a.values[0]).abs() * 0.5
                    } else {
                        1e-3
                    }
                })
                .collect();
            for cand in &mut candidates {
                let (coords, abs) = refine_candidate(chart, &cand.coords, &steps);
                cand.refined_coords = Some(coords);
                cand.refined_abs = Some(abs.min(cand.inv_abs));
            }
        }
        summaries.push(ScanSummary {
            model: entry.id.clone(),
            engine,
            n_ok,
            n_skipped,
            min_abs: min_abs.as_ref().map(|(m, _)| *m),
            argmin: min_abs.as_ref().map(|(_, coords)| {
                named
                    .coords
                    .iter()
                    .cloned()
                    .zip(coords.iter().copied())
                    .collect()
            }),
            candidates,
        });
    }

    Ok(ScanOutput {
        model: entry.id.clone(),
        chart: named.name.clone(),
        coords: named.coords.clone(),
        records,
        summaries,
    })
}

/// Coordinate-descent polish of a candidate: 20 rounds of shrinking steps on
/// |invariant|^2, never leaving the chart domain. The returned magnitude is
/// no larger than the starting one.
fn refine_candidate(chart: &Chart, start: &[f64], steps: &[f64]) -> (Vec<f64>, f64) {
    let value = |coords: &[f64]| -> Option<f64> {
        if !chart.admissible(coords).unwrap_or(false) {
            return None;
        }
        eval_chart_point(chart, coords).ok().map(|e| e.inv.norm())
    };
    let mut best = start.to_vec();
    let mut best_val = match value(&best) {
        Some(v) => v,
        None => return (best, f64::INFINITY),
    };
    let mut step: Vec<f64> = steps.to_vec();
    for _ in 0..20 {
        let mut improved = false;
        for k in 0..best.len() {
            for sign in [-1.0, 1.0] {
                let mut trial = best.clone();
                trial[k] += sign * step[k];
                if let Some(v) = value(&trial) {
                    if v < best_val {
                        best_val = v;
                        best = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            for s in &mut step {
                *s *= 0.5;
            }
        }
    }
    (best, best_val)
}

// ---- cross-engine check -------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct CrossSample {
    pub coords: Vec<f64>,
    pub graph_abs: f64,
    pub graph_normalized: f64,
    pub implicit_abs: f64,
    pub implicit_normalized: f64,
    pub graph_zero: bool,
    pub implicit_zero: bool,
}

/// Zero-locus classification agreement between the two engines.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckReport {
    pub model: String,
    pub n_samples: usize,
    pub n_agree: usize,
    pub both_zero: usize,
    pub both_nonzero: usize,
    pub disagreements: Vec<CrossSample>,
}

impl CrossCheckReport {
    pub fn agreement_rate(&self) -> f64 {
        if self.n_samples == 0 {
            0.0
        } else {
            self.n_agree as f64 / self.n_samples as f64
        }
    }
}

impl fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "cross-check `{}`: {}/{} agree ({:.1}%), {} both-zero, {} both-nonzero",
            self.model,
            self.n_agree,
            self.n_samples,
            100.0 * self.agreement_rate(),
            self.both_zero,
            self.both_nonzero
        )?;
        for d in &self.disagreements {
            writeln!(
                f,
                "  disagreement at {:?}: graph |J| = {:.3e} (norm {:.3e}), implicit |I| = {:.3e} (norm {:.3e})",
                d.coords, d.graph_abs, d.graph_normalized, d.implicit_abs, d.implicit_normalized
            )?;
        }
        Ok(())
    }
}

/// Sample both engines of a `both`-kind model at common random admissible
/// points and compare zero classifications.
pub fn cross_check(
    entry: &ModelEntry,
    samples: usize,
    seed: u64,
    threshold: f64,
) -> Result<CrossCheckReport, ScanError> {
    let graph = entry.graph_chart().ok_or(ScanError::NoCommonCoverage)?;
    let implicit = entry.implicit_chart().ok_or(ScanError::NoCommonCoverage)?;
    if graph.coords != implicit.coords {
        return Err(ScanError::NoCommonCoverage);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CrossCheckReport {
        model: entry.id.clone(),
        n_samples: 0,
        n_agree: 0,
        both_zero: 0,
        both_nonzero: 0,
        disagreements: Vec::new(),
    };
    let mut attempts = 0usize;
    while report.n_samples < samples && attempts < samples * 500 {
        attempts += 1;
        let coords: Vec<f64> = graph
            .default_ranges
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect();
        let ok = graph.admissible(&coords).unwrap_or(false)
            && implicit.admissible(&coords).unwrap_or(false);
        if !ok {
            continue;
        }
        let (Ok(g), Ok(i)) = (
            eval_chart_point(graph, &coords),
            eval_chart_point(implicit, &coords),
        ) else {
            continue;
        };
        let graph_zero = g.normalized < threshold;
        let implicit_zero = i.normalized < threshold;
        report.n_samples += 1;
        if graph_zero == implicit_zero {
            report.n_agree += 1;
            if graph_zero {
                report.both_zero += 1;
            } else {
                report.both_nonzero += 1;
            }
        } else {
            report.disagreements.push(CrossSample {
                coords,
                graph_abs: g.inv.norm(),
                graph_normalized: g.normalized,
                implicit_abs: i.inv.norm(),
                implicit_normalized: i.normalized,
                graph_zero,
                implicit_zero,
            });
        }
    }
    if report.n_samples == 0 {
        return Err(ScanError::NoCommonCoverage);
    }
    Ok(report)
}

// ---- serialization ------------------------------------------------------------

/// CSV rows in grid order. Header:
/// `model,chart,engine,<coord columns>,inv_re,inv_im,inv_abs,levi_or_fw_abs,status`.
pub fn write_csv<W: Write>(out: &mut W, scan: &ScanOutput) -> std::io::Result<()> {
    write!(out, "model,chart,engine")?;
    for c in &scan.coords {
        write!(out, ",{c}")?;
    }
    writeln!(out, ",inv_re,inv_im,inv_abs,levi_or_fw_abs,status")?;
    for r in &scan.records {
        write!(out, "{},{},{}", scan.model, scan.chart, r.engine)?;
        for v in &r.coords {
            write!(out, ",{v}")?;
        }
        match r.inv {
            Some((re, im)) => write!(out, ",{re},{im}")?,
            None => write!(out, ",,")?,
        }
        match r.inv_abs {
            Some(a) => write!(out, ",{a}")?,
            None => write!(out, ",")?,
        }
        match r.levi_or_fw_abs {
            Some(l) => write!(out, ",{l}")?,
            None => write!(out, ",")?,
        }
        writeln!(out, ",{}", r.status.as_str())?;
    }
    Ok(())
}

/// JSON summary: one object for a single engine, an array for `both`.
pub fn write_summary_json<W: Write>(out: &mut W, scan: &ScanOutput) -> std::io::Result<()> {
    if scan.summaries.len() == 1 {
        serde_json::to_writer_pretty(&mut *out, &scan.summaries[0])?;
    } else {
        serde_json::to_writer_pretty(&mut *out, &scan.summaries)?;
    }
    writeln!(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_model;

    fn tube() -> ModelEntry {
        build_model("hyperbolic-tube", &[("eps".to_string(), 0.5)].into()).unwrap()
    }

    fn tube_cfg(n: usize) -> ScanConfig {
        let mut cfg = ScanConfig::new("v-graph");
        cfg.ranges = vec![
            (
                "x".to_string(),
                RangeSpec::Linspace { lo: 0.5, hi: 3.0, n },
            ),
            (
                "y".to_string(),
                RangeSpec::Linspace { lo: -1.4, hi: 1.4, n },
            ),
            ("u".to_string(), RangeSpec::Fixed(0.0)),
        ];
        cfg
    }

    #[test]
    fn tube_scan_reports_no_candidates() {
        let entry = tube();
        let out = scan_grid(&entry, &tube_cfg(12)).unwrap();
        let s = &out.summaries[0];
        assert!(s.n_ok > 0);
        assert!(s.n_skipped > 0, "grid should clip at the domain boundary");
        assert!(s.candidates.is_empty());
        assert!(s.min_abs.unwrap() > 1e-3);
        // domain safety: no ok record outside the predicate
        let chart = entry.chart("v-graph").unwrap();
        for r in &out.records {
            if r.status == Status::Ok {
                assert!(chart.admissible(&r.coords).unwrap());
            }
        }
    }

    #[test]
    fn heisenberg_scan_flags_everything_umbilical() {
        let entry = build_model("heisenberg", &HashMap::new()).unwrap();
        let mut cfg = ScanConfig::new("graph");
        cfg.ranges = vec![
            (
                "x".to_string(),
                RangeSpec::Linspace { lo: -1.0, hi: 1.0, n: 5 },
            ),
            (
                "y".to_string(),
                RangeSpec::Linspace { lo: -1.0, hi: 1.0, n: 5 },
            ),
        ];
        let out = scan_grid(&entry, &cfg).unwrap();
        let s = &out.summaries[0];
        assert_eq!(s.candidates.len(), s.n_ok);
        assert!(s.min_abs.unwrap() < 1e-9);
    }

    #[test]
    fn both_engines_share_the_grid() {
        let entry = tube();
        let mut cfg = tube_cfg(6);
        cfg.engine = EngineSel::Both;
        let out = scan_grid(&entry, &cfg).unwrap();
        assert_eq!(out.summaries.len(), 2);
        assert_eq!(out.summaries[0].engine, "graph");
        assert_eq!(out.summaries[1].engine, "implicit");
        assert!(out.summaries.iter().all(|s| s.candidates.is_empty()));
    }

    #[test]
    fn csv_output_is_deterministic() {
        let entry = tube();
        let cfg = tube_cfg(5);
        let mut a = Vec::new();
        write_csv(&mut a, &scan_grid(&entry, &cfg).unwrap()).unwrap();
        let mut b = Vec::new();
        write_csv(&mut b, &scan_grid(&entry, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with(
            "model,chart,engine,x,y,u,inv_re,inv_im,inv_abs,levi_or_fw_abs,status"
        ));
    }

    #[test]
    fn summary_json_schema() {
        let entry = tube();
        let out = scan_grid(&entry, &tube_cfg(4)).unwrap();
        let mut buf = Vec::new();
        write_summary_json(&mut buf, &out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        for key in ["model", "engine", "n_ok", "n_skipped", "min_abs", "argmin", "candidates"] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
    }

    #[test]
    fn refine_never_increases_magnitude() {
        let entry = build_model("heisenberg", &HashMap::new()).unwrap();
        let mut cfg = ScanConfig::new("graph");
        cfg.ranges = vec![(
            "x".to_string(),
            RangeSpec::Linspace { lo: 0.1, hi: 0.9, n: 3 },
        )];
        cfg.refine = true;
        let out = scan_grid(&entry, &cfg).unwrap();
        for cand in &out.summaries[0].candidates {
            assert!(cand.refined_abs.unwrap() <= cand.inv_abs + 1e-18);
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let entry = tube();
        let mut cfg = ScanConfig::new("no-such-chart");
        assert!(matches!(
            scan_grid(&entry, &cfg),
            Err(ScanError::ChartNotFound(..))
        ));
        cfg = ScanConfig::new("v-graph");
        cfg.ranges = vec![(
            "q".to_string(),
            RangeSpec::Linspace { lo: 0.0, hi: 1.0, n: 4 },
        )];
        assert!(matches!(
            scan_grid(&entry, &cfg),
            Err(ScanError::UnknownCoordinate(..))
        ));
        cfg = ScanConfig::new("v-graph");
        cfg.ranges = vec![(
            "x".to_string(),
            RangeSpec::Linspace { lo: 0.0, hi: 1.0, n: 1 },
        )];
        assert!(matches!(
            scan_grid(&entry, &cfg),
            Err(ScanError::GridTooSmall(1, _))
        ));
        // grid entirely outside the domain
        cfg = ScanConfig::new("v-graph");
        cfg.ranges = vec![
            (
                "x".to_string(),
                RangeSpec::Linspace { lo: -3.0, hi: -2.0, n: 3 },
            ),
            ("y".to_string(), RangeSpec::Fixed(0.0)),
        ];
        assert!(matches!(
            scan_grid(&entry, &cfg),
            Err(ScanError::NoAdmissiblePoints)
        ));
    }

    #[test]
    fn cross_check_tube_agrees_nonzero() {
        let entry = tube();
        let report = cross_check(&entry, 40, 0, 1e-7).unwrap();
        assert_eq!(report.n_samples, 40);
        assert_eq!(report.n_agree, 40);
        assert_eq!(report.both_nonzero, 40);
        assert!(report.disagreements.is_empty());
    }

    #[test]
    fn cross_check_requires_common_coverage() {
        let entry = build_model("heisenberg", &HashMap::new()).unwrap();
        assert!(matches!(
            cross_check(&entry, 10, 0, 1e-7),
            Err(ScanError::NoCommonCoverage)
        ));
    }
}

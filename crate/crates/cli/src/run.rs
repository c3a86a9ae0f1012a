//! Executes a spec: runs tasks in order, writes `report.json` and per-curve
//! CSVs, and renders the summary table.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use ifns_core::analysis::{Analysis, ConditionEstimate, Evidence, Instance, Status};
use ifns_core::ifn::check_axioms;
use serde::Serialize;
use serde_json::Value;

use crate::config::{AnalysisSpec, Side, SpecEcho, Task};

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool { name: "ifns", version: env!("CARGO_PKG_VERSION") };

#[derive(Debug, Clone, Serialize)]
pub struct TaskResult {
    pub task: String,
    /// `holds-at-horizon`, `fails-at-horizon`, `inconclusive`, `pass`, `fail`.
    pub status: String,
    /// Only for theorem tasks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistent: Option<bool>,
    pub detail: String,
    /// CSV files written for this task, relative to the output directory.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveFile>,
    pub result: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveFile {
    pub file: String,
    pub condition: String,
    pub rows: usize,
    /// `λ` values without a single valid window; they contribute no rows.
    pub lambdas_without_data: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub tasks: usize,
    pub theorems: usize,
    pub inconsistent: Vec<String>,
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub tasks: Vec<TaskTiming>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskTiming {
    pub task: String,
    pub seconds: f64,
}

/// Full run output. `timing` is serialized last and is the only
/// run-dependent block.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: Tool,
    pub spec: SpecEcho,
    pub tasks: Vec<TaskResult>,
    pub summary: Summary,
    pub timing: Timing,
}

struct Curve {
    file: String,
    estimate: ConditionEstimate,
}

fn slug(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if c.is_ascii_alphanumeric() || c == '.' {
            out.push(c);
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn curve_file(index: usize, task: &Task, condition: &str) -> String {
    match task {
        Task::Theorem(_) => format!("{:02}-{}-{}.csv", index + 1, slug(&task.to_string()), slug(condition)),
        _ => format!("{:02}-{}.csv", index + 1, slug(&task.to_string())),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).context("serializing result")
}

fn sides(side: Option<Side>) -> Vec<Side> {
    match side {
        Some(s) => vec![s],
        None => vec![Side::P, Side::Q],
    }
}

fn run_task(index: usize, task: &Task, spec: &AnalysisSpec, analysis: &Analysis) -> Result<(TaskResult, Vec<Curve>)> {
    let mut curves = Vec::new();
    let mut consistent = None;
    let (status, detail, result) = match *task {
        Task::Axioms => {
            let report = check_axioms(&spec.pair, spec.axiom_samples, spec.seed);
            let failed: Vec<&str> = report.failed().map(|c| c.axiom.label()).collect();
            let status = if failed.is_empty() { "pass" } else { "fail" };
            let detail = if failed.is_empty() {
                format!("{} axioms and derived checks on {} samples", report.axioms.len(), report.sample_count)
            } else {
                format!("failed: {}", failed.join(", "))
            };
            (status.to_string(), detail, to_value(&report)?)
        }
        Task::Convergence | Task::Cauchy => {
            let v = if *task == Task::Convergence { analysis.convergence(None)? } else { analysis.cauchy(None)? };
            let detail = match (v.status, v.n0_found, &v.witness) {
                (Status::Holds, Some(n0), _) => format!("n0 = {n0}"),
                (_, _, Some(w)) => format!("worst at ({}, {}) t = {}: mu = {:.6}, nu = {:.6}", w.m, w.n, w.t, w.mu, w.nu),
                _ => String::new(),
            };
            (v.status.label().to_string(), detail, to_value(&v)?)
        }
        Task::QBounded => {
            let q = analysis.q_bounded()?;
            let detail = format!(
                "t = {}: inf mu = {:.6}, sup nu = {:.6}",
                q.t_values.last().unwrap(),
                q.inf_mu.last().unwrap(),
                q.sup_nu.last().unwrap()
            );
            (q.status.label().to_string(), detail, to_value(&q)?)
        }
        Task::Summability(ab) => {
            let v = analysis.summability(ab, None)?;
            let detail = match v.n0_found {
                Some(n0) => format!("n0 = {n0}"),
                None => v.witness.as_ref().map(|w| format!("worst mean at ({}, {})", w.m, w.n)).unwrap_or_default(),
            };
            (v.status.label().to_string(), detail, to_value(&v)?)
        }
        Task::Oscillation(sense) => {
            let est = analysis.slow_oscillation(sense, None)?;
            let out = condition_summary(&est);
            curves.push(Curve { file: curve_file(index, task, &est.condition), estimate: est.clone() });
            (est.status.label().to_string(), out, to_value(&est)?)
        }
        Task::Tauber(variant) => {
            let est = analysis.tauberian(variant, None)?;
            let out = condition_summary(&est);
            curves.push(Curve { file: curve_file(index, task, &est.condition), estimate: est.clone() });
            (est.status.label().to_string(), out, to_value(&est)?)
        }
        Task::Sva(side) => {
            let mut results = serde_json::Map::new();
            let mut statuses = Vec::new();
            let mut parts = Vec::new();
            for s in sides(side) {
                let est = if s == Side::P { analysis.sva_p()? } else { analysis.sva_q()? };
                parts.push(format!("{}: {}", side_name(s), if est.in_sva() { "in" } else { "out" }));
                statuses.push(est.status);
                results.insert(side_name(s).to_string(), to_value(&est)?);
            }
            (Status::all(statuses).label().to_string(), parts.join(", "), Value::Object(results))
        }
        Task::Regvar(side) => {
            let mut results = serde_json::Map::new();
            let mut parts = Vec::new();
            let mut all_positive = true;
            for s in sides(side) {
                let est = if s == Side::P { analysis.regvar_p()? } else { analysis.regvar_q()? };
                let positive = est.iter().all(|e| e.positive_index);
                all_positive &= positive;
                let rhos: Vec<String> = est.iter().map(|e| format!("{:.4}", e.rho_hat)).collect();
                parts.push(format!(
                    "{}: rho = [{}]{}",
                    side_name(s),
                    rhos.join(", "),
                    if positive { "" } else { " (not positive index)" }
                ));
                results.insert(side_name(s).to_string(), to_value(&est)?);
            }
            let status = if all_positive { Status::Holds } else { Status::Fails };
            (status.label().to_string(), parts.join("; "), Value::Object(results))
        }
        Task::Theorem(theorem) => {
            let report = analysis.theorem(theorem)?;
            for check in report.hypotheses.iter().chain(&report.conclusion) {
                if let Evidence::Condition(est) = &check.evidence {
                    curves.push(Curve { file: curve_file(index, task, &check.claim), estimate: est.clone() });
                }
            }
            consistent = Some(report.consistent);
            let hyps: Vec<String> =
                report.hypotheses.iter().map(|h| format!("{} {}", h.claim, short(h.status))).collect();
            let detail = format!(
                "hypotheses [{}] => conclusion {}",
                hyps.join(", "),
                report.conclusion_status.label()
            );
            let status = if report.consistent { "consistent" } else { "INCONSISTENT" };
            (status.to_string(), detail, to_value(&report)?)
        }
    };
    let curve_meta = curves
        .iter()
        .map(|c| CurveFile {
            file: c.file.clone(),
            condition: c.estimate.condition.clone(),
            rows: c.estimate.inner.len(),
            lambdas_without_data: c.estimate.lambdas.iter().filter(|l| !l.has_data).map(|l| l.lambda).collect(),
        })
        .collect();
    Ok((TaskResult { task: task.to_string(), status, consistent, detail, curves: curve_meta, result }, curves))
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::P => "p",
        Side::Q => "q",
    }
}

fn short(s: Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Fails => "fails",
        Status::Inconclusive => "inconclusive",
    }
}

fn condition_summary(est: &ConditionEstimate) -> String {
    let worst = est
        .outer
        .iter()
        .map(|o| (o.t, o.mu, o.nu))
        .fold(None::<(f64, f64, f64)>, |acc, x| match acc {
            Some(a) if a.1 <= x.1 => Some(a),
            _ => Some(x),
        });
    let skipped = if est.skipped_windows > 0 { format!(", {} windows skipped", est.skipped_windows) } else { String::new() };
    match worst {
        Some((t, mu, nu)) => format!("outer at t = {t}: mu = {mu:.6}, nu = {nu:.6}{skipped}"),
        None => format!("no windows{skipped}"),
    }
}

fn write_csv(path: &Path, est: &ConditionEstimate) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["lambda", "t", "inner_mu", "inner_nu"])?;
    for row in &est.inner {
        w.write_record([row.lambda.to_string(), row.t.to_string(), row.mu.to_string(), row.nu.to_string()])?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Runs all tasks; returns the report and the paths written.
pub fn run(spec: &AnalysisSpec) -> Result<(Report, Vec<PathBuf>)> {
    let started = Instant::now();
    let instance = Instance {
        seq: spec.sequence.clone(),
        p: spec.p.clone(),
        q: spec.q.clone(),
        pair: spec.pair.clone(),
        limit: spec.limit_vector.clone(),
    };
    let analysis = Analysis::new(instance, spec.grids.clone(), spec.seed)?;
    let mut results = Vec::new();
    let mut all_curves = Vec::new();
    let mut timings = Vec::new();
    for (i, task) in spec.tasks.iter().enumerate() {
        let t0 = Instant::now();
        let (result, curves) = run_task(i, task, spec, &analysis).with_context(|| format!("task {} `{task}`", i + 1))?;
        timings.push(TaskTiming { task: task.to_string(), seconds: t0.elapsed().as_secs_f64() });
        results.push(result);
        all_curves.extend(curves);
    }
    let inconsistent: Vec<String> =
        results.iter().filter(|r| r.consistent == Some(false)).map(|r| r.task.clone()).collect();
    let summary = Summary {
        tasks: results.len(),
        theorems: results.iter().filter(|r| r.consistent.is_some()).count(),
        consistent: inconsistent.is_empty(),
        inconsistent,
    };

    let mut written = Vec::new();
    fs::create_dir_all(&spec.out_dir).with_context(|| format!("creating {}", spec.out_dir.display()))?;
    if spec.format.csv() {
        for c in &all_curves {
            let path = spec.out_dir.join(&c.file);
            write_csv(&path, &c.estimate)?;
            written.push(path);
        }
    }
    let report = Report {
        tool: TOOL,
        spec: spec.echo(),
        tasks: results,
        summary,
        timing: Timing { total_seconds: started.elapsed().as_secs_f64(), tasks: timings },
    };
    if spec.format.json() {
        let path = spec.out_dir.join("report.json");
        let mut file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(&mut file, &report)?;
        file.write_all(b"\n")?;
        written.push(path);
    }
    Ok((report, written))
}

/// Fixed-width summary table.
pub fn summary_table(report: &Report) -> String {
    let (m, n) = report.spec.grids.horizon;
    let mut out = format!(
        "sequence {} | horizon ({m}, {n}), tail from {} | seed {}\n",
        report.spec.sequence, report.spec.grids.tail_start, report.spec.seed
    );
    let width = report.tasks.iter().map(|t| t.task.len()).max().unwrap_or(4).max(4);
    let swidth = report.tasks.iter().map(|t| t.status.len()).max().unwrap_or(6).max(6);
    out.push_str(&format!("{:>2}  {:<width$}  {:<swidth$}  detail\n", "#", "task", "status"));
    for (i, t) in report.tasks.iter().enumerate() {
        out.push_str(&format!("{:>2}  {:<width$}  {:<swidth$}  {}\n", i + 1, t.task, t.status, t.detail));
    }
    if report.summary.theorems > 0 {
        if report.summary.consistent {
            out.push_str(&format!("all {} theorem checks consistent\n", report.summary.theorems));
        } else {
            out.push_str(&format!("INCONSISTENT: {}\n", report.summary.inconsistent.join(", ")));
        }
    }
    out
}

/// Drops the run-dependent `timing` block from a serialized report.
pub fn without_timing(report_json: &str) -> Result<Value> {
    let mut v: Value = serde_json::from_str(report_json)?;
    if let Value::Object(map) = &mut v {
        map.remove("timing");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("summability(1,1)"), "summability-1-1");
        assert_eq!(slug("tauber(double-gt1)"), "tauber-double-gt1");
        assert_eq!(slug("slowly-oscillating(1,0)"), "slowly-oscillating-1-0");
    }
}

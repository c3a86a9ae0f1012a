//! Analysis specs: a TOML document naming a sequence, weights, a pair, grids
//! and an ordered task list.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use ifns_core::analysis::{Grids, Sense, Theorem};
use ifns_core::means::{AlphaBeta, Variant};
use ifns_core::sequences::{sequence_from_text, DoubleSequence, WeightSequence};
use ifns_core::{standard_pair, IFNormPair, NormChoice, Vector};
use serde::{Deserialize, Serialize};

pub const DEFAULT_AXIOM_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

/// Which weight sequence a weight-class task looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    P,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Task {
    Axioms,
    Convergence,
    Cauchy,
    QBounded,
    Oscillation(Sense),
    Sva(Option<Side>),
    Regvar(Option<Side>),
    Tauber(Variant),
    Summability(AlphaBeta),
    Theorem(Theorem),
}

impl Task {
    pub fn needs_limit(self) -> bool {
        match self {
            Task::Convergence | Task::Summability(_) => true,
            Task::Theorem(t) => t.needs_limit(),
            _ => false,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &Option<Side>| match s {
            None => "",
            Some(Side::P) => "(p)",
            Some(Side::Q) => "(q)",
        };
        match self {
            Task::Axioms => f.write_str("axioms"),
            Task::Convergence => f.write_str("convergence"),
            Task::Cauchy => f.write_str("cauchy"),
            Task::QBounded => f.write_str("qbounded"),
            Task::Oscillation(s) => write!(f, "oscillation{s}"),
            Task::Sva(s) => write!(f, "sva{}", side(s)),
            Task::Regvar(s) => write!(f, "regvar{}", side(s)),
            Task::Tauber(v) => write!(f, "tauber({v})"),
            Task::Summability(ab) => write!(f, "summability{ab}"),
            Task::Theorem(t) => write!(f, "theorem({t})"),
        }
    }
}

impl FromStr for Task {
    type Err = anyhow::Error;

    /// `name` or `name(arg)`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, arg) = match text.find('(') {
            Some(open) => {
                let Some(inner) = text[open + 1..].strip_suffix(')') else {
                    bail!("malformed task `{text}`: expected name(argument)");
                };
                (text[..open].trim(), Some(inner.trim()))
            }
            None => (text, None),
        };
        let side = |arg: Option<&str>| -> Result<Option<Side>> {
            match arg {
                None => Ok(None),
                Some("p") => Ok(Some(Side::P)),
                Some("q") => Ok(Some(Side::Q)),
                Some(other) => bail!("`{name}` takes p or q, got `{other}`"),
            }
        };
        let required = || arg.ok_or_else(|| anyhow!("task `{name}` needs an argument: {name}(...)"));
        let no_arg = |task: Task| match arg {
            None => Ok(task),
            Some(a) => bail!("task `{name}` takes no argument, got `{a}`"),
        };
        match name {
            "axioms" => no_arg(Task::Axioms),
            "convergence" => no_arg(Task::Convergence),
            "cauchy" => no_arg(Task::Cauchy),
            "qbounded" | "q-bounded" => no_arg(Task::QBounded),
            "oscillation" => Ok(Task::Oscillation(required()?.parse()?)),
            "sva" => Ok(Task::Sva(side(arg)?)),
            "regvar" => Ok(Task::Regvar(side(arg)?)),
            "tauber" => Ok(Task::Tauber(required()?.parse()?)),
            "summability" => Ok(Task::Summability(required()?.parse()?)),
            "theorem" => Ok(Task::Theorem(required()?.parse()?)),
            other => bail!("unknown task `{other}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LimitLiteral {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl LimitLiteral {
    fn to_vector(&self) -> Result<Vector> {
        Ok(match self {
            LimitLiteral::Scalar(x) => Vector::scalar(*x)?,
            LimitLiteral::Vector(v) => Vector::new(v.clone())?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    sequence: String,
    limit: Option<LimitLiteral>,
    seed: Option<u64>,
    tasks: Vec<String>,
    #[serde(default)]
    weights: RawWeights,
    #[serde(default)]
    pair: RawPair,
    #[serde(default)]
    grids: RawGrids,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    axioms: RawAxioms,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    #[serde(default = "ones")]
    p: String,
    #[serde(default = "ones")]
    q: String,
}

fn ones() -> String {
    "ones".into()
}

impl Default for RawWeights {
    fn default() -> Self {
        RawWeights { p: ones(), q: ones() }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    kind: Option<String>,
    norm: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrids {
    horizon: Option<Vec<usize>>,
    tail_start: Option<usize>,
    t: Option<Vec<f64>>,
    eps: Option<Vec<f64>>,
    lambda_gt1: Option<Vec<f64>>,
    lambda_lt1: Option<Vec<f64>>,
    weight_horizon: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxioms {
    samples: Option<usize>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub horizon: Option<(usize, usize)>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

/// A validated spec, ready to run.
#[derive(Debug, Clone)]
pub struct AnalysisSpec {
    pub sequence_text: String,
    pub sequence: DoubleSequence,
    pub p_text: String,
    pub q_text: String,
    pub p: WeightSequence,
    pub q: WeightSequence,
    pub norm: NormChoice,
    pub pair: IFNormPair,
    pub limit: Option<LimitLiteral>,
    pub limit_vector: Option<Vector>,
    pub tasks: Vec<Task>,
    pub grids: Grids,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: Format,
    pub axiom_samples: usize,
}

/// JSON echo of the resolved spec.
#[derive(Debug, Clone, Serialize)]
pub struct SpecEcho {
    pub sequence: String,
    pub dim: usize,
    pub weights: WeightsEcho,
    pub pair: PairEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitLiteral>,
    pub tasks: Vec<String>,
    pub grids: Grids,
    pub seed: u64,
    pub format: Format,
    pub axiom_samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightsEcho {
    pub p: String,
    pub q: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEcho {
    pub kind: &'static str,
    pub norm: &'static str,
}

impl AnalysisSpec {
    pub fn echo(&self) -> SpecEcho {
        SpecEcho {
            sequence: self.sequence_text.clone(),
            dim: self.sequence.dim(),
            weights: WeightsEcho { p: self.p_text.clone(), q: self.q_text.clone() },
            pair: PairEcho { kind: "standard", norm: self.norm.name() },
            limit: self.limit.clone(),
            tasks: self.tasks.iter().map(|t| t.to_string()).collect(),
            grids: self.grids.clone(),
            seed: self.seed,
            format: self.format,
            axiom_samples: self.axiom_samples,
        }
    }
}

/// 1-based line of the first `key = ...` assignment.
fn line_of(source: &str, key: &str) -> Option<usize> {
    source.lines().position(|l| {
        l.trim_start().strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

fn at_field(source: &str, key: &str, field: &str) -> String {
    match line_of(source, key) {
        Some(line) => format!("line {line}, field `{field}`"),
        None => format!("field `{field}`"),
    }
}

/// Parses `M` or `M,N`.
pub fn parse_horizon(text: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<usize>().with_context(|| format!("invalid horizon `{text}`: expected M or M,N"));
    match parts.as_slice() {
        [m] => Ok((num(m)?, num(m)?)),
        [m, n] => Ok((num(m)?, num(n)?)),
        _ => bail!("invalid horizon `{text}`: expected M or M,N"),
    }
}

pub fn parse_spec(path: &Path, overrides: &Overrides) -> Result<AnalysisSpec> {
    let source = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_spec_str(&source, overrides).with_context(|| format!("in {}", path.display()))
}

pub fn parse_spec_str(source: &str, overrides: &Overrides) -> Result<AnalysisSpec> {
    let raw: RawSpec = toml::from_str(source).map_err(|e| anyhow!("{}", e.to_string().trim_end()))?;

    let sequence = sequence_from_text(&raw.sequence)
        .map_err(|e| anyhow!("{}: {e}", at_field(source, "sequence", "sequence")))?;
    let weights = |text: &str, key: &str, var: &str| {
        WeightSequence::from_text(text, var).map_err(|e| anyhow!("{}: {e}", at_field(source, key, &format!("weights.{key}"))))
    };
    let p = weights(&raw.weights.p, "p", "j")?;
    let q = weights(&raw.weights.q, "q", "k")?;

    let dim = sequence.dim();
    let kind = raw.pair.kind.as_deref().unwrap_or("standard");
    if kind != "standard" {
        bail!("{}: unknown pair `{kind}`; only `standard` is available", at_field(source, "kind", "pair.kind"));
    }
    let norm = match raw.pair.norm.as_deref() {
        Some(name) => name.parse::<NormChoice>().map_err(|e| anyhow!("{}: {e}", at_field(source, "norm", "pair.norm")))?,
        None if dim == 1 => NormChoice::Absolute,
        None => NormChoice::Euclidean,
    };
    let pair = standard_pair(norm, dim).map_err(|e| anyhow!("{}: {e}", at_field(source, "norm", "pair.norm")))?;

    let limit_vector = match &raw.limit {
        Some(l) => {
            let v = l.to_vector().map_err(|e| anyhow!("{}: {e}", at_field(source, "limit", "limit")))?;
            if v.dim() != dim {
                bail!("{}: limit has {} components, the sequence has {dim}", at_field(source, "limit", "limit"), v.dim());
            }
            Some(v)
        }
        None => None,
    };

    if raw.tasks.is_empty() {
        bail!("{}: at least one task is required", at_field(source, "tasks", "tasks"));
    }
    let mut tasks = Vec::with_capacity(raw.tasks.len());
    for (i, text) in raw.tasks.iter().enumerate() {
        let task: Task = text.parse().map_err(|e| anyhow!("{}: {e}", at_field(source, "tasks", &format!("tasks[{i}]"))))?;
        if task.needs_limit() && limit_vector.is_none() {
            bail!("missing field: limit (required by task `{task}`)");
        }
        tasks.push(task);
    }

    let mut grids = Grids::default();
    let g = &raw.grids;
    if let Some(h) = &g.horizon {
        grids = match h.as_slice() {
            [m] => grids.with_horizon(*m, *m),
            [m, n] => grids.with_horizon(*m, *n),
            _ => bail!("{}: horizon takes one or two entries", at_field(source, "horizon", "grids.horizon")),
        };
    }
    if let Some(s) = g.tail_start {
        grids.tail_start = s;
    }
    if let Some(t) = &g.t {
        grids.t_grid = t.clone();
    }
    if let Some(e) = &g.eps {
        grids.eps_grid = e.clone();
    }
    if let Some(l) = &g.lambda_gt1 {
        grids.lambda_gt1 = l.clone();
    }
    if let Some(l) = &g.lambda_lt1 {
        grids.lambda_lt1 = l.clone();
    }
    if let Some(w) = g.weight_horizon {
        grids.weight_horizon = w;
    }
    if let Some((m, n)) = overrides.horizon {
        grids = grids.with_horizon(m, n);
    }
    grids.validate().map_err(|e| anyhow!("grids: {e}"))?;

    let axiom_samples = raw.axioms.samples.unwrap_or(DEFAULT_AXIOM_SAMPLES);
    if axiom_samples == 0 {
        bail!("{}: must be positive", at_field(source, "samples", "axioms.samples"));
    }

    Ok(AnalysisSpec {
        sequence_text: raw.sequence.trim().to_string(),
        sequence,
        p_text: raw.weights.p.trim().to_string(),
        q_text: raw.weights.q.trim().to_string(),
        p,
        q,
        norm,
        pair,
        limit: raw.limit,
        limit_vector,
        tasks,
        grids,
        seed: overrides.seed.or(raw.seed).unwrap_or(0),
        out_dir: overrides.out.clone().or(raw.output.dir).unwrap_or_else(|| PathBuf::from("ifns-out")),
        format: overrides.format.or(raw.output.format).unwrap_or(Format::Both),
        axiom_samples,
    })
}

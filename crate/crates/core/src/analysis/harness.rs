use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use once_cell::sync::OnceCell;
use serde::Serialize;

use super::convergence::{cauchy_on, lattice_convergence, q_bounded_of, QBoundedEstimate};
use super::oscillation::{slow_oscillation_on, Sense};
use super::tauberian::tauberian_on;
use super::weights::{regvar_index_estimate, sva_plus_estimate, RegVarEstimate, SvaEstimate};
use super::{ConditionEstimate, Grids, Status, Verdict};
use crate::ifn::IFNormPair;
use crate::means::{mean_table, AlphaBeta, MeanTable, Variant};
use crate::sequences::{
    build_prefix_tables, cumulative, difference_transform, Axis, CumulativeWeights, DoubleSequence, Lattice,
    PrefixTable, Scaling, WeightSequence,
};
use crate::{Error, Result, Vector};

pub use super::convergence::PAIR_CAP as CAUCHY_PAIR_CAP;

/// A concrete instance the estimators and theorems are evaluated on.
#[derive(Debug, Clone)]
pub struct Instance {
    pub seq: DoubleSequence,
    pub p: WeightSequence,
    pub q: WeightSequence,
    pub pair: IFNormPair,
    pub limit: Option<Vector>,
}

/// Which weight sequence a weight-class claim refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Side {
    P,
    Q,
}

/// A statement about the instance that an estimator can check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Claim {
    Convergent,
    QBounded,
    Summable(AlphaBeta),
    SlowOscillation(Sense),
    Tauberian(Variant),
    Sva(Side),
    RegularlyVarying(Side),
    /// `{i (x_i - x_{i-1})}` along the axis is q-bounded.
    IndexDifferences(Axis),
    /// `{(P_i/p_i)(x_i - x_{i-1})}` along the axis is q-bounded.
    WeightedDifferences(Axis),
}

impl Claim {
    fn label(self) -> String {
        let axis = |a: Axis| if a == Axis::M { "m" } else { "n" };
        match self {
            Claim::Convergent => "convergent".into(),
            Claim::QBounded => "q-bounded".into(),
            Claim::Summable(ab) => format!("summable{ab}"),
            Claim::SlowOscillation(s) => format!("slowly-oscillating{s}"),
            Claim::Tauberian(v) => format!("tauberian-condition {v}"),
            Claim::Sva(Side::P) => "p in SVA+".into(),
            Claim::Sva(Side::Q) => "q in SVA+".into(),
            Claim::RegularlyVarying(Side::P) => "P regularly varying, positive index".into(),
            Claim::RegularlyVarying(Side::Q) => "Q regularly varying, positive index".into(),
            Claim::IndexDifferences(a) => format!("index-scaled {}-differences q-bounded", axis(a)),
            Claim::WeightedDifferences(a) => format!("weight-scaled {}-differences q-bounded", axis(a)),
        }
    }

    fn needs_limit(self) -> bool {
        matches!(self, Claim::Convergent | Claim::Summable(_))
    }
}

/// Theorems checkable by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    Regularity11,
    Regularity10,
    TauberianGt1,
    TauberianLt1,
    TauberianStripGt1,
    TauberianStripLt1,
    SlowOscillation11,
    OscillationCombination,
    SlowOscillationSplit,
    SlowOscillation10,
    IndexDifferences11,
    IndexDifferences10,
    IndexDifferencesOscillation,
    WeightedDifferences10,
    WeightedDifferences01,
    WeightedDifferences11,
    WeightedDifferencesStrip,
}

enum Conclusion {
    Implies(Claim),
    Iff(Claim, Claim),
}

struct Spec {
    statement: &'static str,
    hypotheses: Vec<Claim>,
    conclusion: Conclusion,
    /// Hypotheses are evaluated on `t_grid ∪ t_grid / t_split`.
    t_split: f64,
}

impl Theorem {
    pub const ALL: [Theorem; 17] = [
        Theorem::Regularity11,
        Theorem::Regularity10,
        Theorem::TauberianGt1,
        Theorem::TauberianLt1,
        Theorem::TauberianStripGt1,
        Theorem::TauberianStripLt1,
        Theorem::SlowOscillation11,
        Theorem::OscillationCombination,
        Theorem::SlowOscillationSplit,
        Theorem::SlowOscillation10,
        Theorem::IndexDifferences11,
        Theorem::IndexDifferences10,
        Theorem::IndexDifferencesOscillation,
        Theorem::WeightedDifferences10,
        Theorem::WeightedDifferences01,
        Theorem::WeightedDifferences11,
        Theorem::WeightedDifferencesStrip,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Regularity11 => "regularity-11",
            Theorem::Regularity10 => "regularity-10",
            Theorem::TauberianGt1 => "tauberian-gt1",
            Theorem::TauberianLt1 => "tauberian-lt1",
            Theorem::TauberianStripGt1 => "tauberian-strip-gt1",
            Theorem::TauberianStripLt1 => "tauberian-strip-lt1",
            Theorem::SlowOscillation11 => "slow-oscillation-11",
            Theorem::OscillationCombination => "oscillation-combination",
            Theorem::SlowOscillationSplit => "slow-oscillation-split",
            Theorem::SlowOscillation10 => "slow-oscillation-10",
            Theorem::IndexDifferences11 => "index-differences-11",
            Theorem::IndexDifferences10 => "index-differences-10",
            Theorem::IndexDifferencesOscillation => "index-differences-oscillation",
            Theorem::WeightedDifferences10 => "weighted-differences-10",
            Theorem::WeightedDifferences01 => "weighted-differences-01",
            Theorem::WeightedDifferences11 => "weighted-differences-11",
            Theorem::WeightedDifferencesStrip => "weighted-differences-strip",
        }
    }

    fn spec(self) -> Spec {
        use Claim::*;
        let sva2 = [Sva(Side::P), Sva(Side::Q)];
        let so = |s| SlowOscillation(s);
        let (statement, hypotheses, conclusion, t_split): (&str, Vec<Claim>, Conclusion, f64) = match self {
            Theorem::Regularity11 => (
                "q-bounded and convergent to x => (1,1)-summable to x",
                vec![QBounded, Convergent],
                Conclusion::Implies(Summable(AlphaBeta::OneOne)),
                3.0,
            ),
            Theorem::Regularity10 => (
                "q-bounded and convergent to x => (1,0)-summable to x",
                vec![QBounded, Convergent],
                Conclusion::Implies(Summable(AlphaBeta::OneZero)),
                3.0,
            ),
            Theorem::TauberianGt1 => (
                "p, q in SVA+ and (1,1)-summable to x => (convergent to x <=> lambda>1 rectangle condition)",
                [&sva2[..], &[Summable(AlphaBeta::OneOne)]].concat(),
                Conclusion::Iff(Convergent, Tauberian(Variant::DoubleGt1)),
                1.0,
            ),
            Theorem::TauberianLt1 => (
                "p, q in SVA+ and (1,1)-summable to x => (convergent to x <=> lambda<1 rectangle condition)",
                [&sva2[..], &[Summable(AlphaBeta::OneOne)]].concat(),
                Conclusion::Iff(Convergent, Tauberian(Variant::DoubleLt1)),
                1.0,
            ),
            Theorem::TauberianStripGt1 => (
                "p in SVA+ and (1,0)-summable to x => (convergent to x <=> lambda>1 strip condition)",
                vec![Sva(Side::P), Summable(AlphaBeta::OneZero)],
                Conclusion::Iff(Convergent, Tauberian(Variant::Strip10Gt1)),
                1.0,
            ),
            Theorem::TauberianStripLt1 => (
                "p in SVA+ and (1,0)-summable to x => (convergent to x <=> lambda<1 strip condition)",
                vec![Sva(Side::P), Summable(AlphaBeta::OneZero)],
                Conclusion::Iff(Convergent, Tauberian(Variant::Strip10Lt1)),
                1.0,
            ),
            Theorem::SlowOscillation11 => (
                "p, q in SVA+, slowly oscillating (1,1) and (1,1)-summable to x => convergent to x",
                [&sva2[..], &[so(Sense::OneOne), Summable(AlphaBeta::OneOne)]].concat(),
                Conclusion::Implies(Convergent),
                1.0,
            ),
            Theorem::OscillationCombination => (
                "slowly oscillating (1,0) and (0,1) => slowly oscillating (1,1)",
                vec![so(Sense::OneZero), so(Sense::ZeroOne)],
                Conclusion::Implies(so(Sense::OneOne)),
                2.0,
            ),
            Theorem::SlowOscillationSplit => (
                "p, q in SVA+, slowly oscillating (1,0) and (0,1), (1,1)-summable to x => convergent to x",
                [&sva2[..], &[so(Sense::OneZero), so(Sense::ZeroOne), Summable(AlphaBeta::OneOne)]].concat(),
                Conclusion::Implies(Convergent),
                2.0,
            ),
            Theorem::SlowOscillation10 => (
                "p in SVA+, slowly oscillating (1,0) and (1,0)-summable to x => convergent to x",
                vec![Sva(Side::P), so(Sense::OneZero), Summable(AlphaBeta::OneZero)],
                Conclusion::Implies(Convergent),
                1.0,
            ),
            Theorem::IndexDifferences11 => (
                "p, q in SVA+, (1,1)-summable to x, m- and n-differences times the index q-bounded => convergent to x",
                [
                    &sva2[..],
                    &[Summable(AlphaBeta::OneOne), IndexDifferences(Axis::M), IndexDifferences(Axis::N)],
                ]
                .concat(),
                Conclusion::Implies(Convergent),
                1.0,
            ),
            Theorem::IndexDifferences10 => (
                "p in SVA+, (1,0)-summable to x, m-differences times m q-bounded => convergent to x",
                vec![Sva(Side::P), Summable(AlphaBeta::OneZero), IndexDifferences(Axis::M)],
                Conclusion::Implies(Convergent),
                1.0,
            ),
            Theorem::IndexDifferencesOscillation => (
                "m-differences times m q-bounded => slowly oscillating (1,0)",
                vec![IndexDifferences(Axis::M)],
                Conclusion::Implies(so(Sense::OneZero)),
                1.0,
            ),
            Theorem::WeightedDifferences10 => (
                "P regularly varying of positive index, (P_m/p_m)-scaled m-differences q-bounded => slowly oscillating (1,0)",
                vec![RegularlyVarying(Side::P), WeightedDifferences(Axis::M)],
                Conclusion::Implies(so(Sense::OneZero)),
                1.0,
            ),
            Theorem::WeightedDifferences01 => (
                "Q regularly varying of positive index, (Q_n/q_n)-scaled n-differences q-bounded => slowly oscillating (0,1)",
                vec![RegularlyVarying(Side::Q), WeightedDifferences(Axis::N)],
                Conclusion::Implies(so(Sense::ZeroOne)),
                1.0,
            ),
            Theorem::WeightedDifferences11 => (
                "P, Q regularly varying of positive index, (1,1)-summable to x, both weight-scaled differences q-bounded => convergent to x",
                vec![
                    RegularlyVarying(Side::P),
                    RegularlyVarying(Side::Q),
                    Summable(AlphaBeta::OneOne),
                    WeightedDifferences(Axis::M),
                    WeightedDifferences(Axis::N),
                ],
                Conclusion::Implies(Convergent),
                1.0,
            ),
            Theorem::WeightedDifferencesStrip => (
                "P regularly varying of positive index, (1,0)-summable to x, (P_m/p_m)-scaled m-differences q-bounded => convergent to x",
                vec![RegularlyVarying(Side::P), Summable(AlphaBeta::OneZero), WeightedDifferences(Axis::M)],
                Conclusion::Implies(Convergent),
                1.0,
            ),
        };
        Spec { statement, hypotheses, conclusion, t_split }
    }

    pub fn statement(self) -> &'static str {
        self.spec().statement
    }

    fn claims(self) -> Vec<Claim> {
        let spec = self.spec();
        let mut out = spec.hypotheses;
        match spec.conclusion {
            Conclusion::Implies(c) => out.push(c),
            Conclusion::Iff(a, b) => out.extend([a, b]),
        }
        out
    }

    pub fn needs_limit(self) -> bool {
        self.claims().iter().any(|c| c.needs_limit())
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s.trim())
            .ok_or_else(|| Error::UnknownTheorem(s.trim().to_string()))
    }
}

/// Estimator output backing one claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Evidence {
    Verdict(Verdict),
    Condition(ConditionEstimate),
    QBounded(QBoundedEstimate),
    Sva(SvaEstimate),
    RegularVariation(Vec<RegVarEstimate>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub claim: String,
    pub status: Status,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub statement: String,
    /// `"implication"` or `"equivalence"`.
    pub kind: &'static str,
    pub hypotheses: Vec<TheoremCheck>,
    pub hypotheses_hold: bool,
    /// One check for an implication, two for an equivalence.
    pub conclusion: Vec<TheoremCheck>,
    pub conclusion_status: Status,
    /// `hypotheses hold => conclusion holds`; an inconclusive conclusion
    /// under holding hypotheses counts as inconsistent.
    pub consistent: bool,
    pub hypothesis_t_split: f64,
    pub horizon: (usize, usize),
    pub tail_start: usize,
}

/// Estimators over one instance with shared, lazily built tables.
pub struct Analysis {
    instance: Instance,
    grids: Grids,
    seed: u64,
    p: OnceCell<CumulativeWeights>,
    q: OnceCell<CumulativeWeights>,
    prefix: OnceCell<PrefixTable>,
    means: [OnceCell<MeanTable>; 3],
    checks: Mutex<HashMap<(Claim, Vec<u64>), TheoremCheck>>,
}

impl fmt::Debug for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Analysis").field("instance", &self.instance).field("grids", &self.grids).finish_non_exhaustive()
    }
}

fn ab_index(ab: AlphaBeta) -> usize {
    match ab {
        AlphaBeta::OneOne => 0,
        AlphaBeta::OneZero => 1,
        AlphaBeta::ZeroOne => 2,
    }
}

impl Analysis {
    pub fn new(instance: Instance, grids: Grids, seed: u64) -> Result<Self> {
        grids.validate()?;
        let dim = instance.seq.dim();
        if instance.pair.dim() != dim {
            return Err(Error::DimensionMismatch { expected: instance.pair.dim(), actual: dim });
        }
        if let Some(l) = &instance.limit {
            if l.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: l.dim() });
            }
        }
        Ok(Analysis {
            instance,
            grids,
            seed,
            p: OnceCell::new(),
            q: OnceCell::new(),
            prefix: OnceCell::new(),
            means: Default::default(),
            checks: Mutex::new(HashMap::new()),
        })
    }

    pub fn grids(&self) -> &Grids {
        &self.grids
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    fn limit(&self) -> Result<&Vector> {
        self.instance.limit.as_ref().ok_or_else(|| Error::InvalidParameter("missing field: limit".into()))
    }

    /// `P_m` up to the larger of the lattice and weight horizons.
    pub fn cumulative_p(&self) -> Result<&CumulativeWeights> {
        let h = self.grids.horizon.0.max(self.grids.weight_horizon);
        self.p.get_or_try_init(|| cumulative(&self.instance.p, h))
    }

    pub fn cumulative_q(&self) -> Result<&CumulativeWeights> {
        let h = self.grids.horizon.1.max(self.grids.weight_horizon);
        self.q.get_or_try_init(|| cumulative(&self.instance.q, h))
    }

    pub fn prefix(&self) -> Result<&PrefixTable> {
        self.prefix.get_or_try_init(|| {
            let (m, n) = self.grids.horizon;
            build_prefix_tables(&self.instance.seq, &self.instance.p, &self.instance.q, m, n)
        })
    }

    pub fn lattice(&self) -> Result<&Lattice> {
        Ok(self.prefix()?.values())
    }

    pub fn mean_table(&self, ab: AlphaBeta) -> Result<&MeanTable> {
        self.means[ab_index(ab)]
            .get_or_try_init(|| mean_table(self.prefix()?, self.cumulative_p()?, self.cumulative_q()?, ab))
    }

    /// Convergence to the instance limit on `t_grid` (default grid if `None`).
    /// Like every whole-lattice scan here, it reads the cached lattice, so the
    /// sequence is evaluated once per analysis.
    pub fn convergence(&self, t_grid: Option<&[f64]>) -> Result<Verdict> {
        let t = t_grid.unwrap_or(&self.grids.t_grid);
        lattice_convergence(self.lattice()?, &self.instance.pair, self.limit()?, &self.grids, t)
    }

    pub fn cauchy(&self, t_grid: Option<&[f64]>) -> Result<Verdict> {
        let t = t_grid.unwrap_or(&self.grids.t_grid);
        let lattice = self.lattice()?;
        cauchy_on(
            |m, n, out| {
                out.copy_from_slice(lattice.at(m, n));
                Ok(())
            },
            Some(lattice),
            lattice.dim(),
            &self.instance.pair,
            &self.grids,
            t,
            self.seed,
        )
    }

    pub fn q_bounded(&self) -> Result<QBoundedEstimate> {
        let lattice = self.lattice()?;
        q_bounded_of(
            |m, n, out| {
                out.copy_from_slice(lattice.at(m, n));
                Ok(())
            },
            lattice.dim(),
            &self.instance.pair,
            &self.grids,
        )
    }

    /// q-boundedness of a difference transform of the sequence.
    pub fn q_bounded_differences(&self, axis: Axis, scaling: Scaling) -> Result<QBoundedEstimate> {
        let d = difference_transform(&self.instance.seq, axis, scaling)?;
        q_bounded_of(|m, n, out| d.eval_into(m, n, out), d.dim(), &self.instance.pair, &self.grids)
    }

    pub fn summability(&self, ab: AlphaBeta, t_grid: Option<&[f64]>) -> Result<Verdict> {
        let t = t_grid.unwrap_or(&self.grids.t_grid);
        lattice_convergence(self.mean_table(ab)?.values(), &self.instance.pair, self.limit()?, &self.grids, t)
    }

    pub fn slow_oscillation(&self, sense: Sense, t_grid: Option<&[f64]>) -> Result<ConditionEstimate> {
        let t = t_grid.unwrap_or(&self.grids.t_grid);
        slow_oscillation_on(self.lattice()?, &self.instance.pair, sense, &self.grids, t)
    }

    pub fn tauberian(&self, variant: Variant, t_grid: Option<&[f64]>) -> Result<ConditionEstimate> {
        let t = t_grid.unwrap_or(&self.grids.t_grid);
        tauberian_on(
            self.prefix()?,
            self.cumulative_p()?,
            self.cumulative_q()?,
            &self.instance.pair,
            variant,
            &self.grids,
            t,
        )
    }

    pub fn sva_p(&self) -> Result<SvaEstimate> {
        sva_plus_estimate(self.cumulative_p()?, &self.grids)
    }

    pub fn sva_q(&self) -> Result<SvaEstimate> {
        sva_plus_estimate(self.cumulative_q()?, &self.grids)
    }

    /// Index estimates at every `λ > 1` of the grid.
    pub fn regvar_p(&self) -> Result<Vec<RegVarEstimate>> {
        let p = self.cumulative_p()?;
        self.grids.lambda_gt1.iter().map(|&l| regvar_index_estimate(p, l, &self.grids)).collect()
    }

    pub fn regvar_q(&self) -> Result<Vec<RegVarEstimate>> {
        let q = self.cumulative_q()?;
        self.grids.lambda_gt1.iter().map(|&l| regvar_index_estimate(q, l, &self.grids)).collect()
    }

    fn weights_of(&self, side: Side) -> &WeightSequence {
        match side {
            Side::P => &self.instance.p,
            Side::Q => &self.instance.q,
        }
    }

    fn check(&self, claim: Claim, t: &[f64]) -> Result<TheoremCheck> {
        let key = (claim, t.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        if let Some(hit) = self.checks.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let t = Some(t);
        let evidence = match claim {
            Claim::Convergent => Evidence::Verdict(self.convergence(t)?),
            Claim::QBounded => Evidence::QBounded(self.q_bounded()?),
            Claim::Summable(ab) => Evidence::Verdict(self.summability(ab, t)?),
            Claim::SlowOscillation(s) => Evidence::Condition(self.slow_oscillation(s, t)?),
            Claim::Tauberian(v) => Evidence::Condition(self.tauberian(v, t)?),
            Claim::Sva(Side::P) => Evidence::Sva(self.sva_p()?),
            Claim::Sva(Side::Q) => Evidence::Sva(self.sva_q()?),
            Claim::RegularlyVarying(Side::P) => Evidence::RegularVariation(self.regvar_p()?),
            Claim::RegularlyVarying(Side::Q) => Evidence::RegularVariation(self.regvar_q()?),
            Claim::IndexDifferences(a) => Evidence::QBounded(self.q_bounded_differences(a, Scaling::Index)?),
            Claim::WeightedDifferences(a) => {
                let w = self.weights_of(if a == Axis::M { Side::P } else { Side::Q }).clone();
                Evidence::QBounded(self.q_bounded_differences(a, Scaling::Weighted(w))?)
            }
        };
        let status = match &evidence {
            Evidence::Verdict(v) => v.status,
            Evidence::Condition(c) => c.status,
            Evidence::QBounded(q) => q.status,
            Evidence::Sva(s) => s.status,
            Evidence::RegularVariation(r) => {
                if r.iter().all(|e| e.positive_index) {
                    Status::Holds
                } else {
                    Status::Fails
                }
            }
        };
        let check = TheoremCheck { claim: claim.label(), status, evidence };
        self.checks.lock().unwrap().insert(key.clone(), check.clone());
        Ok(check)
    }

    /// Evaluates hypotheses (on the split `t` grid) and the conclusion.
    pub fn theorem(&self, theorem: Theorem) -> Result<TheoremReport> {
        if theorem.needs_limit() {
            self.limit()?;
        }
        let spec = theorem.spec();
        let t_hyp = self.grids.t_grid_with_split(spec.t_split);
        let hypotheses = spec.hypotheses.iter().map(|&c| self.check(c, &t_hyp)).collect::<Result<Vec<_>>>()?;
        let hypotheses_hold = hypotheses.iter().all(|h| h.status.holds());
        let t = self.grids.t_grid.clone();
        let (kind, conclusion, conclusion_status) = match spec.conclusion {
            Conclusion::Implies(c) => {
                let check = self.check(c, &t)?;
                let status = check.status;
                ("implication", vec![check], status)
            }
            Conclusion::Iff(a, b) => {
                let (ca, cb) = (self.check(a, &t)?, self.check(b, &t)?);
                let status = match (ca.status, cb.status) {
                    (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
                    (x, y) if x == y => Status::Holds,
                    _ => Status::Fails,
                };
                ("equivalence", vec![ca, cb], status)
            }
        };
        Ok(TheoremReport {
            theorem: theorem.id().to_string(),
            statement: spec.statement.to_string(),
            kind,
            hypotheses,
            hypotheses_hold,
            conclusion,
            conclusion_status,
            consistent: !hypotheses_hold || conclusion_status.holds(),
            hypothesis_t_split: spec.t_split,
            horizon: self.grids.horizon,
            tail_start: self.grids.tail_start,
        })
    }
}

/// Runs one theorem by id on an instance (Cauchy sampling seed 0).
pub fn theorem_harness(id: &str, instance: Instance, grids: &Grids) -> Result<TheoremReport> {
    let theorem: Theorem = id.parse()?;
    Analysis::new(instance, grids.clone(), 0)?.theorem(theorem)
}

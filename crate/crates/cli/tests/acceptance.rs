//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ifns_core::analysis::{
    regvar_index_estimate, sva_plus_estimate, Analysis, Grids, Instance, Status, Theorem,
};
use ifns_core::ifn::{check_axioms, perturbed, Axiom};
use ifns_core::means::{all_mean_tables, dilate, rectangle_mean, verify_decomposition, AlphaBeta, Variant};
use ifns_core::sequences::{build_prefix_tables, compile_expression, cumulative, DoubleSequence, WeightSequence};
use ifns_core::{standard_pair, IFNormPair, NormChoice, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

// ---------------------------------------------------------------- oracles

#[derive(Clone)]
struct Grid {
    n: usize,
    dim: usize,
    data: Arc<Vec<f64>>,
}

impl Grid {
    fn random(rng: &mut ChaCha8Rng, m: usize, n: usize, dim: usize, integer: bool) -> Self {
        let data = (0..(m + 1) * (n + 1) * dim)
            .map(|_| if integer { rng.random_range(-50i32..=50) as f64 } else { rng.random_range(-10.0..10.0) })
            .collect();
        Grid { n, dim, data: Arc::new(data) }
    }

    fn at(&self, j: usize, k: usize) -> &[f64] {
        let o = (j * (self.n + 1) + k) * self.dim;
        &self.data[o..o + self.dim]
    }

    fn sequence(&self) -> DoubleSequence {
        let g = self.clone();
        DoubleSequence::from_fn("grid", self.dim, move |j, k, out| {
            out.copy_from_slice(g.at(j, k));
            Ok(())
        })
    }
}

fn random_weights(rng: &mut ChaCha8Rng, len: usize) -> (WeightSequence, Vec<f64>) {
    let values: Vec<f64> = (0..len).map(|_| rng.random_range(0.1..5.0)).collect();
    let owned = values.clone();
    (WeightSequence::from_fn("random", true, move |j| owned.get(j).copied().unwrap_or(1.0)).unwrap(), values)
}

fn average(g: &Grid, p: &[f64], q: &[f64], js: std::ops::RangeInclusive<usize>, ks: std::ops::RangeInclusive<usize>) -> Vec<f64> {
    let mut acc = vec![0.0; g.dim];
    let mut w = 0.0;
    for j in js {
        for k in ks.clone() {
            let c = p[j] * q[k];
            w += c;
            for (a, x) in acc.iter_mut().zip(g.at(j, k)) {
                *a += c * x;
            }
        }
    }
    acc.iter().map(|a| a / w).collect()
}

fn cells(variant: Variant, m: usize, n: usize, lambda: f64) -> (std::ops::RangeInclusive<usize>, std::ops::RangeInclusive<usize>) {
    let lm = dilate(lambda, m);
    let ln = if variant.is_double() { dilate(lambda, n) } else { n };
    match (variant.is_gt1(), variant.is_double()) {
        (true, true) => (m + 1..=lm, n + 1..=ln),
        (true, false) => (m + 1..=lm, n..=n),
        (false, true) => (lm + 1..=m, ln + 1..=n),
        (false, false) => (lm + 1..=m, n..=n),
    }
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = 1.0 + b.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn abs_pair() -> IFNormPair {
    standard_pair(NormChoice::Absolute, 1).unwrap()
}

// ---------------------------------------------------------------- criteria

fn axioms() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for dim in [1, 3] {
        let pair = standard_pair(if dim == 1 { NormChoice::Absolute } else { NormChoice::Euclidean }, dim).unwrap();
        let report = check_axioms(&pair, 10_000, 2024);
        ok &= report.all_listed_pass();
        notes.push(format!("standard d={dim}: {}", if report.all_listed_pass() { "10/10" } else { "FAILED" }));
    }
    let injected: [(&str, IFNormPair, Axiom); 3] = [
        ("mu=1", perturbed::constant_membership(3), Axiom::B),
        ("scaled nu", perturbed::scaled_nonmembership(NormChoice::Euclidean, 3, 2.0), Axiom::Consistency),
        ("broken triangle", perturbed::quasi_norm_pair(3), Axiom::D),
    ];
    for (name, pair, expected) in injected {
        let report = check_axioms(&pair, 10_000, 2024);
        let check = report.get(expected);
        let caught = !check.passed && check.witness.is_some();
        ok &= caught;
        notes.push(format!("{name}: {}", if caught { format!("caught by {}", expected.label()) } else { "missed".into() }));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    outcome(ok, format!("{}; {:.2}s", notes.join(", "), elapsed.as_secs_f64()))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut failures = 0;
    for seed in 0..100u64 {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (m, n, dim) = (r.random_range(1..=50), r.random_range(1..=50), r.random_range(1..=3));
        let g = Grid::random(&mut r, m, n, dim, false);
        let (p, pv) = random_weights(&mut r, m + 1);
        let (q, qv) = random_weights(&mut r, n + 1);
        let prefix = build_prefix_tables(&g.sequence(), &p, &q, m, n).unwrap();
        let (cp, cq) = (cumulative(&p, m).unwrap(), cumulative(&q, n).unwrap());
        let tables = all_mean_tables(&prefix, &cp, &cq).unwrap();
        let ones = vec![1.0; m.max(n) + 1];
        for _ in 0..30 {
            let (i, k) = (r.random_range(0..=m), r.random_range(0..=n));
            for t in &tables {
                let want = match t.alpha_beta() {
                    AlphaBeta::OneOne => average(&g, &pv, &qv, 0..=i, 0..=k),
                    AlphaBeta::OneZero => average(&g, &pv, &ones, 0..=i, k..=k),
                    AlphaBeta::ZeroOne => average(&g, &ones, &qv, i..=i, 0..=k),
                };
                checked += 1;
                if !rel_close(t.at(i, k), &want, 1e-12) {
                    failures += 1;
                }
            }
            let lambda = if r.random_bool(0.5) { r.random_range(1.05..3.0) } else { r.random_range(0.2..0.95) };
            for v in Variant::ALL.into_iter().filter(|v| v.is_gt1() == (lambda > 1.0)) {
                let Ok(w) = rectangle_mean(&prefix, &cp, &cq, i, k, lambda, v) else { continue };
                let (js, ks) = cells(v, i, k, lambda);
                let avg = if v.is_double() { average(&g, &pv, &qv, js, ks) } else { average(&g, &pv, &ones, js, ks) };
                let x = g.at(i, k);
                let want: Vec<f64> = if v.is_gt1() { sub(&avg, x) } else { sub(x, &avg) };
                checked += 1;
                let scale = 1.0 + want.iter().fold(0.0f64, |s, x| s.max(x.abs()));
                worst = worst.max(w.value.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale);
                if !rel_close(&w.value, &want, 1e-12) {
                    failures += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = failures == 0 && elapsed < Duration::from_secs(10);
    outcome(
        ok,
        format!(
            "{checked} mean/window values on 100 instances, {failures} mismatches, worst window rel. error {worst:.1e}; {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn decomposition() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for variant in Variant::ALL {
        let mut worst = 0.0f64;
        let mut bad = 0;
        let mut checked = 0;
        for seed in 0..100u64 {
            let mut r = ChaCha8Rng::seed_from_u64(1000 + seed);
            let h = r.random_range(20..=60);
            let dim = r.random_range(1..=3);
            let g = Grid::random(&mut r, h, h, dim, false);
            let (p, _) = random_weights(&mut r, h + 1);
            let (q, _) = random_weights(&mut r, h + 1);
            let prefix = build_prefix_tables(&g.sequence(), &p, &q, h, h).unwrap();
            let (cp, cq) = (cumulative(&p, h).unwrap(), cumulative(&q, h).unwrap());
            let tables = all_mean_tables(&prefix, &cp, &cq).unwrap();
            let means = tables.iter().find(|t| t.alpha_beta() == variant.alpha_beta()).unwrap();
            // one valid window per instance
            let d = loop {
                let lambda = if variant.is_gt1() { r.random_range(1.1..2.5) } else { r.random_range(0.3..0.9) };
                let bound = if variant.is_gt1() { (h as f64 / lambda) as usize } else { h };
                let (m, n) = (r.random_range(2..=bound), r.random_range(2..=bound));
                if let Ok(d) = verify_decomposition(&prefix, means, &cp, &cq, m, n, lambda, variant) {
                    break d;
                }
            };
            checked += 1;
            let norm = d.lhs.iter().map(|v| v * v).sum::<f64>().sqrt();
            worst = worst.max(d.residual / (1.0 + norm));
            if !d.within(1e-10) {
                bad += 1;
            }
        }
        ok &= bad == 0 && checked == 100;
        notes.push(format!("{variant}: {bad}/{checked} over, worst {worst:.1e}"));
    }
    outcome(ok, notes.join("; "))
}

fn example_alternating() -> Outcome {
    let instance = Instance {
        seq: compile_expression("alt(m+n)").unwrap(),
        p: WeightSequence::ones(),
        q: WeightSequence::ones(),
        pair: abs_pair(),
        limit: Some(Vector::scalar(0.0).unwrap()),
    };
    let grids = Grids::default();
    let a = Analysis::new(instance, grids.clone(), 0).unwrap();
    let summ = a.summability(AlphaBeta::OneOne, None).unwrap();
    let conv = a.convergence(None).unwrap();
    let table = a.mean_table(AlphaBeta::OneOne).unwrap();
    let (m, n) = grids.horizon;
    let mut max_tail = 0.0f64;
    for i in grids.tail_start..=m {
        for k in grids.tail_start..=n {
            max_tail = max_tail.max(table.at(i, k)[0].abs());
        }
    }
    let bound = 1.0 / (1001.0 * 1001.0);
    let ok = summ.status == Status::Holds
        && max_tail <= bound
        && conv.status == Status::Fails
        && conv.witness.is_some();
    let w = conv.witness.as_ref().map(|w| format!("({}, {}) mu={:.4}", w.m, w.n, w.mu)).unwrap_or_default();
    outcome(
        ok,
        format!(
            "summability {} (max tail mean {max_tail:.3e} <= {bound:.3e}), convergence {} witness {w}",
            summ.status.label(),
            conv.status.label()
        ),
    )
}

/// `t ≥ 1` and `ε ∈ {0.1, 0.01}`: means converging like `C/m` are only
/// resolvable for `ε t ≳ C/tail` at this horizon.
fn harness_grids() -> Grids {
    Grids::default()
        .with_t_grid((0..7).map(|i| 10f64.powf(0.5 * i as f64)).collect())
        .with_eps_grid(vec![0.1, 0.01])
}

fn weights(i: u64) -> WeightSequence {
    if i % 2 == 0 {
        WeightSequence::ones()
    } else {
        WeightSequence::linear()
    }
}

fn regularity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let grids = harness_grids();
    let (mut consistent, mut hyp, mut concl) = (0, 0, 0);
    let mut failures = Vec::new();
    for i in 0..20u64 {
        let c: f64 = rng.random_range(-3.0..3.0);
        let a: f64 = rng.random_range(0.2..2.0);
        let s: f64 = rng.random_range(1.0..2.0);
        let expr = format!("{c} + {a}/(m+n+1)^{s}");
        let instance = Instance {
            seq: compile_expression(&expr).unwrap(),
            p: weights(i),
            q: weights(i / 2),
            pair: abs_pair(),
            limit: Some(Vector::scalar(c).unwrap()),
        };
        let analysis = Analysis::new(instance, grids.clone(), i).unwrap();
        let r = analysis.theorem(Theorem::Regularity11).unwrap();
        consistent += r.consistent as usize;
        hyp += r.hypotheses_hold as usize;
        concl += r.conclusion_status.holds() as usize;
        if !r.consistent {
            failures.push(expr);
        }
    }
    outcome(
        consistent == 20,
        format!(
            "{consistent}/20 consistent; hypotheses held on {hyp}, conclusion held on {concl}{}",
            if failures.is_empty() { String::new() } else { format!("; inconsistent: {}", failures.join(", ")) }
        ),
    )
}

fn tauberian_family() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let grids = harness_grids();
    let theorems = [Theorem::SlowOscillation11, Theorem::SlowOscillationSplit, Theorem::TauberianGt1, Theorem::TauberianLt1];
    let (mut consistent, mut with_hyp, mut total) = (0, 0, 0);
    let mut bad = Vec::new();
    for i in 0..20u64 {
        let c: f64 = rng.random_range(-3.0..3.0);
        let a: f64 = rng.random_range(0.1..1.0);
        let b: f64 = rng.random_range(0.1..1.0);
        let expr = format!("{c} + {a}*harm(m)/(m+1)^2 + {b}*harm(n)/(n+1)^2");
        let instance = Instance {
            seq: compile_expression(&expr).unwrap(),
            p: weights(i),
            q: weights(i / 2),
            pair: abs_pair(),
            limit: Some(Vector::scalar(c).unwrap()),
        };
        let analysis = Analysis::new(instance, grids.clone(), i).unwrap();
        let mut all = true;
        for t in theorems {
            let r = analysis.theorem(t).unwrap();
            total += 1;
            with_hyp += r.hypotheses_hold as usize;
            all &= r.consistent;
            if !r.consistent {
                bad.push(format!("{t} on {expr}"));
            }
        }
        consistent += all as usize;
    }
    // the alternating counterexample: condition and convergence both fail
    let alt = Instance {
        seq: compile_expression("alt(m+n)").unwrap(),
        p: WeightSequence::ones(),
        q: WeightSequence::ones(),
        pair: abs_pair(),
        limit: Some(Vector::scalar(0.0).unwrap()),
    };
    let analysis = Analysis::new(alt, harness_grids(), 0).unwrap();
    let r = analysis.theorem(Theorem::TauberianGt1).unwrap();
    let counter_ok = r.consistent
        && r.hypotheses_hold
        && r.conclusion.iter().all(|c| c.status == Status::Fails);
    outcome(
        consistent == 20 && counter_ok,
        format!(
            "{consistent}/20 instances consistent ({with_hyp}/{total} theorem checks with all hypotheses holding); alt(m+n): convergence {}, condition {}{}",
            r.conclusion[0].status.label(),
            r.conclusion[1].status.label(),
            if bad.is_empty() { String::new() } else { format!("; inconsistent: {}", bad.join(", ")) }
        ),
    )
}

/// Exact comparisons: integer lattices and integer weights keep every sum
/// exact and the remaining roundings monotone.
fn proof_inequalities() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(77);
    let (mut window_checks, mut split_checks, mut cauchy_checks, mut violations) = (0usize, 0usize, 0usize, 0usize);
    let t_of = |r: &mut ChaCha8Rng| 10f64.powf(r.random_range(-2.0..3.0));
    for inst in 0..20 {
        let dim = if inst % 2 == 0 { 1 } else { 3 };
        let pair = standard_pair(if dim == 1 { NormChoice::Absolute } else { NormChoice::Supremum }, dim).unwrap();
        let h = 60;
        let g = Grid::random(&mut r, h, h, dim, true);
        let (p, q) = if inst % 4 < 2 {
            (WeightSequence::ones(), WeightSequence::linear())
        } else {
            (WeightSequence::linear(), WeightSequence::ones())
        };
        let prefix = build_prefix_tables(&g.sequence(), &p, &q, h, h).unwrap();
        let (cp, cq) = (cumulative(&p, h).unwrap(), cumulative(&q, h).unwrap());
        while window_checks < (inst + 1) * 2000 {
            let v = Variant::ALL[r.random_range(0..4)];
            let lambda = if v.is_gt1() { r.random_range(1.05..2.0) } else { r.random_range(0.5..0.95) };
            let (m, n) = (r.random_range(1..=h), r.random_range(1..=h));
            let Ok(w) = rectangle_mean(&prefix, &cp, &cq, m, n, lambda, v) else { continue };
            let t = t_of(&mut r);
            let (mu, nu) = pair.grades(&w.value, t);
            let (js, ks) = cells(v, m, n, lambda);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for j in js {
                for k in ks.clone() {
                    let (a, b) = pair.grades(&sub(g.at(j, k), g.at(m, n)), t);
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
            }
            window_checks += 1;
            violations += !(mu >= lo && nu <= hi) as usize;
        }
        for _ in 0..2000 {
            let (m, n) = (r.random_range(0..h), r.random_range(0..h));
            let (j, k) = (r.random_range(m..=h), r.random_range(n..=h));
            let t = t_of(&mut r);
            let (mu, nu) = pair.grades(&sub(g.at(j, k), g.at(m, n)), t);
            let (mu1, nu1) = pair.grades(&sub(g.at(j, k), g.at(m, k)), t / 2.0);
            let (mu2, nu2) = pair.grades(&sub(g.at(m, k), g.at(m, n)), t / 2.0);
            split_checks += 1;
            violations += !(mu >= mu1.min(mu2) && nu <= nu1.max(nu2)) as usize;
        }
        let limit: Vec<f64> = (0..dim).map(|_| r.random_range(-5i32..=5) as f64).collect();
        for _ in 0..1000 {
            let (m, n, j, k) = (r.random_range(0..=h), r.random_range(0..=h), r.random_range(0..=h), r.random_range(0..=h));
            let t = t_of(&mut r);
            let (mu, nu) = pair.grades(&sub(g.at(j, k), g.at(m, n)), t);
            let (mu1, nu1) = pair.grades(&sub(g.at(j, k), &limit), t / 2.0);
            let (mu2, nu2) = pair.grades(&sub(g.at(m, n), &limit), t / 2.0);
            cauchy_checks += 1;
            violations += !(mu >= mu1.min(mu2) && nu <= nu1.max(nu2)) as usize;
        }
    }
    let total = window_checks + split_checks + cauchy_checks;
    outcome(
        violations == 0 && total >= 100_000,
        format!(
            "{total} tuples ({window_checks} window bounds, {split_checks} two-step splits, {cauchy_checks} limit-to-Cauchy), {violations} violations"
        ),
    )
}

fn regular_variation() -> Outcome {
    let start = Instant::now();
    let mut grids = Grids::default();
    grids.weight_horizon = 10_000;
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, w, rho) in [("ones", WeightSequence::ones(), Some(1.0)), ("linear", WeightSequence::linear(), Some(2.0)), ("harmonic", WeightSequence::harmonic(), None)] {
        let p = cumulative(&w, 10_000).unwrap();
        let mut rhos = Vec::new();
        for lambda in [1.5, 2.0] {
            let est = regvar_index_estimate(&p, lambda, &grids).unwrap();
            rhos.push(format!("{:.4}", est.rho_hat));
            match rho {
                Some(target) => ok &= (est.rho_hat - target).abs() <= 0.02 && est.positive_index,
                None => ok &= !est.positive_index,
            }
        }
        let sva = sva_plus_estimate(&p, &grids).unwrap();
        let expect_in = rho.is_some();
        ok &= sva.in_sva() == expect_in;
        notes.push(format!(
            "{name}: rho=[{}]{} SVA+ {}",
            rhos.join(", "),
            if rho.is_none() { " not-positive-index," } else { "," },
            if sva.in_sva() { "in" } else { "out" }
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    outcome(ok, format!("{}; {:.2}s", notes.join("; "), elapsed.as_secs_f64()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    std::fs::write(
        &spec,
        r#"sequence = "alt(m+n) + 1/(m+1)"
limit = 0
seed = 7
tasks = ["summability(1,1)", "convergence", "cauchy", "qbounded", "oscillation(1,1)", "tauber(double-lt1)", "sva", "regvar", "theorem(regularity-11)"]

[weights]
p = "linear"
q = "ones"

[pair]
norm = "absolute"

[grids]
horizon = [600, 500]
"#,
    )
    .unwrap();
    let run = |threads: usize, tag: &str| -> Result<String, String> {
        let out = dir.path().join(tag);
        let status = Command::new(env!("CARGO_BIN_EXE_ifns"))
            .args(["--threads", &threads.to_string(), "run", "--config"])
            .arg(&spec)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !matches!(status.status.code(), Some(0) | Some(2)) {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        std::fs::read_to_string(Path::new(&out).join("report.json")).map_err(|e| e.to_string())
    };
    let runs: Result<Vec<String>, String> =
        [(1, "a1"), (1, "b1"), (8, "a8"), (8, "b8")].iter().map(|&(t, tag)| run(t, tag)).collect();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("run failed: {e}")),
    };
    let strip = |s: &str| {
        let v = ifns_cli::without_timing(s).unwrap();
        serde_json::to_string_pretty(&v).unwrap()
    };
    let base = strip(&runs[0]);
    let same = runs.iter().all(|r| strip(r) == base);
    // the textual prefix before the timing block is byte-identical too
    let prefix = |s: &str| s[..s.find("\"timing\"").unwrap_or(s.len())].to_string();
    let bytes_same = runs.iter().all(|r| prefix(r) == prefix(&runs[0]));
    outcome(
        same && bytes_same,
        format!("4 runs (threads 1, 1, 8, 8): reports {} modulo timing", if same && bytes_same { "byte-identical" } else { "DIFFER" }),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("axiom suite", axioms),
        ("oracle equivalence", oracle_equivalence),
        ("decomposition identities", decomposition),
        ("alternating example", example_alternating),
        ("regularity harness", regularity),
        ("tauberian harness", tauberian_family),
        ("pointwise proof inequalities", proof_inequalities),
        ("regular variation and SVA+", regular_variation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += !o.pass as usize;
        println!(
            "criterion {} [{name}]: {} ({}) [{:.1}s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

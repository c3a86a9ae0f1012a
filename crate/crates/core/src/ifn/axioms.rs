//! Executable axiom suite for candidate norm pairs.
//!
//! Inequality axioms (d) and (i) are compared exactly. Scaling axioms (c)
//! and (h) allow `1e-12` absolute slack, since `mu(cx, t)` and
//! `mu(x, t/|c|)` take different rounding paths for general `c`. The limit
//! axioms (e) and (j) cannot be decided pointwise: they are probed on fixed
//! t-grids and reported as [`CheckMode::Probed`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::IFNormPair;

/// Scales at which "for all t > 0" in axioms (b) and (g) is checked.
pub const POSITIVE_T_GRID: [f64; 3] = [0.01, 1.0, 100.0];
/// Probes for `t -> infinity` in (e) and (j).
pub const LARGE_T_PROBES: [f64; 3] = [1e3, 1e6, 1e9];
/// Probes for `t -> 0+` in (e) and (j).
pub const SMALL_T_PROBES: [f64; 3] = [1e-3, 1e-6, 1e-9];
pub const LIMIT_TOLERANCE: f64 = 1e-3;
pub const SCALING_TOLERANCE: f64 = 1e-12;
const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "e")]
    E,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "g")]
    G,
    #[serde(rename = "h")]
    H,
    #[serde(rename = "i")]
    I,
    #[serde(rename = "j")]
    J,
    /// mu non-decreasing and nu non-increasing in t. Follows from (d)/(i)
    /// with `y = 0`; not one of the ten listed conditions.
    #[serde(rename = "monotonicity")]
    Monotonicity,
    /// `0 <= mu, nu <= 1` and `mu + nu <= 1`.
    #[serde(rename = "intuitionistic-consistency")]
    Consistency,
}

impl Axiom {
    pub const LISTED: [Axiom; 10] =
        [Axiom::A, Axiom::B, Axiom::C, Axiom::D, Axiom::E, Axiom::F, Axiom::G, Axiom::H, Axiom::I, Axiom::J];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::A => "a",
            Axiom::B => "b",
            Axiom::C => "c",
            Axiom::D => "d",
            Axiom::E => "e",
            Axiom::F => "f",
            Axiom::G => "g",
            Axiom::H => "h",
            Axiom::I => "i",
            Axiom::J => "j",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Consistency => "intuitionistic-consistency",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Axiom::A => "mu(x,t) = 0 for t <= 0",
            Axiom::B => "mu(x,t) = 1 for all t > 0 iff x = 0",
            Axiom::C => "mu(cx,t) = mu(x,t/|c|) for c != 0",
            Axiom::D => "mu(x+y,t+s) >= min(mu(x,t), mu(y,s))",
            Axiom::E => "mu(x,t) -> 1 as t -> inf, -> 0 as t -> 0",
            Axiom::F => "nu(x,t) = 1 for t <= 0",
            Axiom::G => "nu(x,t) = 0 for all t > 0 iff x = 0",
            Axiom::H => "nu(cx,t) = nu(x,t/|c|) for c != 0",
            Axiom::I => "nu(x+y,t+s) <= max(nu(x,t), nu(y,s))",
            Axiom::J => "nu(x,t) -> 0 as t -> inf, -> 1 as t -> 0",
            Axiom::Monotonicity => "mu non-decreasing, nu non-increasing in t (derived)",
            Axiom::Consistency => "mu, nu in [0,1] and mu + nu <= 1",
        }
    }

    fn mode(self) -> CheckMode {
        match self {
            Axiom::E | Axiom::J => CheckMode::Probed,
            _ => CheckMode::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    Probed,
}

/// The sample that broke a check, with the two sides that were compared.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub x: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    pub t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub statement: &'static str,
    pub mode: CheckMode,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    fn new(axiom: Axiom) -> Self {
        AxiomCheck {
            axiom,
            statement: axiom.statement(),
            mode: axiom.mode(),
            passed: true,
            checked: 0,
            failures: 0,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            self.passed = false;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub pair: String,
    pub dim: usize,
    pub sample_count: usize,
    pub seed: u64,
    /// The ten listed conditions, in order (a)..(j).
    pub axioms: Vec<AxiomCheck>,
    /// Consequences and side conditions checked alongside.
    pub derived: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn get(&self, axiom: Axiom) -> &AxiomCheck {
        self.axioms.iter().chain(&self.derived).find(|c| c.axiom == axiom).expect("every axiom is checked")
    }

    /// All ten listed axioms pass.
    pub fn all_listed_pass(&self) -> bool {
        self.axioms.iter().all(|c| c.passed)
    }

    pub fn all_pass(&self) -> bool {
        self.all_listed_pass() && self.derived.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.axioms.iter().chain(&self.derived).filter(|c| !c.passed)
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo_exp: f64, hi_exp: f64) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

fn signed(magnitude: f64, rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    }
}

/// Nonzero vector with a mix of dense, sparse and comparable-scale shapes.
fn sample_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = match rng.random_range(0..4u8) {
            0 | 1 => (0..dim).map(|_| signed(log_uniform(rng, -3.0, 2.0), rng)).collect(),
            2 => {
                let mut v = vec![0.0; dim];
                let axis = rng.random_range(0..dim);
                v[axis] = signed(log_uniform(rng, -3.0, 2.0), rng);
                v
            }
            _ => {
                let scale = log_uniform(rng, -2.0, 2.0);
                (0..dim).map(|_| rng.random_range(-1.0..1.0) * scale).collect()
            }
        };
        if v.iter().any(|&c| c != 0.0) {
            return v;
        }
    }
}

fn sample_scalar(rng: &mut ChaCha8Rng) -> f64 {
    match rng.random_range(0..8u8) {
        0 | 1 => signed(rng.random_range(1..=5) as f64, rng),
        2 => signed(2f64.powi(rng.random_range(-6..=6)), rng),
        _ => signed(log_uniform(rng, -3.0, 3.0), rng),
    }
}

fn sample_nonpositive(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_range(0..8u8) == 0 {
        0.0
    } else {
        -log_uniform(rng, -3.0, 3.0)
    }
}

fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn scale(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|a| a * c).collect()
}

fn plain(x: &[f64], t: f64, lhs: f64, rhs: f64) -> Witness {
    Witness { x: x.to_vec(), y: None, t, s: None, c: None, lhs, rhs }
}

/// Runs conditions (a)-(j) plus the derived checks on `sample_count` seeded
/// samples. Failures are data: each failing check carries the first
/// offending sample.
pub fn check_axioms(pair: &IFNormPair, sample_count: usize, seed: u64) -> AxiomReport {
    let dim = pair.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks: Vec<AxiomCheck> = Axiom::LISTED.iter().map(|&a| AxiomCheck::new(a)).collect();
    let mut monotone = AxiomCheck::new(Axiom::Monotonicity);
    let mut consistent = AxiomCheck::new(Axiom::Consistency);
    let theta = vec![0.0; dim];
    let idx = |a: Axiom| Axiom::LISTED.iter().position(|&b| b == a).unwrap();

    // "if" direction of (b) and (g): the zero vector is small at every scale.
    for &t in &POSITIVE_T_GRID {
        let mu = pair.mu(&theta, t);
        checks[idx(Axiom::B)].record(mu == 1.0, || plain(&theta, t, mu, 1.0));
        let nu = pair.nu(&theta, t);
        checks[idx(Axiom::G)].record(nu == 0.0, || plain(&theta, t, nu, 0.0));
    }

    for _ in 0..sample_count.max(1) {
        let x = sample_vector(&mut rng, dim);
        let y = sample_vector(&mut rng, dim);
        let t = log_uniform(&mut rng, -3.0, 3.0);
        let s = if rng.random_range(0..4u8) == 0 { t } else { log_uniform(&mut rng, -3.0, 3.0) };
        let c = sample_scalar(&mut rng);
        let t_nonpos = sample_nonpositive(&mut rng);

        // (a), (f): non-positive scales, for x and for theta.
        for v in [&x, &theta] {
            let mu = pair.mu(v, t_nonpos);
            checks[idx(Axiom::A)].record(mu == 0.0, || plain(v, t_nonpos, mu, 0.0));
            let nu = pair.nu(v, t_nonpos);
            checks[idx(Axiom::F)].record(nu == 1.0, || plain(v, t_nonpos, nu, 1.0));
        }

        // "only if" direction of (b), (g): x != 0 is not small at some grid scale.
        let mu_grid: Vec<f64> = POSITIVE_T_GRID.iter().map(|&tt| pair.mu(&x, tt)).collect();
        checks[idx(Axiom::B)].record(mu_grid.iter().any(|&m| m != 1.0), || {
            plain(&x, POSITIVE_T_GRID[0], mu_grid[0], 1.0)
        });
        let nu_grid: Vec<f64> = POSITIVE_T_GRID.iter().map(|&tt| pair.nu(&x, tt)).collect();
        checks[idx(Axiom::G)].record(nu_grid.iter().any(|&v| v != 0.0), || {
            plain(&x, POSITIVE_T_GRID[0], nu_grid[0], 0.0)
        });

        // (c), (h): homogeneity.
        let cx = scale(&x, c);
        let t_scaled = t / c.abs();
        let (l, r) = (pair.mu(&cx, t), pair.mu(&x, t_scaled));
        checks[idx(Axiom::C)].record((l - r).abs() <= SCALING_TOLERANCE, || Witness {
            c: Some(c),
            ..plain(&x, t, l, r)
        });
        let (l, r) = (pair.nu(&cx, t), pair.nu(&x, t_scaled));
        checks[idx(Axiom::H)].record((l - r).abs() <= SCALING_TOLERANCE, || Witness {
            c: Some(c),
            ..plain(&x, t, l, r)
        });

        // (d), (i): min/max triangle inequalities, exact.
        let xy = add(&x, &y);
        let lhs = pair.mu(&xy, t + s);
        let rhs = pair.mu(&x, t).min(pair.mu(&y, s));
        checks[idx(Axiom::D)].record(lhs >= rhs, || Witness {
            y: Some(y.clone()),
            s: Some(s),
            ..plain(&x, t, lhs, rhs)
        });
        let lhs = pair.nu(&xy, t + s);
        let rhs = pair.nu(&x, t).max(pair.nu(&y, s));
        checks[idx(Axiom::I)].record(lhs <= rhs, || Witness {
            y: Some(y.clone()),
            s: Some(s),
            ..plain(&x, t, lhs, rhs)
        });

        // (e), (j): limit probes on x != 0.
        let probe = |probes: &[f64; 3], f: &dyn Fn(f64) -> f64| probes.map(f);
        let mu_big = probe(&LARGE_T_PROBES, &|tt| pair.mu(&x, tt));
        let mu_small = probe(&SMALL_T_PROBES, &|tt| pair.mu(&x, tt));
        let e_ok = mu_big.windows(2).all(|w| w[0] <= w[1])
            && mu_small.windows(2).all(|w| w[0] >= w[1])
            && (mu_big[2] - 1.0).abs() <= LIMIT_TOLERANCE
            && mu_small[2].abs() <= LIMIT_TOLERANCE;
        checks[idx(Axiom::E)].record(e_ok, || {
            if (mu_big[2] - 1.0).abs() > LIMIT_TOLERANCE || mu_big.windows(2).any(|w| w[0] > w[1]) {
                plain(&x, LARGE_T_PROBES[2], mu_big[2], 1.0)
            } else {
                plain(&x, SMALL_T_PROBES[2], mu_small[2], 0.0)
            }
        });
        let nu_big = probe(&LARGE_T_PROBES, &|tt| pair.nu(&x, tt));
        let nu_small = probe(&SMALL_T_PROBES, &|tt| pair.nu(&x, tt));
        let j_ok = nu_big.windows(2).all(|w| w[0] >= w[1])
            && nu_small.windows(2).all(|w| w[0] <= w[1])
            && nu_big[2].abs() <= LIMIT_TOLERANCE
            && (nu_small[2] - 1.0).abs() <= LIMIT_TOLERANCE;
        checks[idx(Axiom::J)].record(j_ok, || {
            if nu_big[2].abs() > LIMIT_TOLERANCE || nu_big.windows(2).any(|w| w[0] < w[1]) {
                plain(&x, LARGE_T_PROBES[2], nu_big[2], 0.0)
            } else {
                plain(&x, SMALL_T_PROBES[2], nu_small[2], 1.0)
            }
        });

        // Derived: monotonicity in t.
        let t_hi = t * (1.0 + rng.random_range(0.0..4.0));
        let (mu_lo, nu_lo) = (pair.mu(&x, t), pair.nu(&x, t));
        let (mu_hi, nu_hi) = (pair.mu(&x, t_hi), pair.nu(&x, t_hi));
        monotone.record(mu_lo <= mu_hi && nu_lo >= nu_hi, || Witness {
            s: Some(t_hi),
            ..plain(&x, t, mu_lo, mu_hi)
        });

        // Derived: grades in [0,1] with mu + nu <= 1.
        for tt in [t, t_nonpos] {
            let (mu, nu) = (pair.mu(&x, tt), pair.nu(&x, tt));
            let ok = (0.0..=1.0).contains(&mu) && (0.0..=1.0).contains(&nu) && mu + nu <= 1.0 + SUM_TOLERANCE;
            consistent.record(ok, || plain(&x, tt, mu + nu, 1.0));
        }
    }

    AxiomReport {
        pair: pair.tag().to_string(),
        dim,
        sample_count,
        seed,
        axioms: checks,
        derived: vec![monotone, consistent],
    }
}

use ifns_core::analysis::{
    cauchy_verdict, convergence_verdict, slow_oscillation_estimate, tauberian_condition, Grids, Sense, Status,
};
use ifns_core::means::Variant;
use ifns_core::sequences::{compile_expression, difference_transform, Axis, DoubleSequence, Scaling, WeightSequence};
use ifns_core::{standard_pair, NormChoice, Vector};
use proptest::prelude::*;

fn abs() -> ifns_core::IFNormPair {
    standard_pair(NormChoice::Absolute, 1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn differences_telescope(m in 0usize..200, n in 0usize..200, a in -3.0f64..3.0, b in 0.1f64..2.0) {
        let seq = compile_expression(&format!("{a}*sin(m*{b}) + log(m+n+1) + m*n/1000")).unwrap();
        let x = |m: usize, n: usize| seq.eval(m, n).unwrap()[0];
        let dm = difference_transform(&seq, Axis::M, Scaling::None).unwrap();
        let dn = difference_transform(&seq, Axis::N, Scaling::None).unwrap();
        let sm: f64 = (1..=m).map(|i| dm.eval(i, n).unwrap()[0]).sum();
        let sn: f64 = (1..=n).map(|k| dn.eval(m, k).unwrap()[0]).sum();
        prop_assert!((sm - (x(m, n) - x(0, n))).abs() <= 1e-9 * (1.0 + x(m, n).abs()));
        prop_assert!((sn - (x(m, n) - x(m, 0))).abs() <= 1e-9 * (1.0 + x(m, n).abs()));
        prop_assert_eq!(dm.eval(0, n).unwrap()[0], 0.0);

        let im = difference_transform(&seq, Axis::M, Scaling::Index).unwrap();
        let s: f64 = (1..=m).map(|i| im.eval(i, n).unwrap()[0] / i as f64).sum();
        prop_assert!((s - (x(m, n) - x(0, n))).abs() <= 1e-9 * (1.0 + x(m, n).abs()));

        let wm = difference_transform(&seq, Axis::M, Scaling::Weighted(WeightSequence::linear())).unwrap();
        // P_i / p_i = (i+1)(i+2)/2 / (i+1) = (i+2)/2
        let s: f64 = (1..=m).map(|i| wm.eval(i, n).unwrap()[0] * 2.0 / (i + 2) as f64).sum();
        prop_assert!((s - (x(m, n) - x(0, n))).abs() <= 1e-9 * (1.0 + x(m, n).abs()));
    }

    #[test]
    fn expressions_are_referentially_transparent(m in 0usize..10_000, n in 0usize..10_000) {
        let text = "alt(m+n)*sqrt(m+1) + harm(n)/(m+1) + cos(m-n)";
        let (a, b) = (compile_expression(text).unwrap(), compile_expression(text).unwrap());
        let first = a.eval(m, n).unwrap()[0];
        prop_assert_eq!(first.to_bits(), a.eval(m, n).unwrap()[0].to_bits());
        prop_assert_eq!(first.to_bits(), b.eval(m, n).unwrap()[0].to_bits());
        let direct = {
            let alt = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
            let harm: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
            alt * ((m + 1) as f64).sqrt() + harm / (m + 1) as f64 + (m as f64 - n as f64).cos()
        };
        prop_assert!((first - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }
}

fn grids() -> Grids {
    Grids::default().with_horizon(120, 120).with_t_grid(vec![0.1, 1.0, 10.0]).with_eps_grid(vec![0.1, 0.01])
}

#[test]
fn convergence_implies_cauchy_on_seeded_family() {
    let g = grids();
    let split = g.t_grid_with_split(2.0);
    let g_split = g.clone().with_t_grid(split);
    let mut convergent = 0;
    for seed in 0..20u64 {
        let c = seed as f64 * 0.37 - 3.0;
        let a = 0.5 + (seed % 5) as f64;
        let s = 1.5 + (seed % 3) as f64 * 0.5;
        let seq = compile_expression(&format!("{c} + {a}*alt(m)/((m+1)*(n+1))^{s}")).unwrap();
        let conv = convergence_verdict(&seq, &abs(), &Vector::scalar(c).unwrap(), &g_split).unwrap();
        if conv.status == Status::Holds {
            convergent += 1;
            let cauchy = cauchy_verdict(&seq, &abs(), &g, seed).unwrap();
            assert_eq!(cauchy.status, Status::Holds, "seed {seed}");
        }
    }
    assert!(convergent >= 15, "{convergent}");
}

#[test]
fn alternating_is_not_cauchy() {
    let seq = compile_expression("alt(m+n)").unwrap();
    let v = cauchy_verdict(&seq, &abs(), &grids(), 0).unwrap();
    assert_eq!(v.status, Status::Fails);
    assert!(v.witness.is_some());
}

fn assert_monotone_in_t(est: &ifns_core::analysis::ConditionEstimate) {
    let ts = &est.t_grid;
    for scan in est.lambdas.iter().filter(|s| s.has_data) {
        let rows: Vec<_> = est.inner.iter().filter(|r| r.lambda == scan.lambda).collect();
        assert_eq!(rows.len(), ts.len());
        for w in rows.windows(2) {
            assert!(w[0].t < w[1].t);
            assert!(w[0].mu <= w[1].mu, "{} λ={}", est.condition, scan.lambda);
            assert!(w[0].nu >= w[1].nu, "{} λ={}", est.condition, scan.lambda);
        }
    }
    for w in est.outer.windows(2) {
        assert!(w[0].mu <= w[1].mu && w[0].nu >= w[1].nu);
    }
}

#[test]
fn inner_estimates_are_monotone_in_t() {
    let g = Grids::default().with_horizon(100, 100);
    let pair = abs();
    for expr in ["alt(m+n)", "harm(m)+harm(n)", "sin(m)*log(n+1)"] {
        let seq = compile_expression(expr).unwrap();
        for sense in [Sense::OneOne, Sense::OneZero, Sense::ZeroOne] {
            assert_monotone_in_t(&slow_oscillation_estimate(&seq, &pair, sense, &g).unwrap());
        }
        for v in Variant::ALL {
            let p = WeightSequence::linear();
            assert_monotone_in_t(&tauberian_condition(&seq, &pair, &p, &WeightSequence::ones(), v, &g).unwrap());
        }
    }
}

#[test]
fn tauberian_constant_is_exact_in_every_dimension() {
    let g = Grids::default().with_horizon(60, 60);
    let seq = DoubleSequence::constant(Vector::new(vec![1.0, -2.0, 3.5]).unwrap());
    let pair = standard_pair(NormChoice::Euclidean, 3).unwrap();
    for v in Variant::ALL {
        // integer weights keep every window sum exact
        let est = tauberian_condition(&seq, &pair, &WeightSequence::linear(), &WeightSequence::ones(), v, &g).unwrap();
        assert_eq!(est.status, Status::Holds);
        assert!(est.outer.iter().all(|o| o.mu == 1.0 && o.nu == 0.0));
        // non-dyadic weights round in the prefix differences: the window value
        // is a rounding residue of the prefix magnitudes (~1e4 here), not zero
        let est = tauberian_condition(&seq, &pair, &WeightSequence::harmonic(), &WeightSequence::linear(), v, &g).unwrap();
        assert_eq!(est.status, Status::Holds);
        assert!(est.outer.iter().all(|o| o.mu >= o.t / (o.t + 1e-9) && o.nu <= 1e-9 / (o.t + 1e-9)));
    }
}

#[test]
fn strip_condition_matches_single_sequence_scan() {
    // x_{mn} = s_m: the strip condition only sees s, so its inner estimate is
    // the one-index extremum of the strip increments
    let s = |m: usize| ((m as f64) * 0.9).sin() / ((m + 1) as f64).sqrt();
    let seq = DoubleSequence::scalar("s_m", move |m, _| s(m));
    let g = Grids::default().with_horizon(200, 40).with_t_grid(vec![0.5, 2.0]);
    let pair = abs();
    let ones = WeightSequence::ones();
    let est = tauberian_condition(&seq, &pair, &ones, &ones, Variant::Strip10Gt1, &g).unwrap();
    for row in &est.inner {
        let mut worst = 0.0f64;
        for m in g.tail_start..=200 {
            let lm = ifns_core::means::dilate(row.lambda, m);
            if lm <= m || lm > 200 {
                continue;
            }
            let avg: f64 = (m + 1..=lm).map(s).sum::<f64>() / (lm - m) as f64;
            worst = worst.max((avg - s(m)).abs());
        }
        let mu = row.t / (row.t + worst);
        assert!((row.mu - mu).abs() <= 1e-12, "λ={} t={}", row.lambda, row.t);
    }
}

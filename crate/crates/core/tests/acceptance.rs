//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lincode::analysis::{angle_error_cdf, ks_distance, rho2_cdf, simulate_angle_error, simulate_decomposition};
use lincode::bench::{gaussian_targets, uniform_targets};
use lincode::codebook::{mailman_apply, mailman_build, self_design_build, CodebookKind};
use lincode::engine::{apply, baseline_apply, binary_quantize, quantization_mse};
use lincode::pot_arith::{binary_empirical_mse, csd_empirical_mse};
use lincode::wiring::{fit_column, fit_stage};
use lincode::{decompose, gaussian_build, threshold, DecompositionPlan, Dyadic, Matrix, Matrix64, StageSchedule};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};

use common::{arb_dyadic, arb_plan, sample};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

fn csd_scalar_law() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for c in 1..=4 {
        let mse = csd_empirical_mse(c, 1_000_000, 100 + c as u64);
        let want = 28f64.powi(-(c as i32)) / 3.0;
        pass &= rel_dev(mse, want) <= 0.05;
        parts.push(format!("C={c} dev {:.2}%", 100.0 * rel_dev(mse, want)));
    }
    outcome(pass, parts.join(", "))
}

fn binary_scalar_law() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for b in [4u32, 8, 16] {
        let mse = binary_empirical_mse(b, 1_000_000, 200 + u64::from(b));
        let want = 4f64.powi(-(b as i32)) / 3.0;
        pass &= rel_dev(mse, want) <= 0.05;
        parts.push(format!("b={b} dev {:.2}%", 100.0 * rel_dev(mse, want)));
    }
    outcome(pass, parts.join(", "))
}

fn recursion_adds(n: usize) -> u64 {
    if n == 1 { 0 } else { recursion_adds(n - 1) + (1u64 << n) - 1 }
}

fn mailman() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let strategy = arb_dyadic(40, -60..=60);
    for n in 1..=10usize {
        let k = 1usize << n;
        let dense = mailman_build::<f64>(n).unwrap().map(|&v| Dyadic::from_i64(v as i64));
        for _ in 0..100 {
            let h: Vec<Dyadic> = (0..k).map(|_| sample(&strategy, &mut runner)).collect();
            let (y, adds) = mailman_apply(n, &h).unwrap();
            if y != dense.mul_vec(&h).unwrap() {
                return outcome(false, format!("N={n}: product differs from dense reference"));
            }
            if adds != recursion_adds(n) || adds >= 2 * k as u64 {
                return outcome(false, format!("N={n}: {adds} additions"));
            }
        }
    }
    outcome(true, "N=1..10 bit-exact, additions = c(N) < 2K")
}

fn engine_exactness() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let plans = arb_plan(256, 8);
    let xs = arb_dyadic(30, -40..=40);
    let mut kinds = std::collections::BTreeMap::new();
    for i in 0..200 {
        let plan = sample(&plans, &mut runner);
        *kinds.entry(plan.codebook().kind().name()).or_insert(0) += 1;
        let x: Vec<Dyadic> = (0..plan.cols()).map(|_| sample(&xs, &mut runner)).collect();
        let (y, cost) = apply(&plan, &x).unwrap();
        if y != plan.reconstruct_exact().mul_vec(&x).unwrap() {
            return outcome(false, format!("plan {i}: output differs from reconstruction product"));
        }
        if cost.executed_additions != plan.cost().executed_additions {
            return outcome(false, format!("plan {i}: runtime and structural additions differ"));
        }
    }
    outcome(true, format!("200 plans bit-exact, codebooks {kinds:?}"))
}

fn angle_cdf() -> Outcome {
    let samples = simulate_angle_error(12, 64, 100_000, 5).unwrap();
    let d = ks_distance(&samples, |r| angle_error_cdf(12, 64, r).unwrap());
    outcome(d <= 0.01, format!("sup deviation {d:.4} (limit 0.01)"))
}

fn lower_bound() -> Outcome {
    let curve = simulate_decomposition(8, 256, 20, CodebookKind::Gaussian, 6, 20).unwrap();
    let mut pass = true;
    let mut worst_low = f64::INFINITY;
    let mut worst_high: f64 = 0.0;
    for p in curve.points.iter().filter(|p| p.s >= 1) {
        let ratio = p.mean / p.lower_bound;
        worst_low = worst_low.min(ratio);
        pass &= ratio >= 0.95;
        if p.s <= 12 {
            worst_high = worst_high.max(ratio);
            pass &= ratio <= 3.0;
        }
    }
    outcome(pass, format!("mean/D_LB min {worst_low:.3} over s=1..20, max {worst_high:.3} over s<=12"))
}

fn table_gaussian() -> Outcome {
    let big = gaussian_targets(16, 1024, &[16], 20, 7, 64).unwrap();
    let small = gaussian_targets(8, 256, &[8], 20, 8, 64).unwrap();
    let (b, s) = (&big[0], &small[0]);
    let pass = b.failures == 0
        && s.failures == 0
        && (1.7..=2.1).contains(&b.adds_per_entry)
        && (1.1..=1.45).contains(&s.adds_per_entry);
    outcome(
        pass,
        format!(
            "16x1024 q=16: {:.4} ± {:.4}; 8x256 q=8: {:.4} ± {:.4}",
            b.adds_per_entry, b.stderr, s.adds_per_entry, s.stderr
        ),
    )
}

fn table_uniform() -> Outcome {
    let cells = uniform_targets(10, 1024, &[16], 20, 9, 64).unwrap();
    let c = &cells[0];
    let pass = c.failures == 0 && (1.8..=2.3).contains(&c.adds_per_entry);
    outcome(pass, format!("10x1024 q=16: {:.4} ± {:.4}", c.adds_per_entry, c.stderr))
}

fn baseline_comparison() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
    let target = Matrix::from_fn(512, 4096, |_, _| rng.random_range(-1.0..=1.0f64));
    let x: Vec<Dyadic> = (0..4096).map(|i| Dyadic::new(rng.random_range(-1000i64..=1000), -(i % 9))).collect();
    let (y, cost) = baseline_apply(&target, 16, &x).unwrap();
    let forms = binary_quantize(&target, 16).unwrap();
    let reference = forms.map(lincode::csd_decode).mul_vec(&x).unwrap();
    let mse = quantization_mse(&target, &forms).unwrap();
    let paper_total = 512.0 * (4096.0 * 6.5 + 4095.0);
    let total_dev = rel_dev(cost.additions as f64, paper_total);

    let mut reduction_ok = true;
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let t: Matrix64 = gaussian_build(16, 1024, 1000 + i);
        let plan = decompose(&t, self_design_build(&t, 1).unwrap(), &StageSchedule::until_bits(1, 16, 64)).unwrap();
        let c = plan.cost();
        let d = plan.distortion(&t).unwrap();
        worst = worst.max(c.adds_per_entry);
        reduction_ok &= d.d_rel <= threshold(16) && 1.0 - c.adds_per_entry / 7.5 >= 0.70;
    }
    let pass = y == reference
        && (cost.adds_per_entry - 7.5).abs() <= 0.1
        && total_dev <= 0.01
        && rel_dev(mse, threshold(16)) <= 0.05
        && reduction_ok;
    outcome(
        pass,
        format!(
            "baseline {:.4} adds/entry, {} total ({:.3}% off 15728128), mse/threshold {:.4}; \
             decomposition worst {:.4} adds/entry ({:.1}% reduction)",
            cost.adds_per_entry,
            cost.additions,
            100.0 * total_dev,
            mse / threshold(16),
            worst,
            100.0 * (1.0 - worst / 7.5)
        ),
    )
}

fn property_suites() -> Outcome {
    let config = Config { cases: 1000, failure_persistence: None, ..Config::default() };
    let mut failures = Vec::new();

    let fit_input = (1usize..=6, 1usize..=12, 0usize..=5).prop_flat_map(|(n, k, s)| {
        (
            proptest::collection::vec(prop_oneof![Just(0.0), -2.0..2.0f64], n * k),
            proptest::collection::vec(-3.0..3.0f64, n),
            Just((n, k, s)),
        )
    });

    let mut runner = TestRunner::new(config.clone());
    let r = runner.run(&fit_input, |(b, t, (n, k, s))| {
        let b = Matrix::from_col_major(n, k, b).unwrap();
        let fit = fit_column(&t, &b, s).unwrap();
        for w in fit.trace.windows(2) {
            prop_assert!(w[1] < w[0], "trace {:?}", fit.trace);
        }
        let mut approx = vec![0.0; n];
        for &(j, c) in &fit.coeffs {
            for (a, v) in approx.iter_mut().zip(b.column(j)) {
                *a += c.value::<f64>() * v;
            }
        }
        let direct: f64 = t.iter().zip(&approx).map(|(x, y)| (x - y) * (x - y)).sum();
        prop_assert!((direct - fit.residual_sq).abs() <= 1e-9 * (1.0 + direct));
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("monotonicity: {e}"));
    }

    let mut runner = TestRunner::new(config.clone());
    let r = runner.run(&(fit_input, 1usize..=8, any::<u64>()), |((b, _, (n, k, s)), kt, seed)| {
        let b = Matrix::from_col_major(n, k, b).unwrap();
        let t: Matrix64 = gaussian_build(n, kt, seed);
        let w = fit_stage(&t, &b, s).unwrap();
        prop_assert!(w.columns().iter().all(|c| c.len() <= 1 + s));
        prop_assert!(w.nnz() <= kt * (1 + s));
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("budget: {e}"));
    }

    let mut runner = TestRunner::new(config.clone());
    let r = runner.run(&arb_plan(64, 4), |plan| {
        let back = DecompositionPlan::from_bytes(&plan.to_bytes()).unwrap();
        prop_assert_eq!(back, plan);
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("serialization: {e}"));
    }

    let mut runner = TestRunner::new(config);
    let r = runner.run(&(2usize..=40, 1u64..=1 << 20, 0.0..=1.0f64, 0.0..=1.0f64), |(n, k, a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (f_lo, f_hi) = (angle_error_cdf(n, k, lo).unwrap(), angle_error_cdf(n, k, hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&f_lo) && f_lo <= f_hi && f_hi <= 1.0);
        prop_assert!(rho2_cdf(n, lo).unwrap() <= rho2_cdf(n, hi).unwrap());
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("cdf monotonicity: {e}"));
    }

    if failures.is_empty() {
        outcome(true, "monotonicity, budget, serialization, CDF monotonicity: 1000 cases each")
    } else {
        outcome(false, failures.join("; "))
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("csd scalar law", Duration::from_secs(10), csd_scalar_law),
        ("binary scalar law", Duration::from_secs(10), binary_scalar_law),
        ("mailman multiply", Duration::from_secs(30), mailman),
        ("engine exactness", Duration::from_secs(120), engine_exactness),
        ("angle-error cdf", Duration::from_secs(120), angle_cdf),
        ("distortion lower bound", Duration::from_secs(600), lower_bound),
        ("gaussian targets table", Duration::from_secs(1200), table_gaussian),
        ("uniform targets table", Duration::from_secs(900), table_uniform),
        ("fixed-point baseline", Duration::from_secs(3600), baseline_comparison),
        ("property suites", Duration::from_secs(600), property_suites),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= *budget;
        failed += usize::from(!pass);
        println!(
            "{} [{:>2}] {name}: {} ({:.1}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}

//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see them as they complete).

use std::time::Instant;

use num::BigInt;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use dicore::asymptotics::{dicore_count_asymptotic, rate_k, scan_negativity};
use dicore::core_threshold::{c_star, peel_core, peel_core_traced, sample_uniform_multidigraph};
use dicore::exact_enumeration::{
    brute_force_sequence_count, brute_force_simple_dicores, sequence_count, SequencePredicate,
};
use dicore::experiments::{connectivity_experiment, ConnectivityConfig};
use dicore::graph_analysis::{is_k_strongly_connected, validate_certificate};
use dicore::sampler::{
    replica_rng, sample_admissible_sequence, sample_simple_dicore, to_multidigraph,
};
use dicore::series::ln_big;
use dicore::truncated_poisson::{
    cond_mean, cond_second_factorial_moment, solve_z, tail_prob, tail_series,
};

const MASTER_SEED: u64 = 20260809;

fn report(criterion: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("acceptance {criterion}: PASS");
    } else {
        println!("acceptance {criterion}: FAIL");
        for f in failures {
            println!("  - {f}");
        }
        panic!("{criterion} failed:\n{}", failures.join("\n"));
    }
}

fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let df = (observed.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

#[test]
fn criterion_1_exact_count_oracle_equality() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 1..=3usize {
        for m in 0..=5usize {
            for k1 in 0..=2usize {
                for k2 in 0..=2usize {
                    let brute = brute_force_sequence_count(n, m, k1, k2, SequencePredicate::All)
                        .expect("within enumeration guard");
                    let formula = sequence_count(n, m, k1, k2);
                    if formula != BigInt::from(brute) {
                        failures.push(format!(
                            "sequence_count({n},{m},{k1},{k2}) = {formula} but enumeration gives {brute}"
                        ));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 60 {
        failures.push(format!("runtime {elapsed:?} exceeds 1 minute"));
    }
    report("criterion 1 (exact-count oracle equality)", &failures);
}

#[test]
fn criterion_2_tiny_simple_dicore_census() {
    let mut failures = Vec::new();
    let census22 = brute_force_simple_dicores(2, 2, 1, 1).unwrap();
    if census22 != (1, 1) {
        failures.push(format!("census(2,2,1,1) = {census22:?}, expected (1,1)"));
    }
    let census33 = brute_force_simple_dicores(3, 3, 1, 1).unwrap();
    if census33 != (2, 2) {
        failures.push(format!("census(3,3,1,1) = {census33:?}, expected (2,2)"));
    }

    // empirical law over the (2,2,1,1) support: a single graph, every draw
    // must hit it
    let mut rng = replica_rng(MASTER_SEED, 1);
    for _ in 0..10_000u32 {
        let (g, _) = sample_simple_dicore(2, 2, 1, 1, &mut rng, 100_000).unwrap();
        let mut edges = g.edges().to_vec();
        edges.sort_unstable();
        if edges != vec![(0, 1), (1, 0)] {
            failures.push(format!("unexpected (2,2,1,1) sample {edges:?}"));
            break;
        }
    }

    // (3,3,1,1): two triangles, uniform; chi-square at p > 0.001
    let mut counts = [0u64; 2];
    for _ in 0..10_000u32 {
        let (g, _) = sample_simple_dicore(3, 3, 1, 1, &mut rng, 100_000).unwrap();
        let mut edges = g.edges().to_vec();
        edges.sort_unstable();
        if edges == vec![(0, 1), (1, 2), (2, 0)] {
            counts[0] += 1;
        } else if edges == vec![(0, 2), (1, 0), (2, 1)] {
            counts[1] += 1;
        } else {
            failures.push(format!("unexpected (3,3,1,1) sample {edges:?}"));
            break;
        }
    }
    let p = chi_square_p(&counts, &[5000.0, 5000.0]);
    if p <= 0.001 {
        failures.push(format!("chi-square p = {p} at counts {counts:?}"));
    }
    report("criterion 2 (tiny simple-dicore census)", &failures);
}

#[test]
fn criterion_3_asymptotic_vs_exact() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut errors = Vec::new();
    for &n in &[50usize, 100, 150] {
        let m = 3 * n;
        let exact_ln = ln_big(&sequence_count(n, m, 2, 2));
        let asym = dicore_count_asymptotic(n, m, 2, 2).unwrap();
        // remove the simplicity exponent, multiply by M!: estimates the
        // admissible-sequence count
        let est_ln = asym.log_value - asym.simplicity_exponent + asym.log_m_factorial;
        let rel = (est_ln - exact_ln).exp() - 1.0;
        println!("  criterion 3: N={n} relative error {rel:+.5}");
        if rel.abs() > 0.05 {
            failures.push(format!("relative error {rel} at N={n} exceeds 5%"));
        }
        errors.push(rel.abs());
    }
    if !(errors[0] > errors[1] && errors[1] > errors[2]) {
        failures.push(format!("relative errors {errors:?} not decreasing in N"));
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 600 {
        failures.push(format!("runtime {elapsed:?} exceeds 10 minutes"));
    }
    report("criterion 3 (asymptotic vs exact counts)", &failures);
}

#[test]
fn criterion_4_simplicity_rate() {
    let mut failures = Vec::new();
    let (n, m, k) = (500usize, 1250usize, 2usize);
    let density = m as f64 / n as f64;
    let z = solve_z(density, k as i64).unwrap();
    let m1 = cond_mean(z, k as i64 - 1).unwrap();
    let predicted = (-density - 0.5 * m1 * m1).exp();

    let draws = 20_000u64;
    let mut rng = replica_rng(MASTER_SEED, 4);
    let mut simple = 0u64;
    for _ in 0..draws {
        let seq = sample_admissible_sequence(n, m, k, k, &mut rng).unwrap();
        if to_multidigraph(&seq).is_simple() {
            simple += 1;
        }
    }
    let observed = simple as f64 / draws as f64;
    let se = (predicted * (1.0 - predicted) / draws as f64).sqrt();
    println!(
        "  criterion 4: observed rate {observed:.5}, predicted {predicted:.5}, 3se = {:.5}",
        3.0 * se
    );
    if (observed - predicted).abs() > 3.0 * se {
        failures.push(format!(
            "acceptance rate {observed} outside predicted {predicted} +- {}",
            3.0 * se
        ));
    }
    report("criterion 4 (simplicity rate)", &failures);
}

#[test]
fn criterion_5_connectivity_decay() {
    let mut failures = Vec::new();
    let config = ConnectivityConfig::new(2, 2, vec![50, 100, 200], 2.5, 10_000, MASTER_SEED);
    let result = connectivity_experiment(&config).unwrap();
    let fracs: Vec<f64> = result.rows.iter().map(|r| r.non_sc_fraction()).collect();
    for row in &result.rows {
        println!(
            "  criterion 5: N={} non-SC {}/{} (fraction {}), 2-strong failures among SC {}",
            row.n,
            row.non_sc_count,
            row.reps,
            row.non_sc_fraction(),
            row.kstrong_failures_among_sc
        );
    }
    if !(fracs[0] >= fracs[1] && fracs[1] >= fracs[2]) {
        failures.push(format!("fractions {fracs:?} not monotone nonincreasing"));
    }
    match result.non_sc_slope {
        Some(slope) => {
            println!("  criterion 5: fitted log-log slope {slope:.3}");
            if !(-3.0..=-1.0).contains(&slope) {
                failures.push(format!("slope {slope} outside [-3, -1]"));
            }
        }
        None => failures.push(format!(
            "log-log slope undefined: non-SC counts {:?} leave fewer than two positive \
             fractions to fit (the non-SC probability at density 2.5 is ~1e-5 at N=50, \
             below Monte Carlo resolution at 1e4 reps)",
            result
                .rows
                .iter()
                .map(|r| r.non_sc_count)
                .collect::<Vec<_>>()
        )),
    }
    // 2-strong failures among strongly connected samples at N = 200
    let row200 = result.rows.iter().find(|r| r.n == 200).unwrap();
    let sc = (row200.reps - row200.non_sc_count) as f64;
    let failure_fraction = row200.kstrong_failures_among_sc as f64 / sc;
    if failure_fraction >= 5e-2 {
        failures.push(format!(
            "2-strong failure fraction {failure_fraction} at N=200 is not below 5e-2"
        ));
    }
    report("criterion 5 (connectivity decay)", &failures);
}

#[test]
fn criterion_6_threshold() {
    let start = Instant::now();
    let mut failures = Vec::new();

    // independent oracle: straight 2-D grid search at step 1e-3
    let step = 1e-3;
    let z_max = 6.0;
    let count = (z_max / step) as usize;
    let grid: Vec<f64> = (1..=count).map(|i| i as f64 * step).collect();
    let p2: Vec<f64> = grid.iter().map(|&z| tail_prob(z, 2).unwrap()).collect();
    let p1: Vec<f64> = grid.iter().map(|&z| tail_prob(z, 1).unwrap()).collect();
    let mut oracle = f64::INFINITY;
    for i in 0..count {
        for j in 0..count {
            let t1 = grid[i] / (p2[i] * p1[j]);
            let t2 = grid[j] / (p1[i] * p2[j]);
            let v = t1.max(t2);
            if v < oracle {
                oracle = v;
            }
        }
    }
    let result = c_star(2, 2).unwrap();
    println!(
        "  criterion 6: c*(2,2) = {:.7} (grid oracle {:.7}), argmin ({:.5}, {:.5})",
        result.c_star, oracle, result.argmin.0, result.argmin.1
    );
    if (result.c_star - oracle).abs() > 0.01 {
        failures.push(format!(
            "c* = {} differs from grid oracle {} by more than 0.01",
            result.c_star, oracle
        ));
    }

    // peeling on both sides of the threshold
    let n = 3000usize;
    let reps = 100usize;
    for (offset, want_empty) in [(-0.3, true), (0.3, false)] {
        let c = result.c_star + offset;
        let m = (c * n as f64).floor() as usize;
        let mut hits = 0usize;
        for rep in 0..reps {
            let mut rng = replica_rng(MASTER_SEED + 6, rep as u64);
            let g = sample_uniform_multidigraph(n, m, &mut rng);
            let peel = peel_core(&g, 2, 2);
            let ok = if want_empty {
                peel.core_vertices.is_empty()
            } else {
                peel.core_vertices.len() >= n / 5
            };
            if ok {
                hits += 1;
            }
        }
        println!(
            "  criterion 6: c = c*{offset:+.1}: {hits}/{reps} replicas {}",
            if want_empty {
                "empty"
            } else {
                "with core >= 0.2n"
            }
        );
        if hits < 95 {
            failures.push(format!(
                "only {hits}/{reps} replicas met the c = c*{offset:+.1} expectation"
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() >= 300 {
        failures.push(format!("runtime {elapsed:?} exceeds 5 minutes"));
    }
    report("criterion 6 (threshold)", &failures);
}

#[test]
fn criterion_7_diagnostic_negativity() {
    let mut failures = Vec::new();
    for (sigma, k1) in [(3.0, 2usize), (4.0, 2), (4.0, 3)] {
        match scan_negativity(sigma, k1, 1e-3) {
            Ok(report) => {
                if report.violation.is_some() {
                    failures.push(format!(
                        "negativity violation at (sigma={sigma}, k1={k1}): {:?}",
                        report.violation
                    ));
                }
                if report.h_max >= 0.0 {
                    failures.push(format!("H max {} >= 0 at ({sigma},{k1})", report.h_max));
                }
                if sigma > 1.5 * k1 as f64 {
                    match report.k_max {
                        Some(k_max) if k_max < 0.0 => {}
                        other => failures.push(format!(
                            "K scan missing or nonnegative at ({sigma},{k1}): {other:?}"
                        )),
                    }
                }
            }
            Err(e) => failures.push(format!("scan failed at ({sigma},{k1}): {e}")),
        }
    }
    // dK/drho vanishes at rho = 1/2
    let h = 1e-7;
    for sigma in [3.0f64, 4.0] {
        let d = (rate_k(0.5 + h, sigma) - rate_k(0.5 - h, sigma)) / (2.0 * h);
        if d.abs() > 1e-6 {
            failures.push(format!("dK/drho at 1/2 = {d} (sigma={sigma})"));
        }
    }
    report("criterion 7 (diagnostic negativity)", &failures);
}

#[test]
fn criterion_8_property_suite() {
    let mut failures = Vec::new();

    // truncated-Poisson recurrence, factorial-moment identity, log-concavity
    for i in 1..=30 {
        let z = 0.33 * i as f64;
        for k in 1..=5i64 {
            let fk = tail_series(z, k).unwrap();
            let fk1 = tail_series(z, k - 1).unwrap();
            let mut jump = 1.0;
            for j in 1..k as u64 {
                jump *= z / j as f64;
            }
            if ((fk1 - jump) - fk).abs() > 1e-12 * fk {
                failures.push(format!("recurrence fails at z={z} k={k}"));
            }
            let lhs = cond_second_factorial_moment(z, k).unwrap();
            let rhs = cond_mean(z, k).unwrap() * cond_mean(z, k - 1).unwrap();
            if (lhs - rhs).abs() > 1e-12 * rhs {
                failures.push(format!("factorial identity fails at z={z} k={k}"));
            }
            let mid = tail_series(z * 0.8, k).unwrap();
            let prod = tail_series(z * 0.6, k).unwrap() * tail_series(z, k).unwrap();
            if mid * mid < prod * (1.0 - 1e-12) {
                failures.push(format!("log-concavity fails near z={z} k={k}"));
            }
        }
    }

    // peeling order-independence and idempotence
    for trial in 0..25u64 {
        let mut rng = replica_rng(MASTER_SEED + 8, trial);
        let g = sample_uniform_multidigraph(60, 150 + trial as usize, &mut rng);
        let reference = peel_core(&g, 2, 2);
        for seed in 0..4u64 {
            let mut order = replica_rng(MASTER_SEED + 9, seed);
            let traced = peel_core_traced(&g, 2, 2, &mut order);
            if traced.core_vertices != reference.core_vertices {
                failures.push(format!("order-dependent core at trial {trial}"));
            }
        }
        let (core, _) = g.induced_subgraph(&reference.core_vertices);
        let again = peel_core(&core, 2, 2);
        if again.core_vertices.len() != reference.core_vertices.len()
            || again.core_edges != reference.core_edges
        {
            failures.push(format!("peeling not idempotent at trial {trial}"));
        }
    }

    // sampler determinism under fixed seeds
    let draw = |seed: u64| {
        let mut rng = replica_rng(seed, 3);
        sample_simple_dicore(25, 70, 2, 2, &mut rng, 100_000)
            .unwrap()
            .0
    };
    if draw(MASTER_SEED) != draw(MASTER_SEED) {
        failures.push("sampler not deterministic under a fixed seed".into());
    }

    // certificate validity on every negative verdict
    let mut negative = 0;
    for trial in 0..40u64 {
        let mut rng = replica_rng(MASTER_SEED + 10, trial);
        let g = sample_uniform_multidigraph(14, 30 + (trial as usize % 20), &mut rng);
        for k in [1usize, 2, 3] {
            let verdict = is_k_strongly_connected(&g, k).unwrap();
            if !verdict.k_strong {
                negative += 1;
                let cert = verdict.certificate.as_ref().expect("certificate");
                if !validate_certificate(&g, cert, k) {
                    failures.push(format!("invalid certificate at trial {trial} k={k}"));
                }
            }
        }
    }
    if negative == 0 {
        failures.push("no negative verdicts exercised".into());
    }
    report("criterion 8 (property suite)", &failures);
}

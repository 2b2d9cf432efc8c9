//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use common::{finite_difference, median, swap_law, TABLE_FAMILIES};
use qae_core::ansatz::{initial_parameters, AnsatzFamily, AnsatzSpec};
use qae_core::circuit::resource_count;
use qae_core::datasets::{bars_and_stripes_2x4, encode, framed_4x4_dataset, make_split};
use qae_core::descriptors::{entangling_capability, expressibility, DescriptorConfig};
use qae_core::experiment::{run_grid, timing_summary, CellResult, DatasetKind, ExperimentConfig};
use qae_core::quantum::{QubitSubset, StateVector};
use qae_core::rng;
use qae_core::trainer::{
    ancilla_zero_probability, cost, gradient, train, CompressionConfig, EvalMode, Evaluator,
};
use rand::Rng;

const INIT_SEEDS: [u64; 3] = [0, 1, 2];
const DESCRIPTOR_SEED: u64 = 1;

struct Gate {
    failed: usize,
}

impl Gate {
    fn check(&mut self, name: &str, pass: bool, detail: String, started: Instant) {
        if !pass {
            self.failed += 1;
        }
        println!(
            "{} {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64()
        );
    }
}

fn resources(gate: &mut Gate) {
    let t = Instant::now();
    let mut mismatches = 0;
    let mut checked = 0;
    for family in TABLE_FAMILIES {
        for n in 2..=6 {
            for l in 1..=8 {
                let r = resource_count(&AnsatzSpec::new(family, n, l).unwrap().build().unwrap());
                let want = match family {
                    AnsatzFamily::Circuit1 => (n * (l + 1), n * l, (n + 1) * l + 1),
                    AnsatzFamily::Circuit2 => (4 * (n - 1) * l, (n - 1) * l, 6 * l),
                    _ => (3 * n * l, n * l, (n + 3) * l),
                };
                checked += 1;
                if (r.num_params, r.two_qubit_gates, r.depth) != want {
                    mismatches += 1;
                }
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    gate.check(
        "resource-counts",
        mismatches == 0 && secs < 1.0,
        format!("{checked} (family, n, L) cases, {mismatches} mismatches"),
        t,
    );
}

fn descriptors(gate: &mut Gate) {
    let t = Instant::now();
    let expr = DescriptorConfig {
        seed: DESCRIPTOR_SEED,
        ..DescriptorConfig::expressibility_default()
    };
    let ent = DescriptorConfig {
        seed: DESCRIPTOR_SEED,
        ..DescriptorConfig::entangling_default()
    };
    let targets = [
        (0.130, 0.03, 0.800),
        (0.008, 0.01, 0.743),
        (0.005, 0.01, 0.826),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (family, (eps_want, eps_tol, e_want)) in TABLE_FAMILIES.into_iter().zip(targets) {
        let c = AnsatzSpec::new(family, 4, 3).unwrap().build().unwrap();
        let eps = expressibility(&c, &expr).unwrap();
        let e = entangling_capability(&c, &ent).unwrap();
        pass &= (eps - eps_want).abs() <= eps_tol && (e - e_want).abs() <= 0.02;
        parts.push(format!(
            "{family} eps={eps:.4} (want {eps_want}±{eps_tol}) E={e:.4} (want {e_want}±0.02)"
        ));
    }
    pass &= t.elapsed().as_secs_f64() < 120.0;
    gate.check("descriptors", pass, parts.join("; "), t);
}

fn swap_test(gate: &mut Gate) {
    let t = Instant::now();
    let mut rng = rng::stream(2024, 0);
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let family = TABLE_FAMILIES[rng.random_range(0..3)];
        let n = rng.random_range(2..=4);
        let layers = rng.random_range(1..=3);
        let mask = rng.random_range(1..(1usize << n) - 1);
        let trash: Vec<usize> = (0..n).filter(|q| (mask >> q) & 1 == 1).collect();
        let circuit = AnsatzSpec::new(family, n, layers).unwrap().build().unwrap();
        let theta = initial_parameters(circuit.num_params(), i);
        let data = StateVector::random(n, &mut rng).unwrap();
        let subset = QubitSubset::new(trash.clone(), n).unwrap();
        let p0 = ancilla_zero_probability(&circuit, &subset, &theta, &data).unwrap();
        worst = worst.max((p0 - swap_law(&circuit, &theta, &data, &trash)).abs());
    }
    gate.check(
        "swap-test-law",
        worst < 1e-9,
        format!("200 instances, max error {worst:.2e}"),
        t,
    );
}

fn gradient_check(gate: &mut Gate) {
    let t = Instant::now();
    let mut rng = rng::stream(2024, 1);
    let framed = framed_4x4_dataset();
    let bars = bars_and_stripes_2x4();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let (spec, image) = if i % 5 == 4 {
            let spec = AnsatzSpec::new(AnsatzFamily::Circuit1Device3q, 3, rng.random_range(1..=3))
                .unwrap();
            (spec, &bars[rng.random_range(0..bars.len())])
        } else {
            let family = TABLE_FAMILIES[rng.random_range(0..3)];
            let spec = AnsatzSpec::new(family, 4, rng.random_range(1..=3)).unwrap();
            (spec, &framed[rng.random_range(0..framed.len())])
        };
        let latent = rng.random_range(1..spec.num_qubits);
        let config = CompressionConfig::new(spec, latent).unwrap();
        let theta = initial_parameters(spec.build().unwrap().num_params(), 1000 + i);
        let batch = [encode(0, image).unwrap()];
        let analytic = gradient(&theta, &batch, &config).unwrap();
        let numeric = finite_difference(&theta, &batch, &config, 1e-5);
        for (a, b) in analytic.iter().zip(&numeric) {
            worst = worst.max((a - b).abs());
        }
    }
    gate.check(
        "gradient-check",
        worst < 1e-4,
        format!("50 triples, h=1e-5, max componentwise error {worst:.2e}"),
        t,
    );
}

fn job_accounting(gate: &mut Gate) {
    let t = Instant::now();
    let split = make_split(&bars_and_stripes_2x4(), 10, 2, 5, 0).unwrap();
    let spec = AnsatzSpec::new(AnsatzFamily::Circuit1Device3q, 3, 3).unwrap();
    let mut config = CompressionConfig::new(spec, 2).unwrap();
    config.batch_size = 5;
    config.epochs = 1;
    let mut pass = spec.build().unwrap().num_params() == 12 && split.train.len() == 20;
    let mut seen = Vec::new();
    for n_iter in [1, 2, 10] {
        config.n_iter = n_iter;
        let jobs = train(&split, &config).unwrap().records[0].jobs_executed;
        pass &= jobs == 500 * n_iter as u64;
        seen.push(format!("N_iter={n_iter}: {jobs}"));
    }
    gate.check(
        "job-accounting",
        pass,
        format!("jobs/epoch {}", seen.join(", ")),
        t,
    );
}

fn grid_runs(base: ExperimentConfig, tmp: &std::path::Path) -> Vec<Vec<CellResult>> {
    INIT_SEEDS
        .iter()
        .map(|&seed| {
            let mut cfg = base.clone();
            cfg.init_seed = seed;
            cfg.output = tmp.join(format!("{}-seed{seed}", base.name));
            run_grid(&cfg, |_| {}).unwrap()
        })
        .collect()
}

fn bars_training(gate: &mut Gate, tmp: &std::path::Path) {
    let t = Instant::now();
    let cfg = ExperimentConfig::with_defaults("bars", DatasetKind::Bars2x4, tmp);
    let runs = grid_runs(cfg, tmp);
    let finals: Vec<f64> = runs
        .iter()
        .map(|r| r[0].run.final_loss().unwrap())
        .collect();
    let best = finals.iter().copied().fold(f64::INFINITY, f64::min);
    let improved = runs.iter().all(|r| {
        let rec = &r[0].run.records;
        r[0].run.best_loss().unwrap() < rec[0].mean_loss
    });
    gate.check(
        "bars-training",
        best <= 0.08 && improved && t.elapsed().as_secs_f64() < 300.0,
        format!("final loss per seed {finals:.4?}, best {best:.4} (want <= 0.08)"),
        t,
    );
}

fn framed_training(gate: &mut Gate) {
    let t = Instant::now();
    let split = make_split(&framed_4x4_dataset(), 14, 3, 7, 0).unwrap();
    let spec = AnsatzSpec::new(AnsatzFamily::Circuit3, 4, 7).unwrap();
    let finals: Vec<f64> = INIT_SEEDS
        .iter()
        .map(|&seed| {
            let mut config = CompressionConfig::new(spec, 3).unwrap();
            config.init_seed = seed;
            train(&split, &config).unwrap().final_loss().unwrap()
        })
        .collect();
    let best = finals.iter().copied().fold(f64::INFINITY, f64::min);
    gate.check(
        "framed-training-circuit3-L7",
        best <= 0.05 && t.elapsed().as_secs_f64() < 1800.0,
        format!("final loss per seed {finals:.4?}, best {best:.4} (want <= 0.05)"),
        t,
    );
}

fn reduced_grid(gate: &mut Gate, tmp: &std::path::Path) {
    let t = Instant::now();
    let mut cfg = ExperimentConfig::with_defaults("reduced", DatasetKind::Framed4x4, tmp);
    cfg.layers = vec![3];
    let runs = grid_runs(cfg, tmp);
    let per_seed = t.elapsed().as_secs_f64() / INIT_SEEDS.len() as f64;

    // Test fidelities pooled over init seeds, keyed by (family, latent).
    let mut pooled: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for cells in &runs {
        for c in cells {
            pooled
                .entry((c.cell.family.to_string(), c.cell.n_latent))
                .or_default()
                .extend(c.fidelities.iter().map(|f| f.fidelity));
        }
    }

    let spread: Vec<f64> = pooled
        .iter()
        .filter(|((_, m), _)| *m >= 2)
        .flat_map(|(_, v)| v.iter().copied())
        .collect();
    let max = spread.iter().copied().fold(f64::MIN, f64::max);
    let min = spread.iter().copied().fold(f64::MAX, f64::min);
    gate.check(
        "fidelity-spread",
        max >= 0.90 && min >= 0.55 && per_seed < 300.0,
        format!(
            "L=3, ratios 4->3 and 4->2, {} fidelities: max {max:.4} (want >= 0.90), min {min:.4} (want >= 0.55); {per_seed:.0}s per grid",
            spread.len()
        ),
        t,
    );

    let t = Instant::now();
    let mut trend_ok = true;
    let mut parts = Vec::new();
    for family in TABLE_FAMILIES {
        let med: Vec<f64> = [3, 2, 1]
            .iter()
            .map(|&m| median(&pooled[&(family.to_string(), m)]))
            .collect();
        let ok = med[0] >= med[1] && med[1] >= med[2];
        trend_ok &= ok;
        parts.push(format!(
            "{family} 4->3 {:.4} 4->2 {:.4} 4->1 {:.4}{}",
            med[0],
            med[1],
            med[2],
            if ok { "" } else { " (violated)" }
        ));
    }
    gate.check(
        "compression-trend",
        trend_ok,
        format!("median test fidelity, L=3: {}", parts.join("; ")),
        t,
    );

    let t = Instant::now();
    let manifests: Vec<_> = runs.iter().flatten().map(|c| c.manifest.clone()).collect();
    let rows = timing_summary(&manifests);
    let epoch_time = |f: AnsatzFamily| {
        rows.iter()
            .find(|r| r.family == f && r.layers == 3)
            .map(|r| r.mean_epoch_seconds)
            .unwrap()
    };
    let (c1, c2, c3) = (
        epoch_time(AnsatzFamily::Circuit1),
        epoch_time(AnsatzFamily::Circuit2),
        epoch_time(AnsatzFamily::Circuit3),
    );
    gate.check(
        "timing-order",
        c1 < c3 && c3 < c2,
        format!(
            "mean epoch seconds at L=3: circuit1 {c1:.4} < circuit3 {c3:.4} < circuit2 {c2:.4}"
        ),
        t,
    );
}

fn shots_consistency(gate: &mut Gate) {
    let t = Instant::now();
    let shots = 8192u64;
    let framed = framed_4x4_dataset();
    let mut worst_z = 0.0f64;
    let mut count = 0;
    for (k, family) in TABLE_FAMILIES.into_iter().enumerate() {
        for latent in 1..4 {
            let exact =
                CompressionConfig::new(AnsatzSpec::new(family, 4, 3).unwrap(), latent).unwrap();
            let mut noisy = exact.clone();
            noisy.eval_mode = EvalMode::Shots { shots, seed: 77 };
            let ev = Evaluator::new(&noisy).unwrap();
            for i in 0..10u64 {
                let theta = initial_parameters(ev.circuit().num_params(), 500 + i);
                let img = encode(0, &framed[(k * 11 + latent * 3 + i as usize) % 32]).unwrap();
                let j = cost(&theta, &img, &exact).unwrap();
                let p0 = 1.0 - j / 2.0;
                let sigma = (2.0 * (p0 * (1.0 - p0) / shots as f64).sqrt()).max(1.0 / shots as f64);
                let sample = ev.cost(&theta, &img.state, i).unwrap();
                worst_z = worst_z.max((sample.raw - j).abs() / sigma);
                count += 1;
            }
        }
    }
    gate.check(
        "shots-vs-exact",
        worst_z <= 5.0,
        format!("{count} instances at {shots} shots, max deviation {worst_z:.2} sigma (want <= 5)"),
        t,
    );
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut gate = Gate { failed: 0 };
    resources(&mut gate);
    descriptors(&mut gate);
    swap_test(&mut gate);
    gradient_check(&mut gate);
    job_accounting(&mut gate);
    shots_consistency(&mut gate);
    bars_training(&mut gate, tmp.path());
    framed_training(&mut gate);
    reduced_grid(&mut gate, tmp.path());
    if gate.failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", gate.failed);
        ExitCode::FAILURE
    }
}

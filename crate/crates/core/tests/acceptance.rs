//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use fem_evidence::bayes::ProductPrior;
use fem_evidence::config::ExperimentConfig;
use fem_evidence::experiment::{evaluate, run_experiment, RunOptions};
use fem_evidence::fem::modal_analysis;
use fem_evidence::oracle::grid_evidence;
use fem_evidence::presets;
use fem_evidence::sampler::{run_nested_sampling, NestedSampler, SamplerConfig};
use fem_evidence::selection::{bayes_factor, build_report, jeffreys_classify, JeffreysLabel, ModelEvidence};
use statrs::function::erf::erf;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn shipped() -> (ExperimentConfig, String) {
    ExperimentConfig::read(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/hbeam.toml")).unwrap()
}

fn rigid_body_modes() -> Outcome {
    let t = Instant::now();
    let modal = modal_analysis(&presets::hbeam(), 13).map_err(|e| e.to_string())?;
    let below = modal.frequencies_hz.iter().filter(|&&f| f < 1e-3).count();
    within(t.elapsed(), 1.0)?;
    check(below == 6, || format!("{below} frequencies below 1e-3 Hz"))?;
    Ok(format!(
        "6 rigid modes, first elastic {:.2} Hz",
        modal.frequencies_hz[6]
    ))
}

fn cantilever_closed_form() -> Outcome {
    let t = Instant::now();
    let model = cantilever(50, 1.0);
    let modal = modal_analysis(&model, 30).map_err(|e| e.to_string())?;
    let fe = frequencies_along(&model, &modal, 1);
    let roots = [1.875_104_068_7, 4.694_091_132_9, 7.854_757_438_2];
    let mut worst: f64 = 0.0;
    for (k, lambda) in roots.iter().enumerate() {
        let err = rel_err(fe[k], bending_frequency(*lambda, 1.0));
        worst = worst.max(err);
    }
    within(t.elapsed(), 5.0)?;
    check(worst < 0.01, || format!("worst relative error {worst:.2e}"))?;
    Ok(format!("worst relative error {worst:.2e}"))
}

fn sampler_calibration() -> Outcome {
    let t = Instant::now();
    let exact = (erf(5.0 / 2f64.sqrt()) / 10.0).ln();
    let prior = ProductPrior::uniform(&[(-5.0, 5.0)]).unwrap();
    let like = |x: &[f64]| -0.5 * x[0] * x[0] - 0.5 * (2.0 * PI).ln();
    let runs = 50;
    let (mut inside, mut bias) = (0, 0.0);
    for seed in 0..runs {
        let cfg = SamplerConfig {
            n_live: 100,
            max_iterations: 10_000,
            termination_tolerance: Some(1e-3),
            rng_seed: seed,
            ..Default::default()
        };
        let r = NestedSampler::initialize(prior.clone(), &like, cfg)
            .and_then(|s| s.run())
            .map_err(|e| e.to_string())?;
        let d = r.log_evidence - exact;
        bias += d / runs as f64;
        if d.abs() <= 3.0 * r.log_evidence_error {
            inside += 1;
        }
    }
    within(t.elapsed(), 30.0)?;
    check(inside * 10 >= runs * 9, || format!("{inside}/{runs} within 3 sigma"))?;
    check(bias.abs() < 0.1, || format!("mean bias {bias:.3}"))?;
    Ok(format!("{inside}/{runs} within 3 sigma, mean bias {bias:+.4}"))
}

fn sampler_vs_grid() -> Outcome {
    let t = Instant::now();
    let (mut cfg, _) = shipped();
    cfg.hypotheses.retain(|h| h.name == "1A");
    cfg.hypotheses[0].name = "E2E3".into();
    cfg.hypotheses[0].free_elements = vec![2, 3];
    cfg.comparisons.clear();
    let exp = cfg.build(None).map_err(|e| e.to_string())?;
    let problem = &exp.problems[0];
    let z_grid = grid_evidence(problem, 256).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let sampler = SamplerConfig {
            rng_seed: seed,
            ..exp.sampler.clone()
        };
        let r = run_nested_sampling(problem, &sampler).map_err(|e| e.to_string())?;
        let d = (r.log_evidence - z_grid).abs();
        let tol = f64::max(0.2, 3.0 * r.log_evidence_error);
        check(d <= tol, || {
            format!("seed {seed}: |{} - {z_grid}| > {tol}", r.log_evidence)
        })?;
        worst = worst.max(d);
    }
    within(t.elapsed(), 300.0)?;
    Ok(format!("grid ln Z {z_grid:.5}, worst deviation {worst:.4}"))
}

fn experiment_reproduction() -> Outcome {
    let t = Instant::now();
    let (cfg, source) = shipped();
    let exp = cfg.build(Some(&source)).map_err(|e| e.to_string())?;
    let outcome = evaluate(&exp, cfg.sampler.rng_seed, true).map_err(|e| e.to_string())?;
    let z = |name: &str| {
        outcome
            .hypotheses
            .iter()
            .find(|h| h.name == name)
            .map(|h| ModelEvidence {
                name: name.into(),
                log_evidence: h.result.log_evidence,
                log_evidence_error: h.result.log_evidence_error,
                n_parameters: h.free_elements.len(),
            })
            .unwrap()
    };
    let summary = ["1A", "1B", "1C", "2A", "2B", "2C"]
        .map(|n| format!("{n} {:.4}", z(n).log_evidence))
        .join(", ");
    for top in ["1A", "2B"] {
        for other in ["1B", "1C", "2A", "2C"] {
            check(z(top).log_evidence > z(other).log_evidence, || {
                format!("{top} does not rank above {other} ({summary})")
            })?;
        }
    }
    let (label, _) = jeffreys_classify(bayes_factor(&z("1A"), &z("2A"))).map_err(|e| e.to_string())?;
    check(label >= JeffreysLabel::Strong, || {
        format!(
            "1A vs 2A is {label} (ln factor {:.4}), need at least Strong ({summary})",
            bayes_factor(&z("1A"), &z("2A"))
        )
    })?;
    let (label, _) = jeffreys_classify(bayes_factor(&z("1A"), &z("2B"))).map_err(|e| e.to_string())?;
    check(label == JeffreysLabel::Weak, || format!("1A vs 2B is {label}"))?;
    within(t.elapsed(), 900.0)?;
    Ok(summary)
}

fn quick_config() -> String {
    let (_, src) = shipped();
    src.replace("n_live = 100", "n_live = 16")
        .replace("max_iterations = 1000", "max_iterations = 40")
        .replace("mcmc_steps = 20", "mcmc_steps = 4")
        .replace("posterior_samples = 1000", "posterior_samples = 50")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("quick.toml");
    fs::write(&path, quick_config()).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let opts = RunOptions {
            out_dir: dir.path().join(run),
            seed: Some(42),
            trace: true,
            concurrent: false,
        };
        run_experiment(&path, &opts).map_err(|e| e.to_string())?;
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&opts.out_dir)
            .map_err(|e| e.to_string())?
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        outputs.push(files);
    }
    check(outputs[0] == outputs[1], || "repeated runs differ".into())?;
    let n_files = outputs[0].len();

    let cfg = ExperimentConfig::from_toml_str(&quick_config()).map_err(|e| e.to_string())?;
    let exp = cfg.build(None).map_err(|e| e.to_string())?;
    let seq = evaluate(&exp, 42, false).map_err(|e| e.to_string())?;
    let par = evaluate(&exp, 42, true).map_err(|e| e.to_string())?;
    for (a, b) in seq.hypotheses.iter().zip(&par.hypotheses) {
        let same = a.result.log_evidence.to_bits() == b.result.log_evidence.to_bits()
            && a.result.dead_points.len() == b.result.dead_points.len()
            && a.result
                .dead_points
                .iter()
                .zip(&b.result.dead_points)
                .all(|(x, y)| x.theta == y.theta && x.log_likelihood.to_bits() == y.log_likelihood.to_bits());
        check(same, || {
            format!("{} differs between sequential and concurrent runs", a.name)
        })?;
    }
    Ok(format!(
        "{n_files} files byte-identical, {} hypotheses schedule-invariant",
        seq.hypotheses.len()
    ))
}

fn invariants() -> Outcome {
    let prior = ProductPrior::uniform(&[(-5.0, 5.0), (-5.0, 5.0)]).unwrap();
    let like = |x: &[f64]| -0.5 * (x[0] * x[0] + 4.0 * x[1] * x[1]);
    let cfg = SamplerConfig {
        n_live: 100,
        max_iterations: 800,
        rng_seed: 5,
        ..Default::default()
    };
    let r = NestedSampler::initialize(prior, &like, cfg)
        .and_then(|s| s.run())
        .map_err(|e| e.to_string())?;
    let monotone = r
        .dead_points
        .windows(2)
        .all(|w| w[0].log_likelihood <= w[1].log_likelihood);
    check(monotone, || "dead-point likelihoods decrease".into())?;
    let total = r.total_weight();
    check((total - 1.0).abs() < 1e-9, || {
        format!("posterior weights sum to {total}")
    })?;

    let models: Vec<ModelEvidence> = [("a", -2.0, 3), ("b", -11.2, 5), ("c", -5.5, 2)]
        .iter()
        .map(|&(n, z, k)| ModelEvidence {
            name: n.into(),
            log_evidence: z,
            log_evidence_error: 0.05,
            n_parameters: k,
        })
        .collect();
    for p in &models {
        for q in &models {
            check(bayes_factor(p, q) == -bayes_factor(q, p), || {
                "factor not antisymmetric".into()
            })?;
        }
    }
    let pairs = vec![("a".to_string(), "b".to_string()), ("b".to_string(), "a".to_string())];
    let report = build_report(&models, &pairs).map_err(|e| e.to_string())?;
    check(report.pairs[0].log_e_factor == -report.pairs[1].log_e_factor, || {
        "report not antisymmetric".into()
    })?;

    for (f, want) in [
        (9.2, JeffreysLabel::BeyondReasonableDoubt),
        (3.5, JeffreysLabel::Strong),
        (0.0, JeffreysLabel::Weak),
    ] {
        let (got, _) = jeffreys_classify(f).map_err(|e| e.to_string())?;
        check(got == want, || {
            format!("ln factor {f} classified as {got}, expected {want}")
        })?;
    }
    Ok(format!(
        "{} dead points monotone, weight sum {total:.12}",
        r.dead_points.len()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 rigid-body modes", rigid_body_modes),
        ("2 cantilever closed form", cantilever_closed_form),
        ("3 sampler calibration", sampler_calibration),
        ("4 sampler vs grid", sampler_vs_grid),
        ("5 experiment reproduction", experiment_reproduction),
        ("6 determinism", determinism),
        ("7 invariant suites", invariants),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1} s): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1} s): {reason}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

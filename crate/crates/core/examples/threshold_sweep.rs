//! Accuracy and iteration counts across early-convergence thresholds.
//!
//! ```text
//! cargo run --release -p resonator-core --example threshold_sweep -- \
//!     <brn|imf|acf> <factors> <codebook_size> <dim> <trials> [param] [activation]
//! ```
//!
//! `param` is sigma for IMF or the flip rate for ACF; `activation` is the
//! attention threshold (identity when omitted). Pass `--f32` anywhere to run
//! the attention path in single precision.

use std::time::Instant;

use resonator::bench::{run_trial, TrialResult};
use resonator::factorizer::{Activation, FactorizerConfig, Variant, VariantKind, VariantSpec};
use resonator::Scalar;

const THRESHOLDS: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];

fn trials_at<S: Scalar>(cfg: &FactorizerConfig, trials: u64) -> Vec<TrialResult> {
    (0..trials)
        .map(|seed| run_trial::<S>(seed, cfg).expect("trial"))
        .collect()
}

fn main() {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    let single = args.iter().any(|a| a == "--f32");
    args.retain(|a| a != "--f32");
    if args.len() < 5 {
        eprintln!("usage: threshold_sweep <variant> <factors> <codebook_size> <dim> <trials> [param] [activation]");
        std::process::exit(2);
    }
    let kind: VariantKind = args[0].parse().expect("variant");
    let factors: usize = args[1].parse().expect("factors");
    let m: usize = args[2].parse().expect("codebook size");
    let dim: usize = args[3].parse().expect("dim");
    let trials: u64 = args[4].parse().expect("trials");
    let param: f64 = args.get(5).map_or(0.0, |s| s.parse().expect("param"));
    let activation = match args.get(6) {
        Some(t) => Activation::Threshold {
            t: t.parse().expect("activation"),
        },
        None => Activation::Identity,
    };
    let variant = match kind {
        VariantKind::Brn => Variant::Brn,
        VariantKind::Imf => Variant::Imf { sigma: param },
        VariantKind::Acf => Variant::Acf { flip_rate: param },
    };
    let spec = VariantSpec {
        variant,
        activation,
    };

    println!("threshold,accuracy,converged,mean_iterations,seconds");
    for t in THRESHOLDS {
        let mut cfg = FactorizerConfig::new(spec, factors, m, dim, 0);
        cfg.convergence_threshold = t;
        let start = Instant::now();
        let (mut correct, mut converged, mut iters) = (0u64, 0u64, 0u64);
        let results = if single {
            trials_at::<f32>(&cfg, trials)
        } else {
            trials_at::<f64>(&cfg, trials)
        };
        for r in results {
            correct += r.correct as u64;
            converged += r.converged as u64;
            iters += r.iterations as u64;
        }
        println!(
            "{t},{:.4},{:.4},{:.1},{:.2}",
            correct as f64 / trials as f64,
            converged as f64 / trials as f64,
            iters as f64 / trials as f64,
            start.elapsed().as_secs_f64()
        );
    }
}

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use resonator::bench::{
    brute_force_oracle, emit_report, run_sweep_with, run_trial_detailed, trial_seed,
    CapacityReport, CapacityRow, Precision, PresetMatch, ReportFormat, SweepConfig, TrialDetail,
    TrialResult,
};
use resonator::factorizer::{FactorizerConfig, VariantKind};
use serde_json::json;

use crate::args::{FormatArg, OracleArgs, PresetArgs, SingleArgs, SweepArgs};
use crate::config::{
    apply_model, apply_sweep, load_document, preset_table, single_instance, to_sweep_config,
};
use crate::Failure;

fn detailed(
    precision: Precision,
    seed: u64,
    cfg: &FactorizerConfig,
) -> resonator::Result<(TrialResult, TrialDetail)> {
    match precision {
        Precision::F32 => run_trial_detailed::<f32>(seed, cfg),
        Precision::F64 => run_trial_detailed::<f64>(seed, cfg),
    }
}

fn join(indices: &[usize]) -> String {
    indices
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn describe(cfg: &FactorizerConfig) -> String {
    let spec = &cfg.variant;
    let mut s = spec.kind().to_string();
    if let Some(sigma) = spec.variant.sigma() {
        let _ = write!(s, " sigma={sigma}");
    }
    if let Some(r) = spec.variant.flip_rate() {
        let _ = write!(s, " flip_rate={r}");
    }
    match spec.activation.threshold() {
        Some(t) => {
            let _ = write!(s, " activation_threshold={t}");
        }
        None => s.push_str(" activation=identity"),
    }
    s
}

pub fn factorize(a: &SingleArgs) -> Result<ExitCode, Failure> {
    let mut doc = load_document(a.model.config.as_deref())?;
    apply_model(&mut doc, &a.model);
    let (cfg, _) = single_instance(doc, a.codebook_size)?;
    let table = preset_table(a.model.presets_path.as_deref())?;
    let resolved = cfg.resolve(cfg.search_space_sizes[0], &table)?;
    let t = &resolved.template;
    let (result, detail) = detailed(cfg.precision, cfg.seed, t)?;

    println!("variant     {}", describe(t));
    println!(
        "instance    F={} M={} D={} seed={}",
        t.factors, t.codebook_size, t.dim, cfg.seed
    );
    println!("decoded     {}", join(&detail.decoded));
    println!("truth       {}", join(&detail.instance.truth));
    println!("iterations  {}", result.iterations);
    println!("converged   {}", result.converged);
    println!("correct     {}", result.correct);
    Ok(if result.correct {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn oracle_check(a: &OracleArgs) -> Result<ExitCode, Failure> {
    let model = &a.single.model;
    let mut doc = load_document(model.config.as_deref())?;
    apply_model(&mut doc, model);
    if let Some(n) = a.trials {
        doc.insert("trials".into(), n.into());
    }
    doc.entry("trials").or_insert(50.into());
    let (cfg, _) = single_instance(doc, a.single.codebook_size)?;
    let size = cfg.search_space_sizes[0];
    if size > a.oracle_cap {
        return Err(resonator::Error::OracleCapExceeded {
            size: size as u128,
            cap: a.oracle_cap,
        }
        .into());
    }
    let table = preset_table(model.presets_path.as_deref())?;
    let resolved = cfg.resolve(size, &table)?;

    let (mut converged, mut agree) = (0usize, 0usize);
    for trial in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, 0, trial);
        let (result, detail) = detailed(cfg.precision, seed, &resolved.template)?;
        if !result.converged {
            continue;
        }
        converged += 1;
        let oracle = brute_force_oracle(
            &detail.instance.product,
            &detail.instance.books,
            a.oracle_cap,
        )?;
        if oracle.indices == detail.decoded {
            agree += 1;
        } else {
            log::warn!(
                "trial {trial}: decoded [{}], oracle [{}]",
                join(&detail.decoded),
                join(&oracle.indices)
            );
        }
    }
    let rate = if converged == 0 {
        1.0
    } else {
        agree as f64 / converged as f64
    };
    println!("variant     {}", describe(&resolved.template));
    println!("trials      {}", cfg.trials);
    println!("converged   {converged}");
    println!("agreement   {agree}/{converged} ({:.2}%)", 100.0 * rate);
    Ok(if agree == converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn progress_line(row: &CapacityRow) {
    eprintln!(
        "[{}] search_space={} M={} accuracy={:.4} ci=[{:.4}, {:.4}] mean_iterations={:.1}",
        row.variant,
        row.search_space,
        row.codebook_size,
        row.accuracy,
        row.ci_low,
        row.ci_high,
        row.mean_iterations
    );
}

fn sweep_report(a: &SweepArgs) -> Result<CapacityReport, Failure> {
    let mut doc = load_document(a.model.config.as_deref())?;
    apply_sweep(&mut doc, a);
    let cfg: SweepConfig = to_sweep_config(doc)?;
    let table = preset_table(a.model.presets_path.as_deref())?;
    // Resolve everything up front so bad hyperparameters fail before any trial runs.
    for &size in &cfg.search_space_sizes {
        cfg.resolve(size, &table)?;
    }
    Ok(run_sweep_with(&cfg, &table, progress_line)?)
}

fn report_format(a: &SweepArgs) -> ReportFormat {
    match a.format {
        Some(FormatArg::Csv) => ReportFormat::Csv,
        Some(FormatArg::Json) => ReportFormat::Json,
        None => match a.output.as_deref().and_then(Path::extension) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        },
    }
}

fn check_writable(a: &SweepArgs) -> Result<(), Failure> {
    // Catch an unusable output directory before spending time on trials.
    if let Some(dir) = a.output.as_deref().and_then(Path::parent) {
        if !dir.as_os_str().is_empty() && !dir.is_dir() {
            return Err(Failure::Runtime(anyhow::anyhow!(
                "cannot write {}: {} is not a directory",
                a.output.as_deref().unwrap_or(dir).display(),
                dir.display()
            )));
        }
    }
    Ok(())
}

fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Runtime(anyhow::anyhow!("cannot write to standard output: {e}")))
}

pub fn sweep(a: &SweepArgs) -> Result<ExitCode, Failure> {
    check_writable(a)?;
    let report = sweep_report(a)?;
    let format = report_format(a);
    match &a.output {
        Some(path) => emit_report(&report, format, path)?,
        None => write_stdout(&report.render(format)?)?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn capacity(a: &SweepArgs) -> Result<ExitCode, Failure> {
    check_writable(a)?;
    let report = sweep_report(a)?;
    if let Some(path) = &a.output {
        emit_report(&report, report_format(a), path)?;
    }
    let mut text = String::new();
    for row in &report.rows {
        let _ = writeln!(
            text,
            "{:>14}  accuracy {:.4}  ci [{:.4}, {:.4}]  mean_iterations {:.1}",
            row.search_space, row.accuracy, row.ci_low, row.ci_high, row.mean_iterations
        );
    }
    let _ = match report.operational_capacity {
        Some(c) => writeln!(text, "operational_capacity {c}"),
        None => writeln!(text, "operational_capacity none"),
    };
    write_stdout(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn kinds(a: &PresetArgs) -> Vec<VariantKind> {
    match a.variant {
        Some(v) => vec![crate::config::variant_name(v)
            .parse()
            .expect("variant names parse")],
        None => vec![VariantKind::Brn, VariantKind::Imf, VariantKind::Acf],
    }
}

fn preset_flag(exact: bool) -> &'static str {
    match PresetMatch::from_exact(exact) {
        PresetMatch::Exact => "true",
        _ => "false",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn presets(a: &PresetArgs) -> Result<ExitCode, Failure> {
    let table = preset_table(a.presets_path.as_deref())?;
    let mut text = String::new();
    match (a.factors, a.search_space) {
        (Some(f), Some(size)) => {
            let mut entries = Vec::new();
            for kind in kinds(a) {
                let p = table.lookup(f, size, kind)?;
                entries.push(json!({
                    "variant": kind.as_str(),
                    "F": f,
                    "search_space": size,
                    "row_search_space": p.search_space,
                    "D": p.dim,
                    "sigma": p.spec.variant.sigma(),
                    "flip_rate": p.spec.variant.flip_rate(),
                    "activation_threshold": p.activation_threshold(),
                    "preset_exact": preset_flag(p.exact),
                }));
                if a.format == FormatArg::Csv {
                    if text.is_empty() {
                        text.push_str("variant,F,search_space,row_search_space,D,sigma,flip_rate,activation_threshold,preset_exact\n");
                    }
                    let _ = writeln!(
                        text,
                        "{},{f},{size},{},{},{},{},{},{}",
                        kind,
                        p.search_space,
                        p.dim,
                        opt(p.spec.variant.sigma()),
                        opt(p.spec.variant.flip_rate()),
                        opt(p.activation_threshold()),
                        preset_flag(p.exact)
                    );
                }
            }
            if a.format == FormatArg::Json {
                text =
                    serde_json::to_string_pretty(&entries).expect("json values serialize") + "\n";
            }
        }
        (factors, _) => {
            let rows = table
                .rows()
                .iter()
                .filter(|r| factors.is_none_or(|f| r.factors == f));
            match a.format {
                FormatArg::Csv => {
                    text.push_str("F,search_space,D,flip_rate,acf_threshold,sigma,imf_threshold\n");
                    for r in rows {
                        let _ = writeln!(
                            text,
                            "{},{},{},{},{},{},{}",
                            r.factors,
                            r.search_space,
                            r.dim,
                            r.flip_rate,
                            r.acf_threshold,
                            r.sigma,
                            r.imf_threshold
                        );
                    }
                }
                FormatArg::Json => {
                    let v: Vec<_> = rows
                        .map(|r| {
                            json!({
                                "F": r.factors,
                                "search_space": r.search_space,
                                "D": r.dim,
                                "flip_rate": r.flip_rate,
                                "acf_threshold": r.acf_threshold,
                                "sigma": r.sigma,
                                "imf_threshold": r.imf_threshold,
                            })
                        })
                        .collect();
                    text = serde_json::to_string_pretty(&v).expect("json values serialize") + "\n";
                }
            }
        }
    }
    write_stdout(&text)?;
    Ok(ExitCode::SUCCESS)
}

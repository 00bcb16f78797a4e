//! The five subcommands, as library functions returning what they wrote.
//!
//! Each command re-checks that the files it consumes were produced by the
//! configuration it was given — the header hash and seed must match — so a
//! stale plan or records file from an earlier configuration is a hard error
//! rather than a silently wrong analysis.  Running is the only parallel
//! stage; records are sorted back into `(j, l_k, m)` order before writing,
//! which makes every output byte-identical for any worker count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use rbsim_core::calibration::{
    rabi_flop, ramsey_curve, ramsey_refocused, ramsey_unrefocused, spont_ratio,
};
use rbsim_core::estimator::{
    bootstrap_epg, fit_records, scatter_diagnostic, Aggregates, Bootstrap, DecayFit,
    ScatterClass,
};
use rbsim_core::protocol::{
    generate_plan, generate_two_qubit_plan, run_sequence, run_two_qubit_sequence,
};
use rbsim_core::{CharacterizationReport, Error, ExperimentRecord};

use crate::config::RunConfig;
use crate::formats::{self, FileMeta, PlanData};
use crate::{CliError, CliResult};

fn meta_for(config: &RunConfig, hash: &str) -> FileMeta {
    FileMeta { config: hash.to_string(), seed: config.plan.seed }
}

/// Rejects input files whose provenance disagrees with the active config.
fn check_provenance(
    path: &Path,
    file: &FileMeta,
    expected: &FileMeta,
) -> CliResult<()> {
    if file.config != expected.config {
        return Err(CliError::Data(format!(
            "{}: written from config {}, but the active config hashes to {} — \
             regenerate it or point at the matching config",
            path.display(),
            file.config,
            expected.config
        )));
    }
    if file.seed != expected.seed {
        return Err(CliError::Data(format!(
            "{}: written with seed {}, but the active seed is {} — regenerate it",
            path.display(),
            file.seed,
            expected.seed
        )));
    }
    Ok(())
}

fn expand(config: &RunConfig) -> CliResult<PlanData> {
    let plan = config.benchmark_plan();
    Ok(match plan.qubits {
        1 => PlanData::OneQubit(generate_plan(&plan)?),
        _ => PlanData::TwoQubit(generate_two_qubit_plan(&plan)?),
    })
}

/// `generate`: expand the plan and write it to `<out>/plan.txt`.
pub fn cmd_generate(config: &RunConfig, hash: &str) -> CliResult<PathBuf> {
    let data = expand(config)?;
    let path = config.output.directory.join("plan.txt");
    formats::write_plan(&path, &meta_for(config, hash), &data)?;
    Ok(path)
}

/// `run`: execute every sequence of the plan file and write
/// `<out>/records.txt`.  `jobs` is the worker count; 0 means one per core.
pub fn cmd_run(
    config: &RunConfig,
    hash: &str,
    plan_path: Option<PathBuf>,
    jobs: usize,
) -> CliResult<PathBuf> {
    let plan_path =
        plan_path.unwrap_or_else(|| config.output.directory.join("plan.txt"));
    if !plan_path.exists() {
        return Err(CliError::Data(format!(
            "no plan file at {}; run `rbsim generate` first",
            plan_path.display()
        )));
    }
    let expected = meta_for(config, hash);
    let (file_meta, data) = formats::read_plan(&plan_path)?;
    check_provenance(&plan_path, &file_meta, &expected)?;
    if data.qubits() != config.plan.qubits {
        return Err(CliError::Data(format!(
            "{}: plan is for {} qubit(s), config says {}",
            plan_path.display(),
            data.qubits(),
            config.plan.qubits
        )));
    }

    let model = config.noise_model()?;
    let (shots, batches, seed) =
        (config.plan.shots, config.plan.batches, config.plan.seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Data(format!("cannot start worker pool: {e}")))?;
    let mut records: Vec<ExperimentRecord> = pool.install(|| match &data {
        PlanData::OneQubit(specs) => specs
            .par_iter()
            .map(|s| run_sequence(s, &model, shots, batches, seed))
            .collect::<Result<_, Error>>(),
        PlanData::TwoQubit(specs) => specs
            .par_iter()
            .map(|s| run_two_qubit_sequence(s, &model, shots, batches, seed))
            .collect::<Result<_, Error>>(),
    })?;
    records.sort_by_key(|r| (r.j, r.l_k, r.m));

    let path = config.output.directory.join("records.txt");
    formats::write_records(&path, &expected, data.qubits(), &records)?;
    Ok(path)
}

/// Everything the analysis of one records file produces.
pub struct Analysis {
    pub records: Vec<ExperimentRecord>,
    pub aggregates: Aggregates,
    pub fit: DecayFit,
    pub bootstrap: Bootstrap,
    /// Human-readable report text.
    pub body: String,
}

/// Shared pipeline behind `fit` and `report`: read records, fit the decay,
/// bootstrap the per-gate error, and render the report text.
pub fn analyze(
    config: &RunConfig,
    hash: &str,
    records_path: Option<PathBuf>,
) -> CliResult<Analysis> {
    let records_path =
        records_path.unwrap_or_else(|| config.output.directory.join("records.txt"));
    if !records_path.exists() {
        return Err(CliError::Data(format!(
            "no records file at {}; run `rbsim run` first",
            records_path.display()
        )));
    }
    let expected = meta_for(config, hash);
    let (file_meta, _, records) = formats::read_records(&records_path)?;
    check_provenance(&records_path, &file_meta, &expected)?;

    let (aggregates, fit) = fit_records(&records)?;
    let bootstrap =
        bootstrap_epg(&records, config.fit.bootstrap_resamples, config.plan.seed)?;
    let body = render_report(config, &records, &aggregates, &fit, &bootstrap);
    Ok(Analysis { records, aggregates, fit, bootstrap, body })
}

fn scatter_lines(records: &[ExperimentRecord]) -> Vec<String> {
    let mut by_length: BTreeMap<usize, Vec<ExperimentRecord>> = BTreeMap::new();
    for r in records {
        by_length.entry(r.l_k).or_default().push(r.clone());
    }
    by_length
        .iter()
        .map(|(l_k, group)| match scatter_diagnostic(group) {
            Ok(report) => {
                let class = match report.classification {
                    ScatterClass::DepolarizingLike => "depolarizing-like",
                    ScatterClass::CoherentSystematic => "coherent-systematic",
                    ScatterClass::Indeterminate => "indeterminate",
                };
                format!(
                    "  l_k = {l_k}: excess variance ratio = {}, \
                     uniformity distance = {}, {class}",
                    report.excess_variance_ratio, report.uniformity_distance
                )
            }
            Err(_) => format!(
                "  l_k = {l_k}: skipped ({} records; the diagnostic needs ≥ 8)",
                group.len()
            ),
        })
        .collect()
}

fn render_report(
    config: &RunConfig,
    records: &[ExperimentRecord],
    aggregates: &Aggregates,
    fit: &DecayFit,
    bootstrap: &Bootstrap,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "benchmark decay fit");
    let _ = writeln!(
        out,
        "  records: {} ({} lengths x {} gate sequences x {} randomizations)",
        records.len(),
        aggregates.per_length.len(),
        config.plan.gate_sequences,
        config.plan.randomizations
    );
    let _ = writeln!(
        out,
        "  shots per record: {} in {} batches",
        config.plan.shots, config.plan.batches
    );
    let _ = writeln!(out, "  per-gate depolarization d = {} +- {}", fit.d, fit.d_stderr);
    let _ = writeln!(
        out,
        "  interface depolarization d_if = {} +- {}",
        fit.d_if, fit.d_if_stderr
    );
    let _ = writeln!(
        out,
        "  error per gate (d/2) = {} +- {} (fit) +- {} (bootstrap)",
        fit.epg(),
        fit.d_stderr / 2.0,
        bootstrap.epg_stderr
    );
    let _ = writeln!(
        out,
        "  bootstrap 68% interval = [{}, {}] over {} resamples ({} failed)",
        bootstrap.interval.0,
        bootstrap.interval.1,
        bootstrap.resamples,
        bootstrap.failures
    );
    let _ = writeln!(out, "  average gate fidelity = {}", fit.avg_fidelity());
    let _ = writeln!(
        out,
        "  chi-squared / dof = {} / {}{}",
        fit.chi_squared,
        fit.dof,
        if fit.degenerate { "  (no length dependence; d pinned to 0)" } else { "" }
    );
    let _ = writeln!(out, "scatter diagnostics per length");
    for line in scatter_lines(records) {
        let _ = writeln!(out, "{line}");
    }
    out
}

/// `fit`: analyze the records and write `report.txt`, `fig_each.dat`, and
/// `fig_avg.dat` next to them.
pub fn cmd_fit(
    config: &RunConfig,
    hash: &str,
    records_path: Option<PathBuf>,
) -> CliResult<(PathBuf, Analysis)> {
    let analysis = analyze(config, hash, records_path)?;
    let meta = meta_for(config, hash);
    let dir = &config.output.directory;

    let report_path = dir.join("report.txt");
    formats::write_report(&report_path, &meta, &analysis.body)?;
    write_fig_each(&dir.join("fig_each.dat"), &meta, &analysis)?;
    write_fig_avg(&dir.join("fig_avg.dat"), &meta, config, &analysis)?;
    Ok((report_path, analysis))
}

/// One line per record: the scatter cloud behind the averaged decay.
fn write_fig_each(path: &Path, meta: &FileMeta, analysis: &Analysis) -> CliResult<()> {
    let mut body = String::from("# columns: length fidelity j m\n");
    for r in &analysis.records {
        let _ = writeln!(body, "{} {} {} {}", r.fit_length(), 1.0 - r.p_hat, r.j, r.m);
    }
    let content = format!(
        "{}\n# config = {}\n# seed = {}\n{body}",
        formats::CURVE_MAGIC,
        meta.config,
        meta.seed
    );
    std::fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    std::fs::write(path, content)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Per-length averages, the fitted curve, and its one-sigma band: one line
/// per length with a fidelity column for every base sequence.
fn write_fig_avg(
    path: &Path,
    meta: &FileMeta,
    config: &RunConfig,
    analysis: &Analysis,
) -> CliResult<()> {
    let n_j = config.plan.gate_sequences;
    let mut body = String::from("# columns: length");
    for j in 0..n_j {
        let _ = write!(body, " fidelity_j{j}");
    }
    body.push_str(" mean_fidelity stderr fit_fidelity band_low band_high\n");
    let fit = &analysis.fit;
    for summary in &analysis.aggregates.per_length {
        let l = summary.fit_length() as f64;
        let _ = write!(body, "{}", summary.fit_length());
        for j in 0..n_j {
            let p = analysis.aggregates.per_sequence[&(j, summary.l_k)];
            let _ = write!(body, " {}", 1.0 - p);
        }
        // One-sigma band of the fitted curve by the delta method: the model
        // gradient contracted with the parameter covariance.
        let g = [
            (1.0 - fit.d_if) * l * (1.0 - fit.d).powf(l - 1.0) / 2.0,
            (1.0 - fit.d).powf(l) / 2.0,
        ];
        let var = g[0] * g[0] * fit.covariance[0][0]
            + 2.0 * g[0] * g[1] * fit.covariance[0][1]
            + g[1] * g[1] * fit.covariance[1][1];
        let sigma = var.max(0.0).sqrt();
        let fid = 1.0 - fit.model(l);
        let _ = writeln!(
            body,
            " {} {} {fid} {} {}",
            1.0 - summary.mean,
            summary.stderr,
            fid - sigma,
            fid + sigma
        );
    }
    let content = format!(
        "{}\n# config = {}\n# seed = {}\n{body}",
        formats::CURVE_MAGIC,
        meta.config,
        meta.seed
    );
    std::fs::write(path, content)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// The experiment selectors `calibrate` understands.
pub const EXPERIMENTS: [&str; 4] =
    ["ramsey-refocused", "ramsey-unrefocused", "spont-ratio", "rabi"];

fn render_characterization(report: &CharacterizationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "experiment: {}", report.kind);
    let _ = writeln!(
        out,
        "  fit window: {} to {} us",
        report.window.0, report.window.1
    );
    let _ = writeln!(
        out,
        "  per-step error contribution = {}",
        report.per_step_contribution
    );
    let _ = writeln!(out, "  mean step duration = {} us", report.tau_step);
    let _ = writeln!(out, "parameters");
    for (name, value) in &report.parameters {
        let _ = writeln!(out, "  {name} = {value}");
    }
    if !report.notes.is_empty() {
        let _ = writeln!(out, "notes");
        for note in &report.notes {
            let _ = writeln!(out, "  - {note}");
        }
    }
    out
}

/// `calibrate`: run one characterization experiment, write its curve(s) and
/// report, and return the report text.
pub fn cmd_calibrate(
    config: &RunConfig,
    hash: &str,
    experiment_override: Option<&str>,
) -> CliResult<(Vec<PathBuf>, String)> {
    let selector = experiment_override
        .map(str::to_string)
        .or_else(|| config.calibration.experiment.clone())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "no experiment selected; pass --experiment or set \
                 `experiment` under [calibration] (one of: {})",
                EXPERIMENTS.join(", ")
            ))
        })?;
    let meta = meta_for(config, hash);
    let dir = &config.output.directory;
    let mut written = Vec::new();

    let report = match selector.as_str() {
        "ramsey-refocused" => {
            let plan = config.ramsey_plan(true, false)?;
            let (curve, report) = ramsey_refocused(&plan)?;
            let path = dir.join("ramsey-refocused.dat");
            formats::write_curve(&path, &meta, &selector, "p_excited", &curve)?;
            written.push(path);
            report
        }
        "ramsey-unrefocused" => {
            let plan = config.ramsey_plan(false, false)?;
            let (curve, report) = ramsey_unrefocused(&plan)?;
            let path = dir.join("ramsey-unrefocused.dat");
            formats::write_curve(&path, &meta, &selector, "p_excited", &curve)?;
            written.push(path);
            report
        }
        "spont-ratio" => {
            // Both arms share the plan seed, so every noise draw other than
            // the beams themselves is common to the pair.
            let with_beams = ramsey_curve(&config.ramsey_plan(true, true)?)?;
            let reference = ramsey_curve(&config.ramsey_plan(true, false)?)?;
            let model = config.noise_model()?;
            let (ratio, report) = spont_ratio(&with_beams, &reference, &model)?;
            for (name, value_name, curve) in [
                ("spont-with-beams.dat", "p_excited", &with_beams),
                ("spont-reference.dat", "p_excited", &reference),
                ("spont-ratio.dat", "contrast_ratio", &ratio),
            ] {
                let path = dir.join(name);
                formats::write_curve(&path, &meta, &selector, value_name, curve)?;
                written.push(path);
            }
            report
        }
        "rabi" => {
            let plan = config.rabi_plan()?;
            let (curve, report) = rabi_flop(&plan)?;
            let path = dir.join("rabi.dat");
            formats::write_curve(&path, &meta, &selector, "p_excited", &curve)?;
            written.push(path);
            report
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown experiment {other:?}; expected one of: {}",
                EXPERIMENTS.join(", ")
            )));
        }
    };

    let body = render_characterization(&report);
    let report_path = dir.join(format!("{selector}-report.txt"));
    formats::write_report(&report_path, &meta, &body)?;
    written.push(report_path);
    Ok((written, body))
}

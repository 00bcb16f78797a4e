//! Line-delimited file formats for plans, records, curves, and reports.
//!
//! Every file starts with a versioned magic line plus `# config = <hash>`
//! and `# seed = <n>`, so any artifact can be traced to the exact
//! configuration that produced it and stale files from an incompatible
//! schema are rejected with a clear message instead of misparsed.  Numeric
//! values are written with Rust's shortest round-trip float formatting,
//! which makes files byte-stable across runs and worker counts.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rbsim_core::protocol::{
    LayerKind, PulseLabel, SequenceSpec, TwoQubitLayer, TwoQubitSequenceSpec,
};
use rbsim_core::ExperimentRecord;

use crate::{CliError, CliResult};

pub const PLAN_MAGIC: &str = "# rbsim plan v1";
pub const RECORDS_MAGIC: &str = "# rbsim records v1";
pub const CURVE_MAGIC: &str = "# rbsim curve v1";
pub const REPORT_MAGIC: &str = "# rbsim report v1";

/// Provenance stamped into every output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileMeta {
    /// 16-hex-digit config hash.
    pub config: String,
    pub seed: u64,
}

/// The expanded sequences of a plan, by qubit count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlanData {
    OneQubit(Vec<SequenceSpec>),
    TwoQubit(Vec<TwoQubitSequenceSpec>),
}

impl PlanData {
    pub fn len(&self) -> usize {
        match self {
            PlanData::OneQubit(s) => s.len(),
            PlanData::TwoQubit(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn qubits(&self) -> usize {
        match self {
            PlanData::OneQubit(_) => 1,
            PlanData::TwoQubit(_) => 2,
        }
    }
}

fn io_err(path: &Path, err: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {err}", path.display()))
}

fn format_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}:{line}: {msg}", path.display()))
}

fn write_file(path: &Path, content: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(content.as_bytes()).map_err(|e| io_err(path, e))
}

/// Splits a file into its header key/value pairs and its data lines,
/// checking the magic line first.
fn read_lines<'a>(
    path: &Path,
    text: &'a str,
    magic: &str,
) -> CliResult<(Vec<(String, String)>, Vec<(usize, &'a str)>)> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == magic => {}
        Some((_, first)) => {
            return Err(CliError::Data(format!(
                "{}: expected header {magic:?}, found {first:?} — wrong or \
                 outdated file format",
                path.display()
            )));
        }
        None => {
            return Err(CliError::Data(format!("{}: empty file", path.display())));
        }
    }
    let mut header = Vec::new();
    let mut data = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once('=') {
                header.push((key.trim().to_string(), value.trim().to_string()));
            }
            continue;
        }
        data.push((i + 1, line));
    }
    Ok((header, data))
}

fn header_value<'a>(
    path: &Path,
    header: &'a [(String, String)],
    key: &str,
) -> CliResult<&'a str> {
    header
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| {
            CliError::Data(format!("{}: missing header line `# {key} = …`", path.display()))
        })
}

fn read_meta(path: &Path, header: &[(String, String)]) -> CliResult<(FileMeta, usize)> {
    let config = header_value(path, header, "config")?.to_string();
    let seed = header_value(path, header, "seed")?.parse().map_err(|e| {
        CliError::Data(format!("{}: bad seed in header: {e}", path.display()))
    })?;
    let qubits = header_value(path, header, "qubits")?.parse().map_err(|e| {
        CliError::Data(format!("{}: bad qubit count in header: {e}", path.display()))
    })?;
    Ok((FileMeta { config, seed }, qubits))
}

fn meta_block(magic: &str, meta: &FileMeta, qubits: usize) -> String {
    format!(
        "{magic}\n# config = {}\n# seed = {}\n# qubits = {qubits}\n",
        meta.config, meta.seed
    )
}

// ---------------------------------------------------------------------------
// Plan files
// ---------------------------------------------------------------------------

fn layer_token(layer: &TwoQubitLayer) -> String {
    let kind = match layer.kind {
        LayerKind::Pauli => 'P',
        LayerKind::Computational => 'C',
        LayerKind::Closing => 'R',
    };
    let slot = |p: &Option<PulseLabel>| match p {
        Some(label) => label.to_string(),
        None => "-".to_string(),
    };
    let mut token =
        format!("{kind}[{}|{}]", slot(&layer.pulses[0]), slot(&layer.pulses[1]));
    if let Some((c, t)) = layer.cnot {
        let _ = write!(token, "@{c}{t}");
    }
    token
}

fn parse_layer(path: &Path, line: usize, token: &str) -> CliResult<TwoQubitLayer> {
    let bad = |msg: &str| format_err(path, line, format!("layer {token:?}: {msg}"));
    let mut chars = token.chars();
    let kind = match chars.next() {
        Some('P') => LayerKind::Pauli,
        Some('C') => LayerKind::Computational,
        Some('R') => LayerKind::Closing,
        _ => return Err(bad("unknown layer kind")),
    };
    let rest = chars.as_str();
    let body_end =
        rest.find(']').ok_or_else(|| bad("missing closing bracket"))?;
    if !rest.starts_with('[') {
        return Err(bad("missing opening bracket"));
    }
    let body = &rest[1..body_end];
    let (a, b) = body.split_once('|').ok_or_else(|| bad("missing slot separator"))?;
    let slot = |s: &str| -> CliResult<Option<PulseLabel>> {
        if s == "-" {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|e: rbsim_core::Error| bad(&e.to_string()))
        }
    };
    let cnot = match &rest[body_end + 1..] {
        "" => None,
        tail => {
            let digits = tail
                .strip_prefix('@')
                .ok_or_else(|| bad("unexpected trailing characters"))?;
            let mut it = digits.chars();
            match (it.next(), it.next(), it.next()) {
                (Some(c), Some(t), None) => {
                    let c = c.to_digit(10).ok_or_else(|| bad("bad control digit"))?;
                    let t = t.to_digit(10).ok_or_else(|| bad("bad target digit"))?;
                    Some((c as usize, t as usize))
                }
                _ => return Err(bad("controlled-NOT needs two digits")),
            }
        }
    };
    Ok(TwoQubitLayer { kind, pulses: [slot(a)?, slot(b)?], cnot })
}

/// Writes an expanded plan; one line per sequence after the header.
pub fn write_plan(path: &Path, meta: &FileMeta, plan: &PlanData) -> CliResult<()> {
    let mut out = meta_block(PLAN_MAGIC, meta, plan.qubits());
    match plan {
        PlanData::OneQubit(specs) => {
            out.push_str("# columns: j l_k m expected_excited pulses…\n");
            for spec in specs {
                let _ = write!(
                    out,
                    "{} {} {} {}",
                    spec.j, spec.l_k, spec.m, u8::from(spec.expected_excited)
                );
                for pulse in &spec.pulses {
                    let _ = write!(out, " {pulse}");
                }
                out.push('\n');
            }
        }
        PlanData::TwoQubit(specs) => {
            out.push_str("# columns: j l_k m expected_odd support layers…\n");
            for spec in specs {
                let support: Vec<String> =
                    spec.support.iter().map(|q| q.to_string()).collect();
                let _ = write!(
                    out,
                    "{} {} {} {} {}",
                    spec.j,
                    spec.l_k,
                    spec.m,
                    u8::from(spec.expected_odd),
                    support.join(",")
                );
                for layer in &spec.layers {
                    let _ = write!(out, " {}", layer_token(layer));
                }
                out.push('\n');
            }
        }
    }
    write_file(path, &out)
}

fn parse_indices(
    path: &Path,
    line: usize,
    fields: &[&str],
) -> CliResult<(usize, usize, usize)> {
    let parse = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|e| format_err(path, line, format!("bad {what} {s:?}: {e}")))
    };
    Ok((
        parse(fields[0], "sequence index")?,
        parse(fields[1], "length")?,
        parse(fields[2], "randomization index")?,
    ))
}

fn parse_flag(path: &Path, line: usize, s: &str) -> CliResult<bool> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format_err(path, line, format!("expected 0 or 1, found {s:?}"))),
    }
}

/// Reads a plan file back into sequences.
pub fn read_plan(path: &Path) -> CliResult<(FileMeta, PlanData)> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let (header, data) = read_lines(path, &text, PLAN_MAGIC)?;
    let (meta, qubits) = read_meta(path, &header)?;
    match qubits {
        1 => {
            let mut specs = Vec::with_capacity(data.len());
            for (line, content) in data {
                let fields: Vec<&str> = content.split_whitespace().collect();
                if fields.len() < 5 {
                    return Err(format_err(path, line, "too few fields"));
                }
                let (j, l_k, m) = parse_indices(path, line, &fields)?;
                let expected_excited = parse_flag(path, line, fields[3])?;
                let pulses: Vec<PulseLabel> = fields[4..]
                    .iter()
                    .map(|t| t.parse().map_err(|e| format_err(path, line, e)))
                    .collect::<CliResult<_>>()?;
                specs.push(SequenceSpec { j, l_k, m, pulses, expected_excited });
            }
            Ok((meta, PlanData::OneQubit(specs)))
        }
        2 => {
            let mut specs = Vec::with_capacity(data.len());
            for (line, content) in data {
                let fields: Vec<&str> = content.split_whitespace().collect();
                if fields.len() < 6 {
                    return Err(format_err(path, line, "too few fields"));
                }
                let (j, l_k, m) = parse_indices(path, line, &fields)?;
                let expected_odd = parse_flag(path, line, fields[3])?;
                let support: Vec<usize> = fields[4]
                    .split(',')
                    .map(|s| {
                        s.parse().map_err(|e| {
                            format_err(path, line, format!("bad support {s:?}: {e}"))
                        })
                    })
                    .collect::<CliResult<_>>()?;
                let layers: Vec<TwoQubitLayer> = fields[5..]
                    .iter()
                    .map(|t| parse_layer(path, line, t))
                    .collect::<CliResult<_>>()?;
                specs.push(TwoQubitSequenceSpec {
                    j,
                    l_k,
                    m,
                    layers,
                    support,
                    expected_odd,
                });
            }
            Ok((meta, PlanData::TwoQubit(specs)))
        }
        n => Err(CliError::Data(format!(
            "{}: unsupported qubit count {n}",
            path.display()
        ))),
    }
}

// ---------------------------------------------------------------------------
// Record files
// ---------------------------------------------------------------------------

/// Writes run records, one line per `(j, l_k, m)` cell.
pub fn write_records(
    path: &Path,
    meta: &FileMeta,
    qubits: usize,
    records: &[ExperimentRecord],
) -> CliResult<()> {
    let mut out = meta_block(RECORDS_MAGIC, meta, qubits);
    out.push_str(
        "# columns: j l_k m wrong_count shots p_hat stderr mean_detuning \
         mean_amp_factor\n",
    );
    for r in records {
        let n = r.contexts.len().max(1) as f64;
        let mean_detuning =
            r.contexts.iter().map(|c| c.detuning).sum::<f64>() / n;
        let mean_amp =
            r.contexts.iter().map(|c| c.amp_factor).sum::<f64>() / n;
        let _ = writeln!(
            out,
            "{} {} {} {} {} {} {} {} {}",
            r.j, r.l_k, r.m, r.wrong_count, r.shots, r.p_hat, r.stderr,
            mean_detuning, mean_amp
        );
    }
    write_file(path, &out)
}

/// Reads records back; counts and uncertainties are re-derived from the
/// integer fields and cross-checked against the stored values so a file
/// edited or truncated by hand cannot slip through.
pub fn read_records(path: &Path) -> CliResult<(FileMeta, usize, Vec<ExperimentRecord>)> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let (header, data) = read_lines(path, &text, RECORDS_MAGIC)?;
    let (meta, qubits) = read_meta(path, &header)?;
    let mut records = Vec::with_capacity(data.len());
    for (line, content) in data {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 9 {
            return Err(format_err(
                path,
                line,
                format!("expected 9 fields, found {}", fields.len()),
            ));
        }
        let (j, l_k, m) = parse_indices(path, line, &fields)?;
        let parse_u64 = |s: &str, what: &str| {
            s.parse::<u64>()
                .map_err(|e| format_err(path, line, format!("bad {what} {s:?}: {e}")))
        };
        let parse_f64 = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|e| format_err(path, line, format!("bad {what} {s:?}: {e}")))
        };
        let wrong = parse_u64(fields[3], "wrong count")?;
        let shots = parse_u64(fields[4], "shot count")?;
        let stored_p = parse_f64(fields[5], "probability")?;
        let stored_stderr = parse_f64(fields[6], "uncertainty")?;
        parse_f64(fields[7], "mean detuning")?;
        parse_f64(fields[8], "mean amplitude factor")?;
        let record = ExperimentRecord::new(j, l_k, m, wrong, shots, vec![])
            .map_err(|e| format_err(path, line, e))?;
        if (record.p_hat - stored_p).abs() > 1e-12
            || (record.stderr - stored_stderr).abs() > 1e-12
        {
            return Err(format_err(
                path,
                line,
                "stored probability/uncertainty disagree with the counts",
            ));
        }
        records.push(record);
    }
    Ok((meta, qubits, records))
}

// ---------------------------------------------------------------------------
// Curve and report files
// ---------------------------------------------------------------------------

/// Writes a characterization curve as three-column numeric text.
pub fn write_curve(
    path: &Path,
    meta: &FileMeta,
    experiment: &str,
    value_name: &str,
    points: &[(f64, f64, f64)],
) -> CliResult<()> {
    let mut out = format!(
        "{CURVE_MAGIC}\n# config = {}\n# seed = {}\n# experiment = {experiment}\n\
         # columns: time_us {value_name} stderr\n",
        meta.config, meta.seed
    );
    for &(t, v, s) in points {
        let _ = writeln!(out, "{t} {v} {s}");
    }
    write_file(path, &out)
}

/// Writes a human-readable report, stamped like every other artifact.
pub fn write_report(path: &Path, meta: &FileMeta, body: &str) -> CliResult<()> {
    let out = format!(
        "{REPORT_MAGIC}\n# config = {}\n# seed = {}\n{body}",
        meta.config, meta.seed
    );
    write_file(path, &out)
}

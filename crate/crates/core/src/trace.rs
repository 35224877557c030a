//! Per-iteration trace records and their CSV / JSON serialization.
//!
//! The CSV layout is fixed: comment lines starting with `#` carry the run
//! configuration and summary, then the header row
//! `k,normF,f,kind,alpha,backtracks,proj_iters,rank_p,infeas,ms` followed
//! by one row per iterate. Wall-clock fields (the `ms` column and the
//! `# time_ms` comment) are excluded from reproducibility comparisons.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::solve::{SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    /// Row 0: the (possibly projected) starting point.
    Init,
    /// Projected Levenberg-Marquardt direction accepted by the filter.
    Lm,
    /// Projected-gradient safeguard direction.
    Pg,
}

impl StepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StepKind::Init => "init",
            StepKind::Lm => "lm",
            StepKind::Pg => "pg",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "init" => Some(StepKind::Init),
            "lm" => Some(StepKind::Lm),
            "pg" => Some(StepKind::Pg),
            _ => None,
        }
    }
}

/// One iterate of a solver run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    /// ||F(x_k)||.
    pub norm_f: f64,
    /// Merit value f(x_k) = ||F(x_k)||^2 / 2.
    pub f: f64,
    pub kind: StepKind,
    /// Accepted step length (0 on the init row, 1 for local steps).
    pub alpha: f64,
    /// Rejected line-search trials before acceptance.
    pub backtracks: usize,
    /// Inner projection effort: LMO calls (CondG) or rank attempts (rank-p).
    pub proj_iters: usize,
    /// Rank accepted by the rank-p projector; 0 when not applicable.
    pub rank_p: usize,
    /// Feasibility violation measure of the iterate.
    pub infeas: f64,
    /// Wall-clock milliseconds spent producing this iterate.
    pub ms: f64,
}

pub const CSV_HEADER: &str = "k,normF,f,kind,alpha,backtracks,proj_iters,rank_p,infeas,ms";

/// Run metadata echoed into the trace header so experiments are
/// self-documenting.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunMeta {
    pub problem: String,
    pub method: String,
    pub projection: String,
    pub preset: String,
    pub theta: String,
    pub seed: Option<u64>,
}

/// Summary line of a finished run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: SolveStatus,
    pub iterations: usize,
    pub f_evals: usize,
    pub final_norm_f: f64,
    pub time_ms: f64,
    pub start_projected: bool,
}

impl RunSummary {
    pub fn from_result(result: &SolveResult, time_ms: f64) -> Self {
        Self {
            status: result.status,
            iterations: result.iterations,
            f_evals: result.f_evals,
            final_norm_f: result.final_norm_f(),
            time_ms,
            start_projected: result.start_projected,
        }
    }

    /// One-line form: It, Fe, Time, status.
    pub fn one_line(&self) -> String {
        format!(
            "It={} Fe={} Time={:.3}s normF={:e} status={}",
            self.iterations,
            self.f_evals,
            self.time_ms / 1000.0,
            self.final_norm_f,
            self.status
        )
    }
}

/// A parsed trace file: metadata comments, summary, and records.
#[derive(Debug, Clone)]
pub struct TraceFile {
    pub meta: Vec<(String, String)>,
    pub records: Vec<TraceRecord>,
}

/// Render a trace to CSV. Floats use the shortest round-trip form, so a
/// byte-wise comparison of everything except `ms` and `# time_ms` is an
/// exact comparison of the run.
pub fn to_csv(meta: &RunMeta, summary: &RunSummary, records: &[TraceRecord]) -> String {
    let mut out = String::new();
    out.push_str("# trace v1\n");
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "# {k}: {v}");
    };
    kv("problem", meta.problem.clone());
    kv("method", meta.method.clone());
    kv("projection", meta.projection.clone());
    kv("preset", meta.preset.clone());
    kv("theta", meta.theta.clone());
    if let Some(seed) = meta.seed {
        kv("seed", seed.to_string());
    }
    kv(
        "fe_convention",
        "Fe = 1 initial evaluation + one per line-search trial (accepted or rejected)".to_string(),
    );
    kv("status", summary.status.to_string());
    kv("it", summary.iterations.to_string());
    kv("fe", summary.f_evals.to_string());
    kv("final_normF", format!("{:e}", summary.final_norm_f));
    kv("start_projected", summary.start_projected.to_string());
    kv("time_ms", format!("{}", summary.time_ms));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.k,
            r.norm_f,
            r.f,
            r.kind.as_str(),
            r.alpha,
            r.backtracks,
            r.proj_iters,
            r.rank_p,
            r.infeas,
            r.ms
        );
    }
    out
}

/// JSON mirror of the CSV contents, field for field.
pub fn to_json(
    meta: &RunMeta,
    summary: &RunSummary,
    records: &[TraceRecord],
) -> serde_json::Value {
    serde_json::json!({
        "meta": meta,
        "summary": summary,
        "records": records,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("malformed trace: {0}")]
    Malformed(String),
}

/// Parse a CSV trace produced by [`to_csv`].
pub fn parse_csv(content: &str) -> Result<TraceFile, TraceError> {
    let mut meta = Vec::new();
    let mut records = Vec::new();
    let mut saw_header = false;
    for (lineno, line) in content.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if !saw_header {
            if line != CSV_HEADER {
                return Err(TraceError::Malformed(format!(
                    "line {}: expected header `{CSV_HEADER}`",
                    lineno + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(TraceError::Malformed(format!(
                "line {}: expected 10 fields, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, TraceError> {
            s.parse()
                .map_err(|_| TraceError::Malformed(format!("line {}: bad {what}", lineno + 1)))
        };
        let parse_u = |s: &str, what: &str| -> Result<usize, TraceError> {
            s.parse()
                .map_err(|_| TraceError::Malformed(format!("line {}: bad {what}", lineno + 1)))
        };
        records.push(TraceRecord {
            k: parse_u(fields[0], "k")?,
            norm_f: parse_f(fields[1], "normF")?,
            f: parse_f(fields[2], "f")?,
            kind: StepKind::parse(fields[3])
                .ok_or_else(|| TraceError::Malformed(format!("line {}: bad kind", lineno + 1)))?,
            alpha: parse_f(fields[4], "alpha")?,
            backtracks: parse_u(fields[5], "backtracks")?,
            proj_iters: parse_u(fields[6], "proj_iters")?,
            rank_p: parse_u(fields[7], "rank_p")?,
            infeas: parse_f(fields[8], "infeas")?,
            ms: parse_f(fields[9], "ms")?,
        });
    }
    if !saw_header || records.is_empty() {
        return Err(TraceError::Malformed(
            "no header or no records found".to_string(),
        ));
    }
    Ok(TraceFile { meta, records })
}

/// Strip wall-clock fields: the comparable portion of a rendered trace.
pub fn reproducible_view(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with("# time_ms"))
        .map(|l| {
            if l.starts_with('#') || l == CSV_HEADER {
                l.to_string()
            } else {
                match l.rsplit_once(',') {
                    Some((head, _ms)) => head.to_string(),
                    None => l.to_string(),
                }
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (RunMeta, RunSummary, Vec<TraceRecord>) {
        let meta = RunMeta {
            problem: "desk:D3".into(),
            method: "global".into(),
            projection: "exact".into(),
            preset: "box41".into(),
            theta: "zero".into(),
            seed: Some(7),
        };
        let summary = RunSummary {
            status: SolveStatus::Converged,
            iterations: 2,
            f_evals: 3,
            final_norm_f: 1e-9,
            time_ms: 12.5,
            start_projected: false,
        };
        let records = vec![
            TraceRecord {
                k: 0,
                norm_f: 1.0,
                f: 0.5,
                kind: StepKind::Init,
                alpha: 0.0,
                backtracks: 0,
                proj_iters: 0,
                rank_p: 0,
                infeas: 0.0,
                ms: 0.0,
            },
            TraceRecord {
                k: 1,
                norm_f: 1e-9,
                f: 5e-19,
                kind: StepKind::Lm,
                alpha: 1.0,
                backtracks: 0,
                proj_iters: 3,
                rank_p: 2,
                infeas: 0.0,
                ms: 1.25,
            },
        ];
        (meta, summary, records)
    }

    #[test]
    fn csv_round_trips() {
        let (meta, summary, records) = sample();
        let csv = to_csv(&meta, &summary, &records);
        let parsed = parse_csv(&csv).unwrap();
        assert_eq!(parsed.records.len(), 2);
        assert_eq!(parsed.records[1].k, 1);
        assert_eq!(parsed.records[1].kind, StepKind::Lm);
        assert_eq!(parsed.records[1].norm_f, 1e-9);
        assert!(parsed.meta.iter().any(|(k, v)| k == "it" && v == "2"));
    }

    #[test]
    fn reproducible_view_drops_timing() {
        let (meta, summary, records) = sample();
        let csv = to_csv(&meta, &summary, &records);
        let view = reproducible_view(&csv);
        assert!(!view.contains("time_ms"));
        assert!(!view.contains("1.25"));
        assert!(view.contains("1e-9"));
    }

    #[test]
    fn empty_input_is_malformed() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("# trace v1\n").is_err());
    }
}

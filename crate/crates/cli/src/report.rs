//! Comparison tables over trace files: one residual column per trace, the
//! per-run summaries underneath, and an optional JSON mirror.

use lmproj_core::trace::{parse_csv, TraceFile};

pub struct LoadedTrace {
    pub label: String,
    pub trace: TraceFile,
}

pub fn load(path: &std::path::Path) -> Result<LoadedTrace, String> {
    let content =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let trace = parse_csv(&content).map_err(|e| format!("{}: {e}", path.display()))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(LoadedTrace { label, trace })
}

fn meta<'a>(t: &'a TraceFile, key: &str) -> &'a str {
    t.meta
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .unwrap_or("-")
}

/// Aligned text table: k rows with one ||F(x_k)|| column per trace, then
/// It / Fe / Time / status lines.
pub fn render_table(traces: &[LoadedTrace]) -> String {
    let width = traces
        .iter()
        .map(|t| t.label.len().max(12))
        .collect::<Vec<_>>();
    let mut out = String::new();
    out.push_str(&format!("{:>4}", "k"));
    for (t, w) in traces.iter().zip(&width) {
        out.push_str(&format!("  {:>w$}", t.label, w = w));
    }
    out.push('\n');
    let rows = traces
        .iter()
        .map(|t| t.trace.records.len())
        .max()
        .unwrap_or(0);
    for k in 0..rows {
        out.push_str(&format!("{k:>4}"));
        for (t, w) in traces.iter().zip(&width) {
            match t.trace.records.get(k) {
                Some(r) => out.push_str(&format!("  {:>w$.3e}", r.norm_f, w = w)),
                None => out.push_str(&format!("  {:>w$}", "", w = w)),
            }
        }
        out.push('\n');
    }
    for key in ["it", "fe", "time_ms", "status"] {
        out.push_str(&format!("{key:>4}"));
        for (t, w) in traces.iter().zip(&width) {
            out.push_str(&format!("  {:>w$}", meta(&t.trace, key), w = w));
        }
        out.push('\n');
    }
    out
}

pub fn to_json(traces: &[LoadedTrace]) -> serde_json::Value {
    let runs: Vec<serde_json::Value> = traces
        .iter()
        .map(|t| {
            serde_json::json!({
                "label": t.label,
                "meta": t.trace.meta.iter().cloned().collect::<std::collections::BTreeMap<_,_>>(),
                "normF": t.trace.records.iter().map(|r| r.norm_f).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({ "runs": runs })
}

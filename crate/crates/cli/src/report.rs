//! Human-readable digest of a run directory.

use crate::record::RunRecord;

pub fn render(record: &RunRecord) -> String {
    let mut out = String::new();
    out.push_str(&format!("experiment: {}\n", record.experiment_id));
    out.push_str(&format!(
        "task: {}    tool: gclab {}\n",
        record.task, record.tool_version
    ));
    out.push_str(&format!(
        "started: {}    finished: {}\n",
        record.started, record.finished
    ));
    out.push_str(&format!("config digest: {}\n", record.config_digest));
    out.push('\n');
    render_summary(&record.task, &record.summary, &mut out);
    out.push_str("\nfiles:\n");
    for entry in &record.manifest {
        out.push_str(&format!(
            "  {}  sha256 {}  ({} bytes)\n",
            entry.path, entry.sha256, entry.bytes
        ));
    }
    out
}

fn render_summary(task: &str, summary: &serde_json::Value, out: &mut String) {
    match task {
        "generate" => {
            out.push_str(&format!(
                "generated {} values for '{}' (seed {})\n",
                summary["n"], summary["spec_label"], summary["seed"]
            ));
        }
        "mixing_profile" => {
            for p in summary["profiles"].as_array().into_iter().flatten() {
                out.push_str(&format!("profile {}:\n", p["name"]));
                if let Some(fit) = p["fit"].as_object() {
                    let sp = fit
                        .get("super_polynomial")
                        .and_then(|v| v.as_bool())
                        .unwrap_or(false);
                    out.push_str(&format!(
                        "  fitted decay: value = {:.4} * n^-{}{}  (log-residual {:.3})\n",
                        fit["c"].as_f64().unwrap_or(f64::NAN),
                        trim_num(&fit["a"]),
                        if sp { "  [super-polynomial]" } else { "" },
                        fit["residual"].as_f64().unwrap_or(f64::NAN),
                    ));
                } else {
                    out.push_str("  fitted decay: undefined (too few positive values)\n");
                }
                for t in p["thresholds"].as_array().into_iter().flatten() {
                    out.push_str(&format!(
                        "  delta = {} -> required exponent {:.4}: {}\n",
                        t["delta"],
                        t["required_exponent"].as_f64().unwrap_or(f64::NAN),
                        t["verdict"].as_str().unwrap_or("?"),
                    ));
                }
            }
        }
        "covcheck_sweep" => {
            out.push_str(&format!(
                "cases: {}  certificates: {}  violations: {}  min slack: {}\n",
                summary["cases"], summary["certificates"], summary["violations"],
                trim_num(&summary["min_slack"]),
            ));
        }
        "gcip_scan" => {
            out.push_str(&format!(
                "variance-growth verdict: {} (s1 slope {}, tol {})\n",
                summary["bounded_verdict"].as_str().unwrap_or("?"),
                trim_num(&summary["s1_slope"]),
                summary["slope_tol"],
            ));
            out.push_str(&format!(
                "c1_hat = {}  c2_hat = {}  (delta {}, q_max {}{})\n",
                trim_num(&summary["c1_hat"]),
                trim_num(&summary["c2_hat"]),
                summary["delta"],
                summary["q_max"],
                if summary["synthetic"].as_bool().unwrap_or(false) {
                    ", synthetic covariances"
                } else {
                    ""
                },
            ));
            out.push_str(&format!(
                "block condition: {} (slope {}); partial-sum => block implication holds: {}\n",
                summary["s2_verdict"].as_str().unwrap_or("?"),
                trim_num(&summary["s2_slope"]),
                summary["implication_s1_to_s2"],
            ));
        }
        "ks_study" => {
            for row in summary["per_n"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "  n = {:>6}: mean {:.5}  median {:.5}  q90 {:.5}\n",
                    row["n"],
                    row["mean"].as_f64().unwrap_or(f64::NAN),
                    row["median"].as_f64().unwrap_or(f64::NAN),
                    row["q90"].as_f64().unwrap_or(f64::NAN),
                ));
            }
            out.push_str(&format!(
                "fitted decay exponent b = {:.4} (mean deviation ~ C * n^-b)\n",
                summary["decay_exponent"].as_f64().unwrap_or(f64::NAN)
            ));
            match summary["dkw"].as_object() {
                Some(d) => out.push_str(&format!(
                    "iid concentration check: {}\n",
                    if d["pass"].as_bool().unwrap_or(false) { "PASS" } else { "FAIL" }
                )),
                None => out.push_str("iid concentration check: not requested\n"),
            }
        }
        "entropy" => {
            for c in summary["covers"].as_array().into_iter().flatten() {
                out.push_str(&format!(
                    "  epsilon {}: {} brackets, verified {}\n",
                    c["epsilon"], c["count"], c["verified"],
                ));
            }
            out.push_str(&format!(
                "VC index: half-lines {}, intervals {}\n",
                render_index(&summary["vc_half_lines"]["index"]),
                render_index(&summary["vc_intervals"]["index"]),
            ));
        }
        "gc_verdict" => {
            out.push_str(&format!(
                "verdict: {}\n",
                summary["verdict"].as_str().unwrap_or("?")
            ));
            for item in summary["checklist"].as_array().into_iter().flatten() {
                let arr = item.as_array();
                if let Some([name, pass, detail]) = arr.map(|a| &a[..]) {
                    out.push_str(&format!(
                        "  [{}] {}: {}\n",
                        if pass.as_bool().unwrap_or(false) { "ok" } else { "FAIL" },
                        name.as_str().unwrap_or("?"),
                        detail.as_str().unwrap_or(""),
                    ));
                }
            }
            out.push_str(&format!("{}\n", summary["note"].as_str().unwrap_or("")));
        }
        _ => {
            out.push_str(&format!("{summary}\n"));
        }
    }
}

fn render_index(v: &serde_json::Value) -> String {
    if let Some(i) = v.get("index") {
        return format!("{i}");
    }
    if let Some(nf) = v.get("not_found") {
        return format!("not found up to {}", nf["up_to"]);
    }
    format!("{v}")
}

fn trim_num(v: &serde_json::Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:.4}"),
        None => v.to_string(),
    }
}

//! Task execution: delegates to the library and writes CSV/JSON artifacts.
//!
//! CSV bodies are pure functions of the config (shortest round-trip float
//! formatting), so re-running a config reproduces them byte for byte; wall
//! clock only ever enters the run record.

use serde_json::{json, Value};

use gclab_core::covcheck::inequality_sweep;
use gclab_core::empirical::{convergence_study_parallel, dkw_tail_check};
use gclab_core::entropy::{
    bracket_halflines, default_test_grid, gc_verdict, vc_index, verify_cover, HalfLines,
    Intervals,
};
use gclab_core::gcip::{gcip_scan, CovSequence, GcipMode, GcipParams, GcipSource};
use gclab_core::mixing::{
    estimate_alpha_modulus_profile, threshold_check, MixingProfile, RateThreshold,
};
use gclab_core::procgen::{generate, ProcessKind};
use gclab_core::{LabError, Result};

use crate::config::{ExperimentConfig, ModeConfig, SyntheticCovConfig, TaskConfig};
use crate::record::OutputWriter;

/// Runs the configured task, writing artifacts through `out`.
///
/// Returns the summary embedded into the run record (and rendered by
/// `report`).
pub fn execute(config: &ExperimentConfig, out: &mut OutputWriter) -> Result<Value> {
    let spec = config.process.to_spec()?;
    let io_err = |e: std::io::Error| LabError::Numeric(format!("io failure: {e}"));
    match &config.task {
        TaskConfig::Generate { n } => {
            let path = generate(&spec, *n, config.seed)?;
            let mut csv = String::from("index,value\n");
            for (i, v) in path.values.iter().enumerate() {
                csv.push_str(&format!("{i},{v}\n"));
            }
            out.write("path.csv", &csv).map_err(io_err)?;
            Ok(json!({
                "n": n,
                "spec_label": path.spec_label,
                "seed": config.seed,
                "first_value": path.values.first(),
                "last_value": path.values.last(),
            }))
        }

        TaskConfig::MixingProfile { lags, deltas, estimator } => {
            run_mixing_profile(config, &spec, lags, deltas, estimator.as_ref(), out)
        }

        TaskConfig::CovcheckSweep { models, k_min, k_max, lags } => {
            let mut jsonl = String::new();
            let summary = inequality_sweep(
                *models,
                (*k_min, *k_max),
                lags,
                config.seed,
                |case, lag, cert| {
                    let line = json!({
                        "k": case.model.k(),
                        "lag": lag,
                        "inequality": cert.inequality_id,
                        "lhs": cert.lhs,
                        "rhs": cert.rhs,
                        "slack": cert.slack,
                        "pass": cert.pass(),
                        "inputs_digest": cert.inputs_digest,
                    });
                    jsonl.push_str(&line.to_string());
                    jsonl.push('\n');
                },
            )?;
            out.write("certificates.jsonl", &jsonl).map_err(io_err)?;
            if summary.violations > 0 {
                return Err(LabError::Numeric(format!(
                    "{} covariance-bound violations: a certified inequality failed",
                    summary.violations
                )));
            }
            Ok(serde_json::to_value(&summary).expect("summary serializes"))
        }

        TaskConfig::GcipScan { delta, q_max, x_grid, mode, synthetic_cov } => {
            let params = GcipParams {
                delta: *delta,
                q_max: *q_max,
                x_grid: x_grid.clone(),
                mode: match mode {
                    ModeConfig::Exact => GcipMode::ExactMarkov,
                    ModeConfig::MonteCarlo { reps } => GcipMode::MonteCarlo { reps: *reps },
                },
            };
            let source = scan_source(config, &spec, synthetic_cov.as_ref());
            let report = gcip_scan(&source, &params, None)?;
            out.write("gcip.csv", &report.to_csv()).map_err(io_err)?;
            let summary = json!({
                "source_label": report.source_label,
                "synthetic": report.synthetic,
                "delta": report.delta,
                "q_max": report.q_max,
                "c1_hat": report.c1_hat,
                "c2_hat": report.c2_hat,
                "bounded_verdict": report.bounded_verdict.to_string(),
                "s1_slope": report.s1_slope,
                "s2_verdict": report.s2_verdict.to_string(),
                "s2_slope": report.s2_slope,
                "slope_tol": report.slope_tol,
                "growth_tol": report.growth_tol,
                "implication_s1_to_s2": gclab_core::gcip::implication_check(&report),
                "note": report.note,
            });
            out.write(
                "gcip_summary.json",
                &serde_json::to_string_pretty(&summary).expect("json"),
            )
            .map_err(io_err)?;
            Ok(summary)
        }

        TaskConfig::KsStudy { n_grid, reps, dkw } => {
            let study = convergence_study_parallel(&spec, n_grid, *reps, config.seed)?;
            out.write("study.csv", &study.to_csv()).map_err(io_err)?;
            out.write("study_plot.csv", &study.to_plot_csv()).map_err(io_err)?;
            let dkw_report = if *dkw {
                Some(dkw_tail_check(&study)?)
            } else {
                None
            };
            let summary = json!({
                "spec_label": study.spec_label,
                "n_grid": study.n_grid,
                "reps": study.reps,
                "decay_exponent": study.decay_exponent(),
                "decay_c": study.fit.intercept.exp(),
                "fit_rmse": study.fit.rmse,
                "per_n": study.summary,
                "dkw": dkw_report,
                "note": study.note,
            });
            out.write(
                "study_summary.json",
                &serde_json::to_string_pretty(&summary).expect("json"),
            )
            .map_err(io_err)?;
            Ok(summary)
        }

        TaskConfig::Entropy { epsilons, universe, max_n } => {
            if epsilons.is_empty() {
                return Err(LabError::Validation("epsilons must be nonempty".into()));
            }
            let marginal = spec.marginal_dist();
            let grid = default_test_grid(&marginal, 10_000);
            let mut covers = Vec::new();
            for &eps in epsilons {
                let cover = bracket_halflines(&marginal, eps)?;
                let verified = verify_cover(&cover, &marginal, &grid);
                if !verified {
                    return Err(LabError::Numeric(format!(
                        "bracket cover at epsilon {eps} failed re-verification"
                    )));
                }
                covers.push(json!({
                    "epsilon": eps,
                    "count": cover.count,
                    "metric": cover.metric,
                    "constructive_upper_bound": cover.constructive_upper_bound,
                    "verified": verified,
                    "brackets": cover.brackets,
                }));
            }
            let half = vc_index(&HalfLines::covering(universe), universe, *max_n)?;
            let intervals = vc_index(&Intervals::covering(universe), universe, *max_n)?;
            let summary = json!({
                "spec_label": spec.label,
                "covers": covers,
                "vc_half_lines": half,
                "vc_intervals": intervals,
            });
            out.write(
                "entropy.json",
                &serde_json::to_string_pretty(&summary).expect("json"),
            )
            .map_err(io_err)?;
            Ok(summary)
        }

        TaskConfig::GcVerdict { epsilons, delta, q_max, x_grid, synthetic_cov } => {
            if epsilons.is_empty() {
                return Err(LabError::Validation("epsilons must be nonempty".into()));
            }
            let marginal = spec.marginal_dist();
            let covers = epsilons
                .iter()
                .map(|&e| bracket_halflines(&marginal, e))
                .collect::<Result<Vec<_>>>()?;
            let params = GcipParams {
                delta: *delta,
                q_max: *q_max,
                x_grid: x_grid.clone(),
                mode: GcipMode::ExactMarkov,
            };
            let source = scan_source(config, &spec, synthetic_cov.as_ref());
            let report = gcip_scan(&source, &params, None)?;
            let verdict = gc_verdict(&covers, &report)?;
            let summary = json!({
                "verdict": verdict.verdict.to_string(),
                "class_id": verdict.class_id,
                "process_label": verdict.process_label,
                "checklist": verdict.checklist,
                "note": verdict.note,
            });
            out.write(
                "verdict.json",
                &serde_json::to_string_pretty(&summary).expect("json"),
            )
            .map_err(io_err)?;
            Ok(summary)
        }
    }
}

fn scan_source(
    config: &ExperimentConfig,
    spec: &gclab_core::procgen::ProcessSpec,
    synthetic: Option<&SyntheticCovConfig>,
) -> GcipSource {
    match synthetic {
        Some(s) => GcipSource::Synthetic {
            var0: s.var0,
            cov: CovSequence::PowerLaw { c: s.c, exponent: s.exponent },
            label: s.label.clone(),
        },
        None => GcipSource::Process { spec: spec.clone(), seed: config.seed },
    }
}

fn run_mixing_profile(
    config: &ExperimentConfig,
    spec: &gclab_core::procgen::ProcessSpec,
    lags: &[u32],
    deltas: &[f64],
    estimator: Option<&crate::config::EstimatorConfig>,
    out: &mut OutputWriter,
) -> Result<Value> {
    let io_err = |e: std::io::Error| LabError::Numeric(format!("io failure: {e}"));
    let mut profiles: Vec<(&str, MixingProfile)> = Vec::new();
    match (&spec.kind, estimator) {
        (ProcessKind::Markov(model), _) => {
            profiles.push(("alpha", MixingProfile::alpha_exact(model, lags)?));
            profiles.push(("beta", MixingProfile::beta_exact(model, lags)?));
        }
        (_, Some(est)) => {
            let profile = estimate_alpha_modulus_profile(
                spec,
                est.x,
                lags,
                est.reps,
                est.path_length,
                config.seed,
            )?;
            profiles.push(("alpha_modulus", profile));
        }
        _ => {
            return Err(LabError::Validation(
                "exact profiles need a finite chain; other processes need an estimator block"
                    .into(),
            ));
        }
    }

    let mut summary_profiles = Vec::new();
    for (name, profile) in &mut profiles {
        out.write(&format!("mixing_{name}.csv"), &profile.to_csv())
            .map_err(io_err)?;
        let fit = gclab_core::mixing::fit_decay(profile).ok();
        let thresholds: Vec<Value> = deltas
            .iter()
            .map(|&d| {
                let verdict = threshold_check(profile, d)?;
                Ok(json!({
                    "delta": d,
                    "required_exponent": RateThreshold::new(d)?.exponent,
                    "verdict": verdict.to_string(),
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        summary_profiles.push(json!({
            "name": name,
            "kind": profile.kind,
            "provenance": profile.provenance,
            "lags": profile.lags,
            "values": profile.values,
            "fit": fit,
            "thresholds": thresholds,
            "note": profile.note,
        }));
    }
    Ok(json!({
        "spec_label": spec.label,
        "profiles": summary_profiles,
    }))
}

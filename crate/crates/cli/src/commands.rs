//! The four subcommands. Each writes its files into the output directory
//! and returns an error only for failures that map to a nonzero exit code.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use wavefront_core::charspec::{build_report, find_positive_roots, SpeedClassifier};
use wavefront_core::io::{write_profile_csv, write_profile_meta, ProfileMeta};
use wavefront_core::systems::epidemic_solve;
use wavefront_core::systems::population_reconstruct;
use wavefront_core::wavesolve::{
    align_translate, fixed_point_solve, residual, select_beta, verify_hypotheses, Init, InitPreset, Profile,
    SolveOutcome,
};
use wavefront_core::{CharParams, WaveModel};

use crate::config::{ModelSpec, RunConfig};
use crate::error::CliError;

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), contents).map_err(|e| CliError::Io(format!("{}: {e}", dir.join(name).display())))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    write_file(dir, name, &(text + "\n"))
}

fn kappa(model: &WaveModel) -> f64 {
    model.equilibrium(1e3).unwrap_or(1.0)
}

fn amplitude(cfg: &RunConfig, model: &WaveModel) -> f64 {
    cfg.command.amplitude.unwrap_or_else(|| 1.5 * kappa(model))
}

fn speed_of(cfg: &RunConfig) -> Result<f64, CliError> {
    cfg.command
        .c
        .ok_or_else(|| CliError::Config("at `command.c`: a speed is required for this command".into()))
}

/// `speeds`: characteristic report over a speed grid.
pub fn cmd_speeds(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let model = cfg.scalar_model()?;
    let classifier = SpeedClassifier::new(&model)?;
    let speeds = match &cfg.command.speeds {
        Some(s) => s.clone(),
        None => {
            let (lo, hi) = (classifier.c_star - 1.0, classifier.c_starstar + 2.0);
            (0..=40).map(|i| lo + (hi - lo) * i as f64 / 40.0).collect()
        }
    };
    let beta = select_beta(&model.f, amplitude(cfg, &model))?.beta;
    let report = build_report(&model, beta, &speeds)?;
    write_json(out, "report.json", &report)?;
    let csv = report.to_csv().map_err(|e| CliError::Io(e.to_string()))?;
    write_file(out, "report.csv", &csv)
}

#[derive(Debug, Clone, Serialize)]
struct OutcomeSummary {
    status: &'static str,
    iterations: Option<usize>,
    sup: Option<f64>,
    detail: Option<Value>,
}

fn summarize(outcome: &SolveOutcome) -> OutcomeSummary {
    match outcome {
        SolveOutcome::Converged(p) => OutcomeSummary {
            status: "converged",
            iterations: p.iterations,
            sup: Some(p.sup),
            detail: None,
        },
        SolveOutcome::Collapsed { iterations, sup } => OutcomeSummary {
            status: "collapsed",
            iterations: Some(*iterations),
            sup: Some(*sup),
            detail: None,
        },
        SolveOutcome::NotConverged { profile, reason } => OutcomeSummary {
            status: "not_converged",
            iterations: profile.iterations,
            sup: Some(profile.sup),
            detail: serde_json::to_value(reason).ok(),
        },
    }
}

struct SpeedContext {
    verdict: String,
    lambda1: Option<f64>,
    experimental: bool,
}

fn speed_context(model: &WaveModel, c: f64) -> Result<SpeedContext, CliError> {
    let verdict = SpeedClassifier::new(model)?.classify(c);
    let lambda1 = find_positive_roots(&CharParams::chi0(model), c)
        .ok()
        .flatten()
        .map(|r| r.lambda1);
    let experimental = !model.g.is_monotone();
    Ok(SpeedContext {
        verdict: verdict.to_string(),
        lambda1,
        experimental,
    })
}

fn write_profile(
    out: &Path,
    stem: &str,
    p: &Profile,
    residual: Option<f64>,
    ctx: &SpeedContext,
) -> Result<(), CliError> {
    let mut meta = ProfileMeta::of(p);
    meta.residual = residual;
    meta.lambda1 = ctx.lambda1;
    meta.verdict = Some(ctx.verdict.clone());
    meta.experimental = ctx.experimental;
    write_file(out, &format!("{stem}.csv"), &write_profile_csv(p)?)?;
    write_file(out, &format!("{stem}.meta.json"), &(write_profile_meta(&meta)? + "\n"))
}

fn init_of(cfg: &RunConfig, default: InitPreset, seed: u64) -> Init {
    Init::Preset {
        preset: cfg.command.init.unwrap_or(default),
        seed: Some(seed),
    }
}

fn not_converged(outcome: &SolveOutcome) -> Option<CliError> {
    match outcome {
        SolveOutcome::NotConverged { reason, .. } => Some(CliError::NotConverged(format!("{reason:?}"))),
        _ => None,
    }
}

/// `solve`: one profile (and its companion component for the systems).
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let c = speed_of(cfg)?;
    let model = cfg.scalar_model()?;
    let ctx = speed_context(&model, c)?;
    let init = init_of(cfg, InitPreset::StepRamp, cfg.seed);
    let solver = &cfg.command.solver;
    let mut report = json!({
        "command": "solve",
        "c": c,
        "verdict": ctx.verdict,
        "experimental": ctx.experimental,
        "lambda1": ctx.lambda1,
    });
    let outcome = match &cfg.model {
        ModelSpec::Scalar { .. } => fixed_point_solve(&model, c, init, solver)?,
        ModelSpec::Epidemic { .. } => {
            let run = epidemic_solve(&cfg.epidemic()?, c, init, solver)?;
            if let Some(psi) = &run.psi {
                write_profile(out, "profile_psi", psi, run.residual_psi, &ctx)?;
                report["residual_psi"] = json!(run.residual_psi);
            }
            run.outcome
        }
        ModelSpec::Population { .. } => {
            let outcome = fixed_point_solve(&model, c, init, solver)?;
            if let SolveOutcome::Converged(phi) = &outcome {
                let rec = population_reconstruct(&cfg.population()?, phi, c)?;
                write_profile(out, "profile_psi", &rec.psi, Some(rec.residual), &ctx)?;
                report["residual_psi"] = json!(rec.residual);
                report["psi_clamped"] = json!(rec.clamped);
                report["psi_negative"] = json!(rec.negative);
                report["psi_most_negative"] = json!(rec.most_negative);
            }
            outcome
        }
    };
    report["outcome"] = serde_json::to_value(summarize(&outcome)).unwrap_or(Value::Null);
    match &outcome {
        SolveOutcome::Converged(phi) | SolveOutcome::NotConverged { profile: phi, .. } => {
            let r = residual(&model, c, phi)?;
            report["residual_phi"] = json!(r);
            report["decay_fit"] = json!(phi.decay_fit);
            write_profile(out, "profile_phi", phi, Some(r), &ctx)?;
        }
        SolveOutcome::Collapsed { .. } => {}
    }
    write_json(out, "report.json", &report)?;
    not_converged(&outcome).map_or(Ok(()), Err)
}

/// A scalar model that fails validation still gets its hypothesis report,
/// with the verdict `Experimental` and no solver runs.
fn verify_hypotheses_only(cfg: &RunConfig, out: &Path, c: f64, err: CliError) -> Result<(), CliError> {
    let Some(model) = cfg.unchecked_scalar_model() else {
        return Err(err);
    };
    let Ok(hyp) = verify_hypotheses(&model, amplitude(cfg, &model), c, cfg.seed) else {
        return Err(err);
    };
    let report = json!({
        "command": "verify",
        "c": c,
        "verdict": "Experimental",
        "model_error": err.to_string(),
        "hypotheses": hyp,
        "uniqueness": Value::Null,
        "nonexistence": [],
    });
    write_json(out, "report.json", &report)
}

/// `verify`: two-seed uniqueness run, hypothesis checks and a sweep below `c*`.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let c = speed_of(cfg)?;
    let model = match cfg.scalar_model() {
        Ok(m) => m,
        Err(e) => return verify_hypotheses_only(cfg, out, c, e),
    };
    let classifier = SpeedClassifier::new(&model)?;
    let ctx = speed_context(&model, c)?;
    let solver = &cfg.command.solver;
    let seeds = [
        Init::Preset {
            preset: InitPreset::StepRamp,
            seed: Some(cfg.seed),
        },
        Init::Preset {
            preset: InitPreset::TanhRamp,
            seed: Some(cfg.seed.wrapping_add(1)),
        },
    ];
    let runs: Vec<_> = seeds
        .into_par_iter()
        .map(|init| fixed_point_solve(&model, c, init, solver))
        .collect::<Result<_, _>>()?;

    let hyp = verify_hypotheses(&model, amplitude(cfg, &model), c, cfg.seed)?;
    let downgraded = ctx.experimental || !hyp.all_hold();
    let verdict = if downgraded {
        "Experimental".to_string()
    } else {
        ctx.verdict.clone()
    };
    let ctx = SpeedContext {
        verdict: verdict.clone(),
        ..ctx
    };

    let mut uniqueness = json!({
        "runs": runs.iter().map(summarize).collect::<Vec<_>>(),
    });
    if let [SolveOutcome::Converged(a), SolveOutcome::Converged(b)] = runs.as_slice() {
        let (shift, distance) = align_translate(a, b);
        let sup = a.sup.max(b.sup);
        uniqueness["shift"] = json!(shift);
        uniqueness["distance"] = json!(distance);
        uniqueness["relative_distance"] = json!(distance / sup);
        uniqueness["passes"] = json!(distance < 1e-3 * sup);
        for (stem, p) in [("profile_seed_a", a), ("profile_seed_b", b)] {
            write_profile(out, stem, p, Some(residual(&model, c, p)?), &ctx)?;
        }
    }

    let sweep = cfg
        .command
        .sweep
        .clone()
        .unwrap_or_else(|| vec![classifier.c_star - 1.0, classifier.c_star - 0.5]);
    let nonexistence: Vec<Value> = sweep
        .par_iter()
        .map(|&cs| {
            let init = Init::Preset {
                preset: InitPreset::Small { amplitude: 1e-2 },
                seed: None,
            };
            let verdict = classifier.classify(cs).to_string();
            match fixed_point_solve(&model, cs, init, solver) {
                Ok(o) => json!({"c": cs, "verdict": verdict, "outcome": summarize(&o)}),
                Err(e) => json!({"c": cs, "verdict": verdict, "error": e.to_string()}),
            }
        })
        .collect();

    let report = json!({
        "command": "verify",
        "c": c,
        "c_star": classifier.c_star,
        "c_starstar": classifier.c_starstar,
        "verdict": verdict,
        "speed_verdict": classifier.classify(c).to_string(),
        "hypotheses": hyp,
        "uniqueness": uniqueness,
        "nonexistence": nonexistence,
    });
    write_json(out, "report.json", &report)?;
    runs.iter().find_map(not_converged).map_or(Ok(()), Err)
}

/// `sweep`: solves at every speed of `command.sweep`.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let model = cfg.scalar_model()?;
    let speeds = cfg
        .command
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("at `command.sweep`: a speed list is required".into()))?;
    let solver = &cfg.command.solver;
    let rows: Vec<(f64, Result<SolveOutcome, CliError>)> = speeds
        .par_iter()
        .map(|&c| {
            let init = init_of(cfg, InitPreset::StepRamp, cfg.seed);
            (c, fixed_point_solve(&model, c, init, solver).map_err(CliError::from))
        })
        .collect();

    let mut csv = String::from("c,status,iterations,sup,residual,decay_rate,lambda1,verdict\n");
    let mut entries = Vec::new();
    for (c, res) in &rows {
        let ctx = speed_context(&model, *c)?;
        let fmt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        match res {
            Ok(outcome) => {
                let s = summarize(outcome);
                let (r, rate) = match outcome {
                    SolveOutcome::Converged(p) => {
                        let r = residual(&model, *c, p)?;
                        write_profile(out, &format!("profile_c{c}"), p, Some(r), &ctx)?;
                        (Some(r), p.decay_fit.map(|f| f.rate))
                    }
                    _ => (None, None),
                };
                csv += &format!(
                    "{c},{},{},{},{},{},{},{}\n",
                    s.status,
                    s.iterations.map_or(String::new(), |i| i.to_string()),
                    fmt(s.sup),
                    fmt(r),
                    fmt(rate),
                    fmt(ctx.lambda1),
                    ctx.verdict
                );
                entries.push(json!({"c": c, "verdict": ctx.verdict, "outcome": s, "residual": r}));
            }
            Err(e) => {
                csv += &format!("{c},error,,,,,{},{}\n", fmt(ctx.lambda1), ctx.verdict);
                entries.push(json!({"c": c, "verdict": ctx.verdict, "error": e.to_string()}));
            }
        }
    }
    write_json(out, "report.json", &json!({"command": "sweep", "rows": entries}))?;
    write_file(out, "report.csv", &csv)
}

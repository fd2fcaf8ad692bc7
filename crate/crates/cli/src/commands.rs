use std::path::Path;

use frameforge::linalg::{numerical_rank, spectral_norm};
use frameforge::multiplier::{
    interleave_identity_construction, invertibility_check, multiplier_matrix, reconstruction_duality_check,
    unconditionality_diagnostic, weight_shift,
};
use frameforge::opspace::{frame_bounds_with, growth_classify, BoundsField, Subspace};
use frameforge::reweight::{
    bessel_weights, dual_pair_reweight, finite_domain_lower_bound, reproducing_pair_reweight,
    weighted_frame_verdict, WeightCertificate, WeightedFrameVerdict,
};
use frameforge::{build_sequence, default_tau, BoundsReport, Error, RunConfig, SequenceSpec, VectorSequence};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::inputs::{check_dims, load_multiplier, load_spec};
use crate::report::{num, to_value, Report, Series, Table};
use crate::{MultiplierAction, Outcome, WeighArgs};

fn outcome(report: Report, table: Option<Table>, plot: Vec<Series>) -> Outcome {
    Outcome { report, table, plot, failures: Vec::new() }
}

pub(crate) fn sweep(spec: &SequenceSpec, config: &RunConfig) -> Result<Vec<(VectorSequence, BoundsReport)>, CliError> {
    check_dims(|n| spec.shape(n), &config.ns, config.max_dim)?;
    config
        .ns
        .iter()
        .map(|&n| {
            let s = build_sequence(spec, n)?;
            let r = frame_bounds_with(&s, config.svd_cutoff);
            Ok((s, r))
        })
        .collect()
}

pub(crate) fn trends(reports: &[BoundsReport], config: &RunConfig) -> Result<Value, CliError> {
    if reports.len() < 3 {
        return Ok(Value::Null);
    }
    let t = config.trend_thresholds();
    Ok(json!({
        "lower_A": growth_classify(reports, BoundsField::LowerA, t)?,
        "upper_B": growth_classify(reports, BoundsField::UpperB, t)?,
        "ratio": growth_classify(reports, BoundsField::Ratio, t)?,
    }))
}

pub(crate) fn bounds_plot(reports: &[BoundsReport]) -> Vec<Series> {
    let series = |name: &str, f: fn(&BoundsReport) -> f64| Series {
        name: name.into(),
        points: reports.iter().map(|r| (r.trunc_index.unwrap_or(0) as f64, f(r))).collect(),
    };
    vec![series("upper_B", |r| r.upper_b), series("lower_A", |r| r.lower_a), series("ratio", |r| r.ratio)]
}

pub fn analyze(path: &Path, config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = load_spec(path)?;
    let reports: Vec<BoundsReport> = sweep(&spec, config)?.into_iter().map(|(_, r)| r).collect();
    let mut table = Table::new(&["N", "lower_A", "upper_B", "ratio", "complete", "minimal", "excess", "rank"]);
    for (n, r) in config.ns.iter().zip(&reports) {
        table.push(vec![
            n.to_string(),
            num(r.lower_a),
            num(r.upper_b),
            num(r.ratio),
            r.complete.to_string(),
            r.minimal.to_string(),
            r.excess.to_string(),
            r.rank.to_string(),
        ]);
    }
    let results = json!({ "label": spec.label(), "reports": reports, "trends": trends(&reports, config)? });
    let report = Report::new("analyze", config, json!({ "spec": spec }), results);
    Ok(outcome(report, Some(table), bounds_plot(&reports)))
}

pub fn export(path: &Path, n: usize, config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = load_spec(path)?;
    check_dims(|n| spec.shape(n), &[n], config.max_dim)?;
    let s = build_sequence(&spec, n)?;
    let mut table = Table::new(&["member", "component", "re", "im"]);
    for (j, v) in s.iter().enumerate() {
        for (k, z) in v.iter().enumerate() {
            table.push(vec![(j + 1).to_string(), (k + 1).to_string(), num(z.re), num(z.im)]);
        }
    }
    let results = json!({ "N": n, "ambient_dim": s.ambient_dim(), "count": s.len() });
    let report = Report::new("export", config, json!({ "spec": spec }), results);
    Ok(outcome(report, Some(table), Vec::new()))
}

fn weights_table(rows: &[(usize, &WeightCertificate)]) -> Table {
    let mut table = Table::new(&["N", "index", "weight"]);
    for (n, cert) in rows {
        for (i, w) in cert.weights.real_values().iter().enumerate() {
            table.push(vec![n.to_string(), (i + 1).to_string(), num(*w)]);
        }
    }
    table
}

fn paired(
    f_spec: &SequenceSpec,
    g_path: &Path,
    config: &RunConfig,
) -> Result<(SequenceSpec, Vec<(usize, VectorSequence, VectorSequence)>), CliError> {
    let g_spec = load_spec(g_path)?;
    check_dims(|n| g_spec.shape(n), &config.ns, config.max_dim)?;
    let fs = sweep(f_spec, config)?;
    let mut out = Vec::with_capacity(fs.len());
    for (&n, (f, _)) in config.ns.iter().zip(fs) {
        let g = build_sequence(&g_spec, n)?;
        if (f.ambient_dim(), f.len()) != (g.ambient_dim(), g.len()) {
            return Err(Error::DimensionMismatch(format!(
                "at N = {n} the pair has shapes {}x{} and {}x{}",
                f.ambient_dim(),
                f.len(),
                g.ambient_dim(),
                g.len()
            ))
            .into());
        }
        out.push((n, f, g));
    }
    Ok((g_spec, out))
}

pub fn weigh(args: &WeighArgs, config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = load_spec(&args.spec)?;
    let mode = &args.mode;
    let mut inputs = json!({ "spec": spec });

    if mode.verdict {
        let verdict = weighted_frame_verdict(&spec, config)?;
        let ev = verdict.evidence();
        let mut table =
            Table::new(&["N", "lower_A", "upper_B", "ratio", "best_lower_A", "best_upper_B", "best_ratio"]);
        for (i, n) in ev.ns.iter().enumerate() {
            let u = &ev.unweighted;
            let best = |v: Option<&Vec<f64>>| v.map(|v| num(v[i])).unwrap_or_default();
            table.push(vec![
                n.to_string(),
                num(u.lower_a[i]),
                num(u.upper_b[i]),
                num(u.ratio[i]),
                best(ev.best.as_ref().map(|b| &b.lower_a)),
                best(ev.best.as_ref().map(|b| &b.upper_b)),
                best(ev.best.as_ref().map(|b| &b.ratio)),
            ]);
        }
        if let WeightedFrameVerdict::WeightedFrame { certificate, .. } = &verdict {
            let last = *config.ns.last().expect("validated");
            table = weights_table(&[(last, certificate)]);
        }
        let xs: Vec<f64> = ev.ns.iter().map(|&n| n as f64).collect();
        let plot = vec![
            Series { name: "upper_B".into(), points: xs.iter().copied().zip(ev.unweighted.upper_b.clone()).collect() },
            Series { name: "ratio".into(), points: xs.iter().copied().zip(ev.unweighted.ratio.clone()).collect() },
        ];
        let results = json!({ "mode": "verdict", "verdict": verdict });
        return Ok(outcome(Report::new("weigh", config, inputs, results), Some(table), plot));
    }

    if let Some(bound) = mode.bessel {
        let mut certs = Vec::new();
        for (s, _) in sweep(&spec, config)? {
            let tau = default_tau(s.len())?;
            certs.push((s.trunc_index().unwrap_or(0), bessel_weights(&s, bound, &tau)?));
        }
        let rows: Vec<(usize, &WeightCertificate)> = certs.iter().map(|(n, c)| (*n, c)).collect();
        let table = weights_table(&rows);
        let per_n: Vec<Value> = certs.iter().map(|(n, c)| json!({ "N": n, "certificate": c })).collect();
        let results = json!({ "mode": "bessel", "bound": bound, "truncations": per_n });
        return Ok(outcome(Report::new("weigh", config, inputs, results), Some(table), Vec::new()));
    }

    if let Some(g_path) = &mode.dual {
        let (g_spec, pairs) = paired(&spec, g_path, config)?;
        inputs["pair"] = to_value(&g_spec);
        let mut per_n = Vec::new();
        let mut table = Table::new(&["N", "index", "lambda", "beta"]);
        for (n, f, g) in pairs {
            let tau = default_tau(f.len())?;
            let r = dual_pair_reweight(&f, &g, &tau, config.tolerance)?;
            for (i, (l, b)) in r.lambda.real_values().iter().zip(r.beta.real_values()).enumerate() {
                table.push(vec![n.to_string(), (i + 1).to_string(), num(*l), num(b)]);
            }
            per_n.push(json!({ "N": n, "reweight": r }));
        }
        let results = json!({ "mode": "dual", "truncations": per_n });
        return Ok(outcome(Report::new("weigh", config, inputs, results), Some(table), Vec::new()));
    }

    if let Some(a) = mode.reproducing {
        let g_path = args
            .pair
            .as_ref()
            .ok_or_else(|| CliError::Usage("--reproducing needs --pair PATH".into()))?;
        let (g_spec, pairs) = paired(&spec, g_path, config)?;
        inputs["pair"] = to_value(&g_spec);
        let mut per_n = Vec::new();
        let mut table = Table::new(&["N", "index", "lambda", "beta"]);
        for (n, f, g) in pairs {
            let tau = default_tau(f.len())?;
            let r = reproducing_pair_reweight(&f, &g, a, &tau, config.condition_cap)?;
            for (i, (l, b)) in r.lambda.real_values().iter().zip(r.beta.real_values()).enumerate() {
                table.push(vec![n.to_string(), (i + 1).to_string(), num(*l), num(b)]);
            }
            per_n.push(json!({ "N": n, "reweight": r }));
        }
        let results = json!({ "mode": "reproducing", "A": a, "truncations": per_n });
        return Ok(outcome(Report::new("weigh", config, inputs, results), Some(table), Vec::new()));
    }

    let k = mode.finite_domain.expect("clap enforces one mode");
    let mut per_n = Vec::new();
    let mut table = Table::new(&["N", "lower_bound"]);
    let mut points = Vec::new();
    for (s, _) in sweep(&spec, config)? {
        let n = s.trunc_index().unwrap_or(0);
        let w = Subspace::coordinate(s.ambient_dim(), k)?;
        let b = finite_domain_lower_bound(&s, &w)?;
        table.push(vec![n.to_string(), num(b.lower_bound)]);
        points.push((n as f64, b.lower_bound));
        per_n.push(json!({ "N": n, "bound": b }));
    }
    inputs["subspace_dim"] = json!(k);
    let results = json!({ "mode": "finite_domain", "truncations": per_n });
    let plot = vec![Series { name: "lower bound on W".into(), points }];
    Ok(outcome(Report::new("weigh", config, inputs, results), Some(table), plot))
}

fn echo_columns(seq: &VectorSequence, limit: usize) -> Value {
    let cols: Vec<Vec<[f64; 2]>> =
        seq.iter().take(limit).map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect();
    json!(cols)
}

const ECHO_LIMIT: usize = 8;

pub fn multiplier(path: &Path, action: MultiplierAction, config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = load_multiplier(path)?;
    check_dims(|n| spec.shape(n), &config.ns, config.max_dim)?;
    let inputs = json!({ "multiplier": spec });
    let ns = &config.ns;
    let thresholds = config.trend_thresholds();
    let (name, results, table, plot) = match action {
        MultiplierAction::Apply => {
            let mut table = Table::new(&["N", "operator_norm", "rank"]);
            let mut per_n = Vec::new();
            for &n in ns {
                let m = multiplier_matrix(&spec, n)?.matrix;
                let (norm, rank) = (spectral_norm(&m), numerical_rank(&m, config.svd_cutoff));
                table.push(vec![n.to_string(), num(norm), rank.to_string()]);
                per_n.push(json!({ "N": n, "operator_norm": norm, "rank": rank, "dim": m.nrows() }));
            }
            ("apply", json!(per_n), table, Vec::new())
        }
        MultiplierAction::Invert => {
            let mut table = Table::new(&["N", "invertible", "condition"]);
            let mut per_n = Vec::new();
            for &n in ns {
                let v = invertibility_check(&spec, n, config.svd_cutoff)?;
                let cond = match v {
                    frameforge::Invertibility::Invertible { condition } => num(condition),
                    frameforge::Invertibility::Singular { .. } => String::new(),
                };
                table.push(vec![n.to_string(), (!cond.is_empty()).to_string(), cond]);
                per_n.push(json!({ "N": n, "invertibility": v }));
            }
            ("invert", json!(per_n), table, Vec::new())
        }
        MultiplierAction::Unconditional => {
            let r = unconditionality_diagnostic(&spec, ns, config.sign_trials, config.seed, thresholds)?;
            let mut table = Table::new(&["N", "test", "lower", "sign_sup", "majorant"]);
            for (t, series) in r.tests.iter().enumerate() {
                for (i, n) in r.ns.iter().enumerate() {
                    table.push(vec![
                        n.to_string(),
                        (t + 1).to_string(),
                        num(series.lower[i]),
                        num(series.sign_sup[i]),
                        num(series.majorant[i]),
                    ]);
                }
            }
            let xs: Vec<f64> = r.ns.iter().map(|&n| n as f64).collect();
            let plot = r.tests.first().map_or_else(Vec::new, |s| {
                vec![
                    Series { name: "majorant".into(), points: xs.iter().copied().zip(s.majorant.clone()).collect() },
                    Series { name: "sign_sup".into(), points: xs.iter().copied().zip(s.sign_sup.clone()).collect() },
                    Series { name: "lower".into(), points: xs.iter().copied().zip(s.lower.clone()).collect() },
                ]
            });
            ("unconditional", to_value(&r), table, plot)
        }
        MultiplierAction::Shift => {
            let r = weight_shift(&spec, ns, thresholds)?;
            let mut table = Table::new(&["N", "alpha_phi_bound", "beta_psi_bound"]);
            for (i, n) in r.ns.iter().enumerate() {
                table.push(vec![n.to_string(), num(r.alpha_phi_bound[i]), num(r.beta_psi_bound[i])]);
            }
            ("shift", to_value(&r), table, Vec::new())
        }
        MultiplierAction::Interleave => {
            let mut table = Table::new(&["N", "residual"]);
            let mut per_n = Vec::new();
            for &n in ns {
                let sys = interleave_identity_construction(&spec, n)?;
                table.push(vec![n.to_string(), num(sys.residual)]);
                per_n.push(json!({
                    "N": n,
                    "residual": sys.residual,
                    "length": sys.symbol.len(),
                    "symbol": sys.symbol.iter().take(2 * ECHO_LIMIT).collect::<Vec<_>>(),
                    "slots": sys.slots.iter().take(2 * ECHO_LIMIT).collect::<Vec<_>>(),
                    "xi": echo_columns(&sys.xi, ECHO_LIMIT),
                    "theta": echo_columns(&sys.theta, ECHO_LIMIT),
                }));
            }
            ("interleave", json!(per_n), table, Vec::new())
        }
        MultiplierAction::Duality => {
            let mut table = Table::new(&["N", "stmt1", "stmt2", "stmt3", "consistent"]);
            let mut per_n = Vec::new();
            for &n in ns {
                let t = spec.truncate(n)?;
                let r = reconstruction_duality_check(&t.phi, &t.psi, config.tolerance)?;
                table.push(vec![
                    n.to_string(),
                    r.stmt1.to_string(),
                    r.stmt2.to_string(),
                    r.stmt3.to_string(),
                    r.consistent.to_string(),
                ]);
                per_n.push(json!({ "N": n, "duality": r }));
            }
            ("duality", json!(per_n), table, Vec::new())
        }
    };
    let results = json!({ "action": name, "results": results });
    Ok(outcome(Report::new("multiplier", config, inputs, results), Some(table), plot))
}

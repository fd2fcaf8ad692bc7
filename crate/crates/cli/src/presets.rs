//! Built-in counterexample pipelines with their expected outcomes.

use frameforge::linalg::C64;
use frameforge::multiplier::{interleave_identity_construction, SymbolSpec};
use frameforge::opspace::{growth_classify, BoundsField, Subspace};
use frameforge::reweight::{
    biorthogonal_defect_scan, finite_domain_lower_bound, surjective_multiplier_dual, weighted_frame_verdict,
    ObstructionReason, WeightedFrameVerdict,
};
use frameforge::{BoundsReport, Error, FamilyName, MultiplierSpec, RunConfig, SequenceSpec, Vector, VectorSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{bounds_plot, sweep, trends};
use crate::error::CliError;
use crate::report::{num, Report, Series, Table};
use crate::{Outcome, Preset};

/// One checked outcome of a preset.
#[derive(Clone, Debug, Serialize)]
pub struct Expectation {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

#[derive(Default)]
struct Checks(Vec<Expectation>);

impl Checks {
    fn check(&mut self, name: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, passed: bool) {
        self.0.push(Expectation { name: name.into(), expected: expected.into(), observed: observed.into(), passed });
    }

    fn failures(&self) -> Vec<String> {
        self.0
            .iter()
            .filter(|e| !e.passed)
            .map(|e| format!("{}: expected {}, observed {}", e.name, e.expected, e.observed))
            .collect()
    }
}

const TOL: f64 = 1e-9;

fn preset_name(p: Preset) -> &'static str {
    match p {
        Preset::E1PlusEn => "e1-plus-en",
        Preset::NE1PlusEn => "n-e1-plus-en",
        Preset::FiniteDomain => "finite-domain",
        Preset::InterleaveIdentity => "interleave-identity",
    }
}

pub fn reproduce(preset: Preset, d: usize, config: &RunConfig) -> Result<Outcome, CliError> {
    let mut checks = Checks::default();
    let (inputs, results, table, plot) = match preset {
        Preset::E1PlusEn => one_plus_en(config, &mut checks)?,
        Preset::NE1PlusEn => n_one_plus_en(config, &mut checks)?,
        Preset::FiniteDomain => finite_domain(d, config, &mut checks)?,
        Preset::InterleaveIdentity => interleave_identity(config, &mut checks)?,
    };
    let failures = checks.failures();
    let mut inputs = inputs;
    inputs["preset"] = json!(preset_name(preset));
    let results = json!({ "expectations": checks.0, "passed": failures.is_empty(), "pipeline": results });
    Ok(Outcome { report: Report::new("reproduce", config, inputs, results), table: Some(table), plot, failures })
}

type PresetOutput = (Value, Value, Table, Vec<Series>);

fn bounds_table(reports: &[BoundsReport], defect: &[Option<f64>], extra: Option<(&str, &[f64])>) -> Table {
    let mut headers = vec!["N", "lower_A", "upper_B", "ratio", "defect_residual"];
    if let Some((name, _)) = extra {
        headers.push(name);
    }
    let mut table = Table::new(&headers);
    for (i, r) in reports.iter().enumerate() {
        let mut row = vec![
            r.trunc_index.unwrap_or(0).to_string(),
            num(r.lower_a),
            num(r.upper_b),
            num(r.ratio),
            defect[i].map(num).unwrap_or_default(),
        ];
        if let Some((_, values)) = extra {
            row.push(num(values[i]));
        }
        table.push(row);
    }
    table
}

fn defect_residuals(seqs: &[VectorSequence], spec: &SequenceSpec, config: &RunConfig) -> Result<(Vec<Option<f64>>, Value), CliError> {
    if seqs.iter().all(frameforge::is_minimal) {
        let scan = biorthogonal_defect_scan(seqs, spec.effective_meta(), config.defect_residual_threshold)?;
        Ok((scan.residuals.iter().map(|r| Some(*r)).collect(), serde_json::to_value(&scan).expect("serializes")))
    } else {
        Ok((vec![None; seqs.len()], Value::Null))
    }
}

fn one_plus_en(config: &RunConfig, checks: &mut Checks) -> Result<PresetOutput, CliError> {
    let spec = SequenceSpec::family(FamilyName::OnePlusEn);
    let (seqs, reports): (Vec<_>, Vec<_>) = sweep(&spec, config)?.into_iter().unzip();
    for r in &reports {
        let n = r.trunc_index.unwrap_or(0) as f64;
        checks.check(format!("A_{n} <= 1"), "<= 1", num(r.lower_a), r.lower_a <= 1.0 + TOL);
        checks.check(format!("B_{n} >= N-1"), format!(">= {}", n - 1.0), num(r.upper_b), r.upper_b >= n - 1.0 - TOL);
        let cap = 1.0 / (n - 1.0);
        checks.check(format!("ratio_{n} <= 1/(N-1)"), format!("<= {}", num(cap)), num(r.ratio), r.ratio <= cap * (1.0 + TOL));
    }
    let upper = growth_classify(&reports, BoundsField::UpperB, config.trend_thresholds())?;
    let slope = upper.slope().unwrap_or(f64::NAN);
    checks.check("B trend", "diverging, slope within 0.2 of 1", format!("{upper:?}"), upper.is_diverging() && (slope - 1.0).abs() <= 0.2);
    let verdict = weighted_frame_verdict(&spec, config)?;
    let obstructed = matches!(verdict, WeightedFrameVerdict::ObstructionFound { .. })
        && verdict.reasons().contains(&ObstructionReason::BiorthogonalIncomplete);
    checks.check("verdict", "obstruction_found with biorthogonal_incomplete", format!("{} {:?}", verdict.status(), verdict.reasons()), obstructed);
    let (defect, scan) = defect_residuals(&seqs, &spec, config)?;
    let results = json!({ "reports": reports, "trends": trends(&reports, config)?, "verdict": verdict, "biorthogonal_scan": scan });
    Ok((json!({ "spec": spec }), results, bounds_table(&reports, &defect, None), bounds_plot(&reports)))
}

/// Fixed coordinate subspace on which the lower bound is tracked.
const COMPRESSION_DIM: usize = 2;

fn n_one_plus_en(config: &RunConfig, checks: &mut Checks) -> Result<PresetOutput, CliError> {
    let spec = SequenceSpec::family(FamilyName::NTimesOnePlusEn);
    let (seqs, reports): (Vec<_>, Vec<_>) = sweep(&spec, config)?.into_iter().unzip();
    let mut compressed = Vec::with_capacity(seqs.len());
    let mut refusals = Vec::with_capacity(seqs.len());
    for s in &seqs {
        let n = s.trunc_index().unwrap_or(0);
        let w = Subspace::coordinate(s.ambient_dim(), COMPRESSION_DIM.min(s.ambient_dim()))?;
        compressed.push(finite_domain_lower_bound(s, &w)?.lower_bound);
        let refused = match surjective_multiplier_dual(s, s, config.svd_cutoff, config.tolerance) {
            Err(Error::Precondition(msg)) => Some(msg),
            Err(e) => return Err(e.into()),
            Ok(_) => None,
        };
        checks.check(format!("surjective multiplier at N={n}"), "refused", if refused.is_some() { "refused" } else { "accepted" }, refused.is_some());
        refusals.push(refused);
        checks.check(format!("minimal at N={n}"), "true", frameforge::is_minimal(s).to_string(), frameforge::is_minimal(s));
    }
    let positive = compressed.iter().all(|v| *v > 0.0);
    let nondecreasing = compressed.windows(2).all(|w| w[1] >= w[0] * (1.0 - TOL));
    checks.check(
        format!("lower bound on span(e_1..e_{COMPRESSION_DIM})"),
        "positive and nondecreasing in N",
        format!("{compressed:?}"),
        positive && nondecreasing,
    );
    let upper = growth_classify(&reports, BoundsField::UpperB, config.trend_thresholds())?;
    checks.check("B trend", "diverging", format!("{upper:?}"), upper.is_diverging());
    let (defect, scan) = defect_residuals(&seqs, &spec, config)?;
    let results = json!({
        "reports": reports,
        "trends": trends(&reports, config)?,
        "compressed_lower_bound": compressed,
        "compression_dim": COMPRESSION_DIM,
        "surjective_refusals": refusals,
        "biorthogonal_scan": scan,
    });
    let table = bounds_table(&reports, &defect, Some(("w_lower_bound", &compressed)));
    Ok((json!({ "spec": spec }), results, table, bounds_plot(&reports)))
}

fn finite_domain(d: usize, config: &RunConfig, checks: &mut Checks) -> Result<PresetOutput, CliError> {
    let spec = SequenceSpec::family(FamilyName::FiniteDomainExample { d });
    let (seqs, reports): (Vec<_>, Vec<_>) = sweep(&spec, config)?.into_iter().unzip();
    let mut on_w = Vec::with_capacity(seqs.len());
    for s in &seqs {
        let w = Subspace::coordinate(s.ambient_dim(), d)?;
        let b = finite_domain_lower_bound(s, &w)?.lower_bound;
        checks.check(format!("A on W at N={}", s.trunc_index().unwrap_or(0)), "1", num(b), (b - 1.0).abs() <= TOL);
        on_w.push(b);
    }
    let upper = growth_classify(&reports, BoundsField::UpperB, config.trend_thresholds())?;
    checks.check("B trend", "diverging", format!("{upper:?}"), upper.is_diverging());
    let defect = vec![None; reports.len()];
    let results = json!({ "reports": reports, "trends": trends(&reports, config)?, "lower_bound_on_W": on_w });
    let table = bounds_table(&reports, &defect, Some(("w_lower_bound", &on_w)));
    Ok((json!({ "spec": spec, "d": d }), results, table, bounds_plot(&reports)))
}

/// Seeded multiplier with entries uniform in `[-1, 1]` and symbol in the
/// unit disk.
fn random_multiplier(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Result<MultiplierSpec, CliError> {
    let scale = 1.0 / (dim as f64).sqrt();
    let vectors = |rng: &mut ChaCha8Rng| -> Vec<Vector> {
        (0..count)
            .map(|_| Vector::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale))
            .collect()
    };
    let phi = vectors(rng);
    let psi = vectors(rng);
    let symbol: Vec<C64> = (0..count)
        .map(|_| C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    Ok(MultiplierSpec::new(SymbolSpec::Values(symbol), SequenceSpec::explicit(phi)?, SequenceSpec::explicit(psi)?))
}

fn interleave_identity(config: &RunConfig, checks: &mut Checks) -> Result<PresetOutput, CliError> {
    let mut table = Table::new(&["N", "residual"]);
    let mut per_n = Vec::new();
    let mut points = Vec::new();
    for &n in &config.ns {
        if n > config.max_dim {
            return Err(Error::DimensionOverflow { dim: n, cap: config.max_dim }.into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(n as u64);
        let spec = random_multiplier(n, n, &mut rng)?;
        let sys = interleave_identity_construction(&spec, n)?;
        checks.check(format!("residual at N={n}"), "<= 1e-10", num(sys.residual), sys.residual <= 1e-10);
        table.push(vec![n.to_string(), num(sys.residual)]);
        points.push((n as f64, sys.residual));
        per_n.push(json!({ "N": n, "residual": sys.residual, "length": sys.symbol.len() }));
    }
    let plot = vec![Series { name: "residual".into(), points }];
    Ok((json!({ "multiplier": "seeded uniform, dimension N, N members" }), json!(per_n), table, plot))
}

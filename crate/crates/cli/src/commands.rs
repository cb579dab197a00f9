use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use clap::ValueEnum;
use cocycle_core::certify::{cone_certify, norm_growth_probe, ConeOptions, UhStatus};
use cocycle_core::gallery::{self, CounterexampleParams};
use cocycle_core::lyapunov::{gap_scan, sampled_exponent, Measure};
use cocycle_core::report::{write_orbit_csv, ReportDocument};
use cocycle_core::symbolic::{enumerate_periodic, SymbolSequence, TransitionMatrix};
use cocycle_core::transfer::run_transfer;
use cocycle_core::{parse_spec, CocycleSpec, Error};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{CertifyArgs, CheckArgs, CounterexampleArgs, LyapunovArgs, TransferArgs, Verify};

const TOOL: &str = "cocycle-lab";

#[derive(Debug)]
pub enum CmdError {
    Input(String),
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Input(e.to_string())
    }
}

pub struct Outcome {
    pub report: ReportDocument,
    /// Some verdict came out negative.
    pub negative: bool,
}

fn document(command: &str) -> ReportDocument {
    ReportDocument::new(TOOL, env!("CARGO_PKG_VERSION"), command)
}

fn load(path: &Path) -> Result<(CocycleSpec, String), CmdError> {
    let bytes = std::fs::read(path).map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))?;
    let digest = format!("{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| CmdError::Input(format!("{} is not UTF-8", path.display())))?;
    let spec = parse_spec(&text).map_err(|e| CmdError::Input(format!("{}: {e}", path.display())))?;
    Ok((spec, digest))
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn sft_summary(q: &TransitionMatrix) -> Value {
    json!({
        "size": q.size(),
        "irreducible": q.is_irreducible(),
        "full_shift": q.is_full_shift(),
        "max_connectivity": q.max_connectivity(),
    })
}

fn periodic_points(q: &TransitionMatrix, max_period: usize) -> Result<Vec<SymbolSequence>, CmdError> {
    Ok(enumerate_periodic(q, max_period, cocycle_core::symbolic::DEFAULT_ORBIT_CAP)?
        .iter()
        .flat_map(|o| o.points())
        .collect())
}

pub fn check(a: &CheckArgs) -> Result<Outcome, CmdError> {
    let (spec, digest) = load(&a.spec)?;
    let mut report = document("check");
    report.spec_digest = Some(digest);
    report.parameters = json!({ "spec": a.spec.display().to_string() });
    report.results = json!({
        "sft": sft_summary(spec.sft()),
        "one_step": spec.is_one_step(),
        "window": spec.window(),
        "bunching": value(&spec.bunching()),
        "holder": value(&spec.holder_estimate()),
    });
    Ok(Outcome { report, negative: false })
}

/// Uniform weights on the allowed successors of each symbol.
fn default_measure(q: &TransitionMatrix) -> Measure {
    if q.is_full_shift() {
        return Measure::uniform_bernoulli(q.size());
    }
    let rows = q
        .rows()
        .into_iter()
        .map(|r| {
            let total: f64 = r.iter().map(|&v| v as f64).sum();
            r.into_iter().map(|v| v as f64 / total).collect()
        })
        .collect();
    Measure::Markov(rows)
}

pub fn lyapunov(a: &LyapunovArgs) -> Result<Outcome, CmdError> {
    let (spec, digest) = load(&a.spec)?;
    let mut report = document("lyapunov");
    report.spec_digest = Some(digest);
    let mut negative = false;
    if let Some(p) = a.max_period {
        let tau = a.tau.unwrap_or(f64::NEG_INFINITY);
        let scan = gap_scan(&spec, p, tau, a.cap)?;
        if let Some(path) = &a.csv {
            let file = File::create(path).map_err(|e| CmdError::Input(format!("cannot write {}: {e}", path.display())))?;
            write_orbit_csv(&scan, BufWriter::new(file))
                .map_err(|e| CmdError::Input(format!("cannot write {}: {e}", path.display())))?;
        }
        negative = a.tau.is_some() && !scan.holds;
        report.parameters = json!({
            "spec": a.spec.display().to_string(),
            "max_period": p,
            "tau": a.tau,
            "cap": a.cap,
            "csv": a.csv.as_ref().map(|c| c.display().to_string()),
        });
        report.results = json!({
            "mode": "periodic",
            "orbit_count": scan.orbits.len(),
            "min_lambda_plus": scan.min_lambda_plus,
            "min_gap": scan.min_gap,
            "holds": a.tau.map(|_| scan.holds),
            "witness": value(&scan.witness),
            "orbits": value(&scan.orbits),
        });
    } else if let Some(n) = a.sample {
        let measure = default_measure(spec.sft());
        let r = sampled_exponent(&spec, &measure, n, a.trials, a.seed)?;
        report.parameters = json!({
            "spec": a.spec.display().to_string(),
            "sample": n,
            "trials": a.trials,
            "seed": a.seed,
            "measure": value(&measure),
        });
        report.results = json!({ "mode": "sampled", "exponent": value(&r) });
    }
    Ok(Outcome { report, negative })
}

pub fn certify(a: &CertifyArgs) -> Result<Outcome, CmdError> {
    let (spec, digest) = load(&a.spec)?;
    if let Some(&t) = a.probe_tau.iter().find(|&&t| !(t > 0.0)) {
        return Err(CmdError::Input(format!("probe rates must be positive, got {t}")));
    }
    let opts = ConeOptions {
        refine_steps: a.refine_steps,
        margin: a.margin,
        max_word_len: a.max_word_len,
        ..ConeOptions::default()
    };

    // cones live on one-step cocycles; wider windows are recoded first
    let (cone, recoded) = if spec.is_one_step() {
        (value(&cone_certify(&spec, &opts)?), false)
    } else {
        match spec.recode_one_step() {
            Ok((one, _)) => (value(&cone_certify(&one, &opts)?), true),
            Err(e) => (json!({ "status": "inconclusive", "note": e.to_string() }), false),
        }
    };
    let certified = cone["status"] == json!("certified");

    let mut samples = periodic_points(spec.sft(), a.probe_period)?;
    samples.extend(spec.probe_hints(a.probe_horizon));
    let probes = a
        .probe_tau
        .iter()
        .map(|&t| norm_growth_probe(&spec, &samples, a.probe_horizon, t))
        .collect::<Result<Vec<_>, _>>()?;
    let falsified = probes.iter().any(|v| v.status == UhStatus::Falsified);

    let status = match (certified, falsified) {
        (true, true) => "contradictory",
        (true, false) => "certified",
        (false, true) => "falsified",
        (false, false) => "inconclusive",
    };
    let mut report = document("certify");
    report.spec_digest = Some(digest);
    report.parameters = json!({
        "spec": a.spec.display().to_string(),
        "probe_tau": a.probe_tau,
        "probe_horizon": a.probe_horizon,
        "probe_period": a.probe_period,
        "probe_points": samples.len(),
        "cone": value(&opts),
    });
    report.results = json!({
        "status": status,
        "recoded": recoded,
        "cone": cone,
        "probes": value(&probes),
    });
    Ok(Outcome { report, negative: falsified })
}

pub fn transfer(a: &TransferArgs) -> Result<Outcome, CmdError> {
    let (spec, digest) = load(&a.spec)?;
    if a.n0 == 0 {
        return Err(CmdError::Input("--n0 must be positive".into()));
    }
    let search = periodic_points(spec.sft(), a.search_period)?;
    let (slow, r) = run_transfer(&spec, a.n0, &search, a.tol)?;
    let slow_enough = r.epsilon <= a.eps;
    let mut report = document("transfer");
    report.spec_digest = Some(digest);
    report.parameters = json!({
        "spec": a.spec.display().to_string(),
        "n0": a.n0,
        "eps": a.eps,
        "search_period": a.search_period,
        "search_points": search.len(),
        "tol": a.tol,
    });
    report.results = json!({
        "slow_point": value(&slow),
        "slow_enough": slow_enough,
        "bound_holds": r.holds(),
        "transfer": value(&r),
    });
    Ok(Outcome { report, negative: !(slow_enough && r.holds()) })
}

pub fn counterexample(a: &CounterexampleArgs) -> Result<Outcome, CmdError> {
    let params = match a.k0 {
        Some(k0) => CounterexampleParams::with_k0(k0)?,
        None => CounterexampleParams::determined(),
    };
    let spec = CocycleSpec::diag_rotation(params);
    let mut results = serde_json::Map::new();
    results.insert("k0".into(), json!(params.k0()));
    results.insert("alpha".into(), json!(spec.alpha()));
    results.insert("bunching".into(), value(&spec.bunching()));
    let mut pass = true;

    if matches!(a.verify, Verify::All | Verify::NotUh) {
        let r = gallery::verify_not_uh(a.n_max, &params)?;
        let horizon = 2 * a.n_max.max(1) as usize;
        let probes = [0.05, 0.1, 0.3]
            .iter()
            .map(|&t| norm_growth_probe(&spec, &spec.probe_hints(horizon), horizon, t))
            .collect::<Result<Vec<_>, _>>()?;
        let falsified = probes.iter().all(|v| v.status == UhStatus::Falsified);
        pass &= r.pass && falsified;
        results.insert(
            "not_uh".into(),
            json!({
                "pass": r.pass && falsified,
                "tolerance": gallery::EXCURSION_TOLERANCE,
                "excursions": value(&r),
                "probes": value(&probes),
            }),
        );
    }

    if matches!(a.verify, Verify::All | Verify::Cones) {
        let first_m = (params.k0() as usize).div_ceil(2).max(1);
        let mut points: Vec<SymbolSequence> = (first_m..first_m + 24).map(gallery::self_return_point).collect();
        points.extend((0..a.samples as u64).map(|i| gallery::sample_mixed_point(a.seed, i, &params)));
        let steps = points
            .iter()
            .map(|x| gallery::verify_cone_step(x, &params))
            .collect::<Result<Vec<_>, _>>()?;
        let failures: Vec<&gallery::ConeStepReport> = steps.iter().filter(|s| !s.pass).collect();
        let min_slack = steps.iter().map(|s| s.inclusion_slack).fold(f64::INFINITY, f64::min);
        // halving the band must break the lemma somewhere
        let control_caught = points
            .iter()
            .filter(|x| {
                gallery::verify_cone_step_with_beta_scale(x, &params, 0.5)
                    .map(|r| !r.pass)
                    .unwrap_or(true)
            })
            .count();
        let ok = failures.is_empty() && control_caught > 0;
        pass &= ok;
        results.insert(
            "cones".into(),
            json!({
                "pass": ok,
                "points": steps.len(),
                "min_inclusion_slack": min_slack,
                "inequality_slack": gallery::INEQUALITY_SLACK,
                "failures": value(&failures),
                "control_beta_scale": 0.5,
                "control_caught": control_caught,
            }),
        );
    }

    if matches!(a.verify, Verify::All | Verify::Exponents) {
        let r = gallery::verify_exponent_bound(a.max_period, a.samples, a.seed, &params)?;
        pass &= r.pass;
        results.insert(
            "exponents".into(),
            json!({
                "pass": r.pass,
                "tau": r.tau,
                "min_periodic_lambda_plus": r.gap_scan.min_lambda_plus,
                "periodic_orbits": r.gap_scan.orbits.len(),
                "periodic_witness": value(&r.gap_scan.witness),
                "self_return_exponents": value(&r.self_return_exponents),
                "self_return_pass": r.self_return_pass,
                "orbit_tracks": r.orbit_tracks.len(),
                "orbit_tracking_failures": value(&r.orbit_tracks.iter().filter(|t| !t.pass).collect::<Vec<_>>()),
                "orbit_tracking_pass": r.orbit_tracking_pass,
                "off_v_max_deviation": r.off_v_max_deviation,
                "off_v_pass": r.off_v_pass,
            }),
        );
    }
    results.insert("pass".into(), json!(pass));

    let mut report = document("counterexample");
    report.parameters = json!({
        "verify": a.verify.to_possible_value().map(|v| v.get_name().to_string()),
        "k0": a.k0,
        "n_max": a.n_max,
        "max_period": a.max_period,
        "samples": a.samples,
        "seed": a.seed,
    });
    report.results = Value::Object(results);
    Ok(Outcome { report, negative: !pass })
}

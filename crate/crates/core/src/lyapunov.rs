//! Lyapunov exponents: exact values on periodic orbits, finite-time and
//! sampled estimates, uniform-gap scans and the singular-value domination
//! test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::{CocycleKind, CocycleSpec, ProductResult};
use crate::error::{Error, Result};
use crate::symbolic::{enumerate_periodic, PeriodicOrbit, Symbol, SymbolSequence, TransitionMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMethod {
    PeriodicExact,
    FiniteTime,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub method: ExponentMethod,
    /// Period for exact reports, horizon otherwise.
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Sample standard deviation over trials.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread: Option<f64>,
}

impl ExponentReport {
    fn sl2(lambda_plus: f64, method: ExponentMethod, steps: usize) -> Self {
        ExponentReport {
            lambda_plus,
            lambda_minus: -lambda_plus,
            method,
            steps,
            trials: None,
            spread: None,
        }
    }
}

/// `λ_+` of a periodic orbit from the trace of `A^{per}(p)`:
/// `acosh(|tr|/2) / per`, and `0` when `|tr| ≤ 2`.
pub fn periodic_exponent(spec: &CocycleSpec, orbit: &PeriodicOrbit) -> Result<ExponentReport> {
    let per = orbit.period();
    let p = spec.product(&orbit.base_point(), per as i64)?;
    Ok(ExponentReport::sl2(
        exponent_from_trace(&p) / per as f64,
        ExponentMethod::PeriodicExact,
        per,
    ))
}

// log of the spectral radius of an SL(2) product
fn exponent_from_trace(p: &ProductResult) -> f64 {
    let tr = p.matrix.trace().abs();
    if tr == 0.0 {
        return 0.0;
    }
    let log_tr = p.log_scale + tr.ln();
    if log_tr > 300.0 {
        // acosh(t/2) = log t − O(t^{−2})
        log_tr
    } else {
        let t = log_tr.exp();
        if t <= 2.0 {
            0.0
        } else {
            (0.5 * t).acosh()
        }
    }
}

/// `(1/n) log |A^n(x)|`.
pub fn finite_time_exponent(spec: &CocycleSpec, x: &SymbolSequence, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidSpec("horizon must be at least 1".into()));
    }
    Ok(spec.product(x, n as i64)?.log_norm() / n as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitExponent {
    pub period: usize,
    pub word: PeriodicOrbit,
    pub lambda_plus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapScanReport {
    pub max_period: usize,
    pub tau: f64,
    pub orbits: Vec<OrbitExponent>,
    pub min_lambda_plus: f64,
    /// `λ_+ − λ_− = 2 min λ_+`.
    pub min_gap: f64,
    pub holds: bool,
    /// Shortest orbit (first in enumeration order) with `λ_+ < τ`.
    pub witness: Option<OrbitExponent>,
}

/// Exact exponents of every periodic orbit up to `max_period`, checked
/// against the threshold `τ`.
pub fn gap_scan(spec: &CocycleSpec, max_period: usize, tau: f64, cap: usize) -> Result<GapScanReport> {
    if !spec.sft().is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let orbits = enumerate_periodic(spec.sft(), max_period, cap)?;
    let rows = orbits
        .into_par_iter()
        .map(|o| {
            let l = periodic_exponent(spec, &o)?.lambda_plus;
            Ok(OrbitExponent {
                period: o.period(),
                word: o,
                lambda_plus: l,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_lambda_plus = rows
        .iter()
        .map(|r| r.lambda_plus)
        .fold(f64::INFINITY, f64::min);
    let witness = rows.iter().find(|r| r.lambda_plus < tau).cloned();
    Ok(GapScanReport {
        max_period,
        tau,
        min_lambda_plus,
        min_gap: 2.0 * min_lambda_plus,
        holds: witness.is_none(),
        witness,
        orbits: rows,
    })
}

/// A shift-invariant measure to draw sample points from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// Independent symbols with the given weights.
    Bernoulli(Vec<f64>),
    /// Stationary Markov chain with the given transition probabilities.
    Markov(Vec<Vec<f64>>),
}

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Symbol weights and per-symbol successor distributions, validated.
struct Sampler {
    initial: Vec<f64>,
    transition: Vec<Vec<f64>>,
}

impl Measure {
    pub fn uniform_bernoulli(size: usize) -> Self {
        Measure::Bernoulli(vec![1.0 / size as f64; size])
    }

    fn sampler(&self, q: &TransitionMatrix) -> Result<Sampler> {
        let l = q.size();
        let check_row = |row: &[f64], what: &str| -> Result<()> {
            if row.len() != l {
                return Err(Error::InvalidMeasure(format!(
                    "{what} has {} weights for {l} symbols",
                    row.len()
                )));
            }
            if row.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(Error::InvalidMeasure(format!("{what} has a negative weight")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
                return Err(Error::InvalidMeasure(format!("{what} sums to {sum}")));
            }
            Ok(())
        };
        match self {
            Measure::Bernoulli(w) => {
                check_row(w, "weight vector")?;
                for i in 0..l {
                    for j in 0..l {
                        if w[i] > 0.0 && w[j] > 0.0 && !q.allows(i, j) {
                            return Err(Error::InvalidMeasure(format!(
                                "Bernoulli weights charge the forbidden transition {i} -> {j}"
                            )));
                        }
                    }
                }
                Ok(Sampler {
                    initial: w.clone(),
                    transition: vec![w.clone(); l],
                })
            }
            Measure::Markov(p) => {
                if p.len() != l {
                    return Err(Error::InvalidMeasure(format!(
                        "{} transition rows for {l} symbols",
                        p.len()
                    )));
                }
                for (i, row) in p.iter().enumerate() {
                    check_row(row, &format!("row {i}"))?;
                    if let Some(j) = (0..l).find(|&j| row[j] > 0.0 && !q.allows(i, j)) {
                        return Err(Error::InvalidMeasure(format!(
                            "row {i} charges the forbidden transition {i} -> {j}"
                        )));
                    }
                }
                Ok(Sampler {
                    initial: stationary(p),
                    transition: p.clone(),
                })
            }
        }
    }
}

// Cesàro-averaged power iteration, so periodic chains converge too
fn stationary(p: &[Vec<f64>]) -> Vec<f64> {
    let l = p.len();
    let mut v = vec![1.0 / l as f64; l];
    let mut acc = vec![0.0; l];
    let rounds = 4096;
    for _ in 0..rounds {
        let mut next = vec![0.0; l];
        for i in 0..l {
            for j in 0..l {
                next[j] += v[i] * p[i][j];
            }
        }
        v = next;
        for j in 0..l {
            acc[j] += v[j];
        }
    }
    let total: f64 = acc.iter().sum();
    acc.iter().map(|a| a / total).collect()
}

fn draw(rng: &mut ChaCha8Rng, weights: &[f64]) -> Symbol {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Longest random tail period drawn by the sampler.
const MAX_TAIL: usize = 8;

/// A random eventually periodic point whose core covers `[−radius, n + radius)`,
/// with random periodic tails closed up by connecting words.
pub fn sample_point(
    q: &TransitionMatrix,
    measure: &Measure,
    n: usize,
    radius: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SymbolSequence> {
    let s = measure.sampler(q)?;
    let walk = |rng: &mut ChaCha8Rng, from: Symbol, len: usize| -> Vec<Symbol> {
        let mut out = Vec::with_capacity(len);
        let mut cur = from;
        for _ in 0..len {
            cur = draw(rng, &s.transition[cur]);
            out.push(cur);
        }
        out
    };
    let close = |w: &mut Vec<Symbol>| -> Result<()> {
        let c = q.connecting_word(*w.last().unwrap(), w[0])?;
        w.extend(c);
        Ok(())
    };
    let first = draw(rng, &s.initial);
    let left_len = rng.gen_range(1..=MAX_TAIL);
    let mut left = vec![first];
    left.extend(walk(rng, first, left_len - 1));
    close(&mut left)?;
    let core_len = n + 2 * radius;
    let core = walk(rng, *left.last().unwrap(), core_len);
    let right_len = rng.gen_range(1..=MAX_TAIL);
    let mut right = walk(rng, *core.last().unwrap_or(left.last().unwrap()), right_len);
    close(&mut right)?;
    SymbolSequence::new(left, -(radius as i64), core, right)
}

/// Coordinates a cocycle reads on each side of the current index.
fn read_radius(spec: &CocycleSpec) -> usize {
    match spec.kind() {
        CocycleKind::LocallyConstant(_) => {
            let (lo, hi) = spec.window().unwrap();
            lo.unsigned_abs().max(hi.unsigned_abs()) as usize
        }
        CocycleKind::Builtin(_) => 0,
    }
}

/// Mean and spread of `(1/n) log |A^n(x)|` over random points.
pub fn sampled_exponent(
    spec: &CocycleSpec,
    measure: &Measure,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<ExponentReport> {
    if trials == 0 || n == 0 {
        return Err(Error::InvalidSpec("need at least one trial and one step".into()));
    }
    measure.sampler(spec.sft())?;
    let radius = read_radius(spec);
    let values = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let x = sample_point(spec.sft(), measure, n, radius, &mut rng)?;
            finite_time_exponent(spec, &x, n)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = values.iter().sum::<f64>() / trials as f64;
    let spread = if trials > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(ExponentReport {
        lambda_plus: mean,
        lambda_minus: -mean,
        method: ExponentMethod::Sampled,
        steps: n,
        trials: Some(trials),
        spread: Some(spread),
    })
}

/// Largest residual of the log-ratio fit, as a fraction of the decay
/// `|log τ| n_max / 2` across the fit window, still accepted as domination.
pub const DOMINATION_SLACK_FRACTION: f64 = 0.25;

/// `τ_fit` must be at least this far below 1.
pub const DOMINATION_RATE_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationReport {
    pub n_min: usize,
    pub n_max: usize,
    pub c_fit: f64,
    pub tau_fit: f64,
    pub max_residual: f64,
    pub allowed_residual: f64,
    pub pass: bool,
}

/// Fits `log(σ2/σ1)(A^n(x)) ≈ log C + n log τ` over `n ∈ [n_max/2, n_max]`
/// and all samples.
pub fn domination_test(
    spec: &CocycleSpec,
    samples: &[SymbolSequence],
    n_max: usize,
) -> Result<DominationReport> {
    if n_max < 2 || samples.is_empty() {
        return Err(Error::InvalidSpec(
            "domination test needs n_max >= 2 and at least one sample".into(),
        ));
    }
    let n_min = n_max / 2;
    let series = samples
        .par_iter()
        .map(|x| {
            let mut p = ProductResult::identity();
            let mut out = Vec::with_capacity(n_max - n_min + 1);
            for n in 0..n_max {
                p.push_left(&spec.evaluate_at(x, n as i64)?);
                if n + 1 >= n_min {
                    // σ2 = 1/σ1 for a determinant-one product; the normalized
                    // matrix alone cannot resolve σ2 once it drops below ε
                    out.push(((n + 1) as f64, -2.0 * p.log_norm()));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = series.into_iter().flatten().collect();
    let m = pts.len() as f64;
    let mean_n = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_n).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_n) * (p.1 - mean_y)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = mean_y - slope * mean_n;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    let tau_fit = slope.exp();
    let allowed_residual = DOMINATION_SLACK_FRACTION * slope.abs() * n_max as f64 / 2.0;
    Ok(DominationReport {
        n_min,
        n_max,
        c_fit: intercept.exp(),
        tau_fit,
        max_residual,
        allowed_residual,
        pass: tau_fit < 1.0 - DOMINATION_RATE_MARGIN && max_residual <= allowed_residual,
    })
}

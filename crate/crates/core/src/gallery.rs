//! The rotation-near-`q` cocycle `A(x) = diag(2, 1/2) R_θ(x)` over the full
//! 2-shift: uniform exponent gap on every invariant measure, yet not
//! uniformly hyperbolic.
//!
//! Here `q` is the point with a single `1` at index 0, `V = {x : x_0 = 1}`,
//! `k(x) = min{|n| : n ≠ 0, x_n = 1}`, and
//! `θ(x) = π/2 − 2^{−k(x)/8}` on `V` when `k(x) > k0`, `θ(q) = π/2`,
//! and `θ = 0` everywhere else.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::{CocycleSpec, ProductResult};
use crate::error::{Error, Result};
use crate::lyapunov;
use crate::matrix::{angle_dist, Mat2, ProjectiveArc};
use crate::symbolic::{PeriodicOrbit, Symbol, SymbolSequence};

pub const HOLDER_EXPONENT: f64 = 0.125;

/// `|A(x) − A(q)| ≤ 2 |θ(x) − θ(q)| = 2 d(x, q)^{1/8}` near `q`.
pub const HOLDER_CONSTANT_AT_Q: f64 = 2.0;

/// Largest `k` scanned when choosing `k0`.
pub const K_SCAN_LIMIT: u64 = 512;

/// Comparison slack for the scalar inequalities of the cone lemma.
pub const INEQUALITY_SLACK: f64 = 1e-12;

/// Parameters of the built-in counterexample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleParams {
    k0: u64,
}

impl CounterexampleParams {
    /// Uses the smallest admissible cutoff, see [`determine_k0`].
    pub fn determined() -> Self {
        CounterexampleParams { k0: determine_k0() }
    }

    /// A larger cutoff is always admissible; a smaller one is rejected.
    pub fn with_k0(k0: u64) -> Result<Self> {
        if k0 == 0 {
            return Err(Error::InvalidSpec("k0 must be positive".into()));
        }
        if let Some(k) = (k0 + 1..=K_SCAN_LIMIT.max(k0 + 1)).find(|&k| !cone_inequalities(k).all_hold()) {
            return Err(Error::InvalidSpec(format!(
                "k0 = {k0} is too small: the cone inequalities fail at k = {k}"
            )));
        }
        Ok(CounterexampleParams { k0 })
    }

    pub fn k0(&self) -> u64 {
        self.k0
    }
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self::determined()
    }
}

/// `diag(2, 1/2)`.
pub fn base_matrix() -> Mat2 {
    Mat2::diag(2.0, 0.5)
}

/// The homoclinic point `q`.
pub fn homoclinic_point() -> SymbolSequence {
    SymbolSequence::block_on_background(0, 0, &[1])
}

/// `T^{−n} q`: the single `1` sits at index `n`.
pub fn homoclinic_preimage(n: i64) -> SymbolSequence {
    SymbolSequence::block_on_background(0, n, &[1])
}

/// `k(T^j x)`: distance from index `j` to the nearest other `1`, `None` for ∞.
pub fn k_at(x: &SymbolSequence, j: i64) -> Option<u64> {
    let has_one = |w: &[Symbol]| w.contains(&1);
    // beyond this reach both sides read periodic tails, so one more period
    // on each side decides the question
    let reach = (x.core_end() - j).max(j - x.core_start()).max(0)
        + x.left_period().len().max(x.right_period().len()) as i64
        + 1;
    for d in 1..=reach {
        if x.get(j + d) == 1 || x.get(j - d) == 1 {
            return Some(d as u64);
        }
    }
    debug_assert!(!has_one(x.left_period()) && !has_one(x.right_period()));
    None
}

/// `k(x)`.
pub fn k_of(x: &SymbolSequence) -> Option<u64> {
    k_at(x, 0)
}

/// `π/2 − θ(T^j x)`, or `None` where `θ = 0`.
fn rotation_complement_at(x: &SymbolSequence, j: i64, params: &CounterexampleParams) -> Option<f64> {
    if x.get(j) != 1 {
        return None;
    }
    match k_at(x, j) {
        None => Some(0.0),
        Some(k) if k > params.k0 => Some(angle_offset(k)),
        Some(_) => None,
    }
}

/// `2^{−k/8}`.
pub fn angle_offset(k: u64) -> f64 {
    (-(k as f64) / 8.0).exp2()
}

/// `β(k) = 2^{−k/2 + 1/4}`.
pub fn beta(k: u64) -> f64 {
    (-(k as f64) / 2.0 + 0.25).exp2()
}

/// `θ(x)` in `[0, π/2]`.
pub fn theta(x: &SymbolSequence, params: &CounterexampleParams) -> f64 {
    match rotation_complement_at(x, 0, params) {
        Some(delta) => FRAC_PI_2 - delta,
        None => 0.0,
    }
}

/// `A(T^j x)`.
pub fn matrix_at(x: &SymbolSequence, j: i64, params: &CounterexampleParams) -> Mat2 {
    let d = base_matrix();
    match rotation_complement_at(x, j, params) {
        Some(delta) => d * Mat2::rotation_from_complement(delta),
        None => d,
    }
}

/// The scalar inequalities the cone lemma needs at `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeInequalities {
    pub k: u64,
    /// `2^{−k/8} < 0.3`
    pub offset_small: bool,
    /// `sin β > 2^{−1/8} β`
    pub sine_lower: bool,
    /// `cot β ≤ 2^{1/8} / β`
    pub cotangent_upper: bool,
    /// `γ ≤ 2^{1/16} tan γ` at the largest admissible `tan γ = 2^{−3k/2 − 1/8}`
    pub arctan_upper: bool,
    /// `π/2 > 2^{−k/8} + 2^{−k/2 + 1/4}`
    pub band_fits: bool,
    /// `2^{3k/8} − 2^{1/4} ≥ 1`
    pub chain_final: bool,
}

impl ConeInequalities {
    pub fn all_hold(&self) -> bool {
        self.offset_small
            && self.sine_lower
            && self.cotangent_upper
            && self.arctan_upper
            && self.band_fits
            && self.chain_final
    }
}

pub fn cone_inequalities(k: u64) -> ConeInequalities {
    let kf = k as f64;
    let b = beta(k);
    let tan_gamma = (-1.5 * kf - 0.125).exp2();
    ConeInequalities {
        k,
        offset_small: angle_offset(k) < 0.3,
        sine_lower: b.sin() > (-0.125f64).exp2() * b,
        cotangent_upper: 1.0 / b.tan() <= 0.125f64.exp2() / b,
        arctan_upper: tan_gamma.atan() <= (1.0f64 / 16.0).exp2() * tan_gamma,
        band_fits: FRAC_PI_2 > angle_offset(k) + b,
        chain_final: (3.0 * kf / 8.0).exp2() - 0.25f64.exp2() >= 1.0,
    }
}

/// Smallest `k0 ≥ 1` such that every cone inequality holds for all
/// `k0 < k ≤ K_SCAN_LIMIT`.
pub fn determine_k0() -> u64 {
    (1..=K_SCAN_LIMIT)
        .rev()
        .find(|&k| !cone_inequalities(k).all_hold())
        .unwrap_or(0)
        .max(1)
}

/// One visit to `V` and the excursion until the next one.
#[derive(Clone, Debug, Serialize)]
pub struct ReturnStep {
    pub point: SymbolSequence,
    /// First return time `N_V(x)`.
    pub return_time: u64,
    pub k: Option<u64>,
    pub k_next: Option<u64>,
    /// `A_V(x) = A^{N_V(x)}(x)`.
    pub product: ProductResult,
}

/// First return of `x ∈ V` to `V` along with the induced matrix.
pub fn first_return(x: &SymbolSequence, params: &CounterexampleParams) -> Result<ReturnStep> {
    if x.get(0) != 1 {
        return Err(Error::NotInV);
    }
    let reach = (x.core_end() - 1).max(0) + x.right_period().len() as i64;
    let n = (1..=reach).find(|&n| x.get(n) == 1).ok_or(Error::NoReturn)?;
    let spec = CocycleSpec::diag_rotation(*params);
    let product = spec.product(x, n)?;
    Ok(ReturnStep {
        point: x.clone(),
        return_time: n as u64,
        k: k_of(x),
        k_next: k_at(x, n),
        product,
    })
}

/// Which cone a point of `V` carries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeKind {
    /// The complement of a band around `π/2 − θ(x)`, rotated by `π/2`.
    Lemma,
    /// Directions within `π/4` of horizontal, used where `θ = 0`.
    Horizontal,
}

/// The cone `C(x)` for `x ∈ V` with `k(x) > k0`, as a projective arc.
pub fn cone_of(x: &SymbolSequence, params: &CounterexampleParams) -> Result<ProjectiveArc> {
    cone_with_beta_scale(x, params, 1.0)
}

fn cone_with_beta_scale(
    x: &SymbolSequence,
    params: &CounterexampleParams,
    beta_scale: f64,
) -> Result<ProjectiveArc> {
    let k = match k_of(x) {
        Some(k) if x.get(0) == 1 && k > params.k0 => k,
        Some(k) => return Err(Error::ConeUndefined(k)),
        None => return Err(Error::ConeUndefined(u64::MAX)),
    };
    let band_center = angle_offset(k);
    let b = beta(k) * beta_scale;
    if band_center - b <= 0.0 {
        return Err(Error::ConeUndefined(k));
    }
    Ok(ProjectiveArc::new(band_center + FRAC_PI_2, FRAC_PI_2 - b))
}

/// The substitute cone used at visits with `k ≤ k0`.
pub fn horizontal_cone() -> ProjectiveArc {
    ProjectiveArc::new(0.0, FRAC_PI_4)
}

/// `C(x)` where defined, the horizontal cone otherwise.
pub fn cone_or_substitute(x: &SymbolSequence, params: &CounterexampleParams) -> (ProjectiveArc, ConeKind) {
    match cone_of(x, params) {
        Ok(c) => (c, ConeKind::Lemma),
        Err(_) => (horizontal_cone(), ConeKind::Horizontal),
    }
}

/// Outcome of checking `A_V(x) C(x) ⊂ C(T_V x)` and the growth bound.
#[derive(Clone, Debug, Serialize)]
pub struct ConeStepReport {
    pub point: SymbolSequence,
    pub return_time: u64,
    pub k: Option<u64>,
    pub k_next: Option<u64>,
    pub source_cone: ConeKind,
    pub target_cone: ConeKind,
    /// Angular room left between the image arc and the target cone.
    pub inclusion_slack: f64,
    /// `log_2 min_{v ∈ C(x), |v| = 1} |A_V(x) v|`.
    pub log2_min_growth: f64,
    /// `N_V(x) / 2`.
    pub log2_growth_required: f64,
    /// `tan γ`, with `γ` the widest image angle from horizontal.
    pub tan_gamma: f64,
    /// `2^{−3N_V/2 − 1/8}` when the source cone is the lemma cone.
    pub tan_gamma_bound: Option<f64>,
    /// `2^{−k'/2}(2^{3k'/8} − 2^{1/4})` at `k' = k(T_V x)` for a lemma target.
    pub chain_value: Option<f64>,
    pub chain_floor: Option<f64>,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// Checks the cone lemma at one visit.
pub fn verify_cone_step(x: &SymbolSequence, params: &CounterexampleParams) -> Result<ConeStepReport> {
    verify_cone_step_with_beta_scale(x, params, 1.0)
}

/// As [`verify_cone_step`] but with the band half-width of the source cone
/// multiplied by `beta_scale`; any scale below 1 should break the lemma.
pub fn verify_cone_step_with_beta_scale(
    x: &SymbolSequence,
    params: &CounterexampleParams,
    beta_scale: f64,
) -> Result<ConeStepReport> {
    let step = first_return(x, params)?;
    let (source, source_kind) = match cone_with_beta_scale(x, params, beta_scale) {
        Ok(c) => (c, ConeKind::Lemma),
        Err(_) => (horizontal_cone(), ConeKind::Horizontal),
    };
    let next = x.shift(step.return_time as i64);
    let (target, target_kind) = cone_or_substitute(&next, params);
    let m = step.product.matrix;
    let image = source.image(&m)?;
    let inclusion_slack = image.inclusion_slack(&target, 0.0);
    let log2_min_growth = (step.product.log_scale + m.min_growth_on_arc(&source).ln()) / LN_2;
    let n = step.return_time as f64;
    let log2_growth_required = n / 2.0;
    let tan_gamma = angle_dist(image.start(), 0.0)
        .max(angle_dist(image.end(), 0.0))
        .tan();
    let tan_gamma_bound = (source_kind == ConeKind::Lemma).then(|| (-1.5 * n - 0.125).exp2());
    let (chain_value, chain_floor) = match (target_kind, step.k_next) {
        (ConeKind::Lemma, Some(kn)) => {
            let kn = kn as f64;
            let value = (-kn / 2.0).exp2() * ((3.0 * kn / 8.0).exp2() - 0.25f64.exp2());
            (Some(value), Some((-kn / 2.0).exp2()))
        }
        _ => (None, None),
    };

    let mut violations = Vec::new();
    if inclusion_slack <= 0.0 {
        violations.push(format!("image arc leaves the target cone (slack {inclusion_slack:e})"));
    }
    if log2_min_growth < log2_growth_required - INEQUALITY_SLACK {
        violations.push(format!(
            "growth 2^{log2_min_growth} below 2^{log2_growth_required}"
        ));
    }
    if let Some(bound) = tan_gamma_bound {
        // image directions are only resolved to a few ulps
        if tan_gamma > bound * (1.0 + INEQUALITY_SLACK) + 4.0 * f64::EPSILON {
            violations.push(format!("tan γ = {tan_gamma:e} exceeds {bound:e}"));
        }
    }
    if let (Some(v), Some(f)) = (chain_value, chain_floor) {
        if v < f * (1.0 - INEQUALITY_SLACK) {
            violations.push(format!("final chain value {v:e} below {f:e}"));
        }
    }
    Ok(ConeStepReport {
        point: x.clone(),
        return_time: step.return_time,
        k: step.k,
        k_next: step.k_next,
        source_cone: source_kind,
        target_cone: target_kind,
        inclusion_slack,
        log2_min_growth,
        log2_growth_required,
        tan_gamma,
        tan_gamma_bound,
        chain_value,
        chain_floor,
        pass: violations.is_empty(),
        violations,
    })
}

/// `(1 0^{2m})^∞` with `x_0 = 1`: returns to itself after `2m + 1` steps.
pub fn self_return_point(m: usize) -> SymbolSequence {
    let mut w = vec![0; 2 * m + 1];
    w[0] = 1;
    SymbolSequence::periodic(&w).unwrap()
}

#[derive(Clone, Debug, Serialize)]
pub struct NotUhReport {
    pub n_max: i64,
    /// `(n, |A^{2n}(T^{−n} q)|)` for `n = 1..=n_max`.
    pub excursion_norms: Vec<(i64, f64)>,
    pub max_deviation: f64,
    /// `log |A^{2n}(0^∞)| = 2n log 2` at `n = n_max`, for contrast.
    pub fixed_point_log_norm: f64,
    pub pass: bool,
}

/// Tolerance on `|A^{2n}(T^{−n} q)| = 1`.
pub const EXCURSION_TOLERANCE: f64 = 1e-10;

/// Norms along the homoclinic excursions stay at 1, so no bound
/// `|A^n(x)| ≥ c e^{τ n}` can hold.
pub fn verify_not_uh(n_max: i64, params: &CounterexampleParams) -> Result<NotUhReport> {
    let spec = CocycleSpec::diag_rotation(*params);
    let excursion_norms = (1..=n_max)
        .map(|n| {
            let p = spec.product(&homoclinic_preimage(n), 2 * n)?;
            Ok((n, p.log_norm().exp()))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = excursion_norms
        .iter()
        .map(|(_, v)| (v - 1.0).abs())
        .fold(0.0, f64::max);
    let fixed_point_log_norm = spec
        .product(&SymbolSequence::constant(0), 2 * n_max)?
        .log_norm();
    Ok(NotUhReport {
        n_max,
        excursion_norms,
        max_deviation,
        fixed_point_log_norm,
        pass: max_deviation <= EXCURSION_TOLERANCE,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitTrackReport {
    pub point: SymbolSequence,
    pub returns: usize,
    pub total_return_time: u64,
    /// `log_2 |A^{j}(x) v|` minus `j / 2` at the last return; never negative
    /// when the check passes.
    pub min_log2_excess: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentBoundReport {
    pub tau: f64,
    pub k0: u64,
    pub gap_scan: lyapunov::GapScanReport,
    /// Exponents of `(1 0^{2m})^∞` for the self-return family beyond `k0`.
    pub self_return_exponents: Vec<(usize, f64)>,
    pub self_return_pass: bool,
    pub orbit_tracks: Vec<OrbitTrackReport>,
    pub orbit_tracking_pass: bool,
    /// Largest `|λ − log 2|` over sampled orbits that never visit `V`.
    pub off_v_max_deviation: f64,
    pub off_v_pass: bool,
    pub pass: bool,
}

/// Margin under `log 2 / 2` accepted by the periodic check.
pub const GAP_SLACK: f64 = 1e-9;

/// Checks `λ_+ ≥ log 2 / 2` on periodic orbits, along sampled orbits that
/// return to `V` infinitely often, and on orbits that avoid `V`.
pub fn verify_exponent_bound(
    max_period: usize,
    samples: usize,
    seed: u64,
    params: &CounterexampleParams,
) -> Result<ExponentBoundReport> {
    let spec = CocycleSpec::diag_rotation(*params);
    let tau = LN_2 / 2.0 - GAP_SLACK;
    let gap_scan = lyapunov::gap_scan(&spec, max_period, tau, crate::symbolic::DEFAULT_ORBIT_CAP)?;

    let first_m = (params.k0 as usize).div_ceil(2).max(1);
    let self_return_exponents = (first_m..first_m + 24)
        .map(|m| {
            let w = self_return_point(m);
            let orbit = PeriodicOrbit::new(&w.window(0, 2 * m as i64 + 1), spec.sft())?;
            Ok((m, lyapunov::periodic_exponent(&spec, &orbit)?.lambda_plus))
        })
        .collect::<Result<Vec<_>>>()?;
    let self_return_pass = self_return_exponents.iter().all(|&(_, l)| l >= tau);

    let orbit_tracks = (0..samples)
        .into_par_iter()
        .map(|i| {
            let x = sample_recurrent_point(seed, i as u64);
            track_orbit(&x, params)
        })
        .collect::<Result<Vec<_>>>()?;
    let orbit_tracking_pass = orbit_tracks.iter().all(|t| t.pass);

    let off_v_max_deviation = (0..samples.max(1))
        .into_par_iter()
        .map(|i| {
            let x = sample_off_v_point(seed, i as u64);
            let n = 200;
            let l = lyapunov::finite_time_exponent(&spec, &x, n)?;
            Ok((l - LN_2).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let off_v_pass = off_v_max_deviation <= 1e-12;

    Ok(ExponentBoundReport {
        tau,
        k0: params.k0,
        pass: gap_scan.holds && self_return_pass && orbit_tracking_pass && off_v_pass,
        gap_scan,
        self_return_exponents,
        self_return_pass,
        orbit_tracks,
        orbit_tracking_pass,
        off_v_max_deviation,
        off_v_pass,
    })
}

/// Follows `x` through successive returns to `V`, pushing a vector from the
/// first cone and checking the cone inclusion and cumulative growth
/// `≥ 2^{(ΣN_V)/2}` at every return.
pub fn track_orbit(x: &SymbolSequence, params: &CounterexampleParams) -> Result<OrbitTrackReport> {
    // enough returns to cross the core and wrap the right tail twice
    let budget = x.core().len() + 2 * x.right_period().len() + 2;
    let (cone, _) = cone_or_substitute(x, params);
    let mut v = Mat2::IDENTITY.apply_direction(cone.center());
    let mut log2_norm = 0.0;
    let mut total = 0u64;
    let mut min_excess = f64::INFINITY;
    let mut pass = true;
    let mut cur = x.clone();
    let mut returns = 0;
    while returns < budget {
        let step = verify_cone_step(&cur, params)?;
        let ret = first_return(&cur, params)?;
        pass &= step.pass;
        let w = ret.product.matrix.apply(v);
        let len = w[0].hypot(w[1]);
        log2_norm += (ret.product.log_scale + len.ln()) / LN_2;
        v = [w[0] / len, w[1] / len];
        total += ret.return_time;
        let excess = log2_norm - total as f64 / 2.0;
        min_excess = min_excess.min(excess);
        if excess < -INEQUALITY_SLACK {
            pass = false;
        }
        cur = cur.shift(ret.return_time as i64);
        returns += 1;
    }
    Ok(OrbitTrackReport {
        point: x.clone(),
        returns,
        total_return_time: total,
        min_log2_excess: min_excess,
        pass,
    })
}

/// A point of `V` whose future visits `V` infinitely often: `1`s separated
/// by random gaps, some short (no rotation) and some long.
pub fn sample_recurrent_point(seed: u64, index: u64) -> SymbolSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let block = |rng: &mut ChaCha8Rng, ones: usize| -> Vec<Symbol> {
        let mut w = Vec::new();
        for _ in 0..ones {
            w.push(1);
            let gap = if rng.gen_bool(0.5) {
                rng.gen_range(0..6)
            } else {
                rng.gen_range(10..40)
            };
            w.extend(std::iter::repeat_n(0, gap));
        }
        w
    };
    let counts = [rng.gen_range(1..3), rng.gen_range(1..6), rng.gen_range(1..3)];
    let left = block(&mut rng, counts[0]);
    let core = block(&mut rng, counts[1]);
    let right = block(&mut rng, counts[2]);
    SymbolSequence::new(left, 0, core, right).unwrap()
}

/// A point whose forward orbit never meets `V`: arbitrary past, zero future.
pub fn sample_off_v_point(seed: u64, index: u64) -> SymbolSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0ff5);
    rng.set_stream(index);
    let len = rng.gen_range(1..30);
    let core: Vec<Symbol> = (0..len).map(|_| rng.gen_range(0..2)).collect();
    let left: Vec<Symbol> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..2)).collect();
    SymbolSequence::new(left, -(len as i64), core, vec![0]).unwrap()
}

/// Recurrent points with `k(x) > k0` whose next visit is arbitrary.
pub fn sample_mixed_point(seed: u64, index: u64, params: &CounterexampleParams) -> SymbolSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x00c0_ffee);
    rng.set_stream(index);
    let k0 = params.k0 as usize;
    let before = rng.gen_range(k0 + 1..k0 + 30);
    let after = rng.gen_range(k0 + 1..k0 + 30);
    let mut core = vec![0; before];
    core.push(1);
    core.extend(std::iter::repeat_n(0, after));
    core.push(1);
    let tail_gap = rng.gen_range(0..k0 + 20);
    let mut right = vec![0; tail_gap];
    right.push(1);
    let left: Vec<Symbol> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..2)).collect();
    SymbolSequence::new(left, -(before as i64), core, right).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> CounterexampleParams {
        CounterexampleParams::determined()
    }

    #[test]
    fn k0_is_thirteen() {
        assert_eq!(determine_k0(), 13);
        // the offset inequality alone first holds at 14
        let first = (1..=64).find(|&k| angle_offset(k) < 0.3).unwrap();
        assert_eq!(first, 14);
        for k in 14..=K_SCAN_LIMIT {
            assert!(cone_inequalities(k).all_hold(), "k = {k}");
        }
        assert!(!cone_inequalities(13).all_hold());
        // β cot β ≤ 1 < 2^{1/8} everywhere
        assert!((1..=64).all(|k| cone_inequalities(k).cotangent_upper));
    }

    #[test]
    fn k0_override() {
        assert!(CounterexampleParams::with_k0(12).is_err());
        assert_eq!(CounterexampleParams::with_k0(20).unwrap().k0(), 20);
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_of(&homoclinic_point()), None);
        assert_eq!(k_of(&SymbolSequence::constant(1)), Some(1));
        for m in 1..10 {
            assert_eq!(k_of(&self_return_point(m)), Some(2 * m as u64 + 1));
        }
        assert_eq!(k_of(&SymbolSequence::constant(0)), None);
        let x = SymbolSequence::block_on_background(0, -5, &[1, 0, 0, 0, 0, 1]);
        assert_eq!(k_of(&x), Some(5));
    }

    #[test]
    fn theta_cases() {
        let p = params();
        assert_eq!(theta(&homoclinic_point(), &p), FRAC_PI_2);
        assert_eq!(theta(&SymbolSequence::constant(0), &p), 0.0);
        let k = p.k0() + 8;
        let x = SymbolSequence::block_on_background(0, 0, &{
            let mut w = vec![1];
            w.extend(vec![0; k as usize - 1]);
            w.push(1);
            w
        });
        assert_eq!(k_of(&x), Some(k));
        assert_eq!(theta(&x, &p), FRAC_PI_2 - (-(k as f64) / 8.0).exp2());
        // outside V the rotation is off even when k is large
        let y = x.shift(1);
        assert_eq!(theta(&y, &p), 0.0);
        assert_eq!(theta(&self_return_point(2), &p), 0.0);
    }

    #[test]
    fn theta_continuity_at_q() {
        let p = params();
        for r in p.k0() + 1..200 {
            let mut w = vec![1];
            w.extend(vec![0; r as usize - 1]);
            w.push(1);
            let x = SymbolSequence::block_on_background(0, 0, &w);
            assert_eq!(k_of(&x), Some(r));
            assert!((FRAC_PI_2 - theta(&x, &p) - (-(r as f64) / 8.0).exp2()).abs() <= 4.0 * f64::EPSILON);
            // d(x, q) = 2^{-k(x)}
            assert_eq!(x.distance(&homoclinic_point()), (-(r as f64)).exp2());
        }
    }

    #[test]
    fn first_return_examples() {
        let p = params();
        let one = SymbolSequence::constant(1);
        let r = first_return(&one, &p).unwrap();
        assert_eq!(r.return_time, 1);
        assert!((r.product.recombined() - base_matrix()).frobenius() < 1e-14);
        for m in 1..12 {
            let x = self_return_point(m);
            let r = first_return(&x, &p).unwrap();
            assert_eq!(r.return_time, 2 * m as u64 + 1);
            assert_eq!(x.shift(r.return_time as i64), x);
        }
        assert!(matches!(first_return(&homoclinic_point(), &p), Err(Error::NoReturn)));
        assert!(matches!(
            first_return(&SymbolSequence::constant(0), &p),
            Err(Error::NotInV)
        ));
    }

    #[test]
    fn induced_matrix_closed_form() {
        let p = params();
        for m in 7..20 {
            let x = self_return_point(m);
            let r = first_return(&x, &p).unwrap();
            let n = r.return_time as i32;
            let delta = angle_offset(2 * m as u64 + 1);
            let oracle = Mat2::diag(2f64.powi(n), 2f64.powi(-n)) * Mat2::rotation_from_complement(delta);
            assert!(r.product.recombined().relative_distance(&oracle) < 1e-12);
        }
    }

    #[test]
    fn cone_of_examples() {
        let p = params();
        let x = self_return_point(7);
        let c = cone_of(&x, &p).unwrap();
        assert!((c.half_width() - (FRAC_PI_2 - beta(15))).abs() < 1e-15);
        assert!((c.center() - (angle_offset(15) + FRAC_PI_2)).abs() < 1e-15);
        assert!(matches!(
            cone_of(&self_return_point(6), &p),
            Err(Error::ConeUndefined(13))
        ));
        // horizontal direction lies in every lemma cone
        assert!(c.contains_direction(0.0));
    }

    #[test]
    fn self_return_family_passes() {
        let p = params();
        for m in 7..=30 {
            let r = verify_cone_step(&self_return_point(m), &p).unwrap();
            assert!(r.pass, "m = {m}: {:?}", r.violations);
            assert!(r.inclusion_slack > 0.0);
        }
    }

    #[test]
    fn halved_beta_is_caught() {
        let p = params();
        let r = verify_cone_step_with_beta_scale(&self_return_point(9), &p, 0.5).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn not_uh_witness() {
        let r = verify_not_uh(25, &params()).unwrap();
        assert!(r.pass);
        assert!(r.max_deviation <= 1e-10);
        assert!((r.fixed_point_log_norm - 50.0 * LN_2).abs() < 1e-10);
    }

    #[test]
    fn periodic_examples() {
        let spec = CocycleSpec::diag_rotation(params());
        let q = spec.sft();
        let fixed = PeriodicOrbit::new(&[0], q).unwrap();
        let l = lyapunov::periodic_exponent(&spec, &fixed).unwrap().lambda_plus;
        assert!((l - LN_2).abs() < 1e-14);
        let alt = PeriodicOrbit::new(&[0, 1], q).unwrap();
        let l = lyapunov::periodic_exponent(&spec, &alt).unwrap().lambda_plus;
        assert!((l - LN_2).abs() < 1e-14);
        for m in 7..15 {
            let mut w = vec![0; 2 * m + 1];
            w[0] = 1;
            let orbit = PeriodicOrbit::new(&w, q).unwrap();
            let l = lyapunov::periodic_exponent(&spec, &orbit).unwrap().lambda_plus;
            // trace of D^N R_θ is cos θ (2^N + 2^{-N})
            let n = w.len() as f64;
            let t = angle_offset(w.len() as u64).sin() * (n.exp2() + (-n).exp2());
            let oracle = (t / 2.0).acosh() / n;
            assert!((l - oracle).abs() < 1e-12);
            assert!(l >= LN_2 / 2.0);
        }
    }

    #[test]
    fn mixed_points_pass() {
        let p = params();
        for i in 0..40 {
            let x = sample_mixed_point(3, i, &p);
            assert!(k_of(&x).unwrap() > p.k0());
            let r = verify_cone_step(&x, &p).unwrap();
            assert!(r.pass, "{x}: {:?}", r.violations);
        }
    }

    #[test]
    fn orbit_tracking_small() {
        let p = params();
        for i in 0..20 {
            let x = sample_recurrent_point(11, i);
            let t = track_orbit(&x, &p).unwrap();
            assert!(t.pass, "{x}");
        }
    }

    #[test]
    fn cone_nesting_along_self_return() {
        // pushing C(x) forward repeatedly shrinks it while keeping a common direction
        let p = params();
        let x = self_return_point(8);
        let r = first_return(&x, &p).unwrap();
        let mut arc = cone_of(&x, &p).unwrap();
        let mut widths = vec![arc.half_width()];
        for _ in 0..5 {
            let next = arc.image(&r.product.matrix).unwrap();
            assert!(next.is_inside(&arc, 0.0));
            arc = next;
            widths.push(arc.half_width());
        }
        assert!(widths.windows(2).all(|w| w[1] <= w[0]));
    }

    proptest! {
        #[test]
        fn return_time_bounds_k(seed in 0u64..1000, i in 0u64..8) {
            let p = params();
            let x = sample_recurrent_point(seed, i);
            let r = first_return(&x, &p).unwrap();
            prop_assert!(r.k.unwrap() <= r.return_time);
            prop_assert!(r.k_next.unwrap() <= r.return_time);
        }
    }
}

//! Stable and unstable holonomies of fiber-bunched cocycles.
//!
//! `H^s_{x←y} = lim A^n(x)^{-1} A^n(y)` for `y` on the stable set of `x`,
//! and `H^u_{x←y} = lim A^{-n}(x)^{-1} A^{-n}(y)` on the unstable set.

use serde::Serialize;

use crate::cocycle::{CocycleKind, CocycleSpec, ProductResult};
use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::symbolic::SymbolSequence;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Hard cap on truncation depth when the increments do not vanish.
pub const MAX_STEPS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Stable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyResult {
    pub matrix: Mat2,
    pub side: Side,
    pub n_used: usize,
    /// Bound on `|H − matrix|`: neglected tail plus floating-point error.
    pub error_bound: f64,
    pub x: SymbolSequence,
    pub y: SymbolSequence,
}

/// `H^s_{x←y}`.
pub fn stable_holonomy(
    spec: &CocycleSpec,
    x: &SymbolSequence,
    y: &SymbolSequence,
    tol: f64,
) -> Result<HolonomyResult> {
    holonomy(spec, Side::Stable, x, y, tol)
}

/// `H^u_{x←y}`.
pub fn unstable_holonomy(
    spec: &CocycleSpec,
    x: &SymbolSequence,
    y: &SymbolSequence,
    tol: f64,
) -> Result<HolonomyResult> {
    holonomy(spec, Side::Unstable, x, y, tol)
}

pub fn holonomy(
    spec: &CocycleSpec,
    side: Side,
    x: &SymbolSequence,
    y: &SymbolSequence,
    tol: f64,
) -> Result<HolonomyResult> {
    let bunching = spec.bunching();
    if !bunching.bunched {
        return Err(Error::NotBunched(bunching.margin));
    }
    // index past which the two points agree (stable) or before which they
    // agree (unstable)
    let merge = match side {
        Side::Stable => x.stable_index(y).ok_or(Error::NotOnStableSet)?,
        Side::Unstable => x.unstable_index(y).ok_or(Error::NotOnUnstableSet)?,
    };
    let exact_after = match (spec.kind(), side) {
        (CocycleKind::LocallyConstant(_), Side::Stable) => {
            let (lo, _) = spec.window().unwrap();
            Some(if merge == i64::MIN { 0 } else { (merge - lo).max(0) as usize })
        }
        (CocycleKind::LocallyConstant(_), Side::Unstable) => {
            let (_, hi) = spec.window().unwrap();
            Some(if merge == i64::MAX { 0 } else { (hi - merge - 1).max(0) as usize })
        }
        (CocycleKind::Builtin(_), _) => None,
    };
    match exact_after {
        Some(n) => telescoped(spec, side, x, y, n),
        None => {
            let min_steps = match side {
                Side::Stable => merge.max(0),
                Side::Unstable => merge.saturating_neg().max(0),
            };
            truncated(spec, side, x, y, tol, min_steps as usize)
        }
    }
}

/// `A^{±n}(x)^{-1} A^{±n}(y)`, exact once all later factors coincide.
fn telescoped(
    spec: &CocycleSpec,
    side: Side,
    x: &SymbolSequence,
    y: &SymbolSequence,
    n: usize,
) -> Result<HolonomyResult> {
    let signed = match side {
        Side::Stable => n as i64,
        Side::Unstable => -(n as i64),
    };
    let px = spec.product(x, signed)?;
    let py = spec.product(y, signed)?;
    let h = ProductResult::compose(&px.inverse()?, &py);
    Ok(HolonomyResult {
        matrix: h.recombined(),
        side,
        n_used: n,
        error_bound: rounding_bound(spec, side, x, y, n)?,
        x: x.clone(),
        y: y.clone(),
    })
}

// Forward error of the two length-n products and the final multiplication:
// a few units of roundoff per factor, scaled by the product of factor norms.
fn rounding_bound(
    spec: &CocycleSpec,
    side: Side,
    x: &SymbolSequence,
    y: &SymbolSequence,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let mut log_norms = 0.0;
    for k in 0..n as i64 {
        let idx = match side {
            Side::Stable => k,
            Side::Unstable => -k - 1,
        };
        log_norms += spec.evaluate_at(x, idx)?.norm().ln() + spec.evaluate_at(y, idx)?.norm().ln();
    }
    Ok(8.0 * (2 * n + 2) as f64 * f64::EPSILON * log_norms.exp())
}

/// Accumulates `H_{n+1} = H_n + A^n(x)^{-1} Δ_n A^n(y)` until the increments
/// fall below `tol (1 − r)`, where `r` is the observed increment ratio, and
/// bounds the tail geometrically by `last · r / (1 − r)`. Never stops
/// before `min_steps`, where the two orbits may still disagree.
fn truncated(
    spec: &CocycleSpec,
    side: Side,
    x: &SymbolSequence,
    y: &SymbolSequence,
    tol: f64,
    min_steps: usize,
) -> Result<HolonomyResult> {
    let mut h = Mat2::IDENTITY;
    let mut ax = ProductResult::identity();
    let mut ay = ProductResult::identity();
    let mut prev_inc = f64::INFINITY;
    for n in 0..MAX_STEPS {
        let (fx, fy) = match side {
            Side::Stable => (spec.evaluate_at(x, n as i64)?, spec.evaluate_at(y, n as i64)?),
            Side::Unstable => (
                spec.evaluate_at(x, -(n as i64) - 1)?.inverse()?,
                spec.evaluate_at(y, -(n as i64) - 1)?.inverse()?,
            ),
        };
        let delta = fx.inverse()? * fy - Mat2::IDENTITY;
        let inc_m = ax.inverse()?.recombined() * delta * ay.recombined();
        let inc = inc_m.norm();
        h = h + inc_m;
        ax.push_left(&fx);
        ay.push_left(&fy);
        let ratio = if inc == 0.0 {
            0.0
        } else if prev_inc.is_finite() && prev_inc > 0.0 {
            inc / prev_inc
        } else {
            1.0
        };
        prev_inc = inc;
        if n + 1 >= min_steps && ratio < 1.0 && inc <= tol * (1.0 - ratio) {
            return Ok(HolonomyResult {
                matrix: h,
                side,
                n_used: n + 1,
                error_bound: inc * ratio / (1.0 - ratio) + 8.0 * (n + 2) as f64 * f64::EPSILON * h.norm(),
                x: x.clone(),
                y: y.clone(),
            });
        }
        if !h.is_finite() {
            return Err(Error::HolonomyDiverged(n));
        }
    }
    Err(Error::HolonomyDiverged(MAX_STEPS))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub side: Side,
    /// `|H_{x←y} − H_{x←z} H_{z←y}|`.
    pub composition_residual: f64,
    /// `|A(x) H_{x←y} − H_{Tx←Ty} A(y)|`.
    pub intertwining_residual: f64,
    /// `|H_{x←y} − I| / d(x, y)^α`, an empirical Hölder constant sample.
    pub holder_ratio: f64,
    pub distance: f64,
    pub allowance: f64,
    pub pass: bool,
}

/// Checks the composition and intertwining identities for `y, z` on the
/// same stable (or unstable) set as `x`.
pub fn verify_identities(
    spec: &CocycleSpec,
    side: Side,
    x: &SymbolSequence,
    y: &SymbolSequence,
    z: &SymbolSequence,
    tol: f64,
) -> Result<IdentityReport> {
    let hxy = holonomy(spec, side, x, y, tol)?;
    let hxz = holonomy(spec, side, x, z, tol)?;
    let hzy = holonomy(spec, side, z, y, tol)?;
    let (tx, ty) = (x.shift(1), y.shift(1));
    let htxy = holonomy(spec, side, &tx, &ty, tol)?;
    let composition_residual = (hxy.matrix - hxz.matrix * hzy.matrix).norm();
    let ax = spec.evaluate(x)?;
    let ay = spec.evaluate(y)?;
    let intertwining_residual = (ax * hxy.matrix - htxy.matrix * ay).norm();
    let distance = x.distance(y);
    let holder_ratio = if distance > 0.0 {
        (hxy.matrix - Mat2::IDENTITY).norm() / distance.powf(spec.alpha())
    } else {
        0.0
    };
    let max_err = [&hxy, &hxz, &hzy, &htxy]
        .iter()
        .map(|h| h.error_bound)
        .fold(0.0, f64::max);
    let allowance = tol + 2.0 * max_err * (1.0 + ax.norm().max(ay.norm()) + hxz.matrix.norm().max(hzy.matrix.norm()));
    Ok(IdentityReport {
        side,
        pass: composition_residual <= allowance && intertwining_residual <= allowance,
        composition_residual,
        intertwining_residual,
        holder_ratio,
        distance,
        allowance,
    })
}

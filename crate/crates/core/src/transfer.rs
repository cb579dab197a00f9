//! From a point with slow norm growth to a periodic point with a small
//! exponent, by closing the orbit segment and comparing the two products
//! through holonomies:
//!
//! `A^{n0}(p) = H^u_{T^{n0}p←T^{n0}y} H^s_{T^{n0}y←T^{n0}x} A^{n0}(x) H^s_{x←y} H^u_{y←p}`
//!
//! with `y = [p, x]`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::{CocycleSpec, ProductResult};
use crate::error::{Error, Result};
use crate::holonomy::{holonomy, HolonomyResult, Side};
use crate::lyapunov::periodic_exponent;
use crate::matrix::Mat2;
use crate::symbolic::{PeriodicOrbit, Symbol, SymbolSequence};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlowPoint {
    pub point: SymbolSequence,
    pub n0: usize,
    pub norm: f64,
    pub log_norm: f64,
}

/// The search point minimizing `|A^{n0}(x)|`; ties go to the earliest.
pub fn find_slow_point(spec: &CocycleSpec, n0: usize, search: &[SymbolSequence]) -> Result<SlowPoint> {
    if search.is_empty() {
        return Err(Error::EmptySearchSet);
    }
    if n0 == 0 {
        return Err(Error::InvalidSpec("n0 must be at least 1".into()));
    }
    let logs = search
        .par_iter()
        .map(|x| Ok(spec.product(x, n0 as i64)?.log_norm()))
        .collect::<Result<Vec<f64>>>()?;
    let (best, &log_norm) = logs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .unwrap();
    Ok(SlowPoint {
        point: search[best].clone(),
        n0,
        norm: log_norm.exp(),
        log_norm,
    })
}

/// The closed-up orbit segment and the splice point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Shadow {
    pub x: SymbolSequence,
    pub n0: usize,
    /// Shortest word `c` with `x_{n0} → c → x_0` admissible.
    pub connecting_word: Vec<Symbol>,
    pub n1: usize,
    /// `p_n = (x_0, …, x_{n0}, c)_{n mod (n0+n1)}`.
    pub p: SymbolSequence,
    pub orbit: PeriodicOrbit,
    /// `y = [p, x]`.
    pub y: SymbolSequence,
}

pub fn build_shadow(spec: &CocycleSpec, x: &SymbolSequence, n0: usize) -> Result<Shadow> {
    let q = spec.sft();
    if !q.is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    q.check_sequence(x)?;
    let n0i = n0 as i64;
    let c = q.connecting_word(x.get(n0i), x.get(0))?;
    let n1 = c.len() + 1;
    let mut word = x.window(0, n0i + 1);
    word.extend_from_slice(&c);
    let p = SymbolSequence::periodic(&word)?;
    let orbit = PeriodicOrbit::new(&word, q)?;
    let y = SymbolSequence::bracket(&p, x)?;
    let (tp, ty, tx) = (p.shift(n0i), y.shift(n0i), x.shift(n0i));
    if !(ty.in_local_unstable_set_of(&tp) && y.in_local_stable_set_of(x) && tx.in_local_stable_set_of(&ty)) {
        return Err(Error::InvalidSpec("splice is not in the expected local sets".into()));
    }
    Ok(Shadow {
        x: x.clone(),
        n0,
        connecting_word: c,
        n1,
        p,
        orbit,
        y,
    })
}

/// Norms of the six factors of the closing identity, in product order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FactorNorms {
    /// `|A^{n1}(T^{n0} p)|`
    pub closing_product: f64,
    /// `|H^u_{T^{n0}p←T^{n0}y}|`
    pub unstable_end: f64,
    /// `|H^s_{T^{n0}y←T^{n0}x}|`
    pub stable_end: f64,
    /// `|A^{n0}(x)|`
    pub slow_product: f64,
    /// `|H^s_{x←y}|`
    pub stable_start: f64,
    /// `|H^u_{y←p}|`
    pub unstable_start: f64,
}

impl FactorNorms {
    /// The largest factor other than `A^{n0}(x)`.
    pub fn constant(&self) -> f64 {
        [
            self.closing_product,
            self.unstable_end,
            self.stable_end,
            self.stable_start,
            self.unstable_start,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub x: SymbolSequence,
    pub n0: usize,
    /// `log |A^{n0}(x)| / n0`: the rate `ε` the slow point achieves.
    pub epsilon: f64,
    pub connecting_word: Vec<Symbol>,
    pub n1: usize,
    pub max_connectivity: usize,
    pub p: PeriodicOrbit,
    pub y: SymbolSequence,
    pub factors: FactorNorms,
    /// `C`, the largest of the five bounded factors.
    pub c: f64,
    /// `|reconstruction − A^{n0+n1}(p)| / |A^{n0+n1}(p)|`.
    pub identity_residual: f64,
    pub holonomy_error_sum: f64,
    /// Floating-point error of the two product evaluations themselves.
    pub rounding_floor: f64,
    /// Largest residual the identity check accepts.
    pub residual_allowance: f64,
    /// `log |A^{n0+n1}(p)|`.
    pub period_log_norm: f64,
    /// `5 log C + log |A^{n0}(x)|`.
    pub log_bound: f64,
    pub lambda_plus_p: f64,
    /// `(5 log C + log |A^{n0}(x)|) / (n0 + n1)`.
    pub exponent_bound: f64,
    pub norm_bound_holds: bool,
    pub exponent_bound_holds: bool,
    pub n1_bound_holds: bool,
}

impl TransferReport {
    pub fn holds(&self) -> bool {
        self.norm_bound_holds && self.exponent_bound_holds && self.n1_bound_holds
    }
}

/// Computes every factor of the closing identity, checks the reconstruction
/// of `A^{n0+n1}(p)`, and compares `λ_+(p)` with the resulting bound.
pub fn transfer_bound(spec: &CocycleSpec, shadow: &Shadow, tol: f64) -> Result<TransferReport> {
    let bunching = spec.bunching();
    if !bunching.bunched {
        return Err(Error::NotBunched(bunching.margin));
    }
    let Shadow { x, n0, n1, p, y, .. } = shadow;
    let (n0, n1) = (*n0, *n1);
    let n0i = n0 as i64;
    let (tp, ty, tx) = (p.shift(n0i), y.shift(n0i), x.shift(n0i));

    let closing = spec.product(&tp, n1 as i64)?;
    let h_u_end = holonomy(spec, Side::Unstable, &tp, &ty, tol)?;
    let h_s_end = holonomy(spec, Side::Stable, &ty, &tx, tol)?;
    let slow = spec.product(x, n0i)?;
    let h_s_start = holonomy(spec, Side::Stable, x, y, tol)?;
    let h_u_start = holonomy(spec, Side::Unstable, y, p, tol)?;

    let factors = FactorNorms {
        closing_product: closing.log_norm().exp(),
        unstable_end: h_u_end.matrix.norm(),
        stable_end: h_s_end.matrix.norm(),
        slow_product: slow.log_norm().exp(),
        stable_start: h_s_start.matrix.norm(),
        unstable_start: h_u_start.matrix.norm(),
    };
    let c = factors.constant();

    // reconstruct A^{n0+n1}(p) with the scale of A^{n0}(x) factored out
    let inner = h_u_end.matrix * h_s_end.matrix * slow.matrix * h_s_start.matrix * h_u_start.matrix;
    let recon = ProductResult::compose(
        &closing,
        &ProductResult {
            matrix: inner,
            log_scale: slow.log_scale,
            steps: n0i,
        },
    );
    let period = spec.product(p, (n0 + n1) as i64)?;
    let identity_residual = relative_gap(&recon, &period);

    let holonomies: [&HolonomyResult; 4] = [&h_u_end, &h_s_end, &h_s_start, &h_u_start];
    let holonomy_error_sum: f64 = holonomies.iter().map(|h| h.error_bound).sum();
    let log_bound = 5.0 * c.ln() + slow.log_norm();
    // an error e in one holonomy moves the product by at most e times the
    // other factors, all bounded by C and |A^{n0}(x)|
    let sensitivity = (log_bound - c.ln() - period.log_norm()).exp();
    let steps = (n0 + n1) as f64 + 6.0;
    let chain_rounding = 16.0 * steps * f64::EPSILON * (log_bound + log_factor_sum(spec, x, p, n0, n1)? - period.log_norm()).exp();
    let residual_allowance = 10.0 * holonomy_error_sum * sensitivity + chain_rounding;
    if !(identity_residual <= residual_allowance) {
        return Err(Error::IdentityResidualExceeded {
            residual: identity_residual,
            allowance: residual_allowance,
        });
    }

    let lambda_plus_p = periodic_exponent(spec, &shadow.orbit)?.lambda_plus;
    let exponent_bound = log_bound / (n0 + n1) as f64;
    let max_connectivity = spec.sft().max_connectivity().ok_or(Error::NotIrreducible)?;
    Ok(TransferReport {
        x: x.clone(),
        n0,
        epsilon: slow.log_norm() / n0 as f64,
        connecting_word: shadow.connecting_word.clone(),
        n1,
        max_connectivity,
        p: shadow.orbit.clone(),
        y: y.clone(),
        factors,
        c,
        identity_residual,
        holonomy_error_sum,
        rounding_floor: chain_rounding,
        residual_allowance,
        period_log_norm: period.log_norm(),
        log_bound,
        norm_bound_holds: period.log_norm() <= log_bound + tol.ln_1p(),
        exponent_bound_holds: lambda_plus_p <= exponent_bound + tol,
        n1_bound_holds: n1 <= max_connectivity,
        lambda_plus_p,
        exponent_bound,
    })
}

// log of the product of single-step norms along both products, minus the
// log norms of the products themselves: how much cancellation happened
fn log_factor_sum(spec: &CocycleSpec, x: &SymbolSequence, p: &SymbolSequence, n0: usize, n1: usize) -> Result<f64> {
    let mut s = 0.0;
    for k in 0..n0 as i64 {
        s += spec.evaluate_at(x, k)?.norm().ln();
    }
    for k in 0..(n0 + n1) as i64 {
        s += spec.evaluate_at(p, k)?.norm().ln();
    }
    let slow = spec.product(x, n0 as i64)?.log_norm();
    let period = spec.product(p, (n0 + n1) as i64)?.log_norm();
    Ok((s - slow - period).max(0.0))
}

fn relative_gap(a: &ProductResult, b: &ProductResult) -> f64 {
    // bring both to the scale of b
    let a_m: Mat2 = a.matrix.scale((a.log_scale - b.log_scale).exp());
    (a_m - b.matrix).norm() / b.matrix.norm()
}

/// The whole chain: slowest search point, its shadow, and the bound.
pub fn run_transfer(
    spec: &CocycleSpec,
    n0: usize,
    search: &[SymbolSequence],
    tol: f64,
) -> Result<(SlowPoint, TransferReport)> {
    let slow = find_slow_point(spec, n0, search)?;
    let shadow = build_shadow(spec, &slow.point, n0)?;
    let report = transfer_bound(spec, &shadow, tol)?;
    Ok((slow, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{self, CounterexampleParams};
    use crate::symbolic::{enumerate_periodic, TransitionMatrix};
    use std::f64::consts::LN_2;

    fn full2() -> TransitionMatrix {
        TransitionMatrix::full_shift(2)
    }

    #[test]
    fn slow_point_examples() {
        let rot = CocycleSpec::constant(full2(), Mat2::rotation(0.4), 0.5).unwrap();
        let search = vec![SymbolSequence::constant(0), SymbolSequence::constant(1)];
        let s = find_slow_point(&rot, 10, &search).unwrap();
        assert!((s.norm - 1.0).abs() < 1e-12);
        assert_eq!(s.point, search[0]);

        let builtin = CocycleSpec::diag_rotation(CounterexampleParams::determined());
        let mut search: Vec<_> = enumerate_periodic(&full2(), 4, usize::MAX)
            .unwrap()
            .iter()
            .map(|o| o.base_point())
            .collect();
        search.push(gallery::homoclinic_preimage(6));
        let s = find_slow_point(&builtin, 12, &search).unwrap();
        assert_eq!(s.point, gallery::homoclinic_preimage(6));
        assert!((s.norm - 1.0).abs() < 1e-12);

        let diag = CocycleSpec::constant(full2(), Mat2::diag(2.0, 0.5), 0.5).unwrap();
        let s = find_slow_point(&diag, 9, &search).unwrap();
        assert!((s.log_norm - 9.0 * LN_2).abs() < 1e-12);

        assert!(matches!(find_slow_point(&diag, 9, &[]), Err(Error::EmptySearchSet)));
    }

    #[test]
    fn shadow_examples() {
        let id = CocycleSpec::constant(full2(), Mat2::IDENTITY, 0.5).unwrap();
        let s = build_shadow(&id, &SymbolSequence::constant(0), 3).unwrap();
        assert!(s.connecting_word.is_empty());
        assert_eq!(s.n1, 1);
        assert_eq!(s.p, SymbolSequence::constant(0));
        assert_eq!(s.y, SymbolSequence::constant(0));

        let x = gallery::homoclinic_preimage(2);
        let s = build_shadow(&id, &x, 4).unwrap();
        assert_eq!(s.p.window(0, 5), vec![0, 0, 1, 0, 0]);
        assert_eq!(s.p.period(), Some(5));
        for n in -20..=0 {
            assert_eq!(s.y.get(n), s.p.get(n));
        }
        for n in 0..20 {
            assert_eq!(s.y.get(n), x.get(n));
        }

        let golden = TransitionMatrix::golden_mean();
        let id = CocycleSpec::constant(golden, Mat2::IDENTITY, 0.5).unwrap();
        let x = SymbolSequence::periodic(&[1, 0, 1, 0, 0]).unwrap();
        let s = build_shadow(&id, &x, 2).unwrap();
        assert_eq!(s.connecting_word, vec![0]);
        assert_eq!(s.n1, 2);
    }

    #[test]
    fn rotation_chain_is_exact() {
        let rot = CocycleSpec::constant(full2(), Mat2::rotation(0.4), 0.5).unwrap();
        let x = SymbolSequence::new(vec![1], -2, vec![0, 1, 1, 0, 1], vec![0, 1, 1]).unwrap();
        let shadow = build_shadow(&rot, &x, 9).unwrap();
        let r = transfer_bound(&rot, &shadow, 1e-9).unwrap();
        assert_eq!(r.lambda_plus_p, 0.0);
        assert!(r.holds());
        assert!(r.identity_residual < 1e-13);
        assert!((r.c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_chain() {
        let a = 1.1;
        let spec = CocycleSpec::constant(full2(), Mat2::diag(a, 1.0 / a), 0.5).unwrap();
        let x = SymbolSequence::periodic(&[0, 1, 1, 0, 1]).unwrap();
        let shadow = build_shadow(&spec, &x, 10).unwrap();
        let r = transfer_bound(&spec, &shadow, 1e-9).unwrap();
        assert!(r.holds());
        assert!((r.lambda_plus_p - a.ln()).abs() < 1e-12);
        assert!((r.epsilon - a.ln()).abs() < 1e-12);
    }

    #[test]
    fn non_bunched_is_rejected() {
        let builtin = CocycleSpec::diag_rotation(CounterexampleParams::determined());
        let x = gallery::homoclinic_preimage(3);
        let shadow = build_shadow(&builtin, &x, 6).unwrap();
        assert!(matches!(transfer_bound(&builtin, &shadow, 1e-9), Err(Error::NotBunched(_))));
    }
}

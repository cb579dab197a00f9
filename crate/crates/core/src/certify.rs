//! Uniform hyperbolicity: certification through invariant cone fields,
//! falsification through bounded-norm witnesses.

use rayon::prelude::*;
use serde::Serialize;

use crate::cocycle::{CocycleSpec, ProductResult};
use crate::error::{Error, Result};
use crate::matrix::{Mat2, ProjectiveArc};
use crate::symbolic::{Symbol, SymbolSequence, TransitionMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UhStatus {
    Certified,
    Falsified,
    Inconclusive,
}

/// A point where `|A^n(x)|` stays below `e^{τ n} / 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: SymbolSequence,
    pub n: usize,
    pub norm: f64,
    pub log_norm: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UhVerdict {
    pub status: UhStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<ConeCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Largest horizon examined.
    pub horizon: usize,
    pub note: String,
}

impl UhVerdict {
    fn inconclusive(horizon: usize, note: impl Into<String>) -> Self {
        UhVerdict {
            status: UhStatus::Inconclusive,
            certificate: None,
            witness: None,
            horizon,
            note: note.into(),
        }
    }
}

/// Looks for `x, n ≤ n_max` with `|A^n(x)| ≤ e^{τ n} / 2`. Such a point rules
/// out the growth bound `|A^n(x)| ≥ c e^{τ n}` for every `c > 1/2`; sweeping
/// `τ` down covers the remaining constants.
pub fn norm_growth_probe(
    spec: &CocycleSpec,
    samples: &[SymbolSequence],
    n_max: usize,
    tau: f64,
) -> Result<UhVerdict> {
    if !(tau > 0.0) {
        return Err(Error::InvalidSpec("probe rate must be positive".into()));
    }
    let hits = samples
        .par_iter()
        .map(|x| {
            let mut p = ProductResult::identity();
            for n in 1..=n_max {
                p.push_left(&spec.evaluate_at(x, n as i64 - 1)?);
                let log_threshold = tau * n as f64 - std::f64::consts::LN_2;
                let log_norm = p.log_norm();
                if log_norm <= log_threshold {
                    return Ok(Some(Witness {
                        point: x.clone(),
                        n,
                        norm: log_norm.exp(),
                        log_norm,
                        threshold: log_threshold.exp(),
                    }));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(match hits.into_iter().flatten().next() {
        Some(w) => UhVerdict {
            status: UhStatus::Falsified,
            certificate: None,
            horizon: n_max,
            note: format!(
                "|A^{}(x)| = {:e} <= e^({tau} n)/2; no bound c e^(tau n) with c > 1/2 holds",
                w.n, w.norm
            ),
            witness: Some(w),
        },
        None => UhVerdict::inconclusive(n_max, "no slow point found; the probe cannot certify"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConeOptions {
    pub refine_steps: usize,
    /// Angular room required between an image arc and its target.
    pub margin: f64,
    /// Minimal cumulative expansion per block, must exceed 1.
    pub growth_threshold: f64,
    pub max_word_len: usize,
}

impl Default for ConeOptions {
    fn default() -> Self {
        ConeOptions {
            refine_steps: 200,
            margin: 1e-6,
            growth_threshold: 1.0 + 1e-6,
            max_word_len: 12,
        }
    }
}

/// Candidate widenings of the refined arcs, smallest first.
const WIDENINGS: [f64; 6] = [1e-5, 1e-4, 1e-3, 1e-2, 5e-2, 0.2];

/// Largest number of words examined for one block length.
const WORD_BUDGET: usize = 1 << 22;

/// Per-symbol cones with the expansion they guarantee.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeFamily {
    pub arcs: Vec<ProjectiveArc>,
    /// Block length `L` over which expansion is verified.
    pub block_len: usize,
    /// Minimal growth over admissible words of length `L`.
    pub block_growth: f64,
    /// Minimal one-step growth on the cones.
    pub step_growth: f64,
    /// Smallest inclusion slack over admissible transitions.
    pub inclusion_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeCertificate {
    /// Expanding cones for the forward dynamics.
    pub unstable: ConeFamily,
    /// Expanding cones for the inverse dynamics.
    pub stable: ConeFamily,
    pub margin: f64,
    /// `|A^n(x) v| ≥ c e^{τ n}` for unit `v` in the unstable cones.
    pub c: f64,
    pub tau: f64,
}

impl ConeCertificate {
    /// Replays every stored inclusion and growth check.
    pub fn revalidate(&self, spec: &CocycleSpec) -> bool {
        if !spec.is_one_step() {
            return false;
        }
        let (fwd, bwd) = one_step_systems(spec);
        revalidate_family(&fwd, &self.unstable, self.margin)
            && revalidate_family(&bwd, &self.stable, self.margin)
    }
}

/// A one-step system: `v ∈ C_a` is mapped by `mats[a]` into `C_b` for `a → b`.
struct System {
    q: TransitionMatrix,
    mats: Vec<Mat2>,
}

fn one_step_systems(spec: &CocycleSpec) -> (System, System) {
    let mats: Vec<Mat2> = spec.entries().into_iter().map(|(_, m)| m).collect();
    let rows = spec.sft().rows();
    let l = rows.len();
    let transposed: Vec<Vec<u8>> = (0..l).map(|i| (0..l).map(|j| rows[j][i]).collect()).collect();
    let inv = mats
        .iter()
        .map(|m| m.inverse().expect("table entries are SL2"))
        .collect();
    (
        System {
            q: spec.sft().clone(),
            mats,
        },
        System {
            q: TransitionMatrix::new(&transposed).expect("transpose of a valid matrix"),
            mats: inv,
        },
    )
}

/// Certifies uniform hyperbolicity of a one-step cocycle by finding
/// strictly invariant, uniformly expanding cone families for both the
/// forward and the inverse dynamics.
pub fn cone_certify(spec: &CocycleSpec, opts: &ConeOptions) -> Result<UhVerdict> {
    if !spec.is_one_step() {
        return Err(Error::NotOneStep);
    }
    if !spec.sft().is_irreducible() {
        return Err(Error::NotIrreducible);
    }
    let (fwd, bwd) = one_step_systems(spec);
    let unstable = match expanding_family(&fwd, opts) {
        Ok(f) => f,
        Err(why) => return Ok(UhVerdict::inconclusive(opts.max_word_len, format!("forward pass: {why}"))),
    };
    let stable = match expanding_family(&bwd, opts) {
        Ok(f) => f,
        Err(why) => return Ok(UhVerdict::inconclusive(opts.max_word_len, format!("backward pass: {why}"))),
    };
    let l = unstable.block_len as f64;
    let tau = unstable.block_growth.ln() / l;
    let ratio = unstable.step_growth / unstable.block_growth.powf(1.0 / l);
    let c = ratio.powi(unstable.block_len as i32 - 1).min(1.0);
    let certificate = ConeCertificate {
        unstable,
        stable,
        margin: opts.margin,
        c,
        tau,
    };
    debug_assert!(certificate.revalidate(spec));
    Ok(UhVerdict {
        status: UhStatus::Certified,
        certificate: Some(certificate),
        witness: None,
        horizon: opts.max_word_len,
        note: format!("invariant cones expand by at least c e^(tau n) with tau = {tau}"),
    })
}

fn expanding_family(sys: &System, opts: &ConeOptions) -> std::result::Result<ConeFamily, String> {
    let refined = refine(sys, opts)?;
    let mut last_err = String::from("no widening worked");
    for eps in WIDENINGS {
        let arcs: Vec<ProjectiveArc> = refined.iter().map(|a| a.widened(eps)).collect();
        if arcs.iter().any(|a| a.half_width() + opts.margin >= std::f64::consts::FRAC_PI_2) {
            break;
        }
        let slack = match inclusion_slack(sys, &arcs, opts.margin) {
            Some(s) if s >= 0.0 => s,
            Some(s) => {
                last_err = format!("cones not strictly invariant (slack {s:e})");
                continue;
            }
            None => {
                last_err = "degenerate matrix".into();
                continue;
            }
        };
        let step_growth = (0..sys.mats.len())
            .map(|a| sys.mats[a].min_growth_on_arc(&arcs[a]))
            .fold(f64::INFINITY, f64::min);
        match block_growth(sys, &arcs, opts) {
            Some((block_len, growth)) => {
                return Ok(ConeFamily {
                    arcs,
                    block_len,
                    block_growth: growth,
                    step_growth,
                    inclusion_slack: slack,
                })
            }
            None => last_err = format!("no expansion above {} within words of length {}", opts.growth_threshold, opts.max_word_len),
        }
    }
    Err(last_err)
}

/// Iterates `C_b ← hull(seed_b ∪ ⋃_{a→b} A(a) C_a)` from arcs around the
/// most expanded output directions, until the arcs stop moving.
fn refine(sys: &System, opts: &ConeOptions) -> std::result::Result<Vec<ProjectiveArc>, String> {
    let l = sys.mats.len();
    let outputs: Vec<ProjectiveArc> = sys
        .mats
        .iter()
        .map(|m| {
            let s = m.svd();
            ProjectiveArc::new(crate::matrix::direction_of(m.apply_direction(s.expanding)), 0.0)
        })
        .collect();
    let seeds: Vec<Vec<ProjectiveArc>> = (0..l)
        .map(|b| (0..l).filter(|&a| sys.q.allows(a, b)).map(|a| outputs[a]).collect())
        .collect();
    let mut arcs: Vec<ProjectiveArc> = seeds
        .iter()
        .map(|s| ProjectiveArc::hull(s, opts.margin).ok_or("seed directions wrap around"))
        .collect::<std::result::Result<_, _>>()?;
    for _ in 0..opts.refine_steps {
        let mut next = Vec::with_capacity(l);
        for b in 0..l {
            let mut parts = seeds[b].clone();
            for a in (0..l).filter(|&a| sys.q.allows(a, b)) {
                parts.push(arcs[a].image_outward(&sys.mats[a]).map_err(|e| e.to_string())?);
            }
            next.push(ProjectiveArc::hull(&parts, opts.margin).ok_or("cone images cover the projective line")?);
        }
        let moved = arcs
            .iter()
            .zip(&next)
            .map(|(a, b)| (a.half_width() - b.half_width()).abs() + crate::matrix::angle_dist(a.center(), b.center()))
            .fold(0.0, f64::max);
        arcs = next;
        if moved < 1e-15 {
            break;
        }
    }
    Ok(arcs)
}

fn inclusion_slack(sys: &System, arcs: &[ProjectiveArc], margin: f64) -> Option<f64> {
    let l = sys.mats.len();
    let mut worst = f64::INFINITY;
    for a in 0..l {
        let img = arcs[a].image_outward(&sys.mats[a]).ok()?;
        for b in sys.q.successors(a) {
            worst = worst.min(img.inclusion_slack(&arcs[b], margin));
        }
    }
    Some(worst)
}

/// First block length `L` with uniform expansion over admissible words.
fn block_growth(sys: &System, arcs: &[ProjectiveArc], opts: &ConeOptions) -> Option<(usize, f64)> {
    let l = sys.mats.len();
    for len in 1..=opts.max_word_len {
        if l.checked_pow(len as u32).is_none_or(|n| n > WORD_BUDGET) {
            let count = count_words(&sys.q, len);
            if count > WORD_BUDGET {
                return None;
            }
        }
        let g = min_word_growth(sys, arcs, len);
        if g >= opts.growth_threshold {
            return Some((len, g));
        }
    }
    None
}

fn count_words(q: &TransitionMatrix, len: usize) -> usize {
    let l = q.size();
    let mut counts = vec![1usize; l];
    for _ in 1..len {
        let mut next = vec![0usize; l];
        for a in 0..l {
            for b in q.successors(a) {
                next[b] = next[b].saturating_add(counts[a]);
            }
        }
        counts = next;
    }
    counts.into_iter().fold(0, usize::saturating_add)
}

// min over admissible words a_0..a_{len-1} of the growth of
// A(a_{len-1})⋯A(a_0) on C_{a_0}
fn min_word_growth(sys: &System, arcs: &[ProjectiveArc], len: usize) -> f64 {
    fn dfs(sys: &System, arc: &ProjectiveArc, last: Symbol, prod: Mat2, depth: usize, len: usize) -> f64 {
        if depth == len {
            return prod.min_growth_on_arc(arc);
        }
        sys.q
            .successors(last)
            .map(|b| dfs(sys, arc, b, sys.mats[b] * prod, depth + 1, len))
            .fold(f64::INFINITY, f64::min)
    }
    (0..sys.mats.len())
        .into_par_iter()
        .map(|a| dfs(sys, &arcs[a], a, sys.mats[a], 1, len))
        .reduce(|| f64::INFINITY, f64::min)
}

fn revalidate_family(sys: &System, fam: &ConeFamily, margin: f64) -> bool {
    if fam.arcs.len() != sys.mats.len() {
        return false;
    }
    let slack_ok = matches!(inclusion_slack(sys, &fam.arcs, margin), Some(s) if s >= 0.0);
    let growth = min_word_growth(sys, &fam.arcs, fam.block_len);
    slack_ok && growth >= fam.block_growth * (1.0 - 1e-12) && growth > 1.0
}

/// Approximate stable and unstable directions at `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Directions {
    /// Most contracted direction of `A^n(x)`.
    pub stable: f64,
    /// Most contracted direction of `A^{−n}(x)`.
    pub unstable: f64,
}

/// Smallest singular gap `σ1/σ2` for which directions are reported.
pub const MIN_SINGULAR_GAP: f64 = 1.0 + 1e-6;

pub fn extract_directions(spec: &CocycleSpec, x: &SymbolSequence, n: usize) -> Result<Directions> {
    if n == 0 {
        return Err(Error::InvalidSpec("horizon must be at least 1".into()));
    }
    let contracted = |p: ProductResult| -> Result<f64> {
        // σ1/σ2 = σ1² for a determinant-one product
        let gap = (2.0 * p.log_norm()).exp();
        if !(gap >= MIN_SINGULAR_GAP) {
            return Err(Error::DegenerateSingularGap(gap));
        }
        Ok(p.matrix.svd().contracting)
    };
    Ok(Directions {
        stable: contracted(spec.product(x, n as i64)?)?,
        unstable: contracted(spec.product(x, -(n as i64))?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{self, CounterexampleParams};
    use crate::matrix::angle_dist;
    use crate::symbolic::enumerate_periodic;
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn full2() -> TransitionMatrix {
        TransitionMatrix::full_shift(2)
    }

    fn periodic_samples(q: &TransitionMatrix, p: usize) -> Vec<SymbolSequence> {
        enumerate_periodic(q, p, usize::MAX)
            .unwrap()
            .iter()
            .flat_map(|o| o.points())
            .collect()
    }

    #[test]
    fn probe_examples() {
        let diag = CocycleSpec::constant(full2(), Mat2::diag(2.0, 0.5), 0.5).unwrap();
        let samples = periodic_samples(&full2(), 6);
        let v = norm_growth_probe(&diag, &samples, 60, 0.1).unwrap();
        assert_eq!(v.status, UhStatus::Inconclusive);

        let rot = CocycleSpec::constant(full2(), Mat2::rotation(0.7), 0.5).unwrap();
        let v = norm_growth_probe(&rot, &samples, 60, 0.1).unwrap();
        assert_eq!(v.status, UhStatus::Falsified);
        let w = v.witness.unwrap();
        assert!((w.norm - 1.0).abs() < 1e-12);
        // first horizon with e^{τ n}/2 ≥ 1
        assert_eq!(w.n, (LN_2 / 0.1).ceil() as usize);

        let builtin = CocycleSpec::diag_rotation(CounterexampleParams::determined());
        let v = norm_growth_probe(&builtin, &[gallery::homoclinic_preimage(15)], 31, 0.1).unwrap();
        assert_eq!(v.status, UhStatus::Falsified);
        let w = v.witness.unwrap();
        // A^n(T^{-15} q) = D^{n-15} R D^15 for n > 15, with norm 2^{|30 - n|}
        let oracle = (1..=31)
            .find(|&n: &usize| {
                let norm = if n <= 15 { (n as f64).exp2() } else { (30.0 - n as f64).abs().exp2() };
                norm <= (0.1 * n as f64).exp() / 2.0
            })
            .unwrap();
        assert_eq!(oracle, 28);
        assert_eq!(w.n, oracle);
        assert!((w.norm - 4.0).abs() < 1e-10);
    }

    #[test]
    fn diag_is_certified() {
        let diag = CocycleSpec::constant(full2(), Mat2::diag(2.0, 0.5), 0.5).unwrap();
        let v = cone_certify(&diag, &ConeOptions::default()).unwrap();
        assert_eq!(v.status, UhStatus::Certified);
        let cert = v.certificate.unwrap();
        assert!((cert.tau - LN_2).abs() < 1e-9);
        assert!((cert.c - 1.0).abs() < 1e-12);
        for arc in &cert.unstable.arcs {
            assert!(angle_dist(arc.center(), 0.0) < 1e-9);
        }
        for arc in &cert.stable.arcs {
            assert!(angle_dist(arc.center(), FRAC_PI_2) < 1e-9);
        }
        assert!(cert.revalidate(&diag));
    }

    #[test]
    fn rotation_is_not_certified() {
        let rot = CocycleSpec::constant(full2(), Mat2::rotation(0.7), 0.5).unwrap();
        let v = cone_certify(&rot, &ConeOptions::default()).unwrap();
        assert_eq!(v.status, UhStatus::Inconclusive);
    }

    #[test]
    fn mixed_hyperbolic_certified() {
        let m0 = Mat2::diag(3.0, 1.0 / 3.0);
        let m1 = m0 * Mat2::rotation(0.1);
        let spec = CocycleSpec::one_step(full2(), &[m0, m1], 0.5).unwrap();
        let v = cone_certify(&spec, &ConeOptions::default()).unwrap();
        assert_eq!(v.status, UhStatus::Certified);
        let cert = v.certificate.unwrap();
        assert!(cert.unstable.block_len <= 4);
        // exhaustive oracle: every word of length L expands every cone vector
        let l = cert.unstable.block_len;
        for w in full2().admissible_words(l) {
            let mut m = Mat2::IDENTITY;
            for &s in &w {
                m = spec.entries()[s].1 * m;
            }
            let arc = cert.unstable.arcs[w[0]];
            for i in 0..=400 {
                let psi = arc.center() - arc.half_width() + 2.0 * arc.half_width() * i as f64 / 400.0;
                let v = m.apply_direction(psi);
                assert!(v[0].hypot(v[1]) >= cert.unstable.block_growth * (1.0 - 1e-12));
            }
        }
        assert!(cert.revalidate(&spec));
        // tampering with the stored growth is detected
        let mut forged = cert.clone();
        forged.unstable.block_growth *= 10.0;
        assert!(!forged.revalidate(&spec));
    }

    #[test]
    fn wider_windows_need_recoding() {
        let entries: Vec<_> = full2()
            .admissible_words(2)
            .into_iter()
            .map(|w| (w, Mat2::diag(2.0, 0.5)))
            .collect();
        let spec = CocycleSpec::locally_constant(full2(), (0, 1), entries, 0.5).unwrap();
        assert!(matches!(cone_certify(&spec, &ConeOptions::default()), Err(Error::NotOneStep)));
        let (one, _) = spec.recode_one_step().unwrap();
        let v = cone_certify(&one, &ConeOptions::default()).unwrap();
        assert_eq!(v.status, UhStatus::Certified);
    }

    #[test]
    fn direction_examples() {
        let diag = CocycleSpec::constant(full2(), Mat2::diag(2.0, 0.5), 0.5).unwrap();
        let x = SymbolSequence::periodic(&[0, 1]).unwrap();
        for n in [1, 5, 30] {
            let d = extract_directions(&diag, &x, n).unwrap();
            assert!(angle_dist(d.stable, FRAC_PI_2) < 1e-15);
            assert!(angle_dist(d.unstable, 0.0) < 1e-15);
        }
        let cat = CocycleSpec::constant(full2(), Mat2::new(2.0, 1.0, 1.0, 1.0), 0.5).unwrap();
        let d = extract_directions(&cat, &x, 30).unwrap();
        // eigenvectors (1, λ − 2) for λ = (3 ∓ √5)/2
        let es = (-0.5 * (1.0 + 5f64.sqrt())).atan();
        let eu = (0.5 * (5f64.sqrt() - 1.0)).atan();
        assert!(angle_dist(d.stable, es) < 1e-9);
        assert!(angle_dist(d.unstable, eu) < 1e-9);
        let rot = CocycleSpec::constant(full2(), Mat2::rotation(0.7), 0.5).unwrap();
        assert!(matches!(
            extract_directions(&rot, &x, 10),
            Err(Error::DegenerateSingularGap(_))
        ));
    }

    #[test]
    fn equivariance_residual_decays() {
        let m0 = Mat2::diag(3.0, 1.0 / 3.0);
        let m1 = m0 * Mat2::rotation(0.1);
        let spec = CocycleSpec::one_step(full2(), &[m0, m1], 0.5).unwrap();
        let x = SymbolSequence::new(vec![0, 1, 1], -3, vec![1, 0, 0, 1, 1, 0], vec![1, 0]).unwrap();
        let residual = |n: usize| {
            let here = extract_directions(&spec, &x, n).unwrap().stable;
            let there = extract_directions(&spec, &x.shift(1), n).unwrap().stable;
            let pushed = crate::matrix::direction_of(spec.evaluate(&x).unwrap().apply_direction(here));
            angle_dist(pushed, there)
        };
        let r: Vec<f64> = [5, 10, 20].iter().map(|&n| residual(n)).collect();
        assert!(r[1] <= r[0] * 0.5 + 1e-15 && r[2] <= r[1] * 0.5 + 1e-15, "{r:?}");
    }
}

//! 2×2 real matrices and their action on the projective line.
//!
//! Directions are angles taken mod π. A [`ProjectiveArc`] is an open arc of
//! directions, which is how cones `{v : angle(v) within h of φ}` are stored.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|det - 1|` for matrices accepted as SL(2,R).
pub const SL2_TOLERANCE: f64 = 1e-9;

/// Below this `|det|` a matrix is treated as singular.
pub const DEGENERATE_DET: f64 = 1e-14;

/// Outward slack applied by the rigorous variants of the arc operations.
pub const ARC_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

/// Singular values and right singular directions (angles mod π).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Svd2 {
    pub sigma1: f64,
    pub sigma2: f64,
    /// Most expanded input direction.
    pub expanding: f64,
    /// Most contracted input direction, `expanding + π/2`.
    pub contracting: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    /// Builds a matrix and checks `|det - 1| <= 1e-9`.
    pub fn sl2(a11: f64, a12: f64, a21: f64, a22: f64) -> Result<Self> {
        let m = Mat2::new(a11, a12, a21, a22);
        m.require_sl2()?;
        Ok(m)
    }

    pub fn require_sl2(&self) -> Result<()> {
        let det = self.det();
        if det.is_finite() && (det - 1.0).abs() <= SL2_TOLERANCE {
            Ok(())
        } else {
            Err(Error::NotSl2(det))
        }
    }

    pub const fn diag(a: f64, d: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, d)
    }

    /// Counterclockwise rotation by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    /// Rotation by `π/2 - delta`, computed from `delta` so that quarter
    /// turns come out exact.
    pub fn rotation_from_complement(delta: f64) -> Self {
        let (s, c) = delta.sin_cos();
        // cos(π/2 - δ) = sin δ, sin(π/2 - δ) = cos δ
        Mat2::new(s, -c, c, s)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Mat2::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    #[inline]
    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    /// Adjugate; equals the inverse for determinant-one matrices.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.abs() < DEGENERATE_DET {
            return Err(Error::DegenerateMatrix(det.abs()));
        }
        Ok(self.adjugate().scale(1.0 / det))
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    /// Image of the unit vector at angle `psi`.
    pub fn apply_direction(&self, psi: f64) -> [f64; 2] {
        let (s, c) = psi.sin_cos();
        self.apply([c, s])
    }

    pub fn frobenius(&self) -> f64 {
        (self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22)
            .sqrt()
    }

    /// Closed-form singular value decomposition data.
    pub fn svd(&self) -> Svd2 {
        let (a, b, c, d) = (self.a11, self.a12, self.a21, self.a22);
        let q = (a + d).hypot(c - b);
        let r = (a - d).hypot(b + c);
        let sigma1 = 0.5 * (q + r);
        let sigma2 = if sigma1 > 0.0 {
            self.det().abs() / sigma1
        } else {
            0.0
        };
        // eigenvector of MᵀM = [[p, t], [t, s]] for the larger eigenvalue
        let p = a * a + c * c;
        let s = b * b + d * d;
        let t = a * b + c * d;
        let expanding = normalize_angle(0.5 * (2.0 * t).atan2(p - s));
        Svd2 {
            sigma1,
            sigma2,
            expanding,
            contracting: normalize_angle(expanding + FRAC_PI_2),
        }
    }

    /// Operator norm induced by the Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.svd().sigma1
    }

    /// `inf_{|v|=1} |Mv|`.
    pub fn conorm(&self) -> f64 {
        self.svd().sigma2
    }

    /// `|M u_psi|` for the unit vector at angle `psi`.
    pub fn growth_at(&self, psi: f64) -> f64 {
        let v = self.apply_direction(psi);
        v[0].hypot(v[1])
    }

    /// `inf |Mv|` over unit vectors with direction in the closure of `arc`.
    pub fn min_growth_on_arc(&self, arc: &ProjectiveArc) -> f64 {
        let svd = self.svd();
        if arc.is_full() {
            return svd.sigma2;
        }
        // |M u_ψ|² = σ2² + (σ1² − σ2²) sin²(ψ − contracting), increasing in
        // the angular distance to the contracting direction
        let d = (angle_dist(svd.contracting, arc.center) - arc.half_width).max(0.0);
        let s = d.sin();
        (svd.sigma2 * svd.sigma2 + (svd.sigma1 - svd.sigma2) * (svd.sigma1 + svd.sigma2) * s * s)
            .sqrt()
    }

    /// Relative distance `|self - other| / max(|self|, |other|)` in operator norm.
    pub fn relative_distance(&self, other: &Mat2) -> f64 {
        let scale = self.norm().max(other.norm());
        if scale == 0.0 {
            0.0
        } else {
            (*self - *other).norm() / scale
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl std::ops::Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 - o.a11,
            self.a12 - o.a12,
            self.a21 - o.a21,
            self.a22 - o.a22,
        )
    }
}

/// Reduces an angle into `[0, π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Signed difference `b - a` of two directions, reduced into `[-π/2, π/2)`.
pub fn signed_angle_diff(a: f64, b: f64) -> f64 {
    (b - a + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2
}

/// Angular distance between two directions, in `[0, π/2]`.
pub fn angle_dist(a: f64, b: f64) -> f64 {
    signed_angle_diff(a, b).abs()
}

/// Direction (mod π) of a nonzero vector.
pub fn direction_of(v: [f64; 2]) -> f64 {
    normalize_angle(v[1].atan2(v[0]))
}

/// The open set of directions within `half_width` of `center`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveArc {
    center: f64,
    half_width: f64,
}

impl ProjectiveArc {
    /// Builds an arc; half-widths at or above π/2 give the full line.
    pub fn new(center: f64, half_width: f64) -> Self {
        debug_assert!(half_width >= 0.0);
        ProjectiveArc {
            center: normalize_angle(center),
            half_width: half_width.clamp(0.0, FRAC_PI_2),
        }
    }

    pub fn full() -> Self {
        ProjectiveArc {
            center: 0.0,
            half_width: FRAC_PI_2,
        }
    }

    /// Arc with the given endpoints, traversed counterclockwise from `start`.
    pub fn from_endpoints(start: f64, end: f64) -> Self {
        let width = (end - start).rem_euclid(PI);
        ProjectiveArc::new(start + 0.5 * width, 0.5 * width)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn is_full(&self) -> bool {
        self.half_width >= FRAC_PI_2
    }

    pub fn start(&self) -> f64 {
        normalize_angle(self.center - self.half_width)
    }

    pub fn end(&self) -> f64 {
        normalize_angle(self.center + self.half_width)
    }

    pub fn contains_direction(&self, psi: f64) -> bool {
        self.is_full() || angle_dist(psi, self.center) < self.half_width
    }

    /// The arc grown outward by `eps` on both sides.
    pub fn widened(&self, eps: f64) -> Self {
        ProjectiveArc::new(self.center, self.half_width + eps)
    }

    /// True when this arc, dilated by `margin`, lies inside `outer`.
    pub fn is_inside(&self, outer: &ProjectiveArc, margin: f64) -> bool {
        self.inclusion_slack(outer, margin) >= 0.0
    }

    /// `outer.h - |center offset| - (self.h + margin)`; nonnegative exactly
    /// when the dilated arc fits. Infinite when `outer` is the full line.
    pub fn inclusion_slack(&self, outer: &ProjectiveArc, margin: f64) -> f64 {
        if outer.is_full() {
            return f64::INFINITY;
        }
        if self.half_width + margin >= FRAC_PI_2 {
            return f64::NEG_INFINITY;
        }
        outer.half_width - angle_dist(self.center, outer.center) - self.half_width - margin
    }

    /// Image of the arc under `v ↦ Mv`. The image is the arc between the
    /// endpoint images that contains the image of the center, so products
    /// whose normalized determinant underflows are still handled.
    pub fn image(&self, m: &Mat2) -> Result<ProjectiveArc> {
        if !m.is_finite() || m.det() == 0.0 {
            return Err(Error::DegenerateMatrix(m.det().abs()));
        }
        if self.is_full() {
            return Ok(ProjectiveArc::full());
        }
        let dir = |psi: f64| {
            let v = m.apply_direction(psi);
            if v[0] == 0.0 && v[1] == 0.0 {
                Err(Error::DegenerateMatrix(m.det().abs()))
            } else {
                Ok(raw_direction(v))
            }
        };
        let s = dir(self.center - self.half_width)?;
        let e = dir(self.center + self.half_width)?;
        let c = dir(self.center)?;
        let forward = |from: f64, to: f64| (to - from).rem_euclid(PI);
        let (s, width) = if forward(s, c) <= forward(s, e) {
            (s, forward(s, e))
        } else {
            (e, forward(e, s))
        };
        Ok(ProjectiveArc::new(s + 0.5 * width, 0.5 * width))
    }

    /// [`image`](Self::image) widened by [`ARC_SLACK`].
    pub fn image_outward(&self, m: &Mat2) -> Result<ProjectiveArc> {
        Ok(self.image(m)?.widened(ARC_SLACK))
    }

    /// Smallest arc containing all `arcs`, or `None` when they cannot be
    /// covered by an arc shorter than `π - margin`.
    pub fn hull(arcs: &[ProjectiveArc], margin: f64) -> Option<ProjectiveArc> {
        if arcs.is_empty() || arcs.iter().any(|a| a.is_full()) {
            return None;
        }
        let mut best: Option<(f64, f64)> = None;
        for cand in arcs {
            let s = cand.center - cand.half_width;
            let len = arcs
                .iter()
                .map(|a| (a.center - a.half_width - s).rem_euclid(PI) + 2.0 * a.half_width)
                .fold(0.0, f64::max);
            if best.is_none_or(|(_, l)| len < l) {
                best = Some((s, len));
            }
        }
        let (s, len) = best?;
        (len < PI - margin).then(|| ProjectiveArc::new(s + 0.5 * len, 0.5 * len))
    }
}

// direction as an angle in (-π/2, π/2]
fn raw_direction(v: [f64; 2]) -> f64 {
    let mut t = v[1].atan2(v[0]);
    if t > FRAC_PI_2 {
        t -= PI;
    } else if t <= -FRAC_PI_2 {
        t += PI;
    }
    t
}

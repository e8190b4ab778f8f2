//! Hyperbolic 3-space in the hyperboloid model.
//!
//! Points live on the upper sheet of `<x,x> = -1` in Minkowski space with
//! signature `(-,+,+,+)`; coordinate 0 is the time coordinate. Tangent
//! vectors at `p` are the vectors `v` with `<p,v> = 0`, on which the
//! Minkowski form is positive definite.
//!
//! Distances use `arccosh(-<p,q>)` for well separated points and the
//! chord formula `2 asinh(|p-q| / 2)` for nearby ones, which keeps full
//! relative precision down to lengths of order `1e-12`.

use nalgebra::{Matrix3, Vector3, Vector4};
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance on the hyperboloid and tangent-space constraints.
pub const MODEL_TOL: f64 = 1e-10;
/// Clamping an `acos`/`acosh` argument further than this is reported.
pub const CLAMP_TOL: f64 = 1e-8;
/// Below this separation two points are treated as coincident.
pub const DEGENERATE_DIST: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point is off the hyperboloid: <x,x> + 1 = {residual:e}, x0 = {x0}")]
    InvalidPoint { residual: f64, x0: f64 },
    #[error("vector is not a unit tangent: |<v,v> - 1| = {norm_residual:e}, |<p,v>| = {tangency:e}")]
    InvalidTangent { norm_residual: f64, tangency: f64 },
    #[error("geodesic endpoints coincide (distance {distance:e})")]
    DegenerateEndpoints { distance: f64 },
    #[error("tangent vectors are based at different points")]
    BaseMismatch,
    #[error("point {index} coincides with the base point")]
    CoincidentPoint { index: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("numerical health: {what} argument {value} is outside its domain by more than {CLAMP_TOL:e}")]
    NumericalHealth { what: &'static str, value: f64 },
    #[error("matrix determinant {det} is not 1")]
    NotUnimodular { det: Complex64 },
}

/// Minkowski bilinear form with signature `(-,+,+,+)`.
#[inline]
pub fn minkowski(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// A point of H³ on the upper sheet of the hyperboloid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint(Vector4<f64>);

impl HPoint {
    pub fn new(x: [f64; 4]) -> Result<Self, GeometryError> {
        Self::from_vector(Vector4::from(x))
    }

    pub fn from_vector(x: Vector4<f64>) -> Result<Self, GeometryError> {
        let residual = minkowski(&x, &x) + 1.0;
        // coordinates grow like cosh(distance), so the check is relative
        let scale = x[0] * x[0];
        if !(x[0] > 0.0) || residual.abs() > MODEL_TOL * scale.max(1.0) || !residual.is_finite() {
            return Err(GeometryError::InvalidPoint { residual, x0: x[0] });
        }
        Ok(HPoint(x))
    }

    pub fn origin() -> Self {
        HPoint(Vector4::new(1.0, 0.0, 0.0, 0.0))
    }

    /// Lifts spatial coordinates to the hyperboloid; always valid.
    pub fn from_spatial(s: [f64; 3]) -> Self {
        let n2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
        HPoint(Vector4::new((1.0 + n2).sqrt(), s[0], s[1], s[2]))
    }

    /// Converts the upper-half-space point `(w, t)`, `t > 0`, using the same
    /// Hermitian-matrix convention as [`crate::isometry::Isometry`], so Möbius
    /// maps act compatibly.
    pub fn from_upper_half_space(w: Complex64, t: f64) -> Self {
        let r2 = w.norm_sqr() + t * t;
        Self::from_spatial([w.re / t, w.im / t, (r2 - 1.0) / (2.0 * t)])
    }

    /// Snaps an ambient vector back onto the hyperboloid by recomputing the
    /// time coordinate from the spatial part.
    pub(crate) fn renormalize(x: &Vector4<f64>) -> Self {
        Self::from_spatial([x[1], x[2], x[3]])
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.0[0], self.0[1], self.0[2], self.0[3]]
    }

    pub fn as_vector(&self) -> &Vector4<f64> {
        &self.0
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    fn approx_eq(&self, other: &HPoint) -> bool {
        let scale = self.0[0].max(other.0[0]);
        (self.0 - other.0).amax() <= MODEL_TOL * scale
    }
}

/// A unit tangent vector based at a point of H³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HTangent {
    base: HPoint,
    v: Vector4<f64>,
}

impl HTangent {
    pub fn new(base: HPoint, v: [f64; 4]) -> Result<Self, GeometryError> {
        let v = Vector4::from(v);
        let norm_residual = (minkowski(&v, &v) - 1.0).abs();
        let tangency = minkowski(&base.0, &v).abs();
        let scale = base.0[0];
        if norm_residual > MODEL_TOL * scale || tangency > MODEL_TOL * scale {
            return Err(GeometryError::InvalidTangent { norm_residual, tangency });
        }
        Ok(HTangent { base, v })
    }

    /// Projects `v` to the tangent space at `base` and normalizes it.
    pub fn normalized(base: HPoint, v: Vector4<f64>) -> Option<Self> {
        let w = project_tangent(&base, &v);
        let n2 = minkowski(&w, &w);
        if !(n2 > 0.0) {
            return None;
        }
        Some(HTangent { base, v: w / n2.sqrt() })
    }

    pub fn base(&self) -> &HPoint {
        &self.base
    }

    pub fn vector(&self) -> &Vector4<f64> {
        &self.v
    }
}

/// Orthogonal projection of an ambient vector onto `T_p H³`.
pub fn project_tangent(p: &HPoint, v: &Vector4<f64>) -> Vector4<f64> {
    v + p.0 * minkowski(&p.0, v)
}

/// Norm of a tangent vector (the form is positive definite on `T_p`).
pub fn tangent_norm(v: &Vector4<f64>) -> f64 {
    minkowski(v, v).max(0.0).sqrt()
}

/// Hyperbolic distance.
pub fn dist(p: &HPoint, q: &HPoint) -> f64 {
    let ip = -minkowski(&p.0, &q.0);
    if ip > 2.0 {
        ip.acosh()
    } else {
        let d = p.0 - q.0;
        let chord2 = minkowski(&d, &d).max(0.0);
        2.0 * (0.5 * chord2.sqrt()).asinh()
    }
}

/// Unit tangent at `p` pointing along the geodesic towards `q`.
pub fn tangent_toward(p: &HPoint, q: &HPoint) -> Result<HTangent, GeometryError> {
    let (t, _) = tangent_and_dist(p, q)?;
    Ok(t)
}

/// [`tangent_toward`] together with the distance, sharing the work.
pub fn tangent_and_dist(p: &HPoint, q: &HPoint) -> Result<(HTangent, f64), GeometryError> {
    let d = dist(p, q);
    if d < DEGENERATE_DIST {
        return Err(GeometryError::DegenerateEndpoints { distance: d });
    }
    // q - cosh(d) p, written so that nothing cancels for nearby points
    let diff = q.0 - p.0;
    let chord2 = minkowski(&diff, &diff).max(0.0);
    let w = diff - p.0 * (0.5 * chord2);
    let n = tangent_norm(&w);
    if !(n > 0.0) {
        return Err(GeometryError::DegenerateEndpoints { distance: d });
    }
    Ok((HTangent { base: *p, v: w / n }, d))
}

/// Exponential map: follows the geodesic from `p` with initial velocity `v`
/// (projected onto `T_p` first) for unit time.
pub fn exp_map(p: &HPoint, v: &Vector4<f64>) -> HPoint {
    let v = project_tangent(p, v);
    let n = tangent_norm(&v);
    if n < 1e-300 {
        return *p;
    }
    HPoint::renormalize(&(p.0 * n.cosh() + v * (n.sinh() / n)))
}

/// Point at fraction `t` of the way from `p` to `q` along the geodesic.
pub fn geodesic_point(p: &HPoint, q: &HPoint, t: f64) -> Result<HPoint, GeometryError> {
    let (u, d) = tangent_and_dist(p, q)?;
    Ok(point_along(&u, t * d))
}

/// Point at distance `s` along the ray with initial direction `u`.
pub fn point_along(u: &HTangent, s: f64) -> HPoint {
    HPoint::renormalize(&(u.base.0 * s.cosh() + u.v * s.sinh()))
}

fn clamped_acos(x: f64) -> Result<f64, GeometryError> {
    if x > 1.0 + CLAMP_TOL || x < -1.0 - CLAMP_TOL || !x.is_finite() {
        return Err(GeometryError::NumericalHealth { what: "arccos", value: x });
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Angle in `[0, π]` between two unit tangents at the same base point.
pub fn angle_between(u: &HTangent, w: &HTangent) -> Result<f64, GeometryError> {
    if !u.base.approx_eq(&w.base) {
        return Err(GeometryError::BaseMismatch);
    }
    clamped_acos(minkowski(&u.v, &w.v))
}

/// Angle at `p` of the geodesic triangle `a p b`.
pub fn vertex_angle(p: &HPoint, a: &HPoint, b: &HPoint) -> Result<f64, GeometryError> {
    angle_between(&tangent_toward(p, a)?, &tangent_toward(p, b)?)
}

fn tangents_from(p: &HPoint, qs: &[HPoint]) -> Result<Vec<HTangent>, GeometryError> {
    qs.iter()
        .enumerate()
        .map(|(index, q)| {
            tangent_toward(p, q).map_err(|_| GeometryError::CoincidentPoint { index })
        })
        .collect()
}

/// `Σ_{i<j} cos ∠(Q_i, P, Q_j)`. Always at least `-n/2`, since it equals
/// `(|Σ u_i|² - n) / 2` for the unit directions `u_i`.
pub fn cosine_sum(p: &HPoint, qs: &[HPoint]) -> Result<f64, GeometryError> {
    if qs.len() < 2 {
        return Err(GeometryError::TooFewPoints { needed: 2, got: qs.len() });
    }
    let us = tangents_from(p, qs)?;
    let mut sum = 0.0;
    for i in 0..us.len() {
        for j in i + 1..us.len() {
            sum += minkowski(&us[i].v, &us[j].v);
        }
    }
    Ok(sum)
}

/// The pair of directions at `p` with the smallest angle between them.
/// With four or more directions that angle is at most `arccos(-1/3)`.
pub fn min_angle_pair(p: &HPoint, qs: &[HPoint]) -> Result<(usize, usize, f64), GeometryError> {
    if qs.len() < 4 {
        return Err(GeometryError::TooFewPoints { needed: 4, got: qs.len() });
    }
    let us = tangents_from(p, qs)?;
    min_angle_among(&us)
}

/// Minimal-angle pair among tangents sharing a base point; ties go to the
/// lexicographically first pair.
pub fn min_angle_among(us: &[HTangent]) -> Result<(usize, usize, f64), GeometryError> {
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..us.len() {
        for j in i + 1..us.len() {
            let a = angle_between(&us[i], &us[j])?;
            if a < best.2 {
                best = (i, j, a);
            }
        }
    }
    Ok(best)
}

/// An orthonormal basis of `T_p H³`, obtained by boosting the standard frame.
pub fn tangent_frame(p: &HPoint) -> [Vector4<f64>; 3] {
    let mut frame = [Vector4::zeros(); 3];
    for k in 0..3 {
        let mut v = project_tangent(p, &Vector4::ith(k + 1, 1.0));
        for j in 0..k {
            v -= frame[j] * minkowski(&frame[j], &v);
        }
        frame[k] = v / tangent_norm(&v);
    }
    frame
}

/// Coordinates of a tangent vector in [`tangent_frame`].
pub fn frame_coords(frame: &[Vector4<f64>; 3], v: &Vector4<f64>) -> Vector3<f64> {
    Vector3::new(minkowski(&frame[0], v), minkowski(&frame[1], v), minkowski(&frame[2], v))
}

pub fn from_frame_coords(frame: &[Vector4<f64>; 3], c: &Vector3<f64>) -> Vector4<f64> {
    frame[0] * c[0] + frame[1] * c[1] + frame[2] * c[2]
}

/// Hessian (in frame coordinates) of `x ↦ d(x, q)` at `p`:
/// `coth(d) (I - u uᵀ)` with `u` the unit direction from `p` to `q`.
pub(crate) fn distance_hessian(frame: &[Vector4<f64>; 3], u: &HTangent, d: f64) -> Matrix3<f64> {
    let uc = frame_coords(frame, &u.v);
    (Matrix3::identity() - uc * uc.transpose()) / d.tanh()
}

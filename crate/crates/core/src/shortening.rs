//! The triod shortening move.
//!
//! Two geodesic segments of length `c` leaving a vertex `V` at angle
//! `φ < 2π/3` are replaced by a triod: a new point `S` on the angle bisector,
//! joined to `V` by a leg of length `a` and to both far endpoints by legs of
//! length `b`, all three legs meeting at `2π/3`. Each half of the picture is
//! a triangle with sides `a, b, c`, angle `φ/2` opposite `b` and `2π/3`
//! opposite `c`, so
//!
//! ```text
//! sinh b = B(φ) sinh c,      B(φ) = (2/√3) sin(φ/2)
//! cosh c = cosh a cosh b + ½ sinh a sinh b
//! Sh(c, φ) = 2c - 2b - a
//! ```
//!
//! `Sh` is the length saved by the move.

use std::f64::consts::PI;

use nalgebra::{Vector3, Vector4};
use thiserror::Error;

use crate::hyperbolic::{
    self, dist, distance_hessian, exp_map, frame_coords, from_frame_coords, minkowski,
    tangent_and_dist, tangent_frame, GeometryError, HPoint,
};

/// Angle at which the legs of a Steiner triod meet.
pub const STEINER_ANGLE: f64 = 2.0 * PI / 3.0;

/// `arccos(-1/3)`, the largest possible minimal angle among four directions.
pub fn tetrahedral_angle() -> f64 {
    (-1.0f64 / 3.0).acos()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShorteningError {
    #[error("angle {phi} is outside (0, 2π/3]")]
    AngleOutOfRange { phi: f64 },
    #[error("segment length {c} must be positive and finite")]
    NonPositiveLength { c: f64 },
    #[error("no triod leg a >= 0 exists for b = {b} > c = {c}")]
    NoSolution { b: f64, c: f64 },
    #[error("certification failed: Sh(c)/c = {ratio} < y = {y} at c = {c}")]
    CertificationFailed { c: f64, ratio: f64, y: f64 },
    #[error("triangle angle {angle} at vertex {vertex} is at least 2π/3; the vertex itself minimizes")]
    DegenerateTriod { vertex: usize, angle: f64 },
    #[error("Fermat point search stalled with gradient norm {grad_norm:e}")]
    NotConverged { grad_norm: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Segment length `c` and opening angle `φ` of a shortening move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShorteningInput {
    c: f64,
    phi: f64,
}

impl ShorteningInput {
    pub fn new(c: f64, phi: f64) -> Result<Self, ShorteningError> {
        check_length(c)?;
        check_angle(phi)?;
        Ok(ShorteningInput { c, phi })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

fn check_length(c: f64) -> Result<(), ShorteningError> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(ShorteningError::NonPositiveLength { c });
    }
    Ok(())
}

fn check_angle(phi: f64) -> Result<(), ShorteningError> {
    if !(phi > 0.0 && phi <= STEINER_ANGLE) {
        return Err(ShorteningError::AngleOutOfRange { phi });
    }
    Ok(())
}

/// Legs of the triod and the resulting gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriodSolution {
    pub a: f64,
    pub b: f64,
    pub gain: f64,
}

impl TriodSolution {
    pub fn residual(&self, c: f64) -> f64 {
        law_of_cosines_residual(self.a, self.b, c)
    }
}

/// `cosh c - (cosh a cosh b + ½ sinh a sinh b)`: the law of cosines with
/// the angle opposite `c` equal to `2π/3`.
pub fn law_of_cosines_residual(a: f64, b: f64, c: f64) -> f64 {
    c.cosh() - (a.cosh() * b.cosh() + 0.5 * a.sinh() * b.sinh())
}

/// `B(φ) = (2/√3) sin(φ/2)`, which is 1 at `φ = 2π/3`.
pub fn b_factor(phi: f64) -> f64 {
    if phi >= STEINER_ANGLE {
        1.0
    } else {
        (2.0 / 3f64.sqrt() * (phi / 2.0).sin()).min(1.0)
    }
}

/// Leg `b` from the law of sines: `sinh b = B(φ) sinh c`.
pub fn solve_b(c: f64, phi: f64) -> Result<f64, ShorteningError> {
    check_length(c)?;
    check_angle(phi)?;
    if phi == STEINER_ANGLE {
        return Ok(c);
    }
    Ok((b_factor(phi) * c.sinh()).asinh())
}

/// Leg `a >= 0` solving `cosh c = cosh a cosh b + ½ sinh a sinh b`.
///
/// Substituting `t = tanh(a/2)` turns the equation into a quadratic whose
/// nonnegative root is taken in cancellation-free form and polished by
/// Newton steps; bisection on `[0, c]` takes over if the residual is not
/// small enough afterwards.
pub fn solve_a(c: f64, b: f64) -> Result<f64, ShorteningError> {
    check_length(c)?;
    if !(b >= 0.0) || b > c * (1.0 + 1e-12) {
        return Err(ShorteningError::NoSolution { b, c });
    }
    if b >= c {
        return Ok(0.0);
    }
    let (cb, sb, cc) = (b.cosh(), b.sinh(), c.cosh());
    let gap = 2.0 * (0.5 * (c + b)).sinh() * (0.5 * (c - b)).sinh(); // cosh c - cosh b
    let disc = (4.0 * cc * cc - 3.0 * cb * cb - 1.0).max(0.0);
    let t = 2.0 * gap / (sb + disc.sqrt());
    let mut a = 2.0 * t.min(1.0 - f64::EPSILON).atanh();

    let f = |a: f64| a.cosh() * cb + 0.5 * a.sinh() * sb - cc;
    for _ in 0..2 {
        let df = a.sinh() * cb + 0.5 * a.cosh() * sb;
        if df > 0.0 {
            let next = a - f(a) / df;
            if next >= 0.0 && next <= c {
                a = next;
            }
        }
    }
    if f(a).abs() > 1e-12 * cc || !a.is_finite() {
        a = bisect_increasing(f, 0.0, c);
    }
    Ok(a)
}

fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves the triod for `(c, φ)` and reports the gain `Sh = 2c - 2b - a`.
pub fn sh_gain(input: ShorteningInput) -> Result<TriodSolution, ShorteningError> {
    let c = input.c;
    let b = solve_b(c, input.phi)?;
    let a = solve_a(c, b)?;
    Ok(TriodSolution { a, b, gain: 2.0 * c - 2.0 * b - a })
}

/// Shorthand for `sh_gain(ShorteningInput::new(c, phi)?).gain`.
pub fn sh(c: f64, phi: f64) -> Result<f64, ShorteningError> {
    Ok(sh_gain(ShorteningInput::new(c, phi)?)?.gain)
}

/// `da/db` along the curve `cosh c = const`, from implicit differentiation.
pub fn da_db(a: f64, b: f64) -> f64 {
    let (ca, sa, cb, sb) = (a.cosh(), a.sinh(), b.cosh(), b.sinh());
    -(ca * sb + 0.5 * sa * cb) / (sa * cb + 0.5 * ca * sb)
}

/// `lim_{c→0} Sh(c, φ)/c = 2 - (3/2)B - (1/2)sqrt(4 - 3B²)`.
pub fn sh_derivative_at_zero(phi: f64) -> Result<f64, ShorteningError> {
    check_angle(phi)?;
    let b = b_factor(phi);
    Ok(2.0 - 1.5 * b - 0.5 * (4.0 - 3.0 * b * b).sqrt())
}

/// Constants `(y, c₀, z, s₀)` with `Sh(c, φ₀)/c >= y` for all `c <= c₀`,
/// `z = 1/y` and `s₀ = c₀/z`. Then `s < s₀` and `c/s > z` imply `Sh(c) > s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShorteningConstants {
    pub phi0: f64,
    pub y: f64,
    pub c0: f64,
    pub z: f64,
    pub s0: f64,
}

/// Upper end of the search range for `c₀`.
pub const C0_CAP: f64 = 10.0;
/// Grid size of the `c₀` search and of its certification scan.
pub const CERT_GRID: usize = 10_000;

/// Chooses `y` as half the slope of `Sh` at zero and certifies the largest
/// `c₀ <= 10` with `Sh(c)/c >= y` on a dense grid of `(0, c₀]`.
pub fn compute_constants(phi0: f64) -> Result<ShorteningConstants, ShorteningError> {
    check_angle(phi0)?;
    if phi0 >= STEINER_ANGLE {
        return Err(ShorteningError::AngleOutOfRange { phi: phi0 });
    }
    let y = 0.5 * sh_derivative_at_zero(phi0)?;
    let ratio = |c: f64| sh(c, phi0).map(|g| g / c);

    let step = C0_CAP / CERT_GRID as f64;
    let mut c0 = C0_CAP;
    let mut prev = 0.0;
    for i in 1..=CERT_GRID {
        let c = step * i as f64;
        if ratio(c)? < y {
            // first failing grid point; bisect the crossing from the left
            let (mut lo, mut hi) = (prev, c);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if ratio(mid)? >= y {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            c0 = lo;
            break;
        }
        prev = c;
    }
    if !(c0 > 0.0) {
        return Err(ShorteningError::CertificationFailed { c: step, ratio: ratio(step)?, y });
    }
    certify_ratio(phi0, y, c0)?;
    Ok(ShorteningConstants { phi0, y, c0, z: 1.0 / y, s0: c0 * y })
}

/// Checks `Sh(c, φ₀)/c >= y` at `CERT_GRID` evenly spaced points of `(0, c₀]`.
pub fn certify_ratio(phi0: f64, y: f64, c0: f64) -> Result<(), ShorteningError> {
    for j in 1..=CERT_GRID {
        let c = c0 * j as f64 / CERT_GRID as f64;
        let r = sh(c, phi0)? / c;
        if r < y {
            return Err(ShorteningError::CertificationFailed { c, ratio: r, y });
        }
    }
    Ok(())
}

/// The point minimizing the sum of distances to three points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermatPoint {
    pub point: HPoint,
    /// Index of the triangle vertex that is itself the minimizer, when its
    /// angle is at least `2π/3`.
    pub at_vertex: Option<usize>,
    pub iterations: usize,
}

const FERMAT_TOL: f64 = 1e-12;
const FERMAT_MAX_ITER: usize = 200;

/// Fermat point of the triangle `pts` in H³.
///
/// In the nondegenerate case the minimizer is found by Newton-preconditioned
/// Riemannian descent started at the normalized centroid. The objective is
/// strictly convex on the plane of the triangle and the gradient never leaves
/// that plane, so the iteration stays on it.
pub fn fermat_point(pts: [HPoint; 3]) -> Result<FermatPoint, ShorteningError> {
    for i in 0..3 {
        let angle = hyperbolic::vertex_angle(&pts[i], &pts[(i + 1) % 3], &pts[(i + 2) % 3])?;
        if angle >= STEINER_ANGLE {
            return Ok(FermatPoint { point: pts[i], at_vertex: Some(i), iterations: 0 });
        }
    }

    let sum: Vector4<f64> = pts.iter().map(|p| p.as_vector()).sum();
    let mut x = HPoint::from_vector(sum / (-minkowski(&sum, &sum)).sqrt())
        .unwrap_or_else(|_| HPoint::origin());
    let objective = |x: &HPoint| pts.iter().map(|p| dist(x, p)).sum::<f64>();

    let mut grad_norm = f64::INFINITY;
    for it in 0..FERMAT_MAX_ITER {
        let frame = tangent_frame(&x);
        let mut grad = Vector3::zeros();
        let mut hess = nalgebra::Matrix3::zeros();
        for p in &pts {
            let (u, d) = tangent_and_dist(&x, p)?;
            grad -= frame_coords(&frame, u.vector());
            hess += distance_hessian(&frame, &u, d);
        }
        grad_norm = grad.norm();
        if grad_norm < FERMAT_TOL {
            return Ok(FermatPoint { point: x, at_vertex: None, iterations: it });
        }
        let mut dir = hess.lu().solve(&(-grad)).unwrap_or(-grad);
        if dir.dot(&grad) >= 0.0 {
            dir = -grad;
        }
        let f0 = objective(&x);
        let slope = dir.dot(&grad);
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-14 {
            let cand = exp_map(&x, &from_frame_coords(&frame, &(dir * t)));
            // roundoff slack lets the last Newton steps through
            if objective(&cand) <= f0 + 1e-4 * t * slope + 4.0 * f64::EPSILON * f0 {
                x = cand;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if grad_norm < 1e-10 {
        return Ok(FermatPoint { point: x, at_vertex: None, iterations: FERMAT_MAX_ITER });
    }
    Err(ShorteningError::NotConverged { grad_norm })
}

/// Geometric realization of the move: the Steiner point of the triangle
/// `p1 v p2` and the legs `a = d(S, v)`, `b1 = d(S, p1)`, `b2 = d(S, p2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriodRealization {
    pub steiner: HPoint,
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Realizes the triod replacing the segments `v p1` and `v p2`.
///
/// Fails with [`ShorteningError::DegenerateTriod`] when some angle of the
/// triangle is at least `2π/3` (vertex index 0 is `p1`, 1 is `p2`, 2 is
/// `v`); [`fermat_point`] returns that vertex as the minimizer instead.
pub fn realize_triod(p1: &HPoint, p2: &HPoint, v: &HPoint) -> Result<TriodRealization, ShorteningError> {
    let pts = [*p1, *p2, *v];
    let fp = fermat_point(pts)?;
    if let Some(vertex) = fp.at_vertex {
        let angle = hyperbolic::vertex_angle(
            &pts[vertex],
            &pts[(vertex + 1) % 3],
            &pts[(vertex + 2) % 3],
        )?;
        return Err(ShorteningError::DegenerateTriod { vertex, angle });
    }
    let s = fp.point;
    Ok(TriodRealization { steiner: s, a: dist(&s, v), b1: dist(&s, p1), b2: dist(&s, p2) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{point_along, tangent_toward, HTangent};
    use crate::isometry::Isometry;

    /// Segments of length c at angle φ from the origin, in the x1-x2 plane.
    fn symmetric_config(c: f64, phi: f64) -> (HPoint, HPoint, HPoint) {
        let v = HPoint::origin();
        let ray = |th: f64| HTangent::new(v, [0.0, th.cos(), th.sin(), 0.0]).unwrap();
        (point_along(&ray(phi / 2.0), c), point_along(&ray(-phi / 2.0), c), v)
    }

    #[test]
    fn b_at_the_fixed_angle_equals_c() {
        for c in [0.01, 1.0, 4.0] {
            assert_eq!(solve_b(c, STEINER_ANGLE).unwrap(), c);
            let sol = sh_gain(ShorteningInput::new(c, STEINER_ANGLE).unwrap()).unwrap();
            assert_eq!(sol.a, 0.0);
            assert_eq!(sol.gain, 0.0);
        }
    }

    #[test]
    fn b_closed_form_at_right_angle() {
        let b = solve_b(1.0, PI / 2.0).unwrap();
        let expect = ((2.0f64 / 3.0).sqrt() * 1f64.sinh()).asinh();
        assert!((b - expect).abs() < 1e-15);
        assert!(solve_b(1.0, 1e-9).unwrap() < 1e-8);
    }

    #[test]
    fn input_domain() {
        assert!(matches!(ShorteningInput::new(1.0, 2.2), Err(ShorteningError::AngleOutOfRange { .. })));
        assert!(matches!(ShorteningInput::new(1.0, 0.0), Err(ShorteningError::AngleOutOfRange { .. })));
        assert!(matches!(ShorteningInput::new(-1.0, 1.0), Err(ShorteningError::NonPositiveLength { .. })));
        assert!(matches!(solve_a(1.0, 1.5), Err(ShorteningError::NoSolution { .. })));
        assert!(matches!(compute_constants(STEINER_ANGLE), Err(ShorteningError::AngleOutOfRange { .. })));
    }

    #[test]
    fn solve_a_residual_and_monotonicity() {
        for c in [1e-3, 0.3, 1.0, 3.0, 5.0, 20.0] {
            let mut prev = f64::INFINITY;
            for k in 0..=50 {
                let b = c * k as f64 / 50.0;
                let a = solve_a(c, b).unwrap();
                assert!(law_of_cosines_residual(a, b, c).abs() < 1e-10 * c.cosh().max(1.0));
                assert!(a < prev, "a must decrease in b");
                prev = a;
            }
            assert_eq!(solve_a(c, c).unwrap(), 0.0);
        }
    }

    #[test]
    fn triangle_oracle_for_right_angle_case() {
        // measure legs on the constructed configuration
        let (p1, p2, v) = symmetric_config(1.0, PI / 2.0);
        let sol = sh_gain(ShorteningInput::new(1.0, PI / 2.0).unwrap()).unwrap();
        let axis = HTangent::new(v, [0.0, 1.0, 0.0, 0.0]).unwrap();
        let s = point_along(&axis, sol.a);
        assert!((dist(&s, &p1) - sol.b).abs() < 1e-12);
        assert!((dist(&s, &p2) - sol.b).abs() < 1e-12);
        let at_s = |q: &HPoint| tangent_toward(&s, q).unwrap();
        let ang = hyperbolic::angle_between(&at_s(&p1), &at_s(&v)).unwrap();
        assert!((ang - STEINER_ANGLE).abs() < 1e-10);
    }

    #[test]
    fn gain_matches_apex_minimization() {
        // 1-D golden-section search of 2 d(S, P1) + d(S, V) over S on the bisector
        let phi = tetrahedral_angle();
        let c = 1.0;
        let (p1, p2, v) = symmetric_config(c, phi);
        let axis = HTangent::new(v, [0.0, 1.0, 0.0, 0.0]).unwrap();
        let cost = |s: f64| {
            let x = point_along(&axis, s);
            dist(&x, &p1) + dist(&x, &p2) + s
        };
        let (mut lo, mut hi) = (0.0, c);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if cost(m1) < cost(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        let best = cost(0.5 * (lo + hi));
        let sol = sh_gain(ShorteningInput::new(c, phi).unwrap()).unwrap();
        assert!(sol.gain > 0.0);
        assert!((2.0 * c - best - sol.gain).abs() < 1e-10);
    }

    #[test]
    fn derivative_at_zero_closed_form() {
        assert!(sh_derivative_at_zero(STEINER_ANGLE).unwrap().abs() < 1e-15);
        assert!((sh_derivative_at_zero(1e-12).unwrap() - 1.0).abs() < 1e-9);
        let phi = tetrahedral_angle();
        let h = 1e-3;
        let d = |h: f64| sh(h, phi).unwrap() / h;
        let richardson = (4.0 * d(h / 2.0) - d(h)) / 3.0;
        assert!((richardson - sh_derivative_at_zero(phi).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn implicit_derivative_matches_finite_differences() {
        for c in [0.5, 2.0, 4.0] {
            for k in 1..10 {
                let b = c * k as f64 / 10.0;
                let h = 1e-6;
                let fd = (solve_a(c, b + h).unwrap() - solve_a(c, b - h).unwrap()) / (2.0 * h);
                let a = solve_a(c, b).unwrap();
                assert!((fd - da_db(a, b)).abs() < 1e-6, "c={c} b={b}");
                assert!(da_db(a, b) > -2.0);
            }
        }
    }

    #[test]
    fn constants_for_tetrahedral_angle() {
        let k = compute_constants(tetrahedral_angle()).unwrap();
        assert!((k.y - 0.5 * sh_derivative_at_zero(k.phi0).unwrap()).abs() < 1e-18);
        assert!((k.z * k.y - 1.0).abs() < 1e-12);
        assert!((k.s0 - k.c0 / k.z).abs() < 1e-12 * k.s0);
        assert!(k.c0 > 0.0 && k.c0 <= C0_CAP);
        certify_ratio(k.phi0, k.y, k.c0).unwrap();
    }

    #[test]
    fn realized_triod_has_steiner_angles() {
        let (p1, p2, v) = symmetric_config(1.3, 1.4);
        let t = realize_triod(&p1, &p2, &v).unwrap();
        let us: Vec<_> = [p1, p2, v].iter().map(|q| tangent_toward(&t.steiner, q).unwrap()).collect();
        for i in 0..3 {
            for j in i + 1..3 {
                let ang = hyperbolic::angle_between(&us[i], &us[j]).unwrap();
                assert!((ang - STEINER_ANGLE).abs() < 1e-8);
            }
        }
        let sol = sh_gain(ShorteningInput::new(1.3, 1.4).unwrap()).unwrap();
        assert!((t.a - sol.a).abs() < 1e-8);
        assert!((t.b1 - sol.b).abs() < 1e-8 && (t.b2 - sol.b).abs() < 1e-8);
    }

    #[test]
    fn equilateral_triod_is_centered() {
        let v = HPoint::origin();
        let pts: Vec<HPoint> = (0..3)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / 3.0;
                point_along(&HTangent::new(v, [0.0, th.cos(), th.sin(), 0.0]).unwrap(), 0.9)
            })
            .collect();
        let t = realize_triod(&pts[0], &pts[1], &pts[2]).unwrap();
        assert!(dist(&t.steiner, &v) < 1e-10);
        assert!((t.b1 - t.b2).abs() < 1e-10 && (t.a - t.b1).abs() < 1e-10);
    }

    #[test]
    fn triod_realization_is_equivariant() {
        let (p1, p2, v) = symmetric_config(0.8, 1.1);
        let p2 = point_along(&tangent_toward(&v, &p2).unwrap(), 1.7);
        let g = Isometry::loxodromic_along_x3(0.9, 1.2).compose(&Isometry::rotation_x1(0.7));
        let t = realize_triod(&p1, &p2, &v).unwrap();
        let tg = realize_triod(&g.apply(&p1), &g.apply(&p2), &g.apply(&v)).unwrap();
        assert!(dist(&tg.steiner, &g.apply(&t.steiner)) < 1e-8);
    }

    #[test]
    fn obtuse_triangle_degenerates_to_vertex() {
        let (p1, p2, v) = symmetric_config(1.0, 2.5);
        match realize_triod(&p1, &p2, &v) {
            Err(ShorteningError::DegenerateTriod { vertex, angle }) => {
                assert_eq!(vertex, 2);
                assert!((angle - 2.5).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        let fp = fermat_point([p1, p2, v]).unwrap();
        assert_eq!(fp.at_vertex, Some(2));
        assert_eq!(fp.point, v);
    }
}

//! Orientation-preserving isometries of H³ given as `SL(2, C)` matrices.
//!
//! A point `x` of the hyperboloid corresponds to the Hermitian matrix
//!
//! ```text
//! H(x) = [ x0 + x3    x1 + i x2 ]
//!        [ x1 - i x2  x0 - x3   ]      det H(x) = -<x,x>
//! ```
//!
//! and `A ∈ SL(2, C)` acts by `H ↦ A H A*`. The induced linear map on
//! Minkowski space is computed once per isometry and cached as a 4×4 real
//! matrix in `SO⁺(3,1)`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::hyperbolic::{GeometryError, HPoint};

const DET_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Loxodromic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    m: Matrix2<Complex64>,
    lorentz: Matrix4<f64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hermitian(x: &Vector4<f64>) -> Matrix2<Complex64> {
    Matrix2::new(c(x[0] + x[3], 0.0), c(x[1], x[2]), c(x[1], -x[2]), c(x[0] - x[3], 0.0))
}

fn unhermitian(h: &Matrix2<Complex64>) -> Vector4<f64> {
    Vector4::new(
        0.5 * (h[(0, 0)].re + h[(1, 1)].re),
        h[(0, 1)].re,
        h[(0, 1)].im,
        0.5 * (h[(0, 0)].re - h[(1, 1)].re),
    )
}

fn lorentz_of(m: &Matrix2<Complex64>) -> Matrix4<f64> {
    let adj = m.adjoint();
    let mut out = Matrix4::zeros();
    for j in 0..4 {
        let image = unhermitian(&(m * hermitian(&Vector4::ith(j, 1.0)) * adj));
        out.set_column(j, &image);
    }
    out
}

impl Isometry {
    /// Builds an isometry from a determinant-one matrix.
    pub fn new(m: Matrix2<Complex64>) -> Result<Self, GeometryError> {
        let det = m.determinant();
        let scale = m.iter().map(|z| z.norm_sqr()).fold(1.0, f64::max);
        if (det - c(1.0, 0.0)).norm() > DET_TOL * scale {
            return Err(GeometryError::NotUnimodular { det });
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    /// Rescales a nonsingular matrix by `1/sqrt(det)`.
    pub fn from_unnormalized(m: Matrix2<Complex64>) -> Result<Self, GeometryError> {
        let det = m.determinant();
        if det.norm() == 0.0 || !det.is_finite() {
            return Err(GeometryError::NotUnimodular { det });
        }
        Ok(Self::from_matrix_unchecked(m / det.sqrt()))
    }

    fn from_matrix_unchecked(m: Matrix2<Complex64>) -> Self {
        Isometry { m, lorentz: lorentz_of(&m) }
    }

    pub fn identity() -> Self {
        Self::from_matrix_unchecked(Matrix2::identity())
    }

    /// Translation by `tau` along the geodesic `0 → ∞` (the `x3` axis),
    /// combined with a rotation by `twist` about it.
    pub fn loxodromic_along_x3(tau: f64, twist: f64) -> Self {
        let l = c(tau / 2.0, twist / 2.0).exp();
        Self::from_matrix_unchecked(Matrix2::new(l, c(0.0, 0.0), c(0.0, 0.0), l.inv()))
    }

    /// Rotation by `theta` about the geodesic `-1 → 1` (the `x1` axis).
    pub fn rotation_x1(theta: f64) -> Self {
        let (s, co) = (theta / 2.0).sin_cos();
        Self::from_matrix_unchecked(Matrix2::new(c(co, 0.0), c(0.0, s), c(0.0, s), c(co, 0.0)))
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.m
    }

    pub fn mat4(&self) -> &Matrix4<f64> {
        &self.lorentz
    }

    pub fn apply(&self, p: &HPoint) -> HPoint {
        HPoint::renormalize(&(self.lorentz * p.as_vector()))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Self::from_matrix_unchecked(self.m * other.m)
    }

    pub fn inverse(&self) -> Isometry {
        let m = &self.m;
        Self::from_matrix_unchecked(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]))
    }

    pub fn trace(&self) -> Complex64 {
        self.m[(0, 0)] + self.m[(1, 1)]
    }

    pub fn kind(&self) -> IsometryKind {
        let t = self.trace();
        let tol = 1e-12 * t.norm().max(1.0);
        if t.im.abs() <= tol && t.re.abs() <= 2.0 + tol {
            if (t.re.abs() - 2.0).abs() <= tol {
                let off = self.m[(0, 1)].norm() + self.m[(1, 0)].norm()
                    + (self.m[(0, 0)] - self.m[(1, 1)]).norm();
                if off <= 1e-12 {
                    IsometryKind::Identity
                } else {
                    IsometryKind::Parabolic
                }
            } else {
                IsometryKind::Elliptic
            }
        } else {
            IsometryKind::Loxodromic
        }
    }

    /// Real translation length `2 |Re arccosh(tr/2)|`; zero unless loxodromic.
    pub fn translation_length(&self) -> f64 {
        let half = self.trace() / 2.0;
        (2.0 * half.acosh().re).abs()
    }

    /// The two fixed points on the sphere at infinity; `None` stands for `∞`.
    pub fn fixed_points(&self) -> [Option<Complex64>; 2] {
        let (a, b, cc, d) = (self.m[(0, 0)], self.m[(0, 1)], self.m[(1, 0)], self.m[(1, 1)]);
        let scale = a.norm().max(d.norm()).max(1.0);
        if cc.norm() <= 1e-14 * scale {
            let denom = d - a;
            if denom.norm() <= 1e-14 * scale {
                return [None, None];
            }
            return [None, Some(b / denom)];
        }
        let disc = ((a + d) * (a + d) - 4.0).sqrt();
        [Some((a - d + disc) / (2.0 * cc)), Some((a - d - disc) / (2.0 * cc))]
    }

    /// A point on the translation axis of a loxodromic element.
    pub fn axis_point(&self) -> Option<HPoint> {
        if self.kind() != IsometryKind::Loxodromic {
            return None;
        }
        match self.fixed_points() {
            [Some(z1), Some(z2)] => {
                let r = (z1 - z2).norm() / 2.0;
                Some(HPoint::from_upper_half_space((z1 + z2) / 2.0, r))
            }
            [None, Some(z)] | [Some(z), None] => Some(HPoint::from_upper_half_space(z, 1.0)),
            [None, None] => None,
        }
    }

    /// Largest entry of `Lᵀ J L - J`.
    pub fn lorentz_defect(&self) -> f64 {
        let j = Matrix4::from_diagonal(&Vector4::new(-1.0, 1.0, 1.0, 1.0));
        (self.lorentz.transpose() * j * self.lorentz - j).amax()
    }
}

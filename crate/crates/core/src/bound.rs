//! The explicit edge-length bound `l(r, k)`.
//!
//! With `(z, s₀)` the shortening constants at `φ₀ = arccos(-1/3)` and `m`
//! chosen so that `(m - 2) / (2(4k - 5)) > z`,
//!
//! ```text
//! l = min{ s₀ / ((4k-5)(m+1)^(2k-4)),  r / (m+1)^(3k-4) }
//! ```
//!
//! In a minimal length carrier graph of rank `k` whose circuits are all
//! longer than `r`, no edge is shorter than `l`.

use std::fmt::Write as _;
use std::sync::OnceLock;

use thiserror::Error;

use crate::format::fmt17;
use crate::graph::{girth, GraphError, MetricGraph};
use crate::shortening::{compute_constants, tetrahedral_angle, ShorteningConstants, ShorteningError};

/// Relative slack allowed when re-checking certificate inequalities.
pub const RECHECK_SLACK: f64 = 1e-12;
/// Grid step for the choice of `m`.
pub const M_GRID: f64 = 1e-6;
/// Added on top of the grid value of `m`.
pub const M_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("rank k = {0} must be at least 2")]
    RankTooSmall(i64),
    #[error("circuit bound r = {0} must be positive and finite")]
    BadRadius(f64),
    #[error("graph has rank {graph} but the certificate is for rank {cert}")]
    RankMismatch { graph: i64, cert: i64 },
    #[error(transparent)]
    Shortening(#[from] ShorteningError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The full constant chain for one `(r, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCertificate {
    pub k: i64,
    pub r: f64,
    pub constants: ShorteningConstants,
    pub m: f64,
    pub l: f64,
}

/// Which inequalities of a certificate hold on re-evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateCheck {
    pub m_condition: bool,
    pub s0_branch: bool,
    pub r_branch: bool,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.m_condition && self.s0_branch && self.r_branch
    }
}

impl BoundCertificate {
    /// Re-evaluates the three inequalities from the stored numbers alone.
    pub fn verify(&self) -> CertificateCheck {
        let k = self.k;
        let m1 = self.m + 1.0;
        let c = &self.constants;
        let slope = 4 * k - 5;
        CertificateCheck {
            m_condition: 0.5 * (self.m - 2.0) / slope as f64 > c.z,
            s0_branch: slope as f64 * self.l * m1.powi((2 * k - 4) as i32) <= c.s0 * (1.0 + RECHECK_SLACK),
            r_branch: self.l * m1.powi((3 * k - 4) as i32) <= self.r * (1.0 + RECHECK_SLACK),
        }
    }

    /// JSON object with every field at 17 significant digits.
    pub fn to_json(&self) -> String {
        let c = &self.constants;
        let mut out = String::from("{\n");
        let fields = [
            ("k", self.k.to_string()),
            ("r", fmt17(self.r)),
            ("phi0", fmt17(c.phi0)),
            ("y", fmt17(c.y)),
            ("c0", fmt17(c.c0)),
            ("z", fmt17(c.z)),
            ("s0", fmt17(c.s0)),
            ("m", fmt17(self.m)),
            ("l", fmt17(self.l)),
        ];
        for (i, (key, val)) in fields.iter().enumerate() {
            let sep = if i + 1 < fields.len() { "," } else { "" };
            writeln!(out, "  \"{key}\": {val}{sep}").unwrap();
        }
        out.push('}');
        out
    }
}

/// Smallest `m` on the `1e-6` grid with `(m - 2) / (2(4k - 5)) > z`, plus a
/// `1e-9` margin.
pub fn choose_m(k: i64, z: f64) -> f64 {
    let slope = (4 * k - 5) as f64;
    let holds = |m: f64| 0.5 * (m - 2.0) / slope > z;
    let threshold = 2.0 + 2.0 * slope * z;
    let mut n = (threshold / M_GRID).floor();
    while !holds(n * M_GRID) {
        n += 1.0;
    }
    while n > 0.0 && holds((n - 1.0) * M_GRID) {
        n -= 1.0;
    }
    n * M_GRID + M_MARGIN
}

/// Shortening constants at the default angle, computed once per process.
pub fn default_constants() -> Result<ShorteningConstants, ShorteningError> {
    static CACHE: OnceLock<Result<ShorteningConstants, ShorteningError>> = OnceLock::new();
    CACHE.get_or_init(|| compute_constants(tetrahedral_angle())).clone()
}

/// Certificate for `(r, k)` at `φ₀ = arccos(-1/3)`.
pub fn compute_l(r: f64, k: i64) -> Result<BoundCertificate, BoundError> {
    check_inputs(r, k)?;
    compute_l_with(r, k, default_constants()?)
}

/// Certificate for `(r, k)` using precomputed (or overridden) constants.
pub fn compute_l_with(r: f64, k: i64, constants: ShorteningConstants) -> Result<BoundCertificate, BoundError> {
    check_inputs(r, k)?;
    let m = choose_m(k, constants.z);
    let m1 = m + 1.0;
    let s0_branch = constants.s0 / ((4 * k - 5) as f64 * m1.powi((2 * k - 4) as i32));
    let r_branch = r / m1.powi((3 * k - 4) as i32);
    Ok(BoundCertificate { k, r, constants, m, l: s0_branch.min(r_branch) })
}

fn check_inputs(r: f64, k: i64) -> Result<(), BoundError> {
    if k < 2 {
        return Err(BoundError::RankTooSmall(k));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(BoundError::BadRadius(r));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Some circuit has length at most `r`; nothing to check.
    Vacuous,
    /// All circuits longer than `r` and all edges at least `l`.
    Consistent,
    /// All circuits longer than `r` but some edge shorter than `l`.
    Violation,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Vacuous => "vacuous",
            Verdict::Consistent => "consistent",
            Verdict::Violation => "VIOLATION",
        }
    }
}

/// Checks the implication "girth > r ⟹ every edge >= l" on one graph.
pub fn verify_theorem_instance(x: &MetricGraph, cert: &BoundCertificate) -> Result<Verdict, BoundError> {
    if x.rank() != cert.k {
        return Err(BoundError::RankMismatch { graph: x.rank(), cert: cert.k });
    }
    if girth(x)?.length <= cert.r {
        return Ok(Verdict::Vacuous);
    }
    Ok(if x.min_edge_length() >= cert.l { Verdict::Consistent } else { Verdict::Violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{dumbbell, theta};

    #[test]
    fn m_for_unit_z() {
        let m2 = choose_m(2, 1.0);
        assert!(m2 > 8.0 && m2 < 8.0 + 2e-6);
        let m3 = choose_m(3, 1.0);
        assert!(m3 > 16.0 && m3 < 16.0 + 2e-6);
        for (k, z) in [(2, 237.3), (4, 0.013), (5, 1234.5678)] {
            let m = choose_m(k, z);
            let slope = (4 * k - 5) as f64;
            assert!(0.5 * (m - 2.0) / slope > z);
            assert!(!(0.5 * (m - 1e-5 - 2.0) / slope > z));
        }
    }

    #[test]
    fn rank_two_exponents_collapse() {
        let cert = compute_l(1.0, 2).unwrap();
        let c = cert.constants;
        let expect = (c.s0 / 3.0).min(1.0 / (cert.m + 1.0).powi(2));
        assert_eq!(cert.l, expect);
        assert!(cert.verify().passed());
    }

    #[test]
    fn domain_errors() {
        assert_eq!(compute_l(1.0, 1), Err(BoundError::RankTooSmall(1)));
        assert_eq!(compute_l(0.0, 2), Err(BoundError::BadRadius(0.0)));
        assert_eq!(compute_l(f64::NAN, 2).unwrap_err().to_string(), "circuit bound r = NaN must be positive and finite");
    }

    #[test]
    fn corrupted_certificate_fails_verification() {
        let mut cert = compute_l(1.0, 3).unwrap();
        cert.l *= 2.0;
        let check = cert.verify();
        assert!(check.m_condition);
        assert!(!check.r_branch || !check.s0_branch);
        let mut cert = compute_l(1.0, 3).unwrap();
        cert.m = 2.0;
        assert!(!cert.verify().m_condition);
    }

    #[test]
    fn theorem_instances() {
        let cert = compute_l(1.0, 2).unwrap();
        assert_eq!(verify_theorem_instance(&theta([10.0; 3]), &cert), Ok(Verdict::Consistent));
        assert_eq!(verify_theorem_instance(&dumbbell(0.5, 3.0, 2.0), &cert), Ok(Verdict::Vacuous));
        let tiny = cert.l / 2.0;
        assert_eq!(verify_theorem_instance(&theta([10.0, 10.0, tiny]), &cert), Ok(Verdict::Violation));
        let cert3 = compute_l(1.0, 3).unwrap();
        assert!(matches!(
            verify_theorem_instance(&theta([1.0; 3]), &cert3),
            Err(BoundError::RankMismatch { graph: 2, cert: 3 })
        ));
    }
}

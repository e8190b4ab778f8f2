//! Randomized and grid-based property suites for the lemmas.
//!
//! Each suite counts its checks and keeps the first counterexample. The
//! gain function is injectable so that a deliberately wrong `Sh` can be fed
//! to the suites that depend on it.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bound::compute_l;
use crate::format::fmt17;
use crate::graph::random::{random_connected_graph, random_length, random_tree_subgraph, random_trivalent};
use crate::graph::{collapse_tree, find_small_subgraph};
use crate::hyperbolic::{cosine_sum, min_angle_pair, HPoint};
use crate::shortening::{
    certify_ratio, compute_constants, da_db, law_of_cosines_residual, sh_derivative_at_zero, sh_gain, tetrahedral_angle,
    ShorteningInput, STEINER_ANGLE,
};

/// `Sh(c, φ)` as seen by the suites.
pub type GainFn = dyn Fn(f64, f64) -> f64 + Sync;

/// The genuine gain.
pub fn true_gain(c: f64, phi: f64) -> f64 {
    ShorteningInput::new(c, phi).and_then(sh_gain).map(|s| s.gain).unwrap_or(f64::NAN)
}

/// A gain with a small quadratic defect: no longer increasing in `c` for
/// angles close to `2π/3`. Used to check that the suites notice.
pub fn corrupted_gain(c: f64, phi: f64) -> f64 {
    true_gain(c, phi) - 1e-6 * c * c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    /// Points per axis of the `(c, φ)` grid.
    pub grid: usize,
    /// Random trials per randomized suite.
    pub trials: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { grid: 200, trials: 10_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, checks: 0, failures: 0, counterexample: None }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub suites: Vec<SuiteResult>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let verdict = if s.passed() { "pass" } else { "FAIL" };
            writeln!(out, "{:<22} {verdict}  checks={} failures={}", s.name, s.checks, s.failures).unwrap();
            if let Some(c) = &s.counterexample {
                writeln!(out, "  counterexample: {c}").unwrap();
            }
        }
        writeln!(out, "overall: {}", if self.passed() { "pass" } else { "FAIL" }).unwrap();
        out
    }
}

/// Grid `(0, 5] × (0, 2π/3]` with `n` points per axis, endpoints included.
pub fn shortening_grid(n: usize) -> (Vec<f64>, Vec<f64>) {
    let cs = (1..=n).map(|i| 5.0 * i as f64 / n as f64).collect();
    let phis = (1..=n).map(|j| STEINER_ANGLE * j as f64 / n as f64).collect();
    (cs, phis)
}

/// Law-of-cosines residual below `1e-10` and `gain = 2c - 2b - a` exactly.
pub fn identity_suite(grid: usize) -> SuiteResult {
    let mut r = SuiteResult::new("shortening-identity");
    let (cs, phis) = shortening_grid(grid);
    for &c in &cs {
        for &phi in &phis {
            match ShorteningInput::new(c, phi).and_then(sh_gain) {
                Ok(s) => {
                    let res = law_of_cosines_residual(s.a, s.b, c);
                    r.check(res < 1e-10 && s.gain == 2.0 * c - 2.0 * s.b - s.a, || {
                        format!("c={} phi={} a={} b={} residual={}", fmt17(c), fmt17(phi), fmt17(s.a), fmt17(s.b), fmt17(res))
                    });
                }
                Err(e) => r.check(false, || format!("c={} phi={}: {e}", fmt17(c), fmt17(phi))),
            }
        }
    }
    r
}

/// `Sh` strictly increasing in `c` and strictly decreasing in `φ` between
/// adjacent grid points (margin `1e-12`), and `da/db > -2` wherever
/// `a > 1e-6`. The row `φ = 2π/3`, where `Sh ≡ 0`, is left out of the
/// `c` direction.
pub fn monotone_suite(grid: usize, gain: &GainFn) -> SuiteResult {
    const MARGIN: f64 = 1e-12;
    let mut r = SuiteResult::new("monotone");
    let (cs, phis) = shortening_grid(grid);
    let table: Vec<Vec<f64>> = cs.iter().map(|&c| phis.iter().map(|&p| gain(c, p)).collect()).collect();
    for (j, &phi) in phis.iter().enumerate() {
        if j + 1 == phis.len() {
            break;
        }
        for i in 0..cs.len() - 1 {
            let (lo, hi) = (table[i][j], table[i + 1][j]);
            r.check(hi - lo > MARGIN, || {
                format!("not increasing in c at phi={}: Sh({})={} Sh({})={}", fmt17(phi), fmt17(cs[i]), fmt17(lo), fmt17(cs[i + 1]), fmt17(hi))
            });
        }
    }
    for (i, &c) in cs.iter().enumerate() {
        for j in 0..phis.len() - 1 {
            let (lo, hi) = (table[i][j], table[i][j + 1]);
            r.check(lo - hi > MARGIN, || {
                format!("not decreasing in phi at c={}: Sh(phi={})={} Sh(phi={})={}", fmt17(c), fmt17(phis[j]), fmt17(lo), fmt17(phis[j + 1]), fmt17(hi))
            });
        }
    }
    for &c in &cs {
        for &phi in &phis {
            let Ok(s) = ShorteningInput::new(c, phi).and_then(sh_gain) else { continue };
            if s.a > 1e-6 {
                let d = da_db(s.a, s.b);
                r.check(d > -2.0, || format!("da/db={} at a={} b={}", fmt17(d), fmt17(s.a), fmt17(s.b)));
            }
        }
    }
    r
}

/// Richardson-extrapolated `Sh(h)/h` as `h → 0` against the closed form,
/// within `1e-6`, for `n` angles; `0` within `1e-9` at `2π/3`.
pub fn derivative_suite(n: usize, gain: &GainFn) -> SuiteResult {
    let mut r = SuiteResult::new("derivative-at-zero");
    let h = 1e-4;
    for j in 1..=n {
        let phi = STEINER_ANGLE * j as f64 / n as f64;
        let d1 = gain(h, phi) / h;
        let d2 = gain(h / 2.0, phi) / (h / 2.0);
        let fd = 2.0 * d2 - d1;
        let exact = sh_derivative_at_zero(phi).unwrap_or(f64::NAN);
        let tol = if j == n { 1e-9 } else { 1e-6 };
        r.check((fd - exact).abs() < tol && (j != n || exact.abs() < 1e-9), || {
            format!("phi={}: finite difference {} closed form {}", fmt17(phi), fmt17(fd), fmt17(exact))
        });
    }
    r
}

/// Certifies the constants at `arccos(-1/3)` and checks `Sh(c) > s` for
/// random `s < s₀`, `c/s > z`.
pub fn sufficient_shortening_suite(trials: usize, seed: u64, gain: &GainFn) -> SuiteResult {
    let mut r = SuiteResult::new("sufficient-shortening");
    let phi0 = tetrahedral_angle();
    let k = match compute_constants(phi0) {
        Ok(k) => k,
        Err(e) => {
            r.check(false, || format!("constants: {e}"));
            return r;
        }
    };
    r.check(certify_ratio(phi0, k.y, k.c0).is_ok(), || "grid certification of Sh(c)/c >= y failed".into());
    r.check((k.z * k.y - 1.0).abs() < 1e-12 && (k.s0 - k.c0 * k.y).abs() < 1e-12 * k.s0, || {
        format!("z*y={} s0-c0*y={}", fmt17(k.z * k.y), fmt17(k.s0 - k.c0 * k.y))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let s = k.s0 * rng.gen_range(1e-6..1.0f64);
        // c/s log-uniform in (z, 20/s)
        let lo = k.z * s;
        let c = lo * (rng.gen_range(1e-12..1.0f64) * (20.0 / lo).max(2.0).ln()).exp();
        let sh = gain(c, phi0);
        r.check(sh > s, || format!("s={} c={} Sh(c)={}", fmt17(s), fmt17(c), fmt17(sh)));
    }
    r
}

/// Both postconditions of the greedy small-subgraph search on random graphs
/// with at most 30 edges.
pub fn small_subgraph_suite(trials: usize, seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("small-subgraph");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let g = random_connected_graph(&mut rng, 30);
        let ids: Vec<usize> = g.edges().map(|e| e.id).collect();
        let e = ids[rng.gen_range(0..ids.len())];
                let l0 = g.edge(e).unwrap().length * (1.0 + rng.gen_range(1e-6..1.0));
        let m = rng.gen_range(0.5..20.0);
        let s = match find_small_subgraph(&g, e, m, l0) {
            Ok(s) => s,
            Err(err) => {
                r.check(false, || format!("{err}"));
                continue;
            }
        };
        let len = s.length();
        let adjacent_ok = s.adjacent_edges().iter().all(|&f| g.edge(f).unwrap().length > m * len);
        let growth_ok = len < l0 * (m + 1.0).powi(s.size() as i32 - 1);
        r.check(adjacent_ok && growth_ok && s.contains(e), || {
            format!("graph:\n{}e={e} m={} l0={} S={:?}", g.to_text(), fmt17(m), fmt17(l0), s.edge_ids().collect::<Vec<_>>())
        });
    }
    r
}

/// `len(Y) <= len(X) + (4k-5) len(S)` and rank preservation for random
/// trivalent graphs of rank at most 5 and random trees.
pub fn collapse_suite(trials: usize, seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("collapse");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let k = rng.gen_range(2..=5usize);
        let x = random_trivalent(&mut rng, k);
        if x.edges().all(|e| e.is_loop()) {
            continue;
        }
        let s = random_tree_subgraph(&mut rng, &x, 2 * k - 3);
        match collapse_tree(&x, &s, None) {
            Ok(c) => {
                let bound = x.total_length() + (4 * k - 5) as f64 * s.length();
                let cone_ok = c.cone_edges.iter().all(|e| e.length <= s.length());
                r.check(c.y.total_length() <= bound && c.y.rank() == x.rank() && cone_ok, || {
                    format!("graph:\n{}S={:?} len(Y)={} bound={}", x.to_text(), s.edge_ids().collect::<Vec<_>>(), fmt17(c.y.total_length()), fmt17(bound))
                });
            }
            Err(e) => r.check(false, || format!("{e}")),
        }
    }
    r
}

fn random_direction_point(rng: &mut impl Rng, center: &HPoint) -> HPoint {
    let v = loop {
        let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0f64..1.0)];
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1e-6 && n2 <= 1.0 {
            break v;
        }
    };
    let frame = crate::hyperbolic::tangent_frame(center);
    let dir = frame[0] * v[0] + frame[1] * v[1] + frame[2] * v[2];
    let d = random_length(rng);
    crate::hyperbolic::exp_map(center, &(dir * (d / crate::hyperbolic::tangent_norm(&dir))))
}

/// `Σ_{i<j} cos θ_ij >= -n/2` for `n` directions, and for `n >= 4` some
/// pair at angle at most `arccos(-1/3)`.
pub fn cosine_sum_suite(trials: usize, seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("cosine-sum");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi0 = tetrahedral_angle();
    for _ in 0..trials {
        let n = rng.gen_range(2..=8usize);
        let center = random_direction_point(&mut rng, &HPoint::origin());
        let qs: Vec<HPoint> = (0..n).map(|_| random_direction_point(&mut rng, &center)).collect();
        let Ok(sum) = cosine_sum(&center, &qs) else {
            r.check(false, || "coincident points".into());
            continue;
        };
        r.check(sum >= -(n as f64) / 2.0, || format!("n={n} sum={}", fmt17(sum)));
        if n >= 4 {
            let (_, _, a) = min_angle_pair(&center, &qs).unwrap_or((0, 0, f64::NAN));
            r.check(a <= phi0 + 1e-12, || format!("n={n} min angle={}", fmt17(a)));
        }
    }
    r
}

/// Certificates for `k ∈ {2..5}`, `r ∈ {0.1, 1, 10}`: re-verification,
/// `l > 0`, `l` non-decreasing in `r`.
pub fn bound_suite() -> SuiteResult {
    let mut r = SuiteResult::new("bound-certificate");
    for k in 2..=5 {
        let mut prev = 0.0;
        for radius in [0.1, 1.0, 10.0] {
            match compute_l(radius, k) {
                Ok(cert) => {
                    let ok = cert.verify().passed() && cert.l > 0.0 && cert.l >= prev;
                    r.check(ok, || format!("k={k} r={radius}: {:?}", cert));
                    prev = cert.l;
                }
                Err(e) => r.check(false, || format!("k={k} r={radius}: {e}")),
            }
        }
    }
    r
}

/// Runs every suite. The `gain` function feeds the monotonicity,
/// derivative and sufficient-shortening suites.
pub fn run_all(cfg: &SuiteConfig, gain: &GainFn) -> LemmaReport {
    let seed = cfg.seed;
    LemmaReport {
        suites: vec![
            identity_suite(cfg.grid),
            monotone_suite(cfg.grid, gain),
            derivative_suite(50, gain),
            sufficient_shortening_suite(cfg.trials, seed, gain),
            small_subgraph_suite(cfg.trials, seed.wrapping_add(1)),
            collapse_suite(cfg.trials, seed.wrapping_add(2)),
            cosine_sum_suite(cfg.trials, seed.wrapping_add(3)),
            bound_suite(),
        ],
    }
}

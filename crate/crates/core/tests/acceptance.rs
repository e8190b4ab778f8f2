//! Acceptance criteria 1-10, one line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use carrier_forge::bound::{compute_l, Verdict};
use carrier_forge::graph::random::{random_connected_graph, random_length, random_tree_subgraph, random_trivalent};
use carrier_forge::graph::{collapse_tree, find_small_subgraph, MetricGraph};
use carrier_forge::hyperbolic::{cosine_sum, exp_map, min_angle_pair, minkowski, tangent_frame, HPoint};
use carrier_forge::relax::{girth_derived_radius, relax, scan_theorem, DecoratedGraph, GroupPresentation, RelaxConfig, Topology};
use carrier_forge::shortening::{certify_ratio, compute_constants, da_db, sh, sh_gain, ShorteningInput, STEINER_ANGLE};

// pinned tolerances
const RESIDUAL_TOL: f64 = 1e-10;
const STRICT_MARGIN: f64 = 1e-12;
const A_FLOOR: f64 = 1e-6;
const DERIV_TOL: f64 = 1e-6;
const DERIV_TOL_AT_STEINER: f64 = 1e-9;
const ANGLE_SLACK: f64 = 1e-12;
const RECHECK_SLACK: f64 = 1e-12;
const GRAD_TOL: f64 = 1e-8;
const ANGLE_TOL: f64 = 1e-3;
const FD_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;

/// `B(φ) = (2/√3) sin(φ/2)`.
fn b_of(phi: f64) -> f64 {
    (2.0 / 3f64.sqrt() * (phi / 2.0).sin()).min(1.0)
}

/// Independent `Sh`: `sinh b = B sinh c`, then `a` from
/// `cosh c = cosh a cosh b + ½ sinh a sinh b` written as
/// `cosh c = R cosh(a + δ)` with `R² = cosh² b - ¼ sinh² b`, `tanh δ = ½ tanh b`.
fn sh_oracle(c: f64, phi: f64) -> (f64, f64, f64) {
    let b = (b_of(phi) * c.sinh()).asinh();
    let r = (b.cosh().powi(2) - 0.25 * b.sinh().powi(2)).sqrt();
    let delta = (0.5 * b.tanh()).atanh();
    let a = ((c.cosh() / r).max(1.0).acosh() - delta).max(0.0);
    (a, b, 2.0 * c - 2.0 * b - a)
}

fn grid(n: usize) -> (Vec<f64>, Vec<f64>) {
    let cs = (1..=n).map(|i| 5.0 * i as f64 / n as f64).collect();
    let phis = (1..=n).map(|j| if j == n { STEINER_ANGLE } else { STEINER_ANGLE * j as f64 / n as f64 }).collect();
    (cs, phis)
}

fn criterion_1() -> Outcome {
    let (cs, phis) = grid(200);
    let mut worst = 0.0f64;
    let mut oracle_gap = 0.0f64;
    for &c in &cs {
        for &phi in &phis {
            let s = ShorteningInput::new(c, phi).and_then(sh_gain).map_err(|e| e.to_string())?;
            let residual = (c.cosh() - (s.a.cosh() * s.b.cosh() + 0.5 * s.a.sinh() * s.b.sinh())).abs();
            worst = worst.max(residual);
            if residual >= RESIDUAL_TOL {
                return Err(format!("residual {residual:e} at c={c} phi={phi}"));
            }
            if s.gain != 2.0 * c - 2.0 * s.b - s.a {
                return Err(format!("gain is not 2c - 2b - a at c={c} phi={phi}"));
            }
            oracle_gap = oracle_gap.max((s.gain - sh_oracle(c, phi).2).abs());
        }
    }
    if oracle_gap > 1e-9 {
        return Err(format!("gain differs from the closed-form oracle by {oracle_gap:e}"));
    }
    Ok(format!("40000 points, max residual {worst:.2e}, max |gain - oracle| {oracle_gap:.2e}"))
}

/// `da/db` at fixed `c` from differentiating the law of cosines.
fn a_prime_oracle(a: f64, b: f64) -> f64 {
    let num = a.cosh() * b.sinh() + 0.5 * a.sinh() * b.cosh();
    let den = a.sinh() * b.cosh() + 0.5 * a.cosh() * b.sinh();
    -num / den
}

fn criterion_2() -> Outcome {
    let (cs, phis) = grid(200);
    let table: Vec<Vec<f64>> =
        cs.iter().map(|&c| phis.iter().map(|&p| sh(c, p).map_err(|e| e.to_string())).collect()).collect::<Result<_, _>>()?;
    let mut min_c_step = f64::INFINITY;
    let mut min_phi_step = f64::INFINITY;
    // Sh vanishes identically on the row φ = 2π/3, so c-strictness is checked below it
    for j in 0..phis.len() - 1 {
        for i in 0..cs.len() - 1 {
            min_c_step = min_c_step.min(table[i + 1][j] - table[i][j]);
        }
    }
    for row in &table {
        for j in 0..phis.len() - 1 {
            min_phi_step = min_phi_step.min(row[j] - row[j + 1]);
        }
    }
    if min_c_step <= STRICT_MARGIN || min_phi_step <= STRICT_MARGIN {
        return Err(format!("smallest steps: in c {min_c_step:e}, in phi {min_phi_step:e}"));
    }
    let mut min_ap = f64::INFINITY;
    let mut checked = 0;
    for &c in &cs {
        for &phi in &phis {
            let (a, b, _) = sh_oracle(c, phi);
            if a <= A_FLOOR {
                continue;
            }
            let ap = a_prime_oracle(a, b);
            if (ap - da_db(a, b)).abs() > 1e-9 * ap.abs().max(1.0) {
                return Err(format!("library a' {} differs from oracle {ap} at a={a} b={b}", da_db(a, b)));
            }
            if ap <= -2.0 {
                return Err(format!("a' = {ap} <= -2 at a={a} b={b}"));
            }
            min_ap = min_ap.min(ap);
            checked += 1;
        }
    }
    Ok(format!(
        "min step in c {min_c_step:.2e} (phi < 2π/3), in phi {min_phi_step:.2e}; a' > -2 at {checked} points (min {min_ap:.6})"
    ))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let h = 1e-4;
    for j in 1..=50 {
        let phi = if j == 50 { STEINER_ANGLE } else { STEINER_ANGLE * j as f64 / 50.0 };
        // Richardson on Sh(h)/h
        let d = |t: f64| sh(t, phi).map(|s| s / t).map_err(|e| e.to_string());
        let fd = 2.0 * d(h / 2.0)? - d(h)?;
        let bb = b_of(phi);
        let closed = 2.0 - 1.5 * bb - 0.5 * (4.0 - 3.0 * bb * bb).sqrt();
        let tol = if j == 50 { DERIV_TOL_AT_STEINER } else { DERIV_TOL };
        if (fd - closed).abs() >= tol || (j == 50 && closed.abs() >= DERIV_TOL_AT_STEINER) {
            return Err(format!("phi={phi}: finite difference {fd} vs closed form {closed}"));
        }
        worst = worst.max((fd - closed).abs());
    }
    Ok(format!("50 angles, max error {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let phi0 = (-1.0f64 / 3.0).acos();
    let k = compute_constants(phi0).map_err(|e| e.to_string())?;
    certify_ratio(phi0, k.y, k.c0).map_err(|e| e.to_string())?;
    if (k.z * k.y - 1.0).abs() > 1e-12 || (k.s0 - k.c0 / k.z).abs() > 1e-12 * k.s0 {
        return Err("z, s0 are not 1/y, c0/z".into());
    }
    // independent recheck of Sh(c)/c >= y on (0, c0]
    for i in 1..=20_000 {
        let c = k.c0 * i as f64 / 20_000.0;
        let ratio = sh_oracle(c, phi0).2 / c;
        if ratio < k.y * (1.0 - 1e-9) {
            return Err(format!("oracle ratio {ratio} < y at c={c}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut failures = 0;
    for _ in 0..10_000 {
        let s = k.s0 * rng.gen_range(1e-6..1.0f64);
        let lo = k.z * s;
        let c = lo * (rng.gen_range(1e-12..1.0f64) * (20.0 / lo).max(2.0).ln()).exp();
        if sh(c, phi0).map_err(|e| e.to_string())? <= s {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(format!("{failures} of 10000 samples have Sh(c) <= s"));
    }
    Ok(format!("y={:.6e} c0={:.6} z={:.6} s0={:.6e}; 10000 samples, 0 failures", k.y, k.c0, k.z, k.s0))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut max_size = 0;
    for trial in 0..1000 {
        let g = random_connected_graph(&mut rng, 30);
        let ids: Vec<usize> = g.edges().map(|e| e.id).collect();
        let e = ids[rng.gen_range(0..ids.len())];
        let l0 = g.edge(e).unwrap().length * rng.gen_range(1.0 + 1e-6..2.0);
        let m = rng.gen_range(0.5..20.0);
        let s = find_small_subgraph(&g, e, m, l0).map_err(|err| format!("trial {trial}: {err}"))?;
        let members: BTreeSet<usize> = s.edge_ids().collect();
        let verts: BTreeSet<usize> =
            members.iter().flat_map(|&id| [g.edge(id).unwrap().u, g.edge(id).unwrap().v]).collect();
        let len: f64 = members.iter().map(|&id| g.edge(id).unwrap().length).sum();
        for f in g.edges().filter(|f| !members.contains(&f.id) && (verts.contains(&f.u) || verts.contains(&f.v))) {
            if f.length <= m * len {
                return Err(format!("trial {trial}: adjacent edge {} has length {} <= m len(S) = {}", f.id, f.length, m * len));
            }
        }
        if len >= l0 * (m + 1.0).powi(members.len() as i32 - 1) || !members.contains(&e) {
            return Err(format!("trial {trial}: len(S) = {len} breaks the growth bound"));
        }
        max_size = max_size.max(members.len());
    }
    Ok(format!("1000 graphs, largest S has {max_size} edges"))
}

fn rank_of(g: &MetricGraph) -> i64 {
    g.edge_count() as i64 - g.vertex_count() as i64 + 1
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut tightest = f64::INFINITY;
    for trial in 0..1000 {
        let k = rng.gen_range(2..=5usize);
        let x = random_trivalent(&mut rng, k);
        let s = random_tree_subgraph(&mut rng, &x, 2 * k - 3);
        let c = collapse_tree(&x, &s, None).map_err(|e| format!("trial {trial}: {e}"))?;
        let len_s: f64 = s.edge_ids().map(|id| x.edge(id).unwrap().length).sum();
        let len_x: f64 = x.edges().map(|e| e.length).sum();
        let len_y: f64 = c.y.edges().map(|e| e.length).sum();
        let bound = len_x + (4 * k - 5) as f64 * len_s;
        if len_y > bound * (1.0 + 1e-12) {
            return Err(format!("trial {trial}: len(Y) = {len_y} > {bound}"));
        }
        if rank_of(&c.y) != rank_of(&x) {
            return Err(format!("trial {trial}: rank {} -> {}", rank_of(&x), rank_of(&c.y)));
        }
        tightest = tightest.min((bound - len_y) / len_s);
    }
    Ok(format!("1000 collapses, min slack {tightest:.3} len(S)"))
}

fn random_point_around(rng: &mut impl Rng, p: &HPoint) -> HPoint {
    let f = tangent_frame(p);
    let v: Vector4<f64> = f[0] * rng.gen_range(-1.0..1.0) + f[1] * rng.gen_range(-1.0..1.0) + f[2] * rng.gen_range(-1.0..1.0);
    let n = minkowski(&v, &v).sqrt().max(1e-3);
    exp_map(p, &(v * (random_length(rng) / n)))
}

/// Unit tangent at `p` toward `q` from Minkowski products alone.
fn unit_toward(p: &HPoint, q: &HPoint) -> Vector4<f64> {
    let (p, q) = (p.as_vector(), q.as_vector());
    let w = q + p * minkowski(p, q);
    w / minkowski(&w, &w).sqrt()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let phi0 = (-1.0f64 / 3.0).acos();
    let mut slack = f64::INFINITY;
    for trial in 0..10_000 {
        let n = rng.gen_range(2..=8usize);
        // the sum is isometry invariant; keeping P near the origin keeps the
        // hyperboloid coordinates well conditioned for the oracle
        let dir = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0f64..1.0)];
        let scale = rng.gen_range(0.0..1.0f64).sinh() / (dir.iter().map(|x| x * x).sum::<f64>().sqrt() + 1e-300);
        let p = HPoint::from_spatial(dir.map(|x| x * scale));
        let qs: Vec<HPoint> = (0..n).map(|_| random_point_around(&mut rng, &p)).collect();
        let us: Vec<Vector4<f64>> = qs.iter().map(|q| unit_toward(&p, q)).collect();
        let mut sum = 0.0;
        let mut min_angle = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let cos = minkowski(&us[i], &us[j]).clamp(-1.0, 1.0);
                sum += cos;
                min_angle = min_angle.min(cos.acos());
            }
        }
        let lib = cosine_sum(&p, &qs).map_err(|e| e.to_string())?;
        if (lib - sum).abs() > 1e-9 * n as f64 {
            return Err(format!("trial {trial}: cosine_sum {lib} vs oracle {sum}"));
        }
        if lib < -(n as f64) / 2.0 {
            return Err(format!("trial {trial}: n={n} sum {lib} < -n/2"));
        }
        slack = slack.min(lib + n as f64 / 2.0);
        if n >= 4 {
            let (_, _, a) = min_angle_pair(&p, &qs).map_err(|e| e.to_string())?;
            if a > phi0 + ANGLE_SLACK || (a - min_angle).abs() > 1e-9 {
                return Err(format!("trial {trial}: min angle {a} (oracle {min_angle})"));
            }
        }
    }
    Ok(format!("10000 configurations, min slack {slack:.3e}"))
}

fn criterion_8() -> Outcome {
    let mut cells = 0;
    for k in 2..=5i64 {
        let mut prev = 0.0;
        for r in [0.1, 1.0, 10.0] {
            let cert = compute_l(r, k).map_err(|e| e.to_string())?;
            let (m1, slope) = (cert.m + 1.0, (4 * k - 5) as f64);
            let c = &cert.constants;
            let m_ok = 0.5 * (cert.m - 2.0) / slope > c.z;
            let s0_ok = slope * cert.l * m1.powi((2 * k - 4) as i32) <= c.s0 * (1.0 + RECHECK_SLACK);
            let r_ok = cert.l * m1.powi((3 * k - 4) as i32) <= r * (1.0 + RECHECK_SLACK);
            let formula = (c.s0 / (slope * m1.powi((2 * k - 4) as i32))).min(r / m1.powi((3 * k - 4) as i32));
            if !(m_ok && s0_ok && r_ok) || !cert.verify().passed() {
                return Err(format!("k={k} r={r}: m {m_ok} s0 {s0_ok} r {r_ok}"));
            }
            if !(cert.l > 0.0) || (cert.l - formula).abs() > 1e-15 * formula || cert.l < prev {
                return Err(format!("k={k} r={r}: l = {} (formula {formula}, previous {prev})", cert.l));
            }
            prev = cert.l;
            cells += 1;
        }
    }
    Ok(format!("{cells} cells re-verified"))
}

fn shipped_rank_two() -> Result<Arc<GroupPresentation>, String> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/groups/schottky2a.group");
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    GroupPresentation::parse(&text).map(Arc::new).map_err(|e| e.to_string())
}

fn criterion_9() -> Outcome {
    let group = shipped_rank_two()?;
    let seed = DecoratedGraph::seed(group, Topology::Theta, 0).map_err(|e| e.to_string())?;
    let cfg = RelaxConfig { seed: 0, ..RelaxConfig::default() };
    let (x, report) = relax(&seed, &cfg).map_err(|e| e.to_string())?;
    if !report.converged || report.iterations > 100_000 {
        return Err(format!("not converged after {} iterations", report.iterations));
    }
    let mut max_grad = 0.0f64;
    let mut max_defect = 0.0f64;
    for v in x.vertices() {
        let tangents = x.vertex_tangents(v).map_err(|e| e.to_string())?;
        let sum: Vector4<f64> = tangents.iter().map(|t| *t.1.vector()).sum();
        max_grad = max_grad.max(minkowski(&sum, &sum).sqrt());
        for i in 0..tangents.len() {
            for j in i + 1..tangents.len() {
                let a = minkowski(tangents[i].1.vector(), tangents[j].1.vector()).clamp(-1.0, 1.0).acos();
                max_defect = max_defect.max((a - STEINER_ANGLE).abs());
            }
        }
    }
    if max_grad >= GRAD_TOL || max_defect >= ANGLE_TOL {
        return Err(format!("gradient {max_grad:e}, angle defect {max_defect:e}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let eps = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dirs: Vec<(usize, Vector4<f64>)> = x
            .vertices()
            .map(|v| {
                let f = tangent_frame(x.position(v).unwrap());
                (v, f[0] * rng.gen_range(-1.0..1.0) + f[1] * rng.gen_range(-1.0..1.0) + f[2] * rng.gen_range(-1.0..1.0))
            })
            .collect();
        let at = |s: f64| {
            x.with_positions(dirs.iter().map(|(v, d)| (*v, exp_map(x.position(*v).unwrap(), &(d * s)))))
                .map(|g| g.total_length())
                .map_err(|e| e.to_string())
        };
        let fd = (at(eps)? - at(-eps)?) / (2.0 * eps);
        let mut exact = 0.0;
        for (v, d) in &dirs {
            exact += minkowski(&x.vertex_gradient(*v).map_err(|e| e.to_string())?, d);
        }
        worst = worst.max((fd - exact).abs());
    }
    if worst >= FD_TOL {
        return Err(format!("finite differences differ from the gradient by {worst:e}"));
    }
    Ok(format!(
        "{} iterations, length {:.10}, max gradient {max_grad:.2e}, max angle defect {max_defect:.2e}, fd error {worst:.2e}",
        report.iterations, report.final_length
    ))
}

fn criterion_10() -> Outcome {
    let group = shipped_rank_two()?;
    let base = RelaxConfig::default();
    let r = girth_derived_radius(&group, &base).map_err(|e| e.to_string())?;
    let cert = compute_l(r, 2).map_err(|e| e.to_string())?;
    let report = scan_theorem(&group, 50, &cert, &base, None).map_err(|e| e.to_string())?;
    let violations = report.count(Verdict::Violation);
    if violations > 0 {
        return Err(format!("{violations} violations"));
    }
    Ok(format!(
        "r={r:.6} l={:.3e}: {} consistent, {} vacuous, 0 violations, {} unconverged",
        cert.l,
        report.count(Verdict::Consistent),
        report.count(Verdict::Vacuous),
        report.unconverged()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("shortening identity", criterion_1, Duration::from_secs(5)),
        ("monotonicity", criterion_2, Duration::from_secs(5)),
        ("derivative at zero", criterion_3, Duration::from_secs(1)),
        ("sufficient shortening", criterion_4, Duration::from_secs(10)),
        ("small subgraph", criterion_5, Duration::from_secs(5)),
        ("collapse inequality", criterion_6, Duration::from_secs(5)),
        ("cosine-sum inequality", criterion_7, Duration::from_secs(10)),
        ("bound certificate", criterion_8, Duration::from_secs(1)),
        ("relaxer convergence", criterion_9, Duration::from_secs(60)),
        ("theorem scan", criterion_10, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {:.0?} budget", budget)),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status} {name} [{:.3}s] {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

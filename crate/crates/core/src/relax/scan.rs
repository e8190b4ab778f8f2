//! Seed sweeps feeding relaxed graphs to the edge-length bound.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use super::decorated::{DecoratedGraph, Topology};
use super::group::GroupPresentation;
use super::optimize::{relax, RelaxConfig, RelaxReport};
use super::RelaxError;
use crate::bound::{verify_theorem_instance, BoundCertificate, Verdict};
use crate::format::fmt17;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub seed: u64,
    pub topology: Topology,
    pub converged: bool,
    pub iterations: usize,
    pub final_length: f64,
    pub girth: Option<f64>,
    pub min_edge: f64,
    /// `None` for runs that did not converge; only local minimizers are checked.
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub r: f64,
    pub l: f64,
    pub entries: Vec<ScanEntry>,
}

impl ScanReport {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.entries.iter().filter(|e| e.verdict == Some(verdict)).count()
    }

    pub fn unconverged(&self) -> usize {
        self.entries.iter().filter(|e| !e.converged).count()
    }

    /// One row per seed; doubles as min-edge against girth scatter data.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,topology,converged,final_length,girth,min_edge,verdict\n");
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.seed,
                e.topology.as_str(),
                e.converged,
                fmt17(e.final_length),
                e.girth.map(fmt17).unwrap_or_else(|| "none".into()),
                fmt17(e.min_edge),
                e.verdict.map(|v| v.as_str()).unwrap_or("unconverged"),
            )
            .unwrap();
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "r: {}\nl: {}\nseeds: {}\nconsistent: {}\nvacuous: {}\nviolations: {}\nunconverged: {}\n",
            fmt17(self.r),
            fmt17(self.l),
            self.entries.len(),
            self.count(Verdict::Consistent),
            self.count(Verdict::Vacuous),
            self.count(Verdict::Violation),
            self.unconverged(),
        )
    }
}

/// Topology used for a given seed: theta and dumbbell alternate in rank 2.
pub fn seed_topology(rank: usize, seed: u64) -> Topology {
    if rank == 2 && seed % 2 == 0 {
        Topology::Theta
    } else {
        Topology::Caterpillar
    }
}

/// Relaxes the seed graph for `seed` with topology moves enabled.
pub fn relax_seed(
    group: &Arc<GroupPresentation>,
    seed: u64,
    base: &RelaxConfig,
) -> Result<(DecoratedGraph, RelaxReport), RelaxError> {
    let g = DecoratedGraph::seed(group.clone(), seed_topology(group.rank(), seed), seed)?;
    let cfg = RelaxConfig { seed, allow_topology_moves: true, ..*base };
    relax(&g, &cfg)
}

/// Half the girth of the relaxed seed-0 graph.
pub fn girth_derived_radius(group: &Arc<GroupPresentation>, base: &RelaxConfig) -> Result<f64, RelaxError> {
    let (_, report) = relax_seed(group, 0, base)?;
    match report.girth {
        Some(g) if report.converged => Ok(0.5 * g),
        _ => Err(RelaxError::Precondition("seed 0 did not converge to a graph with positive girth".into())),
    }
}

/// Relaxes seeds `0..seeds` (concurrently, at most `threads` at a time)
/// and checks every converged graph against `cert`. A violation stops the
/// scan with the offending graph and report.
pub fn scan_theorem(
    group: &Arc<GroupPresentation>,
    seeds: u64,
    cert: &BoundCertificate,
    base: &RelaxConfig,
    threads: Option<usize>,
) -> Result<ScanReport, RelaxError> {
    if group.rank() as i64 != cert.k {
        return Err(RelaxError::Precondition(format!(
            "group has rank {} but the certificate is for rank {}",
            group.rank(),
            cert.k
        )));
    }
    let run = |seed: u64| -> Result<ScanEntry, RelaxError> {
        let (g, report) = relax_seed(group, seed, base)?;
        let verdict = if report.converged { Some(verify_theorem_instance(&g.to_metric_graph()?, cert)?) } else { None };
        if verdict == Some(Verdict::Violation) {
            return Err(RelaxError::Violation { seed, dump: format!("{}\n{}", g.to_text(), report.summary()) });
        }
        Ok(ScanEntry {
            seed,
            topology: seed_topology(group.rank(), seed),
            converged: report.converged,
            iterations: report.iterations,
            final_length: report.final_length,
            girth: report.girth,
            min_edge: report.min_edge,
            verdict,
        })
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| RelaxError::Precondition(format!("thread pool: {e}")))?;
    let results: Vec<Result<ScanEntry, RelaxError>> = pool.install(|| (0..seeds).into_par_iter().map(run).collect());
    let entries = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ScanReport { r: cert.r, l: cert.l, entries })
}

//! Edge-count sparsity and wall-clock timing of fixed vs dynamic cutoffs.

use std::time::{Duration, Instant};

use crate::dyncut::{dynamic_cutoff, DynCutParams};
use crate::error::{Error, Result};
use crate::geometry::AtomicSystem;
use crate::neighbor::build_graph;
use crate::potential::{energy_forces, energy_forces_on_graph, CutoffMode, PairParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SparsityReport {
    pub edges_fixed: usize,
    pub edges_dynamic: usize,
    /// `edges_fixed / edges_dynamic`; 1 when both are zero.
    pub reduction_factor: f64,
    pub mean_degree_fixed: f64,
    pub mean_degree_dynamic: f64,
    /// Wall time of the cutoff stage over a full dynamic-mode force call.
    pub cutoff_stage_time_fraction: f64,
}

/// Directed edge counts before and after dynamic pruning, plus the share of
/// a dynamic-mode force evaluation spent computing cutoffs.
pub fn sparsity_report(
    system: &AtomicSystem,
    h: f64,
    params: &DynCutParams,
) -> Result<SparsityReport> {
    if params.h != h {
        return Err(Error::ParamMismatch {
            graph_h: h,
            params_h: params.h,
        });
    }
    let graph = build_graph(system, h)?;
    let pair = PairParams::new(h, CutoffMode::Dynamic(*params))?;
    // One untimed pass of each stage so allocation and cache warm-up are not
    // billed to either.
    let cut = dynamic_cutoff(&graph, params)?;
    energy_forces_on_graph(&graph, &pair)?;

    let start = Instant::now();
    dynamic_cutoff(&graph, params)?;
    let cutoff_time = start.elapsed();
    let start = Instant::now();
    energy_forces_on_graph(&graph, &pair)?;
    let force_time = start.elapsed();

    let n = system.len().max(1) as f64;
    let edges_fixed = graph.n_edges();
    let edges_dynamic = cut.pruned_edge_count();
    let reduction_factor = if edges_dynamic == 0 {
        if edges_fixed == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        edges_fixed as f64 / edges_dynamic as f64
    };
    let total = force_time.as_secs_f64();
    Ok(SparsityReport {
        edges_fixed,
        edges_dynamic,
        reduction_factor,
        mean_degree_fixed: edges_fixed as f64 / n,
        mean_degree_dynamic: edges_dynamic as f64 / n,
        cutoff_stage_time_fraction: if total > 0.0 {
            (cutoff_time.as_secs_f64() / total).min(1.0)
        } else {
            0.0
        },
    })
}

/// Wall-clock summary in seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimingStats {
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
}

impl TimingStats {
    fn from_samples(samples: &[Duration]) -> Self {
        let mut s: Vec<f64> = samples.iter().map(Duration::as_secs_f64).collect();
        s.sort_by(f64::total_cmp);
        Self {
            median: quantile(&s, 0.5),
            p10: quantile(&s, 0.1),
            p90: quantile(&s, 0.9),
        }
    }
}

/// Linear interpolation between order statistics of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimingReport {
    pub fixed: TimingStats,
    pub dynamic: TimingStats,
    /// `fixed.median / dynamic.median`; above 1 means dynamic is faster.
    pub speedup: f64,
    pub repetitions: usize,
    pub threads: usize,
}

/// Times full `energy_forces` calls (graph build included) in fixed mode and
/// in the mode of `params`, after one untimed warm-up each.
pub fn timing_report(
    system: &AtomicSystem,
    params: &PairParams,
    repetitions: usize,
) -> Result<TimingReport> {
    if repetitions < 5 {
        return Err(Error::InvalidParameter(format!(
            "timing needs at least 5 repetitions, got {repetitions}"
        )));
    }
    let fixed = params.with_mode(CutoffMode::Fixed)?;
    let time = |p: &PairParams| -> Result<Vec<Duration>> {
        energy_forces(system, p)?;
        (0..repetitions)
            .map(|_| {
                let start = Instant::now();
                energy_forces(system, p)?;
                Ok(start.elapsed())
            })
            .collect()
    };
    let fixed_stats = TimingStats::from_samples(&time(&fixed)?);
    let dynamic_stats = TimingStats::from_samples(&time(params)?);
    Ok(TimingReport {
        fixed: fixed_stats,
        dynamic: dynamic_stats,
        speedup: fixed_stats.median / dynamic_stats.median,
        repetitions,
        threads: rayon::current_num_threads(),
    })
}

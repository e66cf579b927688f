//! Subcommand bodies. Each reads its inputs from a resolved [`RunConfig`]
//! and writes CSV files into the output directory.

use std::path::PathBuf;

use dyncut_core::bench::{sparsity_report, timing_report};
use dyncut_core::dyncut::{dynamic_cutoff, naive_max_neighbor_cutoff, CutoffResult, DynCutParams};
use dyncut_core::geometry::maxwell_boltzmann_velocities;
use dyncut_core::md::{drift_slope, run_md_observed, MdConfig, Thermostat};
use dyncut_core::neighbor::{build_graph_with, neighbor_stats, GraphOptions, NeighborGraph};
use dyncut_core::potential::{pes_line_scan, CutoffMode, PairParams};
use dyncut_core::smoothfn::EnvelopeParams;
use dyncut_core::{AtomicSystem, Vec3};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{fmt_real, CsvOut, Field};
use crate::xyz::{read_xyz, write_xyz};

pub struct Context {
    pub config: RunConfig,
    pub input: PathBuf,
    pub output_dir: PathBuf,
}

impl Context {
    fn system(&self) -> CliResult<AtomicSystem> {
        read_xyz(&self.input)
    }

    fn h(&self) -> CliResult<f64> {
        self.config.get_or("h", 6.0)
    }

    fn mu(&self) -> CliResult<f64> {
        self.config.get_or("mu", 20.0)
    }

    fn dyn_params(&self) -> CliResult<DynCutParams> {
        let c = &self.config;
        let mut p = DynCutParams::new(self.h()?, self.mu()?)?;
        if let Some(alpha) = c.get("alpha")? {
            p = p.with_alpha(alpha)?;
        }
        if let Some(sigma) = c.get("sigma")? {
            p = p.with_sigma(sigma)?;
        }
        if let Some(eps) = c.get("epsilon")? {
            p = p.with_epsilon(eps)?;
        }
        if let Some(n) = c.get("envelope_n")? {
            p = p.with_envelope(EnvelopeParams::new(n)?);
        }
        Ok(p)
    }

    fn n_max(&self) -> CliResult<usize> {
        match self.config.get("n_max")? {
            Some(n) => Ok(n),
            None => Ok(self.mu()?.round().max(1.0) as usize),
        }
    }

    fn mode(&self, name: &str) -> CliResult<CutoffMode> {
        match name {
            "fixed" => Ok(CutoffMode::Fixed),
            "naive" => Ok(CutoffMode::Naive {
                n_max: self.n_max()?,
            }),
            "dynamic" => Ok(CutoffMode::Dynamic(self.dyn_params()?)),
            other => Err(CliError::Config(format!(
                "mode must be fixed, naive or dynamic, got `{other}`"
            ))),
        }
    }

    fn configured_mode(&self) -> CliResult<CutoffMode> {
        self.mode(self.config.raw("mode").unwrap_or("dynamic"))
    }

    fn pair_params(&self, mode: CutoffMode) -> CliResult<PairParams> {
        let c = &self.config;
        let mut p = PairParams::new(self.h()?, mode)?;
        p.epsilon_lj = c.get_or("lj_epsilon", p.epsilon_lj)?;
        p.sigma_lj = c.get_or("lj_sigma", p.sigma_lj)?;
        if let Some(n) = c.get("message_envelope_n")? {
            p.message_envelope = EnvelopeParams::new(n)?;
        }
        p.validate()?;
        Ok(p)
    }

    fn graph(&self, system: &AtomicSystem) -> CliResult<NeighborGraph> {
        let options = GraphOptions {
            ghost_replication: self.config.flag("ghost_replication", true)?,
        };
        Ok(build_graph_with(system, self.h()?, options)?)
    }

    fn csv(&self, name: &str, header: &[&str]) -> CliResult<CsvOut> {
        CsvOut::create(&self.output_dir, name, header)
    }
}

pub fn graph(ctx: &Context) -> CliResult<()> {
    let system = ctx.system()?;
    let g = ctx.graph(&system)?;
    let stats = neighbor_stats(&g);

    let mut hist = ctx.csv("degree_histogram.csv", &["degree", "count"])?;
    for (d, &count) in stats.histogram.iter().enumerate() {
        hist.row(&[d.into(), count.into()])?;
    }
    hist.finish()?;

    let mut summary = ctx.csv(
        "graph_summary.csv",
        &[
            "n_atoms",
            "n_edges",
            "h",
            "mean_degree",
            "min_degree",
            "max_degree",
        ],
    )?;
    summary.row(&[
        system.len().into(),
        g.n_edges().into(),
        g.h().into(),
        stats.mean.into(),
        stats.min.into(),
        stats.max.into(),
    ])?;
    summary.finish()?;
    println!("mean_degree {}", fmt_real(stats.mean));
    Ok(())
}

pub fn cutoff(ctx: &Context) -> CliResult<()> {
    let system = ctx.system()?;
    let g = ctx.graph(&system)?;
    let result = match ctx.configured_mode()? {
        CutoffMode::Dynamic(p) => dynamic_cutoff(&g, &p)?,
        CutoffMode::Naive { n_max } => naive_max_neighbor_cutoff(&g, n_max)?,
        CutoffMode::Fixed => fixed_cutoff(&g),
    };
    let pruned = result.pruned_degrees(&g);
    let mut out = ctx.csv(
        "cutoff.csv",
        &["node", "cutoff", "degree_hard", "degree_pruned"],
    )?;
    for v in 0..g.n_nodes() {
        out.row(&[
            v.into(),
            result.cutoffs[v].into(),
            g.degree(v).into(),
            pruned[v].into(),
        ])?;
    }
    out.finish()?;
    println!("mean_cutoff {}", fmt_real(result.mean_cutoff()));
    println!(
        "mean_degree_pruned {}",
        fmt_real(result.mean_pruned_degree())
    );
    Ok(())
}

fn fixed_cutoff(g: &NeighborGraph) -> CutoffResult {
    CutoffResult {
        cutoffs: vec![g.h(); g.n_nodes()],
        ranks: Vec::new(),
        weights: Vec::new(),
        pruned_edges: (0..g.n_edges()).collect(),
    }
}

pub fn scan(ctx: &Context) -> CliResult<()> {
    let c = &ctx.config;
    let system = ctx.system()?;
    let atom: usize = c.require("atom", "scan")?;
    let direction = c
        .vector("direction")?
        .ok_or_else(|| CliError::Config("`scan` needs `direction` in the run config".into()))?;
    let span: f64 = c.get_or("span", 1.0)?;
    let steps: usize = c.get_or("scan_steps", 101)?;
    let direction = Vec3::from(direction);

    let mut scans = Vec::new();
    for name in ["fixed", "naive", "dynamic"] {
        let params = ctx.pair_params(ctx.mode(name)?)?;
        scans.push(pes_line_scan(
            &system, &params, atom, direction, span, steps,
        )?);
    }
    let mut out = ctx.csv(
        "scan.csv",
        &[
            "displacement",
            "E_fixed",
            "E_naive",
            "E_dynamic",
            "F_fixed",
            "F_naive",
            "F_dynamic",
        ],
    )?;
    for i in 0..steps {
        let mut row: Vec<Field> = vec![scans[0][i].displacement.into()];
        row.extend(scans.iter().map(|s| Field::from(s[i].energy)));
        row.extend(scans.iter().map(|s| Field::from(s[i].force_along)));
        out.row(&row)?;
    }
    out.finish()?;
    for (name, s) in ["fixed", "naive", "dynamic"].iter().zip(&scans) {
        let jump = s
            .windows(2)
            .map(|w| (w[1].force_along - w[0].force_along).abs())
            .fold(0.0, f64::max);
        println!("max_force_step_{name} {}", fmt_real(jump));
    }
    Ok(())
}

pub const TRAJECTORY_HEADER: [&str; 9] = [
    "step",
    "time_fs",
    "total_energy",
    "kinetic_energy",
    "potential_energy",
    "temperature",
    "mean_dynamic_cutoff",
    "mean_in_cutoff_neighbors",
    "mean_hard_neighbors",
];

pub fn md(ctx: &Context) -> CliResult<()> {
    let c = &ctx.config;
    let steps: usize = c.require("steps", "md")?;
    let dt: f64 = c.get_or("dt", 1.0)?;
    let seed: u64 = c.get_or("seed", 0)?;
    let thermostat = match c.raw("thermostat").unwrap_or("none") {
        "none" => Thermostat::None,
        "langevin" => Thermostat::Langevin {
            friction: c.get_or("friction", 0.01)?,
            temperature: c.require("temperature", "md with a Langevin thermostat")?,
        },
        other => {
            return Err(CliError::Config(format!(
                "thermostat must be none or langevin, got `{other}`"
            )))
        }
    };
    let config = MdConfig {
        dt,
        steps,
        thermostat,
        seed,
        record_every: c.get_or("record_every", 1)?,
        rebuild_neighbors_every: c.get_or("rebuild_every", 1)?,
    };
    let params = ctx.pair_params(ctx.configured_mode()?)?;

    let mut system = ctx.system()?;
    if let Some(t) = c.get::<f64>("initial_temperature")? {
        system = maxwell_boltzmann_velocities(&system, t, seed)?;
    }
    let mut out = ctx.csv("trajectory.csv", &TRAJECTORY_HEADER)?;
    let result = run_md_observed(&mut system, &params, &config, |_, r| {
        out.row(&[
            r.step.into(),
            r.time.into(),
            r.total_energy.into(),
            r.kinetic_energy.into(),
            r.potential_energy.into(),
            r.temperature.into(),
            r.mean_dynamic_cutoff.into(),
            r.mean_in_cutoff_neighbors.into(),
            r.mean_hard_neighbors.into(),
        ])
        .map_err(|e| dyncut_core::Error::InvalidParameter(format!("writing trajectory: {e}")))
    });
    out.flush()?;
    let records = result?;
    out.finish()?;

    if let Some(name) = c.raw("final_frame") {
        let path = ctx.output_dir.join(name);
        std::fs::write(&path, write_xyz(&system))
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(slope) = drift_slope(&records, system.len()) {
        println!("drift_slope_mev_per_atom_ps {}", fmt_real(slope));
    }
    if let Some(last) = records.last() {
        println!("final_total_energy {}", fmt_real(last.total_energy));
    }
    Ok(())
}

pub fn bench(ctx: &Context) -> CliResult<()> {
    let c = &ctx.config;
    let system = ctx.system()?;
    let h = ctx.h()?;
    let params = ctx.dyn_params()?;
    let report = sparsity_report(&system, h, &params)?;
    let mut out = ctx.csv(
        "sparsity.csv",
        &[
            "n_atoms",
            "h",
            "mu",
            "edges_fixed",
            "edges_dynamic",
            "reduction_factor",
            "mean_degree_fixed",
            "mean_degree_dynamic",
        ],
    )?;
    out.row(&[
        system.len().into(),
        h.into(),
        params.mu().into(),
        report.edges_fixed.into(),
        report.edges_dynamic.into(),
        report.reduction_factor.into(),
        report.mean_degree_fixed.into(),
        report.mean_degree_dynamic.into(),
    ])?;
    out.finish()?;
    println!("reduction_factor {}", fmt_real(report.reduction_factor));

    // Wall-clock numbers go to their own file so that sparsity.csv stays
    // byte-reproducible.
    if c.flag("timing", true)? {
        let pair = ctx.pair_params(CutoffMode::Dynamic(params))?;
        let t = timing_report(&system, &pair, c.get_or("repetitions", 10)?)?;
        let mut out = ctx.csv(
            "timing.csv",
            &[
                "repetitions",
                "threads",
                "fixed_median_s",
                "fixed_p10_s",
                "fixed_p90_s",
                "dynamic_median_s",
                "dynamic_p10_s",
                "dynamic_p90_s",
                "speedup",
                "cutoff_stage_time_fraction",
            ],
        )?;
        out.row(&[
            t.repetitions.into(),
            t.threads.into(),
            t.fixed.median.into(),
            t.fixed.p10.into(),
            t.fixed.p90.into(),
            t.dynamic.median.into(),
            t.dynamic.p10.into(),
            t.dynamic.p90.into(),
            t.speedup.into(),
            report.cutoff_stage_time_fraction.into(),
        ])?;
        out.finish()?;
    }
    Ok(())
}

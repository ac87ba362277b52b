//! Plot-data emission: one CSV per trajectory plus a JSON manifest
//! describing how the numbers were produced.

use crate::beta::BetaPath;
use crate::wonham::{FilterTrajectory, SchemeTag};
use serde::Serialize;
use std::io::{self, Write};

/// Everything a trajectory CSV can carry: time column, posterior columns,
/// then any optional named series (beta, likelihood-ratio moments, ...).
pub struct TrajectoryDump<'a> {
    pub traj: &'a FilterTrajectory,
    pub beta: Option<&'a BetaPath>,
    pub extra: Vec<(&'static str, &'a [f64])>,
}

impl<'a> TrajectoryDump<'a> {
    pub fn new(traj: &'a FilterTrajectory) -> Self {
        TrajectoryDump { traj, beta: None, extra: Vec::new() }
    }
}

pub fn write_trajectory_csv<W: Write>(mut w: W, dump: &TrajectoryDump) -> io::Result<()> {
    let traj = dump.traj;
    let d = traj.dim();
    write!(w, "t")?;
    for x in 1..=d {
        write!(w, ",pi{x}")?;
    }
    if dump.beta.is_some() {
        write!(w, ",beta")?;
    }
    for (name, _) in &dump.extra {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for (k, t) in traj.grid().times().enumerate() {
        write!(w, "{t:.12e}")?;
        for &p in traj.point_slice(k) {
            write!(w, ",{p:.12e}")?;
        }
        if let Some(beta) = dump.beta {
            write!(w, ",{:.12e}", beta.values()[k])?;
        }
        for (_, series) in &dump.extra {
            write!(w, ",{:.12e}", series[k])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Provenance record for one simulated trajectory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub scheme: SchemeTag,
    pub seed: Option<u64>,
    pub dt: f64,
    pub t_end: f64,
    pub n_steps: usize,
    pub prior: Vec<f64>,
}

impl RunManifest {
    pub fn for_trajectory(traj: &FilterTrajectory) -> Self {
        RunManifest {
            scheme: traj.scheme(),
            seed: traj.seed(),
            dt: traj.grid().dt(),
            t_end: traj.grid().t_end(),
            n_steps: traj.grid().n_steps(),
            prior: traj.prior().as_slice().to_vec(),
        }
    }
}

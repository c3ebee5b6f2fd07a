use serde::Serialize;

use plateau_core::scaling::QueueModel;
use plateau_core::{SeededStream, TandemTrajectory};

use crate::config::ExperimentConfig;
use crate::output::{Report, RunDir};
use crate::Status;

#[derive(Serialize)]
struct Summary {
    jobs: usize,
    /// Departure of the last job from the second station.
    end_time: f64,
    max_plateau: f64,
    /// Jobs whose sojourn at the second station equals their service time.
    found_second_station_empty: usize,
    /// Number of times the plateau process rises.
    plateau_rises: usize,
}

pub fn run(cfg: &ExperimentConfig, out: &RunDir) -> anyhow::Result<Status> {
    let c = &cfg.simulate;
    let model = QueueModel::new(c.arrival.validated()?, c.service.validated()?);
    let inputs = model.inputs_for_jobs(c.jobs, &SeededStream::new(cfg.seed, "simulate"))?;
    let traj = TandemTrajectory::build(inputs);

    traj.write_jobs_csv(out.file("jobs.csv")?)?;
    traj.write_time_csv(out.file("trajectory.csv")?, c.grid_points)?;
    traj.plateau_path().write_csv(out.file("plateau.csv")?)?;

    let m = traj.sojourn();
    let summary = Summary {
        jobs: traj.len(),
        end_time: traj.q2_departure().last().copied().unwrap_or(0.0),
        max_plateau: m.iter().copied().fold(0.0, f64::max),
        found_second_station_empty: m
            .iter()
            .zip(traj.inputs().v())
            .filter(|(a, b)| a == b)
            .count(),
        plateau_rises: m.windows(2).filter(|w| w[1] > w[0]).count() + usize::from(!m.is_empty()),
    };
    out.write_json(
        "report.json",
        &Report {
            command: "simulate",
            passed: true,
            config: cfg,
            results: summary,
        },
    )?;
    Ok(Status::Pass)
}

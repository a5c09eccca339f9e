use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use riskplan::calibration::{calibrate, read_power_csv};
use riskplan::error::exit;
use riskplan::output::{generation_line, load_pareto, write_json, write_plan, write_trajectory_csv, ParetoFile};
use riskplan::sweep::{load_sweep_spec, run_sweep, write_sweep_csv};
use riskplan::{load_scenario, parse_risks, Error, Result};

#[derive(Parser)]
#[command(name = "riskplan", version, about = "Risk-adaptive multi-objective UAV trajectory planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a trajectory and write pareto.json, trajectory.csv and generations.csv.
    Plan {
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides the scenario's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Mission risks as WR,CR,LR,BR in [0, 1]; overrides the scenario.
        #[arg(long)]
        risks: Option<String>,
        /// Stream per-generation statistics to stderr.
        #[arg(long)]
        progress: bool,
    },
    /// Re-vote on a saved front with new risks, without re-optimizing.
    Vote {
        front: PathBuf,
        #[arg(long)]
        risks: String,
        /// Write the newly selected trajectory.csv (and an updated pareto.json) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the power model to a `vx,vy,vz,power_w` CSV and report agreement.
    FitPower {
        data: PathBuf,
        /// Fraction of the non-axis samples to hold out; the rest join the fit.
        #[arg(long)]
        holdout: Option<f64>,
        /// Write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-vote (or re-plan) over a coefficient grid or a risk axis.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
    },
    /// Export the distance field as `x_m,y_m,z_m,distance_m` CSV.
    SdfDump {
        scenario: PathBuf,
        #[arg(long, default_value = "sdf.csv")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Plan { scenario, out, seed, risks, progress } => {
            let mut s = load_scenario(&scenario)?;
            if let Some(seed) = seed {
                s.rng_seed = seed;
            }
            if let Some(r) = risks {
                s.risks = parse_risks(&r)?;
            }
            let mask = s.objectives.as_array();
            let result = riskplan::plan(&s, |stats| {
                if progress {
                    eprintln!("{}", generation_line(stats, mask));
                }
            })?;
            let written = write_plan(&out, &result)?;
            let sel = result.selected();
            log::info!(
                "{} Pareto members; selected #{} (time {:.2} s, safety {:.4}, energy {:.1} J) in {:.2} s",
                result.front.pareto.len(),
                result.selected_index,
                sel.costs.time_s,
                sel.costs.safety,
                sel.costs.energy_j,
                result.front.timings.total_s
            );
            for p in written {
                println!("{}", p.display());
            }
            Ok(())
        }
        Command::Vote { front, risks, out } => {
            let file = load_pareto(&front)?;
            let risks = parse_risks(&risks)?;
            let front = file.into_front();
            let env = front.environment()?;
            let plan = front.into_plan(&env, risks)?;
            let summary = serde_json::json!({
                "selected_index": plan.selected_index,
                "vote_weights": plan.weights,
                "costs": plan.selected().costs,
            });
            println!("{}", serde_json::to_string_pretty(&summary).expect("plain data"));
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
                write_json(&dir.join("pareto.json"), &ParetoFile::from_plan(&plan))?;
                write_trajectory_csv(&dir.join("trajectory.csv"), &plan.trajectory)?;
            }
            Ok(())
        }
        Command::FitPower { data, holdout, out } => {
            let samples = read_power_csv(&data)?;
            let report = calibrate(&samples, holdout)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            let m = &report.model;
            println!("model: a={} b={} c={} g={} h={} k={} hover={}", m.a, m.b, m.c, m.g, m.h, m.k, m.hover_power);
            println!("fitted on {} samples", report.fit_samples);
            match &report.validation {
                Some(ba) => println!(
                    "validation: n={} mean error {:.2} W, sd {:.2} W, limits [{:.2}, {:.2}] W",
                    ba.n, ba.mean_error, ba.std_dev, ba.lower_limit, ba.upper_limit
                ),
                None => println!("validation: no held-out samples"),
            }
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            Ok(())
        }
        Command::Sweep { scenario, spec, out } => {
            let s = load_scenario(&scenario)?;
            let spec = load_sweep_spec(&spec)?;
            let rows = run_sweep(&s, &spec)?;
            write_sweep_csv(&out, &rows)?;
            println!("{}", out.display());
            Ok(())
        }
        Command::SdfDump { scenario, out } => {
            let s = load_scenario(&scenario)?;
            let env = s.environment().map_err(|e| Error::Planning { stage: "environment", source: e })?;
            dump_sdf(&env.sdf, &out)?;
            println!("{}", out.display());
            Ok(())
        }
    }
}

fn dump_sdf(sdf: &riskplan_core::environment::SignedDistanceField, path: &Path) -> Result<()> {
    let io = |e| Error::Io { path: path.to_path_buf(), source: e };
    let mut w = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(w, "x_m,y_m,z_m,distance_m").map_err(io)?;
    let [nx, ny, nz] = sdf.dims;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let c = sdf.voxel_center(i, j, k);
                writeln!(w, "{},{},{},{}", c.x, c.y, c.z, sdf.value(i, j, k)).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

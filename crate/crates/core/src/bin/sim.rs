use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dmimo::channel::BUILTIN_SCENARIOS;
use dmimo::harness::{write_csv, Experiment, Outcome, ScenarioConfig, Scheme, SweepAxis};
use dmimo::qos::simulate_queue;

#[derive(Parser)]
#[command(
    name = "sim",
    about = "QoS-aware BS selection for distributed MIMO: Monte Carlo runs and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and evaluate one configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        scheme: Option<Scheme>,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One run per value of a parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values (load in kbit/s, delay bound in ms).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        scheme: Option<Scheme>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Queue simulation on the solved policy's service trace.
    ValidateQueue {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        frames: usize,
    },
    /// Built-in deployments.
    Scenarios {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Subcommand)]
enum ScenarioAction {
    List,
}

fn load(path: &Path, scheme: Option<Scheme>) -> dmimo::Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(s) = scheme {
        cfg.scheme = s;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn output(out: Option<&Path>) -> dmimo::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cli: Cli) -> dmimo::Result<()> {
    match cli.command {
        Command::Run {
            config,
            scheme,
            out,
        } => {
            let cfg = load(&config, scheme)?;
            let exp = Experiment::new(&cfg)?;
            let result = exp.run()?;
            if let Some(inf) = &result.infeasibility {
                eprintln!("infeasible: {} (users {:?})", inf.reason, inf.users);
            }
            let mut w = output(out.as_deref())?;
            write_csv(&mut w, &[result], None, &exp.qos, cfg.channel.frame_s)?;
            w.flush()?;
        }
        Command::Sweep {
            config,
            axis,
            values,
            scheme,
            out,
        } => {
            let cfg = load(&config, scheme)?;
            let results = dmimo::harness::sweep(&cfg, axis, &values)?;
            let mut w = output(out.as_deref())?;
            write_csv(
                &mut w,
                &results,
                Some((axis, &values)),
                &cfg.qos()?,
                cfg.channel.frame_s,
            )?;
            w.flush()?;
        }
        Command::ValidateQueue { config, frames } => {
            let cfg = load(&config, None)?;
            let exp = Experiment::new(&cfg)?;
            let solution = match exp.solve()? {
                Outcome::Solved(s) => s,
                Outcome::Infeasible(inf) => return Err(inf.to_error()),
            };
            let first = cfg.frames as u64;
            let traces = exp.service_trace(&solution, first, frames)?;
            println!(
                "user,theta,tail_decay,violation_probability,xi,mean_service,arrival,unstable"
            );
            for (n, (trace, q)) in traces.iter().zip(&exp.qos).enumerate() {
                let rep = simulate_queue(q.arrival, trace, q.delay_bound)?;
                println!(
                    "{},{},{},{},{},{},{},{}",
                    n + 1,
                    q.theta,
                    rep.tail_decay.map(|x| x.to_string()).unwrap_or_default(),
                    rep.violation_probability,
                    q.xi,
                    rep.mean_service,
                    q.arrival,
                    rep.unstable
                );
            }
        }
        Command::Scenarios {
            action: ScenarioAction::List,
        } => {
            for (name, kind) in BUILTIN_SCENARIOS {
                println!(
                    "{name}: {} BSs at {:?}",
                    kind.bs_positions().len(),
                    kind.bs_positions()
                );
                println!(
                    "{:width$}  {} users at {:?}",
                    "",
                    kind.user_positions().len(),
                    kind.user_positions(),
                    width = name.len()
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

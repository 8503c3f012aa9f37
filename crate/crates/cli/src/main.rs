use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use clamp_cli::{
    parse_seeds, run_config_file, run_preset, sweep, Preset, RunError, RunOptions, Summary,
    SweepReport,
};

const EXIT_PASS: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_FAIL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "simulate",
    version,
    about = "Lyapunov clamp controller simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML configuration file.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        no_plot: bool,
    },
    /// Run one of the built-in experiments (test1..test4).
    Preset {
        name: Preset,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        no_plot: bool,
    },
    /// Run a preset over many seeds, e.g. `--seeds 1..10` or `--seeds 1,4,9`.
    Sweep {
        preset: Preset,
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        no_plot: bool,
    },
    /// Print a preset as a TOML configuration file.
    ShowPreset {
        name: Preset,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn print_summary(s: &Summary) {
    let cfg = &s.config;
    println!(
        "variant={} seed={} termination={:?}",
        cfg.stabilizer.variant.name(),
        cfg.seed,
        s.termination
    );
    if let Some(m) = &s.metrics {
        println!("  steps               {}", m.steps);
        println!(
            "  max |e| (t >= {:>4}) {:.6}",
            m.t_settle, m.max_abs_e_after
        );
        println!("  u range             [{:.3}, {:.3}]", m.u_min, m.u_max);
        println!("  u_b range           [{:.3}, {:.3}]", m.ub_min, m.ub_max);
        println!("  override fraction   {:.4}", m.override_fraction);
        println!("  decrease violations {}", m.decrease_violations);
        println!("  chattering index    {:.3}", m.chattering_index);
    }
    if let Some(c) = &s.comparison {
        println!(
            "  max |u| {:.3} vs {} {:.3}",
            c.max_abs_u, c.counterpart, c.counterpart_max_abs_u
        );
    }
    for c in &s.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("  [{mark}] {} = {} ({})", c.name, c.value, c.bound);
    }
}

fn print_sweep(r: &SweepReport) {
    println!("{} over {} seeds", r.preset, r.seeds.len());
    for run in &r.runs {
        let mark = if run.passed { "PASS" } else { "FAIL" };
        match (&run.metrics, &run.error) {
            (_, Some(err)) => println!("  [{mark}] seed {}: {err}", run.seed),
            (Some(m), None) => println!(
                "  [{mark}] seed {}: max|e|={:.4} max|u|={:.1} violations={}",
                run.seed, m.max_abs_e_after, m.max_abs_u, m.decrease_violations
            ),
            (None, None) => println!("  [{mark}] seed {}: no metrics", run.seed),
        }
    }
    for (name, s) in &r.aggregate {
        println!(
            "  {name:<20} min={:.6} median={:.6} max={:.6}",
            s.min, s.median, s.max
        );
    }
}

fn status(passed: bool) -> ExitCode {
    ExitCode::from(if passed { EXIT_PASS } else { EXIT_FAIL })
}

fn run(cli: Cli) -> Result<ExitCode, RunError> {
    match cli.command {
        Command::Run {
            config,
            out,
            no_plot,
        } => {
            let s = run_config_file(&config, &out, RunOptions { plot: !no_plot })?;
            print_summary(&s);
            Ok(status(s.passed))
        }
        Command::Preset {
            name,
            seed,
            out,
            no_plot,
        } => {
            let s = run_preset(name, seed, &out, RunOptions { plot: !no_plot })?;
            print_summary(&s);
            Ok(status(s.passed))
        }
        Command::Sweep {
            preset,
            seeds,
            out,
            no_plot,
        } => {
            let seeds = parse_seeds(&seeds)?;
            let report = sweep(preset, &seeds, &out, RunOptions { plot: !no_plot })?;
            print_sweep(&report);
            Ok(status(report.all_passed))
        }
        Command::ShowPreset { name, seed } => {
            print!("{}", name.config(seed).to_toml());
            Ok(ExitCode::from(EXIT_PASS))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_PASS
            });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use rse_core::scenario::{
    evaluate, list_scenarios, registry, write_dumps, write_report, ScenarioConfig, ScenarioError, ScenarioOutcome,
};

/// Verification scenarios for massless wave fields and their polar form.
#[derive(Debug, Parser)]
#[command(name = "rse-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario config. The JSON report goes to stdout unless a report path is set.
    Run {
        config: PathBuf,
        #[command(flatten)]
        out: OutputFlags,
    },
    /// List registered scenarios with their check sets.
    List,
    /// Run every `*.toml` config in a directory, in parallel.
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        out: OutputFlags,
    },
}

#[derive(Debug, clap::Args)]
struct OutputFlags {
    /// Report file (`run`) or directory of `<config>.json` reports (`batch`).
    #[arg(long)]
    report: Option<PathBuf>,
    /// CSV directory; `batch` writes one subdirectory per config.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::List => {
            list();
            0
        }
        Command::Run { config, out } => match run(&config, &out) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Command::Batch { dir, out } => batch(&dir, &out),
    };
    ExitCode::from(code as u8)
}

fn list() {
    for (name, description, required) in list_scenarios() {
        println!("{name}");
        println!("    {description}");
        println!("    required keys: {}", required.join(", "));
        let info = registry::find(name).expect("listed");
        for check in info.checks {
            match check.kind {
                registry::CheckKind::AtMost => {
                    println!("    check {} <= {:e}: {}", check.name, check.tolerance, check.description)
                }
                registry::CheckKind::Flag => println!("    check {} (flag): {}", check.name, check.description),
            }
        }
    }
}

fn summarize(label: &str, outcome: &ScenarioOutcome) {
    let r = &outcome.report;
    eprintln!("{label}: {} {}", r.scenario, if r.passed { "PASS" } else { "FAIL" });
    for c in &r.checks {
        let tol = c.tolerance.map_or("flag".to_string(), |t| format!("{t:e}"));
        eprintln!(
            "  [{}] {} = {:e} (tolerance {tol})",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.value
        );
    }
}

fn load(path: &Path, out: &OutputFlags) -> Result<ScenarioConfig, ScenarioError> {
    let mut config = ScenarioConfig::from_file(path)?;
    if let Some(dir) = &out.csv_dir {
        config.output.csv_dir = Some(dir.clone());
    }
    Ok(config)
}

fn run(path: &Path, out: &OutputFlags) -> Result<i32, ScenarioError> {
    let mut config = load(path, out)?;
    if let Some(report) = &out.report {
        config.output.report_path = Some(report.clone());
    }
    let outcome = evaluate(&config, out.tolerance_scale)?;
    match &config.output.report_path {
        Some(p) => write_report(&outcome.report, p)?,
        None => print!("{}", outcome.report.to_json()),
    }
    if let Some(dir) = &config.output.csv_dir {
        write_dumps(&outcome.dumps, dir)?;
    }
    summarize(&path.display().to_string(), &outcome);
    Ok(outcome.report.exit_code())
}

fn batch_one(path: &Path, out: &OutputFlags) -> Result<ScenarioOutcome, ScenarioError> {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut config = load(path, out)?;
    if let Some(dir) = &out.report {
        config.output.report_path = Some(dir.join(format!("{stem}.json")));
    }
    if let Some(dir) = &out.csv_dir {
        config.output.csv_dir = Some(dir.join(&stem));
    }
    evaluate(&config, out.tolerance_scale)
}

fn batch(dir: &Path, out: &OutputFlags) -> i32 {
    let entries = match std::fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(source) => {
            eprintln!("error: {}", ScenarioError::Io { path: dir.to_path_buf(), source });
            return 2;
        }
    };
    let mut configs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        eprintln!("error: no *.toml configs in {}", dir.display());
        return 2;
    }

    let results: Vec<_> = configs.par_iter().map(|p| (p, batch_one(p, out))).collect();

    // outputs are written from this thread only
    let mut code = 0;
    for (path, result) in results {
        let label = path.display().to_string();
        let written = result.and_then(|outcome| {
            let output = &outcome.report.config.output;
            if let Some(p) = &output.report_path {
                write_report(&outcome.report, p)?;
            }
            if let Some(d) = &output.csv_dir {
                write_dumps(&outcome.dumps, d)?;
            }
            Ok(outcome)
        });
        match written {
            Ok(outcome) => {
                summarize(&label, &outcome);
                if !outcome.report.passed {
                    code = code.max(1);
                }
            }
            Err(e) => {
                eprintln!("{label}: error: {e}");
                code = 2;
            }
        }
    }
    code
}

use arcsection_cli::svg;
use arcsection_cli::{run, JobError, JobSpec, Report};
use clap::Parser;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Decide whether a surface germ under a linear projection admits an
/// irreducible arc-section, and construct witness arcs.
#[derive(Parser, Debug)]
#[command(name = "arcsection", version)]
struct Cli {
    /// Job file (JSON); standard input when omitted or `-`.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Report file (JSON); standard output when omitted or `-`.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write SVG renderings (dual graph, root trajectories) into this directory.
    #[arg(long, value_name = "DIR")]
    svg: Option<PathBuf>,
    /// Override the job's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the job's working digits.
    #[arg(long = "precision-digits", value_name = "DIGITS")]
    precision_digits: Option<u32>,
    /// Track every crossing, including those on discriminant branches with
    /// reducible sections.
    #[arg(long = "no-prune")]
    no_prune: bool,
    /// Record braid words along monodromy loops.
    #[arg(long)]
    braids: bool,
}

fn is_stdio(p: &Option<PathBuf>) -> bool {
    p.as_ref().map_or(true, |p| p.as_os_str() == "-")
}

fn read_input(cli: &Cli) -> std::io::Result<String> {
    let mut text = String::new();
    if is_stdio(&cli.input) {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(cli.input.as_ref().expect("path"))?;
    }
    Ok(text)
}

fn apply_overrides(spec: &mut JobSpec, cli: &Cli) {
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    if let Some(d) = cli.precision_digits {
        spec.precision.working_digits = d;
    }
    if cli.no_prune {
        spec.prune = false;
    }
    if cli.braids {
        spec.braids = true;
    }
}

fn emit(cli: &Cli, report: &Report) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    if is_stdio(&cli.out) {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        std::fs::write(cli.out.as_ref().expect("path"), text)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match read_input(&cli) {
        Err(e) => Report::invalid(None, &JobError::Json(format!("cannot read job: {e}"))),
        Ok(text) => match JobSpec::from_json(&text) {
            Err(e) => Report::invalid(None, &e),
            Ok(mut spec) => {
                apply_overrides(&mut spec, &cli);
                match spec.validate() {
                    Err(e) => Report::invalid(Some(spec), &e),
                    Ok(job) => {
                        let report = run(&job);
                        if let Some(dir) = &cli.svg {
                            let written = std::fs::create_dir_all(dir).and_then(|_| {
                                for (name, body) in svg::render(&job, &report) {
                                    std::fs::write(dir.join(&name), body)?;
                                    eprintln!("wrote {}", dir.join(&name).display());
                                }
                                Ok(())
                            });
                            if let Err(e) = written {
                                eprintln!("cannot write SVG files: {e}");
                            }
                        }
                        report
                    }
                }
            }
        },
    };
    if let Err(e) = emit(&cli, &report) {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(report.exit_code as u8)
}

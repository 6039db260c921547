//! `squeeze`: squeezed resolutions, Tate constructions and local cohomology
//! from the command line.

mod cache;
mod catalog;
mod commands;
mod failure;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use squeeze_core::{Exec, Window};

use crate::cache::Cache;
use crate::catalog::{render_report, run_checks, Catalog};
use crate::commands::{render_table, Session};
use crate::failure::Failure;

const TABLE_HELP: &str = "Output (TSV): a `# key=value ...` metadata line (command, group, order, p, seed, window, version), \
a `degree\\tdim` header, then one row per degree in the window.\n\
Exit codes: 0 ok, 1 failed check or computation error, 2 parse error, 3 computation budget exceeded.";

const GRADED_HELP: &str = "Output (TSV): a `# key=value ...` metadata line, a `j\\tdegree\\tdim` header, then one row per \
cohomological index j and internal degree.\n\
Exit codes: 0 ok, 1 computation error, 2 parse error, 3 stabilization budget exceeded.";

const CHECK_HELP: &str = "Report: one `PASS|FAIL\\tname\\tdetail` line per check, then a `# N passed, M failed` summary.\n\
Exit codes: 0 all checks pass, 1 some check failed (named on stderr), 2 parse error.";

fn parse_window(s: &str) -> Result<Window, String> {
    s.parse()
        .map_err(|e: squeeze_core::SqueezeError| e.to_string())
}

#[derive(Parser)]
#[command(
    name = "squeeze",
    version,
    about = "Squeezed resolutions and Tate constructions for finite groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GroupArgs {
    /// Group file: JSON `{ "name", "degree", "generators": [[images...], ...] }`, 0-based images.
    group: PathBuf,
    /// Characteristic of the coefficient field.
    #[arg(short, long)]
    prime: u32,
    /// Seed for the randomized module algorithms.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for cached resolution traces.
    #[arg(long, env = "SQUEEZE_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Emit JSON instead of TSV.
    #[arg(long)]
    json: bool,
}

impl GroupArgs {
    fn session(&self) -> Result<Session, Failure> {
        Session::from_file(
            &self.group,
            self.prime,
            self.seed,
            Cache::new(self.cache_dir.clone()),
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Squeezed homology H^Ω_n, i.e. dim H_n(ΩBG^∧_p; F_p).
    #[command(after_help = TABLE_HELP)]
    Loops {
        #[command(flatten)]
        args: GroupArgs,
        /// Degree range `a..b`, inclusive.
        #[arg(long = "degrees", visible_alias = "window", default_value = "0..10", allow_hyphen_values = true, value_parser = parse_window)]
        window: Window,
    },
    /// Tate squeezed homology Ĥ^Ω_n from the spliced complete resolution.
    #[command(after_help = TABLE_HELP)]
    Tate {
        #[command(flatten)]
        args: GroupArgs,
        /// Degree range `a..b`, inclusive.
        #[arg(long = "window", visible_alias = "degrees", default_value = "-4..4", allow_hyphen_values = true, value_parser = parse_window)]
        window: Window,
    },
    /// Norm map H^Ω_0 → H_Ω^0: verdict line and matrix dump.
    #[command(
        after_help = "Output: metadata line, `verdict\\t<iso|zero|other> (<p-nilpotent|not p-nilpotent>)`, \
`rank\\t<r>`, `matrix\\t<rows>x<cols>`, then the matrix rows."
    )]
    Norm {
        #[command(flatten)]
        args: GroupArgs,
    },
    /// Classical Tate cohomology dimensions dim Ĥ^n(G; F_p).
    #[command(after_help = TABLE_HELP)]
    TateClassical {
        #[command(flatten)]
        args: GroupArgs,
        /// Degree range `a..b`, inclusive.
        #[arg(long = "window", visible_alias = "degrees", default_value = "-6..6", allow_hyphen_values = true, value_parser = parse_window)]
        window: Window,
    },
    /// Local (or Čech) cohomology of a graded module over k[τ_1, …, τ_s].
    #[command(after_help = GRADED_HELP)]
    Localcoh {
        /// Module file: JSON `{ "p", "tau_degrees", "lo", "hi", "dims", "actions", "fg_bound" }`.
        module: PathBuf,
        /// Internal degree range `a..b`, inclusive.
        #[arg(long = "window", visible_alias = "degrees", default_value = "-8..8", allow_hyphen_values = true, value_parser = parse_window)]
        window: Window,
        /// Report Čech cohomology instead of local cohomology.
        #[arg(long)]
        cech: bool,
        /// Emit JSON instead of TSV.
        #[arg(long)]
        json: bool,
    },
    /// Run every expected table and invariant suite in a catalog.
    #[command(after_help = CHECK_HELP)]
    Check {
        /// Catalog file.
        catalog: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "SQUEEZE_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
        /// Run jobs one at a time.
        #[arg(long)]
        sequential: bool,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Loops { args, window } => {
            let mut s = args.session()?;
            let t = s.loops(window)?;
            Ok(render_table(&s, "loops", &t, args.json))
        }
        Command::Tate { args, window } => {
            let mut s = args.session()?;
            let t = s.tate(window)?;
            Ok(render_table(&s, "tate", &t, args.json))
        }
        Command::Norm { args } => commands::norm(&mut args.session()?, args.json),
        Command::TateClassical { args, window } => {
            let mut s = args.session()?;
            let t = s.classical(window)?;
            Ok(render_table(&s, "tate-classical", &t, args.json))
        }
        Command::Localcoh {
            module,
            window,
            cech,
            json,
        } => commands::localcoh(&module, window, cech, json),
        Command::Check {
            catalog,
            report,
            seed,
            cache_dir,
            sequential,
            json,
        } => {
            let c = Catalog::load(&catalog)?;
            let base = catalog.parent().map(PathBuf::from).unwrap_or_default();
            let exec = if sequential {
                Exec::Sequential
            } else {
                Exec::default()
            };
            let results = run_checks(&c, &base, seed, &Cache::new(cache_dir), exec);
            let text = render_report(&results, json);
            if let Some(path) = report {
                std::fs::write(&path, &text).map_err(|e| {
                    Failure::failed(format!("cannot write report {}: {e}", path.display()))
                })?;
            }
            let failed: Vec<&str> = results
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.name.as_str())
                .collect();
            if failed.is_empty() {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::failed(format!(
                    "{} check(s) failed: {}",
                    failed.len(),
                    failed.join(", ")
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}

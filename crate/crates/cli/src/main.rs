//! Command-line front end: build the state families, run verifications,
//! emit human-readable and JSON reports.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed, 2 on
//! usage, input or guard errors.

mod checks;
mod naive;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};

use nwe_core::statesets::{built_in, parse_set, write_set, StateSet};
use report::{render_text, CheckRecord, Report};

#[derive(Parser)]
#[command(
    name = "nwe",
    version,
    about = "Exact verification of orthogonal product-state families, their LOCC discrimination protocols and their activation under orthogonality-preserving measurements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in state set to a file in the text format.
    Build {
        /// g1 | g2 | g3 | g4 | tiles | shifts | strong:<params>
        /// (strong:p,q,r or strong:pA,qA,rA;pB,qB,rB;pC,qC,rC or strong:c:p,q,r)
        set_name: String,
        out_path: PathBuf,
    },
    /// Run one verification check (or `all`).
    Verify {
        /// orthogonality | redundancy | protocol | upb | irreducibility |
        /// theorem1..theorem4 | contrast | linalg | all
        check: String,
        /// built-in set name for the set-parameterized checks
        target: Option<String>,
        /// load the set from a file instead of a built-in name
        #[arg(long)]
        set: Option<PathBuf>,
        /// write the JSON report to a path, or `-` for stdout
        #[arg(long)]
        json: Option<String>,
        /// total time budget in seconds; checks not started in time error out
        #[arg(long, default_value_t = 600)]
        timeout_s: u64,
        /// run independent checks on this many threads
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Run the full check catalog, writing one JSON per check plus a summary.
    ReportAll {
        out_dir: PathBuf,
        /// also write the summary JSON to a path, or `-` for stdout
        #[arg(long)]
        json: Option<String>,
        #[arg(long, default_value_t = 600)]
        timeout_s: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Build { set_name, out_path } => cmd_build(&set_name, &out_path),
        Command::Verify {
            check,
            target,
            set,
            json,
            timeout_s,
            threads,
        } => cmd_verify(
            &check,
            target.as_deref(),
            set.as_deref(),
            json.as_deref(),
            timeout_s,
            threads,
        ),
        Command::ReportAll {
            out_dir,
            json,
            timeout_s,
            threads,
        } => cmd_report_all(&out_dir, json.as_deref(), timeout_s, threads),
    };
    std::process::exit(code);
}

fn command_line() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn cmd_build(set_name: &str, out_path: &Path) -> i32 {
    match built_in(set_name) {
        Ok(set) => {
            if let Err(e) = fs::write(out_path, write_set(&set)) {
                eprintln!("error: cannot write {}: {e}", out_path.display());
                return 2;
            }
            println!(
                "wrote {} ({} states over {:?})",
                out_path.display(),
                set.len(),
                set.spec().dims()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_set_file(path: &Path) -> Result<StateSet, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_set(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Expand a `verify` invocation into catalog check names.
fn requested_checks(check: &str, target: Option<&str>) -> Result<Vec<String>, String> {
    const SET_CHECKS: [&str; 5] = [
        "orthogonality",
        "redundancy",
        "protocol",
        "upb",
        "irreducibility",
    ];
    if check == "all" {
        return Ok(checks::catalog());
    }
    if matches!(
        check,
        "theorem1" | "theorem2" | "theorem3" | "theorem4" | "contrast" | "linalg"
    ) {
        if target.is_some() {
            return Err(format!("check {check} does not take a set argument"));
        }
        return Ok(vec![check.to_string()]);
    }
    if SET_CHECKS.contains(&check) {
        let target = target.unwrap_or("");
        if target.is_empty() {
            return Err(format!("check {check} needs a set name (or --set <file>)"));
        }
        return Ok(vec![format!("{check}:{target}")]);
    }
    Err(format!("unknown check {check:?}"))
}

fn cmd_verify(
    check: &str,
    mut target: Option<&str>,
    set_file: Option<&Path>,
    json: Option<&str>,
    timeout_s: u64,
    threads: usize,
) -> i32 {
    let loaded = match set_file {
        Some(path) => match load_set_file(path) {
            Ok(s) => {
                if target.is_none() {
                    target = Some("file");
                }
                Some(s)
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => None,
    };
    let names = match requested_checks(check, target) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let inputs = match (set_file, target) {
        (Some(p), _) => vec![format!("{}", p.display())],
        (None, Some(t)) => vec![format!("{t} (built-in)")],
        (None, None) => vec!["built-in".to_string()],
    };

    let records = run_checks(&names, loaded.as_ref(), timeout_s, threads);
    let report = Report::new(command_line(), inputs, records);
    print!("{}", render_text(&report));
    if let Some(dest) = json {
        if let Err(e) = write_json(&report, dest) {
            eprintln!("error: {e}");
            return 2;
        }
    }
    report.exit_code()
}

fn cmd_report_all(out_dir: &Path, json: Option<&str>, timeout_s: u64, threads: usize) -> i32 {
    if let Err(e) = fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return 2;
    }
    let names = checks::catalog();
    let records = run_checks(&names, None, timeout_s, threads);
    let report = Report::new(command_line(), vec!["built-in catalog".into()], records);

    for check in &report.checks {
        let single = Report::new(
            command_line(),
            vec!["built-in catalog".into()],
            vec![check.clone()],
        );
        let file = out_dir.join(format!("{}.json", check.check_name.replace(':', "_")));
        if let Err(e) = write_json(&single, &file.display().to_string()) {
            eprintln!("error: {e}");
            return 2;
        }
    }
    let summary_path = out_dir.join("summary.json");
    if let Err(e) = write_json(&report, &summary_path.display().to_string()) {
        eprintln!("error: {e}");
        return 2;
    }
    print!("{}", render_text(&report));
    if let Some(dest) = json {
        if let Err(e) = write_json(&report, dest) {
            eprintln!("error: {e}");
            return 2;
        }
    }
    report.exit_code()
}

/// Run checks with a total time budget; checks that cannot start before the
/// deadline are reported as errors. With more than one thread the
/// independent checks run concurrently; assembly is always sorted by check
/// name so the output is identical regardless of scheduling.
fn run_checks(
    names: &[String],
    set_override: Option<&StateSet>,
    timeout_s: u64,
    threads: usize,
) -> Vec<CheckRecord> {
    let deadline = Instant::now() + Duration::from_secs(timeout_s);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<CheckRecord>> = Mutex::new(Vec::new());
    let workers = threads.max(1).min(names.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= names.len() {
                    break;
                }
                let name = &names[i];
                let record = if Instant::now() > deadline {
                    CheckRecord::error(name, format!("not started within {timeout_s}s budget"))
                } else {
                    let t0 = Instant::now();
                    let mut rec = checks::run(name, set_override);
                    rec.wall_time_ms = t0.elapsed().as_millis() as u64;
                    rec
                };
                results.lock().unwrap().push(record);
            });
        }
    });

    let mut collected = results.into_inner().unwrap();
    collected.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    collected
}

fn write_json(report: &Report, dest: &str) -> Result<(), String> {
    let body = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    if dest == "-" {
        print!("{body}");
        Ok(())
    } else {
        fs::write(dest, body).map_err(|e| format!("cannot write {dest}: {e}"))
    }
}

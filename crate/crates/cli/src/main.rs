//! Command-line driver for the quantum principal bundle calculus.
//!
//! ```text
//! qpb run --scenario <file> [--out <file>] [--seed S] [--max-degree N]
//! qpb list
//! qpb gauge roundtrip --scenario <file> [--samples N] [--seed S] [--out <file>]
//! qpb dunkl <commute|hermitian|gauge> --scenario <file> [--out <file>]
//! ```
//!
//! Exit codes: 0 all checks pass, 1 some check failed, 2 unusable input,
//! 3 internal inconsistency. Reports are byte-stable for a fixed scenario and
//! seed; timing goes to stderr only.

use std::process::ExitCode;
use std::time::Instant;

use qpb_core::scenario::{catalogue_listing, run, Scenario};
use qpb_core::Error;

const USAGE: &str = "usage:
  qpb run --scenario <file> [--out <file>] [--seed S] [--max-degree N]
  qpb list
  qpb gauge roundtrip --scenario <file> [--samples N] [--seed S] [--out <file>]
  qpb dunkl <commute|hermitian|gauge> --scenario <file> [--out <file>]";

struct Flags {
    scenario: Option<String>,
    out: Option<String>,
    samples: Option<String>,
    seed: Option<String>,
    max_degree: Option<String>,
}

fn parse_flags(args: &[String]) -> Result<Flags, String> {
    let mut flags = Flags {
        scenario: None,
        out: None,
        samples: None,
        seed: None,
        max_degree: None,
    };
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let slot = match arg.as_str() {
            "--scenario" => &mut flags.scenario,
            "--out" => &mut flags.out,
            "--samples" => &mut flags.samples,
            "--seed" => &mut flags.seed,
            "--max-degree" => &mut flags.max_degree,
            other => return Err(format!("unknown flag {other}")),
        };
        match it.next() {
            Some(v) => *slot = Some(v.clone()),
            None => return Err(format!("{arg} needs a value")),
        }
    }
    Ok(flags)
}

fn load_scenario(flags: &Flags) -> Result<(Scenario, String), (String, u8)> {
    let Some(path) = &flags.scenario else {
        return Err(("missing --scenario".into(), 2));
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| (format!("cannot read {path}: {e}"), 2))?;
    let mut sc = Scenario::parse(&text).map_err(|e| (e.to_string(), 2))?;
    if let Some(seed) = &flags.seed {
        sc.override_value("scenario", "seed", seed);
        sc.override_value("gauge", "seed", seed);
    }
    if let Some(md) = &flags.max_degree {
        sc.override_value("scenario", "max-degree", md);
    }
    if let Some(samples) = &flags.samples {
        sc.override_value("gauge", "samples", samples);
    }
    Ok((sc, path.clone()))
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Internal(_) | Error::DivisibilityFailure(_) | Error::IllDefined(_) => 3,
        _ => 2,
    }
}

fn execute(sc: &Scenario, label: &str, out: Option<&str>) -> u8 {
    let start = Instant::now();
    match run(sc, label) {
        Ok(report) => {
            let doc = report.render();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &doc) {
                        eprintln!("cannot write {path}: {e}");
                        return 2;
                    }
                }
                None => print!("{doc}"),
            }
            let (pass, fail) = report.totals();
            eprintln!(
                "{label}: {pass} passed, {fail} failed in {:?}",
                start.elapsed()
            );
            if report.all_passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{label}: {e}");
            exit_code_for(&e)
        }
    }
}

fn with_scenario(rest: &[String], tweak: impl Fn(&mut Scenario)) -> u8 {
    match parse_flags(rest) {
        Ok(flags) => match load_scenario(&flags) {
            Ok((mut sc, path)) => {
                tweak(&mut sc);
                execute(&sc, &path, flags.out.as_deref())
            }
            Err((msg, code)) => {
                eprintln!("{msg}");
                code
            }
        },
        Err(msg) => {
            eprintln!("{msg}\n{USAGE}");
            2
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let code = match args.split_first() {
        Some((verb, rest)) => match verb.as_str() {
            "run" => with_scenario(rest, |_| {}),
            "list" => {
                print!("{}", catalogue_listing());
                0
            }
            "gauge" => match rest.split_first() {
                Some((sub, rest)) if sub == "roundtrip" => with_scenario(rest, |sc| {
                    sc.override_value("scenario", "kind", "gauge");
                }),
                _ => {
                    eprintln!("{USAGE}");
                    2
                }
            },
            "dunkl" => match rest.split_first() {
                Some((mode, rest))
                    if matches!(mode.as_str(), "commute" | "hermitian" | "gauge") =>
                {
                    let mode = mode.clone();
                    with_scenario(rest, move |sc| {
                        sc.override_value("scenario", "kind", "dunkl");
                        sc.override_value("dunkl", "mode", &mode);
                    })
                }
                _ => {
                    eprintln!("{USAGE}");
                    2
                }
            },
            _ => {
                eprintln!("{USAGE}");
                2
            }
        },
        None => {
            eprintln!("{USAGE}");
            2
        }
    };
    ExitCode::from(code)
}

// SPDX-License-Identifier: Apache-2.0

//! `asyncdec`: analyze, simulate, decompose and verify regular asynchronous systems.
//!
//! Exit status 0 means success, 1 a violated property (with a witness on
//! standard output), 2 an input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use asyncdec_core::boolfn::{certificates, finest_partition};
use asyncdec_core::formats;
use asyncdec_core::systems::{decompose_along, decompose_finest, Decomposition};
use asyncdec_core::verify::{run_suites, Suite};
use asyncdec_core::{
    dependency_matrix, parallel_fn, parallel_system, run, BitVec, Error, ProgressiveFunction,
    RegularSystem, Signal, Tick,
};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "asyncdec", version, about)]
struct Cli {
    /// Add the current time to every report.
    #[arg(long, global = true)]
    stamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dependency matrix, finest partition and separated-block certificates of a generator function.
    Analyze {
        /// Truth table or equation file.
        #[arg(long)]
        phi: PathBuf,
        /// Write a JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one trajectory.
    Simulate {
        #[arg(long)]
        phi: PathBuf,
        /// Initial state as a bit string, coordinate 1 first.
        #[arg(long)]
        init: String,
        /// Input signal: a file, or an inline `n=.. init=.. H=.. events=..` record.
        #[arg(long)]
        input: String,
        /// Schedule: a file, or an inline `n=.. H=.. events=..` record.
        #[arg(long)]
        rho: String,
        /// Observe input and schedule up to this tick instead of their own horizon.
        #[arg(long, allow_hyphen_values = true)]
        horizon: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a system bundle into factor bundles.
    Decompose {
        #[arg(long)]
        system: PathBuf,
        /// Coordinates of the first factor, e.g. `1,3`. Defaults to the finest partition.
        #[arg(long, value_delimiter = ',')]
        block: Option<Vec<usize>>,
        /// Where to write the factor bundles.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suites.
    Verify {
        /// 26, 27, 30, 32, 34, example1, lemma1, sync, minimality or all.
        #[arg(long)]
        thm: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per suite (each suite has its own default).
        #[arg(long)]
        cases: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parallel connection of two generator functions or two system bundles.
    Compose {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Where to write the composed table or bundle.
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Violated(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

struct Outcome {
    text: String,
    json: Value,
    /// Where the JSON report goes, if anywhere.
    out: Option<PathBuf>,
    holds: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(outcome) => match emit(outcome, cli.stamp) {
            Ok(holds) => ExitCode::from(if holds { 0 } else { 1 }),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(Failure::Violated(witness)) => {
            println!("{witness}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(mut outcome: Outcome, stamp: bool) -> Result<bool, Error> {
    if stamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        writeln!(outcome.text, "stamp: {secs}").expect("writing to a String");
        outcome.json["stamp"] = json!(secs);
    }
    print!("{}", outcome.text);
    if let Some(path) = &outcome.out {
        let body = serde_json::to_string_pretty(&outcome.json).expect("reports serialize") + "\n";
        formats::write(path, &body)?;
    }
    Ok(outcome.holds)
}

fn dispatch(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Analyze { phi, out } => analyze(&phi, out),
        Command::Simulate {
            phi,
            init,
            input,
            rho,
            horizon,
            out,
        } => simulate(&phi, &init, &input, &rho, horizon, out),
        Command::Decompose {
            system,
            block,
            out_dir,
            out,
        } => decompose(&system, block, out_dir, out),
        Command::Verify {
            thm,
            seed,
            cases,
            out,
        } => verify(&thm, seed, cases, out),
        Command::Compose {
            left,
            right,
            output,
            out,
        } => compose(&left, &right, &output, out),
    }
}

fn braces(block: &[usize]) -> String {
    let items: Vec<String> = block.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn analyze(path: &Path, out: Option<PathBuf>) -> Result<Outcome, Failure> {
    let phi = formats::load_phi(path)?;
    let deps = dependency_matrix(&phi)?;
    let partition = finest_partition(&phi)?;
    let certs = certificates(&phi, &partition)?;
    let mut text = format!("n={} m={}\ndependency matrix:\n", phi.n(), phi.m());
    for line in deps.to_string().lines() {
        writeln!(text, "  {line}").expect("writing to a String");
    }
    writeln!(text, "finest partition: {partition}").expect("writing to a String");
    if certs.is_empty() {
        text.push_str("separated blocks: none\n");
    } else {
        text.push_str("separated blocks:\n");
        for (b, rest) in &certs {
            writeln!(text, "  {} | {}", braces(b), braces(rest)).expect("writing to a String");
        }
    }
    let json = json!({
        "n": phi.n(),
        "m": phi.m(),
        "dependency_matrix": deps,
        "partition": partition.blocks(),
        "permutation": partition.permutation(),
        "separated_blocks": certs
            .iter()
            .map(|(b, rest)| json!({ "block": b, "complement": rest }))
            .collect::<Vec<_>>(),
    });
    Ok(Outcome {
        text,
        json,
        out,
        holds: true,
    })
}

fn inline_or_file<T>(
    arg: &str,
    inline: impl Fn(&str) -> Result<T, Error>,
    load: impl Fn(&Path) -> Result<T, Error>,
) -> Result<T, Error> {
    if arg.contains("events=") {
        inline(arg)
    } else {
        load(Path::new(arg))
    }
}

fn simulate(
    phi: &Path,
    init: &str,
    input: &str,
    rho: &str,
    horizon: Option<i64>,
    out: Option<PathBuf>,
) -> Result<Outcome, Failure> {
    let phi = formats::load_phi(phi)?;
    let mu: BitVec = init.parse()?;
    let mut u: Signal = inline_or_file(input, formats::parse_signal, formats::load_signal)?;
    let mut rho: ProgressiveFunction =
        inline_or_file(rho, formats::parse_schedule, formats::load_schedule)?;
    if let Some(h) = horizon {
        u = u.with_horizon(Tick(h))?;
        rho = rho.with_horizon(Tick(h))?;
    }
    let traj = run(&phi, &mu, &u, &rho)?;
    let json = serde_json::to_value(&traj).expect("trajectories serialize");
    Ok(Outcome {
        text: traj.to_string(),
        json,
        out,
        holds: true,
    })
}

fn describe(d: &Decomposition, text: &mut String) -> Value {
    let [b1, b2] = d.partition.blocks() else {
        unreachable!("binary split");
    };
    let perm: Vec<String> = d.partition.permutation().iter().map(usize::to_string).collect();
    let pc = &d.product_condition;
    let yes = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(text, "block: {} | {}", braces(b1), braces(b2));
    let _ = writeln!(text, "permutation: {}", perm.join(" "));
    let _ = writeln!(text, "status: {}", d.status);
    let _ = writeln!(text, "product initial states: {}", yes(d.product_initials));
    let _ = writeln!(
        text,
        "product schedule condition: {} (compared up to t={})",
        yes(pc.holds),
        pc.horizon
    );
    if let Some(w) = &pc.witness {
        let _ = writeln!(
            text,
            "  witness: input {} mu={} rho'={} rho''={}",
            w.input, w.mu, w.rho_first, w.rho_second
        );
    }
    for s in &d.sizes {
        let _ = writeln!(
            text,
            "input {}: |f(u)| = {}, |(f' || f'')(u)| = {}",
            s.input, s.original, s.hull
        );
    }
    json!({
        "block": b1,
        "complement": b2,
        "permutation": d.partition.permutation(),
        "status": d.status,
        "product_initials": d.product_initials,
        "product_condition": pc,
        "sizes": d.sizes,
    })
}

fn write_bundle(dir: &Option<PathBuf>, name: &str, sys: &RegularSystem) -> Result<Option<String>, Error> {
    let Some(dir) = dir else {
        return Ok(None);
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.clone(),
        source: e,
    })?;
    formats::save_system(&dir.join(name), sys)?;
    Ok(Some(name.to_string()))
}

fn decompose(
    path: &Path,
    block: Option<Vec<usize>>,
    out_dir: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<Outcome, Failure> {
    let sys = formats::load_system(path)?;
    let mut text = String::new();
    let mut written = Vec::new();
    let json = match block {
        Some(block) => {
            let partition = asyncdec_core::Partition::bipartition(&block, sys.n())?;
            let split = match decompose_along(&sys, &partition) {
                Err(Error::NotSeparated(w)) => {
                    return Err(Failure::Violated(format!(
                        "block {} is not separated: {w}",
                        braces(&partition.blocks()[0])
                    )))
                }
                other => other?,
            };
            let d = &split.steps[0];
            let report = describe(d, &mut text);
            written.extend(write_bundle(&out_dir, "first.bundle", &d.first)?);
            written.extend(write_bundle(&out_dir, "second.bundle", &d.second)?);
            report
        }
        None => {
            let fd = decompose_finest(&sys)?;
            let _ = writeln!(text, "finest partition: {}", fd.partition);
            let mut steps = Vec::new();
            for (k, d) in fd.steps.iter().enumerate() {
                let _ = writeln!(text, "split {}:", k + 1);
                let mut inner = String::new();
                steps.push(describe(d, &mut inner));
                for line in inner.lines() {
                    let _ = writeln!(text, "  {line}");
                }
            }
            let _ = writeln!(text, "status: {}", fd.status());
            for (k, f) in fd.factors.iter().enumerate() {
                let name = format!("factor{}.bundle", k + 1);
                if let Some(n) = write_bundle(&out_dir, &name, &f.system)? {
                    written.push(format!("{n} {}", braces(&f.coords)));
                }
            }
            json!({
                "partition": fd.partition.blocks(),
                "status": fd.status(),
                "steps": steps,
                "factors": fd.factors.iter().map(|f| &f.coords).collect::<Vec<_>>(),
            })
        }
    };
    for w in &written {
        let _ = writeln!(text, "wrote {w}");
    }
    Ok(Outcome {
        text,
        json,
        out,
        holds: true,
    })
}

fn verify(thm: &str, seed: u64, cases: Option<usize>, out: Option<PathBuf>) -> Result<Outcome, Failure> {
    let suites = Suite::parse_list(thm)?;
    let report = run_suites(&suites, seed, cases);
    Ok(Outcome {
        text: report.to_string(),
        json: serde_json::to_value(&report).expect("reports serialize"),
        out,
        holds: report.holds(),
    })
}

fn is_bundle(text: &str) -> bool {
    text.lines().any(|l| l.trim() == "[phi]")
}

fn compose(left: &Path, right: &Path, output: &Path, out: Option<PathBuf>) -> Result<Outcome, Failure> {
    let (lt, rt) = (formats::read(left)?, formats::read(right)?);
    let (text, json) = match (is_bundle(&lt), is_bundle(&rt)) {
        (true, true) => {
            let a = formats::load_system(left)?;
            let b = formats::load_system(right)?;
            let sys = parallel_system(&a, &b)?;
            formats::save_system(output, &sys)?;
            let names: Vec<&str> = sys.inputs().iter().map(|i| i.name.as_str()).collect();
            (
                format!(
                    "composed system: n={} m={} inputs: {}\nwrote {}\n",
                    sys.n(),
                    sys.m(),
                    names.join(", "),
                    output.display()
                ),
                json!({ "kind": "system", "n": sys.n(), "m": sys.m(), "inputs": names }),
            )
        }
        (false, false) => {
            let phi = parallel_fn(&formats::parse_phi(&lt)?, &formats::parse_phi(&rt)?)?;
            formats::save_truth_table(output, &phi)?;
            (
                format!(
                    "composed generator function: n={} m={}\nwrote {}\n",
                    phi.n(),
                    phi.m(),
                    output.display()
                ),
                json!({ "kind": "function", "n": phi.n(), "m": phi.m() }),
            )
        }
        _ => {
            return Err(Failure::Input(Error::BadSelection(
                "compose needs two bundles or two generator functions".into(),
            )))
        }
    };
    Ok(Outcome {
        text,
        json,
        out,
        holds: true,
    })
}

mod formats;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use toric_csm::chow::{degree, pushforward_cycle};
use toric_csm::constructible::{euler_characteristic, pushforward_function};
use toric_csm::corpus::Corpus;
use toric_csm::csm::{csm_class, local_data};
use toric_csm::fan::{star_subdivision, Cone};
use toric_csm::suites::{parse_suites, run_suite, SuiteOptions};

use formats::{write_json, CliError, FanFile, Loader, MorphismFile, Pushable};
use report::{class_json, function_json, number, record_json, RunReport};

#[derive(Parser)]
#[command(name = "toric-csm", version, about = "Chern-Schwartz-MacPherson classes of toric varieties")]
struct Cli {
    /// Write a JSON run report (inputs, digests, results, exit status).
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CSM class of a constructible function.
    Csm {
        fan: PathBuf,
        function: PathBuf,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Log-tangent local data of a good closure.
    LocalData {
        closure: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run a verification suite over a corpus directory or a single fan file.
    Verify {
        /// normalization, gluing, blowup, naturality, covariance, fibration,
        /// prochow, inclusion-exclusion, chow, or all
        suite: String,
        corpus: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Push a constructible function or a cycle class forward.
    Pushforward {
        morphism: PathBuf,
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Star-subdivide a fan at a cone and write the fan and blow-down files.
    Blowup {
        fan: PathBuf,
        /// Comma-separated ray indices, e.g. "0,1".
        center: String,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write the built-in corpus as fan and morphism files.
    ExportCorpus { out_dir: PathBuf },
}

struct Outcome {
    results: Vec<Value>,
    exit: i32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Vec<String> = std::env::args().skip(1).collect();
    let mut loader = Loader::new();
    let outcome = run(&cli.command, &mut loader).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        Outcome { results: Vec::new(), exit: e.exit_code() }
    });
    if let Some(path) = &cli.report {
        let report = RunReport::new(command, loader.digests(), outcome.results, outcome.exit);
        if let Err(e) = write_json(path, &report) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(outcome.exit as u8)
}

fn invalid(path: &Path) -> impl Fn(toric_csm::Error) -> CliError + '_ {
    move |e| CliError::invalid(path, e)
}

fn run(command: &Command, loader: &mut Loader) -> Result<Outcome, CliError> {
    match command {
        Command::Csm { fan, function, json } => {
            let fan_arc = loader.fan(fan)?;
            let phi = loader.function(function, Some(&fan_arc))?;
            let class = csm_class(&phi).map_err(invalid(function))?;
            let deg = degree(&class).map_err(invalid(function))?;
            let chi = euler_characteristic(&phi).map_err(invalid(function))?;
            if *json {
                println!("{}", json!({ "csm": class_json(&class), "degree": number(&deg) }));
            } else {
                println!("csm = {class}");
                println!("degree = {deg}");
            }
            let result = json!({
                "check": "csm",
                "instance": function.display().to_string(),
                "pass": deg == chi,
                "lhs": class_json(&class),
                "rhs": function_json(&phi),
                "degree_lhs": number(&deg),
                "degree_rhs": number(&chi),
            });
            Ok(Outcome { results: vec![result], exit: if deg == chi { 0 } else { 1 } })
        }
        Command::LocalData { closure, json } => {
            let gc = loader.closure(closure)?;
            let class = local_data(&gc).map_err(invalid(closure))?;
            let deg = degree(&class).map_err(invalid(closure))?;
            if *json {
                println!("{}", json!({ "local_data": class_json(&class), "degree": number(&deg) }));
            } else {
                println!("local data = {class}");
                println!("degree = {deg}");
            }
            let result = json!({
                "check": "local-data",
                "instance": closure.display().to_string(),
                "pass": true,
                "lhs": class_json(&class),
                "rhs": {},
                "degree_lhs": number(&deg),
                "degree_rhs": Value::Null,
            });
            Ok(Outcome { results: vec![result], exit: 0 })
        }
        Command::Verify { suite, corpus, seed, trials } => {
            let suites = parse_suites(suite).ok_or_else(|| CliError::Parse {
                path: suite.clone(),
                message: "unknown suite".to_string(),
            })?;
            let corpus = loader.corpus(corpus)?;
            let options = SuiteOptions { seed: *seed, trials: *trials };
            let mut results = Vec::new();
            let mut failed = 0usize;
            for s in suites {
                let records = run_suite(s, &corpus, options).map_err(|e| CliError::Invalid {
                    path: e.instance.clone(),
                    message: e.error.to_string(),
                })?;
                for r in &records {
                    let line = record_json(r);
                    println!("{line}");
                    if !r.pass {
                        failed += 1;
                        eprintln!("FAIL {} {}", r.check, r.instance);
                    }
                    results.push(line);
                }
            }
            eprintln!("{} checks, {} failed", results.len(), failed);
            Ok(Outcome { results, exit: if failed == 0 { 0 } else { 1 } })
        }
        Command::Pushforward { morphism, input, json } => {
            let m = loader.morphism(morphism)?;
            let (lhs, rhs, deg_in, deg_out, text) = match loader.pushable(input, Some(m.source()))? {
                Pushable::Function(phi) => {
                    let out = pushforward_function(&m, &phi).map_err(invalid(morphism))?;
                    let d_in = euler_characteristic(&phi).map_err(invalid(input))?;
                    let d_out = euler_characteristic(&out).map_err(invalid(morphism))?;
                    let text = format!("f_* = {out}\neuler characteristic = {d_out}");
                    (function_json(&phi), function_json(&out), d_in, d_out, text)
                }
                Pushable::Class(alpha) => {
                    let out = pushforward_cycle(&m, &alpha).map_err(invalid(morphism))?;
                    let d_in = degree(&alpha).map_err(invalid(input))?;
                    let d_out = degree(&out).map_err(invalid(morphism))?;
                    let text = format!("f_* = {out}\ndegree = {d_out}");
                    (class_json(&alpha), class_json(&out), d_in, d_out, text)
                }
            };
            if *json {
                println!("{}", json!({ "pushforward": rhs, "degree": number(&deg_out) }));
            } else {
                println!("{text}");
            }
            let pass = deg_in == deg_out;
            let result = json!({
                "check": "pushforward",
                "instance": format!("{}:{}", morphism.display(), input.display()),
                "pass": pass,
                "lhs": lhs,
                "rhs": rhs,
                "degree_lhs": number(&deg_in),
                "degree_rhs": number(&deg_out),
            });
            Ok(Outcome { results: vec![result], exit: if pass { 0 } else { 1 } })
        }
        Command::Blowup { fan, center, out_dir } => {
            let parent = loader.fan(fan)?;
            let cone = Cone::parse_key(center).ok_or_else(|| CliError::Parse {
                path: center.clone(),
                message: "malformed center; expected comma-separated ray indices".to_string(),
            })?;
            let b = star_subdivision(&parent, &cone).map_err(invalid(fan))?;
            fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
            let stem = fan.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "fan".into());
            let base = format!("{stem}-bl-{}", cone.rays().iter().map(usize::to_string).collect::<Vec<_>>().join("-"));
            let fan_path = out_dir.join(format!("{base}.json"));
            let morphism_path = out_dir.join(format!("{base}-blowdown.json"));
            let target = fs::canonicalize(fan).map_err(|e| CliError::Io(format!("{}: {e}", fan.display())))?;
            write_json(&fan_path, &FanFile::of(&b.fan))?;
            write_json(
                &morphism_path,
                &MorphismFile {
                    source: format!("{base}.json"),
                    target: target.display().to_string(),
                    matrix: (0..parent.dim())
                        .map(|i| (0..parent.dim()).map(|j| i64::from(i == j)).collect())
                        .collect(),
                },
            )?;
            // the emitted files must load back to the same fan and map
            let reloaded = loader.morphism(&morphism_path)?;
            if **reloaded.source() != *b.fan {
                return Err(CliError::invalid(&fan_path, "emitted fan does not round-trip"));
            }
            let max = b.fan.max_cones().len();
            println!(
                "{}",
                json!({
                    "fan": fan_path.display().to_string(),
                    "morphism": morphism_path.display().to_string(),
                    "name": b.fan.name(),
                    "new_ray": b.new_ray,
                    "max_cones": max,
                })
            );
            let result = json!({
                "check": "blowup",
                "instance": format!("{}:{{{cone}}}", parent.name()),
                "pass": true,
                "lhs": {},
                "rhs": {},
                "degree_lhs": Value::Null,
                "degree_rhs": Value::Null,
            });
            Ok(Outcome { results: vec![result], exit: 0 })
        }
        Command::ExportCorpus { out_dir } => {
            let corpus = Corpus::builtin();
            let fans_dir = out_dir.join("fans");
            let morphisms_dir = out_dir.join("morphisms");
            for d in [&fans_dir, &morphisms_dir] {
                fs::create_dir_all(d).map_err(|e| CliError::Io(format!("{}: {e}", d.display())))?;
            }
            for fan in &corpus.fans {
                write_json(&fans_dir.join(format!("{}.json", fan.name())), &FanFile::of(fan))?;
            }
            for m in &corpus.morphisms {
                let map = m.morphism.map();
                let file = MorphismFile {
                    source: format!("../fans/{}.json", m.morphism.source().name()),
                    target: format!("../fans/{}.json", m.morphism.target().name()),
                    matrix: (0..map.rows())
                        .map(|i| (0..map.cols()).map(|j| i64::try_from(&map[(i, j)]).expect("small entries")).collect())
                        .collect(),
                };
                write_json(&morphisms_dir.join(format!("{}.json", m.name)), &file)?;
            }
            println!("{}", json!({ "fans": corpus.fans.len(), "morphisms": corpus.morphisms.len() }));
            Ok(Outcome { results: Vec::new(), exit: 0 })
        }
    }
}

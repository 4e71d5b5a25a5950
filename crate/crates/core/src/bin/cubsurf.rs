use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cubsurf::census::Census;
use cubsurf::forms::CubicForm;
use cubsurf::gf2k::gf2;
use cubsurf::grouptool::{pgl, stabilizer};
use cubsurf::idealtest::{is_smooth_with, Method, DEFAULT_KMAX};
use cubsurf::jordan::jordan_constant;
use cubsurf::suite::{run_suite, stringify_numbers, Context, SuiteId, SuiteOptions};

#[derive(Parser)]
#[command(name = "cubsurf", version, about = "Cubic surfaces over GF(2) and Jordan constants of Cr2(F_q)")]
struct Cli {
    /// Write the JSON report to PATH ("-" for stdout).
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Census cache file; read if it exists, written otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,
    /// Worker threads for the parallel scans.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Groebner,
    Search,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Classify all nonzero cubic forms over F_2 up to PGL_4(F_2).
    ClassifyCubics,
    /// Automorphism group of a form given as a 5-digit hex word.
    Aut {
        #[arg(long)]
        form: String,
        /// List the group elements as matrices.
        #[arg(long)]
        elements: bool,
    },
    /// Smoothness of a form given as a 5-digit hex word.
    Smooth {
        #[arg(long)]
        form: String,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        #[arg(long, default_value_t = DEFAULT_KMAX, value_parser = clap::value_parser!(u32).range(1..=8))]
        kmax: u32,
    },
    /// Jordan constant of the plane Cremona group over F_q.
    Jordan {
        #[arg(long, value_parser = ["2", "4", "8"])]
        q: String,
        /// Materialize PGL_3(F_8) and check it is simple (minutes, ~2 GB).
        #[arg(long)]
        verify_pgl3_f8: bool,
        #[arg(long, value_name = "PATH")]
        census_cache: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: SuiteId,
        #[arg(long)]
        verify_pgl3_f8: bool,
    },
}

/// An error attributable to the invocation rather than to a failed check.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn emit(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let v = stringify_numbers(serde_json::to_value(value)?);
    let text = serde_json::to_string_pretty(&v)? + "\n";
    if path == Path::new("-") {
        print!("{text}");
    } else {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn parse_form(s: &str) -> Result<CubicForm> {
    match CubicForm::from_hex(s) {
        Ok(f) if !f.is_zero() => Ok(f),
        Ok(_) => Err(Usage("the zero form does not define a surface".into()).into()),
        Err(e) => Err(Usage(format!("--form {s}: {e}")).into()),
    }
}

fn load_census(path: Option<&Path>) -> Result<Census> {
    Census::load_or_compute(path).map_err(|e| Usage(e.to_string()).into())
}

fn run(cli: Cli) -> Result<bool> {
    let json = cli.json.as_deref();
    match cli.command {
        Command::ClassifyCubics => {
            let census = load_census(cli.cache.as_deref())?;
            let report = census.report();
            println!("forms: {}", report.total_forms);
            println!("orbits: {} ({} smooth)", report.orbits, report.smooth_orbits);
            println!("orbit-stabilizer identity: {}", report.orbit_stabilizer_holds);
            println!(
                "max smooth automorphism order: {} on {:?}",
                report.max_smooth_aut, report.max_smooth_aut_reps
            );
            emit(json, &report)?;
            Ok(report.total_forms == (1 << 20) - 1 && report.orbit_stabilizer_holds)
        }
        Command::Aut { form, elements } => {
            let f = parse_form(&form)?;
            let group = pgl(gf2(), 4)?;
            let st = stabilizer(&group, &f)?;
            println!("{f}: automorphism group of order {}", st.order());
            let mut out = json!({ "form": f.to_hex()?, "equation": f.to_string(), "order": st.order() });
            if elements {
                let mats: Vec<String> = st.elements().iter().map(|g| g.matrix().to_hex()).collect();
                for m in &mats {
                    println!("  {m}");
                }
                out["elements"] = Value::from(mats);
            }
            emit(json, &out)?;
            Ok(true)
        }
        Command::Smooth { form, method, kmax } => {
            let f = parse_form(&form)?;
            let method = match method {
                MethodArg::Groebner => Method::Groebner,
                MethodArg::Search => Method::Search,
                MethodArg::Both => Method::Both,
            };
            let v = is_smooth_with(&f, method, kmax)?;
            let witness = v.witness.map(|w| json!({ "k": w.k, "point": w.point.coords() }));
            println!("{f}: smooth = {} ({:?})", v.smooth, v.certificate);
            if let Some(w) = v.witness {
                println!("  singular point over GF(2^{}): {:?}", w.k, w.point.coords());
            }
            emit(
                json,
                &json!({ "form": f.to_hex()?, "smooth": v.smooth, "certificate": v.certificate, "witness": witness }),
            )?;
            Ok(true)
        }
        Command::Jordan { q, verify_pgl3_f8, census_cache } => {
            let q: u64 = q.parse()?;
            let census = match q {
                2 => Some(load_census(census_cache.as_deref().or(cli.cache.as_deref()))?),
                _ => None,
            };
            let report = match jordan_constant(q, census.as_ref(), verify_pgl3_f8) {
                Ok(r) => r,
                Err(e) => {
                    println!("FAIL {e}");
                    return Ok(false);
                }
            };
            println!("J(Cr2(F{q})) = {}", report.constant);
            for i in &report.ingredients {
                println!("  [{:?}] {}: {}", i.status, i.name, i.detail);
            }
            emit(json, &report)?;
            Ok(true)
        }
        Command::Verify { suite, verify_pgl3_f8 } => {
            let mut ctx = Context::new(SuiteOptions { cache: cli.cache.clone(), verify_pgl3_f8 });
            let report = run_suite(suite, &mut ctx);
            for c in &report.checks {
                println!("{c}");
            }
            println!("{} {}", if report.pass { "PASS" } else { "FAIL" }, report.suite);
            emit(json, &report)?;
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

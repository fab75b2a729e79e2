//! `stquad`: command-line access to sequences, decompositions, rule
//! generation and verification, and the numerical experiments.
//!
//! Exit codes: 0 success, 1 verification failure or runtime error, 2 rule
//! generation found nothing, 64 usage error. Errors go to stderr as single
//! `error: <kind>: <message>` lines.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stquad::decomp::{decomposition_signature, enumerate_decompositions};
use stquad::elements::duffy_rule;
use stquad::harness::{self, TestFunction};
use stquad::par::Execution;
use stquad::polytope_seq::{format_removed, sequence_a, sequence_b, vertex_count_profile};
use stquad::quadgen::{search, verify_rule_with, SolveConfig};
use stquad::rules::{bundled_rules, read_rule_file, write_rule, Catalog, QuadratureRule};
use stquad::{Dd, ElementKind, Error};

const RULES_DIR_ENV: &str = "STQUAD_RULES_DIR";

#[derive(Parser, Debug)]
#[command(name = "stquad", version, about = "Symmetric quadrature on 4D space-time elements")]
struct Cli {
    /// Worker threads for parallel work (1 runs sequentially).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory of extra rule files (`<element>/<strength>-<npoints>.txt`).
    #[arg(long, global = true, env = RULES_DIR_ENV)]
    rules_dir: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Variant {
    A,
    B,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a degeneration sequence of the d-cube.
    Sequences {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum)]
        variant: Variant,
        /// Also print vertex counts.
        #[arg(long)]
        counts: bool,
    },
    /// List orbital decompositions of a point count.
    Decomps {
        #[arg(long)]
        element: ElementKind,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        max_s1: usize,
    },
    /// Search for a fully symmetric rule and write it on success.
    Generate {
        #[arg(long)]
        element: ElementKind,
        #[arg(long)]
        strength: usize,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        /// Require a double-double residual (1e-30).
        #[arg(long)]
        extended: bool,
        /// Output file (default: `<rules-dir or .>/<element>/<strength>-<points>.txt`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a rule file against exact monomial integrals.
    Verify {
        #[arg(long)]
        rule: PathBuf,
        /// Defaults to the strength recorded in the file.
        #[arg(long)]
        strength: Option<usize>,
        #[arg(long)]
        extended: bool,
    },
    /// Random-polynomial exactness table as CSV.
    Exactness {
        #[arg(long)]
        element: ElementKind,
        #[arg(long, value_delimiter = ',', default_values_t = [6usize, 8])]
        strengths: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        p_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        extended: bool,
        /// CSV destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid convergence table as CSV.
    Convergence {
        #[arg(long)]
        element: ElementKind,
        #[arg(long, value_delimiter = ',', default_values_t = [6usize, 8])]
        strengths: Vec<usize>,
        #[arg(long, default_value = "f1")]
        function: TestFunction,
        /// Subdivision counts.
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4])]
        m: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a collapsed tensor-product (Duffy) rule.
    ExportDuffy {
        #[arg(long)]
        element: ElementKind,
        #[arg(long)]
        axis_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List available rules against the published point counts.
    Catalog,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(Error),
    Verify,
    NotFound,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(m) => Failure::Usage(m),
            other => Failure::Lib(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parameter(_) => "parameter",
        Error::Domain(_) => "domain",
        Error::UnsupportedKind(_) => "unsupported",
        Error::Parse { .. } => "parse",
        Error::Validation(_) => "validation",
        Error::Io(_) => "io",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: usage: {m}");
            ExitCode::from(64)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {}: {e}", error_kind(&e));
            ExitCode::from(1)
        }
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::NotFound) => ExitCode::from(2),
    }
}

fn execution(cli: &Cli) -> Result<Execution, Failure> {
    match cli.jobs {
        Some(0) => Err(Failure::Usage("--jobs must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            // a second build only fails if a pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::default()),
    }
}

fn catalog(cli: &Cli) -> Result<Catalog, Failure> {
    let mut rules = bundled_rules().rules().to_vec();
    if let Some(dir) = &cli.rules_dir {
        rules.extend(Catalog::load_dir(dir)?.rules().iter().cloned());
    }
    Ok(Catalog::new(rules))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn rules_for(cat: &Catalog, kind: ElementKind, strengths: &[usize]) -> Result<Vec<QuadratureRule>, Failure> {
    strengths
        .iter()
        .map(|&s| {
            cat.get(kind, s).cloned().ok_or_else(|| Failure::Usage(format!("no {kind} rule of strength {s} available")))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let exec = execution(cli)?;
    match &cli.command {
        Command::Sequences { dim, variant, counts } => {
            let seq = match variant {
                Variant::A => sequence_a(*dim)?,
                Variant::B => sequence_b(*dim)?,
            };
            let mut out = output(None)?;
            write!(out, "{}", format_removed(&seq))?;
            if *counts {
                let c: Vec<String> = vertex_count_profile(&seq).iter().map(ToString::to_string).collect();
                writeln!(out, "# vertex counts: {}", c.join(" "))?;
            }
            out.flush()?;
        }
        Command::Decomps { element, points, max_s1 } => {
            let all = enumerate_decompositions(*element, *points, *max_s1)?;
            let mut out = output(None)?;
            for d in &all {
                writeln!(out, "{}", decomposition_signature(d)?)?;
            }
            writeln!(out, "# {} decompositions", all.len())?;
            out.flush()?;
        }
        Command::Generate { element, strength, points, seed, starts, extended, out } => {
            let base = if *extended { SolveConfig::extended() } else { SolveConfig::default() };
            let cfg = SolveConfig { n_starts: *starts, rng_seed: *seed, exec, ..base };
            let results = search(*element, *strength, *points, &cfg)?;
            match results.iter().find_map(|r| r.rule.as_ref()) {
                Some(rule) => {
                    let path = out.clone().unwrap_or_else(|| {
                        cli.rules_dir.clone().unwrap_or_else(|| PathBuf::from(".")).join(rule.file_name())
                    });
                    let mut w = output(Some(&path))?;
                    write_rule(rule, &mut w)?;
                    w.flush()?;
                    println!("wrote {}", path.display());
                }
                None => {
                    let best = results.first().map_or(f64::INFINITY, |r| r.residual);
                    println!("no admissible rule; tried {} decompositions, best residual {best:.3e}", results.len());
                    return Err(Failure::NotFound);
                }
            }
        }
        Command::Verify { rule, strength, extended } => {
            let r = read_rule_file(rule)?;
            let s = strength.unwrap_or(r.strength);
            let rep =
                if *extended { verify_rule_with::<Dd>(&r, s, 1e-25) } else { verify_rule_with::<f64>(&r, s, 1e-12) };
            println!(
                "{} strength {} points {}: max error {:.3e}, weights positive {}, points inside {}",
                r.kind,
                s,
                r.n_points(),
                rep.max_error,
                rep.weights_positive,
                rep.points_inside
            );
            if let Some(e) = rep.failing_monomial {
                println!("failing monomial exponents {e:?}");
            }
            if !rep.passed() {
                println!("FAIL");
                return Err(Failure::Verify);
            }
            println!("PASS");
        }
        Command::Exactness { element, strengths, p_max, seed, extended, out } => {
            let cat = catalog(cli)?;
            let rules = rules_for(&cat, *element, strengths)?;
            let refs: Vec<&QuadratureRule> = rules.iter().collect();
            let rows = if *extended {
                harness::exactness_experiment::<Dd>(&refs, *p_max, *seed)?
            } else {
                harness::exactness_experiment::<f64>(&refs, *p_max, *seed)?
            };
            let mut w = output(out.as_deref())?;
            harness::write_exactness_csv(&rows, &mut w)?;
            w.flush()?;
        }
        Command::Convergence { element, strengths, function, m, out } => {
            let cat = catalog(cli)?;
            let rules = rules_for(&cat, *element, strengths)?;
            let mut series = Vec::new();
            for rule in &rules {
                let s = harness::convergence_experiment(rule, *function, m, exec)?;
                log::info!("{} strength {} {}: slope {:?}", s.kind, s.strength, s.function, s.slope);
                series.push(s);
            }
            let mut w = output(out.as_deref())?;
            harness::write_convergence_csv(&series, &mut w)?;
            w.flush()?;
        }
        Command::ExportDuffy { element, axis_points, out } => {
            let rule = duffy_rule(*element, *axis_points)?;
            let mut w = output(out.as_deref())?;
            write_rule(&rule, &mut w)?;
            w.flush()?;
        }
        Command::Catalog => {
            let cat = catalog(cli)?;
            let mut out = output(None)?;
            writeln!(out, "element,strength,points,published_points,source")?;
            for e in cat.entries() {
                let reference = e.reference_points.map_or_else(String::new, |n| n.to_string());
                writeln!(out, "{},{},{},{},{:?}", e.kind, e.strength, e.n_points, reference, e.provenance)?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

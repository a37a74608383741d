use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;

use satake_density::density::{dirichlet_ratio, natural_ratio, sieve};
use satake_density::series::{coeff_bound, expand};
use satake_density::shell::emit;
use satake_density::shell::experiment::{self, load_data};
use satake_density::shell::{
    arrange, ingest, run_experiment, ExperimentConfig, IngestedData, InputFormat, ShellError,
};
use satake_density::sim::{sample_uniform, substream};
use satake_density::verify::{exceptional_set, extremal_tuple, lemma_ineq_check};
use satake_density::{FactorKind, SatakeTuple};

#[derive(Parser)]
#[command(
    name = "satake-density",
    version,
    about = "Hecke eigenvalue density experiments"
)]
struct Cli {
    /// Worker threads. Changes speed only, never output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Spin,
    Std,
}

impl From<Kind> for FactorKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Spin => FactorKind::Spin,
            Kind::Std => FactorKind::Std,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Count the primes up to a bound, optionally writing them one per line.
    Sieve {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the configured synthetic assignment and write it to DIR/assignment.{csv,json}.
    Sample {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Validate an eigenvalue file and summarize it.
    Ingest {
        input: PathBuf,
        /// Inferred from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Needed for files holding only `mu`.
        #[arg(long)]
        genus: Option<usize>,
    },
    /// Dirichlet coefficients of one local factor.
    Expand {
        /// Satake angles theta0,...,thetaG in radians.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        theta: Vec<f64>,
        #[arg(long, value_enum, default_value = "spin")]
        kind: Kind,
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Check the exceedance inequality on random tuples and at the extremal tuple.
    CheckLemmas {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Density ratios of the exceptional sets, printed as tables.
    Density {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Bounds and margins per threshold; writes every output file when --out is given.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full run: write report.json and the CSV series into DIR
    /// (default: `[output] dir` from the configuration).
    Report {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(run: &RunArgs) -> Result<ExperimentConfig, ShellError> {
    let mut cfg = ExperimentConfig::load(&run.config)?;
    if let Some(seed) = run.seed {
        cfg.override_seed(seed);
    }
    Ok(cfg)
}

fn input_format(path: &Path, format: Option<Format>) -> Result<InputFormat, ShellError> {
    match format {
        Some(Format::Csv) => Ok(InputFormat::Csv),
        Some(Format::Json) => Ok(InputFormat::Json),
        None => InputFormat::from_path(path).ok_or_else(|| ShellError::Config {
            field: "--format".to_string(),
            message: format!("cannot infer the format of {}", path.display()),
        }),
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ShellError + '_ {
    move |source| ShellError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn run(cli: Cli) -> Result<(), ShellError> {
    match cli.command {
        Command::Sieve { bound, out } => {
            let table = sieve(bound)?;
            println!("pi({bound}) = {}", table.len());
            if let Some(path) = out {
                let mut text = String::with_capacity(table.len() * 8);
                for p in table.primes() {
                    text.push_str(&p.to_string());
                    text.push('\n');
                }
                std::fs::write(&path, text).map_err(io(&path))?;
            }
        }
        Command::Sample { run, out, format } => {
            let cfg = load_config(&run)?;
            let IngestedData::Satake(a) = load_data(&cfg)? else {
                return Err(ShellError::Config {
                    field: "sampler".to_string(),
                    message: "sample needs a [sampler] section".to_string(),
                });
            };
            std::fs::create_dir_all(&out).map_err(io(&out))?;
            let path = match format {
                Format::Csv => {
                    let p = out.join("assignment.csv");
                    emit::write_assignment_csv(&p, &a)?;
                    p
                }
                Format::Json => {
                    let p = out.join("assignment.json");
                    emit::write_assignment_json(&p, &a)?;
                    p
                }
            };
            println!(
                "{} tuples of genus {} -> {}",
                a.tuples().len(),
                a.genus(),
                path.display()
            );
        }
        Command::Ingest {
            input,
            format,
            genus,
        } => {
            let records = ingest(&input, input_format(&input, format)?)?;
            let n = records.len();
            let data = arrange(records, genus)?;
            let e = data.eigenvalues()?;
            let kind = match data {
                IngestedData::Satake(_) => "satake angles",
                IngestedData::MuOnly(_) => "bare mu",
            };
            println!(
                "{n} records, genus {}, {kind}, every prime up to {} present",
                e.genus,
                e.table.bound()
            );
        }
        Command::Expand { theta, kind, depth } => {
            let genus = theta.len().saturating_sub(1);
            let t = SatakeTuple::new(genus, theta)?;
            if let Some(v) = t.validate(satake_density::satake::TOL_CONSTRAINT).first() {
                return Err(ShellError::Config {
                    field: "--theta".to_string(),
                    message: v.to_string(),
                });
            }
            let kind = FactorKind::from(kind);
            let series = expand(&t.local_factor(kind), depth)?;
            println!("r,coeff,bound");
            for (r, c) in series.coeffs.iter().enumerate() {
                println!("{r},{c},{}", coeff_bound(kind, genus, r as u64)?);
            }
        }
        Command::CheckLemmas {
            genus,
            c,
            samples,
            seed,
        } => {
            let mut applicable = 0u64;
            let mut failures = 0u64;
            let mut worst = f64::INFINITY;
            for i in 0..samples {
                let mut rng = substream(seed, i);
                let t = sample_uniform(genus, &mut rng)?;
                // thresholds at or below |mu| keep every draw applicable
                let scale: f64 = rng.random_range(0.0..1.0);
                let threshold = t.mu()?.abs() * (1.0 - scale);
                if threshold <= 0.0 {
                    continue;
                }
                let check = lemma_ineq_check(&t, threshold)?;
                if check.applicable {
                    applicable += 1;
                    worst = worst.min(check.lhs - check.rhs);
                    if !check.holds() {
                        failures += 1;
                    }
                }
            }
            let ext = extremal_tuple(genus, c)?;
            let eq = lemma_ineq_check(&ext, ext.mu()?.abs())?;
            println!(
                "samples={samples} applicable={applicable} failures={failures} min_slack={worst}"
            );
            println!(
                "extremal: mu={} lhs={} rhs={} gap={}",
                ext.mu()?,
                eq.lhs,
                eq.rhs,
                (eq.lhs - eq.rhs).abs()
            );
        }
        Command::Density { run } => {
            let cfg = load_config(&run)?;
            let e = load_data(&cfg)?.eigenvalues()?;
            let x_grid = cfg.x_grid_for(e.table.bound());
            for &c in &cfg.c_values {
                let set = exceptional_set(&e, c, cfg.mode)?;
                println!("c={c} members={}", set.len());
                for &s in &cfg.s_grid {
                    println!("  s={s} dirichlet={}", dirichlet_ratio(&set, s)?);
                }
                for &x in &x_grid {
                    println!("  x={x} natural={}", natural_ratio(&set, x)?);
                }
            }
        }
        Command::Verify { run, out } => {
            let cfg = load_config(&run)?;
            let exp = experiment::compute(&cfg)?;
            if let Some(dir) = &out {
                experiment::write_outputs(&exp, dir)?;
            }
            println!("c,mode,bound,max_dirichlet,margin,members,suspect_pole");
            for b in &exp.report.bounds {
                println!(
                    "{},{},{},{},{},{},{}",
                    b.c,
                    b.mode,
                    b.bound,
                    b.diagnostics.upper_dirichlet,
                    b.margin,
                    b.diagnostics.members,
                    b.diagnostics
                        .divergence
                        .as_ref()
                        .is_some_and(|d| d.suspect_pole)
                );
            }
        }
        Command::Report { run, out } => {
            let cfg = load_config(&run)?;
            let out = out
                .or_else(|| cfg.output_dir.clone())
                .ok_or_else(|| ShellError::Config {
                    field: "--out".to_string(),
                    message: "no output directory on the command line or in [output]".to_string(),
                })?;
            let report = run_experiment(&cfg, &out)?;
            let negative = report.bounds.iter().filter(|b| b.margin < 0.0).count();
            println!(
                "{} thresholds, {negative} with negative margin -> {}",
                report.bounds.len(),
                out.join("report.json").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                ShellError::Io { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

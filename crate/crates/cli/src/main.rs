use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tetracenter::catalog::{
    builtin_catalog, instantiate_all, load_catalog_file, Catalog, SAMPLE_R,
};
use tetracenter::model::{generate, validate, EdgeLengths, TetraFamily};
use tetracenter::properties::{Precision, PropertyId};
use tetracenter::scalar::DEFAULT_PRECISION_CAP;
use tetracenter::screen::{
    hunt_counterexample, registry, run_screen, verify_all, Claim, ScreenPlan,
};

/// Screens triangle centers placed on the faces of tetrahedra.
#[derive(Parser)]
#[command(name = "tetracenter", version)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Args)]
struct Common {
    /// Random seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Extra catalog files added to the built-in library.
    #[arg(long)]
    catalog: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate random instances of a family as JSON.
    Gen {
        #[arg(long, value_parser = parse_family)]
        family: TetraFamily,
        #[arg(long, short = 'n', default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run a center × property matrix. Property failures are results and exit 0.
    Screen {
        #[arg(long, value_parser = parse_family, default_value = "general")]
        family: TetraFamily,
        /// Comma-separated center specs, `all`, or `rational`.
        #[arg(long)]
        centers: String,
        /// Comma-separated property numbers or names, or `all`.
        #[arg(long, default_value = "all")]
        properties: String,
        #[arg(long, short = 'n', default_value_t = 20)]
        n: usize,
        /// Precision cap for interval evaluation.
        #[arg(long, default_value_t = DEFAULT_PRECISION_CAP)]
        precision_bits: u32,
        /// JSON instances (as written by `gen`) to use instead of generated ones.
        #[arg(long)]
        instances: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Verify registered theorem cases (`all` or case ids). Exits 1 if any case fails.
    Verify {
        #[arg(required = true)]
        cases: Vec<String>,
        /// Instances per case (default: each case's own count).
        #[arg(long, short = 'n')]
        n: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_PRECISION_CAP)]
        precision_bits: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Search for counterexamples to a uniqueness result or conjecture.
    Hunt {
        #[arg(value_parser = parse_claim)]
        claim: Claim,
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// List theorem cases, catalog centers, properties or hunt claims.
    List {
        #[arg(value_enum)]
        what: ListWhat,
        #[arg(long)]
        catalog: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ListWhat {
    Cases,
    Centers,
    Properties,
    Claims,
}

fn parse_family(s: &str) -> Result<TetraFamily, String> {
    s.parse()
}

fn parse_claim(s: &str) -> Result<Claim, String> {
    s.parse()
}

fn load_catalog(files: &[PathBuf]) -> Result<Catalog> {
    let mut cat = builtin_catalog().clone();
    for f in files {
        cat.extend(&load_catalog_file(f)?)
            .with_context(|| format!("merging {}", f.display()))?;
    }
    Ok(cat)
}

/// Splits on commas outside parentheses and brackets.
fn split_specs(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    out.into_iter()
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect()
}

fn center_specs(arg: &str, cat: &Catalog) -> Vec<String> {
    match arg.trim() {
        "all" => instantiate_all(cat, &SAMPLE_R)
            .iter()
            .map(|c| c.label())
            .collect(),
        "rational" => instantiate_all(cat, &SAMPLE_R)
            .iter()
            .filter(|c| c.rational_only())
            .map(|c| c.label())
            .collect(),
        other => split_specs(other),
    }
}

fn property_ids(arg: &str) -> Result<Vec<PropertyId>> {
    if arg.trim() == "all" {
        return Ok(PropertyId::ALL.to_vec());
    }
    split_specs(arg)
        .iter()
        .map(|p| p.parse::<PropertyId>().map_err(anyhow::Error::msg))
        .collect()
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn render(
    format: Format,
    json: impl FnOnce() -> String,
    csv: impl FnOnce() -> String,
    md: impl FnOnce() -> String,
) -> String {
    match format {
        Format::Json => json(),
        Format::Csv => csv(),
        Format::Md => md(),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()?;
    }
    match cli.cmd {
        Cmd::Gen {
            family,
            n,
            seed,
            output,
        } => {
            if n == 0 {
                bail!("-n must be at least 1");
            }
            let instances = generate(family, seed, n)?;
            emit(&serde_json::to_string_pretty(&instances)?, output.as_ref())?;
        }
        Cmd::Screen {
            family,
            centers,
            properties,
            n,
            precision_bits,
            instances,
            common,
        } => {
            let cat = load_catalog(&common.catalog)?;
            let mut plan = ScreenPlan::new(
                family,
                center_specs(&centers, &cat),
                property_ids(&properties)?,
                n,
                common.seed,
            );
            plan.precision.cap_bits = precision_bits.max(64);
            if let Some(path) = instances {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let v: Vec<EdgeLengths> = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                for (i, e) in v.iter().enumerate() {
                    validate(e)
                        .map_err(|r| anyhow::anyhow!("instance {i} in {}: {r}", path.display()))?;
                }
                plan.instances = Some(v);
            }
            let report = run_screen(&plan, &cat)?;
            let text = render(
                common.format,
                || report.to_json(),
                || report.to_csv(),
                || report.to_markdown(),
            );
            emit(&text, common.output.as_ref())?;
        }
        Cmd::Verify {
            cases,
            n,
            precision_bits,
            common,
        } => {
            let cat = load_catalog(&common.catalog)?;
            let ids: Vec<String> = if cases.iter().any(|c| c == "all") {
                Vec::new()
            } else {
                cases
            };
            let prec = Precision::with_cap(precision_bits);
            let report = verify_all(&ids, n, common.seed, &cat, &prec)?;
            let text = render(
                common.format,
                || report.to_json(),
                || report.to_csv(),
                || report.to_markdown(),
            );
            emit(&text, common.output.as_ref())?;
            for c in &report.cases {
                eprintln!("{:<58} {:?} ({})", c.id, c.status, c.mode);
            }
            eprintln!(
                "{} passed, {} failed, {} skipped",
                report.passed, report.failed, report.skipped
            );
            if report.failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Hunt {
            claim,
            budget,
            common,
        } => {
            let cat = load_catalog(&common.catalog)?;
            let report = hunt_counterexample(claim, budget, common.seed, &cat)?;
            let text = render(
                common.format,
                || report.to_json(),
                || report.to_csv(),
                || report.to_markdown(),
            );
            emit(&text, common.output.as_ref())?;
        }
        Cmd::List { what, catalog } => {
            let mut s = String::new();
            match what {
                ListWhat::Cases => {
                    for c in registry() {
                        s += &format!("{:<58} {:<18} {}\n", c.id, c.family.name(), c.statement);
                    }
                }
                ListWhat::Centers => {
                    let cat = load_catalog(&catalog)?;
                    for e in cat.entries() {
                        s += &format!(
                            "{:<6} {:<9} {:<4} {}\n",
                            e.id,
                            if e.rational_only {
                                "rational"
                            } else {
                                "interval"
                            },
                            if e.takes_r { "r" } else { "" },
                            e.name
                        );
                    }
                }
                ListWhat::Properties => {
                    for p in PropertyId::ALL {
                        s += &format!("{:<3} {:<24} {}\n", p.number(), p.name(), p.description());
                    }
                }
                ListWhat::Claims => {
                    for c in Claim::ALL {
                        s += &format!("{}\n", c.name());
                    }
                }
            }
            emit(&s, None)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

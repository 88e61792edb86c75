//! Certificate suites over scenario files.
//!
//! Every subcommand loads a JSON scenario, applies any overrides, runs one
//! suite (or all of them), and writes the certificate as JSON, CSV, or a
//! text summary. Reruns with the same scenario and seed are byte-identical.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use h3nerve::harness::{self, Certificate, Scenario};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "h3nerve",
    about = "Certificate suites for cylinder covers, nerve rank bounds, and internal-rank search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override the word-ball radius.
    #[arg(long)]
    ball: Option<usize>,
    /// Override the length cutoff lambda.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Search sampled points for the minimum internal rank of the short set.
    MainSearch(CommonArgs),
    /// Rank bound on every simplex of the region nerve.
    Lemma51(CommonArgs),
    /// Stepwise rank audit over stratum components.
    RankLemma(CommonArgs),
    /// Displacement-sum and max-displacement bounds at sample points.
    Displacement(CommonArgs),
    /// Bipartite component graph, tree verdict, and action naturality.
    Tree(CommonArgs),
    /// Every suite in sequence.
    All(CommonArgs),
}

fn load(args: &CommonArgs) -> Result<Scenario> {
    let mut s = Scenario::load(&args.scenario)
        .with_context(|| format!("loading {}", args.scenario.display()))?;
    if let Some(seed) = args.seed {
        s.seed = seed;
    }
    if let Some(samples) = args.samples {
        s.sample_count = samples;
    }
    if let Some(ball) = args.ball {
        s.ball_radius = ball;
    }
    if let Some(lambda) = args.lambda {
        s.lambda = Some(lambda);
    }
    s.validate()?;
    Ok(s)
}

fn render(certs: &[Certificate], format: Format) -> String {
    match format {
        Format::Json => {
            if certs.len() == 1 {
                certs[0].to_json()
            } else {
                let mut s = serde_json_array(certs);
                s.push('\n');
                s
            }
        }
        Format::Csv => {
            let mut out = String::new();
            for (i, c) in certs.iter().enumerate() {
                let csv = c.to_csv();
                if i == 0 {
                    out.push_str(&csv);
                } else {
                    // drop the repeated header
                    out.extend(csv.lines().skip(1).map(|l| format!("{l}\n")));
                }
            }
            out
        }
        Format::Text => certs.iter().map(Certificate::to_text).collect(),
    }
}

fn serde_json_array(certs: &[Certificate]) -> String {
    let parts: Vec<String> = certs
        .iter()
        .map(|c| c.to_json().trim_end().to_string())
        .collect();
    format!("[\n{}\n]", parts.join(",\n"))
}

fn emit(args: &CommonArgs, certs: Vec<Certificate>) -> Result<bool> {
    let all_passed = certs.iter().all(Certificate::passed);
    let text = render(&certs, args.format);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(all_passed)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let ok = match &cli.command {
        Command::MainSearch(a) => emit(a, vec![harness::run_main_search(&load(a)?)?])?,
        Command::Lemma51(a) => emit(a, vec![harness::run_lemma51_suite(&load(a)?)?])?,
        Command::RankLemma(a) => emit(a, vec![harness::run_rank_lemma_suite(&load(a)?)?])?,
        Command::Displacement(a) => emit(a, vec![harness::run_displacement_suite(&load(a)?)?])?,
        Command::Tree(a) => emit(a, vec![harness::run_tree_suite(&load(a)?)?])?,
        Command::All(a) => emit(a, harness::run_all(&load(a)?)?)?,
    };
    if !ok {
        std::process::exit(2);
    }
    Ok(())
}

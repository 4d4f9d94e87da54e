//! `fwcap`: generate networks, run capacity sweeps, measure box-covering
//! exponents and run the acceptance checks.
//!
//! Exit status: 0 on success, 1 on invalid input or configuration, 2 when an
//! acceptance check fails.

mod config;
mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fwcap::capacity::{exact_mean_hops_small, run_sweep, DestinationRule};
use fwcap::fractal::{estimate_exponents, read_graph, CoverOptions};
use fwcap::grid::GridSpec;
use fwcap::netgen::{generate, SocialNetwork};
use fwcap::sympoly::EspBudget;
use fwcap::verify::{self, TdmaCheck, VerifyOptions};

use config::{Config, ConfigError};
use manifest::{PointStatus, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "fwcap", version, about = "Capacity simulator for fractal social wireless networks")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Master seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Network replicates per sweep point; overrides the config.
    #[arg(long, global = true)]
    replicates: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one network and write it in the text format.
    Generate,
    /// Estimate mean hops and throughput bounds over a grid of n and beta.
    Sweep,
    /// Box-covering exponents of a network file or edge list.
    Boxcover {
        /// Network file or `u v` edge list; overrides `input` in the config.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated box sizes; overrides `lb` in the config.
        #[arg(long)]
        lb: Option<String>,
        #[arg(long)]
        orderings: Option<usize>,
        /// Cover each connected component separately.
        #[arg(long)]
        per_component: bool,
    },
    /// Run the acceptance checks and print one line per criterion.
    Verify {
        /// Skip the Monte Carlo checks.
        #[arg(long)]
        quick: bool,
        /// Force the TDMA reuse factor used by the schedule check.
        #[arg(long)]
        reuse: Option<u32>,
    },
    /// Exact mean hop count of a network file under the configured rule.
    Exact {
        /// Network file; without it a network is generated from the config.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

enum Failure {
    Invalid(String),
    Acceptance,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Invalid(e.0)
    }
}

impl From<fwcap::Error> for Failure {
    fn from(e: fwcap::Error) -> Self {
        Self::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Acceptance) => ExitCode::from(2),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(Failure::Invalid("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Failure::Invalid(e.to_string()))?;
    }
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.set("seed", seed);
    }
    if let Some(reps) = cli.replicates {
        config.set("replicates", reps);
    }
    match &cli.command {
        Command::Generate => cmd_generate(&config, &cli.out),
        Command::Sweep => cmd_sweep(&config, &cli.out),
        Command::Boxcover { input, lb, orderings, per_component } => {
            if let Some(path) = input {
                config.set("input", path.display());
            }
            if let Some(lb) = lb {
                config.set("lb", lb);
            }
            if let Some(k) = orderings {
                config.set("orderings", k);
            }
            if *per_component {
                config.set("per_component", true);
            }
            cmd_boxcover(&config, &cli.out)
        }
        Command::Verify { quick, reuse } => cmd_verify(&config, *quick, *reuse),
        Command::Exact { input } => cmd_exact(&config, input.as_deref()),
    }
}

fn create_out(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Invalid(format!("cannot create {}: {e}", dir.display())))
}

fn cmd_generate(config: &Config, out: &Path) -> Result<(), Failure> {
    let network = config.network()?;
    let model = config.contact_model(network.epsilon)?;
    let net = generate(&network, &model)?;
    create_out(out)?;
    let path = out.join("network.txt");
    fs::write(&path, net.to_text())?;
    let mut manifest = RunManifest::new("generate", network.seed, config.entries().clone());
    manifest.outputs.push(path.display().to_string());
    manifest.points.push(PointStatus { n: network.n, beta: None, replicate: None, status: "ok".into(), message: None });
    manifest.write(out)?;
    println!(
        "wrote {} ({} nodes, {} truncated, {} fallback)",
        path.display(),
        net.len(),
        net.truncated_count(),
        net.fallback_count()
    );
    Ok(())
}

fn cmd_sweep(config: &Config, out: &Path) -> Result<(), Failure> {
    let spec = config.sweep()?;
    let result = run_sweep(&spec)?;
    create_out(out)?;
    let data = out.join("sweep.csv");
    let fits = out.join("fits.csv");
    fs::write(&data, result.to_csv())?;
    fs::write(&fits, result.fits_to_csv())?;

    let mut manifest = RunManifest::new("sweep", spec.seed, config.entries().clone());
    manifest.outputs = vec![data.display().to_string(), fits.display().to_string()];
    for p in &result.points {
        manifest.points.push(PointStatus {
            n: p.n,
            beta: Some(p.beta),
            replicate: None,
            status: "ok".into(),
            message: (p.truncated_count > 0).then(|| format!("{} trials without destination", p.truncated_count)),
        });
    }
    for f in &result.failures {
        manifest.points.push(PointStatus {
            n: f.n,
            beta: None,
            replicate: Some(f.replicate),
            status: "failed".into(),
            message: Some(f.message.clone()),
        });
    }
    manifest.write(out)?;

    for fit in &result.fits {
        let beta = fit.rule.beta();
        match &fit.fit {
            Ok(f) => println!(
                "beta={beta}: slope {:.4} (expected {}), r2 {:.4}",
                f.slope, fit.expected_slope, f.r_squared
            ),
            Err(e) => println!("beta={beta}: no fit ({e})"),
        }
    }
    if !result.failures.is_empty() {
        eprintln!("{} replicate(s) failed; see manifest.json", result.failures.len());
    }
    Ok(())
}

fn cmd_boxcover(config: &Config, out: &Path) -> Result<(), Failure> {
    let input: PathBuf = config.require::<String>("input").map(PathBuf::from)?;
    let text = fs::read_to_string(&input)
        .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", input.display())))?;
    let graph = read_graph(&text)?;
    let sizes = config.box_sizes()?.ok_or_else(|| Failure::Invalid("missing box sizes (`lb` or --lb)".into()))?;
    let opts = CoverOptions { orderings: config.orderings()?, seed: config.seed()?, per_component: config.per_component()? };
    let exps = estimate_exponents(&graph, &sizes, &opts)?;
    create_out(out)?;
    let path = out.join("boxcover.csv");
    fs::write(&path, exps.to_csv())?;
    let mut manifest = RunManifest::new("boxcover", opts.seed, config.entries().clone());
    manifest.outputs.push(path.display().to_string());
    manifest.write(out)?;
    print!("{}", exps.to_csv());
    Ok(())
}

fn cmd_verify(config: &Config, quick: bool, reuse: Option<u32>) -> Result<(), Failure> {
    let opts = VerifyOptions {
        seed: config.get_or("seed", verify::DEFAULT_SEED)?,
        quick,
        tdma: TdmaCheck { reuse, ..TdmaCheck::default() },
    };
    let results = verify::run_all(&opts);
    print!("{}", verify::report(&results));
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Acceptance)
    }
}

fn cmd_exact(config: &Config, input: Option<&Path>) -> Result<(), Failure> {
    let net = match input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
            SocialNetwork::read_from(text.as_bytes())?
        }
        None => {
            let network = config.network()?;
            generate(&network, &config.contact_model(network.epsilon)?)?
        }
    };
    let model = config.contact_model(net.config.epsilon)?;
    let grid = GridSpec::new(net.len(), &config.grid()?)?;
    let budget = EspBudget::default();
    for rule in config.rules()? {
        let e = exact_mean_hops_small(&net, &model, &grid, rule, config.distance()?, &budget)?;
        let label = match rule {
            DestinationRule::Uniform => "uniform".to_string(),
            DestinationRule::PowerLaw { beta } => format!("powerlaw beta={beta}"),
        };
        println!("{label}: exact mean hops {}", fwcap::netgen::format_real(e));
    }
    Ok(())
}

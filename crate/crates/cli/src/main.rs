//! Command-line driver: threshold evaluation, phase boundaries, instance
//! sampling, recovery, certification, entrywise error sweeps, and
//! JSON-configured Monte Carlo experiments.
//!
//! Machine-readable output goes to `--out` paths; standard output carries
//! human summaries (or the machine output itself when no path is given).
//! Heavy loops parallelize through rayon inside the library; set
//! `RAYON_NUM_THREADS` to override the worker count.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use simrec::{
    certify, entrywise_report, exhaustive_bisection, phase_boundary, run_experiment,
    sample_balanced_assignment, sample_hsbm, sdp_recover, spectral_recover, threshold_i,
    AdmmConfig, CommunityAssignment, ExpectedSimilarity, ExperimentConfig, HsbmParams,
    SimilarityMatrix, ThresholdKind, CERT_TOL,
};

#[derive(Parser)]
#[command(name = "simrec", version, about = "Community recovery on d-uniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the threshold functionals I and I_SDP at one point.
    Threshold(ThresholdArgs),
    /// Trace the α(β) boundaries where a functional equals one.
    PhaseDiagram(PhaseDiagramArgs),
    /// Sample a planted two-community hypergraph and write its artifacts.
    Sample(SampleArgs),
    /// Recover communities from a similarity matrix.
    Recover(RecoverArgs),
    /// Check the dual certificate of an assignment against a matrix.
    Certify(CertifyArgs),
    /// Entrywise eigenvector error statistics over sampled instances.
    Entrywise(EntrywiseArgs),
    /// Run a JSON-configured experiment sweep.
    Experiment(ExperimentArgs),
}

#[derive(clap::Args)]
struct ThresholdArgs {
    /// Hyperedge size.
    #[arg(long)]
    d: usize,
    /// Within-community rate multiplier.
    #[arg(long)]
    alpha: f64,
    /// Cross-community rate multiplier.
    #[arg(long)]
    beta: f64,
    /// Also write the JSON record here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Curve {
    I,
    Isdp,
    Both,
}

#[derive(clap::Args)]
struct PhaseDiagramArgs {
    /// Hyperedge size.
    #[arg(long)]
    d: usize,
    /// Smallest β on the grid.
    #[arg(long, default_value_t = 0.0)]
    beta_min: f64,
    /// Largest β on the grid.
    #[arg(long, default_value_t = 5.0)]
    beta_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 50)]
    steps: usize,
    /// Which boundary curve(s) to emit.
    #[arg(long, value_enum, default_value_t = Curve::Both)]
    which: Curve,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SampleArgs {
    /// Hyperedge size.
    #[arg(long)]
    d: usize,
    /// Number of vertices (even).
    #[arg(long)]
    n: usize,
    /// Within-community rate multiplier.
    #[arg(long)]
    alpha: f64,
    /// Cross-community rate multiplier.
    #[arg(long)]
    beta: f64,
    /// RNG seed; the assignment and the edges both derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the similarity matrix CSV here.
    #[arg(long)]
    out_matrix: Option<PathBuf>,
    /// Write the planted ±1 assignment here.
    #[arg(long)]
    out_assignment: Option<PathBuf>,
    /// Write the hypergraph edge list here.
    #[arg(long)]
    out_hypergraph: Option<PathBuf>,
}

#[derive(Copy, Clone, ValueEnum)]
enum Method {
    Spectral,
    Sdp,
    Oracle,
}

#[derive(clap::Args)]
struct RecoverArgs {
    /// Similarity matrix CSV (integer entries, one row per line).
    #[arg(long)]
    input: PathBuf,
    /// Recovery algorithm.
    #[arg(long, value_enum, default_value_t = Method::Spectral)]
    method: Method,
    /// Known ±1 assignment to compare the answer against.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Certificate tolerance for the sdp method.
    #[arg(long, default_value_t = CERT_TOL)]
    tol: f64,
    /// Write the recovered assignment here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CertifyArgs {
    /// Similarity matrix CSV (integer entries, one row per line).
    #[arg(long)]
    input: PathBuf,
    /// ±1 assignment to certify.
    #[arg(long)]
    assignment: PathBuf,
    /// Relative eigenvalue tolerance.
    #[arg(long, default_value_t = CERT_TOL)]
    tol: f64,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EntrywiseArgs {
    /// Hyperedge size.
    #[arg(long)]
    d: usize,
    /// Number of vertices (even).
    #[arg(long)]
    n: usize,
    /// Within-community rate multiplier.
    #[arg(long)]
    alpha: f64,
    /// Cross-community rate multiplier.
    #[arg(long)]
    beta: f64,
    /// Number of sampled instances; trial t uses seed + t.
    #[arg(long, default_value_t = 20)]
    trials: u64,
    /// Base RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the per-trial CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ExperimentArgs {
    /// Experiment description (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Results CSV path; overrides the config's `output` field.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's `base_seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Threshold(args) => cmd_threshold(args),
        Command::PhaseDiagram(args) => cmd_phase_diagram(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Recover(args) => cmd_recover(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Entrywise(args) => cmd_entrywise(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}

fn cmd_threshold(args: ThresholdArgs) -> Result<()> {
    let r = threshold_i(args.d, args.alpha, args.beta)?;
    let record = serde_json::json!({
        "d": args.d,
        "alpha": args.alpha,
        "beta": args.beta,
        "i": r.value,
        "t_star": r.t_star,
        "i_sdp": r.sdp_value,
    });
    let text = serde_json::to_string_pretty(&record)?;
    if let Some(path) = &args.out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{text}");
    Ok(())
}

fn cmd_phase_diagram(args: PhaseDiagramArgs) -> Result<()> {
    if args.steps < 2 {
        bail!("need at least 2 steps, got {}", args.steps);
    }
    if !(args.beta_max > args.beta_min) {
        bail!("empty β range [{}, {}]", args.beta_min, args.beta_max);
    }
    let header = match args.which {
        Curve::I => "beta,alpha_I",
        Curve::Isdp => "beta,alpha_ISDP",
        Curve::Both => "beta,alpha_I,alpha_ISDP",
    };
    let mut lines = vec![header.to_string()];
    for k in 0..args.steps {
        let beta = args.beta_min
            + (args.beta_max - args.beta_min) * k as f64 / (args.steps - 1) as f64;
        let info = || phase_boundary(ThresholdKind::Information, args.d, beta, 1.0);
        let sdp = || phase_boundary(ThresholdKind::Sdp, args.d, beta, 1.0);
        let line = match args.which {
            Curve::I => format!("{beta},{}", info()?),
            Curve::Isdp => format!("{beta},{}", sdp()?),
            Curve::Both => format!("{beta},{},{}", info()?, sdp()?),
        };
        lines.push(line);
    }
    let text = lines.join("\n") + "\n";
    match &args.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {} boundary points to {}", args.steps, path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let params = HsbmParams::new(args.d, args.n, args.alpha, args.beta, args.seed)?;
    let sigma = sample_balanced_assignment(args.n, args.seed ^ 0x516)?;
    let g = sample_hsbm(&params, &sigma)?;
    let w = SimilarityMatrix::from_hypergraph(&g);
    let i = threshold_i(args.d, args.alpha, args.beta)?.value;

    if let Some(path) = &args.out_matrix {
        fs::write(path, w.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.out_assignment {
        fs::write(path, sigma.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.out_hypergraph {
        fs::write(path, g.to_text()).with_context(|| format!("writing {}", path.display()))?;
    }

    println!(
        "sampled d={} n={} alpha={} beta={} seed={}: {} edges, I = {i:.4}",
        args.d,
        args.n,
        args.alpha,
        args.beta,
        args.seed,
        g.edge_count()
    );
    if args.out_matrix.is_none() && args.out_assignment.is_none() && args.out_hypergraph.is_none()
    {
        println!("nothing saved; pass --out-matrix/--out-assignment/--out-hypergraph");
    }
    Ok(())
}

fn cmd_recover(args: RecoverArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let w = SimilarityMatrix::from_csv(&text)?;

    let assignment = match args.method {
        Method::Spectral => spectral_recover(&w)?,
        Method::Sdp => {
            let rec = sdp_recover(&w, &AdmmConfig::default(), args.tol)?;
            let how = if rec.via_certificate {
                "spectral candidate certified".to_string()
            } else {
                let sol = rec.admm.as_ref().expect("fallback path ran the solver");
                format!(
                    "solver fallback: {} iterations, converged = {}, certified = {}",
                    sol.iterations, sol.converged, rec.certificate.certified
                )
            };
            println!("{}", rec.assignment.to_text().trim_end());
            println!("{how}");
            finish_recover(&rec.assignment, &args)?;
            return Ok(());
        }
        Method::Oracle => {
            let r = exhaustive_bisection(&w)?;
            println!("{}", r.assignment.to_text().trim_end());
            println!(
                "exhaustive optimum {} over {} splits, unique = {}",
                r.value, r.evaluated, r.unique
            );
            finish_recover(&r.assignment, &args)?;
            return Ok(());
        }
    };
    println!("{}", assignment.to_text().trim_end());
    finish_recover(&assignment, &args)?;
    Ok(())
}

fn finish_recover(assignment: &CommunityAssignment, args: &RecoverArgs) -> Result<()> {
    if let Some(path) = &args.truth {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let truth = CommunityAssignment::from_text(&text)?;
        let dist = assignment.hamming_up_to_flip(&truth)?;
        println!(
            "truth comparison: {} (hamming distance {dist} up to flip)",
            if dist == 0 { "exact" } else { "inexact" }
        );
    }
    if let Some(path) = &args.out {
        fs::write(path, assignment.to_text())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_certify(args: CertifyArgs) -> Result<()> {
    let matrix_text = fs::read_to_string(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let w = SimilarityMatrix::from_csv(&matrix_text)?;
    let sigma_text = fs::read_to_string(&args.assignment)
        .with_context(|| format!("reading {}", args.assignment.display()))?;
    let sigma = CommunityAssignment::from_text(&sigma_text)?;
    let report = certify(&w, &sigma, args.tol)?;
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(path) = &args.out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{text}");
    Ok(())
}

fn cmd_entrywise(args: EntrywiseArgs) -> Result<()> {
    if args.trials == 0 {
        bail!("need at least one trial");
    }
    let mut lines = vec!["err_direct,err_first_order,err_residual,sign_margin".to_string()];
    let mut residuals = Vec::new();
    for t in 0..args.trials {
        let seed = args.seed + t;
        let params = HsbmParams::new(args.d, args.n, args.alpha, args.beta, seed)?;
        let sigma = sample_balanced_assignment(args.n, seed ^ 0x516)?;
        let es = ExpectedSimilarity::new(&params, &sigma)?;
        let g = sample_hsbm(&params, &sigma)?;
        let w = SimilarityMatrix::from_hypergraph(&g);
        let rep = entrywise_report(&w, &es)?;
        lines.push(format!(
            "{},{},{},{}",
            rep.err_direct, rep.err_first_order_vs_true, rep.err_residual, rep.sign_margin
        ));
        residuals.push(rep.err_residual);
    }
    let text = lines.join("\n") + "\n";
    match &args.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            residuals.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
            println!(
                "wrote {} trials to {}; median √n·ℓ∞ residual {:.4}",
                args.trials,
                path.display(),
                residuals[residuals.len() / 2]
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut config = ExperimentConfig::from_json(&text)
        .with_context(|| format!("parsing {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    let out = match args.out.or_else(|| config.output.clone()) {
        Some(path) => path,
        None => bail!("no results path: pass --out or set \"output\" in the config"),
    };
    let summary = run_experiment(&config, &out)?;
    println!("experiment {} -> {}", summary.name, out.display());
    for cell in &summary.cells {
        let mut parts = vec![format!(
            "cell {}: d={} n={} alpha={:.4} beta={} I={:.3}",
            cell.cell, cell.d, cell.n, cell.alpha, cell.beta, cell.threshold
        )];
        let rate = |name: &str, r: &Option<simrec::harness::RateSummary>| {
            r.as_ref().map(|r| {
                format!(
                    "{name} {}/{} ({:.3} [{:.3}, {:.3}])",
                    r.successes, r.trials, r.rate, r.wilson_low, r.wilson_high
                )
            })
        };
        for part in [
            rate("spectral", &cell.spectral),
            rate("sdp", &cell.sdp),
            rate("oracle", &cell.oracle),
            rate("certified", &cell.certified),
        ]
        .into_iter()
        .flatten()
        {
            parts.push(part);
        }
        if let Some(m) = cell.median_err_residual {
            parts.push(format!("median residual {m:.4}"));
        }
        if let Some(m) = cell.mean_deviation_norm {
            parts.push(format!("mean ‖W-W*‖ {m:.3}"));
        }
        if cell.errors > 0 {
            parts.push(format!("{} error rows", cell.errors));
        }
        println!("  {}", parts.join("; "));
    }
    Ok(())
}

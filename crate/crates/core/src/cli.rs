//! The `symlatent` command line.
//!
//! Results go to files in `--out` (default `.`), together with a
//! `run-manifest.txt` listing every effective setting. Diagnostics go to
//! standard error. Exit status: 0 on success, 1 on usage errors, 2 on data or
//! runtime errors (including a failed theory battery).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::data::{
    largest_connected_component, load_covariates, load_dense_csv, load_edge_list, tokenize_adjacency_counts,
    write_edge_list, write_text, DyadCovariates, Sociomatrix,
};
use crate::error::{Error, Result};
use crate::eval::{cross_validate, roc_curve, AucTable, CvConfig};
use crate::mcmc::{run_chain, SamplerConfig};
use crate::model::{calibrate_prior_alpha_variance, LatentState, ModelKind, PriorConfig};
use crate::simulate::{planted_two_blocks, simulate, two_cluster_positions, SimulationParams};
use crate::theory::{run_theory_battery, BatteryConfig};

pub const MANIFEST_FILE: &str = "run-manifest.txt";

#[derive(Parser, Debug)]
#[command(name = "symlatent", version, about = "Latent variable models for symmetric relational data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the word-adjacency network of a text (chapter 1 of Genesis by default).
    IngestGenesis {
        /// Plain text to tokenize; the bundled King James text if omitted.
        text: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value = "genesis.tsv")]
        name: String,
    },
    /// Keep the largest connected component of an edge list.
    Lcc {
        edges: PathBuf,
        /// Values above this count as edges.
        #[arg(long, default_value_t = 0)]
        threshold: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Fit one model to all observed dyads.
    Fit(FitArgs),
    /// Cross-validated link prediction.
    Cv {
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Folds fitted concurrently; results do not depend on it.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the representation-theory battery.
    CheckTheory {
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 1000)]
        class_instances: usize,
        #[arg(long, default_value_t = 11)]
        seed: u64,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Forward-simulate a binary network.
    Simulate {
        #[arg(long, value_parser = parse_model)]
        model: ModelKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// `mu` in `P(y = 1) = Phi(mu + alpha)`.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        intercept: f64,
        /// Distance model: two clusters this far apart (K must be 2).
        #[arg(long)]
        two_cluster: Option<f64>,
        #[arg(long, default_value_t = 0.3)]
        spread: f64,
        /// Class model: planted halves with this within-block effect (K must be 2).
        #[arg(long, allow_hyphen_values = true)]
        planted_within: Option<f64>,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        planted_across: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Edge list (`.tsv`) or dense matrix (`.csv`).
    #[arg(long)]
    data: PathBuf,
    /// Dyadic covariates (`i j x1 .. xp` per line).
    #[arg(long)]
    covariates: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: ModelKind,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
    #[arg(long, default_value_t = 2_500)]
    burn_in: usize,
    #[arg(long, default_value_t = 10)]
    thin: usize,
    #[arg(long, default_value_t = 0.5)]
    mh_step: f64,
    #[arg(long)]
    no_adapt: bool,
    /// Skip rescaling the prior to unit variance of alpha.
    #[arg(long)]
    no_calibrate: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Value of dyads absent from an edge list.
    #[arg(long, default_value_t = 0)]
    default_value: u32,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|e| e.to_string())
}

impl FitArgs {
    fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            mh_step: self.mh_step,
            adapt: !self.no_adapt,
            seed: self.seed,
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.k == 0 || self.iterations == 0 || self.thin == 0 {
            return Err("--k, --iterations and --thin must be positive".into());
        }
        if self.burn_in >= self.iterations {
            return Err("--burn-in must be smaller than --iterations".into());
        }
        Ok(())
    }

    fn load(&self) -> Result<(Sociomatrix, DyadCovariates)> {
        let y = load_matrix(&self.data, self.default_value)?;
        let x = match &self.covariates {
            Some(p) => load_covariates(p, &y)?,
            None => DyadCovariates::none(y.n()),
        };
        Ok((y, x))
    }

    fn manifest(&self, m: &mut Manifest) {
        m.entry("data", self.data.display());
        m.entry(
            "covariates",
            self.covariates.as_ref().map_or("none".to_string(), |p| p.display().to_string()),
        );
        m.entry("model", self.model);
        m.entry("k", self.k);
        m.entry("iterations", self.iterations);
        m.entry("burn_in", self.burn_in);
        m.entry("thin", self.thin);
        m.entry("mh_step", self.mh_step);
        m.entry("adapt", !self.no_adapt);
        m.entry("calibrate", !self.no_calibrate);
        m.entry("seed", self.seed);
        m.entry("default_value", self.default_value);
    }
}

fn load_matrix(path: &Path, default: u32) -> Result<Sociomatrix> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        load_dense_csv(path)
    } else {
        load_edge_list(path, default)
    }
}

struct Manifest(String);

impl Manifest {
    fn new(command: &str) -> Self {
        let mut m = Manifest(String::new());
        m.entry("program", concat!("symlatent ", env!("CARGO_PKG_VERSION")));
        m.entry("command", command);
        m
    }

    fn entry(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key}\t{value}");
    }

    fn write(&self, dir: &Path) -> Result<()> {
        write_text(dir.join(MANIFEST_FILE), &self.0)
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Runs the command line with `args` (program name first); returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(msg) = usage_problem(&cli.command) {
        eprintln!("error: {msg}");
        return 1;
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn usage_problem(cmd: &Command) -> Option<String> {
    match cmd {
        Command::Fit(f) => f.check().err(),
        Command::Cv { fit, folds, jobs } => fit
            .check()
            .err()
            .or_else(|| (*folds < 2).then(|| "--folds must be at least 2".into()))
            .or_else(|| (*jobs == 0).then(|| "--jobs must be at least 1".into())),
        Command::CheckTheory { restarts, .. } if *restarts == 0 => Some("--restarts must be positive".into()),
        Command::Simulate { n, k, .. } if *n < 2 || *k == 0 => {
            Some("--n must be at least 2 and --k positive".into())
        }
        _ => None,
    }
}

fn execute(cmd: Command) -> Result<i32> {
    match cmd {
        Command::IngestGenesis { text, out, name } => {
            let body = match &text {
                Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
                None => crate::GENESIS_CHAPTER_1.to_string(),
            };
            let y = tokenize_adjacency_counts(&body)?;
            prepare_out(&out)?;
            write_edge_list(&y, out.join(&name))?;
            let mut m = Manifest::new("ingest-genesis");
            m.entry("text", text.as_ref().map_or("bundled".to_string(), |p| p.display().to_string()));
            m.entry("output", &name);
            m.entry("tokens", y.n());
            m.entry("levels", format!("{:?}", y.value_levels()));
            m.write(&out)?;
            eprintln!("{} distinct tokens written to {}", y.n(), out.join(&name).display());
            Ok(0)
        }
        Command::Lcc { edges, threshold, out } => {
            let y = load_edge_list(&edges, 0)?;
            let lcc = largest_connected_component(&y, threshold)?;
            prepare_out(&out)?;
            write_edge_list(&lcc, out.join("lcc.tsv"))?;
            let mut m = Manifest::new("lcc");
            m.entry("edges", edges.display());
            m.entry("threshold", threshold);
            m.entry("nodes_in", y.n());
            m.entry("nodes_out", lcc.n());
            m.write(&out)?;
            eprintln!("largest component: {} of {} nodes", lcc.n(), y.n());
            Ok(0)
        }
        Command::Fit(args) => {
            let (y, x) = args.load()?;
            let prior = if args.no_calibrate {
                PriorConfig::default()
            } else {
                calibrate_prior_alpha_variance(args.model, args.k, y.n(), &PriorConfig::default(), 1.0)?
            };
            let trace = run_chain(&y, &x, args.model, args.k, &args.sampler(), &prior)?;
            prepare_out(&args.out)?;
            trace.write_csv(args.out.join("trace.csv"))?;
            let mut fitted = String::from("i\tj\tyhat\n");
            for (d, (i, j)) in y.dyad_index().pairs().into_iter().enumerate() {
                let _ = writeln!(fitted, "{}\t{}\t{:.10}", i + 1, j + 1, trace.predictive_mean(d)?);
            }
            write_text(args.out.join("fitted.tsv"), &fitted)?;
            let mut m = Manifest::new("fit");
            args.manifest(&mut m);
            m.entry("nodes", y.n());
            m.entry("recorded_samples", trace.len());
            if let Some(a) = trace.acceptance_rate() {
                m.entry("acceptance_rate", format!("{a:.4}"));
                m.entry("mh_step_final", format!("{:.6}", trace.mh_step()));
            }
            m.write(&args.out)?;
            eprintln!("fit complete: {} recorded samples", trace.len());
            Ok(0)
        }
        Command::Cv { fit, folds, jobs } => {
            let (y, x) = fit.load()?;
            let config = CvConfig {
                folds,
                sampler: fit.sampler(),
                prior: PriorConfig::default(),
                calibration_target: (!fit.no_calibrate).then_some(1.0),
                jobs,
            };
            let pred = cross_validate(&y, &x, fit.model, fit.k, &config)?;
            let roc = roc_curve(&pred)?;
            prepare_out(&fit.out)?;
            pred.write_tsv(fit.out.join("predictions.tsv"))?;
            roc.write_tsv(fit.out.join("roc.tsv"))?;
            let dataset = fit
                .data
                .file_stem()
                .map_or("data".to_string(), |s| s.to_string_lossy().into_owned());
            let mut table = AucTable::new(vec![dataset.clone()], vec![fit.model], vec![fit.k]);
            table.set(fit.k, &dataset, fit.model, roc.auc);
            table.write_csv(fit.out.join("auc_table.csv"))?;
            let mut m = Manifest::new("cv");
            fit.manifest(&mut m);
            m.entry("folds", folds);
            m.entry("nodes", y.n());
            m.entry("auc", format!("{:.6}", roc.auc));
            m.write(&fit.out)?;
            eprintln!("{} K={} AUC {:.4}", fit.model, fit.k, roc.auc);
            Ok(0)
        }
        Command::CheckTheory {
            restarts,
            class_instances,
            seed,
            out,
        } => {
            let mut config = BatteryConfig {
                class_instances,
                seed,
                ..BatteryConfig::default()
            };
            config.search.restarts = restarts;
            let report = run_theory_battery(&config)?;
            println!("{report}");
            if let Some(out) = out {
                prepare_out(&out)?;
                write_text(out.join("theory-report.txt"), &format!("{report}\n"))?;
                let mut m = Manifest::new("check-theory");
                m.entry("restarts", restarts);
                m.entry("class_instances", class_instances);
                m.entry("seed", seed);
                m.write(&out)?;
            }
            Ok(if report.passed() { 0 } else { 2 })
        }
        Command::Simulate {
            model,
            n,
            k,
            intercept,
            two_cluster,
            spread,
            planted_within,
            planted_across,
            seed,
            out,
        } => {
            let latent = match (model, two_cluster, planted_within) {
                (ModelKind::Distance, Some(sep), None) if k == 2 => {
                    Some(LatentState::Distance(two_cluster_positions(n, sep, spread, seed)?))
                }
                (ModelKind::Class, None, Some(w)) if k == 2 => {
                    Some(LatentState::Class(planted_two_blocks(n, w, planted_across)?))
                }
                (_, None, None) => None,
                _ => {
                    return Err(Error::invalid(
                        "--two-cluster needs the distance model and --planted-within the class model, both with K = 2",
                    ))
                }
            };
            let params = SimulationParams {
                intercept,
                latent,
                prior: PriorConfig::default(),
            };
            let sim = simulate(model, n, k, &params, seed)?;
            prepare_out(&out)?;
            write_edge_list(&sim.y, out.join("simulated.tsv"))?;
            write_text(out.join("latent.tsv"), &format_latent(&sim.latent))?;
            let mut m = Manifest::new("simulate");
            m.entry("model", model);
            m.entry("n", n);
            m.entry("k", k);
            m.entry("intercept", intercept);
            m.entry("two_cluster", two_cluster.map_or("none".into(), |v| v.to_string()));
            m.entry("spread", spread);
            m.entry("planted_within", planted_within.map_or("none".into(), |v| v.to_string()));
            m.entry("planted_across", planted_across);
            m.entry("seed", seed);
            m.write(&out)?;
            eprintln!("simulated {n} nodes from the {model} model");
            Ok(0)
        }
    }
}

/// One row per node: its label and latent coordinates (or class).
fn format_latent(latent: &LatentState) -> String {
    let mut out = String::new();
    match latent {
        LatentState::Class(s) => {
            out.push_str("node\tclass\n");
            for (i, c) in s.labels.iter().enumerate() {
                let _ = writeln!(out, "{}\t{}", i + 1, c + 1);
            }
        }
        LatentState::Distance(s) => {
            for i in 0..s.positions.len() / s.k {
                let coords: Vec<String> = s.position(i).iter().map(|v| format!("{v:.10}")).collect();
                let _ = writeln!(out, "{}\t{}", i + 1, coords.join("\t"));
            }
        }
        LatentState::Eigen(s) => {
            let lambda: Vec<String> = s.lambda.iter().map(|v| format!("{v:.10}")).collect();
            let _ = writeln!(out, "# lambda\t{}", lambda.join("\t"));
            for i in 0..s.vectors.len() / s.k {
                let coords: Vec<String> = s.vector(i).iter().map(|v| format!("{v:.10}")).collect();
                let _ = writeln!(out, "{}\t{}", i + 1, coords.join("\t"));
            }
        }
    }
    out
}

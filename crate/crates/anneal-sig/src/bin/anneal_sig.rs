//! Command-line front end for the annealing-signature simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use anneal_sig::harness::runner::{
    load_model, run_concurrence, run_embeddings, run_level_diagram, run_perturb, run_qa, run_sa,
    run_spectrum, run_sweep, ConcurrenceSpec, QaRunSpec, RunBundle, SaRunSpec, SweepSpec,
};
use anneal_sig::harness::sweep::init_thread_pool;
use anneal_sig::ising::{
    enumerate_embeddings, full_spectrum, greedy_descent, ground_space, IsingModel, SpinConfig,
};
use anneal_sig::perturbation::{ground_projector, project_transverse};
use anneal_sig::quantum::bath::BathSpec;
use anneal_sig::sa::{gibbs, MasterEquation, UpdateRule};
use anneal_sig::{Error, Result};

/// Exact simulator contrasting classical thermalization with quantum
/// annealing on a degenerate 8-spin Ising instance.
#[derive(Parser)]
#[command(name = "anneal-sig", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Exact classical spectrum (energy/multiplicity), or with --t-ns the
    /// instantaneous low-lying quantum spectrum over t/T in [0.3, 1].
    Spectrum {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "spectrum")]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Emit the lowest-k instantaneous quantum spectrum for this total
        /// annealing time instead of the classical histogram.
        #[arg(long)]
        t_ns: Option<f64>,
        /// Number of instantaneous levels when --t-ns is given.
        #[arg(long, default_value_t = 7)]
        levels: usize,
    },
    /// Enumerate distinct K4,4 unit-cell embeddings of the model.
    Embeddings {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "embeddings")]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Classical annealing run from a JSON run spec.
    Sa {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Quantum annealing run (closed / WCL / SCL) from a JSON run spec.
    Qa {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Degenerate perturbation spectrum of the projected transverse field.
    Perturb {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "perturb")]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Two-qubit concurrence baselines + trajectory from a JSON run spec.
    Concurrence {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Gauge-averaged sweep over annealing times or step counts.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Fast exact self-checks; exits 4 if any check fails.
    Check {
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Error::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn read_spec<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn report(bundle: &RunBundle, format: Option<Format>) -> Result<ExitCode> {
    if let Some(fmt) = format {
        let ext = match fmt {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        };
        if !bundle
            .written
            .iter()
            .any(|p| p.to_string_lossy().ends_with(&format!(".{ext}")))
        {
            return Err(Error::Spec(format!(
                "this operation produces no .{ext} artifact"
            )));
        }
    }
    for p in &bundle.written {
        println!("wrote {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Spectrum { model, out, format, t_ns, levels } => {
            let bundle = match t_ns {
                None => {
                    let m = load_model(&model)?;
                    let table = full_spectrum(&m)?;
                    println!("energy  multiplicity");
                    for (e, mult) in table.histogram() {
                        println!("{e:>6}  {mult}");
                    }
                    run_spectrum(&model, &out)?
                }
                Some(t) => run_level_diagram(&model, t, levels, &out)?,
            };
            report(&bundle, format)
        }
        Command::Embeddings { model, out, format } => {
            let (bundle, count) = run_embeddings(&model, &out)?;
            println!("distinct embeddings: {count}");
            report(&bundle, format)
        }
        Command::Sa { spec, model, seed, out, format } => {
            let mut spec: SaRunSpec = read_spec(&spec)?;
            if model.is_some() {
                spec.model_file = model;
            }
            if let Some(s) = seed {
                spec.seed = s;
            }
            if let Some(o) = out {
                spec.output = o;
            }
            report(&run_sa(&spec)?, format)
        }
        Command::Qa { spec, model, out, format } => {
            let mut spec: QaRunSpec = read_spec(&spec)?;
            if model.is_some() {
                spec.model_file = model;
            }
            if let Some(o) = out {
                spec.output = o;
            }
            report(&run_qa(&spec)?, format)
        }
        Command::Perturb { model, out, format } => {
            let m = load_model(&model)?;
            let proj = ground_projector(&m)?;
            let ps = project_transverse(&m, &proj)?;
            println!("projector rank: {}", proj.rank());
            println!("eigenvalue  multiplicity");
            for (val, mult) in &ps.multiplicities {
                println!("{val:>10.6}  {mult}");
            }
            report(&run_perturb(&model, &out)?, format)
        }
        Command::Concurrence { spec, model, out, format } => {
            let mut spec: ConcurrenceSpec = read_spec(&spec)?;
            if model.is_some() {
                spec.model_file = model;
            }
            if let Some(o) = out {
                spec.output = o;
            }
            // Human-readable pair label is 1-based.
            println!("pair: spins {} and {}", spec.pair.0 + 1, spec.pair.1 + 1);
            report(&run_concurrence(&spec)?, format)
        }
        Command::Sweep { spec, model, seed, out, format } => {
            let mut spec: SweepSpec = read_spec(&spec)?;
            if model.is_some() {
                spec.model_file = model;
            }
            if let Some(s) = seed {
                spec.gauge_seed = s;
            }
            if let Some(o) = out {
                spec.output = o;
            }
            report(&run_sweep(&spec)?, format)
        }
        Command::Check { model } => run_checks(&model),
    }
}

/// Fast exact checks (well under a second); exit code 4 on any failure.
fn run_checks(model: &Option<PathBuf>) -> Result<ExitCode> {
    let m = load_model(model)?;
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool| {
        println!("{}  {name}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    let gs = ground_space(&m)?;
    check(
        "ground space: 17 states at -8, split 16 cluster + 1 isolated",
        gs.energy == -8.0 && gs.states.len() == 17 && gs.cluster.len() == 16
            && gs.isolated.len() == 1,
    );

    let pair = IsingModel::new(2, vec![1.0, -1.0], vec![(0, 1, 1.0)])?;
    let pair_energies: Vec<f64> = (0..4)
        .map(|k| pair.energy(&SpinConfig::from_index(k, 2)).unwrap())
        .collect();
    check("two-spin core-ancilla energies (-1,-1,3,-1)", pair_energies == [-1.0, -1.0, 3.0, -1.0]);

    let no_local_minima = (0..256).all(|k| {
        let s = greedy_descent(&m, &SpinConfig::from_index(k, m.n)).unwrap();
        m.energy(&s).unwrap() == -8.0
    });
    check("greedy descent from all 256 configs reaches -8", no_local_minima);

    check("144 distinct K4,4 embeddings", enumerate_embeddings(&m)?.embeddings.len() == 144);

    // Detailed balance and Gibbs stationarity of the SA generator.
    let beta = 1.0;
    let me = MasterEquation::new(&m);
    let g = me.generator(&UpdateRule::metropolis(), beta);
    let pi = gibbs(&m, beta);
    let dim = pi.p.len();
    let db = (0..dim).all(|a| {
        (0..dim).all(|b| (g[a][b] * pi.p[b] - g[b][a] * pi.p[a]).abs() < 1e-12)
    });
    check("pairwise detailed balance to 1e-12", db);
    let stationary = (0..dim).all(|a| {
        (0..dim).map(|b| g[a][b] * pi.p[b]).sum::<f64>().abs() < 1e-10
    });
    check("Gibbs stationarity to 1e-10", stationary);

    // KMS condition of the bath spectral function.
    let bath = BathSpec::default_bath();
    let kms = [0.01, 0.1, 1.0, 10.0, 100.0].iter().all(|&w| {
        let lhs = bath.gamma(-w);
        let rhs = (-bath.beta * w).exp() * bath.gamma(w);
        (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(lhs.abs())
    });
    check("KMS: gamma(-w) = exp(-beta w) gamma(w) to rel 1e-12", kms);

    // Projected transverse-field spectrum.
    let proj = ground_projector(&m)?;
    let ps = project_transverse(&m, &proj)?;
    let expect = [(-4.0, 1usize), (-2.0, 4), (0.0, 7), (2.0, 4), (4.0, 1)];
    let mult_ok = ps.multiplicities.len() == expect.len()
        && ps
            .multiplicities
            .iter()
            .zip(expect.iter())
            .all(|(got, want)| (got.0 - want.0).abs() < 1e-9 && got.1 == want.1);
    check("projected-field spectrum {-4:1,-2:4,0:7,+2:4,+4:1}", mult_ok);

    if all_ok {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(4))
    }
}

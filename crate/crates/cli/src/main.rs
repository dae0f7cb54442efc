//! Command-line surface for reaction-network analysis: structural reports,
//! toric-locus membership, equilibria, trajectories, locus sampling, paths,
//! and affine-invariance checks. JSON everywhere except trajectories (CSV).
//!
//! Exit codes: 0 success (member / agreement where applicable), 1 negative
//! verdict (non-member, disagreement), 2 error (bad file, bad flags, failed
//! preconditions).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crn_toric::flux::{
    affine_invariance_check, connect_path, dimensions, sample_toric_rates, Dimensions,
};
use crn_toric::mass_action::{MassActionSystem, RateVector, StateVector};
use crn_toric::network::ReactionNetwork;
use crn_toric::toric::{q_map, toric_membership};
use crn_toric::trees::tree_constants_minor;
use crn_toric::Error as CrnError;

#[derive(Parser)]
#[command(
    name = "crn-toric",
    version,
    about = "Analyze mass-action reaction networks and their toric locus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural report: sizes, linkage classes, deficiency, spanning-tree
    /// counts, and locus dimensions (JSON to stdout)
    Analyze {
        /// Network JSON file
        network: PathBuf,
    },
    /// Toric-locus membership of a rate vector (exit 0 member, 1 non-member)
    Check {
        network: PathBuf,
        /// Rates JSON file: {"rates": [..]} in edge order
        rates: PathBuf,
        /// Membership tolerance on the binomial residual
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Complex balanced equilibrium in the compatibility class of --x0
    Equilibrium {
        network: PathBuf,
        rates: PathBuf,
        /// Comma-separated positive concentrations (default: all ones)
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Fixed-step RK4 trajectory (CSV to stdout)
    Simulate {
        network: PathBuf,
        rates: PathBuf,
        #[arg(long)]
        x0: Option<String>,
        /// Integration horizon
        #[arg(long)]
        t_end: f64,
        /// Step size
        #[arg(long)]
        dt: f64,
    },
    /// Draw rate vectors from the toric locus (JSON list to stdout)
    Sample {
        network: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Path inside the toric locus between two member rate vectors
    Path {
        network: PathBuf,
        rates_a: PathBuf,
        rates_b: PathBuf,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long)]
        x0: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Membership agreement between a network and its affine image
    /// (exit 0 agree, 1 disagree)
    AffineCheck {
        network: PathBuf,
        /// Row-major n*n matrix entries, comma-separated
        #[arg(long)]
        matrix: String,
        /// n offset entries, comma-separated
        #[arg(long)]
        offset: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
}

#[derive(Serialize)]
struct AnalysisReport {
    species: usize,
    complexes: usize,
    edges: usize,
    linkage_classes: usize,
    stoichiometric_dimension: usize,
    deficiency: usize,
    weakly_reversible: bool,
    /// Spanning in-tree counts per vertex (tree constants at unit rates);
    /// omitted when the network is not weakly reversible.
    #[serde(skip_serializing_if = "Option::is_none")]
    tree_constants: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimensions: Option<Dimensions>,
}

enum Failure {
    /// Input or precondition problem: exit 2.
    Error(String),
    /// Negative verdict from a well-posed query: exit 1.
    Negative,
}

impl From<CrnError> for Failure {
    fn from(err: CrnError) -> Self {
        Failure::Error(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Error(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze { network } => analyze(&network),
        Command::Check {
            network,
            rates,
            tol,
        } => check(&network, &rates, tol),
        Command::Equilibrium {
            network,
            rates,
            x0,
            tol,
        } => equilibrium(&network, &rates, x0.as_deref(), tol),
        Command::Simulate {
            network,
            rates,
            x0,
            t_end,
            dt,
        } => simulate(&network, &rates, x0.as_deref(), t_end, dt),
        Command::Sample {
            network,
            count,
            seed,
        } => sample(&network, count, seed),
        Command::Path {
            network,
            rates_a,
            rates_b,
            steps,
            x0,
            tol,
        } => path(&network, &rates_a, &rates_b, steps, x0.as_deref(), tol),
        Command::AffineCheck {
            network,
            matrix,
            offset,
            trials,
            seed,
            tol,
        } => affine_check(&network, &matrix, &offset, trials, seed, tol),
    }
}

fn load_network(path: &Path) -> Result<ReactionNetwork, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| Failure::Error(format!("{}: {err}", path.display())))?;
    Ok(ReactionNetwork::from_json_str(&text)?)
}

fn load_system(network: &Path, rates: &Path) -> Result<MassActionSystem, Failure> {
    let net = load_network(network)?;
    let text = std::fs::read_to_string(rates)
        .map_err(|err| Failure::Error(format!("{}: {err}", rates.display())))?;
    #[derive(serde::Deserialize)]
    struct RatesFile {
        rates: Vec<f64>,
    }
    let file: RatesFile =
        serde_json::from_str(&text).map_err(|err| Failure::Error(err.to_string()))?;
    Ok(MassActionSystem::new(net, RateVector::new(file.rates)?)?)
}

fn parse_state(n: usize, flag: Option<&str>) -> Result<StateVector, Failure> {
    let values = match flag {
        None => vec![1.0; n],
        Some(text) => parse_floats(text)?,
    };
    if values.len() != n {
        return Err(Failure::Error(format!(
            "--x0 has {} entries, network has {n} species",
            values.len()
        )));
    }
    Ok(StateVector::new(values)?)
}

fn parse_floats(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|item| {
            item.trim()
                .parse::<f64>()
                .map_err(|err| Failure::Error(format!("`{item}`: {err}")))
        })
        .collect()
}

fn require_positive_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::Error(format!("--tol must be positive, got {tol}")))
    }
}

fn emit<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization is infallible")
    );
}

fn analyze(network: &Path) -> Result<(), Failure> {
    let net = load_network(network)?;
    let weakly_reversible = net.is_weakly_reversible();
    let (tree_constants, dims) = if weakly_reversible {
        let unit =
            MassActionSystem::new(net.clone(), RateVector::new(vec![1.0; net.edge_count()])?)?;
        (
            Some(tree_constants_minor(&unit)?.as_slice().to_vec()),
            Some(dimensions(&net)?),
        )
    } else {
        (None, None)
    };
    emit(&AnalysisReport {
        species: net.species_count(),
        complexes: net.complex_count(),
        edges: net.edge_count(),
        linkage_classes: net.linkage_classes().count(),
        stoichiometric_dimension: net.stoichiometric_space().dim(),
        deficiency: net.deficiency(),
        weakly_reversible,
        tree_constants,
        dimensions: dims,
    });
    Ok(())
}

fn check(network: &Path, rates: &Path, tol: f64) -> Result<(), Failure> {
    require_positive_tol(tol)?;
    let sys = load_system(network, rates)?;
    let report = toric_membership(&sys, tol);
    emit(&report);
    if report.member {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn equilibrium(network: &Path, rates: &Path, x0: Option<&str>, tol: f64) -> Result<(), Failure> {
    require_positive_tol(tol)?;
    let sys = load_system(network, rates)?;
    let x0 = parse_state(sys.net().species_count(), x0)?;
    let report = toric_membership(&sys, tol);
    if !report.member {
        eprintln!(
            "error: rate vector is not in the toric locus (residual {:.3e})",
            report.residual
        );
        return Err(Failure::Negative);
    }
    let point = q_map(&sys, &x0)?;
    emit(&serde_json::json!({
        "x": point.as_slice(),
        "residual": report.residual,
    }));
    Ok(())
}

fn simulate(
    network: &Path,
    rates: &Path,
    x0: Option<&str>,
    t_end: f64,
    dt: f64,
) -> Result<(), Failure> {
    let sys = load_system(network, rates)?;
    let x0 = parse_state(sys.net().species_count(), x0)?;
    let trajectory = sys.simulate(&x0, t_end, dt)?;
    print!("{}", trajectory.to_csv());
    Ok(())
}

fn sample(network: &Path, count: usize, seed: u64) -> Result<(), Failure> {
    let net = load_network(network)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rates = sample_toric_rates(&net, count, &mut rng)?;
    emit(&rates);
    Ok(())
}

fn path(
    network: &Path,
    rates_a: &Path,
    rates_b: &Path,
    steps: usize,
    x0: Option<&str>,
    tol: f64,
) -> Result<(), Failure> {
    require_positive_tol(tol)?;
    let sys_a = load_system(network, rates_a)?;
    let sys_b = load_system(network, rates_b)?;
    let x0 = parse_state(sys_a.net().species_count(), x0)?;
    for sys in [&sys_a, &sys_b] {
        let report = toric_membership(sys, tol);
        if !report.member {
            eprintln!(
                "error: endpoint rate vector is not in the toric locus (residual {:.3e})",
                report.residual
            );
            return Err(Failure::Negative);
        }
    }
    let result = connect_path(&sys_a, &sys_b, &x0, steps)?;
    emit(&result);
    Ok(())
}

fn affine_check(
    network: &Path,
    matrix: &str,
    offset: &str,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<(), Failure> {
    require_positive_tol(tol)?;
    let net = load_network(network)?;
    let n = net.species_count();
    let entries = parse_floats(matrix)?;
    if entries.len() != n * n {
        return Err(Failure::Error(format!(
            "--matrix has {} entries, expected {}",
            entries.len(),
            n * n
        )));
    }
    let offsets = parse_floats(offset)?;
    if offsets.len() != n {
        return Err(Failure::Error(format!(
            "--offset has {} entries, expected {n}",
            offsets.len()
        )));
    }
    let a = DMatrix::from_row_slice(n, n, &entries);
    let b = DVector::from_column_slice(&offsets);
    let image = net.affine_transform(&a, &b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = affine_invariance_check(&net, &image, trials, tol, &mut rng)?;
    emit(&report);
    if report.agree {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

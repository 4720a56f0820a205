//! `gatearray`: build programmable processors, run programs on them, verify
//! their identities and run the channel-design experiments.
//!
//! Exit codes: 0 ok, 2 usage or schema error, 3 invalid mathematical input,
//! 4 dimension mismatch, 5 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use gatearray::channel::completeness_residual;
use gatearray::design::{self, SearchOptions};
use gatearray::json::to_canonical_string;
use gatearray::operator::{self, unitarity_residual};
use gatearray::probabilistic::{run_conditional, run_unconditional, MeasurementBasis};
use gatearray::processor::{mapcond_residual, UncheckedProcessor};
use gatearray::random::{random_state_with, rng_from_seed};
use gatearray::zoo;
use gatearray::{BasisOperators, Error, Operator, Processor, ProgramState, StateVector, C64};

#[derive(Parser, Debug)]
#[command(name = "gatearray", version, about = "Programmable quantum gate array toolkit")]
struct Cli {
    /// Numerical tolerance for validation and verification.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    U,
    Y,
    Uprime,
    Yprime,
    Swap,
    Qid,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Phase,
    Amp,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a processor of the given kind.
    Build {
        #[arg(value_enum)]
        kind: Kind,
        /// JSON parameters; not needed for `qid`.
        params: Option<PathBuf>,
    },
    /// Run a program on a data state.
    Run {
        processor: PathBuf,
        program: PathBuf,
        state: PathBuf,
        /// `x`, `computational`, or a JSON file with `vectors` or `projectors`.
        #[arg(long)]
        measure: Option<String>,
        /// Outcome to post-select on.
        #[arg(long, requires = "measure")]
        accept: Option<usize>,
    },
    /// Check unitarity, orthogonality, the dual relation and the map condition.
    Verify {
        processor: PathBuf,
        /// Random program pairs for the map-condition check.
        #[arg(long, default_value_t = 16)]
        pairs: usize,
    },
    /// Bound table showing amplitude damping needs unbounded program space.
    Nogo { m_witness: usize, n_ambient: usize },
    /// Numerically look for a processor realizing a channel family.
    Search {
        #[arg(value_enum)]
        family: Family,
        prog_dim: usize,
        iterations: usize,
        #[arg(long, default_value_t = 8)]
        starts: usize,
        #[arg(long, default_value_t = 50)]
        log_every: usize,
        /// Comma-separated θ values overriding the default grid.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn verification(message: impl Into<String>) -> Self {
        CliError { code: 5, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch(_) | Error::NotSquare { .. } => 4,
            Error::NotUnitary { .. }
            | Error::NotNormalized { .. }
            | Error::NotOrthonormal { .. }
            | Error::InvalidDensity(_)
            | Error::OrthogonalityViolation { .. }
            | Error::NotTracePreserving { .. }
            | Error::NoUniqueFixedPoint { .. } => 3,
            Error::OutOfRange(_) | Error::InvalidArgument(_) | Error::NoContradiction { .. } => 2,
        };
        CliError { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

/// A state vector before its normalization is checked.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVector {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl RawVector {
    fn check(self, tol: f64) -> CliResult<StateVector> {
        if self.dim != self.amplitudes.len() {
            return Err(CliError::usage(format!("vector declares dim {} but has {} amplitudes", self.dim, self.amplitudes.len())));
        }
        Ok(StateVector::with_tol(self.amplitudes.iter().map(|&[re, im]| C64::new(re, im)).collect(), tol)?)
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase", deny_unknown_fields)]
enum RawProgram {
    Pure(RawVector),
    Mixed(Operator),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitaryParams {
    unitaries: Vec<Operator>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UprimeParams {
    unitaries: Vec<Operator>,
    chi_basis: Vec<RawVector>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct YprimeParams {
    unitaries: Vec<Operator>,
    phi_basis: Vec<RawVector>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SwapParams {
    dim: usize,
    phi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomParams {
    data_dim: usize,
    prog_dim: usize,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawBasis {
    Vectors { vectors: Vec<RawVector> },
    Projectors { projectors: Vec<Operator> },
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn params<T: DeserializeOwned>(path: Option<&PathBuf>, kind: &str) -> CliResult<T> {
    let path = path.ok_or_else(|| CliError::usage(format!("build {kind} needs a params file")))?;
    read_json(path)
}

fn check_vectors(raw: Vec<RawVector>, tol: f64) -> CliResult<Vec<StateVector>> {
    raw.into_iter().map(|v| v.check(tol)).collect()
}

fn load_processor(path: &Path, tol: f64) -> CliResult<Processor> {
    let raw: UncheckedProcessor = read_json(path)?;
    Ok(Processor::with_tol(raw.g, raw.data_dim, raw.prog_dim, tol)?)
}

fn load_program(path: &Path, tol: f64) -> CliResult<ProgramState> {
    match read_json::<RawProgram>(path)? {
        RawProgram::Pure(v) => Ok(ProgramState::pure(v.check(tol)?)),
        RawProgram::Mixed(m) => Ok(ProgramState::mixed(m)?),
    }
}

fn load_basis(spec: &str, dim: usize, tol: f64) -> CliResult<MeasurementBasis> {
    match spec {
        "x" => Ok(MeasurementBasis::x_basis()),
        "computational" | "z" => Ok(MeasurementBasis::computational(dim)),
        path => match read_json::<RawBasis>(Path::new(path))? {
            RawBasis::Vectors { vectors } => {
                let vectors = check_vectors(vectors, tol)?;
                Ok(MeasurementBasis::from_vectors(&vectors)?)
            }
            RawBasis::Projectors { projectors } => Ok(MeasurementBasis::with_tol(projectors, tol)?),
        },
    }
}

fn cmd_build(kind: Kind, path: Option<&PathBuf>, cli: &Cli) -> CliResult<Value> {
    let tol = cli.tolerance;
    let proc = match kind {
        Kind::U => zoo::make_u_processor(&params::<UnitaryParams>(path, "u")?.unitaries)?,
        Kind::Y => zoo::make_y_processor(&params::<UnitaryParams>(path, "y")?.unitaries)?,
        Kind::Uprime => {
            let p: UprimeParams = params(path, "uprime")?;
            zoo::make_uprime_processor(&p.unitaries, &check_vectors(p.chi_basis, tol)?)?.0
        }
        Kind::Yprime => {
            let p: YprimeParams = params(path, "yprime")?;
            zoo::make_yprime_processor(&p.unitaries, &check_vectors(p.phi_basis, tol)?)?
        }
        Kind::Swap => {
            let p: SwapParams = params(path, "swap")?;
            zoo::make_partial_swap(p.dim, p.phi)?
        }
        Kind::Qid => {
            if path.is_some() {
                return Err(CliError::usage("build qid takes no params file"));
            }
            zoo::make_qid_processor()
        }
        Kind::Random => {
            let p: RandomParams = params(path, "random")?;
            Processor::random(p.data_dim, p.prog_dim, cli.seed)?
        }
    };
    to_value(&proc)
}

fn cmd_run(
    processor: &Path,
    program: &Path,
    state: &Path,
    measure: Option<&str>,
    accept: Option<usize>,
    cli: &Cli,
) -> CliResult<Value> {
    let tol = cli.tolerance;
    let proc = load_processor(processor, tol)?;
    let prog = load_program(program, tol)?;
    let rho: Operator = read_json(state)?;
    if rho.rows() != proc.data_dim() || rho.cols() != proc.data_dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} data state for data dim {}",
            rho.rows(),
            rho.cols(),
            proc.data_dim()
        ))
        .into());
    }
    if !operator::is_density(&rho, tol)? {
        return Err(Error::InvalidDensity("data state is not a density operator".into()).into());
    }
    let output = run_unconditional(&proc, &prog, &rho)?;
    let mut report = json!({ "output": to_value(&output)? });
    if let Some(spec) = measure {
        let basis = load_basis(spec, proc.prog_dim(), tol)?;
        let outcomes = run_conditional(&proc, &prog, &rho, &basis)?;
        let listed: Vec<Value> = outcomes
            .iter()
            .map(|o| {
                Ok(json!({
                    "outcome_index": o.outcome_index,
                    "probability": o.probability,
                    "post_state": to_value(&o.post_state)?,
                    "negligible": o.negligible,
                }))
            })
            .collect::<CliResult<_>>()?;
        if let Some(i) = accept {
            let chosen = listed
                .get(i)
                .cloned()
                .ok_or_else(|| CliError::usage(format!("--accept {i} but the measurement has {} outcomes", listed.len())))?;
            report["accepted"] = chosen;
        }
        report["outcomes"] = Value::Array(listed);
    }
    Ok(report)
}

fn cmd_verify(path: &Path, pairs: usize, cli: &Cli) -> CliResult<(Value, bool)> {
    let raw: UncheckedProcessor = read_json(path)?;
    let (m, n) = (raw.data_dim, raw.prog_dim);
    if m == 0 || n == 0 || raw.g.rows() != m * n || raw.g.cols() != m * n {
        return Err(Error::DimensionMismatch(format!(
            "G is {}x{} for data dim {m} and program dim {n}",
            raw.g.rows(),
            raw.g.cols()
        ))
        .into());
    }
    let g = &raw.g;
    let grid = (0..n)
        .map(|j| (0..n).map(|k| Operator::from_fn(m, m, |a, b| g[(a * n + j, b * n + k)])).collect())
        .collect();
    let basis = BasisOperators::new(m, grid)?;
    let mut rng = rng_from_seed(cli.seed);
    let mut mapcond: f64 = 0.0;
    let mut trace_preservation: f64 = 0.0;
    for _ in 0..pairs {
        let xi1 = random_state_with(n, &mut rng);
        let xi2 = random_state_with(n, &mut rng);
        mapcond = mapcond.max(mapcond_residual(&basis, &xi1, &xi2)?);
        trace_preservation = trace_preservation.max(completeness_residual(&basis.program_operators(&xi1)?)?);
    }
    let residuals = json!({
        "unitarity": unitarity_residual(g)?,
        "orthogonality": basis.orthogonality_residual(),
        "dual": basis.dual_residual(),
        "mapcond": mapcond,
        "trace_preservation": trace_preservation,
    });
    let passed = residuals.as_object().expect("object").values().all(|v| v.as_f64().is_some_and(|r| r <= cli.tolerance));
    let report = json!({
        "data_dim": m,
        "prog_dim": n,
        "tolerance": cli.tolerance,
        "seed": cli.seed,
        "pairs": pairs,
        "residuals": residuals,
        "passed": passed,
    });
    Ok((report, passed))
}

fn default_grid(family: Family) -> Vec<f64> {
    match family {
        Family::Phase => vec![0.0, 0.25, 0.5, 0.75, 1.0],
        Family::Amp => vec![0.1, 0.25, 0.4, 0.55, 0.7, 0.85],
    }
}

fn cmd_search(
    family: Family,
    prog_dim: usize,
    iterations: usize,
    starts: usize,
    log_every: usize,
    grid: Option<Vec<f64>>,
    cli: &Cli,
) -> CliResult<(Value, f64)> {
    let grid = grid.unwrap_or_else(|| default_grid(family));
    let fam = match family {
        Family::Phase => design::phase_damping_family(grid.clone())?,
        Family::Amp => design::amplitude_damping_family(grid.clone())?,
    };
    let opts = SearchOptions { iterations, starts, seed: cli.seed, log_every };
    let res = design::feasibility_search(&fam, prog_dim, &opts)?;
    let report = json!({
        "family": fam.name(),
        "grid": grid,
        "prog_dim": prog_dim,
        "iterations": iterations,
        "starts": starts,
        "seed": cli.seed,
        "best_residual": res.best_residual,
        "best_start": res.best_start,
        "log": to_value(&res.log)?,
        "processor": to_value(&res.best_processor)?,
        "programs": to_value(&res.best_programs)?,
    });
    Ok((report, res.best_residual))
}

fn to_value<T: serde::Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::usage(e.to_string()))
}

fn emit(value: &Value, cli: &Cli) -> CliResult<()> {
    let mut text = to_canonical_string(value, cli.format == Format::Pretty).map_err(|e| CliError::usage(e.to_string()))?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    if cli.tolerance.is_nan() || cli.tolerance <= 0.0 {
        return Err(CliError::usage("--tolerance must be positive"));
    }
    match &cli.command {
        Command::Build { kind, params } => emit(&cmd_build(*kind, params.as_ref(), cli)?, cli),
        Command::Run { processor, program, state, measure, accept } => {
            emit(&cmd_run(processor, program, state, measure.as_deref(), *accept, cli)?, cli)
        }
        Command::Verify { processor, pairs } => {
            let (report, passed) = cmd_verify(processor, *pairs, cli)?;
            emit(&report, cli)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::verification("processor failed verification"))
            }
        }
        Command::Nogo { m_witness, n_ambient } => emit(&to_value(&design::no_go_witness(*m_witness, *n_ambient)?)?, cli),
        Command::Search { family, prog_dim, iterations, starts, log_every, grid } => {
            let (report, residual) = cmd_search(*family, *prog_dim, *iterations, *starts, *log_every, grid.clone(), cli)?;
            emit(&report, cli)?;
            if cli.out.is_some() {
                println!("best_residual {}", gatearray::json::format_float(residual));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gatearray: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

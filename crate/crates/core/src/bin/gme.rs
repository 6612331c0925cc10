use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use gme_core::bloch::correlation_tensor;
use gme_core::criteria::{evaluate, Criterion};
use gme_core::families::{parse_params, Family, Params};
use gme_core::reproduce::{reproduce, Status, Target};
use gme_core::states::is_ppt;
use gme_core::sweep::{find_threshold, sweep, SweepConfig, ThresholdSpec, DEFAULT_TOL};
use gme_core::{generators, ComplexMatrix, Error};

#[derive(Parser)]
#[command(
    name = "gme",
    version,
    about = "Genuine tripartite entanglement detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the SU(d) generators.
    Basis {
        #[arg(long)]
        d: usize,
        /// Also report the orthogonality check.
        #[arg(long)]
        check: bool,
    },
    /// Print a density matrix with rank and PPT verdicts.
    State(StateArgs),
    /// Print correlation tensor components or norms.
    Bloch {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_enum, default_value_t = Emit::Norms)]
        emit: Emit,
    },
    /// Evaluate the detection criteria.
    Criteria {
        #[command(flatten)]
        state: StateArgs,
        /// Ky Fan orders; defaults to every order.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
    },
    /// Run a parameter sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Bisect for the parameter value where a criterion starts detecting.
    Threshold {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        criterion: Criterion,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        param: String,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Reproduce published numbers; `all` runs every target.
    Reproduce {
        target: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct StateArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated `key=value` pairs, e.g. `p1=-1,x=0.5`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    params: String,
}

impl StateArgs {
    fn params(&self) -> Result<Params, Error> {
        parse_params(&self.params)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Components,
    Norms,
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                .collect()
        })
        .collect();
    Value::Array(rows)
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Error> {
    writeln!(io::stdout(), "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Basis { d, check } => {
            let basis = generators(d)?;
            let mut out = json!({
                "d": d,
                "count": basis.len(),
                "generators": basis.generators().iter().map(matrix_json).collect::<Vec<_>>(),
            });
            if check {
                out["orthogonality"] = serde_json::to_value(basis.verify_orthogonality())?;
            }
            print_json(&out)?;
        }
        Command::State(args) => {
            let state = args.family.build(&args.params()?)?;
            let n = state.dims().len();
            let cuts: Vec<Value> = (0..if n == 2 { 1 } else { n })
                .map(|i| {
                    let r = is_ppt(&state, &[i])?;
                    Ok(json!({ "side": [i], "ppt": r.ppt, "min_eigenvalue": r.min_eigenvalue }))
                })
                .collect::<Result<_, Error>>()?;
            print_json(&json!({
                "family": args.family,
                "dims": state.dims(),
                "rank": state.rank(1e-10),
                "purity": state.purity(),
                "ppt": cuts,
                "matrix": matrix_json(state.matrix()),
            }))?;
        }
        Command::Bloch { state, emit } => {
            let rho = state.family.tripartite(&state.params()?)?;
            let t = correlation_tensor(&rho, &generators(rho.dims()[0])?)?;
            match emit {
                Emit::Components => print_json(&t)?,
                Emit::Norms => print_json(&t.norms())?,
            }
        }
        Command::Criteria { state, k } => {
            let t = state.family.tensor(&state.params()?)?;
            let ks = if k.is_empty() {
                (1..t.n() + 1).collect()
            } else {
                k
            };
            print_json(&evaluate(&t, &Criterion::ALL, &ks)?)?;
        }
        Command::Sweep { config } => {
            let cfg: SweepConfig = serde_json::from_str(&std::fs::read_to_string(&config)?)?;
            let result = sweep(&cfg)?;
            if cfg.output.is_some() {
                print_json(&result.thresholds)?;
            } else {
                result.write_csv(std::io::stdout().lock())?;
            }
        }
        Command::Threshold {
            state,
            criterion,
            k,
            param,
            lo,
            hi,
            tol,
        } => {
            let spec = ThresholdSpec {
                family: state.family,
                params: state.params()?,
                criterion,
                k,
                parameter: param,
                lo,
                hi,
                tol,
            };
            print_json(&find_threshold(&spec)?)?;
        }
        Command::Reproduce { target, out } => {
            let targets = if target == "all" {
                Target::ALL.to_vec()
            } else {
                vec![target.parse::<Target>()?]
            };
            let mut ok = true;
            for t in targets {
                let report = reproduce(t, out.as_deref())?;
                for c in &report.checks {
                    let status = match c.status {
                        Status::Pass => "PASS",
                        Status::Fail => "FAIL",
                        Status::Flagged => "FLAG",
                    };
                    let measured = c.measured.map_or("-".into(), |v| format!("{v:.9}"));
                    let expected = c.expected.map_or("-".into(), |v| format!("{v}"));
                    writeln!(
                        io::stdout(),
                        "[{status}] {t}/{}: measured {measured}, expected {expected}",
                        c.name
                    )?;
                }
                ok &= report.passed();
            }
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        // a closed downstream pipe is not an error
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Error::Csv(e)) if matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opdiscord::harness::{self, Format, Identity, Quantity, RunConfig};
use opdiscord::state::StateInput;
use opdiscord::tasks::Variational;
use opdiscord::{Error, Execution, Method, OptimizerConfig};

#[derive(Parser)]
#[command(name = "opdiscord", version, about = "Discord, merging cost and dense coding on tripartite states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity on a state file.
    Compute {
        #[arg(long)]
        state: PathBuf,
        /// e.g. "conditional-entropy A|B", "discord A|C", "dc-advantage A>B", "eq4"
        #[arg(long)]
        quantity: String,
        /// Role assignment for identity checks, e.g. "A=X,B=Y,C=Z".
        #[arg(long)]
        roles: Option<String>,
        /// Dense coding output dimension.
        #[arg(long = "d-out")]
        d_out: Option<usize>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Check an identity on Haar-random pure states and write a report.
    Verify {
        #[arg(long, default_value = "all")]
        identity: String,
        #[arg(long, default_value = "2,2,2")]
        dims: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Dense coding output dimensions to sweep, e.g. "2,4".
        #[arg(long = "d-out")]
        d_out: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Write Haar-random pure states and a seed manifest into a directory.
    Sample {
        #[arg(long, default_value = "2,2,2")]
        dims: String,
        #[arg(long, alias = "count", default_value_t = 1)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct OptArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    restarts: Option<usize>,
    /// POVM outcome counts, e.g. "2,4".
    #[arg(long)]
    outcomes: Option<String>,
    #[arg(long, default_value = "simplex")]
    method: String,
    /// Run on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl OptArgs {
    fn settings(&self) -> Result<Variational, Error> {
        let mut cfg = OptimizerConfig::default().with_seed(self.seed).with_method(self.method.parse::<Method>()?);
        if let Some(r) = self.restarts {
            cfg = cfg.with_restarts(r);
        }
        if self.sequential {
            cfg = cfg.with_execution(Execution::Sequential);
        }
        cfg.validate()?;
        let outcomes = match &self.outcomes {
            Some(s) => list(s)?,
            None => Vec::new(),
        };
        Ok(Variational { outcomes, ..Variational::with_optimizer(cfg) })
    }
}

fn list(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Config(format!("expected integers, found `{s}`"))))
        .collect()
}

fn dims3(s: &str) -> Result<[usize; 3], Error> {
    let v = list(s)?;
    v.as_slice().try_into().map_err(|_| Error::Dimension(format!("three dims expected, found `{s}`")))
}

fn roles(s: &str) -> Result<[String; 3], Error> {
    let mut out: [Option<String>; 3] = Default::default();
    for part in s.split(',') {
        let (role, label) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected ROLE=label, found `{part}`")))?;
        let slot = match role.trim() {
            "A" => 0,
            "B" => 1,
            "C" => 2,
            other => return Err(Error::Config(format!("unknown role `{other}`"))),
        };
        out[slot] = Some(label.trim().to_string());
    }
    match out {
        [Some(a), Some(b), Some(c)] => Ok([a, b, c]),
        _ => Err(Error::Config("roles must assign A, B and C".into())),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::InvalidState(_) => 2,
        Error::Io(_) => 4,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Compute { state, quantity, roles: role_arg, d_out, opt } => {
            let settings = opt.settings()?;
            let input = StateInput::read(&state)?;
            let q: Quantity = quantity.parse()?;
            let assigned = role_arg.as_deref().map(roles).transpose()?;
            let assigned_refs = assigned.as_ref().map(|r| [r[0].as_str(), r[1].as_str(), r[2].as_str()]);
            let record = harness::compute(&input, &q, &quantity, assigned_refs, &settings, d_out)?;
            eprintln!("{} = {} ({})", record.quantity, record.value, record.route);
            println!("{}", serde_json::to_string(&record).map_err(Error::from)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { identity, dims, samples, d_out, out, format, opt } => {
            let format: Format = format.parse()?;
            let cfg = RunConfig {
                identity: identity.parse::<Identity>()?,
                dims: dims3(&dims)?,
                samples,
                seed: opt.seed,
                settings: opt.settings()?,
                d_outs: d_out.as_deref().map(list).transpose()?.unwrap_or_default(),
                out_path: out.clone(),
                format,
                ..RunConfig::default()
            };
            let reports = harness::verify(&cfg)?;
            for r in &reports {
                eprintln!("{r}");
            }
            match &out {
                Some(path) => {
                    harness::write_reports(&reports, path, format)?;
                    let summary: Vec<_> = reports
                        .iter()
                        .map(|r| serde_json::json!({ "identity": r.identity, "aggregate": r.aggregate }))
                        .collect();
                    println!("{}", serde_json::to_string(&summary).map_err(Error::from)?);
                }
                None => println!("{}", harness::render_reports(&reports, format)?),
            }
            Ok(if reports.iter().all(|r| r.all_passed()) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sample { dims, samples, seed, out } => {
            let dims = list(&dims)?;
            let manifest = harness::sample(&dims, samples, seed, &out)?;
            eprintln!("wrote {} states to {}", manifest.states.len(), out.display());
            println!("{}", serde_json::to_string(&manifest).map_err(Error::from)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

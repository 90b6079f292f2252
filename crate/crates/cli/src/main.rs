use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use regev_core::codes::{rs_code, LinearCode};
use regev_core::config::{Budget, Tolerances, DEFAULT_MAX_AMPLITUDES};
use regev_core::decode::{unique_radius, Decoder, DecoderKind};
use regev_core::galois::vector::decode_index;
use regev_core::galois::Fq;
use regev_core::noise::{ConstraintSet, ErrorProfile};
use regev_core::opi::{brute_force_opi, opi_to_icc, verify, OpiInstance, OpiSolution};
use regev_core::qsim::{verify_bound, Reduction, ReductionOutcome};
use regev_core::rng::{stream, Stream};
use regev_core::{selfcheck, thresholds};

/// Slack below which a simulation report counts as a failed check.
const SLACK_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "regev", version, about = "Threshold tables, exact reduction simulations and OPI tooling")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum number of dense amplitudes any command may allocate.
    #[arg(long, global = true, env = "REGEV_BUDGET", default_value_t = DEFAULT_MAX_AMPLITUDES)]
    budget: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Decoder thresholds.
    #[command(subcommand)]
    Thresholds(ThresholdsCmd),
    /// Exact simulation of the reduction on a small code.
    Simulate(SimulateArgs),
    /// Optimal polynomial interpolation instances.
    #[command(subcommand)]
    Opi(OpiCmd),
    /// Run the built-in invariant suites.
    Selfcheck {
        /// Tolerance override, e.g. `parseval=1e-12`. Repeatable.
        #[arg(long = "tol", value_parser = parse_tol)]
        tol: Vec<(String, f64)>,
    },
}

#[derive(Subcommand)]
enum ThresholdsCmd {
    /// The six-row comparison table.
    Table1,
    /// Maximal tau per criterion along a grid of rates.
    Curves {
        #[arg(long)]
        rho: f64,
        /// `start:end:step`
        #[arg(long, default_value = "0.05:0.95:0.05")]
        grid: String,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    q: u32,
    /// Code length; `n = q` uses Reed-Solomon, anything else a random code.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// `bw`, `nearest` or `list:RADIUS`.
    #[arg(long, default_value = "nearest")]
    decoder: String,
    #[arg(long, default_value_t = 0.8)]
    tau: f64,
    #[arg(long, default_value_t = 0.6)]
    ttilde: f64,
    /// `interval:Z`, `random:SIZE` or `fixed:a,b,...`.
    #[arg(long, default_value = "interval:0")]
    sets: String,
    /// `all` or `random[:COUNT]`.
    #[arg(long, default_value = "all")]
    u: String,
}

#[derive(Subcommand)]
enum OpiCmd {
    /// Random instance with `x` uniform in F_q^q.
    Gen {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        set_size: usize,
        #[arg(long)]
        tau: f64,
    },
    /// Exhaustive search over all q^k polynomials.
    SolveBruteforce { instance: PathBuf },
    /// Satisfied count of a solution and whether it meets tau.
    Verify { instance: PathBuf, solution: PathBuf },
    /// The equivalent coset problem.
    Convert { instance: PathBuf },
}

/// Failures mapped to exit codes.
enum Failure {
    Check(String),
    Input(String),
}

impl From<regev_core::Error> for Failure {
    fn from(e: regev_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(String, bool), Failure>;

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let value: f64 = value.parse().map_err(|e| format!("bad value in '{s}': {e}"))?;
    if !Tolerances::NAMES.contains(&name) {
        return Err(format!("unknown tolerance '{name}', expected one of {}", Tolerances::NAMES.join(", ")));
    }
    Ok((name.to_string(), value))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: parse error at {e}", path.display())))
}

fn cmd_thresholds(cmd: &ThresholdsCmd, format: Format) -> CmdResult {
    let out = match cmd {
        ThresholdsCmd::Table1 => {
            let rows = thresholds::table1()?;
            match format {
                Format::Json => to_json(&rows),
                _ => thresholds::table_csv(&rows),
            }
        }
        ThresholdsCmd::Curves { rho, grid } => {
            let grid = thresholds::parse_grid(grid)?;
            let points = thresholds::figure1_curves(*rho, &grid)?;
            match format {
                Format::Json => to_json(&points),
                _ => thresholds::curves_csv(&points),
            }
        }
    };
    Ok((out, true))
}

fn parse_decoder(s: &str, code: &LinearCode) -> Result<DecoderKind, Failure> {
    match s {
        "bw" => Ok(DecoderKind::BerlekampWelch),
        "nearest" => Ok(DecoderKind::BruteForceNearest),
        "list" => Ok(DecoderKind::BruteForceList { radius: unique_radius(code.n(), code.k()) }),
        other => match other.strip_prefix("list:").map(str::parse) {
            Some(Ok(radius)) => Ok(DecoderKind::BruteForceList { radius }),
            _ => Err(Failure::Input(format!("unknown decoder '{other}'"))),
        },
    }
}

fn parse_profile(a: &SimulateArgs, seed: u64) -> Result<ErrorProfile, Failure> {
    let bad = || Failure::Input(format!("bad --sets '{}'", a.sets));
    let (kind, arg) = a.sets.split_once(':').ok_or_else(bad)?;
    Ok(match kind {
        "interval" => ErrorProfile::interval(a.q, a.n, arg.parse().map_err(|_| bad())?, a.tau)?,
        "random" => {
            let mut rng = stream(seed, Stream::Noise);
            ErrorProfile::random(a.q, a.n, arg.parse().map_err(|_| bad())?, a.tau, &mut rng)?
        }
        "fixed" => {
            let set = arg.split(',').map(|v| v.trim().parse()).collect::<Result<Vec<u32>, _>>().map_err(|_| bad())?;
            ErrorProfile::uniform(a.q, a.n, &set, a.tau)?
        }
        _ => return Err(bad()),
    })
}

#[derive(Serialize)]
struct SimulationReport {
    q: u32,
    n: usize,
    k: usize,
    code: &'static str,
    decoder: DecoderKind,
    tau: f64,
    ttilde: f64,
    sets: Vec<Vec<u32>>,
    symmetrized: bool,
    exhaustive: bool,
    outcomes: Vec<ReductionOutcome>,
    mean_p: f64,
    p_dec: f64,
    eta: f64,
    bound: f64,
    slack: f64,
}

fn cmd_simulate(a: &SimulateArgs, format: Format, seed: u64, budget: &Budget) -> CmdResult {
    let field = Fq::new(a.q)?;
    let (code, code_kind) = if a.n == a.q as usize {
        (rs_code(a.q, a.k)?, "reed_solomon")
    } else {
        (LinearCode::random(field, a.n, a.k, &mut stream(seed, Stream::Codes))?, "random")
    };
    let kind = parse_decoder(&a.decoder, &code)?;
    let profile = parse_profile(a, seed)?;
    let constraint = ConstraintSet::from_profile(&profile, a.ttilde)?;
    let decoder = Decoder::new(kind, code.clone(), budget)?;
    let red = Reduction::new(&code, &profile, &decoder, &constraint, budget)?;

    let syndromes = budget.check(a.q, a.k)?;
    let (outcomes, exhaustive) = match a.u.as_str() {
        "all" => (red.run_all()?, true),
        other => {
            let count = match other.strip_prefix("random") {
                Some("") => 8,
                Some(rest) => rest
                    .strip_prefix(':')
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| Failure::Input(format!("bad --u '{other}'")))?,
                None => return Err(Failure::Input(format!("bad --u '{other}'"))),
            };
            let mut rng = stream(seed, Stream::Simulate);
            let us: Vec<Vec<u32>> = (0..count).map(|_| decode_index(rng.gen_range(0..syndromes), a.k, a.q)).collect();
            (us.iter().map(|u| red.run(u)).collect::<Result<Vec<_>, _>>()?, false)
        }
    };
    let (mean_p, bound, slack) = if exhaustive {
        let r = verify_bound(&outcomes, a.q, a.k, red.p_dec(), red.eta())?;
        (r.mean_p, r.bound, r.slack)
    } else {
        let mean = outcomes.iter().map(|o| o.p_u).sum::<f64>() / outcomes.len().max(1) as f64;
        (mean, red.bound(), mean - red.bound())
    };
    let report = SimulationReport {
        q: a.q,
        n: a.n,
        k: a.k,
        code: code_kind,
        decoder: kind,
        tau: a.tau,
        ttilde: a.ttilde,
        sets: profile.sets().to_vec(),
        symmetrized: red.is_symmetrized(),
        exhaustive,
        outcomes,
        mean_p,
        p_dec: red.p_dec(),
        eta: red.eta(),
        bound,
        slack,
    };
    let ok = slack >= -SLACK_TOL;
    let out = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("u,p_u,post_select_prob\n");
            for o in &report.outcomes {
                let u: Vec<String> = o.u.iter().map(u32::to_string).collect();
                s += &format!("{},{:.6},{:.6}\n", u.join(" "), o.p_u, o.post_select_prob);
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "code {} q={} n={} k={} decoder {:?} symmetrized {}\n",
                code_kind, a.q, a.n, a.k, kind, report.symmetrized
            );
            for o in &report.outcomes {
                s += &format!("u={:?} p_u={:.12} accept={:.12}\n", o.u, o.p_u, o.post_select_prob);
            }
            s += &format!(
                "mean_p={:.12} p_dec={:.12} eta={:.12} bound={:.12} slack={:.3e} {}\n",
                mean_p,
                report.p_dec,
                report.eta,
                bound,
                slack,
                if ok { "ok" } else { "VIOLATED" }
            );
            s
        }
    };
    // The report is emitted even on failure so it can be inspected.
    Ok((out, ok))
}

fn cmd_opi(cmd: &OpiCmd, seed: u64, budget: &Budget, format: Format) -> CmdResult {
    match cmd {
        OpiCmd::Gen { q, k, set_size, tau } => Ok((to_json(&OpiInstance::generate(*q, *k, *set_size, *tau, seed)?), true)),
        OpiCmd::SolveBruteforce { instance } => {
            let inst: OpiInstance = read_json(instance)?;
            inst.validate()?;
            Ok((to_json(&brute_force_opi(&inst, budget)?), true))
        }
        OpiCmd::Verify { instance, solution } => {
            let inst: OpiInstance = read_json(instance)?;
            let sol: OpiSolution = read_json(solution)?;
            let v = verify(&inst, &sol)?;
            let out = match format {
                Format::Json => to_json(&v),
                Format::Csv => format!("count,meets\n{},{}\n", v.count, v.meets),
                Format::Text => format!("count {} of {} (target {}), meets {}\n", v.count, inst.q, inst.target_count(), v.meets),
            };
            Ok((out, v.meets))
        }
        OpiCmd::Convert { instance } => {
            let inst: OpiInstance = read_json(instance)?;
            Ok((to_json(&opi_to_icc(&inst)?.describe()), true))
        }
    }
}

fn cmd_selfcheck(tol: &[(String, f64)], seed: u64, budget: &Budget, format: Format) -> CmdResult {
    let mut tolerances = Tolerances::default();
    for (name, value) in tol {
        tolerances.set(name, *value)?;
    }
    let results = selfcheck::run_all(&tolerances, budget, seed);
    let ok = results.iter().all(|r| r.passed);
    let out = match format {
        Format::Json => to_json(&results),
        Format::Csv => {
            let mut s = String::from("suite,passed\n");
            for r in &results {
                s += &format!("{},{}\n", r.name, r.passed);
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                s += &format!("{} {}: {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            s
        }
    };
    Ok((out, ok))
}

fn run(cli: &Cli) -> CmdResult {
    let budget = Budget::new(cli.budget);
    match &cli.command {
        Command::Thresholds(cmd) => cmd_thresholds(cmd, cli.format.unwrap_or(Format::Csv)),
        Command::Simulate(a) => cmd_simulate(a, cli.format.unwrap_or(Format::Text), cli.seed, &budget),
        Command::Opi(cmd) => cmd_opi(cmd, cli.seed, &budget, cli.format.unwrap_or(Format::Text)),
        Command::Selfcheck { tol } => cmd_selfcheck(tol, cli.seed, &budget, cli.format.unwrap_or(Format::Text)),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Failure::Input(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(text, ok)| {
        emit(cli.out.as_deref(), &text)?;
        if ok {
            Ok(())
        } else {
            Err(Failure::Check("check failed".into()))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("regev: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("regev: {msg}");
            ExitCode::from(2)
        }
    }
}

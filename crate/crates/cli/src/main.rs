mod data;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use concave_lcm::sim::{
    build_critical_table, entries_sha256, simulate_limit_quantiles, verify_prop1_coupling, verify_thm1_coupling,
    Provenance,
};
use concave_lcm::statistics::{counterexample, s_statistic};
use concave_lcm::stream::DEFAULT_SEED;
use concave_lcm::{ConcaveCdf, CriticalValueTable, NormIndex, SimConfig, StreamToken};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "concavity", version, about = "Test whether a distribution function on [0, 1] is concave")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SimArgs {
    /// Grid points per unit interval for simulated paths
    #[arg(long, default_value_t = 16384)]
    grid: usize,
    /// Monte Carlo replications
    #[arg(long, default_value_t = 200_000)]
    reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig { grid_size: self.grid, replications: self.reps, master_seed: self.seed }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Prop1,
    Thm1,
}

#[derive(Subcommand)]
enum Command {
    /// Compute S_{n,p} for a data file and compare it with critical values
    Test {
        data: PathBuf,
        #[arg(long, default_value = "2")]
        p: NormIndex,
        #[arg(long, value_delimiter = ',', default_value = "0.05")]
        alpha: Vec<f64>,
        /// CSV column (header name or 0-based index); plain text otherwise
        #[arg(long)]
        column: Option<String>,
        /// Critical value table written by `critvals`
        #[arg(long, conflicts_with = "simulate")]
        table: Option<PathBuf>,
        /// Simulate critical values instead of reading a table
        #[arg(long)]
        simulate: bool,
        /// Use the limit law of this concave CDF instead of the uniform one
        #[arg(long, requires = "simulate")]
        null_cdf: Option<PathBuf>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Simulate and save a table of critical values for the uniform law
    Critvals {
        #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
        p: Vec<NormIndex>,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
        alpha: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Simulate quantiles of the limit law for a concave CDF
    SimulateLimit {
        /// JSON CDF spec, e.g. {"type":"piecewise","knots":[[0,0],[0.5,0.75],[1,1]]}
        #[arg(long)]
        cdf: PathBuf,
        #[arg(long, default_value = "2")]
        p: NormIndex,
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1")]
        alpha: Vec<f64>,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Check the pathwise coupling identities on simulated paths
    Verify {
        #[arg(long)]
        cdf: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        p: Vec<NormIndex>,
        #[arg(long, default_value_t = 1000)]
        paths: u64,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Recompute the two-point transform example by exact integration
    Counterexample,
}

fn emit(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn load_cdf(path: &Path) -> Result<ConcaveCdf> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid CDF spec", path.display()))
}

#[derive(Serialize)]
struct CriticalSource {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    null_cdf: Option<ConcaveCdf>,
    entries_sha256: String,
    provenance: Provenance,
}

#[derive(Serialize)]
struct Decision {
    alpha: f64,
    critical_value: f64,
    se: f64,
    reject: bool,
}

#[derive(Serialize)]
struct TestReport {
    data: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<String>,
    statistic: &'static str,
    p: NormIndex,
    n: usize,
    value: f64,
    decisions: Vec<Decision>,
    critical_values: CriticalSource,
}

#[allow(clippy::too_many_arguments)]
fn cmd_test(
    data: PathBuf,
    p: NormIndex,
    alpha: Vec<f64>,
    column: Option<String>,
    table: Option<PathBuf>,
    simulate: bool,
    null_cdf: Option<PathBuf>,
    sim: SimArgs,
) -> Result<()> {
    let x = data::read_observations(&data, column.as_deref())?;
    let stat = s_statistic(&x, p)?;
    eprintln!("S_{{{},{}}} = {}", stat.n, p, stat.value);

    let (entries, source) = if let Some(path) = table {
        let t = CriticalValueTable::load(&path).with_context(|| format!("loading table {}", path.display()))?;
        let entries = alpha
            .iter()
            .map(|&a| {
                t.lookup(p, a)
                    .copied()
                    .with_context(|| format!("table {} has no entry for p = {p}, alpha = {a}", path.display()))
            })
            .collect::<Result<Vec<_>>>()?;
        let source = CriticalSource {
            kind: "table",
            table: Some(path),
            null_cdf: None,
            entries_sha256: t.entries_sha256(),
            provenance: t.provenance,
        };
        (entries, source)
    } else if simulate {
        let config = sim.config();
        match null_cdf {
            Some(path) => {
                let cdf = load_cdf(&path)?;
                eprintln!("simulating the limit law: {} replications on grid {}", config.replications, config.grid_size);
                let lq = simulate_limit_quantiles(&cdf, p, &config, &alpha)?;
                let source = CriticalSource {
                    kind: "simulated",
                    table: None,
                    null_cdf: Some(cdf),
                    entries_sha256: entries_sha256(&lq.quantiles),
                    provenance: lq.provenance,
                };
                (lq.quantiles, source)
            }
            None => {
                eprintln!("simulating critical values: {} replications on grid {}", config.replications, config.grid_size);
                let t = build_critical_table(&config, &alpha, &[p])?;
                let source = CriticalSource {
                    kind: "simulated",
                    table: None,
                    null_cdf: Some(ConcaveCdf::Uniform),
                    entries_sha256: t.entries_sha256(),
                    provenance: t.provenance,
                };
                (t.entries, source)
            }
        }
    } else {
        bail!("no critical values: pass --table FILE or --simulate");
    };

    let decisions = entries
        .iter()
        .map(|e| Decision { alpha: e.alpha, critical_value: e.q, se: e.se, reject: stat.value > e.q })
        .collect();
    emit(&TestReport {
        data,
        column,
        statistic: "S",
        p,
        n: stat.n,
        value: stat.value,
        decisions,
        critical_values: source,
    })
}

fn cmd_critvals(p: Vec<NormIndex>, alpha: Vec<f64>, out: PathBuf, sim: SimArgs) -> Result<()> {
    let config = sim.config();
    eprintln!("building table: {} replications on grid {}", config.replications, config.grid_size);
    let table = build_critical_table(&config, &alpha, &p)?;
    table.save(&out).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {}", out.display());
    emit(&json!({
        "out": out,
        "entries_sha256": table.entries_sha256(),
        "table": table,
    }))
}

fn cmd_verify(cdf: PathBuf, ps: Vec<NormIndex>, paths: u64, grid: usize, seed: u64, mode: Mode) -> Result<bool> {
    let spec = load_cdf(&cdf)?;
    let mut rows = Vec::new();
    let mut ok = true;
    for p in ps {
        let row = match mode {
            Mode::Prop1 => {
                let mut max_gap: f64 = 0.0;
                let mut failures = 0u64;
                for r in 0..paths {
                    let c = verify_prop1_coupling(&spec, p, grid, StreamToken::new(seed, r))?;
                    max_gap = max_gap.max(c.gap);
                    failures += !c.holds() as u64;
                }
                ok &= failures == 0;
                json!({ "p": p, "max_gap": max_gap, "failures": failures })
            }
            Mode::Thm1 => {
                let iv = spec.extract_intervals();
                let mut violations = 0u64;
                let mut hull_violations = 0usize;
                let mut max_excess = f64::NEG_INFINITY;
                for r in 0..paths {
                    let c = verify_thm1_coupling(&iv, p, grid, StreamToken::new(seed, r))?;
                    violations += c.violation as u64;
                    hull_violations += c.hull_violations;
                    max_excess = max_excess.max(c.lhs - c.rhs);
                }
                ok &= violations == 0 && hull_violations == 0;
                json!({
                    "p": p,
                    "violations": violations,
                    "hull_violations": hull_violations,
                    "max_lhs_minus_rhs": max_excess,
                })
            }
        };
        eprintln!("{row}");
        rows.push(row);
    }
    let mode = match mode {
        Mode::Prop1 => "prop1",
        Mode::Thm1 => "thm1",
    };
    emit(&json!({
        "mode": mode,
        "cdf": spec,
        "paths": paths,
        "grid_size": grid,
        "master_seed": seed,
        "results": rows,
        "passed": ok,
    }))?;
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Test { data, p, alpha, column, table, simulate, null_cdf, sim } => {
            cmd_test(data, p, alpha, column, table, simulate, null_cdf, sim)?
        }
        Command::Critvals { p, alpha, out, sim } => cmd_critvals(p, alpha, out, sim)?,
        Command::SimulateLimit { cdf, p, alpha, sim } => {
            let spec = load_cdf(&cdf)?;
            let config = sim.config();
            eprintln!("simulating: {} replications on grid {}", config.replications, config.grid_size);
            emit(&simulate_limit_quantiles(&spec, p, &config, &alpha)?)?
        }
        Command::Verify { cdf, p, paths, grid, seed, mode } => return cmd_verify(cdf, p, paths, grid, seed, mode),
        Command::Counterexample => emit(&counterexample())?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

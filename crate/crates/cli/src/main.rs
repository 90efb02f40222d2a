use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use zxpart::costmodel::CostModel;
use zxpart::engine::{plan_circuit, simulate_amplitude, EngineConfig, Method};
use zxpart::generators::{gen_clifford_t, gen_compound, parse_sigma, CircuitSpec, CompoundSpec};
use zxpart::sweep::{calibrate, sweep_heatmap, sweep_sigma, to_csv, CalibrateSpec, SweepOptions};
use zxpart::{BasisState, Circuit, Error, Exec};

#[derive(Parser)]
#[command(name = "zxpart", version, about = "Clifford+T amplitudes through partitioned ZX-diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one amplitude.
    Simulate(SimulateArgs),
    /// Print the partition plan and runtime projections without evaluating.
    Plan(PlanArgs),
    /// Measure α and the calculation rates on this machine.
    Calibrate(CalibrateArgs),
    /// Depth × qubit grid of mean log2 runtimes, as CSV.
    SweepHeatmap(HeatmapArgs),
    /// CNOT-spread sweep of mean log2 runtimes, as CSV.
    SweepSigma(SigmaArgs),
    /// Print a generated circuit in the text format.
    Generate(SourceArgs),
}

#[derive(Args, Clone)]
struct SourceArgs {
    /// Circuit file in the text format.
    #[arg(long, group = "source")]
    circuit: Option<PathBuf>,
    /// Random circuit: n,d,sigma,seed (sigma may be `inf`).
    #[arg(long, group = "source")]
    random: Option<String>,
    /// Compound circuit: blocks,qubits_per_block,depth_per_block,external_cnots,block_sigma,seed.
    #[arg(long, group = "source")]
    compound: Option<String>,
}

#[derive(Args, Clone)]
struct BoundaryArgs {
    /// Input basis states, qubit 0 first, from `0`, `1`, `+`.
    #[arg(long = "in", conflicts_with = "plus")]
    ins: Option<String>,
    /// Output basis effects, qubit 0 first, from `0`, `1`, `+`.
    #[arg(long = "out", conflicts_with = "plus")]
    outs: Option<String>,
    /// `|+⟩` on every input and `⟨+|` on every output (the default).
    #[arg(long)]
    plus: bool,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Cost-model config (key=value or JSON); overrides ZXPART_COST_MODEL.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the decomposition efficiency α.
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest k to consider.
    #[arg(long)]
    k_max: Option<usize>,
    /// Only accept plans with at least two parts.
    #[arg(long)]
    force_partition: bool,
    /// Run everything on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    boundary: BoundaryArgs,
    #[arg(long, default_value = "smart")]
    method: String,
    /// Stop after planning.
    #[arg(long)]
    plan_only: bool,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    boundary: BoundaryArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value_t = 8)]
    samples: usize,
    #[arg(long, default_value_t = 12)]
    qubits: usize,
    #[arg(long, default_value_t = 160)]
    depth: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the measured model here as key=value.
    #[arg(long)]
    write: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report projections only, never run.
    #[arg(long)]
    estimate_only: bool,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct HeatmapArgs {
    /// Qubit counts: `a..b`, `a..b:step` or a comma list.
    #[arg(long)]
    qubits: String,
    /// Depths, same forms as --qubits.
    #[arg(long)]
    depths: String,
    #[arg(long, default_value = "inf")]
    sigma: String,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args)]
struct SigmaArgs {
    #[arg(long)]
    qubits: usize,
    #[arg(long)]
    depth: usize,
    /// Comma-separated σ values (`inf` allowed).
    #[arg(long, default_value = "0,1,2,3,4,inf")]
    sigmas: String,
    #[command(flatten)]
    sweep: SweepArgs,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn fields<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(bad(format!("--{what} expects {n} comma-separated fields, got {s:?}")));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| bad(format!("bad field {p:?} in --{what}"))))
        .collect()
}

fn load_circuit(src: &SourceArgs) -> Result<Circuit, Error> {
    if let Some(path) = &src.circuit {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        return Circuit::parse(&text);
    }
    if let Some(r) = &src.random {
        let p: Vec<&str> = r.split(',').map(str::trim).collect();
        if p.len() != 4 {
            return Err(bad(format!("--random expects n,d,sigma,seed, got {r:?}")));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad(format!("bad field {s:?} in --random")));
        return gen_clifford_t(&CircuitSpec {
            qubits: num(p[0])? as usize,
            depth: num(p[1])? as usize,
            sigma: parse_sigma(p[2]).map_err(|e| bad(e.to_string()))?,
            seed: num(p[3])?,
        });
    }
    if let Some(c) = &src.compound {
        let p: Vec<&str> = c.split(',').map(str::trim).collect();
        if p.len() != 6 {
            return Err(bad(format!(
                "--compound expects blocks,qubits,depth,external,block_sigma,seed, got {c:?}"
            )));
        }
        let ints: Vec<u64> = fields(&[p[0], p[1], p[2], p[3], p[5]].join(","), 5, "compound")?;
        return gen_compound(&CompoundSpec {
            blocks: ints[0] as usize,
            qubits_per_block: ints[1] as usize,
            depth_per_block: ints[2] as usize,
            external_cnots: ints[3] as usize,
            block_sigma: parse_sigma(p[4]).map_err(|e| bad(e.to_string()))?,
            seed: ints[4],
        });
    }
    Err(bad("one of --circuit, --random or --compound is required"))
}

fn boundary(c: &mut Circuit, b: &BoundaryArgs) -> Result<(Vec<BasisState>, Vec<BasisState>), Error> {
    let parse = |s: &Option<String>| -> Result<Option<Vec<BasisState>>, Error> {
        s.as_deref()
            .map(|s| BasisState::parse_list(s).map_err(|e| bad(e.to_string())))
            .transpose()
    };
    let ins = parse(&b.ins)?;
    let outs = parse(&b.outs)?;
    let wanted = ins.iter().chain(outs.iter()).map(Vec::len).max().unwrap_or(0);
    if wanted > c.qubits {
        *c = std::mem::take(c).with_qubits(wanted);
    }
    let n = c.qubits;
    let ins = ins.unwrap_or_else(|| BasisState::all_plus(n));
    let outs = outs.unwrap_or_else(|| BasisState::all_plus(n));
    for (name, v) in [("--in", &ins), ("--out", &outs)] {
        if v.len() != n {
            return Err(bad(format!("{name} has {} states for {n} qubits", v.len())));
        }
    }
    Ok((ins, outs))
}

fn engine_config(m: &ModelArgs) -> Result<EngineConfig, Error> {
    let mut cm = match &m.config {
        Some(p) => CostModel::load(p).map_err(|e| bad(format!("{}: {e}", p.display())))?,
        None => CostModel::from_env().map_err(|e| bad(format!("${}: {e}", zxpart::costmodel::CONFIG_ENV)))?,
    };
    if let Some(a) = m.alpha {
        cm = cm.with_alpha(a);
        cm.validate()?;
    }
    let mut cfg = EngineConfig {
        cost_model: cm,
        ..EngineConfig::default()
    };
    cfg.plan.k_max = m.k_max;
    cfg.plan.force_partition = m.force_partition;
    cfg.plan.exec = if m.sequential { Exec::Sequential } else { Exec::default() };
    Ok(cfg)
}

fn stdout(text: &str) -> Result<(), Error> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        // A closed pipe (`| head`) is not an error for us.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Error> {
    stdout(&format!("{}\n", serde_json::to_string_pretty(v)?))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<usize>, Error> {
    let s = s.trim();
    if let Some((range, step)) = s.split_once("..").map(|(a, rest)| {
        let (b, st) = rest.split_once(':').unwrap_or((rest, "1"));
        ((a.to_string(), b.to_string()), st.to_string())
    }) {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad(format!("bad {what} range {s:?}")));
        let (a, b, st) = (num(&range.0)?, num(&range.1)?, num(&step)?);
        if st == 0 || a > b {
            return Err(bad(format!("bad {what} range {s:?}")));
        }
        return Ok((a..=b).step_by(st).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| bad(format!("bad {what} value {x:?}"))))
        .collect()
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => stdout(text)?,
    }
    Ok(())
}

fn sweep_options(s: &SweepArgs) -> Result<SweepOptions, Error> {
    Ok(SweepOptions {
        samples: s.samples,
        seed: s.seed,
        estimate_only: s.estimate_only,
        engine: engine_config(&s.model)?,
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Simulate(a) => {
            let mut c = load_circuit(&a.source)?;
            let (ins, outs) = boundary(&mut c, &a.boundary)?;
            let method: Method = a.method.parse().map_err(|e: Error| bad(e.to_string()))?;
            let cfg = engine_config(&a.model)?;
            if a.plan_only {
                return print_json(&plan_circuit(&c, &ins, &outs, &cfg)?);
            }
            match simulate_amplitude(&c, &ins, &outs, method, &cfg) {
                Ok((_, report)) => print_json(&report),
                Err(e @ Error::ResourceCap { .. }) => {
                    // The plan explains the refusal.
                    print_json(&plan_circuit(&c, &ins, &outs, &cfg)?)?;
                    Err(e)
                }
                Err(e) => Err(e),
            }
        }
        Command::Plan(a) => {
            let mut c = load_circuit(&a.source)?;
            let (ins, outs) = boundary(&mut c, &a.boundary)?;
            print_json(&plan_circuit(&c, &ins, &outs, &engine_config(&a.model)?)?)
        }
        Command::Calibrate(a) => {
            let cfg = engine_config(&a.model)?;
            let cal = calibrate(
                &cfg.cost_model,
                &CalibrateSpec {
                    samples: a.samples,
                    qubits: a.qubits,
                    depth: a.depth,
                    seed: a.seed,
                    exec: cfg.plan.exec,
                },
            )?;
            if let Some(p) = &a.write {
                std::fs::write(p, cal.cost_model.to_key_values())?;
            }
            print_json(&cal)
        }
        Command::SweepHeatmap(a) => {
            let qubits = parse_list(&a.qubits, "qubits")?;
            let depths = parse_list(&a.depths, "depths")?;
            let sigma = parse_sigma(&a.sigma).map_err(|e| bad(e.to_string()))?;
            let rows = sweep_heatmap(&qubits, &depths, sigma, &sweep_options(&a.sweep)?)?;
            write_out(a.sweep.output.as_deref(), &to_csv(&rows))
        }
        Command::SweepSigma(a) => {
            let sigmas = a
                .sigmas
                .split(',')
                .map(|s| parse_sigma(s).map_err(|e| bad(e.to_string())))
                .collect::<Result<Vec<f64>, Error>>()?;
            let rows = sweep_sigma(a.qubits, a.depth, &sigmas, &sweep_options(&a.sweep)?)?;
            write_out(a.sweep.output.as_deref(), &to_csv(&rows))
        }
        Command::Generate(s) => stdout(&load_circuit(&s)?.to_text()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zxpart: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::Invalid(_) | Error::LengthMismatch { .. } => 2,
                Error::ResourceCap { .. } => 3,
                _ => 1,
            })
        }
    }
}

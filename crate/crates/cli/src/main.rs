use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use offload_core::engine::{
    DecisionEngine, DecisionRequest, DelayTolerance, EnvironmentSnapshot, FallbackPolicy,
    TaskDescriptor,
};
use offload_core::history::{HistoryLog, HistoryRecord};
use offload_core::runtime::client::RemoteClient;
use offload_core::runtime::local::LocalExecutor;
use offload_core::runtime::monitor::{
    Monitor, ProcStatCpuProbe, SharedEma, SyntheticProbe, TcpThroughputProbe,
};
use offload_core::runtime::protocol::DEFAULT_MAX_PAYLOAD;
use offload_core::runtime::proxy::{Dispatcher, Routing};
use offload_core::runtime::server::{Server, ServerConfig};
use offload_core::runtime::workloads::{self, AppId};
use offload_core::runtime::{Location, TaskSpec, WorkloadRegistry};
use offload_core::simulator::{self, config::parse_key_values, SweepConfig};

mod device;

use device::DeviceConfig;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "offload",
    version,
    about = "Energy-aware computation offloading"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-shot offloading decision from explicit inputs.
    Decide(DecideArgs),
    /// Serve the remote execution manager.
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        bind: String,
        #[arg(long, default_value_t = DEFAULT_MAX_PAYLOAD)]
        max_payload: u64,
        /// Stretch each execution to this multiple of its measured time.
        #[arg(long)]
        pace: Option<f64>,
    },
    /// Execute a task locally or remotely.
    Run(RunArgs),
    /// Inspect or seed the history log.
    Log {
        #[command(subcommand)]
        command: LogCommand,
    },
    /// Write a random workload input.
    GenInput {
        #[arg(long)]
        app: AppId,
        /// Approximate size in bytes.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DeviceArgs {
    /// Device config file (key = value).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    p_exec: Option<f64>,
    #[arg(long)]
    p_idle: Option<f64>,
    #[arg(long)]
    p_send: Option<f64>,
    #[arg(long)]
    p_receive: Option<f64>,
    #[arg(long)]
    speedup_n: Option<f64>,
    /// local | remote | error
    #[arg(long)]
    insufficient_history: Option<FallbackPolicy>,
}

#[derive(Args)]
struct DecideArgs {
    #[command(flatten)]
    device: DeviceArgs,
    /// Application name; selects history records.
    #[arg(long, default_value = "task")]
    app: String,
    /// Bytes to send.
    #[arg(long)]
    input_size: u64,
    /// Bytes to receive; defaults to the workload's estimate.
    #[arg(long)]
    result_size: Option<u64>,
    /// Predicted local execution time in seconds.
    #[arg(long, conflicts_with = "history")]
    t_exec: Option<f64>,
    /// Predict the execution time from this history log.
    #[arg(long)]
    history: Option<PathBuf>,
    /// Percent.
    #[arg(long)]
    cpu: f64,
    /// Bytes/s, both directions unless --receive-bandwidth is given.
    #[arg(long)]
    bandwidth: f64,
    #[arg(long)]
    receive_bandwidth: Option<f64>,
    /// Seconds, or `inf`.
    #[arg(long, default_value = "inf")]
    delay_tolerance: DelayTolerance,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    device: DeviceArgs,
    #[arg(long)]
    app: AppId,
    #[arg(long)]
    input: PathBuf,
    /// Remote execution manager address.
    #[arg(long)]
    remote: Option<String>,
    /// Seconds, or `inf`. Only used when the engine decides.
    #[arg(long, conflicts_with = "force")]
    delay_tolerance: Option<DelayTolerance>,
    /// Skip the decision engine.
    #[arg(long)]
    force: Option<Location>,
    /// Run locally if the remote call fails.
    #[arg(long)]
    fallback_local: bool,
    #[arg(long)]
    history: Option<PathBuf>,
    /// Fixed CPU workload percent instead of sampling /proc/stat.
    #[arg(long)]
    cpu: Option<f64>,
    /// Fixed bandwidth in bytes/s instead of probing the remote.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Write the task output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LogCommand {
    /// Append records, copied from a file or generated.
    Seed {
        #[arg(long)]
        history: PathBuf,
        /// File of `application,input_size,cpu,seconds` lines.
        #[arg(long, conflicts_with_all = ["app", "count"])]
        from: Option<PathBuf>,
        #[arg(long)]
        app: Option<AppId>,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Print records.
    Show {
        #[arg(long)]
        history: PathBuf,
        #[arg(long)]
        app: Option<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => simulate(&config, out.as_deref()),
        Command::Decide(args) => decide(args),
        Command::Serve {
            bind,
            max_payload,
            pace,
        } => serve(&bind, max_payload, pace),
        Command::Run(args) => run_task(args),
        Command::Log { command } => log(command),
        Command::GenInput {
            app,
            size,
            seed,
            out,
        } => {
            let data = workloads::generate_input(app, size, &mut StdRng::seed_from_u64(seed));
            fs::write(&out, data).with_context(|| format!("writing {}", out.display()))
        }
    }
}

fn simulate(config: &Path, out: Option<&Path>) -> Result<()> {
    let cfg = SweepConfig::load(config)?;
    let rows = simulator::run_sweep(&cfg)?;
    let csv = simulator::to_csv(&rows);
    match out {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display())),
        None => io::stdout()
            .write_all(csv.as_bytes())
            .context("writing stdout"),
    }
}

fn load_device(args: &DeviceArgs) -> Result<DeviceConfig> {
    let mut cfg = DeviceConfig::default();
    if let Some(path) = &args.config {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.apply(&parse_key_values(&text)?)
            .with_context(|| format!("in {}", path.display()))?;
    }
    let p = &mut cfg.profile;
    p.p_exec = args.p_exec.unwrap_or(p.p_exec);
    p.p_idle = args.p_idle.unwrap_or(p.p_idle);
    p.p_send = args.p_send.unwrap_or(p.p_send);
    p.p_receive = args.p_receive.unwrap_or(p.p_receive);
    cfg.speedup_n = args.speedup_n.unwrap_or(cfg.speedup_n);
    cfg.insufficient_history = args
        .insufficient_history
        .unwrap_or(cfg.insufficient_history);
    cfg.profile.validate()?;
    if !(cfg.speedup_n.is_finite() && cfg.speedup_n >= 1.0) {
        bail!("speedup_n must be >= 1, got {}", cfg.speedup_n);
    }
    Ok(cfg)
}

fn decide(args: DecideArgs) -> Result<()> {
    let device = load_device(&args.device)?;
    let result_size = match (args.result_size, args.app.parse::<AppId>()) {
        (Some(r), _) => r,
        (None, Ok(app)) => app.estimate_result_size_from_len(args.input_size),
        (None, Err(_)) => bail!("--result-size is required for application '{}'", args.app),
    };
    let request = DecisionRequest {
        task: TaskDescriptor {
            application: args.app.clone(),
            input_size: args.input_size,
            result_size,
        },
        delay_tolerance: args.delay_tolerance,
        power_profile: device.profile,
        speedup_n: device.speedup_n,
    };
    let env = EnvironmentSnapshot {
        cpu_workload: args.cpu,
        send_bandwidth: args.bandwidth,
        receive_bandwidth: args.receive_bandwidth.unwrap_or(args.bandwidth),
    };
    let engine = DecisionEngine::new(device.insufficient_history);
    let decision = match (args.t_exec, &args.history) {
        (Some(t), _) => engine.decide_with_prediction(&request, &env, t)?,
        (None, Some(path)) => {
            let log = HistoryLog::open(path)?;
            engine.decide(&request, &env, &log.snapshot(&args.app))?
        }
        (None, None) => bail!("one of --t-exec or --history is required"),
    };
    println!("{decision}");
    Ok(())
}

fn serve(bind: &str, max_payload: u64, pace: Option<f64>) -> Result<()> {
    let server = Server::bind(
        bind,
        WorkloadRegistry::standard(),
        ServerConfig { max_payload, pace },
    )
    .with_context(|| format!("binding {bind}"))?;
    eprintln!("listening on {}", server.local_addr()?);
    server.run()?;
    Ok(())
}

fn run_task(args: RunArgs) -> Result<()> {
    let device = load_device(&args.device)?;
    let input =
        fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let task = TaskSpec::new(args.app, input);
    let history = args
        .history
        .clone()
        .unwrap_or_else(|| device.history.clone());
    let mut log = HistoryLog::open(&history)?;
    let remote = args
        .remote
        .clone()
        .map(|e| RemoteClient::new(e).with_timeout(device.timeout));

    let routing = match args.force {
        Some(loc) => Routing::Force(loc),
        None => Routing::Decide(args.delay_tolerance.unwrap_or(DelayTolerance::Infinite)),
    };
    let needs_env = matches!(routing, Routing::Decide(_));
    let cpu = SharedEma::new(device.ema_periods)?;
    let bandwidth = SharedEma::new(device.ema_periods)?;
    let period = device.monitor_period;
    let samples = device.monitor_samples;
    match args.cpu {
        Some(v) => {
            Monitor::new(SyntheticProbe::constant(v), cpu.clone()).sample_once()?;
        }
        None => {
            Monitor::new(ProcStatCpuProbe::default(), cpu.clone())
                .with_period(period)
                .sample_n(samples)
                .context("sampling cpu workload")?;
        }
    }
    if needs_env {
        match (args.bandwidth, &args.remote) {
            (Some(b), _) => {
                Monitor::new(SyntheticProbe::constant(b), bandwidth.clone()).sample_once()?;
            }
            (None, Some(endpoint)) => {
                Monitor::new(
                    TcpThroughputProbe::new(endpoint.clone(), 64 * 1024),
                    bandwidth.clone(),
                )
                .with_period(period)
                .sample_n(samples)
                .with_context(|| format!("probing bandwidth to {endpoint}"))?;
            }
            (None, None) => bail!("deciding needs --remote or --bandwidth"),
        }
    }

    let dispatcher = Dispatcher {
        local: LocalExecutor::default(),
        remote,
        engine: DecisionEngine::new(device.insufficient_history),
        profile: device.profile,
        speedup_n: device.speedup_n,
        cpu,
        bandwidth,
        fallback_local: args.fallback_local,
    };
    let (decision, target) = dispatcher.route(&task, routing, &log)?;
    if let Some(d) = &decision {
        eprintln!("decision: {d}");
    }
    let (result, fell_back) = dispatcher.execute(&task, target, &mut log)?;
    if let Some(why) = &fell_back {
        eprintln!("remote failed, ran locally: {why}");
    }
    eprintln!(
        "executed_at={} wall_time={}",
        result.executed_at, result.wall_time
    );
    match &args.output {
        Some(p) => {
            fs::write(p, &result.output_payload).with_context(|| format!("writing {}", p.display()))
        }
        None => io::stdout()
            .write_all(&result.output_payload)
            .context("writing stdout"),
    }
}

fn log(command: LogCommand) -> Result<()> {
    match command {
        LogCommand::Seed {
            history,
            from,
            app,
            count,
            seed,
        } => {
            let records = match from {
                Some(path) => read_records(&path)?,
                None => {
                    let app = app.ok_or_else(|| anyhow!("one of --from or --app is required"))?;
                    synthetic_records(app, count, seed)
                }
            };
            let mut log = HistoryLog::open(&history)?;
            let n = records.len();
            for r in records {
                log.append(r)?;
            }
            eprintln!("appended {n} record(s) to {}", history.display());
            Ok(())
        }
        LogCommand::Show { history, app } => {
            if !history.exists() {
                bail!("no history log at {}", history.display());
            }
            let log = HistoryLog::open(&history)?;
            let mut out = io::stdout().lock();
            for r in log.records() {
                if app.as_deref().is_none_or(|a| a == r.application) {
                    out.write_all(r.to_line().as_bytes())?;
                }
            }
            Ok(())
        }
    }
}

fn read_records(path: &Path) -> Result<Vec<HistoryRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            HistoryRecord::parse_line(l.trim())
                .map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 1))
        })
        .collect()
}

/// Sizes and loads spread over a plausible range; times grow with both.
fn synthetic_records(app: AppId, count: usize, seed: u64) -> Vec<HistoryRecord> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(1_000..2_000_000u64);
            let cpu = (rng.gen_range(0.0..90.0f64) * 100.0).round() / 100.0;
            let t = 1e-6 * size as f64 / (1.0 - cpu / 100.0) * rng.gen_range(0.9..1.1);
            HistoryRecord::new(app.name(), size, cpu, t).expect("generated record is valid")
        })
        .collect()
}

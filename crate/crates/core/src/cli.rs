//! Command-line front end.
//!
//! Parameters come from built-in defaults, then an optional flat
//! `key = value` config file, then flags. Keys and flags share names
//! (`M`, `K`, `P_R`, `sigma2`, ...).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::capacity::CapacityError;
use crate::channel::{sample_realization, FadingLaw, Purpose, RngStream, SystemConfig};
use crate::harness::{
    emit_csv, fit_all, fit_csv_path, rate_region, run_sweep, Axis, FitRow, HarnessError, Metric,
    SweepRow, SweepSpec,
};
use crate::strategies::{equal_power_allocation, simulate_slot, Direction, RatePair, Strategy, StrategyError};

#[derive(Debug, Error)]
pub enum CliError {
    /// Help or version text; not a failure.
    #[error("{0}")]
    Info(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io { .. } => CliError::Io(e.to_string()),
            HarnessError::Config(_)
            | HarnessError::EmptyAxis
            | HarnessError::NotAscending { .. }
            | HarnessError::BadAxisValue { .. }
            | HarnessError::ZeroTrials
            | HarnessError::Unknown { .. } => CliError::Usage(e.to_string()),
            HarnessError::Strategy(_) | HarnessError::TooFewPoints(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

const AFTER_HELP: &str = "Units: powers (P, P_R, sigma2) are linear, never dB; rates are in bits per channel use.\n\
Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 I/O error.";

#[derive(Debug, Parser)]
#[command(
    name = "relay-capacity",
    version,
    about = "Monte Carlo rates and cut-set bounds for the MIMO two-way relay channel",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Sweep the relay count K with coherent relays (default K = 32,128,512,2048).
    #[command(after_help = AFTER_HELP, allow_negative_numbers = true)]
    CoherentSweep(CommonArgs),
    /// Sweep P_R at K = 256 with non-coherent relays; P follows P_R unless given.
    #[command(after_help = AFTER_HELP, allow_negative_numbers = true)]
    NoncoherentSweep(CommonArgs),
    /// Sweep the transmit fraction alpha at K = 512 (default 0.1,0.2,...,0.9).
    #[command(after_help = AFTER_HELP, allow_negative_numbers = true)]
    AlphaSweep(CommonArgs),
    /// Print the achievable and outer rate regions at K = 64.
    #[command(after_help = AFTER_HELP, allow_negative_numbers = true)]
    RateRegion(CommonArgs),
    /// Simulate one slot at K = 4 and print every signal.
    #[command(after_help = AFTER_HELP, allow_negative_numbers = true)]
    SlotDump(SlotArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Flat `key = value` file; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Antennas per terminal [default: 2]
    #[arg(long = "M", value_name = "COUNT")]
    m: Option<String>,
    /// Antennas per relay [default: 2]
    #[arg(long = "N", value_name = "COUNT")]
    n: Option<String>,
    /// Relay count(s), comma separated [default depends on subcommand]
    #[arg(long = "K", value_name = "LIST")]
    k: Option<String>,
    /// Terminal power, linear [default: 10; noncoherent-sweep: equal to P_R]
    #[arg(long = "P", value_name = "LINEAR")]
    p: Option<String>,
    /// Sum relay power(s), linear, comma separated [default: 10; noncoherent-sweep: 100,1000,10000,100000]
    #[arg(long = "P_R", value_name = "LIST")]
    p_r: Option<String>,
    /// Noise variance, linear [default: 1]
    #[arg(long = "sigma2", value_name = "LINEAR")]
    sigma2: Option<String>,
    /// Transmit fraction(s) in [0, 1], comma separated [default: 0.5]
    #[arg(long = "alpha", value_name = "LIST")]
    alpha: Option<String>,
    /// Fading law, uniform:LO:HI or constant:C [default: uniform:0.5:1.5]
    #[arg(long = "fading", value_name = "LAW")]
    fading: Option<String>,
    /// Channel draws per point [default: 200]
    #[arg(long = "trials", value_name = "COUNT")]
    trials: Option<String>,
    /// Master seed [default: 42]
    #[arg(long = "seed", value_name = "U64")]
    seed: Option<String>,
    /// Metrics to report: ub_bc, ub_mac, ub_coherent, dcm, nc_ub, nc_af [default depends on subcommand]
    #[arg(long = "metrics", value_name = "LIST")]
    metrics: Option<String>,
    /// Output CSV path [default: <subcommand>.csv]; scaling fits go to <stem>.fit.csv
    #[arg(long = "out", value_name = "PATH")]
    out: Option<String>,
    /// Worker threads for trials, 0 = all cores [default: 0]
    #[arg(long = "threads", value_name = "COUNT")]
    threads: Option<String>,
}

#[derive(Debug, Args)]
struct SlotArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Relay rule: dcm or nc-af [default: dcm]
    #[arg(long = "strategy", value_name = "NAME")]
    strategy: Option<String>,
    /// Also print every channel matrix and fading gain.
    #[arg(long = "dump-realization")]
    dump_realization: bool,
}

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    CoherentSweep,
    NoncoherentSweep,
    AlphaSweep,
    RateRegion,
    SlotDump,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::CoherentSweep => "coherent-sweep",
            CommandKind::NoncoherentSweep => "noncoherent-sweep",
            CommandKind::AlphaSweep => "alpha-sweep",
            CommandKind::RateRegion => "rate-region",
            CommandKind::SlotDump => "slot-dump",
        }
    }

    fn default_relays(self) -> &'static str {
        match self {
            CommandKind::CoherentSweep => "32,128,512,2048",
            CommandKind::NoncoherentSweep => "256",
            CommandKind::AlphaSweep => "512",
            CommandKind::RateRegion => "64",
            CommandKind::SlotDump => "4",
        }
    }

    fn default_metrics(self) -> Vec<Metric> {
        match self {
            CommandKind::CoherentSweep => {
                vec![Metric::UbBroadcast, Metric::UbMac, Metric::UbCoherent, Metric::Dcm]
            }
            CommandKind::NoncoherentSweep => vec![Metric::NcUb, Metric::NcAf],
            CommandKind::AlphaSweep => vec![Metric::UbBroadcast, Metric::UbMac, Metric::UbCoherent],
            CommandKind::RateRegion => vec![Metric::UbCoherent, Metric::Dcm],
            CommandKind::SlotDump => Vec::new(),
        }
    }

    /// The parameter that may take several values.
    fn axis(self) -> Axis {
        match self {
            CommandKind::NoncoherentSweep => Axis::RelayPower,
            CommandKind::AlphaSweep => Axis::Alpha,
            _ => Axis::RelayCount,
        }
    }
}

/// A fully resolved command line.
#[derive(Debug, Clone, PartialEq)]
pub struct CliInvocation {
    pub command: CommandKind,
    pub config_path: Option<PathBuf>,
    /// Parameters at the first axis point.
    pub base: SystemConfig,
    pub axis: Axis,
    pub axis_values: Vec<f64>,
    /// Whether `P` tracks the swept `P_R`.
    pub couple_terminal_power: bool,
    pub trials: u64,
    pub seed: u64,
    pub metrics: Vec<Metric>,
    pub out: PathBuf,
    /// Whether `--out` was given explicitly.
    pub out_explicit: bool,
    pub threads: usize,
    pub strategy: Strategy,
    pub dump_realization: bool,
}

impl CliInvocation {
    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            base: self.base,
            axis: self.axis,
            axis_values: self.axis_values.clone(),
            trials: self.trials,
            seed: self.seed,
            metrics: self.metrics.clone(),
            couple_terminal_power: self.couple_terminal_power,
        }
    }
}

const KEYS: [&str; 13] = [
    "M", "N", "K", "P", "P_R", "sigma2", "alpha", "fading", "trials", "seed", "metrics", "out",
    "threads",
];

/// Reads a flat `key = value` file. `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected `key = value`, got {raw:?}",
                i + 1
            )));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn bad(key: &str, value: &str, why: &str) -> CliError {
    CliError::Usage(format!("invalid value for --{key}: {value:?} ({why})"))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let values = value
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(key, value, "expected a comma-separated list of numbers"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(values)
}

fn parse_count(key: &str, value: &str) -> Result<usize, CliError> {
    match value.trim().parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(bad(key, value, "expected a positive integer")),
    }
}

fn parse_positive(key: &str, value: &str) -> Result<f64, CliError> {
    match value.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(bad(key, value, "expected a positive linear value")),
    }
}

fn single(key: &str, value: &str, values: Vec<f64>) -> Result<f64, CliError> {
    match values.as_slice() {
        [v] => Ok(*v),
        _ => Err(bad(key, value, "this subcommand takes a single value here")),
    }
}

fn check_axis_values(key: &str, value: &str, axis: Axis, values: &[f64]) -> Result<(), CliError> {
    for &v in values {
        let ok = match axis {
            Axis::RelayCount => v >= 1.0 && v.fract() == 0.0,
            Axis::RelayPower => v > 0.0,
            Axis::Alpha => (0.0..=1.0).contains(&v),
        };
        if !ok {
            let why = match axis {
                Axis::RelayCount => "relay counts must be positive integers",
                Axis::RelayPower => "powers must be positive",
                Axis::Alpha => "alpha must lie in [0, 1]",
            };
            return Err(bad(key, value, why));
        }
    }
    if values.windows(2).any(|w| w[1].is_nan() || w[1] <= w[0]) {
        return Err(bad(key, value, "values must be strictly ascending"));
    }
    Ok(())
}

/// Parses `args` (program name first).
pub fn parse<I, T>(args: I) -> Result<CliInvocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp
            | ErrorKind::DisplayVersion
            | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    let (command, common, strategy, dump_realization) = match cli.command {
        CommandArgs::CoherentSweep(c) => (CommandKind::CoherentSweep, c, None, false),
        CommandArgs::NoncoherentSweep(c) => (CommandKind::NoncoherentSweep, c, None, false),
        CommandArgs::AlphaSweep(c) => (CommandKind::AlphaSweep, c, None, false),
        CommandArgs::RateRegion(c) => (CommandKind::RateRegion, c, None, false),
        CommandArgs::SlotDump(s) => (CommandKind::SlotDump, s.common, s.strategy, s.dump_realization),
    };
    resolve(command, common, strategy, dump_realization)
}

fn resolve(
    command: CommandKind,
    common: CommonArgs,
    strategy: Option<String>,
    dump_realization: bool,
) -> Result<CliInvocation, CliError> {
    let mut params = match &common.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let flags = [
        ("M", common.m),
        ("N", common.n),
        ("K", common.k),
        ("P", common.p),
        ("P_R", common.p_r),
        ("sigma2", common.sigma2),
        ("alpha", common.alpha),
        ("fading", common.fading),
        ("trials", common.trials),
        ("seed", common.seed),
        ("metrics", common.metrics),
        ("out", common.out),
        ("threads", common.threads),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            params.insert(key.to_string(), v);
        }
    }
    let get = |key: &str, default: &str| -> String {
        params.get(key).cloned().unwrap_or_else(|| default.to_string())
    };

    let axis = command.axis();
    let relay_power_default = if command == CommandKind::NoncoherentSweep {
        "100,1000,10000,100000"
    } else {
        "10"
    };
    let alpha_default = if command == CommandKind::AlphaSweep {
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
    } else {
        "0.5"
    };

    let k_text = get("K", command.default_relays());
    let pr_text = get("P_R", relay_power_default);
    let alpha_text = get("alpha", alpha_default);
    let k_list = parse_list("K", &k_text)?;
    let pr_list = parse_list("P_R", &pr_text)?;
    let alpha_list = parse_list("alpha", &alpha_text)?;
    check_axis_values("K", &k_text, Axis::RelayCount, &k_list)?;
    check_axis_values("P_R", &pr_text, Axis::RelayPower, &pr_list)?;
    check_axis_values("alpha", &alpha_text, Axis::Alpha, &alpha_list)?;

    let axis_values = match axis {
        Axis::RelayCount => k_list.clone(),
        Axis::RelayPower => pr_list.clone(),
        Axis::Alpha => alpha_list.clone(),
    };
    let relays = if axis == Axis::RelayCount { k_list[0] } else { single("K", &k_text, k_list)? };
    let relay_power = if axis == Axis::RelayPower { pr_list[0] } else { single("P_R", &pr_text, pr_list)? };
    let alpha = if axis == Axis::Alpha { alpha_list[0] } else { single("alpha", &alpha_text, alpha_list)? };
    if command == CommandKind::SlotDump && axis_values.len() != 1 {
        return Err(bad("K", &k_text, "slot-dump takes a single relay count"));
    }

    let couple_terminal_power = command == CommandKind::NoncoherentSweep && !params.contains_key("P");
    let terminal_power = match params.get("P") {
        Some(v) => parse_positive("P", v)?,
        None if couple_terminal_power => relay_power,
        None => 10.0,
    };
    let fading_text = get("fading", "uniform:0.5:1.5");
    let fading: FadingLaw = fading_text
        .parse()
        .map_err(|e| bad("fading", &fading_text, &format!("{e}")))?;

    let base = SystemConfig {
        terminal_antennas: parse_count("M", &get("M", "2"))?,
        relay_antennas: parse_count("N", &get("N", "2"))?,
        relays: relays as usize,
        terminal_power,
        relay_power,
        noise_variance: parse_positive("sigma2", &get("sigma2", "1"))?,
        alpha,
        fading,
    };
    base.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let trials = parse_count("trials", &get("trials", "200"))? as u64;
    let seed_text = get("seed", "42");
    let seed = seed_text
        .trim()
        .parse::<u64>()
        .map_err(|_| bad("seed", &seed_text, "expected an unsigned 64-bit integer"))?;
    let threads_text = get("threads", "0");
    let threads = threads_text
        .trim()
        .parse::<usize>()
        .map_err(|_| bad("threads", &threads_text, "expected a non-negative integer"))?;
    let metrics = match params.get("metrics") {
        Some(text) => text
            .split(',')
            .map(|m| m.parse::<Metric>().map_err(|_| bad("metrics", text, &format!("unknown metric {:?}", m.trim()))))
            .collect::<Result<Vec<_>, _>>()?,
        None => command.default_metrics(),
    };
    let out_explicit = params.contains_key("out");
    let out = PathBuf::from(get("out", &format!("{}.csv", command.name())));
    let strategy = match strategy.as_deref().map(str::trim) {
        None | Some("dcm") => Strategy::DualChannelMatching,
        Some("nc-af") => Strategy::NormalizeForward,
        Some(other) => return Err(bad("strategy", other, "expected dcm or nc-af")),
    };

    Ok(CliInvocation {
        command,
        config_path: common.config,
        base,
        axis,
        axis_values,
        couple_terminal_power,
        trials,
        seed,
        metrics,
        out,
        out_explicit,
        threads,
        strategy,
        dump_realization,
    })
}

/// Runs the invocation, writing the summary to `stdout`.
pub fn execute(inv: &CliInvocation, stdout: &mut dyn Write) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(inv.threads)
        .build()
        .map_err(|e| CliError::Numeric(format!("cannot start worker threads: {e}")))?;
    match inv.command {
        CommandKind::SlotDump => slot_dump(inv, stdout),
        CommandKind::RateRegion => region(inv, &pool, stdout),
        _ => sweep(inv, &pool, stdout),
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Io(format!("cannot write output: {e}"))
}

fn check_alpha(inv: &CliInvocation) -> Result<(), CliError> {
    if inv.command == CommandKind::NoncoherentSweep && (inv.base.alpha - 0.5).abs() > 1e-12 {
        return Err(CliError::Numeric(CapacityError::UnsupportedAlpha(inv.base.alpha).to_string()));
    }
    Ok(())
}

fn print_rows(rows: &[SweepRow], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{:>14} {:>12} {:>4} {:>12} {:>12}", "axis_value", "metric", "dir", "mean_bits", "stderr_bits")?;
    let mut last = None;
    for r in rows {
        if last.is_some() && last != Some(r.axis_value) {
            writeln!(out)?;
        }
        last = Some(r.axis_value);
        writeln!(
            out,
            "{:>14} {:>12} {:>4} {:>12.6} {:>12.6}",
            crate::harness::format_sig9(r.axis_value),
            r.metric.name(),
            r.direction.label(),
            r.mean_bits,
            r.stderr_bits
        )?;
    }
    Ok(())
}

fn sweep(inv: &CliInvocation, pool: &rayon::ThreadPool, out: &mut dyn Write) -> Result<(), CliError> {
    check_alpha(inv)?;
    let rows = pool.install(|| run_sweep(&inv.sweep_spec()))?;
    let fits: Option<Vec<FitRow>> = if inv.axis != Axis::Alpha && inv.axis_values.len() >= 2 {
        Some(fit_all(&rows)?)
    } else {
        None
    };
    emit_csv(&rows, fits.as_deref(), &inv.out)?;

    writeln!(out, "{} over {} ({} trials/point, seed {})", inv.command.name(), inv.axis, inv.trials, inv.seed)
        .map_err(io_err)?;
    print_rows(&rows, out).map_err(io_err)?;
    if let Some(fits) = &fits {
        writeln!(out, "\nscaling fits against log2({}):", inv.axis).map_err(io_err)?;
        for f in fits {
            writeln!(
                out,
                "  {:>12} {:>3}: slope {:.4} bits/doubling, intercept {:.4} bits, r^2 {:.5}",
                f.metric.name(),
                f.direction.label(),
                f.fit.slope_bits_per_doubling,
                f.fit.intercept_bits,
                f.fit.r_squared
            )
            .map_err(io_err)?;
        }
    }
    if inv.axis == Axis::Alpha {
        writeln!(out, "\nbest alpha per series:").map_err(io_err)?;
        let mut keys: Vec<(Metric, Direction)> = rows.iter().map(|r| (r.metric, r.direction)).collect();
        keys.sort();
        keys.dedup();
        for (metric, dir) in keys {
            let best = rows
                .iter()
                .filter(|r| r.metric == metric && r.direction == dir)
                .max_by(|a, b| a.mean_bits.total_cmp(&b.mean_bits))
                .expect("series is non-empty");
            writeln!(
                out,
                "  {:>12} {:>3}: alpha {} with {:.4} bits",
                metric.name(),
                dir.label(),
                crate::harness::format_sig9(best.axis_value),
                best.mean_bits
            )
            .map_err(io_err)?;
        }
    }
    writeln!(out, "\nwrote {}", inv.out.display()).map_err(io_err)?;
    if fits.is_some() {
        writeln!(out, "wrote {}", fit_csv_path(&inv.out).display()).map_err(io_err)?;
    }
    Ok(())
}

fn region(inv: &CliInvocation, pool: &rayon::ThreadPool, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = pool.install(|| run_sweep(&inv.sweep_spec()))?;
    emit_csv(&rows, None, &inv.out)?;
    writeln!(out, "rate regions ({} trials/point, seed {})", inv.trials, inv.seed).map_err(io_err)?;
    print_rows(&rows, out).map_err(io_err)?;
    for &k in &inv.axis_values {
        for &metric in &crate::harness::canonical_metrics(&inv.metrics) {
            let mean = |dir: Direction| {
                rows.iter()
                    .find(|r| r.axis_value == k && r.metric == metric && r.direction == dir)
                    .map(|r| r.mean_bits)
                    .unwrap_or(0.0)
            };
            let region = rate_region(RatePair::new(mean(Direction::T1ToT2), mean(Direction::T2ToT1)));
            let vertices: Vec<String> = region
                .vertices
                .iter()
                .map(|(a, b)| format!("({a:.4}, {b:.4})"))
                .collect();
            writeln!(out, "\nK={} {} region, {} vertices (r12, r21) bits:", k, metric.name(), vertices.len())
                .map_err(io_err)?;
            writeln!(out, "  {}", vertices.join(" ")).map_err(io_err)?;
        }
    }
    writeln!(out, "\nwrote {}", inv.out.display()).map_err(io_err)?;
    Ok(())
}

fn slot_dump(inv: &CliInvocation, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = inv.base;
    let real = sample_realization(&cfg, RngStream::new(inv.seed, 0, Purpose::Channel));
    let alloc = equal_power_allocation(&cfg);
    let transcript = simulate_slot(
        &real,
        &cfg,
        &alloc,
        inv.strategy,
        RngStream::new(inv.seed, 0, Purpose::Signals),
    )?;
    let mut text = String::new();
    if inv.dump_realization {
        text.push_str("[realization]\n");
        text.push_str(&real.dump());
    }
    text.push_str(&transcript.dump());
    if inv.out_explicit {
        fs::write(&inv.out, &text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", inv.out.display())))?;
        writeln!(
            out,
            "slot-dump: K={} strategy {:?}, max residual {:.3e}; wrote {}",
            cfg.relays,
            inv.strategy,
            transcript.max_residual(),
            inv.out.display()
        )
        .map_err(io_err)?;
    } else {
        out.write_all(text.as_bytes()).map_err(io_err)?;
    }
    Ok(())
}

/// Parses and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let inv = match parse(args) {
        Ok(inv) => inv,
        Err(CliError::Info(text)) => {
            print!("{text}");
            return 0;
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().trim_start_matches("error: "));
            return e.exit_code();
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(&inv, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

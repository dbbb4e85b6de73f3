//! Command-line harness around the `shufflecode` library: Monte Carlo
//! campaign sweeps (`simulate`), closed-form sweeps (`analyze`), and the
//! small-scale random-coding oracle (`oracle`), all emitting CSV with a
//! `#`-commented provenance header.
//!
//! Every flag can also come from a TOML file (`--config`); explicit flags
//! win over file values, which win over defaults. Same build + same
//! resolved options + same seed produce byte-identical data rows for any
//! worker count; only the timestamp header line varies.
//!
//! Exit codes: 0 success, 1 configuration error, 2 enumeration or retry
//! budget exceeded.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use shufflecode::analysis::{
    f_value, fer_approx, measure_polar_ber, oracle_misdetect, pd_bound, symbol_error_rate,
    BoundParams,
};
use shufflecode::coset::MetricKind;
use shufflecode::pipeline::{
    run_campaign, BookPolicy, ChannelMode, Indexing, IndexPlacement, SystemParams,
};
use shufflecode::polar::CombiningRule;
use shufflecode::Error;

const WORKERS_ENV: &str = "SHUFFLECODE_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "shufflecode",
    version,
    about = "Concatenated coding over noisy shuffling channels: simulation and analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo campaigns over a parameter matrix.
    Simulate(SimulateOpts),
    /// Closed-form mis-detection and frame-error-rate sweep.
    Analyze(AnalyzeOpts),
    /// Exhaustive minimum-distance random-coding experiment vs its bound.
    Oracle(OracleOpts),
}

/// Options shared by every subcommand. All optional so that file values
/// and defaults can fill the gaps.
#[derive(Args, Deserialize, Serialize, Debug, Default, Clone)]
#[serde(default)]
struct CommonOpts {
    /// TOML file whose keys mirror the long flags of this subcommand.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Crossover probability grid: comma list "0.03,0.05" or inclusive
    /// range "start:step:end".
    #[arg(long)]
    delta: Option<String>,
    /// Campaign seed; all randomness derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 means all cores. Falls back to the
    /// SHUFFLECODE_WORKERS environment variable.
    #[arg(long)]
    workers: Option<usize>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Deserialize, Serialize, Debug, Default, Clone)]
#[serde(default)]
struct SimulateOpts {
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonOpts,
    /// Outer message lengths in symbols, comma list (e.g. "225,235").
    #[arg(long = "ko")]
    #[serde(alias = "ko")]
    k_o: Option<String>,
    /// Indexing schemes, comma list of coset|explicit.
    #[arg(long)]
    indexing: Option<String>,
    /// Channel model: shuffling|sampling.
    #[arg(long)]
    channel: Option<String>,
    /// Samples per frame in sampling mode, comma list (e.g. "120,150").
    #[arg(long = "N")]
    #[serde(alias = "N")]
    n_samples: Option<String>,
    /// Segment count.
    #[arg(long = "M")]
    #[serde(alias = "M")]
    m: Option<usize>,
    /// Inner block length in bits.
    #[arg(long = "ni")]
    #[serde(alias = "ni")]
    n_i: Option<usize>,
    /// Outer block length in symbols; must equal 2^q - 1.
    #[arg(long = "no")]
    #[serde(alias = "no")]
    n_o: Option<usize>,
    /// Bits per outer symbol.
    #[arg(long)]
    q: Option<u32>,
    /// Frames per grid point.
    #[arg(long)]
    trials: Option<u64>,
    /// Coset book policy: fixed|per-frame.
    #[arg(long = "coset-policy")]
    #[serde(alias = "coset-policy")]
    coset_policy: Option<String>,
    /// Detection metric: signed-llr-sum|magnitude-sum|sign-agreements.
    #[arg(long)]
    metric: Option<String>,
    /// Check-node rule: exact|min-sum.
    #[arg(long)]
    combining: Option<String>,
    /// Explicit-indexing bit placement: most-reliable|least-reliable.
    #[arg(long = "index-placement")]
    #[serde(alias = "index-placement")]
    index_placement: Option<String>,
    /// Corrupt stored segments once before sampling instead of per read.
    #[arg(long = "noise-before-sampling", num_args = 0..=1, default_missing_value = "true")]
    #[serde(alias = "noise-before-sampling")]
    noise_before_sampling: Option<bool>,
    /// Interleave outer codeword bits across segments.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    interleave: Option<bool>,
}

#[derive(Args, Deserialize, Serialize, Debug, Default, Clone)]
#[serde(default)]
struct AnalyzeOpts {
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonOpts,
    /// Inner block length in bits.
    #[arg(long = "ni")]
    #[serde(alias = "ni")]
    n_i: Option<usize>,
    /// Inner code rate (payload bits / block length).
    #[arg(long)]
    rate: Option<f64>,
    /// Segment count.
    #[arg(long = "M")]
    #[serde(alias = "M")]
    m: Option<usize>,
    /// Bits per outer symbol.
    #[arg(long)]
    q: Option<u32>,
    /// Outer block length in symbols (default 2^q - 1).
    #[arg(long = "no")]
    #[serde(alias = "no")]
    n_o: Option<usize>,
    /// Outer message length in symbols.
    #[arg(long = "ko")]
    #[serde(alias = "ko")]
    k_o: Option<usize>,
    /// Measure the inner residual BER by Monte Carlo with this many
    /// frames per grid point.
    #[arg(long = "measure-pb")]
    #[serde(alias = "measure-pb")]
    measure_pb: Option<u64>,
    /// CSV file of "delta,p_b" rows supplying the inner residual BER.
    #[arg(long = "pb-table")]
    #[serde(alias = "pb-table")]
    pb_table: Option<PathBuf>,
    /// SC check-node arithmetic for --measure-pb: exact | min-sum.
    #[arg(long)]
    combining: Option<String>,
}

#[derive(Args, Deserialize, Serialize, Debug, Default, Clone)]
#[serde(default)]
struct OracleOpts {
    #[command(flatten)]
    #[serde(flatten)]
    common: CommonOpts,
    /// Code length in bits (at most 14).
    #[arg(long)]
    n: Option<usize>,
    /// Code rate; n * rate must be an integer.
    #[arg(long)]
    rate: Option<f64>,
    /// Code count.
    #[arg(long = "M")]
    #[serde(alias = "M")]
    m: Option<usize>,
    /// Ensembles drawn per grid point.
    #[arg(long)]
    trials: Option<u64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes; everything else is
            // a configuration error (exit 1, not clap's default 2, which
            // this tool reserves for budget overruns).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(opts) => cmd_simulate(opts),
        Command::Analyze(opts) => cmd_analyze(opts),
        Command::Oracle(opts) => cmd_oracle(opts),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(match e {
            Error::Config(_) => 1,
            Error::Budget(_) => 2,
        });
    }
}

/// Loads `--config` TOML (if any) and overlays explicit flags on top.
fn resolve<T: for<'de> Deserialize<'de> + Merge>(opts: T, config: &Option<PathBuf>) -> Result<T, Error> {
    match config {
        None => Ok(opts),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let file: T = toml::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Ok(opts.merge(file))
        }
    }
}

/// Fills every unset field of `self` from `fallback`.
trait Merge {
    fn merge(self, fallback: Self) -> Self;
}

macro_rules! merge_fields {
    ($self:ident, $fb:ident, $($field:ident),+) => {{
        let mut merged = $self;
        $(merged.$field = merged.$field.or($fb.$field);)+
        merged
    }};
}

impl Merge for CommonOpts {
    fn merge(self, fb: Self) -> Self {
        let config = self.config.clone();
        let mut merged = merge_fields!(self, fb, delta, seed, workers, out);
        merged.config = config;
        merged
    }
}

impl Merge for SimulateOpts {
    fn merge(mut self, fb: Self) -> Self {
        self.common = self.common.merge(fb.common);
        merge_fields!(
            self, fb, k_o, indexing, channel, n_samples, m, n_i, n_o, q, trials, coset_policy,
            metric, combining, index_placement, noise_before_sampling, interleave
        )
    }
}

impl Merge for AnalyzeOpts {
    fn merge(mut self, fb: Self) -> Self {
        self.common = self.common.merge(fb.common);
        merge_fields!(self, fb, n_i, rate, m, q, n_o, k_o, measure_pb, pb_table, combining)
    }
}

impl Merge for OracleOpts {
    fn merge(mut self, fb: Self) -> Self {
        self.common = self.common.merge(fb.common);
        merge_fields!(self, fb, n, rate, m, trials)
    }
}

/// Parses "0.03,0.05,0.07" or an inclusive "start:step:end" range.
fn parse_delta_spec(spec: &str) -> Result<Vec<f64>, Error> {
    let parse = |s: &str| -> Result<f64, Error> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad crossover probability '{s}'")))
    };
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("range '{spec}' is not start:step:end")));
        }
        let (start, step, end) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step <= 0.0 || end < start {
            return Err(Error::Config(format!("range '{spec}' must ascend with positive step")));
        }
        let mut v = Vec::new();
        let mut i = 0u32;
        loop {
            let d = start + f64::from(i) * step;
            if d > end + step * 1e-9 {
                break;
            }
            v.push(d);
            i += 1;
        }
        v
    } else {
        spec.split(',').map(parse).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(Error::Config("empty crossover probability grid".into()));
    }
    for &d in &values {
        if !(0.0..0.5).contains(&d) {
            return Err(Error::Config(format!("crossover probability {d} outside [0, 0.5)")));
        }
    }
    Ok(values)
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>, Error> {
    let v: Result<Vec<T>, _> = spec.split(',').map(|s| s.trim().parse::<T>()).collect();
    v.map_err(|_| Error::Config(format!("bad {what} list '{spec}'")))
        .and_then(|v| {
            if v.is_empty() {
                Err(Error::Config(format!("empty {what} list")))
            } else {
                Ok(v)
            }
        })
}

fn parse_indexing(s: &str) -> Result<Indexing, Error> {
    match s.trim() {
        "coset" => Ok(Indexing::Coset),
        "explicit" => Ok(Indexing::Explicit),
        other => Err(Error::Config(format!("indexing '{other}' is not coset|explicit"))),
    }
}

fn parse_channel(s: &str) -> Result<ChannelMode, Error> {
    match s.trim() {
        "shuffling" => Ok(ChannelMode::Shuffling),
        "sampling" => Ok(ChannelMode::Sampling),
        other => Err(Error::Config(format!("channel '{other}' is not shuffling|sampling"))),
    }
}

fn parse_policy(s: &str) -> Result<BookPolicy, Error> {
    match s.trim() {
        "fixed" => Ok(BookPolicy::Fixed),
        "per-frame" | "per_frame" => Ok(BookPolicy::PerFrame),
        other => Err(Error::Config(format!("coset policy '{other}' is not fixed|per-frame"))),
    }
}

fn parse_metric(s: &str) -> Result<MetricKind, Error> {
    match s.trim() {
        "signed-llr-sum" | "signed_llr_sum" => Ok(MetricKind::SignedLlrSum),
        "magnitude-sum" | "magnitude_sum" => Ok(MetricKind::MagnitudeSum),
        "sign-agreements" | "sign_agreements" => Ok(MetricKind::SignAgreements),
        other => Err(Error::Config(format!(
            "metric '{other}' is not signed-llr-sum|magnitude-sum|sign-agreements"
        ))),
    }
}

fn parse_combining(s: &str) -> Result<CombiningRule, Error> {
    match s.trim() {
        "exact" => Ok(CombiningRule::Exact),
        "min-sum" | "min_sum" => Ok(CombiningRule::MinSum),
        other => Err(Error::Config(format!("combining '{other}' is not exact|min-sum"))),
    }
}

fn parse_placement(s: &str) -> Result<IndexPlacement, Error> {
    match s.trim() {
        "most-reliable" | "most_reliable" => Ok(IndexPlacement::MostReliable),
        "least-reliable" | "least_reliable" => Ok(IndexPlacement::LeastReliable),
        other => Err(Error::Config(format!(
            "index placement '{other}' is not most-reliable|least-reliable"
        ))),
    }
}

fn resolve_workers(flag: Option<usize>) -> Result<usize, Error> {
    if let Some(w) = flag {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}='{v}' is not a worker count"))),
        Err(_) => Ok(0),
    }
}

/// Line-buffered sink for CSV: a file when `--out` is given, else stdout.
fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    match out {
        None => Ok(Box::new(std::io::stdout())),
        Some(path) => {
            let f = fs::File::create(path)
                .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
    }
}

fn emit(w: &mut dyn Write, line: &str) -> Result<(), Error> {
    writeln!(w, "{line}").map_err(|e| Error::Config(format!("write failed: {e}")))
}

/// `#`-commented provenance block: build, resolved options, seed, and a
/// timestamp (the one line outside the byte-determinism contract).
fn emit_provenance(
    w: &mut dyn Write,
    subcommand: &str,
    resolved: &impl Serialize,
    seed: u64,
) -> Result<(), Error> {
    let echo = serde_json::to_string(resolved)
        .map_err(|e| Error::Config(format!("config echo: {e}")))?;
    emit(w, &format!("# {} {} {subcommand}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")))?;
    emit(w, &format!("# config: {echo}"))?;
    emit(w, &format!("# seed: {seed}"))?;
    emit(w, &format!("# generated: {}", chrono::Utc::now().to_rfc3339()))
}

fn cmd_simulate(opts: SimulateOpts) -> Result<(), Error> {
    let config = opts.common.config.clone();
    let opts = resolve(opts, &config)?;
    let deltas = parse_delta_spec(opts.common.delta.as_deref().unwrap_or("0.05"))?;
    let k_o_list: Vec<usize> = parse_list(opts.k_o.as_deref().unwrap_or("225"), "ko")?;
    let indexing_list: Vec<Indexing> = opts
        .indexing
        .as_deref()
        .unwrap_or("coset")
        .split(',')
        .map(parse_indexing)
        .collect::<Result<_, _>>()?;
    let channel = parse_channel(opts.channel.as_deref().unwrap_or("shuffling"))?;
    let n_list: Vec<usize> = parse_list(opts.n_samples.as_deref().unwrap_or("120"), "N")?;
    let m = opts.m.unwrap_or(32);
    let n_i = opts.n_i.unwrap_or(128);
    let q = opts.q.unwrap_or(8);
    if let Some(n_o) = opts.n_o {
        if n_o != (1usize << q) - 1 {
            return Err(Error::Config(format!(
                "outer length {n_o} must equal 2^q - 1 = {}",
                (1usize << q) - 1
            )));
        }
    }
    let trials = opts.trials.unwrap_or(1000);
    let seed = opts.common.seed.unwrap_or(0);
    let workers = resolve_workers(opts.common.workers)?;
    let book_policy = parse_policy(opts.coset_policy.as_deref().unwrap_or("fixed"))?;
    let metric = parse_metric(opts.metric.as_deref().unwrap_or("signed-llr-sum"))?;
    let combining = parse_combining(opts.combining.as_deref().unwrap_or("exact"))?;
    let index_placement = parse_placement(opts.index_placement.as_deref().unwrap_or("most-reliable"))?;
    let noise_before_sampling = opts.noise_before_sampling.unwrap_or(false);
    let interleave = opts.interleave.unwrap_or(false);

    // In sampling mode the N grid is real; in shuffling mode every frame
    // delivers exactly M segments, so the N axis collapses to one point.
    let n_axis: Vec<usize> = match channel {
        ChannelMode::Sampling => n_list,
        ChannelMode::Shuffling => vec![m],
    };

    let mut out = open_output(&opts.common.out)?;
    emit_provenance(&mut out, "simulate", &opts, seed)?;
    emit(
        &mut out,
        "delta,indexing,channel_mode,N,k_o,fer,fer_ci_lo,fer_ci_hi,ber,misdetect_rate,trials,seed",
    )?;
    let total = k_o_list.len() * indexing_list.len() * n_axis.len() * deltas.len();
    let mut done = 0usize;
    let started = Instant::now();
    for &k_o in &k_o_list {
        for &indexing in &indexing_list {
            for &n_samples in &n_axis {
                for &delta in &deltas {
                    let params = SystemParams {
                        q,
                        k_o,
                        m,
                        n_i,
                        indexing,
                        channel,
                        n_samples,
                        delta,
                        seed,
                        book_policy,
                        metric,
                        combining,
                        index_placement,
                        noise_before_sampling,
                        interleave,
                    };
                    if let Some(w) = params.coverage_warning() {
                        eprintln!("warning: {w}");
                    }
                    let stats = run_campaign(&params, trials, workers)?;
                    let (lo, hi) = stats.fer_ci();
                    emit(
                        &mut out,
                        &format!(
                            "{delta},{},{},{n_samples},{k_o},{},{lo},{hi},{},{},{trials},{seed}",
                            name_of(indexing),
                            channel_name(channel),
                            stats.fer(),
                            stats.ber(),
                            stats.misdetect_rate()
                        ),
                    )?;
                    done += 1;
                    eprintln!(
                        "[{done}/{total}] ko={k_o} {} N={n_samples} delta={delta}: \
                         fer={:.3e} ({:.1}s)",
                        name_of(indexing),
                        stats.fer(),
                        started.elapsed().as_secs_f64()
                    );
                }
            }
        }
    }
    Ok(())
}

fn cmd_analyze(opts: AnalyzeOpts) -> Result<(), Error> {
    let config = opts.common.config.clone();
    let opts = resolve(opts, &config)?;
    let deltas = parse_delta_spec(opts.common.delta.as_deref().unwrap_or("0.01:0.005:0.07"))?;
    let n_i = opts.n_i.unwrap_or(128);
    let rate = opts.rate.unwrap_or(0.5);
    let m = opts.m.unwrap_or(32);
    let q = opts.q.unwrap_or(8);
    let n_o = opts.n_o.unwrap_or((1usize << q) - 1);
    let k_o = opts.k_o.unwrap_or(225);
    let seed = opts.common.seed.unwrap_or(0);
    let workers = resolve_workers(opts.common.workers)?;
    let payload = (n_i as f64 * rate).round() as usize;
    let combining = parse_combining(opts.combining.as_deref().unwrap_or("exact"))?;

    enum PbSource {
        Measure(u64),
        Table(Vec<(f64, f64)>),
    }
    let source = match (opts.measure_pb, &opts.pb_table) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("--measure-pb and --pb-table are mutually exclusive".into()))
        }
        (Some(frames), None) => {
            if frames == 0 {
                return Err(Error::Config("--measure-pb needs at least 1 frame".into()));
            }
            PbSource::Measure(frames)
        }
        (None, Some(path)) => PbSource::Table(load_pb_table(path)?),
        (None, None) => {
            return Err(Error::Config(
                "no residual-BER source: pass --measure-pb <frames> or --pb-table <file>".into(),
            ))
        }
    };

    let mut out = open_output(&opts.common.out)?;
    emit_provenance(&mut out, "analyze", &opts, seed)?;
    emit(&mut out, "delta,f,one_minus_f,pd_raw,pd_clamped,p_b,p_s,fer_approx")?;
    let started = Instant::now();
    for (i, &delta) in deltas.iter().enumerate() {
        let p_b = match &source {
            PbSource::Measure(frames) => {
                measure_polar_ber(n_i, payload, delta, combining, *frames, seed, workers)?
            }
            PbSource::Table(table) => lookup_pb(table, delta)?,
        };
        let params = BoundParams { n: n_i, rate, delta, m, n_o, k_o, q, p_b };
        let f = f_value(n_i, rate, delta, m)?;
        let (pd_raw, pd_clamped) = pd_bound(&params)?;
        let p_s = symbol_error_rate(p_b, q);
        let fer = fer_approx(&params)?;
        emit(
            &mut out,
            &format!("{delta},{f},{},{pd_raw},{pd_clamped},{p_b},{p_s},{fer}", 1.0 - f),
        )?;
        eprintln!(
            "[{}/{}] delta={delta}: fer_approx={fer:.3e} ({:.1}s)",
            i + 1,
            deltas.len(),
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}

fn cmd_oracle(opts: OracleOpts) -> Result<(), Error> {
    let config = opts.common.config.clone();
    let opts = resolve(opts, &config)?;
    let deltas = parse_delta_spec(opts.common.delta.as_deref().unwrap_or("0.01,0.03,0.05"))?;
    let n = opts.n.unwrap_or(10);
    let rate = opts.rate.unwrap_or(0.3);
    let m = opts.m.unwrap_or(4);
    let trials = opts.trials.unwrap_or(100_000);
    let seed = opts.common.seed.unwrap_or(0);
    let workers = resolve_workers(opts.common.workers)?;

    let mut out = open_output(&opts.common.out)?;
    emit_provenance(&mut out, "oracle", &opts, seed)?;
    emit(
        &mut out,
        "delta,empirical,empirical_ci_lo,empirical_ci_hi,bound,bound_minus_empirical,\
         frame_empirical,pd_clamped,trials,seed",
    )?;
    let started = Instant::now();
    for (i, &delta) in deltas.iter().enumerate() {
        let est = oracle_misdetect(n, rate, m, delta, trials, seed, workers)?;
        let f = f_value(n, rate, delta, m)?;
        let bound = 1.0 - f;
        let (lo, hi) = est.codeword_ci();
        let pd_clamped = (m as f64 * bound).min(1.0);
        emit(
            &mut out,
            &format!(
                "{delta},{},{lo},{hi},{bound},{},{},{pd_clamped},{trials},{seed}",
                est.codeword_rate(),
                bound - est.codeword_rate(),
                est.frame_rate()
            ),
        )?;
        eprintln!(
            "[{}/{}] delta={delta}: empirical={:.3e} bound={bound:.3e} ({:.1}s)",
            i + 1,
            deltas.len(),
            est.codeword_rate(),
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}

fn name_of(indexing: Indexing) -> &'static str {
    match indexing {
        Indexing::Coset => "coset",
        Indexing::Explicit => "explicit",
    }
}

fn channel_name(channel: ChannelMode) -> &'static str {
    match channel {
        ChannelMode::Shuffling => "shuffling",
        ChannelMode::Sampling => "sampling",
    }
}

/// Reads a "delta,p_b" CSV (comments and a header line tolerated).
fn load_pb_table(path: &PathBuf) -> Result<Vec<(f64, f64)>, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut table = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',');
        let (a, b) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
        match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(delta), Ok(p_b)) => table.push((delta, p_b)),
            _ if table.is_empty() => continue, // header line
            _ => {
                return Err(Error::Config(format!(
                    "{}: bad row '{line}' (want delta,p_b)",
                    path.display()
                )))
            }
        }
    }
    if table.is_empty() {
        return Err(Error::Config(format!("{}: no delta,p_b rows", path.display())));
    }
    Ok(table)
}

/// Exact-match lookup; the table must cover every grid point (no
/// interpolation, so a mismatched grid fails loudly instead of silently
/// smoothing).
fn lookup_pb(table: &[(f64, f64)], delta: f64) -> Result<f64, Error> {
    table
        .iter()
        .find(|(d, _)| (d - delta).abs() < 1e-12)
        .map(|&(_, p)| p)
        .ok_or_else(|| Error::Config(format!("p_b table has no entry for delta = {delta}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_spec_list_and_range() {
        assert_eq!(parse_delta_spec("0.03,0.05").unwrap(), vec![0.03, 0.05]);
        let range = parse_delta_spec("0.03:0.01:0.07").unwrap();
        assert_eq!(range.len(), 5);
        assert!((range[4] - 0.07).abs() < 1e-12);
        assert!(parse_delta_spec("0.6").is_err());
        assert!(parse_delta_spec("0.07:0.01:0.03").is_err());
        assert!(parse_delta_spec("a,b").is_err());
    }

    #[test]
    fn enum_parsers_accept_both_separators() {
        assert_eq!(parse_policy("per-frame").unwrap(), BookPolicy::PerFrame);
        assert_eq!(parse_policy("per_frame").unwrap(), BookPolicy::PerFrame);
        assert_eq!(parse_metric("magnitude-sum").unwrap(), MetricKind::MagnitudeSum);
        assert!(parse_indexing("implicit").is_err());
    }

    #[test]
    fn toml_overlay_fills_only_missing_fields() {
        let flags = SimulateOpts {
            k_o: Some("235".into()),
            ..Default::default()
        };
        let file: SimulateOpts = toml::from_str(
            r#"
            ko = "225"
            trials = 42
            delta = "0.04"
            "#,
        )
        .unwrap();
        let merged = flags.merge(file);
        assert_eq!(merged.k_o.as_deref(), Some("235"), "flag wins");
        assert_eq!(merged.trials, Some(42), "file fills the gap");
        assert_eq!(merged.common.delta.as_deref(), Some("0.04"));
    }
}

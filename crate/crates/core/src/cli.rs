//! Command-line front end.
//!
//! Every subcommand builds a [`RunConfig`] (defaults, then `--config FILE`,
//! then flags), runs to completion and only then writes its outputs.
//! Output paths default to `$DLCSTC_OUT_DIR/<name>` or the working
//! directory.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::codegen::{rank_audit_padding, sfr_agreement};
use crate::config::{Scheme, SchemeConfig};
use crate::error::{Error, Result};
use crate::harness::{estimate_diversity_order, run_fig2, sweep, sweep_diagonal, BerPoint, StopRule};
use crate::relaysim::Estimator;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DLCSTC_OUT_DIR";

pub const CSV_HEADER: &str = "scheme,snr_r_db,snr_d_db,frames,bit_errors,ber,seed";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ber,
    Fig2,
    Diversity,
    Sfr,
    RankAudit,
}

/// Everything a run needs. Missing JSON fields take the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub scheme: Scheme,
    /// Frame parameters; `None` keeps the scheme default.
    pub n: Option<usize>,
    pub p: Option<usize>,
    pub phi: Option<usize>,
    pub b: Option<usize>,
    pub tau_max: Option<usize>,
    pub snr_r: Vec<f64>,
    pub snr_d: Vec<f64>,
    pub stop: StopRule,
    pub seed: u64,
    pub estimator: Estimator,
    /// Fig. 2 trials, SFR draws or rank-audit trials.
    pub trials: u64,
    /// Brute-force shift range for `sfr`; defaults to `2 xi`.
    pub max_shift: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            scheme: Scheme::FdCrosstalk,
            n: None,
            p: None,
            phi: None,
            b: None,
            tau_max: None,
            snr_r: vec![30.0],
            snr_d: (0..=15).map(|i| 2.0 * i as f64).collect(),
            stop: StopRule::default(),
            seed: 1,
            estimator: Estimator::Zf,
            trials: 10_000,
            max_shift: None,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn scheme_config(&self) -> SchemeConfig {
        let mut c = SchemeConfig::new(self.scheme);
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.p {
            c.p = v;
        }
        if let Some(v) = self.phi {
            c.phi = v;
        }
        if let Some(v) = self.b {
            c.b = v;
        }
        if let Some(v) = self.tau_max {
            c.delays.tau_max = v;
        }
        c
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig serializes")
    }
}

/// Parses `start:step:stop` (stop included when it lies on the grid), a
/// comma list, or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad number '{t}' in grid '{s}'")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("grid"))
        }
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect(),
        3 => {
            let (start, step, stop) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if step <= 0.0 || stop < start {
                return Err(Error::Invalid(format!("grid '{s}' needs step > 0 and stop >= start")));
            }
            // Small slack so 0:0.1:1 keeps its last point.
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        _ => Err(Error::Invalid(format!("grid '{s}' is not start:step:stop"))),
    }
}

/// A parsed SNR grid; wrapped so clap treats it as one value.
#[derive(Clone, Debug, Default)]
struct Grid(Vec<f64>);

fn grid_arg(s: &str) -> std::result::Result<Grid, String> {
    parse_grid(s).map(Grid).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "dlcstc", version, about = "Two-relay full-duplex DLC-STC simulator")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// SNR sweep, one CSV row per grid cell.
    Ber(Common),
    /// Naive-cancellation transmit SNR per time index.
    Fig2(Common),
    /// Diagonal sweep with a fitted diversity slope.
    Diversity(Common),
    /// Analytic vs brute-force shift-full-rank agreement.
    Sfr(Common),
    /// Rank audit of the truncated cross-talk code at padding `p`.
    RankAudit(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    phi: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    tau_max: Option<usize>,
    #[arg(long, value_parser = grid_arg)]
    snr_r: Option<Grid>,
    #[arg(long, value_parser = grid_arg)]
    snr_d: Option<Grid>,
    /// Diagonal grid for `diversity` (sets both SNRs).
    #[arg(long, value_parser = grid_arg)]
    gamma: Option<Grid>,
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    max_frames: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    estimator: Option<Estimator>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    max_shift: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(self, command: Command) -> Result<RunConfig> {
        let mut rc = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => {
                let mut rc = RunConfig::default();
                if command == Command::Diversity {
                    rc.snr_r = vec![18.0, 24.0, 30.0];
                    rc.snr_d = rc.snr_r.clone();
                }
                if command == Command::Sfr {
                    rc.trials = 1000;
                }
                rc
            }
        };
        rc.command = Some(command);
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { rc.$f = v; } )* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if self.$f.is_some() { rc.$f = self.$f; } )* };
        }
        set!(scheme, seed, estimator, trials);
        set_opt!(n, p, phi, b, tau_max, max_shift, out);
        if let Some(g) = self.snr_r {
            rc.snr_r = g.0;
        }
        if let Some(g) = self.snr_d {
            rc.snr_d = g.0;
        }
        if let Some(g) = self.gamma {
            rc.snr_r = g.0.clone();
            rc.snr_d = g.0;
        }
        if let Some(v) = self.min_errors {
            rc.stop.min_errors = v;
        }
        if let Some(v) = self.max_frames {
            rc.stop.max_frames = v;
        }
        Ok(rc)
    }
}

fn out_path(rc: &RunConfig, default_name: &str) -> PathBuf {
    if let Some(p) = &rc.out {
        return p.clone();
    }
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    dir.join(default_name)
}

pub fn points_to_csv(points: &[BerPoint]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.scheme, p.snr_r_db, p.snr_d_db, p.frames, p.bit_errors, p.ber, p.seed
        );
    }
    s
}

fn fig2_to_csv(trace: &[f64]) -> String {
    let mut s = String::from("index,snr_db\n");
    for (i, v) in trace.iter().enumerate() {
        let _ = writeln!(s, "{},{v}", i + 1);
    }
    s
}

#[derive(Serialize)]
struct DiversitySummary<'a> {
    scheme: Scheme,
    gammas_db: Vec<f64>,
    slope: f64,
    seed: u64,
    points: &'a [BerPoint],
}

/// Files a command produces, written together after it succeeds.
pub type Outputs = Vec<(PathBuf, String)>;

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Runs one resolved configuration and returns the files to write.
pub fn execute(rc: &RunConfig) -> Result<Outputs> {
    let cfg = rc.scheme_config();
    let mut out: Outputs = Vec::new();
    match rc.command.ok_or_else(|| Error::Invalid("no command given".into()))? {
        Command::Ber => {
            let pts = sweep(&cfg, &rc.snr_r, &rc.snr_d, &rc.stop, rc.seed)?;
            out.push((out_path(rc, &format!("ber_{}.csv", rc.scheme)), points_to_csv(&pts)));
        }
        Command::Fig2 => {
            let trace = run_fig2(rc.estimator, rc.trials, rc.seed)?;
            out.push((out_path(rc, &format!("fig2_{}.csv", rc.estimator)), fig2_to_csv(&trace)));
        }
        Command::Diversity => {
            if rc.snr_r != rc.snr_d {
                return Err(Error::Invalid("diversity needs snr_r == snr_d; use --gamma".into()));
            }
            let pts = sweep_diagonal(&cfg, &rc.snr_r, &rc.stop, rc.seed)?;
            let slope = estimate_diversity_order(&pts)?;
            let csv = out_path(rc, &format!("diversity_{}.csv", rc.scheme));
            let summary = DiversitySummary {
                scheme: rc.scheme,
                gammas_db: rc.snr_r.clone(),
                slope,
                seed: rc.seed,
                points: &pts,
            };
            out.push((csv.with_extension("json"), json(&summary)));
            out.push((csv, points_to_csv(&pts)));
        }
        Command::Sfr => {
            let shift = rc.max_shift.unwrap_or(2 * cfg.xi());
            let report = sfr_agreement(&cfg, rc.trials, shift, rc.seed)?;
            out.push((out_path(rc, &format!("sfr_{}.json", rc.scheme)), json(&report)));
        }
        Command::RankAudit => {
            let p = rc.p.unwrap_or(cfg.xi());
            let report = rank_audit_padding(None, &cfg, p, rc.trials, rc.seed)?;
            out.push((out_path(rc, &format!("rank_audit_p{p}.json")), json(&report)));
        }
    }
    Ok(out)
}

fn write_all(files: &[(PathBuf, String)]) -> std::io::Result<()> {
    for (path, body) in files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, body)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    let (cmd, common) = match cli.command {
        Sub::Ber(c) => (Command::Ber, c),
        Sub::Fig2(c) => (Command::Fig2, c),
        Sub::Diversity(c) => (Command::Diversity, c),
        Sub::Sfr(c) => (Command::Sfr, c),
        Sub::RankAudit(c) => (Command::RankAudit, c),
    };
    let rc = common.resolve(cmd)?;
    let files = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
            .install(|| execute(&rc))?,
        None => execute(&rc)?,
    };
    write_all(&files).map_err(|e| Error::Invalid(format!("write failed: {e}")))?;
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

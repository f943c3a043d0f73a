//! Command-line front end: sweeps, overlay curves, synthetic counting runs,
//! their analysis, and the brute-force oracle check.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

pub use config::{parse_config, CorrelationKind, RunConfig};

use clap::{Args, Parser, Subcommand};
use photon_exchange::oracle::{compare_with_model, OracleComparison};
use photon_exchange::pipeline::io::{format_f64, read_count_records, to_json_string, write_count_records};
use photon_exchange::pipeline::{
    dip_metrics, fit_hom_width, noiseless_counts, ratio_normalize, smooth_ratio, synthesize_counts, DipMetrics,
    FitReport, RatioPoint,
};
use photon_exchange::{normalized_ratio_sweep, Correlation, Error, Result};
use serde::Serialize;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SWEEP_HEADER: &str = "delay_fs,upsilon,xi,p_both_pass,p_one_abs,p_both_abs,ratio";
pub const CURVES_HEADER: &str = "delay_fs,ratio_product,ratio_anticorrelated";

#[derive(Debug, Parser)]
#[command(name = "photon-exchange", version, about = "Photon-pair transmission through a narrow absorber")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags override the matching keys of the `--config` file.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// JSON file with `RunConfig` keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub photon_center_nm: Option<f64>,
    #[arg(long, global = true)]
    pub photon_fwhm_nm: Option<f64>,
    #[arg(long, global = true)]
    pub absorber_center_nm: Option<f64>,
    #[arg(long, global = true)]
    pub absorber_fwhm_nm: Option<f64>,
    #[arg(long, global = true)]
    pub absorber_depth: Option<f64>,
    #[arg(long, global = true)]
    pub mode_match: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub center_mismatch_nm: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub correlation_kind: Option<CorrelationKind>,
    #[arg(long, global = true)]
    pub pump_fwhm_nm: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delay_min_fs: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delay_max_fs: Option<f64>,
    #[arg(long, global = true)]
    pub delay_step_fs: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "output-path", short = 'o', visible_alias = "output", global = true)]
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized transmission ratio and channel probabilities over the delay grid (CSV).
    Sweep,
    /// Product-kind and monochromatic-pump ratio curves side by side (CSV).
    Curves,
    /// Mirror and filter count files `<stem>_mirror.csv`, `<stem>_filter.csv`.
    Synth {
        /// Mean pairs per delay far from zero delay.
        #[arg(long, default_value_t = 1e4)]
        mean_pairs: f64,
        /// Write rounded expectations instead of Poisson draws.
        #[arg(long)]
        noiseless: bool,
    },
    /// Ratio, smoothing, dip metrics and HOM fit of two count files (JSON).
    Analyze {
        #[arg(long)]
        mirror: PathBuf,
        #[arg(long)]
        filter: PathBuf,
    },
    /// Maximum discrepancy between the loss model and the Fock-space oracle (JSON).
    OracleCheck {
        #[arg(long, default_value_t = 128)]
        bins: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,5,10,20,60")]
        delays: Vec<f64>,
    },
}

impl Overrides {
    /// Config file (or defaults) with every given flag applied on top.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let bytes = fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                serde_json::from_slice(&bytes)?
            }
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { c.$field = v; }
            )*};
        }
        apply!(
            photon_center_nm, photon_fwhm_nm, absorber_center_nm, absorber_fwhm_nm, absorber_depth, mode_match,
            center_mismatch_nm, correlation_kind, pump_fwhm_nm, delay_min_fs, delay_max_fs, delay_step_fs, seed
        );
        if let Some(p) = &self.output_path {
            c.output_path = Some(p.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub ratio: Vec<RatioPoint>,
    pub smoothed: Vec<RatioPoint>,
    /// Dip of the smoothed ratio.
    pub dip: DipMetrics,
    pub dip_degenerate: bool,
    pub dip_unsmoothed: DipMetrics,
    pub fit: FitReport,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub n_bins: usize,
    pub points: Vec<OracleComparison>,
    pub max_discrepancy: f64,
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents)?,
        None => std::io::stdout().lock().write_all(contents.as_bytes())?,
    }
    Ok(())
}

fn sweep_csv(config: &RunConfig) -> Result<String> {
    let sweep = normalized_ratio_sweep(&config.params()?, &config.delays()?)?;
    let mut out = format!("{SWEEP_HEADER}\n");
    for p in &sweep.points {
        let xi = p.xi.map(format_f64).unwrap_or_default();
        let o = &p.outcomes;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_f64(p.delay),
            format_f64(p.upsilon),
            xi,
            format_f64(o.both_transmitted),
            format_f64(o.one_absorbed),
            format_f64(o.both_absorbed),
            format_f64(p.ratio)
        ));
    }
    Ok(out)
}

fn curves_csv(config: &RunConfig) -> Result<String> {
    let delays = config.delays()?;
    let params = config.params()?;
    let solid = normalized_ratio_sweep(&params.with_correlation(Correlation::Product), &delays)?;
    let dotted = normalized_ratio_sweep(&params.with_correlation(Correlation::Anticorrelated { pump_fwhm: 0.0 }), &delays)?;
    let mut out = format!("{CURVES_HEADER}\n");
    for (s, d) in solid.points.iter().zip(&dotted.points) {
        out.push_str(&format!("{},{},{}\n", format_f64(s.delay), format_f64(s.ratio), format_f64(d.ratio)));
    }
    Ok(out)
}

/// `foo.csv` and `foo` both give the stem `foo`.
fn synth_paths(config: &RunConfig) -> (PathBuf, PathBuf) {
    let stem = config.output_path.clone().unwrap_or_else(|| PathBuf::from("counts"));
    let stem = if stem.extension().is_some_and(|e| e == "csv") { stem.with_extension("") } else { stem };
    let with_suffix = |suffix: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    };
    (with_suffix("_mirror.csv"), with_suffix("_filter.csv"))
}

fn synth(config: &RunConfig, mean_pairs: f64, noiseless: bool) -> Result<()> {
    let params = config.params()?;
    let delays = config.delays()?;
    let (mirror, filter) = if noiseless {
        (noiseless_counts(&params, &delays, mean_pairs, false)?, noiseless_counts(&params, &delays, mean_pairs, true)?)
    } else {
        // independent streams for the two runs
        let seed = config.seed;
        (
            synthesize_counts(&params, &delays, mean_pairs, false, seed)?,
            synthesize_counts(&params, &delays, mean_pairs, true, seed.wrapping_add(1))?,
        )
    };
    let (mirror_path, filter_path) = synth_paths(config);
    write_count_records(fs::File::create(&mirror_path)?, &mirror)?;
    write_count_records(fs::File::create(&filter_path)?, &filter)?;
    Ok(())
}

fn read_counts(path: &Path) -> Result<Vec<photon_exchange::pipeline::CountRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    read_count_records(file)
}

pub fn analyze(mirror: &Path, filter: &Path, center_nm: f64) -> Result<AnalysisReport> {
    let mirror = read_counts(mirror)?;
    let filter = read_counts(filter)?;
    let ratio = ratio_normalize(&filter, &mirror)?;
    let smoothed = smooth_ratio(&ratio)?;
    let dip = dip_metrics(&smoothed)?;
    Ok(AnalysisReport {
        dip_unsmoothed: dip_metrics(&ratio)?,
        dip_degenerate: dip.degenerate(),
        dip,
        fit: fit_hom_width(&mirror, center_nm)?,
        ratio,
        smoothed,
    })
}

pub fn oracle_check(config: &RunConfig, delays: &[f64], bins: usize) -> Result<OracleReport> {
    let points = compare_with_model(&config.params()?, delays, bins)?;
    let max_discrepancy = points.iter().map(|p| p.max_abs_diff).fold(0.0, f64::max);
    Ok(OracleReport { n_bins: bins, points, max_discrepancy })
}

pub fn execute(cli: &Cli) -> Result<()> {
    let config = cli.overrides.resolve()?;
    let out = config.output_path.as_deref();
    match &cli.command {
        Command::Sweep => emit(out, &sweep_csv(&config)?),
        Command::Curves => emit(out, &curves_csv(&config)?),
        Command::Synth { mean_pairs, noiseless } => synth(&config, *mean_pairs, *noiseless),
        Command::Analyze { mirror, filter } => {
            let report = analyze(mirror, filter, config.photon_center_nm)?;
            emit(out, &(to_json_string(&report)? + "\n"))
        }
        Command::OracleCheck { bins, delays } => {
            let report = oracle_check(&config, delays, *bins)?;
            emit(out, &(to_json_string(&report)? + "\n"))
        }
    }
}

/// 0 on success, 1 for bad input, 2 for a numerical failure.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        2
    } else {
        1
    }
}

/// Parses `args` (program name first), runs, and reports failures on stderr as
/// a single line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return 1;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            exit_code(&e)
        }
    }
}

//! Experiment drivers: compute, then emit CSV, SVG and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use phonon_quench_core::quench::{crossover_point, sweep_point, validate_ratios};
use phonon_quench_core::trap::{mean_count_rate, photon_series, ValidityReport};
use phonon_quench_core::{
    run_quench, Boundary, CrossoverPoint, DerivedCouplings, ObservableSeries, QuenchSpec, SweepPoint,
};
use rayon::prelude::*;

use crate::config::{self, Document, Mode, RunConfig};
use crate::error::CliError;
use crate::output::{Cell, Plot, Series, Table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_NAME: &str = "manifest.txt";

/// Map `f` over `items` on a pool of `workers` threads, keeping input order.
pub fn parallel_map<T, R, E, F>(workers: usize, items: &[T], f: F) -> Result<Result<Vec<R>, E>, CliError>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

/// J/U sweep of the quench response on `workers` threads.
pub fn parallel_sweep(base: &QuenchSpec, ratios: &[f64], workers: usize) -> Result<Vec<SweepPoint>, CliError> {
    validate_ratios(base.hopping, ratios)?;
    Ok(parallel_map(workers, ratios, |&r| sweep_point(base, r))??)
}

/// Ground-state correlations at `U = J / ratio` on `workers` threads.
pub fn parallel_crossover(
    sites: usize,
    phonons: u32,
    hopping: f64,
    ratios: &[f64],
    boundary: Boundary,
    workers: usize,
) -> Result<Vec<CrossoverPoint>, CliError> {
    validate_ratios(hopping, ratios)?;
    Ok(parallel_map(workers, ratios, |&r| {
        crossover_point(sites, phonons, hopping, hopping / r, boundary)
    })??)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// One file produced by a run, still in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

/// Everything a run computed, ready to be written.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub mode: Mode,
    pub artifacts: Vec<Artifact>,
    /// Human-readable summary for standard output.
    pub summary: String,
    pub validity: Option<ValidityReport>,
    pub notes: Vec<String>,
    pub compute_seconds: f64,
}

fn csv_artifact(name: &'static str, table: &Table) -> Result<Artifact, CliError> {
    let bytes = table.to_csv().map_err(|source| CliError::Csv {
        path: PathBuf::from(name),
        source,
    })?;
    Ok(Artifact { name, bytes })
}

fn svg_artifact(name: &'static str, plot: &Plot) -> Artifact {
    Artifact {
        name,
        bytes: plot.render().into_bytes(),
    }
}

fn validity_table(report: &ValidityReport) -> Table {
    let mut t = Table::new(vec!["check", "condition", "ratio", "verdict"]);
    for c in &report.checks {
        t.push(vec![c.name.into(), c.condition.into(), c.ratio.into(), c.verdict.as_str().into()]);
    }
    t
}

fn validity_line(report: &ValidityReport) -> String {
    let parts: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{}={:.3e} {}", c.name, c.ratio, c.verdict.as_str()))
        .collect();
    format!("{} ({})", report.worst().as_str(), parts.join(", "))
}

fn derive(config: &RunConfig) -> Result<(Vec<Artifact>, String, ValidityReport), CliError> {
    let trap = config.trap.as_ref().expect("derive mode always resolves a trap");
    let d: DerivedCouplings = trap.derive()?;
    let report = trap.validity_report()?;
    let det = &config.detection;
    let rows: [(&str, f64, &str); 10] = [
        ("omega_x", d.omega_x, "Hz"),
        ("eta_x", d.eta_x, "1"),
        ("eta_x4", d.eta_x.powi(4), "1"),
        ("hopping", d.hopping, "Hz"),
        ("interaction", d.interaction, "Hz"),
        ("beta_x", d.beta_x, "1"),
        ("j_over_u", d.j_over_u(), "1"),
        ("solid_angle", det.solid_angle_fraction()?, "1"),
        ("decay_rate", det.decay_rate(), "1/s"),
        ("mean_count_rate", mean_count_rate(det)?, "1/s"),
    ];
    let mut table = Table::new(vec!["quantity", "value", "unit"]);
    let mut summary = String::from("quantity          value           unit\n");
    for (name, value, unit) in rows {
        table.push(vec![name.into(), value.into(), unit.into()]);
        let _ = writeln!(summary, "{name:<17} {value:<15.6e} {unit}");
    }
    summary.push_str("\ncheck                  condition              ratio       verdict\n");
    for c in &report.checks {
        let _ = writeln!(
            summary,
            "{:<22} {:<22} {:<11.3e} {}",
            c.name,
            c.condition,
            c.ratio,
            c.verdict.as_str()
        );
    }
    let artifacts = vec![
        csv_artifact("couplings.csv", &table)?,
        csv_artifact("validity.csv", &validity_table(&report))?,
    ];
    Ok((artifacts, summary, report))
}

fn ground(config: &RunConfig, workers: usize) -> Result<(Vec<Artifact>, String, Vec<String>), CliError> {
    let j = config.quench_spec().hopping;
    let points = parallel_crossover(config.sites, config.phonons, j, &config.ratios, config.boundary, workers)?;
    let mut table = Table::new(vec!["j_over_u", "delta_avg", "delta_central", "gap_over_u"]);
    let mut notes = Vec::new();
    for (p, &r) in points.iter().zip(&config.ratios) {
        let u = j / r;
        table.push(vec![r.into(), p.delta_avg.into(), p.delta_central.into(), p.gap.map(|g| g / u).into()]);
        if p.degenerate {
            notes.push(format!("degenerate ground level at J/U = {r}"));
        }
    }
    let plot = Plot {
        title: format!("Nearest-neighbour correlation, L = {}, N = {}", config.sites, config.phonons),
        x_label: "J/U".into(),
        y_label: "Delta".into(),
        log_x: true,
        series: vec![
            Series {
                label: "bond average".into(),
                points: points.iter().zip(&config.ratios).map(|(p, &r)| (r, p.delta_avg)).collect(),
            },
            Series {
                label: "central bond".into(),
                points: points.iter().zip(&config.ratios).map(|(p, &r)| (r, p.delta_central)).collect(),
            },
        ],
    };
    let summary = format!(
        "{} ratios, Delta_avg from {:.4} to {:.4}\n",
        points.len(),
        points.first().map_or(0.0, |p| p.delta_avg),
        points.last().map_or(0.0, |p| p.delta_avg)
    );
    Ok((
        vec![csv_artifact("crossover.csv", &table)?, svg_artifact("crossover.svg", &plot)],
        summary,
        notes,
    ))
}

fn quench(config: &RunConfig) -> Result<(Vec<Artifact>, String, Vec<String>), CliError> {
    let spec = config.quench_spec();
    let result = run_quench(&spec)?;
    let scaled = ObservableSeries {
        site: result.zero_phonon.site,
        times: result.scaled_times.clone(),
        values: result.zero_phonon.values.clone(),
    };
    let counts = photon_series(&scaled, &config.detection, Some(config.interaction_hz))?;
    let with_seconds = config.trap.is_some();

    let mut header = vec!["t_u", "n_i0", "density", "count_rate"];
    if with_seconds {
        header.insert(0, "t_seconds");
    }
    let mut table = Table::new(header);
    for k in 0..scaled.len() {
        let mut row: Vec<Cell> = vec![
            scaled.times[k].into(),
            scaled.values[k].into(),
            result.density.values[k].into(),
            counts.values[k].into(),
        ];
        if with_seconds {
            row.insert(0, counts.times[k].into());
        }
        table.push(row);
    }
    let site = spec.measure_site + 1;
    let plot = Plot {
        title: format!("Zero-phonon population at site {site}, J/U = {:.4}", spec.hopping / spec.interaction),
        x_label: "t U".into(),
        y_label: format!("n_{site},0"),
        log_x: false,
        series: vec![Series {
            label: "n_i0".into(),
            points: scaled.times.iter().copied().zip(scaled.values.iter().copied()).collect(),
        }],
    };
    let mut notes = Vec::new();
    if result.degeneracy_warning() {
        notes.push(format!(
            "initial ground level is degenerate (levels {:?}); the prepared state is one member of the manifold",
            result.degenerate_levels
        ));
    }
    let summary = format!(
        "n_i0 at site {site}: min {:.6}, max {:.6}, mean {:.6}; mean count rate {:.1} 1/s\n",
        scaled.min().unwrap_or(0.0),
        scaled.max().unwrap_or(0.0),
        scaled.mean().unwrap_or(0.0),
        counts.mean().unwrap_or(0.0)
    );
    Ok((
        vec![csv_artifact("quench.csv", &table)?, svg_artifact("quench.svg", &plot)],
        summary,
        notes,
    ))
}

fn sweep(config: &RunConfig, workers: usize) -> Result<(Vec<Artifact>, String, Vec<String>), CliError> {
    let base = config.quench_spec();
    let points = parallel_sweep(&base, &config.ratios, workers)?;
    let rate = mean_count_rate(&config.detection)?;
    let mut table = Table::new(vec!["j_over_u", "n_i0_variation", "count_rate_variation", "n_i0_mean"]);
    let mut notes = Vec::new();
    for p in &points {
        table.push(vec![p.j_over_u.into(), p.amplitude.into(), (p.amplitude * rate).into(), p.mean.into()]);
        if p.degenerate {
            notes.push(format!("degenerate initial ground level at J/U = {}", p.j_over_u));
        }
    }
    let peak = points
        .iter()
        .max_by(|a, b| a.amplitude.total_cmp(&b.amplitude))
        .expect("sweep has at least one point");
    let plot = Plot {
        title: format!("Maximum variation after the quench, L = {}, N = {}", config.sites, config.phonons),
        x_label: "J/U".into(),
        y_label: "max variation of n_i0".into(),
        log_x: true,
        series: vec![Series {
            label: "n_i0".into(),
            points: points.iter().map(|p| (p.j_over_u, p.amplitude)).collect(),
        }],
    };
    let summary = format!(
        "{} ratios, peak variation {:.6} ({:.1} counts/s) at J/U = {:.4}\n",
        points.len(),
        peak.amplitude,
        peak.amplitude * rate,
        peak.j_over_u
    );
    Ok((
        vec![csv_artifact("sweep.csv", &table)?, svg_artifact("sweep.svg", &plot)],
        summary,
        notes,
    ))
}

/// Run the computation for `config` without touching the file system.
pub fn compute(config: &RunConfig, workers: usize) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let mut validity = match &config.trap {
        Some(t) => Some(t.validity_report()?),
        None => None,
    };
    let (artifacts, summary, notes) = match config.mode {
        Mode::Derive => {
            let (a, s, v) = derive(config)?;
            validity = Some(v);
            (a, s, Vec::new())
        }
        Mode::Ground => ground(config, workers)?,
        Mode::Quench => quench(config)?,
        Mode::Sweep => sweep(config, workers)?,
    };
    Ok(RunReport {
        mode: config.mode,
        artifacts,
        summary,
        validity,
        notes,
        compute_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Manifest text: `#` metadata followed by the parseable config echo.
pub fn manifest(config: &RunConfig, report: &RunReport, workers: usize, total_seconds: f64) -> String {
    let mut m = String::new();
    let _ = writeln!(m, "# phonon-quench {VERSION} run manifest");
    let _ = writeln!(m, "# mode: {}", report.mode);
    let names: Vec<&str> = report.artifacts.iter().map(|a| a.name).collect();
    let _ = writeln!(m, "# outputs: {}", names.join(" "));
    let defaults: Vec<&str> = config.defaulted_keys().map(|r| r.key).collect();
    let _ = writeln!(m, "# defaults: {}", if defaults.is_empty() { "none".into() } else { defaults.join(" ") });
    let _ = writeln!(m, "# validity: {}", report.validity.as_ref().map_or("not evaluated (no trap section)".into(), validity_line));
    for note in &report.notes {
        let _ = writeln!(m, "# note: {note}");
    }
    let _ = writeln!(m, "# workers: {workers}");
    let _ = writeln!(m, "# timing.compute_seconds: {:.3}", report.compute_seconds);
    let _ = writeln!(m, "# timing.total_seconds: {total_seconds:.3}");
    m.push_str(&config.echo());
    m
}

/// Write every artifact and the manifest into `dir`. On failure nothing
/// written by this call is left behind.
pub fn write_outputs(dir: &Path, artifacts: &[Artifact], manifest: &str) -> Result<Vec<PathBuf>, CliError> {
    let created_dir = !dir.exists();
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let entries = artifacts
        .iter()
        .map(|a| (a.name, a.bytes.as_slice()))
        .chain(std::iter::once((MANIFEST_NAME, manifest.as_bytes())));
    for (name, bytes) in entries {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, bytes) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            if created_dir {
                let _ = fs::remove_dir(dir);
            }
            return Err(CliError::io(path, e));
        }
        written.push(path);
    }
    Ok(written)
}

/// A command-line request.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub mode: Option<Mode>,
    pub config_text: String,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub notes: Vec<String>,
}

/// Output directory: command line, then `output.dir`, then the
/// environment variable, then a fixed fallback.
pub fn output_dir(out: Option<&Path>, config: &RunConfig) -> PathBuf {
    out.map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .or_else(|| std::env::var_os(config::OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(config::FALLBACK_OUTPUT_DIR))
}

pub fn execute(inv: &Invocation) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let mut doc = Document::parse(&inv.config_text)?;
    if let Some(mode) = inv.mode {
        doc = doc.with_mode(mode)?;
    }
    let config = config::resolve(&doc)?;
    let workers = inv.workers.or(config.workers).unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(CliError::Config("worker count must be positive".into()));
    }
    let report = compute(&config, workers)?;
    let out_dir = output_dir(inv.out.as_deref(), &config);
    let text = manifest(&config, &report, workers, start.elapsed().as_secs_f64());
    let files = write_outputs(&out_dir, &report.artifacts, &text)?;
    Ok(Outcome {
        config,
        out_dir,
        files,
        summary: report.summary,
        notes: report.notes,
    })
}

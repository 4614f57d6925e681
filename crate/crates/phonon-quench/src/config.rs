//! Plain-text run configuration.
//!
//! One `section.key = value` per line, `#` starts a comment. Frequencies are
//! cycle frequencies in Hz; sites are counted from 1.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use phonon_quench_core::quench::QuenchProtocol;
use phonon_quench_core::trap::{Linewidth, ATOMIC_MASS_UNIT};
use phonon_quench_core::{Boundary, DetectionParams, InitialState, QuenchSpec, TrapParams};

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "PHONON_QUENCH_OUT";
pub const FALLBACK_OUTPUT_DIR: &str = "phonon-quench-out";

/// Hopping used when neither the config nor a trap section fixes it, Hz.
pub const DEFAULT_HOPPING_HZ: f64 = 550.0;
/// On-site interaction used when nothing else fixes it, Hz.
pub const DEFAULT_INTERACTION_HZ: f64 = 235.0;
pub const DEFAULT_SITES: usize = 5;
/// Multiplied by the atomic mass unit this is exactly the default ion mass.
const BARIUM_138_AMU: f64 = 137.905_247;
pub const DEFAULT_RATIO_MIN: f64 = 0.01;
pub const DEFAULT_RATIO_MAX: f64 = 3.0;
pub const DEFAULT_RATIO_POINTS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Derive,
    Ground,
    Quench,
    Sweep,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Derive, Mode::Ground, Mode::Quench, Mode::Sweep];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Derive => "derive",
            Mode::Ground => "ground",
            Mode::Quench => "quench",
            Mode::Sweep => "sweep",
        }
    }

    fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Mode,
    Count,
    Integer,
    Real,
    RealList,
    Text,
    Choice(&'static [&'static str]),
}

impl Kind {
    fn expected(self) -> String {
        match self {
            Kind::Mode => "one of derive, ground, quench, sweep".into(),
            Kind::Count => "a positive integer".into(),
            Kind::Integer => "a non-negative integer".into(),
            Kind::Real => "a finite number".into(),
            Kind::RealList => "a comma-separated list of finite numbers".into(),
            Kind::Text => "a non-empty string".into(),
            Kind::Choice(options) => format!("one of {}", options.join(", ")),
        }
    }
}

const BOUNDARIES: &[&str] = &["open", "periodic"];
const INITIAL_STATES: &[&str] = &["ground", "fock_unit_filling"];
const PROTOCOLS: &[&str] = &["sign_flip", "identity"];
const LINEWIDTHS: &[&str] = &["inverse_lifetime", "angular"];
const PARITIES: &[&str] = &["0", "1"];

const KEYS: &[(&str, Kind)] = &[
    ("run.mode", Kind::Mode),
    ("run.workers", Kind::Count),
    ("run.seed", Kind::Integer),
    ("output.dir", Kind::Text),
    ("lattice.sites", Kind::Count),
    ("lattice.phonons", Kind::Integer),
    ("lattice.boundary", Kind::Choice(BOUNDARIES)),
    ("couplings.hopping", Kind::Real),
    ("couplings.interaction", Kind::Real),
    ("couplings.ratio", Kind::Real),
    ("couplings.trap_frequency", Kind::Real),
    ("quench.site", Kind::Count),
    ("quench.measure_site", Kind::Count),
    ("quench.t_max", Kind::Real),
    ("quench.samples", Kind::Count),
    ("quench.initial_state", Kind::Choice(INITIAL_STATES)),
    ("quench.protocol", Kind::Choice(PROTOCOLS)),
    ("quench.krylov_tolerance", Kind::Real),
    ("sweep.ratios", Kind::RealList),
    ("sweep.ratio_min", Kind::Real),
    ("sweep.ratio_max", Kind::Real),
    ("sweep.points", Kind::Count),
    ("trap.rf_drive_freq", Kind::Real),
    ("trap.stability_q", Kind::Real),
    ("trap.axial_freq", Kind::Real),
    ("trap.ion_spacing", Kind::Real),
    ("trap.ion_mass_amu", Kind::Real),
    ("trap.standing_wave_strength", Kind::Real),
    ("trap.standing_wave_lambda", Kind::Real),
    ("trap.delta_parity", Kind::Choice(PARITIES)),
    ("trap.quench_mod_freq", Kind::Real),
    ("detection.branching", Kind::Real),
    ("detection.numerical_aperture", Kind::Real),
    ("detection.lifetime", Kind::Real),
    ("detection.quantum_efficiency", Kind::Real),
    ("detection.optics_factor", Kind::Real),
    ("detection.solid_angle", Kind::Real),
    ("detection.linewidth", Kind::Choice(LINEWIDTHS)),
];

/// Every key the parser accepts.
pub fn known_keys() -> impl Iterator<Item = &'static str> {
    KEYS.iter().map(|(k, _)| *k)
}

fn nearest_key(key: &str) -> &'static str {
    known_keys()
        .min_by_key(|k| strsim::levenshtein(key, k))
        .expect("key table is not empty")
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Count(u64),
    Real(f64),
    List(Vec<f64>),
    Text(String),
}

fn parse_value(key: &str, kind: Kind, raw: &str, line: usize) -> Result<Value, CliError> {
    let mismatch = || CliError::Config(format!("line {line}: `{key} = {raw}`: expected {}", kind.expected()));
    let real = |s: &str| s.trim().parse::<f64>().ok().filter(|x| x.is_finite());
    match kind {
        Kind::Mode => Mode::parse(raw).map(|_| Value::Text(raw.into())).ok_or_else(mismatch),
        Kind::Count => match raw.parse::<u64>() {
            Ok(n) if n > 0 => Ok(Value::Count(n)),
            _ => Err(mismatch()),
        },
        Kind::Integer => raw.parse::<u64>().map(Value::Count).map_err(|_| mismatch()),
        Kind::Real => real(raw).map(Value::Real).ok_or_else(mismatch),
        Kind::RealList => raw
            .split(',')
            .map(real)
            .collect::<Option<Vec<_>>>()
            .map(Value::List)
            .ok_or_else(mismatch),
        Kind::Text if !raw.is_empty() => Ok(Value::Text(raw.into())),
        Kind::Text => Err(mismatch()),
        Kind::Choice(options) if options.contains(&raw) => Ok(Value::Text(raw.into())),
        Kind::Choice(_) => Err(mismatch()),
    }
}

/// Parsed key-value pairs before defaults are applied.
#[derive(Debug, Clone, Default)]
pub struct Document {
    values: BTreeMap<&'static str, Value>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw_line) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, raw)) = content.split_once('=') else {
                return Err(CliError::Config(format!("line {line}: expected `section.key = value`, found `{content}`")));
            };
            let (key, raw) = (key.trim(), raw.trim());
            let Some(&(name, kind)) = KEYS.iter().find(|(k, _)| *k == key) else {
                return Err(CliError::Config(format!(
                    "line {line}: unknown key `{key}` (did you mean `{}`?)",
                    nearest_key(key)
                )));
            };
            let value = parse_value(name, kind, raw, line)?;
            if values.insert(name, value).is_some() {
                return Err(CliError::Config(format!("line {line}: `{name}` is set twice")));
            }
        }
        Ok(Document { values })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn mode(&self) -> Option<Mode> {
        match self.values.get("run.mode") {
            Some(Value::Text(s)) => Mode::parse(s),
            _ => None,
        }
    }

    /// Set `run.mode` if the document does not; a conflicting value is an error.
    pub fn with_mode(mut self, mode: Mode) -> Result<Document, CliError> {
        match self.mode() {
            Some(m) if m != mode => Err(CliError::Config(format!(
                "command line asks for mode `{mode}` but run.mode = {m}"
            ))),
            _ => {
                self.values.insert("run.mode", Value::Text(mode.as_str().into()));
                Ok(self)
            }
        }
    }

    fn count(&self, key: &str) -> Option<u64> {
        match self.values.get(key) {
            Some(Value::Count(n)) => Some(*n),
            _ => None,
        }
    }

    fn real(&self, key: &str) -> Option<f64> {
        match self.values.get(key) {
            Some(Value::Real(x)) => Some(*x),
            _ => None,
        }
    }

    fn list(&self, key: &str) -> Option<&[f64]> {
        match self.values.get(key) {
            Some(Value::List(v)) => Some(v),
            _ => None,
        }
    }

    fn text(&self, key: &str) -> Option<&str> {
        match self.values.get(key) {
            Some(Value::Text(s)) => Some(s),
            _ => None,
        }
    }

    fn has_section(&self, section: &str) -> bool {
        self.values.keys().any(|k| k.split('.').next() == Some(section))
    }
}

/// One resolved key as echoed in the manifest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolved {
    pub key: &'static str,
    pub value: String,
    pub defaulted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub workers: Option<usize>,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub sites: usize,
    pub phonons: u32,
    pub boundary: Boundary,
    pub hopping_hz: f64,
    pub interaction_hz: f64,
    pub trap_frequency_hz: f64,
    /// Zero-based.
    pub quench_site: usize,
    /// Zero-based.
    pub measure_site: usize,
    pub t_max: f64,
    pub samples: usize,
    pub initial_state: InitialState,
    pub protocol: QuenchProtocol,
    pub krylov_tolerance: f64,
    pub ratios: Vec<f64>,
    /// Present when the document has a `trap` section or the mode is `derive`.
    pub trap: Option<TrapParams>,
    pub detection: DetectionParams,
    /// Every key the run depends on, in echo order.
    pub resolved: Vec<Resolved>,
}

struct Resolver<'a> {
    doc: &'a Document,
    resolved: Vec<Resolved>,
}

impl Resolver<'_> {
    fn note(&mut self, key: &'static str, value: impl fmt::Display) {
        self.resolved.push(Resolved {
            key,
            value: value.to_string(),
            defaulted: !self.doc.contains(key),
        });
    }

    fn real(&mut self, key: &'static str, default: f64) -> f64 {
        let x = self.doc.real(key).unwrap_or(default);
        self.note(key, x);
        x
    }

    fn count(&mut self, key: &'static str, default: u64) -> u64 {
        let n = self.doc.count(key).unwrap_or(default);
        self.note(key, n);
        n
    }

    fn choice(&mut self, key: &'static str, default: &'static str) -> String {
        let s = self.doc.text(key).unwrap_or(default).to_string();
        self.note(key, &s);
        s
    }
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let (a, b) = (min.log10(), max.log10());
    (0..points)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (points - 1) as f64))
        .collect()
}

fn format_list(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

/// Parse a configuration document and resolve every default.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    resolve(&Document::parse(text)?)
}

pub fn resolve(doc: &Document) -> Result<RunConfig, CliError> {
    let mode = doc
        .mode()
        .ok_or_else(|| config_error(format!("missing required key `run.mode` (one of {})", Kind::Mode.expected())))?;
    let mut r = Resolver {
        doc,
        resolved: Vec::new(),
    };
    r.note("run.mode", mode);
    let seed = r.count("run.seed", 0);
    let workers = doc.count("run.workers").map(|n| n as usize);
    let output_dir = doc.text("output.dir").map(PathBuf::from);

    let uses_chain = mode != Mode::Derive;
    let uses_quench = matches!(mode, Mode::Quench | Mode::Sweep);
    let uses_grid = matches!(mode, Mode::Ground | Mode::Sweep);
    let uses_detection = mode != Mode::Ground;
    let trap_present = mode == Mode::Derive || doc.has_section("trap");

    let trap = if trap_present {
        let d = TrapParams::default();
        let parity = r.choice("trap.delta_parity", "0");
        let trap = TrapParams {
            rf_drive_freq: r.real("trap.rf_drive_freq", d.rf_drive_freq),
            stability_q: r.real("trap.stability_q", d.stability_q),
            axial_freq: r.real("trap.axial_freq", d.axial_freq),
            ion_spacing: r.real("trap.ion_spacing", d.ion_spacing),
            ion_mass: r.real("trap.ion_mass_amu", BARIUM_138_AMU) * ATOMIC_MASS_UNIT,
            standing_wave_strength: r.real("trap.standing_wave_strength", d.standing_wave_strength),
            standing_wave_lambda: r.real("trap.standing_wave_lambda", d.standing_wave_lambda),
            delta_parity: if parity == "1" { 1 } else { 0 },
            quench_mod_freq: r.real("trap.quench_mod_freq", d.quench_mod_freq),
        };
        trap.validate().map_err(|e| config_error(format!("trap section: {e}")))?;
        Some(trap)
    } else {
        None
    };

    let detection = if uses_detection {
        let d = DetectionParams::default();
        let linewidth = r.choice("detection.linewidth", "inverse_lifetime");
        let solid_angle = doc.real("detection.solid_angle");
        if let Some(w) = solid_angle {
            r.note("detection.solid_angle", w);
        }
        let det = DetectionParams {
            branching: r.real("detection.branching", d.branching),
            numerical_aperture: r.real("detection.numerical_aperture", d.numerical_aperture),
            lifetime: r.real("detection.lifetime", d.lifetime),
            quantum_efficiency: r.real("detection.quantum_efficiency", d.quantum_efficiency),
            optics_factor: r.real("detection.optics_factor", d.optics_factor),
            solid_angle,
            linewidth: if linewidth == "angular" {
                Linewidth::Angular
            } else {
                Linewidth::InverseLifetime
            },
        };
        det.validate().map_err(|e| config_error(format!("detection section: {e}")))?;
        det
    } else {
        DetectionParams::default()
    };

    let mut sites = DEFAULT_SITES;
    let mut phonons = DEFAULT_SITES as u32;
    let mut boundary = Boundary::Open;
    let mut hopping_hz = DEFAULT_HOPPING_HZ;
    let mut interaction_hz = DEFAULT_INTERACTION_HZ;
    let mut trap_frequency_hz = 0.0;
    if uses_chain {
        sites = r.count("lattice.sites", DEFAULT_SITES as u64) as usize;
        let n = r.count("lattice.phonons", sites as u64);
        phonons = u32::try_from(n).map_err(|_| config_error("lattice.phonons is too large"))?;
        boundary = match r.choice("lattice.boundary", "open").as_str() {
            "periodic" => Boundary::Periodic,
            _ => Boundary::Open,
        };

        let derived = match &trap {
            Some(t) => Some(t.derive().map_err(|e| config_error(format!("trap section: {e}")))?),
            None => None,
        };
        hopping_hz = r.real("couplings.hopping", derived.map_or(DEFAULT_HOPPING_HZ, |d| d.hopping));
        trap_frequency_hz = r.real("couplings.trap_frequency", 0.0);
        if mode == Mode::Quench {
            match (doc.real("couplings.ratio"), doc.real("couplings.interaction")) {
                (Some(_), Some(_)) => {
                    return Err(config_error("set either couplings.ratio or couplings.interaction, not both"))
                }
                (Some(ratio), None) => {
                    if !(ratio > 0.0) {
                        return Err(config_error("couplings.ratio must be positive"));
                    }
                    r.note("couplings.ratio", ratio);
                    interaction_hz = hopping_hz / ratio;
                }
                (None, _) => {
                    interaction_hz =
                        r.real("couplings.interaction", derived.map_or(DEFAULT_INTERACTION_HZ, |d| d.interaction));
                }
            }
            if interaction_hz == 0.0 || !interaction_hz.is_finite() {
                return Err(config_error("the initial interaction must be finite and non-zero"));
            }
        } else if !(hopping_hz > 0.0) {
            return Err(config_error(format!("mode `{mode}` needs couplings.hopping > 0")));
        }
    }

    let mut quench_site = 0;
    let mut measure_site = 0;
    let mut t_max = QuenchSpec::DEFAULT_T_MAX;
    let mut samples = QuenchSpec::DEFAULT_SAMPLES;
    let mut initial_state = InitialState::Ground;
    let mut protocol = QuenchProtocol::SignFlip;
    let mut krylov_tolerance = 1e-9;
    if uses_quench {
        let site = r.count("quench.site", QuenchSpec::default_site(sites) as u64 + 1) as usize;
        if site > sites {
            return Err(config_error(format!("quench.site = {site} is outside 1..={sites}")));
        }
        let measured = r.count("quench.measure_site", site as u64) as usize;
        if measured > sites {
            return Err(config_error(format!("quench.measure_site = {measured} is outside 1..={sites}")));
        }
        quench_site = site - 1;
        measure_site = measured - 1;
        t_max = r.real("quench.t_max", QuenchSpec::DEFAULT_T_MAX);
        if !(t_max >= 0.0) {
            return Err(config_error("quench.t_max must be non-negative"));
        }
        samples = r.count("quench.samples", QuenchSpec::DEFAULT_SAMPLES as u64) as usize;
        initial_state = match r.choice("quench.initial_state", "ground").as_str() {
            "fock_unit_filling" => InitialState::FockUnitFilling,
            _ => InitialState::Ground,
        };
        if initial_state == InitialState::FockUnitFilling && phonons as usize != sites {
            return Err(config_error("quench.initial_state = fock_unit_filling needs lattice.phonons = lattice.sites"));
        }
        protocol = match r.choice("quench.protocol", "sign_flip").as_str() {
            "identity" => QuenchProtocol::Identity,
            _ => QuenchProtocol::SignFlip,
        };
        krylov_tolerance = r.real("quench.krylov_tolerance", 1e-9);
        if !(krylov_tolerance > 0.0) {
            return Err(config_error("quench.krylov_tolerance must be positive"));
        }
    }

    let mut ratios = Vec::new();
    if uses_grid {
        let explicit = doc.list("sweep.ratios");
        let range_keys = ["sweep.ratio_min", "sweep.ratio_max", "sweep.points"];
        if explicit.is_some() && range_keys.iter().any(|k| doc.contains(k)) {
            return Err(config_error("set either sweep.ratios or sweep.ratio_min/ratio_max/points, not both"));
        }
        ratios = match explicit {
            Some(list) => {
                r.note("sweep.ratios", format_list(list));
                list.to_vec()
            }
            None => {
                let min = r.real("sweep.ratio_min", DEFAULT_RATIO_MIN);
                let max = r.real("sweep.ratio_max", DEFAULT_RATIO_MAX);
                let points = r.count("sweep.points", DEFAULT_RATIO_POINTS as u64) as usize;
                if !(min > 0.0 && max >= min) {
                    return Err(config_error("sweep range needs 0 < ratio_min <= ratio_max"));
                }
                log_grid(min, max, points)
            }
        };
        if ratios.iter().any(|x| !(*x > 0.0)) {
            return Err(config_error("sweep ratios must be positive"));
        }
        if ratios.windows(2).any(|w| w[1] < w[0]) {
            return Err(config_error("sweep ratios must be sorted ascending"));
        }
    }

    Ok(RunConfig {
        mode,
        workers,
        seed,
        output_dir,
        sites,
        phonons,
        boundary,
        hopping_hz,
        interaction_hz,
        trap_frequency_hz,
        quench_site,
        measure_site,
        t_max,
        samples,
        initial_state,
        protocol,
        krylov_tolerance,
        ratios,
        trap,
        detection,
        resolved: r.resolved,
    })
}

impl RunConfig {
    /// Keys filled in from defaults rather than the document.
    pub fn defaulted_keys(&self) -> impl Iterator<Item = &Resolved> {
        self.resolved.iter().filter(|r| r.defaulted)
    }

    pub fn resolved_value(&self, key: &str) -> Option<&str> {
        self.resolved.iter().find(|r| r.key == key).map(|r| r.value.as_str())
    }

    /// Echo of every resolved key, parseable by [`parse_config`].
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for r in &self.resolved {
            out.push_str(&format!("{} = {}", r.key, r.value));
            if r.defaulted {
                out.push_str("  # default");
            }
            out.push('\n');
        }
        out
    }

    /// Post-quench chain spec at the base couplings, angular units.
    pub fn quench_spec(&self) -> QuenchSpec {
        let w = std::f64::consts::TAU;
        QuenchSpec {
            sites: self.sites,
            phonons: self.phonons,
            hopping: w * self.hopping_hz,
            interaction: w * self.interaction_hz,
            trap_frequency: w * self.trap_frequency_hz,
            quench_site: self.quench_site,
            measure_site: self.measure_site,
            t_max: self.t_max,
            samples: self.samples,
            boundary: self.boundary,
            initial_state: self.initial_state,
            protocol: self.protocol,
            krylov_tolerance: self.krylov_tolerance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_missing_mode() {
        let err = parse_config("").unwrap_err().to_string();
        assert!(err.contains("run.mode"), "{err}");
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_config("# header\n\nrun.mode = quench  # trailing\n").unwrap();
        assert_eq!(c.mode, Mode::Quench);
    }

    #[test]
    fn unknown_key_names_nearest() {
        let err = parse_config("run.mode = quench\nlattice.site = 4\n").unwrap_err().to_string();
        assert!(err.contains("lattice.site") && err.contains("lattice.sites"), "{err}");
    }

    #[test]
    fn type_mismatch_names_expected_type() {
        let err = parse_config("run.mode = quench\nlattice.sites = five\n").unwrap_err().to_string();
        assert!(err.contains("positive integer"), "{err}");
        let err = parse_config("run.mode = quench\nlattice.boundary = ring\n").unwrap_err().to_string();
        assert!(err.contains("open, periodic"), "{err}");
    }

    #[test]
    fn quench_defaults_are_listed() {
        let c = parse_config("run.mode = quench\nlattice.sites = 5\nlattice.phonons = 5\ncouplings.ratio = 0.7\n").unwrap();
        let defaulted: Vec<&str> = c.defaulted_keys().map(|r| r.key).collect();
        for key in ["quench.t_max", "quench.samples", "quench.site"] {
            assert!(defaulted.contains(&key), "{key} not listed");
        }
        assert_eq!(c.resolved_value("quench.site"), Some("3"));
        assert_eq!(c.resolved_value("quench.t_max"), Some("20"));
        assert_eq!(c.resolved_value("quench.samples"), Some("400"));
        assert_eq!(c.quench_site, 2);
        assert!((c.hopping_hz / c.interaction_hz - 0.7).abs() < 1e-12);
    }

    #[test]
    fn site_out_of_range() {
        let err = parse_config("run.mode = quench\nlattice.sites = 5\nquench.site = 9\n").unwrap_err().to_string();
        assert!(err.contains("1..=5"), "{err}");
    }

    #[test]
    fn duplicate_and_conflicting_keys() {
        assert!(parse_config("run.mode = quench\nrun.mode = sweep\n").is_err());
        assert!(parse_config("run.mode = quench\ncouplings.ratio = 1\ncouplings.interaction = 300\n").is_err());
        assert!(parse_config("run.mode = sweep\nsweep.ratios = 0.1, 1\nsweep.points = 3\n").is_err());
        assert!(parse_config("run.mode = sweep\nsweep.ratios = 1, 0.1\n").is_err());
    }

    #[test]
    fn trap_section_sets_couplings() {
        let c = parse_config("run.mode = quench\ntrap.stability_q = 0.42\n").unwrap();
        let d = TrapParams::default().derive().unwrap();
        assert_eq!(c.hopping_hz, d.hopping);
        assert_eq!(c.interaction_hz, d.interaction);
        assert!(parse_config("run.mode = quench\ntrap.stability_q = 0.95\n").is_err());
    }

    #[test]
    fn default_sweep_grid() {
        let c = parse_config("run.mode = sweep\n").unwrap();
        assert_eq!(c.ratios.len(), 25);
        assert!((c.ratios[0] - 0.01).abs() < 1e-15);
        assert!((c.ratios[24] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn echo_round_trips() {
        let text = "run.mode = quench\ncouplings.ratio = 0.3\nquench.samples = 17\ntrap.ion_spacing = 2.1e-5\n";
        let c = parse_config(text).unwrap();
        let again = parse_config(&c.echo()).unwrap();
        assert_eq!(again.quench_spec(), c.quench_spec());
        assert_eq!(again.trap, c.trap);
        assert_eq!(again.detection, c.detection);
        assert_eq!(again.echo().replace("  # default", ""), c.echo().replace("  # default", ""));
    }

    #[test]
    fn mode_override() {
        let doc = Document::parse("lattice.sites = 3\n").unwrap().with_mode(Mode::Ground).unwrap();
        assert_eq!(resolve(&doc).unwrap().mode, Mode::Ground);
        let doc = Document::parse("run.mode = sweep\n").unwrap();
        assert!(doc.with_mode(Mode::Quench).is_err());
    }
}

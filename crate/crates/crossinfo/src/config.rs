//! Run configuration: a flat TOML key/value file.
//!
//! Every key is optional except `backend`; defaults depend on the backend.
//! Validation collects all problems at once, each tagged with its key.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use crossinfo_core::billiard::{BilliardGeometry, MAX_DEFORMATION, MIN_RESOLUTION};
use crossinfo_core::spinchain::{sector_dimension, Parity, MAX_SITES};
use toml::{Table, Value};

pub const DEFAULT_OUTPUT_DIR: &str = "crossinfo-out";
const MAX_REFINE_LEVELS: i64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Quadrupole,
    Oval,
    Ising,
    TwoLevelTest,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Quadrupole => "quadrupole",
            BackendKind::Oval => "oval",
            BackendKind::Ising => "ising",
            BackendKind::TwoLevelTest => "two_level_test",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            BackendKind::Quadrupole,
            BackendKind::Oval,
            BackendKind::Ising,
            BackendKind::TwoLevelTest,
        ]
        .into_iter()
        .find(|b| b.name() == s)
    }

    /// Name of the swept parameter in output headers.
    pub fn parameter_name(self) -> &'static str {
        match self {
            BackendKind::Quadrupole => "kappa",
            BackendKind::Oval => "epsilon",
            BackendKind::Ising => "theta",
            BackendKind::TwoLevelTest => "detuning",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilliardConfig {
    pub resolution: f64,
    pub target_k: f64,
    pub modes: usize,
    pub refractive_index: f64,
    /// Oval semi-axes; unused by the quadrupole.
    pub oval_a: f64,
    pub oval_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsingConfig {
    pub sites: usize,
    pub coupling: f64,
    pub field: f64,
    pub parity: Parity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelConfig {
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Quadrupole(BilliardConfig),
    Oval(BilliardConfig),
    Ising(IsingConfig),
    TwoLevelTest(TwoLevelConfig),
}

impl Backend {
    pub fn kind(&self) -> BackendKind {
        match self {
            Backend::Quadrupole(_) => BackendKind::Quadrupole,
            Backend::Oval(_) => BackendKind::Oval,
            Backend::Ising(_) => BackendKind::Ising,
            Backend::TwoLevelTest(_) => BackendKind::TwoLevelTest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpFormat {
    Text,
    Binary,
}

impl DumpFormat {
    pub fn name(self) -> &'static str {
        match self {
            DumpFormat::Text => "text",
            DumpFormat::Binary => "binary",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            DumpFormat::Text => "txt",
            DumpFormat::Binary => "bin",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub backend: Backend,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// Spectrum indices tracked as branches.
    pub track: Range<usize>,
    pub rank: usize,
    pub gap_factor: f64,
    pub overlap_floor: f64,
    pub refine_levels: usize,
    pub output_dir: PathBuf,
    pub workers: usize,
    /// Parameters at which every tracked branch state is dumped; each is
    /// snapped to the nearest grid point.
    pub dump_params: Vec<f64>,
    pub dump_format: DumpFormat,
}

impl RunConfig {
    pub fn parameters(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// Normalized echo: every key with its effective value.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new();
        let mut put = |k: &str, v: Value| {
            t.insert(k.to_string(), v);
        };
        put("backend", Value::String(self.backend.kind().name().into()));
        put("start", Value::Float(self.start));
        put("stop", Value::Float(self.stop));
        put("steps", Value::Integer(self.steps as i64));
        put("track_start", Value::Integer(self.track.start as i64));
        put("track_end", Value::Integer(self.track.end as i64));
        put("rank", Value::Integer(self.rank as i64));
        put("gap_factor", Value::Float(self.gap_factor));
        put("overlap_floor", Value::Float(self.overlap_floor));
        put("refine_levels", Value::Integer(self.refine_levels as i64));
        put("output_dir", Value::String(self.output_dir.display().to_string()));
        put("workers", Value::Integer(self.workers as i64));
        put(
            "dump_params",
            Value::Array(self.dump_params.iter().map(|&p| Value::Float(p)).collect()),
        );
        put("dump_format", Value::String(self.dump_format.name().into()));
        match &self.backend {
            Backend::Quadrupole(b) | Backend::Oval(b) => {
                put("resolution", Value::Float(b.resolution));
                put("target_k", Value::Float(b.target_k));
                put("modes", Value::Integer(b.modes as i64));
                put("refractive_index", Value::Float(b.refractive_index));
                if self.backend.kind() == BackendKind::Oval {
                    put("oval_a", Value::Float(b.oval_a));
                    put("oval_b", Value::Float(b.oval_b));
                }
            }
            Backend::Ising(c) => {
                put("sites", Value::Integer(c.sites as i64));
                put("coupling", Value::Float(c.coupling));
                put("field", Value::Float(c.field));
                let parity = match c.parity {
                    Parity::Even => "even",
                    Parity::Odd => "odd",
                };
                put("parity", Value::String(parity.into()));
            }
            Backend::TwoLevelTest(c) => put("g", Value::Float(c.g)),
        }
        t
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_table()).expect("plain table serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<FieldError>);

impl ConfigErrors {
    pub fn keys(&self) -> Vec<&str> {
        self.0.iter().map(|e| e.key.as_str()).collect()
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

const COMMON_KEYS: &[&str] = &[
    "backend",
    "start",
    "stop",
    "steps",
    "track_start",
    "track_end",
    "rank",
    "gap_factor",
    "overlap_floor",
    "refine_levels",
    "output_dir",
    "workers",
    "dump_params",
    "dump_format",
];
const BILLIARD_KEYS: &[&str] = &["resolution", "target_k", "modes", "refractive_index"];
const OVAL_KEYS: &[&str] = &["oval_a", "oval_b"];
const ISING_KEYS: &[&str] = &["sites", "coupling", "field", "parity"];
const TWO_LEVEL_KEYS: &[&str] = &["g"];

fn allowed_keys(kind: BackendKind) -> BTreeSet<&'static str> {
    let extra: &[&[&str]] = match kind {
        BackendKind::Quadrupole => &[BILLIARD_KEYS],
        BackendKind::Oval => &[BILLIARD_KEYS, OVAL_KEYS],
        BackendKind::Ising => &[ISING_KEYS],
        BackendKind::TwoLevelTest => &[TWO_LEVEL_KEYS],
    };
    COMMON_KEYS.iter().chain(extra.iter().flat_map(|k| k.iter())).copied().collect()
}

struct Reader<'a> {
    table: &'a Table,
    errors: Vec<FieldError>,
}

impl Reader<'_> {
    fn fail(&mut self, key: &str, message: impl Into<String>) {
        self.errors.push(FieldError {
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn float(&mut self, key: &str, default: f64) -> f64 {
        match self.table.get(key) {
            None => default,
            Some(Value::Float(x)) if x.is_finite() => *x,
            Some(Value::Integer(i)) => *i as f64,
            Some(_) => {
                self.fail(key, "expected a finite number");
                default
            }
        }
    }

    fn int(&mut self, key: &str, default: i64) -> i64 {
        match self.table.get(key) {
            None => default,
            Some(Value::Integer(i)) => *i,
            Some(_) => {
                self.fail(key, "expected an integer");
                default
            }
        }
    }

    fn count(&mut self, key: &str, default: usize, min: i64) -> usize {
        let v = self.int(key, default as i64);
        if v < min {
            self.fail(key, format!("must be at least {min}, got {v}"));
            return default;
        }
        v as usize
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        match self.table.get(key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(_) => {
                self.fail(key, "expected a string");
                default.to_string()
            }
        }
    }

    fn float_list(&mut self, key: &str) -> Vec<f64> {
        match self.table.get(key) {
            None => Vec::new(),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, v) in items.iter().enumerate() {
                    match v {
                        Value::Float(x) if x.is_finite() => out.push(*x),
                        Value::Integer(n) => out.push(*n as f64),
                        _ => self.fail(&format!("{key}[{i}]"), "expected a finite number"),
                    }
                }
                out
            }
            Some(_) => {
                self.fail(key, "expected an array of numbers");
                Vec::new()
            }
        }
    }
}

/// Parses and validates a configuration document.
pub fn validate_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    validate_table(&parse_document(text)?)
}

/// Applies `key=value` overrides on top of a parsed document. Values are
/// read as TOML, falling back to a bare string.
pub fn apply_overrides(table: &mut Table, overrides: &[(String, String)]) -> Result<(), ConfigErrors> {
    let mut errors = Vec::new();
    for (key, raw) in overrides {
        if key.is_empty() {
            errors.push(FieldError {
                key: "<override>".into(),
                message: format!("empty key in `={raw}`"),
            });
            continue;
        }
        let value = format!("v = {raw}")
            .parse::<Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.clone()));
        table.insert(key.clone(), value);
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(ConfigErrors(errors))
    }
}

/// Parses a document, applies overrides and validates.
pub fn load_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigErrors> {
    let mut table = parse_document(text)?;
    apply_overrides(&mut table, overrides)?;
    validate_table(&table)
}

fn parse_document(text: &str) -> Result<Table, ConfigErrors> {
    text.parse().map_err(|e: toml::de::Error| {
        ConfigErrors(vec![FieldError {
            key: "<document>".into(),
            message: e.message().to_string(),
        }])
    })
}

pub fn validate_table(table: &Table) -> Result<RunConfig, ConfigErrors> {
    let mut r = Reader {
        table,
        errors: Vec::new(),
    };
    let kind = match table.get("backend") {
        None => {
            r.fail("backend", "missing; one of quadrupole, oval, ising, two_level_test");
            return Err(ConfigErrors(r.errors));
        }
        Some(Value::String(s)) => match BackendKind::parse(s) {
            Some(k) => k,
            None => {
                r.fail("backend", format!("unknown backend `{s}`; one of quadrupole, oval, ising, two_level_test"));
                return Err(ConfigErrors(r.errors));
            }
        },
        Some(_) => {
            r.fail("backend", "expected a string");
            return Err(ConfigErrors(r.errors));
        }
    };
    let allowed = allowed_keys(kind);
    for key in table.keys() {
        if !allowed.contains(key.as_str()) {
            let known = COMMON_KEYS
                .iter()
                .chain(BILLIARD_KEYS)
                .chain(OVAL_KEYS)
                .chain(ISING_KEYS)
                .chain(TWO_LEVEL_KEYS)
                .any(|k| k == key);
            let message = if known {
                format!("does not apply to backend {}", kind.name())
            } else {
                "unknown key".to_string()
            };
            r.fail(key, message);
        }
    }

    let (start0, stop0, steps0) = match kind {
        BackendKind::Quadrupole | BackendKind::Oval => (0.0, 0.12, 25),
        BackendKind::Ising => (0.3, 0.6, 61),
        BackendKind::TwoLevelTest => (-0.1, 0.1, 201),
    };
    let start = r.float("start", start0);
    let stop = r.float("stop", stop0);
    let steps = r.count("steps", steps0, 2);
    if !(stop > start) {
        r.fail("stop", format!("must exceed start ({start}), got {stop}"));
    }

    let backend = match kind {
        BackendKind::Quadrupole | BackendKind::Oval => {
            let b = BilliardConfig {
                resolution: r.float("resolution", 60.0),
                target_k: r.float("target_k", 2.0),
                modes: r.count("modes", 8, 1),
                refractive_index: r.float("refractive_index", 3.3),
                oval_a: r.float("oval_a", 1.0),
                oval_b: r.float("oval_b", 1.03),
            };
            if b.resolution < MIN_RESOLUTION {
                r.fail(
                    "resolution",
                    format!("must be at least {MIN_RESOLUTION} points per unit length, got {}", b.resolution),
                );
            }
            if !(b.target_k > 0.0) {
                r.fail("target_k", format!("must be positive, got {}", b.target_k));
            }
            if !(b.refractive_index > 0.0) {
                r.fail("refractive_index", format!("must be positive, got {}", b.refractive_index));
            }
            for (key, v) in [("start", start), ("stop", stop)] {
                if v.abs() > MAX_DEFORMATION {
                    r.fail(key, format!("deformation {v} outside the validated bound |η| ≤ {MAX_DEFORMATION}"));
                }
            }
            if kind == BackendKind::Oval {
                if !(b.oval_a > 0.0) {
                    r.fail("oval_a", "semi-axis must be positive");
                }
                if !(b.oval_b > 0.0) {
                    r.fail("oval_b", "semi-axis must be positive");
                }
                if b.oval_a > 0.0 && start.abs().max(stop.abs()) * b.oval_a >= 1.0 {
                    r.fail("oval_a", "|ε|·a must stay below 1 for a closed boundary");
                }
                Backend::Oval(b)
            } else {
                Backend::Quadrupole(b)
            }
        }
        BackendKind::Ising => {
            let sites = r.count("sites", 8, 2);
            if sites > MAX_SITES {
                r.fail("sites", format!("at most {MAX_SITES} sites are supported, got {sites}"));
            }
            let parity = match r.string("parity", "even").as_str() {
                "even" => Parity::Even,
                "odd" => Parity::Odd,
                other => {
                    r.fail("parity", format!("expected `even` or `odd`, got `{other}`"));
                    Parity::Even
                }
            };
            Backend::Ising(IsingConfig {
                sites: sites.min(MAX_SITES),
                coupling: r.float("coupling", 1.0),
                field: r.float("field", 1.0),
                parity,
            })
        }
        BackendKind::TwoLevelTest => Backend::TwoLevelTest(TwoLevelConfig { g: r.float("g", 0.01) }),
    };

    let available = match &backend {
        Backend::Quadrupole(b) | Backend::Oval(b) => b.modes,
        Backend::Ising(c) => sector_dimension(c.sites, c.parity),
        Backend::TwoLevelTest(_) => 2,
    };
    let track_start = r.count("track_start", 0, 0);
    let track_end = r.count("track_end", available, 1);
    if track_end > available {
        r.fail("track_end", format!("exceeds the {available} states available per parameter point"));
    }
    if track_start >= track_end {
        r.fail("track_start", format!("must be below track_end ({track_end}), got {track_start}"));
    }

    let rank = r.count("rank", 5, 1);
    let gap_factor = r.float("gap_factor", 2.0);
    if !(gap_factor >= 1.0) {
        r.fail("gap_factor", format!("must be at least 1, got {gap_factor}"));
    }
    let overlap_floor = r.float("overlap_floor", 0.5);
    if !(0.0..=1.0).contains(&overlap_floor) {
        r.fail("overlap_floor", format!("must lie in [0, 1], got {overlap_floor}"));
    }
    let default_levels = if kind == BackendKind::TwoLevelTest { 60 } else { 0 };
    let refine_levels = r.count("refine_levels", default_levels, 0);
    if refine_levels as i64 > MAX_REFINE_LEVELS {
        r.fail("refine_levels", format!("at most {MAX_REFINE_LEVELS}"));
    }
    let output_dir = PathBuf::from(r.string("output_dir", DEFAULT_OUTPUT_DIR));
    if output_dir.as_os_str().is_empty() {
        r.fail("output_dir", "must not be empty");
    }
    let workers = r.count("workers", 1, 1);
    let dump_params = r.float_list("dump_params");
    for (i, p) in dump_params.iter().enumerate() {
        if *p < start || *p > stop {
            r.fail(&format!("dump_params[{i}]"), format!("{p} lies outside [start, stop]"));
        }
    }
    let dump_format = match r.string("dump_format", "text").as_str() {
        "text" => DumpFormat::Text,
        "binary" => DumpFormat::Binary,
        other => {
            r.fail("dump_format", format!("expected `text` or `binary`, got `{other}`"));
            DumpFormat::Text
        }
    };

    // the geometry constructors hold the final word on the deformation range
    if r.errors.is_empty() {
        if let Backend::Quadrupole(b) | Backend::Oval(b) = &backend {
            for (key, v) in [("start", start), ("stop", stop)] {
                if let Err(e) = billiard_geometry(kind, b, v) {
                    r.fail(key, e.to_string());
                }
            }
        }
    }

    if !r.errors.is_empty() {
        return Err(ConfigErrors(r.errors));
    }
    Ok(RunConfig {
        backend,
        start,
        stop,
        steps,
        track: track_start..track_end,
        rank,
        gap_factor,
        overlap_floor,
        refine_levels,
        output_dir,
        workers,
        dump_params,
        dump_format,
    })
}

pub(crate) fn billiard_geometry(
    kind: BackendKind,
    b: &BilliardConfig,
    deformation: f64,
) -> crossinfo_core::Result<BilliardGeometry> {
    use crossinfo_core::billiard::Shape;
    let shape = match kind {
        BackendKind::Oval => Shape::Oval {
            a: b.oval_a,
            b: b.oval_b,
        },
        _ => Shape::Quadrupole,
    };
    BilliardGeometry::new(shape, deformation, b.refractive_index)
}

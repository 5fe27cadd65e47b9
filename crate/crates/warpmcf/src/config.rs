//! Flat key-value run configuration.
//!
//! One `key = value` assignment per line, sections by dotted prefix
//! (`grid.resolution = 128`). `#` starts a comment, strings may be quoted and
//! lists are comma separated. A document with a `scenario` key describes a
//! profile-curve run; otherwise it describes a graph-flow run. Parsing never
//! stops at the first problem: every issue is collected with its key and a
//! hint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use warpmcf_core::counterflow::{CounterflowSettings, Scenario};
use warpmcf_core::geometry::{BaseManifold, CubicSpline, DeltaRule, RadialProfile, WarpFactor};
use warpmcf_core::graphflow::{DtPolicy, Grid, RunSettings, SampleSchedule, Scheme, MAX_CFL_FRACTION};
use warpmcf_core::initial::InitialData;
use warpmcf_core::monitors::BoundId;

/// Smallest accepted node count per grid axis.
pub const MIN_RESOLUTION: usize = 16;

/// Default number of sample intervals of a flow run.
pub const DEFAULT_FLOW_SAMPLES: f64 = 50.0;

/// Default number of sample intervals of a profile-curve run.
pub const DEFAULT_CURVE_SAMPLES: f64 = 100.0;

pub const DEFAULT_OUTPUT_DIR: &str = "warpmcf-output";

const BASES: &[&str] = &["flat-circle", "flat-torus", "euclidean-polar", "hyperbolic-polar", "rotational"];
const WARPS: &[&str] = &["one", "cosh-r", "torus-bump", "tabulated-radial"];
const INITIALS: &[&str] = &["constant", "sinusoid", "gaussian-bump", "lipschitz-cone", "tanh-ramp"];
const SCENARIOS: &[&str] = &["tilted-disc", "steep-equidistant-graph", "geodesic-sphere", "slice"];
const MONITORS: &[&str] = &["gradient", "curvature-ceiling", "regularization", "decay", "graph-property"];
const DELTA_RULES: &[&str] = &["compact", "bounded-gradient", "local-gradient"];

/// Every accepted key with the shape of its value.
pub const SCHEMA: &[(&str, &str)] = &[
    ("name", "a run name"),
    ("seed", "a non-negative integer"),
    ("output.dir", "a directory path"),
    ("output.snapshots", "true or false"),
    ("base", "a base key"),
    ("base.length", "a positive number"),
    ("base.lengths", "two positive numbers"),
    ("base.profile", "a path to a two-column CSV (r, f)"),
    ("warp", "a warp key"),
    ("warp.offset", "a number"),
    ("warp.amplitude", "a number"),
    ("warp.mode", "a non-negative integer"),
    ("warp.profile", "a path to a two-column CSV (r, phi)"),
    ("grid.resolution", "an integer >= 16"),
    ("grid.angular", "an even integer >= 16"),
    ("grid.radius", "a positive number"),
    ("initial", "an initial-data key"),
    ("initial.value", "a number"),
    ("initial.amplitude", "a number"),
    ("initial.modes", "two non-negative integers"),
    ("initial.width", "a positive number"),
    ("initial.center", "two numbers"),
    ("initial.slope", "a number"),
    ("initial.rate", "a number"),
    ("initial.perturbation", "a non-negative number"),
    ("scheme", "euler or rk2"),
    ("dt", "cfl or fixed"),
    ("dt.fraction", "a number in (0, 0.9]"),
    ("dt.value", "a positive number"),
    ("time.horizon", "a positive number"),
    ("time.cadence", "a positive number"),
    ("time.stop-tolerance", "a positive number"),
    ("monitors", "a list of monitor keys"),
    ("monitor.refine", "true or false"),
    ("monitor.decay.ceiling", "a negative number"),
    ("monitor.regularization.window", "two numbers start, end"),
    ("monitor.delta-rule", "compact, bounded-gradient or local-gradient"),
    ("monitor.delta-gamma", "a number in (0, 1)"),
    ("fixture.nu-shift", "a number"),
    ("scenario", "a scenario key"),
    ("scenario.slope", "a number"),
    ("scenario.amplitude", "a number"),
    ("scenario.rate", "a positive number"),
    ("scenario.radius", "a positive number"),
    ("counterflow.multiplicity", "an integer >= 2"),
    ("counterflow.nodes", "an integer >= 16"),
    ("counterflow.cfl", "a number in (0, 1]"),
    ("counterflow.threshold", "a number > 1"),
    ("counterflow.extinction-ratio", "a number in (0, 1)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueKind {
    Syntax,
    UnknownKey,
    DuplicateKey,
    MissingField,
    TypeMismatch,
    InvalidValue,
    /// a known key that the rest of the document does not use
    NotApplicable,
    Io,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigIssue {
    pub kind: IssueKind,
    /// the offending key, or the file for I/O problems
    pub path: String,
    pub line: Option<usize>,
    pub message: String,
    pub hint: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {} (hint: {})", self.path, self.message, self.hint),
            None => write!(f, "`{}`: {} (hint: {})", self.path, self.message, self.hint),
        }
    }
}

/// Every schema violation found in a document.
#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration problem(s)", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

impl ConfigErrors {
    pub fn mentions(&self, key: &str) -> bool {
        self.0.iter().any(|i| i.path == key)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub name: String,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub run: RunKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunKind {
    Flow(FlowConfig),
    Counterexample(CounterexampleConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowConfig {
    pub base: BaseManifold,
    pub warp: WarpFactor,
    pub grid: Grid,
    pub initial: InitialData,
    /// amplitude of the seeded perturbation
    pub perturbation: Option<f64>,
    pub settings: RunSettings,
    pub monitors: Vec<BoundId>,
    pub decay_ceiling: Option<f64>,
    pub regularization_window: Option<[f64; 2]>,
    pub delta_rule: Option<DeltaRule>,
    /// rerun at doubled resolution to classify violations
    pub refine: bool,
    /// test fixture: added to the pinching excess of the gradient bound
    pub nu_shift: f64,
    pub snapshots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleConfig {
    pub scenario: Scenario,
    pub settings: CounterflowSettings,
    pub snapshots: bool,
}

/// Raw assignments, before any typing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    entries: BTreeMap<String, (String, Option<usize>)>,
}

impl Document {
    /// Splits lines into assignments; malformed and repeated lines become
    /// issues.
    pub fn parse(text: &str) -> (Document, Vec<ConfigIssue>) {
        let mut doc = Document::default();
        let mut issues = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                issues.push(issue(IssueKind::Syntax, content, Some(line), "not an assignment", "write `key = value`"));
                continue;
            };
            let key = key.trim();
            let value = unquote(value.trim());
            if key.is_empty() || key.contains(char::is_whitespace) {
                issues.push(issue(IssueKind::Syntax, key, Some(line), "malformed key", "keys are dotted words without spaces"));
                continue;
            }
            if let Some((_, first)) = doc.entries.get(key) {
                let hint = format!("first assigned on line {}", first.unwrap_or(0));
                issues.push(issue(IssueKind::DuplicateKey, key, Some(line), "key assigned twice", &hint));
                continue;
            }
            doc.entries.insert(key.to_string(), (value.to_string(), Some(line)));
        }
        (doc, issues)
    }

    /// Replaces or adds an assignment (command-line overrides).
    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), (unquote(value.trim()).to_string(), None));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }
}

fn unquote(v: &str) -> &str {
    if v.len() >= 2 && ((v.starts_with('"') && v.ends_with('"')) || (v.starts_with('\'') && v.ends_with('\''))) {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

fn issue(kind: IssueKind, path: &str, line: Option<usize>, message: &str, hint: &str) -> ConfigIssue {
    ConfigIssue { kind, path: path.to_string(), line, message: message.to_string(), hint: hint.to_string() }
}

fn expected_shape(key: &str) -> &'static str {
    SCHEMA.iter().find(|(k, _)| *k == key).map_or("a value", |(_, s)| *s)
}

fn edit_distance(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

fn unknown_key_hint(key: &str) -> String {
    let best = SCHEMA.iter().map(|(k, _)| (edit_distance(key, k), *k)).min();
    match best {
        Some((d, k)) if d <= 3 => format!("did you mean `{k}`?"),
        _ => {
            let section = key.split('.').next().unwrap_or(key);
            let known: Vec<&str> =
                SCHEMA.iter().map(|(k, _)| *k).filter(|k| k.split('.').next() == Some(section)).collect();
            if known.is_empty() {
                "see the key table in the README".to_string()
            } else {
                format!("known keys in this section: {}", known.join(", "))
            }
        }
    }
}

fn choice_hint(options: &[&str]) -> String {
    format!("one of: {}", options.join(", "))
}

fn parse_f64(v: &str) -> Option<f64> {
    v.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn parse_usize(v: &str) -> Option<usize> {
    v.parse().ok()
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "on" => Some(true),
        "false" | "no" | "off" => Some(false),
        _ => None,
    }
}

fn parse_list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_pair(v: &str) -> Option<[f64; 2]> {
    match parse_list(v).as_slice() {
        [a, b] => Some([parse_f64(a)?, parse_f64(b)?]),
        _ => None,
    }
}

fn parse_modes(v: &str) -> Option<[u32; 2]> {
    match parse_list(v).as_slice() {
        [a, b] => Some([a.parse().ok()?, b.parse().ok()?]),
        [a] => Some([a.parse().ok()?, 0]),
        _ => None,
    }
}

/// Typed access that records issues and which keys were consumed.
struct Reader<'a> {
    doc: &'a Document,
    used: BTreeSet<&'a str>,
    issues: Vec<ConfigIssue>,
    dir: &'a Path,
}

impl<'a> Reader<'a> {
    fn raw(&mut self, key: &'static str) -> Option<(&'a str, Option<usize>)> {
        let (k, (v, line)) = self.doc.entries.get_key_value(key)?;
        self.used.insert(k.as_str());
        Some((v.as_str(), *line))
    }

    fn get<T>(&mut self, key: &'static str, parse: impl Fn(&str) -> Option<T>) -> Option<T> {
        let (v, line) = self.raw(key)?;
        let parsed = parse(v);
        if parsed.is_none() {
            let msg = format!("cannot read `{v}`");
            let hint = format!("expected {}", expected_shape(key));
            self.issues.push(issue(IssueKind::TypeMismatch, key, line, &msg, &hint));
        }
        parsed
    }

    fn require<T>(&mut self, key: &'static str, parse: impl Fn(&str) -> Option<T>, why: &str) -> Option<T> {
        if self.doc.get(key).is_none() {
            let hint = format!("add `{key} = ...` ({})", expected_shape(key));
            self.issues.push(issue(IssueKind::MissingField, key, None, &format!("required {why}"), &hint));
            return None;
        }
        self.get(key, parse)
    }

    fn choice(&mut self, key: &'static str, options: &'static [&'static str], required: bool) -> Option<&'static str> {
        if required && self.doc.get(key).is_none() {
            self.issues.push(issue(IssueKind::MissingField, key, None, "required", &choice_hint(options)));
            return None;
        }
        let (v, line) = self.raw(key)?;
        let found = options.iter().copied().find(|o| *o == v);
        if found.is_none() {
            self.issues.push(issue(IssueKind::InvalidValue, key, line, &format!("unknown key `{v}`"), &choice_hint(options)));
        }
        found
    }

    fn invalid(&mut self, key: &'static str, message: String, hint: &str) {
        let line = self.doc.entries.get(key).and_then(|(_, l)| *l);
        self.issues.push(issue(IssueKind::InvalidValue, key, line, &message, hint));
    }

    /// `value` when `ok` holds; otherwise an issue and `None`.
    fn check<T: fmt::Display + Copy>(&mut self, key: &'static str, value: Option<T>, ok: impl Fn(T) -> bool, hint: &str) -> Option<T> {
        let v = value?;
        if ok(v) {
            Some(v)
        } else {
            self.invalid(key, format!("value {v} is out of range"), hint);
            None
        }
    }

    fn positive(&mut self, key: &'static str, required: Option<&str>) -> Option<f64> {
        let v = match required {
            Some(why) => self.require(key, parse_f64, why),
            None => self.get(key, parse_f64),
        };
        self.check(key, v, |x| x > 0.0, "must be > 0")
    }

    fn table(&mut self, key: &'static str, why: &str) -> Option<CubicSpline> {
        let raw = self.require(key, |s| Some(s.to_string()), why)?;
        let path = self.dir.join(&raw);
        match read_radial_table(&path) {
            Ok(t) => Some(t),
            Err(e) => {
                self.invalid(key, e, "a two-column CSV of (r, value) with increasing r starting at 0");
                None
            }
        }
    }
}

/// Two-column CSV `(r, value)`; a non-numeric first row is taken as header.
pub fn read_radial_table(path: &Path) -> Result<CubicSpline, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| format!("cannot open {}: {e}", path.display()))?;
    let (mut r, mut v) = (Vec::new(), Vec::new());
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let cols: Vec<Option<f64>> = record.iter().map(parse_f64).collect();
        match cols.as_slice() {
            [Some(a), Some(b)] => {
                r.push(*a);
                v.push(*b);
            }
            [_, _] if k == 0 => {}
            _ => return Err(format!("{}: row {} is not a pair of numbers", path.display(), k + 1)),
        }
    }
    CubicSpline::new(r, v).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses a document, resolving table paths against the working directory.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    parse_config_in(text, Path::new("."), &[])
}

/// Parses a document with `overrides` applied on top; relative table paths
/// resolve against `dir`.
pub fn parse_config_in(text: &str, dir: &Path, overrides: &[(String, String)]) -> Result<RunConfig, ConfigErrors> {
    let (mut doc, mut issues) = Document::parse(text);
    for (k, v) in overrides {
        doc.set(k, v);
    }
    let mut reader = Reader { doc: &doc, used: BTreeSet::new(), issues: Vec::new(), dir };
    let config = build(&mut reader);
    issues.append(&mut reader.issues);
    let kind = config.as_ref().map(|c| match c.run {
        RunKind::Flow(_) => "graph-flow",
        RunKind::Counterexample(_) => "profile-curve",
    });
    for (key, (_, line)) in &doc.entries {
        if reader.used.contains(key.as_str()) {
            continue;
        }
        if SCHEMA.iter().any(|(k, _)| k == key) {
            let msg = format!("not used by this {} configuration", kind.unwrap_or("run"));
            issues.push(issue(IssueKind::NotApplicable, key, *line, &msg, "remove the key or change the catalog choice it belongs to"));
        } else {
            issues.push(issue(IssueKind::UnknownKey, key, *line, "unknown key", &unknown_key_hint(key)));
        }
    }
    match config {
        Some(c) if issues.is_empty() => Ok(c),
        _ => {
            issues.sort_by_key(|i| (i.line.unwrap_or(usize::MAX), i.path.clone()));
            Err(ConfigErrors(issues))
        }
    }
}

/// Reads and parses a config file; table paths resolve next to it.
pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<RunConfig, ConfigErrors> {
    let text = fs::read_to_string(path).map_err(|e| {
        let p = path.display().to_string();
        ConfigErrors(vec![issue(IssueKind::Io, &p, None, &e.to_string(), "check the path and permissions")])
    })?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    parse_config_in(&text, dir, overrides)
}

fn build(r: &mut Reader<'_>) -> Option<RunConfig> {
    let name = r.get("name", |s| Some(s.to_string())).unwrap_or_else(|| "run".to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        r.invalid("name", format!("`{name}` cannot name a directory"), "letters, digits, '-', '_' and '.'");
    }
    let output_dir = r.get("output.dir", |s| Some(PathBuf::from(s))).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let seed = r.get("seed", |s| s.parse::<u64>().ok()).unwrap_or(0);
    let snapshots = r.get("output.snapshots", parse_bool).unwrap_or(true);
    let horizon = r.positive("time.horizon", Some("for every run"));
    let run = if r.doc.get("scenario").is_some() {
        counterexample(r, horizon, snapshots).map(RunKind::Counterexample)
    } else {
        flow(r, horizon, snapshots).map(RunKind::Flow)
    };
    Some(RunConfig { name, output_dir, seed, run: run? })
}

fn flow(r: &mut Reader<'_>, horizon: Option<f64>, snapshots: bool) -> Option<FlowConfig> {
    let base = base(r);
    let warp = warp(r);
    let grid = base.as_ref().and_then(|b| grid(r, b));
    if let (Some(b), Some(w)) = (&base, &warp) {
        if let Err(e) = w.check_compatible(b) {
            r.invalid("warp", e.to_string(), "cosh-r and tabulated-radial need a polar base, torus-bump a flat one");
        }
    }
    let initial = initial(r);
    if let (Some(b), Some(i)) = (&base, &initial) {
        if let Err(e) = i.check_base(b) {
            r.invalid("initial", e.to_string(), "sinusoid needs a flat base");
        }
    }
    let perturbation = r.get("initial.perturbation", parse_f64);
    let perturbation = r.check("initial.perturbation", perturbation, |a| a >= 0.0, "must be >= 0");
    let settings = settings(r, horizon);
    let polar = base.as_ref().map_or(false, BaseManifold::is_polar);
    let (monitors, decay_ceiling, regularization_window) = monitors(r, polar);
    let delta_rule = delta_rule(r);
    let refine = r.get("monitor.refine", parse_bool).unwrap_or(true);
    let nu_shift = r.get("fixture.nu-shift", parse_f64).unwrap_or(0.0);
    Some(FlowConfig {
        base: base?,
        warp: warp?,
        grid: grid?,
        initial: initial?,
        perturbation,
        settings: settings?,
        monitors: monitors?,
        decay_ceiling,
        regularization_window,
        delta_rule,
        refine,
        nu_shift,
        snapshots,
    })
}

fn base(r: &mut Reader<'_>) -> Option<BaseManifold> {
    let key = r.choice("base", BASES, true)?;
    let length_ok = |x: f64| x > 0.0;
    Some(match key {
        "flat-circle" => {
            let length = r.get("base.length", parse_f64);
            BaseManifold::FlatCircle { length: r.check("base.length", length, length_ok, "must be > 0").unwrap_or(std::f64::consts::TAU) }
        }
        "flat-torus" => {
            let lengths = r.get("base.lengths", parse_pair);
            if let Some(l) = lengths {
                if !(l[0] > 0.0 && l[1] > 0.0) {
                    r.invalid("base.lengths", format!("periods {l:?} must be positive"), "two positive numbers");
                    return None;
                }
            }
            BaseManifold::FlatTorus { lengths: lengths.unwrap_or([std::f64::consts::TAU; 2]) }
        }
        "euclidean-polar" => BaseManifold::euclidean_polar(),
        "hyperbolic-polar" => BaseManifold::hyperbolic_polar(),
        _ => {
            let table = r.table("base.profile", "for base `rotational`")?;
            match RadialProfile::tabulated(table) {
                Ok(profile) => BaseManifold::Polar { profile },
                Err(e) => {
                    r.invalid("base.profile", e.to_string(), "f(0) = 0 and f'(0) = 1 for a smooth pole");
                    return None;
                }
            }
        }
    })
}

fn warp(r: &mut Reader<'_>) -> Option<WarpFactor> {
    let key = r.choice("warp", WARPS, true)?;
    Some(match key {
        "one" => WarpFactor::One,
        "cosh-r" => WarpFactor::CoshR,
        "torus-bump" => {
            let offset = r.get("warp.offset", parse_f64).unwrap_or(1.5);
            let amplitude = r.get("warp.amplitude", parse_f64).unwrap_or(0.5);
            let mode = r.get("warp.mode", |s| s.parse::<u32>().ok()).unwrap_or(1);
            if !(offset > amplitude.abs()) {
                r.invalid("warp.offset", format!("offset {offset} does not exceed |amplitude| {amplitude}"), "the warp factor must stay positive");
                return None;
            }
            WarpFactor::TorusBump { offset, amplitude, mode }
        }
        _ => WarpFactor::TabulatedRadial { table: r.table("warp.profile", "for warp `tabulated-radial`")? },
    })
}

fn grid(r: &mut Reader<'_>, base: &BaseManifold) -> Option<Grid> {
    let res = r.require("grid.resolution", parse_usize, "for every flow run");
    let res = r.check("grid.resolution", res, |n| n >= MIN_RESOLUTION, "at least 16 nodes per axis");
    Some(match base {
        BaseManifold::FlatCircle { length } => Grid::Circle { n: res?, length: *length },
        BaseManifold::FlatTorus { lengths } => Grid::Torus { n: [res?; 2], lengths: *lengths },
        BaseManifold::Polar { .. } => {
            let why = format!("truncation radius for polar base `{}`", base.key());
            let radius = r.positive("grid.radius", Some(&why));
            let angular = r.get("grid.angular", parse_usize);
            let angular =
                r.check("grid.angular", angular, |n| n >= MIN_RESOLUTION && n % 2 == 0, "an even count of at least 16");
            if r.doc.get("grid.angular").is_some() && angular.is_none() {
                return None;
            }
            let radius = radius?;
            if let Some(max) = base.profile().map(RadialProfile::max_radius) {
                if radius > max {
                    r.invalid("grid.radius", format!("radius {radius} exceeds the profile table ({max})"), "truncate inside the tabulated range");
                    return None;
                }
            }
            let nr = res?;
            Grid::Polar { nr, ntheta: angular.unwrap_or(nr), radius }
        }
    })
}

fn initial(r: &mut Reader<'_>) -> Option<InitialData> {
    let key = r.choice("initial", INITIALS, true)?;
    let why = format!("for initial data `{key}`");
    let center = r.get("initial.center", parse_pair).unwrap_or([0.0; 2]);
    Some(match key {
        "constant" => InitialData::Constant { value: r.require("initial.value", parse_f64, &why)? },
        "sinusoid" => {
            let amplitude = r.require("initial.amplitude", parse_f64, &why);
            let modes = r.get("initial.modes", parse_modes).unwrap_or([1, 1]);
            InitialData::Sinusoid { amplitude: amplitude?, modes }
        }
        "gaussian-bump" => {
            let amplitude = r.require("initial.amplitude", parse_f64, &why);
            let width = r.positive("initial.width", Some(&why));
            InitialData::GaussianBump { amplitude: amplitude?, width: width?, center }
        }
        "lipschitz-cone" => InitialData::LipschitzCone { slope: r.require("initial.slope", parse_f64, &why)?, center },
        _ => {
            let amplitude = r.require("initial.amplitude", parse_f64, &why);
            let rate = r.require("initial.rate", parse_f64, &why);
            InitialData::TanhRamp { amplitude: amplitude?, rate: rate?, center }
        }
    })
}

fn settings(r: &mut Reader<'_>, horizon: Option<f64>) -> Option<RunSettings> {
    let scheme = match r.choice("scheme", &["euler", "rk2"], false) {
        Some("rk2") => Scheme::Rk2,
        _ => Scheme::Euler,
    };
    let dt_policy = match r.choice("dt", &["cfl", "fixed"], false) {
        Some("fixed") => {
            let dt = r.positive("dt.value", Some("for dt = fixed"));
            DtPolicy::Fixed { dt: dt? }
        }
        _ => {
            let f = r.get("dt.fraction", parse_f64);
            let f = r.check("dt.fraction", f, |x| x > 0.0 && x <= MAX_CFL_FRACTION, "in (0, 0.9]");
            if r.doc.get("dt.fraction").is_some() && f.is_none() {
                return None;
            }
            DtPolicy::Cfl { fraction: f.unwrap_or(0.4) }
        }
    };
    let cadence = r.positive("time.cadence", None);
    let stop_tolerance = r.positive("time.stop-tolerance", None);
    let end_time = horizon?;
    let cadence = cadence.unwrap_or(end_time / DEFAULT_FLOW_SAMPLES);
    Some(RunSettings { end_time, schedule: SampleSchedule::Uniform { cadence }, dt_policy, scheme, stop_tolerance })
}

type MonitorChoice = (Option<Vec<BoundId>>, Option<f64>, Option<[f64; 2]>);

fn monitors(r: &mut Reader<'_>, polar: bool) -> MonitorChoice {
    let listed = r.get("monitors", |s| {
        parse_list(s)
            .into_iter()
            .map(|m| match m {
                "gradient" => Some(BoundId::Gradient),
                "curvature-ceiling" => Some(BoundId::CurvatureCeiling),
                "regularization" => Some(BoundId::Regularization),
                "decay" => Some(BoundId::Decay),
                "graph-property" => Some(BoundId::GraphProperty),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
    });
    if r.doc.get("monitors").is_some() && listed.is_none() {
        if let Some(last) = r.issues.last_mut() {
            last.hint = choice_hint(MONITORS);
        }
    }
    let mut ids = listed.unwrap_or_else(|| {
        let mut d = vec![BoundId::Gradient, BoundId::CurvatureCeiling];
        if !polar {
            d.push(BoundId::Regularization);
        }
        d.push(BoundId::GraphProperty);
        d
    });
    ids.dedup();
    let decay_ceiling = if ids.contains(&BoundId::Decay) {
        let k = r.require("monitor.decay.ceiling", parse_f64, "when the decay monitor is enabled");
        r.check("monitor.decay.ceiling", k, |k| k < 0.0, "the ceiling k must be negative")
    } else {
        None
    };
    let window = if ids.contains(&BoundId::Regularization) {
        let w = r.get("monitor.regularization.window", parse_pair);
        match w {
            Some([a, b]) if !(a >= 0.0 && b > a) => {
                r.invalid("monitor.regularization.window", format!("window [{a}, {b}] is empty"), "0 <= start < end");
                None
            }
            w => w,
        }
    } else {
        None
    };
    let ok = !(ids.contains(&BoundId::Decay) && decay_ceiling.is_none());
    (ok.then_some(ids), decay_ceiling, window)
}

fn delta_rule(r: &mut Reader<'_>) -> Option<DeltaRule> {
    match r.choice("monitor.delta-rule", DELTA_RULES, false)? {
        "compact" => Some(DeltaRule::Compact),
        "bounded-gradient" => Some(DeltaRule::BoundedGradient),
        _ => {
            let g = r.require("monitor.delta-gamma", parse_f64, "for the local-gradient rule");
            let gamma = r.check("monitor.delta-gamma", g, |g| g > 0.0 && g < 1.0, "in (0, 1)")?;
            Some(DeltaRule::LocalGradient { gamma })
        }
    }
}

fn counterexample(r: &mut Reader<'_>, horizon: Option<f64>, snapshots: bool) -> Option<CounterexampleConfig> {
    let key = r.choice("scenario", SCENARIOS, true)?;
    let mut scenario = Scenario::from_key(key)?;
    match &mut scenario {
        Scenario::TiltedDisc { slope, radius } => {
            *slope = r.get("scenario.slope", parse_f64).unwrap_or(*slope);
            *radius = r.positive("scenario.radius", None).unwrap_or(*radius);
        }
        Scenario::SteepEquidistantGraph { amplitude, rate, radius } => {
            *amplitude = r.get("scenario.amplitude", parse_f64).unwrap_or(*amplitude);
            *rate = r.positive("scenario.rate", None).unwrap_or(*rate);
            *radius = r.positive("scenario.radius", None).unwrap_or(*radius);
        }
        Scenario::GeodesicSphere { radius } | Scenario::Slice { radius } => {
            *radius = r.positive("scenario.radius", None).unwrap_or(*radius);
        }
    }
    let d = CounterflowSettings::default();
    let m = r.get("counterflow.multiplicity", parse_usize);
    let multiplicity = r.check("counterflow.multiplicity", m, |m| m >= 2, "hypersurfaces of dimension >= 2");
    let nodes = r.get("counterflow.nodes", parse_usize);
    let nodes = r.check("counterflow.nodes", nodes, |n| n >= MIN_RESOLUTION, "at least 16 nodes");
    let cfl = r.get("counterflow.cfl", parse_f64);
    let cfl = r.check("counterflow.cfl", cfl, |c| c > 0.0 && c <= 1.0, "in (0, 1]");
    let threshold = r.get("counterflow.threshold", parse_f64);
    let threshold = r.check("counterflow.threshold", threshold, |t| t > 1.0, "v is at least 1, so the threshold must exceed it");
    let ratio = r.get("counterflow.extinction-ratio", parse_f64);
    let extinction_ratio = r.check("counterflow.extinction-ratio", ratio, |x| x > 0.0 && x < 1.0, "in (0, 1)");
    let cadence = r.positive("time.cadence", None);
    let end_time = horizon?;
    let settings = CounterflowSettings {
        multiplicity: multiplicity.unwrap_or(d.multiplicity),
        nodes: nodes.unwrap_or(d.nodes),
        end_time,
        cadence: cadence.unwrap_or(end_time / DEFAULT_CURVE_SAMPLES),
        cfl: cfl.unwrap_or(d.cfl),
        threshold: threshold.unwrap_or(d.threshold),
        extinction_ratio: extinction_ratio.unwrap_or(d.extinction_ratio),
    };
    Some(CounterexampleConfig { scenario, settings, snapshots })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_TORUS: &str = "base = flat-torus\nwarp = one\ngrid.resolution = 32\ninitial = sinusoid\ninitial.amplitude = 0.8\ntime.horizon = 2\n";

    fn flow_of(c: RunConfig) -> FlowConfig {
        match c.run {
            RunKind::Flow(f) => f,
            RunKind::Counterexample(_) => panic!("expected a flow config"),
        }
    }

    #[test]
    fn minimal_torus_gets_defaults() {
        let f = flow_of(parse_config(MINIMAL_TORUS).unwrap());
        assert_eq!(f.settings.scheme, Scheme::Euler);
        assert_eq!(f.settings.dt_policy, DtPolicy::Cfl { fraction: 0.4 });
        assert_eq!(f.settings.schedule, SampleSchedule::Uniform { cadence: 2.0 / 50.0 });
        assert_eq!(f.grid, Grid::Torus { n: [32, 32], lengths: [std::f64::consts::TAU; 2] });
        assert_eq!(f.monitors.len(), 4);
        assert!(f.refine && f.snapshots && f.nu_shift == 0.0);
    }

    #[test]
    fn polar_base_needs_radius() {
        let text = "base = \"hyperbolic-polar\"\nwarp = cosh-r\ngrid.resolution = 32\ninitial = constant\ninitial.value = 0\ntime.horizon = 1\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.0.len(), 1, "{e}");
        assert_eq!(e.0[0].kind, IssueKind::MissingField);
        assert_eq!(e.0[0].path, "grid.radius");
    }

    #[test]
    fn negative_horizon_rejected() {
        let e = parse_config(&MINIMAL_TORUS.replace("time.horizon = 2", "time.horizon = -1")).unwrap_err();
        assert!(e.mentions("time.horizon"));
        assert_eq!(e.0[0].kind, IssueKind::InvalidValue);
    }

    #[test]
    fn all_issues_collected() {
        let text = "base = flat-torus\nwarp = cosh-r\ngrid.resolution = 8\ninitial = sinusoid\ntime.horizon = abc\ngrid.radus = 3\nnonsense\n";
        let e = parse_config(text).unwrap_err();
        let kinds: Vec<(IssueKind, &str)> = e.0.iter().map(|i| (i.kind, i.path.as_str())).collect();
        assert!(kinds.contains(&(IssueKind::InvalidValue, "warp")), "{e}");
        assert!(kinds.contains(&(IssueKind::InvalidValue, "grid.resolution")), "{e}");
        assert!(kinds.contains(&(IssueKind::MissingField, "initial.amplitude")), "{e}");
        assert!(kinds.contains(&(IssueKind::TypeMismatch, "time.horizon")), "{e}");
        assert!(kinds.contains(&(IssueKind::UnknownKey, "grid.radus")), "{e}");
        assert!(kinds.contains(&(IssueKind::Syntax, "nonsense")), "{e}");
        let unknown = e.0.iter().find(|i| i.path == "grid.radus").unwrap();
        assert!(unknown.hint.contains("grid.radius"));
    }

    #[test]
    fn irrelevant_and_duplicate_keys_flagged() {
        let text = format!("{MINIMAL_TORUS}grid.radius = 3\nwarp = one\n");
        let e = parse_config(&text).unwrap_err();
        assert!(e.0.iter().any(|i| i.kind == IssueKind::NotApplicable && i.path == "grid.radius"), "{e}");
        assert!(e.0.iter().any(|i| i.kind == IssueKind::DuplicateKey && i.path == "warp"), "{e}");
    }

    #[test]
    fn decay_needs_ceiling() {
        let text = format!("{MINIMAL_TORUS}monitors = gradient, decay\n");
        let e = parse_config(&text).unwrap_err();
        assert!(e.mentions("monitor.decay.ceiling"));
        let e = parse_config(&format!("{MINIMAL_TORUS}monitors = gradient, speed\n")).unwrap_err();
        assert!(e.0[0].hint.contains("graph-property"));
    }

    #[test]
    fn scenario_routes_to_profile_curve() {
        let c = parse_config("scenario = tilted-disc\ntime.horizon = 0.5\ncounterflow.nodes = 64\n").unwrap();
        match c.run {
            RunKind::Counterexample(x) => {
                assert_eq!(x.scenario, Scenario::TiltedDisc { slope: 1.0, radius: 3.0 });
                assert_eq!(x.settings.nodes, 64);
                assert_eq!(x.settings.cadence, 0.005);
            }
            RunKind::Flow(_) => panic!("scenario key ignored"),
        }
        let e = parse_config("scenario = sphere\ntime.horizon = 1\ngrid.resolution = 32\n").unwrap_err();
        assert!(e.mentions("scenario") && e.mentions("grid.resolution"));
    }

    #[test]
    fn overrides_replace_values() {
        let over = vec![("grid.resolution".to_string(), "64".to_string())];
        let f = flow_of(parse_config_in(MINIMAL_TORUS, Path::new("."), &over).unwrap());
        assert_eq!(f.grid, Grid::Torus { n: [64, 64], lengths: [std::f64::consts::TAU; 2] });
    }

    #[test]
    fn tabulated_profile_read_relative_to_dir() {
        let dir = tempfile::tempdir().unwrap();
        let mut table = String::from("r,f\n");
        for k in 0..=60 {
            let r = 0.05 * k as f64;
            table.push_str(&format!("{r},{}\n", r.sinh()));
        }
        fs::write(dir.path().join("sinh.csv"), table).unwrap();
        let text = "base = rotational\nbase.profile = sinh.csv\nwarp = one\ngrid.resolution = 16\ngrid.radius = 2\ninitial = constant\ninitial.value = 1\ntime.horizon = 1\n";
        let f = flow_of(parse_config_in(text, dir.path(), &[]).unwrap());
        assert_eq!(f.base.key(), "rotational");
        let e = parse_config_in(&text.replace("sinh.csv", "missing.csv"), dir.path(), &[]).unwrap_err();
        assert!(e.mentions("base.profile"));
    }
}

//! Scenario configs, figure presets and the artifact writer behind the
//! `openmap` binary.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{a1_shift_metric, discord, g2_of_trajectory, two_qubit_cut, Measured};
use crate::dynamics::{trajectory, TimeGrid, Trajectory};
use crate::maps::{classify, extract_map, MapClass, MapTag, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::models::{ModelParams, Topology};
use crate::states::{build_initial, catalogue, lookup, InitialStateSpec, StateFamily};

/// Tolerance for every value checked before it is written.
pub const WRITE_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot parse config: {0}")]
    ConfigParse(String),
    #[error("invalid config at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("numerical invariant violated: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigParse(_) | CliError::ConfigInvalid { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    fn invalid(path: &str, message: impl Into<String>) -> Self {
        CliError::ConfigInvalid {
            path: path.to_owned(),
            message: message.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Trajectory,
    MapEigenvalues,
    Classification,
    Correlation,
    Discord,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Output::Trajectory,
        Output::MapEigenvalues,
        Output::Classification,
        Output::Correlation,
        Output::Discord,
    ];
}

/// A catalogue state by name, or explicit fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum StateRef {
    Named(String),
    Explicit(InitialStateSpec),
}

impl StateRef {
    pub fn resolve(&self) -> Option<InitialStateSpec> {
        match self {
            StateRef::Named(name) => lookup(name).map(|s| s.spec),
            StateRef::Explicit(spec) => Some(spec.clone()),
        }
    }

    fn label(&self) -> String {
        match self {
            StateRef::Named(name) => lookup(name).map(|s| s.label).unwrap_or_else(|| name.clone()),
            StateRef::Explicit(spec) => describe_spec(spec),
        }
    }
}

fn describe_spec(spec: &InitialStateSpec) -> String {
    let bath = "1".repeat(spec.bath_suffix);
    match &spec.family {
        StateFamily::Pure { bits } => format!("|{bits}{bath}>"),
        StateFamily::Entangled { alpha0, alpha1 } => format!("{alpha0}|01{bath}>+{alpha1}|10{bath}>"),
        StateFamily::Mixture { p, .. } => format!("mixture p={p}"),
        StateFamily::Tilted { a1, a3, partner } => format!("rho1({a1},{a3}) partner={partner:?} bath={}", spec.bath_suffix),
    }
}

/// A fully resolved scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub params: ModelParams,
    pub topology: Topology,
    pub initial_state: StateRef,
    pub grid: TimeGrid,
    pub outputs: BTreeSet<Output>,
    /// Seed of the random-state probe used by classification.
    pub seed: u64,
    pub samples: usize,
}

impl ScenarioConfig {
    fn new(name: &str, params: ModelParams, topology: Topology, state: &str, grid: TimeGrid, outputs: &[Output]) -> Self {
        Self {
            name: name.to_owned(),
            params,
            topology,
            initial_state: StateRef::Named(state.to_owned()),
            grid,
            outputs: outputs.iter().copied().collect(),
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
        }
    }

    pub fn initial_spec(&self) -> Result<InitialStateSpec, CliError> {
        self.initial_state
            .resolve()
            .ok_or_else(|| CliError::invalid("initial_state", format!("unknown state preset {:?}", self.initial_state)))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(CliError::invalid("name", "must be a nonempty file-name-safe string"));
        }
        if !self.params.is_finite() {
            return Err(CliError::invalid("params", "all parameters must be finite"));
        }
        self.grid
            .validate()
            .map_err(|e| CliError::invalid("grid", e.to_string()))?;
        if self.outputs.is_empty() {
            return Err(CliError::invalid("outputs", "at least one output is required"));
        }
        let spec = self.initial_spec()?;
        build_initial(&spec, self.topology).map_err(|e| CliError::invalid("initial_state", e.to_string()))?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn input_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("serializable config");
        hex::encode(Sha256::digest(&json))
    }

    /// One line of the preset listing.
    pub fn summary(&self) -> String {
        let p = &self.params;
        let mut line = format!(
            "{}: epsilon={}, varepsilon={}, V={}",
            self.name, p.epsilon, p.varepsilon_k0, p.v
        );
        if self.topology != Topology::Closed {
            let _ = write!(line, ", Jzz={}", coupling_label(p.j_zz));
        }
        let _ = write!(
            line,
            ", state={}, topology={}, t=[{},{}]x{}",
            self.initial_state.label(),
            self.topology,
            self.grid.start,
            self.grid.end,
            self.grid.steps
        );
        line
    }
}

fn coupling_label(j: f64) -> String {
    let inv = 1.0 / j;
    if j > 0.0 && j < 1.0 && (inv - inv.round()).abs() < 1e-9 {
        format!("1/{}", inv.round())
    } else {
        format!("{j}")
    }
}

/// Every named scenario.
pub fn presets() -> Vec<ScenarioConfig> {
    let closed = ModelParams::new(-8.0, -2.0, 4.0);
    let fig1 = ModelParams::new(8.0, -2.0, 4.0);
    let weak = closed.with_j_zz(0.1);
    let strong = closed.with_j_zz(8.0);
    let grid = TimeGrid::default();
    let dense = TimeGrid::dense(0.0, 0.9);
    let all = &Output::ALL;
    let mut out = vec![
        ScenarioConfig::new("fig1", fig1, Topology::Closed, "fig1", grid, all),
        ScenarioConfig::new("fig2", strong, Topology::BathTwoOnQubit2, "fig2", grid, all),
        ScenarioConfig::new("fig3", weak, Topology::BathOneOnBoth, "fig3", grid, all),
        ScenarioConfig::new("fig4", closed, Topology::Closed, "fig4", grid, all),
        ScenarioConfig::new("fig4-text", closed, Topology::Closed, "fig4-text", grid, all),
        ScenarioConfig::new("fig5", weak, Topology::BathTwoOnQubit2, "fig5", grid, all),
        ScenarioConfig::new("fig6", weak, Topology::BathOneOnBoth, "fig6", grid, all),
        ScenarioConfig::new("pic1", closed, Topology::Closed, "fig1", dense, &[Output::Trajectory]),
        ScenarioConfig::new("pic2", closed, Topology::Closed, "fig4", dense, &[Output::Trajectory]),
        ScenarioConfig::new("corr1", weak, Topology::BathOneOnBoth, "fig3", grid, &[Output::Correlation]),
        ScenarioConfig::new("corr2", strong, Topology::BathTwoOnQubit2, "fig2", grid, &[Output::Correlation]),
        ScenarioConfig::new("corr3", closed, Topology::Closed, "fig4", grid, &[Output::Correlation]),
    ];
    for state in catalogue().into_iter().filter(|s| s.name.starts_with('A')) {
        let topo = state.natural_topology();
        let params = match topo {
            Topology::Closed => closed,
            Topology::BathTwoOnQubit2 => strong,
            Topology::BathOneOnBoth => weak,
        };
        out.push(ScenarioConfig::new(state.name, params, topo, state.name, grid, all));
    }
    out
}

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    presets().into_iter().find(|p| p.name == name)
}

pub fn list_presets() -> String {
    presets().iter().map(|p| p.summary() + "\n").collect()
}

/// On-disk config. With `preset` set, every other key overrides the preset.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    name: Option<String>,
    params: Option<ModelParams>,
    topology: Option<Topology>,
    initial_state: Option<serde_json::Value>,
    grid: Option<TimeGrid>,
    outputs: Option<Vec<Output>>,
    seed: Option<u64>,
    samples: Option<usize>,
}

fn parse_state(value: serde_json::Value) -> Result<StateRef, CliError> {
    match value {
        serde_json::Value::String(name) => {
            if lookup(&name).is_none() {
                return Err(CliError::invalid("initial_state", format!("unknown state preset {name:?}")));
            }
            Ok(StateRef::Named(name))
        }
        other => serde_path_to_error::deserialize::<_, InitialStateSpec>(other)
            .map(StateRef::Explicit)
            .map_err(|e| CliError::invalid(&join_path("initial_state", &e.path().to_string()), e.inner().to_string())),
    }
}

fn join_path(prefix: &str, rest: &str) -> String {
    if rest.is_empty() || rest == "." {
        prefix.to_owned()
    } else {
        format!("{prefix}.{rest}")
    }
}

/// Parses and validates a JSON scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_data() {
            CliError::invalid(&path, inner.to_string())
        } else {
            CliError::ConfigParse(inner.to_string())
        }
    })?;

    let base = match &raw.preset {
        Some(name) => Some(preset(name).ok_or_else(|| CliError::invalid("preset", format!("unknown preset {name:?}")))?),
        None => None,
    };
    let missing = |field: &str| CliError::invalid(field, "required when no preset is named");
    let initial_state = match raw.initial_state {
        Some(v) => parse_state(v)?,
        None => base.as_ref().map(|b| b.initial_state.clone()).ok_or_else(|| missing("initial_state"))?,
    };
    let cfg = ScenarioConfig {
        name: raw
            .name
            .or_else(|| base.as_ref().map(|b| b.name.clone()))
            .ok_or_else(|| missing("name"))?,
        params: raw.params.or(base.as_ref().map(|b| b.params)).ok_or_else(|| missing("params"))?,
        topology: raw.topology.or(base.as_ref().map(|b| b.topology)).ok_or_else(|| missing("topology"))?,
        initial_state,
        grid: raw.grid.or(base.as_ref().map(|b| b.grid)).unwrap_or_default(),
        outputs: match raw.outputs {
            Some(list) => list.into_iter().collect(),
            None => base
                .as_ref()
                .map(|b| b.outputs.clone())
                .unwrap_or_else(|| Output::ALL.into_iter().collect()),
        },
        seed: raw.seed.or(base.as_ref().map(|b| b.seed)).unwrap_or(DEFAULT_SEED),
        samples: raw.samples.or(base.as_ref().map(|b| b.samples)).unwrap_or(DEFAULT_SAMPLES),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Reads a config file. A path that does not exist but names a preset runs
/// that preset.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    match fs::read_to_string(path) {
        Ok(text) => parse_config(&text),
        Err(err) => {
            if err.kind() == std::io::ErrorKind::NotFound {
                if let Some(p) = path.to_str().and_then(preset) {
                    return Ok(p);
                }
            }
            Err(CliError::io(path, err))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub input_hash: String,
    pub files: Vec<String>,
    pub library_version: String,
    pub duration_seconds: f64,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self { dir, files: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.push(name.to_owned());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(name, &text)
    }
}

#[derive(Serialize)]
struct TimedClass<'a> {
    t: f64,
    choi_eigenvalues: &'a [f64],
    class: &'a MapClass,
}

#[derive(Serialize)]
struct ClassificationReport<'a> {
    scenario: &'a str,
    domain_bloch: crate::BlochVector,
    overall: MapTag,
    min_eigenvalue: f64,
    samples: Vec<TimedClass<'a>>,
}

fn check_states(traj: &Trajectory) -> Result<(), CliError> {
    for s in &traj.samples {
        let chk = s.reduced_state.check();
        if !chk.passes(WRITE_TOL, WRITE_TOL, WRITE_TOL) {
            return Err(CliError::Numerical(format!("reduced state at t = {} fails validation: {chk:?}", s.t)));
        }
    }
    Ok(())
}

/// Runs one scenario and writes its artifacts into `dir`.
pub fn execute(cfg: &ScenarioConfig, dir: &Path) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    cfg.validate()?;
    let spec = cfg.initial_spec()?;
    let traj = trajectory(&spec, &cfg.params, cfg.topology, &cfg.grid)?;
    check_states(&traj)?;
    let mut w = Writer::new(dir)?;

    if cfg.outputs.contains(&Output::Trajectory) {
        let mut csv = String::from("t,ax,ay,az\n");
        for s in &traj.samples {
            let b = s.bloch;
            let _ = writeln!(csv, "{},{},{},{}", num(s.t), num(b.x), num(b.y), num(b.z));
        }
        w.write("trajectory.csv", &csv)?;
    }

    if cfg.outputs.contains(&Output::MapEigenvalues) || cfg.outputs.contains(&Output::Classification) {
        let domain = [traj.initial_reduced()];
        let maps = traj
            .samples
            .par_iter()
            .map(|s| {
                let b = extract_map(&traj, &traj.initial_bloch, s.t)?;
                if (b.trace() - 2.0).abs() > WRITE_TOL {
                    return Err(crate::Error::InvalidState(format!("Choi trace {} at t = {}", b.trace(), s.t)));
                }
                let class = classify(&b, &domain, cfg.samples, cfg.seed)?;
                Ok((b, class))
            })
            .collect::<crate::Result<Vec<_>>>()?;

        if cfg.outputs.contains(&Output::MapEigenvalues) {
            let mut csv = String::from("t,lambda1,lambda2,lambda3,lambda4,b1,b2,b3,classification\n");
            for (s, (b, class)) in traj.samples.iter().zip(&maps) {
                let ev = b.eigenvalues();
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{}",
                    num(s.t),
                    num(ev[0]),
                    num(ev[1]),
                    num(ev[2]),
                    num(ev[3]),
                    num(s.bloch.x),
                    num(s.bloch.y),
                    num(s.bloch.z),
                    class.tag.as_str()
                );
            }
            w.write("eigenvalues.csv", &csv)?;
        }

        if cfg.outputs.contains(&Output::Classification) {
            let overall = maps.iter().map(|(_, c)| c.tag).max_by_key(|t| *t as u8).expect("nonempty grid");
            let min_eigenvalue = maps.iter().map(|(b, _)| b.min_eigenvalue()).fold(f64::INFINITY, f64::min);
            let report = ClassificationReport {
                scenario: &cfg.name,
                domain_bloch: traj.initial_bloch,
                overall,
                min_eigenvalue,
                samples: traj
                    .samples
                    .iter()
                    .zip(&maps)
                    .map(|(s, (b, class))| TimedClass {
                        t: s.t,
                        choi_eigenvalues: b.eigenvalues(),
                        class,
                    })
                    .collect(),
            };
            w.json("classification.json", &report)?;
        }
    }

    if cfg.outputs.contains(&Output::Correlation) {
        let series = g2_of_trajectory(&traj)?;
        let mut csv = String::from("t,g2\n");
        for (t, g) in &series.samples {
            let _ = writeln!(csv, "{},{}", num(*t), num(*g));
        }
        w.write("correlation.csv", &csv)?;
    }

    if cfg.outputs.contains(&Output::Discord) {
        let cut = two_qubit_cut(&traj.initial_state)?;
        let result = discord(&cut, Measured::Environment)?;
        if result.value < -1e-9 {
            return Err(CliError::Numerical(format!("negative discord {}", result.value)));
        }
        w.json("discord.json", &result)?;
    }

    let mut manifest = RunManifest {
        scenario: cfg.name.clone(),
        input_hash: cfg.input_hash(),
        files: w.files.clone(),
        library_version: env!("CARGO_PKG_VERSION").to_owned(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    manifest.files.push("manifest.json".into());
    w.json("manifest.json", &manifest)?;
    Ok(manifest)
}

/// Output directory: explicit, `$OPENMAP_OUT`, or `./openmap-out`.
pub fn output_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os("OPENMAP_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("openmap-out"))
}

/// Fields accepted by [`sweep`].
pub const SWEEP_FIELDS: [&str; 7] = ["epsilon", "varepsilon_k0", "v", "j_zz", "a1", "a3", "p"];

fn with_field(cfg: &ScenarioConfig, field: &str, value: f64) -> Result<ScenarioConfig, CliError> {
    let mut out = cfg.clone();
    out.name = format!("{}-{field}={value}", cfg.name);
    match field {
        "epsilon" => out.params.epsilon = value,
        "varepsilon_k0" => out.params.varepsilon_k0 = value,
        "v" => out.params.v = value,
        "j_zz" => out.params.j_zz = value,
        "a1" | "a3" | "p" => {
            let mut spec = cfg.initial_spec()?;
            match (&mut spec.family, field) {
                // a1 sweeps keep rho_1 pure.
                (StateFamily::Tilted { a1, a3, .. }, "a1") => {
                    *a1 = value;
                    *a3 = (1.0 - value * value).max(0.0).sqrt();
                }
                (StateFamily::Tilted { a3, .. }, "a3") => *a3 = value,
                (StateFamily::Mixture { p, .. }, "p") => *p = value,
                _ => {
                    return Err(CliError::invalid(
                        "vary",
                        format!("field {field} does not apply to initial state {:?}", cfg.initial_state),
                    ))
                }
            }
            out.initial_state = StateRef::Explicit(spec);
        }
        other => {
            return Err(CliError::invalid(
                "vary",
                format!("unknown field {other:?}; expected one of {}", SWEEP_FIELDS.join(", ")),
            ))
        }
    }
    out.validate()?;
    Ok(out)
}

/// Runs `cfg` once per value of `field`, each into its own subdirectory, and
/// writes a combined `sweep.csv` of the g2 series. An `a1` sweep also writes
/// `shift_metric.csv`.
pub fn sweep(cfg: &ScenarioConfig, field: &str, values: &[f64], dir: &Path) -> Result<RunManifest, CliError> {
    let started = Instant::now();
    if values.is_empty() {
        return Err(CliError::invalid("values", "at least one value is required"));
    }
    let variants = values
        .iter()
        .map(|&v| with_field(cfg, field, v))
        .collect::<Result<Vec<_>, _>>()?;

    let runs = variants
        .par_iter()
        .map(|variant| {
            let sub = dir.join(&variant.name);
            let manifest = execute(variant, &sub)?;
            let spec = variant.initial_spec()?;
            let traj = trajectory(&spec, &variant.params, variant.topology, &variant.grid)?;
            Ok((manifest, g2_of_trajectory(&traj)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut w = Writer::new(dir)?;
    let mut csv = String::from("t");
    for v in values {
        let _ = write!(csv, ",g2[{field}={v}]");
    }
    csv.push('\n');
    let times = &runs[0].1.samples;
    for (i, (t, _)) in times.iter().enumerate() {
        csv.push_str(&num(*t));
        for (_, series) in &runs {
            let _ = write!(csv, ",{}", num(series.samples[i].1));
        }
        csv.push('\n');
    }
    w.write("sweep.csv", &csv)?;

    if field == "a1" {
        let a3: Vec<f64> = values.iter().map(|a| (1.0 - a * a).max(0.0).sqrt()).collect();
        let metric = a1_shift_metric(&cfg.params, values, &a3, &cfg.grid)?;
        let mut csv = String::from("a1,a3,deviation\n");
        for ((a1, dev), a3) in metric.iter().zip(&a3) {
            let _ = writeln!(csv, "{},{},{}", num(*a1), num(*a3), num(*dev));
        }
        w.write("shift_metric.csv", &csv)?;
    }

    let mut files: Vec<String> = runs
        .iter()
        .zip(&variants)
        .flat_map(|((m, _), v)| m.files.iter().map(move |f| format!("{}/{f}", v.name)))
        .collect();
    files.extend(w.files.iter().cloned());
    files.push("manifest.json".into());

    let mut hasher = Sha256::new();
    hasher.update(cfg.input_hash().as_bytes());
    hasher.update(field.as_bytes());
    for v in values {
        hasher.update(v.to_le_bytes());
    }
    let manifest = RunManifest {
        scenario: format!("{}-sweep-{field}", cfg.name),
        input_hash: hex::encode(hasher.finalize()),
        files,
        library_version: env!("CARGO_PKG_VERSION").to_owned(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    w.json("manifest.json", &manifest)?;
    Ok(manifest)
}

/// Parses `START:END:STEPS`.
pub fn parse_grid(text: &str) -> Result<TimeGrid, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::invalid("grid", format!("expected START:END:STEPS, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let start = parts[0].trim().parse().map_err(|_| bad())?;
    let end = parts[1].trim().parse().map_err(|_| bad())?;
    let steps = parts[2].trim().parse().map_err(|_| bad())?;
    TimeGrid::new(start, end, steps).map_err(|e| CliError::invalid("grid", e.to_string()))
}

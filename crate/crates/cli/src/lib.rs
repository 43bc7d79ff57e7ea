//! Experiment runner behind the `cohfeed` binary.
//!
//! Each subcommand takes an [`ExperimentConfig`] built from an optional JSON
//! config file with command-line flags layered on top, and writes CSV files
//! into the output directory. Floats are written with 17 significant digits.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{Map, Value};
use thiserror::Error;

use cohfeed::analysis::{asymptotic_fidelity, ASYMPTOTIC_STEP_CAP, ASYMPTOTIC_TOL};
use cohfeed::io::{parse_channel, parse_state, StateFile};
use cohfeed::noise::{mean_fidelity, noisy_trajectory, NoiseKind, NoiseModel, SeededStream};
use cohfeed::registry::{parse_angle, ChannelSpec};
use cohfeed::{ChannelReport, DensityOperator, KrausChannel, Observables, PureState, Trajectory, C64};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "COHFEED_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] cohfeed::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// How a successful run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// The command ran but its verdict was negative (a channel failed verification).
    Negative,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative => 1,
        }
    }
}

/// Exit code for input and I/O errors.
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Converge,
    NoiseSweep,
    Pairwise,
    Bell,
}

/// Settings shared by all subcommands; unset fields fall back to per-command defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub channel: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub target: Option<String>,
    pub initial: Vec<String>,
    pub steps: Option<usize>,
    pub lambda: Vec<f64>,
    pub sigma: Vec<f64>,
    pub kind: Option<NoiseKind>,
    pub trajectories: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Reads a JSON config file. Relative paths inside it stay relative to the working directory.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::Input("config: expected a JSON object".into()))?;
        const KEYS: [&str; 11] = [
            "channel",
            "params",
            "target",
            "initial",
            "steps",
            "lambda",
            "sigma",
            "kind",
            "trajectories",
            "seed",
            "out",
        ];
        if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::Input(format!("config: unknown field `{k}`")));
        }
        let mut cfg = ExperimentConfig::default();
        if let Some(v) = obj.get("channel") {
            cfg.channel = Some(string_field(v, "channel")?);
        }
        if let Some(v) = obj.get("params") {
            let map = v
                .as_object()
                .ok_or_else(|| CliError::Input("config field `params`: expected an object".into()))?;
            for (k, x) in map {
                cfg.params.insert(k.clone(), number_field(x, &format!("params.{k}"))?);
            }
        }
        if let Some(v) = obj.get("target") {
            cfg.target = Some(string_field(v, "target")?);
        }
        if let Some(v) = obj.get("initial") {
            cfg.initial = match v {
                Value::Array(items) => items
                    .iter()
                    .enumerate()
                    .map(|(i, x)| string_field(x, &format!("initial[{i}]")))
                    .collect::<CliResult<_>>()?,
                other => vec![string_field(other, "initial")?],
            };
        }
        cfg.steps = optional_count(obj, "steps")?;
        cfg.lambda = number_list(obj, "lambda")?;
        cfg.sigma = number_list(obj, "sigma")?;
        if let Some(v) = obj.get("kind") {
            cfg.kind = Some(
                string_field(v, "kind")?
                    .parse()
                    .map_err(|e: cohfeed::Error| CliError::Input(format!("config field `kind`: {e}")))?,
            );
        }
        cfg.trajectories = optional_count(obj, "trajectories")?;
        if let Some(v) = obj.get("seed") {
            cfg.seed = Some(
                v.as_u64()
                    .ok_or_else(|| CliError::Input("config field `seed`: expected a nonnegative integer".into()))?,
            );
        }
        if let Some(v) = obj.get("out") {
            cfg.out = Some(PathBuf::from(string_field(v, "out")?));
        }
        Ok(cfg)
    }

    /// Overlays every field set in `flags`; flag values win.
    pub fn merge(mut self, flags: ExperimentConfig) -> Self {
        if flags.channel.is_some() {
            self.channel = flags.channel;
        }
        self.params.extend(flags.params);
        if flags.target.is_some() {
            self.target = flags.target;
        }
        if !flags.initial.is_empty() {
            self.initial = flags.initial;
        }
        if flags.steps.is_some() {
            self.steps = flags.steps;
        }
        if !flags.lambda.is_empty() {
            self.lambda = flags.lambda;
        }
        if !flags.sigma.is_empty() {
            self.sigma = flags.sigma;
        }
        if flags.kind.is_some() {
            self.kind = flags.kind;
        }
        if flags.trajectories.is_some() {
            self.trajectories = flags.trajectories;
        }
        if flags.seed.is_some() {
            self.seed = flags.seed;
        }
        if flags.out.is_some() {
            self.out = flags.out;
        }
        self
    }

    /// `out`, else the environment default, else the working directory.
    pub fn output_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

fn string_field(v: &Value, field: &str) -> CliResult<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| CliError::Input(format!("config field `{field}`: expected a string")))
}

fn number_field(v: &Value, field: &str) -> CliResult<f64> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| CliError::Input(format!("config field `{field}`: not representable"))),
        Value::String(s) => parse_angle(s).map_err(|e| CliError::Input(format!("config field `{field}`: {e}"))),
        _ => Err(CliError::Input(format!("config field `{field}`: expected a number"))),
    }
}

fn number_list(obj: &Map<String, Value>, field: &str) -> CliResult<Vec<f64>> {
    match obj.get(field) {
        None => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, x)| number_field(x, &format!("{field}[{i}]")))
            .collect(),
        Some(other) => Ok(vec![number_field(other, field)?]),
    }
}

fn optional_count(obj: &Map<String, Value>, field: &str) -> CliResult<Option<usize>> {
    obj.get(field)
        .map(|v| {
            v.as_u64()
                .map(|n| n as usize)
                .ok_or_else(|| CliError::Input(format!("config field `{field}`: expected a nonnegative integer")))
        })
        .transpose()
}

/// Formats a float for CSV output with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Resolves a state name or file path in a space of dimension `dim`.
///
/// Names: `0`, `1`, `+`, `-`, `+i`, `-i` (qubit); `uu`, `ud`, `du`, `dd`,
/// `phi+` (two qubits, `u` = `|0⟩`); `kN` for the N-th basis state; `mixed`.
pub fn resolve_state(text: &str, dim: usize) -> CliResult<StateFile> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let need = |d: usize| -> CliResult<()> {
        if d == dim {
            Ok(())
        } else {
            Err(CliError::Input(format!("state '{text}' has dimension {d}, the channel acts on {dim}")))
        }
    };
    let pure = |amps: Vec<C64>| -> CliResult<StateFile> { Ok(StateFile::Pure(PureState::new(amps)?)) };
    let c = |re: f64, im: f64| C64::new(re, im);
    match text {
        "0" | "1" => {
            need(2)?;
            Ok(StateFile::Pure(PureState::basis(2, (text == "1") as usize)))
        }
        "+" => {
            need(2)?;
            Ok(StateFile::Pure(PureState::plus()))
        }
        "-" => {
            need(2)?;
            pure(vec![c(h, 0.0), c(-h, 0.0)])
        }
        "+i" => {
            need(2)?;
            pure(vec![c(h, 0.0), c(0.0, h)])
        }
        "-i" => {
            need(2)?;
            pure(vec![c(h, 0.0), c(0.0, -h)])
        }
        "uu" | "ud" | "du" | "dd" => {
            need(4)?;
            let idx = ["uu", "ud", "du", "dd"].iter().position(|s| *s == text).unwrap();
            Ok(StateFile::Pure(PureState::basis(4, idx)))
        }
        "phi+" => {
            need(4)?;
            Ok(StateFile::Pure(PureState::phi_plus()))
        }
        "mixed" => Ok(StateFile::Mixed(DensityOperator::maximally_mixed(dim))),
        _ => {
            if let Some(idx) = text.strip_prefix('k').and_then(|n| n.parse::<usize>().ok()) {
                if idx >= dim {
                    return Err(CliError::Input(format!("basis index {idx} out of range for dimension {dim}")));
                }
                return Ok(StateFile::Pure(PureState::basis(dim, idx)));
            }
            let path = Path::new(text);
            if !path.exists() {
                return Err(CliError::Input(format!("'{text}' is neither a known state name nor an existing file")));
            }
            let body = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let state = parse_state(&body).map_err(|e| CliError::Input(format!("{text}: {e}")))?;
            need(state.dim())?;
            Ok(state)
        }
    }
}

/// File-name-safe label for a state argument.
pub fn state_label(text: &str) -> String {
    match text {
        "+" => "plus".into(),
        "-" => "minus".into(),
        "+i" => "plus_i".into(),
        "-i" => "minus_i".into(),
        "phi+" => "phi_plus".into(),
        _ => {
            let stem = Path::new(text)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| text.to_string());
            stem.chars().map(|ch| if ch.is_ascii_alphanumeric() { ch } else { '_' }).collect()
        }
    }
}

/// A channel together with the target it is meant to reach.
pub struct ResolvedChannel {
    pub channel: KrausChannel,
    pub target: PureState,
}

fn registry_spec(name: &str, params: &BTreeMap<String, f64>) -> CliResult<Option<ChannelSpec>> {
    let mut spec = ChannelSpec::parse(name)?;
    if !spec.is_registered() {
        return Ok(None);
    }
    spec.params.extend(params.iter().map(|(k, v)| (k.clone(), *v)));
    Ok(Some(spec))
}

/// Builds the channel named by `channel` (registry name or JSON file) and its target.
///
/// `lambda`, when given, overrides the registry parameter of the same name.
pub fn resolve_channel(
    channel: &str,
    params: &BTreeMap<String, f64>,
    lambda: Option<f64>,
    target: Option<&str>,
) -> CliResult<ResolvedChannel> {
    if let Some(mut spec) = registry_spec(channel, params)? {
        if let Some(l) = lambda {
            spec.params.insert("lambda".into(), l);
        }
        // The natural target fixes the dimension that named target states are resolved in.
        let (natural_channel, natural_target) = spec.build()?;
        let Some(t) = target else {
            return Ok(ResolvedChannel {
                channel: natural_channel,
                target: natural_target,
            });
        };
        let requested = pure_target(t, natural_target.dim())?;
        let (channel, target) = spec.build_with_target(Some(&requested))?;
        return Ok(ResolvedChannel { channel, target });
    }
    let path = Path::new(channel);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "'{channel}' is neither a registered channel ({}) nor an existing file",
            cohfeed::registry::CHANNEL_NAMES.join(", ")
        )));
    }
    if lambda.is_some() || !params.is_empty() {
        return Err(CliError::Input("--lambda and --param apply only to registered channels".into()));
    }
    let body = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let channel = parse_channel(&body).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let t = target.ok_or_else(|| CliError::Input("a channel file needs --target".into()))?;
    let target = pure_target(t, channel.dim())?;
    Ok(ResolvedChannel { channel, target })
}

fn pure_target(text: &str, dim: usize) -> CliResult<PureState> {
    resolve_state(text, dim)?
        .into_pure()
        .ok_or_else(|| CliError::Input(format!("target '{text}' must be a pure state (mixed targets are not supported)")))
}

fn single_lambda(cfg: &ExperimentConfig) -> CliResult<Option<f64>> {
    match cfg.lambda.as_slice() {
        [] => Ok(None),
        [l] => Ok(Some(*l)),
        _ => Err(CliError::Input("this command takes a single --lambda value".into())),
    }
}

fn prepare_out_dir(cfg: &ExperimentConfig) -> CliResult<PathBuf> {
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

/// Runs one subcommand, printing a short summary to `log`.
pub fn run(command: Command, cfg: &ExperimentConfig, log: &mut dyn std::io::Write) -> CliResult<Outcome> {
    let mut text = String::new();
    let outcome = match command {
        Command::Verify => cmd_verify(cfg, &mut text)?,
        Command::Converge => cmd_converge(cfg, &mut text)?,
        Command::NoiseSweep => cmd_noise_sweep(cfg, &mut text)?,
        Command::Pairwise => cmd_pairwise(cfg, &mut text)?,
        Command::Bell => cmd_bell(cfg, &mut text)?,
    };
    log.write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
    Ok(outcome)
}

/// Renders a verification report as `key: value` lines.
pub fn render_report(report: &ChannelReport) -> String {
    let z: Vec<String> = report
        .eigenvalues_z
        .iter()
        .map(|z| {
            let sign = if z.im.is_sign_negative() { "" } else { "+" };
            format!("{}{sign}{}i", fmt_f64(z.re), fmt_f64(z.im))
        })
        .collect();
    let mut s = String::new();
    let _ = writeln!(s, "dim: {}", report.dim);
    let _ = writeln!(s, "tol: {}", fmt_f64(report.tol));
    let _ = writeln!(s, "completeness_defect: {}", fmt_f64(report.completeness_defect));
    let _ = writeln!(s, "z: [{}]", z.join(", "));
    let _ = writeln!(s, "fixed_point_defect: {}", fmt_f64(report.fixed_point_defect));
    let _ = writeln!(s, "span_rank: {}", report.span_rank);
    let _ = writeln!(s, "gamma_min: {}", fmt_f64(report.gamma.min));
    let _ = writeln!(s, "gamma_max: {}", fmt_f64(report.gamma.max));
    let _ = writeln!(s, "converging: {}", report.converging);
    s
}

fn cmd_verify(cfg: &ExperimentConfig, log: &mut String) -> CliResult<Outcome> {
    let name = cfg
        .channel
        .as_deref()
        .ok_or_else(|| CliError::Input("verify needs --channel".into()))?;
    let resolved = resolve_channel(name, &cfg.params, single_lambda(cfg)?, cfg.target.as_deref())?;
    let report = resolved.channel.verify(&resolved.target)?;
    let rendered = render_report(&report);
    if cfg.out.is_some() {
        let dir = prepare_out_dir(cfg)?;
        let path = dir.join("verify.txt");
        fs::write(&path, &rendered).map_err(|e| CliError::io(&path, e))?;
    }
    log.push_str(&rendered);
    Ok(if report.converging {
        Outcome::Success
    } else {
        Outcome::Negative
    })
}

fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["step", "fidelity", "bx", "by", "bz", "concurrence"])?;
    for r in traj.records() {
        let (bx, by, bz) = match r.bloch {
            Some([x, y, z]) => (fmt_f64(x), fmt_f64(y), fmt_f64(z)),
            None => (String::new(), String::new(), String::new()),
        };
        let conc = r.concurrence.map(fmt_f64).unwrap_or_default();
        w.write_record([r.step.to_string(), fmt_f64(r.fidelity), bx, by, bz, conc])?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

fn converge_into(
    resolved: &ResolvedChannel,
    initial: &[String],
    steps: usize,
    prefix: &str,
    cfg: &ExperimentConfig,
    log: &mut String,
) -> CliResult<()> {
    let dir = prepare_out_dir(cfg)?;
    let dim = resolved.channel.dim();
    let states = initial
        .iter()
        .map(|s| Ok((state_label(s), resolve_state(s, dim)?.to_density())))
        .collect::<CliResult<Vec<_>>>()?;
    let mut seen = std::collections::BTreeSet::new();
    for (label, _) in &states {
        if !seen.insert(label.clone()) {
            return Err(CliError::Input(format!("initial states share the file label '{label}'")));
        }
    }
    let results: Vec<CliResult<(String, Trajectory)>> = states
        .par_iter()
        .map(|(label, rho)| {
            let traj = resolved
                .channel
                .iterate(rho, &resolved.target, steps, Observables::for_dim(dim))?;
            Ok((label.clone(), traj))
        })
        .collect();
    for result in results {
        let (label, traj) = result?;
        let path = dir.join(format!("{prefix}_{label}.csv"));
        write_trajectory_csv(&path, &traj)?;
        let last = traj.last().expect("step 0 is always recorded");
        let _ = writeln!(log, "{}: final fidelity {}", path.display(), fmt_f64(last.fidelity));
    }
    Ok(())
}

fn cmd_converge(cfg: &ExperimentConfig, log: &mut String) -> CliResult<Outcome> {
    let name = cfg.channel.as_deref().unwrap_or("example1");
    let resolved = resolve_channel(name, &cfg.params, single_lambda(cfg)?, cfg.target.as_deref())?;
    let initial = if cfg.initial.is_empty() {
        vec![match resolved.channel.dim() {
            2 => "0".to_string(),
            4 => "uu".to_string(),
            _ => "k1".to_string(),
        }]
    } else {
        cfg.initial.clone()
    };
    converge_into(&resolved, &initial, cfg.steps.unwrap_or(50), "converge", cfg, log)?;
    Ok(Outcome::Success)
}

/// The four initial states of the Bell-target study.
pub const BELL_INITIAL: [&str; 4] = ["uu", "ud", "du", "dd"];

fn cmd_bell(cfg: &ExperimentConfig, log: &mut String) -> CliResult<Outcome> {
    let name = cfg.channel.as_deref().unwrap_or("bell");
    let lambda = single_lambda(cfg)?.or(Some(PI / 5.0)).filter(|_| !cfg.params.contains_key("lambda"));
    let resolved = resolve_channel(name, &cfg.params, lambda, cfg.target.as_deref())?;
    let initial: Vec<String> = if cfg.initial.is_empty() {
        BELL_INITIAL.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.initial.clone()
    };
    converge_into(&resolved, &initial, cfg.steps.unwrap_or(30), "bell", cfg, log)?;
    Ok(Outcome::Success)
}

/// Default λ grid for the noise sweep.
pub fn default_noise_lambdas() -> Vec<f64> {
    vec![PI / 8.0, PI / 4.0, PI / 3.0, PI / 2.0]
}

/// Default σ grid for the noise sweep.
pub const DEFAULT_SIGMAS: [f64; 6] = [0.0, 0.05, 0.1, 0.2, 0.3, 0.5];

/// Mean fidelity of one sweep cell: the average over trajectories `0..count` of
/// each trajectory's mean over steps `1..=steps`.
pub fn noise_cell(
    channel: &KrausChannel,
    target: &PureState,
    rho0: &DensityOperator,
    model: &NoiseModel,
    steps: usize,
    count: usize,
    seed: u64,
) -> cohfeed::Result<f64> {
    let mut total = 0.0;
    for t in 0..count {
        let traj = noisy_trajectory(
            channel,
            model,
            rho0,
            target,
            steps,
            SeededStream::new(seed, t as u64),
            Observables::default(),
        )?;
        total += mean_fidelity(&traj)?;
    }
    Ok(total / count as f64)
}

fn cmd_noise_sweep(cfg: &ExperimentConfig, log: &mut String) -> CliResult<Outcome> {
    let name = cfg.channel.as_deref().unwrap_or("weak-swap");
    let target = cfg.target.as_deref().unwrap_or("+");
    let lambdas = if cfg.lambda.is_empty() {
        default_noise_lambdas()
    } else {
        cfg.lambda.clone()
    };
    let sigmas = if cfg.sigma.is_empty() {
        DEFAULT_SIGMAS.to_vec()
    } else {
        cfg.sigma.clone()
    };
    let kind = cfg.kind.unwrap_or(NoiseKind::Dephasing);
    let steps = cfg.steps.unwrap_or(1000);
    let count = cfg.trajectories.unwrap_or(10);
    let seed = cfg.seed.unwrap_or(0);
    if steps == 0 || count == 0 {
        return Err(CliError::Input("noise-sweep needs --steps ≥ 1 and --trajectories ≥ 1".into()));
    }
    let initial = match cfg.initial.as_slice() {
        [] => "0",
        [one] => one.as_str(),
        _ => return Err(CliError::Input("noise-sweep takes a single --initial state".into())),
    };
    let models = sigmas
        .iter()
        .map(|&s| NoiseModel::new(kind, s))
        .collect::<cohfeed::Result<Vec<_>>>()?;
    let channels = lambdas
        .iter()
        .map(|&l| resolve_channel(name, &cfg.params, Some(l), Some(target)))
        .collect::<CliResult<Vec<_>>>()?;
    let rho0 = resolve_state(initial, channels[0].channel.dim())?.to_density();
    let cells: Vec<(usize, usize)> = (0..lambdas.len())
        .flat_map(|i| (0..sigmas.len()).map(move |j| (i, j)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| {
            let r = &channels[i];
            noise_cell(&r.channel, &r.target, &rho0, &models[j], steps, count, seed)
        })
        .collect::<cohfeed::Result<Vec<f64>>>()?;
    let dir = prepare_out_dir(cfg)?;
    let path = dir.join("noise_sweep.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["lambda", "sigma", "kind", "mean_fidelity", "trajectories", "seed"])?;
    for (&(i, j), value) in cells.iter().zip(&values) {
        w.write_record([
            fmt_f64(lambdas[i]),
            fmt_f64(sigmas[j]),
            kind.to_string(),
            fmt_f64(*value),
            count.to_string(),
            seed.to_string(),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    let _ = writeln!(log, "{}: {} cells, {} steps per trajectory", path.display(), cells.len(), steps);
    Ok(Outcome::Success)
}

/// Default λ grid for the pairwise study: `kπ/20` for `k = 0..=20`.
pub fn default_pairwise_lambdas() -> Vec<f64> {
    (0..=20).map(|k| k as f64 * PI / 20.0).collect()
}

fn cmd_pairwise(cfg: &ExperimentConfig, log: &mut String) -> CliResult<Outcome> {
    let name = cfg.channel.as_deref().unwrap_or("pairwise");
    let lambdas = if cfg.lambda.is_empty() {
        default_pairwise_lambdas()
    } else {
        cfg.lambda.clone()
    };
    let cap = cfg.steps.unwrap_or(ASYMPTOTIC_STEP_CAP);
    if cap == 0 {
        return Err(CliError::Input("pairwise needs a step cap ≥ 1".into()));
    }
    let initial = match cfg.initial.as_slice() {
        [] => "k0",
        [one] => one.as_str(),
        _ => return Err(CliError::Input("pairwise takes a single --initial state".into())),
    };
    let channels = lambdas
        .iter()
        .map(|&l| resolve_channel(name, &cfg.params, Some(l), cfg.target.as_deref()))
        .collect::<CliResult<Vec<_>>>()?;
    let rho0 = resolve_state(initial, channels[0].channel.dim())?.to_density();
    let results = channels
        .par_iter()
        .map(|r| asymptotic_fidelity(&r.channel, &rho0, &r.target, ASYMPTOTIC_TOL, cap))
        .collect::<cohfeed::Result<Vec<_>>>()?;
    let dir = prepare_out_dir(cfg)?;
    let path = dir.join("pairwise.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["lambda", "f_infinity", "steps", "converged"])?;
    for (l, r) in lambdas.iter().zip(&results) {
        w.write_record([fmt_f64(*l), fmt_f64(r.value), r.steps.to_string(), r.converged.to_string()])?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    let capped = results.iter().filter(|r| !r.converged).count();
    let _ = writeln!(
        log,
        "{}: {} rows, step cap {cap}, {capped} rows hit the cap",
        path.display(),
        results.len()
    );
    Ok(Outcome::Success)
}

//! Run configuration: a sectioned TOML file, validated exhaustively.
//!
//! Parsing collects every problem instead of stopping at the first one:
//! unknown keys (with a nearest-key suggestion), type mismatches, and
//! out-of-range or out-of-regime values. Every field has a default, so the
//! minimal useful config is a couple of lines.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use bresse_core::{BeamParams, DampingModel, ForcingModel, Grid, State, StepperConfig};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Equilibria,
    DecayFit,
    SingularLimit,
    Semicontinuity,
    Quasistability,
    Verify,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "simulate" => Some(Self::Simulate),
            "equilibria" => Some(Self::Equilibria),
            "decay-fit" => Some(Self::DecayFit),
            "singular-limit" => Some(Self::SingularLimit),
            "semicontinuity" => Some(Self::Semicontinuity),
            "quasistability" => Some(Self::Quasistability),
            "verify" => Some(Self::Verify),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Equilibria => "equilibria",
            Self::DecayFit => "decay-fit",
            Self::SingularLimit => "singular-limit",
            Self::Semicontinuity => "semicontinuity",
            Self::Quasistability => "quasistability",
            Self::Verify => "verify",
        }
    }

    /// Experiments whose estimates rely on the curvature-uniform constants.
    pub fn requires_uniform_regime(&self) -> bool {
        matches!(self, Self::SingularLimit | Self::Semicontinuity | Self::Equilibria)
    }

    pub const ALL: [ExperimentKind; 7] = [
        Self::Simulate,
        Self::Equilibria,
        Self::DecayFit,
        Self::SingularLimit,
        Self::Semicontinuity,
        Self::Quasistability,
        Self::Verify,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForcingSection {
    /// "double-well" | "zero" | "isotropic-quartic".
    pub kind: String,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Coefficient of the isotropic-quartic law.
    pub c: f64,
}

impl Default for ForcingSection {
    fn default() -> Self {
        Self { kind: "double-well".into(), alpha1: 0.0, alpha2: 0.0, c: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DampingSection {
    /// "linear" | "clipped-cubic" | "saturating-cubic" | "off".
    pub kind: String,
    pub c: f64,
    pub s0: f64,
}

impl Default for DampingSection {
    fn default() -> Self {
        Self { kind: "linear".into(), c: 1.0, s0: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSection {
    pub length: f64,
    pub ell: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub b: f64,
    pub k: f64,
    pub k0: f64,
    pub forcing: ForcingSection,
    pub damping: DampingSection,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            length: PI,
            ell: 0.1,
            rho1: 1.0,
            rho2: 1.0,
            b: 1.0,
            k: 1.0,
            k0: 1.0,
            forcing: ForcingSection::default(),
            damping: DampingSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSection {
    pub n: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 128 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepperSection {
    /// Absent: h / (2 c_max).
    pub dt: Option<f64>,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
}

impl Default for StepperSection {
    fn default() -> Self {
        Self { dt: None, newton_tol: 1e-10, newton_max_iters: 25 }
    }
}

/// Initial data: sine-mode coefficients per field, or a seeded random
/// smooth state scaled to a target linear energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitialSection {
    /// "modes" | "random".
    pub kind: String,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub w: Vec<f64>,
    pub phit: Vec<f64>,
    pub psit: Vec<f64>,
    pub wt: Vec<f64>,
    /// Target linear energy of the random state.
    pub energy: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            kind: "modes".into(),
            phi: vec![0.5, 0.0, 0.2],
            psi: vec![0.3, 0.0, 0.0],
            w: vec![0.2, 0.1, 0.0],
            phit: vec![0.0, 0.3, 0.0],
            psit: vec![0.2, 0.0, 0.0],
            wt: vec![0.0, 0.0, 0.1],
            energy: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriaSection {
    pub tol: f64,
    pub max_iters: usize,
    pub modes: usize,
    pub random_starts: usize,
    pub amplitudes: Vec<f64>,
}

impl Default for EquilibriaSection {
    fn default() -> Self {
        Self { tol: 1e-10, max_iters: 60, modes: 3, random_starts: 8, amplitudes: vec![0.25, 0.5, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSection {
    /// Optional: must agree with the chosen subcommand when present.
    pub kind: Option<ExperimentKind>,
    pub horizon: f64,
    pub seed: u64,
    /// Sampling stride in steps.
    pub stride: usize,
    /// Curvature sweep; absent: a per-experiment default tied to pi/(2 L).
    pub ell_list: Option<Vec<f64>>,
    pub ensemble: usize,
    pub pairs: usize,
    pub epsilons: Vec<f64>,
    pub ic_energy: f64,
    pub ic_energies: Vec<f64>,
    pub settle_factor: f64,
    pub window_factor: f64,
    pub stride_factor: f64,
    pub max_time: f64,
    pub initial: InitialSection,
    pub equilibria: EquilibriaSection,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            kind: None,
            horizon: 5.0,
            seed: 42,
            stride: 10,
            ell_list: None,
            ensemble: 8,
            pairs: 10,
            epsilons: vec![1e-2, 1e-3],
            ic_energy: 1.0,
            ic_energies: vec![1.0, 10.0, 100.0],
            settle_factor: 10.0,
            window_factor: 10.0,
            stride_factor: 0.1,
            max_time: 120.0,
            initial: InitialSection::default(),
            equilibria: EquilibriaSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSection {
    pub dir: String,
    pub snapshots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into(), snapshots: false }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub stepper: StepperSection,
    pub experiment: ExperimentSection,
    pub output: OutputSection,
}

// ---------------------------------------------------------------------------
// parsing

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn nearest<'a>(key: &str, known: &[&'a str]) -> Option<&'a str> {
    known
        .iter()
        .map(|k| (levenshtein(key, k), *k))
        .min()
        .filter(|(d, k)| 2 * d <= key.len().max(k.len()) + 1)
        .map(|(_, k)| k)
}

struct Walker<'a> {
    issues: &'a mut Vec<ConfigIssue>,
}

impl Walker<'_> {
    fn unknown_keys(&mut self, path: &str, table: &toml::value::Table, known: &[&str]) {
        let known_set: BTreeSet<&str> = known.iter().copied().collect();
        for key in table.keys() {
            if !known_set.contains(key.as_str()) {
                let hint = nearest(key, known)
                    .map(|k| format!("; nearest valid key is '{k}'"))
                    .unwrap_or_default();
                self.issues.push(ConfigIssue {
                    path: format!("{path}.{key}"),
                    message: format!("unknown key{hint}"),
                });
            }
        }
    }

    fn float(&mut self, path: &str, table: &toml::value::Table, key: &str, target: &mut f64) {
        if let Some(v) = table.get(key) {
            match v {
                toml::Value::Float(f) => *target = *f,
                toml::Value::Integer(i) => *target = *i as f64,
                other => self.type_mismatch(path, key, "a number", other),
            }
        }
    }

    fn float_opt(&mut self, path: &str, table: &toml::value::Table, key: &str, target: &mut Option<f64>) {
        if let Some(v) = table.get(key) {
            match v {
                toml::Value::Float(f) => *target = Some(*f),
                toml::Value::Integer(i) => *target = Some(*i as f64),
                other => self.type_mismatch(path, key, "a number", other),
            }
        }
    }

    fn uint(&mut self, path: &str, table: &toml::value::Table, key: &str, target: &mut usize) {
        if let Some(v) = table.get(key) {
            match v {
                toml::Value::Integer(i) if *i >= 0 => *target = *i as usize,
                other => self.type_mismatch(path, key, "a nonnegative integer", other),
            }
        }
    }

    fn u64_(&mut self, path: &str, table: &toml::value::Table, key: &str, target: &mut u64) {
        if let Some(v) = table.get(key) {
            match v {
                toml::Value::Integer(i) if *i >= 0 => *target = *i as u64,
                other => self.type_mismatch(path, key, "a nonnegative integer", other),
            }
        }
    }

    fn boolean(&mut self, path: &str, table: &toml::value::Table, key: &str, target: &mut bool) {
        if let Some(v) = table.get(key) {
            match v {
                toml::Value::Boolean(b) => *target = *b,
                other => self.type_mismatch(path, key, "a boolean", other),
            }
        }
    }

    fn string(&mut self, path: &str, table: &toml::value::Table, key: &str, target: &mut String) {
        if let Some(v) = table.get(key) {
            match v {
                toml::Value::String(s) => *target = s.clone(),
                other => self.type_mismatch(path, key, "a string", other),
            }
        }
    }

    fn float_list(&mut self, path: &str, table: &toml::value::Table, key: &str, target: &mut Vec<f64>) {
        if let Some(parsed) = self.parse_float_list(path, table, key) {
            *target = parsed;
        }
    }

    fn float_list_opt(&mut self, path: &str, table: &toml::value::Table, key: &str, target: &mut Option<Vec<f64>>) {
        if let Some(parsed) = self.parse_float_list(path, table, key) {
            *target = Some(parsed);
        }
    }

    fn parse_float_list(&mut self, path: &str, table: &toml::value::Table, key: &str) -> Option<Vec<f64>> {
        let v = table.get(key)?;
        match v {
            toml::Value::Array(items) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    match item {
                        toml::Value::Float(f) => out.push(*f),
                        toml::Value::Integer(n) => out.push(*n as f64),
                        other => {
                            self.type_mismatch(path, &format!("{key}[{i}]"), "a number", other);
                            return None;
                        }
                    }
                }
                Some(out)
            }
            other => {
                self.type_mismatch(path, key, "an array of numbers", other);
                None
            }
        }
    }

    fn table<'t>(&mut self, path: &str, parent: &'t toml::value::Table, key: &str) -> Option<&'t toml::value::Table> {
        match parent.get(key) {
            None => None,
            Some(toml::Value::Table(t)) => Some(t),
            Some(other) => {
                self.type_mismatch(path, key, "a table", other);
                None
            }
        }
    }

    fn type_mismatch(&mut self, path: &str, key: &str, expected: &str, got: &toml::Value) {
        self.issues.push(ConfigIssue {
            path: format!("{path}.{key}"),
            message: format!("expected {expected}, got {}", got.type_str()),
        });
    }
}

/// Parse and validate a configuration, returning either the resolved config
/// or the full list of problems.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<ConfigIssue>> {
    let value: toml::Value = match text.parse() {
        Ok(v) => v,
        Err(e) => {
            return Err(vec![ConfigIssue { path: "<syntax>".into(), message: e.to_string() }]);
        }
    };
    let root = match value {
        toml::Value::Table(t) => t,
        _ => return Err(vec![ConfigIssue { path: "<root>".into(), message: "top level must be a table".into() }]),
    };

    let mut issues = Vec::new();
    let mut cfg = RunConfig::default();
    let mut w = Walker { issues: &mut issues };

    w.unknown_keys("", &root, &["model", "grid", "stepper", "experiment", "output"]);

    if let Some(model) = w.table("", &root, "model") {
        w.unknown_keys(
            "model",
            model,
            &["length", "ell", "rho1", "rho2", "b", "k", "k0", "forcing", "damping"],
        );
        w.float("model", model, "length", &mut cfg.model.length);
        w.float("model", model, "ell", &mut cfg.model.ell);
        w.float("model", model, "rho1", &mut cfg.model.rho1);
        w.float("model", model, "rho2", &mut cfg.model.rho2);
        w.float("model", model, "b", &mut cfg.model.b);
        w.float("model", model, "k", &mut cfg.model.k);
        w.float("model", model, "k0", &mut cfg.model.k0);
        if let Some(forcing) = w.table("model", model, "forcing") {
            w.unknown_keys("model.forcing", forcing, &["kind", "alpha1", "alpha2", "c"]);
            w.string("model.forcing", forcing, "kind", &mut cfg.model.forcing.kind);
            w.float("model.forcing", forcing, "alpha1", &mut cfg.model.forcing.alpha1);
            w.float("model.forcing", forcing, "alpha2", &mut cfg.model.forcing.alpha2);
            w.float("model.forcing", forcing, "c", &mut cfg.model.forcing.c);
        }
        if let Some(damping) = w.table("model", model, "damping") {
            w.unknown_keys("model.damping", damping, &["kind", "c", "s0"]);
            w.string("model.damping", damping, "kind", &mut cfg.model.damping.kind);
            w.float("model.damping", damping, "c", &mut cfg.model.damping.c);
            w.float("model.damping", damping, "s0", &mut cfg.model.damping.s0);
        }
    }

    if let Some(grid) = w.table("", &root, "grid") {
        w.unknown_keys("grid", grid, &["n"]);
        w.uint("grid", grid, "n", &mut cfg.grid.n);
    }

    if let Some(stepper) = w.table("", &root, "stepper") {
        w.unknown_keys("stepper", stepper, &["dt", "newton_tol", "newton_max_iters"]);
        w.float_opt("stepper", stepper, "dt", &mut cfg.stepper.dt);
        w.float("stepper", stepper, "newton_tol", &mut cfg.stepper.newton_tol);
        w.uint("stepper", stepper, "newton_max_iters", &mut cfg.stepper.newton_max_iters);
    }

    if let Some(exp) = w.table("", &root, "experiment") {
        w.unknown_keys(
            "experiment",
            exp,
            &[
                "kind", "horizon", "seed", "stride", "ell_list", "ensemble", "pairs", "epsilons",
                "ic_energy", "ic_energies", "settle_factor", "window_factor", "stride_factor",
                "max_time", "initial", "equilibria",
            ],
        );
        if let Some(v) = exp.get("kind") {
            match v {
                toml::Value::String(s) => match ExperimentKind::parse(s) {
                    Some(k) => cfg.experiment.kind = Some(k),
                    None => {
                        let names: Vec<&str> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                        let hint = nearest(s, &names)
                            .map(|k| format!("; nearest valid kind is '{k}'"))
                            .unwrap_or_default();
                        w.issues.push(ConfigIssue {
                            path: "experiment.kind".into(),
                            message: format!("unknown experiment '{s}'{hint}"),
                        });
                    }
                },
                other => w.type_mismatch("experiment", "kind", "a string", other),
            }
        }
        w.float("experiment", exp, "horizon", &mut cfg.experiment.horizon);
        w.u64_("experiment", exp, "seed", &mut cfg.experiment.seed);
        w.uint("experiment", exp, "stride", &mut cfg.experiment.stride);
        w.float_list_opt("experiment", exp, "ell_list", &mut cfg.experiment.ell_list);
        w.uint("experiment", exp, "ensemble", &mut cfg.experiment.ensemble);
        w.uint("experiment", exp, "pairs", &mut cfg.experiment.pairs);
        w.float_list("experiment", exp, "epsilons", &mut cfg.experiment.epsilons);
        w.float("experiment", exp, "ic_energy", &mut cfg.experiment.ic_energy);
        w.float_list("experiment", exp, "ic_energies", &mut cfg.experiment.ic_energies);
        w.float("experiment", exp, "settle_factor", &mut cfg.experiment.settle_factor);
        w.float("experiment", exp, "window_factor", &mut cfg.experiment.window_factor);
        w.float("experiment", exp, "stride_factor", &mut cfg.experiment.stride_factor);
        w.float("experiment", exp, "max_time", &mut cfg.experiment.max_time);
        if let Some(init) = w.table("experiment", exp, "initial") {
            w.unknown_keys(
                "experiment.initial",
                init,
                &["kind", "phi", "psi", "w", "phit", "psit", "wt", "energy"],
            );
            w.string("experiment.initial", init, "kind", &mut cfg.experiment.initial.kind);
            w.float_list("experiment.initial", init, "phi", &mut cfg.experiment.initial.phi);
            w.float_list("experiment.initial", init, "psi", &mut cfg.experiment.initial.psi);
            w.float_list("experiment.initial", init, "w", &mut cfg.experiment.initial.w);
            w.float_list("experiment.initial", init, "phit", &mut cfg.experiment.initial.phit);
            w.float_list("experiment.initial", init, "psit", &mut cfg.experiment.initial.psit);
            w.float_list("experiment.initial", init, "wt", &mut cfg.experiment.initial.wt);
            w.float("experiment.initial", init, "energy", &mut cfg.experiment.initial.energy);
        }
        if let Some(eq) = w.table("experiment", exp, "equilibria") {
            w.unknown_keys(
                "experiment.equilibria",
                eq,
                &["tol", "max_iters", "modes", "random_starts", "amplitudes"],
            );
            w.float("experiment.equilibria", eq, "tol", &mut cfg.experiment.equilibria.tol);
            w.uint("experiment.equilibria", eq, "max_iters", &mut cfg.experiment.equilibria.max_iters);
            w.uint("experiment.equilibria", eq, "modes", &mut cfg.experiment.equilibria.modes);
            w.uint("experiment.equilibria", eq, "random_starts", &mut cfg.experiment.equilibria.random_starts);
            w.float_list("experiment.equilibria", eq, "amplitudes", &mut cfg.experiment.equilibria.amplitudes);
        }
    }

    if let Some(output) = w.table("", &root, "output") {
        w.unknown_keys("output", output, &["dir", "snapshots"]);
        w.string("output", output, "dir", &mut cfg.output.dir);
        w.boolean("output", output, "snapshots", &mut cfg.output.snapshots);
    }

    validate_semantics(&cfg, &mut issues);
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(issues)
    }
}

fn validate_semantics(cfg: &RunConfig, issues: &mut Vec<ConfigIssue>) {
    let push = |issues: &mut Vec<ConfigIssue>, path: &str, message: String| {
        issues.push(ConfigIssue { path: path.into(), message });
    };

    if let Err(e) = cfg.beam_params() {
        push(issues, "model", e.to_string());
    }
    match cfg.model.forcing.kind.as_str() {
        "double-well" | "zero" | "isotropic-quartic" => {}
        other => {
            let hint = nearest(other, &["double-well", "zero", "isotropic-quartic"])
                .map(|k| format!("; nearest valid kind is '{k}'"))
                .unwrap_or_default();
            push(issues, "model.forcing.kind", format!("unknown forcing law '{other}'{hint}"));
        }
    }
    match cfg.model.damping.kind.as_str() {
        "linear" | "clipped-cubic" | "saturating-cubic" | "off" => {}
        other => {
            let hint = nearest(other, &["linear", "clipped-cubic", "saturating-cubic", "off"])
                .map(|k| format!("; nearest valid kind is '{k}'"))
                .unwrap_or_default();
            push(issues, "model.damping.kind", format!("unknown damping law '{other}'{hint}"));
        }
    }
    if cfg.model.forcing.alpha1 < 0.0 || cfg.model.forcing.alpha2 < 0.0 {
        push(issues, "model.forcing", "double-well coefficients must be nonnegative".into());
    }
    if cfg.model.damping.kind == "linear" && !(cfg.model.damping.c > 0.0) {
        push(issues, "model.damping.c", format!("linear damping needs c > 0, got {}", cfg.model.damping.c));
    }
    if cfg.grid.n < 2 {
        push(issues, "grid.n", format!("need at least 2 interior nodes, got {}", cfg.grid.n));
    }
    if let Some(dt) = cfg.stepper.dt {
        if !(dt > 0.0) {
            push(issues, "stepper.dt", format!("dt must be positive, got {dt}"));
        }
    }
    if !(cfg.stepper.newton_tol > 0.0) {
        push(issues, "stepper.newton_tol", "must be positive".into());
    }
    if !(cfg.experiment.horizon >= 0.0) {
        push(issues, "experiment.horizon", format!("must be nonnegative, got {}", cfg.experiment.horizon));
    }
    match cfg.experiment.initial.kind.as_str() {
        "modes" | "random" => {}
        other => push(issues, "experiment.initial.kind", format!("unknown initial-data kind '{other}' (use 'modes' or 'random')")),
    }
    for (name, coeffs) in [
        ("phi", &cfg.experiment.initial.phi),
        ("psi", &cfg.experiment.initial.psi),
        ("w", &cfg.experiment.initial.w),
        ("phit", &cfg.experiment.initial.phit),
        ("psit", &cfg.experiment.initial.psit),
        ("wt", &cfg.experiment.initial.wt),
    ] {
        if coeffs.len() > 8 {
            push(
                issues,
                &format!("experiment.initial.{name}"),
                format!("at most 8 mode coefficients are supported, got {}", coeffs.len()),
            );
        }
    }

    // curvature regime for the experiments that need the uniform constants
    if let Some(kind) = cfg.experiment.kind {
        check_regime(cfg, kind, issues);
    }
}

/// Regime check used both at parse time (when the config names its
/// experiment) and at dispatch time (against the subcommand).
pub fn check_regime(cfg: &RunConfig, kind: ExperimentKind, issues: &mut Vec<ConfigIssue>) {
    if !kind.requires_uniform_regime() {
        return;
    }
    let cap = PI / (2.0 * cfg.model.length);
    if cfg.model.ell >= cap {
        issues.push(ConfigIssue {
            path: "model.ell".into(),
            message: format!(
                "curvature {} is at or above the uniform-regime cap pi/(2 L) = {cap}, required by '{}'",
                cfg.model.ell,
                kind.name()
            ),
        });
    }
    if let Some(list) = &cfg.experiment.ell_list {
        for (i, &ell) in list.iter().enumerate() {
            if ell > 0.9 * cap {
                issues.push(ConfigIssue {
                    path: format!("experiment.ell_list[{i}]"),
                    message: format!("curvature {ell} exceeds 0.9 * pi/(2 L) = {}", 0.9 * cap),
                });
            }
        }
    }
}

// ---------------------------------------------------------------------------
// resolved objects

impl RunConfig {
    pub fn beam_params(&self) -> bresse_core::Result<BeamParams> {
        BeamParams::new(
            self.model.rho1,
            self.model.rho2,
            self.model.b,
            self.model.k,
            self.model.k0,
            self.model.length,
            self.model.ell,
        )
    }

    pub fn forcing(&self) -> bresse_core::Result<ForcingModel> {
        match self.model.forcing.kind.as_str() {
            "zero" => Ok(ForcingModel::zero()),
            "isotropic-quartic" => ForcingModel::isotropic_quartic(self.model.forcing.c),
            _ => ForcingModel::builtin(self.model.forcing.alpha1, self.model.forcing.alpha2),
        }
    }

    pub fn damping(&self) -> bresse_core::Result<DampingModel> {
        match self.model.damping.kind.as_str() {
            "off" => Ok(DampingModel::off()),
            "clipped-cubic" => DampingModel::clipped_cubic(self.model.damping.s0),
            "saturating-cubic" => Ok(DampingModel::saturating_cubic()),
            _ => DampingModel::linear(self.model.damping.c),
        }
    }

    pub fn grid_obj(&self) -> bresse_core::Result<Grid> {
        bresse_core::make_grid(self.model.length, self.grid.n)
    }

    pub fn stepper(&self, params: &BeamParams, grid: &Grid) -> bresse_core::Result<StepperConfig> {
        let mut cfg = StepperConfig::default_for(params, grid);
        if let Some(dt) = self.stepper.dt {
            cfg = cfg.with_dt(dt);
        }
        cfg.newton_tol = self.stepper.newton_tol;
        cfg.newton_max_iters = self.stepper.newton_max_iters;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Build the configured initial state on a grid.
    pub fn initial_state(&self, params: &BeamParams, grid: &Grid) -> State {
        let init = &self.experiment.initial;
        if init.kind == "random" {
            let mut s = bresse_core::lab::seeded_random_state(grid, self.experiment.seed, 1.0);
            bresse_core::lab::rescale_to_energy(params, grid, &mut s, init.energy);
            return s;
        }
        let mut s = State::zero(grid);
        let fields: [(&Vec<f64>, fn(&mut State) -> &mut Vec<f64>); 6] = [
            (&init.phi, |s| &mut s.phi),
            (&init.psi, |s| &mut s.psi),
            (&init.w, |s| &mut s.w),
            (&init.phit, |s| &mut s.phit),
            (&init.psit, |s| &mut s.psit),
            (&init.wt, |s| &mut s.wt),
        ];
        for (coeffs, get) in fields {
            for (m, &c) in coeffs.iter().enumerate() {
                if c != 0.0 {
                    let mode = grid.sine_mode(m + 1);
                    let target = get(&mut s);
                    for (x, v) in target.iter_mut().zip(&mode) {
                        *x += c * v;
                    }
                }
            }
        }
        s
    }

    /// Curvature sweep for the limit experiments, defaulting to a dyadic
    /// sequence under the regime cap.
    pub fn ell_sweep(&self, kind: ExperimentKind) -> Vec<f64> {
        if let Some(list) = &self.experiment.ell_list {
            return list.clone();
        }
        let cap = PI / (2.0 * self.model.length);
        match kind {
            ExperimentKind::SingularLimit => (1..=6).map(|n| 0.5 * 0.5f64.powi(n) * cap).collect(),
            ExperimentKind::Semicontinuity => vec![0.2 * cap, 0.1 * cap, 0.05 * cap],
            _ => vec![self.model.ell],
        }
    }

    /// Canonical text form; parses back to an identical configuration.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let f = |v: f64| {
            let t = format!("{v}");
            if t.contains('.') || t.contains('e') || t.contains("inf") || t.contains("NaN") {
                t
            } else {
                format!("{t}.0")
            }
        };
        let list = |v: &[f64]| {
            let items: Vec<String> = v.iter().map(|x| f(*x)).collect();
            format!("[{}]", items.join(", "))
        };
        use std::fmt::Write;
        let _ = writeln!(s, "[model]");
        let _ = writeln!(s, "length = {}", f(self.model.length));
        let _ = writeln!(s, "ell = {}", f(self.model.ell));
        let _ = writeln!(s, "rho1 = {}", f(self.model.rho1));
        let _ = writeln!(s, "rho2 = {}", f(self.model.rho2));
        let _ = writeln!(s, "b = {}", f(self.model.b));
        let _ = writeln!(s, "k = {}", f(self.model.k));
        let _ = writeln!(s, "k0 = {}", f(self.model.k0));
        let _ = writeln!(s);
        let _ = writeln!(s, "[model.forcing]");
        let _ = writeln!(s, "kind = \"{}\"", self.model.forcing.kind);
        let _ = writeln!(s, "alpha1 = {}", f(self.model.forcing.alpha1));
        let _ = writeln!(s, "alpha2 = {}", f(self.model.forcing.alpha2));
        let _ = writeln!(s, "c = {}", f(self.model.forcing.c));
        let _ = writeln!(s);
        let _ = writeln!(s, "[model.damping]");
        let _ = writeln!(s, "kind = \"{}\"", self.model.damping.kind);
        let _ = writeln!(s, "c = {}", f(self.model.damping.c));
        let _ = writeln!(s, "s0 = {}", f(self.model.damping.s0));
        let _ = writeln!(s);
        let _ = writeln!(s, "[grid]");
        let _ = writeln!(s, "n = {}", self.grid.n);
        let _ = writeln!(s);
        let _ = writeln!(s, "[stepper]");
        if let Some(dt) = self.stepper.dt {
            let _ = writeln!(s, "dt = {}", f(dt));
        }
        let _ = writeln!(s, "newton_tol = {}", f(self.stepper.newton_tol));
        let _ = writeln!(s, "newton_max_iters = {}", self.stepper.newton_max_iters);
        let _ = writeln!(s);
        let _ = writeln!(s, "[experiment]");
        if let Some(kind) = self.experiment.kind {
            let _ = writeln!(s, "kind = \"{}\"", kind.name());
        }
        let _ = writeln!(s, "horizon = {}", f(self.experiment.horizon));
        let _ = writeln!(s, "seed = {}", self.experiment.seed);
        let _ = writeln!(s, "stride = {}", self.experiment.stride);
        if let Some(l) = &self.experiment.ell_list {
            let _ = writeln!(s, "ell_list = {}", list(l));
        }
        let _ = writeln!(s, "ensemble = {}", self.experiment.ensemble);
        let _ = writeln!(s, "pairs = {}", self.experiment.pairs);
        let _ = writeln!(s, "epsilons = {}", list(&self.experiment.epsilons));
        let _ = writeln!(s, "ic_energy = {}", f(self.experiment.ic_energy));
        let _ = writeln!(s, "ic_energies = {}", list(&self.experiment.ic_energies));
        let _ = writeln!(s, "settle_factor = {}", f(self.experiment.settle_factor));
        let _ = writeln!(s, "window_factor = {}", f(self.experiment.window_factor));
        let _ = writeln!(s, "stride_factor = {}", f(self.experiment.stride_factor));
        let _ = writeln!(s, "max_time = {}", f(self.experiment.max_time));
        let _ = writeln!(s);
        let _ = writeln!(s, "[experiment.initial]");
        let _ = writeln!(s, "kind = \"{}\"", self.experiment.initial.kind);
        let _ = writeln!(s, "phi = {}", list(&self.experiment.initial.phi));
        let _ = writeln!(s, "psi = {}", list(&self.experiment.initial.psi));
        let _ = writeln!(s, "w = {}", list(&self.experiment.initial.w));
        let _ = writeln!(s, "phit = {}", list(&self.experiment.initial.phit));
        let _ = writeln!(s, "psit = {}", list(&self.experiment.initial.psit));
        let _ = writeln!(s, "wt = {}", list(&self.experiment.initial.wt));
        let _ = writeln!(s, "energy = {}", f(self.experiment.initial.energy));
        let _ = writeln!(s);
        let _ = writeln!(s, "[experiment.equilibria]");
        let _ = writeln!(s, "tol = {}", f(self.experiment.equilibria.tol));
        let _ = writeln!(s, "max_iters = {}", self.experiment.equilibria.max_iters);
        let _ = writeln!(s, "modes = {}", self.experiment.equilibria.modes);
        let _ = writeln!(s, "random_starts = {}", self.experiment.equilibria.random_starts);
        let _ = writeln!(s, "amplitudes = {}", list(&self.experiment.equilibria.amplitudes));
        let _ = writeln!(s);
        let _ = writeln!(s, "[output]");
        let _ = writeln!(s, "dir = \"{}\"", self.output.dir);
        let _ = writeln!(s, "snapshots = {}", self.output.snapshots);
        s
    }
}

//! Scenario files: TOML sections of `key = value` pairs, command-line
//! overrides, validation with line-level diagnostics, and the `--quick`
//! reduction.

use std::path::Path;

use lw6::balance::{GaugeFunction, RenormalizationConstants};
use lw6::worldline::{builtin_worldline, TrajectorySpec, Worldline, R_MIN};
use serde::{Deserialize, Serialize};

use crate::report::Format;

/// `--quick` divides sample and output counts by this factor, multiplies the
/// quadrature and integrator tolerances by its cube and the flux-comparison
/// tolerances by its square.
pub const QUICK_FACTOR: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Verify,
    Flux,
    Sweep,
    Simulate,
    Fields,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Verify => "verify",
            Task::Flux => "flux",
            Task::Sweep => "sweep",
            Task::Simulate => "simulate",
            Task::Fields => "fields",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub task: Option<Task>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TrajectoryConfig {
    Uniform { velocity: [f64; 5] },
    Hyperbolic { g: f64 },
    Circular { radius: f64, speed: f64 },
    Helical { radius: f64, speed: f64, drift: f64 },
    LogRapidity { scale: f64 },
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig::Hyperbolic { g: 1.0 }
    }
}

impl TrajectoryConfig {
    pub fn spec(&self) -> TrajectorySpec {
        match *self {
            TrajectoryConfig::Uniform { velocity } => TrajectorySpec::Uniform { velocity },
            TrajectoryConfig::Hyperbolic { g } => TrajectorySpec::Hyperbolic { g },
            TrajectoryConfig::Circular { radius, speed } => TrajectorySpec::Circular { radius, speed },
            TrajectoryConfig::Helical { radius, speed, drift } => TrajectorySpec::Helical { radius, speed, drift },
            TrajectoryConfig::LogRapidity { scale } => TrajectorySpec::LogRapidity { scale },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChargeSection {
    pub e: f64,
}

impl Default for ChargeSection {
    fn default() -> Self {
        ChargeSection { e: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NuKind {
    #[default]
    Zero,
    Sine,
    Polynomial,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsSection {
    pub m: f64,
    pub mu: f64,
    pub nu: NuKind,
    pub nu_amplitude: f64,
    pub nu_frequency: f64,
    pub nu_coefficients: Vec<f64>,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        ConstantsSection { m: 1.0, mu: 0.0, nu: NuKind::Zero, nu_amplitude: 0.0, nu_frequency: 0.0, nu_coefficients: vec![] }
    }
}

impl ConstantsSection {
    pub fn constants(&self) -> RenormalizationConstants {
        let nu = match self.nu {
            NuKind::Zero => GaugeFunction::Zero,
            NuKind::Sine => GaugeFunction::Sine { amplitude: self.nu_amplitude, frequency: self.nu_frequency },
            NuKind::Polynomial => GaugeFunction::Polynomial(self.nu_coefficients.clone()),
        };
        RenormalizationConstants::new(self.m, self.mu).with_nu(nu)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericSection {
    pub tau: [f64; 2],
    pub radii: Vec<f64>,
    pub sphere_nodes: [usize; 2],
    pub moment_nodes: usize,
    pub quad_rel_tol: f64,
    pub initial_panels: usize,
    pub samples: usize,
    pub field_radius: [f64; 2],
    pub fd_divisor: f64,
    pub outputs: usize,
    pub integrator_rel_tol: f64,
    pub integrator_abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for NumericSection {
    fn default() -> Self {
        NumericSection {
            tau: [0.0, 1.0],
            radii: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            sphere_nodes: [5, 8],
            moment_nodes: 24,
            quad_rel_tol: 1e-10,
            initial_panels: 1,
            samples: 16,
            field_radius: [0.5, 2.0],
            fd_divisor: 24.0,
            outputs: 50,
            integrator_rel_tol: 1e-12,
            integrator_abs_tol: 1e-14,
            max_step: 0.1,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub moments: f64,
    pub chain: f64,
    pub order: f64,
    pub decomposition: f64,
    pub null: f64,
    pub rescaling: f64,
    pub flux_rad: f64,
    pub flux_bound: f64,
    pub exponent: f64,
    pub spin: f64,
    pub momentum_fit: f64,
    pub condition: f64,
    pub balance: f64,
    pub angular: f64,
    pub gauge_invariance: f64,
    pub wedge: f64,
    pub identity: f64,
    pub closure: f64,
    pub drift: f64,
    pub reference: f64,
    pub field: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            moments: 1e-10,
            chain: 1e-8,
            order: 0.3,
            decomposition: 1e-12,
            null: 1e-11,
            rescaling: 1e-10,
            flux_rad: 1e-7,
            flux_bound: 1e-6,
            exponent: 0.02,
            spin: 1e-4,
            momentum_fit: 1e-6,
            condition: 1e10,
            balance: 1e-8,
            angular: 1e-9,
            gauge_invariance: 1e-13,
            wedge: 1e-9,
            identity: 1e-12,
            closure: 1e-8,
            drift: 1e-7,
            reference: 1e-8,
            field: 1e-6,
        }
    }
}

impl Tolerances {
    fn named(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("moments", self.moments),
            ("chain", self.chain),
            ("order", self.order),
            ("decomposition", self.decomposition),
            ("null", self.null),
            ("rescaling", self.rescaling),
            ("flux_rad", self.flux_rad),
            ("flux_bound", self.flux_bound),
            ("exponent", self.exponent),
            ("spin", self.spin),
            ("momentum_fit", self.momentum_fit),
            ("condition", self.condition),
            ("balance", self.balance),
            ("angular", self.angular),
            ("gauge_invariance", self.gauge_invariance),
            ("wedge", self.wedge),
            ("identity", self.identity),
            ("closure", self.closure),
            ("drift", self.drift),
            ("reference", self.reference),
            ("field", self.field),
        ]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ForceKind {
    #[default]
    None,
    Constant,
    Prescribed,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForceSection {
    pub kind: ForceKind,
    pub magnitude: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<String>,
    pub timings: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub scenario: ScenarioSection,
    pub trajectory: TrajectoryConfig,
    pub charge: ChargeSection,
    pub constants: ConstantsSection,
    pub numeric: NumericSection,
    pub tolerances: Tolerances,
    pub force: ForceSection,
    pub output: OutputSection,
}

/// Configuration error with the place it was found.
#[derive(Debug, thiserror::Error)]
#[error("{origin}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
pub struct ConfigError {
    /// File path or `--set key`.
    pub origin: String,
    pub line: Option<usize>,
    pub message: String,
}

/// Source text kept for locating keys in diagnostics.
struct Source<'a> {
    origin: String,
    text: &'a str,
}

impl Source<'_> {
    fn line_of_offset(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    /// Line of `key` inside `[section]`, else of the section header.
    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        let mut current = String::new();
        let mut header = None;
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
                current = name.trim().to_string();
                if current == section {
                    header = Some(i + 1);
                }
                continue;
            }
            if current == section {
                if let Some((k, _)) = line.split_once('=') {
                    if k.trim() == key {
                        return Some(i + 1);
                    }
                }
            }
        }
        header
    }
}

/// Parses and validates a scenario. `path` is used only in diagnostics;
/// `overrides` are `section.key=value` strings applied after parsing.
pub fn load(text: &str, path: &str, overrides: &[String], task: Task, quick: bool) -> Result<Scenario, ConfigError> {
    let src = Source { origin: path.to_string(), text };
    // parse once directly so that syntax and type errors carry spans
    let _: Scenario = toml::from_str(text).map_err(|e| ConfigError {
        origin: src.origin.clone(),
        line: e.span().map(|s| src.line_of_offset(s.start)),
        message: e.message().trim().to_string(),
    })?;
    let mut table: toml::Table = toml::from_str(text).expect("parsed above");
    let mut overridden = Vec::new();
    for o in overrides {
        let key = apply_override(&mut table, o)?;
        overridden.push(key);
    }
    let scenario: Scenario = Scenario::deserialize(toml::Value::Table(table)).map_err(|e| ConfigError {
        origin: format!("--set {}", overridden.join(", ")),
        line: None,
        message: e.message().trim().to_string(),
    })?;
    let locate = |section: &str, key: &str| {
        let dotted = format!("{section}.{key}");
        if overridden.iter().any(|k| k == &dotted) {
            (format!("--set {dotted}"), None)
        } else {
            (src.origin.clone(), src.line_of(section, key))
        }
    };
    validate(&scenario, task).map_err(|(section, key, message)| {
        let (origin, line) = locate(section, key);
        ConfigError { origin, line, message }
    })?;
    Ok(if quick { scenario.quick() } else { scenario })
}

pub fn load_file(path: Option<&Path>, overrides: &[String], task: Task, quick: bool) -> Result<Scenario, ConfigError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| ConfigError {
                origin: p.display().to_string(),
                line: None,
                message: format!("cannot read: {e}"),
            })?;
            load(&text, &p.display().to_string(), overrides, task, quick)
        }
        None => load("", "<defaults>", overrides, task, quick),
    }
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<String, ConfigError> {
    let err = |message: String| ConfigError { origin: format!("--set {item}"), line: None, message };
    let (key, value) = item.split_once('=').ok_or_else(|| err("expected section.key=value".into()))?;
    let key = key.trim();
    let (section, field) = key.split_once('.').ok_or_else(|| err("key must be section.key".into()))?;
    let value = value.trim();
    let parsed = match toml::from_str::<toml::Table>(&format!("v = {value}")) {
        Ok(mut t) => t.remove("v").expect("single key"),
        Err(_) => toml::Value::String(value.to_string()),
    };
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    let sub = entry.as_table_mut().ok_or_else(|| err(format!("`{section}` is not a section")))?;
    sub.insert(field.to_string(), parsed);
    Ok(key.to_string())
}

type Invalid = (&'static str, &'static str, String);

fn validate(s: &Scenario, task: Task) -> Result<(), Invalid> {
    if let Some(t) = s.scenario.task {
        if t != task {
            return Err(("scenario", "task", format!("scenario is for `{}`, not `{}`", t.name(), task.name())));
        }
    }
    for (name, tol) in s.tolerances.named() {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(("tolerances", name, format!("tolerance `{name}` must be positive, got {tol}")));
        }
    }
    let n = &s.numeric;
    for (name, tol) in [
        ("quad_rel_tol", n.quad_rel_tol),
        ("integrator_rel_tol", n.integrator_rel_tol),
        ("integrator_abs_tol", n.integrator_abs_tol),
        ("max_step", n.max_step),
        ("fd_divisor", n.fd_divisor),
    ] {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(("numeric", name, format!("`{name}` must be positive, got {tol}")));
        }
    }
    if !(s.charge.e.is_finite()) {
        return Err(("charge", "e", "charge must be finite".into()));
    }
    let c = &s.constants;
    for (name, v) in [("m", c.m), ("mu", c.mu), ("nu_amplitude", c.nu_amplitude), ("nu_frequency", c.nu_frequency)] {
        if !v.is_finite() {
            return Err(("constants", name, format!("`{name}` must be finite")));
        }
    }
    if c.nu_coefficients.iter().any(|x| !x.is_finite()) {
        return Err(("constants", "nu_coefficients", "coefficients must be finite".into()));
    }
    let w = builtin_worldline(&s.trajectory.spec()).map_err(|e| ("trajectory", "kind", e.to_string()))?;
    let [t0, t1] = n.tau;
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(("numeric", "tau", format!("proper-time range [{t0}, {t1}] is degenerate")));
    }
    let (lo, hi) = w.domain();
    if t0 < lo || t1 > hi {
        return Err(("numeric", "tau", format!("[{t0}, {t1}] leaves the worldline domain [{lo}, {hi}]")));
    }
    if n.radii.is_empty() {
        return Err(("numeric", "radii", "at least one radius is required".into()));
    }
    for &r in n.radii.iter().chain(&n.field_radius) {
        if !(r.is_finite() && r >= 10.0 * R_MIN) {
            return Err(("numeric", "radii", format!("radius {r} is below 10·r_min = {}", 10.0 * R_MIN)));
        }
    }
    if n.radii.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(("numeric", "radii", "radii must be strictly increasing".into()));
    }
    if !(n.field_radius[0] <= n.field_radius[1]) {
        return Err(("numeric", "field_radius", "field radius range is reversed".into()));
    }
    if task == Task::Sweep && n.radii.len() < 3 {
        return Err(("numeric", "radii", "a sweep needs at least 3 radii".into()));
    }
    for (name, v) in [
        ("initial_panels", n.initial_panels),
        ("samples", n.samples),
        ("outputs", n.outputs),
        ("max_steps", n.max_steps),
    ] {
        if v == 0 {
            return Err(("numeric", name, format!("`{name}` must be at least 1")));
        }
    }
    if n.sphere_nodes.iter().any(|&x| x < 2) {
        return Err(("numeric", "sphere_nodes", "node counts must be at least 2".into()));
    }
    if n.moment_nodes < 2 {
        return Err(("numeric", "moment_nodes", "`moment_nodes` must be at least 2".into()));
    }
    if !s.force.magnitude.is_finite() {
        return Err(("force", "magnitude", "force magnitude must be finite".into()));
    }
    Ok(())
}

impl Scenario {
    pub fn worldline(&self) -> Box<dyn Worldline> {
        builtin_worldline(&self.trajectory.spec()).expect("validated")
    }

    /// Reduced settings for fast runs.
    pub fn quick(mut self) -> Self {
        let f = QUICK_FACTOR;
        let n = &mut self.numeric;
        n.samples = (n.samples / f).max(2);
        n.outputs = (n.outputs / f).max(2);
        n.quad_rel_tol *= (f * f * f) as f64;
        n.integrator_rel_tol *= (f * f * f) as f64;
        n.integrator_abs_tol *= (f * f * f) as f64;
        let t = &mut self.tolerances;
        t.flux_rad *= (f * f) as f64;
        t.flux_bound *= (f * f) as f64;
        t.momentum_fit *= (f * f) as f64;
        self
    }

    /// Sorted `section.key = value` pairs of the effective configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        let value = toml::Value::try_from(self).expect("scenario serializes");
        let mut out = Vec::new();
        if let toml::Value::Table(t) = value {
            for (section, v) in t {
                if let toml::Value::Table(sub) = v {
                    for (k, x) in sub {
                        out.push((format!("{section}.{k}"), x.to_string()));
                    }
                }
            }
        }
        out.sort();
        out
    }
}

/// Documented configuration, printed by `--help-config`.
pub const CONFIG_HELP: &str = r#"# lw6 scenario file: TOML sections of key = value pairs.
# Every key is optional; the values shown are the defaults.
# Any key can be overridden on the command line with --set section.key=value.

[scenario]
# task = "verify"        # optional; must match the subcommand when given
seed = 0                 # seed for sampled proper times, radii and angles

[trajectory]
kind = "hyperbolic"      # uniform | hyperbolic | circular | helical | log-rapidity
g = 1.0                  # hyperbolic: proper acceleration along axis 1
# uniform:      velocity = [v1, v2, v3, v4, v5]   (coordinate velocity, |v| < 1)
# circular:     radius = 1.0, speed = 0.5         (circle in the (1,2)-plane)
# helical:      radius = 1.0, speed = 0.5, drift = 0.2
# log-rapidity: scale = 1.0                       (rapidity ln(tau/scale), tau > 0)

[charge]
e = 1.0

[constants]
m = 1.0                  # renormalized mass
mu = 0.0                 # coefficient of the acceleration-dependent momentum
nu = "zero"              # zero | sine | polynomial: the free scalar of the angular balance
nu_amplitude = 0.0       # sine: nu = amplitude * sin(frequency * tau)
nu_frequency = 0.0
nu_coefficients = []     # polynomial: nu = sum c_i tau^i

[numeric]
tau = [0.0, 1.0]         # proper-time range [tau0, tau1], tau0 < tau1, inside the worldline domain
radii = [0.5, 1.0, 2.0, 4.0, 8.0]   # tube radii, strictly increasing, each >= 10 r_min
sphere_nodes = [5, 8]    # angular rule: nodes per polar axis, nodes in phi
moment_nodes = 24        # nodes per axis of the angular-moment check
quad_rel_tol = 1e-10     # adaptive proper-time quadrature
initial_panels = 1
samples = 16             # sampled proper times / field points per check
field_radius = [0.5, 2.0]   # radius range of sampled field points
fd_divisor = 24.0        # base step r / (fd_divisor * curvature scale * u0^2); orders are taken from the RMS over all samples
outputs = 50             # simulate: evenly spaced output times in (tau0, tau1]
integrator_rel_tol = 1e-12
integrator_abs_tol = 1e-14
max_step = 0.1
max_steps = 1000000

[tolerances]             # all must be positive
moments = 1e-10          # angular moment identities, relative
chain = 1e-8             # kinematic chain u.u = -1, u.a = 0, ...
order = 0.3              # observed finite-difference convergence order
decomposition = 1e-12    # rad + bound reconstructs the total stress-energy
null = 1e-11             # k.T_rad and k.T_(-5) vanish
rescaling = 1e-10        # graded pieces scale as 2^-kappa under r -> 2r
flux_rad = 1e-7          # tube radiative flux against the closed form
flux_bound = 1e-6        # tube bound flux against the endpoint closed form
exponent = 0.02          # fitted power-law exponents
spin = 1e-4              # fitted r^-1 spin coefficient
momentum_fit = 1e-6      # fitted bound momentum coefficients
condition = 1e10         # largest condition number of the radius fit
balance = 1e-8           # momentum balance and consistency chain
angular = 1e-9           # angular balance
gauge_invariance = 1e-13 # particle momentum independent of nu
wedge = 1e-9             # momentum rebuilt from the wedge system
identity = 1e-12         # spin magnitude and rest mass identities
closure = 1e-8           # total momentum / angular momentum closure
drift = 1e-7             # simulate: |u.u + 1| / u0^2 before projection
reference = 1e-8         # simulate: deviation from the reference trajectory
field = 1e-6             # fields: relative error of the finite-difference field

[force]                  # simulate only
kind = "none"            # none | constant | prescribed
magnitude = 0.0          # constant: proper force along axis 1, F = f (u1, u0, 0, 0, 0, 0)
                         # prescribed: the force that makes the trajectory exact

[output]
# format = "human"       # human | csv | structured; --format overrides
# path = "report.txt"    # --out overrides; standard output when absent
timings = false          # include wall-clock timings in the metadata

# --quick divides samples and outputs by 4 (at least 2), multiplies the
# quadrature and integrator tolerances by 64 and the flux comparison and
# momentum-fit tolerances by 16.
"#;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_template_is_the_default() {
        let s = load(CONFIG_HELP, "help", &[], Task::Verify, false).unwrap();
        assert_eq!(s, Scenario::default());
    }

    #[test]
    fn syntax_error_has_line() {
        let e = load("[charge]\ne = 1.0\n\n[numeric]\ntau = [0.0, \n", "x.toml", &[], Task::Verify, false).unwrap_err();
        assert_eq!(e.origin, "x.toml");
        assert!(e.line.is_some());
    }

    #[test]
    fn unknown_key_is_located() {
        let e = load("[charge]\ne = 1.0\nq = 2\n", "x.toml", &[], Task::Verify, false).unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn validation_error_points_at_key() {
        let text = "[numeric]\nsamples = 3\ntau = [1.0, 1.0]\n";
        let e = load(text, "x.toml", &[], Task::Verify, false).unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = load("[tolerances]\n\nbalance = -1.0\n", "x.toml", &[], Task::Verify, false).unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn overrides_apply_and_are_named_in_errors() {
        let s = load("", "x", &["charge.e=0.5".into(), "trajectory.kind=uniform".into(), "trajectory.velocity=[0.1,0,0,0,0]".into()], Task::Verify, false)
            .unwrap();
        assert_eq!(s.charge.e, 0.5);
        assert_eq!(s.trajectory, TrajectoryConfig::Uniform { velocity: [0.1, 0.0, 0.0, 0.0, 0.0] });
        let e = load("", "x", &["tolerances.drift=0".into()], Task::Verify, false).unwrap_err();
        assert_eq!(e.origin, "--set tolerances.drift");
    }

    #[test]
    fn radii_below_floor_rejected() {
        let e = load("[numeric]\nradii = [1e-12, 1.0]\n", "x", &[], Task::Verify, false).unwrap_err();
        assert!(e.message.contains("r_min"));
    }

    #[test]
    fn domain_is_checked() {
        let text = "[trajectory]\nkind = \"log-rapidity\"\nscale = 1.0\n[numeric]\ntau = [-1.0, 1.0]\n";
        let e = load(text, "x", &[], Task::Verify, false).unwrap_err();
        assert_eq!(e.line, Some(5));
    }
}

//! Experiment configuration: a sectioned `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! [grid]
//! L = 10          # box [-L, L)^2
//! nx = 128
//! ny = 128
//! [hamiltonian]
//! omega0_sq = 4
//! rotation = 0.1
//! modulation = sin-half   # or: constant
//! [nonlinear]
//! g = 0
//! lambda = 0
//! potential = none        # or: harmonic:<c> for V = c (x^2 + y^2)/2
//! [time]
//! t0 = 0
//! T = 3
//! [run]
//! methods = ROT2, STD2
//! steps = 16, 32, 64, 128
//! initial = vortex        # or: gaussian
//! reference_method = BM4-ROT
//! reference_factor = 16
//! magnus_order = 4
//! seed = 0
//! [output]
//! csv = fig1.csv
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rotsplit_core::{MagnusOrder, QuadraticHamiltonian};

use crate::error::{Result, RotError};
use crate::grid::{Grid, GridSpec};
use crate::nonlinear::{NonlinearTerm, PotentialFn};
use crate::schemes::{Method, Problem};
use crate::wave::WaveFunction;

/// Smallest admissible ratio of reference steps to the finest tested count.
pub const MIN_REFERENCE_FACTOR: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    /// `omega_x^2 = omega0^2 (1 + sin(t/2))`, `omega_y^2 = omega0^2 - sin(t/2)`.
    SinHalf,
    /// `omega_x^2 = omega_y^2 = omega0^2`.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialPreset {
    None,
    /// `V = c (x^2 + y^2) / 2`.
    Harmonic(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialCondition {
    /// `(x + i y) exp(-(x^2 + y^2)/2)`, normalized on the grid.
    Vortex,
    /// `exp(-(x^2 + y^2)/2)`, normalized on the grid.
    Gaussian,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub omega0_sq: f64,
    pub rotation: f64,
    pub modulation: Modulation,
    pub g: f64,
    pub lambda: f64,
    pub potential: PotentialPreset,
    pub t0: f64,
    pub t_end: f64,
    pub methods: Vec<Method>,
    pub steps: Vec<usize>,
    pub initial: InitialCondition,
    pub reference_method: Method,
    pub reference_factor: usize,
    pub magnus_order: MagnusOrder,
    pub seed: u64,
    pub csv: String,
}

/// One line-anchored problem found while reading a config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

struct Entry {
    value: String,
    line: usize,
}

const KEYS: &[(&str, &[&str])] = &[
    ("grid", &["L", "nx", "ny"]),
    ("hamiltonian", &["omega0_sq", "rotation", "modulation"]),
    ("nonlinear", &["g", "lambda", "potential"]),
    ("time", &["t0", "T"]),
    (
        "run",
        &["methods", "steps", "initial", "reference_method", "reference_factor", "magnus_order", "seed"],
    ),
    ("output", &["csv"]),
];

/// Parser state: raw entries plus the issues collected so far.
struct Reader {
    entries: BTreeMap<(String, String), Entry>,
    issues: Vec<ConfigIssue>,
}

impl Reader {
    fn scan(text: &str) -> Self {
        let mut r = Reader { entries: BTreeMap::new(), issues: Vec::new() };
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    r.issue(line, format!("unterminated section header `{content}`"));
                    continue;
                };
                let name = name.trim();
                if KEYS.iter().any(|(s, _)| *s == name) {
                    section = Some(name.to_string());
                } else {
                    let known: Vec<_> = KEYS.iter().map(|(s, _)| *s).collect();
                    r.issue(line, format!("unknown section `[{name}]`, expected one of {}", known.join(", ")));
                    section = None;
                }
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                r.issue(line, format!("expected `key = value`, found `{content}`"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(sec) = section.as_deref() else {
                r.issue(line, format!("`{key}` appears outside a known section"));
                continue;
            };
            let allowed = KEYS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                r.issue(line, format!("unknown key `{key}` in [{sec}], expected one of {}", allowed.join(", ")));
                continue;
            }
            let slot = (sec.to_string(), key.to_string());
            if let Some(prev) = r.entries.get(&slot) {
                r.issue(line, format!("duplicate key `{key}` (first set on line {})", prev.line));
                continue;
            }
            r.entries.insert(slot, Entry { value: value.to_string(), line });
        }
        r
    }

    fn issue(&mut self, line: usize, message: String) {
        self.issues.push(ConfigIssue { line, message });
    }

    fn take(&mut self, section: &str, key: &str) -> Option<Entry> {
        self.entries.remove(&(section.to_string(), key.to_string()))
    }

    fn require(&mut self, section: &str, key: &str) -> Option<Entry> {
        let e = self.take(section, key);
        if e.is_none() {
            self.issue(0, format!("missing `{key}` in [{section}]"));
        }
        e
    }

    fn parse<T>(&mut self, section: &str, key: &str, default: Option<T>, f: impl Fn(&str) -> std::result::Result<T, String>) -> Option<(T, usize)> {
        let entry = match default {
            Some(d) => match self.take(section, key) {
                Some(e) => e,
                None => return Some((d, 0)),
            },
            None => self.require(section, key)?,
        };
        match f(&entry.value) {
            Ok(v) => Some((v, entry.line)),
            Err(msg) => {
                self.issue(entry.line, format!("{key}: {msg}"));
                None
            }
        }
    }
}

fn real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn count(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn method(s: &str) -> std::result::Result<Method, String> {
    s.parse::<Method>().map_err(|e| match e {
        RotError::Invalid(m) => m,
        other => other.to_string(),
    })
}

fn list<T>(s: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    let items: Vec<&str> = s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
    if items.is_empty() {
        return Err("empty list".into());
    }
    items.into_iter().map(f).collect()
}

impl ExperimentConfig {
    /// Parses and statically validates; all issues are reported together.
    pub fn parse(text: &str) -> std::result::Result<Self, Vec<ConfigIssue>> {
        let mut r = Reader::scan(text);
        let l = r.parse("grid", "L", None, real);
        let nx = r.parse("grid", "nx", None, count);
        let ny = r.parse("grid", "ny", None, count);
        let omega0_sq = r.parse("hamiltonian", "omega0_sq", None, real);
        let rotation = r.parse("hamiltonian", "rotation", Some(0.0), real);
        let modulation = r.parse("hamiltonian", "modulation", Some(Modulation::SinHalf), |s| match s {
            "sin-half" => Ok(Modulation::SinHalf),
            "constant" => Ok(Modulation::Constant),
            _ => Err(format!("unknown modulation `{s}`, expected sin-half or constant")),
        });
        let g = r.parse("nonlinear", "g", Some(0.0), real);
        let lambda = r.parse("nonlinear", "lambda", Some(0.0), real);
        let potential = r.parse("nonlinear", "potential", Some(PotentialPreset::None), |s| {
            if s == "none" {
                return Ok(PotentialPreset::None);
            }
            match s.strip_prefix("harmonic:") {
                Some(c) => real(c).map(PotentialPreset::Harmonic),
                None => Err(format!("unknown potential `{s}`, expected none or harmonic:<c>")),
            }
        });
        let t0 = r.parse("time", "t0", Some(0.0), real);
        let t_end = r.parse("time", "T", None, real);
        let methods = r.parse("run", "methods", None, |s| list(s, method));
        let steps = r.parse("run", "steps", None, |s| list(s, count));
        let initial = r.parse("run", "initial", Some(InitialCondition::Vortex), |s| match s {
            "vortex" => Ok(InitialCondition::Vortex),
            "gaussian" => Ok(InitialCondition::Gaussian),
            _ => Err(format!("unknown initial condition `{s}`, expected vortex or gaussian")),
        });
        let reference_method = r.parse("run", "reference_method", Some(Method::Bm4Rot), method);
        let reference_factor = r.parse("run", "reference_factor", Some(MIN_REFERENCE_FACTOR), count);
        let magnus_order = r.parse("run", "magnus_order", Some(MagnusOrder::Four), |s| {
            count(s).ok().and_then(|p| MagnusOrder::from_value(p as u32)).ok_or_else(|| format!("`{s}` is not 2 or 4"))
        });
        let seed = r.parse("run", "seed", Some(0u64), |s| s.parse().map_err(|_| format!("`{s}` is not an integer")));
        let csv = r.parse("output", "csv", Some("results.csv".to_string()), |s| {
            if s.is_empty() {
                Err("empty file name".into())
            } else {
                Ok(s.to_string())
            }
        });

        // semantic checks, anchored at the offending line where known
        if let (Some((l, ll)), Some((nx, lx)), Some((ny, ly))) = (&l, &nx, &ny) {
            if !(*l > 0.0) {
                r.issue(*ll, format!("L must be positive, got {l}"));
            }
            for (n, line, name) in [(*nx, *lx, "nx"), (*ny, *ly, "ny")] {
                if n % 2 != 0 || n < 4 {
                    r.issue(line, format!("{name} must be even and at least 4, got {n}"));
                }
            }
        }
        if let Some((steps, line)) = &steps {
            if steps.iter().any(|&s| s == 0) {
                r.issue(*line, "step counts must be at least 1".into());
            }
            if steps.windows(2).any(|w| w[1] <= w[0]) {
                r.issue(*line, "step counts must be strictly increasing".into());
            }
        }
        if let Some((f, line)) = &reference_factor {
            if *f < MIN_REFERENCE_FACTOR {
                r.issue(*line, format!("reference_factor must be at least {MIN_REFERENCE_FACTOR}, got {f}"));
            }
        }
        if let (Some((t0, _)), Some((t1, line))) = (&t0, &t_end) {
            if !(*t1 > *t0) {
                r.issue(*line, format!("T = {t1} must exceed t0 = {t0}"));
            }
        }
        if let Some((lambda, line)) = &lambda {
            if *lambda < 0.0 {
                r.issue(*line, format!("lambda must be non-negative, got {lambda}"));
            } else if *lambda > 0.0 {
                if let Some((ms, mline)) = &methods {
                    for m in ms.iter().filter(|m| m.uses_negative_steps()) {
                        r.issue(*mline, format!("{m} takes negative substeps and is unstable with lambda > 0"));
                    }
                }
                if let Some((m, rline)) = &reference_method {
                    if m.uses_negative_steps() {
                        let rline = if *rline == 0 { *line } else { *rline };
                        r.issue(rline, format!("reference_method {m} takes negative substeps; use ROT2 or STD2 with lambda > 0"));
                    }
                }
            }
        }
        if let (Some((Modulation::SinHalf, line)), Some((w, _))) = (&modulation, &omega0_sq) {
            if *w < 1.0 {
                r.issue(*line, format!("sin-half modulation needs omega0_sq >= 1 to keep omega_y^2 >= 0, got {w}"));
            }
        }

        if !r.issues.is_empty() {
            r.issues.sort_by_key(|i| i.line);
            return Err(r.issues);
        }
        let grid = GridSpec::new(l.unwrap().0, nx.unwrap().0, ny.unwrap().0).map_err(|e| {
            vec![ConfigIssue { line: 0, message: e.to_string() }]
        })?;
        Ok(ExperimentConfig {
            grid,
            omega0_sq: omega0_sq.unwrap().0,
            rotation: rotation.unwrap().0,
            modulation: modulation.unwrap().0,
            g: g.unwrap().0,
            lambda: lambda.unwrap().0,
            potential: potential.unwrap().0,
            t0: t0.unwrap().0,
            t_end: t_end.unwrap().0,
            methods: methods.unwrap().0,
            steps: steps.unwrap().0,
            initial: initial.unwrap().0,
            reference_method: reference_method.unwrap().0,
            reference_factor: reference_factor.unwrap().0,
            magnus_order: magnus_order.unwrap().0,
            seed: seed.unwrap().0,
            csv: csv.unwrap().0,
        })
    }

    /// Reads `path`; issues come back as one [`RotError::Config`] per file,
    /// anchored at the first problem and listing the rest.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|issues| config_error(&path.display().to_string(), &issues))
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = preset_text(name)?;
        Self::parse(text).map_err(|issues| config_error(&format!("preset {name}"), &issues))
    }

    pub fn hamiltonian(&self) -> QuadraticHamiltonian {
        match self.modulation {
            Modulation::SinHalf => QuadraticHamiltonian::modulated_trap(self.omega0_sq, self.rotation),
            Modulation::Constant => QuadraticHamiltonian::autonomous(self.omega0_sq, self.omega0_sq, self.rotation),
        }
    }

    pub fn nonlinear_term(&self) -> NonlinearTerm {
        let mut term = NonlinearTerm::cubic(self.g).with_damping(self.lambda);
        if let PotentialPreset::Harmonic(c) = self.potential {
            let v: PotentialFn = Arc::new(move |x, y, _| 0.5 * c * (x * x + y * y));
            term = term.with_potential(v);
        }
        term
    }

    pub fn problem(&self) -> Result<Problem> {
        Problem::new(self.hamiltonian(), self.nonlinear_term(), self.magnus_order)
    }

    pub fn initial_state(&self, grid: &Arc<Grid>) -> Result<WaveFunction> {
        let mut psi = match self.initial {
            InitialCondition::Vortex => WaveFunction::from_fn(grid.clone(), |x, y| {
                Complex64::new(x, y) * (-(x * x + y * y) / 2.0).exp()
            }),
            InitialCondition::Gaussian => {
                WaveFunction::from_fn(grid.clone(), |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0))
            }
        };
        psi.normalize()?;
        Ok(psi)
    }

    pub fn reference_steps(&self) -> usize {
        self.reference_factor * self.steps.iter().copied().max().unwrap_or(1)
    }
}

fn config_error(path: &str, issues: &[ConfigIssue]) -> RotError {
    let first = &issues[0];
    let mut message = first.message.clone();
    for other in &issues[1..] {
        message.push_str(&format!("\n  {other}"));
    }
    RotError::Config { path: path.to_string(), line: first.line, message }
}

pub const PRESET_NAMES: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

pub fn preset_text(name: &str) -> Result<&'static str> {
    match name {
        "fig1" => Ok(include_str!("../presets/fig1.cfg")),
        "fig2" => Ok(include_str!("../presets/fig2.cfg")),
        "fig3" => Ok(include_str!("../presets/fig3.cfg")),
        "fig4" => Ok(include_str!("../presets/fig4.cfg")),
        _ => Err(RotError::Invalid(format!(
            "unknown preset `{name}`, expected one of {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

//! Flat `key = value` config files with `[section]` headers.
//!
//! The format is deliberately plain text so sweep configs diff cleanly:
//! blank lines and `#` comments are ignored, keys live in the most recent
//! section. One file describes either a single run (`[run]`) or a sweep
//! (`[sweep]` plus template sections shared by every cell).

use crate::drift::{self, DriftClass, DriftSpec};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::solver::{AdvectionScheme, RunConfig, DEFAULT_BLOWUP_FACTOR, DEFAULT_DT_FLOOR};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Raw parsed config: section -> key -> value.
#[derive(Clone, Debug, Default)]
pub struct LabConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl LabConfig {
    pub fn parse(text: &str) -> Result<LabConfig> {
        let mut cfg = LabConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(Error::Config(format!(
                        "line {}: malformed section header `{raw}`",
                        lineno + 1
                    )));
                }
                section = line[1..line.len() - 1].trim().to_string();
                cfg.sections.entry(section.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            cfg.sections
                .entry(section.clone())
                .or_default()
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<LabConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        LabConfig::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|s| s.as_str())
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn f64_of(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(s) => parse_f64(s)
                .map(Some)
                .map_err(|e| Error::Config(format!("[{section}] {key}: {e}"))),
        }
    }

    fn usize_of(&self, section: &str, key: &str) -> Result<Option<usize>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(s) => s
                .parse::<usize>()
                .map(Some)
                .map_err(|e| Error::Config(format!("[{section}] {key}: {e}"))),
        }
    }

    fn u64_of(&self, section: &str, key: &str) -> Result<Option<u64>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(s) => s
                .parse::<u64>()
                .map(Some)
                .map_err(|e| Error::Config(format!("[{section}] {key}: {e}"))),
        }
    }

    fn bool_of(&self, section: &str, key: &str) -> Result<Option<bool>> {
        match self.get(section, key) {
            None => Ok(None),
            Some("true") | Some("1") | Some("yes") => Ok(Some(true)),
            Some("false") | Some("0") | Some("no") => Ok(Some(false)),
            Some(other) => Err(Error::Config(format!("[{section}] {key}: not a bool: {other}"))),
        }
    }
}

pub fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|e| e.to_string()),
    }
}

/// Compact float rendering used in file names, CSV cells and reports:
/// shortest round-trip digits, switching to scientific notation for extreme
/// magnitudes, `inf` for the unbounded exponent.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v != 0.0 && (v.abs() >= 1e6 || v.abs() < 1e-4) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Initial-datum shape.
#[derive(Clone, Debug, PartialEq)]
pub enum U0Shape {
    /// `mass * N(center, width^2)`.
    Gaussian { width: f64, center: f64 },
    /// Symmetric pair of bumps of combined unit shape at `+-offset`.
    DoubleBump { width: f64, offset: f64 },
    /// The closed-form stationary profile paired with the cell's class and
    /// exponents (subcritical cells only; carries its own mass).
    Stationary,
    /// Stationary profile for subcritical cells, `mass`-normalized Gaussian
    /// of width `width` otherwise (the sweep-template choice).
    Auto { width: f64 },
}

impl U0Shape {
    pub fn sample(&self, grid: Grid, mass: f64) -> Field {
        let norm = |w: f64| 1.0 / (w * (2.0 * std::f64::consts::PI).sqrt());
        match self {
            U0Shape::Stationary | U0Shape::Auto { .. } => {
                panic!("regime-dependent data are resolved by RunSpec::build, not sampled directly")
            }
            U0Shape::Gaussian { width, center } => {
                let a = mass * norm(*width);
                Field::from_fn(grid, |x| {
                    a * (-(x - center) * (x - center) / (2.0 * width * width)).exp()
                })
            }
            U0Shape::DoubleBump { width, offset } => {
                let a = 0.5 * mass * norm(*width);
                Field::from_fn(grid, |x| {
                    a * ((-(x - offset) * (x - offset) / (2.0 * width * width)).exp()
                        + (-(x + offset) * (x + offset) / (2.0 * width * width)).exp())
                })
            }
        }
    }
}

/// Drift selection for a run.
#[derive(Clone, Debug, PartialEq)]
pub enum DriftChoice {
    /// Pick by regime: stationary pair below critical, a bounded unit drift
    /// at critical, the class's blow-up family above.
    Auto,
    Stationary,
    Constant { level: f64 },
    Saturating { amplitude: f64 },
    InverseTail { amplitude: f64 },
    Blowup { alpha: Option<f64>, beta: Option<f64>, x_bar: Option<f64>, eps: Option<f64> },
    Table { path: String },
}

/// Everything needed to run one cell.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub case: DriftClass,
    pub p: f64,
    pub k: f64,
    pub t_max: f64,
    pub seed: u64,
    pub mass: f64,
    pub u0: U0Shape,
    pub grid_l: f64,
    pub grid_n: usize,
    pub drift: DriftChoice,
    pub blowup_factor: f64,
    pub dt_floor: f64,
    pub dt_max: Option<f64>,
    pub cfl_number: f64,
    pub theta: f64,
    pub diagnostics_stride: usize,
    pub scheme: AdvectionScheme,
    /// Decay-exponent fit window; defaults to `[t_max/10, t_max]`.
    pub fit_window: Option<(f64, f64)>,
    pub selfsim: Option<SelfsimSpec>,
}

/// Self-similar diagnostics settings for a run.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfsimSpec {
    /// Number of frames on the uniform tau mesh (including tau = 0).
    pub frames: usize,
    /// Reference time as a multiple of `t_max` (must exceed 1).
    pub t_ref_factor: f64,
    pub y_half_width: f64,
    pub y_n: usize,
    /// Candidate truncation levels swept for the dissipation inequality.
    pub level_candidates: Vec<f64>,
}

impl Default for SelfsimSpec {
    fn default() -> Self {
        SelfsimSpec {
            frames: 40,
            t_ref_factor: 1.01,
            y_half_width: 4.0,
            y_n: 2048,
            level_candidates: vec![0.8, 0.4, 0.2, 0.1, 0.05, 0.025],
        }
    }
}

fn parse_case(s: &str) -> Result<DriftClass> {
    match s {
        "weak_lp" => Ok(DriftClass::WeakLp),
        "grad_weak_lp" => Ok(DriftClass::GradWeakLp),
        other => Err(Error::Config(format!(
            "unknown drift class `{other}` (expected weak_lp or grad_weak_lp)"
        ))),
    }
}

fn parse_drift_choice(cfg: &LabConfig) -> Result<DriftChoice> {
    let family = cfg.get("drift", "family").unwrap_or("auto");
    match family {
        "auto" => Ok(DriftChoice::Auto),
        "stationary" => Ok(DriftChoice::Stationary),
        "constant" => Ok(DriftChoice::Constant {
            level: cfg.f64_of("drift", "level")?.unwrap_or(-1.0),
        }),
        "saturating" => Ok(DriftChoice::Saturating {
            amplitude: cfg.f64_of("drift", "amplitude")?.unwrap_or(1.0),
        }),
        "inverse_tail" => Ok(DriftChoice::InverseTail {
            amplitude: cfg.f64_of("drift", "amplitude")?.unwrap_or(1.0),
        }),
        "blowup" => Ok(DriftChoice::Blowup {
            alpha: cfg.f64_of("drift", "alpha")?,
            beta: cfg.f64_of("drift", "beta")?,
            x_bar: cfg.f64_of("drift", "x_bar")?,
            eps: cfg.f64_of("drift", "eps")?,
        }),
        "table" => {
            let path = cfg
                .get("drift", "path")
                .ok_or_else(|| Error::Config("drift family `table` needs `path`".into()))?;
            Ok(DriftChoice::Table { path: path.to_string() })
        }
        other => Err(Error::Config(format!("unknown drift family `{other}`"))),
    }
}

fn parse_u0(cfg: &LabConfig) -> Result<U0Shape> {
    let shape = cfg.get("run", "u0").unwrap_or("gaussian");
    let width = cfg.f64_of("run", "u0_width")?.unwrap_or(0.5);
    match shape {
        "gaussian" => Ok(U0Shape::Gaussian {
            width,
            center: cfg.f64_of("run", "u0_center")?.unwrap_or(0.0),
        }),
        "double_bump" => Ok(U0Shape::DoubleBump {
            width,
            offset: cfg.f64_of("run", "u0_offset")?.unwrap_or(1.0),
        }),
        "stationary" => Ok(U0Shape::Stationary),
        "auto" => Ok(U0Shape::Auto { width }),
        other => Err(Error::Config(format!("unknown u0 shape `{other}`"))),
    }
}

fn parse_scheme(s: Option<&str>) -> Result<AdvectionScheme> {
    match s {
        None | Some("muscl") => Ok(AdvectionScheme::Muscl),
        Some("upwind1") => Ok(AdvectionScheme::FirstOrderUpwind),
        Some(other) => Err(Error::Config(format!("unknown scheme `{other}`"))),
    }
}

impl RunSpec {
    /// Parse a `[run]` config (sections `run`, `grid`, `drift`, `solver`,
    /// `selfsim`).
    pub fn from_config(cfg: &LabConfig) -> Result<RunSpec> {
        if !cfg.has_section("run") {
            return Err(Error::Config("missing [run] section".into()));
        }
        let case = parse_case(cfg.get("run", "case").unwrap_or("weak_lp"))?;
        let p = cfg
            .f64_of("run", "p")?
            .ok_or_else(|| Error::Config("missing [run] p".into()))?;
        let k_raw = cfg
            .get("run", "k")
            .ok_or_else(|| Error::Config("missing [run] k".into()))?;
        let k = parse_k_entry(k_raw)?.resolve(case, p);
        let t_max = cfg.f64_of("run", "t_max")?.unwrap_or(10.0);
        let selfsim = if cfg.bool_of("selfsim", "enabled")?.unwrap_or(false) {
            let d = SelfsimSpec::default();
            Some(SelfsimSpec {
                frames: cfg.usize_of("selfsim", "frames")?.unwrap_or(d.frames),
                t_ref_factor: cfg.f64_of("selfsim", "t_ref_factor")?.unwrap_or(d.t_ref_factor),
                y_half_width: cfg.f64_of("selfsim", "y_half_width")?.unwrap_or(d.y_half_width),
                y_n: cfg.usize_of("selfsim", "y_n")?.unwrap_or(d.y_n),
                level_candidates: match cfg.get("selfsim", "levels") {
                    None => d.level_candidates,
                    Some(s) => parse_list(s)?,
                },
            })
        } else {
            None
        };
        let fit_window = match (cfg.f64_of("run", "fit_t_lo")?, cfg.f64_of("run", "fit_t_hi")?) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => return Err(Error::Config("fit_t_lo and fit_t_hi must be given together".into())),
        };
        Ok(RunSpec {
            case,
            p,
            k,
            t_max,
            seed: cfg.u64_of("run", "seed")?.unwrap_or(0),
            mass: cfg.f64_of("run", "mass")?.unwrap_or(1.0),
            u0: parse_u0(cfg)?,
            grid_l: cfg.f64_of("grid", "half_width")?.unwrap_or(30.0),
            grid_n: cfg.usize_of("grid", "n_cells")?.unwrap_or(4096),
            drift: parse_drift_choice(cfg)?,
            blowup_factor: cfg
                .f64_of("solver", "blowup_threshold_factor")?
                .unwrap_or(DEFAULT_BLOWUP_FACTOR),
            dt_floor: cfg.f64_of("solver", "dt_floor")?.unwrap_or(DEFAULT_DT_FLOOR),
            dt_max: cfg.f64_of("solver", "dt_max")?,
            cfl_number: cfg.f64_of("solver", "cfl")?.unwrap_or(0.45),
            theta: cfg.f64_of("solver", "theta")?.unwrap_or(0.5),
            diagnostics_stride: cfg.usize_of("solver", "diagnostics_stride")?.unwrap_or(10),
            scheme: parse_scheme(cfg.get("solver", "scheme"))?,
            fit_window,
            selfsim,
        })
    }

    /// Critical exponent for this cell's class and p.
    pub fn critic(&self) -> f64 {
        self.case.critical_exponent(self.p)
    }

    /// Resolve the drift choice into a concrete spec (grid-dependent through
    /// the default smoothing scale).
    pub fn build_drift(&self, grid: Grid) -> Result<DriftSpec> {
        let critic = self.critic();
        let eps_default = grid.dx();
        match &self.drift {
            DriftChoice::Constant { level } => Ok(DriftSpec::constant(*level)),
            DriftChoice::Saturating { amplitude } => Ok(DriftSpec::saturating(*amplitude)),
            DriftChoice::InverseTail { amplitude } => DriftSpec::inverse_tail(*amplitude, self.p),
            DriftChoice::Table { path } => load_drift_table(Path::new(path)),
            DriftChoice::Stationary => self.stationary_drift(),
            DriftChoice::Blowup { alpha, beta, x_bar, eps } => {
                self.blowup_drift(*alpha, *beta, *x_bar, eps.unwrap_or(eps_default))
            }
            DriftChoice::Auto => {
                if self.k < critic - 1e-9 {
                    self.stationary_drift()
                } else if self.k <= critic + 1e-9 {
                    match self.case {
                        DriftClass::WeakLp => {
                            if self.p.is_infinite() {
                                Ok(DriftSpec::constant(-1.0))
                            } else {
                                DriftSpec::inverse_tail(1.0, self.p)
                            }
                        }
                        DriftClass::GradWeakLp => Ok(DriftSpec::saturating(1.0)),
                    }
                } else {
                    self.blowup_drift(None, None, None, eps_default)
                }
            }
        }
    }

    fn stationary_pair(&self) -> Result<drift::StationaryPair> {
        match self.case {
            DriftClass::WeakLp => drift::stationary_pair_weak_lp(self.p, self.k),
            DriftClass::GradWeakLp => drift::stationary_pair_grad_weak_lp(self.p, self.k),
        }
    }

    fn stationary_drift(&self) -> Result<DriftSpec> {
        Ok(self.stationary_pair()?.drift)
    }

    fn blowup_drift(
        &self,
        alpha: Option<f64>,
        beta: Option<f64>,
        x_bar: Option<f64>,
        eps: f64,
    ) -> Result<DriftSpec> {
        match self.case {
            DriftClass::WeakLp => {
                let alpha = alpha.unwrap_or(0.5 / self.p);
                let beta = beta.unwrap_or(4.0 / self.p);
                let x_bar = x_bar.unwrap_or(1.0);
                drift::blowup_drift_weak_lp(alpha, beta, x_bar, eps, self.k, self.p)
            }
            DriftClass::GradWeakLp => {
                let alpha = alpha.unwrap_or_else(|| (0.75 * (self.k - 1.0)).min(1.0));
                let x_bar = x_bar.unwrap_or_else(|| {
                    ((self.k - 1.0) / (self.k - (alpha + 1.0))).powf(self.k / alpha) * 1.0001
                });
                drift::blowup_drift_grad_weak_lp(alpha, x_bar, eps, self.k, self.p)
            }
        }
    }

    /// Assemble the solver configuration (grid, initial datum, drift).
    pub fn build(&self) -> Result<RunConfig> {
        let grid = Grid::new(self.grid_l, self.grid_n)?;
        let u0 = match &self.u0 {
            U0Shape::Stationary => self.stationary_pair()?.sample(grid),
            U0Shape::Auto { width } => {
                if self.k < self.critic() - 1e-9 {
                    self.stationary_pair()?.sample(grid)
                } else {
                    U0Shape::Gaussian { width: *width, center: 0.0 }.sample(grid, self.mass)
                }
            }
            shape => shape.sample(grid, self.mass),
        };
        let drift = self.build_drift(grid)?;
        let mut rc = RunConfig::new(self.k, drift, u0, self.t_max)?;
        rc.blowup_threshold = self.blowup_factor * rc.u0.norm_sup();
        rc.dt_floor = self.dt_floor;
        if let Some(dt_max) = self.dt_max {
            rc.dt_max = dt_max;
        }
        rc.cfl_number = self.cfl_number;
        rc.theta = self.theta;
        rc.diagnostics_stride = self.diagnostics_stride;
        rc.scheme = self.scheme;
        if let Some(ss) = &self.selfsim {
            let t_ref = ss.t_ref_factor * self.t_max;
            let dtau = (t_ref / (t_ref - self.t_max)).ln() / (ss.frames.max(2) - 1) as f64;
            rc.snapshot_times = (0..ss.frames)
                .map(|j| t_ref * (1.0 - (-dtau * j as f64).exp()))
                .collect();
        }
        Ok(rc)
    }

    /// Deterministic config-text rendering (what gets copied into cell dirs).
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "case = {}", self.case.name());
        let _ = writeln!(s, "p = {}", fmt_f64(self.p));
        let _ = writeln!(s, "k = {}", fmt_f64(self.k));
        let _ = writeln!(s, "t_max = {}", fmt_f64(self.t_max));
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "mass = {}", fmt_f64(self.mass));
        match &self.u0 {
            U0Shape::Gaussian { width, center } => {
                let _ = writeln!(s, "u0 = gaussian");
                let _ = writeln!(s, "u0_width = {}", fmt_f64(*width));
                let _ = writeln!(s, "u0_center = {}", fmt_f64(*center));
            }
            U0Shape::DoubleBump { width, offset } => {
                let _ = writeln!(s, "u0 = double_bump");
                let _ = writeln!(s, "u0_width = {}", fmt_f64(*width));
                let _ = writeln!(s, "u0_offset = {}", fmt_f64(*offset));
            }
            U0Shape::Stationary => {
                let _ = writeln!(s, "u0 = stationary");
            }
            U0Shape::Auto { width } => {
                let _ = writeln!(s, "u0 = auto");
                let _ = writeln!(s, "u0_width = {}", fmt_f64(*width));
            }
        }
        if let Some((lo, hi)) = self.fit_window {
            let _ = writeln!(s, "fit_t_lo = {}", fmt_f64(lo));
            let _ = writeln!(s, "fit_t_hi = {}", fmt_f64(hi));
        }
        let _ = writeln!(s, "\n[grid]");
        let _ = writeln!(s, "half_width = {}", fmt_f64(self.grid_l));
        let _ = writeln!(s, "n_cells = {}", self.grid_n);
        let _ = writeln!(s, "\n[drift]");
        match &self.drift {
            DriftChoice::Auto => {
                let _ = writeln!(s, "family = auto");
            }
            DriftChoice::Stationary => {
                let _ = writeln!(s, "family = stationary");
            }
            DriftChoice::Constant { level } => {
                let _ = writeln!(s, "family = constant");
                let _ = writeln!(s, "level = {}", fmt_f64(*level));
            }
            DriftChoice::Saturating { amplitude } => {
                let _ = writeln!(s, "family = saturating");
                let _ = writeln!(s, "amplitude = {}", fmt_f64(*amplitude));
            }
            DriftChoice::InverseTail { amplitude } => {
                let _ = writeln!(s, "family = inverse_tail");
                let _ = writeln!(s, "amplitude = {}", fmt_f64(*amplitude));
            }
            DriftChoice::Blowup { alpha, beta, x_bar, eps } => {
                let _ = writeln!(s, "family = blowup");
                if let Some(v) = alpha {
                    let _ = writeln!(s, "alpha = {}", fmt_f64(*v));
                }
                if let Some(v) = beta {
                    let _ = writeln!(s, "beta = {}", fmt_f64(*v));
                }
                if let Some(v) = x_bar {
                    let _ = writeln!(s, "x_bar = {}", fmt_f64(*v));
                }
                if let Some(v) = eps {
                    let _ = writeln!(s, "eps = {}", fmt_f64(*v));
                }
            }
            DriftChoice::Table { path } => {
                let _ = writeln!(s, "family = table");
                let _ = writeln!(s, "path = {path}");
            }
        }
        let _ = writeln!(s, "\n[solver]");
        let _ = writeln!(s, "blowup_threshold_factor = {}", fmt_f64(self.blowup_factor));
        let _ = writeln!(s, "dt_floor = {}", fmt_f64(self.dt_floor));
        if let Some(v) = self.dt_max {
            let _ = writeln!(s, "dt_max = {}", fmt_f64(v));
        }
        let _ = writeln!(s, "cfl = {}", fmt_f64(self.cfl_number));
        let _ = writeln!(s, "theta = {}", fmt_f64(self.theta));
        let _ = writeln!(s, "diagnostics_stride = {}", self.diagnostics_stride);
        let _ = writeln!(
            s,
            "scheme = {}",
            match self.scheme {
                AdvectionScheme::Muscl => "muscl",
                AdvectionScheme::FirstOrderUpwind => "upwind1",
            }
        );
        if let Some(ss) = &self.selfsim {
            let _ = writeln!(s, "\n[selfsim]");
            let _ = writeln!(s, "enabled = true");
            let _ = writeln!(s, "frames = {}", ss.frames);
            let _ = writeln!(s, "t_ref_factor = {}", fmt_f64(ss.t_ref_factor));
            let _ = writeln!(s, "y_half_width = {}", fmt_f64(ss.y_half_width));
            let _ = writeln!(s, "y_n = {}", ss.y_n);
            let levels: Vec<String> = ss.level_candidates.iter().map(|v| fmt_f64(*v)).collect();
            let _ = writeln!(s, "levels = {}", levels.join(", "));
        }
        s
    }
}

/// Entry of a sweep's k list: absolute or an offset from the critical value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KEntry {
    Absolute(f64),
    CriticOffset(f64),
}

impl KEntry {
    pub fn resolve(&self, case: DriftClass, p: f64) -> f64 {
        match self {
            KEntry::Absolute(v) => *v,
            KEntry::CriticOffset(d) => case.critical_exponent(p) + d,
        }
    }
}

pub fn parse_k_entry(s: &str) -> Result<KEntry> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("critic") {
        let rest = rest.trim();
        if rest.is_empty() {
            return Ok(KEntry::CriticOffset(0.0));
        }
        let v = parse_f64(rest).map_err(|e| Error::Config(format!("bad k entry `{s}`: {e}")))?;
        return Ok(KEntry::CriticOffset(v));
    }
    parse_f64(s)
        .map(KEntry::Absolute)
        .map_err(|e| Error::Config(format!("bad k entry `{s}`: {e}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| parse_f64(tok.trim()).map_err(|e| Error::Config(format!("bad list entry: {e}"))))
        .collect()
}

/// A sweep: the cross product of `p_list` and `k_list` over one template.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub case: DriftClass,
    pub p_list: Vec<f64>,
    pub k_list: Vec<KEntry>,
    pub jobs: usize,
    pub seed: u64,
    /// Template for every cell; `case`, `p`, `k` and `seed` are overridden
    /// per cell.
    pub template: RunSpec,
}

impl SweepSpec {
    pub fn from_config(cfg: &LabConfig) -> Result<SweepSpec> {
        if !cfg.has_section("sweep") {
            return Err(Error::Config("missing [sweep] section".into()));
        }
        let case = parse_case(cfg.get("sweep", "case").unwrap_or("weak_lp"))?;
        let p_list = parse_list(
            cfg.get("sweep", "p_list")
                .ok_or_else(|| Error::Config("missing [sweep] p_list".into()))?,
        )?;
        let k_list: Vec<KEntry> = cfg
            .get("sweep", "k_list")
            .ok_or_else(|| Error::Config("missing [sweep] k_list".into()))?
            .split(',')
            .map(parse_k_entry)
            .collect::<Result<_>>()?;
        let seed = cfg.u64_of("sweep", "seed")?.unwrap_or(0);

        // template from the same file; [run] p/k may be absent
        let mut shadow = cfg.clone();
        let run = shadow.sections.entry("run".into()).or_default();
        run.entry("p".into()).or_insert_with(|| "2".into());
        run.entry("k".into()).or_insert_with(|| "1".into());
        let template = RunSpec::from_config(&shadow)?;
        Ok(SweepSpec {
            case,
            p_list,
            k_list,
            jobs: cfg.usize_of("sweep", "jobs")?.unwrap_or(1).max(1),
            seed,
            template,
        })
    }

    /// Per-cell specs in deterministic (p, k) order.
    pub fn cells(&self) -> Vec<RunSpec> {
        let mut out = Vec::new();
        for &p in &self.p_list {
            for ke in &self.k_list {
                let mut spec = self.template.clone();
                spec.case = self.case;
                spec.p = p;
                spec.k = ke.resolve(self.case, p);
                spec.seed = self.seed;
                out.push(spec);
            }
        }
        out
    }
}

/// Load a two-column `x b` text table (whitespace or comma separated;
/// `#` comments allowed).
pub fn load_drift_table(path: &Path) -> Result<DriftSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read drift table {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut bs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty());
        let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
            return Err(Error::Config(format!(
                "drift table line {}: expected two columns",
                lineno + 1
            )));
        };
        xs.push(parse_f64(a).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?);
        bs.push(parse_f64(b).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?);
    }
    DriftSpec::from_table(xs, bs)
}

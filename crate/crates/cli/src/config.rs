//! Flat `key = value` configuration with command-line overrides.
//!
//! Every key has a default, so an empty file is a valid configuration. The
//! resolved configuration can be written back out with [`Config::to_text`],
//! which materializes every default and parses back to the same values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use tfem_core::model::RecordKind;
use tfem_core::spectral::default_sweep_grid;
use tfem_core::{AlgorithmId, InitialConditions, OscillatorParams};

use crate::ingest::{RecordFormat, RecordSource};

/// Recognized keys, in the order they are echoed.
pub const KEYS: &[&str] = &[
    "alg",
    "m",
    "c",
    "a",
    "tn",
    "xi",
    "u0",
    "v0",
    "jhat0",
    "forcing",
    "record_kind",
    "record_format",
    "record_dt",
    "record_header_lines",
    "record_points",
    "scale",
    "h",
    "duration",
    "levels",
    "grid",
    "damping",
    "out",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid configuration:\n  {}", .problems.join("\n  "))]
pub struct ConfigError {
    pub problems: Vec<String>,
}

/// Which command the configuration is resolved for; selects defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Simulate,
    Spectrum,
    PeTable,
    Converge,
    ValidateMatrices,
}

/// Unresolved key-value pairs. Later inserts override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
    problems: Vec<String>,
}

impl RawConfig {
    /// Parses `key = value` lines; `#` starts a comment. Keys are
    /// case-insensitive and `-` is read as `_`.
    pub fn parse(text: &str) -> Self {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => raw.set(k, v.trim()),
                None => raw.problems.push(format!("line {}: expected `key = value`, got {line:?}", i + 1)),
            }
        }
        raw
    }

    pub fn set(&mut self, key: &str, value: &str) {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        self.entries.insert(key, value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Resolves every key, reporting all problems at once.
    pub fn resolve(&self, cmd: CommandKind) -> Result<Config, ConfigError> {
        let mut r = Resolver { raw: self, problems: self.problems.clone() };
        for key in self.entries.keys() {
            if !KEYS.contains(&key.as_str()) {
                r.problems.push(format!("unknown key `{key}` (valid keys: {})", KEYS.join(", ")));
            }
        }
        let config = r.build(cmd);
        if r.problems.is_empty() {
            Ok(config.expect("resolution without problems yields a config"))
        } else {
            Err(ConfigError { problems: r.problems })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingChoice {
    Zero,
    Sinusoid { f0: f64, omega0: f64 },
    Record(PathBuf),
}

impl ForcingChoice {
    fn to_text(&self) -> String {
        match self {
            ForcingChoice::Zero => "zero".into(),
            ForcingChoice::Sinusoid { f0, omega0 } => format!("sin:{f0},{omega0}"),
            ForcingChoice::Record(p) => format!("record:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    /// 60 log-spaced points over [0.01, 10] plus the two stability edges.
    Default,
    /// `n` points from `lo` to `hi` inclusive.
    Linear { lo: f64, hi: f64, n: usize },
    Log { lo: f64, hi: f64, n: usize },
    List(Vec<f64>),
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::Default => default_sweep_grid(),
            GridSpec::Linear { lo, hi, n } => spaced(*lo, *hi, *n, |x| x, |x| x),
            GridSpec::Log { lo, hi, n } => spaced(*lo, *hi, *n, f64::ln, f64::exp),
            GridSpec::List(v) => v.clone(),
        }
    }

    fn to_text(&self) -> String {
        match self {
            GridSpec::Default => "default".into(),
            GridSpec::Linear { lo, hi, n } => format!("lin:{lo},{hi},{n}"),
            GridSpec::Log { lo, hi, n } => format!("log:{lo},{hi},{n}"),
            GridSpec::List(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        }
    }
}

fn spaced(lo: f64, hi: f64, n: usize, fwd: fn(f64) -> f64, back: fn(f64) -> f64) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (fwd(lo), fwd(hi));
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => back(a + (b - a) * i as f64 / (n - 1) as f64),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingMode {
    Undamped,
    Damped,
    Both,
}

impl DampingMode {
    pub fn flags(self) -> &'static [bool] {
        match self {
            DampingMode::Undamped => &[false],
            DampingMode::Damped => &[true],
            DampingMode::Both => &[false, true],
        }
    }

    fn name(self) -> &'static str {
        match self {
            DampingMode::Undamped => "undamped",
            DampingMode::Damped => "damped",
            DampingMode::Both => "both",
        }
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub algs: Vec<AlgorithmId>,
    pub params: OscillatorParams,
    pub ics: InitialConditions,
    pub jhat0: f64,
    pub forcing: ForcingChoice,
    pub record_kind: RecordKind,
    pub record_format: RecordFormat,
    pub record_dt: Option<f64>,
    pub record_header_lines: usize,
    pub record_points: Option<usize>,
    pub scale: Option<f64>,
    pub h: f64,
    pub duration: f64,
    pub levels: usize,
    pub grid: GridSpec,
    pub damping: DampingMode,
    pub out: PathBuf,
}

impl Config {
    /// Number of steps covering `duration` at step `h`.
    pub fn n_steps(&self) -> usize {
        ((self.duration / self.h).round() as usize).max(1)
    }

    pub fn record_source(&self) -> Option<RecordSource> {
        match &self.forcing {
            ForcingChoice::Record(path) => Some(RecordSource {
                path: path.clone(),
                format: self.record_format,
                dt: self.record_dt,
                header_lines: self.record_header_lines,
                declared_points: self.record_points,
                kind: self.record_kind,
                scale: self.scale.unwrap_or(1.0),
            }),
            _ => None,
        }
    }

    /// Every key with its resolved value, one `key = value` per line.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let d = p.derived_properties();
        let opt = |x: Option<f64>| x.map_or_else(|| "none".to_string(), |v| v.to_string());
        let values: [(&str, String); 20] = [
            ("alg", self.algs.iter().map(|a| a.name()).collect::<Vec<_>>().join(",")),
            ("m", p.m().to_string()),
            ("c", p.c().to_string()),
            ("a", p.a().to_string()),
            ("u0", self.ics.u0.to_string()),
            ("v0", self.ics.v0.to_string()),
            ("jhat0", self.jhat0.to_string()),
            ("forcing", self.forcing.to_text()),
            (
                "record_kind",
                match self.record_kind {
                    RecordKind::Force => "force",
                    RecordKind::GroundAcceleration => "ground-accel",
                }
                .into(),
            ),
            ("record_format", self.record_format.name().into()),
            ("record_dt", opt(self.record_dt)),
            ("record_header_lines", self.record_header_lines.to_string()),
            ("record_points", self.record_points.map_or_else(|| "none".into(), |n| n.to_string())),
            ("scale", opt(self.scale)),
            ("h", self.h.to_string()),
            ("duration", self.duration.to_string()),
            ("levels", self.levels.to_string()),
            ("grid", self.grid.to_text()),
            ("damping", self.damping.name().into()),
            ("out", self.out.display().to_string()),
        ];
        // The system is echoed as (m, c, a); the modal form is informational.
        let mut out = format!("# tn = {}, xi = {}, omega_n = {}\n", d.tn, d.xi, d.omega_n);
        for (k, v) in values {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

struct Resolver<'a> {
    raw: &'a RawConfig,
    problems: Vec<String>,
}

impl<'a> Resolver<'a> {
    fn text(&self, key: &str) -> Option<&'a str> {
        self.raw.get(key).filter(|v| !v.eq_ignore_ascii_case("none") && !v.is_empty())
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        let v = self.text(key)?;
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Some(x),
            _ => {
                self.problems.push(format!("`{key}`: expected a finite number, got {v:?}"));
                None
            }
        }
    }

    fn positive(&mut self, key: &str) -> Option<f64> {
        let x = self.float(key)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.problems.push(format!("`{key}`: must be positive, got {x}"));
            None
        }
    }

    fn count(&mut self, key: &str) -> Option<usize> {
        let v = self.text(key)?;
        match v.parse::<usize>() {
            Ok(n) => Some(n),
            Err(_) => {
                self.problems.push(format!("`{key}`: expected a non-negative integer, got {v:?}"));
                None
            }
        }
    }

    fn algs(&mut self) -> Vec<AlgorithmId> {
        let Some(v) = self.text("alg") else {
            return AlgorithmId::ALL.to_vec();
        };
        let mut out = Vec::new();
        for name in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name.to_ascii_lowercase().as_str() {
                "all" => out.extend(AlgorithmId::ALL),
                "tfem" => out.extend(AlgorithmId::TFEM),
                _ => match name.parse::<AlgorithmId>() {
                    Ok(a) => out.push(a),
                    Err(e) => self.problems.push(format!("`alg`: {name:?}: {e}")),
                },
            }
        }
        let mut seen = Vec::new();
        out.retain(|a| {
            let fresh = !seen.contains(a);
            seen.push(*a);
            fresh
        });
        if out.is_empty() && self.problems.is_empty() {
            self.problems.push("`alg`: no algorithm given".into());
        }
        out
    }

    fn params(&mut self) -> Option<OscillatorParams> {
        let m = self.positive("m").unwrap_or(1.0);
        let has = |k: &str| self.text(k).is_some();
        let direct = has("c") || has("a");
        let modal = has("tn") || has("xi");
        if direct && modal {
            self.problems
                .push("give either `c`/`a` or `tn`/`xi` for the system, not both".into());
            return None;
        }
        let built = if direct {
            let c = self.float("c").unwrap_or(0.0);
            let a = self.positive("a").unwrap_or(1.0);
            OscillatorParams::new(m, c, a)
        } else {
            let tn = self.positive("tn").unwrap_or(1.0);
            let xi = self.float("xi").unwrap_or(0.05);
            OscillatorParams::from_period(m, tn, xi)
        };
        built.map_err(|e| self.problems.push(format!("system: {e}"))).ok()
    }

    fn forcing(&mut self) -> ForcingChoice {
        let Some(v) = self.text("forcing") else {
            return ForcingChoice::Sinusoid { f0: 100.0, omega0: 10.0 };
        };
        let v = v.to_string();
        let lower = v.to_ascii_lowercase();
        if lower == "zero" {
            return ForcingChoice::Zero;
        }
        if let Some(rest) = lower.strip_prefix("sin:") {
            let parts: Vec<Option<f64>> = rest.split(',').map(|s| s.trim().parse::<f64>().ok()).collect();
            if let [Some(f0), Some(omega0)] = parts[..] {
                if f0.is_finite() && omega0.is_finite() {
                    return ForcingChoice::Sinusoid { f0, omega0 };
                }
            }
        } else if v.len() > 7 && lower.starts_with("record:") {
            return ForcingChoice::Record(PathBuf::from(&v[7..]));
        }
        self.problems
            .push(format!("`forcing`: expected zero, sin:F0,W0 or record:PATH, got {v:?}"));
        ForcingChoice::Zero
    }

    fn grid(&mut self, cmd: CommandKind) -> GridSpec {
        let Some(v) = self.text("grid") else {
            return match cmd {
                CommandKind::PeTable => GridSpec::Linear { lo: 0.01, hi: 0.3, n: 30 },
                _ => GridSpec::Default,
            };
        };
        let v = v.to_ascii_lowercase();
        let bad = |p: &mut Vec<String>| {
            p.push(format!(
                "`grid`: expected default, lin:LO,HI,N, log:LO,HI,N or a comma list of positive values, got {v:?}"
            ))
        };
        if v == "default" {
            return GridSpec::Default;
        }
        let ranged = |rest: &str| -> Option<(f64, f64, usize)> {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return None;
            }
            let lo: f64 = parts[0].parse().ok()?;
            let hi: f64 = parts[1].parse().ok()?;
            let n: usize = parts[2].parse().ok()?;
            (lo > 0.0 && hi >= lo && hi.is_finite() && n >= 1).then_some((lo, hi, n))
        };
        if let Some(rest) = v.strip_prefix("lin:") {
            if let Some((lo, hi, n)) = ranged(rest) {
                return GridSpec::Linear { lo, hi, n };
            }
        } else if let Some(rest) = v.strip_prefix("log:") {
            if let Some((lo, hi, n)) = ranged(rest) {
                return GridSpec::Log { lo, hi, n };
            }
        } else {
            let parsed: Option<Vec<f64>> = v
                .split(',')
                .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite() && *x > 0.0))
                .collect();
            if let Some(list) = parsed.filter(|l| !l.is_empty()) {
                return GridSpec::List(list);
            }
        }
        bad(&mut self.problems);
        GridSpec::Default
    }

    fn build(&mut self, cmd: CommandKind) -> Option<Config> {
        let algs = self.algs();
        let params = self.params();
        let u0 = self.float("u0").unwrap_or(0.0);
        let v0 = self.float("v0").unwrap_or(0.0);
        let jhat0 = self.float("jhat0").unwrap_or(0.0);
        let forcing = self.forcing();
        let record_kind = match self.text("record_kind").map(|s| s.to_ascii_lowercase()) {
            None => RecordKind::Force,
            Some(k) if k == "force" => RecordKind::Force,
            Some(k) if k == "ground-accel" || k == "ground_accel" => RecordKind::GroundAcceleration,
            Some(k) => {
                self.problems.push(format!("`record_kind`: expected force or ground-accel, got {k:?}"));
                RecordKind::Force
            }
        };
        let record_format = match self.text("record_format").map(|s| s.to_ascii_lowercase()) {
            None => RecordFormat::TwoColumn,
            Some(k) if k == "two-column" || k == "two_column" => RecordFormat::TwoColumn,
            Some(k) if k == "fixed-dt" || k == "fixed_dt" => RecordFormat::FixedDt,
            Some(k) => {
                self.problems.push(format!("`record_format`: expected two-column or fixed-dt, got {k:?}"));
                RecordFormat::TwoColumn
            }
        };
        let record_dt = self.positive("record_dt");
        let record_header_lines = self.count("record_header_lines").unwrap_or(0);
        let record_points = self.count("record_points");
        let scale = self.float("scale");
        let default_h = if cmd == CommandKind::Converge { 0.05 } else { 0.01 };
        let h = self.positive("h").unwrap_or(default_h);
        let duration = self.positive("duration").unwrap_or(10.0);
        let levels = self.count("levels").unwrap_or(5);
        let grid = self.grid(cmd);
        let damping = match self.text("damping").map(|s| s.to_ascii_lowercase()) {
            None => DampingMode::Undamped,
            Some(k) if k == "undamped" => DampingMode::Undamped,
            Some(k) if k == "damped" => DampingMode::Damped,
            Some(k) if k == "both" => DampingMode::Both,
            Some(k) => {
                self.problems.push(format!("`damping`: expected undamped, damped or both, got {k:?}"));
                DampingMode::Undamped
            }
        };
        let out = PathBuf::from(self.text("out").unwrap_or("out"));

        if let ForcingChoice::Record(_) = forcing {
            if record_format == RecordFormat::FixedDt && record_dt.is_none() {
                self.problems.push("`record_dt` is required for fixed-dt records".into());
            }
            if record_kind == RecordKind::GroundAcceleration && scale.is_none() {
                self.problems
                    .push("`scale` is required for ground-acceleration records (record units are not assumed)".into());
            }
        }
        if cmd == CommandKind::Converge && levels < 3 {
            self.problems.push(format!("`levels`: a convergence study needs at least 3, got {levels}"));
        }
        let ics = InitialConditions::new(u0, v0).map_err(|e| self.problems.push(format!("initial conditions: {e}")));

        Some(Config {
            algs,
            params: params?,
            ics: ics.ok()?,
            jhat0,
            forcing,
            record_kind,
            record_format,
            record_dt,
            record_header_lines,
            record_points,
            scale,
            h,
            duration,
            levels,
            grid,
            damping,
            out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_forced_sinusoid() {
        let c = RawConfig::parse("").resolve(CommandKind::Simulate).unwrap();
        assert_eq!(c.algs, AlgorithmId::ALL.to_vec());
        assert_eq!(c.forcing, ForcingChoice::Sinusoid { f0: 100.0, omega0: 10.0 });
        let d = c.params.derived_properties();
        assert!((d.tn - 1.0).abs() < 1e-14 && (d.xi - 0.05).abs() < 1e-14);
        assert_eq!(c.n_steps(), 1000);
    }

    #[test]
    fn all_problems_listed() {
        let raw = RawConfig::parse("bogus = 1\nh = -2\nalg = EhpJquad,Nope\nforcing = sin:1\nnot a pair\n");
        let err = raw.resolve(CommandKind::Simulate).unwrap_err();
        assert_eq!(err.problems.len(), 5, "{err}");
        assert!(err.problems.iter().any(|p| p.contains("unknown key `bogus`")));
        assert!(err.problems.iter().any(|p| p.contains("McapUJquad")));
    }

    #[test]
    fn overrides_win() {
        let mut raw = RawConfig::parse("h = 0.1\n");
        raw.set("h", "0.02");
        assert_eq!(raw.resolve(CommandKind::Simulate).unwrap().h, 0.02);
    }

    #[test]
    fn echo_round_trips() {
        let raw = RawConfig::parse("alg = tfem\nm = 2\nc = 0.3\na = 0.01\nforcing = zero\ngrid = log:0.01,1,7\ndamping = both\n");
        let c = raw.resolve(CommandKind::Spectrum).unwrap();
        assert_eq!(RawConfig::parse(&c.to_text()).resolve(CommandKind::Spectrum).unwrap(), c);
        let c = RawConfig::parse("tn = 0.7\nxi = 0.1\n").resolve(CommandKind::Simulate).unwrap();
        assert_eq!(RawConfig::parse(&c.to_text()).resolve(CommandKind::Simulate).unwrap(), c);
    }

    #[test]
    fn mixed_parameterizations_rejected() {
        let err = RawConfig::parse("a = 1\ntn = 2\n").resolve(CommandKind::Simulate).unwrap_err();
        assert!(err.problems[0].contains("not both"));
    }

    #[test]
    fn ground_motion_needs_scale() {
        let err = RawConfig::parse("forcing = record:x.txt\nrecord_kind = ground-accel\n")
            .resolve(CommandKind::Simulate)
            .unwrap_err();
        assert!(err.problems[0].contains("scale"));
    }

    #[test]
    fn grids() {
        assert_eq!(GridSpec::Linear { lo: 0.1, hi: 0.3, n: 3 }.points().len(), 3);
        let g = GridSpec::Log { lo: 0.01, hi: 1.0, n: 3 }.points();
        assert_eq!(g[0], 0.01);
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert_eq!(g[2], 1.0);
    }
}

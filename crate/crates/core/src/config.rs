//! Run configuration: a flat `[section]` / `key = value` text format.
//!
//! ```text
//! [model]
//! algebra = so3
//! system = compact
//! r = 0.5
//! a = 1
//! c = 0.3
//! axis = 0, 0, 1
//!
//! [grid]
//! n = 256
//! length = 6.283185307179586
//!
//! [time]
//! t_end = 10
//! cfl = 0.4
//!
//! [initial]
//! kind = fourier_modes
//! m = 1
//! n = 0.5
//! mode = mu, 1, 0.1, 1, 0, 0
//!
//! [output]
//! directory = out
//! cadence = 10
//! lambdas = 0.5, 1, 2
//! snapshots = true
//!
//! [run]
//! seed = 0
//! parallel = false
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::algebra::AlgebraId;
use crate::dynamics::{Field, System};
use crate::error::{Error, Result};
use crate::zcr::DEFAULT_LAMBDAS;

#[derive(Debug, Clone, PartialEq)]
pub enum TimeStep {
    Cfl(f64),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierMode {
    pub field: Field,
    pub k: i64,
    pub amplitude: f64,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Equilibrium { m: f64, n: f64 },
    FourierModes { m: f64, n: f64, modes: Vec<FourierMode> },
    /// Smooth data from the run seed: every coefficient gets modes `1..=max_mode`.
    Random { amplitude: f64, max_mode: usize },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algebra: AlgebraId,
    pub system: System,
    pub r: f64,
    pub a: Vec<f64>,
    pub c: Vec<f64>,
    pub axis: Option<[f64; 3]>,
    pub n: usize,
    pub length: f64,
    pub t_end: f64,
    pub time_step: TimeStep,
    pub initial: InitialCondition,
    pub directory: PathBuf,
    pub cadence: usize,
    pub lambdas: Vec<f64>,
    pub snapshots: bool,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algebra: AlgebraId::So3,
            system: System::Compact,
            r: 0.0,
            a: vec![1.0],
            c: vec![1.0],
            axis: None,
            n: 64,
            length: 2.0 * std::f64::consts::PI,
            t_end: 1.0,
            time_step: TimeStep::Cfl(0.4),
            initial: InitialCondition::Equilibrium { m: 0.0, n: 0.0 },
            directory: PathBuf::from("out"),
            cadence: 1,
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            snapshots: true,
            seed: 0,
            parallel: false,
        }
    }
}

fn cfg_err(line: Option<usize>, field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_f64(s: &str, line: usize, field: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| cfg_err(Some(line), field, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(cfg_err(Some(line), field, "value must be finite"));
    }
    Ok(v)
}

fn parse_list(s: &str, line: usize, field: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| parse_f64(p, line, field)).collect()
}

fn parse_int<T: std::str::FromStr>(s: &str, line: usize, field: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| cfg_err(Some(line), field, format!("`{}` is not a valid integer", s.trim())))
}

fn parse_bool(s: &str, line: usize, field: &str) -> Result<bool> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(cfg_err(Some(line), field, format!("`{other}` is not true or false"))),
    }
}

fn field_tag(f: Field) -> &'static str {
    match f {
        Field::Mu => "mu",
        Field::Gamma => "gamma",
        Field::Both => "both",
    }
}

fn parse_mode(s: &str, line: usize) -> Result<FourierMode> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() < 4 {
        return Err(cfg_err(
            Some(line),
            "initial.mode",
            "expected `field, k, amplitude, direction...`",
        ));
    }
    let field = match parts[0] {
        "mu" => Field::Mu,
        "gamma" => Field::Gamma,
        "both" => Field::Both,
        other => {
            return Err(cfg_err(
                Some(line),
                "initial.mode",
                format!("unknown field `{other}` (expected mu, gamma or both)"),
            ))
        }
    };
    Ok(FourierMode {
        field,
        k: parse_int(parts[1], line, "initial.mode")?,
        amplitude: parse_f64(parts[2], line, "initial.mode")?,
        direction: parts[3..]
            .iter()
            .map(|p| parse_f64(p, line, "initial.mode"))
            .collect::<Result<_>>()?,
    })
}

/// Raw `key = value` entries with their line numbers, grouped by section.
struct Entries {
    items: Vec<(String, String, String, usize)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        const KEYS: &[(&str, &[&str])] = &[
            ("model", &["algebra", "system", "r", "a", "c", "axis"]),
            ("grid", &["n", "length"]),
            ("time", &["t_end", "cfl", "dt"]),
            ("initial", &["kind", "m", "n", "mode", "amplitude", "max_mode", "file"]),
            ("output", &["directory", "cadence", "lambdas", "snapshots"]),
            ("run", &["seed", "parallel"]),
        ];
        let mut section: Option<String> = None;
        let mut items: Vec<(String, String, String, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| cfg_err(Some(line), body, "unterminated section header"))?
                    .trim();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(cfg_err(Some(line), name, "unknown section"));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| cfg_err(Some(line), body, "expected `key = value`"))?;
            let key = key.trim();
            let sec = section
                .clone()
                .ok_or_else(|| cfg_err(Some(line), key, "key outside of a section"))?;
            let allowed = KEYS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                return Err(cfg_err(Some(line), &format!("{sec}.{key}"), "unknown key"));
            }
            if key != "mode" && items.iter().any(|(s, k, _, _)| *s == sec && k == key) {
                return Err(cfg_err(Some(line), &format!("{sec}.{key}"), "duplicate key"));
            }
            items.push((sec, key.to_string(), value.trim().to_string(), line));
        }
        Ok(Entries { items })
    }

    fn get(&self, sec: &str, key: &str) -> Option<(&str, usize)> {
        self.items
            .iter()
            .find(|(s, k, _, _)| s == sec && k == key)
            .map(|(_, _, v, l)| (v.as_str(), *l))
    }

    fn all(&self, sec: &str, key: &str) -> Vec<(&str, usize)> {
        self.items
            .iter()
            .filter(|(s, k, _, _)| s == sec && k == key)
            .map(|(_, _, v, l)| (v.as_str(), *l))
            .collect()
    }

    fn f64_or(&self, sec: &str, key: &str, default: f64) -> Result<f64> {
        match self.get(sec, key) {
            Some((v, l)) => parse_f64(v, l, &format!("{sec}.{key}")),
            None => Ok(default),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let e = Entries::parse(text)?;
        let d = RunConfig::default();
        let algebra = match e.get("model", "algebra") {
            Some((v, l)) => v.parse::<AlgebraId>().map_err(|err| cfg_err(Some(l), "model.algebra", err.to_string()))?,
            None => return Err(cfg_err(None, "model.algebra", "missing")),
        };
        let system = match e.get("model", "system") {
            Some((v, l)) => v.parse::<System>().map_err(|err| cfg_err(Some(l), "model.system", err.to_string()))?,
            None => return Err(cfg_err(None, "model.system", "missing")),
        };
        let list = |key: &str| -> Result<Vec<f64>> {
            match e.get("model", key) {
                Some((v, l)) => parse_list(v, l, &format!("model.{key}")),
                None => Ok(Vec::new()),
            }
        };
        let axis = match e.get("model", "axis") {
            Some((v, l)) => {
                let xs = parse_list(v, l, "model.axis")?;
                if xs.len() != 3 {
                    return Err(cfg_err(Some(l), "model.axis", "axis needs three components"));
                }
                Some([xs[0], xs[1], xs[2]])
            }
            None => None,
        };
        let n = match e.get("grid", "n") {
            Some((v, l)) => parse_int(v, l, "grid.n")?,
            None => d.n,
        };
        let time_step = match (e.get("time", "cfl"), e.get("time", "dt")) {
            (Some(_), Some((_, l))) => {
                return Err(cfg_err(Some(l), "time.dt", "give either cfl or dt, not both"))
            }
            (Some((v, l)), None) => TimeStep::Cfl(parse_f64(v, l, "time.cfl")?),
            (None, Some((v, l))) => TimeStep::Fixed(parse_f64(v, l, "time.dt")?),
            (None, None) => d.time_step.clone(),
        };
        let kind = e.get("initial", "kind").unwrap_or(("equilibrium", 0));
        let initial = match kind.0 {
            "equilibrium" => InitialCondition::Equilibrium {
                m: e.f64_or("initial", "m", 0.0)?,
                n: e.f64_or("initial", "n", 0.0)?,
            },
            "fourier_modes" => InitialCondition::FourierModes {
                m: e.f64_or("initial", "m", 0.0)?,
                n: e.f64_or("initial", "n", 0.0)?,
                modes: e
                    .all("initial", "mode")
                    .into_iter()
                    .map(|(v, l)| parse_mode(v, l))
                    .collect::<Result<_>>()?,
            },
            "random" => InitialCondition::Random {
                amplitude: e.f64_or("initial", "amplitude", 0.1)?,
                max_mode: match e.get("initial", "max_mode") {
                    Some((v, l)) => parse_int(v, l, "initial.max_mode")?,
                    None => 3,
                },
            },
            "file" => match e.get("initial", "file") {
                Some((v, _)) => InitialCondition::File(PathBuf::from(v)),
                None => return Err(cfg_err(None, "initial.file", "missing for kind = file")),
            },
            other => {
                return Err(cfg_err(
                    Some(kind.1),
                    "initial.kind",
                    format!("unknown kind `{other}` (expected equilibrium, fourier_modes, random or file)"),
                ))
            }
        };
        let cfg = RunConfig {
            algebra,
            system,
            r: e.f64_or("model", "r", 0.0)?,
            a: list("a")?,
            c: list("c")?,
            axis,
            n,
            length: e.f64_or("grid", "length", d.length)?,
            t_end: e.f64_or("time", "t_end", d.t_end)?,
            time_step,
            initial,
            directory: e
                .get("output", "directory")
                .map(|(v, _)| PathBuf::from(v))
                .unwrap_or(d.directory),
            cadence: match e.get("output", "cadence") {
                Some((v, l)) => parse_int(v, l, "output.cadence")?,
                None => d.cadence,
            },
            lambdas: match e.get("output", "lambdas") {
                Some((v, l)) => parse_list(v, l, "output.lambdas")?,
                None => d.lambdas,
            },
            snapshots: match e.get("output", "snapshots") {
                Some((v, l)) => parse_bool(v, l, "output.snapshots")?,
                None => d.snapshots,
            },
            seed: match e.get("run", "seed") {
                Some((v, l)) => parse_int(v, l, "run.seed")?,
                None => d.seed,
            },
            parallel: match e.get("run", "parallel") {
                Some((v, l)) => parse_bool(v, l, "run.parallel")?,
                None => d.parallel,
            },
        };
        cfg.validate().map_err(|err| match err {
            Error::Config { line: None, field, message } => {
                let line = field
                    .split_once('.')
                    .and_then(|(sec, key)| e.get(sec, key))
                    .map(|(_, l)| l);
                Error::Config { line, field, message }
            }
            other => other,
        })?;
        Ok(cfg)
    }

    /// Structural checks that do not need the algebra tables.
    pub fn validate(&self) -> Result<()> {
        if self.n < 32 || !self.n.is_power_of_two() {
            return Err(cfg_err(None, "grid.n", format!("{} is not a power of two >= 32", self.n)));
        }
        if !(self.length > 0.0) {
            return Err(cfg_err(None, "grid.length", "must be positive"));
        }
        if !(self.t_end > 0.0) {
            return Err(cfg_err(None, "time.t_end", "must be positive"));
        }
        match self.time_step {
            TimeStep::Cfl(v) if !(v > 0.0) => return Err(cfg_err(None, "time.cfl", "must be positive")),
            TimeStep::Fixed(v) if !(v > 0.0) => return Err(cfg_err(None, "time.dt", "must be positive")),
            _ => {}
        }
        if self.cadence == 0 {
            return Err(cfg_err(None, "output.cadence", "must be positive"));
        }
        if self.axis.is_some() && self.algebra != AlgebraId::So3 {
            return Err(cfg_err(None, "model.axis", "only so3 models take an axis"));
        }
        if let Some(ax) = self.axis {
            if ax.iter().all(|v| *v == 0.0) {
                return Err(cfg_err(None, "model.axis", "must be nonzero"));
            }
        }
        if let InitialCondition::FourierModes { modes, .. } = &self.initial {
            if modes.iter().any(|m| m.k.unsigned_abs() > (self.n / 2) as u64) {
                return Err(cfg_err(None, "initial.mode", "mode exceeds the Nyquist mode"));
            }
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back the same configuration.
    pub fn serialize(&self) -> String {
        self.render(true)
    }

    fn render(&self, with_run_local: bool) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "[model]");
        let _ = writeln!(s, "algebra = {}", self.algebra);
        let _ = writeln!(s, "system = {}", self.system.tag());
        let _ = writeln!(s, "r = {}", self.r);
        let _ = writeln!(s, "a = {}", list(&self.a));
        let _ = writeln!(s, "c = {}", list(&self.c));
        if let Some(ax) = self.axis {
            let _ = writeln!(s, "axis = {}", list(&ax));
        }
        let _ = writeln!(s, "\n[grid]\nn = {}\nlength = {}", self.n, self.length);
        let _ = writeln!(s, "\n[time]\nt_end = {}", self.t_end);
        match self.time_step {
            TimeStep::Cfl(v) => {
                let _ = writeln!(s, "cfl = {v}");
            }
            TimeStep::Fixed(v) => {
                let _ = writeln!(s, "dt = {v}");
            }
        }
        let _ = writeln!(s, "\n[initial]");
        match &self.initial {
            InitialCondition::Equilibrium { m, n } => {
                let _ = writeln!(s, "kind = equilibrium\nm = {m}\nn = {n}");
            }
            InitialCondition::FourierModes { m, n, modes } => {
                let _ = writeln!(s, "kind = fourier_modes\nm = {m}\nn = {n}");
                for md in modes {
                    let _ = writeln!(
                        s,
                        "mode = {}, {}, {}, {}",
                        field_tag(md.field),
                        md.k,
                        md.amplitude,
                        list(&md.direction)
                    );
                }
            }
            InitialCondition::Random { amplitude, max_mode } => {
                let _ = writeln!(s, "kind = random\namplitude = {amplitude}\nmax_mode = {max_mode}");
            }
            InitialCondition::File(p) => {
                let _ = writeln!(s, "kind = file\nfile = {}", p.display());
            }
        }
        let _ = writeln!(s, "\n[output]");
        if with_run_local {
            let _ = writeln!(s, "directory = {}", self.directory.display());
        }
        let _ = writeln!(
            s,
            "cadence = {}\nlambdas = {}\nsnapshots = {}",
            self.cadence,
            list(&self.lambdas),
            self.snapshots
        );
        let _ = writeln!(s, "\n[run]\nseed = {}", self.seed);
        if with_run_local {
            let _ = writeln!(s, "parallel = {}", self.parallel);
        }
        s
    }

    /// SHA-256 of the canonical form, leaving out the output directory and the
    /// parallel flag since neither changes the numbers produced.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.render(false).as_bytes()))
    }
}

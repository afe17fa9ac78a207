//! Run configuration and its flat `key=value` file format.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64 as Cx;
use semipar::poly1d::Rotation;

use crate::error::{LabError, LabResult};

/// The experiment a run performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Command {
    Caratheodory,
    NormalForm,
    PetalCheck,
    ConeCheck,
    HypScan,
    TorusIterate,
    Continuity,
    ConnectivityScan,
    RadialDemo,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Caratheodory,
        Command::NormalForm,
        Command::PetalCheck,
        Command::ConeCheck,
        Command::HypScan,
        Command::TorusIterate,
        Command::Continuity,
        Command::ConnectivityScan,
        Command::RadialDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Caratheodory => "caratheodory",
            Command::NormalForm => "normal-form",
            Command::PetalCheck => "petal-check",
            Command::ConeCheck => "cone-check",
            Command::HypScan => "hyp-scan",
            Command::TorusIterate => "torus-iterate",
            Command::Continuity => "continuity",
            Command::ConnectivityScan => "connectivity-scan",
            Command::RadialDemo => "radial-demo",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = LabError;

    fn from_str(s: &str) -> LabResult<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown command '{s}'")))
    }
}

/// Everything a run depends on. Equal configs produce identical outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub pq: Rotation,
    pub t: Vec<f64>,
    pub a: Vec<Cx>,
    /// Angles on loop and torus grids.
    pub angles: usize,
    /// Disk degree for tori, series order for normal forms.
    pub degree: usize,
    pub iters: usize,
    /// Image or scan resolution per side.
    pub res: usize,
    pub samples: usize,
    pub steps: usize,
    pub tol: f64,
    /// Half width of the `a`-window of a connectivity scan.
    pub window: f64,
    pub seed: u64,
    pub out: PathBuf,
}

fn real(x: f64) -> Cx {
    Cx::new(x, 0.0)
}

impl RunConfig {
    /// Defaults for `command`.
    pub fn defaults(command: Command) -> Self {
        let base = RunConfig {
            command,
            pq: Rotation::new(0, 1).expect("0/1 is valid"),
            t: vec![0.05],
            a: vec![real(0.05)],
            angles: 2048,
            degree: 8,
            iters: 40,
            res: 512,
            samples: 1000,
            steps: 500,
            tol: 1e-6,
            window: 0.3,
            seed: 7,
            out: PathBuf::from("out"),
        };
        match command {
            Command::Caratheodory => RunConfig { t: vec![0.0], a: vec![real(0.0)], ..base },
            Command::NormalForm | Command::PetalCheck => base,
            Command::ConeCheck => RunConfig { samples: 10_000, seed: 11, ..base },
            Command::HypScan => RunConfig {
                t: vec![-0.02, 0.0, 0.05],
                a: vec![real(-0.05), real(0.05)],
                samples: 2000,
                seed: 11,
                ..base
            },
            Command::TorusIterate => RunConfig { t: vec![0.1], ..base },
            Command::Continuity => RunConfig { t: vec![0.2, 0.1, 0.05, 0.025], iters: 400, ..base },
            Command::ConnectivityScan => RunConfig {
                pq: Rotation::new(1, 2).expect("1/2 is valid"),
                t: vec![0.1],
                a: vec![real(0.0)],
                angles: 512,
                iters: 200,
                res: 9,
                ..base
            },
            Command::RadialDemo => RunConfig { t: vec![0.2, 0.1, 0.05, 0.025], a: vec![real(0.0)], ..base },
        }
    }

    /// Parse the flat file format; keys not present keep the command defaults.
    pub fn parse(text: &str) -> LabResult<Self> {
        let mut pairs = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {}: expected key=value", n + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let command = pairs
            .iter()
            .find(|(k, _)| k == "command")
            .ok_or_else(|| LabError::Config("missing key 'command'".into()))?
            .1
            .parse()?;
        let mut cfg = RunConfig::defaults(command);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> LabResult<()> {
        match key {
            "command" => self.command = value.parse()?,
            "pq" => self.pq = Rotation::parse(value).map_err(|e| LabError::Config(e.to_string()))?,
            "t" => self.t = parse_list(value, parse_real)?,
            "a" => self.a = parse_list(value, parse_complex)?,
            "angles" => self.angles = parse_num(key, value)?,
            "degree" => self.degree = parse_num(key, value)?,
            "iters" => self.iters = parse_num(key, value)?,
            "res" => self.res = parse_num(key, value)?,
            "samples" => self.samples = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "tol" => self.tol = parse_real(value)?,
            "window" => self.window = parse_real(value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(LabError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Serialize every key; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let t: Vec<String> = self.t.iter().map(|x| x.to_string()).collect();
        let a: Vec<String> = self.a.iter().map(|&z| format_complex(z)).collect();
        let _ = writeln!(s, "command={}", self.command);
        let _ = writeln!(s, "pq={}", self.pq);
        let _ = writeln!(s, "t={}", t.join(","));
        let _ = writeln!(s, "a={}", a.join(","));
        let _ = writeln!(s, "angles={}", self.angles);
        let _ = writeln!(s, "degree={}", self.degree);
        let _ = writeln!(s, "iters={}", self.iters);
        let _ = writeln!(s, "res={}", self.res);
        let _ = writeln!(s, "samples={}", self.samples);
        let _ = writeln!(s, "steps={}", self.steps);
        let _ = writeln!(s, "tol={}", self.tol);
        let _ = writeln!(s, "window={}", self.window);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "out={}", self.out.display());
        s
    }

    pub fn first_t(&self) -> LabResult<f64> {
        self.t.first().copied().ok_or_else(|| LabError::Config("t list is empty".into()))
    }

    pub fn first_a(&self) -> LabResult<Cx> {
        self.a.first().copied().ok_or_else(|| LabError::Config("a list is empty".into()))
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> LabResult<T> {
    value.parse().map_err(|_| LabError::Config(format!("'{value}' is not a valid {key}")))
}

pub fn parse_real(value: &str) -> LabResult<f64> {
    value.trim().parse().map_err(|_| LabError::Config(format!("'{value}' is not a real number")))
}

pub fn parse_list<T>(value: &str, item: fn(&str) -> LabResult<T>) -> LabResult<Vec<T>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(item).collect()
}

/// Parse `x`, `yi`, `x+yi` or `x-yi`.
pub fn parse_complex(value: &str) -> LabResult<Cx> {
    let s = value.trim();
    let bad = || LabError::Config(format!("'{value}' is not a complex number"));
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Cx::new(parse_real(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => im.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Cx::new(re, im))
}

/// Shortest text that [`parse_complex`] maps back to the same value.
pub fn format_complex(z: Cx) -> String {
    if z.im == 0.0 && z.im.is_sign_positive() {
        z.re.to_string()
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

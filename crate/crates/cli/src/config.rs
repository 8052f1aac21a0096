// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` run configuration. Every flag has a key of the same
//! name (dashes become underscores), so a command line can be saved with
//! `--dump-config` and replayed with `cheb-lab run <file>`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Zeros,
    Catalog,
    Census,
    MeanSquare,
    Witness,
    DirichletCheck,
}

impl CommandKind {
    pub const ALL: [CommandKind; 6] = [
        CommandKind::Zeros,
        CommandKind::Catalog,
        CommandKind::Census,
        CommandKind::MeanSquare,
        CommandKind::Witness,
        CommandKind::DirichletCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Zeros => "zeros",
            CommandKind::Catalog => "catalog",
            CommandKind::Census => "census",
            CommandKind::MeanSquare => "mean-square",
            CommandKind::Witness => "witness",
            CommandKind::DirichletCheck => "dirichlet-check",
        }
    }
}

impl FromStr for CommandKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Which mean-square statistic a run reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Statistic {
    #[default]
    Unsmoothed,
    Smoothed,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Unsmoothed => "unsmoothed",
            Statistic::Smoothed => "smoothed",
        }
    }
}

impl FromStr for Statistic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unsmoothed" => Ok(Statistic::Unsmoothed),
            "smoothed" => Ok(Statistic::Smoothed),
            other => Err(format!("unknown statistic `{other}` (expected smoothed or unsmoothed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub set: Option<String>,
    pub reference: Option<String>,
    pub control: Option<String>,
    pub ext: Option<String>,
    pub q: Option<u64>,
    pub index: Option<u64>,
    pub x: Option<f64>,
    pub x_max: Option<f64>,
    pub x_cut: Option<f64>,
    pub height: Option<f64>,
    pub s: Option<String>,
    pub statistic: Option<Statistic>,
    pub step: Option<f64>,
    pub allow_uncertified: bool,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            set: None,
            reference: None,
            control: None,
            ext: None,
            q: None,
            index: None,
            x: None,
            x_max: None,
            x_cut: None,
            height: None,
            s: None,
            statistic: None,
            step: None,
            allow_uncertified: false,
            out: None,
            csv: None,
            json: None,
            cache_dir: None,
        }
    }

    /// Cache directory from the config, else `CHEB_CACHE_DIR`.
    pub fn effective_cache_dir(&self) -> Option<PathBuf> {
        self.cache_dir.clone().or_else(|| std::env::var_os("CHEB_CACHE_DIR").map(PathBuf::from))
    }

    pub fn height_or_default(&self) -> f64 {
        self.height.unwrap_or(100.0)
    }

    fn set_key(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("`{key}` expects a number, got `{v}`"))
        }
        fn real(key: &str, v: &str) -> Result<f64, String> {
            let x: f64 = num(key, v)?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("`{key}` must be finite"))
            }
        }
        let text = || Some(value.to_string());
        match key {
            "command" => self.command = value.parse()?,
            "set" => self.set = text(),
            "reference" => self.reference = text(),
            "control" => self.control = text(),
            "ext" => self.ext = text(),
            "q" => self.q = Some(num(key, value)?),
            "index" => self.index = Some(num(key, value)?),
            "x" => self.x = Some(real(key, value)?),
            "x_max" => self.x_max = Some(real(key, value)?),
            "x_cut" => self.x_cut = Some(real(key, value)?),
            "height" => self.height = Some(real(key, value)?),
            "s" => self.s = text(),
            "statistic" => self.statistic = Some(value.parse()?),
            "step" => self.step = Some(real(key, value)?),
            "allow_uncertified" => {
                self.allow_uncertified = value.parse().map_err(|_| format!("`{key}` expects true or false"))?
            }
            "out" => self.out = Some(value.into()),
            "csv" => self.csv = Some(value.into()),
            "json" => self.json = Some(value.into()),
            "cache_dir" => self.cache_dir = Some(value.into()),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = CliError;

    /// Parses `key = value` lines; `#` starts a comment line. `command` is required.
    fn from_str(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::new(CommandKind::Catalog);
        let mut seen: Vec<String> = Vec::new();
        let mut offset = 0;
        for (n, raw) in text.split_inclusive('\n').enumerate() {
            let line_start = offset;
            offset += raw.len();
            let line = raw.trim_end_matches(['\n', '\r']);
            let body = line.trim_start();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let col = line.len() - body.len();
            let err = |pos: usize, msg: String| CliError::Config(format!("line {}, byte {}: {msg}", n + 1, line_start + pos));
            let (key, value) = body.split_once('=').ok_or_else(|| err(col, "expected `key = value`".into()))?;
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(err(col, format!("key `{key}` given twice")));
            }
            let value_pos = col + body.find('=').unwrap_or(0) + 1;
            cfg.set_key(key, value.trim()).map_err(|m| {
                let pos = if m.starts_with("unknown key") { col } else { value_pos };
                err(pos, m)
            })?;
            seen.push(key.to_string());
        }
        if !seen.iter().any(|k| k == "command") {
            return Err(CliError::Config("missing `command` key".into()));
        }
        Ok(cfg)
    }
}

impl fmt::Display for RunConfig {
    /// Canonical form: one key per line in a fixed order, unset keys omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command = {}", self.command.name())?;
        let mut line = |k: &str, v: Option<String>| match v {
            Some(v) => writeln!(f, "{k} = {v}"),
            None => Ok(()),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        line("set", self.set.clone())?;
        line("reference", self.reference.clone())?;
        line("control", self.control.clone())?;
        line("ext", self.ext.clone())?;
        line("q", self.q.map(|v| v.to_string()))?;
        line("index", self.index.map(|v| v.to_string()))?;
        line("x", self.x.map(|v| v.to_string()))?;
        line("x_max", self.x_max.map(|v| v.to_string()))?;
        line("x_cut", self.x_cut.map(|v| v.to_string()))?;
        line("height", self.height.map(|v| v.to_string()))?;
        line("s", self.s.clone())?;
        line("statistic", self.statistic.map(|v| v.name().to_string()))?;
        line("step", self.step.map(|v| v.to_string()))?;
        line("allow_uncertified", self.allow_uncertified.then(|| "true".to_string()))?;
        line("out", path(&self.out))?;
        line("csv", path(&self.csv))?;
        line("json", path(&self.json))?;
        line("cache_dir", path(&self.cache_dir))
    }
}

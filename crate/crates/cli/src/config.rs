//! Run configuration and its flat `key=value` file format.

use std::fmt::Write as _;
use std::path::PathBuf;

use ozone_core::dataset::{SplitMode, SplitSpec};
use ozone_core::models::{ModelKind, ModelSpec};
use ozone_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproachSel {
    One(u8),
    All,
}

impl ApproachSel {
    pub fn ids(self) -> Vec<u8> {
        match self {
            ApproachSel::One(id) => vec![id],
            ApproachSel::All => vec![1, 2, 3, 4],
        }
    }
}

/// A `model.param=value` override.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Override {
    pub model: ModelKind,
    pub param: String,
    pub value: String,
}

impl std::str::FromStr for Override {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Config(format!("override '{s}' is not model.param=value"));
        let (lhs, value) = s.split_once('=').ok_or_else(bad)?;
        let (model, param) = lhs.trim().split_once('.').ok_or_else(bad)?;
        if param.is_empty() {
            return Err(bad());
        }
        Ok(Self {
            model: ModelKind::from_key(model.trim())?,
            param: param.trim().to_string(),
            value: value.trim().to_string(),
        })
    }
}

impl std::fmt::Display for Override {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}={}", self.model.key(), self.param, self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub approach: ApproachSel,
    pub split: SplitMode,
    pub train_frac: f64,
    pub seed: u64,
    /// Empty selects the full roster.
    pub models: Vec<ModelKind>,
    pub out: PathBuf,
    pub sets: Vec<Override>,
    pub threads: Option<usize>,
    /// Rows generated by `synth`.
    pub rows: usize,
    /// Target lag-1 autocorrelation for `synth`.
    pub autocorrelation: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            approach: ApproachSel::One(1),
            split: SplitMode::Chronological,
            train_frac: 0.8,
            seed: 42,
            models: Vec::new(),
            out: PathBuf::from("out"),
            sets: Vec::new(),
            threads: None,
            rows: 1200,
            autocorrelation: 0.7,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Error> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for {key}")))
}

impl RunConfig {
    /// Applies one `key=value` setting; keys match the command-line flags.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), Error> {
        match key {
            "data" => self.data = Some(PathBuf::from(value)),
            "approach" => {
                self.approach = match value {
                    "all" => ApproachSel::All,
                    v => match parse_num::<u8>(key, v)? {
                        id @ 1..=4 => ApproachSel::One(id),
                        id => return Err(Error::Config(format!("approach {id} is not 1-4 or all"))),
                    },
                }
            }
            "split" => {
                self.split = match value {
                    "chrono" => SplitMode::Chronological,
                    "random" => SplitMode::Random,
                    v => return Err(Error::Config(format!("split '{v}' is not chrono or random"))),
                }
            }
            "train-frac" => self.train_frac = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "models" => {
                self.models = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(ModelKind::from_key)
                    .collect::<Result<_, _>>()?
            }
            "out" => self.out = PathBuf::from(value),
            "set" => self.sets.push(value.parse()?),
            "threads" => self.threads = Some(parse_num(key, value)?),
            "rows" => self.rows = parse_num(key, value)?,
            "autocorrelation" => self.autocorrelation = parse_num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Parses the file format: one `key=value` per line, `#` comments,
    /// `set` may repeat.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn merge_text(&mut self, text: &str) -> Result<(), Error> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected key=value", i + 1)))?;
            self.apply(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(d) = &self.data {
            writeln!(s, "data={}", d.display()).unwrap();
        }
        match self.approach {
            ApproachSel::One(id) => writeln!(s, "approach={id}").unwrap(),
            ApproachSel::All => writeln!(s, "approach=all").unwrap(),
        }
        let split = match self.split {
            SplitMode::Chronological => "chrono",
            SplitMode::Random => "random",
        };
        writeln!(s, "split={split}").unwrap();
        writeln!(s, "train-frac={:?}", self.train_frac).unwrap();
        writeln!(s, "seed={}", self.seed).unwrap();
        if !self.models.is_empty() {
            let keys: Vec<&str> = self.models.iter().map(|m| m.key()).collect();
            writeln!(s, "models={}", keys.join(",")).unwrap();
        }
        writeln!(s, "out={}", self.out.display()).unwrap();
        for o in &self.sets {
            writeln!(s, "set={o}").unwrap();
        }
        if let Some(t) = self.threads {
            writeln!(s, "threads={t}").unwrap();
        }
        writeln!(s, "rows={}", self.rows).unwrap();
        writeln!(s, "autocorrelation={:?}", self.autocorrelation).unwrap();
        s
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            mode: self.split,
            train_fraction: self.train_frac,
            seed: self.seed,
        }
    }

    /// Requested roster entries with overrides applied, in roster order.
    pub fn roster(&self) -> Result<Vec<(ModelKind, ModelSpec)>, Error> {
        let mut kinds: Vec<ModelKind> = if self.models.is_empty() {
            ozone_core::models::ROSTER.to_vec()
        } else {
            self.models.clone()
        };
        kinds.sort_by_key(|k| k.index());
        kinds.dedup();
        let mut roster: Vec<(ModelKind, ModelSpec)> = kinds.into_iter().map(|k| (k, ModelSpec::default_for(k))).collect();
        for o in &self.sets {
            let (_, spec) = roster
                .iter_mut()
                .find(|(k, _)| *k == o.model)
                .ok_or_else(|| Error::Config(format!("override for {} which is not selected", o.model.key())))?;
            spec.set(&o.param, &o.value)
                .map_err(|e| Error::Config(format!("{}: {e}", o.model.key())))?;
        }
        Ok(roster)
    }
}

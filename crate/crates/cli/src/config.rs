use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for {key}: {msg}")]
    Value { key: &'static str, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
        })
    }
}

/// Settings shared by every subcommand. Decimal inputs are kept as strings
/// so they reach the arbitrary-precision layer without a binary round trip.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub q: String,
    /// `None` selects the default for `n_max` and `q`.
    pub precision_bits: Option<u32>,
    pub trunc_tol: Option<String>,
    pub n_max: usize,
    pub shift_c: Vec<String>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q: "0.5".into(),
            precision_bits: None,
            trunc_tol: None,
            n_max: 24,
            shift_c: vec!["1".into()],
            format: Format::Json,
            out: None,
            seed: 0,
        }
    }
}

/// Values given explicitly on the command line or in a config file; unset
/// fields fall through to the next layer.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub q: Option<String>,
    pub precision_bits: Option<u32>,
    pub trunc_tol: Option<String>,
    pub n_max: Option<usize>,
    pub shift_c: Option<Vec<String>>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn parse_num<T: FromStr>(key: &'static str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| ConfigError::Value {
        key,
        msg: format!("`{v}`: {e}"),
    })
}

impl Overrides {
    /// Flat `key=value` text; blank lines and `#` comments are skipped.
    /// `shift_c` takes a comma-separated list.
    pub fn parse_kv(text: &str) -> Result<Self, ConfigError> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "q" => o.q = Some(v.to_string()),
                "precision_bits" => o.precision_bits = Some(parse_num("precision_bits", v)?),
                "trunc_tol" => o.trunc_tol = Some(v.to_string()),
                "n_max" => o.n_max = Some(parse_num("n_max", v)?),
                "shift_c" => o.shift_c = Some(v.split(',').map(|s| s.trim().to_string()).collect()),
                "format" => {
                    o.format = Some(v.parse().map_err(|msg| ConfigError::Value { key: "format", msg })?)
                }
                "out" => o.out = Some(PathBuf::from(v)),
                "seed" => o.seed = Some(parse_num("seed", v)?),
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_kv(&text)
    }

    pub fn apply(self, cfg: &mut RunConfig) {
        if let Some(v) = self.q {
            cfg.q = v;
        }
        if self.precision_bits.is_some() {
            cfg.precision_bits = self.precision_bits;
        }
        if self.trunc_tol.is_some() {
            cfg.trunc_tol = self.trunc_tol;
        }
        if let Some(v) = self.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = self.shift_c {
            cfg.shift_c = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
    }
}

impl RunConfig {
    /// `key=value` lines that [`Overrides::parse_kv`] reads back to the same
    /// configuration.
    pub fn to_kv(&self) -> String {
        let mut s = format!("q={}\n", self.q);
        if let Some(b) = self.precision_bits {
            s += &format!("precision_bits={b}\n");
        }
        if let Some(t) = &self.trunc_tol {
            s += &format!("trunc_tol={t}\n");
        }
        s += &format!("n_max={}\n", self.n_max);
        s += &format!("shift_c={}\n", self.shift_c.join(","));
        s += &format!("format={}\n", self.format);
        if let Some(p) = &self.out {
            s += &format!("out={}\n", p.display());
        }
        s += &format!("seed={}\n", self.seed);
        s
    }

    /// Checks that every value satisfies the library preconditions, so
    /// no computation starts on bad input.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &'static str, msg: String| Err(ConfigError::Value { key, msg });
        let q: f64 = parse_num("q", &self.q)?;
        if !(q > 0.0 && q < 1.0) {
            return bad("q", format!("{q} is not in (0, 1)"));
        }
        if let Some(b) = self.precision_bits {
            if b < qfreud::qcore::MIN_PRECISION {
                return bad("precision_bits", format!("{b} is below {}", qfreud::qcore::MIN_PRECISION));
            }
        }
        if let Some(t) = &self.trunc_tol {
            let t: f64 = parse_num("trunc_tol", t)?;
            if !(t > 0.0 && t < 1.0) {
                return bad("trunc_tol", format!("{t} is not in (0, 1)"));
            }
        }
        if self.shift_c.is_empty() {
            return bad("shift_c", "at least one shift is required".into());
        }
        for c in &self.shift_c {
            let v: f64 = parse_num("shift_c", c)?;
            if !(v > q && v <= 1.0) {
                return bad("shift_c", format!("{c} is not in (q, 1]"));
            }
        }
        Ok(())
    }
}

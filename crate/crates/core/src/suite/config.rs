//! Run configuration: flat `key=value` files and `--key value` flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::kahler::BaseKind;
use crate::report::Format;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot read `{value}` as {expected}")]
    BadValue {
        key: String,
        value: String,
        expected: String,
    },
    #[error("key `{0}` needs a value")]
    MissingValue(String),
    #[error("key `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("line {line} of `{path}` is not `key=value`")]
    Syntax { path: String, line: usize },
    #[error("cannot read `{path}`: {reason}")]
    Io { path: String, reason: String },
    #[error("no command given (one of {0})")]
    MissingCommand(String),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
}

/// What to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    VerifyBase,
    VerifySasaki,
    Einstein,
    Taubnut,
    Wave,
    CrRoundtrip,
    All,
}

impl Command {
    pub const NAMES: &'static str = "verify-base, verify-sasaki, einstein, taubnut, wave, cr-roundtrip, all";
}

impl FromStr for Command {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "verify-base" => Command::VerifyBase,
            "verify-sasaki" => Command::VerifySasaki,
            "einstein" => Command::Einstein,
            "taubnut" => Command::Taubnut,
            "wave" => Command::Wave,
            "cr-roundtrip" => Command::CrRoundtrip,
            "all" => Command::All,
            other => return Err(ConfigError::UnknownCommand(other.to_string())),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::VerifyBase => "verify-base",
            Command::VerifySasaki => "verify-sasaki",
            Command::Einstein => "einstein",
            Command::Taubnut => "taubnut",
            Command::Wave => "wave",
            Command::CrRoundtrip => "cr-roundtrip",
            Command::All => "all",
        })
    }
}

/// A fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub base: BaseKind,
    pub n: usize,
    pub lambda: f64,
    pub lambda0: f64,
    pub b: f64,
    pub c: f64,
    /// Samples per grid axis.
    pub grid: usize,
    pub seed: u64,
    /// Tolerance overrides, keyed by check-name prefix.
    pub tolerances: BTreeMap<String, f64>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for `command`: round sphere, `Λ₀ = 1`, `Λ = 0`, `C = 1/4`,
    /// `B = 0`, 10 samples per axis, seed 0, human-readable output.
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            base: BaseKind::S2Spherical,
            n: 4,
            lambda: 0.0,
            lambda0: 1.0,
            b: 0.0,
            c: 0.25,
            grid: 10,
            seed: 0,
            tolerances: BTreeMap::new(),
            format: Format::Human,
            output: None,
        }
    }

    /// The resolved values as strings, for the report header.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("command".into(), self.command.to_string());
        m.insert("base".into(), self.base.to_string());
        m.insert("n".into(), self.n.to_string());
        m.insert("lambda".into(), self.lambda.to_string());
        m.insert("lambda0".into(), self.lambda0.to_string());
        m.insert("B".into(), self.b.to_string());
        m.insert("C".into(), self.c.to_string());
        m.insert("grid".into(), self.grid.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("version".into(), env!("CARGO_PKG_VERSION").to_string());
        for (k, v) in &self.tolerances {
            m.insert(format!("tol.{k}"), v.to_string());
        }
        m
    }
}

/// Keys accepted in files and as flags (plus `tol.<prefix>`).
pub const KEYS: &[&str] = &[
    "command", "base", "n", "lambda", "lambda0", "B", "C", "grid", "seed", "format", "output",
];

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_file_text(path: &str, text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            path: path.to_string(),
            line: i + 1,
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, value: &str, expected: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        expected: expected.to_string(),
    })
}

fn finite(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse_value(key, value, "a real number")?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            expected: "a finite real number".to_string(),
        })
    }
}

/// Splits argv (without the program name) into a command and `--key value`
/// pairs. `--key=value` is accepted too.
fn split_args(args: &[String]) -> Result<(Option<String>, Vec<(String, String)>), ConfigError> {
    let mut command = None;
    let mut pairs = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if let Some(flag) = a.strip_prefix("--") {
            let (k, v) = match flag.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it.next().ok_or_else(|| ConfigError::MissingValue(flag.to_string()))?;
                    (flag.to_string(), v.clone())
                }
            };
            pairs.push((k, v));
        } else if command.is_none() {
            command = Some(a.clone());
        } else {
            return Err(ConfigError::UnknownKey(a.clone()));
        }
    }
    Ok((command, pairs))
}

/// Builds a [`RunConfig`] from argv and an optional file. The file is named
/// by `--config` or passed as `file`; flags override file values. `Λ₀`
/// defaults to the natural sign of the base (1 for spheres, 0 for the torus,
/// −1 for the hyperbolic disk) and `n` to the base dimension plus two.
pub fn parse_config(args: &[String], file: Option<(&str, &str)>) -> Result<RunConfig, ConfigError> {
    let (cmd_arg, flags) = split_args(args)?;
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut file_text: Option<(String, String)> = file.map(|(p, t)| (p.to_string(), t.to_string()));
    if let Some((_, path)) = flags.iter().find(|(k, _)| k == "config") {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        file_text = Some((path.clone(), text));
    }
    if let Some((path, text)) = &file_text {
        pairs.extend(parse_file_text(path, text)?);
    }
    pairs.extend(flags.into_iter().filter(|(k, _)| k != "config"));

    // last value wins
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    for (k, v) in pairs {
        if !KEYS.contains(&k.as_str()) && !k.starts_with("tol.") {
            return Err(ConfigError::UnknownKey(k));
        }
        map.insert(k, v);
    }
    let command: Command = match (cmd_arg, map.get("command")) {
        (Some(c), _) => c.parse()?,
        (None, Some(c)) => c.parse()?,
        (None, None) => return Err(ConfigError::MissingCommand(Command::NAMES.to_string())),
    };
    let mut cfg = RunConfig::defaults(command);
    if let Some(v) = map.get("base") {
        cfg.base = v.parse().map_err(|e: String| ConfigError::BadValue {
            key: "base".into(),
            value: v.clone(),
            expected: e,
        })?;
    }
    cfg.lambda0 = match cfg.base {
        BaseKind::Torus => 0.0,
        BaseKind::HyperbolicDisk => -1.0,
        BaseKind::Product(ref a, _) if **a == BaseKind::Torus => 0.0,
        BaseKind::Product(ref a, _) if **a == BaseKind::HyperbolicDisk => -1.0,
        _ => 1.0,
    };
    cfg.n = cfg.base.real_dim() + 2;
    for (k, v) in &map {
        match k.as_str() {
            "command" | "base" => {}
            "n" => {
                let n: usize = parse_value(k, v, "an even integer at least 4")?;
                if n != cfg.base.real_dim() + 2 {
                    return Err(ConfigError::Invalid {
                        key: k.clone(),
                        reason: format!("n = {n} but base `{}` gives n = {}", cfg.base, cfg.base.real_dim() + 2),
                    });
                }
            }
            "lambda" => cfg.lambda = finite(k, v)?,
            "lambda0" => cfg.lambda0 = finite(k, v)?,
            "B" => cfg.b = finite(k, v)?,
            "C" => {
                cfg.c = finite(k, v)?;
                if cfg.c <= 0.0 {
                    return Err(ConfigError::Invalid {
                        key: k.clone(),
                        reason: format!("C = {} must be positive", cfg.c),
                    });
                }
            }
            "grid" => {
                cfg.grid = parse_value(k, v, "an integer at least 2")?;
                if cfg.grid < 2 {
                    return Err(ConfigError::Invalid {
                        key: k.clone(),
                        reason: "at least 2 samples per axis".into(),
                    });
                }
            }
            "seed" => cfg.seed = parse_value(k, v, "an unsigned 64-bit integer")?,
            "format" => {
                cfg.format = v.parse().map_err(|e: String| ConfigError::BadValue {
                    key: k.clone(),
                    value: v.clone(),
                    expected: e,
                })?
            }
            "output" => cfg.output = Some(PathBuf::from(v)),
            tol => {
                let prefix = tol.trim_start_matches("tol.").to_string();
                let t = finite(k, v)?;
                if t < 0.0 {
                    return Err(ConfigError::Invalid {
                        key: k.clone(),
                        reason: "tolerances are nonnegative".into(),
                    });
                }
                cfg.tolerances.insert(prefix, t);
            }
        }
    }
    Ok(cfg)
}

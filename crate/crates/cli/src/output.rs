use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;

pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(stcvrp::Error),
    Io { path: PathBuf, source: io::Error },
    Json { path: PathBuf, source: serde_json::Error },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) | CliError::Core(_) | CliError::Json { .. } => EXIT_INVALID,
            CliError::Io { .. } => EXIT_IO,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Json { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<stcvrp::Error> for CliError {
    fn from(e: stcvrp::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_text(path, &to_json(value))
}

/// Record of one artifact-producing invocation.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: &'static str,
    pub instance: Option<String>,
    pub seeds: Vec<u64>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub wall_clock_s: f64,
    pub version: &'static str,
}

impl Manifest {
    pub fn new(command: &'static str, instance: Option<&Path>) -> Self {
        Self {
            command,
            instance: instance.map(|p| p.display().to_string()),
            seeds: Vec::new(),
            config: serde_json::Value::Null,
            outputs: Vec::new(),
            wall_clock_s: 0.0,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    /// Writes `<stem>.<command>.manifest.json` next to `anchor`.
    pub fn write_beside(mut self, anchor: &Path, started: std::time::Instant) -> CliResult<PathBuf> {
        self.wall_clock_s = started.elapsed().as_secs_f64();
        let stem = anchor
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());
        let path = anchor.with_file_name(format!("{stem}.{}.manifest.json", self.command));
        write_json(&path, &self)?;
        Ok(path)
    }
}

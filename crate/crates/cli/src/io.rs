//! Input parsing with located errors, digests, and output placement.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const OUTPUT_DIR_ENV: &str = "JETSTRATA_OUTPUT_DIR";

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input: exit code 2.
    Usage(String),
    /// The library refused the input: exit code 2.
    Library(jetstrata::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<jetstrata::Error> for CliError {
    fn from(e: jetstrata::Error) -> Self {
        CliError::Library(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Collects the bytes every result depends on.
#[derive(Default)]
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn arg(&mut self, name: &str, value: impl fmt::Display) {
        self.hasher.update(format!("{name}={value}\n").as_bytes());
    }

    pub fn read_json<T: DeserializeOwned>(&mut self, flag: &str, path: &Path) -> CliResult<T> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Usage(format!("--{flag} {}: {e}", path.display())))?;
        self.hasher
            .update(format!("{flag}:{}\n", bytes.len()).as_bytes());
        self.hasher.update(&bytes);
        let mut de = serde_json::Deserializer::from_slice(&bytes);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let inner = e.inner();
            let path_text = e.path().to_string();
            let at = if path_text == "." {
                "top level".to_string()
            } else {
                format!("field `{path_text}`")
            };
            // serde_json appends "at line L column C" when it knows the position
            CliError::Usage(format!("--{flag} {}: {at}: {inner}", path.display()))
        })
    }

    pub fn digest(self) -> String {
        self.hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// `{"command", "version", "input_digest", ...result fields}`.
pub fn envelope(command: &str, digest: String, result: Value) -> Value {
    let mut out = Map::new();
    out.insert("command".into(), Value::String(command.into()));
    out.insert(
        "version".into(),
        Value::String(env!("CARGO_PKG_VERSION").into()),
    );
    out.insert("input_digest".into(), Value::String(digest));
    match result {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}

/// Relative output paths are placed under `$JETSTRATA_OUTPUT_DIR` when set.
pub fn output_path(requested: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if requested.is_relative() => Path::new(&dir).join(requested),
        _ => requested.to_path_buf(),
    }
}

pub fn write_output(value: &Value, output: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(requested) => {
            let path = output_path(requested);
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::Usage(format!("creating {}: {e}", parent.display())))?;
            }
            std::fs::write(&path, text)
                .map_err(|e| CliError::Usage(format!("writing {}: {e}", path.display())))
        }
    }
}

/// Comma-separated rationals, e.g. `0,1/2,-3`.
pub fn parse_point(flag: &str, text: &str) -> CliResult<Vec<jetstrata::rational::Rational>> {
    text.split(',')
        .map(|t| {
            jetstrata::rational::parse(t.trim())
                .map_err(|e| CliError::Usage(format!("--{flag} `{text}`: {e}")))
        })
        .collect()
}

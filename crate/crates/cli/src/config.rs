//! Optional `key = value` config file: `format`, `snapshot`, `port`.

use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::Format;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub format: Option<Format>,
    pub snapshot: Option<PathBuf>,
    pub port: Option<u16>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| CliError::Usage(format!("config line {}: {msg}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let value = value.trim();
            match key.trim() {
                "format" => {
                    c.format = Some(value.parse().map_err(|e: String| bad(&e))?);
                }
                "snapshot" => c.snapshot = Some(PathBuf::from(value)),
                "port" => c.port = Some(value.parse().map_err(|_| bad("port must be a number"))?),
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Config::parse(&text)
    }
}

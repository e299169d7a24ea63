use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};

use crate::Failure;

/// Directory used for output files when `--out` is not given.
pub const OUT_DIR_ENV: &str = "WINCUCKOO_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; defaults to `$WINCUCKOO_OUT_DIR/<command>.<ext>` when
    /// that variable is set, otherwise standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl OutputArgs {
    fn target(&self, command: &str) -> Option<PathBuf> {
        self.out.clone().or_else(|| {
            std::env::var_os(OUT_DIR_ENV)
                .filter(|d| !d.is_empty())
                .map(|dir| PathBuf::from(dir).join(format!("{command}.{}", self.format.extension())))
        })
    }

    /// Writes `body` to the chosen destination and reports where it went.
    pub fn emit(&self, command: &str, body: &str) -> Result<(), Failure> {
        match self.target(command) {
            Some(path) => {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)?;
                }
                fs::write(&path, body)?;
                eprintln!("wrote {}", path.display());
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(body.as_bytes())?;
            }
        }
        Ok(())
    }

    pub fn reject_svg(&self, command: &str) -> Result<(), Failure> {
        if self.format == Format::Svg {
            return Err(Failure::usage(format!("{command} has no plot; use --format csv or json")));
        }
        Ok(())
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::runtime(format!("json encoding failed: {e}")))
}

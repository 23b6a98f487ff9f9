use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use skglass_core::report::content_hash;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

/// Everything a subcommand can emit: a human table plus machine formats.
pub struct Artifact {
    pub table: String,
    pub csv: Option<String>,
    pub json: String,
    pub content_hash: String,
}

impl Artifact {
    pub fn new<T: Serialize>(table: String, csv: Option<String>, value: &T) -> Self {
        let mut json = serde_json::to_string_pretty(value).expect("report types serialize");
        json.push('\n');
        Artifact {
            table,
            csv,
            json,
            content_hash: content_hash(value),
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    generated_at: String,
    version: &'a str,
    command: &'a str,
    content_hash: &'a str,
    files: Vec<String>,
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn sibling(out: &Path, ext: &str) -> PathBuf {
    out.with_extension(ext)
}

/// Sidecar path for an output: `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the requested formats. Files are byte-deterministic; the wall-clock
/// timestamp lives only in the sidecar.
pub fn emit(
    artifact: &Artifact,
    command: &str,
    format: Option<Format>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    let mut print = |s: &str| {
        stdout
            .write_all(s.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}")))
    };
    let Some(format) = format else {
        return print(&artifact.table);
    };
    let csv = || {
        artifact
            .csv
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("{command} has no CSV output; use --format json")))
    };
    let Some(out) = out else {
        return match format {
            Format::Csv => print(csv()?),
            Format::Json => print(&artifact.json),
            Format::Both => {
                print(csv()?)?;
                print(&artifact.json)
            }
        };
    };
    let files = match format {
        Format::Csv => {
            write_file(out, csv()?)?;
            vec![out.to_path_buf()]
        }
        Format::Json => {
            write_file(out, &artifact.json)?;
            vec![out.to_path_buf()]
        }
        Format::Both => {
            let (c, j) = (sibling(out, "csv"), sibling(out, "json"));
            write_file(&c, csv()?)?;
            write_file(&j, &artifact.json)?;
            vec![c, j]
        }
    };
    let sidecar = Sidecar {
        generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        version: env!("CARGO_PKG_VERSION"),
        command,
        content_hash: &artifact.content_hash,
        files: files.iter().map(|p| p.display().to_string()).collect(),
    };
    let mut meta = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    meta.push('\n');
    write_file(&sidecar_path(out), &meta)?;
    print(&artifact.table)?;
    for f in &files {
        print(&format!("wrote {}\n", f.display()))?;
    }
    Ok(())
}

/// Nats-to-display conversion for entropy-like quantities.
#[derive(Debug, Clone, Copy)]
pub struct Units {
    pub bits: bool,
}

impl Units {
    pub fn entropy(self, nats: f64) -> f64 {
        if self.bits {
            nats / std::f64::consts::LN_2
        } else {
            nats
        }
    }

    pub fn label(self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }
}

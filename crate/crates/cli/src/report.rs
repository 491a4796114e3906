//! Report files: a JSON object with `config`, `rows` and `violations`, or a
//! CSV table whose trailing columns carry the tool version and config.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use qot_core::analysis::SweepReport;

use crate::Failure;

pub const TOOL: &str = "qot";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Where and how a command writes its report.
#[derive(Clone, Debug)]
pub struct Destination {
    output: Option<PathBuf>,
    dir: PathBuf,
    pub format: Format,
}

impl Destination {
    pub fn new(output: Option<PathBuf>, dir: Option<PathBuf>, format: Format) -> Self {
        Self {
            output,
            dir: dir.unwrap_or_else(|| PathBuf::from(".")),
            format,
        }
    }

    fn path(&self, stem: &str, format: Format) -> PathBuf {
        match &self.output {
            Some(p) => p.clone(),
            None => self.dir.join(format!("{stem}.{}", format.extension())),
        }
    }

    /// Writes a report in the configured format.
    pub fn write_report(
        &self,
        stem: &str,
        envelope: Envelope,
        report: &SweepReport,
    ) -> Result<PathBuf, Failure> {
        let path = self.path(stem, self.format);
        let text = match self.format {
            Format::Json => envelope.with_report(report)?.to_json()?,
            Format::Csv => report
                .to_csv_with(&[
                    ("tool_version", format!("{TOOL} {VERSION}")),
                    ("config", envelope.config_json()?),
                ])
                .map_err(|e| Failure::Other(e.to_string()))?,
        };
        write(&path, &text)?;
        Ok(path)
    }

    /// Writes a JSON document regardless of the configured format.
    pub fn write_json_only(&self, stem: &str, envelope: &Envelope) -> Result<PathBuf, Failure> {
        let path = self.path(stem, Format::Json);
        write(&path, &envelope.to_json()?)?;
        Ok(path)
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, text).map_err(io)
}

fn to_value(v: impl Serialize) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Other(format!("json: {e}")))
}

/// Top-level report object. Key order is fixed, so equal runs give equal bytes.
pub struct Envelope {
    fields: Map<String, Value>,
}

impl Envelope {
    pub fn new(command: &str, args: impl Serialize, dest: &Destination) -> Self {
        let mut config = Map::new();
        config.insert("command".into(), Value::from(command));
        if let Ok(Value::Object(flags)) = serde_json::to_value(args) {
            config.extend(flags);
        }
        config.insert(
            "output_format".into(),
            serde_json::to_value(dest.format).unwrap_or(Value::Null),
        );
        let output = dest.output.as_ref().map(|p| p.display().to_string());
        config.insert("output_path".into(), Value::from(output));
        config.insert(
            "output_dir".into(),
            Value::from(dest.dir.display().to_string()),
        );

        let mut fields = Map::new();
        fields.insert("tool".into(), Value::from(TOOL));
        fields.insert("version".into(), Value::from(VERSION));
        fields.insert("config".into(), Value::Object(config));
        Self { fields }
    }

    pub fn with_extra(mut self, key: &str, value: impl Serialize) -> Result<Self, Failure> {
        self.fields.insert(key.into(), to_value(value)?);
        Ok(self)
    }

    fn with_report(mut self, report: &SweepReport) -> Result<Self, Failure> {
        if let Value::Object(r) = to_value(report)? {
            self.fields.extend(r);
        }
        Ok(self)
    }

    fn config_json(&self) -> Result<String, Failure> {
        serde_json::to_string(&self.fields["config"])
            .map_err(|e| Failure::Other(format!("json: {e}")))
    }

    fn to_json(&self) -> Result<String, Failure> {
        serde_json::to_string_pretty(&self.fields)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Failure::Other(format!("json: {e}")))
    }
}

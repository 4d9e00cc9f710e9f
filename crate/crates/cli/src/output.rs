//! Report rendering and writing.

use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;
use stabgem_core::report::{
    certificate_csv_row, certificate_markdown, record_csv, record_markdown, CSV_HEADER,
};
use stabgem_core::{Error, GemCertificate, Result};

use crate::GlobalOpts;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Md,
}

pub struct Report {
    pub command: String,
    /// Every parameter of the run, echoed for provenance.
    pub config: Value,
    pub result: Value,
    pub certificate: Option<GemCertificate>,
    /// Verbatim JSON document that replaces the envelope in JSON output.
    pub raw: Option<String>,
    /// Exit status when the report itself records a failed check.
    pub status: u8,
}

impl Report {
    pub fn new(command: &str, config: Value, result: Value) -> Self {
        Self {
            command: command.into(),
            config,
            result,
            certificate: None,
            raw: None,
            status: 0,
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Top-level fields of the result; nested values are inlined as compact JSON.
fn flat_fields(report: &Report) -> Vec<(&str, String)> {
    let mut fields = vec![("command", report.command.clone())];
    if let Value::Object(map) = &report.result {
        fields.extend(map.iter().map(|(k, v)| (k.as_str(), scalar(v))));
    } else {
        fields.push(("result", scalar(&report.result)));
    }
    fields
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json if report.raw.is_some() => report.raw.clone().unwrap_or_default() + "\n",
        Format::Json => {
            let mut doc = serde_json::json!({
                "command": report.command,
                "config": report.config,
                "result": report.result,
            });
            if let Some(cert) = &report.certificate {
                doc["certificate"] = serde_json::to_value(cert)?;
            }
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Csv => match &report.certificate {
            Some(cert) => format!("{CSV_HEADER}\n{}\n", certificate_csv_row(cert)),
            None => record_csv(&flat_fields(report)),
        },
        Format::Md => match &report.certificate {
            Some(cert) => certificate_markdown(cert),
            None => record_markdown(&flat_fields(report)),
        },
    })
}

pub fn emit(report: &Report, opts: &GlobalOpts) -> Result<()> {
    let text = render(report, opts.format)?;
    match &opts.output {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

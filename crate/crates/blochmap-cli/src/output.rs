//! CSV and JSON emitters. Every file starts with the effective run config so
//! any output can be reproduced byte-for-byte.

use crate::config::RunConfig;
use anyhow::Context;
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits: lossless binary64 round trip.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub struct CsvDoc {
    text: String,
}

impl CsvDoc {
    /// Header block: tool line, one-line config echo, extra comment lines,
    /// then the column row.
    pub fn new(config: &RunConfig, notes: &[String], columns: &[&str]) -> Self {
        let mut text = String::new();
        writeln!(text, "# blochmap {} {}", config.version, config.command).unwrap();
        writeln!(text, "# config: {}", config.echo()).unwrap();
        for note in notes {
            writeln!(text, "# {note}").unwrap();
        }
        writeln!(text, "{}", columns.join(",")).unwrap();
        CsvDoc { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        writeln!(self.text, "{}", fields.join(",")).unwrap();
    }

    pub fn write_to(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, &self.text)
            .with_context(|| format!("writing {}", path.display()))
    }
}

pub fn write_json(
    path: &Path,
    config: &RunConfig,
    data: serde_json::Value,
) -> anyhow::Result<()> {
    let doc = serde_json::json!({
        "tool": format!("blochmap {}", config.version),
        "config": serde_json::to_value(config)?,
        "data": data,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

//! Plain CSV writer with a commented provenance header.

use std::fmt::Write;
use std::time::{SystemTime, UNIX_EPOCH};

pub struct CsvDoc {
    buf: String,
}

impl CsvDoc {
    /// Header comments: tool version, command, optional timestamp, and the
    /// full effective configuration with every default filled in.
    pub fn new(command: &str, config_toml: &str, timestamp: bool) -> Self {
        let mut buf = String::new();
        writeln!(buf, "# fconc {} {command}", env!("CARGO_PKG_VERSION")).unwrap();
        if timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            writeln!(buf, "# timestamp: {secs} (unix seconds)").unwrap();
        }
        for line in config_toml.lines() {
            if line.is_empty() {
                buf.push_str("#\n");
            } else {
                writeln!(buf, "# {line}").unwrap();
            }
        }
        CsvDoc { buf }
    }

    pub fn comment(&mut self, text: &str) {
        for line in text.lines() {
            writeln!(self.buf, "# {line}").unwrap();
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<&str> = fields.iter().map(|s| s.as_ref()).collect();
        self.buf.push_str(&line.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Shortest round-trip representation.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Drop the timestamp comment so two documents can be compared.
pub fn strip_timestamp(doc: &str) -> String {
    doc.lines()
        .filter(|l| !l.starts_with("# timestamp:"))
        .map(|l| format!("{l}\n"))
        .collect()
}

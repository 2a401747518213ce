//! Deterministic check reports.
//!
//! Machine format is byte-stable for a fixed (input, seed, tool version):
//! wall time is confined to the human format and never enters the
//! machine serialization or the digest.

use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub digest: String,
    pub seed: Option<u64>,
    /// stable-order content lines (`check link pass`, `residual 0.0`, ...)
    pub lines: Vec<String>,
    pub failed: bool,
    pub elapsed_ms: u128,
}

pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn new(command: &str, input: &[u8]) -> Self {
        Report {
            command: command.to_string(),
            digest: digest_hex(input),
            seed: None,
            lines: Vec::new(),
            failed: false,
            elapsed_ms: 0,
        }
    }

    pub fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn fail(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
        self.failed = true;
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Machine => {
                out.push_str("mkcat-report v1\n");
                out.push_str(&format!("tool {TOOL_VERSION}\n"));
                out.push_str(&format!("command {}\n", self.command));
                out.push_str(&format!("digest {}\n", self.digest));
                if let Some(seed) = self.seed {
                    out.push_str(&format!("seed {seed}\n"));
                }
                for line in &self.lines {
                    out.push_str(line);
                    out.push('\n');
                }
                out.push_str(if self.failed { "status fail\n" } else { "status pass\n" });
            }
            Format::Human => {
                out.push_str(&format!("mkcat {} (v{TOOL_VERSION})\n", self.command));
                out.push_str(&format!("input sha256 {}\n", self.digest));
                if let Some(seed) = self.seed {
                    out.push_str(&format!("seed {seed}\n"));
                }
                for line in &self.lines {
                    out.push_str("  ");
                    out.push_str(line);
                    out.push('\n');
                }
                out.push_str(if self.failed { "FAIL" } else { "PASS" });
                out.push_str(&format!(" ({} ms)\n", self.elapsed_ms));
            }
        }
        out
    }
}

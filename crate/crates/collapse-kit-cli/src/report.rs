//! Deterministic report writers.
//!
//! Every artifact starts with a comment block naming the subcommand,
//! the CSV schema, a SHA-256 digest of the effective configuration,
//! and the two sign/measure conventions that downstream consumers need
//! to interpret the numbers. No timestamps, hostnames, or thread
//! counts appear anywhere: identical configuration yields identical
//! bytes.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Schema tag stamped on every CSV artifact.
pub const CSV_SCHEMA: &str = "collapse-kit-csv/v1";

/// Sign convention note: which combination of the matter fields each
/// time direction minimizes.
pub const J_SIGN_NOTE: &str = "j_sign: future = mu - jn, past = mu + jn";

/// Measure convention note for the integral criterion.
pub const MO_MEASURE_NOTE: &str =
    "mo_measure: primary = proper (sqrt(g11) dr), variant = areal (rho' dr)";

/// SHA-256 digest (hex) of a run plan, serialized canonically as TOML.
pub fn config_digest<T: Serialize>(plan: &T) -> String {
    let text = toml::to_string(plan).expect("run plans serialize to TOML");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Full-precision CSV cell: 17 significant digits, empty for
/// non-finite values.
pub fn fmt_full(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

/// Human-summary formatting: 6 significant digits.
pub fn fmt_human(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.5e}")
    } else {
        format!("{x}")
    }
}

/// One CSV cell.
pub enum Cell<'a> {
    F(f64),
    U(usize),
    B(bool),
    S(&'a str),
}

impl Cell<'_> {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_full(*x),
            Cell::U(u) => u.to_string(),
            Cell::B(b) => b.to_string(),
            // Free-text cells stay unquoted: delimiter characters are
            // folded to spacing-safe stand-ins so rows always split
            // cleanly on commas.
            Cell::S(s) => s.replace(',', ";").replace('\n', " "),
        }
    }
}

/// Builder for a commented CSV artifact.
pub struct Csv {
    buf: String,
}

impl Csv {
    /// Start a report with the standard provenance block.
    pub fn new(subcommand: &str, digest: &str) -> Self {
        let mut buf = String::new();
        buf.push_str(&format!("# collapse-kit report: {subcommand}\n"));
        buf.push_str(&format!("# schema: {CSV_SCHEMA}\n"));
        buf.push_str(&format!("# config_digest: {digest}\n"));
        buf.push_str(&format!("# {J_SIGN_NOTE}\n"));
        buf.push_str(&format!("# {MO_MEASURE_NOTE}\n"));
        Csv { buf }
    }

    pub fn comment(&mut self, line: &str) {
        self.buf.push_str("# ");
        self.buf.push_str(line);
        self.buf.push('\n');
    }

    pub fn columns(&mut self, names: &[&str]) {
        self.buf.push_str(&names.join(","));
        self.buf.push('\n');
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let rendered: Vec<String> = cells.iter().map(Cell::render).collect();
        self.buf.push_str(&rendered.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

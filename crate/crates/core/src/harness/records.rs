//! Sweep results: CSV / JSONL export and import, plot data, and the on-disk cache.

use std::fs;
use std::path::{Path, PathBuf};

use rug::Float;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::eta::main_sum_length;
use crate::hardy::{outside_theorem_regime, ResidualRecord};
use crate::numerics::{format_real, parse_real};

/// Bumped whenever a change can alter computed records; older cache entries are ignored.
pub const CODE_VERSION: &str = concat!("hardyz-", env!("CARGO_PKG_VERSION"), "-r1");

pub const CSV_COLUMNS: [&str; 12] = [
    "t",
    "k",
    "main_sum",
    "reference",
    "residual",
    "theta_prime",
    "normalized",
    "envelope",
    "envelope_ratio",
    "imag_leak",
    "working_bits",
    "error",
];

/// One `(t, k)` slot of a sweep. Failures stay in the output instead of being dropped.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)] // almost every entry is `Ok`
pub enum SweepEntry {
    Ok(ResidualRecord),
    Failed { t: Float, k: u32, error: String },
}

impl SweepEntry {
    pub fn t(&self) -> &Float {
        match self {
            SweepEntry::Ok(r) => &r.t,
            SweepEntry::Failed { t, .. } => t,
        }
    }

    pub fn k(&self) -> u32 {
        match self {
            SweepEntry::Ok(r) => r.k,
            SweepEntry::Failed { k, .. } => *k,
        }
    }

    pub fn record(&self) -> Option<&ResidualRecord> {
        match self {
            SweepEntry::Ok(r) => Some(r),
            SweepEntry::Failed { .. } => None,
        }
    }

    pub fn error(&self) -> Option<&str> {
        match self {
            SweepEntry::Ok(_) => None,
            SweepEntry::Failed { error, .. } => Some(error),
        }
    }
}

/// Text form shared by the CSV and JSONL exports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordRow {
    pub t: String,
    pub k: u32,
    pub main_sum: Option<String>,
    pub reference: Option<String>,
    pub residual: Option<String>,
    pub theta_prime: Option<String>,
    pub normalized: Option<String>,
    pub envelope: Option<String>,
    pub envelope_ratio: Option<String>,
    pub imag_leak: Option<String>,
    pub working_bits: Option<u32>,
    #[serde(default)]
    pub error: Option<String>,
}

impl RecordRow {
    pub fn from_entry(entry: &SweepEntry) -> Self {
        match entry {
            SweepEntry::Ok(r) => RecordRow {
                t: format_real(&r.t),
                k: r.k,
                main_sum: Some(format_real(&r.main_sum)),
                reference: Some(format_real(&r.reference)),
                residual: Some(format_real(&r.residual)),
                theta_prime: Some(format_real(&r.theta_prime)),
                normalized: Some(format_real(&r.normalized)),
                envelope: Some(format_real(&r.envelope)),
                envelope_ratio: Some(format_real(&r.envelope_ratio)),
                imag_leak: Some(format_real(&r.imag_leak)),
                working_bits: Some(r.working_bits),
                error: None,
            },
            SweepEntry::Failed { t, k, error } => RecordRow {
                t: format_real(t),
                k: *k,
                main_sum: None,
                reference: None,
                residual: None,
                theta_prime: None,
                normalized: None,
                envelope: None,
                envelope_ratio: None,
                imag_leak: None,
                working_bits: None,
                error: Some(error.clone()),
            },
        }
    }

    /// Rebuilds the entry. Every value is read back at the record's working
    /// precision; the residual, which is stored exactly, at `residual_bits` if given.
    pub fn to_entry(&self, residual_bits: Option<u32>) -> Result<SweepEntry> {
        if let Some(error) = &self.error {
            return Ok(SweepEntry::Failed {
                t: parse_real(&self.t, bits_for_text(&self.t).max(64))?,
                k: self.k,
                error: error.clone(),
            });
        }
        let wp = self.working_bits.ok_or_else(|| missing("working_bits"))?;
        let field = |v: &Option<String>, name: &str| -> Result<Float> {
            parse_real(v.as_deref().ok_or_else(|| missing(name))?, wp)
        };
        let residual_text = self.residual.as_deref().ok_or_else(|| missing("residual"))?;
        let residual_bits = residual_bits.unwrap_or_else(|| bits_for_text(residual_text).max(wp));
        let t = parse_real(&self.t, wp)?;
        let theta_prime = field(&self.theta_prime, "theta_prime")?;
        let theta_prime_pow_k = Float::with_val(wp, rug::ops::Pow::pow(&theta_prime, self.k));
        Ok(SweepEntry::Ok(ResidualRecord {
            n_terms: main_sum_length(&t, wp),
            extrapolated: outside_theorem_regime(&theta_prime, self.k),
            t,
            k: self.k,
            main_sum: field(&self.main_sum, "main_sum")?,
            reference: field(&self.reference, "reference")?,
            residual: parse_real(residual_text, residual_bits)?,
            theta_prime,
            theta_prime_pow_k,
            normalized: field(&self.normalized, "normalized")?,
            envelope: field(&self.envelope, "envelope")?,
            envelope_ratio: field(&self.envelope_ratio, "envelope_ratio")?,
            imag_leak: field(&self.imag_leak, "imag_leak")?,
            working_bits: wp,
        }))
    }
}

fn missing(name: &str) -> Error {
    Error::Parse(format!("record is missing `{name}`"))
}

/// Smallest precision whose serialized form has as many digits as `text`.
fn bits_for_text(text: &str) -> u32 {
    let digits = text
        .split(['e', 'E'])
        .next()
        .unwrap_or("")
        .chars()
        .filter(char::is_ascii_digit)
        .count();
    ((digits.saturating_sub(2)) as f64 / 0.302).floor() as u32
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

pub fn to_csv_string(entries: &[SweepEntry]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).map_err(csv_error)?;
    for e in entries {
        w.serialize(RecordRow::from_entry(e)).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_jsonl_string(entries: &[SweepEntry]) -> Result<String> {
    let mut out = String::new();
    for e in entries {
        out.push_str(&serde_json::to_string(&RecordRow::from_entry(e))?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepEntry>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_error)?.clone();
    // the trailing `error` column is optional on input
    let n = headers.len();
    if !(n == CSV_COLUMNS.len() || n == CSV_COLUMNS.len() - 1) || headers.iter().zip(CSV_COLUMNS).any(|(a, b)| a != b) {
        return Err(Error::Parse(format!("unexpected CSV header: {headers:?}")));
    }
    r.deserialize::<RecordRow>()
        .map(|row| row.map_err(csv_error)?.to_entry(None))
        .collect()
}

pub fn parse_jsonl(text: &str) -> Result<Vec<SweepEntry>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str::<RecordRow>(l)?.to_entry(None))
        .collect()
}

/// Output format of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(Error::invalid(format!(
                "unknown format `{other}` (expected csv or jsonl)"
            ))),
        }
    }
}

pub fn render(entries: &[SweepEntry], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => to_csv_string(entries),
        OutputFormat::Jsonl => to_jsonl_string(entries),
    }
}

pub fn parse(text: &str, format: OutputFormat) -> Result<Vec<SweepEntry>> {
    match format {
        OutputFormat::Csv => parse_csv(text),
        OutputFormat::Jsonl => parse_jsonl(text),
    }
}

fn log10_text(x: &Float) -> String {
    let v = Float::with_val(64, x.log10_ref()).to_f64();
    format!("{v:e}")
}

/// Writes `<prefix>-normalized.dat` with rows `k log10(normalized)` and
/// `<prefix>-envelope_ratio.dat` with rows `k log10(envelope_ratio)`.
/// Each `t` gets its own block, headed by a `# t = ...` comment and sorted by `k`.
pub fn export_plot_data(records: &[ResidualRecord], prefix: &Path) -> Result<(PathBuf, PathBuf)> {
    if records.is_empty() {
        return Err(Error::invalid("no records to export"));
    }
    let mut sorted: Vec<&ResidualRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.t.partial_cmp(&b.t)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.k.cmp(&b.k))
    });
    let mut normalized = String::new();
    let mut ratio = String::new();
    let mut current: Option<&Float> = None;
    for r in sorted {
        if current != Some(&r.t) {
            if current.is_some() {
                normalized.push_str("\n\n");
                ratio.push_str("\n\n");
            }
            let header = format!("# t = {}\n", format_real(&r.t));
            normalized.push_str(&header);
            normalized.push_str("# k log10_normalized\n");
            ratio.push_str(&header);
            ratio.push_str("# k log10_envelope_ratio\n");
            current = Some(&r.t);
        }
        normalized.push_str(&format!("{} {}\n", r.k, log10_text(&r.normalized)));
        ratio.push_str(&format!("{} {}\n", r.k, log10_text(&r.envelope_ratio)));
    }
    let base = prefix.to_string_lossy();
    let a = PathBuf::from(format!("{base}-normalized.dat"));
    let b = PathBuf::from(format!("{base}-envelope_ratio.dat"));
    fs::write(&a, normalized)?;
    fs::write(&b, ratio)?;
    Ok((a, b))
}

/// Directory of cached records, one JSON file per `(t, k, working_bits, c, version)`.
#[derive(Debug, Clone)]
pub struct RecordCache {
    dir: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    version: String,
    key: String,
    residual_bits: u32,
    row: RecordRow,
}

impl RecordCache {
    pub const ENV_VAR: &'static str = "HARDYZ_CACHE_DIR";

    pub fn new(dir: impl Into<PathBuf>) -> Self {
        RecordCache { dir: dir.into() }
    }

    /// Cache at `$HARDYZ_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os(Self::ENV_VAR).filter(|v| !v.is_empty()).map(Self::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(t: &Float, k: u32, working_bits: u32, c: &Float) -> String {
        let material = format!(
            "{}|{k}|{working_bits}|{}|{CODE_VERSION}",
            format_real(t),
            format_real(c)
        );
        hex::encode(Sha256::digest(material.as_bytes()))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A cached record, or `None` when absent, unreadable or from another version.
    pub fn get(&self, key: &str) -> Option<ResidualRecord> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if file.version != CODE_VERSION || file.key != key {
            return None;
        }
        match file.row.to_entry(Some(file.residual_bits)).ok()? {
            SweepEntry::Ok(r) => Some(r),
            SweepEntry::Failed { .. } => None,
        }
    }

    pub fn put(&self, key: &str, record: &ResidualRecord) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let file = CacheFile {
            version: CODE_VERSION.to_string(),
            key: key.to_string(),
            residual_bits: record.residual.prec(),
            row: RecordRow::from_entry(&SweepEntry::Ok(record.clone())),
        };
        // write then rename so a concurrent reader never sees half a file
        let tmp = self.dir.join(format!("{key}.json.tmp"));
        fs::write(&tmp, serde_json::to_string(&file)?)?;
        fs::rename(&tmp, self.path(key))?;
        Ok(())
    }
}

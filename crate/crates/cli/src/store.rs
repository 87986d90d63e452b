//! Output directory layout, CSV schemas and the manifest.
//!
//! Every file is written to a temporary sibling and renamed into place, so
//! an interrupted run never leaves a truncated table behind.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use msac_core::tidse::ResonanceRecord;
use msac_core::{Parity, Representation};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever a column is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

pub const RESONANCES: &str = "resonances.csv";
pub const LIFETIMES: &str = "lifetimes.csv";
pub const LIFETIMES_PHYSICAL: &str = "lifetimes_physical.csv";
pub const MANIFEST: &str = "manifest.json";
pub const CACHE_DIR: &str = "cache";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRow {
    #[serde(rename = "V")]
    pub v: f64,
    pub nu: usize,
    pub parity: String,
    #[serde(rename = "W_nu")]
    pub w_nu: f64,
    pub s_star: f64,
    pub tail_amp: f64,
    pub x_max: f64,
    pub dx: f64,
    pub representation: String,
    /// Decay rate estimate from the tail, used to size later searches.
    pub flux_rate: f64,
}

impl From<&ResonanceRecord> for ResonanceRow {
    fn from(r: &ResonanceRecord) -> Self {
        Self {
            v: r.v,
            nu: r.nu,
            parity: r.parity.name().into(),
            w_nu: r.w_nu,
            s_star: r.s_star,
            tail_amp: r.tail_amp,
            x_max: r.x_max,
            dx: r.dx,
            representation: r.representation.name().into(),
            flux_rate: r.flux_rate,
        }
    }
}

impl TryFrom<&ResonanceRow> for ResonanceRecord {
    type Error = anyhow::Error;

    fn try_from(row: &ResonanceRow) -> Result<Self> {
        Ok(ResonanceRecord {
            v: row.v,
            nu: row.nu,
            parity: Parity::parse(&row.parity).with_context(|| format!("bad parity {:?}", row.parity))?,
            w_nu: row.w_nu,
            s_star: row.s_star,
            tail_amp: row.tail_amp,
            x_max: row.x_max,
            dx: row.dx,
            representation: Representation::parse(&row.representation)
                .with_context(|| format!("bad representation {:?}", row.representation))?,
            flux_rate: row.flux_rate,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeRow {
    #[serde(rename = "V")]
    pub v: f64,
    pub nu: usize,
    #[serde(rename = "W_nu")]
    pub w_nu: f64,
    pub method: String,
    pub tau: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    pub flags: String,
    pub parity: String,
    pub gamma: Option<f64>,
    pub dx: f64,
    pub x_max: f64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalLifetimeRow {
    #[serde(rename = "V")]
    pub v: f64,
    pub nu: usize,
    #[serde(rename = "W_nu")]
    pub w_nu: f64,
    pub method: String,
    pub tau: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    pub flags: String,
    pub parity: String,
    pub gamma: Option<f64>,
    pub dx: f64,
    pub x_max: f64,
    pub config_hash: String,
    #[serde(rename = "W_physical")]
    pub w_physical: f64,
    pub tau_physical: Option<f64>,
}

impl PhysicalLifetimeRow {
    pub fn new(row: LifetimeRow, w_physical: f64, tau_physical: Option<f64>) -> Self {
        let LifetimeRow { v, nu, w_nu, method, tau, q, flags, parity, gamma, dx, x_max, config_hash } = row;
        Self { v, nu, w_nu, method, tau, q, flags, parity, gamma, dx, x_max, config_hash, w_physical, tau_physical }
    }
}

/// Serializes `rows` with a header line.
pub fn csv_bytes<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    r.deserialize().collect::<std::result::Result<Vec<T>, _>>().with_context(|| format!("parsing {}", path.display()))
}

pub const RESONANCE_COLUMNS: &[&str] =
    &["V", "nu", "parity", "W_nu", "s_star", "tail_amp", "x_max", "dx", "representation", "flux_rate"];
pub const LIFETIME_COLUMNS: &[&str] =
    &["V", "nu", "W_nu", "method", "tau", "Q", "flags", "parity", "gamma", "dx", "x_max", "config_hash"];
pub const PHYSICAL_COLUMNS: &[&str] = &[
    "V",
    "nu",
    "W_nu",
    "method",
    "tau",
    "Q",
    "flags",
    "parity",
    "gamma",
    "dx",
    "x_max",
    "config_hash",
    "W_physical",
    "tau_physical",
];
pub const TRACE_COLUMNS: &[&str] = &["t", "P", "loss_rate", "absorbed_rate"];
pub const DENSITY_COLUMNS: &[&str] = &["x", "psi_u", "psi_d", "m_A", "m_B", "m_Sigma", "M_cum"];
pub const PHASE_COLUMNS: &[&str] = &["W", "phi", "phi0", "phi_rel"];
pub const CURVE_COLUMNS: &[&str] =
    &["x", "V_1", "V_2", "V_u", "V_d", "Vt_u", "Vt_d", "theta", "A_du", "B_du", "B_uu", "B_dd"];
pub const WAVE_COLUMNS: &[&str] = &["x", "psi_first", "psi_second"];

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Entry of the manifest file list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub couplings: Vec<f64>,
    pub methods: Vec<String>,
    pub failures: usize,
    /// Column lists of every table kind, keyed by file name or directory.
    pub columns: BTreeMap<String, Vec<String>>,
    pub files: Vec<FileEntry>,
}

pub fn column_schema() -> BTreeMap<String, Vec<String>> {
    let owned = |c: &[&str]| c.iter().map(|s| s.to_string()).collect();
    BTreeMap::from([
        (RESONANCES.to_string(), owned(RESONANCE_COLUMNS)),
        (LIFETIMES.to_string(), owned(LIFETIME_COLUMNS)),
        (LIFETIMES_PHYSICAL.to_string(), owned(PHYSICAL_COLUMNS)),
        ("traces/".to_string(), owned(TRACE_COLUMNS)),
        ("fgr_density/".to_string(), owned(DENSITY_COLUMNS)),
        ("phase/".to_string(), owned(PHASE_COLUMNS)),
        ("curves/".to_string(), owned(CURVE_COLUMNS)),
        ("waves/".to_string(), owned(WAVE_COLUMNS)),
    ])
}

/// Collects the files of one run and writes them, plus the manifest, under `root`.
#[derive(Debug)]
pub struct OutputSet {
    root: PathBuf,
    files: BTreeMap<String, Vec<u8>>,
}

impl OutputSet {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into(), files: BTreeMap::new() }
    }

    pub fn add(&mut self, relative: impl Into<String>, bytes: Vec<u8>) {
        self.files.insert(relative.into(), bytes);
    }

    pub fn add_csv<T: Serialize>(&mut self, relative: impl Into<String>, rows: &[T], header: &[&str]) -> Result<()> {
        self.add(relative, csv_bytes(rows, header)?);
        Ok(())
    }

    /// Writes every file and a manifest built by `manifest` from the file list.
    pub fn finish(self, manifest: impl FnOnce(Vec<FileEntry>) -> Manifest) -> Result<Manifest> {
        let mut entries = Vec::new();
        for (relative, bytes) in &self.files {
            write_atomic(&self.root.join(relative), bytes)?;
            entries.push(FileEntry { path: relative.clone(), sha256: hex::encode(Sha256::digest(bytes)), bytes: bytes.len() });
        }
        let m = manifest(entries);
        let mut json = serde_json::to_vec_pretty(&m)?;
        json.push(b'\n');
        write_atomic(&self.root.join(MANIFEST), &json)?;
        Ok(m)
    }
}

/// Label used in per-state file names, e.g. `V1.5275_nu03`.
pub fn state_label(v: f64, nu: usize) -> String {
    format!("V{v}_nu{nu:02}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> ResonanceRecord {
        ResonanceRecord {
            v: 1.5275,
            nu: 3,
            parity: Parity::Odd,
            w_nu: 2.5,
            s_star: -0.1234567890123,
            tail_amp: 1.0e-7 / 3.0,
            x_max: 15.09,
            dx: 1e-3,
            representation: Representation::Diabatic,
            flux_rate: 1.0 / 6048.02,
        }
    }

    #[test]
    fn resonance_rows_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rows = vec![ResonanceRow::from(&record())];
        write_atomic(&path, &csv_bytes(&rows, RESONANCE_COLUMNS).unwrap()).unwrap();
        let back: Vec<ResonanceRow> = read_csv(&path).unwrap();
        assert_eq!(back, rows);
        assert_eq!(ResonanceRecord::try_from(&back[0]).unwrap(), record());
    }

    #[test]
    fn header_matches_serialized_fields() {
        let row = LifetimeRow {
            v: 1.0,
            nu: 0,
            w_nu: 1.5,
            method: "ad_FC".into(),
            tau: None,
            q: None,
            flags: "error:x".into(),
            parity: "even".into(),
            gamma: None,
            dx: 0.0,
            x_max: 0.0,
            config_hash: "abc".into(),
        };
        let text = String::from_utf8(csv_bytes(std::slice::from_ref(&row), LIFETIME_COLUMNS).unwrap()).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let parsed: LifetimeRow = r.deserialize().next().unwrap().unwrap();
        assert_eq!(parsed, row);
        let physical = PhysicalLifetimeRow::new(row, 3.0, Some(2.0));
        let text = String::from_utf8(csv_bytes(&[physical], PHYSICAL_COLUMNS).unwrap()).unwrap();
        assert!(text.lines().nth(1).unwrap().ends_with(",3.0,2.0"));
    }

    #[test]
    fn manifest_lists_written_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut set = OutputSet::new(dir.path());
        set.add("a/b.csv", b"x\n1\n".to_vec());
        let m = set
            .finish(|files| Manifest {
                schema_version: SCHEMA_VERSION,
                tool: "t".into(),
                tool_version: "0".into(),
                command: "c".into(),
                config_hash: "h".into(),
                config: serde_json::Value::Null,
                couplings: vec![],
                methods: vec![],
                failures: 0,
                columns: column_schema(),
                files,
            })
            .unwrap();
        assert_eq!(m.files.len(), 1);
        assert_eq!(std::fs::read(dir.path().join("a/b.csv")).unwrap(), b"x\n1\n");
        assert!(dir.path().join(MANIFEST).exists());
    }
}

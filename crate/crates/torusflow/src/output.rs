//! File formats: the diagnostics time series (CSV), raw binary field
//! snapshots with a fixed 64-byte header, and the run manifest.

use sha2::{Digest, Sha256};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::EnergyRecord;
use crate::error::Error;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"TORUSFLW";
pub const SNAPSHOT_VERSION: u64 = 1;
pub const SNAPSHOT_HEADER_BYTES: usize = 64;

/// CSV columns, in order. Downstream tooling relies on this exact set.
pub const CSV_COLUMNS: &[&str] = &[
    "t",
    "kinetic",
    "surface",
    "total",
    "dissipation_visc",
    "dissipation_ac",
    "density_ratio",
    "discrepancy_max",
    "phi_min",
    "phi_max",
    "interface_length",
    "brakke_lhs",
    "brakke_rhs",
];

/// Render the time series deterministically (fixed-width scientific
/// notation round-trips bit-exactly).
pub fn timeseries_bytes(records: &[EnergyRecord<f64>]) -> String {
    let mut s = String::new();
    s.push_str(&CSV_COLUMNS.join(","));
    s.push('\n');
    for r in records {
        let cols = [
            r.t,
            r.kinetic,
            r.surface,
            r.total,
            r.dissipation_visc,
            r.dissipation_ac,
            r.density_ratio,
            r.discrepancy_max,
            r.phi_min,
            r.phi_max,
            r.interface_length,
            r.brakke_lhs,
            r.brakke_rhs,
        ];
        let row: Vec<String> = cols.iter().map(|v| format!("{v:.17e}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn write_timeseries(path: &Path, records: &[EnergyRecord<f64>]) -> Result<(), Error> {
    fs::write(path, timeseries_bytes(records))?;
    Ok(())
}

/// In-memory snapshot: the phase field followed by the velocity
/// components, all on the same `N^d` grid, row-major, f64.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub d: usize,
    pub n: usize,
    pub t: f64,
    pub epsilon: f64,
    pub phi: Vec<f64>,
    pub velocity: Vec<Vec<f64>>,
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<(), Error> {
    let len = snap.n.pow(snap.d as u32);
    if snap.phi.len() != len || snap.velocity.len() != snap.d {
        return Err(Error::usage("snapshot fields do not match the declared grid"));
    }
    let mut buf: Vec<u8> =
        Vec::with_capacity(SNAPSHOT_HEADER_BYTES + 8 * len * (1 + snap.d));
    buf.extend_from_slice(SNAPSHOT_MAGIC);
    buf.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(snap.d as u64).to_le_bytes());
    buf.extend_from_slice(&(snap.n as u64).to_le_bytes());
    buf.extend_from_slice(&snap.t.to_le_bytes());
    buf.extend_from_slice(&snap.epsilon.to_le_bytes());
    buf.resize(SNAPSHOT_HEADER_BYTES, 0);
    for field in std::iter::once(&snap.phi).chain(snap.velocity.iter()) {
        if field.len() != len {
            return Err(Error::usage("snapshot field length mismatch"));
        }
        for v in field {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, Error> {
    let mut file = fs::File::open(path)?;
    let mut header = [0u8; SNAPSHOT_HEADER_BYTES];
    file.read_exact(&mut header)?;
    if &header[0..8] != SNAPSHOT_MAGIC {
        return Err(Error::Format("bad snapshot magic".to_string()));
    }
    let version = u64::from_le_bytes(header[8..16].try_into().unwrap());
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let d = u64::from_le_bytes(header[16..24].try_into().unwrap()) as usize;
    let n = u64::from_le_bytes(header[24..32].try_into().unwrap()) as usize;
    let t = f64::from_le_bytes(header[32..40].try_into().unwrap());
    let epsilon = f64::from_le_bytes(header[40..48].try_into().unwrap());
    if !(d == 2 || d == 3) || n == 0 || n > 1 << 14 {
        return Err(Error::Format(format!("implausible snapshot geometry d = {d}, N = {n}")));
    }
    let len = n.pow(d as u32);
    let mut body = Vec::new();
    file.read_to_end(&mut body)?;
    let want = 8 * len * (1 + d);
    if body.len() != want {
        return Err(Error::Format(format!(
            "snapshot body has {} bytes, expected {want}",
            body.len()
        )));
    }
    let read_field = |offset: usize| -> Vec<f64> {
        (0..len)
            .map(|i| {
                let at = offset + 8 * i;
                f64::from_le_bytes(body[at..at + 8].try_into().unwrap())
            })
            .collect()
    };
    let phi = read_field(0);
    let velocity = (0..d).map(|c| read_field(8 * len * (1 + c))).collect();
    Ok(Snapshot {
        d,
        n,
        t,
        epsilon,
        phi,
        velocity,
    })
}

/// Human/machine readable header + field statistics, for `info`.
pub fn describe_snapshot(path: &Path) -> Result<String, Error> {
    let snap = read_snapshot(path)?;
    let mut s = String::new();
    s.push_str(&format!("format = TORUSFLW v{SNAPSHOT_VERSION}\n"));
    s.push_str(&format!("d = {}\nn = {}\nt = {}\nepsilon = {}\n", snap.d, snap.n, snap.t, snap.epsilon));
    let stats = |name: &str, f: &[f64], s: &mut String| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut l2 = 0.0f64;
        for &v in f {
            lo = lo.min(v);
            hi = hi.max(v);
            l2 += v * v;
        }
        let h_d = 1.0 / f.len() as f64;
        s.push_str(&format!(
            "{name}: min = {lo:.6e}, max = {hi:.6e}, l2 = {:.6e}\n",
            (l2 * h_d).sqrt()
        ));
    };
    stats("phi", &snap.phi, &mut s);
    for (c, u) in snap.velocity.iter().enumerate() {
        stats(&format!("u{}", c + 1), u, &mut s);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    BlowUp,
}

impl RunStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::BlowUp => "numerical_blowup",
        }
    }
}

/// Write the manifest atomically (tmp + rename): config echo under
/// `config.`, wall-clock bounds, termination status and a checksummed
/// file inventory.
pub fn write_manifest(
    dir: &Path,
    config_echo: &str,
    status: RunStatus,
    start_unix_ns: u128,
    end_unix_ns: u128,
    files: &[PathBuf],
) -> Result<PathBuf, Error> {
    let mut s = String::new();
    s.push_str(&format!("manifest.version = 1\n"));
    s.push_str(&format!(
        "manifest.code_version = {}\n",
        env!("CARGO_PKG_VERSION")
    ));
    s.push_str(&format!("manifest.start_unix_ns = {start_unix_ns}\n"));
    s.push_str(&format!("manifest.end_unix_ns = {end_unix_ns}\n"));
    s.push_str(&format!("manifest.status = {}\n", status.name()));
    for line in config_echo.lines() {
        s.push_str("config.");
        s.push_str(line);
        s.push('\n');
    }
    for f in files {
        let name = f
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| Error::usage("manifest file entries need utf-8 names"))?;
        let bytes = fs::read(f)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        s.push_str(&format!("file.{name}.bytes = {}\n", bytes.len()));
        s.push_str(&format!("file.{name}.sha256 = {hex}\n"));
    }
    let path = dir.join("manifest");
    let tmp = dir.join("manifest.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(s.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Extract the `config.`-prefixed echo back out of a manifest.
pub fn manifest_config_echo(manifest_text: &str) -> String {
    let mut out = String::new();
    for line in manifest_text.lines() {
        if let Some(rest) = line.strip_prefix("config.") {
            out.push_str(rest);
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_roundtrip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.bin");
        let n = 16usize;
        let len = n * n;
        let snap = Snapshot {
            d: 2,
            n,
            t: 0.125,
            epsilon: 0.05,
            phi: (0..len).map(|i| (i as f64 * 0.1).sin()).collect(),
            velocity: vec![
                (0..len).map(|i| (i as f64 * 0.2).cos()).collect(),
                (0..len).map(|i| i as f64 / len as f64 - 0.5).collect(),
            ],
        };
        write_snapshot(&path, &snap).unwrap();
        let back = read_snapshot(&path).unwrap();
        assert_eq!(snap, back);
        // bitwise: every f64 must round-trip exactly
        for (a, b) in snap.phi.iter().zip(back.phi.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let info = describe_snapshot(&path).unwrap();
        assert!(info.contains("TORUSFLW"));
        assert!(info.contains("n = 16"));
    }

    #[test]
    fn corrupted_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        fs::write(&path, b"NOTMAGIC").unwrap();
        assert!(read_snapshot(&path).is_err());
    }

    #[test]
    fn csv_has_documented_columns_and_is_deterministic() {
        let rec = EnergyRecord::<f64> {
            t: 0.0,
            kinetic: 1.0,
            surface: 2.0,
            total: 3.0,
            dissipation_visc: 0.1,
            dissipation_ac: 0.2,
            discrepancy_max: -0.5,
            density_ratio: 1.5,
            phi_min: -1.0,
            phi_max: 1.0,
            interface_length: 1.57,
            mu_weighted: 2.0,
            brakke_value: -25.0,
            brakke_valid: true,
            brakke_lhs: 0.0,
            brakke_rhs: 0.0,
            max_div_u: 0.0,
            energy_above_cutoff: 0.0,
        };
        let a = timeseries_bytes(&[rec]);
        let b = timeseries_bytes(&[rec]);
        assert_eq!(a, b);
        let header = a.lines().next().unwrap();
        assert_eq!(header, CSV_COLUMNS.join(","));
        assert_eq!(header.split(',').count(), 13);
    }

    #[test]
    fn manifest_echo_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let echo = "grid.n = 64\nseed = 7\n";
        let f = dir.path().join("run.csv");
        fs::write(&f, "t\n").unwrap();
        write_manifest(dir.path(), echo, RunStatus::Completed, 1, 2, &[f]).unwrap();
        let text = fs::read_to_string(dir.path().join("manifest")).unwrap();
        assert_eq!(manifest_config_echo(&text), echo);
        assert!(text.contains("file.run.csv.sha256"));
        assert!(text.contains("manifest.status = completed"));
    }
}

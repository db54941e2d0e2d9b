use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::SnapshotData;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "z,re_psi_plus,im_psi_plus,re_psi_minus,im_psi_minus,energy_density";

pub fn snapshot_file_name(index: usize, t: f64) -> String {
    format!("snap_{index:05}_{t:.6}.csv")
}

/// Create the directory if needed and prove that files can be placed in it.
pub(crate) fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

/// Write through a temporary sibling and rename into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp: PathBuf = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_snapshot(path: &Path, snap: &SnapshotData) -> Result<()> {
    let field = &snap.field;
    let mut text = String::with_capacity(field.grid.n_z * 128);
    text.push_str(CSV_HEADER);
    text.push('\n');
    for i in 0..field.grid.n_z {
        let (p, m) = (field.psi_plus[i], field.psi_minus[i]);
        let row = [field.grid.z(i), p.re, p.im, m.re, m.im, snap.energy_density[i]];
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::NumericBlowup {
                step: i,
                detail: format!("non-finite value {bad} in snapshot at t = {}", field.t),
            });
        }
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                text.push(',');
            }
            write!(text, "{v:.15e}").expect("writing to a String cannot fail");
        }
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

/// Columns of one snapshot file.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotTable {
    pub z: Vec<f64>,
    pub psi_plus: Vec<Complex64>,
    pub psi_minus: Vec<Complex64>,
    pub energy_density: Vec<f64>,
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("{}: unexpected snapshot header", path.display()),
        });
    }
    let mut table = SnapshotTable {
        z: Vec::new(),
        psi_plus: Vec::new(),
        psi_minus: Vec::new(),
        energy_density: Vec::new(),
    };
    for (k, line) in lines.enumerate() {
        let values: Vec<f64> = line
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: k + 2,
                column: 1,
                message: format!("{}: {e}", path.display()),
            })?;
        if values.len() != 6 {
            return Err(Error::Parse {
                line: k + 2,
                column: 1,
                message: format!("{}: expected 6 columns, found {}", path.display(), values.len()),
            });
        }
        table.z.push(values[0]);
        table.psi_plus.push(Complex64::new(values[1], values[2]));
        table.psi_minus.push(Complex64::new(values[3], values[4]));
        table.energy_density.push(values[5]);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names() {
        assert_eq!(snapshot_file_name(3, 0.3), "snap_00003_0.300000.csv");
        assert_eq!(snapshot_file_name(120, 12.0), "snap_00120_12.000000.csv");
    }

    #[test]
    fn atomic_write_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

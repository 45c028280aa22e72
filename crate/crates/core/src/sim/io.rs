//! Path dumps: CSV for inspection, a versioned binary checkpoint for reuse.
//!
//! Checkpoint layout, little-endian: magic `GUEMPATH`, schema version `u32`,
//! path count `u64`, then per path its id `u64`, `n_max` `u64` and `n_max`
//! values of `λ̃^(N)` as `f64`. Scaled values are recomputed on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::path::EigenPath;

pub const CHECKPOINT_MAGIC: [u8; 8] = *b"GUEMPATH";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Writes `path_id,N,lambda_raw,lambda_scaled` rows, one per path and `N`.
pub fn write_paths_csv(out: &mut impl Write, paths: &[(u64, EigenPath)]) -> std::io::Result<()> {
    writeln!(out, "path_id,N,lambda_raw,lambda_scaled")?;
    for (id, p) in paths {
        for (i, (r, s)) in p.lambda_raw.iter().zip(&p.lambda_scaled).enumerate() {
            writeln!(out, "{id},{},{r:?},{s:?}", i + 1)?;
        }
    }
    Ok(())
}

pub fn save_paths_csv(file: &Path, paths: &[(u64, EigenPath)]) -> Result<()> {
    let f = File::create(file).map_err(|e| Error::io(file, e))?;
    let mut w = BufWriter::new(f);
    write_paths_csv(&mut w, paths)
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(file, e))
}

pub fn write_checkpoint(out: &mut impl Write, paths: &[(u64, EigenPath)]) -> std::io::Result<()> {
    out.write_all(&CHECKPOINT_MAGIC)?;
    out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    out.write_all(&(paths.len() as u64).to_le_bytes())?;
    for (id, p) in paths {
        out.write_all(&id.to_le_bytes())?;
        out.write_all(&(p.n_max as u64).to_le_bytes())?;
        for v in &p.lambda_raw {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_array<const K: usize>(input: &mut impl Read) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    input
        .read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated checkpoint: {e}")))?;
    Ok(buf)
}

pub fn read_checkpoint(input: &mut impl Read) -> Result<Vec<(u64, EigenPath)>> {
    if read_array::<8>(input)? != CHECKPOINT_MAGIC {
        return Err(Error::Format("not a path checkpoint (bad magic)".into()));
    }
    let version = u32::from_le_bytes(read_array(input)?);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!(
            "checkpoint schema version {version}, expected {CHECKPOINT_VERSION}"
        )));
    }
    let count = u64::from_le_bytes(read_array(input)?);
    let mut out = Vec::new();
    for _ in 0..count {
        let id = u64::from_le_bytes(read_array(input)?);
        let n = u64::from_le_bytes(read_array(input)?);
        let raw = (0..n)
            .map(|_| read_array(input).map(f64::from_le_bytes))
            .collect::<Result<Vec<_>>>()?;
        out.push((id, EigenPath::from_raw(raw)));
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest).map_err(|e| Error::Format(e.to_string()))? != 0 {
        return Err(Error::Format("trailing bytes after checkpoint".into()));
    }
    Ok(out)
}

pub fn save_checkpoint(file: &Path, paths: &[(u64, EigenPath)]) -> Result<()> {
    let f = File::create(file).map_err(|e| Error::io(file, e))?;
    let mut w = BufWriter::new(f);
    write_checkpoint(&mut w, paths)
        .and_then(|()| w.flush())
        .map_err(|e| Error::io(file, e))
}

pub fn load_checkpoint(file: &Path) -> Result<Vec<(u64, EigenPath)>> {
    let f = File::open(file).map_err(|e| Error::io(file, e))?;
    read_checkpoint(&mut BufReader::new(f))
}

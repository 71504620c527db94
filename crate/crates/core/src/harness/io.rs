//! Plain-text artifact formats: JSON-lines records, CSV tables, JSON reports.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::sampler::SampleRecord;
use crate::series::TreeMassRow;
use crate::velocity::Velocity;

pub fn write_records(path: &Path, records: &[SampleRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<SampleRecord>> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

pub fn write_velocities_csv(path: &Path, vs: &[Velocity]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "vx,vy,vz")?;
    for v in vs {
        writeln!(w, "{},{},{}", v.x, v.y, v.z)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_velocities_csv(path: &Path) -> Result<Vec<Velocity>> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("{}: bad row {}", path.display(), i + 1)))?;
        if cols.len() != 3 {
            return Err(Error::Config(format!("{}: row {} needs 3 columns", path.display(), i + 1)));
        }
        out.push(Velocity::new(cols[0], cols[1], cols[2]));
    }
    Ok(out)
}

pub fn write_tree_table(path: &Path, rows: &[TreeMassRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "tree_code,leaves,mass,stderr")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.tree.code(), r.tree.leaf_count(), r.mass, r.stderr)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

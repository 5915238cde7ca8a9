//! State snapshots: one JSON header line, then raw little-endian f64
//! samples.
//!
//! The header names the fields in storage order. Each field is `n * n`
//! real-space samples in row-major order (x₁ slow), so a file holds
//! `8 * n * n * fields.len()` bytes after the newline.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::state::MhdState;
use crate::error::{Error, Result};
use crate::spectral::{Grid, ScalarField, VectorField};

pub const SNAPSHOT_FORMAT: &str = "lpmhd-snapshot-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: String,
    pub n: usize,
    pub length: f64,
    pub t: f64,
    pub fields: Vec<String>,
    pub byte_order: String,
}

const FIELD_NAMES: [&str; 4] = ["u1", "u2", "b1", "b2"];

pub fn write_snapshot(w: &mut impl Write, state: &MhdState) -> Result<()> {
    let grid = state.u.grid();
    let header = SnapshotHeader {
        format: SNAPSHOT_FORMAT.into(),
        n: grid.n(),
        length: grid.length(),
        t: state.t,
        fields: FIELD_NAMES.iter().map(|s| s.to_string()).collect(),
        byte_order: "little".into(),
    };
    serde_json::to_writer(&mut *w, &header)?;
    w.write_all(b"\n")?;
    for f in state.u.components().iter().chain(state.b.components()) {
        let mut buf = Vec::with_capacity(8 * grid.len());
        for v in f.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_snapshot(r: &mut impl BufRead) -> Result<MhdState> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: SnapshotHeader = serde_json::from_str(line.trim_end())?;
    if header.format != SNAPSHOT_FORMAT || header.byte_order != "little" || header.fields != FIELD_NAMES {
        return Err(Error::Diagnostic(format!("unsupported snapshot header {line}")));
    }
    let grid = Grid::new(header.n, header.length)?;
    let mut comps = Vec::with_capacity(4);
    let mut buf = vec![0u8; 8 * grid.len()];
    for _ in 0..4 {
        r.read_exact(&mut buf)?;
        let values = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        comps.push(ScalarField::from_values(&grid, values)?);
    }
    let b2 = comps.pop().expect("4");
    let b1 = comps.pop().expect("4");
    let u2 = comps.pop().expect("4");
    let u1 = comps.pop().expect("4");
    MhdState::new(VectorField::new(u1, u2)?, VectorField::new(b1, b2)?, header.t)
}

//! Diagnostics CSV and binary state snapshots.

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::framework::StepRecord;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("record has {got} quantities, header has {expected}")]
    Width { expected: usize, got: usize },
    #[error("not a snapshot (bad magic)")]
    Magic,
    #[error("snapshot holds {got} values, header implies {expected}")]
    Length { expected: usize, got: usize },
}

/// Column names of the diagnostics table for `nq` quantities.
pub fn diagnostics_header(nq: usize) -> Vec<String> {
    let mut h = vec!["step".to_string(), "t".to_string()];
    for prefix in ["q", "dq", "predicted_dq", "gap"] {
        h.extend((1..=nq).map(|k| format!("{prefix}{k}")));
    }
    h.push("newton_iters".into());
    h.push("residual".into());
    h
}

/// 17 significant digits so drift near machine epsilon stays visible.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Streams one row per completed step. A failed run ends with a comment
/// trailer naming the failing step.
pub struct DiagnosticsWriter<W: Write> {
    inner: csv::Writer<W>,
    nq: usize,
}

impl<W: Write> DiagnosticsWriter<W> {
    pub fn new(writer: W, nq: usize) -> Result<Self, IoError> {
        // the trailer is a single-field line, so records may vary in width
        let mut inner = csv::WriterBuilder::new()
            .flexible(true)
            .quote_style(csv::QuoteStyle::Never)
            .from_writer(writer);
        inner.write_record(diagnostics_header(nq))?;
        Ok(Self { inner, nq })
    }

    pub fn write(&mut self, r: &StepRecord) -> Result<(), IoError> {
        for v in [&r.q, &r.dq, &r.predicted_dq, &r.gap] {
            if v.len() != self.nq {
                return Err(IoError::Width {
                    expected: self.nq,
                    got: v.len(),
                });
            }
        }
        let mut row = vec![r.step.to_string(), fmt_f64(r.t)];
        for v in [&r.q, &r.dq, &r.predicted_dq, &r.gap] {
            row.extend(v.iter().map(|x| fmt_f64(*x)));
        }
        row.push(r.newton_iters.to_string());
        row.push(fmt_f64(r.residual));
        self.inner.write_record(row)?;
        Ok(())
    }

    pub fn write_failure(&mut self, step: usize, reason: &str) -> Result<(), IoError> {
        let reason = reason.replace(['\n', '\r'], " ");
        self.inner.write_record([format!("# solver failure at step {step}: {reason}")])?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W, IoError> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| IoError::Io(e.into_error()))
    }
}

/// Parsed diagnostics table: rows plus the failing step from the trailer, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub failure_step: Option<usize>,
}

impl DiagnosticsTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_diagnostics<R: Read>(mut reader: R) -> Result<DiagnosticsTable, IoError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let failure_step = text
        .lines()
        .filter_map(|l| l.strip_prefix("# solver failure at step "))
        .find_map(|rest| rest.split(':').next()?.trim().parse().ok());
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(rec.iter().map(|x| x.parse().unwrap_or(f64::NAN)).collect());
    }
    Ok(DiagnosticsTable {
        header,
        rows,
        failure_step,
    })
}

pub const SNAPSHOT_MAGIC: [u8; 8] = *b"CNSRVSN1";

/// State snapshot: `n` points per spatial direction, `components` fields,
/// values row-major with the component index slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n: u32,
    pub spatial_dims: u32,
    pub components: u32,
    pub values: Vec<f64>,
}

impl Snapshot {
    pub fn expected_len(&self) -> usize {
        (self.n as usize).pow(self.spatial_dims) * self.components as usize
    }

    /// Layout: magic, `n`, `spatial_dims`, `components` as little-endian `u32`,
    /// then the values as little-endian `f64`.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), IoError> {
        if self.values.len() != self.expected_len() {
            return Err(IoError::Length {
                expected: self.expected_len(),
                got: self.values.len(),
            });
        }
        w.write_all(&SNAPSHOT_MAGIC)?;
        for x in [self.n, self.spatial_dims, self.components] {
            w.write_all(&x.to_le_bytes())?;
        }
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, IoError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if magic != SNAPSHOT_MAGIC {
            return Err(IoError::Magic);
        }
        let mut word = [0u8; 4];
        let mut dims = [0u32; 3];
        for d in &mut dims {
            r.read_exact(&mut word)?;
            *d = u32::from_le_bytes(word);
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let snap = Snapshot {
            n: dims[0],
            spatial_dims: dims[1],
            components: dims[2],
            values: bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect(),
        };
        if bytes.len() % 8 != 0 || snap.values.len() != snap.expected_len() {
            return Err(IoError::Length {
                expected: snap.expected_len(),
                got: bytes.len() / 8,
            });
        }
        Ok(snap)
    }
}

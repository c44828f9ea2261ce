//! Little-endian binary containers.
//!
//! `LDS1` (datasets): magic, u64 `{rows, cols, classes}`, `rows × cols`
//! row-major f64 with one signal per row, then `rows` u32 labels.
//! `LDM1` (matrices): magic, u64 `{rows, cols}`, row-major f64.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphgen::{LabeledDataset, Layout};

pub const DATASET_MAGIC: &[u8; 4] = b"LDS1";
pub const MATRIX_MAGIC: &[u8; 4] = b"LDM1";

/// Refuse headers claiming more than this many f64 values.
const MAX_VALUES: u64 = 1 << 32;

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u64::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("file ends before the declared payload".into())
    } else {
        Error::Io(e)
    }
}

fn read_magic<R: Read>(r: &mut R, expect: &[u8; 4]) -> Result<()> {
    let mut m = [0u8; 4];
    r.read_exact(&mut m).map_err(truncated)?;
    if &m != expect {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(expect)
        )));
    }
    Ok(())
}

fn read_f64s<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes).map_err(truncated)?;
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

fn expect_eof<R: Read>(r: &mut R) -> Result<()> {
    let mut probe = [0u8; 1];
    match r.read(&mut probe)? {
        0 => Ok(()),
        _ => Err(Error::Format("trailing bytes after payload".into())),
    }
}

fn checked_len(rows: u64, cols: u64) -> Result<usize> {
    rows.checked_mul(cols)
        .filter(|&n| n <= MAX_VALUES)
        .map(|n| n as usize)
        .ok_or_else(|| Error::Format(format!("implausible size {rows} x {cols}")))
}

/// Write `m` as an `LDM1` blob.
pub fn write_matrix<W: Write>(w: &mut W, m: &DMatrix<f64>) -> Result<()> {
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix<R: Read>(r: &mut R) -> Result<DMatrix<f64>> {
    read_magic(r, MATRIX_MAGIC)?;
    let rows = read_u64(r)?;
    let cols = read_u64(r)?;
    let len = checked_len(rows, cols)?;
    let data = read_f64s(r, len)?;
    Ok(DMatrix::from_row_slice(rows as usize, cols as usize, &data))
}

pub fn save_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(&mut w, m)?;
    w.flush()?;
    Ok(())
}

pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut r = BufReader::new(File::open(path)?);
    let m = read_matrix(&mut r)?;
    expect_eof(&mut r)?;
    Ok(m)
}

pub fn write_dataset<W: Write>(w: &mut W, ds: &LabeledDataset) -> Result<()> {
    w.write_all(DATASET_MAGIC)?;
    w.write_all(&(ds.len() as u64).to_le_bytes())?;
    w.write_all(&(ds.dim() as u64).to_le_bytes())?;
    w.write_all(&(ds.class_count() as u64).to_le_bytes())?;
    // Column-major storage of a dim × N matrix is row-major N × dim.
    for x in ds.signals.as_slice() {
        w.write_all(&x.to_le_bytes())?;
    }
    for l in &ds.labels {
        w.write_all(&l.to_le_bytes())?;
    }
    Ok(())
}

/// Read an `LDS1` dataset. Without a layout hint, square signal lengths
/// are taken as vectorized Laplacians and anything else as graph signals.
pub fn read_dataset<R: Read>(r: &mut R, layout: Option<Layout>) -> Result<LabeledDataset> {
    read_magic(r, DATASET_MAGIC)?;
    let rows = read_u64(r)?;
    let cols = read_u64(r)?;
    let classes = read_u64(r)?;
    let len = checked_len(rows, cols)?;
    let data = read_f64s(r, len)?;
    let mut bytes = vec![0u8; rows as usize * 4];
    r.read_exact(&mut bytes).map_err(truncated)?;
    let labels: Vec<u32> = bytes.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    if let Some(&bad) = labels.iter().find(|&&l| l as u64 >= classes) {
        return Err(Error::Format(format!("label {bad} outside the declared {classes} classes")));
    }
    let layout = layout.unwrap_or_else(|| {
        let side = (cols as f64).sqrt().round() as u64;
        if side * side == cols && cols > 1 {
            Layout::VectorizedLaplacian
        } else {
            Layout::GraphSignal
        }
    });
    let signals = DMatrix::from_vec(cols as usize, rows as usize, data);
    LabeledDataset::new(signals, labels, layout).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_dataset(path: &Path, ds: &LabeledDataset) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_dataset(&mut w, ds)?;
    w.flush()?;
    Ok(())
}

pub fn load_dataset(path: &Path, layout: Option<Layout>) -> Result<LabeledDataset> {
    let mut r = BufReader::new(File::open(path)?);
    let ds = read_dataset(&mut r, layout)?;
    expect_eof(&mut r)?;
    Ok(ds)
}

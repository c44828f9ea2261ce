//! Plain-text dataset export: one signal per row, label in the last column.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphgen::{LabeledDataset, Layout};

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}

pub fn write_dataset_csv<W: Write>(w: W, ds: &LabeledDataset) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    let mut row = Vec::with_capacity(ds.dim() + 1);
    for (col, label) in ds.signals.column_iter().zip(&ds.labels) {
        row.clear();
        row.extend(col.iter().map(|x| x.to_string()));
        row.push(label.to_string());
        out.write_record(&row).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(r: R, layout: Layout) -> Result<LabeledDataset> {
    let mut input = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut dim = None;
    for (i, rec) in input.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let d = rec.len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| Error::Format(format!("row {i} has no signal")))?;
        if *dim.get_or_insert(d) != d {
            return Err(Error::Format(format!("row {i} has {d} values, expected {}", dim.unwrap_or(0))));
        }
        for field in rec.iter().take(d) {
            data.push(field.trim().parse::<f64>().map_err(|e| Error::Format(format!("row {i}: {e}")))?);
        }
        labels.push(rec[d].trim().parse::<u32>().map_err(|e| Error::Format(format!("row {i}: {e}")))?);
    }
    let signals = DMatrix::from_vec(dim.unwrap_or(0), labels.len(), data);
    LabeledDataset::new(signals, labels, layout).map_err(|e| Error::Format(e.to_string()))
}

pub fn export_csv(path: &Path, ds: &LabeledDataset) -> Result<()> {
    write_dataset_csv(std::io::BufWriter::new(std::fs::File::create(path)?), ds)
}

pub fn import_csv(path: &Path, layout: Layout) -> Result<LabeledDataset> {
    read_dataset_csv(std::io::BufReader::new(std::fs::File::open(path)?), layout)
}

//! Dataset and matrix files.

mod binary;
mod csv;

pub use self::binary::{
    load_dataset, load_matrix, read_dataset, read_matrix, save_dataset, save_matrix, write_dataset, write_matrix,
    DATASET_MAGIC, MATRIX_MAGIC,
};
pub use self::csv::{export_csv, import_csv, read_dataset_csv, write_dataset_csv};

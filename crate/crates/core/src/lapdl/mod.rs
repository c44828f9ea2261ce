//! Laplacian-structured dictionary learning.
//!
//! Atoms are row-vectorized Laplacians. The trace normalization is handled
//! by a quadratic penalty so that the remaining constraints split per row,
//! which is what lets the dictionary step run as projected block coordinate
//! descent.

mod bcgd;
mod dictionary;
mod objective;
mod train;

pub use bcgd::{bcgd_dict_update, bcgd_with_observer, BcgdOptions, BcgdReport, BcgdState};
pub use dictionary::{init_lap_atoms, LapAtomDictionary};
pub use objective::{f_rho, grad_atom_block, lipschitz_atom, penalty, LIPSCHITZ_FLOOR};
pub use train::{am_train, AmResult, LapDLConfig};

use nalgebra::DMatrix;

use crate::classify::{argmin_labels, ClassModelSet};
use crate::error::Result;
use crate::sparse::{OmpCoder, DEFAULT_TOL};

/// Label each column of `y` with the class whose Laplacian dictionary
/// leaves the smallest OMP residual at sparsity `s`.
pub fn lapdl_classify(models: &ClassModelSet<LapAtomDictionary>, y: &DMatrix<f64>, s: usize) -> Result<Vec<u32>> {
    let errors = models
        .models()
        .map(|d| OmpCoder::new(d.atoms()).residual_energies(y, s, DEFAULT_TOL))
        .collect::<Result<Vec<_>>>()?;
    Ok(argmin_labels(&models.classes(), &errors))
}

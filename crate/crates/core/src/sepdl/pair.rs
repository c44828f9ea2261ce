use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sparse::{synthesize_pair, SparseCode};

/// Column norms must be within this of one.
pub const UNIT_TOL: f64 = 1e-8;

/// Two unit-column dictionaries acting on either side of a matrix signal,
/// `Y ≈ D₁ X D₂ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDictPair {
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
}

fn check_unit(d: &DMatrix<f64>, name: &str) -> Result<()> {
    for (j, col) in d.column_iter().enumerate() {
        let n = col.norm();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!("{name} column {j} has norm {n}")));
        }
    }
    Ok(())
}

impl SeparableDictPair {
    pub fn new(d1: DMatrix<f64>, d2: DMatrix<f64>) -> Result<Self> {
        check_unit(&d1, "D1")?;
        check_unit(&d2, "D2")?;
        Ok(SeparableDictPair { d1, d2 })
    }

    pub(crate) fn from_parts_unchecked(d1: DMatrix<f64>, d2: DMatrix<f64>) -> Self {
        SeparableDictPair { d1, d2 }
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &DMatrix<f64> {
        &self.d2
    }

    /// `(m₁, n₁, m₂, n₂)`.
    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.d1.nrows(), self.d1.ncols(), self.d2.nrows(), self.d2.ncols())
    }

    pub fn synthesize(&self, code: &SparseCode) -> DMatrix<f64> {
        synthesize_pair(&self.d1, &self.d2, code)
    }

    pub fn max_norm_defect(&self) -> f64 {
        self.d1
            .column_iter()
            .chain(self.d2.column_iter())
            .map(|c| (c.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `‖Y − D₁XD₂ᵀ‖_F / √(m₁m₂N)` over a batch.
pub fn sep_rmse(ys: &[DMatrix<f64>], pair: &SeparableDictPair, codes: &[SparseCode]) -> Result<f64> {
    if ys.len() != codes.len() {
        return Err(Error::dims(format!("{} signals but {} codes", ys.len(), codes.len())));
    }
    if ys.is_empty() {
        return Ok(0.0);
    }
    let (m1, _, m2, _) = pair.shape();
    let mut total = 0.0;
    for (y, c) in ys.iter().zip(codes) {
        if y.shape() != (m1, m2) {
            return Err(Error::dims("signal shape does not match the dictionary pair"));
        }
        total += (y - pair.synthesize(c)).norm_squared();
    }
    Ok((total / (m1 * m2 * ys.len()) as f64).sqrt())
}

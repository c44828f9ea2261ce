//! Unions of orthonormal blocks seeded from graph Laplacians, trained with
//! SBO / P-SBO and used for block-energy classification.

mod train;
mod union;

use nalgebra::DMatrix;

pub use train::{sbo_train, NewBlockInit, SboConfig, SboTrainResult};
pub use union::{
    assign_blocks, orthogonal_eigenbasis, orthogonalize_laplacian, procrustes_update, sbo_represent,
    BlockUnion, ORTHO_TOL,
};

use crate::classify::ClassModelSet;
use crate::error::{Error, Result};

/// Pool the blocks of every class (tagged with the set's class ids) and
/// label each column of `y` with the class owning its best block.
pub fn sbo_classify(models: &ClassModelSet<BlockUnion>, y: &DMatrix<f64>, s: usize) -> Result<Vec<u32>> {
    let mut blocks = Vec::new();
    let mut owner = Vec::new();
    for (class, u) in models.iter() {
        blocks.extend(u.blocks().iter().cloned());
        owner.extend(std::iter::repeat_n(class, u.len()));
    }
    let m = blocks.first().map(|q| q.nrows()).unwrap_or(0);
    if blocks.iter().any(|q| q.nrows() != m) || y.nrows() != m {
        return Err(Error::dims("signals and class blocks disagree in size"));
    }
    let (best, _) = assign_blocks(&blocks, y, s);
    Ok(best.into_iter().map(|j| owner[j]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_orthogonal;
    use crate::rng::seeded;
    use crate::sparse::SparseCode;

    #[test]
    fn signal_goes_to_owning_class() {
        let mut rng = seeded(1);
        let a = BlockUnion::for_class(vec![random_orthogonal(5, &mut rng)], 1).unwrap();
        let b = BlockUnion::for_class(vec![random_orthogonal(5, &mut rng); 2], 2).unwrap();
        let y = SparseCode::new(vec![0, 3], vec![1.0, 2.0], 5).synthesize(b.block(1));
        let models = ClassModelSet::new(vec![(1, a), (2, b)]).unwrap();
        let y = DMatrix::from_column_slice(5, 1, y.as_slice());
        assert_eq!(sbo_classify(&models, &y, 2).unwrap(), vec![2]);
    }

    #[test]
    fn single_class() {
        let u = BlockUnion::for_class(vec![DMatrix::identity(3, 3)], 7).unwrap();
        let models = ClassModelSet::new(vec![(7, u)]).unwrap();
        assert_eq!(sbo_classify(&models, &DMatrix::from_element(3, 4, 1.0), 1).unwrap(), vec![7; 4]);
    }
}

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graphgen::{laplacian, unvec_rows, WeightedGraph};

/// Edge probability of the random graphs seeding each atom.
const INIT_EDGE_PROB: f64 = 0.3;

/// Dictionary whose columns are row-vectorized m×m Laplacian candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct LapAtomDictionary {
    m: usize,
    atoms: DMatrix<f64>,
}

impl LapAtomDictionary {
    pub fn new(m: usize, atoms: DMatrix<f64>) -> Result<Self> {
        if atoms.nrows() != m * m {
            return Err(Error::dims(format!(
                "atoms have {} rows, expected {} for m = {m}",
                atoms.nrows(),
                m * m
            )));
        }
        Ok(LapAtomDictionary { m, atoms })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.atoms.ncols()
    }

    pub fn atoms(&self) -> &DMatrix<f64> {
        &self.atoms
    }

    pub fn into_atoms(self) -> DMatrix<f64> {
        self.atoms
    }

    /// Block `ell` of atom `i`, i.e. row `ell` of its Laplacian.
    pub fn block(&self, i: usize, ell: usize) -> &[f64] {
        let m = self.m;
        let start = i * m * m + ell * m;
        &self.atoms.as_slice()[start..start + m]
    }

    pub(crate) fn block_mut(&mut self, i: usize, ell: usize) -> &mut [f64] {
        let m = self.m;
        let start = i * m * m + ell * m;
        &mut self.atoms.as_mut_slice()[start..start + m]
    }

    pub fn trace(&self, i: usize) -> f64 {
        let col = self.atoms.column(i);
        (0..self.m).map(|j| col[j * (self.m + 1)]).sum()
    }

    pub fn laplacian(&self, i: usize) -> DMatrix<f64> {
        unvec_rows(self.atoms.column(i).as_slice()).expect("square atom")
    }

    /// Largest violation of the per-row constraints (zero row sum,
    /// nonnegative diagonal, nonpositive off-diagonal) over all atoms.
    pub fn feasibility_defect(&self) -> f64 {
        let m = self.m;
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            for ell in 0..m {
                let b = self.block(i, ell);
                worst = worst.max(b.iter().sum::<f64>().abs());
                for (j, &x) in b.iter().enumerate() {
                    let v = if j == ell { -x } else { x };
                    worst = worst.max(v.max(0.0));
                }
            }
        }
        worst
    }
}

/// Random feasible starting dictionary: Laplacians of independent
/// Erdős–Rényi(0.3) graphs, rescaled to trace m.
pub fn init_lap_atoms<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<LapAtomDictionary> {
    if n == 0 {
        return Err(Error::invalid("dictionary needs at least one atom"));
    }
    if m < 2 {
        return Err(Error::invalid("Laplacian atoms need at least two nodes"));
    }
    let mut atoms = DMatrix::zeros(m * m, n);
    for i in 0..n {
        let l = loop {
            let mut edges = Vec::new();
            for u in 0..m {
                for v in (u + 1)..m {
                    if rng.random::<f64>() < INIT_EDGE_PROB {
                        edges.push((u, v, 1.0));
                    }
                }
            }
            if !edges.is_empty() {
                break laplacian(&WeightedGraph::new(m, edges)?);
            }
        };
        let scale = m as f64 / l.trace();
        let v = crate::graphgen::vec_rows(&(l.into_matrix() * scale));
        atoms.set_column(i, &v);
    }
    LapAtomDictionary::new(m, atoms)
}

//! Penalized objective
//!
//! `f_ρ(D) = ½‖Y − DX‖²_F + (ρ/2) Σᵢ (tr L⁽ⁱ⁾ − m)²`
//!
//! and its per-block gradient. The ½ on the data term makes
//! `‖Xⁱ‖² + ρ` an exact block Lipschitz constant.

use nalgebra::{DMatrix, DVector};

use super::dictionary::LapAtomDictionary;

/// Guard against a zero step denominator for unused atoms without penalty.
pub const LIPSCHITZ_FLOOR: f64 = 1e-12;

pub fn f_rho(d: &LapAtomDictionary, x: &DMatrix<f64>, y: &DMatrix<f64>, rho: f64) -> f64 {
    let residual = y - d.atoms() * x;
    0.5 * residual.norm_squared() + penalty(d, rho)
}

pub fn penalty(d: &LapAtomDictionary, rho: f64) -> f64 {
    let m = d.m() as f64;
    0.5 * rho * (0..d.n()).map(|i| (d.trace(i) - m).powi(2)).sum::<f64>()
}

/// Block `ell` of `∇_{Dᵢ} f_ρ = Dᵢ‖Xⁱ‖² − R₍ᵢ₎(Xⁱ)ᵀ + ρ e_I (tr L⁽ⁱ⁾ − m)`
/// with `R₍ᵢ₎ = Y − Σ_{j≠i} Dⱼ Xʲ`, evaluated from scratch.
pub fn grad_atom_block(
    d: &LapAtomDictionary,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    rho: f64,
    i: usize,
    ell: usize,
) -> DVector<f64> {
    let m = d.m();
    let xi = x.row(i).transpose();
    let di = d.atoms().column(i);
    let others = y - d.atoms() * x + di * xi.transpose();
    let full = di * xi.norm_squared() - others * &xi;
    let mut g = full.rows(ell * m, m).into_owned();
    g[ell] += rho * (d.trace(i) - m as f64);
    g
}

/// `‖Xⁱ‖² + ρ`, floored away from zero.
pub fn lipschitz_atom(x: &DMatrix<f64>, i: usize, rho: f64) -> f64 {
    (x.row(i).norm_squared() + rho).max(LIPSCHITZ_FLOOR)
}

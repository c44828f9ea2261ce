use super::SparseCode;

/// Keep the `s` entries of largest magnitude (lowest index wins ties).
/// The support is returned in increasing index order.
pub fn select_threshold(x: &[f64], s: usize) -> SparseCode {
    let s = s.min(x.len());
    let mut order: Vec<usize> = (0..x.len()).collect();
    // Stable sort keeps the lower index first among equal magnitudes.
    order.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()));
    let mut support: Vec<usize> = order[..s].to_vec();
    support.sort_unstable();
    let values = support.iter().map(|&j| x[j]).collect();
    SparseCode::new(support, values, x.len())
}

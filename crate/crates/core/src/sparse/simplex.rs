//! Euclidean projection onto a single Laplacian row set
//!
//! `{ d : 1ᵀd = 0, d_ℓ ≥ 0, d_j ≤ 0 for j ≠ ℓ }`.
//!
//! With `τ` the multiplier of the equality constraint the projection is
//! `d_ℓ = max(v_ℓ − τ, 0)`, `d_j = min(v_j − τ, 0)`, and `τ` is the root of
//! the non-increasing piecewise linear function
//! `g(τ) = max(v_ℓ − τ, 0) + Σ_{j≠ℓ} min(v_j − τ, 0)`.
//! Sorting the breakpoints and sweeping them with prefix sums locates the
//! root in O(m log m).

/// The feasible set for row `ell` (0-based) of an m×m Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexTypeSet {
    pub m: usize,
    pub ell: usize,
}

impl SimplexTypeSet {
    pub fn new(m: usize, ell: usize) -> Self {
        assert!(ell < m, "distinguished index {ell} out of range for dimension {m}");
        SimplexTypeSet { m, ell }
    }

    pub fn contains(&self, d: &[f64], tol: f64) -> bool {
        let sum: f64 = d.iter().sum();
        d.len() == self.m
            && sum.abs() <= tol
            && d.iter().enumerate().all(|(j, &x)| if j == self.ell { x >= 0.0 } else { x <= 0.0 })
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        project_simplex_type(v, self.ell)
    }
}

/// Project `v` onto the row set with distinguished (0-based) index `ell`.
pub fn project_simplex_type(v: &[f64], ell: usize) -> Vec<f64> {
    let m = v.len();
    assert!(ell < m, "distinguished index {ell} out of range for dimension {m}");
    if m == 1 {
        return vec![0.0];
    }
    let vl = v[ell];
    let mut others: Vec<f64> = v.iter().enumerate().filter(|&(j, _)| j != ell).map(|(_, &x)| x).collect();
    others.sort_by(f64::total_cmp);
    let mut breaks = others.clone();
    breaks.push(vl);
    breaks.sort_by(f64::total_cmp);

    // Sweep breakpoints upward; `below` counts others strictly below t.
    let mut below = 0usize;
    let mut below_sum = 0.0;
    let mut prev: Option<(usize, f64)> = None; // (count, sum) of others ≤ previous breakpoint
    let mut tau = None;
    for (i, &t) in breaks.iter().enumerate() {
        while below < others.len() && others[below] < t {
            below_sum += others[below];
            below += 1;
        }
        let g = (vl - t).max(0.0) + (below_sum - below as f64 * t);
        if g <= 0.0 {
            tau = Some(match prev {
                None => t,
                Some((cnt, sum)) => {
                    // On (breaks[i-1], t): others ≤ breaks[i-1] are active;
                    // the ℓ term is active iff v_ℓ ≥ t.
                    let lead = if vl >= t { 1.0 } else { 0.0 };
                    let denom = lead + cnt as f64;
                    let tau = (lead * vl + sum) / denom;
                    tau.clamp(breaks[i - 1], t)
                }
            });
            break;
        }
        // Others ≤ t, for the next interval.
        let mut cnt = below;
        let mut sum = below_sum;
        while cnt < others.len() && others[cnt] <= t {
            sum += others[cnt];
            cnt += 1;
        }
        prev = Some((cnt, sum));
    }
    let tau = tau.unwrap_or_else(|| others.iter().sum::<f64>() / others.len() as f64);

    v.iter()
        .enumerate()
        .map(|(j, &x)| if j == ell { (x - tau).max(0.0) } else { (x - tau).min(0.0) })
        .collect()
}

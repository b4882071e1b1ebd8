//! Finite-difference stencils on a uniform grid.
//!
//! Interior nodes get centered stencils; nodes too close to an endpoint get
//! the same-width window clamped into the grid, which yields the standard
//! biased second-order stencils. Weights come from Fornberg's recursion, so
//! every stencil is exact on polynomials up to its design degree.

/// Fornberg weights for the `m`-th derivative at `z` from samples at `grid`.
///
/// Returns one weight per grid point. Exact for polynomials of degree
/// < grid.len().
pub fn fornberg_weights(z: f64, grid: &[f64], m: usize) -> Vec<f64> {
    let nd = grid.len();
    assert!(m < nd, "need more points than the derivative order");
    // c[k][j]: weight of grid[j] for the k-th derivative.
    let mut c = vec![vec![0.0; nd]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = grid[0] - z;
    c[0][0] = 1.0;
    for i in 1..nd {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = grid[i] - z;
        for j in 0..i {
            let c3 = grid[i] - grid[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.swap_remove(m)
}

/// Number of points in the stencil window for derivative order `k`.
///
/// Centered interior widths: 3, 3, 5, 5. Near the boundary the window is
/// clamped, so the same widths turn into biased stencils, except the fourth
/// derivative which needs one extra point one-sided to stay second order.
pub fn window_len(order: usize, offset_from_boundary: usize) -> usize {
    match order {
        1 => 3,
        2 => if offset_from_boundary == 0 { 4 } else { 3 },
        3 => 5,
        4 => {
            if offset_from_boundary <= 1 {
                6
            } else {
                5
            }
        }
        _ => unreachable!("order checked by caller"),
    }
}

/// Per-node stencil: window start index and weights (already divided by h^k).
#[derive(Debug, Clone)]
pub struct NodeStencil {
    pub start: usize,
    pub weights: Vec<f64>,
}

/// Build the stencil table for all `n` nodes of a uniform grid with spacing
/// `h`, for the `order`-th derivative.
pub fn build_stencils(n: usize, h: f64, order: usize) -> Vec<NodeStencil> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let off = i.min(n - 1 - i);
        let m = window_len(order, off);
        let half = (m - 1) / 2;
        let start = i.saturating_sub(half).min(n - m);
        let grid: Vec<f64> = (0..m).map(|j| (start + j) as f64 * h).collect();
        let weights = fornberg_weights(i as f64 * h, &grid, order);
        out.push(NodeStencil { start, weights });
    }
    out
}

/// Apply a stencil table to per-node vector data (`dim` components per node).
pub fn apply_stencils(stencils: &[NodeStencil], data: &[f64], dim: usize) -> Vec<f64> {
    let n = stencils.len();
    let mut out = vec![0.0; n * dim];
    for (i, st) in stencils.iter().enumerate() {
        for (j, &w) in st.weights.iter().enumerate() {
            let src = (st.start + j) * dim;
            for c in 0..dim {
                out[i * dim + c] += w * data[src + c];
            }
        }
    }
    out
}

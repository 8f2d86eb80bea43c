//! Four-point Lagrange interpolation on tabulated nuclear grids.

/// Weights `(index, weight)` reproducing `f(x)` from samples on `nodes`.
///
/// Exact at the nodes; cubic between them. Falls back to lower order when
/// fewer than four nodes are available.
pub fn lagrange_weights(nodes: &[f64], x: f64) -> Vec<(usize, f64)> {
    let n = nodes.len();
    assert!(n > 0, "interpolation needs at least one node");
    if n == 1 {
        return vec![(0, 1.0)];
    }
    if let Some(k) = nodes.iter().position(|&r| (r - x).abs() <= 1e-12 * (1.0 + x.abs())) {
        return vec![(k, 1.0)];
    }
    let window = n.min(4);
    // first node of the stencil: keep x inside the stencil where possible
    let upper = nodes.partition_point(|&r| r < x);
    let start = upper.saturating_sub(window / 2).min(n - window);
    let idx: Vec<usize> = (start..start + window).collect();
    idx.iter()
        .map(|&i| {
            let w = idx
                .iter()
                .filter(|&&j| j != i)
                .fold(1.0, |acc, &j| acc * (x - nodes[j]) / (nodes[i] - nodes[j]));
            (i, w)
        })
        .collect()
}

/// Centered finite-difference derivative of tabulated data at node `k`
/// (one-sided second-order at the ends).
pub fn node_derivative<T, F>(nodes: &[f64], k: usize, value: F) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    F: Fn(usize) -> T,
{
    let n = nodes.len();
    assert!(n >= 2, "derivative needs two nodes");
    if n == 2 {
        return (value(1) - value(0)) * (1.0 / (nodes[1] - nodes[0]));
    }
    if k == 0 {
        let h = nodes[1] - nodes[0];
        (value(1) * 4.0 - value(0) * 3.0 - value(2)) * (0.5 / h)
    } else if k == n - 1 {
        let h = nodes[n - 1] - nodes[n - 2];
        (value(n - 1) * 3.0 - value(n - 2) * 4.0 + value(n - 3)) * (0.5 / h)
    } else {
        (value(k + 1) - value(k - 1)) * (1.0 / (nodes[k + 1] - nodes[k - 1]))
    }
}

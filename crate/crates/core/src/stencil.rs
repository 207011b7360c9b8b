//! Finite-difference weights on arbitrary 1-D stencils (Fornberg's recursion).

/// Weights `w[j]` such that `f^(order)(z) ~ sum_j w[j] f(nodes[j])`.
pub fn fd_weights(z: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > order, "stencil too small for derivative order");
    // c[j][k]: weight of node j for derivative k
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Uniform-grid difference operator: centred interior stencil of half-width
/// `p` plus shifted stencils of the same width near each boundary.
#[derive(Debug, Clone)]
pub struct FdOperator {
    order: usize,
    half_width: usize,
    interior: Vec<f64>,
    // boundary[r]: weights for row r (and mirrored for row n-1-r)
    left: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
}

impl FdOperator {
    /// Operator of at least 8th-order interior accuracy for `order` in 1..=5.
    pub fn eighth_order(order: usize) -> Self {
        let half_width = (order + 7) / 2;
        Self::with_half_width(order, half_width)
    }

    pub fn with_half_width(order: usize, half_width: usize) -> Self {
        let width = 2 * half_width + 1;
        let offsets: Vec<f64> = (0..width).map(|j| j as f64).collect();
        let interior = fd_weights(half_width as f64, &offsets, order);
        let left = (0..half_width).map(|r| fd_weights(r as f64, &offsets, order)).collect();
        let right = (0..half_width)
            .map(|r| fd_weights((width - 1 - r) as f64, &offsets, order))
            .collect();
        Self {
            order,
            half_width,
            interior,
            left,
            right,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Applies the operator on a grid of spacing `dx`; needs `f.len() > 2 * half_width`.
    pub fn apply(&self, f: &[f64], dx: f64) -> Vec<f64> {
        let n = f.len();
        let p = self.half_width;
        let width = 2 * p + 1;
        assert!(n >= width, "grid too small for stencil");
        let scale = dx.powi(self.order as i32).recip();
        let dot = |w: &[f64], start: usize| -> f64 {
            w.iter().zip(&f[start..start + width]).map(|(a, b)| a * b).sum::<f64>() * scale
        };
        let mut out = vec![0.0; n];
        for (r, w) in self.left.iter().enumerate() {
            out[r] = dot(w, 0);
        }
        for (i, o) in out.iter_mut().enumerate().take(n - p).skip(p) {
            *o = dot(&self.interior, i - p);
        }
        for (r, w) in self.right.iter().enumerate() {
            out[n - 1 - r] = dot(w, n - width);
        }
        out
    }
}

use ndarray::Array2;

use super::legendre::legendre_unchecked;
use crate::error::{invalid, Result, TbcError};
use crate::C64;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_CAP: usize = 100;

/// Legendre-Gauss-Lobatto nodes (ascending) and weights of order `N`.
#[derive(Debug, Clone)]
pub struct LglGrid {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn lgl_grid(n: usize) -> Result<LglGrid> {
    if n < 1 {
        return invalid("lgl_grid: order must be at least 1");
    }
    let mut nodes = vec![0.0; n + 1];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    let nf = n as f64;
    // interior nodes: roots of L'_N, Newton on x L_N - L_{N-1} (Chebyshev start)
    for j in 1..=(n / 2) {
        let mut x = -(std::f64::consts::PI * j as f64 / nf).cos();
        let mut converged = false;
        for _ in 0..NEWTON_CAP {
            let l = legendre_unchecked(n, x);
            let dx = (x * l[n] - l[n - 1]) / ((nf + 1.0) * l[n]);
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(TbcError::NodeNonConvergence { index: j });
        }
        nodes[j] = x;
        nodes[n - j] = -x;
    }
    if n % 2 == 0 {
        nodes[n / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&y| {
            let ln = legendre_unchecked(n, y)[n];
            2.0 / (nf * (nf + 1.0) * ln * ln)
        })
        .collect();
    Ok(LglGrid { order: n, nodes, weights })
}

/// Discrete Legendre transform on an LGL grid.
///
/// The forward map uses the quadrature norm `2/N` for the last mode, which
/// is where LGL quadrature stops being exact for `L_N^2`.
#[derive(Debug, Clone)]
pub struct LegendreTransform {
    pub grid: LglGrid,
    /// `fwd[(k, j)] = w_j L_k(y_j) / gamma_k`
    pub fwd: Array2<f64>,
    /// `inv[(j, k)] = L_k(y_j)`
    pub inv: Array2<f64>,
    fwd_c: Array2<C64>,
    inv_c: Array2<C64>,
}

impl LegendreTransform {
    pub fn new(n: usize) -> Result<Self> {
        let grid = lgl_grid(n)?;
        let mut fwd = Array2::zeros((n + 1, n + 1));
        let mut inv = Array2::zeros((n + 1, n + 1));
        for (j, &y) in grid.nodes.iter().enumerate() {
            let l = legendre_unchecked(n, y);
            for k in 0..=n {
                let norm = if k == n { 2.0 / n as f64 } else { 2.0 / (2.0 * k as f64 + 1.0) };
                fwd[(k, j)] = grid.weights[j] * l[k] / norm;
                inv[(j, k)] = l[k];
            }
        }
        let fwd_c = fwd.mapv(|v| C64::new(v, 0.0));
        let inv_c = inv.mapv(|v| C64::new(v, 0.0));
        Ok(Self { grid, fwd, inv, fwd_c, inv_c })
    }

    pub fn order(&self) -> usize {
        self.grid.order
    }

    pub fn forward(&self, samples: &[C64]) -> Result<Vec<C64>> {
        let n = self.order();
        if samples.len() != n + 1 {
            return invalid(format!("legendre_transform: expected {} samples, got {}", n + 1, samples.len()));
        }
        Ok((0..=n)
            .map(|k| (0..=n).map(|j| samples[j] * self.fwd[(k, j)]).sum())
            .collect())
    }

    pub fn inverse(&self, coeffs: &[C64]) -> Result<Vec<C64>> {
        let n = self.order();
        if coeffs.len() != n + 1 {
            return invalid(format!("inverse_transform: expected {} coefficients, got {}", n + 1, coeffs.len()));
        }
        Ok((0..=n)
            .map(|j| (0..=n).map(|k| coeffs[k] * self.inv[(j, k)]).sum())
            .collect())
    }

    /// Tensor forward transform; `samples[(i, j)] = u(y1_i, y2_j)`.
    pub fn forward_2d(t1: &Self, t2: &Self, samples: &Array2<C64>) -> Array2<C64> {
        t1.fwd_c.dot(samples).dot(&t2.fwd_c.t())
    }

    pub fn inverse_2d(t1: &Self, t2: &Self, coeffs: &Array2<C64>) -> Array2<C64> {
        t1.inv_c.dot(coeffs).dot(&t2.inv_c.t())
    }
}

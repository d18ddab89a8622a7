use super::banded::BandedMatrix;
use crate::error::{invalid, Result};
use crate::C64;

/// Boundary-adapted basis `phi_p = L_p + b_p L_{p+2}`, `p = 0..=N-2`, whose
/// members satisfy `(d/dy -+ kappa) phi_p = 0` at `y = -+1`.
#[derive(Debug, Clone)]
pub struct SpectralBasis1D {
    pub n: usize,
    pub kappa: C64,
    pub b: Vec<C64>,
    pub gamma: Vec<f64>,
}

pub fn build_basis(n: usize, kappa: C64) -> Result<SpectralBasis1D> {
    if n < 2 {
        return invalid("build_basis: order N must be at least 2");
    }
    let mut b = Vec::with_capacity(n - 1);
    for p in 0..=n - 2 {
        let pf = p as f64;
        let den = kappa + 0.5 * (pf + 2.0) * (pf + 3.0);
        if den.norm() < 1e-300 {
            return invalid(format!("build_basis: kappa = {kappa} is singular for p = {p}"));
        }
        b.push(-(kappa + 0.5 * pf * (pf + 1.0)) / den);
    }
    let gamma = (0..=n).map(|k| 2.0 / (2.0 * k as f64 + 1.0)).collect();
    Ok(SpectralBasis1D { n, kappa, b, gamma })
}

impl SpectralBasis1D {
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    /// Legendre coefficients `B w_hat` of a function given in the adapted basis.
    pub fn to_legendre(&self, w_hat: &[C64]) -> Vec<C64> {
        let mut u = vec![C64::new(0.0, 0.0); self.n + 1];
        for (p, &w) in w_hat.iter().enumerate() {
            u[p] += w;
            u[p + 2] += self.b[p] * w;
        }
        u
    }
}

/// Stiffness `s_jk = -(phi_j, phi_k'')` (diagonal), mass `(phi_j, phi_k)`
/// (pentadiagonal) and the quadrature map `Q = B^T` (encoded by `b`).
#[derive(Debug, Clone)]
pub struct SystemMatrices1D {
    pub s: Vec<C64>,
    pub m: BandedMatrix,
    pub b: Vec<C64>,
}

pub fn assemble_system_1d(basis: &SpectralBasis1D) -> SystemMatrices1D {
    let d = basis.dim();
    let b = &basis.b;
    let s = (0..d).map(|k| b[k] * (-2.0 * (2.0 * k as f64 + 3.0))).collect();
    let mut m = BandedMatrix::zeros(d, 2, 2);
    for k in 0..d {
        let kf = k as f64;
        m.set(k, k, C64::new(2.0 / (2.0 * kf + 1.0), 0.0) + b[k] * b[k] * (2.0 / (2.0 * kf + 5.0)));
        if k + 2 < d {
            let off = b[k] * (2.0 / (2.0 * kf + 5.0));
            m.set(k, k + 2, off);
            m.set(k + 2, k, off);
        }
    }
    SystemMatrices1D { s, m, b: b.clone() }
}

/// `g_p = (f, phi_p) = gamma_p f_p + b_p gamma_{p+2} f_{p+2}`.
pub fn project_rhs(basis: &SpectralBasis1D, f: &[C64]) -> Result<Vec<C64>> {
    if f.len() != basis.n + 1 {
        return invalid(format!("project_rhs: expected {} coefficients, got {}", basis.n + 1, f.len()));
    }
    Ok((0..basis.dim())
        .map(|p| f[p] * basis.gamma[p] + basis.b[p] * basis.gamma[p + 2] * f[p + 2])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::legendre::boundary_traces;

    #[test]
    fn closed_form_coefficients() {
        let basis = build_basis(4, C64::new(1.0, 0.0)).unwrap();
        assert!((basis.b[0] - C64::new(-0.25, 0.0)).norm() < 1e-16);
        assert!((basis.b[1] - C64::new(-2.0 / 7.0, 0.0)).norm() < 1e-16);
        let sys = assemble_system_1d(&basis);
        assert!((sys.s[0] - C64::new(1.5, 0.0)).norm() < 1e-15);
        let big = build_basis(400, C64::new(2.0, -1.0)).unwrap();
        assert!((big.b[398] + 1.0).norm() < 2e-2);
        assert!((big.b[398] + 1.0).norm() < (big.b[100] + 1.0).norm());
    }

    #[test]
    fn basis_functions_satisfy_robin() {
        let kappa = C64::new(3.0, -2.0);
        let basis = build_basis(12, kappa).unwrap();
        for p in 0..basis.dim() {
            let mut c = vec![C64::new(0.0, 0.0); 13];
            c[p] = C64::new(1.0, 0.0);
            c[p + 2] = basis.b[p];
            let t = boundary_traces(&c);
            let scale = 1.0 + ((p + 2) * (p + 3)) as f64;
            assert!((t.deriv_minus - kappa * t.value_minus).norm() < 1e-13 * scale);
            assert!((t.deriv_plus + kappa * t.value_plus).norm() < 1e-13 * scale);
        }
    }

    #[test]
    fn projection_examples() {
        let basis = build_basis(4, C64::new(1.0, 0.0)).unwrap();
        let mut e0 = vec![C64::new(0.0, 0.0); 5];
        e0[0] = C64::new(1.0, 0.0);
        let g = project_rhs(&basis, &e0).unwrap();
        assert!((g[0] - 2.0).norm() < 1e-16 && g[1..].iter().all(|v| v.norm() == 0.0));
        let mut e2 = vec![C64::new(0.0, 0.0); 5];
        e2[2] = C64::new(1.0, 0.0);
        let g = project_rhs(&basis, &e2).unwrap();
        assert!((g[0] + 0.1).norm() < 1e-16);
        assert!(project_rhs(&basis, &e2[..4]).is_err());
    }
}

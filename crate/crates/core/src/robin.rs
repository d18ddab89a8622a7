//! The Robin-Helmholtz step `-alpha^{-2} u'' + u = f` on `[-1, 1]` with
//! `(d/dy - kappa) u(-1) = g_-` and `(d/dy + kappa) u(+1) = g_+`.
//!
//! Every one-dimensional solve of the boundary schemes goes through here.

use crate::error::{invalid, Result};
use crate::spectral::{
    assemble_system_1d, banded_lu, build_basis, project_rhs, BandedLu, SpectralBasis1D,
    SystemMatrices1D,
};
use crate::C64;

pub use crate::spectral::{boundary_traces, Traces};

/// Degree-one lifts: `chi_-` carries unit Robin data at `y = -1` and
/// vanishing data at `y = +1`, `chi_+` the reverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lifting1D {
    pub kappa: C64,
    pub chi_minus: [C64; 2],
    pub chi_plus: [C64; 2],
}

pub fn make_lifting(kappa: C64) -> Result<Lifting1D> {
    if kappa.norm() < 1e-300 || (kappa + 1.0).norm() < 1e-300 {
        return invalid(format!("make_lifting: kappa = {kappa} is singular"));
    }
    let c0 = 0.5 / kappa;
    let c1 = 0.5 / (kappa + 1.0);
    Ok(Lifting1D { kappa, chi_minus: [-c0, c1], chi_plus: [c0, c1] })
}

impl Lifting1D {
    /// Returns `[[(d-k)chi_-(-1), (d+k)chi_-(1)], [(d-k)chi_+(-1), (d+k)chi_+(1)]]`.
    pub fn constraint_matrix(&self) -> [[C64; 2]; 2] {
        let k = self.kappa;
        let eval = |c: [C64; 2]| {
            let minus = c[1] - k * (c[0] - c[1]);
            let plus = c[1] + k * (c[0] + c[1]);
            [minus, plus]
        };
        [eval(self.chi_minus), eval(self.chi_plus)]
    }
}

#[derive(Debug, Clone)]
pub struct RobinStepConfig {
    pub alpha: C64,
    pub kappa: C64,
    pub basis: SpectralBasis1D,
    pub sys: SystemMatrices1D,
    pub lu: BandedLu,
    pub lifting: Lifting1D,
}

impl RobinStepConfig {
    pub fn new(n: usize, alpha: C64, kappa: C64) -> Result<Self> {
        let basis = build_basis(n, kappa)?;
        let sys = assemble_system_1d(&basis);
        let lifting = make_lifting(kappa)?;
        let inv_a2 = (alpha * alpha).inv();
        let mut a = sys.m.clone();
        for (k, &s) in sys.s.iter().enumerate() {
            a.add(k, k, s * inv_a2);
        }
        let lu = banded_lu(&a)?;
        Ok(Self { alpha, kappa, basis, sys, lu, lifting })
    }

    pub fn order(&self) -> usize {
        self.basis.n
    }

    /// Solves with raw Robin data `g_-`, `g_+`.
    pub fn solve_robin(&self, f: &[C64], g_minus: C64, g_plus: C64) -> Result<Vec<C64>> {
        let n = self.order();
        if f.len() != n + 1 {
            return invalid(format!("robin_step: expected {} coefficients, got {}", n + 1, f.len()));
        }
        let l = &self.lifting;
        let chi = [
            l.chi_minus[0] * g_minus + l.chi_plus[0] * g_plus,
            l.chi_minus[1] * g_minus + l.chi_plus[1] * g_plus,
        ];
        let mut rhs = f.to_vec();
        rhs[0] -= chi[0];
        rhs[1] -= chi[1];
        let mut w = project_rhs(&self.basis, &rhs)?;
        self.lu.solve_in_place(&mut w);
        let mut u = self.basis.to_legendre(&w);
        u[0] += chi[0];
        u[1] += chi[1];
        Ok(u)
    }
}

/// Robin data `(d/dy -+ kappa) u(-+1) = +- alpha B_-+`.
pub fn robin_step(cfg: &RobinStepConfig, f: &[C64], b_minus: C64, b_plus: C64) -> Result<Vec<C64>> {
    cfg.solve_robin(f, cfg.alpha * b_minus, -cfg.alpha * b_plus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifting_kappa_one() {
        let l = make_lifting(C64::new(1.0, 0.0)).unwrap();
        assert_eq!(l.chi_minus, [C64::new(-0.5, 0.0), C64::new(0.25, 0.0)]);
        let m = l.constraint_matrix();
        assert!((m[0][0] - 1.0).norm() < 1e-15 && m[0][1].norm() < 1e-15);
        assert!(m[1][0].norm() < 1e-15 && (m[1][1] - 1.0).norm() < 1e-15);
        assert!(make_lifting(C64::new(0.0, 0.0)).is_err());
        assert!(make_lifting(C64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn homogeneous_problem_gives_zero() {
        let a = C64::from_polar(5.0, -std::f64::consts::FRAC_PI_4);
        let cfg = RobinStepConfig::new(10, a, a).unwrap();
        let u = robin_step(&cfg, &vec![C64::new(0.0, 0.0); 11], C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!(u.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn robin_data_reproduced() {
        let a = C64::from_polar(7.0, -std::f64::consts::FRAC_PI_4);
        let kappa = a * 0.93;
        let cfg = RobinStepConfig::new(24, a, kappa).unwrap();
        let f: Vec<C64> = (0..25).map(|k| C64::new(1.0 / (1.0 + k as f64), (k as f64).sin() * 0.1)).collect();
        let (bm, bp) = (C64::new(0.3, -0.2), C64::new(-1.1, 0.4));
        let u = robin_step(&cfg, &f, bm, bp).unwrap();
        let t = boundary_traces(&u);
        assert!((t.deriv_minus - kappa * t.value_minus - a * bm).norm() < 1e-10);
        assert!((t.deriv_plus + kappa * t.value_plus + a * bp).norm() < 1e-10);
    }
}

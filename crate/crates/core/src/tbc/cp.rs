//! Conventional Padé boundary operator: `R_M` applied to the full
//! `sqrt(d_t - i d_tau^2)` along each segment, with shifted convolution
//! quadrature at the segment ends. Only the boundary map is provided; the
//! scheme is not coupled to the interior solver.

use crate::error::{invalid, Result};
use crate::robin::RobinStepConfig;
use crate::weights::{pade, shifted_cq_weights, OneStep, PadeApprox};
use crate::C64;

use super::domain::DomainMap;
use super::geometry::{end_value, BoundaryTrace, SEGMENTS};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone)]
pub struct CpState {
    pub method: OneStep,
    pub pade: PadeApprox,
    h: f64,
    phase: C64,
    j1: f64,
    j2: f64,
    /// Per axis (`0`: along `y1`, `1`: along `y2`) and Padé index.
    cfg: [Vec<RobinStepConfig>; 2],
    weights: Vec<Vec<f64>>,
    d: Vec<f64>,
    pub phi: [Vec<Vec<C64>>; 4],
    /// Endpoint values `phi_k^n(-1), phi_k^n(+1)` for every past level.
    ends: [Vec<[Vec<C64>; 2]>; 4],
    pub j: usize,
}

impl CpState {
    pub fn new(method: OneStep, m: usize, domain: &DomainMap, n1: usize, n2: usize, n_steps: usize) -> Result<Self> {
        let pade = pade(m)?;
        let rho = domain.rho;
        let d: Vec<f64> = pade.etak.iter().map(|e| 1.0 + e * e / rho).collect();
        let mut cfg: [Vec<RobinStepConfig>; 2] = Default::default();
        for (axis, (n, alpha)) in [(n1, domain.alpha1), (n2, domain.alpha2)].into_iter().enumerate() {
            for dk in &d {
                let a = alpha * dk.sqrt();
                cfg[axis].push(RobinStepConfig::new(n, a, a)?);
            }
        }
        let weights = pade.etak.iter().map(|&e| shifted_cq_weights(method, e, domain.dt, n_steps + 1)).collect();
        let phi = SEGMENTS.map(|s| {
            let n = if s.is_vertical() { n2 } else { n1 };
            vec![vec![ZERO; n + 1]; m]
        });
        let ends = SEGMENTS.map(|_| (0..m).map(|_| [vec![ZERO], vec![ZERO]]).collect());
        Ok(Self {
            method,
            pade,
            h: 1.0 / rho,
            phase: C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
            j1: domain.j1,
            j2: domain.j2,
            cfg,
            weights,
            d,
            phi,
            ends,
            j: 0,
        })
    }

    /// `sum_{m>=1} w_m phi^{n+1-m}` at one end; `n + 1` levels stored.
    fn end_sum(w: &[f64], hist: &[C64], top: usize) -> C64 {
        (1..=top).map(|m| hist[top - m] * w[m]).sum()
    }

    /// Advances the auxiliary fields from `u^j` to `u^{j+1}` and returns the
    /// physical outward normal derivative on each segment (for TR the
    /// average of levels `j` and `j+1`).
    pub fn step(&mut self, current: &BoundaryTrace, next: &BoundaryTrace) -> Result<[Vec<C64>; 4]> {
        let tr = self.method == OneStep::Tr;
        let src = if tr { current.average(next) } else { next.clone() };
        let top = self.j + 1;
        if top >= self.weights[0].len() {
            return invalid(format!("CP boundary sized for {} steps", self.weights[0].len() - 2));
        }
        let mut out: [Vec<C64>; 4] = Default::default();
        for s in SEGMENTS {
            let axis = if s.is_vertical() { 1 } else { 0 };
            let jac = if s.is_vertical() { self.j2 } else { self.j1 };
            let u = src.get(s);
            let mut neumann: Vec<C64> = u.iter().map(|&v| -self.phase * self.pade.b0 * v).collect();
            for k in 0..self.pade.m {
                let old = &self.phi[s.index()][k];
                let dk = self.d[k];
                let f: Vec<C64> = old.iter().zip(u).map(|(&p, &v)| (p + self.h * v) / dk).collect();
                let ends = &self.ends[s.index()][k];
                let w = &self.weights[k];
                let mut hm = Self::end_sum(w, &ends[0], top);
                let mut hp = Self::end_sum(w, &ends[1], top);
                if tr {
                    hm = 0.5 * (hm + Self::end_sum(w, &ends[0], top - 1));
                    hp = 0.5 * (hp + Self::end_sum(w, &ends[1], top - 1));
                }
                let scale = self.phase * jac;
                let sol = self.cfg[axis][k].solve_robin(&f, scale * hm, -scale * hp)?;
                let new: Vec<C64> =
                    if tr { sol.iter().zip(old).map(|(&a, &b)| 2.0 * a - b).collect() } else { sol.clone() };
                // the Neumann datum lives where the boundary condition holds
                let bk = self.pade.bk[k];
                for (nv, &p) in neumann.iter_mut().zip(&sol) {
                    *nv += self.phase * bk * p;
                }
                let ends = &mut self.ends[s.index()][k];
                ends[0].push(end_value(&new, -1.0));
                ends[1].push(end_value(&new, 1.0));
                self.phi[s.index()][k] = new;
            }
            out[s.index()] = neumann;
        }
        self.j += 1;
        Ok(out)
    }
}

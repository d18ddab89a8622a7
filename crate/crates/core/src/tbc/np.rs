//! Effectively local Padé boundary scheme.
//!
//! Every segment carries `M` auxiliary fields `phi_k` (diagonal values only)
//! and every corner an `M x M` block `psi[k][k']`, `k` belonging to the
//! vertical segment and `k'` to the horizontal one. The work per step does
//! not depend on the time index.

use crate::error::Result;
use crate::robin::{robin_step, RobinStepConfig};
use crate::weights::{np_params, NpParams, OneStep};
use crate::C64;

use super::domain::DomainMap;
use super::geometry::{value_at_corner, BoundaryTrace, Corner, Segment, CORNERS, SEGMENTS};
use super::interior::Histories;
use super::WorkCounters;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Values computed by `prepare` and consumed by `finish`.
#[derive(Debug, Clone)]
struct Pending {
    /// `phi_k^{j,j+1}` on vertical and `phi_k^{j+1,j}` on horizontal segments.
    off: [Vec<Vec<C64>>; 4],
    /// Plain fields `phi^{j,j+1}` / `phi^{j+1,j}` (TR only).
    plain: Option<[Vec<C64>; 4]>,
    current: BoundaryTrace,
}

#[derive(Debug, Clone)]
pub struct NpState {
    pub method: OneStep,
    pub params: NpParams,
    cfg1: RobinStepConfig,
    cfg2: RobinStepConfig,
    /// `phi[seg][k]`, Legendre coefficients along the segment.
    pub phi: [Vec<Vec<C64>>; 4],
    /// `psi[corner][k * M + k']`.
    pub psi: [Vec<C64>; 4],
    pending: Option<Pending>,
    /// Largest gap between the two sequential corner updates seen so far.
    pub symmetry_defect: f64,
    pub j: usize,
}

impl NpState {
    pub fn new(method: OneStep, m: usize, domain: &DomainMap, n1: usize, n2: usize) -> Result<Self> {
        let params = np_params(m, domain.rho)?;
        let cfg1 = RobinStepConfig::new(n1, domain.alpha1, domain.alpha1 * params.varpi)?;
        let cfg2 = RobinStepConfig::new(n2, domain.alpha2, domain.alpha2 * params.varpi)?;
        let phi = SEGMENTS.map(|s| {
            let n = if s.is_vertical() { n2 } else { n1 };
            vec![vec![ZERO; n + 1]; m]
        });
        let psi = CORNERS.map(|_| vec![ZERO; m * m]);
        Ok(Self { method, params, cfg1, cfg2, phi, psi, pending: None, symmetry_defect: 0.0, j: 0 })
    }

    pub fn m(&self) -> usize {
        self.params.m
    }

    fn cfg(&self, s: Segment) -> &RobinStepConfig {
        if s.is_vertical() {
            &self.cfg2
        } else {
            &self.cfg1
        }
    }

    /// `sum_{k'} Gamma_k' psi[k][k']` (vertical field `k`) or
    /// `sum_k Gamma_k psi[k][k']` (horizontal field `k'`).
    fn psi_history(&self, c: Corner, vertical: bool, k: usize) -> C64 {
        let m = self.m();
        let g = &self.params.gamma;
        let psi = &self.psi[c.index()];
        if vertical {
            (0..m).map(|l| psi[k * m + l] * g[l]).sum()
        } else {
            (0..m).map(|l| psi[l * m + k] * g[l]).sum()
        }
    }

    /// `sum_k Gamma_k phi_k` of the neighbouring segment, read at `c`.
    fn neighbour_history(&self, s: Segment, c: Corner) -> C64 {
        let (a1, a2) = c.segments();
        let other = if s == a1 { a2 } else { a1 };
        self.phi[other.index()]
            .iter()
            .zip(&self.params.gamma)
            .map(|(f, &g)| value_at_corner(other, f, c) * g)
            .sum()
    }

    /// Off-diagonal advance of all auxiliary fields and the histories for
    /// the interior step `j -> j+1`.
    pub fn prepare(&mut self, current: &BoundaryTrace, counters: &mut WorkCounters) -> Result<Histories> {
        let m = self.m();
        let tr = self.method == OneStep::Tr;
        let p = &self.params;
        let h = 1.0 / p.rho;
        let mut off: [Vec<Vec<C64>>; 4] = Default::default();
        for s in SEGMENTS {
            let (cm, cp) = s.end_corners();
            let vertical = s.is_vertical();
            let mut fields = Vec::with_capacity(m);
            for k in 0..m {
                let bm = self.psi_history(cm, vertical, k);
                let bp = self.psi_history(cp, vertical, k);
                let start = &self.phi[s.index()][k];
                let mut next = robin_step(self.cfg(s), start, bm, bp)?;
                if tr {
                    for (x, &y) in next.iter_mut().zip(start) {
                        *x = 2.0 * *x - y;
                    }
                }
                fields.push(next);
            }
            off[s.index()] = fields;
        }
        let plain = if tr {
            let mut out: [Vec<C64>; 4] = Default::default();
            for s in SEGMENTS {
                let (cm, cp) = s.end_corners();
                let start = current.get(s);
                let bm = self.neighbour_history(s, cm);
                let bp = self.neighbour_history(s, cp);
                let half = robin_step(self.cfg(s), start, bm, bp)?;
                out[s.index()] = half.iter().zip(start).map(|(&x, &y)| 2.0 * x - y).collect();
            }
            Some(out)
        } else {
            None
        };

        let (n1, n2) = (self.cfg1.order(), self.cfg2.order());
        let mut hist = Histories::zeros(n1, n2);
        for s in SEGMENTS {
            let acc = &mut hist.seg[s.index()];
            let len = acc.len() as u64;
            match &plain {
                None => {
                    for (f, &g) in off[s.index()].iter().zip(&p.gamma) {
                        for (a, &v) in acc.iter_mut().zip(f) {
                            *a += v * g;
                        }
                    }
                }
                Some(pl) => {
                    let diff: Vec<C64> =
                        pl[s.index()].iter().zip(current.get(s)).map(|(&a, &b)| (a - b) * (0.5 * h)).collect();
                    for k in 0..m {
                        let f1 = &off[s.index()][k];
                        let f0 = &self.phi[s.index()][k];
                        let (bk, ck, gk) = (-0.5 * p.b_bar[k], p.c[k], p.gamma[k]);
                        for i in 0..acc.len() {
                            acc[i] += (f1[i] * ck + f0[i]) * bk + diff[i] * gk;
                        }
                    }
                }
            }
            counters.segment_ops += m as u64 * len;
        }
        let s_sum = p.gamma_sum();
        for c in CORNERS {
            let psi = &self.psi[c.index()];
            let mut sum = ZERO;
            for k in 0..m {
                for l in 0..m {
                    let w = if tr {
                        0.5 * p.b_bar[k] * p.b_bar[l] * (p.c[k] * p.c[l] + 1.0)
                    } else {
                        p.gamma[k] * p.gamma[l]
                    };
                    sum += psi[k * m + l] * w;
                }
            }
            counters.corner_ops += (m * m) as u64;
            if tr {
                let (a1, a2) = c.segments();
                let mut lin = ZERO;
                for k in 0..m {
                    let v = value_at_corner(a1, &self.phi[a1.index()][k], c)
                        + value_at_corner(a2, &self.phi[a2.index()][k], c);
                    lin += v * (0.5 * p.b_bar[k] * (p.c[k] - 1.0));
                }
                sum += -h * s_sum * lin + h * h * s_sum * s_sum * current.corner(c);
            }
            hist.corner[c.index()] = sum;
        }
        self.pending = Some(Pending { off, plain, current: current.clone() });
        Ok(hist)
    }

    /// Diagonal update with the new boundary trace `u^{j+1}`.
    pub fn finish(&mut self, next: &BoundaryTrace) {
        let pend = self.pending.take().expect("finish called without prepare");
        let m = self.m();
        let p = &self.params;
        let h = 1.0 / p.rho;
        let tr = self.method == OneStep::Tr;
        let mut worst: f64 = 0.0;
        let mut new_psi = self.psi.clone();
        for c in CORNERS {
            let (a1, a2) = c.segments();
            let u0 = pend.current.corner(c);
            let u1 = next.corner(c);
            let (pv, ph) = match &pend.plain {
                Some(pl) => (value_at_corner(a1, &pl[a1.index()], c), value_at_corner(a2, &pl[a2.index()], c)),
                None => (ZERO, ZERO),
            };
            let psi = &self.psi[c.index()];
            for k in 0..m {
                let v_off = value_at_corner(a1, &pend.off[a1.index()][k], c);
                let v_diag = value_at_corner(a1, &self.phi[a1.index()][k], c);
                for l in 0..m {
                    let h_off = value_at_corner(a2, &pend.off[a2.index()][l], c);
                    let h_diag = value_at_corner(a2, &self.phi[a2.index()][l], c);
                    let x = psi[k * m + l];
                    let (dk, dl) = (p.d[k], p.d[l]);
                    let (a, b) = if tr {
                        let (ck, cl) = (p.c[k], p.c[l]);
                        // tau2 first, then tau1
                        let t = cl * x + (h / dl) * (v_off + v_diag);
                        let hn = cl * h_off + (h / dl) * (u1 + ph);
                        let hm = cl * h_diag + (h / dl) * (pv + u0);
                        let a = ck * t + (h / dk) * (hn + hm);
                        // tau1 first, then tau2
                        let t = ck * x + (h / dk) * (h_off + h_diag);
                        let vn = ck * v_off + (h / dk) * (u1 + pv);
                        let vm = ck * v_diag + (h / dk) * (ph + u0);
                        let b = cl * t + (h / dl) * (vn + vm);
                        (a, b)
                    } else {
                        let a = ((x + h * v_off) / dl + h * (h_off + h * u1) / dl) / dk;
                        let b = ((x + h * h_off) / dk + h * (v_off + h * u1) / dk) / dl;
                        (a, b)
                    };
                    worst = worst.max((a - b).norm());
                    new_psi[c.index()][k * m + l] = a;
                }
            }
        }
        self.psi = new_psi;
        for s in SEGMENTS {
            let u1 = next.get(s);
            for k in 0..m {
                let off = &pend.off[s.index()][k];
                let dst = &mut self.phi[s.index()][k];
                match &pend.plain {
                    None => {
                        let dk = p.d[k];
                        for ((d, &o), &u) in dst.iter_mut().zip(off).zip(u1) {
                            *d = (o + h * u) / dk;
                        }
                    }
                    Some(pl) => {
                        let (ck, f) = (p.c[k], h / p.d[k]);
                        for (((d, &o), &u), &q) in dst.iter_mut().zip(off).zip(u1).zip(&pl[s.index()]) {
                            *d = ck * o + f * (u + q);
                        }
                    }
                }
            }
        }
        self.symmetry_defect = self.symmetry_defect.max(worst);
        self.j += 1;
    }

    /// `4 M (N+1) + 4 M^2` for a square grid, independent of `j`.
    pub fn storage(&self) -> usize {
        let seg: usize = self.phi.iter().flat_map(|f| f.iter().map(Vec::len)).sum();
        seg + self.psi.iter().map(Vec::len).sum::<usize>()
    }
}

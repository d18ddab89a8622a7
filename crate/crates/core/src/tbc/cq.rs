//! Convolution-quadrature boundary scheme.
//!
//! Each segment keeps the latest line of its two-time auxiliary field (one
//! Legendre vector per earlier time level); the four corner arrays keep every
//! corner value `phi(tau1, tau2)` computed so far. Older lines are never read
//! again, so they are dropped.

use crate::error::Result;
use crate::robin::{robin_step, RobinStepConfig};
use crate::weights::{cq_weights, OneStep, WeightTable};
use crate::C64;

use super::domain::DomainMap;
use super::geometry::{value_at_corner, BoundaryTrace, Corner, Segment, CORNERS, SEGMENTS};
use super::interior::Histories;
use super::WorkCounters;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone)]
pub struct CqState {
    pub method: OneStep,
    pub weights: WeightTable,
    cfg1: RobinStepConfig,
    cfg2: RobinStepConfig,
    /// `lines[seg][m]`: latest value of the field started at level `m`.
    pub lines: [Vec<Vec<C64>>; 4],
    /// `corner[c][m][q] = phi_c(m, q)`; row `m` grows as new columns arrive.
    pub corner: [Vec<Vec<C64>>; 4],
    prev: Histories,
    pending: Option<[Vec<Vec<C64>>; 4]>,
    pub j: usize,
}

impl CqState {
    pub fn new(method: OneStep, domain: &DomainMap, n1: usize, n2: usize, u0: &BoundaryTrace) -> Result<Self> {
        let cfg1 = RobinStepConfig::new(n1, domain.alpha1, domain.alpha1)?;
        let cfg2 = RobinStepConfig::new(n2, domain.alpha2, domain.alpha2)?;
        let lines = SEGMENTS.map(|s| vec![u0.get(s).to_vec()]);
        let corner = CORNERS.map(|c| vec![vec![u0.corner(c)]]);
        Ok(Self {
            method,
            weights: cq_weights(method, 1),
            cfg1,
            cfg2,
            lines,
            corner,
            prev: Histories::zeros(n1, n2),
            pending: None,
            j: 0,
        })
    }

    fn cfg(&self, s: Segment) -> &RobinStepConfig {
        if s.is_vertical() {
            &self.cfg2
        } else {
            &self.cfg1
        }
    }

    /// `sum_{k=1}^{n} w_k phi_c(.)` along the moving index: for vertical
    /// segments the column index of row `m`, for horizontal ones the row
    /// index of column `q`.
    fn endpoint_history(&self, c: Corner, vertical: bool, fixed: usize, n: usize) -> C64 {
        let arr = &self.corner[c.index()];
        let w = &self.weights.omega;
        (1..=n)
            .map(|k| {
                let v = if vertical { arr[fixed][n - k] } else { arr[n - k][fixed] };
                v * w[k]
            })
            .sum()
    }

    /// Advances every line one level and returns the histories that enter the
    /// interior step `j -> j+1` (staggered averages for TR).
    pub fn prepare(&mut self, counters: &mut WorkCounters) -> Result<Histories> {
        let j = self.j;
        self.weights.extend_to(j + 1);
        let tr = self.method == OneStep::Tr;
        let mut new_lines: [Vec<Vec<C64>>; 4] = Default::default();
        for s in SEGMENTS {
            let vertical = s.is_vertical();
            let (cm, cp) = s.end_corners();
            let mut out = Vec::with_capacity(j + 1);
            for (m, line) in self.lines[s.index()].iter().enumerate() {
                let mut bm = self.endpoint_history(cm, vertical, m, j + 1);
                let mut bp = self.endpoint_history(cp, vertical, m, j + 1);
                counters.corner_ops += 2 * (j as u64 + 1);
                let next = if tr {
                    bm = 0.5 * (bm + self.endpoint_history(cm, vertical, m, j));
                    bp = 0.5 * (bp + self.endpoint_history(cp, vertical, m, j));
                    counters.corner_ops += 2 * j as u64;
                    let half = robin_step(self.cfg(s), line, bm, bp)?;
                    half.iter().zip(line).map(|(&h, &p)| 2.0 * h - p).collect()
                } else {
                    robin_step(self.cfg(s), line, bm, bp)?
                };
                out.push(next);
            }
            new_lines[s.index()] = out;
        }
        // new corner entries off the diagonal
        for c in CORNERS {
            let (a1, a2) = c.segments();
            let vert = &new_lines[a1.index()];
            let horiz = &new_lines[a2.index()];
            let arr = &mut self.corner[c.index()];
            for (m, row) in arr.iter_mut().enumerate() {
                row.push(value_at_corner(a1, &vert[m], c));
            }
            let mut last: Vec<C64> = horiz.iter().map(|f| value_at_corner(a2, f, c)).collect();
            last.push(ZERO);
            arr.push(last);
        }
        let w = &self.weights.omega;
        let mut hist = Histories::zeros(self.cfg1.order(), self.cfg2.order());
        for s in SEGMENTS {
            let acc = &mut hist.seg[s.index()];
            for (m, f) in new_lines[s.index()].iter().enumerate() {
                let wk = w[j + 1 - m];
                for (a, &v) in acc.iter_mut().zip(f) {
                    *a += v * wk;
                }
                counters.segment_ops += f.len() as u64;
            }
        }
        for c in CORNERS {
            let arr = &self.corner[c.index()];
            let mut sum = ZERO;
            for k in 1..=j + 1 {
                let mut row = ZERO;
                for l in 1..=j + 1 {
                    row += arr[j + 1 - k][j + 1 - l] * w[l];
                }
                sum += row * w[k];
            }
            counters.corner_ops += ((j + 1) * (j + 1)) as u64;
            hist.corner[c.index()] = sum;
        }
        self.pending = Some(new_lines);
        if tr {
            let staggered = hist.average(&self.prev);
            self.prev = hist;
            Ok(staggered)
        } else {
            Ok(hist)
        }
    }

    /// Closes the step with the new diagonal values `phi(j+1, j+1) = u^{j+1}`.
    pub fn finish(&mut self, next: &BoundaryTrace) {
        let mut lines = self.pending.take().expect("finish called without prepare");
        for s in SEGMENTS {
            lines[s.index()].push(next.get(s).to_vec());
        }
        self.lines = lines;
        for c in CORNERS {
            let arr = &mut self.corner[c.index()];
            let last = arr.len() - 1;
            arr[last][last] = next.corner(c);
        }
        self.j += 1;
    }

    /// Complex numbers currently held by the auxiliary storage.
    pub fn storage(&self) -> usize {
        let lines: usize = self.lines.iter().flat_map(|l| l.iter().map(Vec::len)).sum();
        let corners: usize = self.corner.iter().flat_map(|a| a.iter().map(Vec::len)).sum();
        lines + corners
    }
}

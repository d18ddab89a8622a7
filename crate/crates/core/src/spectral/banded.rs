use crate::error::{invalid, Result, TbcError};
use crate::C64;

/// Square complex band matrix, row-major band storage.
///
/// Row `i` keeps columns `i - kl ..= i + ku` at offsets `0 ..= kl + ku`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<C64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, data: vec![C64::new(0.0, 0.0); n * (kl + ku + 1)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, 0, 0);
        for i in 0..n {
            a.set(i, i, C64::new(1.0, 0.0));
        }
        a
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.kl + self.ku + 1) + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Panics when `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(self.in_band(i, j), "entry ({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(self.in_band(i, j), "entry ({i},{j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.idx(i, j)] * x[j]).sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Pivot-free LU factors sharing the band layout of the input.
#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
}

pub fn banded_lu(a: &BandedMatrix) -> Result<BandedLu> {
    let mut lu = a.clone();
    let (n, kl, ku) = (lu.n, lu.kl, lu.ku);
    let w = kl + ku + 1;
    let threshold = 1e-14 * a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let pivot = lu.data[lu.idx(k, k)];
        if !(pivot.norm() > threshold) {
            return Err(TbcError::PivotBreakdown { row: k, magnitude: pivot.norm() });
        }
        let inv = pivot.inv();
        let jmax = (k + ku).min(n - 1);
        let imax = (k + kl).min(n - 1);
        for i in k + 1..=imax {
            let ik = lu.idx(i, k);
            let l = lu.data[ik] * inv;
            lu.data[ik] = l;
            if l == C64::new(0.0, 0.0) {
                continue;
            }
            // rows k and i are disjoint in storage; row k lies before row i
            let src = k * w + kl + 1;
            let dst = i * w + (k + 1 + kl - i);
            let len = jmax - k;
            let (head, tail) = lu.data.split_at_mut(dst);
            let row_k = &head[src..src + len];
            for (d, &kv) in tail[..len].iter_mut().zip(row_k) {
                *d -= l * kv;
            }
        }
    }
    Ok(BandedLu { lu })
}

impl BandedLu {
    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn factors(&self) -> &BandedMatrix {
        &self.lu
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let a = &self.lu;
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        let w = kl + ku + 1;
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let row = &a.data[i * w + (lo + kl - i)..i * w + kl];
            let s: C64 = row.iter().zip(&b[lo..i]).map(|(&l, &x)| l * x).sum();
            b[i] -= s;
        }
        for i in (0..n).rev() {
            let hi = (i + ku).min(n - 1);
            let row = &a.data[i * w + kl + 1..i * w + kl + 1 + (hi - i)];
            let s: C64 = row.iter().zip(&b[i + 1..=hi]).map(|(&u, &x)| u * x).sum();
            b[i] = (b[i] - s) / a.data[i * w + kl];
        }
    }
}

pub fn banded_solve(lu: &BandedLu, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != lu.dim() {
        return invalid(format!("banded_solve: rhs length {} != {}", b.len(), lu.dim()));
    }
    let mut x = b.to_vec();
    lu.solve_in_place(&mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let lu = banded_lu(&BandedMatrix::identity(5)).unwrap();
        let b: Vec<C64> = (0..5).map(|k| C64::new(k as f64, -1.0)).collect();
        assert_eq!(banded_solve(&lu, &b).unwrap(), b);
    }

    #[test]
    fn zero_row_breaks_down() {
        let mut a = BandedMatrix::zeros(4, 1, 1);
        for i in 0..4 {
            if i != 2 {
                a.set(i, i, C64::new(2.0, 0.0));
            }
        }
        assert!(matches!(banded_lu(&a), Err(TbcError::PivotBreakdown { row: 2, .. })));
    }

    #[test]
    fn residual_small_on_pentadiagonal() {
        let n = 30;
        let mut a = BandedMatrix::zeros(n, 2, 2);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                let v = if i == j { C64::new(6.0, 1.0) } else { C64::new(0.3 * (i + 2 * j) as f64 / n as f64, -0.2) };
                a.set(i, j, v);
            }
        }
        let b: Vec<C64> = (0..n).map(|k| C64::new((k as f64).sin(), (k as f64).cos())).collect();
        let x = banded_solve(&banded_lu(&a).unwrap(), &b).unwrap();
        let r = a.matvec(&x);
        let err: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }
}

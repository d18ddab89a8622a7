//! Interior Legendre-Galerkin step `-a1^{-2} d1^2 u - a2^{-2} d2^2 u + u = f`
//! with Robin data on the four segments and mixed data at the corners.

use ndarray::Array2;

use crate::error::{invalid, Result};
use crate::spectral::{
    assemble_system_1d, banded_lu, build_basis, d2_legendre_coeffs, project_rhs, BandedLu,
    BandedMatrix, SpectralBasis1D, SystemMatrices1D,
};
use crate::C64;

use super::geometry::{end_derivative, end_value, normal_trace, trace, Corner, Segment, CORNERS, SEGMENTS};
use super::lifting::{lift_2d, Lifting2D};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Segment history functions (Legendre coefficients along the segment) and
/// corner scalars, indexed by `Segment::index` / `Corner::index`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histories {
    pub seg: [Vec<C64>; 4],
    pub corner: [C64; 4],
}

impl Histories {
    pub fn zeros(n1: usize, n2: usize) -> Self {
        Self {
            seg: [vec![ZERO; n2 + 1], vec![ZERO; n2 + 1], vec![ZERO; n1 + 1], vec![ZERO; n1 + 1]],
            corner: [ZERO; 4],
        }
    }

    pub fn get(&self, s: Segment) -> &[C64] {
        &self.seg[s.index()]
    }

    pub fn corner(&self, c: Corner) -> C64 {
        self.corner[c.index()]
    }

    pub fn average(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.seg.iter_mut().zip(&other.seg) {
            for (x, y) in a.iter_mut().zip(b) {
                *x = (*x + *y) * 0.5;
            }
        }
        for (x, y) in out.corner.iter_mut().zip(&other.corner) {
            *x = (*x + *y) * 0.5;
        }
        out
    }
}

/// Kronecker system `a1^{-2} M2 (x) S1 + a2^{-2} S2 (x) M1 + M2 (x) M1` in
/// band storage; unknown `(p1, p2)` sits at `p1 + (N1-1) p2`.
pub fn assemble_system_2d(
    sys1: &SystemMatrices1D,
    sys2: &SystemMatrices1D,
    alpha1: C64,
    alpha2: C64,
) -> BandedMatrix {
    let d1 = sys1.s.len();
    let d2 = sys2.s.len();
    let bw = 2 * d1 + 2;
    let mut a = BandedMatrix::zeros(d1 * d2, bw, bw);
    let ia1 = (alpha1 * alpha1).inv();
    let ia2 = (alpha2 * alpha2).inv();
    for p2 in 0..d2 {
        for q2 in p2.saturating_sub(2)..(p2 + 3).min(d2) {
            let m2 = sys2.m.get(p2, q2);
            let diag2 = p2 == q2;
            for p1 in 0..d1 {
                for q1 in p1.saturating_sub(2)..(p1 + 3).min(d1) {
                    let m1 = sys1.m.get(p1, q1);
                    let mut v = m1 * m2;
                    if p1 == q1 {
                        v += ia1 * sys1.s[p1] * m2;
                    }
                    if diag2 {
                        v += ia2 * sys2.s[p2] * m1;
                    }
                    if v != ZERO {
                        a.set(p1 + d1 * p2, q1 + d1 * q2, v);
                    }
                }
            }
        }
    }
    a
}

/// Robin residuals of a field against given histories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResidual {
    /// `L2` norm over each segment, reference coordinates.
    pub segment: [f64; 4],
    pub corner: [f64; 4],
    pub field_norm: f64,
    pub kappa_scale: [f64; 2],
}

impl BoundaryResidual {
    pub fn relative_segment(&self) -> f64 {
        let r = self.segment.iter().fold(0.0f64, |a, &b| a.max(b));
        r / (self.field_norm * self.kappa_scale[0].max(self.kappa_scale[1])).max(f64::MIN_POSITIVE)
    }

    pub fn relative_corner(&self) -> f64 {
        let r = self.corner.iter().fold(0.0f64, |a, &b| a.max(b));
        r / (self.field_norm * self.kappa_scale[0] * self.kappa_scale[1]).max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone)]
pub struct InteriorSolver {
    pub n1: usize,
    pub n2: usize,
    pub alpha1: C64,
    pub alpha2: C64,
    pub basis1: SpectralBasis1D,
    pub basis2: SpectralBasis1D,
    pub lifting: Lifting2D,
    /// The mass matrices only couple equal parities, so the system splits
    /// into four independent band systems, one per `(p1 % 2, p2 % 2)`.
    parity: Vec<(Vec<usize>, BandedLu)>,
}

fn parity_blocks(a: &BandedMatrix, d1: usize, d2: usize) -> Result<Vec<(Vec<usize>, BandedLu)>> {
    let mut out = Vec::with_capacity(4);
    for r2 in 0..2 {
        for r1 in 0..2 {
            let m1 = (d1 + 1 - r1) / 2;
            let m2 = (d2 + 1 - r2) / 2;
            let global: Vec<usize> =
                (0..m1 * m2).map(|l| (r1 + 2 * (l % m1)) + d1 * (r2 + 2 * (l / m1))).collect();
            let bw = m1 + 1;
            let mut b = BandedMatrix::zeros(global.len(), bw, bw);
            for (i, &gi) in global.iter().enumerate() {
                for j in i.saturating_sub(bw)..(i + bw + 1).min(global.len()) {
                    b.set(i, j, a.get(gi, global[j]));
                }
            }
            out.push((global, banded_lu(&b)?));
        }
    }
    Ok(out)
}

impl InteriorSolver {
    /// Factors the Kronecker system once.
    pub fn new(n1: usize, n2: usize, alpha1: C64, alpha2: C64, kappa1: C64, kappa2: C64) -> Result<Self> {
        let basis1 = build_basis(n1, kappa1)?;
        let basis2 = build_basis(n2, kappa2)?;
        let a = assemble_system_2d(&assemble_system_1d(&basis1), &assemble_system_1d(&basis2), alpha1, alpha2);
        let parity = parity_blocks(&a, n1 - 1, n2 - 1)?;
        let lifting = lift_2d(kappa1, kappa2)?;
        Ok(Self { n1, n2, alpha1, alpha2, basis1, basis2, lifting, parity })
    }

    pub fn kappa1(&self) -> C64 {
        self.basis1.kappa
    }

    pub fn kappa2(&self) -> C64 {
        self.basis2.kappa
    }

    fn check_shape(&self, a: &Array2<C64>) -> Result<()> {
        if a.dim() != (self.n1 + 1, self.n2 + 1) {
            return invalid(format!(
                "interior: expected {}x{} coefficients, got {:?}",
                self.n1 + 1,
                self.n2 + 1,
                a.dim()
            ));
        }
        Ok(())
    }

    /// Robin data `g` on each segment: `-alpha B` on R/T, `+alpha B` on L/B.
    fn segment_data(&self, h: &Histories, s: Segment) -> Vec<C64> {
        let alpha = if s.is_vertical() { self.alpha1 } else { self.alpha2 };
        let f = -s.sign() * alpha;
        h.get(s).iter().map(|&b| b * f).collect()
    }

    /// Corner data `s1 s2 alpha1 alpha2 C`.
    fn corner_data(&self, h: &Histories, c: Corner) -> C64 {
        self.alpha1 * self.alpha2 * c.sign() * h.corner(c)
    }

    /// Lifting field `X` carrying all Robin and corner data.
    pub fn lift_field(&self, h: &Histories) -> Array2<C64> {
        let mut x = Array2::zeros((self.n1 + 1, self.n2 + 1));
        for s in SEGMENTS {
            let chi = self.lifting.segment(s);
            let g = self.segment_data(h, s);
            for (k, &c) in chi.iter().enumerate() {
                for (p, &v) in g.iter().enumerate() {
                    if s.is_vertical() {
                        x[(k, p)] += c * v;
                    } else {
                        x[(p, k)] += c * v;
                    }
                }
            }
        }
        for (i, row) in self.corner_block(h).iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                x[(i, k)] -= v;
            }
        }
        x
    }

    /// `G = sum_c K_c chi_c`, the 2x2 corner contribution to the right side.
    pub fn corner_block(&self, h: &Histories) -> [[C64; 2]; 2] {
        let mut g = [[ZERO; 2]; 2];
        for c in CORNERS {
            let k = self.corner_data(h, c);
            let chi = self.lifting.corner(c);
            for i in 0..2 {
                for l in 0..2 {
                    g[i][l] += k * chi[i][l];
                }
            }
        }
        g
    }

    /// `(1 - a1^{-2} d1^2 - a2^{-2} d2^2) X` in coefficient space.
    pub fn apply_operator(&self, x: &Array2<C64>) -> Array2<C64> {
        let mut out = x.clone();
        let ia1 = (self.alpha1 * self.alpha1).inv();
        let ia2 = (self.alpha2 * self.alpha2).inv();
        for p2 in 0..=self.n2 {
            let col: Vec<C64> = x.column(p2).to_vec();
            for (p1, v) in d2_legendre_coeffs(&col).into_iter().enumerate() {
                out[(p1, p2)] -= ia1 * v;
            }
        }
        for p1 in 0..=self.n1 {
            let row: Vec<C64> = x.row(p1).to_vec();
            for (p2, v) in d2_legendre_coeffs(&row).into_iter().enumerate() {
                out[(p1, p2)] -= ia2 * v;
            }
        }
        out
    }

    /// Galerkin solve for a homogeneous-Robin right side `f`.
    pub fn solve_homogeneous(&self, f: &Array2<C64>) -> Result<Array2<C64>> {
        self.check_shape(f)?;
        let (d1, d2) = (self.n1 - 1, self.n2 - 1);
        let mut half = Array2::zeros((d1, self.n2 + 1));
        for p2 in 0..=self.n2 {
            let g = project_rhs(&self.basis1, &f.column(p2).to_vec())?;
            for (p1, v) in g.into_iter().enumerate() {
                half[(p1, p2)] = v;
            }
        }
        let mut rhs = vec![ZERO; d1 * d2];
        for p1 in 0..d1 {
            let g = project_rhs(&self.basis2, &half.row(p1).to_vec())?;
            for (p2, v) in g.into_iter().enumerate() {
                rhs[p1 + d1 * p2] = v;
            }
        }
        for (global, lu) in &self.parity {
            let mut part: Vec<C64> = global.iter().map(|&g| rhs[g]).collect();
            lu.solve_in_place(&mut part);
            for (&g, v) in global.iter().zip(part) {
                rhs[g] = v;
            }
        }
        let mut cols = Array2::zeros((self.n1 + 1, d2));
        for p2 in 0..d2 {
            let w: Vec<C64> = (0..d1).map(|p1| rhs[p1 + d1 * p2]).collect();
            for (p1, v) in self.basis1.to_legendre(&w).into_iter().enumerate() {
                cols[(p1, p2)] = v;
            }
        }
        let mut out = Array2::zeros((self.n1 + 1, self.n2 + 1));
        for p1 in 0..=self.n1 {
            for (p2, v) in self.basis2.to_legendre(&cols.row(p1).to_vec()).into_iter().enumerate() {
                out[(p1, p2)] = v;
            }
        }
        Ok(out)
    }

    /// Full step: lifted solve `u = w + X` with `f = src - D X`.
    pub fn solve(&self, src: &Array2<C64>, h: &Histories) -> Result<Array2<C64>> {
        let x = self.lift_field(h);
        let f = assemble_interior_rhs(self, src, h)?;
        Ok(solve_interior(self, &f)? + &x)
    }

    pub fn residual(&self, u: &Array2<C64>, h: &Histories) -> BoundaryResidual {
        let mut segment = [0.0; 4];
        let mut corner = [0.0; 4];
        let robin = |s: Segment| -> Vec<C64> {
            let kappa = if s.is_vertical() { self.kappa1() } else { self.kappa2() };
            let tr = trace(u, s);
            normal_trace(u, s).iter().zip(&tr).map(|(&d, &v)| d + kappa * s.sign() * v).collect()
        };
        for s in SEGMENTS {
            let g = self.segment_data(h, s);
            let r = robin(s);
            let gamma = if s.is_vertical() { &self.basis2.gamma } else { &self.basis1.gamma };
            segment[s.index()] =
                r.iter().zip(&g).zip(gamma).map(|((&a, &b), &w)| w * (a - b).norm_sqr()).sum::<f64>().sqrt();
        }
        for c in CORNERS {
            let (a1, a2) = c.segments();
            let f = robin(a1);
            let s2 = a2.sign();
            let v = end_derivative(&f, s2) + self.kappa2() * s2 * end_value(&f, s2);
            corner[c.index()] = (v - self.corner_data(h, c)).norm();
        }
        let mut field = 0.0;
        for ((p1, p2), v) in u.indexed_iter() {
            field += self.basis1.gamma[p1] * self.basis2.gamma[p2] * v.norm_sqr();
        }
        BoundaryResidual {
            segment,
            corner,
            field_norm: field.sqrt(),
            kappa_scale: [self.kappa1().norm(), self.kappa2().norm()],
        }
    }
}

/// `F = src - D X`: the right side seen by the homogeneous-Robin unknown.
pub fn assemble_interior_rhs(solver: &InteriorSolver, src: &Array2<C64>, h: &Histories) -> Result<Array2<C64>> {
    solver.check_shape(src)?;
    let x = solver.lift_field(h);
    Ok(src - &solver.apply_operator(&x))
}

pub fn solve_interior(solver: &InteriorSolver, f: &Array2<C64>) -> Result<Array2<C64>> {
    solver.solve_homogeneous(f)
}

//! Closed-form free-space solutions: superpositions of chirped-Gaussian (CG)
//! and Hermite-Gaussian (HG) wave packets moving with velocity `c`.
//!
//! Every term factors as `f1(x1, t) f2(x2, t)`, which is used to evaluate
//! whole tensor grids from two 1D sweeps.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{invalid, Result, TbcError};
use crate::spectral::lgl_grid;
use crate::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Cg { a: [f64; 2], b: [f64; 2], c: [f64; 2] },
    Hg { m: [usize; 2], a: [f64; 2], c: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Cg,
    Hg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileType {
    IA,
    IB,
    IIA,
    IIB,
}

/// Widths `1/a` as printed in the tables, kept as exact fractions `num/den`
/// of the decimal strings.
pub const WIDTHS: [[(u32, u32); 2]; 4] = [[(5, 2), (12, 5)], [(23, 10), (11, 5)], [(27, 10), (13, 5)], [(11, 5), (5, 2)]];
pub const HG_ORDERS: [[usize; 2]; 4] = [[1, 2], [2, 1], [2, 1], [1, 2]];
pub const DEFAULT_AMPLITUDE: f64 = 2.0;

/// `A0 * sum_j term_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactProfile {
    pub amplitude: f64,
    pub terms: Vec<Term>,
}

impl ExactProfile {
    pub fn zero() -> Self {
        Self { amplitude: 0.0, terms: Vec::new() }
    }

    pub fn preset(family: Family, kind: ProfileType, c0: f64, a0: f64) -> Self {
        let (n, shift) = match kind {
            ProfileType::IA => (2, 0.0),
            ProfileType::IB => (2, FRAC_PI_4),
            ProfileType::IIA => (4, 0.0),
            ProfileType::IIB => (4, FRAC_PI_4),
        };
        let step = if n == 2 { PI } else { FRAC_PI_2 };
        let terms = (0..n)
            .map(|j| {
                let theta = j as f64 * step + shift;
                let c = [c0 * theta.cos(), c0 * theta.sin()];
                let a = WIDTHS[j].map(|(num, den)| den as f64 / num as f64);
                match family {
                    Family::Cg => Term::Cg { a, b: [0.5, 0.5], c },
                    Family::Hg => Term::Hg { m: HG_ORDERS[j], a, c },
                }
            })
            .collect();
        Self { amplitude: a0, terms }
    }

    /// Preset names such as `cg-ia`, `hg-iib`.
    pub fn by_name(name: &str, c0: f64, a0: f64) -> Result<Self> {
        let id: PresetId = name.parse()?;
        Ok(Self::preset(id.family, id.kind, c0, a0))
    }

    pub fn eval(&self, x: [f64; 2], t: f64) -> C64 {
        self.terms
            .iter()
            .map(|term| factor(term, 0, x[0], t).0 * factor(term, 1, x[1], t).0)
            .sum::<C64>()
            * self.amplitude
    }

    pub fn gradient(&self, x: [f64; 2], t: f64) -> [C64; 2] {
        let mut g = [C64::new(0.0, 0.0); 2];
        for term in &self.terms {
            let (f1, d1) = factor(term, 0, x[0], t);
            let (f2, d2) = factor(term, 1, x[1], t);
            g[0] += d1 * f2;
            g[1] += f1 * d2;
        }
        g.map(|v| v * self.amplitude)
    }

    /// Values on the tensor grid `xs1 x xs2`.
    pub fn eval_grid(&self, xs1: &[f64], xs2: &[f64], t: f64) -> Array2<C64> {
        let mut out = Array2::zeros((xs1.len(), xs2.len()));
        for term in &self.terms {
            let f1: Vec<C64> = xs1.iter().map(|&x| factor(term, 0, x, t).0).collect();
            let f2: Vec<C64> = xs2.iter().map(|&x| factor(term, 1, x, t).0).collect();
            for (i, a) in f1.iter().enumerate() {
                for (k, b) in f2.iter().enumerate() {
                    out[(i, k)] += a * b;
                }
            }
        }
        out.mapv_inplace(|v| v * self.amplitude);
        out
    }

    /// `d/dx_axis` along a line where the other coordinate is fixed at `fixed`.
    pub fn derivative_line(&self, axis: usize, fixed: f64, xs: &[f64], t: f64) -> Vec<C64> {
        let other = 1 - axis;
        let mut out = vec![C64::new(0.0, 0.0); xs.len()];
        for term in &self.terms {
            let (_, d) = factor(term, axis, fixed, t);
            for (o, &x) in out.iter_mut().zip(xs) {
                *o += d * factor(term, other, x, t).0;
            }
        }
        out.iter().map(|v| v * self.amplitude).collect()
    }

    /// Values along a line where coordinate `axis` is fixed at `fixed`.
    pub fn value_line(&self, axis: usize, fixed: f64, xs: &[f64], t: f64) -> Vec<C64> {
        let other = 1 - axis;
        let mut out = vec![C64::new(0.0, 0.0); xs.len()];
        for term in &self.terms {
            let (f, _) = factor(term, axis, fixed, t);
            for (o, &x) in out.iter_mut().zip(xs) {
                *o += f * factor(term, other, x, t).0;
            }
        }
        out.iter().map(|v| v * self.amplitude).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetId {
    pub family: Family,
    pub kind: ProfileType,
}

impl FromStr for PresetId {
    type Err = TbcError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (fam, kind) = lower.split_once('-').ok_or_else(|| TbcError::InvalidArgument(format!("unknown preset '{s}'")))?;
        let family = match fam {
            "cg" => Family::Cg,
            "hg" => Family::Hg,
            _ => return invalid(format!("unknown preset family '{fam}'")),
        };
        let kind = match kind {
            "ia" => ProfileType::IA,
            "ib" => ProfileType::IB,
            "iia" => ProfileType::IIA,
            "iib" => ProfileType::IIB,
            _ => return invalid(format!("unknown preset type '{kind}'")),
        };
        Ok(Self { family, kind })
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::Cg => "cg",
            Family::Hg => "hg",
        };
        let kind = match self.kind {
            ProfileType::IA => "ia",
            ProfileType::IB => "ib",
            ProfileType::IIA => "iia",
            ProfileType::IIB => "iib",
        };
        write!(f, "{fam}-{kind}")
    }
}

/// `H_0(x) ..= H_{m_max}(x)` (physicists' Hermite polynomials).
pub fn eval_hermite_all(m_max: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(m_max + 1);
    h.push(1.0);
    if m_max >= 1 {
        h.push(2.0 * x);
    }
    for n in 1..m_max {
        let next = 2.0 * x * h[n] - 2.0 * n as f64 * h[n - 1];
        h.push(next);
    }
    h
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// Normalized HG functions `G_0 ..= G_{m_max}` at `(x, t)`.
fn hermite_gaussians(m_max: usize, a: f64, x: f64, t: f64) -> Vec<C64> {
    let w = (1.0 + (4.0 * a * t).powi(2)).sqrt();
    let mu = (C64::new(1.0 / a, 4.0 * t)).inv();
    let theta = C64::new(1.0, 4.0 * a * t).arg();
    let h = eval_hermite_all(m_max, (2.0 * a).sqrt() * x / w);
    let env = (mu / a).sqrt() * (-mu * x * x).exp();
    (0..=m_max)
        .map(|m| {
            let gamma = (2f64.powi(m as i32) * factorial(m) * PI.sqrt() / (2.0 * a).sqrt()).sqrt();
            env * h[m] * C64::from_polar(1.0, -(m as f64) * theta) / gamma
        })
        .collect()
}

/// One axis of a term: value and `d/dx`, plane-wave factor included.
fn factor(term: &Term, axis: usize, x: f64, t: f64) -> (C64, C64) {
    let (c, (g, dg)) = match *term {
        Term::Cg { a, b, c } => {
            let z = C64::new(a[axis], b[axis]);
            let xi = x - c[axis] * t;
            let d = 1.0 + 4.0 * I * z * t;
            let g = d.sqrt().inv() * (-z * xi * xi / d).exp();
            (c[axis], (g, -2.0 * z * xi / d * g))
        }
        Term::Hg { m, a, c } => {
            let (m, a) = (m[axis], a[axis]);
            let xi = x - c[axis] * t;
            let gs = hermite_gaussians(m + 1, a, xi, t);
            let mut dg = -((m + 1) as f64 * a).sqrt() * gs[m + 1];
            if m > 0 {
                dg += (m as f64 * a).sqrt() * gs[m - 1];
            }
            (c[axis], (gs[m], dg))
        }
    };
    let wave = C64::from_polar(1.0, 0.5 * c * x - 0.25 * c * c * t);
    (g * wave, (dg + 0.5 * I * c * g) * wave)
}

pub fn eval_profile(profile: &ExactProfile, x: [f64; 2], t: f64) -> C64 {
    profile.eval(x, t)
}

/// Outward normal derivative at a point of the rectangle's boundary; corners
/// use the `x1` normal.
pub fn profile_normal_derivative(profile: &ExactProfile, rect: [f64; 4], x: [f64; 2], t: f64) -> Result<C64> {
    let [xl, xr, xb, xt] = rect;
    let tol = 1e-12 * (xr - xl).abs().max(xt - xb).max(1.0);
    let inside = x[0] >= xl - tol && x[0] <= xr + tol && x[1] >= xb - tol && x[1] <= xt + tol;
    let g = profile.gradient(x, t);
    if !inside {
        return invalid(format!("point {x:?} is outside the domain"));
    }
    if (x[0] - xr).abs() <= tol {
        Ok(g[0])
    } else if (x[0] - xl).abs() <= tol {
        Ok(-g[0])
    } else if (x[1] - xt).abs() <= tol {
        Ok(g[1])
    } else if (x[1] - xb).abs() <= tol {
        Ok(-g[1])
    } else {
        invalid(format!("point {x:?} is not on the boundary"))
    }
}

/// `int |G(t)|^2` over the rectangle by LGL tensor quadrature of order `n`.
pub fn mass(profile: &ExactProfile, rect: [f64; 4], t: f64, n: usize) -> Result<f64> {
    let grid = lgl_grid(n)?;
    let [xl, xr, xb, xt] = rect;
    let (j1, j2) = (0.5 * (xr - xl), 0.5 * (xt - xb));
    let xs1: Vec<f64> = grid.nodes.iter().map(|y| j1 * y + 0.5 * (xr + xl)).collect();
    let xs2: Vec<f64> = grid.nodes.iter().map(|y| j2 * y + 0.5 * (xt + xb)).collect();
    let v = profile.eval_grid(&xs1, &xs2, t);
    let mut s = 0.0;
    for ((i, k), z) in v.indexed_iter() {
        s += grid.weights[i] * grid.weights[k] * z.norm_sqr();
    }
    Ok(s * j1 * j2)
}

/// `E(t) = int |G(t)|^2 / int |G(0)|^2`.
pub fn energy_content(profile: &ExactProfile, rect: [f64; 4], t: f64, n: usize) -> Result<f64> {
    let m0 = mass(profile, rect, 0.0, n)?;
    if !(m0 > 0.0) {
        return invalid("energy_content: initial mass is zero");
    }
    Ok(mass(profile, rect, t, n)? / m0)
}

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use tbc_core::weights::OneStep;
use tbc_core::C64;

pub type Q = BigRational;
pub type CQ = Complex<Q>;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_c64(z: &CQ) -> C64 {
    C64::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
}

/// Monomial coefficients of `L_0 ..= L_n`, exact.
pub fn legendre_monomials(n: usize) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = vec![vec![Q::one()]];
    if n >= 1 {
        out.push(vec![Q::zero(), Q::one()]);
    }
    for k in 1..n {
        let mut next = vec![Q::zero(); k + 2];
        for (i, c) in out[k].iter().enumerate() {
            next[i + 1] += c * q(2 * k as i64 + 1, k as i64 + 1);
        }
        for (i, c) in out[k - 1].iter().enumerate() {
            next[i] -= c * q(k as i64, k as i64 + 1);
        }
        out.push(next);
    }
    out
}

fn poly_mul(a: &[CQ], b: &[CQ]) -> Vec<CQ> {
    let mut out = vec![CQ::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + x * y;
        }
    }
    out
}

fn poly_d2(a: &[CQ]) -> Vec<CQ> {
    if a.len() < 3 {
        return vec![CQ::zero()];
    }
    (2..a.len()).map(|i| &a[i] * Q::from_integer(BigInt::from((i * (i - 1)) as i64))).collect()
}

fn integrate(a: &[CQ]) -> CQ {
    a.iter()
        .enumerate()
        .filter(|(i, _)| i % 2 == 0)
        .fold(CQ::zero(), |s, (i, c)| s + c * q(2, i as i64 + 1))
}

/// Exact `S_jk = -(phi_j, phi_k'')` and `M_jk = (phi_j, phi_k)` for the
/// Robin-adapted basis with rational complex `kappa`.
pub fn exact_system_1d(n: usize, kappa: &CQ) -> (Vec<Vec<CQ>>, Vec<Vec<CQ>>, Vec<CQ>) {
    let leg = legendre_monomials(n);
    let lift = |p: &Vec<Q>| -> Vec<CQ> { p.iter().map(|c| CQ::new(c.clone(), Q::zero())).collect() };
    let d = n - 1;
    let mut b = Vec::with_capacity(d);
    let mut phi = Vec::with_capacity(d);
    for p in 0..d {
        let pp = p as i64;
        let num = kappa + CQ::new(q(pp * (pp + 1), 2), Q::zero());
        let den = kappa + CQ::new(q((pp + 2) * (pp + 3), 2), Q::zero());
        let bp = -(num / den);
        let mut f = lift(&leg[p + 2]);
        for c in f.iter_mut() {
            *c = &*c * &bp;
        }
        for (i, c) in leg[p].iter().enumerate() {
            f[i] = &f[i] + CQ::new(c.clone(), Q::zero());
        }
        b.push(bp);
        phi.push(f);
    }
    let mut s = vec![vec![CQ::zero(); d]; d];
    let mut m = vec![vec![CQ::zero(); d]; d];
    for j in 0..d {
        for k in 0..d {
            s[j][k] = -integrate(&poly_mul(&phi[j], &poly_d2(&phi[k])));
            m[j][k] = integrate(&poly_mul(&phi[j], &phi[k]));
        }
    }
    (s, m, b)
}

pub fn to_dense_c64(a: &[Vec<CQ>]) -> Vec<Vec<C64>> {
    a.iter().map(|r| r.iter().map(to_c64).collect()).collect()
}

/// Taylor coefficients of `(1 - z)^{1/2}` (BDF1) or `((1 - z)/(1 + z))^{1/2}`
/// (TR), exact.
pub fn cq_series(method: OneStep, n: usize) -> Vec<f64> {
    let binom = |e: Q, n: usize| -> Vec<Q> {
        let mut c = vec![Q::one()];
        for k in 1..=n {
            let prev = c[k - 1].clone();
            c.push(prev * (&e - Q::from_integer(BigInt::from(k as i64 - 1))) / Q::from_integer(BigInt::from(k as i64)));
        }
        c
    };
    let a: Vec<Q> = binom(q(1, 2), n).into_iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { c }).collect();
    match method {
        OneStep::Bdf1 => a.iter().map(|c| c.to_f64().unwrap()).collect(),
        OneStep::Tr => {
            let inv = binom(q(-1, 2), n);
            (0..=n)
                .map(|k| (0..=k).fold(Q::zero(), |s, i| s + &a[i] * &inv[k - i]).to_f64().unwrap())
                .collect()
        }
    }
}

pub fn dense_solve(a: &[Vec<C64>], b: &[C64]) -> Vec<C64> {
    let n = b.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let rhs = DVector::from_column_slice(b);
    m.lu().solve(&rhs).expect("dense oracle: singular").iter().copied().collect()
}

/// Plain three-term recurrence.
pub fn legendre_values(n: usize, y: f64) -> Vec<f64> {
    let mut v = vec![1.0, y];
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * y * v[k as usize] - k * v[k as usize - 1]) / (k + 1.0);
        v.push(next);
    }
    v.truncate(n + 1);
    v
}

pub fn series_at(c: &[C64], y: f64) -> C64 {
    let l = legendre_values(c.len() - 1, y);
    c.iter().zip(&l).map(|(a, b)| a * b).sum()
}

pub fn rel_diff(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// Deterministic complex samples in `[-1, 1]^2`.
pub fn random_vec(rng: &mut impl rand::Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// Dense oracle for `-alpha^{-2} u'' + u = f` with `(d - kappa) u(-1) = g_minus`
/// and `(d + kappa) u(1) = g_plus`, posed on the Legendre coefficients of `u`.
///
/// The Galerkin condition says the weighted residual `gamma_k r_k` lies in the
/// span of the two Robin functionals, so the unknowns are `u` plus two
/// multipliers. No adapted basis is involved.
pub fn dense_robin(alpha: C64, kappa: C64, f: &[C64], g_minus: C64, g_plus: C64) -> Vec<C64> {
    let n = f.len() - 1;
    let dim = n + 3;
    let zero = C64::new(0.0, 0.0);
    let mut a = DMatrix::from_element(dim, dim, zero);
    let mut rhs = DVector::from_element(dim, zero);
    let inv_a2 = (alpha * alpha).inv();
    // L_m'' = sum_{k <= m-2, m-k even} (k + 1/2)(m(m+1) - k(k+1)) L_k
    for k in 0..=n {
        let gk = 2.0 / (2.0 * k as f64 + 1.0);
        a[(k, k)] += gk;
        for m in (k + 2..=n).step_by(2) {
            let d2 = (k as f64 + 0.5) * ((m * (m + 1)) as f64 - (k * (k + 1)) as f64);
            a[(k, m)] -= gk * inv_a2 * d2;
        }
        rhs[k] = f[k] * gk;
    }
    for m in 0..=n {
        let dm = (m * (m + 1)) as f64 / 2.0;
        let (v_minus, d_minus) = if m % 2 == 0 { (1.0, -dm) } else { (-1.0, dm) };
        let c_minus = d_minus - kappa * v_minus;
        let c_plus = dm + kappa;
        a[(n + 1, m)] = c_minus;
        a[(n + 2, m)] = c_plus;
        a[(m, n + 1)] = -c_minus;
        a[(m, n + 2)] = -c_plus;
    }
    rhs[n + 1] = g_minus;
    rhs[n + 2] = g_plus;
    let x = a.lu().solve(&rhs).expect("dense robin oracle: singular");
    x.iter().take(n + 1).copied().collect()
}

/// LGL nodal differentiation matrix built from the classical closed form.
pub fn lgl_diff_matrix(nodes: &[f64]) -> Vec<Vec<f64>> {
    let n = nodes.len() - 1;
    let ln: Vec<f64> = nodes.iter().map(|&y| legendre_values(n, y)[n]).collect();
    let nn = (n * (n + 1)) as f64 / 4.0;
    (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    if i != j {
                        ln[i] / (ln[j] * (nodes[i] - nodes[j]))
                    } else if i == 0 {
                        -nn
                    } else if i == n {
                        nn
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

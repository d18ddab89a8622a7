use crate::error::{invalid, Result};
use crate::C64;

/// `L_0(y) .. L_n(y)` by the three-term recurrence.
pub fn legendre_eval_all(n: usize, y: f64) -> Result<Vec<f64>> {
    if !(y.abs() <= 1.0) {
        return invalid(format!("legendre_eval_all: |y| = {} exceeds 1", y.abs()));
    }
    Ok(legendre_unchecked(n, y))
}

pub(crate) fn legendre_unchecked(n: usize, y: f64) -> Vec<f64> {
    let mut l = vec![0.0; n + 1];
    l[0] = 1.0;
    if n >= 1 {
        l[1] = y;
    }
    for k in 1..n {
        let kf = k as f64;
        l[k + 1] = ((2.0 * kf + 1.0) * y * l[k] - kf * l[k - 1]) / (kf + 1.0);
    }
    if y == 1.0 {
        l.iter_mut().for_each(|v| *v = 1.0);
    } else if y == -1.0 {
        for (k, v) in l.iter_mut().enumerate() {
            *v = if k % 2 == 0 { 1.0 } else { -1.0 };
        }
    }
    l
}

/// Evaluates `sum_k c_k L_k(y)` with Clenshaw's algorithm.
pub fn eval_legendre_series(c: &[C64], y: f64) -> C64 {
    let n = c.len();
    if n == 0 {
        return C64::new(0.0, 0.0);
    }
    let mut b1 = C64::new(0.0, 0.0);
    let mut b2 = C64::new(0.0, 0.0);
    for k in (1..n).rev() {
        let kf = k as f64;
        let alpha = (2.0 * kf + 1.0) / (kf + 1.0) * y;
        let beta = (kf + 1.0) / (kf + 2.0);
        let b0 = c[k] + b1 * alpha - b2 * beta;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * y - b2 * 0.5
}

/// Legendre coefficients of the first derivative, via the descending
/// recurrence `a'_{p-1} = (2p-1) (a_p + a'_{p+1} / (2p+3))`.
pub fn d1_legendre_coeffs(a: &[C64]) -> Vec<C64> {
    let len = a.len();
    let mut d = vec![C64::new(0.0, 0.0); len];
    if len < 2 {
        return d;
    }
    for p in (1..len).rev() {
        let next = if p + 1 < len { d[p + 1] } else { C64::new(0.0, 0.0) };
        let pf = p as f64;
        d[p - 1] = (a[p] + next / (2.0 * pf + 3.0)) * (2.0 * pf - 1.0);
    }
    d
}

pub fn d2_legendre_coeffs(a: &[C64]) -> Vec<C64> {
    d1_legendre_coeffs(&d1_legendre_coeffs(a))
}

/// Endpoint values and first derivatives of a Legendre series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Traces {
    pub value_minus: C64,
    pub value_plus: C64,
    pub deriv_minus: C64,
    pub deriv_plus: C64,
}

pub fn boundary_traces(u: &[C64]) -> Traces {
    let zero = C64::new(0.0, 0.0);
    let mut t = Traces { value_minus: zero, value_plus: zero, deriv_minus: zero, deriv_plus: zero };
    for (n, &c) in u.iter().enumerate() {
        let dn = (n * (n + 1)) as f64 / 2.0;
        t.value_plus += c;
        t.deriv_plus += c * dn;
        if n % 2 == 0 {
            t.value_minus += c;
            t.deriv_minus -= c * dn;
        } else {
            t.value_minus -= c;
            t.deriv_minus += c * dn;
        }
    }
    t
}

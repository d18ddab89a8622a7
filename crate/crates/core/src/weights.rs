//! Convolution-quadrature weights, diagonal Padé approximants of `sqrt(z)`
//! and the scaled parameters used by the effectively local scheme.

use crate::error::{invalid, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OneStep {
    Bdf1,
    Tr,
}

impl OneStep {
    /// `rho = 1/dt` (BDF1) or `2/dt` (TR).
    pub fn rho(self, dt: f64) -> f64 {
        match self {
            OneStep::Bdf1 => 1.0 / dt,
            OneStep::Tr => 2.0 / dt,
        }
    }
}

/// Weights of `sqrt(delta(zeta))` up to a factor `sqrt(rho)`:
/// `(1 - zeta)^(1/2)` for BDF1 and `((1 - zeta)/(1 + zeta))^(1/2)` for TR.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub method: OneStep,
    pub omega: Vec<f64>,
}

pub fn cq_weights(method: OneStep, n: usize) -> WeightTable {
    let mut t = WeightTable { method, omega: vec![1.0] };
    t.extend_to(n);
    t
}

impl WeightTable {
    pub fn len(&self) -> usize {
        self.omega.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grows the table so that `omega[n]` exists.
    pub fn extend_to(&mut self, n: usize) {
        while self.omega.len() <= n {
            let j = self.omega.len();
            let next = match self.method {
                OneStep::Bdf1 => (j as f64 - 1.5) / j as f64 * self.omega[j - 1],
                OneStep::Tr => {
                    if j == 1 {
                        -1.0
                    } else {
                        let jm = (j - 1) as f64;
                        ((jm - 1.0) * self.omega[j - 2] - self.omega[j - 1]) / (jm + 1.0)
                    }
                }
            };
            self.omega.push(next);
        }
    }

    pub fn get(&self, j: usize) -> f64 {
        self.omega[j]
    }
}

/// `R_M(z) = b_0 - sum_k b_k / (z + eta_k^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeApprox {
    pub m: usize,
    pub b0: f64,
    pub bk: Vec<f64>,
    pub etak: Vec<f64>,
}

pub fn pade(m: usize) -> Result<PadeApprox> {
    if m < 1 {
        return invalid("pade: order M must be at least 1");
    }
    let den = (2 * m + 1) as f64;
    let etak: Vec<f64> = (1..=m).map(|k| (k as f64 * std::f64::consts::PI / den).tan()).collect();
    let bk = etak.iter().map(|&e| 2.0 * e * e * (1.0 + e * e) / den).collect();
    Ok(PadeApprox { m, b0: den, bk, etak })
}

/// Evaluated as `1 + (z - 1) sum_k c_k / (z + eta_k^2)` with
/// `c_k = b_k / (1 + eta_k^2)`, which equals the pole form because
/// `b_0 - sum_k c_k = 1` for this family; the direct form loses about
/// `M^4` ulps near `z = 1`.
pub fn pade_eval(p: &PadeApprox, z: C64) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for (&b, &e) in p.bk.iter().zip(&p.etak) {
        let d = z + e * e;
        if d.norm() <= 1e-14 * (1.0 + e * e) {
            return invalid(format!("pade_eval: z = {z} is a pole"));
        }
        acc += b / (1.0 + e * e) / d;
    }
    Ok(1.0 + (z - 1.0) * acc)
}

/// Padé data scaled by `rho`; `d = 1 + eta_bar^2`, `c = (1 - eta_bar^2)/d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NpParams {
    pub m: usize,
    pub rho: f64,
    pub eta_bar: Vec<f64>,
    pub b_bar0: f64,
    pub b_bar: Vec<f64>,
    pub gamma: Vec<f64>,
    pub varpi: f64,
    pub d: Vec<f64>,
    pub c: Vec<f64>,
}

pub fn np_params(m: usize, rho: f64) -> Result<NpParams> {
    if !(rho > 0.0) {
        return invalid("np_params: rho must be positive");
    }
    let p = pade(m)?;
    let sr = rho.sqrt();
    let eta_bar: Vec<f64> = p.etak.iter().map(|e| e / sr).collect();
    let b_bar: Vec<f64> = p.bk.iter().map(|b| b / sr).collect();
    let d: Vec<f64> = eta_bar.iter().map(|e| 1.0 + e * e).collect();
    let c = eta_bar.iter().zip(&d).map(|(e, d)| (1.0 - e * e) / d).collect();
    let gamma: Vec<f64> = b_bar.iter().zip(&d).map(|(b, d)| -b / d).collect();
    let b_bar0 = p.b0 / sr;
    let varpi = b_bar0 + gamma.iter().sum::<f64>() / rho;
    Ok(NpParams { m, rho, eta_bar, b_bar0, b_bar, gamma, varpi, d, c })
}

impl NpParams {
    /// `sum_k Gamma_k`.
    pub fn gamma_sum(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

/// Taylor coefficients of `sqrt(delta(zeta)/dt + eta^2)`.
pub fn shifted_cq_weights(method: OneStep, eta: f64, dt: f64, n: usize) -> Vec<f64> {
    let e2 = eta * eta;
    // sqrt(a) * sqrt(1 - q zeta)
    let (a, q) = match method {
        OneStep::Bdf1 => (1.0 / dt + e2, (1.0 / dt) / (1.0 / dt + e2)),
        OneStep::Tr => ((2.0 + e2 * dt) / dt, (2.0 - e2 * dt) / (2.0 + e2 * dt)),
    };
    let mut lin = Vec::with_capacity(n + 1);
    let mut cur = a.sqrt();
    lin.push(cur);
    for k in 1..=n {
        cur *= (k as f64 - 1.5) / k as f64 * q;
        lin.push(cur);
    }
    match method {
        OneStep::Bdf1 => lin,
        OneStep::Tr => {
            // times (1 + zeta)^(-1/2)
            let mut inv = Vec::with_capacity(n + 1);
            let mut c = 1.0;
            inv.push(c);
            for k in 1..=n {
                c *= -(k as f64 - 0.5) / k as f64;
                inv.push(c);
            }
            (0..=n).map(|k| (0..=k).map(|i| lin[i] * inv[k - i]).sum()).collect()
        }
    }
}

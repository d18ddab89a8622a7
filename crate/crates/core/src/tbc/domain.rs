use crate::error::{invalid, Result};
use crate::weights::OneStep;
use crate::C64;

/// Affine map `x_k = J_k y_k + xbar_k` from `[-1,1]^2` onto the rectangle,
/// together with the time-step dependent `rho` and `alpha_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainMap {
    pub x_l: f64,
    pub x_r: f64,
    pub x_b: f64,
    pub x_t: f64,
    pub j1: f64,
    pub j2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub dt: f64,
    pub rho: f64,
    pub alpha1: C64,
    pub alpha2: C64,
}

impl DomainMap {
    pub fn new(rect: [f64; 4], dt: f64, method: OneStep) -> Result<Self> {
        let [x_l, x_r, x_b, x_t] = rect;
        if !(x_l < x_r && x_b < x_t) || rect.iter().any(|v| !v.is_finite()) {
            return invalid(format!("invalid domain {rect:?}"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("invalid time step {dt}"));
        }
        let j1 = 0.5 * (x_r - x_l);
        let j2 = 0.5 * (x_t - x_b);
        let rho = method.rho(dt);
        let phase = C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        Ok(Self {
            x_l,
            x_r,
            x_b,
            x_t,
            j1,
            j2,
            beta1: 1.0 / (j1 * j1),
            beta2: 1.0 / (j2 * j2),
            dt,
            rho,
            alpha1: phase * (rho * j1 * j1).sqrt(),
            alpha2: phase * (rho * j2 * j2).sqrt(),
        })
    }

    pub fn rect(&self) -> [f64; 4] {
        [self.x_l, self.x_r, self.x_b, self.x_t]
    }

    pub fn x1(&self, y1: f64) -> f64 {
        self.j1 * y1 + 0.5 * (self.x_r + self.x_l)
    }

    pub fn x2(&self, y2: f64) -> f64 {
        self.j2 * y2 + 0.5 * (self.x_t + self.x_b)
    }
}

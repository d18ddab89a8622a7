//! Two-dimensional time marching: interior Galerkin solve plus the boundary
//! schemes (CQ, NP, and CP for boundary-map tests only).

pub mod cp;
pub mod cq;
pub mod domain;
pub mod geometry;
pub mod interior;
pub mod lifting;
pub mod np;

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{invalid, Result, TbcError};
use crate::spectral::LegendreTransform;
use crate::weights::OneStep;
use crate::C64;

pub use cp::CpState;
pub use cq::CqState;
pub use domain::DomainMap;
pub use geometry::{BoundaryTrace, Corner, Segment, CORNERS, SEGMENTS};
pub use interior::{assemble_interior_rhs, assemble_system_2d, solve_interior, BoundaryResidual, Histories, InteriorSolver};
pub use lifting::{lift_2d, Lifting2D};
pub use np::NpState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    CqBdf1,
    CqTr,
    NpBdf1,
    NpTr,
}

impl Scheme {
    pub fn method(self) -> OneStep {
        match self {
            Scheme::CqBdf1 | Scheme::NpBdf1 => OneStep::Bdf1,
            Scheme::CqTr | Scheme::NpTr => OneStep::Tr,
        }
    }

    pub fn is_np(self) -> bool {
        matches!(self, Scheme::NpBdf1 | Scheme::NpTr)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::CqBdf1 => "cq-bdf1",
            Scheme::CqTr => "cq-tr",
            Scheme::NpBdf1 => "np-bdf1",
            Scheme::NpTr => "np-tr",
        })
    }
}

impl FromStr for Scheme {
    type Err = TbcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cq-bdf1" => Ok(Scheme::CqBdf1),
            "cq-tr" => Ok(Scheme::CqTr),
            "np-bdf1" => Ok(Scheme::NpBdf1),
            "np-tr" => Ok(Scheme::NpTr),
            _ => invalid(format!("unknown scheme '{s}'")),
        }
    }
}

/// History multiply-adds, split by where they happen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkCounters {
    pub segment_ops: u64,
    pub corner_ops: u64,
}

#[derive(Debug, Clone)]
pub enum BoundaryScheme {
    Cq(CqState),
    Np(NpState),
}

impl BoundaryScheme {
    pub fn prepare(&mut self, current: &BoundaryTrace, counters: &mut WorkCounters) -> Result<Histories> {
        match self {
            BoundaryScheme::Cq(s) => s.prepare(counters),
            BoundaryScheme::Np(s) => s.prepare(current, counters),
        }
    }

    pub fn finish(&mut self, next: &BoundaryTrace) {
        match self {
            BoundaryScheme::Cq(s) => s.finish(next),
            BoundaryScheme::Np(s) => s.finish(next),
        }
    }

    /// Complex numbers held in auxiliary storage.
    pub fn storage(&self) -> usize {
        match self {
            BoundaryScheme::Cq(s) => s.storage(),
            BoundaryScheme::Np(s) => s.storage(),
        }
    }

    pub fn symmetry_defect(&self) -> f64 {
        match self {
            BoundaryScheme::Cq(_) => 0.0,
            BoundaryScheme::Np(s) => s.symmetry_defect,
        }
    }
}

/// Outward physical normal derivative implied by the discrete Robin
/// relation `d_n u = -kappa u - alpha B` on each segment.
pub fn robin_neumann(domain: &DomainMap, kappa: [C64; 2], field: &BoundaryTrace, h: &Histories) -> [Vec<C64>; 4] {
    SEGMENTS.map(|s| {
        let (k, a, jac) = if s.is_vertical() {
            (kappa[0], domain.alpha1, domain.j1)
        } else {
            (kappa[1], domain.alpha2, domain.j2)
        };
        field.get(s).iter().zip(h.get(s)).map(|(&u, &b)| (-k * u - a * b) / jac).collect()
    })
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub scheme: Scheme,
    pub domain: DomainMap,
    pub n1: usize,
    pub n2: usize,
    pub t1: LegendreTransform,
    pub t2: LegendreTransform,
    /// Legendre coefficients of `u^j`.
    pub u: Array2<C64>,
    /// Field returned by the last interior solve (`u^j` for BDF1, the
    /// staggered `v^j` for TR).
    pub solved: Array2<C64>,
    pub last_histories: Histories,
    pub interior: InteriorSolver,
    pub boundary: BoundaryScheme,
    pub counters: WorkCounters,
    pub last_step: WorkCounters,
    pub support_warning: Option<String>,
    pub j: usize,
}

/// Samples `u0` on the LGL tensor grid and transforms it.
pub fn init_solver<F>(
    scheme: Scheme,
    rect: [f64; 4],
    n1: usize,
    n2: usize,
    dt: f64,
    m: Option<usize>,
    u0: F,
) -> Result<SolverState>
where
    F: Fn(f64, f64) -> C64,
{
    if n1 < 2 || n2 < 2 {
        return invalid("grid order must be at least 2");
    }
    let domain = DomainMap::new(rect, dt, scheme.method())?;
    let t1 = LegendreTransform::new(n1)?;
    let t2 = LegendreTransform::new(n2)?;
    let samples = Array2::from_shape_fn((n1 + 1, n2 + 1), |(i, k)| {
        u0(domain.x1(t1.grid.nodes[i]), domain.x2(t2.grid.nodes[k]))
    });
    let mut interior_max: f64 = 0.0;
    let mut boundary_max: f64 = 0.0;
    for ((i, k), v) in samples.indexed_iter() {
        let a = v.norm();
        interior_max = interior_max.max(a);
        if i == 0 || k == 0 || i == n1 || k == n2 {
            boundary_max = boundary_max.max(a);
        }
    }
    let support_warning = (boundary_max > 1e-10 * interior_max).then(|| {
        format!("initial datum is not negligible on the boundary (max {boundary_max:.3e} vs {interior_max:.3e})")
    });
    let u = LegendreTransform::forward_2d(&t1, &t2, &samples);
    let trace = BoundaryTrace::from_field(&u);
    let (interior, boundary) = if scheme.is_np() {
        let m = match m {
            Some(m) if m >= 1 => m,
            _ => return invalid("NP schemes need a Padé order M >= 1"),
        };
        let np = NpState::new(scheme.method(), m, &domain, n1, n2)?;
        let k1 = domain.alpha1 * np.params.varpi;
        let k2 = domain.alpha2 * np.params.varpi;
        (InteriorSolver::new(n1, n2, domain.alpha1, domain.alpha2, k1, k2)?, BoundaryScheme::Np(np))
    } else {
        let cq = CqState::new(scheme.method(), &domain, n1, n2, &trace)?;
        (
            InteriorSolver::new(n1, n2, domain.alpha1, domain.alpha2, domain.alpha1, domain.alpha2)?,
            BoundaryScheme::Cq(cq),
        )
    };
    let zeros = Array2::zeros((n1 + 1, n2 + 1));
    Ok(SolverState {
        scheme,
        domain,
        n1,
        n2,
        t1,
        t2,
        solved: if scheme.method() == OneStep::Tr { zeros } else { u.clone() },
        u,
        last_histories: Histories::zeros(n1, n2),
        interior,
        boundary,
        counters: WorkCounters::default(),
        last_step: WorkCounters::default(),
        support_warning,
        j: 0,
    })
}

impl SolverState {
    pub fn time(&self) -> f64 {
        self.j as f64 * self.domain.dt
    }

    pub fn advance(&mut self) -> Result<()> {
        let current = BoundaryTrace::from_field(&self.u);
        let mut step = WorkCounters::default();
        let hist = self.boundary.prepare(&current, &mut step)?;
        let solved = self.interior.solve(&self.u, &hist)?;
        let next = if self.scheme.method() == OneStep::Tr { &solved * C64::new(2.0, 0.0) - &self.u } else { solved.clone() };
        if next.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(TbcError::Instability { step: self.j + 1, detail: "non-finite coefficients".into() });
        }
        self.boundary.finish(&BoundaryTrace::from_field(&next));
        self.counters.segment_ops += step.segment_ops;
        self.counters.corner_ops += step.corner_ops;
        self.last_step = step;
        self.last_histories = hist;
        self.solved = solved;
        self.u = next;
        self.j += 1;
        Ok(())
    }

    /// Robin and corner residuals of the last interior solve.
    pub fn boundary_residual(&self) -> BoundaryResidual {
        self.interior.residual(&self.solved, &self.last_histories)
    }

    /// Outward normal derivative at the segment nodes, from the last solve.
    pub fn boundary_neumann(&self) -> Result<[Vec<C64>; 4]> {
        let field = BoundaryTrace::from_field(&self.solved);
        let coeffs =
            robin_neumann(&self.domain, [self.interior.kappa1(), self.interior.kappa2()], &field, &self.last_histories);
        let mut out: [Vec<C64>; 4] = Default::default();
        for s in SEGMENTS {
            let t = if s.is_vertical() { &self.t2 } else { &self.t1 };
            out[s.index()] = t.inverse(&coeffs[s.index()])?;
        }
        Ok(out)
    }

    /// Physical `L2` norm via Parseval on the Legendre coefficients.
    pub fn l2_norm(&self) -> f64 {
        coefficient_l2(&self.u, self.domain.j1 * self.domain.j2)
    }

    pub fn samples(&self) -> Array2<C64> {
        LegendreTransform::inverse_2d(&self.t1, &self.t2, &self.u)
    }
}

/// `sqrt(jac * sum gamma_p1 gamma_p2 |U|^2)`.
pub fn coefficient_l2(u: &Array2<C64>, jac: f64) -> f64 {
    let mut s = 0.0;
    for ((p1, p2), v) in u.indexed_iter() {
        s += v.norm_sqr() * 4.0 / ((2 * p1 + 1) * (2 * p2 + 1)) as f64;
    }
    (jac * s).sqrt()
}

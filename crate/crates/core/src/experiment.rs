//! Drivers for the three numerical experiments: boundary-map accuracy with
//! exact Dirichlet data, full evolution, and temporal convergence.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{invalid, Result, TbcError};
use crate::exact::ExactProfile;
use crate::spectral::LegendreTransform;
use crate::tbc::{
    coefficient_l2, init_solver, robin_neumann, BoundaryScheme, BoundaryTrace, CpState, CqState, DomainMap, NpState,
    Scheme, Segment, WorkCounters, SEGMENTS,
};
use crate::weights::OneStep;
use crate::C64;

/// Interior schemes plus the CP boundary operator, which exists only for
/// map tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeChoice {
    Interior(Scheme),
    Cp(OneStep),
}

impl SchemeChoice {
    pub fn method(self) -> OneStep {
        match self {
            SchemeChoice::Interior(s) => s.method(),
            SchemeChoice::Cp(m) => m,
        }
    }

    pub fn needs_order(self) -> bool {
        !matches!(self, SchemeChoice::Interior(Scheme::CqBdf1 | Scheme::CqTr))
    }
}

impl FromStr for SchemeChoice {
    type Err = TbcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cp-bdf1" => Ok(SchemeChoice::Cp(OneStep::Bdf1)),
            "cp-tr" => Ok(SchemeChoice::Cp(OneStep::Tr)),
            other => other.parse().map(SchemeChoice::Interior),
        }
    }
}

impl fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeChoice::Interior(s) => write!(f, "{s}"),
            SchemeChoice::Cp(OneStep::Bdf1) => f.write_str("cp-bdf1"),
            SchemeChoice::Cp(OneStep::Tr) => f.write_str("cp-tr"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SchemeChoice,
    /// Padé order for NP and CP.
    pub m: usize,
    pub rect: [f64; 4],
    /// Polynomial order per axis.
    pub n: usize,
    pub t_max: f64,
    pub n_t: usize,
    pub profile: ExactProfile,
    pub snapshots: Vec<f64>,
}

impl ExperimentConfig {
    pub fn dt(&self) -> f64 {
        self.t_max / (self.n_t as f64 - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_t < 2 {
            return invalid("N_t must be at least 2");
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return invalid("T_max must be positive");
        }
        if self.n < 2 {
            return invalid("grid order N must be at least 2");
        }
        if self.scheme.needs_order() && self.m == 0 {
            return invalid("Padé order M must be positive");
        }
        DomainMap::new(self.rect, self.dt(), self.scheme.method()).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    BoundaryDtn,
    RelativeL2,
    Energy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub metric: Metric,
}

impl ErrorSeries {
    pub fn new(metric: Metric) -> Self {
        Self { times: Vec::new(), values: Vec::new(), metric }
    }

    pub fn push(&mut self, t: f64, v: f64) {
        self.times.push(t);
        self.values.push(v);
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Boundary nodes and Jacobians for one segment.
struct SegmentGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    jac: f64,
    /// Coordinate fixed on the segment, and which axis it belongs to.
    fixed: f64,
    axis: usize,
    outward: f64,
}

fn segment_grids(domain: &DomainMap, t1: &LegendreTransform, t2: &LegendreTransform) -> [SegmentGrid; 4] {
    SEGMENTS.map(|s| {
        let (t, jac) = if s.is_vertical() { (t2, domain.j2) } else { (t1, domain.j1) };
        let nodes: Vec<f64> = t
            .grid
            .nodes
            .iter()
            .map(|&y| if s.is_vertical() { domain.x2(y) } else { domain.x1(y) })
            .collect();
        let (fixed, axis) = match s {
            Segment::R => (domain.x_r, 0),
            Segment::L => (domain.x_l, 0),
            Segment::T => (domain.x_t, 1),
            Segment::B => (domain.x_b, 1),
        };
        SegmentGrid { nodes, weights: t.grid.weights.clone(), jac, fixed, axis, outward: s.sign() }
    })
}

fn exact_trace(
    profile: &ExactProfile,
    grids: &[SegmentGrid; 4],
    t1: &LegendreTransform,
    t2: &LegendreTransform,
    t: f64,
) -> Result<BoundaryTrace> {
    let mut seg: [Vec<C64>; 4] = Default::default();
    for s in SEGMENTS {
        let g = &grids[s.index()];
        let vals = profile.value_line(g.axis, g.fixed, &g.nodes, t);
        let tr = if s.is_vertical() { t2 } else { t1 };
        seg[s.index()] = tr.forward(&vals)?;
    }
    Ok(BoundaryTrace { seg })
}

fn exact_neumann(profile: &ExactProfile, grids: &[SegmentGrid; 4], t: f64) -> [Vec<C64>; 4] {
    SEGMENTS.map(|s| {
        let g = &grids[s.index()];
        profile.derivative_line(g.axis, g.fixed, &g.nodes, t).into_iter().map(|v| v * g.outward).collect()
    })
}

/// Boundary L² norm of the exact outward normal derivative at the map-test
/// output times (TR: averaged over consecutive levels, as the maps are).
pub fn exact_flux_norms(cfg: &ExperimentConfig) -> Result<ErrorSeries> {
    cfg.validate()?;
    let method = cfg.scheme.method();
    let dt = cfg.dt();
    let domain = DomainMap::new(cfg.rect, dt, method)?;
    let t1 = LegendreTransform::new(cfg.n)?;
    let grids = segment_grids(&domain, &t1, &t1);
    let mut prev = exact_neumann(&cfg.profile, &grids, 0.0);
    let mut series = ErrorSeries::new(Metric::BoundaryDtn);
    for j in 1..cfg.n_t {
        let t = j as f64 * dt;
        let next = exact_neumann(&cfg.profile, &grids, t);
        let mut acc = 0.0;
        for (s, g) in grids.iter().enumerate() {
            for i in 0..g.nodes.len() {
                let v = if method == OneStep::Tr { 0.5 * (prev[s][i] + next[s][i]) } else { next[s][i] };
                acc += g.weights[i] * g.jac * v.norm_sqr();
            }
        }
        series.push(t, acc.sqrt());
        prev = next;
    }
    Ok(series)
}

enum MapBoundary {
    Robin(BoundaryScheme, [C64; 2]),
    Cp(CpState),
}

/// Boundary-map test: exact Dirichlet data drive the boundary scheme and the
/// resulting Neumann datum is compared with the exact one on all segments.
pub fn run_map_test(cfg: &ExperimentConfig) -> Result<ErrorSeries> {
    cfg.validate()?;
    let method = cfg.scheme.method();
    let dt = cfg.dt();
    let domain = DomainMap::new(cfg.rect, dt, method)?;
    let t1 = LegendreTransform::new(cfg.n)?;
    let t2 = t1.clone();
    let grids = segment_grids(&domain, &t1, &t2);
    let steps = cfg.n_t - 1;
    let mut current = exact_trace(&cfg.profile, &grids, &t1, &t2, 0.0)?;
    let mut boundary = match cfg.scheme {
        SchemeChoice::Interior(s) if s.is_np() => {
            let np = NpState::new(method, cfg.m, &domain, cfg.n, cfg.n)?;
            let v = np.params.varpi;
            MapBoundary::Robin(BoundaryScheme::Np(np), [domain.alpha1 * v, domain.alpha2 * v])
        }
        SchemeChoice::Interior(_) => MapBoundary::Robin(
            BoundaryScheme::Cq(CqState::new(method, &domain, cfg.n, cfg.n, &current)?),
            [domain.alpha1, domain.alpha2],
        ),
        SchemeChoice::Cp(_) => MapBoundary::Cp(CpState::new(method, cfg.m, &domain, cfg.n, cfg.n, steps)?),
    };
    let mut series = ErrorSeries::new(Metric::BoundaryDtn);
    let mut exact_prev = exact_neumann(&cfg.profile, &grids, 0.0);
    let mut counters = WorkCounters::default();
    for j in 0..steps {
        let t = (j + 1) as f64 * dt;
        let next = exact_trace(&cfg.profile, &grids, &t1, &t2, t)?;
        let coeffs = match &mut boundary {
            MapBoundary::Robin(b, kappa) => {
                let hist = b.prepare(&current, &mut counters)?;
                let field = if method == OneStep::Tr { current.average(&next) } else { next.clone() };
                let out = robin_neumann(&domain, *kappa, &field, &hist);
                b.finish(&next);
                out
            }
            MapBoundary::Cp(cp) => cp.step(&current, &next)?,
        };
        let exact_next = exact_neumann(&cfg.profile, &grids, t);
        let mut err = 0.0;
        for s in SEGMENTS {
            let g = &grids[s.index()];
            let tr = if s.is_vertical() { &t2 } else { &t1 };
            let num = tr.inverse(&coeffs[s.index()])?;
            for i in 0..num.len() {
                let ex = if method == OneStep::Tr {
                    0.5 * (exact_prev[s.index()][i] + exact_next[s.index()][i])
                } else {
                    exact_next[s.index()][i]
                };
                err += g.weights[i] * g.jac * (ex - num[i]).norm_sqr();
            }
        }
        let e = err.sqrt();
        if !e.is_finite() {
            return Err(TbcError::Instability { step: j + 1, detail: "non-finite boundary error".into() });
        }
        series.push(t, e);
        exact_prev = exact_next;
        current = next;
    }
    Ok(series)
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub error: ErrorSeries,
    /// `||u^j||^2 / ||u^0||^2` of the numerical field.
    pub energy: ErrorSeries,
    /// Exact energy content at the same times.
    pub exact_energy: ErrorSeries,
    /// `max_j ||u^j|| / ||u^0||`.
    pub max_norm_ratio: f64,
    pub snapshots: Vec<(f64, Array2<f64>)>,
    pub support_warning: Option<String>,
    /// History work of every step.
    pub step_work: Vec<WorkCounters>,
    pub storage: Vec<usize>,
    pub max_residual: (f64, f64),
    pub symmetry_defect: f64,
}

pub struct EvolutionOptions {
    /// Evaluate Robin/corner residuals every step.
    pub residuals: bool,
}

/// Threshold on the relative error above which a run is declared unstable.
pub const BLOWUP: f64 = 1e3;

pub fn run_evolution(cfg: &ExperimentConfig) -> Result<EvolutionResult> {
    run_evolution_with(cfg, &EvolutionOptions { residuals: false })
}

pub fn run_evolution_with(cfg: &ExperimentConfig, opts: &EvolutionOptions) -> Result<EvolutionResult> {
    cfg.validate()?;
    let scheme = match cfg.scheme {
        SchemeChoice::Interior(s) => s,
        SchemeChoice::Cp(_) => return invalid("CP schemes are only available for map tests"),
    };
    let dt = cfg.dt();
    let profile = &cfg.profile;
    let m = scheme.is_np().then_some(cfg.m);
    let mut state = init_solver(scheme, cfg.rect, cfg.n, cfg.n, dt, m, |x1, x2| profile.eval([x1, x2], 0.0))?;
    let xs1: Vec<f64> = state.t1.grid.nodes.iter().map(|&y| state.domain.x1(y)).collect();
    let xs2: Vec<f64> = state.t2.grid.nodes.iter().map(|&y| state.domain.x2(y)).collect();
    let w1 = state.t1.grid.weights.clone();
    let w2 = state.t2.grid.weights.clone();
    let jac = state.domain.j1 * state.domain.j2;
    let quad = |a: &Array2<C64>| -> f64 {
        let mut s = 0.0;
        for ((i, k), z) in a.indexed_iter() {
            s += w1[i] * w2[k] * z.norm_sqr();
        }
        s * jac
    };
    let exact0 = profile.eval_grid(&xs1, &xs2, 0.0);
    let mass0 = quad(&exact0);
    let norm0 = state.l2_norm();
    let mut result = EvolutionResult {
        error: ErrorSeries::new(Metric::RelativeL2),
        energy: ErrorSeries::new(Metric::Energy),
        exact_energy: ErrorSeries::new(Metric::Energy),
        max_norm_ratio: 1.0,
        snapshots: Vec::new(),
        support_warning: state.support_warning.clone(),
        step_work: Vec::new(),
        storage: Vec::new(),
        max_residual: (0.0, 0.0),
        symmetry_defect: 0.0,
    };
    let mut pending: Vec<f64> = cfg.snapshots.clone();
    pending.sort_by(f64::total_cmp);
    let mut snap = |t: f64, state: &crate::tbc::SolverState, out: &mut Vec<(f64, Array2<f64>)>| {
        while let Some(&ts) = pending.first() {
            if ts > t + 0.5 * dt {
                break;
            }
            out.push((t, state.samples().mapv(|z| z.norm())));
            pending.remove(0);
        }
    };
    snap(0.0, &state, &mut result.snapshots);
    for j in 1..cfg.n_t {
        state.advance()?;
        let t = j as f64 * dt;
        let exact = profile.eval_grid(&xs1, &xs2, t);
        let num = state.samples();
        let rel = if mass0 > 0.0 { (quad(&(&num - &exact)) / mass0).sqrt() } else { quad(&num).sqrt() };
        if !(rel <= BLOWUP) {
            return Err(TbcError::Instability { step: j, detail: format!("relative error {rel:e} at t = {t}") });
        }
        result.error.push(t, rel);
        let norm = state.l2_norm();
        if norm0 > 0.0 {
            result.max_norm_ratio = result.max_norm_ratio.max(norm / norm0);
            result.energy.push(t, (norm / norm0).powi(2));
            result.exact_energy.push(t, quad(&exact) / mass0);
        } else {
            result.energy.push(t, 0.0);
            result.exact_energy.push(t, 0.0);
        }
        result.step_work.push(state.last_step);
        result.storage.push(state.boundary.storage());
        if opts.residuals {
            let r = state.boundary_residual();
            result.max_residual.0 = result.max_residual.0.max(r.relative_segment());
            result.max_residual.1 = result.max_residual.1.max(r.relative_corner());
        }
        snap(t, &state, &mut result.snapshots);
    }
    result.symmetry_defect = state.boundary.symmetry_defect();
    debug_assert!((coefficient_l2(&state.u, jac) - state.l2_norm()).abs() < 1e-12);
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceResult {
    pub n_t: Vec<usize>,
    pub dt: Vec<f64>,
    pub max_error: Vec<f64>,
    /// Number of leading (largest-step) points before the plateau.
    pub pre_plateau: usize,
    /// Least-squares slope of `log e` against `log dt` over the pre-plateau
    /// points; `None` with fewer than three of them.
    pub slope: Option<f64>,
}

/// Successive error ratio below which halving the step no longer pays.
pub const PLATEAU_RATIO: f64 = 1.3;

pub fn fit_convergence(dt: &[f64], err: &[f64]) -> (usize, Option<f64>) {
    let mut pre = dt.len().min(1);
    for i in 1..dt.len() {
        if err[i - 1] / err[i] < PLATEAU_RATIO {
            break;
        }
        pre = i + 1;
    }
    if pre < 3 {
        return (pre, None);
    }
    let xs: Vec<f64> = dt[..pre].iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = err[..pre].iter().map(|e| e.ln()).collect();
    let n = pre as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (pre, Some(sxy / sxx))
}

/// Runs the evolution for every `N_t` (largest step first) and fits the
/// order of convergence of the maximal error.
pub fn run_convergence(cfg: &ExperimentConfig, n_t: &[usize]) -> Result<ConvergenceResult> {
    if n_t.len() < 4 {
        return invalid("convergence study needs at least four N_t values");
    }
    let mut list = n_t.to_vec();
    list.sort_unstable();
    list.dedup();
    let (lo, hi) = (list[0] as f64 - 1.0, *list.last().unwrap() as f64 - 1.0);
    if hi / lo < 8.0 - 1e-12 {
        return invalid("N_t values must span at least a factor of 8 in the time step");
    }
    let runs: Vec<Result<(f64, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = list
            .iter()
            .map(|&nt| {
                let mut c = cfg.clone();
                c.n_t = nt;
                c.snapshots.clear();
                scope.spawn(move || run_evolution(&c).map(|r| (c.dt(), r.error.max())))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("evolution worker panicked")).collect()
    });
    let mut dt = Vec::new();
    let mut max_error = Vec::new();
    for r in runs {
        let (d, e) = r?;
        dt.push(d);
        max_error.push(e);
    }
    let (pre_plateau, slope) = fit_convergence(&dt, &max_error);
    Ok(ConvergenceResult { n_t: list, dt, max_error, pre_plateau, slope })
}

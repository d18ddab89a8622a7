mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::SeedableRng;
use tbc_core::exact::{ExactProfile, DEFAULT_AMPLITUDE};
use tbc_core::spectral::LegendreTransform;
use tbc_core::tbc::*;
use tbc_core::weights::{cq_weights, OneStep};
use tbc_core::C64;

const RECT: [f64; 4] = [-10.0, 10.0, -10.0, 10.0];
const SCHEMES: [Scheme; 4] = [Scheme::CqBdf1, Scheme::CqTr, Scheme::NpBdf1, Scheme::NpTr];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_field(rng: &mut StdRng, n1: usize, n2: usize) -> Array2<C64> {
    Array2::from_shape_vec((n1 + 1, n2 + 1), random_vec(rng, (n1 + 1) * (n2 + 1))).unwrap()
}

fn gaussian(x0: f64, y0: f64) -> impl Fn(f64, f64) -> C64 {
    move |x, y| C64::new(-0.4 * ((x - x0).powi(2) + (y - y0).powi(2)), 1.5 * x).exp()
}

fn run(scheme: Scheme, n: usize, dt: f64, steps: usize, u0: impl Fn(f64, f64) -> C64) -> SolverState {
    let mut st = init_solver(scheme, RECT, n, n, dt, Some(8), u0).unwrap();
    for _ in 0..steps {
        st.advance().unwrap();
    }
    st
}

#[test]
fn domain_map_geometry() {
    let d = DomainMap::new([-4.0, 6.0, 1.0, 3.0], 0.01, OneStep::Tr).unwrap();
    assert_eq!((d.j1, d.j2), (5.0, 1.0));
    assert_eq!((d.x1(-1.0), d.x1(1.0), d.x2(-1.0), d.x2(1.0)), (-4.0, 6.0, 1.0, 3.0));
    assert_eq!(d.rho, 200.0);
    let expect = C64::from_polar(5.0 * 200f64.sqrt(), -std::f64::consts::FRAC_PI_4);
    assert!((d.alpha1 - expect).norm() < 1e-12);
    assert!((d.beta1 - 0.04).abs() < 1e-15);
    assert!(DomainMap::new([1.0, -1.0, 0.0, 1.0], 0.1, OneStep::Bdf1).is_err());
    assert!(DomainMap::new(RECT, 0.0, OneStep::Bdf1).is_err());
    assert!(DomainMap::new([0.0, f64::NAN, 0.0, 1.0], 0.1, OneStep::Bdf1).is_err());
}

#[test]
fn init_solver_examples() {
    let zero = init_solver(Scheme::NpTr, RECT, 12, 12, 0.01, Some(4), |_, _| c(0.0, 0.0)).unwrap();
    assert!(zero.u.iter().all(|v| v.norm() == 0.0));
    assert!(zero.solved.iter().all(|v| v.norm() == 0.0));
    if let BoundaryScheme::Np(np) = &zero.boundary {
        assert!(np.phi.iter().flatten().flatten().all(|v| v.norm() == 0.0));
        assert!(np.psi.iter().flatten().all(|v| v.norm() == 0.0));
    } else {
        panic!("expected NP state");
    }

    let profile = ExactProfile::by_name("cg-ia", 4.0, DEFAULT_AMPLITUDE).unwrap();
    let st = init_solver(Scheme::CqTr, RECT, 47, 47, 0.01, None, |x, y| profile.eval([x, y], 0.0)).unwrap();
    assert!(st.support_warning.is_none());
    let samples = st.samples();
    let n = 47;
    let edge = (0..=n)
        .flat_map(|i| [samples[(i, 0)], samples[(i, n)], samples[(0, i)], samples[(n, i)]])
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    assert!(edge < 1e-12, "boundary trace {edge}");

    let wide = init_solver(Scheme::CqBdf1, RECT, 16, 16, 0.01, None, |x, _| c((-x * x / 400.0).exp(), 0.0)).unwrap();
    assert!(wide.support_warning.is_some());

    assert!(init_solver(Scheme::NpBdf1, RECT, 16, 16, 0.01, None, |_, _| c(0.0, 0.0)).is_err());
    assert!(init_solver(Scheme::NpBdf1, RECT, 1, 16, 0.01, Some(4), |_, _| c(0.0, 0.0)).is_err());
}

#[test]
fn zero_data_stays_zero() {
    for scheme in SCHEMES {
        let st = run(scheme, 15, 0.02, 12, |_, _| c(0.0, 0.0));
        assert!(st.u.iter().all(|v| v.norm() == 0.0), "{scheme}");
        let neumann = st.boundary_neumann().unwrap();
        assert!(neumann.iter().flatten().all(|v| v.norm() == 0.0), "{scheme}");
    }
}

#[test]
fn advance_is_linear_in_the_initial_data() {
    let s = c(0.6, -1.1);
    for scheme in SCHEMES {
        let (f, g) = (gaussian(-1.0, 2.0), gaussian(3.0, -2.5));
        let a = run(scheme, 23, 0.05, 15, &f);
        let b = run(scheme, 23, 0.05, 15, &g);
        let ab = run(scheme, 23, 0.05, 15, |x, y| f(x, y) + s * g(x, y));
        let sum = &a.u + &(&b.u * s);
        let err = coefficient_l2(&(&ab.u - &sum), 1.0) / coefficient_l2(&sum, 1.0);
        assert!(err < 1e-11, "{scheme}: {err}");
    }
}

#[test]
fn np_tr_tracks_the_exact_packet() {
    let profile = ExactProfile::by_name("cg-ia", 4.0, DEFAULT_AMPLITUDE).unwrap();
    let (n, dt) = (64, 2e-3);
    let mut st = init_solver(Scheme::NpTr, RECT, n, n, dt, Some(20), |x, y| profile.eval([x, y], 0.0)).unwrap();
    let xs1: Vec<f64> = st.t1.grid.nodes.iter().map(|&y| st.domain.x1(y)).collect();
    let xs2: Vec<f64> = st.t2.grid.nodes.iter().map(|&y| st.domain.x2(y)).collect();
    let jac = st.domain.j1 * st.domain.j2;
    let norm0 = coefficient_l2(&st.u, jac);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        st.advance().unwrap();
        let exact = LegendreTransform::forward_2d(&st.t1, &st.t2, &profile.eval_grid(&xs1, &xs2, st.time()));
        worst = worst.max(coefficient_l2(&(&st.u - &exact), jac) / norm0);
    }
    assert!(worst < 1e-2, "relative error {worst}");
    assert!((st.time() - 0.1).abs() < 1e-12);
}

#[test]
fn first_cq_sweep_matches_dense_solves() {
    let mut rng = StdRng::seed_from_u64(31);
    let (n1, n2) = (10, 13);
    let domain = DomainMap::new([-3.0, 5.0, -2.0, 2.0], 0.01, OneStep::Bdf1).unwrap();
    let u0 = BoundaryTrace::from_field(&random_field(&mut rng, n1, n2));
    let mut cq = CqState::new(OneStep::Bdf1, &domain, n1, n2, &u0).unwrap();
    let h = cq.prepare(&mut WorkCounters::default()).unwrap();
    let w1 = cq_weights(OneStep::Bdf1, 1).get(1);
    assert_eq!(w1, -0.5);
    for s in SEGMENTS {
        let alpha = if s.is_vertical() { domain.alpha2 } else { domain.alpha1 };
        let (cm, cp) = s.end_corners();
        let (bm, bp) = (w1 * u0.corner(cm), w1 * u0.corner(cp));
        let line = dense_robin(alpha, alpha, u0.get(s), alpha * bm, -alpha * bp);
        let expect: Vec<C64> = line.iter().map(|v| v * w1).collect();
        assert!(rel_diff(h.get(s), &expect) < 1e-11, "{s:?}");
    }
    // the first corner history is w1^2 phi(0, 0)
    for corner in CORNERS {
        assert!((h.corner(corner) - w1 * w1 * u0.corner(corner)).norm() < 1e-14);
    }
}

#[test]
fn cq_corner_histories_match_double_sum() {
    let mut rng = StdRng::seed_from_u64(5);
    let (n1, n2) = (8, 8);
    let domain = DomainMap::new(RECT, 0.05, OneStep::Bdf1).unwrap();
    let u0 = BoundaryTrace::from_field(&random_field(&mut rng, n1, n2));
    let mut cq = CqState::new(OneStep::Bdf1, &domain, n1, n2, &u0).unwrap();
    for _ in 0..3 {
        cq.prepare(&mut WorkCounters::default()).unwrap();
        cq.finish(&BoundaryTrace::from_field(&random_field(&mut rng, n1, n2)));
    }
    let h = cq.prepare(&mut WorkCounters::default()).unwrap();
    let w = cq_weights(OneStep::Bdf1, 4);
    for corner in CORNERS {
        let phi = &cq.corner[corner.index()];
        let mut sum = c(0.0, 0.0);
        for k in 1..=4 {
            for l in 1..=4 {
                sum += w.get(k) * w.get(l) * phi[4 - k][4 - l];
            }
        }
        assert!((h.corner(corner) - sum).norm() <= 1e-14 * sum.norm().max(1.0), "{corner:?}");
    }
}

#[test]
fn np_advance_matches_dense_solves() {
    let mut rng = StdRng::seed_from_u64(77);
    let (n1, n2, m) = (9, 12, 3);
    let domain = DomainMap::new([-4.0, 4.0, -6.0, 6.0], 0.02, OneStep::Bdf1).unwrap();
    let mut np = NpState::new(OneStep::Bdf1, m, &domain, n1, n2).unwrap();
    for s in SEGMENTS {
        let len = if s.is_vertical() { n2 + 1 } else { n1 + 1 };
        np.phi[s.index()] = (0..m).map(|_| random_vec(&mut rng, len)).collect();
    }
    for corner in CORNERS {
        np.psi[corner.index()] = random_vec(&mut rng, m * m);
    }
    let (phi, psi, p) = (np.phi.clone(), np.psi.clone(), np.params.clone());
    let h = np.prepare(&BoundaryTrace::zeros(n1, n2), &mut WorkCounters::default()).unwrap();
    let g = &p.gamma;
    // the vertical segment owns the first psi index, the horizontal one the second
    let psi_hist = |corner: Corner, vertical: bool, k: usize| -> C64 {
        let block = &psi[corner.index()];
        (0..m).map(|l| g[l] * if vertical { block[k * m + l] } else { block[l * m + k] }).sum()
    };
    for s in SEGMENTS {
        let alpha = if s.is_vertical() { domain.alpha2 } else { domain.alpha1 };
        let kappa = alpha * p.varpi;
        let (cm, cp) = s.end_corners();
        let mut expect = vec![c(0.0, 0.0); phi[s.index()][0].len()];
        for k in 0..m {
            let (bm, bp) = (psi_hist(cm, s.is_vertical(), k), psi_hist(cp, s.is_vertical(), k));
            let field = dense_robin(alpha, kappa, &phi[s.index()][k], alpha * bm, -alpha * bp);
            for (e, v) in expect.iter_mut().zip(field) {
                *e += v * g[k];
            }
        }
        assert!(rel_diff(h.get(s), &expect) < 1e-11, "{s:?}");
    }
    for corner in CORNERS {
        let block = &psi[corner.index()];
        let sum: C64 = (0..m).flat_map(|k| (0..m).map(move |l| (k, l))).map(|(k, l)| block[k * m + l] * g[k] * g[l]).sum();
        assert!((h.corner(corner) - sum).norm() < 1e-13 * sum.norm());
    }
}

#[test]
fn np_zero_state_advances_to_zero() {
    let domain = DomainMap::new(RECT, 0.01, OneStep::Tr).unwrap();
    let mut np = NpState::new(OneStep::Tr, 4, &domain, 10, 10).unwrap();
    let h = np.prepare(&BoundaryTrace::zeros(10, 10), &mut WorkCounters::default()).unwrap();
    assert_eq!(h, Histories::zeros(10, 10));
    np.finish(&BoundaryTrace::zeros(10, 10));
    assert!(np.phi.iter().flatten().flatten().all(|v| v.norm() == 0.0));
}

/// Dense Kronecker oracle built from exact rational 1D matrices.
fn dense_interior(n: usize, kappa: &CQ, alpha: [C64; 2], f: &Array2<C64>) -> Array2<C64> {
    let (s, m, b) = exact_system_1d(n, kappa);
    let (s, m) = (to_dense_c64(&s), to_dense_c64(&m));
    let b: Vec<C64> = b.iter().map(to_c64).collect();
    let d = n - 1;
    let gamma = |k: usize| 2.0 / (2.0 * k as f64 + 1.0);
    // (L_k, phi_p) = gamma_k [k == p] + b_p gamma_k [k == p + 2]
    let test = |k: usize, p: usize| -> C64 {
        if k == p {
            c(gamma(k), 0.0)
        } else if k == p + 2 {
            b[p] * gamma(k)
        } else {
            c(0.0, 0.0)
        }
    };
    let (ia1, ia2) = ((alpha[0] * alpha[0]).inv(), (alpha[1] * alpha[1]).inv());
    let idx = |p1: usize, p2: usize| p1 + d * p2;
    let a = DMatrix::from_fn(d * d, d * d, |i, j| {
        let (p1, p2, q1, q2) = (i % d, i / d, j % d, j / d);
        s[p1][q1] * m[p2][q2] * ia1 + m[p1][q1] * s[p2][q2] * ia2 + m[p1][q1] * m[p2][q2]
    });
    let rhs = DVector::from_fn(d * d, |i, _| {
        let (p1, p2) = (i % d, i / d);
        let mut acc = c(0.0, 0.0);
        for k1 in 0..=n {
            for k2 in 0..=n {
                acc += f[(k1, k2)] * test(k1, p1) * test(k2, p2);
            }
        }
        acc
    });
    let w = a.lu().solve(&rhs).unwrap();
    let mut u = Array2::zeros((n + 1, n + 1));
    for p1 in 0..d {
        for p2 in 0..d {
            let v = w[idx(p1, p2)];
            for (k1, c1) in [(p1, c(1.0, 0.0)), (p1 + 2, b[p1])] {
                for (k2, c2) in [(p2, c(1.0, 0.0)), (p2 + 2, b[p2])] {
                    u[(k1, k2)] += v * c1 * c2;
                }
            }
        }
    }
    u
}

#[test]
fn interior_solve_matches_dense_kronecker_system() {
    let mut rng = StdRng::seed_from_u64(2);
    let n = 8;
    let kappa = CQ::new(q(5, 2), q(-3, 2));
    let k = to_c64(&kappa);
    let alpha = [c(6.0, -6.0), c(2.5, -2.5)];
    let solver = InteriorSolver::new(n, n, alpha[0], alpha[1], k, k).unwrap();
    let f = random_field(&mut rng, n, n);
    let u = solve_interior(&solver, &f).unwrap();
    let oracle = dense_interior(n, &kappa, alpha, &f);
    let err = coefficient_l2(&(&u - &oracle), 1.0) / coefficient_l2(&oracle, 1.0);
    assert!(err < 1e-10, "{err}");
    assert!(solve_interior(&solver, &Array2::zeros((n + 1, n + 1))).unwrap().iter().all(|v| v.is_zero()));
    assert!(solve_interior(&solver, &Array2::zeros((n, n + 1))).is_err());
}

/// Histories that a smooth field `v` satisfies exactly, so segment and corner
/// data are compatible as they are for every scheme.
fn compatible_histories(solver: &InteriorSolver, v: &Array2<C64>) -> Histories {
    let (n1, n2) = (solver.n1, solver.n2);
    let mut h = Histories::zeros(n1, n2);
    let robin = |seg: Segment| -> Vec<C64> {
        let kappa = if seg.is_vertical() { solver.kappa1() } else { solver.kappa2() };
        let tr = geometry::trace(v, seg);
        geometry::normal_trace(v, seg).iter().zip(&tr).map(|(&d, &x)| d + kappa * seg.sign() * x).collect()
    };
    for seg in SEGMENTS {
        let alpha = if seg.is_vertical() { solver.alpha1 } else { solver.alpha2 };
        h.seg[seg.index()] = robin(seg).iter().map(|&x| x / (-seg.sign() * alpha)).collect();
    }
    for corner in CORNERS {
        let (a1, a2) = corner.segments();
        let g = robin(a1);
        let s2 = a2.sign();
        let k = geometry::end_derivative(&g, s2) + solver.kappa2() * s2 * geometry::end_value(&g, s2);
        h.corner[corner.index()] = k / (solver.alpha1 * solver.alpha2 * corner.sign());
    }
    h
}

#[test]
fn lifted_solution_reproduces_boundary_data() {
    let mut rng = StdRng::seed_from_u64(19);
    let (n1, n2) = (20, 15);
    let domain = DomainMap::new([-5.0, 5.0, -3.0, 4.0], 4e-3, OneStep::Tr).unwrap();
    for varpi in [1.0, 0.97] {
        let (k1, k2) = (domain.alpha1 * varpi, domain.alpha2 * varpi);
        let solver = InteriorSolver::new(n1, n2, domain.alpha1, domain.alpha2, k1, k2).unwrap();
        let mut v = random_field(&mut rng, n1, n2);
        for ((p1, p2), x) in v.indexed_iter_mut() {
            *x /= 1.0 + (p1 * p1 + p2 * p2) as f64;
        }
        let h = compatible_histories(&solver, &v);
        let src = random_field(&mut rng, n1, n2);
        let assembled = assemble_interior_rhs(&solver, &src, &Histories::zeros(n1, n2)).unwrap();
        assert_eq!(assembled, src);
        let u = solver.solve(&src, &h).unwrap();
        let r = solver.residual(&u, &h);
        assert!(r.relative_segment() < 1e-9, "segment {}", r.relative_segment());
        assert!(r.relative_corner() < 1e-9, "corner {}", r.relative_corner());
    }
}

#[test]
fn np_work_and_storage_do_not_grow() {
    let (n, m) = (15, 6);
    let mut st = init_solver(Scheme::NpBdf1, RECT, n, n, 0.02, Some(m), gaussian(0.0, 0.0)).unwrap();
    let storage0 = st.boundary.storage();
    for _ in 0..25 {
        st.advance().unwrap();
        let work = st.last_step.segment_ops + st.last_step.corner_ops;
        assert_eq!(work as usize, 4 * m * (n + 1) + 4 * m * m);
        assert_eq!(st.boundary.storage(), storage0);
    }
    let mut cq = init_solver(Scheme::CqBdf1, RECT, n, n, 0.02, None, gaussian(0.0, 0.0)).unwrap();
    let mut last = (0, cq.boundary.storage());
    for _ in 0..25 {
        cq.advance().unwrap();
        let work = cq.last_step.segment_ops + cq.last_step.corner_ops;
        assert!(work > last.0 && cq.boundary.storage() > last.1);
        last = (work, cq.boundary.storage());
    }
}

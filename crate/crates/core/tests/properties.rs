use proptest::prelude::*;

use hypch::diagnostics::{l2_relative_error, total_mass};
use hypch::exact::{elliptic_k, jacobi_sncndn, jacobi_sn};
use hypch::hyperbolic::{self, intercell_flux, Execution, FluxChoice, TimeControl};
use hypch::physics::{self, Direction, Layout, Vars};
use hypch::reference::{step_implicit, ImplicitOperator, ImplicitSolveConfig};
use hypch::{FieldState, Grid, ModelParams};

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (1e-8f64..1.0, 1.5f64..2000.0, 1e-8f64..1.0, 1e-8f64..1.0).prop_map(|(g, a, b, t)| ModelParams::new(g, a, b, t).unwrap())
}

fn vars_strategy(dim: usize) -> impl Strategy<Value = Vars> {
    let n = 3 + 2 * dim;
    (-1.05f64..1.05, prop::collection::vec(-10.0f64..10.0, n - 1)).prop_map(move |(c, rest)| {
        let mut u = [0.0; 7];
        u[0] = c;
        u[1..n].copy_from_slice(&rest);
        u
    })
}

fn smooth_state(grid: &Grid, amp: &[f64]) -> FieldState {
    let mut s = FieldState::zeros(grid);
    let l = grid.xr - grid.xl;
    for i in 0..grid.nx {
        let x = 2.0 * std::f64::consts::PI * (grid.x_center(i) - grid.xl) / l;
        let c = amp[0] * x.sin() + amp[1] * (2.0 * x).cos();
        s.c[i] = c;
        s.phi[i] = c + amp[2] * x.cos();
        s.w[i] = 1e-6 * amp[3] * x.sin();
        s.q[0][i] = 1e-4 * amp[1] * x.cos();
        s.p[0][i] = amp[2] * (3.0 * x).sin();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn intercell_flux_is_consistent(
        (dim, u) in (1usize..=2).prop_flat_map(|d| (Just(d), vars_strategy(d))),
        p in params_strategy(),
        dt in 1e-9f64..1e-3,
        h in 1e-4f64..1.0,
    ) {
        let layout = Layout::new(dim);
        for dir in [Direction::X, Direction::Y].into_iter().take(dim) {
            let exact = physics::flux(&u, dir, layout, &p);
            for choice in [FluxChoice::Rusanov, FluxChoice::Force] {
                let f = intercell_flux(&u, &u, dir, layout, &p, h, dt, 1e3, choice);
                prop_assert_eq!(f, exact);
            }
        }
    }

    #[test]
    fn energy_is_nonnegative_and_splits(u in vars_strategy(2), p in params_strategy()) {
        let layout = Layout::new(2);
        let e = physics::energy_density(&u, layout, &p);
        let (e1, e2) = physics::energy_split(&u, layout, &p);
        prop_assert!(e >= 0.0);
        prop_assert!(e1 >= 0.0 && e2 >= 0.0);
        prop_assert!((e1 + e2 - e).abs() <= 4.0 * f64::EPSILON * e.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn rest_state_has_no_flux_or_source(sign in prop::bool::ANY, dim in 1usize..=2, p in params_strategy()) {
        let layout = Layout::new(dim);
        let c = if sign { 1.0 } else { -1.0 };
        let mut u = [0.0; 7];
        u[layout.c()] = c;
        u[layout.phi()] = c;
        prop_assert!(physics::source(&u, layout, &p).iter().all(|v| *v == 0.0));
        prop_assert!(physics::flux(&u, Direction::X, layout, &p).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn uniform_state_is_a_fixed_point(c in -1.05f64..1.05, two_d in prop::bool::ANY, force in prop::bool::ANY) {
        let grid = if two_d { Grid::new_2d(0.0, 1.0, 0.0, 2.0, 6, 8).unwrap() } else { Grid::new_1d(0.0, 1.0, 12).unwrap() };
        let p = ModelParams::new(1e-3, 500.0, 1e-6, 1e-4).unwrap();
        let mut s = FieldState::zeros(&grid);
        s.c.iter_mut().for_each(|v| *v = c);
        s.phi.iter_mut().for_each(|v| *v = c);
        let ctrl = TimeControl::new(0.45, 1.0).unwrap();
        let choice = if force { FluxChoice::Force } else { FluxChoice::Rusanov };
        let (next, _) = hyperbolic::step(&s, &grid, &p, &ctrl, choice).unwrap();
        prop_assert_eq!(next.c, s.c);
        prop_assert_eq!(next.phi, s.phi);
        prop_assert!(next.w.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn jacobi_identities(x in -20.0f64..20.0, s in 0.0f64..0.999) {
        let (sn, cn, dn) = jacobi_sncndn(x, s);
        prop_assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
        prop_assert!((dn * dn + s * s * sn * sn - 1.0).abs() < 1e-12);
        let k = elliptic_k(s).unwrap();
        prop_assert!((jacobi_sn(x + 4.0 * k, s) - sn).abs() < 1e-11);
    }

    #[test]
    fn l2_relative_error_bound(
        a in prop::collection::vec(-2.0f64..2.0, 16),
        b in prop::collection::vec(-2.0f64..2.0, 16),
        c in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm(&a) > 1e-3 && norm(&b) > 1e-3);
        let ab = l2_relative_error(&a, &b).unwrap();
        let bc = l2_relative_error(&b, &c).unwrap();
        let ac = l2_relative_error(&a, &c).unwrap();
        let r = norm(&b) / norm(&a);
        prop_assert!(ac <= ab + bc * r + 1e-12);
    }

    #[test]
    fn grid_widths_cover_the_domain(xl in -5.0f64..5.0, len in 1e-3f64..10.0, n in 5usize..2000) {
        let g = Grid::new_1d(xl, xl + len, n).unwrap();
        let span = g.xr - g.xl;
        let total: f64 = (0..n).map(|_| g.dx).sum();
        prop_assert!((total - span).abs() <= n as f64 * f64::EPSILON * span);
    }

    #[test]
    fn sub_critical_penalty_is_rejected(alpha in 0.0f64..1.0) {
        prop_assert!(ModelParams::new(1e-3, alpha, 1e-6, 1e-4).is_err());
        prop_assert!(ModelParams::new(1e-3, 1.0, 1e-6, 1e-4).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hyperbolic_mass_is_conserved(amp in prop::collection::vec(-0.8f64..0.8, 4), force in prop::bool::ANY) {
        let grid = Grid::new_1d(-1.0, 1.0, 64).unwrap();
        let p = ModelParams::new(1e-3, 500.0, 1e-6, 1e-4).unwrap();
        let s = smooth_state(&grid, &amp);
        let ctrl = TimeControl::new(0.9, 2e-4).unwrap();
        let choice = if force { FluxChoice::Force } else { FluxChoice::Rusanov };
        let out = hyperbolic::run(&s, &grid, &p, &ctrl, choice, Execution::Sequential, &mut []).unwrap();
        let drift = (total_mass(&out.state.c, &grid) - total_mass(&s.c, &grid)).abs();
        prop_assert!(drift <= 1e-12 * 2.0, "drift {drift:e}");
    }

    #[test]
    fn parallel_and_sequential_agree(amp in prop::collection::vec(-0.8f64..0.8, 4)) {
        let grid = Grid::new_1d(-1.0, 1.0, 2048).unwrap();
        let p = ModelParams::new(1e-3, 500.0, 1e-6, 1e-4).unwrap();
        let s = smooth_state(&grid, &amp);
        let ctrl = TimeControl::new(0.9, 1e-5).unwrap();
        let a = hyperbolic::run(&s, &grid, &p, &ctrl, FluxChoice::Force, Execution::Sequential, &mut []).unwrap();
        let b = hyperbolic::run(&s, &grid, &p, &ctrl, FluxChoice::Force, Execution::Parallel, &mut []).unwrap();
        prop_assert_eq!(a.state, b.state);
    }

    #[test]
    fn implicit_operator_is_linear(
        cn in prop::collection::vec(-1.1f64..1.1, 40),
        u in prop::collection::vec(-1.0f64..1.0, 40),
        v in prop::collection::vec(-1.0f64..1.0, 40),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let grid = Grid::new_2d(0.0, 1.0, 0.0, 1.0, 5, 8).unwrap();
        let p = ModelParams::reference(1e-3).unwrap();
        let op = ImplicitOperator::new(&cn, &grid, &p, 1e-5);
        let mix: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let (mut ou, mut ov, mut om) = (vec![0.0; 40], vec![0.0; 40], vec![0.0; 40]);
        op.apply(&u, &mut ou);
        op.apply(&v, &mut ov);
        op.apply(&mix, &mut om);
        let scale = om.iter().chain(&ou).chain(&ov).fold(1.0f64, |m, x| m.max(x.abs()));
        for k in 0..40 {
            prop_assert!((om[k] - (a * ou[k] + b * ov[k])).abs() <= 1e-13 * scale * (a.abs() + b.abs() + 1.0));
        }
    }

    #[test]
    fn implicit_step_conserves_mass(amp in prop::collection::vec(-0.8f64..0.8, 4)) {
        let grid = Grid::new_1d(-1.0, 1.0, 64).unwrap();
        let p = ModelParams::reference(1e-3).unwrap();
        let c = smooth_state(&grid, &amp).c;
        let cfg = ImplicitSolveConfig::new(1e-5).unwrap();
        let next = step_implicit(&c, &grid, &p, &cfg).unwrap();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt() * grid.dx;
        prop_assert!((total_mass(&next, &grid) - total_mass(&c, &grid)).abs() <= 1e-9 * norm.max(1e-3));
    }

    #[test]
    fn implicit_uniform_state_is_fixed(c in -1.05f64..1.05) {
        let grid = Grid::new_2d(0.0, 1.0, 0.0, 1.0, 8, 6).unwrap();
        let p = ModelParams::reference(1e-3).unwrap();
        let cfg = ImplicitSolveConfig::new(1e-5).unwrap();
        let next = step_implicit(&vec![c; grid.len()], &grid, &p, &cfg).unwrap();
        prop_assert!(next.iter().all(|v| (v - c).abs() <= 4.0 * f64::EPSILON * c.abs().max(1.0)));
    }
}

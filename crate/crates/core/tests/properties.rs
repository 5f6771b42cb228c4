//! Property tests: linearity and symmetry of the elliptic solver, linearity
//! and boundedness of the transport field, skew convection, and lossless
//! file formats.

use nalgebra::DMatrix;
use proptest::prelude::*;

use nsf_core::basis::{ScalarField, VectorField};
use nsf_core::elliptic::NeumannSolver;
use nsf_core::galerkin::Model;
use nsf_core::grid::AuxGrid;
use nsf_core::inequalities::InequalityReport;
use nsf_core::io::{parse_scenario, parse_scenario_unchecked, serialize_scenario, FieldDump};
use nsf_core::scenario::Scenario;

const N_GRID: usize = 12;
const MODES: usize = 6;

fn grid_values() -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, (N_GRID + 1) * (N_GRID + 1))
        .prop_map(|v| DMatrix::from_vec(N_GRID + 1, N_GRID + 1, v))
}

fn field() -> impl Strategy<Value = VectorField> {
    prop::collection::vec(-1.0..1.0f64, 2 * MODES * MODES).prop_map(|v| VectorField::from_slice(MODES, &v))
}

fn compatible(grid: &AuxGrid, raw: &DMatrix<f64>) -> DMatrix<f64> {
    raw.add_scalar(-grid.mean(raw))
}

fn model() -> &'static Model {
    static M: std::sync::OnceLock<Model> = std::sync::OnceLock::new();
    M.get_or_init(|| Model::new(&Scenario::benchmark().with_modes(MODES, MODES)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn neumann_solve_is_linear(f in grid_values(), g in grid_values(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let grid = AuxGrid::new(1.0, N_GRID);
        let s = NeumannSolver::new(grid.clone());
        let (f, g) = (compatible(&grid, &f), compatible(&grid, &g));
        let pf = s.solve(&f).unwrap();
        let pg = s.solve(&g).unwrap();
        let pfg = s.solve(&(&f * a + &g * b)).unwrap();
        let scale = a.abs() * pf.norm() + b.abs() * pg.norm() + 1e-300;
        prop_assert!((pfg - (pf * a + pg * b)).norm() <= 1e-12 * scale);
    }

    #[test]
    fn neumann_solve_is_self_adjoint(f in grid_values(), g in grid_values()) {
        let grid = AuxGrid::new(1.0, N_GRID);
        let s = NeumannSolver::new(grid.clone());
        let (f, g) = (compatible(&grid, &f), compatible(&grid, &g));
        let lhs = grid.inner(&s.solve(&f).unwrap(), &g);
        let rhs = grid.inner(&f, &s.solve(&g).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (grid.l2(&f) * grid.l2(&g)));
    }

    #[test]
    fn neumann_solve_is_negative(f in grid_values()) {
        let grid = AuxGrid::new(1.0, N_GRID);
        let s = NeumannSolver::new(grid.clone());
        let f = compatible(&grid, &f);
        prop_assert!(grid.inner(&s.solve(&f).unwrap(), &f) <= 1e-14 * grid.inner(&f, &f));
    }

    #[test]
    fn transport_is_linear_and_bounded(u in field(), v in field(), a in -2.0..2.0f64) {
        let m = model();
        let len = m.scenario.length;
        let tu = m.transport(&u).unwrap();
        let tv = m.transport(&v).unwrap();
        let tw = m.transport(&u.scale(a).axpy(1.0, &v)).unwrap();
        let dx = &tw.x.coeffs - (&tu.x.coeffs * a + &tv.x.coeffs);
        let dy = &tw.y.coeffs - (&tu.y.coeffs * a + &tv.y.coeffs);
        let scale = a.abs() * tu.l2() + tv.l2() + 1e-300;
        prop_assert!(dx.norm().hypot(dy.norm()) <= 1e-11 * scale.max(tu.x.coeffs.norm()));
        prop_assert!(tu.divergence().l2() <= 1e-10 * u.l2_sq(len).sqrt());
        // cut-off, averaging and projection do not amplify the L2 norm
        prop_assert!(tu.l2() <= 1.01 * u.l2_sq(len).sqrt());
    }

    #[test]
    fn convection_is_skew(u in field(), w in field()) {
        let m = model();
        let st = m.state(0.0, u.clone(), ScalarField::zeros(MODES));
        let sw = m.state(0.0, w.clone(), ScalarField::zeros(MODES));
        let tq = m.derived(&st).unwrap().transport_q;
        let cu = m.convective_form(&st.vel, &tq);
        let cw = m.convective_form(&sw.vel, &tq);
        let c_uw = cu.x.dot(&w.x) + cu.y.dot(&w.y);
        let c_wu = cw.x.dot(&u.x) + cw.y.dot(&u.y);
        let c_uu = cu.x.dot(&u.x) + cu.y.dot(&u.y);
        let scale = (cu.x.norm().hypot(cu.y.norm())) * (w.x.norm().hypot(w.y.norm())) + 1e-300;
        prop_assert!((c_uw + c_wu).abs() <= 1e-11 * scale);
        prop_assert!(c_uu.abs() <= 1e-11 * scale.max(cu.x.norm() * u.x.norm()));
    }

    #[test]
    fn field_dump_round_trip_is_bit_exact(bits in prop::collection::vec(any::<u64>(), 2 * 3 * 4)) {
        let data: Vec<f64> = bits.iter().map(|b| f64::from_bits(*b)).collect();
        let d = FieldDump::new(3, 4, 1, 2, data).unwrap();
        let back = FieldDump::from_bytes(&d.to_bytes()).unwrap();
        let got: Vec<u64> = back.data.iter().map(|v| v.to_bits()).collect();
        prop_assert_eq!(got, bits);
    }

    #[test]
    fn scenario_round_trip(seed in any::<u64>(), k in 0.01..1.0f64, steps in 50usize..5000, n in 2usize..16) {
        let mut s = Scenario::random(seed);
        s.conductivity = k;
        s.dt = s.horizon / steps as f64;
        s.n_vel = n;
        let text = serialize_scenario(&s);
        prop_assert_eq!(parse_scenario_unchecked(&text).unwrap(), s.clone());
        let back = parse_scenario(&text).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn report_passes_iff_residual_within_tolerance(lhs in -10.0..10.0f64, rhs in -10.0..10.0f64, tol in 0.0..0.1f64) {
        let scale = lhs.abs() + rhs.abs();
        let r = InequalityReport::new("x", lhs, rhs, scale, tol, String::new());
        prop_assert_eq!(r.pass, rhs - lhs >= -tol * scale);
        prop_assert_eq!(r.residual, rhs - lhs);
    }
}

use std::f64::consts::PI;
use std::path::Path;

use proptest::prelude::*;
use tubenode::config::SimulationConfig;
use tubenode::cylinder::{build_cylinder, random_state, run_cylinder_with};
use tubenode::geometry::{PhysicalConstants, Profile};
use tubenode::node::Verdict;
use tubenode::stepper::{run_simulation, InputSignal, RunOptions};
use tubenode::webster::{poincare_ratio, WebsterSystem};

fn cone(r0: f64, r1: f64, kappa: f64) -> tubenode::geometry::TubeGeometry {
    Profile::Cone { r0, r1, kappa }.build(101).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn webster_node_verdict_follows_alpha(
        r0 in 0.005f64..0.03,
        r1 in 0.005f64..0.03,
        kappa in 0.0f64..10.0,
        alpha in prop_oneof![Just(0.0), 0.05f64..2.0],
        n in 4usize..24,
        seed in any::<u64>(),
    ) {
        let consts = PhysicalConstants::new(343.0, 1.2, alpha).unwrap();
        let node = WebsterSystem::assemble(&cone(r0, r1, kappa), consts, n).unwrap().node().unwrap();
        let report = node.passivity_check(20, seed, 1e-10);
        let expected = if alpha == 0.0 { Verdict::Conservative } else { Verdict::Passive };
        prop_assert_eq!(report.verdict, expected);
    }

    #[test]
    fn webster_ledger_closes_for_any_dt(
        r0 in 0.005f64..0.03,
        r1 in 0.005f64..0.03,
        alpha in 0.0f64..2.0,
        dt in 1e-6f64..1e-3,
        freq in 50.0f64..2000.0,
    ) {
        let consts = PhysicalConstants::new(343.0, 1.2, alpha).unwrap();
        let lin = WebsterSystem::assemble(&cone(r0, r1, 0.0), consts, 12).unwrap().linear_system();
        let opts = RunOptions { dt, t_final: 40.0 * dt, record_stride: 0 };
        let traj = run_simulation(&lin, &vec![0.0; lin.dim()], &|t| vec![(freq * t).sin()], opts).unwrap();
        prop_assert!(traj.max_relative_residual() < 1e-10);
        prop_assert!(traj.total_dissipated() >= -1e-15);
    }

    #[test]
    fn cylinder_ledger_closes(
        ns in 4usize..12,
        nr in 2usize..6,
        alpha in 0.0f64..1.0,
        g in -5.0f64..0.0,
        seed in any::<u64>(),
    ) {
        let consts = PhysicalConstants::new(343.0, 1.2, 0.0).unwrap();
        let mut sys = build_cylinder(0.01, consts, ns, nr, alpha, Some(vec![g; ns * nr])).unwrap();
        let x0 = random_state(&sys, seed, 1e-3, 1.0);
        sys.set_state(&x0).unwrap();
        let opts = RunOptions { dt: 1e-5, t_final: 2e-4, record_stride: 0 };
        let run = run_cylinder_with(&mut sys, &|t| vec![(3000.0 * t).cos(); nr], opts).unwrap();
        prop_assert!(run.max_relative_residual() < 1e-10);
        prop_assert!(run.ledger.iter().all(|l| l.p_wall >= 0.0 && l.p_interior >= 0.0));
    }

    #[test]
    fn cylinder_weights_sum_to_one(ns in 4usize..20, nr in 2usize..40, r0 in 1e-3f64..1.0) {
        let consts = PhysicalConstants::new(343.0, 1.2, 0.0).unwrap();
        let sys = build_cylinder(r0, consts, ns, nr, 0.0, None).unwrap();
        let total: f64 = sys.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn config_round_trips(
        r0 in 1e-3f64..0.1,
        r1 in 1e-3f64..0.1,
        c in 100.0f64..1000.0,
        alpha in 0.0f64..3.0,
        n_elems in 2usize..500,
        dt in 1e-7f64..1e-3,
        seed in any::<u64>(),
    ) {
        let text = format!(
            "[geometry]\nkind = cone\nr0 = {r0:?}\nr1 = {r1:?}\n[physics]\nc = {c:?}\nalpha = {alpha:?}\n\
             [discretization]\nn_elems = {n_elems}\ndt = {dt:?}\n[verify]\nseed = {seed}\n"
        );
        let cfg = SimulationConfig::parse_str(&text, Path::new("/tmp")).unwrap();
        let again = SimulationConfig::parse_str(&cfg.to_ini(), Path::new("/tmp")).unwrap();
        prop_assert_eq!(cfg, again);
    }

    #[test]
    fn gaussian_peaks_at_center(
        amplitude in -10.0f64..10.0,
        center in 0.0f64..1.0,
        width in 1e-4f64..0.1,
        offset in 1e-6f64..0.5,
    ) {
        let g = InputSignal::Gaussian { amplitude, center, width };
        prop_assert_eq!(g.eval(center), amplitude);
        prop_assert!((g.eval(center + offset) - g.eval(center - offset)).abs() <= 1e-12 * amplitude.abs());
        prop_assert!(g.eval(center + offset).abs() <= amplitude.abs());
    }

    #[test]
    fn poincare_ratio_below_sharp_constant(n in 2usize..80) {
        let r = poincare_ratio(n).unwrap();
        prop_assert!(r > 0.0 && r <= 4.0 / (PI * PI) + 1e-14);
    }
}

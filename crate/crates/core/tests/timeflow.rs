use tubenode::geometry::{PhysicalConstants, Profile};
use tubenode::stepper::MidpointStepper;
use tubenode::webster::WebsterSystem;

fn rel_gap(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let n: f64 = b.iter().map(|x| x * x).sum();
    (d / n).sqrt()
}

#[test]
fn inverse_retraces_driven_lossy_run() {
    let geom = Profile::Cone { r0: 0.01, r1: 0.02, kappa: 5.0 }.build(101).unwrap();
    let consts = PhysicalConstants::new(343.0, 1.2, 0.5).unwrap();
    let lin = WebsterSystem::assemble(&geom, consts, 60).unwrap().linear_system();
    let inverse = lin.timeflow_inverse().unwrap();

    let dt = 2e-5;
    let steps = 200;
    let u = |n: usize| vec![(2.0e3 * n as f64 * dt).sin()];
    let x0: Vec<f64> = (0..lin.dim()).map(|k| ((k * 7 % 13) as f64 - 6.0) * 1e-3).collect();

    let fwd = MidpointStepper::new(&lin, dt).unwrap();
    let mut x = x0.clone();
    let mut y = vec![lin.output_of(&x, &u(0))];
    for n in 0..steps {
        x = fwd.step(&x, n as f64 * dt, &u(n), &u(n + 1)).unwrap();
        y.push(lin.output_of(&x, &u(n + 1)));
    }

    // the inverse node, fed with y, returns u as its output
    let end = inverse.output_of(&x, &y[steps]);
    assert!((end[0] - u(steps)[0]).abs() < 1e-10);

    let back = MidpointStepper::new(&inverse, -dt).unwrap();
    for n in (0..steps).rev() {
        x = back.step(&x, (n + 1) as f64 * dt, &y[n + 1], &y[n]).unwrap();
    }
    assert!(rel_gap(&x, &x0) < 1e-8, "gap {}", rel_gap(&x, &x0));
}

#[test]
fn inverse_of_inverse_is_original() {
    let geom = Profile::Constant { r0: 0.01, kappa: 0.0 }.build(51).unwrap();
    let consts = PhysicalConstants::new(343.0, 1.2, 1.0).unwrap();
    let lin = WebsterSystem::assemble(&geom, consts, 20).unwrap().linear_system();
    let twice = lin.timeflow_inverse().unwrap().timeflow_inverse().unwrap();
    let x: Vec<f64> = (0..lin.dim()).map(|k| (k as f64).sin()).collect();
    let a = lin.output_of(&x, &[0.3]);
    let b = twice.output_of(&x, &[0.3]);
    assert!((a[0] - b[0]).abs() < 1e-12 * (1.0 + a[0].abs()));
}

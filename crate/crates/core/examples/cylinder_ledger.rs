// Axisymmetric wave equation in a cylinder with a lossy wall, driven
// through the end plane. Prints the energy balance
// `ΔE = dt (P_in − P_out − P_wall − P_interior)` at a few steps.

use tubenode::cylinder::{build_cylinder, run_cylinder, wall_power, CylinderRun};
use tubenode::error::Result;
use tubenode::geometry::PhysicalConstants;
use tubenode::stepper::{InputSignal, RunOptions};

pub fn run_example() -> Result<CylinderRun> {
    let consts = PhysicalConstants::new(343.0, 1.2, 0.0)?;
    let g = vec![-2.0; 80 * 10];
    let mut sys = build_cylinder(0.01, consts, 80, 10, 0.3, Some(g))?;
    let pulse = InputSignal::Gaussian {
        amplitude: 1.0,
        center: 4e-4,
        width: 1e-4,
    };
    let opts = RunOptions {
        dt: 1e-5,
        t_final: 6e-3,
        record_stride: 100,
    };
    let run = run_cylinder(&mut sys, &pulse, opts)?;
    println!("{:>9} {:>11} {:>11} {:>11} {:>11} {:>11} {:>9}", "t", "E", "P_in", "P_out", "P_wall", "P_int", "resid");
    for l in run.ledger.iter().step_by(50) {
        println!(
            "{:9.2e} {:11.4e} {:11.4e} {:11.4e} {:11.4e} {:11.4e} {:9.1e}",
            l.t, l.e, l.p_in, l.p_out, l.p_wall, l.p_interior, l.relative_residual
        );
    }
    println!("final wall power {:.3e}", wall_power(&sys));
    println!("max relative residual {:.2e}", run.max_relative_residual());
    Ok(run)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}

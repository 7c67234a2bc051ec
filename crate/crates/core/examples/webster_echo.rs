// A Gaussian pulse enters a straight tube through the scattering port,
// reflects at the pressure-release end and leaves again two transit times
// later. With `c = 1` the output should be `y(t) ≈ u(t − 2)`.

use tubenode::error::Result;
use tubenode::geometry::{PhysicalConstants, Profile};
use tubenode::stepper::{run_simulation, InputSignal, RunOptions};
use tubenode::webster::WebsterSystem;

pub struct EchoResult {
    pub n_elems: usize,
    pub max_error: f64,
    pub ledger_residual: f64,
}

pub fn echo(n_elems: usize, dt: f64) -> Result<EchoResult> {
    let geom = Profile::Constant { r0: 0.1, kappa: 0.0 }.build(201)?;
    let sys = WebsterSystem::assemble(&geom, PhysicalConstants::new(1.0, 1.0, 0.0)?, n_elems)?;
    let lin = sys.linear_system();
    let pulse = InputSignal::Gaussian {
        amplitude: 1.0,
        center: 0.1,
        width: 0.02,
    };
    let opts = RunOptions {
        dt,
        t_final: 2.5,
        record_stride: 0,
    };
    let traj = run_simulation(&lin, &vec![0.0; lin.dim()], &|t| vec![pulse.eval(t)], opts)?;
    let max_error = traj
        .t
        .iter()
        .zip(&traj.y_endpoint)
        .map(|(t, y)| (y[0] - pulse.eval(t - 2.0)).abs())
        .fold(0.0, f64::max);
    Ok(EchoResult {
        n_elems,
        max_error,
        ledger_residual: traj.max_relative_residual(),
    })
}

pub fn run_example() -> Result<Vec<EchoResult>> {
    let mut out = Vec::new();
    for (n, dt) in [(250, 2e-3), (500, 1e-3), (1000, 5e-4)] {
        let r = echo(n, dt)?;
        println!(
            "n_elems {:4}  max |y(t) - u(t-2)| = {:.3e}  ledger residual {:.1e}",
            r.n_elems, r.max_error, r.ledger_residual
        );
        out.push(r);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}

// Assembles the boundary node of a curved, lossy tube and runs the energy
// checks: the Green–Lagrange defect, time-flow inversion, and the
// monotonicity of adding wall dissipation.

use tubenode::error::Result;
use tubenode::geometry::{PhysicalConstants, Profile};
use tubenode::node::{InversionConvention, KernelOf, Verdict};
use tubenode::webster::WebsterSystem;

pub struct NodeVerdicts {
    pub lossless: Verdict,
    pub lossy: Verdict,
    pub lossy_reversed: Verdict,
    pub kernel_ok: bool,
}

pub fn run_example() -> Result<NodeVerdicts> {
    let geom = Profile::Constant { r0: 0.01, kappa: 50.0 }.build(201)?;
    let n_elems = 60;
    let lossless = WebsterSystem::assemble(&geom, PhysicalConstants::new(343.0, 1.2, 0.0)?, n_elems)?
        .node()?;
    let lossy = WebsterSystem::assemble(&geom, PhysicalConstants::new(343.0, 1.2, 0.5)?, n_elems)?
        .node()?;

    let a = lossless.passivity_check(100, 7, 1e-10);
    let b = lossy.passivity_check(100, 7, 1e-10);
    let c = lossy
        .timeflow_inverse(InversionConvention::Reverse)
        .passivity_check(100, 7, 1e-10);
    println!("lossless node: {}", a.summary_line());
    println!("lossy node:    {}", b.summary_line());
    println!("reversed lossy node: {}", c.summary_line());

    let mut kernel_ok = true;
    for which in [KernelOf::G, KernelOf::K] {
        let k = lossy.dissipativity_on_kernel(which, 50, 7, 1e-10)?;
        println!("dissipative on ker {which:?}: {} (max residual {:.2e})", k.passed, k.max_residual);
        kernel_ok &= k.passed;
    }
    Ok(NodeVerdicts {
        lossless: a.verdict,
        lossy: b.verdict,
        lossy_reversed: c.verdict,
        kernel_ok,
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}

// The lossy wall as a scattering channel. Grounding its input leaves a
// passive node whose energy defect is exactly the wall loss.

use tubenode::cylinder::{CylinderSystem, WallMode};
use tubenode::error::Result;
use tubenode::geometry::PhysicalConstants;
use tubenode::node::Verdict;

pub struct Grounding {
    pub open: Verdict,
    pub grounded: Verdict,
    pub max_gap: f64,
}

pub fn run_example() -> Result<Grounding> {
    let consts = PhysicalConstants::new(2.0, 1.5, 0.0)?;
    let sys = CylinderSystem::new(0.5, consts, 5, 3, 0.4, None, WallMode::Channel)?;
    let node = sys.to_node()?;
    let open = node.passivity_check(50, 3, 1e-10);
    println!("wall as channel: {}", open.summary_line());

    let wall: Vec<usize> = (sys.nr..sys.n_inputs()).collect();
    let g = node.grounded(&wall)?;
    let grounded = g.node.passivity_check(50, 3, 1e-10);
    println!("wall grounded:   {}", grounded.summary_line());

    let mut max_gap: f64 = 0.0;
    for z in g.node.samples(50, 4) {
        let defect = g.node.gl_defect(&z)?;
        let wall_loss = (&g.discarded_k * &z).norm_squared();
        max_gap = max_gap.max((defect - wall_loss).abs() / g.node.defect_scale(&z));
    }
    println!("max |defect - wall loss| / scale = {max_gap:.2e}");
    Ok(Grounding {
        open: open.verdict,
        grounded: grounded.verdict,
        max_gap,
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}

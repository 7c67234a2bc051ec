// Derived tube fields for the built-in profiles, and the diagnostic for a
// centreline that curves tighter than the tube radius.

use tubenode::error::{Error, Result};
use tubenode::geometry::{Profile, TubeGeometry};

pub fn run_example() -> Result<Vec<TubeGeometry>> {
    let profiles = [
        ("constant", Profile::Constant { r0: 0.01, kappa: 0.0 }),
        ("cone", Profile::Cone { r0: 0.01, r1: 0.02, kappa: 0.0 }),
        ("exponential", Profile::ExponentialHorn { r0: 0.005, r1: 0.03, kappa: 0.0 }),
        ("bump, curved", Profile::CosineBump { r0: 0.01, amplitude: 0.5, kappa: 40.0 }),
    ];
    let mut out = Vec::new();
    for (name, p) in profiles {
        let g = p.build(101)?;
        println!("{name}:\n{g}");
        out.push(g);
    }
    match (Profile::Constant { r0: 0.01, kappa: 150.0 }).build(101) {
        Err(Error::Geometry(diag)) => println!("rejected: {diag}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}

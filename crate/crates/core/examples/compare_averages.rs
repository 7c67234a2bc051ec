// Cross-section averages of the cylinder solution against the Webster
// solution of the same tube, for a pulse well below the first radial
// cutoff.

use std::path::Path;

use tubenode::commands::compare_models;
use tubenode::config::SimulationConfig;
use tubenode::error::Result;

const CONFIG: &str = "
[geometry]
kind = constant
r0 = 0.01

[discretization]
ns = 100
nr = 6
dt = 4e-6
t_final = 8e-3
record_stride = 2

[input]
kind = gaussian
center = 1.5e-3
width = 3e-4

[verify]
s_samples = 5
";

pub fn run_example() -> Result<f64> {
    let cfg = SimulationConfig::parse_str(CONFIG, Path::new("."))?;
    let (cmp, _) = compare_models(&cfg)?;
    for (s, e) in cmp.s.iter().zip(&cmp.relative_l2) {
        println!("s = {s:.2}: relative L2 gap {:.3}%", 100.0 * e);
    }
    Ok(cmp.max_error())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}

// Discrete Poincaré ratio `max ‖ψ‖²_M / ‖ψ'‖²` on `[0, 1]` with a
// Dirichlet end at `s = 1`; it converges to `4/π²` from below.

use std::f64::consts::PI;

use tubenode::error::Result;
use tubenode::webster::poincare_ratio;

pub fn run_example() -> Result<Vec<(usize, f64)>> {
    let sharp = 4.0 / (PI * PI);
    let mut rows = Vec::new();
    for n in [2, 4, 8, 16, 32, 64, 128] {
        let r = poincare_ratio(n)?;
        println!("n_elems {n:4}: ratio {r:.8}  (4/pi^2 - ratio = {:.2e})", sharp - r);
        rows.push((n, r));
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}

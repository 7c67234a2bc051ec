// Drives the command layer from a config string: writes the resolved
// config, the ledger CSV and a report into a scratch directory.

use std::path::Path;

use tubenode::commands::{exit_code, run_command};
use tubenode::config::SimulationConfig;
use tubenode::error::Result;

pub fn run_example() -> Result<i32> {
    let dir = std::env::temp_dir().join(format!("tubenode-example-{}", std::process::id()));
    let text = format!(
        "[geometry]\nkind = cone\nr0 = 0.01\nr1 = 0.02\n\
         [physics]\nalpha = 1\n\
         [discretization]\nn_elems = 100\ndt = 2e-5\nt_final = 0.01\n\
         [input]\nkind = sine_burst\nfrequency = 800\ncenter = 3e-3\nwidth = 5e-3\n\
         [output]\ndirectory = {}\nprefix = cone\n",
        dir.display()
    );
    let cfg = SimulationConfig::parse_str(&text, Path::new("."))?;
    let result = run_command("simulate-webster", &cfg);
    if let Ok(outcome) = &result {
        print!("{}", outcome.report());
        for f in &outcome.files {
            println!("wrote {}", f.display());
        }
    }
    let code = exit_code(&result);
    std::fs::remove_dir_all(&dir)?;
    Ok(code)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}

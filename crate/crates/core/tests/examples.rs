mod webster_echo {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/webster_echo.rs"));
}
mod verify_node {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/verify_node.rs"));
}
mod cylinder_ledger {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cylinder_ledger.rs"));
}
mod compare_averages {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/compare_averages.rs"));
}
mod poincare {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/poincare.rs"));
}
mod geometry_profiles {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/geometry_profiles.rs"));
}
mod wall_grounding {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/wall_grounding.rs"));
}
mod config_run {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/config_run.rs"));
}

use tubenode::node::Verdict;

#[test]
fn webster_echo_converges() {
    let r = webster_echo::run_example().unwrap();
    assert!(r.windows(2).all(|w| w[1].max_error < w[0].max_error / 3.0));
    assert!(r.iter().all(|e| e.ledger_residual < 1e-10));
}

#[test]
fn verify_node_verdicts() {
    let v = verify_node::run_example().unwrap();
    assert_eq!(v.lossless, Verdict::Conservative);
    assert_eq!(v.lossy, Verdict::Passive);
    assert_eq!(v.lossy_reversed, Verdict::NotPassive);
    assert!(v.kernel_ok);
}

#[test]
fn cylinder_ledger_balances() {
    let run = cylinder_ledger::run_example().unwrap();
    assert!(run.max_relative_residual() < 1e-10);
    assert!(run.ledger.iter().all(|l| l.p_wall >= 0.0 && l.p_interior >= 0.0));
    assert_eq!(run.averages.len(), 7);
}

#[test]
fn compare_averages_small_gap() {
    assert!(compare_averages::run_example().unwrap() < 0.02);
}

#[test]
fn poincare_below_bound() {
    let rows = poincare::run_example().unwrap();
    assert!(rows.iter().all(|(_, r)| *r <= 0.5));
    assert!(rows.windows(2).all(|w| w[1].1 >= w[0].1));
}

#[test]
fn geometry_profiles_build() {
    let g = geometry_profiles::run_example().unwrap();
    assert_eq!(g.len(), 4);
    assert!(g.iter().all(|g| g.validate().is_ok()));
}

#[test]
fn wall_grounding_leaves_wall_loss() {
    let g = wall_grounding::run_example().unwrap();
    assert_eq!(g.open, Verdict::Conservative);
    assert_eq!(g.grounded, Verdict::Passive);
    assert!(g.max_gap < 1e-10);
}

#[test]
fn config_run_passes() {
    assert_eq!(config_run::run_example().unwrap(), 0);
}

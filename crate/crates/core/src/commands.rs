//! The command-line workflows, callable as library functions.
//!
//! Every command writes `run.meta` (the resolved config) plus its CSV
//! outputs into the configured output directory and returns an
//! [`Outcome`]. Exit codes: 0 pass, 1 check failure, 2 usage or config
//! error; see [`exit_code`].

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::SimulationConfig;
use crate::cylinder::{run_cylinder, CylinderRun, CylinderSystem, WallMode};
use crate::error::{Error, Result};
use crate::geometry::GeometryDiagnostic;
use crate::node::{InversionConvention, KernelOf, Verdict};
use crate::stepper::{run_simulation, InputSignal, RunOptions, Trajectory};
use crate::webster::{poincare_ratio, WebsterState, WebsterSystem};

/// First zero of `J1'`; the first non-planar mode of a rigid circular
/// duct cuts on at `1.8412 c / (2π R0)`.
pub const FIRST_RADIAL_ZERO: f64 = 1.841_183_781_340_659;

/// Result of one check inside a command.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    fn write(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    /// Human-readable report.
    pub fn report(&self) -> String {
        let mut s = String::new();
        for line in &self.summary {
            s.push_str(line);
            s.push('\n');
        }
        for c in &self.checks {
            s.push_str(&format!(
                "{} {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        for w in &self.warnings {
            s.push_str(&format!("warning: {w}\n"));
        }
        s
    }
}

/// Maps a command result to the process exit status.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) if o.passed() => 0,
        Ok(_) => 1,
        Err(
            Error::Config { .. }
            | Error::Parameter { .. }
            | Error::UnknownKind { .. }
            | Error::Geometry(_)
            | Error::Io(_)
            | Error::Csv(_),
        ) => 2,
        Err(_) => 1,
    }
}

fn prepare(cfg: &SimulationConfig) -> Result<(PathBuf, Outcome)> {
    let dir = cfg.output.directory.clone();
    fs::create_dir_all(&dir)?;
    let mut out = Outcome::default();
    out.write(&dir, "run.meta", &cfg.to_ini())?;
    Ok((dir, out))
}

fn file_name(cfg: &SimulationConfig, what: &str) -> String {
    format!("{}_{what}.csv", cfg.output.prefix)
}

fn run_options(cfg: &SimulationConfig) -> RunOptions {
    RunOptions {
        dt: cfg.discretization.dt,
        t_final: cfg.discretization.t_final,
        record_stride: cfg.discretization.record_stride,
    }
}

fn require_cylinder(cfg: &SimulationConfig) -> Result<f64> {
    if !cfg.is_straight_cylinder() {
        return Err(Error::config(
            "geometry.kind",
            "the axisymmetric reference solver supports only a straight constant-radius \
             tube (kind = constant, kappa = 0)",
        ));
    }
    Ok(cfg.geometry.r0.expect("validated"))
}

/// `max |y(t) − u(t − 2/c)|` over `t ≥ t_start`; `u` is evaluated exactly.
pub fn echo_error(traj: &Trajectory, signal: &InputSignal, c: f64, t_start: f64) -> f64 {
    traj.t
        .iter()
        .zip(&traj.y_endpoint)
        .filter(|(t, _)| **t >= t_start)
        .map(|(t, y)| (y[0] - signal.eval(t - 2.0 / c)).abs())
        .fold(0.0, f64::max)
}

fn webster_snapshots_csv(traj: &Trajectory, sys: &WebsterSystem) -> String {
    let mut out = String::from("#schema=1\nt,s,psi,pi\n");
    let n = sys.n();
    for (t, x) in &traj.snapshots {
        for i in 0..n {
            out.push_str(&format!("{t:e},{:e},{:e},{:e}\n", sys.nodes[i], x[i], x[n + i]));
        }
    }
    out
}

/// Runs the Webster model from rest.
pub fn simulate_webster(cfg: &SimulationConfig) -> Result<Outcome> {
    let geom = cfg.tube()?;
    let sys = WebsterSystem::assemble(&geom, cfg.constants(), cfg.discretization.n_elems)?;
    let signal = cfg.input_signal()?;
    let (dir, mut out) = prepare(cfg)?;
    let lin = sys.linear_system();
    let x0 = vec![0.0; lin.dim()];
    let traj = run_simulation(&lin, &x0, &|t| vec![signal.eval(t)], run_options(cfg))?;
    out.write(&dir, &file_name(cfg, "webster"), &traj.to_csv())?;
    if cfg.discretization.record_stride > 0 {
        out.write(&dir, &file_name(cfg, "webster_fields"), &webster_snapshots_csv(&traj, &sys))?;
    }

    let energies = traj.energies();
    let e_max = energies.iter().cloned().fold(0.0, f64::max);
    let cumulative = traj.cumulative_residual().abs() / e_max.max(f64::MIN_POSITIVE);
    let per_step = traj.max_relative_residual();
    out.summary.push(format!(
        "final energy {:e}; injected {:e}, emitted {:e}, dissipated {:e}",
        energies.last().copied().unwrap_or(0.0),
        traj.total_injected(),
        traj.total_emitted(),
        traj.total_dissipated()
    ));
    out.summary
        .push(format!("cumulative balance residual {cumulative:e} (relative to max E)"));
    if cfg.physics.alpha > 0.0 {
        out.summary.push(format!(
            "cumulative dissipated energy {:e}",
            traj.total_dissipated()
        ));
    }
    if let Some(m) = traj.compat_mismatch.filter(|m| *m > 0.0) {
        out.warnings
            .push(format!("initial state incompatible with input: |G x0 - u(0)| = {m:e}"));
    }
    if geom.is_straight_cylinder() && cfg.physics.alpha == 0.0 {
        let c0 = sys.c0;
        let t_start = 2.0 / c0 + 2.0 * cfg.input.width;
        let err = echo_error(&traj, &signal, c0, t_start);
        out.summary.push(format!(
            "echo: max |y(t) - u(t - 2/c)| over t >= {t_start:e} is {err:e}"
        ));
    }
    out.check(
        "ledger",
        per_step <= cfg.verify.ledger_rtol,
        format!("max per-step relative residual {per_step:e}"),
    );
    Ok(out)
}

fn build_cylinder_from(cfg: &SimulationConfig) -> Result<CylinderSystem> {
    let r0 = require_cylinder(cfg)?;
    let d = &cfg.discretization;
    let g = (cfg.physics.g_damp < 0.0).then(|| vec![cfg.physics.g_damp; d.ns * d.nr]);
    CylinderSystem::new(
        r0,
        cfg.constants().with_alpha(0.0),
        d.ns,
        d.nr,
        cfg.physics.alpha,
        g,
        WallMode::Grounded,
    )
}

/// Runs the cylinder reference solver from rest with a radially uniform
/// end input.
pub fn simulate_cylinder(cfg: &SimulationConfig) -> Result<Outcome> {
    let mut sys = build_cylinder_from(cfg)?;
    let signal = cfg.input_signal()?;
    let (dir, mut out) = prepare(cfg)?;
    let run = run_cylinder(&mut sys, &signal, run_options(cfg))?;
    out.write(&dir, &file_name(cfg, "cylinder_ledger"), &run.ledger_csv())?;
    if cfg.discretization.record_stride > 0 {
        out.write(&dir, &file_name(cfg, "cylinder_averages"), &run.averages_csv(&sys))?;
    }
    let per_step = run.max_relative_residual();
    let wall_ok = run.ledger.iter().all(|l| l.p_wall >= 0.0 && l.p_interior >= 0.0);
    out.summary.push(format!(
        "final energy {:e}; injected {:e}, emitted {:e}, dissipated {:e}",
        run.ledger.last().map_or(0.0, |l| l.e),
        run.trajectory.total_injected(),
        run.trajectory.total_emitted(),
        run.trajectory.total_dissipated()
    ));
    out.check(
        "ledger",
        per_step <= cfg.verify.ledger_rtol,
        format!("max per-step relative residual {per_step:e}"),
    );
    out.check(
        "dissipation_sign",
        wall_ok,
        "P_wall >= 0 and P_interior >= 0 at every step".into(),
    );
    Ok(out)
}

/// `‖a_k − b_k‖ / ‖b_k‖` for each row `k` of two equally shaped tables.
pub fn relative_l2_by_row(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            let diff: f64 = ra.iter().zip(rb).map(|(x, y)| (x - y).powi(2)).sum();
            let norm: f64 = rb.iter().map(|y| y * y).sum();
            if norm == 0.0 {
                diff.sqrt()
            } else {
                (diff / norm).sqrt()
            }
        })
        .collect()
}

/// Frequency above which the input spectrum is negligible (`None` when
/// unknown).
pub fn input_bandwidth(signal: &InputSignal) -> Option<f64> {
    match signal {
        // |û(ω)| ∝ exp(−½ ω² w²) falls below 1e-3 of its peak here
        InputSignal::Gaussian { width, .. } => {
            Some((2.0 * 1000f64.ln()).sqrt() / (2.0 * PI * width))
        }
        InputSignal::SineBurst {
            frequency, width, ..
        } => Some(frequency + 8.0 / width),
        InputSignal::Zero | InputSignal::Constant { .. } => Some(0.0),
        InputSignal::Tabulated { .. } => None,
    }
}

/// Sampled comparison of the two models.
#[derive(Debug, Clone)]
pub struct AverageComparison {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    /// `[s sample][time]`
    pub phibar: Vec<Vec<f64>>,
    pub psi: Vec<Vec<f64>>,
    pub relative_l2: Vec<f64>,
}

impl AverageComparison {
    pub fn max_error(&self) -> f64 {
        self.relative_l2.iter().cloned().fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("#schema=1\ns,t,phibar_wave,psi_webster,abs_err\n");
        for (k, s) in self.s.iter().enumerate() {
            for (n, t) in self.t.iter().enumerate() {
                let (a, b) = (self.phibar[k][n], self.psi[k][n]);
                out.push_str(&format!("{s:e},{t:e},{a:e},{b:e},{:e}\n", (a - b).abs()));
            }
        }
        out
    }
}

/// Runs both models on matched axial grids (`n_elems = ns`) and samples
/// `φ̄` and `ψ` at `s = k / s_samples`, `k = 0..s_samples`.
pub fn compare_models(cfg: &SimulationConfig) -> Result<(AverageComparison, CylinderRun)> {
    let mut cyl = build_cylinder_from(cfg)?;
    let geom = cfg.tube()?;
    let ns = cfg.discretization.ns;
    let web = WebsterSystem::assemble(&geom, cfg.constants(), ns)?;
    let signal = cfg.input_signal()?;
    let opts = RunOptions {
        record_stride: cfg.discretization.record_stride.max(1),
        ..run_options(cfg)
    };
    let lin = web.linear_system();
    let x0 = vec![0.0; lin.dim()];
    let (web_run, cyl_run) = rayon::join(
        || run_simulation(&lin, &x0, &|t| vec![signal.eval(t)], opts),
        || run_cylinder(&mut cyl, &signal, opts),
    );
    let (web_run, cyl_run) = (web_run?, cyl_run?);

    let k_max = cfg.verify.s_samples;
    let idx: Vec<usize> = (0..k_max)
        .map(|k| ((k * ns) as f64 / k_max as f64).round() as usize)
        .filter(|&i| i < ns)
        .collect();
    let t: Vec<f64> = cyl_run.averages.iter().map(|(t, _)| *t).collect();
    let phibar: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| cyl_run.averages.iter().map(|(_, a)| a[i]).collect())
        .collect();
    let psi: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| web_run.snapshots.iter().map(|(_, x)| x[i]).collect())
        .collect();
    let relative_l2 = relative_l2_by_row(&phibar, &psi);
    let s = idx.iter().map(|&i| web.nodes[i]).collect();
    Ok((
        AverageComparison {
            s,
            t,
            phibar,
            psi,
            relative_l2,
        },
        cyl_run,
    ))
}

/// Compares the cross-section average of the cylinder solution with the
/// Webster solution of the same tube.
pub fn compare_averages(cfg: &SimulationConfig) -> Result<Outcome> {
    let r0 = require_cylinder(cfg)?;
    let signal = cfg.input_signal()?;
    let (dir, mut out) = prepare(cfg)?;
    let (cmp, _) = compare_models(cfg)?;
    out.write(&dir, &file_name(cfg, "compare"), &cmp.to_csv())?;
    for (s, e) in cmp.s.iter().zip(&cmp.relative_l2) {
        out.summary.push(format!("s = {s:.4}: relative L2 error {e:e}"));
    }
    let max = cmp.max_error();
    out.summary.push(format!("max relative L2 error over s: {max:e}"));

    let cutoff = FIRST_RADIAL_ZERO * cfg.physics.c / (2.0 * PI * r0);
    let in_band = match input_bandwidth(&signal) {
        Some(f) if f <= 0.2 * cutoff => true,
        Some(f) => {
            out.warnings.push(format!(
                "input bandwidth {f:.0} Hz exceeds 0.2 x first radial cutoff ({cutoff:.0} Hz); \
                 the averaged model is not expected to match"
            ));
            false
        }
        None => {
            out.warnings
                .push("bandwidth of tabulated input unknown; error not checked".into());
            false
        }
    };
    if in_band {
        out.check(
            "averages",
            max <= cfg.verify.compare_tol,
            format!("max relative L2 error {max:e} (tolerance {:e})", cfg.verify.compare_tol),
        );
    } else if max > cfg.verify.compare_tol {
        out.warnings
            .push(format!("relative error {max:e} is large, as expected out of band"));
    }
    Ok(out)
}

fn seeded_vector(n: usize, seed: u64) -> DVector<f64> {
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    DVector::from_fn(n, |_, _| StandardNormal.sample(&mut r))
}

/// `‖A z − w‖ / (‖A‖_∞ ‖z‖_∞ + ‖w‖_∞)`, the normwise backward error.
pub fn stationary_residual(node: &crate::node::DiscreteNode, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
    let a = match &node.h_mat {
        Some(h) => &node.l_mat + h * &node.embed,
        None => node.l_mat.clone(),
    };
    let r = (&a * z - w).amax().max((&node.g_mat * z).amax());
    let a_inf = a
        .row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    r / (a_inf * z.amax() + w.amax())
}

/// Runs the node checks on the assembled Webster node.
pub fn verify_node(cfg: &SimulationConfig) -> Result<Outcome> {
    let geom = cfg.tube()?;
    let consts = cfg.constants();
    let sys = WebsterSystem::assemble(&geom, consts, cfg.discretization.n_elems)?;
    let mut node = sys.node()?;
    if let Some(scale) = cfg.verify.corrupt_l_scale {
        node.l_mat *= scale;
    }
    let (dir, mut out) = prepare(cfg)?;
    let v = &cfg.verify;
    let (n_samples, seed, rtol) = (v.n_defect_samples, v.seed, v.rtol);

    // defect equals the wall dissipation of the sampled state
    let report = node.passivity_check(n_samples, seed, rtol);
    out.write(&dir, &file_name(cfg, "defects"), &report.to_csv())?;
    let mut worst: f64 = 0.0;
    for z in node.samples(n_samples, seed) {
        let x = node.state_of(&z);
        let expected = sys.dissipation_power(&WebsterState::from_vec(x.as_slice()));
        let d = node.gl_defect(&z)?;
        worst = worst.max((d - expected).abs() / node.defect_scale(&z));
    }
    out.check(
        "gl_identity",
        worst <= rtol,
        format!("max |defect - wall dissipation| / scale = {worst:e}"),
    );
    let expected_verdict = if consts.alpha > 0.0 {
        Verdict::Passive
    } else {
        Verdict::Conservative
    };
    out.check(
        "verdict",
        report.verdict == expected_verdict,
        format!("{} (expected {expected_verdict})", report.summary_line()),
    );

    let reverse = node
        .timeflow_inverse(InversionConvention::Reverse)
        .passivity_check(n_samples, seed, rtol);
    let adjoint = node
        .timeflow_inverse(InversionConvention::Adjoint)
        .passivity_check(n_samples, seed, rtol);
    let inverse_ok = if consts.alpha > 0.0 {
        reverse.verdict == Verdict::NotPassive && adjoint.verdict != Verdict::NotPassive
    } else {
        reverse.verdict == Verdict::Conservative
    };
    out.check(
        "timeflow_inverse",
        inverse_ok,
        format!(
            "reversed: {} (min defect {:e}); adjoint: {}",
            reverse.verdict, reverse.min_defect, adjoint.verdict
        ),
    );

    for (name, which) in [("kernel_G", KernelOf::G), ("kernel_K", KernelOf::K)] {
        let k = node.dissipativity_on_kernel(which, n_samples, seed, rtol)?;
        out.check(
            name,
            k.passed,
            format!("max relative residual {:e}", k.max_residual),
        );
    }

    let w = seeded_vector(node.dim(), seed.wrapping_add(1));
    match node.solve_stationary(&w) {
        Ok(z) => {
            let r = stationary_residual(&node, &z, &w);
            out.check("stationary", r <= rtol, format!("backward error {r:e}"));
        }
        Err(e) => out.check("stationary", false, e.to_string()),
    }

    let ratio = poincare_ratio(cfg.discretization.n_elems)?;
    out.check(
        "poincare",
        ratio <= 0.5,
        format!("lambda ratio {ratio:.6} (bound 0.5, sharp 4/pi^2 = {:.6})", 4.0 / (PI * PI)),
    );

    let wall = WebsterSystem::assemble(&geom, consts.with_alpha(1.0), cfg.discretization.n_elems)?
        .dissipation_matrix()?;
    let base = node.clone();
    let monotone = match base.add_dissipation(&wall, n_samples, seed, rtol) {
        Ok(more) => {
            let mut worst: f64 = 0.0;
            for z in base.samples(n_samples, seed) {
                let gain = more.gl_defect(&z)? - base.gl_defect(&z)?;
                worst = worst.min(gain / base.defect_scale(&z));
            }
            (worst >= -rtol, format!("min relative defect gain {worst:e}"))
        }
        Err(e) => (false, e.to_string()),
    };
    out.check("h_monotonicity", monotone.0, monotone.1);

    let mut report_txt = out.report();
    report_txt.push_str(&format!("verdict: {}\n", report.verdict));
    out.write(&dir, &format!("{}_verify.txt", cfg.output.prefix), &report_txt)?;
    out.summary.push(format!("verdict: {}", report.verdict));
    Ok(out)
}

/// Tabulates the derived geometry fields; a failed validation is a check
/// failure carrying the diagnostic.
pub fn geometry_report(cfg: &SimulationConfig) -> Result<Outcome> {
    let (dir, mut out) = prepare(cfg)?;
    let geom = match cfg.profile()?.build(cfg.geometry.n_samples) {
        Ok(g) => g,
        Err(Error::Geometry(diag)) => {
            out.check("geometry", false, diag.to_string());
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let mut csv = String::from("#schema=1\ns,R,Rp,kappa,A,eta,Sigma,W\n");
    for k in 0..geom.n_samples() {
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            geom.s[k],
            geom.radius[k],
            geom.radius_deriv[k],
            geom.kappa[k],
            geom.area[k],
            geom.eta[k],
            geom.sigma[k],
            geom.w_str[k]
        ));
    }
    out.write(&dir, &file_name(cfg, "geometry"), &csv)?;
    out.summary.push(geom.to_string());
    let check: std::result::Result<(), GeometryDiagnostic> = geom.validate();
    out.check(
        "geometry",
        check.is_ok(),
        check.map_or_else(|e| e.to_string(), |_| "valid".into()),
    );
    Ok(out)
}

/// Command names accepted by [`run_command`].
pub const COMMANDS: &[&str] = &[
    "simulate-webster",
    "simulate-cylinder",
    "compare-averages",
    "verify-node",
    "geometry-report",
];

pub fn run_command(name: &str, cfg: &SimulationConfig) -> Result<Outcome> {
    match name {
        "simulate-webster" => simulate_webster(cfg),
        "simulate-cylinder" => simulate_cylinder(cfg),
        "compare-averages" => compare_averages(cfg),
        "verify-node" => verify_node(cfg),
        "geometry-report" => geometry_report(cfg),
        other => Err(Error::UnknownKind {
            what: "command",
            kind: other.into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_comparison_is_exact() {
        let a = vec![vec![1.0, -2.0, 0.5], vec![0.0, 3.0, 1.0]];
        assert_eq!(relative_l2_by_row(&a, &a), vec![0.0, 0.0]);
        let b = vec![vec![1.0, -2.0, 0.5], vec![0.0, 3.0, 2.0]];
        let e = relative_l2_by_row(&b, &a);
        assert!((e[1] - (1.0f64 / 10.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_bandwidth() {
        let g = InputSignal::Gaussian {
            amplitude: 1.0,
            center: 0.0,
            width: 1.0,
        };
        let f = input_bandwidth(&g).unwrap();
        let omega = 2.0 * PI * f;
        assert!(((-0.5 * omega * omega).exp() - 1e-3).abs() < 1e-15);
    }
}

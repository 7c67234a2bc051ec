//! Implicit midpoint integration of `M ẋ = J x + B u (+ σ(t) M f)` with an
//! exact per-step energy ledger.
//!
//! For a quadratic energy `E = xᵀQx` the midpoint update satisfies
//! `E₊ − E = 2 dt x_midᵀ Q M⁻¹ (J x_mid + B u_mid)` without any time
//! discretization error. Each assembly guarantees the port identity
//! `2 xᵀ Q M⁻¹ (J x + B u) = |u|²_W − |y|²_W − Σ_k xᵀ D_k x`, so the ledger
//! residual only sees the linear solver.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SparseLu};

/// Named contiguous block of channels (e.g. the end plane or the wall).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGroup {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

/// Interior source `ẋ ⊃ σ(t) f`, with `f` in state-derivative units.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub shape: Vec<f64>,
    pub signal: InputSignal,
}

impl Source {
    pub fn constant(shape: Vec<f64>) -> Self {
        Self {
            shape,
            signal: InputSignal::Constant { value: 1.0 },
        }
    }
}

/// Assembled linear first-order system with its energy structure.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub mass: CsrMatrix,
    pub dynamics: CsrMatrix,
    /// `N × m`
    pub input: CsrMatrix,
    /// Energy Gram matrix `Q`, `E = xᵀ Q x`.
    pub energy: CsrMatrix,
    /// Positive semidefinite dissipation forms; power is `xᵀ D x`.
    pub dissipation: Vec<(String, CsrMatrix)>,
    /// `y = feedthrough u + output x`
    pub output: CsrMatrix,
    pub feedthrough: CsrMatrix,
    /// Channel norm weights: `|u|²_W = Σ w_k u_k²`.
    pub channel_weights: Vec<f64>,
    pub channel_groups: Vec<ChannelGroup>,
    pub source: Option<Source>,
    /// Discrete input trace `G x` used to flag incompatible initial data.
    pub trace: Option<CsrMatrix>,
}

impl LinearSystem {
    pub fn dim(&self) -> usize {
        self.mass.nrows()
    }

    pub fn n_inputs(&self) -> usize {
        self.input.ncols()
    }

    pub fn energy_of(&self, x: &[f64]) -> f64 {
        self.energy.quad_form(x)
    }

    pub fn output_of(&self, x: &[f64], u: &[f64]) -> Vec<f64> {
        let mut y = self.feedthrough.mul_vec(u);
        self.output.mul_vec_add(1.0, x, &mut y);
        y
    }

    pub fn weighted_power(&self, v: &[f64]) -> f64 {
        v.iter()
            .zip(&self.channel_weights)
            .map(|(a, w)| w * a * a)
            .sum()
    }

    fn group_power(&self, v: &[f64], g: &ChannelGroup) -> f64 {
        (g.start..g.start + g.len)
            .map(|k| self.channel_weights[k] * v[k] * v[k])
            .sum()
    }

    /// Time-flow inverse: the roles of `u` and `y` are swapped, so
    /// `M ẋ = (J − B C) x + B y` and `u = y − C x`. Requires the identity
    /// feedthrough of the scattering form. Stepping it with `−dt` and the
    /// recorded outputs retraces a forward run.
    pub fn timeflow_inverse(&self) -> Result<LinearSystem> {
        self.check()?;
        if self.feedthrough != CsrMatrix::identity(self.n_inputs()) {
            return Err(Error::Dimension(
                "time-flow inverse needs the identity feedthrough".into(),
            ));
        }
        let bc = {
            let mut t = crate::linalg::TripletBuilder::new(self.dim(), self.dim());
            let c_rows = self.output.transpose();
            for (r, k, b) in self.input.triplets() {
                // (B C)_{r,c} = Σ_k B_{r,k} C_{k,c}
                for (c, _, v) in c_rows.triplets().filter(|&(_, kk, _)| kk == k) {
                    t.push(r, c, b * v);
                }
            }
            t.build()
        };
        Ok(LinearSystem {
            dynamics: CsrMatrix::lin_comb(1.0, &self.dynamics, -1.0, &bc),
            output: self.output.scaled(-1.0),
            source: None,
            trace: None,
            ..self.clone()
        })
    }

    fn check(&self) -> Result<()> {
        let n = self.dim();
        let m = self.n_inputs();
        let ok = self.mass.ncols() == n
            && self.dynamics.nrows() == n
            && self.dynamics.ncols() == n
            && self.input.nrows() == n
            && self.energy.nrows() == n
            && self.energy.ncols() == n
            && self.output.ncols() == n
            && self.output.nrows() == self.feedthrough.nrows()
            && self.feedthrough.ncols() == m
            && self.channel_weights.len() == m
            && self.output.nrows() == m
            && self.channel_groups.iter().all(|g| g.start + g.len <= m)
            && self.dissipation.iter().all(|(_, d)| d.nrows() == n && d.ncols() == n)
            && self.source.as_ref().is_none_or(|s| s.shape.len() == n);
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension("inconsistent linear system blocks".into()))
        }
    }
}

/// Per-step energy balance evaluated at the midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    pub step: usize,
    pub t: f64,
    pub e_before: f64,
    pub e_after: f64,
    pub p_in: f64,
    pub p_out: f64,
    /// Sum of `diss`.
    pub p_diss: f64,
    pub p_src: f64,
    /// `(E₊ − E) − dt (p_in − p_out − p_diss + p_src)`
    pub residual: f64,
    /// One entry per dissipation form.
    pub diss: Vec<f64>,
    /// `(p_in, p_out)` per channel group.
    pub groups: Vec<(f64, f64)>,
}

impl EnergyLedger {
    /// `|residual| / max(E, E₊, dt p_in)`
    pub fn relative_residual(&self, dt: f64) -> f64 {
        let scale = self
            .e_before
            .max(self.e_after)
            .max(dt.abs() * self.p_in)
            .max(f64::MIN_POSITIVE);
        self.residual.abs() / scale
    }
}

/// Factorized midpoint map for one `dt`.
pub struct MidpointStepper<'a> {
    sys: &'a LinearSystem,
    dt: f64,
    lu: SparseLu,
    explicit: CsrMatrix,
    /// `M f` for the interior source.
    src_rhs: Option<Vec<f64>>,
}

impl<'a> MidpointStepper<'a> {
    /// Factorizes `M − dt/2 J`; a negative `dt` steps backwards.
    pub fn new(sys: &'a LinearSystem, dt: f64) -> Result<Self> {
        sys.check()?;
        if dt == 0.0 || !dt.is_finite() {
            return Err(Error::param("dt", "must be non-zero and finite"));
        }
        let implicit = CsrMatrix::lin_comb(1.0, &sys.mass, -0.5 * dt, &sys.dynamics);
        let explicit = CsrMatrix::lin_comb(1.0, &sys.mass, 0.5 * dt, &sys.dynamics);
        let lu = SparseLu::new(&implicit)
            .map_err(|e| Error::Singular(format!("midpoint matrix for dt={dt}: {e}")))?;
        let src_rhs = sys.source.as_ref().map(|s| sys.mass.mul_vec(&s.shape));
        Ok(Self {
            sys,
            dt,
            lu,
            explicit,
            src_rhs,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One midpoint step from `t` with inputs at both ends of the step.
    pub fn step(&self, x: &[f64], t: f64, u_n: &[f64], u_np1: &[f64]) -> Result<Vec<f64>> {
        let m = self.sys.n_inputs();
        if u_n.len() != m || u_np1.len() != m || x.len() != self.sys.dim() {
            return Err(Error::Dimension("step operands".into()));
        }
        let u_mid: Vec<f64> = u_n.iter().zip(u_np1).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut rhs = self.explicit.mul_vec(x);
        self.sys.input.mul_vec_add(self.dt, &u_mid, &mut rhs);
        if let (Some(src), Some(f)) = (&self.sys.source, &self.src_rhs) {
            let sigma = self.source_mid(src, t);
            for (r, fi) in rhs.iter_mut().zip(f) {
                *r += self.dt * sigma * fi;
            }
        }
        self.lu.solve(&rhs)
    }

    fn source_mid(&self, src: &Source, t: f64) -> f64 {
        0.5 * (src.signal.eval(t) + src.signal.eval(t + self.dt))
    }

    /// Steps and records the energy balance.
    pub fn step_with_ledger(
        &self,
        step: usize,
        x: &[f64],
        t: f64,
        u_n: &[f64],
        u_np1: &[f64],
    ) -> Result<(Vec<f64>, EnergyLedger)> {
        let next = self.step(x, t, u_n, u_np1)?;
        let ledger = self.ledger(step, t, x, &next, u_n, u_np1);
        Ok((next, ledger))
    }

    pub fn ledger(
        &self,
        step: usize,
        t: f64,
        x: &[f64],
        next: &[f64],
        u_n: &[f64],
        u_np1: &[f64],
    ) -> EnergyLedger {
        let sys = self.sys;
        let x_mid: Vec<f64> = x.iter().zip(next).map(|(a, b)| 0.5 * (a + b)).collect();
        let u_mid: Vec<f64> = u_n.iter().zip(u_np1).map(|(a, b)| 0.5 * (a + b)).collect();
        let y_mid = sys.output_of(&x_mid, &u_mid);
        let p_in = sys.weighted_power(&u_mid);
        let p_out = sys.weighted_power(&y_mid);
        let diss: Vec<f64> = sys
            .dissipation
            .iter()
            .map(|(_, d)| d.quad_form(&x_mid))
            .collect();
        let p_diss = diss.iter().sum();
        let p_src = match &sys.source {
            Some(src) => {
                2.0 * self.source_mid(src, t) * sys.energy.bilinear(&x_mid, &src.shape)
            }
            None => 0.0,
        };
        let groups = sys
            .channel_groups
            .iter()
            .map(|g| (sys.group_power(&u_mid, g), sys.group_power(&y_mid, g)))
            .collect();
        let e_before = sys.energy_of(x);
        let e_after = sys.energy_of(next);
        let residual = (e_after - e_before) - self.dt * (p_in - p_out - p_diss + p_src);
        EnergyLedger {
            step,
            t,
            e_before,
            e_after,
            p_in,
            p_out,
            p_diss,
            p_src,
            residual,
            diss,
            groups,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub dt: f64,
    pub t_final: f64,
    /// Keep every `record_stride`-th state (0 keeps none).
    pub record_stride: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    /// Step times `t_n = n dt`, `n = 0..=steps`.
    pub t: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub y_endpoint: Vec<Vec<f64>>,
    /// Output at `t_n + dt/2`, one per step.
    pub y_midpoint: Vec<Vec<f64>>,
    pub snapshots: Vec<(f64, Vec<f64>)>,
    pub ledger: Vec<EnergyLedger>,
    /// `|G x₀ − u(0)|` when the system exposes a discrete trace.
    pub compat_mismatch: Option<f64>,
    pub final_state: Vec<f64>,
}

impl Trajectory {
    pub fn energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.ledger.iter().map(|l| l.e_before).collect();
        if let Some(last) = self.ledger.last() {
            e.push(last.e_after);
        }
        e
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.ledger
            .iter()
            .map(|l| l.relative_residual(self.dt))
            .fold(0.0, f64::max)
    }

    /// `E(T) − E(0) − Σ dt (p_in − p_out − p_diss + p_src)`
    pub fn cumulative_residual(&self) -> f64 {
        self.ledger.iter().map(|l| l.residual).sum()
    }

    pub fn total_dissipated(&self) -> f64 {
        self.ledger.iter().map(|l| self.dt * l.p_diss).sum()
    }

    pub fn total_injected(&self) -> f64 {
        self.ledger.iter().map(|l| self.dt * l.p_in).sum()
    }

    pub fn total_emitted(&self) -> f64 {
        self.ledger.iter().map(|l| self.dt * l.p_out).sum()
    }

    /// CSV `t,u,y_endpoint,y_midpoint,E,p_in,p_out,p_diss,residual` for a
    /// single-channel run; channel 0 is reported otherwise.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("#schema=1\nt,u,y_endpoint,y_midpoint,E,p_in,p_out,p_diss,residual\n");
        for (n, l) in self.ledger.iter().enumerate() {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                self.t[n],
                self.u[n].first().copied().unwrap_or(0.0),
                self.y_endpoint[n].first().copied().unwrap_or(0.0),
                self.y_midpoint[n].first().copied().unwrap_or(0.0),
                l.e_before,
                l.p_in,
                l.p_out,
                l.p_diss,
                l.residual
            ));
        }
        out
    }
}

/// Runs from `x0` over `[0, t_final]` with `round(t_final/dt)` steps.
pub fn run_simulation(
    sys: &LinearSystem,
    x0: &[f64],
    input: &dyn Fn(f64) -> Vec<f64>,
    opts: RunOptions,
) -> Result<Trajectory> {
    if !(opts.dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    if !(opts.t_final >= 0.0) {
        return Err(Error::param("t_final", "must be non-negative"));
    }
    let stepper = MidpointStepper::new(sys, opts.dt)?;
    run_with(&stepper, x0, input, opts)
}

/// As [`run_simulation`] with a prepared stepper.
pub fn run_with(
    stepper: &MidpointStepper<'_>,
    x0: &[f64],
    input: &dyn Fn(f64) -> Vec<f64>,
    opts: RunOptions,
) -> Result<Trajectory> {
    let sys = stepper.sys;
    let dt = stepper.dt;
    if x0.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "initial state has length {}, expected {}",
            x0.len(),
            sys.dim()
        )));
    }
    let steps = (opts.t_final / dt).round() as usize;
    let u0 = input(0.0);
    let compat_mismatch = sys.trace.as_ref().map(|g| {
        let gx = g.mul_vec(x0);
        gx.iter()
            .zip(&u0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    });
    if let Some(m) = compat_mismatch {
        if m > 1e-8 * (1.0 + crate::linalg::norm(&u0)) {
            log::warn!("initial state incompatible with input: |G x0 - u(0)| = {m:e}");
        }
    }
    let mut traj = Trajectory {
        dt,
        t: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        y_endpoint: Vec::with_capacity(steps + 1),
        y_midpoint: Vec::with_capacity(steps),
        snapshots: Vec::new(),
        ledger: Vec::with_capacity(steps),
        compat_mismatch,
        final_state: Vec::new(),
    };
    let mut x = x0.to_vec();
    let mut u_n = u0;
    traj.t.push(0.0);
    traj.y_endpoint.push(sys.output_of(&x, &u_n));
    traj.u.push(u_n.clone());
    if opts.record_stride > 0 {
        traj.snapshots.push((0.0, x.clone()));
    }
    for n in 0..steps {
        let t = n as f64 * dt;
        let t1 = (n + 1) as f64 * dt;
        let u_np1 = input(t1);
        let (next, ledger) = stepper.step_with_ledger(n, &x, t, &u_n, &u_np1)?;
        let x_mid: Vec<f64> = x.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
        let u_mid: Vec<f64> = u_n.iter().zip(&u_np1).map(|(a, b)| 0.5 * (a + b)).collect();
        traj.y_midpoint.push(sys.output_of(&x_mid, &u_mid));
        traj.ledger.push(ledger);
        x = next;
        u_n = u_np1;
        traj.t.push(t1);
        traj.y_endpoint.push(sys.output_of(&x, &u_n));
        traj.u.push(u_n.clone());
        if opts.record_stride > 0 && (n + 1) % opts.record_stride == 0 {
            traj.snapshots.push((t1, x.clone()));
        }
    }
    traj.final_state = x;
    Ok(traj)
}

/// Scalar input presets.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal {
    Zero,
    Constant {
        value: f64,
    },
    /// `amplitude exp(−½ ((t − center)/width)²)`
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Sine of `frequency` on `[center − width/2, center + width/2]`,
    /// phase zero at the burst start, with raised-cosine ramps of `width/4`.
    SineBurst {
        amplitude: f64,
        frequency: f64,
        center: f64,
        width: f64,
    },
    /// Piecewise-linear through `(t, v)` samples, held constant outside.
    Tabulated { t: Vec<f64>, v: Vec<f64> },
}

impl InputSignal {
    pub fn from_params(
        kind: &str,
        amplitude: f64,
        center: f64,
        width: f64,
        frequency: f64,
    ) -> Result<Self> {
        let sig = match kind {
            "zero" | "none" => InputSignal::Zero,
            "constant" => InputSignal::Constant { value: amplitude },
            "gaussian" => InputSignal::Gaussian {
                amplitude,
                center,
                width,
            },
            "sine_burst" => InputSignal::SineBurst {
                amplitude,
                frequency,
                center,
                width,
            },
            other => {
                return Err(Error::UnknownKind {
                    what: "input",
                    kind: other.to_string(),
                })
            }
        };
        sig.validate()?;
        Ok(sig)
    }

    /// Reads `t,u` rows (header required, `#` comments allowed).
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let (mut t, mut v) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| {
                rec.get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::param("input.file", "expected numeric `t,u` rows"))
            };
            t.push(parse(0)?);
            v.push(parse(1)?);
        }
        let sig = InputSignal::Tabulated { t, v };
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InputSignal::Gaussian { width, .. } if !(*width > 0.0) => {
                Err(Error::param("input.width", "must be positive"))
            }
            InputSignal::SineBurst {
                width, frequency, ..
            } if !(*width > 0.0 && *frequency > 0.0) => Err(Error::param(
                "input.width",
                "burst width and frequency must be positive",
            )),
            InputSignal::Tabulated { t, v } => {
                if t.is_empty() || t.len() != v.len() {
                    Err(Error::param("input.file", "need matching non-empty columns"))
                } else if t.windows(2).any(|w| w[1] <= w[0]) {
                    Err(Error::param("input.file", "times must increase"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            InputSignal::Zero => 0.0,
            InputSignal::Constant { value } => *value,
            InputSignal::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let x = (t - center) / width;
                amplitude * (-0.5 * x * x).exp()
            }
            InputSignal::SineBurst {
                amplitude,
                frequency,
                center,
                width,
            } => {
                let start = center - 0.5 * width;
                let tau = t - start;
                if tau <= 0.0 || tau >= *width {
                    return 0.0;
                }
                let ramp = 0.25 * width;
                let window = if tau < ramp {
                    0.5 * (1.0 - (std::f64::consts::PI * tau / ramp).cos())
                } else if tau > width - ramp {
                    0.5 * (1.0 - (std::f64::consts::PI * (width - tau) / ramp).cos())
                } else {
                    1.0
                };
                amplitude * window * (2.0 * std::f64::consts::PI * frequency * tau).sin()
            }
            InputSignal::Tabulated { t: ts, v } => crate::geometry::interp_linear(ts, v, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;
    use approx::assert_relative_eq;

    fn scalar_system(lambda: f64) -> LinearSystem {
        let one = CsrMatrix::identity(1);
        LinearSystem {
            mass: one.clone(),
            dynamics: CsrMatrix::diagonal(&[lambda]),
            input: CsrMatrix::zeros(1, 1),
            energy: one,
            dissipation: vec![("decay".into(), CsrMatrix::diagonal(&[-2.0 * lambda]))],
            output: CsrMatrix::zeros(1, 1),
            feedthrough: CsrMatrix::identity(1),
            channel_weights: vec![1.0],
            channel_groups: vec![],
            source: None,
            trace: None,
        }
    }

    #[test]
    fn scalar_midpoint_update() {
        let (lambda, dt) = (-3.0, 0.1);
        let sys = scalar_system(lambda);
        let st = MidpointStepper::new(&sys, dt).unwrap();
        let z1 = st.step(&[2.0], 0.0, &[0.0], &[0.0]).unwrap()[0];
        assert_relative_eq!(
            z1,
            2.0 * (1.0 + lambda * dt / 2.0) / (1.0 - lambda * dt / 2.0),
            max_relative = 1e-15
        );
        let (_, l) = st.step_with_ledger(0, &[2.0], 0.0, &[0.0], &[0.0]).unwrap();
        assert!(l.relative_residual(dt) < 1e-14);
    }

    #[test]
    fn oscillator_conserves_energy_and_reverses() {
        // q̇ = p, ṗ = −q; E = ½(q² + p²)
        let mut j = TripletBuilder::new(2, 2);
        j.push(0, 1, 1.0);
        j.push(1, 0, -1.0);
        let sys = LinearSystem {
            mass: CsrMatrix::identity(2),
            dynamics: j.build(),
            input: CsrMatrix::zeros(2, 1),
            energy: CsrMatrix::diagonal(&[0.5, 0.5]),
            dissipation: vec![],
            output: CsrMatrix::zeros(1, 2),
            feedthrough: CsrMatrix::identity(1),
            channel_weights: vec![1.0],
            channel_groups: vec![],
            source: None,
            trace: None,
        };
        let opts = RunOptions {
            dt: 0.05,
            t_final: 10.0,
            record_stride: 0,
        };
        let traj = run_simulation(&sys, &[1.0, 0.0], &|_| vec![0.0], opts).unwrap();
        let e0 = traj.energies()[0];
        assert!(traj.energies().iter().all(|e| (e - e0).abs() < 1e-13));

        let back = MidpointStepper::new(&sys, -0.05).unwrap();
        let mut x = traj.final_state.clone();
        for _ in 0..traj.ledger.len() {
            x = back.step(&x, 0.0, &[0.0], &[0.0]).unwrap();
        }
        assert!((x[0] - 1.0).abs() < 1e-12 && x[1].abs() < 1e-12);
    }

    #[test]
    fn zero_input_zero_state_stays_zero() {
        let sys = scalar_system(-1.0);
        let opts = RunOptions {
            dt: 0.01,
            t_final: 1.0,
            record_stride: 10,
        };
        let traj = run_simulation(&sys, &[0.0], &|_| vec![0.0], opts).unwrap();
        assert!(traj.y_endpoint.iter().all(|y| y[0] == 0.0));
        assert_eq!(traj.final_state, vec![0.0]);
        assert_eq!(traj.snapshots.len(), 11);
        assert_eq!(traj.ledger.len(), 100);
        assert!(run_simulation(&sys, &[0.0], &|_| vec![0.0], RunOptions { dt: 0.0, ..opts }).is_err());
    }

    #[test]
    fn gaussian_peak() {
        let g = InputSignal::from_params("gaussian", 1.0, 0.2, 0.05, 0.0).unwrap();
        assert_eq!(g.eval(0.2), 1.0);
        assert!(g.eval(0.0) < 1e-3);
        assert!(InputSignal::from_params("chirp", 1.0, 0.2, 0.05, 0.0).is_err());
        assert!(InputSignal::from_params("gaussian", 1.0, 0.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn sine_burst_window_is_smooth_at_edges() {
        let s = InputSignal::from_params("sine_burst", 2.0, 0.5, 0.5, 10.3).unwrap();
        let (start, end) = (0.25, 0.75);
        let h = 1e-6;
        for edge in [start, end] {
            assert!(s.eval(edge).abs() < 1e-12);
            let d_left = (s.eval(edge) - s.eval(edge - h)) / h;
            let d_right = (s.eval(edge + h) - s.eval(edge)) / h;
            assert!(d_left.abs() < 1e-3 && d_right.abs() < 1e-3);
        }
        assert!(s.eval(0.5).abs() > 0.0);
        assert_eq!(s.eval(0.8), 0.0);
    }

    #[test]
    fn tabulated_two_samples_ramp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        std::fs::write(&path, "t,u\n0,0\n1,2\n").unwrap();
        let s = InputSignal::from_csv(&path).unwrap();
        assert_relative_eq!(s.eval(0.25), 0.5, max_relative = 1e-15);
        assert_eq!(s.eval(2.0), 2.0);
    }
}

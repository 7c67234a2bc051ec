//! Axisymmetric reference solver for the wave equation in a straight
//! cylinder of radius `R0` and unit length.
//!
//! Unknowns live on a vertex-centred axial grid `s_i = i Δs`, `i = 0..ns-1`
//! (the plane `s = 1` carries the Dirichlet condition and is eliminated),
//! times staggered radial cells `r_j = (j + ½) Δr`. Flat index is
//! `i * nr + j`. The scheme is a finite-volume summation-by-parts
//! discretization: control volumes are `V_ij = h_i 2π r_j Δr` with
//! `h_0 = Δs/2` and `h_i = Δs` otherwise, and the stiffness `S` is the sum
//! of squared differences across cell faces. The end and wall conditions
//! enter as face fluxes, so the discrete Green identity holds exactly.
//!
//! State `x = (φ, p)` with `p = ρ φ_t`:
//!
//! ```text
//! φ̇ = p / ρ
//! V ṗ = ρc² (−S φ + b(φ, p, u, ũ)) + V g p
//! E = ½ ρ φᵀ S φ + ½ Σ V p² / (ρ c²)
//! ```

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::PhysicalConstants;
use crate::linalg::{CsrMatrix, TripletBuilder};
use crate::node::DiscreteNode;
use crate::stepper::{
    run_with, ChannelGroup, InputSignal, LinearSystem, MidpointStepper, RunOptions, Trajectory,
};

/// How the Robin wall is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WallMode {
    /// `∂φ/∂ν + α φ_t = 0`; the wall loses `(α/ρ) ∫ p²`.
    #[default]
    Grounded,
    /// `∂φ/∂ν + α φ_t = 2 sqrt(α/ρ) ũ`, with output `ỹ = ũ − sqrt(α/ρ) p`.
    Channel,
}

#[derive(Debug, Clone)]
pub struct CylinderSystem {
    pub r0: f64,
    pub consts: PhysicalConstants,
    pub ns: usize,
    pub nr: usize,
    pub ds: f64,
    pub dr: f64,
    pub wall_alpha: f64,
    pub wall_mode: WallMode,
    /// Interior damping `g ≤ 0` per cell, if any.
    pub g_damp: Option<Vec<f64>>,
    /// Current `φ` (length `ns·nr`).
    pub phi: Vec<f64>,
    /// Current `p` (length `ns·nr`).
    pub p: Vec<f64>,
    stiffness: CsrMatrix,
}

/// One row of the cylinder energy balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderLedger {
    pub t: f64,
    pub e: f64,
    pub p_in: f64,
    pub p_out: f64,
    /// Grounded wall loss (zero in [`WallMode::Channel`]).
    pub p_wall: f64,
    pub p_interior: f64,
    /// Wall channel powers in [`WallMode::Channel`].
    pub wall_in: f64,
    pub wall_out: f64,
    pub residual: f64,
    pub relative_residual: f64,
}

/// Builds the grounded-wall cylinder.
pub fn build_cylinder(
    r0: f64,
    consts: PhysicalConstants,
    ns: usize,
    nr: usize,
    wall_alpha: f64,
    g_damp: Option<Vec<f64>>,
) -> Result<CylinderSystem> {
    CylinderSystem::new(r0, consts, ns, nr, wall_alpha, g_damp, WallMode::Grounded)
}

impl CylinderSystem {
    pub fn new(
        r0: f64,
        consts: PhysicalConstants,
        ns: usize,
        nr: usize,
        wall_alpha: f64,
        g_damp: Option<Vec<f64>>,
        wall_mode: WallMode,
    ) -> Result<Self> {
        consts.validate()?;
        if ns < 4 {
            return Err(Error::param("ns", "must be at least 4"));
        }
        if nr < 2 {
            return Err(Error::param("nr", "must be at least 2"));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::param("r0", "must be positive"));
        }
        if !(wall_alpha >= 0.0 && wall_alpha.is_finite()) {
            return Err(Error::param("alpha", "must be non-negative"));
        }
        if wall_mode == WallMode::Channel && wall_alpha == 0.0 {
            return Err(Error::param("alpha", "a wall channel needs alpha > 0"));
        }
        if let Some(g) = &g_damp {
            if g.len() != ns * nr {
                return Err(Error::Dimension(format!(
                    "g_damp has {} entries, expected {}",
                    g.len(),
                    ns * nr
                )));
            }
            if let Some(k) = g.iter().position(|v| !(*v <= 0.0)) {
                return Err(Error::param(
                    "g_damp",
                    format!("must be non-positive (entry {k} is {})", g[k]),
                ));
            }
        }
        let mut sys = Self {
            r0,
            consts,
            ns,
            nr,
            ds: 1.0 / ns as f64,
            dr: r0 / nr as f64,
            wall_alpha,
            wall_mode,
            g_damp,
            phi: vec![0.0; ns * nr],
            p: vec![0.0; ns * nr],
            stiffness: CsrMatrix::zeros(0, 0),
        };
        sys.stiffness = sys.assemble_stiffness();
        Ok(sys)
    }

    pub fn cells(&self) -> usize {
        self.ns * self.nr
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nr + j
    }

    pub fn s(&self, i: usize) -> f64 {
        i as f64 * self.ds
    }

    pub fn r(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dr
    }

    /// `A(0) = π R0²`
    pub fn area0(&self) -> f64 {
        PI * self.r0 * self.r0
    }

    /// Axial control length `h_i`.
    pub fn h(&self, i: usize) -> f64 {
        if i == 0 {
            0.5 * self.ds
        } else {
            self.ds
        }
    }

    /// Annulus area `2π r_j Δr`; these sum to `π R0²`.
    pub fn ring_area(&self, j: usize) -> f64 {
        2.0 * PI * self.r(j) * self.dr
    }

    /// Cross-section weights `w_j = 2π r_j Δr / (π R0²)`.
    pub fn weights(&self) -> Vec<f64> {
        let a0 = self.area0();
        (0..self.nr).map(|j| self.ring_area(j) / a0).collect()
    }

    pub fn volume(&self, i: usize, j: usize) -> f64 {
        self.h(i) * self.ring_area(j)
    }

    /// Wall face area at axial node `i`.
    pub fn wall_area(&self, i: usize) -> f64 {
        self.h(i) * 2.0 * PI * self.r0
    }

    /// `φᵀ S φ = Σ_faces (area/length) (jump)²`, Dirichlet at `s = 1`.
    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    fn assemble_stiffness(&self) -> CsrMatrix {
        let n = self.cells();
        let mut t = TripletBuilder::new(n, n);
        let mut edge = |a: usize, b: Option<usize>, w: f64| {
            t.push(a, a, w);
            if let Some(b) = b {
                t.push(b, b, w);
                t.push(a, b, -w);
                t.push(b, a, -w);
            }
        };
        for i in 0..self.ns {
            for j in 0..self.nr {
                let k = self.idx(i, j);
                let axial = self.ring_area(j) / self.ds;
                let next = (i + 1 < self.ns).then(|| self.idx(i + 1, j));
                edge(k, next, axial);
                if j + 1 < self.nr {
                    let radial = self.h(i) * 2.0 * PI * (j as f64 + 1.0);
                    edge(k, Some(self.idx(i, j + 1)), radial);
                }
            }
        }
        t.build()
    }

    /// Number of wall channels (zero when grounded).
    pub fn n_wall_channels(&self) -> usize {
        match self.wall_mode {
            WallMode::Grounded => 0,
            WallMode::Channel => self.ns,
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.nr + self.n_wall_channels()
    }

    /// `sqrt(A(0) / (ρ c))`
    pub fn end_output_gain(&self) -> f64 {
        (self.area0() / (self.consts.rho * self.consts.c)).sqrt()
    }

    /// `sqrt(α / ρ)`
    pub fn wall_output_gain(&self) -> f64 {
        (self.wall_alpha / self.consts.rho).sqrt()
    }

    pub fn state(&self) -> Vec<f64> {
        let mut x = self.phi.clone();
        x.extend_from_slice(&self.p);
        x
    }

    pub fn set_state(&mut self, x: &[f64]) -> Result<()> {
        let n = self.cells();
        if x.len() != 2 * n {
            return Err(Error::Dimension(format!(
                "state has length {}, expected {}",
                x.len(),
                2 * n
            )));
        }
        self.phi.copy_from_slice(&x[..n]);
        self.p.copy_from_slice(&x[n..]);
        Ok(())
    }

    /// Fills `φ(s_i, r_j)` and `p(s_i, r_j)` from closures.
    pub fn set_fields(&mut self, phi: impl Fn(f64, f64) -> f64, p: impl Fn(f64, f64) -> f64) {
        for i in 0..self.ns {
            for j in 0..self.nr {
                let k = self.idx(i, j);
                self.phi[k] = phi(self.s(i), self.r(j));
                self.p[k] = p(self.s(i), self.r(j));
            }
        }
    }

    /// `M ẋ = J x + B (u, ũ)` with `y = u − gain·p` on each channel.
    pub fn linear_system(&self) -> LinearSystem {
        let n = self.cells();
        let (c, rho) = (self.consts.c, self.consts.rho);
        let rc2 = rho * c * c;
        let m = self.n_inputs();
        let mut mass = TripletBuilder::new(2 * n, 2 * n);
        let mut dyn_ = TripletBuilder::new(2 * n, 2 * n);
        let mut energy = TripletBuilder::new(2 * n, 2 * n);
        let mut interior = TripletBuilder::new(2 * n, 2 * n);
        let mut wall = TripletBuilder::new(2 * n, 2 * n);
        for i in 0..self.ns {
            for j in 0..self.nr {
                let k = self.idx(i, j);
                let v = self.volume(i, j);
                mass.push(k, k, 1.0);
                mass.push(n + k, n + k, v);
                dyn_.push(k, n + k, 1.0 / rho);
                energy.push(n + k, n + k, 0.5 * v / rc2);
                if let Some(g) = &self.g_damp {
                    dyn_.push(n + k, n + k, v * g[k]);
                    interior.push(n + k, n + k, -v * g[k] / rc2);
                }
            }
        }
        for (a, b, s) in self.stiffness.triplets() {
            dyn_.push(n + a, b, -rc2 * s);
            energy.push(a, b, 0.5 * rho * s);
        }
        let mut input = TripletBuilder::new(2 * n, m);
        let mut output = TripletBuilder::new(m, 2 * n);
        let mut weights = Vec::with_capacity(m);
        let end_b = 2.0 * rho * c * (c / (rho * self.area0())).sqrt();
        for j in 0..self.nr {
            let k = self.idx(0, j);
            let area = self.ring_area(j);
            dyn_.push(n + k, n + k, -c * area);
            input.push(n + k, j, end_b * area);
            output.push(j, n + k, -self.end_output_gain());
            weights.push(area / self.area0());
        }
        let alpha = self.wall_alpha;
        let wall_b = rc2 * 2.0 * self.wall_output_gain();
        for i in 0..self.ns {
            let k = self.idx(i, self.nr - 1);
            let area = self.wall_area(i);
            if alpha > 0.0 {
                dyn_.push(n + k, n + k, -c * c * alpha * area);
            }
            match self.wall_mode {
                WallMode::Grounded => wall.push(n + k, n + k, alpha / rho * area),
                WallMode::Channel => {
                    let ch = self.nr + i;
                    input.push(n + k, ch, wall_b * area);
                    output.push(ch, n + k, -self.wall_output_gain());
                    weights.push(area);
                }
            }
        }
        let mut groups = vec![ChannelGroup {
            name: "end".into(),
            start: 0,
            len: self.nr,
        }];
        if self.wall_mode == WallMode::Channel {
            groups.push(ChannelGroup {
                name: "wall".into(),
                start: self.nr,
                len: self.ns,
            });
        }
        LinearSystem {
            mass: mass.build(),
            dynamics: dyn_.build(),
            input: input.build(),
            energy: energy.build(),
            dissipation: vec![
                ("wall".into(), wall.build()),
                ("interior".into(), interior.build()),
            ],
            output: output.build(),
            feedthrough: CsrMatrix::identity(m),
            channel_weights: weights,
            channel_groups: groups,
            source: None,
            trace: None,
        }
    }

    /// Dense node on `(φ, p, u, ũ)` with the channel norms folded into
    /// `G` and `K`. Intended for small grids.
    pub fn to_node(&self) -> Result<DiscreteNode> {
        let sys = self.linear_system();
        let n = 2 * self.cells();
        let m = self.n_inputs();
        let mass_inv: Vec<f64> = sys.mass.diag().iter().map(|v| 1.0 / v).collect();
        let mut l = DMatrix::zeros(n, n + m);
        for (r, c, v) in sys.dynamics.triplets() {
            l[(r, c)] += mass_inv[r] * v;
        }
        for (r, c, v) in sys.input.triplets() {
            l[(r, n + c)] += mass_inv[r] * v;
        }
        let mut embed = DMatrix::zeros(n, n + m);
        embed.view_mut((0, 0), (n, n)).fill_with_identity();
        let mut g = DMatrix::zeros(m, n + m);
        let mut k = DMatrix::zeros(m, n + m);
        for ch in 0..m {
            let w = sys.channel_weights[ch].sqrt();
            g[(ch, n + ch)] = w;
            k[(ch, n + ch)] = w;
        }
        for (r, c, v) in sys.output.triplets() {
            k[(r, c)] += sys.channel_weights[r].sqrt() * v;
        }
        let labels = (0..m)
            .map(|ch| {
                if ch < self.nr {
                    format!("end{ch}")
                } else {
                    format!("wall{}", ch - self.nr)
                }
            })
            .collect();
        let mut node = DiscreteNode::new(sys.energy.to_dense(), embed, l, g, k, labels)?;
        let mut h = DMatrix::zeros(n, n);
        let mut any = false;
        for (_, d) in &sys.dissipation {
            for (r, c, v) in d.triplets() {
                // xᵀ X H x = −½ xᵀ D x with X diagonal on the p block
                h[(r, c)] -= 0.5 * v / sys.energy.get(r, r);
                any = true;
            }
        }
        if any {
            // The dissipation is already inside L; H only labels it.
            node.l_mat.view_mut((0, 0), (n, n)).zip_apply(&h, |a, b| *a -= b);
            node.h_mat = Some(h);
        }
        Ok(node)
    }
}

/// `φ̄_i = Σ_j w_j φ_ij`
pub fn cross_section_average(sys: &CylinderSystem) -> Vec<f64> {
    average_field(sys, &sys.phi)
}

/// Cross-section average of any cell field.
pub fn average_field(sys: &CylinderSystem, field: &[f64]) -> Vec<f64> {
    let w = sys.weights();
    (0..sys.ns)
        .map(|i| (0..sys.nr).map(|j| w[j] * field[sys.idx(i, j)]).sum())
        .collect()
}

/// `½ ρ φᵀ S φ + ½ Σ V p² / (ρ c²)`
pub fn cylinder_energy(sys: &CylinderSystem) -> f64 {
    let (c, rho) = (sys.consts.c, sys.consts.rho);
    let kinetic: f64 = (0..sys.ns)
        .flat_map(|i| (0..sys.nr).map(move |j| (i, j)))
        .map(|(i, j)| sys.volume(i, j) * sys.p[sys.idx(i, j)].powi(2))
        .sum();
    0.5 * rho * sys.stiffness.quad_form(&sys.phi) + 0.5 * kinetic / (rho * c * c)
}

/// `(α/ρ) Σ_i h_i 2π R0 p(s_i, R0⁻)²`
pub fn wall_power(sys: &CylinderSystem) -> f64 {
    let j = sys.nr - 1;
    sys.wall_alpha / sys.consts.rho
        * (0..sys.ns)
            .map(|i| sys.wall_area(i) * sys.p[sys.idx(i, j)].powi(2))
            .sum::<f64>()
}

/// `−Σ V g p² / (ρ c²)`
pub fn interior_power(sys: &CylinderSystem) -> f64 {
    let Some(g) = &sys.g_damp else { return 0.0 };
    let rc2 = sys.consts.rho * sys.consts.c * sys.consts.c;
    (0..sys.ns)
        .flat_map(|i| (0..sys.nr).map(move |j| (i, j)))
        .map(|(i, j)| {
            let k = sys.idx(i, j);
            -sys.volume(i, j) * g[k] * sys.p[k].powi(2) / rc2
        })
        .sum()
}

/// End-plane input/output powers and the scattered output.
pub fn end_channel_power(sys: &CylinderSystem, u_field: &[f64]) -> Result<(f64, f64, Vec<f64>)> {
    if u_field.len() != sys.nr {
        return Err(Error::Dimension(format!(
            "end input has {} entries, expected {}",
            u_field.len(),
            sys.nr
        )));
    }
    let w = sys.weights();
    let gain = sys.end_output_gain();
    let y: Vec<f64> = (0..sys.nr)
        .map(|j| u_field[j] - gain * sys.p[sys.idx(0, j)])
        .collect();
    let p_in = (0..sys.nr).map(|j| w[j] * u_field[j].powi(2)).sum();
    let p_out = (0..sys.nr).map(|j| w[j] * y[j].powi(2)).sum();
    Ok((p_in, p_out, y))
}

/// End-plane pairing `Σ_j A_j p_0j (−∂φ/∂s)_j`, the boundary term of the
/// discrete Green identity, given the end input.
pub fn end_boundary_pairing(sys: &CylinderSystem, u_field: &[f64]) -> f64 {
    let (c, rho) = (sys.consts.c, sys.consts.rho);
    let k = 2.0 * (c / (rho * sys.area0())).sqrt();
    (0..sys.nr)
        .map(|j| {
            let p0 = sys.p[sys.idx(0, j)];
            let flux = (k * u_field[j] - p0 / rho) / c;
            sys.ring_area(j) * p0 * flux
        })
        .sum()
}

/// Cylinder run output.
#[derive(Debug, Clone)]
pub struct CylinderRun {
    pub trajectory: Trajectory,
    pub ledger: Vec<CylinderLedger>,
    /// `(t, φ̄)` at every recorded snapshot.
    pub averages: Vec<(f64, Vec<f64>)>,
}

impl CylinderRun {
    /// `E_n + Σ_{k<n} dt (P_out − P_in + wall_out − wall_in)` per step; this
    /// is constant when nothing is dissipated inside the cylinder.
    pub fn balanced_energy(&self) -> Vec<f64> {
        let dt = self.trajectory.dt;
        let mut acc = 0.0;
        self.ledger
            .iter()
            .map(|l| {
                acc += dt * (l.p_out - l.p_in + l.wall_out - l.wall_in);
                l.e + acc
            })
            .collect()
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.ledger
            .iter()
            .map(|l| l.relative_residual)
            .fold(0.0, f64::max)
    }

    pub fn ledger_csv(&self) -> String {
        let mut out = String::from("#schema=1\nt,E,P_in,P_out,P_wall,P_interior,residual\n");
        for l in &self.ledger {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}\n",
                l.t, l.e, l.p_in, l.p_out, l.p_wall, l.p_interior, l.residual
            ));
        }
        out
    }

    pub fn averages_csv(&self, sys: &CylinderSystem) -> String {
        let mut out = String::from("#schema=1\nt,s,phibar\n");
        for (t, avg) in &self.averages {
            for (i, v) in avg.iter().enumerate() {
                out.push_str(&format!("{t:e},{:e},{v:e}\n", sys.s(i)));
            }
        }
        out
    }
}

/// Runs with a radially uniform end input and a grounded or silent wall.
pub fn run_cylinder(
    sys: &mut CylinderSystem,
    signal: &InputSignal,
    opts: RunOptions,
) -> Result<CylinderRun> {
    let m = sys.n_inputs();
    let nr = sys.nr;
    let input = move |t: f64| {
        let mut u = vec![0.0; m];
        u[..nr].fill(signal.eval(t));
        u
    };
    run_cylinder_with(sys, &input, opts)
}

/// Runs with an arbitrary input vector `(u_0..u_{nr-1}, ũ_0..ũ_{ns-1})`.
pub fn run_cylinder_with(
    sys: &mut CylinderSystem,
    input: &dyn Fn(f64) -> Vec<f64>,
    opts: RunOptions,
) -> Result<CylinderRun> {
    if !(opts.dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let lin = sys.linear_system();
    let stepper = MidpointStepper::new(&lin, opts.dt)?;
    let trajectory = run_with(&stepper, &sys.state(), input, opts)?;
    let ledger = trajectory
        .ledger
        .iter()
        .map(|l| {
            let (wall_in, wall_out) = l.groups.get(1).copied().unwrap_or((0.0, 0.0));
            let (p_in, p_out) = l.groups.first().copied().unwrap_or((0.0, 0.0));
            CylinderLedger {
                t: l.t + opts.dt,
                e: l.e_after,
                p_in,
                p_out,
                p_wall: l.diss[0],
                p_interior: l.diss[1],
                wall_in,
                wall_out,
                residual: l.residual,
                relative_residual: l.relative_residual(opts.dt),
            }
        })
        .collect();
    sys.set_state(&trajectory.final_state)?;
    let n = sys.cells();
    let averages = trajectory
        .snapshots
        .iter()
        .map(|(t, x)| (*t, average_field(sys, &x[..n])))
        .collect();
    Ok(CylinderRun {
        trajectory,
        ledger,
        averages,
    })
}

/// Field snapshot as CSV `s,r,phi,p`.
pub fn snapshot_csv(sys: &CylinderSystem, x: &[f64]) -> String {
    let n = sys.cells();
    let mut out = String::from("#schema=1\ns,r,phi,p\n");
    for i in 0..sys.ns {
        for j in 0..sys.nr {
            let k = sys.idx(i, j);
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e}\n",
                sys.s(i),
                sys.r(j),
                x[k],
                x[n + k]
            ));
        }
    }
    out
}

/// Random state with standard normal entries scaled per field.
pub fn random_state(sys: &CylinderSystem, seed: u64, phi_scale: f64, p_scale: f64) -> Vec<f64> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = sys.cells();
    (0..2 * n)
        .map(|k| {
            let z: f64 = StandardNormal.sample(&mut r);
            z * if k < n { phi_scale } else { p_scale }
        })
        .collect()
}

//! Generalized Webster horn model on `s ∈ [0, 1]`.
//!
//! P1 finite elements for the velocity potential `ψ` and the pressure
//! `π = ρ ψ_t`, with the node at `s = 1` eliminated (Dirichlet for both).
//! The semi-discrete system reads
//!
//! ```text
//! ψ̇     = π / ρ
//! M_w π̇ = −ρ K_A ψ − ρ A(0) ψ'(0) e₀ − 2πα D_w π
//! ```
//!
//! where the boundary flux `ψ'(0)` comes from the scattering input relation
//! `−c(0) ψ'(0) + ψ_t(0) = 2 sqrt(c(0)/(ρ A(0))) u`. Substituting it gives
//! the absorption `A(0)/c(0)` on `π₀` and the input load `2 sqrt(ρ A(0)/c(0))`.
//! With the energy `E = ½(ρ ψᵀ K_A ψ + πᵀ M_w π / ρ)` this yields exactly
//! `dE/dt = u² − y² − (2πα/ρ) πᵀ D_w π`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{PhysicalConstants, TubeGeometry};
use crate::linalg::{CsrMatrix, SparseLu, TripletBuilder};
use crate::node::DiscreteNode;
use crate::stepper::{ChannelGroup, LinearSystem, Source};

/// Two-point Gauss rule on the reference element `[0, 1]`.
const GAUSS: [(f64, f64); 2] = [
    (0.211_324_865_405_187_1, 0.5),
    (0.788_675_134_594_812_9, 0.5),
];

#[derive(Debug, Clone, PartialEq)]
pub struct WebsterState {
    /// Velocity potential at nodes `0..n_elems` (the node at `s=1` is zero).
    pub psi: Vec<f64>,
    /// Pressure at the same nodes.
    pub pi: Vec<f64>,
}

impl WebsterState {
    pub fn zeros(n: usize) -> Self {
        Self {
            psi: vec![0.0; n],
            pi: vec![0.0; n],
        }
    }

    /// Stacked first-order vector `(ψ, π)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.psi.clone();
        v.extend_from_slice(&self.pi);
        v
    }

    pub fn from_vec(v: &[f64]) -> Self {
        let n = v.len() / 2;
        Self {
            psi: v[..n].to_vec(),
            pi: v[n..].to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WebsterSystem {
    pub geom: TubeGeometry,
    pub consts: PhysicalConstants,
    pub n_elems: usize,
    pub h: f64,
    /// Finite element nodes `s_i = i h`, `i = 0..=n_elems`.
    pub nodes: Vec<f64>,
    /// `∫ A φ_i' φ_j'`
    pub stiffness: CsrMatrix,
    /// `∫ A / c(s)² φ_i φ_j`
    pub mass: CsrMatrix,
    /// `∫ W φ_i φ_j`
    pub damping: CsrMatrix,
    /// Coefficient of the input load at node 0.
    pub b_in: f64,
    /// Boundary absorption `A(0)/c(0)` on `π₀`.
    pub absorb0: f64,
    /// `c(0) = c Σ(0)`.
    pub c0: f64,
    pub area0: f64,
    /// Optional interior load `f(s)` at the free nodes (`ψ_tt += f`).
    pub forcing: Option<Vec<f64>>,
    pub state: WebsterState,
}

impl WebsterSystem {
    pub fn assemble(
        geom: &TubeGeometry,
        consts: PhysicalConstants,
        n_elems: usize,
    ) -> Result<Self> {
        geom.validate()?;
        consts.validate()?;
        if n_elems < 2 {
            return Err(Error::param("n_elems", "must be at least 2"));
        }
        let h = 1.0 / n_elems as f64;
        let nodes: Vec<f64> = (0..=n_elems)
            .map(|i| if i == n_elems { 1.0 } else { i as f64 * h })
            .collect();
        let area: Vec<f64> = nodes.iter().map(|&s| geom.sample(&geom.area, s)).collect();
        let sigma: Vec<f64> = nodes.iter().map(|&s| geom.sample(&geom.sigma, s)).collect();
        let w_str: Vec<f64> = nodes.iter().map(|&s| geom.sample(&geom.w_str, s)).collect();

        let n = n_elems;
        let mut k = TripletBuilder::new(n, n);
        let mut m = TripletBuilder::new(n, n);
        let mut d = TripletBuilder::new(n, n);
        for e in 0..n_elems {
            let a_mean = 0.5 * (area[e] + area[e + 1]);
            let mut me = [[0.0; 2]; 2];
            let mut de = [[0.0; 2]; 2];
            for &(xi, w) in &GAUSS {
                let lin = |v: &[f64]| v[e] * (1.0 - xi) + v[e + 1] * xi;
                let cs = consts.c * lin(&sigma);
                let mass_w = lin(&area) / (cs * cs);
                let damp_w = lin(&w_str);
                let phi = [1.0 - xi, xi];
                for a in 0..2 {
                    for b in 0..2 {
                        me[a][b] += w * h * mass_w * phi[a] * phi[b];
                        de[a][b] += w * h * damp_w * phi[a] * phi[b];
                    }
                }
            }
            let ke = [[1.0, -1.0], [-1.0, 1.0]];
            for a in 0..2 {
                for b in 0..2 {
                    let (i, j) = (e + a, e + b);
                    if i < n && j < n {
                        k.push(i, j, a_mean / h * ke[a][b]);
                        m.push(i, j, me[a][b]);
                        d.push(i, j, de[a][b]);
                    }
                }
            }
        }
        let c0 = consts.c * geom.sigma[0];
        let area0 = geom.area[0];
        let rho = consts.rho;
        Ok(Self {
            geom: geom.clone(),
            consts,
            n_elems,
            h,
            nodes,
            stiffness: k.build(),
            mass: m.build(),
            damping: d.build(),
            b_in: 2.0 * (rho * area0 / c0).sqrt(),
            absorb0: area0 / c0,
            c0,
            area0,
            forcing: None,
            state: WebsterState::zeros(n),
        })
    }

    /// Number of free nodes per field.
    pub fn n(&self) -> usize {
        self.n_elems
    }

    /// `sqrt(A(0) / (ρ c(0)))`, the output weight on `π₀`.
    pub fn output_gain(&self) -> f64 {
        (self.area0 / (self.consts.rho * self.c0)).sqrt()
    }

    pub fn energy(&self, state: &WebsterState) -> f64 {
        let rho = self.consts.rho;
        0.5 * (rho * self.stiffness.quad_form(&state.psi)
            + self.mass.quad_form(&state.pi) / rho)
    }

    /// Wall dissipation power `(2πα/ρ) πᵀ D_w π`.
    pub fn dissipation_power(&self, state: &WebsterState) -> f64 {
        2.0 * PI * self.consts.alpha / self.consts.rho * self.damping.quad_form(&state.pi)
    }

    /// Energy Gram matrix of the first-order state `(ψ, π)`.
    pub fn energy_matrix(&self) -> CsrMatrix {
        let n = self.n();
        let rho = self.consts.rho;
        let mut t = TripletBuilder::new(2 * n, 2 * n);
        for (i, j, v) in self.stiffness.triplets() {
            t.push(i, j, 0.5 * rho * v);
        }
        for (i, j, v) in self.mass.triplets() {
            t.push(n + i, n + j, 0.5 * v / rho);
        }
        t.build()
    }

    /// Exported boundary node on the solution space `(ψ, π, u)`.
    ///
    /// The trace coordinate is the scattering input, so `G z = u` and
    /// `K z = u − sqrt(A(0)/(ρ c(0))) π₀`. For `α > 0` the wall term enters
    /// as `H = diag(0, −2πα M_w⁻¹ D_w)`.
    pub fn node(&self) -> Result<DiscreteNode> {
        let n = self.n();
        let rho = self.consts.rho;
        let big_n = 2 * n + 1;
        let mass = self.mass.to_dense();
        let mass_inv = mass
            .clone()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?
            .inverse();
        let stiff = self.stiffness.to_dense();

        let x_ip = self.energy_matrix().to_dense();
        let mut embed = DMatrix::zeros(2 * n, big_n);
        embed
            .view_mut((0, 0), (2 * n, 2 * n))
            .fill_with_identity();

        let mut l = DMatrix::zeros(2 * n, big_n);
        for i in 0..n {
            l[(i, n + i)] = 1.0 / rho;
        }
        let lower = -rho * (&mass_inv * &stiff);
        l.view_mut((n, 0), (n, n)).copy_from(&lower);
        for i in 0..n {
            l[(n + i, n)] -= mass_inv[(i, 0)] * self.absorb0;
            l[(n + i, 2 * n)] += mass_inv[(i, 0)] * self.b_in;
        }

        let mut g = DMatrix::zeros(1, big_n);
        g[(0, 2 * n)] = 1.0;
        let mut k = DMatrix::zeros(1, big_n);
        k[(0, 2 * n)] = 1.0;
        k[(0, n)] = -self.output_gain();

        let mut node = DiscreteNode::new(x_ip, embed, l, g, k, vec!["end0".into()])?;
        if self.consts.alpha > 0.0 {
            node.h_mat = Some(self.dissipation_operator(&mass_inv));
        }
        Ok(node)
    }

    /// The node of the same tube with hard walls.
    pub fn conservative_node(&self) -> Result<DiscreteNode> {
        let mut node = self.node()?;
        node.h_mat = None;
        Ok(node)
    }

    /// `H_W = diag(0, −2πα M_w⁻¹ D_w)` for the configured `α`.
    pub fn dissipation_matrix(&self) -> Result<DMatrix<f64>> {
        let mass_inv = self
            .mass
            .to_dense()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?
            .inverse();
        Ok(self.dissipation_operator(&mass_inv))
    }

    fn dissipation_operator(&self, mass_inv: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n();
        let mut h = DMatrix::zeros(2 * n, 2 * n);
        let block = -2.0 * PI * self.consts.alpha * (mass_inv * self.damping.to_dense());
        h.view_mut((n, n), (n, n)).copy_from(&block);
        h
    }

    /// First-order system `M ẋ = J x + B u` for the midpoint stepper.
    pub fn linear_system(&self) -> LinearSystem {
        let n = self.n();
        let rho = self.consts.rho;
        let alpha = self.consts.alpha;
        let mut mass = TripletBuilder::new(2 * n, 2 * n);
        let mut dynamics = TripletBuilder::new(2 * n, 2 * n);
        for i in 0..n {
            mass.push(i, i, 1.0);
            dynamics.push(i, n + i, 1.0 / rho);
        }
        for (i, j, v) in self.mass.triplets() {
            mass.push(n + i, n + j, v);
        }
        for (i, j, v) in self.stiffness.triplets() {
            dynamics.push(n + i, j, -rho * v);
        }
        for (i, j, v) in self.damping.triplets() {
            dynamics.push(n + i, n + j, -2.0 * PI * alpha * v);
        }
        dynamics.push(n, n, -self.absorb0);

        let mut input = TripletBuilder::new(2 * n, 1);
        input.push(n, 0, self.b_in);
        let mut output = TripletBuilder::new(1, 2 * n);
        output.push(0, n, -self.output_gain());

        let mut dissipation = Vec::new();
        let mut wall = TripletBuilder::new(2 * n, 2 * n);
        for (i, j, v) in self.damping.triplets() {
            wall.push(n + i, n + j, 2.0 * PI * alpha / rho * v);
        }
        dissipation.push(("wall".to_string(), wall.build()));

        // discrete G of the initial state, with a one-sided flux
        let a = self.output_gain();
        let mut trace = TripletBuilder::new(1, 2 * n);
        trace.push(0, 0, 0.5 * a * rho * self.c0 / self.h);
        trace.push(0, 1, -0.5 * a * rho * self.c0 / self.h);
        trace.push(0, n, 0.5 * a);

        let source = self.forcing.as_ref().map(|f| {
            let mut shape = vec![0.0; 2 * n];
            for (i, &fi) in f.iter().enumerate() {
                shape[n + i] = rho * fi;
            }
            Source::constant(shape)
        });

        LinearSystem {
            mass: mass.build(),
            dynamics: dynamics.build(),
            input: input.build(),
            energy: self.energy_matrix(),
            dissipation,
            output: output.build(),
            feedthrough: CsrMatrix::identity(1),
            channel_weights: vec![1.0],
            channel_groups: vec![ChannelGroup {
                name: "end0".into(),
                start: 0,
                len: 1,
            }],
            source,
            trace: Some(trace.build()),
        }
    }

    /// Interior load `f(s)` sampled at the free nodes.
    pub fn set_forcing(&mut self, f: impl Fn(f64) -> f64) {
        self.forcing = Some(self.nodes[..self.n()].iter().map(|&s| f(s)).collect());
    }
}

/// Builds the system and its exported node.
pub fn assemble_webster(
    geom: &TubeGeometry,
    consts: PhysicalConstants,
    n_elems: usize,
) -> Result<(WebsterSystem, DiscreteNode)> {
    let sys = WebsterSystem::assemble(geom, consts, n_elems)?;
    let node = sys.node()?;
    Ok((sys, node))
}

/// Boundary flux `ψ'(0)` implied by the scattering input relation.
pub fn webster_flux(state: &WebsterState, u: f64, sys: &WebsterSystem) -> f64 {
    let rho = sys.consts.rho;
    (state.pi[0] / rho - 2.0 * (sys.c0 / (rho * sys.area0)).sqrt() * u) / sys.c0
}

/// Scattering output `y = u − sqrt(A(0)/(ρ c(0))) π₀`.
pub fn webster_output(state: &WebsterState, u: f64, sys: &WebsterSystem) -> f64 {
    u - sys.output_gain() * state.pi[0]
}

/// Unit-weight P1 mass and stiffness with the node at `s=1` removed.
pub fn unit_p1_matrices(n_elems: usize) -> (CsrMatrix, CsrMatrix) {
    let h = 1.0 / n_elems as f64;
    let n = n_elems;
    let mut m = TripletBuilder::new(n, n);
    let mut k = TripletBuilder::new(n, n);
    for e in 0..n_elems {
        for a in 0..2 {
            for b in 0..2 {
                let (i, j) = (e + a, e + b);
                if i < n && j < n {
                    let same = a == b;
                    m.push(i, j, if same { h / 3.0 } else { h / 6.0 });
                    k.push(i, j, if same { 1.0 / h } else { -1.0 / h });
                }
            }
        }
    }
    (m.build(), k.build())
}

/// Largest `zᵀM₀z / zᵀK₀z` over P1 functions vanishing at `s=1`, by inverse
/// power iteration. The continuous supremum is `4/π²`.
pub fn poincare_ratio(n_elems: usize) -> Result<f64> {
    if n_elems < 2 {
        return Err(Error::param("n_elems", "must be at least 2"));
    }
    let (m, k) = unit_p1_matrices(n_elems);
    let lu = SparseLu::new(&k)?;
    let mut x = vec![1.0; n_elems];
    let mut ratio = 0.0;
    const MAX_ITERS: usize = 10_000;
    for _ in 0..MAX_ITERS {
        let y = lu.solve(&m.mul_vec(&x))?;
        let next = m.quad_form(&y) / k.quad_form(&y);
        let scale = crate::linalg::norm(&y);
        x = y.iter().map(|v| v / scale).collect();
        if (next - ratio).abs() <= 1e-15 * next {
            return Ok(next);
        }
        ratio = next;
    }
    Err(Error::NoConvergence(MAX_ITERS))
}

/// Stacks `(ψ, π)` for use with [`DiscreteNode`] (trace coordinate `u`).
pub fn solution_vector(state: &WebsterState, u: f64) -> DVector<f64> {
    let mut v = state.to_vec();
    v.push(u);
    DVector::from_vec(v)
}

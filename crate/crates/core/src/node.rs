//! Finite-dimensional boundary nodes `(G, L, K)`.
//!
//! A node lives on a *solution space* of dimension `N` whose vectors `z`
//! carry the state together with boundary trace coordinates (for the
//! scattering models: the input signals). The state is recovered by the
//! embedding `x = E z` and lives in the energy space of dimension `n`,
//! normed by `‖x‖²_X = xᵀ X x`. The interior operator maps `L : R^N → R^n`,
//! while `G` and `K` return the input and output channel values with the
//! channel norms folded in, so `|Gz|²` is the input power.
//!
//! The Green–Lagrange defect
//!
//! ```text
//! d(z) = |Gz|² − |Kz|² − 2 ⟨x, (L + H E) z⟩_X
//! ```
//!
//! vanishes identically for a conservative node and is non-negative for a
//! passive one.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteNode {
    /// Energy Gram matrix `X`, `n × n`.
    pub x_ip: DMatrix<f64>,
    /// State embedding `E`, `n × N`.
    pub embed: DMatrix<f64>,
    /// Interior operator, `n × N`.
    pub l_mat: DMatrix<f64>,
    /// Input channels, `m × N`.
    pub g_mat: DMatrix<f64>,
    /// Output channels, `m × N`.
    pub k_mat: DMatrix<f64>,
    /// Dissipative perturbation acting on the state, `n × n`.
    pub h_mat: Option<DMatrix<f64>>,
    /// One label per channel row.
    pub channel_labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Conservative,
    Passive,
    NotPassive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Conservative => "conservative",
            Verdict::Passive => "passive",
            Verdict::NotPassive => "not-passive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectSample {
    pub defect: f64,
    /// `‖x‖²_X + |Gz|²`
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub samples: usize,
    pub min_defect: f64,
    /// Smallest `defect / scale`.
    pub min_relative_defect: f64,
    /// Largest `|defect| / scale`.
    pub max_abs_identity_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub rows: Vec<DefectSample>,
}

impl DefectReport {
    /// CSV rows `sample,defect,scale` under a versioned schema line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("#schema=1\nsample,defect,scale\n");
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str(&format!("{i},{:e},{:e}\n", r.defect, r.scale));
        }
        out
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{{\"samples\": {}, \"min_defect\": {:e}, \"min_relative_defect\": {:e}, \"max_abs_identity_residual\": {:e}, \"verdict\": \"{}\"}}",
            self.samples,
            self.min_defect,
            self.min_relative_defect,
            self.max_abs_identity_residual,
            self.verdict
        )
    }
}

/// How the dissipation `H` is carried through time-flow inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InversionConvention {
    /// `(K, −L + H, G)`: the adjoint-style inverse, passive whenever the
    /// conservative part is.
    #[default]
    Adjoint,
    /// `(K, −(L + H), G)`: pure time reversal; the defect changes sign.
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelOf {
    G,
    K,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub kernel_of: KernelOf,
    pub samples: usize,
    /// Largest signed residual relative to its scale.
    pub max_residual: f64,
    /// Largest `|residual|` relative to its scale.
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Result of grounding a block of channels.
#[derive(Debug, Clone)]
pub struct GroundedNode {
    pub node: DiscreteNode,
    /// Null-space basis `N` of the grounded input rows; `z = N ζ`.
    pub basis: DMatrix<f64>,
    /// Outputs of the grounded channels, restricted to the kernel.
    pub discarded_k: DMatrix<f64>,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

impl DiscreteNode {
    /// Checks dimensions and that `X` is symmetric positive definite.
    pub fn new(
        x_ip: DMatrix<f64>,
        embed: DMatrix<f64>,
        l_mat: DMatrix<f64>,
        g_mat: DMatrix<f64>,
        k_mat: DMatrix<f64>,
        channel_labels: Vec<String>,
    ) -> Result<Self> {
        let n = x_ip.nrows();
        let big_n = embed.ncols();
        let shape = |name: &str, m: &DMatrix<f64>, r: Option<usize>, c: usize| {
            if r.is_some_and(|r| m.nrows() != r) || m.ncols() != c {
                Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {}x{c}",
                    m.nrows(),
                    m.ncols(),
                    r.map_or("m".to_string(), |r| r.to_string())
                )))
            } else {
                Ok(())
            }
        };
        shape("X", &x_ip, Some(n), n)?;
        shape("E", &embed, Some(n), big_n)?;
        shape("L", &l_mat, Some(n), big_n)?;
        shape("G", &g_mat, None, big_n)?;
        shape("K", &k_mat, None, big_n)?;
        if channel_labels.len() != g_mat.nrows() {
            return Err(Error::Dimension("one channel label per G row".into()));
        }
        let asym = (&x_ip - x_ip.transpose()).amax();
        if asym > 1e-12 * x_ip.amax() || x_ip.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            x_ip,
            embed,
            l_mat,
            g_mat,
            k_mat,
            h_mat: None,
            channel_labels,
        })
    }

    /// Energy-space dimension `n`.
    pub fn dim(&self) -> usize {
        self.x_ip.nrows()
    }

    /// Solution-space dimension `N`.
    pub fn solution_dim(&self) -> usize {
        self.embed.ncols()
    }

    pub fn state_of(&self, z: &DVector<f64>) -> DVector<f64> {
        &self.embed * z
    }

    pub fn energy(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.x_ip * x))
    }

    /// `(L + H E) z`
    pub fn generator_apply(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut v = &self.l_mat * z;
        if let Some(h) = &self.h_mat {
            v += h * self.state_of(z);
        }
        v
    }

    fn check_len(&self, z: &DVector<f64>) -> Result<()> {
        if z.len() == self.solution_dim() {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "vector of length {} for a node with solution dimension {}",
                z.len(),
                self.solution_dim()
            )))
        }
    }

    pub fn gl_defect(&self, z: &DVector<f64>) -> Result<f64> {
        self.check_len(z)?;
        let x = self.state_of(z);
        let gz = (&self.g_mat * z).norm_squared();
        let kz = (&self.k_mat * z).norm_squared();
        let lz = self.generator_apply(z);
        Ok(gz - kz - 2.0 * x.dot(&(&self.x_ip * lz)))
    }

    /// Normalization used by the relative checks: `‖x‖²_X + |Gz|²`.
    pub fn defect_scale(&self, z: &DVector<f64>) -> f64 {
        self.energy(&self.state_of(z)) + (&self.g_mat * z).norm_squared()
    }

    /// Seeded random solution vectors with standard normal entries.
    pub fn samples(&self, n_samples: usize, seed: u64) -> Vec<DVector<f64>> {
        let mut r = rng(seed);
        (0..n_samples)
            .map(|_| normal_vector(&mut r, self.solution_dim()))
            .collect()
    }

    pub fn passivity_check(&self, n_samples: usize, seed: u64, tol: f64) -> DefectReport {
        let rows: Vec<DefectSample> = self
            .samples(n_samples, seed)
            .iter()
            .map(|z| DefectSample {
                defect: self.gl_defect(z).expect("sample length matches"),
                scale: self.defect_scale(z),
            })
            .collect();
        classify(rows, tol)
    }

    pub fn timeflow_inverse(&self, convention: InversionConvention) -> DiscreteNode {
        let (l_mat, h_mat) = match (&self.h_mat, convention) {
            (Some(h), InversionConvention::Reverse) => (-(&self.l_mat + h * &self.embed), None),
            (h, _) => (-&self.l_mat, h.clone()),
        };
        DiscreteNode {
            x_ip: self.x_ip.clone(),
            embed: self.embed.clone(),
            l_mat,
            g_mat: self.k_mat.clone(),
            k_mat: self.g_mat.clone(),
            h_mat,
            channel_labels: self.channel_labels.clone(),
        }
    }

    /// `(G, L + H, K)`, after checking `⟨x, Hx⟩_X ≤ tol ‖x‖²_X` on samples.
    pub fn add_dissipation(
        &self,
        h: &DMatrix<f64>,
        n_samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<DiscreteNode> {
        let n = self.dim();
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::Dimension(format!(
                "H is {}x{}, expected {n}x{n}",
                h.nrows(),
                h.ncols()
            )));
        }
        let xh = &self.x_ip * h;
        let mut r = rng(seed);
        for sample in 0..n_samples {
            let x = normal_vector(&mut r, n);
            let value = x.dot(&(&xh * &x));
            if value > tol * self.energy(&x) {
                return Err(Error::NotDissipative { sample, value });
            }
        }
        let mut out = self.clone();
        out.h_mat = Some(match &self.h_mat {
            Some(old) => old + h,
            None => h.clone(),
        });
        Ok(out)
    }

    /// Checks dissipativity of `L + H` on `ker G` (or of `−L + H` on `ker K`).
    pub fn dissipativity_on_kernel(
        &self,
        kernel_of: KernelOf,
        n_samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<KernelReport> {
        let (c, name, other) = match kernel_of {
            KernelOf::G => (&self.g_mat, "G", &self.k_mat),
            KernelOf::K => (&self.k_mat, "K", &self.g_mat),
        };
        let proj = kernel_projector(c).ok_or(Error::RankDeficient(name))?;
        let sign = if kernel_of == KernelOf::G { 1.0 } else { -1.0 };
        let mut max_residual = f64::NEG_INFINITY;
        let mut max_abs_residual: f64 = 0.0;
        for z in self.samples(n_samples, seed) {
            let z = &proj * z;
            let x = self.state_of(&z);
            let mut v = sign * (&self.l_mat * &z);
            if let Some(h) = &self.h_mat {
                v += h * &x;
            }
            let out = (other * &z).norm_squared();
            let residual = 2.0 * x.dot(&(&self.x_ip * v)) + out;
            let scale = (self.energy(&x) + out).max(f64::MIN_POSITIVE);
            max_residual = max_residual.max(residual / scale);
            max_abs_residual = max_abs_residual.max(residual.abs() / scale);
        }
        if n_samples == 0 {
            max_residual = 0.0;
        }
        Ok(KernelReport {
            kernel_of,
            samples: n_samples,
            max_residual,
            max_abs_residual,
            tolerance: tol,
            passed: max_residual <= tol,
        })
    }

    /// Solves `(L + H E) z = w` subject to `G z = 0`.
    pub fn solve_stationary(&self, w: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.dim();
        let big_n = self.solution_dim();
        let m = self.g_mat.nrows();
        if w.len() != n {
            return Err(Error::Dimension(format!("w has length {}, expected {n}", w.len())));
        }
        if n + m != big_n {
            return Err(Error::Dimension(format!(
                "constrained system is {}x{big_n}, not square",
                n + m
            )));
        }
        let mut a = DMatrix::zeros(big_n, big_n);
        let gen = match &self.h_mat {
            Some(h) => &self.l_mat + h * &self.embed,
            None => self.l_mat.clone(),
        };
        a.view_mut((0, 0), (n, big_n)).copy_from(&gen);
        a.view_mut((n, 0), (m, big_n)).copy_from(&self.g_mat);
        let mut rhs = DVector::zeros(big_n);
        rhs.rows_mut(0, n).copy_from(w);
        let lu = a.clone().full_piv_lu();
        let z = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("constrained stationary system".into()))?;
        // full pivoting still returns garbage for numerically singular input
        let res = (&a * &z - &rhs).norm();
        if !z.iter().all(|v| v.is_finite()) || res > 1e-6 * (rhs.norm() + a.amax() * z.norm()) {
            return Err(Error::Singular("constrained stationary system".into()));
        }
        Ok(z)
    }

    /// Restricts the node to `ker G̃` where `G̃` are the given channel rows,
    /// dropping those channels from both `G` and `K`.
    pub fn grounded(&self, rows: &[usize]) -> Result<GroundedNode> {
        let m = self.g_mat.nrows();
        if rows.iter().any(|&r| r >= m) {
            return Err(Error::Dimension("channel row out of range".into()));
        }
        if self.k_mat.nrows() != m {
            return Err(Error::Dimension("grounding needs matching G and K rows".into()));
        }
        let keep: Vec<usize> = (0..m).filter(|r| !rows.contains(r)).collect();
        let g_tilde = self.g_mat.select_rows(rows.iter());
        let basis = null_space_basis(&g_tilde).ok_or(Error::RankDeficient("G~"))?;
        let node = DiscreteNode {
            x_ip: self.x_ip.clone(),
            embed: &self.embed * &basis,
            l_mat: &self.l_mat * &basis,
            g_mat: self.g_mat.select_rows(keep.iter()) * &basis,
            k_mat: self.k_mat.select_rows(keep.iter()) * &basis,
            h_mat: self.h_mat.clone(),
            channel_labels: keep.iter().map(|&r| self.channel_labels[r].clone()).collect(),
        };
        let discarded_k = self.k_mat.select_rows(rows.iter()) * &basis;
        Ok(GroundedNode {
            node,
            basis,
            discarded_k,
        })
    }
}

fn classify(rows: Vec<DefectSample>, tol: f64) -> DefectReport {
    let mut min_defect = f64::INFINITY;
    let mut min_rel = f64::INFINITY;
    let mut max_abs: f64 = 0.0;
    for r in &rows {
        let scale = r.scale.max(f64::MIN_POSITIVE);
        min_defect = min_defect.min(r.defect);
        min_rel = min_rel.min(r.defect / scale);
        max_abs = max_abs.max(r.defect.abs() / scale);
    }
    if rows.is_empty() {
        (min_defect, min_rel) = (0.0, 0.0);
    }
    let verdict = if max_abs <= tol {
        Verdict::Conservative
    } else if min_rel >= -tol {
        Verdict::Passive
    } else {
        Verdict::NotPassive
    };
    DefectReport {
        samples: rows.len(),
        min_defect,
        min_relative_defect: min_rel,
        max_abs_identity_residual: max_abs,
        tolerance: tol,
        verdict,
        rows,
    }
}

fn has_full_row_rank(c: &DMatrix<f64>) -> bool {
    if c.nrows() == 0 {
        return true;
    }
    if c.nrows() > c.ncols() {
        return false;
    }
    let sv = c.clone().svd(false, false).singular_values;
    let max = sv.max();
    max > 0.0 && sv.min() > 1e-12 * max
}

/// Orthogonal projector onto `ker C`; `None` when `C` lacks full row rank.
pub fn kernel_projector(c: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if !has_full_row_rank(c) {
        return None;
    }
    let gram = c * c.transpose();
    let chol = gram.cholesky()?;
    let n = c.ncols();
    Some(DMatrix::identity(n, n) - c.transpose() * chol.solve(c))
}

/// Basis of `ker C` from the reduced row echelon form of `C`.
pub fn null_space_basis(c: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if !has_full_row_rank(c) {
        return None;
    }
    let (m, n) = c.shape();
    let mut r = c.clone();
    let mut pivots = Vec::with_capacity(m);
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (best, val) = (row..m)
            .map(|i| (i, r[(i, col)].abs()))
            .fold((row, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        if val <= 1e-12 * c.amax() {
            continue;
        }
        r.swap_rows(row, best);
        let p = r[(row, col)];
        for j in 0..n {
            r[(row, j)] /= p;
        }
        for i in 0..m {
            if i != row {
                let f = r[(i, col)];
                if f != 0.0 {
                    for j in 0..n {
                        r[(i, j)] -= f * r[(row, j)];
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let mut basis = DMatrix::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis[(f, k)] = 1.0;
        for (i, &p) in pivots.iter().enumerate() {
            basis[(p, k)] = -r[(i, f)];
        }
    }
    Some(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Lossless LC-type line with a scattering port, built by hand:
    /// state (q, p), energy ½(q² + p²), trace coordinate u.
    fn toy_node() -> DiscreteNode {
        // q̇ = p, ṗ = −q − a² p + 2 a u, y = u − a p  ⇒  d/dt E = u² − y²
        let a = 0.7;
        let x = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5]));
        let e = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let l = DMatrix::from_row_slice(2, 3, &[0.0, 1.0, 0.0, -1.0, -a * a, 2.0 * a]);
        let g = DMatrix::from_row_slice(1, 3, &[0.0, 0.0, 1.0]);
        let k = DMatrix::from_row_slice(1, 3, &[0.0, -a, 1.0]);
        DiscreteNode::new(x, e, l, g, k, vec!["port".into()]).unwrap()
    }

    #[test]
    fn defect_of_zero_is_zero() {
        let node = toy_node();
        assert_eq!(node.gl_defect(&DVector::zeros(3)).unwrap(), 0.0);
        assert!(node.gl_defect(&DVector::zeros(2)).is_err());
    }

    #[test]
    fn toy_node_is_conservative() {
        let r = toy_node().passivity_check(50, 7, 1e-12);
        assert_eq!(r.verdict, Verdict::Conservative);
        assert!(r.to_csv().starts_with("#schema=1\nsample,defect,scale\n0,"));
        assert!(r.summary_line().contains("\"verdict\": \"conservative\""));
    }

    #[test]
    fn non_spd_energy_is_rejected() {
        let node = toy_node();
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            DiscreteNode::new(bad, node.embed, node.l_mat, node.g_mat, node.k_mat, node.channel_labels),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn inversion_is_an_involution_without_h() {
        let node = toy_node();
        let back = node
            .timeflow_inverse(InversionConvention::Adjoint)
            .timeflow_inverse(InversionConvention::Adjoint);
        assert_eq!(back, node);
    }

    #[test]
    fn dissipation_raises_defect_by_exact_amount() {
        let node = toy_node();
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, -0.3]);
        let damped = node.add_dissipation(&h, 20, 1, 0.0).unwrap();
        for z in node.samples(20, 3) {
            let x = node.state_of(&z);
            let extra = -2.0 * x.dot(&(&node.x_ip * &h * &x));
            let d0 = node.gl_defect(&z).unwrap();
            let d1 = damped.gl_defect(&z).unwrap();
            assert!(d1 >= d0);
            assert_relative_eq!(d1 - d0, extra, epsilon = 1e-12);
        }
        assert_eq!(damped.passivity_check(30, 2, 1e-12).verdict, Verdict::Passive);

        let zero = DMatrix::zeros(2, 2);
        let same = node.add_dissipation(&zero, 5, 1, 0.0).unwrap();
        for z in node.samples(5, 9) {
            assert_eq!(same.gl_defect(&z).unwrap(), node.gl_defect(&z).unwrap());
        }

        let anti = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.0]);
        assert!(matches!(
            node.add_dissipation(&anti, 5, 1, 0.0),
            Err(Error::NotDissipative { .. })
        ));
    }

    #[test]
    fn reverse_inversion_flips_defect_sign() {
        let node = toy_node();
        let h = DMatrix::from_row_slice(2, 2, &[-0.2, 0.0, 0.0, -0.3]);
        let damped = node.add_dissipation(&h, 5, 1, 0.0).unwrap();
        let rev = damped.timeflow_inverse(InversionConvention::Reverse);
        for z in node.samples(10, 4) {
            let d = damped.gl_defect(&z).unwrap();
            let di = rev.gl_defect(&z).unwrap();
            assert_relative_eq!(di, -d, epsilon = 1e-12);
        }
        assert_eq!(rev.passivity_check(20, 5, 1e-12).verdict, Verdict::NotPassive);
        let adj = damped.timeflow_inverse(InversionConvention::Adjoint);
        assert_eq!(adj.passivity_check(20, 5, 1e-12).verdict, Verdict::Passive);
    }

    #[test]
    fn kernel_dissipativity_on_toy_node() {
        let node = toy_node();
        let r = node.dissipativity_on_kernel(KernelOf::G, 20, 1, 1e-12).unwrap();
        assert!(r.passed && r.max_abs_residual < 1e-12);
        let r = node.dissipativity_on_kernel(KernelOf::K, 20, 1, 1e-12).unwrap();
        assert!(r.passed);

        let mut bad = node.clone();
        bad.g_mat = DMatrix::zeros(1, 3);
        assert!(matches!(
            bad.dissipativity_on_kernel(KernelOf::G, 3, 1, 1e-12),
            Err(Error::RankDeficient("G"))
        ));
    }

    #[test]
    fn stationary_solve_on_toy_node() {
        let node = toy_node();
        assert_eq!(node.solve_stationary(&DVector::zeros(2)).unwrap(), DVector::zeros(3));
        let w = DVector::from_vec(vec![0.3, -1.2]);
        let z = node.solve_stationary(&w).unwrap();
        assert!((node.generator_apply(&z) - &w).norm() < 1e-14);
        assert!((&node.g_mat * &z).norm() < 1e-14);
    }

    #[test]
    fn null_space_basis_spans_kernel() {
        let c = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 0.0, 1.0, 0.0, 1.0, 1.0, -1.0]);
        let b = null_space_basis(&c).unwrap();
        assert_eq!(b.shape(), (4, 2));
        assert!((&c * &b).amax() < 1e-14);
        assert_eq!(b.clone().svd(false, false).rank(1e-12), 2);
        let p = kernel_projector(&c).unwrap();
        assert!((&c * &p).amax() < 1e-14);
    }

    #[test]
    fn grounding_a_channel_leaves_discarded_power_as_defect() {
        // two ports sharing one oscillator; grounding the second
        let a = 0.5;
        let b = 1.3;
        let x = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5]));
        let e = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let l = DMatrix::from_row_slice(
            2,
            4,
            &[0.0, 1.0, 0.0, 0.0, -1.0, -a * a - b * b, 2.0 * a, 2.0 * b],
        );
        let g = DMatrix::from_row_slice(2, 4, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let k = DMatrix::from_row_slice(2, 4, &[0.0, -a, 1.0, 0.0, 0.0, -b, 0.0, 1.0]);
        let node = DiscreteNode::new(x, e, l, g, k, vec!["end".into(), "wall".into()]).unwrap();
        assert_eq!(node.passivity_check(20, 1, 1e-12).verdict, Verdict::Conservative);
        let grounded = node.grounded(&[1]).unwrap();
        assert_eq!(grounded.node.channel_labels, vec!["end".to_string()]);
        let mut r = rng(11);
        for _ in 0..20 {
            let zeta = normal_vector(&mut r, grounded.basis.ncols());
            let d = grounded.node.gl_defect(&zeta).unwrap();
            let lost = (&grounded.discarded_k * &zeta).norm_squared();
            assert_relative_eq!(d, lost, epsilon = 1e-12, max_relative = 1e-12);
        }
        assert_eq!(
            grounded.node.passivity_check(20, 3, 1e-12).verdict,
            Verdict::Passive
        );
    }
}

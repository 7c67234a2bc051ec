//! Tube geometry on normalized arc length `s ∈ [0, 1]`.
//!
//! A tube is described by its radius `R(s)`, the derivative `R'(s)` and the
//! centreline curvature `κ(s)`. Everything the two wave models consume is
//! derived from these three fields.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Sampled tube with derived fields, on a uniform grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeGeometry {
    pub s: Vec<f64>,
    /// Radius `R(s)` in metres.
    pub radius: Vec<f64>,
    /// `R'(s)` per unit of normalized arc length.
    pub radius_deriv: Vec<f64>,
    pub kappa: Vec<f64>,
    /// Cross-sectional area `π R²`.
    pub area: Vec<f64>,
    /// Curvature ratio `η = R κ`.
    pub eta: Vec<f64>,
    /// Sound speed correction factor `Σ = (1 + η²/4)^(-1/2)`.
    pub sigma: Vec<f64>,
    /// Stretching factor `W = R sqrt(R'² + (η - 1)²)`.
    pub w_str: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Base sound speed; the Webster model uses `c(s) = c Σ(s)`.
    pub c: f64,
    pub rho: f64,
    /// Wall dissipation parameter.
    pub alpha: f64,
}

impl PhysicalConstants {
    pub fn new(c: f64, rho: f64, alpha: f64) -> Result<Self> {
        let k = Self { c, rho, alpha };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::param("c", "must be positive"));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::param("rho", "must be positive"));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", "must be non-negative"));
        }
        Ok(())
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }
}

impl Default for PhysicalConstants {
    /// Air at room temperature, hard walls.
    fn default() -> Self {
        Self {
            c: 343.0,
            rho: 1.2,
            alpha: 0.0,
        }
    }
}

/// First violated geometry invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryDiagnostic {
    #[error("too few samples ({0}); at least 3 are required")]
    TooFewSamples(usize),
    #[error("field `{field}` has length {len}, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        len: usize,
        expected: usize,
    },
    #[error("grid must start at s=0 and end at s=1")]
    GridEndpoints,
    #[error("non-monotone grid at index {0}")]
    NonMonotoneGrid(usize),
    #[error("non-finite value in `{field}` at index {index}")]
    NonFinite { field: &'static str, index: usize },
    #[error("non-positive radius at index {0}")]
    NonPositiveRadius(usize),
    #[error("eta ≥ 1 at index {index} (eta = {eta})")]
    CurvatureRatio { index: usize, eta: f64 },
    #[error("derived field `{field}` inconsistent at index {index}")]
    Inconsistent { field: &'static str, index: usize },
}

/// Elementwise `(A, η, Σ, W)` from `(R, R', κ)`.
pub fn derived_fields(
    radius: &[f64],
    radius_deriv: &[f64],
    kappa: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    assert!(radius.len() == radius_deriv.len() && radius.len() == kappa.len());
    let n = radius.len();
    let mut area = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut w_str = Vec::with_capacity(n);
    for i in 0..n {
        let r = radius[i];
        let e = r * kappa[i];
        area.push(PI * r * r);
        eta.push(e);
        sigma.push(1.0 / (1.0 + 0.25 * e * e).sqrt());
        w_str.push(r * (radius_deriv[i].powi(2) + (e - 1.0).powi(2)).sqrt());
    }
    (area, eta, sigma, w_str)
}

/// Analytic and tabulated radius profiles.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant { r0: f64, kappa: f64 },
    /// Linear radius from `r0` at `s=0` to `r1` at `s=1`.
    Cone { r0: f64, r1: f64, kappa: f64 },
    /// `R(s) = r0 (r1/r0)^s`.
    ExponentialHorn { r0: f64, r1: f64, kappa: f64 },
    /// `R(s) = r0 (1 + amplitude (1 - cos 2πs)/2)`.
    CosineBump { r0: f64, amplitude: f64, kappa: f64 },
    /// Samples on an arbitrary increasing grid; resampled linearly.
    Tabulated {
        s: Vec<f64>,
        radius: Vec<f64>,
        kappa: Vec<f64>,
        radius_deriv: Option<Vec<f64>>,
    },
}

impl Profile {
    /// Builds an analytic profile from a kind name and keyed parameters.
    ///
    /// Missing `kappa` defaults to zero. Tabulated profiles come from
    /// [`Profile::from_csv`] instead.
    pub fn from_params(kind: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |k: &str| {
            params
                .get(k)
                .copied()
                .ok_or_else(|| Error::param(k, format!("required for profile `{kind}`")))
        };
        let kappa = params.get("kappa").copied().unwrap_or(0.0);
        match kind {
            "constant" => Ok(Profile::Constant {
                r0: get("r0")?,
                kappa,
            }),
            "cone" => Ok(Profile::Cone {
                r0: get("r0")?,
                r1: get("r1")?,
                kappa,
            }),
            "exponential" | "exponential_horn" => Ok(Profile::ExponentialHorn {
                r0: get("r0")?,
                r1: get("r1")?,
                kappa,
            }),
            "cosine_bump" => Ok(Profile::CosineBump {
                r0: get("r0")?,
                amplitude: get("amplitude")?,
                kappa,
            }),
            other => Err(Error::UnknownKind {
                what: "profile",
                kind: other.to_string(),
            }),
        }
    }

    /// Reads a table with header `s,R,kappa` and an optional `Rp` column.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = rdr.headers()?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let (is, ir, ik) = match (col("s"), col("R"), col("kappa")) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(Error::param("table", "header must contain s,R,kappa")),
        };
        let irp = col("Rp");
        let (mut s, mut radius, mut kappa, mut rp) = (vec![], vec![], vec![], vec![]);
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let num = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::param("table", format!("bad number on data row {line}")))
            };
            s.push(num(is)?);
            radius.push(num(ir)?);
            kappa.push(num(ik)?);
            if let Some(i) = irp {
                rp.push(num(i)?);
            }
        }
        Ok(Profile::Tabulated {
            s,
            radius,
            kappa,
            radius_deriv: irp.map(|_| rp),
        })
    }

    fn check_radius(name: &str, r: f64) -> Result<()> {
        if r > 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::param(name, "radius must be positive"))
        }
    }

    /// Samples the profile on a uniform grid with `n_samples` points.
    pub fn build(&self, n_samples: usize) -> Result<TubeGeometry> {
        if n_samples < 3 {
            return Err(Error::param("n_samples", "must be at least 3"));
        }
        let s = uniform_grid(n_samples);
        let constant = |k: f64| vec![k; n_samples];
        let (radius, radius_deriv, kappa) = match self {
            &Profile::Constant { r0, kappa } => {
                Self::check_radius("r0", r0)?;
                (constant(r0), constant(0.0), constant(kappa))
            }
            &Profile::Cone { r0, r1, kappa } => {
                Self::check_radius("r0", r0)?;
                Self::check_radius("r1", r1)?;
                let r = s.iter().map(|&x| r0 + (r1 - r0) * x).collect();
                (r, constant(r1 - r0), constant(kappa))
            }
            &Profile::ExponentialHorn { r0, r1, kappa } => {
                Self::check_radius("r0", r0)?;
                Self::check_radius("r1", r1)?;
                let rate = (r1 / r0).ln();
                let r: Vec<f64> = s.iter().map(|&x| r0 * (rate * x).exp()).collect();
                let rp = r.iter().map(|&v| rate * v).collect();
                (r, rp, constant(kappa))
            }
            &Profile::CosineBump {
                r0,
                amplitude,
                kappa,
            } => {
                Self::check_radius("r0", r0)?;
                if amplitude <= -1.0 {
                    return Err(Error::param("amplitude", "radius must stay positive"));
                }
                let r = s
                    .iter()
                    .map(|&x| r0 * (1.0 + 0.5 * amplitude * (1.0 - (2.0 * PI * x).cos())))
                    .collect();
                let rp = s
                    .iter()
                    .map(|&x| r0 * amplitude * PI * (2.0 * PI * x).sin())
                    .collect();
                (r, rp, constant(kappa))
            }
            Profile::Tabulated {
                s: ts,
                radius: tr,
                kappa: tk,
                radius_deriv: trp,
            } => {
                let n = ts.len();
                if tr.len() != n || tk.len() != n || trp.as_ref().is_some_and(|v| v.len() != n)
                {
                    return Err(Error::param("table", "column lengths differ"));
                }
                if n < 2 {
                    return Err(Error::param("table", "need at least two rows"));
                }
                if ts.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::param("table", "s must be strictly increasing"));
                }
                if (ts[0] - 0.0).abs() > 1e-12 || (ts[n - 1] - 1.0).abs() > 1e-12 {
                    return Err(Error::param("table", "s must span [0, 1]"));
                }
                if let Some(i) = tr.iter().position(|&r| !(r > 0.0)) {
                    return Err(Error::param("table", format!("non-positive radius in row {i}")));
                }
                let r: Vec<f64> = s.iter().map(|&x| interp_linear(ts, tr, x)).collect();
                let k = s.iter().map(|&x| interp_linear(ts, tk, x)).collect();
                let rp = match trp {
                    Some(v) => s.iter().map(|&x| interp_linear(ts, v, x)).collect(),
                    None => central_difference(&r, s[1] - s[0]),
                };
                (r, rp, k)
            }
        };
        Ok(TubeGeometry::from_samples(s, radius, radius_deriv, kappa))
    }
}

/// `build_profile` with a string kind, as used by configuration files.
pub fn build_profile(
    kind: &str,
    params: &BTreeMap<String, f64>,
    n_samples: usize,
) -> Result<TubeGeometry> {
    Profile::from_params(kind, params)?.build(n_samples)
}

pub fn uniform_grid(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { 1.0 } else { i as f64 * h })
        .collect()
}

/// Piecewise-linear interpolation; `xs` strictly increasing, `x` clamped.
pub fn interp_linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let k = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
    let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}

/// Second-order differences on a uniform grid, one-sided at the ends.
pub fn central_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
            } else {
                (f[i + 1] - f[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

impl TubeGeometry {
    pub fn from_samples(
        s: Vec<f64>,
        radius: Vec<f64>,
        radius_deriv: Vec<f64>,
        kappa: Vec<f64>,
    ) -> Self {
        let (area, eta, sigma, w_str) = derived_fields(&radius, &radius_deriv, &kappa);
        Self {
            s,
            radius,
            radius_deriv,
            kappa,
            area,
            eta,
            sigma,
            w_str,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.s.len()
    }

    /// Effective sound speed `c Σ(s)` at each sample.
    pub fn sound_speed(&self, c: f64) -> Vec<f64> {
        self.sigma.iter().map(|&sg| c * sg).collect()
    }

    /// True when radius and curvature are constant and the tube is straight.
    pub fn is_straight_cylinder(&self) -> bool {
        let r0 = self.radius[0];
        self.radius
            .iter()
            .all(|&r| (r - r0).abs() <= 1e-12 * r0)
            && self.kappa.iter().all(|&k| k == 0.0)
    }

    /// Linear interpolation of a sampled field at `s`.
    pub fn sample(&self, field: &[f64], s: f64) -> f64 {
        interp_linear(&self.s, field, s)
    }

    /// Checks every invariant; the diagnostic names the first violation.
    pub fn validate(&self) -> Result<(), GeometryDiagnostic> {
        let n = self.s.len();
        if n < 3 {
            return Err(GeometryDiagnostic::TooFewSamples(n));
        }
        let fields: [(&'static str, &Vec<f64>); 8] = [
            ("s", &self.s),
            ("R", &self.radius),
            ("Rp", &self.radius_deriv),
            ("kappa", &self.kappa),
            ("A", &self.area),
            ("eta", &self.eta),
            ("sigma", &self.sigma),
            ("w_str", &self.w_str),
        ];
        for (field, v) in fields {
            if v.len() != n {
                return Err(GeometryDiagnostic::LengthMismatch {
                    field,
                    len: v.len(),
                    expected: n,
                });
            }
            if let Some(index) = v.iter().position(|x| !x.is_finite()) {
                return Err(GeometryDiagnostic::NonFinite { field, index });
            }
        }
        if self.s[0] != 0.0 || self.s[n - 1] != 1.0 {
            return Err(GeometryDiagnostic::GridEndpoints);
        }
        if let Some(i) = self.s.windows(2).position(|w| w[1] <= w[0]) {
            return Err(GeometryDiagnostic::NonMonotoneGrid(i + 1));
        }
        if let Some(i) = self.radius.iter().position(|&r| r <= 0.0) {
            return Err(GeometryDiagnostic::NonPositiveRadius(i));
        }
        if let Some(i) = self.eta.iter().position(|&e| e >= 1.0) {
            return Err(GeometryDiagnostic::CurvatureRatio {
                index: i,
                eta: self.eta[i],
            });
        }
        let (area, eta, sigma, w_str) =
            derived_fields(&self.radius, &self.radius_deriv, &self.kappa);
        let derived: [(&'static str, &Vec<f64>, &Vec<f64>); 4] = [
            ("A", &area, &self.area),
            ("eta", &eta, &self.eta),
            ("sigma", &sigma, &self.sigma),
            ("w_str", &w_str, &self.w_str),
        ];
        for (field, want, have) in derived {
            if let Some(index) = want
                .iter()
                .zip(have.iter())
                .position(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1e-300))
            {
                return Err(GeometryDiagnostic::Inconsistent { field, index });
            }
        }
        Ok(())
    }
}

impl fmt::Display for TubeGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        write!(
            f,
            "{} samples, R in [{:.4e}, {:.4e}] m, eta in [{:.4}, {:.4}], sigma in [{:.6}, {:.6}]",
            self.n_samples(),
            min(&self.radius),
            max(&self.radius),
            min(&self.eta),
            max(&self.eta),
            min(&self.sigma),
            max(&self.sigma)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn straight_constant_tube() {
        let g = build_profile("constant", &params(&[("r0", 0.01)]), 5).unwrap();
        assert_eq!(g.radius, vec![0.01; 5]);
        assert_eq!(g.eta, vec![0.0; 5]);
        assert_eq!(g.sigma, vec![1.0; 5]);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn curved_constant_tube() {
        let g = build_profile("constant", &params(&[("r0", 0.01), ("kappa", 50.0)]), 5).unwrap();
        for i in 0..5 {
            assert_relative_eq!(g.eta[i], 0.5, max_relative = 1e-15);
            // (1 + 0.0625)^(-1/2)
            assert_relative_eq!(g.sigma[i], 0.970_142_500_145_332, max_relative = 1e-14);
            assert_relative_eq!(g.w_str[i], 0.005, max_relative = 1e-14);
        }
    }

    #[test]
    fn cone_derivative_and_stretching() {
        let g = build_profile("cone", &params(&[("r0", 0.01), ("r1", 0.015)]), 3).unwrap();
        for i in 0..3 {
            assert_relative_eq!(g.radius_deriv[i], 0.005, max_relative = 1e-12);
            let want = g.radius[i] * (0.005f64 * 0.005 + 1.0).sqrt();
            assert_relative_eq!(g.w_str[i], want, max_relative = 1e-14);
        }
        assert_relative_eq!(g.radius[1], 0.0125, max_relative = 1e-15);
    }

    #[test]
    fn derived_field_examples() {
        let (a, e, s, w) = derived_fields(&[0.01], &[0.0], &[0.0]);
        assert_relative_eq!(a[0], 3.141_592_653_589_793e-4, max_relative = 1e-15);
        assert_eq!((e[0], s[0]), (0.0, 1.0));
        assert_relative_eq!(w[0], 0.01, max_relative = 1e-15);

        let (_, e, s, w) = derived_fields(&[0.01], &[0.0], &[100.0]);
        assert_relative_eq!(e[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(s[0], 0.894_427_190_999_915_9, max_relative = 1e-14);
        assert!(w[0].abs() < 1e-17);

        let (_, _, _, w) = derived_fields(&[0.02], &[0.01], &[0.0]);
        assert_relative_eq!(w[0], 0.020_000_999_975_001_25, max_relative = 1e-13);
    }

    #[test]
    fn validation_diagnostics() {
        let g = build_profile("constant", &params(&[("r0", 0.01), ("kappa", 150.0)]), 5).unwrap();
        let d = g.validate().unwrap_err();
        assert!(matches!(d, GeometryDiagnostic::CurvatureRatio { index: 0, .. }));
        assert!(d.to_string().starts_with("eta ≥ 1 at index 0"));

        let mut g = build_profile("constant", &params(&[("r0", 0.01)]), 5).unwrap();
        g.radius[2] = 0.0;
        let (a, e, s, w) = derived_fields(&g.radius, &g.radius_deriv, &g.kappa);
        (g.area, g.eta, g.sigma, g.w_str) = (a, e, s, w);
        let d = g.validate().unwrap_err();
        assert_eq!(d, GeometryDiagnostic::NonPositiveRadius(2));
        assert!(d.to_string().contains("non-positive radius"));

        let mut g = build_profile("constant", &params(&[("r0", 0.01)]), 5).unwrap();
        g.s.swap(1, 2);
        assert_eq!(g.validate().unwrap_err(), GeometryDiagnostic::NonMonotoneGrid(2));
    }

    #[test]
    fn profile_errors() {
        assert!(matches!(
            build_profile("spiral", &params(&[("r0", 0.01)]), 5),
            Err(Error::UnknownKind { .. })
        ));
        assert!(build_profile("constant", &params(&[("r0", -0.01)]), 5).is_err());
        assert!(build_profile("constant", &params(&[("r0", 0.01)]), 2).is_err());
        let bad = Profile::Tabulated {
            s: vec![0.0, 1.0],
            radius: vec![0.01],
            kappa: vec![0.0, 0.0],
            radius_deriv: None,
        };
        assert!(bad.build(5).is_err());
    }

    #[test]
    fn tabulated_profile_resamples_linearly() {
        let table = Profile::Tabulated {
            s: vec![0.0, 0.5, 1.0],
            radius: vec![0.01, 0.02, 0.02],
            kappa: vec![0.0, 0.0, 0.0],
            radius_deriv: None,
        };
        let g = table.build(5).unwrap();
        assert_relative_eq!(g.radius[1], 0.015, max_relative = 1e-14);
        assert_relative_eq!(g.radius[3], 0.02, max_relative = 1e-14);
        // interior central difference across the kink
        assert_relative_eq!(g.radius_deriv[1], 0.02, max_relative = 1e-12);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn tabulated_profile_from_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tube.csv");
        std::fs::write(&path, "s,R,kappa\n0,0.01,0\n0.5,0.012,1\n1,0.01,0\n").unwrap();
        let g = Profile::from_csv(&path).unwrap().build(11).unwrap();
        assert_relative_eq!(g.radius[5], 0.012, max_relative = 1e-14);
        assert_relative_eq!(g.kappa[5], 1.0, max_relative = 1e-14);
        std::fs::write(&path, "s,radius\n0,1\n").unwrap();
        assert!(Profile::from_csv(&path).is_err());
    }

    proptest! {
        #[test]
        fn sigma_bounds_and_monotone(r in 1e-3f64..0.05, k1 in 0.0f64..1.0, k2 in 0.0f64..1.0) {
            // eta = r κ in [0, 1)
            let (lo, hi) = if k1 < k2 { (k1, k2) } else { (k2, k1) };
            let kap = [lo / r * 0.999, hi / r * 0.999];
            let (_, eta, sigma, w) = derived_fields(&[r, r], &[0.0, 0.0], &kap);
            for i in 0..2 {
                prop_assert!(eta[i] < 1.0);
                prop_assert!(sigma[i] > 2.0 / 5f64.sqrt() && sigma[i] <= 1.0);
                prop_assert!(w[i] >= 0.0);
            }
            prop_assert!(sigma[1] <= sigma[0]);
        }

        #[test]
        fn derived_fields_are_pure(r in 1e-3f64..0.05, rp in -0.1f64..0.1, k in -20.0f64..20.0) {
            let a = derived_fields(&[r], &[rp], &[k]);
            let b = derived_fields(&[r], &[rp], &[k]);
            prop_assert_eq!(a, b);
        }
    }
}

//! Sectioned `key = value` run configuration.
//!
//! ```text
//! [geometry]
//! kind = cone
//! r0 = 0.01
//! r1 = 0.02
//!
//! [physics]
//! alpha = 0.5
//! ```
//!
//! Lines starting with `#` or `;` are comments. Unknown sections or keys are
//! errors. Relative file paths resolve against the config file's directory.
//! [`SimulationConfig::to_ini`] writes every resolved value back in the same
//! format, with floats in shortest round-trip notation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{PhysicalConstants, Profile, TubeGeometry};
use crate::stepper::InputSignal;

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub kind: String,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub kappa: f64,
    pub amplitude: Option<f64>,
    pub table: Option<PathBuf>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsConfig {
    pub c: f64,
    pub rho: f64,
    pub alpha: f64,
    /// Uniform interior damping `g ≤ 0` for the cylinder.
    pub g_damp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizationConfig {
    pub n_elems: usize,
    pub ns: usize,
    pub nr: usize,
    pub dt: f64,
    pub t_final: f64,
    pub record_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputConfig {
    pub kind: String,
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub frequency: f64,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub prefix: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub n_defect_samples: usize,
    pub seed: u64,
    /// Relative tolerance of the node identities.
    pub rtol: f64,
    /// Relative per-step tolerance of the energy ledgers.
    pub ledger_rtol: f64,
    /// Allowed relative L² gap in `compare-averages`.
    pub compare_tol: f64,
    /// Number of evenly spaced `s` samples in `compare-averages`.
    pub s_samples: usize,
    /// Test hook: scales the assembled `L` before verification.
    pub corrupt_l_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub geometry: GeometryConfig,
    pub physics: PhysicsConfig,
    pub discretization: DiscretizationConfig,
    pub input: InputConfig,
    pub output: OutputConfig,
    pub verify: VerifyConfig,
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

const KEYS: &[(&str, &[&str])] = &[
    (
        "geometry",
        &["kind", "r0", "r1", "kappa", "amplitude", "table", "n_samples"],
    ),
    ("physics", &["c", "rho", "alpha", "g_damp"]),
    (
        "discretization",
        &["n_elems", "ns", "nr", "dt", "t_final", "record_stride"],
    ),
    (
        "input",
        &["kind", "amplitude", "center", "width", "frequency", "file"],
    ),
    ("output", &["directory", "prefix"]),
    (
        "verify",
        &[
            "n_defect_samples",
            "seed",
            "rtol",
            "ledger_rtol",
            "compare_tol",
            "s_samples",
            "corrupt_l_scale",
        ],
    ),
];

fn split_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(Error::config(name, "unknown section"));
            }
            out.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(
                format!("line {}", lineno + 1),
                "expected `key = value` or `[section]`",
            ));
        };
        let Some(section) = &current else {
            return Err(Error::config(key.trim(), "key outside of any section"));
        };
        let key = key.trim().to_string();
        let path = format!("{section}.{key}");
        let allowed = KEYS.iter().find(|(s, _)| s == section).unwrap().1;
        if !allowed.contains(&key.as_str()) {
            return Err(Error::config(path, "unknown key"));
        }
        let entries = out.get_mut(section).unwrap();
        if entries.insert(key, value.trim().to_string()).is_some() {
            return Err(Error::config(path, "duplicate key"));
        }
    }
    Ok(out)
}

struct Reader<'a> {
    sections: &'a Sections,
    base: &'a Path,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(String::as_str)
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.raw(section, key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        Error::config(format!("{section}.{key}"), format!("expected a number, got `{v}`"))
                    })
            })
            .transpose()
    }

    fn float_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self.float(section, key)?.unwrap_or(default))
    }

    fn int_or(&self, section: &str, key: &str, default: u64) -> Result<u64> {
        match self.raw(section, key) {
            None => Ok(default),
            Some(v) => v.parse::<u64>().map_err(|_| {
                Error::config(
                    format!("{section}.{key}"),
                    format!("expected a non-negative integer, got `{v}`"),
                )
            }),
        }
    }

    fn string(&self, section: &str, key: &str) -> Option<String> {
        self.raw(section, key).map(str::to_string)
    }

    fn path(&self, section: &str, key: &str) -> Option<PathBuf> {
        self.raw(section, key).map(|v| self.base.join(v))
    }
}

fn range(ok: bool, key: &str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(key, reason))
    }
}

impl SimulationConfig {
    /// Parses text; relative paths resolve against `base`.
    pub fn parse_str(text: &str, base: &Path) -> Result<Self> {
        let sections = split_sections(text)?;
        let r = Reader {
            sections: &sections,
            base,
        };
        let geometry = GeometryConfig {
            kind: r
                .string("geometry", "kind")
                .ok_or_else(|| Error::config("geometry.kind", "missing required key"))?,
            r0: r.float("geometry", "r0")?,
            r1: r.float("geometry", "r1")?,
            kappa: r.float_or("geometry", "kappa", 0.0)?,
            amplitude: r.float("geometry", "amplitude")?,
            table: r.path("geometry", "table"),
            n_samples: r.int_or("geometry", "n_samples", 401)? as usize,
        };
        let physics = PhysicsConfig {
            c: r.float_or("physics", "c", 343.0)?,
            rho: r.float_or("physics", "rho", 1.2)?,
            alpha: r.float_or("physics", "alpha", 0.0)?,
            g_damp: r.float_or("physics", "g_damp", 0.0)?,
        };
        let discretization = DiscretizationConfig {
            n_elems: r.int_or("discretization", "n_elems", 200)? as usize,
            ns: r.int_or("discretization", "ns", 300)? as usize,
            nr: r.int_or("discretization", "nr", 24)? as usize,
            dt: r.float_or("discretization", "dt", 1e-4)?,
            t_final: r.float_or("discretization", "t_final", 0.02)?,
            record_stride: r.int_or("discretization", "record_stride", 0)? as usize,
        };
        let input = InputConfig {
            kind: r
                .string("input", "kind")
                .unwrap_or_else(|| "gaussian".into()),
            amplitude: r.float_or("input", "amplitude", 1.0)?,
            center: r.float_or("input", "center", 2e-3)?,
            width: r.float_or("input", "width", 2.5e-4)?,
            frequency: r.float_or("input", "frequency", 500.0)?,
            file: r.path("input", "file"),
        };
        let output = OutputConfig {
            directory: r
                .path("output", "directory")
                .unwrap_or_else(|| base.join("out")),
            prefix: r.string("output", "prefix").unwrap_or_else(|| "run".into()),
        };
        let verify = VerifyConfig {
            n_defect_samples: r.int_or("verify", "n_defect_samples", 100)? as usize,
            seed: r.int_or("verify", "seed", 42)?,
            rtol: r.float_or("verify", "rtol", 1e-10)?,
            ledger_rtol: r.float_or("verify", "ledger_rtol", 1e-9)?,
            compare_tol: r.float_or("verify", "compare_tol", 0.02)?,
            s_samples: r.int_or("verify", "s_samples", 10)? as usize,
            corrupt_l_scale: r.float("verify", "corrupt_l_scale")?,
        };
        let cfg = Self {
            geometry,
            physics,
            discretization,
            input,
            output,
            verify,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        let known = [
            "constant",
            "cone",
            "exponential",
            "exponential_horn",
            "cosine_bump",
            "tabulated",
        ];
        range(
            known.contains(&g.kind.as_str()),
            "geometry.kind",
            "expected one of constant, cone, exponential, cosine_bump, tabulated",
        )?;
        if g.kind == "tabulated" {
            let t = g
                .table
                .as_ref()
                .ok_or_else(|| Error::config("geometry.table", "required for tabulated geometry"))?;
            range(t.is_file(), "geometry.table", "file does not exist")?;
        } else {
            let r0 = g
                .r0
                .ok_or_else(|| Error::config("geometry.r0", "missing required key"))?;
            range(r0 > 0.0, "geometry.r0", "must be positive")?;
            if matches!(g.kind.as_str(), "cone" | "exponential" | "exponential_horn") {
                let r1 = g
                    .r1
                    .ok_or_else(|| Error::config("geometry.r1", "missing required key"))?;
                range(r1 > 0.0, "geometry.r1", "must be positive")?;
            }
            if g.kind == "cosine_bump" {
                g.amplitude
                    .ok_or_else(|| Error::config("geometry.amplitude", "missing required key"))?;
            }
        }
        range(g.n_samples >= 3, "geometry.n_samples", "must be at least 3")?;

        let p = &self.physics;
        range(p.c > 0.0, "physics.c", "must be positive")?;
        range(p.rho > 0.0, "physics.rho", "must be positive")?;
        range(p.alpha >= 0.0, "physics.alpha", "must be non-negative")?;
        range(p.g_damp <= 0.0, "physics.g_damp", "must be non-positive")?;

        let d = &self.discretization;
        range(d.n_elems >= 2, "discretization.n_elems", "must be at least 2")?;
        range(d.ns >= 4, "discretization.ns", "must be at least 4")?;
        range(d.nr >= 2, "discretization.nr", "must be at least 2")?;
        range(d.dt > 0.0, "discretization.dt", "must be positive")?;
        range(d.t_final > 0.0, "discretization.t_final", "must be positive")?;

        let i = &self.input;
        match i.kind.as_str() {
            "file" => {
                let f = i
                    .file
                    .as_ref()
                    .ok_or_else(|| Error::config("input.file", "required for file input"))?;
                range(f.is_file(), "input.file", "file does not exist")?;
            }
            "gaussian" | "sine_burst" => {
                range(i.width > 0.0, "input.width", "must be positive")?;
                if i.kind == "sine_burst" {
                    range(i.frequency > 0.0, "input.frequency", "must be positive")?;
                }
            }
            "zero" | "constant" => {}
            _ => {
                return Err(Error::config(
                    "input.kind",
                    "expected one of gaussian, sine_burst, file, constant, zero",
                ))
            }
        }
        range(!self.output.prefix.is_empty(), "output.prefix", "must not be empty")?;

        let v = &self.verify;
        range(v.rtol > 0.0, "verify.rtol", "must be positive")?;
        range(v.ledger_rtol > 0.0, "verify.ledger_rtol", "must be positive")?;
        range(v.compare_tol > 0.0, "verify.compare_tol", "must be positive")?;
        range(v.s_samples >= 1, "verify.s_samples", "must be at least 1")?;
        Ok(())
    }

    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants {
            c: self.physics.c,
            rho: self.physics.rho,
            alpha: self.physics.alpha,
        }
    }

    pub fn profile(&self) -> Result<Profile> {
        let g = &self.geometry;
        if g.kind == "tabulated" {
            return Profile::from_csv(g.table.as_ref().expect("validated"));
        }
        let mut params = BTreeMap::new();
        for (k, v) in [("r0", g.r0), ("r1", g.r1), ("amplitude", g.amplitude)] {
            if let Some(v) = v {
                params.insert(k.to_string(), v);
            }
        }
        params.insert("kappa".into(), g.kappa);
        Profile::from_params(&g.kind, &params)
    }

    pub fn tube(&self) -> Result<TubeGeometry> {
        self.profile()?.build(self.geometry.n_samples)
    }

    /// Straight constant-radius tube, the only shape the cylinder supports.
    pub fn is_straight_cylinder(&self) -> bool {
        self.geometry.kind == "constant" && self.geometry.kappa == 0.0
    }

    pub fn input_signal(&self) -> Result<InputSignal> {
        let i = &self.input;
        if i.kind == "file" {
            return InputSignal::from_csv(i.file.as_ref().expect("validated"));
        }
        InputSignal::from_params(&i.kind, i.amplitude, i.center, i.width, i.frequency)
    }

    /// Resolved configuration in the input format.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let f = |v: f64| format!("{v:?}");
        let opt = |s: &mut String, k: &str, v: Option<f64>| {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v:?}");
            }
        };
        let g = &self.geometry;
        let _ = writeln!(s, "[geometry]\nkind = {}", g.kind);
        opt(&mut s, "r0", g.r0);
        opt(&mut s, "r1", g.r1);
        let _ = writeln!(s, "kappa = {}", f(g.kappa));
        opt(&mut s, "amplitude", g.amplitude);
        if let Some(t) = &g.table {
            let _ = writeln!(s, "table = {}", t.display());
        }
        let _ = writeln!(s, "n_samples = {}", g.n_samples);
        let p = &self.physics;
        let _ = writeln!(
            s,
            "\n[physics]\nc = {}\nrho = {}\nalpha = {}\ng_damp = {}",
            f(p.c),
            f(p.rho),
            f(p.alpha),
            f(p.g_damp)
        );
        let d = &self.discretization;
        let _ = writeln!(
            s,
            "\n[discretization]\nn_elems = {}\nns = {}\nnr = {}\ndt = {}\nt_final = {}\nrecord_stride = {}",
            d.n_elems,
            d.ns,
            d.nr,
            f(d.dt),
            f(d.t_final),
            d.record_stride
        );
        let i = &self.input;
        let _ = writeln!(
            s,
            "\n[input]\nkind = {}\namplitude = {}\ncenter = {}\nwidth = {}\nfrequency = {}",
            i.kind,
            f(i.amplitude),
            f(i.center),
            f(i.width),
            f(i.frequency)
        );
        if let Some(file) = &i.file {
            let _ = writeln!(s, "file = {}", file.display());
        }
        let _ = writeln!(
            s,
            "\n[output]\ndirectory = {}\nprefix = {}",
            self.output.directory.display(),
            self.output.prefix
        );
        let v = &self.verify;
        let _ = writeln!(
            s,
            "\n[verify]\nn_defect_samples = {}\nseed = {}\nrtol = {}\nledger_rtol = {}\ncompare_tol = {}\ns_samples = {}",
            v.n_defect_samples,
            v.seed,
            f(v.rtol),
            f(v.ledger_rtol),
            f(v.compare_tol),
            v.s_samples
        );
        opt(&mut s, "corrupt_l_scale", v.corrupt_l_scale);
        s
    }
}

/// Reads and validates a config file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<SimulationConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_default();
    let base = std::path::absolute(&base).unwrap_or(base);
    SimulationConfig::parse_str(&text, &base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<SimulationConfig> {
        SimulationConfig::parse_str(text, Path::new("/tmp"))
    }

    const MINIMAL: &str = "[geometry]\nkind = constant\nr0 = 0.01\n[physics]\nc = 343\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse(MINIMAL).unwrap();
        assert_eq!(cfg.discretization.dt, 1e-4);
        assert_eq!(cfg.discretization.n_elems, 200);
        assert_eq!(cfg.discretization.ns, 300);
        assert_eq!(cfg.discretization.nr, 24);
        assert_eq!(cfg.verify.seed, 42);
        assert_eq!(cfg.verify.rtol, 1e-10);
        assert_eq!(cfg.physics.rho, 1.2);
    }

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn errors_name_the_key() {
        let e = parse("[geometry]\nkind = constant\nr0 = 0.01\n[physics]\nalpha = -1\n").unwrap_err();
        assert_eq!(key_of(e), "physics.alpha");
        let e = parse("[geometry]\nr0 = 0.01\n").unwrap_err();
        assert_eq!(key_of(e), "geometry.kind");
        let e = parse("[geometry]\nkind = constant\nr0 = abc\n").unwrap_err();
        assert_eq!(key_of(e), "geometry.r0");
        let e = parse("[geometry]\nkind = constant\nr0 = 0.01\nfoo = 1\n").unwrap_err();
        assert_eq!(key_of(e), "geometry.foo");
        let e = parse("[geometry]\nkind = cone\nr0 = 0.01\n").unwrap_err();
        assert_eq!(key_of(e), "geometry.r1");
        let e = parse("[discretization]\nns = 2\n[geometry]\nkind = constant\nr0 = 1\n").unwrap_err();
        assert_eq!(key_of(e), "discretization.ns");
    }

    #[test]
    fn resolved_config_round_trips() {
        let text = "[geometry]\nkind = cosine_bump\nr0 = 0.01\namplitude = 0.003\nkappa = 50\n\
                    [physics]\nalpha = 0.1\n[discretization]\ndt = 3.3e-7\n[verify]\ncorrupt_l_scale = 1.01\n";
        let cfg = parse(text).unwrap();
        let again = parse(&cfg.to_ini()).unwrap();
        assert_eq!(cfg, again);
    }
}

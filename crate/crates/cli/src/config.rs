//! Flat `key = value` run configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qgeom::bo::InverseMassTensor;
use qgeom::geometry::QgtEngine;
use qgeom::models::{build_model, ModelFamily, ModelSpec, SeriesTag, TwoOscillatorBranch, DEFAULT_TRUNCATION};
use qgeom::FDScheme;

use crate::error::{CliError, CliResult};

pub const KEYS: [&str; 14] = [
    "model", "j", "m", "series", "trunc", "grid", "engine", "fd-step", "mass-q", "loop", "geodesic", "out", "format",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// One axis of a sampling grid, `count >= 2` points from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoopSpec {
    Latitude {
        theta0: f64,
        count: usize,
    },
    Circle {
        center: [f64; 2],
        radius: f64,
        count: usize,
    },
    Rect {
        lo: [f64; 2],
        hi: [f64; 2],
        per_side: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSpec {
    pub start: [f64; 2],
    pub velocity: [f64; 2],
    pub length: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Every key as given, echoed into report metadata.
    pub entries: BTreeMap<String, String>,
    pub engine: QgtEngine,
    pub scheme: FDScheme,
    pub fd_step: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected key = value", n + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| bad(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(bad(format!("{key}: '{v}' is not finite")));
    }
    Ok(x)
}

fn parse_usize(key: &str, v: &str) -> CliResult<usize> {
    v.trim()
        .parse()
        .map_err(|_| bad(format!("{key}: '{v}' is not a nonnegative integer")))
}

fn numbers(key: &str, v: &str, sep: char) -> CliResult<Vec<f64>> {
    v.split(sep).map(|x| parse_f64(key, x)).collect()
}

impl RunConfig {
    /// Merges the config file (if any) with overrides, later entries winning.
    pub fn load(file: Option<&Path>, overrides: Vec<(String, String)>) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
            for (k, v) in parse_config_text(&text)? {
                entries.insert(k, v);
            }
        }
        for (k, v) in overrides {
            entries.insert(k, v);
        }
        Self::from_entries(entries)
    }

    pub fn from_entries(entries: BTreeMap<String, String>) -> CliResult<Self> {
        if let Some(k) = entries.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(bad(format!("unknown key '{k}'")));
        }
        let engine = match entries.get("engine").map(|s| s.to_ascii_lowercase()).as_deref() {
            None | Some("tangent") => QgtEngine::TangentState,
            Some("logoverlap") | Some("log-overlap") => QgtEngine::LogOverlapFD,
            Some(other) => return Err(bad(format!("engine: unknown '{other}' (tangent|logoverlap)"))),
        };
        let fd_step = match entries.get("fd-step") {
            Some(v) => parse_f64("fd-step", v)?,
            None => FDScheme::default().step(),
        };
        let scheme = FDScheme::new(fd_step, true)?;
        let format = match entries.get("format").map(|s| s.to_ascii_lowercase()).as_deref() {
            None | Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => return Err(bad(format!("format: unknown '{other}' (json|csv)"))),
        };
        let seed = match entries.get("seed") {
            Some(v) => v.parse().map_err(|_| bad(format!("seed: '{v}' is not an integer")))?,
            None => 0,
        };
        let out = entries.get("out").map(PathBuf::from);
        let cfg = Self {
            entries,
            engine,
            scheme,
            fd_step,
            format,
            out,
            seed,
        };
        // Surface malformed optional keys before any work starts.
        cfg.loop_spec()?;
        cfg.geodesic_spec()?;
        cfg.mass_q()?;
        Ok(cfg)
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn model_name(&self) -> String {
        match self.get("model") {
            Some(m) => m.to_ascii_lowercase(),
            None if self.has("series") => "su11".into(),
            None => "su2".into(),
        }
    }

    pub fn series_tag(&self) -> CliResult<SeriesTag> {
        Ok(match self.model_name().as_str() {
            "glauber" => SeriesTag::WeylHeisenberg,
            "su2" => SeriesTag::Su2,
            "two-oscillator" | "twoosc" => SeriesTag::TwoOscillator,
            "su11" => SeriesTag::Su11(self.get("series").unwrap_or("dplus").parse()?),
            other => {
                return Err(bad(format!(
                    "model: unknown '{other}' (glauber|su2|su11|two-oscillator)"
                )))
            }
        })
    }

    /// `j` as a complex number, `a`, `a+bi` or `a-bi`.
    pub fn j_complex(&self) -> CliResult<Complex64> {
        let Some(v) = self.get("j") else {
            return Ok(Complex64::new(self.default_j(), 0.0));
        };
        let z: Complex64 = v.trim().parse().map_err(|_| bad(format!("j: '{v}' is not a number")))?;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(bad("j must be finite"));
        }
        Ok(z)
    }

    fn default_j(&self) -> f64 {
        match self.model_name().as_str() {
            "su2" => 1.0,
            "two-oscillator" | "twoosc" => -0.25,
            "su11" => -1.0,
            _ => 0.0,
        }
    }

    pub fn m(&self) -> CliResult<f64> {
        match self.get("m") {
            Some(v) => parse_f64("m", v),
            None => Ok(match self.model_name().as_str() {
                "two-oscillator" | "twoosc" => -self.j_complex()?.re,
                "su11" => {
                    let j = self.j_complex()?.re;
                    if self
                        .get("series")
                        .map(|s| s.eq_ignore_ascii_case("dminus"))
                        .unwrap_or(false)
                    {
                        j
                    } else {
                        -j
                    }
                }
                _ => 0.0,
            }),
        }
    }

    pub fn truncation(&self) -> CliResult<usize> {
        match self.get("trunc") {
            Some(v) => {
                let d = parse_usize("trunc", v)?;
                if d < 2 {
                    return Err(bad("trunc must be at least 2"));
                }
                Ok(d)
            }
            None => Ok(DEFAULT_TRUNCATION),
        }
    }

    pub fn model_spec(&self) -> CliResult<ModelSpec> {
        let tag = self.series_tag()?;
        let j = self.j_complex()?;
        let m = self.m()?;
        let d = self.truncation()?;
        let real_j = || -> CliResult<f64> {
            if j.im != 0.0 {
                return Err(bad("complex j has no numerical construction; use the series command"));
            }
            Ok(j.re)
        };
        let spec = match tag {
            SeriesTag::WeylHeisenberg => {
                if m < 0.0 || m.fract() != 0.0 {
                    return Err(bad(format!("glauber needs a nonnegative integer m, got {m}")));
                }
                ModelSpec::glauber(m as u32, d)
            }
            SeriesTag::Su2 => ModelSpec::su2(real_j()?, m),
            SeriesTag::TwoOscillator => ModelSpec::two_oscillator(TwoOscillatorBranch::from_j(real_j()?)?, m, d),
            SeriesTag::Su11(series) => {
                if j.im != 0.0 {
                    ModelSpec::Su11 {
                        series,
                        j,
                        m,
                        truncation: d,
                    }
                } else {
                    ModelSpec::su11(series, j.re, m, d)
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn model(&self) -> CliResult<ModelFamily> {
        Ok(build_model(&self.model_spec()?)?)
    }

    /// Grid from `lo:hi:count,lo:hi:count`, or the model chart with 5 points per axis.
    pub fn grid(&self, family: &ModelFamily) -> CliResult<Vec<Axis>> {
        let Some(v) = self.get("grid") else {
            return Ok(family
                .chart()
                .iter()
                .map(|&(lo, hi)| Axis { lo, hi, count: 5 })
                .collect());
        };
        let axes: Vec<Axis> = v
            .split(',')
            .map(|part| {
                let f: Vec<&str> = part.split(':').collect();
                if f.len() != 3 {
                    return Err(bad(format!("grid: '{part}' is not lo:hi:count")));
                }
                let axis = Axis {
                    lo: parse_f64("grid", f[0])?,
                    hi: parse_f64("grid", f[1])?,
                    count: parse_usize("grid", f[2])?,
                };
                if axis.count < 2 {
                    return Err(bad(format!("grid: count {} must be at least 2", axis.count)));
                }
                Ok(axis)
            })
            .collect::<CliResult<_>>()?;
        if axes.len() != 2 {
            return Err(bad(format!("grid: expected 2 axes, got {}", axes.len())));
        }
        Ok(axes)
    }

    /// `q11,q22,q12re,q12im`; the identity when absent.
    pub fn mass_q(&self) -> CliResult<InverseMassTensor> {
        let Some(v) = self.get("mass-q") else {
            return Ok(InverseMassTensor::identity(2));
        };
        let q = numbers("mass-q", v, ',')?;
        if q.len() != 4 {
            return Err(bad("mass-q: expected q11,q22,q12re,q12im"));
        }
        let re = nalgebra::DMatrix::from_row_slice(2, 2, &[q[0], q[2], q[2], q[1]]);
        let im = nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, q[3], -q[3], 0.0]);
        Ok(InverseMassTensor::new(re, im)?)
    }

    pub fn loop_spec(&self) -> CliResult<Option<LoopSpec>> {
        let Some(v) = self.get("loop") else {
            return Ok(None);
        };
        let (kind, rest) = v.split_once(':').ok_or_else(|| bad("loop: expected kind:params"))?;
        let x = numbers("loop", rest, ':')?;
        let count = |c: f64| -> CliResult<usize> {
            if c < 2.0 || c.fract() != 0.0 {
                return Err(bad(format!("loop: sample count {c} must be an integer >= 2")));
            }
            Ok(c as usize)
        };
        let spec = match (kind, x.len()) {
            ("latitude", 2) => LoopSpec::Latitude {
                theta0: x[0],
                count: count(x[1])?,
            },
            ("circle", 4) => LoopSpec::Circle {
                center: [x[0], x[1]],
                radius: x[2],
                count: count(x[3])?,
            },
            ("rect", 5) => LoopSpec::Rect {
                lo: [x[0], x[2]],
                hi: [x[1], x[3]],
                per_side: count(x[4])?,
            },
            _ => {
                return Err(bad(
                    "loop: expected latitude:theta0:n, circle:c0:c1:r:n or rect:lo0:hi0:lo1:hi1:n",
                ))
            }
        };
        Ok(Some(spec))
    }

    /// `s0:s1:v0:v1:length:steps`.
    pub fn geodesic_spec(&self) -> CliResult<Option<GeodesicSpec>> {
        let Some(v) = self.get("geodesic") else {
            return Ok(None);
        };
        let x = numbers("geodesic", v, ':')?;
        if x.len() != 6 || x[5] < 1.0 || x[5].fract() != 0.0 {
            return Err(bad("geodesic: expected s0:s1:v0:v1:length:steps"));
        }
        Ok(Some(GeodesicSpec {
            start: [x[0], x[1]],
            velocity: [x[2], x[3]],
            length: x[4],
            steps: x[5] as usize,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[(&str, &str)]) -> CliResult<RunConfig> {
        RunConfig::from_entries(pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect())
    }

    #[test]
    fn config_text_with_comments() {
        let kv = parse_config_text("# run\nmodel = su2\n\nj=1.5  # spin\n").unwrap();
        assert_eq!(kv, vec![("model".into(), "su2".into()), ("j".into(), "1.5".into())]);
        assert!(parse_config_text("model su2").is_err());
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(cfg(&[("colour", "red")]), Err(CliError::Config(_))));
    }

    #[test]
    fn grid_count_below_two_rejected() {
        let c = cfg(&[("grid", "0:1:1,0:1:3")]).unwrap();
        let f = c.model().unwrap();
        assert!(matches!(c.grid(&f), Err(CliError::Config(_))));
    }

    #[test]
    fn defaults_follow_the_model() {
        let c = cfg(&[("model", "su11"), ("series", "dminus"), ("j", "-1.5")]).unwrap();
        assert_eq!(c.m().unwrap(), -1.5);
        let c = cfg(&[("model", "two-oscillator"), ("j", "-0.75")]).unwrap();
        assert_eq!(c.m().unwrap(), 0.75);
    }

    #[test]
    fn invalid_quantum_numbers_rejected() {
        let c = cfg(&[("model", "su2"), ("j", "1"), ("m", "0.5")]).unwrap();
        assert!(matches!(c.model_spec(), Err(CliError::Config(_))));
    }

    #[test]
    fn mass_tensor_parsed() {
        let c = cfg(&[("mass-q", "2,1,0.5,0.25")]).unwrap();
        let q = c.mass_q().unwrap();
        assert_eq!(q.q_real()[(0, 1)], 0.5);
        assert_eq!(q.q_imag()[(1, 0)], -0.25);
    }

    #[test]
    fn loop_kinds() {
        let c = cfg(&[("loop", "rect:0.2:0.8:0:1:16")]).unwrap();
        assert_eq!(
            c.loop_spec().unwrap(),
            Some(LoopSpec::Rect {
                lo: [0.2, 0.0],
                hi: [0.8, 1.0],
                per_side: 16
            })
        );
        assert!(cfg(&[("loop", "square:1:2")]).is_err());
    }
}

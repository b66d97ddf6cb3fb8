use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default truncation for Fock-type bases.
pub const DEFAULT_TRUNCATION: usize = 128;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupTag {
    WeylHeisenberg,
    SU2,
    SU11,
}

impl GroupTag {
    pub fn name(&self) -> &'static str {
        match self {
            GroupTag::WeylHeisenberg => "weyl-heisenberg",
            GroupTag::SU2 => "su2",
            GroupTag::SU11 => "su11",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Su11Series {
    Dplus,
    Dminus,
    Ck0,
    Ck12,
    Supplementary,
    ProjectiveDiscrete,
    ProjectiveContinuous,
}

impl Su11Series {
    pub const ALL: [Su11Series; 7] = [
        Su11Series::Dplus,
        Su11Series::Dminus,
        Su11Series::Ck0,
        Su11Series::Ck12,
        Su11Series::Supplementary,
        Su11Series::ProjectiveDiscrete,
        Su11Series::ProjectiveContinuous,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Su11Series::Dplus => "dplus",
            Su11Series::Dminus => "dminus",
            Su11Series::Ck0 => "ck0",
            Su11Series::Ck12 => "ck12",
            Su11Series::Supplementary => "supplementary",
            Su11Series::ProjectiveDiscrete => "projective-discrete",
            Su11Series::ProjectiveContinuous => "projective-continuous",
        }
    }

    /// Series with a truncated ladder construction.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Su11Series::Dplus | Su11Series::Dminus | Su11Series::ProjectiveDiscrete
        )
    }
}

impl fmt::Display for Su11Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Su11Series {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidModel(format!("unknown series '{s}'")))
    }
}

/// The two projective branches of the two-oscillator realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoOscillatorBranch {
    /// `j = -1/4`, even photon numbers, `m = 1/4, 5/4, ...`.
    Quarter,
    /// `j = -3/4`, odd photon numbers, `m = 3/4, 7/4, ...`.
    ThreeQuarters,
}

impl TwoOscillatorBranch {
    pub fn j(&self) -> f64 {
        match self {
            TwoOscillatorBranch::Quarter => -0.25,
            TwoOscillatorBranch::ThreeQuarters => -0.75,
        }
    }

    pub fn from_j(j: f64) -> Result<Self> {
        if (j + 0.25).abs() < TOL {
            Ok(TwoOscillatorBranch::Quarter)
        } else if (j + 0.75).abs() < TOL {
            Ok(TwoOscillatorBranch::ThreeQuarters)
        } else {
            Err(Error::InvalidModel(format!(
                "two-oscillator branch needs j = -1/4 or -3/4, got {j}"
            )))
        }
    }
}

/// Label used when validating quantum numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesTag {
    WeylHeisenberg,
    Su2,
    Su11(Su11Series),
    TwoOscillator,
}

impl FromStr for SeriesTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "glauber" | "weyl-heisenberg" => Ok(SeriesTag::WeylHeisenberg),
            "su2" => Ok(SeriesTag::Su2),
            "two-oscillator" | "twoosc" => Ok(SeriesTag::TwoOscillator),
            other => Ok(SeriesTag::Su11(other.parse()?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValidation {
    pub valid: bool,
    pub reason: String,
}

impl SeriesValidation {
    fn ok(reason: impl Into<String>) -> Self {
        Self {
            valid: true,
            reason: reason.into(),
        }
    }

    fn no(reason: impl Into<String>) -> Self {
        Self {
            valid: false,
            reason: reason.into(),
        }
    }
}

fn is_int(x: f64) -> bool {
    (x - x.round()).abs() < TOL
}

fn is_nonneg_int(x: f64) -> bool {
    is_int(x) && x.round() >= 0.0
}

fn real_j(j: Complex64) -> Option<f64> {
    (j.im.abs() < TOL).then_some(j.re)
}

/// Checks whether `(j, m)` belongs to the sequence labelled by `tag`.
pub fn validate_series(j: Complex64, m: f64, tag: SeriesTag) -> SeriesValidation {
    if !j.re.is_finite() || !j.im.is_finite() || !m.is_finite() {
        return SeriesValidation::no("quantum numbers must be finite");
    }
    let continuous = |what: &str| -> Option<SeriesValidation> {
        if (j.re + 0.5).abs() >= TOL || j.im <= 0.0 {
            Some(SeriesValidation::no(format!("{what} needs j = -1/2 + ik with k > 0")))
        } else {
            None
        }
    };
    match tag {
        SeriesTag::WeylHeisenberg => {
            if is_nonneg_int(m) {
                SeriesValidation::ok("m is a Fock number")
            } else {
                SeriesValidation::no("m must be a nonnegative integer")
            }
        }
        SeriesTag::Su2 => {
            let Some(j) = real_j(j) else {
                return SeriesValidation::no("su2 needs real j");
            };
            if !is_int(2.0 * j) || j < 0.5 - TOL {
                return SeriesValidation::no("su2 needs j in {1/2, 1, 3/2, ...}");
            }
            if !is_int(m - j) || m < -j - TOL || m > j + TOL {
                return SeriesValidation::no("m must be one of -j, -j+1, ..., j");
            }
            SeriesValidation::ok("m in -j..j")
        }
        SeriesTag::Su11(series) => match series {
            Su11Series::Dplus | Su11Series::Dminus => {
                let Some(j) = real_j(j) else {
                    return SeriesValidation::no("discrete series needs real j");
                };
                if !is_int(2.0 * j) || j > -0.5 + TOL {
                    return SeriesValidation::no("discrete series needs j in {-1/2, -1, -3/2, ...}");
                }
                if series == Su11Series::Dplus {
                    if is_nonneg_int(m + j) {
                        SeriesValidation::ok("m in -j, -j+1, ...")
                    } else {
                        SeriesValidation::no("m must be one of -j, -j+1, ...")
                    }
                } else if is_nonneg_int(j - m) {
                    SeriesValidation::ok("m in j, j-1, ...")
                } else {
                    SeriesValidation::no("m must be one of j, j-1, ...")
                }
            }
            Su11Series::Ck0 => continuous("C_k^0").unwrap_or_else(|| {
                if is_int(m) {
                    SeriesValidation::ok("integer m")
                } else {
                    SeriesValidation::no("C_k^0 needs integer m")
                }
            }),
            Su11Series::Ck12 => continuous("C_k^1/2").unwrap_or_else(|| {
                if is_int(m - 0.5) {
                    SeriesValidation::ok("half-odd m")
                } else {
                    SeriesValidation::no("C_k^1/2 needs half-odd m")
                }
            }),
            Su11Series::ProjectiveContinuous => {
                continuous("projective continuous series").unwrap_or_else(|| SeriesValidation::ok("m = m0 + integer"))
            }
            Su11Series::Supplementary => {
                let Some(j) = real_j(j) else {
                    return SeriesValidation::no("supplementary series needs real j");
                };
                if !(j > -0.5 && j < 0.0) {
                    return SeriesValidation::no("supplementary series needs -1/2 < j < 0");
                }
                if is_int(m) {
                    SeriesValidation::ok("integer m")
                } else {
                    SeriesValidation::no("supplementary series needs integer m")
                }
            }
            Su11Series::ProjectiveDiscrete => {
                let Some(j) = real_j(j) else {
                    return SeriesValidation::no("projective discrete series needs real j");
                };
                if j >= 0.0 {
                    return SeriesValidation::no("projective discrete series needs j < 0");
                }
                if is_nonneg_int(m + j) {
                    SeriesValidation::ok("m in -j, -j+1, ...")
                } else {
                    SeriesValidation::no("m must be one of -j, -j+1, ...")
                }
            }
        },
        SeriesTag::TwoOscillator => {
            let Some(jr) = real_j(j) else {
                return SeriesValidation::no("two-oscillator branch needs real j");
            };
            let Ok(branch) = TwoOscillatorBranch::from_j(jr) else {
                return SeriesValidation::no("two-oscillator branch needs j = -1/4 or -3/4");
            };
            if is_nonneg_int(m + branch.j()) {
                SeriesValidation::ok("m on the branch ladder")
            } else if is_nonneg_int(m - 0.25) || is_nonneg_int(m - 0.75) {
                SeriesValidation::no("m belongs to the other two-oscillator branch")
            } else {
                SeriesValidation::no("m must be one of -j, -j+1, ...")
            }
        }
    }
}

/// A coherent-state model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// Displaced Fock state `|m>` over `(alpha_1, alpha_2)`.
    Glauber { m: u32, truncation: usize },
    /// Spin `(j, m)` over `(theta, phi)`.
    Su2 { j: f64, m: f64 },
    /// SU(1,1) state `|j, m>` over `(rho, phi)`; `j` is complex for the
    /// continuous series.
    Su11 {
        series: Su11Series,
        j: Complex64,
        m: f64,
        truncation: usize,
    },
    /// Squeezed Fock states in the `J+ = a+^2/2` realization.
    TwoOscillator {
        branch: TwoOscillatorBranch,
        m: f64,
        truncation: usize,
    },
}

impl ModelSpec {
    pub fn glauber(m: u32, truncation: usize) -> Self {
        ModelSpec::Glauber { m, truncation }
    }

    pub fn su2(j: f64, m: f64) -> Self {
        ModelSpec::Su2 { j, m }
    }

    pub fn su11(series: Su11Series, j: f64, m: f64, truncation: usize) -> Self {
        ModelSpec::Su11 {
            series,
            j: Complex64::new(j, 0.0),
            m,
            truncation,
        }
    }

    pub fn two_oscillator(branch: TwoOscillatorBranch, m: f64, truncation: usize) -> Self {
        ModelSpec::TwoOscillator { branch, m, truncation }
    }

    pub fn group(&self) -> GroupTag {
        match self {
            ModelSpec::Glauber { .. } => GroupTag::WeylHeisenberg,
            ModelSpec::Su2 { .. } => GroupTag::SU2,
            ModelSpec::Su11 { .. } | ModelSpec::TwoOscillator { .. } => GroupTag::SU11,
        }
    }

    pub fn series_tag(&self) -> SeriesTag {
        match self {
            ModelSpec::Glauber { .. } => SeriesTag::WeylHeisenberg,
            ModelSpec::Su2 { .. } => SeriesTag::Su2,
            ModelSpec::Su11 { series, .. } => SeriesTag::Su11(*series),
            ModelSpec::TwoOscillator { .. } => SeriesTag::TwoOscillator,
        }
    }

    /// Representation label; zero for the oscillator model.
    pub fn j(&self) -> Complex64 {
        match self {
            ModelSpec::Glauber { .. } => Complex64::new(0.0, 0.0),
            ModelSpec::Su2 { j, .. } => Complex64::new(*j, 0.0),
            ModelSpec::Su11 { j, .. } => *j,
            ModelSpec::TwoOscillator { branch, .. } => Complex64::new(branch.j(), 0.0),
        }
    }

    pub fn m(&self) -> f64 {
        match self {
            ModelSpec::Glauber { m, .. } => *m as f64,
            ModelSpec::Su2 { m, .. } | ModelSpec::Su11 { m, .. } | ModelSpec::TwoOscillator { m, .. } => *m,
        }
    }

    /// Hilbert-space dimension of the numerical construction.
    pub fn truncation(&self) -> usize {
        match self {
            ModelSpec::Su2 { j, .. } => (2.0 * j).round() as usize + 1,
            ModelSpec::Glauber { truncation, .. }
            | ModelSpec::Su11 { truncation, .. }
            | ModelSpec::TwoOscillator { truncation, .. } => *truncation,
        }
    }

    pub fn is_numerical(&self) -> bool {
        match self {
            ModelSpec::Su11 { series, .. } => series.is_numerical(),
            _ => true,
        }
    }

    /// Quantum numbers valid for the series.
    pub fn validate(&self) -> Result<()> {
        let v = validate_series(self.j(), self.m(), self.series_tag());
        if !v.valid {
            return Err(Error::InvalidModel(v.reason));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self {
            ModelSpec::Glauber { m, truncation } => format!("glauber(m={m}, d={truncation})"),
            ModelSpec::Su2 { j, m } => format!("su2(j={j}, m={m})"),
            ModelSpec::Su11 {
                series,
                j,
                m,
                truncation,
            } => {
                if j.im == 0.0 {
                    format!("su11-{series}(j={}, m={m}, d={truncation})", j.re)
                } else {
                    format!("su11-{series}(j={}{:+}i, m={m}, d={truncation})", j.re, j.im)
                }
            }
            ModelSpec::TwoOscillator { branch, m, truncation } => {
                format!("two-oscillator(j={}, m={m}, d={truncation})", branch.j())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn discrete_series_membership() {
        assert!(validate_series(c(-1.0), 1.0, SeriesTag::Su11(Su11Series::Dplus)).valid);
        assert!(!validate_series(c(-1.0), -2.0, SeriesTag::Su11(Su11Series::Dplus)).valid);
        assert!(validate_series(c(-1.0), -3.0, SeriesTag::Su11(Su11Series::Dminus)).valid);
        assert!(!validate_series(c(-0.25), 0.25, SeriesTag::Su11(Su11Series::Dplus)).valid);
    }

    #[test]
    fn two_oscillator_branches() {
        let v = validate_series(c(-0.25), 0.75, SeriesTag::TwoOscillator);
        assert!(!v.valid);
        assert!(v.reason.contains("other"));
        assert!(validate_series(c(-0.75), 0.75, SeriesTag::TwoOscillator).valid);
        assert!(validate_series(c(-0.25), 1.25, SeriesTag::TwoOscillator).valid);
    }

    #[test]
    fn continuous_and_supplementary() {
        let j = Complex64::new(-0.5, 0.8);
        assert!(validate_series(j, 2.0, SeriesTag::Su11(Su11Series::Ck0)).valid);
        assert!(!validate_series(j, 0.5, SeriesTag::Su11(Su11Series::Ck0)).valid);
        assert!(validate_series(j, -1.5, SeriesTag::Su11(Su11Series::Ck12)).valid);
        assert!(validate_series(j, 0.3, SeriesTag::Su11(Su11Series::ProjectiveContinuous)).valid);
        assert!(validate_series(c(-0.3), 4.0, SeriesTag::Su11(Su11Series::Supplementary)).valid);
        assert!(!validate_series(c(-0.7), 4.0, SeriesTag::Su11(Su11Series::Supplementary)).valid);
        assert!(validate_series(c(-0.3), 0.3, SeriesTag::Su11(Su11Series::ProjectiveDiscrete)).valid);
    }

    #[test]
    fn su2_and_glauber() {
        assert!(validate_series(c(1.5), -0.5, SeriesTag::Su2).valid);
        assert!(!validate_series(c(1.5), 2.5, SeriesTag::Su2).valid);
        assert!(!validate_series(c(1.0), 0.5, SeriesTag::Su2).valid);
        assert!(validate_series(c(0.0), 3.0, SeriesTag::WeylHeisenberg).valid);
        assert!(!validate_series(c(0.0), -1.0, SeriesTag::WeylHeisenberg).valid);
    }

    #[test]
    fn parse_tags() {
        assert_eq!(
            "dplus".parse::<SeriesTag>().unwrap(),
            SeriesTag::Su11(Su11Series::Dplus)
        );
        assert_eq!("SU2".parse::<SeriesTag>().unwrap(), SeriesTag::Su2);
        assert!("bogus".parse::<SeriesTag>().is_err());
    }
}

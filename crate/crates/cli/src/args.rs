//! Argument types shared by the subcommands.

use std::str::FromStr;

use clap::{Args, ValueEnum};
use ngforge_core::analysis::{EntropyConvention, PhaseSpaceGrid, SectionKind, SectionSpec};
use ngforge_core::protocols::Family;
use num_complex::Complex64;
use serde::Serialize;

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i` and `-i` (whitespace ignored).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex number `{text}`; expected a+bi");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return match t.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // Split at the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| bad())?
    };
    let z = Complex64::new(re, im);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(bad());
    }
    Ok(z)
}

/// Family names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    /// The Gaussian pointer S(ξ)|α⟩ before any measurement.
    #[value(alias = "vacuum")]
    Input,
    Psi1,
    Psi2,
    Psi3,
    Psi4,
    Evencat,
    Oddcatlike,
    Yurkestoler,
    Phi1,
    Phi2,
    Phi1prime,
    Phi2prime,
    Phi3,
    Phi4,
}

impl FamilyArg {
    pub fn family(self) -> Option<Family> {
        Some(match self {
            FamilyArg::Input => return None,
            FamilyArg::Psi1 => Family::Psi1,
            FamilyArg::Psi2 => Family::Psi2,
            FamilyArg::Psi3 => Family::Psi3,
            FamilyArg::Psi4 => Family::Psi4,
            FamilyArg::Evencat => Family::EvenCat,
            FamilyArg::Oddcatlike => Family::OddCatLike,
            FamilyArg::Yurkestoler => Family::YurkeStoler,
            FamilyArg::Phi1 => Family::Phi1,
            FamilyArg::Phi2 => Family::Phi2,
            FamilyArg::Phi1prime => Family::Phi1Prime,
            FamilyArg::Phi2prime => Family::Phi2Prime,
            FamilyArg::Phi3 => Family::Phi3,
            FamilyArg::Phi4 => Family::Phi4,
        })
    }

    pub fn is_two_mode(self) -> bool {
        self.family().is_some_and(Family::is_two_mode)
    }
}

/// Physical parameters of a state.
#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    /// State family.
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Coherent amplitude α of the pointer.
    #[arg(long, default_value = "0", value_parser = parse_complex)]
    pub alpha: Complex64,
    /// Squeezing magnitude r.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Squeezing phase φ (radians).
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    /// Interaction strength s = g/2σ.
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,
    /// Weak value as a+bi; defaults to 0 when no selection is given.
    #[arg(long, value_parser = parse_complex, conflicts_with_all = ["theta", "delta"])]
    pub wv: Option<Complex64>,
    /// Pre-selection angle θ for the σ_x selection (radians).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Pre-selection phase δ for the σ_x selection (radians).
    #[arg(long, requires = "theta")]
    pub delta: Option<f64>,
    /// Coherent slot amplitude for phi3/phi4 (defaults to s).
    #[arg(long, value_parser = parse_complex)]
    pub beta: Option<Complex64>,
    /// Starting truncation per mode (escalated automatically).
    #[arg(long)]
    pub nmax: Option<usize>,
}

impl StateArgs {
    pub fn new(family: FamilyArg) -> Self {
        StateArgs {
            family,
            alpha: Complex64::new(0.0, 0.0),
            r: 0.0,
            phi: 0.0,
            s: 0.0,
            wv: None,
            theta: None,
            delta: None,
            beta: None,
            nmax: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Destination and format.
#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = -6.0, allow_negative_numbers = true)]
    pub p_min: f64,
    #[arg(long, default_value_t = 6.0, allow_negative_numbers = true)]
    pub p_max: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

impl GridArgs {
    pub fn grid(&self) -> ngforge_core::Result<PhaseSpaceGrid> {
        PhaseSpaceGrid::new(self.x_min, self.x_max, self.p_min, self.p_max, self.points, self.points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionArg {
    Rere,
    Imim,
    Rediag,
    Imdiag,
}

impl SectionArg {
    pub fn kind(self) -> SectionKind {
        match self {
            SectionArg::Rere => SectionKind::ReRe,
            SectionArg::Imim => SectionKind::ImIm,
            SectionArg::Rediag => SectionKind::ReDiag,
            SectionArg::Imdiag => SectionKind::ImDiag,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SectionArgs {
    /// Section geometry.
    #[arg(long, value_enum)]
    pub section: SectionArg,
    #[arg(long = "min", default_value_t = -4.0, allow_negative_numbers = true)]
    pub min: f64,
    #[arg(long = "max", default_value_t = 4.0, allow_negative_numbers = true)]
    pub max: f64,
    #[arg(long, default_value_t = 161)]
    pub points: usize,
}

impl SectionArgs {
    pub fn spec(&self) -> SectionSpec {
        SectionSpec {
            kind: self.section.kind(),
            min: self.min,
            max: self.max,
            n_points: self.points,
        }
    }
}

/// Sweepable parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    S,
    Theta,
    Delta,
    R,
    /// Real weak value.
    Wv,
}

impl AxisName {
    pub fn label(self) -> &'static str {
        match self {
            AxisName::S => "s",
            AxisName::Theta => "theta",
            AxisName::Delta => "delta",
            AxisName::R => "r",
            AxisName::Wv => "wv",
        }
    }

    /// Returns a copy of `args` with this parameter set to `value`.
    pub fn apply(self, args: &StateArgs, value: f64) -> StateArgs {
        let mut a = args.clone();
        match self {
            AxisName::S => a.s = value,
            AxisName::R => a.r = value,
            AxisName::Theta => {
                a.wv = None;
                a.theta = Some(value);
            }
            AxisName::Delta => {
                a.wv = None;
                a.theta = a.theta.or(Some(0.0));
                a.delta = Some(value);
            }
            AxisName::Wv => {
                a.theta = None;
                a.delta = None;
                a.wv = Some(Complex64::new(value, 0.0));
            }
        }
        a
    }
}

/// `name:start:stop:n`, sampled with both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.stop } else { self.start + step * i as f64 })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        let [name, start, stop, n] = parts[..] else {
            return Err(format!("invalid axis `{text}`; expected name:start:stop:n"));
        };
        let name = match name {
            "s" => AxisName::S,
            "theta" => AxisName::Theta,
            "delta" => AxisName::Delta,
            "r" => AxisName::R,
            "wv" => AxisName::Wv,
            other => return Err(format!("unknown axis `{other}`; expected one of s, theta, delta, r, wv")),
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("invalid number `{s}` in axis `{text}`"));
        let n: usize = n.parse().map_err(|_| format!("invalid count `{n}` in axis `{text}`"))?;
        if n == 0 {
            return Err(format!("axis `{text}` needs at least one point"));
        }
        Ok(Axis {
            name,
            start: num(start)?,
            stop: num(stop)?,
            n,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    P,
    #[value(name = "linear_entropy", alias = "entropy")]
    LinearEntropy,
    Concurrence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyArg {
    #[default]
    Asymptotic,
    Truncated,
}

impl EntropyArg {
    pub fn convention(self) -> EntropyConvention {
        match self {
            EntropyArg::Asymptotic => EntropyConvention::Asymptotic,
            EntropyArg::Truncated => EntropyConvention::Truncated,
        }
    }
}

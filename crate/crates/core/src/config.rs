//! Run configuration: the versioned JSON schema read by the command-line front end.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::C64;
use crate::dsl::{parse, parse_in};
use crate::error::{Error, Result};
use crate::holo::{fubini_study_data, HoloData, PhiSpec, TauSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub data: DataConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Output directory; the command line may override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataConfig {
    Example(ExampleConfig),
    Explicit(ExplicitData),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleConfig {
    pub example: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitData {
    pub tau: TauConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<[String; 2]>,
    /// The germ near ∞ for two-sided data; real data derives it when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_infinity: Option<[String; 2]>,
    /// λ in the variable w for √λ(z²) data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[String; 2]>,
    #[serde(default = "default_domain_radius")]
    pub domain_radius: f64,
    #[serde(default)]
    pub reality: bool,
}

fn default_domain_radius() -> f64 {
    10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauKindConfig {
    Linear,
    TauC,
    RationalD2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauConfig {
    pub kind: TauKindConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<[f64; 2]>,
    #[serde(default)]
    pub rotation: f64,
}

/// One chart axis: `count` equally spaced real parts on [min, max] with a
/// fixed imaginary part (holomorphic charts only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub im: f64,
}

impl Axis {
    pub fn values(&self) -> Vec<C64> {
        if self.count == 1 {
            return vec![C64::new(self.min, self.im)];
        }
        (0..self.count)
            .map(|k| {
                let t = k as f64 / (self.count - 1) as f64;
                C64::new(self.min + t * (self.max - self.min), self.im)
            })
            .collect()
    }

    fn check(&self, name: &str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Config(format!("grid axis {name} has count 0")));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.im.is_finite()) || self.max < self.min {
            return Err(Error::Config(format!("grid axis {name} needs finite min ≤ max")));
        }
        if self.count == 1 && self.max != self.min {
            return Err(Error::Config(format!("grid axis {name} has one point but min ≠ max")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x1: Axis,
    pub x2: Axis,
    pub v1: Axis,
    pub v2: Axis,
}

impl GridConfig {
    /// Grid points with x1 varying slowest.
    pub fn points(&self) -> Vec<[C64; 4]> {
        let (a, b, c, d) = (self.x1.values(), self.x2.values(), self.v1.values(), self.v2.values());
        let mut out = Vec::with_capacity(a.len() * b.len() * c.len() * d.len());
        for &x1 in &a {
            for &x2 in &b {
                for &v1 in &c {
                    for &v2 in &d {
                        out.push([x1, x2, v1, v2]);
                    }
                }
            }
        }
        out
    }

    /// `n` points drawn uniformly from the grid box (imaginary parts fixed).
    pub fn sample(&self, n: usize, seed: u64) -> Vec<[C64; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axes = [self.x1, self.x2, self.v1, self.v2];
        (0..n)
            .map(|_| {
                axes.map(|a| {
                    let t: f64 = rng.gen();
                    C64::new(a.min + t * (a.max - a.min), a.im)
                })
            })
            .collect()
    }

    pub fn check(&self) -> Result<()> {
        self.x1.check("x1")?;
        self.x2.check("x2")?;
        self.v1.check("v1")?;
        self.v2.check("v2")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_orientation")]
    pub orientation: i8,
}

fn default_points() -> usize {
    20
}

fn default_orientation() -> i8 {
    1
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            points: default_points(),
            orientation: default_orientation(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub asd: f64,
    pub killing: f64,
    pub pde: f64,
    pub crosscheck: f64,
    pub swap: f64,
    pub reality: f64,
    pub period: f64,
    /// Largest fraction of grid points allowed to fail in `metric`.
    pub failure_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            asd: 1e-4,
            killing: 1e-6,
            pde: 1e-6,
            crosscheck: 1e-6,
            swap: 1e-9,
            reality: 1e-7,
            period: 1e-10,
            failure_fraction: 0.01,
        }
    }
}

impl Tolerances {
    pub fn names() -> &'static [&'static str] {
        &[
            "asd",
            "killing",
            "pde",
            "crosscheck",
            "swap",
            "reality",
            "period",
            "failure_fraction",
        ]
    }

    /// Applies `key=value` overrides.
    pub fn apply_overrides(&mut self, overrides: &BTreeMap<String, f64>) -> Result<()> {
        for (key, &value) in overrides {
            let slot = match key.as_str() {
                "asd" => &mut self.asd,
                "killing" => &mut self.killing,
                "pde" => &mut self.pde,
                "crosscheck" => &mut self.crosscheck,
                "swap" => &mut self.swap,
                "reality" => &mut self.reality,
                "period" => &mut self.period,
                "failure_fraction" => &mut self.failure_fraction,
                other => {
                    return Err(Error::Config(format!(
                        "unknown tolerance `{other}` (known: {})",
                        Self::names().join(", ")
                    )))
                }
            };
            *slot = value;
        }
        self.check()
    }

    pub fn check(&self) -> Result<()> {
        let all = [
            self.asd,
            self.killing,
            self.pde,
            self.crosscheck,
            self.swap,
            self.reality,
            self.period,
        ];
        if all.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::Config("tolerances must be positive and finite".into()));
        }
        if !(0.0..=1.0).contains(&self.failure_fraction) {
            return Err(Error::Config("failure_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Which metric construction a data set runs through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// Real metric on (x, y, u₁, u₂) from the Joyce form.
    Real,
    /// Holomorphic metric on (r, s, v₁, v₂) from the surface-orthogonal engine.
    Holomorphic,
    /// Holomorphic metric on (r, s, v₁, v₂) from the degree-2 general engine.
    General,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema {} is not supported (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if let Some(g) = &self.grid {
            g.check()?;
        }
        if self.verify.points == 0 {
            return Err(Error::Config("verify.points must be positive".into()));
        }
        if self.verify.orientation != 1 && self.verify.orientation != -1 {
            return Err(Error::Config("verify.orientation must be 1 or -1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be positive".into()));
        }
        self.tolerances.check()
    }

    pub fn holo_data(&self) -> Result<HoloData> {
        self.data.build()
    }

    pub fn chart(&self) -> Result<Chart> {
        let data = self.holo_data()?;
        Ok(chart_for(&data))
    }

    /// The configured grid, or the default box for the chart.
    pub fn grid_or_default(&self) -> Result<GridConfig> {
        match self.grid {
            Some(g) => Ok(g),
            None => Ok(default_grid(self.chart()?)),
        }
    }
}

pub fn chart_for(data: &HoloData) -> Chart {
    if data.reality {
        Chart::Real
    } else if matches!(data.tau.kind, crate::holo::TauKind::RationalD2) {
        Chart::General
    } else {
        Chart::Holomorphic
    }
}

pub fn default_grid(chart: Chart) -> GridConfig {
    let ax = |min: f64, max: f64, count: usize, im: f64| Axis { min, max, count, im };
    match chart {
        Chart::Real => GridConfig {
            x1: ax(-0.3, 0.3, 4, 0.0),
            x2: ax(0.6, 1.4, 4, 0.0),
            v1: ax(-0.5, 0.5, 2, 0.0),
            v2: ax(-0.5, 0.5, 2, 0.0),
        },
        Chart::Holomorphic => GridConfig {
            x1: ax(0.05, 0.2, 4, 0.02),
            x2: ax(5.0, 20.0, 4, 1.0),
            v1: ax(-0.5, 0.5, 2, 0.0),
            v2: ax(-0.5, 0.5, 2, 0.0),
        },
        Chart::General => GridConfig {
            x1: ax(0.02, 0.04, 4, 0.005),
            x2: ax(8.0, 14.0, 4, 2.0),
            v1: ax(-0.5, 0.5, 2, 0.0),
            v2: ax(-0.5, 0.5, 2, 0.0),
        },
    }
}

impl DataConfig {
    pub fn build(&self) -> Result<HoloData> {
        match self {
            DataConfig::Example(ex) => build_example(ex),
            DataConfig::Explicit(d) => d.build(),
        }
    }
}

fn build_example(ex: &ExampleConfig) -> Result<HoloData> {
    match ex.example.as_str() {
        "fubini_study" => {
            let a1 = ex.p1.unwrap_or(std::f64::consts::PI / 3.0);
            let a2 = ex.p2.unwrap_or(2.0 * std::f64::consts::PI / 3.0);
            fubini_study_data(C64::from_polar(1.0, a1), C64::from_polar(1.0, a2))
        }
        other => Err(Error::Config(format!("unknown built-in example `{other}`"))),
    }
}

fn exprs(src: &[String; 2], var: &str) -> Result<[crate::dsl::Expr; 2]> {
    let one = |s: &str| {
        if var == "z" {
            parse(s)
        } else {
            parse_in(s, var)
        }
    };
    Ok([one(&src[0])?, one(&src[1])?])
}

impl ExplicitData {
    pub fn build(&self) -> Result<HoloData> {
        if !(self.domain_radius > 0.0) {
            return Err(Error::Config("domain_radius must be positive".into()));
        }
        let mut tau = match self.tau.kind {
            TauKindConfig::Linear => TauSpec::linear(),
            TauKindConfig::RationalD2 => TauSpec::rational_d2(),
            TauKindConfig::TauC => {
                let c = self
                    .tau
                    .c
                    .ok_or_else(|| Error::Config("tau_c needs \"c\": [re, im]".into()))?;
                TauSpec::tau_c(C64::new(c[0], c[1]))
            }
        };
        tau.rotation = self.tau.rotation;
        let phi = match (&self.phi, &self.lambda) {
            (Some(_), Some(_)) => return Err(Error::Config("give either phi or lambda, not both".into())),
            (None, None) => return Err(Error::Config("data needs phi or lambda".into())),
            (None, Some(l)) => {
                if self.phi_infinity.is_some() || self.reality {
                    return Err(Error::Config(
                        "lambda data is one-sided and cannot carry reality".into(),
                    ));
                }
                PhiSpec::sqrt_lambda(exprs(l, "w")?, 0.3 * self.domain_radius.min(1.0))?
            }
            (Some(p), None) => {
                let near = exprs(p, "z")?;
                match (&self.phi_infinity, self.reality) {
                    (Some(far), _) => PhiSpec::Exprs {
                        near_zero: near,
                        near_infinity: Some(exprs(far, "z")?),
                    },
                    (None, true) => PhiSpec::real_from(near),
                    (None, false) => PhiSpec::exprs(near),
                }
            }
        };
        Ok(HoloData {
            tau,
            phi,
            domain_radius: self.domain_radius,
            reality: self.reality,
        })
    }
}

/// Built-in configurations, by name.
pub fn builtin(name: &str) -> Result<RunConfig> {
    let explicit =
        |tau: TauKindConfig, phi: Option<[&str; 2]>, lambda: Option<[&str; 2]>, radius: f64, reality: bool| {
            DataConfig::Explicit(ExplicitData {
                tau: TauConfig {
                    kind: tau,
                    c: None,
                    rotation: 0.0,
                },
                phi: phi.map(|p| p.map(String::from)),
                phi_infinity: None,
                lambda: lambda.map(|p| p.map(String::from)),
                domain_radius: radius,
                reality,
            })
        };
    let data = match name {
        "fubini_study" => DataConfig::Example(ExampleConfig {
            example: "fubini_study".into(),
            p1: None,
            p2: None,
        }),
        "linear_real" => explicit(TauKindConfig::Linear, Some(["z", "i*z"]), None, 100.0, true),
        "linear_cubic" => explicit(
            TauKindConfig::Linear,
            Some(["z + z^3", "i*z - 0.5*z^3"]),
            None,
            10.0,
            false,
        ),
        "rational_d2" => explicit(
            TauKindConfig::RationalD2,
            None,
            Some(["w + w^2", "-w - 0.5*w^2"]),
            0.95,
            false,
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown example `{other}` (known: {})",
                BUILTINS.join(", ")
            )))
        }
    };
    Ok(RunConfig {
        schema: SCHEMA_VERSION,
        data,
        grid: None,
        verify: VerifyConfig::default(),
        tolerances: Tolerances::default(),
        seed: 0,
        jobs: None,
        out: None,
    })
}

pub const BUILTINS: [&str; 4] = ["fubini_study", "linear_real", "linear_cubic", "rational_d2"];

//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use super::HarnessError;
use crate::boundary::{EqState, SpongeSpec};
use crate::fluxes::GrassParams;
use crate::reference::OdeRefParams;
use crate::stepcontrol::CflPolicy;
use crate::timeint::{Model, SchemeVariant, TimeScheme};
use serde::{Deserialize, Serialize};

/// Scalar profile of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `base + amp exp(-rate (x - center)^2)`
    Gaussian {
        base: f64,
        amp: f64,
        center: f64,
        rate: f64,
    },
    /// `base + amp exp(-(x - center)^power / scale)`
    SuperGaussian {
        base: f64,
        amp: f64,
        center: f64,
        power: i32,
        scale: f64,
    },
    /// `intercept + slope x`
    Linear {
        intercept: f64,
        slope: f64,
    },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Gaussian {
                base,
                amp,
                center,
                rate,
            } => base + amp * (-rate * (x - center).powi(2)).exp(),
            Profile::SuperGaussian {
                base,
                amp,
                center,
                power,
                scale,
            } => base + amp * (-(x - center).powi(power) / scale).exp(),
            Profile::Linear { intercept, slope } => intercept + slope * x,
        }
    }

    pub fn zero() -> Self {
        Profile::Constant { value: 0.0 }
    }
}

fn zero_profile() -> Profile {
    Profile::zero()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IcSpec {
    /// Pointwise profiles. Give exactly one of `eta`/`h`, at most one of
    /// `q`/`u` (default `q = 0`).
    Fields {
        eta: Option<Profile>,
        h: Option<Profile>,
        q: Option<Profile>,
        u: Option<Profile>,
        #[serde(default = "zero_profile")]
        zb: Profile,
        #[serde(default = "zero_profile")]
        b: Profile,
    },
    /// Shock with the given right state moving at `u_R + sqrt(g h_R) +
    /// speed_offset`; the left state follows from the jump conditions.
    Riemann {
        h_right: f64,
        q_right: f64,
        speed_offset: f64,
        #[serde(default)]
        x0: f64,
    },
    /// Flow slaved to the velocity profile `u` through `q + q_b = Q` and the
    /// Bernoulli constant, anchored at the left end.
    QuasiStationary {
        h_left: f64,
        zb_left: f64,
        u: Profile,
        #[serde(default)]
        b: f64,
    },
    /// Separable exact solution at `t = 0`.
    OdeType {
        params: OdeRefParams,
        #[serde(default)]
        b: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SideSpec {
    #[default]
    FreeOutflow,
    Periodic,
    InflowWave {
        amplitude: f64,
        omega: f64,
    },
    OdeExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(default)]
    pub left: SideSpec,
    #[serde(default)]
    pub right: SideSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    #[default]
    None,
    /// Same case on a finer nested grid.
    FineGrid { n_cells: usize },
    /// Successive levels of a study compared with each other.
    Richardson,
    /// Separable exact solution (requires the `ode_type` initial data).
    OdeExact,
    /// Frozen-flow reduced sediment equation.
    Type1,
    /// Quasi-stationary velocity equation (requires `quasi_stationary`).
    Type2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    /// Write a state snapshot every this many steps.
    pub every: Option<usize>,
}

fn default_max_steps() -> usize {
    5_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub model: Model,
    #[serde(default)]
    pub variant: SchemeVariant,
    #[serde(default)]
    pub time_scheme: TimeScheme,
    pub domain: [f64; 2],
    pub n_cells: usize,
    pub t_end: f64,
    pub ic: IcSpec,
    #[serde(default)]
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub sponge: Vec<SpongeSpec>,
    #[serde(default)]
    pub cfl: CflPolicy,
    #[serde(default)]
    pub grass: GrassParams,
    pub cweno_tau: Option<f64>,
    /// Fixed step instead of the CFL controller.
    pub fixed_dt: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub reference: ReferenceSpec,
    /// Equilibrium used to normalise errors.
    pub equilibrium: Option<EqState>,
    /// Errors are measured inside this interval only.
    pub error_window: Option<[f64; 2]>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let c: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(m) => HarnessError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if !(self.domain[1] > self.domain[0]) {
            return bad(format!("empty domain {:?}", self.domain));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0) {
                return bad(format!("fixed_dt must be positive, got {dt}"));
            }
        }
        self.cfl.validate().map_err(HarnessError::Config)?;
        self.grass.validate().map_err(HarnessError::Config)?;
        if let IcSpec::Fields { eta, h, q, u, .. } = &self.ic {
            if eta.is_some() == h.is_some() {
                return bad("give exactly one of ic.eta and ic.h".into());
            }
            if q.is_some() && u.is_some() {
                return bad("give at most one of ic.q and ic.u".into());
            }
        }
        let ode = matches!(self.ic, IcSpec::OdeType { .. });
        let uses_ode = matches!(self.boundary.left, SideSpec::OdeExact)
            || matches!(self.boundary.right, SideSpec::OdeExact)
            || self.reference == ReferenceSpec::OdeExact;
        if uses_ode && !ode {
            return bad("ode_exact boundaries and references need ode_type initial data".into());
        }
        if let IcSpec::OdeType { params, .. } = &self.ic {
            params.validate().map_err(HarnessError::Config)?;
            if self.model == Model::Sve
                && ((params.a_g - self.grass.a_g).abs() > 1e-15
                    || (params.xi_por - self.grass.xi_por()).abs() > 1e-12)
            {
                return bad("ode_type parameters disagree with the grass parameters".into());
            }
        }
        if self.reference == ReferenceSpec::Type2 && !matches!(self.ic, IcSpec::QuasiStationary { .. }) {
            return bad("the type2 reference needs quasi_stationary initial data".into());
        }
        if matches!(self.boundary.right, SideSpec::InflowWave { .. }) {
            return bad("inflow waves are only supported on the left".into());
        }
        let lp = matches!(self.boundary.left, SideSpec::Periodic);
        let rp = matches!(self.boundary.right, SideSpec::Periodic);
        if lp != rp {
            return bad("periodic boundaries must be set on both sides".into());
        }
        if let Some([a, b]) = self.error_window {
            if !(b > a) {
                return bad(format!("empty error window [{a}, {b}]"));
            }
        }
        Ok(())
    }
}

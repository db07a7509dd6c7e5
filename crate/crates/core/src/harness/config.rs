use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{builtin_scenario, BuiltinScenario, ChannelModel, Deployment, PathLossModel};
use crate::dual::TrackerConfig;
use crate::error::{Error, Result};
use crate::metrics::{AreaGrid, PowerPolicy};
use crate::qos::QoSSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    IbsTs,
    OgbsPt,
    FixedL,
    OptimalTs,
    PbsBdPt,
    PbsTdmaPt,
    SemirandomBdPt,
    SemirandomTdmaPt,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::IbsTs,
        Scheme::OgbsPt,
        Scheme::FixedL,
        Scheme::OptimalTs,
        Scheme::PbsBdPt,
        Scheme::PbsTdmaPt,
        Scheme::SemirandomBdPt,
        Scheme::SemirandomTdmaPt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::IbsTs => "ibs-ts",
            Scheme::OgbsPt => "ogbs-pt",
            Scheme::FixedL => "fixed-l",
            Scheme::OptimalTs => "optimal-ts",
            Scheme::PbsBdPt => "pbs-bd-pt",
            Scheme::PbsTdmaPt => "pbs-tdma-pt",
            Scheme::SemirandomBdPt => "semirandom-bd-pt",
            Scheme::SemirandomTdmaPt => "semirandom-tdma-pt",
        }
    }

    pub fn is_multi_user(self) -> bool {
        matches!(
            self,
            Scheme::PbsBdPt | Scheme::PbsTdmaPt | Scheme::SemirandomBdPt | Scheme::SemirandomTdmaPt
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub bs_positions: Vec<[f64; 2]>,
    pub user_positions: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub bandwidth_hz: f64,
    pub frame_s: f64,
    pub d_ref_m: f64,
    pub exponent: f64,
    /// Distance at which the mean gain equals `calibration_gain_db`.
    pub calibration_distance_m: f64,
    pub calibration_gain_db: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            bandwidth_hz: 1e5,
            frame_s: 0.01,
            d_ref_m: 1.0,
            exponent: 3.0,
            calibration_distance_m: 50.0,
            calibration_gain_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserQos {
    pub load_kbps: f64,
    pub delay_ms: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AreaConfig {
    /// σ_th², linear.
    pub threshold: f64,
    pub resolution_m: f64,
    /// Every `stride`-th evaluation frame enters the area average.
    pub stride: usize,
}

impl Default for AreaConfig {
    fn default() -> Self {
        Self {
            threshold: 1.0,
            resolution_m: 0.5,
            stride: 1,
        }
    }
}

/// One experiment. Loaded from TOML; see `configs/` for complete examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scheme: Scheme,
    #[serde(default)]
    pub seed: u64,
    /// Total frame budget, split evenly into training and evaluation.
    pub frames: usize,
    /// Built-in geometry name; ignored when `geometry` is given.
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub geometry: Option<Geometry>,
    pub bs_antennas: usize,
    pub user_antennas: usize,
    #[serde(default)]
    pub channel: ChannelConfig,
    pub power: PowerPolicy,
    /// One entry per user, or a single entry applied to every user.
    pub users: Vec<UserQos>,
    #[serde(default)]
    pub area: AreaConfig,
    #[serde(default)]
    pub tracker: TrackerConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {x}")))
            }
        };
        if self.frames < 2 {
            return Err(Error::Config(
                "need at least two frames (training and evaluation)".into(),
            ));
        }
        if self.bs_antennas == 0 || self.user_antennas == 0 {
            return Err(Error::Config("antenna counts must be positive".into()));
        }
        let c = &self.channel;
        positive("bandwidth_hz", c.bandwidth_hz)?;
        positive("frame_s", c.frame_s)?;
        positive("d_ref_m", c.d_ref_m)?;
        positive("calibration_distance_m", c.calibration_distance_m)?;
        positive("power.p_ref", self.power.p_ref)?;
        if !(self.power.kappa >= 0.0) {
            return Err(Error::Config(format!(
                "power.kappa must be non-negative, got {}",
                self.power.kappa
            )));
        }
        positive("area.threshold", self.area.threshold)?;
        positive("area.resolution_m", self.area.resolution_m)?;
        if self.area.stride == 0 {
            return Err(Error::Config("area.stride must be at least 1".into()));
        }
        self.tracker.validate()?;
        let dep = self.deployment()?;
        if self.users.len() != 1 && self.users.len() != dep.num_users() {
            return Err(Error::Config(format!(
                "{} QoS entries for {} users",
                self.users.len(),
                dep.num_users()
            )));
        }
        if !self.scheme.is_multi_user() && dep.num_users() != 1 {
            return Err(Error::Config(format!(
                "scheme {} needs a single-user deployment",
                self.scheme
            )));
        }
        self.qos()?;
        self.path_loss()?;
        Ok(())
    }

    pub fn deployment(&self) -> Result<Deployment> {
        let (bs, users) = match (&self.geometry, &self.scenario) {
            (Some(g), _) => (g.bs_positions.clone(), g.user_positions.clone()),
            (None, Some(name)) => {
                let kind = BuiltinScenario::from_name(name)
                    .ok_or_else(|| Error::Config(format!("unknown scenario `{name}`")))?;
                return Ok(builtin_scenario(kind, self.bs_antennas, self.user_antennas));
            }
            (None, None) => {
                return Err(Error::Config(
                    "either `scenario` or `geometry` is required".into(),
                ))
            }
        };
        let (kb, ku) = (bs.len(), users.len());
        Deployment::new(
            bs,
            vec![self.bs_antennas; kb],
            users,
            vec![self.user_antennas; ku],
        )
    }

    pub fn path_loss(&self) -> Result<PathLossModel> {
        let c = &self.channel;
        PathLossModel::calibrated(
            c.d_ref_m,
            c.exponent,
            c.calibration_distance_m,
            10f64.powf(c.calibration_gain_db / 10.0),
        )
    }

    pub fn channel_model(&self) -> Result<ChannelModel> {
        ChannelModel::new(self.deployment()?, self.path_loss()?)
    }

    pub fn bt(&self) -> f64 {
        self.channel.bandwidth_hz * self.channel.frame_s
    }

    pub fn qos(&self) -> Result<Vec<QoSSpec>> {
        let k = self.deployment()?.num_users();
        (0..k)
            .map(|n| {
                let u = self.users[if self.users.len() == 1 { 0 } else { n }];
                QoSSpec::from_physical(
                    u.load_kbps * 1e3,
                    u.delay_ms * 1e-3,
                    u.xi,
                    self.channel.frame_s,
                )
            })
            .collect()
    }

    pub fn area_grid(&self) -> Result<AreaGrid> {
        AreaGrid::new(self.area.threshold, self.area.resolution_m)
    }

    /// Copy with one parameter set on every user (or on the power policy).
    pub fn with_axis(&self, axis: SweepAxis, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        match axis {
            SweepAxis::Load => cfg.users.iter_mut().for_each(|u| u.load_kbps = value),
            SweepAxis::DelayBound => cfg.users.iter_mut().for_each(|u| u.delay_ms = value),
            SweepAxis::Xi => cfg.users.iter_mut().for_each(|u| u.xi = value),
            SweepAxis::Kappa => cfg.power.kappa = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    /// Traffic load, kbit/s.
    Load,
    Kappa,
    /// Delay bound, ms.
    DelayBound,
    Xi,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Load => "load",
            SweepAxis::Kappa => "kappa",
            SweepAxis::DelayBound => "delay-bound",
            SweepAxis::Xi => "xi",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepAxis::Load,
            SweepAxis::Kappa,
            SweepAxis::DelayBound,
            SweepAxis::Xi,
        ]
        .into_iter()
        .find(|a| a.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown sweep axis `{s}`")))
    }
}

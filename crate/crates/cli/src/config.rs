//! JSON run configuration.

use hdqkd::security::{ChannelParams, ProtocolParams, Receiver};
use hdqkd::{
    Amplitude, ArmConfig, BeamSplitter, DetectorPair, DoubleHomodyneConfig, HomodyneConfig, SignalState,
};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub receiver: Option<ReceiverSpec>,
    #[serde(default)]
    pub receivers: Vec<ReceiverSpec>,
    pub signal: Option<SignalSpec>,
    pub channel: Option<ChannelSpec>,
    pub protocol: Option<ProtocolSpec>,
    pub sweep: Option<SweepSpec>,
    pub monte_carlo: Option<MonteCarloSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    Homodyne,
    DoubleHomodyne,
}

/// One receiver. `c2` or `imbalance_deg` set the signal splitter of either
/// kind; `eta1`, `eta2` belong to homodyne and `lo_c2`, `arm1`, `arm2` to
/// double homodyne receivers.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceiverSpec {
    #[serde(rename = "type")]
    pub kind: ReceiverKind,
    pub label: Option<String>,
    pub lo_amp: f64,
    #[serde(default)]
    pub lo_phase_deg: f64,
    pub c2: Option<f64>,
    pub imbalance_deg: Option<f64>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub lo_c2: Option<f64>,
    pub arm1: Option<ArmSpec>,
    pub arm2: Option<ArmSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmSpec {
    #[serde(default = "half")]
    pub c2: f64,
    #[serde(default = "one")]
    pub eta1: f64,
    #[serde(default = "one")]
    pub eta2: f64,
}

impl Default for ArmSpec {
    fn default() -> Self {
        Self { c2: 0.5, eta1: 1.0, eta2: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    Coherent,
    Fock,
}

/// A coherent state `re + i·im` or a Fock state `n`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    #[serde(rename = "type")]
    pub kind: SignalKind,
    pub re: Option<f64>,
    pub im: Option<f64>,
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub transmittance: Option<f64>,
    pub length_km: Option<f64>,
    #[serde(default)]
    pub excess_noise: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSpec {
    pub v_a: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSpec {
    pub samples: usize,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

/// Parse a configuration, reporting the offending field path and position.
pub fn parse(text: &str) -> Result<Config, Failure> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Failure::Config(format!("config error at `{path}`: {inner}"))
    })
}

fn config_err(e: hdqkd::Error, context: &str) -> Failure {
    Failure::Config(format!("{context}: {e}"))
}

fn splitter(c2: Option<f64>, deg: Option<f64>, context: &str) -> Result<BeamSplitter, Failure> {
    match (c2, deg) {
        (Some(_), Some(_)) => Err(Failure::Config(format!("{context}: give either a transmittance or an imbalance angle"))),
        (Some(c2), None) => BeamSplitter::new(c2).map_err(|e| config_err(e, context)),
        (None, Some(d)) => BeamSplitter::from_imbalance_angle(d.to_radians()).map_err(|e| config_err(e, context)),
        (None, None) => Ok(BeamSplitter::balanced()),
    }
}

/// A receiver with the label used in output tables.
#[derive(Debug, Clone)]
pub struct Labeled {
    pub label: String,
    pub receiver: Receiver,
}

impl ReceiverSpec {
    fn build(&self, index: usize) -> Result<Labeled, Failure> {
        let context = format!("receivers[{index}]");
        let stray = |name: &str, set: bool| -> Result<(), Failure> {
            if set {
                return Err(Failure::Config(format!("{context}: `{name}` does not apply to this receiver type")));
            }
            Ok(())
        };
        let bs = splitter(self.c2, self.imbalance_deg, &context)?;
        let lo = Amplitude::from_polar(self.lo_amp, self.lo_phase_deg.to_radians());
        let receiver = match self.kind {
            ReceiverKind::Homodyne => {
                stray("lo_c2", self.lo_c2.is_some())?;
                stray("arm1", self.arm1.is_some())?;
                stray("arm2", self.arm2.is_some())?;
                let detectors = DetectorPair::new(self.eta1.unwrap_or(1.0), self.eta2.unwrap_or(1.0))
                    .map_err(|e| config_err(e, &context))?;
                Receiver::Homodyne(HomodyneConfig::new(bs, detectors, lo).map_err(|e| config_err(e, &context))?)
            }
            ReceiverKind::DoubleHomodyne => {
                stray("eta1", self.eta1.is_some())?;
                stray("eta2", self.eta2.is_some())?;
                let arm = |a: &ArmSpec| -> Result<ArmConfig, Failure> {
                    Ok(ArmConfig {
                        bs: BeamSplitter::new(a.c2).map_err(|e| config_err(e, &context))?,
                        detectors: DetectorPair::new(a.eta1, a.eta2).map_err(|e| config_err(e, &context))?,
                    })
                };
                let cfg = DoubleHomodyneConfig::new(
                    bs,
                    BeamSplitter::new(self.lo_c2.unwrap_or(0.5)).map_err(|e| config_err(e, &context))?,
                    arm(&self.arm1.clone().unwrap_or_default())?,
                    arm(&self.arm2.clone().unwrap_or_default())?,
                    lo,
                )
                .map_err(|e| config_err(e, &context))?;
                Receiver::DoubleHomodyne(cfg)
            }
        };
        Ok(Labeled { label: self.label.clone().unwrap_or_else(|| format!("rx{index}")), receiver })
    }
}

impl Config {
    /// Every receiver in declaration order; `receiver` precedes `receivers`.
    pub fn receivers(&self) -> Result<Vec<Labeled>, Failure> {
        let specs: Vec<&ReceiverSpec> = self.receiver.iter().chain(self.receivers.iter()).collect();
        if specs.is_empty() {
            return Err(Failure::Config("config needs a `receiver` or a non-empty `receivers` list".into()));
        }
        let built: Vec<Labeled> = specs.iter().enumerate().map(|(i, s)| s.build(i)).collect::<Result<_, _>>()?;
        let mut labels: Vec<&str> = built.iter().map(|l| l.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Failure::Config("receiver labels must be unique".into()));
        }
        Ok(built)
    }

    pub fn signal(&self) -> Result<SignalState, Failure> {
        let spec = self.signal.as_ref().ok_or_else(|| Failure::Config("config needs a `signal` section".into()))?;
        match spec.kind {
            SignalKind::Coherent => {
                if spec.n.is_some() {
                    return Err(Failure::Config("signal: `n` does not apply to a coherent state".into()));
                }
                let (re, im) = (spec.re.unwrap_or(0.0), spec.im.unwrap_or(0.0));
                if !(re.is_finite() && im.is_finite()) {
                    return Err(Failure::Config("signal amplitude must be finite".into()));
                }
                Ok(SignalState::Coherent(Amplitude::new(re, im)))
            }
            SignalKind::Fock => {
                if spec.re.is_some() || spec.im.is_some() {
                    return Err(Failure::Config("signal: `re` and `im` do not apply to a Fock state".into()));
                }
                let n = spec.n.ok_or_else(|| Failure::Config("signal: a Fock state needs `n`".into()))?;
                if n > hdqkd::photostat::MAX_FOCK {
                    return Err(Failure::Config(format!(
                        "Fock number {n} is not supported (maximum {})",
                        hdqkd::photostat::MAX_FOCK
                    )));
                }
                Ok(SignalState::Fock(n))
            }
        }
    }

    pub fn channel(&self) -> Result<ChannelParams, Failure> {
        let ch = self.channel.as_ref().ok_or_else(|| Failure::Config("config needs a `channel` section".into()))?;
        let result = match (ch.transmittance, ch.length_km) {
            (Some(_), Some(_)) => {
                return Err(Failure::Config("channel: give either `transmittance` or `length_km`".into()))
            }
            (Some(t), None) => ChannelParams::new(t, ch.excess_noise),
            (None, Some(l)) => ChannelParams::from_length(l, ch.excess_noise),
            (None, None) => ChannelParams::new(1.0, ch.excess_noise),
        };
        result.map_err(|e| config_err(e, "channel"))
    }

    pub fn protocol(&self) -> Result<ProtocolParams, Failure> {
        let p = self.protocol.as_ref().ok_or_else(|| Failure::Config("config needs a `protocol` section".into()))?;
        ProtocolParams::new(p.v_a, p.beta).map_err(|e| config_err(e, "protocol"))
    }

    pub fn sweep(&self) -> Result<&SweepSpec, Failure> {
        let s = self.sweep.as_ref().ok_or_else(|| Failure::Config("config needs a `sweep` section".into()))?;
        s.validate()?;
        Ok(s)
    }
}

impl SweepSpec {
    fn validate(&self) -> Result<(), Failure> {
        if self.steps < 2 {
            return Err(Failure::Config(format!("sweep.steps must be at least 2, got {}", self.steps)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Failure::Config(format!(
                "sweep range must satisfy min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }

    /// Evenly spaced grid including both end points.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..=n)
            .map(|k| if k == n { self.max } else { self.min + (self.max - self.min) * k as f64 / n as f64 })
            .collect()
    }
}

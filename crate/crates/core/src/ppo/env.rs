use crate::error::{Error, Result};
use crate::model::{ChannelKind, Scenario, SeReport};
use crate::placement::Placement;

/// An antenna configuration chosen by the agent.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Discrete(Placement),
    /// Raw Gaussian sample per AP, meters. Evaluated after clamping to `[0, N d_s]`.
    Continuous(Vec<f64>),
}

impl Action {
    pub fn len(&self) -> usize {
        match self {
            Action::Discrete(p) => p.len(),
            Action::Continuous(x) => x.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Action::Discrete(p) => write!(f, "{p}"),
            Action::Continuous(x) => {
                for (i, v) in x.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{v:e}")?;
                }
                Ok(())
            }
        }
    }
}

/// `s = {a, r, u}`: previous action, its reward and the per-TA SE.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpState {
    pub last_action: Action,
    pub last_reward: f64,
    pub ta_se: Vec<f64>,
}

/// Maps raw state values to network inputs of order one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScale {
    /// Divides positions (index for discrete, meters for continuous).
    pub position: f64,
    /// Divides the sum SE; per-TA SE is divided by `reward / K`.
    pub reward: f64,
}

impl MdpState {
    pub fn dim(&self) -> usize {
        self.last_action.len() + 1 + self.ta_se.len()
    }

    pub fn features(&self, scale: &FeatureScale) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        match &self.last_action {
            Action::Discrete(p) => {
                out.extend(p.positions().iter().map(|&n| n as f64 / scale.position))
            }
            Action::Continuous(x) => out.extend(x.iter().map(|v| v / scale.position)),
        }
        out.push(self.last_reward / scale.reward);
        let per_ta = scale.reward / self.ta_se.len() as f64;
        out.extend(self.ta_se.iter().map(|u| u / per_ta));
        out
    }
}

/// The static placement environment around a scenario.
#[derive(Debug, Clone)]
pub struct PlacementEnv<'a> {
    scenario: &'a Scenario,
    initial: MdpState,
    scale: FeatureScale,
    evaluations: u64,
}

impl<'a> PlacementEnv<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let ones = Placement::ones(scenario.num_aps());
        let report = scenario
            .evaluate(&ones)
            .expect("all-ones placement is always valid");
        let initial = MdpState {
            last_action: Action::Discrete(ones),
            last_reward: report.sum_se,
            ta_se: report.se,
        };
        let reward = if initial.last_reward > 0.0 {
            initial.last_reward
        } else {
            1.0
        };
        let scale = FeatureScale {
            position: scenario.num_positions() as f64,
            reward,
        };
        Self {
            scenario,
            initial,
            scale,
            evaluations: 1,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn feature_scale(&self) -> FeatureScale {
        self.scale
    }

    /// Feature scale for continuous actions (positions in meters).
    pub fn continuous_feature_scale(&self) -> FeatureScale {
        FeatureScale {
            position: self.scenario.config().rail_span(),
            ..self.scale
        }
    }

    pub fn state_dim(&self) -> usize {
        self.scenario.num_aps() + 1 + self.scenario.num_tas()
    }

    /// Objective evaluations so far (the all-ones reset counts once).
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// The state at the all-ones placement.
    pub fn reset(&self) -> MdpState {
        self.initial.clone()
    }

    /// Applies a discrete placement; the reward is its sum SE.
    pub fn step(&mut self, action: &Placement) -> Result<(MdpState, f64)> {
        let report = self.scenario.evaluate(action)?;
        self.evaluations += 1;
        Ok(self.transition(Action::Discrete(action.clone()), report))
    }

    /// Applies any action; continuous samples are clamped to the rail.
    pub fn step_action(&mut self, action: &Action) -> Result<(MdpState, f64)> {
        match action {
            Action::Discrete(p) => self.step(p),
            Action::Continuous(raw) => {
                let offsets = self.clamp_offsets(raw)?;
                let report = self.scenario.evaluate_offsets(&offsets, ChannelKind::Doppler)?;
                self.evaluations += 1;
                Ok(self.transition(Action::Continuous(offsets), report))
            }
        }
    }

    /// Sum SE of an action without counting it as an environment step.
    pub fn reward_of(&self, action: &Action) -> Result<f64> {
        match action {
            Action::Discrete(p) => self.scenario.sum_se(p),
            Action::Continuous(raw) => Ok(self
                .scenario
                .evaluate_offsets(&self.clamp_offsets(raw)?, ChannelKind::Doppler)?
                .sum_se),
        }
    }

    fn clamp_offsets(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.scenario.num_aps() {
            return Err(Error::Dimension {
                context: "continuous action",
                expected: self.scenario.num_aps(),
                got: raw.len(),
            });
        }
        let span = self.scenario.config().rail_span();
        Ok(raw.iter().map(|x| x.clamp(0.0, span)).collect())
    }

    fn transition(&self, action: Action, report: SeReport) -> (MdpState, f64) {
        let reward = report.sum_se;
        (
            MdpState {
                last_action: action,
                last_reward: reward,
                ta_se: report.se,
            },
            reward,
        )
    }
}

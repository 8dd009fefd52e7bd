//! The Developmental Network: a hidden Y area of competing neurons bridging
//! the sensory port X and the motor port Z.
//!
//! Every [`Network::step`] is one Y update followed by one Z/X update. Both
//! areas read the other's response from before the step, so the ports learn
//! from the Y response of the previous step while Y matches the current
//! `(z, x)` context:
//!
//! ```text
//!   (z(t), x(t)) ──► y(t+1) ──► (z'(t+2), x'(t+2))
//! ```
//!
//! When the Z port is supervised, the pattern imposed on it is the successor
//! of the previous context, and the Y→Z frequencies are updated from the
//! previous winner to the imposed bits.

mod neuron;
mod projection;
mod snapshot;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{apply_mask, AttentionMask, BitPattern, CodecError};
use crate::plasticity::{MaintenanceConfig, NeuronMaintenance};
use crate::scalar::Scalar;

pub use neuron::Neuron;
pub use projection::ProjectionArea;
pub use snapshot::{Snapshot, SNAPSHOT_FORMAT, SNAPSHOT_VERSION};

/// Gap below the perfect score 2 that still counts as a perfect match.
pub const PERFECT_MATCH_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("{area} dimension mismatch: expected {expected}, got {got}")]
    DimMismatch {
        area: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid network configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid snapshot: {0}")]
    InvalidSnapshot(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NetworkConfig<T> {
    pub z_dim: usize,
    pub x_dim: usize,
    /// Number of Y neurons.
    pub capacity: usize,
    /// Number of Y neurons firing per step.
    pub k: usize,
    pub epsilon: T,
    pub seed: u64,
    /// Synaptic maintenance; `None` disables it.
    pub maintenance: Option<MaintenanceConfig<T>>,
}

impl<T: Scalar> NetworkConfig<T> {
    pub fn new(z_dim: usize, x_dim: usize, capacity: usize) -> Self {
        Self {
            z_dim,
            x_dim,
            capacity,
            k: 1,
            epsilon: default_epsilon(),
            seed: 0,
            maintenance: None,
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_maintenance(mut self, cfg: Option<MaintenanceConfig<T>>) -> Self {
        self.maintenance = cfg;
        self
    }

    fn validate(&self) -> Result<(), NetworkError> {
        let bad = |m: &str| Err(NetworkError::InvalidConfig(m.to_string()));
        if self.z_dim == 0 || self.x_dim == 0 {
            return bad("pattern dimensions must be positive");
        }
        if self.capacity == 0 {
            return bad("capacity must be at least 1");
        }
        if self.k == 0 || self.k > self.capacity {
            return bad("k must be in 1..=capacity");
        }
        if self.epsilon.is_nan() || self.epsilon < T::zero() {
            return bad("epsilon must be non-negative");
        }
        Ok(())
    }
}

/// 1e-9, widened to a few ulps of 2 for scalars too coarse to resolve it.
pub fn default_epsilon<T: Scalar>() -> T {
    T::lit(PERFECT_MATCH_EPSILON).max(T::epsilon() * T::lit(16.0))
}

/// What the ports carry into one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInput<T> {
    pub z: BitPattern<T>,
    pub x: BitPattern<T>,
    /// `z` was imposed by the teacher rather than predicted.
    pub z_supervised: bool,
    /// `x` was sensed from outside rather than predicted.
    pub x_supervised: bool,
    pub z_mask: Option<AttentionMask>,
    pub x_mask: Option<AttentionMask>,
    /// Multiplier on the Y learning rate.
    pub gain: T,
}

impl<T: Scalar> StepInput<T> {
    pub fn supervised(z: BitPattern<T>, x: BitPattern<T>) -> Self {
        Self {
            z,
            x,
            z_supervised: true,
            x_supervised: true,
            z_mask: None,
            x_mask: None,
            gain: T::one(),
        }
    }

    pub fn free(z: BitPattern<T>, x: BitPattern<T>) -> Self {
        Self {
            z_supervised: false,
            x_supervised: false,
            ..Self::supervised(z, x)
        }
    }

    pub fn with_masks(
        mut self,
        z_mask: Option<AttentionMask>,
        x_mask: Option<AttentionMask>,
    ) -> Self {
        self.z_mask = z_mask;
        self.x_mask = x_mask;
        self
    }

    pub fn with_gain(mut self, gain: T) -> Self {
        self.gain = gain;
        self
    }
}

/// Result of Y competition on one context.
#[derive(Debug, Clone, PartialEq)]
pub struct Competition<T> {
    /// Firing neurons, best first.
    pub winners: Vec<usize>,
    /// Y response over all neurons; zero outside `winners`.
    pub response: Vec<T>,
    /// Pre-response of every initialized neuron.
    pub pre_responses: Vec<Option<T>>,
}

impl<T: Scalar> Competition<T> {
    pub fn best(&self) -> Option<(usize, T)> {
        self.winners
            .first()
            .and_then(|&j| self.pre_responses[j].map(|v| (j, v)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutput<T> {
    pub winners: Vec<usize>,
    pub y_response: Vec<T>,
    pub pre_responses: Vec<Option<T>>,
    /// Predicted next Z pattern.
    pub z_pred: BitPattern<T>,
    /// Predicted next X pattern.
    pub x_pred: BitPattern<T>,
    /// Un-thresholded Z pre-actions behind `z_pred`.
    pub z_graded: Vec<T>,
    /// Un-thresholded X pre-actions behind `x_pred`.
    pub x_graded: Vec<T>,
    pub recruited: bool,
    /// Network time after the step.
    pub time: u64,
}

impl<T: Scalar> StepOutput<T> {
    pub fn best_pre_response(&self) -> Option<T> {
        self.winners.first().and_then(|&j| self.pre_responses[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    config: NetworkConfig<T>,
    neurons: Vec<Neuron<T>>,
    to_z: ProjectionArea<T>,
    to_x: ProjectionArea<T>,
    time: u64,
    /// Y response of the latest Y update.
    response: Vec<T>,
    /// Whether `response` still awaits its successor on the ports.
    pending: bool,
    maintenance: Option<Vec<NeuronMaintenance<T>>>,
}

impl<T: Scalar> Network<T> {
    /// A fresh network whose Y neurons start from seeded random weights.
    pub fn new(config: NetworkConfig<T>) -> Result<Self, NetworkError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut draw = |n: usize| -> Vec<T> { (0..n).map(|_| T::lit(rng.gen::<f64>())).collect() };
        let neurons = (0..config.capacity)
            .map(|_| {
                let top = draw(config.z_dim);
                let bottom = draw(config.x_dim);
                Neuron::with_weights(top, bottom)
            })
            .collect();
        let maintenance = config.maintenance.map(|_| {
            (0..config.capacity)
                .map(|_| NeuronMaintenance::new(config.z_dim + config.x_dim))
                .collect()
        });
        Ok(Self {
            to_z: ProjectionArea::new(config.z_dim, config.capacity),
            to_x: ProjectionArea::new(config.x_dim, config.capacity),
            response: vec![T::zero(); config.capacity],
            pending: false,
            time: 0,
            neurons,
            maintenance,
            config,
        })
    }

    pub fn config(&self) -> &NetworkConfig<T> {
        &self.config
    }

    pub fn capacity(&self) -> usize {
        self.config.capacity
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn neurons(&self) -> &[Neuron<T>] {
        &self.neurons
    }

    pub fn to_z(&self) -> &ProjectionArea<T> {
        &self.to_z
    }

    pub fn to_x(&self) -> &ProjectionArea<T> {
        &self.to_x
    }

    pub fn y_response(&self) -> &[T] {
        &self.response
    }

    pub fn maintenance_stats(&self) -> Option<&[NeuronMaintenance<T>]> {
        self.maintenance.as_deref()
    }

    pub fn initialized_count(&self) -> usize {
        self.neurons.iter().filter(|n| n.initialized).count()
    }

    /// Replaces the synapse masks of neuron `j` (e.g. to restrict it to an
    /// attended sub-pattern).
    pub fn set_synapse_masks(
        &mut self,
        j: usize,
        top: Vec<bool>,
        bottom: Vec<bool>,
    ) -> Result<(), NetworkError> {
        self.check_dim("Z", top.len(), self.config.z_dim)?;
        self.check_dim("X", bottom.len(), self.config.x_dim)?;
        let n = self
            .neurons
            .get_mut(j)
            .ok_or_else(|| NetworkError::InvalidConfig(format!("no neuron {j}")))?;
        n.set_top_mask(top);
        n.set_bottom_mask(bottom);
        Ok(())
    }

    fn check_dim(
        &self,
        area: &'static str,
        got: usize,
        expected: usize,
    ) -> Result<(), NetworkError> {
        if got == expected {
            Ok(())
        } else {
            Err(NetworkError::DimMismatch {
                area,
                expected,
                got,
            })
        }
    }

    fn check_pair(&self, z: &BitPattern<T>, x: &BitPattern<T>) -> Result<(), NetworkError> {
        self.check_dim("Z", z.dim(), self.config.z_dim)?;
        self.check_dim("X", x.dim(), self.config.x_dim)
    }

    /// Top-k competition among initialized neurons on a (masked) context.
    ///
    /// Ties break toward the lower index. With k = 1 the winner responds 1.
    /// With k > 1 the winners' pre-responses are rescaled linearly so the best
    /// responds 1 and the (k+1)-th best would respond 0; winners that
    /// rescale to 0 do not fire.
    pub fn compete(&self, z: &[T], x: &[T]) -> Competition<T> {
        let pre_responses: Vec<Option<T>> = self
            .neurons
            .iter()
            .map(|n| n.initialized.then(|| n.pre_response(z, x)))
            .collect();
        let mut ranked: Vec<(usize, T)> = pre_responses
            .iter()
            .enumerate()
            .filter_map(|(j, p)| p.map(|v| (j, v)))
            .collect();
        // stable sort keeps index order among equal scores
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));

        let mut response = vec![T::zero(); self.neurons.len()];
        let mut winners = Vec::new();
        let k = self.config.k.min(ranked.len());
        if k == 1 {
            response[ranked[0].0] = T::one();
            winners.push(ranked[0].0);
        } else if k > 1 {
            let top = ranked[0].1;
            let floor = ranked.get(k).map_or(T::zero(), |r| r.1);
            let span = top - floor;
            for &(j, v) in &ranked[..k] {
                let r = if span > T::zero() {
                    (v - floor) / span
                } else {
                    T::one()
                };
                if r > T::zero() {
                    response[j] = r;
                    winners.push(j);
                }
            }
        }
        Competition {
            winners,
            response,
            pre_responses,
        }
    }

    fn masked(&self, input: &StepInput<T>) -> Result<(BitPattern<T>, BitPattern<T>), NetworkError> {
        self.check_pair(&input.z, &input.x)?;
        let z = match &input.z_mask {
            Some(m) => apply_mask(&input.z, m)?,
            None => input.z.clone(),
        };
        let x = match &input.x_mask {
            Some(m) => apply_mask(&input.x, m)?,
            None => input.x.clone(),
        };
        Ok((z, x))
    }

    /// A perfect match scores 1 per non-zero context part, so 2 for a
    /// full context.
    fn is_perfect(&self, c: &Competition<T>, attainable: T) -> bool {
        c.best()
            .is_some_and(|(_, v)| v >= attainable - self.config.epsilon)
    }

    /// One full transition: the ports learn from the previous Y response if
    /// supervised, Y competes on the current context (recruiting a free
    /// neuron for a novel supervised context, otherwise updating the
    /// winners), and the ports predict from the new Y response.
    pub fn step(&mut self, input: &StepInput<T>) -> Result<StepOutput<T>, NetworkError> {
        let (z, x) = self.masked(input)?;

        // Y half-step: reads only (z, x) and the Y bank.
        let mut comp = self.compete(z.values(), x.values());
        let mut recruited = false;
        let parts = usize::from(!z.is_zero()) + usize::from(!x.is_zero());
        let attainable = T::lit(parts as f64);
        if parts > 0 && !self.is_perfect(&comp, attainable) && input.z_supervised {
            if let Some(free) = self.neurons.iter().position(|n| !n.initialized) {
                self.neurons[free].recruit(z.values(), x.values());
                log::debug!("t={} recruited Y neuron {free}", self.time);
                comp.response = vec![T::zero(); self.neurons.len()];
                comp.response[free] = T::one();
                comp.winners = vec![free];
                recruited = true;
            }
        }
        // an empty context carries nothing to learn
        if !recruited && parts > 0 {
            for &j in &comp.winners {
                self.fire(j, z.values(), x.values(), comp.response[j], input.gain);
            }
        }

        // Z/X half-step: reads the Y response from before this step.
        if self.pending {
            let z_attend = input.z_mask.as_ref().map(|m| m.bits());
            let x_attend = input.x_mask.as_ref().map(|m| m.bits());
            if input.z_supervised {
                self.to_z
                    .update(&self.response, &input.z.active(), z_attend);
            }
            if input.x_supervised {
                self.to_x
                    .update(&self.response, &input.x.active(), x_attend);
            }
        }

        self.response = comp.response;
        self.pending = !comp.winners.is_empty();
        self.time += 2;
        Ok(self.output(comp.winners, comp.pre_responses, recruited))
    }

    /// A lone Z/X half-step: the teacher imposes the successor of the last
    /// context on the ports without presenting a new context. Consumes the
    /// pending Y response.
    pub fn supervise(
        &mut self,
        z: Option<&BitPattern<T>>,
        x: Option<&BitPattern<T>>,
    ) -> Result<(), NetworkError> {
        if let Some(z) = z {
            self.check_dim("Z", z.dim(), self.config.z_dim)?;
        }
        if let Some(x) = x {
            self.check_dim("X", x.dim(), self.config.x_dim)?;
        }
        if self.pending {
            if let Some(z) = z {
                self.to_z.update(&self.response, &z.active(), None);
            }
            if let Some(x) = x {
                self.to_x.update(&self.response, &x.active(), None);
            }
        }
        self.pending = false;
        self.time += 1;
        Ok(())
    }

    /// Drops any pending Y response so the next supervised step does not
    /// link it to an unrelated pattern.
    pub fn break_sequence(&mut self) {
        self.pending = false;
    }

    /// Competition and prediction on a context without learning.
    pub fn evaluate(
        &self,
        z: &BitPattern<T>,
        x: &BitPattern<T>,
    ) -> Result<StepOutput<T>, NetworkError> {
        self.check_pair(z, x)?;
        let comp = self.compete(z.values(), x.values());
        let (zb, zg) = self.to_z.predict(&comp.response);
        let (xb, xg) = self.to_x.predict(&comp.response);
        Ok(StepOutput {
            winners: comp.winners,
            y_response: comp.response,
            pre_responses: comp.pre_responses,
            z_pred: BitPattern::from_bools(&zb),
            x_pred: BitPattern::from_bools(&xb),
            z_graded: zg,
            x_graded: xg,
            recruited: false,
            time: self.time,
        })
    }

    fn fire(&mut self, j: usize, z: &[T], x: &[T], response: T, gain: T) {
        let neuron = &mut self.neurons[j];
        let before: Option<Vec<T>> = self
            .maintenance
            .is_some()
            .then(|| neuron.top.iter().chain(&neuron.bottom).copied().collect());
        neuron.hebbian_update(z, x, response, gain);
        if let (Some(cfg), Some(stats), Some(weights)) = (
            self.config.maintenance.as_ref(),
            self.maintenance.as_mut(),
            before,
        ) {
            // the signal every synapse sees, live or not
            let pre: Vec<T> = {
                let all = Neuron::with_weights(vec![T::zero(); z.len()], vec![T::zero(); x.len()]);
                let (pz, px) = all.input_direction(z, x);
                pz.into_iter().chain(px).collect()
            };
            stats[j].observe(neuron, &pre, &weights, cfg);
        }
    }

    fn output(
        &self,
        winners: Vec<usize>,
        pre_responses: Vec<Option<T>>,
        recruited: bool,
    ) -> StepOutput<T> {
        let (zb, zg) = self.to_z.predict(&self.response);
        let (xb, xg) = self.to_x.predict(&self.response);
        StepOutput {
            winners,
            y_response: self.response.clone(),
            pre_responses,
            z_pred: BitPattern::from_bools(&zb),
            x_pred: BitPattern::from_bools(&xb),
            z_graded: zg,
            x_graded: xg,
            recruited,
            time: self.time,
        }
    }
}

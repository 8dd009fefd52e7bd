//! Synaptic maintenance: each synapse tracks the running deviation β between
//! its pre-synaptic signal and its weight; the ratio of β to the neuron-wide
//! mean β̄ decides whether the synapse grows back, stays, or is trimmed.

use serde::{Deserialize, Serialize};

use crate::network::Neuron;
use crate::scalar::Scalar;

pub const DEFAULT_GROW_THRESHOLD: f64 = 1.0;
pub const DEFAULT_TRIM_THRESHOLD: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MaintenanceConfig<T> {
    /// Ratios strictly below this grow a trimmed synapse back.
    pub grow_threshold: T,
    /// Ratios strictly above this trim the synapse.
    pub trim_threshold: T,
}

impl<T: Scalar> Default for MaintenanceConfig<T> {
    fn default() -> Self {
        Self {
            grow_threshold: T::lit(DEFAULT_GROW_THRESHOLD),
            trim_threshold: T::lit(DEFAULT_TRIM_THRESHOLD),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SynapseDecision {
    Grow,
    Keep,
    Trim,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SynapseStats<T> {
    pub beta: T,
    pub samples: u64,
}

/// Folds one observed deviation `|pre − weight|` into `stats`; `age` is the
/// sample count after this observation, as in the Hebbian schedule.
pub fn update_deviation<T: Scalar>(
    stats: SynapseStats<T>,
    pre: T,
    weight: T,
    age: u64,
) -> SynapseStats<T> {
    let dev = (pre - weight).abs();
    let w2 = T::one() / T::from_u64(age.max(1)).expect("age fits");
    let beta = if w2 == T::one() {
        dev
    } else {
        stats.beta + w2 * (dev - stats.beta)
    };
    SynapseStats { beta, samples: age }
}

/// Threshold rule on `β / β̄`. A zero mean counts as ratio 1; both
/// thresholds are exclusive, so ratios equal to either one keep.
pub fn synaptogenic_decision<T: Scalar>(
    beta: T,
    mean_beta: T,
    cfg: &MaintenanceConfig<T>,
) -> SynapseDecision {
    let ratio = if mean_beta > T::zero() {
        beta / mean_beta
    } else {
        T::one()
    };
    if ratio < cfg.grow_threshold {
        SynapseDecision::Grow
    } else if ratio > cfg.trim_threshold {
        SynapseDecision::Trim
    } else {
        SynapseDecision::Keep
    }
}

/// Applies one decision per synapse, top-down synapses first. Trimming only
/// clears the mask bit; weights are kept so a regrown synapse resumes with
/// its old value.
pub fn apply_maintenance<T: Scalar>(neuron: &mut Neuron<T>, decisions: &[SynapseDecision]) {
    let zd = neuron.top.len();
    assert_eq!(
        decisions.len(),
        zd + neuron.bottom.len(),
        "one decision per synapse"
    );
    let masks = neuron
        .top_mask
        .iter_mut()
        .chain(neuron.bottom_mask.iter_mut());
    for (live, d) in masks.zip(decisions) {
        match d {
            SynapseDecision::Grow => *live = true,
            SynapseDecision::Trim => *live = false,
            SynapseDecision::Keep => {}
        }
    }
}

/// Deviation statistics of one neuron, top-down synapses first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronMaintenance<T> {
    pub synapses: Vec<SynapseStats<T>>,
}

impl<T: Scalar> NeuronMaintenance<T> {
    pub fn new(synapses: usize) -> Self {
        Self {
            synapses: vec![
                SynapseStats {
                    beta: T::zero(),
                    samples: 0
                };
                synapses
            ],
        }
    }

    /// β̄ over the neuron's live synapses.
    pub fn mean_beta(&self, live: &[bool]) -> T {
        let (sum, n) = self
            .synapses
            .iter()
            .zip(live)
            .filter(|(_, &on)| on)
            .fold((T::zero(), 0u64), |(s, n), (st, _)| (s + st.beta, n + 1));
        if n == 0 {
            T::zero()
        } else {
            sum / T::from_u64(n).expect("count fits")
        }
    }

    /// One maintenance round for a neuron that just fired with per-synapse
    /// pre-synaptic signals `pre` against weights `weights` (both top then
    /// bottom). Trimmed synapses keep tracking β so they can grow back.
    /// Some live synapse always has a ratio of at most 1, so a round never
    /// trims a neuron's last live synapse.
    pub fn observe(
        &mut self,
        neuron: &mut Neuron<T>,
        pre: &[T],
        weights: &[T],
        cfg: &MaintenanceConfig<T>,
    ) -> Vec<SynapseDecision> {
        for ((st, &p), &w) in self.synapses.iter_mut().zip(pre).zip(weights) {
            *st = update_deviation(*st, p, w, st.samples + 1);
        }
        let live: Vec<bool> = neuron
            .top_mask
            .iter()
            .chain(&neuron.bottom_mask)
            .copied()
            .collect();
        let mean = self.mean_beta(&live);
        let decisions: Vec<SynapseDecision> = self
            .synapses
            .iter()
            .zip(&live)
            .map(
                |(st, &on)| match synaptogenic_decision(st.beta, mean, cfg) {
                    SynapseDecision::Grow if on => SynapseDecision::Keep,
                    SynapseDecision::Trim if !on => SynapseDecision::Keep,
                    d => d,
                },
            )
            .collect();
        apply_maintenance(neuron, &decisions);
        decisions
    }
}

use serde::{Deserialize, Serialize};

use crate::scalar::{masked_cosine, normalize, Scalar};

/// A hidden (Y) neuron with a top-down weight over Z and a bottom-up weight
/// over X. Masked-off synapses take no part in matching or learning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neuron<T> {
    pub(crate) top: Vec<T>,
    pub(crate) bottom: Vec<T>,
    pub(crate) age: u64,
    pub(crate) initialized: bool,
    pub(crate) top_mask: Vec<bool>,
    pub(crate) bottom_mask: Vec<bool>,
}

impl<T: Scalar> Neuron<T> {
    /// An uninitialized neuron holding arbitrary starting weights.
    pub fn with_weights(top: Vec<T>, bottom: Vec<T>) -> Self {
        let (zd, xd) = (top.len(), bottom.len());
        Self {
            top,
            bottom,
            age: 0,
            initialized: false,
            top_mask: vec![true; zd],
            bottom_mask: vec![true; xd],
        }
    }

    pub fn top(&self) -> &[T] {
        &self.top
    }

    pub fn bottom(&self) -> &[T] {
        &self.bottom
    }

    pub fn age(&self) -> u64 {
        self.age
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }

    pub fn top_mask(&self) -> &[bool] {
        &self.top_mask
    }

    pub fn bottom_mask(&self) -> &[bool] {
        &self.bottom_mask
    }

    pub fn set_top_mask(&mut self, mask: Vec<bool>) {
        assert_eq!(mask.len(), self.top.len());
        self.top_mask = mask;
    }

    pub fn set_bottom_mask(&mut self, mask: Vec<bool>) {
        assert_eq!(mask.len(), self.bottom.len());
        self.bottom_mask = mask;
    }

    /// Match score `ṫ·ż + ḃ·ẋ`, each part normalized over live synapses.
    pub fn pre_response(&self, z: &[T], x: &[T]) -> T {
        masked_cosine(&self.top, z, &self.top_mask)
            + masked_cosine(&self.bottom, x, &self.bottom_mask)
    }

    /// Per-part unit directions of the context over this neuron's live synapses.
    pub fn input_direction(&self, z: &[T], x: &[T]) -> (Vec<T>, Vec<T>) {
        let live = |v: &[T], m: &[bool]| -> Vec<T> {
            normalize(
                &v.iter()
                    .zip(m)
                    .map(|(&c, &on)| if on { c } else { T::zero() })
                    .collect::<Vec<_>>(),
            )
        };
        (live(z, &self.top_mask), live(x, &self.bottom_mask))
    }

    /// Takes on the context as its first memory: weights become the context
    /// directions and the firing age becomes 1.
    pub fn recruit(&mut self, z: &[T], x: &[T]) {
        self.top = normalize(z);
        self.bottom = normalize(x);
        self.age = 1;
        self.initialized = true;
    }

    /// Hebbian update after firing with response `response`.
    ///
    /// The age is incremented first; then `v ← v + w2·(r·ṗ − v)` with
    /// `w2 = min(gain / age, 1)`, which equals `w1·v + w2·r·ṗ` for
    /// `w1 = 1 − w2`. With `gain = 1` and `r = 1` the weight is the running
    /// mean of every `ṗ` seen at firing time.
    pub fn hebbian_update(&mut self, z: &[T], x: &[T], response: T, gain: T) {
        self.age += 1;
        self.initialized = true;
        let w2 = (gain / T::from_u64(self.age).expect("age fits")).min(T::one());
        let (pz, px) = self.input_direction(z, x);
        amnesic_mean(&mut self.top, &pz, &self.top_mask, response, w2);
        amnesic_mean(&mut self.bottom, &px, &self.bottom_mask, response, w2);
    }
}

fn amnesic_mean<T: Scalar>(v: &mut [T], p: &[T], live: &[bool], r: T, w2: T) {
    for ((w, &pi), &on) in v.iter_mut().zip(p).zip(live) {
        if !on {
            continue;
        }
        let target = r * pi;
        *w = if w2 == T::one() {
            target
        } else {
            *w + w2 * (target - *w)
        };
    }
}

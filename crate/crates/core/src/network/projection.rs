use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Y→Z or Y→X weights. Row `i` holds, for every Y neuron `j`, the fraction
/// of target neuron `i`'s firings that came right after `j` fired.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionArea<T> {
    pub(crate) rows: Vec<Vec<T>>,
    pub(crate) ages: Vec<u64>,
}

impl<T: Scalar> ProjectionArea<T> {
    pub fn new(target_dim: usize, sources: usize) -> Self {
        Self {
            rows: vec![vec![T::zero(); sources]; target_dim],
            ages: vec![0; target_dim],
        }
    }

    pub fn target_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn ages(&self) -> &[u64] {
        &self.ages
    }

    /// Learns one supervised firing. Every target neuron that fires
    /// (`target[i] >= 0.5`, and attended under `attend` when given) averages
    /// the sum-normalized Y response into its row; the others keep their
    /// memory.
    pub fn update(&mut self, y_response: &[T], target: &[bool], attend: Option<&[bool]>) {
        let total = y_response.iter().fold(T::zero(), |a, &b| a + b);
        if total <= T::zero() {
            return;
        }
        let y: Vec<T> = y_response.iter().map(|&r| r / total).collect();
        for (i, (row, age)) in self.rows.iter_mut().zip(&mut self.ages).enumerate() {
            if !target[i] || attend.is_some_and(|a| !a[i]) {
                continue;
            }
            *age += 1;
            let w2 = T::one() / T::from_u64(*age).expect("age fits");
            for (w, &yj) in row.iter_mut().zip(&y) {
                *w = if *age == 1 { yj } else { *w + w2 * (yj - *w) };
            }
        }
    }

    /// Graded pre-action per target neuron; untaught rows stay at zero.
    pub fn graded(&self, y_response: &[T]) -> Vec<T> {
        self.rows
            .iter()
            .zip(&self.ages)
            .map(|(row, &age)| {
                if age == 0 {
                    T::zero()
                } else {
                    row.iter()
                        .zip(y_response)
                        .fold(T::zero(), |acc, (&w, &y)| acc + w * y)
                }
            })
            .collect()
    }

    /// Binary prediction: a target neuron fires iff its pre-action is positive.
    pub fn predict(&self, y_response: &[T]) -> (Vec<bool>, Vec<T>) {
        let graded = self.graded(y_response);
        (graded.iter().map(|&g| g > T::zero()).collect(), graded)
    }
}

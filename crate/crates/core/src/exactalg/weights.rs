use super::Rat;
use crate::error::{Error, Result};

/// Rational weights `q_i` with `0 < q_i <= 1/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    weights: Vec<Rat>,
}

impl WeightSystem {
    pub fn new(weights: Vec<Rat>) -> Result<WeightSystem> {
        let half = Rat::new(1, 2);
        for q in &weights {
            if !q.is_positive() || *q > half {
                return Err(Error::InvalidWeight(q.clone()));
            }
        }
        Ok(WeightSystem { weights })
    }

    /// Weights without the `(0, 1/2]` check; used for gradings that are not
    /// singularity weights (parameter degrees can be zero or negative).
    pub fn unchecked(weights: Vec<Rat>) -> WeightSystem {
        WeightSystem { weights }
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Central charge `sum (1 - 2 q_i)`.
    pub fn central_charge(&self) -> Rat {
        let two = Rat::from_int(2);
        self.weights.iter().fold(Rat::zero(), |acc, q| &acc + &(Rat::one() - &two * q))
    }
}

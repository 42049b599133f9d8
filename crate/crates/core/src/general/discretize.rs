use serde::{Deserialize, Serialize};

use crate::error::{ParamError, SparsifyError};

/// Weight class of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelAssignment {
    /// `w < beta/n^2`; rounded to zero.
    Zero,
    /// `lambda_i <= w < min(lambda_{i+1}, beta)`; rounded to `lambda_i`.
    Level(usize),
    /// `w >= beta`; kept as is.
    Heavy,
}

/// Geometric table `lambda_i = (beta/n^2)(1 + beta)^i` for `i` in `[0, K]`,
/// where `K` is the last index with `lambda_K < beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    n: usize,
    beta: f64,
    table: Vec<f64>,
}

impl Discretization {
    pub fn new(n: usize, beta: f64) -> Result<Self, ParamError> {
        if n < 2 {
            return Err(ParamError::TooFewNodes(n));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ParamError::OutOfUnitInterval { name: "beta", value: beta });
        }
        let base = beta / (n * n) as f64;
        let mut table = Vec::new();
        let mut i = 0;
        loop {
            let x = base * (1.0 + beta).powi(i);
            if x >= beta {
                break;
            }
            table.push(x);
            i += 1;
        }
        Ok(Discretization { n, beta, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `K`.
    pub fn top(&self) -> usize {
        self.table.len() - 1
    }

    pub fn lambda(&self, i: usize) -> f64 {
        self.table[i]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Upper end of bracket `i`: `lambda_{i+1}`, or `beta` for `i = K`.
    pub fn upper(&self, i: usize) -> f64 {
        self.table.get(i + 1).copied().unwrap_or(self.beta)
    }

    /// Class of `x` and its rounded weight `w^`.
    pub fn classify(&self, x: f64) -> Result<(LevelAssignment, f64), SparsifyError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(SparsifyError::WeightOutOfRange(x));
        }
        if x >= self.beta {
            return Ok((LevelAssignment::Heavy, x));
        }
        if x < self.table[0] {
            return Ok((LevelAssignment::Zero, 0.0));
        }
        let guess = ((x / self.table[0]).ln() / (1.0 + self.beta).ln()).floor();
        let mut i = (guess.max(0.0) as usize).min(self.top());
        // the logarithm can land one bracket off near a boundary
        while i > 0 && x < self.table[i] {
            i -= 1;
        }
        while i < self.top() && x >= self.table[i + 1] {
            i += 1;
        }
        Ok((LevelAssignment::Level(i), self.table[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        let d = Discretization::new(10, 0.05).unwrap();
        assert_eq!(d.lambda(0), 0.05 / 100.0);
        assert!(d.lambda(d.top()) < 0.05);
        assert!(d.lambda(d.top()) * 1.05 >= 0.05);
        assert!(d.table().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn heavy_and_zero() {
        let d = Discretization::new(10, 0.05).unwrap();
        assert_eq!(d.classify(0.07).unwrap(), (LevelAssignment::Heavy, 0.07));
        assert_eq!(d.classify(0.05).unwrap(), (LevelAssignment::Heavy, 0.05));
        assert_eq!(d.classify(1e-5).unwrap(), (LevelAssignment::Zero, 0.0));
        assert!(d.classify(1.5).is_err());
        assert!(d.classify(-0.1).is_err());
    }

    #[test]
    fn bracket_boundaries() {
        let d = Discretization::new(50, 0.1).unwrap();
        for i in 0..=d.top() {
            let x = d.lambda(i);
            assert_eq!(d.classify(x).unwrap(), (LevelAssignment::Level(i), x));
            let below = f64::from_bits(x.to_bits() - 1);
            let want = if i == 0 { LevelAssignment::Zero } else { LevelAssignment::Level(i - 1) };
            assert_eq!(d.classify(below).unwrap().0, want);
        }
        let top = f64::from_bits(0.1f64.to_bits() - 1);
        assert_eq!(d.classify(top).unwrap().0, LevelAssignment::Level(d.top()));
    }
}

use num_traits::{Signed, Zero};

use super::{SetFunction, ValuationError};
use crate::order::FinitePoset;
use crate::rational::Rational;
use crate::set::ElementSet;

/// A non-negative function on the elements of a poset. Lower semicontinuity
/// for the upper-set topology is monotonicity, checked by
/// [`StepFunction::check_monotone`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepFunction {
    values: Vec<Rational>,
}

impl StepFunction {
    pub fn new(values: Vec<Rational>) -> Result<Self, ValuationError> {
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(ValuationError::NegativeWeight(v.clone()));
        }
        Ok(StepFunction { values })
    }

    /// `c·χ_U` on a poset of `n` elements.
    pub fn characteristic(n: usize, set: ElementSet, c: Rational) -> Self {
        let values = (0..n)
            .map(|x| if set.contains(x) { c.clone() } else { Rational::zero() })
            .collect();
        StepFunction { values }
    }

    pub fn value(&self, x: usize) -> &Rational {
        &self.values[x]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn check_monotone(&self, poset: &FinitePoset) -> Result<(), ValuationError> {
        if self.values.len() != poset.size() {
            return Err(ValuationError::Arity {
                expected: poset.size(),
                got: self.values.len(),
            });
        }
        for x in 0..poset.size() {
            for y in poset.up_of(x).iter() {
                if self.values[x] > self.values[y] {
                    return Err(ValuationError::NonMonotone {
                        low: poset.name(x).to_string(),
                        high: poset.name(y).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `{x | h(x) ≥ t}`, open when `h` is monotone.
    pub fn level_set(&self, t: &Rational) -> ElementSet {
        (0..self.values.len()).filter(|&x| self.values[x] >= *t).collect()
    }

    pub fn sum(&self, other: &StepFunction) -> StepFunction {
        StepFunction {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scaled(&self, c: &Rational) -> StepFunction {
        StepFunction {
            values: self.values.iter().map(|a| a * c).collect(),
        }
    }
}

/// `∫ h dg` for a monotone step function `h`.
///
/// With the distinct values `0 = t₀ < t₁ < … < t_k` of `h` (0 prepended),
/// the Riemann integral `∫₀^∞ g(h > t) dt` is exactly
/// `Σ_j (t_j − t_{j−1}) · g({x | h(x) ≥ t_j})`.
pub fn choquet_integral<G>(h: &StepFunction, g: &G, poset: &FinitePoset) -> Result<Rational, ValuationError>
where
    G: SetFunction + ?Sized,
{
    h.check_monotone(poset)?;
    let mut thresholds: Vec<Rational> = h.values.iter().filter(|v| !v.is_zero()).cloned().collect();
    thresholds.sort();
    thresholds.dedup();
    let mut total = Rational::zero();
    let mut prev = Rational::zero();
    for t in thresholds {
        total += (&t - &prev) * g.measure(h.level_set(&t));
        prev = t;
    }
    Ok(total)
}

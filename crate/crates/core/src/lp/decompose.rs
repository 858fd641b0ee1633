//! Splitting a simple capacity dominated by a valuation into a mixture of
//! point strategies.
//!
//! Given `κ = Σ_x a_x u_{B_x} ≤ ν`, a strategy `f` picks one point
//! `f(x) ∈ B_x` per term. Some probability vector `β` over all strategies
//! satisfies `Σ_{f,x} β_f a_x δ_{f(x)} ≤ ν`. On a finite poset the set of
//! such `β` is a polytope cut out by one inequality per open set, so it is
//! found directly as a linear-programming feasibility problem.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{LinearProgram, LpStatus, Relation};
use crate::order::{FinitePoset, OpenSet};
use crate::rational::Rational;
use crate::set::ElementSet;
use crate::valuation::{stochastic_leq_on, Dominance, SimpleCapacity, SimpleValuation};

/// Upper bound on `|Σ|` accepted by [`StrategySpace::new`].
pub const MAX_STRATEGIES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("capacity is not below the valuation on an open set")]
    NotDominated(OpenSet),
    #[error("strategy space has {0} elements, limit is {MAX_STRATEGIES}")]
    TooManyStrategies(u128),
    #[error("strategy choice set is empty")]
    EmptyChoice,
    #[error("decomposition LP returned {0:?} although the capacity is dominated")]
    Internal(LpStatus),
}

/// `Σ = Π_x B_x`, listed lexicographically (first term most significant,
/// members of each `B_x` in increasing order).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StrategySpace {
    choices: Vec<ElementSet>,
    strategies: Vec<Vec<usize>>,
}

impl StrategySpace {
    pub fn new(choices: Vec<ElementSet>) -> Result<Self, DecomposeError> {
        if choices.iter().any(|b| b.is_empty()) {
            return Err(DecomposeError::EmptyChoice);
        }
        let size: u128 = choices.iter().map(|b| b.len() as u128).product();
        if size > MAX_STRATEGIES as u128 {
            return Err(DecomposeError::TooManyStrategies(size));
        }
        let mut strategies = vec![Vec::new()];
        for b in &choices {
            strategies = strategies
                .into_iter()
                .flat_map(|prefix| {
                    b.iter().map(move |y| {
                        let mut f = prefix.clone();
                        f.push(y);
                        f
                    })
                })
                .collect();
        }
        Ok(StrategySpace { choices, strategies })
    }

    pub fn choices(&self) -> &[ElementSet] {
        &self.choices
    }

    pub fn strategies(&self) -> &[Vec<usize>] {
        &self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }
}

/// A probability vector indexed by a strategy space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimplexVector(Vec<Rational>);

impl SimplexVector {
    pub fn new(weights: Vec<Rational>) -> Option<Self> {
        let ok = !weights.is_empty()
            && weights.iter().all(|w| !w.is_negative())
            && weights.iter().sum::<Rational>().is_one();
        ok.then_some(SimplexVector(weights))
    }

    /// The point mass on strategy `i` of `n`.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut w = vec![Rational::zero(); n];
        w[i] = Rational::one();
        SimplexVector(w)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }
}

/// `Σ_{f,x} β_f a_x δ_{f(x)}`.
pub fn mixture(space: &StrategySpace, weights: &[Rational], beta: &SimplexVector) -> SimpleValuation {
    let mut out = SimpleValuation::zero();
    for (f, b) in space.strategies.iter().zip(beta.weights()) {
        if b.is_zero() {
            continue;
        }
        let terms = f.iter().zip(weights).map(|(&y, a)| (y, b * a));
        out = &out + &SimpleValuation::from_weights(terms).expect("non-negative weights");
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decomposition {
    pub space: StrategySpace,
    pub beta: SimplexVector,
    pub mixture: SimpleValuation,
}

/// Finds `β ∈ Δ_Σ` with `Σ_{f,x} β_f a_x δ_{f(x)} ≤ ν`, one LP row per open
/// set. The precondition `κ ≤ ν` is checked first.
pub fn decompose_capacity(
    kappa: &SimpleCapacity,
    nu: &SimpleValuation,
    poset: &FinitePoset,
) -> Result<Decomposition, DecomposeError> {
    let opens = poset.enumerate_opens();
    if let Dominance::Violated(u) = stochastic_leq_on(kappa, nu, &opens) {
        return Err(DecomposeError::NotDominated(u));
    }
    decompose_on(kappa, nu, &opens)
}

/// [`decompose_capacity`] without the precondition check, against a
/// precomputed list of opens.
pub(crate) fn decompose_on(
    kappa: &SimpleCapacity,
    nu: &SimpleValuation,
    opens: &[OpenSet],
) -> Result<Decomposition, DecomposeError> {
    let space = StrategySpace::new(kappa.terms().iter().map(|t| t.set).collect())?;
    let weights: Vec<Rational> = kappa.terms().iter().map(|t| t.weight.clone()).collect();
    let n = space.len();
    let mut lp = LinearProgram::new(n);
    lp.constrain(vec![Rational::one(); n], Relation::Eq, Rational::one())
        .expect("arity matches");
    for &u in opens {
        let row: Vec<Rational> = space
            .strategies
            .iter()
            .map(|f| {
                f.iter()
                    .zip(&weights)
                    .filter(|(y, _)| u.contains(**y))
                    .map(|(_, a)| a)
                    .sum()
            })
            .collect();
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        lp.constrain(row, Relation::Le, nu.eval(u)).expect("arity matches");
    }
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(DecomposeError::Internal(sol.status));
    }
    let beta = SimplexVector::new(sol.point).ok_or(DecomposeError::Internal(LpStatus::Optimal))?;
    let mixture = mixture(&space, &weights, &beta);
    Ok(Decomposition { space, beta, mixture })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::valuation::stochastic_leq;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn strategy_space_is_lexicographic() {
        let s = StrategySpace::new(vec![set(&[0, 2]), set(&[1, 3])]).unwrap();
        assert_eq!(s.strategies(), &[vec![0, 1], vec![0, 3], vec![2, 1], vec![2, 3]]);
        assert!(StrategySpace::new(vec![ElementSet::EMPTY]).is_err());
    }

    #[test]
    fn antichain_unanimity_splits_evenly() {
        let p = FinitePoset::antichain(2);
        let kappa = SimpleCapacity::unanimity(set(&[0, 1])).unwrap();
        let nu = SimpleValuation::from_weights([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        let d = decompose_capacity(&kappa, &nu, &p).unwrap();
        assert_eq!(d.beta.weights(), &[ratio(1, 2), ratio(1, 2)]);
        assert_eq!(d.mixture, nu);
        assert!(stochastic_leq(&d.mixture, &nu, &p).holds());
    }

    #[test]
    fn chain_picks_bottom() {
        let p = FinitePoset::chain(2);
        let kappa = SimpleCapacity::unanimity(set(&[0, 1])).unwrap();
        let nu = SimpleValuation::dirac(0);
        let d = decompose_capacity(&kappa, &nu, &p).unwrap();
        assert_eq!(d.beta.weights(), &[int(1), int(0)]);
        assert_eq!(d.mixture, nu);
    }

    #[test]
    fn singleton_choice_has_one_strategy() {
        let p = FinitePoset::antichain(3);
        let kappa = SimpleCapacity::new([(ratio(2, 3), set(&[1]))]).unwrap();
        let nu = SimpleValuation::from_weights([(1, int(1)), (2, int(1))]).unwrap();
        let d = decompose_capacity(&kappa, &nu, &p).unwrap();
        assert_eq!(d.space.len(), 1);
        assert_eq!(d.beta.weights(), &[int(1)]);
    }

    #[test]
    fn undominated_capacity_is_rejected() {
        let p = FinitePoset::antichain(2);
        let kappa = SimpleCapacity::unanimity(set(&[0])).unwrap();
        let nu = SimpleValuation::dirac(1);
        let err = decompose_capacity(&kappa, &nu, &p).unwrap_err();
        assert_eq!(err, DecomposeError::NotDominated(p.open(set(&[0])).unwrap()));
    }
}

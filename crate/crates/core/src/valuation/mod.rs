//! Simple valuations, simple capacities and the stochastic ordering.

mod choquet;
mod transport;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::order::{FinitePoset, OpenSet};
use crate::rational::{floor_scaled, Rational};
use crate::set::ElementSet;

pub use choquet::{choquet_integral, StepFunction};
pub use transport::stochastic_leq_transport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("negative weight {0}")]
    NegativeWeight(Rational),
    #[error("capacity term with empty set")]
    EmptyTerm,
    #[error("non-positive capacity weight {0}")]
    NonPositiveTermWeight(Rational),
    #[error("function is not monotone: value at `{low}` exceeds value at `{high}`")]
    NonMonotone { low: String, high: String },
    #[error("step function has {got} values, poset has {expected} elements")]
    Arity { expected: usize, got: usize },
    #[error("rounding denominator must be positive")]
    ZeroDenominator,
}

/// Anything that assigns a value to every subset of elements: valuations,
/// capacities, and the sums used in linear programs.
pub trait SetFunction {
    fn measure(&self, set: ElementSet) -> Rational;
}

/// `Σ a_x δ_x` with every stored `a_x > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SimpleValuation {
    weights: BTreeMap<usize, Rational>,
}

impl SimpleValuation {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(x: usize) -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(x, Rational::one());
        SimpleValuation { weights }
    }

    /// Zero weights are dropped, repeated elements accumulate.
    pub fn from_weights<I>(weights: I) -> Result<Self, ValuationError>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut out = SimpleValuation::zero();
        for (x, w) in weights {
            if w.is_negative() {
                return Err(ValuationError::NegativeWeight(w));
            }
            out.add_weight(x, w);
        }
        Ok(out)
    }

    fn add_weight(&mut self, x: usize, w: Rational) {
        if w.is_zero() {
            return;
        }
        let slot = self.weights.entry(x).or_insert_with(Rational::zero);
        *slot += w;
        if slot.is_zero() {
            self.weights.remove(&x);
        }
    }

    pub fn weight(&self, x: usize) -> Rational {
        self.weights.get(&x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn weights(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.weights.iter().map(|(&x, w)| (x, w))
    }

    pub fn support(&self) -> ElementSet {
        self.weights.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total mass `ν(X)`.
    pub fn mass(&self) -> Rational {
        self.weights.values().sum()
    }

    /// `ν(U) = Σ_{x∈U} a_x`.
    pub fn eval(&self, u: OpenSet) -> Rational {
        self.measure(u.members())
    }

    pub fn scaled(&self, c: &Rational) -> SimpleValuation {
        if c.is_zero() {
            return SimpleValuation::zero();
        }
        SimpleValuation {
            weights: self.weights.iter().map(|(&x, w)| (x, w * c)).collect(),
        }
    }

    /// Re-indexes elements through `map` (e.g. from a subposet into its
    /// ambient poset).
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> SimpleValuation {
        let mut out = SimpleValuation::zero();
        for (&x, w) in &self.weights {
            out.add_weight(map(x), w.clone());
        }
        out
    }

    /// Keeps only the weights on `keep`.
    pub fn restricted_to(&self, keep: ElementSet) -> SimpleValuation {
        SimpleValuation {
            weights: self
                .weights
                .iter()
                .filter(|(x, _)| keep.contains(**x))
                .map(|(&x, w)| (x, w.clone()))
                .collect(),
        }
    }

    /// Coefficientwise `⌊N·c_z⌋ / N`.
    pub fn rounded_down(&self, n: u64) -> Result<SimpleValuation, ValuationError> {
        if n == 0 {
            return Err(ValuationError::ZeroDenominator);
        }
        let den = BigInt::from(n);
        let weights = self
            .weights
            .iter()
            .map(|(&x, c)| (x, Rational::new(floor_scaled(c, n), den.clone())));
        SimpleValuation::from_weights(weights)
    }

    /// Renders as `1/2@a + 1/3@b` using element names (`0` for the zero
    /// valuation).
    pub fn display<'a>(&'a self, poset: &'a FinitePoset) -> impl fmt::Display + 'a {
        DisplayValuation { v: self, poset }
    }
}

impl SetFunction for SimpleValuation {
    fn measure(&self, set: ElementSet) -> Rational {
        self.weights
            .iter()
            .filter(|(x, _)| set.contains(**x))
            .map(|(_, w)| w)
            .sum()
    }
}

impl fmt::Debug for SimpleValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|(x, w)| format!("{w}@{x}")).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

struct DisplayValuation<'a> {
    v: &'a SimpleValuation,
    poset: &'a FinitePoset,
}

impl fmt::Display for DisplayValuation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .v
            .weights
            .iter()
            .map(|(&x, w)| format!("{w}@{}", self.poset.name(x)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add for &SimpleValuation {
    type Output = SimpleValuation;

    fn add(self, rhs: &SimpleValuation) -> SimpleValuation {
        let mut out = self.clone();
        for (&x, w) in &rhs.weights {
            out.add_weight(x, w.clone());
        }
        out
    }
}

impl Mul<&SimpleValuation> for &Rational {
    type Output = SimpleValuation;

    fn mul(self, rhs: &SimpleValuation) -> SimpleValuation {
        rhs.scaled(self)
    }
}

/// `Σ c_i ν_i` for non-negative coefficients.
pub fn scale_add<'a, I>(terms: I) -> Result<SimpleValuation, ValuationError>
where
    I: IntoIterator<Item = (Rational, &'a SimpleValuation)>,
{
    let mut out = SimpleValuation::zero();
    for (c, v) in terms {
        if c.is_negative() {
            return Err(ValuationError::NegativeWeight(c));
        }
        out = &out + &v.scaled(&c);
    }
    Ok(out)
}

/// `⌊N·c_z⌋/N` on every coefficient; the result is below the input.
pub fn round_valuation(v: &SimpleValuation, n: u64) -> Result<SimpleValuation, ValuationError> {
    v.rounded_down(n)
}

/// One term `a·u_B` of a simple capacity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CapacityTerm {
    pub weight: Rational,
    pub set: ElementSet,
}

/// `Σ a_x u_{B_x}`: a positive combination of unanimity games, where
/// `u_B(U) = 1` iff `B ⊆ U`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SimpleCapacity {
    terms: Vec<CapacityTerm>,
}

impl SimpleCapacity {
    pub fn new<I>(terms: I) -> Result<Self, ValuationError>
    where
        I: IntoIterator<Item = (Rational, ElementSet)>,
    {
        let mut out = Vec::new();
        for (weight, set) in terms {
            if set.is_empty() {
                return Err(ValuationError::EmptyTerm);
            }
            if !weight.is_positive() {
                return Err(ValuationError::NonPositiveTermWeight(weight));
            }
            out.push(CapacityTerm { weight, set });
        }
        Ok(SimpleCapacity { terms: out })
    }

    /// The unanimity game `u_B`.
    pub fn unanimity(set: ElementSet) -> Result<Self, ValuationError> {
        Self::new([(Rational::one(), set)])
    }

    pub fn terms(&self) -> &[CapacityTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, u: OpenSet) -> Rational {
        self.measure(u.members())
    }

    pub fn scaled(&self, c: &Rational) -> SimpleCapacity {
        if !c.is_positive() {
            return SimpleCapacity::default();
        }
        SimpleCapacity {
            terms: self
                .terms
                .iter()
                .map(|t| CapacityTerm {
                    weight: &t.weight * c,
                    set: t.set,
                })
                .collect(),
        }
    }

    /// Closed form of the Choquet integral of `h` against this capacity:
    /// `Σ a_x · min_{y∈B_x} h(y)`.
    pub fn min_formula(&self, h: &StepFunction) -> Rational {
        self.terms
            .iter()
            .map(|t| {
                let m = t.set.iter().map(|y| h.value(y)).min().expect("terms are non-empty");
                &t.weight * m
            })
            .sum()
    }

    pub fn display<'a>(&'a self, poset: &'a FinitePoset) -> impl fmt::Display + 'a {
        DisplayCapacity { c: self, poset }
    }
}

impl SetFunction for SimpleCapacity {
    fn measure(&self, set: ElementSet) -> Rational {
        self.terms
            .iter()
            .filter(|t| t.set.is_subset(set))
            .map(|t| &t.weight)
            .sum()
    }
}

struct DisplayCapacity<'a> {
    c: &'a SimpleCapacity,
    poset: &'a FinitePoset,
}

impl fmt::Display for DisplayCapacity<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .c
            .terms
            .iter()
            .map(|t| format!("{}@{}", t.weight, self.poset.format_set(t.set)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Mass constraint attached to a space of valuations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub enum Flavor {
    /// No constraint.
    #[default]
    Plain,
    /// Subprobability: mass at most 1.
    Sub,
    /// Probability: mass exactly 1.
    Prob,
}

impl Flavor {
    pub fn admits(self, mass: &Rational) -> bool {
        match self {
            Flavor::Plain => true,
            Flavor::Sub => *mass <= Rational::one(),
            Flavor::Prob => mass.is_one(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Flavor::Plain => "plain",
            Flavor::Sub => "sub",
            Flavor::Prob => "prob",
        }
    }

    pub fn parse(text: &str) -> Option<Flavor> {
        match text {
            "plain" => Some(Flavor::Plain),
            "sub" => Some(Flavor::Sub),
            "prob" => Some(Flavor::Prob),
            _ => None,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Result of comparing two set functions over all opens.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dominance {
    Holds,
    /// An open `U` with `μ(U) > ν(U)`.
    Violated(OpenSet),
}

impl Dominance {
    pub fn holds(self) -> bool {
        matches!(self, Dominance::Holds)
    }

    pub fn witness(self) -> Option<OpenSet> {
        match self {
            Dominance::Holds => None,
            Dominance::Violated(u) => Some(u),
        }
    }
}

/// `μ ≤ ν` in the stochastic ordering, decided on every open of `poset`.
pub fn stochastic_leq<M, N>(mu: &M, nu: &N, poset: &FinitePoset) -> Dominance
where
    M: SetFunction + ?Sized,
    N: SetFunction + ?Sized,
{
    stochastic_leq_on(mu, nu, &poset.enumerate_opens())
}

/// Same as [`stochastic_leq`] against a precomputed list of opens.
pub fn stochastic_leq_on<M, N>(mu: &M, nu: &N, opens: &[OpenSet]) -> Dominance
where
    M: SetFunction + ?Sized,
    N: SetFunction + ?Sized,
{
    opens
        .iter()
        .find(|u| mu.measure(u.members()) > nu.measure(u.members()))
        .map_or(Dominance::Holds, |&u| Dominance::Violated(u))
}

/// Way-below on the extended non-negative reals: `r ≪ s` iff `r = 0` or
/// `r < s`.
pub fn way_below(r: &Rational, s: &Rational) -> bool {
    r.is_zero() || r < s
}

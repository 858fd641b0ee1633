//! Weak-topology neighbourhoods of valuations and the finitary witness
//! construction.
//!
//! Given a simple valuation `ν` inside a basic weak open
//! `𝒰 = ⋂ [U_i > r_i]`, [`verify_sandwich`] builds a weak open `𝒱` and a
//! finite set `E` of simple valuations with `ν ∈ 𝒱 ⊆ ↑E ⊆ 𝒰`, and checks
//! every step of that sandwich exactly.

mod enumerate;
mod lifting;
mod witness;

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::lp::DecomposeError;
use crate::order::{FinitePoset, OpenSet};
use crate::rational::Rational;
use crate::valuation::{way_below, Flavor, SimpleValuation, ValuationError};

pub use enumerate::{enumerate_e, rounding_witness, EPoint, DEFAULT_NODE_CAP};
pub use lifting::{lift_minus, lift_plus, membership_transported, verify_sandwich_prob, PointedPoset};
pub use witness::{
    build_v, capacity_of, check_capacity_domination, choose_constants, choose_n, construct_cover, grid_valuations,
    verify_sandwich, Constants, Cover, LemmaReport, SandwichOptions, SandwichReport, WitnessBundle,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PowerdomainError {
    #[error("valuation is not in the weak open")]
    NotMember,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("poset has no least element")]
    NotPointed,
    #[error("valuation has mass {0}, expected 1")]
    NotProbability(Rational),
    #[error("valuation has mass {0}, expected at most 1")]
    NotSubprobability(Rational),
    #[error("construction postcondition failed: {0}")]
    TheoremViolation(String),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

/// How a subbasic open compares `μ(U)` with its threshold.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    /// `[U > r]`: `μ(U) > r`.
    StrictGt,
    /// `[r ≪ U]`: `r = 0` or `r < μ(U)`.
    WayBelow,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubbasicOpen {
    pub open: OpenSet,
    pub threshold: Rational,
    pub mode: Mode,
}

impl SubbasicOpen {
    pub fn greater(open: OpenSet, threshold: Rational) -> Self {
        SubbasicOpen {
            open,
            threshold,
            mode: Mode::StrictGt,
        }
    }

    pub fn way_below(threshold: Rational, open: OpenSet) -> Self {
        SubbasicOpen {
            open,
            threshold,
            mode: Mode::WayBelow,
        }
    }

    pub fn contains(&self, mu: &SimpleValuation) -> bool {
        let value = mu.eval(self.open);
        match self.mode {
            Mode::StrictGt => value > self.threshold,
            Mode::WayBelow => way_below(&self.threshold, &value),
        }
    }

    /// `[0 ≪ U]` contains every valuation.
    pub fn is_trivial(&self) -> bool {
        self.mode == Mode::WayBelow && self.threshold.is_zero()
    }
}

/// A finite intersection of subbasic opens inside the valuations of one
/// flavor.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WeakOpen {
    pub conjuncts: Vec<SubbasicOpen>,
    pub flavor: Flavor,
}

impl WeakOpen {
    pub fn new(conjuncts: Vec<SubbasicOpen>, flavor: Flavor) -> Self {
        WeakOpen { conjuncts, flavor }
    }

    pub fn contains(&self, mu: &SimpleValuation) -> bool {
        member_weak_open(mu, self)
    }

    /// The `(U_i, r_i)` pairs of a basic neighbourhood `⋂[U_i > r_i]`.
    ///
    /// `[r ≪ U]` with `r > 0` is `[U > r]`; `[0 ≪ U]` is everything and is
    /// dropped.
    pub fn thresholds(&self) -> Vec<(OpenSet, Rational)> {
        self.conjuncts
            .iter()
            .filter(|c| !c.is_trivial())
            .map(|c| (c.open, c.threshold.clone()))
            .collect()
    }

    pub fn display<'a>(&'a self, poset: &'a FinitePoset) -> impl fmt::Display + 'a {
        DisplayWeakOpen { w: self, poset }
    }
}

struct DisplayWeakOpen<'a> {
    w: &'a WeakOpen,
    poset: &'a FinitePoset,
}

impl fmt::Display for DisplayWeakOpen<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .w
            .conjuncts
            .iter()
            .map(|c| {
                let u = self.poset.format_set(c.open.members());
                match c.mode {
                    Mode::StrictGt => format!("[{u} > {}]", c.threshold),
                    Mode::WayBelow => format!("[{} << {u}]", c.threshold),
                }
            })
            .collect();
        write!(f, "{}_{}", parts.join(" & "), self.w.flavor)
    }
}

/// Conjunction of every conjunct, plus the flavor's mass constraint.
pub fn member_weak_open(mu: &SimpleValuation, w: &WeakOpen) -> bool {
    w.flavor.admits(&mu.mass()) && w.conjuncts.iter().all(|c| c.contains(mu))
}

/// A simple `ν' ≤ ν` inside `w`. Every valuation on a finite space is
/// simple, so this is `ν` itself once membership is confirmed.
pub fn reduce_to_simple(nu: &SimpleValuation, w: &WeakOpen) -> Result<SimpleValuation, PowerdomainError> {
    if !member_weak_open(nu, w) {
        return Err(PowerdomainError::NotMember);
    }
    Ok(nu.clone())
}

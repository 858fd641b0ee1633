//! Valuations on the one-point compactification `α(ℕ) = ℕ ∪ {∞}`.
//!
//! The open sets are the subsets of `ℕ` and the cofinite sets containing
//! `∞`; only finite and cofinite ones are represented. Valuations are
//! discrete with finite support in `ℕ` plus an atom at `∞`. The Scott-open
//! set `{a_∞ > 0}` contains `δ_∞` but no basic weak neighbourhood of it.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;
use crate::report::Report;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphaError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("negative weight {0}")]
    NegativeWeight(Rational),
}

/// A finite subset of `ℕ`, or the complement in `α(ℕ)` of one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AlphaOpen {
    Finite(BTreeSet<u64>),
    Cofinite(BTreeSet<u64>),
}

impl AlphaOpen {
    /// `V_n = {n, n+1, …, ∞}`.
    pub fn tail(n: u64) -> Self {
        AlphaOpen::Cofinite((0..n).collect())
    }

    pub fn everything() -> Self {
        AlphaOpen::Cofinite(BTreeSet::new())
    }

    pub fn empty() -> Self {
        AlphaOpen::Finite(BTreeSet::new())
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            AlphaOpen::Finite(f) => f.contains(&n),
            AlphaOpen::Cofinite(e) => !e.contains(&n),
        }
    }

    pub fn contains_infinity(&self) -> bool {
        matches!(self, AlphaOpen::Cofinite(_))
    }

    pub fn union(&self, other: &AlphaOpen) -> AlphaOpen {
        use AlphaOpen::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a | b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a & b),
            (Finite(f), Cofinite(e)) | (Cofinite(e), Finite(f)) => Cofinite(e - f),
        }
    }

    pub fn intersection(&self, other: &AlphaOpen) -> AlphaOpen {
        use AlphaOpen::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a & b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a | b),
            (Finite(f), Cofinite(e)) | (Cofinite(e), Finite(f)) => Finite(f - e),
        }
    }
}

/// `Σ_n a_n δ_n + a_∞ δ_∞` with finitely many `a_n > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct DiscreteValuation {
    weights: BTreeMap<u64, Rational>,
    infinity: Rational,
}

impl DiscreteValuation {
    pub fn new<I>(weights: I, infinity: Rational) -> Result<Self, AlphaError>
    where
        I: IntoIterator<Item = (u64, Rational)>,
    {
        if infinity.is_negative() {
            return Err(AlphaError::NegativeWeight(infinity));
        }
        let mut out = BTreeMap::new();
        for (n, w) in weights {
            if w.is_negative() {
                return Err(AlphaError::NegativeWeight(w));
            }
            let slot: &mut Rational = out.entry(n).or_insert_with(Rational::zero);
            *slot += w;
        }
        out.retain(|_, w| !w.is_zero());
        Ok(DiscreteValuation { weights: out, infinity })
    }

    pub fn dirac(n: u64) -> Self {
        DiscreteValuation {
            weights: BTreeMap::from([(n, Rational::one())]),
            infinity: Rational::zero(),
        }
    }

    pub fn dirac_infinity() -> Self {
        DiscreteValuation {
            weights: BTreeMap::new(),
            infinity: Rational::one(),
        }
    }

    pub fn weight(&self, n: u64) -> Rational {
        self.weights.get(&n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn weights(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.weights.iter().map(|(&n, w)| (n, w))
    }

    /// `a_∞`.
    pub fn at_infinity(&self) -> &Rational {
        &self.infinity
    }

    pub fn mass(&self) -> Rational {
        self.weights.values().sum::<Rational>() + &self.infinity
    }

    /// Largest natural carrying weight.
    pub fn max_support(&self) -> Option<u64> {
        self.weights.keys().next_back().copied()
    }

    /// `Σ_{x∈U} a_x`, counting `a_∞` when `U` is cofinite.
    pub fn eval(&self, u: &AlphaOpen) -> Rational {
        let finite: Rational = self.weights().filter(|(n, _)| u.contains(*n)).map(|(_, w)| w).sum();
        if u.contains_infinity() {
            finite + &self.infinity
        } else {
            finite
        }
    }

    pub fn display(&self) -> String {
        let mut parts: Vec<String> = self.weights().map(|(n, w)| format!("{w}@{n}")).collect();
        if !self.infinity.is_zero() {
            parts.push(format!("{}@inf", self.infinity));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// `eval_alpha`.
pub fn eval_alpha(nu: &DiscreteValuation, u: &AlphaOpen) -> Rational {
    nu.eval(u)
}

/// Coefficientwise comparison, including the `∞` coordinate.
pub fn leq_discrete(nu: &DiscreteValuation, mu: &DiscreteValuation) -> bool {
    nu.weights().all(|(n, w)| *w <= mu.weight(n)) && nu.infinity <= mu.infinity
}

/// An open set with `ν(U) > μ(U)` whenever `ν ≰ μ` coefficientwise.
pub fn separating_open(nu: &DiscreteValuation, mu: &DiscreteValuation) -> Option<AlphaOpen> {
    if let Some((n, _)) = nu.weights().find(|(n, w)| **w > mu.weight(*n)) {
        return Some(AlphaOpen::Finite(BTreeSet::from([n])));
    }
    if nu.infinity > mu.infinity {
        let past = nu.max_support().max(mu.max_support()).map_or(0, |m| m + 1);
        return Some(AlphaOpen::tail(past));
    }
    None
}

/// `inf_n ν(V_n)`, attained at any `n` past the support.
pub fn tail_mass(nu: &DiscreteValuation) -> Rational {
    let last = nu.max_support().map_or(0, |m| m + 1);
    (0..=last)
        .map(|n| nu.eval(&AlphaOpen::tail(n)))
        .min()
        .expect("non-empty range")
}

/// Membership in the Scott-open set `{a_∞ > 0}`.
pub fn scott_v_member(nu: &DiscreteValuation) -> bool {
    nu.infinity.is_positive()
}

/// A point `δ_n` inside `⋂_i [α(ℕ)∖E_i > r_i]` but outside `{a_∞ > 0}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Counterexample {
    pub n: u64,
    pub witness: DiscreteValuation,
    /// `δ_∞` lies in every conjunct.
    pub infinity_inside: bool,
    /// `δ_n` lies in every conjunct.
    pub witness_inside: bool,
    pub infinity_in_scott_open: bool,
    pub witness_in_scott_open: bool,
}

impl Counterexample {
    /// The neighbourhood contains `δ_∞` and `δ_n`, and only `δ_∞` is in
    /// `{a_∞ > 0}`.
    pub fn separates(&self) -> bool {
        self.infinity_inside && self.witness_inside && self.infinity_in_scott_open && !self.witness_in_scott_open
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new();
        r.push("n", self.n);
        r.push("witness", self.witness.display());
        r.push("a_inf", self.witness.at_infinity());
        r.push("check.delta_inf_in_W", self.infinity_inside);
        r.push("check.delta_n_in_W", self.witness_inside);
        r.push("check.delta_inf_in_scott", self.infinity_in_scott_open);
        r.push("check.delta_n_in_scott", self.witness_in_scott_open);
        r.push("check.separated", self.separates());
        r
    }
}

/// Takes the least `n` outside every `E_i` and checks `δ_n` against the
/// neighbourhood `⋂_i [α(ℕ)∖E_i > r_i]` of `δ_∞`.
pub fn counterexample_witness(conjuncts: &[(BTreeSet<u64>, Rational)]) -> Result<Counterexample, AlphaError> {
    for (_, r) in conjuncts {
        if !r.is_positive() || *r >= Rational::one() {
            return Err(AlphaError::Precondition(format!("threshold {r} is not in (0,1)")));
        }
    }
    let used: BTreeSet<u64> = conjuncts.iter().flat_map(|(e, _)| e.iter().copied()).collect();
    let n = (0..).find(|k| !used.contains(k)).expect("finite union");
    let witness = DiscreteValuation::dirac(n);
    let infinity = DiscreteValuation::dirac_infinity();
    let inside = |v: &DiscreteValuation| {
        conjuncts
            .iter()
            .all(|(e, r)| v.eval(&AlphaOpen::Cofinite(e.clone())) > *r)
    };
    Ok(Counterexample {
        n,
        infinity_inside: inside(&infinity),
        witness_inside: inside(&witness),
        infinity_in_scott_open: scott_v_member(&infinity),
        witness_in_scott_open: scott_v_member(&witness),
        witness,
    })
}

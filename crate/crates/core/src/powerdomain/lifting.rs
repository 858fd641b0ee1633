//! Probability valuations on a pointed poset versus subprobability
//! valuations on the poset with its bottom removed.
//!
//! `ν⁻` forgets the mass at `⊥`; `μ⁺` puts the missing mass `1 − μ(X∖{⊥})`
//! back at `⊥`. Every open set other than `X` avoids `⊥`, so the two maps
//! carry `[U > r]₁` onto `[U > r]≤1` for proper `U`.

use num_traits::One;

use super::witness::{grid_valuations, SandwichOptions, SandwichReport, WitnessBundle};
use super::{member_weak_open, Mode, PowerdomainError, SubbasicOpen, WeakOpen};
use crate::order::{FinitePoset, OpenSet};
use crate::rational::Rational;
use crate::set::ElementSet;
use crate::valuation::{stochastic_leq_on, Flavor, SimpleValuation};

/// A poset with a designated least element, plus the induced poset on the
/// remaining elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointedPoset {
    poset: FinitePoset,
    bottom: usize,
    rest: FinitePoset,
    /// `embed[i]` is the index in `poset` of element `i` of `rest`.
    embed: Vec<usize>,
}

impl PointedPoset {
    pub fn new(poset: FinitePoset, bottom: usize) -> Result<Self, PowerdomainError> {
        if bottom >= poset.size() || poset.up_of(bottom) != poset.all() {
            return Err(PowerdomainError::NotPointed);
        }
        let (rest, embed) = poset.restrict(poset.all().difference(ElementSet::singleton(bottom)));
        Ok(PointedPoset {
            poset,
            bottom,
            rest,
            embed,
        })
    }

    /// Uses the least element of `poset`.
    pub fn find(poset: &FinitePoset) -> Result<Self, PowerdomainError> {
        let bottom = (0..poset.size())
            .find(|&x| poset.up_of(x) == poset.all())
            .ok_or(PowerdomainError::NotPointed)?;
        PointedPoset::new(poset.clone(), bottom)
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    /// `P ∖ ↓⊥ = P ∖ {⊥}`.
    pub fn rest(&self) -> &FinitePoset {
        &self.rest
    }

    pub fn embed(&self) -> &[usize] {
        &self.embed
    }

    /// Re-indexes a subset of `P ∖ {⊥}` into `rest`.
    pub fn to_rest(&self, s: ElementSet) -> ElementSet {
        (0..self.embed.len()).filter(|&i| s.contains(self.embed[i])).collect()
    }

    pub fn from_rest(&self, s: ElementSet) -> ElementSet {
        s.iter().map(|i| self.embed[i]).collect()
    }
}

/// `ν⁻`: the restriction of a probability valuation to `P ∖ {⊥}`.
pub fn lift_minus(nu: &SimpleValuation, pp: &PointedPoset) -> Result<SimpleValuation, PowerdomainError> {
    let mass = nu.mass();
    if !mass.is_one() {
        return Err(PowerdomainError::NotProbability(mass));
    }
    let rest = nu.restricted_to(pp.poset.all().difference(ElementSet::singleton(pp.bottom)));
    let back: Vec<usize> = {
        let mut pos = vec![usize::MAX; pp.poset.size()];
        for (i, &x) in pp.embed.iter().enumerate() {
            pos[x] = i;
        }
        pos
    };
    Ok(rest.remap(|x| back[x]))
}

/// `μ⁺ = μ + (1 − μ(X))·δ_⊥`, moved back into `P`.
pub fn lift_plus(mu: &SimpleValuation, pp: &PointedPoset) -> Result<SimpleValuation, PowerdomainError> {
    let mass = mu.mass();
    if mass > Rational::one() {
        return Err(PowerdomainError::NotSubprobability(mass));
    }
    if !mu.support().is_subset(pp.rest.all()) {
        return Err(PowerdomainError::Precondition("valuation support outside P∖{⊥}".into()));
    }
    let moved = mu.remap(|i| pp.embed[i]);
    let missing = SimpleValuation::from_weights([(pp.bottom, Rational::one() - mass)])?;
    Ok(&moved + &missing)
}

/// Rewrites a probability-flavored weak open on `P` as a
/// subprobability-flavored one on `P ∖ {⊥}`. Conjuncts on `X` itself hold
/// for every probability valuation once their threshold is below 1 and are
/// dropped.
fn translate(pp: &PointedPoset, u: &WeakOpen) -> Result<WeakOpen, PowerdomainError> {
    let mut conjuncts = Vec::new();
    for c in u.conjuncts.iter().filter(|c| !c.is_trivial()) {
        if c.open == pp.poset.whole() {
            if c.threshold >= Rational::one() {
                return Err(PowerdomainError::Precondition(format!(
                    "no probability valuation has mass above {}",
                    c.threshold
                )));
            }
            continue;
        }
        let open = pp
            .rest
            .open(pp.to_rest(c.open.members()))
            .expect("proper opens avoid ⊥ and stay open");
        conjuncts.push(match c.mode {
            Mode::StrictGt => SubbasicOpen::greater(open, c.threshold.clone()),
            Mode::WayBelow => SubbasicOpen::way_below(c.threshold.clone(), open),
        });
    }
    Ok(WeakOpen::new(conjuncts, Flavor::Sub))
}

/// The probability-flavored sandwich: builds `𝒱⁻` and `E⁻` for `ν⁻` on
/// `P ∖ {⊥}`, then checks `ν ∈ 𝒱`, `E = (E⁻)⁺ ⊆ 𝒰` and the grid inclusion
/// `𝒱 ⊆ ↑E` on `P`, where `𝒱 = {μ | μ⁻ ∈ 𝒱⁻}`.
pub fn verify_sandwich_prob(
    pp: &PointedPoset,
    nu: &SimpleValuation,
    u: &WeakOpen,
    opts: &SandwichOptions,
) -> Result<(WitnessBundle, SandwichReport), PowerdomainError> {
    if opts.grid == 0 {
        return Err(PowerdomainError::Precondition("grid must be positive".into()));
    }
    let prob_u = WeakOpen::new(u.conjuncts.clone(), Flavor::Prob);
    if !nu.support().is_subset(pp.poset.all()) || !member_weak_open(nu, &prob_u) {
        return Err(PowerdomainError::Precondition(
            "valuation is not in the weak open".into(),
        ));
    }
    let sub_u = translate(pp, &prob_u)?;
    let nu_minus = lift_minus(nu, pp)?;
    let mut bundle = WitnessBundle::build(&pp.rest, &nu_minus, &sub_u, opts)?;
    bundle.lifted = Some(pp.clone());
    let rest_opens = pp.rest.enumerate_opens();
    let mut report = bundle.check(&sub_u, &rest_opens);
    for point in &bundle.e {
        let lifted = lift_plus(&point.valuation, pp)?;
        if !member_weak_open(&lifted, &prob_u) {
            report.e_in_u = false;
            report
                .failures
                .push(format!("lifted E member {} is not in 𝒰", lifted.display(&pp.poset)));
        }
    }
    if opts.check_grid {
        let opens = pp.poset.enumerate_opens();
        let members = bundle.e_members();
        for mu in grid_valuations(pp.poset.size(), opts.grid, opts.grid, true) {
            report.grid_points += 1;
            let mu_minus = lift_minus(&mu, pp)?;
            match bundle.cover_point(&mu_minus, &rest_opens, &members) {
                Ok(None) => {}
                Ok(Some(e)) => {
                    report.grid_members += 1;
                    let lifted = lift_plus(&e, pp)?;
                    if !stochastic_leq_on(&lifted, &mu, &opens).holds() {
                        report.grid_covered = false;
                        report.failures.push(format!(
                            "{} is not below {}",
                            lifted.display(&pp.poset),
                            mu.display(&pp.poset)
                        ));
                    }
                }
                Err(msg) => {
                    report.grid_members += 1;
                    report.grid_covered = false;
                    if msg.starts_with("κ exceeds") {
                        report.v_in_q = false;
                    }
                    report.failures.push(msg);
                }
            }
        }
    }
    Ok((bundle, report))
}

/// `ν ∈ [U > r]₁ ⟺ ν⁻ ∈ [U∖{⊥} > r]≤1` for proper `U`.
pub fn membership_transported(pp: &PointedPoset, nu: &SimpleValuation, u: OpenSet, r: &Rational) -> bool {
    let minus = match lift_minus(nu, pp) {
        Ok(m) => m,
        Err(_) => return false,
    };
    let rest_open = match pp.rest.open(pp.to_rest(u.members())) {
        Some(o) => o,
        None => return false,
    };
    (nu.eval(u) > *r) == (minus.eval(rest_open) > *r)
}

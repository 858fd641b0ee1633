//! Seeded random instances for the property suites.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

use crate::alpha::{AlphaOpen, DiscreteValuation};
use crate::lp::{mixture, GameMatrix, SimplexVector, StrategySpace};
use crate::order::{default_names, FinitePoset, OpenSet};
use crate::powerdomain::{PointedPoset, SubbasicOpen, WeakOpen};
use crate::rational::Rational;
use crate::set::ElementSet;
use crate::valuation::{Flavor, SimpleCapacity, SimpleValuation, StepFunction};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rational(rng: &mut Rng64, num: std::ops::RangeInclusive<i64>, max_den: i64) -> Rational {
    let p = rng.gen_range(num);
    let q = rng.gen_range(1..=max_den);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// A random partial order on `n` elements: each pair `i < j` is related with
/// probability `density`, then the relation is closed transitively.
pub fn poset(rng: &mut Rng64, n: usize, density: f64) -> FinitePoset {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                pairs.push((perm[i], perm[j]));
            }
        }
    }
    FinitePoset::from_relation(default_names(n), &pairs).expect("relation follows a linear order")
}

/// A random poset on `n - 1` elements with a fresh least element `bot`
/// inserted at a random index.
pub fn pointed_poset(rng: &mut Rng64, n: usize, density: f64) -> PointedPoset {
    assert!(n >= 1);
    let base = poset(rng, n - 1, density);
    let bottom = rng.gen_range(0..n);
    let old = |x: usize| if x < bottom { x } else { x + 1 };
    let mut names = default_names(n);
    names[bottom] = "bot".into();
    let mut pairs: Vec<(usize, usize)> = base.covers().into_iter().map(|(x, y)| (old(x), old(y))).collect();
    pairs.extend((0..n).filter(|&x| x != bottom).map(|x| (bottom, x)));
    let p = FinitePoset::from_relation(names, &pairs).expect("bottom below a partial order");
    PointedPoset::new(p, bottom).expect("bottom is least")
}

/// A uniformly chosen non-empty subset of `within` with at most `max_len`
/// members.
pub fn subset(rng: &mut Rng64, within: ElementSet, max_len: usize) -> ElementSet {
    let mut members: Vec<usize> = within.iter().collect();
    members.shuffle(rng);
    let k = rng.gen_range(1..=max_len.min(members.len()).max(1));
    members.into_iter().take(k).collect()
}

/// Weights `k/den` with `k ∈ 1..=max_units`, on a random support of at most
/// `max_support` points.
pub fn valuation(rng: &mut Rng64, n: usize, max_support: usize, den: i64, max_units: i64) -> SimpleValuation {
    if n == 0 {
        return SimpleValuation::zero();
    }
    let support = subset(rng, ElementSet::full(n), max_support);
    SimpleValuation::from_weights(support.iter().map(|x| {
        (
            x,
            Rational::new(BigInt::from(rng.gen_range(1..=max_units)), BigInt::from(den)),
        )
    }))
    .expect("positive weights")
}

/// A random valuation scaled down to mass at most 1, or exactly 1 when
/// `exact`.
pub fn normalized_valuation(rng: &mut Rng64, n: usize, max_support: usize, den: i64, exact: bool) -> SimpleValuation {
    let v = valuation(rng, n, max_support, den, den);
    let mass = v.mass();
    if exact || mass > Rational::from_integer(BigInt::from(1)) {
        v.scaled(&mass.recip())
    } else {
        v
    }
}

/// A monotone step function: random values pushed up along the order.
pub fn step_function(rng: &mut Rng64, poset: &FinitePoset) -> StepFunction {
    let raw: Vec<Rational> = (0..poset.size()).map(|_| rational(rng, 0..=6, 3)).collect();
    let values = (0..poset.size())
        .map(|x| poset.down_of(x).iter().map(|y| raw[y].clone()).max().expect("x ≤ x"))
        .collect();
    StepFunction::new(values).expect("non-negative")
}

pub fn capacity(rng: &mut Rng64, poset: &FinitePoset, max_terms: usize, max_set: usize) -> SimpleCapacity {
    let k = rng.gen_range(1..=max_terms);
    SimpleCapacity::new((0..k).map(|_| (rational(rng, 1..=4, 4), subset(rng, poset.all(), max_set))))
        .expect("positive weights, non-empty sets")
}

pub fn open_set(rng: &mut Rng64, poset: &FinitePoset) -> OpenSet {
    let opens = poset.enumerate_opens();
    *opens.choose(rng).expect("∅ is open")
}

pub fn matrix(rng: &mut Rng64, max_dim: usize) -> GameMatrix {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    GameMatrix::new(
        (0..rows)
            .map(|_| (0..cols).map(|_| rational(rng, -9..=9, 5)).collect())
            .collect(),
    )
    .expect("rectangular")
}

/// `(κ, ν)` with `κ ≤ ν` by construction: `ν` is a strategy mixture for `κ`
/// plus random extra mass.
pub struct DecomposeInstance {
    pub poset: FinitePoset,
    pub kappa: SimpleCapacity,
    pub nu: SimpleValuation,
}

pub fn decompose_instance(rng: &mut Rng64, max_n: usize) -> DecomposeInstance {
    let n = rng.gen_range(1..=max_n);
    let poset = poset(rng, n, 0.35);
    let terms = rng.gen_range(1..=3);
    let kappa = SimpleCapacity::new((0..terms).map(|_| (rational(rng, 1..=4, 4), subset(rng, poset.all(), 3))))
        .expect("valid terms");
    let space = StrategySpace::new(kappa.terms().iter().map(|t| t.set).collect()).expect("small space");
    let weights: Vec<Rational> = kappa.terms().iter().map(|t| t.weight.clone()).collect();
    let raw: Vec<i64> = (0..space.len())
        .map(|_| if rng.gen_bool(0.5) { rng.gen_range(0..=3) } else { 0 })
        .collect();
    let total: i64 = raw.iter().sum();
    let beta = if total == 0 {
        SimplexVector::vertex(space.len(), rng.gen_range(0..space.len()))
    } else {
        SimplexVector::new(
            raw.iter()
                .map(|&k| Rational::new(BigInt::from(k), BigInt::from(total)))
                .collect(),
        )
        .expect("normalized")
    };
    let base = mixture(&space, &weights, &beta);
    let extra = if rng.gen_bool(0.5) {
        valuation(rng, n, 2, 8, 3)
    } else {
        SimpleValuation::zero()
    };
    DecomposeInstance {
        poset,
        kappa,
        nu: &base + &extra,
    }
}

/// A weak neighbourhood `⋂ [U_i > r_i]` of `ν` with `r_i = ν(U_i)·k/8`,
/// `k ∈ 1..=4`, over opens with `ν(U_i) > 0`.
pub fn neighbourhood(
    rng: &mut Rng64,
    poset: &FinitePoset,
    nu: &SimpleValuation,
    max_conjuncts: usize,
    flavor: Flavor,
) -> WeakOpen {
    let candidates: Vec<OpenSet> = poset
        .enumerate_opens()
        .into_iter()
        .filter(|&u| nu.eval(u) > Rational::from_integer(BigInt::from(0)))
        .collect();
    let k = rng.gen_range(0..=max_conjuncts);
    let mut conjuncts = Vec::new();
    for _ in 0..k {
        let Some(&u) = candidates.choose(rng) else { break };
        let r = nu.eval(u) * Rational::new(BigInt::from(rng.gen_range(1..=4)), BigInt::from(8));
        conjuncts.push(if rng.gen_bool(0.25) {
            SubbasicOpen::way_below(r, u)
        } else {
            SubbasicOpen::greater(u, r)
        });
    }
    WeakOpen::new(conjuncts, flavor)
}

pub struct SandwichInstance {
    pub poset: FinitePoset,
    pub nu: SimpleValuation,
    pub u: WeakOpen,
}

/// Posets with at most `max_n` elements, `|A| ≤ 3` and at most two
/// conjuncts. Plain instances may carry mass up to `3/2`.
pub fn sandwich_instance(rng: &mut Rng64, max_n: usize, flavor: Flavor) -> SandwichInstance {
    let n = rng.gen_range(1..=max_n);
    let (poset, nu) = match flavor {
        Flavor::Prob => {
            let pp = pointed_poset(rng, n, 0.35);
            let nu = normalized_valuation(rng, n, 3, 4, true);
            (pp.poset().clone(), nu)
        }
        Flavor::Sub => {
            let p = poset(rng, n, 0.35);
            let nu = normalized_valuation(rng, n, 3, 4, false);
            (p, nu)
        }
        Flavor::Plain => {
            let p = poset(rng, n, 0.35);
            let nu = valuation(rng, n, 3, 4, 2);
            (p, nu)
        }
    };
    let u = neighbourhood(rng, &poset, &nu, 2, flavor);
    SandwichInstance { poset, nu, u }
}

pub fn nat_set(rng: &mut Rng64, max_len: usize, below: u64) -> BTreeSet<u64> {
    let k = rng.gen_range(0..=max_len);
    (0..k).map(|_| rng.gen_range(0..below)).collect()
}

/// A basic weak neighbourhood `⋂ [α(ℕ)∖E_i > r_i]` of `δ_∞`.
pub fn alpha_neighbourhood(rng: &mut Rng64) -> Vec<(BTreeSet<u64>, Rational)> {
    let k = rng.gen_range(1..=4);
    (0..k)
        .map(|_| {
            let den = rng.gen_range(2..=12);
            let num = rng.gen_range(1..den);
            (nat_set(rng, 8, 16), Rational::new(BigInt::from(num), BigInt::from(den)))
        })
        .collect()
}

pub fn alpha_open(rng: &mut Rng64) -> AlphaOpen {
    let s = nat_set(rng, 6, 12);
    if rng.gen_bool(0.5) {
        AlphaOpen::Finite(s)
    } else {
        AlphaOpen::Cofinite(s)
    }
}

pub fn discrete_valuation(rng: &mut Rng64) -> DiscreteValuation {
    let k = rng.gen_range(0..=4);
    let weights: Vec<(u64, Rational)> = (0..k)
        .map(|_| (rng.gen_range(0..10), rational(rng, 1..=3, 4)))
        .collect();
    let inf = if rng.gen_bool(0.6) {
        rational(rng, 0..=3, 4)
    } else {
        Rational::from_integer(BigInt::from(0))
    };
    DiscreteValuation::new(weights, inf).expect("non-negative")
}

/// A perturbation of `nu` that is often, but not always, above it.
pub fn discrete_neighbour(rng: &mut Rng64, nu: &DiscreteValuation) -> DiscreteValuation {
    let bump = discrete_valuation(rng);
    let mut weights: Vec<(u64, Rational)> = nu.weights().map(|(n, w)| (n, w.clone())).collect();
    weights.extend(bump.weights().map(|(n, w)| (n, w.clone())));
    let mut inf = nu.at_infinity() + bump.at_infinity();
    if rng.gen_bool(0.3) && !weights.is_empty() {
        let i = rng.gen_range(0..weights.len());
        weights.remove(i);
    }
    if rng.gen_bool(0.2) {
        inf = Rational::from_integer(BigInt::from(0));
    }
    DiscreteValuation::new(weights, inf).expect("non-negative")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = poset(&mut rng(7), 6, 0.4);
        let b = poset(&mut rng(7), 6, 0.4);
        assert_eq!(a, b);
        let pp = pointed_poset(&mut rng(3), 5, 0.3);
        assert_eq!(pp.poset().name(pp.bottom()), "bot");
    }

    #[test]
    fn decompose_instances_are_dominated() {
        let mut r = rng(11);
        for _ in 0..20 {
            let inst = decompose_instance(&mut r, 6);
            assert!(crate::valuation::stochastic_leq(&inst.kappa, &inst.nu, &inst.poset).holds());
        }
    }

    #[test]
    fn sandwich_instances_are_members() {
        let mut r = rng(5);
        for flavor in [Flavor::Plain, Flavor::Sub, Flavor::Prob] {
            for _ in 0..20 {
                let inst = sandwich_instance(&mut r, 5, flavor);
                assert!(inst.u.contains(&inst.nu), "{flavor}");
            }
        }
    }
}

//! Algebraic laws checked on seeded random instances.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;

use powerval::alpha::{eval_alpha, leq_discrete, separating_open, tail_mass, AlphaOpen};
use powerval::gen;
use powerval::lp::{
    decompose_capacity, matrix_game, max_min_value, min_max_value, mixture, SimplexVector, StrategySpace,
};
use powerval::order::FinitePoset;
use powerval::powerdomain::{enumerate_e, lift_minus, lift_plus, membership_transported, rounding_witness};
use powerval::rational::Rational;
use powerval::set::ElementSet;
use powerval::valuation::{
    choquet_integral, round_valuation, stochastic_leq, stochastic_leq_transport, SimpleCapacity, SimpleValuation,
};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn upper_sets_by_brute_force(p: &FinitePoset) -> Vec<ElementSet> {
    p.all()
        .subsets()
        .filter(|&s| s.iter().all(|x| (0..p.size()).all(|y| !p.leq(x, y) || s.contains(y))))
        .collect()
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(config(96))]

    #[test]
    fn interior_is_a_kernel_operator(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let s = gen::subset(&mut rng, p.all(), n);
        let t = gen::subset(&mut rng, p.all(), n);
        let i = p.interior(s);
        prop_assert!(i.members().is_subset(s));
        prop_assert!(p.is_upward_closed(i.members()));
        prop_assert_eq!(p.interior(i.members()), i);
        prop_assert_eq!(p.interior(s.intersection(t)), i.intersection(p.interior(t)));
        let c = p.upward_closure(s);
        prop_assert!(s.is_subset(c));
        prop_assert_eq!(p.upward_closure(c), c);
    }

    #[test]
    fn opens_form_the_upper_set_topology(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let opens = p.enumerate_opens();
        let mut got: Vec<ElementSet> = opens.iter().map(|o| o.members()).collect();
        let mut want = upper_sets_by_brute_force(&p);
        got.sort();
        want.sort();
        prop_assert_eq!(got, want);
        for a in &opens {
            prop_assert!(p.is_scott_open_by_definition(a.members()));
            for b in &opens {
                prop_assert!(opens.contains(&a.union(*b)));
                prop_assert!(opens.contains(&a.intersection(*b)));
            }
        }
    }

    #[test]
    fn finite_posets_are_sober(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let s = p.is_sober();
        prop_assert!(s.sober);
        let points: BTreeSet<usize> = s.generic_points.iter().filter_map(|(_, x)| *x).collect();
        prop_assert_eq!(points.len(), s.generic_points.len());
        prop_assert_eq!(s.generic_points.len(), n);
    }

    #[test]
    fn opens_are_generated_by_their_minimal_elements(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let u = gen::open_set(&mut rng, &p);
        prop_assert_eq!(p.upward_closure(p.minimal_elements(u.members())), u.members());
        for x in u.members().iter() {
            let e = p.finitary_basis_at(x, u).unwrap();
            let up = p.upward_closure(e);
            prop_assert!(p.interior(up).contains(x));
            prop_assert!(up.is_subset(u.members()));
        }
    }

    #[test]
    fn valuations_are_strict_monotone_modular(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let nu = gen::valuation(&mut rng, n, 4, 6, 3);
        let kappa = gen::capacity(&mut rng, &p, 3, 3);
        let empty = p.interior(ElementSet::EMPTY);
        prop_assert!(nu.eval(empty).is_zero());
        prop_assert!(kappa.eval(empty).is_zero());
        let opens = p.enumerate_opens();
        for &u in &opens {
            for &v in &opens {
                prop_assert_eq!(nu.eval(u.union(v)) + nu.eval(u.intersection(v)), nu.eval(u) + nu.eval(v));
                if u.members().is_subset(v.members()) {
                    prop_assert!(nu.eval(u) <= nu.eval(v));
                    prop_assert!(kappa.eval(u) <= kappa.eval(v));
                }
            }
        }
    }

    #[test]
    fn choquet_is_linear_for_valuations(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let nu = gen::valuation(&mut rng, n, 4, 6, 3);
        let h = gen::step_function(&mut rng, &p);
        let k = gen::step_function(&mut rng, &p);
        let direct: Rational = nu.weights().map(|(x, a)| a * h.value(x)).sum();
        let ih = choquet_integral(&h, &nu, &p).unwrap();
        prop_assert_eq!(&ih, &direct);
        let ik = choquet_integral(&k, &nu, &p).unwrap();
        prop_assert_eq!(choquet_integral(&h.sum(&k), &nu, &p).unwrap(), &ih + &ik);
        let c = rat(5, 3);
        prop_assert_eq!(choquet_integral(&h.scaled(&c), &nu, &p).unwrap(), &c * &ih);
    }

    #[test]
    fn choquet_of_capacity_is_the_min_formula(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let kappa = gen::capacity(&mut rng, &p, 3, 3);
        let h = gen::step_function(&mut rng, &p);
        let value = choquet_integral(&h, &kappa, &p).unwrap();
        let by_terms: Rational = kappa
            .terms()
            .iter()
            .map(|t| &t.weight * t.set.iter().map(|y| h.value(y).clone()).min().unwrap())
            .sum();
        prop_assert_eq!(&value, &kappa.min_formula(&h));
        prop_assert_eq!(value, by_terms);
    }

    #[test]
    fn transport_agrees_with_all_opens(seed in any::<u64>(), n in 1usize..=7) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let mu = gen::valuation(&mut rng, n, 3, 4, 3);
        let nu = if rng.gen_bool(0.5) { &mu + &gen::valuation(&mut rng, n, 2, 4, 2) } else { gen::valuation(&mut rng, n, 3, 4, 3) };
        prop_assert_eq!(stochastic_leq(&mu, &nu, &p).holds(), stochastic_leq_transport(&mu, &nu, &p));
        prop_assert!(stochastic_leq(&SimpleValuation::zero(), &mu, &p).holds());
        prop_assert!(stochastic_leq_transport(&SimpleValuation::zero(), &mu, &p));
    }

    #[test]
    fn rounding_loses_at_most_support_over_n(seed in any::<u64>(), n in 1usize..=6, den in 1u64..=12) {
        let mut rng = gen::rng(seed);
        let p = gen::poset(&mut rng, n, 0.4);
        let nu = gen::valuation(&mut rng, n, 4, 7, 3);
        let r = round_valuation(&nu, den).unwrap();
        prop_assert!(stochastic_leq(&r, &nu, &p).holds());
        let bound = Rational::new(BigInt::from(nu.support().len()), BigInt::from(den));
        for u in p.enumerate_opens() {
            prop_assert!(nu.eval(u) - r.eval(u) <= bound);
        }
        for (_, w) in r.weights() {
            prop_assert!((w * Rational::from_integer(BigInt::from(den))).is_integer());
        }
    }

    #[test]
    fn max_min_equals_min_max(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let m = gen::matrix(&mut rng, 5);
        let (lower, _) = max_min_value(&m).unwrap();
        let (upper, _) = min_max_value(&m).unwrap();
        prop_assert_eq!(&lower, &upper);
        let sol = matrix_game(&m).unwrap();
        prop_assert!(sol.verify(&m));
        prop_assert_eq!(sol.value, lower);
    }

    #[test]
    fn decomposition_survives_scaling(seed in any::<u64>(), k in 1i64..=5) {
        let mut rng = gen::rng(seed);
        let inst = gen::decompose_instance(&mut rng, 6);
        let c = rat(k, 2);
        let kappa = inst.kappa.scaled(&c);
        let nu = inst.nu.scaled(&c);
        let d = decompose_capacity(&kappa, &nu, &inst.poset).unwrap();
        prop_assert!(stochastic_leq(&d.mixture, &nu, &inst.poset).holds());
        prop_assert_eq!(d.mixture.mass(), kappa.terms().iter().map(|t| t.weight.clone()).sum::<Rational>());
    }

    #[test]
    fn lifting_round_trips(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = gen::rng(seed);
        let pp = gen::pointed_poset(&mut rng, n, 0.4);
        let nu = gen::normalized_valuation(&mut rng, n, 3, 6, true);
        let minus = lift_minus(&nu, &pp).unwrap();
        prop_assert!(minus.mass() <= Rational::one());
        prop_assert_eq!(lift_plus(&minus, &pp).unwrap(), nu.clone());
        let sub = gen::normalized_valuation(&mut rng, n.saturating_sub(1).max(1), 3, 6, false);
        if sub.support().is_subset(pp.rest().all()) {
            prop_assert_eq!(lift_minus(&lift_plus(&sub, &pp).unwrap(), &pp).unwrap(), sub);
        }
        for u in pp.poset().enumerate_opens() {
            if u != pp.poset().whole() {
                for r in [rat(1, 4), rat(1, 2), rat(3, 4)] {
                    prop_assert!(membership_transported(&pp, &nu, u, &r));
                }
            }
        }
    }

    #[test]
    fn alpha_order_matches_open_comparison(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let nu = gen::discrete_valuation(&mut rng);
        let mu = gen::discrete_neighbour(&mut rng, &nu);
        prop_assert_eq!(tail_mass(&nu), nu.at_infinity().clone());
        if leq_discrete(&nu, &mu) {
            prop_assert!(separating_open(&nu, &mu).is_none());
            for _ in 0..20 {
                let u = gen::alpha_open(&mut rng);
                prop_assert!(eval_alpha(&nu, &u) <= eval_alpha(&mu, &u));
            }
        } else {
            let u = separating_open(&nu, &mu).unwrap();
            prop_assert!(eval_alpha(&nu, &u) > eval_alpha(&mu, &u));
        }
        let u = gen::alpha_open(&mut rng);
        let v = gen::alpha_open(&mut rng);
        prop_assert_eq!(
            eval_alpha(&nu, &u.union(&v)) + eval_alpha(&nu, &u.intersection(&v)),
            eval_alpha(&nu, &u) + eval_alpha(&nu, &v)
        );
        prop_assert!(eval_alpha(&nu, &AlphaOpen::empty()).is_zero());
        prop_assert_eq!(eval_alpha(&nu, &AlphaOpen::everything()), nu.mass());
    }
}

/// All `g: Z → (1/N)ℕ` with total at most `mass`.
fn candidates(z: &[usize], n: u64, mass: &Rational) -> Vec<SimpleValuation> {
    let top = (mass * Rational::from_integer(BigInt::from(n))).floor().to_integer();
    let top: u64 = top.try_into().unwrap();
    let mut out = Vec::new();
    let mut counts = vec![0u64; z.len()];
    loop {
        if counts.iter().sum::<u64>() <= top {
            out.push(
                SimpleValuation::from_weights(
                    z.iter()
                        .zip(&counts)
                        .map(|(&x, &k)| (x, Rational::new(BigInt::from(k), BigInt::from(n)))),
                )
                .unwrap(),
            );
        }
        let mut i = 0;
        loop {
            if i == counts.len() {
                return out;
            }
            counts[i] += 1;
            if counts[i] <= top {
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

/// Points of `Δ_k` with coordinates in `(1/d)ℕ`.
fn simplex_grid(k: usize, d: u64) -> Vec<SimplexVector> {
    fn go(k: usize, left: u64, d: u64, prefix: &mut Vec<u64>, out: &mut Vec<SimplexVector>) {
        if prefix.len() + 1 == k {
            prefix.push(left);
            out.push(
                SimplexVector::new(
                    prefix
                        .iter()
                        .map(|&c| Rational::new(BigInt::from(c), BigInt::from(d)))
                        .collect(),
                )
                .unwrap(),
            );
            prefix.pop();
            return;
        }
        for c in 0..=left {
            prefix.push(c);
            go(k, left - c, d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, d, d, &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn enumerated_e_matches_both_oracles(seed in any::<u64>(), n in 1u64..=4) {
        let mut rng = gen::rng(seed);
        // two choice sets of size 2 inside Z = {0,1,2}
        let pick = |rng: &mut gen::Rng64| {
            let a = rng.gen_range(0..3usize);
            let b = (a + rng.gen_range(1..3usize)) % 3;
            ElementSet::singleton(a).with(b)
        };
        let choices = vec![pick(&mut rng), pick(&mut rng)];
        let z = choices[0].union(choices[1]);
        let weights = vec![gen::rational(&mut rng, 1..=4, 4), gen::rational(&mut rng, 1..=4, 4)];
        let space = StrategySpace::new(choices).unwrap();
        let e = enumerate_e(&space, &weights, z, n, 100_000).unwrap();
        let members: BTreeSet<Vec<Rational>> = e
            .iter()
            .map(|p| z.iter().map(|x| p.valuation.weight(x)).collect())
            .collect();
        prop_assert_eq!(members.len(), e.len());
        for p in &e {
            prop_assert_eq!(mixture(&space, &weights, &p.beta).rounded_down(n).unwrap(), p.valuation.clone());
        }
        // every sampled rounding is listed
        for beta in simplex_grid(space.len(), 4 * n) {
            let g = mixture(&space, &weights, &beta).rounded_down(n).unwrap();
            let key: Vec<Rational> = z.iter().map(|x| g.weight(x)).collect();
            prop_assert!(members.contains(&key), "β-grid rounding {:?} missing", key);
        }
        // membership decided candidate by candidate agrees exactly
        let mass: Rational = weights.iter().sum();
        let zs: Vec<usize> = z.iter().collect();
        for g in candidates(&zs, n, &mass) {
            let key: Vec<Rational> = z.iter().map(|x| g.weight(x)).collect();
            prop_assert_eq!(rounding_witness(&space, &weights, z, n, &g).is_some(), members.contains(&key));
        }
    }
}

#[test]
fn unanimity_game_is_a_min() {
    let p = FinitePoset::antichain(3);
    let u = SimpleCapacity::unanimity(ElementSet::singleton(0).with(2)).unwrap();
    let h = powerval::valuation::StepFunction::new(vec![rat(2, 1), rat(7, 1), rat(1, 2)]).unwrap();
    assert_eq!(choquet_integral(&h, &u, &p).unwrap(), rat(1, 2));
}

//! Seeded property suites, one per acceptance criterion. Shared by the
//! `selftest` subcommand and the acceptance tests.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::alpha::{counterexample_witness, leq_discrete, separating_open, tail_mass, AlphaOpen};
use crate::gen::{self, Rng64};
use crate::lp::{decompose_capacity, matrix_game, max_min_value, min_max_value};
use crate::order::FinitePoset;
use crate::powerdomain::{
    lift_minus, lift_plus, membership_transported, verify_sandwich, PowerdomainError, SandwichOptions, SandwichReport,
};
use crate::rational::Rational;
use crate::report::Report;
use crate::set::ElementSet;
use crate::valuation::{
    choquet_integral, stochastic_leq, stochastic_leq_transport, Flavor, SimpleValuation, StepFunction,
};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Upper bound on generated poset sizes; each suite also has its own.
    pub max_size: usize,
    pub grid: u64,
    /// Instances per sandwich flavor.
    pub sandwich_cases: usize,
    /// Candidate cells allowed while enumerating one `E`; larger instances
    /// are replaced by a fresh draw.
    pub node_budget: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 2024,
            max_size: 16,
            grid: 4,
            sandwich_cases: 100,
            node_budget: 30_000,
        }
    }
}

impl SuiteConfig {
    fn rng(&self, salt: u64) -> Rng64 {
        gen::rng(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn size(&self, cap: usize) -> usize {
        cap.min(self.max_size).max(1)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuiteResult {
    pub criterion: u8,
    pub name: &'static str,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<String>,
    /// Extra counters worth reporting.
    pub stats: Vec<(String, String)>,
}

impl SuiteResult {
    fn new(criterion: u8, name: &'static str) -> Self {
        SuiteResult {
            criterion,
            name,
            cases: 0,
            passed: 0,
            failures: Vec::new(),
            stats: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.cases > 0 && self.passed == self.cases && self.failures.is_empty()
    }

    fn record(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            self.passed += 1;
        } else if self.failures.len() < 10 {
            self.failures.push(context());
        }
    }

    fn stat(&mut self, key: &str, value: impl ToString) {
        self.stats.push((key.to_string(), value.to_string()));
    }

    pub fn report(&self) -> Report {
        let mut r = Report::new();
        let prefix = format!("suite.{}", self.name);
        r.push(format!("{prefix}.criterion"), self.criterion);
        r.push(format!("{prefix}.cases"), self.cases);
        r.push(format!("{prefix}.passed"), self.passed);
        for (k, v) in &self.stats {
            r.push(format!("{prefix}.{k}"), v);
        }
        for (i, f) in self.failures.iter().enumerate() {
            r.push(format!("{prefix}.failure[{i}]"), f);
        }
        r.push(format!("{prefix}.status"), if self.pass() { "pass" } else { "fail" });
        r
    }
}

/// Criterion 1: mixtures from the decomposition stay below `ν`.
pub fn decomposition(cfg: &SuiteConfig) -> SuiteResult {
    let mut out = SuiteResult::new(1, "decomposition");
    let mut rng = cfg.rng(1);
    for case in 0..200 {
        let inst = gen::decompose_instance(&mut rng, cfg.size(6));
        let expected_mass: Rational = inst.kappa.terms().iter().map(|t| t.weight.clone()).sum();
        let ok = match decompose_capacity(&inst.kappa, &inst.nu, &inst.poset) {
            Ok(d) => {
                let simplex = d.beta.weights().iter().sum::<Rational>().is_one()
                    && d.beta.weights().iter().all(|b| *b >= Rational::zero());
                let below = inst
                    .poset
                    .enumerate_opens()
                    .into_iter()
                    .all(|u| d.mixture.eval(u) <= inst.nu.eval(u));
                // scaling (κ, ν) by c keeps the problem feasible
                let c = Rational::new(BigInt::from(rng.gen_range(1..=5)), BigInt::from(3));
                let scaled = decompose_capacity(&inst.kappa.scaled(&c), &inst.nu.scaled(&c), &inst.poset)
                    .map(|s| stochastic_leq(&s.mixture, &inst.nu.scaled(&c), &inst.poset).holds())
                    .unwrap_or(false);
                simplex && below && d.mixture.mass() == expected_mass && scaled
            }
            Err(_) => false,
        };
        out.record(ok, || format!("case {case}: {}", inst.kappa.display(&inst.poset)));
    }
    out
}

/// Criterion 2: the max-min and min-max programs agree exactly.
pub fn minimax(cfg: &SuiteConfig) -> SuiteResult {
    let mut out = SuiteResult::new(2, "minimax");
    let mut rng = cfg.rng(2);
    for case in 0..200 {
        let m = gen::matrix(&mut rng, 5);
        let ok = match (max_min_value(&m), min_max_value(&m), matrix_game(&m)) {
            (Ok((lo, _)), Ok((hi, _)), Ok(sol)) => lo == hi && sol.value == lo && sol.verify(&m),
            _ => false,
        };
        out.record(ok, || format!("case {case}: {}x{} matrix", m.rows(), m.cols()));
    }
    out
}

/// Outcome of the sandwich runs, shared by criteria 3 and 4.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SandwichRuns {
    pub theorem: SuiteResult,
    pub lemmas: SuiteResult,
}

/// Criteria 3 and 4: `ν ∈ 𝒱 ⊆ ↑E ⊆ 𝒰` for every flavor, plus the
/// structural facts about each bundle.
pub fn sandwich(cfg: &SuiteConfig) -> SandwichRuns {
    let mut theorem = SuiteResult::new(3, "sandwich");
    let mut lemmas = SuiteResult::new(4, "lemmas");
    let opts = SandwichOptions {
        grid: cfg.grid,
        node_cap: cfg.node_budget,
        ..SandwichOptions::default()
    };
    let mut max_e = 0;
    let mut max_n = 0;
    let mut grid_members = 0;
    let mut oversize = 0;
    for (salt, flavor) in [(3, Flavor::Plain), (4, Flavor::Sub), (5, Flavor::Prob)] {
        let mut rng = cfg.rng(salt);
        let mut case = 0;
        let mut draws = 0;
        while case < cfg.sandwich_cases {
            draws += 1;
            let inst = gen::sandwich_instance(&mut rng, cfg.size(5), flavor);
            let label = || {
                format!(
                    "{flavor} case {case}: {} on {:?}",
                    inst.u.display(&inst.poset),
                    inst.poset
                )
            };
            let outcome = verify_sandwich(&inst.poset, &inst.nu, &inst.u, &opts);
            if matches!(outcome, Err(PowerdomainError::Size(_))) && draws <= 2 * cfg.sandwich_cases {
                oversize += 1;
                continue;
            }
            match outcome {
                Ok((bundle, r)) => {
                    max_e = max_e.max(bundle.e.len());
                    max_n = max_n.max(bundle.n);
                    grid_members += r.grid_members;
                    let SandwichReport {
                        nu_in_v,
                        e_in_u,
                        grid_covered,
                        v_in_q,
                        ..
                    } = r;
                    theorem.record(nu_in_v && e_in_u && grid_covered && v_in_q, || {
                        format!("{}: {:?}", label(), r.failures)
                    });
                    lemmas.record(r.lemmas.all() && r.nu_in_v && r.rounding_gap, || {
                        format!("{}: {:?}", label(), r.lemmas)
                    });
                }
                Err(e) => {
                    theorem.record(false, || format!("{}: {e}", label()));
                    lemmas.record(false, || format!("{}: {e}", label()));
                }
            }
            case += 1;
        }
    }
    theorem.stat("max_E", max_e);
    theorem.stat("max_N", max_n);
    theorem.stat("grid_members", grid_members);
    theorem.stat("redrawn_oversize", oversize);
    SandwichRuns { theorem, lemmas }
}

/// Criterion 5: `ν ↦ ν⁻` and `μ ↦ μ⁺` are mutually inverse and transport
/// subbasic membership.
pub fn lifting(cfg: &SuiteConfig) -> SuiteResult {
    let mut out = SuiteResult::new(5, "lifting");
    let mut rng = cfg.rng(6);
    let mut transported = 0usize;
    for case in 0..200 {
        let n = rng.gen_range(1..=cfg.size(6));
        let pp = gen::pointed_poset(&mut rng, n, 0.35);
        let nu = gen::normalized_valuation(&mut rng, n, 3, 6, true);
        let mu = gen::normalized_valuation(&mut rng, n - 1, 3, 6, false);
        let round_nu = lift_minus(&nu, &pp).and_then(|m| lift_plus(&m, &pp)).map(|v| v == nu);
        let round_mu = lift_plus(&mu, &pp).and_then(|p| lift_minus(&p, &pp)).map(|v| v == mu);
        let mut membership = true;
        for u in pp.poset().enumerate_opens() {
            if u == pp.poset().whole() {
                continue;
            }
            let thresholds = [
                nu.eval(u),
                Rational::new(BigInt::from(rng.gen_range(0..6)), BigInt::from(6)),
            ];
            for r in &thresholds {
                transported += 1;
                membership &= membership_transported(&pp, &nu, u, r);
            }
        }
        out.record(round_nu == Ok(true) && round_mu == Ok(true) && membership, || {
            format!("case {case}: ν = {} on {:?}", nu.display(pp.poset()), pp.poset())
        });
    }
    out.stat("membership_checks", transported);
    out
}

/// Criterion 6: every basic weak neighbourhood of `δ_∞` contains some `δ_n`
/// with `a_∞ = 0`.
pub fn counterexample(cfg: &SuiteConfig) -> SuiteResult {
    let mut out = SuiteResult::new(6, "counterexample");
    let mut rng = cfg.rng(7);
    for case in 0..300 {
        let w = gen::alpha_neighbourhood(&mut rng);
        let ok = counterexample_witness(&w).map(|c| c.separates()).unwrap_or(false);
        out.record(ok, || format!("case {case}: {w:?}"));
    }
    out
}

/// Criterion 7: the definitional order and the transport oracle agree; the
/// coefficientwise order on `α(ℕ)` agrees with sampled opens.
pub fn oracles(cfg: &SuiteConfig) -> SuiteResult {
    let mut out = SuiteResult::new(7, "oracles");
    let mut rng = cfg.rng(8);
    let (mut yes, mut no) = (0, 0);
    for case in 0..500 {
        let n = rng.gen_range(1..=cfg.size(7));
        let p = gen::poset(&mut rng, n, 0.35);
        let mu = gen::valuation(&mut rng, n, 4, 6, 4);
        let nu = if rng.gen_bool(0.5) {
            // push μ upward and add mass, so that μ ≤ ν is likely
            let moved = mu.remap(|x| {
                let ups: Vec<usize> = p.up_of(x).iter().collect();
                ups[(x * 7 + case) % ups.len()]
            });
            &moved + &gen::valuation(&mut rng, n, 2, 6, 2)
        } else {
            gen::valuation(&mut rng, n, 4, 6, 4)
        };
        let direct = stochastic_leq(&mu, &nu, &p).holds();
        if direct {
            yes += 1;
        } else {
            no += 1;
        }
        out.record(direct == stochastic_leq_transport(&mu, &nu, &p), || {
            format!("case {case}: {} vs {}", mu.display(&p), nu.display(&p))
        });
    }
    let opens: Vec<AlphaOpen> = (0..200).map(|_| gen::alpha_open(&mut rng)).collect();
    for case in 0..200 {
        let nu = gen::discrete_valuation(&mut rng);
        let mu = gen::discrete_neighbour(&mut rng, &nu);
        let ok = if leq_discrete(&nu, &mu) {
            opens.iter().all(|u| nu.eval(u) <= mu.eval(u))
        } else {
            separating_open(&nu, &mu).is_some_and(|u| nu.eval(&u) > mu.eval(&u))
        };
        out.record(ok, || {
            format!("alpha case {case}: {} vs {}", nu.display(), mu.display())
        });
    }
    out.stat("leq_true", yes);
    out.stat("leq_false", no);
    out
}

fn topology_axioms(p: &FinitePoset) -> bool {
    let opens = p.enumerate_opens();
    let set: BTreeSet<_> = opens.iter().copied().collect();
    let all_opens = p.all().subsets().filter(|&s| p.is_upward_closed(s)).count();
    set.len() == opens.len()
        && all_opens == opens.len()
        && set.contains(&p.up_open(ElementSet::EMPTY))
        && set.contains(&p.whole())
        && opens.iter().all(|&u| {
            opens
                .iter()
                .all(|&v| set.contains(&u.union(v)) && set.contains(&u.intersection(v)))
        })
}

fn sober(p: &FinitePoset) -> bool {
    let s = p.is_sober();
    s.sober
        && s.generic_points
            .iter()
            .all(|(c, x)| x.is_some() && p.greatest_element(*c) == *x)
}

fn valuation_laws(p: &FinitePoset, nu: &SimpleValuation, kappa: &crate::valuation::SimpleCapacity) -> bool {
    let opens = p.enumerate_opens();
    let empty = p.up_open(ElementSet::EMPTY);
    let strict = nu.eval(empty).is_zero() && kappa.eval(empty).is_zero();
    let laws = opens.iter().all(|&u| {
        opens.iter().all(|&v| {
            let modular = nu.eval(u) + nu.eval(v) == nu.eval(u.union(v)) + nu.eval(u.intersection(v));
            let sub = u.members().is_subset(v.members());
            let monotone = !sub || (nu.eval(u) <= nu.eval(v) && kappa.eval(u) <= kappa.eval(v));
            modular && monotone
        })
    });
    strict && laws
}

fn choquet_laws(
    p: &FinitePoset,
    nu: &SimpleValuation,
    kappa: &crate::valuation::SimpleCapacity,
    h1: &StepFunction,
    h2: &StepFunction,
    c: &Rational,
) -> bool {
    let sum = h1.sum(h2);
    let int = |h: &StepFunction| choquet_integral(h, nu, p).expect("monotone");
    let additive = int(&sum) == int(h1) + int(h2);
    let homogeneous = int(&h1.scaled(c)) == c * int(h1);
    let characteristic = p
        .enumerate_opens()
        .into_iter()
        .all(|u| int(&StepFunction::characteristic(p.size(), u.members(), Rational::one())) == nu.eval(u));
    let min_formula = choquet_integral(h1, kappa, p).expect("monotone") == kappa.min_formula(h1);
    additive && homogeneous && characteristic && min_formula
}

/// Criterion 8: sobriety, topology axioms, valuation laws, Choquet
/// linearity and the unanimity-game formula, plus the `α(ℕ)` evaluator laws.
pub fn structural(cfg: &SuiteConfig) -> SuiteResult {
    let mut out = SuiteResult::new(8, "structural");
    let mut rng = cfg.rng(9);
    let mut capacity_nonlinear = false;
    for case in 0..150 {
        let n = rng.gen_range(1..=cfg.size(7));
        let p = gen::poset(&mut rng, n, 0.3);
        let nu = gen::valuation(&mut rng, n, 4, 6, 6);
        let kappa = gen::capacity(&mut rng, &p, 3, 3);
        let h1 = gen::step_function(&mut rng, &p);
        let h2 = gen::step_function(&mut rng, &p);
        let c = gen::rational(&mut rng, 0..=5, 3);
        let scott = n > 5
            || p.all()
                .subsets()
                .all(|s| p.is_scott_open_by_definition(s) == p.is_upward_closed(s));
        let interior = p.all().subsets().all(|s| {
            let i = p.interior(s).members();
            i.is_subset(s) && p.interior(i).members() == i && p.is_upward_closed(i)
        });
        let closure = p.all().subsets().all(|s| {
            let up = p.upward_closure(s);
            p.upward_closure(up) == up && p.upward_closure(p.minimal_elements(s)) == up
        });
        let ok = topology_axioms(&p)
            && sober(&p)
            && scott
            && interior
            && closure
            && valuation_laws(&p, &nu, &kappa)
            && choquet_laws(&p, &nu, &kappa, &h1, &h2, &c);
        let sum = h1.sum(&h2);
        let ck = |h: &StepFunction| choquet_integral(h, &kappa, &p).expect("monotone");
        capacity_nonlinear |= ck(&sum) != ck(&h1) + ck(&h2);
        out.record(ok, || format!("case {case}: {p:?}"));
    }
    for case in 0..100 {
        let nu = gen::discrete_valuation(&mut rng);
        let u = gen::alpha_open(&mut rng);
        let v = gen::alpha_open(&mut rng);
        let modular = nu.eval(&u) + nu.eval(&v) == nu.eval(&u.union(&v)) + nu.eval(&u.intersection(&v));
        let strict = nu.eval(&AlphaOpen::empty()).is_zero();
        let tail = tail_mass(&nu) == *nu.at_infinity();
        out.record(modular && strict && tail, || {
            format!("alpha case {case}: {}", nu.display())
        });
    }
    out.record(capacity_nonlinear, || "no capacity violated additivity".into());
    out.stat("capacity_nonlinear_found", capacity_nonlinear);
    out
}

/// Every suite in criterion order.
pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteResult> {
    let SandwichRuns { theorem, lemmas } = sandwich(cfg);
    vec![
        decomposition(cfg),
        minimax(cfg),
        theorem,
        lemmas,
        lifting(cfg),
        counterexample(cfg),
        oracles(cfg),
        structural(cfg),
    ]
}

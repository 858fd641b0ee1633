//! Construction of `𝒱` and `E` for a basic neighbourhood
//! `𝒰 = ⋂_i [U_i > r_i]` of a simple valuation `ν = Σ_{x∈A} a_x δ_x`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::enumerate::{enumerate_e, EPoint, DEFAULT_NODE_CAP};
use super::lifting::{verify_sandwich_prob, PointedPoset};
use super::{member_weak_open, PowerdomainError, SubbasicOpen, WeakOpen};
use crate::lp::{decompose_on, mixture, StrategySpace};
use crate::order::{FinitePoset, OpenSet};
use crate::rational::{ceil_int, to_u64, Rational};
use crate::report::Report;
use crate::set::ElementSet;
use crate::valuation::{stochastic_leq, stochastic_leq_on, Dominance, Flavor, SimpleCapacity, SimpleValuation};

/// The scalars `a` and `s_i` with `0 < a < 1` and `a·ν(U_i) > s_i > r_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constants {
    pub a: Rational,
    pub s: Vec<Rational>,
}

/// `a = (1 + max_i r_i/ν(U_i))/2` and `s_i = (a·ν(U_i) + r_i)/2`.
pub fn choose_constants(
    nu: &SimpleValuation,
    thresholds: &[(OpenSet, Rational)],
) -> Result<Constants, PowerdomainError> {
    let mut max_ratio = Rational::zero();
    for (u, r) in thresholds {
        if !r.is_positive() {
            return Err(PowerdomainError::Precondition(format!("threshold {r} is not positive")));
        }
        let m = nu.eval(*u);
        if m <= *r {
            return Err(PowerdomainError::Precondition(format!(
                "valuation of an open set is {m}, not above {r}"
            )));
        }
        max_ratio = max_ratio.max(r / m);
    }
    let two = Rational::from_integer(BigInt::from(2));
    let a = (Rational::one() + max_ratio) / &two;
    let s: Vec<Rational> = thresholds.iter().map(|(u, r)| (&a * nu.eval(*u) + r) / &two).collect();
    if !a.is_positive() || a >= Rational::one() {
        return Err(PowerdomainError::TheoremViolation(format!("a = {a} outside (0,1)")));
    }
    for ((u, r), s) in thresholds.iter().zip(&s) {
        if !(&a * nu.eval(*u) > *s && s > r) {
            return Err(PowerdomainError::TheoremViolation(format!(
                "a·ν(U) > s > r fails for s = {s}, r = {r}"
            )));
        }
    }
    Ok(Constants { a, s })
}

/// `N = max(1, ⌈max_i |Z|/(s_i − r_i)⌉)`.
pub fn choose_n(z_len: usize, s: &[Rational], r: &[Rational]) -> Result<u64, PowerdomainError> {
    let mut n = BigInt::one();
    for (s, r) in s.iter().zip(r) {
        let gap = s - r;
        if !gap.is_positive() {
            return Err(PowerdomainError::Precondition(format!("s = {s} is not above r = {r}")));
        }
        n = n.max(ceil_int(&(Rational::from_integer(BigInt::from(z_len)) / gap)));
    }
    to_u64(&n).ok_or_else(|| PowerdomainError::Size(format!("N = {n} does not fit in 64 bits")))
}

/// The sets `I_x`, `B_x` and `V_x = int ↑B_x` for each `x ∈ A`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cover {
    /// `A` in processing order: by `|{y ∈ A | y ≤ x}|`, ties by index.
    pub order: Vec<usize>,
    /// `I_x = {i | x ∈ U_i}`.
    pub index_sets: BTreeMap<usize, Vec<usize>>,
    pub b: BTreeMap<usize, ElementSet>,
    pub v: BTreeMap<usize, OpenSet>,
}

impl Cover {
    /// `V_B = ⋃_{x∈B} V_x`.
    pub fn v_of(&self, poset: &FinitePoset, set: ElementSet) -> OpenSet {
        set.iter()
            .map(|x| self.v[&x])
            .fold(poset.up_open(ElementSet::EMPTY), OpenSet::union)
    }

    /// `Z = ⋃_x B_x`.
    pub fn z(&self) -> ElementSet {
        self.b.values().fold(ElementSet::EMPTY, |acc, &b| acc | b)
    }
}

/// Builds `B_x` and `V_x` by course-of-values induction. `S_x` is
/// `⋂_{i∈I_x} U_i ∖ ↓(A∖↑x) ∩ ⋂_{y∈A, y<x} V_y`, `B_x = min S_x` and
/// `V_x = int ↑B_x = S_x`.
pub fn construct_cover(poset: &FinitePoset, support: ElementSet, opens: &[OpenSet]) -> Result<Cover, PowerdomainError> {
    let mut order: Vec<usize> = support.iter().collect();
    order.sort_by_key(|&x| ((poset.down_of(x) & support).len(), x));
    let mut cover = Cover {
        order: order.clone(),
        index_sets: BTreeMap::new(),
        b: BTreeMap::new(),
        v: BTreeMap::new(),
    };
    for &x in &order {
        let index_set: Vec<usize> = (0..opens.len()).filter(|&i| opens[i].contains(x)).collect();
        let mut s = poset.all();
        for &i in &index_set {
            s = s & opens[i].members();
        }
        s = s - poset.downward_closure(support - poset.up_of(x));
        for y in support.iter().filter(|&y| poset.lt(y, x)) {
            s = s & cover.v[&y].members();
        }
        if !s.contains(x) {
            return Err(PowerdomainError::TheoremViolation(format!(
                "x = {} is not in S_x",
                poset.name(x)
            )));
        }
        let b = poset.minimal_elements(s);
        let v = poset.interior(poset.upward_closure(b));
        if v.members() != s {
            return Err(PowerdomainError::TheoremViolation(format!(
                "int ↑B_x differs from S_x at x = {}",
                poset.name(x)
            )));
        }
        cover.index_sets.insert(x, index_set);
        cover.b.insert(x, b);
        cover.v.insert(x, v);
    }
    Ok(cover)
}

/// Verdicts on the structural facts about `B_x`, `V_x` and `V_B`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct LemmaReport {
    /// `x ∈ V_x`.
    pub x_in_vx: bool,
    /// `↑B_y ⊆ V_x ⊆ ↑B_x` whenever `x ≤ y` in `A`.
    pub nested: bool,
    /// `x ∈ U_i` implies `B_x ⊆ U_i`.
    pub b_inside_u: bool,
    /// For `x, y ∈ A`: `x ∈ V_y` iff `y ≤ x`.
    pub separation: bool,
    /// `A ∩ V_B = B` for every upward-closed `B ⊆ A`.
    pub trace: bool,
}

impl LemmaReport {
    pub fn all(&self) -> bool {
        self.x_in_vx && self.nested && self.b_inside_u && self.separation && self.trace
    }

    /// Checks every fact directly on the constructed sets.
    pub fn check(poset: &FinitePoset, support: ElementSet, opens: &[OpenSet], cover: &Cover) -> Self {
        let up_b = |x: usize| poset.upward_closure(cover.b[&x]);
        let pairs = || support.iter().flat_map(move |x| support.iter().map(move |y| (x, y)));
        LemmaReport {
            x_in_vx: support.iter().all(|x| cover.v[&x].contains(x)),
            nested: pairs().filter(|&(x, y)| poset.leq(x, y)).all(|(x, y)| {
                let vx = cover.v[&x].members();
                up_b(y).is_subset(vx) && vx.is_subset(up_b(x))
            }),
            b_inside_u: support.iter().all(|x| {
                opens
                    .iter()
                    .filter(|u| u.contains(x))
                    .all(|u| cover.b[&x].is_subset(u.members()))
            }),
            separation: pairs().all(|(x, y)| cover.v[&y].contains(x) == poset.leq(y, x)),
            trace: upper_subsets(poset, support)
                .into_iter()
                .all(|b| support & cover.v_of(poset, b).members() == b),
        }
    }
}

/// `℘↑A`: the subsets of `A` that are upward closed within `A`, in
/// increasing bit-mask order.
pub(crate) fn upper_subsets(poset: &FinitePoset, support: ElementSet) -> Vec<ElementSet> {
    support
        .subsets()
        .filter(|&b| b.iter().all(|x| (poset.up_of(x) & support).is_subset(b)))
        .collect()
}

/// `𝒱 = ⋂_{B∈℘↑A} [s_B ≪ V_B]` with `s_B = a·Σ_{x∈B} a_x`; `B = ∅` is kept.
pub fn build_v(poset: &FinitePoset, nu: &SimpleValuation, a: &Rational, cover: &Cover, flavor: Flavor) -> WeakOpen {
    let conjuncts = upper_subsets(poset, nu.support())
        .into_iter()
        .map(|b| {
            let s_b = a * b.iter().map(|x| nu.weight(x)).sum::<Rational>();
            SubbasicOpen::way_below(s_b, cover.v_of(poset, b))
        })
        .collect();
    WeakOpen::new(conjuncts, flavor)
}

/// `κ = a·Σ_{x∈A} a_x u_{B_x}`, one term per `x` in increasing index order.
pub fn capacity_of(nu: &SimpleValuation, a: &Rational, cover: &Cover) -> SimpleCapacity {
    SimpleCapacity::new(nu.weights().map(|(x, w)| (a * w, cover.b[&x]))).expect("positive weights, non-empty B_x")
}

/// `κ ≤ μ` on every open set.
pub fn check_capacity_domination(mu: &SimpleValuation, kappa: &SimpleCapacity, poset: &FinitePoset) -> bool {
    stochastic_leq(kappa, mu, poset).holds()
}

/// Every valuation on `n` points with weights in `(1/grid)ℕ` and total at
/// most `units/grid` (exactly `units/grid` when `exact`).
pub fn grid_valuations(n: usize, grid: u64, units: u64, exact: bool) -> Vec<SimpleValuation> {
    fn rec(k: usize, n: usize, left: u64, exact: bool, acc: &mut Vec<u64>, grid: u64, out: &mut Vec<SimpleValuation>) {
        if k == n {
            if !exact || left == 0 {
                let weights = acc
                    .iter()
                    .enumerate()
                    .map(|(x, &c)| (x, Rational::new(BigInt::from(c), BigInt::from(grid))));
                out.push(SimpleValuation::from_weights(weights).expect("non-negative"));
            }
            return;
        }
        for c in 0..=left {
            acc.push(c);
            rec(k + 1, n, left - c, exact, acc, grid, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, units, exact, &mut Vec::new(), grid, &mut out);
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SandwichOptions {
    /// Denominator of the grid of test valuations.
    pub grid: u64,
    /// Largest grid mass for the plain flavor; defaults to `max(1, ⌈ν(X)⌉)`.
    pub mass_cap: Option<Rational>,
    /// Bound passed to [`enumerate_e`].
    pub node_cap: usize,
    pub check_grid: bool,
}

impl Default for SandwichOptions {
    fn default() -> Self {
        SandwichOptions {
            grid: 4,
            mass_cap: None,
            node_cap: DEFAULT_NODE_CAP,
            check_grid: true,
        }
    }
}

/// Everything the construction produces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WitnessBundle {
    /// The poset the construction ran on (`P∖{⊥}` for the probability
    /// flavor).
    pub poset: FinitePoset,
    pub flavor: Flavor,
    pub nu: SimpleValuation,
    pub support: ElementSet,
    pub thresholds: Vec<(OpenSet, Rational)>,
    pub constants: Constants,
    pub cover: Cover,
    pub z: ElementSet,
    pub n: u64,
    pub v_cal: WeakOpen,
    pub kappa: SimpleCapacity,
    pub space: StrategySpace,
    pub e: Vec<EPoint>,
    /// Set when the bundle was built on the lifted side of a pointed poset.
    pub lifted: Option<PointedPoset>,
}

/// Verdicts of [`verify_sandwich`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SandwichReport {
    pub nu_in_v: bool,
    pub e_in_u: bool,
    pub grid_covered: bool,
    /// `κ ≤ μ` for every grid member `μ` of `𝒱`.
    pub v_in_q: bool,
    pub lemmas: LemmaReport,
    /// `ϖ̄ = round_N(ϖ)` and `ϖ(U) − ϖ̄(U) ≤ |Z|/N` for every witness.
    pub rounding_gap: bool,
    pub grid_points: usize,
    pub grid_members: usize,
    pub failures: Vec<String>,
}

impl SandwichReport {
    pub fn all_pass(&self) -> bool {
        self.nu_in_v && self.e_in_u && self.grid_covered && self.v_in_q && self.lemmas.all() && self.rounding_gap
    }

    fn fail(&mut self, msg: String) {
        const KEEP: usize = 8;
        if self.failures.len() < KEEP {
            self.failures.push(msg);
        }
    }
}

impl WitnessBundle {
    /// Runs the construction on `poset` for the plain or sub flavor.
    pub fn build(
        poset: &FinitePoset,
        nu: &SimpleValuation,
        u: &WeakOpen,
        opts: &SandwichOptions,
    ) -> Result<Self, PowerdomainError> {
        if u.flavor == Flavor::Prob {
            return Err(PowerdomainError::Precondition(
                "the probability flavor is handled through lifting".into(),
            ));
        }
        if !nu.support().is_subset(poset.all()) {
            return Err(PowerdomainError::Precondition(
                "valuation support outside the poset".into(),
            ));
        }
        if !member_weak_open(nu, u) {
            return Err(PowerdomainError::Precondition(
                "valuation is not in the weak open".into(),
            ));
        }
        let thresholds = u.thresholds();
        let constants = choose_constants(nu, &thresholds)?;
        let opens: Vec<OpenSet> = thresholds.iter().map(|(o, _)| *o).collect();
        let rs: Vec<Rational> = thresholds.iter().map(|(_, r)| r.clone()).collect();
        let support = nu.support();
        let cover = construct_cover(poset, support, &opens)?;
        let v_cal = build_v(poset, nu, &constants.a, &cover, u.flavor);
        let kappa = capacity_of(nu, &constants.a, &cover);
        let z = cover.z();
        let n = choose_n(z.len(), &constants.s, &rs)?;
        let space = StrategySpace::new(kappa.terms().iter().map(|t| t.set).collect())?;
        let weights: Vec<Rational> = kappa.terms().iter().map(|t| t.weight.clone()).collect();
        let e = enumerate_e(&space, &weights, z, n, opts.node_cap)?;
        Ok(WitnessBundle {
            poset: poset.clone(),
            flavor: u.flavor,
            nu: nu.clone(),
            support,
            thresholds,
            constants,
            cover,
            z,
            n,
            v_cal,
            kappa,
            space,
            e,
            lifted: None,
        })
    }

    fn weights(&self) -> Vec<Rational> {
        self.kappa.terms().iter().map(|t| t.weight.clone()).collect()
    }

    /// `ϖ̄ = round_N(ϖ)`, `ϖ̄ ≤ ϖ` and `ϖ(U) − ϖ̄(U) ≤ |Z|/N` on every open.
    fn rounding_ok(&self, exact: &SimpleValuation, rounded: &SimpleValuation, opens: &[OpenSet]) -> bool {
        let bound = Rational::new(BigInt::from(self.z.len()), BigInt::from(self.n));
        exact.rounded_down(self.n).as_ref() == Ok(rounded)
            && opens.iter().all(|&u| {
                let gap = exact.eval(u) - rounded.eval(u);
                !gap.is_negative() && gap <= bound
            })
    }

    /// Checks that do not depend on the grid.
    pub(crate) fn check(&self, u: &WeakOpen, opens: &[OpenSet]) -> SandwichReport {
        let u_opens: Vec<OpenSet> = self.thresholds.iter().map(|(o, _)| *o).collect();
        let mut report = SandwichReport {
            nu_in_v: member_weak_open(&self.nu, &self.v_cal),
            e_in_u: true,
            grid_covered: true,
            v_in_q: true,
            lemmas: LemmaReport::check(&self.poset, self.support, &u_opens, &self.cover),
            rounding_gap: true,
            grid_points: 0,
            grid_members: 0,
            failures: Vec::new(),
        };
        if !report.nu_in_v {
            report.fail("ν is not in 𝒱".into());
        }
        if !report.lemmas.all() {
            report.fail(format!("lemma check failed: {:?}", report.lemmas));
        }
        let weights = self.weights();
        for point in &self.e {
            if !member_weak_open(&point.valuation, u) {
                report.e_in_u = false;
                report.fail(format!("E member {} is not in 𝒰", point.valuation.display(&self.poset)));
            }
            let exact = mixture(&self.space, &weights, &point.beta);
            if !self.rounding_ok(&exact, &point.valuation, opens) {
                report.rounding_gap = false;
                report.fail(format!(
                    "witness β does not round to {}",
                    point.valuation.display(&self.poset)
                ));
            }
        }
        report
    }

    /// For `μ ∈ 𝒱`: decomposes `κ ≤ μ`, rounds the mixture and returns it
    /// after confirming it lies in `E` and below `μ`. `Ok(None)` when
    /// `μ ∉ 𝒱`.
    pub fn cover_point(
        &self,
        mu: &SimpleValuation,
        opens: &[OpenSet],
        members: &HashSet<SimpleValuation>,
    ) -> Result<Option<SimpleValuation>, String> {
        if !member_weak_open(mu, &self.v_cal) {
            return Ok(None);
        }
        let show = |v: &SimpleValuation| v.display(&self.poset).to_string();
        if let Dominance::Violated(u) = stochastic_leq_on(&self.kappa, mu, opens) {
            return Err(format!(
                "κ exceeds μ = {} on {}",
                show(mu),
                self.poset.format_set(u.members())
            ));
        }
        let d =
            decompose_on(&self.kappa, mu, opens).map_err(|e| format!("decomposition failed for {}: {e}", show(mu)))?;
        let rounded = d.mixture.rounded_down(self.n).map_err(|e| e.to_string())?;
        if !members.contains(&rounded) {
            return Err(format!("rounded mixture {} is not in E", show(&rounded)));
        }
        if !stochastic_leq_on(&rounded, mu, opens).holds() {
            return Err(format!("{} is not below {}", show(&rounded), show(mu)));
        }
        if !self.rounding_ok(&d.mixture, &rounded, opens) {
            return Err(format!("rounding gap exceeded for {}", show(&d.mixture)));
        }
        Ok(Some(rounded))
    }

    pub fn e_members(&self) -> HashSet<SimpleValuation> {
        self.e.iter().map(|p| p.valuation.clone()).collect()
    }

    /// The key-value rendering used by the command-line tool.
    pub fn report(&self, verdicts: &SandwichReport) -> Report {
        let p = &self.poset;
        let mut r = Report::new();
        r.push("flavor", self.lifted.as_ref().map_or(self.flavor, |_| Flavor::Prob));
        if let Some(pp) = &self.lifted {
            r.push("bottom", pp.poset().name(pp.bottom()));
        }
        r.push("A", p.format_set(self.support));
        r.push("a", &self.constants.a);
        for (i, s) in self.constants.s.iter().enumerate() {
            r.push(format!("s[{i}]"), s);
        }
        r.push("N", self.n);
        r.push("Z", p.format_set(self.z));
        for &x in self.cover.b.keys() {
            r.push(format!("B[{}]", p.name(x)), p.format_set(self.cover.b[&x]));
        }
        for &x in self.cover.v.keys() {
            r.push(format!("V[{}]", p.name(x)), p.format_set(self.cover.v[&x].members()));
        }
        r.push("kappa", self.kappa.display(p));
        r.push("V.conjuncts", self.v_cal.conjuncts.len());
        r.push("Sigma.size", self.space.len());
        r.push("E.size", self.e.len());
        r.push("grid.points", verdicts.grid_points);
        r.push("grid.members", verdicts.grid_members);
        r.push("check.lemma.x_in_Vx", verdicts.lemmas.x_in_vx);
        r.push("check.lemma.nested", verdicts.lemmas.nested);
        r.push("check.lemma.B_in_U", verdicts.lemmas.b_inside_u);
        r.push("check.lemma.separation", verdicts.lemmas.separation);
        r.push("check.lemma.trace", verdicts.lemmas.trace);
        r.push("check.rounding_gap", verdicts.rounding_gap);
        r.push("check.V_in_Q", verdicts.v_in_q);
        r.push("check.nu_in_V", verdicts.nu_in_v);
        r.push("check.E_in_U", verdicts.e_in_u);
        r.push("check.grid_covered", verdicts.grid_covered);
        for (i, f) in verdicts.failures.iter().enumerate() {
            r.push(format!("failure[{i}]"), f);
        }
        r
    }
}

/// Builds `𝒱` and `E` for `ν ∈ 𝒰` and checks `ν ∈ 𝒱 ⊆ ↑E ⊆ 𝒰`, the
/// middle inclusion on every grid valuation. The probability flavor is
/// routed through [`verify_sandwich_prob`].
pub fn verify_sandwich(
    poset: &FinitePoset,
    nu: &SimpleValuation,
    u: &WeakOpen,
    opts: &SandwichOptions,
) -> Result<(WitnessBundle, SandwichReport), PowerdomainError> {
    if u.flavor == Flavor::Prob {
        return verify_sandwich_prob(&PointedPoset::find(poset)?, nu, u, opts);
    }
    if opts.grid == 0 {
        return Err(PowerdomainError::Precondition("grid must be positive".into()));
    }
    let bundle = WitnessBundle::build(poset, nu, u, opts)?;
    let opens = poset.enumerate_opens();
    let mut report = bundle.check(u, &opens);
    if opts.check_grid {
        let cap = match (u.flavor, &opts.mass_cap) {
            (Flavor::Sub, _) => Rational::one(),
            (_, Some(c)) => c.clone(),
            _ => Rational::from_integer(ceil_int(&nu.mass())).max(Rational::one()),
        };
        let units = to_u64(&crate::rational::floor_scaled(&cap, opts.grid))
            .ok_or_else(|| PowerdomainError::Size("grid mass cap too large".into()))?;
        let members = bundle.e_members();
        for mu in grid_valuations(poset.size(), opts.grid, units, false) {
            report.grid_points += 1;
            match bundle.cover_point(&mu, &opens, &members) {
                Ok(None) => {}
                Ok(Some(_)) => report.grid_members += 1,
                Err(msg) => {
                    report.grid_members += 1;
                    report.grid_covered = false;
                    if msg.starts_with("κ exceeds") {
                        report.v_in_q = false;
                    }
                    report.fail(msg);
                }
            }
        }
    }
    Ok((bundle, report))
}

//! The finite set `E` of rounded mixtures.
//!
//! `E₀` is the image of the simplex `Δ_Σ` under `β ↦ Σ_{f,x} β_f w_x δ_{f(x)}`
//! (with `w_x = a·a_x`), and `E` collects the coefficientwise roundings
//! `⌊N·c_z⌋/N` of its members. A candidate `g: Z → (1/N)ℕ` is in `E` iff
//! some `β` puts every coordinate in the half-open cell
//! `g_z ≤ c_z(β) < g_z + 1/N`.
//!
//! Candidates are built one coordinate at a time. For a fixed prefix the
//! feasible `β` form a convex set `F` whose closure `G` drops the strict
//! upper bounds, so the next coordinate ranges over an interval with
//! endpoints `min_G c` and `max_G c`. Every cell meeting the interior of
//! that interval is reachable, and a witness is obtained by moving from a
//! point of `F` towards an optimal vertex of `G`. Only a cell touching the
//! interval at its upper endpoint alone needs a further strictness test.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::PowerdomainError;
use crate::lp::{LinearProgram, LpStatus, Relation, SimplexVector, StrategySpace};
use crate::rational::{floor_scaled, Rational};
use crate::set::ElementSet;
use crate::valuation::SimpleValuation;

/// Default bound on the number of candidate prefixes examined.
pub const DEFAULT_NODE_CAP: usize = 200_000;

/// A member of `E` with a strategy mixture that rounds to it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EPoint {
    pub valuation: SimpleValuation,
    pub beta: SimplexVector,
}

/// `coeffs[k][f]`: contribution of strategy `f` to the `k`-th point of `Z`.
fn coefficients(space: &StrategySpace, weights: &[Rational], points: &[usize]) -> Vec<Vec<Rational>> {
    points
        .iter()
        .map(|&p| {
            space
                .strategies()
                .iter()
                .map(|f| f.iter().zip(weights).filter(|(&y, _)| y == p).map(|(_, w)| w).sum())
                .collect()
        })
        .collect()
}

fn dot(row: &[Rational], beta: &[Rational]) -> Rational {
    row.iter().zip(beta).map(|(a, b)| a * b).sum()
}

struct Cells<'a> {
    coeffs: &'a [Vec<Rational>],
    step: Rational,
}

impl Cells<'_> {
    fn lower(&self, m: &BigInt) -> Rational {
        Rational::from_integer(m.clone()) * &self.step
    }

    /// A program over `β` (plus `extra` trailing variables) restricted to
    /// the simplex and the closed cells of `prefix`.
    fn program(&self, prefix: &[BigInt], extra: usize) -> LinearProgram {
        let strategies = self.coeffs.first().map_or(0, Vec::len);
        let pad = |mut row: Vec<Rational>| {
            row.extend(std::iter::repeat_with(Rational::zero).take(extra));
            row
        };
        let mut lp = LinearProgram::new(strategies + extra);
        lp.constrain(pad(vec![Rational::one(); strategies]), Relation::Eq, Rational::one())
            .expect("arity");
        for (k, m) in prefix.iter().enumerate() {
            let lower = self.lower(m);
            lp.constrain(pad(self.coeffs[k].clone()), Relation::Ge, lower.clone())
                .expect("arity");
            lp.constrain(pad(self.coeffs[k].clone()), Relation::Le, lower + &self.step)
                .expect("arity");
        }
        lp
    }

    /// Optimal `β` for `±c_k` over the closed cells of `prefix`.
    fn extreme(&self, prefix: &[BigInt], k: usize, maximize: bool) -> Option<Vec<Rational>> {
        let mut lp = self.program(prefix, 0);
        let objective = if maximize {
            self.coeffs[k].clone()
        } else {
            self.coeffs[k].iter().map(|c| -c).collect()
        };
        lp.maximize(objective).expect("arity");
        let sol = lp.solve();
        (sol.status == LpStatus::Optimal).then_some(sol.point)
    }

    /// Some `β` meeting every cell of `prefix` with the strict upper bounds,
    /// and `c_k(β) = target` when given. Found by maximizing the smallest
    /// upper slack `t` and asking for `t > 0`.
    fn strict_point(&self, prefix: &[BigInt], pinned: Option<(usize, &Rational)>) -> Option<Vec<Rational>> {
        let strategies = self.coeffs.first().map_or(0, Vec::len);
        let mut lp = self.program(&[], 2);
        let mut objective = vec![Rational::zero(); strategies + 2];
        objective[strategies] = Rational::one();
        objective[strategies + 1] = -Rational::one();
        lp.maximize(objective).expect("arity");
        for (k, m) in prefix.iter().enumerate() {
            let lower = self.lower(m);
            let mut row = self.coeffs[k].clone();
            row.extend([Rational::zero(), Rational::zero()]);
            lp.constrain(row.clone(), Relation::Ge, lower.clone()).expect("arity");
            row[strategies] = Rational::one();
            row[strategies + 1] = -Rational::one();
            lp.constrain(row, Relation::Le, lower + &self.step).expect("arity");
        }
        if let Some((k, target)) = pinned {
            let mut row = self.coeffs[k].clone();
            row.extend([Rational::zero(), Rational::zero()]);
            lp.constrain(row, Relation::Eq, target.clone()).expect("arity");
        }
        let sol = lp.solve();
        if sol.status != LpStatus::Optimal {
            return None;
        }
        let t = &sol.point[strategies] - &sol.point[strategies + 1];
        t.is_positive().then(|| sol.point[..strategies].to_vec())
    }
}

/// Decides `g ∈ E` directly: some `β` with `⌊N·c_z(β)⌋ = N·g_z` for every
/// `z ∈ Z`. Returns such a `β`.
pub fn rounding_witness(
    space: &StrategySpace,
    weights: &[Rational],
    z: ElementSet,
    n: u64,
    g: &SimpleValuation,
) -> Option<SimplexVector> {
    if !g.support().is_subset(z) || n == 0 {
        return None;
    }
    let points: Vec<usize> = z.iter().collect();
    let coeffs = coefficients(space, weights, &points);
    let cells = Cells {
        coeffs: &coeffs,
        step: Rational::new(BigInt::one(), BigInt::from(n)),
    };
    let mut prefix = Vec::new();
    for &p in &points {
        let scaled = g.weight(p) * Rational::from_integer(BigInt::from(n));
        if !scaled.is_integer() {
            return None;
        }
        prefix.push(scaled.to_integer());
    }
    if points.is_empty() {
        return Some(SimplexVector::vertex(space.len(), 0));
    }
    cells
        .strict_point(&prefix, None)
        .map(|b| SimplexVector::new(b).expect("LP keeps β on the simplex"))
}

struct Search<'a> {
    cells: Cells<'a>,
    points: Vec<usize>,
    n: u64,
    nodes: usize,
    node_cap: usize,
    found: Vec<EPoint>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), PowerdomainError> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(PowerdomainError::Size(format!(
                "more than {} candidate cells while enumerating E",
                self.node_cap
            )));
        }
        Ok(())
    }

    /// `p` lies in the strict cell set of `prefix`.
    fn descend(&mut self, prefix: &mut Vec<BigInt>, p: Vec<Rational>) -> Result<(), PowerdomainError> {
        let k = prefix.len();
        if k == self.points.len() {
            let weights = self
                .points
                .iter()
                .zip(prefix.iter())
                .map(|(&z, m)| (z, self.cells.lower(m)));
            let valuation = SimpleValuation::from_weights(weights)?;
            let beta = SimplexVector::new(p).expect("witness stays on the simplex");
            self.found.push(EPoint { valuation, beta });
            return Ok(());
        }
        let row = &self.cells.coeffs[k];
        let q_lo = self
            .cells
            .extreme(prefix, k, false)
            .expect("closure of a non-empty set");
        let q_hi = self.cells.extreme(prefix, k, true).expect("closure of a non-empty set");
        let (lo, hi, vp) = (dot(row, &q_lo), dot(row, &q_hi), dot(row, &p));
        let two = Rational::from_integer(BigInt::from(2));
        let mut m = floor_scaled(&lo, self.n);
        let last = floor_scaled(&hi, self.n);
        while m <= last {
            self.tick()?;
            let from = self.cells.lower(&m).max(lo.clone());
            let to = (self.cells.lower(&m) + &self.cells.step).min(hi.clone());
            let child = if lo == hi {
                Some(p.clone())
            } else if from < to {
                // move from p towards the optimal vertex on the target's side
                let target = (&from + &to) / &two;
                let (q, end) = if target < vp { (&q_lo, &lo) } else { (&q_hi, &hi) };
                if target == vp {
                    Some(p.clone())
                } else {
                    let lambda = (&target - &vp) / (end - &vp);
                    let keep = Rational::one() - &lambda;
                    Some(p.iter().zip(q).map(|(a, b)| &keep * a + &lambda * b).collect())
                }
            } else {
                // the cell meets the range only at `hi`
                prefix.push(m.clone());
                let beta = self.cells.strict_point(prefix, Some((k, &hi)));
                prefix.pop();
                beta
            };
            if let Some(beta) = child {
                prefix.push(m.clone());
                self.descend(prefix, beta)?;
                prefix.pop();
            }
            m += 1;
        }
        Ok(())
    }
}

/// `E = { round_N(ϖ) | ϖ ∈ E₀ }`, each member paired with a witness `β`.
///
/// `weights[x]` is the coefficient of strategy coordinate `x` (already
/// multiplied by `a`). Members come out in lexicographic order of their
/// coefficient vectors over `z`.
pub fn enumerate_e(
    space: &StrategySpace,
    weights: &[Rational],
    z: ElementSet,
    n: u64,
    node_cap: usize,
) -> Result<Vec<EPoint>, PowerdomainError> {
    if n == 0 {
        return Err(PowerdomainError::Precondition("N must be positive".into()));
    }
    let points: Vec<usize> = z.iter().collect();
    let coeffs = coefficients(space, weights, &points);
    let mut search = Search {
        cells: Cells {
            coeffs: &coeffs,
            step: Rational::new(BigInt::one(), BigInt::from(n)),
        },
        points,
        n,
        nodes: 0,
        node_cap,
        found: Vec::new(),
    };
    let start = SimplexVector::vertex(space.len(), 0).weights().to_vec();
    search.descend(&mut Vec::new(), start)?;
    Ok(search.found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::mixture;
    use crate::rational::{int, ratio};

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn single_strategy_gives_single_point() {
        let space = StrategySpace::new(vec![set(&[0]), set(&[1])]).unwrap();
        let weights = vec![ratio(3, 8), ratio(3, 8)];
        let e = enumerate_e(&space, &weights, set(&[0, 1]), 4, 1000).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(
            e[0].valuation,
            SimpleValuation::from_weights([(0, ratio(1, 4)), (1, ratio(1, 4))]).unwrap()
        );
    }

    #[test]
    fn two_way_choice_matches_hand_count() {
        // one term of weight 1 over B = {0, 1}: c = (β, 1-β); with N = 2 the
        // roundings are (0,1) at β = 0, (0,1/2) for β ∈ (0,1/2),
        // (1/2,1/2) at β = 1/2, (1/2,0) for β ∈ (1/2,1), (1,0) at β = 1.
        let space = StrategySpace::new(vec![set(&[0, 1])]).unwrap();
        let e = enumerate_e(&space, &[int(1)], set(&[0, 1]), 2, 1000).unwrap();
        let got: Vec<_> = e
            .iter()
            .map(|p| (p.valuation.weight(0), p.valuation.weight(1)))
            .collect();
        assert_eq!(
            got,
            vec![
                (int(0), ratio(1, 2)),
                (int(0), int(1)),
                (ratio(1, 2), int(0)),
                (ratio(1, 2), ratio(1, 2)),
                (int(1), int(0)),
            ]
        );
        for p in &e {
            let w = mixture(&space, &[int(1)], &p.beta);
            assert_eq!(w.rounded_down(2).unwrap(), p.valuation);
        }
    }

    #[test]
    fn direct_membership_agrees() {
        let space = StrategySpace::new(vec![set(&[0, 1])]).unwrap();
        let z = set(&[0, 1]);
        let inside = SimpleValuation::from_weights([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        assert!(rounding_witness(&space, &[int(1)], z, 2, &inside).is_some());
        let outside = SimpleValuation::from_weights([(0, ratio(1, 2)), (1, int(1))]).unwrap();
        assert!(rounding_witness(&space, &[int(1)], z, 2, &outside).is_none());
    }

    #[test]
    fn empty_z_gives_zero() {
        let space = StrategySpace::new(vec![]).unwrap();
        let e = enumerate_e(&space, &[], ElementSet::EMPTY, 3, 10).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e[0].valuation.is_zero());
    }

    #[test]
    fn node_cap_is_enforced() {
        let space = StrategySpace::new(vec![set(&[0, 1])]).unwrap();
        let err = enumerate_e(&space, &[int(1)], set(&[0, 1]), 50, 10).unwrap_err();
        assert!(matches!(err, PowerdomainError::Size(_)));
    }
}

//! Exact linear programming.
//!
//! A dense two-phase simplex over [`Rational`] with Bland's rule, so it
//! always terminates. Every solution carries a certificate that
//! [`LpSolution::verify`] re-checks by substitution into the original
//! problem: dual multipliers for an optimum, a Farkas vector for
//! infeasibility, an improving ray for unboundedness.

mod decompose;
mod game;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

pub(crate) use decompose::decompose_on;
pub use decompose::{decompose_capacity, mixture, DecomposeError, Decomposition, SimplexVector, StrategySpace};
pub use game::{matrix_game, max_min_value, min_max_value, GameMatrix, GameSolution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint has {got} coefficients, program has {expected} variables")]
    Arity { expected: usize, got: usize },
    #[error("game matrix is empty or ragged")]
    BadMatrix,
    #[error("max-min value {max_min} differs from min-max value {min_max}")]
    MinimaxMismatch {
        max_min: Box<Rational>,
        min_max: Box<Rational>,
    },
    #[error("solver returned status {0:?} on a problem that is always solvable")]
    Unexpected(LpStatus),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize c·x` subject to the constraints and `x ≥ 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Certificate {
    /// One multiplier per constraint; `Aᵀy ≥ c` with signs matching the
    /// relations, and `b·y` equal to the objective.
    Dual(Vec<Rational>),
    /// `yᵀA ≥ 0` and `yᵀb < 0` with signs matching the relations.
    Farkas(Vec<Rational>),
    /// Direction `d ≥ 0` that keeps the point feasible and strictly improves
    /// the objective.
    Ray(Vec<Rational>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point, or a feasible point when unbounded; empty when
    /// infeasible.
    pub point: Vec<Rational>,
    pub objective: Option<Rational>,
    pub certificate: Certificate,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> Result<&mut Self, LpError> {
        if objective.len() != self.num_vars() {
            return Err(LpError::Arity {
                expected: self.num_vars(),
                got: objective.len(),
            });
        }
        self.objective = objective;
        Ok(self)
    }

    pub fn constrain(
        &mut self,
        coefficients: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<&mut Self, LpError> {
        if coefficients.len() != self.num_vars() {
            return Err(LpError::Arity {
                expected: self.num_vars(),
                got: coefficients.len(),
            });
        }
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        Ok(self)
    }

    pub fn solve(&self) -> LpSolution {
        Tableau::build(self).run(self)
    }

    fn row_value(&self, row: usize, x: &[Rational]) -> Rational {
        self.constraints[row]
            .coefficients
            .iter()
            .zip(x)
            .map(|(a, v)| a * v)
            .sum()
    }

    /// `x ≥ 0` and every constraint holds.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().all(|v| !v.is_negative())
            && (0..self.constraints.len()).all(|i| {
                let lhs = self.row_value(i, x);
                let c = &self.constraints[i];
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Multipliers respect the sign each relation allows: `y ≥ 0` on `≤`
    /// rows, `y ≤ 0` on `≥` rows, free on equalities.
    fn signs_ok(&self, y: &[Rational]) -> bool {
        y.len() == self.constraints.len()
            && self.constraints.iter().zip(y).all(|(c, v)| match c.relation {
                Relation::Le => !v.is_negative(),
                Relation::Ge => !v.is_positive(),
                Relation::Eq => true,
            })
    }

    /// `(yᵀA)_j` for every variable.
    fn combine(&self, y: &[Rational]) -> Vec<Rational> {
        (0..self.num_vars())
            .map(|j| {
                self.constraints
                    .iter()
                    .zip(y)
                    .map(|(c, v)| &c.coefficients[j] * v)
                    .sum()
            })
            .collect()
    }
}

impl LpSolution {
    /// Re-checks the certificate against `lp` in exact arithmetic.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        match (&self.status, &self.certificate) {
            (LpStatus::Optimal, Certificate::Dual(y)) => {
                let Some(value) = &self.objective else {
                    return false;
                };
                lp.is_feasible(&self.point)
                    && lp.signs_ok(y)
                    && lp.combine(y).iter().zip(&lp.objective).all(|(a, c)| a >= c)
                    && lp.objective_at(&self.point) == *value
                    && lp.constraints.iter().zip(y).map(|(c, v)| &c.rhs * v).sum::<Rational>() == *value
            }
            (LpStatus::Infeasible, Certificate::Farkas(y)) => {
                lp.signs_ok(y)
                    && lp.combine(y).iter().all(|a| !a.is_negative())
                    && lp
                        .constraints
                        .iter()
                        .zip(y)
                        .map(|(c, v)| &c.rhs * v)
                        .sum::<Rational>()
                        .is_negative()
            }
            (LpStatus::Unbounded, Certificate::Ray(d)) => {
                lp.is_feasible(&self.point)
                    && d.len() == lp.num_vars()
                    && d.iter().all(|v| !v.is_negative())
                    && lp.objective_at(d).is_positive()
                    && (0..lp.constraints.len()).all(|i| {
                        let s = lp.row_value(i, d);
                        match lp.constraints[i].relation {
                            Relation::Le => !s.is_positive(),
                            Relation::Ge => !s.is_negative(),
                            Relation::Eq => s.is_zero(),
                        }
                    })
            }
            _ => false,
        }
    }
}

/// Dense tableau `[Ā | slacks | artificials | b̄]` with one artificial per
/// row. The artificial columns always hold `B⁻¹`, which is where the dual
/// multipliers are read from.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// +1 or -1 per row: rows with negative right-hand side are negated.
    flip: Vec<bool>,
    num_vars: usize,
    num_slacks: usize,
    width: usize,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.constraints.len();
        let n = lp.num_vars();
        let num_slacks = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let width = n + num_slacks + m;
        let mut rows = Vec::with_capacity(m);
        let mut flip = Vec::with_capacity(m);
        let mut slack = n;
        for (i, c) in lp.constraints.iter().enumerate() {
            let negate = c.rhs.is_negative();
            let sign = |v: Rational| if negate { -v } else { v };
            let mut row = vec![Rational::zero(); width + 1];
            for (j, a) in c.coefficients.iter().enumerate() {
                row[j] = sign(a.clone());
            }
            match c.relation {
                Relation::Le => {
                    row[slack] = sign(Rational::one());
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = sign(-Rational::one());
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[n + num_slacks + i] = Rational::one();
            row[width] = sign(c.rhs.clone());
            rows.push(row);
            flip.push(negate);
        }
        Tableau {
            rows,
            basis: (0..m).map(|i| n + num_slacks + i).collect(),
            flip,
            num_vars: n,
            num_slacks,
            width,
        }
    }

    fn first_artificial(&self) -> usize {
        self.num_vars + self.num_slacks
    }

    fn pivot(&mut self, objective: &mut [Rational], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !objective[c].is_zero() {
            let f = objective[c].clone();
            for (v, pv) in objective.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for column costs `costs`; the last entry is
    /// `-(c_B · b̄)`.
    fn reduced_costs(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = costs.to_vec();
        obj.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                *o -= cb * v;
            }
        }
        obj
    }

    /// Primal simplex with Bland's rule over columns `< allowed`.
    fn iterate(&mut self, objective: &mut [Rational], allowed: usize) -> Outcome {
        loop {
            let Some(c) = (0..allowed).find(|&j| objective[j].is_positive()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.width] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(objective, r, c),
                None => return Outcome::Unbounded(c),
            }
        }
    }

    fn point(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.num_vars {
                x[b] = row[self.width].clone();
            }
        }
        x
    }

    /// Multipliers in terms of the original (unflipped) rows, read from the
    /// reduced costs of the artificial columns.
    fn duals(&self, objective: &[Rational], artificial_cost: &Rational) -> Vec<Rational> {
        let a0 = self.first_artificial();
        (0..self.rows.len())
            .map(|i| {
                let w = artificial_cost - &objective[a0 + i];
                if self.flip[i] {
                    -w
                } else {
                    w
                }
            })
            .collect()
    }

    fn run(mut self, lp: &LinearProgram) -> LpSolution {
        let a0 = self.first_artificial();
        // Phase 1: maximize -Σ artificials.
        let mut costs = vec![Rational::zero(); self.width];
        for c in costs.iter_mut().skip(a0) {
            *c = -Rational::one();
        }
        let mut objective = self.reduced_costs(&costs);
        match self.iterate(&mut objective, self.width) {
            Outcome::Optimal => {}
            Outcome::Unbounded(_) => unreachable!("phase one is bounded above by zero"),
        }
        if !objective[self.width].is_zero() {
            return LpSolution {
                status: LpStatus::Infeasible,
                point: Vec::new(),
                objective: None,
                certificate: Certificate::Farkas(self.duals(&objective, &-Rational::one())),
            };
        }
        // Drive zero-level artificials out of the basis where possible; rows
        // where that fails are redundant and stay inert.
        for r in 0..self.rows.len() {
            if self.basis[r] >= a0 {
                if let Some(c) = (0..a0).find(|&j| !self.rows[r][j].is_zero()) {
                    self.pivot(&mut objective, r, c);
                }
            }
        }
        // Phase 2.
        let mut costs = vec![Rational::zero(); self.width];
        costs[..self.num_vars].clone_from_slice(&lp.objective);
        let mut objective = self.reduced_costs(&costs);
        match self.iterate(&mut objective, a0) {
            Outcome::Optimal => {
                let point = self.point();
                let value = lp.objective_at(&point);
                LpSolution {
                    status: LpStatus::Optimal,
                    point,
                    objective: Some(value),
                    certificate: Certificate::Dual(self.duals(&objective, &Rational::zero())),
                }
            }
            Outcome::Unbounded(c) => {
                let mut direction = vec![Rational::zero(); self.num_vars];
                if c < self.num_vars {
                    direction[c] = Rational::one();
                }
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    if b < self.num_vars {
                        direction[b] = -row[c].clone();
                    }
                }
                LpSolution {
                    status: LpStatus::Unbounded,
                    point: self.point(),
                    objective: None,
                    certificate: Certificate::Ray(direction),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn one_var(constraints: &[(Relation, i64)]) -> LinearProgram {
        let mut lp = LinearProgram::new(1);
        lp.maximize(vec![int(1)]).unwrap();
        for &(rel, rhs) in constraints {
            lp.constrain(vec![int(1)], rel, int(rhs)).unwrap();
        }
        lp
    }

    #[test]
    fn bounded_optimum() {
        let lp = one_var(&[(Relation::Le, 1), (Relation::Ge, 0)]);
        let sol = lp.solve();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.point, vec![int(1)]);
        assert!(sol.verify(&lp));
    }

    #[test]
    fn infeasible() {
        let lp = one_var(&[(Relation::Le, 1), (Relation::Ge, 2)]);
        let sol = lp.solve();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.verify(&lp));
    }

    #[test]
    fn unbounded() {
        let lp = one_var(&[(Relation::Ge, 0)]);
        let sol = lp.solve();
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert!(sol.verify(&lp));
    }

    #[test]
    fn textbook_two_variable_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36
        let mut lp = LinearProgram::new(2);
        lp.maximize(vec![int(3), int(5)]).unwrap();
        lp.constrain(vec![int(1), int(0)], Relation::Le, int(4)).unwrap();
        lp.constrain(vec![int(0), int(2)], Relation::Le, int(12)).unwrap();
        lp.constrain(vec![int(3), int(2)], Relation::Le, int(18)).unwrap();
        let sol = lp.solve();
        assert_eq!(sol.point, vec![int(2), int(6)]);
        assert_eq!(sol.objective, Some(int(36)));
        assert!(sol.verify(&lp));
    }

    #[test]
    fn negative_rhs_and_equalities() {
        // max -x - y, x + y = 3/2, -x ≤ -1/2
        let mut lp = LinearProgram::new(2);
        lp.maximize(vec![int(-1), int(-1)]).unwrap();
        lp.constrain(vec![int(1), int(1)], Relation::Eq, ratio(3, 2)).unwrap();
        lp.constrain(vec![int(-1), int(0)], Relation::Le, ratio(-1, 2)).unwrap();
        let sol = lp.solve();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, Some(ratio(-3, 2)));
        assert!(sol.verify(&lp));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.maximize(vec![int(1), int(0)]).unwrap();
        lp.constrain(vec![int(1), int(1)], Relation::Eq, int(1)).unwrap();
        lp.constrain(vec![int(2), int(2)], Relation::Eq, int(2)).unwrap();
        let sol = lp.solve();
        assert_eq!(sol.objective, Some(int(1)));
        assert!(sol.verify(&lp));
    }

    #[test]
    fn arity_is_checked() {
        let mut lp = LinearProgram::new(2);
        assert!(lp.constrain(vec![int(1)], Relation::Le, int(0)).is_err());
        assert!(lp.maximize(vec![]).is_err());
    }
}

//! Two-player zero-sum matrix games.
//!
//! The row player picks a mixed strategy `β ∈ Δ_rows` and maximizes
//! `βᵀMα`; the column player picks `α ∈ Δ_cols` and minimizes it. Both
//! sides are solved as separate linear programs and the two values are
//! required to agree exactly.

use num_traits::{One, Zero};

use super::{LinearProgram, LpError, LpStatus, Relation};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GameMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl GameMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, LpError> {
        let cols = rows.first().map_or(0, Vec::len);
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(LpError::BadMatrix);
        }
        Ok(GameMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    /// `βᵀMα`
    pub fn payoff(&self, beta: &[Rational], alpha: &[Rational]) -> Rational {
        let mut total = Rational::zero();
        for (i, b) in beta.iter().enumerate() {
            for (j, a) in alpha.iter().enumerate() {
                total += b * a * self.get(i, j);
            }
        }
        total
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GameSolution {
    pub value: Rational,
    /// Maximizer's mixed strategy over rows.
    pub row_strategy: Vec<Rational>,
    /// Minimizer's mixed strategy over columns.
    pub col_strategy: Vec<Rational>,
}

impl GameSolution {
    /// Both strategies are distributions, the row strategy guarantees at
    /// least `value` against every column, and the column strategy concedes
    /// at most `value` against every row.
    pub fn verify(&self, m: &GameMatrix) -> bool {
        let is_distribution = |v: &[Rational], len: usize| {
            v.len() == len && v.iter().all(|p| *p >= Rational::zero()) && v.iter().sum::<Rational>().is_one()
        };
        if !is_distribution(&self.row_strategy, m.rows) || !is_distribution(&self.col_strategy, m.cols) {
            return false;
        }
        let row_guarantee = (0..m.cols)
            .map(|j| {
                (0..m.rows)
                    .map(|i| &self.row_strategy[i] * m.get(i, j))
                    .sum::<Rational>()
            })
            .min()
            .expect("non-empty");
        let col_concession = (0..m.rows)
            .map(|i| {
                (0..m.cols)
                    .map(|j| &self.col_strategy[j] * m.get(i, j))
                    .sum::<Rational>()
            })
            .max()
            .expect("non-empty");
        row_guarantee == self.value && col_concession == self.value
    }
}

/// `max_β min_α βᵀMα` and the maximizing `β`.
pub fn max_min_value(m: &GameMatrix) -> Result<(Rational, Vec<Rational>), LpError> {
    // variables: β_0..β_{r-1}, v⁺, v⁻
    let r = m.rows;
    let mut lp = LinearProgram::new(r + 2);
    let mut objective = vec![Rational::zero(); r + 2];
    objective[r] = Rational::one();
    objective[r + 1] = -Rational::one();
    lp.maximize(objective)?;
    for j in 0..m.cols {
        let mut row: Vec<Rational> = (0..r).map(|i| m.get(i, j).clone()).collect();
        row.push(-Rational::one());
        row.push(Rational::one());
        lp.constrain(row, Relation::Ge, Rational::zero())?;
    }
    let mut simplex: Vec<Rational> = vec![Rational::one(); r];
    simplex.extend([Rational::zero(), Rational::zero()]);
    lp.constrain(simplex, Relation::Eq, Rational::one())?;
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(LpError::Unexpected(sol.status));
    }
    let value = &sol.point[r] - &sol.point[r + 1];
    Ok((value, sol.point[..r].to_vec()))
}

/// `min_α max_β βᵀMα` and the minimizing `α`.
pub fn min_max_value(m: &GameMatrix) -> Result<(Rational, Vec<Rational>), LpError> {
    // variables: α_0..α_{c-1}, w⁺, w⁻; maximize -(w⁺ - w⁻)
    let c = m.cols;
    let mut lp = LinearProgram::new(c + 2);
    let mut objective = vec![Rational::zero(); c + 2];
    objective[c] = -Rational::one();
    objective[c + 1] = Rational::one();
    lp.maximize(objective)?;
    for i in 0..m.rows {
        let mut row: Vec<Rational> = (0..c).map(|j| m.get(i, j).clone()).collect();
        row.push(-Rational::one());
        row.push(Rational::one());
        lp.constrain(row, Relation::Le, Rational::zero())?;
    }
    let mut simplex: Vec<Rational> = vec![Rational::one(); c];
    simplex.extend([Rational::zero(), Rational::zero()]);
    lp.constrain(simplex, Relation::Eq, Rational::one())?;
    let sol = lp.solve();
    if sol.status != LpStatus::Optimal {
        return Err(LpError::Unexpected(sol.status));
    }
    let value = &sol.point[c] - &sol.point[c + 1];
    Ok((value, sol.point[..c].to_vec()))
}

/// Solves both sides and insists on the minimax equality.
pub fn matrix_game(m: &GameMatrix) -> Result<GameSolution, LpError> {
    let (max_min, row_strategy) = max_min_value(m)?;
    let (min_max, col_strategy) = min_max_value(m)?;
    if max_min != min_max {
        return Err(LpError::MinimaxMismatch {
            max_min: Box::new(max_min),
            min_max: Box::new(min_max),
        });
    }
    Ok(GameSolution {
        value: max_min,
        row_strategy,
        col_strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn matching_pennies() {
        let m = GameMatrix::new(vec![vec![int(1), int(-1)], vec![int(-1), int(1)]]).unwrap();
        let s = matrix_game(&m).unwrap();
        assert_eq!(s.value, int(0));
        assert_eq!(s.row_strategy, vec![ratio(1, 2), ratio(1, 2)]);
        assert!(s.verify(&m));
    }

    #[test]
    fn one_by_one() {
        let m = GameMatrix::new(vec![vec![ratio(-7, 3)]]).unwrap();
        let s = matrix_game(&m).unwrap();
        assert_eq!(s.value, ratio(-7, 3));
        assert_eq!(s.row_strategy, vec![int(1)]);
        assert_eq!(s.col_strategy, vec![int(1)]);
    }

    #[test]
    fn saddle_point() {
        // row 1 dominates; column 0 is the minimizer's best reply
        let m = GameMatrix::new(vec![vec![int(1), int(4)], vec![int(2), int(3)]]).unwrap();
        let s = matrix_game(&m).unwrap();
        assert_eq!(s.value, int(2));
        assert!(s.verify(&m));
    }

    #[test]
    fn rejects_ragged() {
        assert_eq!(GameMatrix::new(vec![]), Err(LpError::BadMatrix));
        assert_eq!(
            GameMatrix::new(vec![vec![int(1)], vec![int(1), int(2)]]),
            Err(LpError::BadMatrix)
        );
    }
}

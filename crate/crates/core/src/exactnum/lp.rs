//! Two-phase dense simplex over exact rationals with Bland's rule.
//!
//! Problems are `minimize cᵀx  s.t.  A x = b`, with `x_j ≥ 0` wherever the
//! nonnegativity mask is set and `x_j` free elsewhere. Every outcome carries
//! an exact certificate that [`LpOutcome::verify`] can replay:
//!
//! * `Optimal`: primal `x*` and dual `y*` with `Aᵀy* ≤ c` on masked columns,
//!   `Aᵀy* = c` on free columns and `cᵀx* = bᵀy*`.
//! * `Infeasible`: a Farkas vector `y` with `yᵀA ≤ 0` on masked columns,
//!   `yᵀA = 0` on free columns and `yᵀb > 0`.
//! * `Unbounded`: a feasible `x` and a ray `d` with `A d = 0`, `d ≥ 0` on
//!   masked columns and `cᵀd < 0`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::mat::QMat;
use crate::exactnum::rational::{dot, QVec, Rational};

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: QVec,
    pub a: QMat,
    pub b: QVec,
    pub nonneg: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Optimal point, or a feasible point when unbounded.
    pub primal: Option<QVec>,
    pub dual: Option<QVec>,
    pub farkas: Option<QVec>,
    pub ray: Option<QVec>,
    pub objective_value: Option<Rational>,
}

impl LpProblem {
    pub fn new(objective: QVec, a: QMat, b: QVec, nonneg: Vec<bool>) -> Result<Self> {
        let p = LpProblem { objective, a, b, nonneg };
        p.check()?;
        Ok(p)
    }

    /// Pure feasibility problem with all variables nonnegative.
    pub fn feasibility(a: QMat, b: QVec) -> Result<Self> {
        let n = a.cols();
        Self::new(vec![Rational::zero(); n], a, b, vec![true; n])
    }

    fn check(&self) -> Result<()> {
        let (m, n) = self.a.shape();
        if self.b.len() != m {
            return Err(Error::Dimension(format!("A has {m} rows but b has {} entries", self.b.len())));
        }
        if self.objective.len() != n || self.nonneg.len() != n {
            return Err(Error::Dimension(format!(
                "A has {n} columns; objective has {}, mask has {}",
                self.objective.len(),
                self.nonneg.len()
            )));
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.a.cols()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.rows()
    }
}

struct Tableau {
    /// m rows of `[structural | artificial | rhs]`.
    t: QMat,
    basis: Vec<usize>,
    n_struct: usize,
}

enum PivotEnd {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.t.cols() - 1
    }

    fn pivot(&mut self, cost: &mut [Rational], row: usize, col: usize) {
        let cols = self.t.cols();
        let inv = self.t[(row, col)].recip();
        for j in 0..cols {
            if !self.t[(row, j)].is_zero() {
                self.t[(row, j)] = &self.t[(row, j)] * &inv;
            }
        }
        for i in 0..self.t.rows() {
            if i == row || self.t[(i, col)].is_zero() {
                continue;
            }
            let f = self.t[(i, col)].clone();
            for j in 0..cols {
                if !self.t[(row, j)].is_zero() {
                    let delta = &f * &self.t[(row, j)];
                    self.t[(i, j)] = &self.t[(i, j)] - &delta;
                }
            }
        }
        if !cost[col].is_zero() {
            let f = cost[col].clone();
            for j in 0..cols {
                if !self.t[(row, j)].is_zero() {
                    let delta = &f * &self.t[(row, j)];
                    cost[j] = &cost[j] - &delta;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations with Bland's rule; `cost` holds reduced costs
    /// with the negated objective value in the last slot.
    fn run(&mut self, cost: &mut [Rational], allowed: usize) -> PivotEnd {
        let rhs = self.rhs_col();
        loop {
            let Some(enter) = (0..allowed).find(|&j| cost[j].is_negative()) else {
                return PivotEnd::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.rows() {
                let a = &self.t[(i, enter)];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[(i, rhs)] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return PivotEnd::Unbounded(enter),
                Some((row, _)) => self.pivot(cost, row, enter),
            }
        }
    }

    fn reduced_costs(&self, col_cost: &[Rational]) -> Vec<Rational> {
        let mut cost = col_cost.to_vec();
        cost.push(Rational::zero());
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = &col_cost[bv];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.t.cols() {
                if !self.t[(i, j)].is_zero() {
                    let delta = cb * &self.t[(i, j)];
                    cost[j] = &cost[j] - &delta;
                }
            }
        }
        cost
    }

    /// `c_Bᵀ B⁻¹`, read off the artificial columns.
    fn simplex_multipliers(&self, col_cost: &[Rational]) -> QVec {
        let m = self.t.rows();
        (0..m)
            .map(|r| {
                self.basis
                    .iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (k, &bv)| acc + &col_cost[bv] * &self.t[(k, self.n_struct + r)])
            })
            .collect()
    }

    fn basic_solution(&self) -> QVec {
        let mut x = vec![Rational::zero(); self.n_struct];
        let rhs = self.rhs_col();
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.n_struct {
                x[bv] = self.t[(i, rhs)].clone();
            }
        }
        x
    }
}

/// Maps original variables to standard-form columns (free variables split).
struct ColumnMap {
    plus: Vec<usize>,
    minus: Vec<Option<usize>>,
    n_struct: usize,
}

impl ColumnMap {
    fn new(nonneg: &[bool]) -> Self {
        let mut plus = Vec::with_capacity(nonneg.len());
        let mut minus = Vec::with_capacity(nonneg.len());
        let mut next = 0;
        for &nn in nonneg {
            plus.push(next);
            next += 1;
            if nn {
                minus.push(None);
            } else {
                minus.push(Some(next));
                next += 1;
            }
        }
        ColumnMap { plus, minus, n_struct: next }
    }

    fn recover(&self, x: &[Rational]) -> QVec {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(&p, m)| match m {
                Some(m) => &x[p] - &x[*m],
                None => x[p].clone(),
            })
            .collect()
    }
}

/// Solves the problem exactly. The returned certificate has already been
/// replayed by [`LpOutcome::verify`].
pub fn lp_solve(p: &LpProblem) -> Result<LpOutcome> {
    p.check()?;
    let (m, n) = p.a.shape();
    let cmap = ColumnMap::new(&p.nonneg);
    let ns = cmap.n_struct;
    let signs: Vec<bool> = p.b.iter().map(|v| v.is_negative()).collect();

    let mut t = QMat::zeros(m, ns + m + 1);
    for i in 0..m {
        let flip = |v: &Rational| if signs[i] { -v.clone() } else { v.clone() };
        for j in 0..n {
            let a = &p.a[(i, j)];
            if a.is_zero() {
                continue;
            }
            t[(i, cmap.plus[j])] = flip(a);
            if let Some(mj) = cmap.minus[j] {
                t[(i, mj)] = -flip(a);
            }
        }
        t[(i, ns + i)] = Rational::one();
        t[(i, ns + m)] = flip(&p.b[i]);
    }
    let mut tab = Tableau { t, basis: (ns..ns + m).collect(), n_struct: ns };

    // Phase I: minimize the sum of artificials.
    let mut phase1_cost = vec![Rational::zero(); ns + m];
    for c in phase1_cost.iter_mut().skip(ns) {
        *c = Rational::one();
    }
    let mut cost = tab.reduced_costs(&phase1_cost);
    let _ = tab.run(&mut cost, ns + m);
    let phase1_value = -cost[ns + m].clone();
    let unflip = |y: QVec| -> QVec { y.into_iter().zip(&signs).map(|(v, &s)| if s { -v } else { v }).collect() };

    if phase1_value.is_positive() {
        let y = unflip(tab.simplex_multipliers(&phase1_cost));
        // Phase I maximizes bᵀy with Aᵀy ≤ 0; our convention wants yᵀb > 0.
        let outcome = LpOutcome {
            status: LpStatus::Infeasible,
            primal: None,
            dual: None,
            farkas: Some(y),
            ray: None,
            objective_value: None,
        };
        return finish(p, outcome);
    }

    // Drive zero-level artificials out of the basis where possible.
    for i in 0..m {
        if tab.basis[i] < ns {
            continue;
        }
        if let Some(j) = (0..ns).find(|&j| !tab.t[(i, j)].is_zero()) {
            let mut dummy = vec![Rational::zero(); ns + m + 1];
            tab.pivot(&mut dummy, i, j);
        }
    }

    // Phase II.
    let mut col_cost = vec![Rational::zero(); ns + m];
    for j in 0..n {
        col_cost[cmap.plus[j]] = p.objective[j].clone();
        if let Some(mj) = cmap.minus[j] {
            col_cost[mj] = -p.objective[j].clone();
        }
    }
    let mut cost = tab.reduced_costs(&col_cost);
    let end = tab.run(&mut cost, ns);
    let x = cmap.recover(&tab.basic_solution());
    let outcome = match end {
        PivotEnd::Optimal => {
            let y = unflip(tab.simplex_multipliers(&col_cost));
            let value = dot(&p.objective, &x);
            LpOutcome {
                status: LpStatus::Optimal,
                primal: Some(x),
                dual: Some(y),
                farkas: None,
                ray: None,
                objective_value: Some(value),
            }
        }
        PivotEnd::Unbounded(enter) => {
            let mut d = vec![Rational::zero(); ns];
            d[enter] = Rational::one();
            for (i, &bv) in tab.basis.iter().enumerate() {
                if bv < ns {
                    d[bv] = -tab.t[(i, enter)].clone();
                }
            }
            LpOutcome {
                status: LpStatus::Unbounded,
                primal: Some(x),
                dual: None,
                farkas: None,
                ray: Some(cmap.recover(&d)),
                objective_value: None,
            }
        }
    };
    finish(p, outcome)
}

fn finish(p: &LpProblem, outcome: LpOutcome) -> Result<LpOutcome> {
    if outcome.verify(p) {
        Ok(outcome)
    } else {
        Err(Error::Internal(format!("LP certificate failed exact replay ({:?})", outcome.status)))
    }
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == LpStatus::Infeasible
    }

    /// Replays the attached certificate with exact arithmetic.
    pub fn verify(&self, p: &LpProblem) -> bool {
        let (m, n) = p.a.shape();
        let primal_feasible = |x: &QVec| -> bool {
            x.len() == n
                && x.iter().zip(&p.nonneg).all(|(v, &nn)| !nn || !v.is_negative())
                && p.a.mul_vec(x).map(|ax| ax == p.b).unwrap_or(false)
        };
        let y_times_a = |y: &QVec| -> Option<QVec> {
            if y.len() != m {
                return None;
            }
            p.a.vec_mul(y).ok()
        };
        match self.status {
            LpStatus::Optimal => {
                let (Some(x), Some(y)) = (&self.primal, &self.dual) else { return false };
                if !primal_feasible(x) {
                    return false;
                }
                let Some(aty) = y_times_a(y) else { return false };
                let dual_feasible = aty.iter().zip(&p.objective).zip(&p.nonneg).all(|((a, c), &nn)| if nn { a <= c } else { a == c });
                let primal_value = dot(&p.objective, x);
                dual_feasible
                    && primal_value == dot(&p.b, y)
                    && self.objective_value.as_ref().is_none_or(|v| *v == primal_value)
            }
            LpStatus::Infeasible => {
                let Some(y) = &self.farkas else { return false };
                let Some(aty) = y_times_a(y) else { return false };
                aty.iter().zip(&p.nonneg).all(|(a, &nn)| if nn { !a.is_positive() } else { a.is_zero() })
                    && dot(y, &p.b).is_positive()
            }
            LpStatus::Unbounded => {
                let (Some(x), Some(d)) = (&self.primal, &self.ray) else { return false };
                primal_feasible(x)
                    && d.len() == n
                    && d.iter().zip(&p.nonneg).all(|(v, &nn)| !nn || !v.is_negative())
                    && p.a.mul_vec(d).map(|ad| ad.iter().all(Zero::is_zero)).unwrap_or(false)
                    && dot(&p.objective, d).is_negative()
            }
        }
    }
}

/// Decides whether `target` is a nonnegative combination of `generators`.
/// Returns the coefficients on success, or a functional `f` with
/// `f·gᵢ ≥ 0` for all generators and `f·target < 0`.
pub fn conic_combination(generators: &[QVec], target: &[Rational]) -> Result<std::result::Result<QVec, QVec>> {
    let dim = target.len();
    if generators.iter().any(|g| g.len() != dim) {
        return Err(Error::Dimension("generator length differs from target".into()));
    }
    let a = if generators.is_empty() {
        QMat::zeros(dim, 0)
    } else {
        QMat::from_cols(generators)?
    };
    let outcome = lp_solve(&LpProblem::feasibility(a, target.to_vec())?)?;
    match outcome.status {
        LpStatus::Optimal => Ok(Ok(outcome.primal.expect("optimal outcome has primal"))),
        LpStatus::Infeasible => {
            let y = outcome.farkas.expect("infeasible outcome has Farkas vector");
            Ok(Err(y.into_iter().map(|v| -v).collect()))
        }
        LpStatus::Unbounded => Err(Error::Internal("feasibility LP reported unbounded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::{int, qvec, rat};

    #[test]
    fn single_variable_optimal() {
        let p = LpProblem::new(qvec(&[1]), QMat::from_ints(&[&[1]]), qvec(&[1]), vec![true]).unwrap();
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.primal.unwrap(), qvec(&[1]));
        assert_eq!(out.objective_value.unwrap(), int(1));
    }

    #[test]
    fn single_variable_infeasible() {
        let p = LpProblem::new(qvec(&[0]), QMat::from_ints(&[&[1]]), qvec(&[-1]), vec![true]).unwrap();
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.status, LpStatus::Infeasible);
        let y = out.farkas.unwrap();
        assert_eq!(y, qvec(&[-1]));
        assert_eq!(dot(&y, &p.b), int(1));
    }

    #[test]
    fn unbounded_detected() {
        // minimize -x subject to x - y = 0, x, y >= 0.
        let p = LpProblem::new(qvec(&[-1, 0]), QMat::from_ints(&[&[1, -1]]), qvec(&[0]), vec![true, true]).unwrap();
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_duals() {
        // minimize x + 2y with x + y = 3, x - y free difference, y >= 0, x free.
        let p = LpProblem::new(qvec(&[1, 2]), QMat::from_ints(&[&[1, 1]]), qvec(&[3]), vec![false, true]).unwrap();
        let out = lp_solve(&p).unwrap();
        assert!(out.is_optimal());
        assert_eq!(out.objective_value.clone().unwrap(), int(3));
        assert!(out.verify(&p));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = QMat::from_ints(&[&[1, 1, 0], &[2, 2, 0], &[0, 0, 1]]);
        let p = LpProblem::new(qvec(&[1, 3, 1]), a, qvec(&[2, 4, 5]), vec![true; 3]).unwrap();
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.objective_value.unwrap(), int(7));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // A classic cycling example for the largest-coefficient rule.
        let a = QMat::from_rows(vec![
            vec![rat(1, 4), int(-8), int(-1), int(9), int(1), int(0), int(0)],
            vec![rat(1, 2), int(-12), rat(-1, 2), int(3), int(0), int(1), int(0)],
            vec![int(0), int(0), int(1), int(0), int(0), int(0), int(1)],
        ])
        .unwrap();
        let c = vec![rat(-3, 4), int(20), rat(-1, 2), int(6), int(0), int(0), int(0)];
        let p = LpProblem::new(c, a, qvec(&[0, 0, 1]), vec![true; 7]).unwrap();
        let out = lp_solve(&p).unwrap();
        assert_eq!(out.objective_value.unwrap(), rat(-5, 4));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(LpProblem::new(qvec(&[1]), QMat::from_ints(&[&[1, 2]]), qvec(&[1]), vec![true]).is_err());
    }

    #[test]
    fn conic_combination_both_ways() {
        let gens = vec![qvec(&[1, 0]), qvec(&[0, 1])];
        let inside = conic_combination(&gens, &qvec(&[2, 3])).unwrap().unwrap();
        assert_eq!(inside, qvec(&[2, 3]));
        let sep = conic_combination(&gens, &qvec(&[-1, 1])).unwrap().unwrap_err();
        assert!(gens.iter().all(|g| !dot(&sep, g).is_negative()));
        assert!(dot(&sep, &qvec(&[-1, 1])).is_negative());
    }
}

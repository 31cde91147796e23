//! Dense two-phase primal simplex with variable upper bounds and Bland's
//! rule, generic over the floating-point type.

use num_traits::Float;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<F> {
    /// Sparse row: `(variable, coefficient)`.
    pub coeffs: Vec<(usize, F)>,
    pub relation: Relation,
    pub rhs: F,
}

/// `minimize c·x  s.t.  constraints,  0 ≤ x ≤ upper` (upper may be infinite).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<F> {
    pub objective: Vec<F>,
    pub upper: Vec<F>,
    pub constraints: Vec<Constraint<F>>,
}

impl<F: Float> LinearProgram<F> {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { objective: vec![F::zero(); num_vars], upper: vec![F::infinity(); num_vars], constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<(usize, F)>, relation: Relation, rhs: F) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<F> {
    pub x: Vec<F>,
    pub objective: F,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SimplexError {
    #[error("infeasible: phase-one optimum {0:e}")]
    Infeasible(f64),
    #[error("objective is unbounded below")]
    Unbounded,
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Basic,
    Lower,
    Upper,
}

pub const PIVOT_TOLERANCE: f64 = 1e-9;
pub const FEASIBILITY_TOLERANCE: f64 = 1e-7;

struct Tableau<F> {
    rows: Vec<Vec<F>>,
    reduced: Vec<F>,
    basis: Vec<usize>,
    status: Vec<Status>,
    value: Vec<F>,
    upper: Vec<F>,
    iterations: usize,
    limit: usize,
}

impl<F: Float> Tableau<F> {
    fn price(&mut self, cost: &[F]) {
        let mut d = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != F::zero() {
                for (dj, &t) in d.iter_mut().zip(&self.rows[r]) {
                    *dj = *dj - cb * t;
                }
            }
        }
        self.reduced = d;
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j];
        for t in self.rows[r].iter_mut() {
            *t = *t / p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            let f = row[j];
            if i != r && f != F::zero() {
                for (t, &pr) in row.iter_mut().zip(&pivot_row) {
                    *t = *t - f * pr;
                }
            }
        }
        let f = self.reduced[j];
        if f != F::zero() {
            for (t, &pr) in self.reduced.iter_mut().zip(&pivot_row) {
                *t = *t - f * pr;
            }
        }
    }

    /// Runs simplex iterations on the current cost row; `enterable` masks
    /// columns allowed to enter.
    fn optimize(&mut self, enterable: &[bool]) -> Result<(), SimplexError> {
        let tol = F::from(PIVOT_TOLERANCE).unwrap();
        loop {
            if self.iterations >= self.limit {
                return Err(SimplexError::IterationLimit(self.limit));
            }
            // Bland: lowest-index improving column
            let entering = (0..self.reduced.len()).find(|&j| {
                enterable[j]
                    && match self.status[j] {
                        Status::Lower => self.reduced[j] < -tol && self.upper[j] > F::zero(),
                        Status::Upper => self.reduced[j] > tol,
                        Status::Basic => false,
                    }
            });
            let Some(j) = entering else { return Ok(()) };
            self.iterations += 1;
            let dir = if self.status[j] == Status::Lower { F::one() } else { -F::one() };

            // step t ≥ 0 moves x_j by dir·t and basic i by −dir·t·T_ij
            let mut best_t = self.upper[j];
            let mut leave: Option<(usize, Status)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let alpha = dir * row[j];
                let b = self.basis[r];
                let (t, to) = if alpha > tol {
                    (self.value[b] / alpha, Status::Lower)
                } else if alpha < -tol && self.upper[b].is_finite() {
                    ((self.upper[b] - self.value[b]) / -alpha, Status::Upper)
                } else {
                    continue;
                };
                let t = t.max(F::zero());
                let better = t < best_t || (t == best_t && leave.is_some_and(|(lr, _)| b < self.basis[lr]));
                if better {
                    best_t = t;
                    leave = Some((r, to));
                }
            }
            if best_t.is_infinite() {
                return Err(SimplexError::Unbounded);
            }
            let t = best_t;
            for (r, row) in self.rows.iter().enumerate() {
                let b = self.basis[r];
                self.value[b] = self.value[b] - dir * t * row[j];
            }
            self.value[j] = self.value[j] + dir * t;
            match leave {
                None => {
                    // bound flip
                    self.status[j] = if self.status[j] == Status::Lower { Status::Upper } else { Status::Lower };
                    self.value[j] = if self.status[j] == Status::Upper { self.upper[j] } else { F::zero() };
                }
                Some((r, to)) => {
                    let b = self.basis[r];
                    self.status[b] = to;
                    self.value[b] = if to == Status::Upper { self.upper[b] } else { F::zero() };
                    self.status[j] = Status::Basic;
                    self.basis[r] = j;
                    self.pivot(r, j);
                }
            }
        }
    }
}

pub fn solve<F: Float>(lp: &LinearProgram<F>) -> Result<LpSolution<F>, SimplexError> {
    let n = lp.num_vars();
    let m = lp.constraints.len();
    let slack_count = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let total = n + slack_count + m;
    let art0 = n + slack_count;

    let mut rows = vec![vec![F::zero(); total]; m];
    let mut upper = lp.upper.clone();
    upper.resize(art0, F::infinity());
    upper.resize(total, F::infinity());
    let mut value = vec![F::zero(); total];
    let mut slack = n;
    for (i, c) in lp.constraints.iter().enumerate() {
        let sign = if c.rhs < F::zero() { -F::one() } else { F::one() };
        for &(j, a) in &c.coeffs {
            rows[i][j] = rows[i][j] + sign * a;
        }
        match c.relation {
            Relation::Le => {
                rows[i][slack] = sign;
                slack += 1;
            }
            Relation::Ge => {
                rows[i][slack] = -sign;
                slack += 1;
            }
            Relation::Eq => {}
        }
        rows[i][art0 + i] = F::one();
        value[art0 + i] = sign * c.rhs;
    }
    let mut status = vec![Status::Lower; total];
    for s in status.iter_mut().skip(art0) {
        *s = Status::Basic;
    }
    let mut tab = Tableau {
        rows,
        reduced: Vec::new(),
        basis: (art0..total).collect(),
        status,
        value,
        upper,
        iterations: 0,
        limit: 50 * (total + m) + 1000,
    };

    let mut phase1 = vec![F::zero(); total];
    for c in phase1.iter_mut().skip(art0) {
        *c = F::one();
    }
    tab.price(&phase1);
    tab.optimize(&vec![true; total])?;
    let infeasibility = tab.value[art0..].iter().fold(F::zero(), |a, &v| a + v);
    if infeasibility > F::from(FEASIBILITY_TOLERANCE).unwrap() {
        return Err(SimplexError::Infeasible(infeasibility.to_f64().unwrap_or(f64::NAN)));
    }

    for j in art0..total {
        tab.upper[j] = F::zero();
        if tab.status[j] != Status::Basic {
            tab.value[j] = F::zero();
        }
    }
    let mut phase2 = lp.objective.clone();
    phase2.resize(total, F::zero());
    tab.price(&phase2);
    let mut enterable = vec![true; total];
    for e in enterable.iter_mut().skip(art0) {
        *e = false;
    }
    tab.optimize(&enterable)?;

    let x: Vec<F> = tab.value[..n].iter().map(|&v| v.max(F::zero())).collect();
    let objective = x.iter().zip(&lp.objective).fold(F::zero(), |a, (&x, &c)| a + x * c);
    Ok(LpSolution { x, objective, iterations: tab.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_bounded_variable() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective[0] = 1.0;
        lp.upper[0] = 1.0;
        lp.add(vec![(0, 1.0)], Relation::Ge, 1.0);
        let s = solve(&lp).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  →  x = 2, y = 6, value 36
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![-3.0, -5.0];
        lp.add(vec![(0, 1.0)], Relation::Le, 4.0);
        lp.add(vec![(1, 2.0)], Relation::Le, 12.0);
        lp.add(vec![(0, 3.0), (1, 2.0)], Relation::Le, 18.0);
        let s = solve(&lp).unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        assert!((s.objective + 36.0).abs() < 1e-9);
    }

    #[test]
    fn upper_bounds_flip() {
        // max x + y with x, y ≤ 1 and x + y ≤ 5: both end at their bounds
        let mut lp = LinearProgram::<f32>::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.upper = vec![1.0, 1.0];
        lp.add(vec![(0, 1.0), (1, 1.0)], Relation::Le, 5.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.x, vec![1.0, 1.0]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.upper[0] = 1.0;
        lp.add(vec![(0, 1.0)], Relation::Ge, 2.0);
        assert!(matches!(solve(&lp), Err(SimplexError::Infeasible(_))));

        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![-1.0, 0.0];
        lp.add(vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve(&lp), Err(SimplexError::Unbounded));
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // cycles under the textbook largest-coefficient rule
        let mut lp = LinearProgram::<f64>::new(4);
        lp.objective = vec![-0.75, 150.0, -0.02, 6.0];
        lp.add(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Relation::Le, 0.0);
        lp.add(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Relation::Le, 0.0);
        lp.add(vec![(2, 1.0)], Relation::Le, 1.0);
        let s = solve(&lp).unwrap();
        assert!((s.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn equality_with_negative_rhs() {
        // x − y = −2, minimise x + y  →  x = 0, y = 2
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add(vec![(0, 1.0), (1, -1.0)], Relation::Eq, -2.0);
        let s = solve(&lp).unwrap();
        assert!((s.x[1] - 2.0).abs() < 1e-12 && s.x[0].abs() < 1e-12);
    }

    fn brute_force_2d(c: [f64; 2], rows: &[([f64; 2], f64)]) -> Option<f64> {
        // vertices of { 0 ≤ x, y ≤ 3, a·x ≤ b }
        let mut lines: Vec<([f64; 2], f64)> = rows.to_vec();
        lines.extend([([1.0, 0.0], 3.0), ([0.0, 1.0], 3.0), ([-1.0, 0.0], 0.0), ([0.0, -1.0], 0.0)]);
        let mut best: Option<f64> = None;
        for i in 0..lines.len() {
            for k in (i + 1)..lines.len() {
                let (a, b) = (lines[i], lines[k]);
                let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (a.1 * b.0[1] - a.0[1] * b.1) / det;
                let y = (a.0[0] * b.1 - a.1 * b.0[0]) / det;
                if lines.iter().all(|(r, h)| r[0] * x + r[1] * y <= h + 1e-9) {
                    let v = c[0] * x + c[1] * y;
                    best = Some(best.map_or(v, |b: f64| b.min(v)));
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            c in prop::array::uniform2(-5i32..5),
            rows in prop::collection::vec((prop::array::uniform2(-4i32..5), -3i32..8), 0..4),
        ) {
            let rows: Vec<([f64; 2], f64)> = rows.iter().map(|(a, b)| ([a[0] as f64, a[1] as f64], *b as f64)).collect();
            let c = [c[0] as f64, c[1] as f64];
            let mut lp = LinearProgram::<f64>::new(2);
            lp.objective = c.to_vec();
            lp.upper = vec![3.0, 3.0];
            for (a, b) in &rows {
                lp.add(vec![(0, a[0]), (1, a[1])], Relation::Le, *b);
            }
            match (solve(&lp), brute_force_2d(c, &rows)) {
                (Ok(s), Some(v)) => prop_assert!((s.objective - v).abs() < 1e-7, "{} vs {}", s.objective, v),
                (Err(SimplexError::Infeasible(_)), None) => {}
                (got, want) => prop_assert!(false, "{:?} vs {:?}", got, want),
            }
        }
    }
}

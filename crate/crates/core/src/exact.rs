//! Brute-force optimum by size-ordered subset enumeration, for small
//! instances and as ground truth in tests.

use itertools::Itertools;

use crate::enclosure::{Enclosure, ObstacleSet};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactResult {
    /// Optimum size and a witness (sorted indices). None if even the full set fails.
    pub optimum: Option<(usize, Vec<usize>)>,
    pub explored: usize,
}

pub fn encloses_all<S: Scalar>(points: &[Point<S>], obstacles: &ObstacleSet<S>) -> Result<bool> {
    let oracle = Enclosure::new(obstacles)?;
    for q in points {
        if !oracle.is_enclosed(q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Indices of obstacles in the 2-core of the intersection graph. A
/// minimal enclosing set uses only obstacles with two distinct partners
/// inside it, so the others can be dropped.
pub fn two_core<S: Scalar>(obstacles: &ObstacleSet<S>) -> Vec<usize> {
    let n = obstacles.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| j != i && obstacles.intersects(i, j)).collect()).collect();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n).filter(|&i| degree[i] < 2).collect();
    while let Some(i) = queue.pop() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for &j in &adj[i] {
            if alive[j] {
                degree[j] -= 1;
                if degree[j] < 2 {
                    queue.push(j);
                }
            }
        }
    }
    (0..n).filter(|&i| alive[i]).collect()
}

/// `budget` caps the subset size tried. Err(BudgetExceeded) means the full
/// set encloses `points` but no subset within the budget does.
pub fn exact_solve<S: Scalar>(points: &[Point<S>], obstacles: &ObstacleSet<S>, budget: usize) -> Result<ExactResult> {
    if points.is_empty() {
        return Ok(ExactResult { optimum: Some((0, Vec::new())), explored: 0 });
    }
    let core = two_core(obstacles);
    let mut explored = 1;
    if !encloses_all(points, &obstacles.subset(&core))? {
        return Ok(ExactResult { optimum: None, explored });
    }
    for k in 1..=budget.min(core.len()) {
        for subset in core.iter().copied().combinations(k) {
            explored += 1;
            if encloses_all(points, &obstacles.subset(&subset))? {
                log::debug!("exact: optimum {k} after {explored} subsets");
                return Ok(ExactResult { optimum: Some((k, subset)), explored });
            }
        }
    }
    Err(Error::BudgetExceeded(budget))
}

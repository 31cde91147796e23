//! Method dispatch and solution checking over whole instances.

use crate::enclosure::{enclosed_subset, Enclosure, ObstacleSet};
use crate::error::{Error, Result};
use crate::exact::exact_solve;
use crate::instance::Instance;
use crate::io::{Method, SolutionFile};
use crate::mincut::solve_unit_disks;
use crate::rounding::solve_segments;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub seed: u64,
    pub max_retries: usize,
    /// Largest subset size the exact method tries.
    pub budget: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { seed: 0, max_retries: crate::rounding::DEFAULT_MAX_RETRIES, budget: usize::MAX }
    }
}

fn mismatch<S: Scalar>(method: Method, inst: &Instance<S>) -> Error {
    Error::MethodKindMismatch { method: method.to_string(), kind: inst.kind().to_string() }
}

fn first_unenclosable<S: Scalar>(inst: &Instance<S>) -> Result<usize> {
    let enclosed = enclosed_subset(&inst.points, &inst.obstacles)?;
    Ok((0..inst.points.len()).find(|i| enclosed.binary_search(i).is_err()).unwrap_or(0))
}

pub fn solve<S: Scalar>(inst: &Instance<S>, method: Method, opts: &SolveOptions) -> Result<SolutionFile> {
    let sol = match (method, &inst.obstacles) {
        (Method::Mincut, ObstacleSet::UnitDisks(d)) => {
            let s = solve_unit_disks(&inst.points, d)?;
            SolutionFile { objective: s.selected.len(), selected: s.selected, method, attempts: None, seed: None }
        }
        (Method::Lp, ObstacleSet::Segments(segs)) => {
            let s = solve_segments(&inst.points, segs, opts.seed, opts.max_retries)?;
            SolutionFile {
                objective: s.selected.len(),
                selected: s.selected,
                method,
                attempts: Some(s.rounded.attempts),
                seed: Some(opts.seed),
            }
        }
        (Method::Exact, _) => match exact_solve(&inst.points, &inst.obstacles, opts.budget)?.optimum {
            Some((k, witness)) => SolutionFile { selected: witness, method, objective: k, attempts: None, seed: None },
            None => return Err(Error::Infeasible(first_unenclosable(inst)?)),
        },
        _ => return Err(mismatch(method, inst)),
    };
    if check(inst, &sol)?.iter().any(|&ok| !ok) {
        return Err(Error::VerificationFailed(format!("{method} solution misses a point")));
    }
    Ok(sol)
}

/// Per-point enclosure verdicts for the selected obstacles.
pub fn check<S: Scalar>(inst: &Instance<S>, sol: &SolutionFile) -> Result<Vec<bool>> {
    sol.check_indices(inst.obstacles.len())?;
    let oracle = Enclosure::new(&inst.obstacles.subset(&sol.selected))?;
    inst.points.iter().map(|q| oracle.is_enclosed(q)).collect()
}

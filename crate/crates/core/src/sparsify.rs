//! Grid sparsification of a unit-disk family: bucket centres into half-unit
//! cells and keep at most four disks per relevant cell pair.

use std::collections::{BTreeMap, BTreeSet};

use crate::enclosure::{enclosed_subset, ObstacleSet};
use crate::error::{Error, Result};
use crate::geom::{convex_hull, disks_intersect, in_convex_polygon, orient, Point, UnitDisk};
use crate::scalar::Scalar;

pub type Cell = (i64, i64);

/// Largest Chebyshev index offset between cells holding intersecting disks.
const PAIR_REACH: i64 = 4;

/// Occupied cells of side 1/2; a centre `(x, y)` goes to `(⌊2x⌋, ⌊2y⌋)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grid {
    pub cells: BTreeMap<Cell, Vec<usize>>,
}

impl Grid {
    pub fn disks_in(&self, cell: Cell) -> &[usize] {
        self.cells.get(&cell).map_or(&[], Vec::as_slice)
    }
}

pub fn cell_of<S: Scalar>(p: &Point<S>) -> Cell {
    let two = S::from_ratio(2, 1);
    (p.x.times(&two).floor_int(), p.y.times(&two).floor_int())
}

pub fn grid_assign<S: Scalar>(disks: &[UnitDisk<S>]) -> Grid {
    let mut grid = Grid::default();
    for (i, d) in disks.iter().enumerate() {
        grid.cells.entry(cell_of(&d.center)).or_default().push(i);
    }
    grid
}

/// Intersecting disk pairs with one disk in each cell, directed from `pair.0`
/// to `pair.1`; for a cell paired with itself, every intersecting pair once.
fn cross_pairs<S: Scalar>(pair: (Cell, Cell), grid: &Grid, disks: &[UnitDisk<S>]) -> Vec<(usize, usize)> {
    let (a, b) = (grid.disks_in(pair.0), grid.disks_in(pair.1));
    let mut out = Vec::new();
    for (k, &i) in a.iter().enumerate() {
        let partners = if pair.0 == pair.1 { &b[k + 1..] } else { b };
        for &j in partners {
            if disks_intersect(&disks[i], &disks[j]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Unordered cell pairs `(c, c′)` with `c ≤ c′` that hold an intersecting pair.
pub fn relevant_pairs<S: Scalar>(grid: &Grid, disks: &[UnitDisk<S>]) -> Vec<(Cell, Cell)> {
    let mut out = Vec::new();
    for &c in grid.cells.keys() {
        for di in -PAIR_REACH..=PAIR_REACH {
            for dj in -PAIR_REACH..=PAIR_REACH {
                let d = (c.0 + di, c.1 + dj);
                if d < c || !grid.cells.contains_key(&d) {
                    continue;
                }
                if !cross_pairs((c, d), grid, disks).is_empty() {
                    out.push((c, d));
                }
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SelectionRole {
    /// Nothing in the pair's union is enclosed; any one cross pair is kept.
    Arbitrary { d: usize, d_prime: usize },
    /// The pairs maximising the enclosed points strictly left and strictly
    /// right of the directed centre line.
    LeftRight { d_l: usize, d_l_prime: usize, d_r: usize, d_r_prime: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSelection {
    pub pair: (Cell, Cell),
    /// Indices into X of the points enclosed by the two cells' disks.
    pub enclosed: Vec<usize>,
    /// Sorted, distinct disk indices.
    pub chosen: Vec<usize>,
    pub role: SelectionRole,
}

fn cell_corners<S: Scalar>(c: Cell) -> [Point<S>; 4] {
    let p = |i: i64, j: i64| Point::from_ratios((i, 2), (j, 2));
    [p(c.0, c.1), p(c.0 + 1, c.1), p(c.0 + 1, c.1 + 1), p(c.0, c.1 + 1)]
}

fn in_cell<S: Scalar>(q: &Point<S>, c: Cell) -> bool {
    let two = S::from_ratio(2, 1);
    let lo = |v: i64| S::from_i64(v).unwrap();
    let (x, y) = (q.x.times(&two), q.y.times(&two));
    x >= lo(c.0) && x <= lo(c.0 + 1) && y >= lo(c.1) && y <= lo(c.1 + 1)
}

/// Whether the sets ordered by size form a chain under inclusion.
fn is_chain(sets: &[BTreeSet<usize>]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..sets.len()).collect();
    order.sort_by_key(|&k| sets[k].len());
    order.windows(2).find(|w| !sets[w[0]].is_subset(&sets[w[1]])).map(|w| (w[0], w[1]))
}

pub fn select_for_pair<S: Scalar>(
    pair: (Cell, Cell),
    grid: &Grid,
    disks: &[UnitDisk<S>],
    points: &[Point<S>],
) -> Result<PairSelection> {
    let cross = cross_pairs(pair, grid, disks);
    let &(d0, d0_prime) = cross.first().ok_or_else(|| Error::InvalidInstance(format!("cell pair {pair:?} is not relevant")))?;

    let mut local: Vec<usize> = grid.disks_in(pair.0).to_vec();
    if pair.0 != pair.1 {
        local.extend_from_slice(grid.disks_in(pair.1));
    }
    let local_set = ObstacleSet::UnitDisks(local.iter().map(|&i| disks[i].clone()).collect());
    let enclosed = enclosed_subset(points, &local_set)?;

    if enclosed.is_empty() {
        let chosen = if d0 < d0_prime { vec![d0, d0_prime] } else { vec![d0_prime, d0] };
        return Ok(PairSelection { pair, enclosed, chosen, role: SelectionRole::Arbitrary { d: d0, d_prime: d0_prime } });
    }

    let hull = convex_hull(&[cell_corners::<S>(pair.0), cell_corners(pair.1)].concat());
    for &y in &enclosed {
        let q = &points[y];
        if !in_convex_polygon(q, &hull) || in_cell(q, pair.0) || in_cell(q, pair.1) {
            return Err(Error::VerificationFailed(format!("enclosed point {y} lies outside the gap between cells {pair:?}")));
        }
    }

    let mut left = Vec::with_capacity(cross.len());
    let mut right = Vec::with_capacity(cross.len());
    for &(i, j) in &cross {
        let (mut l, mut r) = (BTreeSet::new(), BTreeSet::new());
        for &y in &enclosed {
            match orient(&disks[i].center, &disks[j].center, &points[y]) {
                1 => l.insert(y),
                -1 => r.insert(y),
                _ => return Err(Error::ChainViolation(pair.0, pair.1)),
            };
        }
        left.push(l);
        right.push(r);
    }
    if is_chain(&left).is_some() || is_chain(&right).is_some() {
        return Err(Error::ChainViolation(pair.0, pair.1));
    }
    let argmax = |sets: &[BTreeSet<usize>]| (0..sets.len()).max_by_key(|&k| (sets[k].len(), std::cmp::Reverse(k))).unwrap();
    let (kl, kr) = (argmax(&left), argmax(&right));
    let (d_l, d_l_prime) = cross[kl];
    let (d_r, d_r_prime) = cross[kr];
    let chosen: Vec<usize> = BTreeSet::from([d_l, d_l_prime, d_r, d_r_prime]).into_iter().collect();

    let chosen_set = ObstacleSet::UnitDisks(chosen.iter().map(|&i| disks[i].clone()).collect());
    let ys: Vec<Point<S>> = enclosed.iter().map(|&y| points[y].clone()).collect();
    if enclosed_subset(&ys, &chosen_set)?.len() != ys.len() {
        return Err(Error::ChainViolation(pair.0, pair.1));
    }
    Ok(PairSelection { pair, enclosed, chosen, role: SelectionRole::LeftRight { d_l, d_l_prime, d_r, d_r_prime } })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsifyReport {
    pub relevant_pairs: usize,
    /// Largest number of kept disks in a single cell.
    pub max_cell_count: usize,
    /// Kept disks per occupied cell.
    pub cell_counts: BTreeMap<Cell, usize>,
    /// Relevant pairs touching each cell.
    pub pairs_per_cell: BTreeMap<Cell, usize>,
}

impl SparsifyReport {
    /// Whether each cell keeps at most four disks per relevant pair touching
    /// it, and at most `4 · 81` overall.
    pub fn within_static_bound(&self) -> bool {
        self.cell_counts.iter().all(|(c, &n)| {
            let pairs = self.pairs_per_cell.get(c).copied().unwrap_or(0);
            n <= 4 * pairs && n <= 4 * 81
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sparsified {
    /// Sorted indices of the kept disks.
    pub selected: Vec<usize>,
    pub selections: Vec<PairSelection>,
    pub report: SparsifyReport,
}

pub fn sparsify<S: Scalar>(points: &[Point<S>], disks: &[UnitDisk<S>]) -> Result<Sparsified> {
    let grid = grid_assign(disks);
    let pairs = relevant_pairs(&grid, disks);
    let mut selected = BTreeSet::new();
    let mut selections = Vec::with_capacity(pairs.len());
    let mut pairs_per_cell: BTreeMap<Cell, usize> = BTreeMap::new();
    for &pair in &pairs {
        let sel = select_for_pair(pair, &grid, disks, points)?;
        selected.extend(sel.chosen.iter().copied());
        *pairs_per_cell.entry(pair.0).or_default() += 1;
        if pair.1 != pair.0 {
            *pairs_per_cell.entry(pair.1).or_default() += 1;
        }
        selections.push(sel);
    }
    let mut cell_counts: BTreeMap<Cell, usize> = BTreeMap::new();
    for &i in &selected {
        *cell_counts.entry(cell_of(&disks[i].center)).or_default() += 1;
    }
    let max_cell_count = cell_counts.values().copied().max().unwrap_or(0);
    log::debug!("sparsify: {} relevant pairs, kept {} of {} disks, c = {max_cell_count}", pairs.len(), selected.len(), disks.len());
    Ok(Sparsified {
        selected: selected.into_iter().collect(),
        selections,
        report: SparsifyReport { relevant_pairs: pairs.len(), max_cell_count, cell_counts, pairs_per_cell },
    })
}

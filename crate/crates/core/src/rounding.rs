//! From a fractional circulation to a set of segments: cycle decomposition,
//! unwinding into simple cycles, and seeded randomized selection with
//! verification and a select-everything fallback.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enclosure::SegmentEnclosure;
use crate::error::{Error, Result};
use crate::geom::{on_segment, orient, seg_intersect, winding, ClosedWalk, Point, SegIntersection, Segment};
use crate::lp::{build_lp, solve_lp, Circulation, LpModel, SNAP_TOLERANCE};
use crate::scalar::Scalar;

pub const RESIDUAL_TOLERANCE: f64 = 1e-7;
pub const DEFAULT_MAX_RETRIES: usize = 100;

/// A cycle of LP variables carrying a common weight.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableCycle {
    pub variables: Vec<usize>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCycle<S> {
    pub vertices: Vec<Point<S>>,
    /// `parents[i]` is the segment carrying the edge `vertices[i] → vertices[i + 1]`.
    pub parents: Vec<usize>,
    pub weight: f64,
}

impl<S: Scalar> WeightedCycle<S> {
    pub fn from_variables(model: &LpModel<S>, cycle: &VariableCycle) -> Self {
        let vertices = cycle.variables.iter().map(|&j| model.endpoints(j).0.clone()).collect();
        let parents = cycle.variables.iter().map(|&j| model.variables[j].segment).collect();
        WeightedCycle { vertices, parents, weight: cycle.weight }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn walk(&self) -> ClosedWalk<S> {
        ClosedWalk::new(self.vertices.clone())
    }
}

/// Peels cycles off `values` (indexed like `model.variables`), each time
/// through the smallest positive variable.
pub fn decompose_circulation<S: Scalar>(model: &LpModel<S>, values: &[f64]) -> Result<Vec<VariableCycle>> {
    let mut x = values.to_vec();
    let n = model.arrangement.vertices.len();
    let mut outgoing = vec![Vec::new(); n];
    for (j, v) in model.variables.iter().enumerate() {
        outgoing[v.from].push(j);
    }
    let mut cycles = Vec::new();
    while let Some(e) = (0..x.len()).filter(|&j| x[j] > 0.0).min_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b))) {
        let (u, v) = (model.variables[e].from, model.variables[e].to);
        match positive_path(&outgoing, model, &x, v, u) {
            Some(path) => {
                let w = x[e];
                let mut vars = vec![e];
                vars.extend(path);
                for &j in &vars {
                    x[j] -= w;
                    if x[j] <= SNAP_TOLERANCE {
                        x[j] = 0.0;
                    }
                }
                cycles.push(VariableCycle { variables: vars, weight: w });
            }
            None if x[e] <= RESIDUAL_TOLERANCE => x[e] = 0.0,
            None => return Err(Error::ResidualTooLarge(x[e])),
        }
    }
    Ok(cycles)
}

/// Depth-first search for a path `from → to` over positive variables.
fn positive_path<S>(outgoing: &[Vec<usize>], model: &LpModel<S>, x: &[f64], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut seen = vec![false; outgoing.len()];
    let mut stack: Vec<(usize, usize)> = vec![(from, 0)];
    let mut path: Vec<usize> = Vec::new();
    seen[from] = true;
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        if node == to {
            return Some(path);
        }
        if let Some(&j) = outgoing[node][*next..].iter().find(|&&j| x[j] > 0.0 && !seen[model.variables[j].to]) {
            *next = outgoing[node].iter().position(|&k| k == j).unwrap() + 1;
            let w = model.variables[j].to;
            seen[w] = true;
            path.push(j);
            stack.push((w, 0));
        } else {
            stack.pop();
            path.pop();
        }
    }
    None
}

type Walk<S> = Vec<(Point<S>, usize)>;

fn remove_spikes<S: Scalar>(w: &mut Walk<S>) {
    'scan: loop {
        let n = w.len();
        if n <= 2 {
            w.clear();
            return;
        }
        for i in 0..n {
            let (ip, inx) = ((i + n - 1) % n, (i + 1) % n);
            let (p, c, nx) = (&w[ip].0, &w[i].0, &w[inx].0);
            if c == nx {
                w.remove(i);
                continue 'scan;
            }
            if orient(p, c, nx) != 0 || !p.sub(c).dot(&nx.sub(c)).is_positive() {
                continue;
            }
            if p == nx {
                // p → c → p: drop the excursion
                let (first, second) = if ip < i { (ip, i) } else { (i, ip) };
                w.remove(second);
                w.remove(first);
            } else {
                let parent = if on_segment(nx, p, c) { w[ip].1 } else { w[i].1 };
                w[ip].1 = parent;
                w.remove(i);
            }
            continue 'scan;
        }
        return;
    }
}

fn repeated_vertex<S: Scalar>(w: &Walk<S>) -> Option<(usize, usize)> {
    let mut first: HashMap<&Point<S>, usize> = HashMap::new();
    for (j, (p, _)) in w.iter().enumerate() {
        if let Some(&i) = first.get(p) {
            return Some((i, j));
        }
        first.insert(p, j);
    }
    None
}

/// Subdivides two edges at a point where they meet other than at a shared
/// vertex; None if the walk has no such pair.
fn subdivide_at_contact<S: Scalar>(w: &Walk<S>) -> Option<Walk<S>> {
    let n = w.len();
    let edge = |i: usize| Segment::new(w[i].0.clone(), w[(i + 1) % n].0.clone());
    for i in 0..n {
        for k in (i + 1)..n {
            if k == i + 1 || (i == 0 && k == n - 1) {
                continue;
            }
            let (ei, ek) = (edge(i), edge(k));
            let contacts: Vec<Point<S>> = match seg_intersect(&ei, &ek) {
                SegIntersection::None => continue,
                SegIntersection::Point(x) => vec![x],
                SegIntersection::Overlap => [&ei.a, &ei.b, &ek.a, &ek.b]
                    .into_iter()
                    .filter(|p| ei.contains(p) && ek.contains(p))
                    .cloned()
                    .collect(),
            };
            let mut inserts: HashMap<usize, Vec<Point<S>>> = HashMap::new();
            for x in &contacts {
                for (idx, e) in [(i, &ei), (k, &ek)] {
                    if x != &e.a && x != &e.b {
                        inserts.entry(idx).or_default().push(x.clone());
                    }
                }
            }
            if inserts.is_empty() {
                continue;
            }
            let mut out = Vec::with_capacity(n + 4);
            for (idx, (p, parent)) in w.iter().enumerate() {
                out.push((p.clone(), *parent));
                if let Some(pts) = inserts.get_mut(&idx) {
                    let e = edge(idx);
                    pts.sort_by_cached_key(|q| e.param(q));
                    pts.dedup();
                    out.extend(pts.iter().map(|q| (q.clone(), *parent)));
                }
            }
            return Some(out);
        }
    }
    None
}

fn unwind_walk<S: Scalar>(mut w: Walk<S>, out: &mut Vec<Walk<S>>) {
    loop {
        remove_spikes(&mut w);
        if w.len() < 3 {
            return;
        }
        if let Some((i, j)) = repeated_vertex(&w) {
            let inner: Walk<S> = w[i..j].to_vec();
            let mut outer: Walk<S> = w[j..].to_vec();
            outer.extend_from_slice(&w[..i]);
            unwind_walk(inner, out);
            unwind_walk(outer, out);
            return;
        }
        match subdivide_at_contact(&w) {
            Some(next) => w = next,
            None => {
                out.push(w);
                return;
            }
        }
    }
}

/// Splits a closed walk into simple cycles with the same total winding
/// around every point off the walk. Back-and-forth pieces vanish.
pub fn unwind<S: Scalar>(c: &WeightedCycle<S>) -> Vec<WeightedCycle<S>> {
    let walk: Walk<S> = c.vertices.iter().cloned().zip(c.parents.iter().copied()).collect();
    let mut pieces = Vec::new();
    unwind_walk(walk, &mut pieces);
    pieces
        .into_iter()
        .map(|w| {
            let (vertices, parents) = w.into_iter().unzip();
            WeightedCycle { vertices, parents, weight: c.weight }
        })
        .collect()
}

/// No repeated vertex, no contact between non-adjacent edges, and no
/// adjacent pair folding back on itself.
pub fn is_simple<S: Scalar>(vertices: &[Point<S>]) -> bool {
    let n = vertices.len();
    if n < 3 || repeated_vertex(&vertices.iter().map(|p| (p.clone(), 0)).collect()).is_some() {
        return false;
    }
    let edge = |i: usize| Segment::new(vertices[i].clone(), vertices[(i + 1) % n].clone());
    for i in 0..n {
        let (p, c, nx) = (&vertices[(i + n - 1) % n], &vertices[i], &vertices[(i + 1) % n]);
        if orient(p, c, nx) == 0 && p.sub(c).dot(&nx.sub(c)).is_positive() {
            return false;
        }
        for k in (i + 2)..n {
            if i == 0 && k == n - 1 {
                continue;
            }
            if !matches!(seg_intersect(&edge(i), &edge(k)), SegIntersection::None) {
                return false;
            }
        }
    }
    true
}

pub fn filter_ccw<S: Scalar>(cycles: Vec<WeightedCycle<S>>) -> Vec<WeightedCycle<S>> {
    cycles.into_iter().filter(|c| crate::geom::signed_area2(&c.vertices).is_positive()).collect()
}

/// `min(10·w·ln n, 1)`.
pub fn selection_probability(weight: f64, n: usize) -> f64 {
    (10.0 * weight * (n as f64).ln()).min(1.0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rounded {
    /// Sorted, distinct segment indices.
    pub selected: Vec<usize>,
    pub attempts: usize,
    pub fallback: bool,
    /// Segment count with repeats across selected cycles.
    pub multiplicity: usize,
}

fn segments_of<S>(cycles: &[WeightedCycle<S>], chosen: impl Iterator<Item = usize>) -> (Vec<usize>, usize) {
    let mut set = BTreeSet::new();
    let mut multiplicity = 0;
    for k in chosen {
        let distinct: BTreeSet<usize> = cycles[k].parents.iter().copied().collect();
        multiplicity += distinct.len();
        set.extend(distinct);
    }
    (set.into_iter().collect(), multiplicity)
}

fn encloses_all<S: Scalar>(points: &[Point<S>], segments: &[Segment<S>], selected: &[usize]) -> Result<bool> {
    let oracle = SegmentEnclosure::new(selected.iter().map(|&i| segments[i].clone()).collect())?;
    for q in points {
        if !oracle.is_enclosed(q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn round_and_select<S: Scalar>(
    cycles: &[WeightedCycle<S>],
    n: usize,
    points: &[Point<S>],
    segments: &[Segment<S>],
    seed: u64,
    max_retries: usize,
) -> Result<Rounded> {
    if points.is_empty() {
        return Ok(Rounded { selected: Vec::new(), attempts: 0, fallback: false, multiplicity: 0 });
    }
    for (i, q) in points.iter().enumerate() {
        let covered: f64 = cycles.iter().filter(|c| winding(q, &c.walk()) == Ok(1)).map(|c| c.weight).sum();
        if covered < 1.0 - 1e-6 {
            log::warn!("point {i} is covered by cycle weight {covered} < 1");
        }
    }
    let probs: Vec<f64> = cycles.iter().map(|c| selection_probability(c.weight, n)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=max_retries {
        let picks: Vec<bool> = probs.iter().map(|&p| rng.random::<f64>() < p).collect();
        let (selected, multiplicity) = segments_of(cycles, (0..cycles.len()).filter(|&k| picks[k]));
        if encloses_all(points, segments, &selected)? {
            log::debug!("rounding: attempt {attempt} selected {} segments", selected.len());
            return Ok(Rounded { selected, attempts: attempt, fallback: false, multiplicity });
        }
    }
    let (selected, multiplicity) = segments_of(cycles, 0..cycles.len());
    if !encloses_all(points, segments, &selected)? {
        return Err(Error::VerificationFailed("the union of all cycles does not enclose every point".into()));
    }
    log::info!("rounding: fell back to all {} cycles after {max_retries} attempts", cycles.len());
    Ok(Rounded { selected, attempts: max_retries, fallback: true, multiplicity })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSolution {
    pub selected: Vec<usize>,
    pub lp_objective: f64,
    pub cycles: usize,
    pub rounded: Rounded,
}

pub fn solve_segments<S: Scalar>(points: &[Point<S>], segments: &[Segment<S>], seed: u64, max_retries: usize) -> Result<SegmentSolution> {
    if points.is_empty() {
        let rounded = Rounded { selected: Vec::new(), attempts: 0, fallback: false, multiplicity: 0 };
        return Ok(SegmentSolution { selected: Vec::new(), lp_objective: 0.0, cycles: 0, rounded });
    }
    let model = build_lp(points, segments)?;
    let circ: Circulation<f64> = solve_lp(&model)?;
    let decomposition = decompose_circulation(&model, &circ.values)?;
    let simple: Vec<WeightedCycle<S>> =
        decomposition.iter().flat_map(|c| unwind(&WeightedCycle::from_variables(&model, c))).collect();
    let ccw = filter_ccw(simple);
    let rounded = round_and_select(&ccw, points.len() + segments.len(), points, segments, seed, max_retries)?;
    Ok(SegmentSolution { selected: rounded.selected.clone(), lp_objective: circ.objective, cycles: ccw.len(), rounded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::build_lp;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn p(x: i64, y: i64) -> Point<Q> {
        Point::from_ints(x, y)
    }

    fn seg(a: i64, b: i64, c: i64, d: i64) -> Segment<Q> {
        Segment::from_ints(a, b, c, d)
    }

    fn t1_at(dx: i64) -> Vec<Segment<Q>> {
        vec![seg(dx, 0, dx + 8, 0), seg(dx + 8, 0, dx + 4, 6), seg(dx + 4, 6, dx, 0)]
    }

    fn cycle(points: &[(i64, i64)]) -> WeightedCycle<Q> {
        WeightedCycle { vertices: points.iter().map(|&(x, y)| p(x, y)).collect(), parents: vec![0; points.len()], weight: 1.0 }
    }

    fn ccw_values(model: &LpModel<Q>, loops: &[(&[(i64, i64)], f64)]) -> Vec<f64> {
        let mut x = vec![0.0; model.variables.len()];
        for (pts, w) in loops {
            for k in 0..pts.len() {
                let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
                let (u, v) = (model.vertex_id(&p(a.0, a.1)).unwrap(), model.vertex_id(&p(b.0, b.1)).unwrap());
                let j = (0..model.variables.len()).find(|&j| model.variables[j].from == u && model.variables[j].to == v).unwrap();
                x[j] += w;
            }
        }
        x
    }

    fn reconstruct(n: usize, cycles: &[VariableCycle]) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for c in cycles {
            for &j in &c.variables {
                x[j] += c.weight;
            }
        }
        x
    }

    const T: [(i64, i64); 3] = [(0, 0), (8, 0), (4, 6)];
    const T_REV: [(i64, i64); 3] = [(0, 0), (4, 6), (8, 0)];

    #[test]
    fn decompose_single_triangle() {
        let model = build_lp(&[p(4, 2)], &t1_at(0)).unwrap();
        let x = ccw_values(&model, &[(&T, 0.7)]);
        let cycles = decompose_circulation(&model, &x).unwrap();
        assert_eq!(cycles.len(), 1);
        assert!((cycles[0].weight - 0.7).abs() < 1e-12);
    }

    #[test]
    fn decompose_two_triangles() {
        let mut segs = t1_at(0);
        segs.extend(t1_at(20));
        let model = build_lp(&[p(4, 2)], &segs).unwrap();
        let far: [(i64, i64); 3] = [(20, 0), (28, 0), (24, 6)];
        let x = ccw_values(&model, &[(&T, 0.3), (&far, 0.5)]);
        let cycles = decompose_circulation(&model, &x).unwrap();
        let mut w: Vec<f64> = cycles.iter().map(|c| c.weight).collect();
        w.sort_by(f64::total_cmp);
        assert_eq!(cycles.len(), 2);
        assert!((w[0] - 0.3).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decompose_superposed_reverse() {
        let model = build_lp(&[p(4, 2)], &t1_at(0)).unwrap();
        let x = ccw_values(&model, &[(&T, 1.0), (&T_REV, 0.4)]);
        let cycles = decompose_circulation(&model, &x).unwrap();
        let back = reconstruct(x.len(), &cycles);
        assert!(x.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-6));
    }

    #[test]
    fn broken_flow_is_reported() {
        let model = build_lp(&[p(4, 2)], &t1_at(0)).unwrap();
        let mut x = ccw_values(&model, &[(&T, 0.5)]);
        let j = x.iter().position(|&v| v > 0.0).unwrap();
        x[j] = 0.9;
        assert!(matches!(decompose_circulation(&model, &x), Err(Error::ResidualTooLarge(_))));
    }

    fn same_cycle(a: &[Point<Q>], b: &[Point<Q>]) -> bool {
        a.len() == b.len() && (0..a.len()).any(|r| (0..a.len()).all(|k| a[(k + r) % a.len()] == b[k]))
    }

    #[test]
    fn figure_eight_splits_at_the_crossing() {
        let (u1, v1, w2, u2, v2, w1) = ((-2, -2), (2, 2), (4, 0), (2, -2), (-2, 2), (-4, 0));
        let out = unwind(&cycle(&[u1, v1, w2, u2, v2, w1]));
        assert_eq!(out.len(), 2);
        let c1 = cycle(&[(0, 0), v2, w1, u1]).vertices;
        let c2 = cycle(&[(0, 0), v1, w2, u2]).vertices;
        assert!(out.iter().any(|c| same_cycle(&c.vertices, &c1)));
        assert!(out.iter().any(|c| same_cycle(&c.vertices, &c2)));
        assert!(out.iter().all(|c| c.len() == 4));
    }

    #[test]
    fn simple_triangle_is_unchanged() {
        let c = cycle(&T);
        assert_eq!(unwind(&c), vec![c]);
    }

    #[test]
    fn bowtie_splits_at_shared_vertex() {
        let c = cycle(&[(0, 0), (2, 1), (2, -1), (0, 0), (-2, 1), (-2, -1)]);
        let out = unwind(&c);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|c| is_simple(&c.vertices)));
        for q in [p(1, 0), p(-1, 0), p(5, 5), Point::from_ratios((3, 2), (1, 4))] {
            let want = winding(&q, &c.walk()).unwrap();
            let got: i32 = out.iter().map(|c| winding(&q, &c.walk()).unwrap()).sum();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn filter_ccw_examples() {
        let ccw = cycle(&T);
        let cw = cycle(&T_REV);
        let flat = cycle(&[(0, 0), (3, 0)]);
        assert_eq!(filter_ccw(vec![ccw.clone(), cw, flat]), vec![ccw]);
    }

    #[test]
    fn probability_examples() {
        assert_eq!(selection_probability(0.2, 5), 1.0);
        assert!((selection_probability(0.01, 10) - 0.230_258_509).abs() < 1e-8);
    }

    #[test]
    fn solve_triangle() {
        let sol = solve_segments(&[p(4, 2)], &t1_at(0), 7, DEFAULT_MAX_RETRIES).unwrap();
        assert_eq!(sol.selected, vec![0, 1, 2]);
        assert_eq!(sol.rounded.attempts, 1);
        assert!((sol.lp_objective - 3.0).abs() < 1e-9);
        assert!(solve_segments::<Q>(&[], &t1_at(0), 7, 100).unwrap().selected.is_empty());
    }

    #[test]
    fn decoys_are_ignored() {
        let corners = [(4, 0), (2, 4), (-2, 4), (-4, 0), (-2, -4), (2, -4)];
        let mut segs: Vec<Segment<Q>> = (0..6)
            .map(|i| {
                let (ax, ay) = corners[i];
                let (bx, by) = corners[(i + 1) % 6];
                let (mx, my) = ((ax + bx) / 2, (ay + by) / 2);
                seg(2 * ax - mx, 2 * ay - my, 2 * bx - mx, 2 * by - my)
            })
            .collect();
        segs.extend([seg(30, 0, 34, 0), seg(30, 5, 30, 9), seg(40, 40, 41, 47), seg(-30, -30, -25, -31)]);
        let sol = solve_segments(&[p(0, 0)], &segs, 1, DEFAULT_MAX_RETRIES).unwrap();
        assert_eq!(sol.selected, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn same_seed_same_result() {
        let mut segs = t1_at(0);
        segs.push(seg(-1, 1, 9, 1));
        segs.push(seg(4, -1, 4, 7));
        let pts = [Point::from_ratios((7, 2), (1, 2)), Point::from_ratios((9, 2), (3, 2))];
        let a = solve_segments(&pts, &segs, 42, 100).unwrap();
        let b = solve_segments(&pts, &segs, 42, 100).unwrap();
        assert_eq!(a, b);
    }

    fn grid_walk() -> impl Strategy<Value = Vec<(i64, i64)>> {
        prop::collection::vec((-3i64..=3, -3i64..=3), 3..9).prop_filter("consecutive vertices differ", |v| {
            (0..v.len()).all(|i| v[i] != v[(i + 1) % v.len()])
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn unwinding_preserves_winding(v in grid_walk()) {
            let c = cycle(&v);
            let out = unwind(&c);
            let edges: usize = out.iter().map(|c| c.len()).sum();
            if v.len() >= 3 {
                prop_assert!(edges <= 3 * v.len() - 6, "{} edges from {}", edges, v.len());
            }
            for piece in &out {
                prop_assert!(is_simple(&piece.vertices), "{:?}", piece.vertices);
            }
            let walk = c.walk();
            for qx in -3..=3 {
                for qy in -3..=3 {
                    let q = Point::from_ratios((2 * qx + 1, 2), (4 * qy + 1, 4));
                    let Ok(want) = winding(&q, &walk) else { continue };
                    let got: i32 = out.iter().map(|c| winding(&q, &c.walk()).unwrap()).sum();
                    prop_assert_eq!(got, want);
                }
            }
        }
    }
}

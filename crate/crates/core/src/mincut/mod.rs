//! Unit-disk solver: draw the intersection graph of the sparsified family with
//! centre-to-centre segments, planarize it, and cut every nonempty face off
//! the outer face in the dual with a minimum S–T cut.

pub mod flow;

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::arrangement::{extract_faces, Arrangement, FaceSet};
use crate::enclosure::{enclosed_subset, sigma_segments, Enclosure, ObstacleSet};
use crate::error::{Error, Result};
use crate::geom::{in_segment_interior, on_segment, seg_intersect, Point, SegIntersection, Segment, UnitDisk};
use crate::scalar::Scalar;
use crate::sparsify::{sparsify, SparsifyReport};

pub use flow::FlowNetwork;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub u: usize,
    pub v: usize,
    /// Index into [`PlanarDrawing::edges`].
    pub parent: usize,
}

/// A straight-line drawing subdivided at its crossings.
#[derive(Clone, Debug)]
pub struct PlanarDrawing<S> {
    /// Input vertices first (in input order), then crossing points.
    pub vertices: Vec<Point<S>>,
    pub input_vertex_count: usize,
    /// Input edges as vertex pairs, with the caller's label for each.
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<(usize, usize)>,
    pub pieces: Vec<Piece>,
    pub arrangement: Arrangement<S>,
}

impl<S: Scalar> PlanarDrawing<S> {
    pub fn crossing_count(&self) -> usize {
        self.vertices.len() - self.input_vertex_count
    }
}

/// Planarizes the straight-line drawing with vertices `points` and edges
/// `edges` (index pairs), labelled by `labels`.
pub fn planarize_edges<S: Scalar>(points: &[Point<S>], edges: &[(usize, usize)], labels: &[(usize, usize)]) -> Result<PlanarDrawing<S>> {
    assert_eq!(edges.len(), labels.len());
    let segs: Vec<Segment<S>> = edges.iter().map(|&(u, v)| Segment::new(points[u].clone(), points[v].clone())).collect();
    for (e, s) in segs.iter().enumerate() {
        if s.is_degenerate() {
            return Err(Error::DegenerateDrawing(format!("edge {:?} has coincident endpoints", labels[e])));
        }
        for (k, p) in points.iter().enumerate() {
            if in_segment_interior(p, &s.a, &s.b) {
                return Err(Error::DegenerateDrawing(format!("edge {:?} passes through vertex {k}", labels[e])));
            }
        }
    }

    let mut vertices = points.to_vec();
    let mut index: HashMap<Point<S>, usize> = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut on_edge: Vec<Vec<usize>> = edges.iter().map(|&(u, v)| vec![u, v]).collect();
    let mut crossing_edges: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            match seg_intersect(&segs[i], &segs[j]) {
                SegIntersection::None => {}
                SegIntersection::Overlap => {
                    return Err(Error::DegenerateDrawing(format!("edges {:?} and {:?} overlap", labels[i], labels[j])));
                }
                SegIntersection::Point(p) => {
                    if let Some(&k) = index.get(&p) {
                        if k < points.len() {
                            // shared endpoint; interior-through-vertex was rejected above
                            continue;
                        }
                    }
                    let next = vertices.len();
                    let k = *index.entry(p.clone()).or_insert(next);
                    if k == next {
                        vertices.push(p);
                    }
                    let through = crossing_edges.entry(k).or_default();
                    for e in [i, j] {
                        if !through.contains(&e) {
                            through.push(e);
                            on_edge[e].push(k);
                        }
                    }
                    if through.len() > 2 {
                        let names: Vec<_> = through.iter().map(|&e| labels[e]).collect();
                        return Err(Error::DegenerateDrawing(format!("edges {names:?} are concurrent")));
                    }
                }
            }
        }
    }

    let mut pieces = Vec::new();
    let mut graph_edges = Vec::new();
    for (e, ids) in on_edge.iter_mut().enumerate() {
        let s = &segs[e];
        ids.sort_by_cached_key(|&v| s.param(&vertices[v]));
        for w in ids.windows(2) {
            pieces.push(Piece { u: w[0], v: w[1], parent: e });
            graph_edges.push((w[0], w[1], e));
        }
    }
    let arrangement = Arrangement::from_planar_graph(vertices.clone(), &graph_edges, on_edge);
    Ok(PlanarDrawing { vertices, input_vertex_count: points.len(), edges: edges.to_vec(), labels: labels.to_vec(), pieces, arrangement })
}

/// The σ-drawing of the disks at `subset`: one vertex per disk, one edge per
/// intersecting pair, labelled with the pair's indices into `disks`.
pub fn planarize<S: Scalar>(disks: &[UnitDisk<S>], subset: &[usize]) -> Result<PlanarDrawing<S>> {
    let local: Vec<UnitDisk<S>> = subset.iter().map(|&i| disks[i].clone()).collect();
    let centres: Vec<Point<S>> = local.iter().map(|d| d.center.clone()).collect();
    let sigma = sigma_segments(&local);
    let edges: Vec<(usize, usize)> = sigma.iter().map(|&(_, pair)| pair).collect();
    let labels: Vec<(usize, usize)> = edges.iter().map(|&(i, j)| (subset[i], subset[j])).collect();
    planarize_edges(&centres, &edges, &labels)
}

#[derive(Clone, Debug)]
pub struct DualGraph<S> {
    pub faces: FaceSet<S>,
    /// Faces on the two sides of each piece.
    pub edges: Vec<(usize, usize)>,
    pub outer: usize,
    pub nonempty: Vec<bool>,
}

impl<S: Scalar> DualGraph<S> {
    pub fn face_count(&self) -> usize {
        self.faces.faces.len()
    }
}

pub fn build_dual<S: Scalar>(drawing: &PlanarDrawing<S>, points: &[Point<S>]) -> Result<DualGraph<S>> {
    let arr = &drawing.arrangement;
    for q in points {
        if let Some(k) = drawing.pieces.iter().position(|p| on_segment(q, &drawing.vertices[p.u], &drawing.vertices[p.v])) {
            return Err(Error::PointOnObstacle(drawing.pieces[k].parent));
        }
    }
    let mut faces = extract_faces(arr);
    let located = faces.assign_points(arr, points)?;
    let mut nonempty = vec![false; faces.faces.len()];
    for f in located {
        nonempty[f] = true;
    }
    let edges = (0..arr.edge_count()).map(|k| (faces.half_edge_face[2 * k], faces.half_edge_face[2 * k + 1])).collect();
    let outer = faces.outer_face_id;
    Ok(DualGraph { faces, edges, outer, nonempty })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    /// Sorted piece indices.
    pub pieces: Vec<usize>,
    pub flow_value: u64,
}

/// Fewest pieces whose removal separates the outer face from every
/// nonempty face in the dual.
pub fn min_st_cut<S: Scalar>(dual: &DualGraph<S>) -> Result<Cut> {
    if !dual.nonempty.iter().any(|&b| b) {
        return Ok(Cut { pieces: Vec::new(), flow_value: 0 });
    }
    if dual.nonempty[dual.outer] {
        return Err(Error::NoFiniteCut);
    }
    let f = dual.face_count();
    let sink = f;
    let infinite = dual.edges.len() as u64 + 1;
    let mut net = FlowNetwork::new(f + 1);
    for &(a, b) in &dual.edges {
        // a piece with the same face on both sides never separates anything
        if a != b {
            net.add_edge(a, b, 1);
        }
    }
    for (face, _) in dual.nonempty.iter().enumerate().filter(|(_, &b)| b) {
        net.add_arc(face, sink, infinite);
    }
    let value = net.max_flow(dual.outer, sink);
    if value >= infinite {
        return Err(Error::NoFiniteCut);
    }
    let side = net.residual_reachable(dual.outer);
    let pieces: Vec<usize> = dual.edges.iter().enumerate().filter(|(_, &(a, b))| side[a] != side[b]).map(|(k, _)| k).collect();
    if pieces.len() as u64 != value {
        return Err(Error::VerificationFailed(format!("cut of {} pieces for flow {value}", pieces.len())));
    }
    if outer_reaches_nonempty(dual, &pieces) {
        return Err(Error::VerificationFailed("cut leaves a nonempty face connected to the outer face".into()));
    }
    Ok(Cut { pieces, flow_value: value })
}

fn outer_reaches_nonempty<S>(dual: &DualGraph<S>, removed: &[usize]) -> bool {
    let removed: BTreeSet<usize> = removed.iter().copied().collect();
    let mut adjacency = vec![Vec::new(); dual.nonempty.len()];
    for (k, &(a, b)) in dual.edges.iter().enumerate() {
        if !removed.contains(&k) {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    let mut seen = vec![false; adjacency.len()];
    seen[dual.outer] = true;
    let mut queue = VecDeque::from([dual.outer]);
    while let Some(u) = queue.pop_front() {
        if dual.nonempty[u] {
            return true;
        }
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    false
}

#[derive(Clone, Debug)]
pub struct MincutSolution {
    /// Sorted disk indices.
    pub selected: Vec<usize>,
    /// The sparsified family the cut was computed on.
    pub sparse: Vec<usize>,
    pub cut_size: usize,
    pub sparsify_report: SparsifyReport,
}

pub fn solve_unit_disks<S: Scalar>(points: &[Point<S>], disks: &[UnitDisk<S>]) -> Result<MincutSolution> {
    let all = ObstacleSet::UnitDisks(disks.to_vec());
    let enclosed = enclosed_subset(points, &all)?;
    if let Some(i) = (0..points.len()).find(|i| enclosed.binary_search(i).is_err()) {
        return Err(Error::Infeasible(i));
    }
    let sparse = sparsify(points, disks)?;
    let drawing = planarize(disks, &sparse.selected)?;
    let dual = build_dual(&drawing, points)?;
    let cut = min_st_cut(&dual)?;
    let selected: BTreeSet<usize> = cut
        .pieces
        .iter()
        .flat_map(|&k| {
            let (i, j) = drawing.labels[drawing.pieces[k].parent];
            [i, j]
        })
        .collect();
    let selected: Vec<usize> = selected.into_iter().collect();
    debug_assert!(selected.len() <= 2 * cut.pieces.len());
    log::debug!(
        "mincut: |D'| = {}, {} pieces, {} crossings, cut {}, |D0| = {}",
        sparse.selected.len(),
        drawing.pieces.len(),
        drawing.crossing_count(),
        cut.pieces.len(),
        selected.len()
    );

    let oracle = Enclosure::new(&all.subset(&selected))?;
    for (i, q) in points.iter().enumerate() {
        if !oracle.is_enclosed(q)? {
            return Err(Error::VerificationFailed(format!("point {i} is not enclosed by the cut's disks")));
        }
    }
    Ok(MincutSolution { selected, sparse: sparse.selected, cut_size: cut.pieces.len(), sparsify_report: sparse.report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn disk(x: (i64, i64), y: (i64, i64)) -> UnitDisk<Q> {
        UnitDisk::new(Point::from_ratios(x, y))
    }

    fn h6_at(dx: i64) -> Vec<UnitDisk<Q>> {
        let c = [((9, 5), (0, 1)), ((9, 10), (3, 2)), ((-9, 10), (3, 2)), ((-9, 5), (0, 1)), ((-9, 10), (-3, 2)), ((9, 10), (-3, 2))];
        c.into_iter().map(|((xn, xd), y)| disk((xn + dx * xd, xd), y)).collect()
    }

    fn p(x: i64, y: i64) -> Point<Q> {
        Point::from_ints(x, y)
    }

    #[test]
    fn planarize_single_crossing() {
        let pts = [p(0, 0), p(2, 2), p(0, 2), p(2, 0)];
        let d = planarize_edges(&pts, &[(0, 1), (2, 3)], &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(d.vertices.len(), 5);
        assert_eq!(d.vertices[4], p(1, 1));
        assert_eq!(d.pieces.len(), 4);
    }

    #[test]
    fn planarize_ring_and_path() {
        let ring = h6_at(0);
        let d = planarize(&ring, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert_eq!((d.vertices.len(), d.pieces.len(), d.crossing_count()), (6, 6, 0));

        let path = [disk((0, 1), (0, 1)), disk((3, 2), (0, 1)), disk((3, 1), (0, 1))];
        let d = planarize(&path, &[0, 1, 2]).unwrap();
        assert_eq!((d.vertices.len(), d.pieces.len()), (3, 2));
    }

    #[test]
    fn planarize_rejects_degenerate_drawings() {
        // collinear centres: the long σ runs through the middle centre
        let line = [disk((0, 1), (0, 1)), disk((1, 1), (0, 1)), disk((2, 1), (0, 1))];
        assert!(matches!(planarize(&line, &[0, 1, 2]), Err(Error::DegenerateDrawing(_))));
        // three edges through (1,1)
        let pts = [p(0, 0), p(2, 2), p(0, 2), p(2, 0), p(1, 0), p(1, 2)];
        let e = [(0, 1), (2, 3), (4, 5)];
        assert!(matches!(planarize_edges(&pts, &e, &e), Err(Error::DegenerateDrawing(_))));
    }

    #[test]
    fn dual_examples() {
        let ring = h6_at(0);
        let d = planarize(&ring, &[0, 1, 2, 3, 4, 5]).unwrap();
        let dual = build_dual(&d, &[p(0, 0)]).unwrap();
        assert_eq!(dual.face_count(), 2);
        assert!(!dual.nonempty[dual.outer]);
        assert_eq!(dual.nonempty.iter().filter(|&&b| b).count(), 1);
        let cut = min_st_cut(&dual).unwrap();
        assert_eq!(cut.pieces.len(), 6);
        assert_eq!(cut.flow_value, 6);

        let empty = build_dual(&d, &[]).unwrap();
        assert!(min_st_cut(&empty).unwrap().pieces.is_empty());
    }

    #[test]
    fn nested_triangles_mark_the_annulus() {
        let pts = [p(0, 0), p(8, 0), p(4, 6), p(-8, -8), p(16, -8), p(4, 10)];
        let e = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
        let d = planarize_edges(&pts, &e, &e).unwrap();
        let dual = build_dual(&d, &[p(4, -4)]).unwrap();
        assert_eq!(dual.face_count(), 3);
        let marked = dual.nonempty.iter().position(|&b| b).unwrap();
        assert_eq!(dual.faces.faces[marked].walks.len(), 2);
        assert_eq!(min_st_cut(&dual).unwrap().pieces.len(), 3);
    }

    #[test]
    fn outer_point_has_no_finite_cut() {
        let pts = [p(0, 0), p(8, 0), p(4, 6)];
        let e = [(0, 1), (1, 2), (2, 0)];
        let d = planarize_edges(&pts, &e, &e).unwrap();
        let dual = build_dual(&d, &[p(4, 2), p(40, 2)]).unwrap();
        assert_eq!(min_st_cut(&dual), Err(Error::NoFiniteCut));
    }

    #[test]
    fn solve_examples() {
        let ring = h6_at(0);
        let sol = solve_unit_disks(&[p(0, 0)], &ring).unwrap();
        assert_eq!(sol.selected, vec![0, 1, 2, 3, 4, 5]);

        let mut two = h6_at(0);
        two.extend(h6_at(10));
        let sol = solve_unit_disks(&[p(0, 0), p(10, 0)], &two).unwrap();
        assert_eq!(sol.selected.len(), 12);

        assert!(solve_unit_disks::<Q>(&[], &ring).unwrap().selected.is_empty());
        assert_eq!(solve_unit_disks(&[p(0, 0)], &ring[..5]).unwrap_err(), Error::Infeasible(0));
    }
}

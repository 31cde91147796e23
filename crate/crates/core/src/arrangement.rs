//! Planar subdivision of a set of segments (or of any straight-line planar
//! graph): half-edges, face walks merged across connected components, point
//! location, and outer-boundary extraction.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geom::{angle_cmp, on_segment, ray_avoiding, ray_cross_sign, seg_intersect, ClosedWalk, Point, SegIntersection, Segment};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfEdge {
    pub origin: usize,
    pub target: usize,
    /// Index of the input segment (or drawing edge) this piece belongs to.
    pub parent: usize,
    pub twin: usize,
    /// Successor along the face walk: the clockwise neighbour of `twin`
    /// around `target`, which keeps the face on the left.
    pub next: usize,
}

#[derive(Clone, Debug)]
pub struct Arrangement<S> {
    pub vertices: Vec<Point<S>>,
    /// Half-edges `2k` and `2k + 1` are the two directions of undirected edge `k`.
    pub half_edges: Vec<HalfEdge>,
    /// Outgoing half-edges per vertex, counter-clockwise by exact angle.
    pub outgoing: Vec<Vec<usize>>,
    pub vertex_component: Vec<usize>,
    pub component_count: usize,
    /// Per input segment, the vertices lying on it in order from `a` to `b`.
    pub segment_vertices: Vec<Vec<usize>>,
}

impl<S: Scalar> Arrangement<S> {
    /// Builds the half-edge structure of a straight-line planar graph.
    ///
    /// `edges` are `(u, v, parent)` triples; the caller guarantees that no two
    /// edges cross or overlap.
    pub fn from_planar_graph(vertices: Vec<Point<S>>, edges: &[(usize, usize, usize)], segment_vertices: Vec<Vec<usize>>) -> Self {
        let mut half_edges = Vec::with_capacity(edges.len() * 2);
        let mut outgoing = vec![Vec::new(); vertices.len()];
        for (k, &(u, v, parent)) in edges.iter().enumerate() {
            debug_assert_ne!(u, v);
            half_edges.push(HalfEdge { origin: u, target: v, parent, twin: 2 * k + 1, next: usize::MAX });
            half_edges.push(HalfEdge { origin: v, target: u, parent, twin: 2 * k, next: usize::MAX });
            outgoing[u].push(2 * k);
            outgoing[v].push(2 * k + 1);
        }
        for (v, out) in outgoing.iter_mut().enumerate() {
            out.sort_by(|&a, &b| {
                let da = vertices[half_edges[a].target].sub(&vertices[v]);
                let db = vertices[half_edges[b].target].sub(&vertices[v]);
                angle_cmp(&da, &db)
            });
        }
        let mut position = vec![0usize; half_edges.len()];
        for out in &outgoing {
            for (i, &h) in out.iter().enumerate() {
                position[h] = i;
            }
        }
        for h in 0..half_edges.len() {
            let twin = half_edges[h].twin;
            let around = &outgoing[half_edges[h].target];
            let k = position[twin];
            half_edges[h].next = around[(k + around.len() - 1) % around.len()];
        }

        let (vertex_component, component_count) = components(vertices.len(), edges);
        Arrangement { vertices, half_edges, outgoing, vertex_component, component_count, segment_vertices }
    }

    pub fn edge_count(&self) -> usize {
        self.half_edges.len() / 2
    }

    /// Signed crossing of every undirected edge (in its `2k` direction) with
    /// a ray from `q` that avoids all vertices. Edges of `skip_component` are
    /// left at 0 and not checked for containing `q`.
    fn edge_signs(&self, q: &Point<S>, skip_component: Option<usize>) -> Result<Vec<i32>> {
        let ray = ray_avoiding(q, self.vertices.iter());
        let mut signs = vec![0; self.edge_count()];
        for (k, s) in signs.iter_mut().enumerate() {
            let h = &self.half_edges[2 * k];
            if Some(self.vertex_component[h.origin]) == skip_component {
                continue;
            }
            let (u, v) = (&self.vertices[h.origin], &self.vertices[h.target]);
            if on_segment(q, u, v) {
                return Err(Error::PointOnObstacle(h.parent));
            }
            *s = ray_cross_sign(&ray, u, v).expect("ray avoids vertices and q is off the edge");
        }
        Ok(signs)
    }

    fn half_edge_sign(signs: &[i32], h: usize) -> i32 {
        if h.is_multiple_of(2) {
            signs[h / 2]
        } else {
            -signs[h / 2]
        }
    }

    pub fn walk_points(&self, walk: &[usize]) -> ClosedWalk<S> {
        ClosedWalk::new(walk.iter().map(|&h| self.vertices[self.half_edges[h].origin].clone()).collect())
    }
}

fn components(n: usize, edges: &[(usize, usize, usize)]) -> (Vec<usize>, usize) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(u, v, _) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru.max(rv)] = ru.min(rv);
        }
    }
    let mut ids = HashMap::new();
    let comp = (0..n)
        .map(|v| {
            let r = find(&mut parent, v);
            let next = ids.len();
            *ids.entry(r).or_insert(next)
        })
        .collect();
    (comp, ids.len())
}

/// Arrangement of `segments`: vertices are the pairwise intersection points,
/// edges join consecutive vertices along each segment.
pub fn build_arrangement<S: Scalar>(segments: &[Segment<S>]) -> Result<Arrangement<S>> {
    if let Some(i) = segments.iter().position(Segment::is_degenerate) {
        return Err(Error::DegenerateSegment(i));
    }
    let mut vertices: Vec<Point<S>> = Vec::new();
    let mut index: HashMap<Point<S>, usize> = HashMap::new();
    let mut on_segment_ids: Vec<Vec<usize>> = vec![Vec::new(); segments.len()];
    for i in 0..segments.len() {
        for j in (i + 1)..segments.len() {
            match seg_intersect(&segments[i], &segments[j]) {
                SegIntersection::None => {}
                SegIntersection::Overlap => return Err(Error::DegenerateInput(i, j)),
                SegIntersection::Point(p) => {
                    let id = *index.entry(p.clone()).or_insert_with(|| {
                        vertices.push(p);
                        vertices.len() - 1
                    });
                    on_segment_ids[i].push(id);
                    on_segment_ids[j].push(id);
                }
            }
        }
    }
    let mut edges = Vec::new();
    for (s, ids) in on_segment_ids.iter_mut().enumerate() {
        ids.sort_unstable();
        ids.dedup();
        let seg = &segments[s];
        ids.sort_by_cached_key(|&v| seg.param(&vertices[v]));
        for w in ids.windows(2) {
            edges.push((w[0], w[1], s));
        }
    }
    Ok(Arrangement::from_planar_graph(vertices, &edges, on_segment_ids))
}

#[derive(Clone, Debug)]
pub struct Face<S> {
    /// Boundary walks as half-edge lists. A bounded face lists its own
    /// counter-clockwise boundary first, then the outer walks of components
    /// nested directly inside it.
    pub walks: Vec<Vec<usize>>,
    pub bounded: bool,
    pub contained_points: Vec<usize>,
    /// Twice the area enclosed by the face's own boundary (0 for the outer face).
    pub area2: S,
}

#[derive(Clone, Debug)]
pub struct FaceSet<S> {
    pub faces: Vec<Face<S>>,
    pub outer_face_id: usize,
    /// Global face on the left of each half-edge.
    pub half_edge_face: Vec<usize>,
    /// Face that contains each connected component.
    pub component_parent: Vec<usize>,
    /// Local unbounded walk of each component (None for edgeless components).
    pub component_outer_walk: Vec<Option<Vec<usize>>>,
}

pub fn extract_faces<S: Scalar>(arr: &Arrangement<S>) -> FaceSet<S> {
    let n_half = arr.half_edges.len();
    let mut walk_of = vec![usize::MAX; n_half];
    let mut walks: Vec<Vec<usize>> = Vec::new();
    for start in 0..n_half {
        if walk_of[start] != usize::MAX {
            continue;
        }
        let id = walks.len();
        let mut walk = Vec::new();
        let mut h = start;
        loop {
            walk_of[h] = id;
            walk.push(h);
            h = arr.half_edges[h].next;
            if h == start {
                break;
            }
        }
        walks.push(walk);
    }

    let areas: Vec<S> = walks
        .iter()
        .map(|w| {
            let pts: Vec<Point<S>> = w.iter().map(|&h| arr.vertices[arr.half_edges[h].origin].clone()).collect();
            crate::geom::signed_area2(&pts)
        })
        .collect();

    let mut component_outer_walk: Vec<Option<Vec<usize>>> = vec![None; arr.component_count];
    let outer_face_id = 0;
    let mut faces = vec![Face { walks: Vec::new(), bounded: false, contained_points: Vec::new(), area2: S::zero() }];
    let mut walk_face = vec![usize::MAX; walks.len()];
    for (w, walk) in walks.iter().enumerate() {
        let comp = arr.vertex_component[arr.half_edges[walk[0]].origin];
        if areas[w].is_positive() {
            walk_face[w] = faces.len();
            faces.push(Face { walks: vec![walk.clone()], bounded: true, contained_points: Vec::new(), area2: areas[w].clone() });
        } else {
            debug_assert!(component_outer_walk[comp].is_none(), "component {comp} has two unbounded walks");
            component_outer_walk[comp] = Some(walk.clone());
        }
    }

    // Each component's unbounded walk lies in the innermost bounded face of
    // another component that surrounds one of its vertices.
    let mut representative = vec![usize::MAX; arr.component_count];
    for (v, &c) in arr.vertex_component.iter().enumerate() {
        if representative[c] == usize::MAX {
            representative[c] = v;
        }
    }
    let mut component_parent = vec![outer_face_id; arr.component_count];
    for c in 0..arr.component_count {
        if arr.component_count == 1 {
            break;
        }
        let q = &arr.vertices[representative[c]];
        let signs = arr.edge_signs(q, Some(c)).expect("components are disjoint");
        component_parent[c] = innermost_claiming_face(&faces, &signs).unwrap_or(outer_face_id);
    }

    let mut half_edge_face = vec![usize::MAX; n_half];
    for (w, walk) in walks.iter().enumerate() {
        let face = if walk_face[w] != usize::MAX {
            walk_face[w]
        } else {
            component_parent[arr.vertex_component[arr.half_edges[walk[0]].origin]]
        };
        for &h in walk {
            half_edge_face[h] = face;
        }
    }
    for (c, walk) in component_outer_walk.iter().enumerate() {
        if let Some(walk) = walk {
            faces[component_parent[c]].walks.push(walk.clone());
        }
    }

    FaceSet { faces, outer_face_id, half_edge_face, component_parent, component_outer_walk }
}

fn innermost_claiming_face<S: Scalar>(faces: &[Face<S>], signs: &[i32]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (f, face) in faces.iter().enumerate() {
        if !face.bounded {
            continue;
        }
        let w: i32 = face.walks[0].iter().map(|&h| Arrangement::<S>::half_edge_sign(signs, h)).sum();
        if w != 0 {
            debug_assert_eq!(w, 1, "bounded face walks are simple ccw boundaries");
            if best.is_none_or(|b| face.area2 < faces[b].area2) {
                best = Some(f);
            }
        }
    }
    best
}

impl<S: Scalar> FaceSet<S> {
    /// Face containing `q`, which must not lie on an edge.
    pub fn locate(&self, arr: &Arrangement<S>, q: &Point<S>) -> Result<usize> {
        let signs = arr.edge_signs(q, None)?;
        Ok(innermost_claiming_face(&self.faces, &signs).unwrap_or(self.outer_face_id))
    }

    /// Locates every point and records it in its face.
    pub fn assign_points(&mut self, arr: &Arrangement<S>, points: &[Point<S>]) -> Result<Vec<usize>> {
        for f in &mut self.faces {
            f.contained_points.clear();
        }
        let mut located = Vec::with_capacity(points.len());
        for (i, q) in points.iter().enumerate() {
            let f = self.locate(arr, q)?;
            self.faces[f].contained_points.push(i);
            located.push(f);
        }
        Ok(located)
    }

    pub fn bounded_count(&self) -> usize {
        self.faces.iter().filter(|f| f.bounded).count()
    }

    /// Half-edge walks bounding the unbounded face, reversed so that every
    /// enclosed point has winding +1. Components nested in bounded faces are
    /// not part of the outer boundary.
    pub fn outer_boundary_half_edges(&self, arr: &Arrangement<S>) -> Vec<Vec<usize>> {
        self.component_outer_walk
            .iter()
            .enumerate()
            .filter(|(c, _)| self.component_parent[*c] == self.outer_face_id)
            .filter_map(|(_, w)| w.as_ref())
            .map(|walk| walk.iter().rev().map(|&h| arr.half_edges[h].twin).collect())
            .collect()
    }
}

/// Closed walks (counter-clockwise) bounding the unbounded face of the
/// arrangement of `segments`.
pub fn outer_boundary_walks<S: Scalar>(segments: &[Segment<S>]) -> Result<Vec<ClosedWalk<S>>> {
    let arr = build_arrangement(segments)?;
    let faces = extract_faces(&arr);
    Ok(faces.outer_boundary_half_edges(&arr).iter().map(|w| arr.walk_points(w)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::winding;
    use num_rational::BigRational;
    use num_traits::Signed;

    type Q = BigRational;

    fn seg(a: i64, b: i64, c: i64, d: i64) -> Segment<Q> {
        Segment::from_ints(a, b, c, d)
    }

    fn p(x: i64, y: i64) -> Point<Q> {
        Point::from_ints(x, y)
    }

    fn t1() -> Vec<Segment<Q>> {
        vec![seg(0, 0, 8, 0), seg(8, 0, 4, 6), seg(4, 6, 0, 0)]
    }

    fn triangle_at(dx: i64, dy: i64, k: i64) -> Vec<Segment<Q>> {
        vec![
            seg(dx, dy, dx + 8 * k, dy),
            seg(dx + 8 * k, dy, dx + 4 * k, dy + 6 * k),
            seg(dx + 4 * k, dy + 6 * k, dx, dy),
        ]
    }

    #[test]
    fn triangle_counts() {
        let arr = build_arrangement(&t1()).unwrap();
        assert_eq!(arr.vertices.len(), 3);
        assert_eq!(arr.edge_count(), 3);
        let faces = extract_faces(&arr);
        assert_eq!(faces.faces.len(), 2);
        assert_eq!(faces.bounded_count(), 1);
    }

    #[test]
    fn cross_has_one_vertex_and_no_edges() {
        let arr = build_arrangement(&[seg(0, 0, 2, 2), seg(0, 2, 2, 0)]).unwrap();
        assert_eq!(arr.vertices, vec![p(1, 1)]);
        assert_eq!(arr.edge_count(), 0);
        let faces = extract_faces(&arr);
        assert_eq!(faces.faces.len(), 1);
    }

    #[test]
    fn isolated_segment_is_empty() {
        let arr = build_arrangement(&[seg(0, 0, 3, 1)]).unwrap();
        assert!(arr.vertices.is_empty());
        assert_eq!(arr.edge_count(), 0);
    }

    #[test]
    fn overlap_is_rejected() {
        let err = build_arrangement(&[seg(0, 0, 2, 0), seg(5, 5, 6, 7), seg(1, 0, 3, 0)]).unwrap_err();
        assert_eq!(err, Error::DegenerateInput(0, 2));
    }

    #[test]
    fn two_triangles_merge_unbounded_faces() {
        let mut segs = triangle_at(0, 0, 1);
        segs.extend(triangle_at(20, 0, 1));
        let arr = build_arrangement(&segs).unwrap();
        assert_eq!(arr.component_count, 2);
        let faces = extract_faces(&arr);
        assert_eq!(faces.faces.len(), 3);
        assert_eq!(faces.faces[faces.outer_face_id].walks.len(), 2);
    }

    #[test]
    fn dangling_segment_inside_triangle() {
        let mut segs = t1();
        // touches the bottom edge at (4,0) and ends inside
        segs.push(seg(4, 0, 4, 3));
        let arr = build_arrangement(&segs).unwrap();
        let faces = extract_faces(&arr);
        assert_eq!(faces.faces.len(), 2);
        // (4,0)-(4,2) dangles into the triangle and is walked in both directions
        let mut segs = t1();
        segs.push(seg(4, -1, 4, 3));
        segs.push(seg(3, 2, 5, 2));
        let arr = build_arrangement(&segs).unwrap();
        let faces = extract_faces(&arr);
        assert_eq!(faces.faces.len(), 2);
        let dangling: Vec<usize> = (0..arr.half_edges.len()).filter(|&h| arr.half_edges[h].parent == 3).collect();
        assert_eq!(dangling.len(), 2);
        let inner = faces.half_edge_face[dangling[0]];
        assert!(faces.faces[inner].bounded);
        assert_eq!(faces.half_edge_face[dangling[1]], inner);
    }

    #[test]
    fn locate_examples() {
        let arr = build_arrangement(&t1()).unwrap();
        let faces = extract_faces(&arr);
        let inner = faces.locate(&arr, &p(4, 2)).unwrap();
        assert!(faces.faces[inner].bounded);
        assert_eq!(faces.locate(&arr, &p(100, 100)).unwrap(), faces.outer_face_id);
        assert_eq!(faces.locate(&arr, &p(4, 0)), Err(Error::PointOnObstacle(0)));

        let mut nested = triangle_at(-8, -8, 3);
        nested.extend(t1());
        let arr = build_arrangement(&nested).unwrap();
        let mut faces = extract_faces(&arr);
        assert_eq!(faces.faces.len(), 3);
        let located = faces.assign_points(&arr, &[p(4, 2), p(-4, -6), p(4, -2), p(50, 0)]).unwrap();
        assert_ne!(located[0], located[1]);
        assert_eq!(located[1], located[2], "both annulus points");
        assert_eq!(located[3], faces.outer_face_id);
        let annulus = &faces.faces[located[1]];
        assert_eq!(annulus.walks.len(), 2, "outer boundary plus the inner triangle");
    }

    #[test]
    fn every_half_edge_in_one_walk() {
        let mut segs = t1();
        segs.push(seg(4, -1, 4, 8));
        segs.push(seg(-1, 1, 9, 1));
        let arr = build_arrangement(&segs).unwrap();
        let faces = extract_faces(&arr);
        let mut seen = vec![0; arr.half_edges.len()];
        for f in &faces.faces {
            for w in &f.walks {
                for &h in w {
                    seen[h] += 1;
                }
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn outer_boundary_of_triangle() {
        let walks = outer_boundary_walks(&t1()).unwrap();
        assert_eq!(walks.len(), 1);
        assert_eq!(walks[0].len(), 3);
        assert!(walks[0].signed_area2().is_positive());
        assert_eq!(winding(&p(4, 2), &walks[0]), Ok(1));
    }

    #[test]
    fn outer_boundary_of_crossing_lines_winds_zero() {
        let segs = vec![seg(0, 0, 4, 0), seg(2, -2, 2, 2), seg(1, -1, 3, 1)];
        let walks = outer_boundary_walks(&segs).unwrap();
        for q in [p(10, 10), p(-3, 1), p(2, 5), p(1, 3)] {
            let total: i32 = walks.iter().map(|w| winding(&q, w).unwrap()).sum();
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn outer_boundary_of_hexagon_ring() {
        // sides of a hexagon, each extended past its corners
        let corners = [(4, 0), (2, 4), (-2, 4), (-4, 0), (-2, -4), (2, -4)];
        let segs: Vec<Segment<Q>> = (0..6)
            .map(|i| {
                let (ax, ay) = corners[i];
                let (bx, by) = corners[(i + 1) % 6];
                seg(2 * ax - (ax + bx) / 2, 2 * ay - (ay + by) / 2, 2 * bx - (ax + bx) / 2, 2 * by - (ay + by) / 2)
            })
            .collect();
        let walks = outer_boundary_walks(&segs).unwrap();
        assert_eq!(walks.len(), 1);
        assert_eq!(winding(&p(0, 0), &walks[0]), Ok(1));
        assert_eq!(winding(&p(30, 1), &walks[0]), Ok(0));
    }

    #[test]
    fn nested_component_is_not_outer_boundary() {
        let mut segs = triangle_at(-8, -8, 3);
        segs.extend(t1());
        let walks = outer_boundary_walks(&segs).unwrap();
        assert_eq!(walks.len(), 1);
        let total: i32 = walks.iter().map(|w| winding(&p(4, 2), w).unwrap()).sum();
        assert_eq!(total, 1);
    }
}

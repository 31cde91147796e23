//! Exact 2-D primitives: points, segments, unit disks, rays, closed walks,
//! and the orientation / crossing / winding predicates built on them.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(S::from_ratio(x, 1), S::from_ratio(y, 1))
    }

    pub fn from_ratios(x: (i64, i64), y: (i64, i64)) -> Self {
        Point::new(S::from_ratio(x.0, x.1), S::from_ratio(y.0, y.1))
    }

    pub fn sub(&self, other: &Point<S>) -> Vector<S> {
        Vector {
            x: self.x.minus(&other.x),
            y: self.y.minus(&other.y),
        }
    }

    pub fn translate(&self, v: &Vector<S>) -> Point<S> {
        Point::new(self.x.plus(&v.x), self.y.plus(&v.y))
    }

    pub fn dist2(&self, other: &Point<S>) -> S {
        self.sub(other).norm2()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64_lossy(), self.y.to_f64_lossy())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vector<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Vector<S> {
    pub fn new(x: S, y: S) -> Self {
        Vector { x, y }
    }

    pub fn cross(&self, other: &Vector<S>) -> S {
        self.x.times(&other.y).minus(&self.y.times(&other.x))
    }

    pub fn dot(&self, other: &Vector<S>) -> S {
        self.x.times(&other.x).plus(&self.y.times(&other.y))
    }

    pub fn norm2(&self) -> S {
        self.dot(self)
    }

    pub fn scale(&self, k: &S) -> Vector<S> {
        Vector::new(self.x.times(k), self.y.times(k))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// 0 for directions in [0, pi), 1 for [pi, 2 pi).
    fn half_plane(&self) -> u8 {
        if self.y.is_positive() || (self.y.is_zero() && self.x.is_positive()) {
            0
        } else {
            1
        }
    }
}

/// Counter-clockwise angular order of non-zero direction vectors, starting at
/// the positive x axis. Uses only sign tests.
pub fn angle_cmp<S: Scalar>(a: &Vector<S>, b: &Vector<S>) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match a.half_plane().cmp(&b.half_plane()) {
        Ordering::Equal => {
            let c = a.cross(b);
            if c.is_positive() {
                Ordering::Less
            } else if c.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
        other => other,
    }
}

fn sign<S: Scalar>(v: &S) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of `(b - a) x (c - a)`: +1 for a left turn, -1 for a right turn.
pub fn orient<S: Scalar>(a: &Point<S>, b: &Point<S>, c: &Point<S>) -> i32 {
    sign(&b.sub(a).cross(&c.sub(a)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment<S> {
    pub a: Point<S>,
    pub b: Point<S>,
}

impl<S: Scalar> Segment<S> {
    pub fn new(a: Point<S>, b: Point<S>) -> Self {
        Segment { a, b }
    }

    pub fn from_ints(ax: i64, ay: i64, bx: i64, by: i64) -> Self {
        Segment::new(Point::from_ints(ax, ay), Point::from_ints(bx, by))
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn direction(&self) -> Vector<S> {
        self.b.sub(&self.a)
    }

    /// Closed-segment membership.
    pub fn contains(&self, p: &Point<S>) -> bool {
        on_segment(p, &self.a, &self.b)
    }

    /// Position of `p` along the segment, scaled by `|b - a|^2`.
    pub fn param(&self, p: &Point<S>) -> S {
        p.sub(&self.a).dot(&self.direction())
    }
}

/// True when `p` lies on the closed segment `ab`.
pub fn on_segment<S: Scalar>(p: &Point<S>, a: &Point<S>, b: &Point<S>) -> bool {
    if orient(a, b, p) != 0 {
        return false;
    }
    // collinear: inside the bounding box
    let (lx, hx) = if a.x <= b.x { (&a.x, &b.x) } else { (&b.x, &a.x) };
    let (ly, hy) = if a.y <= b.y { (&a.y, &b.y) } else { (&b.y, &a.y) };
    &p.x >= lx && &p.x <= hx && &p.y >= ly && &p.y <= hy
}

/// True when `p` lies strictly between `a` and `b` on the segment.
pub fn in_segment_interior<S: Scalar>(p: &Point<S>, a: &Point<S>, b: &Point<S>) -> bool {
    p != a && p != b && on_segment(p, a, b)
}

/// Squared Euclidean distance from `p` to the closed segment `ab`.
pub fn dist2_point_segment<S: Scalar>(p: &Point<S>, a: &Point<S>, b: &Point<S>) -> S {
    let d = b.sub(a);
    let ap = p.sub(a);
    let t = ap.dot(&d);
    if !t.is_positive() {
        return ap.norm2();
    }
    let len2 = d.norm2();
    if t >= len2 {
        return p.dist2(b);
    }
    // |ap x d|^2 / |d|^2
    let c = ap.cross(&d);
    c.times(&c).over(&len2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegIntersection<S> {
    None,
    Point(Point<S>),
    Overlap,
}

pub fn seg_intersect<S: Scalar>(s1: &Segment<S>, s2: &Segment<S>) -> SegIntersection<S> {
    let d1 = s1.direction();
    let d2 = s2.direction();
    let denom = d1.cross(&d2);
    let w = s2.a.sub(&s1.a);
    if denom.is_zero() {
        if !w.cross(&d1).is_zero() {
            return SegIntersection::None;
        }
        // collinear: compare positions along s1
        let len2 = d1.norm2();
        let t0 = s1.param(&s2.a);
        let t1 = s1.param(&s2.b);
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let zero = S::zero();
        let start = if lo > zero { lo } else { zero.clone() };
        let end = if hi < len2 { hi } else { len2.clone() };
        if start < end {
            return SegIntersection::Overlap;
        }
        if start == end {
            // touching at exactly one endpoint
            for p in [&s1.a, &s1.b] {
                if p == &s2.a || p == &s2.b {
                    return SegIntersection::Point(p.clone());
                }
            }
        }
        return SegIntersection::None;
    }
    let t = w.cross(&d2).over(&denom);
    let u = w.cross(&d1).over(&denom);
    let zero = S::zero();
    let one = S::one();
    if t < zero || t > one || u < zero || u > one {
        return SegIntersection::None;
    }
    SegIntersection::Point(s1.a.translate(&d1.scale(&t)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnitDisk<S> {
    pub center: Point<S>,
}

impl<S: Scalar> UnitDisk<S> {
    pub fn new(center: Point<S>) -> Self {
        UnitDisk { center }
    }

    /// Closed-disk membership.
    pub fn contains(&self, p: &Point<S>) -> bool {
        self.center.dist2(p) <= S::one()
    }
}

/// Closed unit disks meet iff their centers are at most 2 apart.
pub fn disks_intersect<S: Scalar>(d1: &UnitDisk<S>, d2: &UnitDisk<S>) -> bool {
    d1.center.dist2(&d2.center) <= S::from_ratio(4, 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ray<S> {
    pub origin: Point<S>,
    pub direction: Vector<S>,
}

impl<S: Scalar> Ray<S> {
    pub fn new(origin: Point<S>, direction: Vector<S>) -> Self {
        assert!(!direction.is_zero(), "ray direction must be non-zero");
        Ray { origin, direction }
    }

    /// True when `p` lies on the ray, origin excluded.
    pub fn hits(&self, p: &Point<S>) -> bool {
        let w = p.sub(&self.origin);
        w.cross(&self.direction).is_zero() && w.dot(&self.direction).is_positive()
    }
}

/// Coprime lattice directions (1,0), (1,1), (1,2), (2,1), (1,3), (3,1), ...
/// ordered by coordinate sum.
pub fn lattice_directions() -> impl Iterator<Item = (i64, i64)> {
    (1i64..).flat_map(|s| (1..=s).map(move |a| (a, s - a))).filter(|&(a, b)| a.gcd(&b) == 1)
}

/// First lattice direction whose ray from `origin` misses every point in
/// `avoid`. Each point blocks at most one direction, so this terminates.
pub fn ray_avoiding<'a, S: Scalar>(origin: &Point<S>, avoid: impl IntoIterator<Item = &'a Point<S>> + Clone) -> Ray<S> {
    for (a, b) in lattice_directions() {
        let ray = Ray::new(origin.clone(), Vector::new(S::from_ratio(a, 1), S::from_ratio(b, 1)));
        if !avoid.clone().into_iter().any(|p| ray.hits(p)) {
            return ray;
        }
    }
    unreachable!("lattice directions are infinite")
}

/// Signed crossing of the directed edge `u -> v` with the open ray.
///
/// +1 when the edge crosses counter-clockwise (`direction x (v - u) > 0`),
/// -1 when clockwise, 0 when there is no crossing.
pub fn ray_cross_sign<S: Scalar>(ray: &Ray<S>, u: &Point<S>, v: &Point<S>) -> Result<i32> {
    let q = &ray.origin;
    if ray.hits(u) || ray.hits(v) {
        return Err(Error::DegenerateCrossing);
    }
    let e = v.sub(u);
    let denom = ray.direction.cross(&e);
    if denom.is_zero() {
        // parallel; a collinear edge on the forward ray would contain an
        // endpoint on the ray or the origin.
        if on_segment(q, u, v) {
            return Err(Error::DegenerateCrossing);
        }
        return Ok(0);
    }
    // crossing q + t d on the edge line, u + s e on the ray line
    let w = u.sub(q);
    let t = w.cross(&e).over(&denom);
    let s = w.cross(&ray.direction).over(&denom);
    let zero = S::zero();
    if s <= zero || s >= S::one() {
        return Ok(0);
    }
    if t.is_zero() {
        return Err(Error::DegenerateCrossing);
    }
    if t < zero {
        return Ok(0);
    }
    Ok(sign(&denom))
}

/// A closed polygonal walk; the closing edge from the last vertex back to the
/// first is implied.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedWalk<S> {
    pub vertices: Vec<Point<S>>,
}

impl<S: Scalar> ClosedWalk<S> {
    pub fn new(vertices: Vec<Point<S>>) -> Self {
        debug_assert!(vertices.len() >= 2, "a closed walk needs at least two edges");
        ClosedWalk { vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Point<S>, &Point<S>)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    pub fn reversed(&self) -> ClosedWalk<S> {
        let mut v = self.vertices.clone();
        v.reverse();
        ClosedWalk { vertices: v }
    }

    /// Twice the signed (shoelace) area.
    pub fn signed_area2(&self) -> S {
        signed_area2(&self.vertices)
    }

    pub fn on_boundary(&self, q: &Point<S>) -> bool {
        self.edges().any(|(u, v)| on_segment(q, u, v))
    }
}

pub fn signed_area2<S: Scalar>(vertices: &[Point<S>]) -> S {
    let n = vertices.len();
    let mut acc = S::zero();
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        acc = acc.plus(&p.x.times(&q.y).minus(&p.y.times(&q.x)));
    }
    acc
}

fn winding_with_ray<S: Scalar>(ray: &Ray<S>, w: &ClosedWalk<S>) -> Result<i32> {
    w.edges().map(|(u, v)| ray_cross_sign(ray, u, v)).sum()
}

/// Winding number of `q` with respect to the walk.
pub fn winding<S: Scalar>(q: &Point<S>, w: &ClosedWalk<S>) -> Result<i32> {
    if w.on_boundary(q) {
        return Err(Error::PointOnBoundary);
    }
    let ray = ray_avoiding(q, w.vertices.iter());
    let value = winding_with_ray(&ray, w)?;
    #[cfg(debug_assertions)]
    {
        let mut avoid: Vec<Point<S>> = w.vertices.clone();
        // a point on the first ray forces a different direction
        avoid.push(q.translate(&ray.direction));
        let other = ray_avoiding(q, avoid.iter());
        debug_assert_eq!(winding_with_ray(&other, w)?, value, "winding depends on ray");
    }
    Ok(value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

/// Even-odd ray casting.
pub fn point_in_polygon<S: Scalar>(q: &Point<S>, p: &ClosedWalk<S>) -> Location {
    if p.on_boundary(q) {
        return Location::Boundary;
    }
    let ray = ray_avoiding(q, p.vertices.iter());
    let crossings: i32 = p
        .edges()
        .map(|(u, v)| ray_cross_sign(&ray, u, v).expect("ray avoids every vertex").abs())
        .sum();
    if crossings % 2 == 1 {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Convex hull (counter-clockwise, no collinear points) by monotone chain.
pub fn convex_hull<S: Scalar>(points: &[Point<S>]) -> Vec<Point<S>> {
    let mut pts: Vec<Point<S>> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point<S>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point<S>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Closed containment in a counter-clockwise convex polygon.
pub fn in_convex_polygon<S: Scalar>(q: &Point<S>, hull: &[Point<S>]) -> bool {
    let n = hull.len();
    (0..n).all(|i| orient(&hull[i], &hull[(i + 1) % n], q) >= 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use num_rational::{BigRational, Ratio};
    use proptest::prelude::*;

    type P = Point<BigRational>;

    fn p(x: i64, y: i64) -> P {
        Point::from_ints(x, y)
    }

    fn square() -> ClosedWalk<BigRational> {
        ClosedWalk::new(vec![p(0, 0), p(4, 0), p(4, 4), p(0, 4)])
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orient(&p(0, 0), &p(1, 0), &p(0, 1)), 1);
        assert_eq!(orient(&p(0, 0), &p(1, 0), &p(2, 0)), 0);
        assert_eq!(orient(&p(0, 0), &p(0, 1), &p(1, 0)), -1);
    }

    #[test]
    fn orientation_with_machine_rationals() {
        type Q = Ratio<i64>;
        let a: Point<Q> = Point::from_ints(0, 0);
        let b: Point<Q> = Point::from_ratios((1, 3), (0, 1));
        let c: Point<Q> = Point::from_ratios((2, 3), (0, 1));
        assert_eq!(orient(&a, &b, &c), 0);
    }

    #[test]
    fn segment_intersection_examples() {
        let s = |a, b, c, d| Segment::<BigRational>::from_ints(a, b, c, d);
        assert_eq!(seg_intersect(&s(0, 0, 2, 2), &s(0, 2, 2, 0)), SegIntersection::Point(p(1, 1)));
        assert_eq!(seg_intersect(&s(0, 0, 1, 0), &s(0, 1, 1, 1)), SegIntersection::None);
        assert_eq!(seg_intersect(&s(0, 0, 2, 0), &s(1, 0, 3, 0)), SegIntersection::Overlap);
        // shared endpoint and T-touch
        assert_eq!(seg_intersect(&s(0, 0, 2, 0), &s(2, 0, 3, 5)), SegIntersection::Point(p(2, 0)));
        assert_eq!(seg_intersect(&s(0, 0, 4, 0), &s(2, 0, 2, 5)), SegIntersection::Point(p(2, 0)));
        // collinear, touching at one endpoint
        assert_eq!(seg_intersect(&s(0, 0, 2, 0), &s(2, 0, 5, 0)), SegIntersection::Point(p(2, 0)));
        // collinear, disjoint
        assert_eq!(seg_intersect(&s(0, 0, 1, 0), &s(2, 0, 5, 0)), SegIntersection::None);
    }

    #[test]
    fn disk_intersection_examples() {
        let d = |x, y| UnitDisk::new(p(x, y));
        assert!(disks_intersect(&d(0, 0), &d(1, 0)));
        assert!(!disks_intersect(&d(0, 0), &d(3, 0)));
        assert!(disks_intersect(&d(0, 0), &d(2, 0)));
    }

    #[test]
    fn ray_crossing_examples() {
        let ray = Ray::new(p(0, 0), Vector::new(BigRational::from_ratio(1, 1), BigRational::from_ratio(0, 1)));
        assert_eq!(ray_cross_sign(&ray, &p(1, -1), &p(1, 1)), Ok(1));
        assert_eq!(ray_cross_sign(&ray, &p(1, 1), &p(1, -1)), Ok(-1));
        assert_eq!(ray_cross_sign(&ray, &p(-1, -1), &p(-1, 1)), Ok(0));
        assert_eq!(ray_cross_sign(&ray, &p(1, 0), &p(1, 1)), Err(Error::DegenerateCrossing));
        assert_eq!(ray_cross_sign(&ray, &p(1, 0), &p(3, 0)), Err(Error::DegenerateCrossing));
        assert_eq!(ray_cross_sign(&ray, &p(-3, 0), &p(-1, 0)), Ok(0));
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding(&p(1, 1), &square()), Ok(1));
        assert_eq!(winding(&p(5, 5), &square()), Ok(0));
        assert_eq!(winding(&p(1, 1), &square().reversed()), Ok(-1));
        assert_eq!(winding(&p(4, 2), &square()), Err(Error::PointOnBoundary));
        // doubly wound square
        let mut twice = square().vertices;
        twice.extend(square().vertices);
        assert_eq!(winding(&p(1, 1), &ClosedWalk::new(twice)), Ok(2));
    }

    #[test]
    fn point_in_polygon_examples() {
        assert_eq!(point_in_polygon(&p(1, 1), &square()), Location::Inside);
        assert_eq!(point_in_polygon(&p(4, 2), &square()), Location::Boundary);
        assert_eq!(point_in_polygon(&p(-1, 0), &square()), Location::Outside);
        // (2,2) sees the corner (4,4) along (1,1); the fallback ray decides
        assert_eq!(point_in_polygon(&p(2, 2), &square()), Location::Inside);
    }

    #[test]
    fn lattice_direction_sequence() {
        let first: Vec<_> = lattice_directions().take(6).collect();
        assert_eq!(first, vec![(1, 0), (1, 1), (1, 2), (2, 1), (1, 3), (3, 1)]);
    }

    #[test]
    fn point_segment_distance() {
        let d = dist2_point_segment(&p(1, 1), &p(0, 0), &p(2, 0));
        assert_eq!(d, BigRational::from_ratio(1, 1));
        let d = dist2_point_segment(&p(3, 1), &p(0, 0), &p(2, 0));
        assert_eq!(d, BigRational::from_ratio(2, 1));
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let hull = convex_hull(&[p(0, 0), p(2, 0), p(1, 1), p(2, 2), p(0, 2), p(1, 0)]);
        assert_eq!(hull, vec![p(0, 0), p(2, 0), p(2, 2), p(0, 2)]);
        assert!(in_convex_polygon(&p(1, 1), &hull));
        assert!(!in_convex_polygon(&p(3, 1), &hull));
    }

    fn small_point() -> impl Strategy<Value = P> {
        (-20i64..20, 1i64..4, -20i64..20, 1i64..4).prop_map(|(a, b, c, d)| Point::from_ratios((a, b), (c, d)))
    }

    /// Random simple polygon: a star-shaped ring of rational vertices around
    /// the origin with strictly increasing angles.
    fn star_polygon() -> impl Strategy<Value = ClosedWalk<BigRational>> {
        proptest::collection::vec(1i64..12, 5..9).prop_map(|radii| {
            let n = radii.len();
            let verts = radii
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    let theta = std::f64::consts::TAU * i as f64 / n as f64;
                    let x = (r as f64 * theta.cos() * 8.0).round() as i64;
                    let y = (r as f64 * theta.sin() * 8.0).round() as i64;
                    Point::from_ratios((x, 8), (y, 8))
                })
                .collect();
            ClosedWalk::new(verts)
        })
    }

    proptest! {
        #[test]
        fn orient_antisymmetric(a in small_point(), b in small_point(), c in small_point()) {
            prop_assert_eq!(orient(&a, &b, &c), -orient(&a, &c, &b));
        }

        #[test]
        fn intersection_symmetric(a in small_point(), b in small_point(), c in small_point(), d in small_point()) {
            prop_assume!(a != b && c != d);
            let s1 = Segment::new(a, b);
            let s2 = Segment::new(c, d);
            prop_assert_eq!(seg_intersect(&s1, &s2), seg_intersect(&s2, &s1));
        }

        #[test]
        fn winding_ray_independent(poly in star_polygon(), q in small_point()) {
            prop_assume!(!poly.on_boundary(&q));
            let mut avoid = poly.vertices.clone();
            let mut values = Vec::new();
            for _ in 0..3 {
                let ray = ray_avoiding(&q, avoid.iter());
                values.push(winding_with_ray(&ray, &poly).unwrap());
                avoid.push(q.translate(&ray.direction));
            }
            prop_assert!(values.iter().all(|&v| v == values[0]));
            prop_assert_eq!(winding(&q, &poly.reversed()).unwrap(), -values[0]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn winding_agrees_with_parity(poly in star_polygon(), q in small_point()) {
            // star polygons are simple; orient them ccw first
            let poly = if poly.signed_area2().is_negative() { poly.reversed() } else { poly };
            match point_in_polygon(&q, &poly) {
                Location::Boundary => prop_assert!(winding(&q, &poly).is_err()),
                Location::Inside => prop_assert_eq!(winding(&q, &poly).unwrap(), 1),
                Location::Outside => prop_assert_eq!(winding(&q, &poly).unwrap(), 0),
            }
        }
    }
}

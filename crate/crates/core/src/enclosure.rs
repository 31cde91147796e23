//! Enclosure tests: the exact face-based oracle, the σ-segment reduction for
//! unit disks, and an independent raster flood-fill used to cross-check both.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::arrangement::{build_arrangement, extract_faces, Arrangement, FaceSet};
use crate::error::{Error, Result};
use crate::geom::{disks_intersect, dist2_point_segment, on_segment, seg_intersect, Point, SegIntersection, Segment, UnitDisk};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    UnitDisks,
    Segments,
}

impl std::fmt::Display for ObstacleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ObstacleKind::UnitDisks => "unit_disks",
            ObstacleKind::Segments => "segments",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ObstacleSet<S> {
    UnitDisks(Vec<UnitDisk<S>>),
    Segments(Vec<Segment<S>>),
}

impl<S: Scalar> ObstacleSet<S> {
    pub fn kind(&self) -> ObstacleKind {
        match self {
            ObstacleSet::UnitDisks(_) => ObstacleKind::UnitDisks,
            ObstacleSet::Segments(_) => ObstacleKind::Segments,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ObstacleSet::UnitDisks(d) => d.len(),
            ObstacleSet::Segments(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The obstacles at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        match self {
            ObstacleSet::UnitDisks(d) => ObstacleSet::UnitDisks(indices.iter().map(|&i| d[i].clone()).collect()),
            ObstacleSet::Segments(s) => ObstacleSet::Segments(indices.iter().map(|&i| s[i].clone()).collect()),
        }
    }

    /// Whether obstacles `i` and `j` touch.
    pub fn intersects(&self, i: usize, j: usize) -> bool {
        match self {
            ObstacleSet::UnitDisks(d) => disks_intersect(&d[i], &d[j]),
            ObstacleSet::Segments(s) => !matches!(seg_intersect(&s[i], &s[j]), SegIntersection::None),
        }
    }
}

/// Centre-to-centre segments of all intersecting pairs, with the pair.
pub fn sigma_segments<S: Scalar>(disks: &[UnitDisk<S>]) -> Vec<(Segment<S>, (usize, usize))> {
    let mut out = Vec::new();
    for i in 0..disks.len() {
        for j in (i + 1)..disks.len() {
            if disks_intersect(&disks[i], &disks[j]) {
                out.push((Segment::new(disks[i].center.clone(), disks[j].center.clone()), (i, j)));
            }
        }
    }
    out
}

/// Arrangement of a segment set with its faces, for repeated queries.
#[derive(Clone, Debug)]
pub struct SegmentEnclosure<S> {
    segments: Vec<Segment<S>>,
    arrangement: Arrangement<S>,
    faces: FaceSet<S>,
}

impl<S: Scalar> SegmentEnclosure<S> {
    pub fn new(segments: Vec<Segment<S>>) -> Result<Self> {
        let arrangement = build_arrangement(&segments)?;
        let faces = extract_faces(&arrangement);
        Ok(SegmentEnclosure { segments, arrangement, faces })
    }

    pub fn is_enclosed(&self, q: &Point<S>) -> Result<bool> {
        if let Some(i) = self.segments.iter().position(|s| on_segment(q, &s.a, &s.b)) {
            return Err(Error::PointOnObstacle(i));
        }
        let f = self.faces.locate(&self.arrangement, q)?;
        Ok(self.faces.faces[f].bounded)
    }

    pub fn arrangement(&self) -> &Arrangement<S> {
        &self.arrangement
    }

    pub fn faces(&self) -> &FaceSet<S> {
        &self.faces
    }
}

/// Exact enclosure oracle for either obstacle kind.
#[derive(Clone, Debug)]
pub struct Enclosure<S> {
    disks: Option<Vec<UnitDisk<S>>>,
    segments: SegmentEnclosure<S>,
}

impl<S: Scalar> Enclosure<S> {
    pub fn new(obstacles: &ObstacleSet<S>) -> Result<Self> {
        match obstacles {
            ObstacleSet::Segments(s) => Ok(Enclosure { disks: None, segments: SegmentEnclosure::new(s.clone())? }),
            ObstacleSet::UnitDisks(d) => {
                let sigma = sigma_segments(d).into_iter().map(|(s, _)| s).collect();
                Ok(Enclosure { disks: Some(d.clone()), segments: SegmentEnclosure::new(sigma)? })
            }
        }
    }

    pub fn is_enclosed(&self, q: &Point<S>) -> Result<bool> {
        match &self.disks {
            None => self.segments.is_enclosed(q),
            Some(disks) => {
                if let Some(i) = disks.iter().position(|d| d.contains(q)) {
                    return Err(Error::PointCoveredByObstacle(i));
                }
                // q is outside the union, and every σ-segment lies inside it.
                self.segments.is_enclosed(q)
            }
        }
    }
}

pub fn is_enclosed_segments<S: Scalar>(q: &Point<S>, segments: &[Segment<S>]) -> Result<bool> {
    SegmentEnclosure::new(segments.to_vec())?.is_enclosed(q)
}

pub fn is_enclosed_unit_disks<S: Scalar>(q: &Point<S>, disks: &[UnitDisk<S>]) -> Result<bool> {
    Enclosure::new(&ObstacleSet::UnitDisks(disks.to_vec()))?.is_enclosed(q)
}

pub fn enclosed_subset<S: Scalar>(points: &[Point<S>], obstacles: &ObstacleSet<S>) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let oracle = Enclosure::new(obstacles)?;
    let mut out = Vec::new();
    for (i, q) in points.iter().enumerate() {
        if oracle.is_enclosed(q)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Squared minima of the distances that bound how fine a raster must be to
/// see every gap in an instance.
#[derive(Clone, Debug)]
pub struct FeatureSeparation<S> {
    /// Centre distances of disjoint disk pairs (gap = d − 2).
    disk_pair_d2: Option<S>,
    /// Point-to-centre distances (gap = d − 1).
    point_disk_d2: Option<S>,
    /// Vertex-to-segment and point-to-segment distances (gap = d).
    segment_d2: Option<S>,
}

fn keep_min<S: Scalar>(slot: &mut Option<S>, value: S) {
    if slot.as_ref().is_none_or(|m| value < *m) {
        *slot = Some(value);
    }
}

impl<S: Scalar> FeatureSeparation<S> {
    pub fn measure(points: &[Point<S>], obstacles: &ObstacleSet<S>) -> Self {
        let mut sep = FeatureSeparation { disk_pair_d2: None, point_disk_d2: None, segment_d2: None };
        match obstacles {
            ObstacleSet::UnitDisks(disks) => {
                let four = S::from_ratio(4, 1);
                for i in 0..disks.len() {
                    for j in (i + 1)..disks.len() {
                        let d2 = disks[i].center.dist2(&disks[j].center);
                        if d2 > four {
                            keep_min(&mut sep.disk_pair_d2, d2);
                        }
                    }
                    for q in points {
                        keep_min(&mut sep.point_disk_d2, q.dist2(&disks[i].center));
                    }
                }
            }
            ObstacleSet::Segments(segs) => {
                let mut vertices: Vec<Point<S>> = segs.iter().flat_map(|s| [s.a.clone(), s.b.clone()]).collect();
                for i in 0..segs.len() {
                    for j in (i + 1)..segs.len() {
                        if let SegIntersection::Point(p) = seg_intersect(&segs[i], &segs[j]) {
                            vertices.push(p);
                        }
                    }
                }
                vertices.sort();
                vertices.dedup();
                for v in &vertices {
                    for s in segs {
                        if !s.contains(v) {
                            keep_min(&mut sep.segment_d2, dist2_point_segment(v, &s.a, &s.b));
                        }
                    }
                }
                for q in points {
                    for s in segs {
                        keep_min(&mut sep.segment_d2, dist2_point_segment(q, &s.a, &s.b));
                    }
                }
            }
        }
        sep
    }

    /// Whether every feature gap is at least `delta`; exact.
    pub fn at_least(&self, delta: &S) -> bool {
        let one = S::one();
        let two = S::from_ratio(2, 1);
        let sq = |x: S| x.times(&x);
        self.disk_pair_d2.as_ref().is_none_or(|d2| *d2 >= sq(two.plus(delta)))
            && self.point_disk_d2.as_ref().is_none_or(|d2| *d2 >= sq(one.plus(delta)))
            && self.segment_d2.as_ref().is_none_or(|d2| *d2 >= sq(delta.clone()))
    }

    /// Floating-point value of the smallest gap (infinite when there is none).
    pub fn approx(&self) -> f64 {
        let mut m = f64::INFINITY;
        if let Some(d2) = &self.disk_pair_d2 {
            m = m.min(d2.to_f64_lossy().sqrt() - 2.0);
        }
        if let Some(d2) = &self.point_disk_d2 {
            m = m.min(d2.to_f64_lossy().sqrt() - 1.0);
        }
        if let Some(d2) = &self.segment_d2 {
            m = m.min(d2.to_f64_lossy().sqrt());
        }
        m
    }
}

const FINEST_PITCH_LOG2: u32 = 14;

/// Largest power of two `h ≤ min(δ₀/4, 1/2)` for the flood-fill oracle.
pub fn flood_resolution<S: Scalar>(points: &[Point<S>], obstacles: &ObstacleSet<S>) -> Result<S> {
    let sep = FeatureSeparation::measure(points, obstacles);
    let four = S::from_ratio(4, 1);
    let mut h = S::from_ratio(1, 2);
    for _ in 0..FINEST_PITCH_LOG2 {
        if sep.at_least(&h.times(&four)) {
            return Ok(h);
        }
        h = h.half();
    }
    Err(Error::ResolutionTooCoarse)
}

pub fn grid_flood_oracle<S: Scalar>(q: &Point<S>, obstacles: &ObstacleSet<S>, h: &S) -> Result<bool> {
    Ok(grid_flood_oracle_many(std::slice::from_ref(q), obstacles, h)?[0])
}

/// Flood-fill verdicts for several points sharing one raster.
pub fn grid_flood_oracle_many<S: Scalar>(points: &[Point<S>], obstacles: &ObstacleSet<S>, h: &S) -> Result<Vec<bool>> {
    assert!(h.is_positive(), "pitch must be positive");
    for q in points {
        match obstacles {
            ObstacleSet::UnitDisks(d) => {
                if let Some(i) = d.iter().position(|d| d.contains(q)) {
                    return Err(Error::PointCoveredByObstacle(i));
                }
            }
            ObstacleSet::Segments(s) => {
                if let Some(i) = s.iter().position(|s| on_segment(q, &s.a, &s.b)) {
                    return Err(Error::PointOnObstacle(i));
                }
            }
        }
    }
    if !FeatureSeparation::measure(points, obstacles).at_least(&h.times(&S::from_ratio(4, 1))) {
        return Err(Error::ResolutionTooCoarse);
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let raster = Raster::new(points, obstacles, h.clone());
    let reached = raster.flood_from_border();
    Ok(points.iter().map(|q| !reached[raster.cell_of(q)]).collect())
}

/// A square grid of pitch `h` whose cells are covered when their centre is
/// within `h·√2/2` of an obstacle, so a free cell never touches one.
struct Raster<S> {
    h: S,
    x0: S,
    y0: S,
    nx: usize,
    ny: usize,
    covered: Vec<bool>,
}

const MARGIN: i64 = 2;

impl<S: Scalar> Raster<S> {
    fn new(points: &[Point<S>], obstacles: &ObstacleSet<S>, h: S) -> Self {
        let one = S::one();
        let mut xs: Vec<S> = points.iter().map(|p| p.x.clone()).collect();
        let mut ys: Vec<S> = points.iter().map(|p| p.y.clone()).collect();
        match obstacles {
            ObstacleSet::UnitDisks(d) => {
                for d in d {
                    xs.extend([d.center.x.minus(&one), d.center.x.plus(&one)]);
                    ys.extend([d.center.y.minus(&one), d.center.y.plus(&one)]);
                }
            }
            ObstacleSet::Segments(s) => {
                for s in s {
                    xs.extend([s.a.x.clone(), s.b.x.clone()]);
                    ys.extend([s.a.y.clone(), s.b.y.clone()]);
                }
            }
        }
        let margin = S::from_ratio(MARGIN, 1);
        let lo = |v: &[S]| v.iter().min().unwrap().minus(&margin).over(&h).floor_int();
        let hi = |v: &[S]| v.iter().max().unwrap().plus(&margin).over(&h).floor_int() + 1;
        let (ix0, iy0) = (lo(&xs), lo(&ys));
        let nx = (hi(&xs) - ix0 + 1) as usize;
        let ny = (hi(&ys) - iy0 + 1) as usize;
        let mut raster = Raster {
            x0: S::from_i64(ix0).unwrap().times(&h),
            y0: S::from_i64(iy0).unwrap().times(&h),
            h,
            nx,
            ny,
            covered: vec![false; nx * ny],
        };
        raster.rasterize(obstacles);
        raster
    }

    fn centre(&self, i: usize, j: usize) -> Point<S> {
        let half = S::from_ratio(1, 2);
        let k = |n: usize| S::from_usize(n).unwrap().plus(&half).times(&self.h);
        Point::new(self.x0.plus(&k(i)), self.y0.plus(&k(j)))
    }

    fn cell_of(&self, p: &Point<S>) -> usize {
        let i = p.x.minus(&self.x0).over(&self.h).floor_int() as usize;
        let j = p.y.minus(&self.y0).over(&self.h).floor_int() as usize;
        j * self.nx + i
    }

    fn column_range(&self, lo: f64, hi: f64, x: bool) -> std::ops::Range<usize> {
        let (origin, n) = if x { (self.x0.to_f64_lossy(), self.nx) } else { (self.y0.to_f64_lossy(), self.ny) };
        let h = self.h.to_f64_lossy();
        let a = (((lo - origin) / h).floor() - 1.0).max(0.0) as usize;
        let b = ((((hi - origin) / h).ceil() + 1.0).max(0.0) as usize).min(n);
        a.min(b)..b
    }

    fn rasterize(&mut self, obstacles: &ObstacleSet<S>) {
        let hf = self.h.to_f64_lossy();
        let r = hf * std::f64::consts::FRAC_1_SQRT_2;
        let h2 = self.h.times(&self.h);
        let half_h2 = h2.half();
        let two_h2 = h2.plus(&h2);
        let x0 = self.x0.to_f64_lossy();
        let y0 = self.y0.to_f64_lossy();
        let cf = |origin: f64, k: usize| origin + (k as f64 + 0.5) * hf;
        match obstacles {
            ObstacleSet::UnitDisks(disks) => {
                let reach = (1.0 + r) * (1.0 + r);
                let one = S::one();
                for d in disks {
                    let (cx, cy) = d.center.to_f64();
                    let cols = self.column_range(cx - 1.0 - r, cx + 1.0 + r, true);
                    let rows = self.column_range(cy - 1.0 - r, cy + 1.0 + r, false);
                    for j in rows {
                        let py = cf(y0, j);
                        for i in cols.clone() {
                            let idx = j * self.nx + i;
                            if self.covered[idx] {
                                continue;
                            }
                            let px = cf(x0, i);
                            let d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy);
                            let slack = 1e-9 * (1.0 + reach);
                            self.covered[idx] = if d2 < reach - slack {
                                true
                            } else if d2 > reach + slack {
                                false
                            } else {
                                // |p − c| ≤ 1 + h/√2  ⇔  L ≤ 0 or L² ≤ 2h², L = |p − c|² − 1 − h²/2
                                let l = self.centre(i, j).dist2(&d.center).minus(&one).minus(&half_h2);
                                !l.is_positive() || l.times(&l) <= two_h2
                            };
                        }
                    }
                }
            }
            ObstacleSet::Segments(segs) => {
                let limit = r * r;
                for s in segs {
                    let (ax, ay) = s.a.to_f64();
                    let (bx, by) = s.b.to_f64();
                    for i in self.column_range(ax.min(bx) - r, ax.max(bx) + r, true) {
                        let px = cf(x0, i);
                        let (ylo, yhi) = slab_y_range((ax, ay), (bx, by), px - hf - r, px + hf + r);
                        if ylo > yhi {
                            continue;
                        }
                        for j in self.column_range(ylo - r, yhi + r, false) {
                            let idx = j * self.nx + i;
                            if self.covered[idx] {
                                continue;
                            }
                            let py = cf(y0, j);
                            let d2 = dist2_point_segment_f64((px, py), (ax, ay), (bx, by));
                            let slack = 1e-9 * (1.0 + limit);
                            self.covered[idx] = if d2 < limit - slack {
                                true
                            } else if d2 > limit + slack {
                                false
                            } else {
                                dist2_point_segment(&self.centre(i, j), &s.a, &s.b) <= half_h2
                            };
                        }
                    }
                }
            }
        }
    }

    /// Free cells reachable by 4-neighbour steps from the grid border.
    fn flood_from_border(&self) -> Vec<bool> {
        let (nx, ny) = (self.nx, self.ny);
        let mut reached = vec![false; nx * ny];
        let mut queue = VecDeque::new();
        let mut seed = |idx: usize, reached: &mut Vec<bool>| {
            if !self.covered[idx] && !reached[idx] {
                reached[idx] = true;
                queue.push_back(idx);
            }
        };
        for i in 0..nx {
            seed(i, &mut reached);
            seed((ny - 1) * nx + i, &mut reached);
        }
        for j in 0..ny {
            seed(j * nx, &mut reached);
            seed(j * nx + nx - 1, &mut reached);
        }
        while let Some(idx) = queue.pop_front() {
            let (i, j) = (idx % nx, idx / nx);
            let mut visit = |n: usize| {
                if !self.covered[n] && !reached[n] {
                    reached[n] = true;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(idx - 1);
            }
            if i + 1 < nx {
                visit(idx + 1);
            }
            if j > 0 {
                visit(idx - nx);
            }
            if j + 1 < ny {
                visit(idx + nx);
            }
        }
        reached
    }
}

/// y-extent of the part of segment `a`–`b` with x in `[xl, xr]`; empty
/// (lo > hi) when there is none.
fn slab_y_range(a: (f64, f64), b: (f64, f64), xl: f64, xr: f64) -> (f64, f64) {
    let dx = b.0 - a.0;
    if dx.abs() < 1e-12 {
        return if a.0 >= xl && a.0 <= xr { (a.1.min(b.1), a.1.max(b.1)) } else { (1.0, 0.0) };
    }
    let (t1, t2) = ((xl - a.0) / dx, (xr - a.0) / dx);
    let (t1, t2) = (t1.min(t2).max(0.0), t1.max(t2).min(1.0));
    if t1 > t2 {
        return (1.0, 0.0);
    }
    let (y1, y2) = (a.1 + t1 * (b.1 - a.1), a.1 + t2 * (b.1 - a.1));
    (y1.min(y2), y1.max(y2))
}

fn dist2_point_segment_f64(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (ex, ey) = (a.0 + t * dx - p.0, a.1 + t * dy - p.1);
    ex * ex + ey * ey
}

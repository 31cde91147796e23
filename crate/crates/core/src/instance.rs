use std::collections::HashMap;

use crate::enclosure::{sigma_segments, ObstacleKind, ObstacleSet};
use crate::error::{Error, Result};
use crate::geom::{in_segment_interior, on_segment, orient, seg_intersect, Point, SegIntersection, Segment, UnitDisk};
use crate::scalar::Scalar;

/// Points to enclose together with the candidate obstacles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance<S> {
    pub points: Vec<Point<S>>,
    pub obstacles: ObstacleSet<S>,
}

impl<S: Scalar> Instance<S> {
    pub fn new(points: Vec<Point<S>>, obstacles: ObstacleSet<S>) -> Self {
        Instance { points, obstacles }
    }

    pub fn kind(&self) -> ObstacleKind {
        self.obstacles.kind()
    }

    /// Rejects inputs outside the general position the solvers assume.
    pub fn validate(&self) -> Result<()> {
        match &self.obstacles {
            ObstacleSet::UnitDisks(d) => validate_disks(&self.points, d),
            ObstacleSet::Segments(s) => validate_segments(&self.points, s),
        }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }
}

fn validate_disks<S: Scalar>(points: &[Point<S>], disks: &[UnitDisk<S>]) -> Result<()> {
    let mut seen: HashMap<&Point<S>, usize> = HashMap::new();
    for (j, d) in disks.iter().enumerate() {
        if let Some(&i) = seen.get(&d.center) {
            return Err(Error::DegenerateInput(i, j));
        }
        seen.insert(&d.center, j);
    }
    for (i, q) in points.iter().enumerate() {
        if let Some(j) = disks.iter().position(|d| d.contains(q)) {
            return Err(Error::InvalidInstance(format!("point {i} lies in disk {j}")));
        }
    }
    let sigma = sigma_segments(disks);
    for (s, (a, b)) in &sigma {
        if let Some(i) = points.iter().position(|q| orient(&s.a, &s.b, q) == 0) {
            return Err(Error::InvalidInstance(format!("point {i} is collinear with the centres of disks {a} and {b}")));
        }
        if let Some(k) = disks.iter().position(|d| in_segment_interior(&d.center, &s.a, &s.b)) {
            return Err(Error::InvalidInstance(format!("centre of disk {k} lies on the segment joining disks {a} and {b}")));
        }
    }
    let mut through: HashMap<Point<S>, Vec<usize>> = HashMap::new();
    for i in 0..sigma.len() {
        for j in (i + 1)..sigma.len() {
            if let SegIntersection::Point(x) = seg_intersect(&sigma[i].0, &sigma[j].0) {
                if x != sigma[i].0.a && x != sigma[i].0.b {
                    let list = through.entry(x).or_default();
                    for k in [i, j] {
                        if !list.contains(&k) {
                            list.push(k);
                        }
                    }
                }
            }
        }
    }
    if let Some(list) = through.values().find(|l| l.len() >= 3) {
        let pairs: Vec<(usize, usize)> = list.iter().map(|&k| sigma[k].1).collect();
        return Err(Error::InvalidInstance(format!("centre segments of pairs {pairs:?} are concurrent")));
    }
    Ok(())
}

fn validate_segments<S: Scalar>(points: &[Point<S>], segments: &[Segment<S>]) -> Result<()> {
    if let Some(i) = segments.iter().position(Segment::is_degenerate) {
        return Err(Error::DegenerateSegment(i));
    }
    for i in 0..segments.len() {
        for j in (i + 1)..segments.len() {
            if seg_intersect(&segments[i], &segments[j]) == SegIntersection::Overlap {
                return Err(Error::DegenerateInput(i, j));
            }
        }
    }
    for (i, q) in points.iter().enumerate() {
        if let Some(j) = segments.iter().position(|s| on_segment(q, &s.a, &s.b)) {
            return Err(Error::InvalidInstance(format!("point {i} lies on segment {j}")));
        }
    }
    Ok(())
}

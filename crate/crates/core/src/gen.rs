//! Seeded instance generators. Every instance is built incrementally, each
//! new point or obstacle resampled until the instance stays valid and keeps
//! a minimum feature gap.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::enclosure::{FeatureSeparation, ObstacleKind, ObstacleSet};
use crate::error::{Error, Result};
use crate::geom::{orient, Point, Segment, UnitDisk};
use crate::instance::Instance;
use crate::scalar::Scalar;

pub const MAX_REJECTIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Random,
    Ring,
    Nested,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Random => "random",
            Structure::Ring => "ring",
            Structure::Nested => "nested",
        })
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Structure::Random),
            "ring" => Ok(Structure::Ring),
            "nested" => Ok(Structure::Nested),
            _ => Err(Error::Parse(format!("unknown structure {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub kind: ObstacleKind,
    pub obstacles: usize,
    pub points: usize,
    pub seed: u64,
    pub structure: Structure,
}

/// Smallest feature gap a generated instance may have.
pub fn min_separation<S: Scalar>(kind: ObstacleKind) -> S {
    match kind {
        ObstacleKind::UnitDisks => S::from_ratio(1, 10),
        ObstacleKind::Segments => S::from_ratio(1, 8),
    }
}

/// The six-disk hexagonal ring around the origin.
pub fn h6<S: Scalar>() -> Vec<UnitDisk<S>> {
    [((9, 5), (0, 1)), ((9, 10), (3, 2)), ((-9, 10), (3, 2)), ((-9, 5), (0, 1)), ((-9, 10), (-3, 2)), ((9, 10), (-3, 2))]
        .into_iter()
        .map(|(x, y)| UnitDisk::new(Point::from_ratios(x, y)))
        .collect()
}

struct Builder<S> {
    rng: ChaCha8Rng,
    rejections: usize,
    min_sep: S,
    points: Vec<Point<S>>,
    obstacles: ObstacleSet<S>,
}

impl<S: Scalar> Builder<S> {
    fn admissible(&self) -> bool {
        let inst = Instance::new(self.points.clone(), self.obstacles.clone());
        inst.validate().is_ok() && FeatureSeparation::measure(&self.points, &self.obstacles).at_least(&self.min_sep)
    }

    fn reject(&mut self) -> Result<()> {
        self.rejections += 1;
        if self.rejections >= MAX_REJECTIONS {
            Err(Error::GenerationFailed(self.rejections))
        } else {
            Ok(())
        }
    }

    fn add_point(&mut self, mut propose: impl FnMut(&mut ChaCha8Rng) -> Point<S>) -> Result<()> {
        loop {
            let p = propose(&mut self.rng);
            self.points.push(p);
            if self.admissible() {
                return Ok(());
            }
            self.points.pop();
            self.reject()?;
        }
    }

    fn add_disk(&mut self, mut propose: impl FnMut(&mut ChaCha8Rng) -> Point<S>) -> Result<()> {
        loop {
            let c = propose(&mut self.rng);
            self.disks().push(UnitDisk::new(c));
            if self.admissible() {
                return Ok(());
            }
            self.disks().pop();
            self.reject()?;
        }
    }

    fn add_segment(&mut self, mut propose: impl FnMut(&mut ChaCha8Rng) -> Segment<S>) -> Result<()> {
        loop {
            let s = propose(&mut self.rng);
            self.segments().push(s);
            if self.admissible() {
                return Ok(());
            }
            self.segments().pop();
            self.reject()?;
        }
    }

    fn disks(&mut self) -> &mut Vec<UnitDisk<S>> {
        match &mut self.obstacles {
            ObstacleSet::UnitDisks(d) => d,
            ObstacleSet::Segments(_) => unreachable!("disk builder"),
        }
    }

    fn segments(&mut self) -> &mut Vec<Segment<S>> {
        match &mut self.obstacles {
            ObstacleSet::Segments(s) => s,
            ObstacleSet::UnitDisks(_) => unreachable!("segment builder"),
        }
    }
}

fn on_grid<S: Scalar>(v: f64, denom: i64) -> S {
    S::from_ratio((v * denom as f64).round() as i64, denom)
}

fn grid_point<S: Scalar>(rng: &mut ChaCha8Rng, lo: f64, hi: f64, denom: i64) -> Point<S> {
    let (a, b) = ((lo * denom as f64).ceil() as i64, (hi * denom as f64).floor() as i64);
    Point::new(S::from_ratio(rng.random_range(a..=b), denom), S::from_ratio(rng.random_range(a..=b), denom))
}

/// Grid point in the annulus `r_min ≤ |p| ≤ r_max`.
fn annulus_point<S: Scalar>(rng: &mut ChaCha8Rng, r_min: f64, r_max: f64, denom: i64) -> Point<S> {
    let r = (r_min * r_min + rng.random::<f64>() * (r_max * r_max - r_min * r_min)).sqrt();
    let t = rng.random::<f64>() * 2.0 * PI;
    Point::new(on_grid(r * t.cos(), denom), on_grid(r * t.sin(), denom))
}

const DISK_GRID: i64 = 20;

/// Circle radius putting `m` centres 1.7 apart.
fn disk_ring_radius(m: usize) -> f64 {
    0.85 / (PI / m as f64).sin()
}

fn disk_ring<S: Scalar>(m: usize, radius: f64, phase: f64) -> Vec<UnitDisk<S>> {
    if m == 6 && phase == 0.0 && radius == disk_ring_radius(6) {
        return h6();
    }
    (0..m)
        .map(|k| {
            let t = phase + 2.0 * PI * k as f64 / m as f64;
            UnitDisk::new(Point::new(on_grid(radius * t.cos(), DISK_GRID), on_grid(radius * t.sin(), DISK_GRID)))
        })
        .collect()
}

fn generate_disks<S: Scalar>(b: &mut Builder<S>, p: &GenParams) -> Result<()> {
    let n = p.obstacles;
    match p.structure {
        Structure::Random => {
            let side = (1.5 * (n as f64).sqrt()).ceil() + 1.0;
            for _ in 0..n {
                b.add_disk(|rng| grid_point(rng, 0.0, side, 4))?;
            }
            for _ in 0..p.points {
                b.add_point(|rng| grid_point(rng, -1.0, side + 1.0, 4))?;
            }
        }
        Structure::Ring | Structure::Nested if n < 4 => {
            return generate_disks(b, &GenParams { structure: Structure::Random, ..*p });
        }
        Structure::Ring => {
            let m = n.min(8);
            let r = disk_ring_radius(m);
            place_disk_ring(b, m, r)?;
            place_inner_points(b, p.points, r - 1.15)?;
            for _ in m..n {
                b.add_disk(|rng| annulus_point(rng, r + 2.2, r + 6.0, 4))?;
            }
        }
        Structure::Nested => {
            let m1 = (n / 2).max(4);
            let m2 = n - m1;
            let r1 = disk_ring_radius(m1);
            place_disk_ring(b, m1, r1)?;
            let r2 = if m2 >= 4 { disk_ring_radius(m2).max(r1 + 2.4) } else { r1 + 2.4 };
            if m2 >= 4 {
                let ring = disk_ring(m2, r2, PI / m2 as f64);
                b.disks().extend(ring);
                if !b.admissible() {
                    return Err(Error::GenerationFailed(b.rejections));
                }
            } else {
                for _ in 0..m2 {
                    b.add_disk(|rng| annulus_point(rng, r1 + 2.2, r1 + 6.0, 4))?;
                }
            }
            for i in 0..p.points {
                if i % 2 == 0 || r2 - r1 < 2.5 {
                    b.add_point(|rng| annulus_point(rng, 0.0, r1 - 1.15, DISK_GRID))?;
                } else {
                    b.add_point(|rng| annulus_point(rng, r1 + 1.15, r2 - 1.15, DISK_GRID))?;
                }
            }
        }
    }
    Ok(())
}

fn place_disk_ring<S: Scalar>(b: &mut Builder<S>, m: usize, r: f64) -> Result<()> {
    let mut phase = 0.0;
    loop {
        let ring = disk_ring(m, r, phase);
        let start = b.disks().len();
        b.disks().extend(ring);
        if b.admissible() {
            return Ok(());
        }
        b.disks().truncate(start);
        b.reject()?;
        phase = b.rng.random::<f64>() * 2.0 * PI;
    }
}

/// The origin first, then random grid points within `radius` of it.
fn place_inner_points<S: Scalar>(b: &mut Builder<S>, count: usize, radius: f64) -> Result<()> {
    for i in 0..count {
        if i == 0 {
            b.points.push(Point::from_ints(0, 0));
            if b.admissible() {
                continue;
            }
            b.points.pop();
        }
        b.add_point(|rng| annulus_point(rng, 0.0, radius, DISK_GRID))?;
    }
    Ok(())
}

/// Corners of a convex `m`-gon on the multiple-of-4 lattice, sides extended
/// a quarter of their length past both corners.
fn segment_ring<S: Scalar>(m: usize, radius: f64, phase: f64) -> Option<Vec<Segment<S>>> {
    let corners: Vec<(i64, i64)> = (0..m)
        .map(|k| {
            let t = phase + 2.0 * PI * k as f64 / m as f64;
            (4 * (radius * t.cos() / 4.0).round() as i64, 4 * (radius * t.sin() / 4.0).round() as i64)
        })
        .collect();
    let pt = |c: (i64, i64)| Point::<S>::from_ints(c.0, c.1);
    for k in 0..m {
        if orient(&pt(corners[k]), &pt(corners[(k + 1) % m]), &pt(corners[(k + 2) % m])) <= 0 {
            return None;
        }
    }
    Some(
        (0..m)
            .map(|k| {
                let (a, b) = (corners[k], corners[(k + 1) % m]);
                let (dx, dy) = ((b.0 - a.0) / 4, (b.1 - a.1) / 4);
                Segment::from_ints(a.0 - dx, a.1 - dy, b.0 + dx, b.1 + dy)
            })
            .collect(),
    )
}

fn place_segment_ring<S: Scalar>(b: &mut Builder<S>, m: usize, radius: f64) -> Result<()> {
    let mut phase = 0.0;
    loop {
        if let Some(ring) = segment_ring(m, radius, phase) {
            let start = b.segments().len();
            b.segments().extend(ring);
            if b.admissible() {
                return Ok(());
            }
            b.segments().truncate(start);
        }
        b.reject()?;
        phase = b.rng.random::<f64>() * 2.0 * PI;
    }
}

fn random_segment<S: Scalar>(rng: &mut ChaCha8Rng, x0: i64, y0: i64, side: i64) -> Segment<S> {
    let (ax, ay) = (x0 + rng.random_range(0..=side), y0 + rng.random_range(0..=side));
    let (dx, dy) = (rng.random_range(-5i64..=5), rng.random_range(-5i64..=5));
    Segment::from_ints(ax, ay, ax + dx, ay + dy)
}

fn generate_segments<S: Scalar>(b: &mut Builder<S>, p: &GenParams) -> Result<()> {
    let n = p.obstacles;
    match p.structure {
        Structure::Random => {
            let side = n as i64 + 4;
            for _ in 0..n {
                b.add_segment(|rng| random_segment(rng, 0, 0, side))?;
            }
            for _ in 0..p.points {
                b.add_point(|rng| grid_point(rng, 0.0, side as f64, 1))?;
            }
        }
        Structure::Ring | Structure::Nested if n < 3 => {
            return generate_segments(b, &GenParams { structure: Structure::Random, ..*p });
        }
        Structure::Ring => {
            let m = n.min(8);
            let r = 2.0 * m as f64 + 4.0;
            place_segment_ring(b, m, r)?;
            for _ in 0..p.points {
                b.add_point(|rng| annulus_point(rng, 0.0, r / 3.0, 1))?;
            }
            let x0 = r as i64 + 8;
            for _ in m..n {
                b.add_segment(|rng| random_segment(rng, x0, -(r as i64), 2 * r as i64))?;
            }
        }
        Structure::Nested => {
            let m1 = (n / 2).max(3);
            let m2 = n - m1;
            let r1 = 2.0 * m1 as f64 + 4.0;
            place_segment_ring(b, m1, r1)?;
            let r2 = 2.0 * r1 + 8.0;
            if m2 >= 3 {
                place_segment_ring(b, m2, r2)?;
            } else {
                let x0 = r1 as i64 + 8;
                for _ in 0..m2 {
                    b.add_segment(|rng| random_segment(rng, x0, -(r1 as i64), 2 * r1 as i64))?;
                }
            }
            for i in 0..p.points {
                if i % 2 == 0 || m2 < 3 {
                    b.add_point(|rng| annulus_point(rng, 0.0, r1 / 3.0, 1))?;
                } else {
                    b.add_point(|rng| annulus_point(rng, r1 + 3.0, r2 / 3.0, 1))?;
                }
            }
        }
    }
    Ok(())
}

pub fn generate<S: Scalar>(params: &GenParams) -> Result<Instance<S>> {
    let obstacles = match params.kind {
        ObstacleKind::UnitDisks => ObstacleSet::UnitDisks(Vec::new()),
        ObstacleKind::Segments => ObstacleSet::Segments(Vec::new()),
    };
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(params.seed),
        rejections: 0,
        min_sep: min_separation(params.kind),
        points: Vec::new(),
        obstacles,
    };
    match params.kind {
        ObstacleKind::UnitDisks => generate_disks(&mut b, params)?,
        ObstacleKind::Segments => generate_segments(&mut b, params)?,
    }
    log::debug!("generated {} {} with {} rejections", params.kind, params.structure, b.rejections);
    Ok(Instance::new(b.points, b.obstacles))
}

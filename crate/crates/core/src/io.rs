//! JSON instance and solution files. Coordinates are integers or `"p/q"`
//! strings so that values survive a round trip exactly.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enclosure::{ObstacleKind, ObstacleSet};
use crate::error::{Error, Result};
use crate::geom::{Point, Segment, UnitDisk};
use crate::instance::Instance;
use crate::scalar::{parse_rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Text(String),
}

impl Coord {
    pub fn from_scalar<S: Scalar>(v: &S) -> Self {
        let text = v.to_string();
        match text.parse::<i64>() {
            Ok(i) => Coord::Int(i),
            Err(_) => Coord::Text(text),
        }
    }

    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        match self {
            Coord::Int(i) => Ok(S::from_ratio(*i, 1)),
            Coord::Text(t) => parse_rational(t).ok_or_else(|| Error::Parse(format!("bad coordinate {t:?}"))),
        }
    }
}

pub type Pair = [Coord; 2];

fn pair<S: Scalar>(p: &Point<S>) -> Pair {
    [Coord::from_scalar(&p.x), Coord::from_scalar(&p.y)]
}

fn point<S: Scalar>(p: &Pair) -> Result<Point<S>> {
    Ok(Point::new(p[0].to_scalar()?, p[1].to_scalar()?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObstacleEntry {
    Disk { center: Pair },
    Segment { a: Pair, b: Pair },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: ObstacleKind,
    pub points: Vec<Pair>,
    pub obstacles: Vec<ObstacleEntry>,
}

impl InstanceFile {
    pub fn from_instance<S: Scalar>(inst: &Instance<S>) -> Self {
        let obstacles = match &inst.obstacles {
            ObstacleSet::UnitDisks(d) => d.iter().map(|d| ObstacleEntry::Disk { center: pair(&d.center) }).collect(),
            ObstacleSet::Segments(s) => s.iter().map(|s| ObstacleEntry::Segment { a: pair(&s.a), b: pair(&s.b) }).collect(),
        };
        InstanceFile { kind: inst.kind(), points: inst.points.iter().map(pair).collect(), obstacles }
    }

    /// Converts without validation.
    pub fn to_instance<S: Scalar>(&self) -> Result<Instance<S>> {
        let points = self.points.iter().map(point).collect::<Result<Vec<_>>>()?;
        let mismatch = |i: usize| Error::Parse(format!("obstacle {i} does not match kind {}", self.kind));
        let obstacles = match self.kind {
            ObstacleKind::UnitDisks => ObstacleSet::UnitDisks(
                self.obstacles
                    .iter()
                    .enumerate()
                    .map(|(i, o)| match o {
                        ObstacleEntry::Disk { center } => Ok(UnitDisk::new(point(center)?)),
                        ObstacleEntry::Segment { .. } => Err(mismatch(i)),
                    })
                    .collect::<Result<_>>()?,
            ),
            ObstacleKind::Segments => ObstacleSet::Segments(
                self.obstacles
                    .iter()
                    .enumerate()
                    .map(|(i, o)| match o {
                        ObstacleEntry::Segment { a, b } => Ok(Segment::new(point(a)?, point(b)?)),
                        ObstacleEntry::Disk { .. } => Err(mismatch(i)),
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(Instance::new(points, obstacles))
    }
}

pub fn parse_instance<S: Scalar>(text: &str) -> Result<Instance<S>> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_instance::<S>()?.validated()
}

pub fn write_instance<S: Scalar>(inst: &Instance<S>) -> String {
    to_pretty(&InstanceFile::from_instance(inst))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mincut,
    Lp,
    Exact,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mincut => "mincut",
            Method::Lp => "lp",
            Method::Exact => "exact",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mincut" => Ok(Method::Mincut),
            "lp" => Ok(Method::Lp),
            "exact" => Ok(Method::Exact),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub selected: Vec<usize>,
    pub method: Method,
    pub objective: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SolutionFile {
    /// Indices must be distinct and below `n`.
    pub fn check_indices(&self, n: usize) -> Result<()> {
        let distinct: BTreeSet<usize> = self.selected.iter().copied().collect();
        if distinct.len() != self.selected.len() {
            return Err(Error::Parse("repeated obstacle index in solution".into()));
        }
        match self.selected.iter().find(|&&i| i >= n) {
            Some(i) => Err(Error::Parse(format!("obstacle index {i} out of range for {n} obstacles"))),
            None => Ok(()),
        }
    }
}

pub fn parse_solution(text: &str) -> Result<SolutionFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_solution(sol: &SolutionFile) -> String {
    to_pretty(sol)
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

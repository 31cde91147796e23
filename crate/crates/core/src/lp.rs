//! Circulation relaxation for segment obstacles: one variable per directed
//! pair of arrangement vertices on a common segment, flow conservation at
//! every vertex, and winding at least one around every point.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::Float;

use crate::arrangement::{build_arrangement, extract_faces, Arrangement};
use crate::enclosure::SegmentEnclosure;
use crate::error::{Error, Result};
use crate::geom::{lattice_directions, ray_cross_sign, Point, Ray, Segment, Vector};
use crate::scalar::Scalar;
use crate::simplex::{self, LinearProgram, Relation, SimplexError};

pub const SNAP_TOLERANCE: f64 = 1e-10;
pub const FLOW_TOLERANCE: f64 = 1e-8;
pub const WINDING_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LpVariable {
    pub segment: usize,
    pub from: usize,
    pub to: usize,
}

impl LpVariable {
    pub fn name(&self) -> String {
        format!("x_{}_{}_{}", self.segment, self.from, self.to)
    }
}

#[derive(Clone, Debug)]
pub struct WindingRow<S> {
    pub point: usize,
    pub ray: Ray<S>,
    /// Nonzero coefficients, each ±1.
    pub coeffs: Vec<(usize, i32)>,
}

#[derive(Clone, Debug)]
pub struct LpModel<S> {
    pub segments: Vec<Segment<S>>,
    pub arrangement: Arrangement<S>,
    pub variables: Vec<LpVariable>,
    /// Per arrangement vertex: `+1` on outgoing, `−1` on incoming variables.
    pub flow_rows: Vec<Vec<(usize, i32)>>,
    pub winding_rows: Vec<WindingRow<S>>,
    index: HashMap<LpVariable, usize>,
    vertex_index: HashMap<Point<S>, usize>,
}

/// The `skip`-th (from 0) lattice direction whose ray from `q` misses every
/// arrangement vertex. Such a ray is never collinear with an edge, since
/// edges end at vertices and `q` is off them.
pub fn choose_ray_nth<S: Scalar>(q: &Point<S>, arr: &Arrangement<S>, skip: usize) -> Ray<S> {
    lattice_directions()
        .map(|(a, b)| Ray::new(q.clone(), Vector::new(S::from_i64(a).unwrap(), S::from_i64(b).unwrap())))
        .filter(|r| !arr.vertices.iter().any(|v| r.hits(v)))
        .nth(skip)
        .expect("lattice directions are unbounded")
}

pub fn choose_ray<S: Scalar>(q: &Point<S>, arr: &Arrangement<S>) -> Ray<S> {
    choose_ray_nth(q, arr, 0)
}

impl<S: Scalar> LpModel<S> {
    pub fn variable(&self, segment: usize, from: usize, to: usize) -> Option<usize> {
        self.index.get(&LpVariable { segment, from, to }).copied()
    }

    pub fn twin(&self, var: usize) -> usize {
        let v = self.variables[var];
        self.index[&LpVariable { segment: v.segment, from: v.to, to: v.from }]
    }

    pub fn vertex_id(&self, p: &Point<S>) -> Option<usize> {
        self.vertex_index.get(p).copied()
    }

    pub fn endpoints(&self, var: usize) -> (&Point<S>, &Point<S>) {
        let v = self.variables[var];
        (&self.arrangement.vertices[v.from], &self.arrangement.vertices[v.to])
    }

    pub fn to_program<F: Float>(&self) -> LinearProgram<F> {
        let n = self.variables.len();
        let mut lp = LinearProgram::new(n);
        lp.objective = vec![F::one(); n];
        lp.upper = vec![F::one(); n];
        let f = |c: i32| F::from(c).unwrap();
        for row in &self.flow_rows {
            if !row.is_empty() {
                lp.add(row.iter().map(|&(j, c)| (j, f(c))).collect(), Relation::Eq, F::zero());
            }
        }
        for row in &self.winding_rows {
            lp.add(row.coeffs.iter().map(|&(j, c)| (j, f(c))).collect(), Relation::Ge, F::one());
        }
        lp
    }

    /// Largest flow imbalance and smallest winding sum of `values`.
    pub fn residuals<F: Float>(&self, values: &[F]) -> (f64, f64) {
        let eval = |row: &[(usize, i32)]| row.iter().fold(0.0, |a, &(j, c)| a + c as f64 * values[j].to_f64().unwrap());
        let flow = self.flow_rows.iter().map(|r| eval(r).abs()).fold(0.0, f64::max);
        let winding = self.winding_rows.iter().map(|r| eval(&r.coeffs)).fold(f64::INFINITY, f64::min);
        (flow, winding)
    }

    pub fn is_feasible<F: Float>(&self, values: &[F], tol: f64) -> bool {
        let (flow, winding) = self.residuals(values);
        values.iter().all(|v| v.to_f64().unwrap() >= -tol && v.to_f64().unwrap() <= 1.0 + tol)
            && flow <= tol
            && (self.winding_rows.is_empty() || winding >= 1.0 - tol)
    }

    /// Plain-text LP: one line per constraint, variables named `x_l_u_v`.
    pub fn dump(&self) -> String {
        let term = |(j, c): &(usize, i32)| format!("{} {}", if *c > 0 { "+" } else { "-" }, self.variables[*j].name());
        let mut out = String::from("minimize\n obj:");
        for v in &self.variables {
            let _ = write!(out, " + {}", v.name());
        }
        out.push_str("\nsubject to\n");
        for (k, row) in self.flow_rows.iter().enumerate() {
            if !row.is_empty() {
                let terms: Vec<String> = row.iter().map(term).collect();
                let _ = writeln!(out, " flow_{k}: {} = 0", terms.join(" "));
            }
        }
        for row in &self.winding_rows {
            let terms: Vec<String> = row.coeffs.iter().map(term).collect();
            let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" ") };
            let _ = writeln!(out, " wind_{}: {lhs} >= 1", row.point);
        }
        out.push_str("bounds\n");
        for v in &self.variables {
            let _ = writeln!(out, " 0 <= {} <= 1", v.name());
        }
        out.push_str("end\n");
        out
    }
}

pub fn build_lp<S: Scalar>(points: &[Point<S>], segments: &[Segment<S>]) -> Result<LpModel<S>> {
    build_lp_with_ray(points, segments, 0)
}

/// As [`build_lp`], using the `ray_skip`-th valid ray for every point.
pub fn build_lp_with_ray<S: Scalar>(points: &[Point<S>], segments: &[Segment<S>], ray_skip: usize) -> Result<LpModel<S>> {
    for q in points {
        if let Some(i) = segments.iter().position(|s| s.contains(q)) {
            return Err(Error::PointOnObstacle(i));
        }
    }
    let arrangement = build_arrangement(segments)?;
    let mut variables = Vec::new();
    let mut index = HashMap::new();
    for (l, vs) in arrangement.segment_vertices.iter().enumerate() {
        for &u in vs {
            for &v in vs {
                if u != v {
                    let var = LpVariable { segment: l, from: u, to: v };
                    index.insert(var, variables.len());
                    variables.push(var);
                }
            }
        }
    }
    let mut flow_rows = vec![Vec::new(); arrangement.vertices.len()];
    for (j, var) in variables.iter().enumerate() {
        flow_rows[var.from].push((j, 1));
        flow_rows[var.to].push((j, -1));
    }
    let mut winding_rows = Vec::with_capacity(points.len());
    for (i, q) in points.iter().enumerate() {
        let ray = choose_ray_nth(q, &arrangement, ray_skip);
        let mut coeffs = Vec::new();
        for (j, var) in variables.iter().enumerate() {
            let (u, v) = (&arrangement.vertices[var.from], &arrangement.vertices[var.to]);
            let s = ray_cross_sign(&ray, u, v).expect("ray avoids every vertex");
            if s != 0 {
                coeffs.push((j, s));
            }
        }
        winding_rows.push(WindingRow { point: i, ray, coeffs });
    }
    let vertex_index = arrangement.vertices.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    log::debug!("lp: {} variables, {} vertices, {} points", variables.len(), arrangement.vertices.len(), points.len());
    Ok(LpModel { segments: segments.to_vec(), arrangement, variables, flow_rows, winding_rows, index, vertex_index })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circulation<F> {
    pub values: Vec<F>,
    pub objective: F,
}

pub fn solve_lp<S: Scalar, F: Float>(model: &LpModel<S>) -> Result<Circulation<F>> {
    let program = model.to_program::<F>();
    let solution = match simplex::solve(&program) {
        Ok(s) => s,
        Err(SimplexError::Infeasible(_)) => {
            let oracle = SegmentEnclosure::new(model.segments.clone())?;
            for row in &model.winding_rows {
                if !oracle.is_enclosed(&row.ray.origin)? {
                    return Err(Error::Infeasible(row.point));
                }
            }
            return Err(Error::NumericalFailure("simplex reports infeasible but every point is enclosed".into()));
        }
        Err(e) => return Err(Error::NumericalFailure(e.to_string())),
    };
    let snap = F::from(SNAP_TOLERANCE).unwrap();
    let values: Vec<F> = solution.x.iter().map(|&v| if v < snap { F::zero() } else { v.min(F::one()) }).collect();
    let (flow, winding) = model.residuals(&values);
    if flow > FLOW_TOLERANCE || (!model.winding_rows.is_empty() && winding < 1.0 - WINDING_TOLERANCE) {
        return Err(Error::NumericalFailure(format!("residuals after snapping: flow {flow:e}, winding {winding}")));
    }
    let objective = values.iter().fold(F::zero(), |a, &v| a + v);
    log::debug!("lp: objective {:.6} after {} pivots", objective.to_f64().unwrap(), solution.iterations);
    Ok(Circulation { values, objective })
}

/// 0/1 assignment on the directed subsegments of the outer boundary of the
/// segments at `subset`.
pub fn boundary_indicator<S: Scalar>(model: &LpModel<S>, subset: &[usize]) -> Result<Vec<u8>> {
    let segs: Vec<Segment<S>> = subset.iter().map(|&i| model.segments[i].clone()).collect();
    let arr = build_arrangement(&segs)?;
    let faces = extract_faces(&arr);
    let mut out = vec![0u8; model.variables.len()];
    for walk in faces.outer_boundary_half_edges(&arr) {
        for h in walk {
            let e = &arr.half_edges[h];
            let u = model.vertex_id(&arr.vertices[e.origin]).expect("sub-arrangement vertex");
            let v = model.vertex_id(&arr.vertices[e.target]).expect("sub-arrangement vertex");
            let var = model.variable(subset[e.parent], u, v).expect("both ends lie on the parent segment");
            out[var] = 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

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

    fn hexagon_ring() -> Vec<Segment<Q>> {
        let corners = [(4, 0), (2, 4), (-2, 4), (-4, 0), (-2, -4), (2, -4)];
        (0..6)
            .map(|i| {
                let (ax, ay) = corners[i];
                let (bx, by) = corners[(i + 1) % 6];
                let (mx, my) = ((ax + bx) / 2, (ay + by) / 2);
                seg(2 * ax - mx, 2 * ay - my, 2 * bx - mx, 2 * by - my)
            })
            .collect()
    }

    #[test]
    fn choose_ray_examples() {
        let arr = build_arrangement(&t1()).unwrap();
        let r = choose_ray(&p(4, 2), &arr);
        assert_eq!(r.direction, Vector::new(Q::from_ratio(1, 1), Q::from_ratio(0, 1)));
        // a vertex at (6,2) blocks the horizontal ray
        let arr = build_arrangement(&[seg(6, 0, 6, 4), seg(0, 2, 8, 2)]).unwrap();
        let r = choose_ray(&p(4, 2), &arr);
        assert_eq!(r.direction, Vector::new(Q::from_ratio(1, 1), Q::from_ratio(1, 1)));
        let r = choose_ray(&p(0, 100), &build_arrangement(&t1()).unwrap());
        assert_eq!(r.direction, Vector::new(Q::from_ratio(1, 1), Q::from_ratio(0, 1)));
    }

    #[test]
    fn model_sizes() {
        let m = build_lp(&[p(4, 2)], &t1()).unwrap();
        assert_eq!(m.variables.len(), 6);
        assert_eq!(m.flow_rows.len(), 3);
        assert_eq!(m.winding_rows.len(), 1);
        let mut segs = t1();
        segs.push(seg(20, 20, 21, 25));
        assert_eq!(build_lp(&[p(4, 2)], &segs).unwrap().variables.len(), 6);
        // the extended bottom edge meets three segments, so it carries 3 vertices
        let segs = vec![seg(-2, 0, 10, 0), seg(8, -1, 4, 6), seg(4, 6, 0, -1), seg(2, -1, 2, 1)];
        let m = build_lp::<Q>(&[], &segs).unwrap();
        let on_bottom = m.variables.iter().filter(|v| v.segment == 0).count();
        assert_eq!(on_bottom, 6);
        for j in 0..m.variables.len() {
            assert_eq!(m.twin(m.twin(j)), j);
        }
    }

    #[test]
    fn solve_examples() {
        let m = build_lp(&[p(4, 2)], &t1()).unwrap();
        let c: Circulation<f64> = solve_lp(&m).unwrap();
        assert!((c.objective - 3.0).abs() < 1e-9);
        let cross = vec![seg(0, 0, 2, 2), seg(0, 2, 2, 0)];
        let m = build_lp(&[p(1, 5)], &cross).unwrap();
        assert_eq!(solve_lp::<Q, f64>(&m), Err(Error::Infeasible(0)));
    }

    #[test]
    fn triangle_optimum_by_vertex_enumeration() {
        // The feasible region lives in {0,1}-ish boxes; enumerate all 0/½/1
        // assignments as a coarse brute-force lower bound check.
        let m = build_lp(&[p(4, 2)], &t1()).unwrap();
        let mut best = f64::INFINITY;
        for code in 0..3usize.pow(6) {
            let vals: Vec<f64> = (0..6).map(|k| (code / 3usize.pow(k as u32) % 3) as f64 / 2.0).collect();
            if m.is_feasible(&vals, 1e-12) {
                best = best.min(vals.iter().sum());
            }
        }
        assert_eq!(best, 3.0);
    }

    #[test]
    fn boundary_indicator_examples() {
        let m = build_lp(&[p(4, 2)], &t1()).unwrap();
        let ind = boundary_indicator(&m, &[0, 1, 2]).unwrap();
        assert_eq!(ind.iter().map(|&v| v as u32).sum::<u32>(), 3);
        let vals: Vec<f64> = ind.iter().map(|&v| v as f64).collect();
        assert!(m.is_feasible(&vals, 0.0));
        assert!(boundary_indicator(&m, &[1]).unwrap().iter().all(|&v| v == 0));

        let ring = hexagon_ring();
        let m = build_lp(&[p(0, 0)], &ring).unwrap();
        let ind = boundary_indicator(&m, &[0, 1, 2, 3, 4, 5]).unwrap();
        let vals: Vec<f64> = ind.iter().map(|&v| v as f64).collect();
        assert!(m.is_feasible(&vals, 0.0));
    }

    #[test]
    fn ray_choice_does_not_change_the_optimum() {
        let ring = hexagon_ring();
        let a: Circulation<f64> = solve_lp(&build_lp_with_ray(&[p(0, 0), p(1, 1)], &ring, 0).unwrap()).unwrap();
        let b: Circulation<f64> = solve_lp(&build_lp_with_ray(&[p(0, 0), p(1, 1)], &ring, 3).unwrap()).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-6);
    }

    #[test]
    fn dump_names_variables() {
        let m = build_lp(&[p(4, 2)], &t1()).unwrap();
        let text = m.dump();
        assert!(text.contains("x_0_0_1"));
        assert!(text.contains("wind_0:"));
        assert_eq!(text.lines().filter(|l| l.starts_with(" flow_")).count(), 3);
    }
}

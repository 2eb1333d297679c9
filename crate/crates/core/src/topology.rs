//! Linking numbers, arc closures and plane separation.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cones::{Cone, ConePoint};
use crate::curves::{ClosedCurve, ThickLink};
use crate::error::{GordianError, Result};
use crate::geom::{segment_segment, KahanSum, Mat3, Point3};
use crate::spatial::near_segment_pairs;

/// Curves closer than this have no well-defined linking number.
pub const TOUCH_DISTANCE: f64 = 1e-6;
/// Perturbations tried before a projection direction is declared hopeless.
pub const MAX_PERTURBATIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaussLinking {
    pub value: f64,
    /// Distance from `value` to the nearest integer.
    pub residual: f64,
}

impl GaussLinking {
    pub fn rounded(&self) -> i64 {
        self.value.round() as i64
    }
}

fn min_distance_below(a: &ClosedCurve, b: &ClosedCurve, cutoff: f64) -> Option<f64> {
    let d = crate::curves::min_distance_within(a, b, cutoff);
    (d < cutoff).then_some(d)
}

/// Signed solid angle subtended by two segments, divided by 4π.
fn segment_pair_linking(a0: Point3, a1: Point3, b0: Point3, b1: Point3) -> f64 {
    let r13 = b0 - a0;
    let r14 = b1 - a0;
    let r23 = b0 - a1;
    let r24 = b1 - a1;
    let unit = |v: Point3| v.normalized();
    let (Some(n1), Some(n2), Some(n3), Some(n4)) = (
        unit(r13.cross(r14)),
        unit(r14.cross(r24)),
        unit(r24.cross(r23)),
        unit(r23.cross(r13)),
    ) else {
        return 0.0;
    };
    let asin = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = asin(n1.dot(n2)) + asin(n2.dot(n3)) + asin(n3.dot(n4)) + asin(n4.dot(n1));
    let orient = (b1 - b0).cross(a1 - a0).dot(r13);
    if orient > 0.0 {
        omega / (4.0 * PI)
    } else if orient < 0.0 {
        -omega / (4.0 * PI)
    } else {
        0.0
    }
}

/// Gauss linking integral, summed exactly segment pair by segment pair.
pub fn gauss_linking(a: &ClosedCurve, b: &ClosedCurve) -> Result<GaussLinking> {
    if let Some(d) = min_distance_below(a, b, TOUCH_DISTANCE) {
        return Err(GordianError::CurvesTouch(d));
    }
    let mut acc = KahanSum::default();
    for (a0, a1) in a.segments() {
        let mut row = KahanSum::default();
        for (b0, b1) in b.segments() {
            row.add(segment_pair_linking(a0, a1, b0, b1));
        }
        acc.add(row.value());
    }
    let value = acc.value();
    Ok(GaussLinking {
        value,
        residual: (value - value.round()).abs(),
    })
}

/// Direction tried on attempt `k` when projecting along `dir`.
fn perturbed(dir: Point3, k: usize) -> Point3 {
    if k == 0 {
        return dir;
    }
    let golden = PI * (3.0 - 5f64.sqrt());
    let axis = Point3::new(1.0, 2f64.sqrt(), 3f64.sqrt());
    let tilt = Mat3::rotation(axis, k as f64 * golden).apply(dir.any_orthogonal());
    (dir + tilt * (1e-3 * k as f64)).normalized().unwrap_or(dir)
}

enum Projection {
    Generic(i64),
    Degenerate,
}

fn crossing_count(a: &ClosedCurve, b: &ClosedCurve, dir: Point3) -> Projection {
    let e1 = dir.any_orthogonal();
    let e2 = dir.cross(e1);
    let flat = |p: Point3| Point3::new(p.dot(e1), p.dot(e2), 0.0);
    let mut segs: Vec<(Point3, Point3)> = a.segments().map(|(p, q)| (flat(p), flat(q))).collect();
    let na = segs.len();
    segs.extend(b.segments().map(|(p, q)| (flat(p), flat(q))));
    let scale = segs.iter().map(|(p, q)| p.dist(*q)).fold(0.0, f64::max);
    let eps = 1e-9 * scale.max(1e-300);
    let mut total = 0i64;
    let mut degenerate = false;
    near_segment_pairs(&segs, eps, |i, j| {
        if degenerate || (i < na) == (j < na) {
            return;
        }
        let (ia, jb) = if i < na { (i, j - na) } else { (j, i - na) };
        let (p0, p1) = segs[if i < na { i } else { j }];
        let (q0, q1) = segs[if i < na { j } else { i }];
        let d = p1 - p0;
        let e = q1 - q0;
        let den = d.x * e.y - d.y * e.x;
        let w = q0 - p0;
        if den.abs() <= 1e-12 * d.norm() * e.norm() {
            // parallel: degenerate only if the images overlap
            if (w.x * d.y - w.y * d.x).abs() <= eps * d.norm() {
                let (t0, t1) = (w.dot(d) / d.norm_sq(), (q1 - p0).dot(d) / d.norm_sq());
                if t0.max(t1) >= 0.0 && t0.min(t1) <= 1.0 {
                    degenerate = true;
                }
            }
            return;
        }
        let t = (w.x * e.y - w.y * e.x) / den;
        let u = (w.x * d.y - w.y * d.x) / den;
        let tol = 1e-9;
        if t < -tol || t > 1.0 + tol || u < -tol || u > 1.0 + tol {
            return;
        }
        if t.abs() <= tol || (t - 1.0).abs() <= tol || u.abs() <= tol || (u - 1.0).abs() <= tol {
            degenerate = true;
            return;
        }
        let (a0, a1) = a.edge(ia);
        let (b0, b1) = b.edge(jb);
        let ha = a0.lerp(a1, t).dot(dir);
        let hb = b0.lerp(b1, u).dot(dir);
        if (ha - hb).abs() <= eps {
            degenerate = true;
            return;
        }
        let twist = (a1 - a0).cross(b1 - b0).dot(dir).signum() as i64;
        total += if ha > hb { twist } else { -twist };
    });
    if degenerate {
        Projection::Degenerate
    } else {
        Projection::Generic(total)
    }
}

/// Linking number from signed crossings of the projection along `direction`,
/// perturbed deterministically until the projection is generic.
pub fn crossing_linking(a: &ClosedCurve, b: &ClosedCurve, direction: Point3) -> Result<i64> {
    let dir = direction
        .normalized()
        .ok_or_else(|| GordianError::InvalidArgument("projection direction must be nonzero".into()))?;
    for k in 0..=MAX_PERTURBATIONS {
        if let Projection::Generic(total) = crossing_count(a, b, perturbed(dir, k)) {
            if total % 2 != 0 {
                continue;
            }
            return Ok(total / 2);
        }
    }
    Err(GordianError::NoGenericDirection(MAX_PERTURBATIONS))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcClosure {
    /// The arc `αᵢ` from mark `i` to mark `i + 1`, endpoints included.
    pub arc: Vec<Point3>,
    /// The geodesic `δᵢ` from mark `i + 1` back to mark `i`, endpoints included.
    pub closer: Vec<Point3>,
    pub closed: ClosedCurve,
    pub arc_length: f64,
}

/// Marks on the cone: the ambient points of `alpha` at the four arc lengths,
/// as cone points, with their distances from the disk.
pub fn marks_on_cone(alpha: &ClosedCurve, cone: &Cone, marks: &[f64; 4], tol: f64) -> Result<[ConePoint; 4]> {
    let l = alpha.length();
    let mut out = [ConePoint::Apex; 4];
    for (k, &s) in marks.iter().enumerate() {
        if !(0.0..l).contains(&s) {
            return Err(GordianError::BadMark {
                index: k,
                reason: format!("arc length {s} outside [0, {l})"),
            });
        }
        let (cp, d) = cone.locate_ambient(alpha.point_at(s));
        if d > tol {
            return Err(GordianError::BadMark {
                index: k,
                reason: format!("point is {d:.3e} away from the cone disk"),
            });
        }
        out[k] = cp;
    }
    for k in 1..4 {
        let prev = (marks[k - 1] - marks[0]).rem_euclid(l);
        let here = (marks[k] - marks[0]).rem_euclid(l);
        if here <= prev {
            return Err(GordianError::BadMark {
                index: k,
                reason: "marks are not in cyclic order along alpha".into(),
            });
        }
    }
    Ok(out)
}

/// Vertices of `alpha` strictly between arc lengths `s0` and `s1` (forward).
fn arc_points(alpha: &ClosedCurve, s0: f64, s1: f64) -> Vec<Point3> {
    let l = alpha.length();
    let span = (s1 - s0).rem_euclid(l);
    let mut pts = vec![alpha.point_at(s0)];
    let (i0, _) = alpha.locate(s0);
    let n = alpha.len();
    for k in 1..=n {
        let i = (i0 + k) % n;
        let off = (alpha.arc_at_vertex(i) - s0).rem_euclid(l);
        if off <= 0.0 || off >= span {
            if off >= span {
                break;
            }
            continue;
        }
        pts.push(alpha.vertex(i));
    }
    pts.push(alpha.point_at(s1));
    pts.dedup_by(|x, y| x.dist(*y) < 1e-12);
    pts
}

/// Closes each arc of `alpha` between consecutive marks by the cone geodesic
/// of `beta_cone` running back to its start.
pub fn build_closures(alpha: &ClosedCurve, beta_cone: &Cone, marks: &[f64; 4], tol: f64) -> Result<Vec<ArcClosure>> {
    let cps = marks_on_cone(alpha, beta_cone, marks, tol)?;
    let step = alpha.length() / alpha.len() as f64;
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        let j = (i + 1) % 4;
        let arc = arc_points(alpha, marks[i], marks[j]);
        let mut closer = beta_cone.geodesic_polyline(&cps[j], &cps[i], step.max(1e-3));
        let last = closer.len() - 1;
        closer[0] = *arc.last().unwrap();
        closer[last] = arc[0];
        let mut pts = arc.clone();
        pts.extend_from_slice(&closer[1..last]);
        // near-duplicates would make neighbouring edges look like a self-contact
        let merge = 10.0 * TOUCH_DISTANCE;
        pts.dedup_by(|x, y| x.dist(*y) < merge);
        while pts.len() > 1 && pts[0].dist(*pts.last().unwrap()) < merge {
            pts.pop();
        }
        let closed = ClosedCurve::new(pts).map_err(|e| GordianError::Construction(format!("closure {}: {e}", i + 1)))?;
        check_embedded(&closed, i)?;
        let arc_length = (marks[j] - marks[i]).rem_euclid(alpha.length());
        out.push(ArcClosure {
            arc,
            closer,
            closed,
            arc_length,
        });
    }
    Ok(out)
}

fn check_embedded(c: &ClosedCurve, index: usize) -> Result<()> {
    let n = c.len();
    let segs: Vec<(Point3, Point3)> = c.segments().collect();
    let mut hit = None;
    near_segment_pairs(&segs, TOUCH_DISTANCE, |i, j| {
        if hit.is_some() || j == i + 1 || (i == 0 && j == n - 1) {
            return;
        }
        let d = segment_segment(segs[i].0, segs[i].1, segs[j].0, segs[j].1).0;
        if d < TOUCH_DISTANCE {
            hit = Some((i, j, d));
        }
    });
    match hit {
        None => Ok(()),
        Some((i, j, d)) => Err(GordianError::Construction(format!(
            "closure {} meets itself (edges {i} and {j} at distance {d:.2e})",
            index + 1
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparatingPlane {
    /// Unit normal pointing from the second set towards the first.
    pub normal: Point3,
    /// The plane is `normal · x = offset`.
    pub offset: f64,
    /// Gap between the two vertex sets along `normal`.
    pub margin: f64,
}

/// Distance between the convex hulls of two point sets, by Frank-Wolfe on
/// their difference set. Returns the best direction found and the certified
/// gap along it, stopping once the gap reaches `goal` or the hulls are
/// certainly closer than `goal`.
fn hull_gap(a: &[Point3], b: &[Point3], goal: f64, iterations: usize) -> (Point3, f64) {
    let support_min = |pts: &[Point3], d: Point3| pts.iter().cloned().min_by(|p, q| p.dot(d).partial_cmp(&q.dot(d)).unwrap()).unwrap();
    let support_max = |pts: &[Point3], d: Point3| pts.iter().cloned().max_by(|p, q| p.dot(d).partial_cmp(&q.dot(d)).unwrap()).unwrap();
    let mean = |pts: &[Point3]| pts.iter().fold(Point3::ORIGIN, |acc, &p| acc + p) / pts.len() as f64;
    let mut x = mean(a) - mean(b);
    let mut best = (x, f64::NEG_INFINITY);
    for _ in 0..iterations {
        let norm = x.norm();
        if norm == 0.0 {
            break;
        }
        let n = x / norm;
        let sa = support_min(a, n);
        let sb = support_max(b, n);
        let gap = sa.dot(n) - sb.dot(n);
        if gap > best.1 {
            best = (n, gap);
        }
        if gap >= goal || norm < goal || norm - gap <= 1e-9 * norm.max(1.0) {
            break;
        }
        let s = sa - sb;
        let d = x - s;
        let t = (x.dot(d) / d.norm_sq()).clamp(0.0, 1.0);
        x -= d * t;
    }
    best
}

/// A plane separating the components in `side` from the rest with margin at
/// least twice the link thickness, if the vertex sets allow one.
pub fn split_by_plane(link: &ThickLink, side: &[usize]) -> Result<Option<SeparatingPlane>> {
    let k = link.components.len();
    if side.is_empty() || side.len() >= k || side.iter().any(|&i| i >= k) {
        return Err(GordianError::InvalidArgument(
            "partition must leave components on both sides".into(),
        ));
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, c) in link.components.iter().enumerate() {
        if side.contains(&i) {
            a.extend_from_slice(c.vertices());
        } else {
            b.extend_from_slice(c.vertices());
        }
    }
    let goal = 2.0 * link.thickness;
    let (n, gap) = hull_gap(&a, &b, goal, 5000);
    if gap < goal {
        return Ok(None);
    }
    let lo = a.iter().map(|p| p.dot(n)).fold(f64::INFINITY, f64::min);
    let hi = b.iter().map(|p| p.dot(n)).fold(f64::NEG_INFINITY, f64::max);
    Ok(Some(SeparatingPlane {
        normal: n,
        offset: 0.5 * (lo + hi),
        margin: lo - hi,
    }))
}

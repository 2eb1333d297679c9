use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cones::{Cone, ConePoint};
use crate::curves::{min_distance_within, ClosedCurve, ThickLink};
use crate::error::{GordianError, Result};
use crate::geom::Point3;
use crate::topology::{build_closures, crossing_linking};

/// Which components play α and β.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roles {
    pub alpha: usize,
    pub beta: usize,
}

impl Default for Roles {
    fn default() -> Self {
        Roles { alpha: 0, beta: 1 }
    }
}

impl Roles {
    pub fn check(&self, link: &ThickLink) -> Result<()> {
        let k = link.components.len();
        if self.alpha >= k {
            return Err(GordianError::MissingComponent(format!(
                "alpha index {} but link has {k} components",
                self.alpha
            )));
        }
        if self.beta >= k {
            return Err(GordianError::MissingComponent(format!(
                "beta index {} but link has {k} components",
                self.beta
            )));
        }
        if self.alpha == self.beta {
            return Err(GordianError::MissingComponent("alpha and beta must be different components".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorConfig {
    pub thickness_tol: f64,
    /// Allowed deviation of the cone angle from 2π in the conclusions.
    pub theta_tol: f64,
    /// Distance within which a mark counts as lying on the disk.
    pub mark_tol: f64,
    /// Projection direction for the crossing-count linking numbers.
    pub projection: Point3,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig {
            thickness_tol: 1e-2,
            theta_tol: 1e-3,
            mark_tol: 1e-6,
            projection: Point3::new(1.0, 0.3, 0.2),
        }
    }
}

/// Thresholds every flag in a [`LemmaReport`] was compared against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub min_arc: f64,
    pub min_side: f64,
    pub theta_tol: f64,
    pub arc_conclusion: f64,
    pub gamma_distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    /// Arc length on α.
    pub s: f64,
    pub point: ConePoint,
    pub ambient: Point3,
    /// Index of the disk triangle that was hit.
    pub wedge: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub step: usize,
    pub intersections: Vec<Crossing>,
    /// Marks `p₁..p₄` as arc lengths on α, when four crossings were found.
    pub marks: Option<[f64; 4]>,
    pub cyclic_order: bool,
    pub cond1: bool,
    pub arc_lengths: Vec<f64>,
    pub min_arc_length: f64,
    pub cond2: bool,
    pub hull_sides: Vec<f64>,
    pub hull_convex: bool,
    pub cond3: bool,
    pub apex_inside: bool,
    pub apex_margin: f64,
    pub cond4: bool,
    pub lk13: Option<i64>,
    pub lk24: Option<i64>,
    pub cond5: bool,
    pub theta: f64,
    pub planarity_defect: f64,
    pub gamma13_distance: f64,
    pub theta_flat: bool,
    pub arcs_long: bool,
    pub thresholds: Thresholds,
}

impl LemmaReport {
    pub fn all_conditions(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3 && self.cond4 && self.cond5
    }

    pub fn conclusions(&self) -> bool {
        self.theta_flat && self.arcs_long
    }

    /// Names of the conditions that fail.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (ok, name) in [
            (self.cond1, "condition 1 (four crossings in cyclic order)"),
            (self.cond2, "condition 2 (arc lengths above pi)"),
            (self.cond3, "condition 3 (convex hull with sides at least 2)"),
            (self.cond4, "condition 4 (apex inside the hull)"),
            (self.cond5, "condition 5 (nonzero linking numbers)"),
        ] {
            if !ok {
                out.push(name);
            }
        }
        out
    }
}

/// Möller-Trumbore; returns the segment parameter of the hit.
fn segment_triangle(p: Point3, q: Point3, a: Point3, b: Point3, c: Point3) -> Option<f64> {
    let d = q - p;
    let e1 = b - a;
    let e2 = c - a;
    let h = d.cross(e2);
    let det = e1.dot(h);
    if det.abs() <= 1e-14 * d.norm() * e1.norm() * e2.norm() {
        return None;
    }
    let inv = 1.0 / det;
    let s = p - a;
    let u = inv * s.dot(h);
    if !(-1e-12..=1.0 + 1e-12).contains(&u) {
        return None;
    }
    let qv = s.cross(e1);
    let v = inv * d.dot(qv);
    if v < -1e-12 || u + v > 1.0 + 1e-12 {
        return None;
    }
    let t = inv * e2.dot(qv);
    (-1e-12..=1.0 + 1e-12).contains(&t).then_some(t.clamp(0.0, 1.0))
}

/// Points where `alpha` crosses the disk of `cone`, sorted by arc length.
fn disk_crossings(alpha: &ClosedCurve, cone: &Cone) -> Vec<Crossing> {
    let beta = cone.base();
    let apex = cone.apex();
    let mut lo = apex;
    let mut hi = apex;
    for p in beta.vertices() {
        lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    let n = beta.len();
    let mut out: Vec<Crossing> = Vec::new();
    for i in 0..alpha.len() {
        let (p, q) = alpha.edge(i);
        if p.x.max(q.x) < lo.x
            || p.x.min(q.x) > hi.x
            || p.y.max(q.y) < lo.y
            || p.y.min(q.y) > hi.y
            || p.z.max(q.z) < lo.z
            || p.z.min(q.z) > hi.z
        {
            continue;
        }
        for j in 0..n {
            let (a, b) = beta.edge(j);
            if let Some(t) = segment_triangle(p, q, apex, a, b) {
                let s = alpha.wrap(alpha.arc_at_vertex(i) + t * alpha.edge_lengths()[i]);
                let x = p.lerp(q, t);
                // a hit on an edge shared by two triangles counts once
                if out.iter().any(|c| alpha.short_arc(c.s, s) < 1e-9) {
                    continue;
                }
                out.push(Crossing {
                    s,
                    point: cone.from_wedge_point(j, x),
                    ambient: x,
                    wedge: j,
                });
            }
        }
    }
    out.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
    out
}

/// Rotation of the sorted crossings that becomes `p₁..p₄`.
fn label_start(alpha: &ClosedCurve, crossings: &[Crossing], hint: Option<&[f64; 4]>) -> usize {
    let l = alpha.length();
    match hint {
        None => (0..crossings.len())
            .min_by(|&a, &b| {
                alpha
                    .short_arc(crossings[a].s, 0.0)
                    .partial_cmp(&alpha.short_arc(crossings[b].s, 0.0))
                    .unwrap()
            })
            .unwrap_or(0),
        Some(h) => (0..crossings.len())
            .min_by(|&a, &b| {
                let cost = |r: usize| -> f64 { (0..4).map(|k| alpha.short_arc(crossings[(r + k) % 4].s, h[k] % l)).sum() };
                cost(a).partial_cmp(&cost(b)).unwrap()
            })
            .unwrap_or(0),
    }
}

fn cyclic_monotone(psis: &[f64]) -> bool {
    let n = psis.len();
    let start = (0..n).min_by(|&a, &b| psis[a].partial_cmp(&psis[b]).unwrap()).unwrap();
    let inc = (1..n).all(|k| psis[(start + k) % n] > psis[(start + k - 1) % n]);
    let dec = (1..n).all(|k| psis[(start + n - k) % n] > psis[(start + n - k + 1) % n]);
    inc || dec
}

fn planarity_defect(c: &ClosedCurve) -> f64 {
    let centre = c.centroid();
    let mut normal = Point3::ORIGIN;
    for (a, b) in c.segments() {
        normal += (a - centre).cross(b - centre);
    }
    match normal.normalized() {
        Some(n) => c.vertices().iter().map(|&v| (v - centre).dot(n).abs()).fold(0.0, f64::max),
        None => f64::INFINITY,
    }
}

/// Evaluates the five conditions on α and β of `link` together with the
/// derived quantities.
pub fn monitor(link: &ThickLink, roles: Roles, hint: Option<&[f64; 4]>, cfg: &MonitorConfig) -> Result<LemmaReport> {
    roles.check(link)?;
    let alpha = &link.components[roles.alpha];
    let beta = &link.components[roles.beta];
    let thresholds = Thresholds {
        min_arc: PI,
        min_side: 2.0 * link.thickness * (1.0 - cfg.thickness_tol),
        theta_tol: cfg.theta_tol,
        arc_conclusion: 8.8,
        gamma_distance: 3f64.sqrt(),
    };
    let cone = Cone::new(beta)?;
    let mut rep = LemmaReport {
        step: 0,
        intersections: disk_crossings(alpha, &cone),
        marks: None,
        cyclic_order: false,
        cond1: false,
        arc_lengths: Vec::new(),
        min_arc_length: 0.0,
        cond2: false,
        hull_sides: Vec::new(),
        hull_convex: false,
        cond3: false,
        apex_inside: false,
        apex_margin: 0.0,
        cond4: false,
        lk13: None,
        lk24: None,
        cond5: false,
        theta: cone.cone_angle(),
        planarity_defect: planarity_defect(beta),
        gamma13_distance: 0.0,
        theta_flat: false,
        arcs_long: false,
        thresholds,
    };
    rep.theta_flat = (rep.theta - 2.0 * PI).abs() <= cfg.theta_tol;
    if rep.intersections.len() != 4 {
        return Ok(rep);
    }
    let start = label_start(alpha, &rep.intersections, hint);
    let ordered: Vec<Crossing> = (0..4).map(|k| rep.intersections[(start + k) % 4]).collect();
    let marks = [ordered[0].s, ordered[1].s, ordered[2].s, ordered[3].s];
    rep.marks = Some(marks);
    let psis: Vec<f64> = ordered.iter().map(|c| c.point.psi().unwrap_or(0.0)).collect();
    rep.cyclic_order = ordered.iter().all(|c| c.point != ConePoint::Apex) && cyclic_monotone(&psis);
    rep.cond1 = rep.cyclic_order;

    let l = alpha.length();
    rep.arc_lengths = (0..4).map(|k| (marks[(k + 1) % 4] - marks[k]).rem_euclid(l)).collect();
    rep.min_arc_length = rep.arc_lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.cond2 = rep.min_arc_length > thresholds.min_arc;
    rep.arcs_long = rep.min_arc_length >= thresholds.arc_conclusion;

    let pts = [ordered[0].point, ordered[1].point, ordered[2].point, ordered[3].point];
    if let Ok(hull) = cone.convex_hull_4(&pts) {
        rep.hull_sides = hull.sides.clone();
        rep.hull_convex = hull.convex;
        rep.cond3 = hull.convex && hull.sides.iter().all(|&s| s >= thresholds.min_side);
        rep.apex_inside = hull.apex_inside;
        rep.apex_margin = hull.apex_margin;
        rep.cond4 = hull.apex_inside;
    }

    if let Ok(closures) = build_closures(alpha, &cone, &marks, cfg.mark_tol) {
        let lk = |a: &ClosedCurve, b: &ClosedCurve| crossing_linking(a, b, cfg.projection).ok();
        rep.lk13 = lk(&closures[0].closed, &closures[2].closed);
        rep.lk24 = lk(&closures[1].closed, &closures[3].closed);
        rep.cond5 = matches!((rep.lk13, rep.lk24), (Some(a), Some(b)) if a != 0 && b != 0);
        let cutoff = thresholds.gamma_distance + 0.5;
        rep.gamma13_distance = min_distance_within(&closures[0].closed, &closures[2].closed, cutoff);
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transversality {
    /// Angle between α's tangent and the disk normal at each crossing.
    pub angles: Vec<f64>,
    /// Crossings within 0.1 rad of tangency.
    pub near_tangential: Vec<bool>,
}

/// Angles between α and the normal of the disk of β at each recorded crossing.
pub fn transversality_check(link: &ThickLink, roles: Roles, report: &LemmaReport) -> Result<Transversality> {
    roles.check(link)?;
    let alpha = &link.components[roles.alpha];
    let beta = &link.components[roles.beta];
    let apex = beta.centroid();
    let mut angles = Vec::with_capacity(report.intersections.len());
    for c in &report.intersections {
        let (a, b) = beta.edge(c.wedge);
        let normal = (a - apex)
            .cross(b - apex)
            .normalized()
            .ok_or_else(|| GordianError::Degenerate("flat disk triangle".into()))?;
        let t = alpha.tangent_at(c.s);
        angles.push(t.dot(normal).abs().clamp(0.0, 1.0).acos());
    }
    let near_tangential = angles.iter().map(|&a| a > PI / 2.0 - 0.1).collect();
    Ok(Transversality { angles, near_tangential })
}

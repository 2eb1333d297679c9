//! The cone `C(γ)` over a closed curve with apex at its centroid.
//!
//! Points on the cone are kept in intrinsic polar coordinates: `psi` is the
//! developed angle in `[0, θ)` measured from the ray through vertex 0, and
//! `rho` the intrinsic distance to the apex. Geodesics are straight chords in
//! the development unless the angular separation reaches π, in which case
//! they run through the apex.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curves::ClosedCurve;
use crate::error::{GordianError, Result};
use crate::geom::{closest_point_triangle, point_segment, KahanSum, Point3};

/// Default tolerance on lengths compared against 2 in the four-point property.
pub const DEFAULT_LENGTH_TOL: f64 = 1e-3;
/// Default tolerance on angles.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConePoint {
    Apex,
    Ray { psi: f64, rho: f64 },
}

impl ConePoint {
    pub fn rho(&self) -> f64 {
        match *self {
            ConePoint::Apex => 0.0,
            ConePoint::Ray { rho, .. } => rho,
        }
    }

    pub fn psi(&self) -> Option<f64> {
        match *self {
            ConePoint::Apex => None,
            ConePoint::Ray { psi, .. } => Some(psi),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Cone {
    base: ClosedCurve,
    apex: Point3,
    radii: Vec<f64>,
    units: Vec<Point3>,
    /// In-plane unit vector completing `units[i]` to a frame of wedge `i`.
    normals: Vec<Point3>,
    wedges: Vec<f64>,
    /// `phi[i]` is the developed angle of vertex `i`; `phi[n] = θ`.
    phi: Vec<f64>,
}

fn polar(rho: f64, a: f64) -> (f64, f64) {
    (rho * a.cos(), rho * a.sin())
}

fn dist2((ax, ay): (f64, f64), (bx, by): (f64, f64)) -> f64 {
    (ax - bx).hypot(ay - by)
}

fn point_segment_2d(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    dist2(p, (a.0 + t * dx, a.1 + t * dy))
}

/// Angle at `p` in the planar triangle `(o, p, q)` with `o` the origin.
fn angle_at(p: (f64, f64), q: (f64, f64)) -> f64 {
    let u = (-p.0, -p.1);
    let v = (q.0 - p.0, q.1 - p.1);
    (u.0 * v.1 - u.1 * v.0).abs().atan2(u.0 * v.0 + u.1 * v.1)
}

impl Cone {
    pub fn new(base: &ClosedCurve) -> Result<Cone> {
        Self::with_apex(base, base.centroid())
    }

    /// Cone with an explicit apex instead of the centroid.
    pub fn with_apex(base: &ClosedCurve, apex: Point3) -> Result<Cone> {
        let n = base.len();
        let scale = base.length();
        for (a, b) in base.segments() {
            if point_segment(apex, a, b).0 <= 1e-12 * scale {
                return Err(GordianError::ApexOnCurve);
            }
        }
        let radii: Vec<f64> = base.vertices().iter().map(|&v| v.dist(apex)).collect();
        let units: Vec<Point3> = base.vertices().iter().zip(&radii).map(|(&v, &r)| (v - apex) / r).collect();
        let mut normals = Vec::with_capacity(n);
        let mut wedges = Vec::with_capacity(n);
        let mut phi = Vec::with_capacity(n + 1);
        let mut acc = KahanSum::default();
        phi.push(0.0);
        for i in 0..n {
            let (u, w) = (units[i], units[(i + 1) % n]);
            let angle = u.angle_to(w);
            let e = (w - u * u.dot(w)).normalized().unwrap_or_else(|| u.any_orthogonal());
            normals.push(e);
            wedges.push(angle);
            acc.add(angle);
            phi.push(acc.value());
        }
        Ok(Cone {
            base: base.clone(),
            apex,
            radii,
            units,
            normals,
            wedges,
            phi,
        })
    }

    pub fn base(&self) -> &ClosedCurve {
        &self.base
    }

    pub fn apex(&self) -> Point3 {
        self.apex
    }

    pub fn cone_angle(&self) -> f64 {
        self.phi[self.base.len()]
    }

    /// Radial projection of the base vertices onto the unit sphere about the apex.
    pub fn spherical_projection(&self) -> &[Point3] {
        &self.units
    }

    /// Developed images of the base vertices.
    pub fn development(&self) -> Vec<(f64, f64)> {
        (0..self.base.len()).map(|i| polar(self.radii[i], self.phi[i])).collect()
    }

    pub fn developed(&self, p: &ConePoint) -> (f64, f64) {
        match *p {
            ConePoint::Apex => (0.0, 0.0),
            ConePoint::Ray { psi, rho } => polar(rho, psi),
        }
    }

    fn wrap_angle(&self, psi: f64) -> f64 {
        let th = self.cone_angle();
        let w = psi.rem_euclid(th);
        if w >= th {
            0.0
        } else {
            w
        }
    }

    fn wedge_of(&self, psi: f64) -> usize {
        let n = self.base.len();
        match self.phi.binary_search_by(|c| c.partial_cmp(&psi).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// Point at angle `psi` and apex distance `rho`, angle wrapped into `[0, θ)`.
    pub fn point(&self, psi: f64, rho: f64) -> ConePoint {
        if rho <= 0.0 {
            ConePoint::Apex
        } else {
            ConePoint::Ray {
                psi: self.wrap_angle(psi),
                rho,
            }
        }
    }

    /// Base point of the ray at developed angle `psi`, as (arc length, distance to apex).
    fn ray_base(&self, psi: f64) -> (f64, f64) {
        let i = self.wedge_of(psi);
        let a = psi - self.phi[i];
        let w0 = (self.radii[i], 0.0);
        let w1 = polar(self.radii[(i + 1) % self.base.len()], self.wedges[i]);
        let d = (a.cos(), a.sin());
        // solve w0 + lambda (w1 - w0) = mu d
        let e = (w1.0 - w0.0, w1.1 - w0.1);
        let det = e.0 * d.1 - e.1 * d.0;
        let lambda = if det.abs() > 0.0 {
            ((-w0.0) * d.1 - (-w0.1) * d.0) / det
        } else {
            0.0
        };
        let lambda = lambda.clamp(0.0, 1.0);
        let s = self.base.arc_at_vertex(i) + lambda * self.base.edge_lengths()[i];
        let hit = (w0.0 + lambda * e.0, w0.1 + lambda * e.1);
        (self.base.wrap(s), hit.0.hypot(hit.1))
    }

    /// Ray parameters `(s, t)`: the point is `P + t (γ(s) − P)`.
    pub fn ray_coords(&self, p: &ConePoint) -> Option<(f64, f64)> {
        match *p {
            ConePoint::Apex => None,
            ConePoint::Ray { psi, rho } => {
                let (s, r) = self.ray_base(psi);
                Some((s, rho / r))
            }
        }
    }

    /// The point `P + t (γ(s) − P)`.
    pub fn from_ray(&self, s: f64, t: f64) -> Result<ConePoint> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(GordianError::NotOnCone(format!("radial fraction {t}")));
        }
        if t == 0.0 {
            return Ok(ConePoint::Apex);
        }
        let (i, _) = self.base.locate(s);
        let q = self.base.point_at(s) - self.apex;
        let a = self.units[i].angle_to(q).min(self.wedges[i]);
        Ok(self.point(self.phi[i] + a, t * q.norm()))
    }

    /// Point `p` known to lie in the flat triangle `(P, v_i, v_{i+1})`.
    pub fn from_wedge_point(&self, i: usize, p: Point3) -> ConePoint {
        let i = i % self.base.len();
        let d = p - self.apex;
        let rho = d.norm();
        if rho == 0.0 {
            return ConePoint::Apex;
        }
        let a = d.dot(self.normals[i]).atan2(d.dot(self.units[i])).clamp(0.0, self.wedges[i]);
        self.point(self.phi[i] + a, rho)
    }

    /// Nearest point of the disk `D(γ)` to `p` and its distance.
    pub fn locate_ambient(&self, p: Point3) -> (ConePoint, f64) {
        let n = self.base.len();
        let v = self.base.vertices();
        let mut best = (0, self.apex, f64::INFINITY);
        for i in 0..n {
            let q = closest_point_triangle(p, self.apex, v[i], v[(i + 1) % n]);
            let d = q.dist(p);
            if d < best.2 {
                best = (i, q, d);
            }
        }
        (self.from_wedge_point(best.0, best.1), best.2)
    }

    /// Ambient position in ℝ³.
    pub fn ambient(&self, p: &ConePoint) -> Point3 {
        match *p {
            ConePoint::Apex => self.apex,
            ConePoint::Ray { psi, rho } => {
                let i = self.wedge_of(psi);
                let a = psi - self.phi[i];
                self.apex + (self.units[i] * a.cos() + self.normals[i] * a.sin()) * rho
            }
        }
    }

    /// Angular separation in `[0, θ/2]`.
    pub fn separation(&self, a: f64, b: f64) -> f64 {
        let th = self.cone_angle();
        let d = (a - b).rem_euclid(th);
        d.min(th - d)
    }

    /// Signed developed angle from `a` to `b` along the shorter way round.
    fn signed_separation(&self, a: f64, b: f64) -> f64 {
        let th = self.cone_angle();
        let d = (b - a).rem_euclid(th);
        if d <= th - d {
            d
        } else {
            d - th
        }
    }

    pub fn geodesic_length(&self, a: &ConePoint, b: &ConePoint) -> f64 {
        match (*a, *b) {
            (ConePoint::Apex, p) | (p, ConePoint::Apex) => p.rho(),
            (ConePoint::Ray { psi: p1, rho: r1 }, ConePoint::Ray { psi: p2, rho: r2 }) => {
                let d = self.separation(p1, p2);
                if d < PI {
                    (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * d.cos()).max(0.0).sqrt()
                } else {
                    r1 + r2
                }
            }
        }
    }

    /// Shortest path from `a` to `b`, sampled at `samples + 1` points (apex
    /// paths also include the apex).
    pub fn geodesic(&self, a: &ConePoint, b: &ConePoint, samples: usize) -> Geodesic {
        let length = self.geodesic_length(a, b);
        let samples = samples.max(1);
        let through_apex = match (a.psi(), b.psi()) {
            (Some(p1), Some(p2)) => self.separation(p1, p2) >= PI,
            _ => true,
        };
        let path = if through_apex {
            let (ra, rb) = (a.rho(), b.rho());
            let mut path = vec![*a];
            let mut apex_added = ra == 0.0;
            for k in 1..samples {
                let x = length * k as f64 / samples as f64;
                if x < ra {
                    path.push(self.point(a.psi().unwrap(), ra - x));
                    continue;
                }
                if !apex_added {
                    path.push(ConePoint::Apex);
                    apex_added = true;
                }
                if x > ra {
                    path.push(self.point(b.psi().unwrap(), x - ra));
                }
            }
            if !apex_added && rb > 0.0 {
                path.push(ConePoint::Apex);
            }
            path.push(*b);
            path
        } else {
            let (p1, p2) = (a.psi().unwrap(), b.psi().unwrap());
            let d = self.signed_separation(p1, p2);
            let start = (a.rho(), 0.0);
            let end = polar(b.rho(), d);
            (0..=samples)
                .map(|k| {
                    let t = k as f64 / samples as f64;
                    let q = (start.0 + t * (end.0 - start.0), start.1 + t * (end.1 - start.1));
                    self.point(p1 + q.1.atan2(q.0), q.0.hypot(q.1))
                })
                .collect()
        };
        Geodesic { length, path }
    }

    /// Ambient polyline of the geodesic from `a` to `b`, with vertices at every
    /// crossing of a wedge boundary and spacing at most `max_step`.
    pub fn geodesic_polyline(&self, a: &ConePoint, b: &ConePoint, max_step: f64) -> Vec<Point3> {
        let length = self.geodesic_length(a, b);
        let steps = ((length / max_step).ceil() as usize).max(1);
        let through_apex = match (a.psi(), b.psi()) {
            (Some(p1), Some(p2)) => self.separation(p1, p2) >= PI,
            _ => true,
        };
        if through_apex {
            return self.geodesic(a, b, steps).path.iter().map(|p| self.ambient(p)).collect();
        }
        let (p1, p2) = (a.psi().unwrap(), b.psi().unwrap());
        let d = self.signed_separation(p1, p2);
        let start = (a.rho(), 0.0);
        let end = polar(b.rho(), d);
        let mut ts: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        // wedge boundaries between the two angles
        let th = self.cone_angle();
        let (lo, hi) = if d >= 0.0 { (p1, p1 + d) } else { (p1 + d, p1) };
        for k in -1..=1 {
            for &f in &self.phi {
                let ang = f + k as f64 * th;
                if ang > lo && ang < hi {
                    let rel = ang - p1;
                    let dir = (rel.cos(), rel.sin());
                    let e = (end.0 - start.0, end.1 - start.1);
                    let det = e.0 * dir.1 - e.1 * dir.0;
                    if det.abs() > 0.0 {
                        let t = ((-start.0) * dir.1 - (-start.1) * dir.0) / det;
                        if t > 0.0 && t < 1.0 {
                            ts.push(t);
                        }
                    }
                }
            }
        }
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        ts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        ts.iter()
            .map(|&t| {
                let q = (start.0 + t * (end.0 - start.0), start.1 + t * (end.1 - start.1));
                self.ambient(&self.point(p1 + q.1.atan2(q.0), q.0.hypot(q.1)))
            })
            .collect()
    }

    /// Intrinsic distance from `p` to the base curve.
    pub fn distance_to_base(&self, p: &ConePoint) -> f64 {
        let n = self.base.len();
        let th = self.cone_angle();
        let (psi, rho) = match *p {
            ConePoint::Apex => return self.radii.iter().cloned().fold(f64::INFINITY, f64::min),
            ConePoint::Ray { psi, rho } => (psi, rho),
        };
        let x = (rho, 0.0);
        let mut best = f64::INFINITY;
        for i in 0..n {
            let mut a0 = (self.phi[i] - psi).rem_euclid(th);
            if a0 > th / 2.0 {
                a0 -= th;
            }
            let a1 = a0 + self.wedges[i];
            let r0 = self.radii[i];
            let r1 = self.radii[(i + 1) % n];
            let d = if a0 > -PI && a1 < PI {
                point_segment_2d(x, polar(r0, a0), polar(r1, a1))
            } else {
                // the segment is reached around the apex or straight for its near end
                let e0 = if a0.abs() < PI { dist2(x, polar(r0, a0)) } else { rho + r0 };
                let e1 = if a1.abs() < PI { dist2(x, polar(r1, a1)) } else { rho + r1 };
                e0.min(e1)
            };
            best = best.min(d);
        }
        best
    }

    /// Geodesic quadrilateral through four points, in angular order about the apex.
    pub fn convex_hull_4(&self, pts: &[ConePoint; 4]) -> Result<ConePolygon> {
        let mut rays: Vec<(f64, f64)> = Vec::with_capacity(4);
        for p in pts {
            match *p {
                ConePoint::Apex => return Err(GordianError::InvalidArgument("hull vertex at the apex".into())),
                ConePoint::Ray { psi, rho } => rays.push((psi, rho)),
            }
        }
        rays.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let th = self.cone_angle();
        let gaps: Vec<f64> = (0..4)
            .map(|k| {
                if k < 3 {
                    rays[k + 1].0 - rays[k].0
                } else {
                    th - (rays[3].0 - rays[0].0)
                }
            })
            .collect();
        let apex_inside = gaps.iter().all(|&g| g < PI);
        let mut vertices: Vec<ConePoint> = rays.iter().map(|&(psi, rho)| ConePoint::Ray { psi, rho }).collect();
        let mut sides = Vec::with_capacity(4);
        let mut angles = vec![0.0; 4];
        let mut apex_margin = 0.0;
        if apex_inside {
            let mut margin = f64::INFINITY;
            for k in 0..4 {
                let (r0, r1, g) = (rays[k].1, rays[(k + 1) % 4].1, gaps[k]);
                let p = (r0, 0.0);
                let q = polar(r1, g);
                let side = dist2(p, q);
                sides.push(side);
                angles[k] += angle_at(p, q);
                angles[(k + 1) % 4] += angle_at(q, p);
                margin = margin.min(if side > 0.0 { r0 * r1 * g.sin() / side } else { 0.0 });
            }
            apex_margin = margin;
        } else {
            // cut along the widest gap and work in the flat development of the rest
            let widest = (0..4).max_by(|&a, &b| gaps[a].partial_cmp(&gaps[b]).unwrap()).unwrap();
            let start = (widest + 1) % 4;
            let mut flat = [(0.0, 0.0); 4];
            let mut ang = 0.0;
            for j in 0..4 {
                let k = (start + j) % 4;
                flat[k] = polar(rays[k].1, ang);
                ang += gaps[k];
            }
            // hull order is the angular order about the centre of the flat points
            let c = (
                flat.iter().map(|p| p.0).sum::<f64>() / 4.0,
                flat.iter().map(|p| p.1).sum::<f64>() / 4.0,
            );
            let mut order = [0usize, 1, 2, 3];
            order.sort_by(|&a, &b| {
                let ta = (flat[a].1 - c.1).atan2(flat[a].0 - c.0);
                let tb = (flat[b].1 - c.1).atan2(flat[b].0 - c.0);
                ta.partial_cmp(&tb).unwrap()
            });
            let flat = order.map(|k| flat[k]);
            vertices = order.iter().map(|&k| vertices[k]).collect();
            let area2: f64 = (0..4)
                .map(|k| flat[k].0 * flat[(k + 1) % 4].1 - flat[(k + 1) % 4].0 * flat[k].1)
                .sum();
            for k in 0..4 {
                let (prev, p, q) = (flat[(k + 3) % 4], flat[k], flat[(k + 1) % 4]);
                sides.push(self.geodesic_length(&vertices[k], &vertices[(k + 1) % 4]));
                let u = (prev.0 - p.0, prev.1 - p.1);
                let v = (q.0 - p.0, q.1 - p.1);
                let inner = (u.0 * v.1 - u.1 * v.0).abs().atan2(u.0 * v.0 + u.1 * v.1);
                // a turn against the polygon's orientation marks a reflex corner
                let turn = (p.0 - prev.0) * (q.1 - p.1) - (p.1 - prev.1) * (q.0 - p.0);
                angles[k] = if turn * area2 < 0.0 { 2.0 * PI - inner } else { inner };
            }
        }
        let convex = angles.iter().all(|&a| a <= PI + DEFAULT_ANGLE_TOL) && sides.iter().all(|&s| s > 0.0);
        Ok(ConePolygon {
            vertices,
            sides,
            angles,
            convex,
            apex_inside,
            apex_margin,
        })
    }

    pub fn four_point_property(&self, pts: &[ConePoint; 4], tol: f64) -> Result<FourPointReport> {
        let mut pairwise = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i + 1..4 {
                pairwise.push(self.geodesic_length(&pts[i], &pts[j]));
            }
        }
        let to_base: Vec<f64> = pts.iter().map(|p| self.distance_to_base(p)).collect();
        let hull = self.convex_hull_4(pts)?;
        let min_pairwise = pairwise.iter().cloned().fold(f64::INFINITY, f64::min);
        let min_to_base = to_base.iter().cloned().fold(f64::INFINITY, f64::min);
        let holds = min_pairwise >= 2.0 - tol && min_to_base >= 2.0 - tol && hull.convex && hull.apex_inside;
        Ok(FourPointReport {
            pairwise,
            min_pairwise,
            to_base,
            min_to_base,
            hull,
            holds,
        })
    }

    /// Boundary of the convex hull of the radius-`r` disks about four points.
    pub fn hull_of_disks(&self, pts: &[ConePoint; 4], r: f64, samples_per_arc: usize) -> Result<DiskHull> {
        if r.is_nan() || r <= 0.0 {
            return Err(GordianError::InvalidArgument(format!("disk radius must be positive, got {r}")));
        }
        let k = self.convex_hull_4(pts)?;
        if !k.convex || !k.apex_inside {
            return Err(GordianError::InvalidArgument(
                "hull of the four points is not convex around the apex".into(),
            ));
        }
        let arcs: Vec<f64> = k.angles.iter().map(|&a| r * (PI - a)).collect();
        let segments = k.sides.clone();
        let spa = samples_per_arc.max(1);
        let mut boundary = Vec::new();
        for i in 0..4 {
            let (psi0, r0) = (k.vertices[i].psi().unwrap(), k.vertices[i].rho());
            let prev = &k.vertices[(i + 3) % 4];
            let next = &k.vertices[(i + 1) % 4];
            // chart centred on vertex i: vertex at (r0, 0), neighbours rotated by their separations
            let pp = polar(prev.rho(), self.signed_separation(psi0, prev.psi().unwrap()));
            let pn = polar(next.rho(), self.signed_separation(psi0, next.psi().unwrap()));
            let p = (r0, 0.0);
            let outward = |a: (f64, f64), b: (f64, f64)| -> (f64, f64) {
                let (dx, dy) = (b.0 - a.0, b.1 - a.1);
                let l = dx.hypot(dy);
                let mut n = (dy / l, -dx / l);
                // away from the apex (the origin of the chart)
                if n.0 * a.0 + n.1 * a.1 < 0.0 {
                    n = (-n.0, -n.1);
                }
                n
            };
            let n_in = outward(pp, p);
            let n_out = outward(p, pn);
            let a0 = n_in.1.atan2(n_in.0);
            let mut sweep = n_out.1.atan2(n_out.0) - a0;
            let turn = PI - k.angles[i];
            while sweep < turn - PI {
                sweep += 2.0 * PI;
            }
            while sweep > turn + PI {
                sweep -= 2.0 * PI;
            }
            for j in 0..=spa {
                let a = a0 + sweep * j as f64 / spa as f64;
                let q = (p.0 + r * a.cos(), p.1 + r * a.sin());
                boundary.push(self.point(psi0 + q.1.atan2(q.0), q.0.hypot(q.1)));
            }
        }
        let length = arcs.iter().sum::<f64>() + segments.iter().sum::<f64>();
        Ok(DiskHull {
            boundary,
            segments,
            arcs,
            length,
        })
    }

    /// Area of the disk `D(γ)` swept by the generating segments.
    pub fn disk_area(&self) -> f64 {
        let mut acc = KahanSum::default();
        for (a, b) in self.base.segments() {
            acc.add(0.5 * (a - self.apex).cross(b - self.apex).norm());
        }
        acc.value()
    }

    /// Isoperimetric ratio `4π·area/ℓ²` and whether it is at most `1 + tol`.
    pub fn isoperimetric_check(&self, tol: f64) -> (f64, bool) {
        let l = self.base.length();
        let ratio = 4.0 * PI * self.disk_area() / (l * l);
        (ratio, ratio <= 1.0 + tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Geodesic {
    pub length: f64,
    pub path: Vec<ConePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConePolygon {
    pub vertices: Vec<ConePoint>,
    /// `sides[k]` joins `vertices[k]` and `vertices[k + 1]`.
    pub sides: Vec<f64>,
    pub angles: Vec<f64>,
    pub convex: bool,
    pub apex_inside: bool,
    /// Smallest distance from the apex to a side; zero when the apex is outside.
    pub apex_margin: f64,
}

impl ConePolygon {
    pub fn perimeter(&self) -> f64 {
        self.sides.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourPointReport {
    pub pairwise: Vec<f64>,
    pub min_pairwise: f64,
    pub to_base: Vec<f64>,
    pub min_to_base: f64,
    pub hull: ConePolygon,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiskHull {
    /// Samples of the circular arcs; consecutive arcs are joined by the tangent segments.
    pub boundary: Vec<ConePoint>,
    pub segments: Vec<f64>,
    pub arcs: Vec<f64>,
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CroftonEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Monte Carlo length of a closed spherical polyline (great arcs between
/// consecutive points): π times the mean number of crossings with a uniformly
/// random great circle.
pub fn crofton_estimate(points: &[Point3], trials: usize, seed: u64) -> Result<CroftonEstimate> {
    if points.len() < 2 {
        return Err(GordianError::InvalidArgument("spherical curve needs at least 2 points".into()));
    }
    if let Some(i) = points.iter().position(|p| (p.norm() - 1.0).abs() > 1e-9) {
        return Err(GordianError::InvalidArgument(format!("point {i} is not on the unit sphere")));
    }
    if trials == 0 {
        return Err(GordianError::InvalidArgument("trials must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = points.len();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..trials {
        let u = unit_vector(&mut rng);
        let mut count = 0u32;
        let mut prev = u.dot(points[n - 1]) >= 0.0;
        for p in points {
            let side = u.dot(*p) >= 0.0;
            if side != prev {
                count += 1;
            }
            prev = side;
        }
        let x = PI * count as f64;
        sum += x;
        sum_sq += x * x;
    }
    let m = sum / trials as f64;
    let var = (sum_sq / trials as f64 - m * m).max(0.0);
    Ok(CroftonEstimate {
        estimate: m,
        std_error: (var / trials as f64).sqrt(),
        trials,
    })
}

/// Length of the closed spherical polyline through unit vectors.
pub fn spherical_length(points: &[Point3]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| points[i].angle_to(points[(i + 1) % n]))
        .collect::<KahanSum>()
        .value()
}

mod rand_distr_free {
    use crate::geom::Point3;
    use rand::Rng;

    /// Uniform direction on the unit sphere.
    pub fn unit_vector(rng: &mut impl Rng) -> Point3 {
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - z * z).max(0.0).sqrt();
        Point3::new(s * a.cos(), s * a.sin(), z)
    }
}

pub use rand_distr_free::unit_vector;

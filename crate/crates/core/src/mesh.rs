//! Tube meshes around link components and SVG drawings of cone developments.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write;

use crate::cones::Cone;
use crate::curves::{ClosedCurve, ThickLink};
use crate::error::{GordianError, Result};
use crate::geom::Point3;

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point3>,
    pub triangles: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let f = self.triangles.len() as i64;
        v - self.edge_uses().len() as i64 + f
    }

    fn edge_uses(&self) -> HashMap<(usize, usize), usize> {
        let mut edges = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    /// Every edge is shared by exactly two triangles.
    pub fn is_watertight(&self) -> bool {
        self.edge_uses().values().all(|&n| n == 2)
    }

    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for p in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        out
    }
}

/// Rotation-minimizing normals along a closed curve, twisted uniformly so the
/// frame closes up.
fn closed_frames(c: &ClosedCurve) -> Vec<(Point3, Point3)> {
    let v = c.vertices();
    let n = v.len();
    let tangent = |i: usize| {
        (v[(i + 1) % n] - v[(i + n - 1) % n])
            .normalized()
            .unwrap_or(Point3::new(0.0, 0.0, 1.0))
    };
    let t0 = tangent(0);
    let mut normals = Vec::with_capacity(n + 1);
    let mut r = t0.any_orthogonal();
    normals.push(r);
    let mut t = t0;
    for i in 1..=n {
        // double reflection
        let x0 = v[(i - 1) % n];
        let x1 = v[i % n];
        let t1 = tangent(i % n);
        let v1 = x1 - x0;
        let c1 = v1.norm_sq();
        if c1 > 0.0 {
            let rl = r - v1 * (2.0 / c1 * v1.dot(r));
            let tl = t - v1 * (2.0 / c1 * v1.dot(t));
            let v2 = t1 - tl;
            let c2 = v2.norm_sq();
            r = if c2 > 0.0 { rl - v2 * (2.0 / c2 * v2.dot(rl)) } else { rl };
        }
        r = (r - t1 * r.dot(t1)).normalized().unwrap_or_else(|| t1.any_orthogonal());
        t = t1;
        normals.push(r);
    }
    let end = normals[n];
    let start = normals[0];
    let twist = t0.cross(end).dot(start).atan2(end.dot(start));
    (0..n)
        .map(|i| {
            let ti = tangent(i);
            let a = twist * i as f64 / n as f64;
            let r = normals[i];
            let b = ti.cross(r);
            let ri = r * a.cos() + b * a.sin();
            (ri, ti.cross(ri))
        })
        .collect()
}

/// Triangulated tubes of radius `radius` with `ring` vertices per cross-section.
pub fn tube_mesh(link: &ThickLink, radius: f64, ring: usize) -> Result<Mesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GordianError::InvalidArgument(format!("tube radius must be positive, got {radius}")));
    }
    if ring < 3 {
        return Err(GordianError::InvalidArgument(format!(
            "ring resolution must be at least 3, got {ring}"
        )));
    }
    let mut mesh = Mesh {
        vertices: Vec::new(),
        triangles: Vec::new(),
    };
    for c in &link.components {
        let base = mesh.vertices.len();
        let n = c.len();
        for (i, (u, w)) in closed_frames(c).into_iter().enumerate() {
            for k in 0..ring {
                let a = 2.0 * PI * k as f64 / ring as f64;
                mesh.vertices.push(c.vertex(i) + (u * a.cos() + w * a.sin()) * radius);
            }
        }
        let id = |i: usize, k: usize| base + (i % n) * ring + k % ring;
        for i in 0..n {
            for k in 0..ring {
                mesh.triangles.push([id(i, k), id(i + 1, k), id(i + 1, k + 1)]);
                mesh.triangles.push([id(i, k), id(i + 1, k + 1), id(i, k + 1)]);
            }
        }
    }
    Ok(mesh)
}

/// The development of a cone as an SVG polyline, with the apex marked.
pub fn development_svg(cone: &Cone) -> String {
    let pts = cone.development();
    let extent = pts.iter().map(|&(x, y)| x.abs().max(y.abs())).fold(1e-9, f64::max) * 1.1;
    let size = 800.0;
    let k = size / (2.0 * extent);
    let map = |(x, y): (f64, f64)| ((x + extent) * k, (extent - y) * k);
    let mut path = String::new();
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = map(p);
        let _ = write!(path, "{}{x:.4},{y:.4}", if i == 0 { "" } else { " " });
    }
    let (ax, ay) = map((0.0, 0.0));
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n\
         <polyline points=\"{path}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n\
         <circle cx=\"{ax:.4}\" cy=\"{ay:.4}\" r=\"3\" fill=\"red\"/>\n\
         </svg>\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_counts() {
        let c = ClosedCurve::circle(Point3::ORIGIN, 5.0, 40).unwrap();
        let link = ThickLink::new(vec![c], 1.0).unwrap();
        let m = tube_mesh(&link, 1.0, 12).unwrap();
        assert_eq!(m.vertices.len(), 480);
        assert_eq!(m.euler_characteristic(), 0);
        assert!(m.is_watertight());
        for (i, p) in m.vertices.iter().enumerate() {
            let centre = link.components[0].vertex(i / 12);
            assert!((p.dist(centre) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn frames_close_on_a_twisted_curve() {
        let c = ClosedCurve::from_fn(300, |u| {
            Point3::new(
                (2.0 + (3.0 * u).cos()) * (2.0 * u).cos(),
                (2.0 + (3.0 * u).cos()) * (2.0 * u).sin(),
                (3.0 * u).sin(),
            ) * 3.0
        })
        .unwrap();
        let frames = closed_frames(&c);
        let n = frames.len();
        // neighbouring frames differ only by a small rotation, including across the seam
        for i in 0..n {
            let (a, _) = frames[i];
            let (b, _) = frames[(i + 1) % n];
            assert!(a.dot(b) > 0.95, "frame jump at {i}: {}", a.dot(b));
        }
    }

    #[test]
    fn svg_mentions_every_vertex() {
        let c = ClosedCurve::circle(Point3::ORIGIN, 2.0, 16).unwrap();
        let svg = development_svg(&Cone::new(&c).unwrap());
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches(',').count(), Cone::new(&c).unwrap().development().len());
    }
}

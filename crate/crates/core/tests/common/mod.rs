#![allow(dead_code)]

use std::f64::consts::PI;

use gordian_core::curves::ClosedCurve;
use gordian_core::geom::Point3;
use rand::Rng;

/// Smooth closed curve with random low Fourier modes; planar when `planar`.
pub fn fourier_curve(rng: &mut impl Rng, n: usize, planar: bool) -> ClosedCurve {
    let mut coef = [[0.0f64; 6]; 3];
    for (k, row) in coef.iter_mut().enumerate() {
        for c in row.iter_mut() {
            *c = rng.gen_range(-1.0..1.0) / (1 + k) as f64;
        }
    }
    let base = rng.gen_range(2.0..4.0);
    ClosedCurve::from_fn(n, |u| {
        let mut p = Point3::new(base * u.cos(), base * u.sin(), 0.0);
        for (k, row) in coef.iter().enumerate() {
            let f = (k + 2) as f64;
            let (c, s) = ((f * u).cos(), (f * u).sin());
            p.x += row[0] * c + row[1] * s;
            p.y += row[2] * c + row[3] * s;
            if !planar {
                p.z += row[4] * c + row[5] * s;
            }
        }
        p
    })
    .unwrap()
}

/// Convex planar curve: a circle with random radial bumps small enough to stay convex.
pub fn convex_planar(rng: &mut impl Rng, n: usize) -> ClosedCurve {
    let r = rng.gen_range(1.0..5.0);
    let (a, b) = (rng.gen_range(0.0..0.08), rng.gen_range(0.0..0.03));
    let (pa, pb) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI));
    let stretch = rng.gen_range(0.5..2.0);
    let tilt = rng.gen_range(0.0..PI);
    ClosedCurve::from_fn(n, |u| {
        let rho = r * (1.0 + a * (2.0 * u + pa).cos() + b * (3.0 * u + pb).cos());
        let (x, y) = (rho * u.cos() * stretch, rho * u.sin());
        Point3::new(x * tilt.cos() - y * tilt.sin(), x * tilt.sin() + y * tilt.cos(), 0.0)
    })
    .unwrap()
}

pub fn square() -> ClosedCurve {
    ClosedCurve::new(vec![
        Point3::new(1.0, 1.0, 0.0),
        Point3::new(-1.0, 1.0, 0.0),
        Point3::new(-1.0, -1.0, 0.0),
        Point3::new(1.0, -1.0, 0.0),
    ])
    .unwrap()
}

pub fn lifted_square() -> ClosedCurve {
    ClosedCurve::new(vec![
        Point3::new(1.0, 1.0, 1.0),
        Point3::new(-1.0, 1.0, 0.0),
        Point3::new(-1.0, -1.0, 0.0),
        Point3::new(1.0, -1.0, 0.0),
    ])
    .unwrap()
}

/// Every edge split into `k` equal pieces.
pub fn refine(c: &ClosedCurve, k: usize) -> Vec<Point3> {
    let mut out = Vec::with_capacity(c.len() * k);
    for (a, b) in c.segments() {
        for j in 0..k {
            out.push(a.lerp(b, j as f64 / k as f64));
        }
    }
    out
}

/// Reach by exhaustive search: smallest circumradius of consecutive vertex
/// triples, and half the smallest distance among refined point pairs that
/// are local minima of the distance function and not near the diagonal.
pub fn brute_reach(c: &ClosedCurve, k: usize) -> f64 {
    let v = c.vertices();
    let n = v.len();
    let mut local = f64::INFINITY;
    for i in 0..n {
        let (p, q, w) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
        let twice_area = (q - p).cross(w - p).norm();
        if twice_area > 0.0 {
            local = local.min(q.dist(w) * p.dist(w) * p.dist(q) / (2.0 * twice_area));
        }
    }
    let pts = refine(c, k);
    let m = pts.len();
    let mut arc = vec![0.0; m + 1];
    for i in 0..m {
        arc[i + 1] = arc[i] + pts[i].dist(pts[(i + 1) % m]);
    }
    let total = arc[m];
    let window = 0.5 * PI * local.min(total);
    let d = |i: usize, j: usize| pts[i % m].dist(pts[j % m]);
    let mut best = f64::INFINITY;
    for i in 0..m {
        for j in i + 1..m {
            let gap = arc[j] - arc[i];
            if gap.min(total - gap) < window {
                continue;
            }
            let dij = d(i, j);
            if dij >= best {
                continue;
            }
            if dij <= d(i + 1, j) && dij <= d(i + m - 1, j) && dij <= d(i, j + 1) && dij <= d(i, j + m - 1) {
                best = dij;
            }
        }
    }
    local.min(0.5 * best)
}
